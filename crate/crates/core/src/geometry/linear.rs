use itertools::Itertools;
use num_bigint::BigInt;

use super::{rank, HomogeneousForm};
use crate::error::{Error, Result};

/// Whether a union of hyperplanes is a reduced normal-crossings divisor,
/// i.e. the linear forms are in general position: every subset of at most
/// N + 1 of them has linearly independent coefficient vectors (which also
/// rules out proportional pairs).
pub fn normal_crossings_linear_check(forms: &[HomogeneousForm]) -> Result<bool> {
    let rows = forms
        .iter()
        .map(HomogeneousForm::linear_coefficients)
        .collect::<Result<Vec<Vec<BigInt>>>>()?;
    let Some(first) = rows.first() else {
        return Ok(true);
    };
    let num_vars = first.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != num_vars) {
        return Err(Error::DimensionMismatch { expected: num_vars, got: bad.len() });
    }
    let size = rows.len().min(num_vars);
    Ok(rows
        .iter()
        .combinations(size)
        .all(|subset| rank(&subset.into_iter().cloned().collect::<Vec<_>>()) == size))
}
