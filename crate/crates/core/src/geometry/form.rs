use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

type Terms = BTreeMap<Vec<u32>, BigInt>;

/// Homogeneous polynomial with integer coefficients in `num_vars` variables.
///
/// Forms built with [`HomogeneousForm::new`] or [`HomogeneousForm::parse`]
/// are primitive (coefficient content 1). Components of a morphism keep
/// their relative scaling and are built with `with_content`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    num_vars: usize,
    degree: u32,
    terms: Terms,
}

impl HomogeneousForm {
    pub fn new<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut form = Self::with_content(num_vars, terms)?;
        let content = form.content();
        if !content.is_one() {
            for c in form.terms.values_mut() {
                *c /= &content;
            }
        }
        Ok(form)
    }

    /// Like `new` but keeps the coefficients exactly as given.
    pub fn with_content<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut merged = Terms::new();
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: exps.len() });
            }
            *merged.entry(exps).or_insert_with(BigInt::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        Self::from_terms(num_vars, merged)
    }

    fn from_terms(num_vars: usize, terms: Terms) -> Result<Self> {
        let mut degrees = terms.keys().map(|e| e.iter().sum::<u32>());
        let degree = degrees
            .next()
            .ok_or_else(|| Error::InvalidSpec("form is identically zero".into()))?;
        if degrees.any(|d| d != degree) {
            return Err(Error::InvalidSpec("form is not homogeneous".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidSpec("form is constant".into()));
        }
        Ok(HomogeneousForm { num_vars, degree, terms })
    }

    /// Parses text such as `X^2 + 3*Y*Z` or `(X - Y)(X0 + 2*X2)` and
    /// divides out the content.
    pub fn parse(text: &str, num_vars: usize) -> Result<Self> {
        let terms = Parser::new(text, num_vars).parse()?;
        Self::new(num_vars, terms)
    }

    /// Parses without dividing out the content.
    pub fn parse_with_content(text: &str, num_vars: usize) -> Result<Self> {
        let terms = Parser::new(text, num_vars).parse()?;
        Self::with_content(num_vars, terms)
    }

    /// The linear form `sum coeffs[i] * X_i`.
    pub fn linear(coeffs: &[i64]) -> Result<Self> {
        let n = coeffs.len();
        Self::new(
            n,
            coeffs.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, BigInt::from(c))
            }),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides every coefficient by `g`, which must divide the content.
    pub(crate) fn divide_exact(&mut self, g: &BigInt) {
        for c in self.terms.values_mut() {
            *c /= g;
        }
    }

    /// Coefficient vector when the form is linear.
    pub fn linear_coefficients(&self) -> Result<Vec<BigInt>> {
        if self.degree != 1 {
            return Err(Error::NotLinear(self.degree));
        }
        let mut out = vec![BigInt::zero(); self.num_vars];
        for (e, c) in &self.terms {
            let i = e.iter().position(|&x| x == 1).expect("linear monomial");
            out[i] = c.clone();
        }
        Ok(out)
    }

    /// Exact value at an integer vector.
    pub fn evaluate(&self, coords: &[BigInt]) -> Result<BigInt> {
        if coords.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: coords.len() });
        }
        let powers = PowerTable::new(coords, self.degree);
        Ok(self.evaluate_with(&powers))
    }

    pub(crate) fn evaluate_with(&self, powers: &PowerTable) -> BigInt {
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut monomial = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    monomial *= &powers.table[i][k as usize];
                }
            }
            total += monomial;
        }
        total
    }

    /// Product of two forms in the same variables.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: other.num_vars });
        }
        let product = mul_terms(&self.terms, &other.terms);
        Self::from_terms(self.num_vars, product)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        HomogeneousForm { num_vars: self.num_vars, degree: self.degree, terms }
    }
}

/// Powers `x_i^k` for `k <= degree`, shared across the forms of a morphism.
pub(crate) struct PowerTable {
    table: Vec<Vec<BigInt>>,
}

impl PowerTable {
    pub(crate) fn new(coords: &[BigInt], degree: u32) -> Self {
        let table = coords
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(degree as usize + 1);
                row.push(BigInt::one());
                for k in 1..=degree as usize {
                    let next = &row[k - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        PowerTable { table }
    }
}

fn mul_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn var_name(i: usize, num_vars: usize) -> String {
    const LETTERS: [&str; 4] = ["X", "Y", "Z", "W"];
    if num_vars <= LETTERS.len() {
        LETTERS[i].to_string()
    } else {
        format!("X{i}")
    }
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            if !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(var_name(i, self.num_vars)),
                    _ => factors.push(format!("{}^{p}", var_name(i, self.num_vars))),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// If `text` is a product of linear factors such as `(X+Y)*(X-2*Z)*Y`,
/// returns each factor as a primitive linear form. Returns `None` when the
/// expression is not of that shape.
pub fn split_linear_factors(text: &str, num_vars: usize) -> Option<Vec<HomogeneousForm>> {
    let mut parser = Parser::new(text, num_vars);
    let pieces = parser.top_level_factors().ok()?;
    let mut out = Vec::new();
    for (terms, power) in pieces {
        let form = HomogeneousForm::new(num_vars, terms).ok()?;
        if form.degree() != 1 {
            return None;
        }
        for _ in 0..power {
            out.push(form.clone());
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    num_vars: usize,
    error: Option<Error>,
}

impl Parser {
    fn new(text: &str, num_vars: usize) -> Self {
        let (tokens, error) = match tokenize(text, num_vars) {
            Ok(t) => (t, None),
            Err(e) => (Vec::new(), Some(e)),
        };
        Parser { tokens, pos: 0, num_vars, error }
    }

    fn parse(&mut self) -> Result<Terms> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        let value = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Parse(format!("unexpected token {:?}", self.tokens[self.pos])));
        }
        Ok(value)
    }

    /// The factors of a pure product at top level, with their exponents.
    fn top_level_factors(&mut self) -> Result<Vec<(Terms, u32)>> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        let mut out = Vec::new();
        loop {
            let base = self.atom()?;
            let power = if self.eat(&Token::Caret) { self.exponent()? } else { 1 };
            out.push((base, power));
            if self.pos == self.tokens.len() {
                return Ok(out);
            }
            if self.eat(&Token::Star) || self.starts_atom() {
                continue;
            }
            return Err(Error::Parse("not a pure product".into()));
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Token::Num(_) | Token::Var(_) | Token::LParen))
    }

    fn constant(&self, c: BigInt) -> Terms {
        let mut t = Terms::new();
        if !c.is_zero() {
            t.insert(vec![0; self.num_vars], c);
        }
        t
    }

    fn expr(&mut self) -> Result<Terms> {
        let mut acc = self.term()?;
        loop {
            let negate = if self.eat(&Token::Plus) {
                false
            } else if self.eat(&Token::Minus) {
                true
            } else {
                return Ok(acc);
            };
            let rhs = self.term()?;
            for (e, c) in rhs {
                let entry = acc.entry(e).or_insert_with(BigInt::zero);
                if negate {
                    *entry -= c;
                } else {
                    *entry += c;
                }
            }
            acc.retain(|_, c| !c.is_zero());
        }
    }

    fn term(&mut self) -> Result<Terms> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Token::Star) || self.starts_atom() {
                let rhs = self.unary()?;
                acc = mul_terms(&acc, &rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Terms> {
        if self.eat(&Token::Minus) {
            let inner = self.unary()?;
            return Ok(inner.into_iter().map(|(e, c)| (e, -c)).collect());
        }
        if self.eat(&Token::Plus) {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(&Token::Caret) {
            let k = self.exponent()?;
            let mut out = self.constant(BigInt::one());
            for _ in 0..k {
                out = mul_terms(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                u32::try_from(&n).map_err(|_| Error::Parse(format!("bad exponent {n}")))
            }
            other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
        }
    }

    fn atom(&mut self) -> Result<Terms> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(self.constant(n))
            }
            Some(Token::Var(i)) => {
                self.pos += 1;
                let mut e = vec![0; self.num_vars];
                e[i] = 1;
                Ok(Terms::from([(e, BigInt::one())]))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Token::RParen) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

fn tokenize(text: &str, num_vars: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Num(s.parse().expect("digits")));
            }
            c if c.is_ascii_alphabetic() => {
                let letter = c.to_ascii_uppercase();
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let index = if start < i {
                    if letter != 'X' {
                        return Err(Error::Parse(format!("indexed variables use X, found {c}")));
                    }
                    chars[start..i].iter().collect::<String>().parse::<usize>().expect("digits")
                } else {
                    match letter {
                        'X' => 0,
                        'Y' => 1,
                        'Z' => 2,
                        'W' => 3,
                        _ => return Err(Error::Parse(format!("unknown variable {c}"))),
                    }
                };
                if index >= num_vars {
                    return Err(Error::DimensionMismatch { expected: num_vars, got: index + 1 });
                }
                out.push(Token::Var(index));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}
