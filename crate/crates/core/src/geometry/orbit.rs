use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::{Morphism, ProjectivePoint};
use crate::error::{Error, Result};

/// Coordinates with more decimal digits than this abort orbit extension.
pub const DEFAULT_DIGIT_CEILING: u64 = 1_000_000;

/// One line of the orbit cache file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub n: u64,
    pub coords: Vec<String>,
}

/// Lazily extended forward orbit `start, f(start), f^2(start), ...`.
///
/// Reads may happen from several threads; extension is serialized by an
/// internal lock so each index is computed once.
#[derive(Debug)]
pub struct OrbitCache {
    morphism: Morphism,
    start: ProjectivePoint,
    digit_ceiling: u64,
    points: Mutex<Vec<ProjectivePoint>>,
}

impl Clone for OrbitCache {
    fn clone(&self) -> Self {
        OrbitCache {
            morphism: self.morphism.clone(),
            start: self.start.clone(),
            digit_ceiling: self.digit_ceiling,
            points: Mutex::new(self.points()),
        }
    }
}

/// True when `|x|` has more than `ceiling` decimal digits.
pub(crate) fn exceeds_digits(x: &BigUint, ceiling: u64) -> bool {
    let limit_bits = ceiling as f64 * std::f64::consts::LOG2_10;
    let bits = x.bits() as f64;
    if bits < limit_bits - 2.0 {
        return false;
    }
    if bits > limit_bits + 2.0 {
        return true;
    }
    *x >= BigUint::from(10u32).pow(ceiling as u32)
}

impl OrbitCache {
    pub fn new(morphism: Morphism, start: ProjectivePoint) -> Result<Self> {
        if start.len() != morphism.num_vars() {
            return Err(Error::DimensionMismatch { expected: morphism.num_vars(), got: start.len() });
        }
        Ok(OrbitCache {
            morphism,
            points: Mutex::new(vec![start.clone()]),
            start,
            digit_ceiling: DEFAULT_DIGIT_CEILING,
        })
    }

    pub fn with_digit_ceiling(mut self, ceiling: u64) -> Self {
        self.digit_ceiling = ceiling;
        self
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn start(&self) -> &ProjectivePoint {
        &self.start
    }

    pub fn digit_ceiling(&self) -> u64 {
        self.digit_ceiling
    }

    /// Number of orbit points computed so far.
    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.lock().clone()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Vec<ProjectivePoint>> {
        self.points.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// `f^n(start)`, extending the cache as needed.
    pub fn orbit_point(&self, n: u64) -> Result<ProjectivePoint> {
        let mut points = self.lock();
        while points.len() as u64 <= n {
            let last = points.last().expect("orbit holds its start");
            let next = self.morphism.apply(last)?;
            if let Some(c) = next.coords().iter().find(|c| exceeds_digits(c.magnitude(), self.digit_ceiling)) {
                return Err(Error::ResourceLimit(format!(
                    "orbit index {} has a coordinate of {} bits, above the {}-digit ceiling",
                    points.len(),
                    c.bits(),
                    self.digit_ceiling
                )));
            }
            points.push(next);
        }
        Ok(points[n as usize].clone())
    }

    pub fn records(&self) -> Vec<OrbitRecord> {
        self.lock()
            .iter()
            .enumerate()
            .map(|(n, p)| OrbitRecord {
                n: n as u64,
                coords: p.coords().iter().map(BigInt::to_string).collect(),
            })
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for rec in self.records() {
            let line = serde_json::to_string(&rec).map_err(|e| Error::Cache(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| Error::Cache(e.to_string()))?;
        }
        Ok(())
    }

    /// Parses cache records and checks that they form a valid orbit prefix
    /// for this cache: consecutive indices from 0, normalized coordinates of
    /// the right length, and record 0 equal to the start point.
    fn parse_records<R: BufRead>(&self, input: R) -> Result<Vec<ProjectivePoint>> {
        let mut out = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Cache(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: OrbitRecord =
                serde_json::from_str(&line).map_err(|e| Error::Cache(format!("line {}: {e}", i + 1)))?;
            if rec.n != out.len() as u64 {
                return Err(Error::Cache(format!("expected record {}, found {}", out.len(), rec.n)));
            }
            let coords = rec
                .coords
                .iter()
                .map(|s| s.parse::<BigInt>().map_err(|e| Error::Cache(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if coords.len() != self.start.len() || !ProjectivePoint::is_normalized(&coords) {
                return Err(Error::Cache(format!("record {} is not a normalized point", rec.n)));
            }
            out.push(ProjectivePoint::normalize(coords)?);
        }
        if let Some(first) = out.first() {
            if first != &self.start {
                return Err(Error::Cache("record 0 does not match the start point".into()));
            }
        }
        Ok(out)
    }

    /// Cuts loaded points at the first one this cache's ceiling rejects, so
    /// a cache written under a larger ceiling never extends a run.
    fn within_ceiling(&self, mut points: Vec<ProjectivePoint>) -> Vec<ProjectivePoint> {
        if let Some(k) = points
            .iter()
            .position(|p| p.coords().iter().any(|c| exceeds_digits(c.magnitude(), self.digit_ceiling)))
        {
            points.truncate(k.max(1));
        }
        points
    }

    /// Adopts a previously saved orbit prefix when it is longer than what
    /// is already computed.
    pub fn load_jsonl<R: BufRead>(&self, input: R) -> Result<usize> {
        let loaded = self.within_ceiling(self.parse_records(input)?);
        let mut points = self.lock();
        if loaded.len() > points.len() {
            *points = loaded;
        }
        Ok(points.len())
    }

    /// Synchronizes with a cache file under an exclusive lock: a longer
    /// valid prefix on disk is adopted, and records the file lacks are
    /// appended. Returns the number of records in the file afterwards.
    pub fn sync_file(&self, path: &Path) -> Result<usize> {
        let cache_err = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)
            .map_err(cache_err)?;
        file.lock().map_err(cache_err)?;
        let on_disk = self.parse_records(BufReader::new(&file))?;
        let disk_len = on_disk.len();
        let usable = self.within_ceiling(on_disk);
        {
            let mut points = self.lock();
            if usable.len() > points.len() {
                *points = usable;
            }
        }
        let records = self.records();
        file.seek(SeekFrom::End(0)).map_err(cache_err)?;
        let mut writer = std::io::BufWriter::new(&file);
        for rec in records.iter().skip(disk_len) {
            let line = serde_json::to_string(rec).map_err(|e| Error::Cache(e.to_string()))?;
            writeln!(writer, "{line}").map_err(cache_err)?;
        }
        writer.flush().map_err(cache_err)?;
        drop(writer);
        file.unlock().map_err(cache_err)?;
        Ok(records.len().max(disk_len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use std::sync::Arc;

    fn pt(v: &[i64]) -> ProjectivePoint {
        ProjectivePoint::from_i64s(v).unwrap()
    }

    #[test]
    fn loaded_points_respect_the_ceiling() {
        let f = Morphism::power_map(2, 2).unwrap();
        let wide = OrbitCache::new(f.clone(), pt(&[10, 1])).unwrap();
        wide.orbit_point(6).unwrap();
        let mut buf = Vec::new();
        wide.write_jsonl(&mut buf).unwrap();
        let narrow = OrbitCache::new(f, pt(&[10, 1])).unwrap().with_digit_ceiling(40);
        assert_eq!(narrow.load_jsonl(&buf[..]).unwrap(), 6);
        assert!(matches!(narrow.orbit_point(6), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn orbit_examples() {
        let power = OrbitCache::new(Morphism::power_map(2, 2).unwrap(), pt(&[2, 1])).unwrap();
        assert_eq!(power.orbit_point(3).unwrap(), pt(&[256, 1]));
        assert_eq!(power.orbit_point(0).unwrap(), pt(&[2, 1]));
        let shift = OrbitCache::new(Morphism::parse(&["X^2+Y^2", "Y^2"]).unwrap(), pt(&[1, 1])).unwrap();
        assert_eq!(shift.orbit_point(3).unwrap(), pt(&[26, 1]));
        assert_eq!(shift.len(), 4);
    }

    #[test]
    fn orbit_matches_step_by_step_application() {
        let f = Morphism::parse(&["X^2 - Y*Z", "Y^2 + X*Z", "Z^2"]).unwrap();
        let cache = OrbitCache::new(f.clone(), pt(&[1, 2, 3])).unwrap();
        for n in 0..5 {
            let next = cache.orbit_point(n + 1).unwrap();
            assert_eq!(next, f.apply(&cache.orbit_point(n).unwrap()).unwrap());
        }
    }

    #[test]
    fn power_map_closed_form() {
        for (a, d) in [(2u32, 2u32), (3, 3), (5, 2), (2, 5)] {
            let cache = OrbitCache::new(Morphism::power_map(2, d).unwrap(), pt(&[a as i64, 1])).unwrap();
            for n in 0..6u32 {
                let want = BigInt::from(a).pow(d.pow(n));
                assert_eq!(cache.orbit_point(n as u64).unwrap().coords(), &[want, BigInt::one()]);
            }
        }
    }

    #[test]
    fn digit_ceiling_stops_runaway_growth() {
        let cache = OrbitCache::new(Morphism::power_map(2, 2).unwrap(), pt(&[10, 1]))
            .unwrap()
            .with_digit_ceiling(100);
        // 10^(2^6) has 65 digits, 10^(2^7) has 129.
        assert!(cache.orbit_point(6).is_ok());
        assert!(matches!(cache.orbit_point(7), Err(Error::ResourceLimit(_))));
        assert!(!exceeds_digits(&(BigUint::from(10u32).pow(100) - 1u32), 100));
        assert!(exceeds_digits(&BigUint::from(10u32).pow(100), 100));
    }

    #[test]
    fn concurrent_reads_agree() {
        let f = Morphism::parse(&["X^2+Y^2", "Y^2"]).unwrap();
        let cache = Arc::new(OrbitCache::new(f, pt(&[1, 1])).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|k| {
                let c = Arc::clone(&cache);
                std::thread::spawn(move || c.orbit_point(6 + k % 2).unwrap())
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(cache.len(), 8);
    }

    #[test]
    fn jsonl_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("orbit.jsonl");
        let f = Morphism::parse(&["X^2+Y^2", "Y^2"]).unwrap();
        let cold = OrbitCache::new(f.clone(), pt(&[1, 1])).unwrap();
        cold.orbit_point(5).unwrap();
        assert_eq!(cold.sync_file(&path).unwrap(), 6);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), r#"{"n":0,"coords":["1","1"]}"#);

        let warm = OrbitCache::new(f.clone(), pt(&[1, 1])).unwrap();
        assert_eq!(warm.sync_file(&path).unwrap(), 6);
        assert_eq!(warm.len(), 6);
        assert_eq!(warm.points(), cold.points());
        warm.orbit_point(7).unwrap();
        assert_eq!(warm.sync_file(&path).unwrap(), 8);
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 8);

        let other_start = OrbitCache::new(f, pt(&[2, 1])).unwrap();
        assert!(matches!(other_start.sync_file(&path), Err(Error::Cache(_))));
    }

    #[test]
    fn invalid_cache_files_are_rejected() {
        let f = Morphism::power_map(2, 2).unwrap();
        let cache = OrbitCache::new(f, pt(&[2, 1])).unwrap();
        let gap = "{\"n\":0,\"coords\":[\"2\",\"1\"]}\n{\"n\":2,\"coords\":[\"16\",\"1\"]}\n";
        assert!(cache.load_jsonl(gap.as_bytes()).is_err());
        let unnormalized = "{\"n\":0,\"coords\":[\"4\",\"2\"]}\n";
        assert!(cache.load_jsonl(unnormalized.as_bytes()).is_err());
        let good = "{\"n\":0,\"coords\":[\"2\",\"1\"]}\n{\"n\":1,\"coords\":[\"4\",\"1\"]}\n";
        assert_eq!(cache.load_jsonl(good.as_bytes()).unwrap(), 2);
    }
}
