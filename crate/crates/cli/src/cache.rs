//! Persisted irreducible-polynomial tables.
//!
//! Plain-text format for auditability, gzip-compressed when the file name
//! ends in `.gz`:
//!
//! ```text
//! fqsieve-irreducibles v1 q=2 e=1 max-deg=12
//! degree 1 count 2
//! 0,1
//! 1,1
//! degree 2 count 1
//! 1,1,1
//! ...
//! ```
//!
//! Entries are the canonical comma-separated coefficient texts, sorted
//! within each block. Verification recomputes every per-degree count
//! against the counting formula and spot-factors random entries.

use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use fqsieve::factor;
use fqsieve::poly;
use fqsieve::Fq;

const MAGIC: &str = "fqsieve-irreducibles";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    /// Structural damage: counts off, entries unparsable, ordering broken,
    /// or a spot-factored entry that is not irreducible.
    #[error("corrupt cache: {0}")]
    Corrupt(String),
    /// The header describes a different format version or field than the
    /// run expects.
    #[error("cache header mismatch: {0}")]
    Version(String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibleCache {
    pub q: u32,
    pub e: u32,
    pub max_deg: u32,
    /// `blocks[d-1]` lists the monic irreducibles of degree d, sorted.
    pub blocks: Vec<Vec<String>>,
}

impl IrreducibleCache {
    /// Enumerate all monic irreducibles up to `max_deg` and render them in
    /// canonical text, sorted by the degree-box enumeration order.
    pub fn build(fq: &Fq, max_deg: u32) -> IrreducibleCache {
        let blocks = factor::sieved_irreducibles(fq, max_deg)
            .iter()
            .map(|primes| primes.iter().map(|p| poly::to_text(fq, p)).collect())
            .collect();
        IrreducibleCache { q: fq.p(), e: fq.e(), max_deg, blocks }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{MAGIC} v{VERSION} q={} e={} max-deg={}\n",
            self.q, self.e, self.max_deg
        );
        for (i, block) in self.blocks.iter().enumerate() {
            out.push_str(&format!("degree {} count {}\n", i + 1, block.len()));
            for entry in block {
                out.push_str(entry);
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<IrreducibleCache, CacheError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CacheError::Corrupt("empty file".to_string()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(CacheError::Version(format!(
                "not an irreducible cache (header `{header}`)"
            )));
        }
        let version = parts
            .next()
            .and_then(|v| v.strip_prefix('v'))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| CacheError::Version("unreadable version field".to_string()))?;
        if version != VERSION {
            return Err(CacheError::Version(format!(
                "format v{version}, this build reads v{VERSION}"
            )));
        }
        let mut q = None;
        let mut e = None;
        let mut max_deg = None;
        for field in parts {
            match field.split_once('=') {
                Some(("q", v)) => q = v.parse().ok(),
                Some(("e", v)) => e = v.parse().ok(),
                Some(("max-deg", v)) => max_deg = v.parse().ok(),
                _ => return Err(CacheError::Version(format!("unknown header field `{field}`"))),
            }
        }
        let (Some(q), Some(e), Some(max_deg)) = (q, e, max_deg) else {
            return Err(CacheError::Version("incomplete header".to_string()));
        };
        let mut blocks: Vec<Vec<String>> = Vec::with_capacity(max_deg as usize);
        let mut current: Option<(u32, usize)> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("degree ") {
                Self::close_block(&blocks, current)?;
                let (d, count) = rest
                    .split_once(" count ")
                    .and_then(|(d, c)| Some((d.parse::<u32>().ok()?, c.parse::<usize>().ok()?)))
                    .ok_or_else(|| {
                        CacheError::Corrupt(format!("bad block header `{line}`"))
                    })?;
                if d as usize != blocks.len() + 1 {
                    return Err(CacheError::Corrupt(format!(
                        "block for degree {d} out of order"
                    )));
                }
                blocks.push(Vec::with_capacity(count));
                current = Some((d, count));
            } else {
                if current.is_none() {
                    return Err(CacheError::Corrupt(format!(
                        "entry `{line}` before any block header"
                    )));
                }
                blocks.last_mut().expect("open block").push(line.to_string());
            }
        }
        Self::close_block(&blocks, current)?;
        if blocks.len() != max_deg as usize {
            return Err(CacheError::Corrupt(format!(
                "header promises {max_deg} blocks, file has {}",
                blocks.len()
            )));
        }
        Ok(IrreducibleCache { q, e, max_deg, blocks })
    }

    fn close_block(blocks: &[Vec<String>], open: Option<(u32, usize)>) -> Result<(), CacheError> {
        if let Some((d, count)) = open {
            let have = blocks.last().map_or(0, Vec::len);
            if have != count {
                return Err(CacheError::Corrupt(format!(
                    "degree {d}: header promises {count} entries, block has {have}"
                )));
            }
        }
        Ok(())
    }

    /// Header must describe the requested field and tabulation depth.
    pub fn expect(&self, fq: &Fq, max_deg: u32) -> Result<(), CacheError> {
        if self.q != fq.p() || self.e != fq.e() {
            return Err(CacheError::Version(format!(
                "cache is for q={} e={}, run wants q={} e={}",
                self.q,
                self.e,
                fq.p(),
                fq.e()
            )));
        }
        if self.max_deg != max_deg {
            return Err(CacheError::Version(format!(
                "cache tabulates through degree {}, run wants {max_deg}",
                self.max_deg
            )));
        }
        Ok(())
    }

    /// Exact per-degree counts against the counting formula, sortedness,
    /// and `spot_checks` seeded random entries re-parsed and re-factored.
    pub fn verify(&self, fq: &Fq, spot_checks: u64, seed: u64) -> Result<VerifyReport, CacheError> {
        for (i, block) in self.blocks.iter().enumerate() {
            let d = i as u32 + 1;
            let expected = factor::count_irreducible(fq, d);
            if block.len() as u64 != expected {
                return Err(CacheError::Corrupt(format!(
                    "degree {d}: {} entries, counting formula gives {expected}",
                    block.len()
                )));
            }
        }
        let parse_at = |d: u32, entry: &str| {
            let p = poly::parse(fq, entry).map_err(|e| {
                CacheError::Corrupt(format!("degree {d}: entry `{entry}`: {e}"))
            })?;
            if p.deg() != d as usize || !p.is_monic() {
                return Err(CacheError::Corrupt(format!(
                    "degree {d}: entry `{entry}` is not monic of that degree"
                )));
            }
            Ok(p)
        };
        // Ordering within each block follows the box enumeration index.
        for (i, block) in self.blocks.iter().enumerate() {
            let d = i as u32 + 1;
            let mut prev = None;
            for entry in block {
                let idx = poly::box_index(fq, &parse_at(d, entry)?);
                if prev.is_some_and(|p| p >= idx) {
                    return Err(CacheError::Corrupt(format!(
                        "degree {d}: entries out of order at `{entry}`"
                    )));
                }
                prev = Some(idx);
            }
        }
        let total: u64 = self.blocks.iter().map(|b| b.len() as u64).sum();
        let spot = |mut pick: u64| -> Result<(), CacheError> {
            let (d, entry) = self
                .blocks
                .iter()
                .enumerate()
                .find_map(|(i, block)| {
                    if (pick as usize) < block.len() {
                        Some((i as u32 + 1, block[pick as usize].as_str()))
                    } else {
                        pick -= block.len() as u64;
                        None
                    }
                })
                .expect("pick is within the total");
            let p = parse_at(d, entry)?;
            if !factor::is_irreducible(fq, &p) {
                return Err(CacheError::Corrupt(format!(
                    "degree {d}: spot check failed, `{entry}` factors"
                )));
            }
            Ok(())
        };
        // When the sampling budget covers the whole table, sampling with
        // replacement would run at least as many factorizations as a full
        // scan yet could still miss an entry; scan instead.
        if total <= spot_checks {
            for flat in 0..total {
                spot(flat)?;
            }
            return Ok(VerifyReport { factor_tests: total, exhaustive: true });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..spot_checks {
            spot(rng.gen_range(0..total))?;
        }
        Ok(VerifyReport { factor_tests: spot_checks, exhaustive: false })
    }
}

/// How the irreducibility checks covered the table.
#[derive(Debug, Clone, Copy)]
pub struct VerifyReport {
    pub factor_tests: u64,
    pub exhaustive: bool,
}

impl VerifyReport {
    #[must_use]
    pub fn summary(&self) -> String {
        if self.exhaustive {
            format!("all {} entries factor-tested", self.factor_tests)
        } else {
            format!("{} random spot checks", self.factor_tests)
        }
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|ext| ext == "gz")
}

pub fn save(path: &Path, cache: &IrreducibleCache) -> Result<(), CacheError> {
    let text = cache.render();
    if is_gz(path) {
        let file = std::fs::File::create(path)?;
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(text.as_bytes())?;
        enc.finish()?;
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<IrreducibleCache, CacheError> {
    let text = if is_gz(path) {
        let file = std::fs::File::open(path)?;
        let mut out = String::new();
        GzDecoder::new(file).read_to_string(&mut out).map_err(|e| {
            CacheError::Corrupt(format!("gzip stream: {e}"))
        })?;
        out
    } else {
        std::fs::read_to_string(path)?
    };
    IrreducibleCache::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::new(2, 1).unwrap()
    }

    #[test]
    fn render_parse_round_trip_then_verify() {
        let cache = IrreducibleCache::build(&f2(), 5);
        let back = IrreducibleCache::parse(&cache.render()).unwrap();
        assert_eq!((back.q, back.e, back.max_deg), (2, 1, 5));
        assert_eq!(back.blocks, cache.blocks);
        back.expect(&f2(), 5).unwrap();
        // Fourteen entries fit inside the hundred-test budget, so every one
        // is factor-tested.
        let report = back.verify(&f2(), 100, 0).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.factor_tests, 2 + 1 + 2 + 3 + 6);
    }

    #[test]
    fn parse_rejects_header_problems() {
        let good = IrreducibleCache::build(&f2(), 2).render();
        let future = good.replacen("v1", "v9", 1);
        assert!(matches!(IrreducibleCache::parse(&future), Err(CacheError::Version(_))));
        let odd_field = good.replacen("max-deg=2", "depth=2", 1);
        assert!(matches!(IrreducibleCache::parse(&odd_field), Err(CacheError::Version(_))));
        assert!(IrreducibleCache::parse("other-tool v1 q=2 e=1 max-deg=1\n").is_err());
    }

    #[test]
    fn parse_rejects_count_lies() {
        let text = IrreducibleCache::build(&f2(), 3).render();
        let lied = text.replacen("degree 2 count 1", "degree 2 count 2", 1);
        assert!(matches!(IrreducibleCache::parse(&lied), Err(CacheError::Corrupt(_))));
    }

    #[test]
    fn verify_flags_membership_order_and_count_damage() {
        // A reducible entry in a block whose count still matches.
        let mut cache = IrreducibleCache::build(&f2(), 3);
        cache.blocks[1][0] = "1,0,1".to_string();
        assert!(matches!(cache.verify(&f2(), 100, 0), Err(CacheError::Corrupt(_))));

        // Entries out of enumeration order.
        let mut cache = IrreducibleCache::build(&f2(), 3);
        cache.blocks[2].swap(0, 1);
        assert!(matches!(cache.verify(&f2(), 100, 0), Err(CacheError::Corrupt(_))));

        // A dropped entry breaks the counting formula.
        let mut cache = IrreducibleCache::build(&f2(), 3);
        cache.blocks[0].pop();
        assert!(matches!(cache.verify(&f2(), 100, 0), Err(CacheError::Corrupt(_))));
    }

    #[test]
    fn expect_flags_field_and_depth_mismatches() {
        let cache = IrreducibleCache::build(&f2(), 3);
        let f3 = Fq::new(3, 1).unwrap();
        assert!(matches!(cache.expect(&f3, 3), Err(CacheError::Version(_))));
        assert!(matches!(cache.expect(&f2(), 4), Err(CacheError::Version(_))));
    }

    #[test]
    fn sampling_applies_beyond_the_test_budget() {
        let cache = IrreducibleCache::build(&f2(), 3);
        let report = cache.verify(&f2(), 3, 42).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.factor_tests, 3);
    }
}
