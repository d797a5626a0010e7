//! Multiplication-table files: first line `n`, then `n` rows of `n`
//! whitespace-separated ids, row = left factor.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Orders up to this size get a full associativity check; larger tables are
/// sampled.
const FULL_ASSOCIATIVITY_LIMIT: usize = 128;
const ASSOCIATIVITY_SAMPLES: usize = 1_000_000;

pub(crate) struct Table {
    pub n: usize,
    pub mul: Vec<u32>,
    pub inv: Vec<u32>,
}

impl Table {
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }
}

pub(crate) fn read_table(path: &Path, cap: u64) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::TableIo {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, cap)
}

pub(crate) fn parse_table(text: &str, cap: u64) -> Result<Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::TableFormat("empty file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::TableFormat("first line must be the order n".into()))?;
    if n == 0 {
        return Err(Error::TableFormat("order must be positive".into()));
    }
    if n as u64 > cap {
        return Err(Error::OrderCap {
            order: n.to_string(),
            cap,
        });
    }
    let mut mul = Vec::with_capacity(n * n);
    for row in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::TableFormat(format!("missing row {row}")))?;
        let before = mul.len();
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::TableFormat(format!("row {row}: bad entry {tok:?}")))?;
            if v >= n {
                return Err(Error::TableFormat(format!("row {row}: entry {v} >= {n}")));
            }
            mul.push(v as u32);
        }
        if mul.len() - before != n {
            return Err(Error::TableFormat(format!(
                "row {row} has {} entries, expected {n}",
                mul.len() - before
            )));
        }
    }
    if lines.next().is_some() {
        return Err(Error::TableFormat(format!("more than {n} rows")));
    }
    from_products(n, mul)
}

/// Validates the group axioms with 0 as identity and derives inverses.
pub(crate) fn from_products(n: usize, mul: Vec<u32>) -> Result<Table> {
    let at = |a: usize, b: usize| mul[a * n + b] as usize;
    for x in 0..n {
        if at(0, x) != x || at(x, 0) != x {
            return Err(Error::NotAGroup(format!(
                "element 0 must be the identity (fails at {x})"
            )));
        }
    }
    let mut inv = vec![u32::MAX; n];
    for (a, slot) in inv.iter_mut().enumerate() {
        for b in 0..n {
            if at(a, b) == 0 {
                if *slot != u32::MAX {
                    return Err(Error::NotAGroup(format!("{a} has two right inverses")));
                }
                *slot = b as u32;
            }
        }
        if *slot == u32::MAX {
            return Err(Error::NotAGroup(format!("{a} has no inverse")));
        }
    }
    let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
    if n <= FULL_ASSOCIATIVITY_LIMIT {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !assoc(a, b, c) {
                        return Err(Error::NotAGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..ASSOCIATIVITY_SAMPLES {
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if !assoc(a, b, c) {
                return Err(Error::NotAGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
            }
        }
    }
    // Identity plus two-sided inverses plus associativity makes rows and
    // columns permutations, so no separate Latin-square check is needed.
    Ok(Table { n, mul, inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KLEIN: &str = "4\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n";

    #[test]
    fn klein_four_parses() {
        let t = parse_table(KLEIN, 100).unwrap();
        assert_eq!(t.n, 4);
        assert_eq!(t.mul(2, 3), 1);
        assert_eq!(t.inv, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(matches!(parse_table("", 10), Err(Error::TableFormat(_))));
        assert!(matches!(parse_table("2\n0 1\n", 10), Err(Error::TableFormat(_))));
        assert!(matches!(parse_table("2\n0 1\n1 2\n", 10), Err(Error::TableFormat(_))));
        assert!(matches!(parse_table("2\n0 1 1\n1 0\n", 10), Err(Error::TableFormat(_))));
        assert!(matches!(parse_table(KLEIN, 3), Err(Error::OrderCap { .. })));
    }

    #[test]
    fn rejects_non_groups() {
        // identity not at 0
        assert!(matches!(parse_table("2\n1 0\n0 1\n", 10), Err(Error::NotAGroup(_))));
        // no inverse for 1
        assert!(matches!(parse_table("2\n0 1\n1 1\n", 10), Err(Error::NotAGroup(_))));
        // a loop of order 5 that is not associative
        let loop5 = "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
        assert!(matches!(parse_table(loop5, 10), Err(Error::NotAGroup(_))));
    }
}
