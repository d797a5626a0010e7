//! Elements of a direct power `G^k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A k-tuple of element ids of some base group.
///
/// The packed code is the mixed-radix integer with entry 0 most significant,
/// so lexicographic order on tuples is numeric order on codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<usize>);

impl Tuple {
    pub fn new(entries: Vec<usize>) -> Self {
        Tuple(entries)
    }

    pub fn constant(value: usize, arity: usize) -> Self {
        Tuple(vec![value; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<usize> {
        self.0
    }

    /// Packs with radix `base`. Entries must be `< base`.
    pub fn pack(&self, base: usize) -> usize {
        self.0.iter().fold(0, |acc, &e| {
            debug_assert!(e < base);
            acc * base + e
        })
    }

    pub fn unpack(mut code: usize, base: usize, arity: usize) -> Self {
        let mut entries = vec![0; arity];
        for slot in entries.iter_mut().rev() {
            *slot = code % base;
            code /= base;
        }
        Tuple(entries)
    }

    /// True iff the entries are pairwise distinct.
    pub fn is_injective(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Drops the last entry.
    pub fn project(&self) -> Result<Tuple> {
        if self.arity() < 2 {
            return Err(Error::Precondition(format!(
                "projection needs arity >= 2, got {}",
                self.arity()
            )));
        }
        Ok(Tuple(self.0[..self.0.len() - 1].to_vec()))
    }
}

impl From<Vec<usize>> for Tuple {
    fn from(v: Vec<usize>) -> Self {
        Tuple(v)
    }
}

impl<const N: usize> From<[usize; N]> for Tuple {
    fn from(v: [usize; N]) -> Self {
        Tuple(v.to_vec())
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Tuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidTuple(format!("expected parentheses in {s:?}")))?;
        if inner.trim().is_empty() {
            return Err(Error::InvalidTuple("empty tuple".into()));
        }
        inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidTuple(format!("bad entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Tuple)
    }
}

/// Serializes a set of tuples one per line in lexicographic order.
pub fn format_set<'a>(tuples: impl IntoIterator<Item = &'a Tuple>) -> String {
    let mut sorted: Vec<&Tuple> = tuples.into_iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut out = String::new();
    for t in sorted {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let t = Tuple::from([0, 1, 2]);
        assert_eq!(t.to_string(), "(0,1,2)");
        assert_eq!(" ( 0, 1,2 )".parse::<Tuple>().unwrap(), t);
        assert!("0,1".parse::<Tuple>().is_err());
        assert!("()".parse::<Tuple>().is_err());
    }

    #[test]
    fn projection_drops_last() {
        assert_eq!(Tuple::from([0, 1, 2]).project().unwrap(), Tuple::from([0, 1]));
        assert!(Tuple::from([3]).project().is_err());
    }

    #[test]
    fn packing_is_most_significant_first() {
        assert_eq!(Tuple::from([1, 0, 2]).pack(3), 9 + 2);
        assert_eq!(Tuple::unpack(11, 3, 3), Tuple::from([1, 0, 2]));
    }

    proptest! {
        #[test]
        fn pack_unpack_roundtrip(base in 1usize..9, arity in 1usize..7, seed in any::<u64>()) {
            let total = base.pow(arity as u32);
            let code = (seed as usize) % total;
            let t = Tuple::unpack(code, base, arity);
            prop_assert_eq!(t.arity(), arity);
            prop_assert_eq!(t.pack(base), code);
        }

        #[test]
        fn lexicographic_order_matches_codes(base in 2usize..6, a in any::<u32>(), b in any::<u32>()) {
            let total = base.pow(4);
            let (a, b) = (a as usize % total, b as usize % total);
            let (ta, tb) = (Tuple::unpack(a, base, 4), Tuple::unpack(b, base, 4));
            prop_assert_eq!(ta.cmp(&tb), a.cmp(&b));
        }
    }
}
