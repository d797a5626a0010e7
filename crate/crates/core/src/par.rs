//! Data-parallel inner loops shared by closure, BFS and exhaustive checks.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they fall back to plain sequential loops with identical results.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Frontier chunk handed to a single worker.
#[cfg(feature = "parallel")]
const CHUNK: usize = 512;

/// Fixed-size bitset supporting concurrent test-and-set.
pub struct AtomicBitSet {
    words: Vec<AtomicU64>,
}

impl AtomicBitSet {
    pub fn new(len: usize) -> Self {
        let words = (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        Self { words }
    }

    /// Sets bit `i`; returns true if it was previously clear.
    #[inline]
    pub fn insert(&self, i: usize) -> bool {
        let mask = 1u64 << (i % 64);
        self.words[i / 64].fetch_or(mask, Ordering::Relaxed) & mask == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64].load(Ordering::Relaxed) & (1u64 << (i % 64)) != 0
    }

    /// Ascending list of set bits.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, word) in self.words.iter().enumerate() {
            let mut bits = word.load(Ordering::Relaxed);
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push(w * 64 + t);
                bits &= bits - 1;
            }
        }
        out
    }
}

/// One breadth-first level: every `step(x, s)` for `x` in the frontier and
/// `s` in `gens` that was not yet in `seen` is marked and returned.
///
/// The returned set is independent of scheduling; only its order may vary,
/// so callers that need determinism sort it.
pub fn expand_level<F>(frontier: &[usize], gens: &[usize], seen: &AtomicBitSet, step: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> usize + Sync,
{
    #[cfg(feature = "parallel")]
    {
        frontier
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut found = Vec::new();
                for &x in chunk {
                    for &s in gens {
                        let y = step(x, s);
                        if seen.insert(y) {
                            found.push(y);
                        }
                    }
                }
                found
            })
            .reduce(Vec::new, |mut a, mut b| {
                a.append(&mut b);
                a
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut found = Vec::new();
        for &x in frontier {
            for &s in gens {
                let y = step(x, s);
                if seen.insert(y) {
                    found.push(y);
                }
            }
        }
        found
    }
}

/// True if `pred` holds for some index in `range`.
pub fn any_index<F>(range: Range<usize>, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().any(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.into_iter().any(pred)
    }
}

/// Smallest index in `range` satisfying `pred`.
pub fn first_index<F>(range: Range<usize>, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().find_first(|&i| pred(i))
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.into_iter().find(|&i| pred(i))
    }
}

/// Order-preserving map over a slice.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
