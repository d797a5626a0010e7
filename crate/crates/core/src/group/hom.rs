//! Verified homomorphisms between groups and their entrywise action on tuples.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Group;
use crate::error::{Error, Result};
use crate::tuple::Tuple;

/// Pair checks are exhaustive up to this many pairs, sampled beyond.
const EXHAUSTIVE_PAIRS: usize = 1_000_000;
const SAMPLED_PAIRS: usize = 100_000;

/// A map on element ids that has passed the homomorphism check.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    map: Vec<usize>,
    target_order: usize,
}

impl Homomorphism {
    pub fn new(from: &Group, to: &Group, map: Vec<usize>, seed: u64) -> Result<Self> {
        if map.len() != from.order() {
            return Err(Error::Precondition(format!(
                "map has {} entries, domain has {} elements",
                map.len(),
                from.order()
            )));
        }
        if map.iter().any(|&y| y >= to.order()) {
            return Err(Error::Precondition("map leaves the codomain".into()));
        }
        let n = from.order();
        let check = |a: usize, b: usize| {
            if map[from.mul(a, b)] == to.mul(map[a], map[b]) {
                Ok(())
            } else {
                Err(Error::NotHomomorphism { a, b })
            }
        };
        if n * n <= EXHAUSTIVE_PAIRS {
            for a in 0..n {
                for b in 0..n {
                    check(a, b)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..SAMPLED_PAIRS {
                check(rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(Self {
            map,
            target_order: to.order(),
        })
    }

    /// Extends an assignment on generators along words and verifies the
    /// result. Fails if the generators do not generate `from` or the
    /// assignment is inconsistent.
    pub fn from_generators(from: &Group, to: &Group, images: &[(usize, usize)]) -> Result<Self> {
        let mut map = vec![usize::MAX; from.order()];
        map[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &(g, h) in images {
                let (y, fy) = (from.mul(x, g), to.mul(map[x], h));
                if map[y] == usize::MAX {
                    map[y] = fy;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return Err(Error::NotHomomorphism { a: x, b: g });
                }
            }
        }
        if map.contains(&usize::MAX) {
            return Err(Error::Precondition("images are not given on a generating set".into()));
        }
        Self::new(from, to, map, 0)
    }

    pub fn identity(g: &Group) -> Self {
        Self {
            map: (0..g.order()).collect(),
            target_order: g.order(),
        }
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn apply_tuple(&self, t: &Tuple) -> Tuple {
        Tuple::new(t.entries().iter().map(|&g| self.map[g]).collect())
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target_order];
        self.map.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.map.len() == self.target_order && self.is_injective()
    }
}

/// Applies an isomorphism entrywise to a set of tuples.
pub fn hom_power_transport(f: &Homomorphism, tuples: &[Tuple]) -> Result<Vec<Tuple>> {
    if !f.is_bijective() {
        return Err(Error::NotBijective("an isomorphism"));
    }
    Ok(tuples.iter().map(|t| f.apply_tuple(t)).collect())
}

/// Applies a monomorphism entrywise to a set of tuples.
pub fn mono_power_transport(f: &Homomorphism, tuples: &[Tuple]) -> Result<Vec<Tuple>> {
    if !f.is_injective() {
        return Err(Error::NotBijective("injective"));
    }
    Ok(tuples.iter().map(|t| f.apply_tuple(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_homomorphisms() {
        let z4 = Group::cyclic(4);
        // x -> x + 1 is not a homomorphism
        let shift: Vec<usize> = (0..4).map(|x| (x + 1) % 4).collect();
        assert!(matches!(
            Homomorphism::new(&z4, &z4, shift, 0),
            Err(Error::NotHomomorphism { .. })
        ));
        let neg: Vec<usize> = (0..4).map(|x| (4 - x) % 4).collect();
        assert!(Homomorphism::new(&z4, &z4, neg, 0).unwrap().is_bijective());
    }

    #[test]
    fn d3_to_s3_from_generators() {
        let (d3, s3) = (Group::dihedral(3), Group::symmetric(3));
        // r -> [1,2,0] (rank 3), a -> [0,2,1] (rank 1)
        let f = Homomorphism::from_generators(&d3, &s3, &[(1, 3), (3, 1)]).unwrap();
        assert!(f.is_bijective());
        // a -> 3-cycle violates a^2 = 1
        assert!(Homomorphism::from_generators(&d3, &s3, &[(1, 3), (3, 3)]).is_err());
    }

    #[test]
    fn embeddings_are_injective_not_bijective() {
        let f = Homomorphism::new(&Group::cyclic(2), &Group::cyclic(4), vec![0, 2], 0).unwrap();
        assert!(f.is_injective() && !f.is_bijective());
        assert!(hom_power_transport(&f, &[]).is_err());
        assert!(mono_power_transport(&f, &[Tuple::from([1, 0])]).unwrap() == vec![Tuple::from([2, 0])]);
    }
}
