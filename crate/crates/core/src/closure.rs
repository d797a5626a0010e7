//! Subgroups generated by sets of elements, computed by breadth-first
//! closure, plus the constructive factorizations and the abelian norm
//! obstruction used to certify (non-)generation.

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{config_contains, norm, ConfigSet, ENUM_BUDGET};
use crate::error::{Error, Result};
use crate::group::{direct_power, Group, DEFAULT_MAX_ORDER};
use crate::par::{self, AtomicBitSet};
use crate::tuple::Tuple;

/// The element set of a subgroup of `ambient`, sorted ascending.
#[derive(Debug, Clone)]
pub struct SubgroupCarrier {
    ambient: Group,
    members: Vec<usize>,
    generators: Vec<usize>,
}

impl SubgroupCarrier {
    pub fn ambient(&self) -> &Group {
        &self.ambient
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, code: usize) -> bool {
        self.members.binary_search(&code).is_ok()
    }

    /// `[ambient : self]`.
    pub fn index(&self) -> usize {
        debug_assert_eq!(self.ambient.order() % self.size(), 0);
        self.ambient.order() / self.size()
    }

    pub fn is_whole(&self) -> bool {
        self.size() == self.ambient.order()
    }

    /// One packed code per line, ascending.
    pub fn write_codes<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        for m in &self.members {
            writeln!(sink, "{m}")?;
        }
        Ok(())
    }

    /// Identity, closure under products and inverses, and Lagrange.
    /// Exhaustive up to 1000 members, otherwise 10^4 seeded random pairs.
    pub fn verify(&self, seed: u64) -> bool {
        let g = &self.ambient;
        if !self.contains(g.identity()) || !g.order().is_multiple_of(self.size()) {
            return false;
        }
        if !self.members.iter().all(|&x| self.contains(g.inv(x))) {
            return false;
        }
        let m = &self.members;
        if m.len() <= 1000 {
            m.iter().all(|&a| m.iter().all(|&b| self.contains(g.mul(a, b))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10_000).all(|_| {
                let (a, b) = (m[rng.random_range(0..m.len())], m[rng.random_range(0..m.len())]);
                self.contains(g.mul(a, b))
            })
        }
    }
}

/// `X ∪ X^-1` without the identity, sorted.
pub fn symmetrize(ambient: &Group, gens: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = gens
        .iter()
        .flat_map(|&g| [g, ambient.inv(g)])
        .filter(|&g| g != 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn closure(ambient: &Group, gens: &[usize]) -> Result<SubgroupCarrier> {
    closure_with_cap(ambient, gens, DEFAULT_MAX_ORDER)
}

/// Smallest subgroup containing `gens`: start from the identity and multiply
/// each new element on the right by `X ∪ X^-1` until nothing new appears.
///
/// Ambient groups within `cap` use a dense bitset and the level-parallel
/// frontier expansion; larger ones fall back to a hashed sequential search
/// that fails once the subgroup itself exceeds `cap`.
pub fn closure_with_cap(ambient: &Group, gens: &[usize], cap: u64) -> Result<SubgroupCarrier> {
    if let Some(&bad) = gens.iter().find(|&&g| g >= ambient.order()) {
        return Err(Error::InvalidTuple(format!(
            "{bad} is not an element of {}",
            ambient.name()
        )));
    }
    let steps = symmetrize(ambient, gens);
    let members = if ambient.order() as u64 <= cap {
        let seen = AtomicBitSet::new(ambient.order());
        seen.insert(0);
        let mut frontier = vec![0];
        while !frontier.is_empty() {
            frontier = par::expand_level(&frontier, &steps, &seen, |x, s| ambient.mul(x, s));
        }
        seen.ones()
    } else {
        let mut seen = HashSet::from([0usize]);
        let mut frontier = vec![0];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for &s in &steps {
                    let y = ambient.mul(x, s);
                    if seen.insert(y) {
                        if seen.len() as u64 > cap {
                            return Err(Error::ClosureCap {
                                cap,
                                reached: seen.len(),
                            });
                        }
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut m: Vec<usize> = seen.into_iter().collect();
        m.sort_unstable();
        m
    };
    let mut generators = gens.to_vec();
    generators.sort_unstable();
    generators.dedup();
    Ok(SubgroupCarrier {
        ambient: ambient.clone(),
        members,
        generators,
    })
}

pub fn closure_of_tuples(ambient: &Group, set: &[Tuple]) -> Result<SubgroupCarrier> {
    let codes = set.iter().map(|t| ambient.code(t)).collect::<Result<Vec<_>>>()?;
    closure(ambient, &codes)
}

pub fn is_generating(ambient: &Group, gens: &[usize]) -> Result<bool> {
    Ok(closure(ambient, gens)?.is_whole())
}

pub fn index(sub: &SubgroupCarrier) -> usize {
    sub.index()
}

/// Packed codes of `F(G,k)` inside `G^k`.
pub fn config_codes(power: &Group) -> Result<Vec<usize>> {
    let (base, k) = power
        .power_of()
        .ok_or_else(|| Error::Precondition(format!("{} is not a direct power", power.name())))?;
    let n = base.order();
    Ok(ConfigSet::new(base, k)?
        .materialize(ENUM_BUDGET)?
        .iter()
        .map(|t| t.pack(n))
        .collect())
}

/// `⟨F(G,k)⟩` inside `G^k`.
pub fn config_closure(base: &Group, k: usize, max_order: u64) -> Result<SubgroupCarrier> {
    let power = direct_power(base, k, max_order)?;
    let codes = config_codes(&power)?;
    closure_with_cap(&power, &codes, max_order)
}

/// `(g,g) = (1,g)·(g,1)` with both factors in `F(G,2)`.
pub fn factor_diagonal_k2(group: &Group, g: usize) -> Result<(Tuple, Tuple)> {
    if g == group.identity() || g >= group.order() {
        return Err(Error::Precondition(format!("{g} must be a non-identity element")));
    }
    Ok((Tuple::from([0, g]), Tuple::from([g, 0])))
}

/// Writes the coordinate generator with `g` at `position` as a product of
/// two members of `F(G,k)`: `(h.., g, h..)·(h^-1.., 1, h^-1..)`, with the
/// `h_i` the smallest ids outside `{1, g}`.
pub fn factor_standard_generator(group: &Group, k: usize, position: usize, g: usize) -> Result<(Tuple, Tuple)> {
    if k < 3 || group.order() < k + 1 {
        return Err(Error::Precondition(format!(
            "needs k >= 3 and |G| >= k + 1 (k = {k}, |G| = {})",
            group.order()
        )));
    }
    if position >= k || g == group.identity() || g >= group.order() {
        return Err(Error::Precondition(format!("bad position {position} or element {g}")));
    }
    let mut hs = (1..group.order()).filter(|&h| h != g);
    let mut left = vec![0; k];
    let mut right = vec![0; k];
    for i in 0..k {
        if i == position {
            left[i] = g;
        } else {
            let h = hs.next().ok_or_else(|| Error::Invariant("ran out of h_i".into()))?;
            left[i] = h;
            right[i] = group.inv(h);
        }
    }
    let (left, right) = (Tuple::new(left), Tuple::new(right));
    let product: Vec<usize> = left
        .entries()
        .iter()
        .zip(right.entries())
        .map(|(&a, &b)| group.mul(a, b))
        .collect();
    let mut target = vec![0; k];
    target[position] = g;
    if !config_contains(group, &left) || !config_contains(group, &right) || product != target {
        return Err(Error::Invariant(format!("factorization {left}·{right} is invalid")));
    }
    Ok((left, right))
}

/// Certificate that `F(G,|G|)` does not generate `G^|G|` for abelian `G`.
#[derive(Debug, Clone)]
pub struct NormObstruction {
    /// Common norm `s` of every member of `F(G,k)`: the sum of all elements.
    pub norm_value: usize,
    /// `⟨s⟩ ≤ G`; every element of `⟨F(G,k)⟩` has its norm here.
    pub norm_subgroup: SubgroupCarrier,
    /// `(1,…,1,g')` with `g' ∉ ⟨s⟩`, hence outside `⟨F(G,k)⟩`.
    pub witness: Tuple,
}

pub fn abelian_norm_obstruction(group: &Group) -> Result<NormObstruction> {
    let k = group.order();
    if !group.is_abelian() || k < 3 {
        return Err(Error::Precondition(format!(
            "norm obstruction needs an abelian group of order >= 3, got {}",
            group.name()
        )));
    }
    let s = (1..k).fold(0, |acc, g| group.mul(acc, g));
    let norm_subgroup = closure(group, &[s])?;
    let escape = (0..k)
        .find(|&g| !norm_subgroup.contains(g))
        .ok_or_else(|| Error::Invariant(format!("<{s}> is all of {}", group.name())))?;
    let mut w = vec![0; k];
    w[k - 1] = escape;
    let witness = Tuple::new(w);
    debug_assert!(!norm_subgroup.contains(norm(group, &witness)));
    Ok(NormObstruction {
        norm_value: s,
        norm_subgroup,
        witness,
    })
}

/// Constant tuples `{(g,…,g)}` in `G^k`.
pub fn diagonal_subgroup(group: &Group, k: usize, max_order: u64) -> Result<SubgroupCarrier> {
    let ambient = direct_power(group, k, max_order)?;
    let members: Vec<usize> = (0..group.order())
        .map(|g| Tuple::constant(g, k).pack(group.order()))
        .collect();
    Ok(SubgroupCarrier {
        ambient,
        generators: members.clone(),
        members,
    })
}

/// `∏ g_i^{c_i}` evaluated left to right.
pub fn product_of_powers(group: &Group, terms: &[(u64, usize)]) -> usize {
    terms
        .iter()
        .fold(group.identity(), |acc, &(c, g)| group.mul(acc, group.pow(g, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::standard_generators;
    use crate::group::group_from_spec;

    fn g(spec: &str) -> Group {
        group_from_spec(spec).unwrap()
    }

    fn power(spec: &str, k: usize) -> Group {
        direct_power(&g(spec), k, DEFAULT_MAX_ORDER).unwrap()
    }

    /// Independent oracle: words of increasing length until no growth.
    fn brute_closure(ambient: &Group, gens: &[usize]) -> Vec<usize> {
        let mut set: std::collections::BTreeSet<usize> = [0].into();
        loop {
            let before = set.len();
            let current: Vec<usize> = set.iter().copied().collect();
            for &x in &current {
                for &s in gens {
                    set.insert(ambient.mul(x, s));
                    set.insert(ambient.mul(x, ambient.inv(s)));
                }
            }
            if set.len() == before {
                return set.into_iter().collect();
            }
        }
    }

    #[test]
    fn closure_examples() {
        let z33 = power("Z3", 3);
        assert_eq!(closure(&z33, &[]).unwrap().members(), &[0]);
        let f = config_codes(&z33).unwrap();
        let sub = closure(&z33, &f).unwrap();
        assert_eq!(sub.size(), 9);
        assert_eq!(sub.members(), &brute_closure(&z33, &f)[..]);
        assert_eq!(sub.index(), 3);
        assert!(!sub.contains(z33.code(&Tuple::from([0, 0, 1])).unwrap()));

        let z43 = power("Z4", 3);
        assert_eq!(closure(&z43, &config_codes(&z43).unwrap()).unwrap().size(), 64);
    }

    #[test]
    fn generation_examples() {
        let cases = [("Z2", 2, true), ("Z3", 3, false), ("Z5", 3, true)];
        for (spec, k, expect) in cases {
            let p = power(spec, k);
            assert_eq!(
                is_generating(&p, &config_codes(&p).unwrap()).unwrap(),
                expect,
                "{spec} {k}"
            );
        }
    }

    #[test]
    fn index_examples() {
        let z22 = power("Z2", 2);
        assert_eq!(index(&closure(&z22, &config_codes(&z22).unwrap()).unwrap()), 1);
        assert_eq!(index(&closure(&z22, &[]).unwrap()), 4);
    }

    #[test]
    fn closure_matches_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (spec, k) in [("D3", 2), ("Z4", 3), ("S3", 2), ("Z2xZ2", 3)] {
            let p = power(spec, k);
            for _ in 0..20 {
                let gens: Vec<usize> = (0..rng.random_range(0..4))
                    .map(|_| rng.random_range(0..p.order()))
                    .collect();
                let sub = closure(&p, &gens).unwrap();
                assert_eq!(sub.members(), &brute_closure(&p, &gens)[..]);
                assert!(sub.verify(0));
                // idempotent and insensitive to adding inverses
                assert_eq!(closure(&p, sub.members()).unwrap().members(), sub.members());
                let with_inv: Vec<usize> = gens.iter().flat_map(|&x| [x, p.inv(x)]).collect();
                assert_eq!(closure(&p, &with_inv).unwrap().members(), sub.members());
            }
        }
    }

    #[test]
    fn sparse_closure_and_cap() {
        let z5 = power("Z5", 3);
        let dense = closure(&z5, &[1, 30]).unwrap();
        let sparse = closure_with_cap(&z5, &[1, 30], 100).unwrap();
        assert_eq!(dense.members(), sparse.members());
        match closure_with_cap(&z5, &config_codes(&z5).unwrap(), 50) {
            Err(Error::ClosureCap { cap: 50, reached }) => assert!(reached > 50),
            other => panic!("{other:?}"),
        }
        assert!(closure(&z5, &[125]).is_err());
    }

    #[test]
    fn diagonal_factorization() {
        for (spec, elem) in [("Z2", 1), ("Z4", 3), ("D3", 3)] {
            let grp = g(spec);
            let (a, b) = factor_diagonal_k2(&grp, elem).unwrap();
            assert!(config_contains(&grp, &a) && config_contains(&grp, &b));
            let prod: Vec<usize> = a
                .entries()
                .iter()
                .zip(b.entries())
                .map(|(&x, &y)| grp.mul(x, y))
                .collect();
            assert_eq!(prod, vec![elem, elem]);
        }
        assert!(factor_diagonal_k2(&g("Z2"), 0).is_err());
    }

    #[test]
    fn standard_generator_factorization() {
        let z5 = g("Z5");
        let (a, b) = factor_standard_generator(&z5, 3, 2, 1).unwrap();
        assert_eq!((a, b), (Tuple::from([2, 3, 1]), Tuple::from([3, 2, 0])));
        let z4 = g("Z4");
        let (a, b) = factor_standard_generator(&z4, 3, 0, 2).unwrap();
        let sum: Vec<usize> = a
            .entries()
            .iter()
            .zip(b.entries())
            .map(|(&x, &y)| (x + y) % 4)
            .collect();
        assert_eq!(sum, vec![2, 0, 0]);
        assert!(factor_standard_generator(&g("Z3"), 3, 0, 1).is_err());
        assert!(factor_standard_generator(&z5, 2, 0, 1).is_err());
        assert!(factor_standard_generator(&z5, 3, 0, 0).is_err());
    }

    #[test]
    fn standard_generators_lie_in_config_closure() {
        for (spec, k) in [
            ("Z4", 3),
            ("Z5", 3),
            ("Z5", 4),
            ("Z6", 3),
            ("S3", 3),
            ("S3", 4),
            ("D4", 3),
        ] {
            let grp = g(spec);
            let p = power(spec, k);
            let sub = closure(&p, &config_codes(&p).unwrap()).unwrap();
            for e in standard_generators(&grp, k).unwrap() {
                assert!(sub.contains(p.code(&e).unwrap()));
            }
            for pos in 0..k {
                for elem in 1..grp.order() {
                    let (a, b) = factor_standard_generator(&grp, k, pos, elem).unwrap();
                    assert!(sub.contains(p.code(&a).unwrap()) && sub.contains(p.code(&b).unwrap()));
                }
            }
            assert!(sub.is_whole(), "{spec} {k}");
        }
    }

    #[test]
    fn norm_obstructions() {
        let o = abelian_norm_obstruction(&g("Z3")).unwrap();
        assert_eq!(o.norm_value, 0);
        assert_eq!(o.norm_subgroup.members(), &[0]);
        assert_eq!(o.witness, Tuple::from([0, 0, 1]));

        let o = abelian_norm_obstruction(&g("Z4")).unwrap();
        assert_eq!(o.norm_value, 2);
        assert_eq!(o.norm_subgroup.members(), &[0, 2]);

        let o = abelian_norm_obstruction(&g("Z2xZ2")).unwrap();
        assert_eq!(o.norm_value, 0);

        assert!(abelian_norm_obstruction(&g("D3")).is_err());
        assert!(abelian_norm_obstruction(&g("Z2")).is_err());
    }

    #[test]
    fn obstruction_agrees_with_closure() {
        for spec in ["Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z2xZ3"] {
            let grp = g(spec);
            let k = grp.order();
            let o = abelian_norm_obstruction(&grp).unwrap();
            let p = power(spec, k);
            let sub = closure(&p, &config_codes(&p).unwrap()).unwrap();
            assert!(!sub.is_whole());
            assert!(!sub.contains(p.code(&o.witness).unwrap()));
            // every member's norm lies in <s>
            assert!(sub
                .members()
                .iter()
                .all(|&c| o.norm_subgroup.contains(norm(&grp, &p.tuple(c)))));
        }
    }

    #[test]
    fn diagonal() {
        let d = diagonal_subgroup(&g("Z2"), 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(d.members(), &[0, 3]);
        let d = diagonal_subgroup(&g("Z3"), 3, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(d.size(), 3);
        assert!(d.verify(0));
        let sub = closure(d.ambient(), &d.members()[1..2]).unwrap();
        assert!(sub.members().iter().all(|&m| d.contains(m)));
    }

    #[test]
    fn generating_sets_of_g2_meet_f2() {
        // exhaustive over subsets of Z2^2
        let p = power("Z2", 2);
        let f = config_codes(&p).unwrap();
        for mask in 0u32..16 {
            let x: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            if is_generating(&p, &x).unwrap() {
                assert!(x.iter().any(|c| f.contains(c)));
            }
        }
        // random generating sets for |G| in {3, 4}
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for spec in ["Z3", "Z4", "Z2xZ2"] {
            let p = power(spec, 2);
            let f = config_codes(&p).unwrap();
            let mut found = 0;
            while found < 500 {
                let x: Vec<usize> = (0..rng.random_range(1..5))
                    .map(|_| rng.random_range(0..p.order()))
                    .collect();
                if is_generating(&p, &x).unwrap() {
                    found += 1;
                    assert!(x.iter().any(|c| f.contains(c)));
                }
            }
        }
    }

    #[test]
    fn z4_linear_combinations() {
        let p = power("Z4", 3);
        let c = |t: [usize; 3]| p.code(&Tuple::from(t)).unwrap();
        let e1 = product_of_powers(&p, &[(3, c([2, 0, 1])), (3, c([0, 1, 3])), (3, c([1, 3, 0]))]);
        let e2 = product_of_powers(&p, &[(1, c([2, 0, 1])), (1, c([3, 0, 1])), (1, c([3, 1, 2]))]);
        let e3 = product_of_powers(&p, &[(3, c([0, 1, 2])), (3, c([1, 3, 0])), (3, c([3, 0, 1]))]);
        assert_eq!((e1, e2, e3), (c([1, 0, 0]), c([0, 1, 0]), c([0, 0, 1])));
    }

    #[test]
    fn codes_export_sorted() {
        let p = power("Z3", 3);
        let sub = closure(&p, &config_codes(&p).unwrap()).unwrap();
        let mut buf = Vec::new();
        sub.write_codes(&mut buf).unwrap();
        let lines: Vec<usize> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| l.parse().unwrap())
            .collect();
        assert_eq!(lines.len(), 9);
        assert!(lines.windows(2).all(|w| w[0] < w[1]));
    }
}
