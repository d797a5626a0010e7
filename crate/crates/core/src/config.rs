//! Ordered configuration sets `F(G,k)` and `F(G-{1},k)`, the norm map, the
//! projection `G^(k+1) -> G^k`, the coordinate generators `E_k` and the
//! configuration property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::par;
use crate::tuple::Tuple;

/// Largest number of tuples any operation will materialize.
pub const ENUM_BUDGET: usize = 5_000_000;

/// Exhaustive pair checks run when `|G|^k` is at most this.
const EXHAUSTIVE_POWER: u128 = 10_000;
const SAMPLED_PAIRS: usize = 100_000;

/// `n (n-1) ... (n-k+1)`, zero when `n < k`.
pub fn falling_factorial(n: usize, k: usize) -> u128 {
    if n < k {
        return 0;
    }
    ((n - k + 1)..=n).fold(1u128, |acc, x| acc.saturating_mul(x as u128))
}

/// Lexicographic iterator over injective k-tuples drawn from a sorted pool.
#[derive(Debug, Clone)]
pub struct KPermutations {
    pool: Vec<usize>,
    k: usize,
    /// Indices into `pool`; `None` before the first and after the last item.
    current: Option<Vec<usize>>,
    used: Vec<bool>,
    started: bool,
}

impl KPermutations {
    fn new(pool: Vec<usize>, k: usize) -> Self {
        let used = vec![false; pool.len()];
        Self {
            pool,
            k,
            current: None,
            used,
            started: false,
        }
    }

    fn fill_from(&mut self, idx: &mut [usize], pos: usize) {
        let mut next_free = 0;
        for slot in &mut idx[pos..self.k] {
            while self.used[next_free] {
                next_free += 1;
            }
            self.used[next_free] = true;
            *slot = next_free;
        }
    }

    fn advance(&mut self) -> bool {
        let Some(mut idx) = self.current.take() else {
            return false;
        };
        for pos in (0..self.k).rev() {
            self.used[idx[pos]] = false;
            if let Some(next) = ((idx[pos] + 1)..self.pool.len()).find(|&i| !self.used[i]) {
                self.used[next] = true;
                idx[pos] = next;
                self.fill_from(&mut idx, pos + 1);
                self.current = Some(idx);
                return true;
            }
        }
        false
    }
}

impl Iterator for KPermutations {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if !self.started {
            self.started = true;
            if self.k <= self.pool.len() {
                let mut idx = vec![0; self.k];
                self.fill_from(&mut idx, 0);
                self.current = Some(idx);
            }
        } else if !self.advance() {
            return None;
        }
        let idx = self.current.as_ref()?;
        Some(Tuple::new(idx.iter().map(|&i| self.pool[i]).collect()))
    }
}

/// `F(G,k)` or `F(G-{1},k)` over a base group.
#[derive(Debug, Clone)]
pub struct ConfigSet {
    group: Group,
    k: usize,
    punctured: bool,
}

impl ConfigSet {
    pub fn new(group: &Group, k: usize) -> Result<Self> {
        Self::build(group, k, false)
    }

    pub fn punctured(group: &Group, k: usize) -> Result<Self> {
        Self::build(group, k, true)
    }

    fn build(group: &Group, k: usize, punctured: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("arity must be >= 1".into()));
        }
        Ok(Self {
            group: group.clone(),
            k,
            punctured,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    fn pool_size(&self) -> usize {
        self.group.order() - usize::from(self.punctured)
    }

    pub fn cardinality(&self) -> u128 {
        falling_factorial(self.pool_size(), self.k)
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    pub fn iter(&self) -> KPermutations {
        let start = usize::from(self.punctured);
        KPermutations::new((start..self.group.order()).collect(), self.k)
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        t.arity() == self.k
            && t.entries()
                .iter()
                .all(|&e| e < self.group.order() && !(self.punctured && e == 0))
            && t.is_injective()
    }

    /// All members, refusing sets larger than `budget`.
    pub fn materialize(&self, budget: usize) -> Result<Vec<Tuple>> {
        let card = self.cardinality();
        if card > budget as u128 {
            return Err(Error::Budget {
                needed: card.to_string(),
                budget,
            });
        }
        Ok(self.iter().collect())
    }
}

pub fn config_iter(group: &Group, k: usize) -> Result<KPermutations> {
    Ok(ConfigSet::new(group, k)?.iter())
}

pub fn punctured_config_iter(group: &Group, k: usize) -> Result<KPermutations> {
    Ok(ConfigSet::punctured(group, k)?.iter())
}

/// Membership in `F(G,k)` for the tuple's own arity.
pub fn config_contains(group: &Group, t: &Tuple) -> bool {
    debug_assert!(t.entries().iter().all(|&e| e < group.order()));
    t.is_injective()
}

/// Ordered product `t_1 t_2 ... t_k`.
pub fn norm(group: &Group, t: &Tuple) -> usize {
    t.entries().iter().fold(group.identity(), |acc, &g| group.mul(acc, g))
}

fn entrywise(group: &Group, a: &Tuple, b: &Tuple) -> Tuple {
    Tuple::new(
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(&x, &y)| group.mul(x, y))
            .collect(),
    )
}

/// Whether `|gh| = |g||h|` on `G^k`; exhaustive for `|G|^k <= 10^4`,
/// otherwise 10^5 seeded random pairs.
pub fn norm_is_homomorphism(group: &Group, k: usize, seed: u64) -> Result<bool> {
    if k < 2 {
        return Err(Error::Precondition("norm homomorphism check needs k >= 2".into()));
    }
    let n = group.order();
    let breaks =
        |a: &Tuple, b: &Tuple| norm(group, &entrywise(group, a, b)) != group.mul(norm(group, a), norm(group, b));
    let total = (n as u128).checked_pow(k as u32);
    match total {
        Some(total) if total <= EXHAUSTIVE_POWER => {
            let total = total as usize;
            let violated = par::any_index(0..total, |a| {
                let ta = Tuple::unpack(a, n, k);
                (0..total).any(|b| breaks(&ta, &Tuple::unpack(b, n, k)))
            });
            Ok(!violated)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut random_tuple = || Tuple::new((0..k).map(|_| rng.random_range(0..n)).collect());
            for _ in 0..SAMPLED_PAIRS {
                let (a, b) = (random_tuple(), random_tuple());
                if breaks(&a, &b) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

pub fn project(t: &Tuple) -> Result<Tuple> {
    t.project()
}

/// (P-1) some projection lies in `F(G,k)` and (P-2) every tuple whose
/// projection lies in `F(G,k)` lies in `F(G,k+1)`. The empty set fails (P-1).
pub fn has_configuration_property(group: &Group, set: &[Tuple]) -> Result<bool> {
    let Some(first) = set.first() else {
        return Ok(false);
    };
    let arity = first.arity();
    if arity < 2 {
        return Err(Error::Precondition("configuration property needs arity >= 2".into()));
    }
    for t in set {
        if t.arity() != arity {
            return Err(Error::Precondition(format!("mixed arities {arity} and {}", t.arity())));
        }
        if t.entries().iter().any(|&e| e >= group.order()) {
            return Err(Error::InvalidTuple(format!("{t} has ids outside {}", group.name())));
        }
    }
    let mut p1 = false;
    for t in set {
        if t.project()?.is_injective() {
            p1 = true;
            if !t.is_injective() {
                return Ok(false);
            }
        }
    }
    Ok(p1)
}

/// Configuration property of `C(alpha) = F(G,k) ∪ {alpha}`, cross-checked
/// against the closed form `p(alpha) ∉ F(G,k-1)`.
pub fn augmented_config_property(group: &Group, k: usize, alpha: &Tuple) -> Result<bool> {
    if k < 2 || alpha.arity() != k {
        return Err(Error::Precondition(format!("alpha must have arity k = {k} >= 2")));
    }
    if alpha.entries().iter().any(|&e| e >= group.order()) {
        return Err(Error::InvalidTuple(format!("{alpha} has ids outside {}", group.name())));
    }
    if alpha.is_injective() {
        return Err(Error::Precondition(format!("{alpha} lies in F(G,{k})")));
    }
    if group.order() < k + 1 {
        return Err(Error::Precondition(format!("needs |G| >= {}", k + 1)));
    }
    let mut set = ConfigSet::new(group, k)?.materialize(ENUM_BUDGET)?;
    set.push(alpha.clone());
    let enumerated = has_configuration_property(group, &set)?;
    let closed_form = !alpha.project()?.is_injective();
    if enumerated != closed_form {
        return Err(Error::Invariant(format!(
            "C({alpha}): enumeration says {enumerated}, projection test says {closed_form}"
        )));
    }
    Ok(enumerated)
}

/// `E_k`: tuples supported on a single coordinate, sorted and deduplicated.
pub fn standard_generators(group: &Group, k: usize) -> Result<Vec<Tuple>> {
    if k < 2 {
        return Err(Error::Precondition("standard generators need k >= 2".into()));
    }
    let mut out = Vec::with_capacity(k * group.order());
    for pos in 0..k {
        for g in 0..group.order() {
            let mut t = vec![0; k];
            t[pos] = g;
            out.push(Tuple::new(t));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Entrywise inverse of every member of `F(G,k)` is again a member.
pub fn check_symmetry(group: &Group, k: usize, budget: usize) -> Result<bool> {
    let members = ConfigSet::new(group, k)?.materialize(budget)?;
    Ok(members.iter().all(|t| {
        let inv = Tuple::new(t.entries().iter().map(|&g| group.inv(g)).collect());
        config_contains(group, &inv)
    }))
}
