//! The translation map `φ(x_0,…,x_k) = (x_1 x_0^-1, …, x_k x_0^-1)` from
//! `F(G,k+1)` onto the punctured configuration set `F(G-{1},k)`, its fibers,
//! and the quotient constructions built from them.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigSet, ENUM_BUDGET};
use crate::error::{Error, Result};
use crate::group::{direct_power, Group, DEFAULT_MAX_ORDER};
use crate::par;
use crate::tuple::Tuple;

const EXHAUSTIVE_POWER: u128 = 10_000;
const SAMPLED_PAIRS: usize = 100_000;

pub fn phi(group: &Group, t: &Tuple) -> Result<Tuple> {
    if t.arity() < 2 {
        return Err(Error::Precondition("phi needs a tuple of arity >= 2".into()));
    }
    let e = t.entries();
    let x0_inv = group.inv(e[0]);
    Ok(Tuple::new(e[1..].iter().map(|&x| group.mul(x, x0_inv)).collect()))
}

/// `(g, p_1 g, …, p_k g)`.
fn lift(group: &Group, g: usize, p: &Tuple) -> Tuple {
    let mut v = Vec::with_capacity(p.arity() + 1);
    v.push(g);
    v.extend(p.entries().iter().map(|&x| group.mul(x, g)));
    Tuple::new(v)
}

/// `F(G,k+1)` after checking it fits the enumeration budget.
fn domain(group: &Group, k: usize) -> Result<ConfigSet> {
    let f = ConfigSet::new(group, k + 1)?;
    if f.cardinality() > ENUM_BUDGET as u128 {
        return Err(Error::Budget {
            needed: f.cardinality().to_string(),
            budget: ENUM_BUDGET,
        });
    }
    Ok(f)
}

/// Whether `φ(F(G,k+1)) = F(G-{1},k)`, both inclusions by enumeration.
pub fn phi_image_check(group: &Group, k: usize) -> Result<bool> {
    let f = domain(group, k)?;
    let punctured = ConfigSet::punctured(group, k)?;
    let mut image = HashSet::new();
    for x in f.iter() {
        let y = phi(group, &x)?;
        if !punctured.contains(&y) {
            return Ok(false);
        }
        image.insert(y);
    }
    Ok(punctured.iter().all(|p| image.contains(&p)))
}

/// Checks that `x ↦ (x_0, φ(x))` and `(g, p) ↦ (g, p_1 g, …, p_k g)` are
/// mutually inverse between `F(G,k+1)` and `G × F(G-{1},k)`, and that the
/// two sides have the same enumerated size.
pub fn product_bijection_check(group: &Group, k: usize) -> Result<bool> {
    let f = domain(group, k)?;
    let punctured = ConfigSet::punctured(group, k)?;
    let mut left = 0u128;
    for x in f.iter() {
        left += 1;
        let p = phi(group, &x)?;
        if !punctured.contains(&p) || lift(group, x.entries()[0], &p) != x {
            return Ok(false);
        }
    }
    let mut right = 0u128;
    for p in punctured.iter() {
        for g in 0..group.order() {
            right += 1;
            let x = lift(group, g, &p);
            if !f.contains(&x) || x.entries()[0] != g || phi(group, &x)? != p {
                return Ok(false);
            }
        }
    }
    Ok(left == right && left == f.cardinality())
}

/// The fiber `φ^-1(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSet {
    base: Tuple,
    members: Vec<Tuple>,
}

impl FiberSet {
    pub fn base(&self) -> &Tuple {
        &self.base
    }

    /// Members indexed by their first entry `g`.
    pub fn members(&self) -> &[Tuple] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        t.entries().first().is_some_and(|&g| self.members.get(g) == Some(t))
    }
}

pub fn fiber(group: &Group, base: &Tuple) -> Result<FiberSet> {
    let k = base.arity();
    if k == 0 || !ConfigSet::punctured(group, k)?.contains(base) {
        return Err(Error::InvalidTuple(format!(
            "{base} is not a tuple of distinct non-identity elements of {}",
            group.name()
        )));
    }
    let f = ConfigSet::new(group, k + 1)?;
    let members: Vec<Tuple> = (0..group.order()).map(|g| lift(group, g, base)).collect();
    for m in &members {
        if !f.contains(m) || phi(group, m)? != *base {
            return Err(Error::Invariant(format!("fiber member {m} of {base}")));
        }
    }
    Ok(FiberSet {
        base: base.clone(),
        members,
    })
}

/// Least member of `F(G-{1},k)`, the default audit base point.
pub fn default_base(group: &Group, k: usize) -> Result<Tuple> {
    ConfigSet::punctured(group, k)?
        .iter()
        .next()
        .ok_or_else(|| Error::Precondition(format!("F({}-{{1}},{k}) is empty", group.name())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientAudit {
    pub group: String,
    pub k: usize,
    pub base: String,
    pub quotient_size: u128,
    pub image_size: u128,
    pub injective: bool,
    pub surjective: bool,
    pub verdict: String,
    /// Two distinct classes with the same image, when injectivity fails.
    #[serde(skip)]
    pub collision: Option<(Tuple, Tuple)>,
}

impl QuotientAudit {
    pub fn is_bijection(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Builds the quotient of `F(G,k+1)` that collapses the single fiber
/// `K = φ^-1(base)` and keeps every other tuple as a singleton class, maps
/// each class by `φ`, and records whether that map is a bijection onto
/// `F(G-{1},k)`.
pub fn literal_quotient_audit(group: &Group, k: usize, base: Option<&Tuple>) -> Result<QuotientAudit> {
    let base = match base {
        Some(b) => b.clone(),
        None => default_base(group, k)?,
    };
    let kfiber = fiber(group, &base)?;
    let f = domain(group, k)?;
    let punctured = ConfigSet::punctured(group, k)?;

    // Class representatives: K is represented by its g = identity member.
    let k_rep = kfiber.members()[group.identity()].clone();
    let mut classes = 0u128;
    let mut first_preimage: HashMap<Tuple, Tuple> = HashMap::new();
    let mut collision = None;
    let mut surjective_into = true;
    for x in f.iter() {
        let rep = if kfiber.contains(&x) {
            if x != k_rep {
                continue;
            }
            k_rep.clone()
        } else {
            x
        };
        classes += 1;
        let y = phi(group, &rep)?;
        surjective_into &= punctured.contains(&y);
        match first_preimage.get(&y) {
            Some(prev) if collision.is_none() => collision = Some((prev.clone(), rep)),
            Some(_) => {}
            None => {
                first_preimage.insert(y, rep);
            }
        }
    }
    let image_size = first_preimage.len() as u128;
    if classes != f.cardinality() - kfiber.len() as u128 + 1 {
        return Err(Error::Invariant("quotient class count".into()));
    }
    let injective = collision.is_none();
    let surjective = surjective_into && image_size == punctured.cardinality();
    Ok(QuotientAudit {
        group: group.name().to_string(),
        k,
        base: base.to_string(),
        quotient_size: classes,
        image_size,
        injective,
        surjective,
        verdict: if injective && surjective {
            "bijection"
        } else {
            "not a bijection"
        }
        .to_string(),
        collision,
    })
}

/// Partitions `F(G,k+1)` into `φ`-fibers and checks that there are
/// `|F(G-{1},k)|` blocks of size `|G|`, each equal to an orbit of the
/// right-diagonal action `x·g = (x_0 g, …, x_k g)`, with `φ` a bijection
/// from blocks onto `F(G-{1},k)`.
pub fn orbit_quotient_check(group: &Group, k: usize) -> Result<bool> {
    let f = domain(group, k)?;
    let punctured = ConfigSet::punctured(group, k)?;
    let mut blocks: HashMap<Tuple, Vec<Tuple>> = HashMap::new();
    for x in f.iter() {
        blocks.entry(phi(group, &x)?).or_default().push(x);
    }
    if blocks.len() as u128 != punctured.cardinality() {
        return Ok(false);
    }
    for (p, block) in &blocks {
        if !punctured.contains(p) || block.len() != group.order() {
            return Ok(false);
        }
        // The orbit of the first member under right translation.
        let x = &block[0];
        let orbit: HashSet<Tuple> = (0..group.order())
            .map(|g| Tuple::new(x.entries().iter().map(|&xi| group.mul(xi, g)).collect()))
            .collect();
        if orbit.len() != block.len() || !block.iter().all(|b| orbit.contains(b)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiHomomorphismCheck {
    pub homomorphism: bool,
    pub abelian: bool,
    pub exhaustive: bool,
    /// A pair `(x, y)` of `G^(k+1)` with `φ(xy) != φ(x)φ(y)`.
    pub witness: Option<(Tuple, Tuple)>,
}

impl PhiHomomorphismCheck {
    pub fn agrees(&self) -> bool {
        self.homomorphism == self.abelian
    }
}

/// Tests whether `φ: G^(k+1) -> G^k` is a homomorphism. Pairs of the form
/// `((x,1,…,1), (1,y,1,…,1))` are tried first; then all pairs when
/// `|G|^(k+1) <= 10^4`, otherwise 10^5 seeded random pairs.
pub fn phi_homomorphism_iff_abelian(group: &Group, k: usize, seed: u64) -> Result<PhiHomomorphismCheck> {
    if k == 0 {
        return Err(Error::Precondition("arity must be >= 1".into()));
    }
    let n = group.order();
    let breaks = |a: &Tuple, b: &Tuple| -> bool {
        let ab = Tuple::new(
            a.entries()
                .iter()
                .zip(b.entries())
                .map(|(&x, &y)| group.mul(x, y))
                .collect(),
        );
        let (pa, pb) = (phi(group, a).unwrap(), phi(group, b).unwrap());
        let prod: Vec<usize> = pa
            .entries()
            .iter()
            .zip(pb.entries())
            .map(|(&x, &y)| group.mul(x, y))
            .collect();
        phi(group, &ab).unwrap().entries() != prod.as_slice()
    };

    let one = group.identity();
    let shaped = |x: usize, y: usize| {
        let mut a = Tuple::constant(one, k + 1).into_entries();
        let mut b = a.clone();
        a[0] = x;
        b[1] = y;
        (Tuple::new(a), Tuple::new(b))
    };
    let mut witness = par::first_index(0..n * n, |i| {
        let (a, b) = shaped(i / n, i % n);
        breaks(&a, &b)
    })
    .map(|i| shaped(i / n, i % n));

    let total = (n as u128).checked_pow(k as u32 + 1).filter(|&t| t <= EXHAUSTIVE_POWER);
    let exhaustive = total.is_some();
    let scan_witness = match total {
        Some(total) => {
            let power = direct_power(group, k + 1, DEFAULT_MAX_ORDER)?;
            let total = total as usize;
            let phis: Vec<Tuple> = (0..total).map(|c| phi(group, &power.tuple(c)).unwrap()).collect();
            let target = direct_power(group, k, DEFAULT_MAX_ORDER)?;
            let codes: Vec<usize> = phis.iter().map(|t| target.code(t).unwrap()).collect();
            par::first_index(0..total, |a| {
                (0..total).any(|b| codes[power.mul(a, b)] != target.mul(codes[a], codes[b]))
            })
            .map(|a| {
                let b = (0..total)
                    .find(|&b| codes[power.mul(a, b)] != target.mul(codes[a], codes[b]))
                    .unwrap();
                (power.tuple(a), power.tuple(b))
            })
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut random_tuple = || Tuple::new((0..=k).map(|_| rng.random_range(0..n)).collect());
            let mut found = None;
            for _ in 0..SAMPLED_PAIRS {
                let (a, b) = (random_tuple(), random_tuple());
                if breaks(&a, &b) {
                    found = Some((a, b));
                    break;
                }
            }
            found
        }
    };
    if witness.is_none() {
        witness = scan_witness;
    }
    Ok(PhiHomomorphismCheck {
        homomorphism: witness.is_none(),
        abelian: group.is_abelian(),
        exhaustive,
        witness,
    })
}
