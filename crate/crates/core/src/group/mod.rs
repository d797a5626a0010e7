//! Finite groups with dense element ids `0..order`, 0 being the identity.
//!
//! Cyclic, dihedral and symmetric groups multiply arithmetically. Direct
//! products use a mixed-radix id with the left factor most significant, which
//! for a direct power `G^k` coincides with [`Tuple`] packing.

mod hom;
pub mod perm;
mod spec;
mod table;

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use hom::{hom_power_transport, mono_power_transport, Homomorphism};
pub use spec::{parse_group_spec, parse_group_spec_with_cap, Atom, GroupSpec, DEFAULT_MAX_ORDER};

use crate::error::{Error, Result};
use crate::tuple::Tuple;
use table::Table;

/// Largest order for which a multiplication table may be materialized.
pub const TABLE_CACHE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_order: u64,
    /// Tabulate groups of order at most [`TABLE_CACHE_LIMIT`].
    pub cache_tables: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            cache_tables: true,
        }
    }
}

/// An immutable finite group. Cloning is cheap.
#[derive(Clone)]
pub struct Group(Arc<Inner>);

struct Inner {
    name: String,
    order: usize,
    abelian: bool,
    kind: Kind,
    /// Base group and exponent when this is a direct power.
    power: Option<(Group, usize)>,
    /// Structural group this one was tabulated from, kept for labels.
    origin: Option<Group>,
    orders: OnceLock<Vec<u32>>,
}

enum Kind {
    Cyclic,
    Dihedral { n: usize },
    Symmetric { n: usize },
    Table(Table),
    Product { factors: Vec<Group> },
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.0.name)
            .field("order", &self.0.order)
            .finish()
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Group {
    fn from_parts(name: String, order: usize, abelian: bool, kind: Kind) -> Self {
        Group(Arc::new(Inner {
            name,
            order,
            abelian,
            kind,
            power: None,
            origin: None,
            orders: OnceLock::new(),
        }))
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        Self::from_parts(format!("Z{n}"), n, true, Kind::Cyclic)
    }

    /// `D_n` of order `2n`: rotation `r^i` has id `i`, reflection `r^i a` has
    /// id `n + i`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 3, "dihedral group needs n >= 3");
        Self::from_parts(format!("D{n}"), 2 * n, false, Kind::Dihedral { n })
    }

    /// `S_n` with permutations numbered by Lehmer rank.
    pub fn symmetric(n: usize) -> Self {
        assert!((1..=20).contains(&n), "symmetric group needs 1 <= n <= 20");
        Self::from_parts(format!("S{n}"), perm::factorial(n), n <= 2, Kind::Symmetric { n })
    }

    /// Parses and validates a multiplication table (see [`parse_group_spec`]
    /// for the file format).
    pub fn from_table_text(name: &str, text: &str, max_order: u64) -> Result<Self> {
        Ok(Self::from_table(name.to_string(), table::parse_table(text, max_order)?))
    }

    fn from_table(name: String, t: Table) -> Self {
        let n = t.n;
        let abelian = (0..n).all(|a| (0..a).all(|b| t.mul(a, b) == t.mul(b, a)));
        Self::from_parts(name, n, abelian, Kind::Table(t))
    }

    /// Direct product with ids in mixed radix, first factor most significant.
    pub fn product(factors: Vec<Group>, max_order: u64) -> Result<Self> {
        assert!(!factors.is_empty());
        if factors.len() == 1 {
            return Ok(factors.into_iter().next().unwrap());
        }
        let order = checked_order(factors.iter().map(Group::order), max_order, || {
            factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("x")
        })?;
        let name = factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("x");
        let abelian = factors.iter().all(Group::is_abelian);
        Ok(Self::from_parts(name, order, abelian, Kind::Product { factors }))
    }

    /// Same ids and name, multiplication backed by a stored table.
    /// Returns `self` unchanged above [`TABLE_CACHE_LIMIT`] or if already tabulated.
    pub fn tabulated(&self) -> Self {
        if self.order() > TABLE_CACHE_LIMIT || matches!(self.0.kind, Kind::Table(_)) {
            return self.clone();
        }
        let n = self.order();
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul.push(self.mul(a, b) as u32);
            }
        }
        let inv = (0..n).map(|a| self.inv(a) as u32).collect();
        Group(Arc::new(Inner {
            name: self.0.name.clone(),
            order: n,
            abelian: self.is_abelian(),
            kind: Kind::Table(Table { n, mul, inv }),
            power: self.0.power.clone(),
            origin: Some(self.clone()),
            orders: OnceLock::new(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn is_abelian(&self) -> bool {
        self.0.abelian
    }

    /// `(base, k)` if this group was built by [`direct_power`].
    pub fn power_of(&self) -> Option<(&Group, usize)> {
        self.0.power.as_ref().map(|(g, k)| (g, *k))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.0.kind {
            Kind::Cyclic => {
                let n = self.0.order;
                let s = a + b;
                if s >= n {
                    s - n
                } else {
                    s
                }
            }
            Kind::Dihedral { n } => dihedral_mul(*n, a, b),
            Kind::Symmetric { n } => perm::rank(&perm::compose(&perm::unrank(a, *n), &perm::unrank(b, *n))),
            Kind::Table(t) => t.mul(a, b),
            Kind::Product { factors } => {
                let (mut a, mut b) = (a, b);
                let (mut out, mut place) = (0, 1);
                for f in factors.iter().rev() {
                    let r = f.order();
                    out += place * f.mul(a % r, b % r);
                    a /= r;
                    b /= r;
                    place *= r;
                }
                out
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        match &self.0.kind {
            Kind::Cyclic => (self.0.order - a) % self.0.order,
            Kind::Dihedral { n } => {
                if a < *n {
                    (n - a) % n
                } else {
                    a
                }
            }
            Kind::Symmetric { n } => perm::rank(&perm::invert(&perm::unrank(a, *n))),
            Kind::Table(t) => t.inv[a] as usize,
            Kind::Product { factors } => {
                let mut a = a;
                let (mut out, mut place) = (0, 1);
                for f in factors.iter().rev() {
                    let r = f.order();
                    out += place * f.inv(a % r);
                    a /= r;
                    place *= r;
                }
                out
            }
        }
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let (mut base, mut acc) = (a, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Smallest `m >= 1` with `a^m = 1`.
    pub fn element_order(&self, a: usize) -> usize {
        if let Some(orders) = self.0.orders.get() {
            return orders[a] as usize;
        }
        let (mut x, mut m) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            m += 1;
        }
        m
    }

    /// Orders of all elements, cached after the first call.
    pub fn element_orders(&self) -> &[u32] {
        self.0.orders.get_or_init(|| {
            (0..self.order())
                .map(|a| {
                    let (mut x, mut m) = (a, 1u32);
                    while x != 0 {
                        x = self.mul(x, a);
                        m += 1;
                    }
                    m
                })
                .collect()
        })
    }

    /// Entries of a direct-power element.
    pub fn tuple(&self, code: usize) -> Tuple {
        let (base, k) = self.power_of().expect("tuple() needs a direct power");
        Tuple::unpack(code, base.order(), k)
    }

    /// Code of a tuple in a direct power; checks arity and entry range.
    pub fn code(&self, t: &Tuple) -> Result<usize> {
        let (base, k) = self
            .power_of()
            .ok_or_else(|| Error::Precondition(format!("{} is not a direct power", self.name())))?;
        if t.arity() != k || t.entries().iter().any(|&e| e >= base.order()) {
            return Err(Error::InvalidTuple(format!("{t} is not an element of {}", self.name())));
        }
        Ok(t.pack(base.order()))
    }

    /// Human-readable element label: tuples for direct powers, nested
    /// tuples for other products, plain ids for atoms.
    pub fn format_element(&self, code: usize) -> String {
        if self.power_of().is_some() {
            return self.tuple(code).to_string();
        }
        if let Some(origin) = &self.0.origin {
            return origin.format_element(code);
        }
        match &self.0.kind {
            Kind::Product { factors } => {
                let mut parts = Vec::with_capacity(factors.len());
                let mut c = code;
                for f in factors.iter().rev() {
                    parts.push(f.format_element(c % f.order()));
                    c /= f.order();
                }
                parts.reverse();
                format!("({})", parts.join(","))
            }
            _ => code.to_string(),
        }
    }

    /// Checks identity, inverse and associativity laws. Associativity is
    /// exhaustive when `order <= exhaustive_limit`, else sampled.
    pub fn verify_axioms(&self, exhaustive_limit: usize, seed: u64) -> Result<()> {
        let n = self.order();
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return Err(Error::NotAGroup(format!("identity law fails at {g}")));
            }
            if self.mul(g, self.inv(g)) != 0 || self.mul(self.inv(g), g) != 0 {
                return Err(Error::NotAGroup(format!("inverse law fails at {g}")));
            }
        }
        let check = |a, b, c| {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                Err(Error::NotAGroup(format!("associativity fails at ({a},{b},{c})")))
            } else {
                Ok(())
            }
        };
        if n <= exhaustive_limit {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100_000 {
                check(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(())
    }
}

fn dihedral_mul(n: usize, a: usize, b: usize) -> usize {
    // r^i r^j = r^(i+j), r^i r^j a = r^(i+j) a, r^i a r^j = r^(i-j) a, r^i a r^j a = r^(i-j)
    let (i, ra) = if a < n { (a, false) } else { (a - n, true) };
    let (j, rb) = if b < n { (b, false) } else { (b - n, true) };
    let e = if ra { (i + n - j) % n } else { (i + j) % n };
    if ra != rb {
        n + e
    } else {
        e
    }
}

fn checked_order(orders: impl Iterator<Item = usize>, cap: u64, describe: impl Fn() -> String) -> Result<usize> {
    let mut total: u64 = 1;
    for o in orders {
        total = total
            .checked_mul(o as u64)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::OrderCap {
                order: format!("|{}| > {cap}", describe()),
                cap,
            })?;
    }
    Ok(total as usize)
}

/// Realizes a parsed specification.
pub fn build_group(spec: &GroupSpec) -> Result<Group> {
    build_group_with(
        spec,
        BuildOptions {
            max_order: spec.cap(),
            ..Default::default()
        },
    )
}

pub fn build_group_with(spec: &GroupSpec, opts: BuildOptions) -> Result<Group> {
    let mut factors = Vec::with_capacity(spec.atoms().len());
    for atom in spec.atoms() {
        let g = match atom {
            Atom::Cyclic(n) => Group::cyclic(*n as usize),
            Atom::Dihedral(n) => Group::dihedral(*n as usize),
            Atom::Symmetric(n) => Group::symmetric(*n as usize),
            Atom::Table(path) => Group::from_table(
                format!("table:{}", path.display()),
                table::read_table(path, opts.max_order)?,
            ),
        };
        factors.push(g);
    }
    let g = Group::product(factors, opts.max_order)?;
    Ok(if opts.cache_tables { g.tabulated() } else { g })
}

/// Parses and builds in one step with default options.
pub fn group_from_spec(text: &str) -> Result<Group> {
    build_group(&parse_group_spec(text)?)
}

/// `G^k` with entrywise operations; elements are packed tuples.
pub fn direct_power(base: &Group, k: usize, max_order: u64) -> Result<Group> {
    if k == 0 {
        return Err(Error::Precondition("direct power needs k >= 1".into()));
    }
    let order = checked_order(std::iter::repeat_n(base.order(), k), max_order, || {
        format!("{}^{k}", base.name())
    })?;
    let factor = base.tabulated();
    let name = format!("({})^{k}", base.name());
    Ok(Group(Arc::new(Inner {
        name,
        order,
        abelian: base.is_abelian(),
        kind: Kind::Product {
            factors: vec![factor; k],
        },
        power: Some((base.clone(), k)),
        origin: None,
        orders: OnceLock::new(),
    })))
}
