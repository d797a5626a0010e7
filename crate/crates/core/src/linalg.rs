//! Dense linear algebra over the prime field `Z_p`, and the configuration
//! group `⟨F(Z_p,p)⟩` viewed as a subspace of `Z_p^p`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::config::config_iter;
use crate::error::{Error, Result};
use crate::group::Group;

/// Largest `p` for which all `p!` rows of `F(Z_p,p)` are enumerated.
pub const MAX_ENUMERATED_PRIME: u64 = 8;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModPVector {
    p: u64,
    entries: Vec<u64>,
}

impl ModPVector {
    /// Reduces every entry mod `p`.
    pub fn new(p: u64, entries: impl IntoIterator<Item = i64>) -> Result<Self> {
        check_prime(p)?;
        let m = p as i64;
        Ok(Self {
            p,
            entries: entries.into_iter().map(|e| e.rem_euclid(m) as u64).collect(),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            p: self.p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + b) % self.p)
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        Self {
            p: self.p,
            entries: self.entries.iter().map(|&a| a * (c % self.p) % self.p).collect(),
        }
    }
}

/// Row-major dense matrix over `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Outcome of `Mx = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomogeneousSolution {
    Nontrivial(ModPVector),
    OnlyTrivial,
}

impl ModPMatrix {
    /// Entries must already be residues in `[0, p)`.
    pub fn new(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        if data.len() != rows * cols {
            return Err(Error::MatrixFormat(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&v| v >= p) {
            return Err(Error::MatrixFormat(format!("entry {bad} is not reduced mod {p}")));
        }
        Ok(Self { p, rows, cols, data })
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::MatrixFormat("ragged rows".into()));
        }
        Self::new(p, rows.len(), cols, rows.concat())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, columns: &[ModPVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, ModPVector::len);
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows || c.prime() != p {
                return Err(Error::MatrixFormat("mismatched columns".into()));
            }
            for (i, &v) in c.entries().iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(p, rows, cols, data)
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self::new(p, n, n, data)
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        Self::new(p, rows, cols, vec![0; rows * cols])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &ModPVector) -> ModPVector {
        assert_eq!(x.len(), self.cols);
        let entries = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x.entries())
                    .fold(0, |acc, (a, b)| (acc + a * b) % self.p)
            })
            .collect();
        ModPVector { p: self.p, entries }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (ModPMatrix, Vec<usize>) {
        let (p, cols) = (self.p, self.cols);
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    m.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(m[r * cols + c], p);
            for j in c..cols {
                m[r * cols + j] = m[r * cols + j] * inv % p;
            }
            for i in 0..self.rows {
                let f = m[i * cols + c];
                if i != r && f != 0 {
                    for j in c..cols {
                        m[i * cols + j] = (m[i * cols + j] + (p - f) * m[r * cols + j]) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let reduced = ModPMatrix {
            p,
            rows: self.rows,
            cols,
            data: m,
        };
        (reduced, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// One kernel vector per free column.
    pub fn kernel_basis(&self) -> Vec<ModPVector> {
        let (r, pivots) = self.rref();
        let p = self.p;
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut x = vec![0; self.cols];
                x[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = (p - r.get(i, free)) % p;
                }
                ModPVector { p, entries: x }
            })
            .collect()
    }

    pub fn solve_homogeneous(&self) -> HomogeneousSolution {
        match self.kernel_basis().into_iter().next() {
            Some(x) => HomogeneousSolution::Nontrivial(x),
            None => HomogeneousSolution::OnlyTrivial,
        }
    }

    /// Whether `v` is a linear combination of the rows.
    pub fn row_span_contains(&self, v: &ModPVector) -> bool {
        if v.len() != self.cols {
            return false;
        }
        let mut data = self.data.clone();
        data.extend_from_slice(v.entries());
        let extended = ModPMatrix {
            p: self.p,
            rows: self.rows + 1,
            cols: self.cols,
            data,
        };
        extended.rank() == self.rank()
    }
}

impl fmt::Display for ModPMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(u64::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for ModPMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace().map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::MatrixFormat(format!("bad token {t:?}")))
        });
        let mut header = || {
            tokens
                .next()
                .unwrap_or_else(|| Err(Error::MatrixFormat("missing header".into())))
        };
        let (p, rows, cols) = (header()?, header()? as usize, header()? as usize);
        let data = tokens.collect::<Result<Vec<_>>>()?;
        Self::new(p, rows, cols, data)
    }
}

pub fn rank(m: &ModPMatrix) -> usize {
    m.rank()
}

pub fn solve_homogeneous(m: &ModPMatrix) -> HomogeneousSolution {
    m.solve_homogeneous()
}

fn check_config_prime(p: u64) -> Result<()> {
    check_prime(p)?;
    if p < 3 {
        return Err(Error::Precondition("the configuration group needs p >= 3".into()));
    }
    if p > MAX_ENUMERATED_PRIME {
        return Err(Error::Budget {
            needed: format!("{p}!"),
            budget: 40_320,
        });
    }
    Ok(())
}

/// All `p!` members of `F(Z_p,p)` as rows.
pub fn config_matrix(p: u64) -> Result<ModPMatrix> {
    check_config_prime(p)?;
    let zp = Group::cyclic(p as usize);
    let rows: Vec<Vec<u64>> = config_iter(&zp, p as usize)?
        .map(|t| t.entries().iter().map(|&e| e as u64).collect())
        .collect();
    ModPMatrix::from_rows(p, &rows)
}

/// `dim ⟨F(Z_p,p)⟩` from elimination of the full enumeration.
pub fn config_group_dim(p: u64) -> Result<usize> {
    Ok(config_matrix(p)?.rank())
}

/// Coordinate sum is zero, i.e. membership in `⟨F(Z_p,p)⟩`.
pub fn norm_kernel_membership(v: &ModPVector) -> bool {
    v.entries().iter().sum::<u64>() % v.prime() == 0
}

/// `(g_1..g_{p-1}) ↦ (-(g_1+…+g_{p-1}), g_1, …, g_{p-1})`.
pub fn norm_kernel_embedding(v: &ModPVector) -> ModPVector {
    let p = v.prime();
    let s = v.entries().iter().sum::<u64>() % p;
    let mut entries = vec![(p - s) % p];
    entries.extend_from_slice(v.entries());
    ModPVector { p, entries }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub first: Vec<u64>,
    pub second: Vec<u64>,
    /// `first + second` equals the vector built from the closed formula.
    pub sum_matches: bool,
    pub first_in_config_set: bool,
    pub second_in_config_set: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisVectorReport {
    pub index: usize,
    pub branch: &'static str,
    /// Entries as written, before reduction.
    pub raw: Vec<i64>,
    pub reduced: Vec<u64>,
    pub length_ok: bool,
    pub in_span: bool,
    pub decomposition: Option<DecompositionReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisReport {
    pub p: u64,
    pub vectors: Vec<BasisVectorReport>,
    pub family_rank: usize,
    pub independent: bool,
    pub config_dim: usize,
    /// Independent, inside the span, and as many vectors as the dimension.
    pub is_basis: bool,
}

/// The closed-form family `e_1, …, e_{p-1}`, built literally and audited
/// against the span of `F(Z_p,p)`.
pub fn claimed_basis(p: u64) -> Result<BasisReport> {
    let config = config_matrix(p)?;
    let config_dim = config.rank();
    let pi = p as i64;
    let mut vectors = Vec::new();
    for i in 1..pi {
        let (branch, raw): (&'static str, Vec<i64>) = if i == 1 {
            ("i=1", [1, 0].into_iter().chain(2..pi).collect())
        } else if i == 2 {
            ("i=2", (0..pi).collect())
        } else if i <= pi - 2 {
            // leading zeros, then 1, i, i+3, i+5, ..., 2p-i-1
            let mut tail = vec![1, i];
            tail.extend((i + 3..=2 * pi - i - 1).step_by(2));
            let zeros = (pi - tail.len() as i64).max(0) as usize;
            ("3<=i<=p-2", std::iter::repeat_n(0, zeros).chain(tail).collect())
        } else {
            (
                "i=p-1",
                std::iter::repeat_n(0, (pi - 2) as usize).chain([1, pi - 1]).collect(),
            )
        };
        let reduced = ModPVector::new(p, raw.iter().copied())?;
        let length_ok = raw.len() == p as usize;
        let in_span = length_ok && config.row_span_contains(&reduced);
        let decomposition = (3..=pi - 2).contains(&i).then(|| {
            let first: Vec<i64> = (1..i).chain([0]).chain(i..pi).collect();
            let second: Vec<i64> = (1..i).map(|j| pi - j).chain([1, 0]).chain(2..=pi - i).collect();
            let to_vec = |v: &[i64]| ModPVector::new(p, v.iter().copied()).expect("p checked");
            let (a, b) = (to_vec(&first), to_vec(&second));
            let injective = |v: &ModPVector| {
                let mut s = v.entries().to_vec();
                s.sort_unstable();
                s.dedup();
                s.len() == p as usize && v.len() == p as usize
            };
            DecompositionReport {
                sum_matches: a.len() == reduced.len() && a.add(&b) == reduced,
                first_in_config_set: injective(&a),
                second_in_config_set: injective(&b),
                first: a.entries,
                second: b.entries,
            }
        });
        vectors.push(BasisVectorReport {
            index: i as usize,
            branch,
            raw,
            reduced: reduced.entries,
            length_ok,
            in_span,
            decomposition,
        });
    }
    let family_rank = if vectors.iter().all(|v| v.length_ok) {
        let rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.reduced.clone()).collect();
        ModPMatrix::from_rows(p, &rows)?.rank()
    } else {
        0
    };
    let independent = family_rank == vectors.len();
    let is_basis = independent && vectors.iter().all(|v| v.in_span) && vectors.len() == config_dim;
    Ok(BasisReport {
        p,
        vectors,
        family_rank,
        independent,
        config_dim,
        is_basis,
    })
}

/// One random instance of `Ax = 0` with `A` made of `p` distinct members
/// of `F(Z_p,p)` as columns.
#[derive(Debug, Clone, Serialize)]
pub struct KernelTrial {
    pub columns: Vec<Vec<u64>>,
    pub solution: Option<Vec<u64>>,
    /// The solution is nonzero and `A x = 0` holds.
    pub verified: bool,
}

pub fn kernel_trial<R: Rng>(p: u64, rng: &mut R) -> Result<KernelTrial> {
    check_config_prime(p)?;
    let n = p as usize;
    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut c: Vec<u64> = (0..p).collect();
        c.shuffle(rng);
        if !columns.contains(&c) {
            columns.push(c);
        }
    }
    let vectors: Vec<ModPVector> = columns
        .iter()
        .map(|c| ModPVector::new(p, c.iter().map(|&x| x as i64)))
        .collect::<Result<_>>()?;
    let a = ModPMatrix::from_columns(p, &vectors)?;
    let (solution, verified) = match a.solve_homogeneous() {
        HomogeneousSolution::Nontrivial(x) => {
            let ok = !x.is_zero() && a.mul_vec(&x).is_zero();
            (Some(x.entries().to_vec()), ok)
        }
        HomogeneousSolution::OnlyTrivial => (None, false),
    };
    Ok(KernelTrial {
        columns,
        solution,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u64, rows: &[&[u64]]) -> ModPMatrix {
        ModPMatrix::from_rows(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(matches!(ModPMatrix::zeros(4, 1, 1), Err(Error::NotPrime(4))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&ModPMatrix::identity(5, 3).unwrap()), 3);
        assert_eq!(rank(&m(3, &[&[0, 1, 2], &[1, 0, 2]])), 2);
        assert_eq!(rank(&config_matrix(3).unwrap()), 2);
        assert_eq!(rank(&ModPMatrix::zeros(7, 3, 4).unwrap()), 0);
        // (1,2) and (2,4) dependent mod 5, independent over the integers mod 3
        assert_eq!(rank(&m(5, &[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(3, &[&[1, 2], &[2, 1]])), 1);
    }

    #[test]
    fn configuration_group_dimensions() {
        assert_eq!(config_group_dim(3).unwrap(), 2);
        assert_eq!(config_group_dim(5).unwrap(), 4);
        assert_eq!(config_group_dim(7).unwrap(), 6);
        assert!(config_group_dim(2).is_err());
        assert!(config_group_dim(4).is_err());
        assert!(matches!(config_group_dim(11), Err(Error::Budget { .. })));
    }

    #[test]
    fn span_equals_sum_kernel() {
        for p in [3u64, 5, 7] {
            let f = config_matrix(p).unwrap();
            for r in 0..f.rows() {
                assert_eq!(f.row(r).iter().sum::<u64>() % p, 0);
            }
            // kernel of the coordinate-sum functional has dimension p-1
            let sum_functional = ModPMatrix::new(p, 1, p as usize, vec![1; p as usize]).unwrap();
            assert_eq!(sum_functional.kernel_basis().len(), p as usize - 1);
            assert_eq!(f.rank(), p as usize - 1);
            for v in sum_functional.kernel_basis() {
                assert!(f.row_span_contains(&v));
            }
        }
    }

    #[test]
    fn nonzero_scalars_preserve_the_configuration_set() {
        for p in [3u64, 5, 7] {
            let zp = Group::cyclic(p as usize);
            for t in config_iter(&zp, p as usize).unwrap() {
                for lambda in 1..p as usize {
                    let scaled = crate::Tuple::new(t.entries().iter().map(|&e| e * lambda % p as usize).collect());
                    assert!(scaled.is_injective());
                }
            }
            // lambda = 0 sends every member to the zero tuple, outside the set
            assert!(!crate::Tuple::constant(0, p as usize).is_injective());
        }
    }

    #[test]
    fn norm_kernel() {
        let v = |p, e: &[i64]| ModPVector::new(p, e.iter().copied()).unwrap();
        assert!(norm_kernel_membership(&v(3, &[0, 0, 0])));
        assert!(norm_kernel_membership(&v(3, &[0, 1, 2])));
        assert!(!norm_kernel_membership(&v(3, &[0, 0, 1])));
        assert_eq!(norm_kernel_embedding(&v(3, &[0, 0])), v(3, &[0, 0, 0]));
        assert_eq!(norm_kernel_embedding(&v(3, &[1, 2])), v(3, &[0, 1, 2]));
    }

    #[test]
    fn homogeneous_systems() {
        assert_eq!(
            solve_homogeneous(&ModPMatrix::identity(3, 3).unwrap()),
            HomogeneousSolution::OnlyTrivial
        );
        match solve_homogeneous(&ModPMatrix::zeros(5, 2, 2).unwrap()) {
            HomogeneousSolution::Nontrivial(x) => assert!(!x.is_zero()),
            other => panic!("{other:?}"),
        }
        // columns: three distinct members of F(Z_3,3)
        let cols: Vec<ModPVector> = [[0, 1, 2], [1, 0, 2], [2, 1, 0]]
            .iter()
            .map(|c| ModPVector::new(3, c.iter().copied()).unwrap())
            .collect();
        let a = ModPMatrix::from_columns(3, &cols).unwrap();
        match solve_homogeneous(&a) {
            HomogeneousSolution::Nontrivial(x) => {
                assert!(!x.is_zero());
                assert!(a.mul_vec(&x).is_zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn claimed_basis_small_primes() {
        let r = claimed_basis(3).unwrap();
        assert_eq!(r.vectors[0].reduced, vec![1, 0, 2]);
        assert_eq!(r.vectors[1].reduced, vec![0, 1, 2]);
        assert!(r.independent && r.is_basis);

        let r = claimed_basis(5).unwrap();
        assert_eq!(r.vectors.len(), 4);
        let d = r.vectors[2].decomposition.as_ref().unwrap();
        assert_eq!(d.first, vec![1, 2, 0, 3, 4]);
        assert_eq!(d.second, vec![4, 3, 1, 0, 2]);
        assert_eq!(r.vectors[2].reduced, vec![0, 0, 1, 3, 1]);
        assert!(d.sum_matches && d.first_in_config_set && d.second_in_config_set);
        for v in &r.vectors {
            assert!(v.length_ok && v.in_span, "e_{}", v.index);
        }
    }

    #[test]
    fn kernel_trials_are_verified() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [3, 5, 7] {
            for _ in 0..20 {
                let t = kernel_trial(p, &mut rng).unwrap();
                assert!(t.verified);
                let x = t.solution.unwrap();
                // independent recomputation of A x
                for r in 0..p as usize {
                    let s: u64 = t.columns.iter().zip(&x).map(|(c, xi)| c[r] * xi).sum();
                    assert_eq!(s % p, 0);
                }
            }
        }
        assert!(kernel_trial(2, &mut rng).is_err());
    }

    #[test]
    fn matrix_text_roundtrip() {
        let a = m(7, &[&[1, 2, 3], &[4, 5, 6]]);
        let text = a.to_string();
        assert_eq!(text, "7 2 3\n1 2 3\n4 5 6\n");
        assert_eq!(text.parse::<ModPMatrix>().unwrap(), a);
        assert!("7 2 3\n1 2 3\n4 5".parse::<ModPMatrix>().is_err());
        assert!("7 1 1\n9".parse::<ModPMatrix>().is_err());
        assert!("6 1 1\n1".parse::<ModPMatrix>().is_err());
    }

    proptest! {
        #[test]
        fn rank_is_invariant_under_row_operations(
            rows in prop::collection::vec(prop::collection::vec(0u64..7, 5), 1..8),
            scales in prop::collection::vec(1u64..7, 8),
            shift in 0usize..8,
        ) {
            let a = ModPMatrix::from_rows(7, &rows).unwrap();
            let mut permuted = rows.clone();
            let len = permuted.len();
            permuted.rotate_left(shift % len);
            let scaled: Vec<Vec<u64>> = permuted
                .iter()
                .zip(&scales)
                .map(|(r, &c)| r.iter().map(|&v| v * c % 7).collect())
                .collect();
            prop_assert_eq!(ModPMatrix::from_rows(7, &scaled).unwrap().rank(), a.rank());
            prop_assert!(a.rank() <= a.rows().min(a.cols()));
        }

        #[test]
        fn kernel_vectors_are_solutions(
            rows in prop::collection::vec(prop::collection::vec(0u64..5, 4), 1..6),
        ) {
            let a = ModPMatrix::from_rows(5, &rows).unwrap();
            match a.solve_homogeneous() {
                HomogeneousSolution::Nontrivial(x) => {
                    prop_assert!(!x.is_zero());
                    prop_assert!(a.mul_vec(&x).is_zero());
                }
                HomogeneousSolution::OnlyTrivial => prop_assert_eq!(a.rank(), a.cols()),
            }
        }
    }
}
