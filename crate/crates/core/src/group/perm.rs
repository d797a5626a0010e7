//! Lehmer-code ranking of permutations of `0..n`.
//!
//! Rank 0 is the identity permutation and ranks follow lexicographic order.

pub fn factorial(n: usize) -> usize {
    (2..=n).product()
}

pub fn rank(perm: &[u8]) -> usize {
    let n = perm.len();
    let mut used: u64 = 0;
    let mut r = 0;
    for (i, &p) in perm.iter().enumerate() {
        let smaller_unused = (p as u32) - (used & ((1u64 << p) - 1)).count_ones();
        r = r * (n - i) + smaller_unused as usize;
        used |= 1 << p;
    }
    r
}

pub fn unrank(mut r: usize, n: usize) -> Vec<u8> {
    let mut digits = vec![0usize; n];
    for (i, d) in digits.iter_mut().enumerate().rev() {
        let radix = n - i;
        *d = r % radix;
        r /= radix;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

/// `(a ∘ b)(i) = a[b[i]]`.
pub fn compose(a: &[u8], b: &[u8]) -> Vec<u8> {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn invert(a: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len()];
    for (i, &v) in a.iter().enumerate() {
        out[v as usize] = i as u8;
    }
    out
}
