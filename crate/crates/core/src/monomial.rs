//! Graded-lexicographic ranking of exponent multi-indices.
//!
//! Within a degree layer `m`, multi-indices are ordered lexicographically
//! with the first variable most significant and larger exponents first, so
//! `x1^m` has rank 0 and `xn^m` has the last rank.

use alloc::vec;
use alloc::vec::Vec;

/// Number of multi-indices of `n` variables with total degree `m`.
pub fn layer_size(n: usize, m: usize) -> usize {
    if n == 0 {
        return usize::from(m == 0);
    }
    binomial(m + n - 1, n - 1)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Rank of `j` within its degree layer.
pub fn rank(j: &[u32]) -> usize {
    let n = j.len();
    let mut rem: usize = j.iter().map(|&e| e as usize).sum();
    let mut r = 0;
    for (i, &ji) in j.iter().enumerate().take(n.saturating_sub(1)) {
        let ji = ji as usize;
        // indices with a larger exponent in slot i come first
        if rem > ji {
            r += layer_size(n - i, rem - ji - 1);
        }
        rem -= ji;
    }
    r
}

/// Inverse of [`rank`] for layer `m` of `n` variables.
pub fn unrank(n: usize, m: usize, mut r: usize, out: &mut [u32]) {
    debug_assert_eq!(out.len(), n);
    let mut rem = m;
    for i in 0..n {
        if i == n - 1 {
            out[i] = rem as u32;
            break;
        }
        let mut t = rem;
        loop {
            let c = layer_size(n - i - 1, rem - t);
            if r < c {
                break;
            }
            r -= c;
            t -= 1;
        }
        out[i] = t as u32;
        rem -= t;
    }
}

/// Precomputed exponent tables for layers `0..=max_degree`.
#[derive(Clone, Debug)]
pub struct LayerTable {
    n: usize,
    exps: Vec<Vec<u32>>,
}

impl LayerTable {
    pub fn new(n: usize, max_degree: usize) -> LayerTable {
        let mut exps = Vec::with_capacity(max_degree + 1);
        let mut buf = vec![0u32; n];
        for m in 0..=max_degree {
            let size = layer_size(n, m);
            let mut layer = Vec::with_capacity(size * n);
            for r in 0..size {
                unrank(n, m, r, &mut buf);
                layer.extend_from_slice(&buf);
            }
            exps.push(layer);
        }
        LayerTable { n, exps }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.exps.len() - 1
    }

    #[inline]
    pub fn exps(&self, m: usize, r: usize) -> &[u32] {
        &self.exps[m][r * self.n..(r + 1) * self.n]
    }
}
