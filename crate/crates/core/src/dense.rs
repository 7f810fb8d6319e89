//! Flat graded storage used inside the heavy series kernels.
//!
//! A [`Dense`] holds every coefficient of degrees `lo..=hi` in one vector,
//! laid out layer after layer in graded-lex rank order. [`Ctx`] caches the
//! index arithmetic shared by all dense values of one dimension and
//! truncation degree.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::ext::ExtFloat;
use crate::monomial::{binomial, layer_size, rank, LayerTable};
use crate::polymap::Poly;

pub(crate) struct Ctx {
    n: usize,
    p: usize,
    offsets: Vec<usize>,
    table: LayerTable,
    shift_tables: BTreeMap<Vec<u32>, Vec<u32>>,
}

impl Ctx {
    pub fn new(n: usize, p: usize) -> Ctx {
        let offsets = (0..=p + 1).map(|m| offset(n, m)).collect();
        Ctx { n, p, offsets, table: LayerTable::new(n, p), shift_tables: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn offset(&self, m: usize) -> usize {
        self.offsets[m]
    }

    pub fn layer_len(&self, m: usize) -> usize {
        self.offsets[m + 1] - self.offsets[m]
    }

    pub fn exps(&self, m: usize, r: usize) -> &[u32] {
        self.table.exps(m, r)
    }

    /// Make sure the multiply-by-`x^e` index table exists.
    pub fn prepare(&mut self, e: &[u32]) {
        if self.shift_tables.contains_key(e) {
            return;
        }
        let d: usize = e.iter().map(|&v| v as usize).sum();
        let mut t = Vec::new();
        if d <= self.p {
            let limit = self.offsets[self.p - d + 1];
            t.reserve(limit);
            let mut buf = vec![0u32; self.n];
            for m in 0..=(self.p - d) {
                for r in 0..self.layer_len(m) {
                    for (b, (x, y)) in buf.iter_mut().zip(self.table.exps(m, r).iter().zip(e)) {
                        *b = x + y;
                    }
                    t.push((self.offsets[m + d] + rank(&buf)) as u32);
                }
            }
        }
        self.shift_tables.insert(e.to_vec(), t);
    }

    pub fn prepare_poly(&mut self, poly: &Poly) {
        for t in poly.terms() {
            self.prepare(&t.exps);
        }
    }

    fn shift_table(&self, e: &[u32]) -> &[u32] {
        self.shift_tables
            .get(e)
            .map(Vec::as_slice)
            .expect("Ctx::prepare must run before multiplying by a monomial")
    }

    /// Global flat index of the monomial `e`.
    pub fn index_of(&self, e: &[u32]) -> usize {
        let m: usize = e.iter().map(|&v| v as usize).sum();
        self.offsets[m] + rank(e)
    }
}

/// Number of monomials in `n` variables of degree `< m`.
fn offset(n: usize, m: usize) -> usize {
    if m == 0 {
        0
    } else {
        binomial(m + n - 1, n)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub lo: usize,
    pub hi: usize,
    base: usize,
    pub data: Vec<ExtFloat>,
}

impl Dense {
    pub fn zeros(ctx: &Ctx, lo: usize, hi: usize) -> Dense {
        let hi = hi.min(ctx.p);
        if lo > hi {
            return Dense { lo, hi: lo.saturating_sub(1), base: 0, data: Vec::new() };
        }
        let base = ctx.offset(lo);
        Dense { lo, hi, base, data: vec![ExtFloat::ZERO; ctx.offset(hi + 1) - base] }
    }

    pub fn is_empty_range(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, g: usize) -> ExtFloat {
        if g < self.base || g >= self.base + self.data.len() {
            ExtFloat::ZERO
        } else {
            self.data[g - self.base]
        }
    }

    #[inline]
    pub fn set(&mut self, g: usize, v: ExtFloat) {
        self.data[g - self.base] = v;
    }

    pub fn layer<'a>(&'a self, ctx: &Ctx, m: usize) -> &'a [ExtFloat] {
        if m < self.lo || m > self.hi {
            return &[];
        }
        let a = ctx.offset(m) - self.base;
        &self.data[a..a + ctx.layer_len(m)]
    }

    /// `self += scale · other` on the overlap of the two ranges.
    pub fn add_scaled(&mut self, other: &Dense, scale: ExtFloat) {
        if scale.is_zero() {
            return;
        }
        let start = self.base.max(other.base);
        let end = (self.base + self.data.len()).min(other.base + other.data.len());
        for g in start..end {
            let v = other.data[g - other.base];
            if !v.is_zero() {
                self.data[g - self.base] += v * scale;
            }
        }
    }

    pub fn add_assign(&mut self, other: &Dense) {
        self.add_scaled(other, ExtFloat::ONE);
    }

    /// `out += self · poly`, truncated at `out.hi`. Every term of `poly`
    /// must have been registered with [`Ctx::prepare`].
    pub fn mul_poly_into(&self, ctx: &Ctx, poly: &Poly, out: &mut Dense) {
        let out_end = out.base + out.data.len();
        for t in poly.terms() {
            let d = t.degree() as usize;
            if self.lo + d > out.hi || self.data.is_empty() {
                continue;
            }
            let c = ExtFloat::from_f64(t.coef);
            let table = ctx.shift_table(&t.exps);
            let src_end = (self.base + self.data.len()).min(table.len());
            for g in self.base..src_end {
                let v = self.data[g - self.base];
                if v.is_zero() {
                    continue;
                }
                let tg = table[g] as usize;
                if tg >= out_end || tg < out.base {
                    continue;
                }
                out.data[tg - out.base] += v * c;
            }
        }
    }

    /// Full product truncated at `hi`.
    pub fn mul(&self, ctx: &Ctx, other: &Dense, hi: usize) -> Dense {
        let lo = self.lo + other.lo;
        let mut out = Dense::zeros(ctx, lo, hi);
        if out.data.is_empty() {
            return out;
        }
        let n = ctx.dim();
        let mut buf = vec![0u32; n];
        for ma in self.lo..=self.hi {
            let la = self.layer(ctx, ma);
            for mb in other.lo..=other.hi {
                if ma + mb > out.hi {
                    break;
                }
                let lb = other.layer(ctx, mb);
                let base_out = ctx.offset(ma + mb) - out.base;
                for (ra, a) in la.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let ea = ctx.exps(ma, ra);
                    for (rb, b) in lb.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let r = if n == 1 {
                            0
                        } else {
                            for (k, x) in buf.iter_mut().enumerate() {
                                *x = ea[k] + ctx.exps(mb, rb)[k];
                            }
                            rank(&buf)
                        };
                        out.data[base_out + r] += *a * *b;
                    }
                }
            }
        }
        out
    }
}

/// Number of coefficients a dense value of degrees `0..=p` holds.
#[allow(dead_code)]
pub(crate) fn full_len(n: usize, p: usize) -> usize {
    (0..=p).map(|m| layer_size(n, m)).sum()
}


/// Evaluate `poly` at dense series arguments, truncating at `hi`.
pub(crate) fn eval_poly(ctx: &Ctx, poly: &Poly, args: &[Dense], hi: usize) -> Dense {
    let n = ctx.dim();
    let max_e: Vec<u32> = (0..n)
        .map(|i| poly.terms().iter().map(|t| t.exps[i]).max().unwrap_or(0))
        .collect();
    // powers[i][e] = args[i]^e
    let mut powers: Vec<Vec<Dense>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut one = Dense::zeros(ctx, 0, hi);
        if !one.data.is_empty() {
            one.data[0] = ExtFloat::ONE;
        }
        let mut v = vec![one];
        for e in 1..=max_e[i] as usize {
            let next = v[e - 1].mul(ctx, &args[i], hi);
            v.push(next);
        }
        powers.push(v);
    }
    let mut out = Dense::zeros(ctx, 0, hi);
    for t in poly.terms() {
        let mut acc: Option<Dense> = None;
        for i in 0..n {
            let e = t.exps[i] as usize;
            if e == 0 {
                continue;
            }
            acc = Some(match acc {
                None => powers[i][e].clone(),
                Some(a) => a.mul(ctx, &powers[i][e], hi),
            });
        }
        match acc {
            Some(a) => out.add_scaled(&a, ExtFloat::from_f64(t.coef)),
            None => {
                if !out.data.is_empty() {
                    out.data[0] += ExtFloat::from_f64(t.coef);
                }
            }
        }
    }
    out
}
