//! Degree-graded truncated multivariate power series.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{Ctx, Dense};
use crate::error::{Error, Result};
use crate::ext::ExtFloat;
use crate::monomial::{layer_size, rank, unrank, LayerTable};
use crate::polymap::{Poly, PolyMap};

/// The nonzero coefficients of one homogeneous layer, sorted by rank.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Layer {
    ranks: Vec<u32>,
    coeffs: Vec<ExtFloat>,
}

impl Layer {
    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, ExtFloat)> + '_ {
        self.ranks.iter().map(|&r| r as usize).zip(self.coeffs.iter().copied())
    }

    pub fn max_abs(&self) -> ExtFloat {
        self.coeffs.iter().fold(ExtFloat::ZERO, |m, c| m.max_abs(*c))
    }

    fn from_dense(values: &[ExtFloat]) -> Layer {
        let mut l = Layer::default();
        for (r, v) in values.iter().enumerate() {
            if !v.is_zero() {
                l.ranks.push(r as u32);
                l.coeffs.push(*v);
            }
        }
        l
    }

    fn get(&self, r: usize) -> ExtFloat {
        match self.ranks.binary_search(&(r as u32)) {
            Ok(i) => self.coeffs[i],
            Err(_) => ExtFloat::ZERO,
        }
    }
}

/// `Σ_j B_j (x − c)^j` for `|j| ≤ p`.
///
/// Layer `m` holds the coefficients of total degree `m`; explicit zeros are
/// never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    dim: usize,
    center: Vec<f64>,
    max_degree: usize,
    layers: Vec<Layer>,
}

impl TruncatedSeries {
    pub fn zero(dim: usize, center: Vec<f64>, max_degree: usize) -> TruncatedSeries {
        assert_eq!(center.len(), dim, "center dimension");
        TruncatedSeries { dim, center, max_degree, layers: vec![Layer::default(); max_degree + 1] }
    }

    /// Terms of degree above `max_degree` are dropped; like terms are summed.
    pub fn from_terms(
        dim: usize,
        center: Vec<f64>,
        max_degree: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, ExtFloat)>,
    ) -> Result<TruncatedSeries> {
        if center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: center.len() });
        }
        let ctx = Ctx::new(dim, max_degree);
        let mut d = Dense::zeros(&ctx, 0, max_degree);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.len() });
            }
            let m: usize = e.iter().map(|&v| v as usize).sum();
            if m > max_degree {
                continue;
            }
            let g = ctx.index_of(&e);
            let v = d.get(g) + c;
            d.set(g, v);
        }
        Ok(TruncatedSeries::from_dense(&ctx, center, &d))
    }

    /// `‖x − c‖²`.
    pub fn norm_squared(dim: usize, center: Vec<f64>, max_degree: usize) -> TruncatedSeries {
        let terms = (0..dim).map(|i| {
            let mut e = vec![0u32; dim];
            e[i] = 2;
            (e, ExtFloat::ONE)
        });
        TruncatedSeries::from_terms(dim, center, max_degree, terms).expect("valid shape")
    }

    /// Single-variable series centered at 0 from coefficients `c[k]` of `x^k`.
    pub fn from_coeffs_1d(coeffs: &[f64], max_degree: usize) -> TruncatedSeries {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (vec![k as u32], ExtFloat::from_f64(c)));
        TruncatedSeries::from_terms(1, vec![0.0], max_degree, terms).expect("valid shape")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Same coefficients, expansion point relabelled to `center`: the series
    /// in `x − c` becomes the same polynomial in `x − center`, i.e. a rigid
    /// translation of its graph.
    pub fn translated_to(&self, center: Vec<f64>) -> TruncatedSeries {
        assert_eq!(center.len(), self.dim, "center dimension");
        TruncatedSeries { center, ..self.clone() }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn layer(&self, m: usize) -> &Layer {
        &self.layers[m]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(Layer::is_empty)
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coeff(&self, exps: &[u32]) -> ExtFloat {
        let m: usize = exps.iter().map(|&v| v as usize).sum();
        if exps.len() != self.dim || m > self.max_degree {
            return ExtFloat::ZERO;
        }
        self.layers[m].get(rank(exps))
    }

    /// All stored terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, ExtFloat)> + '_ {
        let n = self.dim;
        self.layers.iter().enumerate().flat_map(move |(m, l)| {
            l.iter().map(move |(r, c)| {
                let mut e = vec![0u32; n];
                unrank(n, m, r, &mut e);
                (e, c)
            })
        })
    }

    /// Highest nonempty layer index.
    pub fn top_layer(&self) -> Option<usize> {
        self.layers.iter().rposition(|l| !l.is_empty())
    }

    pub fn with_max_degree(&self, p: usize) -> TruncatedSeries {
        let mut layers: Vec<Layer> = self.layers.iter().take(p + 1).cloned().collect();
        layers.resize(p + 1, Layer::default());
        TruncatedSeries { dim: self.dim, center: self.center.clone(), max_degree: p, layers }
    }

    pub fn set_layer_dense(&mut self, m: usize, values: &[ExtFloat]) {
        assert_eq!(values.len(), layer_size(self.dim, m));
        self.layers[m] = Layer::from_dense(values);
    }

    pub fn layer_dense(&self, m: usize) -> Vec<ExtFloat> {
        let mut v = vec![ExtFloat::ZERO; layer_size(self.dim, m)];
        for (r, c) in self.layers[m].iter() {
            v[r] = c;
        }
        v
    }

    pub fn scale(&self, s: ExtFloat) -> TruncatedSeries {
        let mut out = self.clone();
        for l in &mut out.layers {
            for c in &mut l.coeffs {
                *c = *c * s;
            }
            if s.is_zero() {
                *l = Layer::default();
            }
        }
        out
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let p = self.max_degree.max(other.max_degree);
        let ctx = Ctx::new(self.dim, p);
        let mut d = self.to_dense(&ctx);
        d.add_assign(&other.to_dense(&ctx));
        Ok(TruncatedSeries::from_dense(&ctx, self.center.clone(), &d))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.add(&other.scale(-ExtFloat::ONE))
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.center != other.center {
            return Err(Error::CenterMismatch);
        }
        Ok(())
    }

    pub(crate) fn to_dense(&self, ctx: &Ctx) -> Dense {
        let mut d = Dense::zeros(ctx, 0, ctx.degree());
        for (m, l) in self.layers.iter().enumerate().take(ctx.degree() + 1) {
            let base = ctx.offset(m);
            for (r, c) in l.iter() {
                d.set(base + r, c);
            }
        }
        d
    }

    pub(crate) fn from_dense(ctx: &Ctx, center: Vec<f64>, d: &Dense) -> TruncatedSeries {
        let p = ctx.degree();
        let mut s = TruncatedSeries::zero(ctx.dim(), center, p);
        for m in d.lo..=d.hi.min(p) {
            s.layers[m] = Layer::from_dense(d.layer(ctx, m));
        }
        s
    }

    /// Product truncated at degree `p`.
    pub fn multiply(&self, other: &TruncatedSeries, p: usize) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let ctx = Ctx::new(self.dim, p);
        let prod = self.to_dense(&ctx).mul(&ctx, &other.to_dense(&ctx), p);
        Ok(TruncatedSeries::from_dense(&ctx, self.center.clone(), &prod))
    }

    /// `V ∘ f` truncated at degree `p`, for `V` centered at the origin and
    /// `f(0) = 0`.
    pub fn compose_with_map(&self, f: &PolyMap, p: usize) -> Result<TruncatedSeries> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: f.dim() });
        }
        if self.center.iter().any(|&c| c != 0.0) {
            return Err(Error::CenterMismatch);
        }
        f.ensure_centered()?;
        let mut ctx = Ctx::new(self.dim, p);
        for c in f.components() {
            ctx.prepare_poly(c);
        }
        let terms: Vec<(Vec<u32>, ExtFloat)> = self.terms().collect();
        let out = compose_dense(&ctx, &terms, f.components(), p);
        Ok(TruncatedSeries::from_dense(&ctx, self.center.clone(), &out))
    }

    /// Re-expand around `new_center`; same polynomial, same total degree.
    pub fn taylor_shift(&self, new_center: &[f64]) -> TruncatedSeries {
        assert_eq!(new_center.len(), self.dim);
        let p = self.max_degree;
        let ctx = Ctx::new(self.dim, p);
        let mut d = self.to_dense(&ctx);
        for (i, (cn, co)) in new_center.iter().zip(&self.center).enumerate() {
            let delta = cn - co;
            if delta != 0.0 {
                shift_variable(&ctx, &mut d, i, ExtFloat::from_f64(delta));
            }
        }
        TruncatedSeries::from_dense(&ctx, new_center.to_vec(), &d)
    }

    /// `Σ_j B_j (x − c)^j`, accumulated layer by layer in rank order.
    pub fn eval(&self, x: &[f64]) -> ExtFloat {
        assert_eq!(x.len(), self.dim);
        let p = self.max_degree as u32;
        let powers: Vec<Vec<ExtFloat>> = x
            .iter()
            .zip(&self.center)
            .map(|(xi, ci)| {
                let d = ExtFloat::from_f64(xi - ci);
                let mut v = Vec::with_capacity(p as usize + 1);
                let mut acc = ExtFloat::ONE;
                for _ in 0..=p {
                    v.push(acc);
                    acc = acc * d;
                }
                v
            })
            .collect();
        let table = LayerTable::new(self.dim, self.max_degree);
        let mut sum = ExtFloat::ZERO;
        for (m, l) in self.layers.iter().enumerate() {
            for (r, c) in l.iter() {
                let mut t = c;
                for (k, &e) in table.exps(m, r).iter().enumerate() {
                    t = t * powers[k][e as usize];
                }
                sum += t;
            }
        }
        sum
    }
}

/// Horner evaluation of `V(f)` over the variables in order, truncating each
/// partial result at the highest degree that can still reach `bound`.
pub(crate) fn compose_dense(ctx: &Ctx, terms: &[(Vec<u32>, ExtFloat)], f: &[Poly], bound: usize) -> Dense {
    let min_deg: Vec<usize> = f.iter().map(|c| c.min_degree().max(1) as usize).collect();
    let zero_comp: Vec<bool> = f.iter().map(|c| c.terms().is_empty()).collect();
    let mut sorted: Vec<&(Vec<u32>, ExtFloat)> = terms.iter().filter(|t| !t.1.is_zero()).collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    compose_rec(ctx, &sorted, 0, f, &min_deg, &zero_comp, bound)
}

fn compose_rec(
    ctx: &Ctx,
    terms: &[&(Vec<u32>, ExtFloat)],
    var: usize,
    f: &[Poly],
    min_deg: &[usize],
    zero_comp: &[bool],
    bound: usize,
) -> Dense {
    let n = ctx.dim();
    if var == n {
        let mut d = Dense::zeros(ctx, 0, bound);
        let c = terms.iter().fold(ExtFloat::ZERO, |acc, t| acc + t.1);
        if !d.is_empty_range() {
            d.data[0] = c;
        }
        return d;
    }
    if terms.is_empty() {
        return Dense::zeros(ctx, 0, bound);
    }
    // terms are sorted lexicographically, so groups by exps[var] are contiguous
    let max_a = terms.iter().map(|t| t.0[var] as usize).max().unwrap();
    let mut horner: Option<Dense> = None;
    for a in (0..=max_a).rev() {
        let reach = a * min_deg[var];
        if reach > bound || (a > 0 && zero_comp[var]) {
            continue;
        }
        let sub_bound = bound - reach;
        let group: Vec<&(Vec<u32>, ExtFloat)> =
            terms.iter().copied().filter(|t| t.0[var] as usize == a).collect();
        let mut acc = if group.is_empty() {
            Dense::zeros(ctx, 0, sub_bound)
        } else {
            compose_rec(ctx, &group, var + 1, f, min_deg, zero_comp, sub_bound)
        };
        if let Some(h) = horner.take() {
            h.mul_poly_into(ctx, &f[var], &mut acc);
        }
        horner = Some(acc);
    }
    horner.unwrap_or_else(|| Dense::zeros(ctx, 0, bound))
}

/// Replace `x_i` by `x_i + delta` in every monomial.
fn shift_variable(ctx: &Ctx, d: &mut Dense, var: usize, delta: ExtFloat) {
    let n = ctx.dim();
    let p = ctx.degree();
    if n == 1 {
        // synthetic division on the flat coefficient vector
        let a = &mut d.data;
        for i in 0..p {
            for j in (i..p).rev() {
                let t = a[j + 1];
                if !t.is_zero() {
                    a[j] += delta * t;
                }
            }
        }
        return;
    }
    let others = LayerTable::new(n - 1, p);
    let mut e = vec![0u32; n];
    let mut idx = Vec::with_capacity(p + 1);
    let mut col = Vec::with_capacity(p + 1);
    for s in 0..=p {
        for r in 0..layer_size(n - 1, s) {
            let o = others.exps(s, r);
            idx.clear();
            col.clear();
            for t in 0..=(p - s) {
                e[..var].copy_from_slice(&o[..var]);
                e[var] = t as u32;
                e[var + 1..].copy_from_slice(&o[var..]);
                let g = ctx.index_of(&e);
                idx.push(g);
                col.push(d.get(g));
            }
            if col.iter().all(|c| c.is_zero()) {
                continue;
            }
            let deg = col.len() - 1;
            for i in 0..deg {
                for j in (i..deg).rev() {
                    if !col[j + 1].is_zero() {
                        col[j] = col[j] + delta * col[j + 1];
                    }
                }
            }
            for (g, v) in idx.iter().zip(&col) {
                d.set(*g, *v);
            }
        }
    }
}
