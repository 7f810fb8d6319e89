//! The Lyapunov embryo: degree-`p` truncation of the unique solution of
//! `V(f(x)) − V(x) = −‖x‖²`, `V(0) = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{eval_poly, Ctx, Dense};
use crate::error::{Error, Result};
use crate::ext::ExtFloat;
use crate::linalg::{Lu, Matrix};
use crate::monomial::{layer_size, rank};
use crate::polymap::PolyMap;
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EmbryoMethod {
    /// Solve the homogeneous layers in increasing degree.
    PerDegreeSolve,
    /// Iterate `W ← ‖x‖² + W∘f` until the largest coefficient change is at
    /// most `tol·(1 + max |coefficient|)`.
    Picard { tol: f64, max_iter: usize },
    /// `Σ_{k=0}^{K} ‖f^k(x)‖²` truncated at degree `p`.
    DirectSum { terms: usize },
}

impl Default for EmbryoMethod {
    fn default() -> Self {
        EmbryoMethod::PerDegreeSolve
    }
}

impl EmbryoMethod {
    fn validate(&self) -> Result<()> {
        match *self {
            EmbryoMethod::Picard { tol, max_iter } if !(tol > 0.0) || max_iter == 0 => Err(
                Error::InvalidParameter("Picard needs tol > 0 and max_iter >= 1".into()),
            ),
            EmbryoMethod::DirectSum { terms: 0 } => {
                Err(Error::InvalidParameter("DirectSum needs K >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `‖∂₀f‖` when `f(0) = 0` and the linear part is a contraction.
pub fn check_hypotheses(f: &PolyMap) -> Result<f64> {
    let a = f.jacobian_at_zero()?;
    let norm = a.spectral_norm();
    if norm < 1.0 {
        Ok(norm)
    } else {
        Err(Error::NotAContraction { norm })
    }
}

/// Smallest `K` with `α^K ≤ eps`; for a nilpotent-at-origin map (`α = 0`)
/// the number of iterates that can still reach degree `p`.
pub fn direct_sum_terms(alpha: f64, eps: f64, p: usize) -> usize {
    if alpha <= 0.0 {
        let mut k = 1;
        while (1usize << k.min(63)) <= p {
            k += 1;
        }
        k
    } else {
        libm::ceil(libm::log(eps) / libm::log(alpha)).max(1.0) as usize
    }
}

pub fn solve_embryo(f: &PolyMap, p: usize, method: EmbryoMethod) -> Result<TruncatedSeries> {
    if p < 2 {
        return Err(Error::InvalidParameter("embryo degree must be at least 2".into()));
    }
    method.validate()?;
    check_hypotheses(f)?;
    match method {
        EmbryoMethod::PerDegreeSolve => per_degree(f, p),
        EmbryoMethod::Picard { tol, max_iter } => {
            let zero = TruncatedSeries::zero(f.dim(), vec![0.0; f.dim()], p);
            picard_from(f, p, tol, max_iter, zero)
        }
        EmbryoMethod::DirectSum { terms } => Ok(direct_sum(f, p, terms)),
    }
}

/// Homogeneous operator `V_m ↦ V_m∘A` on one degree layer.
enum DegreeOperator {
    Diagonal(Vec<f64>),
    General {
        a: Matrix,
        /// coefficients of `(Ax)^j` for every `j` of the previous layer
        prev_cols: Vec<Vec<f64>>,
        prev_degree: usize,
    },
}

impl DegreeOperator {
    fn new(a: &Matrix) -> DegreeOperator {
        let n = a.dim();
        if a.is_diagonal() {
            DegreeOperator::Diagonal((0..n).map(|i| a[(i, i)]).collect())
        } else {
            // layer 0: (Ax)^0 = 1
            DegreeOperator::General { a: a.clone(), prev_cols: vec![vec![1.0]], prev_degree: 0 }
        }
    }

    /// Solve `(C_A − I) v = rhs` on layer `m`. Must be called for every
    /// `m = 1, 2, …` in order.
    fn solve(&mut self, ctx: &Ctx, m: usize, rhs: &[ExtFloat]) -> Result<Vec<ExtFloat>> {
        match self {
            DegreeOperator::Diagonal(lambda) => {
                let mut out = Vec::with_capacity(rhs.len());
                for (r, b) in rhs.iter().enumerate() {
                    let e = ctx.exps(m, r);
                    let mut prod = ExtFloat::ONE;
                    for (&l, &k) in lambda.iter().zip(e) {
                        if k > 0 {
                            prod *= ExtFloat::from_f64(l).powi(k);
                        }
                    }
                    let d = prod - ExtFloat::ONE;
                    if d.abs() < ExtFloat::from_f64(1e-14) {
                        return Err(Error::SingularDegreeOperator { degree: m });
                    }
                    out.push(*b / d);
                }
                Ok(out)
            }
            DegreeOperator::General { a, prev_cols, prev_degree } => {
                debug_assert_eq!(*prev_degree + 1, m);
                let n = a.dim();
                let size = ctx.layer_len(m);
                let mut cols: Vec<Vec<f64>> = Vec::with_capacity(size);
                let mut buf = vec![0u32; n];
                for r in 0..size {
                    let e = ctx.exps(m, r);
                    let i = e.iter().position(|&v| v > 0).unwrap();
                    buf.copy_from_slice(e);
                    buf[i] -= 1;
                    let parent = &prev_cols[rank(&buf)];
                    // parent · (Σ_k A_ik x_k)
                    let mut col = vec![0.0; size];
                    for (r2, &v) in parent.iter().enumerate() {
                        if v == 0.0 {
                            continue;
                        }
                        let e2 = ctx.exps(m - 1, r2);
                        for k in 0..n {
                            let aik = a[(i, k)];
                            if aik == 0.0 {
                                continue;
                            }
                            buf.copy_from_slice(e2);
                            buf[k] += 1;
                            col[rank(&buf)] += v * aik;
                        }
                    }
                    cols.push(col);
                }
                *prev_cols = cols;
                *prev_degree = m;
                if rhs.iter().all(|b| b.is_zero()) {
                    return Ok(vec![ExtFloat::ZERO; size]);
                }
                // row-major matrix of C_A − I
                let mut mat = vec![0.0; size * size];
                for (c, col) in prev_cols.iter().enumerate() {
                    for (r, &v) in col.iter().enumerate() {
                        mat[r * size + c] = v;
                    }
                    mat[c * size + c] -= 1.0;
                }
                let lu = Lu::factor(size, mat, 1e-13)
                    .ok_or(Error::SingularDegreeOperator { degree: m })?;
                // solve in doubles, then refine against the extended residual
                let mut x = vec![ExtFloat::ZERO; size];
                let mut r = rhs.to_vec();
                for _ in 0..3 {
                    let top = match r.iter().filter(|b| !b.is_zero()).map(|b| b.exponent()).max() {
                        Some(t) => t,
                        None => break,
                    };
                    let b: Vec<f64> = r.iter().map(|v| v.ldexp(-top).to_f64()).collect();
                    for (xi, d) in x.iter_mut().zip(lu.solve(&b)) {
                        *xi += ExtFloat::from_f64(d).ldexp(top);
                    }
                    r = rhs.to_vec();
                    for (c, col) in prev_cols.iter().enumerate() {
                        let xc = x[c];
                        if xc.is_zero() {
                            continue;
                        }
                        for (row, &v) in col.iter().enumerate() {
                            if v != 0.0 {
                                r[row] -= xc.mul_f64(v);
                            }
                        }
                        r[c] += xc;
                    }
                }
                Ok(x)
            }
        }
    }
}

fn poly_to_dense(ctx: &Ctx, poly: &crate::polymap::Poly, lo: usize) -> Dense {
    let mut d = Dense::zeros(ctx, lo, ctx.degree());
    for t in poly.terms() {
        if t.degree() as usize <= ctx.degree() {
            let g = ctx.index_of(&t.exps);
            let v = d.get(g) + ExtFloat::from_f64(t.coef);
            d.set(g, v);
        }
    }
    d
}

fn per_degree(f: &PolyMap, p: usize) -> Result<TruncatedSeries> {
    let n = f.dim();
    let a = f.jacobian_at_zero()?;
    let mut op = DegreeOperator::new(&a);
    let mut ctx = Ctx::new(n, p);
    for c in f.components() {
        ctx.prepare_poly(c);
    }
    let mut v = TruncatedSeries::zero(n, vec![0.0; n], p);
    // Σ_{k solved} V_k∘f
    let mut acc = Dense::zeros(&ctx, 0, p);
    // products f^j for every j of the current layer, stored from degree |j|
    let mut prev: Vec<Dense> = f.components().iter().map(|c| poly_to_dense(&ctx, c, 1)).collect();
    op.solve(&ctx, 1, &vec![ExtFloat::ZERO; n])?;
    for m in 2..=p {
        let mut rhs: Vec<ExtFloat> = acc.layer(&ctx, m).iter().map(|c| -*c).collect();
        if m == 2 {
            for i in 0..n {
                let mut e = vec![0u32; n];
                e[i] = 2;
                rhs[rank(&e)] -= ExtFloat::ONE;
            }
        }
        let vm = op.solve(&ctx, m, &rhs)?;
        v.set_layer_dense(m, &vm);
        if m == p {
            break;
        }
        let size = layer_size(n, m);
        let mut cur: Vec<Dense> = Vec::with_capacity(size);
        let mut buf = vec![0u32; n];
        for r in 0..size {
            let e = ctx.exps(m, r);
            let i = e.iter().position(|&x| x > 0).unwrap();
            buf.copy_from_slice(e);
            buf[i] -= 1;
            let parent = &prev[rank(&buf)];
            let mut prod = Dense::zeros(&ctx, m, p);
            parent.mul_poly_into(&ctx, &f.components()[i], &mut prod);
            if !vm[r].is_zero() {
                acc.add_scaled(&prod, vm[r]);
            }
            cur.push(prod);
        }
        prev = cur;
    }
    Ok(v)
}

/// Picard iteration from an arbitrary starting series.
pub fn picard_from(
    f: &PolyMap,
    p: usize,
    tol: f64,
    max_iter: usize,
    init: TruncatedSeries,
) -> Result<TruncatedSeries> {
    let n = f.dim();
    let r2 = TruncatedSeries::norm_squared(n, vec![0.0; n], p);
    let mut w = init.with_max_degree(p);
    let tol = ExtFloat::from_f64(tol);
    let mut change = ExtFloat::ZERO;
    for _ in 0..max_iter {
        let next = w.compose_with_map(f, p)?.add(&r2)?;
        let diff = next.sub(&w)?;
        change = diff.layers().iter().fold(ExtFloat::ZERO, |m, l| m.max_abs(l.max_abs()));
        let top = next.layers().iter().fold(ExtFloat::ZERO, |m, l| m.max_abs(l.max_abs()));
        w = next;
        if change <= tol * (ExtFloat::ONE + top) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, change: change.to_f64() })
}

fn direct_sum(f: &PolyMap, p: usize, terms: usize) -> TruncatedSeries {
    let n = f.dim();
    let ctx = Ctx::new(n, p);
    let mut g: Vec<Dense> = (0..n)
        .map(|i| {
            let mut d = Dense::zeros(&ctx, 0, p);
            let mut e = vec![0u32; n];
            e[i] = 1;
            d.set(ctx.index_of(&e), ExtFloat::ONE);
            d
        })
        .collect();
    let mut total = Dense::zeros(&ctx, 0, p);
    for k in 0..=terms {
        if k > 0 {
            g = f.components().iter().map(|c| eval_poly(&ctx, c, &g, p)).collect();
        }
        if g.iter().all(|d| d.data.iter().all(|c| c.is_zero())) {
            break;
        }
        for gi in &g {
            total.add_assign(&gi.mul(&ctx, gi, p));
        }
    }
    TruncatedSeries::from_dense(&ctx, vec![0.0; n], &total)
}

/// Per-layer residual of the functional equation: the largest coefficient
/// of `V∘f − V + ‖x‖²` in layer `m`, divided by the largest coefficient of
/// `V` in that layer (or by 1 when that layer of `V` is empty).
pub fn residual_layers(v: &TruncatedSeries, f: &PolyMap, p: usize) -> Result<Vec<f64>> {
    let n = f.dim();
    let v = v.with_max_degree(p);
    let r2 = TruncatedSeries::norm_squared(n, vec![0.0; n], p);
    let lhs = v.compose_with_map(f, p)?.sub(&v)?.add(&r2)?;
    Ok((0..=p)
        .map(|m| {
            let num = lhs.layer(m).max_abs();
            let den = v.layer(m).max_abs();
            if den.is_zero() {
                num.to_f64()
            } else {
                (num / den).to_f64()
            }
        })
        .collect())
}

pub fn residual(v: &TruncatedSeries, f: &PolyMap, p: usize) -> Result<f64> {
    Ok(residual_layers(v, f, p)?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub values: Vec<f64>,
    /// Indices of samples with `V ≤ 0` away from the expansion center.
    pub nonpositive: Vec<usize>,
    /// Indices of samples at the center, where `V = 0` is expected.
    pub at_center: Vec<usize>,
}

impl PositivityReport {
    pub fn all_positive(&self) -> bool {
        self.nonpositive.is_empty()
    }
}

pub fn positivity_probe(v: &TruncatedSeries, samples: &[Vec<f64>]) -> PositivityReport {
    let mut report = PositivityReport { values: Vec::new(), nonpositive: Vec::new(), at_center: Vec::new() };
    for (i, x) in samples.iter().enumerate() {
        let val = v.eval(x);
        report.values.push(val.to_f64());
        if x.as_slice() == v.center() {
            report.at_center.push(i);
            if val.sign() < 0 {
                report.nonpositive.push(i);
            }
        } else if val.sign() <= 0 {
            report.nonpositive.push(i);
        }
    }
    report
}
