//! Sparse polynomial self-maps of `ℝⁿ`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::monomial::binomial;

/// One monomial `coef · x^exps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coef: f64,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Graded-lex order: lower total degree first, then descending lex.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// A sparse polynomial in `n` variables with like terms merged, no zero
/// coefficients, and terms sorted by [`grlex`].
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    n: usize,
    terms: Vec<Term>,
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly { n, terms: Vec::new() }
    }

    /// Merges like terms and drops zeros. Fails on wrong exponent length or
    /// non-finite coefficients.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Poly> {
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exps, coef) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: exps.len() });
            }
            if !coef.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!("non-finite coefficient {coef}")));
            }
            *merged.entry(exps).or_insert(0.0) += coef;
        }
        let mut terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exps, coef)| Term { exps, coef })
            .collect();
        terms.sort_by(|a, b| grlex(&a.exps, &b.exps));
        Ok(Poly { n, terms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    /// Smallest total degree present, 0 for the zero polynomial.
    pub fn min_degree(&self) -> u32 {
        self.terms.first().map(Term::degree).unwrap_or(0)
    }

    pub fn constant(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.degree() == 0)
            .map(|t| t.coef)
            .unwrap_or(0.0)
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms
            .iter()
            .find(|t| t.exps == exps)
            .map(|t| t.coef)
            .unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.coef;
            for (xi, &e) in x.iter().zip(&t.exps) {
                v *= ipow(*xi, e);
            }
            acc += v;
        }
        acc
    }
}

/// A polynomial self-map of `ℝⁿ`, one component per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    var_names: Vec<String>,
    components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(var_names: Vec<String>, components: Vec<Poly>) -> Result<PolyMap> {
        let n = var_names.len();
        if n == 0 {
            return Err(Error::InvalidParameter("map needs at least one variable".into()));
        }
        if components.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: components.len() });
        }
        if let Some(bad) = components.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
        }
        Ok(PolyMap { var_names, components })
    }

    /// Convenience constructor with variables named `x1..xn`.
    pub fn from_components(components: Vec<Poly>) -> Result<PolyMap> {
        let names = (1..=components.len()).map(|i| alloc::format!("x{i}")).collect();
        PolyMap::new(names, components)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x);
        }
    }

    /// `Err(NotCenteredAtOrigin)` unless every component has zero constant term.
    pub fn ensure_centered(&self) -> Result<()> {
        for (i, c) in self.components.iter().enumerate() {
            let k = c.constant();
            if k != 0.0 {
                return Err(Error::NotCenteredAtOrigin { component: i, constant: k });
            }
        }
        Ok(())
    }

    /// `∂₀f`: entry `(i, k)` is the coefficient of `x_k` in component `i`.
    pub fn jacobian_at_zero(&self) -> Result<Matrix> {
        self.ensure_centered()?;
        let n = self.dim();
        let mut a = Matrix::zeros(n);
        for (i, c) in self.components.iter().enumerate() {
            for t in c.terms() {
                if t.degree() == 1 {
                    let k = t.exps.iter().position(|&e| e == 1).unwrap();
                    a[(i, k)] = t.coef;
                }
            }
        }
        Ok(a)
    }

    /// The map `αf`.
    pub fn scaled(&self, alpha: f64) -> PolyMap {
        let components = self
            .components
            .iter()
            .map(|c| Poly {
                n: c.n,
                terms: c
                    .terms
                    .iter()
                    .filter(|t| t.coef * alpha != 0.0)
                    .map(|t| Term { exps: t.exps.clone(), coef: t.coef * alpha })
                    .collect(),
            })
            .collect();
        PolyMap { var_names: self.var_names.clone(), components }
    }

    /// The conjugate `x ↦ f(s·x)/s`.
    pub fn conjugate_scale(&self, s: f64) -> PolyMap {
        let components = self
            .components
            .iter()
            .map(|c| Poly {
                n: c.n,
                terms: c
                    .terms
                    .iter()
                    .map(|t| Term {
                        exps: t.exps.clone(),
                        coef: t.coef * libm::pow(s, t.degree() as f64 - 1.0),
                    })
                    .collect(),
            })
            .collect();
        PolyMap { var_names: self.var_names.clone(), components }
    }

    /// `f(y) = g(y + x0) - x0`, expanded exactly.
    ///
    /// `tol` defaults to `1e-9·(1 + ‖x0‖)`. Constant terms at or below
    /// `max(tol, 1e-12·scale)` are snapped to zero, where `scale` is the
    /// largest coefficient magnitude of the result.
    pub fn shift_to_origin(&self, x0: &[f64], tol: Option<f64>) -> Result<PolyMap> {
        let n = self.dim();
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
        }
        let tol = tol.unwrap_or_else(|| 1e-9 * (1.0 + norm2(x0)));
        let gx = self.eval(x0);
        let residual = libm::sqrt(gx.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum());
        if residual.is_nan() || residual > tol {
            return Err(Error::FixedPointMismatch { residual });
        }
        let mut components = Vec::with_capacity(n);
        for (i, g) in self.components.iter().enumerate() {
            let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            for t in g.terms() {
                // expand Π (y_k + x0_k)^{e_k}
                let mut partial: Vec<(Vec<u32>, f64)> = vec![(vec![0; n], t.coef)];
                for (k, &e) in t.exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                    for (ex, c) in &partial {
                        for a in 0..=e {
                            let w = binomial(e as usize, a as usize) as f64
                                * ipow(x0[k], e - a);
                            if w == 0.0 {
                                continue;
                            }
                            let mut ex2 = ex.clone();
                            ex2[k] = a;
                            next.push((ex2, c * w));
                        }
                    }
                    partial = next;
                }
                for (ex, c) in partial {
                    *acc.entry(ex).or_insert(0.0) += c;
                }
            }
            *acc.entry(vec![0; n]).or_insert(0.0) -= x0[i];
            let scale = acc.values().fold(0.0f64, |m, v| m.max(v.abs()));
            let snap = tol.max(1e-12 * scale);
            if let Some(c0) = acc.get_mut(&vec![0; n]) {
                if c0.abs() <= snap {
                    *c0 = 0.0;
                }
            }
            components.push(Poly::from_terms(n, acc)?);
        }
        PolyMap::new(self.var_names.clone(), components)
    }

    /// Bound on the operator norm of the Jacobian of the nonlinear part on
    /// the ball of radius `delta`, from coefficient sums.
    pub fn nonlinear_lipschitz(&self, delta: f64) -> f64 {
        let mut s = 0.0;
        for c in &self.components {
            for t in c.terms() {
                let d = t.degree();
                if d >= 2 {
                    s += t.coef.abs() * d as f64 * libm::pow(delta, (d - 1) as f64);
                }
            }
        }
        s
    }
}

#[inline]
pub fn ipow(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => {
            let mut acc = 1.0;
            for _ in 0..e {
                acc *= x;
            }
            acc
        }
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}
