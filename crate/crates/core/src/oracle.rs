//! Ground truth by iterating the map: trap ball, escape radius, iteration cap.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::polymap::PolyMap;
use crate::region::{BasinRaster, Grid, Label};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitParams {
    pub trap_radius: f64,
    pub escape_radius: f64,
    pub max_iters: usize,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams { trap_radius: 1e-6, escape_radius: 1e6, max_iters: 10_000 }
    }
}

impl OrbitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.trap_radius > 0.0 && self.trap_radius < self.escape_radius) || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "orbit parameters need 0 < trap < escape and at least one iteration".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    Converged,
    Escaped,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub iterations: usize,
}

impl Verdict {
    pub fn label(&self) -> Label {
        match self.kind {
            VerdictKind::Converged => Label::CONVERGED,
            VerdictKind::Escaped => Label::ESCAPED,
            VerdictKind::Undecided => Label::Undecided,
        }
    }
}

/// Trap ball actually used, and whether its invariance could be checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trap {
    pub radius: f64,
    /// Contraction factor `‖A‖ + L·δ` on the ball when verified.
    pub factor: f64,
    pub verified: bool,
}

/// Halve `delta` (at most 20 times) until `‖∂₀f‖ + L(δ)·δ < 1`, where `L`
/// bounds the derivative of the nonlinear part divided by `δ`.
pub fn validate_trap(f: &PolyMap, delta: f64) -> Trap {
    let norm = match f.jacobian_at_zero() {
        Ok(a) => a.spectral_norm(),
        Err(_) => return Trap { radius: delta, factor: f64::INFINITY, verified: false },
    };
    let mut d = delta;
    for _ in 0..=20 {
        let factor = norm + f.nonlinear_lipschitz(d);
        if factor < 1.0 {
            return Trap { radius: d, factor, verified: true };
        }
        d *= 0.5;
    }
    Trap { radius: delta, factor: norm + f.nonlinear_lipschitz(delta), verified: false }
}

/// Iterate `g` from `x` and watch the distance to `fixed`.
fn run(g: &PolyMap, x: &[f64], fixed: &[f64], trap: f64, params: &OrbitParams) -> Verdict {
    let n = x.len();
    let mut cur: Vec<f64> = x.to_vec();
    let mut next = alloc::vec![0.0; n];
    let dist = |p: &[f64]| -> f64 {
        let mut s = 0.0;
        for (a, b) in p.iter().zip(fixed) {
            s += (a - b) * (a - b);
        }
        libm::sqrt(s)
    };
    for k in 0..=params.max_iters {
        if cur.iter().any(|v| !v.is_finite()) {
            return Verdict { kind: VerdictKind::Escaped, iterations: k };
        }
        let d = dist(&cur);
        if d <= trap {
            return Verdict { kind: VerdictKind::Converged, iterations: k };
        }
        if d > params.escape_radius {
            return Verdict { kind: VerdictKind::Escaped, iterations: k };
        }
        if k == params.max_iters {
            break;
        }
        g.eval_into(&cur, &mut next);
        core::mem::swap(&mut cur, &mut next);
    }
    Verdict { kind: VerdictKind::Undecided, iterations: params.max_iters }
}

pub fn classify(f: &PolyMap, x: &[f64], params: &OrbitParams) -> Verdict {
    let trap = validate_trap(f, params.trap_radius);
    classify_with_trap(f, x, params, &trap)
}

pub fn classify_with_trap(f: &PolyMap, x: &[f64], params: &OrbitParams, trap: &Trap) -> Verdict {
    let zero = alloc::vec![0.0; x.len()];
    run(f, x, &zero, trap.radius, params)
}

/// Classify `x` for an uncentered map `g` against its fixed point `x0`.
/// The trap is validated on the recentered map.
pub fn classify_about(g: &PolyMap, x: &[f64], x0: &[f64], params: &OrbitParams) -> Result<Verdict> {
    let f = g.shift_to_origin(x0, None)?;
    let trap = validate_trap(&f, params.trap_radius);
    Ok(run(g, x, x0, trap.radius, params))
}

pub fn basin_grid(f: &PolyMap, grid: &Grid, params: &OrbitParams) -> Result<BasinRaster> {
    params.validate()?;
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: grid.dim() });
    }
    let trap = validate_trap(f, params.trap_radius);
    Ok(BasinRaster::from_fn(grid.clone(), |x| classify_with_trap(f, x, params, &trap).label()))
}

/// Published basins of Examples 1 to 3.
pub fn analytic_da(example_id: u32) -> Result<fn(&[f64]) -> bool> {
    fn ex1(x: &[f64]) -> bool {
        x[0] > -0.271845 && x[0] < 0.653564
    }
    fn ex2(x: &[f64]) -> bool {
        x[0] * x[0] + x[1] * x[1] < 3.0
    }
    fn ex3(x: &[f64]) -> bool {
        x[0].abs() < 0.5 && x[1].abs() < 1.0 / 3.0
    }
    match example_id {
        1 => Ok(ex1),
        2 => Ok(ex2),
        3 => Ok(ex3),
        id => Err(Error::UnknownExample(id)),
    }
}

pub fn analytic_raster(example_id: u32, grid: &Grid) -> Result<BasinRaster> {
    let pred = analytic_da(example_id)?;
    let dim = if example_id == 1 { 1 } else { 2 };
    if grid.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: grid.dim() });
    }
    Ok(BasinRaster::from_fn(grid.clone(), |x| if pred(x) { Label::CONVERGED } else { Label::ESCAPED }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub false_inclusion_rate: f64,
    pub coverage: f64,
    /// Cells where both rasters are decided and disagree, over decided cells.
    pub disagreement: f64,
}

pub fn compare(estimate: &BasinRaster, truth: &BasinRaster) -> Result<Comparison> {
    if estimate.grid() != truth.grid() {
        return Err(Error::GridMismatch);
    }
    let (mut members, mut false_in, mut conv, mut covered) = (0usize, 0usize, 0usize, 0usize);
    let (mut decided, mut differ) = (0usize, 0usize);
    for (&e, &t) in estimate.labels().iter().zip(truth.labels()) {
        if t == Label::Undecided {
            continue;
        }
        let em = e == Label::Member;
        let tc = t == Label::CONVERGED;
        if em {
            members += 1;
            if !tc {
                false_in += 1;
            }
        }
        if tc {
            conv += 1;
            if em {
                covered += 1;
            }
        }
        if e != Label::Undecided {
            decided += 1;
            if em != tc {
                differ += 1;
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(Comparison {
        false_inclusion_rate: ratio(false_in, members),
        coverage: ratio(covered, conv),
        disagreement: ratio(differ, decided),
    })
}
