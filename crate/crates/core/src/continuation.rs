//! Gradual extension of the estimate: re-expand the embryo at points near
//! the current boundary where `|V|` is still small, and take the union.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dense::{eval_poly, Ctx, Dense};
use crate::error::{Error, Result};
use crate::ext::ExtFloat;
use crate::lyapunov::{solve_embryo, EmbryoMethod};
use crate::polymap::PolyMap;
use crate::region::{union, BasinRaster, Grid, LayerRule, RegionEstimate, grid_scan};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReexpandMethod {
    /// Taylor-shift the polynomial embryo to the new center.
    ShiftEmbryo,
    /// Expand `Σ_{k=0}^{K} ‖f^k(x)‖²` directly around the new center.
    OrbitSum(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationParams {
    /// Fraction of the ray length by which boundary samples are pulled in.
    pub margin: f64,
    /// Cap on `|V|` at an accepted center; `None` derives it from step 0.
    pub v_max: Option<f64>,
    /// `None` means 2 in one dimension and 8 otherwise.
    pub candidates_per_step: Option<usize>,
    pub max_steps: usize,
    pub reexpand: ReexpandMethod,
    pub rule: LayerRule,
}

impl Default for ContinuationParams {
    fn default() -> Self {
        ContinuationParams {
            margin: 1e-3,
            v_max: None,
            candidates_per_step: None,
            max_steps: 1,
            reexpand: ReexpandMethod::ShiftEmbryo,
            rule: LayerRule::Top,
        }
    }
}

impl ContinuationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return Err(Error::InvalidParameter("margin must lie in (0, 1)".into()));
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter("v_max must be positive".into()));
            }
        }
        if self.candidates_per_step == Some(0) {
            return Err(Error::InvalidParameter("need at least one candidate per step".into()));
        }
        if self.reexpand == ReexpandMethod::OrbitSum(0) {
            return Err(Error::InvalidParameter("orbit sum needs K >= 1".into()));
        }
        Ok(())
    }

    fn candidates(&self, dim: usize) -> usize {
        self.candidates_per_step.unwrap_or(if dim == 1 { 2 } else { 8 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxSteps,
    NoAdmissibleCenter,
    UserCenterListExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub index: usize,
    /// Extension round; step 0 is round 0.
    pub round: usize,
    /// Step whose embryo was re-expanded.
    pub parent: Option<usize>,
    pub center: Vec<f64>,
    /// `|V_parent(center)|`, zero for step 0.
    pub v_at_center: f64,
    /// Whether the center lay inside the parent's estimate.
    pub inside_parent: bool,
    pub embryo: TruncatedSeries,
    pub estimate: RegionEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationReport {
    pub steps: Vec<StepRecord>,
    pub stop: StopReason,
    /// Center-acceptance cap actually used.
    pub v_max: f64,
}

impl ContinuationReport {
    pub fn union_contains(&self, x: &[f64]) -> bool {
        self.steps.iter().any(|s| s.estimate.contains(x))
    }

    pub fn step_rasters(&self, grid: &Grid) -> Result<Vec<BasinRaster>> {
        self.steps.iter().map(|s| grid_scan(&s.estimate, grid)).collect()
    }

    pub fn union_raster(&self, grid: &Grid) -> Result<BasinRaster> {
        union(&self.step_rasters(grid)?)
    }

    /// Hull of a one-dimensional union, assuming it is an interval.
    pub fn union_interval(&self) -> Option<(f64, f64)> {
        if self.steps.first()?.estimate.dim() != 1 {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.steps {
            let (a, b) = s.estimate.interval();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        Some((lo, hi))
    }
}

/// Fixed sampling directions: the two axis ends in 1-D, 64 equally spaced
/// angles in 2-D, a 128-point Fibonacci sphere in 3-D and above (padded
/// with zeros beyond the third axis).
pub fn ray_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 64.0;
                vec![libm::cos(t), libm::sin(t)]
            })
            .collect(),
        _ => {
            let count = 128;
            let golden = PI * (3.0 - libm::sqrt(5.0));
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = libm::sqrt(1.0 - z * z);
                    let phi = golden * k as f64;
                    let mut u = vec![0.0; dim];
                    u[0] = r * libm::cos(phi);
                    u[1] = r * libm::sin(phi);
                    u[2] = z;
                    u
                })
                .collect()
        }
    }
}

fn along(c: &[f64], u: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(u).map(|(ci, ui)| ci + t * ui).collect()
}

/// Ten times the median of `|V|` over the inner half of `est`, sampled at
/// eight radii along each sampling ray.
pub fn default_v_max(est: &RegionEstimate, v: &TruncatedSeries) -> f64 {
    let c = est.center();
    let mut vals = Vec::new();
    for u in ray_directions(est.dim()) {
        let t = est.ray_boundary(&u);
        if !t.is_finite() {
            continue;
        }
        for k in 0..8 {
            let s = 0.5 * t * (k as f64 + 0.5) / 8.0;
            vals.push(v.eval(&along(c, &u, s)).abs().to_f64());
        }
    }
    if vals.is_empty() {
        return f64::INFINITY;
    }
    vals.sort_by(f64::total_cmp);
    let mid = vals.len() / 2;
    let median = if vals.len() % 2 == 0 { 0.5 * (vals[mid - 1] + vals[mid]) } else { vals[mid] };
    10.0 * median
}

/// A boundary-adjacent point with the value of the embryo there.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub point: Vec<f64>,
    pub v_abs: f64,
}

fn candidates(
    union_steps: &[&RegionEstimate],
    est: &RegionEstimate,
    v: &TruncatedSeries,
    margin: f64,
    v_max: f64,
) -> Vec<Candidate> {
    let c = est.center();
    let mut out = Vec::new();
    for u in ray_directions(est.dim()) {
        let t = est.ray_boundary(&u);
        if !t.is_finite() || t <= 0.0 {
            continue;
        }
        // beyond this boundary point the union already covers the ray
        let outside = along(c, &u, (1.0 + margin) * t);
        if union_steps.iter().any(|e| e.contains(&outside)) {
            continue;
        }
        let x = along(c, &u, (1.0 - margin) * t);
        let val = v.eval(&x).abs().to_f64();
        if val <= v_max && val.is_finite() {
            out.push(Candidate { point: x, v_abs: val });
        }
    }
    out
}

fn rank_candidates(mut cands: Vec<Candidate>, keep: usize) -> Vec<Candidate> {
    // stable sort keeps the fixed sampling order among ties
    cands.sort_by(|a, b| a.v_abs.total_cmp(&b.v_abs));
    cands.dedup_by(|a, b| a.point == b.point);
    cands.truncate(keep);
    cands
}

/// Boundary points of `current`, pulled in by `1 − margin`, whose `|V|` is
/// at most the cap and which are not already covered by `union_steps`,
/// in ascending order of `|V|`.
pub fn select_centers(
    union_steps: &[RegionEstimate],
    current: &RegionEstimate,
    v: &TruncatedSeries,
    params: &ContinuationParams,
) -> Vec<Vec<f64>> {
    let v_max = params.v_max.unwrap_or_else(|| default_v_max(current, v));
    let refs: Vec<&RegionEstimate> = union_steps.iter().collect();
    let cands = candidates(&refs, current, v, params.margin, v_max);
    rank_candidates(cands, params.candidates(current.dim()))
        .into_iter()
        .map(|c| c.point)
        .collect()
}

/// `Σ_{k=0}^{K} ‖f^k(x)‖²` as a degree-`p` series in `x − center`.
pub fn orbit_sum_expansion(f: &PolyMap, center: &[f64], p: usize, terms: usize) -> Result<TruncatedSeries> {
    let n = f.dim();
    if center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: center.len() });
    }
    let ctx = Ctx::new(n, p);
    let mut g: Vec<Dense> = (0..n)
        .map(|i| {
            let mut d = Dense::zeros(&ctx, 0, p);
            let mut e = vec![0u32; n];
            d.set(0, ExtFloat::from_f64(center[i]));
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
        for gi in &g {
            total.add_assign(&gi.mul(&ctx, gi, p));
        }
    }
    Ok(TruncatedSeries::from_dense(&ctx, center.to_vec(), &total))
}

pub fn extend_step(
    v: &TruncatedSeries,
    f: &PolyMap,
    center: &[f64],
    p: usize,
    method: ReexpandMethod,
    rule: LayerRule,
) -> Result<(TruncatedSeries, RegionEstimate)> {
    if p < 2 {
        return Err(Error::InvalidParameter("degree must be at least 2".into()));
    }
    if center.len() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: center.len() });
    }
    let w = match method {
        ReexpandMethod::ShiftEmbryo => v.with_max_degree(p).taylor_shift(center),
        ReexpandMethod::OrbitSum(k) => orbit_sum_expansion(f, center, p, k)?,
    };
    let est = RegionEstimate::new(&w, rule)?;
    Ok((w, est))
}

fn step_zero(v: TruncatedSeries, rule: LayerRule) -> Result<StepRecord> {
    let estimate = RegionEstimate::new(&v, rule)?;
    Ok(StepRecord {
        index: 0,
        round: 0,
        parent: None,
        center: v.center().to_vec(),
        v_at_center: 0.0,
        inside_parent: true,
        embryo: v,
        estimate,
    })
}

pub fn run_auto(
    f: &PolyMap,
    p: usize,
    params: &ContinuationParams,
    centers_override: Option<&[Vec<f64>]>,
) -> Result<ContinuationReport> {
    let v0 = solve_embryo(f, p, EmbryoMethod::PerDegreeSolve)?;
    run_from(f, v0, params, centers_override)
}

/// Continuation from an already computed origin embryo.
pub fn run_from(
    f: &PolyMap,
    v0: TruncatedSeries,
    params: &ContinuationParams,
    centers_override: Option<&[Vec<f64>]>,
) -> Result<ContinuationReport> {
    params.validate()?;
    let p = v0.max_degree();
    let first = step_zero(v0, params.rule)?;
    let v_max = params.v_max.unwrap_or_else(|| default_v_max(&first.estimate, &first.embryo));
    let mut steps = vec![first];

    if let Some(centers) = centers_override {
        let mut stop = StopReason::UserCenterListExhausted;
        for (k, c) in centers.iter().enumerate() {
            if k == params.max_steps {
                stop = StopReason::MaxSteps;
                break;
            }
            let parent = steps
                .iter()
                .rposition(|s| s.estimate.contains(c))
                .unwrap_or(steps.len() - 1);
            let inside = steps[parent].estimate.contains(c);
            let v_at = steps[parent].embryo.eval(c).abs().to_f64();
            let (w, est) =
                extend_step(&steps[parent].embryo, f, c, p, params.reexpand, params.rule)?;
            let index = steps.len();
            steps.push(StepRecord {
                index,
                round: k + 1,
                parent: Some(parent),
                center: c.clone(),
                v_at_center: v_at,
                inside_parent: inside,
                embryo: w,
                estimate: est,
            });
        }
        return Ok(ContinuationReport { steps, stop, v_max });
    }

    let keep = params.candidates(steps[0].estimate.dim());
    let mut frontier = vec![0usize];
    for round in 1..=params.max_steps {
        let covered: Vec<&RegionEstimate> = steps.iter().map(|s| &s.estimate).collect();
        let mut pool: Vec<(Candidate, usize)> = Vec::new();
        for &s in &frontier {
            let st = &steps[s];
            for c in candidates(&covered, &st.estimate, &st.embryo, params.margin, v_max) {
                pool.push((c, s));
            }
        }
        pool.sort_by(|a, b| a.0.v_abs.total_cmp(&b.0.v_abs));
        pool.dedup_by(|a, b| a.0.point == b.0.point);
        pool.truncate(keep);
        if pool.is_empty() {
            return Ok(ContinuationReport { steps, stop: StopReason::NoAdmissibleCenter, v_max });
        }
        let mut next = Vec::new();
        for (cand, parent) in pool {
            let (w, est) = extend_step(
                &steps[parent].embryo,
                f,
                &cand.point,
                p,
                params.reexpand,
                params.rule,
            )?;
            let index = steps.len();
            steps.push(StepRecord {
                index,
                round,
                parent: Some(parent),
                center: cand.point,
                v_at_center: cand.v_abs,
                inside_parent: true,
                embryo: w,
                estimate: est,
            });
            next.push(index);
        }
        frontier = next;
    }
    Ok(ContinuationReport { steps, stop: StopReason::MaxSteps, v_max })
}
