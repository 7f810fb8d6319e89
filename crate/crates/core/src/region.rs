//! Region estimates from the root test on the top homogeneous layer of an
//! embryo, and boxed rasters of membership labels.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtFloat;
use crate::monomial::unrank;
use crate::series::TruncatedSeries;

/// Layers whose largest coefficient is at or below this are treated as zero.
pub const COEFFICIENT_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerRule {
    /// Highest nonzero layer only.
    Top,
    /// Member iff the root test passes on each of the top `L` nonzero layers.
    TopL(usize),
}

impl Default for LayerRule {
    fn default() -> Self {
        LayerRule::Top
    }
}

/// One homogeneous layer prepared for repeated radicand evaluation.
#[derive(Clone, Debug, PartialEq)]
struct RootLayer {
    degree: usize,
    exps: Vec<Vec<u32>>,
    ln_abs: Vec<f64>,
}

impl RootLayer {
    fn new(v: &TruncatedSeries, m: usize) -> RootLayer {
        let n = v.dim();
        let mut exps = Vec::new();
        let mut ln_abs = Vec::new();
        for (r, c) in v.layer(m).iter() {
            let mut e = vec![0u32; n];
            unrank(n, m, r, &mut e);
            exps.push(e);
            ln_abs.push(c.ln_abs());
        }
        RootLayer { degree: m, exps, ln_abs }
    }

    /// `ln Σ |B_j| |d|^j` given `ln |d_i|` (−∞ for zero components).
    fn ln_radicand(&self, ln_d: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut vals = Vec::with_capacity(self.exps.len());
        for (e, &lb) in self.exps.iter().zip(&self.ln_abs) {
            let mut s = lb;
            for (&k, &l) in e.iter().zip(ln_d) {
                if k > 0 {
                    s += k as f64 * l;
                }
            }
            if s > best {
                best = s;
            }
            vals.push(s);
        }
        if best == f64::NEG_INFINITY {
            return best;
        }
        let sum: f64 = vals.iter().map(|&s| libm::exp(s - best)).sum();
        best + libm::log(sum)
    }
}

fn ln_offsets(center: &[f64], x: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(center)
        .map(|(xi, ci)| libm::log(libm::fabs(xi - ci)))
        .collect()
}

fn effective_layers(v: &TruncatedSeries, count: usize) -> Vec<usize> {
    let floor = ExtFloat::from_f64(COEFFICIENT_FLOOR);
    (0..=v.max_degree())
        .rev()
        .filter(|&m| m > 0 && !v.layer(m).is_empty() && v.layer(m).max_abs() > floor)
        .take(count)
        .collect()
}

/// `D = {x : radicand(x)^(1/p′) < 1}` for the embryo it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionEstimate {
    center: Vec<f64>,
    degree: usize,
    rule: LayerRule,
    layers: Vec<RootLayer>,
}

impl RegionEstimate {
    pub fn new(v: &TruncatedSeries, rule: LayerRule) -> Result<RegionEstimate> {
        let count = match rule {
            LayerRule::Top => 1,
            LayerRule::TopL(0) => {
                return Err(Error::InvalidParameter("TopL needs at least one layer".into()))
            }
            LayerRule::TopL(l) => l,
        };
        let ms = effective_layers(v, count);
        if ms.is_empty() {
            return Err(Error::EmptyLayer { layer: v.max_degree() });
        }
        Ok(RegionEstimate {
            center: v.center().to_vec(),
            degree: v.max_degree(),
            rule,
            layers: ms.into_iter().map(|m| RootLayer::new(v, m)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Truncation degree `p` of the source embryo.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rule(&self) -> LayerRule {
        self.rule
    }

    /// `p′`, the highest nonzero layer used by the test.
    pub fn effective_layer(&self) -> usize {
        self.layers[0].degree
    }

    pub fn layers_used(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.degree).collect()
    }

    /// Largest `(1/m) ln radicand_m(x)` over the layers in use; the point is a
    /// member iff this is negative.
    pub fn ln_root(&self, x: &[f64]) -> f64 {
        let ln_d = ln_offsets(&self.center, x);
        self.layers
            .iter()
            .map(|l| l.ln_radicand(&ln_d) / l.degree as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.ln_root(x) < 0.0
    }

    /// Distance from the center to the boundary along the unit direction
    /// `u`. Each layer is homogeneous in `x − c`, so the boundary is at
    /// `t = radicand(c + u)^(−1/m)`.
    pub fn ray_boundary(&self, u: &[f64]) -> f64 {
        let ln_u: Vec<f64> = u.iter().map(|v| libm::log(libm::fabs(*v))).collect();
        let worst = self
            .layers
            .iter()
            .map(|l| l.ln_radicand(&ln_u) / l.degree as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        libm::exp(-worst)
    }
}

/// `Σ_{|j|=p′} |B_j| |x − c|^j` in extended range.
pub fn radicand(v: &TruncatedSeries, layer: usize, x: &[f64]) -> Result<ExtFloat> {
    if layer > v.max_degree() || v.layer(layer).is_empty() {
        return Err(Error::EmptyLayer { layer });
    }
    if x.len() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: x.len() });
    }
    let l = RootLayer::new(v, layer);
    Ok(ExtFloat::from_ln(l.ln_radicand(&ln_offsets(v.center(), x))))
}

/// `(c − r, c + r)` with `r = |B_{p′}|^(−1/p′)`.
pub fn interval_estimate_1d(v: &TruncatedSeries) -> Result<(f64, f64)> {
    if v.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: v.dim() });
    }
    let est = RegionEstimate::new(v, LayerRule::Top)?;
    Ok(est.interval())
}

impl RegionEstimate {
    /// Endpoints of a one-dimensional estimate.
    pub fn interval(&self) -> (f64, f64) {
        let c = self.center[0];
        let r = self.ray_boundary(&[1.0]);
        (c - r, c + r)
    }
}

/// Axis-aligned box split into `res[i]` cells per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>) -> Result<Grid> {
        if lo.len() != hi.len() || lo.len() != res.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len().min(res.len()) });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::DegenerateBox);
        }
        if res.iter().any(|&r| r < 2) {
            return Err(Error::InvalidParameter("resolution must be at least 2 per axis".into()));
        }
        Ok(Grid { lo, hi, res })
    }

    /// Same resolution on every axis.
    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>, res: usize) -> Result<Grid> {
        let n = lo.len();
        Grid::new(lo, hi, vec![res; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn res(&self) -> &[usize] {
        &self.res
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_width(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.res[axis] as f64
    }

    /// Per-axis indices of flat cell `k`; the first axis varies fastest.
    pub fn indices(&self, mut k: usize, out: &mut [usize]) {
        for (o, &r) in out.iter_mut().zip(&self.res) {
            *o = k % r;
            k /= r;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.res).rev().fold(0, |acc, (&i, &r)| acc * r + i)
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.cell_width(axis)
    }

    /// Center of flat cell `k`.
    pub fn cell_center(&self, k: usize, out: &mut [f64]) {
        let mut k = k;
        for axis in 0..self.dim() {
            let r = self.res[axis];
            out[axis] = self.coordinate(axis, k % r);
            k /= r;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    NonMember = 0,
    Member = 1,
    Undecided = 2,
}

impl Label {
    pub const ESCAPED: Label = Label::NonMember;
    pub const CONVERGED: Label = Label::Member;

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<Label> {
        match c {
            0 => Some(Label::NonMember),
            1 => Some(Label::Member),
            2 => Some(Label::Undecided),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasinRaster {
    grid: Grid,
    labels: Vec<Label>,
}

impl BasinRaster {
    pub fn new(grid: Grid, labels: Vec<Label>) -> Result<BasinRaster> {
        if labels.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(BasinRaster { grid, labels })
    }

    pub fn filled(grid: Grid, label: Label) -> BasinRaster {
        let labels = vec![label; grid.len()];
        BasinRaster { grid, labels }
    }

    /// Label every cell center with `f`, in flat order.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Label) -> BasinRaster {
        let mut x = vec![0.0; grid.dim()];
        let labels = (0..grid.len())
            .map(|k| {
                grid.cell_center(k, &mut x);
                f(&x)
            })
            .collect();
        BasinRaster { grid, labels }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, idx: &[usize]) -> Label {
        self.labels[self.grid.flat_index(idx)]
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

pub fn grid_scan(estimate: &RegionEstimate, grid: &Grid) -> Result<BasinRaster> {
    if grid.dim() != estimate.dim() {
        return Err(Error::DimensionMismatch { expected: estimate.dim(), found: grid.dim() });
    }
    Ok(BasinRaster::from_fn(grid.clone(), |x| {
        if estimate.contains(x) {
            Label::Member
        } else {
            Label::NonMember
        }
    }))
}

/// Cellwise OR of `Member`. A cell that is a member nowhere keeps
/// `Undecided` if any input has it there.
pub fn union(rasters: &[BasinRaster]) -> Result<BasinRaster> {
    let first = rasters
        .first()
        .ok_or_else(|| Error::InvalidParameter("union of no rasters".into()))?;
    if rasters.iter().any(|r| r.grid != first.grid) {
        return Err(Error::GridMismatch);
    }
    let labels = (0..first.labels.len())
        .map(|k| {
            let mut out = Label::NonMember;
            for r in rasters {
                match r.labels[k] {
                    Label::Member => return Label::Member,
                    Label::Undecided => out = Label::Undecided,
                    Label::NonMember => {}
                }
            }
            out
        })
        .collect();
    Ok(BasinRaster { grid: first.grid.clone(), labels })
}
