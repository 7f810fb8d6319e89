//! Raster files (CSV and PGM) and parallel cell labelling.

use std::fmt::Write as _;

use anyhow::{anyhow, ensure, Context, Result};
use daest_core::oracle::{classify_with_trap, validate_trap, OrbitParams};
use daest_core::{BasinRaster, Grid, Label, PolyMap, RegionEstimate};
use rayon::prelude::*;

/// Label every cell center with `f`, cells evaluated in parallel. The
/// result does not depend on the thread count.
pub fn par_raster<F>(grid: &Grid, f: F) -> BasinRaster
where
    F: Fn(&[f64]) -> Label + Sync,
{
    let labels: Vec<Label> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; grid.dim()],
            |x, k| {
                grid.cell_center(k, x);
                f(x)
            },
        )
        .collect();
    BasinRaster::new(grid.clone(), labels).expect("one label per cell")
}

pub fn scan(estimate: &RegionEstimate, grid: &Grid) -> BasinRaster {
    par_raster(grid, |x| if estimate.contains(x) { Label::Member } else { Label::NonMember })
}

pub fn scan_union(estimates: &[&RegionEstimate], grid: &Grid) -> BasinRaster {
    par_raster(grid, |x| {
        if estimates.iter().any(|e| e.contains(x)) {
            Label::Member
        } else {
            Label::NonMember
        }
    })
}

pub fn oracle(f: &PolyMap, grid: &Grid, params: &OrbitParams) -> Result<BasinRaster> {
    params.validate()?;
    ensure!(grid.dim() == f.dim(), "grid has dimension {}, map has {}", grid.dim(), f.dim());
    let trap = validate_trap(f, params.trap_radius);
    Ok(par_raster(grid, |x| classify_with_trap(f, x, params, &trap).label()))
}

/// Header line of names, a line of box bounds and resolutions, then one
/// `i1,...,in,label` line per cell with the first index varying fastest.
pub fn write_csv(r: &BasinRaster) -> String {
    let g = r.grid();
    let n = g.dim();
    let mut out = String::new();
    let mut names: Vec<String> = Vec::new();
    let mut values: Vec<String> = Vec::new();
    for k in 0..n {
        names.push(format!("x{}_lo", k + 1));
        names.push(format!("x{}_hi", k + 1));
        values.push(format!("{:?}", g.lo()[k]));
        values.push(format!("{:?}", g.hi()[k]));
    }
    for k in 0..n {
        names.push(format!("res{}", k + 1));
        values.push(g.res()[k].to_string());
    }
    let _ = writeln!(out, "{}", names.join(","));
    let _ = writeln!(out, "{}", values.join(","));
    let mut idx = vec![0usize; n];
    for (k, l) in r.labels().iter().enumerate() {
        g.indices(k, &mut idx);
        for i in &idx {
            let _ = write!(out, "{i},");
        }
        let _ = writeln!(out, "{}", l.code());
    }
    out
}

pub fn read_csv(text: &str) -> Result<BasinRaster> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, names) = lines.next().ok_or_else(|| anyhow!("empty raster file"))?;
    let cols = names.split(',').count();
    ensure!(cols % 3 == 0 && cols > 0, "header must hold lo, hi and resolution per axis");
    let n = cols / 3;
    let (ln, values) = lines.next().ok_or_else(|| anyhow!("missing box line"))?;
    let vals: Vec<&str> = values.split(',').map(str::trim).collect();
    ensure!(vals.len() == cols, "line {}: expected {cols} fields", ln + 1);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for k in 0..n {
        lo.push(vals[2 * k].parse::<f64>().with_context(|| format!("line {}: bad bound", ln + 1))?);
        hi.push(vals[2 * k + 1].parse::<f64>().with_context(|| format!("line {}: bad bound", ln + 1))?);
    }
    let res: Vec<usize> = vals[2 * n..]
        .iter()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("line {}: bad resolution", ln + 1))?;
    let grid = Grid::new(lo, hi, res)?;
    let mut labels = vec![Label::Undecided; grid.len()];
    let mut seen = vec![false; grid.len()];
    let mut idx = vec![0usize; n];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split(',').map(str::trim).collect();
        ensure!(toks.len() == n + 1, "line {}: expected {} fields", ln + 1, n + 1);
        for k in 0..n {
            idx[k] = toks[k].parse().with_context(|| format!("line {}: bad index", ln + 1))?;
            ensure!(idx[k] < grid.res()[k], "line {}: index out of range", ln + 1);
        }
        let code: u8 = toks[n].parse().with_context(|| format!("line {}: bad label", ln + 1))?;
        let label = Label::from_code(code).ok_or_else(|| anyhow!("line {}: unknown label {code}", ln + 1))?;
        let flat = grid.flat_index(&idx);
        ensure!(!seen[flat], "line {}: cell listed twice", ln + 1);
        seen[flat] = true;
        labels[flat] = label;
    }
    ensure!(seen.iter().all(|&s| s), "raster lists {} of {} cells", seen.iter().filter(|&&s| s).count(), grid.len());
    Ok(BasinRaster::new(grid, labels)?)
}

/// Plain PGM of a 2-D raster: members black, non-members white, undecided
/// grey; the top row is the largest second coordinate.
pub fn write_pgm(r: &BasinRaster) -> Result<String> {
    let g = r.grid();
    ensure!(g.dim() == 2, "PGM export needs a 2-D raster");
    let (w, h) = (g.res()[0], g.res()[1]);
    let mut out = format!("P2\n{w} {h}\n255\n");
    for j in (0..h).rev() {
        let row: Vec<&str> = (0..w)
            .map(|i| match r.label(&[i, j]) {
                Label::Member => "0",
                Label::NonMember => "255",
                Label::Undecided => "128",
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    Ok(out)
}

/// 2-D slice of a raster through cell `index` of `axis`, keeping the other
/// axes in order.
pub fn slice(r: &BasinRaster, axis: usize, index: usize) -> Result<BasinRaster> {
    let g = r.grid();
    ensure!(axis < g.dim(), "slice axis {axis} out of range");
    ensure!(index < g.res()[axis], "slice index {index} out of range");
    let keep: Vec<usize> = (0..g.dim()).filter(|&k| k != axis).collect();
    let grid = Grid::new(
        keep.iter().map(|&k| g.lo()[k]).collect(),
        keep.iter().map(|&k| g.hi()[k]).collect(),
        keep.iter().map(|&k| g.res()[k]).collect(),
    )?;
    let mut sub = vec![0usize; keep.len()];
    let mut full = vec![0usize; g.dim()];
    let labels = (0..grid.len())
        .map(|k| {
            grid.indices(k, &mut sub);
            for (s, &a) in sub.iter().zip(&keep) {
                full[a] = *s;
            }
            full[axis] = index;
            r.label(&full)
        })
        .collect();
    Ok(BasinRaster::new(grid, labels)?)
}
