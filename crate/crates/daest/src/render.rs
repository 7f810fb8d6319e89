//! SVG figures: estimate cells as grey rectangles, the first raster dark
//! and the rest light, with an optional known boundary and marked points.

use std::fmt::Write as _;

use anyhow::{bail, ensure, Result};
use daest_core::{examples, BasinRaster, Label};

const WIDTH: f64 = 600.0;
const STRIP: f64 = 60.0;
const DARK: &str = "#505050";
const LIGHT: &str = "#c0c0c0";

#[derive(Clone, Debug, Default)]
pub struct Overlay {
    /// Example whose published boundary is drawn (1, 2 or 3).
    pub boundary: Option<u32>,
    pub points: Vec<Vec<f64>>,
}

impl Overlay {
    /// Boundary where one is known and the other fixed points of the example.
    pub fn for_example(id: u32) -> Overlay {
        Overlay {
            boundary: (1..=3).contains(&id).then_some(id),
            points: examples::other_fixed_points(id),
        }
    }
}

struct Frame {
    lo: Vec<f64>,
    hi: Vec<f64>,
    w: f64,
    h: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        (x - self.lo[0]) / (self.hi[0] - self.lo[0]) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        if self.lo.len() == 1 {
            return self.h / 2.0;
        }
        self.h - (y - self.lo[1]) / (self.hi[1] - self.lo[1]) * self.h
    }
}

fn cells(out: &mut String, r: &BasinRaster, fill: &str) {
    let g = r.grid();
    let (w, h) = (g.res()[0], if g.dim() == 2 { g.res()[1] } else { 1 });
    let (cw, ch) = (WIDTH / w as f64, if g.dim() == 2 { WIDTH * aspect(r) / h as f64 } else { STRIP });
    let total_h = ch * h as f64;
    let _ = writeln!(out, "<g fill=\"{fill}\" stroke=\"none\">");
    for j in 0..h {
        let mut i = 0;
        while i < w {
            let member = |i: usize| {
                let idx: Vec<usize> = if g.dim() == 2 { vec![i, j] } else { vec![i] };
                r.label(&idx) == Label::Member
            };
            if !member(i) {
                i += 1;
                continue;
            }
            let start = i;
            while i < w && member(i) {
                i += 1;
            }
            let y = total_h - (j + 1) as f64 * ch;
            let _ = writeln!(
                out,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>",
                start as f64 * cw,
                y,
                (i - start) as f64 * cw,
                ch
            );
        }
    }
    let _ = writeln!(out, "</g>");
}

fn aspect(r: &BasinRaster) -> f64 {
    let g = r.grid();
    (g.hi()[1] - g.lo()[1]) / (g.hi()[0] - g.lo()[0])
}

fn boundary(id: u32, dim: usize) -> Result<Vec<Vec<(f64, f64)>>> {
    Ok(match (id, dim) {
        (1, 1) => vec![vec![(-0.271845, 0.0), (0.653564, 0.0)]],
        (2, 2) => {
            let r = 3f64.sqrt();
            vec![(0..=256)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / 256.0;
                    (r * t.cos(), r * t.sin())
                })
                .collect()]
        }
        (3, 2) => {
            let (a, b) = (0.5, 1.0 / 3.0);
            vec![vec![(-a, -b), (a, -b), (a, b), (-a, b), (-a, -b)]]
        }
        (1..=3, _) => bail!("example {id} boundary does not match a {dim}-D raster"),
        _ => bail!("no known boundary for example {id}"),
    })
}

/// `rasters[0]` is drawn dark on top of the union of the others.
pub fn render_svg(rasters: &[BasinRaster], overlay: &Overlay) -> Result<String> {
    ensure!(!rasters.is_empty(), "nothing to render");
    let g = rasters[0].grid();
    ensure!(g.dim() == 1 || g.dim() == 2, "render needs 1-D or 2-D rasters; slice 3-D input first");
    for r in &rasters[1..] {
        ensure!(r.grid() == g, "rasters are defined on different grids");
    }
    let h = if g.dim() == 2 { WIDTH * aspect(&rasters[0]) } else { STRIP };
    let frame = Frame { lo: g.lo().to_vec(), hi: g.hi().to_vec(), w: WIDTH, h };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {WIDTH:.3} {h:.3}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for r in &rasters[1..] {
        cells(&mut out, r, LIGHT);
    }
    cells(&mut out, &rasters[0], DARK);
    if let Some(id) = overlay.boundary {
        for line in boundary(id, g.dim())? {
            let pts: Vec<String> =
                line.iter().map(|&(x, y)| format!("{:.3},{:.3}", frame.px(x), frame.py(y))).collect();
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"/>",
                pts.join(" ")
            );
        }
    }
    for p in &overlay.points {
        ensure!(p.len() == g.dim(), "marked point has {} coordinates, raster has {}", p.len(), g.dim());
        let y = if g.dim() == 2 { p[1] } else { 0.0 };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"5\" fill=\"black\"/>",
            frame.px(p[0]),
            frame.py(y)
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
