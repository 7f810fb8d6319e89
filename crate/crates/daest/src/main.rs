use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use daest::config::{parse_box, parse_list, parse_points, Config};
use daest::render::{render_svg, Overlay};
use daest::report::{parse_rule, read_report, rule_name, stop_name, write_report, Report};
use daest::{archive, mapfmt, raster};
use daest_core::continuation::{ray_directions, run_from};
use daest_core::lyapunov::direct_sum_terms;
use daest_core::oracle::{analytic_raster, compare, validate_trap, classify_with_trap};
use daest_core::{
    check_hypotheses, solve_embryo, BasinRaster, ContinuationParams, EmbryoMethod, Grid, LayerRule,
    OrbitParams, Poly, PolyMap, ReexpandMethod, RegionEstimate, TruncatedSeries,
};

/// Domain-of-attraction estimates for polynomial maps.
#[derive(Parser)]
#[command(name = "daest", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the embryo at the fixed point and rasterize its region estimate.
    Analyze(AnalyzeArgs),
    /// Re-expand an embryo at new centers and accumulate the union.
    Extend(ExtendArgs),
    /// Compare an estimate raster with orbit simulation or a known basin.
    Validate(ValidateArgs),
    /// Draw rasters (or a report's steps) as SVG or PGM.
    Render(RenderArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// per-degree, picard or direct-sum
    #[arg(long)]
    method: Option<String>,
    /// Fixed point of the map as `c1,c2,...`; the map is shifted there first.
    #[arg(long = "fixed-point", allow_hyphen_values = true)]
    fixed_point: Option<String>,
    /// `lo1,hi1,lo2,hi2,...`
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long)]
    res: Option<usize>,
    /// top, or top-L to require the root test on the top L nonzero layers
    #[arg(long)]
    layers: Option<String>,
    #[arg(long = "out-embryo")]
    out_embryo: Option<String>,
    #[arg(long = "out-raster")]
    out_raster: Option<String>,
    /// Also write a PGM picture of a 2-D raster.
    #[arg(long = "out-pgm")]
    out_pgm: Option<String>,
}

#[derive(Args)]
struct ExtendArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    embryo: Option<String>,
    /// Needed for orbit-sum re-expansion.
    #[arg(long)]
    map: Option<String>,
    /// Centers as `c1,c2;c1,c2;...`, used in order.
    #[arg(long, allow_hyphen_values = true)]
    centers: Option<String>,
    /// Pick centers near the boundary automatically.
    #[arg(long)]
    auto: bool,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    vmax: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    /// shift or orbit-sum
    #[arg(long)]
    reexpand: Option<String>,
    /// Orbit terms for orbit-sum re-expansion.
    #[arg(long = "orbit-terms")]
    orbit_terms: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
    #[arg(long)]
    layers: Option<String>,
    #[arg(long = "fixed-point", allow_hyphen_values = true)]
    fixed_point: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long)]
    res: Option<usize>,
    #[arg(long = "out-dir")]
    out_dir: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    map: Option<String>,
    /// Estimate raster (CSV).
    #[arg(long)]
    raster: Option<String>,
    #[arg(long = "example-id")]
    example_id: Option<u32>,
    #[arg(long)]
    trap: Option<f64>,
    #[arg(long)]
    escape: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long = "fixed-point", allow_hyphen_values = true)]
    fixed_point: Option<String>,
    /// Write the orbit-simulation raster here.
    #[arg(long = "out-oracle")]
    out_oracle: Option<String>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raster CSVs; the first is drawn dark, the rest light.
    #[arg(long)]
    rasters: Option<String>,
    /// Report from `extend`; its steps are rasterized on --box/--res.
    #[arg(long)]
    report: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long)]
    res: Option<usize>,
    /// Example id whose boundary and fixed points are drawn, or none.
    #[arg(long)]
    overlay: Option<String>,
    /// Extra points to mark, `c1,c2;c1,c2;...`.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// `axis=index` slice of higher-dimensional rasters (axes from 0).
    #[arg(long)]
    slice: Option<String>,
    #[arg(long)]
    svg: Option<String>,
    #[arg(long)]
    pgm: Option<String>,
}

fn load_config(path: &Option<PathBuf>, allowed: &[&str]) -> Result<Config> {
    let Some(p) = path else { return Ok(Config::default()) };
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let c = Config::parse(&text)?;
    c.check_keys(allowed)?;
    Ok(c)
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn write(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_map(path: &str) -> Result<PolyMap> {
    mapfmt::parse_map(&read(path)?).with_context(|| format!("parsing {path}"))
}

fn load_raster(path: &str) -> Result<BasinRaster> {
    raster::read_csv(&read(path)?).with_context(|| format!("reading raster {path}"))
}

fn rule(s: Option<String>) -> Result<LayerRule> {
    s.map_or(Ok(LayerRule::Top), |s| parse_rule(&s))
}

fn fixed_point(s: Option<String>, dim: usize) -> Result<Option<Vec<f64>>> {
    let Some(s) = s else { return Ok(None) };
    let x0 = parse_list(&s)?;
    ensure!(x0.len() == dim, "fixed point has {} coordinates, map has {dim}", x0.len());
    Ok(Some(x0))
}

fn make_grid(bbox: &str, res: usize, dim: usize) -> Result<Grid> {
    let (lo, hi) = parse_box(bbox)?;
    ensure!(lo.len() == dim, "box has {} axes, expected {dim}", lo.len());
    ensure!(res >= 2, "resolution must be at least 2");
    Ok(Grid::uniform(lo, hi, res)?)
}

/// Bounding box of the estimates' ray boundaries, padded by a quarter.
fn auto_box(ests: &[&RegionEstimate]) -> Result<Grid> {
    let n = ests[0].dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut dirs = ray_directions(n);
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[k] = s;
            dirs.push(e);
        }
    }
    for est in ests {
        for u in &dirs {
            let t = est.ray_boundary(u);
            ensure!(t.is_finite(), "estimate is unbounded; pass --box");
            for k in 0..n {
                let x = est.center()[k] + t * u[k];
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
    }
    for k in 0..n {
        let pad = 0.25 * (hi[k] - lo[k]).max(1e-12);
        lo[k] -= pad;
        hi[k] += pad;
    }
    Ok(Grid::uniform(lo, hi, 256)?)
}

fn grid_for(bbox: Option<String>, res: Option<usize>, ests: &[&RegionEstimate]) -> Result<Grid> {
    let dim = ests[0].dim();
    match bbox {
        Some(b) => make_grid(&b, res.unwrap_or(256), dim),
        None => {
            let g = auto_box(ests)?;
            match res {
                Some(r) => Ok(Grid::uniform(g.lo().to_vec(), g.hi().to_vec(), r)?),
                None => Ok(g),
            }
        }
    }
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let cfg = load_config(
        &a.config,
        &["map", "degree", "method", "fixed-point", "box", "res", "layers", "out-embryo", "out-raster", "out-pgm"],
    )?;
    let map_path: String = cfg.pick(a.map, "map")?.ok_or_else(|| anyhow!("--map is required"))?;
    let p: usize = cfg.pick(a.degree, "degree")?.ok_or_else(|| anyhow!("--degree is required"))?;
    ensure!(p >= 2, "degree must be at least 2");
    let method = cfg.pick(a.method, "method")?.unwrap_or_else(|| "per-degree".into());
    let rule = rule(cfg.pick(a.layers, "layers")?)?;
    let g = load_map(&map_path)?;
    let x0 = fixed_point(cfg.pick(a.fixed_point, "fixed-point")?, g.dim())?;
    let f = match &x0 {
        Some(x0) => g.shift_to_origin(x0, None)?,
        None => g,
    };
    let norm = check_hypotheses(&f)?;
    println!("map {map_path} (dimension {})", f.dim());
    println!("norm of linear part {norm:.12}");
    let method = match method.as_str() {
        "per-degree" => EmbryoMethod::PerDegreeSolve,
        "picard" => EmbryoMethod::Picard { tol: 1e-15, max_iter: 100_000 },
        "direct-sum" => EmbryoMethod::DirectSum { terms: direct_sum_terms(norm, 1e-17, p) },
        other => bail!("unknown method `{other}` (per-degree, picard or direct-sum)"),
    };
    let v = solve_embryo(&f, p, method)?;
    let v = match &x0 {
        Some(x0) => v.translated_to(x0.clone()),
        None => v,
    };
    let est = RegionEstimate::new(&v, rule)?;
    println!("degree {p}, effective layer {}", est.effective_layer());
    if est.rule() != LayerRule::Top {
        let used: Vec<String> = est.layers_used().iter().map(|l| l.to_string()).collect();
        println!("layers used {}", used.join(" "));
    }
    if f.dim() == 1 {
        let (lo, hi) = est.interval();
        println!("interval {lo:.6} {hi:.6}");
    }
    if let Some(path) = cfg.pick(a.out_embryo, "out-embryo")? {
        write(&path, &archive::write_embryo(&v))?;
        println!("embryo written to {path}");
    }
    let out_raster: Option<String> = cfg.pick(a.out_raster, "out-raster")?;
    let out_pgm: Option<String> = cfg.pick(a.out_pgm, "out-pgm")?;
    if out_raster.is_some() || out_pgm.is_some() {
        let grid = grid_for(cfg.pick(a.bbox, "box")?, cfg.pick(a.res, "res")?, &[&est])?;
        let r = raster::scan(&est, &grid);
        if let Some(path) = out_raster {
            write(&path, &raster::write_csv(&r))?;
            println!("raster written to {path}");
        }
        if let Some(path) = out_pgm {
            write(&path, &raster::write_pgm(&r)?)?;
        }
        println!("member cells {} of {}", r.count(daest_core::Label::Member), grid.len());
    }
    Ok(())
}

fn extend(a: ExtendArgs) -> Result<()> {
    let cfg = load_config(
        &a.config,
        &[
            "embryo", "map", "centers", "auto", "steps", "vmax", "margin", "reexpand", "orbit-terms", "candidates",
            "layers", "fixed-point", "box", "res", "out-dir",
        ],
    )?;
    let embryo_path: String = cfg.pick(a.embryo, "embryo")?.ok_or_else(|| anyhow!("--embryo is required"))?;
    let v = archive::read_embryo(&read(&embryo_path)?).with_context(|| format!("reading {embryo_path}"))?;
    let n = v.dim();
    let centers: Option<String> = cfg.pick(a.centers, "centers")?;
    let auto = a.auto || cfg.pick::<bool>(None, "auto")?.unwrap_or(false);
    ensure!(centers.is_some() != auto, "give exactly one of --centers and --auto");
    let centers = centers.map(|c| parse_points(&c)).transpose()?;
    if let Some(cs) = &centers {
        for c in cs {
            ensure!(c.len() == n, "center {c:?} has {} coordinates, embryo has {n}", c.len());
        }
    }
    let reexpand = cfg.pick(a.reexpand, "reexpand")?.unwrap_or_else(|| "shift".into());
    let map_path: Option<String> = cfg.pick(a.map, "map")?;
    let x0 = fixed_point(cfg.pick(a.fixed_point, "fixed-point")?, n)?;
    let f = match &map_path {
        Some(p) => {
            let g = load_map(p)?;
            ensure!(g.dim() == n, "map has dimension {}, embryo {n}", g.dim());
            match &x0 {
                Some(x0) => g.shift_to_origin(x0, None)?,
                None => g,
            }
        }
        // shift re-expansion never looks at the map
        None => PolyMap::from_components(vec![Poly::zero(n); n])?,
    };
    let reexpand = match reexpand.as_str() {
        "shift" => ReexpandMethod::ShiftEmbryo,
        "orbit-sum" => {
            ensure!(map_path.is_some(), "orbit-sum re-expansion needs --map");
            let norm = check_hypotheses(&f)?;
            let k = match cfg.pick(a.orbit_terms, "orbit-terms")? {
                Some(k) => k,
                None => direct_sum_terms(norm, 1e-17, v.max_degree()),
            };
            ReexpandMethod::OrbitSum(k)
        }
        other => bail!("unknown re-expansion `{other}` (shift or orbit-sum)"),
    };
    let steps = cfg.pick(a.steps, "steps")?;
    let params = ContinuationParams {
        margin: cfg.pick(a.margin, "margin")?.unwrap_or(1e-3),
        v_max: cfg.pick(a.vmax, "vmax")?,
        candidates_per_step: cfg.pick(a.candidates, "candidates")?,
        max_steps: steps.unwrap_or_else(|| centers.as_ref().map_or(1, Vec::len)),
        reexpand,
        rule: rule(cfg.pick(a.layers, "layers")?)?,
    };
    // work in coordinates where the fixed point is the origin
    let shift = x0.clone().unwrap_or_else(|| vec![0.0; n]);
    let to_local = |c: &[f64]| c.iter().zip(&shift).map(|(a, b)| a - b).collect::<Vec<f64>>();
    let v_local = v.translated_to(to_local(v.center()));
    let centers_local: Option<Vec<Vec<f64>>> = centers.map(|cs| cs.iter().map(|c| to_local(c)).collect());
    let mut run = run_from(&f, v_local, &params, centers_local.as_deref())?;
    for s in &mut run.steps {
        let c: Vec<f64> = s.center.iter().zip(&shift).map(|(a, b)| a + b).collect();
        s.embryo = s.embryo.translated_to(s.embryo.center().iter().zip(&shift).map(|(a, b)| a + b).collect());
        s.estimate = RegionEstimate::new(&s.embryo, params.rule)?;
        s.center = c;
    }

    let out_dir = PathBuf::from(cfg.pick(a.out_dir, "out-dir")?.unwrap_or_else(|| ".".into()));
    let name = |k: usize| format!("step_{k}.embryo");
    for s in &run.steps {
        write(out_dir.join(name(s.index)), &archive::write_embryo(&s.embryo))?;
    }
    let report = Report::from_run(&run, name);
    write(out_dir.join("report.txt"), &write_report(&report))?;
    let ests: Vec<&RegionEstimate> = run.steps.iter().map(|s| &s.estimate).collect();
    let grid = grid_for(cfg.pick(a.bbox, "box")?, cfg.pick(a.res, "res")?, &ests)?;
    for s in &run.steps {
        write(out_dir.join(format!("step_{}.csv", s.index)), &raster::write_csv(&raster::scan(&s.estimate, &grid)))?;
    }
    let union = raster::scan_union(&ests, &grid);
    write(out_dir.join("union.csv"), &raster::write_csv(&union))?;

    for s in &report.steps {
        let c: Vec<String> = s.center.iter().map(|x| format!("{x:.6}")).collect();
        print!("step {} center {} |V| {:.6e} layer {}", s.index, c.join(","), s.v_at_center, s.effective_layer);
        if let Some((lo, hi)) = s.interval {
            print!(" interval {lo:.6} {hi:.6}");
        }
        if !run.steps[s.index].inside_parent {
            print!(" (center outside its parent estimate)");
        }
        println!();
    }
    if let Some((lo, hi)) = report.union_interval {
        println!("union {lo:.6} {hi:.6}");
    }
    println!("v_max {:.6e}, rule {}, stop {}", run.v_max, rule_name(params.rule), stop_name(run.stop));
    println!("union member cells {} of {}", union.count(daest_core::Label::Member), grid.len());
    println!("report written to {}", out_dir.join("report.txt").display());
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let cfg = load_config(
        &a.config,
        &["map", "raster", "example-id", "trap", "escape", "iters", "fixed-point", "out-oracle"],
    )?;
    let raster_path: String = cfg.pick(a.raster, "raster")?.ok_or_else(|| anyhow!("--raster is required"))?;
    let est = load_raster(&raster_path)?;
    let grid = est.grid().clone();
    let map_path: Option<String> = cfg.pick(a.map, "map")?;
    let example: Option<u32> = cfg.pick(a.example_id, "example-id")?;
    ensure!(map_path.is_some() || example.is_some(), "give --map, --example-id or both");
    let defaults = OrbitParams::default();
    let params = OrbitParams {
        trap_radius: cfg.pick(a.trap, "trap")?.unwrap_or(defaults.trap_radius),
        escape_radius: cfg.pick(a.escape, "escape")?.unwrap_or(defaults.escape_radius),
        max_iters: cfg.pick(a.iters, "iters")?.unwrap_or(defaults.max_iters),
    };
    params.validate()?;
    let report = |what: &str, c: &daest_core::oracle::Comparison| {
        println!("{what}: false_inclusion_rate {:.6} coverage {:.6} disagreement {:.6}", c.false_inclusion_rate, c.coverage, c.disagreement);
    };
    let mut oracle = None;
    if let Some(p) = &map_path {
        let g = load_map(p)?;
        ensure!(g.dim() == grid.dim(), "map has dimension {}, raster {}", g.dim(), grid.dim());
        let x0 = fixed_point(cfg.pick(a.fixed_point, "fixed-point")?, g.dim())?;
        let shift = x0.clone().unwrap_or_else(|| vec![0.0; g.dim()]);
        let f = match &x0 {
            Some(x0) => g.shift_to_origin(x0, None)?,
            None => g,
        };
        let trap = validate_trap(&f, params.trap_radius);
        if !trap.verified {
            println!("trap radius could not be verified; Converged labels are heuristic");
        } else {
            println!("trap radius {:.3e}", trap.radius);
        }
        let truth = raster::par_raster(&grid, |x| {
            let y: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a - b).collect();
            classify_with_trap(&f, &y, &params, &trap).label()
        });
        println!(
            "oracle: converged {} escaped {} undecided {} of {}",
            truth.count(daest_core::Label::CONVERGED),
            truth.count(daest_core::Label::ESCAPED),
            truth.count(daest_core::Label::Undecided),
            grid.len()
        );
        report("estimate vs oracle", &compare(&est, &truth)?);
        if let Some(path) = cfg.pick(a.out_oracle, "out-oracle")? {
            write(&path, &raster::write_csv(&truth))?;
        }
        oracle = Some(truth);
    }
    if let Some(id) = example {
        let known = analytic_raster(id, &grid)?;
        report("estimate vs known basin", &compare(&est, &known)?);
        if let Some(truth) = &oracle {
            report("oracle vs known basin", &compare(truth, &known)?);
        }
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let cfg = load_config(&a.config, &["rasters", "report", "box", "res", "overlay", "points", "slice", "svg", "pgm"])?;
    let list: Option<String> = cfg.pick(a.rasters, "rasters")?;
    let report_path: Option<String> = cfg.pick(a.report, "report")?;
    ensure!(list.is_some() != report_path.is_some(), "give exactly one of --rasters and --report");
    let mut rasters: Vec<BasinRaster> = match (list, report_path) {
        (Some(list), _) => list.split(',').map(|p| load_raster(p.trim())).collect::<Result<_>>()?,
        (None, Some(path)) => {
            let r = read_report(&read(&path)?).with_context(|| format!("reading {path}"))?;
            let base = Path::new(&path).parent().unwrap_or(Path::new(""));
            let mut ests = Vec::new();
            for s in &r.steps {
                let p = base.join(&s.embryo);
                let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                let v: TruncatedSeries = archive::read_embryo(&text).with_context(|| format!("reading {}", p.display()))?;
                ests.push(RegionEstimate::new(&v, r.rule)?);
            }
            let refs: Vec<&RegionEstimate> = ests.iter().collect();
            let grid = grid_for(cfg.pick(a.bbox, "box")?, cfg.pick(a.res, "res")?, &refs)?;
            let mut out = vec![raster::scan(&ests[0], &grid)];
            if ests.len() > 1 {
                out.push(raster::scan_union(&refs[1..], &grid));
            }
            out
        }
        (None, None) => unreachable!(),
    };
    let mut points = Vec::new();
    let mut overlay = Overlay::default();
    match cfg.pick::<String>(a.overlay, "overlay")?.as_deref() {
        None | Some("none") => {}
        Some(id) => {
            let id: u32 = id.parse().map_err(|_| anyhow!("overlay must be an example id or none"))?;
            overlay = Overlay::for_example(id);
        }
    }
    points.append(&mut overlay.points);
    if let Some(p) = cfg.pick::<String>(a.points, "points")? {
        points.extend(parse_points(&p)?);
    }
    if let Some(s) = cfg.pick::<String>(a.slice, "slice")? {
        let (axis, index) = s.split_once('=').ok_or_else(|| anyhow!("slice must be axis=index"))?;
        let axis: usize = axis.trim().parse().context("bad slice axis")?;
        let index: usize = index.trim().parse().context("bad slice index")?;
        rasters = rasters.iter().map(|r| raster::slice(r, axis, index)).collect::<Result<_>>()?;
        for p in &mut points {
            ensure!(axis < p.len(), "slice axis out of range for marked point");
            p.remove(axis);
        }
    } else {
        ensure!(rasters[0].grid().dim() <= 2, "rasters of dimension {} need --slice", rasters[0].grid().dim());
    }
    overlay.points = points;
    let svg: Option<String> = cfg.pick(a.svg, "svg")?;
    let pgm: Option<String> = cfg.pick(a.pgm, "pgm")?;
    ensure!(svg.is_some() || pgm.is_some(), "give --svg, --pgm or both");
    if let Some(path) = svg {
        write(&path, &render_svg(&rasters, &overlay)?)?;
        println!("svg written to {path}");
    }
    if let Some(path) = pgm {
        let merged = daest_core::region::union(&rasters)?;
        write(&path, &raster::write_pgm(&merged)?)?;
        println!("pgm written to {path}");
    }
    Ok(())
}

/// 1 input error, 2 hypothesis failure, 3 numerical failure.
fn exit_code(e: &anyhow::Error) -> u8 {
    use daest_core::Error as E;
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::NotCenteredAtOrigin { .. } | E::NotAContraction { .. } | E::FixedPointMismatch { .. } => 2,
                E::SingularDegreeOperator { .. } | E::NoConvergence { .. } | E::EmptyLayer { .. } => 3,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let result = match cli.cmd {
        Cmd::Analyze(a) => analyze(a),
        Cmd::Extend(a) => extend(a),
        Cmd::Validate(a) => validate(a),
        Cmd::Render(a) => render(a),
    };
    match result {
        Ok(()) => {
            eprintln!("finished in {:.2?}", start.elapsed());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
