//! One line per acceptance criterion. Runs without the test harness so the
//! lines always show up; exits nonzero on a failed criterion only when
//! `ACCEPTANCE_STRICT` is set, so later suites in a workspace run still
//! execute.

use std::time::{Duration, Instant};

use daest_core::continuation::ray_directions;
use daest_core::lyapunov::{direct_sum_terms, residual};
use daest_core::oracle::{analytic_raster, basin_grid, classify, classify_about, compare};
use daest_core::polymap::ipow;
use daest_core::region::{grid_scan, interval_estimate_1d, union};
use daest_core::{
    check_hypotheses, examples, extend_step, run_auto, run_from, solve_embryo, BasinRaster, ContinuationParams,
    EmbryoMethod, Error, ExtFloat, Grid, Label, LayerRule, OrbitParams, Poly, PolyMap, ReexpandMethod,
    RegionEstimate, TruncatedSeries, VerdictKind,
};

struct Rng(u64);

impl Rng {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

struct Ledger {
    failed: Vec<u32>,
}

impl Ledger {
    fn line(&mut self, n: u32, title: &str, pass: bool, detail: String) {
        println!("criterion {n} {} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(n);
        }
    }
}

fn info(title: &str, detail: String) {
    println!("info {title}: {detail}");
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn interval_ok(got: (f64, f64), want: (f64, f64), tol: f64) -> bool {
    within(got.0, want.0, tol) && within(got.1, want.1, tol)
}

fn fmt_iv(iv: (f64, f64)) -> String {
    format!("({:.6}, {:.6})", iv.0, iv.1)
}

fn false_inclusion(est: &BasinRaster, truth: &BasinRaster) -> f64 {
    compare(est, truth).unwrap().false_inclusion_rate
}

fn criterion_1(l: &mut Ledger) -> TruncatedSeries {
    let f = examples::example1();
    let t = Instant::now();
    let v = solve_embryo(&f, 4096, EmbryoMethod::PerDegreeSolve).unwrap();
    let iv = interval_estimate_1d(&v).unwrap();
    let dt = t.elapsed();
    let pass = interval_ok(iv, (-0.27184, 0.27184), 5e-4) && dt <= Duration::from_secs(300);
    l.line(1, "example 1 first estimate at p=4096", pass, format!("{} vs (-0.27184, 0.27184) tol 5e-4, {dt:.2?}", fmt_iv(iv)));
    v
}

fn criterion_2(l: &mut Ledger, v0: &TruncatedSeries) {
    let f = examples::example1();
    let centers = vec![vec![0.2718], vec![0.5], vec![0.61]];
    let params = ContinuationParams { max_steps: 3, reexpand: ReexpandMethod::ShiftEmbryo, ..Default::default() };
    let run = run_from(&f, v0.clone(), &params, Some(&centers)).unwrap();
    let published = [(0.01345, 0.53015), (0.38378, 0.61622), (0.59785, 0.622175)];
    let mut pass = run.steps.len() == 4;
    let mut detail = String::new();
    for (s, want) in run.steps[1..].iter().zip(published) {
        let iv = s.estimate.interval();
        pass &= interval_ok(iv, want, 1e-2);
        detail += &format!("step {} {} vs {}; ", s.index, fmt_iv(iv), fmt_iv(want));
    }
    let u = run.union_interval().unwrap();
    pass &= interval_ok(u, (-0.27184, 0.622175), 1e-2);
    let contained = u.0 >= -0.271845 - 1e-3 && u.1 <= 0.653564 + 1e-3;
    pass &= contained;
    detail += &format!("union {} vs (-0.27184, 0.622175); inside true basin: {contained}", fmt_iv(u));
    l.line(2, "example 1 continuation with shifted embryos", pass, detail);
}

fn criterion_3(l: &mut Ledger) {
    let f = examples::example4();
    let v = solve_embryo(&f, 625, EmbryoMethod::PerDegreeSolve).unwrap();
    let iv = interval_estimate_1d(&v).unwrap();
    let (_, e1) = extend_step(&v, &f, &[-0.44258], 625, ReexpandMethod::ShiftEmbryo, LayerRule::Top).unwrap();
    let d1 = e1.interval();
    let pass = interval_ok(iv, (-0.442585, 0.442585), 5e-4) && interval_ok(d1, (-0.673088, -0.212082), 1e-2);
    l.line(
        3,
        "example 4 at p=625",
        pass,
        format!("D0 {} vs (-0.442585, 0.442585) tol 5e-4; D1 {} vs (-0.673088, -0.212082) tol 1e-2", fmt_iv(iv), fmt_iv(d1)),
    );
}

fn criterion_4(l: &mut Ledger) {
    let f = examples::example3();
    let v = solve_embryo(&f, 54, EmbryoMethod::PerDegreeSolve).unwrap();
    let est = RegionEstimate::new(&v, LayerRule::Top).unwrap();
    let grid = Grid::uniform(vec![-0.6, -0.6], vec![0.6, 0.6], 256).unwrap();
    let r = grid_scan(&est, &grid).unwrap();
    let (mut inner_missing, mut outer_excess) = (0, 0);
    let mut x = [0.0; 2];
    for k in 0..grid.len() {
        grid.cell_center(k, &mut x);
        let m = r.labels()[k] == Label::Member;
        if x[0].abs() < 0.45 && x[1].abs() < 0.30 && !m {
            inner_missing += 1;
        }
        if m && !(x[0].abs() < 0.51 && x[1].abs() < 0.34) {
            outer_excess += 1;
        }
    }
    let truth = basin_grid(&f, &grid, &OrbitParams::default()).unwrap();
    let fir = false_inclusion(&r, &truth);
    let (bx, by) = (est.ray_boundary(&[1.0, 0.0]), est.ray_boundary(&[0.0, 1.0]));
    let pass = inner_missing == 0 && outer_excess == 0 && fir <= 0.01;
    l.line(
        4,
        "example 3 one-step estimate",
        pass,
        format!(
            "layer {}, axis extents {bx:.4} / {by:.4}; inner box cells missing {inner_missing}, members outside outer box {outer_excess}, false inclusion {fir:.4} (max 0.01)",
            est.effective_layer()
        ),
    );
}

fn criterion_5(l: &mut Ledger) {
    let f = examples::example2();
    let norm = match check_hypotheses(&f) {
        Err(Error::NotAContraction { norm }) => norm,
        other => panic!("example 2 was not rejected: {other:?}"),
    };
    let grid = Grid::uniform(vec![-2.0, -2.0], vec![2.0, 2.0], 256).unwrap();
    let params = OrbitParams { trap_radius: 1e-4, escape_radius: 1e6, max_iters: 2000 };
    let truth = basin_grid(&f, &grid, &params).unwrap();
    let disk = analytic_raster(2, &grid).unwrap();
    let c = compare(&truth, &disk).unwrap();
    let agreement = 1.0 - c.disagreement;
    let pass = within(norm, 1.0, 1e-10) && agreement >= 0.98;
    l.line(
        5,
        "example 2 rejected and oracle vs published disk",
        pass,
        format!(
            "norm {norm:.12}; agreement {agreement:.4} on decided cells (min 0.98); converged {} escaped {} undecided {}",
            truth.count(Label::CONVERGED),
            truth.count(Label::ESCAPED),
            truth.count(Label::Undecided)
        ),
    );
    let r2 = BasinRaster::from_fn(grid, |x| if x[0] * x[0] + x[1] * x[1] < 2.0 { Label::CONVERGED } else { Label::ESCAPED });
    info("example 2 oracle vs disk of radius sqrt 2", format!("agreement {:.4}", 1.0 - compare(&truth, &r2).unwrap().disagreement));
}

/// Symmetric box covering the bounded rays of the estimate with a quarter
/// of padding. Example 6 is unbounded along the axes, which its map sends
/// straight to the origin.
fn cover(est: &RegionEstimate) -> f64 {
    let t = ray_directions(est.dim())
        .iter()
        .map(|u| est.ray_boundary(u))
        .filter(|t| t.is_finite())
        .fold(0.0, f64::max);
    1.25 * t
}

fn criterion_6(l: &mut Ledger) {
    let params = OrbitParams::default();
    let f5 = examples::example5();
    let t = Instant::now();
    let v5 = solve_embryo(&f5, 256, EmbryoMethod::PerDegreeSolve).unwrap();
    let res5 = residual(&v5, &f5, 256).unwrap();
    let est5 = RegionEstimate::new(&v5, LayerRule::Top).unwrap();
    let b5 = cover(&est5);
    let g5 = Grid::uniform(vec![-b5, -b5], vec![b5, b5], 256).unwrap();
    let fir5 = false_inclusion(&grid_scan(&est5, &g5).unwrap(), &basin_grid(&f5, &g5, &params).unwrap());
    let excludes = !est5.contains(&[1.5, 1.5]);
    let dt5 = t.elapsed();
    let near = Grid::uniform(vec![-3.0, -3.0], vec![3.0, 3.0], 256).unwrap();
    let fir5_near = false_inclusion(&grid_scan(&est5, &near).unwrap(), &basin_grid(&f5, &near, &params).unwrap());
    info("example 5 estimate on [-3, 3]^2", format!("false inclusion {fir5_near:.4}"));

    let f6 = examples::example6();
    let t = Instant::now();
    let v6 = solve_embryo(&f6, 54, EmbryoMethod::PerDegreeSolve).unwrap();
    let res6 = residual(&v6, &f6, 54).unwrap();
    let est6 = RegionEstimate::new(&v6, LayerRule::Top).unwrap();
    let b6 = cover(&est6);
    let g6 = Grid::uniform(vec![-b6; 3], vec![b6; 3], 64).unwrap();
    let e6 = grid_scan(&est6, &g6).unwrap();
    let o6 = basin_grid(&f6, &g6, &params).unwrap();
    let mut worst = 0.0f64;
    let mut worst_at = (0, 0);
    for k in 0..64 {
        let (mut m, mut bad) = (0usize, 0usize);
        for idx in k * 64 * 64..(k + 1) * 64 * 64 {
            if e6.labels()[idx] == Label::Member && o6.labels()[idx] != Label::Undecided {
                m += 1;
                if o6.labels()[idx] == Label::ESCAPED {
                    bad += 1;
                }
            }
        }
        if m > 0 && bad as f64 / m as f64 > worst {
            worst = bad as f64 / m as f64;
            worst_at = (k, m);
        }
    }
    let dt6 = t.elapsed();
    info("example 6 estimate over the whole cube", format!("false inclusion {:.4}", false_inclusion(&e6, &o6)));
    let pass = res5 <= 1e-9 && res6 <= 1e-9 && fir5 <= 0.01 && worst <= 0.01 && excludes;
    l.line(
        6,
        "examples 5 and 6 residual and soundness",
        pass,
        format!(
            "ex5 residual {res5:.2e}, false inclusion {fir5:.4} on [-{b5:.3}, {b5:.3}]^2, excludes (1.5, 1.5): {excludes}, {dt5:.1?}; ex6 residual {res6:.2e}, worst slice false inclusion {worst:.4} (slice {}, {} members) on [-{b6:.3}, {b6:.3}]^3, {dt6:.1?}",
            worst_at.0, worst_at.1
        ),
    );
}

fn worst_relative(a: &TruncatedSeries, b: &TruncatedSeries) -> (f64, Vec<u32>) {
    let mut w = (0.0, Vec::new());
    let keys: Vec<Vec<u32>> = a.terms().map(|(e, _)| e).chain(b.terms().map(|(e, _)| e)).collect();
    for e in keys {
        let (x, y) = (a.coeff(&e), b.coeff(&e));
        let scale = x.abs().max_abs(y.abs());
        if scale.is_zero() {
            continue;
        }
        let r = ((x - y).abs() / scale).to_f64();
        if r > w.0 {
            w = (r, e);
        }
    }
    w
}

fn criterion_7(l: &mut Ledger) {
    let mut pass = true;
    let mut detail = String::new();
    for id in [1, 4, 5] {
        let f = examples::by_id(id).unwrap();
        let p = 64;
        let alpha = check_hypotheses(&f).unwrap();
        let a = solve_embryo(&f, p, EmbryoMethod::PerDegreeSolve).unwrap();
        let b = solve_embryo(&f, p, EmbryoMethod::Picard { tol: 1e-12, max_iter: 10_000 }).unwrap();
        let c = solve_embryo(&f, p, EmbryoMethod::DirectSum { terms: direct_sum_terms(alpha, 1e-14, p) }).unwrap();
        let (rb, eb) = worst_relative(&a, &b);
        let (rc, ec) = worst_relative(&a, &c);
        pass &= rb <= 1e-8 && rc <= 1e-8;
        detail += &format!("ex{id} picard {rb:.1e} at {eb:?}, direct sum {rc:.1e} at {ec:?}; ");
    }
    let v = solve_embryo(&examples::example1(), 3, EmbryoMethod::PerDegreeSolve).unwrap();
    let (b2, b3) = (v.coeff(&[2]).to_f64(), v.coeff(&[3]).to_f64());
    let hand = within(b2, 4.0 / 3.0, 1e-12) && within(b3, -32.0 / 21.0, 1e-12);
    pass &= hand;
    detail += &format!("B2 {b2:.15}, B3 {b3:.15} (4/3, -32/21 tol 1e-12)");
    l.line(7, "solver cross-validation at p=64 (relative 1e-8)", pass, detail);
}

fn translate(f: &PolyMap, x0: &[f64]) -> PolyMap {
    let n = f.dim();
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut out: Vec<(Vec<u32>, f64)> = vec![(vec![0; n], x0[i])];
            for t in c.terms() {
                let mut partial = vec![(vec![0u32; n], t.coef)];
                for (k, &e) in t.exps.iter().enumerate() {
                    let mut next = Vec::new();
                    for (ex, cf) in &partial {
                        let mut binom = 1.0;
                        for a in 0..=e {
                            let mut ex2 = ex.clone();
                            ex2[k] = a;
                            next.push((ex2, cf * binom * ipow(-x0[k], e - a)));
                            binom = binom * (e - a) as f64 / (a + 1) as f64;
                        }
                    }
                    partial = next;
                }
                out.extend(partial);
            }
            Poly::from_terms(n, out).unwrap()
        })
        .collect();
    PolyMap::from_components(comps).unwrap()
}

fn random_series(rng: &mut Rng, dim: usize, p: usize, terms: usize) -> TruncatedSeries {
    let t: Vec<(Vec<u32>, ExtFloat)> = (0..terms)
        .map(|_| {
            let mut e = vec![0u32; dim];
            let mut left = (rng.unit() * (p + 1) as f64) as u32;
            for slot in e.iter_mut().take(dim - 1) {
                let k = (rng.unit() * (left + 1) as f64) as u32;
                *slot = k.min(left);
                left -= *slot;
            }
            e[dim - 1] = left;
            (e, ExtFloat::from_f64(rng.range(-1.0, 1.0)))
        })
        .collect();
    TruncatedSeries::from_terms(dim, vec![0.0; dim], p, t).unwrap()
}

fn criterion_8(l: &mut Ledger) {
    let t = Instant::now();
    let mut rng = Rng(2024);
    let mut fails: Vec<&str> = Vec::new();

    // shift round trip: values preserved, and shifting back restores V
    let mut ok = true;
    for _ in 0..20 {
        let v = random_series(&mut rng, 2, 64, 60);
        let c = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
        let s = v.taylor_shift(&c);
        for _ in 0..100 {
            let x = [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)];
            let (a, b) = (v.eval(&x).to_f64(), s.eval(&x).to_f64());
            ok &= (a - b).abs() <= 1e-10 * (1.0 + a.abs());
        }
        let back = s.taylor_shift(&[0.0, 0.0]);
        for (e, cf) in v.terms() {
            ok &= (back.coeff(&e) - cf).abs().to_f64() <= 1e-10 * (1.0 + cf.abs().to_f64());
        }
    }
    let f1 = examples::example1();
    let v1 = solve_embryo(&f1, 128, EmbryoMethod::PerDegreeSolve).unwrap();
    let s1 = v1.taylor_shift(&[0.1]);
    for _ in 0..100 {
        let x = [rng.range(-0.15, 0.35)];
        let (a, b) = (v1.eval(&x).to_f64(), s1.eval(&x).to_f64());
        ok &= (a - b).abs() <= 1e-10 * (1.0 + a.abs());
    }
    if !ok {
        fails.push("shift round trip");
    }

    // truncation coherence against a full product
    let mut ok = true;
    for _ in 0..50 {
        let a = random_series(&mut rng, 2, 8, 10);
        let b = random_series(&mut rng, 2, 8, 10);
        let p = (rng.unit() * 17.0) as usize;
        let prod = a.multiply(&b, p).unwrap();
        let mut full = std::collections::BTreeMap::<Vec<u32>, (f64, f64)>::new();
        for (ea, ca) in a.terms() {
            for (eb, cb) in b.terms() {
                let e: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
                let term = (ca * cb).to_f64();
                let slot = full.entry(e).or_insert((0.0, 0.0));
                slot.0 += term;
                slot.1 += term.abs();
            }
        }
        for (e, (c, mag)) in &full {
            let got = prod.coeff(e).to_f64();
            if e.iter().sum::<u32>() as usize > p {
                ok &= got == 0.0;
            } else {
                ok &= (got - c).abs() <= 1e-13 * (1.0 + mag);
            }
        }
    }
    if !ok {
        fails.push("truncation coherence");
    }

    // ray monotonicity
    let f5 = examples::example5();
    let v5 = solve_embryo(&f5, 48, EmbryoMethod::PerDegreeSolve).unwrap();
    let est5 = RegionEstimate::new(&v5, LayerRule::Top).unwrap();
    let mut ok = true;
    let mut members = 0;
    while members < 1000 {
        let x = [rng.range(-1.5, 1.5), rng.range(-1.5, 1.5)];
        if est5.contains(&x) {
            members += 1;
            ok &= est5.contains(&[0.5 * x[0], 0.5 * x[1]]);
        }
    }
    if !ok {
        fails.push("ray monotonicity");
    }

    // union monotonicity over continuation steps
    let params = ContinuationParams { max_steps: 2, candidates_per_step: Some(4), ..Default::default() };
    let run = run_auto(&f5, 32, &params, None).unwrap();
    let grid = Grid::uniform(vec![-2.0, -2.0], vec![2.0, 2.0], 96).unwrap();
    let rasters = run.step_rasters(&grid).unwrap();
    let mut ok = rasters.len() > 1;
    for k in 1..rasters.len() {
        let (a, b) = (union(&rasters[..k]).unwrap(), union(&rasters[..=k]).unwrap());
        ok &= a.labels().iter().zip(b.labels()).all(|(x, y)| *x != Label::Member || *y == Label::Member);
    }
    if !ok {
        fails.push("union monotonicity");
    }

    // verdicts only resolve as the iteration cap grows
    let mut ok = true;
    for _ in 0..300 {
        let id = [1u32, 3, 4, 5][(rng.unit() * 4.0) as usize];
        let f = examples::by_id(id).unwrap();
        let x: Vec<f64> = (0..f.dim()).map(|_| rng.range(-1.5, 1.5)).collect();
        let mut last = VerdictKind::Undecided;
        for k in [1, 10, 100, 1000, 10_000] {
            let v = classify(&f, &x, &OrbitParams { max_iters: k, ..OrbitParams::default() }).kind;
            ok &= last == VerdictKind::Undecided || v == last;
            last = v;
        }
    }
    if !ok {
        fails.push("verdict monotonicity");
    }

    // translation invariance of the oracle
    let mut ok = true;
    for _ in 0..300 {
        let id = [1u32, 3, 5][(rng.unit() * 3.0) as usize];
        let f = examples::by_id(id).unwrap();
        let n = f.dim();
        let x0: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
        let g = translate(&f, &x0);
        let moved: Vec<f64> = y.iter().zip(&x0).map(|(a, b)| a + b).collect();
        let params = OrbitParams::default();
        ok &= classify(&f, &y, &params).kind == classify_about(&g, &moved, &x0, &params).unwrap().kind;
    }
    if !ok {
        fails.push("translation invariance");
    }

    let dt = t.elapsed();
    let pass = fails.is_empty() && dt <= Duration::from_secs(900);
    let detail = if fails.is_empty() {
        format!("shift round trip, truncation coherence, ray and union monotonicity, verdict monotonicity and translation invariance hold, {dt:.1?}; the proptest suites run as separate targets")
    } else {
        format!("failed: {}", fails.join(", "))
    };
    l.line(8, "invariant re-checks", pass, detail);
}

fn extra_checks(v0: &TruncatedSeries) {
    let f1 = examples::example1();
    let est = RegionEstimate::new(v0, LayerRule::Top).unwrap();
    let grid = Grid::uniform(vec![-0.8], vec![0.8], 4096).unwrap();
    let truth = basin_grid(&f1, &grid, &OrbitParams::default()).unwrap();
    let c = compare(&grid_scan(&est, &grid).unwrap(), &truth).unwrap();
    info("example 1 first estimate vs oracle", format!("false inclusion {:.4}, coverage {:.4}", c.false_inclusion_rate, c.coverage));

    let v512 = v0.with_max_degree(512);
    let (_, a) = extend_step(&v512, &f1, &[0.2718], 512, ReexpandMethod::ShiftEmbryo, LayerRule::Top).unwrap();
    let (_, b) = extend_step(&v512, &f1, &[0.2718], 512, ReexpandMethod::OrbitSum(60), LayerRule::Top).unwrap();
    let (ia, ib) = (a.interval(), b.interval());
    info(
        "example 1 re-expansion at 0.2718, p=512",
        format!("shifted embryo {}, orbit sum {}, endpoint gap {:.4} (guard 5e-2)", fmt_iv(ia), fmt_iv(ib), (ia.0 - ib.0).abs().max((ia.1 - ib.1).abs())),
    );

    let f5 = examples::example5();
    let params = ContinuationParams { max_steps: 1, ..Default::default() };
    let run = run_auto(&f5, 128, &params, None).unwrap();
    let g = Grid::uniform(vec![-2.0, -2.0], vec![2.0, 2.0], 256).unwrap();
    let truth = basin_grid(&f5, &g, &OrbitParams::default()).unwrap();
    let u = run.union_raster(&g).unwrap();
    let d0 = grid_scan(&run.steps[0].estimate, &g).unwrap();
    info(
        "example 5 one extension round at p=128",
        format!(
            "{} steps, members {} -> {}, union false inclusion {:.4}",
            run.steps.len(),
            d0.count(Label::Member),
            u.count(Label::Member),
            false_inclusion(&u, &truth)
        ),
    );
}

fn main() {
    let t = Instant::now();
    let mut l = Ledger { failed: Vec::new() };
    let v0 = criterion_1(&mut l);
    criterion_2(&mut l, &v0);
    criterion_3(&mut l);
    criterion_4(&mut l);
    criterion_5(&mut l);
    criterion_6(&mut l);
    criterion_7(&mut l);
    criterion_8(&mut l);
    extra_checks(&v0);
    if l.failed.is_empty() {
        println!("acceptance: all 8 criteria pass ({:.1?})", t.elapsed());
    } else {
        let list: Vec<String> = l.failed.iter().map(|n| n.to_string()).collect();
        println!("acceptance: {} of 8 criteria pass; failing: {} ({:.1?})", 8 - l.failed.len(), list.join(", "), t.elapsed());
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
