//! Text serialization of continuation runs: a short header, then one block
//! per step naming its center, `|V|` there, the estimate and the embryo file.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use daest_core::{ContinuationReport, LayerRule, StopReason};

const HEADER: &str = "REPORT v1";

#[derive(Clone, Debug, PartialEq)]
pub struct StepEntry {
    pub index: usize,
    pub round: usize,
    pub parent: Option<usize>,
    pub center: Vec<f64>,
    pub v_at_center: f64,
    pub inside_parent: bool,
    pub degree: usize,
    pub effective_layer: usize,
    pub layers: Vec<usize>,
    /// Only for one-dimensional runs.
    pub interval: Option<(f64, f64)>,
    pub embryo: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub dim: usize,
    pub rule: LayerRule,
    pub v_max: f64,
    pub stop: StopReason,
    pub union_interval: Option<(f64, f64)>,
    pub steps: Vec<StepEntry>,
}

pub fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::MaxSteps => "max-steps",
        StopReason::NoAdmissibleCenter => "no-admissible-center",
        StopReason::UserCenterListExhausted => "center-list-exhausted",
    }
}

fn parse_stop(s: &str) -> Result<StopReason> {
    Ok(match s {
        "max-steps" => StopReason::MaxSteps,
        "no-admissible-center" => StopReason::NoAdmissibleCenter,
        "center-list-exhausted" => StopReason::UserCenterListExhausted,
        _ => bail!("unknown stop reason `{s}`"),
    })
}

pub fn rule_name(r: LayerRule) -> String {
    match r {
        LayerRule::Top => "top".into(),
        LayerRule::TopL(l) => format!("top-{l}"),
    }
}

pub fn parse_rule(s: &str) -> Result<LayerRule> {
    if s == "top" {
        return Ok(LayerRule::Top);
    }
    let l = s
        .strip_prefix("top-")
        .and_then(|l| l.parse::<usize>().ok())
        .filter(|&l| l > 0)
        .ok_or_else(|| anyhow!("layer rule must be `top` or `top-L` with L >= 1, got `{s}`"))?;
    Ok(LayerRule::TopL(l))
}

impl Report {
    /// `embryo_path(k)` names the archive written for step `k`.
    pub fn from_run(run: &ContinuationReport, embryo_path: impl Fn(usize) -> String) -> Report {
        let dim = run.steps[0].estimate.dim();
        let steps = run
            .steps
            .iter()
            .map(|s| StepEntry {
                index: s.index,
                round: s.round,
                parent: s.parent,
                center: s.center.clone(),
                v_at_center: s.v_at_center,
                inside_parent: s.inside_parent,
                degree: s.estimate.degree(),
                effective_layer: s.estimate.effective_layer(),
                layers: s.estimate.layers_used(),
                interval: (dim == 1).then(|| s.estimate.interval()),
                embryo: embryo_path(s.index),
            })
            .collect();
        Report {
            dim,
            rule: run.steps[0].estimate.rule(),
            v_max: run.v_max,
            stop: run.stop,
            union_interval: run.union_interval(),
            steps,
        }
    }
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

pub fn write_report(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "dim {}", r.dim);
    let _ = writeln!(out, "rule {}", rule_name(r.rule));
    let _ = writeln!(out, "v_max {:?}", r.v_max);
    let _ = writeln!(out, "stop {}", stop_name(r.stop));
    if let Some((lo, hi)) = r.union_interval {
        let _ = writeln!(out, "union {lo:?} {hi:?}");
    }
    let _ = writeln!(out, "steps {}", r.steps.len());
    for s in &r.steps {
        let _ = writeln!(out);
        let _ = writeln!(out, "step {}", s.index);
        let _ = writeln!(out, "round {}", s.round);
        match s.parent {
            Some(p) => {
                let _ = writeln!(out, "parent {p}");
            }
            None => {
                let _ = writeln!(out, "parent none");
            }
        }
        let _ = writeln!(out, "center {}", floats(&s.center));
        let _ = writeln!(out, "v_at_center {:?}", s.v_at_center);
        let _ = writeln!(out, "inside_parent {}", s.inside_parent);
        let _ = writeln!(out, "degree {}", s.degree);
        let _ = writeln!(out, "effective_layer {}", s.effective_layer);
        let layers: Vec<String> = s.layers.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "layers {}", layers.join(" "));
        if let Some((lo, hi)) = s.interval {
            let _ = writeln!(out, "interval {lo:?} {hi:?}");
        }
        let _ = writeln!(out, "embryo {}", s.embryo);
    }
    out
}

fn nums<T: std::str::FromStr>(s: &str, n: usize) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let v = s.split_whitespace().map(|t| t.parse::<T>()).collect::<std::result::Result<Vec<T>, _>>()?;
    ensure!(n == 0 || v.len() == n, "expected {n} values");
    Ok(v)
}

fn pair(s: &str) -> Result<(f64, f64)> {
    let v: Vec<f64> = nums(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn read_report(text: &str) -> Result<Report> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => bail!("not a report (expected `{HEADER}`)"),
    }
    let mut dim = None;
    let mut rule = LayerRule::Top;
    let mut v_max = None;
    let mut stop = None;
    let mut union_interval = None;
    let mut count = None;
    let mut steps: Vec<StepEntry> = Vec::new();
    for (n, line) in lines {
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        let rest = rest.trim();
        let ctx = || format!("report line {n}");
        if key == "step" {
            let index: usize = rest.parse().with_context(ctx)?;
            ensure!(index == steps.len(), "report line {n}: steps out of order");
            steps.push(StepEntry {
                index,
                round: 0,
                parent: None,
                center: Vec::new(),
                v_at_center: 0.0,
                inside_parent: true,
                degree: 0,
                effective_layer: 0,
                layers: Vec::new(),
                interval: None,
                embryo: String::new(),
            });
            continue;
        }
        match steps.last_mut() {
            None => match key {
                "dim" => dim = Some(rest.parse::<usize>().with_context(ctx)?),
                "rule" => rule = parse_rule(rest).with_context(ctx)?,
                "v_max" => v_max = Some(rest.parse::<f64>().with_context(ctx)?),
                "stop" => stop = Some(parse_stop(rest).with_context(ctx)?),
                "union" => union_interval = Some(pair(rest).with_context(ctx)?),
                "steps" => count = Some(rest.parse::<usize>().with_context(ctx)?),
                _ => bail!("report line {n}: unknown key `{key}`"),
            },
            Some(s) => match key {
                "round" => s.round = rest.parse().with_context(ctx)?,
                "parent" => {
                    s.parent = if rest == "none" { None } else { Some(rest.parse().with_context(ctx)?) }
                }
                "center" => s.center = nums(rest, 0).with_context(ctx)?,
                "v_at_center" => s.v_at_center = rest.parse().with_context(ctx)?,
                "inside_parent" => s.inside_parent = rest.parse().with_context(ctx)?,
                "degree" => s.degree = rest.parse().with_context(ctx)?,
                "effective_layer" => s.effective_layer = rest.parse().with_context(ctx)?,
                "layers" => s.layers = nums(rest, 0).with_context(ctx)?,
                "interval" => s.interval = Some(pair(rest).with_context(ctx)?),
                "embryo" => s.embryo = rest.to_string(),
                _ => bail!("report line {n}: unknown key `{key}`"),
            },
        }
    }
    let dim = dim.ok_or_else(|| anyhow!("report lacks `dim`"))?;
    let count = count.ok_or_else(|| anyhow!("report lacks `steps`"))?;
    ensure!(count == steps.len(), "report announces {count} steps but lists {}", steps.len());
    for s in &steps {
        ensure!(s.center.len() == dim, "step {} center has the wrong dimension", s.index);
        ensure!(!s.embryo.is_empty(), "step {} names no embryo", s.index);
    }
    Ok(Report {
        dim,
        rule,
        v_max: v_max.ok_or_else(|| anyhow!("report lacks `v_max`"))?,
        stop: stop.ok_or_else(|| anyhow!("report lacks `stop`"))?,
        union_interval,
        steps,
    })
}
