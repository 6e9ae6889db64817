use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mtlab::bubble::BubbleFamily;
use mtlab::design::{certify_lower_bound, search_design, simplex_design, DesignFile, MomentDesign, SearchParams};
use mtlab::grid::{build_grid, default_resolution};
use mtlab::mt::{concentration_profile, default_attribution_radius, mt_constants, sharpness_sweep, DEFAULT_EPS};
use mtlab::sphere::SpherePoint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::Status;

const DEFAULT_N: usize = 2;
const DEFAULT_DELTA: f64 = PI / 8.0;
const DEFAULT_SEEDS: usize = 20;
const DEFAULT_ITERS: usize = 200;

/// The config as echoed into outputs: destinations are not part of a result.
fn echo(cfg: &RunConfig) -> Value {
    let mut c = cfg.clone();
    c.out = None;
    c.summary = None;
    serde_json::to_value(c).expect("config is plain data")
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(cfg: &RunConfig, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_out(cfg, &text)
}

pub fn constants(cfg: &RunConfig) -> Result<Status> {
    let s = cfg.s.ok_or_else(|| anyhow!("--s is required"))?;
    let n = cfg.n.ok_or_else(|| anyhow!("--n is required"))?;
    let c = mt_constants(s, u32::try_from(n)?)?;
    write_json(cfg, &json!({ "config": echo(cfg), "s": c.s, "n": c.n, "a": c.a, "alpha": c.alpha }))?;
    Ok(Status::Ok)
}

/// Reads a bare design or an object holding one under "design".
fn read_design(path: &Path) -> Result<MomentDesign> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(inner) = value.get_mut("design") {
        value = inner.take();
    }
    let file: DesignFile = serde_json::from_value(value).with_context(|| format!("reading design from {}", path.display()))?;
    Ok(MomentDesign::from_file(file)?)
}

fn named_design(name: &str, n: usize) -> Result<MomentDesign> {
    Ok(match name {
        "simplex" => simplex_design(n)?,
        "antipodal" => {
            let e = SpherePoint::basis(n, n);
            MomentDesign::new(n, 1, vec![e.clone(), e.neg()], vec![0.5, 0.5])?
        }
        "single" => MomentDesign::new(n, 0, vec![SpherePoint::basis(n, n)], vec![1.0])?,
        path => read_design(Path::new(path))?,
    })
}

fn design_json(cfg: &RunConfig, design: &MomentDesign, extra: Value) -> Value {
    let mut out = json!({ "config": echo(cfg), "design": design.to_file(), "valid": design.is_valid() });
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    out
}

fn validity(design: &MomentDesign) -> Status {
    if design.is_valid() {
        Status::Ok
    } else {
        Status::NotValid
    }
}

pub fn design_simplex(cfg: &RunConfig) -> Result<Status> {
    let mut cfg = cfg.clone();
    let n = *cfg.n.get_or_insert(DEFAULT_N);
    let design = simplex_design(n)?;
    write_json(&cfg, &design_json(&cfg, &design, json!({})))?;
    Ok(validity(&design))
}

fn input_file(cfg: &RunConfig) -> Result<&str> {
    cfg.file.as_deref().ok_or_else(|| anyhow!("--file is required"))
}

pub fn design_verify(cfg: &RunConfig) -> Result<Status> {
    let design = read_design(Path::new(input_file(cfg)?))?;
    write_json(cfg, &design_json(cfg, &design, json!({})))?;
    Ok(validity(&design))
}

/// Exit 0 when a certificate of infeasibility is found, 1 when none is.
pub fn design_certify(cfg: &RunConfig) -> Result<Status> {
    let path = Path::new(input_file(cfg)?);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("design") {
        value = inner.take();
    }
    let raw = value
        .get("points")
        .cloned()
        .ok_or_else(|| anyhow!("{} has no \"points\" array", path.display()))?;
    let coords: Vec<Vec<f64>> = serde_json::from_value(raw)?;
    let points = coords.into_iter().map(SpherePoint::new).collect::<mtlab::Result<Vec<_>>>()?;
    let cert = certify_lower_bound(&points)?;
    let found = cert.is_some();
    let gap = cert.as_ref().map(|c| c.gap());
    write_json(cfg, &json!({ "config": echo(cfg), "certificate": cert, "gap": gap }))?;
    Ok(if found { Status::Ok } else { Status::NotValid })
}

pub fn design_search(cfg: &RunConfig) -> Result<Status> {
    let mut cfg = cfg.clone();
    let params = SearchParams {
        n: *cfg.n.get_or_insert(DEFAULT_N),
        m: *cfg.m.get_or_insert(2),
        count: cfg.count.ok_or_else(|| anyhow!("--N is required"))?,
        seeds: *cfg.seeds.get_or_insert(DEFAULT_SEEDS),
        iters: *cfg.iters.get_or_insert(DEFAULT_ITERS),
        rng_seed: *cfg.seed.get_or_insert(0),
    };
    let outcome = search_design(&params)?;
    let extra = json!({
        "residual": outcome.design.residual(),
        "best_seed": outcome.best_seed,
        "seed_residuals": outcome.seed_residuals,
    });
    write_json(&cfg, &design_json(&cfg, &outcome.design, extra))?;
    if !outcome.valid {
        eprintln!("no valid design found; best residual {:e}", outcome.design.residual());
    }
    Ok(validity(&outcome.design))
}

#[derive(Serialize)]
struct Summary<'a> {
    config: Value,
    a_estimate: Option<f64>,
    target: f64,
    complete: bool,
    approaches_from_above: bool,
    failed_eps: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

pub fn sweep(cfg: &RunConfig) -> Result<Status> {
    let mut cfg = cfg.clone();
    let n = *cfg.n.get_or_insert(DEFAULT_N);
    let design_name = cfg.design.get_or_insert_with(|| "simplex".into()).clone();
    let delta = *cfg.delta.get_or_insert(DEFAULT_DELTA);
    let eps = cfg.eps.get_or_insert_with(|| DEFAULT_EPS.to_vec()).clone();
    if eps.is_empty() {
        bail!("eps list is empty");
    }
    let resolution = *cfg.resolution.get_or_insert(default_resolution(n));
    let design = named_design(&design_name, n)?;
    if design.n() != n {
        bail!("design is on S^{} but --n is {n}", design.n());
    }
    let grid = build_grid(n, resolution)?;
    let report = sharpness_sweep(&design, delta, &eps, &grid, cfg.margin)?;

    let header = vec![format!("config: {}", serde_json::to_string(&echo(&cfg))?)];
    write_out(&cfg, &report.to_csv(&header))?;

    let summary = Summary {
        config: echo(&cfg),
        a_estimate: report.a_estimate,
        target: report.target,
        complete: report.complete,
        approaches_from_above: report.approaches_from_above(),
        failed_eps: report.rows.iter().filter(|r| !r.is_ok()).map(|r| r.eps).collect(),
        note: (!report.complete).then_some("some eps values failed; see the CSV trailer"),
    };
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    match &cfg.summary {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}"))?,
        None => eprint!("{text}"),
    }
    Ok(if report.complete { Status::Ok } else { Status::NotValid })
}

pub fn concentrate(cfg: &RunConfig) -> Result<Status> {
    let mut cfg = cfg.clone();
    let n = *cfg.n.get_or_insert(DEFAULT_N);
    let design_name = cfg.design.get_or_insert_with(|| "antipodal".into()).clone();
    let delta = *cfg.delta.get_or_insert(DEFAULT_DELTA);
    let eps = cfg.eps.get_or_insert_with(|| DEFAULT_EPS.to_vec()).clone();
    if eps.is_empty() {
        bail!("eps list is empty");
    }
    let design = named_design(&design_name, n)?;
    let nu = cfg.nu.get_or_insert_with(|| design.weights().to_vec()).clone();
    let families = eps
        .iter()
        .map(|&e| BubbleFamily::new(design.n(), design.points().to_vec(), nu.clone(), delta, e))
        .collect::<mtlab::Result<Vec<_>>>()?;
    let radius = *cfg.radius.get_or_insert_with(|| default_attribution_radius(&families[0]));
    let reports = concentration_profile(&families, radius)?;
    let reports: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("report is plain data");
            if let Value::Object(o) = &mut v {
                o.shift_insert(0, "eps".into(), json!(r.eps));
            }
            v
        })
        .collect();
    write_json(&cfg, &json!({ "config": echo(&cfg), "reports": reports }))?;
    Ok(Status::Ok)
}
