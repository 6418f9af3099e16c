use std::io::Write;

use anyhow::{bail, Context, Result};
use neel_core::acceptance::{run_suite, AcceptanceOptions};
use neel_core::geometry::{Model, WallConfig};
use neel_core::micromag::{
    fit_expansion, leading_order, minimize_energy, paired_fit, read_profile_csv, sample_energies, DescentStatus,
    FitPoint,
};
use neel_core::renorm::{self, positive_subblock, renormalised_energy, scan_path, CollapsePath, MinimizeOptions};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{Chart, Sink};

/// Stdout line; a closed pipe is not an error.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    say(&serde_json::to_string_pretty(v)?);
    Ok(())
}

fn signs_i32(c: &WallConfig) -> Vec<i32> {
    c.signs().iter().map(|&s| i32::from(s)).collect()
}

#[derive(Serialize)]
struct WallRow {
    index: usize,
    position: f64,
    sign: i32,
    self_term: f64,
    gradient: f64,
}

pub fn eval_w(cfg: &RunConfig) -> Result<u8> {
    let c = cfg.wall_config()?;
    let r = renormalised_energy(&c)?;
    #[derive(Serialize)]
    struct Out<'a> {
        model: Model,
        alpha: f64,
        positions: &'a [f64],
        signs: Vec<i32>,
        #[serde(rename = "W")]
        w: f64,
        gradient: &'a [f64],
        self_terms: &'a [f64],
        pair_terms: &'a [Vec<f64>],
    }
    let out = Out {
        model: c.model(),
        alpha: c.alpha(),
        positions: c.positions(),
        signs: signs_i32(&c),
        w: r.value,
        gradient: &r.gradient,
        self_terms: &r.self_terms,
        pair_terms: &r.pair_terms,
    };
    let mut sink = Sink::new(cfg)?;
    sink.json("eval-w.json", &out)?;
    let rows: Vec<WallRow> = (0..c.len())
        .map(|i| WallRow {
            index: i,
            position: c.positions()[i],
            sign: i32::from(c.signs()[i]),
            self_term: r.self_terms[i],
            gradient: r.gradient[i],
        })
        .collect();
    sink.table("walls", &rows)?;
    sink.manifest(cfg, json!({ "walls": c }))?;
    print_json(&out)?;
    Ok(0)
}

pub fn minimize_w(cfg: &RunConfig) -> Result<u8> {
    let c = cfg.wall_config()?;
    let opts = MinimizeOptions::default();
    let starts = cfg.starts.unwrap_or(1);
    let reports = if starts <= 1 {
        vec![renorm::minimize_w(&c, &opts)?]
    } else {
        renorm::multi_start_minimize(&c, starts, cfg.seed(), &opts)?
    };
    #[derive(Serialize)]
    struct Row {
        run: usize,
        status: renorm::MinimizeStatus,
        w: f64,
        gradient_norm: f64,
        iterations: usize,
        wall: usize,
        position: f64,
    }
    let mut rows = vec![];
    for (k, r) in reports.iter().enumerate() {
        for (i, a) in r.argmin.iter().enumerate() {
            rows.push(Row {
                run: k,
                status: r.status,
                w: r.w,
                gradient_norm: r.gradient_norm,
                iterations: r.iterations,
                wall: i,
                position: *a,
            });
        }
    }
    let mut sink = Sink::new(cfg)?;
    sink.json("minimize-w.json", &reports)?;
    sink.table("minimize-w-runs", &rows)?;
    sink.manifest(cfg, json!({ "walls": c, "options": opts, "starts": starts, "seed": cfg.seed() }))?;
    let summary: Vec<_> = reports
        .iter()
        .map(|r| json!({ "status": r.status, "W": r.w, "argmin": r.argmin, "gradient_norm": r.gradient_norm }))
        .collect();
    print_json(&if summary.len() == 1 { summary[0].clone() } else { json!(summary) })?;
    Ok(0)
}

fn parse_path(spec: &str, c: &WallConfig) -> Result<CollapsePath> {
    let parts: Vec<&str> = spec.split(':').collect();
    let idx = |s: &str| s.parse::<usize>().with_context(|| format!("bad index '{s}' in path '{spec}'"));
    Ok(match parts.as_slice() {
        ["uniform"] => CollapsePath::Uniform,
        ["pair", i] => CollapsePath::Pair { index: idx(i)? },
        ["subblock", k, l] => CollapsePath::SubBlock { first: idx(k)?, last: idx(l)? },
        ["subblock"] => {
            let (first, last) = positive_subblock(c.signs(), c.alpha())
                .context("no sub-block with a positive sign sum at this angle")?;
            CollapsePath::SubBlock { first, last }
        }
        _ => bail!("unknown path '{spec}'; use uniform, pair:I, subblock or subblock:K:L"),
    })
}

pub fn scan(cfg: &RunConfig) -> Result<u8> {
    let c = cfg.wall_config()?;
    let path = parse_path(cfg.path.as_deref().unwrap_or("uniform"), &c)?;
    let (lo, hi, n) = (cfg.eta_min.unwrap_or(1e-6), cfg.eta_max.unwrap_or(1.0), cfg.points.unwrap_or(25));
    if !(lo > 0.0 && hi >= lo) || n < 2 {
        bail!("need 0 < eta-min ≤ eta-max and at least 2 points");
    }
    let etas: Vec<f64> = (0..n).map(|k| hi * (lo / hi).powf(k as f64 / (n - 1) as f64)).collect();
    let pts = scan_path(&c, path, &etas)?;
    let mut sink = Sink::new(cfg)?;
    sink.table("scan", &pts)?;
    sink.svg(
        "scan.svg",
        &Chart {
            title: format!("W along the {} path", cfg.path.as_deref().unwrap_or("uniform")),
            x_label: "eta".into(),
            y_label: "W".into(),
            log_x: true,
            series: vec![("W".into(), pts.iter().map(|p| (p.eta, p.w)).collect())],
        },
    )?;
    sink.manifest(cfg, json!({ "walls": c, "path": path, "etas": etas }))?;
    print_json(&pts)?;
    Ok(0)
}

pub fn simulate(cfg: &RunConfig) -> Result<u8> {
    let c = cfg.wall_config()?;
    let params = cfg.simulation_params()?;
    let init = match &cfg.init {
        Some(p) => Some(read_profile_csv(p)?),
        None => None,
    };
    let m = minimize_energy(&c, &params, init.as_ref())?;
    #[derive(Serialize)]
    struct Row {
        x: f64,
        phi: f64,
        m1: f64,
        m2: f64,
    }
    let rows: Vec<Row> = m
        .profile
        .phi
        .iter()
        .enumerate()
        .map(|(i, &p)| Row { x: m.profile.grid.x(i), phi: p, m1: p.cos(), m2: p.sin() })
        .collect();
    let prediction = leading_order(c.gammas().total, params.delta());
    let summary = json!({
        "energy": m.energy,
        "leading_order": prediction,
        "iterations": m.iterations,
        "gradient_norm": m.gradient_norm,
        "status": m.status,
        "boundary_residual": m.boundary_residual,
        "grid": m.profile.grid,
    });
    let mut sink = Sink::new(cfg)?;
    sink.table("profile", &rows)?;
    if !m.trace.is_empty() {
        sink.table("trace", &m.trace)?;
    }
    sink.json("simulate.json", &summary)?;
    if sink.svg_enabled() {
        let x: Vec<f64> = (0..rows.len()).map(|i| m.profile.grid.x(i)).collect();
        sink.svg(
            "profile.svg",
            &Chart {
                title: format!("profile at ε = {}", params.epsilon),
                x_label: "x".into(),
                y_label: "m".into(),
                log_x: false,
                series: vec![
                    ("m1".into(), x.iter().zip(&rows).map(|(a, r)| (*a, r.m1)).collect()),
                    ("m2".into(), x.iter().zip(&rows).map(|(a, r)| (*a, r.m2)).collect()),
                ],
            },
        )?;
    }
    sink.manifest(cfg, json!({ "walls": c, "params": params }))?;
    print_json(&summary)?;
    if m.status == DescentStatus::MaxIter {
        eprintln!("error: descent hit the iteration cap (gradient norm {:.3e})", m.gradient_norm);
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct FitRow {
    config: usize,
    epsilon: f64,
    delta: f64,
    log_inv_delta: f64,
    exchange: f64,
    anisotropy: f64,
    stray: f64,
    total: f64,
    status: DescentStatus,
    gradient_norm: f64,
}

fn fit_rows(k: usize, pts: &[FitPoint]) -> impl Iterator<Item = FitRow> + '_ {
    pts.iter().map(move |p| FitRow {
        config: k,
        epsilon: p.epsilon,
        delta: p.delta,
        log_inv_delta: (1.0 / p.delta).ln(),
        exchange: p.energy.exchange,
        anisotropy: p.energy.anisotropy,
        stray: p.energy.stray,
        total: p.energy.total,
        status: p.status,
        gradient_norm: p.gradient_norm,
    })
}

pub fn fit(cfg: &RunConfig) -> Result<u8> {
    let c = cfg.wall_config()?;
    let other = cfg.compare_config()?;
    let params = cfg.simulation_params()?;
    let eps = cfg.epsilons();
    let p1 = sample_energies(&c, &eps, &params)?;
    let f1 = fit_expansion(&c, &p1)?;
    let mut rows: Vec<FitRow> = fit_rows(0, &p1).collect();
    let mut series = vec![("config 0".to_string(), p1.iter().map(|p| energy_point(p)).collect::<Vec<_>>())];
    let mut summary = json!({
        "A": f1.a,
        "B": f1.b,
        "residual": f1.residual,
        "leading_reference": f1.leading_reference,
        "W": f1.w,
        "core_estimate": f1.core_estimate,
    });
    if let Some(c2) = &other {
        let p2 = sample_energies(c2, &eps, &params)?;
        let f2 = fit_expansion(c2, &p2)?;
        let joint = paired_fit((&c, &p1), (c2, &p2))?;
        rows.extend(fit_rows(1, &p2));
        series.push(("config 1".to_string(), p2.iter().map(|p| energy_point(p)).collect()));
        summary = json!({
            "first": summary,
            "second": { "A": f2.a, "B": f2.b, "residual": f2.residual, "W": f2.w, "core_estimate": f2.core_estimate },
            "paired": joint,
        });
    }
    let mut sink = Sink::new(cfg)?;
    sink.table("fit-points", &rows)?;
    sink.json("fit.json", &summary)?;
    sink.svg(
        "fit.svg",
        &Chart {
            title: "E log(1/δ) against 1/log(1/δ)".into(),
            x_label: "1/log(1/δ)".into(),
            y_label: "E log(1/δ)".into(),
            log_x: false,
            series,
        },
    )?;
    sink.manifest(cfg, json!({ "walls": c, "compare": other, "params": params, "epsilons": eps }))?;
    print_json(&summary)?;
    let capped: Vec<f64> = rows.iter().filter(|r| r.status == DescentStatus::MaxIter).map(|r| r.epsilon).collect();
    if !capped.is_empty() {
        eprintln!("error: descent hit the iteration cap at ε = {capped:?}");
        return Ok(3);
    }
    Ok(0)
}

fn energy_point(p: &FitPoint) -> (f64, f64) {
    let l = (1.0 / p.delta).ln();
    (1.0 / l, p.energy.total * l)
}

pub fn verify(cfg: &RunConfig) -> Result<u8> {
    let suite = cfg.suite.as_deref().unwrap_or("all");
    let d = AcceptanceOptions::default();
    let opts = AcceptanceOptions { nodes: cfg.nodes.unwrap_or(d.nodes), seed: cfg.seed.unwrap_or(d.seed) };
    let reports = run_suite(suite, &opts)?;
    #[derive(Serialize)]
    struct Row<'a> {
        criterion: u8,
        suite: &'a str,
        check: &'a str,
        measured: f64,
        expected: f64,
        tolerance: f64,
        kind: &'a str,
        pass: bool,
        informational: bool,
    }
    let mut rows = vec![];
    for r in &reports {
        say(&r.summary());
        for k in &r.checks {
            let tag = if k.informational { "info" } else if k.pass { "ok" } else { "fail" };
            say(&format!(
                "    {tag:<4} {}: measured {:.6e}, expected {:.6e}, tol {:.1e} ({})",
                k.label, k.measured, k.expected, k.tolerance, k.kind
            ));
            rows.push(Row {
                criterion: r.id,
                suite: &r.suite,
                check: &k.label,
                measured: k.measured,
                expected: k.expected,
                tolerance: k.tolerance,
                kind: &k.kind,
                pass: k.pass,
                informational: k.informational,
            });
        }
    }
    let mut sink = Sink::new(cfg)?;
    sink.table("verify", &rows)?;
    sink.json("verify-report.json", &reports)?;
    sink.manifest(cfg, json!({ "suite": suite, "options": opts }))?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| format!("{} ({})", r.id, r.title)).collect();
    if failed.is_empty() {
        say(&format!("all {} criteria passed", reports.len()));
        Ok(0)
    } else {
        eprintln!("failed criteria: {}", failed.join(", "));
        Ok(1)
    }
}
