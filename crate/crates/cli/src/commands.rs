use std::path::PathBuf;

use deathchain::coalescent::{collision_kernel, rate_gnk, total_rate, CoalescentParams, CollisionSampler};
use deathchain::exact::{moments_n, moments_x, pmf_n, pmf_w, pmf_x, pmf_y, renewal_seq};
use deathchain::harness::{run_acceptance, AcceptanceConfig, Comparison, Criterion};
use deathchain::limits::{
    exp_functional_moments, mittag_leffler_moments, normalizers_thm1, normalizers_thm2, normalizers_thm3,
    normalizers_thm4, phi, LimitSpec, StableLaw,
};
use deathchain::rng::{self, domain};
use deathchain::sim::{run_experiment, run_replicates, Quantity, SimOptions, TrackedStatistic};
use deathchain::stats::histogram;
use deathchain::{JumpLaw, PmfVector, TransitionKernel};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{num, write_csv, Output, Table};
use crate::settings::{parse_grid, parse_list, Settings};
use crate::CliError;

/// Settings every command reads.
const SHARED_KEYS: &[&str] = &["out", "format", "threads", "config"];

fn law(s: &Settings) -> Result<JumpLaw, CliError> {
    Ok(s.require::<String>("law")?.parse::<JumpLaw>()?)
}

fn grid(s: &Settings, default: &str) -> Result<Vec<usize>, CliError> {
    parse_grid(&s.get_or("n", default.to_string())?)
}

fn single_n(s: &Settings, default: usize) -> Result<usize, CliError> {
    let g = grid(s, &default.to_string())?;
    match g.as_slice() {
        [n] => Ok(*n),
        _ => Err(CliError::Config("this table takes a single n".into())),
    }
}

fn pmf_rows(t: &mut Table, n: usize, p: &PmfVector) {
    for (k, v) in p.iter() {
        t.push(vec![json!(n), json!(k), num(v)]);
    }
}

/// Fails on settings that no step of the command read.
pub fn check_unread(s: &Settings) -> Result<(), CliError> {
    for k in SHARED_KEYS {
        s.mark_read(k);
    }
    let unread = s.unread();
    if unread.is_empty() {
        Ok(())
    } else {
        let keys: Vec<String> = unread.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        Err(CliError::Config(format!("unused settings: {}", keys.join(", "))))
    }
}

pub fn exact(s: &Settings) -> Result<Output, CliError> {
    let law = law(s)?;
    let which = s.get_or("table", "moments-x".to_string())?;
    let mut t = Table::new(&["n", "k", "value"]);
    match which.as_str() {
        "moments-x" | "moments-n" => {
            let n_max = single_n(s, 1000)?;
            let k_max = s.get_or("k_max", 2usize)?;
            let table = if which == "moments-x" {
                moments_x(&TransitionKernel::from_law(law), n_max, k_max)?
            } else {
                moments_n(&law, n_max, k_max)?
            };
            for (n, k, v) in table.rows() {
                t.push(vec![json!(n), json!(k), num(v)]);
            }
        }
        "pmf-x" => {
            let kernel = TransitionKernel::from_law(law);
            for n in grid(s, "100")? {
                pmf_rows(&mut t, n, &pmf_x(&kernel, n)?);
            }
        }
        "pmf-n" => {
            for n in grid(s, "100")? {
                pmf_rows(&mut t, n, &pmf_n(&law, n)?);
            }
        }
        "pmf-y" => {
            for n in grid(s, "100")? {
                pmf_rows(&mut t, n, &pmf_y(&law, n)?);
            }
        }
        "pmf-w" => {
            // n is the truncation point of the support
            let n = single_n(s, 100)?;
            pmf_rows(&mut t, n, &pmf_w(&law, n)?);
        }
        "renewal" => {
            let n = single_n(s, 100)?;
            for (k, &u) in renewal_seq(&law, n).values().iter().enumerate() {
                t.push(vec![json!(n), json!(k), num(u)]);
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown exact table {other:?} (moments-x, moments-n, pmf-x, pmf-n, pmf-y, pmf-w, renewal)"
            )))
        }
    }
    Ok(t.into())
}

fn quantity(name: &str) -> Result<Quantity, CliError> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "m" => Quantity::M,
        "n" => Quantity::FirstPassage,
        "y" => Quantity::Y,
        "t" => Quantity::T,
        "m0" => Quantity::M0,
        "decomposition" | "m-n+1" => Quantity::Decomposition,
        other => return Err(CliError::Config(format!("unknown statistic {other:?} (m, n, y, t, m0, decomposition)"))),
    })
}

/// Raw replicates as `n,M,N,Y,T,M0`.
fn dump_replicates(path: PathBuf, law: &JumpLaw, grid: &[usize], reps: u64, seed: u64) -> Result<(), CliError> {
    let mut t = Table::new(&["n", "M", "N", "Y", "T", "M0"]);
    for &n in grid {
        for r in run_replicates(law, n as u64, reps, seed, SimOptions::default())? {
            t.push(vec![json!(r.n), json!(r.m), json!(r.first_passage), json!(r.y), json!(r.t), json!(r.m0)]);
        }
    }
    write_csv(&t, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn simulate(s: &Settings) -> Result<Output, CliError> {
    let law = law(s)?;
    let grid = grid(s, "1000")?;
    let reps = s.get_or("reps", 10_000u64)?;
    if reps < 100 {
        return Err(CliError::Config(format!("reps = {reps}: at least 100 are needed for standard errors")));
    }
    let seed = s.get_or("seed", 1u64)?;
    let stats = parse_list(&s.get_or("stats", "m,n,y,t,m0".to_string())?)
        .iter()
        .map(|q| quantity(q).map(TrackedStatistic::raw))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["n", "statistic", "reps", "mean", "m2", "m3", "m4", "se_mean"]);
    let mut summaries = Vec::new();
    for &n in &grid {
        if n < 2 {
            return Err(CliError::Config("simulation needs n >= 2".into()));
        }
        let summary = run_experiment(&law, n as u64, reps, seed, &stats)?;
        for st in &summary.stats {
            let m = st.moments;
            t.push(vec![
                json!(n),
                json!(st.name),
                json!(reps),
                num(st.mean),
                num(m[1]),
                num(m[2]),
                num(m[3]),
                st.se_mean().map(num).unwrap_or(Value::Null),
            ]);
        }
        summaries.push(serde_json::to_value(&summary)?);
    }
    if let Some(path) = s.get::<PathBuf>("dump")? {
        dump_replicates(path, &law, &grid, reps, seed)?;
    }
    Ok(Output { table: t, json: Some(Value::Array(summaries)) })
}

pub fn coalescent(s: &Settings) -> Result<Output, CliError> {
    let p = CoalescentParams::new(s.get_or("a", 1.0f64)?, s.get_or("b", 1.0f64)?)?;
    let which = s.get_or("table", "rates".to_string())?;
    let grid = grid(s, "10")?;
    if grid[0] < 2 {
        return Err(CliError::Config("block counts start at n = 2".into()));
    }
    match which.as_str() {
        "rates" => {
            let mut t = Table::new(&["n", "k", "rate"]);
            for &n in &grid {
                for k in 1..n {
                    t.push(vec![json!(n), json!(k), num(rate_gnk(&p, n, k)?)]);
                }
            }
            Ok(t.into())
        }
        "totals" => {
            let mut t = Table::new(&["n", "total_rate"]);
            for &n in &grid {
                t.push(vec![json!(n), num(total_rate(&p, n)?)]);
            }
            Ok(t.into())
        }
        "collisions" => {
            let reps = s.get_or("reps", 10_000u64)?;
            let seed = s.get_or("seed", 1u64)?;
            let with_exact = s.get_or("exact", true)?;
            let n_max = *grid.last().expect("grid is non-empty");
            let sampler = CollisionSampler::new(&p, n_max)?;
            let kernel = collision_kernel(&p, None);
            let mut t = Table::new(&["n", "collisions", "count", "frequency", "exact"]);
            for &n in &grid {
                let counts = (0..reps)
                    .into_par_iter()
                    .map(|r| sampler.simulate(n, &mut rng::stream(seed, domain::AUXILIARY, r)))
                    .collect::<Result<Vec<u64>, _>>()?;
                let hist = histogram(counts);
                let exact = if with_exact { Some(pmf_x(&kernel, n)?) } else { None };
                let hi = hist.keys().next_back().copied().unwrap_or(0).max(n as u64 - 1);
                for k in 1..=hi {
                    let c = hist.get(&k).copied().unwrap_or(0);
                    let e = exact.as_ref().map(|p| num(p.get(k as usize))).unwrap_or(Value::Null);
                    if c == 0 && exact.as_ref().is_none_or(|p| p.get(k as usize) == 0.0) {
                        continue;
                    }
                    t.push(vec![json!(n), json!(k), json!(c), num(c as f64 / reps as f64), e]);
                }
            }
            Ok(t.into())
        }
        other => Err(CliError::Config(format!("unknown coalescent table {other:?} (rates, totals, collisions)"))),
    }
}

fn x_grid(s: &Settings, lo: f64, hi: f64, points: usize) -> Result<(f64, f64, usize), CliError> {
    let lo = s.get_or("lo", lo)?;
    let hi = s.get_or("hi", hi)?;
    let points = s.get_or("points", points)?;
    if !(hi > lo) || points < 2 {
        return Err(CliError::Config("grid needs lo < hi and at least two points".into()));
    }
    Ok((lo, hi, points))
}

fn limit_spec(s: &Settings, law: &JumpLaw, n_max: usize) -> Result<LimitSpec, CliError> {
    Ok(match s.get_or("regime", "wlln".to_string())?.as_str() {
        "wlln" => normalizers_thm1(law, n_max),
        "stable" => normalizers_thm2(law)?,
        "exp-functional" => normalizers_thm3(law)?,
        "stable1" => normalizers_thm4(law, n_max as f64)?,
        other => {
            return Err(CliError::Config(format!("unknown regime {other:?} (wlln, stable, exp-functional, stable1)")))
        }
    })
}

pub fn limits(s: &Settings) -> Result<Output, CliError> {
    let which = s.get_or("table", "stable-cdf".to_string())?;
    match which.as_str() {
        "phi" => {
            let alpha = s.get_or("alpha", 0.5f64)?;
            let (lo, hi, points) = x_grid(s, 0.0, 10.0, 101)?;
            let mut t = Table::new(&["x", "phi"]);
            for i in 0..points {
                let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                t.push(vec![num(x), num(phi(alpha, x)?)]);
            }
            Ok(t.into())
        }
        "stable-cdf" => {
            let law = StableLaw::new(s.get_or("alpha", 1.5f64)?, s.get_or("c", 1.0f64)?)?;
            let (lo, hi, points) = x_grid(s, -10.0, 10.0, 201)?;
            let tab = law.tabulate(lo, hi, points)?;
            let mut t = Table::new(&["x", "cdf"]);
            for (x, f) in tab.grid() {
                t.push(vec![num(x), num(f)]);
            }
            let std = law.standard();
            let json = json!({
                "alpha": law.alpha(),
                "c": law.c(),
                "standard": { "alpha": std.alpha, "scale": std.scale, "skew": std.skew },
                "grid": t.rows.iter().map(|r| json!({ "x": r[0], "cdf": r[1] })).collect::<Vec<_>>(),
            });
            Ok(Output { table: t, json: Some(json) })
        }
        "moments" => {
            let alpha = s.get_or("alpha", 0.5f64)?;
            let k_max = s.get_or("k_max", 6usize)?;
            let ef = exp_functional_moments(alpha, k_max)?;
            let ml = mittag_leffler_moments(alpha, k_max)?;
            let mut t = Table::new(&["k", "exp_functional", "mittag_leffler"]);
            for k in 0..=k_max {
                t.push(vec![json!(k), num(ef[k]), num(ml[k])]);
            }
            Ok(t.into())
        }
        "normalizers" => {
            let law = law(s)?;
            let grid = grid(s, "100,1000,10000")?;
            let n_max = *grid.last().expect("grid is non-empty");
            let spec = limit_spec(s, &law, n_max)?;
            let mut t = Table::new(&["n", "b", "a"]);
            for n in grid {
                t.push(vec![json!(n), num(spec.b(n as f64)), num(spec.a(n as f64))]);
            }
            let json = json!({
                "law": law.to_string(),
                "regime": serde_json::to_value(spec.regime)?,
                "target": spec.target.map(|l| json!({ "alpha": l.alpha(), "c": l.c() })),
                "rows": t.rows.iter().map(|r| json!({ "n": r[0], "b": r[1], "a": r[2] })).collect::<Vec<_>>(),
            });
            Ok(Output { table: t, json: Some(json) })
        }
        other => Err(CliError::Config(format!("unknown limits table {other:?} (phi, stable-cdf, moments, normalizers)"))),
    }
}

fn comparison(c: Comparison) -> &'static str {
    match c {
        Comparison::Within => "within",
        Comparison::AtMost => "at_most",
        Comparison::AtLeast => "at_least",
    }
}

/// Runs the acceptance criteria; the boolean is the overall verdict.
pub fn verify(s: &Settings) -> Result<(Output, bool), CliError> {
    let ids = match s.text("criteria") {
        None => Criterion::ALL.to_vec(),
        Some(list) => parse_list(&list).iter().map(|c| c.parse::<Criterion>()).collect::<Result<Vec<_>, _>>()?,
    };
    let mut cfg = AcceptanceConfig::default();
    if let Some(reps) = s.get::<u64>("reps")? {
        cfg = cfg.with_reps(reps);
    }
    // every remaining key is an acceptance setting
    for k in SHARED_KEYS {
        s.mark_read(k);
    }
    for (k, v) in s.unread() {
        cfg.set(&k, &v)?;
        s.mark_read(&k);
    }
    let _ = s.get_or("seed", cfg.seed)?;
    let report = run_acceptance(&ids, &cfg);
    for r in &report.results {
        eprintln!("{}", r.summary_line());
    }
    // wall-clock times stay out of the table so equal runs give equal files
    let mut t = Table::new(&[
        "criterion",
        "check",
        "observed",
        "target",
        "tolerance",
        "comparison",
        "std_error",
        "required",
        "pass",
    ]);
    for res in &report.results {
        if res.rows.is_empty() {
            let msg = res.error.clone().unwrap_or_else(|| "no checks".into());
            t.push(vec![
                json!(res.id.to_string()),
                json!(msg),
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
                json!(true),
                json!(res.pass),
            ]);
        }
        for row in &res.rows {
            t.push(vec![
                json!(row.criterion.to_string()),
                json!(row.check),
                num(row.observed),
                num(row.target),
                num(row.tolerance),
                json!(comparison(row.comparison)),
                row.std_error.map(num).unwrap_or(Value::Null),
                json!(row.required),
                json!(row.pass),
            ]);
        }
    }
    let pass = report.all_pass();
    let json = json!({ "all_pass": pass, "acceptance": serde_json::to_value(&cfg)?, "report": serde_json::to_value(&report)? });
    Ok((Output { table: t, json: Some(json) }, pass))
}
