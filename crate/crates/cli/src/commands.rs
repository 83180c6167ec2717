use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use ergo_lab_core::dynamics::{convergence_trace, sample_starts, AverageTrace, DynamicalSystem, Observable, TrigPolynomial};
use ergo_lab_core::exp_sums::{
    decay_profile, grid_sums, max_over_grid, short_interval_sum, FrequencyGrid, TIE_RTOL,
};
use ergo_lab_core::maximal::{
    band_maximal, default_lambda_grid, global_maximal, oscillation_sum, weak_type_statistic, LacunaryLadder,
};
use ergo_lab_core::rng::{sign_values, uniform_values};
use ergo_lab_core::spectral::{run_spectral_check, SpectralCheckConfig};
use ergo_lab_core::weights::check_lambda_mu_identity;
use ergo_lab_core::{Complex64, PeriodicSignal, WeightKind, WeightTable, MIXED_PATH_TOL, ROUND_TRIP_TOL};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    resolve_threads, AverageArgs, Command, ExpsumArgs, ExpsumMode, MaximalArgs, MaximalMode, ReportArgs, RunConfig,
    SieveArgs, SignalKind, SpectralArgs,
};
use crate::output::{io_error, sidecar_path, sink, to_json, write_text};
use crate::{CliError, EXIT_VIOLATION};

const TOOL: &str = "ergo-lab";
const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest state space for which a tabulated observable is built.
const MAX_TABULATED: u64 = 1 << 26;
/// Ladder members are searched up to this bound when choosing band endpoints.
const LADDER_SEARCH_LIMIT: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, Serialize)]
struct Tolerances {
    round_trip: f64,
    mixed_path: f64,
    tie_rtol: f64,
}

const TOLERANCES: Tolerances = Tolerances { round_trip: ROUND_TRIP_TOL, mixed_path: MIXED_PATH_TOL, tie_rtol: TIE_RTOL };

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<&'a str>,
    result: Value,
}

/// What a run produced besides its files.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub violation: Option<String>,
    /// Machine-readable summary, also written to the sidecar for CSV outputs.
    pub summary: Option<Value>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violation.is_some() {
            EXIT_VIOLATION
        } else {
            0
        }
    }
}

/// Executes a parsed config on a dedicated worker pool.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let threads = resolve_threads(config.threads)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let started = Instant::now();
    let outcome = pool.install(|| dispatch(config))?;
    if let Some(out) = config.out() {
        let meta = json!({
            "tool": TOOL,
            "version": VERSION,
            "config": config,
            "tolerances": TOLERANCES,
            "summary": outcome.summary,
            "violation": outcome.violation,
            "wall_clock_seconds": started.elapsed().as_secs_f64(),
            "threads": pool.current_num_threads(),
        });
        let path = sidecar_path(out);
        std::fs::write(&path, to_json(&meta)).map_err(|e| io_error(&path, e))?;
    }
    Ok(outcome)
}

fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Sieve(a) => sieve(a),
        Command::Expsum(a) => expsum(a),
        Command::Average(a) => average(a),
        Command::SpectralCheck(a) => json_report(config, a.out.as_ref(), spectral_check(a)?),
        Command::Maximal(a) => json_report(config, a.out.as_ref(), maximal(a)?),
        Command::Report(a) => json_report(config, a.out.as_ref(), report(a)?),
    }
}

fn json_report(config: &RunConfig, out: Option<&PathBuf>, (result, violation): (Value, Option<String>)) -> Result<Outcome, CliError> {
    let envelope = Envelope {
        tool: TOOL,
        version: VERSION,
        config,
        tolerances: TOLERANCES,
        violation: violation.as_deref(),
        result,
    };
    write_text(out, &to_json(&envelope))?;
    Ok(Outcome { violation, summary: None })
}

fn write_err(e: std::io::Error) -> CliError {
    CliError::Io(format!("write failed: {e}"))
}

fn sieve(a: &SieveArgs) -> Result<Outcome, CliError> {
    let table = WeightTable::sieve(a.weight, a.limit)?;
    let mut w = sink(a.out.as_ref())?;
    let header = if a.sums { "n,value,sum" } else { "n,value" };
    writeln!(w, "{header}").map_err(write_err)?;
    let mut sum = 0i64;
    for (n, &v) in (1u64..).zip(table.as_slice()) {
        sum += v as i64;
        if a.sums {
            writeln!(w, "{n},{v},{sum}")
        } else {
            writeln!(w, "{n},{v}")
        }
        .map_err(write_err)?;
    }
    w.flush().map_err(write_err)?;

    let mut summary = json!({ "limit": a.limit, "sum": sum });
    let mut violation = None;
    if a.check_identity {
        let other = match a.weight {
            WeightKind::Mobius => WeightKind::Liouville,
            WeightKind::Liouville => WeightKind::Mobius,
        };
        let other = WeightTable::sieve(other, a.limit)?;
        let (mu, lambda) = match a.weight {
            WeightKind::Mobius => (&table, &other),
            WeightKind::Liouville => (&other, &table),
        };
        let check = check_lambda_mu_identity(mu, lambda, a.limit)?;
        if let Some(n) = check.first_counterexample {
            violation = Some(format!("λ–μ identity fails at n = {n}"));
        }
        summary["identity"] = json!(check);
    }
    Ok(Outcome { violation, summary: Some(summary) })
}

fn expsum(a: &ExpsumArgs) -> Result<Outcome, CliError> {
    let grid = FrequencyGrid::Rational { den: a.grid_den };
    let mut w = sink(a.out.as_ref())?;
    let summary = match a.mode {
        ExpsumMode::Scan => {
            let n = a.n_max.expect("validated");
            let table = WeightTable::sieve(a.weight, n)?;
            let sums = grid_sums(&table, &a.poly, grid, n)?;
            writeln!(w, "theta,re,im,abs").map_err(write_err)?;
            for (i, s) in sums.iter().enumerate() {
                let theta = grid.frequency(i).theta();
                writeln!(w, "{theta},{},{},{}", s.re, s.im, s.norm()).map_err(write_err)?;
            }
            json!({ "maximum": max_over_grid(&table, &a.poly, grid, n)? })
        }
        ExpsumMode::Profile => {
            let ns = a.n_list.as_ref().expect("validated");
            let top = ns.iter().copied().max().unwrap_or(1);
            let table = WeightTable::sieve(a.weight, top)?;
            let profile = decay_profile(&table, &a.poly, grid, ns)?;
            writeln!(w, "N,max_abs,theta_star").map_err(write_err)?;
            for r in &profile.rows {
                writeln!(w, "{},{},{}", r.n, r.max_abs, r.theta_star).map_err(write_err)?;
            }
            json!({ "fit": profile.fit, "rows": profile.rows })
        }
        ExpsumMode::Short => {
            let (start, span) = (a.start.expect("validated"), a.span.expect("validated"));
            let last = start
                .checked_add(span.saturating_sub(1))
                .ok_or_else(|| CliError::Usage("interval overflows".into()))?;
            let table = WeightTable::sieve(a.weight, last.max(1))?;
            let s = short_interval_sum(&table, a.theta.expect("validated"), start, span)?;
            writeln!(w, "start,span,re,im,abs,zhan_regime").map_err(write_err)?;
            writeln!(w, "{},{},{},{},{},{}", s.start, s.span, s.value.re, s.value.im, s.value.norm(), s.zhan_regime)
                .map_err(write_err)?;
            json!(s)
        }
    };
    w.flush().map_err(write_err)?;
    Ok(Outcome { violation: None, summary: Some(summary) })
}

fn parse_complex_part(s: &str, spec: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("bad number '{s}' in observable '{spec}'")))
}

/// Observable from a spec string. Seeded signals use stream `stream`.
pub(crate) fn observable(spec: &str, system: &DynamicalSystem, seed: u64, stream: u64) -> Result<Observable, CliError> {
    let m = system.modulus();
    let tabulated = |values: Vec<Complex64>| -> Result<Observable, CliError> {
        Ok(Observable::Periodic(PeriodicSignal::new(values)?))
    };
    let need_table = || {
        if m > MAX_TABULATED {
            Err(CliError::Usage(format!("observable '{spec}' needs a table of {m} states")))
        } else {
            Ok(m as usize)
        }
    };
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let trig = |modes: Vec<(i64, Complex64)>| -> Result<Observable, CliError> {
        Ok(Observable::Trig(TrigPolynomial::new(modes)?))
    };
    match head {
        "one" => trig(vec![(0, Complex64::new(1.0, 0.0))]),
        "const" => trig(vec![(0, Complex64::new(parse_complex_part(rest, spec)?, 0.0))]),
        "mode" => {
            let k: i64 = rest.trim().parse().map_err(|_| CliError::Usage(format!("bad mode in '{spec}'")))?;
            trig(vec![(k, Complex64::new(1.0, 0.0))])
        }
        "trig" => {
            let mut modes = Vec::new();
            for term in rest.split(',') {
                let parts: Vec<&str> = term.split(':').collect();
                if parts.len() != 3 {
                    return Err(CliError::Usage(format!("trig terms are m:re:im, got '{term}'")));
                }
                let k: i64 = parts[0].trim().parse().map_err(|_| CliError::Usage(format!("bad mode in '{spec}'")))?;
                modes.push((k, Complex64::new(parse_complex_part(parts[1], spec)?, parse_complex_part(parts[2], spec)?)));
            }
            trig(modes)
        }
        "delta" => {
            let at: i64 = rest.trim().parse().map_err(|_| CliError::Usage(format!("bad point in '{spec}'")))?;
            Ok(Observable::Periodic(PeriodicSignal::delta(need_table()?, at)?))
        }
        "signs" => tabulated(sign_values(seed, stream, need_table()?)),
        "uniform" => tabulated(uniform_values(seed, stream, need_table()?)),
        _ => Err(CliError::Usage(format!(
            "unknown observable '{spec}' (one, const:c, mode:m, trig:m:re:im,..., delta:a, signs, uniform)"
        ))),
    }
}

fn average(a: &AverageArgs) -> Result<Outcome, CliError> {
    let table = WeightTable::sieve(a.weight, a.limit)?;
    let f = observable(&a.f, &a.system, a.seed, 0)?;
    let g = observable(&a.g, &a.system, a.seed, 1)?;
    let bound = f.sup_norm(&a.system)? * g.sup_norm(&a.system)?;
    let starts = sample_starts(&a.system, a.starts, a.seed);
    let traces: Vec<AverageTrace> = starts
        .par_iter()
        .map(|&x| convergence_trace(&a.system, &f, &g, &a.poly_p, &a.poly_q, &table, a.rho, x))
        .collect::<Result<_, _>>()?;

    let mut w = sink(a.out.as_ref())?;
    writeln!(w, "start,N,re,im,abs").map_err(write_err)?;
    let mut violation = None;
    let mut finals = Vec::with_capacity(traces.len());
    for t in &traces {
        for r in &t.rows {
            let abs = r.value.norm();
            writeln!(w, "{},{},{},{},{abs}", t.start, r.n, r.value.re, r.value.im).map_err(write_err)?;
            if abs > bound * (1.0 + ROUND_TRIP_TOL) && violation.is_none() {
                violation = Some(format!("|A_N| = {abs} exceeds ‖f‖∞‖g‖∞ = {bound} at start {}, N = {}", t.start, r.n));
            }
        }
        if let Some(last) = t.rows.last() {
            finals.push(json!({ "start": t.start, "N": last.n, "abs": last.value.norm() }));
        }
    }
    w.flush().map_err(write_err)?;
    Ok(Outcome { violation, summary: Some(json!({ "sup_bound": bound, "final": finals })) })
}

fn spectral_check(a: &SpectralArgs) -> Result<(Value, Option<String>), CliError> {
    let table = WeightTable::sieve(a.weight, a.n.max(1))?;
    let config = SpectralCheckConfig {
        period: a.j,
        n: a.n,
        p: a.poly_p.clone(),
        q: a.poly_q.clone(),
        seed: a.seed,
        trials: a.trials,
        inject_fault: a.inject_fault,
    };
    let report = run_spectral_check(&table, &config)?;
    let violation = (!report.passed).then(|| {
        format!(
            "spectral and direct routes disagree: conv {:e}, square {:e}, kernel {:e}",
            report.max_conv_error, report.max_square5_error, report.max_kernel_error
        )
    });
    Ok((json!(report), violation))
}

fn l2(values: &[f64]) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    (ergo_lab_core::summation::pairwise_sum(&sq) / values.len() as f64).sqrt()
}

fn maximal(a: &MaximalArgs) -> Result<(Value, Option<String>), CliError> {
    let search = LacunaryLadder::new(a.rho, LADDER_SEARCH_LIMIT)?;
    if search.members().len() < a.bands + 2 {
        return Err(CliError::Usage(format!("rho {} does not give {} band endpoints", a.rho, a.bands + 1)));
    }
    let endpoints = &search.members()[1..=a.bands + 1];
    let top = endpoints[a.bands];
    let ladder = LacunaryLadder::new(a.rho, top)?.with_bands(endpoints)?;
    let n_max = a.n_max.unwrap_or(top);
    let table = WeightTable::sieve(a.weight, top.max(n_max))?;
    let make = |stream| match a.signals {
        SignalKind::Signs => sign_values(a.seed, stream, a.j),
        SignalKind::Uniform => uniform_values(a.seed, stream, a.j),
    };
    let phi = PeriodicSignal::new(make(0))?;
    let psi = PeriodicSignal::new(make(1))?;
    let (p, q) = (&a.poly_p, &a.poly_q);

    let mut violation = None;
    let result = match a.mode {
        MaximalMode::Band => {
            if a.band >= a.bands {
                return Err(CliError::Usage(format!("--band {} outside 0..{}", a.band, a.bands)));
            }
            let (lo, hi) = ladder.band(a.band)?;
            let values = band_maximal(&phi, &psi, p, q, &table, &ladder, a.band)?;
            let global = global_maximal(&phi, &psi, p, q, &table, hi)?;
            if let Some(j) = (0..values.len()).find(|&j| values[j] > 2.0 * global[j] * (1.0 + ROUND_TRIP_TOL)) {
                violation = Some(format!("band maximal {} exceeds twice the global maximal {} at j = {j}", values[j], global[j]));
            }
            json!({
                "endpoints": endpoints,
                "band": [lo, hi],
                "l2_norm": l2(&values),
                "max": values.iter().copied().fold(0.0, f64::max),
                "values": values,
            })
        }
        MaximalMode::Global => {
            let values = global_maximal(&phi, &psi, p, q, &table, n_max)?;
            json!({
                "n_max": n_max,
                "l2_norm": l2(&values),
                "max": values.iter().copied().fold(0.0, f64::max),
                "values": values,
            })
        }
        MaximalMode::Weaktype => {
            let grid = default_lambda_grid(phi.sup_norm() * psi.sup_norm());
            let report = weak_type_statistic(&phi, &psi, p, q, &table, n_max, &grid, (a.p_exp, a.q_exp))?;
            json!({ "n_max": n_max, "report": report })
        }
        MaximalMode::Oscillation => json!(oscillation_sum(&phi, &psi, p, q, &table, &ladder, a.bands)?),
    };
    Ok((result, violation))
}

fn report(a: &ReportArgs) -> Result<(Value, Option<String>), CliError> {
    let mut inputs = Vec::with_capacity(a.inputs.len());
    for path in &a.inputs {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let entry = if path.extension().is_some_and(|e| e == "json") {
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: not JSON: {e}", path.display())))?;
            json!({ "path": path.display().to_string(), "kind": "json", "content": value })
        } else {
            let mut lines = text.lines().filter(|l| !l.is_empty());
            let header: Vec<&str> = lines.next().map(|h| h.split(',').collect()).unwrap_or_default();
            let rows: Vec<&str> = lines.collect();
            json!({
                "path": path.display().to_string(),
                "kind": "csv",
                "header": header,
                "rows": rows.len(),
                "first": rows.first().map(|l| l.split(',').collect::<Vec<_>>()),
                "last": rows.last().map(|l| l.split(',').collect::<Vec<_>>()),
            })
        };
        inputs.push(entry);
    }
    Ok((json!({ "inputs": inputs }), None))
}
