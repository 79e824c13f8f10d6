use rayon::prelude::*;
use serde_json::{json, Value};

use twb_core::fock::{self, OracleConfig};
use twb_core::{
    char_poly_profile, derive_bath, evolve as evolve_state, physicality_check, ppt_test,
    survival_time_closed, survival_time_numeric, twb_state, BathSpec, DerivedBath, SurvivalMethod,
    SurvivalResult, TwinBeamParams, DEFAULT_TOLERANCE,
};

use crate::format::{fmt_num, num_json, sink, write_csv, write_json};
use crate::{
    ChannelArgs, CharpolyArgs, CliError, EvolveArgs, Fig1Args, OracleArgs, OutputArgs, OutputFormat,
};

type CmdResult = Result<(), CliError>;

fn bath(ch: &ChannelArgs) -> Result<DerivedBath, CliError> {
    let spec = BathSpec::new(ch.n_th, ch.n_s, ch.theta, ch.gamma.unwrap_or(1.0))?;
    Ok(derive_bath(spec)?)
}

fn time_unit(ch: &ChannelArgs) -> &'static str {
    if ch.gamma.is_some() {
        "physical"
    } else {
        "1/gamma"
    }
}

fn params_json(ch: &ChannelArgs) -> Value {
    json!({
        "lambda": num_json(ch.lambda),
        "n_th": num_json(ch.n_th),
        "n_s": num_json(ch.n_s),
        "theta": num_json(ch.theta),
        "gamma": ch.gamma.map_or(Value::Null, num_json),
        "time_unit": time_unit(ch),
    })
}

fn method_name(m: SurvivalMethod) -> &'static str {
    match m {
        SurvivalMethod::ClosedForm => "closed_form",
        SurvivalMethod::Bisection => "bisection",
    }
}

/// Physical time from `Γt` when a rate is given.
fn scale_time(ch: &ChannelArgs, gt: f64) -> f64 {
    ch.gamma.map_or(gt, |g| gt / g)
}

/// Physical evolution time requested by `--t` / `--exp-gt`.
fn requested_time(ch: &ChannelArgs, t: Option<f64>, exp_gt: Option<f64>) -> Result<f64, CliError> {
    match (t, exp_gt) {
        (Some(t), None) => Ok(t),
        (None, Some(e)) => {
            if !(e > 0.0 && e <= 1.0) {
                return Err(CliError::Usage(format!(
                    "--exp-gt must lie in (0, 1], got {e}"
                )));
            }
            Ok(-e.ln() / ch.gamma.unwrap_or(1.0))
        }
        _ => Err(CliError::Usage(
            "exactly one of --t or --exp-gt is required".into(),
        )),
    }
}

pub fn survival(ch: &ChannelArgs, out: &OutputArgs) -> CmdResult {
    let b = bath(ch)?;
    let r: SurvivalResult = if ch.theta == 0.0 {
        survival_time_closed(ch.lambda, ch.n_th, ch.n_s)?
    } else {
        survival_time_numeric(ch.lambda, &b)?
    };
    if r.initially_separable {
        log::warn!("lambda = 0: the input state is separable, t_s = 0 by convention");
    }
    let t_s = scale_time(ch, r.t_s);
    let t_0 = scale_time(ch, r.t_0);
    let mut w = sink(out.out.as_deref())?;
    match out.format {
        OutputFormat::Csv => write_csv(
            &mut w,
            &[
                "lambda", "n_th", "n_s", "theta", "t_s", "t_0", "G", "method",
            ],
            &[vec![
                fmt_num(ch.lambda),
                fmt_num(ch.n_th),
                fmt_num(ch.n_s),
                fmt_num(ch.theta),
                fmt_num(t_s),
                fmt_num(t_0),
                fmt_num(r.g),
                method_name(r.method).to_string(),
            ]],
        )?,
        OutputFormat::Json => write_json(
            &mut w,
            &json!({
                "params": params_json(ch),
                "results": {
                    "t_s": num_json(t_s),
                    "t_0": num_json(t_0),
                    "G": num_json(r.g),
                    "method": method_name(r.method),
                    "initially_separable": r.initially_separable,
                },
            }),
        )?,
    }
    Ok(())
}

/// One swept axis sampled at `count` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Usage("sweep bounds must be finite".into()));
        }
        if self.count > 1 && self.stop <= self.start {
            return Err(CliError::Usage(format!(
                "sweep needs stop > start, got [{}, {}]",
                self.start, self.stop
            )));
        }
        Ok(match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n).map(|i| self.start + step * i as f64).collect()
            }
        })
    }
}

struct Fig1Row {
    lambda: f64,
    n_s: f64,
    r: SurvivalResult,
}

pub fn fig1(a: &Fig1Args) -> CmdResult {
    let ns_axis = SweepAxis {
        start: a.ns_start,
        stop: a.ns_stop,
        count: a.ns_count,
    }
    .values()?;
    let grid: Vec<(f64, f64)> = a
        .lambdas
        .iter()
        .flat_map(|&l| ns_axis.iter().map(move |&ns| (l, ns)))
        .collect();
    let rows: Vec<Fig1Row> = grid
        .par_iter()
        .map(|&(lambda, n_s)| {
            survival_time_closed(lambda, a.n_th, n_s).map(|r| Fig1Row { lambda, n_s, r })
        })
        .collect::<Result<_, _>>()?;

    for (k, &ns) in ns_axis.iter().enumerate() {
        let gs: Vec<f64> = (0..a.lambdas.len())
            .map(|j| rows[j * ns_axis.len() + k].r.g)
            .collect();
        let ordered = gs.windows(2).all(|w| w[0].abs() >= w[1].abs());
        log::info!(
            "n_th={} n_s={ns}: |G| non-increasing in lambda list order: {ordered}",
            a.n_th
        );
    }

    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        OutputFormat::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    vec![
                        fmt_num(row.lambda),
                        fmt_num(a.n_th),
                        fmt_num(row.n_s),
                        fmt_num(row.r.t_s),
                        fmt_num(row.r.t_0),
                        fmt_num(row.r.g),
                    ]
                })
                .collect();
            write_csv(
                &mut w,
                &["lambda", "n_th", "n_s", "t_s", "t_0", "G"],
                &table,
            )?;
        }
        OutputFormat::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "lambda": num_json(row.lambda),
                        "n_th": num_json(a.n_th),
                        "n_s": num_json(row.n_s),
                        "t_s": num_json(row.r.t_s),
                        "t_0": num_json(row.r.t_0),
                        "G": num_json(row.r.g),
                    })
                })
                .collect();
            write_json(
                &mut w,
                &json!({
                    "params": {
                        "n_th": num_json(a.n_th),
                        "lambda": a.lambdas,
                        "n_s": {"start": a.ns_start, "stop": a.ns_stop, "count": a.ns_count},
                        "time_unit": "1/gamma",
                    },
                    "results": results,
                }),
            )?;
        }
    }
    Ok(())
}

pub fn charpoly(a: &CharpolyArgs) -> CmdResult {
    let ch = &a.channel;
    let b = bath(ch)?;
    let report = char_poly_profile(ch.lambda, &b, a.exp_gt)?;
    let xs = SweepAxis {
        start: a.x_min,
        stop: a.x_max,
        count: a.x_count,
    }
    .values()?;
    let roots = report.char_poly_roots();
    let mut params = params_json(ch);
    params["exp_gt"] = num_json(a.exp_gt);
    let summary = json!({
        "roots": roots.iter().map(|z| json!({"re": num_json(z.re), "im": num_json(z.im)})).collect::<Vec<_>>(),
        "eigenvalues": report.eigenvalues.iter().map(|&e| num_json(e)).collect::<Vec<_>>(),
        "char_poly": report.char_poly.iter().map(|&c| num_json(c)).collect::<Vec<_>>(),
        "min_eigenvalue": num_json(report.min_eigenvalue),
        "negative_roots": report.negative_count(DEFAULT_TOLERANCE),
        "separable": report.separable,
    });

    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = xs
                .iter()
                .map(|&x| vec![fmt_num(x), fmt_num(report.eval_char_poly(x))])
                .collect();
            write_csv(&mut w, &["x", "q"], &rows)?;
            let sidecar = json!({"params": params, "results": summary});
            let side_path = a.roots_out.clone().or_else(|| {
                a.output.out.as_ref().map(|p| {
                    let mut s = p.as_os_str().to_owned();
                    s.push(".roots.json");
                    s.into()
                })
            });
            match side_path {
                Some(p) => write_json(&mut sink(Some(&p))?, &sidecar)?,
                None => write_json(&mut std::io::stderr().lock(), &sidecar)?,
            }
        }
        OutputFormat::Json => {
            let mut results = summary;
            results["samples"] = xs
                .iter()
                .map(|&x| json!({"x": num_json(x), "q": num_json(report.eval_char_poly(x))}))
                .collect();
            write_json(&mut w, &json!({"params": params, "results": results}))?;
        }
    }
    Ok(())
}

pub fn evolve(a: &EvolveArgs) -> CmdResult {
    let ch = &a.channel;
    let b = bath(ch)?;
    let t = requested_time(ch, a.t, a.exp_gt)?;
    let s0 = twb_state(TwinBeamParams::new(ch.lambda)?);
    let s = evolve_state(&s0, &b, t)?;
    let ppt = ppt_test(&s, DEFAULT_TOLERANCE)?;
    let physical = physicality_check(&s, DEFAULT_TOLERANCE)?;
    let labels = ["x1", "y1", "x2", "y2"];
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = (0..4)
                .map(|r| {
                    let mut row = vec![labels[r].to_string(), fmt_num(s.mean[r])];
                    row.extend((0..4).map(|c| fmt_num(s.cov[(r, c)])));
                    row
                })
                .collect();
            write_csv(
                &mut w,
                &["quadrature", "mean", "x1", "y1", "x2", "y2"],
                &rows,
            )?;
        }
        OutputFormat::Json => {
            let cov: Vec<Vec<Value>> = (0..4)
                .map(|r| (0..4).map(|c| num_json(s.cov[(r, c)])).collect())
                .collect();
            let mut params = params_json(ch);
            params["t"] = num_json(t);
            write_json(
                &mut w,
                &json!({
                    "params": params,
                    "results": {
                        "gamma_t": num_json(t * b.damping()),
                        "mean": s.mean.iter().map(|&m| num_json(m)).collect::<Vec<_>>(),
                        "cov": cov,
                        "ppt_min_eigenvalue": num_json(ppt.min_eigenvalue),
                        "separable": ppt.separable,
                        "physical": physical,
                    },
                }),
            )?;
        }
    }
    Ok(())
}

/// Gaussian-vs-Fock comparison at one time point.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub gamma_t: f64,
    pub max_cov_discrepancy: f64,
    pub max_mean_discrepancy: f64,
    pub gaussian_min_eigenvalue: f64,
    pub gaussian_separable: bool,
    pub fock_ppt_min_eigenvalue: f64,
    pub fock_separable: bool,
    pub leakage: f64,
    pub pass: bool,
}

pub fn oracle_compare(a: &OracleArgs) -> CmdResult {
    let ch = &a.channel;
    let b = bath(ch)?;
    let t = requested_time(ch, a.t, a.exp_gt)?;
    if t < 0.0 || !t.is_finite() {
        return Err(CliError::Usage(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    if a.cutoff > 35 {
        log::warn!(
            "cutoff d = {} needs a {}x{} density matrix; this may be slow",
            a.cutoff,
            a.cutoff * a.cutoff,
            a.cutoff * a.cutoff
        );
    }
    let gamma_t = t * b.damping();
    let (rho0, _) = fock::twb_density(ch.lambda, a.cutoff, a.trunc_tol)?;
    let cfg = OracleConfig {
        d: a.cutoff,
        dt: a.dt,
        t_final: gamma_t,
        trunc_tol: a.trunc_tol,
    };
    let run = fock::integrate(&rho0, &b, &cfg)?;
    let fock_moments = fock::moments_to_covariance(&run.state);
    let gauss = evolve_state(&twb_state(TwinBeamParams::new(ch.lambda)?), &b, t)?;
    let ppt = ppt_test(&gauss, DEFAULT_TOLERANCE)?;
    let fock_min = fock::ppt_min_eigenvalue(&run.state);
    let cov_diff = (gauss.cov - fock_moments.cov).amax();
    let report = OracleReport {
        gamma_t,
        max_cov_discrepancy: cov_diff,
        max_mean_discrepancy: (gauss.mean - fock_moments.mean).amax(),
        gaussian_min_eigenvalue: ppt.min_eigenvalue,
        gaussian_separable: ppt.separable,
        fock_ppt_min_eigenvalue: fock_min,
        fock_separable: fock::ppt_separable(fock_min, run.leakage),
        leakage: run.leakage,
        pass: cov_diff <= a.tolerance,
    };

    let mut params = params_json(ch);
    params["cutoff"] = json!(a.cutoff);
    params["dt"] = num_json(a.dt);
    params["tolerance"] = num_json(a.tolerance);
    let results = json!({
        "gamma_t": num_json(report.gamma_t),
        "max_cov_discrepancy": num_json(report.max_cov_discrepancy),
        "max_mean_discrepancy": num_json(report.max_mean_discrepancy),
        "gaussian_min_eigenvalue": num_json(report.gaussian_min_eigenvalue),
        "gaussian_separable": report.gaussian_separable,
        "fock_ppt_min_eigenvalue": num_json(report.fock_ppt_min_eigenvalue),
        "fock_separable": report.fock_separable,
        "verdicts_agree": report.gaussian_separable == report.fock_separable,
        "leakage": num_json(report.leakage),
        "pass": report.pass,
    });
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        OutputFormat::Json => write_json(&mut w, &json!({"params": params, "results": results}))?,
        OutputFormat::Csv => {
            let keys = [
                "gamma_t",
                "max_cov_discrepancy",
                "max_mean_discrepancy",
                "gaussian_min_eigenvalue",
                "gaussian_separable",
                "fock_ppt_min_eigenvalue",
                "fock_separable",
                "verdicts_agree",
                "leakage",
                "pass",
            ];
            let row = keys
                .iter()
                .map(|k| match &results[*k] {
                    Value::Number(n) => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            write_csv(&mut w, &keys, &[row])?;
        }
    }
    Ok(())
}
