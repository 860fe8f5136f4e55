//! Correlation estimates: cross mode sums a system of forms over the box,
//! auto mode compares shifted copies against the calibrated prime-product
//! bound.

use fqsieve::correlate::{self, CorrelationReport, LinearSystem, SumMode};
use fqsieve::poly::Poly;

use crate::cmd::{comp, config_err, parse_poly, resolve_sieve, CliError, SieveFlags, SieveSpec};
use crate::config::{CorrelateArgs, GlobalArgs, Resolver};
use crate::output;

pub fn run(global: &GlobalArgs, args: &CorrelateArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("correlate", global.config.as_deref())?;
    let spec = resolve_sieve(
        &mut res,
        SieveFlags {
            q: args.q,
            e: args.e,
            r: args.r,
            truncation: args.truncation,
            k: args.k,
            w: args.w,
            alpha: args.alpha.clone(),
            bump: args.bump.clone(),
        },
    )?;
    let window = res.get("window", args.window, Some(spec.params.r().min(10)))?;
    let mode = res.get("mode", args.mode.clone(), Some("cross".to_string()))?;
    match mode.as_str() {
        "cross" => cross(global, args, res, &spec, window),
        "auto" => auto(args, res, &spec, window),
        other => Err(CliError::Config(format!(
            "mode must be `cross` or `auto`, got `{other}`"
        ))),
    }
}

fn parse_shifts(spec: &SieveSpec, raw: &str) -> Result<Vec<Poly>, CliError> {
    raw.split(';')
        .map(|s| parse_poly(&spec.fq, s.trim(), "shift"))
        .collect()
}

fn cross(
    global: &GlobalArgs,
    args: &CorrelateArgs,
    mut res: Resolver,
    spec: &SieveSpec,
    window: u32,
) -> Result<String, CliError> {
    let coeffs_raw = res.get("coeffs", args.coeffs.clone(), None)?;
    let shifts_raw = res.get("shifts", args.shifts.clone(), None)?;
    let rows: Vec<Vec<Poly>> = coeffs_raw
        .split(';')
        .map(|row| {
            row.split('|')
                .map(|entry| parse_poly(&spec.fq, entry.trim(), "coefficient"))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let shifts = parse_shifts(spec, &shifts_raw)?;
    let sys = LinearSystem::new(&spec.fq, rows, shifts, spec.params.k()).map_err(config_err)?;

    let sum = res.get("sum", args.sum.clone(), Some("exhaustive".to_string()))?;
    let mode = match sum.as_str() {
        "exhaustive" => {
            let budget = res.get("budget", args.budget, Some(1 << 24))?;
            SumMode::Exhaustive { budget }
        }
        "stratified" => {
            let per_stratum = res.get("per-stratum", args.per_stratum, Some(128))?;
            let seed = res.get("seed", global.seed, Some(0))?;
            SumMode::Stratified { seed, per_stratum }
        }
        other => {
            return Err(CliError::Config(format!(
                "sum must be `exhaustive` or `stratified`, got `{other}`"
            )))
        }
    };
    let echo = res.finish()?;

    let report = correlate::cross_correlation(&sys, &spec.params, window, mode).map_err(comp)?;
    let mut out = output::echo_block(&echo);
    out.push_str(CorrelationReport::CSV_HEADER);
    out.push('\n');
    out.push_str(&report.csv_row());
    out.push('\n');
    Ok(out)
}

fn auto(
    args: &CorrelateArgs,
    mut res: Resolver,
    spec: &SieveSpec,
    window: u32,
) -> Result<String, CliError> {
    let shifts_raw = res.get("shifts", args.shifts.clone(), None)?;
    let shifts = parse_shifts(spec, &shifts_raw)?;
    if shifts.len() < 2 {
        return Err(CliError::Config(
            "auto mode needs at least two shifts".to_string(),
        ));
    }
    let train_deg = res.get("train-deg", args.train_deg, Some(4))?;
    let echo = res.finish()?;

    let cal = correlate::calibrate_auto(&spec.params, window, shifts.len(), train_deg)
        .map_err(comp)?;
    let report = correlate::auto_correlation(&shifts, &spec.params, window, &cal).map_err(comp)?;
    let mut out = output::echo_block(&echo);
    out.push_str("window,lhs,bound,c_s,c_fit,covered,shifts\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        report.window,
        output::fmt_f64(report.lhs),
        output::fmt_f64(report.bound),
        cal.c_s,
        output::fmt_f64(cal.c_fit),
        report.lhs <= report.bound,
        report.shifts.join(";")
    ));
    Ok(out)
}
