//! Tabulate the normalized sieve measure ν over a degree window.

use fqsieve::correlate::{NuMeasure, PolyMeasure};
use fqsieve::poly;

use crate::cmd::{comp, resolve_sieve, CliError, SieveFlags};
use crate::config::{GlobalArgs, MeasureArgs, Resolver};
use crate::output;

/// Tabulation cap: 2^22 rows keeps the artifact reviewable.
const MAX_ROWS: u64 = 1 << 22;

pub fn run(global: &GlobalArgs, args: &MeasureArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("measure", global.config.as_deref())?;
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
    let r = spec.params.r();
    let window = res.get("window", args.window, Some(r.min(12)))?;
    if window > r {
        return Err(CliError::Config(format!(
            "window {window} exceeds the radius {r}"
        )));
    }
    let rows = poly::box_len_checked(&spec.fq, window)
        .filter(|&n| n <= MAX_ROWS)
        .ok_or_else(|| {
            CliError::Config(format!(
                "window {window} would tabulate more than {MAX_ROWS} rows"
            ))
        })?;
    let echo = res.finish()?;

    let measure = NuMeasure::new(&spec.params, window.saturating_sub(1)).map_err(comp)?;
    let mut out = output::echo_block(&echo);
    out.push_str("poly,nu\n");
    for idx in 0..rows {
        let x = poly::below_index(&spec.fq, window, idx);
        let value = measure.value(&x).map_err(comp)?;
        out.push_str(&format!(
            "{},{}\n",
            poly::to_text(&spec.fq, &x),
            output::fmt_f64(value)
        ));
    }
    Ok(out)
}
