//! The bump normalization constant by independent quadratures, or samples
//! of the weighted transform when `--samples` is given.

use fqsieve::bump;

use crate::cmd::{comp, resolve_bump, CliError};
use crate::config::{CphiArgs, GlobalArgs, Resolver};
use crate::output;

pub fn run(global: &GlobalArgs, args: &CphiArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("cphi", global.config.as_deref())?;
    let bump_fn = resolve_bump(&mut res, args.bump.clone())?;
    let samples = res.get_opt("samples", args.samples)?;

    if let Some(n) = samples {
        if n == 0 {
            return Err(CliError::Config("samples must be positive".to_string()));
        }
        let t_max = res.get("t-max", args.t_max, Some(20.0))?;
        if t_max <= 0.0 || !t_max.is_finite() {
            return Err(CliError::Config(format!("t-max must be positive, got {t_max}")));
        }
        let echo = res.finish()?;
        let mut out = output::echo_block(&echo);
        out.push_str("x,re,im\n");
        for i in 0..=n {
            let x = t_max * f64::from(i) / f64::from(n);
            let v = bump::phi_hat(&bump_fn, x).map_err(comp)?;
            out.push_str(&format!(
                "{},{},{}\n",
                output::fmt_f64(x),
                output::fmt_f64(v.re),
                output::fmt_f64(v.im)
            ));
        }
        return Ok(out);
    }

    let echo = res.finish()?;
    let tensor = bump::c_phi_tensor(&bump_fn).map_err(comp)?;
    let iterated = bump::c_phi_iterated(&bump_fn).map_err(comp)?;
    let derivative = bump::c_phi_derivative_form(&bump_fn).map_err(comp)?;
    let mut out = output::echo_block(&echo);
    out.push_str("scheme,value,imag_residue,t_final\n");
    for report in [&tensor, &iterated] {
        out.push_str(&format!(
            "{},{},{},{}\n",
            report.scheme,
            output::fmt_f64(report.value),
            output::fmt_f64(report.imag_residue),
            output::fmt_f64(report.t_final)
        ));
    }
    out.push_str(&format!("derivative-form,{},,\n", output::fmt_f64(derivative)));
    Ok(out)
}
