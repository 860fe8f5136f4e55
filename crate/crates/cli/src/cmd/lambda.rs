//! Evaluate the truncated divisor weight Λ_R on given polynomials.

use fqsieve::divisor;
use fqsieve::poly;
use fqsieve::sieve;

use crate::cmd::{comp, parse_poly, resolve_bump, resolve_field, CliError};
use crate::config::{GlobalArgs, LambdaArgs, Resolver};
use crate::output;

pub fn run(global: &GlobalArgs, args: &LambdaArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("lambda", global.config.as_deref())?;
    let fq = resolve_field(&mut res, args.q, args.e)?;
    let big_r = res.get("R", args.big_r, None)?;
    if big_r <= 0.0 || !big_r.is_finite() {
        return Err(CliError::Config(format!("cutoff R must be positive, got {big_r}")));
    }
    let bump = resolve_bump(&mut res, args.bump.clone())?;
    let inputs = res.get_list("poly", &args.poly)?;
    let echo = res.finish()?;

    let mut out = output::echo_block(&echo);
    out.push_str("poly,degree,lambda\n");
    for text in &inputs {
        let p = parse_poly(&fq, text, "poly")?;
        let dv = divisor::divisor_of(&fq, &p).map_err(comp)?;
        let value = sieve::lambda_r(&dv, big_r, &bump);
        out.push_str(&format!(
            "{},{},{}\n",
            poly::to_text(&fq, &p),
            p.deg(),
            output::fmt_f64(value)
        ));
    }
    Ok(out)
}
