//! Exhaustive scan for truncated residue classes consisting entirely of
//! irreducibles; emits re-checkable JSON certificates.

use fqsieve::patterns::{self, SearchSpec, Twist};
use fqsieve::Fq;

use crate::cmd::{config_err, parse_poly, resolve_field, CliError, SearchDoc};
use crate::config::{GlobalArgs, Resolver, SearchArgs};

/// Both twist parts or neither; `W` must be nonzero and coprime to α.
pub fn resolve_twist(
    res: &mut Resolver,
    fq: &Fq,
    w_flag: Option<String>,
    alpha_flag: Option<String>,
) -> Result<Option<Twist>, CliError> {
    let w = res.get_opt("twist-w", w_flag)?;
    let alpha = res.get_opt("twist-alpha", alpha_flag)?;
    match (w, alpha) {
        (None, None) => Ok(None),
        (Some(w), Some(alpha)) => {
            let w = parse_poly(fq, &w, "twist-w")?;
            let alpha = parse_poly(fq, &alpha, "twist-alpha")?;
            Twist::new(fq, w, alpha).map(Some).map_err(config_err)
        }
        _ => Err(CliError::Config(
            "twist needs both --twist-w and --twist-alpha".to_string(),
        )),
    }
}

pub fn run(global: &GlobalArgs, args: &SearchArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("search", global.config.as_deref())?;
    let fq = resolve_field(&mut res, args.q, args.e)?;
    let s = res.get("s", args.s, None)?;
    let deg_a_max = res.get("deg-a-max", args.deg_a_max, None)?;
    let deg_m_max = res.get(
        "deg-m-max",
        args.deg_m_max,
        Some(deg_a_max.saturating_sub(s)),
    )?;
    let budget = res.get("budget", args.budget, Some(u64::MAX))?;
    let twist = resolve_twist(&mut res, &fq, args.twist_w.clone(), args.twist_alpha.clone())?;
    let no_guard = res.get_flag("no-degree-guard", args.no_degree_guard)?;
    let echo = res.finish()?;

    let mut spec = SearchSpec::new(deg_m_max, deg_a_max, s, twist, budget);
    spec.equal_degree_guard = !no_guard;
    let outcome = patterns::search(&fq, &spec).map_err(config_err)?;
    Ok(SearchDoc::render(echo, outcome))
}
