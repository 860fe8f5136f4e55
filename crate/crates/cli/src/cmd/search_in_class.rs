//! The class scan restricted to base points in a fixed congruence class;
//! defaults to the identity twist.

use fqsieve::patterns::{self, Twist};
use fqsieve::poly::Poly;

use crate::cmd::search::resolve_twist;
use crate::cmd::{config_err, parse_poly, resolve_field, CliError, SearchDoc};
use crate::config::{GlobalArgs, Resolver, SearchInClassArgs};

pub fn run(global: &GlobalArgs, args: &SearchInClassArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("search-in-class", global.config.as_deref())?;
    let fq = resolve_field(&mut res, args.q, args.e)?;
    let modulus_text = res.get("modulus", args.modulus.clone(), None)?;
    let modulus = parse_poly(&fq, &modulus_text, "modulus")?;
    let residue_text = res.get("residue", args.residue.clone(), None)?;
    let residue = parse_poly(&fq, &residue_text, "residue")?;
    let r = res.get("r", args.r, None)?;
    let s = res.get("s", args.s, None)?;
    let budget = res.get("budget", args.budget, Some(u64::MAX))?;
    let twist = resolve_twist(&mut res, &fq, args.twist_w.clone(), args.twist_alpha.clone())?
        .map_or_else(
            || Twist::new(&fq, Poly::one(), Poly::zero()).map_err(config_err),
            Ok,
        )?;
    let echo = res.finish()?;

    let outcome = patterns::search_in_class(&fq, &modulus, &residue, &twist, r, s, budget)
        .map_err(config_err)?;
    Ok(SearchDoc::render(echo, outcome))
}
