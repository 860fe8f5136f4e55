//! Lift the measure to F_q[t]/N: emit the residue table, or, when an apex
//! vertex is selected, the hypergraph condition estimate.

use fqsieve::divisor::CurveModel;
use fqsieve::quotient::{self, HyperEdgeSpec, QuotientRing};
use fqsieve::sieve::SieveParams;

use crate::cmd::{comp, config_err, parse_poly, resolve_bump, resolve_field, CliError};
use crate::config::{GlobalArgs, LiftArgs, Resolver};
use crate::output;

fn parse_indices(raw: &str, what: &str, max: u64) -> Result<Vec<u64>, CliError> {
    raw.split(';')
        .map(|s| {
            let v: u64 = s
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("{what} `{s}`: {e}")))?;
            if v >= max {
                return Err(CliError::Config(format!("{what} {v} out of range (< {max})")));
            }
            Ok(v)
        })
        .collect()
}

pub fn run(global: &GlobalArgs, args: &LiftArgs) -> Result<String, CliError> {
    let mut res = Resolver::new("lift", global.config.as_deref())?;
    let fq = resolve_field(&mut res, args.q, args.e)?;
    let modulus_text = res.get("modulus", args.modulus.clone(), None)?;
    let modulus = parse_poly(&fq, &modulus_text, "modulus")?;
    let k = res.get("k", args.k, Some(1))?;
    let ring = QuotientRing::new(&fq, modulus, k).map_err(config_err)?;
    // The lift is only defined at radius deg N; the cutoff default follows.
    let truncation = res.get(
        "truncation",
        args.truncation,
        Some(f64::from(ring.degree().max(2))),
    )?;
    let w = res.get("w", args.w, Some(1))?;
    let alpha_text = res.get("alpha", args.alpha.clone(), Some("1".to_string()))?;
    let alpha = parse_poly(&fq, &alpha_text, "alpha")?;
    let bump = resolve_bump(&mut res, args.bump.clone())?;
    let params = SieveParams::new(
        CurveModel::line(fq.clone()),
        ring.degree(),
        truncation,
        k,
        w,
        alpha,
        bump,
    )
    .map_err(config_err)?;

    let j = res.get_opt("j", args.j)?;
    if let Some(j) = j {
        let spec = HyperEdgeSpec::new(&fq, k);
        if j >= spec.vertex_count() {
            return Err(CliError::Config(format!(
                "vertex {j} out of range (< {})",
                spec.vertex_count()
            )));
        }
        let omegas_raw = res.get("omegas", args.omegas.clone(), None)?;
        let omegas = parse_indices(&omegas_raw, "omega mask", 1 << spec.edge_size())?;
        let default_x0 = vec!["0"; spec.edge_size() as usize].join(";");
        let x0_raw = res.get("x0", args.x0.clone(), Some(default_x0))?;
        let x0 = parse_indices(&x0_raw, "x0 index", ring.size())?;
        if x0.len() as u64 != spec.edge_size() {
            return Err(CliError::Config(format!(
                "x0 must assign all {} edge coordinates",
                spec.edge_size()
            )));
        }
        let budget = res.get("budget", args.budget, Some(1 << 22))?;
        let echo = res.finish()?;

        let lifted = quotient::lift_nu(&params, &ring).map_err(comp)?;
        let estimate = quotient::condition_one_estimate(j, &omegas, &ring, &lifted, &x0, budget)
            .map_err(comp)?;
        let mut out = output::echo_block(&echo);
        out.push_str("j,omegas,x0,estimate\n");
        out.push_str(&format!(
            "{j},{},{},{}\n",
            omegas.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            x0.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            output::fmt_f64(estimate)
        ));
        return Ok(out);
    }
    let echo = res.finish()?;

    let lifted = quotient::lift_nu(&params, &ring).map_err(comp)?;
    let mut out = output::echo_block(&echo);
    out.push_str(&lifted.to_csv(&ring));
    Ok(out)
}
