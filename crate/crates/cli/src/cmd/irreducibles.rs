//! Build or verify the on-disk irreducible table; the report lists the
//! per-degree counts once verification has passed.

use std::path::PathBuf;

use fqsieve::Fq;

use crate::cache::{self, IrreducibleCache};
use crate::cmd::{resolve_field, CliError};
use crate::config::{GlobalArgs, IrreduciblesArgs};
use crate::output;

const SPOT_CHECKS: u64 = 100;

fn default_path(global: &GlobalArgs, fq: &Fq, max_deg: u32) -> PathBuf {
    let dir = global
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("FQSIEVE_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!(
        "irreducibles-q{}-e{}-d{}.txt",
        fq.p(),
        fq.e(),
        max_deg
    ))
}

pub fn run(global: &GlobalArgs, args: &IrreduciblesArgs) -> Result<String, CliError> {
    let mut res = crate::config::Resolver::new("irreducibles", global.config.as_deref())?;
    let fq = resolve_field(&mut res, args.q, args.e)?;
    let verify_only = res.get_flag("verify-only", args.verify_only)?;
    let seed = res.get("seed", global.seed, Some(0))?;

    let (cache, max_deg) = if verify_only {
        // Depth defaults to whatever the file declares; an explicit value
        // must then agree with the header.
        let requested = res.get_opt("max-deg", args.max_deg)?;
        let path = match (&args.path, requested) {
            (Some(path), _) => path.clone(),
            (None, Some(d)) => default_path(global, &fq, d),
            (None, None) => {
                return Err(CliError::Config(
                    "verify-only needs --path or --max-deg to locate the cache".to_string(),
                ))
            }
        };
        let loaded = cache::load(&path)?;
        let max_deg = requested.unwrap_or(loaded.max_deg);
        res.note("max-deg", max_deg);
        eprintln!("verifying cache at {}", path.display());
        (loaded, max_deg)
    } else {
        let max_deg = res.get("max-deg", args.max_deg, None)?;
        let path = args.path.clone().unwrap_or_else(|| default_path(global, &fq, max_deg));
        let built = IrreducibleCache::build(&fq, max_deg);
        cache::save(&path, &built)?;
        eprintln!("cache written to {}", path.display());
        // Verify the on-disk round trip, not the in-memory table.
        (cache::load(&path)?, max_deg)
    };
    let echo = res.finish()?;

    cache.expect(&fq, max_deg)?;
    let report = cache.verify(&fq, SPOT_CHECKS, seed)?;

    let mut out = output::echo_block(&echo);
    out.push_str("degree,count\n");
    for (i, block) in cache.blocks.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, block.len()));
    }
    out.push_str(&format!("verified,pass ({})\n", report.summary()));
    Ok(out)
}
