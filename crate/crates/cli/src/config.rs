//! Flag definitions and config handling.
//!
//! Every subcommand key resolves through the precedence chain
//! command-line flag > config file > built-in default, and each resolved
//! value is recorded in the parameter echo that heads the output, so the
//! echo alone reproduces the run. Config files are line-based
//! `key = value` text with `#` comments; keys match the long flag names.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::cmd::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fqsieve",
    version,
    about = "Workbench for sieve weights and prime patterns over F_q[t]"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` config file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel reductions (0 = automatic). Results
    /// are byte-identical for every setting.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for every randomized ingredient (stratified sampling, cache
    /// spot checks).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for irreducible-polynomial caches (falls back to
    /// $FQSIEVE_CACHE_DIR, then the working directory).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or verify an irreducible-polynomial cache file.
    Irreducibles(IrreduciblesArgs),
    /// Evaluate the truncated divisor weight on given polynomials.
    Lambda(LambdaArgs),
    /// Bump-transform samples and the normalization constant.
    Cphi(CphiArgs),
    /// Tabulate the normalized sieve measure over a degree window.
    Measure(MeasureArgs),
    /// Cross- or auto-correlation reports for linear systems of forms.
    Correlate(CorrelateArgs),
    /// Lift the measure to a quotient ring; optional condition estimate.
    Lift(LiftArgs),
    /// Scan for truncated residue classes made entirely of irreducibles.
    Search(SearchArgs),
    /// The same scan restricted to a congruence class of base points.
    SearchInClass(SearchInClassArgs),
}

#[derive(Debug, Args)]
pub struct IrreduciblesArgs {
    /// Base prime p of the field F_{p^e}.
    #[arg(long)]
    pub q: Option<u32>,
    /// Extension degree e.
    #[arg(long)]
    pub e: Option<u32>,
    /// Largest degree tabulated.
    #[arg(long)]
    pub max_deg: Option<u32>,
    /// Cache file (a `.gz` extension compresses); defaults to a canonical
    /// name inside the cache directory.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Verify an existing cache instead of building one.
    #[arg(long)]
    pub verify_only: bool,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// Degree cutoff R of the truncated weight.
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// Polynomial to evaluate, as comma-separated coefficients (constant
    /// first); repeatable.
    #[arg(long)]
    pub poly: Vec<String>,
    /// Bump-function label.
    #[arg(long)]
    pub bump: Option<String>,
}

#[derive(Debug, Args)]
pub struct CphiArgs {
    #[arg(long)]
    pub bump: Option<String>,
    /// Emit this many transform samples instead of the constant summary.
    #[arg(long)]
    pub samples: Option<u32>,
    /// Sample the transform on [0, t-max].
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// Radius: the measure is normalized for inputs of degree < r.
    #[arg(long)]
    pub r: Option<u32>,
    /// Sieve cutoff R (must exceed 1).
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Shape parameter of the degree-< k coefficient classes.
    #[arg(long)]
    pub k: Option<u32>,
    /// Absorb all primes of degree ≤ w into the product W.
    #[arg(long)]
    pub w: Option<u32>,
    /// Numerator offset α, coprime to W.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Tabulate over {deg x < window}.
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub bump: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub truncation: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub w: Option<u32>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub bump: Option<String>,
    /// `cross` (system of forms) or `auto` (shifted copies with the
    /// calibrated bound).
    #[arg(long)]
    pub mode: Option<String>,
    /// Sum over {deg x < window} per variable.
    #[arg(long)]
    pub window: Option<u32>,
    /// Coefficient rows for cross mode: entries separated by `|`, rows by
    /// `;` (e.g. `1|0;0|1;1|1`).
    #[arg(long)]
    pub coeffs: Option<String>,
    /// Shift polynomials, `;`-separated.
    #[arg(long)]
    pub shifts: Option<String>,
    /// Summation scheme for cross mode: `exhaustive` or `stratified`.
    #[arg(long)]
    pub sum: Option<String>,
    /// Samples per stratum in stratified mode.
    #[arg(long)]
    pub per_stratum: Option<u64>,
    /// Term budget for exhaustive mode.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Training degree for the auto-mode calibration sweep.
    #[arg(long)]
    pub train_deg: Option<u32>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// Quotient modulus N (the radius is fixed to deg N).
    #[arg(long)]
    pub modulus: Option<String>,
    #[arg(long)]
    pub truncation: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub w: Option<u32>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub bump: Option<String>,
    /// Apex vertex for the condition estimate; selecting it switches the
    /// output from the residue table to the estimate.
    #[arg(long)]
    pub j: Option<u64>,
    /// Frozen-coordinate masks for the condition estimate, `;`-separated.
    #[arg(long)]
    pub omegas: Option<String>,
    /// Fixed edge assignment (residue indices), `;`-separated.
    #[arg(long)]
    pub x0: Option<String>,
    /// Term budget for the condition estimate.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// Window: classes have q^s members.
    #[arg(long)]
    pub s: Option<u32>,
    /// Largest base-point degree scanned.
    #[arg(long)]
    pub deg_a_max: Option<u32>,
    /// Largest modulus degree scanned.
    #[arg(long)]
    pub deg_m_max: Option<u32>,
    /// Maximum number of candidate classes to examine.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Twist multiplier W for testing W·f + α.
    #[arg(long)]
    pub twist_w: Option<String>,
    /// Twist offset α.
    #[arg(long)]
    pub twist_alpha: Option<String>,
    /// Admit classes whose members have mixed degrees.
    #[arg(long)]
    pub no_degree_guard: bool,
}

#[derive(Debug, Args)]
pub struct SearchInClassArgs {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// Congruence modulus constraining the base points.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Required residue of the base points.
    #[arg(long)]
    pub residue: Option<String>,
    /// Largest base-point degree scanned.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub twist_w: Option<String>,
    #[arg(long)]
    pub twist_alpha: Option<String>,
}

/// Resolves subcommand keys against the config file and records every
/// resolved value for the parameter echo.
pub struct Resolver {
    file: BTreeMap<String, String>,
    echo: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(subcommand: &str, config: Option<&Path>) -> Result<Resolver, CliError> {
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::Config(format!(
                        "config line {}: expected `key = value`, got `{line}`",
                        lineno + 1
                    )));
                };
                file.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        if let Some(sub) = file.remove("subcommand") {
            if sub != subcommand {
                return Err(CliError::Config(format!(
                    "config file is for `{sub}` but `{subcommand}` was invoked"
                )));
            }
        }
        let mut echo = BTreeMap::new();
        echo.insert("subcommand".to_string(), subcommand.to_string());
        Ok(Resolver { file, echo })
    }

    fn file_value<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.file.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key `{key}` = `{raw}`: {e}"))),
        }
    }

    /// Required key: flag > config file > default; errors when absent
    /// everywhere. The resolved value is echoed.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => {
                self.file.remove(key);
                v
            }
            None => match self.file_value(key)? {
                Some(v) => v,
                None => default.ok_or_else(|| {
                    CliError::Config(format!("missing required key `{key}` (--{key} or config)"))
                })?,
            },
        };
        self.echo.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Optional key: echoed only when present.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => {
                self.file.remove(key);
                Some(v)
            }
            None => self.file_value(key)?,
        };
        if let Some(v) = &value {
            self.echo.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    /// Presence flag: true on the command line wins; otherwise the config
    /// value (`true`/`false`) applies.
    pub fn get_flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let value = if flag {
            self.file.remove(key);
            true
        } else {
            self.file_value(key)?.unwrap_or(false)
        };
        self.echo.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Repeatable key: flag occurrences win; the config value is
    /// `;`-separated. Echoed in joined form.
    pub fn get_list(&mut self, key: &str, flag: &[String]) -> Result<Vec<String>, CliError> {
        let values: Vec<String> = if flag.is_empty() {
            match self.file.remove(key) {
                Some(raw) => raw.split(';').map(|s| s.trim().to_string()).collect(),
                None => Vec::new(),
            }
        } else {
            self.file.remove(key);
            flag.to_vec()
        };
        if values.is_empty() {
            return Err(CliError::Config(format!(
                "missing required key `{key}` (--{key} or config)"
            )));
        }
        self.echo.insert(key.to_string(), values.join(";"));
        Ok(values)
    }

    /// Record a value resolved outside the flag/file chain (e.g. read from
    /// an artifact header) so the echo still reproduces the run.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.echo.insert(key.to_string(), value.to_string());
    }

    /// Closes resolution; leftover config keys are rejected so typos fail
    /// before any computation starts.
    pub fn finish(self) -> Result<BTreeMap<String, String>, CliError> {
        if let Some(key) = self.file.keys().next() {
            return Err(CliError::Config(format!(
                "config key `{key}` is not accepted by this subcommand"
            )));
        }
        Ok(self.echo)
    }
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn resolver_with(subcommand: &str, config: &str) -> Result<Resolver, CliError> {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        tmp.write_all(config.as_bytes()).unwrap();
        Resolver::new(subcommand, Some(tmp.path()))
    }

    #[test]
    fn precedence_is_flag_then_file_then_default() {
        let mut res = resolver_with("measure", "# tuned\n\nr = 6\nwindow = 3\n").unwrap();
        assert_eq!(res.get("r", Some(9u32), Some(1)).unwrap(), 9);
        assert_eq!(res.get("window", None::<u32>, Some(1)).unwrap(), 3);
        assert_eq!(res.get("k", None::<u32>, Some(1)).unwrap(), 1);
        let echo = res.finish().unwrap();
        assert_eq!(echo["subcommand"], "measure");
        assert_eq!(echo["r"], "9");
        assert_eq!(echo["window"], "3");
        assert_eq!(echo["k"], "1");
    }

    #[test]
    fn missing_required_key_is_a_config_error() {
        let mut res = Resolver::new("lambda", None).unwrap();
        let err = res.get("R", None::<f64>, None).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn unconsumed_file_keys_are_rejected_at_finish() {
        let res = resolver_with("lambda", "R = 10\n").unwrap();
        assert!(matches!(res.finish(), Err(CliError::Config(_))));
    }

    #[test]
    fn config_subcommand_must_match_the_invocation() {
        assert!(resolver_with("cphi", "subcommand = lambda\n").is_err());
        assert!(resolver_with("lambda", "subcommand = lambda\n").is_ok());
    }

    #[test]
    fn malformed_lines_and_unparsable_values_are_reported() {
        assert!(resolver_with("cphi", "just words\n").is_err());
        let mut res = resolver_with("cphi", "samples = many\n").unwrap();
        assert!(res.get_opt("samples", None::<u32>).is_err());
    }

    #[test]
    fn optional_keys_echo_only_when_present() {
        let mut res = Resolver::new("cphi", None).unwrap();
        assert_eq!(res.get_opt("samples", None::<u32>).unwrap(), None);
        assert_eq!(res.get_opt("t-max", Some(2.5f64)).unwrap(), Some(2.5));
        let echo = res.finish().unwrap();
        assert!(!echo.contains_key("samples"));
        assert_eq!(echo["t-max"], "2.5");
    }

    #[test]
    fn file_lists_split_on_semicolons() {
        let mut res = resolver_with("lambda", "poly = 1 ; 0,1\n").unwrap();
        assert_eq!(res.get_list("poly", &[]).unwrap(), vec!["1", "0,1"]);

        let flags = vec!["1".to_string(), "0,1".to_string()];
        let mut res = resolver_with("lambda", "poly = 1,1\n").unwrap();
        assert_eq!(res.get_list("poly", &flags).unwrap(), flags);
        assert_eq!(res.finish().unwrap()["poly"], "1;0,1");
    }
}
