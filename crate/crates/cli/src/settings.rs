//! Run settings assembled from a flat `key = value` file and command-line flags.

use clap::Args;
use qtheta::arith::parse_rat;
use qtheta::lvalues::{CURVE_11A, CURVE_37A};
use qtheta::pipeline::eps_from_curve;
use qtheta::{Rational, RunConfig};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Flags shared by every command. Each one mirrors a config-file key.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Builtin curve preset (`11a` or `37a`) setting N, eps_g and expected_ap.
    #[arg(long)]
    pub curve: Option<String>,
    /// Level N.
    #[arg(long = "n", short = 'N')]
    pub n: Option<u64>,
    /// Atkin–Lehner data, e.g. `11:-1` or `2:1,5:-1`.
    #[arg(long = "eps-g")]
    pub eps_g: Option<String>,
    /// Expected Hecke eigenvalues, e.g. `2:-2,3:-3`.
    #[arg(long = "expected-ap")]
    pub expected_ap: Option<String>,
    /// Finite ramification of the algebra, e.g. `2,5`.
    #[arg(long)]
    pub ramified: Option<String>,
    /// Twisting discriminant l as `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long = "d-bound")]
    pub d_bound: Option<u64>,
    #[arg(long = "prime-bound")]
    pub prime_bound: Option<u64>,
    #[arg(long)]
    pub precision: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub skew: bool,
    /// Primes for `weights`, e.g. `3,5,7`.
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for all parallel sections; defaults to the available cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub run: RunConfig,
    /// Whether `eps_g` was given explicitly (file, flag or curve).
    pub eps_given: bool,
    pub primes: Option<Vec<u64>>,
    pub cache_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let v = v.trim().trim_matches('"').to_string();
        out.insert(normalize(k), v);
    }
    Ok(out)
}

fn parse_map<T: std::str::FromStr>(s: &str, what: &str) -> Result<BTreeMap<u64, T>, String> {
    let mut m = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (p, v) = item
            .split_once(':')
            .ok_or_else(|| format!("{what}: expected `p:value`, got `{item}`"))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| format!("{what}: bad prime `{p}`"))?;
        let v: T = v
            .trim()
            .parse()
            .map_err(|_| format!("{what}: bad value `{v}`"))?;
        m.insert(p, v);
    }
    Ok(m)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| format!("{what}: bad entry `{x}`")))
        .collect()
}

fn parse_l(s: &str) -> Result<Rational, String> {
    parse_rat(s.trim()).ok_or_else(|| format!("l: `{s}` is not a rational `p/q`"))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{what}: bad value `{s}`"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        o => Err(format!("skew: bad boolean `{o}`")),
    }
}

fn apply_curve(run: &mut RunConfig, label: &str) -> Result<(), String> {
    let c = match label {
        "11a" | "11a1" => CURVE_11A,
        "37a" | "37a1" => CURVE_37A,
        o => return Err(format!("unknown curve `{o}` (known: 11a, 37a)")),
    };
    run.n = c.conductor;
    run.eps_g = eps_from_curve(&c);
    run.expected_ap = [2u64, 3, 5]
        .into_iter()
        .filter(|p| c.conductor % p != 0)
        .map(|p| (p, c.ap(p)))
        .collect();
    Ok(())
}

impl Settings {
    pub fn load(args: &RunArgs) -> Result<Settings, String> {
        let mut kv = match &args.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                kv.insert(k.to_string(), v);
            }
        };
        put("curve", args.curve.clone());
        put("n", args.n.map(|v| v.to_string()));
        put("eps_g", args.eps_g.clone());
        put("expected_ap", args.expected_ap.clone());
        put("ramified", args.ramified.clone());
        put("l", args.l.clone());
        put("k", args.k.map(|v| v.to_string()));
        put("d_bound", args.d_bound.map(|v| v.to_string()));
        put("prime_bound", args.prime_bound.map(|v| v.to_string()));
        put("precision", args.precision.map(|v| v.to_string()));
        put("tolerance", args.tolerance.map(|v| v.to_string()));
        put("skew", args.skew.then(|| "true".to_string()));
        put("primes", args.primes.clone());
        put(
            "cache_dir",
            args.cache_dir.as_ref().map(|p| p.display().to_string()),
        );
        put(
            "output",
            args.output.as_ref().map(|p| p.display().to_string()),
        );
        put("workers", args.workers.map(|v| v.to_string()));
        Self::from_map(&kv)
    }

    pub fn from_map(kv: &BTreeMap<String, String>) -> Result<Settings, String> {
        let mut run = RunConfig::default();
        let mut eps_given = false;
        if let Some(c) = kv.get("curve") {
            apply_curve(&mut run, c)?;
            eps_given = true;
        }
        let mut s = Settings {
            run,
            eps_given,
            primes: None,
            cache_dir: None,
            output: None,
            workers: None,
        };
        for (k, v) in kv {
            match k.as_str() {
                "curve" => {}
                "n" => s.run.n = parse_num(v, "N")?,
                "eps_g" => {
                    s.run.eps_g = parse_map(v, "eps_g")?;
                    s.eps_given = true;
                }
                "expected_ap" => s.run.expected_ap = parse_map(v, "expected_ap")?,
                "ramified" => s.run.ramified = Some(parse_list(v, "ramified")?),
                "l" => s.run.l = parse_l(v)?,
                "k" => s.run.k = parse_num(v, "k")?,
                "d_bound" => s.run.d_bound = parse_num(v, "D_bound")?,
                "prime_bound" => s.run.prime_bound = parse_num(v, "prime_bound")?,
                "precision" => s.run.precision = parse_num(v, "precision")?,
                "tolerance" => s.run.tolerance = parse_num(v, "tolerance")?,
                "skew" => s.run.skew = parse_bool(v)?,
                "primes" => s.primes = Some(parse_list(v, "primes")?),
                "cache_dir" => s.cache_dir = Some(PathBuf::from(v)),
                "output" => s.output = Some(PathBuf::from(v)),
                "workers" => s.workers = Some(parse_num(v, "workers")?),
                other => return Err(format!("unknown configuration key `{other}`")),
            }
        }
        if !s.eps_given {
            if s.run.n == 11 {
                s.eps_given = true;
            } else {
                s.run.eps_g.clear();
            }
        }
        if s.run.n == 0 {
            return Err("N must be positive".into());
        }
        if !(s.run.precision > 0.0 && s.run.tolerance > 0.0) {
            return Err("precision and tolerance must be positive".into());
        }
        Ok(s)
    }
}

fn read_config(p: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    parse_file(&text).map_err(|e| format!("{}: {e}", p.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_are_normalized() {
        let kv =
            parse_file("N = 37\n# comment\nD-bound = 50\nl = \"5/1\"\neps_g = 37:1 # trailing\n")
                .unwrap();
        let s = Settings::from_map(&kv).unwrap();
        assert_eq!(s.run.n, 37);
        assert_eq!(s.run.d_bound, 50);
        assert_eq!(s.run.l, Rational::from_integer(5.into()));
        assert_eq!(s.run.eps_g, BTreeMap::from([(37, 1)]));
    }

    #[test]
    fn curve_preset() {
        let kv = BTreeMap::from([("curve".to_string(), "37a".to_string())]);
        let s = Settings::from_map(&kv).unwrap();
        assert_eq!(s.run.eps_g, BTreeMap::from([(37, 1)]));
        assert_eq!(s.run.expected_ap.get(&2), Some(&-2));
        assert_eq!(s.run.expected_ap.get(&3), Some(&-3));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_rationals() {
        assert!(parse_file("nonsense").is_err());
        let kv = BTreeMap::from([("colour".to_string(), "red".to_string())]);
        assert!(Settings::from_map(&kv).is_err());
        let kv = BTreeMap::from([("l".to_string(), "5/0".to_string())]);
        assert!(Settings::from_map(&kv).is_err());
    }
}
