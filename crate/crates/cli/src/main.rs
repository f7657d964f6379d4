//! `qtheta`: batch driver for class sets, Brandt eigensystems, theta lifts and ratio checks.

mod settings;

use clap::{Parser, Subcommand};
use qtheta::arith::{fmt_rat, is_prime, primes_up_to};
use qtheta::pipeline::{self, class_set, eigen_listing, lift_table, match_eigenform, summarize};
use qtheta::quatalg::{algebra_for_ramification, eichler_order};
use qtheta::{Cache, Error, FormSpace, LocalWeightTable, TernaryLattice};
use serde::Serialize;
use settings::{RunArgs, Settings};
use std::path::Path;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "qtheta",
    version,
    about = "Quaternionic theta lifts and central-value ratios"
)]
struct Cli {
    /// Repeat for more logging (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ideal class set summary: h, unit orders t_x and mass.
    Classes(RunArgs),
    /// Rational Hecke eigensystems of the Brandt module.
    Eigen(RunArgs),
    /// Coefficient table of the theta lift of the matching eigenform.
    Lift(RunArgs),
    /// Full run: lift, twisted central values and the ratio report.
    Verify(RunArgs),
    /// Local weight tables on the isotropic cone mod p.
    Weights(RunArgs),
}

const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_PRECISION: u8 = 4;
const EXIT_USAGE: u8 = 1;

enum Failure {
    Core(Error),
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

fn hypothesis_name(e: &Error) -> Option<&'static str> {
    match e {
        Error::ParityViolation { .. } => Some("Hl1 (parity)"),
        Error::SignViolation { .. } => Some("Hl2 (sign)"),
        Error::ConductorClash { .. } => Some("conductor coprimality"),
        _ => None,
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if hypothesis_name(e).is_some() => EXIT_HYPOTHESIS,
        Error::PrecisionUnreachable { .. } | Error::InsufficientPrecision { .. } => EXIT_PRECISION,
        _ => EXIT_VERIFICATION,
    }
}

fn emit(s: &Settings, text: &str) -> Result<(), Failure> {
    match &s.output {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Ramification for commands that do not need the lift: explicit, else `Σ^l`, else `{N}` for prime N.
fn ramification(s: &Settings) -> Result<Vec<u64>, Failure> {
    if let Some(r) = &s.run.ramified {
        return Ok(r.clone());
    }
    if s.eps_given {
        return Ok(s.run.validate()?.1);
    }
    if is_prime(s.run.n) {
        return Ok(vec![s.run.n]);
    }
    Err(Failure::Usage(
        "give --ramified or --eps-g for composite N".into(),
    ))
}

fn cache(s: &Settings) -> Result<Option<Cache>, Failure> {
    s.cache_dir
        .as_ref()
        .map(Cache::new)
        .transpose()
        .map_err(Failure::from)
}

fn require_eps(s: &Settings) -> Result<(), Failure> {
    if s.eps_given {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "eps_g is required at level {}",
            s.run.n
        )))
    }
}

fn cmd_classes(s: &Settings) -> Result<(), Failure> {
    let cs = class_set(s.run.n, &ramification(s)?)?;
    let sum = summarize(&cs);
    if sum.mass != sum.expected_mass {
        return Err(Error::MassMismatch {
            found: sum.mass,
            expected: sum.expected_mass,
        }
        .into());
    }
    let t: Vec<String> = sum.t.iter().map(u64::to_string).collect();
    let text = format!(
        "h={} mass={}\nt_x={}\nnorms={}\n",
        sum.h,
        sum.mass,
        t.join(","),
        sum.norms.join(",")
    );
    emit(s, &text)
}

fn cmd_eigen(s: &Settings) -> Result<(), Failure> {
    let cs = class_set(s.run.n, &ramification(s)?)?;
    let space = FormSpace::new(&cs, s.run.k);
    let listing = eigen_listing(&space, s.run.prime_bound)?;
    if listing.is_empty() {
        log::warn!("no rational eigensystem in weight k = {}", s.run.k);
    }
    emit(s, &to_json(&listing))
}

fn cmd_lift(s: &Settings) -> Result<(), Failure> {
    require_eps(s)?;
    let (lift, sigma) = s.run.validate()?;
    let ram = s.run.ramified.clone().unwrap_or(sigma);
    let cs = class_set(s.run.n, &ram)?;
    let space = FormSpace::new(&cs, s.run.k);
    let form = match_eigenform(&space, &s.run)?;
    let table = lift_table(&space, &lift, &form, s.run.d_bound, cache(s)?.as_ref())?;
    let bad = table.support_violations();
    if bad > 0 {
        return Err(Failure::Verification(format!(
            "{bad} coefficients outside the plus-space support"
        )));
    }
    emit(s, &(table.to_json() + "\n"))
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    config: String,
    sigma: &'a [u64],
    l: String,
    b: String,
    u: i8,
    passed: bool,
    report: &'a qtheta::RatioReport,
}

fn cmd_verify(s: &Settings) -> Result<(), Failure> {
    require_eps(s)?;
    let v = pipeline::verify(&s.run, cache(s)?.as_ref())?;
    let passed = v.passed(s.run.tolerance);
    let tsv = v.report.to_tsv();
    match &s.output {
        Some(p) => {
            write_file(p, &tsv)?;
            let summary = VerifySummary {
                config: s.run.canonical(),
                sigma: &v.sigma,
                l: fmt_rat(&v.lift.l),
                b: fmt_rat(&v.lift.b),
                u: v.lift.u,
                passed,
                report: &v.report,
            };
            write_file(&p.with_extension("json"), &to_json(&summary))?;
        }
        None => print!("{tsv}"),
    }
    let constancy = v
        .report
        .constancy
        .map_or("-".to_string(), |c| format!("{c:.3e}"));
    eprintln!(
        "L_l={:.12e} rows={} nonzero={} constancy={} zero_matches={} tolerance={:e}",
        v.report.l_l.value,
        v.report.rows.len(),
        v.report.nonzero_rows(),
        constancy,
        if v.report.all_zero_matched() {
            "all"
        } else {
            "FAILED"
        },
        s.run.tolerance
    );
    match (passed, s.run.skew) {
        (true, _) => {
            eprintln!("PASS");
            Ok(())
        }
        (false, true) => {
            log::warn!("skew mode ratio check failed; reported as a warning only");
            eprintln!("WARN");
            Ok(())
        }
        (false, false) => Err(Failure::Verification(
            "ratio report outside tolerance".into(),
        )),
    }
}

#[derive(Serialize)]
struct WeightDump {
    p: u64,
    seed: [i64; 3],
    /// `[x, y, z, w_p(x)]` over the nonzero isotropic vectors.
    cone: Vec<[i64; 4]>,
}

fn cmd_weights(s: &Settings) -> Result<(), Failure> {
    let ram = ramification(s)?;
    let alg = algebra_for_ramification(&ram)?;
    let order = eichler_order(&alg, s.run.n)?;
    let lat = TernaryLattice::from_order(&alg, &order.lattice);
    let primes = match &s.primes {
        Some(p) => p.clone(),
        None => primes_up_to(13)
            .into_iter()
            .filter(|p| *p != 2 && s.run.n % p != 0)
            .collect(),
    };
    let mut out = Vec::new();
    for p in primes {
        let t = LocalWeightTable::build(&lat, p, None)?;
        let cone = LocalWeightTable::isotropic(&lat, p)
            .into_iter()
            .map(|i| {
                let x = t.vector(i);
                [x[0], x[1], x[2], t.value(&x) as i64]
            })
            .collect();
        out.push(WeightDump {
            p,
            seed: t.vector(t.seed),
            cone,
        });
    }
    emit(s, &to_json(&out))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let args = match &cli.command {
        Command::Classes(a)
        | Command::Eigen(a)
        | Command::Lift(a)
        | Command::Verify(a)
        | Command::Weights(a) => a,
    };
    let s = Settings::load(args)?;
    if let Some(w) = s.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    log::info!("configuration: {}", s.run.canonical());
    match &cli.command {
        Command::Classes(_) => cmd_classes(&s),
        Command::Eigen(_) => cmd_eigen(&s),
        Command::Lift(_) => cmd_lift(&s),
        Command::Verify(_) => cmd_verify(&s),
        Command::Weights(_) => cmd_weights(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("FAIL: {m}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::Core(e)) => {
            match hypothesis_name(&e) {
                Some(h) => eprintln!("hypothesis violated: {h}: {e}"),
                None => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
