//! `conic-det`: determinants of Laplacians on flat cones and annuli, the
//! jump operator of a small excision, and the small-ε expansions.
//!
//! Exit codes: 0 ok, 1 check failed or I/O error, 2 usage, 3 numerically
//! inconclusive, 4 out of regime.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conic_det::asymptotics::{divergence_class, khuri_expansion, logdet_c, LOGDET_M};
use conic_det::geometry::{parse_rational_list, parse_real, parse_real_list, AnnulusSpec, ConeSpec, Domain};
use conic_det::jump_operator::{default_mode_cutoff, logdet_model_r};
use conic_det::spectral_det::{
    enumerate_annulus_spectrum, enumerate_cone_spectrum, gelfand_yaglom_logdet, logdet_from_spectrum,
    HeatCoefficients, ZetaDetResult, DEFAULT_GY_MODES,
};
use conic_det::verify::{sweep_csv, sweep_jump_determinant, verify_bfk_model, DEFAULT_SPECTRAL_CUTOFF};
use conic_det::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "conic-det", version, about = "Zeta-regularized determinants on flat cones and conic annuli")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format (default: csv for sweep, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file supplying flags not given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record wall-clock times (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    /// Run even when ε lies outside the proven regime.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Heat,
    Gy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// log det of the Dirichlet Laplacian on the cone C_{α,L}.
    ConeDet {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        length: Option<String>,
        /// Spectral cutoff Λ for the heat-trace route.
        #[arg(long)]
        cutoff: Option<String>,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
    },
    /// log det of the Dirichlet Laplacian on a conic annulus.
    AnnulusDet {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        inner: Option<String>,
        #[arg(long)]
        outer: Option<String>,
        #[arg(long)]
        cutoff: Option<String>,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
    },
    /// log det of the model jump operator R_ε and its comparison bounds.
    JumpDet {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        modes: Option<String>,
    },
    /// Gluing identity on C_{α,1} cut along r = ε.
    VerifyBfk {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        cutoff: Option<String>,
        #[arg(long)]
        modes: Option<String>,
    },
    /// Sweep log det R_ε over a list of ε.
    Sweep {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long = "eps-list")]
        eps_list: Option<String>,
        #[arg(long)]
        modes: Option<String>,
    },
    /// Rescaled small-ε expansion on a closed conic surface.
    Khuri {
        #[arg(long)]
        genus: Option<String>,
        /// Comma-separated cone parameters; fractions like 1/3 are exact.
        #[arg(long)]
        angles: Option<String>,
        #[arg(long)]
        volume: Option<String>,
        #[arg(long = "logdet-m")]
        logdet_m: Option<String>,
        #[arg(long = "logdet-cones")]
        logdet_cones: Option<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Check(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Io(_) => 1,
            Failure::Lib(e) => match e {
                Error::InvalidArgument(_) | Error::InvalidMode { .. } | Error::Parse(_) | Error::EmptySpectrum { .. } => 2,
                Error::OutOfRegime(_) => 4,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Flag values merged with the config file; flags win.
struct Inputs {
    config: BTreeMap<String, String>,
}

impl Inputs {
    fn load(path: Option<&PathBuf>) -> Outcome<Self> {
        let mut config = BTreeMap::new();
        if let Some(p) = path {
            let text = fs::read_to_string(p)?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("config line {}: expected key=value", i + 1)))?;
                let key = k.trim().replace('_', "-");
                if config.insert(key.clone(), v.trim().to_string()).is_some() {
                    return Err(Failure::Usage(format!("config key '{key}' given twice")));
                }
            }
        }
        Ok(Self { config })
    }

    fn raw(&self, name: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.config.get(name).cloned())
    }

    fn required(&self, name: &str, flag: &Option<String>) -> Outcome<String> {
        self.raw(name, flag).ok_or_else(|| Failure::Usage(format!("missing required --{name}")))
    }

    fn real(&self, name: &str, flag: &Option<String>) -> Outcome<f64> {
        parse_real(&self.required(name, flag)?).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
    }

    fn real_or(&self, name: &str, flag: &Option<String>, default: f64) -> Outcome<f64> {
        match self.raw(name, flag) {
            Some(s) => parse_real(&s).map_err(|e| Failure::Usage(format!("--{name}: {e}"))),
            None => Ok(default),
        }
    }

    fn count(&self, name: &str, flag: &Option<String>) -> Outcome<Option<usize>> {
        self.raw(name, flag)
            .map(|s| s.trim().parse::<usize>().map_err(|e| Failure::Usage(format!("--{name}: {e}"))))
            .transpose()
    }

    fn oracle(&self, flag: Option<Oracle>) -> Outcome<Oracle> {
        match (flag, self.config.get("oracle").map(String::as_str)) {
            (Some(o), _) => Ok(o),
            (None, None | Some("heat")) => Ok(Oracle::Heat),
            (None, Some("gy")) => Ok(Oracle::Gy),
            (None, Some(other)) => Err(Failure::Usage(format!("unknown oracle '{other}'"))),
        }
    }

    /// Rejects config keys the command does not read.
    fn check_keys(&self, allowed: &[&str]) -> Outcome<()> {
        const GLOBAL: [&str; 4] = ["format", "threads", "timing", "force"];
        match self.config.keys().find(|k| !allowed.contains(&k.as_str()) && !GLOBAL.contains(&k.as_str())) {
            Some(k) => Err(Failure::Usage(format!("config key '{k}' does not apply to this command"))),
            None => Ok(()),
        }
    }

    fn flag(&self, name: &str, cli: bool) -> Outcome<bool> {
        if cli {
            return Ok(true);
        }
        match self.config.get(name).map(String::as_str) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(Failure::Usage(format!("config key '{name}': expected true or false, got '{v}'"))),
        }
    }
}

struct Rendered {
    json: Value,
    csv: String,
}

fn csv_line(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn zeta_output(r: &ZetaDetResult) -> Rendered {
    Rendered {
        json: serde_json::from_str(&r.to_json()).expect("valid json"),
        csv: format!(
            "zeta0,zeta_prime0,logdet,err_estimate\n{}\n",
            csv_line(&[r.zeta0, r.zeta_prime0, r.logdet, r.err_estimate])
        ),
    }
}

fn domain_logdet(domain: Domain, cutoff: f64, oracle: Oracle) -> Outcome<ZetaDetResult> {
    Ok(match oracle {
        Oracle::Gy => gelfand_yaglom_logdet(&domain, DEFAULT_GY_MODES)?,
        Oracle::Heat => {
            let spectrum = match domain {
                Domain::Cone(c) => enumerate_cone_spectrum(c, cutoff)?,
                Domain::Annulus(a) => enumerate_annulus_spectrum(a, cutoff)?,
            };
            logdet_from_spectrum(&spectrum, &HeatCoefficients::for_domain(&domain))?
        }
    })
}

fn regime_check(alpha: f64, eps: f64, force: bool) -> Outcome<()> {
    let edge = (-alpha).exp2();
    if eps > edge && !force {
        return Err(Error::OutOfRegime(format!("eps = {eps} exceeds 2^(-alpha) = {edge}; pass --force to run anyway")).into());
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome<(Rendered, Format)> {
    let inputs = Inputs::load(cli.common.config.as_ref())?;
    let timing = inputs.flag("timing", cli.common.timing)?;
    let force = inputs.flag("force", cli.common.force)?;
    let format_default = matches!(cli.command, Command::Sweep { .. });
    let format = match (cli.common.format, inputs.config.get("format").map(String::as_str)) {
        (Some(f), _) => f,
        (None, Some("csv")) => Format::Csv,
        (None, Some("json")) => Format::Json,
        (None, Some(other)) => return Err(Failure::Usage(format!("unknown format '{other}'"))),
        (None, None) if format_default => Format::Csv,
        (None, None) => Format::Json,
    };
    let threads = match cli.common.threads {
        Some(n) => Some(n),
        None => inputs.count("threads", &None)?,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }

    let rendered = match &cli.command {
        Command::ConeDet { alpha, length, cutoff, oracle } => {
            inputs.check_keys(&["alpha", "length", "cutoff", "oracle"])?;
            let cone = ConeSpec::new(inputs.real("alpha", alpha)?, inputs.real_or("length", length, 1.0)?)?;
            let cutoff = inputs.real_or("cutoff", cutoff, DEFAULT_SPECTRAL_CUTOFF / (cone.length * cone.length))?;
            zeta_output(&domain_logdet(Domain::Cone(cone), cutoff, inputs.oracle(*oracle)?)?)
        }
        Command::AnnulusDet { alpha, inner, outer, cutoff, oracle } => {
            inputs.check_keys(&["alpha", "inner", "outer", "cutoff", "oracle"])?;
            let ann = AnnulusSpec::new(
                inputs.real("alpha", alpha)?,
                inputs.real("inner", inner)?,
                inputs.real_or("outer", outer, 1.0)?,
            )?;
            let cutoff = inputs.real_or("cutoff", cutoff, DEFAULT_SPECTRAL_CUTOFF / (ann.outer * ann.outer))?;
            zeta_output(&domain_logdet(Domain::Annulus(ann), cutoff, inputs.oracle(*oracle)?)?)
        }
        Command::JumpDet { alpha, eps, modes } => {
            inputs.check_keys(&["alpha", "eps", "modes"])?;
            let (alpha, eps) = (inputs.real("alpha", alpha)?, inputs.real("eps", eps)?);
            regime_check(alpha, eps, force)?;
            let modes = inputs.count("modes", modes)?.unwrap_or_else(|| default_mode_cutoff(eps, &[alpha]));
            let d = logdet_model_r(eps, alpha, modes)?;
            Rendered {
                json: serde_json::from_str(&d.to_json()).expect("valid json"),
                csv: format!(
                    "logdet_eps_r,logdet_r,logdet_a,residual,comeback_bound,paper_bound\n{}\n",
                    csv_line(&[d.logdet_eps_r, d.logdet_r, d.logdet_a, d.residual, d.comeback_bound, d.paper_bound])
                ),
            }
        }
        Command::VerifyBfk { alpha, eps, tol, cutoff, modes } => {
            inputs.check_keys(&["alpha", "eps", "tol", "cutoff", "modes"])?;
            let r = verify_bfk_model(
                inputs.real("alpha", alpha)?,
                inputs.real("eps", eps)?,
                inputs.real_or("cutoff", cutoff, DEFAULT_SPECTRAL_CUTOFF)?,
                inputs.count("modes", modes)?,
                inputs.real_or("tol", tol, 1e-3)?,
            )?;
            let out = Rendered {
                json: serde_json::from_str(&r.to_json()).expect("valid json"),
                csv: format!(
                    "logdet_whole,logdet_annulus,logdet_small_cone,logdet_r,identity_residual,tolerance\n{}\n",
                    csv_line(&[r.logdet_whole, r.logdet_annulus, r.logdet_small_cone, r.logdet_r, r.identity_residual, r.tolerance])
                ),
            };
            if !r.passes() {
                emit(&out, format, cli.common.out.as_ref())?;
                return Err(Failure::Check(format!(
                    "identity residual {:e} exceeds tolerance {:e}",
                    r.identity_residual, r.tolerance
                )));
            }
            out
        }
        Command::Sweep { alpha, eps_list, modes } => {
            inputs.check_keys(&["alpha", "eps-list", "modes"])?;
            let alpha = inputs.real("alpha", alpha)?;
            let grid = parse_real_list(&inputs.required("eps-list", eps_list)?)
                .map_err(|e| Failure::Usage(format!("--eps-list: {e}")))?;
            for &eps in &grid {
                regime_check(alpha, eps, force)?;
            }
            let mut rows = sweep_jump_determinant(alpha, &grid, inputs.count("modes", modes)?)?;
            if !timing {
                rows.iter_mut().for_each(|r| r.runtime_seconds = 0.0);
            }
            Rendered { json: serde_json::to_value(&rows).expect("rows serialize"), csv: sweep_csv(&rows) }
        }
        Command::Khuri { genus, angles, volume, logdet_m, logdet_cones } => {
            inputs.check_keys(&["genus", "angles", "volume", "logdet-m", "logdet-cones"])?;
            let p: u32 = inputs
                .required("genus", genus)?
                .trim()
                .parse()
                .map_err(|e| Failure::Usage(format!("--genus: {e}")))?;
            let alphas = parse_rational_list(&inputs.required("angles", angles)?)
                .map_err(|e| Failure::Usage(format!("--angles: {e}")))?;
            let volume = inputs.raw("volume", volume).map(|s| parse_real(&s)).transpose()?;
            let mut report = khuri_expansion(p, &alphas, None, volume)?;
            if let Some(m) = inputs.raw("logdet-m", logdet_m) {
                report.bind(LOGDET_M, parse_real(&m)?);
            }
            if let Some(c) = inputs.raw("logdet-cones", logdet_cones) {
                let cones = parse_real_list(&c)?;
                if cones.len() != alphas.len() {
                    return Err(Failure::Usage(format!(
                        "--logdet-cones has {} values for {} cone points",
                        cones.len(),
                        alphas.len()
                    )));
                }
                for (i, v) in cones.into_iter().enumerate() {
                    report.bind(logdet_c(i + 1), v);
                }
            }
            let class = divergence_class(p, &alphas)?;
            let mut json = report.to_json();
            json["divergence"] = json!(class.to_string());
            let csv = format!(
                "c_log_eps,c_loglog,c_const_known,divergence,error_model\n{},{},{},{},{}\n",
                report.c_log_eps,
                report.c_loglog,
                report.c_const_known(),
                class,
                report.error_model
            );
            Rendered { json, csv }
        }
    };
    Ok((rendered, format))
}

fn emit(r: &Rendered, format: Format, out: Option<&PathBuf>) -> Outcome<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&r.json).expect("json serializes") + "\n",
        Format::Csv => r.csv.clone(),
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.common.out.clone();
    let result = run(cli).and_then(|(r, f)| emit(&r, f, out.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            if let Failure::Usage(_) = f {
                eprintln!("run `conic-det --help` for usage");
            }
            ExitCode::from(f.code())
        }
    }
}
