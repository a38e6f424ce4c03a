//! Command-line front end: argument parsing, dispatch, and report rendering.
//!
//! Exit codes: 0 when everything checked is satisfied, 1 when any requested
//! inequality check is violated (including a quantum violation found by
//! `search`), 2 on bad input or usage.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use entrobound_core::entropy::{
    conditional_entropy, marginal_entropy, mutual_entropy, relative_entropy, shannon_entropy,
};
use entrobound_core::inequalities::{
    cerf_adami_all_forms, dpi_check, joint_triangle_check, narrowed_bound_check, triangle_check,
    two_hb_bound_check,
};
use entrobound_core::markov::{conditional_mutual_information, is_markov};
use entrobound_core::quantum::{
    cerf_adami_quantum, conditional_quantum_entropy, is_entangled_pure, partial_trace,
    von_neumann_entropy,
};
use entrobound_core::statmech::{
    coin_reversal_monte_carlo, coin_reversal_probability, combine_multiplicities, dice_macrostate,
    mixing_demo,
};
use entrobound_core::viosearch::{grid_search, refine, werner_threshold};
use entrobound_core::{
    BoundMode, DensityMatrix, Error, InequalityReport, JointDistribution, MacrostateSpec,
    MarkovChainSpec, MatchMode, MeasurementSettings, Subsystem,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Significant digits of every float in the JSON output.
pub const SIGNIFICANT_DIGITS: usize = 12;

const LABELS: [&str; 3] = ["A", "B", "C"];

#[derive(Debug, Parser)]
#[command(
    name = "entrobound",
    version,
    about = "Entropic inequalities for classical and quantum systems"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Logarithm base for reported entropies; a number > 1 or `e`.
    /// Defaults to 2, except for Boltzmann entropies which default to e.
    #[arg(long, global = true, value_parser = parse_base)]
    pub base: Option<f64>,
    /// Absolute slack allowed when deciding whether an inequality holds.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tolerance)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include the full evaluation trace of a search.
    #[arg(long, global = true)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shannon, marginal, mutual, conditional and relative entropies of a distribution file.
    Entropy(EntropyArgs),
    /// Tripartite inequality checks on a distribution file.
    Inequality(InequalityArgs),
    /// Build a Markov chain from a spec file, or test a distribution for the Markov property.
    Markov(MarkovArgs),
    /// Von Neumann entropies of a two-qubit state, and optionally a Cerf-Adami check at given angles.
    Quantum(QuantumArgs),
    /// Grid search plus refinement for the largest Cerf-Adami left-hand side.
    Search(SearchArgs),
    /// Multiplicities, coin reversals and mixing entropy.
    #[command(subcommand)]
    Statmech(StatmechCommand),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Distribution JSON file.
    #[arg(long)]
    pub dist: PathBuf,
    /// Reference distribution for the relative entropy.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// Every check that holds for any distribution (the default).
    Guaranteed,
    /// Guaranteed checks plus the Markov-only ones.
    All,
    CerfAdami,
    JointTriangle,
    TwoHb,
    Narrowed,
    /// Only guaranteed for Markov chains A -> B -> C.
    Triangle,
    /// Only guaranteed for Markov chains A -> B -> C.
    Dpi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Unit,
    MaxMarginal,
}

#[derive(Debug, Args)]
pub struct InequalityArgs {
    /// Tripartite distribution JSON file.
    #[arg(long)]
    pub dist: PathBuf,
    /// Checks to run; repeatable or comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [CheckKind::Guaranteed])]
    pub check: Vec<CheckKind>,
    /// Right-hand side of the Cerf-Adami check.
    #[arg(long, value_enum, default_value_t = BoundArg::Unit)]
    pub bound: BoundArg,
    /// Assert that the input is a Markov chain A -> B -> C, silencing DPI warnings.
    #[arg(long)]
    pub markov_certified: bool,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    /// Markov chain spec JSON file.
    #[arg(long, required_unless_present = "dist")]
    pub spec: Option<PathBuf>,
    /// Tripartite distribution JSON file to test.
    #[arg(long, conflicts_with = "spec")]
    pub dist: Option<PathBuf>,
    /// Order to test with `--dist`, e.g. `0,1,2` for A -> B -> C.
    #[arg(long, value_delimiter = ',', num_args = 1, default_values_t = [0usize, 1, 2])]
    pub order: Vec<usize>,
    /// Write the built tripartite distribution to this file.
    #[arg(long, requires = "spec")]
    pub emit_dist: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, args = ["state", "density"])]
pub struct StateArgs {
    /// singlet, bell-phi-plus, bell-phi-minus, bell-psi-plus, bell-psi-minus,
    /// maximally-mixed, or werner:<p>.
    #[arg(long)]
    pub state: Option<String>,
    /// Density matrix JSON file.
    #[arg(long)]
    pub density: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Measurement angles for A, B, C in radians, e.g. `0,0.6,1.2`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Named state, as for `quantum`.
    #[arg(long)]
    pub state: Option<String>,
    /// Density matrix JSON file.
    #[arg(long, conflicts_with = "state")]
    pub density: Option<PathBuf>,
    /// Grid cells per angle.
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    /// Step size at which the coordinate ascent stops.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tolerance)]
    pub refine_tol: f64,
    /// Report the grid optimum only.
    #[arg(long)]
    pub no_refine: bool,
    /// Bisect the Werner family for the largest parameter without a violation
    /// instead of searching a single state.
    #[arg(long, conflicts_with_all = ["state", "density", "no_refine"])]
    pub werner_threshold: bool,
}

#[derive(Debug, Subcommand)]
pub enum StatmechCommand {
    /// Number of ordered rolls of several six-sided dice with a given total.
    Dice {
        #[arg(long)]
        dice: u32,
        #[arg(long, allow_hyphen_values = true)]
        total: i64,
    },
    /// Multiplicity and entropy of two independent systems taken together.
    Combine {
        #[arg(long)]
        omega_a: u128,
        #[arg(long)]
        omega_b: u128,
    },
    /// Probability that a replay of a coin sequence matches the original.
    Coin {
        #[arg(long)]
        length: u32,
        /// Match only the number of heads, which must equal this value.
        #[arg(long)]
        unordered_heads: Option<u32>,
        /// Also estimate the ordered probability with this many Monte Carlo trials.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Entropy of mixing for two particle species on a lattice.
    Mixing {
        #[arg(long)]
        n_a: u64,
        #[arg(long)]
        n_b: u64,
        #[arg(long)]
        same_species: bool,
    },
}

fn parse_base(s: &str) -> std::result::Result<f64, String> {
    let b = if s == "e" {
        std::f64::consts::E
    } else {
        s.parse::<f64>().map_err(|e| e.to_string())?
    };
    if b.is_finite() && b > 1.0 {
        Ok(b)
    } else {
        Err(format!("base must be a finite number > 1, got {s}"))
    }
}

fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    let t = s.parse::<f64>().map_err(|e| e.to_string())?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be a finite number > 0, got {s}"))
    }
}

/// What a command produced: one record per report, plus whether a check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub records: Vec<Value>,
    pub violation: bool,
}

/// Result of a full invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, S>(args: I) -> Invocation
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Invocation {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Invocation {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: one_line(&e.to_string()),
                },
            };
        }
    };
    run(&cli)
}

/// Runs an already parsed command line.
pub fn run(cli: &Cli) -> Invocation {
    match execute(cli)
        .and_then(|outcome| render(&outcome, cli.global.format).map(|text| (outcome, text)))
    {
        Ok((outcome, stdout)) => Invocation {
            code: if outcome.violation {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            },
            stdout,
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: one_line(&format!("error: {e}")),
        },
    }
}

fn one_line(message: &str) -> String {
    let first = message
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("error");
    format!("{}\n", first.trim_end())
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Entropy(a) => entropy_cmd(a, g),
        Command::Inequality(a) => inequality_cmd(a, g),
        Command::Markov(a) => markov_cmd(a, g),
        Command::Quantum(a) => quantum_cmd(a, g),
        Command::Search(a) => search_cmd(a, g),
        Command::Statmech(c) => statmech_cmd(c, g),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn load_dist(path: &Path) -> Result<JointDistribution> {
    Ok(JointDistribution::from_json(&read(path)?)?)
}

fn to_value<S: serde::Serialize>(x: &S) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Usage(format!("serialization failed: {e}")))
}

fn var_list(vars: &[usize]) -> String {
    vars.iter()
        .map(|&v| LABELS[v])
        .collect::<Vec<_>>()
        .join(",")
}

fn entropy_record(quantity: String, value: Value) -> Value {
    let mut rec = Map::new();
    rec.insert("quantity".into(), Value::String(quantity));
    if let Value::Object(m) = value {
        rec.extend(m);
    }
    Value::Object(rec)
}

fn entropy_cmd(a: &EntropyArgs, g: &GlobalOpts) -> Result<Outcome> {
    let base = g.base.unwrap_or(2.0);
    let d = load_dist(&a.dist)?;
    let n = d.num_vars();
    let all: Vec<usize> = (0..n).collect();
    let mut records = vec![entropy_record(
        format!("H({})", var_list(&all)),
        to_value(&shannon_entropy(&d, base)?)?,
    )];
    if n > 1 {
        let labels = &LABELS[..n];
        for (v, lv) in labels.iter().enumerate() {
            records.push(entropy_record(
                format!("H({lv})"),
                to_value(&marginal_entropy(&d, &[v], base)?)?,
            ));
        }
        for (x, lx) in labels.iter().enumerate() {
            for (y, ly) in labels.iter().enumerate().skip(x + 1) {
                records.push(entropy_record(
                    format!("H({lx}:{ly})"),
                    to_value(&mutual_entropy(&d, x, y, base)?)?,
                ));
            }
        }
        for (t, lt) in labels.iter().enumerate() {
            for (c, lc) in labels.iter().enumerate().filter(|&(c, _)| c != t) {
                records.push(entropy_record(
                    format!("H({lt}|{lc})"),
                    to_value(&conditional_entropy(&d, t, c, base)?)?,
                ));
            }
        }
    }
    if let Some(path) = &a.reference {
        let q = load_dist(path)?;
        records.push(entropy_record(
            "D(P||Q)".into(),
            to_value(&relative_entropy(&d, &q, base)?)?,
        ));
    }
    Ok(Outcome {
        command: "entropy",
        records,
        violation: false,
    })
}

fn reports_outcome(
    command: &'static str,
    reports: Vec<InequalityReport>,
    tol: f64,
) -> Result<Outcome> {
    let reports: Vec<InequalityReport> = reports.into_iter().map(|r| r.reassess(tol)).collect();
    let violation = reports.iter().any(|r| !r.satisfied());
    Ok(Outcome {
        command,
        records: reports.iter().map(to_value).collect::<Result<_>>()?,
        violation,
    })
}

fn inequality_cmd(a: &InequalityArgs, g: &GlobalOpts) -> Result<Outcome> {
    let d = load_dist(&a.dist)?;
    let mode = match a.bound {
        BoundArg::Unit => BoundMode::Unit,
        BoundArg::MaxMarginal => BoundMode::MaxMarginal,
    };
    let mut kinds = Vec::new();
    for k in &a.check {
        let expanded: &[CheckKind] = match k {
            CheckKind::Guaranteed => &[
                CheckKind::CerfAdami,
                CheckKind::JointTriangle,
                CheckKind::TwoHb,
                CheckKind::Narrowed,
            ],
            CheckKind::All => &[
                CheckKind::CerfAdami,
                CheckKind::JointTriangle,
                CheckKind::TwoHb,
                CheckKind::Narrowed,
                CheckKind::Triangle,
                CheckKind::Dpi,
            ],
            other => std::slice::from_ref(other),
        };
        for e in expanded {
            if !kinds.contains(e) {
                kinds.push(*e);
            }
        }
    }
    let mut reports = Vec::new();
    for k in kinds {
        match k {
            CheckKind::CerfAdami => {
                if d.alphabet_sizes().iter().any(|&s| s != 2) && mode == BoundMode::Unit {
                    return Err(CliError::Usage(
                        "the unit Cerf-Adami bound needs binary alphabets; pass --bound max-marginal".into(),
                    ));
                }
                reports.extend(cerf_adami_all_forms(&d, mode)?)
            }
            CheckKind::JointTriangle => reports.push(joint_triangle_check(&d)?),
            CheckKind::TwoHb => reports.push(two_hb_bound_check(&d)?),
            CheckKind::Narrowed => reports.push(narrowed_bound_check(&d)?),
            CheckKind::Triangle => reports.push(triangle_check(&d)?),
            CheckKind::Dpi => reports.extend(dpi_check(&d, a.markov_certified)?),
            CheckKind::Guaranteed | CheckKind::All => unreachable!("expanded above"),
        }
    }
    reports_outcome("inequality", reports, g.tolerance)
}

fn markov_cmd(a: &MarkovArgs, g: &GlobalOpts) -> Result<Outcome> {
    if let Some(path) = &a.spec {
        let spec = MarkovChainSpec::from_json(&read(path)?)?;
        let d = spec.build_tripartite()?;
        if let Some(out) = &a.emit_dist {
            let text = serde_json::to_string(&d.to_file())
                .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
            std::fs::write(out, text + "\n").map_err(|source| CliError::Write {
                path: out.clone(),
                source,
            })?;
        }
        let mut outcome = reports_outcome(
            "markov",
            std::iter::once(triangle_check(&d)?)
                .chain(dpi_check(&d, true)?)
                .collect(),
            g.tolerance,
        )?;
        let mut certificate = Vec::new();
        for order in [[0, 1, 2], [2, 1, 0]] {
            certificate.push(markov_record(&d, order)?);
        }
        outcome.records.splice(0..0, certificate);
        Ok(outcome)
    } else if let Some(path) = &a.dist {
        let order: [usize; 3] = a.order.as_slice().try_into().map_err(|_| {
            CliError::Usage(format!(
                "--order needs three indices, got {}",
                a.order.len()
            ))
        })?;
        let d = load_dist(path)?;
        Ok(Outcome {
            command: "markov",
            records: vec![markov_record(&d, order)?],
            violation: false,
        })
    } else {
        Err(CliError::Usage(
            "one of --spec or --dist is required".into(),
        ))
    }
}

fn markov_record(d: &JointDistribution, order: [usize; 3]) -> Result<Value> {
    let markov = is_markov(d, order)?;
    let cmi = conditional_mutual_information(d, order[0], order[2], order[1])?;
    Ok(json!({
        "name": format!("markov[{}->{}->{}]", LABELS[order[0]], LABELS[order[1]], LABELS[order[2]]),
        "is_markov": markov,
        "conditional_mutual_information": to_value(&cmi)?,
    }))
}

fn load_state(s: &StateArgs) -> Result<DensityMatrix> {
    if let Some(path) = &s.density {
        return Ok(DensityMatrix::from_json(&read(path)?)?);
    }
    let name = s.state.as_deref().unwrap_or_default();
    named_state(name)
}

/// Built-in two-qubit states by name.
pub fn named_state(name: &str) -> Result<DensityMatrix> {
    Ok(match name {
        "singlet" | "bell-psi-minus" => DensityMatrix::singlet(),
        "bell-psi-plus" => DensityMatrix::bell_psi_plus(),
        "bell-phi-plus" => DensityMatrix::bell_phi_plus(),
        "bell-phi-minus" => DensityMatrix::bell_phi_minus(),
        "maximally-mixed" => DensityMatrix::maximally_mixed(2, 2)?,
        other => match other.strip_prefix("werner:") {
            Some(p) => {
                let p: f64 = p
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad Werner parameter in {other:?}")))?;
                DensityMatrix::werner(p)?
            }
            None => return Err(CliError::Usage(format!("unknown state {other:?}"))),
        },
    })
}

fn quantum_cmd(a: &QuantumArgs, g: &GlobalOpts) -> Result<Outcome> {
    let base = g.base.unwrap_or(2.0);
    let rho = load_state(&a.state)?;
    let s_ab = von_neumann_entropy(&rho, base)?;
    let s_a = von_neumann_entropy(&partial_trace(&rho, Subsystem::A)?, base)?;
    let s_b = von_neumann_entropy(&partial_trace(&rho, Subsystem::B)?, base)?;
    let s_b_given_a = conditional_quantum_entropy(&rho, Subsystem::B, Subsystem::A, base)?;
    let s_a_given_b = conditional_quantum_entropy(&rho, Subsystem::A, Subsystem::B, base)?;
    let purity = rho.purity();
    let entangled = if purity >= 1.0 - 1e-9 {
        Value::Bool(is_entangled_pure(&rho)?)
    } else {
        Value::Null
    };
    let mut records = vec![json!({
        "name": "state",
        "dims": [rho.dims().0, rho.dims().1],
        "purity": purity,
        "S(A,B)": to_value(&s_ab)?,
        "S(A)": to_value(&s_a)?,
        "S(B)": to_value(&s_b)?,
        "S(B|A)": to_value(&s_b_given_a)?,
        "S(A|B)": to_value(&s_a_given_b)?,
        "entangled_pure": entangled,
    })];
    let mut violation = false;
    if let Some(angles) = &a.angles {
        let angles: [f64; 3] = angles.as_slice().try_into().map_err(|_| {
            CliError::Usage(format!("--angles needs three values, got {}", angles.len()))
        })?;
        let report =
            cerf_adami_quantum(&rho, &MeasurementSettings::new(angles)?)?.reassess(g.tolerance);
        violation = !report.satisfied();
        records.push(to_value(&report)?);
    }
    Ok(Outcome {
        command: "quantum",
        records,
        violation,
    })
}

fn search_cmd(a: &SearchArgs, g: &GlobalOpts) -> Result<Outcome> {
    if a.werner_threshold {
        let w = werner_threshold::<f64>(a.resolution, a.refine_tol)?;
        let samples: Vec<Value> = w
            .samples
            .iter()
            .map(|(p, lhs)| json!({"p": p, "max_lhs": lhs}))
            .collect();
        let mut record = json!({
            "name": "werner_threshold",
            "threshold": w.threshold,
            "upper": w.upper,
            "resolution": a.resolution,
        });
        if g.trace {
            record["samples"] = Value::Array(samples);
        }
        return Ok(Outcome {
            command: "search",
            records: vec![record],
            violation: false,
        });
    }
    if a.state.is_none() && a.density.is_none() {
        return Err(CliError::Usage(
            "one of --state or --density is required".into(),
        ));
    }
    let rho = load_state(&StateArgs {
        state: a.state.clone(),
        density: a.density.clone(),
    })?;
    let grid = grid_search(&rho, a.resolution)?;
    let result = if a.no_refine {
        grid
    } else {
        refine(&rho, &grid, a.refine_tol)?
    };
    let violation = result.best_lhs > 1.0 + g.tolerance;
    let mut record = json!({
        "name": "search",
        "best_angles": result.best_settings.angles(),
        "best_lhs": result.best_lhs,
        "margin": result.margin,
        "grid_resolution": result.grid_resolution,
        "refined": result.refined,
        "violation": violation,
    });
    if g.trace {
        let trace: Vec<Value> = result
            .trace
            .iter()
            .map(|e| {
                let [ta, tb, tc] = e.settings.angles();
                json!({"theta_a": ta, "theta_b": tb, "theta_c": tc, "lhs": e.lhs})
            })
            .collect();
        record["trace"] = Value::Array(trace);
    }
    Ok(Outcome {
        command: "search",
        records: vec![record],
        violation,
    })
}

fn macrostate_record(name: &str, m: &MacrostateSpec, base: f64) -> Result<Value> {
    let entropy = m.entropy::<f64>()?.convert_base(base)?;
    Ok(json!({
        "name": name,
        "description": m.description,
        "multiplicity": m.multiplicity.to_string(),
        "entropy": to_value(&entropy)?,
    }))
}

fn statmech_cmd(c: &StatmechCommand, g: &GlobalOpts) -> Result<Outcome> {
    let boltzmann_base = g.base.unwrap_or(std::f64::consts::E);
    let records = match *c {
        StatmechCommand::Dice { dice, total } => {
            vec![macrostate_record(
                "dice",
                &dice_macrostate(dice, total)?,
                boltzmann_base,
            )?]
        }
        StatmechCommand::Combine { omega_a, omega_b } => {
            let a = MacrostateSpec::new("system A", omega_a)?;
            let b = MacrostateSpec::new("system B", omega_b)?;
            let both = combine_multiplicities(&a, &b)?;
            vec![
                macrostate_record("system_a", &a, boltzmann_base)?,
                macrostate_record("system_b", &b, boltzmann_base)?,
                macrostate_record("combined", &both, boltzmann_base)?,
            ]
        }
        StatmechCommand::Coin {
            length,
            unordered_heads,
            trials,
        } => {
            let mode = match unordered_heads {
                Some(heads) => MatchMode::Unordered { heads },
                None => MatchMode::Ordered,
            };
            let p: f64 = coin_reversal_probability(length, mode)?;
            let mut rec = json!({
                "name": "coin_reversal",
                "length": length,
                "mode": match mode { MatchMode::Ordered => "ordered", MatchMode::Unordered { .. } => "unordered" },
                "probability": p,
            });
            if let Some(h) = unordered_heads {
                rec["heads"] = json!(h);
            }
            if let Some(t) = trials {
                let estimate = coin_reversal_monte_carlo(length, t, g.seed)?;
                let exact: f64 = coin_reversal_probability(length, MatchMode::Ordered)?;
                rec["monte_carlo"] = json!({
                    "trials": t,
                    "seed": g.seed,
                    "estimate": estimate,
                    "standard_error": (exact * (1.0 - exact) / t as f64).sqrt(),
                });
            }
            vec![rec]
        }
        StatmechCommand::Mixing {
            n_a,
            n_b,
            same_species,
        } => {
            let e =
                mixing_demo::<f64>(n_a, n_b, same_species)?.convert_base(g.base.unwrap_or(2.0))?;
            vec![json!({
                "name": "mixing",
                "n_a": n_a,
                "n_b": n_b,
                "same_species": same_species,
                "entropy": to_value(&e)?,
            })]
        }
    };
    Ok(Outcome {
        command: "statmech",
        records,
        violation: false,
    })
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

/// Renders an outcome in the requested format.
pub fn render(outcome: &Outcome, format: Format) -> Result<String> {
    let records: Vec<Value> = outcome.records.iter().cloned().map(round_floats).collect();
    match format {
        Format::Json => {
            let doc = json!({
                "command": outcome.command,
                "results": records,
                "violation": outcome.violation,
            });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => render_csv(&csv_rows(&records)),
        Format::Human => Ok(render_human(outcome, &records)),
    }
}

/// Search traces become one CSV row per evaluated point; everything else is one row per record.
fn csv_rows(records: &[Value]) -> Vec<Map<String, Value>> {
    let mut rows = Vec::new();
    for rec in records {
        if let Some(Value::Array(trace)) = rec.get("trace") {
            rows.extend(trace.iter().filter_map(|e| e.as_object().cloned()));
            continue;
        }
        let mut flat = Map::new();
        flatten("", rec, &mut flat);
        rows.push(flat);
    }
    rows
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn render_csv(rows: &[Map<String, Value>]) -> Result<String> {
    let mut header: Vec<String> = Vec::new();
    for row in rows {
        for k in row.keys() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    // `name` first when present, then the rest in sorted order.
    header.sort_by(|a, b| (a != "name", a).cmp(&(b != "name", b)));
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(format!("csv output failed: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        w.write_record(
            header
                .iter()
                .map(|k| row.get(k).map(cell).unwrap_or_default()),
        )
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
}

fn render_human(outcome: &Outcome, records: &[Value]) -> String {
    let mut out = String::new();
    for rec in records {
        let mut flat = Map::new();
        flatten("", rec, &mut flat);
        let title = flat
            .remove("name")
            .or_else(|| flat.remove("quantity"))
            .map(|v| cell(&v))
            .unwrap_or_else(|| outcome.command.to_string());
        if let Some(Value::Bool(ok)) = flat.get("satisfied") {
            let _ = writeln!(
                out,
                "{title}: {}",
                if *ok { "satisfied" } else { "VIOLATED" }
            );
        } else {
            let _ = writeln!(out, "{title}");
        }
        let trace_len = flat.get("trace").and_then(Value::as_array).map(Vec::len);
        flat.remove("trace");
        for (k, v) in &flat {
            let _ = writeln!(out, "  {k} = {}", cell(v));
        }
        if let Some(n) = trace_len {
            let _ = writeln!(out, "  trace = {n} points (use --format csv to list them)");
        }
    }
    if outcome.violation {
        out.push_str("violation found\n");
    }
    out
}
