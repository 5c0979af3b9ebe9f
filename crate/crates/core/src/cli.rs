//! Command-line front end. Every subcommand also reads its options from a
//! JSON file given with `--config`; flags on the command line win.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::blockenc::verify_lemma1;
use crate::bounds::{bound_report, gate_costs, BoundParams, Scheme};
use crate::error::{Error, Result};
use crate::experiment::{run_fig2, run_fig3, to_csv, ExperimentConfig, InitialState, ModelSpec};
use crate::ground::ground_truth;
use crate::krylov::{assemble, solve_thresholded, ThresholdFamily, ThresholdPolicy};
use crate::lattice::{Boundary, LatticeSpec};
use crate::moments::{add_noise, compute_moments, MomentSeq};
use crate::experiment::prepare_model;

#[derive(Debug, Parser)]
#[command(name = "chebylanczos", version, about = "Chebyshev-moment Krylov ground-state estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a Hamiltonian and report its size, scale and ground energy.
    Model(ModelCmd),
    /// Chebyshev moments of a model from its initial state.
    Moments(MomentsCmd),
    /// Krylov matrices and the thresholded ground-energy estimate.
    Krylov(KrylovCmd),
    /// Numerical certificates for the block encoding.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Evaluate the error bounds and scalings for a parameter set.
    Bounds(BoundsCmd),
    /// Gate counts for the block-encoding operators.
    Gatecount(GateCmd),
    /// Error per site versus Krylov dimension, as CSV.
    Fig2(SweepCmd),
    /// Converged error per site versus noise rate, as CSV.
    Fig3(SweepCmd),
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// Compare walk-operator blocks with T_k(H) for a random Pauli sum.
    Lemma1(Lemma1Cmd),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct ModelArgs {
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    j1: Option<f64>,
    #[arg(long)]
    j2: Option<f64>,
    /// Periodic boundaries.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    periodic: Option<bool>,
    /// Pauli-sum text file instead of a lattice.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Initial basis state (default: checkerboard).
    #[arg(long)]
    basis_index: Option<usize>,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        match (&self.file, self.rows, self.cols) {
            (Some(f), None, None) => Ok(ModelSpec {
                lattice: None,
                hamiltonian_file: Some(f.clone()),
                label: None,
                depth: None,
                d_max: None,
            }),
            (None, Some(r), Some(c)) => {
                let mut l = LatticeSpec::new(r, c);
                if let Some(j1) = self.j1 {
                    l.j1 = j1;
                }
                if let Some(j2) = self.j2 {
                    l.j2 = j2;
                }
                if self.periodic.unwrap_or(false) {
                    l.boundary = Boundary::Periodic;
                }
                Ok(ModelSpec::lattice(l))
            }
            _ => Err(Error::Config("give either --rows and --cols, or --file".into())),
        }
    }

    fn initial(&self) -> InitialState {
        self.basis_index.map_or(InitialState::Antiferro, InitialState::BasisIndex)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct ModelCmd {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct MomentsCmd {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Krylov dimension; 2D moments are produced.
    #[arg(short, long)]
    d: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct KrylovCmd {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Moment sequence JSON, as written by `moments`.
    #[arg(long)]
    moments: Option<PathBuf>,
    #[arg(short, long)]
    d: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Overlap threshold; defaults to the rule for the noise rate.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_parser = parse_family)]
    family: Option<ThresholdFamily>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct Lemma1Cmd {
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
struct BoundsCmd {
    /// BoundParams JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline BoundParams JSON.
    #[arg(long)]
    json: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
struct GateCmd {
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(short)]
    n: Option<u64>,
    #[arg(short)]
    t: Option<u64>,
    /// Krylov dimension for the depth estimate.
    #[arg(short)]
    d: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
struct SweepCmd {
    /// ExperimentConfig JSON.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination (overrides the config); standard output if absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<ThresholdFamily, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown family {s:?}"))
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    serde_json::from_value(Value::String(s.replace('-', "_"))).map_err(|_| format!("unknown scheme {s:?}"))
}

/// Overlays the flags that were given on top of the config file.
fn merged<T: Serialize + DeserializeOwned>(cli: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(cli)?)?);
    };
    let mut base: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let Value::Object(map) = &mut base else {
        return Err(Error::Config("config file must hold a JSON object".into()));
    };
    if let Value::Object(flags) = serde_json::to_value(cli)? {
        for (k, v) in flags {
            if !v.is_null() {
                map.insert(k, v);
            }
        }
    }
    Ok(serde_json::from_value(base)?)
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required option --{name}")))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct ModelSummary {
    label: String,
    n_qubits: usize,
    n_terms: usize,
    scale: f64,
    initial_overlap: f64,
    ground_energy: f64,
    ground_energy_physical: f64,
    hamiltonian: String,
}

fn cmd_model(c: &ModelCmd, out: &mut dyn Write) -> Result<()> {
    let c = merged(c, c.config.as_deref())?;
    let spec = c.model.spec()?;
    let m = prepare_model(&spec, c.model.initial())?;
    let ground = ground_truth(&m.hamiltonian)?;
    emit_json(
        out,
        &ModelSummary {
            label: m.label,
            n_qubits: m.hamiltonian.n_qubits(),
            n_terms: m.hamiltonian.len(),
            scale: m.hamiltonian.scale(),
            initial_overlap: ground.overlap(&m.psi0)?,
            ground_energy: ground.energy,
            ground_energy_physical: ground.energy_physical(),
            hamiltonian: m.hamiltonian.to_text(),
        },
    )
}

fn model_moments(model: &ModelArgs, d: usize, eta: Option<f64>, seed: Option<u64>) -> Result<MomentSeq> {
    let spec = model.spec()?;
    let h = match (&spec.lattice, &spec.hamiltonian_file) {
        (Some(l), _) => crate::lattice::build_j1j2(l)?,
        (_, Some(f)) => crate::pauli::PauliSum::load(f)?,
        _ => unreachable!("spec() returns one of the two"),
    };
    let psi0 = match (model.initial(), &spec.lattice) {
        (InitialState::BasisIndex(k), _) => crate::state::StateVec::basis(h.n_qubits(), k)?,
        (InitialState::Antiferro, Some(l)) => crate::lattice::antiferro_state(l.rows, l.cols)?,
        (InitialState::Antiferro, None) => crate::state::StateVec::basis(
            h.n_qubits(),
            crate::lattice::antiferro_index(1, h.n_qubits()),
        )?,
    };
    let m = compute_moments(&h, &psi0, d)?;
    match eta {
        Some(e) if e > 0.0 => add_noise(&m, e, seed.unwrap_or(0)),
        _ => Ok(m),
    }
}

fn cmd_moments(c: &MomentsCmd, out: &mut dyn Write) -> Result<()> {
    let c = merged(c, c.config.as_deref())?;
    let m = model_moments(&c.model, required(c.d, "d")?, c.eta, c.seed)?;
    emit_json(out, &m)
}

#[derive(Serialize)]
struct KrylovOutput {
    pair: crate::krylov::KrylovPair,
    report: crate::krylov::ThresholdReport,
}

fn cmd_krylov(c: &KrylovCmd, out: &mut dyn Write) -> Result<()> {
    let c = merged(c, c.config.as_deref())?;
    let mut m = match &c.moments {
        Some(p) => serde_json::from_str::<MomentSeq>(&std::fs::read_to_string(p)?)?,
        None => model_moments(&c.model, required(c.d, "d")?, None, None)?,
    };
    if c.moments.is_some() {
        if let Some(d) = c.d {
            m = m.truncate(d)?;
        }
    }
    if let Some(e) = c.eta.filter(|&e| e > 0.0) {
        m = add_noise(&m, e, c.seed.unwrap_or(0))?;
    }
    let eta = m.noise.map_or(0.0, |n| n.eta);
    let epsilon = c
        .epsilon
        .unwrap_or_else(|| ThresholdPolicy::default().pick(eta, c.family.unwrap_or(ThresholdFamily::Spin)));
    let pair = assemble(&m)?;
    let report = solve_thresholded(&pair, epsilon)?;
    emit_json(out, &KrylovOutput { pair, report })
}

fn cmd_lemma1(c: &Lemma1Cmd, out: &mut dyn Write) -> Result<()> {
    let c = merged(c, c.config.as_deref())?;
    let report = verify_lemma1(
        required(c.qubits, "qubits")?,
        required(c.terms, "terms")?,
        c.seed.unwrap_or(0),
        c.kmax.unwrap_or(10),
    )?;
    emit_json(out, &report)
}

fn cmd_bounds(c: &BoundsCmd, out: &mut dyn Write) -> Result<()> {
    let text = match (&c.config, &c.json) {
        (Some(p), None) => std::fs::read_to_string(p)?,
        (None, Some(s)) => s.clone(),
        _ => return Err(Error::Config("give exactly one of --config or --json".into())),
    };
    let params: BoundParams = serde_json::from_str(&text)?;
    emit_json(out, &bound_report(&params)?)
}

#[derive(Serialize)]
struct GateOutput {
    #[serde(flatten)]
    report: crate::bounds::CostReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<u64>,
}

fn cmd_gatecount(c: &GateCmd, out: &mut dyn Write) -> Result<()> {
    let c = merged(c, c.config.as_deref())?;
    let report = gate_costs(required(c.n, "n")?, required(c.t, "t")?, required(c.scheme, "scheme")?)?;
    let depth = c.d.and_then(|d| report.depth(d));
    emit_json(out, &GateOutput { report, depth })
}

fn sweep_config(c: &SweepCmd) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_json(&std::fs::read_to_string(&c.config)?)?;
    if c.output.is_some() {
        cfg.output = c.output.clone();
    }
    Ok(cfg)
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `results.csv` → `results_smoothed.csv`
pub fn smoothed_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_smoothed.csv"))
}

fn cmd_fig2(c: &SweepCmd, out: &mut dyn Write) -> Result<()> {
    let cfg = sweep_config(c)?;
    let result = run_fig2(&cfg)?;
    write_or_print(cfg.output.as_deref(), &result.to_csv()?, out)?;
    if let Some(p) = &cfg.output {
        std::fs::write(smoothed_path(p), result.smoothed_csv()?)?;
    }
    Ok(())
}

fn cmd_fig3(c: &SweepCmd, out: &mut dyn Write) -> Result<()> {
    let cfg = sweep_config(c)?;
    let rows = run_fig3(&cfg)?;
    write_or_print(cfg.output.as_deref(), &to_csv(&rows)?, out)
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code: 0 on success, 1 for usage errors, 2 for numerical failures.
pub fn dispatch<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Model(c) => cmd_model(c, out),
        Command::Moments(c) => cmd_moments(c, out),
        Command::Krylov(c) => cmd_krylov(c, out),
        Command::Verify { what: VerifyCmd::Lemma1(c) } => cmd_lemma1(c, out),
        Command::Bounds(c) => cmd_bounds(c, out),
        Command::Gatecount(c) => cmd_gatecount(c, out),
        Command::Fig2(c) => cmd_fig2(c, out),
        Command::Fig3(c) => cmd_fig3(c, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}
