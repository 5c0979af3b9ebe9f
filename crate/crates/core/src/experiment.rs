//! Noise-sweep ensembles: error per site versus Krylov dimension, and
//! converged error versus noise rate.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::ground_truth;
use crate::krylov::{assemble, solve_thresholded, trial_statistic, ThresholdFamily, ThresholdPolicy};
use crate::lattice::{antiferro_index, antiferro_state, build_j1j2, LatticeSpec};
use crate::moments::{add_noise, compute_moments, MomentSeq};
use crate::pauli::PauliSum;
use crate::state::StateVec;

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "CHEBYLANCZOS_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default)]
    pub hamiltonian_file: Option<PathBuf>,
    /// Name used in the CSV `lattice` column.
    #[serde(default)]
    pub label: Option<String>,
    /// Circuit depth used for the query count; defaults from the lattice size.
    #[serde(default)]
    pub depth: Option<usize>,
    /// Largest Krylov dimension swept for this model.
    #[serde(default)]
    pub d_max: Option<usize>,
}

impl ModelSpec {
    pub fn lattice(spec: LatticeSpec) -> Self {
        ModelSpec {
            lattice: Some(spec),
            hamiltonian_file: None,
            label: None,
            depth: None,
            d_max: None,
        }
    }

    pub fn name(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (&self.lattice, &self.hamiltonian_file) {
            (Some(l), _) => l.label(),
            (None, Some(p)) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "hamiltonian".into()),
            (None, None) => "model".into(),
        }
    }

    /// Convergence depth for the standard lattices: 5 for 2×2, 40 for 2×3 and
    /// 3×3, 50 for 3×4 and 4×4.
    pub fn default_depth(&self) -> Option<usize> {
        if let Some(d) = self.depth {
            return Some(d);
        }
        let l = self.lattice.as_ref()?;
        let (a, b) = (l.rows.min(l.cols), l.rows.max(l.cols));
        match (a, b) {
            (2, 2) => Some(5),
            (2, 3) | (3, 3) => Some(40),
            (3, 4) | (4, 4) => Some(50),
            _ => None,
        }
    }

    fn build(&self) -> Result<PauliSum> {
        match (&self.lattice, &self.hamiltonian_file) {
            (Some(l), None) => build_j1j2(l),
            (None, Some(p)) => PauliSum::load(p),
            _ => Err(Error::Config(
                "a model needs exactly one of `lattice` or `hamiltonian_file`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Checkerboard state; for Hamiltonian files, alternating `0101…`.
    #[default]
    Antiferro,
    BasisIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    #[serde(default = "default_noise_rates")]
    pub noise_rates: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_family")]
    pub threshold_family: ThresholdFamily,
    #[serde(default)]
    pub threshold_constant_override: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Sliding-window length for the smoothed dimension sweep.
    #[serde(default = "default_window")]
    pub smoothing_window: usize,
    /// Number of trailing dimensions averaged into a converged error.
    #[serde(default = "default_window")]
    pub converged_window: usize,
}

fn default_d_max() -> usize {
    20
}

fn default_noise_rates() -> Vec<f64> {
    vec![0.0]
}

fn default_trials() -> usize {
    100
}

fn default_family() -> ThresholdFamily {
    ThresholdFamily::Spin
}

fn default_window() -> usize {
    10
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: None,
            models: Vec::new(),
            initial_state: InitialState::default(),
            d_max: default_d_max(),
            noise_rates: default_noise_rates(),
            trials: default_trials(),
            seed: 0,
            threshold_family: default_family(),
            threshold_constant_override: None,
            output: None,
            smoothing_window: default_window(),
            converged_window: default_window(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_max == 0 {
            return Err(Error::Config("d_max must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.noise_rates.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
            return Err(Error::Config("noise rates must be finite and nonnegative".into()));
        }
        if self.smoothing_window == 0 || self.converged_window == 0 {
            return Err(Error::Config("window lengths must be at least 1".into()));
        }
        if let Some(c) = self.threshold_constant_override {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config("threshold constant must be positive".into()));
            }
        }
        Ok(())
    }

    /// `model` followed by `models`.
    pub fn all_models(&self) -> Vec<ModelSpec> {
        self.model.iter().chain(&self.models).cloned().collect()
    }

    pub fn policy(&self) -> ThresholdPolicy {
        let p = ThresholdPolicy::default();
        match self.threshold_constant_override {
            Some(c) => p.with_constant(self.threshold_family, c),
            None => p,
        }
    }
}

/// Model prepared for a sweep: normalized Hamiltonian, initial state and
/// reference ground energy.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub label: String,
    pub hamiltonian: PauliSum,
    pub psi0: StateVec,
    pub ground_energy: f64,
    pub sites: usize,
}

pub fn prepare_model(spec: &ModelSpec, initial: InitialState) -> Result<PreparedModel> {
    let h = spec.build()?;
    let n = h.n_qubits();
    let psi0 = match (initial, &spec.lattice) {
        (InitialState::Antiferro, Some(l)) => antiferro_state(l.rows, l.cols)?,
        (InitialState::Antiferro, None) => StateVec::basis(n, antiferro_index(1, n))?,
        (InitialState::BasisIndex(k), _) => StateVec::basis(n, k)?,
    };
    let ground = ground_truth(&h)?;
    Ok(PreparedModel {
        label: spec.name(),
        psi0,
        ground_energy: ground.energy,
        sites: n,
        hamiltonian: h,
    })
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream seed for one `(model, η, D, trial)` grid cell.
pub fn substream_seed(seed: u64, model: usize, eta_index: usize, d: usize, trial: usize) -> u64 {
    [model, eta_index, d, trial]
        .iter()
        .fold(splitmix(seed), |h, &v| splitmix(h ^ v as u64))
}

/// Outcome of all trials at one `(η, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub threshold: f64,
    pub error_per_site: f64,
    pub kept_dim: Option<usize>,
    pub error_code: Option<&'static str>,
}

fn nan_cell(threshold: f64, code: &'static str) -> CellResult {
    CellResult {
        threshold,
        error_per_site: f64::NAN,
        kept_dim: None,
        error_code: Some(code),
    }
}

/// Runs every trial at one grid cell and trims the per-trial absolute
/// errors per site. Failed trials are skipped; the cell fails only if all
/// trials do.
fn run_cell(
    model: &PreparedModel,
    moments: &MomentSeq,
    cfg: &ExperimentConfig,
    model_index: usize,
    eta_index: usize,
    d: usize,
) -> CellResult {
    let eta = cfg.noise_rates[eta_index];
    let threshold = cfg.policy().pick(eta, cfg.threshold_family);
    let base = match moments.truncate(d) {
        Ok(m) => m,
        Err(e) => return nan_cell(threshold, e.code()),
    };
    let trials = if eta == 0.0 { 1 } else { cfg.trials };
    let per_site = model.hamiltonian.scale() / model.sites as f64;
    let mut errors = Vec::with_capacity(trials);
    let mut kept = Vec::with_capacity(trials);
    let mut first_error = None;
    for t in 0..trials {
        let outcome = (|| {
            let m = if eta == 0.0 {
                base.clone()
            } else {
                add_noise(&base, eta, substream_seed(cfg.seed, model_index, eta_index, d, t))?
            };
            solve_thresholded(&assemble(&m)?, threshold)
        })();
        match outcome {
            Ok(r) => {
                errors.push((r.energy_normalized - model.ground_energy).abs() * per_site);
                kept.push(r.kept);
            }
            Err(e) => {
                first_error.get_or_insert(e.code());
            }
        }
    }
    match trial_statistic(&errors) {
        Ok(e) => {
            kept.sort_unstable();
            CellResult {
                threshold,
                error_per_site: e,
                kept_dim: Some(kept[(kept.len() - 1) / 2]),
                error_code: None,
            }
        }
        Err(_) => nan_cell(threshold, first_error.unwrap_or("empty_input")),
    }
}

/// Thread pool size: `workers` if given, else the environment variable,
/// else the rayon default.
pub fn worker_count(workers: Option<usize>) -> Result<usize> {
    if let Some(w) = workers {
        return Ok(w.max(1));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|w| w.max(1))
            .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(workers)?)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Error per site for dimensions `dims` and every noise rate, in
/// `(η, D)` order.
fn sweep(
    model: &PreparedModel,
    cfg: &ExperimentConfig,
    model_index: usize,
    dims: &[usize],
) -> Result<Vec<(usize, usize, CellResult)>> {
    let d_top = *dims.iter().max().ok_or(Error::EmptyInput)?;
    let moments = compute_moments(&model.hamiltonian, &model.psi0, d_top)?;
    let grid: Vec<(usize, usize)> = (0..cfg.noise_rates.len())
        .flat_map(|e| dims.iter().map(move |&d| (e, d)))
        .collect();
    Ok(grid
        .par_iter()
        .map(|&(e, d)| (e, d, run_cell(model, &moments, cfg, model_index, e, d)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub lattice: String,
    #[serde(rename = "D")]
    pub d: usize,
    pub eta: f64,
    pub threshold: f64,
    pub error_per_site: f64,
    pub kept_dim: Option<usize>,
    pub error_code: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothedRow {
    pub lattice: String,
    pub eta: f64,
    pub d_start: usize,
    pub d_end: usize,
    pub error_per_site: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    pub rows: Vec<Fig2Row>,
    pub smoothed: Vec<SmoothedRow>,
}

impl Fig2Output {
    pub fn to_csv(&self) -> Result<String> {
        to_csv(&self.rows)
    }

    pub fn smoothed_csv(&self) -> Result<String> {
        to_csv(&self.smoothed)
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

/// Means of finite values over each run of `window` consecutive dimensions.
pub fn smooth(rows: &[Fig2Row], window: usize) -> Vec<SmoothedRow> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let mut end = start;
        while end < rows.len() && rows[end].eta == rows[start].eta && rows[end].lattice == rows[start].lattice {
            end += 1;
        }
        let series = &rows[start..end];
        for w in series.windows(window) {
            let finite: Vec<f64> = w.iter().map(|r| r.error_per_site).filter(|x| x.is_finite()).collect();
            let mean = if finite.is_empty() {
                f64::NAN
            } else {
                finite.iter().sum::<f64>() / finite.len() as f64
            };
            out.push(SmoothedRow {
                lattice: w[0].lattice.clone(),
                eta: w[0].eta,
                d_start: w[0].d,
                d_end: w[w.len() - 1].d,
                error_per_site: mean,
            });
        }
        start = end;
    }
    out
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Fig2Output> {
    run_fig2_with_workers(cfg, None)
}

pub fn run_fig2_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Fig2Output> {
    cfg.validate()?;
    let models = cfg.all_models();
    if models.is_empty() {
        return Err(Error::Config("no model given".into()));
    }
    let mut rows = Vec::new();
    for (mi, spec) in models.iter().enumerate() {
        let model = prepare_model(spec, cfg.initial_state)?;
        let dims: Vec<usize> = (1..=spec.d_max.unwrap_or(cfg.d_max)).collect();
        let cells = with_pool(workers, || sweep(&model, cfg, mi, &dims))??;
        rows.extend(cells.into_iter().map(|(e, d, c)| Fig2Row {
            lattice: model.label.clone(),
            d,
            eta: cfg.noise_rates[e],
            threshold: c.threshold,
            error_per_site: c.error_per_site,
            kept_dim: c.kept_dim,
            error_code: c.error_code.unwrap_or("").to_string(),
        }));
    }
    let smoothed = smooth(&rows, cfg.smoothing_window);
    Ok(Fig2Output { rows, smoothed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Row {
    pub lattice: String,
    pub eta: f64,
    pub depth: usize,
    pub error_per_site: f64,
    pub total_queries: f64,
    pub error_code: String,
}

/// Last dimension of the converged window for one model: the model's own
/// `d_max`, else ten past `max(depth, 10)`.
pub fn fig3_last_dimension(spec: &ModelSpec) -> usize {
    spec.d_max
        .unwrap_or_else(|| spec.default_depth().unwrap_or(10).max(10) + 10)
}

/// Shots per moment `1/η²` (unit constant) times `2·depth` moments times
/// circuit depth.
pub fn total_queries(depth: usize, eta: f64) -> f64 {
    let d = depth as f64;
    d * 2.0 * d / (eta * eta)
}

pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Vec<Fig3Row>> {
    run_fig3_with_workers(cfg, None)
}

pub fn run_fig3_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<Fig3Row>> {
    cfg.validate()?;
    let models = cfg.all_models();
    if models.is_empty() {
        return Err(Error::Config("no model given".into()));
    }
    let mut rows = Vec::new();
    for (mi, spec) in models.iter().enumerate() {
        let depth = spec
            .default_depth()
            .ok_or_else(|| Error::Config(format!("model {} needs an explicit depth", spec.name())))?;
        let model = prepare_model(spec, cfg.initial_state)?;
        let last = fig3_last_dimension(spec);
        let first = last.saturating_sub(cfg.converged_window - 1).max(1);
        let dims: Vec<usize> = (first..=last).collect();
        let cells = with_pool(workers, || sweep(&model, cfg, mi, &dims))??;
        for (e, &eta) in cfg.noise_rates.iter().enumerate() {
            let mine: Vec<&CellResult> = cells.iter().filter(|c| c.0 == e).map(|c| &c.2).collect();
            let finite: Vec<f64> = mine.iter().map(|c| c.error_per_site).filter(|x| x.is_finite()).collect();
            let (error_per_site, code) = if finite.is_empty() {
                (f64::NAN, mine.iter().find_map(|c| c.error_code).unwrap_or("empty_input"))
            } else {
                (finite.iter().sum::<f64>() / finite.len() as f64, "")
            };
            rows.push(Fig3Row {
                lattice: model.label.clone(),
                eta,
                depth,
                error_per_site,
                total_queries: total_queries(depth, eta),
                error_code: code.to_string(),
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
