//! Scenario ingestion, experiment orchestration (spectra, coupling tables,
//! trajectories, detuning×time sweeps, model-vs-baseline comparison) and
//! CSV/JSON/SVG emission.
//!
//! Everything in the pipeline is deterministic: no RNG, fixed-precision
//! formatting, and sweep results assembled in grid order regardless of the
//! worker pool, so re-running a scenario is byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::couplings::{compute_couplings, CouplingSet};
use crate::dynamics::{
    adiabatic_idf_elimination, build_drift_bc, build_drift_mof, evolve_covariance,
    initial_covariance, initial_covariance_pair, EntanglementTrace, Method, NoiseMode,
};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, ModePair};
use crate::optics::{spectrum, spectrum_seq, Resonance, ResonanceSet, SpectrumTable};
use crate::params::{derive, validate_regime, CouplingKind, ModelParams};
use crate::plot::{heatmap_svg, line_plot_svg, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    Couplings,
    Evolve,
    Sweep,
    CompareBc,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Couplings => "couplings",
            Experiment::Evolve => "evolve",
            Experiment::Sweep => "sweep",
            Experiment::CompareBc => "compare_bc",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl LinGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.max > self.min) {
            return Err(Error::Config(format!(
                "omega_grid needs count >= 2 and max > min, got [{}, {}] x {}",
                self.min, self.max, self.count
            )));
        }
        Ok((0..self.count)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.samples < 2 || !(self.t_end > 0.0) {
            return Err(Error::Config(format!(
                "time_grid needs samples >= 2 and t_end > 0, got t_end = {}, samples = {}",
                self.t_end, self.samples
            )));
        }
        Ok((0..self.samples)
            .map(|k| self.t_end * k as f64 / (self.samples - 1) as f64)
            .collect())
    }
}

/// Detuning grid in units of the mechanical frequency ℧.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl DetuningGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.max >= self.min) {
            return Err(Error::Config(format!(
                "detuning_grid needs step > 0 and max >= min, got [{}, {}] step {}",
                self.min, self.max, self.step
            )));
        }
        let n = ((self.max - self.min) / self.step + 0.5).floor() as usize + 1;
        Ok((0..n).map(|k| self.min + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodCfg {
    #[default]
    Rk4,
    Exact,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorCfg {
    #[serde(default)]
    pub method: MethodCfg,
    /// Fixed step override for rk4; the default is (2π/50)/‖A‖∞.
    #[serde(default)]
    pub step: Option<f64>,
}

impl IntegratorCfg {
    pub fn method(&self) -> Method {
        match self.method {
            MethodCfg::Rk4 => Method::Rk4 { step: self.step },
            MethodCfg::Exact => Method::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseCfg {
    #[default]
    HighT,
    Bose,
}

impl NoiseCfg {
    fn mode(self) -> NoiseMode {
        match self {
            NoiseCfg::HighT => NoiseMode::HighT,
            NoiseCfg::Bose => NoiseMode::Bose,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialMirror {
    #[default]
    Thermal,
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemCfg {
    #[default]
    Mof,
    Bc,
}

/// A parsed scenario file (schema_version 1).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub params: ModelParams,
    #[serde(default)]
    pub omega_grid: Option<LinGrid>,
    #[serde(default)]
    pub resonances: Option<Vec<Resonance>>,
    #[serde(default)]
    pub time_grid: Option<TimeGrid>,
    #[serde(default)]
    pub detuning_grid: Option<DetuningGrid>,
    #[serde(default)]
    pub integrator: IntegratorCfg,
    #[serde(default)]
    pub noise_mode: NoiseCfg,
    #[serde(default)]
    pub initial_mirror: InitialMirror,
    #[serde(default)]
    pub dump_covariance: bool,
    #[serde(default)]
    pub system: SystemCfg,
    /// Free-form annotations for values that are defaults or derived rather
    /// than preset data; echoed in run summaries.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let sc: Scenario = serde_json::from_str(&text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected 1)",
                self.schema_version
            )));
        }
        self.params.validate()?;
        match self.experiment {
            Experiment::Spectrum => {
                let grid = self
                    .omega_grid
                    .ok_or_else(|| Error::Config("spectrum requires omega_grid".into()))?;
                grid.values()?;
                if let Some(res) = &self.resonances {
                    ResonanceSet::new(res.clone())?;
                }
            }
            Experiment::Couplings => {}
            Experiment::Evolve | Experiment::CompareBc => {
                self.time_grid
                    .ok_or_else(|| {
                        Error::Config(format!("{} requires time_grid", self.experiment.name()))
                    })?
                    .values()?;
            }
            Experiment::Sweep => {
                self.time_grid
                    .ok_or_else(|| Error::Config("sweep requires time_grid".into()))?
                    .values()?;
                self.detuning_grid
                    .ok_or_else(|| Error::Config("sweep requires detuning_grid".into()))?
                    .values()?;
            }
        }
        Ok(())
    }

    fn initial_state_6(&self) -> Result<CovarianceMatrix> {
        match self.initial_mirror {
            InitialMirror::Thermal => initial_covariance(&self.params),
            InitialMirror::Vacuum => {
                let mut p = self.params.clone();
                p.temperature = 0.0;
                initial_covariance(&p)
            }
        }
    }

    fn initial_state_4(&self, freq: f64) -> Result<CovarianceMatrix> {
        match self.initial_mirror {
            InitialMirror::Thermal => initial_covariance_pair(&self.params, freq),
            InitialMirror::Vacuum => {
                let mut p = self.params.clone();
                p.temperature = 0.0;
                initial_covariance_pair(&p, freq)
            }
        }
    }
}

/// Couplings table as emitted by the `couplings` subcommand.
#[derive(Debug, Clone)]
pub struct CouplingsReport {
    pub set: CouplingSet,
}

impl CouplingsReport {
    /// JSON object with complex numbers as [re, im] pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let c = |z: num_complex::Complex64| json!([z.re, z.im]);
        json!({
            "alpha_OF": c(self.set.alpha_of),
            "alpha_OM": c(self.set.alpha_om),
            "alpha_MF": c(self.set.alpha_mf),
            "beta_MF": c(self.set.beta_mf),
            "mho_prime": self.set.mho_prime,
        })
    }
}

/// Trajectory output of the `evolve` experiment.
#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub trace: EntanglementTrace,
    pub quadratures: Vec<&'static str>,
}

/// E_N over the (detuning, time) grid; `e_n[i][j]` is at
/// (`deltas_over_mho[i]`, `times[j]`).
#[derive(Debug, Clone)]
pub struct SurfaceTable {
    pub deltas_over_mho: Vec<f64>,
    pub times: Vec<f64>,
    pub e_n: Vec<Vec<f64>>,
}

impl SurfaceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta_over_mho,t,E_N\n");
        for (i, d) in self.deltas_over_mho.iter().enumerate() {
            for (j, t) in self.times.iter().enumerate() {
                out.push_str(&format!("{d:.12e},{t:.12e},{:.12e}\n", self.e_n[i][j]));
            }
        }
        out
    }

    /// max_t E_N for each detuning.
    pub fn peak_per_detuning(&self) -> Vec<f64> {
        self.e_n
            .iter()
            .map(|row| row.iter().copied().fold(0.0f64, f64::max))
            .collect()
    }

    /// Trapezoidal ∫ E_N dt for each detuning.
    pub fn integrated_per_detuning(&self) -> Vec<f64> {
        self.e_n
            .iter()
            .map(|row| {
                row.windows(2)
                    .zip(self.times.windows(2))
                    .map(|(e, t)| 0.5 * (e[0] + e[1]) * (t[1] - t[0]))
                    .sum()
            })
            .collect()
    }
}

/// Side-by-side E_N traces of the full damped model, its adiabatic
/// reduction, and the boundary-condition baseline.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub e_n_mof: Vec<f64>,
    /// Absent when the elimination denominator Δ² + γ_iγ_f is zero.
    pub e_n_adiabatic: Option<Vec<f64>>,
    pub e_n_bc: Vec<f64>,
    pub max_dev_mof_bc: f64,
    pub max_dev_adiabatic_bc: Option<f64>,
    pub max_e_n_bc: f64,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,E_N_mof,E_N_adiabatic,E_N_bc\n");
        for (j, t) in self.times.iter().enumerate() {
            let adiab = self
                .e_n_adiabatic
                .as_ref()
                .map_or(String::from("nan"), |v| format!("{:.12e}", v[j]));
            out.push_str(&format!(
                "{t:.12e},{:.12e},{adiab},{:.12e}\n",
                self.e_n_mof[j], self.e_n_bc[j]
            ));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "max_dev_mof_bc": self.max_dev_mof_bc,
            "max_dev_adiabatic_bc": self.max_dev_adiabatic_bc,
            "max_E_N_bc": self.max_e_n_bc,
            "notes": self.notes,
        })
    }
}

fn max_abs_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run_spectrum(sc: &Scenario) -> Result<SpectrumTable> {
    let grid = sc
        .omega_grid
        .ok_or_else(|| Error::Config("spectrum requires omega_grid".into()))?
        .values()?;
    let set = match &sc.resonances {
        Some(res) => ResonanceSet::new(res.clone())?,
        None => ResonanceSet::single_from_params(&sc.params, sc.params.coupling_kind)?,
    };
    spectrum(&grid, &set, sc.params.coupling_kind, sc.params.consts.c)
}

/// Sequential twin of [`run_spectrum`] (used by the benches).
pub fn run_spectrum_seq(sc: &Scenario) -> Result<SpectrumTable> {
    let grid = sc
        .omega_grid
        .ok_or_else(|| Error::Config("spectrum requires omega_grid".into()))?
        .values()?;
    let set = match &sc.resonances {
        Some(res) => ResonanceSet::new(res.clone())?,
        None => ResonanceSet::single_from_params(&sc.params, sc.params.coupling_kind)?,
    };
    spectrum_seq(&grid, &set, sc.params.coupling_kind, sc.params.consts.c)
}

pub fn run_couplings(sc: &Scenario) -> Result<CouplingsReport> {
    Ok(CouplingsReport { set: compute_couplings(&sc.params)? })
}

pub fn run_evolve(sc: &Scenario) -> Result<EvolveResult> {
    let times = sc
        .time_grid
        .ok_or_else(|| Error::Config("evolve requires time_grid".into()))?
        .values()?;
    let noise = sc.noise_mode.mode();
    let method = sc.integrator.method();
    let hbar = sc.params.consts.hbar;
    let (trace, quadratures) = match sc.system {
        SystemCfg::Mof => {
            let cs = compute_couplings(&sc.params)?;
            let sys = build_drift_mof(&cs, &sc.params, noise)?;
            let v0 = sc.initial_state_6()?;
            let traj = evolve_covariance(&sys, &v0, &times, method)?;
            (
                traj.entanglement_trace(ModePair::MF, hbar, sc.dump_covariance)?,
                crate::dynamics::LABELS_6.to_vec(),
            )
        }
        SystemCfg::Bc => {
            let sys = build_drift_bc(&sc.params, noise)?;
            let v0 = sc.initial_state_4(sc.params.mho)?;
            let traj = evolve_covariance(&sys, &v0, &times, method)?;
            (
                traj.entanglement_trace(ModePair::MF, hbar, sc.dump_covariance)?,
                crate::dynamics::LABELS_4.to_vec(),
            )
        }
    };
    Ok(EvolveResult { trace, quadratures })
}

pub fn evolve_csv(result: &EvolveResult) -> String {
    let mut header = String::from("t,E_N_MF,c_minus");
    if let Some(covs) = &result.trace.covariances {
        let dim = covs[0].dim();
        for i in 0..dim {
            for j in 0..dim {
                header.push_str(&format!(
                    ",V_{}_{}",
                    result.quadratures[i], result.quadratures[j]
                ));
            }
        }
    }
    header.push('\n');
    let mut out = header;
    for (k, t) in result.trace.times.iter().enumerate() {
        out.push_str(&format!(
            "{t:.12e},{:.12e},{:.12e}",
            result.trace.e_n[k], result.trace.c_minus[k]
        ));
        if let Some(covs) = &result.trace.covariances {
            let m = covs[k].as_matrix();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push_str(&format!(",{:.12e}", m[(i, j)]));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// One sweep point: detuning Δ = x·℧ moves the drive frequency, the
/// couplings are recomputed (R*(ω) changes with Δ), and the system is
/// evolved over the time grid.
fn sweep_point(sc: &Scenario, delta_over_mho: f64, times: &[f64]) -> Result<Vec<f64>> {
    let mut p = sc.params.clone();
    p.omega_drive = p.omega_idf + delta_over_mho * p.mho;
    let cs = compute_couplings(&p)?;
    let sys = build_drift_mof(&cs, &p, sc.noise_mode.mode())?;
    let v0 = match sc.initial_mirror {
        InitialMirror::Thermal => initial_covariance(&p)?,
        InitialMirror::Vacuum => {
            let mut q = p.clone();
            q.temperature = 0.0;
            initial_covariance(&q)?
        }
    };
    let traj = evolve_covariance(&sys, &v0, times, sc.integrator.method())?;
    Ok(traj
        .entanglement_trace(ModePair::MF, p.consts.hbar, false)?
        .e_n)
}

fn sweep_grids(sc: &Scenario) -> Result<(Vec<f64>, Vec<f64>)> {
    let times = sc
        .time_grid
        .ok_or_else(|| Error::Config("sweep requires time_grid".into()))?
        .values()?;
    let deltas = sc
        .detuning_grid
        .ok_or_else(|| Error::Config("sweep requires detuning_grid".into()))?
        .values()?;
    Ok((times, deltas))
}

/// Detuning×time sweep of E_N. Points run on the worker pool when the
/// `parallel` feature is on; output order follows the grid either way.
pub fn sweep_surface(sc: &Scenario) -> Result<SurfaceTable> {
    let (times, deltas) = sweep_grids(sc)?;
    #[cfg(feature = "parallel")]
    let e_n: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        deltas
            .par_iter()
            .map(|&d| sweep_point(sc, d, &times))
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let e_n: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| sweep_point(sc, d, &times))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceTable { deltas_over_mho: deltas, times, e_n })
}

/// Strictly sequential sweep; same result as [`sweep_surface`].
pub fn sweep_surface_seq(sc: &Scenario) -> Result<SurfaceTable> {
    let (times, deltas) = sweep_grids(sc)?;
    let e_n: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| sweep_point(sc, d, &times))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceTable { deltas_over_mho: deltas, times, e_n })
}

/// Run the full damped model, its adiabatic reduction and the
/// boundary-condition baseline on the same grid and report deviations.
pub fn compare_mof_bc(sc: &Scenario) -> Result<ComparisonReport> {
    let times = sc
        .time_grid
        .ok_or_else(|| Error::Config("compare_bc requires time_grid".into()))?
        .values()?;
    let p = &sc.params;
    let noise = sc.noise_mode.mode();
    let method = sc.integrator.method();
    let hbar = p.consts.hbar;
    let cs = compute_couplings(p)?;
    let mut notes = Vec::new();

    let sys6 = build_drift_mof(&cs, p, noise)?;
    let traj6 = evolve_covariance(&sys6, &sc.initial_state_6()?, &times, method)?;
    let e_n_mof = traj6.entanglement_trace(ModePair::MF, hbar, false)?.e_n;

    let e_n_adiabatic = match adiabatic_idf_elimination(&cs, p, noise) {
        Ok(sys4) => {
            let traj = evolve_covariance(&sys4, &sc.initial_state_4(cs.mho_prime)?, &times, method)?;
            Some(traj.entanglement_trace(ModePair::MF, hbar, false)?.e_n)
        }
        Err(e) => {
            notes.push(format!("adiabatic reduction unavailable: {e}"));
            None
        }
    };

    let sys_bc = build_drift_bc(p, noise)?;
    let traj_bc = evolve_covariance(&sys_bc, &sc.initial_state_4(p.mho)?, &times, method)?;
    let e_n_bc = traj_bc.entanglement_trace(ModePair::MF, hbar, false)?.e_n;

    if p.gamma_i == 0.0 && p.gamma_f == 0.0 {
        notes.push(format!(
            "idf-mediated regime (gamma_i = gamma_f = 0): entanglement time scale set by |alpha_OF| = {:.6e}",
            cs.alpha_of.norm()
        ));
    }

    let max_dev_mof_bc = max_abs_dev(&e_n_mof, &e_n_bc);
    let max_dev_adiabatic_bc = e_n_adiabatic.as_ref().map(|a| max_abs_dev(a, &e_n_bc));
    let max_e_n_bc = e_n_bc.iter().copied().fold(0.0, f64::max);
    Ok(ComparisonReport {
        times,
        e_n_mof,
        e_n_adiabatic,
        e_n_bc,
        max_dev_mof_bc,
        max_dev_adiabatic_bc,
        max_e_n_bc,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Computed result of one experiment, before emission.
#[derive(Debug, Clone)]
pub enum ResultSet {
    Spectrum(SpectrumTable),
    Couplings(CouplingsReport),
    Evolve(EvolveResult),
    Sweep(SurfaceTable),
    Compare(ComparisonReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub runtime_s: f64,
    pub outputs: Vec<PathBuf>,
    pub scalars: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

fn csv_to_json_table(csv: &str) -> serde_json::Value {
    let mut lines = csv.lines();
    let columns: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let rows: Vec<Vec<serde_json::Value>> = lines
        .map(|l| {
            l.split(',')
                .map(|cell| match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => json!(v),
                    _ => json!(cell),
                })
                .collect()
        })
        .collect();
    json!({ "columns": columns, "rows": rows })
}

fn write_table(
    outdir: &Path,
    name: &str,
    csv: String,
    format: OutputFormat,
    outputs: &mut Vec<PathBuf>,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let path = outdir.join(format!("{name}.csv"));
            fs::write(&path, csv)?;
            outputs.push(path);
        }
        OutputFormat::Json => {
            let path = outdir.join(format!("{name}.json"));
            fs::write(&path, serde_json::to_string_pretty(&csv_to_json_table(&csv))?)?;
            outputs.push(path);
        }
    }
    Ok(())
}

/// Write SVG plots for a computed result. Results with fewer than two points
/// produce no file, only a warning.
pub fn emit_plots(
    result: &ResultSet,
    outdir: &Path,
    outputs: &mut Vec<PathBuf>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    match result {
        ResultSet::Spectrum(table) => {
            if table.rows.len() < 2 {
                warnings.push("spectrum too short to plot".into());
                return Ok(());
            }
            let xs: Vec<f64> = table.rows.iter().map(|r| r.omega).collect();
            let refl: Vec<f64> = table.rows.iter().map(|r| r.reflectance).collect();
            let trans: Vec<f64> = table.rows.iter().map(|r| r.transmittance).collect();
            let svg = line_plot_svg(
                "Mirror response",
                "omega",
                "intensity",
                &[
                    Series { label: "reflectance", xs: &xs, ys: &refl },
                    Series { label: "transmittance", xs: &xs, ys: &trans },
                ],
            );
            let path = outdir.join("spectrum.svg");
            fs::write(&path, svg)?;
            outputs.push(path);
        }
        ResultSet::Evolve(res) => {
            if res.trace.times.len() < 2 {
                warnings.push("trajectory too short to plot".into());
                return Ok(());
            }
            let svg = line_plot_svg(
                "Mirror-field logarithmic negativity",
                "t",
                "E_N",
                &[Series { label: "E_N", xs: &res.trace.times, ys: &res.trace.e_n }],
            );
            let path = outdir.join("evolve.svg");
            fs::write(&path, svg)?;
            outputs.push(path);
        }
        ResultSet::Sweep(table) => {
            if table.deltas_over_mho.len() < 2 || table.times.len() < 2 {
                warnings.push("sweep surface too small to plot".into());
                return Ok(());
            }
            let svg = heatmap_svg(
                "E_N over detuning and time",
                "delta/mho",
                "t",
                &table.deltas_over_mho,
                &table.times,
                &table.e_n,
            );
            let path = outdir.join("sweep.svg");
            fs::write(&path, svg)?;
            outputs.push(path);
        }
        ResultSet::Compare(rep) => {
            if rep.times.len() < 2 {
                warnings.push("comparison too short to plot".into());
                return Ok(());
            }
            let mut series = vec![
                Series { label: "full model", xs: &rep.times, ys: &rep.e_n_mof },
                Series { label: "boundary condition", xs: &rep.times, ys: &rep.e_n_bc },
            ];
            if let Some(adiab) = &rep.e_n_adiabatic {
                series.push(Series { label: "adiabatic idf", xs: &rep.times, ys: adiab });
            }
            let svg = line_plot_svg("Mirror-field entanglement", "t", "E_N", &series);
            let path = outdir.join("compare_bc.svg");
            fs::write(&path, svg)?;
            outputs.push(path);
        }
        ResultSet::Couplings(_) => {
            warnings.push("couplings output has no plot".into());
        }
    }
    Ok(())
}

/// Compute a scenario without touching the filesystem.
pub fn compute(sc: &Scenario) -> Result<ResultSet> {
    sc.validate()?;
    Ok(match sc.experiment {
        Experiment::Spectrum => ResultSet::Spectrum(run_spectrum(sc)?),
        Experiment::Couplings => ResultSet::Couplings(run_couplings(sc)?),
        Experiment::Evolve => ResultSet::Evolve(run_evolve(sc)?),
        Experiment::Sweep => ResultSet::Sweep(sweep_surface(sc)?),
        Experiment::CompareBc => ResultSet::Compare(compare_mof_bc(sc)?),
    })
}

/// Execute a scenario and write its outputs. Nothing is written until the
/// whole computation has succeeded, so failures leave no partial output.
pub fn run_scenario(
    sc: &Scenario,
    outdir: &Path,
    format: OutputFormat,
    plots: bool,
) -> Result<RunSummary> {
    let start = Instant::now();
    let mut warnings = Vec::new();

    let regime = validate_regime(&sc.params)?;
    if !regime.sub_wavelength_ok {
        warnings.push(format!(
            "sub-wavelength drive bound margin is only {:.3e}",
            regime.sub_wavelength_margin
        ));
    }
    if !regime.timescale_ok {
        warnings.push(format!(
            "idf/mirror time-scale separation is only {:.3e}",
            regime.timescale_separation
        ));
    }
    if !regime.rwa_ok {
        warnings.push(format!("detuning ratio {:.3e} strains the RWA", regime.rwa_ratio));
    }
    if regime.strong_coupling {
        warnings.push(format!(
            "strong coupling: omega_p/omega_idf = {:.3e}",
            regime.coupling_ratio
        ));
    }
    for (field, note) in &sc.provenance {
        warnings.push(format!("provenance[{field}]: {note}"));
    }

    let result = compute(sc)?;

    fs::create_dir_all(outdir)?;
    let mut outputs = Vec::new();
    let mut scalars = BTreeMap::new();
    match &result {
        ResultSet::Spectrum(table) => {
            write_table(outdir, "spectrum", table.to_csv(), format, &mut outputs)?;
            let peak = table.rows.iter().map(|r| r.reflectance).fold(0.0f64, f64::max);
            scalars.insert("max_reflectance".into(), peak);
        }
        ResultSet::Couplings(rep) => {
            let path = outdir.join("couplings.json");
            fs::write(&path, serde_json::to_string_pretty(&rep.to_json())?)?;
            outputs.push(path);
            scalars.insert("abs_alpha_OF".into(), rep.set.alpha_of.norm());
            scalars.insert("abs_alpha_OM".into(), rep.set.alpha_om.norm());
            scalars.insert("abs_alpha_MF".into(), rep.set.alpha_mf.norm());
            scalars.insert("abs_beta_MF".into(), rep.set.beta_mf.norm());
            scalars.insert("mho_prime".into(), rep.set.mho_prime);
        }
        ResultSet::Evolve(res) => {
            write_table(outdir, "evolve", evolve_csv(res), format, &mut outputs)?;
            let max_en = res.trace.e_n.iter().copied().fold(0.0f64, f64::max);
            scalars.insert("max_E_N".into(), max_en);
        }
        ResultSet::Sweep(table) => {
            write_table(outdir, "sweep", table.to_csv(), format, &mut outputs)?;
            let peaks = table.peak_per_detuning();
            let (argmax, peak) = peaks
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| {
                    if v > acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
            scalars.insert("max_E_N".into(), peak);
            scalars.insert("argmax_delta_over_mho".into(), table.deltas_over_mho[argmax]);
        }
        ResultSet::Compare(rep) => {
            write_table(outdir, "compare_bc", rep.to_csv(), format, &mut outputs)?;
            let path = outdir.join("compare_bc_summary.json");
            fs::write(&path, serde_json::to_string_pretty(&rep.summary_json())?)?;
            outputs.push(path);
            scalars.insert("max_dev_mof_bc".into(), rep.max_dev_mof_bc);
            scalars.insert("max_E_N_bc".into(), rep.max_e_n_bc);
            warnings.extend(rep.notes.iter().cloned());
        }
    }
    if plots {
        emit_plots(&result, outdir, &mut outputs, &mut warnings)?;
    }

    Ok(RunSummary {
        experiment: sc.experiment.name().to_string(),
        runtime_s: start.elapsed().as_secs_f64(),
        outputs,
        scalars,
        warnings,
    })
}

/// Parse a scenario file and execute it.
pub fn run_file(
    path: &Path,
    outdir: &Path,
    format: OutputFormat,
    plots: bool,
) -> Result<RunSummary> {
    let sc = Scenario::from_path(path)?;
    run_scenario(&sc, outdir, format, plots)
}

/// Cap the sweep worker pool (the `MOFSIM_THREADS` environment variable in
/// the CLI). Must be called before the first parallel region; later calls
/// are ignored. No-op without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn set_worker_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn set_worker_threads(_n: usize) {}

#[allow(unused)]
fn _kind(_: CouplingKind) {}
#[allow(unused)]
fn _derive_probe(p: &ModelParams) -> Result<f64> {
    Ok(derive(p)?.mho_prime)
}
