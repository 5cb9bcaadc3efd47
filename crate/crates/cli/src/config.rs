use std::path::PathBuf;

use mipt_core::ed::{MAX_FULL_SITES, MAX_SECTOR_SITES};
use mipt_core::lattice::{Filling, MeasurementSpec, ModelSpec};
use mipt_core::vqa::{Integrator, VqaRunConfig, MAX_QUBITS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    CeffScan,
    EeScan,
    MutualInfo,
    Collapse,
    VqaRun,
    ProtocolProb,
    OracleCheck,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::CeffScan => "ceff_scan",
            Experiment::EeScan => "ee_scan",
            Experiment::MutualInfo => "mutual_info",
            Experiment::Collapse => "collapse",
            Experiment::VqaRun => "vqa_run",
            Experiment::ProtocolProb => "protocol_prob",
            Experiment::OracleCheck => "oracle_check",
        }
    }

    fn engines(&self) -> &'static [Engine] {
        match self {
            Experiment::CeffScan | Experiment::MutualInfo => &[Engine::Gaussian, Engine::Ed],
            Experiment::EeScan => &[Engine::Gaussian, Engine::Ed, Engine::Vqa],
            Experiment::Collapse => &[Engine::Ed],
            Experiment::VqaRun => &[Engine::Vqa],
            Experiment::ProtocolProb | Experiment::OracleCheck => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Gaussian,
    Ed,
    Vqa,
}

/// Explicit parameter grids. An empty grid falls back to the single value in
/// `model` / `measurement`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub strengths: Vec<f64>,
    #[serde(default)]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    /// Smallest `L` entering log-law fits.
    #[serde(default = "default_fit_min_size")]
    pub fit_min_size: usize,
    /// Largest `L / L_tot` entering the mutual-information fit.
    #[serde(default = "default_ratio_max")]
    pub ratio_max: f64,
    /// Smallest subsystem length entering the mutual-information fit.
    #[serde(default = "default_mi_min_size")]
    pub mi_min_size: usize,
    #[serde(default)]
    pub delta_c: f64,
    /// `ν` of the power-law collapse compared against the logarithmic one.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Replace a ring boundary by the closed-shell choice for each size
    /// (periodic for `L ≡ 2 mod 4`, antiperiodic otherwise).
    #[serde(default)]
    pub spin_periodic_rings: bool,
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
    /// Also fit and report theory overlays where available.
    #[serde(default = "default_true")]
    pub fits: bool,
}

fn default_fit_min_size() -> usize {
    32
}
fn default_ratio_max() -> f64 {
    0.05
}
fn default_mi_min_size() -> usize {
    4
}
fn default_nu() -> f64 {
    1.0
}
fn default_oracle_tol() -> f64 {
    1e-8
}
fn default_true() -> bool {
    true
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis {
            fit_min_size: default_fit_min_size(),
            ratio_max: default_ratio_max(),
            mi_min_size: default_mi_min_size(),
            delta_c: 0.0,
            nu: default_nu(),
            spin_periodic_rings: false,
            oracle_tol: default_oracle_tol(),
            fits: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqaSettings {
    pub n_layers: usize,
    #[serde(default = "default_step")]
    pub step_size: f64,
    #[serde(default = "default_regularization")]
    pub regularization: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_true")]
    pub oracle: bool,
}

fn default_step() -> f64 {
    VqaRunConfig::new(0.0).step_size
}
fn default_regularization() -> f64 {
    VqaRunConfig::new(0.0).regularization
}

impl VqaSettings {
    pub fn run_config(&self, total_tau: f64) -> VqaRunConfig {
        VqaRunConfig {
            total_tau,
            step_size: self.step_size,
            regularization: self.regularization,
            integrator: self.integrator,
            oracle: self.oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSettings {
    pub filling: Filling,
    /// Period pattern scaled by each strength in the `W` grid.
    pub pattern: Vec<f64>,
    pub chain_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub engine: Option<Engine>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub measurement: Option<MeasurementSpec>,
    #[serde(default)]
    pub grids: Grids,
    /// Output directory; defaults to `$MIPT_OUTPUT_DIR`, then `mipt-output`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub vqa: Option<VqaSettings>,
    #[serde(default)]
    pub protocol: Option<ProtocolSettings>,
}

impl ExperimentConfig {
    pub fn sizes(&self) -> Vec<usize> {
        match (&self.grids.sizes, &self.model) {
            (s, _) if !s.is_empty() => s.clone(),
            (_, Some(m)) => vec![m.n_sites],
            _ => Vec::new(),
        }
    }

    pub fn strengths(&self) -> Vec<f64> {
        match (&self.grids.strengths, &self.measurement) {
            (s, _) if !s.is_empty() => s.clone(),
            (_, Some(m)) => vec![m.strength],
            _ => Vec::new(),
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        match (&self.grids.deltas, &self.model) {
            (d, _) if !d.is_empty() => d.clone(),
            (_, Some(m)) => vec![m.delta],
            _ => Vec::new(),
        }
    }

    /// Model at one grid point.
    pub fn model_at(&self, n_sites: usize, delta: f64) -> ModelSpec {
        let mut m = self.model.expect("validated");
        m.n_sites = n_sites;
        m.delta = delta;
        if self.analysis.spin_periodic_rings && m.boundary.is_ring() {
            m.boundary = mipt_core::lattice::Boundary::spin_periodic(n_sites);
        }
        m
    }

    pub fn measurement_at(&self, strength: f64) -> MeasurementSpec {
        self.measurement.as_ref().expect("validated").with_strength(strength)
    }

    /// Every problem with the configuration, empty when it is runnable.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let exp = self.experiment;
        let allowed = exp.engines();
        match (self.engine, allowed.is_empty()) {
            (Some(e), true) => errs.push(format!("{} does not take an engine (got {e:?})", exp.name())),
            (None, false) => errs.push(format!("{} needs an engine: one of {allowed:?}", exp.name())),
            (Some(e), false) if !allowed.contains(&e) => {
                errs.push(format!("engine {e:?} cannot run {}; allowed: {allowed:?}", exp.name()))
            }
            _ => {}
        }

        if exp == Experiment::ProtocolProb {
            match &self.protocol {
                None => errs.push("protocol_prob needs a `protocol` block".into()),
                Some(p) => {
                    if let Err(e) = mipt_core::lattice::ProtocolSpec::new(p.filling, p.pattern.clone(), p.chain_length) {
                        errs.push(e.to_string());
                    }
                }
            }
            if self.strengths().is_empty() {
                errs.push("protocol_prob needs a non-empty `grids.strengths`".into());
            }
            check_strengths(&self.strengths(), &mut errs);
            return errs;
        }

        let Some(model) = self.model else {
            errs.push(format!("{} needs a `model`", exp.name()));
            return errs;
        };
        if exp != Experiment::OracleCheck && self.measurement.is_none() {
            errs.push(format!("{} needs a `measurement`", exp.name()));
        }
        let (sizes, strengths, deltas) = (self.sizes(), self.strengths(), self.deltas());
        check_strengths(&strengths, &mut errs);
        if exp == Experiment::OracleCheck && self.grids.strengths.is_empty() {
            errs.push("oracle_check needs a non-empty `grids.strengths`".into());
        }
        if deltas.iter().any(|d| !(d.abs() < 1.0)) {
            errs.push("every delta must satisfy |delta| < 1".into());
        }

        // sizes of the chains actually built
        let chains: Vec<usize> = if exp == Experiment::MutualInfo { vec![model.n_sites] } else { sizes.clone() };
        for &l in &chains {
            for &d in &deltas {
                if let Err(e) = self.model_at(l, d).validate() {
                    errs.push(format!("L = {l}, delta = {d}: {e}"));
                }
            }
            if let Some(meas) = &self.measurement {
                if let Err(e) = meas.validate(l) {
                    errs.push(format!("L = {l}: {e}"));
                }
            }
        }

        match exp {
            Experiment::CeffScan => {
                let fitted = sizes.iter().filter(|&&l| l >= self.analysis.fit_min_size).count();
                if self.analysis.fits && fitted < 3 {
                    errs.push(format!(
                        "ceff_scan fit needs at least 3 sizes >= fit_min_size = {}, got {fitted}",
                        self.analysis.fit_min_size
                    ));
                }
            }
            Experiment::MutualInfo => {
                if self.grids.sizes.is_empty() {
                    errs.push("mutual_info needs `grids.sizes` (subsystem lengths)".into());
                }
                if let Some(&l) = sizes.iter().find(|&&l| l == 0 || 2 * l > model.n_sites) {
                    errs.push(format!("subsystem length {l} must lie in [1, L_tot/2] with L_tot = {}", model.n_sites));
                }
                if !(self.analysis.ratio_max > 0.0 && self.analysis.ratio_max <= mipt_core::analysis::MI_MAX_RATIO) {
                    errs.push(format!(
                        "ratio_max must lie in (0, {}]",
                        mipt_core::analysis::MI_MAX_RATIO
                    ));
                }
            }
            Experiment::Collapse => {
                if sizes.len() < 3 || deltas.len() < 2 {
                    errs.push("collapse needs at least 3 sizes and 2 deltas".into());
                }
                if !(self.analysis.nu > 0.0) {
                    errs.push("analysis.nu must be > 0".into());
                }
            }
            Experiment::OracleCheck => {
                if let Some(&l) = sizes.iter().find(|&&l| l > 12) {
                    errs.push(format!("oracle_check is limited to L <= 12, got {l}"));
                }
                if deltas.iter().any(|&d| d != 0.0) {
                    errs.push("oracle_check compares against the free-fermion engine and needs delta = 0".into());
                }
            }
            _ => {}
        }

        match self.engine {
            Some(Engine::Gaussian) => {
                if deltas.iter().any(|&d| d != 0.0) {
                    errs.push("the gaussian engine needs delta = 0 (interactions are not quadratic)".into());
                }
            }
            Some(Engine::Ed) => {
                let conserving = self.measurement.as_ref().is_none_or(|m| m.kind.conserves_number());
                let limit = if conserving { MAX_SECTOR_SITES } else { MAX_FULL_SITES };
                if let Some(&l) = chains.iter().find(|&&l| l > limit) {
                    errs.push(if conserving {
                        format!("ED sector size limit is {limit} sites, got {l}")
                    } else {
                        format!(
                            "bond_xx breaks particle number, so ED cannot stay in a number sector; full-space limit is {limit} sites, got {l}"
                        )
                    });
                }
            }
            Some(Engine::Vqa) => {
                match &self.vqa {
                    None => errs.push("the vqa engine needs a `vqa` block".into()),
                    Some(v) => {
                        if v.n_layers == 0 {
                            errs.push("vqa.n_layers must be >= 1".into());
                        }
                        if let Err(e) = v.run_config(0.0).validate() {
                            errs.push(e.to_string());
                        }
                    }
                }
                if let Some(m) = &self.measurement {
                    if !m.kind.is_density() {
                        errs.push(format!("the vqa engine only evolves density measurements, got {:?}", m.kind));
                    }
                }
                if let Some(&l) = sizes.iter().find(|&&l| !(2..=MAX_QUBITS).contains(&l)) {
                    errs.push(format!("vqa needs 2 <= L <= {MAX_QUBITS}, got {l}"));
                }
            }
            None => {}
        }
        errs
    }
}

fn check_strengths(strengths: &[f64], errs: &mut Vec<String>) {
    if strengths.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        errs.push("every strength W must be finite and >= 0".into());
    }
}
