use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_state, tangent_vectors, AnsatzSpec};
use crate::ed::{ground_state_ed, imaginary_time_reference, DenseState, Generator};
use crate::error::{Error, Result};
use crate::lattice::{MeasurementSpec, ModelSpec};

/// Smallest eigenvalue of `A` (relative to its largest) treated as singular when ε = 0.
pub const SINGULAR_TOL: f64 = 1e-12;
const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqaRunConfig {
    pub total_tau: f64,
    #[serde(default = "default_step")]
    pub step_size: f64,
    #[serde(default = "default_regularization")]
    pub regularization: f64,
    #[serde(default)]
    pub integrator: Integrator,
    /// Track the fidelity against exact imaginary-time evolution at each step.
    #[serde(default = "default_oracle")]
    pub oracle: bool,
}

fn default_step() -> f64 {
    0.01
}

fn default_regularization() -> f64 {
    1e-6
}

fn default_oracle() -> bool {
    true
}

impl VqaRunConfig {
    pub fn new(total_tau: f64) -> Self {
        VqaRunConfig {
            total_tau,
            step_size: default_step(),
            regularization: default_regularization(),
            integrator: Integrator::default(),
            oracle: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidSpec(format!("step size {} must be > 0", self.step_size)));
        }
        if !(self.regularization >= 0.0) {
            return Err(Error::InvalidSpec(format!("regularization {} must be >= 0", self.regularization)));
        }
        if !(self.total_tau >= 0.0) || !self.total_tau.is_finite() {
            return Err(Error::InvalidSpec(format!("total tau {} must be >= 0", self.total_tau)));
        }
        Ok(())
    }
}

/// The linear system `A θ̇ = C` at one point of parameter space.
#[derive(Debug, Clone)]
pub struct McLachlanSystem {
    pub a: DMatrix<f64>,
    pub c: DVector<f64>,
    pub min_eig: f64,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl McLachlanSystem {
    pub fn norm_c(&self) -> f64 {
        self.c.amax()
    }

    /// `(A + εI)⁻¹ C` through the eigendecomposition of `A`.
    pub fn solve(&self, regularization: f64) -> Result<DVector<f64>> {
        let scale = self.eig.eigenvalues.amax().max(1.0);
        if regularization == 0.0 && self.min_eig <= SINGULAR_TOL * scale {
            return Err(Error::LinearSolve { min_eig: self.min_eig });
        }
        let v = &self.eig.eigenvectors;
        let mut coeffs = v.transpose() * &self.c;
        for (x, l) in coeffs.iter_mut().zip(self.eig.eigenvalues.iter()) {
            *x /= l.max(0.0) + regularization;
        }
        Ok(v * coeffs)
    }
}

/// Assemble `A_ab = Re⟨∂_a ψ|∂_b ψ⟩` and `C_a = -Re⟨∂_a ψ|H|ψ⟩`.
pub fn mclachlan_system(spec: &AnsatzSpec, theta: &[f64], base: &DenseState, h: &Generator) -> Result<McLachlanSystem> {
    let (a, c) = assemble(spec, theta, base, h)?;
    let eig = SymmetricEigen::new(a.clone());
    let min_eig = eig.eigenvalues.min();
    if min_eig < -PSD_SLACK {
        return Err(Error::Numerical(format!("McLachlan metric has eigenvalue {min_eig:.3e} < 0")));
    }
    Ok(McLachlanSystem { a, c, min_eig, eig })
}

/// `θ̇` at `theta`; a Cholesky solve of `A + εI` when ε > 0.
fn rate(spec: &AnsatzSpec, theta: &[f64], base: &DenseState, h: &Generator, eps: f64) -> Result<DVector<f64>> {
    if eps > 0.0 {
        let (a, c) = assemble(spec, theta, base, h)?;
        let n = a.nrows();
        if let Some(chol) = (a + DMatrix::identity(n, n) * eps).cholesky() {
            return Ok(chol.solve(&c));
        }
    }
    mclachlan_system(spec, theta, base, h)?.solve(eps)
}

fn assemble(spec: &AnsatzSpec, theta: &[f64], base: &DenseState, h: &Generator) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let psi = ansatz_state(spec, theta, base)?;
    if h.dim() != psi.amplitudes().len() {
        return Err(Error::SizeMismatch { expected: psi.amplitudes().len(), got: h.dim() });
    }
    let tangents = tangent_vectors(spec, theta, base)?;
    let hpsi = h.apply(psi.amplitudes());
    let p = tangents.len();
    let mut a = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let x = tangents[i].dotc(&tangents[j]).re;
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    let c = DVector::from_iterator(p, tangents.iter().map(|t| -t.dotc(&hpsi).re));
    Ok((a, c))
}

/// Diagnostics of one integration step, evaluated at its starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub norm_c: f64,
    pub min_eig_a: f64,
}

/// Advance `theta` by one integrator step of size `dtau`.
pub fn mclachlan_step(
    spec: &AnsatzSpec,
    theta: &[f64],
    base: &DenseState,
    h: &Generator,
    config: &VqaRunConfig,
) -> Result<(Vec<f64>, StepDiagnostics)> {
    config.validate()?;
    step_by(spec, theta, base, h, config, config.step_size)
}

fn step_by(
    spec: &AnsatzSpec,
    theta: &[f64],
    base: &DenseState,
    h: &Generator,
    config: &VqaRunConfig,
    dt: f64,
) -> Result<(Vec<f64>, StepDiagnostics)> {
    let eps = config.regularization;
    let rate = |t: &[f64]| rate(spec, t, base, h, eps);
    let offset = |k: &DVector<f64>, f: f64| -> Vec<f64> { theta.iter().zip(k.iter()).map(|(t, d)| t + f * d).collect() };

    let first = mclachlan_system(spec, theta, base, h)?;
    let diag = StepDiagnostics { norm_c: first.norm_c(), min_eig_a: first.min_eig };
    let k1 = first.solve(eps)?;
    let next = match config.integrator {
        Integrator::Euler => offset(&k1, dt),
        Integrator::Rk4 => {
            let k2 = rate(&offset(&k1, dt / 2.0))?;
            let k3 = rate(&offset(&k2, dt / 2.0))?;
            let k4 = rate(&offset(&k3, dt))?;
            let k = (k1 + k2 * 2.0 + k3 * 2.0 + k4) / 6.0;
            offset(&k, dt)
        }
    };
    Ok((next, diag))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub tau: f64,
    pub norm_c: f64,
    pub min_eig_a: f64,
    /// `NaN` when the oracle is disabled.
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct VqaRun {
    pub state: DenseState,
    pub theta: Vec<f64>,
    pub log: Vec<TrajectoryRow>,
}

impl VqaRun {
    pub fn final_fidelity(&self) -> f64 {
        self.log.last().map_or(f64::NAN, |r| r.fidelity)
    }

    /// Trajectory as CSV with header `step,tau,norm_C,min_eig_A,fidelity_or_nan`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("step,tau,norm_C,min_eig_A,fidelity_or_nan\n");
        for r in &self.log {
            let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e},{:.12e}", r.step, r.tau, r.norm_c, r.min_eig_a, r.fidelity);
        }
        out
    }
}

/// Variational imaginary-time evolution of the ground state of `model` under the
/// density measurement `meas`, whose strength must equal `config.total_tau`.
pub fn run_vqa(model: &ModelSpec, meas: &MeasurementSpec, spec: &AnsatzSpec, config: &VqaRunConfig) -> Result<VqaRun> {
    config.validate()?;
    spec.validate()?;
    if !meas.kind.is_density() {
        return Err(Error::InvalidSpec(format!("VQA evolution needs a density measurement, got {:?}", meas.kind)));
    }
    if (meas.strength - config.total_tau).abs() > 1e-12 {
        return Err(Error::InvalidSpec(format!(
            "measurement strength {} differs from total imaginary time {}",
            meas.strength, config.total_tau
        )));
    }
    if model.n_sites != spec.n_qubits {
        return Err(Error::SizeMismatch { expected: spec.n_qubits, got: model.n_sites });
    }
    meas.validate(model.n_sites)?;
    let (base, _) = ground_state_ed(model)?;
    let h = Generator::for_density_measurement(meas, model.n_sites)?;

    let n_steps = (config.total_tau / config.step_size - 1e-9).ceil().max(0.0) as usize;
    let mut theta = spec.seeded_theta();
    let mut tau = 0.0;
    let mut log = Vec::with_capacity(n_steps + 1);
    let fidelity = |theta: &[f64], tau: f64| -> Result<f64> {
        if !config.oracle {
            return Ok(f64::NAN);
        }
        let exact = imaginary_time_reference(&base, &h, tau)?;
        Ok(ansatz_state(spec, theta, &base)?.fidelity(&exact))
    };
    for step in 0..n_steps {
        let dt = (config.total_tau - tau).min(config.step_size);
        let f = fidelity(&theta, tau)?;
        let (next, diag) = step_by(spec, &theta, &base, &h, config, dt)?;
        log.push(TrajectoryRow { step, tau, norm_c: diag.norm_c, min_eig_a: diag.min_eig_a, fidelity: f });
        theta = next;
        tau = if step + 1 == n_steps { config.total_tau } else { tau + dt };
    }
    let last = mclachlan_system(spec, &theta, &base, &h)?;
    log.push(TrajectoryRow {
        step: n_steps,
        tau,
        norm_c: last.norm_c(),
        min_eig_a: last.min_eig,
        fidelity: fidelity(&theta, tau)?,
    });
    let state = ansatz_state(spec, &theta, &base)?;
    Ok(VqaRun { state, theta, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    fn ground(l: usize) -> (ModelSpec, DenseState) {
        let m = ModelSpec::new(l, Boundary::Open, 0.0).unwrap();
        let (g, _) = ground_state_ed(&m).unwrap();
        (m, g)
    }

    #[test]
    fn stall_without_seed() {
        let (_, g) = ground(6);
        let spec = AnsatzSpec::new(6, 1).unwrap();
        let h = Generator::for_density_measurement(&MeasurementSpec::staggered(1.0), 6).unwrap();
        let zero = mclachlan_system(&spec, &vec![0.0; spec.n_params()], &g, &h).unwrap();
        assert!(zero.norm_c() < 1e-10);
        let seeded = mclachlan_system(&spec, &spec.seeded_theta(), &g, &h).unwrap();
        assert!(seeded.norm_c() > 1e-3);
        assert!((&seeded.a - seeded.a.transpose()).amax() < 1e-10);
    }

    #[test]
    fn singular_metric_without_regularization() {
        let (_, g) = ground(4);
        let spec = AnsatzSpec::new(4, 1).unwrap();
        let h = Generator::for_density_measurement(&MeasurementSpec::staggered(1.0), 4).unwrap();
        let sys = mclachlan_system(&spec, &spec.seeded_theta(), &g, &h).unwrap();
        assert!(matches!(sys.solve(0.0), Err(Error::LinearSolve { .. })));
        assert!(sys.solve(1e-6).is_ok());
    }

    #[test]
    fn zero_strength_run() {
        let (m, g) = ground(4);
        let spec = AnsatzSpec::new(4, 1).unwrap();
        let run = run_vqa(&m, &MeasurementSpec::staggered(0.0), &spec, &VqaRunConfig::new(0.0)).unwrap();
        assert_eq!(run.log.len(), 1);
        assert!((run.final_fidelity() - 1.0).abs() < 1e-12);
        assert!((run.state.fidelity(&g) - 1.0).abs() < 1e-12);
        assert!(run.trajectory_csv().starts_with("step,tau,norm_C,min_eig_A,fidelity_or_nan\n"));
    }

    #[test]
    fn rejects_bad_inputs() {
        let (m, _) = ground(4);
        let spec = AnsatzSpec::new(4, 1).unwrap();
        let cfg = VqaRunConfig::new(0.2);
        assert!(run_vqa(&m, &MeasurementSpec::staggered(0.3), &spec, &cfg).is_err());
        let bond = MeasurementSpec::new(crate::lattice::MeasurementKind::BondXx, 0.2);
        assert!(run_vqa(&m, &bond, &spec, &cfg).is_err());
        let bad = VqaRunConfig { step_size: 0.0, ..cfg };
        assert!(bad.validate().is_err());
    }
}
