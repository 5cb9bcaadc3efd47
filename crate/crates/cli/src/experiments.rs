use mipt_core::analysis::{
    data_collapse, fit_log_law, fit_mutual_information, series, theory_mutual_information, window, CollapseCurve,
    Scaling,
};
use mipt_core::ed::{apply_measurement_ed, ee_ed, ee_spin, ground_state_ed, DenseState};
use mipt_core::gaussian::{apply_measurement, entanglement_entropy, ground_state_quadratic, mutual_information, GaussianState};
use mipt_core::lattice::{
    c_eff_theory, success_probability, MeasurementKind, MeasurementSpec, ModelSpec, ProtocolSpec,
};
use mipt_core::vqa::{run_vqa, AnsatzSpec};
use mipt_core::{Error, Region, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Engine, Experiment, ExperimentConfig};
use crate::table::{Cell, Table};

const ENTROPY_UNITS: &str = "S and I in nats; L, L_tot and ell in sites; W and delta dimensionless";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub point: String,
    pub error: String,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub errors: Vec<PointError>,
}

impl Outcome {
    fn record<T>(&mut self, point: impl Into<String>, r: &Result<T>) {
        if let Err(e) = r {
            self.errors.push(PointError { point: point.into(), error: e.to_string() });
        }
    }
}

/// A measured state from any engine.
enum Prepared {
    Gaussian(GaussianState),
    Ed(DenseState),
    /// Qubit register of the variational circuit, with its final fidelity.
    Vqa(DenseState, f64),
}

impl Prepared {
    fn entropy(&self, region: &Region) -> Result<f64> {
        match self {
            Prepared::Gaussian(s) => entanglement_entropy(s, region),
            Prepared::Ed(s) => ee_ed(s, region),
            Prepared::Vqa(s, _) => ee_spin(s, region),
        }
    }

    fn mutual_information(&self, a: &Region, b: &Region) -> Result<f64> {
        match self {
            Prepared::Gaussian(s) => mutual_information(s, a, b),
            _ => Ok(self.entropy(a)? + self.entropy(b)? - self.entropy(&a.disjoint_union(b)?)?),
        }
    }

    fn fidelity(&self) -> f64 {
        match self {
            Prepared::Vqa(_, f) => *f,
            _ => f64::NAN,
        }
    }
}

fn prepare(cfg: &ExperimentConfig, model: &ModelSpec, meas: &MeasurementSpec) -> Result<Prepared> {
    match cfg.engine.expect("validated") {
        Engine::Gaussian => {
            let (g, _) = ground_state_quadratic(model)?;
            Ok(Prepared::Gaussian(apply_measurement(&GaussianState::Slater(g), meas, model)?))
        }
        Engine::Ed => {
            let (g, _) = ground_state_ed(model)?;
            Ok(Prepared::Ed(apply_measurement_ed(&g, meas, model)?))
        }
        Engine::Vqa => {
            let settings = cfg.vqa.as_ref().expect("validated");
            let spec = AnsatzSpec::new(model.n_sites, settings.n_layers)?;
            let run = run_vqa(model, meas, &spec, &settings.run_config(meas.strength))?;
            let fid = run.final_fidelity();
            Ok(Prepared::Vqa(run.state, fid))
        }
    }
}

fn half(l: usize) -> Region {
    Region::interval(0, l / 2)
}

fn theory_if_free(delta: f64, w: f64) -> f64 {
    if delta == 0.0 {
        c_eff_theory(w).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    }
}

fn kind_name(kind: MeasurementKind) -> String {
    serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Run every grid point of the configured experiment in the current rayon pool.
pub fn execute(cfg: &ExperimentConfig) -> Outcome {
    match cfg.experiment {
        Experiment::CeffScan => ceff_scan(cfg),
        Experiment::EeScan => ee_scan(cfg),
        Experiment::MutualInfo => mutual_info(cfg),
        Experiment::Collapse => collapse(cfg),
        Experiment::VqaRun => vqa_run(cfg),
        Experiment::ProtocolProb => protocol_prob(cfg),
        Experiment::OracleCheck => oracle_check(cfg),
    }
}

fn grid3(cfg: &ExperimentConfig) -> Vec<(f64, f64, usize)> {
    let mut pts = Vec::new();
    for d in cfg.deltas() {
        for w in cfg.strengths() {
            for l in cfg.sizes() {
                pts.push((d, w, l));
            }
        }
    }
    pts
}

fn label(d: f64, w: f64, l: usize) -> String {
    format!("delta={d}, W={w}, L={l}")
}

fn half_chain_entropies(cfg: &ExperimentConfig, pts: &[(f64, f64, usize)]) -> Vec<Result<f64>> {
    pts.par_iter()
        .map(|&(d, w, l)| prepare(cfg, &cfg.model_at(l, d), &cfg.measurement_at(w))?.entropy(&half(l)))
        .collect()
}

fn ceff_scan(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let pts = grid3(cfg);
    let values = half_chain_entropies(cfg, &pts);
    let mut raw =
        Table::new("ceff_scan_points", ENTROPY_UNITS, &["delta", "W", "L", "S_half"]).plotted("L", "S_half", Some("W"));
    for (&(d, w, l), v) in pts.iter().zip(&values) {
        out.record(label(d, w, l), v);
        if let Ok(s) = v {
            raw.push(vec![d.into(), w.into(), l.into(), (*s).into()]);
        }
    }
    let mut fits = Table::new(
        "ceff_scan",
        "a and b in nats (b per unit ln L); c_eff dimensionless",
        &["delta", "W", "a", "b", "c_eff_fit", "c_eff_theory", "r_squared"],
    )
    .plotted("W", "c_eff_fit", Some("delta"));
    if cfg.analysis.fits {
        for d in cfg.deltas() {
            for w in cfg.strengths() {
                let data: Vec<(f64, f64)> = pts
                    .iter()
                    .zip(&values)
                    .filter(|((pd, pw, _), _)| *pd == d && *pw == w)
                    .filter_map(|((_, _, l), v)| v.as_ref().ok().map(|s| (*l as f64, *s)))
                    .collect();
                let fit = fit_log_law(&window(&series(data), cfg.analysis.fit_min_size as f64));
                out.record(format!("fit delta={d}, W={w}"), &fit);
                if let Ok(f) = fit {
                    fits.push(vec![
                        d.into(),
                        w.into(),
                        f.param("a").into(),
                        f.param("b").into(),
                        f.param("c_eff").into(),
                        theory_if_free(d, w).into(),
                        f.r_squared.into(),
                    ]);
                }
            }
        }
        out.tables.push(fits);
    }
    out.tables.push(raw);
    out
}

fn ee_scan(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let pts = grid3(cfg);
    let profiles: Vec<Result<(Vec<f64>, f64)>> = pts
        .par_iter()
        .map(|&(d, w, l)| {
            let p = prepare(cfg, &cfg.model_at(l, d), &cfg.measurement_at(w))?;
            let s = (1..l).map(|k| p.entropy(&Region::interval(0, k))).collect::<Result<Vec<_>>>()?;
            Ok((s, p.fidelity()))
        })
        .collect();
    let mut table = Table::new("ee_scan", ENTROPY_UNITS, &["delta", "W", "L", "ell", "S", "fidelity"])
        .plotted("ell", "S", Some("delta"));
    for (&(d, w, l), r) in pts.iter().zip(&profiles) {
        out.record(label(d, w, l), r);
        if let Ok((s, fid)) = r {
            for (k, v) in s.iter().enumerate() {
                table.push(vec![d.into(), w.into(), l.into(), (k + 1).into(), (*v).into(), (*fid).into()]);
            }
        }
    }
    out.tables.push(table);
    out
}

fn mutual_info(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let l_tot = cfg.model.expect("validated").n_sites;
    let lengths = cfg.sizes();
    let pts: Vec<(f64, f64)> = cfg.deltas().into_iter().flat_map(|d| cfg.strengths().into_iter().map(move |w| (d, w))).collect();
    let curves: Vec<Result<Vec<f64>>> = pts
        .par_iter()
        .map(|&(d, w)| {
            let p = prepare(cfg, &cfg.model_at(l_tot, d), &cfg.measurement_at(w))?;
            lengths
                .iter()
                .map(|&l| p.mutual_information(&Region::interval(0, l), &Region::interval(l_tot / 2, l)))
                .collect()
        })
        .collect();
    let mut table = Table::new("mutual_info", ENTROPY_UNITS, &["delta", "W", "L_tot", "L", "ratio", "I_AB", "I_theory"])
        .plotted("ratio", "I_AB", Some("W"));
    let mut fits = Table::new(
        "mutual_info_fit",
        "eta dimensionless; prefactor in nats; c_eff dimensionless",
        &["delta", "W", "eta", "prefactor", "c_eff_fit", "c_eff_theory", "r_squared"],
    );
    for (&(d, w), r) in pts.iter().zip(&curves) {
        out.record(format!("delta={d}, W={w}, L_tot={l_tot}"), r);
        let Ok(values) = r else { continue };
        let c_th = theory_if_free(d, w);
        let mut fit_data = Vec::new();
        for (&l, &mi) in lengths.iter().zip(values) {
            let ratio = l as f64 / l_tot as f64;
            let th = theory_mutual_information(c_th, ratio).unwrap_or(f64::NAN);
            table.push(vec![d.into(), w.into(), l_tot.into(), l.into(), ratio.into(), mi.into(), th.into()]);
            if ratio <= cfg.analysis.ratio_max && l >= cfg.analysis.mi_min_size {
                fit_data.push((ratio, mi));
            }
        }
        if cfg.analysis.fits {
            let fit = fit_mutual_information(&series(fit_data));
            out.record(format!("fit delta={d}, W={w}"), &fit);
            if let Ok(f) = fit {
                fits.push(vec![
                    d.into(),
                    w.into(),
                    f.param("eta").into(),
                    f.param("prefactor").into(),
                    f.param("c_eff").into(),
                    c_th.into(),
                    f.r_squared.into(),
                ]);
            }
        }
    }
    out.tables.push(table);
    if cfg.analysis.fits {
        out.tables.push(fits);
    }
    out
}

fn collapse(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let mut pts = Vec::new();
    for w in cfg.strengths() {
        for l in cfg.sizes() {
            for d in cfg.deltas() {
                pts.push((d, w, l));
            }
        }
    }
    let values = half_chain_entropies(cfg, &pts);
    let mut raw = Table::new("collapse_points", ENTROPY_UNITS, &["W", "L", "delta", "S_half"]).plotted("delta", "S_half", Some("L"));
    for (&(d, w, l), v) in pts.iter().zip(&values) {
        out.record(label(d, w, l), v);
        if let Ok(s) = v {
            raw.push(vec![w.into(), l.into(), d.into(), (*s).into()]);
        }
    }
    let mut table = Table::new(
        "collapse",
        "residual in nats^2 (mean across-curve variance, a proxy for collapse quality); overlap in rescaled units",
        &["W", "delta_c", "scaling", "nu", "residual", "overlap_lo", "overlap_hi"],
    );
    let (delta_c, nu) = (cfg.analysis.delta_c, cfg.analysis.nu);
    for w in cfg.strengths() {
        let curves: Vec<CollapseCurve> = cfg
            .sizes()
            .into_iter()
            .map(|l| CollapseCurve {
                size: l as f64,
                points: pts
                    .iter()
                    .zip(&values)
                    .filter(|((_, pw, pl), _)| *pw == w && *pl == l)
                    .filter_map(|((d, _, _), v)| v.as_ref().ok().map(|s| (*d, *s)))
                    .collect(),
            })
            .filter(|c| c.points.len() >= 2)
            .collect();
        for (name, scaling, nu_col) in
            [("log_L", Scaling::LogL, f64::NAN), ("power_L", Scaling::PowerL { nu }, nu)]
        {
            let r = data_collapse(&curves, delta_c, scaling);
            out.record(format!("collapse W={w}, {name}"), &r);
            if let Ok(c) = r {
                table.push(vec![
                    w.into(),
                    delta_c.into(),
                    name.into(),
                    nu_col.into(),
                    c.residual.into(),
                    c.overlap.0.into(),
                    c.overlap.1.into(),
                ]);
            }
        }
    }
    out.tables.push(table);
    out.tables.push(raw);
    out
}

fn vqa_run(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let settings = cfg.vqa.as_ref().expect("validated");
    let pts = grid3(cfg);
    let runs: Vec<Result<_>> = pts
        .par_iter()
        .map(|&(d, w, l)| {
            let model = cfg.model_at(l, d);
            let spec = AnsatzSpec::new(l, settings.n_layers)?;
            let run = run_vqa(&model, &cfg.measurement_at(w), &spec, &settings.run_config(w))?;
            let s = ee_spin(&run.state, &half(l))?;
            Ok((run, s, spec.n_params()))
        })
        .collect();
    let mut summary = Table::new(
        "vqa_run",
        "tau and W dimensionless (imaginary time in units of 1/t); S_half in nats; L in sites",
        &["delta", "W", "L", "n_layers", "n_params", "n_steps", "final_fidelity", "S_half", "trajectory"],
    );
    for (k, (&(d, w, l), r)) in pts.iter().zip(runs).enumerate() {
        out.record(label(d, w, l), &r);
        let Ok((run, s, n_params)) = r else { continue };
        let mut traj = Table::new(
            format!("vqa_run_trajectory_{k:03}"),
            "tau dimensionless; norm_C is the max-norm of C; fidelity is nan without the exact oracle",
            &["step", "tau", "norm_C", "min_eig_A", "fidelity_or_nan"],
        )
        .plotted("tau", "fidelity_or_nan", None);
        for row in &run.log {
            traj.push(vec![row.step.into(), row.tau.into(), row.norm_c.into(), row.min_eig_a.into(), row.fidelity.into()]);
        }
        summary.push(vec![
            d.into(),
            w.into(),
            l.into(),
            settings.n_layers.into(),
            n_params.into(),
            (run.log.len() - 1).into(),
            run.final_fidelity().into(),
            s.into(),
            Cell::Text(traj.file_name()),
        ]);
        out.tables.push(traj);
    }
    out.tables.insert(0, summary);
    out
}

fn protocol_prob(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let p = cfg.protocol.as_ref().expect("validated");
    let mut table = Table::new("protocol_prob", "probabilities dimensionless; W dimensionless", &["W", "P", "lower_bound"])
        .plotted("W", "P", None);
    for w in cfg.strengths() {
        let r = ProtocolSpec::scaled(p.filling, &p.pattern, w, p.chain_length).and_then(|s| success_probability(&s));
        out.record(format!("W={w}"), &r);
        if let Ok(sp) = r {
            table.push(vec![w.into(), sp.probability.into(), sp.lower_bound.into()]);
        }
    }
    out.tables.push(table);
    out
}

/// Prefix cuts plus every contiguous half-chain interval (wrapping on rings).
fn oracle_regions(l: usize, ring: bool) -> Vec<Region> {
    let mut regions: Vec<Region> = (1..l).map(|k| Region::interval(0, k)).collect();
    if ring {
        regions.extend((1..l).filter_map(|s| Region::ring_interval(s, l / 2, l).ok()));
    } else {
        regions.extend((1..=l - l / 2).map(|s| Region::interval(s, l / 2)));
    }
    regions
}

fn oracle_check(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    let kinds = [MeasurementKind::DensityStaggered, MeasurementKind::BondXxYyPaired, MeasurementKind::BondXx];
    let mut pts = Vec::new();
    for l in cfg.sizes() {
        for kind in kinds {
            for w in cfg.strengths() {
                pts.push((l, kind, w));
            }
        }
    }
    let results: Vec<Result<(usize, f64)>> = pts
        .par_iter()
        .map(|&(l, kind, w)| {
            let model = cfg.model_at(l, 0.0);
            let meas = MeasurementSpec::new(kind, w);
            meas.validate(l)?;
            let (g, _) = ground_state_quadratic(&model)?;
            let gs = apply_measurement(&GaussianState::Slater(g), &meas, &model)?;
            let (e, _) = ground_state_ed(&model)?;
            let es = apply_measurement_ed(&e, &meas, &model)?;
            let regions = oracle_regions(l, model.boundary.is_ring());
            let mut worst: f64 = 0.0;
            for r in &regions {
                worst = worst.max((entanglement_entropy(&gs, r)? - ee_ed(&es, r)?).abs());
            }
            Ok((regions.len(), worst))
        })
        .collect();
    let mut table = Table::new(
        "oracle_check",
        "max_abs_diff in nats; L in sites; W dimensionless",
        &["L", "boundary", "kind", "W", "n_regions", "max_abs_diff", "pass"],
    );
    let tol = cfg.analysis.oracle_tol;
    for (&(l, kind, w), r) in pts.iter().zip(results) {
        let point = format!("L={l}, kind={}, W={w}", kind_name(kind));
        let r = r.and_then(|(n, d)| {
            if d < tol {
                Ok((n, d, true))
            } else {
                table.push(vec![
                    l.into(),
                    boundary_name(cfg, l).into(),
                    kind_name(kind).into(),
                    w.into(),
                    n.into(),
                    d.into(),
                    "false".into(),
                ]);
                Err(Error::Numerical(format!("|S_gaussian - S_ed| = {d:e} exceeds {tol:e}")))
            }
        });
        out.record(point, &r);
        if let Ok((n, d, _)) = r {
            table.push(vec![
                l.into(),
                boundary_name(cfg, l).into(),
                kind_name(kind).into(),
                w.into(),
                n.into(),
                d.into(),
                "true".into(),
            ]);
        }
    }
    out.tables.push(table);
    out
}

fn boundary_name(cfg: &ExperimentConfig, l: usize) -> String {
    serde_json::to_value(cfg.model_at(l, 0.0).boundary)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}
