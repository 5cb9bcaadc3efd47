//! Acceptance suite. Runs as a plain binary (`harness = false`) so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.
//! `cargo test --test acceptance -- 2 5` runs a subset.

use std::process::ExitCode;
use std::time::Instant;

use mipt_core::analysis::{
    data_collapse, fit_log_law, fit_mutual_information, series, theory_mutual_information, window, CollapseCurve,
    Scaling,
};
use mipt_core::ed::{apply_measurement_ed, ee_ed, ee_spin, ground_state_ed, DenseState};
use mipt_core::gaussian::{apply_measurement, entanglement_entropy, ground_state_quadratic, mutual_information, GaussianState};
use mipt_core::lattice::{
    c_eff_theory, luttinger_k, power_law_exponent, signed_protocol_probability, success_probability, Boundary,
    Filling, MeasurementKind, MeasurementSpec, ModelSpec, ProtocolSpec, REFERENCE_DECAY_POWER,
};
use mipt_core::vqa::{mclachlan_system, run_vqa, tangent_vectors, AnsatzSpec, VqaRunConfig};
use mipt_core::{Region, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [MeasurementKind; 3] =
    [MeasurementKind::DensityStaggered, MeasurementKind::BondXxYyPaired, MeasurementKind::BondXx];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn binary_entropy(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

/// Post-measurement Gaussian state on a free ring or chain.
fn measured_gaussian(model: &ModelSpec, meas: &MeasurementSpec) -> Result<GaussianState> {
    let (g, _) = ground_state_quadratic(model)?;
    apply_measurement(&GaussianState::Slater(g), meas, model)
}

/// Fitted `3b` of `S_half` vs `ln L` on free periodic rings `L = 34, 42, …, 202`.
fn fitted_c_eff(kind: MeasurementKind, w: f64) -> Result<f64> {
    let mut pts = Vec::new();
    for l in (34..=202).step_by(8) {
        let model = ModelSpec::new(l, Boundary::Periodic, 0.0)?;
        let s = measured_gaussian(&model, &MeasurementSpec::new(kind, w))?;
        pts.push((l as f64, entanglement_entropy(&s, &Region::interval(0, l / 2))?));
    }
    let data = window(&series(pts), 32.0);
    Ok(fit_log_law(&data)?.param("c_eff"))
}

fn criterion_1() -> Result<Outcome> {
    let c0 = c_eff_theory(0.0)?;
    let c1 = c_eff_theory(1.0)?;
    outcome(
        c0 == 1.0 && (c1 - 0.1225).abs() <= 1e-3,
        format!("c_eff(0) = {c0}, c_eff(1) = {c1:.6} (target 0.1225 ± 0.001), c_eff(1)/3 = {:.5}", c1 / 3.0),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in [0.25, 0.5, 1.0, 2.0] {
        let fit = fitted_c_eff(MeasurementKind::DensityStaggered, w)?;
        let th = c_eff_theory(w)?;
        pass &= rel(fit, th) < 0.03;
        parts.push(format!("W={w}: {fit:.5} vs {th:.5} ({:.2}%)", 100.0 * rel(fit, th)));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_3() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for w in [0.5, 1.0] {
        let th = c_eff_theory(w)?;
        let fits: Vec<f64> = KINDS.iter().map(|&k| fitted_c_eff(k, w)).collect::<Result<_>>()?;
        let (lo, hi) = fits.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
        let spread = hi / lo - 1.0;
        let worst = fits.iter().map(|&f| rel(f, th)).fold(0.0, f64::max);
        pass &= spread < 0.05 && worst < 0.05;
        parts.push(format!(
            "W={w}: staggered {:.5}, paired {:.5}, bond_xx {:.5}, theory {th:.5} (spread {:.2}%, max dev {:.2}%)",
            fits[0],
            fits[1],
            fits[2],
            100.0 * spread,
            100.0 * worst
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Every contiguous half-chain cut of a chain or ring plus every prefix cut.
fn cuts(l: usize, boundary: Boundary) -> Vec<Region> {
    let mut out: Vec<Region> = (1..l).map(|k| Region::interval(0, k)).collect();
    if boundary.is_ring() {
        out.extend((1..l).map(|s| Region::ring_interval(s, l / 2, l).unwrap()));
    } else {
        out.extend((1..=l / 2).map(|s| Region::interval(s, l / 2)));
    }
    out
}

fn criterion_4() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for l in (4..=12).step_by(2) {
        let mut boundaries = vec![Boundary::Open];
        boundaries.push(Boundary::spin_periodic(l));
        for boundary in boundaries {
            let model = ModelSpec::new(l, boundary, 0.0)?;
            let (g_ed, _) = ground_state_ed(&model)?;
            for kind in KINDS {
                for w in [0.3, 1.0] {
                    let meas = MeasurementSpec::new(kind, w);
                    let gs = measured_gaussian(&model, &meas)?;
                    let es = apply_measurement_ed(&g_ed, &meas, &model)?;
                    for region in cuts(l, boundary) {
                        let d = (entanglement_entropy(&gs, &region)? - ee_ed(&es, &region)?).abs();
                        worst = worst.max(d);
                        cases += 1;
                    }
                }
            }
        }
    }
    let mut two_site: f64 = 0.0;
    let model = ModelSpec::new(2, Boundary::Open, 0.0)?;
    let (g_ed, _) = ground_state_ed(&model)?;
    for k in 0..=30 {
        let w = 0.1 * k as f64;
        let meas = MeasurementSpec::staggered(w);
        let exact = binary_entropy((2.0 * w).exp() / (2.0 * (2.0 * w).cosh()));
        let site = Region::interval(0, 1);
        let gs = entanglement_entropy(&measured_gaussian(&model, &meas)?, &site)?;
        let es = ee_ed(&apply_measurement_ed(&g_ed, &meas, &model)?, &site)?;
        two_site = two_site.max((gs - exact).abs()).max((es - exact).abs());
    }
    outcome(
        worst < 1e-8 && two_site < 1e-12,
        format!("{cases} cuts, max |S_gauss - S_ed| = {worst:.2e} (< 1e-8); two-site max error {two_site:.2e} (< 1e-12)"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let l_tot = 202;
    let mut pass = true;
    let mut parts = Vec::new();
    let model = ModelSpec::new(l_tot, Boundary::Periodic, 0.0)?;
    for w in [0.5, 1.0] {
        let s = measured_gaussian(&model, &MeasurementSpec::staggered(w))?;
        let mut pts = Vec::new();
        for l in 4..=10 {
            let a = Region::interval(0, l);
            let b = Region::interval(l_tot / 2, l);
            pts.push((l as f64 / l_tot as f64, mutual_information(&s, &a, &b)?));
        }
        let fit = fit_mutual_information(&series(pts))?;
        let (eta, c_fit) = (fit.param("eta"), fit.param("c_eff"));
        let th = c_eff_theory(w)?;
        // stored closed form at the smallest ratio, expanded to leading order
        let x = 0.01;
        let curve_leading = theory_mutual_information(th, x)? / x.powi(2);
        let curve_ok = rel(curve_leading, th * std::f64::consts::PI.powi(2) / 3.0) < 1e-3;
        pass &= (1.8..=2.2).contains(&eta) && rel(c_fit, th) < 0.05 && curve_ok;
        parts.push(format!(
            "W={w}: eta = {eta:.4}, c_eff from prefactor {c_fit:.5} vs {th:.5} ({:.2}%)",
            100.0 * rel(c_fit, th)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn ring_half_entropy(l: usize, delta: f64, w: f64) -> Result<f64> {
    let model = ModelSpec::new(l, Boundary::spin_periodic(l), delta)?;
    let (g, _) = ground_state_ed(&model)?;
    let s = apply_measurement_ed(&g, &MeasurementSpec::staggered(w), &model)?;
    ee_ed(&s, &Region::interval(0, l / 2))
}

fn log_slopes(delta: f64, w: f64) -> Result<Vec<f64>> {
    let sizes: Vec<usize> = (8..=16).step_by(2).collect();
    let s: Vec<f64> = sizes.iter().map(|&l| ring_half_entropy(l, delta, w)).collect::<Result<_>>()?;
    Ok((1..sizes.len())
        .map(|i| (s[i] - s[i - 1]) / ((sizes[i] as f64).ln() - (sizes[i - 1] as f64).ln()))
        .collect())
}

fn criterion_6() -> Result<Outcome> {
    let w = 0.6;
    let attractive = log_slopes(0.6, w)?;
    let repulsive = log_slopes(-0.6, w)?;
    let decreasing = attractive.windows(2).all(|p| p[1] < p[0]);
    let (lo, hi) = repulsive.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
    let spread = (hi - lo) / hi;
    let k = luttinger_k(0.6)?;
    let power = power_law_exponent(k)?;
    let stored_ok = (k - 1.0 / (2.0 - 2.0 * 0.6f64.acos() / std::f64::consts::PI)).abs() < 1e-12
        && (power - (2.0 / k - 2.0)).abs() < 1e-12
        && REFERENCE_DECAY_POWER.power == 0.77;
    outcome(
        decreasing && spread < 0.10 && stored_ok,
        format!(
            "Δ=+0.6 slopes {:.5?} (strictly decreasing: {decreasing}); Δ=-0.6 slopes {:.5?} (spread {:.1}% < 10%); \
             stored K(0.6) = {k:.5}, 2/K-2 = {power:.5}, reference fit {}",
            attractive,
            repulsive,
            100.0 * spread,
            REFERENCE_DECAY_POWER.power
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let w = 1.0;
    let deltas: Vec<f64> = (0..=20).map(|k| -0.5 + 0.05 * k as f64).collect();
    let mut curves = Vec::new();
    for l in (8..=16).step_by(2) {
        let points = deltas.iter().map(|&d| Ok((d, ring_half_entropy(l, d, w)?))).collect::<Result<_>>()?;
        curves.push(CollapseCurve { size: l as f64, points });
    }
    let log = data_collapse(&curves, 0.0, Scaling::LogL)?.residual;
    let pow = data_collapse(&curves, 0.0, Scaling::PowerL { nu: 1.0 })?.residual;
    outcome(log < pow, format!("residual (Δ)ln L = {log:.3e}, (Δ)L = {pow:.3e}"))
}

fn open_ground(l: usize, delta: f64) -> Result<(ModelSpec, DenseState)> {
    let model = ModelSpec::new(l, Boundary::Open, delta)?;
    let (g, _) = ground_state_ed(&model)?;
    Ok((model, g))
}

fn criterion_8() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();

    let (_, g6) = open_ground(6, 0.0)?;
    let spec = AnsatzSpec::new(6, 6)?;
    let h = mipt_core::ed::Generator::for_density_measurement(&MeasurementSpec::staggered(1.0), 6)?;
    let stalled = mclachlan_system(&spec, &vec![0.0; spec.n_params()], &g6, &h)?.norm_c();
    let seeded = mclachlan_system(&spec, &spec.seeded_theta(), &g6, &h)?.norm_c();
    pass &= stalled < 1e-10 && seeded > 0.0;
    parts.push(format!("|C| unseeded {stalled:.1e}, seeded {seeded:.3e}"));

    let (_, g4) = open_ground(4, 0.0)?;
    let small = AnsatzSpec::new(4, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let theta: Vec<f64> = (0..small.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let tangents = tangent_vectors(&small, &theta, &g4)?;
    let step = 1e-5;
    let mut grad_err: f64 = 0.0;
    for (a, t) in tangents.iter().enumerate() {
        let mut plus = theta.clone();
        let mut minus = theta.clone();
        plus[a] += step;
        minus[a] -= step;
        let fp = mipt_core::vqa::ansatz_state(&small, &plus, &g4)?.into_amplitudes();
        let fm = mipt_core::vqa::ansatz_state(&small, &minus, &g4)?.into_amplitudes();
        let fd = (fp - fm) / Complex64::from(2.0 * step);
        grad_err = grad_err.max((t - fd).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    pass &= grad_err < 1e-7;
    parts.push(format!("tangent vs finite difference {grad_err:.1e}"));

    let (m6, _) = open_ground(6, 0.0)?;
    let run = run_vqa(&m6, &MeasurementSpec::staggered(0.4), &spec, &VqaRunConfig::new(0.4))?;
    let fid = run.final_fidelity();
    pass &= fid >= 0.99;
    parts.push(format!("L=6 l=6 W=0.4 fidelity {fid:.5}"));

    // three-phase profile at the largest size affordable on one core
    let (l, w) = (8, 0.8);
    let big = AnsatzSpec::new(l, l)?;
    let meas = MeasurementSpec::staggered(w);
    let mut halves = Vec::new();
    for delta in [-0.7, 0.0, 0.7] {
        let (model, _) = open_ground(l, delta)?;
        let run = run_vqa(&model, &meas, &big, &VqaRunConfig::new(w))?;
        let s = ee_spin(&run.state, &Region::interval(0, l / 2))?;
        pass &= run.final_fidelity() >= 0.99;
        parts.push(format!("L=8 Δ={delta}: fidelity {:.4}, S_half {s:.4}", run.final_fidelity()));
        halves.push(s);
    }
    let ordered = halves[0] > halves[1] && halves[1] > halves[2];
    pass &= ordered;
    parts.push(format!("S_half ordered attractive > free > repulsive: {ordered}"));
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Result<Outcome> {
    let l = 80;
    let mut dominance = true;
    let mut bounded = true;
    for k in 0..=300 {
        let w = 0.01 * k as f64;
        let shifted = success_probability(&ProtocolSpec::scaled(Filling::QUARTER, &[2.0, 1.0, 0.0, 1.0], w, l)?)?;
        let signed = signed_protocol_probability(Filling::QUARTER, &[w, 0.0, -w, 0.0], l)?;
        dominance &= shifted.probability >= signed;
        bounded &= shifted.probability >= shifted.lower_bound;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let filling = [Filling::QUARTER, Filling::HALF][rng.random_range(0..2)];
        let period = rng.random_range(1..=4);
        let weights: Vec<f64> = (0..period).map(|_| rng.random_range(0.0..5.0)).collect();
        let p = success_probability(&ProtocolSpec::new(filling, weights, 4 * period * 5)?)?;
        bounded &= p.probability >= p.lower_bound;
    }
    let p = success_probability(&ProtocolSpec::scaled(Filling::QUARTER, &[2.0, 1.0, 0.0, 1.0], 0.7, l)?)?.probability;
    let magnitude = (1e-7..=1e-5).contains(&p);
    outcome(
        dominance && bounded && magnitude,
        format!("P2 >= P1 on W grid: {dominance}; P >= (1-n)^L: {bounded}; P(1/4, {{2,1,0,1}}, 80, 0.7) = {p:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Result<Outcome>); 9] = [
        (1, "closed-form effective central charge", criterion_1),
        (2, "Gaussian half-chain fits vs closed form", criterion_2),
        (3, "measurement kinds agree at the free point", criterion_3),
        (4, "Gaussian vs exact diagonalization", criterion_4),
        (5, "mutual information scaling", criterion_5),
        (6, "log-slope signature of the two phases", criterion_6),
        (7, "data collapse log L vs L", criterion_7),
        (8, "variational evolution", criterion_8),
        (9, "post-selection success probabilities", criterion_9),
    ];
    // optional criterion numbers on the command line restrict the run
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected: Vec<_> = criteria.into_iter().filter(|c| only.is_empty() || only.contains(&c.0)).collect();
    let total = selected.len();
    let mut failed = 0;
    for (id, name, run) in selected {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id} [{}] {name} ({:.1} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {total} criteria passed", total - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
