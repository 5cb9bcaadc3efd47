use serde::{Deserialize, Serialize};

use super::model::Filling;
use crate::error::{Error, Result};

/// Ancilla post-selection protocol: site `j` is coupled through the particle
/// projector `n_j` with strength `period_weights[j mod period]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub filling: Filling,
    pub period_weights: Vec<f64>,
    pub chain_length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessProbability {
    pub probability: f64,
    /// `(1 - n)^{L_tot}`.
    pub lower_bound: f64,
}

impl ProtocolSpec {
    pub fn new(filling: Filling, period_weights: Vec<f64>, chain_length: usize) -> Result<Self> {
        let p = ProtocolSpec { filling, period_weights, chain_length };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        Filling::new(self.filling.num, self.filling.den)?;
        if self.period_weights.is_empty() || self.chain_length == 0 {
            return Err(Error::InvalidSpec("empty protocol".into()));
        }
        if self.chain_length % self.period_weights.len() != 0 {
            return Err(Error::InvalidSpec(format!(
                "period {} does not divide chain length {}",
                self.period_weights.len(),
                self.chain_length
            )));
        }
        if let Some(w) = self.period_weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidSpec(format!("protocol weight {w} must be finite and >= 0")));
        }
        Ok(())
    }

    /// Pattern scaled by a common strength, e.g. `W·{2, 1, 0, 1}`.
    pub fn scaled(filling: Filling, pattern: &[f64], strength: f64, chain_length: usize) -> Result<Self> {
        Self::new(filling, pattern.iter().map(|p| p * strength).collect(), chain_length)
    }
}

/// Born probability `p_j = 1 - (1 - e^{-2 W_j}) n` of the post-selected outcome
/// at one site, for a translation-invariant state of density `n`.
pub fn site_probability(weight: f64, density: f64) -> f64 {
    // 1 - e^{-2W} without cancellation at small W
    1.0 + (-2.0 * weight).exp_m1() * density
}

/// Probability that every site of the chain post-selects successfully.
pub fn success_probability(protocol: &ProtocolSpec) -> Result<SuccessProbability> {
    protocol.validate()?;
    let n = protocol.filling.value();
    let period = protocol.period_weights.len();
    let repeats = (protocol.chain_length / period) as f64;
    let log_period: f64 = protocol.period_weights.iter().map(|&w| site_probability(w, n).ln()).sum();
    let probability = (repeats * log_period).exp();
    let lower_bound = (protocol.chain_length as f64 * (1.0 - n).ln()).exp();
    if probability < lower_bound * (1.0 - 1e-12) {
        return Err(Error::Numerical(format!("P = {probability:e} below (1-n)^L = {lower_bound:e}")));
    }
    Ok(SuccessProbability { probability, lower_bound })
}

/// Probability of a signed pattern implemented directly: a positive weight
/// post-selects on the particle projector `n_j`, a negative one on the hole
/// projector `1 - n_j` with strength `|W_j|`.
///
/// This is the unshifted implementation of e.g. `W·{1, 0, -1, 0}`; it is not
/// bounded below by `(1 - n)^L` because hole sites succeed with probability
/// as low as `n`.
pub fn signed_protocol_probability(filling: Filling, signed_weights: &[f64], chain_length: usize) -> Result<f64> {
    Filling::new(filling.num, filling.den)?;
    if signed_weights.is_empty() || chain_length % signed_weights.len() != 0 {
        return Err(Error::InvalidSpec("period must divide chain length".into()));
    }
    let n = filling.value();
    let log_period: f64 = signed_weights
        .iter()
        .map(|&w| {
            let density = if w >= 0.0 { n } else { 1.0 - n };
            site_probability(w.abs(), density).ln()
        })
        .sum();
    Ok(((chain_length / signed_weights.len()) as f64 * log_period).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_weights_succeed_always() {
        let p = ProtocolSpec::new(Filling::QUARTER, vec![0.0; 4], 80).unwrap();
        assert_eq!(success_probability(&p).unwrap().probability, 1.0);
    }

    #[test]
    fn matches_closed_forms_for_quarter_filling() {
        let (w, l) = (0.9, 80usize);
        let shifted = ProtocolSpec::scaled(Filling::QUARTER, &[2.0, 1.0, 0.0, 1.0], w, l).unwrap();
        let p2 = success_probability(&shifted).unwrap().probability;
        let e2 = 1.0 - (-2.0 * w).exp();
        let e4 = 1.0 - (-4.0 * w).exp();
        let expected2 = ((1.0 - e4 / 4.0) * (1.0 - e2 / 4.0).powi(2)).powf(l as f64 / 4.0);
        assert_relative_eq!(p2, expected2, max_relative = 1e-12);

        let p1 = signed_protocol_probability(Filling::QUARTER, &[w, 0.0, -w, 0.0], l).unwrap();
        let expected1 = ((1.0 - e2 / 4.0) * (1.0 - e2 * 3.0 / 4.0)).powf(l as f64 / 4.0);
        assert_relative_eq!(p1, expected1, max_relative = 1e-12);
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(ProtocolSpec::new(Filling::HALF, vec![1.0, -1.0], 8).is_err());
        assert!(ProtocolSpec::new(Filling::HALF, vec![1.0, 0.0, 1.0], 8).is_err());
    }
}
