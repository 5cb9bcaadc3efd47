use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `-(c/3) ln cos²(π x)` for a ratio `x ∈ [0, 1/2)`.
pub fn theory_mutual_information(c_eff: f64, ratio: f64) -> Result<f64> {
    if ratio == 0.5 {
        return Err(Error::Pole("mutual information diverges at ratio 1/2".into()));
    }
    if !(0.0..0.5).contains(&ratio) {
        return Err(Error::Domain(format!("ratio {ratio} outside [0, 1/2)")));
    }
    let c = (PI * ratio).cos();
    Ok(-(c_eff / 3.0) * (c * c).ln())
}

/// `(c/6) ln[(2N/π) sin(πL/N)] + const` for an interval of `L` sites at the end
/// of an open chain of `N` sites.
pub fn theory_chord_entropy(c_eff: f64, l: f64, l_tot: f64, additive_const: f64) -> Result<f64> {
    if !(l > 0.0 && l < l_tot) {
        return Err(Error::Domain(format!("need 0 < L < L_tot, got L = {l}, L_tot = {l_tot}")));
    }
    Ok(c_eff / 6.0 * (2.0 * l_tot / PI * (PI * l / l_tot).sin()).ln() + additive_const)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_information_values() {
        assert_eq!(theory_mutual_information(1.0, 0.0).unwrap(), 0.0);
        assert!((theory_mutual_information(1.0, 0.25).unwrap() - 2f64.ln() / 3.0).abs() < 1e-15);
        assert!(matches!(theory_mutual_information(1.0, 0.5), Err(Error::Pole(_))));
        assert!(theory_mutual_information(1.0, 0.7).is_err());
    }

    #[test]
    fn chord_values() {
        let mid = theory_chord_entropy(0.5, 7.0, 14.0, 0.1).unwrap();
        assert!((mid - (0.5 / 6.0 * (28.0 / PI).ln() + 0.1)).abs() < 1e-15);
        let a = theory_chord_entropy(0.5, 3.0, 14.0, 0.0).unwrap();
        let b = theory_chord_entropy(0.5, 11.0, 14.0, 0.0).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(theory_chord_entropy(0.5, 14.0, 14.0, 0.0).is_err());
    }
}
