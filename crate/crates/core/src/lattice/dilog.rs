use std::f64::consts::PI;

use crate::error::{Error, Result};

const PI2_6: f64 = PI * PI / 6.0;

/// Real dilogarithm `Li₂(z) = -∫₀ᶻ ln(1 - x) / x dx` on `[-1, 1]`.
///
/// The Taylor series is summed directly for `|z| <= 1/2`; the rest of the
/// interval is mapped into that disc by the reflection identity (`z > 1/2`)
/// or the Landen identity (`z < -1/2`).
pub fn dilog(z: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("dilog argument {z} outside [-1, 1]")));
    }
    Ok(if z == 1.0 {
        PI2_6
    } else if z > 0.5 {
        PI2_6 - z.ln() * (-z).ln_1p() - series(1.0 - z)
    } else if z < -0.5 {
        let w = z / (z - 1.0);
        let l = (-z).ln_1p();
        -series(w) - 0.5 * l * l
    } else {
        series(z)
    })
}

fn series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = z;
    for k in 1..200u32 {
        let term = power / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) || power == 0.0 {
            break;
        }
        power *= z;
    }
    sum
}
