use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Fermionic periodic boundary: the wrap bond carries the same hopping
    /// sign as every other bond.
    Periodic,
    /// Fermionic antiperiodic boundary: the wrap bond's fermion bilinears flip sign.
    Antiperiodic,
    Open,
}

impl Boundary {
    pub fn is_ring(&self) -> bool {
        !matches!(self, Boundary::Open)
    }

    /// Fermionic ring boundary that maps onto the periodic spin chain for an
    /// even ring at half filling: periodic when `n_sites ≡ 2 (mod 4)`,
    /// antiperiodic otherwise.
    pub fn spin_periodic(n_sites: usize) -> Boundary {
        if n_sites % 4 == 2 {
            Boundary::Periodic
        } else {
            Boundary::Antiperiodic
        }
    }
}

/// Rational filling fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filling {
    pub num: u32,
    pub den: u32,
}

impl Filling {
    pub const HALF: Filling = Filling { num: 1, den: 2 };
    pub const QUARTER: Filling = Filling { num: 1, den: 4 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        let f = Filling { num, den };
        f.validate()?;
        Ok(f)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn validate(&self) -> Result<()> {
        // 0 < num/den <= 1/2
        if self.den == 0 || self.num == 0 || 2 * self.num > self.den {
            return Err(Error::InvalidSpec(format!(
                "filling {}/{} must lie in (0, 1/2]",
                self.num, self.den
            )));
        }
        Ok(())
    }
}

impl Default for Filling {
    fn default() -> Self {
        Filling::HALF
    }
}

/// Spinless-fermion chain `-t Σ (c†_i c_{i+1} + h.c.) + V Σ (n_i - 1/2)(n_{i+1} - 1/2)`
/// with `t = 1` and `delta = V / t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_sites: usize,
    pub boundary: Boundary,
    pub delta: f64,
    #[serde(default = "unit_hopping")]
    pub hopping: f64,
    #[serde(default)]
    pub filling: Filling,
}

fn unit_hopping() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn new(n_sites: usize, boundary: Boundary, delta: f64) -> Result<Self> {
        let m = ModelSpec { n_sites, boundary, delta, hopping: 1.0, filling: Filling::HALF };
        m.validate()?;
        Ok(m)
    }

    pub fn with_filling(mut self, filling: Filling) -> Result<Self> {
        self.filling = filling;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!("n_sites = {} < 2", self.n_sites)));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidSpec("delta must be finite".into()));
        }
        if self.hopping != 1.0 {
            return Err(Error::InvalidSpec("hopping is the energy unit and must be 1".into()));
        }
        self.filling.validate()?;
        if (self.n_sites as u64 * self.filling.num as u64) % self.filling.den as u64 != 0 {
            return Err(Error::InvalidSpec(format!(
                "filling {}/{} times n_sites {} is not an integer",
                self.filling.num, self.filling.den, self.n_sites
            )));
        }
        Ok(())
    }

    pub fn n_particles(&self) -> usize {
        self.n_sites * self.filling.num as usize / self.filling.den as usize
    }

    /// Nearest-neighbour bonds `(i, i + 1)`; the wrap bond `(L - 1, 0)` is
    /// included for rings longer than two sites.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        self.signed_bonds().into_iter().map(|(i, j, _)| (i, j)).collect()
    }

    /// Bonds with the sign multiplying fermion bilinears across them: `-1` on
    /// the wrap bond of an antiperiodic ring, `+1` elsewhere.
    pub fn signed_bonds(&self) -> Vec<(usize, usize, f64)> {
        let l = self.n_sites;
        let mut b: Vec<_> = (0..l - 1).map(|i| (i, i + 1, 1.0)).collect();
        if self.boundary.is_ring() && l > 2 {
            let sign = if self.boundary == Boundary::Antiperiodic { -1.0 } else { 1.0 };
            b.push((l - 1, 0, sign));
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    /// `M = exp(-W Σ_i (-1)^i n_i)` with the sign attached to 1-based site labels.
    DensityStaggered,
    /// `M₁ = exp(W/2 Σ (σˣσˣ + σʸσʸ))` on the disjoint pairs `(2m, 2m+1)`.
    BondXxYyPaired,
    /// `M₂ = exp(W/2 Σ σˣ_i σˣ_{i+1})` on every bond of the chain.
    BondXx,
    /// `M = exp(-W Σ_j p_{j mod period} n_j)` for a user-supplied period `p`.
    DensityPattern,
}

impl MeasurementKind {
    pub fn is_density(&self) -> bool {
        matches!(self, MeasurementKind::DensityStaggered | MeasurementKind::DensityPattern)
    }

    pub fn conserves_number(&self) -> bool {
        !matches!(self, MeasurementKind::BondXx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub kind: MeasurementKind,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<f64>>,
}

impl MeasurementSpec {
    pub fn new(kind: MeasurementKind, strength: f64) -> Self {
        MeasurementSpec { kind, strength, pattern: None }
    }

    pub fn staggered(strength: f64) -> Self {
        Self::new(MeasurementKind::DensityStaggered, strength)
    }

    pub fn pattern(strength: f64, pattern: Vec<f64>) -> Self {
        MeasurementSpec { kind: MeasurementKind::DensityPattern, strength, pattern: Some(pattern) }
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        MeasurementSpec { strength, ..self.clone() }
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if !(self.strength >= 0.0) || !self.strength.is_finite() {
            return Err(Error::InvalidSpec(format!("strength {} must be finite and >= 0", self.strength)));
        }
        match self.kind {
            MeasurementKind::DensityPattern => {
                let p = self
                    .pattern
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("density_pattern requires a pattern".into()))?;
                if p.is_empty() || n_sites % p.len() != 0 {
                    return Err(Error::InvalidSpec(format!(
                        "pattern length {} does not divide n_sites {}",
                        p.len(),
                        n_sites
                    )));
                }
                if p.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidSpec("pattern entries must be finite".into()));
                }
            }
            MeasurementKind::DensityStaggered | MeasurementKind::BondXxYyPaired => {
                if n_sites % 2 != 0 {
                    return Err(Error::InvalidSpec(format!("{:?} needs an even chain, got {n_sites}", self.kind)));
                }
            }
            MeasurementKind::BondXx => {}
        }
        Ok(())
    }

    /// Per-site weights `w_j` with `M = exp(-Σ_j w_j n_j)`. Only defined for the
    /// density kinds.
    ///
    /// Site `j` is zero-based; the staggered kind attaches `(-1)^i` to the
    /// one-based label `i = j + 1`, so it equals the pattern `[-W, +W]`.
    pub fn density_weights(&self, n_sites: usize) -> Result<Vec<f64>> {
        self.validate(n_sites)?;
        let w = self.strength;
        match self.kind {
            MeasurementKind::DensityStaggered => {
                Ok((0..n_sites).map(|j| if j % 2 == 0 { -w } else { w }).collect())
            }
            MeasurementKind::DensityPattern => {
                let p = self.pattern.as_ref().unwrap();
                Ok((0..n_sites).map(|j| w * p[j % p.len()]).collect())
            }
            _ => Err(Error::InvalidSpec(format!("{:?} is not a density measurement", self.kind))),
        }
    }

    /// Disjoint pairs `(2m, 2m + 1)` touched by the paired XX+YY measurement.
    pub fn paired_bonds(n_sites: usize) -> Vec<(usize, usize)> {
        (0..n_sites / 2).map(|m| (2 * m, 2 * m + 1)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staggered_is_pattern_minus_plus() {
        let a = MeasurementSpec::staggered(0.7).density_weights(8).unwrap();
        let b = MeasurementSpec::pattern(0.7, vec![-1.0, 1.0]).density_weights(8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0], -0.7);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ModelSpec::new(1, Boundary::Open, 0.0).is_err());
        assert!(ModelSpec::new(5, Boundary::Open, 0.0).is_err());
        assert!(ModelSpec::new(6, Boundary::Open, 0.0).unwrap().with_filling(Filling::QUARTER).is_err());
        assert!(ModelSpec::new(8, Boundary::Open, 0.0).unwrap().with_filling(Filling::QUARTER).is_ok());
        assert!(Filling::new(3, 4).is_err());
        assert!(MeasurementSpec::staggered(-0.1).validate(4).is_err());
        assert!(MeasurementSpec::pattern(1.0, vec![2.0, 1.0, 0.0]).validate(8).is_err());
        assert!(MeasurementSpec::new(MeasurementKind::DensityPattern, 1.0).validate(8).is_err());
    }

    #[test]
    fn bonds_by_boundary() {
        let open = ModelSpec::new(4, Boundary::Open, 0.0).unwrap();
        assert_eq!(open.bonds(), vec![(0, 1), (1, 2), (2, 3)]);
        let ring = ModelSpec::new(4, Boundary::Periodic, 0.0).unwrap();
        assert_eq!(ring.bonds().last(), Some(&(3, 0)));
        let two = ModelSpec::new(2, Boundary::Periodic, 0.0).unwrap();
        assert_eq!(two.bonds(), vec![(0, 1)]);
    }
}
