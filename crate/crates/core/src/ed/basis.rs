use crate::error::{Error, Result};

/// Largest chain for full-space (`2^L`) operators.
pub const MAX_FULL_SITES: usize = 20;
/// Largest chain for fixed-particle-number sectors.
pub const MAX_SECTOR_SITES: usize = 24;

/// Occupation-number basis states with a fixed particle number.
///
/// Bit `j` of a state is the occupation of site `j`; the fermionic ordering is
/// `|n⟩ = (c†_0)^{n_0} (c†_1)^{n_1} ... |0⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    pub n_sites: usize,
    pub n_particles: usize,
    states: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, n_particles: usize) -> Result<Self> {
        if n_sites > MAX_SECTOR_SITES {
            return Err(Error::SizeGuard(format!("sector basis limited to {MAX_SECTOR_SITES} sites, got {n_sites}")));
        }
        if n_particles > n_sites {
            return Err(Error::InvalidSpec(format!("{n_particles} particles on {n_sites} sites")));
        }
        let states = (0u64..1u64 << n_sites).filter(|s| s.count_ones() as usize == n_particles).collect();
        Ok(SectorBasis { n_sites, n_particles, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// `c_j |s⟩`, with the Jordan-Wigner sign of the modes before `j`.
#[inline]
pub fn annihilate(s: u64, j: usize) -> Option<(u64, f64)> {
    if s >> j & 1 == 0 {
        return None;
    }
    Some((s & !(1 << j), parity_below(s, j)))
}

/// `c†_j |s⟩`.
#[inline]
pub fn create(s: u64, j: usize) -> Option<(u64, f64)> {
    if s >> j & 1 == 1 {
        return None;
    }
    Some((s | 1 << j, parity_below(s, j)))
}

#[inline]
fn parity_below(s: u64, j: usize) -> f64 {
    if (s & ((1u64 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A single fermionic ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Apply a product of ladder operators, rightmost first.
pub fn apply_product(s: u64, ops: &[Ladder]) -> Option<(u64, f64)> {
    let mut state = s;
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (next, sgn) = match *op {
            Ladder::Create(j) => create(state, j)?,
            Ladder::Annihilate(j) => annihilate(state, j)?,
        };
        state = next;
        sign *= sgn;
    }
    Some((state, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Ladder::*;

    #[test]
    fn sector_dimension() {
        let b = SectorBasis::new(8, 4).unwrap();
        assert_eq!(b.dim(), 70);
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b.index(b.states()[17]), Some(17));
        assert!(SectorBasis::new(25, 12).is_err());
    }

    #[test]
    fn anticommutation() {
        // {c_i, c†_j} = δ_ij on every basis state of 4 modes
        for s in 0u64..16 {
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = std::collections::HashMap::<u64, f64>::new();
                    for ops in [[Annihilate(i), Create(j)], [Create(j), Annihilate(i)]] {
                        if let Some((t, sg)) = apply_product(s, &ops) {
                            *acc.entry(t).or_default() += sg;
                        }
                    }
                    acc.retain(|_, v| *v != 0.0);
                    if i == j {
                        assert_eq!(acc.len(), 1);
                        assert_eq!(acc.get(&s), Some(&1.0));
                    } else {
                        assert!(acc.is_empty());
                    }
                }
            }
        }
    }
}
