use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of lattice sites, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Region {
    sites: Vec<usize>,
}

impl Region {
    pub fn new(mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        if let Some(w) = sites.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegion(format!("duplicate site {}", w[0])));
        }
        Ok(Region { sites })
    }

    pub fn empty() -> Self {
        Region::default()
    }

    /// `[start, start + len)`.
    pub fn interval(start: usize, len: usize) -> Self {
        Region { sites: (start..start + len).collect() }
    }

    /// Interval of `len` sites from `start`, wrapping around a ring of `n_sites`.
    pub fn ring_interval(start: usize, len: usize, n_sites: usize) -> Result<Self> {
        if len > n_sites {
            return Err(Error::InvalidRegion(format!("interval of {len} sites on ring of {n_sites}")));
        }
        Region::new((start..start + len).map(|i| i % n_sites).collect())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn check(&self, n_sites: usize) -> Result<()> {
        match self.sites.last() {
            Some(&s) if s >= n_sites => {
                Err(Error::InvalidRegion(format!("site {s} outside chain of {n_sites}")))
            }
            _ => Ok(()),
        }
    }

    /// Union of two disjoint regions.
    pub fn disjoint_union(&self, other: &Region) -> Result<Region> {
        if let Some(&s) = self.sites.iter().find(|s| other.contains(**s)) {
            return Err(Error::Overlap(s));
        }
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        sites.sort_unstable();
        Ok(Region { sites })
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut sites = self.sites.clone();
        sites.extend(other.sites.iter().filter(|s| !self.contains(**s)));
        sites.sort_unstable();
        Region { sites }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region { sites: self.sites.iter().copied().filter(|s| other.contains(*s)).collect() }
    }

    /// Image under the reflection `i -> n_sites - 1 - i`.
    pub fn mirrored(&self, n_sites: usize) -> Region {
        let mut sites: Vec<_> = self.sites.iter().map(|&s| n_sites - 1 - s).collect();
        sites.sort_unstable();
        Region { sites }
    }

    /// Image under the translation `i -> (i + shift) mod n_sites`.
    pub fn translated(&self, shift: usize, n_sites: usize) -> Region {
        let mut sites: Vec<_> = self.sites.iter().map(|&s| (s + shift) % n_sites).collect();
        sites.sort_unstable();
        Region { sites }
    }

    pub fn is_contiguous(&self) -> bool {
        self.sites.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

impl TryFrom<Vec<usize>> for Region {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Region::new(v)
    }
}

impl From<Region> for Vec<usize> {
    fn from(r: Region) -> Self {
        r.sites
    }
}
