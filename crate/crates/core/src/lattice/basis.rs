use crate::error::{Error, Result};

/// Largest ring handled; lookup tables are `2^L` entries per spin species.
pub const MAX_SITES: usize = 16;

const ABSENT: u32 = u32::MAX;

/// Occupation basis of a fixed `(N_up, N_down)` sector.
///
/// Bit `j` of a mask is the occupation of site `j`. Each species lists its
/// masks in ascending order; the full index is `up_index * n_down_states + down_index`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    n_down: usize,
    up: Vec<u32>,
    down: Vec<u32>,
    up_lookup: Vec<u32>,
    down_lookup: Vec<u32>,
}

fn species_states(sites: usize, particles: usize) -> (Vec<u32>, Vec<u32>) {
    let mut lookup = vec![ABSENT; 1 << sites];
    let mut states = Vec::new();
    for mask in 0..(1u32 << sites) {
        if mask.count_ones() as usize == particles {
            lookup[mask as usize] = states.len() as u32;
            states.push(mask);
        }
    }
    (states, lookup)
}

pub fn build_sector_basis(sites: usize, n_up: usize, n_down: usize) -> Result<SectorBasis> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::InvalidParameter(format!(
            "sector basis supports 1..={MAX_SITES} sites, got {sites}"
        )));
    }
    if n_up > sites || n_down > sites {
        return Err(Error::InvalidParameter(format!(
            "particle numbers ({n_up}, {n_down}) exceed {sites} sites"
        )));
    }
    let (up, up_lookup) = species_states(sites, n_up);
    let (down, down_lookup) = species_states(sites, n_down);
    Ok(SectorBasis {
        sites,
        n_up,
        n_down,
        up,
        down,
        up_lookup,
        down_lookup,
    })
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn sector(&self) -> (usize, usize, usize) {
        (self.sites, self.n_up, self.n_down)
    }

    pub fn dimension(&self) -> usize {
        self.up.len() * self.down.len()
    }

    pub fn up_states(&self) -> &[u32] {
        &self.up
    }

    pub fn down_states(&self) -> &[u32] {
        &self.down
    }

    pub fn state_of(&self, index: usize) -> (u32, u32) {
        let nd = self.down.len();
        (self.up[index / nd], self.down[index % nd])
    }

    pub fn index_of(&self, up: u32, down: u32) -> Option<usize> {
        let iu = *self.up_lookup.get(up as usize)?;
        let id = *self.down_lookup.get(down as usize)?;
        (iu != ABSENT && id != ABSENT).then(|| iu as usize * self.down.len() + id as usize)
    }

    pub(crate) fn up_lookup(&self) -> &[u32] {
        &self.up_lookup
    }

    pub(crate) fn down_lookup(&self) -> &[u32] {
        &self.down_lookup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_sector_basis(2, 1, 1).unwrap().dimension(), 4);
        assert_eq!(build_sector_basis(4, 2, 2).unwrap().dimension(), 36);
        let b = build_sector_basis(10, 5, 5).unwrap();
        assert_eq!(b.dimension(), binomial(10, 5) * binomial(10, 5));
        assert_eq!(b.dimension(), 63504);
        assert_eq!(build_sector_basis(3, 0, 0).unwrap().dimension(), 1);
    }

    #[test]
    fn lookup_inverts_enumeration() {
        let b = build_sector_basis(6, 2, 3).unwrap();
        for i in 0..b.dimension() {
            let (u, d) = b.state_of(i);
            assert_eq!(u.count_ones(), 2);
            assert_eq!(d.count_ones(), 3);
            assert_eq!(b.index_of(u, d), Some(i));
        }
        assert_eq!(b.index_of(0b111, 0b111), None);
    }

    #[test]
    fn ordering_is_ascending() {
        let b = build_sector_basis(5, 2, 1).unwrap();
        assert!(b.up_states().windows(2).all(|w| w[0] < w[1]));
        assert!(b.down_states().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_overfilled_sector() {
        assert!(build_sector_basis(4, 5, 1).is_err());
        assert!(build_sector_basis(17, 1, 1).is_err());
    }
}
