use rand::seq::SliceRandom;
use rand::Rng;

use super::Permutation;
use crate::error::{Error, Result};

/// Widest explicitly tabulated permutation.
pub const MAX_EXPLICIT_WIDTH: u32 = 24;

/// A permutation stored as forward and inverse lookup tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitPerm {
    width: u32,
    table: Vec<u64>,
    inverse_table: Vec<u64>,
}

fn check_width(width: u32) -> Result<usize> {
    if width > MAX_EXPLICIT_WIDTH {
        return Err(Error::DimensionTooLarge {
            qubits: width,
            limit: MAX_EXPLICIT_WIDTH,
        });
    }
    Ok(1usize << width)
}

impl ExplicitPerm {
    pub fn from_table(width: u32, table: Vec<u64>) -> Result<Self> {
        let size = check_width(width)?;
        if table.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: table.len(),
            });
        }
        let mut inverse_table = vec![u64::MAX; size];
        for (i, &y) in table.iter().enumerate() {
            let slot = inverse_table
                .get_mut(y as usize)
                .ok_or_else(|| Error::param("table", format!("image {y} out of range")))?;
            if *slot != u64::MAX {
                return Err(Error::param("table", format!("image {y} repeated")));
            }
            *slot = i as u64;
        }
        Ok(Self {
            width,
            table,
            inverse_table,
        })
    }

    pub fn identity(width: u32) -> Result<Self> {
        let size = check_width(width)?;
        let table: Vec<u64> = (0..size as u64).collect();
        Ok(Self {
            width,
            inverse_table: table.clone(),
            table,
        })
    }

    /// Evaluates `perm` on the whole domain.
    pub fn tabulate<P: Permutation + ?Sized>(perm: &P) -> Result<Self> {
        let size = check_width(perm.width())?;
        Self::from_table(perm.width(), (0..size as u64).map(|x| perm.forward(x)).collect())
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn inverse_table(&self) -> &[u64] {
        &self.inverse_table
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.table.len()];
        let mut lengths = Vec::new();
        for start in 0..self.table.len() {
            let mut len = 0;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.table[cur] as usize;
                len += 1;
            }
            if len > 0 {
                lengths.push(len);
            }
        }
        lengths.sort_unstable();
        lengths
    }
}

impl Permutation for ExplicitPerm {
    fn width(&self) -> u32 {
        self.width
    }

    fn forward(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    fn inverse(&self, y: u64) -> u64 {
        self.inverse_table[y as usize]
    }
}

/// Uniformly random permutation of `{0,1}^width` by Fisher–Yates.
pub fn sample_random_perm<R: Rng + ?Sized>(width: u32, rng: &mut R) -> Result<ExplicitPerm> {
    if width > 20 {
        return Err(Error::DimensionTooLarge { qubits: width, limit: 20 });
    }
    let size = 1usize << width;
    let mut table: Vec<u64> = (0..size as u64).collect();
    table.shuffle(rng);
    let mut inverse_table = vec![0u64; size];
    for (i, &y) in table.iter().enumerate() {
        inverse_table[y as usize] = i as u64;
    }
    Ok(ExplicitPerm {
        width,
        table,
        inverse_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn rejects_non_bijections() {
        assert!(ExplicitPerm::from_table(1, vec![0, 0]).is_err());
        assert!(ExplicitPerm::from_table(1, vec![0, 2]).is_err());
        assert!(ExplicitPerm::from_table(2, vec![0, 1]).is_err());
    }

    #[test]
    fn random_perm_is_consistent() {
        let p = sample_random_perm(10, &mut seeded(4)).unwrap();
        for x in 0..1024 {
            assert_eq!(p.inverse(p.forward(x)), x);
        }
        let mut image = p.table().to_vec();
        image.sort_unstable();
        assert_eq!(image, (0..1024).collect::<Vec<_>>());
    }

    #[test]
    fn width_one_hits_both_permutations() {
        let mut rng = seeded(8);
        let mut ids = 0;
        for _ in 0..1000 {
            if sample_random_perm(1, &mut rng).unwrap().forward(0) == 0 {
                ids += 1;
            }
        }
        assert!((ids as f64 - 500.0).abs() < 3.0 * 250f64.sqrt());
    }

    #[test]
    fn too_wide() {
        assert!(matches!(
            sample_random_perm(21, &mut seeded(0)),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
