use crate::error::{Error, Result};

/// The odd grid dimension N with its derived quantities ell = (N-1)/2 and
/// a = 1/(2N). All grids in the toolkit are indexed by integer coordinates
/// in [-ell, ell]; the storage index is coordinate + ell. This type is the
/// single authority for that mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeDims {
    n: u64,
}

impl LatticeDims {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidDimension { n });
        }
        Ok(LatticeDims { n })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }

    pub fn ell(&self) -> i64 {
        ((self.n - 1) / 2) as i64
    }

    /// The lattice constant a = 1/(2N); 2*N*a == 1 exactly in IEEE for the
    /// dimensions used here (checked in tests).
    pub fn a(&self) -> f64 {
        1.0 / (2.0 * self.n_f64())
    }

    /// Reduce any integer into the canonical window [-ell, ell] modulo N.
    pub fn wrap(&self, k: i64) -> i64 {
        let n = self.n as i64;
        (k + self.ell()).rem_euclid(n) - self.ell()
    }

    /// Storage index of an arbitrary integer coordinate (wrapped first).
    pub fn idx(&self, k: i64) -> usize {
        (self.wrap(k) + self.ell()) as usize
    }

    /// Checked storage index: errors instead of wrapping when the coordinate
    /// is outside [-ell, ell].
    pub fn idx_checked(&self, name: &'static str, k: i64) -> Result<usize> {
        if k.abs() > self.ell() {
            return Err(Error::IndexOutOfRange {
                name,
                value: k,
                ell: self.ell(),
            });
        }
        Ok((k + self.ell()) as usize)
    }

    /// Coordinates -ell..=ell in storage order.
    pub fn range(&self) -> impl Iterator<Item = i64> + Clone {
        -self.ell()..=self.ell()
    }

    /// Row-major grid sweep from (-ell, -ell): the first coordinate is the
    /// slow axis, matching the export schema.
    pub fn grid(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let r = self.range();
        self.range().flat_map(move |i| r.clone().map(move |j| (i, j)))
    }
}
