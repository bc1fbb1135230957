use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible frequency spacing: at least eight lattice samples per
/// unit frequency cube.
pub const MAX_FREQUENCY_SPACING: f64 = 0.125;

/// Periodic grid `[-L/2, L/2)` with `M` equispaced points, standing in for the
/// real line.
///
/// The dual lattice is `xi_k = 2 pi k / L` for `k` in `[-M/2, M/2)`. Spectral
/// data are stored in FFT order, so index `i` carries `k = i` for `i < M/2`
/// and `k = i - M` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    length: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length {length} must be positive")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count {points} must be a power of two >= 2"
            )));
        }
        let grid = GridSpec { length, points };
        if grid.dxi() > MAX_FREQUENCY_SPACING {
            return Err(Error::InvalidGrid(format!(
                "frequency spacing {:.4} exceeds {MAX_FREQUENCY_SPACING}; use L >= {:.2}",
                grid.dxi(),
                2.0 * PI / MAX_FREQUENCY_SPACING
            )));
        }
        Ok(grid)
    }

    /// Smallest grid with `L = 2 pi 2^j >= min_length` and Nyquist frequency
    /// at least `min_nyquist`. The lattice spacing `2^-j` puts every integer
    /// on the lattice, so cube edges and integer carriers are exact.
    pub fn covering(min_length: f64, min_nyquist: f64) -> Result<Self> {
        let length = 2.0
            * PI
            * (min_length.max(2.0 * PI / MAX_FREQUENCY_SPACING) / (2.0 * PI))
                .log2()
                .ceil()
                .exp2();
        let points = ((length * min_nyquist / PI).ceil() as usize)
            .max(2)
            .next_power_of_two();
        GridSpec::new(length, points)
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    #[inline]
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Magnitude of the most negative lattice frequency, `pi M / L`.
    #[inline]
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// Physical coordinate of sample `j`.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    /// Signed lattice index of FFT slot `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Lattice frequency of FFT slot `i`.
    #[inline]
    pub fn frequency(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.dxi()
    }

    /// FFT slot holding signed lattice index `k`, if it is on the lattice.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.points as i64) as usize)
        }
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.frequency(i))
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| self.x(j))
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} M={}", self.length, self.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let g = GridSpec::new(128.0, 1024).unwrap();
        assert_eq!(g.dx() * 1024.0, 128.0);
        assert!((g.dxi() * 1024.0 - 2.0 * g.nyquist()).abs() < 1e-12);
        assert_eq!(g.x(0), -64.0);
        assert_eq!(g.wavenumber(511), 511);
        assert_eq!(g.wavenumber(512), -512);
        assert_eq!(g.slot(-512), Some(512));
        assert_eq!(g.slot(512), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(128.0, 1000).is_err());
        assert!(GridSpec::new(-1.0, 1024).is_err());
        // 2 pi / 32 > 1/8
        assert!(GridSpec::new(32.0, 1024).is_err());
    }

    #[test]
    fn covering_grid_meets_both_bounds() {
        let g = GridSpec::covering(300.0, 20.0).unwrap();
        assert!(g.length() >= 300.0);
        assert!(g.nyquist() >= 20.0);
        assert_eq!(g.length(), 2.0 * PI * 64.0);
        assert_eq!(g.dxi(), 1.0 / 64.0);
        assert!(g.slot(64 * 7).is_some());
    }
}
