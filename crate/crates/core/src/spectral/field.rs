use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Complex samples `u(x_j)` on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

/// Continuum-normalized spectrum `u_hat(xi_k) ~ int u(x) e^{-i xi_k x} dx`,
/// stored in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coefficients: Vec<Complex64>,
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_len(grid: &GridSpec, len: usize) -> Result<()> {
    if len == grid.points() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!(
            "{} samples supplied for {grid}",
            len
        )))
    }
}

impl Field {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, samples.len())?;
        check_finite(&samples)?;
        Ok(Field { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Field {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    /// Samples `f` at the grid coordinates.
    pub fn from_fn(grid: GridSpec, f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = grid.coordinates().map(f).collect();
        Field { grid, samples }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `int |u|^2 dx` by the rectangle rule (exact for trigonometric data).
    pub fn mass(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `int u conj(v) dx`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(sum * self.grid.dx())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product; aliasing is the caller's concern.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `||self - other|| / ||other||` in L^2.
    pub fn relative_l2_error(&self, reference: &Field) -> Result<f64> {
        let diff = self.sub(reference)?;
        Ok(diff.l2_norm() / reference.l2_norm())
    }
}

impl SpectralField {
    pub fn new(grid: GridSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coefficients.len())?;
        check_finite(&coefficients)?;
        Ok(SpectralField { grid, coefficients })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coefficients: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    /// Samples a continuum spectrum on the frequency lattice.
    pub fn from_fn(grid: GridSpec, f: impl FnMut(f64) -> Complex64) -> Self {
        let coefficients = grid.frequencies().map(f).collect();
        SpectralField { grid, coefficients }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    /// Coefficient at signed lattice index `k`, zero off the lattice.
    pub fn at(&self, k: i64) -> Complex64 {
        self.grid
            .slot(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coefficients[i])
    }

    /// Multiplies every coefficient by `m(xi_k)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> SpectralField {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(self.grid.frequency(i)))
            .collect();
        SpectralField {
            grid: self.grid,
            coefficients,
        }
    }

    pub fn apply_real_multiplier(&self, m: impl Fn(f64) -> f64) -> SpectralField {
        self.apply_multiplier(|xi| Complex64::new(m(xi), 0.0))
    }

    /// `(2 pi)^{-1} sum |u_hat|^2 dxi`, which equals the physical mass.
    pub fn mass(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dxi()
            / (2.0 * PI)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.ensure_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coefficients: self.coefficients.iter().map(|z| z * c).collect(),
        }
    }

    /// Largest `|xi_k|` carrying a coefficient above `rel` times the peak.
    pub fn effective_band(&self, rel: f64) -> f64 {
        let peak = self.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > rel * peak)
            .map(|(i, _)| self.grid.frequency(i).abs())
            .fold(0.0, f64::max)
    }
}

/// `(-1)^k` phase relating the DFT to the centered continuum transform.
#[inline]
fn centering_sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Continuum-normalized transform `u_hat(xi_k) = dx sum_j u(x_j) e^{-i xi_k x_j}`.
pub fn forward_transform(f: &Field) -> Result<SpectralField> {
    check_finite(&f.samples)?;
    let mut buf = f.samples.clone();
    fft::forward(&mut buf);
    let dx = f.grid.dx();
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= dx * centering_sign(i);
    }
    Ok(SpectralField {
        grid: f.grid,
        coefficients: buf,
    })
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &SpectralField) -> Result<Field> {
    check_finite(&spectrum.coefficients)?;
    let mut buf: Vec<Complex64> = spectrum
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, &c)| c * centering_sign(i))
        .collect();
    fft::inverse(&mut buf);
    let scale = 1.0 / spectrum.grid.length();
    for c in buf.iter_mut() {
        *c *= scale;
    }
    Ok(Field {
        grid: spectrum.grid,
        samples: buf,
    })
}

/// Multiplies by `(i xi)^order`.
pub fn spatial_derivative(spectrum: &SpectralField, order: u32) -> SpectralField {
    let i = Complex64::new(0.0, 1.0);
    spectrum.apply_multiplier(|xi| (i * xi).powu(order))
}

/// Physical-space convenience wrapper around [`spatial_derivative`].
pub fn derivative(f: &Field, order: u32) -> Result<Field> {
    inverse_transform(&spatial_derivative(&forward_transform(f)?, order))
}
