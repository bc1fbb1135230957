//! Time-windowed trajectories and their space-time spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{fft_forward, forward_transform, inverse_transform, Field, GridSpec};

/// Smooth temporal window on `[0, T_w]`: `sin^2` ramps over the first and last
/// `shoulder * T_w`, one in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalCutoff {
    pub shoulder: f64,
}

impl Default for TemporalCutoff {
    fn default() -> Self {
        TemporalCutoff { shoulder: 0.1 }
    }
}

/// `(e^{ix} - 1) / (ix)` without cancellation near zero.
fn phase_average(x: f64) -> Complex64 {
    if x.abs() < 1e-8 {
        return Complex64::new(1.0 - x * x / 6.0, x / 2.0);
    }
    let half = 0.5 * x;
    Complex64::new(x.sin() / x, 2.0 * half.sin() * half.sin() / x)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl TemporalCutoff {
    pub fn eval(&self, t: f64, window: f64) -> f64 {
        let a = self.shoulder * window;
        if !(0.0..=window).contains(&t) {
            0.0
        } else if t < a {
            (0.5 * PI * t / a).sin().powi(2)
        } else if t > window - a {
            (0.5 * PI * (window - t) / a).sin().powi(2)
        } else {
            1.0
        }
    }

    /// Fourier coefficients of the ramp power `sin^{2q}(pi t / 2a)` written as
    /// `sum_l c_l e^{i l pi t / a}`, `l = -q..=q`.
    fn ramp_series(power: u32) -> Vec<(i32, f64)> {
        // ((1 - cos phi) / 2)^q = 2^-q sum_r C(q, r) (-1)^r cos^r phi
        let q = power;
        let mut coeffs = vec![0.0; (2 * q + 1) as usize];
        for r in 0..=q {
            let outer = binomial(q, r) * if r % 2 == 0 { 1.0 } else { -1.0 } / 2f64.powi(q as i32);
            for j in 0..=r {
                let l = r as i32 - 2 * j as i32;
                coeffs[(l + q as i32) as usize] += outer * binomial(r, j) / 2f64.powi(r as i32);
            }
        }
        coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i32 - q as i32, c))
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    /// `int_0^{T_w} eta(t)^power e^{i omega t} dt` in closed form.
    pub fn power_transform(&self, power: u32, omega: f64, window: f64) -> Complex64 {
        let a = self.shoulder * window;
        let series = Self::ramp_series(power);
        let ramp = |w: f64| -> Complex64 {
            series
                .iter()
                .map(|&(l, c)| c * a * phase_average((w + l as f64 * PI / a) * a))
                .sum()
        };
        let rising = ramp(omega);
        let falling = Complex64::from_polar(1.0, omega * window) * ramp(-omega);
        let flat_len = window - 2.0 * a;
        let flat = Complex64::from_polar(1.0, omega * a) * flat_len * phase_average(omega * flat_len);
        rising + flat + falling
    }
}

/// `K` snapshots `u(t_j)`, `t_j = t0 + j T_w / K`, on a shared grid.
///
/// Samples are stored raw; the cutoff is applied inside every space-time
/// transform, so products of trajectories carry a single cutoff factor.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    grid: GridSpec,
    start: f64,
    window: f64,
    samples: Vec<Field>,
    cutoff: TemporalCutoff,
}

impl SpaceTimeField {
    pub fn new(start: f64, window: f64, samples: Vec<Field>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::param("K", "need at least two snapshots"));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::param("window", format!("{window} must be positive")));
        }
        let grid = *samples[0].grid();
        for s in &samples[1..] {
            grid.ensure_same(s.grid())?;
        }
        Ok(SpaceTimeField {
            grid,
            start,
            window,
            samples,
            cutoff: TemporalCutoff::default(),
        })
    }

    /// Free Airy evolution `e^{-t d_x^3} f` sampled on `[0, T_w)`.
    pub fn free_evolution(f: &Field, window: f64, k: usize) -> Result<Self> {
        let spectrum = forward_transform(f)?;
        let dt = window / k as f64;
        let samples = (0..k)
            .map(|j| {
                let t = j as f64 * dt;
                inverse_transform(&crate::spectral::airy_propagator_spectral(&spectrum, t))
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(0.0, window, samples)
    }

    pub fn with_cutoff(mut self, cutoff: TemporalCutoff) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Field] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn dt(&self) -> f64 {
        self.window / self.samples.len() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + j as f64 * self.dt()
    }

    pub fn cutoff(&self) -> TemporalCutoff {
        self.cutoff
    }

    pub fn cutoff_at(&self, j: usize) -> f64 {
        self.cutoff.eval(j as f64 * self.dt(), self.window)
    }

    /// Snapshot-wise combination of two trajectories on the same time lattice.
    pub fn zip_with(
        &self,
        other: &SpaceTimeField,
        f: impl Fn(&Field, &Field) -> Result<Field>,
    ) -> Result<SpaceTimeField> {
        if self.samples.len() != other.samples.len()
            || self.window != other.window
            || self.start != other.start
        {
            return Err(Error::param("K", "time lattices differ"));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpaceTimeField {
            samples,
            ..self.clone()
        })
    }

    pub fn map(&self, f: impl Fn(&Field) -> Result<Field>) -> Result<SpaceTimeField> {
        let samples = self.samples.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(SpaceTimeField {
            samples,
            ..self.clone()
        })
    }

    /// `|| eta u ||_{L^2_{x,t}}` by the rectangle rule in time.
    pub fn l2_norm(&self) -> f64 {
        let dt = self.dt();
        ((0..self.samples.len())
            .map(|j| self.cutoff_at(j).powi(2) * self.samples[j].mass())
            .sum::<f64>()
            * dt)
            .sqrt()
    }

    /// Interaction-picture space-time spectrum of `eta u`.
    ///
    /// For every lattice frequency `xi_k` the samples are demodulated by
    /// `e^{-i xi_k^3 t}` before the temporal transform, so the temporal
    /// lattice indexes the modulation `sigma = tau - xi^3` directly and the
    /// free-wave part sits at `sigma = 0` however large `xi^3` is.
    pub fn spectrum(&self) -> Result<SpaceTimeSpectrum> {
        let m = self.grid.points();
        let k = self.samples.len();
        let dt = self.dt();
        let spectra = self
            .samples
            .iter()
            .map(forward_transform)
            .collect::<Result<Vec<_>>>()?;
        let cut: Vec<f64> = (0..k).map(|j| self.cutoff_at(j)).collect();
        let mut power = vec![0.0; m * k];
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..m {
            let xi = self.grid.frequency(i);
            let cube = xi * xi * xi;
            for j in 0..k {
                let t = self.time(j);
                buf[j] = spectra[j].coefficients()[i] * cut[j] * Complex64::from_polar(1.0, -cube * t);
            }
            fft_forward(&mut buf);
            let row = &mut power[i * k..(i + 1) * k];
            for (p, c) in row.iter_mut().zip(&buf) {
                *p = c.norm_sqr() * dt * dt;
            }
        }
        Ok(SpaceTimeSpectrum {
            grid: self.grid,
            window: self.window,
            time_points: k,
            power,
        })
    }
}

/// `|F_{x,t}(eta u)(xi_k, xi_k^3 + sigma_m)|^2` on the lattice
/// `sigma_m = 2 pi m / T_w`, row-major in `(k, m)` with both axes in FFT order.
#[derive(Clone, Debug)]
pub struct SpaceTimeSpectrum {
    grid: GridSpec,
    window: f64,
    time_points: usize,
    power: Vec<f64>,
}

/// Fraction of energy allowed in the outer tenth of the temporal band.
pub const TEMPORAL_EDGE_TOLERANCE: f64 = 1e-8;

impl SpaceTimeSpectrum {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dsigma(&self) -> f64 {
        2.0 * PI / self.window
    }

    pub fn time_points(&self) -> usize {
        self.time_points
    }

    pub fn sigma(&self, m: usize) -> f64 {
        let k = self.time_points;
        let signed = if m < k / 2 { m as i64 } else { m as i64 - k as i64 };
        signed as f64 * self.dsigma()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.power[i * self.time_points..(i + 1) * self.time_points]
    }

    /// Rejects spectra with more than [`TEMPORAL_EDGE_TOLERANCE`] of their
    /// energy in `|sigma| > 0.9 sigma_nyquist`.
    pub fn check_temporal_resolution(&self) -> Result<()> {
        let k = self.time_points;
        let edge = 0.9 * PI * k as f64 / self.window;
        let mut total = 0.0;
        let mut outer = 0.0;
        for i in 0..self.grid.points() {
            for (m, &p) in self.row(i).iter().enumerate() {
                total += p;
                if self.sigma(m).abs() > edge {
                    outer += p;
                }
            }
        }
        if total > 0.0 && outer > TEMPORAL_EDGE_TOLERANCE * total {
            return Err(Error::TemporalResolution {
                edge_energy: outer / total,
                required_k: 2 * k,
            });
        }
        Ok(())
    }

    /// `(2 pi)^{-2} sum_m <sigma_m>^{2b} |.|^2 dsigma` for row `i`.
    pub fn modulation_weighted_row(&self, i: usize, b: f64) -> f64 {
        let dsigma = self.dsigma();
        self.row(i)
            .iter()
            .enumerate()
            .map(|(m, &p)| {
                let s = self.sigma(m);
                (1.0 + s * s).powf(b) * p
            })
            .sum::<f64>()
            * dsigma
            / (4.0 * PI * PI)
    }
}

/// Uniform time lattice used by trajectories: `K` samples over `[0, T_w)`.
pub fn time_lattice(window: f64, k: usize) -> Vec<f64> {
    (0..k).map(|j| j as f64 * window / k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn cutoff_shape() {
        let c = TemporalCutoff::default();
        assert_eq!(c.eval(0.0, 2.0), 0.0);
        assert_eq!(c.eval(1.0, 2.0), 1.0);
        assert!((c.eval(0.1, 2.0) - 0.5).abs() < 1e-15);
        assert!(c.eval(2.0, 2.0).abs() < 1e-15);
        assert_eq!(c.eval(-0.1, 2.0), 0.0);
    }

    #[test]
    fn power_transform_matches_quadrature() {
        let c = TemporalCutoff::default();
        let window = 1.3;
        for power in [1u32, 2, 4] {
            for omega in [0.0, 1e-9, 0.7, 13.0, 250.0, -41.0, 3.0e4] {
                let closed = c.power_transform(power, omega, window);
                let f = |t: f64, part: usize| {
                    let e = c.eval(t, window).powi(power as i32);
                    if part == 0 { e * (omega * t).cos() } else { e * (omega * t).sin() }
                };
                let a = 0.1 * window;
                let mut re = 0.0;
                let mut im = 0.0;
                // integrate piecewise so the kinks are nodes, subdividing for oscillation
                let pieces = [(0.0, a), (a, window - a), (window - a, window)];
                for &(lo, hi) in &pieces {
                    let n = ((omega.abs() * (hi - lo)) / 2.0).ceil().max(1.0) as usize;
                    for s in 0..n {
                        let x0 = lo + (hi - lo) * s as f64 / n as f64;
                        let x1 = lo + (hi - lo) * (s + 1) as f64 / n as f64;
                        re += integrate(|t| f(t, 0), x0, x1, 1e-15, 1e-13);
                        im += integrate(|t| f(t, 1), x0, x1, 1e-15, 1e-13);
                    }
                }
                let q = Complex64::new(re, im);
                assert!(
                    (closed - q).norm() < 1e-10 * (1.0 + q.norm()),
                    "power {power} omega {omega}: {closed} vs {q}"
                );
            }
        }
    }

    #[test]
    fn free_evolution_sits_on_the_dispersion_surface() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let f = Field::from_fn(grid, |x| Complex64::from_polar((-x * x / 8.0).exp(), 3.0 * x));
        let u = SpaceTimeField::free_evolution(&f, 1.0, 256).unwrap();
        let spec = u.spectrum().unwrap();
        spec.check_temporal_resolution().unwrap();
        // every row is |f_hat|^2 |eta_hat(sigma)|^2: peak at sigma = 0
        let fs = forward_transform(&f).unwrap();
        for i in 0..grid.points() {
            if fs.coefficients()[i].norm() < 1e-3 {
                continue;
            }
            let row = spec.row(i);
            let (argmax, _) = row
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (m, &p)| if p > acc.1 { (m, p) } else { acc });
            assert_eq!(argmax, 0);
        }
    }

    #[test]
    fn undersampled_time_is_rejected() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let f = Field::from_fn(grid, |x| Complex64::from_polar((-x * x / 8.0).exp(), 3.0 * x));
        // sixteen samples cannot resolve the cutoff's own spectrum
        let u = SpaceTimeField::free_evolution(&f, 1.0, 16).unwrap();
        assert!(matches!(
            u.spectrum().unwrap().check_temporal_resolution(),
            Err(Error::TemporalResolution { required_k: 32, .. })
        ));
    }
}
