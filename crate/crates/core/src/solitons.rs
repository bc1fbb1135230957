//! Focusing soliton family and its closed-form spectra.
//!
//! `u_{N,lambda}(x, t) = e^{i t (N^3 - 3 N lambda^2) + i N x} lambda sech(lambda (x + 3 N^2 t - lambda^2 t))`
//! solves `u_t + u_xxx + 6 |u|^2 u_x = 0` exactly for every real `N` and
//! `lambda > 0`. The unit prefactor is forced by the coefficient 6: the profile
//! equation `-Q + Q'' + 2 Q^3 = 0` differentiates to `-Q' + Q''' + 6 Q^2 Q' = 0`,
//! which fixes `|u|^2 = Q_lambda^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{bracket, CubeMasses, Exponent};
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::spectral::{forward_transform, Field, GridSpec, Window};

/// Smallest admissible `lambda L`.
pub const MIN_SCALE_LENGTH: f64 = 40.0;

/// Spectral half-width, in units of `lambda`, beyond which `|u_hat|` is below
/// `1e-16` of its peak.
pub const SPECTRAL_RADIUS: f64 = 24.0;

#[inline]
fn sech(x: f64) -> f64 {
    // 1/cosh overflows gracefully to 0 for |x| > 710
    1.0 / x.cosh()
}

/// Ground state `Q = sech`, solving `-Q + Q'' + 2 Q^3 = 0`.
pub fn ground_state(x: f64) -> f64 {
    sech(x)
}

/// `-Q + Q'' + 2 Q^3` with `Q'' = sech - 2 sech^3` written out.
pub fn ground_state_residual(x: f64) -> f64 {
    let q = sech(x);
    let tanh = x.tanh();
    let second = q * tanh * tanh - q * q * q;
    -q + second + 2.0 * q * q * q
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    /// Carrier frequency `N`.
    pub carrier: f64,
    /// Scale `lambda`.
    pub scale: f64,
}

impl SolitonParams {
    pub fn new(carrier: f64, scale: f64) -> Result<Self> {
        if !carrier.is_finite() {
            return Err(Error::param("N", format!("{carrier} is not finite")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("lambda", format!("{scale} must be positive")));
        }
        Ok(SolitonParams { carrier, scale })
    }

    pub fn amplitude(&self) -> f64 {
        self.scale
    }

    /// Envelope center at time `t` on the real line.
    pub fn center(&self, t: f64) -> f64 {
        -(3.0 * self.carrier * self.carrier - self.scale * self.scale) * t
    }

    fn phase(&self, t: f64) -> f64 {
        let (n, l) = (self.carrier, self.scale);
        t * (n * n * n - 3.0 * n * l * l)
    }

    /// `int lambda^2 sech^2(lambda x) dx = 2 lambda`.
    pub fn mass(&self) -> f64 {
        2.0 * self.scale
    }

    /// `int Im(conj(u) u_x) = 2 N lambda`.
    pub fn momentum(&self) -> f64 {
        2.0 * self.carrier * self.scale
    }

    /// Exact value on the real line.
    pub fn value(&self, x: f64, t: f64) -> Complex64 {
        let envelope = self.amplitude() * sech(self.scale * (x - self.center(t)));
        Complex64::from_polar(envelope, self.phase(t) + self.carrier * x)
    }

    /// Exact `u_t` on the real line.
    pub fn time_derivative(&self, x: f64, t: f64) -> Complex64 {
        let (n, l) = (self.carrier, self.scale);
        let y = l * (x - self.center(t));
        let carrier = Complex64::from_polar(self.amplitude(), self.phase(t) + n * x);
        let envelope = sech(y);
        let envelope_t = -envelope * y.tanh() * l * (3.0 * n * n - l * l);
        carrier * (Complex64::i() * (n * n * n - 3.0 * n * l * l) * envelope + envelope_t)
    }

    /// `u_hat(xi, t)`; its modulus `pi sech(pi (xi - N) / (2 lambda))` does
    /// not depend on `t`.
    pub fn spectrum(&self, xi: f64, t: f64) -> Complex64 {
        let (n, l) = (self.carrier, self.scale);
        let modulus = PI * sech(PI * (xi - n) / (2.0 * l));
        Complex64::from_polar(
            modulus,
            self.phase(t) + (xi - n) * (3.0 * n * n - l * l) * t,
        )
    }

    /// Closed-form `|u_hat(xi)|^2`.
    pub fn spectral_density(&self, xi: f64) -> f64 {
        let s = sech(PI * (xi - self.carrier) / (2.0 * self.scale));
        PI * PI * s * s
    }

    /// Frequency interval outside which the spectrum is negligible.
    pub fn band(&self) -> (f64, f64) {
        let r = SPECTRAL_RADIUS * self.scale;
        (self.carrier - r, self.carrier + r)
    }
}

/// `|a_hat(xi, t) - b_hat(xi, t)|^2`, evaluated through the relative phase so
/// the large common phase `(xi - N) (3 N^2 - lambda^2) t` never enters.
pub fn difference_density(a: &SolitonParams, b: &SolitonParams, t: f64) -> impl Fn(f64) -> f64 {
    let (a, b) = (*a, *b);
    let speed = |p: &SolitonParams| (3.0 * p.carrier * p.carrier - p.scale * p.scale) * t;
    let slope = 3.0 * (a.carrier - b.carrier) * (a.carrier + b.carrier) * t
        - (a.scale - b.scale) * (a.scale + b.scale) * t;
    let offset = (a.phase(t) - b.phase(t) + (b.carrier - a.carrier) * speed(&b)).rem_euclid(2.0 * PI);
    move |xi| {
        let (ma, mb) = (soliton_spectrum(&a, xi), soliton_spectrum(&b, xi));
        let half = 0.5 * (offset + (xi - a.carrier) * slope);
        (ma - mb).powi(2) + 4.0 * ma * mb * half.sin().powi(2)
    }
}

/// `|u_hat(xi)|` for the soliton.
pub fn soliton_spectrum(params: &SolitonParams, xi: f64) -> f64 {
    params.spectral_density(xi).sqrt()
}

/// Realization frame `g(x) = e^{-i K x} u(x + x0)`: an integer carrier `K`
/// removed and the origin moved to `x0`. Cube `n` of `u` is cube `n - K` of `g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub carrier: i64,
    pub origin: f64,
}

impl Frame {
    pub fn new(carrier: i64, origin: f64) -> Self {
        Frame { carrier, origin }
    }
}

/// Wraps `y` into `[-L/2, L/2)`.
fn wrap(y: f64, length: f64) -> f64 {
    y - length * (y / length + 0.5).floor()
}

fn check_realizable(params: &SolitonParams, grid: &GridSpec, frame: Frame) -> Result<()> {
    if params.scale * grid.length() < MIN_SCALE_LENGTH {
        return Err(Error::param(
            "L",
            format!(
                "lambda L = {:.3} below {MIN_SCALE_LENGTH}; need L >= {:.1}",
                params.scale * grid.length(),
                MIN_SCALE_LENGTH / params.scale
            ),
        ));
    }
    let reach = (params.carrier - frame.carrier as f64).abs() + 10.0 * params.scale;
    if reach > grid.nyquist() {
        return Err(Error::OutsideBand {
            requested: reach,
            nyquist: grid.nyquist(),
        });
    }
    Ok(())
}

/// Samples the soliton at time `t`. The envelope is wrapped around the
/// period, with the carrier phase continued through the wrap so the sample is
/// the exact solution seen from its own center.
pub fn soliton_field(params: &SolitonParams, t: f64, grid: &GridSpec) -> Result<Field> {
    soliton_field_in_frame(params, t, grid, Frame::default())
}

pub fn soliton_field_in_frame(
    params: &SolitonParams,
    t: f64,
    grid: &GridSpec,
    frame: Frame,
) -> Result<Field> {
    check_realizable(params, grid, frame)?;
    let center = params.center(t) - frame.origin;
    let length = grid.length();
    let amplitude = params.amplitude();
    let phase0 = params.phase(t) + params.carrier * frame.origin;
    let shift = params.carrier - frame.carrier as f64;
    Ok(Field::from_fn(*grid, |x| {
        let y = wrap(x - center, length);
        // x = center + y on the unwrapped line
        let envelope = amplitude * sech(params.scale * y);
        Complex64::from_polar(envelope, phase0 + shift * (center + y))
    }))
}

/// `(2 pi)^{-1} int psi(xi - n)^2 rho(xi) dxi` for every cube `n` in
/// `first..=last`, splitting each integral at the integer knots and at the
/// extra `breaks` (jumps or kinks of `rho`).
pub fn quadrature_cube_masses(
    density: impl Fn(f64) -> f64,
    first: i64,
    last: i64,
    window: Window,
    breaks: &[f64],
    rel_tol: f64,
) -> CubeMasses {
    // cells far below the total are only needed to an absolute accuracy
    let total: f64 = ((first - 1)..=last)
        .map(|k| integrate(&density, k as f64, k as f64 + 1.0, 0.0, 1e-3).abs())
        .sum();
    let floor = rel_tol * total * 1e-2;
    // integrals over [k, k + 1] of psi(. - k)^2 rho and psi(. - k - 1)^2 rho
    let unit = |k: i64| -> (f64, f64) {
        let (a, b) = (k as f64, k as f64 + 1.0);
        let piece = |n: i64| {
            integrate_with_breaks(|xi| window.at(xi, n).powi(2) * density(xi), a, b, breaks, floor, rel_tol)
        };
        (piece(k), piece(k + 1))
    };
    let mut masses = vec![0.0; (last - first + 1) as usize];
    for k in (first - 1)..=last {
        let (lower, upper) = unit(k);
        if k >= first {
            masses[(k - first) as usize] += lower / (2.0 * PI);
        }
        if k + 1 <= last {
            masses[(k + 1 - first) as usize] += upper / (2.0 * PI);
        }
    }
    CubeMasses { first, masses }
}

/// Semi-analytic `M^{2,p}_s` norm of the soliton from its closed-form
/// spectrum; no grid is involved.
pub fn soliton_modulation_norm(params: &SolitonParams, s: f64, p: Exponent) -> f64 {
    soliton_modulation_norm_with(params, s, p, Window::CosSquared)
}

pub fn soliton_modulation_norm_with(
    params: &SolitonParams,
    s: f64,
    p: Exponent,
    window: Window,
) -> f64 {
    let (lo, hi) = params.band();
    let masses = quadrature_cube_masses(
        |xi| params.spectral_density(xi),
        lo.floor() as i64,
        hi.ceil() as i64,
        window,
        &[],
        1e-12,
    );
    masses.weighted_norm(s, p, 0)
}

/// `|<Pi_n a(t), Pi_n b(t)>_{L^2}|` for every cube, from two realizations in a
/// shared frame. Returned cube indices are in the original (unshifted)
/// frequency variable.
pub fn pair_overlaps(
    a: &SolitonParams,
    b: &SolitonParams,
    t: f64,
    grid: &GridSpec,
    frame: Frame,
) -> Result<Vec<(i64, f64)>> {
    let fa = forward_transform(&soliton_field_in_frame(a, t, grid, frame)?)?;
    let fb = forward_transform(&soliton_field_in_frame(b, t, grid, frame)?)?;
    let top = grid.nyquist().ceil() as i64 + 1;
    let mut sums = vec![Complex64::new(0.0, 0.0); (2 * top + 1) as usize];
    let window = Window::CosSquared;
    for (i, (x, y)) in fa.coefficients().iter().zip(fb.coefficients()).enumerate() {
        let product = x * y.conj();
        if product == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (n, w) in window.split(grid.frequency(i)) {
            if w > 0.0 {
                sums[(n + top) as usize] += product * (w * w);
            }
        }
    }
    let scale = grid.dxi() / (2.0 * PI);
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(j, z)| (j as i64 - top + frame.carrier, z.norm() * scale))
        .collect())
}

/// Overlap at a single cube `n`.
pub fn pair_overlap(
    n: i64,
    a: &SolitonParams,
    b: &SolitonParams,
    t: f64,
    grid: &GridSpec,
    frame: Frame,
) -> Result<f64> {
    Ok(pair_overlaps(a, b, t, grid, frame)?
        .into_iter()
        .find(|&(m, _)| m == n)
        .map_or(0.0, |(_, v)| v))
}

/// Largest cube overlap and where it occurs.
pub fn max_pair_overlap(
    a: &SolitonParams,
    b: &SolitonParams,
    t: f64,
    grid: &GridSpec,
    frame: Frame,
) -> Result<(i64, f64)> {
    Ok(pair_overlaps(a, b, t, grid, frame)?
        .into_iter()
        .fold((0, -1.0), |acc, (n, v)| if v > acc.1 { (n, v) } else { acc }))
}

/// `<n>^s` weight helper re-exported for the soliton tables.
pub fn cube_weight(n: i64, s: f64) -> f64 {
    bracket(n as f64).powf(s)
}
