//! Sobolev, Fourier-Lebesgue, modulation and X^{s,b}-type norms.
//!
//! Conventions: `u_hat(xi) = int u(x) e^{-i xi x} dx`, so
//! `||u||_{L^2} = (2 pi)^{-1/2} ||u_hat||_{L^2}`. The Sobolev and modulation
//! norms carry that factor and are directly comparable; the Fourier-Lebesgue
//! norm is the raw `L^p_xi` norm of `<xi>^s u_hat` and at `p = 2` equals
//! `(2 pi)^{1/2}` times the Sobolev norm.
//!
//! Modulation norms use the smooth windows `psi(xi - n)`; the `X^{s,b}_p`
//! blocks use sharp cubes `[n, n + 1)`. The two conventions agree up to a
//! bounded factor.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spacetime::{SpaceTimeField, SpaceTimeSpectrum};
use crate::spectral::{forward_transform, Field, SpectralField, Window};

/// Lebesgue exponent in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::param("p", format!("{p} not in [1, inf]")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Hoelder conjugate.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// `(sum w_i x_i^p)^{1/p}` over nonnegative `x_i`, or `max x_i` at infinity
    /// (weights then multiply inside the max).
    pub fn weighted_sum<I>(self, terms: I) -> f64
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        match self {
            Exponent::Infinity => terms.into_iter().map(|(w, x)| w * x).fold(0.0, f64::max),
            Exponent::Finite(p) => {
                let sum: f64 = terms.into_iter().map(|(w, x)| w.powf(p) * x.powf(p)).sum();
                sum.powf(1.0 / p)
            }
        }
    }

    /// Plain `l^p` norm of a sequence.
    pub fn norm_of<I>(self, values: I) -> f64
    where
        I: IntoIterator<Item = f64>,
    {
        self.weighted_sum(values.into_iter().map(|v| (1.0, v.abs())))
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" => Ok(Exponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::param("p", format!("cannot parse `{other}`")))
                .and_then(Exponent::new),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Japanese bracket `(1 + x^2)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Norm parameters shared by the functionals below.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub p: Exponent,
    pub b: Option<f64>,
    pub eps: Option<f64>,
}

impl NormParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        Ok(NormParams {
            s,
            p: Exponent::new(p)?,
            b: None,
            eps: None,
        })
    }
}

pub fn sobolev_norm_spectral(spectrum: &SpectralField, s: f64) -> f64 {
    let grid = spectrum.grid();
    let sum: f64 = spectrum
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + grid.frequency(i).powi(2)).powf(s) * c.norm_sqr())
        .sum();
    (sum * grid.dxi() / (2.0 * PI)).sqrt()
}

/// `H^s` norm `((2 pi)^{-1} sum <xi_k>^{2s} |u_hat(xi_k)|^2 dxi)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> Result<f64> {
    Ok(sobolev_norm_spectral(&forward_transform(f)?, s))
}

pub fn fourier_lebesgue_norm_spectral(spectrum: &SpectralField, s: f64, p: Exponent) -> f64 {
    let grid = spectrum.grid();
    let terms = spectrum
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| (bracket(grid.frequency(i)).powf(s), c.norm()));
    match p {
        Exponent::Infinity => p.weighted_sum(terms),
        Exponent::Finite(q) => p.weighted_sum(terms) * grid.dxi().powf(1.0 / q),
    }
}

/// `FL^{s,p}` norm: `L^p_xi` norm of `<xi>^s u_hat` with the lattice measure.
pub fn fourier_lebesgue_norm(f: &Field, s: f64, p: Exponent) -> Result<f64> {
    Ok(fourier_lebesgue_norm_spectral(&forward_transform(f)?, s, p))
}

/// Relative spectral mass tolerated beyond the last fully resolved cube.
pub const MODULATION_TAIL_TOLERANCE: f64 = 1e-10;

/// Squared `L^2` masses `||Pi_n f||^2` of the unit-cube pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeMasses {
    /// Cube index of `masses[0]`.
    pub first: i64,
    pub masses: Vec<f64>,
}

impl CubeMasses {
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .map(move |(j, &m)| (self.first + j as i64, m))
    }

    /// `(sum <n + offset>^{sp} ||Pi_n f||^p)^{1/p}`; the offset shifts the
    /// weight only, matching a field demodulated by an integer carrier.
    pub fn weighted_norm(&self, s: f64, p: Exponent, offset: i64) -> f64 {
        p.weighted_sum(
            self.iter()
                .map(|(n, m)| (bracket((n + offset) as f64).powf(s), m.max(0.0).sqrt())),
        )
    }
}

/// Cube masses with the resolution check on the spectral tail.
pub fn cube_masses(spectrum: &SpectralField, window: Window) -> Result<CubeMasses> {
    let grid = spectrum.grid();
    let edge = crate::spectral::projectors::max_resolved_cube(spectrum) as f64;
    let nyquist = grid.nyquist();
    let top = nyquist.ceil() as i64 + 1;
    let first = -top;
    let mut masses = vec![0.0; (2 * top + 1) as usize];
    let weight = grid.dxi() / (2.0 * PI);
    let mut total = 0.0;
    let mut tail = 0.0;
    // spectral mass by |xi|, for naming the band needed when the tail check fails
    let mut by_frequency: Vec<(f64, f64)> = Vec::new();
    for (i, c) in spectrum.coefficients().iter().enumerate() {
        let xi = grid.frequency(i);
        let power = c.norm_sqr() * weight;
        if power == 0.0 {
            continue;
        }
        total += power;
        if xi.abs() > edge {
            tail += power;
        }
        by_frequency.push((xi.abs(), power));
        for (n, w) in window.split(xi) {
            if w > 0.0 {
                masses[(n - first) as usize] += w * w * power;
            }
        }
    }
    if total > 0.0 && tail > MODULATION_TAIL_TOLERANCE * total {
        by_frequency.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut acc = 0.0;
        let mut required = nyquist;
        for (a, pw) in by_frequency {
            acc += pw;
            if acc > MODULATION_TAIL_TOLERANCE * total {
                required = a + 1.0;
                break;
            }
        }
        return Err(Error::UnresolvedTail {
            tail: tail / total,
            edge,
            required,
        });
    }
    Ok(CubeMasses { first, masses })
}

/// Modulation norm `M^{2,p}_s` with the `cos^2` window.
pub fn modulation_norm(f: &Field, s: f64, p: Exponent) -> Result<f64> {
    modulation_norm_with(f, s, p, Window::CosSquared, 0)
}

/// Modulation norm of `e^{i offset x} f` with an explicit window.
pub fn modulation_norm_with(
    f: &Field,
    s: f64,
    p: Exponent,
    window: Window,
    offset: i64,
) -> Result<f64> {
    modulation_norm_spectral(&forward_transform(f)?, s, p, window, offset)
}

pub fn modulation_norm_spectral(
    spectrum: &SpectralField,
    s: f64,
    p: Exponent,
    window: Window,
    offset: i64,
) -> Result<f64> {
    Ok(cube_masses(spectrum, window)?.weighted_norm(s, p, offset))
}

fn checked_spectrum(u: &SpaceTimeField) -> Result<SpaceTimeSpectrum> {
    let spec = u.spectrum()?;
    spec.check_temporal_resolution()?;
    Ok(spec)
}

/// `X^{s,b}` value of the cutoff representative `eta u`.
pub fn xsb_norm(u: &SpaceTimeField, s: f64, b: f64) -> Result<f64> {
    Ok(xsb_norm_of_spectrum(&checked_spectrum(u)?, s, b))
}

pub fn xsb_norm_of_spectrum(spec: &SpaceTimeSpectrum, s: f64, b: f64) -> f64 {
    let grid = *spec.grid();
    let dxi = grid.dxi();
    let sum: f64 = (0..grid.points())
        .map(|i| (1.0 + grid.frequency(i).powi(2)).powf(s) * spec.modulation_weighted_row(i, b))
        .sum();
    (sum * dxi).sqrt()
}

/// Squared space-time `L^2` blocks over the sharp cubes `[n, n + 1)`.
pub fn xsb_blocks(spec: &SpaceTimeSpectrum, b: f64) -> CubeMasses {
    let grid = *spec.grid();
    let top = grid.nyquist().ceil() as i64 + 1;
    let first = -top;
    let mut masses = vec![0.0; (2 * top + 1) as usize];
    for i in 0..grid.points() {
        let n = grid.frequency(i).floor() as i64;
        masses[(n - first) as usize] += spec.modulation_weighted_row(i, b) * grid.dxi();
    }
    CubeMasses { first, masses }
}

/// `X^{s,b}_p` value of the cutoff representative `eta u`.
pub fn xsb_p_norm(u: &SpaceTimeField, s: f64, b: f64, p: Exponent) -> Result<f64> {
    Ok(xsb_p_norm_of_spectrum(&checked_spectrum(u)?, s, b, p))
}

pub fn xsb_p_norm_of_spectrum(spec: &SpaceTimeSpectrum, s: f64, b: f64, p: Exponent) -> f64 {
    xsb_blocks(spec, b).weighted_norm(s, p, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use crate::spectral::{inverse_transform, GridSpec};
    use num_complex::Complex64;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("4".parse::<Exponent>().unwrap(), Exponent::Finite(4.0));
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(Exponent::Finite(4.0).conjugate(), Exponent::Finite(4.0 / 3.0));
    }

    #[test]
    fn sobolev_of_sech() {
        let g = GridSpec::new(128.0, 2048).unwrap();
        let f = Field::from_real_fn(g, sech);
        assert!((sobolev_norm(&f, 0.0).unwrap() - 2f64.sqrt()).abs() < 1e-8);
        assert_eq!(sobolev_norm(&Field::zeros(g), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sobolev_of_narrow_band_mode() {
        // flat-top bump: spectrum concentrated within ~0.05 of the carrier
        let g = GridSpec::new(1024.0, 8192).unwrap();
        let n = 8.0;
        let bump = |x: f64| 0.5 * ((x + 150.0).tanh() - (x - 150.0).tanh()) * (-x * x / 2.0e4).exp();
        let f = Field::from_fn(g, |x| Complex64::from_polar(bump(x), n * x));
        let h0 = sobolev_norm(&f, 0.0).unwrap();
        let h1 = sobolev_norm(&f, 1.0).unwrap();
        assert!((h1 / (bracket(n) * h0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fourier_lebesgue_conventions() {
        let g = GridSpec::new(128.0, 2048).unwrap();
        let f = Field::from_real_fn(g, sech);
        let fl2 = fourier_lebesgue_norm(&f, 0.5, Exponent::Finite(2.0)).unwrap();
        let h = sobolev_norm(&f, 0.5).unwrap();
        assert!((fl2 - h * (2.0 * PI).sqrt()).abs() < 1e-12 * fl2);
        let sup = fourier_lebesgue_norm(&f, 0.0, Exponent::Infinity).unwrap();
        assert!((sup - PI).abs() < 1e-8);
    }

    #[test]
    fn fourier_lebesgue_sup_is_scale_invariant() {
        // u_lambda(x) = lambda^{-1} u(x / lambda) has u_hat_lambda(xi) = u_hat(lambda xi)
        let g = GridSpec::new(256.0, 4096).unwrap();
        let lambda = 2.0;
        let f = Field::from_real_fn(g, sech);
        let scaled = Field::from_real_fn(g, |x| sech(x / lambda) / lambda);
        let a = fourier_lebesgue_norm(&f, 0.0, Exponent::Infinity).unwrap();
        let b = fourier_lebesgue_norm(&scaled, 0.0, Exponent::Infinity).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn single_cube_spectrum_against_quadrature() {
        // u_hat = bump supported in [8.2, 8.8] (inside [8, 9))
        let g = GridSpec::new(4096.0, 65536).unwrap();
        let (lo, hi) = (8.2, 8.8);
        let profile = move |xi: f64| {
            if xi <= lo || xi >= hi {
                0.0
            } else {
                let t = (xi - lo) / (hi - lo);
                (-1.0 / (t * (1.0 - t))).exp() * 100.0
            }
        };
        let f = inverse_transform(&SpectralField::from_fn(g, |xi| Complex64::new(profile(xi), 0.0))).unwrap();
        let (s, p) = (0.75, 3.0);
        let grid_value = modulation_norm(&f, s, Exponent::Finite(p)).unwrap();
        let w = Window::CosSquared;
        let mut sum = 0.0;
        for n in 7..=9 {
            let m = integrate(|xi| w.at(xi, n).powi(2) * profile(xi).powi(2), lo, hi, 0.0, 1e-13)
                / (2.0 * PI);
            sum += bracket(n as f64).powf(s * p) * m.powf(p / 2.0);
        }
        let oracle = sum.powf(1.0 / p);
        assert!((grid_value - oracle).abs() / oracle < 1e-8, "{grid_value} vs {oracle}");
    }

    #[test]
    fn modulation_rejects_unresolved_tail() {
        let g = GridSpec::new(64.0, 256).unwrap(); // nyquist 12.6
        let f = Field::from_fn(g, |x| Complex64::from_polar((-x * x * 4.0).exp(), 0.0));
        match modulation_norm(&f, 0.0, Exponent::Finite(2.0)) {
            Err(Error::UnresolvedTail { required, .. }) => assert!(required > 11.0),
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn modulation_invariant_under_translation() {
        let g = GridSpec::new(128.0, 1024).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar(sech(x), 2.5 * x));
        let g2 = Field::from_fn(g, |x| Complex64::from_polar(sech(x - 13.7), 2.5 * (x - 13.7)));
        for p in [Exponent::Finite(2.0), Exponent::Finite(5.0), Exponent::Infinity] {
            let a = modulation_norm(&f, 0.3, p).unwrap();
            let b = modulation_norm(&g2, 0.3, p).unwrap();
            assert!((a - b).abs() < 1e-10 * a);
        }
    }

    #[test]
    fn offset_matches_modulated_field() {
        let g = GridSpec::covering(100.0, 30.0).unwrap();
        let carrier = 12;
        let base = Field::from_fn(g, |x| Complex64::from_polar(sech(2.0 * x), 0.3 * x));
        let shifted = Field::from_fn(g, |x| {
            Complex64::from_polar(sech(2.0 * x), (0.3 + carrier as f64) * x)
        });
        let direct = modulation_norm(&shifted, 0.5, Exponent::Finite(4.0)).unwrap();
        let via_offset =
            modulation_norm_with(&base, 0.5, Exponent::Finite(4.0), Window::CosSquared, carrier).unwrap();
        assert!((direct - via_offset).abs() < 1e-10 * direct);
    }

    #[test]
    fn free_evolution_b_zero_collapses() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar((-x * x / 8.0).exp(), 2.0 * x));
        let window = 1.0;
        let u = SpaceTimeField::free_evolution(&f, window, 256).unwrap();
        let eta_l2 = integrate(|t| u.cutoff().eval(t, window).powi(2), 0.0, window, 1e-15, 1e-13).sqrt();
        let x = xsb_norm(&u, 0.5, 0.0).unwrap();
        let expected = eta_l2 * sobolev_norm(&f, 0.5).unwrap();
        assert!((x - expected).abs() / expected < 1e-3);
        let zero = SpaceTimeField::free_evolution(&Field::zeros(g), window, 256).unwrap();
        assert_eq!(xsb_norm(&zero, 0.5, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn single_cube_space_time_blocks_are_p_independent() {
        let g = GridSpec::new(128.0, 512).unwrap();
        let spectrum = SpectralField::from_fn(g, |xi| {
            if xi > 3.1 && xi < 3.9 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let f = inverse_transform(&spectrum).unwrap();
        let u = SpaceTimeField::free_evolution(&f, 0.5, 256).unwrap();
        let a = xsb_p_norm(&u, 0.25, 0.6, Exponent::Finite(2.0)).unwrap();
        let b = xsb_p_norm(&u, 0.25, 0.6, Exponent::Finite(7.0)).unwrap();
        let c = xsb_p_norm(&u, 0.25, 0.6, Exponent::Infinity).unwrap();
        assert!((a - b).abs() < 1e-12 * a && (a - c).abs() < 1e-12 * a);
    }
}
