//! Frequency projectors, the Airy group and the Riesz-type bilinear operator.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{forward_transform, inverse_transform, Field, SpectralField};
use super::window::Window;
use crate::error::{Error, Result};

/// Occupied-bin cap for each input of [`riesz_bilinear`]; the double sum costs
/// the product of the two occupied counts.
pub const RIESZ_BIN_CAP: usize = 16_384;

/// Coefficients below this fraction of the peak count as unoccupied.
const OCCUPANCY_THRESHOLD: f64 = 1e-13;

fn check_dyadic(n: u64) -> Result<()> {
    if n >= 1 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::param("N", format!("{n} is not a dyadic integer >= 1")))
    }
}

/// Sharp dyadic annulus: `|xi| <= 1` for `N = 1`, `N/2 < |xi| <= N` otherwise.
#[inline]
pub fn in_dyadic_band(xi: f64, n: u64) -> bool {
    let a = xi.abs();
    if n == 1 {
        a <= 1.0
    } else {
        a > 0.5 * n as f64 && a <= n as f64
    }
}

pub fn littlewood_paley_spectral(spectrum: &SpectralField, n: u64) -> Result<SpectralField> {
    check_dyadic(n)?;
    let nyquist = spectrum.grid().nyquist();
    if n as f64 > nyquist {
        return Err(Error::OutsideBand {
            requested: n as f64,
            nyquist,
        });
    }
    Ok(spectrum.apply_real_multiplier(|xi| if in_dyadic_band(xi, n) { 1.0 } else { 0.0 }))
}

/// Littlewood-Paley projector `P_N`.
pub fn littlewood_paley(f: &Field, n: u64) -> Result<Field> {
    inverse_transform(&littlewood_paley_spectral(&forward_transform(f)?, n)?)
}

/// Largest cube index `n` whose window `[n - 1, n + 1]` lies inside the band.
pub fn max_resolved_cube(spectrum: &SpectralField) -> i64 {
    (spectrum.grid().nyquist().floor() as i64 - 1).max(0)
}

pub fn unit_cube_project_spectral(
    spectrum: &SpectralField,
    n: i64,
    window: Window,
) -> Result<SpectralField> {
    let nyquist = spectrum.grid().nyquist();
    if (n.abs() + 1) as f64 > nyquist {
        return Err(Error::OutsideBand {
            requested: n as f64,
            nyquist,
        });
    }
    Ok(spectrum.apply_real_multiplier(|xi| window.at(xi, n)))
}

/// Unit-cube projector `Pi_n` with the default `cos^2` window.
pub fn unit_cube_project(f: &Field, n: i64) -> Result<Field> {
    unit_cube_project_with(f, n, Window::CosSquared)
}

pub fn unit_cube_project_with(f: &Field, n: i64, window: Window) -> Result<Field> {
    inverse_transform(&unit_cube_project_spectral(&forward_transform(f)?, n, window)?)
}

/// `e^{-t d_x^3}` on the spectral side: multiplier `e^{i xi^3 t}`.
pub fn airy_propagator_spectral(spectrum: &SpectralField, t: f64) -> SpectralField {
    if t == 0.0 {
        return spectrum.clone();
    }
    spectrum.apply_multiplier(|xi| Complex64::from_polar(1.0, xi * xi * xi * t))
}

/// Free Airy evolution over time `t`.
pub fn airy_propagator(f: &Field, t: f64) -> Result<Field> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    inverse_transform(&airy_propagator_spectral(&forward_transform(f)?, t))
}

/// Riesz potential `(-d_x^2)^{theta/2}`, multiplier `|xi|^theta`.
pub fn riesz_potential(f: &Field, theta: f64) -> Result<Field> {
    let s = forward_transform(f)?;
    inverse_transform(&s.apply_real_multiplier(|xi| xi.abs().powf(theta)))
}

fn occupied(spectrum: &SpectralField) -> Result<Vec<(i64, Complex64)>> {
    let grid = spectrum.grid();
    let peak = spectrum
        .coefficients()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(Vec::new());
    }
    let cap = 0.5 * grid.nyquist();
    let mut bins = Vec::new();
    for (i, &c) in spectrum.coefficients().iter().enumerate() {
        if c.norm() <= OCCUPANCY_THRESHOLD * peak {
            continue;
        }
        let xi = grid.frequency(i);
        if xi.abs() >= cap {
            return Err(Error::NotBandLimited {
                frequency: xi.abs(),
                cap,
            });
        }
        bins.push((grid.wavenumber(i), c));
    }
    if bins.len() > RIESZ_BIN_CAP {
        return Err(Error::BandwidthCap {
            bins: bins.len(),
            cap: RIESZ_BIN_CAP,
        });
    }
    Ok(bins)
}

/// Bilinear operator `I^theta_-(f, g)` with symbol `|xi_1 - xi_2|^theta`.
///
/// The output spectrum is
/// `(dxi / 2 pi) sum_{k1 + k2 = k} |xi_k1 - xi_k2|^theta f_hat(k1) g_hat(k2)`,
/// the lattice form of the continuum convolution, so that `theta -> 0`
/// recovers the pointwise product. Both inputs must be supported strictly
/// inside half the Nyquist band, which keeps every output index on the
/// lattice. The sum runs over occupied bins only (at most
/// [`RIESZ_BIN_CAP`] each).
pub fn riesz_bilinear(theta: f64, f: &Field, g: &Field) -> Result<Field> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::param("theta", format!("{theta} not in (0, 1]")));
    }
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let fb = occupied(&forward_transform(f)?)?;
    let gb = occupied(&forward_transform(g)?)?;
    let dxi = grid.dxi();
    let mut out = SpectralField::zeros(grid);
    {
        let coeffs = out.coefficients_mut();
        for &(k1, a) in &fb {
            for &(k2, b) in &gb {
                let w = ((k1 - k2).abs() as f64 * dxi).powf(theta);
                if w == 0.0 {
                    continue;
                }
                // |k1 + k2| < M/2 by the band-limit check
                let slot = grid.slot(k1 + k2).expect("band-limited sum stays on lattice");
                coeffs[slot] += a * b * w;
            }
        }
        let norm = dxi / (2.0 * PI);
        for c in coeffs.iter_mut() {
            *c *= norm;
        }
    }
    inverse_transform(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lattice_mode(grid: GridSpec, k: i64) -> Field {
        let xi = k as f64 * grid.dxi();
        Field::from_fn(grid, |x| Complex64::from_polar(1.0, xi * x))
    }

    fn random_band_limited(grid: GridSpec, band: f64, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SpectralField::from_fn(grid, |xi| {
            if xi.abs() < band {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        inverse_transform(&s).unwrap()
    }

    #[test]
    fn dyadic_projectors_partition_band_limited_data() {
        let g = GridSpec::new(64.0, 256).unwrap(); // nyquist ~ 12.6
        let f = random_band_limited(g, 8.0, 3);
        let mut total = Field::zeros(g);
        for n in [1, 2, 4, 8] {
            total = total.add(&littlewood_paley(&f, n).unwrap()).unwrap();
        }
        assert!(total.max_abs_diff(&f).unwrap() < 1e-12 * f.sup_norm());
    }

    #[test]
    fn dyadic_projector_idempotent() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = random_band_limited(g, 10.0, 4);
        let once = littlewood_paley(&f, 4).unwrap();
        let twice = littlewood_paley(&once, 4).unwrap();
        assert!(twice.max_abs_diff(&once).unwrap() < 1e-13);
    }

    #[test]
    fn dyadic_projector_locates_modulated_bump() {
        let g = GridSpec::new(256.0, 1024).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar((-x * x / 200.0).exp(), 3.0 * x));
        let mass = f.mass();
        let p4 = littlewood_paley(&f, 4).unwrap().mass();
        let p1 = littlewood_paley(&f, 1).unwrap().mass();
        assert!((p4 - mass).abs() / mass < 1e-6);
        assert!(p1 / mass < 1e-6);
    }

    #[test]
    fn dyadic_projector_rejects_above_nyquist() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = Field::zeros(g);
        assert!(matches!(littlewood_paley(&f, 16), Err(Error::OutsideBand { .. })));
        assert!(littlewood_paley(&f, 3).is_err());
    }

    #[test]
    fn unit_cubes_partition_band_limited_data() {
        let g = GridSpec::new(64.0, 512).unwrap();
        let k = 10;
        let f = random_band_limited(g, (k - 1) as f64, 9);
        let mut total = Field::zeros(g);
        for n in -k..=k {
            total = total.add(&unit_cube_project(&f, n).unwrap()).unwrap();
        }
        assert!(total.max_abs_diff(&f).unwrap() < 1e-12 * f.sup_norm());
    }

    #[test]
    fn distant_cubes_compose_to_zero() {
        let g = GridSpec::new(64.0, 512).unwrap();
        let f = random_band_limited(g, 15.0, 10);
        let a = unit_cube_project(&unit_cube_project(&f, 3).unwrap(), 5).unwrap();
        let b = unit_cube_project(&unit_cube_project(&f, -4).unwrap(), 2).unwrap();
        assert!(a.sup_norm() < 1e-15 && b.sup_norm() < 1e-15);
    }

    #[test]
    fn unit_cube_rejects_unresolved_cube() {
        let g = GridSpec::new(64.0, 256).unwrap(); // nyquist 12.57
        let f = Field::zeros(g);
        assert!(unit_cube_project(&f, 11).is_ok());
        assert!(unit_cube_project(&f, 12).is_err());
    }

    #[test]
    fn airy_identity_and_unitarity() {
        let g = GridSpec::new(64.0, 512).unwrap();
        let f = random_band_limited(g, 20.0, 11);
        assert_eq!(airy_propagator(&f, 0.0).unwrap(), f);
        let e = airy_propagator(&f, 1.0).unwrap();
        assert!((e.mass() - f.mass()).abs() / f.mass() < 1e-12);
        let ab = airy_propagator(&airy_propagator(&f, 0.3).unwrap(), 0.45).unwrap();
        let c = airy_propagator(&f, 0.75).unwrap();
        assert!(ab.max_abs_diff(&c).unwrap() < 1e-11);
    }

    #[test]
    fn airy_group_velocity() {
        // |u_hat|^2 ~ exp(-(xi - N)^2 w^2) has <xi^2> = N^2 + 1/(2 w^2); the
        // centroid of |u|^2 moves at -3 <xi^2>.
        let g = GridSpec::new(128.0, 4096).unwrap();
        let (n, w, t) = (16.0, 2.0, 0.01);
        let f = Field::from_fn(g, |x| Complex64::from_polar((-x * x / (2.0 * w * w)).exp(), n * x));
        let e = airy_propagator(&f, t).unwrap();
        let centroid = |u: &Field| {
            let m: f64 = u.samples().iter().map(|z| z.norm_sqr()).sum();
            u.samples()
                .iter()
                .enumerate()
                .map(|(j, z)| g.x(j) * z.norm_sqr())
                .sum::<f64>()
                / m
        };
        let shift = centroid(&e) - centroid(&f);
        let group = -3.0 * n * n * t;
        assert!((shift - group).abs() / group.abs() < 1e-3);
        let exact = -3.0 * (n * n + 1.0 / (2.0 * w * w)) * t;
        assert!((shift - exact).abs() / exact.abs() < 1e-8);
    }

    #[test]
    fn riesz_vanishes_on_a_single_mode() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = lattice_mode(g, 7);
        let h = riesz_bilinear(1.0, &f, &f).unwrap();
        assert!(h.sup_norm() < 1e-12);
    }

    #[test]
    fn riesz_two_modes() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let (ka, kb) = (5, -12);
        let theta = 0.5;
        let h = riesz_bilinear(theta, &lattice_mode(g, ka), &lattice_mode(g, kb)).unwrap();
        let weight = ((ka - kb) as f64 * g.dxi()).abs().powf(theta);
        let expected = lattice_mode(g, ka + kb).scale(Complex64::new(weight, 0.0));
        assert!(h.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn riesz_matches_output_indexed_sum() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = random_band_limited(g, 5.0, 21);
        let gg = random_band_limited(g, 4.0, 22);
        let theta = 0.7;
        let h = riesz_bilinear(theta, &f, &gg).unwrap();
        // oracle: loop over output frequency, then over all splits
        let fs = forward_transform(&f).unwrap();
        let gs = forward_transform(&gg).unwrap();
        let m = g.points() as i64;
        let expected = SpectralField::from_fn(g, |xi| {
            let k = (xi / g.dxi()).round() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in -m / 2..m / 2 {
                let k2 = k - k1;
                let w = ((k1 - k2) as f64 * g.dxi()).abs().powf(theta);
                acc += fs.at(k1) * gs.at(k2) * w;
            }
            acc * g.dxi() / (2.0 * PI)
        });
        let expected = inverse_transform(&expected).unwrap();
        assert!(h.max_abs_diff(&expected).unwrap() < 1e-10 * expected.sup_norm().max(1.0));
    }

    #[test]
    fn riesz_rejects_wide_inputs() {
        let g = GridSpec::new(64.0, 256).unwrap();
        let f = random_band_limited(g, 8.0, 5); // cap is nyquist/2 ~ 6.3
        assert!(matches!(
            riesz_bilinear(0.5, &f, &f),
            Err(Error::NotBandLimited { .. })
        ));
        assert!(riesz_bilinear(0.0, &f, &f).is_err());
    }

    #[test]
    fn bernstein_constants() {
        let g = GridSpec::new(64.0, 1024).unwrap();
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let f = random_band_limited(g, 40.0, 100 + seed);
            for n in [1u64, 2, 4, 8, 16, 32] {
                let p = littlewood_paley(&f, n).unwrap();
                worst = worst.max(p.sup_norm() / ((n as f64).sqrt() * p.l2_norm()));
            }
            for n in [-20i64, -3, 0, 5, 17] {
                let p = unit_cube_project(&f, n).unwrap();
                worst = worst.max(p.sup_norm() / p.l2_norm());
            }
        }
        assert!(worst <= 2.0, "Bernstein constant {worst}");
    }
}
