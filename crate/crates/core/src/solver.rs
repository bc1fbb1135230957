//! Integrating-factor RK4 for `u_t + u_xxx + sign * 6 |u|^2 u_x = 0`.
//!
//! The state is carried as DFT coefficients; the Airy part `i xi^3` is
//! integrated exactly and the cubic term is evaluated on a zero-padded grid.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{fft_forward, fft_inverse, Field, GridSpec};

/// `+1` focusing, `-1` defocusing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    Focusing,
    Defocusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "focusing" => Ok(Sign::Focusing),
            "-" | "-1" | "defocusing" => Ok(Sign::Defocusing),
            other => Err(Error::param("sign", format!("`{other}` is not +1 or -1"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Focusing => "+1",
            Sign::Defocusing => "-1",
        })
    }
}

/// Zero-padding used for the cubic term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dealias {
    /// Pad to `3M/2`: alias-free while the state stays inside `2/3` of the
    /// Nyquist band.
    #[default]
    ThreeHalves,
    /// Pad to `2M`: alias-free for any state.
    Double,
}

impl Dealias {
    fn padded(self, m: usize) -> usize {
        match self {
            Dealias::ThreeHalves => 3 * m / 2,
            Dealias::Double => 2 * m,
        }
    }
}

impl FromStr for Dealias {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "3/2" | "three-halves" => Ok(Dealias::ThreeHalves),
            "2" | "double" => Ok(Dealias::Double),
            other => Err(Error::param("dealias", format!("`{other}` is not 3/2 or 2"))),
        }
    }
}

/// Largest admissible `|dt| 6 max|u|^2 nyquist`.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub dealias: Dealias,
    pub sign: Sign,
    /// Allowed relative mass drift per unit time.
    pub mass_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-4,
            dealias: Dealias::ThreeHalves,
            sign: Sign::Focusing,
            mass_tolerance: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn with_dt(dt: f64) -> Self {
        SolverConfig {
            dt,
            ..SolverConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.mass_tolerance > 0.0) {
            return Err(Error::param("mass_tolerance", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    /// `int |u|^2`.
    pub mass: f64,
    /// `int Im(conj(u) u_x)`.
    pub momentum: f64,
}

/// Reusable buffers and multipliers for one grid.
struct Workspace {
    grid: GridSpec,
    /// `xi_k` in FFT order, with the Nyquist slot zeroed for odd derivatives.
    xi: Vec<f64>,
    padded: usize,
    u: Vec<Complex64>,
    ux: Vec<Complex64>,
}

impl Workspace {
    fn new(grid: GridSpec, dealias: Dealias) -> Self {
        let m = grid.points();
        let xi = (0..m)
            .map(|i| if i == m / 2 { 0.0 } else { grid.frequency(i) })
            .collect();
        let padded = dealias.padded(m);
        Workspace {
            grid,
            xi,
            padded,
            u: vec![Complex64::new(0.0, 0.0); padded],
            ux: vec![Complex64::new(0.0, 0.0); padded],
        }
    }

    /// DFT coefficients of `-sign 6 |u|^2 u_x` from those of `u`.
    fn nonlinear(&mut self, a: &[Complex64], sign: f64, out: &mut [Complex64]) {
        let m = a.len();
        let p = self.padded;
        let zero = Complex64::new(0.0, 0.0);
        self.u.fill(zero);
        self.ux.fill(zero);
        let i = Complex64::i();
        for k in 0..m {
            if k == m / 2 {
                continue;
            }
            let slot = if k < m / 2 { k } else { p - (m - k) };
            self.u[slot] = a[k];
            self.ux[slot] = a[k] * i * self.xi[k];
        }
        fft_inverse(&mut self.u);
        fft_inverse(&mut self.ux);
        // inverse DFT of M-grid coefficients needs 1/M
        let norm = 1.0 / m as f64;
        let coef = -6.0 * sign * norm * norm * norm;
        for (v, dv) in self.u.iter().zip(self.ux.iter_mut()) {
            *dv *= coef * v.norm_sqr();
        }
        fft_forward(&mut self.ux);
        let back = m as f64 / p as f64;
        for k in 0..m {
            out[k] = if k == m / 2 {
                zero
            } else {
                let slot = if k < m / 2 { k } else { p - (m - k) };
                self.ux[slot] * back
            };
        }
    }
}

fn to_coefficients(f: &Field) -> Vec<Complex64> {
    let mut a = f.samples().to_vec();
    fft_forward(&mut a);
    a
}

fn to_field(grid: GridSpec, a: &[Complex64]) -> Result<Field> {
    let mut buf = a.to_vec();
    fft_inverse(&mut buf);
    let norm = 1.0 / a.len() as f64;
    for c in buf.iter_mut() {
        *c *= norm;
    }
    Field::new(grid, buf)
}

fn sup_sqr(f: &Field) -> f64 {
    f.samples().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
}

fn cfl_proxy(dt: f64, f: &Field) -> f64 {
    dt.abs() * 6.0 * sup_sqr(f) * f.grid().nyquist()
}

/// Right-hand side `-sign 6 |u|^2 u_x` of `u_t = -u_xxx - sign 6 |u|^2 u_x`.
pub fn nonlinearity(f: &Field, sign: Sign) -> Result<Field> {
    nonlinearity_with(f, sign, Dealias::default())
}

pub fn nonlinearity_with(f: &Field, sign: Sign, dealias: Dealias) -> Result<Field> {
    let grid = *f.grid();
    let mut ws = Workspace::new(grid, dealias);
    let a = to_coefficients(f);
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    ws.nonlinear(&a, sign.value(), &mut out);
    to_field(grid, &out)
}

/// Integrating-factor RK4 stepper bound to one grid and step size.
pub struct Stepper {
    ws: Workspace,
    sign: f64,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: GridSpec, dt: f64, sign: Sign, dealias: Dealias) -> Self {
        let ws = Workspace::new(grid, dealias);
        let m = grid.points();
        let half = (0..m)
            .map(|i| Complex64::from_polar(1.0, grid.frequency(i).powi(3) * dt / 2.0))
            .collect();
        let full = (0..m)
            .map(|i| Complex64::from_polar(1.0, grid.frequency(i).powi(3) * dt))
            .collect();
        let zero = vec![Complex64::new(0.0, 0.0); m];
        Stepper {
            ws,
            sign: sign.value(),
            dt,
            half,
            full,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            stage: zero,
        }
    }

    /// Advances DFT coefficients `a` by one step in place.
    pub fn advance(&mut self, a: &mut [Complex64]) {
        let h = self.dt;
        let m = a.len();
        let [k1, k2, k3, k4] = &mut self.k;
        self.ws.nonlinear(a, self.sign, k1);
        for i in 0..m {
            self.stage[i] = self.half[i] * (a[i] + 0.5 * h * k1[i]);
        }
        self.ws.nonlinear(&self.stage, self.sign, k2);
        for i in 0..m {
            self.stage[i] = self.half[i] * a[i] + 0.5 * h * k2[i];
        }
        self.ws.nonlinear(&self.stage, self.sign, k3);
        for i in 0..m {
            self.stage[i] = self.full[i] * a[i] + h * self.half[i] * k3[i];
        }
        self.ws.nonlinear(&self.stage, self.sign, k4);
        for i in 0..m {
            a[i] = self.full[i] * a[i]
                + h / 6.0 * (self.full[i] * k1[i] + 2.0 * self.half[i] * (k2[i] + k3[i]) + k4[i]);
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.ws.grid
    }
}

/// One step of size `dt` (negative steps run backward).
pub fn step(f: &Field, dt: f64, cfg: &SolverConfig) -> Result<Field> {
    if dt == 0.0 {
        return Ok(f.clone());
    }
    let proxy = cfl_proxy(dt, f);
    if proxy > CFL_LIMIT {
        return Err(Error::Cfl { proxy });
    }
    let mut stepper = Stepper::new(*f.grid(), dt, cfg.sign, cfg.dealias);
    let mut a = to_coefficients(f);
    stepper.advance(&mut a);
    to_field(*f.grid(), &a)
}

/// Mass and momentum, the latter as `(2 pi)^{-1} int xi |u_hat|^2`.
pub fn invariants(f: &Field) -> Invariants {
    let grid = f.grid();
    let a = to_coefficients(f);
    let m = grid.points() as f64;
    // |u_hat|^2 = dx^2 |a|^2 and (2 pi)^{-1} dx^2 dxi = dx / M
    let scale = grid.dx() / m;
    let mut mass = 0.0;
    let mut momentum = 0.0;
    for (i, c) in a.iter().enumerate() {
        let p = c.norm_sqr() * scale;
        mass += p;
        if i != grid.points() / 2 {
            momentum += grid.frequency(i) * p;
        }
    }
    Invariants { mass, momentum }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSample {
    pub time: f64,
    pub mass: f64,
    pub momentum: f64,
}

/// Output of [`evolve`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Snapshots at `t_j = j * record_every * dt`, `j < steps / record_every`.
    pub field: SpaceTimeField,
    pub final_state: Field,
    /// Invariants at every snapshot and at the final time.
    pub diagnostics: Vec<InvariantSample>,
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    pub fn max_mass_drift(&self) -> f64 {
        relative_drift(&self.diagnostics, |d| d.mass)
    }

    pub fn max_momentum_drift(&self) -> f64 {
        relative_drift(&self.diagnostics, |d| d.momentum)
    }
}

fn relative_drift(samples: &[InvariantSample], pick: impl Fn(&InvariantSample) -> f64) -> f64 {
    let Some(first) = samples.first() else {
        return 0.0;
    };
    let base = pick(first);
    let scale = if base.abs() > 0.0 { base.abs() } else { 1.0 };
    samples
        .iter()
        .map(|d| (pick(d) - base).abs() / scale)
        .fold(0.0, f64::max)
}

fn step_count(t: f64, dt: f64) -> usize {
    ((t.abs() / dt) - 1e-9).ceil().max(1.0) as usize
}

struct Run {
    grid: GridSpec,
    stepper: Stepper,
    a: Vec<Complex64>,
    mass0: f64,
    tolerance: f64,
    nyquist: f64,
}

impl Run {
    fn start(f0: &Field, h: f64, cfg: &SolverConfig) -> Self {
        let grid = *f0.grid();
        Run {
            grid,
            stepper: Stepper::new(grid, h, cfg.sign, cfg.dealias),
            a: to_coefficients(f0),
            mass0: f0.mass(),
            tolerance: cfg.mass_tolerance,
            nyquist: grid.nyquist(),
        }
    }

    fn advance_checked(&mut self, h: f64) -> Result<()> {
        let field = to_field(self.grid, &self.a)?;
        let proxy = h.abs() * 6.0 * sup_sqr(&field) * self.nyquist;
        if proxy > CFL_LIMIT {
            return Err(Error::Cfl { proxy });
        }
        self.stepper.advance(&mut self.a);
        Ok(())
    }

    fn check_mass(&self, t: f64, inv: &Invariants) -> Result<()> {
        let scale = if self.mass0 > 0.0 { self.mass0 } else { 1.0 };
        let drift = (inv.mass - self.mass0).abs() / scale;
        let allowed = self.tolerance * t.abs().max(1.0);
        if !drift.is_finite() || drift > allowed {
            return Err(Error::MassDrift {
                drift,
                tolerance: allowed,
                time: t,
            });
        }
        Ok(())
    }
}

/// Evolves `f0` to time `t` (either sign) and returns the final state.
pub fn integrate(f0: &Field, t: f64, cfg: &SolverConfig) -> Result<Field> {
    cfg.validate()?;
    if t == 0.0 {
        return Ok(f0.clone());
    }
    let steps = step_count(t, cfg.dt);
    let h = t / steps as f64;
    let mut run = Run::start(f0, h, cfg);
    for _ in 0..steps {
        run.advance_checked(h)?;
    }
    let out = to_field(run.grid, &run.a)?;
    run.check_mass(t, &invariants(&out))?;
    Ok(out)
}

/// Evolves `f0` over `[0, T]`, recording every `record_every` steps.
///
/// The step is shrunk so an integer number of steps lands on `T`. At least
/// two snapshots are required for the trajectory.
pub fn evolve(f0: &Field, t_final: f64, cfg: &SolverConfig, record_every: usize) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::param("T", format!("{t_final} must be positive")));
    }
    if record_every == 0 {
        return Err(Error::param("record_every", "must be positive"));
    }
    let steps = step_count(t_final, cfg.dt);
    let snapshots = steps / record_every;
    if snapshots < 2 {
        return Err(Error::param(
            "record_every",
            format!("{record_every} leaves fewer than two snapshots in {steps} steps"),
        ));
    }
    let h = t_final / steps as f64;
    let mut run = Run::start(f0, h, cfg);
    let mut samples = Vec::with_capacity(snapshots);
    let mut diagnostics = Vec::with_capacity(snapshots + 1);
    for n in 0..=steps {
        if n % record_every == 0 || n == steps {
            let field = to_field(run.grid, &run.a)?;
            let time = n as f64 * h;
            let inv = invariants(&field);
            run.check_mass(time, &inv)?;
            diagnostics.push(InvariantSample {
                time,
                mass: inv.mass,
                momentum: inv.momentum,
            });
            if n % record_every == 0 && samples.len() < snapshots {
                samples.push(field);
            }
        }
        if n < steps {
            run.advance_checked(h)?;
        }
    }
    let final_state = to_field(run.grid, &run.a)?;
    let window = h * (snapshots * record_every) as f64;
    Ok(Trajectory {
        field: SpaceTimeField::new(0.0, window, samples)?,
        final_state,
        diagnostics,
        steps,
        dt: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solitons::{soliton_field, SolitonParams};
    use crate::spectral::{airy_propagator, derivative};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_random(grid: GridSpec, seed: u64, amplitude: f64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bumps: Vec<(f64, f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.random_range(-10.0..10.0),
                    rng.random_range(1.0..3.0),
                    rng.random_range(-4.0..4.0),
                    rng.random_range(0.0..6.28),
                )
            })
            .collect();
        Field::from_fn(grid, |x| {
            bumps
                .iter()
                .map(|&(c, w, k, ph)| Complex64::from_polar(amplitude * (-(x - c).powi(2) / (w * w)).exp(), k * x + ph))
                .sum()
        })
    }

    #[test]
    fn zero_and_constant_have_no_nonlinearity() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let zero = nonlinearity(&Field::zeros(grid), Sign::Focusing).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
        let c = Field::from_real_fn(grid, |_| 0.7);
        assert!(nonlinearity(&c, Sign::Focusing).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn soliton_satisfies_the_equation() {
        let p = SolitonParams::new(2.0, 1.0).unwrap();
        let grid = GridSpec::new(128.0, 4096).unwrap();
        let f = soliton_field(&p, 0.0, &grid).unwrap();
        for dealias in [Dealias::ThreeHalves, Dealias::Double] {
            let rhs = derivative(&f, 3)
                .unwrap()
                .scale(Complex64::new(-1.0, 0.0))
                .add(&nonlinearity_with(&f, Sign::Focusing, dealias).unwrap())
                .unwrap();
            let exact = Field::from_fn(grid, |x| p.time_derivative(x, 0.0));
            let err = rhs.sub(&exact).unwrap().l2_norm();
            assert!(err <= 1e-6, "{err}");
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let f = small_random(grid, 3, 0.3);
        let g = step(&f, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(f.samples(), g.samples());
    }

    #[test]
    fn tiny_amplitude_is_linear() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let f = small_random(grid, 5, 1e-6);
        let dt = 1e-3;
        let g = step(&f, dt, &SolverConfig::with_dt(dt)).unwrap();
        let lin = airy_propagator(&f, dt).unwrap();
        assert!(g.max_abs_diff(&lin).unwrap() < 1e-10);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let grid = GridSpec::new(64.0, 1024).unwrap();
        let f = Field::from_real_fn(grid, |x| 3.0 * (-x * x).exp());
        assert!(matches!(step(&f, 0.1, &SolverConfig::default()), Err(Error::Cfl { .. })));
    }

    #[test]
    fn invariants_of_soliton() {
        let p = SolitonParams::new(2.5, 0.8).unwrap();
        let grid = GridSpec::new(128.0, 2048).unwrap();
        let inv = invariants(&soliton_field(&p, 0.0, &grid).unwrap());
        assert!((inv.mass - p.mass()).abs() < 1e-12 * p.mass());
        assert!((inv.momentum - p.momentum()).abs() < 1e-12 * p.momentum());
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let tr = evolve(&Field::zeros(grid), 0.1, &SolverConfig::with_dt(1e-3), 10).unwrap();
        assert_eq!(tr.final_state.sup_norm(), 0.0);
        assert!(tr.field.samples().iter().all(|f| f.sup_norm() == 0.0));
        assert_eq!(tr.field.len(), 10);
    }

    #[test]
    fn short_soliton_run() {
        let p = SolitonParams::new(1.0, 1.0).unwrap();
        let grid = GridSpec::new(64.0, 512).unwrap();
        let f0 = soliton_field(&p, 0.0, &grid).unwrap();
        let cfg = SolverConfig::with_dt(1e-3);
        let tr = evolve(&f0, 0.2, &cfg, 20).unwrap();
        let exact = soliton_field(&p, 0.2, &grid).unwrap();
        assert!(tr.final_state.relative_l2_error(&exact).unwrap() < 1e-8);
        assert!(tr.max_mass_drift() < 1e-10);
        assert!(tr.max_momentum_drift() < 1e-10);
        assert_eq!(tr.field.len(), 10);
        assert!((tr.field.window() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn reversible() {
        let grid = GridSpec::new(64.0, 256).unwrap();
        let f = small_random(grid, 11, 0.4);
        let cfg = SolverConfig::with_dt(2.5e-4);
        let forward = integrate(&f, 0.25, &cfg).unwrap();
        let back = integrate(&forward, -0.25, &cfg).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-8);
    }

    #[test]
    fn respects_scaling() {
        // mu^-1 u(x / mu, t / mu^3) on the dilated grid with dilated step
        let mu = 2.0;
        let p = SolitonParams::new(1.0, 1.0).unwrap();
        let grid = GridSpec::new(64.0, 512).unwrap();
        let scaled_grid = GridSpec::new(64.0 * mu, 512).unwrap();
        let f = soliton_field(&p, 0.0, &grid).unwrap();
        let fs = Field::new(scaled_grid, f.samples().iter().map(|z| z / mu).collect()).unwrap();
        let t = 0.1;
        let a = integrate(&f, t, &SolverConfig::with_dt(1e-3)).unwrap();
        let b = integrate(&fs, t * mu.powi(3), &SolverConfig::with_dt(1e-3 * mu.powi(3))).unwrap();
        let a_scaled: Vec<Complex64> = a.samples().iter().map(|z| z / mu).collect();
        let err = b.samples().iter().zip(&a_scaled).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6 * b.sup_norm(), "{err}");
    }
}
