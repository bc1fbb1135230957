//! Two-soliton sweeps showing failure of uniform continuity of the solution
//! map in `M^{2,p}_s`.
//!
//! For each dyadic `N` two solitons with a shared scale `lambda` and carriers
//! `N1 = N`, `N2 = N + dN` are compared: their norms stay of order one, their
//! initial distance vanishes as `N` grows, and their distance at time `T`
//! does not. Evolution is exact; the solver only enters as an optional
//! cross-check.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{modulation_norm_with, CubeMasses, Exponent};
use crate::solitons::{
    difference_density, max_pair_overlap, quadrature_cube_masses, soliton_field, soliton_field_in_frame, soliton_modulation_norm_with,
    Frame, SolitonParams, SPECTRAL_RADIUS,
};
use crate::solver::{integrate, SolverConfig};
use crate::spectral::{Field, GridSpec, Window};
use crate::stats::{linear_fit, log_log_fit, median, LinearFit};

/// Largest grid the harness will build for one sweep point.
pub const MAX_GRID_POINTS: usize = 1 << 22;

/// Relative agreement required between grid norms and their quadrature oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-4;

/// Relative agreement required between the solver and the exact solution.
pub const SOLVER_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NonnegS,
    NegS,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NonnegS => "nonneg-s",
            Regime::NegS => "neg-s",
        })
    }
}

/// Verdict thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest allowed `max / min` of the solution norms.
    pub norm_band: f64,
    /// Smallest allowed `diffT / median(norm_u)` over the top half.
    pub diff_fraction: f64,
    /// Relative tolerance when matching the fitted exponent to its prediction.
    pub slope_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            norm_band: 3.0,
            diff_fraction: 0.3,
            slope_tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub s: f64,
    pub p: Exponent,
    pub t_final: f64,
    pub n_list: Vec<f64>,
    pub theta: f64,
    pub regime: Regime,
    pub use_solver: bool,
    /// Multiplies the separation `N2 - N1`; zero makes the two sequences equal.
    pub separation: f64,
    pub window: Window,
    pub thresholds: Thresholds,
}

/// Default `theta`: `(1 - 4s)/4` for `s >= 0`, `-ps + 0.05` for `s < 0`.
pub fn default_theta(s: f64, p: Exponent) -> f64 {
    if s >= 0.0 {
        (1.0 - 4.0 * s) / 4.0
    } else {
        -p.value() * s + 0.05
    }
}

/// Dyadic values `2^k` in `[n_min, n_max]`.
pub fn dyadic_range(n_min: f64, n_max: f64) -> Vec<f64> {
    let lo = n_min.max(1.0).log2().ceil() as i32;
    let hi = n_max.log2().floor() as i32;
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

impl ExperimentPlan {
    /// Validates the regime conditions; `theta = None` picks the default.
    pub fn new(s: f64, p: Exponent, t_final: f64, n_list: Vec<f64>, theta: Option<f64>) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::param("T", format!("{t_final} must be positive")));
        }
        if p.value() < 2.0 {
            return Err(Error::param("p", format!("{p} must be at least 2")));
        }
        if n_list.is_empty() || n_list.iter().any(|n| !(*n >= 1.0 && n.is_finite())) {
            return Err(Error::param("N", "need a non-empty list of N >= 1"));
        }
        let theta = theta.unwrap_or_else(|| default_theta(s, p));
        let regime = if (0.0..0.25).contains(&s) {
            if !(theta > 0.0 && 4.0 * s - 1.0 + 2.0 * theta < 0.0) {
                return Err(Error::Regime(format!(
                    "theta = {theta} violates 0 < theta, 4s - 1 + 2 theta < 0 at s = {s}"
                )));
            }
            Regime::NonnegS
        } else if s < 0.0 {
            let Exponent::Finite(pv) = p else {
                return Err(Error::Regime("negative s needs p < inf".into()));
            };
            if s <= -1.0 / pv {
                return Err(Error::Regime(format!("s = {s} outside -1/p < s < 0 for p = {pv}")));
            }
            if !(-pv * s < theta && theta < 1.0) {
                return Err(Error::Regime(format!("theta = {theta} outside -ps < theta < 1")));
            }
            Regime::NegS
        } else {
            return Err(Error::Regime(format!(
                "s = {s} outside 0 <= s < 1/4 and -1/p < s < 0"
            )));
        };
        let mut n_list = n_list;
        n_list.sort_by(f64::total_cmp);
        n_list.dedup();
        Ok(ExperimentPlan {
            s,
            p,
            t_final,
            n_list,
            theta,
            regime,
            use_solver: false,
            separation: 1.0,
            window: Window::CosSquared,
            thresholds: Thresholds::default(),
        })
    }

    /// The default nonnegative plan: `s = 1/8`, `p = 4`, `T = 1`, `N = 2^4..2^10`.
    pub fn default_nonneg() -> Self {
        ExperimentPlan::new(0.125, Exponent::Finite(4.0), 1.0, dyadic_range(16.0, 1024.0), None)
            .expect("default plan is valid")
    }

    /// The default negative plan: `s = -1/8`, `p = 4`, `T = 1`, `theta = 0.55`.
    pub fn default_neg() -> Self {
        ExperimentPlan::new(-0.125, Exponent::Finite(4.0), 1.0, dyadic_range(16.0, 1024.0), Some(0.55))
            .expect("default plan is valid")
    }

    fn p_value(&self) -> f64 {
        self.p.value()
    }

    /// Predicted log-log slope of `diff0`.
    pub fn expected_slope(&self) -> f64 {
        let (s, th) = (self.s, self.theta);
        match self.regime {
            Regime::NonnegS => 4.0 * s - 1.0 + 2.0 * th,
            Regime::NegS => s + 1.5 * (th + self.p_value() * s) - 1.0,
        }
    }

    /// Exponent `kappa` in the tail bound `exp(-c N^kappa)`.
    pub fn tail_exponent(&self) -> f64 {
        match self.regime {
            Regime::NonnegS => self.theta + 2.0 * self.s,
            Regime::NegS => self.theta + self.p_value() * self.s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointParameters {
    pub lambda: f64,
    pub theta: f64,
    pub n1: f64,
    pub n2: f64,
}

impl PointParameters {
    pub fn separation(&self) -> f64 {
        self.n2 - self.n1
    }
}

/// `lambda`, `theta`, `N1`, `N2` for one sweep point. `N2 - N1` stays real.
pub fn choose_parameters(plan: &ExperimentPlan, n: f64) -> PointParameters {
    let (s, th, t) = (plan.s, plan.theta, plan.t_final);
    let (lambda, dn) = match plan.regime {
        Regime::NonnegS => (n.powf(-2.0 * s), n.powf(2.0 * s - 1.0 + 2.0 * th) / t),
        Regime::NegS => {
            let p = plan.p_value();
            (n.powf(-p * s), n.powf(p * s - 1.0 + 1.5 * th) / t)
        }
    };
    PointParameters {
        lambda,
        theta: th,
        n1: n,
        n2: n + plan.separation * dn,
    }
}

/// Grid covering both solitons in a frame co-moving with their midpoint and
/// demodulated by the carrier `round(N1)`. The box is at least twice the
/// separation at `T`, so the two solitons are never closer around the back.
pub fn point_grid(plan: &ExperimentPlan, point: &PointParameters) -> Result<(GridSpec, i64)> {
    let carrier = point.n1.round() as i64;
    let spread = 3.0 * (point.n2 * point.n2 - point.n1 * point.n1).abs() * plan.t_final;
    // the periodic distance L - spread must not undercut the true one
    let min_length = 2.0 * spread + 80.0 / point.lambda;
    let reach = (point.n1 - carrier as f64).abs().max((point.n2 - carrier as f64).abs());
    let min_nyquist = (reach + SPECTRAL_RADIUS * point.lambda + 2.0).max(8.0);
    let grid = GridSpec::covering(min_length, min_nyquist)?;
    if grid.points() > MAX_GRID_POINTS {
        return Err(Error::Infeasible {
            n: point.n1,
            reason: format!("needs {} grid points (L = {:.1})", grid.points(), grid.length()),
            cap: feasible_cap(plan, point.n1),
        });
    }
    Ok((grid, carrier))
}

fn feasible_cap(plan: &ExperimentPlan, n: f64) -> f64 {
    let mut m = n / 2.0;
    while m >= 1.0 {
        let pt = choose_parameters(plan, m);
        let spread = 3.0 * (pt.n2 * pt.n2 - pt.n1 * pt.n1).abs() * plan.t_final;
        let fits = GridSpec::covering(2.0 * spread + 80.0 / pt.lambda, (SPECTRAL_RADIUS * pt.lambda + 3.0).max(8.0))
            .map(|g| g.points() <= MAX_GRID_POINTS)
            .unwrap_or(false);
        if fits {
            return m;
        }
        m /= 2.0;
    }
    0.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: f64,
    pub n1: f64,
    pub n2: f64,
    pub lambda: f64,
    pub theta: f64,
    pub norm_u: f64,
    pub norm_v: f64,
    pub diff0: f64,
    pub diff_t: f64,
    /// Norm of the `|xi - N| >= N^theta` part of `u`.
    pub tail: f64,
    /// Reference size of the initial difference: `N^{2s} |N1 - N2|`, or
    /// `N^s lambda^{-1/2} |N1 - N2|` for negative `s`.
    pub diff0_reference: f64,
    pub oracle_norm_u: f64,
    pub oracle_norm_v: f64,
    pub oracle_diff0: f64,
    pub oracle_diff_t: f64,
    /// Largest relative grid-versus-quadrature discrepancy over the four norms.
    pub oracle_discrepancy: f64,
    /// Relative change of the grid norms between `t = 0` and `t = T`.
    pub time_variation: f64,
    pub solver_error: Option<f64>,
    pub grid_length: f64,
    pub grid_points: usize,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Quadrature masses of `|u_hat(xi, t) - v_hat(xi, t)|^2` per cube.
fn difference_masses(u: &SolitonParams, v: &SolitonParams, t: f64, window: Window) -> CubeMasses {
    let (lo_u, hi_u) = u.band();
    let (lo_v, hi_v) = v.band();
    quadrature_cube_masses(
        difference_density(u, v, t),
        lo_u.min(lo_v).floor() as i64,
        hi_u.max(hi_v).ceil() as i64,
        window,
        &[],
        1e-10,
    )
}

/// Modulation norm of the part of `u` with `|xi - N| >= N^theta`.
pub fn tail_norm(u: &SolitonParams, n: f64, theta: f64, s: f64, p: Exponent, window: Window) -> f64 {
    let cut = n.powf(theta);
    let reach = cut + SPECTRAL_RADIUS * u.scale + 1.0;
    let masses = quadrature_cube_masses(
        |xi| {
            if (xi - n).abs() >= cut {
                u.spectral_density(xi)
            } else {
                0.0
            }
        },
        (n - reach).floor() as i64,
        (n + reach).ceil() as i64,
        window,
        &[n - cut, n + cut],
        1e-10,
    );
    masses.weighted_norm(s, p, 0)
}

/// Relative L^2 error of the solver against the exact soliton at `T`, in the
/// lab frame. The box is periodic, so the soliton may wrap around it.
pub fn solver_cross_check(u: &SolitonParams, t_final: f64) -> Result<f64> {
    let grid = GridSpec::covering(
        (80.0 / u.scale).max(64.0),
        u.carrier.abs() + SPECTRAL_RADIUS * u.scale + 2.0,
    )?;
    let f0 = soliton_field(u, 0.0, &grid)?;
    let exact = soliton_field(u, t_final, &grid)?;
    let cfl_dt = 0.1 / (6.0 * u.amplitude().powi(2) * grid.nyquist());
    // the check targets SOLVER_TOLERANCE, so the drift guard is relaxed to match
    let cfg = SolverConfig {
        mass_tolerance: 1e-6,
        ..SolverConfig::with_dt(cfl_dt.min(5e-4))
    };
    let evolved = integrate(&f0, t_final, &cfg)?;
    evolved.relative_l2_error(&exact)
}

/// Measures one sweep point.
pub fn run_point(plan: &ExperimentPlan, n: f64) -> Result<ExperimentRecord> {
    let point = choose_parameters(plan, n);
    let u = SolitonParams::new(point.n1, point.lambda)?;
    let v = SolitonParams::new(point.n2, point.lambda)?;
    let (grid, carrier) = point_grid(plan, &point)?;
    let t = plan.t_final;
    let (s, p, window) = (plan.s, plan.p, plan.window);

    let start = Frame::new(carrier, 0.0);
    let later = Frame::new(carrier, 0.5 * (u.center(t) + v.center(t)));
    let norm = |f: &Field| modulation_norm_with(f, s, p, window, carrier);

    let u0 = soliton_field_in_frame(&u, 0.0, &grid, start)?;
    let v0 = soliton_field_in_frame(&v, 0.0, &grid, start)?;
    let ut = soliton_field_in_frame(&u, t, &grid, later)?;
    let vt = soliton_field_in_frame(&v, t, &grid, later)?;

    let norm_u = norm(&u0)?;
    let norm_v = norm(&v0)?;
    let time_variation = relative_gap(norm_u, norm(&ut)?).max(relative_gap(norm_v, norm(&vt)?));
    let diff0 = norm(&u0.sub(&v0)?)?;
    let diff_t = norm(&ut.sub(&vt)?)?;

    let oracle_norm_u = soliton_modulation_norm_with(&u, s, p, window);
    let oracle_norm_v = soliton_modulation_norm_with(&v, s, p, window);
    let oracle_diff0 = difference_masses(&u, &v, 0.0, window).weighted_norm(s, p, 0);
    let oracle_diff_t = difference_masses(&u, &v, t, window).weighted_norm(s, p, 0);
    let oracle_discrepancy = [
        relative_gap(norm_u, oracle_norm_u),
        relative_gap(norm_v, oracle_norm_v),
        relative_gap(diff0, oracle_diff0),
        relative_gap(diff_t, oracle_diff_t),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if oracle_discrepancy > ORACLE_TOLERANCE {
        return Err(Error::Format(format!(
            "grid and quadrature norms disagree by {oracle_discrepancy:.2e} at N = {n}"
        )));
    }

    let tail = tail_norm(&u, n, point.theta, s, p, window);
    let sep = point.separation().abs();
    let diff0_reference = match plan.regime {
        Regime::NonnegS => n.powf(2.0 * s) * sep,
        Regime::NegS => n.powf(s) * point.lambda.powf(-0.5) * sep,
    };
    let solver_error = if plan.use_solver && n == plan.n_list[0] {
        let err = solver_cross_check(&u, t)?;
        if err > SOLVER_TOLERANCE {
            return Err(Error::Format(format!(
                "solver deviates from the exact solution by {err:.2e} at N = {n}"
            )));
        }
        Some(err)
    } else {
        None
    };

    Ok(ExperimentRecord {
        n,
        n1: point.n1,
        n2: point.n2,
        lambda: point.lambda,
        theta: point.theta,
        norm_u,
        norm_v,
        diff0,
        diff_t,
        tail,
        diff0_reference,
        oracle_norm_u,
        oracle_norm_v,
        oracle_diff0,
        oracle_diff_t,
        oracle_discrepancy,
        time_variation,
        solver_error,
        grid_length: grid.length(),
        grid_points: grid.points(),
    })
}

/// Largest cube overlap `|<Pi_n u(T), Pi_n v(T)>|` of the sweep pair at `N`,
/// and that overlap times `N |N1 - N2| T`.
pub fn overlap_ratio(plan: &ExperimentPlan, n: f64) -> Result<(f64, f64)> {
    let point = choose_parameters(plan, n);
    let u = SolitonParams::new(point.n1, point.lambda)?;
    let v = SolitonParams::new(point.n2, point.lambda)?;
    let (grid, carrier) = point_grid(plan, &point)?;
    let t = plan.t_final;
    let frame = Frame::new(carrier, 0.5 * (u.center(t) + v.center(t)));
    let (_, overlap) = max_pair_overlap(&u, &v, t, &grid, frame)?;
    Ok((overlap, overlap * n * point.separation().abs() * t))
}

/// Runs every point of the plan in parallel; records come back ordered by `N`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    plan.n_list.par_iter().map(|&n| run_point(plan, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    NormU,
    NormV,
    Diff0,
    Diff0Squared,
    DiffT,
    Tail,
}

impl Observable {
    pub fn of(self, r: &ExperimentRecord) -> f64 {
        match self {
            Observable::NormU => r.norm_u,
            Observable::NormV => r.norm_v,
            Observable::Diff0 => r.diff0,
            Observable::Diff0Squared => r.diff0 * r.diff0,
            Observable::DiffT => r.diff_t,
            Observable::Tail => r.tail,
        }
    }
}

/// Log-log slope of an observable against `N`; needs at least four records
/// spanning three octaves.
pub fn fit_exponent(records: &[ExperimentRecord], observable: Observable) -> Result<LinearFit> {
    if records.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} records, need 4", records.len())));
    }
    let ns: Vec<f64> = records.iter().map(|r| r.n).collect();
    let lo = ns.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ns.iter().cloned().fold(0.0, f64::max);
    if (hi / lo).log2() < 3.0 - 1e-12 {
        return Err(Error::DegenerateFit(format!("N spans {lo}..{hi}, need three octaves")));
    }
    let values: Vec<f64> = records.iter().map(|r| observable.of(r)).collect();
    log_log_fit(&ns, &values)
}

/// Fitted `c` in `tail ~ exp(-c N^kappa)`.
pub fn fit_tail_rate(records: &[ExperimentRecord], kappa: f64) -> Result<LinearFit> {
    if records.iter().any(|r| !(r.tail > 0.0)) {
        return Err(Error::DegenerateFit("tail underflowed to zero".into()));
    }
    let x: Vec<f64> = records.iter().map(|r| r.n.powf(kappa)).collect();
    let y: Vec<f64> = records.iter().map(|r| r.tail.ln()).collect();
    linear_fit(&x, &y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMatch {
    Norm,
    Square,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub regime: Regime,
    pub s: f64,
    pub p: f64,
    pub theta: f64,
    pub t_final: f64,
    pub thresholds: Thresholds,
    /// (a) `max / min` of the solution norms.
    pub bounded: Check,
    /// (b) fitted `diff0` slope; passes when negative and `diff0` strictly decreases.
    pub vanishing: Check,
    pub strictly_decreasing: bool,
    /// (c) `min diffT` over the top half of the sweep divided by the median norm.
    pub separated: Check,
    pub expected_slope: f64,
    pub diff0_fit: Option<LinearFit>,
    pub diff0_squared_slope: Option<f64>,
    pub exponent_match: ExponentMatch,
    pub tail_rate: Option<f64>,
    pub tail_fit_r2: Option<f64>,
    /// `max diff0 / diff0_reference`.
    pub diff0_bound_constant: f64,
    pub triangle_holds: bool,
    pub max_oracle_discrepancy: f64,
    pub max_time_variation: f64,
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

pub fn verify_lemma(records: &[ExperimentRecord], plan: &ExperimentPlan) -> Verdict {
    let th = plan.thresholds;
    let norms: Vec<f64> = records.iter().flat_map(|r| [r.norm_u, r.norm_v]).collect();
    let max = norms.iter().cloned().fold(0.0, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let band = if min > 0.0 { max / min } else { f64::INFINITY };
    let bounded = Check {
        pass: band <= th.norm_band,
        value: band,
        threshold: th.norm_band,
    };

    let strictly_decreasing = records.windows(2).all(|w| w[1].diff0 < w[0].diff0);
    let diff0_fit = fit_exponent(records, Observable::Diff0).ok();
    let slope = diff0_fit.map_or(f64::NAN, |f| f.slope);
    let vanishing = Check {
        pass: strictly_decreasing && slope < 0.0,
        value: slope,
        threshold: 0.0,
    };

    let median_norm = median(&records.iter().map(|r| r.norm_u).collect::<Vec<_>>());
    let top = &records[records.len() / 2..];
    let min_top = top.iter().map(|r| r.diff_t).fold(f64::INFINITY, f64::min);
    let ratio = if median_norm > 0.0 { min_top / median_norm } else { 0.0 };
    let separated = Check {
        pass: ratio >= th.diff_fraction,
        value: ratio,
        threshold: th.diff_fraction,
    };

    let expected = plan.expected_slope();
    let squared = diff0_fit.map(|f| 2.0 * f.slope);
    let exponent_match = if within(slope, expected, th.slope_tolerance) {
        ExponentMatch::Norm
    } else if squared.is_some_and(|q| within(q, expected, th.slope_tolerance)) {
        ExponentMatch::Square
    } else {
        ExponentMatch::Neither
    };

    let tail = fit_tail_rate(records, plan.tail_exponent()).ok();
    let bound = records
        .iter()
        .filter(|r| r.diff0_reference > 0.0)
        .map(|r| r.diff0 / r.diff0_reference)
        .fold(0.0, f64::max);

    Verdict {
        pass: bounded.pass && vanishing.pass && separated.pass,
        regime: plan.regime,
        s: plan.s,
        p: plan.p_value(),
        theta: plan.theta,
        t_final: plan.t_final,
        thresholds: th,
        bounded,
        vanishing,
        strictly_decreasing,
        separated,
        expected_slope: expected,
        diff0_fit,
        diff0_squared_slope: squared,
        exponent_match,
        tail_rate: tail.map(|f| -f.slope),
        tail_fit_r2: tail.map(|f| f.r2),
        diff0_bound_constant: bound,
        triangle_holds: records
            .iter()
            .all(|r| r.diff_t <= (r.norm_u + r.norm_v) * (1.0 + 1e-12)),
        max_oracle_discrepancy: records.iter().map(|r| r.oracle_discrepancy).fold(0.0, f64::max),
        max_time_variation: records.iter().map(|r| r.time_variation).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_with(n_list: Vec<f64>) -> ExperimentPlan {
        ExperimentPlan::new(0.125, Exponent::Finite(4.0), 1.0, n_list, None).unwrap()
    }

    #[test]
    fn nonneg_parameters() {
        let plan = plan_with(vec![64.0]);
        let pt = choose_parameters(&plan, 64.0);
        assert!((pt.lambda - 64f64.powf(-0.25)).abs() < 1e-15);
        assert_eq!(pt.theta, 0.125);
        // 64^{2s - 1 + 2 theta} = 64^{-1/2}
        assert!((pt.separation() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn zero_s_keeps_unit_scale() {
        let plan = ExperimentPlan::new(0.0, Exponent::Finite(4.0), 1.0, vec![16.0, 256.0], None).unwrap();
        for n in [16.0, 256.0] {
            assert_eq!(choose_parameters(&plan, n).lambda, 1.0);
        }
    }

    #[test]
    fn neg_parameters() {
        let plan = ExperimentPlan::default_neg();
        assert_eq!(plan.regime, Regime::NegS);
        assert_eq!(plan.theta, 0.55);
        let pt = choose_parameters(&plan, 64.0);
        assert!((pt.lambda - 8.0).abs() < 1e-12);
        assert!((plan.expected_slope() + 1.05).abs() < 1e-12);
        assert!((default_theta(-0.125, Exponent::Finite(4.0)) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn boundary_is_refused() {
        let err = ExperimentPlan::new(0.25, Exponent::Finite(4.0), 1.0, vec![16.0], None);
        assert!(matches!(err, Err(Error::Regime(_))));
        assert!(ExperimentPlan::new(-0.3, Exponent::Finite(4.0), 1.0, vec![16.0], None).is_err());
        assert!(ExperimentPlan::new(-0.1, Exponent::Infinity, 1.0, vec![16.0], None).is_err());
        assert!(ExperimentPlan::new(0.125, Exponent::Finite(4.0), 1.0, vec![16.0], Some(0.4)).is_err());
    }

    #[test]
    fn dyadic_lists() {
        assert_eq!(dyadic_range(16.0, 1024.0).len(), 7);
        assert_eq!(dyadic_range(10.0, 40.0), vec![16.0, 32.0]);
    }

    #[test]
    fn point_matches_oracle_and_is_time_invariant() {
        let plan = plan_with(vec![32.0]);
        let r = run_point(&plan, 32.0).unwrap();
        assert!(r.oracle_discrepancy < 1e-6, "{}", r.oracle_discrepancy);
        assert!(r.time_variation < 1e-8);
        assert!(r.diff_t <= r.norm_u + r.norm_v);
        assert!(r.diff0 < r.diff_t);
    }

    #[test]
    fn identical_solutions_have_zero_distance() {
        let mut plan = plan_with(vec![16.0, 32.0, 64.0, 128.0]);
        plan.separation = 0.0;
        let records = run_plan(&plan).unwrap();
        assert!(records.iter().all(|r| r.diff0 == 0.0 && r.diff_t == 0.0));
        let verdict = verify_lemma(&records, &plan);
        assert!(!verdict.pass);
        assert!(!verdict.separated.pass);
    }

    #[test]
    fn fit_needs_three_octaves() {
        let plan = plan_with(vec![16.0, 32.0, 64.0]);
        let records = run_plan(&plan).unwrap();
        assert!(fit_exponent(&records, Observable::Diff0).is_err());
    }

    #[test]
    fn infeasible_grid_names_a_cap() {
        let plan = ExperimentPlan::default_neg();
        match run_point(&plan, 1e9) {
            Err(Error::Infeasible { cap, .. }) => assert!(cap >= 1.0 && cap < 1e9),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
