use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Frequency window `psi` supported in `[-1, 1]` whose integer translates sum
/// to one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    /// `cos^2(pi xi / 2)`.
    #[default]
    CosSquared,
    /// `(1 - xi^2)^2` divided by the sum of its integer translates.
    QuarticBump,
}

fn quartic_raw(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - xi * xi;
        t * t
    }
}

impl Window {
    pub fn eval(self, xi: f64) -> f64 {
        if xi.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Window::CosSquared => {
                let c = (0.5 * PI * xi).cos();
                c * c
            }
            Window::QuarticBump => {
                // only the translates by -1, 0, +1 overlap [-1, 1]; for xi in
                // (-1, 1) exactly two of them are nonzero
                let f = xi.floor();
                let a = quartic_raw(xi - f);
                let b = quartic_raw(xi - f - 1.0);
                quartic_raw(xi) / (a + b)
            }
        }
    }

    /// Value of the window centered at `n`, evaluated at `xi`.
    #[inline]
    pub fn at(self, xi: f64, n: i64) -> f64 {
        self.eval(xi - n as f64)
    }

    /// The two cubes `(n, n + 1)` whose windows can be nonzero at `xi`, with
    /// their weights.
    #[inline]
    pub fn split(self, xi: f64) -> [(i64, f64); 2] {
        let n = xi.floor();
        let lo = n as i64;
        [(lo, self.eval(xi - n)), (lo + 1, self.eval(xi - n - 1.0))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cos_squared_values() {
        let w = Window::CosSquared;
        assert_eq!(w.eval(0.0), 1.0);
        assert!(w.eval(1.0).abs() < 1e-16);
        assert!(w.eval(-1.0).abs() < 1e-16);
        assert!((w.eval(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(w.eval(1.5), 0.0);
    }

    #[test]
    fn symmetric() {
        for w in [Window::CosSquared, Window::QuarticBump] {
            for k in 0..50 {
                let xi = k as f64 / 50.0;
                assert!((w.eval(xi) - w.eval(-xi)).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(xi in -200.0f64..200.0) {
            for w in [Window::CosSquared, Window::QuarticBump] {
                let n0 = xi.floor() as i64;
                let total: f64 = (n0 - 3..=n0 + 3).map(|n| w.at(xi, n)).sum();
                prop_assert!((total - 1.0).abs() < 1e-14);
                let [(a, wa), (b, wb)] = w.split(xi);
                prop_assert!((wa - w.at(xi, a)).abs() < 1e-15);
                prop_assert!((wa + wb - 1.0).abs() < 1e-14);
                prop_assert_eq!(b, a + 1);
            }
        }
    }
}
