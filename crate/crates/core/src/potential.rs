//! Nonnegative potentials `G` for the Klein-Gordon equation
//! `u_tt - omega^2 Laplace(u) + G'(u) = 0`.

use std::fmt::Debug;

/// Below this separation the divided difference falls back to its
/// midpoint expansion.
pub const DIVIDED_DIFFERENCE_THRESHOLD: f64 = 1e-8;

pub trait Potential: Debug + Send + Sync {
    /// `G(u)`, required to be nonnegative.
    fn value(&self, u: f64) -> f64;
    /// `G'(u)`.
    fn derivative(&self, u: f64) -> f64;
    /// `G'''(u)`, used by the short-segment expansion of the divided difference.
    fn third_derivative(&self, u: f64) -> f64;

    /// `int_0^1 G'((1 - xi) a + xi b) dxi = (G(b) - G(a)) / (b - a)`.
    ///
    /// For `|b - a|` below [`DIVIDED_DIFFERENCE_THRESHOLD`] this uses
    /// `G'(m) + G'''(m) d^2 / 24` around the midpoint `m`.
    fn divided_difference(&self, a: f64, b: f64) -> f64 {
        let d = b - a;
        if d.abs() < DIVIDED_DIFFERENCE_THRESHOLD {
            let m = 0.5 * (a + b);
            self.derivative(m) + self.third_derivative(m) * d * d / 24.0
        } else {
            (self.value(b) - self.value(a)) / d
        }
    }
}

/// `G(u) = 1 - cos(u)`, so `G'(u) = sin(u)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SineGordon;

impl Potential for SineGordon {
    fn value(&self, u: f64) -> f64 {
        let s = (0.5 * u).sin();
        2.0 * s * s
    }

    fn derivative(&self, u: f64) -> f64 {
        u.sin()
    }

    fn third_derivative(&self, u: f64) -> f64 {
        -u.cos()
    }

    // (cos a - cos b)/(b - a) = sin(m) sin(d/2)/(d/2)
    fn divided_difference(&self, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        m.sin() * crate::phi::sinc(0.5 * (b - a))
    }
}

/// `G(u) = u^4 / 4`, so `G'(u) = u^3`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quartic;

impl Potential for Quartic {
    fn value(&self, u: f64) -> f64 {
        let u2 = u * u;
        0.25 * u2 * u2
    }

    fn derivative(&self, u: f64) -> f64 {
        u * u * u
    }

    fn third_derivative(&self, u: f64) -> f64 {
        6.0 * u
    }

    fn divided_difference(&self, a: f64, b: f64) -> f64 {
        0.25 * (a + b) * (a * a + b * b)
    }
}

/// `G = 0`: the linear Klein-Gordon equation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Free;

impl Potential for Free {
    fn value(&self, _: f64) -> f64 {
        0.0
    }
    fn derivative(&self, _: f64) -> f64 {
        0.0
    }
    fn third_derivative(&self, _: f64) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `G = cosh(u) - 1`, exercising the default divided difference.
    #[derive(Debug)]
    struct Cosh;

    impl Potential for Cosh {
        fn value(&self, u: f64) -> f64 {
            let s = (0.5 * u).sinh();
            2.0 * s * s
        }
        fn derivative(&self, u: f64) -> f64 {
            u.sinh()
        }
        fn third_derivative(&self, u: f64) -> f64 {
            u.sinh()
        }
    }

    fn cosh_dd_exact(a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        let hd = 0.5 * (b - a);
        m.sinh() * if hd == 0.0 { 1.0 } else { hd.sinh() / hd }
    }

    #[test]
    fn default_divided_difference_both_branches() {
        for &(a, b) in &[(0.3, 0.9), (1.2, 1.2 + 3e-9), (-0.7, -0.7 - 5e-9), (2.0, 2.0)] {
            let got = Cosh.divided_difference(a, b);
            let want = cosh_dd_exact(a, b);
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{a} {b}: {got} {want}");
        }
    }

    #[test]
    fn closed_forms_match_quotient() {
        for &(a, b) in &[(0.1, 0.7), (-2.0, 1.5), (3.0, 3.1)] {
            for p in [&SineGordon as &dyn Potential, &Quartic] {
                let q = (p.value(b) - p.value(a)) / (b - a);
                assert!((p.divided_difference(a, b) - q).abs() < 1e-13);
            }
        }
        assert_eq!(Quartic.divided_difference(2.0, 2.0), 8.0);
        assert!((SineGordon.divided_difference(1.0, 1.0) - 1.0f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn sine_gordon_potential_is_one_minus_cos() {
        for u in [-3.0, 0.0, 0.5, 2.0] {
            assert!((SineGordon.value(u) - (1.0 - f64::cos(u))).abs() < 1e-15);
            assert!(SineGordon.value(u) >= 0.0);
        }
    }
}
