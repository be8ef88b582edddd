//! Fixed-step classical Runge-Kutta stepping for small linear systems.
//!
//! Fixed step (no adaptive control): the models are linear with a known
//! fastest scale, and bitwise reproducibility of sweeps matters more than
//! step-size economy here.

use nalgebra::Matrix4;
use num_complex::Complex64;
use std::ops::Add;

/// Scaling by a real step factor, for state types whose native scalar is
/// complex.
pub trait Scale {
    fn scale(&self, s: f64) -> Self;
}

impl Scale for Matrix4<Complex64> {
    fn scale(&self, s: f64) -> Self {
        self * Complex64::new(s, 0.0)
    }
}

/// One RK4 step of `dy/dt = f(y)` (autonomous right-hand side).
pub fn step<S, F>(f: F, y: &S, dt: f64) -> S
where
    S: Clone + Add<S, Output = S> + Scale,
    F: Fn(&S) -> S,
{
    let k1 = f(y);
    let k2 = f(&(y.clone() + k1.scale(dt / 2.0)));
    let k3 = f(&(y.clone() + k2.scale(dt / 2.0)));
    let k4 = f(&(y.clone() + k3.scale(dt)));
    y.clone() + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0)
}

/// Largest admissible step for a model whose fastest rate is `rate`:
/// `dt ≤ 0.05 / rate`.
pub fn step_bound(rate: f64) -> f64 {
    0.05 / rate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone)]
    struct Scalar(f64);
    impl Add for Scalar {
        type Output = Scalar;
        fn add(self, o: Scalar) -> Scalar {
            Scalar(self.0 + o.0)
        }
    }
    impl Scale for Scalar {
        fn scale(&self, s: f64) -> Scalar {
            Scalar(self.0 * s)
        }
    }

    #[test]
    fn exponential_decay_fourth_order() {
        // Global error on y' = -y over [0,1] must shrink ~16x when dt halves.
        let run = |dt: f64| {
            let mut y = Scalar(1.0);
            let n = (1.0 / dt).round() as usize;
            for _ in 0..n {
                y = step(|s: &Scalar| Scalar(-s.0), &y, dt);
            }
            (y.0 - (-1.0f64).exp()).abs()
        };
        let e1 = run(0.01);
        let e2 = run(0.005);
        assert!(e1 / e2 > 12.0, "order loss: {} / {}", e1, e2);
    }
}
