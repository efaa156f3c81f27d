use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest accepted difference between the order-`N` and order-`2N` rules.
pub const SU2_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Su2Moment {
    pub value: f64,
    /// `|I_N - I_2N|`.
    pub error_estimate: f64,
    pub order: usize,
}

fn integrate(l1: f64, l2: f64, n: u32, order: usize) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"));
    let l3 = 1.0 - l1 - l2;
    let inner = |theta: f64| {
        let c = (theta / 2.0).cos();
        rule.integrate(0.0, 2.0 * PI, |phi| {
            rule.integrate(0.0, 4.0 * PI, |psi| {
                let alpha = Complex64::from_polar(c, (phi + psi) / 2.0);
                (l1 * alpha + l2 * alpha.conj() + l3).powu(n).re
            })
        }) * theta.sin()
    };
    rule.integrate(0.0, PI, inner) / (16.0 * PI * PI)
}

/// Haar expectation of `(l1 alpha + l2 conj(alpha) + 1 - l1 - l2)^n`, Gauss-Legendre in all three Euler angles.
pub fn su2_moment(l1: f64, l2: f64, n: u32, order: usize) -> Result<Su2Moment> {
    if order < 2 {
        return invalid("quadrature order must be at least 2");
    }
    if !(l1 >= 0.0 && l2 >= 0.0 && l1 + l2 <= 1.0) {
        return invalid(format!("({l1}, {l2}) outside U"));
    }
    let coarse = integrate(l1, l2, n, order);
    let fine = integrate(l1, l2, n, 2 * order);
    let error_estimate = (fine - coarse).abs();
    if error_estimate > SU2_TOLERANCE {
        return Err(Error::NoConvergence(format!(
            "quadrature error {error_estimate:e} at order {order}; raise the order"
        )));
    }
    Ok(Su2Moment {
        value: fine,
        error_estimate,
        order,
    })
}
