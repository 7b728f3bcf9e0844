//! Closed-form evolution of a drift coefficient along characteristics and
//! the approach velocities of a coalescing pair.

use crate::error::{Error, Result};

/// Drift at time `t` for initial value `b0` under flux curvature `c`:
/// `b0 / (1 + t c b0)`. Fails with the critical time when the denominator
/// has run through zero.
pub fn drift_at(b0: f64, curvature: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::TimeReversed {
            system: 0.0,
            requested: t,
        });
    }
    let product = curvature * b0;
    let denominator = 1.0 + t * product;
    if denominator <= 0.0 {
        return Err(Error::Blowup {
            t_critical: -1.0 / product,
            requested: t,
        });
    }
    Ok(b0 / denominator)
}

/// Evolves a position-dependent drift profile `b0` under a
/// position-dependent flux curvature for time `t`, returning the evolved
/// profile as a function. Each position is independent, so blowup is
/// reported pointwise.
pub fn drift_evolution<B, C>(b0: B, curvature: C, t: f64) -> impl Fn(f64) -> Result<f64>
where
    B: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    move |y| drift_at(b0(y), curvature(y), t)
}

/// Fourth-order Runge-Kutta integration of the drift equation
/// `db/dt = -c b^2` from `b0` over `[0, t]`, for checking the closed form.
pub fn drift_numeric(b0: f64, curvature: f64, t: f64, steps: usize) -> f64 {
    let h = t / steps.max(1) as f64;
    let rate = |b: f64| -curvature * b * b;
    let mut b = b0;
    for _ in 0..steps.max(1) {
        let k1 = rate(b);
        let k2 = rate(b + 0.5 * h * k1);
        let k3 = rate(b + 0.5 * h * k2);
        let k4 = rate(b + h * k3);
        b += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    b
}

/// Relative approach velocities of two characteristic feet `y` and `z`
/// carrying drifts `b_y` and `b_z` toward their common shock: each foot
/// moves at the difference between the chord slope of the flux over `[z, y]`
/// and its own characteristic speed, scaled by its drift.
pub fn coalescence_velocities<F, D>(
    flux: F,
    flux_slope: D,
    y: f64,
    z: f64,
    b_y: f64,
    b_z: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if y == z {
        return Err(Error::Invalid("coalescing states must be distinct".into()));
    }
    let chord = (flux(y) - flux(z)) / (y - z);
    Ok(((chord - flux_slope(y)) * b_y, (chord - flux_slope(z)) * b_z))
}
