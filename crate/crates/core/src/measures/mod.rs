//! Ground-level representations shared by every solver: purely atomic
//! measures, one-dimensional step functions with explicit one-sided limits,
//! and piecewise-linear functions with convex-hull and Legendre-transform
//! machinery.

mod atomic;
mod pwl;
mod step;

pub use atomic::AtomicMeasure;
pub use pwl::{lower_convex_hull, PiecewiseLinear};
pub use step::{Side, StepFunction};

use crate::error::Result;

/// Sum of weighted positive parts `x -> sum_i mass_i * (x - threshold_i)_+`
/// represented exactly as a piecewise-linear function on `[lo, hi]`.
///
/// Knots are placed at `lo`, at every threshold inside the interval and at
/// `hi`; values are evaluated directly from the defining sum so no
/// cancellation is introduced by incremental slope accumulation.
pub fn positive_part_sum(terms: &[(f64, f64)], lo: f64, hi: f64) -> Result<PiecewiseLinear> {
    use crate::error::Error;
    if !(lo < hi) {
        return Err(Error::Invalid(format!(
            "positive_part_sum needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    for &(mass, threshold) in terms {
        if !mass.is_finite() || !threshold.is_finite() {
            return Err(Error::Invalid(
                "positive_part_sum term with non-finite entry".into(),
            ));
        }
    }
    let mut xs: Vec<f64> = vec![lo, hi];
    xs.extend(
        terms
            .iter()
            .map(|&(_, th)| th)
            .filter(|&th| th > lo && th < hi),
    );
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let eval = |x: f64| -> f64 {
        terms
            .iter()
            .map(|&(mass, th)| if x > th { mass * (x - th) } else { 0.0 })
            .sum()
    };
    let knots: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, eval(x))).collect();
    PiecewiseLinear::new(knots)
}

/// Atom-wise Stieltjes sum for the shifted-characteristic integrand
/// `eta -> t * g(eta) + eta - x` against the jump measure of `m0`.
///
/// The integration range follows the half-open convention used throughout
/// the potential solver: atoms `eta` with `eta` in `(0, y)` contribute when
/// `y > 0`, atoms with `eta` in `[y, 0)` contribute when `y < 0`, and the
/// sum is empty for `y = 0`. Contributions enter with positive sign on both
/// sides; the orientation of the range is *not* applied. See
/// [`crate::genpot`] for the oriented variant used by characteristic
/// tracking.
pub fn stieltjes_integral(g: &StepFunction, m0: &StepFunction, y: f64, x: f64, t: f64) -> f64 {
    m0.jumps()
        .filter(|&(eta, _)| in_range(eta, y))
        .map(|(eta, mass)| (t * g.eval(eta) + eta - x) * mass)
        .sum()
}

/// Same atom selection as [`stieltjes_integral`] but with the standard
/// orientation of the range: for `y < 0` the sum enters with negative sign.
pub fn stieltjes_integral_oriented(
    g: &StepFunction,
    m0: &StepFunction,
    y: f64,
    x: f64,
    t: f64,
) -> f64 {
    let unsigned = stieltjes_integral(g, m0, y, x, t);
    if y < 0.0 {
        -unsigned
    } else {
        unsigned
    }
}

fn in_range(eta: f64, y: f64) -> bool {
    if y > 0.0 {
        eta > 0.0 && eta < y
    } else if y < 0.0 {
        eta >= y && eta < 0.0
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_particle_u0() -> StepFunction {
        StepFunction::right_continuous(vec![-3.0, -2.0, 1.0, 3.0], vec![0.0, 2.0, 1.0, -0.5, 1.0])
            .unwrap()
    }

    fn four_particle_m0() -> StepFunction {
        AtomicMeasure::new(vec![
            (-3.0, 0.25),
            (-2.0, 0.25),
            (1.0, 1.0 / 3.0),
            (3.0, 1.0 / 6.0),
        ])
        .unwrap()
        .cumulative_from_origin()
    }

    #[test]
    fn positive_part_sum_single_term() {
        let f = positive_part_sum(&[(1.0, 0.0)], -1.0, 2.0).unwrap();
        assert_eq!(f.try_eval(-0.5).unwrap(), 0.0);
        assert_eq!(f.try_eval(0.0).unwrap(), 0.0);
        assert!((f.try_eval(1.5).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn positive_part_sum_four_particle_potential() {
        // masses and positions of the canonical four-body data; the sum is
        // the initial cumulative-mass potential with value anchored to zero
        // on the far left.
        let terms = [
            (0.25, -3.0),
            (0.25, -2.0),
            (1.0 / 3.0, 1.0),
            (1.0 / 6.0, 3.0),
        ];
        let psi = positive_part_sum(&terms, -4.0, 4.0).unwrap();
        assert_eq!(psi.try_eval(-3.0).unwrap(), 0.0);
        assert!((psi.try_eval(-2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((psi.try_eval(1.0).unwrap() - 1.75).abs() < 1e-14);
        assert!((psi.try_eval(3.0).unwrap() - 41.0 / 12.0).abs() < 1e-14);
        // between particles the slope is the cumulative mass
        let mid = (psi.try_eval(0.5).unwrap() - psi.try_eval(-0.5).unwrap()) / 1.0;
        assert!((mid - 0.5).abs() < 1e-14);
    }

    #[test]
    fn stieltjes_matches_branch_table_at_origin() {
        // worked five-branch table of the potential at (x, t) = (0, 1)
        let u0 = four_particle_u0();
        let m0 = four_particle_m0();
        let f = |y: f64| stieltjes_integral(&u0, &m0, y, 0.0, 1.0);
        assert!((f(-4.0) - (-0.5)).abs() < 1e-15);
        assert!((f(-3.0) - (-0.5)).abs() < 1e-15);
        assert!((f(-2.5) - (-0.25)).abs() < 1e-15);
        assert!((f(-2.0) - (-0.25)).abs() < 1e-15);
        assert!((f(-1.0) - 0.0).abs() < 1e-15);
        assert!((f(0.5) - 0.0).abs() < 1e-15);
        assert!((f(1.0) - 0.0).abs() < 1e-15);
        assert!((f(2.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((f(3.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((f(4.0) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn stieltjes_empty_measure_is_zero() {
        let u0 = four_particle_u0();
        let empty = StepFunction::right_continuous(vec![], vec![0.0]).unwrap();
        assert_eq!(stieltjes_integral(&u0, &empty, 2.0, 5.0, 1.0), 0.0);
    }

    #[test]
    fn stieltjes_at_zero_is_empty_sum() {
        let u0 = four_particle_u0();
        let m0 = four_particle_m0();
        assert_eq!(stieltjes_integral(&u0, &m0, 0.0, 7.5, 2.0), 0.0);
    }

    #[test]
    fn oriented_variant_flips_negative_side_only() {
        let u0 = four_particle_u0();
        let m0 = four_particle_m0();
        let plain = stieltjes_integral(&u0, &m0, -4.0, 0.0, 1.0);
        let oriented = stieltjes_integral_oriented(&u0, &m0, -4.0, 0.0, 1.0);
        assert_eq!(plain, -oriented);
        let plain_pos = stieltjes_integral(&u0, &m0, 4.0, 0.0, 1.0);
        let oriented_pos = stieltjes_integral_oriented(&u0, &m0, 4.0, 0.0, 1.0);
        assert_eq!(plain_pos, oriented_pos);
    }
}
