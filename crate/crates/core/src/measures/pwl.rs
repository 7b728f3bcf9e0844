use crate::error::{Error, Result};

/// Slack accepted when testing whether consecutive slopes are nondecreasing.
/// Knot values assembled from sums of products of order-one quantities carry
/// rounding of order 1e-16; slopes divide by knot spacings that the solvers
/// keep well away from zero, so 1e-9 separates genuine concavity from noise
/// by many orders of magnitude.
pub(crate) const CONVEXITY_SLACK: f64 = 1e-9;

/// Continuous piecewise-linear function on the closed interval spanned by
/// its knots. A single knot denotes the degenerate function defined at one
/// point only.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Invalid("piecewise-linear needs a knot".into()));
        }
        if knots.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::Invalid("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Unsorted(
                "knot abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// Interpolated value at `x`; errors outside the knot span. Arguments
    /// within rounding slop of an endpoint count as the endpoint, so a
    /// domain assembled by cumulative summation still accepts its nominal
    /// boundary.
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slop = 1e-9 * (hi - lo).max(1.0);
        if x < lo - slop || x > hi + slop {
            return Err(Error::OutOfDomain(format!("{x} outside [{lo}, {hi}]")));
        }
        Ok(self.eval_clamped(x))
    }

    /// Interpolated value with the argument clamped to the domain. Intended
    /// for callers that have already established membership.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if n == 1 {
            return self.knots[0].1;
        }
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = match self.knots.binary_search_by(|&(kx, _)| kx.total_cmp(&x)) {
            Ok(i) => return self.knots[i].1,
            Err(i) => i.clamp(1, n - 1),
        };
        let (x0, v0) = self.knots[i - 1];
        let (x1, v1) = self.knots[i];
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Slopes of the linear pieces, one per knot interval.
    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    pub fn is_convex(&self) -> bool {
        let s = self.slopes();
        s.windows(2).all(|w| w[1] >= w[0] - CONVEXITY_SLACK)
    }

    /// Pointwise combination `self + factor * other` on a shared domain.
    /// Knots are the union of both knot sets.
    pub fn add_scaled(&self, other: &PiecewiseLinear, factor: f64) -> Result<PiecewiseLinear> {
        let (a_lo, a_hi) = self.domain();
        let (b_lo, b_hi) = other.domain();
        let span = (a_hi - a_lo).abs().max(1.0);
        if (a_lo - b_lo).abs() > 1e-9 * span || (a_hi - b_hi).abs() > 1e-9 * span {
            return Err(Error::DomainMismatch(format!(
                "[{a_lo}, {a_hi}] vs [{b_lo}, {b_hi}]"
            )));
        }
        let mut xs: Vec<f64> = self
            .knots
            .iter()
            .map(|&(x, _)| x)
            .chain(other.knots.iter().map(|&(x, _)| x.clamp(a_lo, a_hi)))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| (x, self.eval_clamped(x) + factor * other.eval_clamped(x)))
            .collect();
        PiecewiseLinear::new(knots)
    }

    /// Legendre transform of a convex piecewise-linear function, restricted
    /// to its slope range. The result is again piecewise linear: its knots
    /// sit at the distinct slopes of the input and its slopes are the input
    /// knot abscissae. Non-convex input is rejected; hull first.
    pub fn legendre_transform(&self) -> Result<PiecewiseLinear> {
        if self.knots.len() == 1 {
            return Err(Error::Invalid(
                "legendre transform needs at least one linear piece".into(),
            ));
        }
        if !self.is_convex() {
            return Err(Error::NonConvex(
                "legendre transform of a non-convex function".into(),
            ));
        }
        let slopes = self.slopes();
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(slopes.len());
        for (i, &s) in slopes.iter().enumerate() {
            let (x0, v0) = self.knots[i];
            let value = x0 * s - v0;
            match out.last() {
                Some(&(prev, _)) if s <= prev => {}
                _ => out.push((s, value)),
            }
        }
        PiecewiseLinear::new(out)
    }
}

/// Greatest convex minorant of a piecewise-linear function, computed by a
/// monotone chain over its knots. Kept knots are a subset of the input
/// knots with their original values, so re-hulling returns the identical
/// knot list. Collinear interior knots are dropped, leaving maximal linear
/// pieces.
pub fn lower_convex_hull(f: &PiecewiseLinear) -> PiecewiseLinear {
    let knots = f.knots();
    if knots.len() <= 2 {
        return f.clone();
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for &k in knots {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let turn = (b.0 - a.0) * (k.1 - b.1) - (b.1 - a.1) * (k.0 - b.0);
            // knots within rounding of the chord count as collinear and
            // are absorbed, so a kink vanishes at the exact instant two
            // pieces align rather than one tick later
            let slack = 1e-12 * (k.0 - a.0) * a.1.abs().max(b.1.abs()).max(k.1.abs()).max(1.0);
            if turn <= slack {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    PiecewiseLinear::new(hull).expect("hull preserves knot order")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pwl(knots: &[(f64, f64)]) -> PiecewiseLinear {
        PiecewiseLinear::new(knots.to_vec()).unwrap()
    }

    #[test]
    fn eval_interpolates_and_errors_outside() {
        let f = pwl(&[(0.0, 0.0), (1.0, 2.0)]);
        assert_eq!(f.try_eval(0.5).unwrap(), 1.0);
        assert!(matches!(f.try_eval(1.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn hull_of_convex_input_is_identity() {
        let f = pwl(&[(0.0, 0.0), (1.0, -1.0), (2.0, 0.5), (3.0, 3.0)]);
        let h = lower_convex_hull(&f);
        assert_eq!(h.knots(), f.knots());
    }

    #[test]
    fn hull_drops_dominated_knots() {
        // single spike above the chord
        let f = pwl(&[(0.0, 0.0), (1.0, 5.0), (2.0, 0.0)]);
        let h = lower_convex_hull(&f);
        assert_eq!(h.knots(), &[(0.0, 0.0), (2.0, 0.0)]);
    }

    #[test]
    fn hull_is_idempotent_exactly() {
        let f = pwl(&[
            (0.0, 0.3),
            (0.5, 1.7),
            (1.0, 0.2),
            (1.5, 0.9),
            (2.0, -0.4),
            (3.0, 2.0),
        ]);
        let h1 = lower_convex_hull(&f);
        let h2 = lower_convex_hull(&h1);
        assert_eq!(h1.knots(), h2.knots());
    }

    #[test]
    fn hull_dominance_at_knots() {
        let f = pwl(&[(0.0, 1.0), (1.0, 3.0), (2.0, 0.0), (4.0, 4.0)]);
        let h = lower_convex_hull(&f);
        for &(x, v) in f.knots() {
            assert!(h.eval_clamped(x) <= v + 1e-12);
        }
    }

    #[test]
    fn legendre_rejects_non_convex() {
        let f = pwl(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert!(matches!(f.legendre_transform(), Err(Error::NonConvex(_))));
    }

    #[test]
    fn legendre_of_flat_function_collapses() {
        let f = pwl(&[(0.0, 0.0), (1.0, 0.0)]);
        let t = f.legendre_transform().unwrap();
        assert_eq!(t.knots(), &[(0.0, 0.0)]);
    }

    #[test]
    fn legendre_is_an_involution_on_interior_knots() {
        // conjugating twice recovers the function on the span of its
        // interior knots; the outermost segments survive only as boundary
        // slopes of the conjugate
        let f = pwl(&[(-1.0, 2.0), (0.0, 0.0), (1.0, -0.5), (2.0, 1.0), (3.0, 4.0)]);
        assert!(f.is_convex());
        let back = f
            .legendre_transform()
            .unwrap()
            .legendre_transform()
            .unwrap();
        assert_eq!(back.domain(), (0.0, 2.0));
        for x in [0.0, 0.4, 1.0, 1.3, 2.0] {
            assert!(
                (back.eval_clamped(x) - f.eval_clamped(x)).abs() < 1e-12,
                "at {x}"
            );
        }
    }

    #[test]
    fn add_scaled_unions_knots() {
        let f = pwl(&[(0.0, 0.0), (2.0, 2.0)]);
        let g = pwl(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]);
        let s = f.add_scaled(&g, 2.0).unwrap();
        assert_eq!(s.knots().len(), 3);
        assert_eq!(s.eval_clamped(1.0), 1.0);
        assert_eq!(s.eval_clamped(2.0), 4.0);
    }

    #[test]
    fn add_scaled_rejects_domain_mismatch() {
        let f = pwl(&[(0.0, 0.0), (2.0, 2.0)]);
        let g = pwl(&[(0.0, 1.0), (3.0, 0.0)]);
        assert!(matches!(
            f.add_scaled(&g, 1.0),
            Err(Error::DomainMismatch(_))
        ));
    }
}
