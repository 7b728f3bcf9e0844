use serde::Serialize;

use crate::error::{Error, Result};

/// Which one-sided limit a step function takes at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Piecewise-constant function with finitely many breakpoints and an
/// explicit one-sided limit convention at each of them.
///
/// `values` has one more entry than `breakpoints`: `values[i]` is the value
/// on the open interval between `breakpoints[i-1]` and `breakpoints[i]`.
/// At `breakpoints[i]` itself the function takes `values[i]` under
/// [`Side::Left`] and `values[i + 1]` under [`Side::Right`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    sides: Vec<Side>,
}

impl StepFunction {
    /// Builds a step function with a per-breakpoint limit convention.
    pub fn with_sides(breakpoints: Vec<f64>, values: Vec<f64>, sides: Vec<Side>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Invalid(format!(
                "step function needs {} values for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if sides.len() != breakpoints.len() {
            return Err(Error::Invalid(
                "one side marker per breakpoint required".into(),
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite entry in step function".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Unsorted(
                "step function breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
            sides,
        })
    }

    /// Builds a step function that takes the right limit at every breakpoint.
    pub fn right_continuous(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let sides = vec![Side::Right; breakpoints.len()];
        Self::with_sides(breakpoints, values, sides)
    }

    /// Builds a step function that takes the left limit at every breakpoint.
    pub fn left_continuous(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let sides = vec![Side::Left; breakpoints.len()];
        Self::with_sides(breakpoints, values, sides)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `x`, honouring the declared one-sided limit at breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => match self.sides[i] {
                Side::Left => self.values[i],
                Side::Right => self.values[i + 1],
            },
            Err(i) => self.values[i],
        }
    }

    /// Limit from the left at `x`, independent of the declared side.
    pub fn limit_left(&self, x: f64) -> f64 {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => self.values[i],
            Err(i) => self.values[i],
        }
    }

    /// Limit from the right at `x`, independent of the declared side.
    pub fn limit_right(&self, x: f64) -> f64 {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => self.values[i + 1],
            Err(i) => self.values[i],
        }
    }

    /// Iterator over `(breakpoint, jump)` pairs, where the jump is the right
    /// limit minus the left limit.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, self.values[i + 1] - self.values[i]))
    }
}
