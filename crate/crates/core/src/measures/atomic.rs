use crate::error::{Error, Result};
use crate::measures::{Side, StepFunction};

/// Purely atomic nonnegative measure: finitely many point masses at
/// strictly increasing locations. Zero and negative masses are rejected at
/// construction so that every atom is a genuine carrier of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            if !x.is_finite() || !m.is_finite() {
                return Err(Error::Invalid("non-finite atom".into()));
            }
            if m <= 0.0 {
                return Err(Error::Invalid(format!(
                    "atom at {x} has non-positive mass {m}"
                )));
            }
        }
        if atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Unsorted(
                "atom locations must be strictly increasing".into(),
            ));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }

    /// Right-continuous cumulative mass `x -> measure((-inf, x])`.
    pub fn cumulative(&self) -> StepFunction {
        let breakpoints: Vec<f64> = self.atoms.iter().map(|&(x, _)| x).collect();
        let mut values = Vec::with_capacity(self.atoms.len() + 1);
        let mut acc = 0.0;
        values.push(acc);
        for &(_, m) in &self.atoms {
            acc += m;
            values.push(acc);
        }
        StepFunction::right_continuous(breakpoints, values).expect("atoms are sorted")
    }

    /// Cumulative mass anchored at the origin: the value is
    /// `measure([0, x))` for positive `x` and `-measure((x, 0])` for
    /// negative `x`, so the function is negative to the left of the origin
    /// and climbs by one atom mass at each atom. Breakpoints at negative
    /// atoms take the right limit and breakpoints at nonnegative atoms take
    /// the left limit, matching the half-open windows in the definition.
    pub fn cumulative_from_origin(&self) -> StepFunction {
        let negative_total: f64 = self
            .atoms
            .iter()
            .filter(|&&(x, _)| x < 0.0)
            .map(|&(_, m)| m)
            .sum();
        let breakpoints: Vec<f64> = self.atoms.iter().map(|&(x, _)| x).collect();
        let sides: Vec<Side> = self
            .atoms
            .iter()
            .map(|&(x, _)| if x < 0.0 { Side::Right } else { Side::Left })
            .collect();
        let mut values = Vec::with_capacity(self.atoms.len() + 1);
        let mut acc = -negative_total;
        values.push(acc);
        for &(_, m) in &self.atoms {
            acc += m;
            values.push(acc);
        }
        StepFunction::with_sides(breakpoints, values, sides).expect("atoms are sorted")
    }
}
