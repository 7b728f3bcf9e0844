//! Shock geometry from a potential path by the sliding-parabola rule.
//!
//! For a piecewise-linear potential path the functional
//! `F(y) = (x - y)^2 / (2t) - psi(y)` is piecewise quadratic, so its global
//! minimum over the path domain is attained either at a knot or at an
//! interior point where the parabola slope matches the segment slope. The
//! least and greatest minimizers are the contact points of the parabola
//! resting on the path; when they differ the observation point `x` sits on
//! a shock whose strength and wavelength are read off the contact pair.

use crate::error::{Error, Result};
use crate::measures::PiecewiseLinear;

/// A shock located at `x_star`: contact points, strength `mu` and
/// wavelength `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSample {
    pub x_star: f64,
    pub xi_minus: f64,
    pub xi_plus: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Classification of an observation point by its parabola contacts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactPoint {
    /// A single contact `xi`; the velocity there is `(x - xi) / t`.
    Regular {
        xi: f64,
        velocity: f64,
    },
    Shock(ShockSample),
}

/// Least and greatest minimizers of the contact functional together with
/// its minimum value.
fn contact_span(psi: &PiecewiseLinear, x: f64, t: f64) -> Result<(f64, f64, f64)> {
    let knots = psi.knots();
    let half = 0.5 / t;
    let objective = |y: f64, v: f64| (x - y) * (x - y) * half - v;
    let mut best = f64::INFINITY;
    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(2 * knots.len());
    for (k, &(y, v)) in knots.iter().enumerate() {
        candidates.push((y, objective(y, v)));
        if let Some(&(y1, v1)) = knots.get(k + 1) {
            let slope = (v1 - v) / (y1 - y);
            let stat = x + t * slope;
            if stat > y && stat < y1 {
                candidates.push((stat, objective(stat, v + slope * (stat - y))));
            }
        }
    }
    for &(_, f) in &candidates {
        best = best.min(f);
    }
    let tol = 1e-12 * best.abs().max(1.0);
    let mut xi_minus = f64::INFINITY;
    let mut xi_plus = f64::NEG_INFINITY;
    for &(y, f) in &candidates {
        if f <= best + tol {
            xi_minus = xi_minus.min(y);
            xi_plus = xi_plus.max(y);
        }
    }
    let (lo, hi) = psi.domain();
    if xi_minus <= lo || xi_plus >= hi {
        return Err(Error::DomainTooSmall(format!(
            "contact at the path boundary for x = {x}; the true minimizer may lie outside"
        )));
    }
    Ok((xi_minus, xi_plus, best))
}

/// Contacts of the parabola centered at `x_star` with the path at time `t`.
pub fn parabola_contacts(psi: &PiecewiseLinear, x_star: f64, t: f64) -> Result<ContactPoint> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!("time {t} must be positive")));
    }
    let (xi_minus, xi_plus, _) = contact_span(psi, x_star, t)?;
    let scale = xi_minus.abs().max(xi_plus.abs()).max(1.0);
    if xi_plus - xi_minus > 1e-9 * scale {
        Ok(ContactPoint::Shock(ShockSample {
            x_star,
            xi_minus,
            xi_plus,
            mu: xi_plus - xi_minus,
            nu: x_star - xi_minus,
        }))
    } else {
        Ok(ContactPoint::Regular {
            xi: xi_minus,
            velocity: (x_star - xi_minus) / t,
        })
    }
}

/// Sweeps observation points across `window` and returns the shocks found,
/// left to right.
///
/// The least minimizer never decreases in `x` and drifts continuously at
/// unit rate at most, so its total movement across an interval can exceed
/// the interval width only through jumps. Intervals with such an excess
/// are split recursively until each remaining jump is pinned down to
/// machine precision. Shocks narrower than the probe spacing minus the
/// local drift can still hide, so `probes` sets the resolution of the
/// sweep.
pub fn scan_shocks(
    psi: &PiecewiseLinear,
    t: f64,
    window: (f64, f64),
    probes: usize,
) -> Result<Vec<ShockSample>> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!("time {t} must be positive")));
    }
    if !(window.0 < window.1) {
        return Err(Error::Invalid(format!(
            "scan window ({}, {}) must be ordered",
            window.0, window.1
        )));
    }
    let n = probes.max(1);
    let h = (window.1 - window.0) / n as f64;
    let mut shocks: Vec<ShockSample> = Vec::new();
    let mut prev = contact_span(psi, window.0, t)?;
    let mut prev_x = window.0;
    emit_if_wide(&mut shocks, prev_x, prev);
    for i in 1..=n {
        let x = window.0 + i as f64 * h;
        let here = contact_span(psi, x, t)?;
        refine(psi, t, (prev_x, prev), (x, here), &mut shocks, 0)?;
        emit_if_wide(&mut shocks, x, here);
        prev = here;
        prev_x = x;
    }
    Ok(shocks)
}

fn push_dedup(shocks: &mut Vec<ShockSample>, sample: ShockSample) {
    if shocks
        .last()
        .is_none_or(|s| sample.x_star - s.x_star > 1e-9)
    {
        shocks.push(sample);
    }
}

/// Emits the probe itself when it happens to sit on a shock.
fn emit_if_wide(shocks: &mut Vec<ShockSample>, x: f64, span: (f64, f64, f64)) {
    if span.1 - span.0 > 1e-9 * span.0.abs().max(span.1.abs()).max(1.0) {
        push_dedup(
            shocks,
            ShockSample {
                x_star: x,
                xi_minus: span.0,
                xi_plus: span.1,
                mu: span.1 - span.0,
                nu: x - span.0,
            },
        );
    }
}

/// Splits an interval whose contact movement exceeds its width until the
/// jump responsible is bracketed as tightly as the arithmetic allows.
fn refine(
    psi: &PiecewiseLinear,
    t: f64,
    left: (f64, (f64, f64, f64)),
    right: (f64, (f64, f64, f64)),
    shocks: &mut Vec<ShockSample>,
    depth: usize,
) -> Result<()> {
    let (x_lo, span_lo) = left;
    let (x_hi, span_hi) = right;
    let width = x_hi - x_lo;
    let movement = span_hi.0 - span_lo.1;
    let scale = span_lo.1.abs().max(span_hi.0.abs()).max(1.0);
    if movement - width.max(0.0) <= 1e-9 * scale {
        return Ok(());
    }
    let x_scale = x_lo.abs().max(x_hi.abs()).max(1.0);
    if depth >= 60 || width <= 4.0 * f64::EPSILON * x_scale {
        let x_star = 0.5 * (x_lo + x_hi);
        push_dedup(
            shocks,
            ShockSample {
                x_star,
                xi_minus: span_lo.1,
                xi_plus: span_hi.0,
                mu: span_hi.0 - span_lo.1,
                nu: x_star - span_lo.1,
            },
        );
        return Ok(());
    }
    let mid = 0.5 * (x_lo + x_hi);
    let span_mid = contact_span(psi, mid, t)?;
    refine(psi, t, left, (mid, span_mid), shocks, depth + 1)?;
    emit_if_wide(shocks, mid, span_mid);
    refine(psi, t, (mid, span_mid), right, shocks, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowmap;
    use crate::measures::{AtomicMeasure, StepFunction};
    use crate::randstats::laws::{integrate_negative, sample_psi_stream, InitialLaw, LawKind};

    fn flat(lo: f64, hi: f64) -> PiecewiseLinear {
        PiecewiseLinear::new(vec![(lo, 0.0), (hi, 0.0)]).expect("two knots")
    }

    #[test]
    fn flat_path_contacts_under_the_center() {
        let psi = flat(-5.0, 5.0);
        match parabola_contacts(&psi, 0.7, 1.3).expect("interior") {
            ContactPoint::Regular { xi, velocity } => {
                assert!((xi - 0.7).abs() < 1e-12);
                assert!(velocity.abs() < 1e-12);
            }
            other => panic!("expected a regular point, got {other:?}"),
        }
    }

    #[test]
    fn linear_path_translates_the_contact() {
        let a = 0.6;
        let psi = PiecewiseLinear::new(vec![(-5.0, 5.0 * a), (5.0, -5.0 * a)]).expect("line");
        match parabola_contacts(&psi, 1.0, 2.0).expect("interior") {
            ContactPoint::Regular { xi, velocity } => {
                assert!((xi - (1.0 - 2.0 * a)).abs() < 1e-12);
                assert!((velocity - a).abs() < 1e-12);
            }
            other => panic!("expected a regular point, got {other:?}"),
        }
    }

    #[test]
    fn time_must_be_positive() {
        let psi = flat(-1.0, 1.0);
        assert!(matches!(
            parabola_contacts(&psi, 0.0, 0.0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn boundary_contact_is_a_domain_error() {
        let psi = PiecewiseLinear::new(vec![(-1.0, -1.0), (1.0, 1.0)]).expect("line");
        assert!(matches!(
            parabola_contacts(&psi, 5.0, 1.0),
            Err(Error::DomainTooSmall(_))
        ));
    }

    #[test]
    fn symmetric_double_touch_is_a_shock() {
        let psi = PiecewiseLinear::new(vec![
            (-3.0, 0.0),
            (-1.0, 1.0),
            (0.0, -2.0),
            (1.0, 1.0),
            (3.0, 0.0),
        ])
        .expect("path");
        match parabola_contacts(&psi, 0.0, 1.0).expect("interior") {
            ContactPoint::Shock(s) => {
                assert!((s.xi_minus - -1.0).abs() < 1e-12);
                assert!((s.xi_plus - 1.0).abs() < 1e-12);
                assert!((s.mu - 2.0).abs() < 1e-12);
                assert!((s.nu - 1.0).abs() < 1e-12);
            }
            other => panic!("expected a shock, got {other:?}"),
        }
    }

    #[test]
    fn scan_localizes_the_jump() {
        let psi = PiecewiseLinear::new(vec![
            (-3.0, 0.0),
            (-1.0, 1.0),
            (0.0, -2.0),
            (1.0, 1.0),
            (3.0, 0.0),
        ])
        .expect("path");
        let shocks = scan_shocks(&psi, 1.0, (-0.9, 0.9), 36).expect("scan");
        assert_eq!(shocks.len(), 1);
        let s = shocks[0];
        assert!(s.x_star.abs() < 1e-9, "shock at {}", s.x_star);
        assert!((s.xi_minus - -1.0).abs() < 1e-9);
        assert!((s.xi_plus - 1.0).abs() < 1e-9);
        assert!((s.mu - 2.0).abs() < 1e-9);
    }

    #[test]
    fn brownian_path_shocks_have_positive_strength() {
        let law = InitialLaw::new(
            LawKind::BrownianPotential {
                variance_rate: 1.0,
                step: 0.02,
            },
            101,
        )
        .expect("valid");
        let mut found = 0usize;
        for stream in 0..30 {
            let psi = sample_psi_stream(&law, (-8.0, 8.0), stream).expect("sampled");
            let shocks = scan_shocks(&psi, 1.0, (-4.0, 4.0), 400).expect("scan");
            for s in &shocks {
                assert!(s.mu > 0.0, "strength {}", s.mu);
                assert!(s.xi_minus < s.xi_plus);
                assert!(s.nu.is_finite());
            }
            found += shocks.len();
        }
        assert!(found > 100, "only {found} shocks over 30 paths");
    }

    #[test]
    fn scan_is_deterministic() {
        let law = InitialLaw::new(
            LawKind::BrownianPotential {
                variance_rate: 1.0,
                step: 0.05,
            },
            7,
        )
        .expect("valid");
        let psi_a = sample_psi_stream(&law, (-6.0, 6.0), 2).expect("sampled");
        let psi_b = sample_psi_stream(&law, (-6.0, 6.0), 2).expect("sampled");
        let a = scan_shocks(&psi_a, 0.8, (-3.0, 3.0), 300).expect("scan");
        let b = scan_shocks(&psi_b, 0.8, (-3.0, 3.0), 300).expect("scan");
        assert_eq!(a, b);
    }

    /// With a uniform mass density the contact functional and the particle
    /// dynamics minimize the same quantity, so contact pairs must line up
    /// with the constituent spans of the discretized clusters.
    #[test]
    fn contact_pairs_match_discrete_cluster_spans() {
        let u0 = StepFunction::right_continuous(vec![-2.0, 1.0, 3.0], vec![2.0, 1.0, -0.5, 1.0])
            .expect("profile");
        let domain = (-6.0, 6.0);
        let psi = integrate_negative(&u0, domain);
        let n = 1200;
        let h = (domain.1 - domain.0) / n as f64;
        let atoms = (0..n)
            .map(|k| (domain.0 + (k as f64 + 0.5) * h, 1.0 / n as f64))
            .collect();
        let p0 = AtomicMeasure::new(atoms).expect("uniform");

        for (t, expected) in [
            (1.0, vec![(-0.5, -2.5, -1.5), (1.25, 0.25, 1.75)]),
            (2.5, vec![(1.675, -3.325, 2.925)]),
        ] {
            let partition = flowmap::inverse_partition(&p0, &u0, t).expect("partition");
            let clusters: Vec<_> = partition
                .bodies
                .iter()
                .filter(|b| b.mass > 3.5 * h)
                .collect();
            assert_eq!(clusters.len(), expected.len(), "t = {t}");
            for (body, (x, lo, hi)) in clusters.iter().zip(&expected) {
                assert!(
                    (body.image - x).abs() < 0.02,
                    "t = {t}: image {}",
                    body.image
                );
                let near = scan_shocks(&psi, t, (body.image - 0.1, body.image + 0.1), 20)
                    .expect("interior scan");
                assert_eq!(near.len(), 1, "t = {t}: shocks near {}", body.image);
                let s = near[0];
                assert!((s.x_star - body.image).abs() < 0.02);
                assert!(
                    (s.xi_minus - lo).abs() < 0.02 && (s.xi_minus - body.y_lo).abs() < 0.03,
                    "t = {t}: left contact {} vs span {}",
                    s.xi_minus,
                    body.y_lo
                );
                assert!(
                    (s.xi_plus - hi).abs() < 0.02 && (s.xi_plus - body.y_hi).abs() < 0.03,
                    "t = {t}: right contact {} vs span {}",
                    s.xi_plus,
                    body.y_hi
                );
            }
        }
    }
}
