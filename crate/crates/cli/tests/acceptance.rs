//! Acceptance suite: one test per shipped guarantee, each printing a single
//! pass/fail line through the harness and enforcing its runtime budget.

use conslaw_core::measures::lower_convex_hull;
use conslaw_core::randstats::{
    drift_at, drift_numeric, estimate_p, hierarchy_residual_first, hierarchy_residual_second,
    parabola_contacts, sample_psi_stream, scan_shocks, ContactPoint, EnsembleRunner, EstimateKind,
    InitialLaw, JumpPosition, LawKind, ShockSample,
};
use conslaw_core::report::{histogram, Histogram};
use conslaw_core::scenario::{four_particles, time_grid};
use conslaw_core::sticky::ParticleSystem;
use conslaw_core::{flowmap, fronttrack::FluxTable, genpot, hopflax, PiecewiseLinear};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

#[test]
fn criterion_01_four_particle_golden_run() {
    let clock = Instant::now();
    let sys0 = four_particles().system().expect("valid scenario");

    let (_, events) = sys0.evolve_logged(3.0).expect("evolves");
    assert_eq!(events.len(), 2, "two collision events");
    assert!(
        close(events[0].time, 1.0, 1e-12),
        "first collision time {}",
        events[0].time
    );
    assert!(
        close(events[0].position, -1.0, 1e-12),
        "first collision at {}",
        events[0].position
    );
    assert!(
        close(events[1].time, 1.75, 1e-12),
        "second collision time {}",
        events[1].time
    );
    assert!(
        close(events[1].position, 0.125, 1e-12),
        "second collision at {}",
        events[1].position
    );

    let at2 = sys0.evolve(2.0).expect("evolves");
    assert_eq!(at2.len(), 2);
    let b = at2.bodies();
    assert!(close(b[0].mass, 5.0 / 6.0, 1e-12));
    assert!(close(b[0].position, 0.3, 1e-12));
    assert!(close(b[0].velocity, 0.7, 1e-12));
    assert!(close(b[1].mass, 1.0 / 6.0, 1e-12));
    assert!(close(b[1].position, 5.0, 1e-12));
    assert!(close(b[1].velocity, 1.0, 1e-12));

    assert!(clock.elapsed().as_secs_f64() < 1.0, "budget exceeded");
}

#[test]
fn criterion_02_potential_tables_and_terminal_hull() {
    let sys0 = four_particles().system().expect("valid scenario");
    let mass_knots = [0.0, 0.25, 0.5, 5.0 / 6.0, 1.0];
    let tables: [(f64, [f64; 5]); 3] = [
        (0.0, [0.0, -0.75, -1.25, -11.0 / 12.0, -5.0 / 12.0]),
        (1.0, [0.0, -0.25, -0.5, -1.0 / 3.0, 1.0 / 3.0]),
        (2.0, [0.0, 0.25, 0.25, 0.25, 13.0 / 12.0]),
    ];
    for (t, values) in tables {
        let shifted = hopflax::shifted_potential(&sys0, t).expect("potential");
        for (&m, &want) in mass_knots.iter().zip(values.iter()) {
            let got = shifted.try_eval(m).expect("in range");
            assert!(close(got, want, 1e-12), "t = {t}, m = {m}: {got} vs {want}");
        }
    }

    let hull = lower_convex_hull(&hopflax::shifted_potential(&sys0, 2.0).expect("potential"));
    let slopes = hull.slopes();
    assert_eq!(
        slopes.len(),
        2,
        "terminal hull has two pieces, got {slopes:?}"
    );
    assert!(close(slopes[0], 0.3, 1e-12));
    assert!(close(slopes[1], 5.0, 1e-12));

    let state = hopflax::hull_positions(&sys0, 2.0).expect("solves");
    assert_eq!(state.pieces.len(), 2);
    assert!(close(state.pieces[0].position, 0.3, 1e-12));
    assert!(close(state.pieces[1].position, 5.0, 1e-12));
}

#[test]
fn criterion_03_four_method_crosscheck() {
    let clock = Instant::now();
    let scenario = four_particles();
    let sys0 = scenario.system().expect("valid scenario");
    let (p0, u0) = scenario.measure_data().expect("valid scenario");
    let momentum = hopflax::cumulative_flux(
        &hopflax::velocity_profile(&sys0).expect("profile"),
        sys0.total_mass(),
    )
    .expect("momentum potential");

    for t in time_grid(0.25, 3.0, 0.25).expect("grid") {
        let sticky = sys0.evolve(t).expect("evolves");
        let hull = hopflax::hull_positions(&sys0, t).expect("solves");
        let partition = flowmap::inverse_partition(&p0, &u0, t).expect("partitions");
        let scan = genpot::shock_scan(&p0, &u0, t).expect("scans");

        let n = sticky.len();
        assert_eq!(hull.pieces.len(), n, "hull cluster count at t = {t}");
        assert_eq!(
            partition.bodies.len(),
            n,
            "partition cluster count at t = {t}"
        );
        assert_eq!(scan.len(), n, "scan cluster count at t = {t}");

        for (k, body) in sticky.bodies().iter().enumerate() {
            let piece = &hull.pieces[k];
            let hull_v = (momentum.eval_clamped(piece.mass_hi)
                - momentum.eval_clamped(piece.mass_lo))
                / (piece.mass_hi - piece.mass_lo);
            let positions = [
                body.position,
                piece.position,
                partition.bodies[k].image,
                scan[k].position,
            ];
            let velocities = [
                body.velocity,
                hull_v,
                partition.bodies[k].velocity,
                scan[k].velocity,
            ];
            for i in 0..4 {
                for j in i + 1..4 {
                    assert!(
                        close(positions[i], positions[j], 1e-10),
                        "positions diverge at t = {t}, cluster {k}: {positions:?}"
                    );
                    assert!(
                        close(velocities[i], velocities[j], 1e-10),
                        "velocities diverge at t = {t}, cluster {k}: {velocities:?}"
                    );
                }
            }
        }
    }
    assert!(clock.elapsed().as_secs_f64() < 5.0, "budget exceeded");
}

#[test]
fn criterion_04_potential_branches_and_minimizer_set() {
    let (p0, u0) = four_particles().measure_data().expect("valid scenario");
    let branches = [
        (-4.0, -0.5),
        (-2.5, -0.25),
        (-0.5, 0.0),
        (2.0, 1.0 / 6.0),
        (4.0, 5.0 / 6.0),
    ];
    for (y, want) in branches {
        let got = genpot::potential_f(&p0, &u0, y, 0.0, 1.0);
        assert!(
            close(got, want, 1e-12),
            "branch at y = {y}: {got} vs {want}"
        );
    }

    let set = genpot::minimize_f(&p0, &u0, 0.0, 1.0).expect("minimizes");
    assert!(close(set.v, -0.5, 1e-12), "minimum value {}", set.v);
    assert_eq!(set.components.len(), 1, "one minimizing component");
    assert_eq!(set.y_star, f64::NEG_INFINITY, "minimizers unbounded below");
    assert!(
        close(set.y_star_upper, -3.0, 1e-12),
        "greatest minimizer {}",
        set.y_star_upper
    );
}

#[test]
fn criterion_05_vacated_gap_intervals() {
    let (p0, u0) = four_particles().measure_data().expect("valid scenario");
    let t = 0.5;
    let partition = flowmap::inverse_partition(&p0, &u0, t).expect("partitions");
    let want = [
        (-3.0, -3.0 + 2.0 * t, true, false),
        (-2.0, -2.0 + t, true, false),
        (1.0 - t / 2.0, 1.0, false, true),
        (3.0, 3.0 + t, true, false),
    ];
    assert_eq!(partition.gaps.len(), want.len(), "gap count");
    for (gap, (lo, hi, lo_closed, hi_closed)) in partition.gaps.iter().zip(want) {
        assert!(close(gap.x_lo, lo, 1e-12), "gap start {} vs {lo}", gap.x_lo);
        assert!(close(gap.x_hi, hi, 1e-12), "gap end {} vs {hi}", gap.x_hi);
        assert_eq!(gap.lo_closed, lo_closed, "left endpoint of gap at {lo}");
        assert_eq!(gap.hi_closed, hi_closed, "right endpoint of gap at {lo}");
    }
}

#[test]
fn criterion_06_entropy_and_shock_conditions_on_random_data() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(616);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=10);
        let mut positions = Vec::with_capacity(n);
        let mut x: f64 = rng.gen_range(-5.0..-4.0);
        for _ in 0..n {
            positions.push(x);
            x += rng.gen_range(0.1..2.0);
        }
        let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let velocities: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let sys0 = ParticleSystem::new(&masses, &positions, &velocities).expect("valid");

        for t in [0.4, 1.3, 2.6] {
            let sys = sys0.evolve(t).expect("evolves");
            let excess = genpot::entropy_check(&genpot::velocity_field(&sys), t).expect("checks");
            assert!(
                excess <= 1e-10,
                "trial {trial}, t = {t}: entropy excess {excess}"
            );

            for b in sys.bodies() {
                let mut mass = 0.0;
                let mut momentum = 0.0;
                let mut moment = 0.0;
                for i in b.first..=b.last {
                    mass += masses[i];
                    momentum += masses[i] * velocities[i];
                    moment += masses[i] * (positions[i] + t * velocities[i]);
                }
                assert!(
                    close(b.velocity, momentum / mass, 1e-10),
                    "trial {trial}, t = {t}: cluster speed {} vs momentum rule {}",
                    b.velocity,
                    momentum / mass
                );
                assert!(
                    close(b.position, moment / mass, 1e-10),
                    "trial {trial}, t = {t}: cluster position off the mass center"
                );
                assert!(close(b.mass, mass, 1e-10));
            }
        }
    }
    assert!(clock.elapsed().as_secs_f64() < 30.0, "budget exceeded");
}

#[test]
fn criterion_07_drift_closed_form() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..100 {
        let b0: f64 = rng.gen_range(-2.0..2.0);
        let c: f64 = rng.gen_range(-2.0..2.0);
        let t = if c * b0 < 0.0 {
            0.9 * (-1.0 / (c * b0)) * rng.gen::<f64>()
        } else {
            rng.gen_range(0.0..3.0)
        };
        let exact = drift_at(b0, c, t).expect("before blowup");
        let numeric = drift_numeric(b0, c, t, 2000);
        assert!(
            close(exact, numeric, 1e-8),
            "b0 {b0}, curvature {c}, t {t}: {exact} vs {numeric}"
        );
    }
    for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let got = drift_at(1.0, 1.0, t).expect("finite");
        assert!(
            close(got, 1.0 / (1.0 + t), 1e-12),
            "hyperbolic decay at t = {t}"
        );
    }
    assert!(clock.elapsed().as_secs_f64() < 1.0, "budget exceeded");
}

#[test]
fn criterion_08_first_hierarchy_with_closed_form_oracle() {
    let clock = Instant::now();
    let table = FluxTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 2.0]).expect("convex");
    let law = InitialLaw::new(
        LawKind::Riemann {
            left: 2.0,
            right: 1.0,
            position: JumpPosition::Uniform(-1.0, 1.0),
        },
        4242,
    )
    .expect("valid law");
    let runner = EnsembleRunner {
        law,
        table: table.clone(),
        domain: (-4.0, 4.0),
        size: 100_000,
    };
    let grid = [-0.5, -0.25, 0.0, 0.25, 0.5];
    let t = 0.2;
    let shock_speed = table.chord(2, 1);
    assert!(close(shock_speed, 1.5, 1e-15));

    let initial = runner.evolved(0.0).expect("samples");
    for &x in &grid {
        let est = hierarchy_residual_first(&initial, &table, 1, x, t, 0.02, 0.2).expect("residual");
        assert!(est.stderr > 0.0);
        assert!(
            est.residual.abs() <= 3.0 * est.stderr,
            "residual {} exceeds 3 x stderr {} at x = {x}",
            est.residual,
            est.stderr
        );
    }

    let at_t = runner.evolved(t).expect("evolves");
    let p1 = estimate_p(&at_t, &table, &grid, EstimateKind::P1, 0.0).expect("estimates");
    for (g, &x) in grid.iter().enumerate() {
        let upper = ((1.0 + shock_speed * t - x) / 2.0).clamp(0.0, 1.0);
        for (state, want) in [(2usize, upper), (1usize, 1.0 - upper)] {
            let got = p1.values[g][state];
            let se = p1.stderr[g][state];
            assert!(se > 0.0, "degenerate one-point law at x = {x}");
            assert!(
                close(got, want, 3.0 * se),
                "one-point law at x = {x}, state {state}: {got} vs {want} (stderr {se})"
            );
        }
    }

    let density =
        estimate_p(&at_t, &table, &grid, EstimateKind::P2Density, 0.2).expect("estimates");
    let bucket = 2 * table.len() + 1;
    for (g, &x) in grid.iter().enumerate() {
        let got = density.values[g][bucket];
        let se = density.stderr[g][bucket];
        assert!(se > 0.0);
        assert!(
            close(got, 0.5, 3.0 * se),
            "front density at x = {x}: {got} vs 0.5 (stderr {se})"
        );
    }
    assert!(clock.elapsed().as_secs_f64() < 120.0, "budget exceeded");
}

#[test]
fn criterion_09_second_hierarchy_across_interaction() {
    let clock = Instant::now();
    let table = FluxTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 2.0]).expect("convex");
    let law = InitialLaw::new(
        LawKind::TwoJump {
            values: [2.0, 1.0, 0.0],
            first: JumpPosition::Uniform(-1.0, 1.0),
            gap: (0.5, 1.5),
        },
        17,
    )
    .expect("valid law");
    let runner = EnsembleRunner {
        law,
        table: table.clone(),
        domain: (-6.0, 6.0),
        size: 100_000,
    };
    let lists = runner.evolved(0.0).expect("samples");
    let (x, t, dt, w, gap) = (1.5, 1.0, 0.05, 0.1, 0.1);

    let second =
        hierarchy_residual_second(&lists, &table, (2, 0), x, t, dt, w, gap).expect("residual");
    assert!(second.collision != 0.0, "interactions must contribute");
    assert!(
        second.residual.abs() <= 3.0 * second.stderr,
        "pair-resolved residual {} exceeds 3 x stderr {}",
        second.residual,
        second.stderr
    );

    let first = hierarchy_residual_first(&lists, &table, 1, x, t, dt, w).expect("residual");
    assert!(
        first.residual.abs() > 3.0 * first.stderr,
        "single-level residual {} should break across the interaction (stderr {})",
        first.residual,
        first.stderr
    );

    let brownian = InitialLaw::new(
        LawKind::BrownianPotential {
            variance_rate: 1.0,
            step: 0.02,
        },
        7,
    )
    .expect("valid law");
    let scan = || -> Vec<ShockSample> {
        let per_path: Vec<Vec<ShockSample>> = (0..1500u64)
            .into_par_iter()
            .map(|i| {
                let psi = sample_psi_stream(&brownian, (-8.0, 8.0), i).expect("samples");
                scan_shocks(&psi, 1.0, (-3.0, 3.0), 600).expect("scans")
            })
            .collect();
        per_path.into_iter().flatten().collect()
    };
    let samples = scan();
    assert!(
        samples.len() >= 10_000,
        "only {} shock samples",
        samples.len()
    );
    for s in &samples {
        assert!(s.mu > 0.0, "degenerate shock strength at x = {}", s.x_star);
        assert!(s.nu.is_finite());
    }
    let hist = |samples: &[ShockSample]| -> (Histogram, Histogram) {
        let mu: Vec<f64> = samples.iter().map(|s| s.mu).collect();
        let nu: Vec<f64> = samples.iter().map(|s| s.nu).collect();
        let top = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max) * 1.05;
        let bottom = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::min) * 1.05;
        (
            histogram(&mu, 40, (0.0, top(&mu))).expect("bins"),
            histogram(&nu, 40, (bottom(&nu), top(&nu))).expect("bins"),
        )
    };
    let (mu_a, nu_a) = hist(&samples);
    let resampled = scan();
    let (mu_b, nu_b) = hist(&resampled);
    assert_eq!(
        mu_a, mu_b,
        "strength histogram depends on more than the seed"
    );
    assert_eq!(
        nu_a, nu_b,
        "wavelength histogram depends on more than the seed"
    );

    let flat = PiecewiseLinear::new(vec![(-5.0, 0.0), (5.0, 0.0)]).expect("path");
    for (x, t) in [(0.0, 1.0), (1.2, 0.7), (-2.4, 2.0)] {
        match parabola_contacts(&flat, x, t).expect("contacts") {
            ContactPoint::Regular { xi, velocity } => {
                assert!(close(xi, x, 1e-12) && velocity.abs() <= 1e-12);
            }
            ContactPoint::Shock(s) => panic!("flat path produced a shock at {}", s.x_star),
        }
    }
    let a = 0.8;
    let tilt = PiecewiseLinear::new(vec![(-5.0, 5.0 * a), (5.0, -5.0 * a)]).expect("path");
    for (x, t) in [(0.0, 1.0), (0.5, 2.0), (-1.0, 1.5)] {
        match parabola_contacts(&tilt, x, t).expect("contacts") {
            ContactPoint::Regular { xi, velocity } => {
                assert!(close(xi, x - a * t, 1e-12), "contact at {xi}");
                assert!(close(velocity, a, 1e-12), "velocity {velocity}");
            }
            ContactPoint::Shock(s) => panic!("linear path produced a shock at {}", s.x_star),
        }
    }
    assert!(clock.elapsed().as_secs_f64() < 300.0, "budget exceeded");
}

fn conslaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conslaw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("readable dir")
        .map(|e| e.expect("entry").path())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            (
                p.file_name().expect("name").to_string_lossy().into_owned(),
                std::fs::read(&p).expect("readable file"),
            )
        })
        .collect()
}

#[test]
fn criterion_10_deterministic_cli_reruns() {
    let work = tempfile::tempdir().expect("tempdir");
    let out = |name: &str| work.path().join(name).to_string_lossy().into_owned();

    let four = scenario_path("four_particles.toml");
    let first = conslaw(&["crosscheck", "--config", &four, "--out", &out("xc1")]);
    assert!(first.status.success(), "crosscheck failed: {first:?}");
    let again = conslaw(&["crosscheck", "--config", &four, "--out", &out("xc2")]);
    assert!(again.status.success());
    assert_eq!(
        dir_contents(&work.path().join("xc1")),
        dir_contents(&work.path().join("xc2")),
        "crosscheck reruns differ"
    );

    let riemann = scenario_path("mc_riemann.toml");
    let mc1 = conslaw(&["mc-stats", "--config", &riemann, "--out", &out("mc1")]);
    assert!(mc1.status.success(), "mc-stats failed: {mc1:?}");
    let mc2 = conslaw(&["mc-stats", "--config", &riemann, "--out", &out("mc2")]);
    assert!(mc2.status.success());
    assert_eq!(
        dir_contents(&work.path().join("mc1")),
        dir_contents(&work.path().join("mc2")),
        "mc-stats reruns differ"
    );

    let sticky = conslaw(&["sticky", "--config", &four, "--out", &out("st")]);
    assert!(sticky.status.success());
    let worldlines =
        std::fs::read_to_string(work.path().join("st/worldlines.csv")).expect("worldlines");
    let collision_row = worldlines.lines().skip(1).any(|line| {
        let mut cells = line.split(',');
        let t: f64 = cells.next().unwrap().parse().unwrap();
        let x: f64 = cells.next().unwrap().parse().unwrap();
        close(t, 1.0, 1e-12) && close(x, -1.0, 1e-12)
    });
    assert!(
        collision_row,
        "no worldline row at the first collision point"
    );
    let collisions =
        std::fs::read_to_string(work.path().join("st/collisions.csv")).expect("collisions");
    assert!(collisions.lines().count() >= 3, "two logged collisions");

    let missing = conslaw(&["sticky", "--config", &out("nope.toml"), "--out", &out("x")]);
    assert_eq!(missing.status.code(), Some(2), "missing config must exit 2");

    let broken = work.path().join("broken.toml");
    std::fs::write(&broken, "[particles]\nmass = [1.0]\n").expect("writable");
    let malformed = conslaw(&[
        "sticky",
        "--config",
        &broken.to_string_lossy(),
        "--out",
        &out("y"),
    ]);
    assert_eq!(
        malformed.status.code(),
        Some(2),
        "malformed config must exit 2"
    );
    let stderr = String::from_utf8_lossy(&malformed.stderr);
    assert!(
        stderr.contains("line"),
        "diagnostics lack a location: {stderr}"
    );
}
