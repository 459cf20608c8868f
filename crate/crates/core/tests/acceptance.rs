//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero when any criterion fails.

mod common;

use std::f64::consts::{LN_2, PI, TAU};
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use rand::Rng;

use qwalk::metrology::{evolve_pair, metrology_trajectory, qfi_fidelity, qfi_fidelity_richardson, straddles_cutoff};
use qwalk::optimize::{
    maximize_over_theta, optimal_probe_z_with_phase, optimize_probe, random_probe, Objective, OptimizeOptions,
    ProbeProblem, ThetaSearch,
};
use qwalk::oracles::parthasarathy_min;
use qwalk::walk::{entanglement_entropy, position_distribution, DerivativePair};
use qwalk::{fi_position, qfi_pure, Axis, CoinFamily, CoinOperator, ProbeSpec};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Largest deviation seen so far, with a label for the worst case.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }

    fn within(&self, tol: f64) -> bool {
        self.value <= tol
    }

    fn describe(&self) -> String {
        if self.at.is_empty() {
            format!("{:.2e}", self.value)
        } else {
            format!("{:.2e} at {}", self.value, self.at)
        }
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn pair(family: CoinFamily, dim: usize, theta: f64, probe: &ProbeSpec, t: usize) -> DerivativePair {
    evolve_pair(&family, dim, theta, probe, t).expect("valid walk")
}

fn best_probe(family: CoinFamily, dim: usize, theta: f64, t: usize) -> qwalk::optimize::OptimizationResult {
    optimize_probe(
        &ProbeProblem::new(family, dim, theta, t),
        Objective::Qfi,
        &OptimizeOptions::default(),
    )
    .expect("valid problem")
}

fn z_rotation_maximum() -> Verdict {
    let mut value = Worst::default();
    let mut balance = Worst::default();
    for dim in 2..=6 {
        for t in 1..=10 {
            let best = best_probe(CoinFamily::rotation(Axis::Z), dim, 0.7, t);
            let expected = ((dim - 1) * t).pow(2) as f64;
            value.see(rel(best.best_value, expected), || format!("D={dim} t={t}"));
            let chi = best.best_probe.amplitudes();
            balance.see((chi[0].norm() - chi[dim - 1].norm()).abs(), || format!("D={dim} t={t}"));
        }
    }
    Verdict::new(
        value.within(1e-6) && balance.within(1e-4),
        format!("rel {}, ||chi_M|-|chi_-M|| {}", value.describe(), balance.describe()),
    )
}

fn z_rotation_fi_vanishes() -> Verdict {
    let mut r = rng(102);
    let mut worst = Worst::default();
    for i in 0..200 {
        let dim = 2 + i % 3;
        let t = r.random_range(1..=8);
        let theta = r.random_range(-PI..PI);
        let probe = random_probe(dim, &mut r);
        let f = fi_position(&pair(CoinFamily::rotation(Axis::Z), dim, theta, &probe, t));
        worst.see(f.abs(), || format!("D={dim} t={t} theta={theta:.3}"));
    }
    Verdict::new(worst.value < 1e-10, format!("max |F| {}", worst.describe()))
}

fn embedding_gives_no_gain() -> Verdict {
    let mut maxima = Worst::default();
    for dim in [3, 4] {
        for t in 1..=10 {
            let best = best_probe(CoinFamily::EmbeddedRotationZ, dim, 1.1, t);
            maxima.see(rel(best.best_value, (t * t) as f64), || format!("D={dim} t={t}"));
        }
    }
    let mut r = rng(103);
    let mut factor = Worst::default();
    for _ in 0..100 {
        let t = r.random_range(1..=8);
        let theta = r.random_range(-PI..PI);
        let probe = random_probe(3, &mut r);
        let full = qfi_pure(&pair(CoinFamily::rotation(Axis::Z), 3, theta, &probe, t));
        let embedded = qfi_pure(&pair(CoinFamily::EmbeddedRotationZ, 3, theta, &probe, t));
        factor.see(rel(full, 4.0 * embedded), || format!("t={t}"));
    }
    Verdict::new(
        maxima.within(1e-8) && factor.within(1e-9),
        format!("max H vs t^2 rel {}, factor 4 rel {}", maxima.describe(), factor.describe()),
    )
}

fn qubit_special_angles() -> Verdict {
    let mut r = rng(104);
    let mut small = Worst::default();
    let mut at_pi = Worst::default();
    for _ in 0..50 {
        let (alpha, gamma) = (r.random_range(0.0..PI), r.random_range(0.0..TAU));
        // x and y differ by a quarter turn of the relative phase
        for (axis, w) in [
            (Axis::Y, alpha.sin().powi(2) * gamma.sin().powi(2)),
            (Axis::X, alpha.sin().powi(2) * gamma.cos().powi(2)),
        ] {
            let probe = ProbeSpec::new(vec![alpha], vec![gamma]).unwrap();
            for t in 1..=8 {
                let tf = t as f64;
                let h0 = qfi_pure(&pair(CoinFamily::rotation(axis), 2, 1e-5, &probe, t));
                small.see((h0 - (tf - w)).abs(), || format!("{axis} t={t}"));
                let expected = if t % 2 == 0 {
                    0.5 * tf * tf * (1.0 - 0.5 * w)
                } else {
                    0.5 * (tf * tf + 1.0) - 0.25 * (tf + 1.0).powi(2) * w
                };
                let hpi = qfi_pure(&pair(CoinFamily::rotation(axis), 2, PI, &probe, t));
                at_pi.see((hpi - expected).abs() / expected.max(1.0), || format!("{axis} t={t}"));
            }
        }
    }
    Verdict::new(
        small.within(1e-5) && at_pi.within(1e-8),
        format!("theta=1e-5 abs {}, theta=pi {}", small.describe(), at_pi.describe()),
    )
}

/// θ ↦ -θ is conjugation by R_z(π), which commutes with the shift, so the
/// probe-optimized QFI is even in θ and [0, π] covers a period.
fn half_period(points: usize) -> ThetaSearch {
    ThetaSearch::new(0.0, PI, points)
}

fn dimensional_scaling() -> Verdict {
    let mut worst = Worst::default();
    let mut failures = Vec::new();
    for dim in 2..=4 {
        let slope = [0.5, 2.0, 3.5][dim - 2];
        for t in 1..=6 {
            let expected = slope * (t * t + t % 2) as f64;
            for axis in [Axis::X, Axis::Y] {
                let found = maximize_over_theta(
                    CoinFamily::rotation(axis),
                    dim,
                    t,
                    Objective::Qfi,
                    &half_period(8 * t + 9),
                )
                .unwrap();
                let d = rel(found.value, expected);
                worst.see(d, || format!("D={dim} {axis} t={t}"));
                if d > 1e-5 {
                    failures.push(format!("D={dim} {axis} t={t}: {:.6} vs {expected}", found.value));
                }
            }
        }
    }
    let mut detail = format!("worst rel {}", worst.describe());
    if !failures.is_empty() {
        detail.push_str(&format!("; {} cells off: {}", failures.len(), failures.join(", ")));
    }
    Verdict::new(worst.within(1e-5), detail)
}

fn asymptotic_rates() -> Verdict {
    const T: usize = 40;
    let t2 = (T * T) as f64;
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |label: String, got: f64, want: f64| {
        let d = rel(got, want);
        ok &= d <= 0.02;
        lines.push(format!("{label} {got:.4}/{want} ({:+.2}%)", 100.0 * (got - want) / want));
    };
    for dim in 2..=4 {
        let h = best_probe(CoinFamily::rotation(Axis::Z), dim, 0.7, T).best_value;
        check(format!("z D={dim}"), h / t2, ((dim - 1) * (dim - 1)) as f64);
    }
    for dim in 2..=4 {
        for axis in [Axis::X, Axis::Y] {
            let found =
                maximize_over_theta(CoinFamily::rotation(axis), dim, T, Objective::Qfi, &half_period(8 * T + 1))
                    .unwrap();
            check(format!("{axis} D={dim}"), found.value / t2, [0.5, 2.0, 3.5][dim - 2]);
        }
    }
    Verdict::new(ok, lines.join(", "))
}

fn entanglement_of_optimal_z_probe() -> Verdict {
    let mut worst = Worst::default();
    for dim in 2..=4 {
        for gamma in [0.0, 1.3, 4.0] {
            let probe = optimal_probe_z_with_phase(dim, gamma).unwrap();
            for t in 1..=20 {
                let e = entanglement_entropy(&pair(CoinFamily::rotation(Axis::Z), dim, 0.9, &probe, t).state);
                worst.see((e - LN_2).abs(), || format!("D={dim} t={t}"));
            }
        }
    }
    Verdict::new(worst.within(1e-10), format!("|E - ln 2| {}", worst.describe()))
}

/// i R_y(θ̃) R_z(π) with its θ̃ derivative, built from reference matrices.
fn composition_coin(theta_tilde: f64) -> CoinOperator {
    let [_, jy, _] = spin_ops(2);
    let rz = rotation(2, Axis::Z, PI);
    let ry = rotation(2, Axis::Y, theta_tilde);
    let matrix = (&ry * &rz).map(|z| z * I);
    let derivative = &jy * &ry * &rz;
    CoinOperator {
        dim: 2,
        family: CoinFamily::GroverComposition,
        theta: theta_tilde,
        matrix,
        derivative,
    }
}

fn grover_identities() -> Verdict {
    let mut r = rng(108);
    let mut probes = vec![ProbeSpec::lowest(2).unwrap(), ProbeSpec::new(vec![PI / 2.0], vec![0.0]).unwrap()];
    probes.extend((0..3).map(|_| random_probe(2, &mut r)));

    let mut identity = Worst::default();
    let mut ratio = Worst::default();
    let mut skipped = 0;
    for k in 1..=9 {
        let theta = k as f64 / 10.0;
        let theta_tilde = 2.0 * theta.acos();
        let comp = composition_coin(theta_tilde);
        for probe in &probes {
            for t in 1..=6 {
                let g = pair(CoinFamily::Grover, 2, theta, probe, t);
                let c = DerivativePair::new(probe, t).unwrap().evolve_steps(&comp, t).unwrap();
                let (hg, hc) = (qfi_pure(&g), qfi_pure(&c));
                identity.see(rel(hg, 4.0 * hc / (1.0 - theta * theta)), || format!("theta={theta} t={t}"));
                // sites sitting on the zero-probability cutoff are dropped on one side only
                if straddles_cutoff(&g, 1e-9) || straddles_cutoff(&c, 1e-9) || hc < 1e-12 {
                    skipped += 1;
                    continue;
                }
                let d = (fi_position(&g) / hg - fi_position(&c) / hc).abs();
                ratio.see(d, || format!("theta={theta} t={t}"));
            }
        }
    }

    let middle = ProbeSpec::basis(3, 1).unwrap();
    let mut beaten = Vec::new();
    for theta in [0.2, 0.5, 1.0 / 3f64.sqrt(), 0.8] {
        for t in 1..=6 {
            let h0 = qfi_pure(&pair(CoinFamily::Grover, 3, theta, &middle, t));
            let best = best_probe(CoinFamily::Grover, 3, theta, t).best_value;
            if best > h0 * (1.0 + 1e-6) {
                beaten.push(format!("theta={theta:.3} t={t}: {best:.4} > {h0:.4}"));
            }
        }
    }

    let mut detail = format!(
        "D=2 rel {}, ratio {} ({skipped} cutoff cells skipped)",
        identity.describe(),
        ratio.describe()
    );
    if beaten.is_empty() {
        detail.push_str("; |0> optimal in D=3");
    } else {
        detail.push_str(&format!("; |0> beaten in {} of 24 D=3 cells: {}", beaten.len(), beaten.join(", ")));
    }
    Verdict::new(identity.within(1e-8) && ratio.within(1e-10) && beaten.is_empty(), detail)
}

fn fidelity_cross_check() -> Verdict {
    let mut r = rng(109);
    let mut worst = Worst::default();
    let mut richardson = Worst::default();
    let mut off = Vec::new();
    for _ in 0..100 {
        let (family, dim, theta) = match r.random_range(0..6) {
            0 => (CoinFamily::rotation(Axis::X), r.random_range(2..=5), r.random_range(-PI..PI)),
            1 => (CoinFamily::rotation(Axis::Y), r.random_range(2..=5), r.random_range(-PI..PI)),
            2 => (CoinFamily::rotation(Axis::Z), r.random_range(2..=5), r.random_range(-PI..PI)),
            3 => (CoinFamily::Grover, r.random_range(2..=3), r.random_range(0.05..0.95)),
            4 => (CoinFamily::EmbeddedRotationZ, r.random_range(3..=5), r.random_range(-PI..PI)),
            _ => (
                CoinFamily::EmbeddedU2 {
                    xi: r.random_range(-PI..PI),
                    zeta: r.random_range(-PI..PI),
                },
                r.random_range(3..=5),
                r.random_range(-PI..PI),
            ),
        };
        let t = r.random_range(1..=8);
        let probe = random_probe(dim, &mut r);
        let exact = qfi_pure(&pair(family, dim, theta, &probe, t));
        let estimate = qfi_fidelity(&family, dim, theta, &probe, t, 1e-4).unwrap();
        let d = rel(estimate, exact);
        if d > 1e-4 {
            off.push(format!("{family} D={dim} theta={theta:.2} t={t}"));
        }
        worst.see(d, || format!("{family} D={dim} theta={theta:.3} t={t}"));
        let extrapolated = qfi_fidelity_richardson(&family, dim, theta, &probe, t, 1e-4).unwrap();
        richardson.see(rel(extrapolated, exact), || format!("{family} D={dim} theta={theta:.3} t={t}"));
    }
    Verdict::new(
        worst.within(1e-4),
        format!(
            "worst rel {}, {} of 100 above 1e-4 [{}]; Richardson worst rel {}",
            worst.describe(),
            off.len(),
            off.join(", "),
            richardson.describe()
        ),
    )
}

fn overlap_lemma() -> Verdict {
    let mut r = rng(110);
    let mut below = Worst::default();
    let mut attained = Worst::default();
    let mut gap = Worst::default();
    for dim in 2..=4 {
        let m: Vec<f64> = (0..dim).map(|k| (dim as f64 - 1.0) / 2.0 - k as f64).collect();
        for (t, dtheta) in [(1, 0.3), (2, 0.4), (3, 0.2), (5, 0.1), (1, 0.9)] {
            let (closed, (mj, mk)) = parthasarathy_min(dim, t, dtheta).unwrap();
            let phase = |mu: f64| Complex64::from_polar(1.0, mu * t as f64 * dtheta);
            let overlap = |w: &[f64]| -> f64 { w.iter().zip(&m).map(|(&wk, &mu)| wk * phase(mu)).sum::<Complex64>().norm_sqr() };
            let sampled = (0..100_000)
                .map(|_| {
                    let w: Vec<f64> = random_state(dim, &mut r).iter().map(|a| a.norm_sqr()).collect();
                    overlap(&w)
                })
                .fold(f64::INFINITY, f64::min);
            let at = || format!("D={dim} t={t} dtheta={dtheta}");
            below.see(closed - sampled, at);
            gap.see(sampled - closed, at);
            let w: Vec<f64> = m.iter().map(|&mu| if mu == mj || mu == mk { 0.5 } else { 0.0 }).collect();
            attained.see((overlap(&w) - closed).abs(), at);
        }
    }
    Verdict::new(
        below.within(1e-6) && attained.within(1e-12),
        format!(
            "sampled below closed form by {}, minimizer residual {}, sampling gap {}",
            below.describe(),
            attained.describe(),
            gap.describe()
        ),
    )
}

fn catalogue() -> Vec<(CoinFamily, usize, f64)> {
    let mut v = Vec::new();
    for dim in 2..=6 {
        for axis in Axis::ALL {
            v.push((CoinFamily::rotation(axis), dim, 0.9));
        }
    }
    for dim in 3..=5 {
        v.push((CoinFamily::EmbeddedRotationZ, dim, 1.3));
        v.push((CoinFamily::EmbeddedU2 { xi: 0.2, zeta: -0.7 }, dim, 0.5));
    }
    v.push((CoinFamily::Grover, 2, 0.6));
    v.push((CoinFamily::Grover, 3, 0.45));
    v.push((CoinFamily::GroverComposition, 2, 1.7));
    v
}

fn property_suite() -> Verdict {
    let mut r = rng(111);
    let mut unitarity = Worst::default();
    let mut norm = Worst::default();
    let mut cone = Worst::default();
    let mut bound = Worst::default();
    let mut recurrence = Worst::default();
    for (family, dim, theta0) in catalogue() {
        for k in 0..50 {
            let theta = match family {
                CoinFamily::Grover => k as f64 / 50.0,
                CoinFamily::GroverComposition => PI * k as f64 / 49.0,
                _ => -TAU + 2.0 * TAU * k as f64 / 49.0,
            };
            let coin = family.build(dim, theta).unwrap();
            unitarity.see(coin.unitarity_defect(), || format!("{family} D={dim}"));
        }
        let coin = family.build(dim, theta0).unwrap();
        for t in 1..=20 {
            let probe = random_probe(dim, &mut r);
            let p = pair(family, dim, theta0, &probe, t);
            norm.see((p.state.norm_sqr() - 1.0).abs(), || format!("{family} D={dim} t={t}"));
            let reach = (dim / 2 * t) as i64;
            let outside: f64 = p
                .state
                .positions()
                .zip(position_distribution(&p.state))
                .filter(|(x, _)| x.abs() > reach)
                .map(|(_, q)| q)
                .sum();
            cone.see(outside, || format!("{family} D={dim} t={t}"));
            let (h, f) = (qfi_pure(&p), fi_position(&p));
            bound.see((f - h) / h.max(1.0), || format!("{family} D={dim} t={t}"));

            if t <= 5 {
                let chi = probe.amplitudes();
                let mut total = vec![c(0.0); RefWalk::start(&chi, t).flat().len()];
                for m in 0..t {
                    let mut w = RefWalk::start(&chi, t);
                    for _ in 0..m {
                        w = w.step(&coin.matrix);
                    }
                    w = w.step(&coin.derivative);
                    for _ in m + 1..t {
                        w = w.step(&coin.matrix);
                    }
                    for (acc, v) in total.iter_mut().zip(w.flat()) {
                        *acc += v;
                    }
                }
                let diff = p
                    .dstate
                    .as_slice()
                    .iter()
                    .zip(&total)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                recurrence.see(diff, || format!("{family} D={dim} t={t}"));
            }
        }
    }
    Verdict::new(
        unitarity.within(1e-12)
            && norm.within(1e-12)
            && cone.value == 0.0
            && bound.within(1e-9)
            && recurrence.within(1e-12),
        format!(
            "unitarity {}, norm {}, outside cone {}, F-H {}, recurrence {}",
            unitarity.describe(),
            norm.describe(),
            cone.describe(),
            bound.describe(),
            recurrence.describe()
        ),
    )
}

fn position_fi_landscapes() -> Verdict {
    let family = CoinFamily::rotation(Axis::Y);
    let mut r = rng(112);
    let mut first_step = Worst::default();
    let mut non_monotone = None;
    for _ in 0..200 {
        let theta = r.random_range(0.05..TAU - 0.05);
        let alpha = r.random_range(0.05..PI - 0.05);
        let probe = ProbeSpec::new(vec![alpha], vec![0.0]).unwrap();
        let rows = metrology_trajectory(&family, 2, theta, &probe, 6).unwrap();
        first_step.see((rows[0].fi - 1.0).abs(), || format!("theta={theta:.3} alpha={alpha:.3}"));
        let up = rows.windows(2).any(|w| w[1].fi > w[0].fi + 1e-9);
        let down = rows.windows(2).any(|w| w[1].fi < w[0].fi - 1e-9);
        if up && down && non_monotone.is_none() {
            non_monotone = Some(format!("theta={theta:.3} alpha={alpha:.3}"));
        }
    }
    Verdict::new(
        first_step.within(1e-10) && non_monotone.is_some(),
        format!(
            "|F(t=1) - 1| {}, non-monotone in t at {}",
            first_step.describe(),
            non_monotone.as_deref().unwrap_or("no sampled point")
        ),
    )
}

type Criterion = fn() -> Verdict;

fn main() {
    let criteria: &[(&str, Criterion)] = &[
        ("1 z-rotation maximum", z_rotation_maximum),
        ("2 z-rotation position FI", z_rotation_fi_vanishes),
        ("3 embedded z-rotation", embedding_gives_no_gain),
        ("4 qubit x/y special angles", qubit_special_angles),
        ("5 dimensional scaling", dimensional_scaling),
        ("6 rates at t = 40", asymptotic_rates),
        ("7 entanglement of the z probe", entanglement_of_optimal_z_probe),
        ("8 Grover identities", grover_identities),
        ("9 fidelity QFI", fidelity_cross_check),
        ("10 overlap minimum", overlap_lemma),
        ("11 property suite", property_suite),
        ("11b position FI landscapes", position_fi_landscapes),
    ];
    let mut failed = 0;
    for &(name, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("{tag} {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), verdict.detail);
        if !verdict.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
