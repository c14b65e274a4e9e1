//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use quasimodes::beams::{build_beam_with, check_spectrum_capture, fit_width_exponent};
use quasimodes::conclab::{
    bad_set_audit, build_envelope_scheme, build_mode_defect_scheme, measure_masses, sample_conformal_factor,
    CubeMeasureSpec, IntervalScheme, QRule, Resolution, Verdict, DEFAULT_EPSILONS,
};
use quasimodes::doublewell::{solve_wells, splitting_sweep, DoubleWellProblem};
use quasimodes::flow::{build_branches, monotonicity_audit, sojourn_measure, HadamardProbe, SojournVerdict};
use quasimodes::geodesic::{
    find_equators, is_elliptic_generic, outer_equator, poincare_map, Classification, CriticalKind, PoincareData,
    DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE,
};
use quasimodes::spectral::global_spectrum;
use quasimodes::stats::{linear_fit, median};
use quasimodes::surface::{
    make_coupled_factor, make_flat_factor, ConformalFactor, ConformalFamily, SurfaceOfRevolution,
};

type Outcome = quasimodes::Result<(bool, String)>;
type Entry = (&'static str, &'static str, Option<u64>, fn() -> Outcome);

fn torus() -> SurfaceOfRevolution {
    SurfaceOfRevolution::torus(2.0, 1.0).unwrap()
}

fn flat_family(points: usize) -> ConformalFamily {
    let s = torus();
    let f = make_flat_factor(&s, 8, 0.1).unwrap();
    ConformalFamily::uniform(s, f, points).unwrap()
}

fn a1() -> Outcome {
    let flat = SurfaceOfRevolution::flat(1.0, 2.0 * PI)?;
    let fam = ConformalFamily::uniform(flat, ConformalFactor::zero(), 2)?;
    let mut exact: Vec<f64> = (-4i32..=4)
        .flat_map(|j| (-4i32..=4).map(move |k| (j * j + k * k) as f64))
        .collect();
    exact.sort_by(f64::total_cmp);
    exact.truncate(20);
    let errors = |n_s: usize| -> quasimodes::Result<Vec<f64>> {
        let got = global_spectrum(&fam, 0.0, 5.5, n_s)?.values;
        Ok(exact.iter().zip(&got).map(|(e, g)| g - e).collect())
    };
    let e1 = errors(1024)?;
    let e2 = errors(2048)?;
    let rel = e1
        .iter()
        .zip(&exact)
        .map(|(d, e)| if *e == 0.0 { d.abs() } else { d.abs() / e })
        .fold(0.0, f64::max);
    // values whose s-frequency vanishes are exact on any grid
    let ratios: Vec<f64> = e1
        .iter()
        .zip(&e2)
        .filter(|(a, _)| a.abs() > 1e-9)
        .map(|(a, b)| a / b)
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(*r), h.max(*r)));
    let pass = rel <= 1e-4 && !ratios.is_empty() && lo >= 4.0 * 0.85 && hi <= 4.0 * 1.15;
    Ok((
        pass,
        format!(
            "max rel err {rel:.2e}; doubling ratios in [{lo:.4}, {hi:.4}] over {} values",
            ratios.len()
        ),
    ))
}

fn a2() -> Outcome {
    let c = 0.3;
    let constant = ConformalFamily::uniform(torus(), ConformalFactor::constant(c)?, 2)?;
    let probe = HadamardProbe::new(&constant, 12.0, 256);
    let times = [0.2, 0.35, 0.5, 0.65, 0.8];
    let mut closed: f64 = 0.0;
    for &t in &times {
        let spec = probe.spectrum_at(t)?;
        for j in probe.guarded_branches(&spec, 10) {
            let r = probe.check_on(&spec, j, 1e-3)?;
            let oracle = c * spec.values[j];
            closed = closed.max((r.richardson - oracle).abs() / oracle);
        }
    }

    let fam = flat_family(2);
    let probe = HadamardProbe::new(&fam, 14.0, 256);
    let mut worst: f64 = 0.0;
    let mut short = 0;
    for &t in &times {
        let spec = probe.spectrum_at(t)?;
        let branches = probe.guarded_branches(&spec, 20);
        if branches.len() < 20 {
            short += 1;
        }
        for j in branches {
            worst = worst.max(probe.check_on(&spec, j, 1e-3)?.relative);
        }
    }
    Ok((
        closed <= 1e-6 && worst <= 1e-4 && short == 0,
        format!("constant f: {closed:.2e}; flat factor: max Richardson residual {worst:.2e} (5 t x 20 branches)"),
    ))
}

fn a3_a10(table_points: usize) -> (Outcome, Outcome) {
    let fam = flat_family(table_points);
    let table = match build_branches(&fam, 14.0, 256) {
        Ok(t) => t,
        Err(e) => return (Ok((false, format!("error: {e}"))), Ok((false, format!("error: {e}")))),
    };
    let violations = monotonicity_audit(&table);
    let a3 = Ok((
        table.j_max() >= 30 && violations.is_empty(),
        format!(
            "J_max = {}, {} t-points, {} violations",
            table.j_max(),
            table.t_grid.len(),
            violations.len()
        ),
    ));

    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let line: Vec<f64> = grid.iter().map(|t| 2.0 + 3.0 * t).collect();
    let synthetic = sojourn_measure(&grid, &line, 2.6, 3.5, 3.0);
    let exact = (synthetic.measured - 0.3).abs() <= 1e-12 && (synthetic.bound - 0.3).abs() <= 1e-12;

    let (mut within, mut exceeded, mut unmet, mut skipped) = (0, 0, 0, 0);
    for j in 0..table.j_max() {
        let mu = table.branch(j);
        if mu[0] <= 1e-8 {
            skipped += 1;
            continue;
        }
        let mass = table.branch_mass(j);
        let m_floor = mu.iter().zip(&mass).map(|(a, b)| a * b).fold(f64::INFINITY, f64::min);
        let n = mu.len();
        match sojourn_measure(&table.t_grid, &mu, mu[n / 4], mu[3 * n / 4], m_floor).verdict {
            SojournVerdict::Within => within += 1,
            SojournVerdict::Exceeded => exceeded += 1,
            SojournVerdict::HypothesisUnmet => unmet += 1,
        }
    }
    let a10 = Ok((
        exact && exceeded == 0 && unmet == 0,
        format!(
            "linear case |K| = {:.15} vs {:.15}; branches within {within}, exceeded {exceeded}, hypothesis unmet {unmet}, constant skipped {skipped}",
            synthetic.measured, synthetic.bound
        ),
    ));
    (a3, a10)
}

fn a4() -> Outcome {
    let t = torus();
    let g = outer_equator(&t)?;
    let p = poincare_map(&g)?;
    let err = (p.winding_theta_full - 2.0 * PI * 3f64.sqrt()).abs();
    let outer = is_elliptic_generic(&p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE);
    let inner = find_equators(&t)
        .equators()
        .iter()
        .find(|e| e.kind == CriticalKind::Unstable)
        .map(|e| poincare_map(e).map(|p| is_elliptic_generic(&p, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE)))
        .transpose()?;
    let third = is_elliptic_generic(
        &PoincareData::from_rotation(2.0 * PI / 3.0),
        DEFAULT_MAX_DENOMINATOR,
        DEFAULT_TOLERANCE,
    );
    Ok((
        err <= 1e-6
            && outer == Classification::EllipticGeneric
            && inner == Some(Classification::Hyperbolic)
            && third == Classification::RootOfUnitySuspect(3),
        format!("winding error {err:.1e}; outer {outer:?}; inner {inner:?}; theta/2pi = 1/3 -> {third:?}"),
    ))
}

fn a5() -> Outcome {
    let fam = flat_family(2);
    let g = outer_equator(&fam.base)?;
    let p = poincare_map(&g)?;
    let mut dist = Vec::new();
    for m in 10..=80 {
        let beam = build_beam_with(&g, &p, m, 0)?;
        dist.push(check_spectrum_capture(&beam, &fam, 0.0, 1.0, 1024)?.distance);
    }
    let max = dist.iter().copied().fold(0.0, f64::max);
    let med = median(&dist);
    Ok((
        max <= 5.0 * med,
        format!("|lambda_m - nu_m(0)| over m = 10..80: median {med:.4}, max {max:.4}"),
    ))
}

fn a6() -> Outcome {
    let fam = flat_family(11);
    let g = outer_equator(&fam.base)?;
    let p = poincare_map(&g)?;
    let mut failures = 0;
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for m in 10..=40 {
        let beam = build_beam_with(&g, &p, m, 0)?;
        for &t in fam.t_grid() {
            let cap = check_spectrum_capture(&beam, &fam, t, 1.0, 1024)?;
            checks += 1;
            worst = worst.max(cap.distance / cap.c_m);
            if !cap.captured || cap.distance > cap.c_m {
                failures += 1;
            }
        }
    }
    Ok((
        failures == 0,
        format!("{failures} failures in {checks} (m, t) pairs; max dist / C_m = {worst:.3}"),
    ))
}

fn a7() -> Outcome {
    let g = outer_equator(&torus())?;
    let p = poincare_map(&g)?;
    let beams = (10..=80)
        .map(|m| build_beam_with(&g, &p, m, 0))
        .collect::<quasimodes::Result<Vec<_>>>()?;
    let slope = fit_width_exponent(&beams).map_or(f64::NAN, |f| f.slope);
    Ok(((slope + 0.25).abs() <= 0.05, format!("slope {slope:.4}")))
}

fn a8() -> Outcome {
    let fam = flat_family(101);
    let ms = [10, 20, 30, 40];
    let scheme = build_envelope_scheme(&fam, &ms, 1e-8, QRule::InverseSqrt, 256)?;
    let report = measure_masses(&scheme, &fam, Resolution::Separable { n_s: 256 })?;
    let q = |m| scheme.interval(m).map_or(f64::NAN, |i| i.q);
    let lo: Vec<f64> = report.sup_masses(10).iter().map(|s| s / q(10)).collect();
    let hi: Vec<f64> = report.sup_masses(40).iter().map(|s| s / q(40)).collect();
    let worst = lo.iter().zip(&hi).map(|(a, b)| b / a).fold(0.0, f64::max);
    Ok((
        lo.len() == 101 && hi.len() == 101 && worst <= 0.1,
        format!("max over t of (sup-mass/q at m=40) / (same at m=10) = {worst:.4}"),
    ))
}

fn a9() -> Outcome {
    let s = torus();
    let f = make_coupled_factor(&s, 8, 0.1, 0.3)?;
    let fam = ConformalFamily::uniform(s, f, 41)?;
    let res = Resolution::Coupled { n_s: 192, n_phi: 96 };
    let ms: Vec<u32> = (8..=16).collect();
    let scheme = build_mode_defect_scheme(&fam, &ms, 1.1, QRule::InverseSqrt, res)?;
    let report = measure_masses(&scheme, &fam, res)?;
    let audit = bad_set_audit(&report, &scheme, &DEFAULT_EPSILONS);
    let exceeded = audit.rows.iter().filter(|r| r.verdict != Verdict::Within).count();
    let max_y = audit.rows.iter().map(|r| r.measured).fold(0.0, f64::max);
    Ok((
        exceeded == 0 && audit.monotone_in_epsilon,
        format!(
            "K = {:.3} (fitted lower bound {:.3}); {exceeded} of {} rows outside; max |Y| = {max_y:.4}; monotone in eps: {}",
            audit.k_explicit,
            audit.k_fit,
            audit.rows.len(),
            audit.monotone_in_epsilon
        ),
    ))
}

fn a11() -> Outcome {
    let hbars = [0.2, 0.15, 0.1, 0.08];
    let mut alternates = true;
    for &h in &hbars {
        alternates &= solve_wells(&DoubleWellProblem::new(h), 4)?.parity_alternates();
    }
    let (reports, fit) = splitting_sweep(&DoubleWellProblem::new(0.1), &hbars)?;
    let overlaps_ok = reports
        .iter()
        .all(|r| (0.45..=0.55).contains(&r.overlap_even) && (0.45..=0.55).contains(&r.overlap_odd));
    let dist = reports
        .iter()
        .map(|r| r.min_single_mode_distance)
        .fold(f64::INFINITY, f64::min);
    let x: Vec<f64> = reports.iter().map(|r| 1.0 / r.hbar).collect();
    let y: Vec<f64> = reports.iter().map(|r| r.splitting.ln()).collect();
    let r2 = linear_fit(&x, &y).map_or(0.0, |f| f.r_squared);
    let (olo, ohi) = reports.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| {
        (
            l.min(r.overlap_even.min(r.overlap_odd)),
            h.max(r.overlap_even.max(r.overlap_odd)),
        )
    });
    Ok((
        alternates && overlaps_ok && dist >= 0.6 && r2 >= 0.99 && fit.is_some(),
        format!(
            "parity alternates: {alternates}; overlaps in [{olo:.3}, {ohi:.3}]; min distance {dist:.3}; R^2 {r2:.5}"
        ),
    ))
}

fn a12() -> Outcome {
    let s = torus();
    let spec = CubeMeasureSpec::default();
    let tail = spec.relative_tail();
    let s_gamma = outer_equator(&s)?.s_gamma;
    let l = s.profile_period();
    let mut in_cone = 0;
    let mut identical = 0;
    let mut worst = f64::INFINITY;
    for seed in 0..100u64 {
        let a = sample_conformal_factor(&s, &spec, seed)?;
        let b = sample_conformal_factor(&s, &spec, seed)?;
        if serde_json::to_vec(&a).unwrap() == serde_json::to_vec(&b).unwrap() {
            identical += 1;
        }
        let margin = (0..10_000)
            .map(|i| l * i as f64 / 10_000.0)
            .filter_map(|x| {
                let d = s.wrapped_offset(x, s_gamma).abs();
                (d > 0.0).then(|| a.factor.value_s(x) / (a.cone_constant * d.powi(spec.order as i32)))
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.min(margin);
        if margin >= 1.0 {
            in_cone += 1;
        }
    }
    Ok((
        tail <= 1e-5 && in_cone == 100 && identical == 100,
        format!(
            "tail {tail:.2e}; {in_cone}/100 in cone (min f / (c d^N) = {worst:.3}); {identical}/100 byte-identical"
        ),
    ))
}

fn a13() -> Outcome {
    let fam = ConformalFamily::uniform(torus(), ConformalFactor::constant(0.5)?, 11)?;
    let ms = [10, 12, 14];
    let scheme = build_envelope_scheme(&fam, &ms, 1e-8, QRule::InverseSqrt, 256)?;
    let report = measure_masses(&scheme, &fam, Resolution::Separable { n_s: 256 })?;
    let audit = bad_set_audit(&report, &scheme, &DEFAULT_EPSILONS);
    let flagged = !audit.in_cone && audit.rows.iter().all(|r| r.verdict == Verdict::HypothesesViolated);

    let g = outer_equator(&torus())?;
    let p = poincare_map(&g)?;
    let entries = (10..=40)
        .map(|m| build_beam_with(&g, &p, m, 0).map(|b| (m, b.lambda_m, 1.0)))
        .collect::<quasimodes::Result<Vec<_>>>()?;
    let constant_l = IntervalScheme::manual(&entries, QRule::InverseSqrt)?.summability();
    Ok((
        flagged && !constant_l.tail_decreasing,
        format!(
            "constant f: {} rows, verdict '{}'; constant l_m: tail decreasing = {}",
            audit.rows.len(),
            audit.rows.first().map_or("none".into(), |r| r.verdict.to_string()),
            constant_l.tail_decreasing
        ),
    ))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Option<Duration>,
}

fn report(c: &Criterion, outcome: std::thread::Result<Outcome>, elapsed: Duration) -> bool {
    let (pass, detail) = match outcome {
        Ok(Ok((pass, detail))) => (pass, detail),
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(_) => (false, "panicked".into()),
    };
    let over = c.budget.is_some_and(|b| elapsed > b);
    let pass = pass && !over;
    let budget = c.budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
    println!(
        "{} {:<4} {:<28} [{:.1}s{budget}] {detail}{}",
        if pass { "PASS" } else { "FAIL" },
        c.id,
        c.name,
        elapsed.as_secs_f64(),
        if over { " (over budget)" } else { "" }
    );
    pass
}

fn timed(c: Criterion, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    report(&c, outcome, start.elapsed())
}

fn crit(id: &'static str, name: &'static str, budget_s: Option<u64>) -> Criterion {
    Criterion {
        id,
        name,
        budget: budget_s.map(Duration::from_secs),
    }
}

fn main() {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('A')).collect();
    let wanted = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let mut ok = true;
    let start = Instant::now();

    if wanted("A1") {
        ok &= timed(crit("A1", "solver oracle", Some(10)), a1);
    }
    if wanted("A2") {
        ok &= timed(crit("A2", "Hadamard formula", Some(120)), a2);
    }
    if wanted("A3") || wanted("A10") {
        let t0 = Instant::now();
        let (r3, r10) = match catch_unwind(|| a3_a10(101)) {
            Ok((a, b)) => (Ok(a), Ok(b)),
            Err(_) => (Err(Box::new("panicked") as _), Err(Box::new("panicked") as _)),
        };
        let elapsed = t0.elapsed();
        if wanted("A3") {
            ok &= report(&crit("A3", "monotonicity", None), r3, elapsed);
        }
        if wanted("A10") {
            ok &= report(&crit("A10", "sojourn lemma", None), r10, elapsed);
        }
    }
    let rest: [Entry; 9] = [
        ("A4", "Poincare map / ellipticity", None, a4),
        ("A5", "quasi-eigenvalue residual", None, a5),
        ("A6", "spectral capture", None, a6),
        ("A7", "beam width scaling", None, a7),
        ("A8", "concentration, separable", Some(600), a8),
        ("A9", "concentration, coupled", Some(7200), a9),
        ("A11", "double well", Some(60), a11),
        ("A12", "sampler", None, a12),
        ("A13", "negative controls", None, a13),
    ];
    for (id, name, budget, f) in rest {
        if wanted(id) {
            ok &= timed(crit(id, name, budget), f);
        }
    }
    println!(
        "acceptance: {} in {:.1}s",
        if ok { "all criteria pass" } else { "FAILURES" },
        start.elapsed().as_secs_f64()
    );
    if !ok {
        std::process::exit(1);
    }
}
