use std::f64::consts::PI;

use serde::Serialize;

use super::config::{BackendChoice, RunConfig, SchemeConfig};
use super::output::{line_plot, Artifacts, Csv, Series};
use super::Command;
use crate::beams::{build_beam_with, check_spectrum_capture, measure_defect, LOCALIZATION_DELTAS};
use crate::conclab::{
    bad_set_audit, build_beam_scheme, build_envelope_scheme, build_mode_defect_scheme, measure_masses,
    sample_conformal_factor, Resolution,
};
use crate::csv_row;
use crate::doublewell::{build_well_quasimode, solve_wells, splitting_sweep, DoubleWellProblem, QuarticWell, Well};
use crate::error::{Error, Result};
use crate::flow::{build_branches, monotonicity_audit, sojourn_measure, HadamardProbe, HadamardReport};
use crate::geodesic::{is_elliptic_generic, outer_equator, poincare_map};
use crate::spectral::{assemble_coupled, eigs_in_window, global_spectrum, separable_window, Parity, SpectralWindow};
use crate::surface::{ConformalFactor, ConformalFamily, SurfaceOfRevolution};

pub(super) fn dispatch(command: &Command, config: &RunConfig, plot: bool, out: &mut Artifacts) -> Result<bool> {
    match command {
        Command::Validate => validate(out),
        Command::Geodesic => geodesic(config, out),
        Command::Spectrum => spectrum(config, out),
        Command::Beam => beam(config, plot, out),
        Command::Flow => flow(config, plot, out),
        Command::Concentrate => concentrate(config, out),
        Command::Doublewell { .. } => doublewell(config, plot, out),
        Command::SampleMetric => sample_metric(config, plot, out),
    }
}

fn family(config: &RunConfig, t_points: usize) -> Result<ConformalFamily> {
    let surface = config.surface()?;
    let factor = config.factor(&surface)?;
    ConformalFamily::uniform(surface, factor, t_points).map_err(|e| Error::Config(e.to_string()))
}

fn resolve(choice: BackendChoice, factor: &ConformalFactor, n_s: usize, n_phi: usize) -> Result<Resolution> {
    match choice {
        BackendChoice::Separable if !factor.is_separable() => {
            Err(Error::Config("separable backend requested for a coupled factor".into()))
        }
        BackendChoice::Coupled => Ok(Resolution::Coupled { n_s, n_phi }),
        BackendChoice::Auto if !factor.is_separable() => Ok(Resolution::Coupled { n_s, n_phi }),
        _ => Ok(Resolution::Separable { n_s }),
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
    pass: bool,
}

fn check(name: &'static str, measured: f64, tolerance: f64) -> Check {
    Check {
        name,
        measured,
        tolerance,
        pass: measured <= tolerance,
    }
}

fn validate(out: &mut Artifacts) -> Result<bool> {
    let mut checks = Vec::new();

    let flat = SurfaceOfRevolution::flat(1.0, 2.0 * PI)?;
    let fam = ConformalFamily::uniform(flat, ConformalFactor::zero(), 2)?;
    let got = global_spectrum(&fam, 0.0, 5.5, 1024)?.values;
    let mut exact: Vec<f64> = (-3i32..=3)
        .flat_map(|j| (-3i32..=3).map(move |k| (j * j + k * k) as f64))
        .collect();
    exact.sort_by(f64::total_cmp);
    let err = got
        .iter()
        .zip(&exact)
        .take(20)
        .map(|(g, e)| if *e == 0.0 { g.abs() } else { (g - e).abs() / e })
        .fold(0.0, f64::max);
    checks.push(check("flat_torus_first_20_relative", err, 1e-4));

    let torus = SurfaceOfRevolution::torus(2.0, 1.0)?;
    let c = 0.3;
    let fam = ConformalFamily::uniform(torus.clone(), ConformalFactor::constant(c)?, 2)?;
    let a = global_spectrum(&fam, 0.0, 12.0, 256)?;
    let b = global_spectrum(&fam, 1.0, 12.0 * c.exp(), 256)?;
    let scale = a
        .values
        .iter()
        .zip(&b.values)
        .skip(1)
        .map(|(x, y)| (y / x / c.exp() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(check("constant_factor_scaling", scale, 1e-9));

    let probe = HadamardProbe::new(&fam, 12.0, 256);
    let spec = probe.spectrum_at(0.5)?;
    let mut hadamard: f64 = 0.0;
    for j in probe.guarded_branches(&spec, 10) {
        let r = probe.check_on(&spec, j, 1e-3)?;
        hadamard = hadamard.max(r.residual_richardson / r.predicted);
    }
    checks.push(check("hadamard_constant_factor", hadamard, 1e-6));

    let n = 4096;
    let h = torus.profile_period() / n as f64;
    let gb: f64 = (0..n)
        .map(|i| {
            let s = i as f64 * h;
            torus.gauss_curvature(s) * torus.radius(s) * h * 2.0 * PI
        })
        .sum();
    checks.push(check("gauss_bonnet_torus", gb.abs(), 1e-8));

    let g = outer_equator(&torus)?;
    let p = poincare_map(&g)?;
    checks.push(check(
        "outer_equator_winding",
        (p.winding_theta_full - 2.0 * PI * 3f64.sqrt()).abs(),
        1e-6,
    ));

    let ok = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{:<32} {:>12.3e}  (tol {:.0e})  {}",
            c.name,
            c.measured,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    #[derive(Serialize)]
    struct Report {
        checks: Vec<Check>,
        all_pass: bool,
    }
    out.json("validate.json", &Report { checks, all_pass: ok })?;
    Ok(ok)
}

fn geodesic(config: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let surface = config.surface()?;
    let g = outer_equator(&surface)?;
    let p = poincare_map(&g)?;
    let class = is_elliptic_generic(&p, config.geodesic.max_denominator, config.geodesic.tolerance);
    #[derive(Serialize)]
    struct Record {
        s_gamma: f64,
        #[serde(rename = "T")]
        period: f64,
        trace: f64,
        theta_full: f64,
        classification: crate::geodesic::Classification,
        integration_error: f64,
    }
    out.json(
        "geodesic.json",
        &Record {
            s_gamma: g.s_gamma,
            period: g.period,
            trace: p.trace(),
            theta_full: p.winding_theta_full,
            classification: class,
            integration_error: p.integration_error,
        },
    )?;
    Ok(true)
}

fn spectrum(config: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let fam = family(config, config.grid.t_points)?;
    let res = resolve(config.spectrum.backend, &fam.factor, config.grid.n_s, config.grid.n_phi)?;
    let window = match config.spectrum.window {
        Some([lo, hi]) => Some(SpectralWindow::from_bounds(lo, hi).map_err(|e| Error::Config(e.to_string()))?),
        None => None,
    };
    let mut csv = Csv::new(&["t", "backend", "n_or_window", "index", "mu", "residual"]);
    for &t in fam.t_grid() {
        match (res, &window) {
            (Resolution::Separable { n_s }, None) => {
                let g = global_spectrum(&fam, t, config.spectrum.lambda_max, n_s)?;
                for (j, (mu, (label, r))) in g.values.iter().zip(g.labels.iter().zip(&g.residuals)).enumerate() {
                    let n = if label.parity == Parity::Sin {
                        -(label.n as i64)
                    } else {
                        label.n as i64
                    };
                    csv.row(csv_row![t, "separable", n, j, *mu, *r]);
                }
            }
            (Resolution::Separable { n_s }, Some(w)) => {
                let mut hits = separable_window(&fam, t, n_s, w)?;
                hits.sort_by(|a, b| a.pair.mu.total_cmp(&b.pair.mu).then(a.n.cmp(&b.n)));
                let mut j = 0usize;
                for hit in hits {
                    for copy in 0..hit.multiplicity {
                        let n = if copy == 1 { -(hit.n as i64) } else { hit.n as i64 };
                        csv.row(csv_row![t, "separable", n, j, hit.pair.mu, hit.pair.residual]);
                        j += 1;
                    }
                }
            }
            (Resolution::Coupled { n_s, n_phi }, w) => {
                let op = assemble_coupled(&fam, t, n_s, n_phi)?;
                let (label, sol) = match w {
                    Some(w) => (format!("{}:{}", w.lo(), w.hi()), eigs_in_window(&op, w)?),
                    None => ("lowest".to_string(), op.lowest(config.spectrum.count)?),
                };
                for (j, p) in sol.pairs.iter().enumerate() {
                    csv.row(csv_row![t, "coupled", label.as_str(), j, p.mu, p.residual]);
                }
            }
        }
    }
    out.csv("spectrum.csv", csv)?;
    Ok(true)
}

fn beam(config: &RunConfig, plot: bool, out: &mut Artifacts) -> Result<bool> {
    let fam = family(config, config.grid.t_points)?;
    if !fam.factor.is_separable() {
        return Err(Error::Config("beam defects need a rotation-invariant factor".into()));
    }
    let n_s = config.grid.n_s;
    let g = outer_equator(&fam.base)?;
    let p = poincare_map(&g)?;
    let mut header = vec![
        "m".to_string(),
        "m1".into(),
        "lambda_m".into(),
        "sigma_m".into(),
        "C_m".into(),
    ];
    header.extend(LOCALIZATION_DELTAS.iter().map(|d| format!("loc_mass@{d}")));
    header.push("captured".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header);
    let mut profiles = Vec::new();
    for m in config.beam.m_min..=config.beam.m_max {
        let beam = build_beam_with(&g, &p, m, config.beam.m1)?;
        let d = measure_defect(&beam, &fam, 0.0, n_s)?;
        let mut captured = true;
        for &t in fam.t_grid() {
            captured &= check_spectrum_capture(&beam, &fam, t, config.beam.capture_c, n_s)?.captured;
        }
        let mut row = csv_row![m, beam.m1, beam.lambda_m, beam.sigma, d.c_m];
        row.extend(d.localization.iter().map(|&x| x.into()));
        row.push(captured.into());
        csv.row(row);
        if m == config.beam.m_min || m == config.beam.m_max {
            let l = fam.base.profile_period();
            let pts: Vec<(f64, f64)> = (0..400)
                .map(|i| {
                    let x = -0.5 * l + l * i as f64 / 400.0;
                    (x, beam.profile_at(x))
                })
                .collect();
            profiles.push((format!("m = {m}"), pts));
        }
    }
    out.csv("beam.csv", csv)?;
    if plot {
        let series: Vec<Series> = profiles
            .iter()
            .map(|(label, pts)| Series {
                label,
                points: pts.clone(),
            })
            .collect();
        out.write("beam.svg", &line_plot("beam profile against s - s_gamma", &series))?;
    }
    Ok(true)
}

fn flow(config: &RunConfig, plot: bool, out: &mut Artifacts) -> Result<bool> {
    let fc = &config.flow;
    let fam = family(config, fc.t_points)?;
    if !fam.factor.is_separable() {
        return Err(Error::Config("branch tables need a rotation-invariant factor".into()));
    }
    let table = build_branches(&fam, fc.lambda_max, fc.n_s)?;
    let mut csv = Csv::new(&["t", "j", "mu", "mass", "gap"]);
    for (k, &t) in table.t_grid.iter().enumerate() {
        for j in 0..table.j_max() {
            csv.row(csv_row![t, j, table.mu[k][j], table.mass[k][j], table.gap[k][j]]);
        }
    }
    out.csv("flow.csv", csv)?;

    let mut probe = HadamardProbe::new(&fam, fc.lambda_max, fc.n_s);
    probe.gap_floor = fc.gap_floor;
    let mut reports: Vec<HadamardReport> = Vec::new();
    for &t in &fc.probe_t {
        let spec = probe.spectrum_at(t)?;
        for j in probe.guarded_branches(&spec, fc.probe_branches) {
            reports.push(probe.check_on(&spec, j, fc.delta)?);
        }
    }
    let violations = monotonicity_audit(&table);
    let sojourn: Vec<_> = (0..table.j_max())
        .map(|j| {
            let mu = table.branch(j);
            let mass = table.branch_mass(j);
            let m_floor = mu.iter().zip(&mass).map(|(a, b)| a * b).fold(f64::INFINITY, f64::min);
            let n = mu.len();
            sojourn_measure(&table.t_grid, &mu, mu[n / 4], mu[3 * n / 4], m_floor)
        })
        .collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        j_max: usize,
        max_relative_residual: f64,
        monotonicity_violations: usize,
        hadamard: &'a [HadamardReport],
        sojourn: &'a [crate::flow::SojournReport],
    }
    out.json(
        "hadamard.json",
        &Summary {
            j_max: table.j_max(),
            max_relative_residual: reports.iter().map(|r| r.relative).fold(0.0, f64::max),
            monotonicity_violations: violations.len(),
            hadamard: &reports,
            sojourn: &sojourn,
        },
    )?;
    if plot {
        let series: Vec<(String, Vec<(f64, f64)>)> = (0..table.j_max().min(12))
            .map(|j| {
                (
                    format!("j = {j}"),
                    table.t_grid.iter().copied().zip(table.branch(j)).collect(),
                )
            })
            .collect();
        let series: Vec<Series> = series
            .iter()
            .map(|(l, p)| Series {
                label: l,
                points: p.clone(),
            })
            .collect();
        out.write("flow.svg", &line_plot("mu_j(t)", &series))?;
    }
    Ok(violations.is_empty())
}

fn concentrate(config: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let cc = &config.concentrate;
    let fam = family(config, config.grid.t_points)?;
    let res = resolve(cc.backend, &fam.factor, config.grid.n_s, config.grid.n_phi)?;
    let ms: Vec<u32> = (cc.m_min..=cc.m_max).collect();
    let scheme = match &cc.scheme {
        SchemeConfig::Envelope { pad } => {
            let Resolution::Separable { n_s } = res else {
                return Err(Error::Config("envelope windows need the separable backend".into()));
            };
            build_envelope_scheme(&fam, &ms, *pad, cc.q_rule, n_s)?
        }
        SchemeConfig::ModeDefect { c } => build_mode_defect_scheme(&fam, &ms, *c, cc.q_rule, res)?,
        SchemeConfig::BeamDefect { c } => {
            let g = outer_equator(&fam.base)?;
            let p = poincare_map(&g)?;
            let beams = ms
                .iter()
                .map(|&m| build_beam_with(&g, &p, m, 0))
                .collect::<Result<Vec<_>>>()?;
            build_beam_scheme(&fam, &beams, *c, cc.q_rule, res.n_s())?
        }
    }
    .thinned(cc.thin);
    let report = measure_masses(&scheme, &fam, res)?;
    let audit = bad_set_audit(&report, &scheme, &cc.epsilons);

    let mut masses = Csv::new(&["m", "t", "mu", "mass"]);
    for s in &report.samples {
        for mode in &s.modes {
            masses.row(csv_row![s.m, s.t, mode.mu, mode.mass]);
        }
    }
    out.csv("masses.csv", masses)?;
    let mut bad = Csv::new(&["m", "epsilon", "measured", "bound", "verdict"]);
    for r in &audit.rows {
        bad.row(csv_row![r.m, r.epsilon, r.measured, r.bound, r.verdict.to_string()]);
    }
    out.csv("badset.csv", bad)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        good_set_estimate: &'a [(f64, f64)],
        provenance: crate::conclab::Provenance,
        q_rule: crate::conclab::QRule,
        k_explicit: f64,
        k_fit: f64,
        k_lsq: f64,
        in_cone: bool,
        monotone_in_epsilon: bool,
        summability: crate::conclab::Summability,
        intervals: &'a [crate::conclab::SchemeInterval],
    }
    out.json(
        "summary.json",
        &Summary {
            good_set_estimate: &audit.good_set,
            provenance: scheme.provenance,
            q_rule: scheme.q_rule,
            k_explicit: audit.k_explicit,
            k_fit: audit.k_fit,
            k_lsq: audit.k_lsq,
            in_cone: audit.in_cone,
            monotone_in_epsilon: audit.monotone_in_epsilon,
            summability: scheme.summability(),
            intervals: &scheme.intervals,
        },
    )?;
    Ok(true)
}

fn doublewell(config: &RunConfig, plot: bool, out: &mut Artifacts) -> Result<bool> {
    let dc = &config.doublewell;
    let base = DoubleWellProblem {
        potential: QuarticWell { a: dc.a, b: dc.b },
        hbar: dc.hbar.first().copied().unwrap_or(0.1),
        x_cut: dc.x_cut,
        n_x: dc.n_x,
    };
    let (reports, _) = splitting_sweep(&base, &dc.hbar)?;
    let mut csv = Csv::new(&[
        "hbar",
        "E_even",
        "E_odd",
        "splitting",
        "defect",
        "overlap_e",
        "overlap_o",
        "min_single_mode_dist",
    ]);
    for r in &reports {
        csv.row(csv_row![
            r.hbar,
            r.e_even,
            r.e_odd,
            r.splitting,
            r.defect,
            r.overlap_even,
            r.overlap_odd,
            r.min_single_mode_distance
        ]);
    }
    out.csv("doublewell.csv", csv)?;
    if plot {
        let hbar = dc.hbar.iter().copied().fold(f64::INFINITY, f64::min);
        let problem = DoubleWellProblem { hbar, ..base };
        let sol = solve_wells(&problem, 2)?;
        let qm = build_well_quasimode(&problem, Well::Right, 0)?;
        let x = problem.nodes();
        let pts = |v: &[f64]| x.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
        let series = [
            Series {
                label: "phi_even",
                points: pts(&sol.vectors[0]),
            },
            Series {
                label: "phi_odd",
                points: pts(&sol.vectors[1]),
            },
            Series {
                label: "u (right well)",
                points: pts(&qm.vector),
            },
        ];
        out.write("doublewell.svg", &line_plot(&format!("hbar = {hbar}"), &series))?;
    }
    Ok(true)
}

fn sample_metric(config: &RunConfig, plot: bool, out: &mut Artifacts) -> Result<bool> {
    let surface = config.surface()?;
    let sample = sample_conformal_factor(&surface, &config.sampler, config.seed)?;
    let profile = sample.profile(&surface, 1000);
    let mut csv = Csv::new(&["s", "f"]);
    for &(s, f) in &profile {
        csv.row(csv_row![s, f]);
    }
    out.csv("factor.csv", csv)?;
    #[derive(Serialize)]
    struct Cone<'a> {
        seed: u64,
        order: u32,
        terms: usize,
        coefficients: &'a [f64],
        cone_constant: f64,
        cone_margin: f64,
        relative_tail: f64,
        in_cone: bool,
    }
    out.json(
        "cone.json",
        &Cone {
            seed: sample.seed,
            order: config.sampler.order,
            terms: config.sampler.terms,
            coefficients: &sample.coefficients,
            cone_constant: sample.cone_constant,
            cone_margin: sample.cone_margin,
            relative_tail: config.sampler.relative_tail(),
            in_cone: sample.cone_margin >= sample.cone_constant,
        },
    )?;
    if plot {
        let series = [Series {
            label: "f(s)",
            points: profile,
        }];
        out.write("factor.svg", &line_plot(&format!("seed {}", config.seed), &series))?;
    }
    Ok(true)
}
