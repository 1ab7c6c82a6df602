//! The seven subcommand runners. Each validates against its scenario block,
//! runs the corresponding library operations, writes artifacts into the
//! output directory and reports an exit code.

use crate::output::{gnuplot_script, manifest, OutputDir};
use crate::scenario::{poly_from_terms, CliError, CliResult, LoadedScenario};
use serde_json::json;
use std::fmt::Write as _;
use trkal::dns::{compare_short_time, dns_step, SpectralField3D};
use trkal::geom::Vec3;
use trkal::modes::{mode_cross, BeltramiMode};
use trkal::morse::{
    euler_check, find_critical_points, partition_polygons, trace_separatrices, CriticalSet,
};
use trkal::phase::{late_time_decay, phase_cauchy_solve, ScalingFrame};
use trkal::tracer::{
    integrate_streamline_with, quasi_stationary_angle, trace_gradient_line, Direction,
    TraceOptions, ZeroPhase,
};
use trkal::triplet::{triplet_evolve, TripletState};
use trkal::vorticity::{collinearity_defect, vertical_singularity_fit};

fn runtime(e: trkal::Error) -> CliError {
    CliError::runtime(e.to_string())
}

pub struct Outcome {
    pub exit_code: i32,
}

pub fn run(subcommand: &str, loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<Outcome> {
    let mut warnings = loaded.warnings.clone();
    let exit_code = match subcommand {
        "triplet" => run_triplet(loaded, out)?,
        "trace" => run_trace(loaded, out)?,
        "topology" => run_topology(loaded, out)?,
        "phase" => run_phase(loaded, out)?,
        "latetime" => run_latetime(loaded, out)?,
        "vorticity" => run_vorticity(loaded, out, &mut warnings)?,
        "validate" => run_validate(loaded, out)?,
        other => return Err(CliError::validation(format!("unknown subcommand {other:?}"))),
    };
    let names = out.artifact_names();
    let m = manifest(
        &loaded.scenario.name,
        subcommand,
        &loaded.document,
        loaded.scenario.seed,
        &names,
        &warnings,
    );
    out.write_json("manifest.json", &m)?;
    out.commit();
    Ok(Outcome { exit_code })
}

fn require<'a, T>(block: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    block
        .as_ref()
        .ok_or_else(|| CliError::validation(format!("scenario has no {name:?} block")))
}

fn run_triplet(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.triplet, "triplet")?;
    let delta_sin = spec.delta_sin;
    let base = spec.delta;
    let delta = move |t: f64| {
        base + delta_sin
            .map(|(a, w, p)| a * (w * t + p).sin())
            .unwrap_or(0.0)
    };
    let s0 = TripletState::new(
        spec.gamma0,
        spec.gamma1,
        delta(0.0),
        loaded.energy.a(),
        loaded.scenario.reynolds,
    );
    let mut csv = String::from("t,gamma0,gamma1,delta,amplitude\n");
    for i in 0..=spec.samples {
        let t = spec.t_end * i as f64 / spec.samples as f64;
        let s = triplet_evolve(&s0, delta, t, spec.tol).map_err(runtime)?;
        writeln!(
            csv,
            "{},{},{},{},{}",
            t,
            s.gamma0,
            s.gamma1,
            s.delta,
            s.amplitude()
        )
        .unwrap();
    }
    out.write_file("triplet.csv", csv.as_bytes())?;
    Ok(0)
}

fn run_trace(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.trace, "trace")?;
    let e = &loaded.energy;
    let opts = TraceOptions {
        tau_max: spec.tau_max,
        tol: spec.tol,
        stop_radius: spec.stop_radius,
        max_step: spec.max_step,
        ..TraceOptions::default()
    };
    let mut files = Vec::new();
    for (i, &start) in spec.starts.iter().enumerate() {
        let traj = match spec.mode.as_str() {
            "ascend" => trace_gradient_line(e, start, Direction::Ascend, &opts),
            "descend" => trace_gradient_line(e, start, Direction::Descend, &opts),
            "streamline" => {
                let wbar = quasi_stationary_angle(e, start.0, start.1, opts.grad_floor)
                    .map_err(runtime)?;
                integrate_streamline_with(
                    e,
                    &ZeroPhase,
                    (start.0, start.1, wbar),
                    spec.tau_max,
                    spec.tol,
                    spec.max_step,
                )
            }
            _ => unreachable!("validated"),
        }
        .map_err(runtime)?;
        let mut buf = Vec::new();
        traj.write_csv(&mut buf)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        let name = format!("trace_{i:03}.csv");
        out.write_file(&name, &buf)?;
        files.push(name);
    }
    let script = gnuplot_script(&loaded.scenario.name, &[], &files);
    out.write_file("trace.gp", script.as_bytes())?;
    Ok(0)
}

fn run_topology(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.topology, "topology")?;
    let e = &loaded.energy;
    let set = find_critical_points(e, spec.scan_n, spec.newton_tol).map_err(runtime)?;
    let mut buf = Vec::new();
    set.write_csv(&mut buf)
        .map_err(|e| CliError::runtime(e.to_string()))?;
    out.write_file("critical_points.csv", &buf)?;

    let opts = TraceOptions {
        tol: spec.tol,
        stop_radius: spec.stop_radius,
        ..TraceOptions::default()
    };
    let mut separatrices = Vec::new();
    for (sid, _) in set.saddles() {
        separatrices
            .extend(trace_separatrices(e, &set, sid, spec.seed_offset, &opts).map_err(runtime)?);
    }
    let mut line_files = Vec::new();
    for (i, sep) in separatrices.iter().enumerate() {
        let mut buf = Vec::new();
        sep.path
            .write_csv(&mut buf)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        let name = format!("separatrix_{i:03}.csv");
        out.write_file(&name, &buf)?;
        line_files.push(name);
    }

    let partition = partition_polygons(&set, &separatrices).map_err(runtime)?;
    let mut doc = partition.to_json();
    doc["euler_count"] = json!(euler_check(&set).map_err(runtime)?);
    out.write_json("partition.json", &doc)?;

    let script = gnuplot_script(
        &loaded.scenario.name,
        &["critical_points.csv".to_string()],
        &line_files,
    );
    out.write_file("topology.gp", script.as_bytes())?;
    Ok(0)
}

fn solve_phase_block(loaded: &LoadedScenario) -> CliResult<trkal::phase::PhaseRun> {
    let spec = require(&loaded.scenario.phase, "phase")?;
    let (phi0, _) = poly_from_terms(&spec.phi_init);
    let (dphi0, _) = poly_from_terms(&spec.dphi_init);
    phase_cauchy_solve(
        &loaded.energy,
        &phi0,
        &dphi0,
        spec.tau_end,
        spec.cutoff,
        spec.dt,
    )
    .map_err(runtime)
}

fn run_phase(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.phase, "phase")?;
    let run = solve_phase_block(loaded)?;
    for (i, state) in run.states.iter().enumerate() {
        if i % spec.snapshot_stride != 0 && i + 1 != run.states.len() {
            continue;
        }
        let mut buf = Vec::new();
        state
            .write_spectrum_csv(&mut buf)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        out.write_file(&format!("phase_{i:05}.csv", i = i), &buf)?;
    }
    let mut doc = run.manifest(&loaded.energy);
    if spec.report_cutoff_sensitivity {
        let (phi0, _) = poly_from_terms(&spec.phi_init);
        let (dphi0, _) = poly_from_terms(&spec.dphi_init);
        let s = trkal::phase::cutoff_sensitivity(
            &loaded.energy,
            &phi0,
            &dphi0,
            spec.tau_end,
            spec.cutoff,
            spec.dt,
        )
        .map_err(runtime)?;
        doc["cutoff_sensitivity"] = json!({
            "cutoff": s.cutoff,
            "relative_difference_vs_doubled": s.relative_difference,
        });
    }
    out.write_json("phase_run.json", &doc)?;
    Ok(0)
}

fn run_latetime(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.latetime, "latetime")?;
    let (delta0, _) = poly_from_terms(&spec.delta_init);
    let decayed = late_time_decay(&delta0, spec.tau1);
    let mut csv = String::from("m,n,re_in,im_in,re_out,im_out,ratio\n");
    for (&(m, n), c_in) in delta0.iter() {
        let c_out = decayed.coeff(m, n);
        let ratio = if c_in.norm() > 0.0 {
            c_out.norm() / c_in.norm()
        } else {
            0.0
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            m, n, c_in.re, c_in.im, c_out.re, c_out.im, ratio
        )
        .unwrap();
    }
    out.write_file("latetime.csv", csv.as_bytes())?;
    Ok(0)
}

fn run_vorticity(
    loaded: &LoadedScenario,
    out: &mut OutputDir,
    warnings: &mut Vec<String>,
) -> CliResult<i32> {
    let spec = require(&loaded.scenario.vorticity, "vorticity")?;
    let e = &loaded.energy;
    let set: CriticalSet = find_critical_points(e, spec.scan_n, spec.newton_tol).map_err(runtime)?;
    let mut fits = Vec::new();
    for (i, p) in set.points.iter().enumerate() {
        match vertical_singularity_fit(e, p, spec.r_min, spec.r_max, spec.n_r, spec.n_phi) {
            Ok(fit) => {
                let mut buf = Vec::new();
                fit.write_ring_csv(&mut buf)
                    .map_err(|e| CliError::runtime(e.to_string()))?;
                out.write_file(&format!("vorticity_rings_{i:02}.csv"), &buf)?;
                fits.push(fit.to_json());
            }
            Err(trkal::Error::AnnulusContaminated { .. }) => {
                warnings.push(format!(
                    "point {i} at ({}, {}): annulus contaminated, fit skipped",
                    p.xi, p.eta
                ));
            }
            Err(other) => return Err(runtime(other)),
        }
    }
    let mut doc = json!({ "fits": fits });

    if let Some(c) = &spec.collinearity {
        let run = solve_phase_block(loaded)?;
        let frame = ScalingFrame::new(loaded.scenario.reynolds).map_err(runtime)?;
        let report =
            collinearity_defect(e, run.last(), &frame, c.n_xy, c.n_z).map_err(runtime)?;
        doc["collinearity"] = json!({
            "eps": report.eps,
            "max_defect": report.max_defect(),
            "worst_relative_deviation": report.worst_relative_deviation(0.3),
        });
    }
    out.write_json("vorticity.json", &doc)?;
    Ok(0)
}

fn run_validate(loaded: &LoadedScenario, out: &mut OutputDir) -> CliResult<i32> {
    let spec = require(&loaded.scenario.validate, "validate")?;
    let mut cases = Vec::new();
    let mut all_ok = true;

    for case in &spec.cases {
        let result = match case.as_str() {
            "trkal" => case_trkal(spec.n, spec.reynolds),
            "triplet" => case_triplet(spec.n, spec.reynolds),
            "modes" => case_modes(),
            "random" => case_random(spec.n, spec.reynolds, loaded.scenario.seed),
            "residual_scaling" => case_residual_scaling(spec.k_fast),
            _ => unreachable!("validated"),
        };
        match result {
            Ok((ok, detail)) => {
                all_ok &= ok;
                cases.push(json!({"case": case, "pass": ok, "detail": detail}));
            }
            Err(e) => return Err(e),
        }
    }
    out.write_json(
        "validate.json",
        &json!({"cases": cases, "all_pass": all_ok}),
    )?;
    Ok(if all_ok { 0 } else { 3 })
}

type CaseResult = CliResult<(bool, serde_json::Value)>;

/// Trkal decay: relative energy error against `e^{-2t/R}` over `[0, R/10]`.
fn case_trkal(n: usize, r: f64) -> CaseResult {
    let mut s = SpectralField3D::from_beltrami_mode(n, r, 1, 1.0).map_err(runtime)?;
    let e0 = s.energy();
    let mut worst: f64 = 0.0;
    let dt = 0.05f64;
    while s.time() < r / 10.0 - 1e-12 {
        s = dns_step(&s, dt.min(r / 10.0 - s.time())).map_err(runtime)?;
        let expected = e0 * (-2.0 * s.time() / r).exp();
        worst = worst.max(((s.energy() - expected) / expected).abs());
    }
    Ok((
        worst < 1e-8,
        json!({"relative_energy_error": worst, "tolerance": 1e-8}),
    ))
}

/// Constant-coefficient triplet against the closed form, pointwise.
fn case_triplet(n: usize, r: f64) -> CaseResult {
    let (g0, g1, delta) = (0.8, 0.3, 0.3);
    let s0 = SpectralField3D::from_triplet(n, r, 1, g0, g1, delta).map_err(runtime)?;
    let state0 = TripletState::new(g0, g1, delta, 1.0, r);
    let reference = move |_x: f64, _y: f64, z: f64, t: f64| {
        let s = triplet_evolve(&state0, |_| delta, t, 1e-13).expect("closed form");
        trkal::triplet::triplet_velocity(&s, z)
    };
    let samples = [r / 20.0, r / 10.0];
    let errors = compare_short_time(&s0, reference, &samples, 0.4).map_err(runtime)?;
    let worst = errors.iter().fold(0.0f64, |a, (_, e)| a.max(*e));
    Ok((
        worst < 1e-6,
        json!({"pointwise_error": worst, "tolerance": 1e-6}),
    ))
}

/// The nine closed-form cross products against numeric cross products.
fn case_modes() -> CaseResult {
    let zhat = Vec3::new(0.0, 0.0, 1.0);
    let mut worst: f64 = 0.0;
    for (m, n) in [(1, 1), (2, 1), (1, -1)] {
        for i in 0..256 {
            let z = std::f64::consts::TAU * i as f64 / 256.0;
            for a in [BeltramiMode::e(m), BeltramiMode::h(m)] {
                for b in [BeltramiMode::e(n), BeltramiMode::h(n)] {
                    worst = worst.max(mode_cross(a, b, z).sub(a.eval(z).cross(b.eval(z))).norm());
                }
                worst = worst.max(
                    trkal::modes::mode_cross_vertical(a, z)
                        .sub(a.eval(z).cross(zhat))
                        .norm(),
                );
            }
        }
    }
    Ok((worst < 1e-12, json!({"identity_defect": worst, "tolerance": 1e-12})))
}

/// Sanity: a random solenoidal field is *not* a solution (residual O(1)).
fn case_random(n: usize, r: f64, seed: u64) -> CaseResult {
    let field = trkal::dns::random_solenoidal(n, r, seed.max(1), 1.0).map_err(runtime)?;
    let real = field.to_real();
    let grid = SpectralField3D::from_callback(n, r, 0.0, |_, _, _| Vec3::ZERO).map_err(runtime)?;
    let nn = n as f64;
    let res = grid
        .residual_of(|x, y, z| {
            let i = ((x / std::f64::consts::TAU * nn).round() as usize) % n;
            let j = ((y / std::f64::consts::TAU * nn).round() as usize) % n;
            let k = ((z / std::f64::consts::TAU * nn).round() as usize) % n;
            (
                Vec3::new(real[0][(i, j, k)], real[1][(i, j, k)], real[2][(i, j, k)]),
                Vec3::ZERO,
            )
        })
        .map_err(runtime)?;
    Ok((res > 0.05, json!({"residual": res, "expected": "O(1)"})))
}

/// O(ε²) residual contract of the composed field between k_fast and 2·k_fast.
fn case_residual_scaling(k_fast: usize) -> CaseResult {
    use trkal::dns::BoxComposition;
    use trkal::EnergyDensity;
    use trkal::TrigPoly2D;
    let residual_at = |kf: usize| -> CliResult<f64> {
        let n = (8 * kf).max(32);
        let g0 = TrigPoly2D::harmonic(1, 0, 0.1, 0.0);
        let g1 = TrigPoly2D::harmonic(0, 1, 0.0, 0.08);
        let e = EnergyDensity::new(1.0, 1.0, g0, g1.clone()).map_err(runtime)?;
        let run = phase_cauchy_solve(&e, &g1, &TrigPoly2D::zero(), 0.0, 4, 0.01).map_err(runtime)?;
        let comp = BoxComposition::new(e, run, kf);
        let grid = SpectralField3D::from_callback(n, comp.r_box, 0.0, |_, _, _| Vec3::ZERO)
            .map_err(runtime)?;
        grid.residual_of(|x, y, z| (comp.velocity(x, y, z, 0.0), comp.velocity_dot(x, y, z, 0.0)))
            .map_err(runtime)
    };
    let r1 = residual_at(k_fast)?;
    let r2 = residual_at(2 * k_fast)?;
    let ratio = r1 / r2;
    Ok((
        (3.0..5.6).contains(&ratio),
        json!({"residual_low": r1, "residual_high": r2, "ratio": ratio, "expected": 4.0}),
    ))
}
