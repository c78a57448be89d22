//! Acceptance suite. Each check prints one PASS/FAIL line with the measured
//! figures; the process exits non-zero if any check fails.
//!
//! Run with `cargo test -p snyder-validation --test acceptance`.

use std::ffi::OsString;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use snyder_cli::app::run_from;
use snyder_core::classical::{
    action_integral, closed_form_trajectory, effective_period, integrate_trajectory,
    measured_period, vector_field,
};
use snyder_core::fock::{
    build_hamiltonian_normal_ordered, build_hamiltonian_paper, build_hamiltonian_tilde,
    build_hamiltonian_tilde_rebased, build_hamiltonian_tilde_regrouped, diagonalize,
    renormalized_params, FockMatrix,
};
use snyder_core::grid::{build_grid_hamiltonian, convergence_study, refinement_ladder, richardson};
use snyder_core::harmonics::{extract_harmonics, reference_trajectory};
use snyder_core::{Component, GridSpec, GridVariant, PhaseState, SnyderParams};

type Check = Result<Outcome, String>;
type NamedCheck = (&'static str, fn() -> Check);

struct Outcome {
    pass: bool,
    detail: String,
    /// Extra lines printed under the verdict.
    table: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            table: Vec::new(),
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn classical(lw: f64) -> Result<SnyderParams, String> {
    SnyderParams::classical(lw, 1.0).map_err(err)
}

fn quantum(l: f64) -> Result<SnyderParams, String> {
    SnyderParams::new(l, 1.0, 1.0).map_err(err)
}

fn orbit_conservation() -> Check {
    let mut worst_drift = 0.0f64;
    let mut slowest = Duration::ZERO;
    for lw in [0.0, 0.1, 0.5, 0.9] {
        let p = classical(lw)?;
        let period = effective_period(&p).map_err(err)?;
        let start = Instant::now();
        let traj = integrate_trajectory(
            &p,
            PhaseState::unit_amplitude(),
            100.0 * period,
            period / 1000.0,
        )
        .map_err(err)?;
        slowest = slowest.max(start.elapsed());
        worst_drift = worst_drift.max(traj.max_drift());
    }
    Ok(Outcome::new(
        worst_drift <= 1e-9 && slowest < Duration::from_secs(1),
        format!(
            "max |Δ(p²+ω²q²)| = {worst_drift:.2e} (limit 1e-9), slowest case {:.3} s (limit 1 s)",
            slowest.as_secs_f64()
        ),
    ))
}

fn closed_form_agreement() -> Check {
    let mut worst = 0.0f64;
    let mut worst_jump_ratio = 0.0f64;
    let mut slowest = Duration::ZERO;
    for lw in [0.1, 0.5] {
        let p = classical(lw)?;
        let period = effective_period(&p).map_err(err)?;
        let (t_end, dt) = (10.0 * period, period / 1000.0);
        let start = Instant::now();
        let exact = closed_form_trajectory(&p, t_end, dt).map_err(err)?;
        let rk4 = integrate_trajectory(&p, PhaseState::unit_amplitude(), t_end, dt).map_err(err)?;
        slowest = slowest.max(start.elapsed());
        for (a, b) in exact.samples().iter().zip(rk4.samples()) {
            worst = worst.max((a.q - b.q).abs()).max((a.p - b.p).abs());
        }
        for pair in exact.samples().windows(2) {
            let (dq0, dp0) = vector_field(&p, &pair[0]);
            let (dq1, dp1) = vector_field(&p, &pair[1]);
            let q_allow = 3.0 * dq0.abs().max(dq1.abs()) * dt;
            let p_allow = 3.0 * dp0.abs().max(dp1.abs()) * dt;
            worst_jump_ratio = worst_jump_ratio
                .max((pair[1].q - pair[0].q).abs() / q_allow)
                .max((pair[1].p - pair[0].p).abs() / p_allow);
        }
    }
    Ok(Outcome::new(
        worst <= 1e-6 && worst_jump_ratio <= 1.0 && slowest < Duration::from_secs(1),
        format!(
            "max |Δq|,|Δp| = {worst:.2e} (limit 1e-6), largest step / (3·slope·dt) = {worst_jump_ratio:.3} (limit 1), slowest {:.3} s",
            slowest.as_secs_f64()
        ),
    ))
}

fn effective_period_check() -> Check {
    let mut worst = 0.0f64;
    for lw in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let p = classical(lw)?;
        let predicted = 2.0 * std::f64::consts::PI / (1.0 - lw * lw).sqrt();
        let traj = integrate_trajectory(
            &p,
            PhaseState::unit_amplitude(),
            3.0 * predicted,
            predicted / 1000.0,
        )
        .map_err(err)?;
        let measured = measured_period(&traj).map_err(err)?;
        worst = worst.max((measured - predicted).abs() / predicted);
    }
    let approach = [0.9, 0.99, 0.999, 0.9999];
    let mut periods = Vec::new();
    for lw in approach {
        let p = classical(lw)?;
        let t = effective_period(&p).map_err(err)?;
        // the stall near q = 0 narrows like √(1 − l²ω²)
        let steps = (1000.0 / (1.0 - lw * lw).sqrt()).ceil();
        let traj = integrate_trajectory(&p, PhaseState::unit_amplitude(), 2.0 * t, t / steps)
            .map_err(err)?;
        periods.push(measured_period(&traj).map_err(err)?);
    }
    let monotone = periods.windows(2).all(|w| w[1] > w[0]);
    let growth = periods[periods.len() - 1] / (2.0 * std::f64::consts::PI);
    Ok(Outcome::new(
        worst <= 1e-6 && monotone && growth > 50.0,
        format!(
            "max relative period error {worst:.2e} for lω ≤ 0.9 (limit 1e-6); measured T/T₀ at lω = 0.9…0.9999: {}",
            periods
                .iter()
                .map(|t| format!("{:.2}", t / (2.0 * std::f64::consts::PI)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

fn action_invariance() -> Check {
    let mut worst = 0.0f64;
    for lw in [0.0, 0.5] {
        let p = classical(lw)?;
        let period = effective_period(&p).map_err(err)?;
        let traj = integrate_trajectory(
            &p,
            PhaseState::unit_amplitude(),
            2.0 * period,
            period / 4000.0,
        )
        .map_err(err)?;
        let action = action_integral(&traj).map_err(err)?;
        let ellipse = std::f64::consts::PI * p.omega();
        worst = worst.max((action.abs() - ellipse).abs() / ellipse);
    }
    Ok(Outcome::new(
        worst <= 1e-4,
        format!("max relative |∮p dq − πω| = {worst:.2e} (limit 1e-4)"),
    ))
}

fn third_to_first(lw: f64) -> Result<f64, String> {
    let p = classical(lw)?;
    let traj = reference_trajectory(&p, 8, 1024).map_err(err)?;
    let spectrum = extract_harmonics(&traj, Component::Q, 5).map_err(err)?;
    Ok(spectrum.cos_coeffs[3] / spectrum.cos_coeffs[1])
}

fn third_harmonic() -> Check {
    let start = Instant::now();
    let eps = 0.01;
    let ratio = third_to_first(0.1)?;
    let halved = third_to_first(0.05)?;
    let elapsed = start.elapsed();
    let predicted = eps / 12.0;
    let off = (ratio / predicted - 1.0).abs();
    let scaling = ratio / halved;
    let scaling_off = (scaling / 4.0 - 1.0).abs();
    Ok(Outcome::new(
        off <= 0.10 && scaling_off <= 0.05 && elapsed < Duration::from_secs(2),
        format!(
            "c₃/c₁ = {ratio:.4e} vs l²ω²/12 = {predicted:.4e}: off by {:.1}% (limit 10%); \
             ratio(l)/ratio(l/2) = {scaling:.4} (4 within {:.2}%, limit 5%); {:.3} s",
            100.0 * off,
            100.0 * scaling_off,
            elapsed.as_secs_f64()
        ),
    ))
}

/// Exact if no entry at an odd offset is nonzero and nothing beyond ±2 is.
fn parity_banded(m: &FockMatrix) -> bool {
    let n = m.dim();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let offset = i.abs_diff(j);
            offset == 0 || offset == 2 || m.entry(i, j) == 0.0
        })
    })
}

fn fock_fidelity() -> Check {
    let dim = 24;
    let mut literal = true;
    let mut banded = true;
    for (l, w) in [(0.0, 1.0), (0.3, 1.7), (1.0, 1.0), (2.5, 0.4)] {
        let p = SnyderParams::new(l, w, 1.0).map_err(err)?;
        let h = build_hamiltonian_paper(&p, dim).map_err(err)?;
        let l2 = l * l;
        for n in 0..dim {
            let nf = n as f64;
            let diagonal = w * (nf * (1.0 - l2 / (1.0 + l2)) + 0.5 * (1.0 + l2 / (1.0 + l2)));
            literal &= h.entry(n, n) == diagonal;
            if n + 2 < dim {
                let coupling =
                    w * (l2 / (2.0 * (1.0 + l2))) * (nf + 1.0).sqrt() * (nf + 2.0).sqrt();
                literal &= h.entry(n, n + 2) == coupling && h.entry(n + 2, n) == coupling;
            }
        }
        banded &= parity_banded(&h);
    }
    let unit = build_hamiltonian_paper(&SnyderParams::new(1.0, 1.0, 1.0).map_err(err)?, dim)
        .map_err(err)?;
    literal &= unit.entry(0, 0) == 0.75;

    let mut undeformed_err = 0.0f64;
    for w in [0.5, 1.0, 3.0] {
        let h =
            build_hamiltonian_normal_ordered(&SnyderParams::new(0.0, w, 1.0).map_err(err)?, dim)
                .map_err(err)?;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { w * (i as f64 + 0.5) } else { 0.0 };
                undeformed_err = undeformed_err.max((h.entry(i, j) - expected).abs());
            }
        }
    }
    for (l, w, m) in [(0.2, 1.0, 1.0), (0.7, 2.0, 0.5)] {
        let h = build_hamiltonian_normal_ordered(&SnyderParams::new(l, w, m).map_err(err)?, dim)
            .map_err(err)?;
        banded &= parity_banded(&h);
    }
    Ok(Outcome::new(
        literal && undeformed_err <= 1e-14 && banded,
        format!(
            "printed coefficients reproduced exactly: {literal}; normal-ordered at l = 0 max |H − diag(ω(n+½))| = {undeformed_err:.1e} (limit 1e-14); \
             offsets ±1 exactly zero in both: {banded}"
        ),
    ))
}

fn renormalization() -> Check {
    let dim = 32;
    let mut identity = 0.0f64;
    let mut assembly = 0.0f64;
    let mut diagonal = 0.0f64;
    for (l, w, m) in [
        (0.0, 1.0, 1.0),
        (0.1, 1.0, 1.0),
        (0.5, 2.0, 0.7),
        (1.3, 0.6, 2.0),
    ] {
        let p = SnyderParams::new(l, w, m).map_err(err)?;
        let (m_t, w_t) = renormalized_params(&p);
        identity = identity.max((m_t * w_t * w_t - m * w * w).abs() / (m * w * w));
        let a = build_hamiltonian_tilde(&p, dim).map_err(err)?;
        let b = build_hamiltonian_tilde_regrouped(&p, dim).map_err(err)?;
        assembly = assembly.max((&a.entries - &b.entries).amax());
        let c = build_hamiltonian_tilde_rebased(&p, dim).map_err(err)?;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { w_t * (i as f64 + 0.5) } else { 0.0 };
                diagonal = diagonal.max((c.entry(i, j) - expected).abs());
            }
        }
    }
    Ok(Outcome::new(
        identity <= 1e-14 && assembly <= 1e-12 && diagonal <= 1e-12,
        format!(
            "|m̃ω̃² − mω²|/mω² = {identity:.1e} (limit 1e-14); counter-term vs regrouped max entry difference {assembly:.1e} (limit 1e-12); \
             rebased basis max |H − diag(ω̃(n+½))| = {diagonal:.1e} (limit 1e-12)"
        ),
    ))
}

fn grid_soundness() -> Check {
    let p0 = quantum(0.0)?;
    let spec = GridSpec::new(5.25, 4001, GridVariant::PlainH).map_err(err)?;
    let levels = build_grid_hamiltonian(&p0, &spec)
        .and_then(|op| op.lowest_levels(6))
        .map_err(err)?;
    let worst = levels
        .iter()
        .enumerate()
        .map(|(n, e)| (e - (n as f64 + 0.5)).abs())
        .fold(0.0, f64::max);

    let mut orders = Vec::new();
    let base_free = GridSpec::new(8.0, 1001, GridVariant::PlainH).map_err(err)?;
    let study = convergence_study(&p0, &refinement_ladder(base_free, 3), 6).map_err(err)?;
    orders.extend(study.orders);
    let p = quantum(0.3)?;
    let base = GridSpec::new(12.5 / 0.3, 4001, GridVariant::TildeH).map_err(err)?;
    let study = convergence_study(&p, &refinement_ladder(base, 3), 6).map_err(err)?;
    orders.extend(study.orders);
    let (lo, hi) = orders
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| {
            (lo.min(*o), hi.max(*o))
        });
    Ok(Outcome::new(
        worst <= 1e-5 && orders.iter().all(|o| (o - 2.0).abs() <= 0.2),
        format!(
            "l = 0, 4001 points: max |E_n − ω(n+½)| = {worst:.2e} for n ≤ 5 (limit 1e-5); observed orders in [{lo:.3}, {hi:.3}] (limit 2 ± 0.2)"
        ),
    ))
}

/// Richardson-extrapolated lowest `k` grid levels at spacing `h` and `h/2`.
fn extrapolated_grid_levels(
    p: &SnyderParams,
    variant: GridVariant,
    k: usize,
) -> Result<Vec<f64>, String> {
    let spec = GridSpec::with_step(12.5 / p.l(), 0.02, variant).map_err(err)?;
    let coarse = build_grid_hamiltonian(p, &spec)
        .and_then(|op| op.lowest_levels(k))
        .map_err(err)?;
    let fine = build_grid_hamiltonian(p, &spec.refined())
        .and_then(|op| op.lowest_levels(k))
        .map_err(err)?;
    Ok(richardson(&coarse, &fine))
}

fn cross_backend() -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    for kappa in [1e-5, 1e-4, 1e-3] {
        let p = quantum(f64::sqrt(kappa))?;
        let grid = extrapolated_grid_levels(&p, GridVariant::PlainH, 5)?;
        let fock = build_hamiltonian_normal_ordered(&p, 64)
            .and_then(|h| diagonalize(&h, 5))
            .map_err(err)?;
        let worst = grid
            .iter()
            .zip(&fock.eigenvalues)
            .map(|(g, f)| (g - f).abs() / f.abs())
            .fold(0.0, f64::max);
        pass &= worst <= 1e-4;
        parts.push(format!("l²mω = {kappa:.0e}: {worst:.2e}"));
    }
    Ok(Outcome::new(
        pass,
        format!(
            "max relative grid vs normal-ordered difference, lowest 5 levels (limit 1e-4): {}",
            parts.join("; ")
        ),
    ))
}

fn renormalized_spectrum_deviation() -> Check {
    let kappas: [f64; 3] = [1e-4, 1e-3, 1e-2];
    let levels = 6;
    let mut table = vec![format!(
        "{:>8} {:>10} {:>10} {:>10}",
        "n", "1e-4", "1e-3", "1e-2"
    )];
    let mut dev = vec![vec![0.0; kappas.len()]; levels];
    for (j, kappa) in kappas.iter().enumerate() {
        let p = quantum(kappa.sqrt())?;
        let (_, w_t) = renormalized_params(&p);
        let grid = extrapolated_grid_levels(&p, GridVariant::TildeH, levels)?;
        for n in 0..levels {
            dev[n][j] = (grid[n] - w_t * (n as f64 + 0.5)).abs();
        }
    }
    let mut min_slope = f64::INFINITY;
    let mut shrinking = true;
    for (n, row) in dev.iter().enumerate() {
        table.push(format!(
            "{n:>8} {:>10.3e} {:>10.3e} {:>10.3e}",
            row[0], row[1], row[2]
        ));
        for j in 0..kappas.len() - 1 {
            shrinking &= row[j] < row[j + 1];
            let l_ratio = (kappas[j + 1] / kappas[j]).sqrt();
            min_slope = min_slope.min((row[j + 1] / row[j]).ln() / l_ratio.ln());
        }
    }
    let mut outcome = Outcome::new(
        shrinking && min_slope >= 1.8,
        format!(
            "|E_n(grid, counter-term) − ω̃(n+½)| for n ≤ 5 shrinks as l → 0: {shrinking}; smallest log-log slope in l = {min_slope:.3} (O(l²) needs ≥ 1.8)"
        ),
    );
    outcome.table = table;
    Ok(outcome)
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(err)? {
        let path = entry.map_err(err)?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        files.push((name, std::fs::read(&path).map_err(err)?));
    }
    files.sort();
    Ok(files)
}

fn determinism() -> Check {
    let tmp = tempfile::TempDir::new().map_err(err)?;
    let config = tmp.path().join("run.toml");
    std::fs::write(
        &config,
        "[params]\nl = 0.2\nomega = 1.5\nmass = 1.0\n\n\
         [simulate]\nperiods = 3\nplot_script = true\n\n\
         [fourier]\nperiods = 6\nharmonics = 7\n\n\
         [fock]\ndim = 48\nbackend = \"paper\"\ndump_matrix = true\n\n\
         [grid]\npoints = 4001\nvariant = \"tilde\"\n\n\
         [sweep]\nworkflow = \"fourier\"\nl = [0.0, 0.1, 0.2, 0.3]\nomega = [1.0, 2.0, 4.0]\n",
    )
    .map_err(err)?;
    let commands = ["simulate", "fourier", "fock", "grid", "sweep"];
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for command in commands {
        let mut runs = Vec::new();
        for run in ["first", "second"] {
            let dir = tmp.path().join(format!("{command}-{run}"));
            let args = [
                OsString::from("snyder"),
                command.into(),
                "--config".into(),
                config.clone().into(),
                "--output".into(),
                dir.clone().into(),
            ];
            run_from(args, &mut Vec::new())
                .map_err(|e| format!("`snyder {command}` failed: {e}"))?;
            runs.push(snapshot(&dir)?);
        }
        compared += runs[0].len();
        if runs[0] != runs[1] {
            mismatched.push(command);
        }
    }
    Ok(Outcome::new(
        mismatched.is_empty() && compared > 0,
        format!(
            "{compared} output files from {} subcommands compared across two runs; differing: {}",
            commands.len(),
            if mismatched.is_empty() {
                "none".to_string()
            } else {
                mismatched.join(", ")
            }
        ),
    ))
}

fn main() -> ExitCode {
    let checks: [NamedCheck; 11] = [
        ("orbit-conservation", orbit_conservation),
        ("closed-form-vs-integrator", closed_form_agreement),
        ("effective-period", effective_period_check),
        ("action-invariance", action_invariance),
        ("third-harmonic", third_harmonic),
        ("fock-matrix-fidelity", fock_fidelity),
        ("renormalization-identities", renormalization),
        ("grid-oracle-soundness", grid_soundness),
        ("cross-backend-consistency", cross_backend),
        (
            "renormalized-spectrum-deviation",
            renormalized_spectrum_deviation,
        ),
        ("cli-determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| Err("check panicked".into()))
            .unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name}: {}", outcome.detail);
        for line in &outcome.table {
            println!("     {line}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
