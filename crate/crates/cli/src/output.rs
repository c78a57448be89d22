//! Artifacts written by each subcommand.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use snyder_core::io::{
    fmt_f64, write_comparison, write_eigen_spectrum, write_harmonic_spectrum, write_matrix,
    write_table, write_trajectory,
};
use snyder_core::{FockMatrix, SnyderParams, Trajectory};

use crate::error::CliResult;
use crate::workflows::{FockOutcome, FourierOutcome, GridOutcome, SimulateOutcome};

pub const TRAJECTORY_INTEGRATED: &str = "trajectory_integrated.csv";
pub const TRAJECTORY_CLOSED_FORM: &str = "trajectory_closed_form.csv";
pub const PLOT_Q: &str = "plot_q.csv";
pub const PLOT_P: &str = "plot_p.csv";
pub const PLOT_SCRIPT: &str = "plot.gp";
pub const HARMONICS: &str = "harmonics.csv";
pub const COMPARISON: &str = "comparison.csv";
pub const FOCK_SPECTRUM: &str = "fock_spectrum.csv";
pub const FOCK_REPORT: &str = "fock_report.csv";
pub const FOCK_MATRIX: &str = "fock_matrix.csv";
pub const GRID_SPECTRUM: &str = "grid_spectrum.csv";
pub const GRID_DEVIATION: &str = "grid_deviation.csv";
pub const SWEEP: &str = "sweep.csv";

/// Creates `dir` if needed and opens `dir/name` for writing.
pub fn create(dir: &Path, name: &str) -> CliResult<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

pub fn write_simulate(
    dir: &Path,
    params: &SnyderParams,
    out: &SimulateOutcome,
    plot_script: bool,
) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let (path, w) = create(dir, TRAJECTORY_INTEGRATED)?;
    write_trajectory(w, &out.integrated)?;
    written.push(path);
    if let Some(exact) = &out.closed_form {
        let (path, w) = create(dir, TRAJECTORY_CLOSED_FORM)?;
        write_trajectory(w, exact)?;
        written.push(path);
    }
    let snyder = out.closed_form.as_ref().unwrap_or(&out.integrated);
    written.extend(write_plot_data(dir, params, snyder)?);
    if plot_script {
        let (path, mut w) = create(dir, PLOT_SCRIPT)?;
        w.write_all(gnuplot_script().as_bytes())?;
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Two plot files, `t,snyder,undeformed` for `q` and for `p`.
fn write_plot_data(
    dir: &Path,
    params: &SnyderParams,
    traj: &Trajectory,
) -> CliResult<Vec<PathBuf>> {
    let w = params.omega();
    let mut q_rows = Vec::with_capacity(traj.len());
    let mut p_rows = Vec::with_capacity(traj.len());
    for (t, s) in traj.iter() {
        q_rows.push(vec![fmt_f64(t), fmt_f64(s.q), fmt_f64((w * t).cos())]);
        p_rows.push(vec![fmt_f64(t), fmt_f64(s.p), fmt_f64(-w * (w * t).sin())]);
    }
    let header = ["t", "snyder", "undeformed"];
    let (q_path, q_file) = create(dir, PLOT_Q)?;
    write_table(q_file, &header, &q_rows)?;
    let (p_path, p_file) = create(dir, PLOT_P)?;
    write_table(p_file, &header, &p_rows)?;
    Ok(vec![q_path, p_path])
}

fn gnuplot_script() -> String {
    let panel = |file: &str, label: &str| {
        format!(
            "set output '{stem}.png'\n\
             set ylabel '{label}'\n\
             plot '{file}' using 1:2 with lines title 'Snyder', \\\n     \
             '' using 1:3 with lines dashtype 2 title 'undeformed'\n",
            stem = file.trim_end_matches(".csv"),
        )
    };
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,540\n\
         set xlabel 't'\n\
         set key top right\n\
         {}{}",
        panel(PLOT_Q, "q"),
        panel(PLOT_P, "p"),
    )
}

pub fn write_fourier(dir: &Path, out: &FourierOutcome) -> CliResult<Vec<PathBuf>> {
    let (spectrum_path, w) = create(dir, HARMONICS)?;
    write_harmonic_spectrum(w, &out.spectrum)?;
    let (comparison_path, w) = create(dir, COMPARISON)?;
    write_comparison(w, &out.rows)?;
    Ok(vec![spectrum_path, comparison_path])
}

pub fn write_fock(dir: &Path, out: &FockOutcome, dump_matrix: bool) -> CliResult<Vec<PathBuf>> {
    let (spectrum_path, w) = create(dir, FOCK_SPECTRUM)?;
    write_eigen_spectrum(w, &out.spectrum)?;
    let rows: Vec<Vec<String>> = out
        .spectrum
        .eigenvalues
        .iter()
        .zip(&out.paper.eigenvalues)
        .enumerate()
        .map(|(n, (e, r))| vec![n.to_string(), fmt_f64(*e), fmt_f64(*r), fmt_f64(e - r)])
        .collect();
    let (report_path, w) = create(dir, FOCK_REPORT)?;
    write_table(w, &["n", "energy", "paper_spectrum", "deviation"], &rows)?;
    let mut written = vec![spectrum_path, report_path];
    if dump_matrix {
        written.push(write_fock_matrix(dir, &out.matrix)?);
    }
    Ok(written)
}

fn write_fock_matrix(dir: &Path, matrix: &FockMatrix) -> CliResult<PathBuf> {
    let (path, w) = create(dir, FOCK_MATRIX)?;
    write_matrix(w, matrix)?;
    Ok(path)
}

pub fn write_grid(dir: &Path, out: &GridOutcome) -> CliResult<Vec<PathBuf>> {
    let (spectrum_path, w) = create(dir, GRID_SPECTRUM)?;
    write_eigen_spectrum(w, &out.spectrum)?;
    let rows: Vec<Vec<String>> = (0..out.spectrum.len())
        .map(|n| {
            let reference = out.reference[n];
            let dev = out.extrapolated[n] - reference;
            vec![
                n.to_string(),
                fmt_f64(out.spectrum.eigenvalues[n]),
                fmt_f64(out.extrapolated[n]),
                fmt_f64(reference),
                fmt_f64(dev.abs()),
                fmt_f64(dev.abs() / reference),
            ]
        })
        .collect();
    let (deviation_path, w) = create(dir, GRID_DEVIATION)?;
    write_table(
        w,
        &[
            "n",
            "energy",
            "extrapolated",
            "reference",
            "abs_dev",
            "rel_dev",
        ],
        &rows,
    )?;
    Ok(vec![spectrum_path, deviation_path])
}
