//! CSV encodings of the crate's results.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` and keeps output byte-stable across runs.

use std::io::{Read, Write};

use crate::classical::{orbit_invariant, PhaseState, Trajectory, TrajectorySource};
use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::harmonics::{ComparisonRow, HarmonicSpectrum};
use crate::params::SnyderParams;
use crate::spectrum::EigenSpectrum;

pub const TRAJECTORY_HEADER: [&str; 4] = ["t", "q", "p", "invariant"];
pub const HARMONIC_HEADER: [&str; 3] = ["k", "cos_coeff", "sin_coeff"];
pub const COMPARISON_HEADER: [&str; 5] = ["k", "measured", "perturbative", "abs_dev", "rel_dev"];
pub const SPECTRUM_HEADER: [&str; 3] = ["n", "energy", "converged"];
pub const GRID_SPECTRUM_HEADER: [&str; 4] = ["n", "energy", "converged", "bound"];
pub const MATRIX_HEADER: [&str; 3] = ["i", "j", "value"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut out = writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    let params = traj.params();
    for (t, s) in traj.iter() {
        out.write_record([
            fmt_f64(t),
            fmt_f64(s.q),
            fmt_f64(s.p),
            fmt_f64(orbit_invariant(&s, params)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `t,q,p,invariant` file back. The invariant column is ignored and
/// recomputed; rows must be uniformly spaced in `t`.
pub fn read_trajectory<R: Read>(
    r: R,
    params: SnyderParams,
    source: TrajectorySource,
) -> Result<Trajectory> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    if headers
        .iter()
        .take(3)
        .ne(TRAJECTORY_HEADER.iter().take(3).copied())
    {
        return Err(Error::Io(format!(
            "expected header starting with t,q,p, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Io(format!("row {}: bad column {i}", line + 1)))
        };
        rows.push((field(0)?, PhaseState::new(field(1)?, field(2)?)));
    }
    Trajectory::from_timed_samples(params, &rows, source)
}

pub fn write_harmonic_spectrum<W: Write>(w: W, spectrum: &HarmonicSpectrum) -> Result<()> {
    let mut out = writer(w);
    out.write_record(HARMONIC_HEADER)?;
    for k in 0..=spectrum.max_harmonic() {
        out.write_record([
            k.to_string(),
            fmt_f64(spectrum.cos_coeffs[k]),
            fmt_f64(spectrum.sin_coeffs[k]),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_comparison<W: Write>(w: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(COMPARISON_HEADER)?;
    for row in rows {
        out.write_record([
            row.k.to_string(),
            fmt_f64(row.measured),
            fmt_f64(row.perturbative),
            fmt_f64(row.abs_dev),
            fmt_f64(row.rel_dev),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `n,energy,converged`, plus a `bound` column when the spectrum carries
/// bound-state flags.
pub fn write_eigen_spectrum<W: Write>(w: W, spectrum: &EigenSpectrum) -> Result<()> {
    let mut out = writer(w);
    match &spectrum.bound {
        Some(_) => out.write_record(GRID_SPECTRUM_HEADER)?,
        None => out.write_record(SPECTRUM_HEADER)?,
    }
    for (n, energy) in spectrum.eigenvalues.iter().enumerate() {
        let mut record = vec![
            n.to_string(),
            fmt_f64(*energy),
            spectrum.converged[n].to_string(),
        ];
        if let Some(bound) = &spectrum.bound {
            record.push(bound[n].to_string());
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// Coordinate list of the nonzero entries.
pub fn write_matrix<W: Write>(w: W, matrix: &FockMatrix) -> Result<()> {
    let mut out = writer(w);
    out.write_record(MATRIX_HEADER)?;
    for (i, j, v) in matrix.nonzeros() {
        out.write_record([i.to_string(), j.to_string(), fmt_f64(v)])?;
    }
    out.flush()?;
    Ok(())
}

/// Generic table writer for report files with caller-defined columns.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{closed_form_trajectory, effective_period};
    use crate::fock::build_hamiltonian_paper;
    use proptest::prelude::*;

    #[test]
    fn trajectory_header_and_precision() {
        let p = SnyderParams::classical(0.2, 1.0).unwrap();
        let period = effective_period(&p).unwrap();
        let traj = closed_form_trajectory(&p, period, period / 100.0).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,q,p,invariant"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0.0000000000000000e0");
        assert_eq!(first[1], "1.0000000000000000e0");
        assert_eq!(first.len(), 4);
        let back = read_trajectory(&buf[..], p, TrajectorySource::ClosedForm).unwrap();
        assert_eq!(back.samples(), traj.samples());
    }

    #[test]
    fn rejects_nonuniform_rows() {
        let p = SnyderParams::classical(0.2, 1.0).unwrap();
        let text = "t,q,p,invariant\n0,1,0,1\n0.1,1,0,1\n0.25,1,0,1\n";
        assert!(matches!(
            read_trajectory(text.as_bytes(), p, TrajectorySource::Integrated),
            Err(Error::NonUniformSampling { .. })
        ));
    }

    #[test]
    fn matrix_dump_lists_nonzeros() {
        let p = SnyderParams::new(0.3, 1.0, 1.0).unwrap();
        let h = build_hamiltonian_paper(&p, 4).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // 4 diagonal + 2·2 off-diagonal entries
        assert_eq!(text.lines().count(), 1 + 8);
        assert!(text.starts_with("i,j,value\n0,0,"));
    }

    proptest! {
        #[test]
        fn float_rendering_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = fmt_f64(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
