//! Cartesian `(l, ω)` sweeps with one long-format output table.
//!
//! Cells run in parallel, each on a single thread. Results are gathered in
//! cell order before anything is written, so the table does not depend on
//! scheduling.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use snyder_core::io::{fmt_f64, write_table};
use snyder_core::SnyderParams;

use crate::error::{CliError, CliResult};
use crate::output::{create, SWEEP};
use crate::workflows::{
    fock, fourier, grid, simulate, FockSettings, FourierSettings, GridSettings, SimulateSettings,
};

pub const SWEEP_HEADER: [&str; 9] = [
    "l", "omega", "mass", "workflow", "quantity", "n", "value", "status", "message",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Workflow {
    Simulate(SimulateSettings),
    Fourier(FourierSettings),
    Fock(FockSettings),
    Grid(GridSettings),
}

impl Workflow {
    pub fn name(&self) -> &'static str {
        match self {
            Workflow::Simulate(s) if s.closed_form => "closed-form",
            Workflow::Simulate(_) => "simulate",
            Workflow::Fourier(_) => "fourier",
            Workflow::Fock(_) => "fock",
            Workflow::Grid(_) => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub workflow: Workflow,
    pub l: Vec<f64>,
    pub omega: Vec<f64>,
    pub mass: f64,
    pub jobs: Option<usize>,
}

/// One named number produced by a cell; `n` indexes levels or harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: &'static str,
    pub n: Option<usize>,
    pub value: f64,
}

impl Quantity {
    fn scalar(name: &'static str, value: f64) -> Self {
        Quantity {
            name,
            n: None,
            value,
        }
    }

    fn indexed(name: &'static str, n: usize, value: f64) -> Self {
        Quantity {
            name,
            n: Some(n),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub l: f64,
    pub omega: f64,
    pub outcome: Result<Vec<Quantity>, snyder_core::Error>,
}

impl SweepPlan {
    pub fn cells(&self) -> CliResult<Vec<(f64, f64)>> {
        if self.l.is_empty() || self.omega.is_empty() {
            return Err(CliError::Usage(
                "sweep needs at least one value of l and of omega".into(),
            ));
        }
        Ok(self
            .l
            .iter()
            .flat_map(|&l| self.omega.iter().map(move |&w| (l, w)))
            .collect())
    }

    pub fn run(&self) -> CliResult<Vec<CellResult>> {
        let cells = self.cells()?;
        let work = || -> Vec<CellResult> {
            cells
                .par_iter()
                .map(|&(l, omega)| CellResult {
                    l,
                    omega,
                    outcome: run_cell(&self.workflow, l, omega, self.mass),
                })
                .collect()
        };
        match self.jobs {
            Some(jobs) => rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))
                .map(|pool| pool.install(work)),
            None => Ok(work()),
        }
    }
}

fn run_cell(
    workflow: &Workflow,
    l: f64,
    omega: f64,
    mass: f64,
) -> Result<Vec<Quantity>, snyder_core::Error> {
    let params = SnyderParams::new(l, omega, mass)?;
    let mut q = Vec::new();
    match workflow {
        Workflow::Simulate(settings) => {
            let out = simulate(&params, settings)?;
            q.push(Quantity::scalar("max_drift", out.max_drift));
            if let Some(t) = out.effective_period {
                q.push(Quantity::scalar("effective_period", t));
            }
            if let Some(t) = out.measured_period {
                q.push(Quantity::scalar("measured_period", t));
            }
            if let Some(d) = out.max_discrepancy {
                q.push(Quantity::scalar("max_discrepancy", d));
            }
        }
        Workflow::Fourier(settings) => {
            let out = fourier(&params, settings)?;
            q.push(Quantity::scalar("fundamental", out.spectrum.fundamental));
            q.push(Quantity::scalar("c1", out.coefficient(1)));
            q.push(Quantity::scalar("c3", out.coefficient(3)));
            q.push(Quantity::scalar("c3_over_c1", out.third_to_first()));
            q.push(Quantity::scalar("residual", out.spectrum.residual));
        }
        Workflow::Fock(settings) => {
            let out = fock(&params, settings)?;
            for (n, (e, r)) in out
                .spectrum
                .eigenvalues
                .iter()
                .zip(&out.paper.eigenvalues)
                .enumerate()
            {
                q.push(Quantity::indexed("energy", n, *e));
                q.push(Quantity::indexed("paper_spectrum", n, *r));
            }
            q.push(Quantity::scalar(
                "backend_difference",
                out.backend_difference,
            ));
        }
        Workflow::Grid(settings) => {
            let out = grid(&params, settings)?;
            let levels = out.spectrum.eigenvalues.iter().zip(&out.extrapolated);
            for (n, ((e, x), d)) in levels.zip(out.deviations()).enumerate() {
                q.push(Quantity::indexed("energy", n, *e));
                q.push(Quantity::indexed("extrapolated", n, *x));
                q.push(Quantity::indexed("deviation", n, d));
            }
            q.push(Quantity::scalar("bound_states", out.bound_states as f64));
        }
    }
    Ok(q)
}

/// Long-format rows: one per quantity, or one tagged row per failed cell.
pub fn table_rows(workflow: &str, mass: f64, results: &[CellResult]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for cell in results {
        let key = [
            cell.l.to_string(),
            cell.omega.to_string(),
            mass.to_string(),
            workflow.to_string(),
        ];
        match &cell.outcome {
            Ok(quantities) => {
                for q in quantities {
                    let mut row = key.to_vec();
                    row.extend([
                        q.name.to_string(),
                        q.n.map(|n| n.to_string()).unwrap_or_default(),
                        fmt_f64(q.value),
                        "ok".to_string(),
                        String::new(),
                    ]);
                    rows.push(row);
                }
            }
            Err(err) => {
                let mut row = key.to_vec();
                row.extend([
                    String::new(),
                    String::new(),
                    String::new(),
                    err.kind().to_string(),
                    err.to_string(),
                ]);
                rows.push(row);
            }
        }
    }
    rows
}

pub fn write_sweep(dir: &Path, plan: &SweepPlan, results: &[CellResult]) -> CliResult<PathBuf> {
    let rows = table_rows(plan.workflow.name(), plan.mass, results);
    let (path, mut w) = create(dir, SWEEP)?;
    write_table(&mut w, &SWEEP_HEADER, &rows)?;
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use snyder_core::Component;

    fn fourier_plan(l: Vec<f64>) -> SweepPlan {
        SweepPlan {
            workflow: Workflow::Fourier(FourierSettings {
                periods: 8,
                harmonics: 5,
                component: Component::Q,
                steps_per_period: 512,
            }),
            l,
            omega: vec![1.0],
            mass: 1.0,
            jobs: Some(2),
        }
    }

    fn ratio(cell: &CellResult) -> f64 {
        cell.outcome
            .as_ref()
            .unwrap()
            .iter()
            .find(|q| q.name == "c3_over_c1")
            .unwrap()
            .value
    }

    #[test]
    fn fourier_ratio_grows_with_l_squared() {
        let results = fourier_plan(vec![0.0, 0.05, 0.1]).run().unwrap();
        let r: Vec<f64> = results.iter().map(ratio).collect();
        assert!(r[0].abs() < 1e-9);
        assert!(r[1] > 0.0 && r[2] > r[1]);
        assert!((r[2] / r[1] - 4.0).abs() < 0.05);
    }

    #[test]
    fn cutoff_cells_are_tagged() {
        let plan = SweepPlan {
            workflow: Workflow::Simulate(SimulateSettings {
                closed_form: true,
                ..SimulateSettings::default()
            }),
            l: vec![0.5, 1.0, 1.5],
            omega: vec![1.0],
            mass: 1.0,
            jobs: None,
        };
        let results = plan.run().unwrap();
        let rows = table_rows(plan.workflow.name(), plan.mass, &results);
        let status: Vec<&str> = rows
            .iter()
            .filter(|r| r[4].is_empty())
            .map(|r| r[7].as_str())
            .collect();
        assert_eq!(status, ["CutoffRegime", "CutoffRegime"]);
        assert!(rows.iter().any(|r| r[0] == "0.5" && r[7] == "ok"));
    }

    #[test]
    fn empty_range_is_a_usage_error() {
        let err = fourier_plan(Vec::new()).run().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn order_is_independent_of_worker_count() {
        let mut plan = fourier_plan(vec![0.3, 0.0, 0.1, 0.2]);
        let serial = {
            plan.jobs = Some(1);
            plan.run().unwrap()
        };
        plan.jobs = Some(4);
        assert_eq!(plan.run().unwrap(), serial);
    }
}
