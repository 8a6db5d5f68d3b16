//! Writes one CSV per perturbation strength with the exact GUE and GOE
//! curves and their linear-response counterparts, ready for plotting.
//!
//! ```text
//! cargo run --example figure_panels -- results/panels
//! ```
//!
//! Monte Carlo overlays come from the `fidelity` binary with the configs in
//! `configs/`.

use std::path::PathBuf;

use fidelity::linear_response::ResponseForm;
use fidelity::model::{Beta, TimeGrid};
use fidelity::runner::output::{create, records_from_curve, write_csv};
use fidelity::runner::{analytic_curve, lr_curve};

fn main() -> fidelity::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "results/panels".into()));
    let grid = TimeGrid::uniform(0.0, 3.0, 301)?;
    for eps in [0.2, 1.0, 2.0, 4.0, 10.0] {
        let mut rows = Vec::new();
        for beta in [Beta::Orthogonal, Beta::Unitary] {
            rows.extend(records_from_curve(&analytic_curve(beta, eps, &grid)?, "analytic", beta, eps));
            rows.extend(records_from_curve(
                &lr_curve(beta, eps, &grid, ResponseForm::Exponentiated)?,
                "lr_exp",
                beta,
                eps,
            ));
        }
        let path = dir.join(format!("panel_eps_{eps}.csv"));
        write_csv(create(&path)?, &rows)?;
        println!("{}", path.display());
    }
    Ok(())
}
