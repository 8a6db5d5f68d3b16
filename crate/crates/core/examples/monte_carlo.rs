//! Monte Carlo estimate of the fidelity amplitude against the exact GUE
//! curve at a reduced scale.
//!
//! ```text
//! cargo run --release --example monte_carlo -- [beta] [eps] [dim] [outer] [inner]
//! ```

use fidelity::goe::GoeIntegrator;
use fidelity::gue::fidelity_gue;
use fidelity::linear_response::{fidelity_lr, ResponseForm};
use fidelity::model::{Beta, EnsembleSpec, PerturbationSpec, TimeGrid};
use fidelity::sim::{estimate_curve, SimulationConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args().nth(i).and_then(|a| a.parse().ok()).unwrap_or(default)
}

fn main() -> fidelity::Result<()> {
    let beta = Beta::try_from(arg(1, 2u8))?;
    let eps = arg(2, 4.0);
    let dim = arg(3, 120usize);
    let (outer, inner) = (arg(4, 20usize), arg(5, 5usize));

    let cfg = SimulationConfig::new(
        EnsembleSpec::new(beta, dim)?,
        PerturbationSpec::new(eps)?,
        TimeGrid::uniform(0.0, 2.0, 21)?,
    )
    .with_realizations(outer, inner)
    .with_seed(1);
    println!("{} N={dim} eps={eps} phi={:.5} {outer}x{inner} realizations", beta.name(), cfg.phi());

    let curve = estimate_curve(&cfg)?;
    let stderr = curve.stderr.clone().unwrap_or_default();
    let imag = curve.imag_diag.clone().unwrap_or_default();
    println!("{:>5} {:>10} {:>9} {:>9} {:>10}", "tau", "simulated", "stderr", "|imag|", "reference");
    for (i, &tau) in curve.taus.iter().enumerate() {
        let reference = match beta {
            Beta::Orthogonal => GoeIntegrator::default_instance().fidelity(eps, tau)?,
            Beta::Unitary => fidelity_gue(eps, tau)?,
            Beta::Symplectic => fidelity_lr(beta, eps, tau, ResponseForm::Exponentiated)?,
        };
        println!(
            "{tau:>5.2} {:>10.5} {:>9.5} {:>9.5} {reference:>10.5}",
            curve.values[i], stderr[i], imag[i]
        );
    }
    if beta == Beta::Symplectic {
        println!("(GSE reference column is exp(-eps C), no exact result exists)");
    }
    Ok(())
}
