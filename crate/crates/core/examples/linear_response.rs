//! Weak-perturbation decay `C(tau)` for all three ensembles and how well
//! `1 - eps C` tracks the exact curves.

use fidelity::goe::GoeIntegrator;
use fidelity::gue::fidelity_gue;
use fidelity::linear_response::{c_of_tau, default_rule, fidelity_lr, ResponseForm};
use fidelity::model::Beta;

fn main() -> fidelity::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "tau", "C GOE", "C GUE", "C GSE");
    for i in 1..=12 {
        let tau = 0.25 * i as f64;
        let c: Vec<f64> = Beta::ALL
            .iter()
            .map(|&b| c_of_tau(b, tau, default_rule()))
            .collect::<Result<_, _>>()?;
        println!("{tau:>6.2} {:>12.8} {:>12.8} {:>12.8}", c[0], c[1], c[2]);
    }

    let eps = 0.2;
    let goe = GoeIntegrator::default_instance();
    println!("\neps = {eps}: exact vs linear vs exponentiated");
    for tau in [0.25, 0.5, 1.0, 2.0] {
        for (beta, exact) in [
            (Beta::Orthogonal, goe.fidelity(eps, tau)?),
            (Beta::Unitary, fidelity_gue(eps, tau)?),
        ] {
            println!(
                "  {} tau={tau:<4} exact {exact:.6}  lr {:.6}  exp {:.6}",
                beta.name(),
                fidelity_lr(beta, eps, tau, ResponseForm::Linear)?,
                fidelity_lr(beta, eps, tau, ResponseForm::Exponentiated)?,
            );
        }
    }
    Ok(())
}
