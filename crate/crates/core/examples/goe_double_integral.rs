//! GOE fidelity amplitude by nested Gauss-Legendre quadrature.
//!
//! Prints the curve for a few perturbation strengths and checks that the
//! unperturbed amplitude stays at one.

use fidelity::goe::{verify_goe_identity, GoeIntegrator};
use fidelity::model::TimeGrid;

fn main() -> fidelity::Result<()> {
    let goe = GoeIntegrator::default_instance();
    println!("normalization constant: {:.12}", goe.normalization());

    let strengths = [0.2, 1.0, 4.0, 10.0];
    print!("{:>6}", "tau");
    for eps in strengths {
        print!(" {:>12}", format!("eps={eps}"));
    }
    println!();
    for i in 0..=12 {
        let tau = 0.25 * i as f64;
        print!("{tau:>6.2}");
        for eps in strengths {
            print!(" {:>12.8}", goe.fidelity(eps, tau)?);
        }
        println!();
    }

    let grid = TimeGrid::new((1..=50).map(|i| 0.06 * i as f64).collect())?;
    let report = verify_goe_identity(&grid, 1e-6)?;
    println!(
        "\nf_0(tau) = 1 on 50 points: max deviation {:.2e} at tau = {} ({})",
        report.max_deviation,
        report.worst_tau,
        if report.passed { "ok" } else { "FAILED" }
    );
    Ok(())
}
