//! GUE fidelity amplitude: closed form against its defining integral, and
//! the smoothness of the curve at the Heisenberg time.
//!
//! ```text
//! cargo run --example gue_closed_form -- 4
//! ```

use fidelity::gue::{fidelity_gue, fidelity_gue_oracle, heisenberg_continuity, oracle_rule};

fn main() -> fidelity::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2.0);
    let rule = oracle_rule();

    println!("{:>6} {:>22} {:>22} {:>10}", "tau", "closed form", "integral", "diff");
    for i in 1..=15 {
        let tau = 0.2 * i as f64;
        let exact = fidelity_gue(eps, tau)?;
        let oracle = fidelity_gue_oracle(eps, tau, &rule)?;
        println!("{tau:>6.2} {exact:>22.17} {oracle:>22.17} {:>10.1e}", (exact - oracle).abs());
    }

    let c = heisenberg_continuity(eps)?;
    println!();
    println!("at tau = 1, eps = {eps}:");
    println!("  value jump      {:.2e}", c.value_jump);
    println!("  slope  left/right  {:+.10} {:+.10}", c.slope_left, c.slope_right);
    println!("  curvature left/right  {:+.6} {:+.6}", c.curvature_left, c.curvature_right);
    Ok(())
}
