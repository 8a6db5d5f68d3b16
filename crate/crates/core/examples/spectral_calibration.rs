//! Checks the sampler's spectra: unit spacing at the band centre, the
//! semicircle, Kramers pairs and the two-level form factor.

use fidelity::model::{Beta, EnsembleSpec, PerturbationSpec, TimeGrid};
use fidelity::sim::{spectral_calibration, SimulationConfig};

fn main() -> fidelity::Result<()> {
    let dim = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let draws = std::env::args().nth(2).and_then(|a| a.parse().ok()).unwrap_or(50);
    for beta in Beta::ALL {
        let cfg = SimulationConfig::new(
            EnsembleSpec::new(beta, dim)?,
            PerturbationSpec::new(0.0)?,
            TimeGrid::new(vec![0.0])?,
        )
        .with_realizations(draws, 1);
        let r = spectral_calibration(&cfg)?;
        println!("{} N={dim}, {draws} draws", beta.name());
        println!("  central spacing     {:.4}", r.mean_spacing);
        println!("  density deviation   {:.4} (|E| <= N/pi)", r.max_density_deviation);
        println!("  spectrum            [{:.1}, {:.1}]", r.spectrum_min, r.spectrum_max);
        if let Some(k) = r.kramers_max_splitting {
            println!("  Kramers splitting   {k:.2e}");
        }
        if let Some(ff) = &r.form_factor {
            println!("  form factor |dev|   {:.4}", ff.mean_abs_deviation);
            for i in (3..ff.taus.len()).step_by(4) {
                println!(
                    "    tau={:.2}  K={:.3}  1-b2={:.3}",
                    ff.taus[i], ff.empirical[i], ff.expected[i]
                );
            }
        }
        println!("  passed: {}", r.passed());
    }
    Ok(())
}
