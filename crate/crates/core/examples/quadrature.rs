use fidelity::special::{gauss_legendre, integrate_1d, s, s_prime};

fn main() -> fidelity::Result<()> {
    let rule = gauss_legendre(8)?;
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        println!("node {x:+.16}  weight {w:.16}");
    }

    let composite = gauss_legendre(16)?.with_panels(4);
    let i = integrate_1d(|x: f64| x.exp(), 0.0, 1.0, &composite)?;
    println!("int_0^1 e^x = {:.16} (exact {:.16})", i.value, std::f64::consts::E - 1.0);

    for x in [1e-4, 1e-2, 0.5, 3.0, 30.0] {
        println!("s({x}) = {:.16e}   s'({x}) = {:.16e}", s(x), s_prime(x));
    }
    Ok(())
}
