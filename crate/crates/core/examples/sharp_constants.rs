//! Tabulates the closed-form sharp constants for a handful of exponent
//! choices and confirms the general GN exponent agrees with the
//! closed-form family where both apply.
//!
//! ```text
//! cargo run --release --example sharp_constants
//! ```

use affine_gn::constants::{
    affine_sobolev_constant, b_np, c2, c3, c4, theta_c2, theta_gn, GNParameters, SharpConstantSet,
};

fn main() -> affine_gn::Result<()> {
    println!("{:>2} {:>5} {:>5} {:>10} {:>10} {:>10}", "n", "p", "q", "C2", "C3", "C4");
    for (n, p, q) in [(2, 1.5, 2.0), (3, 2.0, 3.0), (3, 2.0, 1.5), (4, 2.5, 2.0), (3, 1.5, 2.0)] {
        let fmt = |r: affine_gn::Result<f64>| r.map_or("-".to_string(), |v| format!("{v:.8}"));
        println!(
            "{n:>2} {p:>5} {q:>5} {:>10} {:>10} {:>10}",
            fmt(c2(n, p, q)),
            fmt(c3(n, p, q)),
            fmt(c4(n, p)),
        );
    }

    // θ from the general formula at s = p(q−1)/(p−1)
    let params = GNParameters::closed_form(3, 2.0, 3.0)?;
    println!(
        "\ntheta: general {:.12}, closed form {:.12}",
        theta_gn(&params),
        theta_c2(3, 2.0, 3.0)
    );

    println!("affine Sobolev constant (n=3, p=2): {:.10}", affine_sobolev_constant(3, 2.0)?);
    println!("Morrey constant (n=2, p=3):         {:.10}", b_np(2, 3.0)?);

    let set = SharpConstantSet::compute(2, 1.5, Some(2.0), None)?;
    println!("\n{}", serde_json::to_string_pretty(&set)?);
    Ok(())
}
