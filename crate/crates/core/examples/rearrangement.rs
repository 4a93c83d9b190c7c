//! Symmetric decreasing rearrangement of an off-centre, two-peaked function.

use affine_gn::energy::{gradient_lp_norm, SphericalQuadrature, affine_energy};
use affine_gn::rearrange::{decreasing_rearrangement, distribution_function, spherical_rearrangement};
use affine_gn::{GridFunction, GridSpec};

fn main() -> affine_gn::Result<()> {
    let spec = GridSpec::new(2, 8.0, 256)?;
    let f = GridFunction::sample(spec, |x| {
        let a = (-(x[0] - 2.0).powi(2) - 3.0 * (x[1] - 1.0).powi(2)).exp();
        let b = 0.6 * (-0.5 * (x[0] + 2.5).powi(2) - 0.5 * (x[1] + 1.5).powi(2)).exp();
        a + b
    })?;
    let star = spherical_rearrangement(&f);

    println!("{:>4} {:>12} {:>12}", "p", "|f|_p", "|f*|_p");
    for p in [1.0, 2.0, 4.0] {
        println!("{p:>4} {:>12.8} {:>12.8}", f.lp_norm(p)?, star.lp_norm(p)?);
    }
    println!("sup: {} vs {}", f.max_abs(), star.max_abs());

    for t in [0.1, 0.3, 0.5] {
        println!(
            "level {t}: |{{f > t}}| = {:.4}, |{{f* > t}}| = {:.4}",
            distribution_function(&f, t),
            distribution_function(&star, t)
        );
    }

    let quad = SphericalQuadrature::new(2, 512)?;
    for p in [1.5, 2.0, 3.0] {
        println!(
            "p = {p}: gradient {:.5} -> {:.5}, affine energy {:.5} -> {:.5}",
            gradient_lp_norm(&f, p)?,
            gradient_lp_norm(&star, p)?,
            affine_energy(&f, p, &quad)?,
            affine_energy(&star, p, &quad)?,
        );
    }

    let profile = decreasing_rearrangement(&f);
    println!("\none-dimensional profile, support measure {:.3}", profile.support_measure());
    for s in [0.0, 1.0, 5.0, 10.0, 20.0] {
        println!("  f*({s:>4}) = {:.6}", profile.value_at(s));
    }
    Ok(())
}
