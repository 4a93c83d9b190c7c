//! Affine energy versus the gradient norm.
//!
//! For radial inputs the two agree; composing with a volume-preserving map
//! leaves the affine energy unchanged while the gradient norm grows.

use affine_gn::energy::{affine_energy, EnergyComparison, SphericalQuadrature};
use affine_gn::{AffineMap, GridFunction, GridSpec};

fn main() -> affine_gn::Result<()> {
    let spec = GridSpec::new(2, 6.0, 256)?;
    // a determinant-1 image of the unit Gaussian: the exact value stays sqrt(pi),
    // but the elongation makes the direction count matter
    let gaussian = GridFunction::sample(spec, |x| (-(x[0] * x[0] / 4.0 + 4.0 * x[1] * x[1])).exp())?;

    for m in [4, 8, 16, 64, 256] {
        let quad = SphericalQuadrature::new(2, m)?;
        let e = affine_energy(&gaussian, 2.0, &quad)?;
        println!("M = {m:>3}: E_2 = {e:.10} (error {:.2e})", (e - std::f64::consts::PI.sqrt()).abs());
    }

    let quad = SphericalQuadrature::new(2, 512)?;
    let wide = GridSpec::new(2, 10.0, 384)?;
    println!("\n{:>6} {:>10} {:>12} {:>8}", "shear", "affine", "gradient", "ratio");
    for k in [0.0, 0.5, 1.0, 2.0] {
        let map = AffineMap::shear2(k);
        let f = GridFunction::sample(wide, |x| {
            let y = map.apply(x);
            (-(y[0] * y[0] + y[1] * y[1])).exp()
        })?;
        let c = EnergyComparison::compute(&f, 1.5, &quad)?;
        println!("{k:>6} {:>10.6} {:>12.6} {:>8.4}", c.affine_energy, c.gradient_norm, c.ratio);
    }

    let spec3 = GridSpec::new(3, 5.0, 48)?;
    let g3 = GridFunction::sample(spec3, |x| (-x.iter().map(|t| t * t).sum::<f64>()).exp())?;
    let c = EnergyComparison::compute(&g3, 2.0, &SphericalQuadrature::default_for(3)?)?;
    println!("\nn = 3 Gaussian: affine {:.6}, gradient {:.6}", c.affine_energy, c.gradient_norm);
    Ok(())
}
