//! Samples one member of each extremal family, including an affine image,
//! and reports how well the grid reproduces its radial structure.

use affine_gn::energy::{EnergyComparison, SphericalQuadrature};
use affine_gn::extremal::ExtremalSpec;
use affine_gn::rearrange::spherical_rearrangement;
use affine_gn::{AffineMap, GridSpec};

fn main() -> affine_gn::Result<()> {
    let quad = SphericalQuadrature::new(2, 512)?;
    let points = 256;
    let members = [
        ("gn_superquadratic", 1.5, ExtremalSpec::gn_superquadratic(2, 1.5, 2.0)?),
        ("gn_compact", 1.5, ExtremalSpec::gn_compact(2, 1.5, 1.4)?),
        ("log_sobolev", 1.5, ExtremalSpec::log_sobolev(2, 1.5, 1.0)?),
        ("morrey", 3.0, ExtremalSpec::morrey(2, 3.0)?),
    ];
    println!("{:<18} {:>8} {:>10} {:>12} {:>12}", "family", "L", "support", "E/|grad|", "|f - f*|_2");
    for (name, p, spec) in members {
        // the superquadratic profile has a polynomial tail; a fixed box is
        // enough for the ratio, the others fit their support automatically
        let half = match name {
            "gn_superquadratic" => 10.0,
            _ => spec.auto_half_width(1.0, points)?,
        };
        let f = spec.sample(GridSpec::new(2, half, points)?)?;
        let c = EnergyComparison::compute(&f, p, &quad)?;
        let dist = f.l2_distance(&spherical_rearrangement(&f))? / f.lp_norm(2.0)?;
        let support = spec.support_measure().map_or("-".into(), |m| format!("{m:.4}"));
        println!("{name:<18} {half:>8.3} {support:>10} {:>12.6} {dist:>12.2e}", c.ratio);
    }

    // an affine image has the same affine energy but a larger gradient norm
    let base = ExtremalSpec::gn_superquadratic(2, 1.5, 2.0)?;
    let sheared = base.clone().with_map(AffineMap::shear2(1.0))?.with_amplitude(2.0)?;
    let grid = GridSpec::new(2, 16.0, 512)?;
    let a = EnergyComparison::compute(&base.sample(grid)?, 1.5, &quad)?;
    let b = EnergyComparison::compute(&sheared.sample(grid)?, 1.5, &quad)?;
    println!(
        "\nshear + amplitude 2: affine energy x{:.4} (expect 2), gradient norm x{:.4}",
        b.affine_energy / a.affine_energy,
        b.gradient_norm / a.gradient_norm
    );
    println!("profile at 0, 0.5, 1: {:?}", [0.0, 0.5, 1.0].map(|r| base.radial_profile(r)));
    Ok(())
}
