//! Quick run of the built-in acceptance suite, plus a tiny parameter sweep
//! showing how the affine and Euclidean GN ratios separate under shear.

use affine_gn::constants::{c2, GNParameters};
use affine_gn::energy::SphericalQuadrature;
use affine_gn::extremal::ExtremalSpec;
use affine_gn::inequality::{check_affine_gn, check_euclidean_gn};
use affine_gn::selftest::{run_selftest, SelftestOptions};
use affine_gn::{AffineMap, GridSpec};

fn main() -> affine_gn::Result<()> {
    let summary = run_selftest(&SelftestOptions { quick: true }, |c| {
        println!("{:>2} {:<26} {}", c.id, c.name, if c.passed { "PASS" } else { "FAIL" });
    });
    println!("all passed: {}\n", summary.passed);

    let params = GNParameters::closed_form(2, 1.5, 2.0)?;
    let k = c2(2, 1.5, 2.0)?;
    let quad = SphericalQuadrature::new(2, 256)?;
    let grid = GridSpec::new(2, 20.0, 384)?;
    println!("{:>6} {:>8} {:>10}", "shear", "affine", "Euclidean");
    for shear in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let f = ExtremalSpec::gn_superquadratic(2, 1.5, 2.0)?
            .with_map(AffineMap::shear2(shear))?
            .sample(grid)?;
        let a = check_affine_gn(&f, &params, &quad, k)?;
        let e = check_euclidean_gn(&f, &params, k)?;
        println!("{shear:>6} {:>8.4} {:>10.4}", a.ratio, e.ratio);
    }
    Ok(())
}
