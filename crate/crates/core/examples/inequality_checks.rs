//! Runs each inequality checker on its extremal and on a generic input.

use affine_gn::constants::{c2, GNParameters};
use affine_gn::energy::SphericalQuadrature;
use affine_gn::extremal::ExtremalSpec;
use affine_gn::inequality::{
    check_affine_gn, check_affine_sobolev, check_euclidean_gn, check_log_sobolev,
    check_morrey_sobolev, check_moser_trudinger, InequalityReport,
};
use affine_gn::{AffineMap, GridFunction, GridSpec};

fn show(label: &str, r: &InequalityReport) {
    println!(
        "{:<26} {label:<14} ratio {:.5}  slack {:+.5}  {}",
        r.inequality_id.name(),
        r.ratio,
        r.slack,
        if r.passed { "ok" } else { "VIOLATED" }
    );
}

fn main() -> affine_gn::Result<()> {
    let quad2 = SphericalQuadrature::new(2, 512)?;
    let quad3 = SphericalQuadrature::new(3, 1000)?;

    let params = GNParameters::closed_form(2, 1.5, 2.0)?;
    let k = c2(2, 1.5, 2.0)?;
    let ext = ExtremalSpec::gn_superquadratic(2, 1.5, 2.0)?;
    let sheared = ext.clone().with_map(AffineMap::shear2(1.0))?.sample(GridSpec::new(2, 16.0, 512)?)?;
    show("extremal", &check_affine_gn(&ext.sample(GridSpec::new(2, 10.0, 512)?)?, &params, &quad2, k)?);
    show("sheared", &check_affine_gn(&sheared, &params, &quad2, k)?);
    show("sheared", &check_euclidean_gn(&sheared, &params, k)?);

    let bump2 = GridFunction::sample(GridSpec::new(2, 1.25, 256)?, |x| {
        (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0).powi(3)
    })?;
    show("bump", &check_affine_gn(&bump2, &params, &quad2, k)?);

    // Sobolev endpoint q = p(n-1)/(n-p); small p keeps the tail inside the box
    let sob = ExtremalSpec::gn_superquadratic(2, 1.2, 1.5)?;
    let f = sob.sample(GridSpec::new(2, 6.0, 256)?)?;
    show("extremal", &check_affine_sobolev(&f, 2, 1.2, &quad2)?);

    let ls = ExtremalSpec::log_sobolev(3, 2.0, 1.0)?;
    let f = ls.sample(GridSpec::new(3, ls.auto_half_width(2.0, 64)?, 64)?)?;
    show("extremal", &check_log_sobolev(&f, 3, 2.0, &quad3)?);

    let spec = GridSpec::new(2, 1.25, 512)?;
    let c = spec.coordinate(256);
    let morrey = ExtremalSpec::morrey(2, 3.0)?.with_center(vec![c, c])?.sample(spec)?;
    show("extremal", &check_morrey_sobolev(&morrey, 2, 3.0, &quad2, true)?);
    show("bump", &check_morrey_sobolev(&bump2, 2, 3.0, &quad2, true)?);

    let mt = check_moser_trudinger(&bump2, 2, &quad2, 1.0, true)?;
    println!(
        "moser-trudinger on bump: affine lhs {:.6} >= Euclidean lhs {:.6}",
        mt.parameters["affine_lhs"], mt.parameters["euclidean_lhs"]
    );
    Ok(())
}
