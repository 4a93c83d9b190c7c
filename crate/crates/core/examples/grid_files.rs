//! Grid functions: sampling, affine resampling, and the JSON file format
//! shared with the `agn` command line.

use affine_gn::{AffineMap, GridFunction, GridSpec};

fn main() -> affine_gn::Result<()> {
    let spec = GridSpec::new(2, 4.0, 128)?;
    let f = GridFunction::sample(spec, |x| (-(x[0] * x[0]) - 4.0 * x[1] * x[1]).exp())?;
    println!("h = {}, |f|_2 = {:.8}", spec.spacing(), f.lp_norm(2.0)?);

    let rot = AffineMap::rotation2(std::f64::consts::FRAC_PI_4);
    let g = f.apply_affine(&rot)?;
    println!("rotated by 45 degrees: |f∘A|_2 = {:.8} (det {})", g.lp_norm(2.0)?, rot.det());

    let grad = f.gradient();
    println!("max |grad f| = {:.6}", grad.max_magnitude());
    println!("f(0.3, -0.2) interpolated = {:.6}", f.interpolate(&[0.3, -0.2]));

    let dir = std::env::temp_dir().join("affine_gn_grid_example.json");
    f.write_json(&dir)?;
    let back = GridFunction::read_json(&dir)?;
    println!("wrote {} and read it back unchanged: {}", dir.display(), back == f);
    std::fs::remove_file(&dir)?;
    Ok(())
}
