//! Recovers the sharp GN constant by constrained minimisation and compares
//! it with the closed form.
//!
//! Takes about 10 s in release mode.

use std::time::Instant;

use affine_gn::constants::{c2, k_opt_from_energy, GNParameters};
use affine_gn::minimize::{energy_functional, minimize, MinimizeOptions};
use affine_gn::GridSpec;

fn main() -> affine_gn::Result<()> {
    let params = GNParameters::new(2, 1.5, 2.0, 3.0)?;
    let start = Instant::now();
    let r = minimize(&params, GridSpec::new(2, 12.0, 128)?, &MinimizeOptions::default())?;
    println!(
        "converged {} after {} iterations ({:.1?})",
        r.converged,
        r.iterations_used,
        start.elapsed()
    );
    let closed = c2(2, 1.5, 2.0)?;
    println!("E(u) = {:.8}", r.energy);
    println!("K    = {:.8}", r.k_opt);
    println!("C2   = {:.8} (relative gap {:.2e})", closed, (r.k_opt - closed).abs() / closed);
    println!("constraint drift {:.1e}", r.max_constraint_drift);

    let h = &r.energy_history;
    for k in [0, 10, 100, h.len() - 1] {
        println!("  iterate {k:>5}: E = {:.8}", h[k.min(h.len() - 1)]);
    }

    // Nash exponents: q = 1 gives a compactly supported minimiser
    let nash = GNParameters::new(2, 1.5, 1.0, 1.5)?;
    let r = minimize(&nash, GridSpec::new(2, 6.0, 128)?, &MinimizeOptions::default())?;
    let support = r.u_inf.support_measure(1e-12 * r.u_inf.max_abs());
    println!(
        "\nNash (q = 1, s = p): E = {:.6}, K = {:.6}, support {:.3} of {:.0}",
        energy_functional(&r.u_inf, 1.5, 1.0)?,
        k_opt_from_energy(&nash, r.energy)?,
        support,
        r.u_inf.spec().box_volume()
    );
    Ok(())
}
