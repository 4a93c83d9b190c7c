//! Distribution function, decreasing rearrangement and spherically symmetric
//! rearrangement of grid functions.
//!
//! Both rearrangements are built by sorting cell values, so they are exact
//! permutations of `|f|` and every integral `∫ Φ(|f|)` is preserved up to
//! floating-point summation order.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{GridFunction, GridSpec};

/// `|{ |f| > t }|`.
pub fn distribution_function(f: &GridFunction, t: f64) -> f64 {
    f.support_measure(t.max(0.0))
}

/// Piecewise-constant decreasing rearrangement `f*` on `[0, ∞)`.
///
/// `levels[k]` is the value on `[breakpoints[k], breakpoints[k + 1])`; the
/// profile is zero beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementProfile {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
}

impl RearrangementProfile {
    pub fn value_at(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.levels.first().copied().unwrap_or(0.0);
        }
        let k = self.breakpoints.partition_point(|&b| b <= s);
        if k == 0 || k > self.levels.len() {
            0.0
        } else {
            self.levels[k - 1]
        }
    }

    /// Measure of the support, the last breakpoint.
    pub fn support_measure(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }
}

/// Cell indices sorted by `|value|` descending, ties by index.
fn value_order(f: &GridFunction) -> Vec<usize> {
    let v = f.values();
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.par_sort_unstable_by(|&a, &b| match v[b].abs().total_cmp(&v[a].abs()) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    idx
}

/// Interior cell indices sorted by distance from the origin, ties by index.
fn radius_order(spec: &GridSpec) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = (0..spec.len())
        .filter(|&i| !spec.is_boundary(i))
        .map(|i| (spec.radius_sq(i), i))
        .collect();
    keyed.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

pub fn decreasing_rearrangement(f: &GridFunction) -> RearrangementProfile {
    let cv = f.spec().cell_volume();
    let v = f.values();
    let levels: Vec<f64> = value_order(f)
        .into_iter()
        .map(|i| v[i].abs())
        .take_while(|&a| a > 0.0)
        .collect();
    let breakpoints = (0..=levels.len()).map(|k| k as f64 * cv).collect();
    RearrangementProfile {
        breakpoints,
        levels,
    }
}

/// `f★(x) = f*(ω_n |x|ⁿ)`, realised by placing the k-th largest `|f|` on the
/// k-th closest interior cell to the origin.
pub fn spherical_rearrangement(f: &GridFunction) -> GridFunction {
    let spec = *f.spec();
    let v = f.values();
    let mut out = vec![0.0; spec.len()];
    for (src, dst) in value_order(f).into_iter().zip(radius_order(&spec)) {
        let a = v[src].abs();
        if a == 0.0 {
            break;
        }
        out[dst] = a;
    }
    GridFunction::from_values(spec, out).expect("a permutation of finite values is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cone(n: usize) -> GridFunction {
        let s = GridSpec::new(2, 2.0, n).unwrap();
        GridFunction::sample(s, |x| (1.0 - x[0].hypot(x[1])).max(0.0)).unwrap()
    }

    #[test]
    fn cone_distribution_function() {
        let f = cone(512);
        let m = distribution_function(&f, 0.5);
        assert!((m - PI * 0.25).abs() / (PI * 0.25) < 1e-2, "{m}");
        assert_eq!(distribution_function(&f, f.max_abs()), 0.0);
        assert_eq!(distribution_function(&f, 10.0), 0.0);
    }

    #[test]
    fn disc_level_set() {
        let s = GridSpec::new(2, 1.5, 256).unwrap();
        let disc = GridFunction::sample(s, |x| f64::from(x[0].hypot(x[1]) < 1.0)).unwrap();
        let m = distribution_function(&disc, 0.5);
        assert!((m - PI).abs() < 2.0 * PI * s.spacing());
    }

    #[test]
    fn cone_profile_inverts_distribution() {
        let p = decreasing_rearrangement(&cone(512));
        for &s in &[0.5, 1.0, 2.0] {
            let want = 1.0 - (s / PI).sqrt();
            let got = p.value_at(s);
            assert!((got - want).abs() / want < 1e-2, "s={s}: {got} vs {want}");
        }
    }

    #[test]
    fn profile_starts_at_sup_norm_and_is_nonincreasing() {
        let f = cone(128);
        let p = decreasing_rearrangement(&f);
        assert_eq!(p.value_at(0.0), f.max_abs());
        assert!(p.levels.windows(2).all(|w| w[0] >= w[1]));
        assert!((p.support_measure() - f.support_measure(0.0)).abs() < 1e-12);
        assert_eq!(p.value_at(p.support_measure() + 1.0), 0.0);
    }

    #[test]
    fn constant_on_set_profile() {
        let s = GridSpec::new(2, 1.0, 32).unwrap();
        let f = GridFunction::sample(s, |x| if x[0] > 0.0 { 2.5 } else { 0.0 }).unwrap();
        let p = decreasing_rearrangement(&f);
        let m = f.support_measure(0.0);
        assert!(p.levels.iter().all(|&l| l == 2.5));
        assert!((p.support_measure() - m).abs() < 1e-12);
        assert_eq!(p.value_at(m * 0.99), 2.5);
        assert_eq!(p.value_at(m * 1.01), 0.0);
    }

    #[test]
    fn half_plane_indicator_becomes_a_ball() {
        let s = GridSpec::new(2, 1.0, 128).unwrap();
        let f = GridFunction::sample(s, |x| f64::from(x[0] > 0.3)).unwrap();
        let star = spherical_rearrangement(&f);
        let m = f.support_measure(0.0);
        let r = (m / PI).sqrt();
        let ring = 2.0 * PI * r * s.spacing() * 2.0;
        let ball = GridFunction::sample(s, |x| f64::from(x[0].hypot(x[1]) < r)).unwrap();
        let diff = star.l2_distance(&ball).unwrap().powi(2);
        assert!(diff <= ring, "{diff} > {ring}");
    }

    #[test]
    fn radial_gaussian_is_fixed_and_shift_is_removed() {
        let s = GridSpec::new(2, 6.0, 256).unwrap();
        let g = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let norm = g.lp_norm(2.0).unwrap();
        let star = spherical_rearrangement(&g);
        assert!(star.l2_distance(&g).unwrap() / norm < 1e-2);

        let shifted =
            GridFunction::sample(s, |x| (-((x[0] - 1.0).powi(2) + x[1] * x[1])).exp()).unwrap();
        let star = spherical_rearrangement(&shifted);
        assert!(star.l2_distance(&g).unwrap() / norm < 1e-2);
    }

    #[test]
    fn equimeasurable_and_idempotent() {
        let s = GridSpec::new(2, 3.0, 64).unwrap();
        let f = GridFunction::sample(s, |x| (x[0] * 1.7).sin() * (-(x[1] * x[1])).exp()).unwrap();
        let star = spherical_rearrangement(&f);
        for &p in &[1.0, 2.0, 4.0] {
            let (a, b) = (f.lp_norm(p).unwrap(), star.lp_norm(p).unwrap());
            assert!((a - b).abs() / a <= 1e-10);
        }
        assert_eq!(star.max_abs(), f.max_abs());
        assert_eq!(spherical_rearrangement(&star), star);
    }
}
