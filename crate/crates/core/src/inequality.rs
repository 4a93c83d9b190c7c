//! Both sides of each sharp inequality evaluated on a grid function, packed
//! into a report with ratio, slack and a pass flag.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{affine_sobolev_constant, b_np, c4, omega, theta_gn, GNParameters};
use crate::energy::{gradient_lp_norm, EnergyComparison, SphericalQuadrature};
use crate::error::{param, Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{det_sum, AbsPow};

/// Cells with `|f| > SUPPORT_THRESHOLD · max|f|` count as support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    AffineGn,
    EuclideanGn,
    AffineSobolev,
    AffineNash,
    LogSobolev,
    AffineMoserTrudinger,
    EuclideanMoserTrudinger,
    AffineMorreySobolev,
    EuclideanMorreySobolev,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        InequalityId::AffineGn,
        InequalityId::EuclideanGn,
        InequalityId::AffineSobolev,
        InequalityId::AffineNash,
        InequalityId::LogSobolev,
        InequalityId::AffineMoserTrudinger,
        InequalityId::EuclideanMoserTrudinger,
        InequalityId::AffineMorreySobolev,
        InequalityId::EuclideanMorreySobolev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::AffineGn => "affine_gn",
            InequalityId::EuclideanGn => "euclidean_gn",
            InequalityId::AffineSobolev => "affine_sobolev",
            InequalityId::AffineNash => "affine_nash",
            InequalityId::LogSobolev => "log_sobolev",
            InequalityId::AffineMoserTrudinger => "affine_moser_trudinger",
            InequalityId::EuclideanMoserTrudinger => "euclidean_moser_trudinger",
            InequalityId::AffineMorreySobolev => "affine_morrey_sobolev",
            InequalityId::EuclideanMorreySobolev => "euclidean_morrey_sobolev",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == name)
            .ok_or_else(|| Error::Parameter(format!("unknown inequality '{name}'")))
    }

    /// Whether the right-hand side uses the affine energy.
    pub fn is_affine(self) -> bool {
        !matches!(
            self,
            InequalityId::EuclideanGn
                | InequalityId::EuclideanMoserTrudinger
                | InequalityId::EuclideanMorreySobolev
        )
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pass tolerances on `ratio ≤ 1 + tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Equality at the closed-form power-law extremals.
    pub power_law: f64,
    /// Inputs resampled through an affine map.
    pub affine_transformed: f64,
    /// Affine against Euclidean quantities on radial inputs.
    pub radial_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            power_law: 1e-2,
            affine_transformed: 2e-2,
            radial_identity: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: InequalityId,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `1 − ratio`.
    pub slack: f64,
    /// 0 for the Euclidean checks.
    pub quadrature_directions: usize,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InequalityReport {
    fn new(id: InequalityId, lhs: f64, rhs: f64, ratio: f64, quad: Option<&SphericalQuadrature>) -> Result<Self> {
        if !ratio.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "{id}: non-finite ratio from lhs = {lhs}, rhs = {rhs}"
            )));
        }
        let tolerance = Tolerances::default().power_law;
        Ok(InequalityReport {
            inequality_id: id,
            parameters: BTreeMap::new(),
            lhs,
            rhs,
            ratio,
            slack: 1.0 - ratio,
            quadrature_directions: quad.map_or(0, |q| q.len()),
            tolerance,
            passed: ratio <= 1.0 + tolerance,
            notes: Vec::new(),
        })
    }

    fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    fn note(mut self, text: &str) -> Self {
        self.notes.push(text.to_string());
        self
    }

    /// Re-judges the report against another tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.passed = self.ratio <= 1.0 + tol;
        self
    }
}

fn check_input(f: &GridFunction, n: usize) -> Result<()> {
    if f.spec().dim() != n {
        return param(format!(
            "input is {}-dimensional but n = {n}",
            f.spec().dim()
        ));
    }
    if f.is_zero() {
        return Err(Error::DegenerateInput("the input vanishes identically".into()));
    }
    Ok(())
}

fn check_quadrature(quad: &SphericalQuadrature, n: usize) -> Result<()> {
    if quad.dim() != n {
        return param(format!("quadrature dimension {} but n = {n}", quad.dim()));
    }
    Ok(())
}

fn check_k(k_opt: f64) -> Result<()> {
    if !(k_opt > 0.0) || !k_opt.is_finite() {
        return param(format!("k_opt must be positive, got {k_opt}"));
    }
    Ok(())
}

fn gn_parts(f: &GridFunction, params: &GNParameters) -> Result<(f64, f64, f64)> {
    check_input(f, params.n)?;
    Ok((f.lp_norm(params.s)?, f.lp_norm(params.q)?, theta_gn(params)))
}

fn gn_report(
    id: InequalityId,
    params: &GNParameters,
    k_opt: f64,
    lhs: f64,
    rhs: f64,
    quad: Option<&SphericalQuadrature>,
) -> Result<InequalityReport> {
    Ok(InequalityReport::new(id, lhs, rhs, lhs / rhs, quad)?
        .param("n", params.nf())
        .param("p", params.p)
        .param("q", params.q)
        .param("s", params.s)
        .param("theta", theta_gn(params))
        .param("k_opt", k_opt))
}

/// `‖f‖_s ≤ K 𝓔_p(f)^θ ‖f‖_q^{1−θ}`.
pub fn check_affine_gn(
    f: &GridFunction,
    params: &GNParameters,
    quad: &SphericalQuadrature,
    k_opt: f64,
) -> Result<InequalityReport> {
    check_k(k_opt)?;
    check_quadrature(quad, params.n)?;
    let (lhs, lq, theta) = gn_parts(f, params)?;
    let energy = EnergyComparison::compute(f, params.p, quad)?.affine_energy;
    let rhs = k_opt * energy.powf(theta) * lq.powf(1.0 - theta);
    gn_report(InequalityId::AffineGn, params, k_opt, lhs, rhs, Some(quad))
}

/// `‖f‖_s ≤ K ‖∇f‖_p^θ ‖f‖_q^{1−θ}`.
pub fn check_euclidean_gn(
    f: &GridFunction,
    params: &GNParameters,
    k_opt: f64,
) -> Result<InequalityReport> {
    check_k(k_opt)?;
    let (lhs, lq, theta) = gn_parts(f, params)?;
    let grad = gradient_lp_norm(f, params.p)?;
    let rhs = k_opt * grad.powf(theta) * lq.powf(1.0 - theta);
    gn_report(InequalityId::EuclideanGn, params, k_opt, lhs, rhs, None)
}

fn check_p_below_n(n: usize, p: f64) -> Result<()> {
    if n < 2 || !(p > 1.0 && p < n as f64) {
        return param(format!("this inequality needs 1 < p < n, got p = {p}, n = {n}"));
    }
    Ok(())
}

/// `C ‖f‖_{np/(n−p)} ≤ 𝓔_p(f)`.
pub fn check_affine_sobolev(
    f: &GridFunction,
    n: usize,
    p: f64,
    quad: &SphericalQuadrature,
) -> Result<InequalityReport> {
    check_p_below_n(n, p)?;
    check_input(f, n)?;
    check_quadrature(quad, n)?;
    let crit = n as f64 * p / (n as f64 - p);
    let constant = affine_sobolev_constant(n, p)?;
    let lhs = constant * f.lp_norm(crit)?;
    let rhs = EnergyComparison::compute(f, p, quad)?.affine_energy;
    Ok(InequalityReport::new(InequalityId::AffineSobolev, lhs, rhs, lhs / rhs, Some(quad))?
        .param("n", n as f64)
        .param("p", p)
        .param("p_star", crit)
        .param("sobolev_constant", constant))
}

/// `(∫|f|^p)^{1 + p/(n(p−1))} ≤ K^{p + p²/(n(p−1))} 𝓔_p(f)^p (∫|f|)^{p²/(n(p−1))}`
/// with `K` the sharp GN constant at `(q, s) = (1, p)`.
pub fn check_affine_nash(
    f: &GridFunction,
    n: usize,
    p: f64,
    quad: &SphericalQuadrature,
    k_opt: f64,
) -> Result<InequalityReport> {
    check_p_below_n(n, p)?;
    check_k(k_opt)?;
    check_input(f, n)?;
    check_quadrature(quad, n)?;
    let e = p * p / (n as f64 * (p - 1.0));
    let lhs = f.integral_abs_pow(p).powf(1.0 + e / p);
    let energy = EnergyComparison::compute(f, p, quad)?.affine_energy;
    let rhs = k_opt.powf(p + e) * energy.powf(p) * f.integral_abs_pow(1.0).powf(e);
    Ok(InequalityReport::new(InequalityId::AffineNash, lhs, rhs, lhs / rhs, Some(quad))?
        .param("n", n as f64)
        .param("p", p)
        .param("k_opt", k_opt))
}

/// `∫|f|^p log|f| ≤ (n/p²) log(C₄ 𝓔_p(f)^p)` for `‖f‖_p = 1`; the input is
/// normalised first. Both sides can have either sign, so the ratio is
/// `exp(lhs − rhs)`.
pub fn check_log_sobolev(
    f: &GridFunction,
    n: usize,
    p: f64,
    quad: &SphericalQuadrature,
) -> Result<InequalityReport> {
    check_p_below_n(n, p)?;
    check_input(f, n)?;
    check_quadrature(quad, n)?;
    let u = f.scaled(1.0 / f.lp_norm(p)?);
    let pow = AbsPow::new(p);
    let v = u.values();
    let lhs = det_sum(v.len(), |i| {
        let a = v[i].abs();
        if a > 0.0 {
            pow.eval(a) * a.ln()
        } else {
            0.0
        }
    }) * u.spec().cell_volume();
    let energy = EnergyComparison::compute(&u, p, quad)?.affine_energy;
    let c = c4(n, p)?;
    let rhs = n as f64 / (p * p) * (c * energy.powf(p)).ln();
    Ok(InequalityReport::new(InequalityId::LogSobolev, lhs, rhs, (lhs - rhs).exp(), Some(quad))?
        .param("n", n as f64)
        .param("p", p)
        .param("c4", c)
        .note("ratio is exp(lhs - rhs)"))
}

fn support(f: &GridFunction) -> f64 {
    f.support_measure(SUPPORT_THRESHOLD * f.max_abs())
}

/// Mean over the support of `exp((nω_n^{1/n}|f| / D)^{n/(n−1)})` against
/// the configured bound `m_n`, with `D = 𝓔_n(f)` or `‖∇f‖_n`.
pub fn check_moser_trudinger(
    f: &GridFunction,
    n: usize,
    quad: &SphericalQuadrature,
    m_n: f64,
    affine: bool,
) -> Result<InequalityReport> {
    if n < 2 {
        return param("the Moser-Trudinger checks need n >= 2");
    }
    if !(m_n > 0.0) || !m_n.is_finite() {
        return param(format!("m_n must be positive, got {m_n}"));
    }
    check_input(f, n)?;
    check_quadrature(quad, n)?;
    let nf = n as f64;
    let supp = support(f);
    if !(supp < f.spec().box_volume()) {
        return Err(Error::DegenerateInput("the support fills the whole box".into()));
    }
    let cmp = EnergyComparison::compute(f, nf, quad)?;
    let scale = nf * omega(nf)?.powf(1.0 / nf);
    let conj = nf / (nf - 1.0);
    let threshold = SUPPORT_THRESHOLD * f.max_abs();
    let v = f.values();
    let mean = |denominator: f64| {
        det_sum(v.len(), |i| {
            let a = v[i].abs();
            if a > threshold {
                (scale * a / denominator).powf(conj).exp()
            } else {
                0.0
            }
        }) * f.spec().cell_volume()
            / supp
    };
    let affine_lhs = mean(cmp.affine_energy);
    let euclidean_lhs = mean(cmp.gradient_norm);
    let (id, lhs) = if affine {
        (InequalityId::AffineMoserTrudinger, affine_lhs)
    } else {
        (InequalityId::EuclideanMoserTrudinger, euclidean_lhs)
    };
    Ok(InequalityReport::new(id, lhs, m_n, lhs / m_n, Some(quad).filter(|_| affine))?
        .param("n", nf)
        .param("m_n", m_n)
        .param("support_measure", supp)
        .param("affine_lhs", affine_lhs)
        .param("euclidean_lhs", euclidean_lhs)
        .note("exponent constant n*omega_n^(1/n)")
        .note("m_n is a configured value, not a certified bound"))
}

/// `‖f‖_∞ ≤ b_{n,p} |supp f|^{1/n − 1/p} D` for `p > n`, with
/// `D = 𝓔_p(f)` or `‖∇f‖_p`.
pub fn check_morrey_sobolev(
    f: &GridFunction,
    n: usize,
    p: f64,
    quad: &SphericalQuadrature,
    affine: bool,
) -> Result<InequalityReport> {
    let nf = n as f64;
    if !(p > nf) || !p.is_finite() {
        return param(format!("Morrey-Sobolev needs p > n, got p = {p}, n = {n}"));
    }
    check_input(f, n)?;
    let supp = support(f);
    if !(supp < f.spec().box_volume()) {
        return Err(Error::DegenerateInput("the support fills the whole box".into()));
    }
    let b = b_np(n, p)?;
    let (denominator, quad) = if affine {
        check_quadrature(quad, n)?;
        (EnergyComparison::compute(f, p, quad)?.affine_energy, Some(quad))
    } else {
        (gradient_lp_norm(f, p)?, None)
    };
    let lhs = f.max_abs();
    let rhs = b * supp.powf(1.0 / nf - 1.0 / p) * denominator;
    let id = if affine {
        InequalityId::AffineMorreySobolev
    } else {
        InequalityId::EuclideanMorreySobolev
    };
    Ok(InequalityReport::new(id, lhs, rhs, lhs / rhs, quad)?
        .param("n", nf)
        .param("p", p)
        .param("b_np", b)
        .param("support_measure", supp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{c2, c3};
    use crate::extremal::ExtremalSpec;
    use crate::grid::{AffineMap, GridSpec};

    fn bump_at(x: f64, y: f64) -> f64 {
        let a = (-(x - 0.7).powi(2) - 2.0 * (y + 0.3).powi(2)).exp();
        let b = 0.6 * (-(x + 1.1).powi(2) - 0.5 * y.powi(2)).exp();
        a + b
    }

    /// Two Gaussians in the first two coordinates, one in the rest.
    fn bump(spec: GridSpec) -> GridFunction {
        GridFunction::sample(spec, |x| {
            bump_at(x[0], x[1]) * (-x[2..].iter().map(|t| t * t).sum::<f64>()).exp()
        })
        .unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(InequalityId::parse(id.name()).unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
        }
        assert!(InequalityId::parse("sobolev").is_err());
    }

    #[test]
    fn gn_extremal_is_sharp_and_bump_is_strict() {
        let params = GNParameters::closed_form(2, 1.5, 2.0).unwrap();
        let k = c2(2, 1.5, 2.0).unwrap();
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let ext = ExtremalSpec::gn_superquadratic(2, 1.5, 2.0).unwrap();
        let spec = GridSpec::new(2, 10.0, 256).unwrap();
        let r = check_affine_gn(&ext.sample(spec).unwrap(), &params, &quad, k).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-2, "{}", r.ratio);
        let r = check_affine_gn(&bump(GridSpec::new(2, 8.0, 128).unwrap()), &params, &quad, k).unwrap();
        assert!(r.ratio < 1.0 && r.passed);
    }

    #[test]
    fn compact_extremal_is_sharp() {
        // ‖f‖_q ≤ C₃ 𝓔^θ ‖f‖_r^{1−θ} is the GN form with exponents (r, q)
        let (n, p, q) = (2, 1.5, 1.4);
        let r_exp = p * (q - 1.0) / (p - 1.0);
        let ext = ExtremalSpec::gn_compact(n, p, q).unwrap();
        let half = ext.auto_half_width(1.0, 256).unwrap();
        let f = ext.sample(GridSpec::new(2, half, 256).unwrap()).unwrap();
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let params = GNParameters::new(n, p, r_exp, q).unwrap();
        assert!((theta_gn(&params) - crate::constants::theta_c3(n, p, q)).abs() < 1e-12);
        let rep = check_affine_gn(&f, &params, &quad, c3(n, p, q).unwrap()).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-2, "{}", rep.ratio);
    }

    #[test]
    fn sobolev_endpoint_extremal_is_sharp() {
        // the endpoint profile decays like |x|^{-(n-p)/(p-1)}; small p keeps
        // the tail inside a desk-sized box
        for (n, p, half, points, directions) in [(2, 1.2, 6.0, 256, 256), (3, 1.3, 6.0, 64, 300)] {
            let nf = n as f64;
            let ext = ExtremalSpec::gn_superquadratic(n, p, p * (nf - 1.0) / (nf - p)).unwrap();
            let spec = GridSpec::new(n, half, points).unwrap();
            let quad = SphericalQuadrature::new(n, directions).unwrap();
            let f = ext.sample(spec).unwrap();
            let rep = check_affine_sobolev(&f, n, p, &quad).unwrap();
            assert!((rep.ratio - 1.0).abs() < 1e-2, "n = {n}: {}", rep.ratio);

            let generic = check_affine_sobolev(&bump(spec), n, p, &quad).unwrap();
            assert!(generic.ratio < 1.0);
        }
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let spec = GridSpec::new(2, 8.0, 256).unwrap();
        let base = check_affine_sobolev(&bump(spec), 2, 1.5, &quad).unwrap();
        for lambda in [0.5, 2.0] {
            let f = GridFunction::sample(spec, |x| bump_at(lambda * x[0], lambda * x[1])).unwrap();
            let r = check_affine_sobolev(&f, 2, 1.5, &quad).unwrap();
            assert!((r.ratio - base.ratio).abs() < 1e-2, "lambda {lambda}: {}", r.ratio);
        }
    }

    #[test]
    fn ratios_are_scale_invariant_and_affine_is_stronger() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let f = bump(spec);
        let g = f.scaled(-3.5);
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let params = GNParameters::new(2, 1.5, 2.0, 3.0).unwrap();
        let k = c2(2, 1.5, 2.0).unwrap();
        let pairs = [
            (check_affine_gn(&f, &params, &quad, k), check_affine_gn(&g, &params, &quad, k)),
            (check_affine_sobolev(&f, 2, 1.2, &quad), check_affine_sobolev(&g, 2, 1.2, &quad)),
            (check_affine_nash(&f, 2, 1.5, &quad, 0.4), check_affine_nash(&g, 2, 1.5, &quad, 0.4)),
            (check_log_sobolev(&f, 2, 1.5, &quad), check_log_sobolev(&g, 2, 1.5, &quad)),
            (
                check_moser_trudinger(&f, 2, &quad, 10.0, true),
                check_moser_trudinger(&g, 2, &quad, 10.0, true),
            ),
            (
                check_morrey_sobolev(&f, 2, 3.0, &quad, true),
                check_morrey_sobolev(&g, 2, 3.0, &quad, true),
            ),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!((a.ratio - b.ratio).abs() < 1e-10 * a.ratio, "{}: {} vs {}", a.inequality_id, a.ratio, b.ratio);
        }
        let eu = check_euclidean_gn(&f, &params, k).unwrap();
        let af = check_affine_gn(&f, &params, &quad, k).unwrap();
        assert!(af.slack <= eu.slack);
        let mt = check_moser_trudinger(&f, 2, &quad, 10.0, false).unwrap();
        assert!(mt.parameters["affine_lhs"] >= mt.lhs);
        let ma = check_morrey_sobolev(&f, 2, 3.0, &quad, true).unwrap();
        let me = check_morrey_sobolev(&f, 2, 3.0, &quad, false).unwrap();
        assert!(ma.ratio >= me.ratio && me.quadrature_directions == 0);
    }

    #[test]
    fn sheared_extremal_separates_affine_from_euclidean() {
        let params = GNParameters::closed_form(2, 1.5, 2.0).unwrap();
        let k = c2(2, 1.5, 2.0).unwrap();
        let quad = SphericalQuadrature::new(2, 512).unwrap();
        let shear = AffineMap::shear2(1.0);
        let ext = ExtremalSpec::gn_superquadratic(2, 1.5, 2.0)
            .unwrap()
            .with_map(shear)
            .unwrap();
        let f = ext.sample(GridSpec::new(2, 14.0, 384).unwrap()).unwrap();
        let af = check_affine_gn(&f, &params, &quad, k).unwrap();
        let eu = check_euclidean_gn(&f, &params, k).unwrap();
        assert!((af.ratio - 1.0).abs() < 2e-2, "{}", af.ratio);
        assert!(eu.ratio < 0.98, "{}", eu.ratio);
    }

    #[test]
    fn log_sobolev_extremal_and_bump() {
        let quad = SphericalQuadrature::new(3, 400).unwrap();
        let ext = ExtremalSpec::log_sobolev(3, 2.0, 1.0).unwrap();
        let half = ext.auto_half_width(2.0, 64).unwrap();
        let f = ext.sample(GridSpec::new(3, half, 64).unwrap()).unwrap();
        let r = check_log_sobolev(&f, 3, 2.0, &quad).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-2, "{} vs {}", r.lhs, r.rhs);
        let spec = GridSpec::new(3, 4.0, 48).unwrap();
        let b = GridFunction::sample(spec, |x| {
            let r2: f64 = x.iter().map(|t| t * t).sum();
            (1.0 - r2 / 9.0).max(0.0).powi(3)
        })
        .unwrap();
        let r = check_log_sobolev(&b, 3, 2.0, &quad).unwrap();
        assert!(r.slack > 1e-3 && r.lhs < r.rhs);
    }

    #[test]
    fn morrey_extremal_is_sharp() {
        // the cusp at the centre must sit on a cell centre for max|f| to be 1
        let spec = GridSpec::new(2, 1.25, 512).unwrap();
        let c = spec.coordinate(256);
        let ext = ExtremalSpec::morrey(2, 3.0).unwrap().with_center(vec![c, c]).unwrap();
        let f = ext.sample(spec).unwrap();
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let r = check_morrey_sobolev(&f, 2, 3.0, &quad, true).unwrap();
        assert!((r.ratio - 1.0).abs() < 2e-2, "{}", r.ratio);
        assert!(check_morrey_sobolev(&f, 2, 2.0, &quad, true).is_err());
    }

    #[test]
    fn moser_profile_grows_with_truncation_level() {
        let spec = GridSpec::new(2, 1.5, 256).unwrap();
        let quad = SphericalQuadrature::new(2, 256).unwrap();
        let lhs = |eps: f64| {
            let f = GridFunction::sample(spec, |x| {
                let r = x[0].hypot(x[1]);
                if r >= 1.0 {
                    0.0
                } else {
                    (1.0 / r.max(eps)).ln()
                }
            })
            .unwrap();
            let rep = check_moser_trudinger(&f, 2, &quad, 1.0, true).unwrap();
            assert!((rep.parameters["affine_lhs"] / rep.parameters["euclidean_lhs"] - 1.0).abs() < 1e-3);
            rep.lhs
        };
        let (a, b) = (lhs(0.5), lhs(0.1));
        assert!(a.is_finite() && b > a, "{a} {b}");
    }

    #[test]
    fn out_of_regime_calls_are_refused() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let f = bump(spec);
        let quad = SphericalQuadrature::new(2, 64).unwrap();
        assert!(check_affine_sobolev(&f, 2, 2.5, &quad).is_err());
        assert!(check_log_sobolev(&f, 2, 2.0, &quad).is_err());
        assert!(check_moser_trudinger(&f, 2, &quad, -1.0, true).is_err());
        let zero = GridFunction::zeros(spec);
        assert!(matches!(
            check_moser_trudinger(&zero, 2, &quad, 1.0, true),
            Err(Error::DegenerateInput(_))
        ));
        let q3 = SphericalQuadrature::new(3, 64).unwrap();
        assert!(check_affine_sobolev(&f, 2, 1.5, &q3).is_err());
    }
}
