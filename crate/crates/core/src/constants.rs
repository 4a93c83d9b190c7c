//! Closed-form sharp constants and the exponents that go with them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::numeric::adaptive_simpson;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1
    let mut a = LANCZOS[0];
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    a
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma needs x > 0, got {x}")));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return PI / ((PI * x).sin() * gamma_positive(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Volume of the unit ball in ℝᵗ, continued to real `t ≥ 0`:
/// `π^{t/2} / Γ(t/2 + 1)`.
pub fn omega(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return param(format!("omega needs t >= 0, got {t}"));
    }
    Ok(PI.powf(0.5 * t) / gamma_positive(0.5 * t + 1.0))
}

/// Normalising constant of the affine energy,
/// `(n ω_n ω_{p-1} / (2 ω_{n+p-2}))^{1/p} (n ω_n)^{1/n}`.
pub fn c_np(n: usize, p: f64) -> Result<f64> {
    if n < 1 {
        return param("c_np needs n >= 1");
    }
    if !(p >= 1.0) || !p.is_finite() {
        return param(format!("c_np needs p >= 1, got {p}"));
    }
    let nf = n as f64;
    let wn = omega(nf)?;
    let inner = nf * wn * omega(p - 1.0)? / (2.0 * omega(nf + p - 2.0)?);
    Ok(inner.powf(1.0 / p) * (nf * wn).powf(1.0 / nf))
}

/// Exponents `1 < p < n`, `1 ≤ q < s < np/(n−p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GNParameters {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

impl GNParameters {
    pub fn new(n: usize, p: f64, q: f64, s: f64) -> Result<Self> {
        if n < 2 {
            return param(format!("need n > 1, got {n}"));
        }
        let nf = n as f64;
        if !(p > 1.0 && p < nf) {
            return param(format!("need 1 < p < n, got p = {p}, n = {n}"));
        }
        if !(q >= 1.0) || !q.is_finite() {
            return param(format!("need q >= 1, got {q}"));
        }
        let crit = critical_exponent(n, p);
        if !(s > q && s < crit) {
            return param(format!(
                "need q < s < np/(n-p) = {crit}, got q = {q}, s = {s}"
            ));
        }
        Ok(GNParameters { n, p, q, s })
    }

    /// Parameters of the closed-form family: `s = p(q−1)/(p−1)` with `q > p`.
    pub fn closed_form(n: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(n, p, q, p * (q - 1.0) / (p - 1.0))
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `np − q(n−p)`.
    pub fn delta(&self) -> f64 {
        let n = self.nf();
        n * self.p - self.q * (n - self.p)
    }
}

/// Critical Sobolev exponent `p* = np/(n−p)`.
pub fn critical_exponent(n: usize, p: f64) -> f64 {
    let n = n as f64;
    n * p / (n - p)
}

/// Interpolation exponent `θ = np(s−q) / (s[np − q(n−p)])`.
pub fn theta_gn(params: &GNParameters) -> f64 {
    let GNParameters { p, q, s, .. } = *params;
    let n = params.nf();
    n * p * (s - q) / (s * params.delta())
}

/// `(α, β, C)` with `α = np − s(n−p)`, `β = n(s−q)` and
/// `C = (α+β) / ((qα)^{α/(α+β)} (pβ)^{β/(α+β)})`.
pub fn c_of_npqs(params: &GNParameters) -> Result<(f64, f64, f64)> {
    let GNParameters { p, q, s, .. } = *params;
    let n = params.nf();
    let alpha = n * p - s * (n - p);
    let beta = n * (s - q);
    if !(alpha > 0.0 && beta > 0.0) {
        return param(format!("need alpha > 0 and beta > 0, got {alpha}, {beta}"));
    }
    let sum = alpha + beta;
    let c = sum / ((q * alpha).powf(alpha / sum) * (p * beta).powf(beta / sum));
    Ok((alpha, beta, c))
}

/// Exponent of `C / E(u_∞)` in the sharp constant:
/// `(np + ps − nq) / (s[np − q(n−p)])`.
pub fn k_opt_exponent(params: &GNParameters) -> f64 {
    let GNParameters { p, q, s, .. } = *params;
    let n = params.nf();
    (n * p + p * s - n * q) / (s * params.delta())
}

/// Sharp GN constant from the minimum energy of the constrained problem.
pub fn k_opt_from_energy(params: &GNParameters, energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return param(format!("minimum energy must be positive, got {energy}"));
    }
    let (_, _, c) = c_of_npqs(params)?;
    Ok((c / energy).powf(k_opt_exponent(params)))
}

fn check_p_below_n(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 2 || !(p > 1.0 && p < nf) {
        return param(format!("need 1 < p < n, got p = {p}, n = {n}"));
    }
    Ok(nf)
}

/// θ of the closed-form superquadratic family, `(q−p)n / ((q−1)(np − (n−p)q))`.
pub fn theta_c2(n: usize, p: f64, q: f64) -> f64 {
    let n = n as f64;
    (q - p) * n / ((q - 1.0) * (n * p - (n - p) * q))
}

/// Sharp constant for `‖f‖_s ≤ C₂ 𝓔_p(f)^θ ‖f‖_q^{1−θ}`,
/// `p < q ≤ p(n−1)/(n−p)`, `s = p(q−1)/(p−1)`.
pub fn c2(n: usize, p: f64, q: f64) -> Result<f64> {
    let nf = check_p_below_n(n, p)?;
    let q_max = p * (nf - 1.0) / (nf - p);
    if !(q > p && q <= q_max * (1.0 + 1e-15)) {
        return param(format!("need p < q <= p(n-1)/(n-p) = {q_max}, got q = {q}"));
    }
    let s = p * (q - 1.0) / (p - 1.0);
    let theta = theta_c2(n, p, q);
    let delta = nf * p - q * (nf - p);
    let gammas = gamma(q * (p - 1.0) / (q - p))? * gamma(nf / 2.0 + 1.0)?
        / (gamma((p - 1.0) / p * delta / (q - p))? * gamma(nf * (p - 1.0) / p + 1.0)?);
    Ok(((q - p) / (p * PI.sqrt())).powf(theta)
        * (p * q / (nf * (q - p))).powf(theta / p)
        * (delta / (p * q)).powf(1.0 / s)
        * gammas.powf(theta / nf))
}

/// θ of the compactly supported family,
/// `(p−q)n / (q(n(p−q) + p(q−1)))`, the value that balances the two sides
/// under dilation.
pub fn theta_c3(n: usize, p: f64, q: f64) -> f64 {
    let n = n as f64;
    (p - q) * n / (q * (n * (p - q) + p * (q - 1.0)))
}

/// Sharp constant for `‖f‖_q ≤ C₃ 𝓔_p(f)^θ ‖f‖_r^{1−θ}`, `1 < q < p`,
/// `r = p(q−1)/(p−1)`.
pub fn c3(n: usize, p: f64, q: f64) -> Result<f64> {
    let nf = check_p_below_n(n, p)?;
    if !(q > 1.0 && q < p) {
        return param(format!("need 1 < q < p, got q = {q}, p = {p}"));
    }
    let delta = nf * p - q * (nf - p);
    if !(delta > 0.0) {
        return param(format!("need np - q(n-p) > 0, got {delta}"));
    }
    let r = p * (q - 1.0) / (p - 1.0);
    let theta = theta_c3(n, p, q);
    let gammas = gamma((p - 1.0) / p * delta / (p - q) + 1.0)? * gamma(nf / 2.0 + 1.0)?
        / (gamma(q * (p - 1.0) / (p - q) + 1.0)? * gamma(nf * (p - 1.0) / p + 1.0)?);
    Ok(((p - q) / (p * PI.sqrt())).powf(theta)
        * (p * q / (nf * (p - q))).powf(theta / p)
        * (p * q / delta).powf((1.0 - theta) / r)
        * gammas.powf(theta / nf))
}

/// Sharp log-Sobolev constant
/// `(p/n) ((p−1)/e)^{p−1} π^{−p/2} [Γ(n/2+1) / Γ(n(p−1)/p + 1)]^{p/n}`.
pub fn c4(n: usize, p: f64) -> Result<f64> {
    let nf = check_p_below_n(n, p)?;
    let ratio = gamma(nf / 2.0 + 1.0)? / gamma(nf * (p - 1.0) / p + 1.0)?;
    Ok(p / nf
        * ((p - 1.0) / std::f64::consts::E).powf(p - 1.0)
        * PI.powf(-p / 2.0)
        * ratio.powf(p / nf))
}

/// Sharp affine Sobolev constant in `C ‖f‖_{p*} ≤ 𝓔_p(f)`: the reciprocal of
/// `C₂` at the endpoint `q = p(n−1)/(n−p)` where `θ = 1`.
pub fn affine_sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = check_p_below_n(n, p)?;
    Ok(1.0 / c2(n, p, p * (nf - 1.0) / (nf - p))?)
}

/// `‖f‖_∞ / (|supp f|^{1/n−1/p} ‖∇f‖_p)` for the radial profile
/// `(1 − (|x|/R)^{(p−n)/(p−1)})₊`, by one-dimensional quadrature.
pub fn morrey_radial_ratio(n: usize, p: f64, radius: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 1 || !(p > nf) || !p.is_finite() {
        return param(format!("Morrey regime needs p > n, got p = {p}, n = {n}"));
    }
    if !(radius > 0.0) {
        return param(format!("radius must be positive, got {radius}"));
    }
    let gamma_exp = (p - nf) / (p - 1.0);
    // |f'(r)|^p r^{n-1} ~ r^{-a}; r = R t^m with m = 1/(1-a) removes the
    // endpoint singularity at r = 0.
    let a = (nf - 1.0) / (p - 1.0);
    let m = 1.0 / (1.0 - a);
    let integrand = |t: f64| {
        if t <= 0.0 {
            // limit of the substituted integrand
            return m * gamma_exp.powf(p) * radius.powf(nf - p);
        }
        let r = radius * t.powf(m);
        let dfdr = gamma_exp / radius * (r / radius).powf(gamma_exp - 1.0);
        dfdr.powf(p) * r.powf(nf - 1.0) * radius * m * t.powf(m - 1.0)
    };
    let radial = adaptive_simpson(integrand, 0.0, 1.0, 1e-13);
    let wn = omega(nf)?;
    let grad = (nf * wn * radial).powf(1.0 / p);
    let support = wn * radius.powf(nf);
    Ok(1.0 / (support.powf(1.0 / nf - 1.0 / p) * grad))
}

/// Sharp Morrey–Sobolev constant `b_{n,p}`, realised as the ratio attained
/// by the radial extremal.
pub fn b_np(n: usize, p: f64) -> Result<f64> {
    morrey_radial_ratio(n, p, 1.0)
}

/// Every constant that applies to a parameter choice; inapplicable ones are
/// `None` and left out of the JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpConstantSet {
    pub n: usize,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(rename = "C_npqs", skip_serializing_if = "Option::is_none", default)]
    pub c_npqs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_opt_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b_np: Option<f64>,
    pub c_np: f64,
    pub omega_n: f64,
}

impl SharpConstantSet {
    /// When `q > p` is given without `s`, `s` defaults to `p(q−1)/(p−1)`.
    pub fn compute(n: usize, p: f64, q: Option<f64>, s: Option<f64>) -> Result<Self> {
        if n < 1 {
            return param("need n >= 1");
        }
        let nf = n as f64;
        if !(p >= 1.0) || !p.is_finite() {
            return param(format!("need p >= 1, got {p}"));
        }
        if s.is_some() && q.is_none() {
            return param("s given without q");
        }
        let mut set = SharpConstantSet {
            n,
            p,
            q,
            s,
            theta: None,
            alpha: None,
            beta: None,
            c_npqs: None,
            k_opt_exponent: None,
            delta: None,
            c2: None,
            c3: None,
            c4: None,
            b_np: None,
            c_np: c_np(n, p)?,
            omega_n: omega(nf)?,
        };
        if p > nf {
            if q.is_some() {
                return param("q and s apply only when 1 < p < n");
            }
            set.b_np = Some(b_np(n, p)?);
            return Ok(set);
        }
        if !(p > 1.0 && p < nf) {
            if q.is_some() {
                return param(format!("q and s need 1 < p < n, got p = {p}, n = {n}"));
            }
            return Ok(set);
        }
        set.c4 = Some(c4(n, p)?);
        let Some(q) = q else {
            return Ok(set);
        };
        set.delta = Some(nf * p - q * (nf - p));
        if q > p {
            set.c2 = c2(n, p, q).ok();
        } else if q > 1.0 && q < p {
            set.c3 = c3(n, p, q).ok();
        }
        let s = match s {
            Some(s) => Some(s),
            None if q > p => Some(p * (q - 1.0) / (p - 1.0)),
            None => None,
        };
        if let Some(s) = s {
            let params = GNParameters::new(n, p, q, s)?;
            let (alpha, beta, c) = c_of_npqs(&params)?;
            set.s = Some(s);
            set.theta = Some(theta_gn(&params));
            set.alpha = Some(alpha);
            set.beta = Some(beta);
            set.c_npqs = Some(c);
            set.k_opt_exponent = Some(k_opt_exponent(&params));
        }
        Ok(set)
    }
}
