//! Closed-form extremals of the sharp inequalities, as pointwise rules of
//! `|A(x − x̄)|`.

use serde::{Deserialize, Serialize};

use crate::constants::{gamma, omega};
use crate::error::{param, Result};
use crate::grid::{AffineMap, GridFunction, GridSpec};
use crate::numeric::{adaptive_simpson, integrate_half_line};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `α(1 + β|y|^{p/(p−1)})^{−(p−1)/(q−p)}`, `p < q ≤ p(n−1)/(n−p)`.
    GnSuperquadratic,
    /// `α(1 − β|y|^{p/(p−1)})₊^{−(p−1)/(q−p)}`, `1 < q < p`.
    GnCompact,
    /// `α K e^{−|y|^{p/(p−1)}/σ}` with `K` the `L^p` normaliser.
    LogSobolev,
    /// `α(1 − |y|^{(p−n)/(p−1)})₊`, `p > n`.
    Morrey,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::GnSuperquadratic,
        Family::GnCompact,
        Family::LogSobolev,
        Family::Morrey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::GnSuperquadratic => "gn_superquadratic",
            Family::GnCompact => "gn_compact",
            Family::LogSobolev => "log_sobolev",
            Family::Morrey => "morrey",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .map_or_else(|| param(format!("unknown extremal family {name:?}")), Ok)
    }

    pub fn has_compact_support(self) -> bool {
        matches!(self, Family::GnCompact | Family::Morrey)
    }
}

/// One member of an extremal family. The map's shift is the centre `x̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    family: Family,
    n: usize,
    p: f64,
    q: Option<f64>,
    amplitude: f64,
    /// `β` for the GN families, `σ` for log-Sobolev; unused by Morrey.
    shape: f64,
    map: AffineMap,
    /// Precomputed prefactor (normaliser times amplitude).
    scale: f64,
}

impl ExtremalSpec {
    /// Amplitude 1, shape 1, `A = I`, centred at the origin.
    pub fn new(family: Family, n: usize, p: f64, q: Option<f64>) -> Result<Self> {
        let mut spec = ExtremalSpec {
            family,
            n,
            p,
            q,
            amplitude: 1.0,
            shape: 1.0,
            map: AffineMap::identity(n.max(1)),
            scale: 1.0,
        };
        spec.validate()?;
        spec.refresh_scale()?;
        Ok(spec)
    }

    pub fn gn_superquadratic(n: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(Family::GnSuperquadratic, n, p, Some(q))
    }

    pub fn gn_compact(n: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(Family::GnCompact, n, p, Some(q))
    }

    pub fn log_sobolev(n: usize, p: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::LogSobolev, n, p, None)?.with_shape(sigma)
    }

    pub fn morrey(n: usize, p: f64) -> Result<Self> {
        Self::new(Family::Morrey, n, p, None)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Result<Self> {
        if amplitude == 0.0 || !amplitude.is_finite() {
            return param(format!("amplitude must be finite and nonzero, got {amplitude}"));
        }
        self.amplitude = amplitude;
        self.refresh_scale()?;
        Ok(self)
    }

    pub fn with_shape(mut self, shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return param(format!("shape parameter must be positive, got {shape}"));
        }
        self.shape = shape;
        self.refresh_scale()?;
        Ok(self)
    }

    /// Replaces `A` and `x̄` together.
    pub fn with_map(mut self, map: AffineMap) -> Result<Self> {
        if map.dim() != self.n {
            return param(format!(
                "affine map of dimension {} for an extremal in dimension {}",
                map.dim(),
                self.n
            ));
        }
        self.map = map;
        Ok(self)
    }

    pub fn with_center(self, center: Vec<f64>) -> Result<Self> {
        let map = self.map.clone().with_shift(center)?;
        self.with_map(map)
    }

    fn validate(&self) -> Result<()> {
        let nf = self.n as f64;
        let p = self.p;
        if self.n < 1 || !p.is_finite() {
            return param("need n >= 1 and finite p");
        }
        match self.family {
            Family::GnSuperquadratic | Family::GnCompact | Family::LogSobolev => {
                if self.n < 2 || !(p > 1.0 && p < nf) {
                    return param(format!("need 1 < p < n, got p = {p}, n = {}", self.n));
                }
            }
            Family::Morrey => {
                if !(p > nf) {
                    return param(format!("Morrey extremal needs p > n, got p = {p}, n = {}", self.n));
                }
            }
        }
        match (self.family, self.q) {
            (Family::GnSuperquadratic, Some(q)) => {
                let q_max = p * (nf - 1.0) / (nf - p);
                if !(q > p && q <= q_max * (1.0 + 1e-15)) {
                    return param(format!("need p < q <= p(n-1)/(n-p) = {q_max}, got q = {q}"));
                }
            }
            (Family::GnCompact, Some(q)) => {
                if !(q > 1.0 && q < p) {
                    return param(format!("need 1 < q < p, got q = {q}"));
                }
            }
            (Family::GnSuperquadratic | Family::GnCompact, None) => {
                return param("GN extremals need q");
            }
            _ => {}
        }
        Ok(())
    }

    fn refresh_scale(&mut self) -> Result<()> {
        self.scale = match self.family {
            Family::LogSobolev => self.amplitude * log_sobolev_normaliser(self.n, self.p, self.shape)?,
            _ => self.amplitude,
        };
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    /// Value as a function of `ρ = |A(x − x̄)|`.
    pub fn radial_profile(&self, rho: f64) -> f64 {
        let p = self.p;
        let conj = p / (p - 1.0);
        match self.family {
            Family::GnSuperquadratic | Family::GnCompact => {
                let q = self.q.expect("validated");
                let base = match self.family {
                    Family::GnSuperquadratic => 1.0 + self.shape * rho.powf(conj),
                    _ => 1.0 - self.shape * rho.powf(conj),
                };
                if base <= 0.0 {
                    0.0
                } else {
                    self.scale * base.powf(-(p - 1.0) / (q - p))
                }
            }
            Family::LogSobolev => self.scale * (-rho.powf(conj) / self.shape).exp(),
            Family::Morrey => {
                let g = (p - self.n as f64) / (p - 1.0);
                self.scale * (1.0 - rho.powf(g)).max(0.0)
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial_profile(self.map.image_norm(x))
    }

    pub fn sample(&self, spec: GridSpec) -> Result<GridFunction> {
        if spec.dim() != self.n {
            return param(format!(
                "{}-dimensional extremal sampled on a {}-dimensional grid",
                self.n,
                spec.dim()
            ));
        }
        GridFunction::sample(spec, |x| self.eval(x))
    }

    /// Radius `ρ` of the support in the `|A(x − x̄)|` variable, if compact.
    pub fn support_radius(&self) -> Option<f64> {
        match self.family {
            Family::GnCompact => Some(self.shape.powf(-(self.p - 1.0) / self.p)),
            Family::Morrey => Some(1.0),
            _ => None,
        }
    }

    /// `|{f ≠ 0}|` in closed form for the compact families.
    pub fn support_measure(&self) -> Option<f64> {
        let r = self.support_radius()?;
        let nf = self.n as f64;
        Some(omega(nf).ok()? * r.powf(nf) / self.map.det().abs())
    }

    /// Radius in the `|A(x − x̄)|` variable beyond which the profile carries
    /// less than `tail` of its `∫ |f|^t`.
    pub fn mass_radius(&self, t: f64, tail: f64) -> Result<f64> {
        if let Some(r) = self.support_radius() {
            return Ok(r);
        }
        if !(t > 0.0) || !(tail > 0.0 && tail < 1.0) {
            return param("need t > 0 and 0 < tail < 1");
        }
        let nf = self.n as f64;
        let density = |r: f64| self.radial_profile(r).abs().powf(t) * r.powf(nf - 1.0);
        let total = integrate_half_line(density, 1e-14);
        let inside = |r: f64| adaptive_simpson(density, 0.0, r, 1e-15);
        let (mut lo, mut hi) = (0.0, 1.0);
        while total - inside(hi) > tail * total {
            lo = hi;
            hi *= 2.0;
            if hi > 1e8 {
                return param("profile mass does not concentrate; pick the box by hand");
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if total - inside(mid) > tail * total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Half-width of a box that contains the support, or the radius holding
    /// all but `1e−6` of the `t`-mass, with a margin of a few cells.
    pub fn auto_half_width(&self, t: f64, points_per_axis: usize) -> Result<f64> {
        let rho = self.mass_radius(t, 1e-6)?;
        let centre = self.map.shift().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let reach = rho * self.map.inverse_norm() + centre;
        // keep the support off the boundary layer and its neighbour
        let cells = 4.0;
        Ok(reach * points_per_axis as f64 / (points_per_axis as f64 - 2.0 * cells))
    }
}

/// `K^{1/p}` with `K⁻¹ = ∫ e^{−p|x|^{p/(p−1)}/σ} dx`
/// `= π^{n/2} (σ/p)^{n(p−1)/p} Γ(n(p−1)/p + 1) / Γ(n/2 + 1)`.
pub fn log_sobolev_normaliser(n: usize, p: f64, sigma: f64) -> Result<f64> {
    let nf = n as f64;
    let k = nf * (p - 1.0) / p;
    let inv = std::f64::consts::PI.powf(nf / 2.0) * (sigma / p).powf(k) * gamma(k + 1.0)?
        / gamma(nf / 2.0 + 1.0)?;
    Ok(inv.powf(-1.0 / p))
}
