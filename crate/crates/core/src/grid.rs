//! Functions on ℝⁿ sampled at cell centres of a uniform grid over `[-L, L]ⁿ`.
//!
//! Every [`GridFunction`] vanishes on the outermost layer of cells, so it is a
//! compactly supported function inside the box and all integrals over ℝⁿ are
//! midpoint-rule sums over the box.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::numeric::{det_sum, AbsPow};

/// Largest number of cells a grid may hold.
const MAX_CELLS: usize = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return param("grid dimension must be at least 1");
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return param(format!("half width must be positive, got {half_width}"));
        }
        if points_per_axis < 8 || !points_per_axis.is_multiple_of(2) {
            return param(format!(
                "points per axis must be even and at least 8, got {points_per_axis}"
            ));
        }
        let cells = (points_per_axis as u128).checked_pow(dim as u32);
        if cells.is_none_or(|c| c > MAX_CELLS as u128) {
            return param(format!("grid {points_per_axis}^{dim} is too large"));
        }
        Ok(GridSpec {
            dim,
            half_width,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Cell width `h = 2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-index stride of `axis` (row-major, last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    /// Coordinate of the centre of cell `i` along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * (i as f64 + 0.5)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        self.fill_multi_index(flat, &mut idx);
        idx
    }

    fn fill_multi_index(&self, mut flat: usize, idx: &mut [usize]) {
        let n = self.points_per_axis;
        for k in (0..self.dim).rev() {
            idx[k] = flat % n;
            flat /= n;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Writes the centre of cell `flat` into `out`.
    pub fn cell_center(&self, flat: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for k in (0..self.dim).rev() {
            out[k] = self.coordinate(rest % n);
            rest /= n;
        }
    }

    /// True for cells on the outermost layer of the box.
    pub fn is_boundary(&self, flat: usize) -> bool {
        let n = self.points_per_axis;
        let mut rest = flat;
        for _ in 0..self.dim {
            let i = rest % n;
            if i == 0 || i == n - 1 {
                return true;
            }
            rest /= n;
        }
        false
    }

    /// Squared Euclidean norm of the centre of cell `flat`.
    pub fn radius_sq(&self, flat: usize) -> f64 {
        let n = self.points_per_axis;
        let mut rest = flat;
        let mut r2 = 0.0;
        for _ in 0..self.dim {
            let x = self.coordinate(rest % n);
            r2 += x * x;
            rest /= n;
        }
        r2
    }
}

/// Derivative weights, in units of `1/h`, at index `i` of an axis with `n`
/// points: fourth-order central where the five-point stencil fits,
/// second-order central next to the boundary layer, one-sided on it.
pub(crate) fn axis_stencil(i: usize, n: usize) -> &'static [(isize, f64)] {
    const FORWARD: [(isize, f64); 2] = [(0, -1.0), (1, 1.0)];
    const BACKWARD: [(isize, f64); 2] = [(-1, -1.0), (0, 1.0)];
    const CENTRAL2: [(isize, f64); 2] = [(-1, -0.5), (1, 0.5)];
    const CENTRAL4: [(isize, f64); 4] = [
        (-2, 1.0 / 12.0),
        (-1, -8.0 / 12.0),
        (1, 8.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    if i == 0 {
        &FORWARD
    } else if i == n - 1 {
        &BACKWARD
    } else if i == 1 || i == n - 2 {
        &CENTRAL2
    } else {
        &CENTRAL4
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    /// Wraps raw row-major values. Rejects length mismatches and non-finite
    /// entries; the boundary layer is zeroed.
    pub fn from_values(spec: GridSpec, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::MalformedGrid(format!(
                "expected {} values for a {}^{} grid, got {}",
                spec.len(),
                spec.points_per_axis,
                spec.dim,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Construction {
                cell: spec.multi_index(i),
                value: values[i],
            });
        }
        zero_boundary(&spec, &mut values);
        Ok(GridFunction { spec, values })
    }

    /// Evaluates `rule` at every cell centre.
    pub fn sample<F>(spec: GridSpec, rule: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut values = vec![0.0; spec.len()];
        values
            .par_chunks_mut(1024)
            .enumerate()
            .for_each(|(c, chunk)| {
                let mut x = vec![0.0; spec.dim];
                for (j, v) in chunk.iter_mut().enumerate() {
                    let flat = c * 1024 + j;
                    if spec.is_boundary(flat) {
                        *v = 0.0;
                    } else {
                        spec.cell_center(flat, &mut x);
                        *v = rule(&x);
                    }
                }
            });
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Construction {
                cell: spec.multi_index(i),
                value: values[i],
            });
        }
        Ok(GridFunction { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, op: F) -> GridFunction {
        let mut values: Vec<f64> = self.values.iter().map(|&v| op(v)).collect();
        zero_boundary(&self.spec, &mut values);
        GridFunction {
            spec: self.spec,
            values,
        }
    }

    /// `‖f‖_∞`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ |f|^p dx` by the midpoint rule.
    pub fn integral_abs_pow(&self, p: f64) -> f64 {
        let pw = AbsPow::new(p);
        let v = &self.values;
        det_sum(v.len(), |i| pw.eval(v[i])) * self.spec.cell_volume()
    }

    /// `‖f‖_p` for `p ≥ 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return param(format!("L^p norm needs p >= 1, got {p}"));
        }
        Ok(self.integral_abs_pow(p).powf(1.0 / p))
    }

    /// Measure of `{ |f| > threshold }`.
    pub fn support_measure(&self, threshold: f64) -> f64 {
        let count = self.values.iter().filter(|v| v.abs() > threshold).count();
        count as f64 * self.spec.cell_volume()
    }

    /// Finite-difference gradient (see [`axis_stencil`] for the weights).
    pub fn gradient(&self) -> VectorField {
        let spec = self.spec;
        let n = spec.points_per_axis;
        let inv_h = 1.0 / spec.spacing();
        let components = (0..spec.dim)
            .map(|axis| {
                let stride = spec.stride(axis);
                let mut out = vec![0.0; spec.len()];
                out.par_chunks_mut(4096).enumerate().for_each(|(c, chunk)| {
                    for (j, g) in chunk.iter_mut().enumerate() {
                        let flat = c * 4096 + j;
                        let i = (flat / stride) % n;
                        let centre = self.values[flat];
                        let mut acc = 0.0;
                        // weights sum to zero; differencing against the centre
                        // makes constants exact
                        for &(off, w) in axis_stencil(i, n) {
                            let idx = (flat as isize + off * stride as isize) as usize;
                            acc += w * (self.values[idx] - centre);
                        }
                        *g = acc * inv_h;
                    }
                });
                out
            })
            .collect();
        VectorField { spec, components }
    }

    /// Multilinear interpolation at an arbitrary point; zero outside the
    /// span of the cell centres.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let spec = &self.spec;
        let n = spec.points_per_axis;
        let h = spec.spacing();
        let dim = spec.dim;
        let mut base = [0usize; 8];
        let mut frac = [0.0f64; 8];
        debug_assert!(dim <= 8);
        for k in 0..dim {
            let u = (x[k] + spec.half_width) / h - 0.5;
            if !(u >= 0.0 && u <= (n - 1) as f64) {
                return 0.0;
            }
            let i0 = (u.floor() as usize).min(n - 2);
            base[k] = i0;
            frac[k] = u - i0 as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut w = 1.0;
            let mut flat = 0;
            for k in 0..dim {
                let bit = (corner >> (dim - 1 - k)) & 1;
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                flat = flat * n + base[k] + bit;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// `x ↦ f(A(x − x₀))`, resampled on the same grid.
    pub fn apply_affine(&self, map: &AffineMap) -> Result<GridFunction> {
        if map.dim() != self.spec.dim {
            return param(format!(
                "affine map of dimension {} applied to a {}-dimensional grid",
                map.dim(),
                self.spec.dim
            ));
        }
        GridFunction::sample(self.spec, |x| self.interpolate(&map.apply(x)))
    }

    /// `‖f − g‖₂` for functions on the same grid.
    pub fn l2_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.spec != other.spec {
            return param("functions live on different grids");
        }
        let (a, b) = (&self.values, &other.values);
        let s = det_sum(a.len(), |i| {
            let d = a[i] - b[i];
            d * d
        });
        Ok((s * self.spec.cell_volume()).sqrt())
    }

    pub fn to_file(&self) -> GridFile {
        GridFile {
            dim: self.spec.dim,
            half_width: self.spec.half_width,
            points_per_axis: self.spec.points_per_axis,
            order: ROW_MAJOR.to_string(),
            data: self.values.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridFile = serde_json::from_str(text)
            .map_err(|e| Error::MalformedGrid(e.to_string()))?;
        file.into_function()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

fn zero_boundary(spec: &GridSpec, values: &mut [f64]) {
    for (i, v) in values.iter_mut().enumerate() {
        if spec.is_boundary(i) {
            *v = 0.0;
        }
    }
}

const ROW_MAJOR: &str = "row-major";

/// On-disk grid format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFile {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub order: String,
    pub data: Vec<f64>,
}

impl GridFile {
    pub fn into_function(self) -> Result<GridFunction> {
        if self.order != ROW_MAJOR {
            return Err(Error::MalformedGrid(format!(
                "unsupported order {:?}",
                self.order
            )));
        }
        let spec = GridSpec::new(self.dim, self.half_width, self.points_per_axis)
            .map_err(|e| Error::MalformedGrid(e.to_string()))?;
        GridFunction::from_values(spec, self.data)
    }
}

/// A gradient-like field: one component array per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    spec: GridSpec,
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    fn magnitude_sq(&self, i: usize) -> f64 {
        self.components.iter().map(|c| c[i] * c[i]).sum()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.spec.len())
            .map(|i| self.magnitude_sq(i))
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// `∫ |g|^p dx` with `|·|` the Euclidean norm.
    pub fn integral_magnitude_pow(&self, p: f64) -> f64 {
        let pw = AbsPow::new(p);
        det_sum(self.spec.len(), |i| pw.eval_sq(self.magnitude_sq(i))) * self.spec.cell_volume()
    }

    /// `(∫ |v · g|^p dx)^{1/p}`.
    pub fn directional_lp_norm(&self, v: &[f64], p: f64) -> f64 {
        let pw = AbsPow::new(p);
        let comps = &self.components;
        let s = match comps.len() {
            2 => {
                let (a, b) = (&comps[0], &comps[1]);
                det_sum(a.len(), |i| pw.eval(v[0] * a[i] + v[1] * b[i]))
            }
            3 => {
                let (a, b, c) = (&comps[0], &comps[1], &comps[2]);
                det_sum(a.len(), |i| pw.eval(v[0] * a[i] + v[1] * b[i] + v[2] * c[i]))
            }
            _ => det_sum(self.spec.len(), |i| {
                pw.eval(comps.iter().zip(v).map(|(c, vk)| vk * c[i]).sum())
            }),
        };
        (s * self.spec.cell_volume()).powf(1.0 / p)
    }

    /// `G_kl = ∫ g_k g_l dx`; then `‖v · g‖₂² = vᵀ G v`.
    pub fn second_moment(&self) -> Vec<f64> {
        let n = self.components.len();
        let cv = self.spec.cell_volume();
        let mut g = vec![0.0; n * n];
        for k in 0..n {
            for l in k..n {
                let (a, b) = (&self.components[k], &self.components[l]);
                let s = det_sum(a.len(), |i| a[i] * b[i]) * cv;
                g[k * n + l] = s;
                g[l * n + k] = s;
            }
        }
        g
    }
}

/// `x ↦ A(x − x₀)` with `A ∈ GL(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    dim: usize,
    /// Row-major `n × n`.
    matrix: Vec<f64>,
    shift: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let dim = shift.len();
        if dim == 0 || matrix.len() != dim * dim {
            return param(format!(
                "affine map needs an {dim}x{dim} matrix, got {} entries",
                matrix.len()
            ));
        }
        if matrix.iter().chain(&shift).any(|v| !v.is_finite()) {
            return param("affine map entries must be finite");
        }
        let map = AffineMap { dim, matrix, shift };
        let det = map.det();
        if det == 0.0 || !det.is_finite() {
            return param("affine map matrix is singular (det A = 0)");
        }
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for k in 0..dim {
            matrix[k * dim + k] = 1.0;
        }
        AffineMap {
            dim,
            matrix,
            shift: vec![0.0; dim],
        }
    }

    pub fn scaling(dim: usize, lambda: f64) -> Result<Self> {
        let mut m = Self::identity(dim);
        m.matrix.iter_mut().for_each(|a| *a *= lambda);
        Self::new(m.matrix, m.shift)
    }

    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        AffineMap {
            dim: 2,
            matrix: vec![c, -s, s, c],
            shift: vec![0.0; 2],
        }
    }

    /// `[[1, k], [0, 1]]`.
    pub fn shear2(k: f64) -> Self {
        AffineMap {
            dim: 2,
            matrix: vec![1.0, k, 0.0, 1.0],
            shift: vec![0.0; 2],
        }
    }

    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != self.dim {
            return param("shift dimension does not match the matrix");
        }
        self.shift = shift;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn is_identity_matrix(&self) -> bool {
        *self.matrix == *Self::identity(self.dim).matrix
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[r * n..(r + 1) * n];
            *o = row
                .iter()
                .zip(x.iter().zip(&self.shift))
                .map(|(a, (xi, si))| a * (xi - si))
                .sum();
        }
    }

    /// `|A(x − x₀)|` without allocating.
    pub fn image_norm(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut sq = 0.0;
        for r in 0..n {
            let row = &self.matrix[r * n..(r + 1) * n];
            let y: f64 = row
                .iter()
                .zip(x.iter().zip(&self.shift))
                .map(|(a, (xi, si))| a * (xi - si))
                .sum();
            sq += y * y;
        }
        sq.sqrt()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        let mut a = self.matrix.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for row in col + 1..n {
                let f = a[row * n + col] / d;
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
        det
    }

    /// `A⁻¹` (row-major) by Gauss-Jordan elimination.
    pub fn inverse_matrix(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.matrix.clone();
        let mut inv = Self::identity(n).matrix;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
            let d = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= d;
                inv[col * n + k] /= d;
            }
            for row in 0..n {
                if row != col {
                    let f = a[row * n + col];
                    for k in 0..n {
                        a[row * n + k] -= f * a[col * n + k];
                        inv[row * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
        inv
    }

    /// Spectral norm of `A⁻¹`: the largest stretch `|x − x₀| / |A(x − x₀)|`.
    pub fn inverse_norm(&self) -> f64 {
        spectral_norm(&self.inverse_matrix(), self.dim)
    }

    /// Spectral condition number `‖A‖ ‖A⁻¹‖`.
    pub fn condition_number(&self) -> f64 {
        spectral_norm(&self.matrix, self.dim) * self.inverse_norm()
    }
}

fn spectral_norm(m: &[f64], n: usize) -> f64 {
    // Power iteration on MᵀM.
    let mut v = vec![1.0; n];
    let mut sigma_sq = 0.0;
    for _ in 0..200 {
        let mv: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|c| m[r * n + c] * v[c]).sum())
            .collect();
        let w: Vec<f64> = (0..n)
            .map(|c| (0..n).map(|r| m[r * n + c] * mv[r]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        sigma_sq = norm;
        if next.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-15) {
            break;
        }
        v = next;
    }
    sigma_sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(n: usize, l: f64) -> GridSpec {
        GridSpec::new(2, l, n).unwrap()
    }

    #[test]
    fn spec_rejects_odd_or_small_grids() {
        assert!(GridSpec::new(2, 1.0, 7).is_err());
        assert!(GridSpec::new(2, 1.0, 9).is_err());
        assert!(GridSpec::new(2, 1.0, 6).is_err());
        assert!(GridSpec::new(2, -1.0, 16).is_err());
        assert!(GridSpec::new(0, 1.0, 16).is_err());
        let s = spec2(64, 1.0);
        assert!((s.cell_volume() - (2.0f64 / 64.0).powi(2)).abs() < 1e-18);
    }

    #[test]
    fn constant_rule_has_zero_boundary_layer() {
        let s = spec2(64, 1.0);
        let f = GridFunction::sample(s, |_| 1.0).unwrap();
        for (i, &v) in f.values().iter().enumerate() {
            assert_eq!(v, if s.is_boundary(i) { 0.0 } else { 1.0 });
        }
        // interior is (62/64)^2 of the box
        let l2 = f.lp_norm(2.0).unwrap();
        assert!((l2 - 2.0 * 62.0 / 64.0).abs() < 1e-12);
        assert!((f.support_measure(0.0) - 4.0 * (62.0f64 / 64.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_peak_and_odd_symmetry() {
        let s = spec2(64, 6.0);
        let g = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let h = s.spacing();
        let nearest = (-(0.5 * h * h)).exp();
        assert!((g.max_abs() - nearest).abs() < 1e-12);
        assert!(g.max_abs() > 0.98);

        let s = spec2(32, 1.0);
        let f = GridFunction::sample(s, |x| x[0]).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let a = f.values()[s.flat_index(&[i, j])];
                let b = f.values()[s.flat_index(&[31 - i, j])];
                assert!((a + b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn non_finite_rule_names_the_cell() {
        let s = spec2(16, 1.0);
        let err = GridFunction::sample(s, |x| if x[0] > 0.5 && x[1] > 0.5 { f64::NAN } else { 0.0 })
            .unwrap_err();
        match err {
            Error::Construction { cell, value } => {
                assert!(value.is_nan());
                assert_eq!(cell.len(), 2);
                assert!(s.coordinate(cell[0]) > 0.5 && s.coordinate(cell[1]) > 0.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        // ∫ e^{-2|x|²} dx = π/2
        let s = spec2(256, 6.0);
        let g = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((g.lp_norm(2.0).unwrap() - want).abs() < 1e-10);
        assert!(g.lp_norm(0.5).is_err());
    }

    #[test]
    fn disc_indicator_area() {
        let s = spec2(256, 1.5);
        let disc = GridFunction::sample(s, |x| f64::from(x[0] * x[0] + x[1] * x[1] < 1.0)).unwrap();
        let slack = 2.0 * std::f64::consts::PI * s.spacing();
        assert!((disc.lp_norm(1.0).unwrap() - std::f64::consts::PI).abs() < slack);
        assert!((disc.support_measure(0.0) - std::f64::consts::PI).abs() < slack);
        assert_eq!(GridFunction::zeros(s).support_measure(0.0), 0.0);
    }

    #[test]
    fn gradient_of_constant_and_linear() {
        let s = spec2(32, 1.0);
        let c = GridFunction::from_values(s, vec![3.0; s.len()]).unwrap();
        // boundary layer is zeroed, so only cells two away from it see a flat field
        let g = GridFunction::sample(s, |_| 3.0).unwrap().gradient();
        for i in 0..s.len() {
            let idx = s.multi_index(i);
            if idx.iter().all(|&k| (3..29).contains(&k)) {
                assert_eq!(g.component(0)[i], 0.0);
                assert_eq!(g.component(1)[i], 0.0);
            }
        }
        assert!(c.values().contains(&3.0));

        let lin = GridFunction::sample(s, |x| x[0]).unwrap().gradient();
        for i in 0..s.len() {
            let idx = s.multi_index(i);
            if idx.iter().all(|&k| (3..29).contains(&k)) {
                assert!((lin.component(0)[i] - 1.0).abs() < 1e-12);
                assert!(lin.component(1)[i].abs() < 1e-12);
            }
        }
    }

    fn gaussian_gradient_error(n: usize) -> f64 {
        let s = spec2(n, 5.0);
        let f = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let g = f.gradient();
        let mut x = [0.0; 2];
        let mut err: f64 = 0.0;
        for i in 0..s.len() {
            let idx = s.multi_index(i);
            if idx.iter().any(|&k| k < 3 || k > n - 4) {
                continue;
            }
            s.cell_center(i, &mut x);
            let e = (-(x[0] * x[0] + x[1] * x[1])).exp();
            for k in 0..2 {
                err = err.max((g.component(k)[i] + 2.0 * x[k] * e).abs());
            }
        }
        err
    }

    #[test]
    fn gradient_converges_at_least_second_order() {
        let e1 = gaussian_gradient_error(64);
        let e2 = gaussian_gradient_error(128);
        assert!(e1 / e2 >= 3.5, "reduction {}", e1 / e2);
    }

    #[test]
    fn identity_resampling_is_exact() {
        let s = spec2(64, 4.0);
        let f = GridFunction::sample(s, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()).unwrap();
        let g = f.apply_affine(&AffineMap::identity(2)).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn dilation_scales_lp_norm() {
        let s = spec2(256, 6.0);
        let f = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let g = f.apply_affine(&AffineMap::scaling(2, 2.0).unwrap()).unwrap();
        let want = 2.0f64.powf(-2.0 / 2.0) * f.lp_norm(2.0).unwrap();
        let got = g.lp_norm(2.0).unwrap();
        assert!((got - want).abs() / want < 1e-2);
    }

    #[test]
    fn rotated_radial_gaussian_is_unchanged() {
        let s = spec2(256, 6.0);
        let f = GridFunction::sample(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let g = f
            .apply_affine(&AffineMap::rotation2(std::f64::consts::FRAC_PI_4))
            .unwrap();
        let worst = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 2e-3, "max deviation {worst}");
        let (a, b) = (f.lp_norm(2.0).unwrap(), g.lp_norm(2.0).unwrap());
        assert!((a - b).abs() / a < 1e-2);
    }

    #[test]
    fn singular_map_is_rejected() {
        assert!(AffineMap::new(vec![1.0, 2.0, 2.0, 4.0], vec![0.0, 0.0]).is_err());
        let shear = AffineMap::shear2(1.0);
        assert!((shear.det() - 1.0).abs() < 1e-15);
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((shear.condition_number() - golden * golden).abs() < 1e-9);
    }

    #[test]
    fn grid_file_rejects_length_mismatch() {
        let text = r#"{"dim":2,"half_width":1.0,"points_per_axis":8,"order":"row-major","data":[0.0,1.0]}"#;
        assert!(matches!(
            GridFunction::from_json(text),
            Err(Error::MalformedGrid(_))
        ));
        let text = r#"{"dim":2,"half_width":1.0,"points_per_axis":8,"order":"column-major","data":[]}"#;
        assert!(GridFunction::from_json(text).is_err());
    }

    #[test]
    fn grid_file_round_trips() {
        let s = spec2(16, 2.0);
        let f = GridFunction::sample(s, |x| x[0] * x[1] + 0.25).unwrap();
        let back = GridFunction::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, back);
    }
}
