//! Small numerical helpers: deterministic reductions, fast `|x|^p`, and
//! one-dimensional adaptive quadrature.

use rayon::prelude::*;

/// Chunk length for parallel reductions. Fixed so that partial sums (and
/// therefore the final result) do not depend on the number of threads.
const CHUNK: usize = 4096;

/// Compensated (Neumaier) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sum `term(i)` for `i in 0..len`, bit-identical for any thread count.
pub fn det_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            (lo..hi).map(&term).collect::<KahanSum>().value()
        })
        .collect();
    partials.into_iter().collect::<KahanSum>().value()
}

/// `|x|^p` with exact shortcuts for the exponents that dominate this crate
/// (integers and half-integers up to 4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AbsPow {
    One,
    Two,
    Three,
    Four,
    OneHalf,
    ThreeHalves,
    FiveHalves,
    General(f64),
}

impl AbsPow {
    pub fn new(p: f64) -> Self {
        match p {
            _ if p == 1.0 => AbsPow::One,
            _ if p == 2.0 => AbsPow::Two,
            _ if p == 3.0 => AbsPow::Three,
            _ if p == 4.0 => AbsPow::Four,
            _ if p == 0.5 => AbsPow::OneHalf,
            _ if p == 1.5 => AbsPow::ThreeHalves,
            _ if p == 2.5 => AbsPow::FiveHalves,
            _ => AbsPow::General(p),
        }
    }

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            AbsPow::One => a,
            AbsPow::Two => a * a,
            AbsPow::Three => a * a * a,
            AbsPow::Four => {
                let s = a * a;
                s * s
            }
            AbsPow::OneHalf => a.sqrt(),
            AbsPow::ThreeHalves => a * a.sqrt(),
            AbsPow::FiveHalves => a * a * a.sqrt(),
            AbsPow::General(p) => a.powf(p),
        }
    }

    /// `(x²)^{p/2}` evaluated from a squared magnitude.
    #[inline]
    pub fn eval_sq(self, sq: f64) -> f64 {
        match self {
            AbsPow::Two => sq,
            AbsPow::Four => sq * sq,
            AbsPow::One => sq.sqrt(),
            AbsPow::Three => sq * sq.sqrt(),
            AbsPow::General(p) => sq.powf(0.5 * p),
            other => other.eval(sq.sqrt()),
        }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫_0^∞ f(r) dr` via the map `r = u / (1 - u)`, split at `u = 1/2`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let r = u / one_minus;
        let v = f(r) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    adaptive_simpson(g, 0.0, 0.5, 0.5 * tol) + adaptive_simpson(g, 0.5, 1.0, 0.5 * tol)
}
