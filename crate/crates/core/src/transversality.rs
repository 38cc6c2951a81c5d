//! Bounded-coefficient polynomials and sublevel-set estimates.
//!
//! `F_α` is the family `1 + Σ a_n x^n` with `a_n ∈ [-α, α]`; `r_α(k)` is the
//! smallest positive point where some member vanishes to order `k`. The
//! estimates below bound `Leb{x ∈ I : |p(x)| < ε}` by `C ε^{1/d}` under
//! `(δ, d)`-transversality. That hypothesis comes from a compactness
//! argument and cannot be certified here; it is only tested on grids, and
//! `estimate_delta` is a heuristic.
//!
//! The itinerary polynomial ties this back to the billiard: the signed
//! distance of an H-point to a side line is a polynomial in `λ` whose
//! coefficients are differences of vertices projected on the side normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::symbolic::Itinerary;

/// Real polynomial `a_0 + a_1 x + … + a_n x^n` with a coefficient bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedPoly {
    coeffs: Vec<f64>,
    alpha: f64,
}

impl BoundedPoly {
    /// Takes `alpha` as the largest `|a_i|`, `i >= 1`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let alpha = coeffs.iter().skip(1).fold(0.0_f64, |m, c| m.max(c.abs()));
        Self { coeffs, alpha }
    }

    pub fn with_alpha(coeffs: Vec<f64>, alpha: f64) -> Result<Self> {
        if let Some(i) = coeffs.iter().skip(1).position(|c| c.abs() > alpha) {
            return Err(Error::ParameterOutOfRange(format!(
                "coefficient {} exceeds alpha = {alpha}",
                i + 1
            )));
        }
        Ok(Self { coeffs, alpha })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Degree after dropping zero leading coefficients (0 for constants).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Whether the constant term is 1, as required in `F_α`.
    pub fn in_f_alpha(&self) -> bool {
        self.coeffs.first() == Some(&1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> BoundedPoly {
        BoundedPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// `p(g(t))` for the affine `g` mapping `[-1, 1]` onto `[a, b]`.
    pub fn rescaled(&self, a: f64, b: f64) -> BoundedPoly {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let taylor = taylor_coefficients(&self.coeffs, mid, self.coeffs.len());
        BoundedPoly::new(
            taylor
                .iter()
                .enumerate()
                .map(|(i, &c)| c * half.powi(i as i32))
                .collect(),
        )
    }
}

/// Coefficients of `p(x + t)` in powers of `t`, up to `t^{count-1}`, by
/// repeated synthetic division.
fn taylor_coefficients(coeffs: &[f64], x: f64, count: usize) -> Vec<f64> {
    let mut work = coeffs.to_vec();
    let n = work.len();
    let mut out = Vec::with_capacity(count);
    for m in 0..count.min(n) {
        for i in (m..n - 1).rev() {
            work[i] += x * work[i + 1];
        }
        out.push(work[m]);
    }
    out.resize(count, 0.0);
    out
}

/// `[p(x), p'(x), …, p^{(j)}(x)]`.
pub fn eval_derivatives(p: &BoundedPoly, x: f64, j: usize) -> Vec<f64> {
    let mut factorial = 1.0;
    taylor_coefficients(&p.coeffs, x, j + 1)
        .into_iter()
        .enumerate()
        .map(|(m, t)| {
            if m > 1 {
                factorial *= m as f64;
            }
            t * factorial
        })
        .collect()
}

/// Lower and upper bounds for `r_α(k)`.
pub fn r_alpha_bounds(alpha: f64, k: usize) -> (f64, f64) {
    let k1 = (k + 1) as f64;
    let lower = (1.0 + 1.0 / k1).powf(-0.5) * (alpha * alpha * k1 + 1.0).powf(-1.0 / (2.0 * k1));
    let upper = (1.0 - 1.0 / (k + 2) as f64).powf((alpha / 9.0).min(1.0));
    (lower, upper)
}

/// `r_α(0) = 1 / (1 + α)`.
pub fn r_alpha_zero(alpha: f64) -> f64 {
    1.0 / (1.0 + alpha)
}

/// Whether `|p(x)| < eps` implies `max_{1≤j≤k} |p^{(j)}(x)| ≥ delta`.
pub fn check_hypothesis(p: &BoundedPoly, x: f64, eps: f64, delta: f64, k: usize) -> bool {
    let ders = eval_derivatives(p, x, k);
    ders[0].abs() >= eps || ders[1..].iter().any(|d| d.abs() >= delta)
}

/// `(δ, k)`-transversality at `x`.
pub fn check_delta_k(p: &BoundedPoly, x: f64, delta: f64, k: usize) -> bool {
    check_hypothesis(p, x, delta, delta, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundVariant {
    /// The constant for `[-1, 1]`.
    Unit,
    /// The constant for a sub-interval, via the affine rescaling.
    Rescaled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureBound {
    pub epsilon: f64,
    pub d: usize,
    pub delta: f64,
    pub constant: f64,
    pub bound: f64,
    pub interval: (f64, f64),
    pub degree: usize,
    pub max_abs: f64,
    pub variant: BoundVariant,
}

/// Roots of `f` in `[a, b]` located by sign changes on `cells` equal parts
/// and refined by bisection.
fn bracket_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Vec<f64> {
    let h = (b - a) / cells as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=cells {
        let x1 = if i == cells { b } else { a + h * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(b);
    }
    roots
}

fn root_cells(p: &BoundedPoly) -> usize {
    (200 * (p.degree() + 1)).max(10_000)
}

/// `max_{x∈[a,b]} |p(x)|` from the endpoints and the critical points.
pub fn max_abs_on(p: &BoundedPoly, a: f64, b: f64) -> f64 {
    let dp = p.derivative();
    bracket_roots(|x| dp.eval(x), a, b, root_cells(p))
        .into_iter()
        .chain([a, b])
        .map(|x| p.eval(x).abs())
        .fold(0.0, f64::max)
}

/// `C ε^{1/d}` with the Markov-inequality constant for `[-1, 1]`, or its rescaled
/// version when `[a, b]` is a sub-interval.
pub fn lojasiewicz_bound(
    p: &BoundedPoly,
    d: usize,
    delta: f64,
    epsilon: f64,
    interval: (f64, f64),
) -> Result<MeasureBound> {
    let (a, b) = interval;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    if d == 0 {
        return Err(Error::ParameterOutOfRange("d must be at least 1".into()));
    }
    let unit = a == -1.0 && b == 1.0;
    if !unit && !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "interval must be [-1, 1] or inside [0, 1], got [{a}, {b}]"
        )));
    }
    let degree = p.degree();
    if degree < d {
        return Err(Error::DegreeBelowD { degree, order: d });
    }
    let max_abs = max_abs_on(p, a, b);
    let n = degree as f64;
    let base = 2f64.powi(d as i32 + 3) / (delta * delta)
        * (4.0 * n.powi(2 * (d as i32 + 1)) * max_abs + 1.0);
    let (constant, variant) = if unit {
        (base, BoundVariant::Unit)
    } else {
        ((2.0 / (b - a)).powi(2 * d as i32 - 1) * base, BoundVariant::Rescaled)
    };
    Ok(MeasureBound {
        epsilon,
        d,
        delta,
        constant,
        bound: constant * epsilon.powf(1.0 / d as f64),
        interval,
        degree,
        max_abs,
        variant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMode {
    /// Midpoint rule with this many samples.
    Grid(usize),
    /// Roots of `p ± ε`, then exact sub-interval lengths.
    Roots,
}

pub const DEFAULT_GRID_SAMPLES: usize = 1_000_000;

/// `Leb{x ∈ [a, b] : |p(x)| < ε}`.
pub fn sublevel_measure(p: &BoundedPoly, epsilon: f64, interval: (f64, f64), mode: MeasureMode) -> f64 {
    let (a, b) = interval;
    match mode {
        MeasureMode::Grid(samples) => {
            let h = (b - a) / samples as f64;
            let hits = (0..samples)
                .filter(|&i| p.eval(a + h * (i as f64 + 0.5)).abs() < epsilon)
                .count();
            hits as f64 * h
        }
        MeasureMode::Roots => {
            let cells = root_cells(p);
            let mut cuts = bracket_roots(|x| p.eval(x) - epsilon, a, b, cells);
            cuts.extend(bracket_roots(|x| p.eval(x) + epsilon, a, b, cells));
            cuts.push(a);
            cuts.push(b);
            cuts.sort_by(f64::total_cmp);
            cuts.windows(2)
                .filter(|w| w[1] > w[0] && p.eval(0.5 * (w[0] + w[1])).abs() < epsilon)
                .map(|w| w[1] - w[0])
                .sum()
        }
    }
}

/// Smallest `m >= 1` with `1 / (b + τ) > (1 + 1/(m+1))^{1/2} (α²(m+1) + 1)^{1/(2(m+1))}`,
/// i.e. the lower bound for `r_α(m)` exceeds `b + τ`.
pub fn polyestimate_k(alpha: f64, b: f64, tau: f64) -> Result<usize> {
    if !(alpha > 0.0) || !(0.0..1.0).contains(&b) || !(tau > 0.0 && tau < 1.0 - b) {
        return Err(Error::ParameterOutOfRange(format!(
            "need alpha > 0, 0 <= b < 1, 0 < tau < 1 - b; got alpha = {alpha}, b = {b}, tau = {tau}"
        )));
    }
    const CAP: usize = 1_000_000;
    (1..=CAP)
        .find(|&m| r_alpha_bounds(alpha, m).0 > b + tau)
        .ok_or(Error::NotFoundWithinCap(CAP))
}

/// `τ = min(1 - b, r_α(1) - r_α(0)) / 2`, with the lower bound standing in
/// for `r_α(1)`; `(1 - b) / 2` when that bound does not exceed `r_α(0)`.
pub fn default_tau(alpha: f64, b: f64) -> f64 {
    let gap = r_alpha_bounds(alpha, 1).0 - r_alpha_zero(alpha);
    if gap > 0.0 {
        (1.0 - b).min(gap) / 2.0
    } else {
        (1.0 - b) / 2.0
    }
}

/// Signed distance of an H-point to a side line as a polynomial in `-λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItineraryPolynomial {
    /// `c_0..c_n`; the value is `Σ c_ℓ (-λ)^ℓ`.
    pub coeffs: Vec<f64>,
    pub side: usize,
}

impl ItineraryPolynomial {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * -lambda + c)
    }

    /// The same polynomial in powers of `λ`.
    pub fn to_bounded_poly(&self) -> BoundedPoly {
        BoundedPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(l, &c)| if l % 2 == 0 { c } else { -c })
                .collect(),
        )
    }
}

/// Coefficients of `⟨H(ī) - v_j, η_j⟩` for `ī = (i_0, …, i_{n-1})`.
pub fn itinerary_polynomial(poly: &ConvexPolygon, itinerary: &Itinerary, side: usize) -> ItineraryPolynomial {
    let eta = poly.support_line(side).normal;
    let proj = |k: usize| poly.vertex(k).dot(&eta);
    let syms: Vec<usize> = itinerary.iter().collect();
    let n = syms.len();
    assert!(n >= 1, "itinerary must be nonempty");
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(proj(syms[n - 1]) - proj(side));
    for l in 1..n {
        coeffs.push((poly.vertex(syms[n - l - 1]) - poly.vertex(syms[n - l])).dot(&eta));
    }
    coeffs.push(-proj(syms[0]));
    ItineraryPolynomial {
        coeffs,
        side: side % poly.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingFactor {
    pub ell: usize,
    pub c_ell: f64,
    /// `ĥ` in powers of `λ`, with `ĥ(0) = 1`.
    pub hat: BoundedPoly,
}

/// `h(λ) = c_ℓ (-λ)^ℓ ĥ(λ)` for the smallest `ℓ <= n_max` with `|c_ℓ| >= τ`.
/// Smaller coefficients are taken to vanish. The bound carried by `ĥ` is
/// `max |c_m| / τ`.
pub fn factor_leading(cs: &[f64], n_max: usize, tau: f64) -> Result<LeadingFactor> {
    let ell = cs
        .iter()
        .take(n_max + 1)
        .position(|c| c.abs() >= tau)
        .ok_or(Error::AllLeadingCoefficientsBelowThreshold(n_max))?;
    let c_ell = cs[ell];
    let hat: Vec<f64> = cs[ell..]
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c / c_ell } else { -c / c_ell })
        .collect();
    let alpha = cs.iter().fold(0.0_f64, |m, c| m.max(c.abs())) / tau;
    Ok(LeadingFactor {
        ell,
        c_ell,
        hat: BoundedPoly::with_alpha(hat, alpha)?,
    })
}

/// Smallest nonzero `|⟨v_a - v_b, η_j⟩|`: any nonzero itinerary coefficient
/// `c_ℓ`, `ℓ < n`, is at least this large.
pub fn coefficient_gap(poly: &ConvexPolygon) -> f64 {
    let d = poly.len();
    let tol = poly.tolerance();
    let mut gap = f64::INFINITY;
    for j in 0..d {
        let eta = poly.support_line(j).normal;
        for a in 0..d {
            for b in 0..d {
                let c = (poly.vertex(a) - poly.vertex(b)).dot(&eta).abs();
                if c > tol {
                    gap = gap.min(c);
                }
            }
        }
    }
    gap
}

/// Draws `1 + Σ a_i x^i` with `a_i` uniform in `[-α, α]`.
pub fn random_f_alpha(rng: &mut impl Rng, alpha: f64, degree: usize) -> BoundedPoly {
    let mut coeffs = vec![1.0];
    coeffs.extend((0..degree).map(|_| rng.gen_range(-alpha..=alpha)));
    BoundedPoly { coeffs, alpha }
}

/// Empirical `(δ, k)`-transversality constant: the minimum over random
/// `F_α` polynomials and a grid on `[0, lower(α, k) - τ]` of
/// `max(|p|, max_{1≤j≤k} |p^{(j)}|)`, capped below 1. Heuristic.
pub fn estimate_delta(alpha: f64, k: usize, tau: f64, degree: usize, samples: usize, grid: usize, seed: u64) -> f64 {
    let end = r_alpha_bounds(alpha, k).0 - tau;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.99_f64;
    if end <= 0.0 {
        return best;
    }
    for _ in 0..samples {
        let p = random_f_alpha(&mut rng, alpha, degree);
        for i in 0..=grid {
            let x = end * i as f64 / grid as f64;
            let ders = eval_derivatives(&p, x, k);
            let v = ders.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
            best = best.min(v);
        }
    }
    best
}
