//! Limiting height and range distributions, evaluated in floating point.
//!
//! Heights: `P{(H+1)/√n ≤ t} → C_p · det((-1)^i H_{i+j}(0) - H_{i+j}(t) e^{-t²})`.
//!
//! Ranges: with `S_a(z, w) = Σ_ℓ H_a(ℓz+w) e^{-(ℓz+w)²}` and
//! `T_p(z, w) = det((-1)^i S_{i+j}(z, 0) - S_{i+j}(z, w))`,
//! `P{(R+1)/√n ≤ t} → C_p · ∫_0^t ∂_z T_p(t, w) dw`.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::exact::MelonCounter;
use crate::gauss::normalizer;
use crate::special::{hermite_f64, hermite_zero};
use crate::{MelonConfig, MelonError, Result};

/// Largest `p` accepted by the float determinants.
pub const MAX_LIMIT_WALKERS: usize = 6;

const MAX_SIMPSON_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stat {
    Height,
    Range,
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stat::Height => "height",
            Stat::Range => "range",
        })
    }
}

fn check_p(p: usize) -> Result<f64> {
    if p == 0 {
        return Err(MelonError::InvalidConfig("p must be at least 1".into()));
    }
    if p > MAX_LIMIT_WALKERS {
        return Err(MelonError::Capacity {
            what: "number of walkers in limit laws",
            requested: p,
            limit: MAX_LIMIT_WALKERS,
        });
    }
    Ok(normalizer(p).to_f64().unwrap())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(MelonError::domain(format!("{name} = {v} must be positive and finite")));
    }
    Ok(())
}

fn sign(i: usize) -> f64 {
    if i % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Limiting CDF of `(H+1)/√n`.
pub fn height_limit_cdf(p: usize, t: f64) -> Result<f64> {
    let c = check_p(p)?;
    check_positive("t", t)?;
    let decay = (-t * t).exp();
    let m = DMatrix::from_fn(p, p, |i, j| {
        let d = i + j;
        sign(i) * hermite_zero(d).to_f64().unwrap() - hermite_f64(d, t) * decay
    });
    Ok(c * m.determinant())
}

/// Summation window `ℓ ∈ [lo, hi]` with `|ℓz + w| ≤ √ln(1/ε') + a + 1`,
/// where `ε' = ε·min(z, 1)` pays for the `1/z` density of terms.
fn theta_window(a: usize, z: f64, w: f64, eps: f64) -> (i64, i64) {
    let eps = (eps * z.min(1.0)).max(f64::MIN_POSITIVE);
    let reach = (1.0 / eps).ln().max(0.0).sqrt() + a as f64 + 1.0;
    let lo = ((-reach - w) / z).ceil() as i64;
    let hi = ((reach - w) / z).floor() as i64;
    (lo, hi)
}

/// `Σ_ℓ H_a(ℓz+w) e^{-(ℓz+w)²}` truncated with tail below `eps`.
pub fn theta_sum(a: usize, z: f64, w: f64, eps: f64) -> f64 {
    let (lo, hi) = theta_window(a, z, w, eps);
    (lo..=hi)
        .map(|l| {
            let x = l as f64 * z + w;
            hermite_f64(a, x) * (-x * x).exp()
        })
        .sum()
}

/// `∂/∂z` of [`theta_sum`]: `-Σ_ℓ ℓ·H_{a+1}(ℓz+w) e^{-(ℓz+w)²}`.
pub fn theta_sum_dz(a: usize, z: f64, w: f64, eps: f64) -> f64 {
    let (lo, hi) = theta_window(a + 1, z, w, eps);
    -(lo..=hi)
        .map(|l| {
            let x = l as f64 * z + w;
            l as f64 * hermite_f64(a + 1, x) * (-x * x).exp()
        })
        .sum::<f64>()
}

fn check_zw(z: f64, w: f64) -> Result<()> {
    check_positive("z", z)?;
    if !(0.0..=z).contains(&w) {
        return Err(MelonError::domain(format!("w = {w} must lie in [0, z = {z}]")));
    }
    Ok(())
}

struct ThetaRows {
    at_zero: Vec<f64>,
    at_w: Vec<f64>,
}

impl ThetaRows {
    fn values(p: usize, z: f64, w: f64, eps: f64) -> Self {
        ThetaRows {
            at_zero: (0..2 * p).map(|a| theta_sum(a, z, 0.0, eps)).collect(),
            at_w: (0..2 * p).map(|a| theta_sum(a, z, w, eps)).collect(),
        }
    }

    fn derivatives(p: usize, z: f64, w: f64, eps: f64) -> Self {
        ThetaRows {
            at_zero: (0..2 * p).map(|a| theta_sum_dz(a, z, 0.0, eps)).collect(),
            at_w: (0..2 * p).map(|a| theta_sum_dz(a, z, w, eps)).collect(),
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        sign(i) * self.at_zero[i + j] - self.at_w[i + j]
    }
}

/// `T_p(z, w)`.
pub fn range_t(p: usize, z: f64, w: f64, eps: f64) -> Result<f64> {
    check_p(p)?;
    check_zw(z, w)?;
    let rows = ThetaRows::values(p, z, w, eps);
    Ok(DMatrix::from_fn(p, p, |i, j| rows.entry(i, j)).determinant())
}

fn range_t_dz_unchecked(p: usize, z: f64, w: f64, eps: f64, base: &ThetaRows) -> f64 {
    let deriv = ThetaRows::derivatives(p, z, w, eps);
    // d det = Σ_r det(matrix with row r differentiated)
    (0..p)
        .map(|r| {
            DMatrix::from_fn(p, p, |i, j| {
                if i == r {
                    deriv.entry(i, j)
                } else {
                    base.entry(i, j)
                }
            })
            .determinant()
        })
        .sum()
}

/// `∂T_p/∂z` at `(z, w)`.
pub fn range_t_dz(p: usize, z: f64, w: f64, eps: f64) -> Result<f64> {
    check_p(p)?;
    check_zw(z, w)?;
    let base = ThetaRows::values(p, z, w, eps);
    Ok(range_t_dz_unchecked(p, z, w, eps, &base))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
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
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
}

/// Limiting CDF of `(R+1)/√n`, with total error below `eps`.
pub fn range_limit_cdf(p: usize, t: f64, eps: f64) -> Result<f64> {
    let c = check_p(p)?;
    check_positive("t", t)?;
    check_positive("eps", eps)?;
    let half = eps / 2.0;
    let at_zero: Vec<f64> = (0..2 * p).map(|a| theta_sum(a, t, 0.0, half)).collect();
    let integrand = |w: f64| {
        let base = ThetaRows {
            at_zero: at_zero.clone(),
            at_w: (0..2 * p).map(|a| theta_sum(a, t, w, half)).collect(),
        };
        range_t_dz_unchecked(p, t, w, half, &base)
    };
    Ok(c * integrate(integrand, 0.0, t, half / c))
}

/// `Σ_ℓ (1 - 2(ℓt)²) e^{-(ℓt)²}`, the single-walker range limit.
pub fn p1_range_closed(t: f64, eps: f64) -> Result<f64> {
    check_positive("t", t)?;
    let (lo, hi) = theta_window(2, t, 0.0, eps);
    Ok((lo..=hi)
        .map(|l| {
            let x = l as f64 * t;
            (1.0 - 2.0 * x * x) * (-x * x).exp()
        })
        .sum())
}

/// `C(2n, n+m) / C(2n, n)` against its Gaussian approximation `e^{-m²/n}`.
///
/// The approximation is only claimed for `|m| ≤ n^{5/8}`; larger `m` is
/// still computed so the breakdown can be inspected.
pub fn gaussian_ratio_check(n: u64, m: i64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(MelonError::domain("n must be positive"));
    }
    if m.unsigned_abs() > n {
        return Err(MelonError::domain(format!("|m| = {} exceeds n = {n}", m.unsigned_abs())));
    }
    // C(2n, n+m)/C(2n, n) = Π_{j=1}^{|m|} (n-j+1)/(n+j)
    let mut ratio = BigRational::one();
    for j in 1..=m.unsigned_abs() {
        ratio *= BigRational::new(BigInt::from(n + 1 - j), BigInt::from(n + j));
    }
    let gauss = (-((m * m) as f64) / n as f64).exp();
    Ok((ratio.to_f64().unwrap(), gauss))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub exact: f64,
    pub limit: f64,
    pub abs_err: f64,
}

fn limit_value(stat: Stat, p: usize, t: f64, eps: f64) -> Result<f64> {
    match stat {
        Stat::Height => height_limit_cdf(p, t),
        Stat::Range => range_limit_cdf(p, t, eps),
    }
}

/// Exact CDF of `(stat+1)/√n` at `t`: `m_{n,⌊t√n⌋}/m_n` for heights and
/// `P{R ≤ ⌊t√n⌋ - 1}` for ranges.
pub fn exact_scaled_cdf(counter: &MelonCounter, total: &BigInt, stat: Stat, t: f64) -> f64 {
    let n = counter.config().n() as f64;
    let cut = (t * n.sqrt()).floor() as i64;
    let count = match stat {
        Stat::Height => counter.height_lt(cut),
        Stat::Range => counter.range_cdf_count(cut - 1),
    };
    BigRational::new(count, total.clone()).to_f64().unwrap()
}

/// Exact CDF against the limit on each grid point.
pub fn convergence_report(
    stat: Stat,
    p: usize,
    n: usize,
    grid: &[f64],
    eps: f64,
) -> Result<Vec<ConvergenceRow>> {
    check_p(p)?;
    let cfg = MelonConfig::new(p, n)?;
    if n == 0 {
        return Err(MelonError::InvalidConfig("n must be at least 1".into()));
    }
    let counter = MelonCounter::new(cfg);
    let total = counter.total();
    grid.iter()
        .map(|&t| {
            let limit = limit_value(stat, p, t, eps)?;
            let exact = exact_scaled_cdf(&counter, &total, stat, t);
            Ok(ConvergenceRow {
                t,
                exact,
                limit,
                abs_err: (exact - limit).abs(),
            })
        })
        .collect()
}

/// Largest `abs_err` in a report.
pub fn sup_gap(rows: &[ConvergenceRow]) -> f64 {
    rows.iter().map(|r| r.abs_err).fold(0.0, f64::max)
}

/// Sampled limiting CDF.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCurve {
    pub stat: Stat,
    pub p: usize,
    pub points: Vec<(f64, f64)>,
    /// Tail bound of each theta sum.
    pub truncation_eps: f64,
    /// Absolute tolerance handed to the quadrature (range only).
    pub quad_tol: f64,
}

impl LimitCurve {
    /// Evaluates `steps + 1` equally spaced points on `[t_min, t_max]`.
    pub fn sample(stat: Stat, p: usize, t_min: f64, t_max: f64, steps: usize, eps: f64) -> Result<Self> {
        check_p(p)?;
        check_positive("t_min", t_min)?;
        check_positive("eps", eps)?;
        if !(t_max >= t_min && t_max.is_finite()) {
            return Err(MelonError::domain(format!("t_max = {t_max} is below t_min = {t_min}")));
        }
        if steps == 0 && t_max > t_min {
            return Err(MelonError::domain("steps must be positive for a nonempty interval"));
        }
        let step = if steps == 0 { 0.0 } else { (t_max - t_min) / steps as f64 };
        let points = (0..=steps)
            .map(|i| {
                let t = t_min + step * i as f64;
                limit_value(stat, p, t, eps).map(|f| (t, f))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LimitCurve {
            stat,
            p,
            points,
            truncation_eps: eps / 2.0,
            quad_tol: match stat {
                Stat::Height => 0.0,
                Stat::Range => eps / 2.0,
            },
        })
    }

    /// Nondecreasing up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.points.windows(2).all(|w| w[1].1 >= w[0].1 - slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::kappa;

    const EPS: f64 = 1e-12;

    #[test]
    fn height_single_walker() {
        for t in [0.1, 0.5, 1.0, 2.0, 3.5] {
            let v = height_limit_cdf(1, t).unwrap();
            assert!((v - (1.0 - (-t * t).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn height_two_walkers() {
        for t in [0.3f64, 1.0, 1.7] {
            let e = (-t * t).exp();
            let expected = 1.0 - (2.0 * t * t * e + e * e);
            assert!((height_limit_cdf(2, t).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn height_matches_kappa() {
        for p in 1..=6 {
            let k = kappa(p).unwrap();
            let mut t = 0.05;
            while t <= 6.0 {
                let v = height_limit_cdf(p, t).unwrap();
                assert!((v - (1.0 - k.eval(t))).abs() < 1e-10, "p={p} t={t}");
                t += 0.05;
            }
            assert!((height_limit_cdf(p, 8.0).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn height_domain() {
        assert!(height_limit_cdf(2, 0.0).is_err());
        assert!(height_limit_cdf(2, -1.0).is_err());
        assert!(height_limit_cdf(7, 1.0).is_err());
    }

    #[test]
    fn theta_examples() {
        assert!((theta_sum(0, 100.0, 0.0, EPS) - 1.0).abs() < 1e-15);
        assert!((theta_sum(0, 1.0, 0.0, EPS) - 1.772_637_204_8).abs() < 1e-10);
        for z in [0.3, 1.0, 2.5] {
            assert!(theta_sum(1, z, 0.0, EPS).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_small_period_is_an_integral() {
        // z Σ e^{-(ℓz)²} → √π as z → 0
        let z = 0.05;
        let v = z * theta_sum(0, z, 0.0, 1e-14);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn range_t_single_walker_vanishes_at_zero_offset() {
        for t in [0.5, 1.0, 2.0] {
            assert!(range_t(1, t, 0.0, EPS).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn range_t_dz_single_walker_closed_integrand() {
        let (z, w) = (1.3, 0.4);
        let mut expected = 0.0;
        for l in -20i64..=20 {
            let l = l as f64;
            expected -= 2.0 * l * l * z * (-(l * z) * (l * z)).exp();
            let x = l * z + w;
            expected += 2.0 * l * x * (-x * x).exp();
        }
        let v = range_t_dz(1, z, w, EPS).unwrap();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn range_t_dz_matches_finite_difference() {
        let step = 1e-5;
        for p in 1..=3 {
            for &z in &[0.5, 1.0, 2.0, 4.0] {
                for frac in [0.0, 0.3, 0.7, 0.95] {
                    let w = frac * z;
                    let up = range_t(p, z + step, w, 1e-15).unwrap();
                    let down = range_t(p, z - step, w, 1e-15).unwrap();
                    let fd = (up - down) / (2.0 * step);
                    let an = range_t_dz(p, z, w, 1e-15).unwrap();
                    assert!((fd - an).abs() < 1e-6, "p={p} z={z} w={w}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn range_single_walker_matches_closed_form() {
        for t in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let q = range_limit_cdf(1, t, 1e-10).unwrap();
            let c = p1_range_closed(t, 1e-14).unwrap();
            assert!((q - c).abs() < 1e-8, "t={t}: {q} vs {c}");
        }
        assert!((p1_range_closed(10.0, 1e-14).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn range_limits_at_the_ends() {
        for p in 1..=3 {
            assert!((range_limit_cdf(p, 8.0, 1e-10).unwrap() - 1.0).abs() < 1e-8, "p={p}");
            assert!(range_limit_cdf(p, 0.2, 1e-10).unwrap().abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn integrate_polynomials_and_gaussians() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-12);
        let erf_like = integrate(|x| (-x * x).exp(), 0.0, 5.0, 1e-13);
        assert!((erf_like - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn ratio_check() {
        assert_eq!(gaussian_ratio_check(50, 0).unwrap(), (1.0, 1.0));
        let (r, g) = gaussian_ratio_check(10_000, 50).unwrap();
        assert!((r / (-0.25f64).exp() - 1.0).abs() < 0.02);
        assert!((g - (-0.25f64).exp()).abs() < 1e-15);
        // outside |m| <= n^(5/8) the pair is still returned
        let (r, g) = gaussian_ratio_check(100, 30).unwrap();
        let mut oracle = 1.0;
        for j in 1..=30u32 {
            oracle *= (101 - j) as f64 / (100 + j) as f64;
        }
        assert!((r - oracle).abs() < 1e-15 * oracle);
        assert!((g - (-9.0f64).exp()).abs() < 1e-18);
        assert!(gaussian_ratio_check(0, 0).is_err());
        assert!(gaussian_ratio_check(5, 6).is_err());
    }

    #[test]
    fn report_alignment() {
        let rows = convergence_report(Stat::Height, 1, 4, &[1.0, 1.5, 3.0], 1e-10).unwrap();
        // ⌊1·√4⌋ = 2, so the first row reads P{H < 2}
        let cfg = MelonConfig::new(1, 4).unwrap();
        let c = MelonCounter::new(cfg);
        let total = c.total();
        let expect = BigRational::new(c.height_lt(2), total.clone()).to_f64().unwrap();
        assert_eq!(rows[0].exact, expect);
        assert_eq!(rows[1].exact, BigRational::new(c.height_lt(3), total).to_f64().unwrap());
        assert_eq!(rows[2].exact, 1.0);
        assert!((rows[2].limit - (1.0 - (-9.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn curves_are_monotone() {
        for stat in [Stat::Height, Stat::Range] {
            let c = LimitCurve::sample(stat, 2, 0.2, 4.0, 38, 1e-10).unwrap();
            assert!(c.is_monotone(1e-9), "{stat}");
            assert!(c.points.iter().all(|&(_, f)| (-1e-9..=1.0 + 1e-9).contains(&f)));
        }
    }
}
