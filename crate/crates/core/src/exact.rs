//! Exact enumeration of watermelons under height and depth constraints.
//!
//! All counts come from Lindström–Gessel–Viennot determinants whose entries are
//! signed sums of binomial coefficients (iterated reflections in the lines
//! `y = h` and `y = -k`). Every quantity is an exact big integer or an exact
//! rational; floats only appear when a caller converts for comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::{MelonConfig, MelonError, Result, StripBound};

/// `C(n, k)`, or zero when `k` lies outside `0..=n`.
pub fn binomial_safe(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Determinant of a square big-integer matrix by fraction-free (Bareiss)
/// elimination. Every intermediate value is itself a minor, so the divisions
/// are exact.
pub fn det_big(matrix: &[Vec<BigInt>]) -> Result<BigInt> {
    let size = matrix.len();
    if let Some(bad) = matrix.iter().find(|row| row.len() != size) {
        return Err(MelonError::Dimension {
            rows: size,
            cols: bad.len(),
        });
    }
    if size == 0 {
        return Err(MelonError::Dimension { rows: 0, cols: 0 });
    }

    let mut a = matrix.to_vec();
    let mut negate = false;
    let mut prev_pivot = BigInt::one();
    for k in 0..size - 1 {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let cross = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = cross / &prev_pivot;
            }
        }
        prev_pivot = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Counting context for one `(p, n)`: caches the binomial row `C(2n, ·)` so
/// that sweeps over `h`, `k` or `r` do not recompute it.
#[derive(Debug, Clone)]
pub struct MelonCounter {
    cfg: MelonConfig,
    row: Vec<BigInt>,
    zero: BigInt,
}

impl MelonCounter {
    pub fn new(cfg: MelonConfig) -> Self {
        let len = 2 * cfg.n() as u64;
        let mut row = Vec::with_capacity(len as usize + 1);
        let mut c = BigInt::one();
        for k in 0..=len {
            row.push(c.clone());
            c = c * (len - k) / (k + 1);
        }
        MelonCounter {
            cfg,
            row,
            zero: BigInt::zero(),
        }
    }

    pub fn config(&self) -> MelonConfig {
        self.cfg
    }

    /// `C(2n, index)` with the out-of-range convention.
    fn binom(&self, index: i64) -> &BigInt {
        if index < 0 {
            return &self.zero;
        }
        self.row.get(index as usize).unwrap_or(&self.zero)
    }

    fn determinant(&self, entry: impl Fn(i64, i64) -> BigInt) -> BigInt {
        let p = self.cfg.p() as i64;
        let matrix: Vec<Vec<BigInt>> = (0..p)
            .map(|i| (0..p).map(|j| entry(i, j)).collect())
            .collect();
        det_big(&matrix).expect("melon matrices are square")
    }

    /// Total number of watermelons.
    pub fn total(&self) -> BigInt {
        let n = self.cfg.n() as i64;
        self.determinant(|i, j| self.binom(n + i - j).clone())
    }

    /// Number of watermelons with height `< h` (no depth restriction).
    pub fn height_lt(&self, h: i64) -> BigInt {
        if h <= self.cfg.min_height() {
            return BigInt::zero();
        }
        let n = self.cfg.n() as i64;
        self.determinant(|i, j| self.binom(n + i - j) - self.binom(n + h - i - j))
    }

    /// Number of watermelons with height `< b.h` and depth `> -b.k`.
    ///
    /// Zero whenever the strip excludes a starting point, i.e. `h <= 2p-2`
    /// or `k <= 0`.
    pub fn strip(&self, b: StripBound) -> BigInt {
        if b.h <= self.cfg.min_height() || b.k <= 0 {
            return BigInt::zero();
        }
        self.strip_raw(b)
    }

    /// The reflection-sum determinant without the feasibility guard.
    /// Requires `b.h + b.k >= 1`.
    pub(crate) fn strip_raw(&self, b: StripBound) -> BigInt {
        let width = b.width();
        assert!(width >= 1, "strip width must be positive, got {width}");
        self.determinant(|i, j| {
            self.reflected_sum(i - j, width) - self.reflected_sum(b.h - i - j, width)
        })
    }

    /// `Σ_ℓ C(2n, n + ℓ·width + offset)` over exactly the `ℓ` whose index is in `[0, 2n]`.
    fn reflected_sum(&self, offset: i64, width: i64) -> BigInt {
        let n = self.cfg.n() as i64;
        let lo = Integer::div_ceil(&(-n - offset), &width);
        let hi = Integer::div_floor(&(n - offset), &width);
        (lo..=hi)
            .map(|l| self.binom(n + l * width + offset))
            .fold(BigInt::zero(), |acc, c| acc + c)
    }

    /// Number of watermelons with range `<= r`.
    pub fn range_cdf_count(&self, r: i64) -> BigInt {
        let lowest = self.cfg.min_height();
        if r < lowest {
            return BigInt::zero();
        }
        // The h = 2p-2 summand vanishes identically; checked rather than assumed.
        let first = self.strip_raw(StripBound::new(lowest, r - lowest + 1));
        assert!(
            first.is_zero(),
            "strip count at h = 2p-2 must vanish, got {first}"
        );
        let mut total = BigInt::zero();
        for h in lowest..=r {
            let k = r - h + 1;
            total += self.strip(StripBound::new(h + 1, k)) - self.strip(StripBound::new(h, k));
        }
        total
    }

    pub fn height_distribution(&self) -> Result<ExactDistribution> {
        require_positive_n(&self.cfg)?;
        let lo = self.cfg.min_height();
        let hi = self.cfg.max_height();
        let cdf: Vec<BigInt> = (lo..=hi).map(|h| self.height_lt(h + 1)).collect();
        Ok(ExactDistribution::from_cdf_counts(lo, cdf, self.total()))
    }

    pub fn range_distribution(&self) -> Result<ExactDistribution> {
        require_positive_n(&self.cfg)?;
        let lo = self.cfg.min_height();
        let hi = 2 * self.cfg.n() as i64 + lo;
        let cdf: Vec<BigInt> = (lo..=hi).map(|r| self.range_cdf_count(r)).collect();
        Ok(ExactDistribution::from_cdf_counts(lo, cdf, self.total()))
    }

    /// Exact `E(H^s)` via tail sums: `Σ_h (h^s - (h-1)^s)·P{H >= h}`.
    pub fn height_moment(&self, s: u32) -> Result<BigRational> {
        if s == 0 {
            return Err(MelonError::domain("moment order must be at least 1"));
        }
        let total = self.total();
        let mut acc = BigInt::zero();
        for h in 1..=self.cfg.max_height() {
            let weight = BigInt::from(h).pow(s) - BigInt::from(h - 1).pow(s);
            acc += weight * (&total - self.height_lt(h));
        }
        Ok(BigRational::new(acc, total))
    }
}

fn require_positive_n(cfg: &MelonConfig) -> Result<()> {
    if cfg.n() == 0 {
        return Err(MelonError::InvalidConfig(
            "distributions need n >= 1".into(),
        ));
    }
    Ok(())
}

/// Finite-n law on an integer support, kept as exact counts over the total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    support: Vec<i64>,
    counts: Vec<BigInt>,
    total_count: BigInt,
}

impl ExactDistribution {
    /// Differences a cumulative count table (value `start + i` at index `i`)
    /// into point counts, trimming zero mass at both ends.
    fn from_cdf_counts(start: i64, cdf: Vec<BigInt>, total_count: BigInt) -> Self {
        assert_eq!(
            cdf.last(),
            Some(&total_count),
            "cumulative counts must reach the total"
        );
        let mut counts = Vec::with_capacity(cdf.len());
        let mut prev = BigInt::zero();
        for c in &cdf {
            let diff = c - &prev;
            assert!(!diff.is_negative(), "cumulative counts decreased");
            counts.push(diff);
            prev = c.clone();
        }
        let first = counts.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let last = counts.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        ExactDistribution {
            support: (first..=last).map(|i| start + i as i64).collect(),
            counts: counts[first..=last].to_vec(),
            total_count,
        }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    pub fn total_count(&self) -> &BigInt {
        &self.total_count
    }

    pub fn count_at(&self, value: i64) -> BigInt {
        self.support
            .iter()
            .position(|&v| v == value)
            .map(|i| self.counts[i].clone())
            .unwrap_or_default()
    }

    pub fn masses(&self) -> Vec<BigRational> {
        self.counts
            .iter()
            .map(|c| BigRational::new(c.clone(), self.total_count.clone()))
            .collect()
    }

    pub fn mass_at(&self, value: i64) -> BigRational {
        BigRational::new(self.count_at(value), self.total_count.clone())
    }

    pub fn cdf_counts(&self) -> Vec<BigInt> {
        self.counts
            .iter()
            .scan(BigInt::zero(), |acc, c| {
                *acc += c;
                Some(acc.clone())
            })
            .collect()
    }

    pub fn cdf(&self) -> Vec<BigRational> {
        self.cdf_counts()
            .into_iter()
            .map(|c| BigRational::new(c, self.total_count.clone()))
            .collect()
    }

    pub fn moment(&self, s: u32) -> BigRational {
        let sum = self
            .support
            .iter()
            .zip(&self.counts)
            .fold(BigInt::zero(), |acc, (&v, c)| acc + BigInt::from(v).pow(s) * c);
        BigRational::new(sum, self.total_count.clone())
    }
}

pub fn count_total(cfg: &MelonConfig) -> BigInt {
    MelonCounter::new(*cfg).total()
}

/// Product formula for the total count,
/// `C(2n,n)^p · Π_{i<p} i!·(2n+i)!/(2n)!·(n!/(n+i)!)²`.
pub fn count_total_closed(cfg: &MelonConfig) -> BigInt {
    let n = cfg.n() as u64;
    let central = binomial_safe(2 * n, n as i64);
    let mut num = central.pow(cfg.p() as u32);
    let mut den = BigInt::one();
    let mut factorial = BigInt::one();
    for i in 0..cfg.p() as u64 {
        if i > 0 {
            factorial *= i;
        }
        num *= &factorial;
        for j in 1..=i {
            num *= 2 * n + j;
            den *= (n + j) * (n + j);
        }
    }
    let (q, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "closed form must be integral");
    q
}

pub fn count_height_lt(cfg: &MelonConfig, h: i64) -> BigInt {
    MelonCounter::new(*cfg).height_lt(h)
}

pub fn count_strip(cfg: &MelonConfig, b: StripBound) -> BigInt {
    MelonCounter::new(*cfg).strip(b)
}

pub fn height_distribution(cfg: &MelonConfig) -> Result<ExactDistribution> {
    MelonCounter::new(*cfg).height_distribution()
}

pub fn range_distribution(cfg: &MelonConfig) -> Result<ExactDistribution> {
    MelonCounter::new(*cfg).range_distribution()
}

pub fn height_moment_exact(cfg: &MelonConfig, s: u32) -> Result<BigRational> {
    MelonCounter::new(*cfg).height_moment(s)
}

/// `m_n · n^{C(p,2)} / (2^{C(p,2)} · C(2n,n)^p · Π i!)`, which tends to 1.
pub fn total_count_leading_ratio(cfg: &MelonConfig) -> Result<BigRational> {
    require_positive_n(cfg)?;
    let p = cfg.p() as u32;
    let n = cfg.n() as u64;
    let pairs = p * (p - 1) / 2;
    let superfactorial = (1..p as u64).fold(BigInt::one(), |acc, i| {
        acc * (1..=i).fold(BigInt::one(), |f, j| f * j)
    });
    let den = BigInt::from(2u32).pow(pairs)
        * binomial_safe(2 * n, n as i64).pow(p)
        * superfactorial;
    let num = count_total(cfg) * BigInt::from(n).pow(pairs);
    Ok(BigRational::new(num, den))
}
