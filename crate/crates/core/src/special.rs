//! Exact special-function kernels.
//!
//! Hermite polynomials use the *physicists'* normalization
//! (`H_0 = 1`, `H_1 = 2x`, `H_{k+1} = 2x·H_k - 2k·H_{k-1}`). The probabilists'
//! family `He_k` differs by powers of two and would silently corrupt every
//! determinant built from these values.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{MelonError, Result};

/// Physicists' Hermite polynomial with exact integer coefficients
/// (`coeffs[j]` multiplies `x^j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitePoly {
    coeffs: Vec<BigInt>,
}

impl HermitePoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap())
    }
}

impl fmt::Display for HermitePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match j {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `H_0, …, H_max` by the three-term recurrence.
pub fn hermite_table(max: usize) -> Vec<HermitePoly> {
    let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(max + 1);
    table.push(vec![BigInt::one()]);
    if max >= 1 {
        table.push(vec![BigInt::zero(), BigInt::from(2)]);
    }
    for k in 1..max {
        let mut next = vec![BigInt::zero(); k + 2];
        for (j, c) in table[k].iter().enumerate() {
            next[j + 1] += c * 2;
        }
        for (j, c) in table[k - 1].iter().enumerate() {
            next[j] -= c * (2 * k);
        }
        table.push(next);
    }
    table
        .into_iter()
        .map(|coeffs| HermitePoly { coeffs })
        .collect()
}

pub fn hermite(k: usize) -> HermitePoly {
    hermite_table(k).pop().unwrap()
}

/// `H_k(0)`: `(-1)^{k/2} k!/(k/2)!` for even `k`, zero for odd `k`.
pub fn hermite_zero(k: usize) -> BigInt {
    if k % 2 == 1 {
        return BigInt::zero();
    }
    let half = k / 2;
    let value = (half + 1..=k).fold(BigInt::one(), |acc, j| acc * j);
    if half % 2 == 1 {
        -value
    } else {
        value
    }
}

/// `H_k(x)` in floating point by the recurrence.
pub fn hermite_f64(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Γ(m/2)` for a positive integer `m`, stored as `rational · √π^{m odd}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaHalf {
    pub rational: BigRational,
    pub sqrt_pi: bool,
}

impl GammaHalf {
    pub fn to_f64(&self) -> f64 {
        let r = self.rational.to_f64().unwrap();
        if self.sqrt_pi {
            r * std::f64::consts::PI.sqrt()
        } else {
            r
        }
    }
}

/// `Γ(twice_arg / 2)`; the argument must be positive.
pub fn gamma_half(twice_arg: i64) -> Result<GammaHalf> {
    if twice_arg <= 0 {
        return Err(MelonError::domain(format!(
            "gamma argument {twice_arg}/2 is not positive"
        )));
    }
    // Γ(z+1) = z·Γ(z), starting from Γ(1/2) = √π or Γ(1) = 1
    let sqrt_pi = twice_arg % 2 == 1;
    let mut rational = BigRational::one();
    let mut z2 = if sqrt_pi { 1 } else { 2 };
    while z2 < twice_arg {
        rational *= BigRational::new(z2.into(), 2.into());
        z2 += 2;
    }
    Ok(GammaHalf { rational, sqrt_pi })
}

/// `B_0, …, B_max` with `B_1 = -1/2` (generating function `t/(e^t - 1)`).
pub fn bernoulli_table(max: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(max + 1);
    b.push(BigRational::one());
    for m in 1..=max {
        // Σ_{j<=m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from(binom.clone());
            binom = binom * (m + 1 - j) / (j + 1);
        }
        b.push(-acc / BigRational::from(BigInt::from(m + 1)));
    }
    b
}

pub fn bernoulli(m: usize) -> BigRational {
    bernoulli_table(m).pop().unwrap()
}
