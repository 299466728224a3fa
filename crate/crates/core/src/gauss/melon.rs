//! The Hermite determinants behind the height asymptotics.
//!
//! With `C_p = 2^{-C(p,2)} / Π_{j<p} j!` and entries
//! `E_{i,j}(h) = (-1)^i H_{i+j}(0) - H_{i+j}(h) e^{-h²}`:
//!
//! * `κ_p = 1 - C_p · det(E)`; `1 - κ_p(t)` is the limiting height CDF,
//! * `τ_p = (p-1) · C_p · det(E with its last row raised to degrees p+j)`,
//! * `χ_p = det((-1)^i H_{i+j}(0) - H_{i+j}(0) e^{-h²})`, which factors column by column.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::expr::{det_gexpr, GaussExpr, MAX_DET_SIZE};
use crate::exact::det_big;
use crate::special::{hermite_table, hermite_zero, HermitePoly};
use crate::{MelonError, Result};

fn check_walkers(p: usize) -> Result<()> {
    if p == 0 {
        return Err(MelonError::InvalidConfig("p must be at least 1".into()));
    }
    if p > MAX_DET_SIZE {
        return Err(MelonError::Capacity {
            what: "number of walkers in symbolic determinants",
            requested: p,
            limit: MAX_DET_SIZE,
        });
    }
    Ok(())
}

/// `C_p = 1 / (2^{C(p,2)} · Π_{j<p} j!)`.
pub fn normalizer(p: usize) -> BigRational {
    BigRational::new(BigInt::one(), hankel_value(p))
}

/// `2^{C(p,2)} · Π_{j<p} j!`, the closed form of the Hankel determinant.
pub fn hankel_value(p: usize) -> BigInt {
    let pairs = (p * p.saturating_sub(1) / 2) as u32;
    let superfactorial = (1..p).fold(BigInt::one(), |acc, i| {
        acc * (1..=i).fold(BigInt::one(), |f, j| f * j)
    });
    BigInt::from(2).pow(pairs) * superfactorial
}

fn sign(k: usize) -> BigInt {
    if k % 2 == 1 {
        BigInt::from(-1)
    } else {
        BigInt::one()
    }
}

/// `det((-1)^{(i+j)/2} H_{i+j}(0))`; odd `i+j` entries vanish.
pub fn hankel_det(p: usize) -> Result<BigInt> {
    let matrix: Vec<Vec<BigInt>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let d = i + j;
                    if d % 2 == 1 {
                        BigInt::from(0)
                    } else {
                        sign(d / 2) * hermite_zero(d)
                    }
                })
                .collect()
        })
        .collect();
    det_big(&matrix)
}

/// `det((-1)^i H_{i+j}(0))`, the constant part of the κ determinant.
pub fn signed_hankel_det(p: usize) -> Result<BigInt> {
    let matrix: Vec<Vec<BigInt>> = (0..p)
        .map(|i| (0..p).map(|j| sign(i) * hermite_zero(i + j)).collect())
        .collect();
    det_big(&matrix)
}

/// `(-1)^row_sign H_d(0) - H_d(h) e^{-h²}` as an expression.
fn entry(row_sign: usize, poly: &HermitePoly) -> GaussExpr {
    let d = poly.degree();
    let mut e = GaussExpr::constant(BigRational::from(sign(row_sign) * hermite_zero(d)));
    for (a, c) in poly.coeffs().iter().enumerate() {
        e = e - GaussExpr::term(BigRational::from(c.clone()), a as u32, 1);
    }
    e
}

fn base_matrix(p: usize, table: &[HermitePoly]) -> Vec<Vec<GaussExpr>> {
    (0..p)
        .map(|i| (0..p).map(|j| entry(i, &table[i + j])).collect())
        .collect()
}

/// `κ_p` as an exact expression.
pub fn kappa(p: usize) -> Result<GaussExpr> {
    check_walkers(p)?;
    let table = hermite_table(2 * p);
    let det = det_gexpr(&base_matrix(p, &table))?;
    Ok(GaussExpr::one() - det.scale(&normalizer(p)))
}

/// `τ_p` from its own determinant definition (not via `κ_p'`).
pub fn tau(p: usize) -> Result<GaussExpr> {
    check_walkers(p)?;
    let table = hermite_table(2 * p);
    let mut m = base_matrix(p, &table);
    m[p - 1] = (0..p).map(|j| entry(p, &table[p + j])).collect();
    let det = det_gexpr(&m)?;
    let factor = normalizer(p) * BigRational::from(BigInt::from(p - 1));
    Ok(det.scale(&factor))
}

/// `χ_p = det((-1)^i H_{i+j}(0) - H_{i+j}(0) e^{-h²})`.
pub fn chi(p: usize) -> Result<GaussExpr> {
    check_walkers(p)?;
    let m: Vec<Vec<GaussExpr>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let h0 = BigRational::from(hermite_zero(i + j));
                    GaussExpr::constant(&h0 * BigRational::from(sign(i)))
                        - GaussExpr::term(h0, 0, 1)
                })
                .collect()
        })
        .collect();
    det_gexpr(&m)
}

/// `(1 - e^{-2h²})^{⌊p/2⌋} (1 - e^{-h²})^{⌈p/2⌉-⌊p/2⌋}`, which equals `C_p · χ_p`.
pub fn chi_factored(p: usize) -> GaussExpr {
    let one = GaussExpr::one();
    let double = &one - &GaussExpr::monomial(0, 2);
    let single = &one - &GaussExpr::monomial(0, 1);
    &double.pow((p / 2) as u32) * &single.pow((p % 2) as u32)
}
