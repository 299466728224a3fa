//! The linear functionals `Ξ₁` and `Ξ₀` on decaying Gaussian terms.
//!
//! For `f(n) = Σ_{h≥1} h^ν e^{-μh²/n}` the expansion starts
//! `Ξ₁(h^ν e^{-μh²})·n^{(ν+1)/2} + Ξ₀(h^ν e^{-μh²}) + O(n^{-1})`, with
//! `Ξ₁(h^ν e^{-μh²}) = ½ Γ((ν+1)/2) μ^{-(ν+1)/2}` and `Ξ₀` the constant
//! `ζ(-ν) = (-1)^ν B_{ν+1}/(ν+1)`.
//!
//! `Ξ₁` values are kept exact as `r + √π · Σ_d q_d √d` over squarefree `d`,
//! so identities such as `Ξ₁(τ_p) = 1 - p` hold symbolically.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use super::expr::GaussExpr;
use crate::special::{bernoulli_table, gamma_half};
use crate::{MelonError, Result};

/// Exact value `rational + √π · Σ_d surds[d] · √d`, `d` squarefree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Xi1Value {
    rational: BigRational,
    surds: BTreeMap<u64, BigRational>,
}

impl Xi1Value {
    pub fn rational(r: BigRational) -> Self {
        Xi1Value {
            rational: r,
            surds: BTreeMap::new(),
        }
    }

    /// `√π · Σ coeff · √d`. Each `d` must be squarefree.
    pub fn sqrt_pi_combination(parts: impl IntoIterator<Item = (u64, BigRational)>) -> Self {
        let mut v = Xi1Value::default();
        for (d, q) in parts {
            assert_eq!(squarefree_split(d).0, 1, "{d} is not squarefree");
            v.add_surd(d, q);
        }
        v
    }

    fn add_surd(&mut self, d: u64, q: BigRational) {
        let slot = self.surds.entry(d).or_insert_with(BigRational::zero);
        *slot += q;
        if slot.is_zero() {
            self.surds.remove(&d);
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    /// Coefficients of `√π·√d`.
    pub fn sqrt_pi_part(&self) -> &BTreeMap<u64, BigRational> {
        &self.surds
    }

    pub fn is_rational(&self) -> bool {
        self.surds.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> Xi1Value {
        let mut out = Xi1Value::rational(&self.rational * k);
        for (&d, q) in &self.surds {
            out.add_surd(d, q * k);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let irrational: f64 = self
            .surds
            .iter()
            .map(|(&d, q)| q.to_f64().unwrap() * (d as f64).sqrt())
            .sum();
        self.rational.to_f64().unwrap() + sqrt_pi * irrational
    }
}

impl Add for &Xi1Value {
    type Output = Xi1Value;

    fn add(self, rhs: &Xi1Value) -> Xi1Value {
        let mut out = self.clone();
        out.rational += &rhs.rational;
        for (&d, q) in &rhs.surds {
            out.add_surd(d, q.clone());
        }
        out
    }
}

impl Sub for &Xi1Value {
    type Output = Xi1Value;

    fn sub(self, rhs: &Xi1Value) -> Xi1Value {
        self + &rhs.scale(&-BigRational::one())
    }
}

impl fmt::Display for Xi1Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        if !self.rational.is_zero() || self.surds.is_empty() {
            pieces.push(self.rational.to_string());
        }
        if !self.surds.is_empty() {
            let inner: Vec<String> = self
                .surds
                .iter()
                .map(|(&d, q)| {
                    if d == 1 {
                        format!("{q}")
                    } else {
                        format!("{q}*sqrt({d})")
                    }
                })
                .collect();
            pieces.push(format!("({})*sqrt(pi)", inner.join(" + ")));
        }
        write!(f, "{}", pieces.join(" + "))
    }
}

/// Splits `b = s²·d` with `d` squarefree; returns `(s, d)`.
fn squarefree_split(b: u64) -> (u64, u64) {
    let mut s = 1;
    let mut d = 1;
    let mut rest = b;
    let mut f = 2;
    while f * f <= rest {
        let mut e = 0;
        while rest.is_multiple_of(f) {
            rest /= f;
            e += 1;
        }
        s *= f.pow(e / 2);
        if e % 2 == 1 {
            d *= f;
        }
        f += 1;
    }
    (s, d * rest)
}

fn require_decaying(e: &GaussExpr) -> Result<()> {
    if let Some(t) = e.terms().find(|t| t.b == 0) {
        return Err(MelonError::domain(format!(
            "term h^{} without Gaussian decay has no Xi value",
            t.a
        )));
    }
    Ok(())
}

/// `Ξ₁`, exactly. Fails on terms with `b = 0`.
pub fn xi1(e: &GaussExpr) -> Result<Xi1Value> {
    require_decaying(e)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Xi1Value::default();
    for t in e.terms() {
        let gamma = gamma_half(t.a as i64 + 1)?;
        let b = BigInt::from(t.b);
        let base = &t.c * &half * &gamma.rational;
        if t.a % 2 == 1 {
            // integer Γ, rational power of b
            let k = t.a.div_ceil(2);
            out.rational += base / BigRational::from(b.pow(k));
        } else {
            // b^{-(a+1)/2} = b^{-a/2} · √d / (s·d)
            let (s, d) = squarefree_split(t.b as u64);
            let scale = BigRational::from(b.pow(t.a / 2) * s * d);
            out.add_surd(d, base / scale);
        }
    }
    Ok(out)
}

/// `Ξ₀`, the constant term `Σ c · (-1)^a B_{a+1}/(a+1)`. Fails on `b = 0` terms.
pub fn xi0(e: &GaussExpr) -> Result<BigRational> {
    require_decaying(e)?;
    let max_a = e.terms().map(|t| t.a).max().unwrap_or(0) as usize;
    let bern = bernoulli_table(max_a + 1);
    let mut out = BigRational::zero();
    for t in e.terms() {
        let a = t.a as usize;
        let mut v = &t.c * &bern[a + 1] / BigRational::from(BigInt::from(a + 1));
        if a % 2 == 1 {
            v = -v;
        }
        out += v;
    }
    Ok(out)
}

/// Sum of the `h^0` coefficients over all decay rates; `Ξ₁(f') = -` this.
pub fn constant_power_sum(e: &GaussExpr) -> BigRational {
    e.terms()
        .filter(|t| t.a == 0)
        .fold(BigRational::zero(), |acc, t| acc + t.c)
}
