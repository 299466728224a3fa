//! Direct and asymptotic evaluation of `f_{ν,μ}(n) = Σ_{h≥1} h^ν e^{-μh²/n}`.
//!
//! The asymptotic series comes from the residues of
//! `Γ(z) (μ/n)^{-z} ζ(2z - ν)`:
//!
//! ```text
//! f ≈ ½Γ((ν+1)/2)(n/μ)^{(ν+1)/2} + Σ_{m≥0} (μ/n)^m (-1)^{ν+m} B_{2m+ν+1} / ((2m+ν+1)·m!)
//! ```
//!
//! Both sides are computed with 320-bit floats, since the remainder after
//! two series terms sits 15+ orders of magnitude below the sum itself.

use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::special::{bernoulli_table, gamma_half};
use crate::{MelonError, Result};

pub const PRECISION_BITS: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

/// High-precision real.
#[derive(Debug, Clone)]
pub struct HpReal(BigFloat);

impl HpReal {
    pub fn to_f64(&self) -> f64 {
        self.0
            .to_string()
            .parse()
            .expect("decimal rendering of a finite float parses")
    }

    pub fn sub(&self, other: &HpReal) -> HpReal {
        HpReal(self.0.sub(&other.0, PRECISION_BITS, RM))
    }

    pub fn abs(&self) -> HpReal {
        HpReal(self.0.abs())
    }

    pub fn as_big_float(&self) -> &BigFloat {
        &self.0
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Hp {
    cc: Consts,
}

impl Hp {
    fn new() -> Self {
        Hp {
            cc: Consts::new().expect("astro-float constants cache"),
        }
    }

    fn int(&mut self, v: &BigInt) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, PRECISION_BITS, RM, &mut self.cc)
    }

    fn rational(&mut self, q: &BigRational) -> BigFloat {
        let num = self.int(q.numer());
        let den = self.int(q.denom());
        num.div(&den, PRECISION_BITS, RM)
    }
}

fn validate(mu: &BigRational, n: u64) -> Result<()> {
    if !mu.is_positive() {
        return Err(MelonError::domain(format!("decay rate {mu} must be positive")));
    }
    if n == 0 {
        return Err(MelonError::domain("scale n must be positive"));
    }
    Ok(())
}

/// Direct summation, stopped once past the peak and the next term is below
/// `1e-30` of the running sum.
pub fn f_sum_numeric(nu: u32, mu: &BigRational, n: u64) -> Result<HpReal> {
    validate(mu, n)?;
    let mut hp = Hp::new();
    let rate = hp.rational(&(mu / BigRational::from(BigInt::from(n))));
    let cutoff = BigFloat::from_f64(1e-30, PRECISION_BITS);
    let mut sum = BigFloat::from_u64(0, PRECISION_BITS);
    let mut h: u64 = 1;
    loop {
        let hf = BigFloat::from_u64(h, PRECISION_BITS);
        let arg = rate.mul(&hf.mul(&hf, PRECISION_BITS, RM), PRECISION_BITS, RM);
        let decay = arg.neg().exp(PRECISION_BITS, RM, &mut hp.cc);
        let term = hf.powi(nu as usize, PRECISION_BITS, RM).mul(&decay, PRECISION_BITS, RM);
        sum = sum.add(&term, PRECISION_BITS, RM);
        // terms decrease once μh²/n > ν/2
        let past_peak = BigRational::from(BigInt::from(h) * h) * mu
            > BigRational::new(BigInt::from(n) * nu, BigInt::from(2));
        let small = term
            .cmp(&sum.mul(&cutoff, PRECISION_BITS, RM))
            .is_some_and(|c| c < 0);
        if past_peak && small {
            break;
        }
        h += 1;
    }
    Ok(HpReal(sum))
}

/// `(μ/n)^m (-1)^{ν+m} B_{2m+ν+1} / ((2m+ν+1)·m!)` for `m = 0..=max_m`, summed exactly.
pub fn series_correction(nu: u32, mu: &BigRational, n: u64, max_m: u32) -> BigRational {
    let bern = bernoulli_table((2 * max_m + nu + 1) as usize);
    let ratio = mu / BigRational::from(BigInt::from(n));
    let mut total = BigRational::zero();
    let mut m_fact = BigInt::one();
    for m in 0..=max_m {
        if m > 0 {
            m_fact *= m;
        }
        let idx = 2 * m + nu + 1;
        let mut term = ratio.clone().pow(m as i32) * &bern[idx as usize]
            / BigRational::from(BigInt::from(idx) * &m_fact);
        if (nu + m) % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

/// `½Γ((ν+1)/2)(n/μ)^{(ν+1)/2}` plus the series through `m = max_m`.
pub fn f_sum_asymptotic(nu: u32, mu: &BigRational, n: u64, max_m: u32) -> Result<HpReal> {
    validate(mu, n)?;
    let mut hp = Hp::new();
    let gamma = gamma_half(nu as i64 + 1)?;
    let scale = BigRational::from(BigInt::from(n)) / mu;
    // ½Γ · (n/μ)^{⌊(ν+1)/2⌋} is rational; the leftover half power and √π are not
    let mut lead = hp.rational(
        &(gamma.rational.clone() / BigRational::from(BigInt::from(2)) * scale.clone().pow(nu.div_ceil(2) as i32)),
    );
    if nu.is_multiple_of(2) {
        let root = hp.rational(&scale).sqrt(PRECISION_BITS, RM);
        lead = lead.mul(&root, PRECISION_BITS, RM);
    }
    if gamma.sqrt_pi {
        let sqrt_pi = hp.cc.pi(PRECISION_BITS, RM).sqrt(PRECISION_BITS, RM);
        lead = lead.mul(&sqrt_pi, PRECISION_BITS, RM);
    }
    let tail = hp.rational(&series_correction(nu, mu, n, max_m));
    Ok(HpReal(lead.add(&tail, PRECISION_BITS, RM)))
}
