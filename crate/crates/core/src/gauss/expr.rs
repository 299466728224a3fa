use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{MelonError, Result};

/// Largest matrix accepted by [`det_gexpr`].
pub const MAX_DET_SIZE: usize = 8;

/// Largest `a` or `b` accepted from JSON.
pub const MAX_JSON_EXPONENT: u32 = 1 << 16;

/// One term `c · h^a · e^{-b h²}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussTerm {
    pub c: BigRational,
    pub a: u32,
    pub b: u32,
}

/// Finite sum of [`GaussTerm`]s in normal form: one coefficient per `(a, b)`,
/// no zero coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GaussExpr {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl GaussExpr {
    pub fn zero() -> Self {
        GaussExpr::default()
    }

    pub fn one() -> Self {
        GaussExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        GaussExpr::term(c, 0, 0)
    }

    pub fn term(c: BigRational, a: u32, b: u32) -> Self {
        let mut e = GaussExpr::zero();
        e.add_term(c, a, b);
        e
    }

    /// `h^a e^{-b h²}` with unit coefficient.
    pub fn monomial(a: u32, b: u32) -> Self {
        GaussExpr::term(BigRational::one(), a, b)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = GaussTerm>) -> Self {
        let mut e = GaussExpr::zero();
        for t in terms {
            e.add_term(t.c, t.a, t.b);
        }
        e
    }

    fn add_term(&mut self, c: BigRational, a: u32, b: u32) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(0, 0)
    }

    /// Terms in ascending `(a, b)` order.
    pub fn terms(&self) -> impl Iterator<Item = GaussTerm> + '_ {
        self.terms.iter().map(|(&(a, b), c)| GaussTerm {
            c: c.clone(),
            a,
            b,
        })
    }

    pub fn scale(&self, k: &BigRational) -> GaussExpr {
        if k.is_zero() {
            return GaussExpr::zero();
        }
        GaussExpr {
            terms: self
                .terms
                .iter()
                .map(|(&key, c)| (key, c * k))
                .collect(),
        }
    }

    /// Multiplies by `h^shift`.
    pub fn shift_power(&self, shift: u32) -> GaussExpr {
        GaussExpr {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + shift, b), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> GaussExpr {
        (0..exp).fold(GaussExpr::one(), |acc, _| &acc * self)
    }

    /// `d/dh`, termwise: `c·a·h^{a-1}e^{-bh²} - 2bc·h^{a+1}e^{-bh²}`.
    pub fn diff(&self) -> GaussExpr {
        let mut out = GaussExpr::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                out.add_term(c * BigRational::from(BigInt::from(a)), a - 1, b);
            }
            if b > 0 {
                out.add_term(-c * BigRational::from(BigInt::from(2 * b)), a + 1, b);
            }
        }
        out
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                c.to_f64().unwrap() * h.powi(a as i32) * (-(b as f64) * h * h).exp()
            })
            .sum()
    }

    /// True if every term has an even power of `h`.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|&(a, _)| a % 2 == 0)
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<TermJson> = self.terms().map(TermJson::from).collect();
        serde_json::to_string(&terms).expect("term list serializes")
    }

    /// Parses a JSON term list `[{"c_num", "c_den", "a", "b"}, …]`. Repeated
    /// `(a, b)` pairs are merged and zero terms dropped.
    pub fn from_json(input: &str) -> Result<GaussExpr> {
        let raw: Vec<TermJson> =
            serde_json::from_str(input).map_err(|e| MelonError::Parse(e.to_string()))?;
        let mut e = GaussExpr::zero();
        for t in raw {
            let term = GaussTerm::try_from(t)?;
            e.add_term(term.c, term.a, term.b);
        }
        Ok(e)
    }
}

/// Wire form of one term. Big integers travel as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub c_num: String,
    pub c_den: String,
    pub a: u32,
    pub b: u32,
}

impl From<GaussTerm> for TermJson {
    fn from(t: GaussTerm) -> Self {
        TermJson {
            c_num: t.c.numer().to_string(),
            c_den: t.c.denom().to_string(),
            a: t.a,
            b: t.b,
        }
    }
}

impl TryFrom<TermJson> for GaussTerm {
    type Error = MelonError;

    fn try_from(t: TermJson) -> Result<Self> {
        let parse = |s: &str| {
            // keep pathological inputs from allocating huge integers
            if s.len() > 4096 {
                return Err(MelonError::Parse("integer literal too long".into()));
            }
            s.parse::<BigInt>()
                .map_err(|e| MelonError::Parse(format!("bad integer {s:?}: {e}")))
        };
        if t.a > MAX_JSON_EXPONENT || t.b > MAX_JSON_EXPONENT {
            return Err(MelonError::Parse(format!(
                "exponent ({}, {}) above {MAX_JSON_EXPONENT}",
                t.a, t.b
            )));
        }
        let num = parse(&t.c_num)?;
        let den = parse(&t.c_den)?;
        if den.is_zero() {
            return Err(MelonError::Parse("zero denominator".into()));
        }
        Ok(GaussTerm {
            c: BigRational::new(num, den),
            a: t.a,
            b: t.b,
        })
    }
}

impl fmt::Display for GaussExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            let mut parts = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                parts.push(mag.to_string());
            }
            match a {
                0 => {}
                1 => parts.push("h".into()),
                _ => parts.push(format!("h^{a}")),
            }
            match b {
                0 => {}
                1 => parts.push("e^(-h^2)".into()),
                _ => parts.push(format!("e^(-{b}h^2)")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &GaussExpr {
    type Output = GaussExpr;

    fn add(self, rhs: &GaussExpr) -> GaussExpr {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(c.clone(), a, b);
        }
        out
    }
}

impl Sub for &GaussExpr {
    type Output = GaussExpr;

    fn sub(self, rhs: &GaussExpr) -> GaussExpr {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(-c, a, b);
        }
        out
    }
}

impl Mul for &GaussExpr {
    type Output = GaussExpr;

    fn mul(self, rhs: &GaussExpr) -> GaussExpr {
        let mut out = GaussExpr::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(c1 * c2, a1 + a2, b1 + b2);
            }
        }
        out
    }
}

impl Neg for &GaussExpr {
    type Output = GaussExpr;

    fn neg(self) -> GaussExpr {
        GaussExpr {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussExpr {
            type Output = GaussExpr;
            fn $m(self, rhs: GaussExpr) -> GaussExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GaussExpr> for GaussExpr {
            type Output = GaussExpr;
            fn $m(self, rhs: &GaussExpr) -> GaussExpr {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussExpr {
    type Output = GaussExpr;

    fn neg(self) -> GaussExpr {
        -&self
    }
}

/// Symbolic determinant by cofactor expansion, memoized over column subsets
/// (`2^size` minors). Elimination is unavailable since these expressions do
/// not form a field.
pub fn det_gexpr(matrix: &[Vec<GaussExpr>]) -> Result<GaussExpr> {
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
    if size > MAX_DET_SIZE {
        return Err(MelonError::Capacity {
            what: "symbolic determinant size",
            requested: size,
            limit: MAX_DET_SIZE,
        });
    }

    // minors[mask] = det of rows 0..|mask| restricted to the columns in mask
    let mut minors: Vec<GaussExpr> = vec![GaussExpr::zero(); 1 << size];
    minors[0] = GaussExpr::one();
    for mask in 1usize..(1 << size) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = GaussExpr::zero();
        for col in (0..size).filter(|&c| mask >> c & 1 == 1) {
            let sub = &minors[mask & !(1 << col)];
            if sub.is_zero() || matrix[row][col].is_zero() {
                continue;
            }
            let prod = &matrix[row][col] * sub;
            // sign of expanding along the last row: parity of columns in mask after col
            if (mask >> (col + 1)).count_ones() % 2 == 1 {
                acc = acc - prod;
            } else {
                acc = acc + prod;
            }
        }
        minors[mask] = acc;
    }
    Ok(minors.pop().unwrap())
}
