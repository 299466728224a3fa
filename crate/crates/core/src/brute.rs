//! Exhaustive enumeration of watermelons for tiny `(p, n)`.
//!
//! This is the ground truth the determinant formulas are checked against, so
//! it shares no code with [`crate::exact`]: it walks all step vectors time step
//! by time step and prunes as soon as two neighbouring paths touch.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::{MelonConfig, MelonError, Result};

/// Largest `p · 2n` the enumerator accepts.
pub const MAX_CELLS: usize = 40;

/// One watermelon as a `p × 2n` matrix of `±1` steps; row `i` is the path
/// starting at ordinate `2i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MelonPath {
    p: usize,
    len: usize,
    steps: Vec<i8>,
}

impl MelonPath {
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of steps per path (`2n`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.steps[i * self.len..(i + 1) * self.len]
    }

    /// Ordinates of path `i` at times `0..=2n`.
    pub fn ordinates(&self, i: usize) -> Vec<i64> {
        let mut y = 2 * i as i64;
        let mut out = Vec::with_capacity(self.len + 1);
        out.push(y);
        for &s in self.row(i) {
            y += s as i64;
            out.push(y);
        }
        out
    }

    pub fn height(&self) -> i64 {
        self.ordinates(self.p - 1).into_iter().max().unwrap()
    }

    pub fn depth(&self) -> i64 {
        self.ordinates(0).into_iter().min().unwrap()
    }

    pub fn range(&self) -> i64 {
        self.height() - self.depth()
    }

    /// Checks endpoints, step alphabet and strict ordering at every time.
    pub fn is_valid(&self) -> bool {
        if self.steps.iter().any(|&s| s != 1 && s != -1) {
            return false;
        }
        let paths: Vec<Vec<i64>> = (0..self.p).map(|i| self.ordinates(i)).collect();
        let closed = paths
            .iter()
            .enumerate()
            .all(|(i, ys)| ys.last() == Some(&(2 * i as i64)));
        closed
            && paths
                .windows(2)
                .all(|pair| pair[0].iter().zip(&pair[1]).all(|(lo, hi)| lo < hi))
    }

    /// Mirror image under `y ↦ 2p - 2 - y`: path `i` becomes path `p-1-i` with
    /// every step negated.
    pub fn flipped(&self) -> MelonPath {
        let mut steps = Vec::with_capacity(self.steps.len());
        for i in (0..self.p).rev() {
            steps.extend(self.row(i).iter().map(|s| -s));
        }
        MelonPath {
            p: self.p,
            len: self.len,
            steps,
        }
    }
}

fn check_capacity(cfg: &MelonConfig) -> Result<()> {
    let cells = cfg.p() * 2 * cfg.n();
    if cells > MAX_CELLS {
        return Err(MelonError::Capacity {
            what: "exhaustive enumeration size p*2n",
            requested: cells,
            limit: MAX_CELLS,
        });
    }
    Ok(())
}

/// Visits every watermelon of the given shape exactly once, in lexicographic
/// order of the step matrix read column by column (down before up, bottom
/// path first). Returns the number visited.
pub fn enumerate<F>(cfg: &MelonConfig, mut visitor: F) -> Result<BigInt>
where
    F: FnMut(&MelonPath),
{
    walk(cfg, |path, _, _| visitor(path))
}

/// Extremes of the top and bottom paths seen so far.
#[derive(Clone, Copy)]
struct Extremes {
    top_max: i64,
    bottom_min: i64,
}

/// Depth-first walk that hands `(path, height, depth)` to the visitor.
fn walk<F>(cfg: &MelonConfig, mut visitor: F) -> Result<BigInt>
where
    F: FnMut(&MelonPath, i64, i64),
{
    check_capacity(cfg)?;
    let p = cfg.p();
    let len = 2 * cfg.n();
    let mut path = MelonPath {
        p,
        len,
        steps: vec![0; p * len],
    };
    let mut ys: Vec<i64> = (0..p).map(|i| 2 * i as i64).collect();
    let mut scratch = vec![0i64; p * (len + 1)];
    let start = Extremes {
        top_max: ys[p - 1],
        bottom_min: 0,
    };
    let mut count: u64 = 0;
    descend(&mut path, &mut ys, &mut scratch, 0, start, &mut count, &mut visitor);
    Ok(BigInt::from(count))
}

#[allow(clippy::too_many_arguments)]
fn descend<F: FnMut(&MelonPath, i64, i64)>(
    path: &mut MelonPath,
    ys: &mut [i64],
    scratch: &mut [i64],
    t: usize,
    ext: Extremes,
    count: &mut u64,
    visitor: &mut F,
) {
    if t == path.len {
        *count += 1;
        visitor(path, ext.top_max, ext.bottom_min);
        return;
    }
    let p = path.p;
    let remaining = (path.len - t - 1) as i64;
    // each level parks its ys in the head of scratch and hands the tail down
    let (saved, deeper) = scratch.split_at_mut(p);
    saved.copy_from_slice(ys);
    'choice: for mask in 0u32..(1 << p) {
        for i in 0..p {
            let up = mask >> (p - 1 - i) & 1 == 1;
            let step: i8 = if up { 1 } else { -1 };
            let y = saved[i] + step as i64;
            // must still be able to return home, and stay strictly above the path below
            if (y - 2 * i as i64).abs() > remaining || (i > 0 && ys[i - 1] >= y) {
                ys.copy_from_slice(saved);
                continue 'choice;
            }
            ys[i] = y;
            path.steps[i * path.len + t] = step;
        }
        let next = Extremes {
            top_max: ext.top_max.max(ys[p - 1]),
            bottom_min: ext.bottom_min.min(ys[0]),
        };
        descend(path, ys, deeper, t + 1, next, count, visitor);
        ys.copy_from_slice(saved);
    }
}

/// Joint `(height, depth)` counts of all watermelons of one shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MelonStats {
    cfg: MelonConfig,
    joint: BTreeMap<(i64, i64), u64>,
    total: u64,
}

impl MelonStats {
    pub fn config(&self) -> MelonConfig {
        self.cfg
    }

    pub fn joint(&self) -> &BTreeMap<(i64, i64), u64> {
        &self.joint
    }

    pub fn total(&self) -> BigInt {
        BigInt::from(self.total)
    }

    fn marginal(&self, key: impl Fn(i64, i64) -> i64) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (&(h, d), &c) in &self.joint {
            *out.entry(key(h, d)).or_insert(0) += c;
        }
        out
    }

    pub fn height_counts(&self) -> BTreeMap<i64, u64> {
        self.marginal(|h, _| h)
    }

    pub fn depth_counts(&self) -> BTreeMap<i64, u64> {
        self.marginal(|_, d| d)
    }

    pub fn range_counts(&self) -> BTreeMap<i64, u64> {
        self.marginal(|h, d| h - d)
    }

    fn to_pmf(&self, counts: BTreeMap<i64, u64>) -> BTreeMap<i64, BigRational> {
        counts
            .into_iter()
            .map(|(v, c)| (v, BigRational::new(c.into(), self.total())))
            .collect()
    }

    pub fn height_pmf(&self) -> BTreeMap<i64, BigRational> {
        self.to_pmf(self.height_counts())
    }

    pub fn range_pmf(&self) -> BTreeMap<i64, BigRational> {
        self.to_pmf(self.range_counts())
    }
}

pub fn stats(cfg: &MelonConfig) -> Result<MelonStats> {
    let mut joint = BTreeMap::new();
    let total = walk(cfg, |_, height, depth| {
        *joint.entry((height, depth)).or_insert(0u64) += 1;
    })?;
    Ok(MelonStats {
        cfg: *cfg,
        joint,
        total: u64::try_from(total).expect("enumeration count fits in u64"),
    })
}
