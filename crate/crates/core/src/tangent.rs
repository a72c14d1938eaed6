//! Tangent space of the congruence orbit and the direct-sum test.
//!
//! Skew pairs are coordinatised by the strict upper triangles of both
//! matrices, `A` first, each row-major: `n(n-1)` coordinates in total. The
//! tangent map sends `vec(C)` (row-major, i.e. column `i·n + j` is `E_ij`) to
//! the coordinates of `(CᵀA + AC, CᵀB + BC)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{direct_sum, make_block, CanonicalStructure, SkewPair};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::matrix::DenseMatrix;
use crate::pattern::{assemble, PairSlot, StarPattern};
use crate::scalar::Scalar;

/// Number of strict-upper positions of an `n × n` matrix.
pub fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of `(i, j)`, `i < j`, among the row-major strict-upper entries.
pub fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Ambient coordinate of a star parameter.
pub fn coord_of(n: usize, slot: PairSlot, i: usize, j: usize) -> usize {
    let base = match slot {
        PairSlot::A => 0,
        PairSlot::B => upper_len(n),
    };
    base + upper_index(n, i, j)
}

/// Strict-upper coordinates of a pair, `A` first.
pub fn pair_coords<T: Scalar>(pair: &SkewPair<T>) -> Vec<T> {
    let n = pair.n();
    let mut out = Vec::with_capacity(2 * upper_len(n));
    for m in pair.parts() {
        for i in 0..n {
            for j in i + 1..n {
                out.push(m[(i, j)].clone());
            }
        }
    }
    out
}

/// Inverse of [`pair_coords`]: rebuilds the (exactly skew) pair.
pub fn pair_from_coords<T: Scalar>(n: usize, coords: &[T]) -> Result<SkewPair<T>> {
    let half = upper_len(n);
    if coords.len() != 2 * half {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for a pair of size {n}",
            coords.len()
        )));
    }
    let build = |off: usize| {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = coords[off + upper_index(n, i, j)].clone();
                m[(j, i)] = -v.clone();
                m[(i, j)] = v;
            }
        }
        m
    };
    Ok(SkewPair::from_parts(build(0), build(half)))
}

/// Matrix of `C ↦ (CᵀA + AC, CᵀB + BC)` in pair coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentMap<T> {
    n: usize,
    matrix: DenseMatrix<T>,
}

impl<T: Scalar> TangentMap<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        T::rank(&self.matrix)
    }

    /// Rows of the map whose coordinates are not pattern parameters.
    pub fn off_pattern_rows(&self, pattern: &StarPattern) -> DenseMatrix<T> {
        let rows = off_pattern_coords(pattern);
        let cols = self.matrix.cols();
        DenseMatrix::from_fn(rows.len(), cols, |r, c| self.matrix[(rows[r], c)].clone())
    }
}

/// Coordinates not occupied by a star parameter, ascending.
pub fn off_pattern_coords(pattern: &StarPattern) -> Vec<usize> {
    let n = pattern.n();
    let mut on = vec![false; 2 * upper_len(n)];
    for p in pattern.params() {
        on[coord_of(n, p.slot, p.row, p.col)] = true;
    }
    (0..on.len()).filter(|&k| !on[k]).collect()
}

pub fn tangent_map<T: Scalar>(pair: &SkewPair<T>) -> TangentMap<T> {
    let n = pair.n();
    let half = upper_len(n);
    let mut matrix = DenseMatrix::zeros(2 * half, n * n);
    for (s, m) in pair.parts().into_iter().enumerate() {
        let off = s * half;
        // E_ijᵀ M + M E_ij puts row i of M into row j and column i of M into column j.
        for i in 0..n {
            for j in 0..n {
                let col = i * n + j;
                for q in j + 1..n {
                    matrix[(off + upper_index(n, j, q), col)] = m[(i, q)].clone();
                }
                for p in 0..j {
                    matrix[(off + upper_index(n, p, j), col)] = m[(p, i)].clone();
                }
            }
        }
    }
    TangentMap { n, matrix }
}

/// Outcome of the direct-sum test `T(A,B) ⊕ 𝒟 = ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub rank_t: usize,
    pub params: usize,
    pub ambient: usize,
    pub intersection_dim: usize,
    pub direct_sum_ok: bool,
}

impl DecompositionReport {
    fn new(n: usize, rank_t: usize, params: usize, rank_joint: usize) -> Self {
        let ambient = n * n.saturating_sub(1);
        let intersection_dim = rank_t + params - rank_joint;
        Self {
            n,
            rank_t,
            params,
            ambient,
            intersection_dim,
            direct_sum_ok: rank_t + params == ambient && intersection_dim == 0,
        }
    }

    pub fn to_error(&self) -> Error {
        Error::NotComplementary {
            rank_t: self.rank_t,
            params: self.params,
            ambient: self.ambient,
            intersection_dim: self.intersection_dim,
        }
    }
}

fn check_dims<T>(pair: &SkewPair<T>, pattern: &StarPattern) -> Result<()>
where
    T: Scalar,
{
    if pair.n() != pattern.n() {
        return Err(Error::DimensionMismatch(format!(
            "pair of size {} against pattern of size {}",
            pair.n(),
            pattern.n()
        )));
    }
    Ok(())
}

/// Checks that the tangent space and the pattern's parameter space are
/// complementary. The parameter columns are unit vectors, so
/// `rank [T | P] = p + rank(T restricted to off-pattern rows)`.
pub fn verify_direct_sum<T: Scalar>(
    pair: &SkewPair<T>,
    pattern: &StarPattern,
) -> Result<DecompositionReport> {
    check_dims(pair, pattern)?;
    let tm = tangent_map(pair);
    let p = pattern.param_count();
    let rank_t = tm.rank();
    let rank_joint = p + T::rank(&tm.off_pattern_rows(pattern));
    Ok(DecompositionReport::new(pair.n(), rank_t, p, rank_joint))
}

/// Unique pattern-supported representative and a minimum-norm witness.
#[derive(Clone, Debug)]
pub struct Projection {
    pub d: SkewPair<Complex64>,
    pub witness: DenseMatrix<Complex64>,
}

/// Reusable projector onto the pattern along the tangent space of a fixed pair.
#[derive(Clone, Debug)]
pub struct Projector {
    n: usize,
    tangent: DenseMatrix<Complex64>,
    off_coords: Vec<usize>,
    off_pinv: DenseMatrix<Complex64>,
    report: DecompositionReport,
}

impl Projector {
    pub fn new(pair0: &SkewPair<Complex64>, pattern: &StarPattern) -> Result<Self> {
        let report = verify_direct_sum(pair0, pattern)?;
        if !report.direct_sum_ok {
            return Err(report.to_error());
        }
        let tm = tangent_map(pair0);
        let off = tm.off_pattern_rows(pattern);
        Ok(Self {
            n: pair0.n(),
            off_pinv: linalg::pseudo_inverse(&off, RANK_RTOL),
            tangent: tm.matrix,
            off_coords: off_pattern_coords(pattern),
            report,
        })
    }

    pub fn report(&self) -> &DecompositionReport {
        &self.report
    }

    /// `D = C + Sᵀ·pair0 + pair0·S` with `D` supported on the stars.
    pub fn project(&self, c: &SkewPair<Complex64>) -> Result<Projection> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "pair of size {} for a projector of size {}",
                c.n(),
                self.n
            )));
        }
        let coords = pair_coords(c);
        let rhs: Vec<Complex64> = self.off_coords.iter().map(|&k| -coords[k]).collect();
        let s = linalg::mat_vec(&self.off_pinv, &rhs);
        let ts = linalg::mat_vec(&self.tangent, &s);
        let mut d: Vec<Complex64> = coords.iter().zip(&ts).map(|(a, b)| a + b).collect();
        for &k in &self.off_coords {
            d[k] = Complex64::new(0.0, 0.0);
        }
        Ok(Projection {
            d: pair_from_coords(self.n, &d)?,
            witness: DenseMatrix::new(self.n, self.n, s)?,
        })
    }
}

/// One-shot form of [`Projector::project`].
pub fn project_to_pattern(
    pair0: &SkewPair<Complex64>,
    pattern: &StarPattern,
    c: &SkewPair<Complex64>,
) -> Result<Projection> {
    Projector::new(pair0, pattern)?.project(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub blocks: Vec<usize>,
    pub report: DecompositionReport,
}

/// Per-summand and per-pair-of-summands direct-sum checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseReport {
    pub checks: Vec<BlockCheck>,
    pub all_ok: bool,
}

impl PairwiseReport {
    /// Parameters summed over the diagonal checks plus the off-diagonal increments.
    pub fn total_params(&self) -> usize {
        let single: std::collections::HashMap<usize, usize> = self
            .checks
            .iter()
            .filter_map(|c| match c.blocks[..] {
                [i] => Some((i, c.report.params)),
                _ => None,
            })
            .collect();
        let off: usize = self
            .checks
            .iter()
            .filter_map(|c| match c.blocks[..] {
                [i, j] => Some(c.report.params - single[&i] - single[&j]),
                _ => None,
            })
            .sum();
        single.values().sum::<usize>() + off
    }
}

/// Runs the direct-sum test on every summand and every pair of summands,
/// using the restriction of the global pattern.
pub fn verify_pairwise<T: Scalar>(structure: &CanonicalStructure) -> Result<PairwiseReport> {
    let pattern = assemble(structure);
    let blocks = structure.blocks();
    let pairs: Vec<SkewPair<T>> = blocks.iter().map(make_block).collect();
    let subsets: Vec<Vec<usize>> = (0..blocks.len())
        .map(|i| vec![i])
        .chain((0..blocks.len()).flat_map(|i| (i + 1..blocks.len()).map(move |j| vec![i, j])))
        .collect();
    let checks = subsets
        .into_par_iter()
        .map(|idx| {
            let parts: Vec<SkewPair<T>> = idx.iter().map(|&k| pairs[k].clone()).collect();
            let report = verify_direct_sum(&direct_sum(&parts), &pattern.restrict(&idx))?;
            Ok(BlockCheck {
                blocks: idx,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_ok = checks.iter().all(|c| c.report.direct_sum_ok);
    Ok(PairwiseReport { checks, all_ok })
}
