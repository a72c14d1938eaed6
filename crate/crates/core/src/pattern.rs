//! `(0,*)` deformation patterns.
//!
//! A [`StarPattern`] marks, for each of the two matrices of a pair, which
//! entries carry free parameters of the miniversal deformation. Patterns are
//! assembled block by block from the canonical structure; every star `(i, j)`
//! with `i < j` is an independent parameter and `(j, i)` is its skew mirror.
//!
//! Where several star placements are equally valid, the first-listed variant
//! is used everywhere: square corners use the column form, the half cap uses
//! "first row + last column".

use std::fmt;

use num_complex::Complex64;

use crate::canonical::{BlockKind, CanonicalBlock, CanonicalStructure, SkewPair};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rectangular Zero/Star mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StarMask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl StarMask {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.cells[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_star(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols + j]
    }

    pub fn set_star(&mut self, i: usize, j: usize) {
        self.cells[i * self.cols + j] = true;
    }

    pub fn star_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Star positions in row-major order.
    pub fn stars(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(k, _)| (k / self.cols, k % self.cols))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.is_star(j, i))
    }

    /// Quarter turn clockwise: an `r × c` mask becomes `c × r`.
    pub fn rotate_clockwise(&self) -> Self {
        let r = self.rows;
        Self::from_fn(self.cols, self.rows, |i, j| self.is_star(r - 1 - j, i))
    }

    fn rotated(&self, quarter_turns: usize) -> Self {
        (0..quarter_turns % 4).fold(self.clone(), |m, _| m.rotate_clockwise())
    }

    /// ORs `block` into `self` at `(r0, c0)`.
    pub fn overlay(&mut self, r0: usize, c0: usize, block: &StarMask) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (i, j) in block.stars() {
            self.set_star(r0 + i, c0 + j);
        }
    }

    pub fn submask(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.is_star(r0 + i, c0 + j))
    }

    /// Rows of 0/1 flags, as used in the JSON pattern encoding.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| u8::from(self.is_star(i, j)))
                    .collect()
            })
            .collect()
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidPattern("ragged mask rows".into()));
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return Err(Error::InvalidPattern("mask entries must be 0 or 1".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j] == 1))
    }
}

impl fmt::Debug for StarMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "StarMask {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|j| if self.is_star(i, j) { '*' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Named star placements used to build the pattern blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeTag {
    Zeros,
    CornerNW,
    CornerNE,
    CornerSE,
    CornerSW,
    EdgeLeft,
    EdgeRight,
    BottomRightStar,
    RightHalfCap,
    /// `Q_{rows, cols}`: `cols - rows` stars in the last row when `rows < cols`.
    Q,
    /// Transpose of `Q_{cols, rows}`.
    QTranspose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternBlockShape {
    pub tag: ShapeTag,
    pub rows: usize,
    pub cols: usize,
}

impl PatternBlockShape {
    pub fn new(tag: ShapeTag, rows: usize, cols: usize) -> Self {
        Self { tag, rows, cols }
    }
}

/// North-west corner: first column when `rows <= cols`, first row otherwise.
fn corner_nw(rows: usize, cols: usize) -> StarMask {
    if rows <= cols {
        StarMask::from_fn(rows, cols, |_, j| j == 0)
    } else {
        StarMask::from_fn(rows, cols, |i, _| i == 0)
    }
}

fn q_mask(n: usize, m: usize) -> StarMask {
    if n == 0 || n >= m {
        return StarMask::zeros(n, m);
    }
    StarMask::from_fn(n, m, |i, j| i == n - 1 && j + 1 >= n && j + 2 <= m)
}

/// Renders a shape at its requested size. Rotated corners are produced by
/// rotating the north-west corner of the pre-rotation size.
pub fn render_shape(shape: &PatternBlockShape) -> StarMask {
    let (r, c) = (shape.rows, shape.cols);
    match shape.tag {
        ShapeTag::Zeros => StarMask::zeros(r, c),
        ShapeTag::CornerNW => corner_nw(r, c),
        ShapeTag::CornerNE => corner_nw(c, r).rotated(1),
        ShapeTag::CornerSE => corner_nw(r, c).rotated(2),
        ShapeTag::CornerSW => corner_nw(c, r).rotated(3),
        ShapeTag::EdgeLeft => StarMask::from_fn(r, c, |_, j| j == 0),
        ShapeTag::EdgeRight => StarMask::from_fn(r, c, |_, j| j + 1 == c),
        ShapeTag::BottomRightStar => StarMask::from_fn(r, c, |i, j| i + 1 == r && j + 1 == c),
        ShapeTag::RightHalfCap => StarMask::from_fn(r, c, |i, j| i == 0 || j + 1 == c),
        ShapeTag::Q => q_mask(r, c),
        ShapeTag::QTranspose => q_mask(c, r).transpose(),
    }
}

fn shape(tag: ShapeTag, rows: usize, cols: usize) -> StarMask {
    render_shape(&PatternBlockShape::new(tag, rows, cols))
}

/// How eigenvalues are compared when deciding whether two `H` blocks interact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMatch {
    Exact,
    Tolerance(f64),
}

impl Default for LambdaMatch {
    fn default() -> Self {
        LambdaMatch::Tolerance(1e-10)
    }
}

impl LambdaMatch {
    pub fn matches(&self, a: Complex64, b: Complex64) -> bool {
        match *self {
            LambdaMatch::Exact => a == b,
            LambdaMatch::Tolerance(tol) => (a - b).norm() <= tol,
        }
    }
}

/// Diagonal pattern block of a single summand, as `(A-mask, B-mask)`.
pub fn diag_block(b: &CanonicalBlock) -> (StarMask, StarMask) {
    let d = b.dim();
    let n = b.size();
    let zero = StarMask::zeros(d, d);
    let corners = || {
        let mut m = StarMask::zeros(d, d);
        let upper = shape(ShapeTag::CornerSW, n, n);
        m.overlay(0, n, &upper);
        m.overlay(n, 0, &upper.transpose());
        m
    };
    match b.kind() {
        BlockKind::H => (zero, corners()),
        BlockKind::K => (corners(), zero),
        BlockKind::L => (zero.clone(), zero),
    }
}

fn four_corners(n: usize, m: usize) -> StarMask {
    let mut out = StarMask::zeros(2 * n, 2 * m);
    out.overlay(0, 0, &shape(ShapeTag::CornerSE, n, m));
    out.overlay(0, m, &shape(ShapeTag::CornerSW, n, m));
    out.overlay(n, 0, &shape(ShapeTag::CornerNE, n, m));
    out.overlay(n, m, &shape(ShapeTag::CornerNW, n, m));
    out
}

/// The `(i, j)` off-diagonal pattern block for summands `bi`, `bj`, as
/// `(A-mask, B-mask)` of size `dim(bi) × dim(bj)`. The `(j, i)` block is the
/// transposed mirror and is not returned.
pub fn offdiag_block(
    bi: &CanonicalBlock,
    bj: &CanonicalBlock,
    lambda: LambdaMatch,
) -> (StarMask, StarMask) {
    use BlockKind::*;
    let (r, c) = (bi.dim(), bj.dim());
    let (n, m) = (bi.size(), bj.size());
    let zero = StarMask::zeros(r, c);
    match (bi.kind(), bj.kind()) {
        (H, H) => {
            let same = lambda.matches(
                bi.eigenvalue().expect("H has eigenvalue"),
                bj.eigenvalue().expect("H has eigenvalue"),
            );
            if same {
                (zero, four_corners(n, m))
            } else {
                (zero.clone(), zero)
            }
        }
        (K, K) => (four_corners(n, m), zero),
        (L, L) => {
            let a = shape(ShapeTag::BottomRightStar, r, c);
            let mut b = StarMask::zeros(r, c);
            b.overlay(0, m, &shape(ShapeTag::QTranspose, n, m + 1));
            b.overlay(n, 0, &shape(ShapeTag::Q, n + 1, m));
            b.overlay(n, m, &shape(ShapeTag::RightHalfCap, n + 1, m + 1));
            (a, b)
        }
        (H, K) => (zero.clone(), zero),
        (H, L) => {
            let mut b = StarMask::zeros(r, c);
            b.overlay(0, m, &shape(ShapeTag::EdgeLeft, r, m + 1));
            (zero, b)
        }
        (K, L) => {
            let mut a = StarMask::zeros(r, c);
            a.overlay(0, m, &shape(ShapeTag::EdgeRight, r, m + 1));
            (a, zero)
        }
        (K, H) | (L, H) | (L, K) => {
            let (a, b) = offdiag_block(bj, bi, lambda);
            (a.transpose(), b.transpose())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairSlot {
    A,
    B,
}

/// One independent parameter: the star at `(row, col)` with `row < col`;
/// its mirror `(col, row)` carries the negated value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarParam {
    pub slot: PairSlot,
    pub row: usize,
    pub col: usize,
}

impl StarParam {
    pub fn mirror(&self) -> (usize, usize) {
        (self.col, self.row)
    }
}

/// A `(0,*)` pattern for a pair of `n × n` skew matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarPattern {
    n: usize,
    mask_a: StarMask,
    mask_b: StarMask,
    partition: Vec<usize>,
}

impl StarPattern {
    /// Validates that both masks are `n × n`, position-symmetric and star-free on the diagonal.
    pub fn from_masks(mask_a: StarMask, mask_b: StarMask) -> Result<Self> {
        let n = mask_a.rows();
        if mask_a.shape() != (n, n) || mask_b.shape() != (n, n) {
            return Err(Error::InvalidPattern(format!(
                "masks must be square and equal: {:?} vs {:?}",
                mask_a.shape(),
                mask_b.shape()
            )));
        }
        for (name, m) in [("A", &mask_a), ("B", &mask_b)] {
            for (i, j) in m.stars() {
                if i == j {
                    return Err(Error::InvalidPattern(format!(
                        "{name}-mask has a diagonal star at ({i}, {j})"
                    )));
                }
                if !m.is_star(j, i) {
                    return Err(Error::InvalidPattern(format!(
                        "{name}-mask star ({i}, {j}) lacks its mirror"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            mask_a,
            mask_b,
            partition: vec![0, n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask_a(&self) -> &StarMask {
        &self.mask_a
    }

    pub fn mask_b(&self) -> &StarMask {
        &self.mask_b
    }

    pub fn mask(&self, slot: PairSlot) -> &StarMask {
        match slot {
            PairSlot::A => &self.mask_a,
            PairSlot::B => &self.mask_b,
        }
    }

    /// Block offsets of the structure this pattern was assembled from.
    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    /// Star positions of the first matrix (both triangles).
    pub fn index_set_a(&self) -> Vec<(usize, usize)> {
        self.mask_a.stars().collect()
    }

    /// Star positions of the second matrix (both triangles).
    pub fn index_set_b(&self) -> Vec<(usize, usize)> {
        self.mask_b.stars().collect()
    }

    /// Independent parameters: strict-upper stars, A first, row-major.
    pub fn params(&self) -> Vec<StarParam> {
        let mut out = Vec::new();
        for slot in [PairSlot::A, PairSlot::B] {
            for (row, col) in self.mask(slot).stars() {
                if row < col {
                    out.push(StarParam { slot, row, col });
                }
            }
        }
        out
    }

    /// `(|I₁| + |I₂|) / 2`.
    pub fn param_count(&self) -> usize {
        (self.mask_a.star_count() + self.mask_b.star_count()) / 2
    }

    /// Star counts `(A, B)` inside block `(i, j)` of the partition.
    pub fn block_star_count(&self, i: usize, j: usize) -> (usize, usize) {
        let p = &self.partition;
        let (r0, r1, c0, c1) = (p[i], p[i + 1], p[j], p[j + 1]);
        let count = |m: &StarMask| m.submask(r0, c0, r1 - r0, c1 - c0).star_count();
        (count(&self.mask_a), count(&self.mask_b))
    }

    /// Sub-pattern on the listed blocks (in the given order), with its own partition.
    pub fn restrict(&self, blocks: &[usize]) -> Self {
        let p = &self.partition;
        let index: Vec<usize> = blocks.iter().flat_map(|&k| p[k]..p[k + 1]).collect();
        let pick = |m: &StarMask| {
            StarMask::from_fn(index.len(), index.len(), |i, j| {
                m.is_star(index[i], index[j])
            })
        };
        let mut partition = vec![0];
        for &k in blocks {
            let last = *partition.last().expect("nonempty");
            partition.push(last + p[k + 1] - p[k]);
        }
        Self {
            n: index.len(),
            mask_a: pick(&self.mask_a),
            mask_b: pick(&self.mask_b),
            partition,
        }
    }

    /// `sqrt(‖M‖²_D + ‖R‖²_D)`: Frobenius norm of the pair off the star positions.
    pub fn off_pattern_norm<T: Scalar>(&self, pair: &SkewPair<T>) -> Result<f64> {
        let a = pair.a().frobenius_off_pattern(&self.mask_a)?;
        let b = pair.b().frobenius_off_pattern(&self.mask_b)?;
        Ok(a.hypot(b))
    }

    /// Zeroes every entry of `pair` that sits on a star.
    pub fn remove_stars<T: Scalar>(&self, pair: &SkewPair<T>) -> SkewPair<T> {
        let strip = |m: &crate::matrix::DenseMatrix<T>, mask: &StarMask| {
            crate::matrix::DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| {
                if mask.is_star(i, j) {
                    T::zero()
                } else {
                    m[(i, j)].clone()
                }
            })
        };
        SkewPair::from_parts(strip(pair.a(), &self.mask_a), strip(pair.b(), &self.mask_b))
    }
}

/// Assembles the full pattern with the default eigenvalue tolerance.
pub fn assemble(structure: &CanonicalStructure) -> StarPattern {
    assemble_with(structure, LambdaMatch::default())
}

pub fn assemble_with(structure: &CanonicalStructure, lambda: LambdaMatch) -> StarPattern {
    let n = structure.dim();
    let offsets = structure.offsets();
    let blocks = structure.blocks();
    let mut mask_a = StarMask::zeros(n, n);
    let mut mask_b = StarMask::zeros(n, n);
    for (i, bi) in blocks.iter().enumerate() {
        let (da, db) = diag_block(bi);
        mask_a.overlay(offsets[i], offsets[i], &da);
        mask_b.overlay(offsets[i], offsets[i], &db);
        for (j, bj) in blocks.iter().enumerate().skip(i + 1) {
            let (oa, ob) = offdiag_block(bi, bj, lambda);
            mask_a.overlay(offsets[i], offsets[j], &oa);
            mask_b.overlay(offsets[i], offsets[j], &ob);
            mask_a.overlay(offsets[j], offsets[i], &oa.transpose());
            mask_b.overlay(offsets[j], offsets[i], &ob.transpose());
        }
    }
    StarPattern {
        n,
        mask_a,
        mask_b,
        partition: offsets,
    }
}

/// Orbit codimension = number of independent stars.
pub fn codimension(structure: &CanonicalStructure) -> usize {
    assemble(structure).param_count()
}
