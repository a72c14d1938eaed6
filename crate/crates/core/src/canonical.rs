//! Canonical summands `H_n(λ)`, `K_n`, `L_n`, their direct sums, and the
//! congruence action `(A, B) ↦ (SᵀAS, SᵀBS)` on pairs of skew-symmetric
//! matrices.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Condition numbers above this trigger a warning in [`SkewPair::congruence`].
pub const CONGRUENCE_COND_WARN: f64 = 1e12;

/// Upper-bidiagonal Jordan block with `lambda` on the diagonal.
pub fn make_jordan<T: Scalar>(n: usize, lambda: &T) -> Result<DenseMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidBlock("Jordan block needs n >= 1".into()));
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// `F_n = [I_n | 0]`, an `n × (n+1)` matrix.
pub fn make_f<T: Scalar>(n: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(n, n + 1, |i, j| if i == j { T::one() } else { T::zero() })
}

/// `G_n = [0 | I_n]`, an `n × (n+1)` matrix.
pub fn make_g<T: Scalar>(n: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(
        n,
        n + 1,
        |i, j| if j == i + 1 { T::one() } else { T::zero() },
    )
}

/// `[[0, X], [-Xᵀ, 0]]`.
fn skew_embed<T: Scalar>(x: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (r, c) = x.shape();
    let mut m = DenseMatrix::zeros(r + c, r + c);
    m.set_block(0, r, x);
    m.set_block(r, 0, &x.transpose().map(|v| -v.clone()));
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    H,
    K,
    L,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::H => "H",
            BlockKind::K => "K",
            BlockKind::L => "L",
        })
    }
}

/// One indecomposable summand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalBlock {
    kind: BlockKind,
    size: usize,
    eigenvalue: Option<Complex64>,
}

impl CanonicalBlock {
    /// `H_n(λ)`, dimension `2n`, `n ≥ 1`.
    pub fn h(n: usize, lambda: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBlock("H_n needs n >= 1".into()));
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            kind: BlockKind::H,
            size: n,
            eigenvalue: Some(lambda),
        })
    }

    /// `K_n`, dimension `2n`, `n ≥ 1`.
    pub fn k(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBlock("K_n needs n >= 1".into()));
        }
        Ok(Self {
            kind: BlockKind::K,
            size: n,
            eigenvalue: None,
        })
    }

    /// `L_n`, dimension `2n + 1`; `L_0` is the 1×1 zero pair.
    pub fn l(n: usize) -> Self {
        Self {
            kind: BlockKind::L,
            size: n,
            eigenvalue: None,
        }
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eigenvalue(&self) -> Option<Complex64> {
        self.eigenvalue
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BlockKind::H | BlockKind::K => 2 * self.size,
            BlockKind::L => 2 * self.size + 1,
        }
    }

    /// Library order: H by (Re λ, Im λ, n descending), then K, then L, each by n descending.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.kind.cmp(&other.kind).then_with(|| {
            let by_lambda = match (self.eigenvalue, other.eigenvalue) {
                (Some(a), Some(b)) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
                _ => Ordering::Equal,
            };
            by_lambda.then(other.size.cmp(&self.size))
        })
    }
}

impl fmt::Display for CanonicalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eigenvalue {
            Some(l) if l.im == 0.0 => write!(f, "{}_{}({})", self.kind, self.size, l.re),
            Some(l) => write!(f, "{}_{}({}{:+}i)", self.kind, self.size, l.re, l.im),
            None => write!(f, "{}_{}", self.kind, self.size),
        }
    }
}

/// Ordered direct sum of canonical blocks, always held in canonical order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CanonicalStructure {
    blocks: Vec<CanonicalBlock>,
}

impl CanonicalStructure {
    pub fn new(mut blocks: Vec<CanonicalBlock>) -> Self {
        blocks.sort_by(CanonicalBlock::canonical_cmp);
        Self { blocks }
    }

    pub fn blocks(&self) -> &[CanonicalBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(CanonicalBlock::dim).sum()
    }

    /// Start offset of every block plus the total dimension at the end.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let mut acc = 0;
        out.push(0);
        for b in &self.blocks {
            acc += b.dim();
            out.push(acc);
        }
        out
    }

    pub fn to_pair<T: Scalar>(&self) -> SkewPair<T> {
        let parts: Vec<SkewPair<T>> = self.blocks.iter().map(make_block).collect();
        direct_sum(&parts)
    }
}

impl fmt::Display for CanonicalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("∅");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊕ ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A pair `(A, B)` of `n × n` skew-symmetric matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewPair<T> {
    a: DenseMatrix<T>,
    b: DenseMatrix<T>,
}

impl<T: Scalar> SkewPair<T> {
    pub fn new(a: DenseMatrix<T>, b: DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!(
                "pair needs two equal square matrices, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        if !a.is_skew() {
            return Err(Error::NotSkew("first matrix".into()));
        }
        if !b.is_skew() {
            return Err(Error::NotSkew("second matrix".into()));
        }
        Ok(Self { a, b })
    }

    /// Wraps matrices whose skew-symmetry holds by construction.
    pub(crate) fn from_parts(a: DenseMatrix<T>, b: DenseMatrix<T>) -> Self {
        debug_assert!(a.is_square() && a.shape() == b.shape());
        Self { a, b }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_parts(DenseMatrix::zeros(n, n), DenseMatrix::zeros(n, n))
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &DenseMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix<T> {
        &self.b
    }

    pub fn parts(&self) -> [&DenseMatrix<T>; 2] {
        [&self.a, &self.b]
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "pairs of size {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self::from_parts(&self.a + &other.a, &self.b + &other.b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self::from_parts(&self.a - &other.a, &self.b - &other.b))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_parts(self.a.scale(s), self.b.scale(s))
    }

    /// `(SᵀAS, SᵀBS)`. Logs a warning when `S` is badly conditioned.
    pub fn congruence(&self, s: &DenseMatrix<T>) -> Result<Self> {
        if s.shape() != (self.n(), self.n()) {
            return Err(Error::DimensionMismatch(format!(
                "congruence by {}x{} on a pair of size {}",
                s.rows(),
                s.cols(),
                self.n()
            )));
        }
        let cond = linalg::condition_number(&s.to_complex());
        if cond > CONGRUENCE_COND_WARN {
            log::warn!("congruence transform has condition estimate {cond:.3e}");
        }
        let st = s.transpose();
        Ok(Self::from_parts(&(&st * &self.a) * s, &(&st * &self.b) * s))
    }

    /// `(CᵀA + AC, CᵀB + BC)` for an arbitrary square `C`.
    pub fn tangent_action(&self, c: &DenseMatrix<T>) -> Result<Self> {
        if c.shape() != (self.n(), self.n()) {
            return Err(Error::DimensionMismatch(format!(
                "tangent direction {}x{} on a pair of size {}",
                c.rows(),
                c.cols(),
                self.n()
            )));
        }
        let ct = c.transpose();
        Ok(Self::from_parts(
            &(&ct * &self.a) + &(&self.a * c),
            &(&ct * &self.b) + &(&self.b * c),
        ))
    }

    /// `sqrt(‖A‖² + ‖B‖²)`.
    pub fn frobenius(&self) -> f64 {
        self.a.frobenius().hypot(self.b.frobenius())
    }

    pub fn to_complex(&self) -> SkewPair<Complex64> {
        SkewPair::from_parts(self.a.to_complex(), self.b.to_complex())
    }

    /// Replaces both matrices by their exact skew parts (removes rounding drift).
    pub fn skew_projected(&self) -> Self {
        Self::from_parts(self.a.skew_part(), self.b.skew_part())
    }
}

pub fn make_block<T: Scalar>(b: &CanonicalBlock) -> SkewPair<T> {
    let n = b.size();
    match b.kind() {
        BlockKind::H => {
            let lambda = T::from_complex(b.eigenvalue().expect("H block carries an eigenvalue"));
            let j = make_jordan(n, &lambda).expect("n >= 1 for H blocks");
            SkewPair::from_parts(skew_embed(&DenseMatrix::identity(n)), skew_embed(&j))
        }
        BlockKind::K => {
            let j = make_jordan(n, &T::zero()).expect("n >= 1 for K blocks");
            SkewPair::from_parts(skew_embed(&j), skew_embed(&DenseMatrix::identity(n)))
        }
        BlockKind::L => SkewPair::from_parts(skew_embed(&make_f(n)), skew_embed(&make_g(n))),
    }
}

/// Block-diagonal stacking of the A-parts and of the B-parts.
pub fn direct_sum<T: Scalar>(pairs: &[SkewPair<T>]) -> SkewPair<T> {
    let n: usize = pairs.iter().map(SkewPair::n).sum();
    let mut a = DenseMatrix::zeros(n, n);
    let mut b = DenseMatrix::zeros(n, n);
    let mut off = 0;
    for p in pairs {
        a.set_block(off, off, p.a());
        b.set_block(off, off, p.b());
        off += p.n();
    }
    SkewPair::from_parts(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    type Q = GaussRational;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn qm(rows: usize, cols: usize, v: &[i64]) -> DenseMatrix<Q> {
        DenseMatrix::new(rows, cols, v.iter().map(|&x| q(x)).collect()).unwrap()
    }

    #[test]
    fn jordan_blocks() {
        assert_eq!(make_jordan(1, &q(5)).unwrap(), qm(1, 1, &[5]));
        assert_eq!(make_jordan(2, &q(0)).unwrap(), qm(2, 2, &[0, 1, 0, 0]));
        let j3 = make_jordan(3, &q(2)).unwrap();
        assert_eq!(j3[(1, 2)], q(1));
        assert_eq!(j3[(2, 0)], q(0));
        assert!(make_jordan::<Q>(0, &q(1)).is_err());
    }

    #[test]
    fn f_and_g() {
        assert_eq!(make_f::<Q>(0).shape(), (0, 1));
        assert_eq!(make_g::<Q>(0).shape(), (0, 1));
        assert_eq!(make_f::<Q>(1), qm(1, 2, &[1, 0]));
        assert_eq!(make_g::<Q>(1), qm(1, 2, &[0, 1]));
        let f2 = make_f::<Q>(2);
        let g2 = make_g::<Q>(2);
        assert_eq!((f2[(0, 0)].clone(), f2[(1, 1)].clone()), (q(1), q(1)));
        assert_eq!((g2[(0, 1)].clone(), g2[(1, 2)].clone()), (q(1), q(1)));
        assert_eq!(f2.entries().iter().filter(|x| !x.is_zero()).count(), 2);
    }

    #[test]
    fn h1_k1_l0_blocks() {
        let lambda = Complex64::new(3.0, -1.0);
        let h = make_block::<Q>(&CanonicalBlock::h(1, lambda).unwrap());
        let l = Q::from_complex(lambda);
        assert_eq!(h.a(), &qm(2, 2, &[0, 1, -1, 0]));
        assert_eq!(
            h.b(),
            &DenseMatrix::new(2, 2, vec![q(0), l.clone(), -l, q(0)]).unwrap()
        );

        let k = make_block::<Q>(&CanonicalBlock::k(1).unwrap());
        assert_eq!(k.a(), &qm(2, 2, &[0, 0, 0, 0]));
        assert_eq!(k.b(), &qm(2, 2, &[0, 1, -1, 0]));

        let l0 = make_block::<Q>(&CanonicalBlock::l(0));
        assert_eq!(l0.n(), 1);
        assert!(l0.a()[(0, 0)].is_zero() && l0.b()[(0, 0)].is_zero());
    }

    #[test]
    fn blocks_are_exactly_skew_with_expected_dims() {
        let blocks = [
            CanonicalBlock::h(3, Complex64::new(0.5, 2.0)).unwrap(),
            CanonicalBlock::k(4).unwrap(),
            CanonicalBlock::l(3),
        ];
        for b in blocks {
            let p = make_block::<Q>(&b);
            assert_eq!(p.n(), b.dim());
            assert!(p.a().is_skew() && p.b().is_skew());
        }
        assert!(CanonicalBlock::h(0, Complex64::new(0.0, 0.0)).is_err());
        assert!(CanonicalBlock::k(0).is_err());
        assert!(CanonicalBlock::h(1, Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn direct_sums() {
        assert_eq!(direct_sum::<Q>(&[]).n(), 0);
        let h = make_block::<Q>(&CanonicalBlock::h(1, Complex64::new(0.0, 0.0)).unwrap());
        let s = direct_sum(&[h.clone(), h.clone()]);
        assert_eq!(s.n(), 4);
        assert_eq!(s.a().submatrix(2, 2, 2, 2), *h.a());
        assert!(s.a()[(0, 2)].is_zero() && s.a()[(1, 3)].is_zero());
        let l0 = make_block::<Q>(&CanonicalBlock::l(0));
        let z = direct_sum(&[l0.clone(), l0]);
        assert_eq!(z, SkewPair::zeros(2));
    }

    #[test]
    fn canonical_order() {
        let s = CanonicalStructure::new(vec![
            CanonicalBlock::l(0),
            CanonicalBlock::l(2),
            CanonicalBlock::k(1).unwrap(),
            CanonicalBlock::h(1, Complex64::new(1.0, 0.0)).unwrap(),
            CanonicalBlock::h(2, Complex64::new(0.0, 1.0)).unwrap(),
            CanonicalBlock::h(3, Complex64::new(0.0, 1.0)).unwrap(),
            CanonicalBlock::k(3).unwrap(),
        ]);
        let names: Vec<String> = s.blocks().iter().map(|b| b.to_string()).collect();
        assert_eq!(
            names,
            [
                "H_3(0+1i)",
                "H_2(0+1i)",
                "H_1(1)",
                "K_3",
                "K_1",
                "L_2",
                "L_0"
            ]
        );
        assert_eq!(s.dim(), 6 + 4 + 2 + 6 + 2 + 5 + 1);
        assert_eq!(*s.offsets().last().unwrap(), s.dim());
    }

    #[test]
    fn congruence_examples() {
        let h = make_block::<Q>(&CanonicalBlock::h(1, Complex64::new(0.0, 0.0)).unwrap());
        assert_eq!(h.congruence(&DenseMatrix::identity(2)).unwrap(), h);
        let s = qm(2, 2, &[2, 0, 0, 1]);
        let t = h.congruence(&s).unwrap();
        assert_eq!(t.a(), &qm(2, 2, &[0, 2, -2, 0]));
        assert_eq!(t.b(), &qm(2, 2, &[0, 0, 0, 0]));
        assert!(h.congruence(&DenseMatrix::identity(3)).is_err());
    }

    #[test]
    fn congruence_inverse_round_trip() {
        let p = CanonicalStructure::new(vec![
            CanonicalBlock::h(2, Complex64::new(1.0, 0.0)).unwrap(),
            CanonicalBlock::l(1),
        ])
        .to_pair::<Complex64>();
        let s = DenseMatrix::from_fn(7, 7, |i, j| {
            if i == j {
                Complex64::new(2.0, 0.0)
            } else if j == i + 1 {
                Complex64::new(0.5, -0.25)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let s_inv = crate::linalg::pseudo_inverse(&s, 1e-14);
        let back = p.congruence(&s).unwrap().congruence(&s_inv).unwrap();
        assert!(back.checked_sub(&p).unwrap().frobenius() < 1e-10);
    }

    #[test]
    fn pair_rejects_non_skew_and_mismatched_inputs() {
        let ok = qm(2, 2, &[0, 1, -1, 0]);
        let bad = qm(2, 2, &[0, 1, 1, 0]);
        assert!(SkewPair::new(ok.clone(), ok.clone()).is_ok());
        assert!(matches!(
            SkewPair::new(ok.clone(), bad),
            Err(Error::NotSkew(_))
        ));
        assert!(matches!(
            SkewPair::new(ok, qm(1, 1, &[0])),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
