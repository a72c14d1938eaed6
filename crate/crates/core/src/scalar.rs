//! Scalar backends.
//!
//! Two fields are supported behind the [`Scalar`] trait: double-precision
//! complex numbers ([`Complex64`]) for iterative work and exact Gaussian
//! rationals ([`GaussRational`]) for rank decisions. Every finite `f64` is a
//! dyadic rational, so converting a floating eigenvalue into the exact backend
//! loses nothing.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::linalg;
use crate::matrix::DenseMatrix;

/// `p + q i` with `p, q` arbitrary-precision rationals.
pub type GaussRational = Complex<BigRational>;

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality and rank decisions are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Converts a finite complex number. Callers guarantee finiteness.
    fn from_complex(z: Complex64) -> Self;
    fn to_complex(&self) -> Complex64;

    /// Exact zero test (no tolerance, even in floating mode).
    fn is_zero(&self) -> bool;

    /// Rank of `m`: exact elimination for exact scalars, thresholded SVD otherwise.
    fn rank(m: &DenseMatrix<Self>) -> usize;

    fn norm_sqr(&self) -> f64 {
        self.to_complex().norm_sqr()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_complex(z: Complex64) -> Self {
        z
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn rank(m: &DenseMatrix<Self>) -> usize {
        linalg::svd_rank(m, linalg::RANK_RTOL)
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }

    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(
            BigRational::from_integer(BigInt::from(v)),
            BigRational::zero(),
        )
    }

    fn from_complex(z: Complex64) -> Self {
        let re = BigRational::from_float(z.re).expect("finite real part");
        let im = BigRational::from_float(z.im).expect("finite imaginary part");
        Complex::new(re, im)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn rank(m: &DenseMatrix<Self>) -> usize {
        linalg::exact_rank(m)
    }
}

/// Arithmetic backend selector used by the CLI and bindings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected exact|float)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_roundtrip_of_dyadic_values() {
        let z = Complex64::new(0.375, -2.5);
        let q = GaussRational::from_complex(z);
        assert_eq!(q.to_complex(), z);
        assert!(!Scalar::is_zero(&q));
        assert!(Scalar::is_zero(&<GaussRational as Scalar>::zero()));
    }

    #[test]
    fn exact_division_is_exact() {
        let a = GaussRational::from_complex(Complex64::new(1.0, 1.0));
        let b = GaussRational::from_complex(Complex64::new(0.0, 3.0));
        let q = a.clone() / b.clone();
        assert_eq!(q * b, a);
    }

    #[test]
    fn backend_parses() {
        assert_eq!("exact".parse::<Backend>(), Ok(Backend::Exact));
        assert_eq!("float".parse::<Backend>(), Ok(Backend::Float));
        assert!("fast".parse::<Backend>().is_err());
    }
}
