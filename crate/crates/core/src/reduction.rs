//! Iterative reduction of a perturbed canonical pair to pattern form.
//!
//! Each step solves the linearised condition
//! `off(P - base) + off(XᵀP + PX) = 0` for a minimum-norm `X`, with the
//! *current* pair `P` as coefficients, then replaces `P` by `(I+X)ᵀP(I+X)`.
//! The off-pattern residual then drops quadratically. Freezing the
//! coefficients at the canonical pair ([`Linearization::Base`]) also
//! converges, but only linearly.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::SkewPair;
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::matrix::DenseMatrix;
use crate::pattern::StarPattern;
use crate::scalar::Scalar;
use crate::tangent::{off_pattern_coords, pair_coords, tangent_map, verify_direct_sum};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 30;

/// The constants `m`, `ε_i`, `δ_i` certifying quadratic convergence inside
/// the basin `‖(M, R)‖ < m⁻⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationSchedule {
    m: u64,
}

impl IterationSchedule {
    pub fn new(m: u64) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidSchedule(format!(
                "m = {m} must be at least 3"
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `m⁻⁴`.
    pub fn basin(&self) -> f64 {
        (self.m as f64).powi(-4)
    }

    /// `ε_i = m^{-e_i}` with `e_1 = 4`, `e_{i+1} = 2e_i - 1`.
    pub fn epsilon_exponent(i: usize) -> u128 {
        assert!(i >= 1, "schedule is indexed from 1");
        (1..i).fold(4u128, |e, _| 2 * e - 1)
    }

    pub fn epsilon(&self, i: usize) -> f64 {
        let e = Self::epsilon_exponent(i);
        (self.m as f64).powf(-(e as f64))
    }

    /// `δ_1 = m⁻⁴`, `δ_{i+1} = δ_i + m·ε_i`.
    pub fn delta(&self, i: usize) -> f64 {
        let m = self.m as f64;
        (1..i).fold(self.basin(), |d, k| d + m * self.epsilon(k))
    }

    /// Exact check of `ε_i ≤ m^{-2i}`, `δ_i < m^{-2}` for `i ≤ terms`, and
    /// `Σ_{i ≤ terms} ε_i < 1`. All three quantities are sums of powers of
    /// `1/m`, compared digit by digit in base `m`.
    pub fn check_exact(&self, terms: usize) -> ScheduleCheck {
        let m = self.m;
        let mut eps_ok = true;
        let mut delta_ok = true;
        let mut sum = RadixFraction::new(m);
        let mut delta = RadixFraction::new(m);
        delta.add_power(4, 1);
        let m_sq_inv = RadixFraction::power(m, 2);
        for i in 1..=terms {
            let e = Self::epsilon_exponent(i);
            // ε_i ≤ m^{-2i} ⟺ e_i ≥ 2i.
            eps_ok &= e >= 2 * i as u128;
            delta_ok &= delta < m_sq_inv;
            sum.add_power(e, 1);
            // m·ε_i = m^{-(e_i - 1)}.
            delta.add_power(e - 1, 1);
        }
        ScheduleCheck {
            m,
            terms,
            epsilon_bound: eps_ok,
            delta_bound: delta_ok,
            epsilon_sum_below_one: sum < RadixFraction::one(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub m: u64,
    pub terms: usize,
    pub epsilon_bound: bool,
    pub delta_bound: bool,
    pub epsilon_sum_below_one: bool,
}

impl ScheduleCheck {
    pub fn all_ok(&self) -> bool {
        self.epsilon_bound && self.delta_bound && self.epsilon_sum_below_one
    }
}

/// Exact non-negative rational `Σ d_k m^{-k}` with sparse, normalised digits
/// (`0 < d_k < m`). Position `0` is the units digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadixFraction {
    base: u64,
    digits: BTreeMap<u128, u64>,
}

impl RadixFraction {
    pub fn new(base: u64) -> Self {
        assert!(base >= 2);
        Self {
            base,
            digits: BTreeMap::new(),
        }
    }

    pub fn one(base: u64) -> Self {
        Self::power(base, 0)
    }

    /// `base^{-k}`.
    pub fn power(base: u64, k: u128) -> Self {
        let mut r = Self::new(base);
        r.add_power(k, 1);
        r
    }

    /// Adds `coeff · base^{-k}` and propagates carries towards position 0.
    /// Values that would reach `base^1` or beyond saturate at the units digit's carry.
    pub fn add_power(&mut self, k: u128, coeff: u64) {
        let mut pos = k;
        let mut carry = coeff;
        while carry > 0 {
            let d = self.digits.entry(pos).or_insert(0);
            let total = *d as u128 + carry as u128;
            let base = self.base as u128;
            *d = (total % base) as u64;
            carry = (total / base) as u64;
            if *d == 0 {
                self.digits.remove(&pos);
            }
            if carry == 0 {
                break;
            }
            assert!(pos > 0, "radix fraction overflowed past the units digit");
            pos -= 1;
        }
    }
}

impl PartialOrd for RadixFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base {
            return None;
        }
        // Most significant digit first = smallest position first.
        let mut a = self.digits.iter();
        let mut b = other.digits.iter();
        loop {
            return Some(match (a.next(), b.next()) {
                (None, None) => Ordering::Equal,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some((pa, da)), Some((pb, db))) => match pa.cmp(pb) {
                    Ordering::Less => Ordering::Greater,
                    Ordering::Greater => Ordering::Less,
                    Ordering::Equal => match da.cmp(db) {
                        Ordering::Equal => continue,
                        o => o,
                    },
                },
            });
        }
    }
}

fn off_pattern_pinv(pair: &SkewPair<Complex64>, pattern: &StarPattern) -> DenseMatrix<Complex64> {
    let off = tangent_map(pair).off_pattern_rows(pattern);
    linalg::pseudo_inverse(&off, RANK_RTOL)
}

/// Computes `m` for `(base, pattern)`. `c` is the sum of the Frobenius norms
/// of the minimum-norm corrections removing each off-pattern skew
/// elementary pair `E_ij - E_ji`, i.e. the column norms of the
/// pseudo-inverse of the off-pattern tangent rows.
pub fn schedule_for<T: Scalar>(
    base: &SkewPair<T>,
    pattern: &StarPattern,
) -> Result<IterationSchedule> {
    let report = verify_direct_sum(base, pattern)?;
    if !report.direct_sum_ok {
        return Err(report.to_error());
    }
    let pair = base.to_complex();
    let pinv = off_pattern_pinv(&pair, pattern);
    let c: f64 = (0..pinv.cols())
        .map(|k| {
            (0..pinv.rows())
                .map(|r| pinv[(r, k)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    let a = pair.a().frobenius();
    let b = pair.b().frobenius();
    let bound = [
        c,
        c * (a + 1.0) * (2.0 + c),
        c * (b + 1.0) * (2.0 + c),
        c * c * (a + 1.0),
        c * c * (b + 1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return Err(Error::InvalidSchedule(format!(
            "bound {bound} out of range"
        )));
    }
    let m = (bound.floor() as u64 + 1).max(3);
    IterationSchedule::new(m)
}

fn check_pair_sizes(
    base: &SkewPair<Complex64>,
    other: &SkewPair<Complex64>,
    pattern: &StarPattern,
) -> Result<()> {
    if base.n() != other.n() || base.n() != pattern.n() {
        return Err(Error::DimensionMismatch(format!(
            "base {}, pair {}, pattern {}",
            base.n(),
            other.n(),
            pattern.n()
        )));
    }
    Ok(())
}

/// Minimum-norm `X` with `off((current - base) + Xᵀ·current + current·X) = 0`.
pub fn correction_step(
    base: &SkewPair<Complex64>,
    current: &SkewPair<Complex64>,
    pattern: &StarPattern,
) -> Result<DenseMatrix<Complex64>> {
    check_pair_sizes(base, current, pattern)?;
    let t_off = tangent_map(current).off_pattern_rows(pattern);
    let pinv = linalg::pseudo_inverse(&t_off, RANK_RTOL);
    solve_step(base, current, pattern, &t_off, &pinv)
}

fn solve_step(
    base: &SkewPair<Complex64>,
    current: &SkewPair<Complex64>,
    pattern: &StarPattern,
    t_off: &DenseMatrix<Complex64>,
    pinv: &DenseMatrix<Complex64>,
) -> Result<DenseMatrix<Complex64>> {
    let n = base.n();
    let diff = pair_coords(&current.checked_sub(base)?);
    let rhs: Vec<Complex64> = off_pattern_coords(pattern)
        .iter()
        .map(|&k| -diff[k])
        .collect();
    let rhs_norm = linalg::vec_norm(&rhs);
    if rhs_norm == 0.0 {
        return Ok(DenseMatrix::zeros(n, n));
    }
    let x = linalg::mat_vec(pinv, &rhs);
    let achieved = linalg::mat_vec(t_off, &x);
    let residual = achieved
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-6 * rhs_norm + 1e-13 {
        return Err(Error::InconsistentStep { residual });
    }
    DenseMatrix::new(n, n, x)
}

/// Pair whose tangent map defines each correction step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Linearization {
    /// Re-solve against the current iterate (quadratic convergence).
    #[default]
    Current,
    /// Reuse one factorisation at the canonical pair (cheaper, linear convergence).
    Base,
}

impl std::str::FromStr for Linearization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "current" => Ok(Self::Current),
            "base" => Ok(Self::Base),
            other => Err(format!(
                "unknown linearization `{other}` (expected current|base)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceOptions {
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub linearization: Linearization,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            linearization: Linearization::Current,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub x: DenseMatrix<Complex64>,
    pub step_norm: f64,
    /// Off-pattern norm of `P - base` after this step.
    pub off_pattern_norm: f64,
    /// Full Frobenius norm of `P - base` after this step.
    pub full_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace {
    pub initial_off_pattern_norm: f64,
    pub initial_full_norm: f64,
    pub iterations: Vec<IterationRecord>,
    /// Accumulated `S = (I + X_1)(I + X_2)⋯`.
    pub s: DenseMatrix<Complex64>,
    /// `Sᵀ·perturbed·S - base`.
    pub d: SkewPair<Complex64>,
    pub converged: bool,
}

impl ReductionTrace {
    /// Off-pattern residuals `r_0, r_1, …`, starting with the input.
    pub fn residuals(&self) -> Vec<f64> {
        std::iter::once(self.initial_off_pattern_norm)
            .chain(self.iterations.iter().map(|r| r.off_pattern_norm))
            .collect()
    }

    /// `r_{i+1} / r_i²` for every step with `r_i > 0`.
    pub fn decay_constants(&self) -> Vec<f64> {
        self.residuals()
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / (w[0] * w[0]))
            .collect()
    }
}

/// Iterates correction steps until the off-pattern residual is at most `opts.tol`.
/// Running out of iterations yields a non-converged trace, not an error.
pub fn reduce(
    base: &SkewPair<Complex64>,
    perturbed: &SkewPair<Complex64>,
    pattern: &StarPattern,
    opts: &ReduceOptions,
) -> Result<ReductionTrace> {
    check_pair_sizes(base, perturbed, pattern)?;
    let n = base.n();
    let identity = DenseMatrix::<Complex64>::identity(n);
    let mut p = perturbed.clone();
    let mut s = identity.clone();
    let mut diff = p.checked_sub(base)?;
    let mut r = pattern.off_pattern_norm(&diff)?;
    let initial_full_norm = diff.frobenius();
    let initial_off_pattern_norm = r;
    let frozen = match opts.linearization {
        Linearization::Base => {
            let t_off = tangent_map(base).off_pattern_rows(pattern);
            let pinv = linalg::pseudo_inverse(&t_off, RANK_RTOL);
            Some((t_off, pinv))
        }
        Linearization::Current => None,
    };
    let mut iterations = Vec::new();
    while r > opts.tol && iterations.len() < opts.max_iter {
        let x = match &frozen {
            Some((t_off, pinv)) => solve_step(base, &p, pattern, t_off, pinv)?,
            None => correction_step(base, &p, pattern)?,
        };
        let step = &identity + &x;
        s = &s * &step;
        p = p.congruence(&step)?.skew_projected();
        diff = p.checked_sub(base)?;
        r = pattern.off_pattern_norm(&diff)?;
        log::debug!(
            "reduction step {}: off-pattern residual {r:.3e}",
            iterations.len() + 1
        );
        iterations.push(IterationRecord {
            step_norm: x.frobenius(),
            x,
            off_pattern_norm: r,
            full_norm: diff.frobenius(),
        });
    }
    Ok(ReductionTrace {
        initial_off_pattern_norm,
        initial_full_norm,
        iterations,
        s,
        d: diff,
        converged: r <= opts.tol,
    })
}
