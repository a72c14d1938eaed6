//! Rank and least-squares kernels.
//!
//! Exact rank is plain Gaussian elimination over the Gaussian rationals with a
//! sparsest-row pivot rule. For large dense matrices a finite-field rank
//! modulo a 31-bit prime is much cheaper and agrees except on a negligible
//! set of inputs. Floating rank and minimum-norm solves go through a
//! complex SVD (LAPACK through ndarray-linalg).

use ndarray::Array2;
use ndarray_linalg::SVD;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::matrix::DenseMatrix;
use crate::scalar::{GaussRational, Scalar};

/// Singular values at or below `RANK_RTOL · σ_max` count as zero.
pub const RANK_RTOL: f64 = 1e-9;

pub fn exact_rank(m: &DenseMatrix<GaussRational>) -> usize {
    let ncols = m.cols();
    let mut rows: Vec<Vec<GaussRational>> = (0..m.rows())
        .map(|i| m.row(i).to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len())
            .filter(|&r| !rows[r][col].is_zero())
            .min_by_key(|&r| rows[r][col..].iter().filter(|x| !x.is_zero()).count());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        let inv = GaussRational::one() / prow[col].clone();
        let support: Vec<usize> = (col + 1..ncols).filter(|&k| !prow[k].is_zero()).collect();
        for row in tail.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] * &inv;
            for &k in &support {
                row[k] -= &f * &prow[k];
            }
            row[col] = GaussRational::zero();
        }
        rank += 1;
    }
    rank
}

/// Primes `p ≡ 1 (mod 4)` below `2³¹`, each paired with a square root of `-1` mod `p`.
pub const RANK_MODULI: [(u64, u64); 2] = [(0x7fff_ffed, 0x5a7f_0a04), (0x7fff_ff9d, 0x3560_3ff6)];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
        let (n, d) = (n.rem_euclid(p as i64) as u64, d.rem_euclid(p as i64) as u64);
        return match d {
            0 => None,
            1 => Some(n),
            _ => Some(mul_mod(n, inv_mod(d, p), p)),
        };
    }
    let pb = BigInt::from(p);
    let residue = |x: &BigInt| ((x % &pb) + &pb) % &pb;
    let n = residue(q.numer()).to_u64()?;
    let d = residue(q.denom()).to_u64()?;
    (d != 0).then(|| mul_mod(n, inv_mod(d, p), p))
}

/// Rank of `m` over `F_p` with `i ↦ i_root`.
///
/// Never exceeds the rank over `ℚ(i)`, and agrees with it unless `p` divides
/// every nonzero maximal minor. `None` when some denominator vanishes mod `p`.
pub fn modular_rank(m: &DenseMatrix<GaussRational>, p: u64, i_root: u64) -> Option<usize> {
    assert!(p < 1 << 32 && i_root < p, "modulus must fit in 32 bits");
    let ncols = m.cols();
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m
            .row(i)
            .iter()
            .map(|z| {
                Some((rational_mod(&z.re, p)? + mul_mod(rational_mod(&z.im, p)?, i_root, p)) % p)
            })
            .collect::<Option<Vec<u64>>>()?;
        rows.push(row);
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        let inv = inv_mod(prow[col], p);
        for row in tail.iter_mut().filter(|r| r[col] != 0) {
            let f = p - mul_mod(row[col], inv, p);
            for k in col..ncols {
                row[k] = (row[k] + mul_mod(f, prow[k], p)) % p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Some(rank)
}

fn to_ndarray(m: &DenseMatrix<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_vec((m.rows(), m.cols()), m.entries().to_vec())
        .expect("row-major entries match the shape")
}

pub fn singular_values(m: &DenseMatrix<Complex64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let (_, sv, _) = to_ndarray(m)
        .svd(false, false)
        .expect("LAPACK SVD converges");
    let mut out = sv.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

pub fn svd_rank(m: &DenseMatrix<Complex64>, rtol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// `σ_max / σ_min` for a square matrix; infinite when singular.
pub fn condition_number(m: &DenseMatrix<Complex64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Moore–Penrose pseudo-inverse, discarding singular values `≤ rtol · σ_max`.
pub fn pseudo_inverse(m: &DenseMatrix<Complex64>, rtol: f64) -> DenseMatrix<Complex64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DenseMatrix::zeros(cols, rows);
    }
    let (u, sv, vt) = to_ndarray(m).svd(true, true).expect("LAPACK SVD converges");
    let (u, vt) = (u.expect("U requested"), vt.expect("Vᴴ requested"));
    let cut = rtol * sv.iter().copied().fold(0.0, f64::max);
    let mut out = DenseMatrix::zeros(cols, rows);
    for (s, &sigma) in sv.iter().enumerate() {
        if sigma <= cut || sigma == 0.0 {
            continue;
        }
        let inv = 1.0 / sigma;
        for i in 0..cols {
            let vi = vt[(s, i)].conj() * inv;
            if vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..rows {
                out[(i, j)] += vi * u[(j, s)].conj();
            }
        }
    }
    out
}

pub fn mat_vec(m: &DenseMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(m.cols(), x.len(), "matrix-vector dimensions");
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(rows: usize, cols: usize, v: &[i64]) -> DenseMatrix<GaussRational> {
        DenseMatrix::new(
            rows,
            cols,
            v.iter().map(|&x| GaussRational::from_i64(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn modular_rank_matches_exact_rank() {
        let mut rng = crate::corpus::seeded_rng(3);
        for trial in 0..40 {
            let (r, c, k) = (3 + trial % 5, 4 + trial % 4, 1 + trial % 4);
            // rank ≤ k by construction: (r×k)(k×c)
            let left = crate::corpus::random_unimodular(r.max(k), 0.7, &mut rng);
            let right = crate::corpus::random_unimodular(c.max(k), 0.7, &mut rng);
            let m = DenseMatrix::from_fn(r, c, |i, j| {
                (0..k).fold(GaussRational::from_i64(0), |acc, t| {
                    acc + left[(i, t)].clone() * right[(t, j)].clone()
                })
            });
            let q = m.map(|z| {
                z / GaussRational::new(
                    BigRational::from_integer(3.into()),
                    BigRational::from_integer(0.into()),
                )
            });
            let expected = exact_rank(&q);
            for (p, root) in RANK_MODULI {
                assert_eq!(mul_mod(root, root, p), p - 1);
                assert_eq!(modular_rank(&q, p, root), Some(expected));
            }
        }
    }

    #[test]
    fn modular_rank_sees_the_imaginary_unit() {
        // [[1, i], [i, -1]] has rank 1; with i ↦ 1 it would have rank 2
        let z = |re: i64, im: i64| {
            GaussRational::new(
                BigRational::from_integer(re.into()),
                BigRational::from_integer(im.into()),
            )
        };
        let m = DenseMatrix::new(2, 2, vec![z(1, 0), z(0, 1), z(0, 1), z(-1, 0)]).unwrap();
        let (p, root) = RANK_MODULI[0];
        assert_eq!(modular_rank(&m, p, root), Some(1));
        let half = DenseMatrix::new(
            1,
            1,
            vec![GaussRational::new(
                BigRational::new(1.into(), BigInt::from(p)),
                BigRational::from_integer(0.into()),
            )],
        )
        .unwrap();
        assert_eq!(modular_rank(&half, p, root), None);
    }

    #[test]
    fn exact_rank_basic() {
        assert_eq!(exact_rank(&exact(2, 2, &[0, 0, 0, 0])), 0);
        assert_eq!(exact_rank(&exact(2, 3, &[1, 2, 3, 2, 4, 6])), 1);
        assert_eq!(exact_rank(&exact(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 10])), 3);
        assert_eq!(exact_rank(&exact(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9])), 2);
        assert_eq!(exact_rank(&DenseMatrix::zeros(0, 4)), 0);
    }

    #[test]
    fn exact_rank_sees_complex_dependence() {
        // Row 2 = i · row 1.
        let i = GaussRational::from_complex(Complex64::new(0.0, 1.0));
        let one = GaussRational::one();
        let m = DenseMatrix::new(
            2,
            2,
            vec![one.clone(), i.clone(), i.clone(), i.clone() * i.clone()],
        )
        .unwrap();
        assert_eq!(exact_rank(&m), 1);
    }

    #[test]
    fn float_rank_agrees_with_exact_on_integer_matrices() {
        let data = [1, 2, 3, 4, 5, 6, 7, 8, 9];
        let f = DenseMatrix::new(
            3,
            3,
            data.iter()
                .map(|&x| Complex64::new(x as f64, 0.0))
                .collect(),
        )
        .unwrap();
        assert_eq!(svd_rank(&f, RANK_RTOL), 2);
    }

    #[test]
    fn pseudo_inverse_gives_minimum_norm_solution() {
        // x + y = 2 has minimum-norm solution (1, 1).
        let m = DenseMatrix::new(1, 2, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let p = pseudo_inverse(&m, RANK_RTOL);
        let x = mat_vec(&p, &[Complex64::new(2.0, 0.0)]);
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pseudo_inverse_is_accurate_on_sparse_matrices() {
        // Sparse complex matrices like tangent maps; A A⁺ A = A must hold to rounding.
        let m = DenseMatrix::from_fn(17, 25, |i, j| {
            if (i * 7 + j * 3) % 5 == 0 {
                Complex64::new((i as f64 - j as f64) * 0.1, (i * j % 3) as f64 - 1.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let p = pseudo_inverse(&m, RANK_RTOL);
        let back = &(&m * &p) * &m;
        assert!((&back - &m).frobenius() <= 1e-12 * m.frobenius());
        let pt = pseudo_inverse(&m.transpose(), RANK_RTOL);
        let back = &(&pt * &m.transpose()) * &pt;
        assert!((&back - &pt).frobenius() <= 1e-12 * pt.frobenius());
    }

    #[test]
    fn pseudo_inverse_of_empty_is_transposed_empty() {
        let p = pseudo_inverse(&DenseMatrix::zeros(0, 3), RANK_RTOL);
        assert_eq!(p.shape(), (3, 0));
    }
}
