//! Test corpora: exhaustive enumeration of canonical structures and seeded
//! random perturbations / transformations.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::canonical::{CanonicalBlock, CanonicalStructure, SkewPair};
use crate::matrix::DenseMatrix;
use crate::scalar::{GaussRational, Scalar};

/// Eigenvalues used for `H` blocks: `0, 1, -1, i`.
pub const PALETTE: [Complex64; 4] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 1.0),
];

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every single block of dimension at most `max_dim`.
pub fn block_alphabet(max_dim: usize) -> Vec<CanonicalBlock> {
    let mut out = Vec::new();
    for n in 1..=max_dim / 2 {
        for &lambda in &PALETTE {
            out.push(CanonicalBlock::h(n, lambda).expect("palette is finite"));
        }
        out.push(CanonicalBlock::k(n).expect("n >= 1"));
    }
    for n in 0..=(max_dim.saturating_sub(1)) / 2 {
        if 2 * n < max_dim {
            out.push(CanonicalBlock::l(n));
        }
    }
    out
}

/// All nonempty multisets of blocks with total dimension at most `max_dim`,
/// sorted by dimension and then by their printed form.
pub fn enumerate_structures(max_dim: usize) -> Vec<CanonicalStructure> {
    fn go(
        alphabet: &[CanonicalBlock],
        start: usize,
        room: usize,
        current: &mut Vec<CanonicalBlock>,
        out: &mut Vec<CanonicalStructure>,
    ) {
        if !current.is_empty() {
            out.push(CanonicalStructure::new(current.clone()));
        }
        for k in start..alphabet.len() {
            let d = alphabet[k].dim();
            if d <= room {
                current.push(alphabet[k]);
                go(alphabet, k, room - d, current, out);
                current.pop();
            }
        }
    }
    let alphabet = block_alphabet(max_dim);
    let mut out = Vec::new();
    go(&alphabet, 0, max_dim, &mut Vec::new(), &mut out);
    let mut keyed: Vec<(usize, String, CanonicalStructure)> = out
        .into_iter()
        .map(|s| (s.dim(), s.to_string(), s))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> DenseMatrix<Complex64> {
    DenseMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Random skew pair with complex Gaussian entries, rescaled to Frobenius norm `norm`.
pub fn random_skew_pair(n: usize, norm: f64, rng: &mut impl Rng) -> SkewPair<Complex64> {
    let mut skew = || {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let z = gaussian(rng);
                m[(i, j)] = z;
                m[(j, i)] = -z;
            }
        }
        m
    };
    let pair = SkewPair::from_parts(skew(), skew());
    let f = pair.frobenius();
    if f == 0.0 {
        return pair;
    }
    pair.scale(&Complex64::new(norm / f, 0.0))
}

/// Random `P·L·U` with unit-triangular `L`, `U` whose off-diagonal entries
/// are Gaussian integers `a + bi`, `|a|, |b| ≤ 1`, present with probability
/// `fill`. The determinant is `±1`, so the result is always invertible.
pub fn random_unimodular(n: usize, fill: f64, rng: &mut impl Rng) -> DenseMatrix<GaussRational> {
    let entry = |rng: &mut dyn rand::RngCore| {
        if rng.random::<f64>() < fill {
            let re = rng.random_range(-1i64..=1);
            let im = rng.random_range(-1i64..=1);
            GaussRational::from_complex(Complex64::new(re as f64, im as f64))
        } else {
            GaussRational::zero()
        }
    };
    let mut l = DenseMatrix::<GaussRational>::identity(n);
    let mut u = DenseMatrix::<GaussRational>::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = entry(rng);
            u[(j, i)] = entry(rng);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let p = DenseMatrix::from_fn(n, n, |i, j| {
        if perm[i] == j {
            GaussRational::one()
        } else {
            GaussRational::zero()
        }
    });
    &(&p * &l) * &u
}
