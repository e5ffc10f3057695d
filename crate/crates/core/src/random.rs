//! Seeded sampling helpers. Every sampler takes an explicit generator so
//! results are reproducible per seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, ComplexMatrix};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for worker `index` derived from a base seed.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

fn gauss(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-random unit vector in C^d (normalised complex Gaussian).
pub fn haar_vector(d: usize, rng: &mut Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| c(gauss(rng), gauss(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random rank-one projector on C^d.
pub fn haar_projector(d: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::projector(&haar_vector(d, rng))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| c(gauss(rng), gauss(rng)));
    (&g + &g.adjoint()).scale(0.5)
}

/// Random complex matrix with Gaussian entries.
pub fn complex_matrix(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(gauss(rng), gauss(rng)))
}

/// Random density matrix G G† / Tr(G G†).
pub fn density_matrix(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = complex_matrix(d, d, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr)
}

/// Haar-random real orthogonal n×n matrix (QR of a Gaussian matrix with sign fix).
pub fn haar_orthogonal(n: usize, rng: &mut Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_vectors_are_unit_and_seeded() {
        let a = haar_vector(4, &mut rng(7));
        let b = haar_vector(4, &mut rng(7));
        assert_eq!(a, b);
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_orthogonal_is_orthogonal() {
        let q = haar_orthogonal(5, &mut rng(3));
        let e = (q.transpose() * &q - DMatrix::identity(5, 5)).abs().max();
        assert!(e < 1e-12);
    }

    #[test]
    fn substreams_differ() {
        use rand::Rng as _;
        let x: u64 = substream(1, 0).random();
        let y: u64 = substream(1, 1).random();
        assert_ne!(x, y);
    }
}
