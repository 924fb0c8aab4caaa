#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use weylkit::{Complex64, ComplexMatrix, HermitianMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianMatrix {
    let a = random_matrix(rng, n, n);
    HermitianMatrix::symmetrize(&a.scale_real(scale))
}

/// `A* A` scaled so the largest eigenvalue is about `scale`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianMatrix {
    let a = random_matrix(rng, n, n);
    let p = &a.adjoint() * &a;
    let norm = p.norm_op().max(1e-300);
    HermitianMatrix::symmetrize(&p.scale_real(scale / norm))
}

/// Orthonormalized random matrix (modified Gram-Schmidt).
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut u = random_matrix(rng, n, n);
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += u[(i, k)].conj() * u[(i, j)];
            }
            for i in 0..n {
                let uik = u[(i, k)];
                u[(i, j)] -= uik * dot;
            }
        }
        let norm: f64 = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            u[(i, j)] /= norm;
        }
    }
    u
}

pub fn random_upper(rng: &mut ChaCha8Rng, re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> Complex64 {
    Complex64::new(rng.gen_range(re), rng.gen_range(im))
}

/// Smallest eigenvalue of `Im m`.
pub fn min_im_eigenvalue(m: &ComplexMatrix) -> f64 {
    let im = HermitianMatrix::symmetrize(&m.im_part());
    im.eigh().unwrap().min_eigenvalue().unwrap_or(0.0)
}

pub fn count_below(eigs: &[f64], t: f64) -> i32 {
    eigs.iter().filter(|&&l| l < t).count() as i32
}
