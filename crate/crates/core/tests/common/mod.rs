#![allow(dead_code)]
pub mod dag;

use num_complex::Complex64;
use qchlab::matkernel::hermitian_eigen;
use qchlab::{ComplexMatrix, KrausChannel, LinearMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Unnormalised Kraus family with `count` Gaussian operators.
pub fn random_family(in_dim: usize, out_dim: usize, count: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    KrausChannel::new(in_dim, out_dim, (0..count).map(|_| gaussian(out_dim, in_dim, rng)).collect()).unwrap()
}

/// `A_i S^{-1/2}` with `S = sum A_i^dagger A_i`, a trace preserving channel.
pub fn random_channel(in_dim: usize, out_dim: usize, count: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let raw = random_family(in_dim, out_dim, count, rng);
    let s = raw.kraus().iter().fold(ComplexMatrix::zeros(in_dim, in_dim), |acc, a| &acc + &(&a.adjoint() * a));
    let eig = hermitian_eigen(&s).unwrap();
    let mut inv_sqrt = ComplexMatrix::zeros(in_dim, in_dim);
    for k in 0..in_dim {
        let v = eig.vector(k);
        inv_sqrt = &inv_sqrt + &(&v * &v.adjoint()).scale_real(1.0 / eig.values[k].sqrt());
    }
    KrausChannel::new(in_dim, out_dim, raw.kraus().iter().map(|a| a * &inv_sqrt).collect()).unwrap()
}

/// Random density matrix `G G^dagger / tr`.
pub fn random_density(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian(d, d, rng);
    let p = &g * &g.adjoint();
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

pub fn dephasing() -> KrausChannel {
    let s = 0.5f64.sqrt();
    KrausChannel::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(s), ComplexMatrix::diag_real(&[s, -s])]).unwrap()
}

pub fn amplitude_damping(gamma: f64) -> KrausChannel {
    KrausChannel::new(
        2,
        2,
        vec![
            ComplexMatrix::diag_real(&[1.0, (1.0 - gamma).sqrt()]),
            ComplexMatrix::unit(2, 0, 1).scale_real(gamma.sqrt()),
        ],
    )
    .unwrap()
}

pub fn hadamard() -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    ComplexMatrix::from_real(&[&[s, s], &[s, -s]])
}

pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]])
}

pub fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]])
}

/// `tr_B` of an operator on `C^a (x) C^b`, written out index by index.
pub fn trace_second(m: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(a, a, |i, j| (0..b).map(|k| m[(i * b + k, j * b + k)]).sum())
}

/// `tr_A` of an operator on `C^a (x) C^b`.
pub fn trace_first(m: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(b, b, |i, j| (0..a).map(|k| m[(k * b + i, k * b + j)]).sum())
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture_qch(name: &str) -> qchlab::QchInstance {
    qchlab::format::load_qch(&fixture(name)).unwrap()
}

/// Span dimension of words in `letters` of length at most `max_len`, by
/// appending one letter at a time and keeping words that are new to the span.
/// Gram-Schmidt on flattened entries with two passes.
pub fn word_span_dim(letters: &[ComplexMatrix], max_len: usize) -> usize {
    let flat = |m: &ComplexMatrix| m.data().to_vec();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let add = |v: Vec<Complex64>, basis: &mut Vec<Vec<Complex64>>| -> bool {
        let norm0: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm0 < 1e-12 {
            return false;
        }
        let mut w = v;
        for _ in 0..2 {
            for b in basis.iter() {
                let c: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-9 * norm0 {
            return false;
        }
        basis.push(w.into_iter().map(|z| z / norm).collect());
        true
    };
    let mut frontier: Vec<ComplexMatrix> = Vec::new();
    for l in letters {
        if add(flat(l), &mut basis) {
            frontier.push(l.clone());
        }
    }
    for _ in 1..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in letters {
                let p = w * l;
                if add(flat(&p), &mut basis) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    basis.len()
}

/// `(id_k (x) Phi)(rho)` computed block by block: entry block `(a, b)` of the
/// output is `Phi(rho_ab)`.
pub fn ampliate<M: LinearMap<f64>>(map: &M, k: usize, rho: &ComplexMatrix) -> ComplexMatrix {
    let (din, dout) = (map.in_dim(), map.out_dim());
    let mut out = ComplexMatrix::zeros(k * dout, k * dout);
    for a in 0..k {
        for b in 0..k {
            let block = map.apply(&rho.block(a * din, b * din, din, din)).unwrap();
            out = &out + &block.embed_block(k * dout, k * dout, a * dout, b * dout);
        }
    }
    out
}

/// Random PSD matrix of rank `d`, not normalised.
pub fn random_psd(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian(d, d, rng);
    &g * &g.adjoint()
}
