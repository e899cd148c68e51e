//! Leading eigenvectors of dense symmetric matrices.
//!
//! Restarted block Krylov iteration with a Rayleigh–Ritz step per cycle. The
//! small projected problems are solved with cyclic Jacobi rotations.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Which end of the spectrum counts as "largest".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMode {
    /// Largest algebraic eigenvalues.
    #[default]
    Assortative,
    /// Largest absolute eigenvalues.
    Disassortative,
}

/// `n×k` matrix of orthonormal eigenvectors with their eigenvalues, in
/// selection order.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn k(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.vectors.row(i).iter().copied().collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns unsorted eigenvalues and the matching eigenvector
/// columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert!(m.is_square(), "symmetric_eigen needs a square matrix");
    let mut a = m.clone();
    // enforce exact symmetry
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn selection_order(values: &[f64], mode: EigenMode) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match mode {
        EigenMode::Assortative => {
            idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)))
        }
        EigenMode::Disassortative => {
            idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)))
        }
    }
    idx
}

fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    // Householder QR yields orthonormal columns even for rank-deficient input.
    m.clone().qr().q()
}

/// Removes the components of `w` along the orthonormal columns of `basis`.
fn project_out(w: &mut DMatrix<f64>, basis: &DMatrix<f64>) {
    let coeff = basis.transpose() * &*w;
    *w -= basis * coeff;
}

const START_SEED: u64 = 0x5e_ed0f_e16e;
/// Krylov blocks per restart cycle.
const KRYLOV_DEPTH: usize = 4;

/// Leading `k` eigenvectors of a symmetric matrix.
///
/// Converges when every selected Ritz pair has residual
/// `‖A u − λ u‖ ≤ 1e-8·‖A‖_F`, and gives up after `10·n·ln n` matrix-vector
/// products. Near-degenerate eigenvalues at the cut yield some orthonormal
/// basis of the nearly invariant subspace.
pub fn top_k_eigenvectors(a: &SimilarityMatrix, k: usize, mode: EigenMode) -> Result<Embedding> {
    top_k_of_matrix(a.matrix(), k, mode)
}

fn ritz(
    basis: &DMatrix<f64>,
    image: &DMatrix<f64>,
    mode: EigenMode,
) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let t = basis.transpose() * image;
    let (theta, s) = symmetric_eigen(&t);
    let order = selection_order(&theta, mode);
    let w = t.nrows();
    let s_sorted = DMatrix::from_fn(w, w, |r, c| s[(r, order[c])]);
    let values = order.iter().map(|&i| theta[i]).collect();
    (values, basis * &s_sorted, image * &s_sorted)
}

pub(crate) fn top_k_of_matrix(a: &DMatrix<f64>, k: usize, mode: EigenMode) -> Result<Embedding> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "cannot take {k} eigenvectors of a {n}×{n} matrix"
        )));
    }
    let tol = 1e-8 * a.norm();
    let block = n.min(k + k.max(10));
    let cap = ((10.0 * n as f64 * (n as f64).ln()).ceil() as usize).max(4 * block);

    if n <= KRYLOV_DEPTH * block {
        let (values, x, _) = ritz(&DMatrix::identity(n, n), a, mode);
        return Ok(Embedding {
            vectors: x.columns(0, k).into_owned(),
            values: values[..k].to_vec(),
        });
    }

    let mut q = {
        let mut r = rng::stream(START_SEED);
        orthonormal_columns(&DMatrix::from_fn(n, block, |_, _| {
            StandardNormal.sample(&mut r)
        }))
    };
    let width = KRYLOV_DEPTH * block;
    let mut matvecs = 0usize;
    loop {
        // Orthonormal basis of span{Q, AQ, ..., A^(depth-1) Q} and its image.
        let mut basis = DMatrix::<f64>::zeros(n, width);
        let mut image = DMatrix::<f64>::zeros(n, width);
        basis.columns_mut(0, block).copy_from(&q);
        for j in 0..KRYLOV_DEPTH {
            let vj = basis.columns(j * block, block).into_owned();
            let avj = a * &vj;
            matvecs += block;
            image.columns_mut(j * block, block).copy_from(&avj);
            if j + 1 < KRYLOV_DEPTH {
                let done = basis.columns(0, (j + 1) * block).into_owned();
                let mut w = avj;
                for _ in 0..2 {
                    project_out(&mut w, &done);
                    w = orthonormal_columns(&w);
                }
                basis.columns_mut((j + 1) * block, block).copy_from(&w);
            }
        }
        let (values, x, ax) = ritz(&basis, &image, mode);

        let worst = (0..k)
            .map(|c| (ax.column(c) - x.column(c) * values[c]).norm())
            .fold(0.0f64, f64::max);
        if worst <= tol {
            return Ok(Embedding {
                vectors: x.columns(0, k).into_owned(),
                values: values[..k].to_vec(),
            });
        }
        if matvecs >= cap {
            return Err(Error::EigenNoConvergence {
                matvecs,
                residual: worst,
            });
        }
        q = orthonormal_columns(&x.columns(0, block).into_owned());
    }
}
