//! One-sided Jacobi singular value decomposition for complex matrices.
//!
//! Orthogonalizes column pairs of A with unitary plane rotations until the
//! Gram off-diagonals vanish; column norms are then the singular values and
//! the accumulated rotations form V. Deterministic sweep order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const GRAM_TOL: f64 = 1e-30; // on |c|^2 / (a b)
const MAX_SWEEPS: usize = 64;

pub(crate) struct JacobiSvd {
    /// Singular values, descending.
    pub values: Vec<f64>,
    /// Left singular vectors, one column per singular value (zero column
    /// for a vanishing singular value).
    pub u: DMatrix<Complex64>,
    /// Right singular vectors, columns matching `values`.
    pub v: DMatrix<Complex64>,
}

pub(crate) fn jacobi_svd(a: &DMatrix<Complex64>) -> JacobiSvd {
    let n = a.ncols();
    let mut g = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let gi = g.column(i).clone_owned();
                let gj = g.column(j).clone_owned();
                let aa = gi.norm_squared();
                let bb = gj.norm_squared();
                let c = gi.dotc(&gj); // g_i^H g_j
                let c2 = c.norm_sqr();
                if c2 <= GRAM_TOL * aa * bb || c2 == 0.0 {
                    continue;
                }
                rotated = true;
                // phase out c, then a real Jacobi rotation on [[a,|c|],[|c|,b]]
                let abs_c = c2.sqrt();
                let phase = c / abs_c;
                let zeta = (bb - aa) / (2.0 * abs_c);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let sp = phase * sn;
                rotate_pair(&mut g, i, j, cs, sp);
                rotate_pair(&mut v, i, j, cs, sp);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut triplets: Vec<(f64, DVector<Complex64>, DVector<Complex64>)> = (0..n)
        .map(|j| {
            let col = g.column(j).clone_owned();
            let sigma = col.norm();
            let u = if sigma > 0.0 { col / Complex64::new(sigma, 0.0) } else { col };
            (sigma, u, v.column(j).clone_owned())
        })
        .collect();
    triplets.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    let values: Vec<f64> = triplets.iter().map(|t| t.0).collect();
    let u = DMatrix::from_fn(a.nrows(), n, |r, cidx| triplets[cidx].1[r]);
    let v = DMatrix::from_fn(n, n, |r, cidx| triplets[cidx].2[r]);
    JacobiSvd { values, u, v }
}

/// Columns (i, j) <- (cs i - conj(sp) j, sp i + cs j), a unitary rotation.
fn rotate_pair(m: &mut DMatrix<Complex64>, i: usize, j: usize, cs: f64, sp: Complex64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = cs * a - sp.conj() * b;
        m[(r, j)] = sp * a + cs * b;
    }
}
