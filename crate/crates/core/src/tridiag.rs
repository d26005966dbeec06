//! Symmetric tridiagonal eigensolver (implicit-shift QL with eigenvector
//! accumulation). The radial Laplacian is similarity-equivalent to a symmetric
//! tridiagonal matrix, so no dense reduction step is needed.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn hypot2<T: Scalar>(a: T, b: T) -> T {
    let (a, b) = (a.abs(), b.abs());
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == T::zero() {
        return T::zero();
    }
    let q = lo / hi;
    hi * (T::one() + q * q).sqrt()
}

fn copysign_of<T: Scalar>(mag: T, sgn: T) -> T {
    if sgn >= T::zero() {
        mag.abs()
    } else {
        -mag.abs()
    }
}

/// Eigendecomposition of the symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e[i]` couples rows `i` and `i+1`).
///
/// Returns eigenvalues ascending; `vecs` is column-major with column `j`
/// holding the unit eigenvector of `vals[j]`.
pub struct TridiagEigen<T> {
    pub vals: Vec<T>,
    pub vecs: Vec<T>,
}

pub fn eigen_symmetric_tridiagonal<T: Scalar>(diag: &[T], off: &[T]) -> Result<TridiagEigen<T>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Eigen("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::Eigen(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }

    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(off);

    // v column-major, initialized to the identity.
    let mut v = vec![T::zero(); n * n];
    for j in 0..n {
        v[j + j * n] = T::one();
    }

    let eps = T::eps();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Find the first decoupled block boundary at or after l.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Eigen(format!("QL did not converge at row {l}")));
            }

            let mut g = (d[l + 1] - d[l]) / (e[l] + e[l]);
            let mut r = hypot2(g, T::one());
            g = d[m] - d[l] + e[l] / (g + copysign_of(r, g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot2(f, g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + (c + c) * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                // Rotate eigenvector columns i and i+1.
                let (lo, hi) = v.split_at_mut((i + 1) * n);
                let col_i = &mut lo[i * n..];
                let col_j = &mut hi[..n];
                for k in 0..n {
                    f = col_j[k];
                    col_j[k] = s * col_i[k] + c * f;
                    col_i[k] = c * col_i[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    // Sort eigenpairs ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals: Vec<T> = order.iter().map(|&j| d[j]).collect();
    let mut vecs = vec![T::zero(); n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        vecs[new_j * n..(new_j + 1) * n].copy_from_slice(&v[old_j * n..(old_j + 1) * n]);
    }
    Ok(TridiagEigen { vals, vecs })
}
