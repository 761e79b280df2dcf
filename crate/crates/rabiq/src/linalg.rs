//! Symmetric eigensolvers.
//!
//! Tridiagonal chains use the implicit QL algorithm (EISPACK `tql2`/`tql1`);
//! dense matrices go through nalgebra. Eigenvalues are returned ascending and
//! every eigenvector has its largest-magnitude component positive, so results
//! are deterministic for fixed input.

use crate::error::{RabiError, Result};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a symmetric matrix. `vectors[k]` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() - 1`).
pub fn tridiag_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let mut d = d.to_vec();
    let mut e = shifted_offdiag(&d, e);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.
pub fn tridiag_eigen(d: &[f64], e: &[f64]) -> Result<Eigen> {
    let n = d.len();
    let mut dd = d.to_vec();
    let mut ee = shifted_offdiag(d, e);
    // column-major: v[col * n + row]
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    ql_implicit(&mut dd, &mut ee, Some(&mut v))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dd[a].total_cmp(&dd[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| dd[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| fix_sign(v[k * n..(k + 1) * n].to_vec()))
        .collect();
    Ok(Eigen { values, vectors })
}

/// Eigenpairs of a dense symmetric matrix.
pub fn dense_eigen(m: &DMatrix<f64>) -> Eigen {
    let n = m.nrows();
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .total_cmp(&se.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| fix_sign(se.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    Eigen { values, vectors }
}

fn shifted_offdiag(d: &[f64], e: &[f64]) -> Vec<f64> {
    assert_eq!(e.len() + 1, d.len().max(1), "off-diagonal length mismatch");
    let mut out = e.to_vec();
    out.push(0.0);
    out
}

fn fix_sign(mut v: Vec<f64>) -> Vec<f64> {
    let mut big = 0.0f64;
    let mut sign = 1.0;
    for &x in &v {
        if x.abs() > big + 1e-14 {
            big = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

// Implicit QL with Wilkinson-style shifts. `e[i]` couples rows i and i+1.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut v: Option<&mut Vec<f64>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(RabiError::NonConvergence(format!(
                        "tridiagonal QL did not converge for eigenvalue {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let ci = &mut lo[i * n..];
                        let cj = &mut hi[..n];
                        for k in 0..n {
                            let hk = cj[k];
                            cj[k] = s * ci[k] + c * hk;
                            ci[k] = c * ci[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_chain_matches_closed_form() {
        let n = 40;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let vals = tridiag_eigenvalues(&d, &e).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn vectors_are_orthonormal_and_satisfy_eigen_equation() {
        let d: Vec<f64> = (0..30).map(|i| (i as f64).sin() * 3.0 + i as f64).collect();
        let e: Vec<f64> = (0..29).map(|i| 0.5 + (i as f64 * 0.7).cos()).collect();
        let eig = tridiag_eigen(&d, &e).unwrap();
        let n = d.len();
        for (k, vk) in eig.vectors.iter().enumerate() {
            for i in 0..n {
                let mut hv = d[i] * vk[i];
                if i > 0 {
                    hv += e[i - 1] * vk[i - 1];
                }
                if i + 1 < n {
                    hv += e[i] * vk[i + 1];
                }
                assert!((hv - eig.values[k] * vk[i]).abs() < 1e-12);
            }
            for vj in &eig.vectors {
                let dot: f64 = vk.iter().zip(vj).map(|(a, b)| a * b).sum();
                let want = if std::ptr::eq(vk, vj) { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        let vals = tridiag_eigenvalues(&d, &e).unwrap();
        for (a, b) in vals.iter().zip(&eig.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_agrees_with_tridiagonal() {
        let d = [1.0, -0.5, 2.0, 3.5];
        let e = [0.3, 0.7, -0.2];
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = d[i];
        }
        for i in 0..3 {
            m[(i, i + 1)] = e[i];
            m[(i + 1, i)] = e[i];
        }
        let a = dense_eigen(&m);
        let b = tridiag_eigen(&d, &e).unwrap();
        for k in 0..4 {
            assert!((a.values[k] - b.values[k]).abs() < 1e-12);
            for i in 0..4 {
                assert!((a.vectors[k][i] - b.vectors[k][i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let vals = tridiag_eigenvalues(&[3.0, -1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }
}
