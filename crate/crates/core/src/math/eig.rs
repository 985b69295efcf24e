//! Eigenvalues and eigenvectors of general complex matrices.
//!
//! Eigenvalues come from the standard dense route: Householder reduction to
//! upper Hessenberg form followed by implicitly shifted (Wilkinson) QR
//! iteration with deflation. Complex arithmetic makes the single-shift
//! iteration sufficient. Right eigenvectors are recovered afterwards by
//! inverse iteration against the original matrix, which is robust whenever
//! eigenvalues are simple — the only regime the callers in this crate accept.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use super::linalg::CMat;
use super::rng::Rng;

/// QR iteration failed to converge — pathological input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonConvergence;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex Givens pair (c real, s complex) with
/// `[c, s; -conj(s), c] · [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn2 = f.norm_sqr();
    let gn2 = g.norm_sqr();
    if gn2 == 0.0 {
        return (1.0, ZERO);
    }
    if fn2 == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let d = (fn2 + gn2).sqrt();
    let fphase = f / fn2.sqrt();
    (fn2.sqrt() / d, fphase * g.conj() / d)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut CMat) {
    let n = a.rows;
    for k in 0..n.saturating_sub(2) {
        // Build the reflector that zeroes column k below row k+1.
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)].norm_sqr();
        }
        let x0 = a[(k + 1, k)];
        let below2 = norm2 - x0.norm_sqr();
        if below2 <= 1e-300 {
            continue;
        }
        let norm = norm2.sqrt();
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = vec![ZERO; n - k - 1];
        v[0] = x0 - alpha;
        for i in k + 2..n {
            v[i - k - 1] = a[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        let scale = 2.0 / vnorm2;
        // A <- (I - s v vᴴ) A : rows k+1..n.
        for j in k..n {
            let mut dot = ZERO;
            for i in k + 1..n {
                dot += v[i - k - 1].conj() * a[(i, j)];
            }
            dot *= scale;
            for i in k + 1..n {
                let vi = v[i - k - 1];
                a[(i, j)] -= vi * dot;
            }
        }
        // A <- A (I - s v vᴴ) : cols k+1..n.
        for i in 0..n {
            let mut dot = ZERO;
            for j in k + 1..n {
                dot += a[(i, j)] * v[j - k - 1];
            }
            dot *= scale;
            for j in k + 1..n {
                a[(i, j)] -= dot * v[j - k - 1].conj();
            }
        }
    }
    // Clean the now-structural zeros.
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = ZERO;
        }
    }
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block nearer its
/// bottom-right entry.
fn wilkinson(h: &CMat, m: usize) -> Complex64 {
    let a = h[(m - 1, m - 1)];
    let b = h[(m - 1, m)];
    let c = h[(m, m - 1)];
    let d = h[(m, m)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let r1 = (tr + disc) * 0.5;
    let r2 = (tr - disc) * 0.5;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>, NonConvergence> {
    assert_eq!(a.rows, a.cols, "eigenvalues needs a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eigs = vec![ZERO; n];
    let mut m = n - 1; // active block is 0..=m
    let mut iters_here = 0usize;
    loop {
        // Deflate converged trailing entries.
        loop {
            if m == 0 {
                eigs[0] = h[(0, 0)];
                return Ok(eigs);
            }
            let sub = h[(m, m - 1)].norm();
            let local = h[(m - 1, m - 1)].norm() + h[(m, m)].norm();
            if sub <= f64::EPSILON * local.max(1e-300) {
                eigs[m] = h[(m, m)];
                m -= 1;
                iters_here = 0;
            } else {
                break;
            }
        }
        // Find the start of the active unreduced block.
        let mut l = m;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= f64::EPSILON * local.max(1e-300) {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        iters_here += 1;
        if iters_here > 60 {
            return Err(NonConvergence);
        }
        // Occasional exceptional shift to break symmetry stalls.
        let mu = if iters_here % 12 == 0 {
            h[(m, m)] + Complex64::new(1.5 * h[(m, m - 1)].norm(), 0.0)
        } else {
            wilkinson(&h, m)
        };
        // Implicit single-shift QR sweep on rows/cols l..=m.
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..m {
            let (c, s) = givens(x, y);
            // Rows k, k+1.
            let lo = k.saturating_sub(1).max(l);
            for j in lo..n {
                let hk = h[(k, j)];
                let hk1 = h[(k + 1, j)];
                h[(k, j)] = hk * c + hk1 * s;
                h[(k + 1, j)] = -hk * s.conj() + hk1 * c;
            }
            // Columns k, k+1.
            let hi = (k + 2).min(m);
            for i in 0..=hi {
                let hk = h[(i, k)];
                let hk1 = h[(i, k + 1)];
                h[(i, k)] = hk * c + hk1 * s.conj();
                h[(i, k + 1)] = -hk * s + hk1 * c;
            }
            if k < m - 1 {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
}

/// Right eigenvector for each provided (simple) eigenvalue, by inverse
/// iteration on `a`. Columns of the result align with `lambdas`. Each vector
/// has unit norm with its largest-magnitude entry rotated to the positive
/// real axis, making the output deterministic.
///
/// Returns None if some system stays numerically singular in a way iteration
/// cannot escape, or a residual check ||A·v − λ·v|| ≤ `tol`·||A||_F fails —
/// both symptoms of a defective or near-defective matrix.
pub fn right_eigenvectors(
    a: &CMat,
    lambdas: &[Complex64],
    tol: f64,
) -> Option<CMat> {
    let n = a.rows;
    assert_eq!(a.rows, a.cols);
    assert_eq!(lambdas.len(), n);
    let anorm = a.frobenius().max(f64::MIN_POSITIVE);
    let mut vecs = CMat::zeros(n, n);
    let mut rng = Rng::new(0x51c3_7a1e);
    for (col, &lam) in lambdas.iter().enumerate() {
        let mut v = rng.complex_normal_vec(n);
        normalize(&mut v);
        let mut ok = false;
        // Growing diagonal jitter: exact singularity of (A - λI) is the
        // expected case, so nudge λ off by a few ulps and retry if needed.
        for attempt in 0..4 {
            // Absolute floor keeps the shift representable even for an
            // all-zero matrix (where any unit vector is an eigenvector).
            let jitter = (anorm * 1e-14 * 10f64.powi(attempt)).max(1e-120);
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[(i, i)] -= lam + Complex64::new(jitter, jitter);
            }
            let mut cur = v.clone();
            let mut converged = false;
            for _ in 0..4 {
                let rhs = CMat {
                    rows: n,
                    cols: 1,
                    data: cur.clone(),
                };
                let sol = match shifted.solve_lu(&rhs) {
                    Some(s) => s,
                    None => break,
                };
                cur = sol.data;
                normalize(&mut cur);
                // Residual against the *unjittered* eigenvalue.
                let av = a.mul_vec(&cur);
                let res: f64 = av
                    .iter()
                    .zip(cur.iter())
                    .map(|(x, y)| (x - y * lam).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if res <= tol * anorm {
                    converged = true;
                    break;
                }
            }
            if converged {
                v = cur;
                ok = true;
                break;
            }
        }
        if !ok {
            return None;
        }
        for r in 0..n {
            vecs[(r, col)] = v[r];
        }
    }
    Some(vecs)
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return;
    }
    // Locate the largest entry and rotate its phase out for a canonical form.
    let mut imax = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm_sqr() > best {
            best = z.norm_sqr();
            imax = i;
        }
    }
    let phase = if v[imax].norm() > 0.0 {
        v[imax].conj() / v[imax].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let scale = phase / norm;
    for z in v.iter_mut() {
        *z *= scale;
    }
}
