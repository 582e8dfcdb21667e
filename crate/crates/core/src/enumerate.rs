//! Integer lattices under a positive definite integral form: LLL reduction,
//! Fincke–Pohst enumeration and saturated integer kernels.
//!
//! Forms are given by the integer matrix `w` of 2·B, where B is the bilinear
//! form, so that the quadratic value of v is vᵀwv / 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on enumerated candidates.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

pub(crate) fn bilinear2(w: &[Vec<i64>], u: &[i64], v: &[i64]) -> i128 {
    let mut s = 0i128;
    for (i, row) in w.iter().enumerate() {
        if u[i] == 0 {
            continue;
        }
        for (j, &wij) in row.iter().enumerate() {
            if wij != 0 && v[j] != 0 {
                s += u[i] as i128 * wij as i128 * v[j] as i128;
            }
        }
    }
    s
}

/// Quadratic value vᵀwv / 2.
pub(crate) fn quad(w: &[Vec<i64>], v: &[i64]) -> i128 {
    bilinear2(w, v, v) / 2
}

fn gram2(basis: &[Vec<i64>], w: &[Vec<i64>]) -> Vec<Vec<i128>> {
    basis
        .iter()
        .map(|u| basis.iter().map(|v| bilinear2(w, u, v)).collect())
        .collect()
}

/// Determinant of the Gram matrix of 2·B on `basis`.
pub(crate) fn gram2_det(basis: &[Vec<i64>], w: &[Vec<i64>]) -> BigInt {
    let g = gram2(basis, w);
    crate::arith::bareiss_det(
        g.into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect(),
    )
}

fn axpy(a: &mut [i64], k: i64, b: &[i64]) -> Result<()> {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = k
            .checked_mul(y)
            .and_then(|t| x.checked_sub(t))
            .ok_or_else(|| Error::ResourceLimit("integer overflow during lattice reduction".into()))?;
    }
    Ok(())
}

/// LLL reduction (δ = 0.99) of a linearly independent integer basis.
pub(crate) fn lll(basis: &mut [Vec<i64>], w: &[Vec<i64>]) -> Result<()> {
    let n = basis.len();
    if n <= 1 {
        return Ok(());
    }
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0u64;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::ResourceLimit("LLL did not terminate".into()));
        }
        for j in (0..k).rev() {
            let (mu, _) = gso(basis, w);
            let r = mu[k][j].round();
            if r != 0.0 {
                let bj = basis[j].clone();
                axpy(&mut basis[k], r as i64, &bj)?;
            }
        }
        let (mu, bstar) = gso(basis, w);
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok(())
}

/// Gram–Schmidt coefficients and squared lengths (in units of 2·B).
fn gso(basis: &[Vec<i64>], w: &[Vec<i64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = basis.len();
    let g = gram2(basis, w);
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
        mu[i][i] = 1.0;
    }
    (mu, b)
}

/// All nonzero lattice vectors v with quad(v) ≤ bound.
pub(crate) fn enumerate(basis: &[Vec<i64>], w: &[Vec<i64>], bound: i128, cap: u64) -> Result<Vec<Vec<i64>>> {
    let d = basis.len();
    if d == 0 || bound <= 0 {
        return Ok(Vec::new());
    }
    let g = gram2(basis, w);
    // Q(x) = Σ q[i][i]·(x_i + Σ_{j>i} q[i][j]·x_j)² in units of B
    let mut q = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        for j in i..d {
            q[i][j] = g[i][j] as f64 / 2.0;
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..d {
            for l in k..d {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let limit = bound as f64 * (1.0 + 1e-9) + 1e-9;
    let mut x = vec![0i64; d];
    let mut out = Vec::new();
    let mut visited = 0u64;
    fp_rec(d - 1, limit, &q, &mut x, &mut |coef: &[i64]| -> Result<()> {
        visited += 1;
        if visited > cap {
            return Err(Error::ResourceLimit(format!(
                "more than {cap} lattice candidates inside squared radius {bound}"
            )));
        }
        if coef.iter().all(|&c| c == 0) {
            return Ok(());
        }
        let mut v = vec![0i64; basis[0].len()];
        for (c, b) in coef.iter().zip(basis) {
            if *c != 0 {
                axpy(&mut v, -*c, b)?;
            }
        }
        if quad(w, &v) <= bound {
            out.push(v);
        }
        Ok(())
    })?;
    Ok(out)
}

fn fp_rec<F: FnMut(&[i64]) -> Result<()>>(
    i: usize,
    budget: f64,
    q: &[Vec<f64>],
    x: &mut [i64],
    emit: &mut F,
) -> Result<()> {
    let d = x.len();
    let mut center = 0.0;
    for j in i + 1..d {
        center -= q[i][j] * x[j] as f64;
    }
    let r = (budget.max(0.0) / q[i][i]).sqrt();
    let lo = (center - r).ceil() as i64;
    let hi = (center + r).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        let t = xi as f64 - center;
        let rest = budget - q[i][i] * t * t;
        if rest < -1e-9 * budget.abs().max(1.0) {
            continue;
        }
        if i == 0 {
            emit(x)?;
        } else {
            fp_rec(i - 1, rest, q, x, emit)?;
        }
    }
    x[i] = 0;
    Ok(())
}

/// A basis of {v ∈ Zⁿ : A·v = 0}, which is saturated by construction.
pub(crate) fn integer_kernel(a: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // column operations act on columns of m and of u alike
    let col_op = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c1: usize, c2: usize, p: [[BigInt; 2]; 2]| {
        for row in m.iter_mut().chain(u.iter_mut()) {
            let (x, y) = (row[c1].clone(), row[c2].clone());
            row[c1] = &p[0][0] * &x + &p[1][0] * &y;
            row[c2] = &p[0][1] * &x + &p[1][1] * &y;
        }
    };
    let mut pivot = 0;
    for r in 0..m.len() {
        if pivot >= n {
            break;
        }
        for c in pivot + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let x = m[r][pivot].clone();
            let y = m[r][c].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            // [x y]·[[s, −y/g], [t, x/g]] = [g 0], a unimodular step
            let p = [[s, -(&y / &g)], [t, &x / &g]];
            col_op(&mut m, &mut u, pivot, c, p);
        }
        if !m[r][pivot].is_zero() {
            pivot += 1;
        }
    }
    let mut out = Vec::new();
    for c in pivot..n {
        let mut v = Vec::with_capacity(n);
        for row in &u {
            v.push(
                row[c]
                    .to_i64()
                    .ok_or_else(|| Error::ResourceLimit("kernel entries overflow i64".into()))?,
            );
        }
        out.push(v);
    }
    Ok(out)
}
