//! Division polynomials and the degree of multiplication maps.
//!
//! On y² = F(x) = x³ + Ax + B, x([n]P) = φ_n(x)/ψ_n(x)² with
//! φ_n = x·ψ_n² − ψ_{n−1}·ψ_{n+1}. For even n, ψ_n carries a factor 2y, so
//! every ψ_n is stored as f_n(x), or f_n(x)·y, and y² is replaced by F(x).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Q;
use crate::cm::{CMOrder, EndElement};
use crate::elliptic::EllipticCurveQ;
use crate::error::{Error, Result};

/// Integer polynomial in x, coefficients from the constant term up.
pub type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, with the zero polynomial given degree −1.
pub fn degree(p: &[BigInt]) -> i64 {
    trim(p.to_vec()).len() as i64 - 1
}

fn padd(a: &[BigInt], b: &[BigInt]) -> Poly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn pneg(a: &[BigInt]) -> Poly {
    a.iter().map(|c| -c).collect()
}

fn pmul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// f(x), or f(x)·y when `y` is set.
#[derive(Clone, Debug, PartialEq)]
struct YPoly {
    f: Poly,
    y: bool,
}

struct Ring {
    rhs: Poly,
}

impl Ring {
    fn mul(&self, a: &YPoly, b: &YPoly) -> YPoly {
        let mut f = pmul(&a.f, &b.f);
        if a.y && b.y {
            f = pmul(&f, &self.rhs);
        }
        YPoly { f, y: a.y ^ b.y }
    }

    fn sub(&self, a: &YPoly, b: &YPoly) -> YPoly {
        if a.f.is_empty() {
            return YPoly { f: pneg(&b.f), y: b.y };
        }
        if b.f.is_empty() {
            return a.clone();
        }
        debug_assert_eq!(a.y, b.y);
        YPoly {
            f: padd(&a.f, &pneg(&b.f)),
            y: a.y,
        }
    }

    /// Exact division by 2y, using 1/y = y/F when no y factor is present.
    fn div_2y(&self, a: &YPoly) -> YPoly {
        let two = BigInt::from(2);
        let f = if a.y { a.f.clone() } else { pdiv_exact(&a.f, &self.rhs) };
        YPoly {
            f: f.iter().map(|c| c / &two).collect(),
            y: !a.y,
        }
    }
}

/// a / b for a monic divisor b that divides a exactly.
fn pdiv_exact(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        debug_assert!(r.is_empty());
        return Vec::new();
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + b.len() - 1].clone();
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &c * bi;
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    trim(q)
}

/// ψ_0, …, ψ_max on the curve.
fn psi_table(e: &EllipticCurveQ, max: usize) -> (Ring, Vec<YPoly>) {
    let (a, b) = (e.a().clone(), e.b().clone());
    let ring = Ring {
        rhs: trim(vec![b.clone(), a.clone(), BigInt::zero(), BigInt::one()]),
    };
    let i = |n: i64| BigInt::from(n);
    let mut psi = vec![
        YPoly { f: vec![], y: false },
        YPoly {
            f: vec![i(1)],
            y: false,
        },
        YPoly { f: vec![i(2)], y: true },
        YPoly {
            f: trim(vec![-&a * &a, i(12) * &b, i(6) * &a, i(0), i(3)]),
            y: false,
        },
        YPoly {
            f: trim(vec![
                i(-4) * (&a * &a * &a + i(8) * &b * &b),
                i(-16) * &a * &b,
                i(-20) * &a * &a,
                i(80) * &b,
                i(20) * &a,
                i(0),
                i(4),
            ]),
            y: true,
        },
    ];
    for n in 5..=max {
        let m = n / 2;
        let cube = |p: &YPoly| ring.mul(&ring.mul(p, p), p);
        let sq = |p: &YPoly| ring.mul(p, p);
        let next = if n % 2 == 1 {
            // ψ_{2m+1} = ψ_{m+2}ψ_m³ − ψ_{m−1}ψ_{m+1}³
            ring.sub(
                &ring.mul(&psi[m + 2], &cube(&psi[m])),
                &ring.mul(&psi[m - 1], &cube(&psi[m + 1])),
            )
        } else {
            // ψ_{2m} = ψ_m(ψ_{m+2}ψ_{m−1}² − ψ_{m−2}ψ_{m+1}²)/(2y)
            let inner = ring.sub(
                &ring.mul(&psi[m + 2], &sq(&psi[m - 1])),
                &ring.mul(&psi[m - 2], &sq(&psi[m + 1])),
            );
            ring.div_2y(&ring.mul(&psi[m], &inner))
        };
        psi.push(next);
    }
    (ring, psi)
}

/// (φ_n, ψ_n²) as polynomials in x, for n ≥ 1.
pub fn multiplication_x_map(e: &EllipticCurveQ, n: u32) -> Result<(Poly, Poly)> {
    if n == 0 {
        return Err(Error::InvalidInput("[0] has no x-coordinate map".into()));
    }
    let n = n as usize;
    let (ring, psi) = psi_table(e, n + 1);
    let psi_sq = ring.mul(&psi[n], &psi[n]);
    let x = YPoly {
        f: vec![BigInt::zero(), BigInt::one()],
        y: false,
    };
    let phi = ring.sub(&ring.mul(&x, &psi_sq), &ring.mul(&psi[n - 1], &psi[n + 1]));
    debug_assert!(!phi.y && !psi_sq.y);
    Ok((phi.f, psi_sq.f))
}

fn to_q(p: &[BigInt]) -> Vec<Q> {
    p.iter().map(|c| Q::from_integer(c.clone())).collect()
}

fn qtrim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn qrem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &k * c;
        }
        r = qtrim(r);
    }
    r
}

/// Degree of gcd(a, b) over Q.
pub fn gcd_degree(a: &[BigInt], b: &[BigInt]) -> i64 {
    let (mut x, mut y) = (qtrim(to_q(a)), qtrim(to_q(b)));
    while !y.is_empty() {
        let r = qrem(&x, &y);
        x = y;
        y = r;
    }
    x.len() as i64 - 1
}

/// Degree of the reduced x-coordinate numerator of [n].
pub fn reduced_numerator_degree(e: &EllipticCurveQ, n: u32) -> Result<i64> {
    let (phi, psi_sq) = multiplication_x_map(e, n)?;
    let g = gcd_degree(&phi, &psi_sq);
    Ok(degree(&phi) - g.max(0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBounds {
    pub lower: i64,
    pub upper: i64,
    /// For a rational integer n with |n| ≤ 5, the reduced numerator degree of x∘[n].
    pub verified_degree: Option<i64>,
}

/// (|α|², 2|α|²) bounds the degree of [α]; for small rational integers the
/// lower bound is confirmed from the division polynomials.
pub fn mult_degree_bounds(e: &EllipticCurveQ, alpha: &EndElement, ord: &CMOrder) -> Result<DegreeBounds> {
    if alpha.is_zero() {
        return Err(Error::InvalidInput("α = 0 has no degree".into()));
    }
    ord.validate(alpha)?;
    let n2 = alpha.norm(ord);
    let verified_degree = if alpha.b == 0 && alpha.a.abs() <= 5 {
        let d = reduced_numerator_degree(e, alpha.a.unsigned_abs() as u32)?;
        if d != n2 {
            return Err(Error::Internal(format!(
                "x∘[{}] has numerator degree {d}, expected {n2}",
                alpha.a
            )));
        }
        Some(d)
    } else {
        None
    };
    Ok(DegreeBounds {
        lower: n2,
        upper: 2 * n2,
        verified_degree,
    })
}

/// Evaluates an integer polynomial at a rational.
pub fn eval(p: &[BigInt], x: &Q) -> Q {
    p.iter()
        .rev()
        .fold(Q::zero(), |acc, c| acc * x + Q::from_integer(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EPoint;

    fn ints(v: &[i64]) -> Poly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn doubling_numerator() {
        for (a, b) in [(0, 1), (-1, 0), (2, -3), (-7, 11)] {
            let e = EllipticCurveQ::from_i64(a, b).unwrap();
            let (phi, _) = multiplication_x_map(&e, 2).unwrap();
            assert_eq!(phi, ints(&[a * a, -8 * b, -2 * a, 0, 1]));
        }
    }

    #[test]
    fn numerator_degrees_are_squares() {
        for (a, b) in [(0, 1), (0, -2), (-1, 0), (3, 5)] {
            let e = EllipticCurveQ::from_i64(a, b).unwrap();
            for n in 1..=5u32 {
                let (phi, psi_sq) = multiplication_x_map(&e, n).unwrap();
                assert_eq!(degree(&phi), (n * n) as i64);
                assert_eq!(degree(&psi_sq), (n * n) as i64 - 1);
                assert_eq!(gcd_degree(&phi, &psi_sq), 0, "E=({a},{b}) n={n}");
            }
        }
    }

    #[test]
    fn x_map_matches_group_law() {
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let p = EPoint::from_ints(3, 5);
        for n in 2..=5u32 {
            let (phi, psi_sq) = multiplication_x_map(&e, n).unwrap();
            let x = p.x().unwrap();
            let got = eval(&phi, x) / eval(&psi_sq, x);
            let q = e.scalar_mul(n as i64, &p).unwrap();
            assert_eq!(&got, q.x().unwrap(), "n={n}");
        }
    }

    #[test]
    fn degree_bounds() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let z = CMOrder::non_cm();
        let d = mult_degree_bounds(&e, &EndElement::int(1), &z).unwrap();
        assert_eq!((d.lower, d.upper, d.verified_degree), (1, 2, Some(1)));
        let d = mult_degree_bounds(&e, &EndElement::int(-3), &z).unwrap();
        assert_eq!((d.lower, d.upper, d.verified_degree), (9, 18, Some(9)));
        let o = CMOrder::new(-3, 1).unwrap();
        let d = mult_degree_bounds(&e, &EndElement::new(1, 1), &o).unwrap();
        assert_eq!((d.lower, d.upper, d.verified_degree), (3, 6, None));
        assert!(mult_degree_bounds(&e, &EndElement::int(0), &z).is_err());
    }
}
