//! Exact integer and rational helpers used across the crate.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Natural log of |n| for a nonzero integer of any size.
pub fn ln_abs(n: &BigInt) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * LN_2
}

/// Natural log of a positive rational.
pub fn ln_q(x: &Q) -> f64 {
    ln_abs(x.numer()) - ln_abs(x.denom())
}

/// Parses `"n"` or `"n/d"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Formats a rational as `"n"` or `"n/d"`.
pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Integer denominator-clearing and content removal of a rational vector.
/// Returns the primitive integer vector spanning the same projective point.
pub fn primitive_integer_vector(coords: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in coords {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coords
        .iter()
        .map(|c| (c * Q::from_integer(l.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// Fraction-free Gaussian elimination determinant.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact cube root, if `n` is a perfect cube.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = n.cbrt();
    if &(&r * &r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Integer roots of x³ + p·x + q, sorted and without repetition.
pub fn integer_roots_depressed_cubic(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + p * x + q;
    let bound = BigInt::one() + p.abs().max(q.abs());
    let mut roots = Vec::new();
    if !p.is_negative() {
        roots.extend(monotone_root(&f, -bound.clone(), bound, true));
    } else {
        let y: BigInt = (-p) / BigInt::from(3);
        let cl = y.sqrt();
        let ch = if &cl * &cl * BigInt::from(3) == -p {
            cl.clone()
        } else {
            &cl + 1
        };
        roots.extend(monotone_root(&f, -bound.clone(), -ch.clone(), true));
        roots.extend(monotone_root(&f, -cl.clone(), cl.clone(), false));
        roots.extend(monotone_root(&f, ch, bound, true));
    }
    roots.sort();
    roots.dedup();
    roots
}

fn monotone_root<F: Fn(&BigInt) -> BigInt>(f: &F, lo: BigInt, hi: BigInt, increasing: bool) -> Option<BigInt> {
    if lo > hi {
        return None;
    }
    let g = |x: &BigInt| if increasing { f(x) } else { -f(x) };
    let (mut lo, mut hi) = (lo, hi);
    if g(&lo).is_positive() || g(&hi).is_negative() {
        return None;
    }
    while lo < hi {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        if g(&mid).is_negative() {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if f(&lo).is_zero() {
        Some(lo)
    } else {
        None
    }
}

/// Prime factorisation of a small positive integer by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sign of a big integer as -1, 0 or 1.
pub fn signum(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_abs_matches_float_for_small_values() {
        for n in [1i64, 2, 7, 1000, -12345] {
            assert!((ln_abs(&BigInt::from(n)) - (n.abs() as f64).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn ln_abs_large_power_of_three() {
        let n = num_traits::pow(BigInt::from(3), 2000);
        assert!((ln_abs(&n) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn parse_and_format_round_trip() {
        let x = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&x), "-3/2");
        assert_eq!(format_rational(&parse_rational("17").unwrap()), "17");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn bareiss_small_determinants() {
        let m = |rows: &[&[i64]]| {
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect()
        };
        assert_eq!(bareiss_det(m(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(bareiss_det(m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 4]])), BigInt::from(-4));
        assert_eq!(bareiss_det(m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn cubic_integer_roots() {
        let r = |p: i64, q: i64| integer_roots_depressed_cubic(&BigInt::from(p), &BigInt::from(q));
        assert_eq!(r(0, -8), vec![BigInt::from(2)]);
        assert_eq!(r(-7, 6), vec![BigInt::from(-3), BigInt::from(1), BigInt::from(2)]);
        assert_eq!(r(-1, 0), vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(r(0, 0), vec![BigInt::from(0)]);
        assert!(r(0, -11).is_empty());
        assert_eq!(r(-3, 2), vec![BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn primitive_vector_clears_denominators() {
        let v = primitive_integer_vector(&[qr(2, 3), q(4)]);
        assert_eq!(v, vec![BigInt::from(1), BigInt::from(6)]);
    }
}
