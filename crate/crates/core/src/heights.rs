//! Projective heights over the rationals and the canonical height on E.
//!
//! All values are natural-log units. The canonical height is the duplication
//! limit ĥ(P) = lim 4⁻ⁿ·h₂(ι(2ⁿP)) for the embedding ι(P) = (x : y : 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{bareiss_det, ln_abs, primitive_integer_vector, Q};
use crate::elliptic::{EPoint, EllipticCurveQ};
use crate::error::{Error, Result};

/// Default target accuracy of [`canonical_height`].
pub const DEFAULT_EPS: f64 = 1e-9;
/// Most doublings [`canonical_height`] will perform.
pub const MAX_DOUBLINGS: u32 = 64;

const FLOAT_REL: f64 = 1e-13;

/// A point of projective space with rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    coords: Vec<Q>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidInput("projective point with all coordinates zero".into()));
        }
        Ok(ProjPoint { coords })
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    /// Coprime integer representative.
    pub fn primitive(&self) -> Vec<BigInt> {
        primitive_integer_vector(&self.coords)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub abs_error: f64,
}

impl HeightValue {
    fn rounded(value: f64) -> Self {
        HeightValue {
            value,
            abs_error: FLOAT_REL * value.abs().max(1.0),
        }
    }
}

/// Absolute logarithmic Weil height.
pub fn weil_height(p: &ProjPoint) -> HeightValue {
    let v = p.primitive();
    let m = v.iter().map(|c| c.abs()).max().unwrap_or_default();
    HeightValue::rounded(ln_abs(&m))
}

/// Height with the ℓ² norm at the archimedean place.
pub fn h2_height(p: &ProjPoint) -> HeightValue {
    let v = p.primitive();
    let s: BigInt = v.iter().map(|c| c * c).sum();
    HeightValue::rounded(0.5 * ln_abs(&s))
}

/// h_W(1 : x).
pub fn weil_height_q(x: &Q) -> f64 {
    ln_abs(&x.numer().abs().max(x.denom().clone()))
}

/// h₂(ι(P)) for a point of E.
pub fn point_h2(p: &EPoint) -> f64 {
    match p {
        EPoint::Infinity => 0.0,
        _ => {
            h2_height(&ProjPoint {
                coords: p.projective().to_vec(),
            })
            .value
        }
    }
}

/// Number of doublings after which the duplication tail C(E)·4⁻ⁿ·(4/3) is at most eps.
pub fn doublings_for(c_e: f64, eps: f64) -> Result<u32> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let mut n = 0;
    while c_e * (4.0 / 3.0) * 0.25f64.powi(n as i32) > eps {
        n += 1;
        if n > MAX_DOUBLINGS {
            return Err(Error::ResourceLimit(format!(
                "eps = {eps} needs more than {MAX_DOUBLINGS} doublings"
            )));
        }
    }
    Ok(n)
}

/// Canonical height within `eps`, via the duplication limit.
pub fn canonical_height(e: &EllipticCurveQ, p: &EPoint, eps: f64) -> Result<HeightValue> {
    e.check(p)?;
    let n = doublings_for(e.c_e(), eps)?;
    if e.is_torsion(p) {
        return Ok(HeightValue {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let v = duplication_approximant(e, p, n)?;
    Ok(HeightValue {
        value: v,
        abs_error: eps + FLOAT_REL * v.abs().max(1.0),
    })
}

/// 4⁻ⁿ·h₂(ι(2ⁿP)) for a non-torsion point.
///
/// The x-coordinate of 2ᵏP is tracked as a coprime pair (X : Z). Its
/// archimedean size is followed in floating point on the normalised pair and
/// the gcd removed at each doubling is computed exactly modulo a power of the
/// resultant of the duplication forms, which every such gcd divides.
pub fn duplication_approximant(e: &EllipticCurveQ, p: &EPoint, n: u32) -> Result<f64> {
    let (x, _) = match p {
        EPoint::Infinity => return Ok(0.0),
        EPoint::Affine(x, y) => (x, y),
    };
    let a = e.a().clone();
    let b = e.b().clone();
    let af = a.to_f64().unwrap_or(f64::INFINITY);
    let bf = b.to_f64().unwrap_or(f64::INFINITY);
    let res = duplication_resultant(&a, &b).abs();
    let mut modulus = num_traits::pow(res.clone(), n as usize + 1);

    let x0 = x.numer().clone();
    let z0 = x.denom().clone();
    let big = x0.abs().max(z0.clone());
    let mut log_m = ln_abs(&big);
    let mut u = signed_ratio(&x0, &big);
    let mut w = signed_ratio(&z0, &big);
    let mut xm = x0.mod_floor(&modulus);
    let mut zm = z0.mod_floor(&modulus);

    for _ in 0..n {
        let (f1, f2) = dup_forms_f64(u, w, af, bf);
        let s = f1.abs().max(f2.abs());
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Internal("duplication lost precision".into()));
        }
        let (g1, g2) = dup_forms_big(&xm, &zm, &a, &b);
        let g1 = g1.mod_floor(&modulus);
        let g2 = g2.mod_floor(&modulus);
        let g = g1.gcd(&g2).gcd(&modulus);
        if g.is_zero() || !res.is_multiple_of(&g) {
            return Err(Error::Internal(
                "gcd at a doubling does not divide the resultant".into(),
            ));
        }
        log_m = 4.0 * log_m + s.ln() - ln_abs(&g);
        u = f1 / s;
        w = f2.abs() / s;
        modulus = &modulus / &g;
        xm = (g1 / &g).mod_floor(&modulus);
        zm = (g2 / &g).mod_floor(&modulus);
    }
    // (X·d : y·d³ : d³) with Z = d² has squared norm X²Z + (X³ + AXZ² + BZ³) + Z³.
    let inner = u * u * w + u * u * u + af * u * w * w + bf * w * w * w + w * w * w;
    if !(inner > 0.0) {
        return Err(Error::Internal("nonpositive norm in the final height".into()));
    }
    let h2 = 0.5 * (3.0 * log_m + inner.ln());
    Ok(h2 / 4f64.powi(n as i32))
}

fn signed_ratio(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let r = (ln_abs(num) - ln_abs(den)).exp();
    if num.is_negative() {
        -r
    } else {
        r
    }
}

fn dup_forms_f64(x: f64, z: f64, a: f64, b: f64) -> (f64, f64) {
    let x2 = x * x;
    let z2 = z * z;
    let f1 = x2 * x2 - 2.0 * a * x2 * z2 - 8.0 * b * x * z2 * z + a * a * z2 * z2;
    let f2 = 4.0 * z * (x2 * x + a * x * z2 + b * z2 * z);
    (f1, f2)
}

fn dup_forms_big(x: &BigInt, z: &BigInt, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let x2 = x * x;
    let z2 = z * z;
    let z3 = &z2 * z;
    let f1 = &x2 * &x2 - BigInt::from(2) * a * &x2 * &z2 - BigInt::from(8) * b * x * &z3 + a * a * &z2 * &z2;
    let f2 = BigInt::from(4) * z * (&x2 * x + a * x * &z2 + b * &z3);
    (f1, f2)
}

/// Resultant of the two quartic forms giving x(2P).
pub fn duplication_resultant(a: &BigInt, b: &BigInt) -> BigInt {
    let z = BigInt::zero;
    let f1 = [BigInt::from(1), z(), BigInt::from(-2) * a, BigInt::from(-8) * b, a * a];
    let f2 = [z(), BigInt::from(4), z(), BigInt::from(4) * a, BigInt::from(4) * b];
    let mut m = vec![vec![BigInt::zero(); 8]; 8];
    for shift in 0..4 {
        m[shift][shift..shift + 5].clone_from_slice(&f1);
        m[shift + 4][shift..shift + 5].clone_from_slice(&f2);
    }
    bareiss_det(m)
}

/// Both sides of the comparison |h₂(P) − ĥ(P)| ≤ N·C(E).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapWitness {
    pub holds: bool,
    pub h2: f64,
    pub hhat: f64,
    pub gap: f64,
    pub allowance: f64,
}

/// Checks the height comparison window on a tuple of points.
pub fn height_gap_check(e: &EllipticCurveQ, ps: &[EPoint], eps: f64) -> Result<GapWitness> {
    let mut h2 = 0.0;
    let mut hhat = 0.0;
    let mut err = 0.0;
    for p in ps {
        let hv = canonical_height(e, p, eps)?;
        h2 += point_h2(p);
        hhat += hv.value;
        err += hv.abs_error;
    }
    let gap = (h2 - hhat).abs();
    let allowance = ps.len() as f64 * e.c_e();
    Ok(GapWitness {
        holds: gap <= allowance + err,
        h2,
        hhat,
        gap,
        allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr};

    fn pp(v: &[Q]) -> ProjPoint {
        ProjPoint::new(v.to_vec()).unwrap()
    }

    /// 4⁻ⁿ·h₂(ι(2ⁿP)) by exact repeated doubling.
    fn naive_approximant(e: &EllipticCurveQ, p: &EPoint, n: u32) -> f64 {
        let mut r = p.clone();
        for _ in 0..n {
            r = e.add(&r, &r).unwrap();
        }
        point_h2(&r) / 4f64.powi(n as i32)
    }

    #[test]
    fn weil_examples() {
        assert_eq!(weil_height(&pp(&[q(1), q(1)])).value, 0.0);
        assert!((weil_height(&pp(&[q(3), q(4)])).value - 4f64.ln()).abs() < 1e-15);
        assert!((weil_height(&pp(&[qr(2, 3), q(4)])).value - 6f64.ln()).abs() < 1e-15);
        assert!(ProjPoint::new(vec![q(0), q(0)]).is_err());
    }

    #[test]
    fn h2_examples() {
        assert_eq!(h2_height(&pp(&[q(1), q(0)])).value, 0.0);
        assert!((h2_height(&pp(&[q(3), q(4)])).value - 5f64.ln()).abs() < 1e-15);
        assert!((h2_height(&pp(&[q(1), q(1)])).value - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn resultant_matches_closed_form() {
        // Res = 2⁸·(4A³ + 27B²)²
        for (a, b) in [(0i64, 1i64), (-1, 0), (0, -2), (3, -5)] {
            let core = 4 * a * a * a + 27 * b * b;
            let r = duplication_resultant(&BigInt::from(a), &BigInt::from(b));
            assert_eq!(r.abs(), BigInt::from(256) * BigInt::from(core * core));
        }
    }

    #[test]
    fn tracked_approximant_matches_exact_doubling() {
        for (a, b, x, y) in [(0i64, -2i64, 3i64, 5i64), (1, 1, 0, 1), (0, 17, -2, 3), (-7, 10, 1, 2)] {
            let e = EllipticCurveQ::from_i64(a, b).unwrap();
            let p = EPoint::from_ints(x, y);
            for n in 0..6 {
                let fast = duplication_approximant(&e, &p, n).unwrap();
                let slow = naive_approximant(&e, &p, n);
                assert!((fast - slow).abs() < 1e-10, "{a} {b} n={n}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn torsion_has_zero_height() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        for t in e.torsion_subgroup().unwrap() {
            assert_eq!(canonical_height(&e, &t, 1e-9).unwrap().value, 0.0);
        }
    }

    #[test]
    fn doubling_quadruples_height() {
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let p = EPoint::from_ints(3, 5);
        let h = canonical_height(&e, &p, 1e-9).unwrap().value;
        let h2p = canonical_height(&e, &e.scalar_mul(2, &p).unwrap(), 1e-9).unwrap().value;
        assert!(h > 0.0);
        assert!((h2p - 4.0 * h).abs() < 5e-9);
        let coarse = canonical_height(&e, &p, 1e-6).unwrap().value;
        assert!((coarse - h).abs() < 1e-6 + 1e-9);
    }

    #[test]
    fn gap_examples() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let w = height_gap_check(&e, &[EPoint::Infinity, EPoint::Infinity], 1e-9).unwrap();
        assert!(w.holds && w.h2 == 0.0 && w.hhat == 0.0);
        assert!(height_gap_check(&e, &[EPoint::from_ints(2, 3)], 1e-9).unwrap().holds);
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let p = EPoint::from_ints(3, 5);
        let w = height_gap_check(&e, &[p.clone(), p], 1e-9).unwrap();
        assert!(w.holds && w.gap <= 2.0 * e.c_e());
    }

    #[test]
    fn off_curve_point_rejected() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        assert!(canonical_height(&e, &EPoint::from_ints(1, 1), 1e-9).is_err());
    }
}
