//! Weierstrass curves y² = x³ + Ax + B over the rationals with integral
//! coefficients: invariants, the chord-tangent group law, rational torsion
//! and rational lifts of a y-coordinate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::arith::{exact_cbrt, format_rational, integer_roots_depressed_cubic, Q};
use crate::error::{Error, Result};
use crate::heights::weil_height_q;

/// Largest order of a rational torsion point on an elliptic curve over Q.
pub const MAX_TORSION_ORDER: u32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticCurveQ {
    a: BigInt,
    b: BigInt,
    disc: BigInt,
    j: Q,
    c_e: f64,
}

/// A rational point: the identity or an affine pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EPoint {
    Infinity,
    Affine(Q, Q),
}

impl EPoint {
    pub fn affine(x: Q, y: Q) -> Self {
        EPoint::Affine(x, y)
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        EPoint::Affine(Q::from_integer(x.into()), Q::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EPoint::Infinity)
    }

    pub fn x(&self) -> Option<&Q> {
        match self {
            EPoint::Affine(x, _) => Some(x),
            EPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&Q> {
        match self {
            EPoint::Affine(_, y) => Some(y),
            EPoint::Infinity => None,
        }
    }

    /// Projective coordinates (x : y : 1), or (0 : 1 : 0) for the identity.
    pub fn projective(&self) -> [Q; 3] {
        match self {
            EPoint::Affine(x, y) => [x.clone(), y.clone(), Q::one()],
            EPoint::Infinity => [Q::zero(), Q::one(), Q::zero()],
        }
    }
}

impl fmt::Display for EPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EPoint::Infinity => write!(f, "O"),
            EPoint::Affine(x, y) => write!(f, "({}, {})", format_rational(x), format_rational(y)),
        }
    }
}

impl EllipticCurveQ {
    /// Builds the curve y² = x³ + ax + b and its invariants.
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        let four_a3 = BigInt::from(4) * &a * &a * &a;
        let core = &four_a3 + BigInt::from(27) * &b * &b;
        if core.is_zero() {
            return Err(Error::SingularCurve);
        }
        let disc = BigInt::from(-16) * &core;
        let j = Q::new(BigInt::from(-1728) * BigInt::from(64) * &a * &a * &a, disc.clone());
        let h_disc = weil_height_q(&Q::from_integer(disc.clone()));
        let h_j = weil_height_q(&j);
        let h_a = weil_height_q(&Q::from_integer(a.clone()));
        let h_b = weil_height_q(&Q::from_integer(b.clone()));
        let c_e = (h_disc + 3.0 * h_j) / 4.0 + (h_a + h_b) / 2.0 + 4.0;
        Ok(EllipticCurveQ { a, b, disc, j, c_e })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Self::new(BigInt::from(a), BigInt::from(b))
    }

    /// Accepts rational coefficients but only when they are integers.
    pub fn from_rationals(a: &Q, b: &Q) -> Result<Self> {
        if !a.is_integer() || !b.is_integer() {
            return Err(Error::InvalidInput(
                "only integral Weierstrass models are supported; rescale x by u² and y by u³ to clear denominators"
                    .into(),
            ));
        }
        Self::new(a.to_integer(), b.to_integer())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// Δ = −16(4A³ + 27B²).
    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    /// j = −1728(4A)³/Δ.
    pub fn j_invariant(&self) -> &Q {
        &self.j
    }

    /// C(E) = (h_W(Δ) + 3h_W(j))/4 + (h_W(A) + h_W(B))/2 + 4, in nats.
    pub fn c_e(&self) -> f64 {
        self.c_e
    }

    fn aq(&self) -> Q {
        Q::from_integer(self.a.clone())
    }

    fn bq(&self) -> Q {
        Q::from_integer(self.b.clone())
    }

    /// x³ + Ax + B.
    pub fn rhs(&self, x: &Q) -> Q {
        x * x * x + self.aq() * x + self.bq()
    }

    pub fn contains(&self, p: &EPoint) -> bool {
        match p {
            EPoint::Infinity => true,
            EPoint::Affine(x, y) => y * y == self.rhs(x),
        }
    }

    pub fn check(&self, p: &EPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("point {p} is not on the curve")))
        }
    }

    pub fn neg(&self, p: &EPoint) -> Result<EPoint> {
        self.check(p)?;
        Ok(self.neg_unchecked(p))
    }

    pub fn add(&self, p: &EPoint, q: &EPoint) -> Result<EPoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    /// Scalar multiplication by double-and-add.
    pub fn scalar_mul(&self, n: i64, p: &EPoint) -> Result<EPoint> {
        self.check(p)?;
        Ok(self.mul_unchecked(n, p))
    }

    pub(crate) fn neg_unchecked(&self, p: &EPoint) -> EPoint {
        match p {
            EPoint::Infinity => EPoint::Infinity,
            EPoint::Affine(x, y) => EPoint::Affine(x.clone(), -y),
        }
    }

    pub(crate) fn add_unchecked(&self, p: &EPoint, q: &EPoint) -> EPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (EPoint::Infinity, _) => return q.clone(),
            (_, EPoint::Infinity) => return p.clone(),
            (EPoint::Affine(x1, y1), EPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return EPoint::Infinity;
            }
            (Q::from_integer(3.into()) * x1 * x1 + self.aq()) / (Q::from_integer(2.into()) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        EPoint::Affine(x3, y3)
    }

    pub(crate) fn mul_unchecked(&self, n: i64, p: &EPoint) -> EPoint {
        let mut base = if n < 0 { self.neg_unchecked(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = EPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// Exact order of `p` if it is at most [`MAX_TORSION_ORDER`].
    pub fn small_order(&self, p: &EPoint) -> Option<u32> {
        let mut acc = p.clone();
        for k in 1..=MAX_TORSION_ORDER {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add_unchecked(&acc, p);
        }
        None
    }

    pub fn is_torsion(&self, p: &EPoint) -> bool {
        self.small_order(p).is_some()
    }

    /// Full rational torsion subgroup by Lutz–Nagell: integral candidates
    /// with y = 0 or y² | Δ, kept when their order is finite.
    pub fn torsion_subgroup(&self) -> Result<Vec<EPoint>> {
        let mut ys = vec![BigInt::zero()];
        ys.extend(square_divisor_roots(&self.disc.abs())?);
        let mut out = vec![EPoint::Infinity];
        for y in ys {
            let q = &self.b - &y * &y;
            for x in integer_roots_depressed_cubic(&self.a, &q) {
                let signs: &[i32] = if y.is_zero() { &[1] } else { &[1, -1] };
                for &s in signs {
                    let pt = EPoint::Affine(Q::from_integer(x.clone()), Q::from_integer(&y * BigInt::from(s)));
                    if self.candidate_is_torsion(&pt)? {
                        out.push(pt);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn candidate_is_torsion(&self, p: &EPoint) -> Result<bool> {
        let mut acc = p.clone();
        for _ in 1..=MAX_TORSION_ORDER {
            match &acc {
                EPoint::Infinity => return Ok(true),
                EPoint::Affine(x, y) => {
                    if !x.is_integer() || !y.is_integer() {
                        return Ok(false);
                    }
                }
            }
            acc = self.add_unchecked(&acc, p);
        }
        if acc.is_infinity() {
            return Ok(true);
        }
        Err(Error::Internal(format!(
            "integral point {p} has no small order yet all multiples stay integral"
        )))
    }

    /// All rational x with x³ + Ax + B = y0².
    pub fn lift_x_from_y(&self, y0: &Q) -> Vec<Q> {
        // A rational point has y = n/e³ and x = a/e² with a integral.
        let e = match exact_cbrt(y0.denom()) {
            Some(e) => e,
            None => return Vec::new(),
        };
        let e2 = &e * &e;
        let e4 = &e2 * &e2;
        let e6 = &e4 * &e2;
        let p = &self.a * e4;
        let q = &self.b * e6 - y0.numer() * y0.numer();
        let mut xs: Vec<Q> = integer_roots_depressed_cubic(&p, &q)
            .into_iter()
            .map(|a| Q::new(a, e2.clone()))
            .filter(|x| self.rhs(x) == y0 * y0)
            .collect();
        xs.sort();
        xs
    }
}

/// Positive y with y² dividing n (n > 0).
fn square_divisor_roots(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut rest = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= rest && p <= limit {
        let mut e = 0;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if rest > BigInt::one() {
        if &p * &p > rest {
            factors.push((rest, 1));
        } else if rest < BigInt::from(10u64).pow(18) {
            // no prime factor below 10^6, so rest is p, p² or p·q
            let s = rest.sqrt();
            if &s * &s == rest {
                factors.push((s, 2));
            }
        } else {
            return Err(Error::ResourceLimit(format!(
                "discriminant cofactor {rest} too large to factor for the torsion search"
            )));
        }
    }
    let mut ys = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for y in &ys {
            let mut pk = BigInt::one();
            for _ in 0..=e / 2 {
                next.push(y * &pk);
                pk *= &p;
            }
        }
        ys = next;
    }
    ys.sort();
    Ok(ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn pt(x: i64, y: i64) -> EPoint {
        EPoint::from_ints(x, y)
    }

    #[test]
    fn invariants_of_small_curves() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        assert_eq!(e.discriminant(), &BigInt::from(-432));
        assert!(e.j_invariant().is_zero());
        assert!((e.c_e() - (432f64.ln() / 4.0 + 4.0)).abs() < 1e-12);
        let e = EllipticCurveQ::from_i64(-1, 0).unwrap();
        assert_eq!(e.discriminant(), &BigInt::from(64));
        assert_eq!(e.j_invariant(), &Q::from_integer(1728.into()));
        assert_eq!(EllipticCurveQ::from_i64(0, 0), Err(Error::SingularCurve));
    }

    #[test]
    fn non_integral_model_rejected() {
        assert!(EllipticCurveQ::from_rationals(&qr(1, 2), &qr(1, 1)).is_err());
    }

    #[test]
    fn chord_and_tangent() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        assert_eq!(e.add(&pt(2, 3), &pt(2, -3)).unwrap(), EPoint::Infinity);
        assert_eq!(e.add(&pt(2, 3), &pt(0, 1)).unwrap(), pt(-1, 0));
        assert_eq!(e.add(&pt(2, 3), &EPoint::Infinity).unwrap(), pt(2, 3));
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let two_p = e.scalar_mul(2, &pt(3, 5)).unwrap();
        assert_eq!(two_p, EPoint::Affine(qr(129, 100), qr(-383, 1000)));
        assert!(e.contains(&two_p));
    }

    #[test]
    fn off_curve_rejected() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        assert!(matches!(e.add(&pt(1, 1), &pt(2, 3)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn torsion_examples() {
        let t = EllipticCurveQ::from_i64(0, 1).unwrap().torsion_subgroup().unwrap();
        assert_eq!(t.len(), 6);
        for p in [pt(2, 3), pt(2, -3), pt(0, 1), pt(0, -1), pt(-1, 0)] {
            assert!(t.contains(&p));
        }
        let t = EllipticCurveQ::from_i64(-1, 0).unwrap().torsion_subgroup().unwrap();
        assert_eq!(t, vec![EPoint::Infinity, pt(-1, 0), pt(0, 0), pt(1, 0)]);
        let t = EllipticCurveQ::from_i64(0, -2).unwrap().torsion_subgroup().unwrap();
        assert_eq!(t, vec![EPoint::Infinity]);
    }

    #[test]
    fn torsion_of_order_seven_curve() {
        // y² = x³ − 43x + 166 has a rational point of order 7.
        let e = EllipticCurveQ::from_i64(-43, 166).unwrap();
        let t = e.torsion_subgroup().unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(e.small_order(&pt(3, 8)), Some(7));
    }

    #[test]
    fn lift_examples() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        assert_eq!(e.lift_x_from_y(&qr(3, 1)), vec![qr(2, 1)]);
        assert_eq!(e.lift_x_from_y(&qr(1, 1)), vec![qr(0, 1)]);
        assert!(e.lift_x_from_y(&qr(2, 1)).is_empty());
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        assert_eq!(e.lift_x_from_y(&qr(-383, 1000)), vec![qr(129, 100)]);
        assert!(e.lift_x_from_y(&qr(1, 4)).is_empty());
    }
}
