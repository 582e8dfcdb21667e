//! The endomorphism order Z[τ] and exact arithmetic in K = Q(τ).

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

use crate::arith::Q;
use crate::error::{Error, Result};

/// End(E) as Z[τ] with τ² = x0 + y0·τ, or Z for curves without CM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CMOrder {
    d: i64,
    f: i64,
    d_k: i64,
    x0: i64,
    y0: i64,
    cm: bool,
}

impl CMOrder {
    /// Order attached to a squarefree D < 0 and conductor f ∈ {1, 2}.
    pub fn new(d: i64, f: i64) -> Result<Self> {
        if d >= 0 || !is_squarefree(d.unsigned_abs()) {
            return Err(Error::InvalidInput(format!(
                "D = {d} must be a squarefree negative integer"
            )));
        }
        if f != 1 && f != 2 {
            return Err(Error::InvalidInput(format!("conductor f = {f} must be 1 or 2")));
        }
        if d.rem_euclid(4) == 1 {
            if f != 1 {
                return Err(Error::InvalidInput(format!("D = {d} ≡ 1 mod 4 requires f = 1")));
            }
            Ok(CMOrder {
                d,
                f,
                d_k: d,
                x0: (d - 1) / 4,
                y0: 1,
                cm: true,
            })
        } else {
            Ok(CMOrder {
                d,
                f,
                d_k: 4 * d,
                x0: f * f * d,
                y0: 0,
                cm: true,
            })
        }
    }

    /// Z acting on a curve without complex multiplication.
    pub fn non_cm() -> Self {
        CMOrder {
            d: 0,
            f: 1,
            d_k: 1,
            x0: -1,
            y0: 0,
            cm: false,
        }
    }

    /// The order attached to a rational CM j-invariant, if it is one this
    /// type can represent.
    pub fn from_j_invariant(j: &Q) -> Option<Self> {
        const TABLE: [(i64, i64, i64); 10] = [
            (0, -3, 1),
            (1728, -1, 1),
            (287496, -1, 2),
            (8000, -2, 1),
            (-3375, -7, 1),
            (-32768, -11, 1),
            (-884736, -19, 1),
            (-884736000, -43, 1),
            (-147197952000, -67, 1),
            (-262537412640768000, -163, 1),
        ];
        TABLE
            .iter()
            .find(|(jj, _, _)| *j == Q::from_integer((*jj).into()))
            .and_then(|&(_, d, f)| CMOrder::new(d, f).ok())
    }

    /// Whether j is the j-invariant of some CM curve over Q.
    pub fn j_has_cm(j: &Q) -> bool {
        const OTHER: [i64; 3] = [54000, -12288000, 16581375];
        Self::from_j_invariant(j).is_some() || OTHER.iter().any(|&v| *j == Q::from_integer(v.into()))
    }

    pub fn is_cm(&self) -> bool {
        self.cm
    }

    pub fn d(&self) -> Option<i64> {
        self.cm.then_some(self.d)
    }

    pub fn conductor(&self) -> i64 {
        self.f
    }

    /// Discriminant D_K, or 1 without CM.
    pub fn d_k(&self) -> i64 {
        self.d_k
    }

    /// |D_K|, equal to 1 without CM.
    pub fn abs_dk(&self) -> i64 {
        self.d_k.abs()
    }

    /// (x0, y0) with τ² = x0 + y0·τ.
    pub fn tau_sq(&self) -> (i64, i64) {
        (self.x0, self.y0)
    }

    /// |τ|², taken as 1 without CM.
    pub fn tau_abs_sq(&self) -> i64 {
        if self.cm {
            -self.x0
        } else {
            1
        }
    }

    pub fn tau_abs(&self) -> f64 {
        (self.tau_abs_sq() as f64).sqrt()
    }

    /// τ as a complex number.
    pub fn tau(&self) -> Complex64 {
        if !self.cm {
            return Complex64::new(0.0, 1.0);
        }
        let s = (self.d.unsigned_abs() as f64).sqrt();
        if self.y0 == 1 {
            Complex64::new(0.5, s / 2.0)
        } else {
            Complex64::new(0.0, self.f as f64 * s)
        }
    }

    /// Rejects elements outside the order (nonzero τ-part without CM).
    pub fn validate(&self, a: &EndElement) -> Result<()> {
        if !self.cm && a.b != 0 {
            return Err(Error::InvalidInput(format!("{a} is not in End(E) = Z")));
        }
        Ok(())
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    n > 0
}

/// An endomorphism a + b·τ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndElement {
    pub a: i64,
    pub b: i64,
}

impl fmt::Display for EndElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}τ"),
            (a, b) if b < 0 => write!(f, "{a}{b}τ"),
            (a, b) => write!(f, "{a}+{b}τ"),
        }
    }
}

impl EndElement {
    pub const fn new(a: i64, b: i64) -> Self {
        EndElement { a, b }
    }

    pub const fn int(a: i64) -> Self {
        EndElement { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// |α|² = a² + ab·(2 Re τ) + b²|τ|².
    pub fn norm(&self, ord: &CMOrder) -> i64 {
        let (x0, y0) = ord.tau_sq();
        self.a * self.a + self.a * self.b * y0 - self.b * self.b * x0
    }

    pub fn mul(&self, o: &EndElement, ord: &CMOrder) -> EndElement {
        let (x0, y0) = ord.tau_sq();
        let bd = self.b * o.b;
        EndElement {
            a: self.a * o.a + bd * x0,
            b: self.a * o.b + self.b * o.a + bd * y0,
        }
    }

    pub fn add(&self, o: &EndElement) -> EndElement {
        EndElement {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn sub(&self, o: &EndElement) -> EndElement {
        EndElement {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    pub fn neg(&self) -> EndElement {
        EndElement { a: -self.a, b: -self.b }
    }

    /// Complex conjugate, using τ̄ = y0 − τ.
    pub fn conj(&self, ord: &CMOrder) -> EndElement {
        let (_, y0) = ord.tau_sq();
        EndElement {
            a: self.a + self.b * y0,
            b: -self.b,
        }
    }

    pub fn to_complex(&self, ord: &CMOrder) -> Complex64 {
        Complex64::new(self.a as f64, 0.0) + ord.tau() * self.b as f64
    }

    pub fn to_k(&self) -> KNum {
        KNum {
            a: Q::from_integer(self.a.into()),
            b: Q::from_integer(self.b.into()),
        }
    }
}

/// |α|² of an endomorphism.
pub fn end_norm(alpha: &EndElement, ord: &CMOrder) -> i64 {
    alpha.norm(ord)
}

pub fn end_mul(alpha: &EndElement, beta: &EndElement, ord: &CMOrder) -> EndElement {
    alpha.mul(beta, ord)
}

/// An element a + b·τ of K with rational a, b.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KNum {
    pub a: Q,
    pub b: Q,
}

impl KNum {
    pub fn zero() -> Self {
        KNum {
            a: Q::zero(),
            b: Q::zero(),
        }
    }

    pub fn one() -> Self {
        KNum {
            a: Q::one(),
            b: Q::zero(),
        }
    }

    pub fn rational(a: Q) -> Self {
        KNum { a, b: Q::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &KNum) -> KNum {
        KNum {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn sub(&self, o: &KNum) -> KNum {
        KNum {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    pub fn neg(&self) -> KNum {
        KNum {
            a: -&self.a,
            b: -&self.b,
        }
    }

    pub fn scale(&self, q: &Q) -> KNum {
        KNum {
            a: &self.a * q,
            b: &self.b * q,
        }
    }

    pub fn mul(&self, o: &KNum, ord: &CMOrder) -> KNum {
        let (x0, y0) = ord.tau_sq();
        let bd = &self.b * &o.b;
        KNum {
            a: &self.a * &o.a + &bd * Q::from_integer(x0.into()),
            b: &self.a * &o.b + &self.b * &o.a + &bd * Q::from_integer(y0.into()),
        }
    }

    pub fn conj(&self, ord: &CMOrder) -> KNum {
        let (_, y0) = ord.tau_sq();
        KNum {
            a: &self.a + &self.b * Q::from_integer(y0.into()),
            b: -&self.b,
        }
    }

    /// |z|² as a rational.
    pub fn norm(&self, ord: &CMOrder) -> Q {
        self.mul(&self.conj(ord), ord).a
    }

    pub fn inv(&self, ord: &CMOrder) -> Option<KNum> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm(ord);
        let c = self.conj(ord);
        Some(KNum {
            a: c.a / &n,
            b: c.b / n,
        })
    }

    pub fn to_complex(&self, ord: &CMOrder) -> Complex64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        Complex64::new(a, 0.0) + ord.tau() * b
    }

    /// The element as an endomorphism, if both parts are integers.
    pub fn to_end(&self) -> Option<EndElement> {
        use num_traits::ToPrimitive;
        if !self.a.is_integer() || !self.b.is_integer() {
            return None;
        }
        Some(EndElement {
            a: self.a.to_integer().to_i64()?,
            b: self.b.to_integer().to_i64()?,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn orders() -> Vec<CMOrder> {
        let mut v: Vec<CMOrder> = [-1, -2, -3, -7, -11]
            .iter()
            .map(|&d| CMOrder::new(d, 1).unwrap())
            .collect();
        v.push(CMOrder::new(-1, 2).unwrap());
        v.push(CMOrder::new(-2, 2).unwrap());
        v
    }

    #[test]
    fn order_data() {
        let g = CMOrder::new(-1, 1).unwrap();
        assert_eq!((g.d_k(), g.tau_sq()), (-4, (-1, 0)));
        let e = CMOrder::new(-3, 1).unwrap();
        assert_eq!((e.d_k(), e.tau_sq()), (-3, (-1, 1)));
        let t = CMOrder::new(-2, 2).unwrap();
        assert_eq!((t.d_k(), t.tau_sq()), (-8, (-8, 0)));
        assert!(CMOrder::new(-3, 2).is_err());
        assert!(CMOrder::new(-4, 1).is_err());
        assert!(CMOrder::new(5, 1).is_err());
        assert_eq!(CMOrder::non_cm().abs_dk(), 1);
    }

    #[test]
    fn tau_satisfies_its_quadratic() {
        for o in orders() {
            let t = o.tau();
            let (x0, y0) = o.tau_sq();
            let r = t * t - (Complex64::new(x0 as f64, 0.0) + t * y0 as f64);
            assert!(r.norm() < 1e-12);
            assert!((t.norm_sqr() - o.tau_abs_sq() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let g = CMOrder::new(-1, 1).unwrap();
        assert_eq!(end_norm(&EndElement::new(3, 4), &g), 25);
        assert_eq!(end_norm(&EndElement::new(0, 0), &g), 0);
        let e = CMOrder::new(-3, 1).unwrap();
        assert_eq!(end_norm(&EndElement::new(1, 1), &e), 3);
    }

    #[test]
    fn mul_examples() {
        let g = CMOrder::new(-1, 1).unwrap();
        let one_i = EndElement::new(1, 1);
        assert_eq!(end_mul(&one_i, &EndElement::int(1), &g), one_i);
        assert_eq!(end_mul(&one_i, &one_i, &g), EndElement::new(0, 2));
        let e = CMOrder::new(-3, 1).unwrap();
        let tau = EndElement::new(0, 1);
        assert_eq!(end_mul(&tau, &tau, &e), EndElement::new(-1, 1));
    }

    #[test]
    fn knum_inverse() {
        for o in orders() {
            let z = EndElement::new(2, -3).to_k();
            let w = z.mul(&z.inv(&o).unwrap(), &o);
            assert_eq!(w, KNum::one());
        }
    }

    #[test]
    fn cm_from_j() {
        assert_eq!(
            CMOrder::from_j_invariant(&Q::zero()),
            Some(CMOrder::new(-3, 1).unwrap())
        );
        assert_eq!(
            CMOrder::from_j_invariant(&Q::from_integer(1728.into())),
            Some(CMOrder::new(-1, 1).unwrap())
        );
        assert_eq!(CMOrder::from_j_invariant(&Q::from_integer(1.into())), None);
    }
}
