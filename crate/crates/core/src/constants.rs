//! Explicit constants of the height bounds.
//!
//! Values that overflow `f64` are carried as natural logarithms. Products of
//! prime powers, powers of π and powers of |D_K| are kept exactly as
//! [`Monomial`]s so that identities between constants can be checked with
//! rational exponents.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::arith::{factor_u64, factorial, Q};

/// A product ∏ p^{e_p} · π^{e_π} · |D_K|^{e_D} with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    primes: BTreeMap<u64, Rational64>,
    pi: Rational64,
    dk: Rational64,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            primes: BTreeMap::new(),
            pi: Rational64::zero(),
            dk: Rational64::zero(),
        }
    }

    /// A positive integer.
    pub fn int(n: u64) -> Self {
        assert!(n > 0, "monomials are positive");
        let mut m = Monomial::one();
        for (p, e) in factor_u64(n) {
            m.primes.insert(p, Rational64::from_integer(e as i64));
        }
        m
    }

    pub fn factorial(n: u64) -> Self {
        (1..=n).fold(Monomial::one(), |acc, k| acc.mul(&Monomial::int(k)))
    }

    pub fn pi_pow(e: Rational64) -> Self {
        Monomial {
            pi: e,
            ..Monomial::one()
        }
    }

    pub fn dk_pow(e: Rational64) -> Self {
        Monomial {
            dk: e,
            ..Monomial::one()
        }
    }

    /// ω_{2n} = πⁿ/n!.
    pub fn omega_2n(n: u64) -> Self {
        Monomial::pi_pow(Rational64::from_integer(n as i64)).div(&Monomial::factorial(n))
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut primes = self.primes.clone();
        for (p, e) in &o.primes {
            let v = *primes.get(p).unwrap_or(&Rational64::zero()) + e;
            if v.is_zero() {
                primes.remove(p);
            } else {
                primes.insert(*p, v);
            }
        }
        Monomial {
            primes,
            pi: self.pi + o.pi,
            dk: self.dk + o.dk,
        }
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            primes: self.primes.iter().map(|(p, e)| (*p, -e)).collect(),
            pi: -self.pi,
            dk: -self.dk,
        }
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: Rational64) -> Monomial {
        if e.is_zero() {
            return Monomial::one();
        }
        Monomial {
            primes: self.primes.iter().map(|(p, x)| (*p, x * e)).collect(),
            pi: self.pi * e,
            dk: self.dk * e,
        }
    }

    pub fn pi_exponent(&self) -> Rational64 {
        self.pi
    }

    pub fn dk_exponent(&self) -> Rational64 {
        self.dk
    }

    pub fn prime_exponent(&self, p: u64) -> Rational64 {
        *self.primes.get(&p).unwrap_or(&Rational64::zero())
    }

    /// The same monomial with the |D_K| factor removed.
    pub fn without_dk(&self) -> Monomial {
        Monomial {
            dk: Rational64::zero(),
            ..self.clone()
        }
    }

    /// Natural logarithm of the value at the given |D_K|.
    pub fn ln(&self, abs_dk: i64) -> f64 {
        let r = |x: &Rational64| *x.numer() as f64 / *x.denom() as f64;
        let mut s = 0.0;
        for (p, e) in &self.primes {
            s += r(e) * (*p as f64).ln();
        }
        s + r(&self.pi) * PI.ln() + r(&self.dk) * (abs_dk as f64).ln()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.primes.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        if !self.pi.is_zero() {
            parts.push(format!("π^{}", self.pi));
        }
        if !self.dk.is_zero() {
            parts.push(format!("|D_K|^{}", self.dk));
        }
        if parts.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", parts.join("·"))
    }
}

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn rr(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// ω_{2n} = πⁿ/n!, the volume of the unit ball of Cⁿ; ω_0 = 1.
pub fn omega_2n(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * PI / k as f64)
}

/// Volume of the unit ball of Rⁿ.
pub fn omega_real(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        return omega_2n(n / 2);
    }
    // Γ(k + 3/2) = √π·∏_{i=0..k} (i + 1/2)
    let k = (n - 1) / 2;
    let mut v = PI.powf(n as f64 / 2.0);
    let mut gamma = PI.sqrt() / 2.0;
    for i in 1..=k {
        gamma *= i as f64 + 0.5;
    }
    v /= gamma;
    v
}

/// The n-th harmonic number.
pub fn harmonic(n: u64) -> Q {
    (1..=n).fold(Q::zero(), |acc, k| acc + Q::new(BigInt::one(), BigInt::from(k)))
}

fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rational part Σ_{i≤d1} Σ_{j≤d2} 1/(2(i+j+1)) of the arithmetic Bézout constant.
pub fn bezout_c0_rational(d1: u64, d2: u64) -> Q {
    let mut s = Q::zero();
    for i in 0..=d1 {
        for j in 0..=d2 {
            s += Q::new(BigInt::one(), BigInt::from(2 * (i + j + 1)));
        }
    }
    s
}

/// Arithmetic Bézout constant for intersections in P_m of varieties of
/// dimensions d1, d2.
pub fn bezout_c0(d1: u64, d2: u64, m: u64) -> f64 {
    to_f64(&bezout_c0_rational(d1, d2)) + (m as f64 - (d1 + d2) as f64 / 2.0) * LN_2
}

/// C0(1, N−1, 3^N−1): the Bézout constant for a curve against a hypersurface
/// section of the image of E^N in P_{3^N−1}.
pub fn c0_rigorous(n: u32) -> f64 {
    bezout_c0(1, n as u64 - 1, 3u64.pow(n) - 1)
}

/// The closed form (H_N + log 2·(2(3^N−1)−N))/2 carried in the packaged c2.
pub fn c0_packaged(n: u32) -> f64 {
    (to_f64(&harmonic(n as u64)) + LN_2 * (2.0 * (3f64.powi(n as i32) - 1.0) - n as f64)) / 2.0
}

fn c_degree(n: u32, s: u32) -> BigInt {
    let base: BigInt = BigInt::from(12).pow(n - 1) * 2;
    BigInt::from(3).pow(n) * factorial(n as u64) * base.pow(s)
}

/// C1(N,s) = N(N−s+1)·3^N·N!·(12^{N−1}·2)^s.
pub fn c1_const(n: u32, s: u32) -> BigInt {
    BigInt::from(n) * BigInt::from(n - s + 1) * c_degree(n, s)
}

/// C2(m) = m³·(2m)!⁴ / 2^{4m−5}.
pub fn c2_const(m: u32) -> Q {
    let num = BigInt::from(m).pow(3) * factorial(2 * m as u64).pow(4u32);
    let e = 4 * m as i64 - 5;
    if e >= 0 {
        Q::new(num, BigInt::from(2).pow(e as u32))
    } else {
        Q::from_integer(num * BigInt::from(2).pow((-e) as u32))
    }
}

/// C3(N,s) = 3^N·N!·(12^{N−1}·2)^s.
pub fn c3_const(n: u32, s: u32) -> BigInt {
    c_degree(n, s)
}

fn mono_of(n: &BigInt) -> Monomial {
    // only called on products of small factorials and powers
    let mut rest = n.clone();
    let mut m = Monomial::one();
    let mut p = 2u64;
    while rest > BigInt::one() {
        let bp = BigInt::from(p);
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            m = m.mul(&Monomial::int(p));
        }
        p += 1;
    }
    m
}

fn mono_of_q(x: &Q) -> Monomial {
    mono_of(x.numer()).div(&mono_of(x.denom()))
}

/// C4(N,s,m) = C1(N,s)·C2(m)·N²·s·2^{N+2}·(2(2N)^{2N})^{2/m} / (ω_{2(N−s)}·ω_{2s}).
pub fn c4_monomial(n: u32, s: u32, m: u32) -> Monomial {
    let two_2n = Monomial::int(2).mul(&Monomial::int(2 * n as u64).pow(ri(2 * n as i64)));
    mono_of(&c1_const(n, s))
        .mul(&mono_of_q(&c2_const(m)))
        .mul(&Monomial::int((n * n * s) as u64))
        .mul(&Monomial::int(2).pow(ri(n as i64 + 2)))
        .mul(&two_2n.pow(rr(2, m as i64)))
        .div(&Monomial::omega_2n((n - s) as u64))
        .div(&Monomial::omega_2n(s as u64))
}

pub fn c4_ln(n: u32, s: u32, m: u32) -> f64 {
    c4_monomial(n, s, m).ln(1)
}

/// C5(N,s,E) = C1(N,s)·C(E).
pub fn c5(n: u32, s: u32, c_e: f64) -> f64 {
    c1_const(n, s).to_f64().unwrap_or(f64::INFINITY) * c_e
}

/// α = N!·3^{2N−1}·2^{2N−1}·|D_K|.
pub fn alpha_monomial(n: u32) -> Monomial {
    Monomial::factorial(n as u64)
        .mul(&Monomial::int(3).pow(ri(2 * n as i64 - 1)))
        .mul(&Monomial::int(2).pow(ri(2 * n as i64 - 1)))
        .mul(&Monomial::dk_pow(ri(1)))
}

/// β = N!·N^{4(N+r)/r}·(2r)!⁴·r³·2^{3N−4r+6+2(2N+1)/r}·3^{2N−1}/(ω_{2(N−1)}ω_2)·|D_K|^{N/2+3}.
pub fn beta_monomial(n: u32, r: u32) -> Monomial {
    let (ni, rl) = (n as i64, r as i64);
    Monomial::factorial(n as u64)
        .mul(&Monomial::int(n as u64).pow(rr(4 * (ni + rl), rl)))
        .mul(&Monomial::factorial(2 * r as u64).pow(ri(4)))
        .mul(&Monomial::int(r as u64).pow(ri(3)))
        .mul(&Monomial::int(2).pow(ri(3 * ni - 4 * rl + 6) + rr(2 * (2 * ni + 1), rl)))
        .mul(&Monomial::int(3).pow(ri(2 * ni - 1)))
        .div(&Monomial::omega_2n(n as u64 - 1))
        .div(&Monomial::omega_2n(1))
        .mul(&Monomial::dk_pow(rr(ni + 6, 2)))
}

/// δ = N·α·((N/(N−1))·β)^{r/(N−r)}.
pub fn delta_monomial(n: u32, r: u32) -> Monomial {
    let ratio = Monomial::int(n as u64).div(&Monomial::int(n as u64 - 1));
    Monomial::int(n as u64)
        .mul(&alpha_monomial(n))
        .mul(&ratio.mul(&beta_monomial(n, r)).pow(rr(r as i64, (n - r) as i64)))
}

/// c1(N,r) assembled from the pipeline: δ with its |D_K| power removed.
pub fn c1_sharp_monomial(n: u32, r: u32) -> Monomial {
    delta_monomial(n, r).without_dk()
}

/// c1(N,r) from its closed form.
pub fn c1_sharp_closed_monomial(n: u32, r: u32) -> Monomial {
    let (ni, rl) = (n as i64, r as i64);
    let k = ni - rl;
    Monomial::int(2)
        .pow(rr(2 * ni * ni + 3 * ni + ni * rl - 4 * rl * rl + 7 * rl + 2, k))
        .mul(&Monomial::int(3).pow(rr((2 * ni - 1) * ni, k)))
        .div(
            &Monomial::omega_2n(n as u64 - 1)
                .mul(&Monomial::omega_2n(1))
                .pow(rr(rl, k)),
        )
        .mul(&Monomial::int(n as u64).pow(rr(5 * ni + 4 * rl, k)))
        .div(&Monomial::int(n as u64 - 1).pow(rr(rl, k)))
        .mul(&Monomial::factorial(n as u64).pow(rr(ni, k)))
        .mul(&Monomial::factorial(2 * r as u64).pow(rr(4 * rl, k)))
        .mul(&Monomial::int(r as u64).pow(rr(3 * rl, k)))
}

/// Exponent (2N+Nr+4r)/(2(N−r)) of |D_K| in the transverse bound.
pub fn dk_exponent(n: u32, r: u32) -> Rational64 {
    let (ni, rl) = (n as i64, r as i64);
    rr(2 * ni + ni * rl + 4 * rl, 2 * (ni - rl))
}

/// ln c1(n,r) = ln (2^{8n²}·3^{2n²}·n^{9n²})^{1/(n−r)}.
pub fn c1_simple_ln(n: u32, r: u32) -> f64 {
    let n2 = (n * n) as f64;
    (8.0 * n2 * LN_2 + 2.0 * n2 * 3f64.ln() + 9.0 * n2 * (n as f64).ln()) / (n - r) as f64
}

/// ln(e^a + e^b) without overflow.
pub fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln x, with ln 0 = −∞.
pub fn ln0(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}
