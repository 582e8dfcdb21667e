//! A quick run of the library's internal invariants on fixed inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{q, Q};
use crate::bounds::{sharp_constants, transverse_bound, C0Choice, Check, CurveDescriptor, PolyInput};
use crate::cm::{CMOrder, EndElement, KNum};
use crate::constants::{beta_monomial, c1_sharp_closed_monomial, c1_sharp_monomial, c4_monomial, Monomial};
use crate::divpoly::reduced_numerator_degree;
use crate::elliptic::{EPoint, EllipticCurveQ};
use crate::error::Result;
use crate::gnum::decompose_form;
use crate::heights::{canonical_height, DEFAULT_EPS};
use crate::klattice::{successive_minima, KLattice};
use crate::search::{brute_force_pairs, search_rational_points, MWInput};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn check(name: &str, holds: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        holds,
        detail,
    }
}

fn small_orders() -> Vec<CMOrder> {
    [-1, -2, -3, -7, -11]
        .iter()
        .map(|&d| CMOrder::new(d, 1).expect("squarefree"))
        .collect()
}

pub fn run() -> Result<SelftestReport> {
    let mut checks = Vec::new();

    let mut exact = true;
    for n in 2..=6u32 {
        for r in 1..n {
            let dk = Monomial::dk_pow(num_rational::Rational64::new(n as i64 + 6, 2));
            exact &= beta_monomial(n, r) == c4_monomial(n, 1, r).mul(&dk);
            exact &= c1_sharp_monomial(n, r) == c1_sharp_closed_monomial(n, r);
        }
    }
    checks.push(check(
        "constant identities for N ≤ 6",
        exact,
        "β = C4·|D_K|^(N/2+3), closed c1 = pipeline c1".into(),
    ));

    let e = EllipticCurveQ::from_i64(0, 1)?;
    let mut routes = true;
    for o in small_orders() {
        for (n, r) in [(2, 1), (3, 1), (3, 2), (4, 0)] {
            let k = sharp_constants(n, r, &o, e.c_e(), C0Choice::Rigorous)?;
            routes &= k.checks.iter().all(|c| c.holds);
            let rep = transverse_bound(
                &CurveDescriptor::transverse(n, 15, 10.0, r, o, e.clone()),
                C0Choice::Rigorous,
            )?;
            routes &= rep.checks_hold();
        }
    }
    checks.push(check(
        "transverse bound routes agree",
        routes,
        "closed form against α/β/γ/T/δ".into(),
    ));

    let e2 = EllipticCurveQ::from_i64(0, -2)?;
    let g = EPoint::from_ints(3, 5);
    let pts: Vec<EPoint> = (1..=3).map(|k| e2.scalar_mul(k, &g)).collect::<Result<_>>()?;
    let assoc = e2.add(&e2.add(&pts[0], &pts[1])?, &pts[2])? == e2.add(&pts[0], &e2.add(&pts[1], &pts[2])?)?;
    checks.push(check(
        "group law associativity",
        assoc,
        "G, 2G, 3G on y² = x³ − 2".into(),
    ));

    let h1 = canonical_height(&e2, &g, DEFAULT_EPS)?.value;
    let mut worst: f64 = 0.0;
    for a in 2..=4 {
        let ha = canonical_height(&e2, &e2.scalar_mul(a, &g)?, DEFAULT_EPS)?.value;
        worst = worst.max((ha / (a * a) as f64 / h1 - 1.0).abs());
    }
    checks.push(check(
        "canonical height is quadratic",
        worst < 1e-6,
        format!("worst relative deviation {worst:.3e}"),
    ));

    let mut degs = true;
    for n in 1..=5u32 {
        degs &= reduced_numerator_degree(&e, n)? == (n * n) as i64;
    }
    checks.push(check("x∘[n] has degree n²", degs, "n = 1, …, 5 on y² = x³ + 1".into()));

    let mut mink = true;
    for o in small_orders() {
        let l = KLattice::new(
            vec![
                vec![EndElement::new(1, 1), EndElement::int(2), EndElement::int(0)],
                vec![EndElement::int(0), EndElement::new(3, -1), EndElement::int(1)],
            ],
            o,
        )?;
        mink &= successive_minima(&l)?.minkowski_ok;
    }
    checks.push(check(
        "Minkowski inequality on sample lattices",
        mink,
        "rank 2 in K³, five orders".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ident = true;
    for o in small_orders() {
        for _ in 0..40 {
            let l: Vec<KNum> = (0..3)
                .map(|_| KNum {
                    a: Q::new(rng.gen_range(-9..10).into(), rng.gen_range(1..6).into()),
                    b: q(rng.gen_range(-9..10)),
                })
                .collect();
            let t: Vec<EndElement> = (0..3)
                .map(|_| EndElement::new(rng.gen_range(-20..21), rng.gen_range(-20..21)))
                .collect();
            let d = decompose_form(&l, &t, &o)?;
            ident &= d.identity_holds() && d.first_norm_ok && d.second_norm_ok;
        }
    }
    checks.push(check(
        "real decomposition of linear forms",
        ident,
        "200 random forms and vectors".into(),
    ));

    let mw = MWInput::new(&e, None, 0)?;
    let p = PolyInput::new(vec![q(-1), q(1)])?;
    let rep = search_rational_points(&e, &CMOrder::new(-3, 1)?, &p, &mw, 1)?;
    let sweep = brute_force_pairs(&e, &p, &mw, 0)?;
    checks.push(check(
        "torsion-only search is complete",
        rep.fully_certified && rep.points_found == sweep && sweep.len() == 4,
        format!("{} points on y² = x³ + 1 with p(x) = x − 1", rep.points_found.len()),
    ));

    Ok(SelftestReport { checks })
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        let r = super::run().unwrap();
        for c in &r.checks {
            assert!(c.holds, "{}: {}", c.name, c.detail);
        }
    }
}
