//! Height bounds for points of low rank on curves in E^N.
//!
//! All arithmetic on the bounds is done on natural logarithms, since the
//! values overflow `f64` quickly as N grows. Every reported upper bound is
//! multiplied by [`GUARD`] to cover rounding in the transcendental factors.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Q;
use crate::cm::CMOrder;
use crate::constants::{
    alpha_monomial, beta_monomial, c0_packaged, c0_rigorous, c1_const, c1_sharp_closed_monomial, c1_sharp_monomial,
    c1_simple_ln, c2_const, c3_const, c4_monomial, delta_monomial, dk_exponent, harmonic, ln0, ln_add, omega_2n,
    Monomial,
};
use crate::elliptic::EllipticCurveQ;
use crate::error::{Error, Result};
use crate::heights::{weil_height, ProjPoint};

/// Multiplicative guard on every reported upper bound.
pub const GUARD: f64 = 1.0 + 1e-6;

/// Relative tolerance for the agreement of the two evaluations of a bound.
pub const ROUTE_TOLERANCE: f64 = 1e-9;

/// Where a constant comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// The arithmetic Bézout constant evaluated from its defining sum.
    #[serde(rename = "rigorous")]
    Rigorous,
    /// The closed form packaged into the published c2.
    #[serde(rename = "packaged")]
    Packaged,
    /// Assembled from other constants by exact formulas.
    #[serde(rename = "derived")]
    Derived,
}

/// Which Bézout constant enters c2 and the bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum C0Choice {
    #[default]
    Rigorous,
    Packaged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub name: String,
    /// Natural logarithm of the value.
    pub ln: f64,
    /// The value itself when it fits in an f64.
    pub value: Option<f64>,
    pub provenance: Provenance,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub entries: Vec<Constant>,
}

impl ConstantsTable {
    fn push_ln(&mut self, name: &str, ln: f64, provenance: Provenance) {
        self.entries.push(Constant {
            name: name.into(),
            ln,
            value: finite(ln.exp()),
            provenance,
        });
    }

    fn push(&mut self, name: &str, value: f64, provenance: Provenance) {
        self.entries.push(Constant {
            name: name.into(),
            ln: ln0(value),
            value: Some(value),
            provenance,
        });
    }

    pub fn get(&self, name: &str) -> Option<&Constant> {
        self.entries.iter().find(|c| c.name == name)
    }

    pub fn ln(&self, name: &str) -> Option<f64> {
        self.get(name).map(|c| c.ln)
    }
}

/// A named internal identity and whether it held.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Transverse,
    General,
    EmptyCertificate,
    PolyFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub branch: Branch,
    /// Natural logarithm of the guarded bound on ĥ (in nats); −∞ for an empty certificate.
    pub bound_ln: f64,
    /// The guarded bound when it fits in an f64.
    pub bound_nats: Option<f64>,
    pub trace: ConstantsTable,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl BoundReport {
    pub fn checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// A curve C ⊂ E^N together with the invariants the bounds depend on.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveDescriptor {
    pub n: u32,
    pub deg_c: u64,
    pub h2_c: f64,
    /// Height of C entering through the Zhang minimum.
    pub h_c: f64,
    /// Minimal dimension of a torsion variety containing C.
    pub t_c: u32,
    /// Minimal dimension of a translate containing C.
    pub r_c: u32,
    /// Rank of the points to bound.
    pub r: u32,
    pub ord: CMOrder,
    pub curve: EllipticCurveQ,
}

impl CurveDescriptor {
    /// A transverse curve: t_C = r_C = N and h(C) = 0.
    pub fn transverse(n: u32, deg_c: u64, h2_c: f64, r: u32, ord: CMOrder, curve: EllipticCurveQ) -> Self {
        CurveDescriptor {
            n,
            deg_c,
            h2_c,
            h_c: 0.0,
            t_c: n,
            r_c: n,
            r,
            ord,
            curve,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        if self.deg_c == 0 {
            return Err(Error::InvalidInput("deg C must be positive".into()));
        }
        if !(self.h2_c >= 0.0 && self.h2_c.is_finite() && self.h_c >= 0.0 && self.h_c.is_finite()) {
            return Err(Error::InvalidInput(
                "heights of C must be finite and nonnegative".into(),
            ));
        }
        if !(1 <= self.t_c && self.t_c <= self.r_c && self.r_c <= self.n) {
            return Err(Error::InvalidInput(format!(
                "need 1 ≤ t_C ≤ r_C ≤ N, got t_C = {}, r_C = {}, N = {}",
                self.t_c, self.r_c, self.n
            )));
        }
        Ok(())
    }
}

/// Constants of the transverse bound for points of rank r on a curve in E^N.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpConstants {
    pub n: u32,
    pub r: u32,
    pub abs_dk: i64,
    pub c_e: f64,
    pub c0: f64,
    pub table: ConstantsTable,
    pub checks: Vec<Check>,
    /// ln c1(N,r) and ln c2(N,r,E), without |D_K| factors.
    pub ln_c1: f64,
    pub ln_c2: f64,
    /// Exponent of |D_K| in front of the bound.
    pub dk_exp: f64,
}

fn c0_value(n: u32, choice: C0Choice) -> f64 {
    match choice {
        C0Choice::Rigorous => c0_rigorous(n),
        C0Choice::Packaged => c0_packaged(n),
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    // a, b are logarithms; their difference is the relative error
    (a - b).abs() <= ROUTE_TOLERANCE || (a == b)
}

fn ln_alpha_nodk(n: u32) -> f64 {
    alpha_monomial(n).ln(1)
}

/// All constants at (N, r), with the internal identities checked.
pub fn sharp_constants(n: u32, r: u32, ord: &CMOrder, c_e: f64, c0: C0Choice) -> Result<SharpConstants> {
    if n == 0 || r >= n {
        return Err(Error::InvalidInput(format!("need 0 ≤ r < N, got r = {r}, N = {n}")));
    }
    if n > 12 {
        return Err(Error::InvalidInput(format!(
            "N = {n} exceeds the supported range N ≤ 12"
        )));
    }
    let dk = ord.abs_dk();
    let ln_dk = (dk as f64).ln();
    let c0v = c0_value(n, c0);
    let mut t = ConstantsTable::default();
    let mut checks = Vec::new();
    t.push("C0", c0_rigorous(n), Provenance::Rigorous);
    t.push("C0_packaged", c0_packaged(n), Provenance::Packaged);
    t.push(
        "H_N",
        harmonic(n as u64).to_f64().unwrap_or(f64::NAN),
        Provenance::Derived,
    );
    t.push(
        "C1(N,1)",
        c1_const(n, 1).to_f64().unwrap_or(f64::INFINITY),
        Provenance::Derived,
    );
    t.push(
        "C3(N,1)",
        c3_const(n, 1).to_f64().unwrap_or(f64::INFINITY),
        Provenance::Derived,
    );
    t.push(
        "C5(N,1,E)",
        c1_const(n, 1).to_f64().unwrap_or(f64::INFINITY) * c_e,
        Provenance::Derived,
    );
    t.push("omega_2(N-1)", omega_2n(n - 1), Provenance::Derived);
    t.push("omega_2", omega_2n(1), Provenance::Derived);
    let ln_alpha = alpha_monomial(n).ln(dk);
    t.push_ln("alpha", ln_alpha, Provenance::Derived);
    let ln_gamma = ((n * n) as f64 * c_e).ln() + ln_alpha;
    t.push_ln("gamma", ln_gamma, Provenance::Derived);
    let ln_c5 = (c1_const(n, 1).to_f64().unwrap_or(f64::INFINITY) * c_e).ln();
    checks.push(Check {
        name: "gamma = C5(N,1,E)·|D_K|".into(),
        holds: rel_close(ln_gamma, ln_c5 + ln_dk),
        detail: format!("ln γ = {ln_gamma}, ln C5 + ln|D_K| = {}", ln_c5 + ln_dk),
    });
    let (ln_c1, dk_exp, ln_delta) = if r == 0 {
        // T = 1, so δ = N·α
        let ln_c1 = (n as f64).ln() + ln_alpha_nodk(n);
        (ln_c1, 1.0, (n as f64).ln() + ln_alpha)
    } else {
        t.push(
            "C2(r)",
            c2_const(r).to_f64().unwrap_or(f64::INFINITY),
            Provenance::Derived,
        );
        t.push_ln("C4(N,1,r)", c4_monomial(n, 1, r).ln(1), Provenance::Derived);
        let beta = beta_monomial(n, r);
        t.push_ln("beta", beta.ln(dk), Provenance::Derived);
        let c4 = c4_monomial(n, 1, r).mul(&Monomial::dk_pow(num_rational::Rational64::new(n as i64 + 6, 2)));
        checks.push(Check {
            name: "beta = C4(N,1,r)·|D_K|^(N/2+3)".into(),
            holds: beta == c4,
            detail: format!("β = {beta}; C4·|D_K|^(N/2+3) = {c4}"),
        });
        let delta = delta_monomial(n, r);
        let e = dk_exponent(n, r);
        checks.push(Check {
            name: "|D_K| exponent of delta".into(),
            holds: delta.dk_exponent() == e,
            detail: format!("{} vs (2N+Nr+4r)/(2(N−r)) = {e}", delta.dk_exponent()),
        });
        let closed = c1_sharp_closed_monomial(n, r);
        checks.push(Check {
            name: "closed-form c1 = delta without |D_K|".into(),
            holds: closed == c1_sharp_monomial(n, r),
            detail: format!("c1 = {closed}"),
        });
        let ef = *e.numer() as f64 / *e.denom() as f64;
        (closed.ln(1), ef, delta.ln(dk))
    };
    t.push_ln("delta", ln_delta, Provenance::Derived);
    let ln_c2 = ln_c1 + ((n * n) as f64 * c_e + c0v).ln();
    t.push_ln("c1_sharp", ln_c1, Provenance::Derived);
    t.push_ln("c2_sharp", ln_c2, Provenance::Derived);
    let ln_simple = c1_simple_ln(n, r);
    t.push_ln("c1_simple", ln_simple, Provenance::Derived);
    t.push_ln(
        "c2_simple",
        ln_simple + (3f64.powi(n as i32) + (n * n) as f64 * c_e).ln(),
        Provenance::Derived,
    );
    Ok(SharpConstants {
        n,
        r,
        abs_dk: dk,
        c_e,
        c0: c0v,
        table: t,
        checks,
        ln_c1,
        ln_c2,
        dk_exp,
    })
}

/// The two evaluations of the transverse bound, before the guard.
struct TransverseValue {
    closed_ln: f64,
    pipeline_ln: f64,
    ln_t: f64,
}

fn transverse_value(k: &SharpConstants, deg_c: u64, h2_c: f64) -> TransverseValue {
    let (n, r) = (k.n as f64, k.r as f64);
    let ln_deg = (deg_c as f64).ln();
    let ln_dk = (k.abs_dk as f64).ln();
    let tail = ((n * n) * k.c_e).ln();
    // |D_K|^e·(c1·h2·deg^{r/(N−r)} + c2·deg^{N/(N−r)}) + N²C(E)
    let closed = ln_add(
        k.dk_exp * ln_dk
            + ln_add(
                k.ln_c1 + ln0(h2_c) + r / (n - r) * ln_deg,
                k.ln_c2 + n / (n - r) * ln_deg,
            ),
        tail,
    );
    // N·h2·α·T + N·(γ + C0·α)·T·deg + N²C(E), with T = ((N/(N−1))·β·deg)^{r/(N−r)}
    let ln_alpha = k.table.ln("alpha").expect("alpha");
    let ln_gamma = k.table.ln("gamma").expect("gamma");
    let ln_t = if k.r == 0 {
        0.0
    } else {
        let ln_beta = k.table.ln("beta").expect("beta");
        r / (n - r) * ((n / (n - 1.0)).ln() + ln_beta + ln_deg)
    };
    let first = n.ln() + ln0(h2_c) + ln_alpha + ln_t;
    let second = n.ln() + ln_add(ln_gamma, k.c0.ln() + ln_alpha) + ln_t + ln_deg;
    let pipeline = ln_add(ln_add(first, second), tail);
    TransverseValue {
        closed_ln: closed,
        pipeline_ln: pipeline,
        ln_t,
    }
}

fn c0_warning(n: u32, choice: C0Choice) -> String {
    format!(
        "Bézout constant: the bound uses the {} value {:.6}; the defining sum C0(1, N−1, 3^N−1) gives {:.6} and the packaged closed form (H_N + log 2·(2(3^N−1)−N))/2 gives {:.6} at N = {n}",
        match choice {
            C0Choice::Rigorous => "rigorous",
            C0Choice::Packaged => "packaged",
        },
        c0_value(n, choice),
        c0_rigorous(n),
        c0_packaged(n),
    )
}

fn cm_warning(curve: &EllipticCurveQ, ord: &CMOrder) -> Option<String> {
    let j = curve.j_invariant();
    match CMOrder::from_j_invariant(j) {
        Some(o) if o.d_k() != ord.d_k() => Some(format!(
            "j(E) = {} corresponds to D_K = {}, but D_K = {} was supplied",
            crate::arith::format_rational(j),
            o.d_k(),
            ord.d_k()
        )),
        None if ord.is_cm() && !CMOrder::j_has_cm(j) => Some(format!(
            "j(E) = {} is not a CM j-invariant, but CM by D_K = {} was supplied",
            crate::arith::format_rational(j),
            ord.d_k()
        )),
        None if !ord.is_cm() && CMOrder::j_has_cm(j) => Some(format!(
            "j(E) = {} has CM, but the curve was treated as without CM",
            crate::arith::format_rational(j)
        )),
        _ => None,
    }
}

fn finish(branch: Branch, ln: f64, trace: ConstantsTable, checks: Vec<Check>, warnings: Vec<String>) -> BoundReport {
    let bound_ln = ln + GUARD.ln();
    BoundReport {
        branch,
        bound_ln,
        bound_nats: finite(bound_ln.exp()),
        trace,
        checks,
        warnings,
    }
}

fn transverse_core(
    n: u32,
    r: u32,
    deg_c: u64,
    h2_c: f64,
    ord: &CMOrder,
    c_e: f64,
    c0: C0Choice,
) -> Result<(f64, SharpConstants)> {
    let mut k = sharp_constants(n, r, ord, c_e, c0)?;
    let v = transverse_value(&k, deg_c, h2_c);
    k.table.push_ln("T", v.ln_t, Provenance::Derived);
    k.checks.push(Check {
        name: "closed form and pipeline agree".into(),
        holds: rel_close(v.closed_ln, v.pipeline_ln),
        detail: format!("ln closed = {}, ln pipeline = {}", v.closed_ln, v.pipeline_ln),
    });
    if !k.checks.iter().all(|c| c.holds) {
        let failed: Vec<&str> = k.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
        return Err(Error::Internal(format!(
            "constant identities failed: {}",
            failed.join(", ")
        )));
    }
    Ok((v.closed_ln.max(v.pipeline_ln), k))
}

/// Bound for points of rank r ≤ N−1 on a transverse curve in E^N.
pub fn transverse_bound(desc: &CurveDescriptor, c0: C0Choice) -> Result<BoundReport> {
    desc.validate()?;
    if desc.r >= desc.n {
        return Err(Error::InvalidInput(format!(
            "rank r = {} must be at most N−1 = {}",
            desc.r,
            desc.n - 1
        )));
    }
    let (ln, k) = transverse_core(desc.n, desc.r, desc.deg_c, desc.h2_c, &desc.ord, desc.curve.c_e(), c0)?;
    let mut warnings = vec![c0_warning(desc.n, c0)];
    warnings.extend(cm_warning(&desc.curve, &desc.ord));
    Ok(finish(Branch::Transverse, ln, k.table, k.checks, warnings))
}

/// Bound for points of rank r < max(r_C − t_C, t_C) on any curve in E^N,
/// through the transverse bound for its projection to E^{t_C}.
pub fn general_bound(desc: &CurveDescriptor, c0: C0Choice) -> Result<BoundReport> {
    desc.validate()?;
    let (t, rc) = (desc.t_c, desc.r_c);
    let limit = (rc - t).max(t);
    if desc.r >= limit {
        return Err(Error::OutOfRange(format!(
            "rank r = {} is not below max(r_C − t_C, t_C) = {limit}",
            desc.r
        )));
    }
    let mut warnings = Vec::new();
    warnings.extend(cm_warning(&desc.curve, &desc.ord));
    if rc - t >= t {
        let mut trace = ConstantsTable::default();
        trace.push("r_C - t_C", (rc - t) as f64, Provenance::Derived);
        return Ok(BoundReport {
            branch: Branch::EmptyCertificate,
            bound_ln: f64::NEG_INFINITY,
            bound_nats: None,
            trace,
            checks: Vec::new(),
            warnings,
        });
    }
    let (ln, k) = transverse_core(t, desc.r, desc.deg_c, desc.h2_c, &desc.ord, desc.curve.c_e(), c0)?;
    warnings.insert(0, c0_warning(t, c0));
    let zhang = desc.h_c / desc.deg_c as f64;
    let ln = ln_add(((desc.n - desc.r) as f64).ln() + ln, ln0(zhang));
    Ok(finish(Branch::General, ln, k.table, k.checks, warnings))
}

/// Polynomial p(x) = p_0 + p_1x + ⋯ + p_nxⁿ with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyInput {
    pub coeffs: Vec<Q>,
}

impl PolyInput {
    pub fn new(mut coeffs: Vec<Q>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("p must be nonconstant".into()));
        }
        Ok(PolyInput { coeffs })
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    /// Number of nonzero coefficients.
    pub fn nonzero(&self) -> u32 {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() as u32
    }

    /// h_W(1 : p_0 : ⋯ : p_n).
    pub fn height(&self) -> f64 {
        let mut v = vec![Q::from_integer(1.into())];
        v.extend(self.coeffs.iter().cloned());
        weil_height(&ProjPoint::new(v).expect("leading 1 is nonzero")).value
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }
}

/// Coefficient printed for the polynomial family.
pub const PUBLISHED_POLY_COEFFICIENT: f64 = 2e14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyFamilyData {
    pub n: u32,
    pub m: u32,
    pub h_w_p: f64,
    pub deg_c: u64,
    pub h2_c_bound: f64,
    /// Smallest K with bound ≤ K·|D_K|^5·(h_W(p) + log m + 4C(E))·(2n+3)² + 4C(E) for this input.
    pub k_input: f64,
    /// K valid for every p and E, from c1(2,1)·(18 + 9·C0/16) using C(E) ≥ 4.
    pub k_uniform: f64,
}

/// Bound for points of rank one on the curve {p(x1) = y2} ⊂ E².
pub fn poly_curve_bound(
    curve: &EllipticCurveQ,
    ord: &CMOrder,
    p: &PolyInput,
    c0: C0Choice,
) -> Result<(BoundReport, PolyFamilyData)> {
    let n = p.degree();
    let m = p.nonzero();
    let h_w_p = p.height();
    let c_e = curve.c_e();
    let deg_c = 6 * n as u64 + 9;
    let h2_c = 6.0 * (2 * n + 3) as f64 * (h_w_p + (m as f64).ln() + 2.0 * c_e);
    let desc = CurveDescriptor::transverse(2, deg_c, h2_c, 1, *ord, curve.clone());
    let mut report = transverse_bound(&desc, c0)?;
    report.branch = Branch::PolyFamily;
    let dk = ord.abs_dk() as f64;
    let shape = dk.powi(5) * (h_w_p + (m as f64).ln() + 4.0 * c_e) * ((2 * n + 3) as f64).powi(2);
    let k_input = ((report.bound_ln.exp() - 4.0 * c_e) / shape).max(0.0);
    let ln_c1 = report.trace.ln("c1_sharp").expect("c1");
    let k_uniform = ln_c1.exp() * (18.0 + 9.0 * c0_value(2, c0) / 16.0) * GUARD;
    let c1_cap = (41.0 * 2f64.ln() + 4.0 * 3f64.ln()).exp();
    report.checks.push(Check {
        name: "c1(2,1) ≤ 2^41·3^4".into(),
        holds: ln_c1 <= c1_cap.ln(),
        detail: format!("c1(2,1) = {:.6e}, 2^41·3^4 = {c1_cap:.6e}", ln_c1.exp()),
    });
    report.trace.push("h_W(p)", h_w_p, Provenance::Derived);
    report.trace.push("deg C", deg_c as f64, Provenance::Derived);
    report.trace.push("h2(C) bound", h2_c, Provenance::Derived);
    report.trace.push("K (this input)", k_input, Provenance::Derived);
    report.trace.push("K (uniform)", k_uniform, Provenance::Derived);
    if k_uniform > PUBLISHED_POLY_COEFFICIENT || k_input > PUBLISHED_POLY_COEFFICIENT {
        report.warnings.push(format!(
            "coefficient of the polynomial-family bound: recomputed K = {k_uniform:.4e} for all inputs ({k_input:.4e} for this input), above the published 2e14"
        ));
    }
    Ok((
        report,
        PolyFamilyData {
            n,
            m,
            h_w_p,
            deg_c,
            h2_c_bound: h2_c,
            k_input,
            k_uniform,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub n: u32,
    pub r: u32,
    pub ln_c1_sharp: f64,
    pub ln_c1_simple: f64,
    pub ln_c2_sharp: f64,
    pub ln_c2_simple: f64,
    pub c1_sharp_smaller: bool,
    pub c2_sharp_smaller: bool,
}

/// c1 and c2 of the sharper transverse bound against the simplified
/// constants, for 1 ≤ r < N ≤ n_max, at the given C(E).
pub fn sharpness_compare(n_max: u32, ord: &CMOrder, c_e: f64) -> Result<Vec<SharpnessRow>> {
    if !(2..=8).contains(&n_max) {
        return Err(Error::InvalidInput(format!("table covers 2 ≤ N ≤ 8, got {n_max}")));
    }
    let mut rows = Vec::new();
    for n in 2..=n_max {
        for r in 1..n {
            let k = sharp_constants(n, r, ord, c_e, C0Choice::Rigorous)?;
            let s1 = k.table.ln("c1_simple").expect("c1_simple");
            let s2 = k.table.ln("c2_simple").expect("c2_simple");
            rows.push(SharpnessRow {
                n,
                r,
                ln_c1_sharp: k.ln_c1,
                ln_c1_simple: s1,
                ln_c2_sharp: k.ln_c2,
                ln_c2_simple: s2,
                c1_sharp_smaller: k.ln_c1 < s1,
                c2_sharp_smaller: k.ln_c2 < s2,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use std::f64::consts::PI;

    fn e01() -> EllipticCurveQ {
        EllipticCurveQ::from_i64(0, 1).unwrap()
    }

    fn gi() -> CMOrder {
        CMOrder::new(-1, 1).unwrap()
    }

    #[test]
    fn c1_at_two_one() {
        let k = sharp_constants(2, 1, &gi(), 5.0, C0Choice::Rigorous).unwrap();
        let expect = 41.0 * 2f64.ln() + 6.0 * 3f64.ln() - 2.0 * PI.ln();
        assert!((k.ln_c1 - expect).abs() < 1e-12);
        assert!((k.ln_c1.exp() / 1.62e14 - 1.0).abs() < 0.01);
        assert!(k.checks.iter().all(|c| c.holds));
    }

    #[test]
    fn transverse_example_matches_closed_form() {
        let e = e01();
        let desc = CurveDescriptor::transverse(2, 15, 100.0, 1, gi(), e.clone());
        let rep = transverse_bound(&desc, C0Choice::Rigorous).unwrap();
        // 4^5·c1·(100·15 + (4C(E) + C0)·15²) + 4C(E)
        let c1 = 2f64.powi(41) * 3f64.powi(6) / (PI * PI);
        let ce = e.c_e();
        let expect = 4f64.powi(5) * c1 * (1500.0 + (4.0 * ce + c0_rigorous(2)) * 225.0) + 4.0 * ce;
        assert!((rep.bound_nats.unwrap() / (expect * GUARD) - 1.0).abs() < 1e-9);
        assert!(rep.checks_hold());
        assert_eq!(rep.branch, Branch::Transverse);
        assert!(rep.warnings[0].contains("Bézout"));
    }

    #[test]
    fn degree_monotone_and_rank_zero() {
        let mk = |deg| CurveDescriptor::transverse(2, deg, 100.0, 1, gi(), e01());
        let a = transverse_bound(&mk(15), C0Choice::Rigorous).unwrap();
        let b = transverse_bound(&mk(30), C0Choice::Rigorous).unwrap();
        assert!(b.bound_ln > a.bound_ln);
        let z = CurveDescriptor::transverse(3, 15, 10.0, 0, gi(), e01());
        let rep = transverse_bound(&z, C0Choice::Rigorous).unwrap();
        assert!(rep.bound_nats.unwrap().is_finite());
        assert_eq!(rep.trace.ln("T"), Some(0.0));
        assert!(transverse_bound(
            &CurveDescriptor::transverse(2, 15, 1.0, 2, gi(), e01()),
            C0Choice::Rigorous
        )
        .is_err());
    }

    #[test]
    fn general_branches() {
        let e = e01();
        let base = CurveDescriptor {
            n: 3,
            deg_c: 20,
            h2_c: 50.0,
            h_c: 7.0,
            t_c: 2,
            r_c: 3,
            r: 1,
            ord: gi(),
            curve: e.clone(),
        };
        let rep = general_bound(&base, C0Choice::Rigorous).unwrap();
        assert_eq!(rep.branch, Branch::General);
        let tr = transverse_bound(
            &CurveDescriptor::transverse(2, 20, 50.0, 1, gi(), e.clone()),
            C0Choice::Rigorous,
        )
        .unwrap();
        let expect = 2.0 * tr.bound_nats.unwrap() / GUARD + 7.0 / 20.0;
        assert!((rep.bound_nats.unwrap() / (expect * GUARD) - 1.0).abs() < 1e-9);

        let empty = CurveDescriptor {
            t_c: 1,
            r_c: 3,
            r: 1,
            ..base.clone()
        };
        assert_eq!(
            general_bound(&empty, C0Choice::Rigorous).unwrap().branch,
            Branch::EmptyCertificate
        );
        let out = CurveDescriptor { r: 2, ..base.clone() };
        assert!(matches!(
            general_bound(&out, C0Choice::Rigorous),
            Err(Error::OutOfRange(_))
        ));

        // t_C = r_C = N: (N − r)·transverse + h(C)/deg C
        let full = CurveDescriptor {
            n: 2,
            t_c: 2,
            r_c: 2,
            r: 1,
            h_c: 0.0,
            ..base
        };
        let g = general_bound(&full, C0Choice::Rigorous).unwrap();
        let t = transverse_bound(
            &CurveDescriptor::transverse(2, 20, 50.0, 1, gi(), e),
            C0Choice::Rigorous,
        )
        .unwrap();
        assert!((g.bound_ln - t.bound_ln).abs() < 1e-12);
    }

    #[test]
    fn poly_family() {
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let o = CMOrder::new(-3, 1).unwrap();
        let p = PolyInput::new(vec![q(0), q(1)]).unwrap();
        let (rep, data) = poly_curve_bound(&e, &o, &p, C0Choice::Rigorous).unwrap();
        assert_eq!(data.deg_c, 15);
        assert_eq!(data.m, 1);
        assert_eq!(data.h_w_p, 0.0);
        assert!(rep.checks_hold());
        assert!(data.k_input <= data.k_uniform);
        assert!(data.k_uniform > 3e15 && data.k_uniform < 4e15);
        assert!(rep.warnings.iter().any(|w| w.contains("2e14")));
        assert!(PolyInput::new(vec![q(3)]).is_err());
    }

    #[test]
    fn cm_mismatch_warned() {
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let desc = CurveDescriptor::transverse(2, 15, 1.0, 1, gi(), e);
        let rep = transverse_bound(&desc, C0Choice::Rigorous).unwrap();
        assert!(rep.warnings.iter().any(|w| w.contains("D_K = -3")));
    }

    #[test]
    fn sharpness_table() {
        let rows = sharpness_compare(3, &gi(), 5.0).unwrap();
        assert_eq!(
            rows.iter().map(|r| (r.n, r.r)).collect::<Vec<_>>(),
            vec![(2, 1), (3, 1), (3, 2)]
        );
        let first = &rows[0];
        assert!((first.ln_c1_simple.exp() / 1.94e24 - 1.0).abs() < 0.01);
        assert!(first.c1_sharp_smaller);
    }
}
