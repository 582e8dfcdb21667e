//! Geometry of numbers for the auxiliary translate.
//!
//! A point P ∈ E^N lying in a torsion variety of dimension m is described by
//! P_i = ζ_i + Σ_j γ_ij·g_j with γ_ij ∈ End(E), torsion ζ_i and generators
//! g_1, …, g_m. From this data the module builds linear forms L_j controlling
//! ĥ(t_1P_1 + ⋯ + t_NP_N), finds short vectors on which the forms are small,
//! and turns them into an abelian subvariety of bounded degree and height.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Q;
use crate::cm::{CMOrder, EndElement, KNum};
use crate::constants::{c1_const, c2_const, c3_const, c4_ln};
use crate::enumerate::{enumerate, lll, quad, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::klattice::{k_rank, norm_sq, subgroup_degree_bound, EndVector};

/// Néron–Tate data of m generators: ⟨g_i, g_j⟩_NT and ⟨g_i, √D·g_j⟩_NT.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingData {
    pub gram_nt: Vec<Vec<f64>>,
    pub gram_twist: Vec<Vec<f64>>,
}

impl PairingData {
    pub fn rank(&self) -> usize {
        self.gram_nt.len()
    }
}

/// The hermitian pairing ⟨g_i, g_j⟩ = ⟨g_i, g_j⟩_NT − (1/√D)·⟨g_i, √D·g_j⟩_NT.
pub fn assemble_pairing(data: &PairingData, d: i64) -> Result<Vec<Vec<Complex64>>> {
    if d >= 0 {
        return Err(Error::InvalidInput(format!("D = {d} must be negative")));
    }
    let m = data.rank();
    if data.gram_nt.iter().chain(&data.gram_twist).any(|r| r.len() != m) || data.gram_twist.len() != m {
        return Err(Error::InvalidInput(
            "pairing matrices must be square of equal size".into(),
        ));
    }
    // 1/√D = −i/√|D|
    let inv_sqrt_d = Complex64::new(0.0, -1.0 / (d.unsigned_abs() as f64).sqrt());
    let g: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| Complex64::new(data.gram_nt[i][j], 0.0) - inv_sqrt_d * data.gram_twist[i][j])
                .collect()
        })
        .collect();
    for i in 0..m {
        for j in 0..m {
            let scale = g[i][j].norm().max(1.0);
            if (g[i][j] - g[j][i].conj()).norm() > 1e-9 * scale {
                return Err(Error::Inconsistent(format!(
                    "assembled pairing is not hermitian at ({i}, {j})"
                )));
            }
        }
        if data.gram_nt[i][i] < 0.0 {
            return Err(Error::Inconsistent(format!("negative height on the diagonal at {i}")));
        }
    }
    Ok(g)
}

/// ĥ(Σ α_i·g_i) = Σ_{i,j} α_i·ᾱ_j·⟨g_i, g_j⟩ under a hermitian Gram matrix.
pub fn model_height(gram: &[Vec<Complex64>], alpha: &[Complex64]) -> f64 {
    let mut s = Complex64::zero();
    for (i, ai) in alpha.iter().enumerate() {
        for (j, aj) in alpha.iter().enumerate() {
            s += ai * aj.conj() * gram[i][j];
        }
    }
    s.re
}

/// 2^{4m−3} / ((2m)²·(2m)!⁴).
pub fn quasi_orthogonality_constant(m: u32) -> f64 {
    let f = crate::arith::factorial(2 * m as u64).to_f64().unwrap_or(f64::INFINITY);
    2f64.powi(4 * m as i32 - 3) / ((2.0 * m as f64).powi(2) * f.powi(4))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiOrthogonality {
    pub holds: bool,
    pub constant: f64,
    /// Smallest ĥ(Σα_ig_i) / Σ|α_i|²ĥ(g_i) over the samples.
    pub worst_ratio: f64,
    pub samples: u64,
}

/// Checks ĥ(Σα_ig_i) ≥ c(m)·Σ|α_i|²ĥ(g_i) for every α ∈ O_K^m with
/// coordinates a + bτ, |a|, |b| ≤ 3.
pub fn quasi_orthogonality_check(gram: &[Vec<Complex64>], ord: &CMOrder) -> Result<QuasiOrthogonality> {
    let m = gram.len();
    if m == 0 || m > 4 {
        return Err(Error::InvalidInput(format!(
            "exhaustive sweep supports 1 ≤ m ≤ 4, got {m}"
        )));
    }
    let c = quasi_orthogonality_constant(m as u32);
    let range: Vec<EndElement> = if ord.is_cm() {
        (-3..=3)
            .flat_map(|a| (-3..=3).map(move |b| EndElement::new(a, b)))
            .collect()
    } else {
        (-3..=3).map(EndElement::int).collect()
    };
    let mut idx = vec![0usize; m];
    let mut worst = f64::INFINITY;
    let mut samples = 0u64;
    loop {
        let alpha: Vec<EndElement> = idx.iter().map(|&k| range[k]).collect();
        if alpha.iter().any(|a| !a.is_zero()) {
            let z: Vec<Complex64> = alpha.iter().map(|a| a.to_complex(ord)).collect();
            let lhs = model_height(gram, &z);
            let rhs: f64 = alpha
                .iter()
                .enumerate()
                .map(|(i, a)| a.norm(ord) as f64 * gram[i][i].re)
                .sum();
            if rhs > 0.0 {
                worst = worst.min(lhs / rhs);
            }
            samples += 1;
        }
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] < range.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    Ok(QuasiOrthogonality {
        holds: worst >= c * (1.0 - 1e-12),
        constant: c,
        worst_ratio: worst,
        samples,
    })
}

/// Linear forms L_j = (ĥ(g_j)/(N·A))^{1/2}·(γ_1j, …, γ_Nj).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormSystem {
    pub n: usize,
    pub m: usize,
    /// N×m coefficients γ_ij.
    pub gamma: Vec<EndVector>,
    pub hhat_g: Vec<f64>,
    /// A = max |D_K|²·|γ_ij|²·ĥ(g_j).
    pub a_max: f64,
    /// m forms, each with N complex coefficients.
    pub forms: Vec<Vec<Complex64>>,
    /// Coordinates i with γ_i· = 0, i.e. P_i torsion.
    pub torsion_markers: Vec<bool>,
    /// C2(m)·N²·|D_K|².
    pub c2_coefficient: f64,
    #[serde(skip)]
    pub ord: CMOrder,
}

/// C2(m) = m³·(2m)!⁴/2^{4m−5} as a float.
pub fn c2_value(m: u32) -> f64 {
    c2_const(m).to_f64().unwrap_or(f64::INFINITY)
}

pub fn build_linear_forms(gamma: &[EndVector], hhat_g: &[f64], ord: &CMOrder) -> Result<FormSystem> {
    let n = gamma.len();
    let m = hhat_g.len();
    if n == 0 || m == 0 || gamma.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidInput(
            "γ must be N×m with m = number of generator heights".into(),
        ));
    }
    if hhat_g.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidInput("generator heights must be positive".into()));
    }
    for e in gamma.iter().flatten() {
        ord.validate(e)?;
    }
    let dk2 = (ord.abs_dk() * ord.abs_dk()) as f64;
    let mut a_max = 0.0f64;
    for row in gamma {
        for (j, g) in row.iter().enumerate() {
            a_max = a_max.max(dk2 * g.norm(ord) as f64 * hhat_g[j]);
        }
    }
    if a_max == 0.0 {
        return Err(Error::InvalidInput(
            "all γ_ij vanish: the point is torsion and every height bound holds trivially".into(),
        ));
    }
    let mut forms = Vec::with_capacity(m);
    for j in 0..m {
        let scale = (hhat_g[j] / (n as f64 * a_max)).sqrt();
        let form: Vec<Complex64> = gamma.iter().map(|row| row[j].to_complex(ord) * scale).collect();
        let norm: f64 = form.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > (1.0 / ord.abs_dk() as f64) * (1.0 + 1e-12) {
            return Err(Error::Internal(format!("form {j} has norm {norm} above 1/|D_K|")));
        }
        forms.push(form);
    }
    let torsion_markers = gamma.iter().map(|r| r.iter().all(EndElement::is_zero)).collect();
    Ok(FormSystem {
        n,
        m,
        gamma: gamma.to_vec(),
        hhat_g: hhat_g.to_vec(),
        a_max,
        forms,
        torsion_markers,
        c2_coefficient: c2_value(m as u32) * (n * n) as f64 * dk2,
        ord: *ord,
    })
}

impl FormSystem {
    /// L_j(t) for every form.
    pub fn evaluate(&self, t: &[EndElement]) -> Vec<Complex64> {
        self.forms
            .iter()
            .map(|f| f.iter().zip(t).map(|(c, e)| c * e.to_complex(&self.ord)).sum())
            .collect()
    }
}

/// Result of splitting L = L1 + L2·τ and t = t1 + t2·τ into real parts.
#[derive(Clone, Debug, PartialEq)]
pub struct FormDecomposition {
    /// L(t) computed directly in K.
    pub value: KNum,
    /// L1(t1) + x0·L2(t2) + (L2(t1) + L1(t2) + y0·L2(t2))·τ.
    pub assembled: KNum,
    pub l1: Vec<Q>,
    pub l2: Vec<Q>,
    /// ||(L1, x0·L2)||² ≤ |D_K|²·||L||².
    pub first_norm_ok: bool,
    /// ||(L2, L1 + y0·L2)||² ≤ min(2, |D_K|)²·||L||².
    pub second_norm_ok: bool,
}

impl FormDecomposition {
    pub fn identity_holds(&self) -> bool {
        self.value == self.assembled
    }
}

/// Splits a form with coefficients in K and evaluates it on t ∈ End(E)^N.
pub fn decompose_form(l: &[KNum], t: &[EndElement], ord: &CMOrder) -> Result<FormDecomposition> {
    if l.len() != t.len() {
        return Err(Error::InvalidInput("form and vector lengths differ".into()));
    }
    let (x0, y0) = ord.tau_sq();
    let (x0, y0) = (Q::from_integer(x0.into()), Q::from_integer(y0.into()));
    let l1: Vec<Q> = l.iter().map(|c| c.a.clone()).collect();
    let l2: Vec<Q> = l.iter().map(|c| c.b.clone()).collect();
    let t1: Vec<Q> = t.iter().map(|e| Q::from_integer(e.a.into())).collect();
    let t2: Vec<Q> = t.iter().map(|e| Q::from_integer(e.b.into())).collect();
    let dot = |a: &[Q], b: &[Q]| a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y);
    let value = l
        .iter()
        .zip(t)
        .fold(KNum::zero(), |acc, (c, e)| acc.add(&c.mul(&e.to_k(), ord)));
    let assembled = KNum {
        a: dot(&l1, &t1) + &x0 * dot(&l2, &t2),
        b: dot(&l2, &t1) + dot(&l1, &t2) + &y0 * dot(&l2, &t2),
    };
    let norm_l: Q = l.iter().fold(Q::zero(), |acc, c| acc + c.norm(ord));
    let sq = |v: &[Q]| v.iter().fold(Q::zero(), |acc, x| acc + x * x);
    let first: Q = sq(&l1) + &x0 * &x0 * sq(&l2);
    let mixed: Vec<Q> = l1.iter().zip(&l2).map(|(a, b)| a + &y0 * b).collect();
    let second: Q = sq(&l2) + sq(&mixed);
    let dk = Q::from_integer(ord.abs_dk().into());
    let two = Q::from_integer(2.into());
    let m2 = if dk < two { dk.clone() } else { two };
    Ok(FormDecomposition {
        value,
        assembled,
        l1,
        l2,
        first_norm_ok: first <= &dk * &dk * &norm_l,
        second_norm_ok: second <= &m2 * &m2 * &norm_l,
    })
}

/// Vectors with small products of norms on which the forms are small.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortVectorCertificate {
    pub vectors: Vec<EndVector>,
    pub t: f64,
    pub bounds_ok: bool,
    /// lhs/rhs of ∏||u_i|| ≤ |τ|^s·T.
    pub product_slack: f64,
    /// Largest lhs/rhs over j, k of ∏||u_i||·|L_j(u_k)|/||u_k|| ≤ 2(2(2N)^{2N})^{1/m}|τ|^s·T^{1−N/(ms)}.
    pub form_slack: f64,
    /// Whether T was small enough for standard basis vectors.
    pub small_t_branch: bool,
}

fn habegger_base(n: usize) -> f64 {
    2.0 * (2.0 * n as f64).powi(2 * n as i32)
}

/// Recomputes both inequalities for a candidate set of vectors.
pub fn verify_certificate(forms: &FormSystem, vectors: &[EndVector], t: f64) -> (bool, f64, f64) {
    let s = vectors.len();
    let (n, m) = (forms.n as f64, forms.m as f64);
    let tau_s = forms.ord.tau_abs().powi(s as i32);
    let norms: Vec<f64> = vectors.iter().map(|v| (norm_sq(v, &forms.ord) as f64).sqrt()).collect();
    let prod: f64 = norms.iter().product();
    let product_slack = prod / (tau_s * t);
    let rhs = 2.0 * habegger_base(forms.n).powf(1.0 / m) * tau_s * t.powf(1.0 - n / (m * s as f64));
    let mut form_slack = 0.0f64;
    for (k, v) in vectors.iter().enumerate() {
        for val in forms.evaluate(v) {
            form_slack = form_slack.max(prod * val.norm() / norms[k] / rhs);
        }
    }
    let independent = k_rank(vectors, &forms.ord) == s && norms.iter().all(|x| *x > 0.0);
    let ok = independent && product_slack <= 1.0 + 1e-12 && form_slack <= 1.0 + 1e-12;
    (ok, product_slack, form_slack)
}

/// s K-independent vectors of End(E)^N meeting both inequalities for T.
///
/// For T ≤ (2(2N)^{2N})^{s/N} the standard basis vectors qualify. Otherwise
/// the search minimises ||v||² + ρ²·Σ_j|L_j(v)|² over a range of ρ around the
/// value balancing the two inequalities, and certifies the result. Failure is
/// reported as a resource limit, never as nonexistence.
pub fn short_vectors(forms: &FormSystem, t: f64, s: usize, cap: u64) -> Result<ShortVectorCertificate> {
    let n = forms.n;
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 1 ≤ s ≤ N, got s = {s}, N = {n}")));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("need finite T ≥ 1, got {t}")));
    }
    let base = habegger_base(n);
    if t <= base.powf(s as f64 / n as f64) {
        let vectors: Vec<EndVector> = (0..s)
            .map(|k| (0..n).map(|i| EndElement::int((i == k) as i64)).collect())
            .collect();
        let (ok, ps, fs) = verify_certificate(forms, &vectors, t);
        if !ok {
            return Err(Error::Internal("standard basis fails the small-T certificate".into()));
        }
        return Ok(ShortVectorCertificate {
            vectors,
            t,
            bounds_ok: true,
            product_slack: ps,
            form_slack: fs,
            small_t_branch: true,
        });
    }
    let m = forms.m as f64;
    let rho0 = (t / base.powf(s as f64 / n as f64)).powf(n as f64 / (m * s as f64));
    // beyond this ρ the rounded search form loses the identity part
    let fmax = forms.forms.iter().flatten().fold(0.0f64, |acc, c| acc.max(c.norm()));
    let rho_max = (1e9f64).sqrt() / fmax.max(1e-300);
    let mut rhos: Vec<f64> = Vec::new();
    for k in [0i32, -1, 1, -2, 2, -3, 3, -4, 4, -6, 6, -8, 8] {
        let rho = (rho0 * 2f64.powi(k)).min(rho_max);
        if !rhos.contains(&rho) {
            rhos.push(rho);
        }
    }
    let mut last_err = None;
    for rho in rhos {
        match search_at(forms, rho, s, cap) {
            Ok(vectors) => {
                let (ok, ps, fs) = verify_certificate(forms, &vectors, t);
                if ok {
                    return Ok(ShortVectorCertificate {
                        vectors,
                        t,
                        bounds_ok: true,
                        product_slack: ps,
                        form_slack: fs,
                        small_t_branch: false,
                    });
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::ResourceLimit(format!(
        "no certified short vectors found for T = {t:.6e} with ρ in [{:.3e}, {:.3e}]{}",
        rho0 / 256.0,
        rho0 * 256.0,
        last_err.map(|e| format!(" ({e})")).unwrap_or_default()
    )))
}

/// Greedy K-independent minimisers of ||v||² + ρ²·Σ_j|L_j(v)|².
fn search_at(forms: &FormSystem, rho: f64, s: usize, cap: u64) -> Result<Vec<EndVector>> {
    let ord = &forms.ord;
    let n = forms.n;
    let (x0, y0) = ord.tau_sq();
    let cm = ord.is_cm();
    let d = if cm { 2 * n } else { n };
    // real-linear functionals Re L_j, Im L_j on the Z-coordinates
    let mut funcs: Vec<Vec<f64>> = Vec::new();
    for f in &forms.forms {
        let mut re = vec![0.0; d];
        let mut im = vec![0.0; d];
        for (i, c) in f.iter().enumerate() {
            if cm {
                let ct = c * ord.tau();
                re[2 * i] = c.re;
                im[2 * i] = c.im;
                re[2 * i + 1] = ct.re;
                im[2 * i + 1] = ct.im;
            } else {
                re[i] = c.re;
                im[i] = c.im;
            }
        }
        funcs.push(re);
        funcs.push(im);
    }
    let mut g = vec![vec![0.0f64; d]; d];
    for i in 0..n {
        if cm {
            g[2 * i][2 * i] = 1.0;
            g[2 * i][2 * i + 1] = y0 as f64 / 2.0;
            g[2 * i + 1][2 * i] = y0 as f64 / 2.0;
            g[2 * i + 1][2 * i + 1] = -(x0 as f64);
        } else {
            g[i][i] = 1.0;
        }
    }
    for f in &funcs {
        for a in 0..d {
            for b in 0..d {
                g[a][b] += rho * rho * f[a] * f[b];
            }
        }
    }
    let max = g.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale = 2f64.powi(40) / max;
    if scale < 1e3 {
        return Err(Error::ResourceLimit(format!(
            "ρ = {rho:.3e} makes the search form too ill-conditioned"
        )));
    }
    let w: Vec<Vec<i64>> = g
        .iter()
        .map(|r| r.iter().map(|v| (2.0 * v * scale).round() as i64).collect())
        .collect();
    let mut basis: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
    lll(&mut basis, &w)?;
    basis.sort_by_key(|z| quad(&w, z));
    let from_z = |z: &[i64]| -> EndVector {
        if cm {
            (0..n).map(|j| EndElement::new(z[2 * j], z[2 * j + 1])).collect()
        } else {
            z.iter().map(|&a| EndElement::int(a)).collect()
        }
    };
    let greedy = |cands: &[Vec<i64>]| -> (Vec<EndVector>, i128) {
        let mut picked: Vec<EndVector> = Vec::new();
        let mut radius = 0;
        for z in cands {
            if picked.len() == s {
                break;
            }
            let v = from_z(z);
            let mut trial = picked.clone();
            trial.push(v);
            if k_rank(&trial, ord) == trial.len() {
                picked = trial;
                radius = radius.max(quad(&w, z));
            }
        }
        (picked, radius)
    };
    let (picked, radius) = greedy(&basis);
    if picked.len() < s {
        return Err(Error::Internal("reduced basis lost rank".into()));
    }
    let mut cands = enumerate(&basis, &w, radius, cap)?;
    cands.sort_by(|a, b| quad(&w, a).cmp(&quad(&w, b)).then_with(|| b.cmp(a)));
    let (best, _) = greedy(&cands);
    Ok(if best.len() == s { best } else { picked })
}

/// The abelian subvariety H of codimension s cut out by short vectors, with
/// bounds for deg(H + P) and h₂(H + P).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxiliaryTranslate {
    pub rows: Vec<EndVector>,
    pub certificate: ShortVectorCertificate,
    /// C3(N,s)·|D_K|^s·T.
    pub deg_bound: f64,
    /// 3^N·N!·(12^{N−1}·2)^s·∏||u_i||², the degree bound of the rows themselves.
    pub deg_from_rows: f64,
    /// C4(N,s,m)·|D_K|^{N/2+s+2}·T^{1−N/(ms)}·ĥ(P) + C5(N,s,E)·|D_K|^s·T.
    pub h2_bound: f64,
}

/// Builds the auxiliary translate. The short vectors are taken for √T, so
/// that their squared norms are controlled by T.
pub fn auxiliary_translate(
    forms: &FormSystem,
    t: f64,
    s: usize,
    hhat_p: f64,
    c_e: f64,
    cap: u64,
) -> Result<AuxiliaryTranslate> {
    if !(hhat_p >= 0.0 && hhat_p.is_finite()) {
        return Err(Error::InvalidInput("ĥ(P) must be finite and nonnegative".into()));
    }
    let n = forms.n;
    let m = forms.m;
    let certificate = short_vectors(forms, t.sqrt(), s, cap)?;
    let ord = &forms.ord;
    let dk = ord.abs_dk() as f64;
    let c3 = c3_const(n as u32, s as u32).to_f64().unwrap_or(f64::INFINITY);
    let deg_bound = c3 * dk.powi(s as i32) * t;
    let deg_from_rows = subgroup_degree_bound(n, &certificate.vectors, ord)?
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let c1 = c1_const(n as u32, s as u32).to_f64().unwrap_or(f64::INFINITY);
    let exponent = 1.0 - n as f64 / (m * s) as f64;
    let h_term = if hhat_p == 0.0 {
        0.0
    } else {
        (c4_ln(n as u32, s as u32, m as u32)
            + (n as f64 / 2.0 + s as f64 + 2.0) * dk.ln()
            + exponent * t.ln()
            + hhat_p.ln())
        .exp()
    };
    let h2_bound = h_term + c1 * c_e * dk.powi(s as i32) * t;
    Ok(AuxiliaryTranslate {
        rows: certificate.vectors.clone(),
        certificate,
        deg_bound,
        deg_from_rows,
        h2_bound,
    })
}

/// Default enumeration cap for [`short_vectors`].
pub const DEFAULT_VECTORS_CAP: u64 = DEFAULT_ENUM_CAP;
