//! K-lattices in End(E)^N.
//!
//! A K-lattice is the O_K-module spanned by r rows u_1, …, u_r ∈ End(E)^N
//! with the hermitian pairing ⟨v, u⟩ = Σ v_j·ū_j. Its determinant is
//! √det(M·M̄ᵗ). Exhaustive searches run on the underlying Z-lattice with basis
//! {u_k, τ·u_k}, whose quadratic form is the euclidean norm ||v||² = Σ |v_j|².

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Q;
use crate::cm::{CMOrder, EndElement, KNum};
use crate::constants::{omega_2n, omega_real};
use crate::enumerate::{enumerate, gram2_det, integer_kernel, lll, quad, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};

pub type EndVector = Vec<EndElement>;

/// Hermitian pairing ⟨u, v⟩ = Σ u_j·v̄_j.
pub fn hermitian(u: &[EndElement], v: &[EndElement], ord: &CMOrder) -> EndElement {
    u.iter()
        .zip(v)
        .fold(EndElement::int(0), |acc, (a, b)| acc.add(&a.mul(&b.conj(ord), ord)))
}

/// Squared euclidean norm ||u||² = Σ |u_j|².
pub fn norm_sq(u: &[EndElement], ord: &CMOrder) -> i64 {
    u.iter().map(|a| a.norm(ord)).sum()
}

/// Determinant over K by fraction-free elimination on KNum entries.
pub(crate) fn k_det(m: &[Vec<KNum>], ord: &CMOrder) -> KNum {
    let n = m.len();
    let mut a: Vec<Vec<KNum>> = m.to_vec();
    let mut det = KNum::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return KNum::zero();
        };
        if p != k {
            a.swap(p, k);
            det = det.neg();
        }
        det = det.mul(&a[k][k], ord);
        let inv = a[k][k].inv(ord).expect("nonzero pivot");
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].mul(&inv, ord);
            for j in k..n {
                let t = f.mul(&a[k][j], ord);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    det
}

/// Reduced row echelon form over K; returns the pivot columns.
fn k_rref(m: &mut [Vec<KNum>], ord: &CMOrder) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][c].inv(ord).expect("nonzero pivot");
        for j in 0..cols {
            m[r][j] = m[r][j].mul(&inv, ord);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = f.mul(&m[r][j], ord);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn to_k_rows(rows: &[EndVector]) -> Vec<Vec<KNum>> {
    rows.iter().map(|r| r.iter().map(EndElement::to_k).collect()).collect()
}

/// Rank over K of a list of vectors.
pub fn k_rank(rows: &[EndVector], ord: &CMOrder) -> usize {
    k_rref(&mut to_k_rows(rows), ord).len()
}

/// Coordinates of O_K^N as Z^{2N} (or Z^N without CM) with the 2·B matrix
/// of the euclidean norm.
struct ZView {
    cm: bool,
    n: usize,
    w: Vec<Vec<i64>>,
    x0: i64,
    y0: i64,
}

impl ZView {
    fn new(ord: &CMOrder, n: usize) -> Self {
        let (x0, y0) = ord.tau_sq();
        let cm = ord.is_cm();
        let d = if cm { 2 * n } else { n };
        let mut w = vec![vec![0i64; d]; d];
        for j in 0..n {
            if cm {
                w[2 * j][2 * j] = 2;
                w[2 * j][2 * j + 1] = y0;
                w[2 * j + 1][2 * j] = y0;
                w[2 * j + 1][2 * j + 1] = -2 * x0;
            } else {
                w[j][j] = 2;
            }
        }
        ZView { cm, n, w, x0, y0 }
    }

    fn to_z(&self, v: &[EndElement]) -> Vec<i64> {
        if self.cm {
            v.iter().flat_map(|e| [e.a, e.b]).collect()
        } else {
            v.iter().map(|e| e.a).collect()
        }
    }

    fn to_end_vector(&self, z: &[i64]) -> EndVector {
        if self.cm {
            (0..self.n).map(|j| EndElement::new(z[2 * j], z[2 * j + 1])).collect()
        } else {
            z.iter().map(|&a| EndElement::int(a)).collect()
        }
    }

    fn times_tau(&self, v: &[EndElement]) -> EndVector {
        v.iter()
            .map(|e| EndElement::new(e.b * self.x0, e.a + e.b * self.y0))
            .collect()
    }

    /// Z-basis {u, τu} of the O_K-span of `rows`.
    fn span(&self, rows: &[EndVector]) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for r in rows {
            out.push(self.to_z(r));
            if self.cm {
                out.push(self.to_z(&self.times_tau(r)));
            }
        }
        out
    }

    fn span_det(&self, rows: &[EndVector]) -> BigInt {
        gram2_det(&self.span(rows), &self.w)
    }
}

/// The O_K-span of r K-independent rows of length N.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KLattice {
    rows: Vec<EndVector>,
    #[serde(skip)]
    ord: CMOrder,
}

impl KLattice {
    pub fn new(rows: Vec<EndVector>, ord: CMOrder) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidInput("a lattice needs at least one row".into()));
        };
        let n = first.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must be nonempty and of equal length".into()));
        }
        for e in rows.iter().flatten() {
            ord.validate(e)?;
        }
        if rows.len() > n || k_rank(&rows, &ord) < rows.len() {
            return Err(Error::RankDeficient(format!(
                "{} rows are not K-linearly independent",
                rows.len()
            )));
        }
        Ok(KLattice { rows, ord })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[EndVector] {
        &self.rows
    }

    pub fn order(&self) -> &CMOrder {
        &self.ord
    }

    /// Hermitian Gram matrix (⟨u_i, u_j⟩) over K.
    pub fn gram(&self) -> Vec<Vec<KNum>> {
        self.rows
            .iter()
            .map(|u| self.rows.iter().map(|v| hermitian(u, v, &self.ord).to_k()).collect())
            .collect()
    }

    /// det(M·M̄ᵗ), a positive rational.
    pub fn gram_det(&self) -> Q {
        let d = k_det(&self.gram(), &self.ord);
        debug_assert!(d.b.is_zero(), "hermitian Gram determinant must be real");
        d.a
    }

    /// det Λ = √det(M·M̄ᵗ).
    pub fn det(&self) -> f64 {
        self.gram_det().to_f64().unwrap_or(f64::NAN).sqrt()
    }

    fn zview(&self) -> ZView {
        ZView::new(&self.ord, self.ambient_dim())
    }
}

pub fn lattice_det(l: &KLattice) -> f64 {
    l.det()
}

/// Successive minima of a K-lattice with vectors realizing them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimaResult {
    pub basis: Vec<EndVector>,
    pub lambdas: Vec<f64>,
    /// Whether `basis` generates the lattice over O_K.
    pub generates: bool,
    pub minkowski_ok: bool,
    pub minkowski_lhs: f64,
    pub minkowski_rhs: f64,
}

const GENERATOR_SEARCH_CAP: u64 = 200_000;

/// Short K-independent vectors of the Z-lattice spanned by `zbasis` (closed
/// under τ), of increasing norm, preferring a choice that generates it.
fn short_generators(zbasis: &[Vec<i64>], k_rank_target: usize, zv: &ZView, cap: u64) -> Result<(Vec<EndVector>, bool)> {
    let full_det = gram2_det(zbasis, &zv.w);
    let mut reduced = zbasis.to_vec();
    lll(&mut reduced, &zv.w)?;
    reduced.sort_by_key(|z| quad(&zv.w, z));
    let mut picked: Vec<EndVector> = Vec::new();
    let mut radius = 0i128;
    for z in &reduced {
        if picked.len() == k_rank_target {
            break;
        }
        let v = zv.to_end_vector(z);
        let mut trial = picked.clone();
        trial.push(v);
        if !zv.span_det(&trial).is_zero() {
            radius = radius.max(quad(&zv.w, z));
            picked = trial;
        }
    }
    if picked.len() < k_rank_target {
        return Err(Error::Internal("reduced basis does not have the expected rank".into()));
    }
    let mut cands = enumerate(&reduced, &zv.w, radius, cap)?;
    cands.sort_by(|a, b| quad(&zv.w, a).cmp(&quad(&zv.w, b)).then_with(|| b.cmp(a)));
    let cands: Vec<(i128, EndVector)> = cands.iter().map(|z| (quad(&zv.w, z), zv.to_end_vector(z))).collect();

    let mut greedy: Vec<EndVector> = Vec::new();
    let mut profile = Vec::new();
    for (q, v) in &cands {
        if greedy.len() == k_rank_target {
            break;
        }
        let mut trial = greedy.clone();
        trial.push(v.clone());
        if !zv.span_det(&trial).is_zero() {
            greedy = trial;
            profile.push(*q);
        }
    }
    if greedy.len() < k_rank_target {
        return Err(Error::Internal("enumeration missed independent vectors".into()));
    }
    if same_lattice(&greedy, &full_det, zv) {
        return Ok((greedy, true));
    }
    // same norm profile first, then any nondecreasing choice of candidates
    let mut steps = 0u64;
    let mut chosen = Vec::new();
    let target = profile.len();
    if dfs_generators(
        &cands,
        Some(&profile),
        target,
        0,
        zv,
        &full_det,
        &mut chosen,
        &mut steps,
    ) {
        return Ok((chosen, true));
    }
    steps = 0;
    chosen.clear();
    if dfs_generators(&cands, None, target, 0, zv, &full_det, &mut chosen, &mut steps) {
        return Ok((chosen, true));
    }
    Ok((greedy, false))
}

fn same_lattice(rows: &[EndVector], full_det: &BigInt, zv: &ZView) -> bool {
    zv.span_det(rows).abs() == full_det.abs()
}

#[allow(clippy::too_many_arguments)]
fn dfs_generators(
    cands: &[(i128, EndVector)],
    profile: Option<&[i128]>,
    target: usize,
    start: usize,
    zv: &ZView,
    full_det: &BigInt,
    chosen: &mut Vec<EndVector>,
    steps: &mut u64,
) -> bool {
    let i = chosen.len();
    if i == target {
        return same_lattice(chosen, full_det, zv);
    }
    for (k, (q, v)) in cands.iter().enumerate() {
        let skip = match profile {
            Some(p) => *q != p[i],
            None => k < start,
        };
        if skip {
            continue;
        }
        *steps += 1;
        if *steps > GENERATOR_SEARCH_CAP {
            return false;
        }
        chosen.push(v.clone());
        if !zv.span_det(chosen).is_zero() && dfs_generators(cands, profile, target, k + 1, zv, full_det, chosen, steps)
        {
            return true;
        }
        chosen.pop();
    }
    false
}

pub fn successive_minima(l: &KLattice) -> Result<MinimaResult> {
    successive_minima_with_cap(l, DEFAULT_ENUM_CAP)
}

pub fn successive_minima_with_cap(l: &KLattice, cap: u64) -> Result<MinimaResult> {
    let zv = l.zview();
    let (basis, generates) = short_generators(&zv.span(&l.rows), l.rank(), &zv, cap)?;
    let lambdas: Vec<f64> = basis.iter().map(|v| (norm_sq(v, &l.ord) as f64).sqrt()).collect();
    let (lhs, rhs) = minkowski_sides(&lambdas, l.det(), &l.ord);
    Ok(MinimaResult {
        basis,
        lambdas,
        generates,
        minkowski_ok: lhs <= rhs * (1.0 + 1e-12),
        minkowski_lhs: lhs,
        minkowski_rhs: rhs,
    })
}

/// Both sides of Minkowski's second theorem for a K-lattice.
///
/// With CM: ω_{2r}(λ_1⋯λ_r)² ≤ 2^r·|D_K|^{r/2}·(det Λ)². Without CM the
/// lattice is a Z-lattice and the real form ω_r·λ_1⋯λ_r ≤ 2^r·det Λ is used.
pub fn minkowski_sides(lambdas: &[f64], det: f64, ord: &CMOrder) -> (f64, f64) {
    let r = lambdas.len() as u32;
    let prod: f64 = lambdas.iter().product();
    if ord.is_cm() {
        let lhs = omega_2n(r) * prod * prod;
        let rhs = 2f64.powi(r as i32) * (ord.abs_dk() as f64).powf(r as f64 / 2.0) * det * det;
        (lhs, rhs)
    } else {
        (omega_real(r) * prod, 2f64.powi(r as i32) * det)
    }
}

/// The saturated lattice {v ∈ O_K^N : ⟨v, u_i⟩ = 0 for all rows u_i}.
pub fn orthogonal_complement(l: &KLattice) -> Result<KLattice> {
    orthogonal_complement_with_cap(l, DEFAULT_ENUM_CAP)
}

pub fn orthogonal_complement_with_cap(l: &KLattice, cap: u64) -> Result<KLattice> {
    let n = l.ambient_dim();
    let r = l.rank();
    if r >= n {
        return Err(Error::InvalidInput(
            "the lattice has full rank; its complement is zero".into(),
        ));
    }
    let zv = l.zview();
    let (x0, y0) = l.ord.tau_sq();
    let mut eqs = Vec::new();
    for u in &l.rows {
        // v_j·ū_j with v_j = a + bτ, ū_j = p + qτ
        let mut re = Vec::new();
        let mut im = Vec::new();
        for e in u {
            let c = e.conj(&l.ord);
            if zv.cm {
                re.extend([c.a, c.b * x0]);
                im.extend([c.b, c.a + c.b * y0]);
            } else {
                re.push(c.a);
            }
        }
        eqs.push(re);
        if zv.cm {
            eqs.push(im);
        }
    }
    let dim = if zv.cm { 2 * n } else { n };
    let kernel = integer_kernel(&eqs, dim)?;
    let expect = if zv.cm { 2 * (n - r) } else { n - r };
    if kernel.len() != expect {
        return Err(Error::Internal(format!(
            "kernel has Z-rank {} instead of {expect}",
            kernel.len()
        )));
    }
    let (rows, generates) = short_generators(&kernel, n - r, &zv, cap)?;
    if !generates {
        return Err(Error::ResourceLimit(
            "no basis of the orthogonal complement found among its short vectors; over a non-maximal order the complement need not be free".into(),
        ));
    }
    KLattice::new(rows, l.ord)
}

/// Adjugate of a square matrix over End(E) with the Hadamard bound on its columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjugateResult {
    pub adjugate: Vec<EndVector>,
    pub det: EndElement,
    /// Every entry in column i of the adjugate has absolute value at most
    /// ∏_j ||u_j|| / ||u_i||, with u_j the rows of U.
    pub hadamard_ok: bool,
}

fn end_det(m: &[EndVector], ord: &CMOrder) -> EndElement {
    let n = m.len();
    match n {
        0 => EndElement::int(1),
        1 => m[0][0],
        _ => {
            let mut acc = EndElement::int(0);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let term = m[0][c].mul(&end_det(&minor(m, 0, c), ord), ord);
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn minor(m: &[EndVector], row: usize, col: usize) -> Vec<EndVector> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| *e)
                .collect()
        })
        .collect()
}

pub fn adjugate_check(u: &[EndVector], ord: &CMOrder) -> Result<AdjugateResult> {
    let n = u.len();
    if n == 0 || u.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("adjugate needs a nonempty square matrix".into()));
    }
    let mut adj = vec![vec![EndElement::int(0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let c = end_det(&minor(u, i, k), ord);
            adj[k][i] = if (i + k) % 2 == 0 { c } else { c.neg() };
        }
    }
    let det = end_det(u, ord);
    for i in 0..n {
        for j in 0..n {
            let s = (0..n).fold(EndElement::int(0), |acc, k| acc.add(&u[i][k].mul(&adj[k][j], ord)));
            let want = if i == j { det } else { EndElement::int(0) };
            if s != want {
                return Err(Error::Internal("U·U* differs from det(U)·Id".into()));
            }
        }
    }
    let norms: Vec<BigInt> = u.iter().map(|r| BigInt::from(norm_sq(r, ord))).collect();
    let mut hadamard_ok = true;
    for i in 0..n {
        let bound: BigInt = norms
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .product();
        for row in &adj {
            if BigInt::from(row[i].norm(ord)) > bound {
                hadamard_ok = false;
            }
        }
    }
    Ok(AdjugateResult {
        adjugate: adj,
        det,
        hadamard_ok,
    })
}

fn morphism_factor(n: usize) -> BigInt {
    BigInt::from(12).pow(n as u32 - 1) * 2
}

/// Degree bound 12^{N−1}·2·Σ|l_i|² for the morphism E^N → E given by l.
pub fn morphism_degree_bound(l: &[EndElement], ord: &CMOrder) -> Result<BigInt> {
    if l.is_empty() || l.iter().all(EndElement::is_zero) {
        return Err(Error::InvalidInput("the zero morphism has no degree bound".into()));
    }
    Ok(morphism_factor(l.len()) * norm_sq(l, ord))
}

/// Degree bound 3^N·N!·(12^{N−1}·2)^s·∏||u_i||² for the kernel of the
/// morphism with rows u_1, …, u_s.
pub fn subgroup_degree_bound(n: usize, rows: &[EndVector], ord: &CMOrder) -> Result<BigInt> {
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("rows must have length {n}")));
    }
    if k_rank(rows, ord) < rows.len() {
        return Err(Error::RankDeficient("rows are not K-linearly independent".into()));
    }
    let prod: BigInt = rows.iter().map(|r| BigInt::from(norm_sq(r, ord))).product();
    Ok(BigInt::from(3).pow(n as u32)
        * crate::arith::factorial(n as u64)
        * morphism_factor(n).pow(rows.len() as u32)
        * prod)
}

/// Both sides of deg B/(det Λ)² ≤ 3^N·N!·(12^{N−1}·2)^r·2^r·|D_K|^{r/2}/ω_{2r}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradodetWitness {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn gradodet_check(l: &KLattice) -> Result<GradodetWitness> {
    let n = l.ambient_dim();
    let r = l.rank() as u32;
    let m = successive_minima(l)?;
    let deg = subgroup_degree_bound(n, &m.basis, &l.ord)?;
    let lhs = deg.to_f64().unwrap_or(f64::INFINITY) / l.gram_det().to_f64().unwrap_or(f64::NAN);
    let base = (BigInt::from(3).pow(n as u32) * crate::arith::factorial(n as u64) * morphism_factor(n).pow(r))
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let minkowski = if l.ord.is_cm() {
        2f64.powi(r as i32) * (l.ord.abs_dk() as f64).powf(r as f64 / 2.0) / omega_2n(r)
    } else {
        (2f64.powi(r as i32) / omega_real(r)).powi(2)
    };
    let rhs = base * minkowski;
    Ok(GradodetWitness {
        holds: lhs <= rhs * (1.0 + 1e-12),
        lhs,
        rhs,
    })
}

/// C1(N,s)·∏||u_i||²·(2^N|D_K|^{N/2}/(ω_{2(N−s)}ω_{2s})·Σ ĥ_i/||u_i||² + C(E)).
pub fn translate_height_bound(
    n: usize,
    s: usize,
    rows: &[EndVector],
    hhat_values: &[f64],
    ord: &CMOrder,
    c_e: f64,
) -> Result<f64> {
    if s > n || s == 0 {
        return Err(Error::InvalidInput(format!("need 1 ≤ s ≤ N, got s = {s}, N = {n}")));
    }
    if rows.len() != s || hhat_values.len() != s || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("expected s rows of length N and s heights".into()));
    }
    if hhat_values.iter().any(|h| *h < 0.0 || !h.is_finite()) {
        return Err(Error::InvalidInput("heights must be finite and nonnegative".into()));
    }
    let norms: Vec<f64> = rows.iter().map(|r| norm_sq(r, ord) as f64).collect();
    if norms.contains(&0.0) {
        return Err(Error::InvalidInput("rows must be nonzero".into()));
    }
    let c1 = crate::constants::c1_const(n as u32, s as u32)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let prod: f64 = norms.iter().product();
    let geo = 2f64.powi(n as i32) * (ord.abs_dk() as f64).powf(n as f64 / 2.0)
        / (omega_2n((n - s) as u32) * omega_2n(s as u32));
    let sum: f64 = hhat_values.iter().zip(&norms).map(|(h, v)| h / v).sum();
    Ok(c1 * prod * (geo * sum + c_e))
}

/// Block forms of a pair of orthogonal morphisms after Gauss reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussReduction {
    /// (N−t)×N, identity-like diagonal a_1, …, a_{N−t} in the first N−t columns.
    pub m: Vec<EndVector>,
    /// t×N, diagonal b_1, …, b_t in the last t columns.
    pub m_perp: Vec<EndVector>,
    /// New column j is old column permutation[j].
    pub permutation: Vec<usize>,
    /// Whether the pivot column had to be moved out of the leading block.
    pub exchanged: bool,
}

fn submatrix(rows: &[Vec<KNum>], cols: &[usize]) -> Vec<Vec<KNum>> {
    rows.iter()
        .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rows of `rows` reduced so that the columns `cols` carry the identity,
/// then scaled by the least integer making every entry integral.
fn reduce_on(rows: &[Vec<KNum>], cols: &[usize], ord: &CMOrder) -> Result<Vec<EndVector>> {
    let k = rows.len();
    let n = rows[0].len();
    // [rows[:,cols] | rows] → [I | rows[:,cols]⁻¹·rows]
    let mut aug: Vec<Vec<KNum>> = rows
        .iter()
        .map(|r| cols.iter().map(|&c| r[c].clone()).chain(r.iter().cloned()).collect())
        .collect();
    let piv = k_rref(&mut aug, ord);
    if piv.len() < k || piv[k - 1] >= k {
        return Err(Error::Internal("chosen minor is singular".into()));
    }
    let mut out = Vec::new();
    for r in aug {
        let row: Vec<KNum> = r[k..k + n].to_vec();
        let mut den = BigInt::one();
        for z in &row {
            den = num_integer::Integer::lcm(&den, z.a.denom());
            den = num_integer::Integer::lcm(&den, z.b.denom());
        }
        let scale = Q::from_integer(den);
        let ints: Option<EndVector> = row.iter().map(|z| z.scale(&scale).to_end()).collect();
        out.push(ints.ok_or_else(|| Error::ResourceLimit("reduced entries overflow i64".into()))?);
    }
    Ok(out)
}

/// Gauss reduction of Φ ((N−t)×N) and Φ⊥ (t×N) to the block forms
///
/// ```text
/// M  = (diag(a_1..a_{N−t}) | *)      M⊥ = (* | diag(b_1..b_t))
/// ```
///
/// after a column permutation that places `pivot_col` (0-based) at position
/// N−t, the first column of the trailing block.
pub fn gauss_reduce_pair(
    phi: &[EndVector],
    phi_perp: &[EndVector],
    pivot_col: usize,
    ord: &CMOrder,
) -> Result<GaussReduction> {
    let nt = phi.len();
    let t = phi_perp.len();
    let n = nt + t;
    if nt == 0 || t == 0 {
        return Err(Error::InvalidInput("both Φ and Φ⊥ need at least one row".into()));
    }
    if phi.iter().chain(phi_perp).any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!(
            "rows must have length {n} = rows(Φ) + rows(Φ⊥)"
        )));
    }
    if pivot_col >= n {
        return Err(Error::InvalidInput(format!("pivot column {pivot_col} outside 0..{n}")));
    }
    if k_rank(phi, ord) < nt || k_rank(phi_perp, ord) < t {
        return Err(Error::RankDeficient("Φ and Φ⊥ must have full row rank".into()));
    }
    for u in phi {
        for v in phi_perp {
            if !hermitian(u, v, ord).is_zero() {
                return Err(Error::InvalidInput("rows of Φ⊥ are not orthogonal to rows of Φ".into()));
            }
        }
    }
    let kphi = to_k_rows(phi);
    let kperp = to_k_rows(phi_perp);
    let invertible = |rows: &[Vec<KNum>], cols: &[usize]| !k_det(&submatrix(rows, cols), ord).is_zero();
    let subsets = combinations(n, nt);
    let first = subsets
        .iter()
        .find(|s| invertible(&kphi, s))
        .ok_or_else(|| Error::Internal("Φ has no invertible maximal minor".into()))?;
    let exchanged = first.contains(&pivot_col);
    let chosen = subsets.iter().find(|s| !s.contains(&pivot_col) && invertible(&kphi, s)).ok_or_else(|| {
        Error::Inconsistent(format!(
            "column {pivot_col} cannot leave the leading block: Φ⊥ vanishes there, so that coordinate is constant on the kernel"
        ))
    })?;
    let rest: Vec<usize> = (0..n).filter(|c| !chosen.contains(c)).collect();
    if !invertible(&kperp, &rest) {
        return Err(Error::Internal("complementary minor of Φ⊥ is singular".into()));
    }
    let mut permutation = chosen.clone();
    permutation.push(pivot_col);
    permutation.extend(rest.iter().filter(|&&c| c != pivot_col));
    let m_raw = reduce_on(&kphi, chosen, ord)?;
    let p_raw = reduce_on(&kperp, &permutation[nt..], ord)?;
    let permute = |rows: Vec<EndVector>| -> Vec<EndVector> {
        rows.into_iter()
            .map(|r| permutation.iter().map(|&c| r[c]).collect())
            .collect()
    };
    let m = permute(m_raw);
    let m_perp = permute(p_raw);
    for u in &m {
        for v in &m_perp {
            if !hermitian(u, v, ord).is_zero() {
                return Err(Error::Internal("reduction broke orthogonality".into()));
            }
        }
    }
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().take(nt).enumerate() {
            if (i == j) == e.is_zero() {
                return Err(Error::Internal("M is not in block form".into()));
            }
        }
    }
    for (i, row) in m_perp.iter().enumerate() {
        for (j, e) in row.iter().skip(nt).enumerate() {
            if (i == j) == e.is_zero() {
                return Err(Error::Internal("M⊥ is not in block form".into()));
            }
        }
    }
    Ok(GaussReduction {
        m,
        m_perp,
        permutation,
        exchanged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::tests::orders;

    fn gi() -> CMOrder {
        CMOrder::new(-1, 1).unwrap()
    }

    fn e(a: i64, b: i64) -> EndElement {
        EndElement::new(a, b)
    }

    fn lat(rows: Vec<Vec<(i64, i64)>>, ord: CMOrder) -> KLattice {
        KLattice::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(a, b)| e(a, b)).collect())
                .collect(),
            ord,
        )
        .unwrap()
    }

    #[test]
    fn determinants() {
        assert!((lat(vec![vec![(1, 0), (0, 0)], vec![(0, 0), (1, 0)]], gi()).det() - 1.0).abs() < 1e-12);
        assert!((lat(vec![vec![(1, 0), (0, 1)]], gi()).det() - 2f64.sqrt()).abs() < 1e-12);
        assert!((lat(vec![vec![(2, 0), (0, 0)]], gi()).det() - 2.0).abs() < 1e-12);
        let dep = KLattice::new(vec![vec![e(1, 0), e(0, 1)], vec![e(0, 1), e(-1, 0)]], gi());
        assert!(matches!(dep, Err(Error::RankDeficient(_))));
    }

    #[test]
    fn minima_examples() {
        for o in orders() {
            let id = lat(vec![vec![(1, 0), (0, 0)], vec![(0, 0), (1, 0)]], o);
            let m = successive_minima(&id).unwrap();
            assert_eq!(m.lambdas, vec![1.0, 1.0]);
            assert!(m.minkowski_ok && m.generates);
        }
        let m = successive_minima(&lat(vec![vec![(2, 0), (0, 0)], vec![(0, 0), (1, 0)]], gi())).unwrap();
        assert_eq!(m.lambdas, vec![1.0, 2.0]);
        let m = successive_minima(&lat(vec![vec![(1, 0), (1, 0)]], gi())).unwrap();
        assert!((m.lambdas[0] - 2f64.sqrt()).abs() < 1e-12);
        // π·2 ≤ 2·2·2
        assert!((m.minkowski_lhs - std::f64::consts::PI * 2.0).abs() < 1e-12);
        assert!((m.minkowski_rhs - 8.0).abs() < 1e-12);
    }

    #[test]
    fn minima_reduce_skewed_basis() {
        let l = lat(vec![vec![(1, 0), (5, 3)], vec![(0, 0), (1, 0)]], gi());
        let m = successive_minima(&l).unwrap();
        assert_eq!(m.lambdas, vec![1.0, 1.0]);
        assert!(m.generates);
    }

    #[test]
    fn complement_examples() {
        let c = orthogonal_complement(&lat(vec![vec![(1, 0), (0, 0)]], gi())).unwrap();
        assert_eq!(c.rows()[0][0], e(0, 0));
        assert_eq!(c.rows()[0][1].norm(&gi()), 1);
        let c = orthogonal_complement(&lat(vec![vec![(1, 0), (1, 0)]], gi())).unwrap();
        assert_eq!(c.rows()[0], vec![e(1, 0), e(-1, 0)]);
        let l = lat(vec![vec![(1, 0), (0, 1)]], gi());
        let c = orthogonal_complement(&l).unwrap();
        // ⟨(i, 1)⟩ up to a unit
        let v = &c.rows()[0];
        assert_eq!(hermitian(v, &l.rows()[0], &gi()), e(0, 0));
        assert_eq!(norm_sq(v, &gi()), 2);
        assert!((l.det() * c.det() - 2.0).abs() < 1e-12);
        let full = lat(vec![vec![(1, 0)]], gi());
        assert!(matches!(orthogonal_complement(&full), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn complement_determinant_identity() {
        // complements over Z[2√−2] need not be free, so only maximal orders here
        for o in orders().into_iter().filter(|o| o.conductor() == 1 || o.d() == Some(-1)) {
            let l = lat(vec![vec![(1, 1), (2, 0), (0, -1)]], o);
            let c = match orthogonal_complement(&l) {
                Ok(c) => c,
                Err(err) => panic!("{o:?} {err}"),
            };
            assert_eq!(c.rank(), 2);
            let mut stack = l.rows().to_vec();
            stack.extend(c.rows().iter().cloned());
            let d = adjugate_check(&stack, &o).unwrap().det.norm(&o) as f64;
            assert!((d.sqrt() - l.det() * c.det()).abs() < 1e-9 * d.sqrt(), "{o:?}");
        }
    }

    #[test]
    fn adjugate_examples() {
        let id = vec![vec![e(1, 0), e(0, 0)], vec![e(0, 0), e(1, 0)]];
        let a = adjugate_check(&id, &gi()).unwrap();
        assert_eq!(a.adjugate, id);
        let u = vec![vec![e(1, 0), e(0, 1)], vec![e(0, 1), e(1, 0)]];
        let a = adjugate_check(&u, &gi()).unwrap();
        assert_eq!(a.adjugate, vec![vec![e(1, 0), e(0, -1)], vec![e(0, -1), e(1, 0)]]);
        assert_eq!(a.det, e(2, 0));
        assert!(a.hadamard_ok);
    }

    #[test]
    fn degree_bounds() {
        let o = gi();
        assert_eq!(morphism_degree_bound(&[e(1, 0)], &o).unwrap(), BigInt::from(2));
        assert_eq!(
            morphism_degree_bound(&[e(1, 0), e(1, 0)], &o).unwrap(),
            BigInt::from(48)
        );
        assert!(morphism_degree_bound(&[e(0, 0)], &o).is_err());
        assert_eq!(subgroup_degree_bound(1, &[vec![e(1, 0)]], &o).unwrap(), BigInt::from(6));
        assert_eq!(
            subgroup_degree_bound(2, &[vec![e(1, 0), e(0, 0)]], &o).unwrap(),
            BigInt::from(432)
        );
        let id = vec![vec![e(1, 0), e(0, 0)], vec![e(0, 0), e(1, 0)]];
        assert_eq!(subgroup_degree_bound(2, &id, &o).unwrap(), BigInt::from(10368));
    }

    #[test]
    fn gradodet_examples() {
        let w = gradodet_check(&lat(vec![vec![(1, 0), (0, 0)], vec![(0, 0), (1, 0)]], gi())).unwrap();
        assert!(w.holds);
        let w = gradodet_check(&lat(vec![vec![(3, 0), (0, 4)]], gi())).unwrap();
        assert!(w.holds && w.rhs > w.lhs);
    }

    #[test]
    fn translate_bound_examples() {
        let o = gi();
        let u = vec![vec![e(1, 0), e(0, 0)]];
        let pi2 = std::f64::consts::PI.powi(2);
        let v = translate_height_bound(2, 1, &u, &[1.0], &o, 5.0).unwrap();
        assert!((v - 1728.0 * (16.0 / pi2 + 5.0)).abs() < 1e-9 * v);
        let z = translate_height_bound(2, 1, &u, &[0.0], &o, 5.0).unwrap();
        assert!((z - 1728.0 * 5.0).abs() < 1e-9);
        let id = vec![vec![e(1, 0), e(0, 0)], vec![e(0, 0), e(1, 0)]];
        assert!(translate_height_bound(2, 2, &id, &[1.0, 2.0], &o, 5.0)
            .unwrap()
            .is_finite());
        assert!(translate_height_bound(1, 2, &id, &[1.0, 2.0], &o, 5.0).is_err());
    }

    #[test]
    fn gauss_reduction_examples() {
        let o = gi();
        let r = gauss_reduce_pair(&[vec![e(1, 0), e(0, 0)]], &[vec![e(0, 0), e(1, 0)]], 1, &o).unwrap();
        assert_eq!(r.permutation, vec![0, 1]);
        assert!(!r.exchanged);
        let r = gauss_reduce_pair(&[vec![e(1, 0), e(1, 0)]], &[vec![e(1, 0), e(-1, 0)]], 1, &o).unwrap();
        assert_eq!(r.permutation, vec![0, 1]);
        assert!(!r.m_perp[0][1].is_zero());
        let r = gauss_reduce_pair(&[vec![e(1, 0), e(1, 0)]], &[vec![e(1, 0), e(-1, 0)]], 0, &o).unwrap();
        assert_eq!(r.permutation, vec![1, 0]);
        assert!(r.exchanged);
        // the second coordinate is fixed on the kernel of (0, 1)
        let bad = gauss_reduce_pair(&[vec![e(0, 0), e(1, 0)]], &[vec![e(1, 0), e(0, 0)]], 1, &o);
        assert!(matches!(bad, Err(Error::Inconsistent(_))));
    }

    #[test]
    fn gauss_reduction_rank_three() {
        let o = CMOrder::new(-3, 1).unwrap();
        let phi = lat(vec![vec![(1, 1), (2, 0), (0, -1)]], o);
        let perp = orthogonal_complement(&phi).unwrap();
        for pivot in 0..3 {
            let r = gauss_reduce_pair(phi.rows(), perp.rows(), pivot, &o).unwrap();
            assert_eq!(r.permutation[1], pivot);
        }
    }
}
