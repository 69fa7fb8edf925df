//! Operator models: unitaries built from commuting unitary families, pure
//! isometries given by Toeplitz symbols, Wold splittings, equivalence
//! invariants and intertwining checks.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{gamma_membership, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::linalg::orthonormal_range;
use crate::poly::{elementary_symmetric_all, elementary_symmetric_poly, exponents_up_to, MultiPoly};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default word length for trace comparisons.
pub const DEFAULT_WORD_LENGTH: usize = 6;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.norm()))
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| random_complex(rng))
}

/// Unitary factor of a random complex matrix.
pub fn random_unitary(r: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    random_matrix(r, r, rng).qr().q()
}

/// n commuting unitaries, stored by their diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingUnitaryFamily {
    diagonals: Vec<Vec<Complex64>>,
}

impl CommutingUnitaryFamily {
    pub fn new(diagonals: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = diagonals.first().map_or(0, Vec::len);
        if diagonals.iter().any(|d| d.len() != r) {
            return Err(Error::ShapeMismatch("diagonals of unequal length".into()));
        }
        if diagonals.iter().flatten().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::PreconditionFailed("diagonal entries must be unimodular".into()));
        }
        Ok(Self { diagonals })
    }

    pub fn random(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Self {
        let diagonals = (0..n)
            .map(|_| {
                (0..r)
                    .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                    .collect()
            })
            .collect();
        Self { diagonals }
    }

    pub fn n(&self) -> usize {
        self.diagonals.len()
    }

    pub fn size(&self) -> usize {
        self.diagonals.first().map_or(0, Vec::len)
    }

    pub fn diagonals(&self) -> &[Vec<Complex64>] {
        &self.diagonals
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        self.diagonals
            .iter()
            .map(|d| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())))
            .collect()
    }
}

/// T_j = s_j(U₁^m, …, Uₙ^m) for j < n and Tₙ = (U₁⋯Uₙ)^q, so Tₙ^p = (U₁⋯Uₙ)^m.
pub fn theta_unitary_from_unitaries(family: &CommutingUnitaryFamily, spec: &GroupSpec) -> Result<Vec<CMatrix>> {
    let n = spec.n();
    if family.n() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: family.n(),
        });
    }
    let r = family.size();
    let mut diag = vec![vec![ZERO; r]; n];
    for k in 0..r {
        let u: Vec<Complex64> = family.diagonals.iter().map(|d| d[k]).collect();
        let powers: Vec<Complex64> = u.iter().map(|x| x.powu(spec.m())).collect();
        let s = elementary_symmetric_all(&powers);
        for j in 1..n {
            diag[j - 1][k] = s[j];
        }
        diag[n - 1][k] = u.iter().product::<Complex64>().powu(spec.q());
    }
    Ok(diag
        .into_iter()
        .map(|d| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
        .collect())
}

/// Θₙ-unitary built from a seeded random commuting family and conjugated by a
/// random unitary, so that the matrices are not diagonal.
pub fn random_theta_unitary(spec: &GroupSpec, r: usize, seed: u64) -> Result<Vec<CMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = CommutingUnitaryFamily::random(spec.n(), r, &mut rng);
    let w = random_unitary(r, &mut rng);
    Ok(theta_unitary_from_unitaries(&family, spec)?
        .into_iter()
        .map(|t| &w * t * w.adjoint())
        .collect())
}

fn relation_residuals(t: &[CMatrix], p: u32) -> f64 {
    let n = t.len();
    let tp = matrix_power(&t[n - 1], p);
    (1..n)
        .map(|j| max_abs(&(tp.adjoint() * &t[j - 1] - t[n - j - 1].adjoint())))
        .fold(0.0, f64::max)
}

pub fn matrix_power(a: &CMatrix, k: u32) -> CMatrix {
    let mut out = CMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// Joint eigenvalue tuples of a commuting family of normal matrices, one tuple
/// per common eigenvector, read off after unitarily triangularizing a generic
/// linear combination.
pub fn joint_spectrum(t: &[CMatrix], tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let Some(first) = t.first() else {
        return Ok(Vec::new());
    };
    let r = first.nrows();
    if t.iter().any(|m| m.shape() != (r, r)) {
        return Err(Error::ShapeMismatch("matrices must be square of one size".into()));
    }
    let scale = t.iter().map(max_abs).fold(1.0, f64::max);
    let normal = t
        .iter()
        .map(|m| max_abs(&(m * m.adjoint() - m.adjoint() * m)))
        .fold(0.0, f64::max);
    if normal > tol * scale * scale {
        return Err(Error::NotNormal(normal));
    }
    let mut comm = 0.0f64;
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            comm = comm.max(max_abs(&(&t[a] * &t[b] - &t[b] * &t[a])));
        }
    }
    if comm > tol * scale * scale {
        return Err(Error::NotCommuting(comm));
    }
    // fixed generic weights keep the result deterministic
    let mut combo = CMatrix::zeros(r, r);
    for (k, m) in t.iter().enumerate() {
        let w = Complex64::from_polar(1.0 + 0.618_033_988_7 * k as f64, 0.754_877_666 * (k + 1) as f64);
        combo += m * w;
    }
    let (q, _) = Schur::new(combo).unpack();
    Ok((0..r)
        .map(|col| {
            let v = q.column(col);
            t.iter().map(|m| (v.adjoint() * m * v)[(0, 0)]).collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaUnitaryReport {
    pub unitary_residual: f64,
    pub relation_residual: f64,
    pub normal_residual: f64,
    pub commutator_residual: f64,
    /// None when the family is not normal and commuting, so the spectral
    /// route does not apply.
    pub gamma_contraction: Option<bool>,
    pub joint_eigenvalues: Vec<Vec<Complex64>>,
    pub passed: bool,
}

/// Checks TₙTₙ* = Tₙ*Tₙ = I, (Tₙ^p)*T_j = T_{n−j}* for j = 1..n−1, and the
/// Γₙ₋₁-contraction condition through the joint spectrum.
pub fn verify_theta_unitary(t: &[CMatrix], spec: &GroupSpec, tol: f64) -> Result<ThetaUnitaryReport> {
    let n = spec.n();
    if t.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: t.len(),
        });
    }
    let r = t[0].nrows();
    if t.iter().any(|m| m.shape() != (r, r)) {
        return Err(Error::ShapeMismatch("matrices must be square of one size".into()));
    }
    let id = CMatrix::identity(r, r);
    let tn = &t[n - 1];
    let unitary_residual = max_abs(&(tn * tn.adjoint() - &id)).max(max_abs(&(tn.adjoint() * tn - &id)));
    let relation_residual = relation_residuals(t, spec.p());
    let normal_residual = t
        .iter()
        .map(|m| max_abs(&(m * m.adjoint() - m.adjoint() * m)))
        .fold(0.0, f64::max);
    let mut commutator_residual = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            commutator_residual = commutator_residual.max(max_abs(&(&t[a] * &t[b] - &t[b] * &t[a])));
        }
    }
    let (gamma_contraction, joint_eigenvalues) = if normal_residual <= tol && commutator_residual <= tol {
        let spectrum = joint_spectrum(t, f64::INFINITY)?;
        let ok = spectrum.iter().all(|ev| {
            let q: Vec<Complex64> = (1..n).map(|j| ev[j - 1] * ((n - j) as f64 / n as f64)).collect();
            gamma_membership(&q, DEFAULT_TOL).is_member()
        });
        (Some(ok), spectrum)
    } else {
        (None, Vec::new())
    };
    let passed = unitary_residual <= tol && relation_residual <= tol && gamma_contraction == Some(true);
    Ok(ThetaUnitaryReport {
        unitary_residual,
        relation_residual,
        normal_residual,
        commutator_residual,
        gamma_contraction,
        joint_eigenvalues,
        passed,
    })
}

/// Coefficients A_ℓ^{(i)} of the symbols Φ_i(z) = Σ_ℓ A_ℓ^{(i)} z^ℓ, i = 1..n−1,
/// stored 0-based as `a[i − 1][ℓ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTuple {
    pub p: u32,
    pub n: usize,
    pub r: usize,
    pub a: Vec<Vec<CMatrix>>,
}

#[derive(Serialize, Deserialize)]
struct SymbolTupleJson {
    p: u32,
    n: usize,
    r: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl SymbolTuple {
    pub fn new(p: u32, n: usize, r: usize, a: Vec<Vec<CMatrix>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::ShapeMismatch(format!("need n >= 2, got {n}")));
        }
        if a.len() != n - 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected {} symbols, got {}",
                n - 1,
                a.len()
            )));
        }
        for phi in &a {
            if phi.len() != p as usize + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "expected {} coefficients per symbol, got {}",
                    p + 1,
                    phi.len()
                )));
            }
            if phi.iter().any(|m| m.shape() != (r, r)) {
                return Err(Error::ShapeMismatch(format!("coefficients must be {r}x{r}")));
            }
        }
        Ok(Self { p, n, r, a })
    }

    pub fn zero(p: u32, n: usize, r: usize) -> Self {
        Self {
            p,
            n,
            r,
            a: vec![vec![CMatrix::zeros(r, r); p as usize + 1]; n - 1],
        }
    }

    /// Φ_i(z) for 0-based i.
    pub fn eval(&self, i: usize, z: Complex64) -> CMatrix {
        let mut out = CMatrix::zeros(self.r, self.r);
        let mut zk = ONE;
        for m in &self.a[i] {
            out += m * zk;
            zk *= z;
        }
        out
    }

    /// U·A·U* applied to every coefficient.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        Self {
            a: self
                .a
                .iter()
                .map(|phi| phi.iter().map(|m| u * m * u.adjoint()).collect())
                .collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        let a = self
            .a
            .iter()
            .map(|phi| {
                phi.iter()
                    .map(|m| {
                        (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string(&SymbolTupleJson {
            p: self.p,
            n: self.n,
            r: self.r,
            a,
        })
        .expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SymbolTupleJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut a = Vec::new();
        for phi in raw.a {
            let mut coeffs = Vec::new();
            for rows in phi {
                if rows.len() != raw.r || rows.iter().any(|row| row.len() != raw.r) {
                    return Err(Error::ShapeMismatch(format!("coefficients must be {0}x{0}", raw.r)));
                }
                coeffs.push(CMatrix::from_fn(raw.r, raw.r, |i, j| {
                    Complex64::new(rows[i][j][0], rows[i][j][1])
                }));
            }
            a.push(coeffs);
        }
        Self::new(raw.p, raw.n, raw.r, a)
    }
}

/// Φ(z) = A₀ + A₁z + A₀*z² with A₁ Hermitian, scaled so that ‖Φ(z)‖ ≤ `bound`
/// on the circle. On 𝕋, Φ(z) = z·(A₀z̄ + A₁ + A₀*z) is z times a Hermitian matrix.
pub fn hermitian_pencil_symbol(r: usize, bound: f64, rng: &mut ChaCha8Rng) -> SymbolTuple {
    let a0 = random_matrix(r, r, rng);
    let h = random_matrix(r, r, rng);
    let a1 = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let norm = 2.0 * a0.norm() + a1.norm();
    let s = Complex64::new(if norm > 0.0 { bound / norm } else { 1.0 }, 0.0);
    SymbolTuple {
        p: 2,
        n: 2,
        r,
        a: vec![vec![&a0 * s, a1 * s, a0.adjoint() * s]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    pub residual: f64,
}

/// max over i, ℓ of ‖A_ℓ^{(i)*} − A_{p−ℓ}^{(n−i)}‖.
pub fn check_symmetry(s: &SymbolTuple, tol: f64) -> CheckResult {
    let p = s.p as usize;
    let k = s.n - 1;
    let mut residual = 0.0f64;
    for i in 0..k {
        for l in 0..=p {
            let partner = &s.a[k - 1 - i][p - l];
            residual = residual.max(max_abs(&(s.a[i][l].adjoint() - partner)));
        }
    }
    CheckResult {
        passed: residual <= tol,
        residual,
    }
}

/// max over pairs (i, j) and k = 0..2p of ‖Σ_ℓ [A_ℓ^{(i)}, A_{k−ℓ}^{(j)}]‖.
pub fn check_commutation(s: &SymbolTuple, tol: f64) -> CheckResult {
    let p = s.p as usize;
    let mut residual = 0.0f64;
    for i in 0..s.n - 1 {
        for j in i + 1..s.n - 1 {
            for k in 0..=2 * p {
                let mut sum = CMatrix::zeros(s.r, s.r);
                for l in k.saturating_sub(p)..=k.min(p) {
                    let (x, y) = (&s.a[i][l], &s.a[j][k - l]);
                    sum += x * y - y * x;
                }
                residual = residual.max(max_abs(&sum));
            }
        }
    }
    CheckResult {
        passed: residual <= tol,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalsifierConfig {
    pub torus_samples: usize,
    pub poly_samples: usize,
    pub poly_degree: u32,
    pub grid_per_circle: usize,
    pub seed: u64,
}

impl FalsifierConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            torus_samples: 32,
            poly_samples: 12,
            poly_degree: 3,
            grid_per_circle: 0,
            seed,
        }
    }

    fn grid_for(&self, vars: usize) -> usize {
        if self.grid_per_circle > 0 {
            return self.grid_per_circle;
        }
        match vars {
            0 | 1 => 512,
            2 => 96,
            _ => 28,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationWitness {
    pub z: Complex64,
    /// f as (exponent, coefficient) pairs in the variables w₁, …, wₙ₋₁.
    pub poly: Vec<(Vec<u32>, Complex64)>,
    pub operator_norm: f64,
    pub grid_sup: f64,
    pub certified_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum FalsifierVerdict {
    NoViolationFound { checks: usize },
    Violation(ViolationWitness),
}

fn eval_matrix_poly(f: &MultiPoly, x: &[CMatrix]) -> CMatrix {
    let r = x[0].nrows();
    let mut out = CMatrix::zeros(r, r);
    for (e, c) in f.terms() {
        let mut term = CMatrix::identity(r, r) * c;
        for (xi, &k) in x.iter().zip(e) {
            term *= matrix_power(xi, k);
        }
        out += term;
    }
    out
}

/// Upper bound for sup over θ(𝕋ᵏ) of |f|, the grid maximum plus a Lipschitz
/// allowance for the half-spacing; F = f∘s is expanded in the torus variables.
fn boundary_sup_bound(f: &MultiPoly, k: usize, grid: usize) -> (f64, f64) {
    let s: Vec<MultiPoly> = (1..=k).map(|i| elementary_symmetric_poly(k, i)).collect();
    let big_f = f.compose(&s).expect("arity matches");
    let h = std::f64::consts::TAU / grid as f64;
    let lipschitz: f64 = big_f
        .terms()
        .map(|(e, c)| c.norm() * e.iter().sum::<u32>() as f64)
        .sum();
    let mut idx = vec![0usize; k];
    let mut best = 0.0f64;
    loop {
        let lambda: Vec<Complex64> = idx.iter().map(|&t| Complex64::from_polar(1.0, t as f64 * h)).collect();
        best = best.max(big_f.eval(&lambda).norm());
        let mut pos = 0;
        while pos < k {
            idx[pos] += 1;
            if idx[pos] < grid {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    (best, best + 0.5 * h * lipschitz)
}

/// Compares ‖f(γ₁Φ₁(z), …, γₙ₋₁Φₙ₋₁(z))‖ with the supremum of |f| over the
/// distinguished boundary of Γₙ₋₁ for sampled z ∈ 𝕋 and sampled f. The
/// coordinate functions are always among the f. A reported violation exceeds
/// a certified upper bound for that supremum; no violation is only evidence.
pub fn gamma_contraction_falsifier(s: &SymbolTuple, cfg: &FalsifierConfig) -> FalsifierVerdict {
    let k = s.n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut polys: Vec<MultiPoly> = (0..k).map(|i| MultiPoly::var(k, i)).collect();
    let exps = exponents_up_to(k, cfg.poly_degree);
    for _ in 0..cfg.poly_samples {
        let mut f = MultiPoly::zero(k);
        for e in &exps {
            f.add_term(e.clone(), random_complex(&mut rng));
        }
        polys.push(f);
    }
    let grid = cfg.grid_for(k);
    let bounds: Vec<(f64, f64)> = polys.iter().map(|f| boundary_sup_bound(f, k, grid)).collect();
    let mut checks = 0;
    for _ in 0..cfg.torus_samples {
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let x: Vec<CMatrix> = (0..k)
            .map(|i| s.eval(i, z) * Complex64::new((s.n - i - 1) as f64 / s.n as f64, 0.0))
            .collect();
        for (f, &(grid_sup, bound)) in polys.iter().zip(&bounds) {
            checks += 1;
            let norm = eval_matrix_poly(f, &x).norm_spectral();
            if norm > bound * (1.0 + 1e-12) + 1e-12 {
                return FalsifierVerdict::Violation(ViolationWitness {
                    z,
                    poly: f.terms().map(|(e, c)| (e.to_vec(), c)).collect(),
                    operator_norm: norm,
                    grid_sup,
                    certified_bound: bound,
                });
            }
        }
    }
    FalsifierVerdict::NoViolationFound { checks }
}

trait SpectralNorm {
    fn norm_spectral(&self) -> f64;
}

impl SpectralNorm for CMatrix {
    fn norm_spectral(&self) -> f64 {
        self.singular_values().iter().fold(0.0f64, |a, &b| a.max(b))
    }
}

/// Finite sections of T_{Φ_i} and T_z on H²(ℰ) cut off at Fourier degree N;
/// block (a, b) of T_Φ is A_{a−b}.
#[derive(Debug, Clone)]
pub struct ToeplitzTruncation {
    pub symbols: SymbolTuple,
    pub cutoff: usize,
    pub t_phi: Vec<CMatrix>,
    pub t_z: CMatrix,
}

pub fn build_toeplitz(s: &SymbolTuple, cutoff: usize) -> Result<ToeplitzTruncation> {
    let p = s.p as usize;
    if cutoff < 2 * p {
        return Err(Error::WindowTooSmall(format!(
            "cutoff {cutoff} is below 2p = {}",
            2 * p
        )));
    }
    let r = s.r;
    let dim = r * (cutoff + 1);
    let t_phi =
        s.a.iter()
            .map(|phi| {
                let mut m = CMatrix::zeros(dim, dim);
                for a in 0..=cutoff {
                    for l in 0..=p.min(a) {
                        m.view_mut((a * r, (a - l) * r), (r, r)).copy_from(&phi[l]);
                    }
                }
                m
            })
            .collect();
    let mut t_z = CMatrix::zeros(dim, dim);
    for a in 1..=cutoff {
        t_z.view_mut((a * r, (a - 1) * r), (r, r))
            .copy_from(&CMatrix::identity(r, r));
    }
    Ok(ToeplitzTruncation {
        symbols: s.clone(),
        cutoff,
        t_phi,
        t_z,
    })
}

impl ToeplitzTruncation {
    pub fn dim(&self) -> usize {
        self.t_z.nrows()
    }

    /// Coordinates of the blocks p..=N−p.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let p = self.symbols.p as usize;
        let r = self.symbols.r;
        p * r..(self.cutoff - p + 1) * r
    }

    fn interior_residual(&self, m: &CMatrix) -> f64 {
        let w = self.interior();
        max_abs(&m.view((w.start, w.start), (w.len(), w.len())).into_owned())
    }

    /// (T_z^p)*T_{Φ_i} − T_{Φ_{n−i}}* on the interior window.
    pub fn relation_residual(&self) -> f64 {
        let k = self.t_phi.len();
        let zp = matrix_power(&self.t_z, self.symbols.p);
        (0..k)
            .map(|i| self.interior_residual(&(zp.adjoint() * &self.t_phi[i] - self.t_phi[k - 1 - i].adjoint())))
            .fold(0.0, f64::max)
    }

    /// T_z*T_z − I on the interior window.
    pub fn isometry_residual(&self) -> f64 {
        let d = self.dim();
        self.interior_residual(&(self.t_z.adjoint() * &self.t_z - CMatrix::identity(d, d)))
    }

    /// Largest commutator among T_{Φ_i} and T_z on the interior window.
    pub fn commutation_residual(&self) -> f64 {
        let mut ops: Vec<&CMatrix> = self.t_phi.iter().collect();
        ops.push(&self.t_z);
        let mut worst = 0.0f64;
        for a in 0..ops.len() {
            for b in a + 1..ops.len() {
                worst = worst.max(self.interior_residual(&(ops[a] * ops[b] - ops[b] * ops[a])));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    /// 0-based symbol index.
    pub symbol: usize,
    pub coeff: usize,
    pub adjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum WordTraceVerdict {
    Consistent {
        words_checked: usize,
    },
    Distinguished {
        word: Vec<Letter>,
        trace_first: Complex64,
        trace_second: Complex64,
    },
}

/// Compares tr w(S1) with tr w(S2) over all words of length ≤ L in the
/// coefficients and their adjoints. A differing trace certifies that no single
/// unitary conjugates one coefficient tuple onto the other.
pub fn word_trace_equivalence(
    s1: &SymbolTuple,
    s2: &SymbolTuple,
    max_len: usize,
    tol: f64,
) -> Result<WordTraceVerdict> {
    if (s1.n, s1.p, s1.r) != (s2.n, s2.p, s2.r) {
        return Err(Error::ShapeMismatch(format!(
            "(n, p, r) = ({}, {}, {}) vs ({}, {}, {})",
            s1.n, s1.p, s1.r, s2.n, s2.p, s2.r
        )));
    }
    let mut letters = Vec::new();
    for symbol in 0..s1.n - 1 {
        for coeff in 0..=s1.p as usize {
            for adjoint in [false, true] {
                letters.push(Letter { symbol, coeff, adjoint });
            }
        }
    }
    let mat = |s: &SymbolTuple, l: &Letter| {
        let m = &s.a[l.symbol][l.coeff];
        if l.adjoint {
            m.adjoint()
        } else {
            m.clone()
        }
    };
    let m1: Vec<CMatrix> = letters.iter().map(|l| mat(s1, l)).collect();
    let m2: Vec<CMatrix> = letters.iter().map(|l| mat(s2, l)).collect();
    let scale = m1.iter().chain(&m2).map(max_abs).fold(1.0, f64::max);
    let r = s1.r;

    // breadth-first so the shortest distinguishing word is reported
    let mut frontier: Vec<(Vec<usize>, CMatrix, CMatrix)> =
        vec![(Vec::new(), CMatrix::identity(r, r), CMatrix::identity(r, r))];
    let mut checked = 0;
    for len in 1..=max_len {
        let bound = tol * r as f64 * scale.powi(len as i32);
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for (word, p1, p2) in &frontier {
            for (li, (a, b)) in m1.iter().zip(&m2).enumerate() {
                let q1 = p1 * a;
                let q2 = p2 * b;
                let (t1, t2) = (q1.trace(), q2.trace());
                checked += 1;
                let mut w = word.clone();
                w.push(li);
                if (t1 - t2).norm() > bound {
                    return Ok(WordTraceVerdict::Distinguished {
                        word: w.iter().map(|&i| letters[i]).collect(),
                        trace_first: t1,
                        trace_second: t2,
                    });
                }
                if len < max_len {
                    next.push((w, q1, q2));
                }
            }
        }
        frontier = next;
    }
    Ok(WordTraceVerdict::Consistent { words_checked: checked })
}

/// A unitary tuple direct-summed with a pure Toeplitz model, then mixed by a
/// unitary W so that the split is not aligned with coordinates.
#[derive(Debug, Clone)]
pub struct WoldModel {
    pub spec: GroupSpec,
    pub unitary_part: Vec<CMatrix>,
    pub pure_part: ToeplitzTruncation,
    pub mixing: CMatrix,
    pub operators: Vec<CMatrix>,
}

impl WoldModel {
    pub fn new(
        spec: &GroupSpec,
        family: Option<&CommutingUnitaryFamily>,
        symbols: &SymbolTuple,
        cutoff: usize,
        mixing: CMatrix,
    ) -> Result<Self> {
        if symbols.n != spec.n() || symbols.p != spec.p() {
            return Err(Error::ShapeMismatch(format!(
                "symbols have (n, p) = ({}, {}) but the group has ({}, {})",
                symbols.n,
                symbols.p,
                spec.n(),
                spec.p()
            )));
        }
        let unitary_part = match family {
            Some(f) if f.size() > 0 => theta_unitary_from_unitaries(f, spec)?,
            _ => vec![CMatrix::zeros(0, 0); spec.n()],
        };
        let pure_part = build_toeplitz(symbols, cutoff)?;
        let ru = unitary_part[0].nrows();
        let dim = ru + pure_part.dim();
        if mixing.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!("mixing unitary must be {dim}x{dim}")));
        }
        let n = spec.n();
        let operators = (0..n)
            .map(|i| {
                let pure = if i + 1 < n { &pure_part.t_phi[i] } else { &pure_part.t_z };
                let mut m = CMatrix::zeros(dim, dim);
                m.view_mut((0, 0), (ru, ru)).copy_from(&unitary_part[i]);
                m.view_mut((ru, ru), (pure.nrows(), pure.nrows())).copy_from(pure);
                &mixing * m * mixing.adjoint()
            })
            .collect();
        Ok(Self {
            spec: *spec,
            unitary_part,
            pure_part,
            mixing,
            operators,
        })
    }

    pub fn unitary_dim(&self) -> usize {
        self.unitary_part[0].nrows()
    }

    /// Orthogonal projection onto the declared unitary summand.
    pub fn declared_projection(&self) -> CMatrix {
        let w = self.mixing.columns(0, self.unitary_dim());
        w * w.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WoldReport {
    pub relation_residual: f64,
    pub isometry_residual: f64,
    pub recovered_unitary_dim: usize,
    pub declared_unitary_dim: usize,
    pub stabilized_at: usize,
    pub projection_error: f64,
    pub symmetry: CheckResult,
    pub commutation: CheckResult,
    pub toeplitz_relation_residual: f64,
    pub passed: bool,
}

/// (a) the Wold relations on the interior window, in unmixed coordinates;
/// (b) ∩_k range(Tₙ^k) until the rank stabilizes, compared with the declared
/// unitary summand; (c) the pure summand's symbol checks.
pub fn wold_verify(model: &WoldModel, tol: f64) -> WoldReport {
    let n = model.spec.n();
    let ru = model.unitary_dim();
    let pure = &model.pure_part;
    let unmixed: Vec<CMatrix> = model
        .operators
        .iter()
        .map(|m| model.mixing.adjoint() * m * &model.mixing)
        .collect();
    let w = pure.interior();
    let keep: Vec<usize> = (0..ru).chain(w.start + ru..w.end + ru).collect();
    let restrict = |m: &CMatrix| CMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);

    let tn = &unmixed[n - 1];
    let tp = matrix_power(tn, model.spec.p());
    let relation_residual = (1..n)
        .map(|j| {
            max_abs(&restrict(
                &(tp.adjoint() * &unmixed[j - 1] - unmixed[n - j - 1].adjoint()),
            ))
        })
        .fold(0.0, f64::max);
    let dim = tn.nrows();
    let isometry_residual = max_abs(&restrict(&(tn.adjoint() * tn - CMatrix::identity(dim, dim))));

    // ranges of Tₙ^k are nested, so the intersection up to K is range(Tₙ^K)
    let t = &model.operators[n - 1];
    let mut power = CMatrix::identity(dim, dim);
    let mut prev_rank = usize::MAX;
    let mut basis = CMatrix::identity(dim, dim);
    let mut stabilized_at = 0;
    for k in 1..=pure.cutoff + 3 {
        power = t * power;
        basis = orthonormal_range(&power, 1e-8);
        let rank = basis.ncols();
        if rank == prev_rank {
            stabilized_at = k - 1;
            break;
        }
        prev_rank = rank;
        stabilized_at = k;
    }
    let recovered = &basis * basis.adjoint();
    let projection_error = max_abs(&(recovered - model.declared_projection()));

    let symmetry = check_symmetry(&pure.symbols, tol);
    let commutation = check_commutation(&pure.symbols, tol);
    let toeplitz_relation_residual = pure.relation_residual();
    let passed = relation_residual <= tol
        && isometry_residual <= tol
        && basis.ncols() == ru
        && projection_error <= 1e-8
        && symmetry.passed
        && commutation.passed
        && toeplitz_relation_residual <= tol;
    WoldReport {
        relation_residual,
        isometry_residual,
        recovered_unitary_dim: basis.ncols(),
        declared_unitary_dim: ru,
        stabilized_at,
        projection_error,
        symmetry,
        commutation,
        toeplitz_relation_residual,
        passed,
    }
}

/// Θ(z) = Σ_ℓ Θ_ℓ z^ℓ with rectangular coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub coeffs: Vec<CMatrix>,
}

impl PolyMatrix {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let shape = coeffs.first().map(|m| m.shape()).unwrap_or((0, 0));
        if coeffs.iter().any(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch("coefficients of unequal shape".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs.first().map(|m| m.shape()).unwrap_or((0, 0))
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        let (r, c) = self.shape();
        let mut out = CMatrix::zeros(r, c);
        let mut zk = ONE;
        for m in &self.coeffs {
            out += m * zk;
            zk *= z;
        }
        out
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        let (r, _) = self.shape();
        let (_, c) = other.shape();
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![CMatrix::zeros(r, c); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PolyMatrix { coeffs }
    }

    fn from_symbol(s: &SymbolTuple, i: usize) -> PolyMatrix {
        PolyMatrix { coeffs: s.a[i].clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwiningWitness {
    pub symbol: usize,
    pub power: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSubspaceReport {
    pub inner_residual: f64,
    pub intertwining_residual: f64,
    pub witness: Option<IntertwiningWitness>,
    pub psi_symmetry: CheckResult,
    pub psi_commutation: CheckResult,
    pub psi_falsifier: FalsifierVerdict,
    pub passed: bool,
}

/// (a) Θ(z)*Θ(z) = I on sampled points of 𝕋; (b) Φ_iΘ = ΘΨ_i coefficient by
/// coefficient; (c) Ψ passes the pure-isometry symbol checks.
pub fn invariant_subspace_verify(
    theta: &PolyMatrix,
    phi: &SymbolTuple,
    psi: &SymbolTuple,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<InvariantSubspaceReport> {
    let (rows, cols) = theta.shape();
    if rows != phi.r || cols != psi.r || phi.n != psi.n {
        return Err(Error::DimensionMismatch(format!(
            "Θ is {rows}x{cols}, Φ acts on dimension {}, Ψ on {}",
            phi.r, psi.r
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = CMatrix::identity(cols, cols);
    let inner_residual = (0..samples)
        .map(|_| {
            let z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let t = theta.eval(z);
            max_abs(&(t.adjoint() * t - &id))
        })
        .fold(0.0, f64::max);

    let mut witness: Option<IntertwiningWitness> = None;
    for i in 0..phi.n - 1 {
        let lhs = PolyMatrix::from_symbol(phi, i).mul(theta);
        let rhs = theta.mul(&PolyMatrix::from_symbol(psi, i));
        let len = lhs.coeffs.len().max(rhs.coeffs.len());
        for power in 0..len {
            let a = lhs
                .coeffs
                .get(power)
                .cloned()
                .unwrap_or_else(|| CMatrix::zeros(rows, cols));
            let b = rhs
                .coeffs
                .get(power)
                .cloned()
                .unwrap_or_else(|| CMatrix::zeros(rows, cols));
            let residual = max_abs(&(a - b));
            if witness.as_ref().is_none_or(|w| residual > w.residual) {
                witness = Some(IntertwiningWitness {
                    symbol: i,
                    power,
                    residual,
                });
            }
        }
    }
    let intertwining_residual = witness.as_ref().map_or(0.0, |w| w.residual);
    let witness = witness.filter(|w| w.residual > tol);
    let psi_symmetry = check_symmetry(psi, tol);
    let psi_commutation = check_commutation(psi, tol);
    let psi_falsifier = gamma_contraction_falsifier(psi, &FalsifierConfig::new(seed));
    let passed = inner_residual <= tol
        && witness.is_none()
        && psi_symmetry.passed
        && psi_commutation.passed
        && matches!(psi_falsifier, FalsifierVerdict::NoViolationFound { .. });
    Ok(InvariantSubspaceReport {
        inner_residual,
        intertwining_residual,
        witness,
        psi_symmetry,
        psi_commutation,
        psi_falsifier,
        passed,
    })
}

/// Checks on a symbol tuple and its Toeplitz truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureIsometryReport {
    pub symmetry: CheckResult,
    pub commutation: CheckResult,
    pub falsifier: FalsifierVerdict,
    pub cutoff: usize,
    pub toeplitz_relation_residual: f64,
    pub toeplitz_isometry_residual: f64,
    pub toeplitz_commutation_residual: f64,
    pub passed: bool,
}

pub fn certify_pure_isometry(s: &SymbolTuple, cutoff: usize, tol: f64, seed: u64) -> Result<PureIsometryReport> {
    let toeplitz = build_toeplitz(s, cutoff)?;
    let symmetry = check_symmetry(s, tol);
    let commutation = check_commutation(s, tol);
    let falsifier = gamma_contraction_falsifier(s, &FalsifierConfig::new(seed));
    let toeplitz_relation_residual = toeplitz.relation_residual();
    let toeplitz_isometry_residual = toeplitz.isometry_residual();
    let toeplitz_commutation_residual = toeplitz.commutation_residual();
    let passed = symmetry.passed
        && commutation.passed
        && matches!(falsifier, FalsifierVerdict::NoViolationFound { .. })
        && toeplitz_relation_residual <= tol
        && toeplitz_isometry_residual <= tol
        && toeplitz_commutation_residual <= tol;
    Ok(PureIsometryReport {
        symmetry,
        commutation,
        falsifier,
        cutoff,
        toeplitz_relation_residual,
        toeplitz_isometry_residual,
        toeplitz_commutation_residual,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{shilov_boundary_test, ThetaPoint};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(x: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, x)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn random_theta_unitary_verifies() {
        for spec in [GroupSpec::symmetric(3).unwrap(), GroupSpec::new(3, 3, 2).unwrap()] {
            let t = random_theta_unitary(&spec, 4, 9).unwrap();
            assert!(max_abs(&t[0]) > 0.0 && t[0][(0, 1)].norm() > 1e-6);
            let rep = verify_theta_unitary(&t, &spec, 1e-11).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert_eq!(random_theta_unitary(&spec, 4, 9).unwrap(), t);
        }
    }

    #[test]
    fn pencil_certifies_and_shifted_symbol_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = hermitian_pencil_symbol(2, 1.0, &mut rng);
        let rep = certify_pure_isometry(&s, 12, 1e-10, 1).unwrap();
        assert!(rep.passed, "{rep:?}");
        let mut bad = s.clone();
        bad.a[0][1] += CMatrix::identity(2, 2) * Complex64::new(5.0, 0.0);
        let rep = certify_pure_isometry(&bad, 12, 1e-10, 1).unwrap();
        assert!(!rep.passed);
        assert!(matches!(rep.falsifier, FalsifierVerdict::Violation(_)));
        assert!(certify_pure_isometry(&s, 3, 1e-10, 1).is_err());
    }

    #[test]
    fn theta_unitary_examples() {
        let s = GroupSpec::new(1, 1, 2).unwrap();
        let fam = CommutingUnitaryFamily::new(vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let t = theta_unitary_from_unitaries(&fam, &s).unwrap();
        assert!((t[0][(0, 0)] - c(1.0, 1.0)).norm() < 1e-15);
        assert!((t[1][(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((t[1][(0, 0)].conj() * t[0][(0, 0)] - t[0][(0, 0)].conj()).norm() < 1e-15);

        let s3 = GroupSpec::new(1, 1, 3).unwrap();
        let fam = CommutingUnitaryFamily::new(vec![vec![c(1.0, 0.0); 2]; 3]).unwrap();
        let t = theta_unitary_from_unitaries(&fam, &s3).unwrap();
        assert_eq!(t[0], CMatrix::identity(2, 2) * c(3.0, 0.0));
        assert_eq!(t[1], CMatrix::identity(2, 2) * c(3.0, 0.0));
        assert_eq!(t[2], CMatrix::identity(2, 2));

        assert!(CommutingUnitaryFamily::new(vec![vec![c(0.5, 0.0)]]).is_err());
    }

    #[test]
    fn verify_examples() {
        let mut r = rng(3);
        for (m, p, n) in [(1, 1, 2), (2, 1, 2), (2, 2, 3), (3, 3, 3)] {
            let s = GroupSpec::new(m, p, n).unwrap();
            let fam = CommutingUnitaryFamily::random(n, 4, &mut r);
            let t = theta_unitary_from_unitaries(&fam, &s).unwrap();
            let rep = verify_theta_unitary(&t, &s, 1e-11).unwrap();
            assert!(rep.passed, "{s} {rep:?}");
            for ev in &rep.joint_eigenvalues {
                assert!(shilov_boundary_test(&ThetaPoint::new(ev.clone(), p), DEFAULT_TOL).verdict);
            }

            let mut shrunk = t.clone();
            shrunk[n - 1] *= c(0.9, 0.0);
            let rep = verify_theta_unitary(&shrunk, &s, 1e-11).unwrap();
            assert!(!rep.passed && rep.unitary_residual > 0.1);

            let mut bumped = t.clone();
            bumped[0] += random_matrix(4, 4, &mut r) * c(1e-3, 0.0);
            let rep = verify_theta_unitary(&bumped, &s, 1e-11).unwrap();
            assert!(!rep.passed && rep.relation_residual > 1e-5);
        }
    }

    #[test]
    fn joint_spectrum_errors() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(joint_spectrum(&[a], 1e-12), Err(Error::NotNormal(_))));
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(matches!(joint_spectrum(&[x, z], 1e-12), Err(Error::NotCommuting(_))));
    }

    fn pencil(a0: CMatrix, a1: CMatrix) -> SymbolTuple {
        let a2 = a0.adjoint();
        SymbolTuple::new(2, 2, a0.nrows(), vec![vec![a0, a1, a2]]).unwrap()
    }

    #[test]
    fn symmetry_examples() {
        let mut r = rng(5);
        let s = hermitian_pencil_symbol(2, 2.0, &mut r);
        assert!(check_symmetry(&s, 1e-12).passed);
        let a0 = random_matrix(2, 2, &mut r);
        let bad = pencil(
            a0,
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        );
        assert!(!check_symmetry(&bad, 1e-12).passed);
        assert!(check_symmetry(&SymbolTuple::zero(2, 3, 2), 0.0).passed);
    }

    #[test]
    fn commutation_examples() {
        let mut r = rng(6);
        let mut scalars = SymbolTuple::zero(1, 3, 1);
        for phi in &mut scalars.a {
            for m in phi.iter_mut() {
                *m = random_matrix(1, 1, &mut r);
            }
        }
        assert!(check_commutation(&scalars, 1e-14).passed);
        let mut diag = SymbolTuple::zero(1, 3, 3);
        for phi in &mut diag.a {
            for m in phi.iter_mut() {
                *m = CMatrix::from_diagonal(&random_matrix(3, 1, &mut r).column(0).into_owned());
            }
        }
        assert!(check_commutation(&diag, 1e-14).passed);
        let mut generic = SymbolTuple::zero(1, 3, 2);
        for phi in &mut generic.a {
            for m in phi.iter_mut() {
                *m = random_matrix(2, 2, &mut r);
            }
        }
        assert!(!check_commutation(&generic, 1e-6).passed);
    }

    #[test]
    fn falsifier_examples() {
        // Φ(z) = z: γ₁Φ₁ = z/2 stays in the disk
        let z = SymbolTuple::new(2, 2, 1, vec![vec![scalar(ZERO), scalar(ONE), scalar(ZERO)]]).unwrap();
        assert!(matches!(
            gamma_contraction_falsifier(&z, &FalsifierConfig::new(1)),
            FalsifierVerdict::NoViolationFound { .. }
        ));
        let ten = SymbolTuple::new(0, 2, 2, vec![vec![CMatrix::identity(2, 2) * c(10.0, 0.0)]]).unwrap();
        match gamma_contraction_falsifier(&ten, &FalsifierConfig::new(1)) {
            FalsifierVerdict::Violation(w) => assert!(w.operator_norm > w.certified_bound),
            v => panic!("expected a violation, got {v:?}"),
        }
        assert!(matches!(
            gamma_contraction_falsifier(&SymbolTuple::zero(1, 3, 2), &FalsifierConfig::new(2)),
            FalsifierVerdict::NoViolationFound { .. }
        ));
    }

    #[test]
    fn pencil_symbols_are_gamma_contractions() {
        let mut r = rng(8);
        for seed in 0..5 {
            let s = hermitian_pencil_symbol(2, 2.0, &mut r);
            assert!(matches!(
                gamma_contraction_falsifier(&s, &FalsifierConfig::new(seed)),
                FalsifierVerdict::NoViolationFound { .. }
            ));
        }
    }

    #[test]
    fn toeplitz_examples() {
        let z = SymbolTuple::new(1, 2, 1, vec![vec![scalar(ZERO), scalar(ONE)]]).unwrap();
        let t = build_toeplitz(&z, 6).unwrap();
        assert_eq!(t.t_phi[0], t.t_z);

        let mut r = rng(9);
        let s = hermitian_pencil_symbol(2, 2.0, &mut r);
        let t = build_toeplitz(&s, 20).unwrap();
        assert!(t.relation_residual() <= 1e-12);
        assert!(t.isometry_residual() == 0.0);
        assert!(t.commutation_residual() <= 1e-12);
        assert!(matches!(build_toeplitz(&s, 3), Err(Error::WindowTooSmall(_))));

        // a commuting pair of symbols for n = 3, p = 1
        let d = |x: f64, y: f64| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(x, 0.0), c(y, 0.0)]));
        let s3 = SymbolTuple::new(
            1,
            3,
            2,
            vec![vec![d(0.5, 0.2), d(0.1, 0.3)], vec![d(0.1, 0.3), d(0.5, 0.2)]],
        )
        .unwrap();
        assert!(check_symmetry(&s3, 1e-15).passed && check_commutation(&s3, 1e-15).passed);
        let t3 = build_toeplitz(&s3, 10).unwrap();
        assert!(t3.commutation_residual() <= 1e-15);
        assert!(t3.relation_residual() <= 1e-15);
    }

    #[test]
    fn word_trace_examples() {
        let mut r = rng(10);
        let s = hermitian_pencil_symbol(2, 2.0, &mut r);
        let u = random_unitary(2, &mut r);
        assert!(matches!(
            word_trace_equivalence(&s, &s.conjugated(&u), 4, 1e-9).unwrap(),
            WordTraceVerdict::Consistent { .. }
        ));
        let one = SymbolTuple::new(0, 2, 1, vec![vec![scalar(ONE)]]).unwrap();
        let minus = SymbolTuple::new(0, 2, 1, vec![vec![scalar(-ONE)]]).unwrap();
        match word_trace_equivalence(&one, &minus, 3, 1e-9).unwrap() {
            WordTraceVerdict::Distinguished { word, .. } => assert_eq!(word.len(), 1),
            v => panic!("{v:?}"),
        }
        // same spectra letter by letter, different joint structure
        let e11 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO]));
        let e22 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ZERO, ONE]));
        let s1 = SymbolTuple::new(1, 2, 2, vec![vec![e11.clone(), e22]]).unwrap();
        let s2 = SymbolTuple::new(1, 2, 2, vec![vec![e11.clone(), e11]]).unwrap();
        match word_trace_equivalence(&s1, &s2, 4, 1e-9).unwrap() {
            WordTraceVerdict::Distinguished { word, .. } => assert!(word.len() <= 4),
            v => panic!("{v:?}"),
        }
        let other = SymbolTuple::zero(1, 2, 3);
        assert!(matches!(
            word_trace_equivalence(&s1, &other, 2, 1e-9),
            Err(Error::ShapeMismatch(_))
        ));
    }

    fn g222() -> GroupSpec {
        GroupSpec::new(2, 2, 2).unwrap()
    }

    #[test]
    fn wold_examples() {
        let mut r = rng(11);
        let s = hermitian_pencil_symbol(1, 2.0, &mut r);
        let fam = CommutingUnitaryFamily::random(2, 2, &mut r);
        let cutoff = 6;

        let dim = 2 + cutoff + 1;
        let model = WoldModel::new(&g222(), Some(&fam), &s, cutoff, random_unitary(dim, &mut r)).unwrap();
        let rep = wold_verify(&model, 1e-10);
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.recovered_unitary_dim, 2);

        let shift_only = WoldModel::new(&g222(), None, &s, cutoff, random_unitary(cutoff + 1, &mut r)).unwrap();
        let rep = wold_verify(&shift_only, 1e-10);
        assert!(rep.passed && rep.recovered_unitary_dim == 0, "{rep:?}");
    }

    #[test]
    fn wold_unitary_only_keeps_everything() {
        let mut r = rng(12);
        let fam = CommutingUnitaryFamily::random(2, 3, &mut r);
        let t = theta_unitary_from_unitaries(&fam, &g222()).unwrap();
        let power = matrix_power(&t[1], 5);
        assert_eq!(power.svd(false, false).rank(1e-8), 3);
    }

    #[test]
    fn invariant_subspace_examples() {
        let mut r = rng(13);
        let phi = hermitian_pencil_symbol(2, 2.0, &mut r);
        let id = PolyMatrix::new(vec![CMatrix::identity(2, 2)]).unwrap();
        assert!(invariant_subspace_verify(&id, &phi, &phi, 16, 1e-10, 1).unwrap().passed);

        let scalar_phi = hermitian_pencil_symbol(1, 2.0, &mut r);
        let zi = PolyMatrix::new(vec![scalar(ZERO), scalar(ONE)]).unwrap();
        assert!(
            invariant_subspace_verify(&zi, &scalar_phi, &scalar_phi, 16, 1e-10, 1)
                .unwrap()
                .passed
        );

        let diag_z1 = PolyMatrix::new(vec![
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ZERO, ONE])),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO])),
        ])
        .unwrap();
        let rep = invariant_subspace_verify(&diag_z1, &phi, &phi, 16, 1e-10, 1).unwrap();
        assert!(rep.inner_residual < 1e-12);
        assert!(!rep.passed && rep.witness.is_some());

        let wrong = PolyMatrix::new(vec![CMatrix::identity(3, 2)]).unwrap();
        assert!(matches!(
            invariant_subspace_verify(&wrong, &phi, &phi, 4, 1e-10, 1),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn symbol_json_round_trip() {
        let mut r = rng(14);
        let s = hermitian_pencil_symbol(2, 2.0, &mut r);
        let back = SymbolTuple::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(matches!(SymbolTuple::from_json("{\"p\":1}"), Err(Error::Parse(_))));
        let bad = r#"{"p":0,"n":2,"r":2,"A":[[[[[1,0]]]]]}"#;
        assert!(matches!(SymbolTuple::from_json(bad), Err(Error::ShapeMismatch(_))));
    }

    proptest! {
        #[test]
        fn constructed_unitaries_verify(seed in any::<u64>(), which in 0usize..8, size in 1usize..5) {
            let (m, p) = [(1, 1), (2, 1), (2, 2), (3, 3)][which % 4];
            let n = 2 + which / 4;
            let s = GroupSpec::new(m, p, n).unwrap();
            let mut r = rng(seed);
            let fam = CommutingUnitaryFamily::random(n, size, &mut r);
            let t = theta_unitary_from_unitaries(&fam, &s).unwrap();
            let rep = verify_theta_unitary(&t, &s, 1e-11).unwrap();
            prop_assert!(rep.passed);
            for ev in &rep.joint_eigenvalues {
                prop_assert!(shilov_boundary_test(&ThetaPoint::new(ev.clone(), p), DEFAULT_TOL).verdict);
            }
        }

        #[test]
        fn conjugation_never_distinguishes(seed in any::<u64>()) {
            let mut r = rng(seed);
            let s = hermitian_pencil_symbol(2, 2.0, &mut r);
            let u = random_unitary(2, &mut r);
            let v = word_trace_equivalence(&s, &s.conjugated(&u), 3, 1e-9).unwrap();
            let consistent = matches!(v, WordTraceVerdict::Consistent { .. });
            prop_assert!(consistent);
        }
    }
}
