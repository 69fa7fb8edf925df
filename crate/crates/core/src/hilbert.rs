//! Truncated weighted Bergman and Hardy modules on the polydisc.
//!
//! Everything is expressed in the orthonormal monomial basis z^α/‖z^α‖ over a
//! degree window {|α| ≤ D}. Group elements permute monomials up to phases and
//! preserve their norms, so projections are block diagonal by degree and exact.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::characters::{character, irreps_of, representation_matrix, sign_irrep, IrrepLabel};
use crate::error::{Error, Result};
use crate::groups::{generate_group, root_of_unity, GroupElement, GroupSpec, DEFAULT_GROUP_CAP};
use crate::linalg::orthonormal_range;
use crate::poly::{exponents_up_to, jacobian, theta_map, weighted_exponents, MultiPoly};

/// Matrix-level tolerance for projection identities.
pub const MATRIX_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default degree window: 12 for two variables, 9 for three or more.
pub fn default_window(n: usize) -> u32 {
    if n <= 2 {
        12
    } else {
        9
    }
}

/// Rising factorial (λ)_k as a running product.
pub fn pochhammer(lambda: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (lambda + j as f64))
}

/// ‖z^α‖² = ∏ α_i!/(λ)_{α_i}.
pub fn monomial_norm2(alpha: &[u32], lambda: f64) -> f64 {
    alpha
        .iter()
        .map(|&a| (1..=a).fold(1.0, |acc, j| acc * j as f64 / (lambda + (j - 1) as f64)))
        .product()
}

/// ‖f‖² from the monomial norms; monomials are mutually orthogonal.
pub fn poly_norm2(f: &MultiPoly, lambda: f64) -> f64 {
    f.terms().map(|(e, c)| c.norm_sqr() * monomial_norm2(e, lambda)).sum()
}

/// K_λ(z, w) = ∏ (1 − z_i w̄_i)^{−λ}.
pub fn kernel_eval(z: &[Complex64], w: &[Complex64], lambda: f64) -> Result<Complex64> {
    if z.len() != w.len() {
        return Err(Error::ArityMismatch {
            expected: z.len(),
            got: w.len(),
        });
    }
    if z.iter().chain(w).any(|x| x.norm() >= 1.0) {
        return Err(Error::DomainViolation);
    }
    Ok(z.iter()
        .zip(w)
        .map(|(a, b)| (Complex64::new(1.0, 0.0) - a * b.conj()).powf(-lambda))
        .product())
}

/// Σ_{|α| ≤ D} z^α·conj(w^α)/‖z^α‖², the truncated kernel expansion.
pub fn kernel_series(z: &[Complex64], w: &[Complex64], lambda: f64, max_degree: u32) -> Complex64 {
    exponents_up_to(z.len(), max_degree)
        .iter()
        .map(|a| {
            let mono = |x: &[Complex64]| -> Complex64 { x.iter().zip(a).map(|(v, &e)| v.powu(e)).product() };
            mono(z) * mono(w).conj() / monomial_norm2(a, lambda)
        })
        .sum()
}

/// The module over the window {|α| ≤ D}, basis in graded-lex order.
#[derive(Debug, Clone)]
pub struct ModuleTruncation {
    pub n: usize,
    pub lambda: f64,
    pub max_degree: u32,
    pub basis: Vec<Vec<u32>>,
    pub norms: Vec<f64>,
    index: HashMap<Vec<u32>, usize>,
}

impl ModuleTruncation {
    pub fn new(n: usize, lambda: f64, max_degree: u32) -> Result<Self> {
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(Error::PreconditionFailed(format!("lambda must be >= 1, got {lambda}")));
        }
        if n == 0 {
            return Err(Error::PreconditionFailed("need at least one variable".into()));
        }
        let basis = exponents_up_to(n, max_degree);
        let norms = basis.iter().map(|a| monomial_norm2(a, lambda)).collect();
        let index = basis.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(Self {
            n,
            lambda,
            max_degree,
            basis,
            norms,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    /// Number of basis vectors of degree ≤ d; they form a prefix of the basis.
    pub fn window_len(&self, d: u32) -> usize {
        self.basis.partition_point(|a| a.iter().sum::<u32>() <= d)
    }

    /// Index range of the homogeneous degree-d monomials.
    pub fn degree_range(&self, d: u32) -> std::ops::Range<usize> {
        let start = if d == 0 { 0 } else { self.window_len(d - 1) };
        start..self.window_len(d)
    }

    /// Orthonormal coordinates of f; fails if f leaves the window.
    pub fn coords(&self, f: &MultiPoly) -> Result<DVector<Complex64>> {
        let mut v = DVector::zeros(self.len());
        for (e, c) in f.terms() {
            let i = self.index_of(e).ok_or(Error::DegreeOverflow {
                degree: e.iter().sum::<u32>() as usize,
                cap: self.max_degree as usize,
            })?;
            v[i] = c * self.norms[i].sqrt();
        }
        Ok(v)
    }

    /// Polynomial with orthonormal coordinates v (a prefix of the basis).
    pub fn to_poly(&self, v: &DVector<Complex64>) -> MultiPoly {
        let mut f = MultiPoly::zero(self.n);
        for (i, c) in v.iter().enumerate() {
            if *c != ZERO {
                f.add_term(self.basis[i].clone(), c / self.norms[i].sqrt());
            }
        }
        f
    }
}

/// Dense matrix between two degree windows of the same truncation; rows index
/// {|β| ≤ target_degree}, columns {|α| ≤ source_degree}.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub source_degree: u32,
    pub target_degree: u32,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone)]
pub struct IsotypicProjection {
    pub irrep: IrrepLabel,
    /// Matrix-entry indices (0-based) for P_ϱ^{ij}; None for the full P_ϱ.
    pub entry: Option<(usize, usize)>,
    pub matrix: OperatorMatrix,
}

impl IsotypicProjection {
    pub fn rank(&self) -> usize {
        // trace of an orthogonal projection
        self.matrix.matrix.trace().re.round() as usize
    }
}

fn group_and_check(spec: &GroupSpec, trunc: &ModuleTruncation, irrep: &IrrepLabel) -> Result<Vec<GroupElement>> {
    if trunc.n != spec.n() {
        return Err(Error::ArityMismatch {
            expected: spec.n(),
            got: trunc.n,
        });
    }
    let irreps = irreps_of(spec)?;
    if !irreps.contains(irrep) {
        return Err(Error::UnsupportedIrrep(format!("{irrep} for {spec}")));
    }
    generate_group(spec, DEFAULT_GROUP_CAP)
}

/// (d/|G|) Σ_σ w(σ) R(σ) with R(σ)f = f∘σ⁻¹ in matrix terms, a homomorphism.
fn averaged_action<F>(
    elements: &[GroupElement],
    trunc: &ModuleTruncation,
    degree: usize,
    weight: F,
) -> DMatrix<Complex64>
where
    F: Fn(&GroupElement) -> Complex64,
{
    let n = trunc.len();
    let mut p = DMatrix::zeros(n, n);
    let scale = degree as f64 / elements.len() as f64;
    for g in elements {
        let w = weight(g) * scale;
        if w == ZERO {
            continue;
        }
        let inv = g.inverse();
        for (col, alpha) in trunc.basis.iter().enumerate() {
            let (beta, k) = inv.act_on_exponent(alpha);
            let row = trunc.index[&beta];
            p[(row, col)] += w * root_of_unity(g.m(), k as i64);
        }
    }
    p
}

/// P_ϱ = (deg ϱ/|G|) Σ_σ χ_ϱ(σ⁻¹) f(σ⁻¹z) on the whole window.
pub fn projection_matrix(irrep: &IrrepLabel, trunc: &ModuleTruncation, spec: &GroupSpec) -> Result<IsotypicProjection> {
    let elements = group_and_check(spec, trunc, irrep)?;
    let matrix = averaged_action(&elements, trunc, irrep.degree(), |g| character(irrep, g).conj());
    Ok(IsotypicProjection {
        irrep: irrep.clone(),
        entry: None,
        matrix: OperatorMatrix {
            source_degree: trunc.max_degree,
            target_degree: trunc.max_degree,
            matrix,
        },
    })
}

/// P_ϱ^{ij} = (deg ϱ/|G|) Σ_σ π_ϱ^{ji}(σ⁻¹) f(σ⁻¹z); indices are 0-based.
pub fn projection_ij_matrix(
    irrep: &IrrepLabel,
    i: usize,
    j: usize,
    trunc: &ModuleTruncation,
    spec: &GroupSpec,
) -> Result<IsotypicProjection> {
    let elements = group_and_check(spec, trunc, irrep)?;
    let d = irrep.degree();
    if i >= d || j >= d {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            max: d - 1,
        });
    }
    let mut reps = Vec::with_capacity(elements.len());
    for g in &elements {
        reps.push(representation_matrix(irrep, &g.inverse())?[(j, i)]);
    }
    let lookup: HashMap<&GroupElement, Complex64> = elements.iter().zip(reps).collect();
    let matrix = averaged_action(&elements, trunc, d, |g| lookup[g]);
    Ok(IsotypicProjection {
        irrep: irrep.clone(),
        entry: Some((i, j)),
        matrix: OperatorMatrix {
            source_degree: trunc.max_degree,
            target_degree: trunc.max_degree,
            matrix,
        },
    })
}

/// Every P_ϱ^{ii} for the supported irreps of the group, in table order.
pub fn diagonal_blocks(trunc: &ModuleTruncation, spec: &GroupSpec) -> Result<Vec<IsotypicProjection>> {
    let mut out = Vec::new();
    for irrep in irreps_of(spec)? {
        for i in 0..irrep.degree() {
            out.push(projection_ij_matrix(&irrep, i, i, trunc, spec)?);
        }
    }
    Ok(out)
}

/// Number of diagonal blocks P_ϱ^{ii} that are nonzero on the window.
pub fn nonzero_block_count(trunc: &ModuleTruncation, spec: &GroupSpec) -> Result<usize> {
    Ok(diagonal_blocks(trunc, spec)?.iter().filter(|p| p.rank() > 0).count())
}

/// Multiplication by `poly` from {|α| ≤ source_degree} into the full window:
/// entry(β, α) = [z^β](poly·z^α)·‖z^β‖/‖z^α‖ in orthonormal coordinates.
pub fn mult_operator_window(poly: &MultiPoly, trunc: &ModuleTruncation, source_degree: u32) -> Result<OperatorMatrix> {
    if poly.num_vars() != trunc.n {
        return Err(Error::ArityMismatch {
            expected: trunc.n,
            got: poly.num_vars(),
        });
    }
    let deg = poly.degree().unwrap_or(0);
    if deg + source_degree > trunc.max_degree {
        return Err(Error::DegreeOverflow {
            degree: (deg + source_degree) as usize,
            cap: trunc.max_degree as usize,
        });
    }
    let cols = trunc.window_len(source_degree);
    let mut m = DMatrix::zeros(trunc.len(), cols);
    for col in 0..cols {
        let alpha = &trunc.basis[col];
        for (e, c) in poly.terms() {
            let beta: Vec<u32> = alpha.iter().zip(e).map(|(a, b)| a + b).collect();
            let row = trunc.index[&beta];
            m[(row, col)] += c * (trunc.norms[row] / trunc.norms[col]).sqrt();
        }
    }
    Ok(OperatorMatrix {
        source_degree,
        target_degree: trunc.max_degree,
        matrix: m,
    })
}

/// Multiplication by `poly` on the largest window where it is exact.
pub fn mult_operator_matrix(poly: &MultiPoly, trunc: &ModuleTruncation) -> Result<OperatorMatrix> {
    let deg = poly.degree().unwrap_or(0);
    if deg > trunc.max_degree {
        return Err(Error::DegreeOverflow {
            degree: deg as usize,
            cap: trunc.max_degree as usize,
        });
    }
    mult_operator_window(poly, trunc, trunc.max_degree - deg)
}

/// Orthonormal basis of the range of a degree-preserving projection, built
/// degree by degree so that every basis vector is homogeneous. Returns the
/// basis columns (over the first window_len(max_degree) coordinates) and the
/// degree of each column.
pub fn range_basis(
    p: &DMatrix<Complex64>,
    trunc: &ModuleTruncation,
    max_degree: u32,
) -> (DMatrix<Complex64>, Vec<u32>) {
    let len = trunc.window_len(max_degree);
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    let mut degrees = Vec::new();
    for d in 0..=max_degree {
        let r = trunc.degree_range(d);
        if r.is_empty() {
            continue;
        }
        let block = p.view((r.start, r.start), (r.len(), r.len())).into_owned();
        // columns of a projection have norm ≤ 1, range directions far above the cut
        let q = orthonormal_range(&block, 1e-6);
        for k in 0..q.ncols() {
            let mut v = DVector::zeros(len);
            v.rows_mut(r.start, r.len()).copy_from(&q.column(k));
            cols.push(v);
            degrees.push(d);
        }
    }
    let basis = if cols.is_empty() {
        DMatrix::zeros(len, 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    (basis, degrees)
}

/// The tuple (M_{θ₁}, …, M_{θₙ}) restricted to the range of P_ϱ^{ii}, as
/// matrices from the range on {deg ≤ D − max deg θ_k} to the range on {deg ≤ D}.
#[derive(Debug, Clone)]
pub struct RestrictedTuple {
    pub irrep: IrrepLabel,
    pub index: usize,
    pub source_degree: u32,
    pub target_degree: u32,
    pub source_basis: DMatrix<Complex64>,
    pub target_basis: DMatrix<Complex64>,
    pub operators: Vec<DMatrix<Complex64>>,
}

pub fn restricted_tuple(
    spec: &GroupSpec,
    irrep: &IrrepLabel,
    i: usize,
    trunc: &ModuleTruncation,
) -> Result<RestrictedTuple> {
    let tm = theta_map(spec)?;
    let top = *tm.degrees().iter().max().expect("n >= 2");
    if top > trunc.max_degree {
        return Err(Error::WindowTooSmall(format!(
            "window degree {} is below deg θ = {top}",
            trunc.max_degree
        )));
    }
    let source_degree = trunc.max_degree - top;
    let proj = projection_ij_matrix(irrep, i, i, trunc, spec)?;
    let (target_basis, _) = range_basis(&proj.matrix.matrix, trunc, trunc.max_degree);
    let (source_basis, _) = range_basis(&proj.matrix.matrix, trunc, source_degree);
    let operators = tm
        .components
        .iter()
        .map(|t| {
            let m = mult_operator_window(t, trunc, source_degree)?;
            Ok(target_basis.adjoint() * m.matrix * &source_basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictedTuple {
        irrep: irrep.clone(),
        index: i,
        source_degree,
        target_degree: trunc.max_degree,
        source_basis,
        target_basis,
        operators,
    })
}

/// Lowest-degree vector of the range of P_ϱ^{ii}, normalized so that its
/// largest coefficient is real and positive with modulus one.
pub fn minimal_vector(spec: &GroupSpec, irrep: &IrrepLabel, i: usize, trunc: &ModuleTruncation) -> Result<MultiPoly> {
    let proj = projection_ij_matrix(irrep, i, i, trunc, spec)?;
    let (basis, degrees) = range_basis(&proj.matrix.matrix, trunc, trunc.max_degree);
    let Some(&d0) = degrees.first() else {
        return Err(Error::EmptyIsotype(trunc.max_degree as usize));
    };
    let dim = degrees.iter().filter(|&&d| d == d0).count();
    if dim > 1 {
        return Err(Error::NonUniqueMinimalVector {
            degree: d0 as usize,
            dim,
        });
    }
    let mut v = DVector::zeros(trunc.len());
    v.rows_mut(0, basis.nrows()).copy_from(&basis.column(0));
    let f = trunc.to_poly(&v).cleaned(1e-12);
    let (_, big) = f
        .terms()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("nonzero range vector");
    Ok(f.scale(big.norm() / big).scale(Complex64::new(1.0 / big.norm(), 0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEntry {
    /// Exponent of the invariant monomial q(w) = w^e.
    pub q: Vec<u32>,
    pub weighted_degree: u32,
    pub value: f64,
}

/// ‖q(θ)·v‖/‖v‖ for the minimal vector v of the isotype and every invariant
/// monomial q of weighted degree 1..=d.
pub fn moment_profile(
    spec: &GroupSpec,
    irrep: &IrrepLabel,
    i: usize,
    trunc: &ModuleTruncation,
    d: u32,
) -> Result<Vec<MomentEntry>> {
    let v = minimal_vector(spec, irrep, i, trunc)?;
    moment_profile_of(&v, spec, trunc.lambda, d)
}

/// The profile for a given vector; a ratio, so scaling v leaves it unchanged.
pub fn moment_profile_of(v: &MultiPoly, spec: &GroupSpec, lambda: f64, d: u32) -> Result<Vec<MomentEntry>> {
    let tm = theta_map(spec)?;
    let weights = tm.degrees();
    let base = poly_norm2(v, lambda);
    if base == 0.0 {
        return Err(Error::DegenerateInput("zero vector"));
    }
    let mut out = Vec::new();
    for wd in 1..=d {
        for e in weighted_exponents(&weights, wd) {
            let mut q = MultiPoly::one(spec.n());
            for (t, &k) in tm.components.iter().zip(&e) {
                q = &q * &t.pow(k);
            }
            let value = (poly_norm2(&(&q * v), lambda) / base).sqrt();
            out.push(MomentEntry {
                q: e,
                weighted_degree: wd,
                value,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DivisibilityWitness {
    pub vector: MultiPoly,
    pub quotient: Option<MultiPoly>,
}

#[derive(Debug, Clone)]
pub struct DivisibilityReport {
    pub jacobian: MultiPoly,
    pub all_divisible: bool,
    pub witnesses: Vec<DivisibilityWitness>,
}

/// Divides each spanning vector P_sign z^α of the sign isotype by the Jacobian
/// of θ and checks the quotient by multiplying back.
pub fn sign_isotype_divisibility(trunc: &ModuleTruncation, spec: &GroupSpec) -> Result<DivisibilityReport> {
    let tm = theta_map(spec)?;
    let jac = jacobian(&tm);
    let sign = sign_irrep(spec)?;
    let proj = projection_matrix(&sign, trunc, spec)?;
    let p = &proj.matrix.matrix;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut witnesses = Vec::new();
    for col in 0..trunc.len() {
        let column = p.column(col);
        let support: Vec<usize> = (0..trunc.len()).filter(|&r| column[r].norm() > MATRIX_TOL).collect();
        if support.is_empty() || !seen.insert(support) {
            continue;
        }
        let vector = trunc.to_poly(&column.into_owned()).cleaned(1e-12);
        let quotient = vector
            .divide_exact(&jac, 1e-10)
            .filter(|q| (q * &jac).approx_eq(&vector, 1e-12));
        witnesses.push(DivisibilityWitness { vector, quotient });
    }
    Ok(DivisibilityReport {
        all_divisible: witnesses.iter().all(|w| w.quotient.is_some()),
        jacobian: jac,
        witnesses,
    })
}

/// Largest entry modulus, used for residuals.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.norm()))
}
