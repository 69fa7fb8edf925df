//! Geometry of the closed quotient domain: membership through zero location,
//! distinguished-boundary tests, the projection onto the symmetrized polydisc
//! and the boundary recursion.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::poly::{theta_map, UniPoly};

pub const DEFAULT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Candidate point (θ₁, …, θₙ) together with the exponent p of its group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub coords: Vec<Complex64>,
    pub p: u32,
}

impl ThetaPoint {
    pub fn new(coords: Vec<Complex64>, p: u32) -> Self {
        Self { coords, p }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn last(&self) -> Complex64 {
        self.coords.last().copied().unwrap_or(ONE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Location {
    fn of_modulus(r: f64, tol: f64) -> Self {
        if r < 1.0 - tol {
            Location::Inside
        } else if r <= 1.0 + tol {
            Location::Boundary
        } else {
            Location::Outside
        }
    }

    pub fn in_closed_disk(self) -> bool {
        self != Location::Outside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub root: Complex64,
    pub modulus: f64,
    pub location: Location,
}

/// Outcome of a zero-location query. `location` comes from the Schur–Cohn
/// reduction, `companion_location` from companion-matrix eigenvalues, which
/// also supply the per-root data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskVerdict {
    pub location: Location,
    pub companion_location: Location,
    pub roots: Vec<RootInfo>,
    pub max_modulus: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    MemberInterior,
    MemberBoundary,
    Outside,
}

impl Membership {
    pub fn is_member(self) -> bool {
        self != Membership::Outside
    }
}

/// Σ_{i<n} (−1)^i θ_i z^{n−i} + (−1)^n θₙ^p with θ₀ = 1.
pub fn associated_poly(pt: &ThetaPoint) -> UniPoly {
    let n = pt.n();
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    for i in 1..n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - i] = pt.coords[i - 1] * sign;
    }
    if n > 0 {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        coeffs[0] = pt.coords[n - 1].powu(pt.p) * sign;
    }
    UniPoly::new(coeffs)
}

/// Schur–Cohn reduction: true iff every zero of f lies in the open unit disk.
/// Each step replaces f by (c̄_d f − c₀ f*)/z, which keeps the count of zeros in
/// the open disk below d exactly when |c₀| < |c_d|.
fn strictly_inside(f: &UniPoly) -> bool {
    let mut c: Vec<Complex64> = f.coeffs().to_vec();
    while c.len() > 1 {
        let d = c.len() - 1;
        let lead = c[d];
        let c0 = c[0];
        if c0.norm() >= lead.norm() {
            return false;
        }
        let next: Vec<Complex64> = (1..=d).map(|k| lead.conj() * c[k] - c0 * c[d - k].conj()).collect();
        // rescale to keep the recursion away from underflow
        let scale = next.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
        if scale == 0.0 {
            return false;
        }
        c = next.into_iter().map(|x| x / scale).collect();
    }
    true
}

/// Zeros of f from the eigenvalues of its companion matrix.
pub fn companion_roots(f: &UniPoly) -> Vec<Complex64> {
    let d = f.degree();
    if f.is_zero() || d == 0 {
        return Vec::new();
    }
    let c = f.coeffs();
    let lead = c[d];
    if d == 1 {
        return vec![-c[0] / lead];
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    let eig = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .unwrap_or_else(|| m.diagonal());
    eig.iter().map(|&z| polish(f, z)).collect()
}

/// A few Newton steps, each kept only if it reduces |f|.
fn polish(f: &UniPoly, mut z: Complex64) -> Complex64 {
    let df = f.derivative();
    let mut val = f.eval(z).norm();
    for _ in 0..3 {
        let d = df.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - f.eval(z) / d;
        let cv = f.eval(cand).norm();
        if cv < val {
            z = cand;
            val = cv;
        } else {
            break;
        }
    }
    z
}

/// Three-way classification of the zeros of f against the unit circle with a
/// band [1 − tol, 1 + tol].
pub fn roots_in_closed_disk(f: &UniPoly, tol: f64) -> Result<DiskVerdict> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial"));
    }
    let location = schur_cohn_location(f, tol);
    let roots: Vec<RootInfo> = companion_roots(f)
        .into_iter()
        .map(|root| {
            let modulus = root.norm();
            RootInfo {
                root,
                modulus,
                location: Location::of_modulus(modulus, tol),
            }
        })
        .collect();
    let max_modulus = roots.iter().fold(0.0f64, |acc, r| acc.max(r.modulus));
    let companion_location = if roots.is_empty() {
        Location::Inside
    } else {
        Location::of_modulus(max_modulus, tol)
    };
    Ok(DiskVerdict {
        location,
        companion_location,
        roots,
        max_modulus,
        tol,
    })
}

fn schur_cohn_location(f: &UniPoly, tol: f64) -> Location {
    if strictly_inside(&f.scaled_argument(1.0 - tol)) {
        return Location::Inside;
    }
    if strictly_inside(&f.scaled_argument(1.0 + tol)) {
        return Location::Boundary;
    }
    // Clustered zeros on the circle split under rounding by about the square
    // root of machine precision. For self-inversive f Cohn's theorem settles
    // the question through f′ instead.
    if f.degree() >= 1 && is_self_inversive(f, tol).is_some() {
        let df = f.derivative();
        if df.degree() == 0 || schur_cohn_location(&df, tol).in_closed_disk() {
            return Location::Boundary;
        }
    }
    Location::Outside
}

/// Some(ω) when z^d·conj(f(1/z̄)) = ω·f(z) coefficient-wise with |ω| = 1, up
/// to tol relative to the largest coefficient.
pub fn is_self_inversive(f: &UniPoly, tol: f64) -> Option<Complex64> {
    if f.is_zero() {
        return None;
    }
    let c = f.coeffs();
    let star = f.reciprocal_conjugate();
    let s = star.coeffs();
    let (k, big) = c.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    let omega = s[k] / big;
    if (omega.norm() - 1.0).abs() > tol {
        return None;
    }
    let scale = big.norm();
    let ok = c.iter().zip(s).all(|(a, b)| (b - omega * a).norm() <= tol * scale);
    ok.then_some(omega)
}

pub fn membership(pt: &ThetaPoint, tol: f64) -> Membership {
    let f = associated_poly(pt);
    match schur_cohn_location(&f, tol) {
        Location::Inside => Membership::MemberInterior,
        Location::Boundary => Membership::MemberBoundary,
        Location::Outside => Membership::Outside,
    }
}

/// Membership in the closed symmetrized polydisc Γₖ, i.e. the quotient domain
/// of the symmetric group with p = 1.
pub fn gamma_membership(point: &[Complex64], tol: f64) -> Membership {
    membership(&ThetaPoint::new(point.to_vec(), 1), tol)
}

/// (γ₁θ₁, …, γₙ₋₁θₙ₋₁) with γ_i = (n − i)/n.
pub fn pi_projection(pt: &ThetaPoint) -> Result<Vec<Complex64>> {
    let n = pt.n();
    if n < 2 {
        return Err(Error::PreconditionFailed(format!("projection needs n >= 2, got {n}")));
    }
    Ok((1..n).map(|i| pt.coords[i - 1] * ((n - i) as f64 / n as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShilovVerdict {
    pub verdict: bool,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    /// Largest |θₙ^p·θ̄_j − θ_{n−j}| over j = 1..n−1.
    pub relation_residual: f64,
}

impl ShilovVerdict {
    pub fn agree(&self) -> bool {
        self.a == self.b && self.b == self.c
    }
}

/// Three independent tests for the distinguished boundary:
/// (a) membership and |θₙ| = 1;
/// (b) |θₙ| = 1, θₙ^p·θ̄_j = θ_{n−j}, and the projected point lies in Γₙ₋₁;
/// (c) every zero of the associated polynomial is unimodular.
pub fn shilov_boundary_test(pt: &ThetaPoint, tol: f64) -> ShilovVerdict {
    let n = pt.n();
    let last = pt.last();
    let unimodular = (last.norm() - 1.0).abs() <= tol;

    let a = unimodular && membership(pt, tol).is_member();

    let tp = last.powu(pt.p);
    let scale = pt.coords.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let relation_residual = (1..n)
        .map(|j| (tp * pt.coords[j - 1].conj() - pt.coords[n - j - 1]).norm())
        .fold(0.0f64, f64::max);
    let relations = relation_residual <= tol * scale;
    let projected = match pi_projection(pt) {
        Ok(q) => gamma_membership(&q, tol).is_member(),
        Err(_) => true,
    };
    let b = unimodular && relations && projected;

    let f = associated_poly(pt);
    let c = n > 0 && f.coeffs()[0].norm() > tol && all_unimodular(&f, tol);

    ShilovVerdict {
        verdict: a && b && c,
        a,
        b,
        c,
        relation_residual,
    }
}

/// Neither f nor its reciprocal conjugate has a zero outside the closed disk.
fn all_unimodular(f: &UniPoly, tol: f64) -> bool {
    schur_cohn_location(f, tol).in_closed_disk() && schur_cohn_location(&f.reciprocal_conjugate(), tol).in_closed_disk()
}

/// Lifts a distinguished-boundary point μ of the (n−1)-dimensional domain to
/// one of the n-dimensional domain: θ_j = e_j + ē_{n−j}·θₙ^p, where
/// e = (μ₁, …, μₙ₋₂, μₙ₋₁^p).
pub fn boundary_from_lower(mu: &ThetaPoint, theta_n: Complex64, tol: f64) -> Result<ThetaPoint> {
    let k = mu.n();
    if k == 0 {
        return Err(Error::PreconditionFailed("empty lower point".into()));
    }
    if (theta_n.norm() - 1.0).abs() > tol {
        return Err(Error::PreconditionFailed(format!(
            "|theta_n| = {} is not 1",
            theta_n.norm()
        )));
    }
    if !shilov_boundary_test(mu, tol).verdict {
        return Err(Error::PreconditionFailed(
            "lower point is not on the distinguished boundary".into(),
        ));
    }
    let mut e = mu.coords.clone();
    e[k - 1] = e[k - 1].powu(mu.p);
    let n = k + 1;
    let tp = theta_n.powu(mu.p);
    let mut coords: Vec<Complex64> = (1..n).map(|j| e[j - 1] + e[n - j - 1].conj() * tp).collect();
    coords.push(theta_n);
    Ok(ThetaPoint::new(coords, mu.p))
}

/// Everything the point queries report: membership, the zeros of the
/// associated polynomial, and the three boundary sub-verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub membership: Membership,
    pub disk: DiskVerdict,
    pub shilov: ShilovVerdict,
}

pub fn analyze_point(pt: &ThetaPoint, tol: f64) -> Result<PointReport> {
    if pt.n() == 0 {
        return Err(Error::DegenerateInput("empty point"));
    }
    Ok(PointReport {
        membership: membership(pt, tol),
        disk: roots_in_closed_disk(&associated_poly(pt), tol)?,
        shilov: shilov_boundary_test(pt, tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    ClosedPolydisc,
    Torus,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// θ(λ) for λ uniform on the torus or area-uniform in the closed polydisc.
pub fn sample_theta_image(spec: &GroupSpec, region: Region, count: usize, seed: u64) -> Result<Vec<ThetaPoint>> {
    let tm = theta_map(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let lambda: Vec<Complex64> = (0..spec.n())
                .map(|_| {
                    let u = random_unit(&mut rng);
                    match region {
                        Region::Torus => u,
                        Region::ClosedPolydisc => u * rng.gen_range(0.0f64..=1.0).sqrt(),
                    }
                })
                .collect();
            ThetaPoint::new(tm.eval(&lambda), spec.p())
        })
        .collect())
}

/// Boundary images with θₙ scaled by 1 + ε, ε ∈ [0.01, 0.5]. These lie outside
/// because |θₙ| ≤ 1 on the closed domain.
pub fn sample_exterior(spec: &GroupSpec, count: usize, seed: u64) -> Result<Vec<ThetaPoint>> {
    let mut pts = sample_theta_image(spec, Region::Torus, count, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for pt in &mut pts {
        let eps: f64 = rng.gen_range(0.01..=0.5);
        let n = pt.n();
        pt.coords[n - 1] *= 1.0 + eps;
    }
    Ok(pts)
}
