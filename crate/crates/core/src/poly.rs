//! Sparse multivariate polynomials over ℂ, univariate polynomials, and the
//! basic invariant map θ of G(m,p,n).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{generators, root_of_unity, GroupElement, GroupSpec};

/// Coefficient tolerance, applied after normalizing by the largest coefficient.
pub const COEFF_TOL: f64 = 1e-12;

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographically with z₁ the most significant variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors in `n` variables of total degree exactly `d`, in
/// increasing graded-lex order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=rest {
            prefix.push(e);
            rec(n, rest - e, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// All exponent vectors with total degree ≤ `max_degree`, graded-lex order.
pub fn exponents_up_to(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    (0..=max_degree).flat_map(|d| exponents_of_degree(n, d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Complex64) -> Self {
        Self::monomial(num_vars, vec![0; num_vars], c)
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(num_vars: usize, exp: Vec<u32>, c: Complex64) -> Self {
        assert_eq!(exp.len(), num_vars, "exponent length");
        let mut p = Self::zero(num_vars);
        p.add_term(exp, c);
        p
    }

    /// The coordinate function z_i (0-based).
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut exp = vec![0; num_vars];
        exp[i] = 1;
        Self::monomial(num_vars, exp, Complex64::new(1.0, 0.0))
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = Self::zero(num_vars);
        for (exp, c) in terms {
            if exp.len() != num_vars {
                return Err(Error::ArityMismatch {
                    expected: num_vars,
                    got: exp.len(),
                });
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: Complex64) {
        let key = Exponent(exp);
        let entry = self.terms.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> + '_ {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), *c))
    }

    pub fn coeff(&self, exp: &[u32]) -> Complex64 {
        self.terms
            .get(&Exponent(exp.to_vec()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponent::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Exponent::degree);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    /// Homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(e.degree())
                .or_insert_with(|| MultiPoly::zero(self.num_vars))
                .terms
                .insert(e.clone(), *c);
        }
        out
    }

    pub fn leading_term(&self) -> Option<(&[u32], Complex64)> {
        self.terms.iter().next_back().map(|(e, c)| (e.0.as_slice(), *c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.num_vars);
        if c == Complex64::new(0.0, 0.0) {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.num_vars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.0.iter().zip(z).map(|(&k, &x)| x.powu(k)).product::<Complex64>())
            .sum()
    }

    /// ∂/∂z_i.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e.0[i] > 0 {
                let mut exp = e.0.clone();
                exp[i] -= 1;
                out.add_term(exp, c * e.0[i] as f64);
            }
        }
        out
    }

    /// Substitutes `subs[i]` for the variable w_i.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: subs.len(),
            });
        }
        let target = subs.first().map(MultiPoly::num_vars).unwrap_or(0);
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, *c);
            for (k, s) in e.0.iter().zip(subs) {
                term = &term * &s.pow(*k);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// σ(f)(z) = f(σ⁻¹·z), computed monomial by monomial.
    pub fn act(&self, g: &GroupElement) -> Result<MultiPoly> {
        if g.n() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: g.n(),
            });
        }
        let mut out = MultiPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            let (beta, k) = g.act_on_exponent(&e.0);
            out.add_term(beta, c * root_of_unity(g.m(), k as i64));
        }
        Ok(out)
    }

    /// Drops coefficients below `tol` relative to the largest one.
    pub fn cleaned(&self, tol: f64) -> MultiPoly {
        let scale = self.max_abs_coeff();
        let mut out = MultiPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            if c.norm() > tol * scale {
                out.terms.insert(e.clone(), *c);
            }
        }
        out
    }

    /// Coefficient-wise equality after normalizing by the largest coefficient
    /// of either side.
    pub fn approx_eq(&self, other: &MultiPoly, tol: f64) -> bool {
        if self.num_vars != other.num_vars {
            return false;
        }
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1e-300);
        let diff = self - other;
        diff.max_abs_coeff() <= tol * scale
    }

    /// Exact division by `divisor`: returns the quotient when the remainder
    /// vanishes (relative tolerance `tol`), otherwise `None`.
    pub fn divide_exact(&self, divisor: &MultiPoly, tol: f64) -> Option<MultiPoly> {
        let (lead_exp, lead_c) = divisor.leading_term()?;
        let lead_exp = Exponent(lead_exp.to_vec());
        let scale = self.max_abs_coeff().max(1e-300);
        let mut rest = self.clone();
        let mut quotient = MultiPoly::zero(self.num_vars);
        while let Some((e, c)) = rest.leading_term() {
            let e = Exponent(e.to_vec());
            if c.norm() <= tol * scale {
                rest.terms.remove(&e);
                continue;
            }
            if !lead_exp.divides(&e) {
                return None;
            }
            let shift: Vec<u32> = e.0.iter().zip(&lead_exp.0).map(|(a, b)| a - b).collect();
            let factor = c / lead_c;
            quotient.add_term(shift.clone(), factor);
            let step = &MultiPoly::monomial(self.num_vars, shift, factor) * divisor;
            rest = &rest - &step;
            rest.terms.remove(&e);
        }
        Some(quotient)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·z{}", i + 1)?,
                    _ => write!(f, "·z{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.0.clone(), *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.0.clone(), -*c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        let mut out = MultiPoly::zero(self.num_vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let exp = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Dense univariate polynomial c₀ + c₁z + … + c_d z^d.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// z^d·conj(f(1/z̄)).
    pub fn reciprocal_conjugate(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    /// f(R·z).
    pub fn scaled_argument(&self, radius: f64) -> UniPoly {
        let mut r = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * r;
                r *= radius;
                out
            })
            .collect();
        UniPoly { coeffs }
    }
}

/// s_i of the given values; s₀ = 1.
pub fn elementary_symmetric(i: usize, values: &[Complex64]) -> Result<Complex64> {
    if i > values.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: values.len(),
        });
    }
    Ok(elementary_symmetric_all(values)[i])
}

/// [s₀, s₁, …, s_n] by the product recurrence ∏(1 + x_k t).
pub fn elementary_symmetric_all(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); values.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (k, &x) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] = e[j] + e[j - 1] * x;
        }
    }
    e
}

/// The elementary symmetric polynomial s_i as a `MultiPoly` in n variables.
pub fn elementary_symmetric_poly(n: usize, i: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(n);
    let one = Complex64::new(1.0, 0.0);
    let mut choose = |mask: u64| {
        if mask.count_ones() as usize == i {
            let exp = (0..n).map(|k| ((mask >> k) & 1) as u32).collect();
            out.add_term(exp, one);
        }
    };
    for mask in 0..(1u64 << n) {
        choose(mask);
    }
    out
}

#[derive(Debug, Clone)]
pub struct ThetaMap {
    pub spec: GroupSpec,
    pub components: Vec<MultiPoly>,
}

impl ThetaMap {
    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// Degrees of θ₁, …, θₙ: m·i for i < n and q·n for θₙ.
    pub fn degrees(&self) -> Vec<u32> {
        let n = self.spec.n();
        (1..=n)
            .map(|i| {
                if i < n {
                    self.spec.m() * i as u32
                } else {
                    self.spec.q() * n as u32
                }
            })
            .collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.spec.n();
        let powers: Vec<Complex64> = z.iter().map(|x| x.powu(self.spec.m())).collect();
        let s = elementary_symmetric_all(&powers);
        let product: Complex64 = z.iter().product();
        (1..=n)
            .map(|i| if i < n { s[i] } else { product.powu(self.spec.q()) })
            .collect()
    }
}

/// θ_i = s_i(z₁^m, …, zₙ^m) for i < n and θₙ = (z₁⋯zₙ)^q.
pub fn theta_map(spec: &GroupSpec) -> Result<ThetaMap> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::UnsupportedFamily {
            m: spec.m(),
            p: spec.p(),
            n,
        });
    }
    let powers: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(n, i).pow(spec.m())).collect();
    let mut components = Vec::with_capacity(n);
    for i in 1..n {
        components.push(elementary_symmetric_poly(n, i).compose(&powers)?);
    }
    let product = elementary_symmetric_poly(n, n).pow(spec.q());
    components.push(product);
    Ok(ThetaMap {
        spec: *spec,
        components,
    })
}

/// det(∂θ_i/∂z_j) with rows indexed by θ_i and columns by z_j.
pub fn jacobian(tm: &ThetaMap) -> MultiPoly {
    let n = tm.n();
    let entries: Vec<Vec<MultiPoly>> = tm
        .components
        .iter()
        .map(|t| (0..n).map(|j| t.derivative(j)).collect())
        .collect();
    polynomial_determinant(&entries)
}

/// Leibniz expansion; sizes here are at most 6.
pub fn polynomial_determinant(entries: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = entries.len();
    let vars = entries[0][0].num_vars();
    let mut det = MultiPoly::zero(vars);
    for perm in crate::groups::permutations(n) {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut term = MultiPoly::one(vars);
        for (row, &col) in perm.iter().enumerate() {
            term = &term * &entries[row][col];
            if term.is_zero() {
                break;
            }
        }
        if inversions % 2 == 1 {
            term = -&term;
        }
        det = &det + &term;
    }
    det
}

/// True iff σ(f) = f for every generator of the group.
pub fn invariant_check(f: &MultiPoly, spec: &GroupSpec) -> Result<bool> {
    for g in generators(spec) {
        if !f.act(&g)?.approx_eq(f, COEFF_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default cap on deg f for [`express_in_invariants`].
pub const EXPRESS_DEGREE_CAP: u32 = 40;

/// Exponents e ∈ ℕⁿ with Σ e_i·weights_i = d, in graded-lex order of e.
pub fn weighted_exponents(weights: &[u32], d: u32) -> Vec<Vec<u32>> {
    fn rec(weights: &[u32], rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == weights.len() {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let w = weights[prefix.len()];
        for e in 0..=rest / w {
            prefix.push(e);
            rec(weights, rest - e * w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, d, &mut Vec::new(), &mut out);
    out.sort_by_key(|a| Exponent(a.clone()));
    out
}

/// The unique q with q∘θ = f, found degree by degree by a least-squares
/// coefficient match over the θ-monomials of matching weighted degree and
/// verified by expansion.
pub fn express_in_invariants(f: &MultiPoly, tm: &ThetaMap) -> Result<MultiPoly> {
    express_in_invariants_capped(f, tm, EXPRESS_DEGREE_CAP)
}

pub fn express_in_invariants_capped(f: &MultiPoly, tm: &ThetaMap, cap: u32) -> Result<MultiPoly> {
    let n = tm.n();
    if f.num_vars() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: f.num_vars(),
        });
    }
    if let Some(d) = f.degree() {
        if d > cap {
            return Err(Error::DegreeOverflow {
                degree: d as usize,
                cap: cap as usize,
            });
        }
    }
    if !invariant_check(f, &tm.spec)? {
        return Err(Error::NotInvariant);
    }
    let weights = tm.degrees();
    let mut q = MultiPoly::zero(n);
    for (d, part) in f.homogeneous_parts() {
        let candidates = weighted_exponents(&weights, d);
        if candidates.is_empty() {
            return Err(Error::NoSolution(format!("no θ-monomials of weighted degree {d}")));
        }
        let images: Vec<MultiPoly> = candidates
            .iter()
            .map(|e| MultiPoly::monomial(n, e.clone(), Complex64::new(1.0, 0.0)).compose(&tm.components))
            .collect::<Result<_>>()?;
        let mut rows: Vec<Vec<u32>> = part.terms().map(|(e, _)| e.to_vec()).collect();
        for img in &images {
            rows.extend(img.terms().map(|(e, _)| e.to_vec()));
        }
        rows.sort_by_key(|a| Exponent(a.clone()));
        rows.dedup();
        let a = DMatrix::from_fn(rows.len(), candidates.len(), |r, c| images[c].coeff(&rows[r]));
        let b = DVector::from_fn(rows.len(), |r, _| part.coeff(&rows[r]));
        let svd = a.svd(true, true);
        let x = svd.solve(&b, 1e-12).map_err(|e| Error::NoSolution(e.to_string()))?;
        for (e, c) in candidates.iter().zip(x.iter()) {
            q.add_term(e.clone(), *c);
        }
    }
    let q = q.cleaned(1e-13);
    let back = q.compose(&tm.components)?;
    if !back.approx_eq(f, COEFF_TOL) {
        return Err(Error::NoSolution("expansion check failed".into()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{generate_group, DEFAULT_GROUP_CAP};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(n: usize, terms: &[(&[u32], f64)]) -> MultiPoly {
        MultiPoly::from_terms(n, terms.iter().map(|(e, v)| (e.to_vec(), c(*v)))).unwrap()
    }

    #[test]
    fn elementary_symmetric_examples() {
        let v = [c(1.0), c(2.0), c(3.0)];
        assert_eq!(elementary_symmetric(0, &v).unwrap(), c(1.0));
        assert_eq!(elementary_symmetric(1, &v).unwrap(), c(6.0));
        // (z−1)(z−2)(z−3) = z³ − 6z² + 11z − 6
        assert_eq!(elementary_symmetric(2, &v).unwrap(), c(11.0));
        assert_eq!(elementary_symmetric(3, &v).unwrap(), c(6.0));
        assert!(elementary_symmetric(4, &v).is_err());
    }

    #[test]
    fn theta_examples() {
        let t = theta_map(&GroupSpec::symmetric(2).unwrap()).unwrap();
        assert_eq!(t.components[0], poly(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]));
        assert_eq!(t.components[1], poly(2, &[(&[1, 1], 1.0)]));
        let t = theta_map(&GroupSpec::new(2, 2, 2).unwrap()).unwrap();
        assert_eq!(t.components[0], poly(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]));
        assert_eq!(t.components[1], poly(2, &[(&[1, 1], 1.0)]));
        let t = theta_map(&GroupSpec::new(2, 1, 2).unwrap()).unwrap();
        assert_eq!(t.components[0], poly(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]));
        assert_eq!(t.components[1], poly(2, &[(&[2, 2], 1.0)]));
        assert!(theta_map(&GroupSpec::new(2, 1, 1).unwrap()).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian(&theta_map(&GroupSpec::symmetric(2).unwrap()).unwrap());
        assert_eq!(j, poly(2, &[(&[1, 0], 1.0), (&[0, 1], -1.0)]));
        for k in 2..=6u32 {
            let j = jacobian(&theta_map(&GroupSpec::dihedral(k).unwrap()).unwrap());
            let expected = poly(2, &[(&[k, 0], k as f64), (&[0, k], -(k as f64))]);
            assert!(j.approx_eq(&expected, 1e-14), "k={k}: {j}");
        }
        let j = jacobian(&theta_map(&GroupSpec::symmetric(3).unwrap()).unwrap());
        let z = |i| MultiPoly::var(3, i);
        let vandermonde = &(&(&z(0) - &z(1)) * &(&z(0) - &z(2))) * &(&z(1) - &z(2));
        assert!(j.approx_eq(&vandermonde, 1e-14) || j.approx_eq(&-&vandermonde, 1e-14));
    }

    #[test]
    fn jacobian_is_alternating_for_symmetric_groups() {
        for n in 2..=4 {
            let spec = GroupSpec::symmetric(n).unwrap();
            let j = jacobian(&theta_map(&spec).unwrap());
            let swap = crate::groups::GroupElement::transposition_reflection(n, 1, 0, 1, 0);
            assert!(j.act(&swap).unwrap().approx_eq(&-&j, 1e-14));
        }
    }

    #[test]
    fn act_examples() {
        let one = MultiPoly::one(2);
        let swap = crate::groups::GroupElement::transposition_reflection(2, 1, 0, 1, 0);
        assert_eq!(one.act(&swap).unwrap(), one);
        assert_eq!(MultiPoly::var(2, 0).act(&swap).unwrap(), MultiPoly::var(2, 1));
        let s = crate::groups::GroupElement::diagonal_reflection(2, 2, 0, 1);
        assert_eq!(MultiPoly::var(2, 0).act(&s).unwrap(), poly(2, &[(&[1, 0], -1.0)]));
        assert!(MultiPoly::var(3, 0).act(&swap).is_err());
    }

    #[test]
    fn act_matches_point_evaluation() {
        let spec = GroupSpec::new(3, 1, 3).unwrap();
        let f = poly(3, &[(&[2, 1, 0], 1.5), (&[0, 0, 3], -0.5), (&[1, 1, 1], 2.0)]);
        let z = [
            Complex64::new(0.3, 0.2),
            Complex64::new(-0.4, 0.1),
            Complex64::new(0.5, -0.6),
        ];
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap().iter().step_by(7) {
            // σ(f)(z) = f(σ⁻¹·z) and σ⁻¹·z = σz
            let moved = g.inverse().act_on_point(&z);
            assert!((f.act(g).unwrap().eval(&z) - f.eval(&moved)).norm() < 1e-12);
        }
    }

    #[test]
    fn invariance_examples() {
        let s2 = GroupSpec::symmetric(2).unwrap();
        let t = theta_map(&s2).unwrap();
        assert!(invariant_check(&t.components[0], &s2).unwrap());
        assert!(!invariant_check(&MultiPoly::var(2, 0), &s2).unwrap());
        let b2 = GroupSpec::new(2, 1, 2).unwrap();
        let f = poly(2, &[(&[2, 2], 1.0)]);
        assert!(invariant_check(&f, &b2).unwrap());
        // full-group oracle
        for g in generate_group(&b2, DEFAULT_GROUP_CAP).unwrap() {
            assert_eq!(f.act(&g).unwrap(), f);
        }
    }

    #[test]
    fn theta_is_invariant_for_many_groups() {
        for (m, p, n) in [(1, 1, 3), (2, 1, 3), (3, 3, 2), (4, 2, 2), (6, 2, 2), (3, 1, 3)] {
            let spec = GroupSpec::new(m, p, n).unwrap();
            let t = theta_map(&spec).unwrap();
            for comp in &t.components {
                assert!(invariant_check(comp, &spec).unwrap(), "{spec}");
            }
        }
    }

    #[test]
    fn express_examples() {
        let s2 = GroupSpec::symmetric(2).unwrap();
        let t = theta_map(&s2).unwrap();
        let q = express_in_invariants(&t.components[0], &t).unwrap();
        assert!(q.approx_eq(&MultiPoly::var(2, 0), 1e-12));
        // Newton: p₂ = s₁² − 2s₂
        let f = poly(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let q = express_in_invariants(&f, &t).unwrap();
        assert!(q.approx_eq(&poly(2, &[(&[2, 0], 1.0), (&[0, 1], -2.0)]), 1e-12), "{q}");
        let d2 = GroupSpec::new(2, 2, 2).unwrap();
        let t = theta_map(&d2).unwrap();
        let f = poly(2, &[(&[2, 2], 1.0)]);
        let q = express_in_invariants(&f, &t).unwrap();
        assert!(q.approx_eq(&poly(2, &[(&[0, 2], 1.0)]), 1e-12), "{q}");
        assert_eq!(
            express_in_invariants(&MultiPoly::var(2, 0), &t),
            Err(Error::NotInvariant)
        );
    }

    #[test]
    fn express_round_trips_on_products_of_theta() {
        let spec = GroupSpec::new(2, 1, 3).unwrap();
        let t = theta_map(&spec).unwrap();
        let q0 = poly(
            3,
            &[
                (&[2, 0, 0], 1.0),
                (&[0, 1, 0], -3.0),
                (&[1, 0, 1], 0.5),
                (&[0, 0, 0], 2.0),
            ],
        );
        let f = q0.compose(&t.components).unwrap();
        let q = express_in_invariants(&f, &t).unwrap();
        assert!(q.approx_eq(&q0, 1e-12), "{q}");
    }

    #[test]
    fn exact_division() {
        let z1 = MultiPoly::var(2, 0);
        let z2 = MultiPoly::var(2, 1);
        let j = &z1 - &z2;
        assert_eq!(j.divide_exact(&j, 1e-12).unwrap(), MultiPoly::one(2));
        let f = &z1.pow(2) - &z2.pow(2);
        assert!(f.divide_exact(&j, 1e-12).unwrap().approx_eq(&(&z1 + &z2), 1e-14));
        assert!((&z1 + &z2).divide_exact(&j, 1e-12).is_none());
    }

    #[test]
    fn exponent_order_is_graded_lex() {
        let e = exponents_up_to(2, 2);
        assert_eq!(
            e,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(exponents_of_degree(3, 3).len(), 10);
    }

    #[test]
    fn unipoly_basics() {
        let f = UniPoly::from_real(&[1.0, -2.0, 1.0]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.eval(c(1.0)), c(0.0));
        assert_eq!(f.derivative(), UniPoly::from_real(&[-2.0, 2.0]));
        assert!(UniPoly::from_real(&[0.0, 0.0]).is_zero());
        let g = UniPoly::new(vec![Complex64::new(1.0, 2.0), c(3.0)]);
        assert_eq!(g.reciprocal_conjugate().coeffs(), &[c(3.0), Complex64::new(1.0, -2.0)]);
    }
}
