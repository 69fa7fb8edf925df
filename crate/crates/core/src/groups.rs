//! The imprimitive reflection groups G(m,p,n) as monomial matrices.
//!
//! An element is stored as a permutation together with integer phase
//! exponents of ξ = e^{2πi/m}; the matrix has entry ξ^{phases[j]} in row
//! `perm[j]`, column `j`. Points are acted on by σ·z = σ⁻¹z and functions by
//! σ(f)(z) = f(σ⁻¹·z) = f(σz).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on |G|.
pub const DEFAULT_GROUP_CAP: u64 = 20736;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    m: u32,
    p: u32,
    n: usize,
}

impl GroupSpec {
    pub fn new(m: u32, p: u32, n: usize) -> Result<Self> {
        let bad = |reason| Error::InvalidSpec { m, p, n, reason };
        if m == 0 || p == 0 {
            return Err(bad("m and p must be positive"));
        }
        if !m.is_multiple_of(p) {
            return Err(bad("p must divide m"));
        }
        if n == 0 {
            return Err(bad("n must be positive"));
        }
        Ok(Self { m, p, n })
    }

    /// The symmetric group S_n = G(1,1,n).
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(1, 1, n)
    }

    /// The dihedral group of order 2k realized as G(k,k,2).
    pub fn dihedral(k: u32) -> Result<Self> {
        Self::new(k, k, 2)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.m / self.p
    }

    /// |G(m,p,n)| = mⁿ·n!/p.
    pub fn order(&self) -> u64 {
        let mut order = 1u64;
        for k in 1..=self.n as u64 {
            order = order.saturating_mul(k);
        }
        for _ in 0..self.n {
            order = order.saturating_mul(self.m as u64);
        }
        order / self.p as u64
    }

    pub fn is_symmetric(&self) -> bool {
        self.m == 1
    }

    pub fn is_dihedral(&self) -> bool {
        self.n == 2 && self.m == self.p && self.m >= 2
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{},{})", self.m, self.p, self.n)
    }
}

/// ξ_m^k as a complex number.
pub fn root_of_unity(m: u32, k: i64) -> Complex64 {
    let k = k.rem_euclid(m as i64);
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * k == m as i64 {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == m as i64 {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * k == 3 * m as i64 {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    perm: Vec<usize>,
    phases: Vec<u32>,
    m: u32,
}

impl GroupElement {
    pub fn identity(n: usize, m: u32) -> Self {
        Self {
            perm: (0..n).collect(),
            phases: vec![0; n],
            m,
        }
    }

    /// Builds an element from a 0-based permutation and phase exponents.
    pub fn new(perm: Vec<usize>, phases: Vec<i64>, m: u32) -> Result<Self> {
        let n = perm.len();
        if phases.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: phases.len(),
            });
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(Error::Parse(format!("{perm:?} is not a permutation")));
            }
            seen[j] = true;
        }
        let phases = phases.into_iter().map(|k| k.rem_euclid(m as i64) as u32).collect();
        Ok(Self { perm, phases, m })
    }

    /// The transposition-like reflection swapping coordinates `i` and `j`
    /// with phases ξ^k and ξ^{-k}.
    pub fn transposition_reflection(n: usize, m: u32, i: usize, j: usize, k: i64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        let mut phases = vec![0i64; n];
        phases[i] = k;
        phases[j] = -k;
        Self::new(perm, phases, m).expect("valid transposition")
    }

    /// The diagonal reflection multiplying coordinate `i` by ξ^k.
    pub fn diagonal_reflection(n: usize, m: u32, i: usize, k: i64) -> Self {
        let mut phases = vec![0i64; n];
        phases[i] = k;
        Self::new((0..n).collect(), phases, m).expect("valid diagonal element")
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.phases.iter().all(|&k| k == 0)
    }

    pub fn belongs_to(&self, spec: &GroupSpec) -> bool {
        let sum: u64 = self.phases.iter().map(|&k| k as u64).sum();
        self.m == spec.m() && self.n() == spec.n() && sum.is_multiple_of(spec.p() as u64)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut phases = vec![0; n];
        for j in 0..n {
            let mid = other.perm[j];
            perm[j] = self.perm[mid];
            phases[j] = (other.phases[j] + self.phases[mid]) % self.m;
        }
        Self {
            perm,
            phases,
            m: self.m,
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut phases = vec![0; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            phases[self.perm[j]] = (self.m - self.phases[j]) % self.m;
        }
        Self {
            perm,
            phases,
            m: self.m,
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        let mut mat = DMatrix::zeros(n, n);
        for j in 0..n {
            mat[(self.perm[j], j)] = root_of_unity(self.m, self.phases[j] as i64);
        }
        mat
    }

    /// σ·z = σ⁻¹z.
    pub fn act_on_point(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.n())
            .map(|j| root_of_unity(self.m, -(self.phases[j] as i64)) * z[self.perm[j]])
            .collect()
    }

    /// Image of the monomial z^α under f ↦ σ(f): returns the new exponent
    /// and the phase exponent k of the scalar ξ^k.
    pub fn act_on_exponent(&self, alpha: &[u32]) -> (Vec<u32>, u32) {
        let mut beta = vec![0; self.n()];
        let mut phase = 0u64;
        for j in 0..self.n() {
            let e = alpha[self.perm[j]];
            beta[j] = e;
            phase += self.phases[j] as u64 * e as u64;
        }
        (beta, (phase % self.m as u64) as u32)
    }

    /// Disjoint cycles of the permutation, each listed from its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                j = self.perm[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn parity_is_odd(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1
    }

    /// Dimension of the fixed space of the matrix. Each cycle whose phase
    /// sum vanishes mod m contributes exactly one fixed direction.
    pub fn fixed_space_dim(&self) -> usize {
        self.cycles()
            .iter()
            .filter(|cycle| {
                let s: u64 = cycle.iter().map(|&j| self.phases[j] as u64).sum();
                s.is_multiple_of(self.m as u64)
            })
            .count()
    }

    pub fn is_reflection(&self) -> bool {
        self.n() - self.fixed_space_dim() == 1
    }

    /// det(σ) as an exponent of ξ_{2m}.
    pub fn det_exponent_2m(&self) -> u32 {
        let two_m = 2 * self.m as u64;
        let sum: u64 = self.phases.iter().map(|&k| 2 * k as u64).sum();
        let parity = if self.parity_is_odd() { self.m as u64 } else { 0 };
        ((sum + parity) % two_m) as u32
    }

    /// sign(σ) = det(σ)⁻¹.
    pub fn sign_character(&self) -> Complex64 {
        root_of_unity(2 * self.m, -(self.det_exponent_2m() as i64))
    }

    pub fn order(&self) -> u64 {
        let mut power = self.clone();
        let mut k = 1;
        while !power.is_identity() {
            power = power.compose(self);
            k += 1;
        }
        k
    }
}

/// All elements of G(m,p,n), each exactly once, in a deterministic order.
pub fn generate_group(spec: &GroupSpec, cap: u64) -> Result<Vec<GroupElement>> {
    let order = spec.order();
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    let n = spec.n();
    let m = spec.m();
    let mut out = Vec::with_capacity(order as usize);
    for perm in permutations(n) {
        let mut phases = vec![0u32; n];
        loop {
            let sum: u64 = phases.iter().map(|&k| k as u64).sum();
            if sum.is_multiple_of(spec.p() as u64) {
                out.push(GroupElement {
                    perm: perm.clone(),
                    phases: phases.clone(),
                    m,
                });
            }
            // odometer over (Z/m)^n
            let mut idx = 0;
            loop {
                if idx == n {
                    break;
                }
                phases[idx] += 1;
                if phases[idx] == m {
                    phases[idx] = 0;
                    idx += 1;
                } else {
                    break;
                }
            }
            if idx == n {
                break;
            }
        }
    }
    debug_assert_eq!(out.len() as u64, order);
    Ok(out)
}

/// Permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
    out
}

/// Generating reflections of G(m,p,n): transposition-like reflections between
/// adjacent coordinates (both phases 0 and 1) and, when p < m, the diagonal
/// reflection of phase p on the first coordinate.
pub fn generators(spec: &GroupSpec) -> Vec<GroupElement> {
    let (n, m) = (spec.n(), spec.m());
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        gens.push(GroupElement::transposition_reflection(n, m, i, i + 1, 0));
    }
    if n >= 2 && m > 1 {
        gens.push(GroupElement::transposition_reflection(n, m, 0, 1, 1));
    }
    if spec.p() < m {
        gens.push(GroupElement::diagonal_reflection(n, m, 0, spec.p() as i64));
    }
    if gens.is_empty() {
        gens.push(GroupElement::identity(n, m));
    }
    gens
}

#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    pub representative: GroupElement,
    pub size: usize,
}

/// Conjugacy classes by brute-force orbits; the representative is the first
/// member in generation order. Also returns the class index of every element.
pub fn conjugacy_classes(elements: &[GroupElement]) -> (Vec<ConjugacyClass>, Vec<usize>) {
    let index: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut class_of = vec![usize::MAX; elements.len()];
    let mut classes = Vec::new();
    for (i, g) in elements.iter().enumerate() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let mut size = 0;
        for h in elements {
            let conj = h.compose(g).compose(&h.inverse());
            let k = index[&conj];
            if class_of[k] == usize::MAX {
                class_of[k] = c;
                size += 1;
            }
        }
        classes.push(ConjugacyClass {
            representative: g.clone(),
            size,
        });
    }
    (classes, class_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Closure of a generating set under composition.
    fn closure(gens: &[GroupElement]) -> HashSet<GroupElement> {
        let n = gens[0].n();
        let m = gens[0].m();
        let mut set = HashSet::new();
        set.insert(GroupElement::identity(n, m));
        let mut frontier = vec![GroupElement::identity(n, m)];
        while let Some(g) = frontier.pop() {
            for s in gens {
                let h = g.compose(s);
                if set.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        set
    }

    #[test]
    fn group_orders() {
        for (m, p, n, expected) in [(1, 1, 2, 2), (2, 2, 2, 4), (2, 1, 2, 8), (3, 3, 2, 6), (1, 1, 3, 6)] {
            let spec = GroupSpec::new(m, p, n).unwrap();
            let g = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(g.len(), expected, "{spec}");
            let unique: HashSet<_> = g.iter().cloned().collect();
            assert_eq!(unique.len(), expected);
        }
    }

    #[test]
    fn g212_matches_generator_closure() {
        let spec = GroupSpec::new(2, 1, 2).unwrap();
        let s12 = GroupElement::transposition_reflection(2, 2, 0, 1, 0);
        let s1 = GroupElement::diagonal_reflection(2, 2, 0, 1);
        let closed = closure(&[s12, s1]);
        let listed: HashSet<_> = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap().into_iter().collect();
        assert_eq!(closed.len(), 8);
        assert_eq!(closed, listed);
    }

    #[test]
    fn default_generators_generate() {
        for (m, p, n) in [(1, 1, 3), (2, 1, 3), (3, 3, 2), (4, 2, 2), (6, 3, 2), (3, 1, 3)] {
            let spec = GroupSpec::new(m, p, n).unwrap();
            let closed = closure(&generators(&spec));
            assert_eq!(closed.len() as u64, spec.order(), "{spec}");
            assert!(closed.iter().all(|g| g.belongs_to(&spec)));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let spec = GroupSpec::new(2, 1, 6).unwrap();
        assert_eq!(spec.order(), 46080);
        let spec = GroupSpec::new(2, 2, 6).unwrap();
        assert_eq!(spec.order(), 23040);
        assert!(generate_group(&GroupSpec::new(6, 3, 4).unwrap(), DEFAULT_GROUP_CAP).is_ok());
        assert!(matches!(
            generate_group(&spec, DEFAULT_GROUP_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(GroupSpec::new(4, 3, 2).is_err());
        assert!(GroupSpec::new(0, 1, 2).is_err());
        assert!(GroupSpec::new(2, 2, 0).is_err());
    }

    #[test]
    fn closed_under_composition_and_inverse() {
        let spec = GroupSpec::new(3, 1, 2).unwrap();
        let g = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap();
        let set: HashSet<_> = g.iter().cloned().collect();
        for a in &g {
            assert!(set.contains(&a.inverse()));
            assert!(a.compose(&a.inverse()).is_identity());
            for b in &g {
                assert!(set.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn compose_matches_matrix_product() {
        let spec = GroupSpec::new(3, 1, 3).unwrap();
        let g = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap();
        for a in g.iter().step_by(17) {
            for b in g.iter().step_by(13) {
                let diff = a.compose(b).matrix() - a.matrix() * b.matrix();
                assert!(diff.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn point_action_examples() {
        let z = [c(1.5, 0.5), c(-0.25, 2.0)];
        let id = GroupElement::identity(2, 1);
        assert_eq!(id.act_on_point(&z), z.to_vec());
        let swap = GroupElement::transposition_reflection(2, 1, 0, 1, 0);
        assert_eq!(swap.act_on_point(&z), vec![z[1], z[0]]);
        // inverse matrix times the vector
        let s = GroupElement::diagonal_reflection(2, 2, 0, 1);
        let out = s.act_on_point(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let expected = s.matrix().try_inverse().unwrap() * nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((out[0] - expected[0]).norm() < 1e-15);
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn reflections() {
        assert!(!GroupElement::identity(2, 1).is_reflection());
        assert!(GroupElement::transposition_reflection(2, 1, 0, 1, 0).is_reflection());
        let double = GroupElement::new(vec![1, 0, 3, 2], vec![0; 4], 1).unwrap();
        assert!(!double.is_reflection());
        // numerical rank of I − σ
        let mat = DMatrix::<Complex64>::identity(4, 4) - double.matrix();
        let rank = mat
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|s| **s > 1e-9)
            .count();
        assert_eq!(rank, 2);
    }

    #[test]
    fn reflection_flag_matches_numerical_rank() {
        let spec = GroupSpec::new(4, 2, 3).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            let mat = DMatrix::<Complex64>::identity(3, 3) - g.matrix();
            let rank = mat
                .svd(false, false)
                .singular_values
                .iter()
                .filter(|s| **s > 1e-9)
                .count();
            assert_eq!(g.is_reflection(), rank == 1, "{g:?}");
        }
    }

    #[test]
    fn symmetric_group_reflection_count() {
        for n in 2..=5 {
            let spec = GroupSpec::symmetric(n).unwrap();
            let count = generate_group(&spec, DEFAULT_GROUP_CAP)
                .unwrap()
                .iter()
                .filter(|g| g.is_reflection())
                .count();
            assert_eq!(count, n * (n - 1) / 2);
        }
    }

    #[test]
    fn sign_character_examples() {
        assert_eq!(GroupElement::identity(2, 1).sign_character(), c(1.0, 0.0));
        let swap = GroupElement::transposition_reflection(2, 1, 0, 1, 0);
        assert!((swap.sign_character() - c(-1.0, 0.0)).norm() < 1e-15);
        let s = GroupElement::diagonal_reflection(2, 2, 0, 1);
        let det = s.matrix().determinant();
        assert!((s.sign_character() - det.inv()).norm() < 1e-15);
        assert!((s.sign_character() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sign_character_is_inverse_determinant() {
        let spec = GroupSpec::new(3, 1, 3).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            let det = g.matrix().determinant();
            assert!((g.sign_character() * det - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn sign_is_parity_on_symmetric_groups() {
        let spec = GroupSpec::symmetric(4).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            let expected = if g.parity_is_odd() { -1.0 } else { 1.0 };
            assert!((g.sign_character() - c(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn element_orders_divide_group_order() {
        let spec = GroupSpec::new(4, 2, 3).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            assert_eq!(spec.order() % g.order(), 0);
        }
    }

    #[test]
    fn class_sizes_sum_to_order() {
        let spec = GroupSpec::new(2, 1, 3).unwrap();
        let g = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap();
        let (classes, _) = conjugacy_classes(&g);
        assert_eq!(classes.iter().map(|c| c.size).sum::<usize>(), g.len());
        // B_3 has 10 classes (pairs of partitions of 3)
        assert_eq!(classes.len(), 10);
    }

    #[test]
    fn exponent_action_matches_evaluation() {
        let g = GroupElement::new(vec![2, 0, 1], vec![1, 2, 0], 3).unwrap();
        let alpha = [2u32, 1, 3];
        let z = [c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4)];
        let (beta, k) = g.act_on_exponent(&alpha);
        // σ(f)(z) = f(σ z) with f = z^α
        let sz = g.matrix() * nalgebra::DVector::from_vec(z.to_vec());
        let lhs: Complex64 = (0..3).map(|i| sz[i].powu(alpha[i])).product();
        let rhs: Complex64 = root_of_unity(3, k as i64) * (0..3).map(|i| z[i].powu(beta[i])).product::<Complex64>();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
