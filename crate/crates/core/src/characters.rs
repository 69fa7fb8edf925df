//! Irreducible characters and unitary representation matrices for the
//! supported families: S_n = G(1,1,n) with n ≤ 6 and the dihedral groups
//! G(k,k,2) with 2 ≤ k ≤ 12.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{conjugacy_classes, generate_group, ConjugacyClass, GroupElement, GroupSpec, DEFAULT_GROUP_CAP};

pub const MAX_SYMMETRIC_N: usize = 6;
pub const MAX_DIHEDRAL_K: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepLabel {
    /// Irrep of S_n indexed by a partition (weakly decreasing parts).
    Partition(Vec<usize>),
    DihedralTriv,
    DihedralSign,
    /// k even: -1 on the rotation δ, trivial on ⟨δ², σ⟩.
    DihedralRho1,
    /// k even: -1 on δ, trivial on ⟨δ², δσ⟩.
    DihedralRho2,
    /// Two-dimensional irrep with δ ↦ diag(ω^j, ω^{-j}).
    DihedralTwoDim(u32),
}

impl IrrepLabel {
    pub fn degree(&self) -> usize {
        match self {
            IrrepLabel::Partition(shape) => standard_tableaux(shape).len(),
            IrrepLabel::DihedralTwoDim(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Partition(shape) => {
                if shape.len() == 1 {
                    write!(f, "triv")
                } else if shape.iter().all(|&p| p == 1) {
                    write!(f, "sign")
                } else {
                    let parts: Vec<String> = shape.iter().map(|p| p.to_string()).collect();
                    write!(f, "({})", parts.join(","))
                }
            }
            IrrepLabel::DihedralTriv => write!(f, "triv"),
            IrrepLabel::DihedralSign => write!(f, "sign"),
            IrrepLabel::DihedralRho1 => write!(f, "rho1"),
            IrrepLabel::DihedralRho2 => write!(f, "rho2"),
            IrrepLabel::DihedralTwoDim(j) => write!(f, "2dim({j})"),
        }
    }
}

/// Parses a label relative to a group: `triv`, `sign`, `rho1`, `rho2`,
/// `2dim(j)`, or a partition such as `(2,1)` / `2,1`.
pub fn parse_irrep(label: &str, spec: &GroupSpec) -> Result<IrrepLabel> {
    let table = CharacterTable::new(spec)?;
    let s = label.trim();
    let found = table.irreps.iter().find(|l| l.to_string() == s).cloned();
    if let Some(l) = found {
        return Ok(l);
    }
    if spec.is_symmetric() {
        let inner = s.trim_start_matches('(').trim_end_matches(')');
        let parts: std::result::Result<Vec<usize>, _> = inner.split(',').map(|t| usize::from_str(t.trim())).collect();
        if let Ok(parts) = parts {
            let l = IrrepLabel::Partition(parts);
            if table.irreps.contains(&l) {
                return Ok(l);
            }
        }
    }
    Err(Error::UnknownIrrep(label.to_string()))
}

/// Partitions of n in reverse lexicographic order, (n) first.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// χ^λ(μ) by the Murnaghan–Nakayama rule, removing rim hooks through the
/// beta-set of λ.
pub fn murnaghan_nakayama(shape: &[usize], cycle_type: &[usize]) -> i64 {
    let len = shape.len();
    let beta: Vec<usize> = shape.iter().enumerate().map(|(i, &p)| p + len - 1 - i).collect();
    mn_beta(&beta, cycle_type)
}

fn mn_beta(beta: &[usize], cycles: &[usize]) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return 1;
    };
    let mut total = 0;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let crossed = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut next = beta.to_vec();
        next[i] = target;
        let sign = if crossed % 2 == 0 { 1 } else { -1 };
        total += sign * mn_beta(&next, rest);
    }
    total
}

/// Standard Young tableaux of a shape; each tableau maps the entry k (0-based)
/// to its (row, column).
pub fn standard_tableaux(shape: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        shape: &[usize],
        filled: &mut Vec<usize>,
        cells: &mut Vec<(usize, usize)>,
        total: usize,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if cells.len() == total {
            out.push(cells.clone());
            return;
        }
        for row in 0..shape.len() {
            let col = filled[row];
            if col < shape[row] && (row == 0 || filled[row - 1] > col) {
                filled[row] += 1;
                cells.push((row, col));
                rec(shape, filled, cells, total, out);
                cells.pop();
                filled[row] -= 1;
            }
        }
    }
    let total = shape.iter().sum();
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), total, &mut out);
    out
}

/// Young's orthogonal form of the adjacent transposition s_i = (i, i+1).
fn young_adjacent(tableaux: &[Vec<(usize, usize)>], i: usize) -> DMatrix<f64> {
    let d = tableaux.len();
    let mut mat = DMatrix::zeros(d, d);
    for (a, t) in tableaux.iter().enumerate() {
        let (r1, c1) = t[i];
        let (r2, c2) = t[i + 1];
        let axial = (c2 as f64 - r2 as f64) - (c1 as f64 - r1 as f64);
        mat[(a, a)] = 1.0 / axial;
        if r1 != r2 && c1 != c2 {
            let mut swapped = t.clone();
            swapped.swap(i, i + 1);
            let b = tableaux
                .iter()
                .position(|u| *u == swapped)
                .expect("swap stays standard");
            mat[(b, a)] = (1.0 - 1.0 / (axial * axial)).sqrt();
        }
    }
    mat
}

/// Young orthogonal representation matrix of a permutation.
pub fn young_matrix(shape: &[usize], perm: &[usize]) -> DMatrix<f64> {
    let tableaux = standard_tableaux(shape);
    let d = tableaux.len();
    let n = perm.len();
    let adjacent: Vec<DMatrix<f64>> = (0..n.saturating_sub(1)).map(|i| young_adjacent(&tableaux, i)).collect();
    // w = s_{j_k} ∘ … ∘ s_{j_1}, peeling descents from the right
    let mut w = perm.to_vec();
    let mut word = Vec::new();
    while let Some(j) = (0..n.saturating_sub(1)).find(|&j| w[j] > w[j + 1]) {
        w.swap(j, j + 1);
        word.push(j);
    }
    let mut mat = DMatrix::identity(d, d);
    for &j in &word {
        mat = &adjacent[j] * mat;
    }
    mat
}

/// Rotation exponent a and reflection flag of a dihedral element written as
/// δ^a or δ^a σ with δ = diag(ξ, ξ⁻¹) and σ the coordinate swap.
fn dihedral_parts(g: &GroupElement) -> (u32, bool) {
    if g.perm()[0] == 0 {
        (g.phases()[0], false)
    } else {
        (g.phases()[1], true)
    }
}

pub fn character(label: &IrrepLabel, g: &GroupElement) -> Complex64 {
    let real = |x: f64| Complex64::new(x, 0.0);
    match label {
        IrrepLabel::Partition(shape) => real(murnaghan_nakayama(shape, &g.cycle_type()) as f64),
        IrrepLabel::DihedralTriv => real(1.0),
        IrrepLabel::DihedralSign => g.sign_character(),
        IrrepLabel::DihedralRho1 | IrrepLabel::DihedralRho2 => {
            let (a, refl) = dihedral_parts(g);
            let flip = matches!(label, IrrepLabel::DihedralRho2) && refl;
            let odd = (a % 2 == 1) ^ flip;
            real(if odd { -1.0 } else { 1.0 })
        }
        IrrepLabel::DihedralTwoDim(j) => {
            let (a, refl) = dihedral_parts(g);
            if refl {
                real(0.0)
            } else {
                real(2.0 * (2.0 * PI * (*j as f64) * a as f64 / g.m() as f64).cos())
            }
        }
    }
}

/// Unitary representation matrix, when an explicit model is available.
pub fn representation_matrix(label: &IrrepLabel, g: &GroupElement) -> Result<DMatrix<Complex64>> {
    match label {
        IrrepLabel::Partition(shape) => {
            if shape.iter().sum::<usize>() > MAX_SYMMETRIC_N {
                return Err(Error::UnsupportedIrrep(label.to_string()));
            }
            Ok(young_matrix(shape, g.perm()).map(|x| Complex64::new(x, 0.0)))
        }
        IrrepLabel::DihedralTwoDim(j) => {
            let (a, refl) = dihedral_parts(g);
            let k = g.m();
            let w = Complex64::from_polar(1.0, 2.0 * PI * (*j as f64) * a as f64 / k as f64);
            let zero = Complex64::new(0.0, 0.0);
            let entries = if refl {
                [zero, w, w.conj(), zero]
            } else {
                [w, zero, zero, w.conj()]
            };
            Ok(DMatrix::from_row_slice(2, 2, &entries))
        }
        _ => Ok(DMatrix::from_element(1, 1, character(label, g))),
    }
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub spec: GroupSpec,
    pub irreps: Vec<IrrepLabel>,
    pub classes: Vec<ConjugacyClass>,
    /// values[irrep][class]
    pub values: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let irreps = irreps_of(spec)?;
        let elements = generate_group(spec, DEFAULT_GROUP_CAP)?;
        let (classes, _) = conjugacy_classes(&elements);
        let values = irreps
            .iter()
            .map(|l| classes.iter().map(|c| character(l, &c.representative)).collect())
            .collect();
        Ok(Self {
            spec: *spec,
            irreps,
            classes,
            values,
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.irreps.iter().map(IrrepLabel::degree).collect()
    }

    /// Max deviation of Σ_σ χ_ϱ(σ)·conj(χ_ϱ'(σ)) from |G|·δ_{ϱϱ'}.
    pub fn orthogonality_defect(&self) -> f64 {
        let order = self.spec.order() as f64;
        let mut worst: f64 = 0.0;
        for (a, row_a) in self.values.iter().enumerate() {
            for (b, row_b) in self.values.iter().enumerate() {
                let sum: Complex64 = self
                    .classes
                    .iter()
                    .enumerate()
                    .map(|(c, cls)| row_a[c] * row_b[c].conj() * cls.size as f64)
                    .sum();
                let target = if a == b { order } else { 0.0 };
                worst = worst.max((sum - target).norm());
            }
        }
        worst
    }
}

/// Irreducible representation labels of a supported group.
pub fn irreps_of(spec: &GroupSpec) -> Result<Vec<IrrepLabel>> {
    if spec.is_symmetric() && spec.n() <= MAX_SYMMETRIC_N {
        return Ok(partitions(spec.n()).into_iter().map(IrrepLabel::Partition).collect());
    }
    if spec.is_dihedral() && spec.m() <= MAX_DIHEDRAL_K {
        let k = spec.m();
        let mut out = vec![IrrepLabel::DihedralTriv, IrrepLabel::DihedralSign];
        if k.is_multiple_of(2) {
            out.push(IrrepLabel::DihedralRho1);
            out.push(IrrepLabel::DihedralRho2);
        }
        out.extend((1..=(k - 1) / 2).map(IrrepLabel::DihedralTwoDim));
        return Ok(out);
    }
    Err(Error::UnsupportedFamily {
        m: spec.m(),
        p: spec.p(),
        n: spec.n(),
    })
}

pub fn character_table(spec: &GroupSpec) -> Result<CharacterTable> {
    CharacterTable::new(spec)
}

/// The one-dimensional irreps among the supported labels.
pub fn linear_irreps(spec: &GroupSpec) -> Result<Vec<IrrepLabel>> {
    Ok(irreps_of(spec)?.into_iter().filter(|l| l.degree() == 1).collect())
}

pub fn trivial_irrep(spec: &GroupSpec) -> Result<IrrepLabel> {
    Ok(irreps_of(spec)?.remove(0))
}

pub fn sign_irrep(spec: &GroupSpec) -> Result<IrrepLabel> {
    let irreps = irreps_of(spec)?;
    Ok(if spec.is_symmetric() {
        irreps.last().cloned().expect("nonempty")
    } else {
        IrrepLabel::DihedralSign
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s2_table() {
        let t = character_table(&GroupSpec::symmetric(2).unwrap()).unwrap();
        assert_eq!(t.irreps.len(), 2);
        assert_eq!(t.irreps[0].to_string(), "triv");
        assert_eq!(t.irreps[1].to_string(), "sign");
        // classes: identity then swap
        assert_eq!(t.values[0], vec![Complex64::new(1.0, 0.0); 2]);
        assert_eq!(t.values[1][0].re, 1.0);
        assert_eq!(t.values[1][1].re, -1.0);
    }

    #[test]
    fn s3_degrees() {
        let t = character_table(&GroupSpec::symmetric(3).unwrap()).unwrap();
        let mut d = t.degrees();
        d.sort();
        assert_eq!(d, vec![1, 1, 2]);
        assert!(t.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn mn_known_values() {
        // S_4 standard irrep (3,1) on the 4-cycle is -1, on (2,2) is -1
        assert_eq!(murnaghan_nakayama(&[3, 1], &[4]), -1);
        assert_eq!(murnaghan_nakayama(&[3, 1], &[2, 2]), -1);
        assert_eq!(murnaghan_nakayama(&[2, 2], &[3, 1]), -1);
        assert_eq!(murnaghan_nakayama(&[2, 2], &[1, 1, 1, 1]), 2);
        // S_5 (3,1,1) at identity has degree 6
        assert_eq!(murnaghan_nakayama(&[3, 1, 1], &[1; 5]), 6);
        assert_eq!(murnaghan_nakayama(&[3, 2, 1], &[1; 6]), 16);
    }

    #[test]
    fn every_supported_table_is_orthogonal() {
        for n in 1..=6 {
            let spec = GroupSpec::symmetric(n).unwrap();
            let t = character_table(&spec).unwrap();
            assert!(t.orthogonality_defect() < 1e-10, "{spec}");
            let sq: usize = t.degrees().iter().map(|d| d * d).sum();
            assert_eq!(sq as u64, spec.order());
            assert_eq!(t.classes.len(), t.irreps.len());
        }
        for k in 2..=12 {
            let spec = GroupSpec::dihedral(k).unwrap();
            let t = character_table(&spec).unwrap();
            assert!(t.orthogonality_defect() < 1e-10, "{spec}");
            let sq: usize = t.degrees().iter().map(|d| d * d).sum();
            assert_eq!(sq as u64, spec.order());
            assert_eq!(t.classes.len(), t.irreps.len(), "{spec}");
            let linear = t.degrees().iter().filter(|&&d| d == 1).count();
            assert_eq!(linear, if k % 2 == 0 { 4 } else { 2 });
        }
    }

    #[test]
    fn d6_has_two_linear_and_one_planar_irrep() {
        let t = character_table(&GroupSpec::dihedral(3).unwrap()).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 2]);
    }

    #[test]
    fn unsupported_families() {
        for (m, p, n) in [(2, 1, 2), (3, 1, 3), (2, 2, 3), (14, 14, 2)] {
            let spec = GroupSpec::new(m, p, n).unwrap();
            assert!(matches!(character_table(&spec), Err(Error::UnsupportedFamily { .. })));
        }
        assert!(character_table(&GroupSpec::symmetric(7).unwrap()).is_err());
    }

    #[test]
    fn representation_matrices_are_unitary_homomorphisms() {
        let specs = [
            GroupSpec::symmetric(3).unwrap(),
            GroupSpec::symmetric(4).unwrap(),
            GroupSpec::dihedral(3).unwrap(),
            GroupSpec::dihedral(5).unwrap(),
            GroupSpec::dihedral(6).unwrap(),
        ];
        for spec in specs {
            let elements = generate_group(&spec, DEFAULT_GROUP_CAP).unwrap();
            for label in irreps_of(&spec).unwrap() {
                for g in &elements {
                    let pg = representation_matrix(&label, g).unwrap();
                    let d = pg.nrows();
                    assert_eq!(d, label.degree());
                    let unit = &pg * pg.adjoint() - DMatrix::identity(d, d);
                    assert!(unit.norm() < 1e-12);
                    assert!((pg.trace() - character(&label, g)).norm() < 1e-12, "{label} trace");
                    for h in elements.iter().step_by(3) {
                        let lhs = representation_matrix(&label, &g.compose(h)).unwrap();
                        let rhs = &pg * representation_matrix(&label, h).unwrap();
                        assert!((lhs - rhs).norm() < 1e-12, "{label} hom");
                    }
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        let spec = GroupSpec::symmetric(3).unwrap();
        for label in irreps_of(&spec).unwrap() {
            assert_eq!(parse_irrep(&label.to_string(), &spec).unwrap(), label);
        }
        assert_eq!(parse_irrep("2,1", &spec).unwrap(), IrrepLabel::Partition(vec![2, 1]));
        let d = GroupSpec::dihedral(6).unwrap();
        assert_eq!(parse_irrep("rho2", &d).unwrap(), IrrepLabel::DihedralRho2);
        assert_eq!(parse_irrep("2dim(2)", &d).unwrap(), IrrepLabel::DihedralTwoDim(2));
        assert!(parse_irrep("bogus", &d).is_err());
    }

    #[test]
    fn dihedral_sign_is_inverse_determinant() {
        let spec = GroupSpec::dihedral(4).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            let (_, refl) = dihedral_parts(&g);
            let s = character(&IrrepLabel::DihedralSign, &g);
            assert!((s.re - if refl { -1.0 } else { 1.0 }).abs() < 1e-12);
        }
    }
}
