//! Scripted computations: the norm identity separating the trivial and sign
//! modules, the growth certificate for the missing bounded inverse, moment
//! profile comparisons and the dihedral family table.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::characters::{linear_irreps, IrrepLabel};
use crate::error::{Error, Result};
use crate::groups::{generate_group, GroupSpec, DEFAULT_GROUP_CAP};
use crate::hilbert::{
    default_window, moment_profile, monomial_norm2, pochhammer, poly_norm2, ModuleTruncation, MomentEntry,
};
use crate::poly::{elementary_symmetric_poly, jacobian, theta_map, MultiPoly};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative tolerance used to call two computed values different.
pub const DIFFERENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    /// The operation that produced the value.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub inputs: Vec<(String, String)>,
    pub quantities: Vec<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub notes: Vec<String>,
    pub verdict: String,
    /// Wall-clock time; left out unless requested so that reports stay
    /// byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl ExperimentReport {
    fn new(experiment: &str, inputs: Vec<(&str, String)>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            quantities: Vec::new(),
            table: None,
            notes: Vec::new(),
            verdict: String::new(),
            runtime_ms: None,
        }
    }

    fn push(&mut self, name: impl Into<String>, value: f64, source: &str) {
        self.quantities.push(Quantity {
            name: name.into(),
            value,
            source: source.to_string(),
        });
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.name == name).map(|q| q.value)
    }

    pub fn with_runtime(mut self, start: Instant) -> Self {
        self.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        self
    }

    /// CSV: the table when there is one, otherwise the quantity list.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(t) => {
                out.push_str(&t.columns.join(","));
                out.push('\n');
                for row in &t.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("name,value,source\n");
                for q in &self.quantities {
                    out.push_str(&format!("{},{:e},{}\n", q.name, q.value, q.source));
                }
            }
        }
        out
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// 1/λⁿ against n!/(λ)ₙ, the squared moments ‖sₙ·1‖²/‖1‖² and
/// ‖sₙ·J‖²/‖J‖² of the trivial and sign modules of Sₙ. Both sides are also
/// recomputed from monomial norms of the expanded polynomials.
pub fn prop_inequiv_check(n: usize, lambda: f64) -> Result<ExperimentReport> {
    if n < 2 || !(lambda >= 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "need n >= 2 and lambda >= 1, got n={n}, lambda={lambda}"
        )));
    }
    let mut rep = ExperimentReport::new("inequiv", vec![("n", n.to_string()), ("lambda", lambda.to_string())]);
    let lhs = 1.0 / lambda.powi(n as i32);
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let rhs = factorial / pochhammer(lambda, n as u32);
    rep.push("lhs_closed", lhs, "1/lambda^n");
    rep.push("rhs_closed", rhs, "pochhammer");

    let ones = vec![1u32; n];
    let lhs_gram = monomial_norm2(&ones, lambda);
    let spec = GroupSpec::symmetric(n)?;
    let j = jacobian(&theta_map(&spec)?);
    let sn = elementary_symmetric_poly(n, n);
    let rhs_gram = poly_norm2(&(&sn * &j), lambda) / poly_norm2(&j, lambda);
    rep.push("lhs_gram", lhs_gram, "monomial_norm2");
    rep.push("rhs_gram", rhs_gram, "monomial_norm2 of expanded s_n*J");
    rep.push("lhs_agreement", relative_gap(lhs, lhs_gram), "relative gap");
    rep.push("rhs_agreement", relative_gap(rhs, rhs_gram), "relative gap");

    rep.verdict = if relative_gap(lhs, rhs) > DIFFERENCE_TOL {
        "inequivalent-witness".into()
    } else {
        "no-witness".into()
    };
    Ok(rep)
}

/// H_m = 1 + 1/2 + … + 1/m.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

pub const MAX_GROWTH_M: usize = 200;

/// r(m) = ‖Σ_{k=1}^m z₁^{m−k}z₂^{k−1}‖² / ‖z₁^m − z₂^m‖² for m = 1..=m_max.
pub fn growth_ratio(m: usize, lambda: f64) -> f64 {
    let m32 = m as u32;
    let num: f64 = (1..=m32).map(|k| monomial_norm2(&[m32 - k, k - 1], lambda)).sum();
    let den = 2.0 * monomial_norm2(&[m32, 0], lambda);
    num / den
}

pub fn unbdd_growth(lambda: f64, m_max: usize) -> Result<ExperimentReport> {
    if m_max == 0 || m_max > MAX_GROWTH_M {
        return Err(Error::PreconditionFailed(format!(
            "m_max must lie in 1..={MAX_GROWTH_M}, got {m_max}"
        )));
    }
    if !(lambda >= 1.0) {
        return Err(Error::PreconditionFailed(format!("lambda must be >= 1, got {lambda}")));
    }
    let mut rep = ExperimentReport::new(
        "unbdd",
        vec![("lambda", lambda.to_string()), ("mmax", m_max.to_string())],
    );
    let closed = |m: usize| -> Option<f64> {
        if lambda == 2.0 {
            Some(harmonic(m))
        } else if lambda == 1.0 {
            Some(m as f64 / 2.0)
        } else {
            None
        }
    };
    let mut rows = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut worst_closed = 0.0f64;
    let mut worst_partial = 0.0f64;
    for m in 1..=m_max {
        let r = growth_ratio(m, lambda);
        monotone &= r > prev;
        prev = r;
        let c = closed(m);
        if let Some(c) = c {
            worst_closed = worst_closed.max(relative_gap(r, c));
        }
        // Σ 1/((m+1−k)k) = 2H_m/(m+1), the partial-fraction route
        let partial: f64 = (1..=m).map(|k| 1.0 / (((m + 1 - k) * k) as f64)).sum();
        let partial_closed = 2.0 * harmonic(m) / (m + 1) as f64;
        worst_partial = worst_partial.max(relative_gap(partial, partial_closed));
        rows.push(vec![
            m.to_string(),
            format!("{r:.17e}"),
            c.map_or_else(|| "".into(), |c| format!("{c:.17e}")),
        ]);
    }
    rep.push("r_first", growth_ratio(1, lambda), "monomial_norm2");
    rep.push("r_last", prev, "monomial_norm2");
    if closed(1).is_some() {
        rep.push("closed_form_max_relative_gap", worst_closed, "harmonic number or m/2");
    }
    rep.push("partial_fraction_max_relative_gap", worst_partial, "partial fractions");
    if lambda == 1.0 {
        let m = m_max as u32;
        let num: f64 = (1..=m).map(|k| monomial_norm2(&[m - k, k - 1], 1.0)).sum();
        rep.push("hardy_numerator_at_mmax", num, "monomial_norm2");
        rep.push(
            "hardy_denominator",
            2.0 * monomial_norm2(&[m, 0], 1.0),
            "monomial_norm2",
        );
        rep.notes.push(
            "Hardy norms give numerator m and denominator 2, so a bounded inverse with constant K forces m <= 2K^2, \
             which fails for large m (the sharper-looking m^2 <= 4K^2 is not what the norms give)."
                .into(),
        );
    }
    rep.table = Some(Table {
        columns: vec!["m".into(), "r".into(), "closed_form".into()],
        rows,
    });
    rep.verdict = if monotone && m_max > 1 {
        "unbounded"
    } else {
        "inconclusive"
    }
    .into();
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProfileVerdict {
    Witness {
        q: Vec<u32>,
        first: f64,
        second: f64,
    },
    /// Profiles agree over the window; this invariant does not separate them.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileComparison {
    pub first: Vec<MomentEntry>,
    pub second: Vec<MomentEntry>,
    pub verdict: ProfileVerdict,
}

/// Compares the moment profiles of the two isotypes (first diagonal block) on
/// invariant monomials of weighted degree ≤ d. A differing entry rules out a
/// unitary equivalence; agreement proves nothing.
pub fn moment_profile_inequivalence(
    spec: &GroupSpec,
    lambda: f64,
    first: &IrrepLabel,
    second: &IrrepLabel,
    d: u32,
) -> Result<ProfileComparison> {
    let window = default_window(spec.n()).max(spec.m() * spec.n() as u32 + 1);
    let trunc = ModuleTruncation::new(spec.n(), lambda, window)?;
    let a = moment_profile(spec, first, 0, &trunc, d)?;
    let b = moment_profile(spec, second, 0, &trunc, d)?;
    let verdict = a
        .iter()
        .zip(&b)
        .find(|(x, y)| relative_gap(x.value, y.value) > 1e-9)
        .map_or(ProfileVerdict::Inconclusive, |(x, y)| ProfileVerdict::Witness {
            q: x.q.clone(),
            first: x.value,
            second: y.value,
        });
    Ok(ProfileComparison {
        first: a,
        second: b,
        verdict,
    })
}

/// Σ_{σ∈G} |f(σ·z)|² at each sample point.
pub fn symmetrized_modulus_profile(f: &MultiPoly, spec: &GroupSpec, samples: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    if f.num_vars() != spec.n() {
        return Err(Error::ArityMismatch {
            expected: spec.n(),
            got: f.num_vars(),
        });
    }
    let elements = generate_group(spec, DEFAULT_GROUP_CAP)?;
    samples
        .iter()
        .map(|z| {
            if z.len() != spec.n() {
                return Err(Error::ArityMismatch {
                    expected: spec.n(),
                    got: z.len(),
                });
            }
            Ok(elements.iter().map(|g| f.eval(&g.act_on_point(z)).norm_sqr()).sum())
        })
        .collect()
}

/// Runs the profile comparison on every pair of one-dimensional irreps of the
/// dihedral group G(k,k,2).
pub fn dihedral_family_report(k: u32, lambda: f64, d: u32) -> Result<ExperimentReport> {
    let spec = GroupSpec::dihedral(k)?;
    let irreps = linear_irreps(&spec)?;
    let mut rep = ExperimentReport::new(
        "dihedral",
        vec![
            ("k", k.to_string()),
            ("lambda", lambda.to_string()),
            ("degree", d.to_string()),
        ],
    );
    rep.push("one_dimensional_irreps", irreps.len() as f64, "character table");
    let mut rows = Vec::new();
    let mut witnesses = 0;
    for a in 0..irreps.len() {
        for b in a + 1..irreps.len() {
            let cmp = moment_profile_inequivalence(&spec, lambda, &irreps[a], &irreps[b], d)?;
            let (verdict, q, x, y) = match &cmp.verdict {
                ProfileVerdict::Witness { q, first, second } => {
                    witnesses += 1;
                    (
                        "witness",
                        format!("{q:?}").replace(',', " "),
                        format!("{first:.17e}"),
                        format!("{second:.17e}"),
                    )
                }
                ProfileVerdict::Inconclusive => ("inconclusive", String::new(), String::new(), String::new()),
            };
            rows.push(vec![
                irreps[a].to_string(),
                irreps[b].to_string(),
                verdict.into(),
                q,
                x,
                y,
            ]);
        }
    }
    rep.push("pairs_tested", rows.len() as f64, "pair enumeration");
    rep.push("witnesses", witnesses as f64, "moment_profile_inequivalence");
    rep.verdict = if witnesses == rows.len() {
        "all-pairs-separated".into()
    } else {
        "some-pairs-inconclusive".into()
    };
    rep.table = Some(Table {
        columns: ["irrep1", "irrep2", "verdict", "q", "value1", "value2"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    });
    Ok(rep)
}
