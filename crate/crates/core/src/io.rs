//! JSON exchange formats for group elements, character tables, polynomials
//! and complex points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::CharacterTable;
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::poly::MultiPoly;

/// Group element with a 1-based permutation, as in `{"perm":[2,1],"phases":[0,1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub perm: Vec<usize>,
    pub phases: Vec<u32>,
}

impl From<&GroupElement> for ElementJson {
    fn from(g: &GroupElement) -> Self {
        Self {
            perm: g.perm().iter().map(|&i| i + 1).collect(),
            phases: g.phases().to_vec(),
        }
    }
}

impl ElementJson {
    pub fn to_element(&self, m: u32) -> Result<GroupElement> {
        if self.perm.contains(&0) {
            return Err(Error::Parse("permutation entries are 1-based".into()));
        }
        GroupElement::new(
            self.perm.iter().map(|&i| i - 1).collect(),
            self.phases.iter().map(|&k| k as i64).collect(),
            m,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntryJson {
    pub irrep: String,
    pub class: ElementJson,
    pub class_size: usize,
    pub value: [f64; 2],
}

pub fn table_entries(table: &CharacterTable) -> Vec<TableEntryJson> {
    let mut out = Vec::new();
    for (irrep, row) in table.irreps.iter().zip(&table.values) {
        for (class, v) in table.classes.iter().zip(row) {
            out.push(TableEntryJson {
                irrep: irrep.to_string(),
                class: ElementJson::from(&class.representative),
                class_size: class.size,
                value: [clean_zero(v.re), clean_zero(v.im)],
            });
        }
    }
    out
}

/// Maps −0.0 to 0.0 so that output does not depend on rounding direction.
pub fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// `{"vars": n, "terms": [{"exp": [...], "re": x, "im": y}, ...]}`, terms in
/// increasing graded-lex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

impl From<&MultiPoly> for PolyJson {
    fn from(f: &MultiPoly) -> Self {
        Self {
            vars: f.num_vars(),
            terms: f
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.to_vec(),
                    re: clean_zero(c.re),
                    im: clean_zero(c.im),
                })
                .collect(),
        }
    }
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<MultiPoly> {
        MultiPoly::from_terms(
            self.vars,
            self.terms.iter().map(|t| (t.exp.clone(), Complex64::new(t.re, t.im))),
        )
    }
}

pub fn parse_poly(s: &str) -> Result<MultiPoly> {
    let raw: PolyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    raw.to_poly()
}

/// A complex number written either as `{"re": x, "im": y}` (missing parts are
/// zero), as `[x, y]`, or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Object {
        #[serde(default)]
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        match c {
            ComplexJson::Object { re, im } => Complex64::new(re, im),
            ComplexJson::Pair([re, im]) => Complex64::new(re, im),
            ComplexJson::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

pub fn parse_point(s: &str) -> Result<Vec<Complex64>> {
    let raw: Vec<ComplexJson> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(raw.into_iter().map(Complex64::from).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self {
            re: clean_zero(z.re),
            im: clean_zero(z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_table;
    use crate::groups::{generate_group, GroupSpec, DEFAULT_GROUP_CAP};

    #[test]
    fn element_round_trip() {
        let spec = GroupSpec::new(3, 1, 3).unwrap();
        for g in generate_group(&spec, DEFAULT_GROUP_CAP).unwrap() {
            let j = ElementJson::from(&g);
            let text = serde_json::to_string(&j).unwrap();
            let back: ElementJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_element(3).unwrap(), g);
        }
        let bad = ElementJson {
            perm: vec![0, 1],
            phases: vec![0, 0],
        };
        assert!(bad.to_element(1).is_err());
    }

    #[test]
    fn table_dump() {
        let t = character_table(&GroupSpec::symmetric(3).unwrap()).unwrap();
        let entries = table_entries(&t);
        assert_eq!(entries.len(), 9);
        assert!(entries.iter().any(|e| e.irrep == "(2,1)" && e.value == [2.0, 0.0]));
    }

    #[test]
    fn poly_round_trip_and_order() {
        let f = parse_poly(
            r#"{"vars":2,"terms":[{"exp":[0,1],"re":1},{"exp":[2,0],"re":-1,"im":0.5},{"exp":[0,0],"im":2}]}"#,
        )
        .unwrap();
        let j = PolyJson::from(&f);
        assert_eq!(j.terms[0].exp, vec![0, 0]);
        assert_eq!(j.terms[2].exp, vec![2, 0]);
        assert_eq!(j.to_poly().unwrap(), f);
        assert!(parse_poly("{\"vars\":2}").is_err());
        assert!(parse_poly(r#"{"vars":2,"terms":[{"exp":[1],"re":1}]}"#).is_err());
    }

    #[test]
    fn point_formats() {
        let p = parse_point(r#"[{"re":2},{"re":1,"im":-1},[0.5,0.25],3]"#).unwrap();
        assert_eq!(
            p,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(0.5, 0.25),
                Complex64::new(3.0, 0.0)
            ]
        );
        assert!(parse_point("[{\"re\":\"x\"}]").is_err());
    }
}
