//! JSON group files.
//!
//! ```json
//! { "field": "Q", "degree": 2, "generators": [[["0", "-1"], ["1", "0"]]] }
//! ```
//!
//! `field` is `"Q"`, `{"number": "[c0, c1, ..., 1]"}` (monic integer minimal polynomial,
//! constant term first) or `{"ratfunc": {"base": "Q" | "Fq", "q": 9, "num_vars": 1}}`.
//! Optional `elements` lists further matrices (test elements for membership queries).

use serde::{Deserialize, Serialize};

use super::{Field, GeneratedGroup, Matrix, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Name(String),
    Number { number: String },
    RatFunc { ratfunc: RatFuncSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFuncSpec {
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub num_vars: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub field: FieldSpec,
    pub degree: usize,
    pub generators: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<Vec<Vec<String>>>,
}

fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']'));
    let inner = inner.ok_or_else(|| Error::Parse(format!("expected a coefficient list like [1,0,1], got {s:?}")))?;
    inner
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coefficient {c:?}"))))
        .collect()
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        match self {
            FieldSpec::Name(n) if n == "Q" => Ok(Field::Rational),
            FieldSpec::Name(n) => Err(Error::Parse(format!("unknown field {n:?}"))),
            FieldSpec::Number { number } => Field::number_field(Poly::from_ints(&parse_int_list(number)?)),
            FieldSpec::RatFunc { ratfunc } => {
                let base = match (ratfunc.base.as_str(), ratfunc.q) {
                    ("Q", None) => Field::Rational,
                    ("Fq", Some(q)) => Field::finite(q)?,
                    ("Fq", None) => return Err(Error::Parse("ratfunc over Fq needs q".into())),
                    (b, _) => return Err(Error::Parse(format!("unknown ratfunc base {b:?}"))),
                };
                Field::rational_functions(base, ratfunc.num_vars)
            }
        }
    }
}

fn parse_matrix(f: &Field, n: usize, rows: &[Vec<String>], what: &str) -> Result<Matrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what} is not {n}x{n}")));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| f.parse_scalar(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("group file: {e}")))
    }

    /// The group and the parsed `elements`.
    pub fn load(&self) -> Result<(GeneratedGroup, Vec<Matrix>)> {
        let f = self.field.build()?;
        let n = self.degree;
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| parse_matrix(&f, n, g, &format!("generator {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let elts = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, g)| parse_matrix(&f, n, g, &format!("element {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok((GeneratedGroup::new(f, n, gens)?, elts))
    }

    pub fn from_group(spec: FieldSpec, g: &GeneratedGroup) -> GroupFile {
        let f = g.field();
        let fmt = |m: &Matrix| m.rows().iter().map(|r| r.iter().map(|x| f.fmt_scalar(x)).collect()).collect();
        GroupFile { field: spec, degree: g.degree(), generators: g.gens().iter().map(fmt).collect(), elements: Vec::new() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub fn load_group(text: &str) -> Result<GeneratedGroup> {
    Ok(GroupFile::parse(text)?.load()?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"field": "Q", "degree": 2, "generators": [[["0", "-1"], ["1", "0"]], [["1", "3/4"], ["0", "1"]]]}"#;
        let gf = GroupFile::parse(text).unwrap();
        let g = gf.load().unwrap().0;
        assert_eq!(g.rank(), 2);
        let again = GroupFile::from_group(gf.field.clone(), &g);
        assert_eq!(again.load().unwrap().0.gens(), g.gens());
    }

    #[test]
    fn fields() {
        let nf = r#"{"field": {"number": "[1,0,1]"}, "degree": 1, "generators": [[["a"]]]}"#;
        assert!(matches!(load_group(nf).unwrap().field(), Field::Extension(_)));
        let rf = r#"{"field": {"ratfunc": {"base": "Fq", "q": 9, "num_vars": 1}}, "degree": 1, "generators": [[["x + a"]]]}"#;
        let g = load_group(rf).unwrap();
        assert_eq!(g.field().characteristic(), 3);
        let bad = r#"{"field": "R", "degree": 1, "generators": []}"#;
        assert!(matches!(load_group(bad), Err(Error::Parse(_))));
        let singular = r#"{"field": "Q", "degree": 1, "generators": [[["0"]]]}"#;
        assert!(matches!(load_group(singular), Err(Error::InvalidInput(_))));
    }
}
