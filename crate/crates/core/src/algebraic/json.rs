use serde::{Deserialize, Serialize};

use super::map::{AffineClosedSet, PolyMap};
use super::poly::MultiPoly;
use super::scalar::{ExactScalar, Field};
use super::AlgebraicError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldJson {
    /// Only `"Q"` is accepted.
    Named(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    pub exps: Vec<u32>,
}

pub type PolyJson = Vec<TermJson>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub num: Vec<PolyJson>,
    /// Omitted denominators mean a polynomial map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<PolyJson>>,
}

/// A coordinate: `"n/d"`, `"n"`, or a bare JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordJson {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub field: FieldJson,
    pub arity: usize,
    pub map: MapJson,
    pub start: Vec<CoordJson>,
    #[serde(default)]
    pub target: Vec<PolyJson>,
}

/// A parsed algebraic system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicSystem {
    pub map: PolyMap,
    pub start: Vec<ExactScalar>,
    pub target: AffineClosedSet,
}

fn parse_scalar(field: Field, text: &str) -> Result<ExactScalar, AlgebraicError> {
    let q = crate::parse_rational(text).ok_or_else(|| AlgebraicError::Parse(format!("bad coefficient {text:?}")))?;
    ExactScalar::from_rational(field, &q)
}

fn parse_poly(field: Field, arity: usize, poly: &PolyJson) -> Result<MultiPoly, AlgebraicError> {
    let terms = poly
        .iter()
        .map(|t| Ok((t.exps.clone(), parse_scalar(field, &t.coef)?)))
        .collect::<Result<Vec<_>, AlgebraicError>>()?;
    MultiPoly::from_terms(arity, field, terms)
}

fn poly_json(p: &MultiPoly) -> PolyJson {
    p.terms().rev().map(|(m, c)| TermJson { coef: c.to_exact_string(), exps: m.0.clone() }).collect()
}

impl SystemJson {
    pub fn field(&self) -> Result<Field, AlgebraicError> {
        match &self.field {
            FieldJson::Named(n) if n == "Q" => Ok(Field::Rational),
            FieldJson::Named(n) => Err(AlgebraicError::Parse(format!("unknown field {n:?}"))),
            FieldJson::Prime { fp } => Field::prime(*fp),
        }
    }

    pub fn system(&self) -> Result<AlgebraicSystem, AlgebraicError> {
        let field = self.field()?;
        let v = self.arity;
        if self.map.num.len() != v {
            return Err(AlgebraicError::ArityMismatch { expected: v, got: self.map.num.len() });
        }
        let num = self.map.num.iter().map(|p| parse_poly(field, v, p)).collect::<Result<Vec<_>, _>>()?;
        let map = match &self.map.den {
            None => PolyMap::polynomial(num)?,
            Some(den) => {
                let den = den.iter().map(|p| parse_poly(field, v, p)).collect::<Result<Vec<_>, _>>()?;
                PolyMap::new(num, den)?
            }
        };
        let start = self
            .start
            .iter()
            .map(|c| match c {
                CoordJson::Int(i) => Ok(ExactScalar::from_i64(field, *i)),
                CoordJson::Text(t) => parse_scalar(field, t),
            })
            .collect::<Result<Vec<_>, _>>()?;
        map.check_point(&start)?;
        let target = AffineClosedSet::new(self.target.iter().map(|p| parse_poly(field, v, p)).collect::<Result<_, _>>()?);
        Ok(AlgebraicSystem { map, start, target })
    }

    pub fn from_system(sys: &AlgebraicSystem) -> Self {
        let field = match sys.map.field() {
            Field::Rational => FieldJson::Named("Q".into()),
            Field::Prime(p) => FieldJson::Prime { fp: p },
        };
        let polynomial = sys.map.denominators().iter().all(|d| d.constant_value().is_some_and(|c| c.is_one()));
        SystemJson {
            field,
            arity: sys.map.arity(),
            map: MapJson {
                num: sys.map.numerators().iter().map(poly_json).collect(),
                den: (!polynomial).then(|| sys.map.denominators().iter().map(poly_json).collect()),
            },
            start: sys.start.iter().map(|c| CoordJson::Text(c.to_exact_string())).collect(),
            target: sys.target.generators.iter().map(poly_json).collect(),
        }
    }
}
