use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{
    APDecomposition, APSet, DensityError, DensityEstimate, IndexWindow, LengthDensity,
    Progression, Verdict,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionJson {
    pub residue: u64,
    pub modulus: u64,
    pub threshold: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub length: u64,
    pub numerator: u64,
    pub denominator: u64,
    /// Start of the densest interval of this length.
    pub start: u64,
}

/// Wire form of an [`APDecomposition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub horizon: u64,
    pub progressions: Vec<ProgressionJson>,
    pub exceptional: Vec<u64>,
    pub residual: IndexWindow,
    pub residual_density_curve: Vec<DensityPoint>,
    pub verdict: String,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::BelowThreshold => "below_threshold",
        Verdict::Inconclusive => "inconclusive",
        Verdict::Exact => "exact",
    }
}

/// One point per swept length, as reduced fractions.
pub fn density_points(est: &DensityEstimate) -> Vec<DensityPoint> {
    est.per_length
        .iter()
        .map(|(&length, d)| DensityPoint {
            length,
            // Reduced fraction; both parts fit since count ≤ length.
            numerator: u64::try_from(d.fraction.numer()).unwrap_or(0),
            denominator: u64::try_from(d.fraction.denom()).unwrap_or(1),
            start: d.start,
        })
        .collect()
}

impl From<&APDecomposition> for DecompositionJson {
    fn from(d: &APDecomposition) -> Self {
        DecompositionJson {
            horizon: d.horizon,
            progressions: d
                .structured
                .progressions()
                .iter()
                .map(|p| ProgressionJson {
                    residue: p.residue(),
                    modulus: p.modulus(),
                    threshold: p.threshold(),
                })
                .collect(),
            exceptional: d.structured.exceptional().iter().copied().collect(),
            residual: d.residual.clone(),
            residual_density_curve: density_points(&d.residual_density),
            verdict: verdict_name(d.verdict).to_string(),
        }
    }
}

impl TryFrom<DecompositionJson> for APDecomposition {
    type Error = DensityError;

    fn try_from(j: DecompositionJson) -> Result<Self, Self::Error> {
        let progressions = j
            .progressions
            .iter()
            .map(|p| Progression::new(p.residue, p.modulus, p.threshold))
            .collect::<Result<Vec<_>, _>>()?;
        let verdict = match j.verdict.as_str() {
            "below_threshold" => Verdict::BelowThreshold,
            "inconclusive" => Verdict::Inconclusive,
            "exact" => Verdict::Exact,
            other => return Err(DensityError::Parse(format!("unknown verdict {other:?}"))),
        };
        let mut residual_density = DensityEstimate::unswept(j.horizon);
        for pt in &j.residual_density_curve {
            if pt.denominator == 0 {
                return Err(DensityError::Parse("zero denominator in density curve".into()));
            }
            let fraction =
                BigRational::new(BigInt::from(pt.numerator), BigInt::from(pt.denominator));
            let count = pt.numerator * pt.length / pt.denominator;
            residual_density
                .per_length
                .insert(pt.length, LengthDensity { fraction, start: pt.start, count });
        }
        if let Some(d) = residual_density.per_length.values().next_back() {
            residual_density.headline = d.fraction.clone();
        }
        Ok(APDecomposition {
            horizon: j.horizon,
            structured: APSet::new(progressions, j.exceptional),
            residual: j.residual,
            residual_density,
            verdict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::decompose;

    #[test]
    fn decomposition_json_round_trip() {
        let w = IndexWindow::from_predicate(100, |n| n == 1 || (n >= 6 && n % 3 == 0));
        let d = decompose(&w, &BigRational::new(1.into(), 10.into()), 20).unwrap();
        let json = serde_json::to_value(DecompositionJson::from(&d)).unwrap();
        assert_eq!(json["progressions"][0]["modulus"], 3);
        assert_eq!(json["progressions"][0]["threshold"], 6);
        assert_eq!(json["residual"]["members"][0], 1);
        let back: DecompositionJson = serde_json::from_value(json).unwrap();
        assert_eq!(APDecomposition::try_from(back).unwrap(), d);
    }
}
