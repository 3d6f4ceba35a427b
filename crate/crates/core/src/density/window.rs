use serde::{Deserialize, Serialize};

use super::DensityError;

/// A finite observed slice `S ∩ [0, horizon)` of a set of naturals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct IndexWindow {
    horizon: u64,
    members: Vec<u64>,
}

#[derive(Deserialize)]
struct RawWindow {
    horizon: u64,
    members: Vec<u64>,
}

impl TryFrom<RawWindow> for IndexWindow {
    type Error = DensityError;

    fn try_from(raw: RawWindow) -> Result<Self, Self::Error> {
        IndexWindow::new(raw.horizon, raw.members)
    }
}

impl IndexWindow {
    /// Builds a window from strictly increasing members, all below `horizon`.
    pub fn new(horizon: u64, members: Vec<u64>) -> Result<Self, DensityError> {
        for pair in members.windows(2) {
            if pair[1] <= pair[0] {
                return Err(DensityError::NotIncreasing { prev: pair[0], next: pair[1] });
            }
        }
        if let Some(&last) = members.last() {
            if last >= horizon {
                return Err(DensityError::MemberBeyondHorizon { member: last, horizon });
            }
        }
        Ok(Self { horizon, members })
    }

    pub fn empty(horizon: u64) -> Self {
        Self { horizon, members: Vec::new() }
    }

    /// Sorts and deduplicates, dropping anything at or beyond the horizon.
    pub fn from_unsorted(horizon: u64, members: impl IntoIterator<Item = u64>) -> Self {
        let mut members: Vec<u64> = members.into_iter().filter(|&m| m < horizon).collect();
        members.sort_unstable();
        members.dedup();
        Self { horizon, members }
    }

    pub fn from_predicate(horizon: u64, mut pred: impl FnMut(u64) -> bool) -> Self {
        Self { horizon, members: (0..horizon).filter(|&n| pred(n)).collect() }
    }

    pub fn from_indicator(indicator: &[bool]) -> Self {
        let members = indicator
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i as u64))
            .collect();
        Self { horizon: indicator.len() as u64, members }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.horizon as usize];
        for &m in &self.members {
            out[m as usize] = true;
        }
        out
    }

    /// Members of `self` that are not in `other`.
    pub fn difference(&self, other: &IndexWindow) -> IndexWindow {
        let members = self.members.iter().copied().filter(|&m| !other.contains(m)).collect();
        IndexWindow { horizon: self.horizon, members }
    }

    /// Plain-text form: a `# horizon=H` header followed by one member per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# horizon={}\n", self.horizon);
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, DensityError> {
        let mut horizon = None;
        let mut members = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(h) = rest.trim().strip_prefix("horizon=") {
                    let h = h.trim().parse::<u64>().map_err(|e| {
                        DensityError::Parse(format!("line {}: bad horizon: {e}", lineno + 1))
                    })?;
                    horizon = Some(h);
                }
                continue;
            }
            let m = line
                .parse::<u64>()
                .map_err(|e| DensityError::Parse(format!("line {}: {e}", lineno + 1)))?;
            members.push(m);
        }
        let horizon =
            horizon.ok_or_else(|| DensityError::Parse("missing `# horizon=H` header".into()))?;
        IndexWindow::new(horizon, members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_members() {
        assert!(matches!(
            IndexWindow::new(5, vec![1, 1]),
            Err(DensityError::NotIncreasing { .. })
        ));
        assert!(matches!(
            IndexWindow::new(5, vec![1, 5]),
            Err(DensityError::MemberBeyondHorizon { member: 5, horizon: 5 })
        ));
        assert!(IndexWindow::new(0, vec![]).unwrap().is_empty());
    }

    #[test]
    fn text_format() {
        let w = IndexWindow::new(10, vec![0, 3, 9]).unwrap();
        let text = w.to_text();
        assert_eq!(text, "# horizon=10\n0\n3\n9\n");
        assert_eq!(IndexWindow::from_text(&text).unwrap(), w);
        assert!(IndexWindow::from_text("1\n2\n").is_err());
    }

    #[test]
    fn json_format_validates() {
        let w: IndexWindow = serde_json::from_str(r#"{"horizon": 4, "members": [1, 2]}"#).unwrap();
        assert_eq!(w.members(), &[1, 2]);
        assert!(serde_json::from_str::<IndexWindow>(r#"{"horizon": 2, "members": [3]}"#).is_err());
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"horizon":4,"members":[1,2]}"#);
    }
}
