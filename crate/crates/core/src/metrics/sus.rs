use serde::{Deserialize, Serialize};

use super::MetricsError;

pub const SUS_ITEMS: usize = 10;

/// Ten 5-point Likert answers (1 = strongly disagree, 5 = strongly agree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SusResponse {
    items: [u8; SUS_ITEMS],
}

impl SusResponse {
    pub fn new(items: [u8; SUS_ITEMS]) -> Result<Self, MetricsError> {
        Self::from_scores(&items.map(i64::from))
    }

    pub fn from_scores(scores: &[i64]) -> Result<Self, MetricsError> {
        if scores.len() != SUS_ITEMS {
            return Err(MetricsError::WrongItemCount(scores.len()));
        }
        let mut items = [0u8; SUS_ITEMS];
        for (i, &v) in scores.iter().enumerate() {
            if !(1..=5).contains(&v) {
                return Err(MetricsError::OutOfRangeItem {
                    item: i + 1,
                    value: v,
                });
            }
            items[i] = v as u8;
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> [u8; SUS_ITEMS] {
        self.items
    }
}

impl TryFrom<Vec<i64>> for SusResponse {
    type Error = MetricsError;

    fn try_from(v: Vec<i64>) -> Result<Self, MetricsError> {
        Self::from_scores(&v)
    }
}

impl From<SusResponse> for Vec<i64> {
    fn from(r: SusResponse) -> Self {
        r.items.iter().map(|&x| i64::from(x)).collect()
    }
}

/// Standard SUS score in [0, 100]. Odd items contribute `score − 1`, even
/// items `5 − score`; the sum is scaled by 2.5.
pub fn sus_score(r: &SusResponse) -> f64 {
    let sum: u32 = r
        .items
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if i % 2 == 0 {
                u32::from(s) - 1
            } else {
                5 - u32::from(s)
            }
        })
        .sum();
    2.5 * f64::from(sum)
}
