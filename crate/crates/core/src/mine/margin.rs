use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{MineError, NeighborList};

/// How a pair's cosine is compared with its neighborhoods.
///
/// With `avg = mean_cos(NN(x)) / 2 + mean_cos(NN(y)) / 2`:
/// `Ratio` is `cos / avg`, `Distance` is `cos - avg`, `Absolute` is plain `cos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Margin {
    #[default]
    Ratio,
    Distance,
    Absolute,
}

impl FromStr for Margin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ratio" => Ok(Self::Ratio),
            "distance" => Ok(Self::Distance),
            "absolute" => Ok(Self::Absolute),
            other => Err(format!("unknown margin {other:?} (expected ratio, distance or absolute)")),
        }
    }
}

pub(crate) fn margin_from_means(cos_xy: f64, mean_x: f64, mean_y: f64, kind: Margin) -> Result<f64, MineError> {
    let avg = mean_x / 2.0 + mean_y / 2.0;
    match kind {
        Margin::Absolute => Ok(cos_xy),
        Margin::Distance => Ok(cos_xy - avg),
        Margin::Ratio => {
            if avg.is_nan() || avg <= 0.0 {
                return Err(MineError::DegenerateNeighborhood(avg));
            }
            Ok(cos_xy / avg)
        }
    }
}

/// Margin score of a candidate pair with cosine `cos_xy`, given the kNN lists of `x` (in the
/// target space) and of `y` (in the source space).
pub fn margin_score(cos_xy: f64, nn_x: &NeighborList, nn_y: &NeighborList, kind: Margin) -> Result<f64, MineError> {
    if nn_x.is_empty() || nn_y.is_empty() {
        return Err(MineError::DegenerateNeighborhood(f64::NAN));
    }
    margin_from_means(cos_xy, nn_x.mean_cosine(), nn_y.mean_cosine(), kind)
}
