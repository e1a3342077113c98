//! Evaluation against human gold-standard proximity judgments: dispersion
//! statistics, average absolute deviation split by same/cross-ECT, and the
//! mean-ratio compensatory scaling.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ect::{ect_index, Ect};
use crate::error::{CcdpError, Result};

/// Canonical unordered message-id pair key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey(pub String, pub String);

impl PairKey {
    pub fn new(a: &str, b: &str) -> PairKey {
        if a <= b {
            PairKey(a.to_string(), b.to_string())
        } else {
            PairKey(b.to_string(), a.to_string())
        }
    }
}

impl std::fmt::Display for PairKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}~{}", self.0, self.1)
    }
}

/// Per-pair rater scores plus their arithmetic mean.
#[derive(Debug, Clone, Default)]
pub struct GoldStandard {
    pub ratings: BTreeMap<PairKey, Vec<f64>>,
}

impl GoldStandard {
    pub fn aggregated(&self) -> BTreeMap<PairKey, f64> {
        self.ratings
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().sum::<f64>() / v.len() as f64))
            .collect()
    }
}

/// Load a `msg_a,msg_b,rater,score` CSV.
pub fn load_gold_standard(path: &Path) -> Result<GoldStandard> {
    let file = std::fs::File::open(path)?;
    read_gold_standard(file)
}

pub fn read_gold_standard<R: Read>(reader: R) -> Result<GoldStandard> {
    let mut rdr = csv::Reader::from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| CcdpError::SchemaViolation {
            path: "header".into(),
            message: e.to_string(),
        })?;
        let expected = ["msg_a", "msg_b", "rater", "score"];
        if headers.iter().map(str::trim).collect::<Vec<_>>() != expected {
            return Err(CcdpError::SchemaViolation {
                path: "header".into(),
                message: format!("expected columns {expected:?}, got {headers:?}"),
            });
        }
    }
    let mut gold = GoldStandard::default();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2; // 1-based, after header
        let record = record.map_err(|e| CcdpError::SchemaViolation {
            path: format!("row {row}"),
            message: e.to_string(),
        })?;
        let get = |idx: usize| record.get(idx).unwrap_or("").trim();
        let score: f64 = get(3).parse().map_err(|e| CcdpError::SchemaViolation {
            path: format!("row {row}, column score"),
            message: format!("{e}"),
        })?;
        if !(0.0..=1.0).contains(&score) {
            return Err(CcdpError::OutOfRangeScore { row, value: score });
        }
        let key = PairKey::new(get(0), get(1));
        if key.0.is_empty() || key.1.is_empty() {
            return Err(CcdpError::SchemaViolation {
                path: format!("row {row}"),
                message: "empty message id".into(),
            });
        }
        gold.ratings.entry(key).or_default().push(score);
    }
    Ok(gold)
}

/// Max, min and mean of a value set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub max: f64,
    pub min: f64,
    pub average: f64,
}

pub fn dispersion_stats(values: &[f64]) -> Result<Dispersion> {
    if values.is_empty() {
        return Err(CcdpError::EmptyInput);
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let average = values.iter().sum::<f64>() / values.len() as f64;
    Ok(Dispersion { max, min, average })
}

/// Mean of |gs(p) - cp(p)| over the shared key set; both maps must cover
/// exactly the same pairs.
pub fn average_absolute_deviation(
    gs: &BTreeMap<PairKey, f64>,
    cp: &BTreeMap<PairKey, f64>,
) -> Result<f64> {
    let missing: Vec<String> = gs
        .keys()
        .filter(|k| !cp.contains_key(k))
        .chain(cp.keys().filter(|k| !gs.contains_key(k)))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CcdpError::KeyMismatch(missing));
    }
    if gs.is_empty() {
        return Err(CcdpError::EmptyInput);
    }
    let sum: f64 = gs.iter().map(|(k, &g)| (g - cp[k]).abs()).sum();
    Ok(sum / gs.len() as f64)
}

/// Split pairs by whether both members share an ECT.
pub fn stratify<'a, I: IntoIterator<Item = &'a PairKey>>(
    pairs: I,
    ects: &[Ect],
) -> Result<(Vec<PairKey>, Vec<PairKey>)> {
    let index = ect_index(ects);
    let mut same = Vec::new();
    let mut cross = Vec::new();
    for pair in pairs {
        let a = index
            .get(pair.0.as_str())
            .ok_or_else(|| CcdpError::UnknownMessage(pair.0.clone()))?;
        let b = index
            .get(pair.1.as_str())
            .ok_or_else(|| CcdpError::UnknownMessage(pair.1.clone()))?;
        if a == b {
            same.push(pair.clone());
        } else {
            cross.push(pair.clone());
        }
    }
    Ok((same, cross))
}

/// Mean-ratio compensatory coefficient: scale the gold standard so its mean
/// equals the calculated-proximity mean. Multiplicative, so the rank order
/// of gold values is preserved.
pub fn compensatory_scale(gs_values: &[f64], cp_values: &[f64]) -> Result<(f64, Vec<f64>)> {
    if gs_values.is_empty() || cp_values.is_empty() {
        return Err(CcdpError::EmptyInput);
    }
    let gs_mean = gs_values.iter().sum::<f64>() / gs_values.len() as f64;
    let cp_mean = cp_values.iter().sum::<f64>() / cp_values.len() as f64;
    if gs_mean == 0.0 {
        return Err(CcdpError::ZeroGoldMean);
    }
    let coefficient = cp_mean / gs_mean;
    Ok((
        coefficient,
        gs_values.iter().map(|v| v * coefficient).collect(),
    ))
}

/// Dispersion + deviation for one stratum of pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumStats {
    pub pair_count: usize,
    pub gold: Dispersion,
    pub calculated: Dispersion,
    pub average_absolute_deviation: f64,
}

/// The full evaluation report: dispersion per stratum plus scaling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub pairs: BTreeMap<String, PairScores>,
    pub all: StratumStats,
    pub same_ect: Option<StratumStats>,
    pub cross_ect: Option<StratumStats>,
    pub compensatory_coefficient: f64,
    /// Gold dispersion after mean-ratio scaling, with the deviation against
    /// the calculated proximities recomputed on the scaled values.
    pub scaled_gold: Dispersion,
    pub scaled_average_absolute_deviation: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairScores {
    pub gold: f64,
    pub calculated: f64,
}

fn stratum(
    pairs: &[PairKey],
    gs: &BTreeMap<PairKey, f64>,
    cp: &BTreeMap<PairKey, f64>,
) -> Result<StratumStats> {
    let gvals: Vec<f64> = pairs.iter().map(|k| gs[k]).collect();
    let cvals: Vec<f64> = pairs.iter().map(|k| cp[k]).collect();
    let sub_gs: BTreeMap<PairKey, f64> = pairs.iter().map(|k| (k.clone(), gs[k])).collect();
    let sub_cp: BTreeMap<PairKey, f64> = pairs.iter().map(|k| (k.clone(), cp[k])).collect();
    Ok(StratumStats {
        pair_count: pairs.len(),
        gold: dispersion_stats(&gvals)?,
        calculated: dispersion_stats(&cvals)?,
        average_absolute_deviation: average_absolute_deviation(&sub_gs, &sub_cp)?,
    })
}

/// Compare aggregated gold scores with calculated proximities over the same
/// pair set, overall and split by stratum.
pub fn evaluate(
    gold: &GoldStandard,
    cp: &BTreeMap<PairKey, f64>,
    ects: &[Ect],
) -> Result<EvalReport> {
    let gs = gold.aggregated();
    let all_pairs: Vec<PairKey> = gs.keys().cloned().collect();
    let all = stratum(&all_pairs, &gs, cp)?;
    let (same, cross) = stratify(all_pairs.iter(), ects)?;
    let same_ect = if same.is_empty() {
        None
    } else {
        Some(stratum(&same, &gs, cp)?)
    };
    let cross_ect = if cross.is_empty() {
        None
    } else {
        Some(stratum(&cross, &gs, cp)?)
    };

    let gvals: Vec<f64> = all_pairs.iter().map(|k| gs[k]).collect();
    let cvals: Vec<f64> = all_pairs.iter().map(|k| cp[k]).collect();
    let (coefficient, scaled) = compensatory_scale(&gvals, &cvals)?;
    let scaled_gs: BTreeMap<PairKey, f64> = all_pairs
        .iter()
        .cloned()
        .zip(scaled.iter().copied())
        .collect();
    let sub_cp: BTreeMap<PairKey, f64> =
        all_pairs.iter().map(|k| (k.clone(), cp[k])).collect();

    Ok(EvalReport {
        pairs: all_pairs
            .iter()
            .map(|k| {
                (
                    k.to_string(),
                    PairScores {
                        gold: gs[k],
                        calculated: cp[k],
                    },
                )
            })
            .collect(),
        all,
        same_ect,
        cross_ect,
        compensatory_coefficient: coefficient,
        scaled_gold: dispersion_stats(&scaled)?,
        scaled_average_absolute_deviation: average_absolute_deviation(&scaled_gs, &sub_cp)?,
    })
}
