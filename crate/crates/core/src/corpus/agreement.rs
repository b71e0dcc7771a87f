//! Inter-annotator agreement: Cohen's kappa for binary sentence labels and
//! Krippendorff's alpha for the multi-label item-listing task.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Distance between two annotated item-id sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SetDistance {
    /// 0 when the sets are equal, 1 otherwise.
    Nominal,
    /// 1 - |A ∩ B| / |A ∪ B|; two empty sets are at distance 0.
    #[default]
    Jaccard,
}

impl SetDistance {
    pub fn between(self, a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
        match self {
            SetDistance::Nominal => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            SetDistance::Jaccard => {
                let union = a.union(b).count();
                if union == 0 {
                    return 0.0;
                }
                let inter = a.intersection(b).count();
                1.0 - inter as f64 / union as f64
            }
        }
    }
}

impl std::str::FromStr for SetDistance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nominal" => Ok(SetDistance::Nominal),
            "jaccard" => Ok(SetDistance::Jaccard),
            other => Err(Error::invalid(format!("unknown distance `{other}`"))),
        }
    }
}

/// Cohen's kappa for two binary label sequences.
///
/// Returns 1 when observed agreement is perfect, including the constant
/// case where expected agreement is also 1.
pub fn cohens_kappa(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::invalid("kappa needs at least one paired label"));
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let observed = agree / n;
    if agree == n {
        return Ok(1.0);
    }
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let expected = pa * pb + (1.0 - pa) * (1.0 - pb);
    Ok((observed - expected) / (1.0 - expected))
}

/// Krippendorff's alpha over set-valued annotations.
///
/// `annotations[a][u]` is annotator `a`'s item set for unit `u`; `None`
/// marks a missing judgement. Units with fewer than two judgements are not
/// pairable and are ignored.
pub fn krippendorff_alpha(annotations: &[Vec<Option<BTreeSet<String>>>], distance: SetDistance) -> Result<f64> {
    if annotations.len() < 2 {
        return Err(Error::invalid(format!("alpha needs at least two annotators, got {}", annotations.len())));
    }
    let units = annotations[0].len();
    if let Some(bad) = annotations.iter().find(|a| a.len() != units) {
        return Err(Error::LengthMismatch { left: units, right: bad.len() });
    }

    let mut pairable = 0usize;
    let mut observed = 0.0;
    // Distinct values with their frequencies; expected disagreement only
    // depends on these counts.
    let mut values: BTreeMap<&BTreeSet<String>, usize> = BTreeMap::new();
    for u in 0..units {
        let unit: Vec<&BTreeSet<String>> = annotations.iter().filter_map(|a| a[u].as_ref()).collect();
        let m = unit.len();
        if m < 2 {
            continue;
        }
        pairable += m;
        let mut within = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    within += distance.between(unit[i], unit[j]);
                }
            }
        }
        observed += within / (m - 1) as f64;
        for v in unit {
            *values.entry(v).or_default() += 1;
        }
    }
    if pairable < 2 {
        return Err(Error::invalid("alpha needs at least one unit with two judgements"));
    }
    let n = pairable as f64;
    let observed = observed / n;

    let distinct: Vec<(&BTreeSet<String>, usize)> = values.into_iter().collect();
    let mut expected = 0.0;
    for (i, (v, cv)) in distinct.iter().enumerate() {
        for (w, cw) in &distinct[i + 1..] {
            expected += 2.0 * (*cv as f64) * (*cw as f64) * distance.between(v, w);
        }
    }
    let expected = expected / (n * (n - 1.0));
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - observed / expected)
}
