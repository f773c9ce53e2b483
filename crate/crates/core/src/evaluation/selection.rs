//! Greedy forward selection over atomic feature groups.

use alloc::vec::Vec;

use super::cv::{cross_validate_features, CvConfig, Learner, MetricSummary};
use super::EvalError;
use crate::features::{FeatureGroup, FeatureGroupSelection, FeatureMatrix};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionStep {
    pub groups: FeatureGroupSelection,
    pub summary: MetricSummary,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionReport {
    /// Every combination scored, in evaluation order.
    pub evaluated: Vec<SelectionStep>,
    /// Accepted combinations, one per round.
    pub path: Vec<FeatureGroupSelection>,
    pub selected: FeatureGroupSelection,
}

impl SelectionReport {
    pub fn score_of(&self, groups: FeatureGroupSelection) -> Option<&MetricSummary> {
        self.evaluated.iter().find(|s| s.groups == groups).map(|s| &s.summary)
    }
}

/// Starting from no groups, repeatedly adds the group whose addition gives
/// the highest mean accuracy, stopping as soon as the best addition does not
/// strictly improve on the current set. Ties go to the earlier group in
/// `groups`.
pub fn forward_select<F>(groups: &[FeatureGroup], mut objective: F) -> Result<SelectionReport, EvalError>
where
    F: FnMut(FeatureGroupSelection) -> Result<MetricSummary, EvalError>,
{
    if groups.is_empty() {
        return Err(EvalError::NoGroups);
    }
    let mut evaluated: Vec<SelectionStep> = Vec::new();
    let mut path = Vec::new();
    let mut current = FeatureGroupSelection::NONE;
    let mut current_score = f64::NEG_INFINITY;
    loop {
        let mut best: Option<(FeatureGroupSelection, f64)> = None;
        for &g in groups.iter().filter(|g| !current.contains(**g)) {
            let candidate = current.with(g);
            let summary = match evaluated.iter().find(|s| s.groups == candidate) {
                Some(s) => s.summary,
                None => {
                    let s = objective(candidate)?;
                    evaluated.push(SelectionStep { groups: candidate, summary: s });
                    s
                }
            };
            let score = summary.accuracy.mean;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((candidate, score));
            }
        }
        match best {
            Some((candidate, score)) if score > current_score => {
                current = candidate;
                current_score = score;
                path.push(candidate);
            }
            _ => break,
        }
    }
    Ok(SelectionReport {
        evaluated,
        path,
        selected: current,
    })
}

/// Forward selection scored by cross-validation on the matching columns of
/// `data`, which must hold every group in `groups`.
pub fn forward_group_selection<L: Learner, S: AsRef<str> + Sync>(
    data: &FeatureMatrix,
    subjects: &[S],
    learner: &L,
    cfg: &CvConfig,
    groups: &[FeatureGroup],
) -> Result<SelectionReport, EvalError> {
    forward_select(groups, |sel| {
        let sub = data.select_groups(sel);
        Ok(cross_validate_features(&sub, subjects, learner, cfg, "")?.summary)
    })
}

/// Every non-empty combination of `groups`, singles first, in the
/// B, H, S, B+H, B+S, H+S, B+H+S order.
pub fn all_group_combinations(groups: &[FeatureGroup]) -> Vec<FeatureGroupSelection> {
    let n = groups.len();
    let mut combos: Vec<(usize, usize, FeatureGroupSelection)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<FeatureGroup> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| groups[i]).collect();
        // order by size, then lexicographically by member positions
        let key = (0..n).filter(|i| mask & (1 << i) != 0).fold(0usize, |acc, i| acc * (n + 1) + i + 1);
        combos.push((members.len(), key, FeatureGroupSelection::from_groups(&members)));
    }
    combos.sort_by_key(|(len, key, _)| (*len, *key));
    combos.into_iter().map(|(_, _, s)| s).collect()
}

/// Scores every non-empty combination (the full table, not only the greedy
/// path).
pub fn evaluate_group_combinations<L: Learner, S: AsRef<str> + Sync>(
    data: &FeatureMatrix,
    subjects: &[S],
    learner: &L,
    cfg: &CvConfig,
    groups: &[FeatureGroup],
) -> Result<Vec<SelectionStep>, EvalError> {
    all_group_combinations(groups)
        .into_iter()
        .map(|sel| {
            let sub = data.select_groups(sel);
            let summary = cross_validate_features(&sub, subjects, learner, cfg, "")?.summary;
            Ok(SelectionStep { groups: sel, summary })
        })
        .collect()
}
