//! Coarse-graining maps: total, single-valued assignments of fine history
//! labels to coarser class labels.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::histories::HistoryIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseGrainingMap {
    assignment: BTreeMap<String, String>,
}

/// The cells a map induces on an ordered list of fine labels.
///
/// Bar labels appear in order of first occurrence along the fine labels, so
/// the identity map preserves the fine ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cells {
    pub labels: Vec<String>,
    /// `cell_of[i]` is the cell holding fine label `i`.
    pub cell_of: Vec<usize>,
}

impl Cells {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl CoarseGrainingMap {
    pub fn new(assignment: BTreeMap<String, String>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidParameter(
                "coarse-graining map must assign at least one label".into(),
            ));
        }
        Ok(CoarseGrainingMap { assignment })
    }

    pub fn from_fn<I, S, F>(fine_labels: I, mut f: F) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
        F: FnMut(&str) -> String,
    {
        Self::new(
            fine_labels
                .into_iter()
                .map(|l| {
                    let l = l.as_ref();
                    (l.to_string(), f(l))
                })
                .collect(),
        )
    }

    pub fn identity<I, S>(fine_labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::from_fn(fine_labels, |l| l.to_string())
    }

    pub fn all_to_one<I, S>(fine_labels: I, bar: &str) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::from_fn(fine_labels, |_| bar.to_string())
    }

    pub fn from_index_fn<F>(histories: &[HistoryIndex], mut f: F) -> Result<Self>
    where
        F: FnMut(&HistoryIndex) -> String,
    {
        Self::new(histories.iter().map(|a| (a.to_string(), f(a))).collect())
    }

    /// Keep only the listed time slots of each history; the bar label is
    /// the restricted index.
    pub fn marginal(histories: &[HistoryIndex], slots: &[usize]) -> Result<Self> {
        for a in histories {
            if let Some(&bad) = slots.iter().find(|&&s| s >= a.len()) {
                return Err(Error::InvalidParameter(format!(
                    "slot {bad} out of range for history {a}"
                )));
            }
        }
        Self::from_index_fn(histories, |a| {
            HistoryIndex::new(slots.iter().map(|&s| a.alphas()[s]).collect()).to_string()
        })
    }

    pub fn bar_of(&self, fine: &str) -> Option<&str> {
        self.assignment.get(fine).map(String::as_str)
    }

    pub fn assignment(&self) -> &BTreeMap<String, String> {
        &self.assignment
    }

    /// The composite map `outer ∘ self`.
    pub fn then(&self, outer: &CoarseGrainingMap) -> Result<CoarseGrainingMap> {
        let mut missing = Vec::new();
        let mut assignment = BTreeMap::new();
        for (fine, mid) in &self.assignment {
            match outer.bar_of(mid) {
                Some(bar) => {
                    assignment.insert(fine.clone(), bar.to_string());
                }
                None => missing.push(mid.clone()),
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::Coverage { missing });
        }
        Self::new(assignment)
    }

    /// Cells induced on `fine_labels`. Every fine label must be assigned and
    /// every assigned label must occur.
    pub fn cells(&self, fine_labels: &[String]) -> Result<Cells> {
        let missing: Vec<String> = fine_labels
            .iter()
            .filter(|l| !self.assignment.contains_key(*l))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::Coverage { missing });
        }
        if self.assignment.len() != fine_labels.len() {
            let known: std::collections::HashSet<&str> =
                fine_labels.iter().map(String::as_str).collect();
            let unknown: Vec<String> = self
                .assignment
                .keys()
                .filter(|k| !known.contains(k.as_str()))
                .cloned()
                .collect();
            if !unknown.is_empty() {
                return Err(Error::UnknownLabels(unknown));
            }
        }
        let mut labels = Vec::new();
        let mut position: HashMap<&str, usize> = HashMap::new();
        let mut cell_of = Vec::with_capacity(fine_labels.len());
        for fine in fine_labels {
            let bar = &self.assignment[fine];
            let idx = *position.entry(bar.as_str()).or_insert_with(|| {
                labels.push(bar.clone());
                labels.len() - 1
            });
            cell_of.push(idx);
        }
        Ok(Cells { labels, cell_of })
    }
}
