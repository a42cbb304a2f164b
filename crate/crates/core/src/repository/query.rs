//! Filtered, ordered retrieval and the recent/popular reports.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use patchr_rdf::Iri;
use serde::{Deserialize, Serialize};

use super::state::RepositoryState;
use super::RepositoryError;
use crate::model::{Patch, PatchStatus, PatchType};
use crate::registry::{Named, Registry};

/// A total order on patches.
pub trait PatchOrdering: Named + Send + Sync {
    fn compare(&self, a: &Patch, b: &Patch) -> Ordering;
}

/// Latest provenance timestamp descending, then id ascending.
pub struct MostRecent;

/// Advocate count descending, then latest provenance descending, then id
/// ascending. Criticisers do not count.
pub struct MostPopular;

impl Named for MostRecent {
    fn name(&self) -> &'static str {
        "recent"
    }
}

impl PatchOrdering for MostRecent {
    fn compare(&self, a: &Patch, b: &Patch) -> Ordering {
        b.body
            .latest_activity()
            .cmp(&a.body.latest_activity())
            .then_with(|| a.id.cmp(&b.id))
    }
}

impl Named for MostPopular {
    fn name(&self) -> &'static str {
        "popular"
    }
}

impl PatchOrdering for MostPopular {
    fn compare(&self, a: &Patch, b: &Patch) -> Ordering {
        b.body
            .advocates
            .len()
            .cmp(&a.body.advocates.len())
            .then_with(|| MostRecent.compare(a, b))
    }
}

pub fn ordering_registry() -> Registry<dyn PatchOrdering> {
    let mut r: Registry<dyn PatchOrdering> = Registry::new();
    r.register(Box::new(MostRecent));
    r.register(Box::new(MostPopular));
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PatchOrder {
    #[default]
    #[serde(rename = "recent")]
    MostRecent,
    #[serde(rename = "popular")]
    MostPopular,
}

impl PatchOrder {
    pub fn strategy(self) -> &'static dyn PatchOrdering {
        match self {
            PatchOrder::MostRecent => &MostRecent,
            PatchOrder::MostPopular => &MostPopular,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.strategy().name()
    }
}

impl fmt::Display for PatchOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatchOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [PatchOrder::MostRecent, PatchOrder::MostPopular]
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!(
                    "unknown order {s:?} (expected one of {})",
                    ordering_registry().names().join(", ")
                )
            })
    }
}

/// Unset fields do not constrain. `types` matches a patch having any of the
/// listed types; an empty set does not constrain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PatchFilter {
    pub dataset: Option<Iri>,
    pub status: Option<PatchStatus>,
    pub types: Option<BTreeSet<PatchType>>,
    pub min_advocates: Option<usize>,
    pub target_subject: Option<Iri>,
    pub order: PatchOrder,
    pub limit: Option<usize>,
    pub offset: usize,
}

impl PatchFilter {
    pub fn validate(&self) -> Result<(), RepositoryError> {
        if self.limit == Some(0) {
            return Err(RepositoryError::InvalidFilter("limit must be at least 1".into()));
        }
        Ok(())
    }

    pub fn matches(&self, patch: &Patch) -> bool {
        let body = &patch.body;
        self.dataset.as_ref().is_none_or(|d| &body.dataset == d)
            && self.status.is_none_or(|s| body.status == s)
            && self
                .types
                .as_ref()
                .is_none_or(|ts| ts.is_empty() || !ts.is_disjoint(&body.types))
            && self.min_advocates.is_none_or(|n| body.advocates.len() >= n)
            && self
                .target_subject
                .as_ref()
                .is_none_or(|s| &body.update.target_subject == s)
    }
}

pub fn query_patches<'s>(state: &'s RepositoryState, filter: &PatchFilter) -> Result<Vec<&'s Patch>, RepositoryError> {
    filter.validate()?;
    let ordering = filter.order.strategy();
    let mut hits: Vec<&Patch> = state.patches().filter(|p| filter.matches(p)).collect();
    hits.sort_by(|a, b| ordering.compare(a, b));
    Ok(hits
        .into_iter()
        .skip(filter.offset)
        .take(filter.limit.unwrap_or(usize::MAX))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatchSummary {
    pub id: Iri,
    pub advocate_count: usize,
    pub criticiser_count: usize,
    pub latest: Option<DateTime<Utc>>,
}

impl From<&Patch> for PatchSummary {
    fn from(p: &Patch) -> Self {
        PatchSummary {
            id: p.id.clone(),
            advocate_count: p.body.advocates.len(),
            criticiser_count: p.body.criticisers.len(),
            latest: p.body.latest_activity(),
        }
    }
}

pub fn report(state: &RepositoryState, order: PatchOrder, limit: usize) -> Result<Vec<PatchSummary>, RepositoryError> {
    let filter = PatchFilter {
        order,
        limit: Some(limit),
        ..PatchFilter::default()
    };
    Ok(query_patches(state, &filter)?.into_iter().map(PatchSummary::from).collect())
}

/// Every patch targeting `subject`, by id.
pub fn entity_report<'s>(state: &'s RepositoryState, subject: &Iri) -> Vec<&'s Patch> {
    state
        .patches()
        .filter(|p| &p.body.update.target_subject == subject)
        .collect()
}
