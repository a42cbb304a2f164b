//! Where commands get their patches: a local journal file or a running
//! service.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use chrono::Utc;
use patchr_core::{
    export_updates, query_patches, report, FileJournal, Patch, PatchBody, PatchFilter, PatchOrder, PatchSummary,
    Repository, SparqlDialect,
};
use patchr_rdf::{Iri, PrefixMap};
use reqwest::blocking::Client;
use reqwest::Url;

pub struct Submitted {
    pub patch_id: String,
    pub merged: bool,
}

pub enum Backend {
    Local(Box<Repository<FileJournal>>),
    Remote { client: Client, endpoint: Url },
}

impl Backend {
    pub fn local(journal: &Path, base: Iri) -> anyhow::Result<Self> {
        let journal = FileJournal::open(journal)
            .with_context(|| format!("cannot open journal {}", journal.display()))?;
        Ok(Backend::Local(Box::new(Repository::open(journal, base)?)))
    }

    pub fn remote(endpoint: &str) -> anyhow::Result<Self> {
        let mut endpoint = Url::parse(endpoint).with_context(|| format!("invalid endpoint {endpoint:?}"))?;
        if !endpoint.path().ends_with('/') {
            let path = format!("{}/", endpoint.path());
            endpoint.set_path(&path);
        }
        Ok(Backend::Remote { client: Client::new(), endpoint })
    }

    pub fn patches(&self, filter: &PatchFilter) -> anyhow::Result<Vec<Patch>> {
        match self {
            Backend::Local(repo) => Ok(query_patches(repo.state(), filter)?.into_iter().cloned().collect()),
            Backend::Remote { client, endpoint } => {
                let mut url = endpoint.join("patches")?;
                filter_query(&mut url, filter);
                let response = client.get(url).header("accept", "application/json").send()?;
                Ok(checked(response)?.json()?)
            }
        }
    }

    pub fn submit(&mut self, body: &PatchBody, submitter: &Iri) -> anyhow::Result<Submitted> {
        match self {
            Backend::Local(repo) => {
                let outcome = repo.submit_patch(body, submitter, Utc::now())?;
                Ok(Submitted { patch_id: outcome.patch_id.as_str().to_owned(), merged: outcome.merged })
            }
            Backend::Remote { client, endpoint } => {
                let mut url = endpoint.join("patches")?;
                url.query_pairs_mut().append_pair("agent", submitter.as_str());
                let reply: serde_json::Value = checked(client.post(url).json(body).send()?)?.json()?;
                Ok(Submitted {
                    patch_id: reply["patchId"].as_str().unwrap_or_default().to_owned(),
                    merged: reply["merged"].as_bool().unwrap_or(false),
                })
            }
        }
    }

    /// `filter.dataset` must be set.
    pub fn export(
        &self,
        filter: &PatchFilter,
        dialect: SparqlDialect,
        prefixes: &PrefixMap,
        header: bool,
    ) -> anyhow::Result<String> {
        let dataset = filter.dataset.as_ref().ok_or_else(|| anyhow!("a dataset is required"))?;
        match self {
            Backend::Local(repo) => Ok(export_updates(repo.state(), filter, dialect, prefixes, header)?),
            Backend::Remote { client, endpoint } => {
                let mut url = endpoint.clone();
                url.path_segments_mut()
                    .map_err(|_| anyhow!("endpoint cannot be a base URL"))?
                    .pop_if_empty()
                    .extend(["datasets", dataset.as_str(), "updates"]);
                let mut scoped = filter.clone();
                scoped.dataset = None;
                filter_query(&mut url, &scoped);
                url.query_pairs_mut()
                    .append_pair("status", scoped.status.map(|s| s.as_str()).unwrap_or("any"))
                    .append_pair("dialect", dialect_name(dialect))
                    .append_pair("prefixes", if header { "true" } else { "false" });
                Ok(checked(client.get(url).send()?)?.text()?)
            }
        }
    }

    pub fn report(&self, order: PatchOrder, limit: usize) -> anyhow::Result<Vec<PatchSummary>> {
        match self {
            Backend::Local(repo) => Ok(report(repo.state(), order, limit)?),
            Backend::Remote { client, endpoint } => {
                let mut url = endpoint.join(&format!("reports/{}", order.as_str()))?;
                url.query_pairs_mut().append_pair("limit", &limit.to_string());
                Ok(checked(client.get(url).send()?)?.json()?)
            }
        }
    }
}

fn dialect_name(dialect: SparqlDialect) -> &'static str {
    match dialect {
        SparqlDialect::Legacy => "legacy",
        SparqlDialect::Sparql11 => "sparql11",
    }
}

fn filter_query(url: &mut Url, filter: &PatchFilter) {
    let mut q = url.query_pairs_mut();
    if let Some(d) = &filter.dataset {
        q.append_pair("dataset", d.as_str());
    }
    if let Some(s) = filter.status {
        q.append_pair("status", s.as_str());
    }
    for t in filter.types.iter().flatten() {
        q.append_pair("type", &t.to_string());
    }
    if let Some(n) = filter.min_advocates {
        q.append_pair("minAdvocates", &n.to_string());
    }
    if let Some(s) = &filter.target_subject {
        q.append_pair("subject", s.as_str());
    }
    q.append_pair("order", filter.order.as_str());
    if let Some(n) = filter.limit {
        q.append_pair("limit", &n.to_string());
    }
    if filter.offset > 0 {
        q.append_pair("offset", &filter.offset.to_string());
    }
}

fn checked(response: reqwest::blocking::Response) -> anyhow::Result<reqwest::blocking::Response> {
    let status = response.status();
    if status.is_success() {
        return Ok(response);
    }
    let body = response.text().unwrap_or_default();
    let message = serde_json::from_str::<serde_json::Value>(&body)
        .ok()
        .and_then(|v| v["message"].as_str().map(str::to_owned))
        .unwrap_or(body);
    bail!("server answered {status}: {message}")
}
