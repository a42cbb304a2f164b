use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;

use patchr_rdf::Iri;

#[derive(Debug, Clone)]
pub struct ApiConfig {
    pub listen: SocketAddr,
    /// Minted patch IRIs are `<repo_base>patch/<n>`.
    pub repo_base: Iri,
    /// `None` keeps the journal in memory.
    pub journal_path: Option<PathBuf>,
    /// Known datasets and their display labels.
    pub datasets: BTreeMap<Iri, String>,
    /// `*` allows any origin; empty disables CORS headers.
    pub cors_origins: Vec<String>,
    /// Recorded as `prv:performedBy` on patches derived from feedback.
    pub service_agent: Iri,
}

impl ApiConfig {
    pub fn new(repo_base: Iri) -> Self {
        let service_agent = Iri::new(format!("{}agent/service", with_slash(&repo_base))).expect("base plus path");
        ApiConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            repo_base,
            journal_path: None,
            datasets: BTreeMap::new(),
            cors_origins: Vec::new(),
            service_agent,
        }
    }
}

pub(crate) fn with_slash(base: &Iri) -> String {
    let s = base.as_str();
    if s.ends_with(['/', '#']) {
        s.to_owned()
    } else {
        format!("{s}/")
    }
}

/// Parses `iri=label` pairs separated by commas or semicolons.
pub fn parse_dataset_registry(text: &str) -> Result<BTreeMap<Iri, String>, String> {
    let mut out = BTreeMap::new();
    for entry in text.split([',', ';']).map(str::trim).filter(|e| !e.is_empty()) {
        let (iri, label) = match entry.rsplit_once('=') {
            Some((iri, label)) => (iri.trim(), label.trim().to_owned()),
            None => (entry, String::new()),
        };
        let iri = Iri::new(iri).map_err(|e| format!("dataset {iri:?}: {e}"))?;
        let label = if label.is_empty() { iri.local_name().to_owned() } else { label };
        out.insert(iri, label);
    }
    Ok(out)
}
