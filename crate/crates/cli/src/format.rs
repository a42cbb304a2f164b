use std::collections::BTreeSet;

use patchr_core::{patches_to_turtle, Named, Patch, PatchSummary, Registry};
use patchr_rdf::{compact_iri, PrefixMap};

pub trait Formatter: Named {
    fn patches(&self, patches: &[Patch], prefixes: &PrefixMap) -> anyhow::Result<String>;
    fn summaries(&self, summaries: &[PatchSummary], prefixes: &PrefixMap) -> anyhow::Result<String>;
}

pub struct JsonFormat;
pub struct TurtleFormat;
pub struct TableFormat;

impl Named for JsonFormat {
    fn name(&self) -> &'static str {
        "json"
    }
}

impl Formatter for JsonFormat {
    fn patches(&self, patches: &[Patch], _: &PrefixMap) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(patches)? + "\n")
    }

    fn summaries(&self, summaries: &[PatchSummary], _: &PrefixMap) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(summaries)? + "\n")
    }
}

impl Named for TurtleFormat {
    fn name(&self) -> &'static str {
        "turtle"
    }
}

impl Formatter for TurtleFormat {
    fn patches(&self, patches: &[Patch], prefixes: &PrefixMap) -> anyhow::Result<String> {
        Ok(patches_to_turtle(patches, [], prefixes))
    }

    fn summaries(&self, _: &[PatchSummary], _: &PrefixMap) -> anyhow::Result<String> {
        anyhow::bail!("reports have no Turtle form; use json or table")
    }
}

impl Named for TableFormat {
    fn name(&self) -> &'static str {
        "table"
    }
}

fn render_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                out.push_str(cell);
            } else {
                out.push_str(&format!("{cell:<w$}  "));
            }
        }
        out.trim_end().to_owned() + "\n"
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

impl Formatter for TableFormat {
    fn patches(&self, patches: &[Patch], prefixes: &PrefixMap) -> anyhow::Result<String> {
        let mut used = BTreeSet::new();
        let rows = patches
            .iter()
            .map(|p| {
                let b = &p.body;
                vec![
                    compact_iri(&p.id, prefixes, &mut used),
                    b.status.as_str().to_owned(),
                    b.advocates.len().to_string(),
                    b.criticisers.len().to_string(),
                    b.latest_activity().map(|t| t.to_rfc3339()).unwrap_or_default(),
                    compact_iri(&b.update.target_subject, prefixes, &mut used),
                ]
            })
            .collect();
        Ok(render_table(&["ID", "STATUS", "ADV", "CRIT", "LATEST", "SUBJECT"], rows))
    }

    fn summaries(&self, summaries: &[PatchSummary], prefixes: &PrefixMap) -> anyhow::Result<String> {
        let mut used = BTreeSet::new();
        let rows = summaries
            .iter()
            .map(|s| {
                vec![
                    compact_iri(&s.id, prefixes, &mut used),
                    s.advocate_count.to_string(),
                    s.criticiser_count.to_string(),
                    s.latest.map(|t| t.to_rfc3339()).unwrap_or_default(),
                ]
            })
            .collect();
        Ok(render_table(&["ID", "ADV", "CRIT", "LATEST"], rows))
    }
}

pub fn formatters() -> Registry<dyn Formatter> {
    let mut registry: Registry<dyn Formatter> = Registry::new();
    registry.register(Box::new(JsonFormat));
    registry.register(Box::new(TurtleFormat));
    registry.register(Box::new(TableFormat));
    registry
}
