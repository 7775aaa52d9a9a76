//! Text ingestion for edge, attribute and node-type files.
//!
//! Edge file: `u<TAB>v[<TAB>edge_type]`. Attribute file:
//! `node<TAB>tok1,tok2,...<TAB>x1,...,xm` with `NA` for missing values.
//! Type file: `node<TAB>type`. Lines starting with `#` and blank lines are
//! skipped in all three.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{AttributedGraph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct AttrSchema {
    /// Expected numeric dimension; inferred from the first record when unset.
    pub numeric_dim: Option<usize>,
}

pub struct GraphSources<'a> {
    pub edges: &'a mut dyn BufRead,
    pub attrs: Option<&'a mut dyn BufRead>,
    pub types: Option<&'a mut dyn BufRead>,
}

#[derive(Debug, Default, Clone)]
pub struct LoadReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
    pub warnings: Vec<String>,
}

pub fn load_graph(
    sources: GraphSources<'_>,
    schema: &AttrSchema,
) -> Result<(AttributedGraph, LoadReport)> {
    let mut builder = GraphBuilder::new();
    if let Some(d) = schema.numeric_dim {
        builder = builder.with_numeric_dim(d);
    }
    let mut report = LoadReport::default();

    for_each_record(sources.edges, |line_no, fields| {
        match fields.as_slice() {
            [u, v] => builder.edge(u, v),
            [u, v, ty] => builder.typed_edge(u, v, ty),
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "edge file: expected 2 or 3 tab-separated fields, found {}",
                        fields.len()
                    ),
                ))
            }
        }
        Ok(())
    })?;

    if let Some(attrs) = sources.attrs {
        for_each_record(attrs, |line_no, fields| {
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "attribute file: expected 2 or 3 tab-separated fields, found {}",
                        fields.len()
                    ),
                ));
            }
            let name = fields[0];
            if builder.has_attributes(name) {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate attribute record for node {name}"),
                ));
            }
            if !builder.contains(name) {
                report.warnings.push(format!(
                    "attribute node {name} has no edges; added as isolated node"
                ));
            }
            let tokens = fields[1]
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty());
            let numeric = match fields.get(2) {
                Some(s) if !s.trim().is_empty() => s
                    .split(',')
                    .map(|x| parse_numeric(x.trim(), line_no))
                    .collect::<Result<Vec<f64>>>()?,
                _ => Vec::new(),
            };
            builder
                .attributes(name, tokens, &numeric)
                .map_err(|e| match e {
                    Error::Schema(msg) => Error::Schema(format!("line {line_no}: {msg}")),
                    other => other,
                })?;
            Ok(())
        })?;
    }

    if let Some(types) = sources.types {
        for_each_record(types, |line_no, fields| {
            let [name, label] = fields.as_slice() else {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "type file: expected 2 tab-separated fields, found {}",
                        fields.len()
                    ),
                ));
            };
            if !builder.contains(name) {
                report.warnings.push(format!(
                    "typed node {name} has no edges; added as isolated node"
                ));
            }
            builder.node_type(name, label);
            Ok(())
        })?;
    }

    let (graph, stats) = builder.build()?;
    report.duplicate_edges = stats.duplicate_edges;
    report.self_loops = stats.self_loops;
    if report.duplicate_edges > 0 || report.self_loops > 0 {
        log::info!(
            "dropped {} duplicate edges and {} self-loops",
            report.duplicate_edges,
            report.self_loops
        );
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok((graph, report))
}

/// Opens and loads graph files from disk.
pub fn load_graph_files(
    edges: &Path,
    attrs: Option<&Path>,
    types: Option<&Path>,
    schema: &AttrSchema,
) -> Result<(AttributedGraph, LoadReport)> {
    let mut edges = BufReader::new(File::open(edges)?);
    let mut attrs = attrs.map(File::open).transpose()?.map(BufReader::new);
    let mut types = types.map(File::open).transpose()?.map(BufReader::new);
    load_graph(
        GraphSources {
            edges: &mut edges,
            attrs: attrs.as_mut().map(|r| r as &mut dyn BufRead),
            types: types.as_mut().map(|r| r as &mut dyn BufRead),
        },
        schema,
    )
}

fn parse_numeric(s: &str, line_no: usize) -> Result<f64> {
    if s == "NA" {
        return Ok(f64::NAN);
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::parse(
            line_no,
            format!("invalid numeric value {s:?}"),
        )),
    }
}

fn for_each_record(
    reader: &mut dyn BufRead,
    mut f: impl FnMut(usize, Vec<&str>) -> Result<()>,
) -> Result<()> {
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        line_no += 1;
        let trimmed = line.trim_end_matches(['\n', '\r']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields[0].trim().is_empty() {
            return Err(Error::parse(line_no, "empty node id"));
        }
        f(line_no, fields)?;
    }
}
