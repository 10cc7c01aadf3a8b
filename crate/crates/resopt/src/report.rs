//! Result reporting: tagged flow records, CSV export, and graph export.
//!
//! Every flow variable of a lowered model carries an edge entry (source,
//! target, interval, tags). [`flows`] turns an optimal solution into a
//! filtered, deterministically ordered list of [`FlowRecord`]s; [`to_csv`]
//! renders them as RFC-4180 CSV; [`export_graph`] emits the system graph as
//! Graphviz DOT or yEd-flavoured GraphML, with sources drawn as upward
//! trapezoids, sinks as downward ones, buses as circles and converters or
//! storages as octagons, clustered by location and component.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{MilpModel, NodeKind, TagSet};
use crate::solver::{Solution, SolveStatus};

/// One realised energy flow during one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    /// Start timestamp of the interval.
    pub time: NaiveDateTime,
    /// Graph node the energy leaves.
    pub source: String,
    /// Graph node the energy enters.
    pub target: String,
    /// Average power over the interval, kW.
    pub value: f64,
    pub tags: TagSet,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no solution to report: solver status was {0:?}")]
    NoSolution(SolveStatus),
    #[error("failed to write report: {0}")]
    Io(#[from] io::Error),
}

/// Extracts the flow records of an optimal solution whose tags contain
/// every `(key, value)` pair in `filter`. An empty filter keeps everything.
///
/// Records are ordered by (time, source, target); ties keep variable order,
/// so equal inputs yield identical output.
pub fn flows(
    model: &MilpModel,
    solution: &Solution,
    filter: &TagSet,
) -> Result<Vec<FlowRecord>, ReportError> {
    if !solution.is_optimal() {
        return Err(ReportError::NoSolution(solution.status));
    }
    let mut records = Vec::new();
    for (&var, edge) in &model.flow_registry {
        if !filter.iter().all(|pair| edge.tags.contains(pair)) {
            continue;
        }
        let mut value = solution.value(var);
        // Flow variables are nonnegative; snap numerical dust to zero.
        if value <= 0.0 && value > -1e-6 {
            value = 0.0;
        }
        records.push(FlowRecord {
            time: model.intervals[edge.interval].start,
            source: edge.source.clone(),
            target: edge.target.clone(),
            value,
            tags: edge.tags.clone(),
        });
    }
    records.sort_by(|a, b| {
        (a.time, &a.source, &a.target).cmp(&(b.time, &b.source, &b.target))
    });
    Ok(records)
}

/// Sum of the record values, kW.
pub fn total(records: &[FlowRecord]) -> f64 {
    records.iter().map(|r| r.value).sum()
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Writes records as CSV with the header `time,source,target,value,tags`.
/// Tags are rendered as sorted `key=value` pairs joined by semicolons.
pub fn write_csv<W: io::Write>(records: &[FlowRecord], mut out: W) -> Result<(), ReportError> {
    writeln!(out, "time,source,target,value,tags")?;
    for r in records {
        let tags = r
            .tags
            .iter()
            .map(|(k, v)| format!("{}={v}", k.as_str()))
            .collect::<Vec<_>>()
            .join(";");
        // Normalise -0.0 and rely on shortest-round-trip formatting, which
        // preserves every value bit-exactly through a CSV round trip.
        let value = if r.value == 0.0 { 0.0 } else { r.value };
        writeln!(
            out,
            "{},{},{},{},{}",
            r.time.format("%Y-%m-%d %H:%M:%S"),
            csv_field(&r.source),
            csv_field(&r.target),
            value,
            csv_field(&tags),
        )?;
    }
    Ok(())
}

/// Renders records as a CSV string; see [`write_csv`].
pub fn to_csv(records: &[FlowRecord]) -> String {
    let mut buffer = Vec::new();
    write_csv(records, &mut buffer).expect("writing to memory cannot fail");
    String::from_utf8(buffer).expect("CSV output is UTF-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    GraphMl,
}

/// Exports the system graph of a lowered model. Infallible and
/// deterministic; edges are the deduplicated (source, target) pairs of the
/// flow registry.
pub fn export_graph(model: &MilpModel, format: GraphFormat) -> String {
    let edges: BTreeSet<(&str, &str)> = model
        .flow_registry
        .values()
        .map(|edge| (edge.source.as_str(), edge.target.as_str()))
        .collect();
    let tree = ClusterTree::build(model);
    match format {
        GraphFormat::Dot => render_dot(model, &tree, &edges),
        GraphFormat::GraphMl => render_graphml(model, &tree, &edges),
    }
}

fn shape_dot(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Source => "trapezium",
        NodeKind::Sink => "invtrapezium",
        NodeKind::Bus(_) => "circle",
        NodeKind::Converter | NodeKind::Storage => "octagon",
    }
}

fn shape_yed(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Source => "trapezoid",
        NodeKind::Sink => "trapezoid2",
        NodeKind::Bus(_) => "ellipse",
        NodeKind::Converter | NodeKind::Storage => "octagon",
    }
}

/// Nested clusters (location, then carrier/component/demand) with the node
/// ids attached at each depth.
#[derive(Default)]
struct ClusterTree {
    children: BTreeMap<String, ClusterTree>,
    nodes: Vec<String>,
}

impl ClusterTree {
    fn build(model: &MilpModel) -> ClusterTree {
        let mut root = ClusterTree::default();
        for (id, info) in &model.nodes {
            let mut cursor = &mut root;
            for part in &info.cluster {
                cursor = cursor.children.entry(part.clone()).or_default();
            }
            cursor.nodes.push(id.clone());
        }
        root
    }
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_dot(model: &MilpModel, tree: &ClusterTree, edges: &BTreeSet<(&str, &str)>) -> String {
    fn emit(model: &MilpModel, tree: &ClusterTree, path: &str, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        for id in &tree.nodes {
            let info = &model.nodes[id];
            writeln!(
                out,
                "{pad}\"{}\" [shape={}, label=\"{}\"];",
                dot_escape(id),
                shape_dot(&info.kind),
                dot_escape(&info.label),
            )
            .expect("writing to memory cannot fail");
        }
        for (name, child) in &tree.children {
            let child_path = format!("{path}_{name}");
            writeln!(out, "{pad}subgraph \"cluster{child_path}\" {{").unwrap();
            writeln!(out, "{pad}  label=\"{}\";", dot_escape(name)).unwrap();
            emit(model, child, &child_path, indent + 1, out);
            writeln!(out, "{pad}}}").unwrap();
        }
    }

    let mut out = String::new();
    out.push_str("digraph energy_system {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontsize=10];\n");
    emit(model, tree, "", 1, &mut out);
    for (source, target) in edges {
        writeln!(out, "  \"{}\" -> \"{}\";", dot_escape(source), dot_escape(target)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_graphml(
    model: &MilpModel,
    tree: &ClusterTree,
    edges: &BTreeSet<(&str, &str)>,
) -> String {
    fn emit(model: &MilpModel, tree: &ClusterTree, path: &str, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        for id in &tree.nodes {
            let info = &model.nodes[id];
            writeln!(out, "{pad}<node id=\"{}\">", xml_escape(id)).unwrap();
            writeln!(out, "{pad}  <data key=\"d0\">").unwrap();
            writeln!(out, "{pad}    <y:ShapeNode>").unwrap();
            writeln!(
                out,
                "{pad}      <y:NodeLabel>{}</y:NodeLabel>",
                xml_escape(&info.label)
            )
            .unwrap();
            writeln!(out, "{pad}      <y:Shape type=\"{}\"/>", shape_yed(&info.kind)).unwrap();
            writeln!(out, "{pad}    </y:ShapeNode>").unwrap();
            writeln!(out, "{pad}  </data>").unwrap();
            writeln!(out, "{pad}</node>").unwrap();
        }
        for (name, child) in &tree.children {
            let child_path = format!("{path}::{name}");
            writeln!(
                out,
                "{pad}<node id=\"group{}\" yfiles.foldertype=\"group\">",
                xml_escape(&child_path)
            )
            .unwrap();
            writeln!(out, "{pad}  <data key=\"d0\">").unwrap();
            writeln!(out, "{pad}    <y:GroupNode>").unwrap();
            writeln!(out, "{pad}      <y:NodeLabel>{}</y:NodeLabel>", xml_escape(name)).unwrap();
            writeln!(out, "{pad}    </y:GroupNode>").unwrap();
            writeln!(out, "{pad}  </data>").unwrap();
            writeln!(
                out,
                "{pad}  <graph id=\"graph{}\" edgedefault=\"directed\">",
                xml_escape(&child_path)
            )
            .unwrap();
            emit(model, child, &child_path, indent + 2, out);
            writeln!(out, "{pad}  </graph>").unwrap();
            writeln!(out, "{pad}</node>").unwrap();
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n");
    out.push_str("         xmlns:y=\"http://www.yworks.com/xml/graphml\">\n");
    out.push_str("  <key id=\"d0\" for=\"node\" yfiles.type=\"nodegraphics\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    emit(model, tree, "", 2, &mut out);
    for (i, (source, target)) in edges.iter().enumerate() {
        writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\"/>",
            xml_escape(source),
            xml_escape(target)
        )
        .unwrap();
    }
    out.push_str("  </graph>\n");
    out.push_str("</graphml>\n");
    out
}
