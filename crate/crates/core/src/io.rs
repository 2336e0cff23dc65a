//! Line-oriented text format for multigraphs with terminal groups.
//!
//! ```text
//! mg 4
//! # a 4-cycle with two terminal groups
//! v 0
//! e 0 0 1
//! e 1 1 2
//! S 0 0
//! S 1 2
//! R 3
//! ```
//!
//! `v` lines are optional; vertices are also created by the `e` lines that
//! mention them. Terminal and reserve lines must name a vertex that exists.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKind, MultiGraph, TerminalSystem, VertexId, VertexSet};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num(tok: Option<&str>, line: usize, what: &str) -> Result<u64> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<(MultiGraph, TerminalSystem)> {
    let mut g = MultiGraph::new();
    let mut header = false;
    let mut edges: Vec<(usize, u64, u64, u64)> = Vec::new();
    let mut groups: BTreeMap<u64, VertexSet> = BTreeMap::new();
    let mut member_line: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut reserve: Vec<(usize, VertexId)> = Vec::new();
    let mut explicit: Vec<(usize, u64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap();
        match tag {
            "mg" => {
                if header {
                    return Err(parse_err(ln, "duplicate header"));
                }
                num(toks.next(), ln, "vertex count hint")?;
                header = true;
            }
            _ if !header => return Err(parse_err(ln, "expected `mg <n>` header")),
            "v" => explicit.push((ln, num(toks.next(), ln, "vertex id")?)),
            "e" => {
                let id = num(toks.next(), ln, "edge id")?;
                let u = num(toks.next(), ln, "endpoint")?;
                let v = num(toks.next(), ln, "endpoint")?;
                edges.push((ln, id, u, v));
            }
            "S" => {
                let grp = num(toks.next(), ln, "group index")?;
                let v = VertexId(num(toks.next(), ln, "vertex")?);
                if member_line.insert(v, ln).is_some() {
                    return Err(parse_err(ln, format!("vertex {v} is already a terminal")));
                }
                groups.entry(grp).or_default().insert(v);
            }
            "R" => reserve.push((ln, VertexId(num(toks.next(), ln, "vertex")?))),
            other => return Err(parse_err(ln, format!("unknown record `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
    }
    if !header {
        return Err(parse_err(1, "missing `mg <n>` header"));
    }

    for (ln, id) in explicit {
        g.insert_vertex(VertexId(id))
            .map_err(|_| parse_err(ln, format!("duplicate vertex {id}")))?;
    }
    for &(_, _, u, v) in &edges {
        for x in [u, v] {
            if !g.has_vertex(VertexId(x)) {
                g.insert_vertex(VertexId(x))?;
            }
        }
    }
    for (ln, id, u, v) in edges {
        g.insert_edge(EdgeId(id), VertexId(u), VertexId(v), EdgeKind::Original)
            .map_err(|_| parse_err(ln, format!("duplicate edge id {id}")))?;
    }
    for (&v, &ln) in &member_line {
        if !g.has_vertex(v) {
            return Err(parse_err(ln, format!("terminal {v} is not a vertex")));
        }
    }
    let mut rset = VertexSet::new();
    for (ln, r) in reserve {
        if !g.has_vertex(r) {
            return Err(parse_err(ln, format!("reserve vertex {r} is not a vertex")));
        }
        if member_line.contains_key(&r) {
            return Err(parse_err(ln, format!("reserve vertex {r} is also a terminal")));
        }
        rset.insert(r);
    }
    let ts = TerminalSystem::new(groups.into_values().collect(), rset);
    ts.validate(&g)?;
    Ok((g, ts))
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(MultiGraph, TerminalSystem)> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn format_graph(g: &MultiGraph, ts: &TerminalSystem) -> String {
    let mut out = String::new();
    writeln!(out, "mg {}", g.vertex_count()).unwrap();
    for v in g.vertices() {
        writeln!(out, "v {v}").unwrap();
    }
    for (id, e) in g.edges() {
        writeln!(out, "e {id} {} {}", e.u, e.v).unwrap();
    }
    for (i, grp) in ts.groups.iter().enumerate() {
        for v in grp {
            writeln!(out, "S {i} {v}").unwrap();
        }
    }
    for r in &ts.reserve {
        writeln!(out, "R {r}").unwrap();
    }
    out
}

pub fn save_graph(path: impl AsRef<Path>, g: &MultiGraph, ts: &TerminalSystem) -> Result<()> {
    std::fs::write(path, format_graph(g, ts))?;
    Ok(())
}
