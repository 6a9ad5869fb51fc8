//! Plain-text file formats: edge lists, state files and trace CSVs.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::engine::{Configuration, ExecutionTrace, NodeState};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `n m` header followed by one `u v` line per edge, `u < v`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut it = header.split_whitespace();
    let n = parse_usize(it.next(), hl + 1, "node count")?;
    let m = parse_usize(it.next(), hl + 1, "edge count")?;
    if it.next().is_some() {
        return Err(Error::parse(hl + 1, "trailing tokens in header"));
    }
    let mut edges = Vec::with_capacity(m);
    for (i, l) in lines {
        let lineno = i + 1;
        let mut it = l.split_whitespace();
        let u = parse_usize(it.next(), lineno, "node id")?;
        let v = parse_usize(it.next(), lineno, "node id")?;
        if it.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens"));
        }
        if u >= n || v >= n {
            return Err(Error::parse(lineno, format!("unknown node id in `{u} {v}`")));
        }
        if u == v {
            return Err(Error::parse(lineno, format!("self-loop at {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            hl + 1,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges).map_err(|e| Error::parse(0, e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn write_graph(g: &Graph, path: &Path) -> Result<()> {
    fs::write(path, write_edge_list(g)).map_err(|e| Error::io(path, e))
}

/// One `<id> In|Out` line per node, ascending ids.
pub fn write_states(c: &Configuration) -> String {
    c.states()
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{i} {s}\n"))
        .collect()
}

pub fn parse_states(text: &str, n: usize) -> Result<Configuration> {
    let mut states: Vec<Option<NodeState>> = vec![None; n];
    for (i, l) in text.lines().enumerate() {
        let lineno = i + 1;
        if l.trim().is_empty() {
            continue;
        }
        let mut it = l.split_whitespace();
        let id = parse_usize(it.next(), lineno, "node id")?;
        let st = it
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing state"))?;
        let st: NodeState = st.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        if it.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens"));
        }
        if id >= n {
            return Err(Error::parse(lineno, format!("unknown node id {id}")));
        }
        if states[id].replace(st).is_some() {
            return Err(Error::parse(lineno, format!("node {id} listed twice")));
        }
    }
    let states = states
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::parse(0, format!("no state for node {i}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Configuration::from_states(states))
}

pub fn read_states(path: &Path, n: usize) -> Result<Configuration> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_states(&text, n)
}

pub fn write_state_file(c: &Configuration, path: &Path) -> Result<()> {
    fs::write(path, write_states(c)).map_err(|e| Error::io(path, e))
}

pub const TRACE_HEADER: &str = "step,node,rule,new_state,enabled_count_after";

pub fn write_trace_csv<W: Write>(trace: &ExecutionTrace, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for m in &trace.moves {
        writeln!(
            w,
            "{},{},{},{},{}",
            m.step, m.node, m.rule, m.new_state, m.enabled_after
        )?;
    }
    Ok(())
}

pub fn trace_csv(trace: &ExecutionTrace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

pub fn write_trace_file(trace: &ExecutionTrace, path: &Path) -> Result<()> {
    fs::write(path, trace_csv(trace)).map_err(|e| Error::io(path, e))
}
