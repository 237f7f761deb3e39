//! Mixed graphs over named nodes with directed (`->`) and undirected (`--`)
//! edges, and the path, ancestor and chain-component primitives every other
//! module builds on.
//!
//! Node sets in the public API are [`NodeSet`]s (sorted by name). Internally
//! nodes are addressed by their index in the sorted node list; the `*_idx`
//! helpers work on boolean masks over those indices.

mod format;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Name of a node. Compared by exact string equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let reserved = name == "->" || name == "--";
        let bad_char = name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '#' | '=' | ','));
        if name.is_empty() || reserved || bad_char {
            return Err(Error::InvalidNodeName(name));
        }
        Ok(NodeId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type NodeSet = BTreeSet<NodeId>;

/// Builds a [`NodeSet`] from names.
pub fn node_set<I, S>(names: I) -> Result<NodeSet>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(NodeId::new).collect()
}

pub(crate) fn names_of<'a>(nodes: impl IntoIterator<Item = &'a NodeId>) -> Vec<String> {
    nodes.into_iter().map(|n| n.0.clone()).collect()
}

/// The relation stored for an ordered node pair `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Empty,
    /// row -> col
    Out,
    /// col -> row
    In,
    Line,
}

/// Edge kind, used when adding edges by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Directed,
    Undirected,
}

/// A partially directed graph: at most one edge per node pair, either
/// directed or undirected, no self-loops.
///
/// Nodes are kept in lexicographic order, so two graphs with equal node and
/// edge sets compare equal and print identically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PDGraph {
    names: Vec<NodeId>,
    slots: Vec<Slot>,
}

impl Serialize for PDGraph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("PDGraph", 3)?;
        st.serialize_field("nodes", &self.names)?;
        st.serialize_field("directed", &self.directed_edges())?;
        st.serialize_field("undirected", &self.undirected_edges())?;
        st.end()
    }
}

impl PDGraph {
    /// Creates an edgeless graph over the given node names.
    pub fn new<I, S>(nodes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names = Vec::new();
        for name in nodes {
            names.push(NodeId::new(name)?);
        }
        Self::from_ids(names)
    }

    pub fn from_ids(mut names: Vec<NodeId>) -> Result<Self> {
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateNode(w[0].to_string()));
        }
        let n = names.len();
        Ok(PDGraph {
            names,
            slots: vec![Slot::Empty; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.names
    }

    pub fn node_set(&self) -> NodeSet {
        self.names.iter().cloned().collect()
    }

    pub fn node(&self, i: usize) -> &NodeId {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub(crate) fn idx(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    fn slot(&self, i: usize, j: usize) -> Slot {
        self.slots[i * self.n() + j]
    }

    fn set_slot(&mut self, i: usize, j: usize, s: Slot) {
        let n = self.n();
        let mirror = match s {
            Slot::Out => Slot::In,
            Slot::In => Slot::Out,
            other => other,
        };
        self.slots[i * n + j] = s;
        self.slots[j * n + i] = mirror;
    }

    pub fn add_directed(&mut self, tail: &str, head: &str) -> Result<()> {
        let (i, j) = (self.idx(tail)?, self.idx(head)?);
        self.add_edge_idx(i, j, EdgeKind::Directed)
    }

    pub fn add_undirected(&mut self, a: &str, b: &str) -> Result<()> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        self.add_edge_idx(i, j, EdgeKind::Undirected)
    }

    /// Adds an edge by node index. A second edge on an occupied pair is an
    /// error rather than an overwrite.
    pub fn add_edge_idx(&mut self, i: usize, j: usize, kind: EdgeKind) -> Result<()> {
        if i == j {
            return Err(Error::SelfLoop(self.names[i].to_string()));
        }
        if self.slot(i, j) != Slot::Empty {
            return Err(Error::DuplicateEdge(
                self.names[i].to_string(),
                self.names[j].to_string(),
            ));
        }
        let s = match kind {
            EdgeKind::Directed => Slot::Out,
            EdgeKind::Undirected => Slot::Line,
        };
        self.set_slot(i, j, s);
        Ok(())
    }

    /// Turns the undirected edge `i -- j` into `i -> j`.
    pub(crate) fn orient(&mut self, i: usize, j: usize) {
        debug_assert_eq!(self.slot(i, j), Slot::Line);
        self.set_slot(i, j, Slot::Out);
    }

    pub(crate) fn remove_edge(&mut self, i: usize, j: usize) {
        self.set_slot(i, j, Slot::Empty);
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.slot(i, j) != Slot::Empty
    }

    /// `i -> j`
    pub fn has_directed(&self, i: usize, j: usize) -> bool {
        self.slot(i, j) == Slot::Out
    }

    pub fn has_undirected(&self, i: usize, j: usize) -> bool {
        self.slot(i, j) == Slot::Line
    }

    fn row(&self, i: usize, s: Slot) -> impl Iterator<Item = usize> + '_ {
        let n = self.n();
        (0..n).filter(move |&j| self.slots[i * n + j] == s)
    }

    pub fn parents_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i, Slot::In)
    }

    pub fn children_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i, Slot::Out)
    }

    pub fn undirected_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i, Slot::Line)
    }

    pub fn adjacent_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n();
        (0..n).filter(move |&j| self.slots[i * n + j] != Slot::Empty)
    }

    /// Directed edges as index pairs `(tail, head)`, sorted.
    pub fn directed_idx(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.slot(i, j) == Slot::Out {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Undirected edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn undirected_idx(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.slot(i, j) == Slot::Line {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn directed_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.directed_idx()
            .into_iter()
            .map(|(i, j)| (self.names[i].clone(), self.names[j].clone()))
            .collect()
    }

    pub fn undirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.undirected_idx()
            .into_iter()
            .map(|(i, j)| (self.names[i].clone(), self.names[j].clone()))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.slots.iter().filter(|s| **s != Slot::Empty).count() / 2
    }

    pub fn is_fully_directed(&self) -> bool {
        !self.slots.contains(&Slot::Line)
    }

    pub fn has_directed_named(&self, tail: &str, head: &str) -> bool {
        match (self.index_of(tail), self.index_of(head)) {
            (Some(i), Some(j)) => self.has_directed(i, j),
            _ => false,
        }
    }

    pub fn has_undirected_named(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.has_undirected(i, j),
            _ => false,
        }
    }

    pub(crate) fn mask(&self, d: &NodeSet) -> Result<Vec<bool>> {
        let mut m = vec![false; self.n()];
        for v in d {
            m[self.idx(v.as_str())?] = true;
        }
        Ok(m)
    }

    pub(crate) fn set_of(&self, mask: &[bool]) -> NodeSet {
        mask.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.names[i].clone())
            .collect()
    }

    pub(crate) fn names_at(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.names[i].to_string()).collect()
    }
}

/// Partition of the nodes into chain components together with a topological
/// order of the components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainPartition {
    /// Components listed by their smallest member.
    pub components: Vec<NodeSet>,
    /// Indices into `components`, consistent with every directed edge.
    pub component_order: Vec<usize>,
}

impl ChainPartition {
    /// Components in topological order.
    pub fn ordered(&self) -> impl Iterator<Item = &NodeSet> {
        self.component_order.iter().map(|&c| &self.components[c])
    }

    pub fn component_of(&self, node: &NodeId) -> Option<&NodeSet> {
        self.components.iter().find(|c| c.contains(node))
    }
}

// ---------------------------------------------------------------------------
// index-level primitives

pub(crate) fn parents_idx(g: &PDGraph, d: &[bool]) -> Vec<bool> {
    let mut out = vec![false; g.n()];
    for (v, _) in d.iter().enumerate().filter(|(_, &b)| b) {
        for p in g.parents_of(v) {
            out[p] = true;
        }
    }
    out
}

/// Reflexive ancestor closure along directed edges only.
pub(crate) fn ancestors_idx(g: &PDGraph, d: &[bool]) -> Vec<bool> {
    let mut out = d.to_vec();
    let mut stack: Vec<usize> = (0..g.n()).filter(|&i| d[i]).collect();
    while let Some(v) = stack.pop() {
        for p in g.parents_of(v) {
            if !out[p] {
                out[p] = true;
                stack.push(p);
            }
        }
    }
    out
}

pub(crate) fn induced_idx(g: &PDGraph, d: &[bool]) -> PDGraph {
    let keep: Vec<usize> = (0..g.n()).filter(|&i| d[i]).collect();
    let names = keep.iter().map(|&i| g.names[i].clone()).collect();
    let mut h = PDGraph::from_ids(names).expect("subset of distinct names");
    // `keep` is sorted, so new indices follow the same order.
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            let s = g.slot(i, j);
            if s != Slot::Empty {
                h.slots[a * keep.len() + b] = s;
            }
        }
    }
    h
}

/// Component id per node for the undirected part. Ids are assigned in order
/// of the smallest member.
pub(crate) fn undirected_components(g: &PDGraph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for u in g.undirected_of(v) {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    (comp, next)
}

/// Semi-directed reachability from `start`: undirected edges either way,
/// directed edges tail to head. Returns a path to `goal` if one exists.
fn semi_directed_path(g: &PDGraph, start: usize, goal: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        if v == goal {
            let mut path = vec![v];
            let mut cur = v;
            while cur != start {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for u in g.undirected_of(v).chain(g.children_of(v)) {
            if !seen[u] {
                seen[u] = true;
                prev[u] = v;
                queue.push_back(u);
            }
        }
    }
    None
}

/// One semi-directed cycle (containing at least one directed edge), as a
/// closed node sequence, or `None`.
pub(crate) fn semi_directed_cycle_idx(g: &PDGraph) -> Option<Vec<usize>> {
    for (u, v) in g.directed_idx() {
        if let Some(path) = semi_directed_path(g, v, u) {
            let mut cycle = vec![u];
            cycle.extend(path);
            return Some(cycle);
        }
    }
    None
}

/// Chain components and a topological rank for each; errors on a
/// semi-directed cycle.
pub(crate) fn chain_order_idx(g: &PDGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    if let Some(cycle) = semi_directed_cycle_idx(g) {
        return Err(Error::SemiDirectedCycle(g.names_at(&cycle)));
    }
    let (comp, k) = undirected_components(g);
    let mut succ = vec![BTreeSet::new(); k];
    let mut indeg = vec![0usize; k];
    for (u, v) in g.directed_idx() {
        if succ[comp[u]].insert(comp[v]) {
            indeg[comp[v]] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..k).filter(|&c| indeg[c] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse(c)) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse(d));
            }
        }
    }
    debug_assert_eq!(order.len(), k);
    Ok((comp, order))
}

pub(crate) fn blocking_path_idx(g: &PDGraph, x: &[bool], y: &[bool]) -> Option<Vec<usize>> {
    let n = g.n();
    for s in (0..n).filter(|&i| x[i]) {
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for u in g.undirected_of(s).filter(|&u| !x[u]) {
            prev[u] = s;
            queue.push_back(u);
        }
        while let Some(v) = queue.pop_front() {
            if y[v] {
                let mut path = vec![v];
                let mut cur = v;
                while cur != s {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for u in g.undirected_of(v).chain(g.children_of(v)) {
                if !x[u] && prev[u] == usize::MAX {
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// public operations

/// Nodes with a directed edge into some member of `d`.
pub fn parents(g: &PDGraph, d: &NodeSet) -> Result<NodeSet> {
    Ok(g.set_of(&parents_idx(g, &g.mask(d)?)))
}

/// `d` together with every node that has a directed path into `d`.
pub fn ancestors(g: &PDGraph, d: &NodeSet) -> Result<NodeSet> {
    Ok(g.set_of(&ancestors_idx(g, &g.mask(d)?)))
}

pub fn induced_subgraph(g: &PDGraph, d: &NodeSet) -> Result<PDGraph> {
    Ok(induced_idx(g, &g.mask(d)?))
}

/// Chain components with a deterministic topological component order (ties
/// broken by the smallest contained node name).
pub fn chain_components(g: &PDGraph) -> Result<ChainPartition> {
    let (comp, order) = chain_order_idx(g)?;
    let mut components = vec![NodeSet::new(); order.len()];
    for (i, &c) in comp.iter().enumerate() {
        components[c].insert(g.names[i].clone());
    }
    Ok(ChainPartition {
        components,
        component_order: order,
    })
}

/// Non-empty intersections of `d` with the chain components, in component
/// order.
pub fn chain_decomposition(g: &PDGraph, d: &NodeSet) -> Result<Vec<NodeSet>> {
    let mask = g.mask(d)?;
    Ok(chain_decomposition_idx(g, &mask)?
        .into_iter()
        .map(|part| g.set_of(&part))
        .collect())
}

pub(crate) fn chain_decomposition_idx(g: &PDGraph, d: &[bool]) -> Result<Vec<Vec<bool>>> {
    let (comp, order) = chain_order_idx(g)?;
    let mut out = Vec::new();
    for c in order {
        let part: Vec<bool> = (0..g.n()).map(|i| d[i] && comp[i] == c).collect();
        if part.iter().any(|&b| b) {
            out.push(part);
        }
    }
    Ok(out)
}

/// The chain component containing all of `di`.
pub fn containing_component(g: &PDGraph, di: &NodeSet) -> Result<NodeSet> {
    let mask = g.mask(di)?;
    let (comp, _) = undirected_components(g);
    let mut ids = (0..g.n()).filter(|&i| mask[i]).map(|i| comp[i]);
    let first = ids
        .next()
        .ok_or_else(|| Error::Precondition("empty node set has no chain component".into()))?;
    if ids.any(|c| c != first) {
        return Err(Error::StraddlesComponents(names_of(di)));
    }
    Ok(g.set_of(&comp.iter().map(|&c| c == first).collect::<Vec<_>>()))
}

pub fn has_semi_directed_cycle(g: &PDGraph) -> bool {
    semi_directed_cycle_idx(g).is_some()
}

/// One semi-directed cycle as a closed sequence of node names.
pub fn find_semi_directed_cycle(g: &PDGraph) -> Option<Vec<NodeId>> {
    semi_directed_cycle_idx(g).map(|c| c.into_iter().map(|i| g.names[i].clone()).collect())
}

fn check_disjoint(x: &NodeSet, y: &NodeSet) -> Result<()> {
    if let Some(v) = x.intersection(y).next() {
        return Err(Error::InvalidQuery(format!("node {v} appears in both sets")));
    }
    Ok(())
}

/// Whether a proper semi-directed path from `x` to `y` starts with an
/// undirected edge.
pub fn exists_blocking_path(g: &PDGraph, x: &NodeSet, y: &NodeSet) -> Result<bool> {
    Ok(blocking_path(g, x, y)?.is_some())
}

/// Like [`exists_blocking_path`] but returns the path found.
pub fn blocking_path(g: &PDGraph, x: &NodeSet, y: &NodeSet) -> Result<Option<Vec<NodeId>>> {
    check_disjoint(x, y)?;
    let (xm, ym) = (g.mask(x)?, g.mask(y)?);
    Ok(blocking_path_idx(g, &xm, &ym).map(|p| p.into_iter().map(|i| g.names[i].clone()).collect()))
}

/// Same nodes, every edge made undirected.
pub fn skeleton(g: &PDGraph) -> PDGraph {
    let mut h = g.clone();
    for s in &mut h.slots {
        if *s != Slot::Empty {
            *s = Slot::Line;
        }
    }
    h
}

/// Directed acyclic check: fully directed and no directed cycle.
pub fn is_dag(g: &PDGraph) -> bool {
    g.is_fully_directed() && !has_semi_directed_cycle(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> NodeSet {
        node_set(names.iter().copied()).unwrap()
    }

    fn fig1_g1() -> PDGraph {
        "nodes 1 2 3 4\n1 -> 4\n3 -> 4\n2 -> 4\n1 -- 2".parse().unwrap()
    }

    fn fig1_g2() -> PDGraph {
        "nodes 1 2 3 4\n1 -> 4\n3 -> 4\n4 -> 2\n1 -> 2".parse().unwrap()
    }

    fn fig2_g1() -> PDGraph {
        "nodes 1 2 3 4 5\n1 -> 4\n3 -> 4\n1 -- 2\n3 -- 2\n4 -> 5\n1 -> 5"
            .parse()
            .unwrap()
    }

    fn fig2_g2() -> PDGraph {
        "nodes 1 2 3 4 5\n1 -> 4\n1 -> 2\n3 -> 2\n4 -> 5\n1 -> 5"
            .parse()
            .unwrap()
    }

    #[test]
    fn parents_examples() {
        assert_eq!(parents(&fig1_g1(), &set(&["4"])).unwrap(), set(&["1", "2", "3"]));
        assert!(parents(&fig1_g1(), &NodeSet::new()).unwrap().is_empty());
        assert!(parents(&fig2_g1(), &set(&["1", "2", "3"])).unwrap().is_empty());
    }

    #[test]
    fn parents_unknown_node_is_named() {
        let err = parents(&fig1_g1(), &set(&["9"])).unwrap_err();
        assert_eq!(err, Error::UnknownNode("9".into()));
    }

    #[test]
    fn ancestors_examples() {
        assert_eq!(ancestors(&fig1_g2(), &set(&["2"])).unwrap(), set(&["1", "2", "3", "4"]));
        assert_eq!(ancestors(&fig1_g1(), &set(&["2"])).unwrap(), set(&["2"]));
        let g = fig2_g1();
        assert_eq!(ancestors(&g, &g.node_set()).unwrap(), g.node_set());
    }

    #[test]
    fn induced_subgraph_examples() {
        let h = induced_subgraph(&fig2_g2(), &set(&["1", "4", "5"])).unwrap();
        assert_eq!(h.to_string(), "nodes 1 4 5\n1 -> 4\n1 -> 5\n4 -> 5\n");
        assert_eq!(induced_subgraph(&fig2_g2(), &NodeSet::new()).unwrap().n(), 0);
        let g = fig2_g1();
        assert_eq!(induced_subgraph(&g, &g.node_set()).unwrap(), g);
    }

    #[test]
    fn chain_component_examples() {
        let p = chain_components(&fig1_g1()).unwrap();
        assert_eq!(p.components, vec![set(&["1", "2"]), set(&["3"]), set(&["4"])]);
        let p = chain_components(&fig2_g1()).unwrap();
        assert_eq!(p.components, vec![set(&["1", "2", "3"]), set(&["4"]), set(&["5"])]);
        let order: Vec<_> = p.ordered().cloned().collect();
        assert_eq!(order, vec![set(&["1", "2", "3"]), set(&["4"]), set(&["5"])]);
        let p = chain_components(&fig2_g2()).unwrap();
        assert!(p.components.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn chain_components_reject_cycle() {
        let g: PDGraph = "nodes a b c\na -> b\nb -- c\nc -> a".parse().unwrap();
        assert!(matches!(chain_components(&g), Err(Error::SemiDirectedCycle(_))));
    }

    #[test]
    fn chain_decomposition_examples() {
        assert_eq!(
            chain_decomposition(&fig1_g2(), &set(&["1", "3", "4"])).unwrap(),
            vec![set(&["1"]), set(&["3"]), set(&["4"])]
        );
        assert_eq!(
            chain_decomposition(&fig2_g1(), &set(&["1", "5"])).unwrap(),
            vec![set(&["1"]), set(&["5"])]
        );
        assert!(chain_decomposition(&fig2_g1(), &NodeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn containing_component_examples() {
        assert_eq!(containing_component(&fig2_g1(), &set(&["1"])).unwrap(), set(&["1", "2", "3"]));
        assert_eq!(containing_component(&fig2_g1(), &set(&["5"])).unwrap(), set(&["5"]));
        assert_eq!(containing_component(&fig1_g1(), &set(&["2"])).unwrap(), set(&["1", "2"]));
        assert!(matches!(
            containing_component(&fig1_g1(), &set(&["2", "3"])),
            Err(Error::StraddlesComponents(_))
        ));
    }

    #[test]
    fn semi_directed_cycle_examples() {
        assert!(!has_semi_directed_cycle(&fig1_g1()));
        let g: PDGraph = "nodes a b c\na -> b\nb -- c\nc -> a".parse().unwrap();
        let cycle = find_semi_directed_cycle(&g).unwrap();
        assert_eq!(cycle.first(), cycle.last());
        // a directed edge inside one undirected component
        let g: PDGraph = "nodes a b c\na -> b\nb -- c\nc -- a".parse().unwrap();
        assert!(has_semi_directed_cycle(&g));
        // purely undirected cycles are not semi-directed cycles
        let g: PDGraph = "nodes a b c\na -- b\nb -- c\nc -- a".parse().unwrap();
        assert!(!has_semi_directed_cycle(&g));
    }

    #[test]
    fn two_cycle_cannot_be_built() {
        let mut g = PDGraph::new(["a", "b"]).unwrap();
        g.add_directed("a", "b").unwrap();
        assert_eq!(g.add_undirected("b", "a"), Err(Error::DuplicateEdge("b".into(), "a".into())));
    }

    #[test]
    fn blocking_path_examples() {
        assert!(!exists_blocking_path(&fig1_g1(), &set(&["3"]), &set(&["2"])).unwrap());
        let path = blocking_path(&fig2_g1(), &set(&["2"]), &set(&["5"])).unwrap().unwrap();
        assert_eq!(path, vec![NodeId::new("2").unwrap(), NodeId::new("1").unwrap(), NodeId::new("5").unwrap()]);
        assert!(!exists_blocking_path(&fig2_g1(), &set(&["4"]), &set(&["5"])).unwrap());
        assert!(matches!(
            exists_blocking_path(&fig1_g1(), &set(&["1"]), &set(&["1", "2"])),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn blocking_path_is_proper() {
        // the only route to y re-enters x
        let g: PDGraph = "nodes a b c y\na -- b\nb -> c\nc -> y".parse().unwrap();
        assert!(exists_blocking_path(&g, &set(&["a"]), &set(&["y"])).unwrap());
        assert!(!exists_blocking_path(&g, &set(&["a", "c"]), &set(&["y"])).unwrap());
    }

    #[test]
    fn skeleton_examples() {
        let s = skeleton(&fig1_g1());
        assert_eq!(s.to_string(), "nodes 1 2 3 4\n1 -- 2\n1 -- 4\n2 -- 4\n3 -- 4\n");
        assert_eq!(skeleton(&fig1_g1()), skeleton(&fig1_g2()));
        assert_eq!(skeleton(&PDGraph::new(Vec::<String>::new()).unwrap()).n(), 0);
    }

    #[test]
    fn node_names_are_validated() {
        assert!(NodeId::new("").is_err());
        assert!(NodeId::new("a b").is_err());
        assert!(NodeId::new("->").is_err());
        assert!(PDGraph::new(["a", "a"]).is_err());
    }
}
