//! Construction, validation and extension enumeration for strictly acyclic
//! MPDAGs (partially directed graphs closed under the orientation rules and
//! free of semi-directed cycles).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, NodeId, PDGraph};

/// Default bound on the number of DAGs [`enumerate_extensions`] will produce.
pub const DEFAULT_EXTENSION_CAP: usize = 100_000;

/// A set of required edge orientations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BackgroundKnowledge {
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl BackgroundKnowledge {
    pub fn new(edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        for (a, b) in &edges {
            if a == b {
                return Err(Error::SelfLoop(a.to_string()));
            }
            if edges.contains(&(b.clone(), a.clone())) {
                return Err(Error::BackgroundConflict(format!(
                    "both {a} -> {b} and {b} -> {a} required"
                )));
            }
        }
        Ok(BackgroundKnowledge { edges })
    }

    pub fn from_names(edges: &[(&str, &str)]) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b) in edges {
            out.push((NodeId::new(*a)?, NodeId::new(*b)?));
        }
        Self::new(out)
    }

    pub fn edges(&self) -> impl Iterator<Item = &(NodeId, NodeId)> {
        self.edges.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A validated strictly acyclic MPDAG.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaMpdag {
    graph: PDGraph,
    provenance: Option<BackgroundKnowledge>,
}

impl SaMpdag {
    pub fn graph(&self) -> &PDGraph {
        &self.graph
    }

    pub fn provenance(&self) -> Option<&BackgroundKnowledge> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, bk: BackgroundKnowledge) -> Self {
        self.provenance = Some(bk);
        self
    }

    pub fn into_graph(self) -> PDGraph {
        self.graph
    }

    /// Orients `bk` on top of `cpdag`, closes under the orientation rules and
    /// validates the result.
    pub fn from_cpdag(cpdag: &PDGraph, bk: BackgroundKnowledge) -> Result<Self> {
        let closed = meek_close(cpdag, &bk)?;
        Ok(validate_sa_mpdag(closed)?.with_provenance(bk))
    }
}

impl AsRef<PDGraph> for SaMpdag {
    fn as_ref(&self) -> &PDGraph {
        &self.graph
    }
}

// ---------------------------------------------------------------------------
// orientation rules

fn rule1(g: &PDGraph, i: usize, j: usize) -> bool {
    g.parents_of(i).any(|k| !g.is_adjacent(k, j))
}

fn rule2(g: &PDGraph, i: usize, j: usize) -> bool {
    g.children_of(i).any(|k| g.has_directed(k, j))
}

fn rule3(g: &PDGraph, i: usize, j: usize) -> bool {
    let cands: Vec<usize> = g
        .undirected_of(i)
        .filter(|&k| g.has_directed(k, j))
        .collect();
    cands
        .iter()
        .enumerate()
        .any(|(a, &k)| cands[a + 1..].iter().any(|&l| !g.is_adjacent(k, l)))
}

/// i -- k -> l -> j with k, j non-adjacent and i adjacent to l.
fn rule4(g: &PDGraph, i: usize, j: usize) -> bool {
    g.parents_of(j).any(|l| {
        g.is_adjacent(i, l)
            && g
                .parents_of(l)
                .any(|k| g.has_undirected(i, k) && !g.is_adjacent(k, j))
    })
}

/// Applies the four orientation rules until nothing changes.
pub(crate) fn close_in_place(g: &mut PDGraph) {
    loop {
        let mut changed = false;
        for (a, b) in g.undirected_idx() {
            for (i, j) in [(a, b), (b, a)] {
                if !g.has_undirected(i, j) {
                    continue;
                }
                if rule1(g, i, j) || rule2(g, i, j) || rule3(g, i, j) || rule4(g, i, j) {
                    g.orient(i, j);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// `I -> J -- K` with `I`, `K` non-adjacent, if any.
fn forbidden_pattern(g: &PDGraph) -> Option<(usize, usize, usize)> {
    for (i, j) in g.directed_idx() {
        for k in g.undirected_of(j) {
            if k != i && !g.is_adjacent(i, k) {
                return Some((i, j, k));
            }
        }
    }
    None
}

/// Orients the background-knowledge edges and closes the graph under the
/// orientation rules.
pub fn meek_close(g: &PDGraph, bk: &BackgroundKnowledge) -> Result<PDGraph> {
    let mut h = g.clone();
    for (a, b) in bk.edges() {
        let (i, j) = (
            h.index_of(a.as_str()).ok_or_else(|| Error::UnknownNode(a.to_string()))?,
            h.index_of(b.as_str()).ok_or_else(|| Error::UnknownNode(b.to_string()))?,
        );
        if h.has_undirected(i, j) {
            h.orient(i, j);
        } else if h.has_directed(j, i) {
            return Err(Error::BackgroundConflict(format!(
                "{a} -> {b} required but graph has {b} -> {a}"
            )));
        } else if !h.is_adjacent(i, j) {
            return Err(Error::BackgroundConflict(format!(
                "{a} -> {b} required but {a} and {b} are not adjacent"
            )));
        }
    }
    close_in_place(&mut h);
    if let Some(cycle) = graph::find_semi_directed_cycle(&h) {
        return Err(Error::OrientationConflict(format!(
            "closure produced semi-directed cycle {}",
            graph::names_of(&cycle).join(" ~ ")
        )));
    }
    if let Some((i, j, k)) = forbidden_pattern(&h) {
        return Err(Error::OrientationConflict(format!(
            "{} -> {} -- {} left unoriented",
            h.node(i),
            h.node(j),
            h.node(k)
        )));
    }
    Ok(h)
}

/// Checks that `g` has no semi-directed cycle, no induced `I -> J -- K`, and
/// is a fixed point of the orientation rules.
pub fn validate_sa_mpdag(g: PDGraph) -> Result<SaMpdag> {
    if let Some(cycle) = graph::find_semi_directed_cycle(&g) {
        return Err(Error::NotSaMpdag(format!(
            "semi-directed cycle {}",
            graph::names_of(&cycle).join(" ~ ")
        )));
    }
    if let Some((i, j, k)) = forbidden_pattern(&g) {
        return Err(Error::NotSaMpdag(format!(
            "{} -> {} -- {} with {} and {} non-adjacent",
            g.node(i),
            g.node(j),
            g.node(k),
            g.node(i),
            g.node(k)
        )));
    }
    let mut closed = g.clone();
    close_in_place(&mut closed);
    if closed != g {
        let (a, b) = g
            .undirected_idx()
            .into_iter()
            .find(|&(a, b)| !closed.has_undirected(a, b))
            .expect("closure only orients undirected edges");
        return Err(Error::NotSaMpdag(format!(
            "not closed under orientation rules: {} -- {} is forced",
            g.node(a),
            g.node(b)
        )));
    }
    Ok(SaMpdag {
        graph: g,
        provenance: None,
    })
}

/// Unshielded colliders `(a, c, b)` with `a < b`, as index triples.
pub(crate) fn unshielded_colliders_idx(g: &PDGraph) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..g.n() {
        let pa: Vec<usize> = g.parents_of(c).collect();
        for (x, &a) in pa.iter().enumerate() {
            for &b in &pa[x + 1..] {
                if !g.is_adjacent(a, b) {
                    out.insert((a, c, b));
                }
            }
        }
    }
    out
}

/// Unshielded colliders `a -> c <- b` as `(a, c, b)` with `a < b`.
pub fn unshielded_colliders(g: &PDGraph) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    unshielded_colliders_idx(g)
        .into_iter()
        .map(|(a, c, b)| (g.node(a).clone(), g.node(c).clone(), g.node(b).clone()))
        .collect()
}

/// All DAGs represented by `g`, in canonical (text) order.
pub fn enumerate_extensions(g: &SaMpdag) -> Result<Vec<PDGraph>> {
    enumerate_extensions_capped(g, DEFAULT_EXTENSION_CAP)
}

/// Backtracking over undirected edges, closing under the orientation rules
/// after every choice. Fails with [`Error::ExtensionCap`] rather than
/// truncating.
pub fn enumerate_extensions_capped(g: &SaMpdag, cap: usize) -> Result<Vec<PDGraph>> {
    let target = unshielded_colliders_idx(&g.graph);
    let mut out = Vec::new();
    extend(g.graph.clone(), &target, cap, &mut out)?;
    out.sort_by_cached_key(|d| d.to_string());
    Ok(out)
}

/// One DAG represented by `g`.
pub fn first_extension(g: &SaMpdag) -> Result<PDGraph> {
    let target = unshielded_colliders_idx(&g.graph);
    let mut out = Vec::new();
    match extend(g.graph.clone(), &target, 1, &mut out) {
        Ok(()) | Err(Error::ExtensionCap(_)) => {}
        Err(e) => return Err(e),
    }
    out.pop()
        .ok_or_else(|| Error::NotSaMpdag("graph represents no DAG".into()))
}

fn extend(
    g: PDGraph,
    target: &BTreeSet<(usize, usize, usize)>,
    cap: usize,
    out: &mut Vec<PDGraph>,
) -> Result<()> {
    let Some(&(a, b)) = g.undirected_idx().first() else {
        if !graph::has_semi_directed_cycle(&g) && unshielded_colliders_idx(&g) == *target {
            if out.len() == cap {
                return Err(Error::ExtensionCap(cap));
            }
            out.push(g);
        }
        return Ok(());
    };
    for (i, j) in [(a, b), (b, a)] {
        let mut h = g.clone();
        h.orient(i, j);
        close_in_place(&mut h);
        if has_directed_cycle(&h) {
            continue;
        }
        extend(h, target, cap, out)?;
    }
    Ok(())
}

fn has_directed_cycle(g: &PDGraph) -> bool {
    let n = g.n();
    let mut indeg: Vec<usize> = (0..n).map(|i| g.parents_of(i).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for c in g.children_of(v) {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                stack.push(c);
            }
        }
    }
    seen < n
}

/// The CPDAG of the Markov equivalence class of `dag`.
pub fn cpdag_of(dag: &PDGraph) -> Result<PDGraph> {
    if !dag.is_fully_directed() {
        return Err(Error::NotADag("graph has undirected edges".into()));
    }
    if let Some(cycle) = graph::find_semi_directed_cycle(dag) {
        return Err(Error::NotADag(format!(
            "directed cycle {}",
            graph::names_of(&cycle).join(" -> ")
        )));
    }
    let mut h = graph::skeleton(dag);
    for (a, c, b) in unshielded_colliders_idx(dag) {
        if h.has_undirected(a, c) {
            h.orient(a, c);
        }
        if h.has_undirected(b, c) {
            h.orient(b, c);
        }
    }
    close_in_place(&mut h);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn parse(s: &str) -> PDGraph {
        s.parse().unwrap()
    }

    #[test]
    fn meek_close_reproduces_fig2_graphs() {
        let bk = BackgroundKnowledge::from_names(&[("1", "4"), ("4", "5")]).unwrap();
        // only the v-structure 1 -> 4 <- 3 oriented
        let start = parse("nodes 1 2 3 4 5\n1 -> 4\n3 -> 4\n1 -- 2\n3 -- 2\n4 -- 5\n1 -- 5");
        assert_eq!(meek_close(&start, &bk).unwrap(), *fixtures::fig2_g1().graph());
        let start = parse("nodes 1 2 3 4 5\n1 -> 2\n3 -> 2\n1 -- 4\n4 -- 5\n1 -- 5");
        assert_eq!(meek_close(&start, &bk).unwrap(), *fixtures::fig2_g2().graph());
    }

    #[test]
    fn meek_close_is_identity_on_cpdag() {
        let g = fixtures::fig1_g1().into_graph();
        assert_eq!(meek_close(&g, &BackgroundKnowledge::default()).unwrap(), g);
    }

    #[test]
    fn meek_close_avoids_new_collider() {
        let g = parse("nodes a b c\na -- b\nb -- c");
        let bk = BackgroundKnowledge::from_names(&[("a", "b")]).unwrap();
        assert_eq!(meek_close(&g, &bk).unwrap(), parse("nodes a b c\na -> b\nb -> c"));
    }

    #[test]
    fn meek_close_rejects_conflicts() {
        let g = parse("nodes a b c\na -> b\nb -- c");
        let bk = BackgroundKnowledge::from_names(&[("b", "a")]).unwrap();
        assert!(matches!(meek_close(&g, &bk), Err(Error::BackgroundConflict(_))));
        let bk = BackgroundKnowledge::from_names(&[("a", "c")]).unwrap();
        assert!(matches!(meek_close(&g, &bk), Err(Error::BackgroundConflict(_))));
        assert!(BackgroundKnowledge::from_names(&[("a", "b"), ("b", "a")]).is_err());
        // a -> b -> c with c -- a: forcing c -> a closes a directed cycle
        let g = parse("nodes a b c\na -> b\nb -> c\na -- c");
        let bk = BackgroundKnowledge::from_names(&[("c", "a")]).unwrap();
        assert!(matches!(meek_close(&g, &bk), Err(Error::OrientationConflict(_))));
    }

    #[test]
    fn validation_examples() {
        assert!(validate_sa_mpdag(fixtures::fig1_g1().into_graph()).is_ok());
        let err = validate_sa_mpdag(parse("nodes 1 2 3\n1 -> 2\n2 -- 3")).unwrap_err();
        assert!(err.to_string().contains("1 -> 2 -- 3"), "{err}");
        let err = validate_sa_mpdag(parse("nodes a b c\na -> b\nb -- c\nc -- a")).unwrap_err();
        assert!(err.to_string().contains("semi-directed cycle"), "{err}");
        // the third rule would orient a -> d
        let g = parse("nodes a b c d\na -- b\na -- c\na -- d\nb -> d\nc -> d");
        assert!(matches!(validate_sa_mpdag(g), Err(Error::NotSaMpdag(_))));
    }

    #[test]
    fn extension_examples() {
        let ext = enumerate_extensions(&fixtures::fig1_g1()).unwrap();
        assert_eq!(ext.len(), 2);
        assert!(ext[0].has_directed_named("1", "2"));
        assert!(ext[1].has_directed_named("2", "1"));
        let dag = fixtures::fig2_g2();
        assert_eq!(enumerate_extensions(&dag).unwrap(), vec![dag.graph().clone()]);
        let ext = enumerate_extensions(&fixtures::fig2_g1()).unwrap();
        assert_eq!(ext.len(), 3);
        assert!(ext
            .iter()
            .all(|d| !(d.has_directed_named("1", "2") && d.has_directed_named("3", "2"))));
    }

    #[test]
    fn extension_cap_errors() {
        let g = validate_sa_mpdag(parse("nodes a b c\na -- b\nb -- c")).unwrap();
        assert_eq!(enumerate_extensions_capped(&g, 3).unwrap().len(), 3);
        assert_eq!(enumerate_extensions_capped(&g, 2), Err(Error::ExtensionCap(2)));
    }

    #[test]
    fn cpdag_examples() {
        let dag = parse("nodes 1 2 3 4\n1 -> 2\n1 -> 4\n2 -> 4\n3 -> 4");
        assert_eq!(cpdag_of(&dag).unwrap(), *fixtures::fig1_g1().graph());
        assert_eq!(cpdag_of(&parse("nodes a b\na -> b")).unwrap(), parse("nodes a b\na -- b"));
        let v = parse("nodes a b c\na -> c\nb -> c");
        assert_eq!(cpdag_of(&v).unwrap(), v);
        assert!(matches!(cpdag_of(&parse("nodes a b\na -- b")), Err(Error::NotADag(_))));
    }
}
