//! Markov equivalence of chain graphs: two chain graphs are equivalent when
//! they share a skeleton and the same minimal complexes.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, NodeId, NodeSet, PDGraph};

/// A path `left -> core[0] -- ... -- core[k-1] <- right` whose induced
/// subgraph has no other edges. With a single-node core this is an
/// unshielded collider.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MinimalComplex {
    pub left: NodeId,
    pub core: Vec<NodeId>,
    pub right: NodeId,
}

impl MinimalComplex {
    fn key(&self) -> (NodeId, NodeId, BTreeSet<NodeId>) {
        (
            self.left.clone(),
            self.right.clone(),
            self.core.iter().cloned().collect(),
        )
    }
}

impl fmt::Display for MinimalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let core: Vec<&str> = self.core.iter().map(NodeId::as_str).collect();
        write!(f, "{} -> {} <- {}", self.left, core.join(" -- "), self.right)
    }
}

/// Why two graphs are not Markov equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `a` and `b` are adjacent only in graph `present_in` (1 or 2).
    Adjacency { a: NodeId, b: NodeId, present_in: u8 },
    /// A minimal complex found only in graph `present_in`.
    Complex { complex: MinimalComplex, present_in: u8 },
    /// The graphs are over different nodes.
    NodeSets { only_first: NodeSet, only_second: NodeSet },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Adjacency { a, b, present_in } => {
                write!(f, "{a} and {b} adjacent only in graph {present_in}")
            }
            Witness::Complex { complex, present_in } => {
                write!(f, "minimal complex {complex} only in graph {present_in}")
            }
            Witness::NodeSets { only_first, only_second } => write!(
                f,
                "node sets differ (only in first: {:?}; only in second: {:?})",
                graph::names_of(only_first),
                graph::names_of(only_second)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
}

impl EquivalenceVerdict {
    fn yes() -> Self {
        EquivalenceVerdict {
            equivalent: true,
            witness: None,
        }
    }

    pub(crate) fn no(w: Witness) -> Self {
        EquivalenceVerdict {
            equivalent: false,
            witness: Some(w),
        }
    }
}

/// All minimal complexes of a chain graph, sorted. Each complex is reported
/// once with `left < right`.
pub fn minimal_complexes(g: &PDGraph) -> Result<Vec<MinimalComplex>> {
    if let Some(cycle) = graph::find_semi_directed_cycle(g) {
        return Err(Error::SemiDirectedCycle(graph::names_of(&cycle)));
    }
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if g.is_adjacent(i, j) {
                continue;
            }
            let mut cores = Vec::new();
            for c1 in g.children_of(i) {
                if g.has_directed(j, c1) {
                    cores.push(vec![c1]);
                } else if !g.is_adjacent(j, c1) {
                    grow(g, i, j, &mut vec![c1], &mut cores);
                }
            }
            out.extend(cores.into_iter().map(|core| MinimalComplex {
                left: g.node(i).clone(),
                core: core.into_iter().map(|c| g.node(c).clone()).collect(),
                right: g.node(j).clone(),
            }));
        }
    }
    out.sort();
    Ok(out)
}

/// Extends an induced undirected path that starts at a child of `i`, until a
/// child of `j` closes it. Interior nodes must be non-adjacent to `i`, `j`
/// and to every non-neighbouring path node.
fn grow(g: &PDGraph, i: usize, j: usize, path: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
    let last = *path.last().expect("non-empty path");
    let candidates: Vec<usize> = g.undirected_of(last).collect();
    for m in candidates {
        if m == i || m == j || path.contains(&m) || g.is_adjacent(i, m) {
            continue;
        }
        if path[..path.len() - 1].iter().any(|&p| g.is_adjacent(p, m)) {
            continue;
        }
        if g.has_directed(j, m) {
            let mut core = path.clone();
            core.push(m);
            found.push(core);
        } else if !g.is_adjacent(j, m) {
            path.push(m);
            grow(g, i, j, path, found);
            path.pop();
        }
    }
}

/// Skeleton and minimal-complex comparison of two chain graphs over the same
/// node set.
pub fn equivalent(g1: &PDGraph, g2: &PDGraph) -> Result<EquivalenceVerdict> {
    if g1.nodes() != g2.nodes() {
        let (a, b) = (g1.node_set(), g2.node_set());
        return Err(Error::NodeSetMismatch(format!(
            "{:?} vs {:?}",
            graph::names_of(&a),
            graph::names_of(&b)
        )));
    }
    let n = g1.n();
    for i in 0..n {
        for j in i + 1..n {
            let (e1, e2) = (g1.is_adjacent(i, j), g2.is_adjacent(i, j));
            if e1 != e2 {
                return Ok(EquivalenceVerdict::no(Witness::Adjacency {
                    a: g1.node(i).clone(),
                    b: g1.node(j).clone(),
                    present_in: if e1 { 1 } else { 2 },
                }));
            }
        }
    }
    let (c1, c2) = (minimal_complexes(g1)?, minimal_complexes(g2)?);
    let k1: BTreeSet<_> = c1.iter().map(MinimalComplex::key).collect();
    let k2: BTreeSet<_> = c2.iter().map(MinimalComplex::key).collect();
    if let Some(mc) = c1.iter().find(|c| !k2.contains(&c.key())) {
        return Ok(EquivalenceVerdict::no(Witness::Complex {
            complex: mc.clone(),
            present_in: 1,
        }));
    }
    if let Some(mc) = c2.iter().find(|c| !k1.contains(&c.key())) {
        return Ok(EquivalenceVerdict::no(Witness::Complex {
            complex: mc.clone(),
            present_in: 2,
        }));
    }
    Ok(EquivalenceVerdict::yes())
}

/// Whether every `I -> J -- K` is accompanied by `I -> K`.
pub fn rm_pattern_check(g: &PDGraph) -> bool {
    g.directed_idx()
        .into_iter()
        .all(|(i, j)| g.undirected_of(j).all(|k| g.has_directed(i, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn mc(l: &str, core: &[&str], r: &str) -> MinimalComplex {
        MinimalComplex {
            left: NodeId::new(l).unwrap(),
            core: core.iter().map(|c| NodeId::new(*c).unwrap()).collect(),
            right: NodeId::new(r).unwrap(),
        }
    }

    #[test]
    fn fig1_complexes() {
        let c = minimal_complexes(fixtures::fig1_g1().graph()).unwrap();
        assert_eq!(c, vec![mc("1", &["4"], "3"), mc("2", &["4"], "3")]);
        let c = minimal_complexes(fixtures::fig1_g2().graph()).unwrap();
        assert_eq!(c, vec![mc("1", &["4"], "3")]);
    }

    #[test]
    fn complex_with_long_core() {
        // a -> c1 -- c2 -- c3 <- b, no chords
        let g: PDGraph = "nodes a b c1 c2 c3\na -> c1\nb -> c3\nc1 -- c2\nc2 -- c3"
            .parse()
            .unwrap();
        assert_eq!(minimal_complexes(&g).unwrap(), vec![mc("a", &["c1", "c2", "c3"], "b")]);
        // a chord c1 -- c3 yields the shorter complex only
        let g: PDGraph = "nodes a b c1 c2 c3\na -> c1\nb -> c3\nc1 -- c2\nc2 -- c3\nc1 -- c3"
            .parse()
            .unwrap();
        assert_eq!(minimal_complexes(&g).unwrap(), vec![mc("a", &["c1", "c3"], "b")]);
    }

    #[test]
    fn no_directed_edges_no_complexes() {
        let g: PDGraph = "nodes a b c\na -- b\nb -- c".parse().unwrap();
        assert!(minimal_complexes(&g).unwrap().is_empty());
    }

    #[test]
    fn equivalence_examples() {
        let (g1, g2) = (fixtures::fig1_g1(), fixtures::fig1_g2());
        let v = equivalent(g1.graph(), g2.graph()).unwrap();
        assert!(!v.equivalent);
        assert_eq!(
            v.witness,
            Some(Witness::Complex {
                complex: mc("2", &["4"], "3"),
                present_in: 1
            })
        );
        assert!(equivalent(g1.graph(), g1.graph()).unwrap().equivalent);
        let rm: PDGraph = "nodes 1 4 5\n4 -> 5\n1 -> 5".parse().unwrap();
        assert!(equivalent(&rm, &rm.clone()).unwrap().equivalent);
        let other: PDGraph = "nodes 1 4\n1 -> 4".parse().unwrap();
        assert!(matches!(equivalent(&rm, &other), Err(Error::NodeSetMismatch(_))));
    }

    #[test]
    fn adjacency_witness() {
        let a: PDGraph = "nodes a b\na -> b".parse().unwrap();
        let b: PDGraph = "nodes a b".parse().unwrap();
        let v = equivalent(&a, &b).unwrap();
        assert!(matches!(v.witness, Some(Witness::Adjacency { present_in: 1, .. })));
    }

    #[test]
    fn rm_pattern_examples() {
        let bad: PDGraph = "nodes 1 2 3\n1 -> 2\n2 -- 3".parse().unwrap();
        assert!(!rm_pattern_check(&bad));
        assert!(rm_pattern_check(fixtures::fig1_g2().graph()));
        let ok: PDGraph = "nodes 1 2 3\n1 -> 2\n1 -> 3\n2 -- 3".parse().unwrap();
        assert!(rm_pattern_check(&ok));
    }
}
