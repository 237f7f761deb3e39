//! Identification of `p(y | do(x))` from a candidate set of SA-MPDAGs.
//!
//! A single graph identifies the effect iff no proper semi-directed path from
//! `x` to `y` starts with an undirected edge ("condition 1"). A candidate set
//! identifies it simultaneously if condition 1 holds in every graph and every
//! pair of graphs either re-weights the treatment blocks with identical parent
//! sets ("condition 2a") or has Markov-equivalent re-weighted ancestral
//! margins ("condition 2b").

use std::fmt;

use serde::Serialize;

use crate::chain::{self, EquivalenceVerdict, Witness};
use crate::error::{Error, Result};
use crate::graph::{self, NodeSet, PDGraph};
use crate::mpdag::SaMpdag;

/// Non-empty ordered list of SA-MPDAGs over one node set.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    graphs: Vec<SaMpdag>,
}

impl CandidateSet {
    pub fn new(graphs: Vec<SaMpdag>) -> Result<Self> {
        let first = graphs
            .first()
            .ok_or_else(|| Error::Precondition("candidate set is empty".into()))?;
        for (k, g) in graphs.iter().enumerate().skip(1) {
            if g.graph().nodes() != first.graph().nodes() {
                return Err(Error::NodeSetMismatch(format!(
                    "graph {k} has nodes {:?}, graph 0 has {:?}",
                    graph::names_of(g.graph().nodes()),
                    graph::names_of(first.graph().nodes())
                )));
            }
        }
        Ok(CandidateSet { graphs })
    }

    pub fn graphs(&self) -> &[SaMpdag] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn nodes(&self) -> NodeSet {
        self.graphs[0].graph().node_set()
    }

    /// The same set without graph `k`.
    pub fn without(&self, k: usize) -> Result<Self> {
        let mut graphs = self.graphs.clone();
        graphs.remove(k);
        Self::new(graphs)
    }
}

/// Treatment and outcome sets: non-empty and disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentQuery {
    x: NodeSet,
    y: NodeSet,
}

impl IdentQuery {
    pub fn new(x: NodeSet, y: NodeSet) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidQuery("treatment and outcome must be non-empty".into()));
        }
        if let Some(v) = x.intersection(&y).next() {
            return Err(Error::InvalidQuery(format!("node {v} is both treatment and outcome")));
        }
        Ok(IdentQuery { x, y })
    }

    pub fn from_names(x: &[&str], y: &[&str]) -> Result<Self> {
        Self::new(graph::node_set(x.iter().copied())?, graph::node_set(y.iter().copied())?)
    }

    pub fn x(&self) -> &NodeSet {
        &self.x
    }

    pub fn y(&self) -> &NodeSet {
        &self.y
    }

    fn masks(&self, g: &PDGraph) -> Result<(Vec<bool>, Vec<bool>)> {
        Ok((g.mask(&self.x)?, g.mask(&self.y)?))
    }
}

/// One factor `p(nodes | parents)` of the identification formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaBlock {
    pub nodes: NodeSet,
    pub parents: NodeSet,
}

/// `sum over integrand_vars of prod_j p(B_j | pa(B_j))`, with parents in the
/// treatment set fixed to the intervened values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentFormula {
    pub source_graph_index: usize,
    pub treatment: NodeSet,
    pub outcome: NodeSet,
    pub blocks: Vec<FormulaBlock>,
    pub integrand_vars: NodeSet,
}

fn join(s: &NodeSet) -> String {
    graph::names_of(s).join(",")
}

impl fmt::Display for IdentFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({} | do({})) = ", join(&self.outcome), join(&self.treatment))?;
        if !self.integrand_vars.is_empty() {
            write!(f, "sum_{{{}}} ", join(&self.integrand_vars))?;
        }
        let terms: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                if b.parents.is_empty() {
                    format!("p({})", join(&b.nodes))
                } else {
                    format!("p({} | {})", join(&b.nodes), join(&b.parents))
                }
            })
            .collect();
        f.write_str(&terms.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Identifiable,
    /// The sufficient criterion does not fire; the effect may or may not be
    /// simultaneously identifiable.
    NotDetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    pub cond_2a: bool,
    /// `None` when condition 1 fails in either graph.
    pub cond_2b: Option<bool>,
    /// Why 2b failed, when it did.
    pub witness_2b: Option<Witness>,
}

impl PairResult {
    pub fn satisfied(&self) -> bool {
        self.cond_2a || self.cond_2b == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentReport {
    pub query: IdentQuery,
    pub condition1: Vec<bool>,
    /// A proper semi-directed path starting with an undirected edge, per
    /// graph where condition 1 fails.
    pub blocking_paths: Vec<Option<Vec<String>>>,
    pub a_sets: Vec<NodeSet>,
    pub pairwise: Vec<PairResult>,
    pub verdict: Verdict,
    pub formula: Option<IdentFormula>,
    /// The formula built from each graph where condition 1 holds.
    pub per_graph_formulas: Vec<Option<IdentFormula>>,
}

impl IdentReport {
    pub fn failing_pairs(&self) -> impl Iterator<Item = &PairResult> {
        self.pairwise.iter().filter(|p| !p.satisfied())
    }
}

impl fmt::Display for IdentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "query: x = {{{}}}, y = {{{}}}", join(&self.query.x), join(&self.query.y))?;
        for (k, ok) in self.condition1.iter().enumerate() {
            write!(f, "graph {}: condition 1 {}", k + 1, if *ok { "holds" } else { "fails" })?;
            if let Some(Some(path)) = self.blocking_paths.get(k) {
                write!(f, " (path {})", path.join(" ~ "))?;
            }
            writeln!(f, "; A = {{{}}}", join(&self.a_sets[k]))?;
        }
        for p in &self.pairwise {
            let b = match p.cond_2b {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "n/a",
            };
            write!(
                f,
                "pair ({}, {}): 2a {}, 2b {}",
                p.i + 1,
                p.j + 1,
                if p.cond_2a { "holds" } else { "fails" },
                b
            )?;
            if let Some(w) = &p.witness_2b {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        match self.verdict {
            Verdict::Identifiable => writeln!(f, "verdict: identifiable")?,
            Verdict::NotDetermined => writeln!(f, "verdict: not determined")?,
        }
        if let Some(formula) = &self.formula {
            writeln!(f, "formula (graph {}): {formula}", formula.source_graph_index + 1)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

/// Removes edges into treated ancestors of `y`, then restricts to the
/// ancestors of `y` in the resulting graph.
pub fn rm(g: &SaMpdag, q: &IdentQuery) -> Result<PDGraph> {
    rm_graph(g.graph(), q)
}

pub(crate) fn rm_graph(g: &PDGraph, q: &IdentQuery) -> Result<PDGraph> {
    let (xm, ym) = q.masks(g)?;
    let an = graph::ancestors_idx(g, &ym);
    let mut h = g.clone();
    for i in (0..g.n()).filter(|&i| xm[i] && an[i]) {
        for j in g.parents_of(i) {
            h.remove_edge(j, i);
        }
    }
    let an2 = graph::ancestors_idx(&h, &ym);
    Ok(graph::induced_idx(&h, &an2))
}

pub fn check_condition1(g: &SaMpdag, q: &IdentQuery) -> Result<bool> {
    Ok(!graph::exists_blocking_path(g.graph(), &q.x, &q.y)?)
}

/// `x` intersected with the ancestors of `y`.
pub fn a_set(g: &SaMpdag, q: &IdentQuery) -> Result<NodeSet> {
    let an = graph::ancestors(g.graph(), &q.y)?;
    Ok(q.x.intersection(&an).cloned().collect())
}

fn blocks_share_parents(gi: &SaMpdag, gj: &SaMpdag, q: &IdentQuery) -> Result<bool> {
    let a = a_set(gi, q)?;
    for block in graph::chain_decomposition(gi.graph(), &a)? {
        if graph::parents(gi.graph(), &block)? != graph::parents(gj.graph(), &block)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every treatment block of either graph has the same parents in both.
pub fn check_condition2a(gi: &SaMpdag, gj: &SaMpdag, q: &IdentQuery) -> Result<bool> {
    same_nodes(gi, gj)?;
    Ok(blocks_share_parents(gi, gj, q)? && blocks_share_parents(gj, gi, q)?)
}

fn same_nodes(gi: &SaMpdag, gj: &SaMpdag) -> Result<()> {
    if gi.graph().nodes() != gj.graph().nodes() {
        return Err(Error::NodeSetMismatch("graphs of a pair differ in nodes".into()));
    }
    Ok(())
}

/// Markov equivalence of the two RM graphs. RM graphs over different node
/// sets are not equivalent.
pub fn check_condition2b(gi: &SaMpdag, gj: &SaMpdag, q: &IdentQuery) -> Result<bool> {
    Ok(condition2b_verdict(gi, gj, q)?.equivalent)
}

pub fn condition2b_verdict(gi: &SaMpdag, gj: &SaMpdag, q: &IdentQuery) -> Result<EquivalenceVerdict> {
    same_nodes(gi, gj)?;
    for (k, g) in [gi, gj].into_iter().enumerate() {
        if let Some(path) = graph::blocking_path(g.graph(), &q.x, &q.y)? {
            return Err(Error::NotIdentifiable {
                graph: k,
                path: graph::names_of(&path),
            });
        }
    }
    let (ri, rj) = (rm(gi, q)?, rm(gj, q)?);
    if ri.nodes() != rj.nodes() {
        let (a, b) = (ri.node_set(), rj.node_set());
        return Ok(EquivalenceVerdict::no(Witness::NodeSets {
            only_first: a.difference(&b).cloned().collect(),
            only_second: b.difference(&a).cloned().collect(),
        }));
    }
    chain::equivalent(&ri, &rj)
}

/// The identification formula of a single graph.
pub fn build_formula(g: &SaMpdag, q: &IdentQuery) -> Result<IdentFormula> {
    build_formula_indexed(g, q, 0)
}

fn build_formula_indexed(g: &SaMpdag, q: &IdentQuery, index: usize) -> Result<IdentFormula> {
    let pd = g.graph();
    if let Some(path) = graph::blocking_path(pd, &q.x, &q.y)? {
        return Err(Error::NotIdentifiable {
            graph: index,
            path: graph::names_of(&path),
        });
    }
    let (xm, ym) = q.masks(pd)?;
    // ancestors of y in the subgraph induced by V \ x, as a mask over pd
    let rest: Vec<bool> = xm.iter().map(|b| !b).collect();
    let sub = graph::induced_idx(pd, &rest);
    let sub_y: Vec<bool> = (0..pd.n()).filter(|&i| rest[i]).map(|i| ym[i]).collect();
    let sub_an = graph::ancestors_idx(&sub, &sub_y);
    let an_names = sub.set_of(&sub_an);
    let blocks = graph::chain_decomposition(pd, &an_names)?
        .into_iter()
        .map(|b| {
            let parents = graph::parents(pd, &b)?;
            Ok(FormulaBlock { nodes: b, parents })
        })
        .collect::<Result<Vec<_>>>()?;
    let integrand_vars = an_names.difference(&q.y).cloned().collect();
    Ok(IdentFormula {
        source_graph_index: index,
        treatment: q.x.clone(),
        outcome: q.y.clone(),
        blocks,
        integrand_vars,
    })
}

/// Evaluates condition 1 on every graph and 2a/2b on every unordered pair.
pub fn simultaneous_identify(gs: &CandidateSet, q: &IdentQuery) -> Result<IdentReport> {
    let nodes = gs.nodes();
    for v in q.x.iter().chain(&q.y) {
        if !nodes.contains(v) {
            return Err(Error::UnknownNode(v.to_string()));
        }
    }
    let graphs = gs.graphs();
    let mut condition1 = Vec::new();
    let mut blocking_paths = Vec::new();
    let mut a_sets = Vec::new();
    for g in graphs {
        let path = graph::blocking_path(g.graph(), &q.x, &q.y)?;
        condition1.push(path.is_none());
        blocking_paths.push(path.map(|p| graph::names_of(&p)));
        a_sets.push(a_set(g, q)?);
    }
    let mut pairwise = Vec::new();
    for i in 0..graphs.len() {
        for j in i + 1..graphs.len() {
            let cond_2a = check_condition2a(&graphs[i], &graphs[j], q)?;
            let (cond_2b, witness_2b) = if condition1[i] && condition1[j] {
                let v = condition2b_verdict(&graphs[i], &graphs[j], q)?;
                (Some(v.equivalent), v.witness)
            } else {
                (None, None)
            };
            pairwise.push(PairResult {
                i,
                j,
                cond_2a,
                cond_2b,
                witness_2b,
            });
        }
    }
    let per_graph_formulas = graphs
        .iter()
        .enumerate()
        .map(|(k, g)| {
            if condition1[k] {
                build_formula_indexed(g, q, k).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let identifiable = condition1.iter().all(|&c| c) && pairwise.iter().all(PairResult::satisfied);
    let (verdict, formula) = if identifiable {
        (Verdict::Identifiable, per_graph_formulas[0].clone())
    } else {
        (Verdict::NotDetermined, None)
    };
    Ok(IdentReport {
        query: q.clone(),
        condition1,
        blocking_paths,
        a_sets,
        pairwise,
        verdict,
        formula,
        per_graph_formulas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mpdag::validate_sa_mpdag;

    fn set(names: &[&str]) -> NodeSet {
        graph::node_set(names.iter().copied()).unwrap()
    }

    fn q(x: &[&str], y: &[&str]) -> IdentQuery {
        IdentQuery::from_names(x, y).unwrap()
    }

    #[test]
    fn rm_fig2() {
        let want: PDGraph = "nodes 1 4 5\n4 -> 5\n1 -> 5".parse().unwrap();
        assert_eq!(rm(&fixtures::fig2_g1(), &q(&["4"], &["5"])).unwrap(), want);
        assert_eq!(rm(&fixtures::fig2_g2(), &q(&["4"], &["5"])).unwrap(), want);
    }

    #[test]
    fn rm_without_treated_ancestors_is_ancestral_subgraph() {
        let g = fixtures::fig1_g1();
        let r = rm(&g, &q(&["3"], &["2"])).unwrap();
        assert_eq!(r.to_string(), "nodes 2\n");
    }

    #[test]
    fn rm_fig1_g2() {
        let r = rm(&fixtures::fig1_g2(), &q(&["3"], &["2"])).unwrap();
        assert_eq!(r.to_string(), "nodes 1 2 3 4\n1 -> 2\n1 -> 4\n3 -> 4\n4 -> 2\n");
    }

    #[test]
    fn condition1_examples() {
        for g in [fixtures::fig1_g1(), fixtures::fig1_g2()] {
            assert!(check_condition1(&g, &q(&["3"], &["2"])).unwrap());
        }
        for g in [fixtures::fig2_g1(), fixtures::fig2_g2()] {
            assert!(check_condition1(&g, &q(&["4"], &["5"])).unwrap());
        }
        assert!(!check_condition1(&fixtures::fig2_g1(), &q(&["2"], &["5"])).unwrap());
    }

    #[test]
    fn condition2a_examples() {
        let (g1, g2) = (fixtures::fig1_g1(), fixtures::fig1_g2());
        assert!(check_condition2a(&g1, &g2, &q(&["3"], &["2"])).unwrap());
        assert!(check_condition2a(&g1, &g1, &q(&["1"], &["4"])).unwrap());
        let (h1, h2) = (fixtures::fig2_g1(), fixtures::fig2_g2());
        assert!(!check_condition2a(&h1, &h2, &q(&["4"], &["5"])).unwrap());
    }

    #[test]
    fn condition2b_examples() {
        let (h1, h2) = (fixtures::fig2_g1(), fixtures::fig2_g2());
        assert!(check_condition2b(&h1, &h2, &q(&["4"], &["5"])).unwrap());
        assert!(check_condition2b(&h1, &h1, &q(&["4"], &["5"])).unwrap());
        let (g1, g2) = (fixtures::fig1_g1(), fixtures::fig1_g2());
        let v = condition2b_verdict(&g1, &g2, &q(&["3"], &["2"])).unwrap();
        assert!(!v.equivalent);
        assert_eq!(
            v.witness,
            Some(Witness::NodeSets {
                only_first: NodeSet::new(),
                only_second: set(&["1", "3", "4"])
            })
        );
        assert!(matches!(
            check_condition2b(&h1, &h2, &q(&["2"], &["5"])),
            Err(Error::NotIdentifiable { graph: 0, .. })
        ));
    }

    #[test]
    fn formula_examples() {
        let f = build_formula(&fixtures::fig2_g1(), &q(&["4"], &["5"])).unwrap();
        assert_eq!(
            f.blocks,
            vec![
                FormulaBlock { nodes: set(&["1"]), parents: NodeSet::new() },
                FormulaBlock { nodes: set(&["5"]), parents: set(&["1", "4"]) },
            ]
        );
        assert_eq!(f.integrand_vars, set(&["1"]));
        assert_eq!(f.to_string(), "p(5 | do(4)) = sum_{1} p(1) p(5 | 1,4)");

        let f = build_formula(&fixtures::fig1_g1(), &q(&["3"], &["2"])).unwrap();
        assert_eq!(f.blocks, vec![FormulaBlock { nodes: set(&["2"]), parents: NodeSet::new() }]);
        assert!(f.integrand_vars.is_empty());

        assert!(matches!(
            build_formula(&fixtures::fig2_g1(), &q(&["2"], &["5"])),
            Err(Error::NotIdentifiable { .. })
        ));
    }

    #[test]
    fn formula_keeps_undirected_blocks_together() {
        let g = validate_sa_mpdag("nodes a b c y\nc -> a\nc -> b\na -- b\na -> y\nb -> y".parse().unwrap()).unwrap();
        let f = build_formula(&g, &q(&["c"], &["y"])).unwrap();
        assert_eq!(f.blocks[0], FormulaBlock { nodes: set(&["a", "b"]), parents: set(&["c"]) });
    }

    #[test]
    fn empty_query_sets_rejected() {
        assert!(IdentQuery::from_names(&[], &["1"]).is_err());
        assert!(IdentQuery::from_names(&["1"], &[]).is_err());
        assert!(IdentQuery::from_names(&["1"], &["1"]).is_err());
    }

    #[test]
    fn simultaneous_examples() {
        let gs = CandidateSet::new(vec![fixtures::fig1_g1(), fixtures::fig1_g2()]).unwrap();
        let r = simultaneous_identify(&gs, &q(&["3"], &["2"])).unwrap();
        assert_eq!(r.verdict, Verdict::Identifiable);
        assert_eq!(r.a_sets, vec![NodeSet::new(), set(&["3"])]);
        assert!(r.pairwise[0].cond_2a);
        assert_eq!(r.pairwise[0].cond_2b, Some(false));

        let gs = CandidateSet::new(vec![fixtures::fig2_g1(), fixtures::fig2_g2()]).unwrap();
        let r = simultaneous_identify(&gs, &q(&["4"], &["5"])).unwrap();
        assert_eq!(r.verdict, Verdict::Identifiable);
        assert!(!r.pairwise[0].cond_2a);
        assert_eq!(r.pairwise[0].cond_2b, Some(true));
        assert_eq!(r.formula.as_ref().unwrap().source_graph_index, 0);
        assert!(r.per_graph_formulas.iter().all(Option::is_some));

        let dag = CandidateSet::new(vec![fixtures::fig2_g2()]).unwrap();
        let r = simultaneous_identify(&dag, &q(&["4"], &["5"])).unwrap();
        assert_eq!(r.verdict, Verdict::Identifiable);
        assert_eq!(r.formula, Some(build_formula(&fixtures::fig2_g2(), &q(&["4"], &["5"])).unwrap()));
    }

    #[test]
    fn mismatched_node_sets_rejected() {
        assert!(matches!(
            CandidateSet::new(vec![fixtures::fig1_g1(), fixtures::fig2_g1()]),
            Err(Error::NodeSetMismatch(_))
        ));
        assert!(CandidateSet::new(vec![]).is_err());
    }
}
