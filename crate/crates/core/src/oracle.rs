//! Brute-force ground truth. Represented DAGs are enumerated directly over
//! orientations of the undirected edges, interventional marginals come from
//! the truncated factorisation of every such DAG, and agreement is checked
//! row by row. None of this goes through the orientation rules or the
//! identification criterion.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::density::{self, DiscreteDistribution, Exact, InterventionalMarginal, Intervention, Scalar, VariableSpec};
use crate::error::{Error, Result};
use crate::graph::{self, EdgeKind, NodeId, PDGraph};
use crate::identify::{self, CandidateSet, IdentQuery, Verdict};
use crate::mpdag::{self, SaMpdag};
use crate::random;

/// Largest node count accepted by the exhaustive DAG searches.
pub const MAX_ORACLE_NODES: usize = 5;

/// Largest number of undirected edges oriented exhaustively per graph.
pub const MAX_ORACLE_UNDIRECTED: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Disagreement {
    /// Indices into [`OracleVerdict::dags`].
    pub first: usize,
    pub second: usize,
    pub y_assignment: Vec<String>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct OracleVerdict<S> {
    pub all_agree: bool,
    /// Represented DAGs of all graphs, deduplicated, in canonical text order.
    pub dags: Vec<PDGraph>,
    /// For each DAG, the candidate graphs (0-based) representing it.
    pub sources: Vec<Vec<usize>>,
    /// For each DAG, the interventional marginal on `y`.
    pub marginals: Vec<InterventionalMarginal<S>>,
    pub witness: Option<Disagreement>,
}

fn colliders(g: &PDGraph) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..g.n() {
        for a in 0..g.n() {
            for b in a + 1..g.n() {
                if g.has_directed(a, c) && g.has_directed(b, c) && !g.is_adjacent(a, b) {
                    out.insert((a, c, b));
                }
            }
        }
    }
    out
}

fn acyclic(g: &PDGraph) -> bool {
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
    seen == n
}

/// Every DAG represented by `g`: all orientations of its undirected edges
/// that are acyclic and create no new unshielded collider.
pub fn represented_dags(g: &SaMpdag) -> Result<Vec<PDGraph>> {
    let pd = g.graph();
    let und = pd.undirected_idx();
    if und.len() > MAX_ORACLE_UNDIRECTED {
        return Err(Error::TooLarge(format!(
            "{} undirected edges (oracle limit {MAX_ORACLE_UNDIRECTED})",
            und.len()
        )));
    }
    let target = colliders(pd);
    let mut base = PDGraph::from_ids(pd.nodes().to_vec())?;
    for (i, j) in pd.directed_idx() {
        base.add_edge_idx(i, j, EdgeKind::Directed)?;
    }
    let mut out = Vec::new();
    for bits in 0u32..(1 << und.len()) {
        let mut d = base.clone();
        for (k, &(a, b)) in und.iter().enumerate() {
            let (i, j) = if bits >> k & 1 == 0 { (a, b) } else { (b, a) };
            d.add_edge_idx(i, j, EdgeKind::Directed)?;
        }
        if acyclic(&d) && colliders(&d) == target {
            out.push(d);
        }
    }
    out.sort_by_cached_key(|d| d.to_string());
    Ok(out)
}

/// All labelled DAGs over `nodes`, by direct generation over the three
/// states of every node pair.
pub fn all_dags(nodes: &[NodeId]) -> Result<Vec<PDGraph>> {
    if nodes.len() > MAX_ORACLE_NODES {
        return Err(Error::TooLarge(format!(
            "{} nodes (oracle limit {MAX_ORACLE_NODES})",
            nodes.len()
        )));
    }
    let empty = PDGraph::from_ids(nodes.to_vec())?;
    let n = empty.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut d = empty.clone();
        for &(i, j) in &pairs {
            match code % 3 {
                1 => d.add_edge_idx(i, j, EdgeKind::Directed)?,
                2 => d.add_edge_idx(j, i, EdgeKind::Directed)?,
                _ => {}
            }
            code /= 3;
        }
        if acyclic(&d) {
            out.push(d);
        }
    }
    Ok(out)
}

fn check_x(q: &IdentQuery, x: &Intervention) -> Result<()> {
    let keys: BTreeSet<NodeId> = x.keys().cloned().collect();
    if &keys != q.x() {
        return Err(Error::InvalidQuery(format!(
            "intervention assigns {:?} but treatment is {:?}",
            graph::names_of(&keys),
            graph::names_of(q.x())
        )));
    }
    Ok(())
}

/// Represented DAGs of every graph, deduplicated, each with the graphs that
/// represent it. Fails if `p` does not factorise along one of them.
fn compatible_union<S: Scalar>(gs: &CandidateSet, p: &DiscreteDistribution<S>) -> Result<BTreeMap<String, (PDGraph, Vec<usize>)>> {
    let mut union: BTreeMap<String, (PDGraph, Vec<usize>)> = BTreeMap::new();
    for (k, g) in gs.graphs().iter().enumerate() {
        for d in represented_dags(g)? {
            if let Some(a) = density::markov_violation(p, &d)? {
                return Err(Error::NotCompatible {
                    graph: k,
                    assignment: p.describe(&a),
                });
            }
            union.entry(d.to_string()).or_insert_with(|| (d, Vec::new())).1.push(k);
        }
    }
    Ok(union)
}

/// Whether every represented DAG of every graph gives the same
/// interventional marginal on `y` at `x`.
pub fn brute_force_check<S: Scalar>(
    gs: &CandidateSet,
    p: &DiscreteDistribution<S>,
    q: &IdentQuery,
    x: &Intervention,
) -> Result<OracleVerdict<S>> {
    check_x(q, x)?;
    let union = compatible_union(gs, p)?;
    let mut dags = Vec::new();
    let mut sources = Vec::new();
    let mut marginals = Vec::new();
    for (_, (d, src)) in union {
        marginals.push(density::truncated_factorization(p, &d, x)?.marginalize(q.y())?);
        dags.push(d);
        sources.push(src);
    }
    let mut witness = None;
    'outer: for i in 0..marginals.len() {
        for j in i + 1..marginals.len() {
            if let Some((states, magnitude)) = marginals[i].first_difference(&marginals[j], p.tolerance()) {
                witness = Some(Disagreement {
                    first: i,
                    second: j,
                    y_assignment: marginals[i].describe(&states).split(' ').map(String::from).collect(),
                    magnitude,
                });
                break 'outer;
            }
        }
    }
    Ok(OracleVerdict {
        all_agree: witness.is_none(),
        dags,
        sources,
        marginals,
        witness,
    })
}

/// The joint law of `(X1, X2, X3, X4)` obtained by pushing nine fair coins
/// `phi1..phi5, eps1..eps4` through
///
/// ```text
/// X1 = (phi1, phi2, eps1)
/// X2 = (X1[1], phi3, eps2)
/// X3 = (phi4, phi5, eps3)
/// X4 = (X1[1] + X3[1], X2[1] + X3[2], X2[2], eps4)
/// ```
///
/// Variables are named `1`..`4`. `X1`..`X3` have 8 states labelled by their
/// bits (`"010"`), `X4` has 36 states labelled by its four entries.
pub fn example1_distribution() -> DiscreteDistribution<Exact> {
    let bits = |labels: &mut Vec<String>, digits: &[usize]| {
        labels.push(digits.iter().map(|d| d.to_string()).collect());
    };
    let mut tuple_labels = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                bits(&mut tuple_labels, &[a, b, c]);
            }
        }
    }
    let mut x4_labels = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    bits(&mut x4_labels, &[a, b, c, d]);
                }
            }
        }
    }
    let vars = vec![
        VariableSpec::new("1", 8).and_then(|v| v.with_labels(tuple_labels.clone())),
        VariableSpec::new("2", 8).and_then(|v| v.with_labels(tuple_labels.clone())),
        VariableSpec::new("3", 8).and_then(|v| v.with_labels(tuple_labels)),
        VariableSpec::new("4", 36).and_then(|v| v.with_labels(x4_labels)),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("fixed specs are valid");
    let mut entries = Vec::with_capacity(512);
    for outcome in 0u32..512 {
        let coin = |k: u32| (outcome >> k & 1) as usize;
        let (phi, eps) = ([coin(0), coin(1), coin(2), coin(3), coin(4)], [coin(5), coin(6), coin(7), coin(8)]);
        let x1 = [phi[0], phi[1], eps[0]];
        let x2 = [x1[0], phi[2], eps[1]];
        let x3 = [phi[3], phi[4], eps[2]];
        let x4 = [x1[0] + x3[0], x2[0] + x3[1], x2[1], eps[3]];
        let tuple = |t: [usize; 3]| t[0] * 4 + t[1] * 2 + t[2];
        let s4 = ((x4[0] * 3 + x4[1]) * 2 + x4[2]) * 2 + x4[3];
        entries.push((vec![tuple(x1), tuple(x2), tuple(x3), s4], Exact::from_ratio(1, 512)));
    }
    DiscreteDistribution::from_sparse(vars, entries).expect("masses sum to one")
}

/// CPDAGs of the DAGs with the fewest edges along which `p` factorises.
pub fn sparsest_cpdag_search<S: Scalar>(p: &DiscreteDistribution<S>, nodes: &[NodeId]) -> Result<Vec<PDGraph>> {
    let mut markov = Vec::new();
    for d in all_dags(nodes)? {
        if density::is_markov_to_dag(p, &d)? {
            markov.push(d);
        }
    }
    let Some(best) = markov.iter().map(PDGraph::edge_count).min() else {
        return Ok(Vec::new());
    };
    let mut out: BTreeMap<String, PDGraph> = BTreeMap::new();
    for d in markov.iter().filter(|d| d.edge_count() == best) {
        let c = mpdag::cpdag_of(d)?;
        out.insert(c.to_string(), c);
    }
    Ok(out.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    /// 1-based trial in which the density was drawn.
    pub trial: usize,
    pub density: String,
    pub x_assignment: Intervention,
    pub verdict: OracleVerdict<Exact>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub trials: usize,
    /// Densities that were compatible with every graph and got checked.
    pub checked: usize,
    pub found: Option<Counterexample>,
}

/// All assignments of `x` (in row-major order of its variables).
fn x_grid<S: Scalar>(p: &DiscreteDistribution<S>, q: &IdentQuery) -> Result<Vec<Intervention>> {
    let mut grid = vec![Intervention::new()];
    for v in q.x() {
        let k = p.var_index(v.as_str()).ok_or_else(|| Error::UnknownNode(v.to_string()))?;
        let card = p.variables()[k].cardinality;
        grid = grid
            .into_iter()
            .flat_map(|a| {
                (0..card).map(move |s| {
                    let mut b = a.clone();
                    b.insert(v.clone(), s);
                    b
                })
            })
            .collect();
    }
    Ok(grid)
}

/// Looks for a density compatible with every graph and an intervention at
/// which two represented DAGs disagree. Densities are exact, with every
/// variable taking `arity` states, and are drawn along a represented DAG of
/// the first graph with some edges dropped. Refuses to run when the
/// identification criterion holds.
pub fn counterexample_search(gs: &CandidateSet, q: &IdentQuery, arity: usize, trials: usize, seed: u64) -> Result<SearchOutcome> {
    if arity < 2 {
        return Err(Error::InvalidQuery("arity must be at least 2".into()));
    }
    if identify::simultaneous_identify(gs, q)?.verdict == Verdict::Identifiable {
        return Err(Error::Precondition(
            "the criterion declares the effect identifiable; no counterexample can exist".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = represented_dags(&gs.graphs()[0])?;
    let mut checked = 0;
    for trial in 1..=trials {
        let ext = random::pick(&bases, &mut rng);
        let dag = if trial % 2 == 0 {
            random::random_sub_dag(ext, 0.3, &mut rng)
        } else {
            ext.clone()
        };
        let cards = vec![arity; dag.n()];
        let p = random::random_exact_density(&dag, &cards, &mut rng);
        match compatible_union(gs, &p) {
            Ok(_) => {}
            Err(Error::NotCompatible { .. }) => continue,
            Err(e) => return Err(e),
        }
        checked += 1;
        for x in x_grid(&p, q)? {
            let verdict = brute_force_check(gs, &p, q, &x)?;
            if !verdict.all_agree {
                return Ok(SearchOutcome {
                    seed,
                    trials: trial,
                    checked,
                    found: Some(Counterexample {
                        trial,
                        density: p.to_string(),
                        x_assignment: x,
                        verdict,
                    }),
                });
            }
        }
    }
    Ok(SearchOutcome {
        seed,
        trials,
        checked,
        found: None,
    })
}
