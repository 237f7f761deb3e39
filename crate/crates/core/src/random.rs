//! Seeded generators for DAGs, SA-MPDAGs, queries, candidate sets and
//! densities. Everything takes an explicit RNG so runs are reproducible.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::density::{DiscreteDistribution, Exact, Scalar, VariableSpec};
use crate::error::Result;
use crate::graph::{self, EdgeKind, NodeSet, PDGraph};
use crate::identify::IdentQuery;
use crate::mpdag::{self, BackgroundKnowledge, SaMpdag};

/// Node names `v0 .. v{n-1}`.
pub fn node_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// A DAG over `v0 .. v{n-1}`: a random node order, then each forward pair
/// joined with probability `density`.
pub fn random_dag<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> PDGraph {
    let mut g = PDGraph::new(node_names(n)).expect("generated names are valid");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                g.add_edge_idx(order[a], order[b], EdgeKind::Directed)
                    .expect("fresh pair");
            }
        }
    }
    g
}

/// A topological order of `dag`, breaking ties at random.
pub fn random_linear_extension<R: Rng + ?Sized>(dag: &PDGraph, rng: &mut R) -> Vec<usize> {
    let n = dag.n();
    let mut indeg: Vec<usize> = (0..n).map(|i| dag.parents_of(i).count()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let k = rng.random_range(0..ready.len());
        let v = ready.swap_remove(k);
        order.push(v);
        for c in dag.children_of(v) {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    order
}

/// A random subset (each edge with probability `fraction`) of the DAG's edges
/// as background knowledge.
pub fn random_knowledge<R: Rng + ?Sized>(dag: &PDGraph, fraction: f64, rng: &mut R) -> BackgroundKnowledge {
    let edges = dag
        .directed_edges()
        .into_iter()
        .filter(|_| rng.random_bool(fraction));
    BackgroundKnowledge::new(edges).expect("edges of a DAG")
}

/// Attempts at drawing background knowledge whose closure is strictly
/// acyclic before falling back to the plain CPDAG.
const KNOWLEDGE_ATTEMPTS: usize = 20;

/// The SA-MPDAG obtained from the CPDAG of `dag` plus background knowledge
/// drawn from `dag` itself, so `dag` is always represented. Knowledge whose
/// closure has a semi-directed cycle is redrawn; after repeated failures the
/// CPDAG itself is returned.
pub fn mpdag_of<R: Rng + ?Sized>(dag: &PDGraph, bk_fraction: f64, rng: &mut R) -> Result<SaMpdag> {
    let cpdag = mpdag::cpdag_of(dag)?;
    for _ in 0..KNOWLEDGE_ATTEMPTS {
        if let Ok(g) = SaMpdag::from_cpdag(&cpdag, random_knowledge(dag, bk_fraction, rng)) {
            return Ok(g);
        }
    }
    SaMpdag::from_cpdag(&cpdag, BackgroundKnowledge::default())
}

/// A random SA-MPDAG together with one DAG it represents.
pub fn random_sa_mpdag<R: Rng + ?Sized>(
    n: usize,
    density: f64,
    bk_fraction: f64,
    rng: &mut R,
) -> (SaMpdag, PDGraph) {
    let dag = random_dag(n, density, rng);
    let g = mpdag_of(&dag, bk_fraction, rng).expect("a CPDAG is strictly acyclic");
    (g, dag)
}

/// Disjoint non-empty `x` and `y` of at most `max_size` nodes each.
pub fn random_query<R: Rng + ?Sized>(nodes: &NodeSet, max_size: usize, rng: &mut R) -> IdentQuery {
    assert!(nodes.len() >= 2, "a query needs two nodes");
    let mut all: Vec<_> = nodes.iter().cloned().collect();
    all.shuffle(rng);
    let kx = rng.random_range(1..=max_size.min(all.len() - 1));
    let ky = rng.random_range(1..=max_size.min(all.len() - kx));
    let x = all[..kx].iter().cloned().collect();
    let y = all[kx..kx + ky].iter().cloned().collect();
    IdentQuery::new(x, y).expect("disjoint and non-empty")
}

/// `dag` plus extra edges, each forward pair of a random topological order
/// of `dag` being added with probability `extra`.
pub fn random_super_dag<R: Rng + ?Sized>(dag: &PDGraph, extra: f64, rng: &mut R) -> PDGraph {
    let order = random_linear_extension(dag, rng);
    let mut g = dag.clone();
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            let (i, j) = (order[a], order[b]);
            if !g.is_adjacent(i, j) && rng.random_bool(extra) {
                g.add_edge_idx(i, j, EdgeKind::Directed).expect("non-adjacent pair");
            }
        }
    }
    g
}

/// `k` SA-MPDAGs, each the MPDAG of a random super-DAG of `base`. Every
/// density that factorises according to `base` is compatible with all of
/// them.
pub fn random_candidate_set<R: Rng + ?Sized>(
    base: &PDGraph,
    k: usize,
    extra: f64,
    bk_fraction: f64,
    rng: &mut R,
) -> Vec<SaMpdag> {
    (0..k)
        .map(|_| {
            let sup = random_super_dag(base, extra, rng);
            mpdag_of(&sup, bk_fraction, rng).expect("a CPDAG is strictly acyclic")
        })
        .collect()
}

/// `dag` with each edge removed independently with probability `drop`.
pub fn random_sub_dag<R: Rng + ?Sized>(dag: &PDGraph, drop: f64, rng: &mut R) -> PDGraph {
    let mut g = PDGraph::from_ids(dag.nodes().to_vec()).expect("valid nodes");
    for (i, j) in dag.directed_idx() {
        if !rng.random_bool(drop) {
            g.add_edge_idx(i, j, EdgeKind::Directed).expect("fresh pair");
        }
    }
    g
}

/// Cardinalities drawn uniformly from `2..=max_card`, one per node of `g`.
pub fn random_cards<R: Rng + ?Sized>(g: &PDGraph, max_card: usize, rng: &mut R) -> Vec<usize> {
    (0..g.n()).map(|_| rng.random_range(2..=max_card.max(2))).collect()
}

/// Product of conditional tables along `dag`, each row filled by `weight`
/// and normalised. Variables follow the node order of `dag`.
pub fn density_from_weights<S, F>(dag: &PDGraph, cards: &[usize], mut weight: F) -> Result<DiscreteDistribution<S>>
where
    S: Scalar,
    F: FnMut() -> S,
{
    assert!(graph::is_dag(dag), "densities are generated along a DAG");
    assert_eq!(cards.len(), dag.n());
    let vars = dag
        .nodes()
        .iter()
        .zip(cards)
        .map(|(n, &c)| VariableSpec::new(n.as_str(), c))
        .collect::<Result<Vec<_>>>()?;
    let parents: Vec<Vec<usize>> = (0..dag.n()).map(|v| dag.parents_of(v).collect()).collect();
    let tables: Vec<Vec<S>> = (0..dag.n())
        .map(|v| {
            let rows: usize = parents[v].iter().map(|&p| cards[p]).product();
            let mut t = Vec::with_capacity(rows * cards[v]);
            for _ in 0..rows {
                let row: Vec<S> = (0..cards[v]).map(|_| weight()).collect();
                let total = row.iter().fold(S::zero(), |a, w| a + w.clone());
                t.extend(row.into_iter().map(|w| w / total.clone()));
            }
            t
        })
        .collect();
    DiscreteDistribution::from_fn(vars, |a| {
        let mut p = S::one();
        for v in 0..a.len() {
            let row = parents[v].iter().fold(0, |acc, &q| acc * cards[q] + a[q]);
            p = p * tables[v][row * cards[v] + a[v]].clone();
            if p.is_zero() {
                break;
            }
        }
        p
    })
}

/// A strictly positive floating point density that factorises according
/// to `dag`, with exponentially distributed row weights.
pub fn random_density<R: Rng + ?Sized>(dag: &PDGraph, cards: &[usize], rng: &mut R) -> DiscreteDistribution<f64> {
    density_from_weights(dag, cards, || -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .expect("generated density is valid")
}

/// A strictly positive exact density that factorises according to `dag`,
/// with integer row weights in `1..=9`.
pub fn random_exact_density<R: Rng + ?Sized>(dag: &PDGraph, cards: &[usize], rng: &mut R) -> DiscreteDistribution<Exact> {
    density_from_weights(dag, cards, || Exact::from_ratio(rng.random_range(1..=9), 1))
        .expect("generated density is valid")
}

/// A random element of `items`.
pub fn pick<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> &'a T {
    items.choose(rng).expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_graphs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (g, dag) = random_sa_mpdag(6, 0.4, 0.3, &mut rng);
            assert!(graph::is_dag(&dag));
            let ext = mpdag::enumerate_extensions(&g).unwrap();
            assert!(ext.contains(&dag));
        }
    }

    #[test]
    fn candidate_sets_share_the_base_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = random_dag(5, 0.3, &mut rng);
        let p = random_exact_density(&base, &[2, 2, 3, 2, 2], &mut rng);
        for g in random_candidate_set(&base, 3, 0.3, 0.3, &mut rng) {
            assert!(density::is_compatible_exhaustive(&p, &g).unwrap());
        }
    }

    #[test]
    fn queries_are_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nodes = graph::node_set(node_names(4)).unwrap();
        for _ in 0..100 {
            let q = random_query(&nodes, 2, &mut rng);
            assert!(q.x().is_disjoint(q.y()));
            assert!(!q.x().is_empty() && !q.y().is_empty());
        }
    }
}
