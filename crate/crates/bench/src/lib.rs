//! Seeded workloads for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use simid_core::density::Intervention;
use simid_core::{random, CandidateSet, DiscreteDistribution, IdentQuery, SaMpdag};

pub struct Workload {
    pub set: CandidateSet,
    pub query: IdentQuery,
    pub density: DiscreteDistribution<f64>,
    pub x: Intervention,
}

/// `k` candidates over `n` nodes sharing one compatible density.
pub fn workload(n: usize, k: usize, seed: u64) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random::random_dag(n, 0.4, &mut rng);
    let graphs = random::random_candidate_set(&base, k, 0.2, 0.3, &mut rng);
    let query = random::random_query(&base.node_set(), 2, &mut rng);
    let cards = random::random_cards(&base, 2, &mut rng);
    let density = random::random_density(&base, &cards, &mut rng);
    let x = query.x().iter().map(|v| (v.clone(), 0)).collect();
    Workload {
        set: CandidateSet::new(graphs).expect("generated graphs share nodes"),
        query,
        density,
        x,
    }
}

/// A CPDAG-like graph with `n` nodes for extension enumeration.
pub fn sparse_mpdag(n: usize, seed: u64) -> SaMpdag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random::random_sa_mpdag(n, 0.3, 0.0, &mut rng).0
}
