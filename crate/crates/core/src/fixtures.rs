//! The two worked candidate sets: a pair of CPDAGs over nodes 1..4 that
//! represent the same distribution with the fewest edges, and a pair of
//! SA-MPDAGs over nodes 1..5 with different adjacencies that share the
//! background knowledge `1 -> 4`, `4 -> 5`.

use crate::graph::PDGraph;
use crate::mpdag::{validate_sa_mpdag, BackgroundKnowledge, SaMpdag};

pub const FIG1_G1: &str = "\
nodes 1 2 3 4
1 -> 4
2 -> 4
3 -> 4
1 -- 2
";

pub const FIG1_G2: &str = "\
nodes 1 2 3 4
1 -> 4
3 -> 4
4 -> 2
1 -> 2
";

pub const FIG2_G1: &str = "\
nodes 1 2 3 4 5
1 -> 4
3 -> 4
4 -> 5
1 -> 5
1 -- 2
3 -- 2
";

pub const FIG2_G2: &str = "\
nodes 1 2 3 4 5
1 -> 4
1 -> 2
3 -> 2
4 -> 5
1 -> 5
";

fn load(text: &str) -> SaMpdag {
    let g: PDGraph = text.parse().expect("fixture parses");
    validate_sa_mpdag(g).expect("fixture is a valid SA-MPDAG")
}

fn fig2_knowledge() -> BackgroundKnowledge {
    BackgroundKnowledge::from_names(&[("1", "4"), ("4", "5")]).expect("valid names")
}

pub fn fig1_g1() -> SaMpdag {
    load(FIG1_G1)
}

pub fn fig1_g2() -> SaMpdag {
    load(FIG1_G2)
}

pub fn fig2_g1() -> SaMpdag {
    load(FIG2_G1).with_provenance(fig2_knowledge())
}

pub fn fig2_g2() -> SaMpdag {
    load(FIG2_G2).with_provenance(fig2_knowledge())
}
