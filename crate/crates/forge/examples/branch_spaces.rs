//! Ultrametric branch spaces: build the space of maximal root paths of a
//! gadget graph, inspect fork distances, run the isometric-embedding search,
//! and query the ball structure's extension predicate.

use forge::gadget::build_gadget;
use forge::graph::SearchBudget;
use forge::metric::{
    build_branch_ball_structure, build_branch_space, build_discrete, can_extend_ball_auto,
    iso_embed_metric, recover_graph, ForkKind,
};
use forge::trees::NormalTree;
use forge::Result;

fn main() -> Result<()> {
    let budget = SearchBudget::for_suites();
    let tree = NormalTree::full(1, 1);
    let g = build_gadget(&tree, budget)?;
    let bs = build_branch_space(&g)?;
    println!(
        "branch space of a depth-1 gadget: {} points, ultrametric: {}",
        bs.metric.n(),
        bs.metric.is_ultrametric()
    );
    for fork in &bs.forks {
        match &fork.kind {
            ForkKind::Bundle { s } => println!(
                "  tine bundle at {:?}: {} branches, pairwise distance {}",
                s,
                fork.members.len(),
                bs.metric.d(fork.members[0], fork.members[1])
            ),
            ForkKind::Pair { s, u } => println!(
                "  code pair at ({:?}, {:?}): distance {}",
                s,
                u,
                bs.metric.d(fork.members[0], fork.members[1])
            ),
        }
    }

    // The smaller gadget's space embeds isometrically into this one.
    let small = build_branch_space(&build_gadget(&NormalTree::root_only(1, 1), budget)?)?;
    let embedding = iso_embed_metric(&small.metric, &bs.metric);
    println!(
        "smaller space ({} points) embeds: {}",
        small.metric.n(),
        embedding.is_some()
    );

    // Ball structure: names of one singleton ball are interchangeable,
    // points of different forks are not.
    let s = build_branch_ball_structure(&bs)?;
    println!(
        "ball structure: {} slots x {} radii",
        s.slots.len(),
        s.radii.len()
    );
    let singles: Vec<usize> = (0..s.universe_len())
        .filter(|&e| s.is_singleton(e))
        .collect();
    let (e1, same) = (
        singles[0],
        singles
            .iter()
            .copied()
            .find(|&e| e != singles[0] && s.same_ball(e, singles[0]))
            .expect("every ball has two names"),
    );
    println!(
        "two names of one ball swap: {}",
        can_extend_ball_auto(&bs, &s, &vec![(e1, same)])?
    );

    // Geodesic round trip on the gadget itself.
    let metric = build_discrete(&g.graph)?;
    println!(
        "geodesic recovery round-trips: {}",
        recover_graph(&metric)? == g.graph
    );
    Ok(())
}
