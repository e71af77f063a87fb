//! Colored sums of omega powers: the embedding decider against the naive
//! enumeration oracle, absorption in the normal form, and the colored-sum
//! profile of a graph.

use forge::colored::{build_lg, embeds, embeds_naive, iso_colored, ColorRelation, ColoredSum};
use forge::graph::Graph;
use forge::Result;

fn main() -> Result<()> {
    let eq = ColorRelation::Equality;

    // The classical non-embedding: one extra point after a limit.
    let omega_plus_one = ColoredSum::new(vec![(1, 0), (0, 0)]);
    let omega = ColoredSum::new(vec![(1, 0)]);
    println!(
        "omega + 1 into omega: {:?} (oracle {:?})",
        embeds(&omega_plus_one, &omega, &eq).is_some(),
        embeds_naive(&omega_plus_one, &omega, &eq).is_some(),
    );
    println!(
        "omega into omega + 1: {:?}",
        embeds(&omega, &omega_plus_one, &eq).is_some()
    );

    // Left absorption: a lower power followed by a higher same-colored one.
    let a = ColoredSum::new(vec![(1, 5), (2, 5)]);
    let b = ColoredSum::new(vec![(2, 5)]);
    println!(
        "normal form of {:?} is {:?}; isomorphic to {:?}: {}",
        a.blocks,
        a.normal_form().blocks,
        b.blocks,
        iso_colored(&a, &b)
    );

    // A mixed pair decided under equality and under domination.
    let x = ColoredSum::new(vec![(2, 1), (1, 0)]);
    let y = ColoredSum::new(vec![(3, 1), (2, 0)]);
    let phi = embeds(&x, &y, &eq).expect("embeds blockwise");
    println!(
        "assignment of {:?} into {:?}: {:?}",
        x.blocks, y.blocks, phi
    );
    println!(
        "under color domination as well: {}",
        embeds(&x, &y, &ColorRelation::Geq).is_some()
    );

    // Colored profiles of an edge and a non-edge differ at the pair blocks.
    let edge = build_lg(&Graph::path(2), 2, 2)?;
    let non_edge = build_lg(&Graph::empty(2), 2, 2)?;
    println!("edge profile:     {:?}", edge.blocks);
    println!("non-edge profile: {:?}", non_edge.blocks);
    assert!(!iso_colored(&edge, &non_edge));
    Ok(())
}
