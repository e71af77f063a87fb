//! Quantifier-free type codes and the epimorphism gadget: build the block
//! gadget of a small graph, inspect its simple automorphism group against
//! the product formula, and probe the local extension predicate.

use forge::epi::{
    build_epi_gadget, can_extend_simple, expected_simple_order, simple_automorphism_group,
    type_code, EpiKind,
};
use forge::graph::{automorphisms, Graph, SearchBudget};
use forge::Result;

fn main() -> Result<()> {
    let g = Graph::path(3);
    println!("type codes in a path on three vertices:");
    println!("  empty tuple        -> {}", type_code(&g, &[])?);
    println!("  single vertex      -> {}", type_code(&g, &[0])?);
    println!("  equal pair         -> {}", type_code(&g, &[1, 1])?);
    println!("  non-adjacent pair  -> {}", type_code(&g, &[0, 2])?);
    println!("  adjacent pair      -> {}", type_code(&g, &[0, 1])?);

    let budget = SearchBudget::for_suites();
    let e = build_epi_gadget(&g, 1, 2, budget)?;
    println!(
        "gadget at depth 1, bound 2: {} vertices in {} blocks",
        e.graph.n(),
        e.block_types.len()
    );

    let simple = simple_automorphism_group(&e)?;
    let full = automorphisms(&e.graph)?;
    println!(
        "simple automorphisms: {} (product formula {}), full group: {}",
        simple.order,
        expected_simple_order(&e),
        full.order
    );

    // Two clique companions in one block are interchangeable; heads are not.
    let companion = |idx: u32| {
        e.kinds
            .iter()
            .position(|k| *k == EpiKind::Clique(vec![0], idx))
            .unwrap() as u32
    };
    let head = e
        .kinds
        .iter()
        .position(|k| *k == EpiKind::Head(vec![0]))
        .unwrap() as u32;
    let mut swap: Vec<u32> = (0..e.graph.n() as u32).collect();
    swap[companion(1) as usize] = companion(2);
    swap[companion(2) as usize] = companion(1);
    println!(
        "swapping two companions extends: {}",
        can_extend_simple(&e, &swap[..companion(2) as usize + 1])?
    );
    let mut move_head: Vec<u32> = (0..head).collect();
    move_head.push(companion(1));
    println!(
        "moving a head into its clique extends: {}",
        can_extend_simple(&e, &move_head)?
    );
    Ok(())
}
