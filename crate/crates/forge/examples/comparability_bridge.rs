//! Walk one pair of normal trees through the comparability pipeline: decide
//! the quasi-order, refine the witness to an injective one (enlarging the
//! numeric bound when separation needs room), and realize it as a structured
//! embedding between the gadget graphs.

use forge::graph::SearchBudget;
use forge::trees::{
    canonical_injective_witness, extend_witness_to_spine, le_max, word_from_string, word_to_string,
    NormalTree,
};
use forge::{gadget, Result};

fn tree(d: u8, b: u8, nodes: &[(&str, &[u8])]) -> Result<NormalTree> {
    NormalTree::new(
        d,
        b,
        nodes
            .iter()
            .map(|(u, s)| Ok((word_from_string(u)?, s.to_vec())))
            .collect::<Result<_>>()?,
    )
}

fn main() -> Result<()> {
    // The source rides on both numeric children; the target only on the
    // higher one, so the only witness folds both onto it.
    let source = tree(1, 2, &[("", &[]), ("0", &[0]), ("0", &[1])])?;
    let target = tree(1, 2, &[("", &[]), ("0", &[1])])?;

    let witness = le_max(&source, &target)?.expect("the trees are comparable");
    for (s, t) in &witness.map {
        println!("f({:>2}) = {:<2}", word_to_string(s), word_to_string(t));
    }

    let refined = canonical_injective_witness(&source, &target, &witness)?;
    println!(
        "injective refinement needs bound {} (target bound was {})",
        refined.bound, target.b
    );
    for (s, t) in &refined.map {
        println!("f'({:>2}) = {:<2}", word_to_string(s), word_to_string(t));
    }

    let budget = SearchBudget::for_suites();
    let gs = gadget::build_gadget(&source, budget)?;
    let gt_enlarged = gadget::build_gadget(&refined.target, budget)?;
    let spine = extend_witness_to_spine(&source, &refined)?;
    let structured = gadget::induce_structured(&gs, &gt_enlarged, spine)?;
    assert!(gadget::is_structured_witness(
        &gs,
        &gt_enlarged,
        &structured
    )?);
    println!(
        "structured embedding: {} gadget vertices into {}",
        gs.graph.n(),
        gt_enlarged.graph.n()
    );

    // The incomparable direction has no structured embedding either.
    let gt_matched = gadget::build_gadget(&target, budget)?;
    assert!(le_max(&target, &source)?.is_some());
    assert!(gadget::structured_embed(&gs, &gt_matched)?.is_none());
    println!("at the matched bound the separation needs more room, as expected");
    Ok(())
}
