//! The saturation engine: stabilizers with orbit bookkeeping, coset
//! selectors, and the uniqueness set recovering the saturation of a family
//! of pairwise inequivalent codes, including the failure mode when that
//! hypothesis is corrupted.

use forge::actions::{
    coset_selector, direct_saturation, identity, saturation_by_uniqueness, stabilizer, PermGroup,
    ReductionSetup,
};
use forge::Result;

fn main() -> Result<()> {
    // The symmetric group on four points.
    let mut gens = vec![];
    for i in 0..3 {
        let mut p = identity(4);
        p.swap(i, i + 1);
        gens.push(p);
    }
    let s4 = PermGroup::new(4, gens)?;
    println!("group order: {}", s4.order(1000)?);

    let stab = stabilizer(&s4, 0)?;
    println!("stabilizer of point 0: order {}", stab.order(1000)?);
    let selector = coset_selector(&s4, &stab)?;
    println!(
        "selector transversal size: {} (one representative per coset)",
        selector.transversal().len()
    );

    // Codes 0..7 land on points; the equivalence is pulled back from the
    // orbits of a subgroup fixing the last point.
    let mut swap01 = identity(4);
    swap01.swap(0, 1);
    let mut swap12 = identity(4);
    swap12.swap(1, 2);
    let group = PermGroup::new(4, vec![swap01, swap12])?;
    let setup = ReductionSetup {
        group,
        z_count: 8,
        f: vec![0, 3],
        g: vec![0, 1, 2, 3, 0, 1, 2, 3],
        e_class: vec![0, 0, 0, 1, 0, 0, 0, 1],
    };
    setup.validate_reduction()?;
    setup.validate_incomparable()?;
    let p = saturation_by_uniqueness(&setup)?;
    let direct = direct_saturation(&setup)?;
    println!("uniqueness set: {p:?}");
    println!("direct saturation: {direct:?}");
    assert_eq!(p, direct);

    // Corrupt the instance family with two equivalent codes.
    let mut bad = setup.clone();
    bad.f = vec![0, 4];
    println!(
        "corrupted family flagged: {}",
        bad.validate_incomparable().is_err()
    );
    let p_bad = saturation_by_uniqueness(&bad)?;
    let direct_bad = direct_saturation(&bad)?;
    println!("uniqueness set now {p_bad:?} against saturation {direct_bad:?}");
    assert_ne!(p_bad, direct_bad);
    Ok(())
}
