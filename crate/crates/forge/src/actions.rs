//! Finite permutation-group machinery: stabilizers with orbit bookkeeping,
//! coset selectors, and the saturation-by-uniqueness engine that recovers
//! the saturation of a family of pairwise inequivalent codes from stabilizer
//! transversals.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type Perm = Vec<u32>;

pub fn identity(degree: usize) -> Perm {
    (0..degree as u32).collect()
}

/// Apply `p` first, then `q`.
pub fn compose(p: &Perm, q: &Perm) -> Perm {
    p.iter().map(|&v| q[v as usize]).collect()
}

pub fn invert(p: &Perm) -> Perm {
    let mut inv = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

fn is_permutation(p: &[u32], degree: usize) -> bool {
    p.len() == degree && {
        let mut seen = vec![false; degree];
        p.iter()
            .all(|&v| (v as usize) < degree && !std::mem::replace(&mut seen[v as usize], true))
    }
}

/// A permutation group on `0..degree-1`, given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroup {
    pub degree: usize,
    pub gens: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if !is_permutation(g, degree) {
                return Err(Error::InvalidInstance(format!(
                    "generator {g:?} is not a permutation of degree {degree}"
                )));
            }
        }
        Ok(PermGroup { degree, gens })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            gens: vec![],
        }
    }

    /// All elements, in sorted order, by closure under the generators.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>> {
        let id = identity(self.degree);
        let mut seen: BTreeSet<Perm> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &self.gens {
                let q = compose(&p, g);
                if seen.insert(q.clone()) {
                    if seen.len() > cap {
                        return Err(Error::budget(
                            "group elements",
                            seen.len() as u64,
                            cap as u64,
                        ));
                    }
                    queue.push_back(q);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    pub fn order(&self, cap: usize) -> Result<u64> {
        Ok(self.elements(cap)?.len() as u64)
    }

    pub fn contains(&self, p: &Perm, cap: usize) -> Result<bool> {
        Ok(self.elements(cap)?.binary_search(p).is_ok())
    }
}

const GROUP_CAP: usize = 100_000;

/// Orbit of a point with a transversal: for each orbit point, a group
/// element carrying the base point there.
pub struct Orbit {
    pub base: u32,
    pub points: Vec<u32>,
    pub transversal: BTreeMap<u32, Perm>,
}

pub fn orbit_with_transversal(group: &PermGroup, w: u32) -> Orbit {
    let mut transversal = BTreeMap::from([(w, identity(group.degree))]);
    let mut points = vec![w];
    let mut queue = VecDeque::from([w]);
    while let Some(x) = queue.pop_front() {
        let ux = transversal[&x].clone();
        for g in &group.gens {
            let y = g[x as usize];
            if let std::collections::btree_map::Entry::Vacant(slot) = transversal.entry(y) {
                slot.insert(compose(&ux, g));
                points.push(y);
                queue.push_back(y);
            }
        }
    }
    points.sort_unstable();
    Orbit {
        base: w,
        points,
        transversal,
    }
}

/// The stabilizer of a point, generated by Schreier generators from the
/// orbit transversal. Asserts the orbit-stabilizer product.
pub fn stabilizer(group: &PermGroup, w: u32) -> Result<PermGroup> {
    if w as usize >= group.degree {
        return Err(Error::Precondition(format!(
            "point {w} outside degree {}",
            group.degree
        )));
    }
    let orbit = orbit_with_transversal(group, w);
    let mut gens: BTreeSet<Perm> = BTreeSet::new();
    let id = identity(group.degree);
    for (&x, ux) in &orbit.transversal {
        for g in &group.gens {
            let y = g[x as usize];
            let uy_inv = invert(&orbit.transversal[&y]);
            let schreier = compose(&compose(ux, g), &uy_inv);
            debug_assert_eq!(schreier[w as usize], w);
            if schreier != id {
                gens.insert(schreier);
            }
        }
    }
    let stab = PermGroup::new(group.degree, gens.into_iter().collect())?;
    debug_assert_eq!(
        group.order(GROUP_CAP)?,
        orbit.points.len() as u64 * stab.order(GROUP_CAP)?,
    );
    Ok(stab)
}

/// A selector for the left-coset equivalence of a subgroup: a map constant
/// on each coset, picking the least element, whose fixpoints form a
/// transversal.
#[derive(Debug, Clone)]
pub struct CosetSelector {
    pub choice: BTreeMap<Perm, Perm>,
}

impl CosetSelector {
    pub fn select(&self, y: &Perm) -> &Perm {
        &self.choice[y]
    }

    pub fn transversal(&self) -> Vec<Perm> {
        let mut t: Vec<Perm> = self
            .choice
            .iter()
            .filter(|(y, s)| y == s)
            .map(|(y, _)| y.clone())
            .collect();
        t.sort();
        t
    }
}

pub fn coset_selector(group: &PermGroup, sub: &PermGroup) -> Result<CosetSelector> {
    let elements = group.elements(GROUP_CAP)?;
    let sub_elements = sub.elements(GROUP_CAP)?;
    for h in &sub_elements {
        if elements.binary_search(h).is_err() {
            return Err(Error::Precondition(
                "selector requires a subgroup of the ambient group".into(),
            ));
        }
    }
    let mut choice = BTreeMap::new();
    for y in &elements {
        // Left coset of y: apply a subgroup element first, then y, so every
        // member moves the stabilized point the same way.
        let least = sub_elements
            .iter()
            .map(|h| compose(h, y))
            .min()
            .expect("subgroup contains the identity");
        choice.insert(y.clone(), least);
    }
    Ok(CosetSelector { choice })
}

// ---------------------------------------------------------------------------
// Reduction setups and saturation
// ---------------------------------------------------------------------------

/// A finite reduction setup: instances `B` mapped injectively into codes
/// `Z`, codes mapped into the acted-on set, and an equivalence on codes that
/// the code map reduces to orbit equivalence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionSetup {
    pub group: PermGroup,
    /// Number of codes.
    pub z_count: usize,
    /// Instance map: for each instance, its code.
    pub f: Vec<usize>,
    /// Code map into the acted-on points.
    pub g: Vec<u32>,
    /// Equivalence on codes as a class id per code.
    pub e_class: Vec<usize>,
}

impl ReductionSetup {
    fn orbit_id_table(&self) -> Vec<u32> {
        let mut orbit_id = vec![u32::MAX; self.group.degree];
        let mut next = 0;
        for w in 0..self.group.degree as u32 {
            if orbit_id[w as usize] == u32::MAX {
                for x in orbit_with_transversal(&self.group, w).points {
                    orbit_id[x as usize] = next;
                }
                next += 1;
            }
        }
        orbit_id
    }

    /// Exhaustive check that the code map reduces the equivalence to orbit
    /// equivalence.
    pub fn validate_reduction(&self) -> Result<()> {
        if self.g.len() != self.z_count || self.e_class.len() != self.z_count {
            return Err(Error::InvalidInstance(
                "code tables have wrong length".into(),
            ));
        }
        if let Some(&w) = self.g.iter().find(|&&w| w as usize >= self.group.degree) {
            return Err(Error::InvalidInstance(format!(
                "code image {w} outside the acted set"
            )));
        }
        if let Some(&z) = self.f.iter().find(|&&z| z >= self.z_count) {
            return Err(Error::InvalidInstance(format!(
                "instance code {z} out of range"
            )));
        }
        let mut seen = BTreeSet::new();
        if !self.f.iter().all(|&z| seen.insert(z)) {
            return Err(Error::InvalidInstance(
                "instance map is not injective".into(),
            ));
        }
        let orbit_id = self.orbit_id_table();
        for z1 in 0..self.z_count {
            for z2 in 0..self.z_count {
                let equivalent = self.e_class[z1] == self.e_class[z2];
                let orbit_eq = orbit_id[self.g[z1] as usize] == orbit_id[self.g[z2] as usize];
                if equivalent != orbit_eq {
                    return Err(Error::InvalidInstance(format!(
                        "code map does not reduce the equivalence at codes {z1}, {z2}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The hypothesis the uniqueness set needs: instance codes are pairwise
    /// inequivalent.
    pub fn validate_incomparable(&self) -> Result<()> {
        for (i, &z1) in self.f.iter().enumerate() {
            for &z2 in self.f.iter().skip(i + 1) {
                if self.e_class[z1] == self.e_class[z2] {
                    return Err(Error::InvalidInstance(format!(
                        "instance codes {z1} and {z2} are equivalent"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Direct saturation: all codes equivalent to some instance code.
pub fn direct_saturation(setup: &ReductionSetup) -> Result<BTreeSet<usize>> {
    setup.validate_reduction()?;
    Ok((0..setup.z_count)
        .filter(|&z| {
            setup
                .f
                .iter()
                .any(|&zb| setup.e_class[zb] == setup.e_class[z])
        })
        .collect())
}

/// The uniqueness set: codes hit by exactly one pair of an instance and a
/// transversal element of its stabilizer. With pairwise inequivalent
/// instance codes this recovers the saturation; a violated hypothesis shows
/// up as a mismatch against `direct_saturation`.
pub fn saturation_by_uniqueness(setup: &ReductionSetup) -> Result<BTreeSet<usize>> {
    setup.validate_reduction()?;
    let mut transversals: Vec<Vec<Perm>> = vec![];
    for &zb in &setup.f {
        let w = setup.g[zb];
        let stab = stabilizer(&setup.group, w)?;
        let selector = coset_selector(&setup.group, &stab)?;
        transversals.push(selector.transversal());
    }
    let mut out = BTreeSet::new();
    for z in 0..setup.z_count {
        let mut hits = 0usize;
        for (gi, &zb) in setup.f.iter().enumerate() {
            let w = setup.g[zb] as usize;
            for y in &transversals[gi] {
                if y[w] == setup.g[z] {
                    hits += 1;
                }
            }
        }
        if hits == 1 {
            out.insert(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_group(n: usize) -> PermGroup {
        let mut gens = vec![];
        for i in 0..n - 1 {
            let mut p = identity(n);
            p.swap(i, i + 1);
            gens.push(p);
        }
        PermGroup::new(n, gens).unwrap()
    }

    #[test]
    fn trivial_group_has_trivial_stabilizer() {
        let g = PermGroup::trivial(4);
        let s = stabilizer(&g, 2).unwrap();
        assert_eq!(s.order(100).unwrap(), 1);
    }

    #[test]
    fn symmetric_group_point_stabilizer() {
        let s3 = symmetric_group(3);
        assert_eq!(s3.order(100).unwrap(), 6);
        let stab = stabilizer(&s3, 0).unwrap();
        assert_eq!(stab.order(100).unwrap(), 2);
    }

    #[test]
    fn fixed_point_stabilizer_is_whole_group() {
        // Generators fixing point 3.
        let mut g1 = identity(4);
        g1.swap(0, 1);
        let mut g2 = identity(4);
        g2.swap(1, 2);
        let g = PermGroup::new(4, vec![g1, g2]).unwrap();
        let stab = stabilizer(&g, 3).unwrap();
        assert_eq!(stab.order(100).unwrap(), g.order(100).unwrap());
    }

    #[test]
    fn stabilizer_conjugation_covariance() {
        let s4 = symmetric_group(4);
        let elements = s4.elements(100).unwrap();
        let w = 1u32;
        let stab_w = stabilizer(&s4, w).unwrap().elements(100).unwrap();
        for y in elements.iter().step_by(5) {
            let wy = y[w as usize];
            let stab_wy = stabilizer(&s4, wy).unwrap().elements(100).unwrap();
            let conj: BTreeSet<Perm> = stab_w
                .iter()
                .map(|s| compose(&compose(&invert(y), s), y))
                .collect();
            let direct: BTreeSet<Perm> = stab_wy.into_iter().collect();
            assert_eq!(conj, direct);
        }
    }

    #[test]
    fn selector_is_idempotent_with_lagrange_transversal() {
        let s3 = symmetric_group(3);
        let stab = stabilizer(&s3, 0).unwrap();
        let sel = coset_selector(&s3, &stab).unwrap();
        for (y, s) in &sel.choice {
            assert_eq!(sel.select(s), s, "selector not idempotent at {y:?}");
        }
        assert_eq!(sel.transversal().len(), 3);
    }

    #[test]
    fn whole_group_selector_is_constant_and_trivial_subgroup_identity() {
        let s3 = symmetric_group(3);
        let sel_all = coset_selector(&s3, &s3).unwrap();
        let values: BTreeSet<Perm> = sel_all.choice.values().cloned().collect();
        assert_eq!(values.len(), 1);
        let sel_id = coset_selector(&s3, &PermGroup::trivial(3)).unwrap();
        for (y, s) in &sel_id.choice {
            assert_eq!(y, s);
        }
    }

    #[test]
    fn non_subgroup_is_rejected() {
        // A transposition does not lie in the cyclic group of a 3-cycle.
        let a3 = PermGroup::new(3, vec![vec![1, 2, 0]]).unwrap();
        let mut odd = identity(3);
        odd.swap(0, 1);
        let h = PermGroup::new(3, vec![odd]).unwrap();
        assert!(matches!(
            coset_selector(&a3, &h),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_instance_saturation_is_its_class() {
        let s3 = symmetric_group(3);
        // Codes 0..5 mapping onto points 0,1,2,0,1,2; classes by point orbit
        // (one orbit, so everything is equivalent).
        let setup = ReductionSetup {
            group: s3,
            z_count: 6,
            f: vec![0],
            g: vec![0, 1, 2, 0, 1, 2],
            e_class: vec![0; 6],
        };
        let p = saturation_by_uniqueness(&setup).unwrap();
        let direct = direct_saturation(&setup).unwrap();
        assert_eq!(p, direct);
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn corrupted_setup_is_detected() {
        // Two instances with equivalent codes: the uniqueness set drops
        // their shared class, the direct saturation keeps it.
        let s3 = symmetric_group(3);
        let setup = ReductionSetup {
            group: s3,
            z_count: 4,
            f: vec![0, 3],
            g: vec![0, 1, 2, 1],
            e_class: vec![0; 4],
        };
        setup.validate_reduction().unwrap();
        assert!(setup.validate_incomparable().is_err());
        let p = saturation_by_uniqueness(&setup).unwrap();
        let direct = direct_saturation(&setup).unwrap();
        assert_ne!(p, direct);
    }

    #[test]
    fn two_orbit_setup() {
        // The group swapping 0,1 and fixing 2,3: orbits {0,1}, {2}, {3}.
        let mut swap = identity(4);
        swap.swap(0, 1);
        let g = PermGroup::new(4, vec![swap]).unwrap();
        let setup = ReductionSetup {
            group: g,
            z_count: 4,
            f: vec![0, 2],
            g: vec![0, 1, 2, 3],
            e_class: vec![0, 0, 1, 2],
        };
        setup.validate_reduction().unwrap();
        setup.validate_incomparable().unwrap();
        let p = saturation_by_uniqueness(&setup).unwrap();
        let direct = direct_saturation(&setup).unwrap();
        assert_eq!(p, direct);
        assert_eq!(p, BTreeSet::from([0, 1, 2]));
    }
}
