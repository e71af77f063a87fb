//! Colored sums of omega powers and their embedding deciders.
//!
//! A sum is a finite block sequence; block `i` stands for an interval of
//! order type omega^{a_i} colored `c_i`. The embedding decider exploits
//! additive indecomposability: an order embedding sends all but the last of
//! the source blocks sharing a target block strictly below that target's
//! exponent, and block images appear in weakly increasing order. A naive
//! enumerator over all monotone assignments applies the same acceptance
//! predicate and serves as the independent oracle.

use crate::epi::{reduce_tuple, type_code};
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A finite sum of colored omega-power blocks, in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredSum {
    /// `(exponent, color)` per block.
    pub blocks: Vec<(u32, u32)>,
}

impl ColoredSum {
    pub fn new(blocks: Vec<(u32, u32)>) -> Self {
        ColoredSum { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Left absorption: a block immediately followed by a same-colored block
    /// of strictly larger exponent is absorbed; iterated to fixpoint.
    pub fn normal_form(&self) -> ColoredSum {
        let mut stack: Vec<(u32, u32)> = vec![];
        for &(a, c) in &self.blocks {
            while let Some(&(a0, c0)) = stack.last() {
                if c0 == c && a0 < a {
                    stack.pop();
                } else {
                    break;
                }
            }
            stack.push((a, c));
        }
        ColoredSum { blocks: stack }
    }
}

/// How colors must relate along an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColorRelation {
    Equality,
    Geq,
    Table { pairs: BTreeSet<(u32, u32)> },
}

impl ColorRelation {
    pub fn relates(&self, c: u32, c2: u32) -> bool {
        match self {
            ColorRelation::Equality => c == c2,
            ColorRelation::Geq => c >= c2,
            ColorRelation::Table { pairs } => pairs.contains(&(c, c2)),
        }
    }

    /// Containment of relation tables over a color range; used for the
    /// monotonicity bridge between relation choices.
    pub fn contained_in(&self, other: &ColorRelation, max_color: u32) -> bool {
        (0..=max_color)
            .all(|c| (0..=max_color).all(|c2| !self.relates(c, c2) || other.relates(c, c2)))
    }
}

/// The shared acceptance predicate: a monotone block assignment embeds the
/// source when colors relate, exponents fit, and among the source blocks
/// sharing a target only the last may match the target exponent.
pub fn assignment_valid(a: &ColoredSum, b: &ColoredSum, r: &ColorRelation, phi: &[usize]) -> bool {
    if phi.len() != a.len() {
        return false;
    }
    for (i, &j) in phi.iter().enumerate() {
        if j >= b.len() {
            return false;
        }
        if i > 0 && phi[i - 1] > j {
            return false;
        }
        let (ai, ci) = a.blocks[i];
        let (bj, cj) = b.blocks[j];
        if !r.relates(ci, cj) || ai > bj {
            return false;
        }
        let last_in_target = i + 1 == phi.len() || phi[i + 1] != j;
        if !last_in_target && ai >= bj {
            return false;
        }
    }
    true
}

/// Decides embeddability by memoized search over monotone assignments,
/// returning the least assignment. The state `(i, j)` asks whether sources
/// `i..` fit into targets `j..`; a run of sources sharing a target keeps its
/// non-final members strict at assignment time, so states need no more
/// context.
pub fn embeds(a: &ColoredSum, b: &ColoredSum, r: &ColorRelation) -> Option<Vec<usize>> {
    fn rec(
        a: &ColoredSum,
        b: &ColoredSum,
        r: &ColorRelation,
        i: usize,
        j: usize,
        memo: &mut Vec<Option<bool>>,
        out: &mut Vec<usize>,
    ) -> bool {
        if i == a.len() {
            return true;
        }
        if j == b.len() {
            return false;
        }
        let key = i * (b.len() + 1) + j;
        if let Some(false) = memo[key] {
            return false;
        }
        let (ai, ci) = a.blocks[i];
        let (bj, cj) = b.blocks[j];
        if r.relates(ci, cj) && ai <= bj {
            out.push(j);
            // Another source follows into the same target: i must be strict.
            if ai < bj && rec(a, b, r, i + 1, j, memo, out) {
                return true;
            }
            // i is the last source in this target.
            if rec(a, b, r, i + 1, j + 1, memo, out) {
                return true;
            }
            out.pop();
        }
        // Skip target j entirely.
        if rec(a, b, r, i, j + 1, memo, out) {
            return true;
        }
        memo[key] = Some(false);
        false
    }
    let mut out = vec![];
    if a.is_empty() {
        return Some(out);
    }
    let mut memo = vec![None; (a.len() + 1) * (b.len() + 1) + 1];
    if rec(a, b, r, 0, 0, &mut memo, &mut out) {
        debug_assert!(assignment_valid(a, b, r, &out));
        Some(out)
    } else {
        None
    }
}

/// Full enumeration of monotone assignments with the same predicate and no
/// pruning; the independent oracle for `embeds`.
pub fn embeds_naive(a: &ColoredSum, b: &ColoredSum, r: &ColorRelation) -> Option<Vec<usize>> {
    fn rec(
        a: &ColoredSum,
        b: &ColoredSum,
        r: &ColorRelation,
        i: usize,
        lo: usize,
        phi: &mut Vec<usize>,
    ) -> bool {
        if i == a.len() {
            return assignment_valid(a, b, r, phi);
        }
        for j in lo..b.len() {
            phi.push(j);
            if rec(a, b, r, i + 1, j, phi) {
                return true;
            }
            phi.pop();
        }
        false
    }
    let mut phi = vec![];
    if rec(a, b, r, 0, 0, &mut phi) {
        Some(phi)
    } else {
        None
    }
}

/// Color-preserving isomorphism: identical normal forms.
pub fn iso_colored(a: &ColoredSum, b: &ColoredSum) -> bool {
    a.normal_form() == b.normal_form()
}

// ---------------------------------------------------------------------------
// Colored sums from graphs
// ---------------------------------------------------------------------------

/// First component of the Cantor pairing inverse; listed value `k_n`. Every
/// natural occurs infinitely often along this sequence.
pub fn cantor_k(n: u64) -> u64 {
    let w = ((((8 * n + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
    let w = if (w + 1) * (w + 2) / 2 <= n { w + 1 } else { w };
    let j = n - w * (w + 1) / 2;
    w - j
}

/// Index words up to depth `d` over `b` entries, without the empty word, in
/// preorder: each word before its extensions, siblings by entry.
pub fn preorder_words(d: u8, b: u8) -> Vec<Vec<u8>> {
    fn rec(d: u8, b: u8, prefix: Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == d as usize {
            return;
        }
        for i in 0..b {
            let mut w = prefix.clone();
            w.push(i);
            out.push(w.clone());
            rec(d, b, w, out);
        }
    }
    let mut out = vec![];
    rec(d, b, vec![], &mut out);
    out
}

/// The colored sum of a nonempty graph: one block per nonempty index word in
/// preorder, with exponent twice the type code of the relabeled word and the
/// code itself as color.
pub fn build_lg(g: &Graph, d: u8, b: u8) -> Result<ColoredSum> {
    if g.n() == 0 {
        return Err(Error::Precondition(
            "colored sum source must be nonempty".into(),
        ));
    }
    let mut blocks = vec![];
    for t in preorder_words(d, b) {
        let lambda: Vec<u8> = t.iter().map(|&c| cantor_k(c as u64) as u8).collect();
        let code = type_code(g, &reduce_tuple(&lambda, g.n()))? as u32;
        blocks.push((2 * code, code));
    }
    Ok(ColoredSum { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_graphs;

    fn eq() -> ColorRelation {
        ColorRelation::Equality
    }

    #[test]
    fn identity_assignment_embeds() {
        let a = ColoredSum::new(vec![(2, 0), (1, 1)]);
        let phi = embeds(&a, &a, &eq()).unwrap();
        assert!(assignment_valid(&a, &a, &eq(), &phi));
    }

    #[test]
    fn omega_plus_one_does_not_embed_into_omega() {
        // Blocks (1,c),(0,c) against (1,c): the first source block is not
        // last in its target, so it would need strict room.
        let a = ColoredSum::new(vec![(1, 0), (0, 0)]);
        let b = ColoredSum::new(vec![(1, 0)]);
        assert!(embeds(&a, &b, &eq()).is_none());
        assert!(embeds_naive(&a, &b, &eq()).is_none());
        assert!(embeds(&b, &a, &eq()).is_some());
    }

    #[test]
    fn omega_powers_embed_iff_exponents_fit() {
        for a in 0..5u32 {
            for b in 0..5u32 {
                let s = ColoredSum::new(vec![(a, 0)]);
                let t = ColoredSum::new(vec![(b, 0)]);
                assert_eq!(embeds(&s, &t, &eq()).is_some(), a <= b);
            }
        }
    }

    #[test]
    fn squared_plus_linear_into_cubed() {
        let a = ColoredSum::new(vec![(2, 0), (1, 0)]);
        let b = ColoredSum::new(vec![(3, 0)]);
        let phi = embeds(&a, &b, &eq()).unwrap();
        assert_eq!(phi, vec![0, 0]);
    }

    #[test]
    fn absorption_identities() {
        let a = ColoredSum::new(vec![(1, 0), (2, 0)]);
        let b = ColoredSum::new(vec![(2, 0)]);
        assert!(iso_colored(&a, &b));
        let c = ColoredSum::new(vec![(2, 0), (1, 0)]);
        assert!(!iso_colored(&c, &b));
        // The surviving tail fails one embedding direction under equality.
        assert!(embeds(&c, &b, &eq()).is_none());
        assert!(embeds(&b, &c, &eq()).is_some());
    }

    #[test]
    fn iso_implies_mutual_embedding() {
        let sums = [
            ColoredSum::new(vec![(1, 0), (2, 0), (2, 1)]),
            ColoredSum::new(vec![(2, 0), (2, 1)]),
            ColoredSum::new(vec![(0, 3)]),
        ];
        for a in &sums {
            for b in &sums {
                if iso_colored(a, b) {
                    assert!(embeds(a, b, &eq()).is_some());
                    assert!(embeds(b, a, &eq()).is_some());
                }
            }
        }
    }

    #[test]
    fn relation_monotonicity() {
        let a = ColoredSum::new(vec![(1, 2), (1, 1)]);
        let b = ColoredSum::new(vec![(2, 2), (2, 1)]);
        assert!(eq().contained_in(&ColorRelation::Geq, 4));
        assert!(embeds(&a, &b, &eq()).is_some());
        assert!(embeds(&a, &b, &ColorRelation::Geq).is_some());
        // Sources may dominate their targets under the wider relation.
        let c = ColoredSum::new(vec![(2, 0), (2, 0)]);
        assert!(embeds(&a, &c, &eq()).is_none());
        assert!(embeds(&a, &c, &ColorRelation::Geq).is_some());
    }

    #[test]
    fn cantor_sequence_prefix() {
        let prefix: Vec<u64> = (0..10).map(cantor_k).collect();
        assert_eq!(prefix, vec![0, 1, 0, 2, 1, 0, 3, 2, 1, 0]);
    }

    #[test]
    fn single_vertex_sum_has_one_unary_block() {
        let g = Graph::empty(1);
        let s = build_lg(&g, 1, 1).unwrap();
        assert_eq!(s.blocks, vec![(2, 1)]);
    }

    #[test]
    fn block_count_is_index_words_without_root() {
        let g = Graph::path(2);
        let s = build_lg(&g, 2, 2).unwrap();
        assert_eq!(s.blocks.len(), 2 + 4);
    }

    #[test]
    fn edge_and_nonedge_profiles_differ() {
        let edge = Graph::path(2);
        let non_edge = Graph::empty(2);
        let a = build_lg(&edge, 2, 2).unwrap();
        let b = build_lg(&non_edge, 2, 2).unwrap();
        assert_ne!(a.blocks, b.blocks);
        assert!(!iso_colored(&a, &b));
    }

    #[test]
    fn lg_iso_iff_literal_equality_on_small_corpus() {
        let graphs = enumerate_graphs(3, false).unwrap();
        let sums: Vec<ColoredSum> = graphs.iter().map(|g| build_lg(g, 2, 2).unwrap()).collect();
        for x in &sums {
            for y in &sums {
                assert_eq!(iso_colored(x, y), x.blocks == y.blocks);
            }
        }
    }

    #[test]
    fn dp_matches_naive_on_directed_cases() {
        let cases = [
            (vec![(1, 0), (1, 0)], vec![(2, 0)]),
            (vec![(2, 0), (2, 0)], vec![(2, 0)]),
            (vec![(1, 1)], vec![(1, 0)]),
            (vec![(0, 0), (0, 0), (0, 0)], vec![(1, 0)]),
            (vec![(1, 0), (0, 1), (2, 0)], vec![(1, 0), (0, 1), (2, 0)]),
        ];
        for (x, y) in cases {
            let a = ColoredSum::new(x);
            let b = ColoredSum::new(y);
            for r in [eq(), ColorRelation::Geq] {
                assert_eq!(
                    embeds(&a, &b, &r).is_some(),
                    embeds_naive(&a, &b, &r).is_some()
                );
            }
        }
    }
}
