//! The verification suites: per-module checks plus the cross-module
//! bridges, each deterministic given parameters and seed.

use crate::actions::{self, PermGroup, ReductionSetup};
use crate::cert::{Certificate, SuiteReport};
use crate::colored::{self, ColorRelation, ColoredSum};
use crate::epi::{self, EpiGadget};
use crate::error::{Error, Result};
use crate::gadget::{self, GadgetGraph};
use crate::graph::{self, Graph, SearchBudget};
use crate::metric::{self, BranchSpace};
use crate::norm::{self, GraphNorm, Q};
use crate::trees::{self, NormalTree, NormalTree3, Word};
use num::{BigInt, BigRational, Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};

pub const SUITES: &[&str] = &[
    "normal-form",
    "le-max-order-axioms",
    "gt-iso-equality",
    "gt-rigidity",
    "gt-embed-bridge",
    "epi-iso-bridge",
    "epi-extension",
    "colored-dp-oracle",
    "colored-identity",
    "metric-forks",
    "metric-bridges",
    "ball-extension",
    "norm-sandwich",
    "norm-li-bridge",
    "norm-extension",
    "saturation",
];

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub depth: Option<u8>,
    pub branch: Option<u8>,
    pub seed: u64,
    pub samples: Option<u64>,
    pub max_nodes: Option<u64>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            depth: None,
            branch: None,
            seed: 7,
            samples: None,
            max_nodes: None,
        }
    }
}

impl SuiteParams {
    fn budget(&self) -> SearchBudget {
        let mut b = SearchBudget::for_suites();
        if let Some(n) = self.max_nodes {
            b.max_nodes = n;
        }
        b
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt)
    }
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteReport> {
    let start = std::time::Instant::now();
    let mut report = match name {
        "normal-form" => normal_form(params),
        "le-max-order-axioms" => le_max_order_axioms(params),
        "gt-iso-equality" => gt_iso_equality(params),
        "gt-rigidity" => gt_rigidity(params),
        "gt-embed-bridge" => gt_embed_bridge(params),
        "epi-iso-bridge" => epi_iso_bridge(params),
        "epi-extension" => epi_extension(params),
        "colored-dp-oracle" => colored_dp_oracle(params),
        "colored-identity" => colored_identity(params),
        "metric-forks" => metric_forks(params),
        "metric-bridges" => metric_bridges(params),
        "ball-extension" => ball_extension(params),
        "norm-sandwich" => norm_sandwich(params),
        "norm-li-bridge" => norm_li_bridge(params),
        "norm-extension" => norm_extension(params),
        "saturation" => saturation(params),
        _ => Err(Error::Unknown {
            kind: "suite".into(),
            name: name.into(),
        }),
    }?;
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

pub fn run_all(params: &SuiteParams) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, params)).collect()
}

// ---------------------------------------------------------------------------
// Packed trees: the fast path for the quadratic and cubic corpus loops
// ---------------------------------------------------------------------------

mod packed {
    use super::*;

    pub struct Layout {
        pub b: u8,
        pub s_count: usize,
        s_offset: Vec<usize>,
        node_offset: Vec<usize>,
        pows_b: Vec<usize>,
        s_lens: Vec<u8>,
    }

    impl Layout {
        pub fn new(d: u8, b: u8) -> Result<Layout> {
            let mut s_offset = vec![0usize];
            let mut node_offset = vec![0usize];
            let mut pows_b = vec![1usize];
            for l in 1..=d as usize {
                pows_b.push(pows_b[l - 1] * b as usize);
                s_offset.push(s_offset[l - 1] + pows_b[l - 1]);
                node_offset.push(node_offset[l - 1] + (1 << (l - 1)) * pows_b[l - 1]);
            }
            let s_count = s_offset[d as usize] + pows_b[d as usize];
            let node_count = node_offset[d as usize] + (1usize << d) * pows_b[d as usize];
            if node_count > 128 || s_count > 250 {
                return Err(Error::budget(
                    "packed tree universe",
                    node_count as u64,
                    128,
                ));
            }
            let mut s_lens = vec![0u8; s_count];
            for l in 0..=d as usize {
                let lo = s_offset[l];
                let hi = lo + pows_b[l];
                for x in s_lens.iter_mut().take(hi).skip(lo) {
                    *x = l as u8;
                }
            }
            Ok(Layout {
                b,
                s_count,
                s_offset,
                node_offset,
                pows_b,
                s_lens,
            })
        }

        pub fn s_id(&self, s: &[u8]) -> usize {
            let mut val = 0usize;
            for &c in s {
                val = val * self.b as usize + c as usize;
            }
            self.s_offset[s.len()] + val
        }

        pub fn s_len(&self, id: usize) -> usize {
            self.s_lens[id] as usize
        }

        pub fn s_val(&self, id: usize) -> usize {
            id - self.s_offset[self.s_len(id)]
        }

        pub fn parent(&self, id: usize) -> usize {
            let l = self.s_len(id);
            self.s_offset[l - 1] + self.s_val(id) / self.b as usize
        }

        pub fn node_id(&self, len: usize, uval: usize, sval: usize) -> usize {
            self.node_offset[len] + uval * self.pows_b[len] + sval
        }
    }

    pub struct Packed {
        pub mask: u128,
        /// Ascending projection ids; id order is length-major then lex.
        pub proj: Vec<u8>,
        /// Per projection id, the bitmask of binary values riding on it.
        pub usets: Vec<u8>,
        /// Decomposed nodes for fast witness validation.
        pub nodes: Vec<(u8, u8, u8)>,
    }

    pub fn pack(layout: &Layout, tree: &NormalTree) -> Packed {
        let mut mask = 0u128;
        let mut usets = vec![0u8; layout.s_count];
        let mut nodes = vec![];
        for (u, s) in tree.nodes() {
            let len = u.len();
            let uval = u.iter().fold(0usize, |a, &c| a * 2 + c as usize);
            let sval = s
                .iter()
                .fold(0usize, |a, &c| a * layout.b as usize + c as usize);
            mask |= 1 << layout.node_id(len, uval, sval);
            usets[layout.s_id(s)] |= 1 << uval;
            nodes.push((len as u8, uval as u8, sval as u8));
        }
        let proj: Vec<u8> = (0..layout.s_count)
            .filter(|&i| usets[i] != 0)
            .map(|i| i as u8)
            .collect();
        Packed {
            mask,
            proj,
            usets,
            nodes,
        }
    }

    /// Backtracking comparability decision on packed trees; images indexed
    /// by projection id, `0xFF` elsewhere.
    pub fn le_max_fast(layout: &Layout, a: &Packed, b: &Packed) -> Option<Vec<u8>> {
        fn rec(layout: &Layout, a: &Packed, b: &Packed, images: &mut Vec<u8>, k: usize) -> bool {
            if k == a.proj.len() {
                return true;
            }
            let sid = a.proj[k] as usize;
            let need = a.usets[sid];
            if layout.s_len(sid) == 0 {
                if need & !b.usets[0] != 0 {
                    return false;
                }
                images[sid] = 0;
                if rec(layout, a, b, images, k + 1) {
                    return true;
                }
                images[sid] = 0xFF;
                return false;
            }
            let parent_img = images[layout.parent(sid)] as usize;
            let tval0 = layout.s_val(parent_img) * layout.b as usize;
            let l = layout.s_len(sid);
            for m in 0..layout.b as usize {
                // Child id of the parent image at entry m.
                let t = layout.s_offset_of(l) + tval0 + m;
                if need & !b.usets[t] == 0 {
                    images[sid] = t as u8;
                    if rec(layout, a, b, images, k + 1) {
                        return true;
                    }
                    images[sid] = 0xFF;
                }
            }
            false
        }
        let mut images = vec![0xFFu8; layout.s_count];
        if rec(layout, a, b, &mut images, 0) {
            Some(images)
        } else {
            None
        }
    }

    impl Layout {
        pub fn s_offset_of(&self, len: usize) -> usize {
            self.s_offset[len]
        }
    }

    /// Checks that mapping every node of `a` through `w` lands inside the
    /// target mask.
    pub fn validate_witness(layout: &Layout, a: &Packed, target_mask: u128, w: &[u8]) -> bool {
        for &(len, uval, sval) in &a.nodes {
            let sid = layout.s_offset_of(len as usize) + sval as usize;
            let img = w[sid];
            if img == 0xFF {
                return false;
            }
            let tval = layout.s_val(img as usize);
            let node = layout.node_id(len as usize, uval as usize, tval);
            if target_mask >> node & 1 == 0 {
                return false;
            }
        }
        true
    }

    pub fn compose(layout: &Layout, w1: &[u8], w2: &[u8]) -> Vec<u8> {
        let mut out = vec![0xFFu8; layout.s_count];
        for (sid, &t) in w1.iter().enumerate() {
            if t != 0xFF {
                out[sid] = w2[t as usize];
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Shared corpus helpers
// ---------------------------------------------------------------------------

fn tree_corpus(d: u8, b: u8) -> Result<Vec<NormalTree>> {
    trees::enumerate_trees(d, b, 200_000)
}

fn gadget_corpus(d: u8, b: u8, budget: SearchBudget) -> Result<Vec<(NormalTree, GadgetGraph)>> {
    tree_corpus(d, b)?
        .into_iter()
        .map(|t| {
            let g = gadget::build_gadget(&t, budget)?;
            Ok((t, g))
        })
        .collect()
}

fn small_graph_corpus(max_n: usize) -> Result<Vec<Graph>> {
    let mut out = vec![];
    for n in 1..=max_n {
        out.extend(graph::enumerate_graphs(n, true)?);
    }
    Ok(out)
}

fn random_word(rng: &mut ChaCha8Rng, len: usize, base: u8) -> Word {
    (0..len).map(|_| rng.gen_range(0..base)).collect()
}

// ---------------------------------------------------------------------------
// Suite: normal-form
// ---------------------------------------------------------------------------

/// Enumerates generator seeds, closes them under the normal-form conditions,
/// and checks the report on every closed instance; then compares the checker
/// against the literal triple-loop recomputation on seeded random trees.
fn normal_form(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(2);
    let b = params.branch.unwrap_or(2);
    let samples = params.samples.unwrap_or(100);
    let mut report = SuiteReport::new("normal-form");

    let mut generators: Vec<(Word, Word, Word)> = vec![];
    for len in 1..=d as usize {
        for uval in 0..(1usize << len) {
            for vval in 0..(1usize << len) {
                if uval == vval {
                    continue;
                }
                let to_word = |mut v: usize| -> Word {
                    let mut w = vec![0u8; len];
                    for i in (0..len).rev() {
                        w[i] = (v % 2) as u8;
                        v /= 2;
                    }
                    w
                };
                for sval in 0..(b as usize).pow(len as u32) {
                    let mut sv = sval;
                    let mut s = vec![0u8; len];
                    for i in (0..len).rev() {
                        s[i] = (sv % b as usize) as u8;
                        sv /= b as usize;
                    }
                    generators.push((to_word(uval), to_word(vval), s));
                }
            }
        }
    }

    let mut seeds: Vec<Vec<(Word, Word, Word)>> = vec![vec![]];
    for g in &generators {
        seeds.push(vec![g.clone()]);
    }
    for (i, g1) in generators.iter().enumerate() {
        for g2 in generators.iter().skip(i + 1) {
            seeds.push(vec![g1.clone(), g2.clone()]);
        }
    }

    let mut unclosable = 0u64;
    let results: Vec<Option<NormalTree3>> = seeds
        .par_iter()
        .map(|gens| trees::close_normal_form(d, b, gens))
        .collect();
    for closed in results.into_iter() {
        match closed {
            None => unclosable += 1,
            Some(tree) => {
                let r = trees::check_normal_form(&tree);
                report.check(
                    r.all(),
                    "normal-form:closed-tree-passes",
                    &tree,
                    &(),
                    json!({ "report": format!("{r:?}") }),
                );
            }
        }
    }
    report.diagnostics.push(format!(
        "seeds whose closure breaks antisymmetry: {unclosable}"
    ));

    // Random trees, closed only under prefixes and normality, so all three
    // conditions vary; checker must equal the naive recomputation exactly.
    let mut rng = params.rng(0x6e66);
    for _ in 0..samples {
        let count = rng.gen_range(1..=4);
        let mut nodes: BTreeSet<(Word, Word, Word)> = BTreeSet::from([(vec![], vec![], vec![])]);
        for _ in 0..count {
            let len = rng.gen_range(1..=d as usize);
            nodes.insert((
                random_word(&mut rng, len, 2),
                random_word(&mut rng, len, 2),
                random_word(&mut rng, len, b),
            ));
        }
        // Close under prefix and normality only.
        loop {
            let mut fresh = BTreeSet::new();
            for (u, v, s) in &nodes {
                if !u.is_empty() {
                    let k = u.len() - 1;
                    let p = (u[..k].to_vec(), v[..k].to_vec(), s[..k].to_vec());
                    if !nodes.contains(&p) {
                        fresh.insert(p);
                    }
                }
                for i in 0..s.len() {
                    if s[i] + 1 < b {
                        let mut t = s.clone();
                        t[i] += 1;
                        let node = (u.clone(), v.clone(), t);
                        if !nodes.contains(&node) {
                            fresh.insert(node);
                        }
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            nodes.extend(fresh);
        }
        let tree = NormalTree3::new(d, b, nodes)?;
        let fast = trees::check_normal_form(&tree);
        let naive = trees::check_normal_form_naive(&tree);
        report.check(
            fast == naive,
            "normal-form:checker-vs-naive",
            &tree,
            &(),
            json!({ "fast": format!("{fast:?}"), "naive": format!("{naive:?}") }),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suite: le-max-order-axioms
// ---------------------------------------------------------------------------

fn le_max_order_axioms(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(2);
    let b = params.branch.unwrap_or(2);
    let mut report = SuiteReport::new("le-max-order-axioms");
    let corpus = tree_corpus(d, b)?;
    let layout = packed::Layout::new(d, b)?;
    let packs: Vec<packed::Packed> = corpus.iter().map(|t| packed::pack(&layout, t)).collect();

    // Reflexivity: the identity witness validates on every corpus tree.
    for tree in &corpus {
        let id = trees::LipschitzWitness::identity(tree);
        report.check(
            trees::is_le_max_witness(tree, tree, &id),
            "le-max:reflexivity",
            tree,
            tree,
            json!(null),
        );
    }

    // All ordered pairs, fast path, with witnesses kept for composition.
    let n = corpus.len();
    let out: Vec<Vec<(u32, Vec<u8>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![];
            for j in 0..n {
                if let Some(w) = packed::le_max_fast(&layout, &packs[i], &packs[j]) {
                    debug_assert!(packed::validate_witness(
                        &layout,
                        &packs[i],
                        packs[j].mask,
                        &w
                    ));
                    row.push((j as u32, w));
                }
            }
            row
        })
        .collect();
    let held: u64 = out.iter().map(|r| r.len() as u64).sum();
    report
        .diagnostics
        .push(format!("comparable ordered pairs: {held} of {}", n * n));

    // Transitivity on all held triples by composition and re-validation.
    // The composed check factors through the profile of binary words pulled
    // along the first witness, so each triple costs a few byte tests.
    assert!(layout.s_count <= 32, "profile buffer covers the layout");
    let triple_failures: Vec<(usize, u32, u32)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let layout = &layout;
            let packs = &packs;
            let out = &out;
            out[i].iter().flat_map(move |(j, w1)| {
                let mut pulled = [0u8; 32];
                for (sid, &uset) in packs[i].usets.iter().enumerate() {
                    if uset != 0 {
                        pulled[w1[sid] as usize] |= uset;
                    }
                }
                let s_count = layout.s_count;
                out[*j as usize].iter().filter_map(move |(k, w2)| {
                    let target = &packs[*k as usize].usets;
                    let ok = (0..s_count)
                        .all(|t| pulled[t] == 0 || pulled[t] & !target[w2[t] as usize] == 0);
                    if ok {
                        None
                    } else {
                        Some((i, *j, *k))
                    }
                })
            })
        })
        .collect();
    let triple_count: u64 = out
        .iter()
        .map(|r| {
            r.iter()
                .map(|(j, _)| out[*j as usize].len() as u64)
                .sum::<u64>()
        })
        .sum();
    report
        .diagnostics
        .push(format!("composed triples: {triple_count}"));
    report.instances += triple_count;
    report.passes += triple_count - triple_failures.len() as u64;
    for (i, j, k) in triple_failures {
        report.failures += 1;
        report.violations.push(Certificate::new(
            "le-max:transitivity",
            &corpus[i],
            &corpus[k as usize],
            false,
            json!({ "via": j }),
        ));
    }

    // A seeded sample of triples re-validated by explicit composition, the
    // unfactored route.
    let mut rng = params.rng(0x6c6d74);
    let held_sources: Vec<usize> = (0..n).filter(|&i| !out[i].is_empty()).collect();
    if !held_sources.is_empty() {
        for _ in 0..params.samples.unwrap_or(2000) {
            let i = held_sources[rng.gen_range(0..held_sources.len())];
            let (j, w1) = &out[i][rng.gen_range(0..out[i].len())];
            if out[*j as usize].is_empty() {
                continue;
            }
            let (k, w2) = &out[*j as usize][rng.gen_range(0..out[*j as usize].len())];
            let comp = packed::compose(&layout, w1, w2);
            report.check(
                packed::validate_witness(&layout, &packs[i], packs[*k as usize].mask, &comp),
                "le-max:transitivity-explicit",
                &corpus[i],
                &corpus[*k as usize],
                json!(null),
            );
        }
    }

    // Cross-validation of the packed decision against the general search.
    let mut rng = params.rng(0x6c6d);
    let samples = params.samples.unwrap_or(2000);
    for _ in 0..samples {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let fast = packed::le_max_fast(&layout, &packs[i], &packs[j]);
        let general = trees::le_max(&corpus[i], &corpus[j])?;
        let agree = fast.is_some() == general.is_some()
            && general
                .as_ref()
                .map(|w| trees::is_le_max_witness(&corpus[i], &corpus[j], w))
                .unwrap_or(true);
        report.check(
            agree,
            "le-max:fast-vs-general",
            &corpus[i],
            &corpus[j],
            json!({ "fast": fast.is_some(), "general": general.is_some() }),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suites: gadget trees
// ---------------------------------------------------------------------------

fn gt_iso_equality(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(1);
    let b = params.branch.unwrap_or(2);
    let mut report = SuiteReport::new("gt-iso-equality");
    let corpus = gadget_corpus(d, b, params.budget())?;
    let n = corpus.len();
    let checks: Vec<(usize, usize, bool)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let corpus = &corpus;
            (0..n).map(move |j| {
                let iso = graph::find_isomorphism(&corpus[i].1.graph, &corpus[j].1.graph)
                    .map(|w| w.is_some())
                    .unwrap_or(false);
                (i, j, iso == (corpus[i].0 == corpus[j].0))
            })
        })
        .collect();
    for (i, j, ok) in checks {
        report.check(
            ok,
            "gt:iso-coincides-with-equality",
            &corpus[i].0,
            &corpus[j].0,
            json!(null),
        );
    }
    Ok(report)
}

fn gt_rigidity(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(1);
    let b = params.branch.unwrap_or(2);
    let mut report = SuiteReport::new("gt-rigidity");
    let corpus = gadget_corpus(d, b, params.budget())?;
    let orders: Vec<u128> = corpus
        .par_iter()
        .map(|(_, g)| graph::automorphisms(&g.graph).map(|a| a.order).unwrap_or(0))
        .collect();
    for ((tree, _), order) in corpus.iter().zip(orders) {
        report.check(
            order == 1,
            "gt:rigidity",
            tree,
            &(),
            json!({ "order": order.to_string() }),
        );
    }
    Ok(report)
}

fn gt_embed_bridge(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(1);
    let b = params.branch.unwrap_or(2);
    let budget = params.budget();
    let mut report = SuiteReport::new("gt-embed-bridge");
    let corpus = gadget_corpus(d, b, budget)?;
    let n = corpus.len();
    let mut enlargements = 0u64;
    let mut free_only = 0u64;
    let mut free_skipped = 0u64;

    for i in 0..n {
        for j in 0..n {
            let (s_tree, gs) = &corpus[i];
            let (t_tree, gt) = &corpus[j];
            let lhs = trees::le_max(s_tree, t_tree)?;
            let matched = gadget::structured_embed(gs, gt)?;

            // Structured at the matched bound implies comparability.
            if let Some(w) = &matched {
                let sound = gadget::is_structured_witness(gs, gt, w)?
                    && graph::is_embedding(&gs.graph, &gt.graph, &w.vertex_map)?
                    && lhs.is_some();
                report.check(
                    sound,
                    "gt:structured-implies-comparable",
                    s_tree,
                    t_tree,
                    json!(null),
                );
            }

            match &lhs {
                Some(f0) => {
                    // Forward: refine, re-close the target, and embed.
                    let refined = trees::canonical_injective_witness(s_tree, t_tree, f0)?;
                    if refined.bound > b {
                        enlargements += 1;
                    }
                    let gt_prime = gadget::build_gadget(&refined.target, budget)?;
                    let spine = trees::extend_witness_to_spine(s_tree, &refined)?;
                    let induced = gadget::induce_structured(gs, &gt_prime, spine)?;
                    let induced_ok = gadget::is_structured_witness(gs, &gt_prime, &induced)?;
                    let searched = gadget::structured_embed(gs, &gt_prime)?;
                    report.check(
                        induced_ok
                            && searched.is_some()
                            && trees::is_injective_witness(s_tree, &refined),
                        "gt:comparable-implies-structured",
                        s_tree,
                        t_tree,
                        json!({ "bound": refined.bound }),
                    );
                }
                None => {
                    // Backward: no embedding at the matched bound nor at a
                    // strictly enlarged one.
                    let enlarged_tree = t_tree.reclose_at(b + 2);
                    let gt_big = gadget::build_gadget(&enlarged_tree, budget)?;
                    let ok = matched.is_none() && gadget::structured_embed(gs, &gt_big)?.is_none();
                    report.check(
                        ok,
                        "gt:incomparable-never-embeds",
                        s_tree,
                        t_tree,
                        json!(null),
                    );
                }
            }

            // Diagnostic: kind-blind embeddability versus the structured one.
            if matched.is_none() {
                match graph::find_embedding_with(&gs.graph, &gt.graph, budget) {
                    Ok(Some(_)) => free_only += 1,
                    Ok(None) => {}
                    Err(_) => free_skipped += 1,
                }
            }
        }
    }
    report.diagnostics.push(format!(
        "pairs needing a bound enlargement for the injective refinement: {enlargements}"
    ));
    report.diagnostics.push(format!(
        "kind-blind embeddings with no matched-bound structured embedding: {free_only} (searches skipped: {free_skipped})"
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suites: epimorphism gadgets
// ---------------------------------------------------------------------------

fn epi_iso_bridge(params: &SuiteParams) -> Result<SuiteReport> {
    let budget = params.budget();
    let mut report = SuiteReport::new("epi-iso-bridge");
    let corpus = small_graph_corpus(4)?;

    // Gadgets at depth two with the bound matched to each graph's size, so
    // pair types carry the labeled structure and relabelings stay inside the
    // index alphabet.
    let gadgets: Vec<EpiGadget> = corpus
        .par_iter()
        .map(|g| epi::build_epi_gadget(g, 2, g.n() as u8, budget))
        .collect::<Result<Vec<_>>>()?;
    let n = corpus.len();
    let pair_checks: Vec<(usize, usize, bool)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let corpus = &corpus;
            let gadgets = &gadgets;
            (0..n).map(move |j| {
                let graphs_iso = graph::are_isomorphic(&corpus[i], &corpus[j]).unwrap_or(false);
                let gadgets_iso =
                    graph::are_isomorphic(&gadgets[i].graph, &gadgets[j].graph).unwrap_or(false);
                (i, j, graphs_iso == gadgets_iso)
            })
        })
        .collect();
    for (i, j, ok) in pair_checks {
        report.check(ok, "epi:iso-bridge", &corpus[i], &corpus[j], json!(null));
    }

    // Relabeled copies must keep the gadget isomorphism class.
    for g in corpus.iter().filter(|g| g.n() >= 2) {
        let perm: Vec<u32> = (0..g.n() as u32).rev().collect();
        let h = g.relabel(&perm)?;
        let eg = epi::build_epi_gadget(g, 2, g.n() as u8, budget)?;
        let eh = epi::build_epi_gadget(&h, 2, h.n() as u8, budget)?;
        report.check(
            graph::are_isomorphic(&eg.graph, &eh.graph)?,
            "epi:iso-bridge-relabel",
            g,
            &h,
            json!(null),
        );
    }

    // Automorphism product formula. Chain-shaped blocks carry growing type
    // codes and admit no block swaps, so the full group meets the formula;
    // at branching parameters the simple subgroup does.
    for g in &corpus {
        let chain = epi::build_epi_gadget(g, 2, 1, budget)?;
        let aut = graph::automorphisms(&chain.graph)?;
        let expected = epi::expected_simple_order(&chain);
        report.check(
            aut.order == expected,
            "epi:full-group-product-formula",
            g,
            &(),
            json!({ "order": aut.order.to_string(), "expected": expected.to_string() }),
        );
        let simple = epi::simple_automorphism_group(&chain)?;
        report.check(
            simple.order == aut.order,
            "epi:all-automorphisms-simple-on-chains",
            g,
            &(),
            json!({ "simple": simple.order.to_string() }),
        );

        let branching = epi::build_epi_gadget(g, 1, 2, budget)?;
        let simple = epi::simple_automorphism_group(&branching)?;
        let expected = epi::expected_simple_order(&branching);
        report.check(
            simple.order == expected,
            "epi:simple-group-product-formula",
            g,
            &(),
            json!({ "order": simple.order.to_string(), "expected": expected.to_string() }),
        );
    }

    // Simple automorphisms pin heads, bridges, children and marks.
    let probe = epi::build_epi_gadget(&corpus[0], 1, 2, budget)?;
    let simple = epi::simple_automorphism_group(&probe)?;
    let mut pinned_ok = true;
    for gen in &simple.generators {
        for (v, kind) in probe.kinds.iter().enumerate() {
            let pinned = match kind {
                epi::EpiKind::Head(_)
                | epi::EpiKind::Child(..)
                | epi::EpiKind::RootMark
                | epi::EpiKind::ChildMark(..) => true,
                epi::EpiKind::Clique(t, idx) => *idx == probe.block_types[t] as u32 + 2,
                epi::EpiKind::Partner(..) => false,
            };
            if pinned && gen[v] != v as u32 {
                pinned_ok = false;
            }
        }
    }
    report.check(
        pinned_ok,
        "epi:simple-fixes-pinned-kinds",
        &corpus[0],
        &(),
        json!(null),
    );

    // Epimorphism bridge, forward direction: where an entrywise index
    // bijection aligns the type profiles, the blockwise map from the larger
    // gadget onto the smaller validates as an epimorphism. Coverage is a
    // diagnostic: the unbounded construction leans on unbounded child
    // cliques, which truncation cannot.
    let mut embeddable = 0u64;
    let mut constructed = 0u64;
    for g in &corpus {
        for h in &corpus {
            if graph::find_embedding(g, h)?.is_none() {
                continue;
            }
            embeddable += 1;
            let b = h.n() as u8;
            let eg = epi::build_epi_gadget(g, 2, b, budget)?;
            let eh = epi::build_epi_gadget(h, 2, b, budget)?;
            if let Some(psi) = epi::blockwise_epimorphism(&eg, &eh) {
                constructed += 1;
                report.check(
                    graph::is_epimorphism(&eg.graph, &eh.graph, &psi)?,
                    "epi:blockwise-epimorphism-validates",
                    g,
                    h,
                    json!(null),
                );
            }
        }
    }
    report.diagnostics.push(format!(
        "blockwise epimorphism witnesses: {constructed} of {embeddable} embeddable pairs"
    ));

    // Diagnostic: the stated shallow parameters carry no pair types, so all
    // same-shape gadgets coincide there.
    let shallow: Vec<EpiGadget> = corpus
        .iter()
        .map(|g| epi::build_epi_gadget(g, 1, 2, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut collapse = 0u64;
    for i in 0..n {
        for j in 0..n {
            let graphs_iso = graph::are_isomorphic(&corpus[i], &corpus[j])?;
            let gadgets_iso = graph::are_isomorphic(&shallow[i].graph, &shallow[j].graph)?;
            if graphs_iso != gadgets_iso {
                collapse += 1;
            }
        }
    }
    report.diagnostics.push(format!(
        "depth-one bound-two gadget pairs where isomorphism diverges from the graphs: {collapse} of {}",
        n * n
    ));
    Ok(report)
}

fn epi_extension(params: &SuiteParams) -> Result<SuiteReport> {
    let budget = params.budget();
    let mut report = SuiteReport::new("epi-extension");

    // At depth one the blocks carry only the unary type, so one instance
    // covers the corpus; the deeper instance is sampled.
    let e = epi::build_epi_gadget(&Graph::path(2), 1, 2, budget)?;
    let simple = epi::simple_automorphism_group(&e)?;
    let n = e.graph.n() as u32;
    let singles_and_pairs: Vec<Vec<u32>> = (0..n)
        .flat_map(|x| {
            std::iter::once(vec![x]).chain((0..n).filter(move |&y| y != x).map(move |y| vec![x, y]))
        })
        .collect();
    let checks: Vec<(Vec<u32>, bool)> = singles_and_pairs
        .par_iter()
        .map(|seq| {
            let fast = epi::can_extend_simple(&e, seq).unwrap_or(false);
            let brute = epi::can_extend_simple_brute(&simple, seq);
            (seq.clone(), fast == brute)
        })
        .collect();
    for (seq, ok) in checks {
        report.check(ok, "epi:extension-vs-brute", &seq, &(), json!(null));
    }
    // Exhaustive length-3 sequences, batched.
    let triple_checks: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut ok = true;
            for y in 0..n {
                for z in 0..n {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let seq = vec![x, y, z];
                    let fast = epi::can_extend_simple(&e, &seq).unwrap_or(false);
                    let brute = epi::can_extend_simple_brute(&simple, &seq);
                    if fast != brute {
                        ok = false;
                    }
                }
            }
            ok
        })
        .collect();
    for (x, ok) in triple_checks.iter().enumerate() {
        report.check(*ok, "epi:extension-vs-brute-triples", &x, &(), json!(null));
    }

    // Deeper instance with graph-dependent pair types, sampled sequences,
    // brute force by pinned-prefix search.
    let deep = epi::build_epi_gadget(&Graph::path(3), 2, 2, budget)?;
    let unique = epi::unique_clique_map(&deep.graph);
    let mut rng = params.rng(0x6570);
    let deep_n = deep.graph.n() as u32;
    for _ in 0..params.samples.unwrap_or(300) {
        let len = rng.gen_range(1..=3usize);
        let mut seq: Vec<u32> = vec![];
        while seq.len() < len {
            let v = rng.gen_range(0..deep_n);
            if !seq.contains(&v) {
                seq.push(v);
            }
        }
        let fast = epi::can_extend_simple(&deep, &seq)?;
        let brute = epi::can_extend_simple_search(&deep, &unique, &seq)?;
        report.check(
            fast == brute,
            "epi:extension-vs-search",
            &seq,
            &(),
            json!({ "fast": fast, "brute": brute }),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suites: colored sums
// ---------------------------------------------------------------------------

fn random_sum(rng: &mut ChaCha8Rng, max_blocks: usize, max_exp: u32, max_color: u32) -> ColoredSum {
    let blocks = (0..rng.gen_range(0..=max_blocks))
        .map(|_| (rng.gen_range(0..=max_exp), rng.gen_range(0..=max_color)))
        .collect();
    ColoredSum::new(blocks)
}

fn colored_dp_oracle(params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("colored-dp-oracle");
    let samples = params.samples.unwrap_or(10_000);
    let mut rng = params.rng(0x636f);

    let mut cases: Vec<(ColoredSum, ColoredSum, ColorRelation)> = vec![];
    for k in 0..samples {
        let a = random_sum(&mut rng, 6, 4, 3);
        let b = random_sum(&mut rng, 6, 4, 3);
        let r = match k % 3 {
            0 => ColorRelation::Equality,
            1 => ColorRelation::Geq,
            _ => {
                let pairs = (0..=3u32)
                    .flat_map(|c| (0..=3u32).map(move |c2| (c, c2)))
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                ColorRelation::Table { pairs }
            }
        };
        cases.push((a, b, r));
    }
    let outcomes: Vec<bool> = cases
        .par_iter()
        .map(|(a, b, r)| {
            let dp = colored::embeds(a, b, r);
            let naive = colored::embeds_naive(a, b, r);
            dp.is_some() == naive.is_some()
                && dp
                    .map(|phi| colored::assignment_valid(a, b, r, &phi))
                    .unwrap_or(true)
        })
        .collect();
    for ((a, b, _), ok) in cases.iter().zip(outcomes) {
        report.check(ok, "colored:dp-vs-naive", a, b, json!(null));
    }

    // Pinned order facts.
    let eq = ColorRelation::Equality;
    let omega_plus_one = ColoredSum::new(vec![(1, 0), (0, 0)]);
    let omega = ColoredSum::new(vec![(1, 0)]);
    report.check(
        colored::embeds(&omega_plus_one, &omega, &eq).is_none(),
        "colored:omega-plus-one",
        &omega_plus_one,
        &omega,
        json!(null),
    );
    for a in 0..=4u32 {
        for b in 0..=4u32 {
            let s = ColoredSum::new(vec![(a, 0)]);
            let t = ColoredSum::new(vec![(b, 0)]);
            report.check(
                colored::embeds(&s, &t, &eq).is_some() == (a <= b),
                "colored:power-embedding",
                &s,
                &t,
                json!(null),
            );
        }
    }

    // Order axioms and monotonicity on random sums.
    let mut rng = params.rng(0x636f2);
    for _ in 0..500 {
        let a = random_sum(&mut rng, 6, 4, 3);
        report.check(
            colored::embeds(&a, &a, &eq).is_some(),
            "colored:reflexivity",
            &a,
            &a,
            json!(null),
        );
        let b = random_sum(&mut rng, 6, 4, 3);
        let c = random_sum(&mut rng, 6, 4, 3);
        if let (Some(_), Some(_)) = (
            colored::embeds(&a, &b, &ColorRelation::Geq),
            colored::embeds(&b, &c, &ColorRelation::Geq),
        ) {
            report.check(
                colored::embeds(&a, &c, &ColorRelation::Geq).is_some(),
                "colored:transitivity",
                &a,
                &c,
                json!(null),
            );
        }
        if colored::embeds(&a, &b, &eq).is_some() {
            report.check(
                colored::embeds(&a, &b, &ColorRelation::Geq).is_some(),
                "colored:relation-monotonicity",
                &a,
                &b,
                json!(null),
            );
        }
        report.check(
            colored::iso_colored(&a, &b)
                <= (colored::embeds(&a, &b, &eq).is_some()
                    && colored::embeds(&b, &a, &eq).is_some()),
            "colored:iso-implies-mutual",
            &a,
            &b,
            json!(null),
        );
    }
    Ok(report)
}

fn colored_identity(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(2);
    let b = params.branch.unwrap_or(2);
    let mut report = SuiteReport::new("colored-identity");
    let corpus = small_graph_corpus(4)?;
    let sums: Vec<ColoredSum> = corpus
        .iter()
        .map(|g| colored::build_lg(g, d, b))
        .collect::<Result<Vec<_>>>()?;
    for (i, x) in sums.iter().enumerate() {
        for (j, y) in sums.iter().enumerate() {
            let iso = colored::iso_colored(x, y);
            let equal = x.blocks == y.blocks;
            report.check(
                iso == equal,
                "colored:identity-iso-iff-equal",
                &corpus[i],
                &corpus[j],
                json!(null),
            );
            if iso {
                let eq = ColorRelation::Equality;
                report.check(
                    colored::embeds(x, y, &eq).is_some() && colored::embeds(y, x, &eq).is_some(),
                    "colored:identity-mutual-embedding",
                    &corpus[i],
                    &corpus[j],
                    json!(null),
                );
            }
        }
    }
    // Block count is the index-word count.
    for (g, s) in corpus.iter().zip(&sums) {
        let expected: usize = (1..=d as usize).map(|l| (b as usize).pow(l as u32)).sum();
        report.check(
            s.blocks.len() == expected,
            "colored:block-count",
            g,
            &(),
            json!({ "blocks": s.blocks.len() }),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suites: metric spaces
// ---------------------------------------------------------------------------

fn metric_forks(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(1);
    let b = params.branch.unwrap_or(2);
    let mut report = SuiteReport::new("metric-forks");
    let corpus = gadget_corpus(d, b, params.budget())?;
    for (tree, g) in &corpus {
        let bs = metric::build_branch_space(g)?;
        report.check(
            bs.metric.is_ultrametric(),
            "metric:ultrametric",
            tree,
            &(),
            json!(null),
        );
        let mut forks_ok = true;
        for fork in &bs.forks {
            match &fork.kind {
                metric::ForkKind::Bundle { s } => {
                    let want = metric::pow2_neg(2 * s.len() as u32 + 2);
                    for (xi, &x) in fork.members.iter().enumerate() {
                        for &y in &fork.members[xi + 1..] {
                            if bs.metric.d(x, y) != want {
                                forks_ok = false;
                            }
                        }
                    }
                    // Distance to the spine-through slot from outside the
                    // depth boundary.
                    if s.len() < d as usize {
                        let a_point = bs.a_slots[s];
                        let want = metric::pow2_neg(2 * s.len() as u32);
                        for &x in &fork.members {
                            if bs.metric.d(x, a_point) != want {
                                forks_ok = false;
                            }
                        }
                    }
                }
                metric::ForkKind::Pair { s, u } => {
                    let want =
                        metric::pow2_neg(2 * s.len() as u32 + 2 * trees::theta(u) as u32 + 3);
                    if fork.members.len() != 2
                        || bs.metric.d(fork.members[0], fork.members[1]) != want
                    {
                        forks_ok = false;
                    }
                }
            }
        }
        report.check(forks_ok, "metric:fork-distances", tree, &(), json!(null));
    }
    Ok(report)
}

fn metric_bridges(params: &SuiteParams) -> Result<SuiteReport> {
    let d = params.depth.unwrap_or(1);
    let b = params.branch.unwrap_or(2);
    let budget = params.budget();
    let mut report = SuiteReport::new("metric-bridges");
    let corpus = gadget_corpus(d, b, budget)?;
    let spaces: Vec<BranchSpace> = corpus
        .par_iter()
        .map(|(_, g)| metric::build_branch_space(g))
        .collect::<Result<Vec<_>>>()?;

    // Isometry coincides with tree equality.
    let n = corpus.len();
    let iso_checks: Vec<(usize, usize, bool)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let corpus = &corpus;
            let spaces = &spaces;
            (0..n).map(move |j| {
                let iso = metric::iso_metric(&spaces[i].metric, &spaces[j].metric).is_some();
                (i, j, iso == (corpus[i].0 == corpus[j].0))
            })
        })
        .collect();
    for (i, j, ok) in iso_checks {
        report.check(
            ok,
            "metric:isometry-iff-equality",
            &corpus[i].0,
            &corpus[j].0,
            json!(null),
        );
    }

    // Forward bridge: a comparability witness induces an isometric embedding
    // of branch spaces carrying forks into forks with matched parameters.
    for i in 0..n {
        for j in 0..n {
            let (s_tree, gs) = &corpus[i];
            let (t_tree, _) = &corpus[j];
            let Some(f0) = trees::le_max(s_tree, t_tree)? else {
                continue;
            };
            let refined = trees::canonical_injective_witness(s_tree, t_tree, &f0)?;
            let gt_prime = gadget::build_gadget(&refined.target, budget)?;
            let spine = trees::extend_witness_to_spine(s_tree, &refined)?;
            let w = gadget::induce_structured(gs, &gt_prime, spine)?;
            let dst = metric::build_branch_space(&gt_prime)?;
            let map = metric::induced_branch_embedding(&w, &spaces[i], &dst)?;
            let isometric = metric::is_isometric_map(&spaces[i].metric, &dst.metric, &map);
            let mut forks_ok = true;
            for fork in &spaces[i].forks {
                for &p in &fork.members {
                    let image_tag = &dst.tags[map[p]];
                    match (&spaces[i].tags[p], image_tag) {
                        (
                            gadget::BranchTag::Tine { s, .. },
                            gadget::BranchTag::Tine { s: s2, .. },
                        ) => {
                            if s.len() != s2.len() || w.spine_map[s] != *s2 {
                                forks_ok = false;
                            }
                        }
                        (
                            gadget::BranchTag::Code { s, u, .. },
                            gadget::BranchTag::Code { s: s2, u: u2, .. },
                        ) => {
                            if u != u2 || w.spine_map[s] != *s2 {
                                forks_ok = false;
                            }
                        }
                        _ => forks_ok = false,
                    }
                }
            }
            report.check(
                isometric && forks_ok,
                "metric:embedding-bridge",
                s_tree,
                t_tree,
                json!(null),
            );
        }
    }

    // Discrete geodesic spaces: recovery round-trip on corpus gadgets, and
    // embedding equivalence on small combinatorial trees.
    for (tree, g) in &corpus {
        let m = metric::build_discrete(&g.graph)?;
        report.check(
            metric::recover_graph(&m)? == g.graph,
            "metric:discrete-round-trip",
            tree,
            &(),
            json!(null),
        );
    }
    let mut small_trees: Vec<Graph> = vec![];
    for size in 1..=8 {
        small_trees.extend(graph::enumerate_trees_up_to_iso(size)?);
    }
    let metrics: Vec<metric::FiniteMetric> = small_trees
        .iter()
        .map(metric::build_discrete)
        .collect::<Result<Vec<_>>>()?;
    let tree_checks: Vec<(usize, usize, bool)> = (0..small_trees.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let small_trees = &small_trees;
            let metrics = &metrics;
            (0..small_trees.len()).map(move |j| {
                let free = graph::find_embedding(&small_trees[i], &small_trees[j])
                    .map(|w| w.is_some())
                    .unwrap_or(false);
                let dm = metric::iso_embed_metric(&metrics[i], &metrics[j]).is_some();
                (i, j, free == dm)
            })
        })
        .collect();
    for (i, j, ok) in tree_checks {
        report.check(
            ok,
            "metric:discrete-embedding",
            &small_trees[i],
            &small_trees[j],
            json!(null),
        );
    }
    Ok(report)
}

fn ball_extension(params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("ball-extension");
    let budget = params.budget();
    let mut instances: Vec<BranchSpace> = vec![];
    for (d, b) in [(0u8, 1u8), (1, 1)] {
        for tree in tree_corpus(d, b)? {
            let g = gadget::build_gadget(&tree, budget)?;
            instances.push(metric::build_branch_space(&g)?);
        }
    }

    for bs in &instances {
        let s = metric::build_branch_ball_structure(bs)?;
        for class in s.ball_classes() {
            report.check(
                class.size >= 2,
                "ball:two-names",
                &s.slots,
                &(),
                json!({ "ball": format!("{:b}", class.mask) }),
            );
        }
        let autos = metric::ball_class_automorphisms(&s);
        let u = s.universe_len();
        let single_checks: Vec<bool> = (0..u)
            .into_par_iter()
            .map(|e| {
                (0..u).all(|f| {
                    let fast = metric::can_extend_ball_auto(bs, &s, &vec![(e, f)]).unwrap_or(false);
                    let brute = metric::can_extend_ball_auto_brute(&s, &autos, &vec![(e, f)]);
                    fast == brute
                })
            })
            .collect();
        for (e, ok) in single_checks.iter().enumerate() {
            report.check(*ok, "ball:extension-singletons", &e, &(), json!(null));
        }
        report.check(
            metric::can_extend_ball_auto(bs, &s, &vec![])?,
            "ball:empty-map",
            &(),
            &(),
            json!(null),
        );

        let mut rng = params.rng(0x62616c);
        for _ in 0..params.samples.unwrap_or(1500) {
            let len = rng.gen_range(2..=3usize);
            let mut h: Vec<(usize, usize)> = vec![];
            let mut dom = BTreeSet::new();
            let mut img = BTreeSet::new();
            while h.len() < len {
                let e = rng.gen_range(0..u);
                let f = rng.gen_range(0..u);
                if dom.insert(e) && img.insert(f) {
                    h.push((e, f));
                }
            }
            let fast = metric::can_extend_ball_auto(bs, &s, &h)?;
            let brute = metric::can_extend_ball_auto_brute(&s, &autos, &h);
            report.check(
                fast == brute,
                "ball:extension-random",
                &h,
                &(),
                json!({ "fast": fast, "brute": brute }),
            );
        }
    }

    // Reduction property on sub-metrics: isometry coincides with structure
    // isomorphism.
    let big = &instances[instances.len() - 1];
    let mut rng = params.rng(0x73756273);
    let points = big.metric.n();
    for _ in 0..60 {
        let k = rng.gen_range(2..=points.min(6));
        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
            let mut all: Vec<usize> = (0..points).collect();
            all.shuffle(rng);
            let mut sel = all[..k].to_vec();
            sel.sort_unstable();
            sel
        };
        let p1 = pick(&mut rng);
        let p2 = pick(&mut rng);
        let sub = |sel: &[usize]| -> Result<metric::FiniteMetric> {
            let entries: Vec<(usize, usize, metric::Rat)> = sel
                .iter()
                .enumerate()
                .flat_map(|(x, &px)| {
                    sel.iter()
                        .enumerate()
                        .skip(x + 1)
                        .map(move |(y, &py)| (x, y, big.metric.d(px, py)))
                })
                .collect();
            metric::FiniteMetric::new(sel.len(), &entries)
        };
        let m1 = sub(&p1)?;
        let m2 = sub(&p2)?;
        let iso = metric::iso_metric(&m1, &m2).is_some();
        let s1 = metric::build_ball_structure(&m1)?;
        let s2 = metric::build_ball_structure(&m2)?;
        report.check(
            iso == metric::ball_structures_isomorphic(&s1, &s2),
            "ball:isometry-iff-structure-iso",
            &m1,
            &m2,
            json!(null),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suites: norms
// ---------------------------------------------------------------------------

fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    let num = rng.gen_range(-24i64..=24);
    let den = rng.gen_range(1i64..=9);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn norm_sandwich(params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("norm-sandwich");
    let samples = params.samples.unwrap_or(10_000);
    let mut rng = params.rng(0x6e6f);

    // Random graphs per dimension, then the sample budget split across them.
    let mut cases: Vec<(GraphNorm, Vec<Q>, Q)> = vec![];
    for dim in 2..=6usize {
        let mut edges = vec![];
        for i in 0..dim as u32 {
            for j in i + 1..dim as u32 {
                if rng.gen_bool(0.5) {
                    edges.push((i, j));
                }
            }
        }
        let norm = GraphNorm::new(Graph::new(dim, edges)?)?;
        for _ in 0..samples / 5 {
            let v: Vec<Q> = (0..dim).map(|_| random_rational(&mut rng)).collect();
            let lambda = random_rational(&mut rng);
            cases.push((norm.clone(), v, lambda));
        }
    }
    let outcomes: Vec<bool> = cases
        .par_iter()
        .map(|(norm, v, lambda)| {
            let sandwich = norm.sandwich_check(v).unwrap_or(false);
            let nv = norm.norm(v).unwrap();
            let scaled: Vec<Q> = v.iter().map(|x| x * lambda).collect();
            let homogeneous = norm.norm(&scaled).unwrap() == lambda.abs() * &nv;
            let shifted: Vec<Q> = v.iter().rev().cloned().collect();
            let sum: Vec<Q> = v.iter().zip(&shifted).map(|(a, b)| a + b).collect();
            let subadditive = norm.norm(&sum).unwrap() <= nv + norm.norm(&shifted).unwrap();
            sandwich && homogeneous && subadditive
        })
        .collect();
    for ((norm, v, _), ok) in cases.iter().zip(outcomes) {
        report.check(
            ok,
            "norm:sandwich-homogeneity-subadditivity",
            &norm.graph,
            &v.iter().map(norm::q_to_string).collect::<Vec<_>>(),
            json!(null),
        );
    }

    // Signed pair values match adjacency on every small graph.
    for g in small_graph_corpus(5)? {
        if g.n() < 2 {
            continue;
        }
        let norm = GraphNorm::new(g.clone())?;
        let mut ok = true;
        for p in 0..g.n() {
            for qq in 0..g.n() {
                if p == qq {
                    continue;
                }
                for (sp, sq) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                    let mut v = vec![Q::zero(); g.n()];
                    v[p] = BigRational::from_integer(BigInt::from(sp));
                    v[qq] = BigRational::from_integer(BigInt::from(sq));
                    let want = if g.has_edge(p as u32, qq as u32) {
                        norm::q(3, 2)
                    } else {
                        norm::q(4, 3)
                    };
                    if norm.norm(&v).unwrap() != want {
                        ok = false;
                    }
                }
            }
        }
        report.check(ok, "norm:pair-values-match-adjacency", &g, &(), json!(null));
    }

    // Strongly extreme certificates across dimensions two to four; the full
    // per-dimension graph corpus under the default sample budget, a
    // representative family under smaller ones.
    let full_corpus = samples >= 5_000;
    let mut cert_cases: Vec<(GraphNorm, u32, Q)> = vec![];
    for dim in 2..=4usize {
        let graphs = if full_corpus {
            graph::enumerate_graphs(dim, true)?
        } else {
            vec![Graph::empty(dim), Graph::path(dim), Graph::complete(dim)]
        };
        for g in graphs {
            let norm = GraphNorm::new(g)?;
            for p in 0..dim as u32 {
                for eps in [norm::q(1, 4), norm::q(1, 2), norm::q(1, 1)] {
                    cert_cases.push((norm.clone(), p, eps));
                }
            }
        }
    }
    let cert_results: Vec<(bool, u64)> = cert_cases
        .par_iter()
        .map(|(norm, p, eps)| {
            norm.strongly_extreme_certificate(*p, eps)
                .map(|c| (c.valid, c.bases_examined))
                .unwrap_or((false, 0))
        })
        .collect();
    let mut total_bases = 0u64;
    for ((norm, p, eps), (valid, bases)) in cert_cases.iter().zip(cert_results) {
        total_bases += bases;
        report.check(
            valid,
            "norm:strongly-extreme-certificate",
            &norm.graph,
            &(p, norm::q_to_string(eps)),
            json!(null),
        );
    }
    report.diagnostics.push(format!(
        "simplex bases examined for certificates: {total_bases}"
    ));
    Ok(report)
}

fn norm_li_bridge(_params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("norm-li-bridge");
    let corpus: Vec<Graph> = small_graph_corpus(5)?
        .into_iter()
        .filter(|g| g.n() >= 2)
        .collect();
    let norms: Vec<GraphNorm> = corpus
        .iter()
        .map(|g| GraphNorm::new(g.clone()))
        .collect::<Result<Vec<_>>>()?;
    let n = corpus.len();
    let checks: Vec<(usize, usize, bool)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let corpus = &corpus;
            let norms = &norms;
            (0..n).map(move |j| {
                if corpus[i].n() > corpus[j].n() {
                    return (i, j, true);
                }
                let free = graph::find_embedding(&corpus[i], &corpus[j])
                    .map(|w| w.is_some())
                    .unwrap_or(false);
                let signed = norm::signed_isometric_embedding(&norms[i], &norms[j]);
                let ok = match signed {
                    Ok(Some(w)) => {
                        free && norm::validate_signed_map(&norms[i], &norms[j], &w).unwrap_or(false)
                    }
                    Ok(None) => !free,
                    Err(_) => false,
                };
                (i, j, ok)
            })
        })
        .collect();
    for (i, j, ok) in checks {
        report.check(
            ok,
            "norm:signed-embedding-iff-graph-embedding",
            &corpus[i],
            &corpus[j],
            json!(null),
        );
    }
    Ok(report)
}

fn norm_extension(_params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("norm-extension");
    // Rigid instances: the smallest asymmetric graph and a pinned variant.
    let rigid = [
        Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5)])?,
        Graph::new(
            7,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5), (0, 6)],
        )?,
    ];
    for g in &rigid {
        report.check(
            graph::automorphisms(g)?.order == 1,
            "norm:instance-is-rigid",
            g,
            &(),
            json!(null),
        );
        let s = norm::build_norm_structure(&GraphNorm::new(g.clone())?)?;
        let points = s.points;
        // All injective sequences of length up to three.
        let mut seqs: Vec<Vec<usize>> = vec![];
        for x in 0..points {
            seqs.push(vec![x]);
            for y in 0..points {
                if y == x {
                    continue;
                }
                seqs.push(vec![x, y]);
                for z in 0..points {
                    if z != x && z != y {
                        seqs.push(vec![x, y, z]);
                    }
                }
            }
        }
        let checks: Vec<(Vec<usize>, bool)> = seqs
            .par_iter()
            .map(|seq| {
                let fast = norm::can_extend_norm_auto(&s, seq).unwrap_or(false);
                let brute = norm::can_extend_norm_auto_brute(&s, seq);
                (seq.clone(), fast == brute)
            })
            .collect();
        for (seq, ok) in checks {
            report.check(ok, "norm:extension-vs-brute", &seq, &(), json!(null));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Suite: saturation
// ---------------------------------------------------------------------------

fn random_setup(rng: &mut ChaCha8Rng) -> Result<ReductionSetup> {
    loop {
        let degree = rng.gen_range(3..=12usize);
        let mut gens = vec![];
        for _ in 0..2 {
            let mut p: Vec<u32> = (0..degree as u32).collect();
            p.shuffle(rng);
            gens.push(p);
        }
        let group = PermGroup::new(degree, gens)?;
        let Ok(elements) = group.elements(24) else {
            continue;
        };
        if elements.len() > 24 {
            continue;
        }
        let z_count = rng.gen_range(4..=10usize);
        let g: Vec<u32> = (0..z_count)
            .map(|_| rng.gen_range(0..degree as u32))
            .collect();
        // Pull the equivalence back from orbits.
        let mut orbit_of = vec![usize::MAX; degree];
        let mut next = 0usize;
        for w in 0..degree as u32 {
            if orbit_of[w as usize] == usize::MAX {
                for x in actions::orbit_with_transversal(&group, w).points {
                    orbit_of[x as usize] = next;
                }
                next += 1;
            }
        }
        let e_class: Vec<usize> = g.iter().map(|&w| orbit_of[w as usize]).collect();
        let mut classes: Vec<usize> = e_class.clone();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            continue;
        }
        let b_size = rng.gen_range(1..=4usize.min(classes.len()));
        let mut f = vec![];
        let mut used_classes = BTreeSet::new();
        let mut order: Vec<usize> = (0..z_count).collect();
        order.shuffle(rng);
        for z in order {
            if f.len() == b_size {
                break;
            }
            if used_classes.insert(e_class[z]) {
                f.push(z);
            }
        }
        let setup = ReductionSetup {
            group,
            z_count,
            f,
            g,
            e_class,
        };
        setup.validate_reduction()?;
        setup.validate_incomparable()?;
        return Ok(setup);
    }
}

fn saturation(params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("saturation");
    let mut rng = params.rng(0x736174);
    let runs = params.samples.unwrap_or(100);
    let setups: Vec<ReductionSetup> = (0..runs)
        .map(|_| random_setup(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<bool> = setups
        .par_iter()
        .map(|setup| {
            let p = actions::saturation_by_uniqueness(setup);
            let direct = actions::direct_saturation(setup);
            matches!((p, direct), (Ok(a), Ok(b)) if a == b)
        })
        .collect();
    for (setup, ok) in setups.iter().zip(outcomes) {
        report.check(
            ok,
            "saturation:uniqueness-vs-direct",
            &setup.f,
            &setup.g,
            json!(null),
        );
    }

    // Corrupted setups: force two instances into one class; the uniqueness
    // set must diverge from the direct saturation and the hypothesis check
    // must flag the corruption.
    let mut corrupted = 0u64;
    for setup in &setups {
        // Find a class with at least two codes.
        let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (z, &c) in setup.e_class.iter().enumerate() {
            by_class.entry(c).or_default().push(z);
        }
        let Some(pair) = by_class.values().find(|v| v.len() >= 2) else {
            continue;
        };
        let mut bad = setup.clone();
        bad.f = vec![pair[0], pair[1]];
        corrupted += 1;
        let flagged = bad.validate_incomparable().is_err();
        let diverges =
            actions::saturation_by_uniqueness(&bad)? != actions::direct_saturation(&bad)?;
        report.check(
            flagged && diverges,
            "saturation:corruption-detected",
            &bad.f,
            &bad.g,
            json!(null),
        );
    }
    report
        .diagnostics
        .push(format!("corrupted variants exercised: {corrupted}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(
            run_suite("no-such-suite", &SuiteParams::default()),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn packed_le_max_agrees_with_general_on_small_corpus() {
        let corpus = tree_corpus(1, 2).unwrap();
        let layout = packed::Layout::new(1, 2).unwrap();
        let packs: Vec<packed::Packed> = corpus.iter().map(|t| packed::pack(&layout, t)).collect();
        for (i, a) in corpus.iter().enumerate() {
            for (j, b) in corpus.iter().enumerate() {
                let fast = packed::le_max_fast(&layout, &packs[i], &packs[j]);
                let general = trees::le_max(a, b).unwrap();
                assert_eq!(fast.is_some(), general.is_some(), "pair {i},{j}");
                if let Some(w) = fast {
                    assert!(packed::validate_witness(
                        &layout,
                        &packs[i],
                        packs[j].mask,
                        &w
                    ));
                }
            }
        }
    }

    #[test]
    fn rigidity_suite_passes_at_depth_zero() {
        let params = SuiteParams {
            depth: Some(0),
            branch: Some(1),
            ..Default::default()
        };
        let report = run_suite("gt-rigidity", &params).unwrap();
        assert!(report.ok());
        assert_eq!(report.instances, 1);
    }
}
