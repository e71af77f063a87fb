//! Rigid combinatorial trees built from normal trees.
//!
//! The builder lays down a numeric spine (every bounded word, independent of
//! the input tree), splits spine edges with star vertices, hangs a graded
//! tine bundle off every spine vertex, and attaches one code path per tree
//! node whose length is driven by the positional rank of the binary word.
//! Equality of source trees then coincides with isomorphism of the built
//! graphs, and the graphs are rigid; both facts are verified by brute force
//! in the suites rather than assumed.

use crate::error::{Error, Result};
use crate::graph::{Graph, SearchBudget, VertexMap};
use crate::hash::hash_of;
use crate::trees::{
    length_lex_rank, theta, word_from_string, word_to_string, words_up_to, NormalTree, Word,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Role of a gadget vertex. The `Code` payload tracks how many zeros the
/// label carries and whether it is the pendant side leaf hanging at the
/// branch vertex (`zeros = 2*theta(u) + 2`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    Seq(Word),
    Star(Word),
    Plus(Word),
    PlusPlus(Word),
    Tine {
        s: Word,
        i: u32,
        j: u32,
    },
    Code {
        u: Word,
        s: Word,
        zeros: u32,
        leaf: bool,
    },
}

impl VertexKind {
    fn tag(&self) -> &'static str {
        match self {
            VertexKind::Seq(_) => "Seq",
            VertexKind::Star(_) => "Star",
            VertexKind::Plus(_) => "Plus",
            VertexKind::PlusPlus(_) => "PlusPlus",
            VertexKind::Tine { .. } => "Tine",
            VertexKind::Code { .. } => "Code",
        }
    }

    fn payload(&self) -> String {
        match self {
            VertexKind::Seq(s)
            | VertexKind::Star(s)
            | VertexKind::Plus(s)
            | VertexKind::PlusPlus(s) => word_to_string(s),
            VertexKind::Tine { s, i, j } => format!("{};{i};{j}", word_to_string(s)),
            VertexKind::Code { u, s, zeros, leaf } => format!(
                "{};{};{zeros};{}",
                word_to_string(u),
                word_to_string(s),
                u8::from(*leaf)
            ),
        }
    }

    fn from_parts(tag: &str, payload: &str) -> Result<Self> {
        let bad = || Error::InvalidInstance(format!("bad vertex kind {tag}:{payload}"));
        let word = |p: &str| word_from_string(p);
        Ok(match tag {
            "Seq" => VertexKind::Seq(word(payload)?),
            "Star" => VertexKind::Star(word(payload)?),
            "Plus" => VertexKind::Plus(word(payload)?),
            "PlusPlus" => VertexKind::PlusPlus(word(payload)?),
            "Tine" => {
                let parts: Vec<&str> = payload.split(';').collect();
                let [s, i, j] = parts.as_slice() else {
                    return Err(bad());
                };
                VertexKind::Tine {
                    s: word(s)?,
                    i: i.parse().map_err(|_| bad())?,
                    j: j.parse().map_err(|_| bad())?,
                }
            }
            "Code" => {
                let parts: Vec<&str> = payload.split(';').collect();
                let [u, s, zeros, leaf] = parts.as_slice() else {
                    return Err(bad());
                };
                VertexKind::Code {
                    u: word(u)?,
                    s: word(s)?,
                    zeros: zeros.parse().map_err(|_| bad())?,
                    leaf: *leaf == "1",
                }
            }
            _ => return Err(bad()),
        })
    }

    /// Kind-major sort key: kind rank first, then length-lex on the words.
    fn sort_key(&self) -> (u8, Vec<u64>, u32, u32) {
        match self {
            VertexKind::Seq(s) => (0, vec![length_lex_rank(s, 10)], 0, 0),
            VertexKind::Star(s) => (1, vec![length_lex_rank(s, 10)], 0, 0),
            VertexKind::Plus(s) => (2, vec![length_lex_rank(s, 10)], 0, 0),
            VertexKind::PlusPlus(s) => (3, vec![length_lex_rank(s, 10)], 0, 0),
            VertexKind::Tine { s, i, j } => (4, vec![length_lex_rank(s, 10)], *i, *j),
            VertexKind::Code { u, s, zeros, leaf } => (
                5,
                vec![length_lex_rank(u, 2), length_lex_rank(s, 10)],
                *zeros,
                u32::from(*leaf),
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GadgetJson {
    graph: Graph,
    kinds: Vec<(String, String)>,
    d: u8,
    b: u8,
    source: NormalTree,
    source_hash: String,
    conventions: String,
}

/// A gadget graph with its vertex roles and provenance tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GadgetJson", into = "GadgetJson")]
pub struct GadgetGraph {
    pub graph: Graph,
    pub kinds: Vec<VertexKind>,
    pub d: u8,
    pub b: u8,
    pub source: NormalTree,
}

/// Rank and position conventions recorded in serialized artifacts so
/// cross-run certificates stay comparable.
pub const CONVENTIONS: &str =
    "theta=length-lex rank over binary words; rank#=length-lex rank over bounded numeric words; \
     k_n=first Cantor component; type codes ordered by arity, then equality pattern, then adjacency bits";

impl TryFrom<GadgetJson> for GadgetGraph {
    type Error = Error;
    fn try_from(j: GadgetJson) -> Result<Self> {
        let kinds = j
            .kinds
            .iter()
            .map(|(t, p)| VertexKind::from_parts(t, p))
            .collect::<Result<Vec<_>>>()?;
        if kinds.len() != j.graph.n() {
            return Err(Error::InvalidInstance("kind list length mismatch".into()));
        }
        Ok(GadgetGraph {
            graph: j.graph,
            kinds,
            d: j.d,
            b: j.b,
            source: j.source,
        })
    }
}

impl From<GadgetGraph> for GadgetJson {
    fn from(g: GadgetGraph) -> GadgetJson {
        GadgetJson {
            kinds: g
                .kinds
                .iter()
                .map(|k| (k.tag().to_string(), k.payload()))
                .collect(),
            source_hash: hash_of(&g.source),
            conventions: CONVENTIONS.to_string(),
            graph: g.graph,
            d: g.d,
            b: g.b,
            source: g.source,
        }
    }
}

/// Number of vertices the builder will lay down, as a pure function of the
/// parameters and the tree's nodes.
pub fn gadget_vertex_count(tree: &NormalTree) -> u64 {
    let spine = words_up_to(tree.d, tree.b);
    let mut count = 0u64;
    for s in &spine {
        count += 1; // spine vertex
        if !s.is_empty() {
            count += 1; // star splitting the edge to the parent
        }
        count += 2; // plus, plusplus
        let r = length_lex_rank(s, tree.b);
        // Tines i = 0..=r+2, tine i carrying i+1 vertices.
        count += (0..=r + 2).map(|i| i + 1).sum::<u64>();
    }
    for (u, _) in tree.nodes() {
        count += 2 * theta(u) + 6; // code path of length 2*theta+4, one side leaf
    }
    count
}

/// Builds the gadget graph of a normal tree with deterministic kind-major
/// vertex numbering. Refuses when the vertex count exceeds the budget.
pub fn build_gadget(tree: &NormalTree, budget: SearchBudget) -> Result<GadgetGraph> {
    let needed = gadget_vertex_count(tree);
    if needed > budget.max_vertices as u64 {
        return Err(Error::budget(
            "gadget vertices",
            needed,
            budget.max_vertices as u64,
        ));
    }
    let mut kinds: Vec<VertexKind> = vec![];
    let spine = words_up_to(tree.d, tree.b);
    for s in &spine {
        kinds.push(VertexKind::Seq(s.clone()));
        if !s.is_empty() {
            kinds.push(VertexKind::Star(s.clone()));
        }
        kinds.push(VertexKind::Plus(s.clone()));
        kinds.push(VertexKind::PlusPlus(s.clone()));
        let r = length_lex_rank(s, tree.b) as u32;
        for i in 0..=r + 2 {
            for j in 0..=i {
                kinds.push(VertexKind::Tine { s: s.clone(), i, j });
            }
        }
    }
    for (u, s) in tree.nodes() {
        let top = 2 * theta(u) as u32 + 4;
        for zeros in 0..=top {
            kinds.push(VertexKind::Code {
                u: u.clone(),
                s: s.clone(),
                zeros,
                leaf: false,
            });
        }
        kinds.push(VertexKind::Code {
            u: u.clone(),
            s: s.clone(),
            zeros: top - 2,
            leaf: true,
        });
    }
    kinds.sort_by_key(|k| k.sort_key());
    debug_assert_eq!(kinds.len() as u64, needed);

    let index: BTreeMap<&VertexKind, u32> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| (k, i as u32))
        .collect();
    let at = |k: &VertexKind| index[k];
    let mut edges: Vec<(u32, u32)> = vec![];
    for s in &spine {
        if !s.is_empty() {
            let parent = s[..s.len() - 1].to_vec();
            edges.push((
                at(&VertexKind::Seq(parent)),
                at(&VertexKind::Star(s.clone())),
            ));
            edges.push((
                at(&VertexKind::Star(s.clone())),
                at(&VertexKind::Seq(s.clone())),
            ));
        }
        edges.push((
            at(&VertexKind::Seq(s.clone())),
            at(&VertexKind::Plus(s.clone())),
        ));
        edges.push((
            at(&VertexKind::Plus(s.clone())),
            at(&VertexKind::PlusPlus(s.clone())),
        ));
        let r = length_lex_rank(s, tree.b) as u32;
        for i in 0..=r + 2 {
            edges.push((
                at(&VertexKind::PlusPlus(s.clone())),
                at(&VertexKind::Tine {
                    s: s.clone(),
                    i,
                    j: 0,
                }),
            ));
            for j in 1..=i {
                edges.push((
                    at(&VertexKind::Tine {
                        s: s.clone(),
                        i,
                        j: j - 1,
                    }),
                    at(&VertexKind::Tine { s: s.clone(), i, j }),
                ));
            }
        }
    }
    for (u, s) in tree.nodes() {
        let top = 2 * theta(u) as u32 + 4;
        let code = |zeros: u32, leaf: bool| VertexKind::Code {
            u: u.clone(),
            s: s.clone(),
            zeros,
            leaf,
        };
        edges.push((at(&VertexKind::Seq(s.clone())), at(&code(0, false))));
        for zeros in 1..=top {
            edges.push((at(&code(zeros - 1, false)), at(&code(zeros, false))));
        }
        edges.push((at(&code(top - 2, false)), at(&code(top - 2, true))));
    }
    let graph = Graph::new(kinds.len(), edges)?;
    debug_assert!(graph.is_combinatorial_tree());
    Ok(GadgetGraph {
        graph,
        kinds,
        d: tree.d,
        b: tree.b,
        source: tree.clone(),
    })
}

impl GadgetGraph {
    pub fn vertex_of(&self, kind: &VertexKind) -> Option<u32> {
        self.kinds.iter().position(|k| k == kind).map(|i| i as u32)
    }

    /// All maximal paths starting at the spine root. Every such path ends in
    /// a tine tip, a code tip or a code side leaf.
    pub fn branches(&self) -> Vec<BranchPath> {
        let root = self
            .vertex_of(&VertexKind::Seq(vec![]))
            .expect("gadget has a spine root");
        let mut out = vec![];
        let mut stack = vec![(root, vec![root])];
        while let Some((v, path)) = stack.pop() {
            let mut extended = false;
            for w in self.graph.neighbors(v) {
                if path.len() >= 2 && path[path.len() - 2] == w {
                    continue;
                }
                let mut p = path.clone();
                p.push(w);
                stack.push((w, p));
                extended = true;
            }
            if !extended {
                let tag = match &self.kinds[v as usize] {
                    VertexKind::Tine { s, i, .. } => BranchTag::Tine {
                        s: s.clone(),
                        i: *i,
                    },
                    VertexKind::Code { u, s, leaf, .. } => BranchTag::Code {
                        s: s.clone(),
                        u: u.clone(),
                        side: u32::from(*leaf),
                    },
                    k => unreachable!("maximal path ends at {k:?}"),
                };
                out.push(BranchPath {
                    vertices: path,
                    tag,
                });
            }
        }
        out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        out
    }
}

/// One maximal root path of a gadget graph, tagged by the pendant structure
/// it dives into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchPath {
    pub vertices: Vec<u32>,
    pub tag: BranchTag,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchTag {
    /// Dives into tine `i` of the bundle at spine word `s`.
    Tine { s: Word, i: u32 },
    /// Follows the code path of `(u, s)`; `side = 1` for the pendant leaf.
    Code { s: Word, u: Word, side: u32 },
}

/// A structure-preserving embedding between gadget graphs: the underlying
/// spine word map together with the full vertex map it induces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructuredWitness {
    pub spine_map: BTreeMap<Word, Word>,
    pub vertex_map: VertexMap,
}

/// Searches for an embedding of `gs` into `gt` constrained to preserve kinds
/// and the spine root: an injective, length- and prefix-preserving word map
/// whose positional ranks never drop (so tine bundles fit) and which carries
/// every code path of the source tree onto one of the target tree. Returns
/// the witness induced by the least such word map.
pub fn structured_embed(gs: &GadgetGraph, gt: &GadgetGraph) -> Result<Option<StructuredWitness>> {
    if gs.d != gt.d {
        return Err(Error::Precondition(format!(
            "gadget depth mismatch: {} vs {}",
            gs.d, gt.d
        )));
    }
    if gs.b > gt.b {
        return Err(Error::Precondition(format!(
            "gadget bound mismatch: {} > {}",
            gs.b, gt.b
        )));
    }
    let spine = words_up_to(gs.d, gs.b);
    let index: BTreeMap<&Word, usize> = spine.iter().enumerate().map(|(i, s)| (s, i)).collect();

    fn rec(
        spine: &[Word],
        index: &BTreeMap<&Word, usize>,
        gs: &GadgetGraph,
        gt: &GadgetGraph,
        images: &mut Vec<Word>,
        used: &mut std::collections::BTreeSet<Word>,
        k: usize,
    ) -> bool {
        if k == spine.len() {
            return true;
        }
        let s = &spine[k];
        let candidates: Vec<Word> = if s.is_empty() {
            vec![vec![]]
        } else {
            let base = images[index[&s[..s.len() - 1].to_vec()]].clone();
            (0..gt.b)
                .map(|m| {
                    let mut t = base.clone();
                    t.push(m);
                    t
                })
                .collect()
        };
        for t in candidates {
            if used.contains(&t) {
                continue;
            }
            if length_lex_rank(s, gs.b) > length_lex_rank(&t, gt.b) {
                continue;
            }
            if !gs.source.u_set(s).iter().all(|u| gt.source.contains(u, &t)) {
                continue;
            }
            images.push(t.clone());
            used.insert(t.clone());
            if rec(spine, index, gs, gt, images, used, k + 1) {
                return true;
            }
            used.remove(&t);
            images.pop();
        }
        false
    }

    let mut images = vec![];
    let mut used = std::collections::BTreeSet::new();
    if !rec(&spine, &index, gs, gt, &mut images, &mut used, 0) {
        return Ok(None);
    }
    let spine_map: BTreeMap<Word, Word> = spine.iter().cloned().zip(images).collect();
    induce_structured(gs, gt, spine_map).map(Some)
}

/// Lifts a spine word map to the full vertex map it induces; tine indices
/// transfer unchanged, which fits whenever ranks never drop.
pub fn induce_structured(
    gs: &GadgetGraph,
    gt: &GadgetGraph,
    spine_map: BTreeMap<Word, Word>,
) -> Result<StructuredWitness> {
    let mut map = vec![0u32; gs.graph.n()];
    for (v, kind) in gs.kinds.iter().enumerate() {
        let image_kind = match kind {
            VertexKind::Seq(s) => VertexKind::Seq(spine_map[s].clone()),
            VertexKind::Star(s) => VertexKind::Star(spine_map[s].clone()),
            VertexKind::Plus(s) => VertexKind::Plus(spine_map[s].clone()),
            VertexKind::PlusPlus(s) => VertexKind::PlusPlus(spine_map[s].clone()),
            VertexKind::Tine { s, i, j } => VertexKind::Tine {
                s: spine_map[s].clone(),
                i: *i,
                j: *j,
            },
            VertexKind::Code { u, s, zeros, leaf } => VertexKind::Code {
                u: u.clone(),
                s: spine_map[s].clone(),
                zeros: *zeros,
                leaf: *leaf,
            },
        };
        map[v] = gt.vertex_of(&image_kind).ok_or_else(|| {
            Error::InvalidInstance(format!("induced image of {kind:?} does not exist"))
        })?;
    }
    Ok(StructuredWitness {
        spine_map,
        vertex_map: VertexMap { map },
    })
}

/// Independent check that a structured witness is sound: its vertex map is a
/// genuine induced embedding and its spine map has the stated shape.
pub fn is_structured_witness(
    gs: &GadgetGraph,
    gt: &GadgetGraph,
    w: &StructuredWitness,
) -> Result<bool> {
    if !crate::graph::is_embedding(&gs.graph, &gt.graph, &w.vertex_map)? {
        return Ok(false);
    }
    for (s, t) in &w.spine_map {
        if s.len() != t.len() || length_lex_rank(s, gs.b) > length_lex_rank(t, gt.b) {
            return Ok(false);
        }
        if !s.is_empty() {
            let p = &w.spine_map[&s[..s.len() - 1].to_vec()];
            if p[..] != t[..t.len() - 1] {
                return Ok(false);
            }
        }
    }
    let images: std::collections::BTreeSet<&Word> = w.spine_map.values().collect();
    Ok(images.len() == w.spine_map.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{automorphisms, is_embedding};
    use crate::trees::{enumerate_trees, le_max};

    fn smallest() -> GadgetGraph {
        build_gadget(&NormalTree::root_only(0, 1), SearchBudget::for_suites()).unwrap()
    }

    #[test]
    fn smallest_instance_hand_count() {
        // Spine vertex, plus, plusplus, tines of sizes 1+2+3, code path of
        // five vertices and one side leaf: 15 in total.
        let g = smallest();
        assert_eq!(g.graph.n(), 15);
        assert_eq!(gadget_vertex_count(&g.source), 15);
        assert!(g.graph.is_combinatorial_tree());
    }

    #[test]
    fn plusplus_degree_is_rank_plus_four() {
        let corpus = enumerate_trees(1, 2, 100).unwrap();
        for t in &corpus {
            let g = build_gadget(t, SearchBudget::for_suites()).unwrap();
            for (v, k) in g.kinds.iter().enumerate() {
                if let VertexKind::PlusPlus(s) = k {
                    assert_eq!(g.graph.degree(v as u32) as u64, length_lex_rank(s, t.b) + 4);
                }
            }
        }
    }

    #[test]
    fn code_branch_vertex_has_degree_three_with_tails_two_and_one() {
        let g = smallest();
        let branch = g
            .vertex_of(&VertexKind::Code {
                u: vec![],
                s: vec![],
                zeros: 2,
                leaf: false,
            })
            .unwrap();
        assert_eq!(g.graph.degree(branch), 3);
        let dist = g.graph.bfs_distances(branch);
        let tip = g
            .vertex_of(&VertexKind::Code {
                u: vec![],
                s: vec![],
                zeros: 4,
                leaf: false,
            })
            .unwrap();
        let side = g
            .vertex_of(&VertexKind::Code {
                u: vec![],
                s: vec![],
                zeros: 2,
                leaf: true,
            })
            .unwrap();
        assert_eq!(dist[tip as usize], 2);
        assert_eq!(dist[side as usize], 1);
    }

    #[test]
    fn smallest_instance_is_rigid() {
        assert_eq!(automorphisms(&smallest().graph).unwrap().order, 1);
    }

    #[test]
    fn identity_structured_embedding() {
        let g = smallest();
        let w = structured_embed(&g, &g).unwrap().unwrap();
        assert!(is_structured_witness(&g, &g, &w).unwrap());
        assert_eq!(w.vertex_map, VertexMap::identity(g.graph.n()));
    }

    #[test]
    fn structured_witness_is_a_free_embedding() {
        let corpus = enumerate_trees(1, 1, 100).unwrap();
        let gadgets: Vec<GadgetGraph> = corpus
            .iter()
            .map(|t| build_gadget(t, SearchBudget::for_suites()).unwrap())
            .collect();
        for a in &gadgets {
            for b in &gadgets {
                if let Some(w) = structured_embed(a, b).unwrap() {
                    assert!(is_embedding(&a.graph, &b.graph, &w.vertex_map).unwrap());
                }
            }
        }
    }

    #[test]
    fn negative_comparability_pair_has_no_structured_embedding() {
        let mk = |nodes: &[(&str, &[u8])]| {
            NormalTree::new(
                1,
                2,
                nodes
                    .iter()
                    .map(|(u, s)| (word_from_string(u).unwrap(), s.to_vec()))
                    .collect(),
            )
            .unwrap()
        };
        let s = mk(&[("", &[]), ("1", &[0]), ("1", &[1])]);
        let t = mk(&[("", &[]), ("0", &[0]), ("0", &[1])]);
        assert!(le_max(&s, &t).unwrap().is_none());
        let gs = build_gadget(&s, SearchBudget::for_suites()).unwrap();
        let gt = build_gadget(&t, SearchBudget::for_suites()).unwrap();
        assert!(structured_embed(&gs, &gt).unwrap().is_none());
    }

    #[test]
    fn vertex_count_formula_matches_built_graphs() {
        for t in enumerate_trees(1, 2, 100).unwrap() {
            let g = build_gadget(&t, SearchBudget::for_suites()).unwrap();
            assert_eq!(g.graph.n() as u64, gadget_vertex_count(&t));
        }
    }

    #[test]
    fn budget_refusal_reports_count() {
        let t = NormalTree::full(1, 2);
        let tight = SearchBudget {
            max_vertices: 10,
            max_nodes: 1000,
        };
        match build_gadget(&t, tight) {
            Err(Error::Budget { needed, .. }) => {
                assert_eq!(needed, gadget_vertex_count(&t));
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn gadget_json_round_trip() {
        let g = smallest();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("source_hash"));
        let back: GadgetGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn branches_end_in_tines_and_codes() {
        let g = smallest();
        let branches = g.branches();
        // Three tine branches plus two code branches.
        assert_eq!(branches.len(), 5);
        let tines = branches
            .iter()
            .filter(|b| matches!(b.tag, BranchTag::Tine { .. }))
            .count();
        assert_eq!(tines, 3);
    }
}
