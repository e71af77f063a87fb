//! Finite simple graphs and the exhaustive search kernels every gadget
//! module consumes: induced embedding, isomorphism, automorphism groups and
//! surjective homomorphisms.
//!
//! All searches are deterministic: domain vertices are processed in index
//! order and candidate images in ascending order, so returned witnesses are
//! lexicographically least and reproducible bit-for-bit.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Search limits. `max_vertices` guards graph-shaped searches from silently
/// running forever; `max_nodes` caps explored search-tree nodes.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_vertices: 64,
            max_nodes: 50_000_000,
        }
    }
}

impl SearchBudget {
    /// Budget sized for the verification suites, which build gadget graphs
    /// larger than the CLI default cap.
    pub fn for_suites() -> Self {
        SearchBudget {
            max_vertices: 4096,
            max_nodes: 500_000_000,
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    fn check_vertices(&self, n: usize, what: &str) -> Result<()> {
        if n > self.max_vertices {
            return Err(Error::budget(what, n as u64, self.max_vertices as u64));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(u32, u32)>,
}

/// A finite simple graph on vertices `0..n-1`. No self-loops; the edge set
/// is stored sorted with `i < j` so serialization is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    words: usize,
    adj: Vec<u64>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        Graph::new(j.n, j.edges)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> GraphJson {
        GraphJson {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    pub fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::InvalidInstance(format!("self-loop at {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 as usize >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({},{}) out of range for n={n}",
                    e.0, e.1
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let words = n.div_ceil(64);
        let mut adj = vec![0u64; n * words];
        for &(i, j) in &edges {
            adj[i as usize * words + j as usize / 64] |= 1 << (j % 64);
            adj[j as usize * words + i as usize / 64] |= 1 << (i % 64);
        }
        Ok(Graph {
            n,
            edges,
            words,
            adj,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, vec![]).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n as u32).map(|i| (i - 1, i)).collect()).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut e: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        e.push((0, n as u32 - 1));
        Graph::new(n, e).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let mut e = vec![];
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                e.push((i, j));
            }
        }
        Graph::new(n, e).unwrap()
    }

    /// Star `K_{1,k}` with center 0.
    pub fn star(k: usize) -> Self {
        Graph::new(k + 1, (1..=k as u32).map(|i| (0, i)).collect()).unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: u32, j: u32) -> bool {
        self.adj[i as usize * self.words + j as usize / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: u32) -> usize {
        let row = &self.adj[i as usize * self.words..(i as usize + 1) * self.words];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: u32) -> impl Iterator<Item = u32> + '_ {
        let row = &self.adj[i as usize * self.words..(i as usize + 1) * self.words];
        row.iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros();
                    b &= b - 1;
                    Some(w as u32 * 64 + t)
                }
            })
        })
    }

    /// The same graph with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Graph> {
        Graph::new(
            self.n,
            self.edges
                .iter()
                .map(|&(i, j)| (perm[i as usize], perm[j as usize]))
                .collect(),
        )
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Connected and acyclic.
    pub fn is_combinatorial_tree(&self) -> bool {
        self.n > 0 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    /// Geodesic distances from `src` by breadth-first search; `u32::MAX`
    /// marks unreachable vertices.
    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        dist[src as usize] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// A vertex map between two graphs, stored as the image array indexed by
/// domain vertex. Serves as the witness certificate for embeddings,
/// isomorphisms and epimorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMap {
    pub map: Vec<u32>,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        VertexMap {
            map: (0..n as u32).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.map.iter().all(|v| seen.insert(*v))
    }

    /// `other` after `self` (domain of `self`).
    pub fn compose(&self, other: &VertexMap) -> VertexMap {
        VertexMap {
            map: self.map.iter().map(|&v| other.map[v as usize]).collect(),
        }
    }
}

/// Checks that `m` is an induced embedding of `g` into `h`: injective, and
/// for all `i < j` the pair `{i,j}` is an edge of `g` exactly when its image
/// is an edge of `h`.
pub fn is_embedding(g: &Graph, h: &Graph, m: &VertexMap) -> Result<bool> {
    if m.map.len() != g.n() {
        return Err(Error::MalformedMap(format!(
            "map has {} entries, domain has {} vertices",
            m.map.len(),
            g.n()
        )));
    }
    if let Some(v) = m.map.iter().find(|&&v| v as usize >= h.n()) {
        return Err(Error::MalformedMap(format!(
            "image vertex {v} out of range for codomain of size {}",
            h.n()
        )));
    }
    if !m.is_injective() {
        return Err(Error::MalformedMap("map is not injective".into()));
    }
    for i in 0..g.n() as u32 {
        for j in i + 1..g.n() as u32 {
            if g.has_edge(i, j) != h.has_edge(m.map[i as usize], m.map[j as usize]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct EmbedState<'a> {
    g: &'a Graph,
    h: &'a Graph,
    assign: Vec<u32>,
    used: Vec<bool>,
    nodes: u64,
    budget: SearchBudget,
}

impl EmbedState<'_> {
    fn consistent(&self, u: u32, v: u32) -> bool {
        if self.g.degree(u) > self.h.degree(v) {
            return false;
        }
        for prev in 0..u {
            let pv = self.assign[prev as usize];
            if self.g.has_edge(prev, u) != self.h.has_edge(pv, v) {
                return false;
            }
        }
        true
    }

    fn search(&mut self, u: u32) -> Result<bool> {
        if u as usize == self.g.n() {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(Error::budget(
                "embedding search nodes",
                self.nodes,
                self.budget.max_nodes,
            ));
        }
        for v in 0..self.h.n() as u32 {
            if !self.used[v as usize] && self.consistent(u, v) {
                self.assign[u as usize] = v;
                self.used[v as usize] = true;
                if self.search(u + 1)? {
                    return Ok(true);
                }
                self.used[v as usize] = false;
            }
        }
        Ok(false)
    }
}

/// Exhaustive backtracking search for an induced embedding of `g` into `h`.
/// Returns the lexicographically least witness, or `None` when none exists.
pub fn find_embedding(g: &Graph, h: &Graph) -> Result<Option<VertexMap>> {
    find_embedding_with(g, h, SearchBudget::default())
}

pub fn find_embedding_with(
    g: &Graph,
    h: &Graph,
    budget: SearchBudget,
) -> Result<Option<VertexMap>> {
    budget.check_vertices(g.n().max(h.n()), "embedding search vertices")?;
    if g.n() > h.n() {
        return Ok(None);
    }
    let mut st = EmbedState {
        g,
        h,
        assign: vec![0; g.n()],
        used: vec![false; h.n()],
        nodes: 0,
        budget,
    };
    Ok(if st.search(0)? {
        Some(VertexMap { map: st.assign })
    } else {
        None
    })
}

/// Iterated degree refinement. Returns a stable coloring of the vertices;
/// colors are comparable across graphs refined by `joint_refinement`.
fn joint_refinement(graphs: &[&Graph]) -> Vec<Vec<u32>> {
    let mut colors: Vec<Vec<u32>> = graphs
        .iter()
        .map(|g| (0..g.n() as u32).map(|v| g.degree(v) as u32).collect())
        .collect();
    let total: usize = graphs.iter().map(|g| g.n()).sum();
    for _ in 0..total.max(1) {
        let mut table: BTreeMap<(u32, Vec<u32>), u32> = BTreeMap::new();
        let mut next: Vec<Vec<u32>> = Vec::with_capacity(graphs.len());
        // Two passes keep the signature -> id mapping consistent across all
        // inputs regardless of graph order.
        let mut sigs: Vec<Vec<(u32, Vec<u32>)>> = Vec::with_capacity(graphs.len());
        for (gi, g) in graphs.iter().enumerate() {
            let mut gsigs = Vec::with_capacity(g.n());
            for v in 0..g.n() as u32 {
                let mut nb: Vec<u32> = g.neighbors(v).map(|w| colors[gi][w as usize]).collect();
                nb.sort_unstable();
                gsigs.push((colors[gi][v as usize], nb));
            }
            sigs.push(gsigs);
        }
        for gsigs in &sigs {
            for s in gsigs {
                let fresh = table.len() as u32;
                table.entry(s.clone()).or_insert(fresh);
            }
        }
        // Renumber in sorted signature order for determinism.
        let mut ordered: Vec<u32> = vec![0; table.len()];
        for (rank, (_, id)) in table.iter().enumerate() {
            ordered[*id as usize] = rank as u32;
        }
        for gsigs in &sigs {
            next.push(gsigs.iter().map(|s| ordered[table[s] as usize]).collect());
        }
        if next == colors {
            break;
        }
        colors = next;
    }
    colors
}

fn color_multiset(colors: &[u32]) -> Vec<u32> {
    let mut m = colors.to_vec();
    m.sort_unstable();
    m
}

fn iso_search(
    g: &Graph,
    h: &Graph,
    gc: &[u32],
    hc: &[u32],
    pinned: &[(u32, u32)],
    budget: SearchBudget,
) -> Result<Option<VertexMap>> {
    let mut assign = vec![u32::MAX; g.n()];
    let mut used = vec![false; h.n()];
    for &(u, v) in pinned {
        if gc[u as usize] != hc[v as usize] || used[v as usize] {
            return Ok(None);
        }
        assign[u as usize] = v;
        used[v as usize] = true;
    }
    for &(u, v) in pinned {
        for &(u2, v2) in pinned {
            if u != u2 && g.has_edge(u, u2) != h.has_edge(v, v2) {
                return Ok(None);
            }
        }
    }
    fn rec(
        g: &Graph,
        h: &Graph,
        gc: &[u32],
        hc: &[u32],
        assign: &mut Vec<u32>,
        used: &mut Vec<bool>,
        u: u32,
        nodes: &mut u64,
        budget: &SearchBudget,
    ) -> Result<bool> {
        let n = g.n() as u32;
        let mut u = u;
        while u < n && assign[u as usize] != u32::MAX {
            u += 1;
        }
        if u == n {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > budget.max_nodes {
            return Err(Error::budget(
                "isomorphism search nodes",
                *nodes,
                budget.max_nodes,
            ));
        }
        'cand: for v in 0..h.n() as u32 {
            if used[v as usize] || gc[u as usize] != hc[v as usize] {
                continue;
            }
            for prev in 0..n {
                let pv = assign[prev as usize];
                if pv != u32::MAX && g.has_edge(prev, u) != h.has_edge(pv, v) {
                    continue 'cand;
                }
            }
            assign[u as usize] = v;
            used[v as usize] = true;
            if rec(g, h, gc, hc, assign, used, u + 1, nodes, budget)? {
                return Ok(true);
            }
            assign[u as usize] = u32::MAX;
            used[v as usize] = false;
        }
        Ok(false)
    }
    let mut nodes = 0u64;
    if rec(g, h, gc, hc, &mut assign, &mut used, 0, &mut nodes, &budget)? {
        Ok(Some(VertexMap { map: assign }))
    } else {
        Ok(None)
    }
}

/// Exhaustive isomorphism test with degree-refinement pruning.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Result<Option<VertexMap>> {
    find_isomorphism_with(g, h, SearchBudget::for_suites())
}

pub fn find_isomorphism_with(
    g: &Graph,
    h: &Graph,
    budget: SearchBudget,
) -> Result<Option<VertexMap>> {
    if g.n() != h.n() || g.edges().len() != h.edges().len() {
        return Ok(None);
    }
    budget.check_vertices(g.n(), "isomorphism search vertices")?;
    let colors = joint_refinement(&[g, h]);
    if color_multiset(&colors[0]) != color_multiset(&colors[1]) {
        return Ok(None);
    }
    iso_search(g, h, &colors[0], &colors[1], &[], budget)
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

/// The automorphism group of a graph: a generating set and the exact order,
/// computed along the point stabilizer chain `0, 1, 2, ...`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutGroup {
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    pub order: u128,
}

pub fn automorphisms(g: &Graph) -> Result<AutGroup> {
    automorphisms_with(g, SearchBudget::for_suites())
}

pub fn automorphisms_with(g: &Graph, budget: SearchBudget) -> Result<AutGroup> {
    budget.check_vertices(g.n(), "automorphism search vertices")?;
    let colors = &joint_refinement(&[g])[0];
    let mut order: u128 = 1;
    let mut generators = vec![];
    let mut pinned: Vec<(u32, u32)> = vec![];
    for k in 0..g.n() as u32 {
        let mut orbit = 1u128;
        for v in 0..g.n() as u32 {
            if v == k || colors[v as usize] != colors[k as usize] {
                continue;
            }
            let mut pins = pinned.clone();
            pins.push((k, v));
            if let Some(w) = iso_search(g, g, colors, colors, &pins, budget)? {
                orbit += 1;
                generators.push(w.map);
            }
        }
        order *= orbit;
        pinned.push((k, k));
    }
    Ok(AutGroup {
        degree: g.n(),
        generators,
        order,
    })
}

/// Naive full enumeration of automorphisms; the independent oracle for
/// `automorphisms` on small graphs.
pub fn automorphism_count_naive(g: &Graph) -> u128 {
    fn rec(g: &Graph, assign: &mut Vec<u32>, used: &mut Vec<bool>, u: u32, count: &mut u128) {
        if u as usize == g.n() {
            *count += 1;
            return;
        }
        'cand: for v in 0..g.n() as u32 {
            if used[v as usize] {
                continue;
            }
            for prev in 0..u {
                if g.has_edge(prev, u) != g.has_edge(assign[prev as usize], v) {
                    continue 'cand;
                }
            }
            assign[u as usize] = v;
            used[v as usize] = true;
            rec(g, assign, used, u + 1, count);
            used[v as usize] = false;
        }
    }
    let mut count = 0;
    rec(
        g,
        &mut vec![0; g.n()],
        &mut vec![false; g.n()],
        0,
        &mut count,
    );
    count
}

/// Searches for a surjection from the vertices of `hprime` onto the vertices
/// of `h` carrying every edge of `hprime` to an edge of `h`. A witness makes
/// `h` an epimorphic image of `hprime`.
pub fn find_epimorphism(h: &Graph, hprime: &Graph) -> Result<Option<VertexMap>> {
    find_epimorphism_with(h, hprime, SearchBudget::default())
}

pub fn find_epimorphism_with(
    h: &Graph,
    hprime: &Graph,
    budget: SearchBudget,
) -> Result<Option<VertexMap>> {
    budget.check_vertices(h.n().max(hprime.n()), "epimorphism search vertices")?;
    if h.n() > hprime.n() {
        return Ok(None);
    }
    fn rec(
        h: &Graph,
        hp: &Graph,
        assign: &mut Vec<u32>,
        hits: &mut Vec<u32>,
        covered: &mut usize,
        u: u32,
        nodes: &mut u64,
        budget: &SearchBudget,
    ) -> Result<bool> {
        if u as usize == hp.n() {
            return Ok(*covered == h.n());
        }
        *nodes += 1;
        if *nodes > budget.max_nodes {
            return Err(Error::budget(
                "epimorphism search nodes",
                *nodes,
                budget.max_nodes,
            ));
        }
        // Every still-uncovered target needs a still-unassigned source.
        if h.n() - *covered > hp.n() - u as usize {
            return Ok(false);
        }
        'cand: for v in 0..h.n() as u32 {
            for prev in 0..u {
                if hp.has_edge(prev, u) && !h.has_edge(assign[prev as usize], v) {
                    continue 'cand;
                }
            }
            assign[u as usize] = v;
            if hits[v as usize] == 0 {
                *covered += 1;
            }
            hits[v as usize] += 1;
            if rec(h, hp, assign, hits, covered, u + 1, nodes, budget)? {
                return Ok(true);
            }
            hits[v as usize] -= 1;
            if hits[v as usize] == 0 {
                *covered -= 1;
            }
        }
        Ok(false)
    }
    let mut assign = vec![0; hprime.n()];
    let mut hits = vec![0; h.n()];
    let mut covered = 0;
    let mut nodes = 0;
    Ok(
        if rec(
            h,
            hprime,
            &mut assign,
            &mut hits,
            &mut covered,
            0,
            &mut nodes,
            &budget,
        )? {
            Some(VertexMap { map: assign })
        } else {
            None
        },
    )
}

/// Checks that `m` maps the vertices of `hprime` onto those of `h` and every
/// edge of `hprime` to an edge of `h`.
pub fn is_epimorphism(h: &Graph, hprime: &Graph, m: &VertexMap) -> Result<bool> {
    if m.map.len() != hprime.n() {
        return Err(Error::MalformedMap(format!(
            "map has {} entries, domain has {} vertices",
            m.map.len(),
            hprime.n()
        )));
    }
    if let Some(v) = m.map.iter().find(|&&v| v as usize >= h.n()) {
        return Err(Error::MalformedMap(format!(
            "image vertex {v} out of range for codomain of size {}",
            h.n()
        )));
    }
    let mut hit = vec![false; h.n()];
    for &v in &m.map {
        hit[v as usize] = true;
    }
    if !hit.iter().all(|&b| b) {
        return Ok(false);
    }
    for &(i, j) in hprime.edges() {
        let (a, b) = (m.map[i as usize], m.map[j as usize]);
        if a == b || !h.has_edge(a, b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerates all labeled graphs on `n` vertices, or canonical
/// representatives up to isomorphism when `up_to_iso` is set, in a fixed
/// deterministic order.
pub fn enumerate_graphs(n: usize, up_to_iso: bool) -> Result<Vec<Graph>> {
    if n > 6 {
        return Err(Error::budget("graph enumeration vertices", n as u64, 6));
    }
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| (i + 1..n as u32).map(move |j| (i, j)))
        .collect();
    let mut out: Vec<Graph> = vec![];
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(n, edges)?;
        if up_to_iso {
            let mut fresh = true;
            for seen in &out {
                if are_isomorphic(seen, &g)? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                out.push(g);
            }
        } else {
            out.push(g);
        }
    }
    Ok(out)
}

/// Enumerates all combinatorial trees on exactly `n` vertices up to
/// isomorphism, by growing a leaf at every vertex of every smaller tree and
/// discarding isomorphic duplicates.
pub fn enumerate_trees_up_to_iso(n: usize) -> Result<Vec<Graph>> {
    if n > 9 {
        return Err(Error::budget("tree enumeration vertices", n as u64, 9));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut level = vec![Graph::empty(1)];
    for size in 1..n {
        let mut next: Vec<Graph> = vec![];
        for tree in &level {
            for attach in 0..size as u32 {
                let mut edges = tree.edges().to_vec();
                edges.push((attach, size as u32));
                let candidate = Graph::new(size + 1, edges)?;
                let mut fresh = true;
                for seen in &next {
                    if are_isomorphic(seen, &candidate)? {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    next.push(candidate);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_is_embedding() {
        for g in [Graph::path(3), Graph::complete(4), Graph::empty(2)] {
            let id = VertexMap::identity(g.n());
            assert!(is_embedding(&g, &g, &id).unwrap());
        }
    }

    #[test]
    fn path_into_triangle_via_0_1_2_is_not_induced() {
        let p = Graph::path(3);
        let k3 = Graph::complete(3);
        let m = VertexMap { map: vec![0, 1, 2] };
        // Non-edge {0,2} of the path lands on an edge of the triangle.
        assert!(!is_embedding(&p, &k3, &m).unwrap());
    }

    #[test]
    fn single_edge_into_path() {
        let e = Graph::path(2);
        let p = Graph::path(3);
        let m = VertexMap { map: vec![0, 1] };
        assert!(is_embedding(&e, &p, &m).unwrap());
    }

    #[test]
    fn out_of_range_image_is_malformed() {
        let e = Graph::path(2);
        let m = VertexMap { map: vec![0, 7] };
        assert!(matches!(
            is_embedding(&e, &e, &m),
            Err(Error::MalformedMap(_))
        ));
    }

    #[test]
    fn empty_graph_embeds_with_empty_map() {
        let g = Graph::empty(0);
        let h = Graph::path(3);
        let w = find_embedding(&g, &h).unwrap().unwrap();
        assert!(w.map.is_empty());
    }

    #[test]
    fn triangle_does_not_embed_into_path() {
        let k3 = Graph::complete(3);
        let p = Graph::path(5);
        assert!(find_embedding(&k3, &p).unwrap().is_none());
    }

    #[test]
    fn path_embeds_into_star_through_center() {
        // The two path endpoints must be non-adjacent and share a neighbor,
        // so the center takes the midpoint. Lex-least witness: (1, 0, 2).
        let p = Graph::path(3);
        let star = Graph::star(3);
        let w = find_embedding(&p, &star).unwrap().unwrap();
        assert_eq!(w.map, vec![1, 0, 2]);
        assert!(is_embedding(&p, &star, &w).unwrap());
    }

    #[test]
    fn embedding_witnesses_are_sound_and_lex_least() {
        let corpus = enumerate_graphs(3, false).unwrap();
        for g in &corpus {
            for h in &corpus {
                if let Some(w) = find_embedding(g, h).unwrap() {
                    assert!(is_embedding(g, h, &w).unwrap());
                }
            }
        }
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphisms(&Graph::empty(3)).unwrap().order, 6);
        assert_eq!(automorphisms(&Graph::path(3)).unwrap().order, 2);
        assert_eq!(automorphisms(&Graph::cycle(4)).unwrap().order, 8);
    }

    #[test]
    fn automorphism_order_matches_naive_enumeration_up_to_6() {
        for n in 0..=4 {
            for g in enumerate_graphs(n, true).unwrap() {
                assert_eq!(
                    automorphisms(&g).unwrap().order,
                    automorphism_count_naive(&g),
                    "graph {:?}",
                    g.edges()
                );
            }
        }
        // Some structured 5- and 6-vertex instances.
        for g in [
            Graph::cycle(5),
            Graph::cycle(6),
            Graph::star(5),
            Graph::path(6),
        ] {
            assert_eq!(
                automorphisms(&g).unwrap().order,
                automorphism_count_naive(&g)
            );
        }
    }

    #[test]
    fn rigid_graph_has_trivial_group() {
        // Smallest asymmetric graph: 6 vertices.
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5)]).unwrap();
        let aut = automorphisms(&g).unwrap();
        assert_eq!(aut.order, 1);
        assert!(aut.generators.is_empty());
    }

    #[test]
    fn epimorphism_identity_and_cardinality() {
        let k3 = Graph::complete(3);
        let w = find_epimorphism(&k3, &k3).unwrap().unwrap();
        assert!(is_epimorphism(&k3, &k3, &w).unwrap());
        let e = Graph::path(2);
        // Edges of the triangle would need a proper 2-coloring; none exists.
        assert!(find_epimorphism(&e, &k3).unwrap().is_none());
        // A path folds onto an edge by alternating endpoints.
        let w = find_epimorphism(&e, &Graph::path(3)).unwrap().unwrap();
        assert!(is_epimorphism(&e, &Graph::path(3), &w).unwrap());
        // An edge cannot cover a triangle.
        assert!(find_epimorphism(&k3, &e).unwrap().is_none());
    }

    #[test]
    fn graph_json_round_trip_is_canonical() {
        let g = Graph::new(4, vec![(3, 1), (0, 2), (1, 0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":4,"edges":[[0,1],[0,2],[1,3]]}"#);
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn embeddability_is_transitive_on_small_corpus() {
        let corpus = enumerate_graphs(3, false).unwrap();
        for a in &corpus {
            for b in &corpus {
                let ab = find_embedding(a, b).unwrap();
                if ab.is_none() {
                    continue;
                }
                for c in &corpus {
                    if let Some(bc) = find_embedding(b, c).unwrap() {
                        let comp = ab.as_ref().unwrap().compose(&bc);
                        assert!(is_embedding(a, c, &comp).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn unlabeled_tree_counts() {
        // Unlabeled tree counts for 1..=8 vertices.
        let expected = [1usize, 1, 1, 2, 3, 6, 11, 23];
        for (n, &want) in expected.iter().enumerate() {
            assert_eq!(enumerate_trees_up_to_iso(n + 1).unwrap().len(), want, "n = {}", n + 1);
        }
    }

    #[test]
    fn isomorphism_agrees_with_edge_structure() {
        let c6 = Graph::cycle(6);
        let mut two_triangles = vec![(0u32, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
        two_triangles.sort_unstable();
        let tt = Graph::new(6, two_triangles).unwrap();
        assert!(!are_isomorphic(&c6, &tt).unwrap());
        let relabeled =
            Graph::new(6, vec![(5, 0), (0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert!(are_isomorphic(&c6, &relabeled).unwrap());
    }
}
