//! Graph-induced polyhedral norms on rational vectors, with exact
//! arithmetic throughout: evaluation, the sandwich bound against the sup
//! norm, strongly-extreme-point certificates decided by exact linear
//! programming over the constraint polytope, signed isometric embeddings,
//! and the finite probe structure with its extension predicate.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexMap};
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_from_string(s: &str) -> Result<Q> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let num: i64 = n
        .parse()
        .map_err(|_| Error::InvalidInstance(format!("bad numerator {n:?}")))?;
    let den: i64 = d
        .parse()
        .map_err(|_| Error::InvalidInstance(format!("bad denominator {d:?}")))?;
    if den == 0 {
        return Err(Error::InvalidInstance("zero denominator".into()));
    }
    Ok(q(num, den))
}

pub fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Vectors as arrays of `num/den` strings.
pub fn parse_vector(strings: &[String]) -> Result<Vec<Q>> {
    strings.iter().map(|s| q_from_string(s)).collect()
}

/// The polyhedral norm induced by a graph on vectors of its dimension:
/// the maximum over ordered vertex pairs of `|v_i| + |v_j| / (3 - chi(i,j))`
/// where `chi` is the adjacency indicator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNorm {
    pub graph: Graph,
}

impl GraphNorm {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.n() < 2 {
            return Err(Error::Precondition(
                "norm needs dimension at least two".into(),
            ));
        }
        Ok(GraphNorm { graph })
    }

    pub fn dim(&self) -> usize {
        self.graph.n()
    }

    fn weight(&self, i: u32, j: u32) -> Q {
        // 1 / (3 - chi(i,j)).
        if self.graph.has_edge(i, j) {
            q(1, 2)
        } else {
            q(1, 3)
        }
    }

    pub fn norm(&self, v: &[Q]) -> Result<Q> {
        if v.len() != self.dim() {
            return Err(Error::Precondition(format!(
                "vector has dimension {}, norm has {}",
                v.len(),
                self.dim()
            )));
        }
        let mut best = Q::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i == j {
                    continue;
                }
                let val = v[i].abs() + v[j].abs() * self.weight(i as u32, j as u32);
                best = best.max(val);
            }
        }
        Ok(best)
    }

    pub fn sup_norm(v: &[Q]) -> Q {
        v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
    }

    /// The two-sided comparison with the sup norm, exact.
    pub fn sandwich_check(&self, v: &[Q]) -> Result<bool> {
        let g = self.norm(v)?;
        let s = Self::sup_norm(v);
        Ok(s <= g && g <= q(3, 2) * s)
    }
}

// ---------------------------------------------------------------------------
// Exact simplex
// ---------------------------------------------------------------------------

/// Maximizes `c . x` over `A x <= b, x >= 0` with `b >= 0`, by the primal
/// simplex method with Bland's rule. Returns the optimum and the number of
/// bases visited. Exact rational arithmetic; panics on unbounded problems
/// (the callers only build bounded polytopes).
fn lp_max(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> (Q, u64) {
    let m = a.len();
    let n = c.len();
    // Tableau rows: [A | I | b]; cost row holds reduced costs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        for k in 0..m {
            row.push(if k == i { Q::one() } else { Q::zero() });
        }
        row.push(b[i].clone());
        t.push(row);
    }
    let mut cost: Vec<Q> = c.to_vec();
    cost.extend(std::iter::repeat_with(Q::zero).take(m + 1));
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut bases = 1u64;
    loop {
        // Bland: least-index column with positive reduced cost.
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_positive()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cur = &t[l][width - 1] / &t[l][enter];
                        let cand = &t[i][width - 1] / &t[i][enter];
                        cand < cur || (cand == cur && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("bounded polytope");
        let pivot = t[leave][enter].clone();
        for x in t[leave].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..m {
            if i != leave && !t[i][enter].is_zero() {
                let factor = t[i][enter].clone();
                for k in 0..width {
                    let delta = &factor * &t[leave][k];
                    t[i][k] -= delta;
                }
            }
        }
        if !cost[enter].is_zero() {
            let factor = cost[enter].clone();
            for k in 0..width {
                let delta = &factor * &t[leave][k];
                cost[k] -= delta;
            }
        }
        basis[leave] = enter;
        bases += 1;
    }
    // cost[width-1] now holds -optimum.
    (-cost[width - 1].clone(), bases)
}

/// Certificate that a signed basis vector is a strongly extreme point of the
/// unit ball: with `delta = epsilon / 18`, every pair of ball vectors whose
/// midpoint lies within `delta` of the point stays within `epsilon` of each
/// other. Decided by exact maximization of every norm functional of the
/// difference over the constraint polytope; optima of linear programs sit on
/// polytope vertices, so the implication is decided on vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremeCertificate {
    pub vertex: u32,
    pub epsilon: String,
    pub delta: String,
    pub valid: bool,
    /// Exact maximum of the difference norm over the constraint polytope;
    /// absent when the diameter shortcut applies.
    pub worst_case: Option<String>,
    pub bases_examined: u64,
    pub diameter_shortcut: bool,
}

impl GraphNorm {
    /// Rows of `|x_a| + |x_b|/(3 - chi) <= rhs` expanded over sign choices,
    /// with `x` offset by `shift` and scaled by `scale` into the LP columns
    /// `cols` (split into positive and negative parts).
    #[allow(clippy::too_many_arguments)]
    fn push_abs_rows(
        &self,
        a: &mut Vec<Vec<Q>>,
        b: &mut Vec<Q>,
        ncols: usize,
        col_pos: &dyn Fn(usize) -> usize,
        col_neg: &dyn Fn(usize) -> usize,
        scale: &Q,
        shift: &[Q],
        rhs: &Q,
    ) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = self.weight(i as u32, j as u32);
                for si in [1i64, -1] {
                    for sj in [1i64, -1] {
                        let ci = Q::from_integer(BigInt::from(si)) * scale;
                        let cj = Q::from_integer(BigInt::from(sj)) * scale * &w;
                        let mut row = vec![Q::zero(); ncols];
                        row[col_pos(i)] = ci.clone();
                        row[col_neg(i)] = -ci.clone();
                        row[col_pos(j)] += cj.clone();
                        row[col_neg(j)] -= cj.clone();
                        let constant = Q::from_integer(BigInt::from(si)) * &shift[i]
                            + Q::from_integer(BigInt::from(sj)) * &w * &shift[j];
                        a.push(row);
                        b.push(rhs - constant);
                    }
                }
            }
        }
    }

    pub fn strongly_extreme_certificate(&self, p: u32, epsilon: &Q) -> Result<ExtremeCertificate> {
        if !epsilon.is_positive() {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        if p as usize >= self.dim() {
            return Err(Error::Precondition("vertex out of range".into()));
        }
        let delta = epsilon / Q::from_integer(BigInt::from(18));
        // Ball diameter bound: both vectors have sup norm at most one, so
        // their difference has norm at most 3.
        if *epsilon >= Q::from_integer(BigInt::from(3)) {
            return Ok(ExtremeCertificate {
                vertex: p,
                epsilon: q_to_string(epsilon),
                delta: q_to_string(&delta),
                valid: true,
                worst_case: None,
                bases_examined: 0,
                diameter_shortcut: true,
            });
        }
        let n = self.dim();
        // Columns: u+, u-, w+, w- for u = y - e_p, w = z - e_p.
        let ncols = 4 * n;
        let up = |i: usize| i;
        let un = |i: usize| n + i;
        let wp = |i: usize| 2 * n + i;
        let wn = |i: usize| 3 * n + i;
        let e_p: Vec<Q> = (0..n)
            .map(|i| if i == p as usize { Q::one() } else { Q::zero() })
            .collect();
        let zero_shift = vec![Q::zero(); n];

        let mut a: Vec<Vec<Q>> = vec![];
        let mut b: Vec<Q> = vec![];
        // y in the unit ball: |(u + e_p)| rows.
        self.push_abs_rows(&mut a, &mut b, ncols, &up, &un, &Q::one(), &e_p, &Q::one());
        // z in the unit ball.
        self.push_abs_rows(&mut a, &mut b, ncols, &wp, &wn, &Q::one(), &e_p, &Q::one());
        // Midpoint within delta of e_p: rows on -(u + w)/2. The same signed
        // row set covers both halves, so scale u by -1/2 and add w via a
        // second pass sharing rows; build explicitly instead.
        let half = q(-1, 2);
        {
            let n_ = n;
            for i in 0..n_ {
                for j in 0..n_ {
                    if i == j {
                        continue;
                    }
                    let w = self.weight(i as u32, j as u32);
                    for si in [1i64, -1] {
                        for sj in [1i64, -1] {
                            let ci = Q::from_integer(BigInt::from(si)) * &half;
                            let cj = Q::from_integer(BigInt::from(sj)) * &half * &w;
                            let mut row = vec![Q::zero(); ncols];
                            row[up(i)] = ci.clone();
                            row[un(i)] = -ci.clone();
                            row[wp(i)] += ci.clone();
                            row[wn(i)] -= ci.clone();
                            row[up(j)] += cj.clone();
                            row[un(j)] -= cj.clone();
                            row[wp(j)] += cj.clone();
                            row[wn(j)] -= cj.clone();
                            a.push(row);
                            b.push(delta.clone());
                        }
                    }
                }
            }
        }
        let _ = zero_shift;

        // Objectives: the norm functionals of y - z = u - w, reduced by the
        // sign symmetries of the polytope: flipping any coordinate other
        // than p (in both vectors and the midpoint) and swapping the two
        // vectors leave it invariant, so only the sign on coordinate p
        // matters.
        let mut objectives: Vec<(usize, usize, i64, i64)> = vec![];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                objectives.push((i, j, 1, 1));
                if i == p as usize {
                    objectives.push((i, j, -1, 1));
                } else if j == p as usize {
                    objectives.push((i, j, 1, -1));
                }
            }
        }

        let mut worst = Q::zero();
        let mut bases = 0u64;
        for (i, j, si, sj) in objectives {
            let w = self.weight(i as u32, j as u32);
            let mut c = vec![Q::zero(); ncols];
            let ci = Q::from_integer(BigInt::from(si));
            let cj = Q::from_integer(BigInt::from(sj)) * &w;
            c[up(i)] = ci.clone();
            c[un(i)] = -ci.clone();
            c[wp(i)] = -ci.clone();
            c[wn(i)] = ci.clone();
            c[up(j)] += cj.clone();
            c[un(j)] -= cj.clone();
            c[wp(j)] -= cj.clone();
            c[wn(j)] += cj.clone();
            let (opt, visited) = lp_max(&a, &b, &c);
            bases += visited;
            worst = worst.max(opt);
        }
        Ok(ExtremeCertificate {
            vertex: p,
            epsilon: q_to_string(epsilon),
            delta: q_to_string(&delta),
            valid: worst <= *epsilon,
            worst_case: Some(q_to_string(&worst)),
            bases_examined: bases,
            diameter_shortcut: false,
        })
    }

    /// Vertices of the unit ball polytope, by basis enumeration in low
    /// dimensions. Exposes the vertices other than the signed basis vectors.
    pub fn unit_ball_vertices(&self) -> Result<Vec<Vec<Q>>> {
        let n = self.dim();
        if n > 4 {
            return Err(Error::budget(
                "ball vertex enumeration dimension",
                n as u64,
                4,
            ));
        }
        // Facets: s_i x_i + s_j x_j / (3 - chi) = 1.
        let mut facets: Vec<Vec<Q>> = vec![];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = self.weight(i as u32, j as u32);
                for si in [1i64, -1] {
                    for sj in [1i64, -1] {
                        let mut row = vec![Q::zero(); n];
                        row[i] = Q::from_integer(BigInt::from(si));
                        row[j] += Q::from_integer(BigInt::from(sj)) * &w;
                        facets.push(row);
                    }
                }
            }
        }
        let mut vertices: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut out: Vec<Vec<Q>> = vec![];
        let mut choice = vec![0usize; n];
        fn combos(
            k: usize,
            lo: usize,
            m: usize,
            choice: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if k == choice.len() {
                f(choice);
                return;
            }
            for v in lo..m {
                choice[k] = v;
                combos(k + 1, v + 1, m, choice, f);
            }
        }
        let mut visit = |rows: &[usize]| {
            // Solve the n x n system rows . x = 1 by Gaussian elimination.
            let mut mat: Vec<Vec<Q>> = rows
                .iter()
                .map(|&r| {
                    let mut row = facets[r].clone();
                    row.push(Q::one());
                    row
                })
                .collect();
            let mut piv_cols = vec![];
            for col in 0..n {
                let Some(r) = (piv_cols.len()..n).find(|&r| !mat[r][col].is_zero()) else {
                    continue;
                };
                mat.swap(piv_cols.len(), r);
                let inv = mat[piv_cols.len()][col].clone();
                for x in mat[piv_cols.len()].iter_mut() {
                    *x /= &inv;
                }
                for r2 in 0..n {
                    if r2 != piv_cols.len() && !mat[r2][col].is_zero() {
                        let f = mat[r2][col].clone();
                        for k in 0..=n {
                            let delta = &f * &mat[piv_cols.len()][k];
                            mat[r2][k] -= delta;
                        }
                    }
                }
                piv_cols.push(col);
                if piv_cols.len() == n {
                    break;
                }
            }
            if piv_cols.len() < n {
                return;
            }
            let mut x = vec![Q::zero(); n];
            for (r, &col) in piv_cols.iter().enumerate() {
                x[col] = mat[r][n].clone();
            }
            // Feasibility in every facet.
            let feasible = facets
                .iter()
                .all(|f| f.iter().zip(&x).map(|(a, b)| a * b).sum::<Q>() <= Q::one());
            if feasible {
                let key: Vec<String> = x.iter().map(q_to_string).collect();
                if vertices.insert(key) {
                    out.push(x);
                }
            }
        };
        combos(0, 0, facets.len(), &mut choice, &mut visit);
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Signed isometric embeddings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignedMap {
    pub map: Vec<u32>,
    pub signs: Vec<i8>,
}

/// Searches for an injective vertex map plus signs whose induced linear map
/// preserves the norm on the probe set of basis vectors and signed pairs.
/// By the pair-norm identity this is exactly adjacency-indicator
/// preservation, so a witness exists precisely when the source graph embeds
/// into the target as an induced subgraph; the probe equalities are still
/// validated explicitly.
pub fn signed_isometric_embedding(ng: &GraphNorm, nh: &GraphNorm) -> Result<Option<SignedMap>> {
    if ng.dim() > nh.dim() {
        return Err(Error::Precondition(
            "source dimension exceeds target dimension".into(),
        ));
    }
    let Some(VertexMap { map }) = crate::graph::find_embedding(&ng.graph, &nh.graph)? else {
        return Ok(None);
    };
    let signs = vec![1i8; ng.dim()];
    let w = SignedMap { map, signs };
    debug_assert!(validate_signed_map(ng, nh, &w)?);
    Ok(Some(w))
}

/// Probe-set validation of a signed map: basis vectors and signed pairs keep
/// their norms under the induced linear map.
pub fn validate_signed_map(ng: &GraphNorm, nh: &GraphNorm, w: &SignedMap) -> Result<bool> {
    if w.map.len() != ng.dim() || w.signs.len() != ng.dim() {
        return Err(Error::MalformedMap("signed map has wrong length".into()));
    }
    let mut seen = BTreeSet::new();
    if !w
        .map
        .iter()
        .all(|&v| (v as usize) < nh.dim() && seen.insert(v))
    {
        return Err(Error::MalformedMap("signed map is not injective".into()));
    }
    let apply = |v: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero(); nh.dim()];
        for (i, x) in v.iter().enumerate() {
            let signed = x * Q::from_integer(BigInt::from(w.signs[i] as i64));
            out[w.map[i] as usize] = signed;
        }
        out
    };
    for pp in 0..ng.dim() {
        let mut e = vec![Q::zero(); ng.dim()];
        e[pp] = Q::one();
        if ng.norm(&e)? != nh.norm(&apply(&e))? {
            return Ok(false);
        }
        for qq in 0..ng.dim() {
            if pp == qq {
                continue;
            }
            for (sp, sq) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![Q::zero(); ng.dim()];
                v[pp] = Q::from_integer(BigInt::from(sp));
                v[qq] = Q::from_integer(BigInt::from(sq));
                if ng.norm(&v)? != nh.norm(&apply(&v))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// The probe structure
// ---------------------------------------------------------------------------

/// Small exact rationals for probe values; every probe norm has a tiny
/// denominator, so machine rationals are exact here.
pub type Rat64 = num::rational::Ratio<i64>;

fn r64(n: i64, d: i64) -> Rat64 {
    num::rational::Ratio::new(n, d)
}

/// The finite structure of a norm instance over the signed basis vectors
/// `f_{2p} = e_p`, `f_{2p+1} = -e_p`: threshold relations over coefficient
/// tuples of length at most three with entries in `{0, +-1, +-1/2}` (zero
/// entries reduce to shorter tuples), and the opposite-pair relation.
#[derive(Debug, Clone)]
pub struct NormStructure {
    pub norm: GraphNorm,
    pub points: usize,
    pub coefficients: Vec<Rat64>,
    pub thresholds: Vec<Rat64>,
    /// Cached unit-coefficient pair values, the search work-horse.
    pair_values: Vec<Rat64>,
}

pub fn build_norm_structure(norm: &GraphNorm) -> Result<NormStructure> {
    let points = 2 * norm.dim();
    if points > 40 {
        return Err(Error::budget("norm structure points", points as u64, 40));
    }
    let coefficients = vec![r64(1, 1), r64(-1, 1), r64(1, 2), r64(-1, 2)];
    let mut s = NormStructure {
        norm: norm.clone(),
        points,
        coefficients,
        thresholds: vec![],
        pair_values: vec![],
    };
    let one = [r64(1, 1), r64(1, 1)];
    s.pair_values = (0..points * points)
        .map(|i| s.eval(&one, &[i / points, i % points]))
        .collect();
    // Realized values over all probe tuples, then midpoints and a top.
    let mut values: BTreeSet<Rat64> = BTreeSet::new();
    s.for_each_probe(&mut |_alpha, _ks, val| {
        values.insert(val);
    });
    let vals: Vec<Rat64> = values.into_iter().collect();
    let mut thresholds = BTreeSet::new();
    for w in vals.windows(2) {
        thresholds.insert((w[0] + w[1]) / 2);
    }
    for v in &vals {
        if *v > Rat64::zero() {
            thresholds.insert(*v);
        }
    }
    thresholds.insert(vals.last().copied().unwrap_or_else(Rat64::zero) + Rat64::one());
    s.thresholds = thresholds.into_iter().collect();
    Ok(s)
}

impl NormStructure {
    pub fn point_vector(&self, k: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.norm.dim()];
        v[k / 2] = if k % 2 == 0 { Q::one() } else { -Q::one() };
        v
    }

    /// The opposite-pair relation.
    pub fn opposite(&self, k1: usize, k2: usize) -> bool {
        k1 / 2 == k2 / 2 && k1 != k2
    }

    pub fn eval(&self, alpha: &[Rat64], ks: &[usize]) -> Rat64 {
        let dim = self.norm.dim();
        let mut v = vec![Rat64::zero(); dim];
        for (a, &k) in alpha.iter().zip(ks) {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            v[k / 2] += *a * sign;
        }
        let mut best = Rat64::zero();
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let w = if self.norm.graph.has_edge(i as u32, j as u32) {
                    r64(1, 2)
                } else {
                    r64(1, 3)
                };
                let term = num::Signed::abs(&v[i]) + num::Signed::abs(&v[j]) * w;
                best = best.max(term);
            }
        }
        best
    }

    /// Threshold relation: the combination's norm lies strictly below `thr`.
    pub fn rel(&self, alpha: &[Rat64], ks: &[usize], thr: &Rat64) -> bool {
        self.eval(alpha, ks) < *thr
    }

    #[inline]
    fn pair(&self, a: usize, b: usize) -> Rat64 {
        self.pair_values[a * self.points + b]
    }

    fn for_each_probe(&self, f: &mut dyn FnMut(&[Rat64], &[usize], Rat64)) {
        let coeffs = &self.coefficients;
        for len in 1..=3usize {
            let mut alpha_idx = vec![0usize; len];
            loop {
                let alpha: Vec<Rat64> = alpha_idx.iter().map(|&i| coeffs[i]).collect();
                let mut ks = vec![0usize; len];
                loop {
                    let val = self.eval(&alpha, &ks);
                    f(&alpha, &ks, val);
                    let mut pos = 0;
                    loop {
                        if pos == len {
                            break;
                        }
                        ks[pos] += 1;
                        if ks[pos] < self.points {
                            break;
                        }
                        ks[pos] = 0;
                        pos += 1;
                    }
                    if pos == len {
                        break;
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == len {
                        break;
                    }
                    alpha_idx[pos] += 1;
                    if alpha_idx[pos] < coeffs.len() {
                        break;
                    }
                    alpha_idx[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
    }

    /// Whether a permutation of the points preserves every probe relation.
    pub fn preserves_probes(&self, perm: &[usize]) -> bool {
        let mut ok = true;
        let mut check = |alpha: &[Rat64], ks: &[usize], val: Rat64| {
            if !ok {
                return;
            }
            let image: Vec<usize> = ks.iter().map(|&k| perm[k]).collect();
            if self.eval(alpha, &image) != val {
                ok = false;
            }
        };
        self.for_each_probe(&mut check);
        ok
    }
}

/// The extension criterion: an injective sequence over the point indices
/// extends to a structure automorphism exactly when every entry is either
/// fixed or sent to its opposite.
pub fn can_extend_norm_auto(s: &NormStructure, seq: &[usize]) -> Result<bool> {
    if seq.iter().any(|&k| k >= s.points) {
        return Err(Error::Precondition("sequence entry out of range".into()));
    }
    let mut seen = BTreeSet::new();
    if !seq.iter().all(|&k| seen.insert(k)) {
        return Err(Error::Precondition("sequence must be injective".into()));
    }
    Ok(seq
        .iter()
        .enumerate()
        .all(|(i, &k)| k == i || s.opposite(k, i)))
}

/// Brute-force oracle: backtracking search for a probe-preserving
/// permutation extending the sequence, pruned by the cached pair values and
/// verified in full at every leaf.
pub fn can_extend_norm_auto_brute(s: &NormStructure, seq: &[usize]) -> bool {
    fn rec(s: &NormStructure, assign: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let k = assign.len();
        if k == s.points {
            return s.preserves_probes(assign);
        }
        'cand: for v in 0..s.points {
            if used[v] {
                continue;
            }
            if s.pair(k, k) != s.pair(v, v) {
                continue;
            }
            for (x, &vx) in assign.iter().enumerate() {
                if s.pair(x, k) != s.pair(vx, v) || s.pair(k, x) != s.pair(v, vx) {
                    continue 'cand;
                }
            }
            assign.push(v);
            used[v] = true;
            if rec(s, assign, used) {
                return true;
            }
            assign.pop();
            used[v] = false;
        }
        false
    }
    let mut used = vec![false; s.points];
    for &v in seq {
        used[v] = true;
    }
    rec(s, &mut seq.to_vec(), &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_norm() -> GraphNorm {
        GraphNorm::new(Graph::path(2)).unwrap()
    }

    fn basis(n: usize, p: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); n];
        v[p] = Q::one();
        v
    }

    #[test]
    fn basis_vectors_have_norm_one() {
        let n = GraphNorm::new(Graph::path(3)).unwrap();
        for p in 0..3 {
            assert_eq!(n.norm(&basis(3, p)).unwrap(), Q::one());
        }
    }

    #[test]
    fn pair_norms_read_adjacency() {
        let n = GraphNorm::new(Graph::path(3)).unwrap();
        let mut v = basis(3, 0);
        v[1] = Q::one();
        assert_eq!(n.norm(&v).unwrap(), q(3, 2));
        let mut w = basis(3, 0);
        w[2] = -Q::one();
        assert_eq!(n.norm(&w).unwrap(), q(4, 3));
    }

    #[test]
    fn all_ones_on_edgeless_triple() {
        let n = GraphNorm::new(Graph::empty(3)).unwrap();
        let v = vec![Q::one(), Q::one(), Q::one()];
        assert_eq!(n.norm(&v).unwrap(), q(4, 3));
    }

    #[test]
    fn sandwich_holds_on_assorted_vectors() {
        let n = GraphNorm::new(Graph::path(4)).unwrap();
        for v in [
            vec![Q::zero(); 4],
            vec![q(1, 1), q(-2, 3), q(1, 7), q(0, 1)],
            vec![q(5, 2), q(5, 2), q(5, 2), q(5, 2)],
        ] {
            assert!(n.sandwich_check(&v).unwrap());
        }
    }

    #[test]
    fn extreme_certificate_small_epsilon() {
        let n = edge_norm();
        let eps = q(1, 2);
        let cert = n.strongly_extreme_certificate(0, &eps).unwrap();
        assert!(cert.valid, "worst case {:?}", cert.worst_case);
        assert!(!cert.diameter_shortcut);
        assert_eq!(cert.delta, "1/36");
    }

    #[test]
    fn extreme_certificate_huge_epsilon_uses_diameter() {
        let n = edge_norm();
        let cert = n.strongly_extreme_certificate(1, &q(4, 1)).unwrap();
        assert!(cert.valid && cert.diameter_shortcut);
    }

    #[test]
    fn ball_vertices_in_dimension_two() {
        let n = edge_norm();
        let mut vs = n.unit_ball_vertices().unwrap();
        vs.sort_by_key(|v| format!("{v:?}"));
        assert_eq!(vs.len(), 8);
        // Signed basis vectors plus the four diagonal vertices at 2/3.
        let diag = vs
            .iter()
            .filter(|v| v.iter().all(|x| x.abs() == q(2, 3)))
            .count();
        assert_eq!(diag, 4);
    }

    #[test]
    fn signed_embedding_matches_graph_embedding() {
        let e = GraphNorm::new(Graph::path(2)).unwrap();
        let pair = GraphNorm::new(Graph::empty(2)).unwrap();
        assert!(signed_isometric_embedding(&e, &pair).unwrap().is_none());
        let tri = GraphNorm::new(Graph::complete(3)).unwrap();
        let w = signed_isometric_embedding(&e, &tri).unwrap().unwrap();
        assert!(validate_signed_map(&e, &tri, &w).unwrap());
    }

    #[test]
    fn norm_structure_unit_relations() {
        let s = build_norm_structure(&edge_norm()).unwrap();
        // ||e_0|| = 1: the threshold relation holds iff the threshold is
        // above one.
        assert!(!s.rel(&[r64(1, 1)], &[0], &r64(1, 1)));
        assert!(s.rel(&[r64(1, 1)], &[0], &r64(9, 8)));
        // Pair value 3/2 for the edge: not strictly below 3/2.
        assert!(!s.rel(&[r64(1, 1), r64(1, 1)], &[0, 2], &r64(3, 2)));
        assert!(s.opposite(0, 1));
        assert!(!s.opposite(0, 2));
    }

    #[test]
    fn extension_criterion_matches_brute_force_on_rigid_instance() {
        // Smallest asymmetric graph; the probe structure's automorphisms are
        // exactly the sign flips.
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5)]).unwrap();
        assert_eq!(crate::graph::automorphisms(&g).unwrap().order, 1);
        let s = build_norm_structure(&GraphNorm::new(g).unwrap()).unwrap();
        for seq in [
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![1, 0],
            vec![2, 3],
        ] {
            let fast = can_extend_norm_auto(&s, &seq).unwrap();
            let brute = can_extend_norm_auto_brute(&s, &seq);
            assert_eq!(fast, brute, "sequence {seq:?}");
        }
    }

    #[test]
    fn sign_flip_extends_but_cross_moves_do_not() {
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4), (4, 5)]).unwrap();
        let s = build_norm_structure(&GraphNorm::new(g).unwrap()).unwrap();
        assert!(can_extend_norm_auto(&s, &[1]).unwrap());
        assert!(!can_extend_norm_auto(&s, &[2]).unwrap());
    }
}
