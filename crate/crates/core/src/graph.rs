//! Shapes, graph matrices over normalized edge variables, and vertex
//! separators.
//!
//! Edge variables of the complete graph on `n` vertices are indexed by the
//! lexicographic order of pairs `{i < j}`. Rows and columns of a graph matrix
//! are ordered injective tuples in lexicographic order.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bounds::{check_t, BoundReport, BoundTerm, Normalization, Theorem};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polymatrix::PolyMatrix;
use crate::sampling::{
    estimate_with, sample_values, DecouplingMode, DecouplingResult, MomentEstimate, Quantity,
    SampleConfig, PURPOSE_COUPLED, PURPOSE_DECOUPLED, PURPOSE_GRAPH,
};

/// Largest shape handled by the exhaustive separator searches.
pub const MAX_SEARCH_VERTICES: usize = 16;
/// Largest boundary tuple length for matrix construction.
pub const MAX_BOUNDARY: usize = 2;
/// Cap on `terms × rows × cols` for [`to_polymatrix`].
pub const POLY_ENTRY_CAP: usize = 50_000_000;

/// A shape with 0-based vertices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    k: usize,
    edges: Vec<(usize, usize)>,
    u: Vec<usize>,
    v: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeDoc {
    k: usize,
    edges: Vec<[usize; 2]>,
    #[serde(rename = "U")]
    u: Vec<usize>,
    #[serde(rename = "V")]
    v: Vec<usize>,
}

fn distinct(xs: &[usize]) -> bool {
    xs.iter().all_unique()
}

impl Shape {
    /// Builds a shape from 0-based data.
    pub fn new(k: usize, edges: Vec<(usize, usize)>, u: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("a shape needs at least one vertex".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (pos, &(a, b)) in edges.iter().enumerate() {
            if a >= k || b >= k {
                return Err(Error::schema(
                    Some(pos),
                    format!("edge ({a}, {b}) leaves 0..{k}"),
                ));
            }
            if a == b {
                return Err(Error::schema(Some(pos), "self-loop"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::schema(Some(pos), "duplicate edge"));
            }
        }
        for (name, set) in [("U", &u), ("V", &v)] {
            if set.iter().any(|&x| x >= k) {
                return Err(Error::schema(
                    None,
                    format!("{name} has a vertex outside 0..{k}"),
                ));
            }
            if !distinct(set) {
                return Err(Error::schema(None, format!("{name} repeats a vertex")));
            }
        }
        Ok(Shape { k, edges, u, v })
    }

    pub fn parse(json: &str) -> Result<Self> {
        let doc: ShapeDoc =
            serde_json::from_str(json).map_err(|e| Error::schema(None, e.to_string()))?;
        let shift = |x: usize| {
            x.checked_sub(1)
                .ok_or_else(|| Error::schema(None, "vertices are numbered from 1"))
        };
        let edges = doc
            .edges
            .iter()
            .map(|[a, b]| Ok((shift(*a)?, shift(*b)?)))
            .collect::<Result<Vec<_>>>()?;
        let u = doc
            .u
            .iter()
            .map(|&x| shift(x))
            .collect::<Result<Vec<_>>>()?;
        let v = doc
            .v
            .iter()
            .map(|&x| shift(x))
            .collect::<Result<Vec<_>>>()?;
        Shape::new(doc.k, edges, u, v)
    }

    pub fn to_json(&self) -> String {
        let doc = ShapeDoc {
            k: self.k,
            edges: self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            u: self.u.iter().map(|x| x + 1).collect(),
            v: self.v.iter().map(|x| x + 1).collect(),
        };
        serde_json::to_string(&doc).expect("shape serializes")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn u(&self) -> &[usize] {
        &self.u
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    /// Isolated vertices outside `U ∪ V`.
    pub fn warnings(&self) -> Vec<String> {
        (0..self.k)
            .filter(|x| !self.u.contains(x) && !self.v.contains(x))
            .filter(|&x| self.edges.iter().all(|&(a, b)| a != x && b != x))
            .map(|x| format!("vertex {} is isolated and outside U and V", x + 1))
            .collect()
    }

    fn adjacency_masks(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.k];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    fn mask(set: &[usize]) -> u32 {
        set.iter().fold(0, |m, &x| m | (1 << x))
    }

    /// Whether deleting `s` leaves no path from `U` to `V`.
    pub fn separates(&self, s: &[usize]) -> bool {
        if self.k > 32 {
            return self.separates_slow(s);
        }
        let adj = self.adjacency_masks();
        separates_mask(
            &adj,
            Shape::mask(&self.u),
            Shape::mask(&self.v),
            Shape::mask(s),
        )
    }

    fn separates_slow(&self, s: &[usize]) -> bool {
        let mut seen = vec![false; self.k];
        let mut stack: Vec<usize> = self.u.iter().copied().filter(|x| !s.contains(x)).collect();
        while let Some(x) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            for &(a, b) in &self.edges {
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if !s.contains(&y) && !seen[y] {
                    stack.push(y);
                }
            }
        }
        !self.v.iter().any(|&x| seen[x])
    }

    /// Edges with at least one endpoint in `s`.
    pub fn edges_touching(&self, s: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| s.contains(a) || s.contains(b))
            .count()
    }

    /// Edges with both endpoints in `s`.
    pub fn edges_inside(&self, s: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| s.contains(a) && s.contains(b))
            .count()
    }

    fn check_search_size(&self) -> Result<()> {
        if self.k > MAX_SEARCH_VERTICES {
            return Err(Error::ResourceCap {
                what: "exhaustive separator search vertices".into(),
                required: self.k,
                cap: MAX_SEARCH_VERTICES,
            });
        }
        Ok(())
    }
}

fn separates_mask(adj: &[u32], u: u32, v: u32, s: u32) -> bool {
    let allowed = !s;
    let mut reached = u & allowed;
    loop {
        let mut next = reached;
        let mut bits = reached;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            next |= adj[x] & allowed;
        }
        if next == reached {
            break;
        }
        reached = next;
    }
    reached & v == 0
}

/// `C(n, 2)`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `{i, j}`, `i ≠ j`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut a = 0;
    while idx >= n - a - 1 {
        idx -= n - a - 1;
        a += 1;
    }
    (a, a + 1 + idx)
}

/// `n! / (n - m)!`.
pub fn falling(n: usize, m: usize) -> usize {
    (0..m).map(|j| n - j).product()
}

/// Position of an injective tuple among all injective `m`-tuples of `0..n`
/// in lexicographic order.
pub fn tuple_rank(n: usize, tuple: &[usize]) -> usize {
    let m = tuple.len();
    let mut rank = 0;
    for (j, &x) in tuple.iter().enumerate() {
        let smaller_unused = x - tuple[..j].iter().filter(|&&y| y < x).count();
        rank += smaller_unused * falling(n - j - 1, m - j - 1);
    }
    rank
}

fn check_build(shape: &Shape, n: usize) -> Result<()> {
    if n < shape.k {
        return Err(Error::param(format!(
            "n = {n} is smaller than the shape size {}",
            shape.k
        )));
    }
    let boundary = shape.u.len().max(shape.v.len());
    if boundary > MAX_BOUNDARY {
        return Err(Error::ResourceCap {
            what: "boundary tuple length".into(),
            required: boundary,
            cap: MAX_BOUNDARY,
        });
    }
    Ok(())
}

/// Calls `visit` with every injective map `0..k → 0..n`.
fn for_each_injection(k: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    fn go(phi: &mut Vec<usize>, used: &mut [bool], k: usize, visit: &mut dyn FnMut(&[usize])) {
        if phi.len() == k {
            visit(phi);
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                phi.push(x);
                go(phi, used, k, visit);
                phi.pop();
                used[x] = false;
            }
        }
    }
    let mut used = vec![false; n];
    go(&mut Vec::with_capacity(k), &mut used, k, &mut visit);
}

fn build_with(shape: &Shape, n: usize, weight: impl Fn(usize, usize) -> f64) -> Result<Matrix> {
    check_build(shape, n)?;
    let mut m = Matrix::zeros(falling(n, shape.u.len()), falling(n, shape.v.len()));
    let mut ut = vec![0; shape.u.len()];
    let mut vt = vec![0; shape.v.len()];
    for_each_injection(shape.k, n, |phi| {
        let w: f64 = shape
            .edges
            .iter()
            .enumerate()
            .map(|(l, &(a, b))| weight(l, pair_index(n, phi[a], phi[b])))
            .product();
        if w != 0.0 {
            for (slot, &x) in ut.iter_mut().zip(&shape.u) {
                *slot = phi[x];
            }
            for (slot, &x) in vt.iter_mut().zip(&shape.v) {
                *slot = phi[x];
            }
            m[(tuple_rank(n, &ut), tuple_rank(n, &vt))] += w;
        }
    });
    Ok(m)
}

fn check_edge_vector(n: usize, g: &[f64]) -> Result<()> {
    if g.len() != pair_count(n) {
        return Err(Error::Input(format!(
            "expected {} edge variables, got {}",
            pair_count(n),
            g.len()
        )));
    }
    Ok(())
}

/// `M[I, J] = Σ_{φ: φ(U)=I, φ(V)=J} Π_{(u,v)∈E} G_{φ(u)φ(v)}`.
pub fn build_graph_matrix(shape: &Shape, n: usize, g: &[f64]) -> Result<Matrix> {
    check_edge_vector(n, g)?;
    build_with(shape, n, |_, e| g[e])
}

/// As [`build_graph_matrix`], with edge `l` of the shape reading its variable
/// from `copies[l]`.
pub fn build_graph_matrix_decoupled(
    shape: &Shape,
    n: usize,
    copies: &[Vec<f64>],
) -> Result<Matrix> {
    if copies.len() != shape.edges.len() {
        return Err(Error::Input(format!(
            "expected {} copies, got {}",
            shape.edges.len(),
            copies.len()
        )));
    }
    for c in copies {
        check_edge_vector(n, c)?;
    }
    build_with(shape, n, |l, e| copies[l][e])
}

/// The graph matrix as a multilinear polynomial in the `C(n, 2)` edge
/// variables; each map `φ` contributes a unit-entry coefficient.
pub fn to_polymatrix(shape: &Shape, n: usize) -> Result<PolyMatrix> {
    check_build(shape, n)?;
    let (rows, cols) = (falling(n, shape.u.len()), falling(n, shape.v.len()));
    let maps = falling(n, shape.k);
    let entries = maps.saturating_mul(rows).saturating_mul(cols);
    if entries > POLY_ENTRY_CAP {
        return Err(Error::ResourceCap {
            what: "graph polynomial coefficient entries".into(),
            required: entries,
            cap: POLY_ENTRY_CAP,
        });
    }
    let mut terms = Vec::with_capacity(maps);
    for_each_injection(shape.k, n, |phi| {
        let key: Vec<usize> = shape
            .edges
            .iter()
            .map(|&(a, b)| pair_index(n, phi[a], phi[b]))
            .collect();
        let ut: Vec<usize> = shape.u.iter().map(|&x| phi[x]).collect();
        let vt: Vec<usize> = shape.v.iter().map(|&x| phi[x]).collect();
        terms.push((
            key,
            Matrix::unit(rows, cols, tuple_rank(n, &ut), tuple_rank(n, &vt)),
        ));
    });
    PolyMatrix::from_terms(pair_count(n).max(1), (rows, cols), true, terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorResult {
    /// 0-based vertices, ascending.
    pub separator: Vec<usize>,
    pub size: usize,
    /// Edges with an endpoint in the separator.
    pub adjacent_edges: usize,
}

impl SeparatorResult {
    fn new(shape: &Shape, separator: Vec<usize>) -> Self {
        SeparatorResult {
            size: separator.len(),
            adjacent_edges: shape.edges_touching(&separator),
            separator,
        }
    }
}

/// Minimum vertex separator, lexicographically least among the minimum ones.
pub fn min_vertex_separator(shape: &Shape) -> Result<SeparatorResult> {
    shape.check_search_size()?;
    let adj = shape.adjacency_masks();
    let (um, vm) = (Shape::mask(&shape.u), Shape::mask(&shape.v));
    for size in 0..=shape.k {
        for s in (0..shape.k).combinations(size) {
            if separates_mask(&adj, um, vm, Shape::mask(&s)) {
                debug_assert!(shape.separates_slow(&s));
                return Ok(SeparatorResult::new(shape, s));
            }
        }
    }
    unreachable!("the full vertex set always separates")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CoverOutcome {
    Separator(SeparatorResult),
    Refused {
        reason: String,
        /// Independent path search on the overlap set.
        bfs_separates: bool,
    },
}

fn edge_vertices(shape: &Shape, edges: &[usize]) -> Vec<usize> {
    let mut vs: Vec<usize> = edges
        .iter()
        .flat_map(|&e| [shape.edges[e].0, shape.edges[e].1])
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Overlap `V(E1) ∩ V(E2)` of an edge cover `E1 ∪ E2 = E`, given as indices
/// into `shape.edges()`. Refuses unless the overlap contains
/// `V(E1) ∩ V_τ` and `V(E2) ∩ U_τ`.
pub fn separator_from_cover(shape: &Shape, e1: &[usize], e2: &[usize]) -> Result<CoverOutcome> {
    let m = shape.edges.len();
    if let Some(&bad) = e1.iter().chain(e2).find(|&&e| e >= m) {
        return Err(Error::Input(format!("edge index {bad} out of range")));
    }
    if (0..m).any(|e| !e1.contains(&e) && !e2.contains(&e)) {
        return Err(Error::Input("E1 and E2 do not cover every edge".into()));
    }
    let (v1, v2) = (edge_vertices(shape, e1), edge_vertices(shape, e2));
    let s: Vec<usize> = v1.iter().copied().filter(|x| v2.contains(x)).collect();
    let bfs = shape.separates(&s);
    let missing_v: Vec<usize> = v1
        .iter()
        .copied()
        .filter(|x| shape.v.contains(x) && !s.contains(x))
        .collect();
    let missing_u: Vec<usize> = v2
        .iter()
        .copied()
        .filter(|x| shape.u.contains(x) && !s.contains(x))
        .collect();
    let one_based = |xs: &[usize]| xs.iter().map(|x| x + 1).collect::<Vec<_>>();
    if !missing_v.is_empty() || !missing_u.is_empty() {
        return Ok(CoverOutcome::Refused {
            reason: format!(
                "overlap misses V(E1)∩V at {:?} and V(E2)∩U at {:?}",
                one_based(&missing_v),
                one_based(&missing_u)
            ),
            bfs_separates: bfs,
        });
    }
    if !bfs {
        return Ok(CoverOutcome::Refused {
            reason: "overlap satisfies the containment test but a U-V path survives".into(),
            bfs_separates: false,
        });
    }
    Ok(CoverOutcome::Separator(SeparatorResult::new(shape, s)))
}

/// Logarithms of the factor groups of the shape bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeBound {
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub separator: SeparatorResult,
    /// `4t|V| ln(48t|V|) + |E| ln(C|E|) + |V| ln n`.
    pub log_combinatorial: f64,
    /// `4t |E(S)| ln √((1-p)/p)`.
    pub log_sparsity: f64,
    /// `2t (|V| − |S|) ln n`.
    pub log_dimension: f64,
    pub report: BoundReport,
}

/// Bound on `E‖M‖_{4t}^{4t}` driven by the minimum vertex separator.
pub fn shape_bound(shape: &Shape, n: usize, p: f64, t: u32, c: f64) -> Result<ShapeBound> {
    check_t(t)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("p must lie in (0, 1), got {p}")));
    }
    if !(c > 0.0) {
        return Err(Error::param(format!("C must be positive, got {c}")));
    }
    if n < shape.k {
        return Err(Error::param(format!(
            "n = {n} is smaller than the shape size {}",
            shape.k
        )));
    }
    let sep = min_vertex_separator(shape)?;
    let tf = f64::from(t);
    let kv = shape.k as f64;
    let ke = shape.edges.len() as f64;
    let ln_n = (n as f64).ln();
    let edge_term = if ke > 0.0 { ke * (c * ke).ln() } else { 0.0 };
    let log_combinatorial = 4.0 * tf * kv * (48.0 * tf * kv).ln() + edge_term + kv * ln_n;
    let log_sparsity = 4.0 * tf * sep.adjacent_edges as f64 * 0.5 * ((1.0 - p) / p).ln();
    let log_dimension = 2.0 * tf * (kv - sep.size as f64) * ln_n;
    let report = BoundReport::new(
        Theorem::GraphShape,
        t,
        Normalization::MomentPower,
        vec![BoundTerm::new(
            "shape",
            log_combinatorial + log_sparsity + log_dimension,
            0.0,
        )],
    );
    Ok(ShapeBound {
        n,
        p,
        c,
        separator: sep,
        log_combinatorial,
        log_sparsity,
        log_dimension,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub threshold: f64,
    pub t: u32,
    pub log_moment_bound: f64,
}

/// Threshold `θ` with `Pr[‖M‖ ≥ θ] ≤ ε`, taking
/// `t = max(2, ⌈¼ ln(|E|^{|E|} n^{|V|} / ε)⌉)` and `θ = (bound/ε)^{1/4t}`.
pub fn shape_tail_bound(shape: &Shape, n: usize, p: f64, eps: f64, c: f64) -> Result<TailBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )));
    }
    let ke = shape.edges.len() as f64;
    let edge_term = if ke > 0.0 { ke * ke.ln() } else { 0.0 };
    let raw = 0.25 * (edge_term + shape.k as f64 * (n as f64).ln() - eps.ln());
    let t = (raw.ceil() as u32).max(2);
    let bound = shape_bound(shape, n, p, t, c)?;
    let log_theta = (bound.report.log_total - eps.ln()) / f64::from(4 * t);
    Ok(TailBound {
        threshold: log_theta.exp(),
        t,
        log_moment_bound: bound.report.log_total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSeparator {
    pub separator: Vec<usize>,
    /// `e(S) ln L + (k − |S|)/2 · ln n`.
    pub log_score: f64,
}

/// Separator maximizing `L^{e(S)} n^{(k−|S|)/2}`, `e(S)` counting edges inside
/// `S`; ties go to the lexicographically least set.
pub fn sparse_separator(shape: &Shape, l: f64, n: usize) -> Result<SparseSeparator> {
    shape.check_search_size()?;
    if !(l > 0.0) {
        return Err(Error::param(format!("L must be positive, got {l}")));
    }
    let adj = shape.adjacency_masks();
    let (um, vm) = (Shape::mask(&shape.u), Shape::mask(&shape.v));
    let (ln_l, ln_n) = (l.ln(), (n as f64).ln());
    let mut best: Option<SparseSeparator> = None;
    for mask in 0u32..(1 << shape.k) {
        if !separates_mask(&adj, um, vm, mask) {
            continue;
        }
        let s: Vec<usize> = (0..shape.k).filter(|&x| mask >> x & 1 == 1).collect();
        let score = shape.edges_inside(&s) as f64 * ln_l + (shape.k - s.len()) as f64 / 2.0 * ln_n;
        let better = match &best {
            None => true,
            Some(b) => {
                let tol = 1e-12 * b.log_score.abs().max(1.0);
                score > b.log_score + tol || ((score - b.log_score).abs() <= tol && s < b.separator)
            }
        };
        if better {
            best = Some(SparseSeparator {
                separator: s,
                log_score: score,
            });
        }
    }
    Ok(best.expect("the full vertex set always separates"))
}

fn edge_sample(cfg: &SampleConfig, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let mut g = vec![0.0; pair_count(cfg.n)];
    cfg.dist.fill(rng, &mut g);
    g
}

/// Estimates `E q(M)` with `cfg.n` vertices and edge variables from `cfg.dist`.
pub fn estimate_graph_moment(
    shape: &Shape,
    cfg: &SampleConfig,
    quantity: Quantity,
) -> Result<MomentEstimate> {
    check_build(shape, cfg.n)?;
    estimate_with(cfg, PURPOSE_GRAPH, &quantity.label(), |rng| {
        quantity.log_value(&build_graph_matrix(shape, cfg.n, &edge_sample(cfg, rng))?)
    })
}

/// Spectral norm of each sampled graph matrix, in sample order.
pub fn sample_graph_spectral_norms(shape: &Shape, cfg: &SampleConfig) -> Result<Vec<f64>> {
    check_build(shape, cfg.n)?;
    let logs = sample_values(cfg, PURPOSE_GRAPH, |rng| {
        Quantity::Spectral.log_value(&build_graph_matrix(shape, cfg.n, &edge_sample(cfg, rng))?)
    })?;
    Ok(logs.into_iter().map(f64::exp).collect())
}

/// Compares `M(G)` against the matrix whose `l`-th shape edge reads an
/// independent copy `G^{(l)}`, with constant `k^k`.
pub fn decoupling_ratio_graph(
    shape: &Shape,
    cfg: &SampleConfig,
    mode: DecouplingMode,
) -> Result<DecouplingResult> {
    check_build(shape, cfg.n)?;
    if shape.edges.is_empty() {
        return Err(Error::param("decoupling needs at least one edge"));
    }
    let q = mode.quantity(cfg.t);
    let lhs = estimate_with(cfg, PURPOSE_COUPLED, &q.label(), |rng| {
        q.log_value(&build_graph_matrix(shape, cfg.n, &edge_sample(cfg, rng))?)
    })?;
    let rhs = estimate_with(
        cfg,
        PURPOSE_DECOUPLED,
        &format!("{} (decoupled)", q.label()),
        |rng| {
            let copies: Vec<Vec<f64>> = (0..shape.edges.len())
                .map(|_| edge_sample(cfg, rng))
                .collect();
            q.log_value(&build_graph_matrix_decoupled(shape, cfg.n, &copies)?)
        },
    )?;
    Ok(DecouplingResult::new(
        mode,
        lhs,
        rhs,
        mode.log_constant(shape.k, cfg.t),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> Shape {
        Shape::new(2, vec![(0, 1)], vec![0], vec![1]).unwrap()
    }

    // u−w−v with the middle vertex w numbered first.
    fn path() -> Shape {
        Shape::new(3, vec![(1, 0), (0, 2)], vec![1], vec![2]).unwrap()
    }

    #[test]
    fn pair_bijection() {
        let n = 7;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
                assert_eq!(pair_from_index(n, k), (i, j));
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn tuple_ranks_follow_lex_order() {
        for (r, t) in (0..5).permutations(2).enumerate() {
            assert_eq!(tuple_rank(5, &t), r);
        }
        assert_eq!(tuple_rank(5, &[]), 0);
    }

    #[test]
    fn single_edge_matrix() {
        let n = 5;
        let g: Vec<f64> = (0..pair_count(n)).map(|e| e as f64 + 1.0).collect();
        let m = build_graph_matrix(&edge(), n, &g).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 0.0 } else { g[pair_index(n, i, j)] };
                assert_eq!(m[(i, j)], expected);
            }
        }
    }

    #[test]
    fn edgeless_shape_is_identity() {
        let s = Shape::new(1, vec![], vec![0], vec![0]).unwrap();
        assert_eq!(
            build_graph_matrix(&s, 4, &[0.0; 6]).unwrap(),
            Matrix::identity(4)
        );
        let p = to_polymatrix(&s, 4).unwrap();
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn separator_hand_cases() {
        assert_eq!(min_vertex_separator(&path()).unwrap().separator, vec![0]);
        let e = min_vertex_separator(&edge()).unwrap();
        assert_eq!((e.separator.clone(), e.adjacent_edges), (vec![0], 1));
        let both = Shape::new(3, vec![(0, 2)], vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(min_vertex_separator(&both).unwrap().separator, vec![0, 1]);
    }

    #[test]
    fn cover_cases() {
        let p = path();
        match separator_from_cover(&p, &[0], &[1]).unwrap() {
            CoverOutcome::Separator(s) => assert_eq!(s.separator, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
        match separator_from_cover(&p, &[0, 1], &[0, 1]).unwrap() {
            CoverOutcome::Separator(s) => assert_eq!(s.separator, vec![0, 1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        match separator_from_cover(&p, &[1], &[0]).unwrap() {
            CoverOutcome::Refused { bfs_separates, .. } => assert!(bfs_separates),
            other => panic!("unexpected {other:?}"),
        }
        assert!(separator_from_cover(&p, &[0], &[]).is_err());
    }

    #[test]
    fn edge_bound_arithmetic() {
        let b = shape_bound(&edge(), 10, 0.5, 2, 3.0).unwrap();
        let ln10 = 10f64.ln();
        let expected = 16.0 * 192f64.ln() + 3f64.ln() + 2.0 * ln10 + 4.0 * ln10;
        assert!((b.report.log_total - expected).abs() < 1e-12);
        assert_eq!(b.log_sparsity, 0.0);
    }

    #[test]
    fn tail_t_choice() {
        let tb = shape_tail_bound(&edge(), 100, 0.5, 0.01, 3.0).unwrap();
        assert_eq!(tb.t, (0.25 * (1e4f64 / 0.01).ln()).ceil() as u32);
        let tail = crate::bounds::tail_from_log_moment(tb.log_moment_bound, 4 * tb.t, tb.threshold)
            .unwrap();
        assert!(tail <= 0.01 * (1.0 + 1e-9));
    }

    #[test]
    fn sparse_path() {
        let s = sparse_separator(&path(), 1.0, 9).unwrap();
        assert_eq!(s.separator, vec![0]);
        assert!((s.log_score - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let s = Shape::parse(r#"{"k": 3, "edges": [[2,1],[1,3]], "U": [2], "V": [3]}"#).unwrap();
        assert_eq!(s, path());
        assert_eq!(Shape::parse(&s.to_json()).unwrap(), s);
        assert!(Shape::parse(r#"{"k": 2, "edges": [[1,1]], "U": [1], "V": [2]}"#).is_err());
        assert!(Shape::parse(r#"{"k": 2, "edges": [[1,2],[2,1]], "U": [1], "V": [2]}"#).is_err());
    }
}
