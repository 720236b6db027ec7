//! Rooted graphs with colored edges: walk counts, spectral measures at the
//! root, a color-respecting lexicographic product, and the character
//! measures of classical automorphism groups.
//!
//! Colors model multiplicities: two vertices may be joined by several edges
//! as long as the colors differ, and the total adjacency matrix counts the
//! colors joining each pair.  The lexicographic product keeps the factors'
//! color alphabets disjoint so that the colored structure remembers which
//! factor each edge came from; forgetting colors afterwards recovers the
//! ordinary lexicographic product.

use std::collections::{BTreeSet, HashSet};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeprob::{free_mult_conv, moment_compare, CompareReport, MomentSequence};
use crate::nc::{catalan_rat, central_binomial_rat, Permutation, PERMUTATION_ENUMERATION_CAP};
use crate::rational::{rat_to_f64, Rat};

/// A finite graph with a distinguished root vertex and string-colored edges.
///
/// Vertices are `0..n`.  Edges are undirected, loop-free, and normalized to
/// `(v, w)` with `v < w`; the same pair may carry several colors but never
/// the same color twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedColoredGraph {
    n: usize,
    root: usize,
    edges: Vec<(usize, usize, String)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    root: usize,
    edges: Vec<(usize, usize, String)>,
}

impl RootedColoredGraph {
    pub fn new(n: usize, root: usize, edges: Vec<(usize, usize, String)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        if root >= n {
            return Err(Error::InvalidInput(format!(
                "root {root} out of range for {n} vertices"
            )));
        }
        let mut normalized: Vec<(usize, usize, String)> = Vec::with_capacity(edges.len());
        for (v, w, c) in edges {
            if v == w {
                return Err(Error::InvalidInput(format!("self-edge at vertex {v}")));
            }
            if v >= n || w >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({v}, {w}) out of range for {n} vertices"
                )));
            }
            let (v, w) = if v < w { (v, w) } else { (w, v) };
            normalized.push((v, w, c));
        }
        normalized.sort();
        for pair in normalized.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({}, {}) with color {:?}",
                    pair[0].0, pair[0].1, pair[0].2
                )));
            }
        }
        Ok(RootedColoredGraph {
            n,
            root,
            edges: normalized,
        })
    }

    /// A single-vertex graph, the unit of the lexicographic product.
    pub fn point() -> Self {
        RootedColoredGraph {
            n: 1,
            root: 0,
            edges: Vec::new(),
        }
    }

    /// The path on `n` vertices `0 - 1 - ... - (n-1)` with one color.
    pub fn path(n: usize, root: usize, color: &str) -> Result<Self> {
        let edges = (0..n.saturating_sub(1))
            .map(|v| (v, v + 1, color.to_string()))
            .collect();
        Self::new(n, root, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Normalized, sorted edge list.
    pub fn edges(&self) -> &[(usize, usize, String)] {
        &self.edges
    }

    /// The set of edge colors in use.
    pub fn colors(&self) -> BTreeSet<&str> {
        self.edges.iter().map(|(_, _, c)| c.as_str()).collect()
    }

    /// Total adjacency: entry `(v, w)` counts the colors joining `v` and `w`.
    pub fn adjacency_counts(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.n]; self.n];
        for &(v, w, _) in &self.edges {
            a[v][w] += 1;
            a[w][v] += 1;
        }
        a
    }

    /// Serializes as `{"n": ..., "root": ..., "edges": [[v, w, "color"], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson {
            n: self.n,
            root: self.root,
            edges: self.edges.clone(),
        })
        .expect("graph data always serializes")
    }

    /// Parses the JSON form produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: GraphJson = serde_json::from_str(text)?;
        Self::new(parsed.n, parsed.root, parsed.edges)
    }
}

/// Closed-walk counts at the root: returns `[m_0, m_1, ..., m_K]` where
/// `m_k` is the number of length-`k` walks from the root back to itself in
/// the total adjacency (colors count as multiplicity).
pub fn loop_moments(g: &RootedColoredGraph, horizon: usize) -> Vec<BigUint> {
    let a = g.adjacency_counts();
    let n = g.n();
    let mut v = vec![BigUint::ZERO; n];
    v[g.root()] = BigUint::one();
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(BigUint::one());
    for _ in 0..horizon {
        let mut next = vec![BigUint::ZERO; n];
        for (i, row) in a.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                if count != 0 {
                    next[i] += &v[j] * count;
                }
            }
        }
        v = next;
        out.push(v[g.root()].clone());
    }
    out
}

/// [`loop_moments`] as rationals, for comparison with measure moments.
pub fn loop_moments_rat(g: &RootedColoredGraph, horizon: usize) -> Vec<Rat> {
    loop_moments(g, horizon)
        .into_iter()
        .map(|m| Rat::from_integer(BigInt::from(m)))
        .collect()
}

/// An atom of a measure on the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealAtom {
    pub position: f64,
    pub weight: f64,
}

/// A measure on `[-2, 2]`: atoms plus catalog continuous parts.
///
/// Spectral measures of finite graphs are purely atomic; the continuous
/// coefficients exist for the limiting measures of the infinite families,
/// whose even moments are Catalan numbers (semicircle) and central binomial
/// coefficients (arcsine).
#[derive(Clone, Debug, PartialEq)]
pub struct RealMeasure {
    pub atoms: Vec<RealAtom>,
    /// Mass of the semicircle component on `[-2, 2]`.
    pub semicircle_coeff: f64,
    /// Mass of the arcsine component on `[-2, 2]`.
    pub arcsine_coeff: f64,
}

impl RealMeasure {
    /// The `k`-th moment.  The semicircle contributes Catalan numbers at
    /// even orders, the arcsine central binomials; odd continuous moments
    /// vanish by symmetry.
    pub fn moment(&self, k: usize) -> f64 {
        let mut acc: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.position.powi(k as i32))
            .sum();
        if k % 2 == 0 {
            acc += self.semicircle_coeff * rat_to_f64(&catalan_rat(k / 2));
            acc += self.arcsine_coeff * rat_to_f64(&central_binomial_rat(k / 2));
        }
        acc
    }

    pub fn mass(&self) -> f64 {
        self.moment(0)
    }
}

/// Eigenvalues within this distance are merged into one atom.
pub const EIGENVALUE_CLUSTER_TOL: f64 = 1e-8;

/// Atoms below this weight are dropped (eigenvectors vanishing at the root).
const WEIGHT_DROP_TOL: f64 = 1e-12;

/// The spectral measure of the total adjacency matrix at the root: atoms at
/// the eigenvalues, weighted by the squared root-coordinates of the
/// eigenvectors.  Its `k`-th moment equals the closed-walk count `m_k`.
pub fn vertex_spectral_measure(g: &RootedColoredGraph) -> RealMeasure {
    vertex_spectral_measure_at(g, g.root()).expect("root is always in range")
}

/// As [`vertex_spectral_measure`], at an arbitrary vertex.
pub fn vertex_spectral_measure_at(g: &RootedColoredGraph, vertex: usize) -> Result<RealMeasure> {
    if vertex >= g.n() {
        return Err(Error::InvalidInput(format!(
            "vertex {vertex} out of range for {} vertices",
            g.n()
        )));
    }
    let counts = g.adjacency_counts();
    let a = DMatrix::from_fn(g.n(), g.n(), |i, j| counts[i][j] as f64);
    let eigen = a.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..g.n())
        .map(|i| {
            let coord = eigen.eigenvectors[(vertex, i)];
            (eigen.eigenvalues[i], coord * coord)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut atoms: Vec<RealAtom> = Vec::new();
    for (position, weight) in pairs {
        match atoms.last_mut() {
            Some(last) if (position - last.position).abs() <= EIGENVALUE_CLUSTER_TOL => {
                // Merge into the cluster, keeping the weighted mean position.
                let total = last.weight + weight;
                if total > 0.0 {
                    last.position = (last.position * last.weight + position * weight) / total;
                }
                last.weight = total;
            }
            _ => atoms.push(RealAtom { position, weight }),
        }
    }
    atoms.retain(|a| a.weight > WEIGHT_DROP_TOL);
    Ok(RealMeasure {
        atoms,
        semicircle_coeff: 0.0,
        arcsine_coeff: 0.0,
    })
}

/// The lexicographic product with a copy of `inner` at every vertex of
/// `outer`: within a copy, `inner`'s edges; between two copies, complete
/// joins wherever `outer` has an edge, colored by `outer`'s color.  The two
/// color alphabets must be disjoint so every product edge remembers its
/// factor.  Vertex `(yv, xv)` becomes index `yv * inner.n() + xv` and the
/// root is the pair of roots.
pub fn lex_free_product(
    inner: &RootedColoredGraph,
    outer: &RootedColoredGraph,
) -> Result<RootedColoredGraph> {
    if let Some(shared) = inner.colors().intersection(&outer.colors()).next() {
        return Err(Error::InvalidInput(format!(
            "color {shared:?} appears in both factors; product colors must be disjoint"
        )));
    }
    let nx = inner.n();
    let mut edges = Vec::new();
    for yv in 0..outer.n() {
        for (v, w, c) in inner.edges() {
            edges.push((yv * nx + v, yv * nx + w, c.clone()));
        }
    }
    for (v, w, c) in outer.edges() {
        for i in 0..nx {
            for j in 0..nx {
                edges.push((v * nx + i, w * nx + j, c.clone()));
            }
        }
    }
    RootedColoredGraph::new(
        nx * outer.n(),
        outer.root() * nx + inner.root(),
        edges,
    )
}

/// All color-preserving automorphisms of the graph.  Walks the full
/// symmetric group, so the vertex count is capped at
/// [`PERMUTATION_ENUMERATION_CAP`].
pub fn automorphisms(g: &RootedColoredGraph) -> Result<Vec<Permutation>> {
    let n = g.n();
    if n > PERMUTATION_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "automorphism search vertex count",
            requested: n,
            limit: PERMUTATION_ENUMERATION_CAP,
        });
    }
    let mut by_color: Vec<(&str, HashSet<(usize, usize)>)> = Vec::new();
    for (v, w, c) in g.edges() {
        match by_color.iter_mut().find(|(name, _)| name == c) {
            Some((_, set)) => {
                set.insert((*v, *w));
            }
            None => {
                by_color.push((c, HashSet::from([(*v, *w)])));
            }
        }
    }
    let preserves = |p: &Permutation| {
        by_color.iter().all(|(_, set)| {
            set.iter().all(|&(v, w)| {
                let (a, b) = (p.apply(v), p.apply(w));
                set.contains(&if a < b { (a, b) } else { (b, a) })
            })
        })
    };
    Ok(Permutation::all(n)?.into_iter().filter(preserves).collect())
}

/// Moments of the fixed-point character of the classical automorphism
/// group: `m_k` is the average of `(number of fixed vertices)^k` over all
/// color-preserving automorphisms, for `k = 1..=horizon`.
pub fn classical_character_measure_graph(
    g: &RootedColoredGraph,
    horizon: usize,
) -> Result<MomentSequence> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be >= 1".into()));
    }
    let auts = automorphisms(g)?;
    let order = BigInt::from(auts.len());
    let mut moments = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let total: BigUint = auts
            .iter()
            .map(|p| BigUint::from(p.fixed_point_count()).pow(k as u32))
            .sum();
        moments.push(Rat::new(BigInt::from(total), order.clone()));
    }
    MomentSequence::new(moments)
}

/// Tests the product conjecture on supplied character data: compares the
/// multiplicative free convolution of the factors' moment sequences against
/// the product graph's sequence, over the common horizon.
pub fn conjecture_compare(
    mu_inner: &MomentSequence,
    mu_outer: &MomentSequence,
    mu_product: &MomentSequence,
) -> Result<CompareReport> {
    let predicted = free_mult_conv(mu_inner, mu_outer)?;
    Ok(moment_compare(&predicted, mu_product))
}
