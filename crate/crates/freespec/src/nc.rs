//! Noncrossing combinatorics: pairings of `{1,...,2k}`, partitions of
//! `{1,...,m}`, Kreweras complementation, and the loop counts that drive the
//! Gram matrices in [`crate::weingarten`].
//!
//! A pairing or partition is *noncrossing* when no two of its classes
//! interleave: there are no points `a < b < c < d` with `a, c` in one class
//! and `b, d` in another.  Noncrossing pairings of `2k` points are counted by
//! the Catalan number `C_k`, and so are noncrossing partitions of `k` points.
//!
//! Points are 1-based throughout, matching the usual way these objects are
//! written on paper.

use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Largest supported pairing size `k` (so at most `2 * PAIRING_CAP` points).
/// `C_8 = 1430` diagrams keep Gram matrices comfortably small; beyond that
/// the exact inverses stop being interactive.
pub const PAIRING_CAP: usize = 8;

/// Largest supported partition ground-set size.  `NC(10)` has 16796 elements.
pub const PARTITION_CAP: usize = 10;

/// The Catalan number `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigUint {
    binomial(BigUint::from(2 * k), BigUint::from(k)) / BigUint::from(k + 1)
}

/// The central binomial coefficient `binom(2k, k)`.
pub fn central_binomial(k: usize) -> BigUint {
    binomial(BigUint::from(2 * k), BigUint::from(k))
}

/// [`catalan`] as a rational, for moment arithmetic.
pub fn catalan_rat(k: usize) -> Rat {
    Rat::from_integer(BigInt::from(catalan(k)))
}

/// [`central_binomial`] as a rational.
pub fn central_binomial_rat(k: usize) -> Rat {
    Rat::from_integer(BigInt::from(central_binomial(k)))
}

fn check_cap(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::CapExceeded {
            what,
            requested,
            limit,
        });
    }
    Ok(())
}

/// A noncrossing perfect matching of `{1, ..., 2k}`.
///
/// Pairs are stored as `(a, b)` with `a < b`, sorted by first element; two
/// pairings compare equal iff they match the same points.  The derived `Ord`
/// on this normal form is the canonical order used by
/// [`enumerate_pairings`], so indices into the enumeration are stable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NcPairing {
    pairs: Vec<(usize, usize)>,
}

impl NcPairing {
    /// Builds a pairing from its pairs, in any order and orientation.
    /// Rejects anything that is not a noncrossing perfect matching of
    /// `{1, ..., 2k}`.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let k = pairs.len();
        check_cap("pairing size k", k, PAIRING_CAP)?;
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let mut seen = vec![false; 2 * k + 1];
        for &(a, b) in &pairs {
            if a == b || a < 1 || b > 2 * k {
                return Err(Error::InvalidInput(format!(
                    "pair ({a}, {b}) is not a pair of distinct points in 1..={}",
                    2 * k
                )));
            }
            for p in [a, b] {
                if seen[p] {
                    return Err(Error::InvalidInput(format!("point {p} matched twice")));
                }
                seen[p] = true;
            }
        }
        // Every point in 1..=2k is now matched exactly once (2k flags set).
        for (&(a, b), &(c, d)) in pairs.iter().tuple_combinations() {
            if a < c && c < b && b < d {
                return Err(Error::InvalidInput(format!(
                    "pairs ({a}, {b}) and ({c}, {d}) cross"
                )));
            }
        }
        Ok(NcPairing { pairs })
    }

    /// Number of pairs `k`.
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// The pairs `(a, b)` with `a < b`, sorted by first element.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The partner of point `p` (1-based).
    pub fn partner(&self, p: usize) -> usize {
        for &(a, b) in &self.pairs {
            if a == p {
                return b;
            }
            if b == p {
                return a;
            }
        }
        panic!("point {p} out of range for pairing of {} points", 2 * self.k())
    }
}

impl fmt::Display for NcPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{{a}, {b}}}")?;
        }
        write!(f, "}}")
    }
}

/// All noncrossing pairings of `{1, ..., 2k}` in canonical (lexicographic)
/// order.  `k = 0` yields the single empty pairing.
pub fn enumerate_pairings(k: usize) -> Result<Vec<NcPairing>> {
    check_cap("pairing size k", k, PAIRING_CAP)?;
    let points: Vec<usize> = (1..=2 * k).collect();
    let mut all: Vec<NcPairing> = pairings_of(&points)
        .into_iter()
        .map(|mut pairs| {
            pairs.sort_unstable();
            NcPairing { pairs }
        })
        .collect();
    all.sort_unstable();
    Ok(all)
}

/// Recursive core: the first point must pair with a point at odd offset so
/// that the inside and outside segments each have even size; those segments
/// are then paired independently.
fn pairings_of(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for idx in (1..points.len()).step_by(2) {
        let inner = pairings_of(&points[1..idx]);
        let outer = pairings_of(&points[idx + 1..]);
        for pi in &inner {
            for po in &outer {
                let mut pairs = Vec::with_capacity(points.len() / 2);
                pairs.push((points[0], points[idx]));
                pairs.extend_from_slice(pi);
                pairs.extend_from_slice(po);
                out.push(pairs);
            }
        }
    }
    out
}

/// Number of connected components of the union of two pairings' pair-edges
/// on the shared point set.  This is the loop count obtained by closing one
/// diagram with the other, and the exponent in Gram matrix entries.
pub fn loop_count(p: &NcPairing, q: &NcPairing) -> usize {
    assert_eq!(p.k(), q.k(), "pairings must have the same size");
    let n = 2 * p.k();
    if n == 0 {
        return 0;
    }
    let mut uf = UnionFind::new(n);
    for &(a, b) in p.pairs().iter().chain(q.pairs()) {
        uf.union(a - 1, b - 1);
    }
    uf.component_count()
}

/// A noncrossing partition of `{1, ..., m}`.
///
/// Blocks are stored sorted internally and ordered by least element, so two
/// partitions compare equal iff they induce the same grouping.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NcPartition {
    blocks: Vec<Vec<usize>>,
    m: usize,
}

impl NcPartition {
    /// Builds a partition from its blocks, in any order.  Rejects anything
    /// that is not a noncrossing partition of `{1, ..., m}` where `m` is the
    /// total number of points supplied.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let m: usize = blocks.iter().map(Vec::len).sum();
        check_cap("partition ground-set size", m, PARTITION_CAP)?;
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable();
        let mut block_id = vec![usize::MAX; m + 1];
        for (id, block) in blocks.iter().enumerate() {
            for &p in block {
                if p < 1 || p > m {
                    return Err(Error::InvalidInput(format!(
                        "point {p} outside 1..={m}"
                    )));
                }
                if block_id[p] != usize::MAX {
                    return Err(Error::InvalidInput(format!("point {p} in two blocks")));
                }
                block_id[p] = id;
            }
        }
        // All m points are covered: the blocks hold m points total, each in
        // range and none repeated.
        if !noncrossing_ids(&block_id[1..]) {
            return Err(Error::InvalidInput("blocks cross".into()));
        }
        Ok(NcPartition { blocks, m })
    }

    /// Ground-set size `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Blocks, each sorted, ordered by least element.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Sizes of the blocks, in block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

impl fmt::Display for NcPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{{}}}", block.iter().join(", "))?;
        }
        write!(f, "}}")
    }
}

/// Stack-discipline noncrossing test on a block-id array (0-based positions).
/// A partition is noncrossing iff, scanning left to right, every return to an
/// open block finds it on top of the stack once finished blocks are popped.
fn noncrossing_ids(ids: &[usize]) -> bool {
    let m = ids.len();
    let mut last = vec![0usize; m]; // last (1-based) position of each block id
    for (pos, &b) in ids.iter().enumerate() {
        last[b] = pos + 1;
    }
    let mut first_seen = vec![false; m];
    let mut stack: Vec<usize> = Vec::new();
    for (pos, &b) in ids.iter().enumerate() {
        let pos = pos + 1;
        while let Some(&top) = stack.last() {
            if last[top] < pos {
                stack.pop();
            } else {
                break;
            }
        }
        if !first_seen[b] {
            first_seen[b] = true;
            if last[b] > pos {
                stack.push(b);
            }
        } else if stack.last() != Some(&b) {
            return false;
        } else if last[b] == pos {
            stack.pop();
        }
    }
    true
}

/// All noncrossing partitions of `{1, ..., m}` in canonical order (sorted by
/// the normal form of [`NcPartition`]).  There are `C_m` of them.
pub fn enumerate_nc_partitions(m: usize) -> Result<Vec<NcPartition>> {
    check_cap("partition ground-set size", m, PARTITION_CAP)?;
    if m == 0 {
        return Ok(vec![NcPartition {
            blocks: Vec::new(),
            m: 0,
        }]);
    }
    // Restricted-growth strings enumerate all set partitions; filter to the
    // noncrossing ones.
    let mut out = Vec::new();
    let mut ids = vec![0usize; m];
    rgs_walk(&mut ids, 1, 1, &mut |ids| {
        if noncrossing_ids(ids) {
            let nblocks = ids.iter().max().map_or(0, |&b| b + 1);
            let mut blocks = vec![Vec::new(); nblocks];
            for (pos, &b) in ids.iter().enumerate() {
                blocks[b].push(pos + 1);
            }
            blocks.sort_unstable();
            out.push(NcPartition { blocks, m });
        }
    });
    let mut out = out;
    out.sort_unstable();
    Ok(out)
}

fn rgs_walk(ids: &mut Vec<usize>, pos: usize, nblocks: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == ids.len() {
        visit(ids);
        return;
    }
    for b in 0..=nblocks {
        ids[pos] = b;
        rgs_walk(ids, pos + 1, nblocks.max(b + 1), visit);
    }
}

/// The Kreweras complement of a noncrossing partition.
///
/// With `gamma` the long cycle `1 -> 2 -> ... -> m -> 1` and `sigma` the
/// permutation cycling each block, the complement is the cycle partition of
/// `sigma^{-1} . gamma`.  Applying it twice rotates every point down by one,
/// so it is a bijection of `NC(m)` onto itself, reversing refinement order.
pub fn kreweras(p: &NcPartition) -> NcPartition {
    let m = p.m();
    if m == 0 {
        return p.clone();
    }
    // sigma maps each point to the next point of its block, cyclically.
    let mut sigma = vec![0usize; m + 1];
    for block in p.blocks() {
        for (i, &a) in block.iter().enumerate() {
            sigma[a] = block[(i + 1) % block.len()];
        }
    }
    let mut sigma_inv = vec![0usize; m + 1];
    for a in 1..=m {
        sigma_inv[sigma[a]] = a;
    }
    let tau = |i: usize| sigma_inv[i % m + 1];
    // Extract the cycles of tau.
    let mut seen = vec![false; m + 1];
    let mut blocks = Vec::new();
    for start in 1..=m {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = tau(i);
        }
        cycle.sort_unstable();
        blocks.push(cycle);
    }
    blocks.sort_unstable();
    NcPartition { blocks, m }
}

/// A permutation of `{0, ..., n-1}`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

/// Cap on `Permutation::all`: `8! = 40320` permutations is the most the
/// graph automorphism search is allowed to walk.
pub const PERMUTATION_ENUMERATION_CAP: usize = 8;

impl Permutation {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its image array; rejects non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "image array {images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Degree `n`.
    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.n(), other.n(), "degrees must match");
        Permutation {
            images: (0..self.n()).map(|i| self.apply(other.apply(i))).collect(),
        }
    }

    /// Number of fixed points.
    pub fn fixed_point_count(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &j)| i == j).count()
    }

    /// All `n!` permutations of `{0, ..., n-1}`.
    pub fn all(n: usize) -> Result<Vec<Permutation>> {
        check_cap("symmetric group degree", n, PERMUTATION_ENUMERATION_CAP)?;
        Ok((0..n)
            .permutations(n)
            .map(|images| Permutation { images })
            .collect())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: all perfect matchings of 1..=2k by brute force,
    /// filtered by the quadruple-scan crossing test.
    fn brute_force_pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
        fn go(points: Vec<usize>) -> Vec<Vec<(usize, usize)>> {
            if points.is_empty() {
                return vec![Vec::new()];
            }
            let first = points[0];
            let mut out = Vec::new();
            for i in 1..points.len() {
                let partner = points[i];
                let rest: Vec<usize> = points[1..]
                    .iter()
                    .copied()
                    .filter(|&p| p != partner)
                    .collect();
                for mut rest_pairs in go(rest) {
                    rest_pairs.insert(0, (first, partner));
                    out.push(rest_pairs);
                }
            }
            out
        }
        let noncrossing = |pairs: &[(usize, usize)]| {
            for (i, &(a, b)) in pairs.iter().enumerate() {
                for &(c, d) in &pairs[i + 1..] {
                    let (a, b, c, d) = if a < c { (a, b, c, d) } else { (c, d, a, b) };
                    if a < c && c < b && b < d {
                        return false;
                    }
                }
            }
            true
        };
        let mut all: Vec<Vec<(usize, usize)>> = go((1..=2 * k).collect())
            .into_iter()
            .filter(|p| noncrossing(p))
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        all.sort_unstable();
        all
    }

    /// Independent oracle: Catalan numbers by the convolution recurrence.
    fn catalan_oracle(upto: usize) -> Vec<u64> {
        let mut c = vec![1u64];
        for n in 0..upto {
            let next: u64 = (0..=n).map(|i| c[i] * c[n - i]).sum();
            c.push(next);
        }
        c
    }

    #[test]
    fn catalan_matches_recurrence_oracle() {
        let oracle = catalan_oracle(12);
        for (k, &expected) in oracle.iter().enumerate() {
            assert_eq!(catalan(k), BigUint::from(expected), "C_{k}");
        }
    }

    #[test]
    fn central_binomial_small_values() {
        let expected = [1u64, 2, 6, 20, 70, 252];
        for (k, &v) in expected.iter().enumerate() {
            assert_eq!(central_binomial(k), BigUint::from(v));
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 0..=5 {
            let fast = enumerate_pairings(k).unwrap();
            let slow = brute_force_pairings(k);
            assert_eq!(fast.len(), slow.len(), "count at k = {k}");
            for (f, s) in fast.iter().zip(&slow) {
                assert_eq!(f.pairs(), &s[..], "order at k = {k}");
            }
        }
    }

    #[test]
    fn enumeration_counts_are_catalan() {
        for k in 0..=8 {
            let n = enumerate_pairings(k).unwrap().len();
            assert_eq!(BigUint::from(n), catalan(k), "k = {k}");
        }
    }

    #[test]
    fn enumeration_at_four_has_fourteen_diagrams() {
        assert_eq!(enumerate_pairings(4).unwrap().len(), 14);
    }

    #[test]
    fn canonical_order_at_two() {
        let all = enumerate_pairings(2).unwrap();
        assert_eq!(all[0].pairs(), &[(1, 2), (3, 4)]);
        assert_eq!(all[1].pairs(), &[(1, 4), (2, 3)]);
    }

    #[test]
    fn canonical_order_endpoints_at_three() {
        let all = enumerate_pairings(3).unwrap();
        assert_eq!(all.first().unwrap().pairs(), &[(1, 2), (3, 4), (5, 6)]);
        assert_eq!(all.last().unwrap().pairs(), &[(1, 6), (2, 5), (3, 4)]);
    }

    #[test]
    fn pairing_cap_is_enforced() {
        match enumerate_pairings(9) {
            Err(Error::CapExceeded { requested: 9, limit: 8, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn pairing_constructor_rejects_crossings() {
        assert!(NcPairing::new(vec![(1, 3), (2, 4)]).is_err());
        assert!(NcPairing::new(vec![(1, 2), (3, 4)]).is_ok());
        assert!(NcPairing::new(vec![(2, 3), (1, 4)]).is_ok());
    }

    #[test]
    fn pairing_constructor_rejects_bad_coverage() {
        assert!(NcPairing::new(vec![(1, 2), (2, 3)]).is_err());
        assert!(NcPairing::new(vec![(1, 1)]).is_err());
        assert!(NcPairing::new(vec![(1, 3)]).is_err());
    }

    #[test]
    fn partner_lookup() {
        let p = NcPairing::new(vec![(1, 4), (2, 3)]).unwrap();
        assert_eq!(p.partner(1), 4);
        assert_eq!(p.partner(3), 2);
    }

    #[test]
    fn loop_count_identical_pairings() {
        for k in 1..=5 {
            for p in enumerate_pairings(k).unwrap() {
                assert_eq!(loop_count(&p, &p), k);
            }
        }
    }

    #[test]
    fn loop_count_crossing_example() {
        // {{1,2},{3,4}} against {{1,4},{2,3}} chains all four points into a
        // single loop.
        let p = NcPairing::new(vec![(1, 2), (3, 4)]).unwrap();
        let q = NcPairing::new(vec![(1, 4), (2, 3)]).unwrap();
        assert_eq!(loop_count(&p, &q), 1);
    }

    #[test]
    fn partition_counts_are_catalan() {
        for m in 0..=7 {
            let n = enumerate_nc_partitions(m).unwrap().len();
            assert_eq!(BigUint::from(n), catalan(m), "m = {m}");
        }
    }

    #[test]
    fn partitions_of_four_exclude_exactly_the_crossing() {
        // All 15 set partitions of {1,2,3,4} minus the single crossing one.
        let nc = enumerate_nc_partitions(4).unwrap();
        assert_eq!(nc.len(), 14);
        let crossing = vec![vec![1, 3], vec![2, 4]];
        assert!(!nc.iter().any(|p| p.blocks() == &crossing[..]));
        assert!(NcPartition::new(crossing).is_err());
    }

    /// Oracle: the quadruple scan, directly as stated.
    fn crossing_by_quadruple_scan(p: &NcPartition) -> bool {
        let m = p.m();
        let mut id = vec![usize::MAX; m + 1];
        for (b, block) in p.blocks().iter().enumerate() {
            for &x in block {
                id[x] = b;
            }
        }
        for a in 1..=m {
            for b in a + 1..=m {
                for c in b + 1..=m {
                    for d in c + 1..=m {
                        if id[a] == id[c] && id[b] == id[d] && id[a] != id[b] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn enumerated_partitions_pass_the_quadruple_scan() {
        for m in 0..=6 {
            for p in enumerate_nc_partitions(m).unwrap() {
                assert!(!crossing_by_quadruple_scan(&p), "crossing: {p}");
            }
        }
    }

    #[test]
    fn stack_test_agrees_with_quadruple_scan_on_all_partitions() {
        // Walk *all* set partitions of small ground sets and compare the two
        // crossing tests.
        for m in 1..=6 {
            let mut ids = vec![0usize; m];
            let mut count = 0usize;
            rgs_walk(&mut ids, 1, 1, &mut |ids| {
                count += 1;
                let nblocks = ids.iter().max().unwrap() + 1;
                let mut blocks = vec![Vec::new(); nblocks];
                for (pos, &b) in ids.iter().enumerate() {
                    blocks[b].push(pos + 1);
                }
                let fast = noncrossing_ids(ids);
                let slow = {
                    let mut id = vec![usize::MAX; m + 1];
                    for (b, block) in blocks.iter().enumerate() {
                        for &x in block {
                            id[x] = b;
                        }
                    }
                    let mut crossing = false;
                    'outer: for a in 1..=m {
                        for b in a + 1..=m {
                            for c in b + 1..=m {
                                for d in c + 1..=m {
                                    if id[a] == id[c] && id[b] == id[d] && id[a] != id[b] {
                                        crossing = true;
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                    !crossing
                };
                assert_eq!(fast, slow, "ids {ids:?}");
            });
            assert!(count > 0);
        }
    }

    #[test]
    fn kreweras_of_pair_and_singleton() {
        let p = NcPartition::new(vec![vec![1, 2], vec![3]]).unwrap();
        let kr = kreweras(&p);
        assert_eq!(kr.blocks(), &[vec![1], vec![2, 3]]);
    }

    #[test]
    fn kreweras_of_full_block_is_singletons() {
        let p = NcPartition::new(vec![vec![1, 2, 3, 4]]).unwrap();
        let kr = kreweras(&p);
        assert_eq!(kr.blocks().len(), 4);
        assert!(kr.blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn kreweras_twice_is_rotation() {
        for m in 1..=6 {
            for p in enumerate_nc_partitions(m).unwrap() {
                let twice = kreweras(&kreweras(&p));
                // Rotate p's points down by one (1 -> m).
                let rotated: Vec<Vec<usize>> = p
                    .blocks()
                    .iter()
                    .map(|b| b.iter().map(|&x| if x == 1 { m } else { x - 1 }).collect())
                    .collect();
                let rotated = NcPartition::new(rotated).unwrap();
                assert_eq!(twice, rotated, "at {p}");
            }
        }
    }

    #[test]
    fn kreweras_block_counts_are_complementary() {
        // |blocks(p)| + |blocks(Kr(p))| = m + 1, a standard sanity check.
        for m in 1..=6 {
            for p in enumerate_nc_partitions(m).unwrap() {
                assert_eq!(p.blocks().len() + kreweras(&p).blocks().len(), m + 1);
            }
        }
    }

    #[test]
    fn permutation_enumeration_and_fixed_points() {
        let all = Permutation::all(3).unwrap();
        assert_eq!(all.len(), 6);
        let total_fixed: usize = all.iter().map(|p| p.fixed_point_count()).sum();
        // Burnside: average number of fixed points over S_n is 1.
        assert_eq!(total_fixed, 6);
    }

    proptest! {
        #[test]
        fn loop_count_is_symmetric_and_bounded(k in 1usize..=5, i in 0usize..1000, j in 0usize..1000) {
            let all = enumerate_pairings(k).unwrap();
            let p = &all[i % all.len()];
            let q = &all[j % all.len()];
            let pq = loop_count(p, q);
            prop_assert_eq!(pq, loop_count(q, p));
            prop_assert!(pq >= 1 && pq <= k);
        }

        #[test]
        fn permutation_inverse_roundtrip(seed in 0u64..1000) {
            let all = Permutation::all(4).unwrap();
            let p = &all[(seed as usize) % all.len()];
            let e = p.compose(&p.inverse());
            prop_assert_eq!(e, Permutation::identity(4));
        }
    }
}
