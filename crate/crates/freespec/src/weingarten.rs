//! Gram matrices of noncrossing pairings, their exact inverses, and the
//! integration calculus they induce.
//!
//! For pairings `p, q` of `2k` points, the Gram matrix has entries
//! `A_{k,n}(p, q) = n^{loops(p, q)}` with `loops` the number of closed loops
//! formed by gluing the two diagrams.  Its inverse `W_{k,n}` turns diagram
//! combinatorics into integrals: a degree-`2k` monomial in the fundamental
//! coordinates integrates to `sum_{p,q} delta_p(i) delta_q(j) W_{k,n}(p, q)`,
//! where the deltas record which index tuples are constant on each pair.
//!
//! Traces against Gram matrices of smaller parameter give truncated character
//! moments `Tr(W_{k,n} A_{k,s})`, which approach the Catalan numbers (the
//! even moments of the semicircle law) as `n` grows with `s/n` fixed scale.
//!
//! Inverses are exact and moderately expensive (`C_6 = 132` diagrams means a
//! 132x132 fraction-free elimination), so a small JSON disk cache is
//! provided; see [`WeingartenCache`].

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::nc::{catalan, catalan_rat, enumerate_pairings, loop_count, NcPairing};
use crate::rational::{format_rat, parse_rat, Rat};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "FREESPEC_CACHE";

/// Default cache directory when [`CACHE_ENV`] is unset.
pub const CACHE_DEFAULT_DIR: &str = ".cache";

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("parameter n must be >= 1".into()));
    }
    Ok(())
}

/// The Gram matrix `A_{k,n}` of noncrossing pairings of `2k` points, rows
/// and columns in canonical enumeration order.
pub fn gram_matrix(k: usize, n: u64) -> Result<RationalMatrix> {
    check_n(n)?;
    let pairings = enumerate_pairings(k)?;
    let base = BigInt::from(n);
    let rows: Vec<Vec<Rat>> = pairings
        .par_iter()
        .map(|p| {
            pairings
                .iter()
                .map(|q| Rat::from_integer(base.pow(loop_count(p, q) as u32)))
                .collect()
        })
        .collect();
    RationalMatrix::from_rows(rows)
}

/// The Weingarten matrix `W_{k,n} = A_{k,n}^{-1}`, exactly.
///
/// For `n = 1` and `k >= 2` the Gram matrix is all ones and has no inverse;
/// this is reported as [`Error::SingularGram`].
pub fn weingarten_matrix(k: usize, n: u64) -> Result<RationalMatrix> {
    check_n(n)?;
    if n == 1 && k >= 2 {
        return Err(Error::SingularGram { k, n });
    }
    gram_matrix(k, n)?.invert().map_err(|e| match e {
        Error::SingularMatrix => Error::SingularGram { k, n },
        e => e,
    })
}

/// As [`weingarten_matrix`], but consulting (and populating) a disk cache.
pub fn weingarten_matrix_cached(k: usize, n: u64, cache: &WeingartenCache) -> Result<RationalMatrix> {
    if let Some(w) = cache.load(k, n) {
        return Ok(w);
    }
    let w = weingarten_matrix(k, n)?;
    cache.store(k, n, &w)?;
    Ok(w)
}

/// On-disk store for Weingarten matrices, one JSON file per `(k, n)`.
///
/// Writes go through a temporary file in the same directory followed by an
/// atomic rename, so concurrent readers never observe a torn file and
/// concurrent writers simply race to produce identical content.  Any
/// unreadable, mismatched, or unparsable file is treated as a miss.
#[derive(Clone, Debug)]
pub struct WeingartenCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CachedMatrix {
    k: usize,
    n: u64,
    entries: Vec<Vec<String>>,
}

impl WeingartenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        WeingartenCache { dir: dir.into() }
    }

    /// Reads the directory from [`CACHE_ENV`], defaulting to `./.cache`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(CACHE_DEFAULT_DIR));
        WeingartenCache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The file that would hold `W_{k,n}`.
    pub fn path_for(&self, k: usize, n: u64) -> PathBuf {
        self.dir.join(format!("wg_k{k}_n{n}.json"))
    }

    /// Returns the cached matrix, or `None` on miss or any validation
    /// failure.
    pub fn load(&self, k: usize, n: u64) -> Option<RationalMatrix> {
        let text = std::fs::read_to_string(self.path_for(k, n)).ok()?;
        let cached: CachedMatrix = serde_json::from_str(&text).ok()?;
        if cached.k != k || cached.n != n {
            return None;
        }
        let size: usize = catalan(k).try_into().ok()?;
        if cached.entries.len() != size || cached.entries.iter().any(|r| r.len() != size) {
            return None;
        }
        let rows: Option<Vec<Vec<Rat>>> = cached
            .entries
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s).ok()).collect())
            .collect();
        RationalMatrix::from_rows(rows?).ok()
    }

    /// Atomically writes the matrix for `(k, n)`.
    pub fn store(&self, k: usize, n: u64, w: &RationalMatrix) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let entries: Vec<Vec<String>> = (0..w.nrows())
            .map(|i| (0..w.ncols()).map(|j| format_rat(w.at(i, j))).collect())
            .collect();
        let payload = serde_json::to_string(&CachedMatrix { k, n, entries })?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(payload.as_bytes())?;
        tmp.persist(self.path_for(k, n))
            .map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}

/// JSON form of a Gram or Weingarten matrix:
/// `{"k": .., "n": .., "entries": [["p/q", ..], ..]}` — the same layout the
/// cache files use.
pub fn matrix_json(k: usize, n: u64, m: &RationalMatrix) -> String {
    let entries: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| format_rat(m.at(i, j))).collect())
        .collect();
    serde_json::to_string(&CachedMatrix { k, n, entries }).expect("matrix data always serializes")
}

/// A monomial in the fundamental coordinates `u_{ij}`, written as the list
/// of its index pairs in order.  The string form is `"i,j;i,j;..."`, e.g.
/// `"1,1;1,1"` for `u_11^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSpec {
    factors: Vec<(u64, u64)>,
}

impl MonomialSpec {
    /// Builds a monomial from 1-based index pairs.
    pub fn new(factors: Vec<(u64, u64)>) -> Result<Self> {
        if factors.iter().any(|&(i, j)| i == 0 || j == 0) {
            return Err(Error::InvalidInput("monomial indices are 1-based".into()));
        }
        Ok(MonomialSpec { factors })
    }

    pub fn factors(&self) -> &[(u64, u64)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }
}

impl FromStr for MonomialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return MonomialSpec::new(Vec::new());
        }
        let factors = s
            .split(';')
            .map(|part| {
                let (i, j) = part
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidInput(format!("bad factor {part:?}")))?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::InvalidInput(format!("bad index in {part:?}")))
                };
                Ok((parse(i)?, parse(j)?))
            })
            .collect::<Result<Vec<_>>>()?;
        MonomialSpec::new(factors)
    }
}

impl std::fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(i, j)| format!("{i},{j}"))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// True when the index tuple is constant on every pair of the pairing.
fn delta(p: &NcPairing, idx: &[u64]) -> bool {
    p.pairs().iter().all(|&(a, b)| idx[a - 1] == idx[b - 1])
}

fn split_indices(m: &MonomialSpec) -> (Vec<u64>, Vec<u64>) {
    let rows = m.factors().iter().map(|&(i, _)| i).collect();
    let cols = m.factors().iter().map(|&(_, j)| j).collect();
    (rows, cols)
}

/// Integral of a monomial in the fundamental coordinates against the Haar
/// state, via the Weingarten sum.  Odd-degree monomials vanish identically.
pub fn integrate_monomial(n: u64, m: &MonomialSpec) -> Result<Rat> {
    check_n(n)?;
    if m.factors().iter().any(|&(i, j)| i > n || j > n) {
        return Err(Error::InvalidInput(format!(
            "monomial index out of range for n = {n}"
        )));
    }
    if m.degree() % 2 == 1 {
        return Ok(Rat::zero());
    }
    let k = m.degree() / 2;
    let pairings = enumerate_pairings(k)?;
    let w = weingarten_matrix(k, n)?;
    Ok(integrate_with(&w, &pairings, m))
}

/// The Weingarten sum with a precomputed matrix; shared by
/// [`integrate_monomial`] and the expansion cross-check.
fn integrate_with(w: &RationalMatrix, pairings: &[NcPairing], m: &MonomialSpec) -> Rat {
    let (rows, cols) = split_indices(m);
    let mut acc = Rat::zero();
    for (pi, p) in pairings.iter().enumerate() {
        if !delta(p, &rows) {
            continue;
        }
        for (qi, q) in pairings.iter().enumerate() {
            if delta(q, &cols) {
                acc += w.at(pi, qi);
            }
        }
    }
    acc
}

/// The truncated character moment `Tr(W_{k,n} A_{k,s})`: the `2k`-th moment
/// of the sum of the first `s` diagonal coordinates.  Requires `1 <= s <= n`.
pub fn truncated_character_moment(k: usize, n: u64, s: u64) -> Result<Rat> {
    truncated_character_moment_with(k, n, s, None)
}

/// As [`truncated_character_moment`], with a cache for the Weingarten side.
pub fn truncated_character_moment_cached(
    k: usize,
    n: u64,
    s: u64,
    cache: &WeingartenCache,
) -> Result<Rat> {
    truncated_character_moment_with(k, n, s, Some(cache))
}

fn truncated_character_moment_with(
    k: usize,
    n: u64,
    s: u64,
    cache: Option<&WeingartenCache>,
) -> Result<Rat> {
    check_n(n)?;
    if s < 1 || s > n {
        return Err(Error::InvalidInput(format!(
            "truncation s = {s} must satisfy 1 <= s <= n = {n}"
        )));
    }
    let w = match cache {
        Some(c) => weingarten_matrix_cached(k, n, c)?,
        None => weingarten_matrix(k, n)?,
    };
    w.trace_product(&gram_matrix(k, s)?)
}

/// The same moment computed the slow way: expanding the truncated character
/// as a sum of `s^{2k}` diagonal monomials and integrating each one.  Used
/// to cross-check the trace formula; exponential in `k`, so keep `s` and `k`
/// small.
pub fn expanded_character_moment(k: usize, n: u64, s: u64) -> Result<Rat> {
    check_n(n)?;
    if s < 1 || s > n {
        return Err(Error::InvalidInput(format!(
            "truncation s = {s} must satisfy 1 <= s <= n = {n}"
        )));
    }
    let pairings = enumerate_pairings(k)?;
    let w = weingarten_matrix(k, n)?;
    let mut acc = Rat::zero();
    let mut tuple = vec![1u64; 2 * k];
    loop {
        let m = MonomialSpec::new(tuple.iter().map(|&i| (i, i)).collect())?;
        acc += integrate_with(&w, &pairings, &m);
        // Advance the odometer over [1..=s]^{2k}.
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                return Ok(acc);
            }
            if tuple[pos] < s {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = 1;
            pos += 1;
        }
    }
}

/// One row of the semicircle convergence report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemicircleRow {
    pub n: u64,
    /// `(n/s)^k` times the truncated character moment.
    pub value: Rat,
    /// Absolute deviation of `value` from the Catalan number `C_k`.
    pub error: Rat,
}

/// Scaled truncated moments along a sequence of sizes `n`, showing the
/// approach of `(n/s)^k Tr(W_{k,n} A_{k,s})` to the Catalan number `C_k`.
pub fn asymptotic_semicircle_report(k: usize, s: u64, ns: &[u64]) -> Result<Vec<SemicircleRow>> {
    asymptotic_semicircle_report_with(k, s, ns, None)
}

/// As [`asymptotic_semicircle_report`], consulting a Weingarten cache.
pub fn asymptotic_semicircle_report_cached(
    k: usize,
    s: u64,
    ns: &[u64],
    cache: &WeingartenCache,
) -> Result<Vec<SemicircleRow>> {
    asymptotic_semicircle_report_with(k, s, ns, Some(cache))
}

fn asymptotic_semicircle_report_with(
    k: usize,
    s: u64,
    ns: &[u64],
    cache: Option<&WeingartenCache>,
) -> Result<Vec<SemicircleRow>> {
    let target = catalan_rat(k);
    ns.iter()
        .map(|&n| {
            let moment = truncated_character_moment_with(k, n, s, cache)?;
            let scale = Rat::new(BigInt::from(n), BigInt::from(s));
            let mut scaled = moment;
            for _ in 0..k {
                scaled *= &scale;
            }
            let mut error = &scaled - &target;
            if error < Rat::zero() {
                error = -error;
            }
            Ok(SemicircleRow {
                n,
                value: scaled,
                error,
            })
        })
        .collect()
}
