//! Matrix-model oracles: Haar sampling on the unit quaternions (as 2x2
//! special unitaries), Monte-Carlo integrals of squared-modulus monomials
//! that cross-check the exact Weingarten values at `n = 2`, the exact
//! fixed-point moment model for small permutation groups, and the
//! Pauli-basis magic biunitary built from a quaternion sample.
//!
//! Monte-Carlo runs are deterministic: a fixed seed is fanned out into
//! fixed-size counter-mode blocks, one stream per block, and the block
//! results are merged in block order — thread scheduling cannot change the
//! output.  Estimates carry plug-in standard errors; acceptance bands in
//! the test suites are 4 standard errors wide.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freeprob::MomentSequence;
use crate::nc::Permutation;
use crate::rational::{rat_int, Rat};
use crate::weingarten::MonomialSpec;

pub type CMat2 = Matrix2<Complex<f64>>;
pub type CMat4 = Matrix4<Complex<f64>>;
pub type CVec4 = Vector4<Complex<f64>>;

/// Minimum sample count accepted by the Monte-Carlo estimators.
pub const MC_MIN_SAMPLES: u64 = 10_000;

/// Samples per independent RNG stream; the block layout (not the thread
/// count) determines the output.
const MC_BLOCK: u64 = 1 << 12;

/// Largest group size for the brute-force fixed-point model.
pub const SN_MODEL_CAP: usize = 5;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// A unit quaternion `(x0, x1, x2, x3)`, identified with the special
/// unitary `[[x0 + i x3, x1 + i x2], [-x1 + i x2, x0 - i x3]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Element {
    q: [f64; 4],
}

impl SU2Element {
    /// Normalizes the given quaternion onto the unit sphere.
    pub fn new(q: [f64; 4]) -> Result<Self> {
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite quaternion".into()));
        }
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidInput("zero quaternion has no direction".into()));
        }
        Ok(SU2Element {
            q: [q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm],
        })
    }

    pub fn identity() -> Self {
        SU2Element { q: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn matrix(&self) -> CMat2 {
        let [x0, x1, x2, x3] = self.q;
        Matrix2::new(c(x0, x3), c(x1, x2), c(-x1, x2), c(x0, -x3))
    }

    pub fn det(&self) -> Complex<f64> {
        let m = self.matrix();
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    /// Frobenius distance of `U* U` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let m = self.matrix();
        (m.adjoint() * m - CMat2::identity()).norm()
    }

    /// Squared modulus of the `(i, j)` entry, indices 1-based.
    pub fn entry_modulus_sq(&self, i: usize, j: usize) -> f64 {
        assert!((1..=2).contains(&i) && (1..=2).contains(&j), "indices are 1-based in 1..=2");
        self.matrix()[(i - 1, j - 1)].norm_sqr()
    }
}

/// Draws one Haar-distributed element: four standard Gaussians normalized
/// to the unit sphere.
pub fn haar_su2(rng: &mut impl Rng) -> SU2Element {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        // The zero vector has probability zero; retry on underflow.
        if let Ok(el) = SU2Element::new(q) {
            return el;
        }
    }
}

/// A deterministic Haar sampler: fixed `(seed, stream)` reproduces the same
/// sequence element by element.
pub struct Su2Sampler {
    rng: ChaCha8Rng,
}

impl Su2Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Su2Sampler { rng }
    }

    pub fn next_element(&mut self) -> SU2Element {
        haar_su2(&mut self.rng)
    }
}

impl Iterator for Su2Sampler {
    type Item = SU2Element;

    fn next(&mut self) -> Option<SU2Element> {
        Some(self.next_element())
    }
}

/// A monomial in the squared moduli of the 2x2 entries:
/// `prod |u_ij|^(2 p_ij)`.  This is the guarded class on which the
/// commutative sampler provably agrees with the noncommutative Weingarten
/// integral at `n = 2`: every entry appears an even number of times, so no
/// sign twist can contribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModulusMonomial {
    powers: [[u32; 2]; 2],
}

impl ModulusMonomial {
    pub fn new(powers: [[u32; 2]; 2]) -> Self {
        ModulusMonomial { powers }
    }

    /// Reads a plain entry monomial as a modulus monomial.  Every index
    /// pair must occur an even number of times — the guard that keeps the
    /// commutative oracle honest — and indices must fit a 2x2 matrix.
    pub fn from_monomial_spec(spec: &MonomialSpec) -> Result<Self> {
        let mut counts = [[0u32; 2]; 2];
        for &(i, j) in spec.factors() {
            if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
                return Err(Error::InvalidInput(format!(
                    "entry ({i},{j}) is outside the 2x2 matrix"
                )));
            }
            counts[i as usize - 1][j as usize - 1] += 1;
        }
        for (i, row) in counts.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                if count % 2 != 0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({},{}) appears {count} times; the sampler only \
                         handles monomials even in every entry",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ModulusMonomial {
            powers: counts.map(|row| row.map(|count| count / 2)),
        })
    }

    /// The equivalent plain entry monomial, factors grouped entry by entry.
    pub fn to_monomial_spec(&self) -> MonomialSpec {
        let mut factors = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for _ in 0..2 * self.powers[i][j] {
                    factors.push((i as u64 + 1, j as u64 + 1));
                }
            }
        }
        MonomialSpec::new(factors).expect("in-range factors always validate")
    }

    pub fn powers(&self) -> [[u32; 2]; 2] {
        self.powers
    }

    /// Total degree as an entry monomial (twice the modulus degree).
    pub fn degree(&self) -> usize {
        2 * self
            .powers
            .iter()
            .flatten()
            .map(|&p| p as usize)
            .sum::<usize>()
    }

    pub fn evaluate(&self, x: &SU2Element) -> f64 {
        let mut acc = 1.0;
        for i in 0..2 {
            for j in 0..2 {
                if self.powers[i][j] > 0 {
                    acc *= x
                        .entry_modulus_sq(i + 1, j + 1)
                        .powi(self.powers[i][j] as i32);
                }
            }
        }
        acc
    }
}

/// A Monte-Carlo estimate with its plug-in standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Deviation of the mean from a reference value, in standard errors.
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        let dev = (self.mean - reference).abs();
        if dev == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            dev / self.std_error
        }
    }
}

fn block_layout(samples: u64) -> Vec<(u64, u64)> {
    let mut blocks = Vec::new();
    let mut remaining = samples;
    let mut stream = 0;
    while remaining > 0 {
        let count = remaining.min(MC_BLOCK);
        blocks.push((stream, count));
        remaining -= count;
        stream += 1;
    }
    blocks
}

fn merge_estimate(partials: Vec<(f64, f64, u64)>) -> McEstimate {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut n = 0u64;
    for (s, s2, count) in partials {
        sum += s;
        sum_sq += s2;
        n += count;
    }
    let mean = sum / n as f64;
    let variance = (sum_sq / n as f64 - mean * mean).max(0.0);
    McEstimate {
        mean,
        std_error: (variance / n as f64).sqrt(),
        samples: n,
    }
}

/// Monte-Carlo average of a squared-modulus monomial over Haar samples.
/// On its guarded class this agrees with the exact Weingarten integral at
/// `n = 2`, which is what the verification suite checks.
pub fn su2_mc_moment(
    monomial: &ModulusMonomial,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MC_MIN_SAMPLES} samples for a usable error bar, got {samples}"
        )));
    }
    let partials: Vec<(f64, f64, u64)> = block_layout(samples)
        .into_par_iter()
        .map(|(stream, count)| {
            let mut sampler = Su2Sampler::new(seed, stream);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let v = monomial.evaluate(&sampler.next_element());
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq, count)
        })
        .collect();
    Ok(merge_estimate(partials))
}

/// Exact moments of the fixed-point count under the uniform measure on all
/// permutations of `n` points: `m_k = (1/n!) * sum over sigma of fix(sigma)^k`.
pub fn sn_fixed_point_moments(n: usize, horizon: usize) -> Result<MomentSequence> {
    if n > SN_MODEL_CAP {
        return Err(Error::CapExceeded {
            what: "permutation model size n",
            requested: n,
            limit: SN_MODEL_CAP,
        });
    }
    if horizon == 0 {
        return Err(Error::InvalidInput("moment horizon must be at least 1".into()));
    }
    let perms = Permutation::all(n)?;
    let order = rat_int(perms.len() as i64);
    let mut moments = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let mut total = Rat::zero();
        for sigma in &perms {
            let fix = BigInt::from(sigma.fixed_point_count());
            total += Rat::from_integer(fix.pow(k as u32));
        }
        moments.push(total / &order);
    }
    MomentSequence::new(moments)
}

/// The orthonormal basis `{I, X, Y, Z}` of the 2x2 matrices under the
/// normalized trace inner product `<a, b> = (1/2) Tr(a* b)`.
pub fn pauli_basis() -> [CMat2; 4] {
    let i = Complex::i();
    [
        CMat2::identity(),
        Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Matrix2::new(c(0.0, 0.0), -i, i, c(0.0, 0.0)),
        Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    ]
}

/// Coordinates of a 2x2 matrix in the Pauli basis.
fn pauli_coords(m: &CMat2) -> CVec4 {
    let basis = pauli_basis();
    CVec4::from_fn(|i, _| (basis[i].adjoint() * m).trace() * c(0.5, 0.0))
}

/// A 4x4 array of 4x4 rank-one projections whose rows and columns each sum
/// to the identity.
#[derive(Clone, Debug)]
pub struct MagicMatrix {
    blocks: Vec<CMat4>,
}

/// Worst-case deviations of a [`MagicMatrix`] from its defining relations,
/// all in Frobenius norm.
#[derive(Clone, Copy, Debug)]
pub struct MagicResiduals {
    /// max over entries of the distance of `u^2` from `u`
    pub projection: f64,
    /// max over entries of the distance of `u` from `u*`
    pub self_adjoint: f64,
    /// max over rows of the distance of the row sum from the identity
    pub row_sum: f64,
    /// max over columns of the distance of the column sum from the identity
    pub col_sum: f64,
    /// max over same-row and same-column pairs of the norm of the product
    pub orthogonality: f64,
}

impl MagicResiduals {
    pub fn max(&self) -> f64 {
        self.projection
            .max(self.self_adjoint)
            .max(self.row_sum)
            .max(self.col_sum)
            .max(self.orthogonality)
    }
}

impl MagicMatrix {
    pub fn block(&self, i: usize, j: usize) -> &CMat4 {
        assert!(i < 4 && j < 4, "block indices are 0-based in 0..4");
        &self.blocks[4 * i + j]
    }

    /// The diagonal sum, a self-adjoint 4x4 matrix with spectrum in `[0, 4]`.
    pub fn diagonal_character(&self) -> CMat4 {
        (0..4).map(|i| self.block(i, i)).sum()
    }

    pub fn residuals(&self) -> MagicResiduals {
        let id = CMat4::identity();
        let mut res = MagicResiduals {
            projection: 0.0,
            self_adjoint: 0.0,
            row_sum: 0.0,
            col_sum: 0.0,
            orthogonality: 0.0,
        };
        for i in 0..4 {
            let mut row: CMat4 = CMat4::zeros();
            let mut col: CMat4 = CMat4::zeros();
            for j in 0..4 {
                let u = self.block(i, j);
                res.projection = res.projection.max((u * u - u).norm());
                res.self_adjoint = res.self_adjoint.max((u - u.adjoint()).norm());
                row += u;
                col += self.block(j, i);
                for l in 0..j {
                    res.orthogonality = res
                        .orthogonality
                        .max((self.block(i, j) * self.block(i, l)).norm())
                        .max((self.block(j, i) * self.block(l, i)).norm());
                }
            }
            res.row_sum = res.row_sum.max((row - id).norm());
            res.col_sum = res.col_sum.max((col - id).norm());
        }
        res
    }
}

/// Builds the magic biunitary of a quaternion sample: entry `(i, j)` is the
/// rank-one projection onto `c_i x c_j` inside the 4-dimensional matrix
/// space with its Pauli basis.  Conjugation by unitaries preserves the
/// basis orthogonality, which is what makes every row and column a
/// partition of the identity.
pub fn pauli_magic(x: &SU2Element) -> Result<MagicMatrix> {
    if x.unitarity_residual() > 1e-12 {
        return Err(Error::InvalidInput(
            "input is not unitary to working precision".into(),
        ));
    }
    let basis = pauli_basis();
    let xm = x.matrix();
    let mut blocks = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            let v = pauli_coords(&(basis[i] * xm * basis[j]));
            blocks.push(&v * v.adjoint());
        }
    }
    Ok(MagicMatrix { blocks })
}

/// A fixed-range histogram with equal-width bins; samples are clamped into
/// the range.
#[derive(Clone, Debug)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo);
        Histogram {
            lo,
            hi,
            counts: vec![0; bins],
        }
    }

    pub fn record(&mut self, x: f64) {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        let idx = ((x - self.lo) / w).floor();
        let idx = (idx.max(0.0) as usize).min(self.counts.len() - 1);
        self.counts[idx] += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn merge(&mut self, other: &Histogram) {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// CSV rows `value,count` with bin centers as values.
    pub fn to_csv(&self) -> String {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        let mut out = String::from("value,count\n");
        for (i, count) in self.counts.iter().enumerate() {
            let center = self.lo + (i as f64 + 0.5) * w;
            out.push_str(&format!("{center:.6},{count}\n"));
        }
        out
    }
}

/// Sampled moments of the diagonal character of the Pauli magic biunitary,
/// plus the eigenvalue histogram.  The moments are reported as data with
/// error bars; no limit law is asserted for them.
#[derive(Clone, Debug)]
pub struct CharacterMc {
    /// `moments[k]` estimates the `k`-th normalized trace power, `k = 0`
    /// included.
    pub moments: Vec<McEstimate>,
    /// Histogram of the character eigenvalues over `[0, 4]`.
    pub histogram: Histogram,
}

impl CharacterMc {
    /// JSON report `{"moments": [{"mean": .., "std_error": .., "samples": ..}]}`.
    pub fn moments_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            moments: &'a [McEstimate],
        }
        serde_json::to_string(&Report { moments: &self.moments })
            .expect("float report always serializes")
    }
}

const CHARACTER_HISTOGRAM_BINS: usize = 80;

/// Estimates `E[(1/4) Tr(C^k)]` for `k` up to the horizon, where `C` is the
/// diagonal character of the magic biunitary at a Haar sample, and records
/// the eigenvalues of `C`.
pub fn pauli_character_mc(samples: u64, horizon: usize, seed: u64) -> Result<CharacterMc> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MC_MIN_SAMPLES} samples for a usable error bar, got {samples}"
        )));
    }
    struct Partial {
        sums: Vec<f64>,
        sum_sqs: Vec<f64>,
        count: u64,
        histogram: Histogram,
    }
    let partials: Vec<Partial> = block_layout(samples)
        .into_par_iter()
        .map(|(stream, count)| {
            let mut sampler = Su2Sampler::new(seed, stream);
            let mut sums = vec![0.0; horizon + 1];
            let mut sum_sqs = vec![0.0; horizon + 1];
            let mut histogram = Histogram::new(0.0, 4.0, CHARACTER_HISTOGRAM_BINS);
            for _ in 0..count {
                let magic = pauli_magic(&sampler.next_element())
                    .expect("haar samples are unitary by construction");
                let eig = magic.diagonal_character().symmetric_eigen();
                for &lambda in eig.eigenvalues.iter() {
                    histogram.record(lambda);
                }
                for (k, (s, s2)) in sums.iter_mut().zip(sum_sqs.iter_mut()).enumerate() {
                    let v = eig
                        .eigenvalues
                        .iter()
                        .map(|&lambda| lambda.powi(k as i32))
                        .sum::<f64>()
                        / 4.0;
                    *s += v;
                    *s2 += v * v;
                }
            }
            Partial { sums, sum_sqs, count, histogram }
        })
        .collect();
    let mut histogram = Histogram::new(0.0, 4.0, CHARACTER_HISTOGRAM_BINS);
    let mut moments = Vec::with_capacity(horizon + 1);
    for k in 0..=horizon {
        let per_block: Vec<(f64, f64, u64)> = partials
            .iter()
            .map(|p| (p.sums[k], p.sum_sqs[k], p.count))
            .collect();
        moments.push(merge_estimate(per_block));
    }
    for p in &partials {
        histogram.merge(&p.histogram);
    }
    Ok(CharacterMc { moments, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeprob::{moment_compare, Law};
    use crate::graphs::{classical_character_measure_graph, RootedColoredGraph};
    use crate::rational::{rat, rat_to_f64};
    use crate::weingarten::{integrate_monomial, truncated_character_moment};

    #[test]
    fn sampler_is_deterministic_per_seed_and_stream() {
        let a: Vec<SU2Element> = Su2Sampler::new(7, 0).take(5).collect();
        let b: Vec<SU2Element> = Su2Sampler::new(7, 0).take(5).collect();
        assert_eq!(a, b);
        let other_stream: Vec<SU2Element> = Su2Sampler::new(7, 1).take(5).collect();
        assert_ne!(a, other_stream);
        let other_seed: Vec<SU2Element> = Su2Sampler::new(8, 0).take(5).collect();
        assert_ne!(a, other_seed);
    }

    #[test]
    fn samples_are_special_unitaries() {
        let mut sampler = Su2Sampler::new(1, 0);
        for _ in 0..100 {
            let x = sampler.next_element();
            assert!((x.det() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(x.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn first_coordinate_is_centered() {
        let n = 100_000;
        let mean = Su2Sampler::new(2, 0)
            .take(n)
            .map(|x| x.quaternion()[0])
            .sum::<f64>()
            / n as f64;
        // Var(x0) = 1/4 on the unit sphere; 4 standard errors.
        let band = 4.0 * (0.25f64 / n as f64).sqrt();
        assert!(mean.abs() < band, "mean {mean} outside +-{band}");
    }

    #[test]
    fn top_left_modulus_is_uniform_on_unit_interval() {
        // |top-left|^2 = x0^2 + x3^2 is uniform on [0, 1]: check the first
        // two moments.
        let est = su2_mc_moment(&ModulusMonomial::new([[1, 0], [0, 0]]), 100_000, 3).unwrap();
        assert!(est.sigmas_from(0.5) < 4.0, "E|a|^2 = {} +- {}", est.mean, est.std_error);
        let est = su2_mc_moment(&ModulusMonomial::new([[2, 0], [0, 0]]), 100_000, 3).unwrap();
        assert!(est.sigmas_from(1.0 / 3.0) < 4.0);
    }

    #[test]
    fn mc_results_are_reproducible_and_need_enough_samples() {
        let m = ModulusMonomial::new([[1, 0], [0, 1]]);
        let a = su2_mc_moment(&m, 20_000, 11).unwrap();
        let b = su2_mc_moment(&m, 20_000, 11).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std_error, b.std_error);
        assert!(su2_mc_moment(&m, 9_999, 11).is_err());
    }

    #[test]
    fn fourth_modulus_moment_matches_truncated_character() {
        let exact = truncated_character_moment(2, 2, 1).unwrap();
        assert_eq!(exact, rat(1, 3));
        let est = su2_mc_moment(&ModulusMonomial::new([[2, 0], [0, 0]]), 50_000, 5).unwrap();
        assert!(
            est.sigmas_from(rat_to_f64(&exact)) < 4.0,
            "{} vs 1/3 with std error {}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn mixed_modulus_moment_matches_exact_integral() {
        let spec = MonomialSpec::new(vec![(1, 1), (1, 1), (2, 2), (2, 2)]).unwrap();
        let exact = integrate_monomial(2, &spec).unwrap();
        assert_eq!(exact, rat(1, 3));
        let m = ModulusMonomial::from_monomial_spec(&spec).unwrap();
        assert_eq!(m.powers(), [[1, 0], [0, 1]]);
        let est = su2_mc_moment(&m, 50_000, 6).unwrap();
        assert!(est.sigmas_from(rat_to_f64(&exact)) < 4.0);
    }

    #[test]
    fn modulus_monomial_guards() {
        // Odd occurrence count is refused.
        let odd = MonomialSpec::new(vec![(1, 1), (1, 1), (1, 2)]).unwrap();
        assert!(ModulusMonomial::from_monomial_spec(&odd).is_err());
        // Out-of-range entry is refused.
        let big = MonomialSpec::new(vec![(3, 1), (3, 1)]).unwrap();
        assert!(ModulusMonomial::from_monomial_spec(&big).is_err());
        // Round trip through the grouped entry form.
        let m = ModulusMonomial::new([[1, 0], [0, 2]]);
        assert_eq!(m.degree(), 6);
        let spec = m.to_monomial_spec();
        assert_eq!(ModulusMonomial::from_monomial_spec(&spec).unwrap(), m);
    }

    #[test]
    fn fixed_point_moments_small_groups() {
        let m1 = sn_fixed_point_moments(1, 4).unwrap();
        for k in 1..=4 {
            assert_eq!(m1.moment(k), &rat_int(1));
        }
        let m2 = sn_fixed_point_moments(2, 4).unwrap();
        let expect = [1, 2, 4, 8];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(m2.moment(k + 1), &rat_int(e));
        }
        let m3 = sn_fixed_point_moments(3, 5).unwrap();
        let expect = [1, 2, 5, 14, 41];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(m3.moment(k + 1), &rat_int(e));
        }
    }

    #[test]
    fn fixed_point_moments_track_free_poisson_until_five() {
        let fixed = sn_fixed_point_moments(3, 5).unwrap();
        let poisson = Law::FreePoisson { rate: rat_int(1) }.moments(5).unwrap();
        let report = moment_compare(&fixed, &poisson);
        assert_eq!(report.first_mismatch, Some(5));
        assert_eq!(report.max_deviation, rat_int(1));
    }

    #[test]
    fn fixed_point_moments_cap() {
        assert!(sn_fixed_point_moments(6, 3).is_err());
        assert!(sn_fixed_point_moments(5, 3).is_ok());
    }

    #[test]
    fn fixed_point_moments_match_edgeless_graph_measure() {
        let g = RootedColoredGraph::new(3, 0, vec![]).unwrap();
        let from_graph = classical_character_measure_graph(&g, 5).unwrap();
        let direct = sn_fixed_point_moments(3, 5).unwrap();
        assert!(moment_compare(&from_graph, &direct).matches());
    }

    #[test]
    fn pauli_basis_is_orthonormal() {
        let basis = pauli_basis();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let inner = (a.adjoint() * b).trace() * c(0.5, 0.0);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn magic_at_identity_aligns_with_matrix_units() {
        let magic = pauli_magic(&SU2Element::identity()).unwrap();
        // Block (0,0) projects onto the identity matrix, the first basis
        // vector: the matrix unit E11.
        let mut e11 = CMat4::zeros();
        e11[(0, 0)] = c(1.0, 0.0);
        assert!((magic.block(0, 0) - e11).norm() < 1e-12);
        let res = magic.residuals();
        assert!(res.max() < 1e-12, "{res:?}");
    }

    #[test]
    fn magic_relations_hold_on_haar_samples() {
        let mut sampler = Su2Sampler::new(9, 0);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let magic = pauli_magic(&sampler.next_element()).unwrap();
            worst = worst.max(magic.residuals().max());
        }
        assert!(worst < 1e-10, "worst residual {worst}");
    }

    #[test]
    fn character_moments_start_at_one() {
        let mc = pauli_character_mc(10_000, 3, 4).unwrap();
        // m_0 and m_1 are 1 sample by sample: the diagonal blocks are four
        // rank-one projections, so the trace of their sum is always 4.
        assert!((mc.moments[0].mean - 1.0).abs() < 1e-9);
        assert!((mc.moments[1].mean - 1.0).abs() < 1e-9);
        assert!(mc.moments[1].std_error < 1e-9);
        assert!(mc.moments[2].std_error > 0.0);
        assert_eq!(mc.histogram.total(), 4 * 10_000);
    }

    #[test]
    fn character_outputs_serialize() {
        let mc = pauli_character_mc(10_000, 2, 4).unwrap();
        let json = mc.moments_json();
        assert!(json.starts_with("{\"moments\":[{"));
        let csv = mc.histogram.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("value,count"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.025000,"));
        assert_eq!(csv.lines().count(), 1 + 80);
    }

    #[test]
    fn histogram_clamps_out_of_range_values() {
        let mut h = Histogram::new(0.0, 4.0, 4);
        h.record(-0.5);
        h.record(4.5);
        h.record(1.5);
        assert_eq!(h.counts(), &[1, 1, 0, 1]);
        assert_eq!(h.total(), 3);
    }
}
