//! The end-to-end verification suite: twelve numbered criteria that
//! exercise every module against frozen reference values, exact algebraic
//! identities, and independent Monte-Carlo oracles.  `verify all` on the
//! command line and the acceptance test target both run exactly these.
//!
//! Everything random is driven by a single seed through counter-mode
//! streams, so a run is reproducible bit for bit.  Statistical checks use
//! 4-standard-error bands (samplers) or a 5% relative band (the
//! random-matrix oracle); everything else is exact.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ade::{
    build_graph, circle_moment, poincare_coeffs, theorem_measure, verify_family, GraphFamily,
    MomentValue,
};
use crate::error::Result;
use crate::freeprob::{
    circular_star_moment, free_mult_conv, moment_compare, moments_to_cumulants,
    cumulants_to_moments, Law, MomentSequence, StarWord,
};
use crate::graphs::{
    classical_character_measure_graph, conjecture_compare, loop_moments, RootedColoredGraph,
};
use crate::models::{
    pauli_magic, sn_fixed_point_moments, su2_mc_moment, ModulusMonomial, Su2Sampler,
};
use crate::nc::catalan_rat;
use crate::rational::{format_rat, rat, rat_int, rat_to_f64, Rat};
use crate::report::VerificationReport;
use crate::weingarten::{
    asymptotic_semicircle_report_cached, expanded_character_moment, gram_matrix,
    truncated_character_moment, truncated_character_moment_cached, weingarten_matrix_cached,
    WeingartenCache,
};

use num_traits::Zero;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 7;

/// Shared state for a verification run: the Weingarten cache directory and
/// the seed for every randomized check.
pub struct VerifyCtx {
    cache: WeingartenCache,
    seed: u64,
}

impl VerifyCtx {
    pub fn new(cache: WeingartenCache, seed: u64) -> Self {
        VerifyCtx { cache, seed }
    }

    pub fn cache(&self) -> &WeingartenCache {
        &self.cache
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent RNG for one named sub-check; streams keep the criteria
    /// decoupled from each other.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Criterion 1: the two-pairing Gram matrix has the closed form
/// `[[n^2, n], [n, n^2]]`, and the Weingarten matrix inverts the Gram
/// matrix exactly through order 6 for small `n`.
pub fn criterion_01_gram_inverse(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 1: Gram/Weingarten exactness");
    for n in 2..=5u64 {
        let g = gram_matrix(2, n)?;
        let n_rat = rat_int(n as i64);
        let sq = &n_rat * &n_rat;
        let ok = g.nrows() == 2
            && g.at(0, 0) == &sq
            && g.at(1, 1) == &sq
            && g.at(0, 1) == &n_rat
            && g.at(1, 0) == &n_rat;
        report.push(
            format!("gram(2,{n}) closed form"),
            ok,
            format!("[[n^2, n], [n, n^2]] with n = {n}"),
        );
    }
    for n in [2u64, 3, 4] {
        for k in 1..=6usize {
            let w = weingarten_matrix_cached(k, n, ctx.cache())?;
            let prod = w.mul(&gram_matrix(k, n)?)?;
            report.push(
                format!("W * A = I at k={k}, n={n}"),
                prod.is_identity(),
                format!("{} x {} exact product", prod.nrows(), prod.ncols()),
            );
        }
    }
    Ok(report)
}

/// Criterion 2: with no truncation the even character moments are the
/// Catalan numbers, exactly.
pub fn criterion_02_full_character(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 2: full character moments are Catalan");
    for n in [2u64, 3, 4] {
        for k in 1..=6usize {
            let got = truncated_character_moment_cached(k, n, n, ctx.cache())?;
            let want = catalan_rat(k);
            report.push(
                format!("moment 2k={}, n={n}", 2 * k),
                got == want,
                format!("got {}, want {}", format_rat(&got), format_rat(&want)),
            );
        }
    }
    Ok(report)
}

/// Criterion 3: the first truncated case has the exact value 1/3, and the
/// quaternion sampler reproduces it within 4 standard errors.
pub fn criterion_03_truncated_vs_sampler(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 3: truncated moment vs sampling oracle");
    let exact = truncated_character_moment(2, 2, 1)?;
    report.push(
        "exact value",
        exact == rat(1, 3),
        format!("truncated moment (k=2, n=2, s=1) = {}", format_rat(&exact)),
    );
    let est = su2_mc_moment(&ModulusMonomial::new([[2, 0], [0, 0]]), 100_000, ctx.seed())?;
    let sigmas = est.sigmas_from(rat_to_f64(&exact));
    report.push(
        "sampler agreement",
        sigmas < 4.0,
        format!(
            "fourth modulus power: {:.6} +- {:.2e} vs 1/3 ({sigmas:.2} sigma)",
            est.mean, est.std_error
        ),
    );
    Ok(report)
}

/// Criterion 4: the trace formula agrees with brute-force monomial
/// expansion of the truncated character power.
pub fn criterion_04_expansion_consistency(_ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 4: expansion consistency");
    for (k, s, n) in [(1usize, 1u64, 2u64), (2, 1, 2), (2, 2, 3)] {
        let fast = truncated_character_moment(k, n, s)?;
        let slow = expanded_character_moment(k, n, s)?;
        report.push(
            format!("k={k}, s={s}, n={n}"),
            fast == slow,
            format!(
                "trace formula {} vs expansion {}",
                format_rat(&fast),
                format_rat(&slow)
            ),
        );
    }
    Ok(report)
}

/// Criterion 5: the scaled truncated moments converge to the Catalan
/// numbers as `n` doubles: the error vanishes identically at k = 1 and
/// strictly decreases for k = 2..4.
pub fn criterion_05_asymptotic_decay(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 5: asymptotic error decay");
    let ns = [8u64, 16, 32, 64];
    for k in 1..=4usize {
        let rows = asymptotic_semicircle_report_cached(k, 1, &ns, ctx.cache())?;
        let errors: Vec<Rat> = rows.iter().map(|r| r.error.clone()).collect();
        if k == 1 {
            let ok = errors.iter().all(|e| e.is_zero());
            report.push(
                "k=1 exact at every n",
                ok,
                "scaled first moment is Catalan(1) with zero error".to_string(),
            );
        } else {
            let ok = errors.windows(2).all(|w| w[1] < w[0]);
            let shown: Vec<String> = errors.iter().map(format_rat).collect();
            report.push(
                format!("k={k} strictly decreasing"),
                ok,
                format!("errors along n=8,16,32,64: {}", shown.join(", ")),
            );
        }
    }
    Ok(report)
}

/// Criterion 6: the closed-form limit laws — free Poisson moments,
/// semicircle even moments, and alternating star moments of the circular
/// law are all Catalan-family numbers.
pub fn criterion_06_limit_laws(_ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 6: limit laws");
    let poisson = Law::FreePoisson { rate: rat_int(1) }.moments(6)?;
    let expect = [1i64, 2, 5, 14, 42, 132];
    let ok = expect
        .iter()
        .enumerate()
        .all(|(i, &e)| poisson.moment(i + 1) == &rat_int(e));
    report.push(
        "free Poisson(1) moments",
        ok,
        "m_1..m_6 = 1, 2, 5, 14, 42, 132".to_string(),
    );
    let semi = Law::Semicircle { variance: rat_int(1) }.moments(6)?;
    let even_ok = (1..=3usize).all(|j| semi.moment(2 * j) == &catalan_rat(j));
    let odd_ok = (0..3usize).all(|j| semi.moment(2 * j + 1).is_zero());
    report.push(
        "semicircle moments",
        even_ok && odd_ok,
        "even moments Catalan, odd moments zero".to_string(),
    );
    let circ_ok = (1..=5usize).all(|k| {
        circular_star_moment(&StarWord::alternating(k))
            .map(|m| rat_int(m as i64) == catalan_rat(k))
            .unwrap_or(false)
    });
    report.push(
        "circular alternating moments",
        circ_ok,
        "star moments of (c c*)^k are Catalan(k) for k <= 5".to_string(),
    );
    Ok(report)
}

/// Criterion 7: the three-point permutation model has fixed-point moments
/// (1, 2, 5, 14, 41), agreeing with free Poisson through order 4 and
/// deviating by exactly 1 at order 5.
pub fn criterion_07_fixed_point_model(_ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 7: classical fixed-point model");
    let fixed = sn_fixed_point_moments(3, 5)?;
    let expect = [1i64, 2, 5, 14, 41];
    let ok = expect
        .iter()
        .enumerate()
        .all(|(i, &e)| fixed.moment(i + 1) == &rat_int(e));
    report.push("moments", ok, "m_1..m_5 = 1, 2, 5, 14, 41".to_string());
    let poisson = Law::FreePoisson { rate: rat_int(1) }.moments(5)?;
    let cmp = moment_compare(&fixed, &poisson);
    report.push(
        "free Poisson deviation",
        cmp.first_mismatch == Some(5) && cmp.max_deviation == rat_int(1),
        format!(
            "first mismatch at k={:?}, deviation {}",
            cmp.first_mismatch,
            format_rat(&cmp.max_deviation)
        ),
    );
    Ok(report)
}

/// Criterion 8: the magic biunitary relations hold to 1e-10 across 1000
/// Haar samples.
pub fn criterion_08_magic_residuals(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 8: magic biunitary residuals");
    let mut sampler = Su2Sampler::new(ctx.seed(), 8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let magic = pauli_magic(&sampler.next_element())?;
        worst = worst.max(magic.residuals().max());
    }
    report.push(
        "1000 Haar samples",
        worst < 1e-10,
        format!("worst residual {worst:.2e} (projection, self-adjointness, sums, orthogonality)"),
    );
    Ok(report)
}

fn family_is_exact(fam: &GraphFamily, horizon: usize) -> Result<bool> {
    let measure = theorem_measure(fam)?;
    for k in 0..=horizon {
        if circle_moment(&measure, k)?.exact().is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Criterion 9: the full catalog of families passes walk-vs-measure
/// verification with exact integer moments at horizon 6, including the
/// worked reference values.
pub fn criterion_09_family_catalog(_ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 9: family catalog at horizon 6");
    let mut families: Vec<GraphFamily> = Vec::new();
    families.extend((3..=8).map(|n| GraphFamily::A { n }));
    families.extend((3..=6).map(|n| GraphFamily::D { n }));
    families.extend((2..=4).map(|n| GraphFamily::AAffine { n }));
    families.extend((2..=4).map(|n| GraphFamily::DAffine { n }));
    families.push(GraphFamily::AInf { radius: 8 });
    families.push(GraphFamily::ALine { radius: 8 });
    families.push(GraphFamily::DInf { radius: 8 });
    for fam in &families {
        let fam_report = verify_family(fam, 6)?;
        let exact = family_is_exact(fam, 6)?;
        report.push(
            fam.to_string(),
            fam_report.pass() && exact,
            if exact {
                "walk counts equal exact measure moments through m_12".to_string()
            } else {
                "measure moment failed exact reconstruction".to_string()
            },
        );
    }

    // Worked reference values, checked on both sides.
    let a3 = loop_moments(&build_graph(&GraphFamily::A { n: 4 })?, 4);
    report.push(
        "path on 3 vertices: (m_2, m_4)",
        a3[2] == 1u32.into() && a3[4] == 2u32.into(),
        format!("got ({}, {}), want (1, 2)", a3[2], a3[4]),
    );
    let d4 = loop_moments(&build_graph(&GraphFamily::D { n: 3 })?, 4);
    report.push(
        "3-star from a leaf: m_4",
        d4[4] == 3u32.into(),
        format!("got {}, want 3", d4[4]),
    );
    let daff = loop_moments(&build_graph(&GraphFamily::DAffine { n: 2 })?, 6);
    report.push(
        "4-star from a leaf: (m_2, m_4, m_6)",
        daff[2] == 1u32.into() && daff[4] == 4u32.into() && daff[6] == 16u32.into(),
        format!("got ({}, {}, {}), want (1, 4, 16)", daff[2], daff[4], daff[6]),
    );
    Ok(report)
}

/// Criterion 10: the truncated half-line's series coefficients are the
/// Catalan numbers, equal to the circle moments of the alpha-weighted
/// uniform measure.
pub fn criterion_10_half_line_series(_ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 10: half-line series coefficients");
    let g = build_graph(&GraphFamily::AInf { radius: 8 })?;
    let coeffs = poincare_coeffs(&g, 4);
    let frozen = [1u32, 1, 2, 5, 14];
    let ok = coeffs.len() == 5 && coeffs.iter().zip(&frozen).all(|(c, &f)| c == &f.into());
    let shown: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
    report.push(
        "walk side",
        ok,
        format!("coefficients ({}), want (1, 1, 2, 5, 14)", shown.join(", ")),
    );
    let measure = theorem_measure(&GraphFamily::AInf { radius: 8 })?;
    let measure_ok = (0..=4usize).all(|k| {
        matches!(circle_moment(&measure, k), Ok(MomentValue::Exact(v)) if v == catalan_rat(k))
    });
    report.push(
        "measure side",
        measure_ok,
        "alpha-uniform circle moments equal the same Catalan numbers".to_string(),
    );
    Ok(report)
}

fn random_moments(rng: &mut impl Rng, len: usize) -> MomentSequence {
    let moments: Vec<Rat> = (0..len)
        .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=4)))
        .collect();
    MomentSequence::new(moments).expect("nonempty by construction")
}

/// Criterion 11: multiplicative convolution has its unit and is symmetric
/// on random data, and the comparator reports the known uncolored-edge
/// mismatch and the point-graph match.
pub fn criterion_11_product_machinery(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 11: product machinery");
    let mut rng = ctx.rng(11);
    let ones = MomentSequence::from_integers(&[1, 1, 1, 1, 1])?;
    let mut unit_ok = true;
    let mut symmetry_ok = true;
    for _ in 0..20 {
        let a = random_moments(&mut rng, 5);
        let b = random_moments(&mut rng, 5);
        unit_ok &= free_mult_conv(&a, &ones)?.moments() == a.moments();
        symmetry_ok &=
            free_mult_conv(&a, &b)?.moments() == free_mult_conv(&b, &a)?.moments();
    }
    report.push(
        "unit element",
        unit_ok,
        "convolving with the one-point sequence returns the input, 20 random trials".to_string(),
    );
    report.push(
        "symmetry",
        symmetry_ok,
        "convolution order does not matter, 20 random trials".to_string(),
    );

    // Fixed-point data of the uncolored single edge and of the complete
    // graph on 4 vertices: the product prediction overshoots at order 2.
    let k2 = RootedColoredGraph::new(2, 0, vec![(0, 1, "e".into())])?;
    let mut k4_edges = Vec::new();
    for v in 0..4usize {
        for w in v + 1..4 {
            k4_edges.push((v, w, "e".to_string()));
        }
    }
    let k4 = RootedColoredGraph::new(4, 0, k4_edges)?;
    let mu_k2 = classical_character_measure_graph(&k2, 3)?;
    let mu_k4 = classical_character_measure_graph(&k4, 3)?;
    let predicted = free_mult_conv(&mu_k2, &mu_k2)?;
    let cmp = conjecture_compare(&mu_k2, &mu_k2, &mu_k4)?;
    report.push(
        "uncolored edge mismatch",
        cmp.first_mismatch == Some(2)
            && predicted.moment(2) == &rat_int(3)
            && mu_k4.moment(2) == &rat_int(2),
        format!(
            "m_2: predicted {} vs product graph {}",
            format_rat(predicted.moment(2)),
            format_rat(mu_k4.moment(2))
        ),
    );
    let point = MomentSequence::from_integers(&[1, 1, 1])?;
    let against_point = conjecture_compare(&mu_k2, &point, &mu_k2)?;
    report.push(
        "point graph match",
        against_point.matches(),
        "product with a point graph reproduces the factor exactly".to_string(),
    );
    Ok(report)
}

/// Criterion 12: moment/cumulant round trips are exact on random data, and
/// the multiplicative convolution agrees with a random-matrix oracle.
pub fn criterion_12_convolution_engine(ctx: &VerifyCtx) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("criterion 12: convolution engine");
    let mut rng = ctx.rng(12);
    let mut roundtrip_ok = true;
    for _ in 0..100 {
        let m = random_moments(&mut rng, 8);
        let back = cumulants_to_moments(&moments_to_cumulants(&m)?)?;
        roundtrip_ok &= back.moments() == m.moments();
    }
    report.push(
        "moment/cumulant round trips",
        roundtrip_ok,
        "100 random length-8 sequences, exact".to_string(),
    );

    // Oracle: two-atom spectra, one rotated by a Haar orthogonal matrix.
    // The normalized trace powers of the product approximate the
    // multiplicative convolution at large size.
    let a_moments = MomentSequence::new(
        (1..=4).map(|k| (rat_int(1) + rat_int(2i64.pow(k))) / rat_int(2)).collect(),
    )?;
    let b_moments = MomentSequence::new(
        (1..=4).map(|k| (rat_int(1) + rat_int(3i64.pow(k))) / rat_int(2)).collect(),
    )?;
    let exact = free_mult_conv(&a_moments, &b_moments)?;
    let size = 512usize;
    let rotations = 4;
    let a_diag: Vec<f64> = (0..size).map(|i| if i < size / 2 { 1.0 } else { 2.0 }).collect();
    let b_diag: Vec<f64> = (0..size).map(|i| if i < size / 2 { 1.0 } else { 3.0 }).collect();
    let mut mc_rng = ctx.rng(13);
    let mut averaged = [0.0f64; 4];
    for _ in 0..rotations {
        let traces = rotated_product_traces(&a_diag, &b_diag, &mut mc_rng);
        for (avg, t) in averaged.iter_mut().zip(traces) {
            *avg += t / rotations as f64;
        }
    }
    for (k, avg) in averaged.iter().enumerate() {
        let reference = rat_to_f64(exact.moment(k + 1));
        let rel = (avg - reference).abs() / reference.abs();
        report.push(
            format!("random-matrix oracle, m_{}", k + 1),
            rel < 0.05,
            format!("sampled {avg:.4} vs exact {reference:.4} (relative error {rel:.2e})"),
        );
    }
    Ok(report)
}

/// A Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// sign convention fixed by the diagonal of R.
fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Normalized traces of the first four powers of `diag(a) * Q diag(b) Q^T`
/// for a fresh Haar rotation `Q`.
fn rotated_product_traces(a: &[f64], b: &[f64], rng: &mut impl Rng) -> [f64; 4] {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let q = haar_orthogonal(n, rng);
    let mut qb = q.clone();
    for j in 0..n {
        for i in 0..n {
            qb[(i, j)] *= b[j];
        }
    }
    let mut m = qb * q.transpose();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= a[i];
        }
    }
    let m2 = &m * &m;
    let t1 = m.trace();
    let t2 = m2.trace();
    let mut t3 = 0.0;
    let mut t4 = 0.0;
    for i in 0..n {
        for j in 0..n {
            t3 += m2[(i, j)] * m[(j, i)];
            t4 += m2[(i, j)] * m2[(j, i)];
        }
    }
    let scale = n as f64;
    [t1 / scale, t2 / scale, t3 / scale, t4 / scale]
}

/// Runs all twelve criteria in order.
pub fn run_all(ctx: &VerifyCtx) -> Result<Vec<VerificationReport>> {
    Ok(vec![
        criterion_01_gram_inverse(ctx)?,
        criterion_02_full_character(ctx)?,
        criterion_03_truncated_vs_sampler(ctx)?,
        criterion_04_expansion_consistency(ctx)?,
        criterion_05_asymptotic_decay(ctx)?,
        criterion_06_limit_laws(ctx)?,
        criterion_07_fixed_point_model(ctx)?,
        criterion_08_magic_residuals(ctx)?,
        criterion_09_family_catalog(ctx)?,
        criterion_10_half_line_series(ctx)?,
        criterion_11_product_machinery(ctx)?,
        criterion_12_convolution_engine(ctx)?,
    ])
}
