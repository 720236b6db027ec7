//! Moment sequences, free cumulants, named laws, and free convolutions.
//!
//! A distribution enters this module only through its moments
//! `m_1, ..., m_K` (the *horizon* `K`).  Moments and free cumulants
//! determine each other through sums over noncrossing partitions:
//! `m_k = sum over pi in NC(k) of prod over blocks B of kappa_{|B|}`.
//! Additive free convolution adds cumulants; multiplicative free convolution
//! pairs cumulants of one factor with moments of the other along Kreweras
//! complements.  Everything here is exact rational arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nc::{catalan_rat, enumerate_nc_partitions, enumerate_pairings, kreweras};
use crate::rational::{format_rat, parse_rat, rat_int, Rat};

use num_traits::{One, Signed, Zero};

/// The moments `m_1, ..., m_K` of a distribution, exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence {
    moments: Vec<Rat>,
}

/// The free cumulants `kappa_1, ..., kappa_K` of a distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantSequence {
    cumulants: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct MomentsJson {
    moments: Vec<String>,
}

impl MomentSequence {
    /// Wraps `m_1, ..., m_K`; the sequence must be nonempty.
    pub fn new(moments: Vec<Rat>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::InvalidInput("empty moment sequence".into()));
        }
        Ok(MomentSequence { moments })
    }

    /// Convenience constructor from integer moments.
    pub fn from_integers(moments: &[i64]) -> Result<Self> {
        Self::new(moments.iter().map(|&m| rat_int(m)).collect())
    }

    /// The horizon `K`.
    pub fn horizon(&self) -> usize {
        self.moments.len()
    }

    /// The `k`-th moment, 1-based.  Panics when `k` is outside `1..=K`.
    pub fn moment(&self, k: usize) -> &Rat {
        &self.moments[k - 1]
    }

    pub fn moments(&self) -> &[Rat] {
        &self.moments
    }

    /// Serializes as `{"moments": ["1", "2", "5"]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MomentsJson {
            moments: self.moments.iter().map(format_rat).collect(),
        })
        .expect("string vectors always serialize")
    }

    /// Parses the JSON form produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: MomentsJson = serde_json::from_str(text)?;
        Self::new(
            parsed
                .moments
                .iter()
                .map(|s| parse_rat(s))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl CumulantSequence {
    /// Wraps `kappa_1, ..., kappa_K`; the sequence must be nonempty.
    pub fn new(cumulants: Vec<Rat>) -> Result<Self> {
        if cumulants.is_empty() {
            return Err(Error::InvalidInput("empty cumulant sequence".into()));
        }
        Ok(CumulantSequence { cumulants })
    }

    pub fn horizon(&self) -> usize {
        self.cumulants.len()
    }

    /// The `k`-th cumulant, 1-based.
    pub fn cumulant(&self, k: usize) -> &Rat {
        &self.cumulants[k - 1]
    }

    pub fn cumulants(&self) -> &[Rat] {
        &self.cumulants
    }
}

/// Moments from free cumulants, by the noncrossing-partition sum.
pub fn cumulants_to_moments(c: &CumulantSequence) -> Result<MomentSequence> {
    let mut moments = Vec::with_capacity(c.horizon());
    for k in 1..=c.horizon() {
        let mut acc = Rat::zero();
        for pi in enumerate_nc_partitions(k)? {
            let mut term = Rat::one();
            for size in pi.block_sizes() {
                term *= c.cumulant(size);
            }
            acc += term;
        }
        moments.push(acc);
    }
    MomentSequence::new(moments)
}

/// Free cumulants from moments, inverting the partition sum recursively:
/// every noncrossing partition other than the one-block partition involves
/// only cumulants of strictly lower order.
pub fn moments_to_cumulants(m: &MomentSequence) -> Result<CumulantSequence> {
    let mut kappa: Vec<Rat> = Vec::with_capacity(m.horizon());
    for k in 1..=m.horizon() {
        let mut acc = m.moment(k).clone();
        for pi in enumerate_nc_partitions(k)? {
            if pi.blocks().len() == 1 {
                continue;
            }
            let mut term = Rat::one();
            for size in pi.block_sizes() {
                term *= &kappa[size - 1];
            }
            acc -= term;
        }
        kappa.push(acc);
    }
    CumulantSequence::new(kappa)
}

/// Additive free convolution: cumulants add.  Horizons must agree.
pub fn free_add_conv(a: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_horizons(a, b)?;
    let ka = moments_to_cumulants(a)?;
    let kb = moments_to_cumulants(b)?;
    let sum: Vec<Rat> = ka
        .cumulants()
        .iter()
        .zip(kb.cumulants())
        .map(|(x, y)| x + y)
        .collect();
    cumulants_to_moments(&CumulantSequence::new(sum)?)
}

/// Multiplicative free convolution: each moment of the product couples the
/// cumulants of one factor with the moments of the other across Kreweras
/// complements,
/// `m_k = sum over pi in NC(k) of kappa_pi[a] * m_{Kr(pi)}[b]`.
/// Horizons must agree.
pub fn free_mult_conv(a: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence> {
    check_horizons(a, b)?;
    let ka = moments_to_cumulants(a)?;
    let mut moments = Vec::with_capacity(a.horizon());
    for k in 1..=a.horizon() {
        let mut acc = Rat::zero();
        for pi in enumerate_nc_partitions(k)? {
            let mut term = Rat::one();
            for size in pi.block_sizes() {
                term *= ka.cumulant(size);
            }
            for size in kreweras(&pi).block_sizes() {
                term *= b.moment(size);
            }
            acc += term;
        }
        moments.push(acc);
    }
    MomentSequence::new(moments)
}

fn check_horizons(a: &MomentSequence, b: &MomentSequence) -> Result<()> {
    if a.horizon() != b.horizon() {
        return Err(Error::InvalidInput(format!(
            "horizon mismatch: {} vs {}",
            a.horizon(),
            b.horizon()
        )));
    }
    Ok(())
}

/// Result of comparing two moment sequences over their common horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareReport {
    /// Number of moments compared (the smaller horizon).
    pub horizon: usize,
    /// Largest absolute difference over the common horizon.
    pub max_deviation: Rat,
    /// First order `k` at which the sequences differ, if any.
    pub first_mismatch: Option<usize>,
}

impl CompareReport {
    pub fn matches(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares two moment sequences over their common horizon.
pub fn moment_compare(a: &MomentSequence, b: &MomentSequence) -> CompareReport {
    let horizon = a.horizon().min(b.horizon());
    let mut max_deviation = Rat::zero();
    let mut first_mismatch = None;
    for k in 1..=horizon {
        let dev = (a.moment(k) - b.moment(k)).abs();
        if !dev.is_zero() && first_mismatch.is_none() {
            first_mismatch = Some(k);
        }
        if dev > max_deviation {
            max_deviation = dev;
        }
    }
    CompareReport {
        horizon,
        max_deviation,
        first_mismatch,
    }
}

/// Distributions with closed-form moment data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Law {
    /// Semicircle law with the given variance: odd moments vanish, even
    /// moments are Catalan numbers scaled by powers of the variance.
    Semicircle { variance: Rat },
    /// Free Poisson law: all free cumulants equal the rate.
    FreePoisson { rate: Rat },
    /// Haar unitary: defined by star moments only.
    HaarUnitary,
    /// Circular element: defined by star moments only.
    Circular,
}

impl Law {
    /// The moment sequence up to the horizon.  The star-only laws
    /// (`HaarUnitary`, `Circular`) are not determined by plain moments and
    /// report an input error; query [`Law::star_moment`] instead.
    pub fn moments(&self, horizon: usize) -> Result<MomentSequence> {
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be >= 1".into()));
        }
        match self {
            Law::Semicircle { variance } => {
                let mut out = Vec::with_capacity(horizon);
                for k in 1..=horizon {
                    if k % 2 == 1 {
                        out.push(Rat::zero());
                    } else {
                        let half = k / 2;
                        let mut v = catalan_rat(half);
                        for _ in 0..half {
                            v *= variance;
                        }
                        out.push(v);
                    }
                }
                MomentSequence::new(out)
            }
            Law::FreePoisson { rate } => {
                let c = CumulantSequence::new(vec![rate.clone(); horizon])?;
                cumulants_to_moments(&c)
            }
            Law::HaarUnitary | Law::Circular => Err(Error::InvalidInput(
                "this law is determined by star moments; use star_moment".into(),
            )),
        }
    }

    /// The expectation of the word in the element and its adjoint.
    ///
    /// For the self-adjoint laws the stars are immaterial and the value is
    /// the plain moment of the word length.  A Haar unitary gives 1 exactly
    /// on balanced words, 0 otherwise.  A circular element counts the
    /// noncrossing pairings matching letters to starred letters.
    pub fn star_moment(&self, word: &StarWord) -> Result<Rat> {
        match self {
            Law::Semicircle { .. } | Law::FreePoisson { .. } => {
                if word.len() == 0 {
                    return Ok(Rat::one());
                }
                Ok(self.moments(word.len())?.moment(word.len()).clone())
            }
            Law::HaarUnitary => {
                let (c, cstar) = word.letter_counts();
                Ok(if c == cstar { Rat::one() } else { Rat::zero() })
            }
            Law::Circular => Ok(rat_int(circular_star_moment(word)? as i64)),
        }
    }
}

/// One letter of a star word: the element or its adjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarLetter {
    C,
    CStar,
}

/// A word in a single element `c` and its adjoint `c*`, e.g. `cc*cc*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWord {
    letters: Vec<StarLetter>,
}

impl StarWord {
    pub fn new(letters: Vec<StarLetter>) -> Self {
        StarWord { letters }
    }

    /// The alternating word `(c c*)^k`.
    pub fn alternating(k: usize) -> Self {
        let mut letters = Vec::with_capacity(2 * k);
        for _ in 0..k {
            letters.push(StarLetter::C);
            letters.push(StarLetter::CStar);
        }
        StarWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[StarLetter] {
        &self.letters
    }

    /// Counts of plain and starred letters, in that order.
    pub fn letter_counts(&self) -> (usize, usize) {
        let c = self
            .letters
            .iter()
            .filter(|&&l| l == StarLetter::C)
            .count();
        (c, self.letters.len() - c)
    }
}

impl std::str::FromStr for StarWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(ch) = chars.next() {
            match ch {
                'c' | 'C' => {
                    if chars.peek() == Some(&'*') {
                        chars.next();
                        letters.push(StarLetter::CStar);
                    } else {
                        letters.push(StarLetter::C);
                    }
                }
                ch if ch.is_whitespace() => {}
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unexpected {other:?} in star word {s:?}"
                    )))
                }
            }
        }
        Ok(StarWord { letters })
    }
}

impl std::fmt::Display for StarWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.letters {
            match l {
                StarLetter::C => write!(f, "c")?,
                StarLetter::CStar => write!(f, "c*")?,
            }
        }
        Ok(())
    }
}

/// Number of noncrossing pairings of the word's positions in which every
/// pair joins a plain letter to a starred letter.  This is the star moment
/// of a circular element; for the alternating word it is a Catalan number.
pub fn circular_star_moment(word: &StarWord) -> Result<u64> {
    if word.len() % 2 == 1 {
        return Ok(0);
    }
    let k = word.len() / 2;
    let letters = word.letters();
    let mut count = 0u64;
    for p in enumerate_pairings(k)? {
        let ok = p
            .pairs()
            .iter()
            .all(|&(a, b)| letters[a - 1] != letters[b - 1]);
        if ok {
            count += 1;
        }
    }
    Ok(count)
}
