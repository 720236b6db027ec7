//! Closed-form spectral measures on the unit circle for the A-D graph
//! families, their real-line pushforwards, the matching graph constructors,
//! and the verification suite tying the two sides together.
//!
//! The catalog lives on the circle: `d` is the uniform measure, `d_n` the
//! uniform measure on the `2n`-th roots of unity, `d'_n` the uniform measure
//! on the odd-exponent `4n`-th roots `e^{i pi (2j+1) / (2n)}`, and `alpha`
//! the density `alpha(u) = 2 Im(u)^2 = 2 sin^2(theta)`.  Each family's
//! measure is one of these, an `alpha`-weighted version, or an even mixture:
//!
//! | family            | graph                               | measure             |
//! |-------------------|-------------------------------------|---------------------|
//! | `A`, parameter n  | path on n-1 vertices, root at end   | `alpha d_n`         |
//! | `D`, parameter n  | forked path on n+1, non-fork root   | `alpha d'_n`        |
//! | `Ainf`            | half-line, root at end              | `alpha d`           |
//! | `Aaff`            | cycle on 2n vertices                | `d_n`               |
//! | `Aline`           | two-sided line, root anywhere       | `d`                 |
//! | `Daff`            | doubly forked chain on n+3, tip root| `d'_1/2 + d_n/2`    |
//! | `Dinf`            | forked half-line, root at fork tip  | `d'_1/2 + d/2`      |
//!
//! The contract verified by [`verify_family`] is that the `2k`-th closed-walk
//! count at the root equals `integral of (u + u^-1)^{2k}` against the
//! measure; the even walk counts are also the Poincare series coefficients
//! under the change of variables `z = q/(1+q)^2`, `q = u^2`, for which
//! `1/z = (u + u^-1)^2`.
//!
//! Atom angles are exact rationals in units of pi.  Moments of atoms are
//! evaluated in double precision and snapped back to rationals by
//! continued-fraction reconstruction; the catalog identities all produce
//! small rationals, so the exact path is the common one.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{loop_moments, RealAtom, RealMeasure, RootedColoredGraph};
use crate::nc::{catalan_rat, central_binomial_rat};
use crate::rational::{
    format_rat, parse_rat, rat, rat_to_f64, reconstruct_rational, Rat, RECONSTRUCT_MAX_DENOM,
    RECONSTRUCT_TOL,
};
use crate::report::VerificationReport;

/// Largest supported moment order `k` (the integrand is `(2 cos)^(2k)`;
/// beyond this the float evaluation loses the accuracy the reconstruction
/// relies on).
pub const CIRCLE_MOMENT_CAP: usize = 12;

/// Numeric tolerance used when the exact reconstruction path is unavailable.
pub const NUMERIC_TOL: f64 = 1e-6;

/// An atom on the unit circle: position `e^{i pi angle}` with `angle` a
/// rational in `[0, 2)`, and a nonnegative rational weight.  When the owning
/// measure carries the `alpha` flag, the effective weight is
/// `weight * alpha(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleAtom {
    pub angle: Rat,
    pub weight: Rat,
}

/// The continuous component of a [`CircleMeasure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuous {
    None,
    /// The uniform measure, scaled by the coefficient.
    Uniform(Rat),
    /// The uniform measure with density `alpha`, scaled by the coefficient.
    AlphaUniform(Rat),
}

impl Continuous {
    fn coeff(&self) -> Rat {
        match self {
            Continuous::None => Rat::zero(),
            Continuous::Uniform(c) | Continuous::AlphaUniform(c) => c.clone(),
        }
    }
}

/// A probability measure on the unit circle: finitely many atoms at exact
/// rational angles plus an optional catalog continuous part.  Total mass
/// must be 1; this is checked exactly where possible and by rational
/// reconstruction for `alpha`-weighted atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleMeasure {
    atoms: Vec<CircleAtom>,
    alpha_atoms: bool,
    continuous: Continuous,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    angle: String,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct ContinuousJson {
    kind: String,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
    continuous: ContinuousJson,
    #[serde(default, skip_serializing_if = "is_false")]
    alpha_atoms: bool,
}

/// `alpha(u) = 2 sin^2(pi * angle)` for an angle in units of pi.
fn alpha_density(angle: &Rat) -> f64 {
    let theta = std::f64::consts::PI * rat_to_f64(angle);
    2.0 * theta.sin() * theta.sin()
}

fn normalize_angle(a: &Rat) -> Rat {
    let two = rat(2, 1);
    let q = (a / &two).floor();
    a - two * q
}

impl CircleMeasure {
    /// Builds a measure, normalizing angles into `[0, 2)`, merging repeated
    /// angles, dropping atoms of zero effective weight, and checking that
    /// the total mass is 1.
    pub fn new(atoms: Vec<CircleAtom>, alpha_atoms: bool, continuous: Continuous) -> Result<Self> {
        if continuous.coeff().is_negative() {
            return Err(Error::InvalidInput("negative continuous coefficient".into()));
        }
        let mut cleaned: Vec<CircleAtom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if atom.weight.is_negative() {
                return Err(Error::InvalidInput(format!(
                    "negative atom weight {}",
                    format_rat(&atom.weight)
                )));
            }
            let angle = normalize_angle(&atom.angle);
            // alpha vanishes exactly at u = 1 (angle 0) and u = -1 (angle 1).
            if atom.weight.is_zero()
                || (alpha_atoms && (angle.is_zero() || angle.is_one()))
            {
                continue;
            }
            cleaned.push(CircleAtom {
                angle,
                weight: atom.weight,
            });
        }
        cleaned.sort_by(|a, b| a.angle.cmp(&b.angle));
        let mut merged: Vec<CircleAtom> = Vec::with_capacity(cleaned.len());
        for atom in cleaned {
            match merged.last_mut() {
                Some(last) if last.angle == atom.angle => last.weight += atom.weight,
                _ => merged.push(atom),
            }
        }
        let measure = CircleMeasure {
            atoms: merged,
            alpha_atoms,
            continuous,
        };
        measure.validate_mass()?;
        Ok(measure)
    }

    fn validate_mass(&self) -> Result<()> {
        let cont = self.continuous.coeff();
        if !self.alpha_atoms {
            let total: Rat = self.atoms.iter().map(|a| a.weight.clone()).sum::<Rat>() + cont;
            if !total.is_one() {
                return Err(Error::InvalidInput(format!(
                    "total mass {} is not 1",
                    format_rat(&total)
                )));
            }
            return Ok(());
        }
        let atom_mass: f64 = self
            .atoms
            .iter()
            .map(|a| rat_to_f64(&a.weight) * alpha_density(&a.angle))
            .sum();
        let expected = Rat::one() - cont.clone();
        match reconstruct_rational(atom_mass, RECONSTRUCT_MAX_DENOM, RECONSTRUCT_TOL) {
            Some(m) if m == expected => Ok(()),
            Some(m) => Err(Error::InvalidInput(format!(
                "alpha-weighted total mass {} is not 1",
                format_rat(&(m + cont))
            ))),
            None => Err(Error::InvalidInput(
                "alpha-weighted atom mass does not reconstruct to a rational".into(),
            )),
        }
    }

    /// The uniform measure `d` on the circle.
    pub fn uniform_circle() -> Self {
        CircleMeasure {
            atoms: Vec::new(),
            alpha_atoms: false,
            continuous: Continuous::Uniform(Rat::one()),
        }
    }

    /// `d_n`: uniform on the `2n`-th roots of unity (angles `j/n`, in units
    /// of pi).
    pub fn roots_of_unity(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("roots_of_unity needs n >= 1".into()));
        }
        let weight = Rat::new(BigInt::one(), BigInt::from(2 * n));
        let atoms = (0..2 * n)
            .map(|j| CircleAtom {
                angle: rat(j as i64, n as i64),
                weight: weight.clone(),
            })
            .collect();
        Self::new(atoms, false, Continuous::None)
    }

    /// `d'_n`: uniform on the odd-exponent `4n`-th roots of unity (angles
    /// `(2j+1)/(2n)`, in units of pi).
    pub fn odd_roots(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("odd_roots needs n >= 1".into()));
        }
        let weight = Rat::new(BigInt::one(), BigInt::from(2 * n));
        let atoms = (0..2 * n)
            .map(|j| CircleAtom {
                angle: rat(2 * j as i64 + 1, 2 * n as i64),
                weight: weight.clone(),
            })
            .collect();
        Self::new(atoms, false, Continuous::None)
    }

    /// Applies the density `alpha` to this measure: atoms become
    /// `alpha`-weighted (dropping the zeros of `alpha`) and a uniform
    /// continuous part becomes `alpha`-uniform.  Fails when the result does
    /// not have mass 1 — notably `alpha d'_1`, which has mass 2.
    pub fn with_alpha(self) -> Result<Self> {
        let continuous = match self.continuous {
            Continuous::None => Continuous::None,
            Continuous::Uniform(c) => Continuous::AlphaUniform(c),
            Continuous::AlphaUniform(_) => {
                return Err(Error::InvalidInput(
                    "alpha density already applied".into(),
                ))
            }
        };
        Self::new(self.atoms, true, continuous)
    }

    /// The even mixture `(a + b) / 2`.  Atom `alpha` flags must be
    /// compatible and at most one distinct continuous kind may appear.
    pub fn mix(a: &Self, b: &Self) -> Result<Self> {
        let alpha_atoms = match (a.atoms.is_empty(), b.atoms.is_empty()) {
            (true, _) => b.alpha_atoms,
            (false, true) => a.alpha_atoms,
            (false, false) if a.alpha_atoms == b.alpha_atoms => a.alpha_atoms,
            _ => {
                return Err(Error::InvalidInput(
                    "cannot mix alpha-weighted atoms with plain atoms".into(),
                ))
            }
        };
        let half = rat(1, 2);
        let halved = |c: &Continuous| -> Continuous {
            match c {
                Continuous::None => Continuous::None,
                Continuous::Uniform(x) => Continuous::Uniform(x * &half),
                Continuous::AlphaUniform(x) => Continuous::AlphaUniform(x * &half),
            }
        };
        let continuous = match (&a.continuous, &b.continuous) {
            (Continuous::None, other) => halved(other),
            (other, Continuous::None) => halved(other),
            (Continuous::Uniform(x), Continuous::Uniform(y)) => {
                Continuous::Uniform((x + y) * &half)
            }
            (Continuous::AlphaUniform(x), Continuous::AlphaUniform(y)) => {
                Continuous::AlphaUniform((x + y) * &half)
            }
            _ => {
                return Err(Error::InvalidInput(
                    "cannot mix distinct continuous kinds".into(),
                ))
            }
        };
        let atoms = a
            .atoms
            .iter()
            .chain(&b.atoms)
            .map(|atom| CircleAtom {
                angle: atom.angle.clone(),
                weight: &atom.weight * &half,
            })
            .collect();
        Self::new(atoms, alpha_atoms, continuous)
    }

    pub fn atoms(&self) -> &[CircleAtom] {
        &self.atoms
    }

    pub fn alpha_atoms(&self) -> bool {
        self.alpha_atoms
    }

    pub fn continuous(&self) -> &Continuous {
        &self.continuous
    }

    /// Total mass, as the zeroth moment.
    pub fn mass(&self) -> MomentValue {
        circle_moment(self, 0).expect("k = 0 is always within the cap")
    }

    /// Serializes as
    /// `{"atoms": [{"angle": "p/q", "weight": "r/s"}], "continuous": {...}}`;
    /// an `"alpha_atoms": true` field appears only when the flag is set.
    pub fn to_json(&self) -> String {
        let continuous = match &self.continuous {
            Continuous::None => ContinuousJson {
                kind: "none".into(),
                coeff: "0".into(),
            },
            Continuous::Uniform(c) => ContinuousJson {
                kind: "uniform".into(),
                coeff: format_rat(c),
            },
            Continuous::AlphaUniform(c) => ContinuousJson {
                kind: "alpha_uniform".into(),
                coeff: format_rat(c),
            },
        };
        serde_json::to_string(&MeasureJson {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson {
                    angle: format_rat(&a.angle),
                    weight: format_rat(&a.weight),
                })
                .collect(),
            continuous,
            alpha_atoms: self.alpha_atoms,
        })
        .expect("measure data always serializes")
    }

    /// Parses the JSON form produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: MeasureJson = serde_json::from_str(text)?;
        let coeff = parse_rat(&parsed.continuous.coeff)?;
        let continuous = match parsed.continuous.kind.as_str() {
            "none" => {
                if !coeff.is_zero() {
                    return Err(Error::InvalidInput(
                        "continuous kind \"none\" must have coefficient 0".into(),
                    ));
                }
                Continuous::None
            }
            "uniform" => Continuous::Uniform(coeff),
            "alpha_uniform" => Continuous::AlphaUniform(coeff),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown continuous kind {other:?}"
                )))
            }
        };
        let atoms = parsed
            .atoms
            .iter()
            .map(|a| {
                Ok(CircleAtom {
                    angle: parse_rat(&a.angle)?,
                    weight: parse_rat(&a.weight)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, parsed.alpha_atoms, continuous)
    }
}

/// A moment that is either exactly reconstructed or, when the float value
/// refuses to snap to a small rational, reported raw.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(Rat),
    Raw(f64),
}

impl MomentValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => rat_to_f64(r),
            MomentValue::Raw(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            MomentValue::Exact(r) => Some(r),
            MomentValue::Raw(_) => None,
        }
    }
}

/// The `2k`-th real moment `integral of (u + u^-1)^{2k}` of a circle
/// measure.  Atom contributions are evaluated numerically and reconstructed;
/// continuous parts use closed forms (uniform gives the central binomial,
/// `alpha`-uniform the Catalan number, both scaled by the coefficient).
pub fn circle_moment(m: &CircleMeasure, k: usize) -> Result<MomentValue> {
    if k > CIRCLE_MOMENT_CAP {
        return Err(Error::CapExceeded {
            what: "circle moment order k",
            requested: k,
            limit: CIRCLE_MOMENT_CAP,
        });
    }
    let mut atom_sum = 0.0f64;
    for atom in &m.atoms {
        let theta = std::f64::consts::PI * rat_to_f64(&atom.angle);
        let mut term = rat_to_f64(&atom.weight) * (2.0 * theta.cos()).powi(2 * k as i32);
        if m.alpha_atoms {
            term *= 2.0 * theta.sin() * theta.sin();
        }
        atom_sum += term;
    }
    let continuous_exact = match &m.continuous {
        Continuous::None => Rat::zero(),
        Continuous::Uniform(c) => c * central_binomial_rat(k),
        Continuous::AlphaUniform(c) => c * catalan_rat(k),
    };
    let atom_exact = if m.atoms.is_empty() {
        Some(Rat::zero())
    } else {
        reconstruct_rational(atom_sum, RECONSTRUCT_MAX_DENOM, RECONSTRUCT_TOL)
    };
    Ok(match atom_exact {
        Some(a) => MomentValue::Exact(a + continuous_exact),
        None => MomentValue::Raw(atom_sum + rat_to_f64(&continuous_exact)),
    })
}

/// The graph families of the catalog, with truncation radii for the
/// infinite ones.  The parameter follows the measure: family `A` with
/// parameter `n` is the path on `n - 1` vertices whose measure is
/// `alpha d_n`, and so on down the table in the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    A { n: u32 },
    D { n: u32 },
    AInf { radius: u32 },
    AAffine { n: u32 },
    ALine { radius: u32 },
    DAffine { n: u32 },
    DInf { radius: u32 },
}

impl GraphFamily {
    /// The truncation radius, for the three infinite families.
    pub fn truncation_radius(&self) -> Option<u32> {
        match self {
            GraphFamily::AInf { radius }
            | GraphFamily::ALine { radius }
            | GraphFamily::DInf { radius } => Some(*radius),
            _ => None,
        }
    }

    /// Short code used by the command line: `A`, `D`, `Ainf`, `Aaff`,
    /// `Aline`, `Daff`, `Dinf`.
    pub fn code(&self) -> &'static str {
        match self {
            GraphFamily::A { .. } => "A",
            GraphFamily::D { .. } => "D",
            GraphFamily::AInf { .. } => "Ainf",
            GraphFamily::AAffine { .. } => "Aaff",
            GraphFamily::ALine { .. } => "Aline",
            GraphFamily::DAffine { .. } => "Daff",
            GraphFamily::DInf { .. } => "Dinf",
        }
    }
}

impl std::fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphFamily::A { n }
            | GraphFamily::D { n }
            | GraphFamily::AAffine { n }
            | GraphFamily::DAffine { n } => write!(f, "{}(n={})", self.code(), n),
            GraphFamily::AInf { radius }
            | GraphFamily::ALine { radius }
            | GraphFamily::DInf { radius } => {
                write!(f, "{}(radius={})", self.code(), radius)
            }
        }
    }
}

/// The closed-form spectral measure of a family, per the catalog table.
pub fn theorem_measure(fam: &GraphFamily) -> Result<CircleMeasure> {
    match *fam {
        GraphFamily::A { n } => {
            if n < 2 {
                return Err(Error::InvalidInput(format!(
                    "family A needs n >= 2 (alpha d_1 is degenerate), got n = {n}"
                )));
            }
            CircleMeasure::roots_of_unity(n)?.with_alpha()
        }
        GraphFamily::D { n } => {
            if n < 2 {
                return Err(Error::InvalidInput(
                    "family D needs n >= 2: alpha d'_1 has total mass 2, not 1".into(),
                ));
            }
            CircleMeasure::odd_roots(n)?.with_alpha()
        }
        GraphFamily::AInf { .. } => CircleMeasure::uniform_circle().with_alpha(),
        GraphFamily::AAffine { n } => {
            if n < 1 {
                return Err(Error::InvalidInput("affine A needs n >= 1".into()));
            }
            CircleMeasure::roots_of_unity(n)
        }
        GraphFamily::ALine { .. } => Ok(CircleMeasure::uniform_circle()),
        GraphFamily::DAffine { n } => {
            if n < 1 {
                return Err(Error::InvalidInput("affine D needs n >= 1".into()));
            }
            CircleMeasure::mix(
                &CircleMeasure::odd_roots(1)?,
                &CircleMeasure::roots_of_unity(n)?,
            )
        }
        GraphFamily::DInf { .. } => CircleMeasure::mix(
            &CircleMeasure::odd_roots(1)?,
            &CircleMeasure::uniform_circle(),
        ),
    }
}

/// The rooted graph of a family.  Root conventions: paths are rooted at an
/// end, forked paths at the non-fork end, doubly forked chains and the
/// forked half-line at a fork tip, the truncated line at its center.
pub fn build_graph(fam: &GraphFamily) -> Result<RootedColoredGraph> {
    let color = "e";
    match *fam {
        GraphFamily::A { n } => {
            if n < 2 {
                return Err(Error::InvalidInput(format!(
                    "family A needs n >= 2, got n = {n}"
                )));
            }
            RootedColoredGraph::path(n as usize - 1, 0, color)
        }
        GraphFamily::D { n } => {
            if n < 2 {
                return Err(Error::InvalidInput(format!(
                    "family D needs n >= 2, got n = {n}"
                )));
            }
            // Spine 0..n-2 plus two fork tips on the far end; n+1 vertices.
            let n = n as usize;
            let mut edges: Vec<(usize, usize, String)> = (0..n - 2)
                .map(|v| (v, v + 1, color.to_string()))
                .collect();
            edges.push((n - 2, n - 1, color.to_string()));
            edges.push((n - 2, n, color.to_string()));
            RootedColoredGraph::new(n + 1, 0, edges)
        }
        GraphFamily::AInf { radius } => {
            if radius < 1 {
                return Err(Error::InvalidInput("truncation radius must be >= 1".into()));
            }
            RootedColoredGraph::path(radius as usize + 1, 0, color)
        }
        GraphFamily::AAffine { n } => match n {
            0 => Err(Error::InvalidInput("affine A needs n >= 1".into())),
            // The 2-cycle is a doubled edge; distinct colors carry the
            // multiplicity.
            1 => RootedColoredGraph::new(
                2,
                0,
                vec![(0, 1, "e0".to_string()), (0, 1, "e1".to_string())],
            ),
            _ => {
                let m = 2 * n as usize;
                let edges = (0..m).map(|v| (v, (v + 1) % m, color.to_string())).collect();
                RootedColoredGraph::new(m, 0, edges)
            }
        },
        GraphFamily::ALine { radius } => {
            if radius < 1 {
                return Err(Error::InvalidInput("truncation radius must be >= 1".into()));
            }
            let r = radius as usize;
            RootedColoredGraph::path(2 * r + 1, r, color)
        }
        GraphFamily::DAffine { n } => {
            if n < 2 {
                return Err(Error::InvalidInput(format!(
                    "affine D graph needs n >= 2 (no chain to fork at n = 1), got n = {n}"
                )));
            }
            // Chain 0..n-2 with fork tips n-1, n on the left end and
            // n+1, n+2 on the right end; n+3 vertices, rooted at a tip.
            let n = n as usize;
            let mut edges: Vec<(usize, usize, String)> = (0..n - 2)
                .map(|v| (v, v + 1, color.to_string()))
                .collect();
            edges.push((0, n - 1, color.to_string()));
            edges.push((0, n, color.to_string()));
            edges.push((n - 2, n + 1, color.to_string()));
            edges.push((n - 2, n + 2, color.to_string()));
            RootedColoredGraph::new(n + 3, n - 1, edges)
        }
        GraphFamily::DInf { radius } => {
            if radius < 1 {
                return Err(Error::InvalidInput("truncation radius must be >= 1".into()));
            }
            // Fork tips 0, 1 on the head of a spine 2..radius+1.
            let r = radius as usize;
            let mut edges = vec![(0, 2, color.to_string()), (1, 2, color.to_string())];
            for v in 2..r + 1 {
                edges.push((v, v + 1, color.to_string()));
            }
            RootedColoredGraph::new(r + 2, 0, edges)
        }
    }
}

/// Checks the family's walk counts against its closed-form measure for all
/// orders up to the horizon: `m_{2k}` from the graph must equal the `2k`-th
/// measure moment, exactly on the reconstructed path or within
/// [`NUMERIC_TOL`] on the raw path.  Infinite families need a truncation
/// radius strictly larger than the horizon.
pub fn verify_family(fam: &GraphFamily, horizon: usize) -> Result<VerificationReport> {
    if let Some(radius) = fam.truncation_radius() {
        if radius as usize <= horizon {
            return Err(Error::InvalidInput(format!(
                "truncation radius {radius} must exceed the horizon {horizon}"
            )));
        }
    }
    let graph = build_graph(fam)?;
    let measure = theorem_measure(fam)?;
    let walks = loop_moments(&graph, 2 * horizon);
    let mut report = VerificationReport::new(format!("{fam}: walk counts vs closed form"));
    for k in 0..=horizon {
        let walk = Rat::from_integer(BigInt::from(walks[2 * k].clone()));
        let name = format!("m_{}", 2 * k);
        match circle_moment(&measure, k)? {
            MomentValue::Exact(v) => {
                let pass = v == walk;
                report.push(
                    name,
                    pass,
                    format!("graph {} vs measure {} (exact)", format_rat(&walk), format_rat(&v)),
                );
            }
            MomentValue::Raw(x) => {
                let dev = (x - rat_to_f64(&walk)).abs();
                report.push(
                    name,
                    dev < NUMERIC_TOL,
                    format!("graph {} vs measure {x} (numeric, dev {dev:.2e})", format_rat(&walk)),
                );
            }
        }
    }
    Ok(report)
}

/// Poincare series coefficients of a rooted graph: `f_k = m_{2k}`, the even
/// closed-walk counts, for `k = 0..=horizon`.  Under `z = q/(1+q)^2` with
/// `q = u^2` these are the moments `integral of (u + u^-1)^{2k}` of the
/// spectral measure, which is how [`verify_family`] checks them.
pub fn poincare_coeffs(g: &RootedColoredGraph, horizon: usize) -> Vec<BigUint> {
    let walks = loop_moments(g, 2 * horizon);
    (0..=horizon).map(|k| walks[2 * k].clone()).collect()
}

/// Pushes a circle measure forward through `u -> u + u^-1 = 2 cos(theta)`.
/// Conjugate angles land on the same point and merge; `alpha` weights are
/// applied; uniform becomes arcsine and `alpha`-uniform becomes semicircle.
pub fn pushforward_real(m: &CircleMeasure) -> RealMeasure {
    use std::collections::BTreeMap;
    let two = rat(2, 1);
    // Key atoms by min(angle, 2 - angle): exact merging of u and its
    // conjugate before any floats appear.
    let mut grouped: BTreeMap<Rat, f64> = BTreeMap::new();
    for atom in m.atoms() {
        let mirrored = &two - &atom.angle;
        let key = if atom.angle <= mirrored {
            atom.angle.clone()
        } else {
            mirrored
        };
        let mut w = rat_to_f64(&atom.weight);
        if m.alpha_atoms() {
            w *= alpha_density(&atom.angle);
        }
        *grouped.entry(key).or_insert(0.0) += w;
    }
    let mut atoms: Vec<RealAtom> = grouped
        .into_iter()
        .map(|(angle, weight)| RealAtom {
            position: 2.0 * (std::f64::consts::PI * rat_to_f64(&angle)).cos(),
            weight,
        })
        .collect();
    atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
    let (semicircle_coeff, arcsine_coeff) = match m.continuous() {
        Continuous::None => (0.0, 0.0),
        Continuous::Uniform(c) => (0.0, rat_to_f64(c)),
        Continuous::AlphaUniform(c) => (rat_to_f64(c), 0.0),
    };
    RealMeasure {
        atoms,
        semicircle_coeff,
        arcsine_coeff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn exact(v: &MomentValue) -> Rat {
        v.exact().cloned().unwrap_or_else(|| panic!("not exact: {v:?}"))
    }

    fn moment(m: &CircleMeasure, k: usize) -> Rat {
        exact(&circle_moment(m, k).unwrap())
    }

    #[test]
    fn roots_of_unity_atoms() {
        let d2 = CircleMeasure::roots_of_unity(2).unwrap();
        let angles: Vec<Rat> = d2.atoms().iter().map(|a| a.angle.clone()).collect();
        assert_eq!(angles, vec![rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 2)]);
        assert!(d2.atoms().iter().all(|a| a.weight == rat(1, 4)));
    }

    #[test]
    fn odd_roots_atoms() {
        let d1 = CircleMeasure::odd_roots(1).unwrap();
        let angles: Vec<Rat> = d1.atoms().iter().map(|a| a.angle.clone()).collect();
        assert_eq!(angles, vec![rat(1, 2), rat(3, 2)]);
        let d2 = CircleMeasure::odd_roots(2).unwrap();
        let angles: Vec<Rat> = d2.atoms().iter().map(|a| a.angle.clone()).collect();
        assert_eq!(angles, vec![rat(1, 4), rat(3, 4), rat(5, 4), rat(7, 4)]);
    }

    #[test]
    fn alpha_drops_zero_weight_atoms() {
        // alpha d_4: the atoms at angle 0 and pi vanish, six remain.
        let m = CircleMeasure::roots_of_unity(4).unwrap().with_alpha().unwrap();
        assert_eq!(m.atoms().len(), 6);
        assert!(m.alpha_atoms());
        assert!(!m.atoms().iter().any(|a| a.angle.is_zero() || a.angle.is_one()));
        // Base weights stay 1/8; alpha is applied at evaluation time.
        assert!(m.atoms().iter().all(|a| a.weight == rat(1, 8)));
    }

    #[test]
    fn alpha_on_odd_roots_one_is_degenerate() {
        let err = CircleMeasure::odd_roots(1).unwrap().with_alpha();
        assert!(err.is_err(), "alpha d'_1 has mass 2");
    }

    #[test]
    fn masses_are_one() {
        let families = [
            GraphFamily::A { n: 5 },
            GraphFamily::A { n: 8 },
            GraphFamily::D { n: 4 },
            GraphFamily::AInf { radius: 9 },
            GraphFamily::AAffine { n: 3 },
            GraphFamily::ALine { radius: 9 },
            GraphFamily::DAffine { n: 3 },
            GraphFamily::DInf { radius: 9 },
        ];
        for fam in families {
            let m = theorem_measure(&fam).unwrap();
            assert_eq!(exact(&m.mass()), Rat::one(), "{fam}");
        }
    }

    #[test]
    fn invalid_measures_are_rejected() {
        // Mass 1/2.
        assert!(CircleMeasure::new(
            vec![CircleAtom { angle: rat(0, 1), weight: rat(1, 2) }],
            false,
            Continuous::None,
        )
        .is_err());
        // Negative weight.
        assert!(CircleMeasure::new(
            vec![
                CircleAtom { angle: rat(0, 1), weight: rat(3, 2) },
                CircleAtom { angle: rat(1, 1), weight: rat(-1, 2) },
            ],
            false,
            Continuous::None,
        )
        .is_err());
    }

    #[test]
    fn atoms_merge_and_normalize() {
        let m = CircleMeasure::new(
            vec![
                CircleAtom { angle: rat(5, 2), weight: rat(1, 2) },
                CircleAtom { angle: rat(1, 2), weight: rat(1, 4) },
                CircleAtom { angle: rat(3, 2), weight: rat(1, 4) },
            ],
            false,
            Continuous::None,
        )
        .unwrap();
        // 5/2 normalizes to 1/2 and merges with the existing atom.
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].angle, rat(1, 2));
        assert_eq!(m.atoms()[0].weight, rat(3, 4));
    }

    #[test]
    fn moment_examples_alpha_d4() {
        let m = theorem_measure(&GraphFamily::A { n: 4 }).unwrap();
        assert_eq!(moment(&m, 0), rat_int(1));
        assert_eq!(moment(&m, 1), rat_int(1));
        assert_eq!(moment(&m, 2), rat_int(2));
    }

    #[test]
    fn moment_examples_uniform() {
        let d = CircleMeasure::uniform_circle();
        assert_eq!(moment(&d, 1), rat_int(2));
        assert_eq!(moment(&d, 2), rat_int(6));
        assert_eq!(moment(&d, 3), rat_int(20));
    }

    #[test]
    fn moment_examples_alpha_uniform_is_catalan() {
        let m = theorem_measure(&GraphFamily::AInf { radius: 9 }).unwrap();
        assert!(m.atoms().is_empty());
        for k in 0..=6 {
            assert_eq!(moment(&m, k), catalan_rat(k), "k = {k}");
        }
    }

    /// Quadrature oracle: integrates f over the circle with the trapezoid
    /// rule at 200k points.
    fn quadrature(f: impl Fn(f64) -> f64) -> f64 {
        let steps = 200_000;
        let h = 2.0 * std::f64::consts::PI / steps as f64;
        (0..steps).map(|i| f(i as f64 * h)).sum::<f64>() * h / (2.0 * std::f64::consts::PI)
    }

    #[test]
    fn continuous_closed_forms_match_quadrature() {
        for k in 0..=4usize {
            let plain = quadrature(|t| (2.0 * t.cos()).powi(2 * k as i32));
            assert!(
                (plain - rat_to_f64(&central_binomial_rat(k))).abs() < 1e-6,
                "uniform k = {k}"
            );
            let weighted =
                quadrature(|t| 2.0 * t.sin() * t.sin() * (2.0 * t.cos()).powi(2 * k as i32));
            assert!(
                (weighted - rat_to_f64(&catalan_rat(k))).abs() < 1e-6,
                "alpha-uniform k = {k}"
            );
        }
    }

    #[test]
    fn daffine_two_merges_its_atoms() {
        // d'_1/2 + d_2/2: the atoms at +-i merge to weight 3/8, the atoms
        // at +-1 keep weight 1/8.
        let m = theorem_measure(&GraphFamily::DAffine { n: 2 }).unwrap();
        let expect = [
            (rat(0, 1), rat(1, 8)),
            (rat(1, 2), rat(3, 8)),
            (rat(1, 1), rat(1, 8)),
            (rat(3, 2), rat(3, 8)),
        ];
        assert_eq!(m.atoms().len(), expect.len());
        for (atom, (angle, weight)) in m.atoms().iter().zip(&expect) {
            assert_eq!(&atom.angle, angle);
            assert_eq!(&atom.weight, weight);
        }
        assert_eq!(moment(&m, 1), rat_int(1));
        assert_eq!(moment(&m, 2), rat_int(4));
        assert_eq!(moment(&m, 3), rat_int(16));
    }

    #[test]
    fn theorem_measure_rejects_degenerate_parameters() {
        assert!(theorem_measure(&GraphFamily::A { n: 1 }).is_err());
        assert!(theorem_measure(&GraphFamily::D { n: 1 }).is_err());
        assert!(theorem_measure(&GraphFamily::AAffine { n: 0 }).is_err());
    }

    #[test]
    fn graph_shapes() {
        // A with n = 4 is the path on 3 vertices rooted at an end.
        let a = build_graph(&GraphFamily::A { n: 4 }).unwrap();
        assert_eq!(a, RootedColoredGraph::path(3, 0, "e").unwrap());
        // D with n = 3 is the 3-star rooted at a leaf.
        let d = build_graph(&GraphFamily::D { n: 3 }).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.root(), 0);
        let degrees: Vec<usize> = (0..4)
            .map(|v| d.adjacency_counts()[v].iter().filter(|&&c| c > 0).count())
            .collect();
        assert_eq!(degrees, vec![1, 3, 1, 1]);
        // Affine D with n = 2 is the 4-star rooted at a leaf.
        let daff = build_graph(&GraphFamily::DAffine { n: 2 }).unwrap();
        assert_eq!(daff.n(), 5);
        let center_degree = daff.adjacency_counts()[0].iter().sum::<u64>();
        assert_eq!(center_degree, 4);
        assert_ne!(daff.root(), 0);
        // Affine A with n = 1 is the doubled edge.
        let aaff = build_graph(&GraphFamily::AAffine { n: 1 }).unwrap();
        assert_eq!(aaff.n(), 2);
        assert_eq!(aaff.adjacency_counts()[0][1], 2);
        // The D-infinity truncation is a forked half-line from a tip.
        let dinf = build_graph(&GraphFamily::DInf { radius: 3 }).unwrap();
        assert_eq!(dinf.n(), 5);
        assert_eq!(dinf.root(), 0);
    }

    #[test]
    fn graph_constructors_reject_degenerate_parameters() {
        assert!(build_graph(&GraphFamily::A { n: 1 }).is_err());
        assert!(build_graph(&GraphFamily::D { n: 1 }).is_err());
        assert!(build_graph(&GraphFamily::DAffine { n: 1 }).is_err());
        assert!(build_graph(&GraphFamily::AInf { radius: 0 }).is_err());
    }

    #[test]
    fn verify_families_small() {
        let cases = [
            GraphFamily::A { n: 3 },
            GraphFamily::A { n: 5 },
            GraphFamily::D { n: 3 },
            GraphFamily::D { n: 4 },
            GraphFamily::AAffine { n: 2 },
            GraphFamily::DAffine { n: 2 },
            GraphFamily::DAffine { n: 3 },
            GraphFamily::AInf { radius: 6 },
            GraphFamily::ALine { radius: 6 },
            GraphFamily::DInf { radius: 6 },
        ];
        for fam in cases {
            let report = verify_family(&fam, 4).unwrap();
            assert!(report.pass(), "{report}");
        }
    }

    #[test]
    fn four_cycle_wraparound_walks() {
        // On the 4-cycle both sides have m_2 = 2, m_4 = 8, m_6 = 32: length
        // 4 and 6 walks can wrap around, which pushes the counts above the
        // central binomials of the infinite line.
        let fam = GraphFamily::AAffine { n: 2 };
        let g = build_graph(&fam).unwrap();
        let walks = loop_moments(&g, 6);
        assert_eq!(walks[2], BigUint::from(2u32));
        assert_eq!(walks[4], BigUint::from(8u32));
        assert_eq!(walks[6], BigUint::from(32u32));
        let m = theorem_measure(&fam).unwrap();
        assert_eq!(moment(&m, 2), rat_int(8));
        assert_eq!(moment(&m, 3), rat_int(32));
    }

    #[test]
    fn dinf_moments_are_half_central_binomials() {
        let fam = GraphFamily::DInf { radius: 8 };
        let m = theorem_measure(&fam).unwrap();
        for k in 1..=4usize {
            assert_eq!(
                moment(&m, k),
                central_binomial_rat(k) / rat(2, 1),
                "k = {k}"
            );
        }
        assert!(verify_family(&fam, 4).unwrap().pass());
    }

    #[test]
    fn verify_rejects_short_truncations() {
        assert!(verify_family(&GraphFamily::AInf { radius: 4 }, 4).is_err());
        assert!(verify_family(&GraphFamily::AInf { radius: 5 }, 4).is_ok());
    }

    #[test]
    fn truncation_stability() {
        // Walk counts up to 2K only see the graph out to distance K, so any
        // radius past the horizon gives the same coefficients.
        for radius in [5u32, 7, 11] {
            for family in [
                GraphFamily::AInf { radius },
                GraphFamily::ALine { radius },
                GraphFamily::DInf { radius },
            ] {
                let g = build_graph(&family).unwrap();
                let baseline = build_graph(&family_with_radius(&family, 12)).unwrap();
                assert_eq!(
                    poincare_coeffs(&g, 4),
                    poincare_coeffs(&baseline, 4),
                    "family = {family}"
                );
            }
        }
    }

    fn family_with_radius(f: &GraphFamily, radius: u32) -> GraphFamily {
        match f {
            GraphFamily::AInf { .. } => GraphFamily::AInf { radius },
            GraphFamily::ALine { .. } => GraphFamily::ALine { radius },
            GraphFamily::DInf { .. } => GraphFamily::DInf { radius },
            other => other.clone(),
        }
    }

    #[test]
    fn pushforward_atom_count_matches_path_order() {
        // alpha d_n pushes forward to the spectrum of the path on n - 1
        // vertices: exactly n - 1 surviving atoms.
        for n in 2..=8u32 {
            let m = theorem_measure(&GraphFamily::A { n }).unwrap();
            assert_eq!(pushforward_real(&m).atoms.len(), (n - 1) as usize, "n = {n}");
        }
    }

    #[test]
    fn poincare_examples() {
        let a3 = build_graph(&GraphFamily::A { n: 4 }).unwrap();
        let expected: Vec<BigUint> = [1u32, 1, 2, 4].iter().map(|&c| BigUint::from(c)).collect();
        assert_eq!(poincare_coeffs(&a3, 3), expected);

        let point = RootedColoredGraph::point();
        let expected: Vec<BigUint> = [1u32, 0, 0].iter().map(|&c| BigUint::from(c)).collect();
        assert_eq!(poincare_coeffs(&point, 2), expected);
    }

    #[test]
    fn pushforward_of_alpha_d4_is_the_path_spectrum() {
        let m = theorem_measure(&GraphFamily::A { n: 4 }).unwrap();
        let real = pushforward_real(&m);
        // Three real atoms (n - 1), the path-on-3 spectral measure.
        assert_eq!(real.atoms.len(), 3);
        let sqrt2 = std::f64::consts::SQRT_2;
        let expect = [(-sqrt2, 0.25), (0.0, 0.5), (sqrt2, 0.25)];
        for (atom, (p, w)) in real.atoms.iter().zip(expect) {
            assert!((atom.position - p).abs() < 1e-9);
            assert!((atom.weight - w).abs() < 1e-9);
        }
        assert!((real.mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pushforward_continuous_parts() {
        let semi = pushforward_real(&theorem_measure(&GraphFamily::AInf { radius: 9 }).unwrap());
        assert!(semi.atoms.is_empty());
        assert!((semi.semicircle_coeff - 1.0).abs() < 1e-12);
        for k in 0..=4usize {
            let expect = rat_to_f64(&catalan_rat(k));
            assert!((semi.moment(2 * k) - expect).abs() < 1e-9, "semicircle k = {k}");
            assert_eq!(semi.moment(2 * k + 1), 0.0);
        }

        let arcs = pushforward_real(&CircleMeasure::uniform_circle());
        for k in 0..=4usize {
            let expect = rat_to_f64(&central_binomial_rat(k));
            assert!((arcs.moment(2 * k) - expect).abs() < 1e-9, "arcsine k = {k}");
        }
    }

    #[test]
    fn json_roundtrip_plain_and_alpha() {
        let daff = theorem_measure(&GraphFamily::DAffine { n: 2 }).unwrap();
        let text = daff.to_json();
        assert!(!text.contains("alpha_atoms"));
        assert_eq!(CircleMeasure::from_json(&text).unwrap(), daff);

        let a4 = theorem_measure(&GraphFamily::A { n: 4 }).unwrap();
        let text = a4.to_json();
        assert!(text.contains("\"alpha_atoms\":true"));
        assert_eq!(CircleMeasure::from_json(&text).unwrap(), a4);

        let ainf = theorem_measure(&GraphFamily::AInf { radius: 9 }).unwrap();
        let text = ainf.to_json();
        assert!(text.contains("alpha_uniform"));
        assert_eq!(CircleMeasure::from_json(&text).unwrap(), ainf);
    }

    #[test]
    fn json_rejects_bad_measures() {
        assert!(CircleMeasure::from_json("{}").is_err());
        // Mass not 1.
        assert!(CircleMeasure::from_json(
            r#"{"atoms":[{"angle":"0","weight":"1/2"}],"continuous":{"kind":"none","coeff":"0"}}"#
        )
        .is_err());
        // Unknown continuous kind.
        assert!(CircleMeasure::from_json(
            r#"{"atoms":[],"continuous":{"kind":"gaussian","coeff":"1"}}"#
        )
        .is_err());
        // Kind none with nonzero coefficient.
        assert!(CircleMeasure::from_json(
            r#"{"atoms":[],"continuous":{"kind":"none","coeff":"1"}}"#
        )
        .is_err());
    }

    #[test]
    fn moment_cap_is_enforced() {
        let d = CircleMeasure::uniform_circle();
        assert!(matches!(
            circle_moment(&d, CIRCLE_MOMENT_CAP + 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn family_codes_roundtrip_through_display() {
        let fams = [
            GraphFamily::A { n: 4 },
            GraphFamily::DInf { radius: 8 },
        ];
        assert_eq!(fams[0].to_string(), "A(n=4)");
        assert_eq!(fams[1].to_string(), "Dinf(radius=8)");
    }
}
