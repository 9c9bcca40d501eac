//! Building systems from division-point data.
//!
//! A division-point sequence prescribes the value vectors of a system at its
//! m-division numbers. Consecutive prescriptions must change a consecutive
//! block of coordinates straddling `m` and satisfy the staircase
//! inequalities `a_j <= b_{j-1}` inside that block; under those conditions
//! there is exactly one non-degenerate system joining them (the *bridge*),
//! and chaining bridges realizes the whole sequence with no extra division
//! numbers.
//!
//! The bridge is assembled explicitly: above `m`, components `m+1, ..., l`
//! rise one after another (each to the next start level, then in reverse
//! order up to their end levels); the cascade below `m` is the mirror image
//! under the opposite-system symmetry and runs after the pivot. Because the
//! lower half is derived rather than quoted, every bridge is re-certified
//! after assembly: endpoint values, strict separation of `P_m` and
//! `P_{m+1}`, and a single interior tie for every other adjacent pair in
//! the window.

use crate::exactnum::Rational;
use crate::nsystem::{IntervalType, NSystem, QueryError, Segment, ValidationError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error)]
pub enum BuildError {
    #[error("point {index}: {detail}")]
    BadPoint { index: usize, detail: String },
    #[error("points {index} -> {next}: {detail}", next = index + 1)]
    BadPair { index: usize, detail: String },
    #[error("need at least {0} points, got {1}")]
    TooFewPoints(usize, usize),
    #[error("m = {m} must satisfy 1 <= m < n = {n}")]
    BadM { m: usize, n: usize },
    #[error("ratio rho = {0} must exceed 1")]
    BadRho(Rational),
    #[error("first seed point must have strictly positive coordinates, got {0}")]
    SeedNotPositive(Rational),
    #[error("periods must be at least 1")]
    NoPeriods,
    #[error("bridge certification failed: {0}")]
    Certification(String),
    #[error("chain has division numbers {got:?}, expected the anchors {expected:?}")]
    AnchorMismatch { expected: Vec<Rational>, got: Vec<Rational> },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A validated sequence of division-point prescriptions. `anchors[i]` is the
/// parameter at which `points[i]` is attained (the coordinate sum), and
/// `windows[i]` is the changed block between points `i` and `i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionPointSeq {
    pub m: usize,
    pub n: usize,
    pub points: Vec<Vec<Rational>>,
    pub anchors: Vec<Rational>,
    pub windows: Vec<IntervalType>,
}

/// Shape check for a single prescription: sorted strictly except for the
/// mandatory tie at `m`, first coordinate non-negative.
fn check_point_shape(p: &[Rational], m: usize, index: usize) -> Result<(), BuildError> {
    let n = p.len();
    let fail = |detail: String| Err(BuildError::BadPoint { index, detail });
    if p[0].is_negative() {
        return fail(format!("first coordinate {} is negative", p[0]));
    }
    for j in 1..n {
        if j == m {
            if p[j - 1] != p[j] {
                return fail(format!(
                    "coordinates {m} and {} must be equal, got {} and {}",
                    m + 1,
                    p[j - 1],
                    p[j]
                ));
            }
        } else if p[j - 1] >= p[j] {
            return fail(format!(
                "coordinates must increase strictly away from the tie: a_{j} = {} !< a_{} = {}",
                p[j - 1],
                j + 1,
                p[j]
            ));
        }
    }
    Ok(())
}

/// Changed block and staircase check for one consecutive pair.
fn check_pair(
    ua: &[Rational],
    ub: &[Rational],
    m: usize,
    index: usize,
) -> Result<IntervalType, BuildError> {
    let n = ua.len();
    let fail = |detail: String| Err(BuildError::BadPair { index, detail });
    let mut changed = Vec::new();
    for j in 0..n {
        if ua[j] > ub[j] {
            return fail(format!("coordinate {} decreases: {} -> {}", j + 1, ua[j], ub[j]));
        }
        if ua[j] < ub[j] {
            changed.push(j + 1);
        }
    }
    let (Some(&k), Some(&l)) = (changed.first(), changed.last()) else {
        return fail("points are identical".into());
    };
    if changed.len() != l - k + 1 {
        return fail(format!("changed set {changed:?} is not a consecutive block"));
    }
    if !(k <= m && m < l) {
        return fail(format!("changed block [{k}, {l}] does not straddle m = {m}"));
    }
    for j in k + 1..=l {
        if ua[j - 1] > ub[j - 2] {
            return fail(format!(
                "staircase fails: a_{j} = {} > b_{} = {}",
                ua[j - 1],
                j - 1,
                ub[j - 2]
            ));
        }
    }
    Ok(IntervalType { k, l })
}

pub fn validate_division_seq(
    points: &[Vec<Rational>],
    m: usize,
) -> Result<DivisionPointSeq, BuildError> {
    if points.len() < 2 {
        return Err(BuildError::TooFewPoints(2, points.len()));
    }
    let n = points[0].len();
    if m < 1 || m >= n {
        return Err(BuildError::BadM { m, n });
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != n {
            return Err(BuildError::BadPoint {
                index: i,
                detail: format!("has {} coordinates, expected {n}", p.len()),
            });
        }
        check_point_shape(p, m, i)?;
    }
    let mut windows = Vec::with_capacity(points.len() - 1);
    for i in 0..points.len() - 1 {
        windows.push(check_pair(&points[i], &points[i + 1], m, i)?);
    }
    let anchors = points.iter().map(|p| p.iter().sum()).collect();
    Ok(DivisionPointSeq { m, n, points: points.to_vec(), anchors, windows })
}

/// The unique non-degenerate system on `[sum(ua), sum(ub)]` taking the
/// prescribed values at its endpoints, with `P_m = P_{m+1}` exactly there.
pub fn bridge(ua: &[Rational], ub: &[Rational], m: usize) -> Result<NSystem, BuildError> {
    let seq = validate_division_seq(&[ua.to_vec(), ub.to_vec()], m)?;
    bridge_validated(&seq.points[0], &seq.points[1], m, seq.windows[0], &seq.anchors)
}

fn bridge_validated(
    ua: &[Rational],
    ub: &[Rational],
    m: usize,
    window: IntervalType,
    anchors: &[Rational],
) -> Result<NSystem, BuildError> {
    let n = ua.len();
    let (k, l) = (window.k, window.l);
    let (a, b) = (&anchors[0], &anchors[1]);
    let prefix_a = |r: usize| -> Rational { ua[..r].iter().sum() };
    let suffix_b = |r: usize| -> Rational { ub[r - 1..].iter().sum() };

    // Rising schedule: (segment end, active component), in parameter order.
    let mut schedule: Vec<(Rational, usize)> = Vec::new();

    // Upper cascade on [a, t_0]: actives m+1, ..., l then l-1, ..., m+1.
    let p = l - m;
    let r_i = |i: usize| a + &ua[m + i] - &ua[m];
    let t_i = |i: usize| prefix_a(m + i + 1) + suffix_b(m + i + 1) - &ua[m];
    for i in 0..p - 1 {
        schedule.push((r_i(i + 1), m + 1 + i));
    }
    schedule.push((t_i(p - 1), l));
    for i in (0..p - 1).rev() {
        schedule.push((t_i(i), m + 1 + i));
    }

    // Lower cascade on [t_0, b]: the mirror run, actives m, ..., k then
    // k+1, ..., m. Its entry point u_0 coincides with the pivot t_0.
    let d = m - k + 1;
    let u_i = |i: usize| prefix_a(m - i) + suffix_b(m - i) - &ub[m - 1];
    let w_i = |i: usize| b - &ub[m - 1] + &ub[m - 1 - i];
    debug_assert_eq!(u_i(0), t_i(0));
    for i in 0..d - 1 {
        schedule.push((u_i(i + 1), m - i));
    }
    schedule.push((w_i(d - 1), k));
    for i in (0..d - 1).rev() {
        schedule.push((w_i(i), m - i));
    }

    // Drop the zero-length entries created by tight staircase steps.
    let mut segments: Vec<Segment> = Vec::with_capacity(schedule.len());
    let mut pos = a.clone();
    for (end, active) in schedule {
        if end < pos {
            return Err(BuildError::Certification(format!(
                "schedule runs backwards at q = {end}"
            )));
        }
        if end > pos {
            pos = end.clone();
            segments.push(Segment { end, active });
        }
    }

    let sys = NSystem::try_new(n, a.clone(), ua.to_vec(), segments)?;
    certify_bridge(&sys, ua, ub, m, window)?;
    Ok(sys)
}

/// Re-derivation guard: endpoint values, strict `P_m < P_{m+1}` inside,
/// exactly one interior tie for the other adjacent pairs in the window,
/// non-degeneracy. A failure here is a construction bug, never user error.
fn certify_bridge(
    sys: &NSystem,
    ua: &[Rational],
    ub: &[Rational],
    m: usize,
    window: IntervalType,
) -> Result<(), BuildError> {
    if sys.initial() != ua {
        return Err(BuildError::Certification("initial values drifted".into()));
    }
    if sys.final_values() != ub {
        return Err(BuildError::Certification(format!(
            "final values {:?} differ from the prescription {ub:?}",
            sys.final_values()
        )));
    }
    if !sys.is_nondegenerate() {
        return Err(BuildError::Certification("bridge is degenerate".into()));
    }
    // Ties of adjacent components in a non-degenerate system are isolated
    // and sit on breakpoints, so counting over breakpoints is exact.
    let interior = 1..sys.breakpoint_count() - 1;
    for j in window.k..window.l {
        let ties = interior
            .clone()
            .filter(|&i| {
                let v = sys.values_at_breakpoint(i);
                v[j - 1] == v[j]
            })
            .count();
        if j == m && ties != 0 {
            return Err(BuildError::Certification(format!(
                "P_{m} meets P_{} inside the bridge",
                m + 1
            )));
        }
        if j != m && ties != 1 {
            return Err(BuildError::Certification(format!(
                "P_{j} meets P_{} {ties} times, expected once",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Realize a whole division-point sequence as one system by concatenating
/// bridges, then certify that the m-division numbers of the result are the
/// anchors and nothing else.
pub fn chain(seq: &DivisionPointSeq) -> Result<NSystem, BuildError> {
    let mut segments = Vec::new();
    for i in 0..seq.points.len() - 1 {
        let piece = bridge_validated(
            &seq.points[i],
            &seq.points[i + 1],
            seq.m,
            seq.windows[i],
            &seq.anchors[i..=i + 1],
        )?;
        segments.extend_from_slice(piece.segments());
    }
    let sys = NSystem::try_new(seq.n, seq.anchors[0].clone(), seq.points[0].clone(), segments)?;
    let division = sys.division_numbers(seq.m)?;
    let got = division.numbers();
    if got != seq.anchors {
        return Err(BuildError::AnchorMismatch { expected: seq.anchors.clone(), got });
    }
    Ok(sys)
}

/// Wire form of a self-similar seed, exactly the JSON payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSeed {
    pub m: usize,
    pub n: usize,
    pub rho: Rational,
    pub points: Vec<Vec<Rational>>,
}

/// Periodic seed data: points `ua^(1), ..., ua^(s)` together with a ratio
/// `rho > 1` such that appending `rho * ua^(1)` extends the sequence. The
/// generated system repeats forever with period factor `rho`; its ratio
/// invariants come from one period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfSimilarSeed {
    m: usize,
    n: usize,
    rho: Rational,
    points: Vec<Vec<Rational>>,
}

impl SelfSimilarSeed {
    pub fn new(m: usize, rho: Rational, points: Vec<Vec<Rational>>) -> Result<Self, BuildError> {
        if points.is_empty() {
            return Err(BuildError::TooFewPoints(1, 0));
        }
        if rho <= Rational::one() {
            return Err(BuildError::BadRho(rho));
        }
        for (j, c) in points[0].iter().enumerate() {
            if !c.is_positive() {
                return Err(BuildError::SeedNotPositive(points[0][j].clone()));
            }
        }
        let n = points[0].len();
        // one full period plus the wrap point
        let mut extended = points.clone();
        extended.push(points[0].iter().map(|c| &rho * c).collect());
        validate_division_seq(&extended, m)?;
        Ok(SelfSimilarSeed { m, n, rho, points })
    }

    pub fn from_raw(raw: RawSeed) -> Result<Self, BuildError> {
        let seed = Self::new(raw.m, raw.rho, raw.points)?;
        if seed.n != raw.n {
            return Err(BuildError::BadPoint {
                index: 0,
                detail: format!("declared n = {} but points have {} coordinates", raw.n, seed.n),
            });
        }
        Ok(seed)
    }

    pub fn to_raw(&self) -> RawSeed {
        RawSeed { m: self.m, n: self.n, rho: self.rho.clone(), points: self.points.clone() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn s(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    /// `rho^j * ua^(i)` over `periods` periods plus the closing point.
    pub fn unfolded_points(&self, periods: usize) -> Vec<Vec<Rational>> {
        let mut out = Vec::with_capacity(periods * self.s() + 1);
        let mut factor = Rational::one();
        for _ in 0..periods {
            for p in &self.points {
                out.push(p.iter().map(|c| &factor * c).collect());
            }
            factor = &factor * &self.rho;
        }
        out.push(self.points[0].iter().map(|c| &factor * c).collect());
        out
    }

    /// The finite system realizing `periods` periods of the seed.
    pub fn unfold(&self, periods: usize) -> Result<NSystem, BuildError> {
        if periods == 0 {
            return Err(BuildError::NoPeriods);
        }
        let points = self.unfolded_points(periods);
        chain(&validate_division_seq(&points, self.m)?)
    }
}

impl Serialize for SelfSimilarSeed {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SelfSimilarSeed {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSeed::deserialize(deserializer)?;
        SelfSimilarSeed::from_raw(raw).map_err(serde::de::Error::custom)
    }
}
