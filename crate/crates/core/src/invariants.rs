//! The approximation invariants of a system.
//!
//! For a system with m-division numbers `a_1 < a_2 < ...` put
//! `A_i^- = P_1(a_i) + ... + P_m(a_i)` and
//! `A_i^+ = P_{m+1}(a_i) + ... + P_n(a_i)`. The two invariants are
//!
//! ```text
//! chi_lower_m = liminf_i A_i^+ / A_i^-       (ratio at one anchor)
//! chi_upper_m = limsup_i A_{i+1}^+ / A_i^-   (ratio across an interval)
//! ```
//!
//! For a self-similar seed the ratios repeat with period `s`, so the limits
//! collapse to an exact min/max over one period; for a plain finite system
//! we report hatted finite-horizon estimates instead. The backwards
//! invariants of the opposite system recover the dual pair: running the
//! parameter to -infinity in `P` opposite reads the same data with all
//! ratios inverted and the cross pairs reversed.

use crate::builder::{BuildError, SelfSimilarSeed};
use crate::exactnum::{ExtReal, Rational};
use crate::nsystem::{DivisionData, NSystem, QueryError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error)]
pub enum InvariantError {
    #[error("spectrum point needs alpha <= beta, got alpha = {alpha}, beta = {beta}")]
    Unordered { alpha: ExtReal, beta: ExtReal },
    #[error("need at least 2 division numbers, found {0}")]
    ShortTrace(usize),
    #[error("S_m^- vanishes at q = {q}; chi is undefined there")]
    ZeroDenominator { q: Rational },
    #[error("backwards invariants need m = n - seed m = {expected}, got {got}")]
    MismatchedM { expected: usize, got: usize },
    #[error("duality routes disagree: direct {direct:?} vs opposite {dual:?}")]
    DualityMismatch { direct: SpectrumPoint, dual: SpectrumPoint },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A point (alpha, beta) of a best-versus-uniform spectrum, alpha <= beta.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumPoint {
    pub alpha: ExtReal,
    pub beta: ExtReal,
}

impl SpectrumPoint {
    pub fn new(alpha: ExtReal, beta: ExtReal) -> Result<Self, InvariantError> {
        if alpha > beta {
            return Err(InvariantError::Unordered { alpha, beta });
        }
        Ok(SpectrumPoint { alpha, beta })
    }

    pub fn finite(alpha: Rational, beta: Rational) -> Result<Self, InvariantError> {
        Self::new(ExtReal::Finite(alpha), ExtReal::Finite(beta))
    }

    /// Both coordinates, insisting they are finite (as chi pairs always are).
    pub fn as_rationals(&self) -> (&Rational, &Rational) {
        match (&self.alpha, &self.beta) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a, b),
            _ => panic!("spectrum point is not finite"),
        }
    }
}

impl<'de> Deserialize<'de> for SpectrumPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: ExtReal,
            beta: ExtReal,
        }
        let raw = Raw::deserialize(deserializer)?;
        SpectrumPoint::new(raw.alpha, raw.beta).map_err(serde::de::Error::custom)
    }
}

/// One anchor of an invariant trace. `ratio_cross` pairs this anchor with
/// the next one and is absent on the final row of a finite trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantRow {
    pub index: usize,
    pub anchor: Rational,
    pub lower: Rational,
    pub upper: Rational,
    pub ratio_self: Rational,
    pub ratio_cross: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantTrace {
    pub m: usize,
    pub rows: Vec<InvariantRow>,
}

impl InvariantTrace {
    /// Finite-horizon estimate of chi_lower: min of the self ratios.
    pub fn alpha_hat(&self) -> Rational {
        self.rows.iter().map(|r| r.ratio_self.clone()).reduce(Rational::min).unwrap()
    }

    /// Finite-horizon estimate of chi_upper: max of the cross ratios.
    pub fn beta_hat(&self) -> Rational {
        self.rows
            .iter()
            .filter_map(|r| r.ratio_cross.clone())
            .reduce(Rational::max)
            .unwrap()
    }
}

fn make_rows(
    anchors: &[Rational],
    lower: &[Rational],
    upper: &[Rational],
    wrap_upper: Option<Rational>,
) -> Vec<InvariantRow> {
    let count = anchors.len();
    (0..count)
        .map(|i| {
            let next_upper = if i + 1 < count { Some(&upper[i + 1]) } else { wrap_upper.as_ref() };
            let ratio_cross = next_upper.map(|u| u / &lower[i]);
            let row = InvariantRow {
                index: i + 1,
                anchor: anchors[i].clone(),
                lower: lower[i].clone(),
                upper: upper[i].clone(),
                ratio_self: &upper[i] / &lower[i],
                ratio_cross,
            };
            // A^+ never decreases along the trace, so cross dominates self.
            if let Some(c) = &row.ratio_cross {
                assert!(&row.ratio_self <= c, "cross ratio fell below self ratio");
            }
            row
        })
        .collect()
}

fn split_sums(points: &[Vec<Rational>], m: usize) -> (Vec<Rational>, Vec<Rational>) {
    let lower = points.iter().map(|p| p[..m].iter().sum()).collect();
    let upper = points.iter().map(|p| p[m..].iter().sum()).collect();
    (lower, upper)
}

/// One period of the trace, with the cross ratio at the seam obtained by
/// scaling index 1 with rho.
pub fn periodic_trace(seed: &SelfSimilarSeed) -> InvariantTrace {
    let m = seed.m();
    let anchors: Vec<Rational> = seed.points().iter().map(|p| p.iter().sum()).collect();
    let (lower, upper) = split_sums(seed.points(), m);
    let wrap = seed.rho() * &upper[0];
    InvariantTrace { m, rows: make_rows(&anchors, &lower, &upper, Some(wrap)) }
}

/// Exact (chi_lower, chi_upper) of the self-similar system the seed spans.
pub fn chi_pair_periodic(seed: &SelfSimilarSeed) -> SpectrumPoint {
    let trace = periodic_trace(seed);
    let alpha = trace.alpha_hat();
    let beta = trace.beta_hat();
    // chi_lower >= (n-m)/m for every valid system: each of the n-m upper
    // components dominates the mean of the lower block.
    let (m, n) = (seed.m(), seed.n());
    assert!(
        &alpha * Rational::from_int(m as i64) >= Rational::from_int((n - m) as i64),
        "chi lower bound violated: the seed is corrupt"
    );
    SpectrumPoint::finite(alpha, beta).expect("periodic ratios are ordered")
}

/// Trace over all m-division numbers of a finite system.
pub fn chi_trace_finite(sys: &NSystem, m: usize) -> Result<InvariantTrace, InvariantError> {
    let data = sys.division_numbers(m)?;
    trace_of_division(&data)
}

fn trace_of_division(data: &DivisionData) -> Result<InvariantTrace, InvariantError> {
    if data.points.len() < 2 {
        return Err(InvariantError::ShortTrace(data.points.len()));
    }
    let anchors: Vec<Rational> = data.points.iter().map(|p| p.q.clone()).collect();
    let lower: Vec<Rational> = data.points.iter().map(|p| p.lower_sum.clone()).collect();
    let upper: Vec<Rational> = data.points.iter().map(|p| p.upper_sum.clone()).collect();
    Ok(InvariantTrace { m: data.m, rows: make_rows(&anchors, &lower, &upper, None) })
}

/// chi_m(q) = S_m^+(q) / S_m^-(q) at every breakpoint. Between consecutive
/// breakpoints chi is a Moebius function of q, hence monotone there, so
/// these values carry the global extrema.
pub fn chi_profile(sys: &NSystem, m: usize) -> Result<Vec<(Rational, Rational)>, InvariantError> {
    if m < 1 || m >= sys.n() {
        return Err(QueryError::BadIndex { m, max: sys.n() - 1 }.into());
    }
    let mut out = Vec::with_capacity(sys.breakpoint_count());
    for i in 0..sys.breakpoint_count() {
        let q = sys.breakpoint(i).clone();
        let vals = sys.values_at_breakpoint(i);
        let lower: Rational = vals[..m].iter().sum();
        if !lower.is_positive() {
            return Err(InvariantError::ZeroDenominator { q });
        }
        let upper: Rational = vals[m..].iter().sum();
        out.push((q, upper / lower));
    }
    Ok(out)
}

/// The chi pair of the seed's system at an arbitrary index m. The seed's own
/// index is read off its period directly; any other index is recovered from a
/// two-period unfolding: by self-similarity the m-division numbers repeat
/// with factor rho, so the anchors in `(q0, rho * q0]` form one full period
/// and each has its successor inside the unfolded window.
pub fn chi_pair_at(seed: &SelfSimilarSeed, m: usize) -> Result<SpectrumPoint, InvariantError> {
    if m == seed.m() {
        return Ok(chi_pair_periodic(seed));
    }
    let n = seed.n();
    if m < 1 || m >= n {
        return Err(QueryError::BadIndex { m, max: n - 1 }.into());
    }
    let sys = seed.unfold(2)?;
    let data = sys.division_numbers(m)?;
    let q0 = sys.q0();
    let q1 = seed.rho() * q0;
    let pts = &data.points;
    let mut alpha: Option<Rational> = None;
    let mut beta: Option<Rational> = None;
    for (i, p) in pts.iter().enumerate() {
        if !(&p.q > q0 && p.q <= q1) {
            continue;
        }
        if !p.lower_sum.is_positive() {
            return Err(InvariantError::ZeroDenominator { q: p.q.clone() });
        }
        let own = &p.upper_sum / &p.lower_sum;
        let next = pts.get(i + 1).ok_or(InvariantError::ShortTrace(pts.len()))?;
        let cross = &next.upper_sum / &p.lower_sum;
        alpha = Some(alpha.map_or(own.clone(), |a| a.min(own)));
        beta = Some(beta.map_or(cross.clone(), |b| b.max(cross)));
    }
    match (alpha, beta) {
        (Some(a), Some(b)) => Ok(SpectrumPoint::finite(a, b)?),
        _ => Err(InvariantError::ShortTrace(pts.len())),
    }
}

/// The dual pair (chi_lower_{n-m}, chi_upper_{n-m}) computed two ways: once
/// directly from the seed's own period, once through the opposite system's
/// backwards trace. The routes must agree bit for bit.
pub fn chi_pair_backwards(
    seed: &SelfSimilarSeed,
    m: usize,
) -> Result<SpectrumPoint, InvariantError> {
    let n = seed.n();
    if m + seed.m() != n {
        return Err(InvariantError::MismatchedM { expected: n - seed.m(), got: m });
    }
    let direct = chi_pair_periodic(seed);

    // Two periods are enough to read one full period of backwards ratios
    // without touching the boundary anchors.
    let opp = seed.unfold(2)?.opposite();
    let data = opp.division_numbers(m)?;
    let s = seed.s();
    debug_assert_eq!(data.points.len(), 2 * s + 1);
    let ratio_self =
        |i: usize| -> Rational { &data.points[i].upper_sum / &data.points[i].lower_sum };
    let ratio_cross =
        |i: usize| -> Rational { &data.points[i + 1].upper_sum / &data.points[i].lower_sum };
    // limsup of self ratios and liminf of cross ratios as i -> -infinity;
    // periodicity reduces both to one period at the deep end.
    let chi_upper_opp = (0..s).map(ratio_self).reduce(Rational::max).unwrap();
    let chi_lower_opp = (0..s).map(ratio_cross).reduce(Rational::min).unwrap();
    let dual = SpectrumPoint::finite(chi_upper_opp.recip(), chi_lower_opp.recip())?;

    if dual != direct {
        return Err(InvariantError::DualityMismatch { direct, dual });
    }
    Ok(direct)
}
