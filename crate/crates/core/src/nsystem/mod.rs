//! The n-system type and its structural queries.
//!
//! An n-system on `[q0, q1]` is stored as the initial value vector at `q0`
//! plus a run of segments, each carrying its right endpoint and the index
//! (1-based) of the unique component rising with slope 1 on it. Validation
//! checks the three defining conditions:
//!
//! * S1 — structure: positive-length segments, active indices in range;
//! * S2 — components sorted at every breakpoint and summing to `q`;
//! * S3 — when the active index jumps up across a breakpoint, all components
//!   between the old and new active are equal there.
//!
//! Checking S2 at breakpoints only is enough: within a segment exactly one
//! component rises, and it is boxed by its neighbours at both ends.

mod division;
mod graph;

pub use division::{DivisionData, DivisionPoint, IntervalType, SimpleInterval};
pub use graph::{from_combined_graph, GraphEdge};

use crate::exactnum::Rational;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub end: Rational,
    pub active: usize,
}

/// Wire form of a system, exactly the JSON payload. Holds no invariants;
/// promote with [`NSystem::from_raw`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawNSystem {
    pub n: usize,
    pub q0: Rational,
    pub initial: Vec<Rational>,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("structure: {0}")]
    Structure(String),
    #[error("breakpoints not strictly increasing at segment {index}: end {end}")]
    NonMonotone { index: usize, end: Rational },
    #[error("ordering violated at q = {q}: P_{index} > P_{next}", next = index + 1)]
    Ordering { q: Rational, index: usize },
    #[error("component sum at q0 = {q0} is {sum}, expected {q0}")]
    SumMismatch { q0: Rational, sum: Rational },
    #[error(
        "S3 violated at q = {q}: active rises {from} -> {to} but P_{from}(q) != P_{to}(q)"
    )]
    S3 { q: Rational, from: usize, to: usize },
}

impl ValidationError {
    /// Stable identifier used in audit reports and CLI output.
    pub fn rule_id(&self) -> &'static str {
        match self {
            ValidationError::Structure(_) | ValidationError::NonMonotone { .. } => "S1-structure",
            ValidationError::Ordering { .. } => "S2-ordering",
            ValidationError::SumMismatch { .. } => "S2-sum",
            ValidationError::S3 { .. } => "S3-equality",
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("q = {q} outside domain [{lo}, {hi}]")]
    OutOfDomain { q: Rational, lo: Rational, hi: Rational },
    #[error("division index m = {m} must satisfy 1 <= m <= {max}")]
    BadIndex { m: usize, max: usize },
    #[error("system is degenerate: P_{index} = P_{next} on a whole segment starting at q = {q}", next = index + 1)]
    Degenerate { q: Rational, index: usize },
    #[error("{0} is not a division number for m = {1}")]
    NotDivisionNumber(Rational, usize),
    #[error("interval endpoints must satisfy a < b, got a = {0}, b = {1}")]
    EmptyInterval(Rational, Rational),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// A validated n-system. Values at every breakpoint are precomputed at
/// construction, so queries are table lookups plus one segment offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NSystem {
    n: usize,
    q0: Rational,
    segments: Vec<Segment>,
    /// `bp_values[i]` is `P` at breakpoint `i`; breakpoint 0 is `q0`,
    /// breakpoint `i >= 1` is `segments[i-1].end`.
    bp_values: Vec<Vec<Rational>>,
}

impl NSystem {
    pub fn from_raw(raw: RawNSystem) -> Result<Self, ValidationError> {
        Self::try_new(raw.n, raw.q0, raw.initial, raw.segments)
    }

    pub fn try_new(
        n: usize,
        q0: Rational,
        initial: Vec<Rational>,
        segments: Vec<Segment>,
    ) -> Result<Self, ValidationError> {
        if n < 2 {
            return Err(ValidationError::Structure(format!("n = {n} must be at least 2")));
        }
        if initial.len() != n {
            return Err(ValidationError::Structure(format!(
                "initial vector has {} entries, expected n = {n}",
                initial.len()
            )));
        }
        if segments.is_empty() {
            return Err(ValidationError::Structure("system has no segments".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.active < 1 || seg.active > n {
                return Err(ValidationError::Structure(format!(
                    "segment {i}: active component {} out of range 1..={n}",
                    seg.active
                )));
            }
        }
        let mut prev = q0.clone();
        for (i, seg) in segments.iter().enumerate() {
            if seg.end <= prev {
                return Err(ValidationError::NonMonotone { index: i, end: seg.end.clone() });
            }
            prev = seg.end.clone();
        }

        // S2 at q0: sorted and summing to q0.
        check_sorted(&initial, &q0)?;
        let sum: Rational = initial.iter().sum();
        if sum != q0 {
            return Err(ValidationError::SumMismatch { q0, sum });
        }

        // Walk breakpoints, accumulating values and checking S2 then S3.
        let mut bp_values = Vec::with_capacity(segments.len() + 1);
        bp_values.push(initial);
        let mut start = q0.clone();
        for (i, seg) in segments.iter().enumerate() {
            let mut vals = bp_values[i].clone();
            let rise = &seg.end - &start;
            vals[seg.active - 1] = &vals[seg.active - 1] + &rise;
            check_sorted(&vals, &seg.end)?;
            if let Some(next) = segments.get(i + 1) {
                // Handoff at seg.end: rising to a larger index needs the
                // intermediate components tied there.
                if next.active > seg.active && vals[seg.active - 1] != vals[next.active - 1] {
                    return Err(ValidationError::S3 {
                        q: seg.end.clone(),
                        from: seg.active,
                        to: next.active,
                    });
                }
            }
            start = seg.end.clone();
            bp_values.push(vals);
        }

        Ok(NSystem { n, q0, segments, bp_values })
    }

    pub fn to_raw(&self) -> RawNSystem {
        RawNSystem {
            n: self.n,
            q0: self.q0.clone(),
            initial: self.bp_values[0].clone(),
            segments: self.segments.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q0(&self) -> &Rational {
        &self.q0
    }

    pub fn q_end(&self) -> &Rational {
        &self.segments.last().expect("nonempty").end
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.q0, self.q_end())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Breakpoint abscissae: `q0` followed by every segment end.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        std::iter::once(&self.q0).chain(self.segments.iter().map(|s| &s.end))
    }

    pub fn breakpoint_count(&self) -> usize {
        self.segments.len() + 1
    }

    pub fn breakpoint(&self, i: usize) -> &Rational {
        if i == 0 {
            &self.q0
        } else {
            &self.segments[i - 1].end
        }
    }

    pub fn values_at_breakpoint(&self, i: usize) -> &[Rational] {
        &self.bp_values[i]
    }

    pub fn initial(&self) -> &[Rational] {
        &self.bp_values[0]
    }

    pub fn final_values(&self) -> &[Rational] {
        self.bp_values.last().expect("nonempty")
    }

    /// `P(q)`, exact. Errors outside the domain.
    pub fn evaluate(&self, q: &Rational) -> Result<Vec<Rational>, QueryError> {
        let (lo, hi) = self.domain();
        if q < lo || q > hi {
            return Err(QueryError::OutOfDomain {
                q: q.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        // Index of the first segment whose end is >= q.
        let idx = self.segments.partition_point(|s| &s.end < q);
        if idx == self.segments.len() {
            return Ok(self.final_values().to_vec());
        }
        let start = self.breakpoint(idx);
        let mut vals = self.bp_values[idx].clone();
        let active = self.segments[idx].active;
        vals[active - 1] = &vals[active - 1] + &(q - start);
        Ok(vals)
    }

    /// Switch numbers: both domain endpoints plus every interior breakpoint
    /// where the active index strictly decreases (some partial sum regains
    /// slope 1 there).
    pub fn switch_numbers(&self) -> Vec<Rational> {
        let mut out = vec![self.q0.clone()];
        for w in self.segments.windows(2) {
            if w[1].active < w[0].active {
                out.push(w[0].end.clone());
            }
        }
        out.push(self.q_end().clone());
        out
    }

    /// Rigid of mesh `delta`: at every switch number the n values are
    /// pairwise distinct nonzero integer multiples of `delta`.
    pub fn is_rigid(&self, delta: &Rational) -> bool {
        assert!(delta.is_positive(), "mesh must be positive");
        let switches = self.switch_numbers();
        switches.iter().all(|q| {
            let vals = self.evaluate(q).expect("switch numbers lie in the domain");
            let multiples_ok = vals.iter().all(|v| {
                let ratio = v / delta;
                ratio.is_integer() && !ratio.is_zero()
            });
            // values are sorted, so adjacent distinctness is enough
            multiples_ok && vals.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Non-degenerate: `P_1 < ... < P_n` wherever `P` is differentiable.
    /// Equivalent test: no adjacent pair is tied across a whole segment.
    pub fn is_nondegenerate(&self) -> bool {
        for i in 0..self.segments.len() {
            let (u, v) = (&self.bp_values[i], &self.bp_values[i + 1]);
            for j in 0..self.n - 1 {
                if u[j] == u[j + 1] && v[j] == v[j + 1] {
                    return false;
                }
            }
        }
        true
    }

    /// The opposite system `P∨(q) = (-P_n(-q), ..., -P_1(-q))` on the
    /// reflected domain. An involution; sends forward systems (values >= 0)
    /// to backwards ones (values <= 0).
    pub fn opposite(&self) -> NSystem {
        let n = self.n;
        let k = self.segments.len();
        let mut segments = Vec::with_capacity(k);
        for i in (0..k).rev() {
            // original segment i spans [breakpoint(i), end_i]
            segments.push(Segment {
                end: -self.breakpoint(i),
                active: n + 1 - self.segments[i].active,
            });
        }
        let q0 = -self.q_end();
        let initial: Vec<Rational> = self.final_values().iter().rev().map(|v| -v).collect();
        NSystem::try_new(n, q0, initial, segments)
            .expect("opposite of a valid system is valid")
    }
}

fn check_sorted(vals: &[Rational], q: &Rational) -> Result<(), ValidationError> {
    for j in 0..vals.len() - 1 {
        if vals[j] > vals[j + 1] {
            return Err(ValidationError::Ordering { q: q.clone(), index: j + 1 });
        }
    }
    Ok(())
}

/// The sorting map: components in non-decreasing order.
pub fn sort_vector(mut v: Vec<Rational>) -> Vec<Rational> {
    v.sort();
    v
}

impl Serialize for NSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawNSystem::deserialize(deserializer)?;
        NSystem::from_raw(raw).map_err(de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) fn rat(s: &str) -> Rational {
    s.parse().unwrap()
}

#[cfg(test)]
pub(crate) fn rats(ss: &[&str]) -> Vec<Rational> {
    ss.iter().map(|s| s.parse().unwrap()).collect()
}
