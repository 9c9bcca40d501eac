//! Division numbers, interval types and simple intervals.
//!
//! For `1 <= m < n`, the m-division numbers of a system are the parameters
//! where `P_m = P_{m+1}`. For a non-degenerate system these are isolated and
//! all lie on breakpoints, so scanning the breakpoint table is exact.

use super::{NSystem, QueryError};
use crate::exactnum::Rational;
use serde::{Deserialize, Serialize};

/// One division number with the values and partial sums at it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionPoint {
    pub q: Rational,
    pub values: Vec<Rational>,
    /// `S_m^- = P_1 + ... + P_m`
    pub lower_sum: Rational,
    /// `S_m^+ = P_{m+1} + ... + P_n`
    pub upper_sum: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionData {
    pub m: usize,
    pub points: Vec<DivisionPoint>,
}

impl DivisionData {
    pub fn numbers(&self) -> Vec<Rational> {
        self.points.iter().map(|p| p.q.clone()).collect()
    }
}

/// The changed-index window of a division interval: exactly the components
/// `k..=l` move across it, with `k <= m < l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalType {
    pub k: usize,
    pub l: usize,
}

impl IntervalType {
    pub fn contains(&self, j: usize) -> bool {
        self.k <= j && j <= self.l
    }

    /// Whether the window contains all of `k..=l`.
    pub fn covers(&self, k: usize, l: usize) -> bool {
        self.k <= k && l <= self.l
    }
}

/// A division interval with no division number in its interior, together
/// with its pivot: `S_m^-` is constant on `[a, t]` and rises with slope 1 on
/// `[t, b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleInterval {
    /// index of `a` within the division-number list
    pub index: usize,
    pub a: Rational,
    pub b: Rational,
    pub pivot: Rational,
    pub kind: IntervalType,
}

pub(crate) fn lower_sum(values: &[Rational], m: usize) -> Rational {
    values[..m].iter().sum()
}

pub(crate) fn upper_sum(values: &[Rational], m: usize) -> Rational {
    values[m..].iter().sum()
}

impl NSystem {
    fn check_m(&self, m: usize) -> Result<(), QueryError> {
        if m < 1 || m >= self.n() {
            return Err(QueryError::BadIndex { m, max: self.n() - 1 });
        }
        Ok(())
    }

    /// Rejects degenerate systems: a whole segment of tied `P_m = P_{m+1}`
    /// would make the division set a continuum.
    fn check_nondegenerate(&self) -> Result<(), QueryError> {
        for i in 0..self.segments().len() {
            let (u, v) = (self.values_at_breakpoint(i), self.values_at_breakpoint(i + 1));
            for j in 0..self.n() - 1 {
                if u[j] == u[j + 1] && v[j] == v[j + 1] {
                    return Err(QueryError::Degenerate {
                        q: self.breakpoint(i).clone(),
                        index: j + 1,
                    });
                }
            }
        }
        Ok(())
    }

    /// All m-division numbers, in increasing order, with sums.
    pub fn division_numbers(&self, m: usize) -> Result<DivisionData, QueryError> {
        self.check_m(m)?;
        self.check_nondegenerate()?;
        let mut points = Vec::new();
        for i in 0..self.breakpoint_count() {
            let vals = self.values_at_breakpoint(i);
            if vals[m - 1] == vals[m] {
                points.push(DivisionPoint {
                    q: self.breakpoint(i).clone(),
                    values: vals.to_vec(),
                    lower_sum: lower_sum(vals, m),
                    upper_sum: upper_sum(vals, m),
                });
            }
        }
        Ok(DivisionData { m, points })
    }

    fn require_division_number(&self, m: usize, q: &Rational) -> Result<Vec<Rational>, QueryError> {
        let vals = self.evaluate(q)?;
        if vals[m - 1] != vals[m] {
            return Err(QueryError::NotDivisionNumber(q.clone(), m));
        }
        Ok(vals)
    }

    /// Changed-index window of the division interval `[a, b]`, with the
    /// staircase inequalities `P_j(a) <= P_{j-1}(b)` certified along the way.
    pub fn interval_type(
        &self,
        m: usize,
        a: &Rational,
        b: &Rational,
    ) -> Result<IntervalType, QueryError> {
        self.check_m(m)?;
        if a >= b {
            return Err(QueryError::EmptyInterval(a.clone(), b.clone()));
        }
        let va = self.require_division_number(m, a)?;
        let vb = self.require_division_number(m, b)?;
        let mut changed = Vec::new();
        for j in 0..self.n() {
            if va[j] > vb[j] {
                return Err(QueryError::Inconsistent(format!(
                    "P_{} decreases across [{a}, {b}]",
                    j + 1
                )));
            }
            if va[j] < vb[j] {
                changed.push(j + 1);
            }
        }
        let (Some(&k), Some(&l)) = (changed.first(), changed.last()) else {
            return Err(QueryError::Inconsistent(format!(
                "no component changes across [{a}, {b}]"
            )));
        };
        if changed.len() != l - k + 1 {
            return Err(QueryError::Inconsistent(format!(
                "changed set {changed:?} across [{a}, {b}] is not consecutive"
            )));
        }
        if !(k <= m && m < l) {
            return Err(QueryError::Inconsistent(format!(
                "changed window [{k}, {l}] across [{a}, {b}] does not straddle m = {m}"
            )));
        }
        for j in k + 1..=l {
            if va[j - 1] > vb[j - 2] {
                return Err(QueryError::Inconsistent(format!(
                    "staircase fails across [{a}, {b}]: P_{j}(a) > P_{}(b)",
                    j - 1
                )));
            }
        }
        Ok(IntervalType { k, l })
    }

    /// The simple intervals between consecutive m-division numbers, each
    /// carrying the pivot `t = S_m^-(a) + S_m^+(b)`. Certifies `a < t < b`
    /// and the constant/slope-1 split of `S_m^-` around `t`.
    pub fn simple_intervals(&self, m: usize) -> Result<Vec<SimpleInterval>, QueryError> {
        let data = self.division_numbers(m)?;
        self.simple_intervals_of(&data)
    }

    pub fn simple_intervals_of(
        &self,
        data: &DivisionData,
    ) -> Result<Vec<SimpleInterval>, QueryError> {
        let m = data.m;
        let mut out = Vec::new();
        for (i, pair) in data.points.windows(2).enumerate() {
            let (pa, pb) = (&pair[0], &pair[1]);
            let pivot = &pa.lower_sum + &pb.upper_sum;
            if !(pa.q < pivot && pivot < pb.q) {
                return Err(QueryError::Inconsistent(format!(
                    "pivot {pivot} outside ({}, {})",
                    pa.q, pb.q
                )));
            }
            let at_pivot = self.evaluate(&pivot)?;
            let s_at_pivot = lower_sum(&at_pivot, m);
            // S_m^- has slopes in {0,1}, so equal endpoint values mean
            // constant, and full-length growth means slope 1 throughout.
            if s_at_pivot != pa.lower_sum {
                return Err(QueryError::Inconsistent(format!(
                    "S_m^- not constant on [{}, {pivot}]",
                    pa.q
                )));
            }
            if &pb.lower_sum - &s_at_pivot != &pb.q - &pivot {
                return Err(QueryError::Inconsistent(format!(
                    "S_m^- not of slope 1 on [{pivot}, {}]",
                    pb.q
                )));
            }
            let kind = self.interval_type(m, &pa.q, &pb.q)?;
            out.push(SimpleInterval {
                index: i,
                a: pa.q.clone(),
                b: pb.q.clone(),
                pivot,
                kind,
            });
        }
        Ok(out)
    }
}
