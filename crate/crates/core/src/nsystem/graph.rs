//! Combined-graph export and reconstruction.
//!
//! The combined graph of a system over one segment is one slope-1 edge plus
//! `n - 1` horizontal edges (duplicates included, one per component). A
//! non-degenerate system is recoverable from its combined graph: sort the
//! ordinates to get the values, and read the active index off the rank of
//! the diagonal.

use super::{NSystem, Segment, ValidationError};
use crate::exactnum::Rational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub q_start: Rational,
    pub y_start: Rational,
    pub q_end: Rational,
    pub y_end: Rational,
    /// 0 for horizontal, 1 for diagonal
    pub slope: u8,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("no edges")]
    Empty,
    #[error("edge has inconsistent geometry: {0:?}")]
    BadEdge(Box<GraphEdge>),
    #[error("segment starting at q = {0} has {1} edges, expected {2}")]
    WrongEdgeCount(Rational, usize, usize),
    #[error("segment starting at q = {0} must have exactly one slope-1 edge, found {1}")]
    WrongSlopeCount(Rational, usize),
    #[error("segments do not tile an interval near q = {0}")]
    Gap(Rational),
    #[error("ordinate multisets disagree across the breakpoint q = {0}")]
    Mismatch(Rational),
    #[error("diagonal meets a horizontal strictly inside the segment starting at q = {0}")]
    InteriorCrossing(Rational),
    #[error("reconstructed data is not a valid system: {0}")]
    Invalid(#[from] ValidationError),
}

impl NSystem {
    /// Every component restricted to every segment, as explicit edges.
    /// Duplicate horizontal ordinates are emitted as-is; consumers collapse
    /// them if they want the geometric `n - 1` distinct lines.
    pub fn combined_graph_export(&self) -> Vec<GraphEdge> {
        let mut edges = Vec::with_capacity(self.segments().len() * self.n());
        for (i, seg) in self.segments().iter().enumerate() {
            let start = self.breakpoint(i);
            let u = self.values_at_breakpoint(i);
            let v = self.values_at_breakpoint(i + 1);
            for j in 0..self.n() {
                edges.push(GraphEdge {
                    q_start: start.clone(),
                    y_start: u[j].clone(),
                    q_end: seg.end.clone(),
                    y_end: v[j].clone(),
                    slope: u8::from(j + 1 == seg.active),
                });
            }
        }
        edges
    }
}

/// Rebuild a system from combined-graph edges. Inverse of
/// [`NSystem::combined_graph_export`] on non-degenerate systems.
pub fn from_combined_graph(edges: &[GraphEdge]) -> Result<NSystem, GraphError> {
    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    for e in edges {
        let dq = &e.q_end - &e.q_start;
        if !dq.is_positive() {
            return Err(GraphError::BadEdge(Box::new(e.clone())));
        }
        let rise = &e.y_end - &e.y_start;
        let ok = match e.slope {
            0 => rise.is_zero(),
            1 => rise == dq,
            _ => false,
        };
        if !ok {
            return Err(GraphError::BadEdge(Box::new(e.clone())));
        }
    }

    // Bucket edges into segments by their q-span.
    let mut groups: Vec<(Rational, Rational, Vec<&GraphEdge>)> = Vec::new();
    let mut sorted: Vec<&GraphEdge> = edges.iter().collect();
    sorted.sort_by(|a, b| (&a.q_start, &a.q_end).cmp(&(&b.q_start, &b.q_end)));
    for e in sorted {
        match groups.last_mut() {
            Some((qs, qe, bucket)) if *qs == e.q_start && *qe == e.q_end => bucket.push(e),
            _ => groups.push((e.q_start.clone(), e.q_end.clone(), vec![e])),
        }
    }

    let n = groups[0].2.len();
    let mut segments = Vec::with_capacity(groups.len());
    let mut prev_end: Option<(Rational, Vec<Rational>)> = None;
    let mut initial = None;

    for (qs, qe, bucket) in &groups {
        if bucket.len() != n {
            return Err(GraphError::WrongEdgeCount(qs.clone(), bucket.len(), n));
        }
        let diagonals = bucket.iter().filter(|e| e.slope == 1).count();
        if diagonals != 1 {
            return Err(GraphError::WrongSlopeCount(qs.clone(), diagonals));
        }
        let mut starts: Vec<Rational> = bucket.iter().map(|e| e.y_start.clone()).collect();
        starts.sort();
        let mut ends: Vec<Rational> = bucket.iter().map(|e| e.y_end.clone()).collect();
        ends.sort();
        match &prev_end {
            None => initial = Some(starts.clone()),
            Some((q, vals)) => {
                if q != qs {
                    return Err(GraphError::Gap(qs.clone()));
                }
                if vals != &starts {
                    return Err(GraphError::Mismatch(qs.clone()));
                }
            }
        }
        prev_end = Some((qe.clone(), ends));

        // Rank the diagonal at the segment midpoint. Inside the open segment
        // the diagonal of a valid export never meets a horizontal, so the
        // rank there is unambiguous.
        let diag = bucket.iter().find(|e| e.slope == 1).expect("counted above");
        let half = Rational::new(1, 2).unwrap();
        let mid_offset = (qe - qs) * half;
        let diag_mid = &diag.y_start + &mid_offset;
        let mut below = 0usize;
        for e in bucket.iter().filter(|e| e.slope == 0) {
            if e.y_start == diag_mid {
                return Err(GraphError::InteriorCrossing(qs.clone()));
            }
            if e.y_start < diag_mid {
                below += 1;
            }
        }
        segments.push(Segment { end: qe.clone(), active: below + 1 });
    }

    let q0 = groups[0].0.clone();
    let sys = NSystem::try_new(n, q0, initial.expect("at least one group"), segments)?;
    Ok(sys)
}
