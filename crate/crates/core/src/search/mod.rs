//! Boundary search over periodic window patterns.
//!
//! A pattern fixes, for each of `s` consecutive pairs of division points, the
//! window of coordinates allowed to move. Everything else about a candidate
//! periodic sequence is linear: orderings, staircase rows, the wrap seam
//! (substituted as `rho` times the first point), and the two ratio families
//! `A_i^+ >= alpha A_i^-` and `A_{i+1}^+ <= g alpha A_i^-`. Feasibility of
//! the resulting rational LP is decided exactly, so every reported `alpha_lo`
//! comes with a witness that survives re-substitution.

mod fourier_motzkin;
mod simplex;

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::builder::SelfSimilarSeed;
use crate::exactnum::{geometric_sum, Rational};
use crate::invariants::{chi_pair_periodic, SpectrumPoint};

use simplex::GeRow;

/// Default bisection depth used by the command-line driver.
pub const DEFAULT_BISECT_ITERS: u32 = 60;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("bad pattern: {0}")]
    BadPattern(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(
        "invalid bracket: alpha = {lo} feasible = {lo_feasible}, alpha = {hi} feasible = {hi_feasible}"
    )]
    BadBracket { lo: Rational, hi: Rational, lo_feasible: bool, hi_feasible: bool },
}

/// Window schedule for one period: `ranges[i] = (k, l)` says pair `i` moves
/// exactly the coordinates `k..=l`, which must straddle the tied pair
/// (`k <= m < l`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pattern {
    m: usize,
    n: usize,
    ranges: Vec<(usize, usize)>,
}

impl Pattern {
    pub fn new(m: usize, n: usize, ranges: Vec<(usize, usize)>) -> Result<Self, SearchError> {
        if m < 1 || m >= n {
            return Err(SearchError::BadPattern(format!("need 1 <= m < n, got m={m}, n={n}")));
        }
        if ranges.is_empty() {
            return Err(SearchError::BadPattern("empty window schedule".into()));
        }
        for &(k, l) in &ranges {
            if !(1 <= k && k <= m && m < l && l <= n) {
                return Err(SearchError::BadPattern(format!(
                    "window ({k},{l}) must satisfy 1 <= k <= {m} < l <= {n}"
                )));
            }
        }
        Ok(Pattern { m, n, ranges })
    }

    /// Parse a dash-joined `k:l` list, e.g. `1:5-2:5-2:5`.
    pub fn parse(text: &str, m: usize, n: usize) -> Result<Self, SearchError> {
        let mut ranges = Vec::new();
        for part in text.split('-') {
            let (k, l) = part
                .split_once(':')
                .ok_or_else(|| SearchError::BadPattern(format!("bad window `{part}`")))?;
            let k = k
                .trim()
                .parse::<usize>()
                .map_err(|e| SearchError::BadPattern(format!("bad window `{part}`: {e}")))?;
            let l = l
                .trim()
                .parse::<usize>()
                .map_err(|e| SearchError::BadPattern(format!("bad window `{part}`: {e}")))?;
            ranges.push((k, l));
        }
        Pattern::new(m, n, ranges)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Lexicographically smallest cyclic rotation of the schedule.
    fn canonical_ranges(&self) -> Vec<(usize, usize)> {
        let s = self.ranges.len();
        (0..s)
            .map(|r| {
                let mut rot = Vec::with_capacity(s);
                rot.extend_from_slice(&self.ranges[r..]);
                rot.extend_from_slice(&self.ranges[..r]);
                rot
            })
            .min()
            .unwrap()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, l)) in self.ranges.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{k}:{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Ordering,
    Staircase,
    Wrap,
    RatioLower,
    RatioUpper,
    Margin,
    Normalize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Ge,
    Eq,
}

/// `coeffs . x (>=|==) rhs` over the flattened point coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub op: Op,
    pub rhs: Rational,
    pub tag: Tag,
}

/// Linear relaxation of one pattern at a fixed `(rho, alpha, g, margin)`.
/// Variable `i*n + j` is coordinate `j+1` of point `i+1`; the closing point
/// `s+1` never appears, it is substituted as `rho` times point one.
#[derive(Clone, Debug, Serialize)]
pub struct LPInstance {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub rho: Rational,
    pub nvars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

pub fn build_lp(
    pattern: &Pattern,
    rho: &Rational,
    alpha: &Rational,
    g: &Rational,
    margin: &Rational,
) -> LPInstance {
    let (m, n, s) = (pattern.m, pattern.n, pattern.s());
    let nvars = s * n;
    let var = |i: usize, j: usize| i * n + j;
    // Column of coordinate j of the successor of point i, with its wrap scale.
    let next = |i: usize, j: usize| -> (usize, Rational) {
        if i + 1 < s {
            (var(i + 1, j), Rational::one())
        } else {
            (var(0, j), rho.clone())
        }
    };
    let mut constraints = Vec::new();
    let mut push = |coeffs: Vec<Rational>, op: Op, rhs: Rational, tag: Tag| {
        constraints.push(Constraint { coeffs, op, rhs, tag });
    };
    let zero = || vec![Rational::zero(); nvars];

    // a_1^(1) = 1
    let mut c = zero();
    c[var(0, 0)] = Rational::one();
    push(c, Op::Eq, Rational::one(), Tag::Normalize);

    // orderings: tied at (m, m+1), strict gaps relaxed to >= margin elsewhere
    for i in 0..s {
        for j in 1..n {
            let mut c = zero();
            c[var(i, j)] = Rational::one();
            c[var(i, j - 1)] = -Rational::one();
            if j == m {
                push(c, Op::Eq, Rational::zero(), Tag::Ordering);
            } else {
                push(c, Op::Ge, margin.clone(), Tag::Ordering);
            }
        }
    }

    // pair rows; the seam pair carries the wrap tag
    for i in 0..s {
        let (k, l) = pattern.ranges[i];
        let tag = if i + 1 < s { Tag::Staircase } else { Tag::Wrap };
        for j in 0..n {
            let coord = j + 1;
            let (nj, nscale) = next(i, j);
            if coord < k || coord > l {
                // frozen outside the window
                let mut c = zero();
                c[nj] = &c[nj] + &nscale;
                c[var(i, j)] = &c[var(i, j)] - &Rational::one();
                push(c, Op::Eq, Rational::zero(), tag);
            } else {
                // window coordinates grow by at least the margin
                let mut c = zero();
                c[nj] = &c[nj] + &nscale;
                c[var(i, j)] = &c[var(i, j)] - &Rational::one();
                push(c, Op::Ge, margin.clone(), Tag::Margin);
            }
            if coord > k && coord <= l {
                // staircase: a_j of point i stays below a_{j-1} of its successor
                let (pj, pscale) = next(i, j - 1);
                let mut c = zero();
                c[pj] = &c[pj] + &pscale;
                c[var(i, j)] = &c[var(i, j)] - &Rational::one();
                push(c, Op::Ge, Rational::zero(), tag);
            }
        }
    }

    // ratio rows: A_i^+ >= alpha A_i^- and A_{i+1}^+ <= g alpha A_i^-
    let galpha = g * alpha;
    for i in 0..s {
        let mut lower = zero();
        for j in 0..n {
            lower[var(i, j)] = if j < m { -alpha } else { Rational::one() };
        }
        push(lower, Op::Ge, Rational::zero(), Tag::RatioLower);

        let mut upper = zero();
        for j in 0..m {
            upper[var(i, j)] = galpha.clone();
        }
        for j in m..n {
            let (nj, nscale) = next(i, j);
            upper[nj] = &upper[nj] - &nscale;
        }
        push(upper, Op::Ge, Rational::zero(), Tag::RatioUpper);
    }

    LPInstance { m, n, s, rho: rho.clone(), nvars, constraints }
}

/// Scaled union-find used to fold the instance's two-variable equalities
/// (ties, frozen coordinates, the wrap seam) into the inequality system.
struct Subst {
    parent: Vec<usize>,
    factor: Vec<Rational>, // value(v) = factor[v] * value(parent[v])
    constv: Vec<Option<Rational>>, // at roots only
}

impl Subst {
    fn new(nvars: usize) -> Self {
        Subst {
            parent: (0..nvars).collect(),
            factor: vec![Rational::one(); nvars],
            constv: vec![None; nvars],
        }
    }

    fn find(&mut self, v: usize) -> (usize, Rational) {
        if self.parent[v] == v {
            return (v, self.factor[v].clone());
        }
        let (root, f) = self.find(self.parent[v]);
        self.parent[v] = root;
        self.factor[v] = &self.factor[v] * &f;
        (root, self.factor[v].clone())
    }

    /// Record `value(a) = c * value(b)`; false on contradiction.
    fn union_eq(&mut self, a: usize, c: &Rational, b: usize) -> bool {
        assert!(c.is_positive(), "identification scale must be positive");
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            // fa * val = c * fb * val; a mismatch pins the class to zero
            if fa == c * &fb {
                return true;
            }
            return self.bind_const(ra, Rational::zero());
        }
        let scale = &(c * &fb) / &fa; // val(ra) = scale * val(rb)
        let moved = self.constv[ra].take();
        self.parent[ra] = rb;
        self.factor[ra] = scale.clone();
        if let Some(cv) = moved {
            // val(ra) = cv => val(rb) = cv / scale
            return self.bind_const(rb, &cv / &scale);
        }
        if let Some(cv) = self.constv[rb].clone() {
            return !cv.is_negative();
        }
        true
    }

    /// Pin `value(v)` to a constant; false on contradiction.
    fn bind_const(&mut self, v: usize, value: Rational) -> bool {
        if value.is_negative() {
            return false;
        }
        let (root, f) = self.find(v);
        let root_value = &value / &f;
        match &self.constv[root] {
            Some(existing) => *existing == root_value,
            None => {
                if root_value.is_negative() {
                    return false;
                }
                self.constv[root] = Some(root_value);
                true
            }
        }
    }
}

/// Exact feasibility; the witness is checked against every constraint before
/// it is returned.
pub fn lp_feasible(inst: &LPInstance) -> Feasibility {
    let mut subst = Subst::new(inst.nvars);
    let mut ge_rows: Vec<&Constraint> = Vec::new();

    for con in &inst.constraints {
        match con.op {
            Op::Ge => ge_rows.push(con),
            Op::Eq => {
                let support: Vec<usize> =
                    (0..inst.nvars).filter(|&j| !con.coeffs[j].is_zero()).collect();
                let ok = match support.len() {
                    0 => con.rhs.is_zero(),
                    1 => {
                        let v = support[0];
                        subst.bind_const(v, &con.rhs / &con.coeffs[v])
                    }
                    2 if con.rhs.is_zero() => {
                        // c0 x0 + c1 x1 = 0  =>  x0 = (-c1/c0) x1
                        let (v0, v1) = (support[0], support[1]);
                        let scale = -&(&con.coeffs[v1] / &con.coeffs[v0]);
                        subst.union_eq(v0, &scale, v1)
                    }
                    _ => unreachable!("unexpected equality shape in pattern LP"),
                };
                if !ok {
                    return Feasibility::Infeasible;
                }
            }
        }
    }

    // Rewrite the inequalities over the surviving representatives.
    let mut roots: BTreeSet<usize> = BTreeSet::new();
    for v in 0..inst.nvars {
        let (root, _) = subst.find(v);
        if subst.constv[root].is_none() {
            roots.insert(root);
        }
    }
    let index: std::collections::BTreeMap<usize, usize> =
        roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    let mut rows: Vec<GeRow> = Vec::with_capacity(ge_rows.len());
    for con in &ge_rows {
        let mut coeffs = vec![Rational::zero(); index.len()];
        let mut rhs = con.rhs.clone();
        for v in 0..inst.nvars {
            if con.coeffs[v].is_zero() {
                continue;
            }
            let (root, f) = subst.find(v);
            let contrib = &con.coeffs[v] * &f;
            match &subst.constv[root] {
                Some(cv) => rhs = &rhs - &(&contrib * cv),
                None => {
                    let slot = index[&root];
                    coeffs[slot] = &coeffs[slot] + &contrib;
                }
            }
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            if rhs.is_positive() {
                return Feasibility::Infeasible;
            }
            continue;
        }
        rows.push(GeRow { coeffs, rhs });
    }

    let Some(solution) = simplex::feasible(&rows, index.len()) else {
        return Feasibility::Infeasible;
    };

    // Expand back to the full coordinate vector and re-substitute.
    let mut witness = vec![Rational::zero(); inst.nvars];
    for (v, w) in witness.iter_mut().enumerate() {
        let (root, f) = subst.find(v);
        let value = match &subst.constv[root] {
            Some(cv) => cv.clone(),
            None => solution[index[&root]].clone(),
        };
        *w = &f * &value;
    }
    for con in &inst.constraints {
        let lhs: Rational = con.coeffs.iter().zip(&witness).map(|(c, x)| c * x).sum();
        match con.op {
            Op::Ge => assert!(lhs >= con.rhs, "witness fails {:?} row", con.tag),
            Op::Eq => assert!(lhs == con.rhs, "witness fails {:?} row", con.tag),
        }
    }
    assert!(witness.iter().all(|x| !x.is_negative()), "negative coordinate in witness");
    Feasibility::Feasible(witness)
}

/// Independent Fourier-Motzkin verdict; `None` when the instance is too big
/// for elimination to stay tractable.
pub fn fm_feasible(inst: &LPInstance) -> Option<bool> {
    if inst.nvars > 12 {
        return None;
    }
    let mut ge = Vec::new();
    let mut eq = Vec::new();
    for con in &inst.constraints {
        let row = GeRow { coeffs: con.coeffs.clone(), rhs: con.rhs.clone() };
        match con.op {
            Op::Ge => ge.push(row),
            Op::Eq => eq.push(row),
        }
    }
    Some(fourier_motzkin::feasible(&ge, &eq, inst.nvars))
}

/// Result of a bisection run: `alpha_lo` is certified feasible (witness
/// attached), `alpha_hi` certified infeasible, and when the witness could be
/// nudged to strictness it comes back as a seed with its exact pair.
#[derive(Clone, Debug)]
pub struct MaxAlpha {
    pub alpha_lo: Rational,
    pub alpha_hi: Rational,
    pub witness: Vec<Vec<Rational>>,
    pub seed: Option<SelfSimilarSeed>,
    pub point: Option<SpectrumPoint>,
}

fn feasibility_at(pattern: &Pattern, rho: &Rational, g: &Rational, alpha: &Rational) -> Feasibility {
    lp_feasible(&build_lp(pattern, rho, alpha, g, &Rational::zero()))
}

fn reshape(witness: &[Rational], s: usize, n: usize) -> Vec<Vec<Rational>> {
    assert_eq!(witness.len(), s * n);
    witness.chunks(n).map(|c| c.to_vec()).collect()
}

/// Try to turn a boundary witness into a strict self-similar seed by
/// re-solving with a positive margin (and, as a last resort, a hair of slack
/// on the upper ratio bound).
pub(crate) fn witness_seed(
    pattern: &Pattern,
    rho: &Rational,
    g: &Rational,
    alpha: &Rational,
) -> Option<(SelfSimilarSeed, SpectrumPoint)> {
    let attempts = [
        (Rational::new(1, 1 << 16).unwrap(), Rational::zero()),
        (Rational::new(1, 1 << 24).unwrap(), Rational::zero()),
        (Rational::new(1, 1 << 30).unwrap(), Rational::new(1, 1 << 16).unwrap()),
    ];
    for (margin, slack) in attempts {
        let g_relaxed = g * &(&Rational::one() + &slack);
        let inst = build_lp(pattern, rho, alpha, &g_relaxed, &margin);
        let Feasibility::Feasible(w) = lp_feasible(&inst) else { continue };
        let points = reshape(&w, pattern.s(), pattern.n);
        let Ok(seed) = SelfSimilarSeed::new(pattern.m, rho.clone(), points) else { continue };
        let chi = chi_pair_periodic(&seed);
        {
            let (a, b) = chi.as_rationals();
            assert!(a >= alpha, "seed alpha dropped below the certified bound");
            assert!(b <= &(&g_relaxed * a), "seed beta exceeds the relaxed cap");
        }
        return Some((seed, chi));
    }
    None
}

/// Bisect for the largest feasible `alpha` along the ray `beta = g alpha`.
/// The window must bracket: feasible at `window.0`, infeasible at `window.1`.
pub fn max_alpha(
    pattern: &Pattern,
    rho: &Rational,
    g: &Rational,
    window: (Rational, Rational),
    iters: u32,
) -> Result<MaxAlpha, SearchError> {
    if !rho.is_positive() || *rho <= Rational::one() {
        return Err(SearchError::BadParameter(format!("rho must exceed 1, got {rho}")));
    }
    if *g < Rational::one() {
        return Err(SearchError::BadParameter(format!("g must be at least 1, got {g}")));
    }
    let (mut lo, mut hi) = window;
    if !lo.is_positive() || lo >= hi {
        return Err(SearchError::BadParameter(format!("bad alpha window ({lo}, {hi})")));
    }
    let lo_feas = feasibility_at(pattern, rho, g, &lo);
    let hi_feas = feasibility_at(pattern, rho, g, &hi);
    let mut witness = match (&lo_feas, &hi_feas) {
        (Feasibility::Feasible(w), Feasibility::Infeasible) => w.clone(),
        _ => {
            return Err(SearchError::BadBracket {
                lo,
                hi,
                lo_feasible: lo_feas.is_feasible(),
                hi_feasible: hi_feas.is_feasible(),
            })
        }
    };
    for _ in 0..iters {
        let mid = &(&lo + &hi) / &Rational::from(2);
        match feasibility_at(pattern, rho, g, &mid) {
            Feasibility::Feasible(w) => {
                lo = mid;
                witness = w;
            }
            Feasibility::Infeasible => hi = mid,
        }
    }
    let (seed, point) = match witness_seed(pattern, rho, g, &lo) {
        Some((s, p)) => (Some(s), Some(p)),
        None => (None, None),
    };
    Ok(MaxAlpha {
        alpha_lo: lo,
        alpha_hi: hi,
        witness: reshape(&witness, pattern.s(), pattern.n),
        seed,
        point,
    })
}

/// All window schedules of length `s`, optionally deduplicated by cyclic
/// rotation (each class keeps its lexicographically smallest member).
pub fn enumerate_patterns(m: usize, n: usize, s: usize, dedup: bool) -> Vec<Pattern> {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    assert!(s >= 1, "need at least one pair");
    let mut choices = Vec::new();
    for k in 1..=m {
        for l in m + 1..=n {
            choices.push((k, l));
        }
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; s];
    loop {
        let ranges: Vec<(usize, usize)> = idx.iter().map(|&i| choices[i]).collect();
        let pattern = Pattern { m, n, ranges };
        if !dedup || pattern.canonical_ranges() == pattern.ranges {
            out.push(pattern);
        }
        // odometer over the choice indices
        let mut pos = s;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One emitted probe result. `m` and `n` address the spectrum; the pattern
/// inside carries the system-side index `n - m`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub m: usize,
    pub n: usize,
    pub g: Rational,
    pub s: usize,
    pub rho: Rational,
    pub pattern: Pattern,
    pub alpha_lo: Rational,
    pub alpha_hi: Rational,
    pub beta: Rational,
}

/// Feasible anchor values tried from above when bracketing a pattern: the
/// known family boundaries for this corner of the parameter space plus the
/// universal floor.
fn alpha_anchors(m_sys: usize, n: usize, g: &Rational, rho: &Rational) -> Vec<Rational> {
    let mut anchors = BTreeSet::new();
    let floor = &Rational::from((n - m_sys) as i64) / &Rational::from(m_sys as i64);
    anchors.insert(floor);
    // regular systems: alpha = g^(m-1) (1 + ... + g^(n-m-1)) / (1 + ... + g^(m-1))
    let regular = &(&g.pow(m_sys as i32 - 1) * &geometric_sum(g, n - m_sys))
        / &geometric_sum(g, m_sys);
    anchors.insert(regular);
    if m_sys == 2 && n == 5 {
        let one = Rational::one();
        anchors.insert(&(&(g * g) + &one) - &(g / &(rho + &one)));
        let three_halves = Rational::new(3, 2).unwrap();
        anchors.insert(&(&(&three_halves * g) * g - g) + &one);
    }
    anchors.into_iter().collect()
}

/// Spectrum-side caps guaranteed by the classical inequalities; emitted rows
/// are checked against them.
fn theorem_cap(m_spec: usize, n: usize, g: &Rational) -> Option<Rational> {
    if m_spec == 1 {
        return Some(Rational::one());
    }
    if m_spec + 1 == n {
        return Some(geometric_sum(g, n - 1));
    }
    match (m_spec, n) {
        (2, 4) => Some(g.clone()),
        (3, 5) => Some(&(g * g) + &Rational::one()),
        _ => None,
    }
}

/// Best boundary estimate per `(g, s, rho)` cell for the spectrum `(m, n)`:
/// every pattern of each length is bracketed from the known anchors and
/// bisected, and the best certified `alpha_lo` in the cell is kept (ties go
/// to the lexicographically smallest pattern). Rows are sorted by `g`
/// ascending, then `alpha_lo` descending.
pub fn probe_boundary(
    m: usize,
    n: usize,
    g_grid: &[Rational],
    s_max: usize,
    rho_grid: Option<&[Rational]>,
    iters: u32,
) -> Result<Vec<ProbeRow>, SearchError> {
    if m < 1 || m >= n {
        return Err(SearchError::BadParameter(format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    if s_max < 1 {
        return Err(SearchError::BadParameter("s_max must be positive".into()));
    }
    for g in g_grid {
        if *g < Rational::one() {
            return Err(SearchError::BadParameter(format!("g must be at least 1, got {g}")));
        }
    }
    let m_sys = n - m;
    let mut rows: Vec<ProbeRow> = Vec::new();
    for g in g_grid {
        for s in 1..=s_max {
            let cap = g.pow(s as i32);
            let rhos: Vec<Rational> = match rho_grid {
                Some(list) => list
                    .iter()
                    .filter(|r| **r > Rational::one() && **r <= cap)
                    .cloned()
                    .collect(),
                None => {
                    let two = Rational::from(2);
                    (-2i32..=2)
                        .map(|j| &cap * &two.pow(j))
                        .filter(|r| *r > Rational::one() && *r <= cap)
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect()
                }
            };
            let patterns = enumerate_patterns(m_sys, n, s, true);
            for rho in &rhos {
                let anchors = alpha_anchors(m_sys, n, g, rho);
                let best = patterns
                    .par_iter()
                    .filter_map(|p| probe_pattern(p, rho, g, &anchors, iters))
                    .reduce_with(|a, b| {
                        // max alpha_lo; ties to the smaller pattern
                        match a.0.cmp(&b.0) {
                            std::cmp::Ordering::Less => b,
                            std::cmp::Ordering::Greater => a,
                            std::cmp::Ordering::Equal => {
                                if a.3.ranges <= b.3.ranges {
                                    a
                                } else {
                                    b
                                }
                            }
                        }
                    });
                if let Some((alpha_lo, alpha_hi, beta, pattern)) = best {
                    if let Some(cap) = theorem_cap(m, n, g) {
                        assert!(
                            alpha_lo <= cap,
                            "probe exceeded a proven cap: alpha_lo = {alpha_lo}, cap = {cap}"
                        );
                    }
                    rows.push(ProbeRow {
                        m,
                        n,
                        g: g.clone(),
                        s,
                        rho: rho.clone(),
                        pattern,
                        alpha_lo,
                        alpha_hi,
                        beta,
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        a.g.cmp(&b.g)
            .then(b.alpha_lo.cmp(&a.alpha_lo))
            .then(a.s.cmp(&b.s))
            .then(a.rho.cmp(&b.rho))
            .then(a.pattern.ranges.cmp(&b.pattern.ranges))
    });
    Ok(rows)
}

/// Bracket one pattern from the anchor list and bisect. `None` when no
/// anchor is feasible for it.
fn probe_pattern(
    pattern: &Pattern,
    rho: &Rational,
    g: &Rational,
    anchors: &[Rational],
    iters: u32,
) -> Option<(Rational, Rational, Rational, Pattern)> {
    let mut feasible_at: Option<Rational> = None;
    let mut infeasible_above: Option<Rational> = None;
    for a in anchors.iter().rev() {
        if feasibility_at(pattern, rho, g, a).is_feasible() {
            feasible_at = Some(a.clone());
            break;
        }
        infeasible_above = Some(a.clone());
    }
    let lo = feasible_at?;
    let hi = match infeasible_above {
        Some(h) => h,
        None => {
            // escalate geometrically; the staircase chain caps alpha long
            // before this runs out
            let mut h = &lo * &Rational::from(2);
            let mut found = None;
            for _ in 0..40 {
                if !feasibility_at(pattern, rho, g, &h).is_feasible() {
                    found = Some(h);
                    break;
                }
                h = &h * &Rational::from(2);
            }
            found.expect("no infeasible cap found above a feasible anchor")
        }
    };
    let result = max_alpha(pattern, rho, g, (lo, hi), iters).expect("bracket was pre-checked");
    let beta = match &result.point {
        Some(p) => p.as_rationals().1.clone(),
        None => g * &result.alpha_lo,
    };
    Some((result.alpha_lo, result.alpha_hi, beta, pattern.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsystem::rat;

    fn dim5_pattern() -> Pattern {
        Pattern::new(2, 5, vec![(1, 5), (2, 5), (2, 5)]).unwrap()
    }

    #[test]
    fn pattern_validation_and_display() {
        assert!(Pattern::new(2, 5, vec![(3, 5)]).is_err());
        assert!(Pattern::new(2, 5, vec![(1, 2)]).is_err());
        assert!(Pattern::new(0, 5, vec![(1, 2)]).is_err());
        assert!(Pattern::new(2, 5, vec![]).is_err());
        let p = dim5_pattern();
        assert_eq!(p.to_string(), "1:5-2:5-2:5");
        assert_eq!(Pattern::parse("1:5-2:5-2:5", 2, 5).unwrap(), p);
        assert!(Pattern::parse("1:5-2", 2, 5).is_err());
        assert!(Pattern::parse("3:5", 2, 5).is_err());
    }

    #[test]
    fn dim5_pattern_feasible_exactly_up_to_the_family_value() {
        // at rho = 8 the family value g^2 + 1 - g/(1+rho) = 43/9 is the cap
        let p = dim5_pattern();
        let rho = rat("8");
        let g = rat("2");
        let at = |alpha: &str| feasibility_at(&p, &rho, &g, &rat(alpha)).is_feasible();
        assert!(at("43/9"));
        assert!(!at("4301/900"));
        assert!(!at("5"));
        // an infeasible sibling: freezing coordinate one across every pair
        // contradicts the wrap scale
        let dead = Pattern::new(2, 5, vec![(2, 5), (2, 5), (2, 5)]).unwrap();
        assert!(!feasibility_at(&dead, &rho, &g, &rat("3/2")).is_feasible());
    }

    #[test]
    fn margin_rows_bite_through_the_wrap() {
        // coordinate one grows by rho - 1 = 1 per period, so margins above 1
        // are unsatisfiable while small ones are harmless
        let p = Pattern::new(2, 4, vec![(1, 4)]).unwrap();
        let inst = build_lp(&p, &rat("2"), &rat("2"), &rat("2"), &rat("1/4"));
        assert!(lp_feasible(&inst).is_feasible());
        let inst = build_lp(&p, &rat("2"), &rat("2"), &rat("2"), &rat("2"));
        assert!(!lp_feasible(&inst).is_feasible());
    }

    #[test]
    fn s24_bisection_converges_to_two() {
        let p = Pattern::new(2, 4, vec![(1, 4)]).unwrap();
        let out = max_alpha(&p, &rat("2"), &rat("2"), (rat("1"), rat("3")), 30).unwrap();
        assert_eq!(out.alpha_lo, rat("2"));
        assert!(&out.alpha_hi - &out.alpha_lo <= rat("1/268435456"));
        let point = out.point.expect("seed should be recoverable");
        let (a, b) = point.as_rationals();
        assert_eq!(*a, rat("2"));
        assert_eq!(*b, rat("4"));
        let seed = out.seed.unwrap();
        assert_eq!(seed.m(), 2);
        assert_eq!(*seed.rho(), rat("2"));
    }

    #[test]
    fn bad_brackets_are_reported() {
        let p = Pattern::new(2, 4, vec![(1, 4)]).unwrap();
        // both ends feasible
        let err = max_alpha(&p, &rat("2"), &rat("2"), (rat("1"), rat("3/2")), 5).unwrap_err();
        assert!(matches!(err, SearchError::BadBracket { hi_feasible: true, .. }));
        // both ends infeasible
        let err = max_alpha(&p, &rat("2"), &rat("2"), (rat("6"), rat("7")), 5).unwrap_err();
        assert!(matches!(err, SearchError::BadBracket { lo_feasible: false, .. }));
        // nonsense window
        assert!(max_alpha(&p, &rat("2"), &rat("2"), (rat("3"), rat("2")), 5).is_err());
    }

    #[test]
    fn bisection_is_monotone_on_the_flagship_patterns() {
        // spot re-solves below the certified boundary
        let p = dim5_pattern();
        let rho = rat("8");
        let g = rat("2");
        for alpha in ["43/9", "9/2", "4", "7/2", "3"] {
            assert!(
                feasibility_at(&p, &rho, &g, &rat(alpha)).is_feasible(),
                "expected feasibility at {alpha}"
            );
        }
        // the feasible alphas of a pattern form a ray *interval*, not a ray:
        // with rho = g^s the wrap forces u + v = alpha(1+x) - x >= 2x, which
        // fails below 21/8. Bisection never leaves its bracket, so this is
        // harmless, but freeze the fact.
        assert!(!feasibility_at(&p, &rho, &g, &rat("2")).is_feasible());
        let p24 = Pattern::new(2, 4, vec![(1, 4)]).unwrap();
        for alpha in ["2", "3/2", "5/4", "1"] {
            assert!(feasibility_at(&p24, &rat("2"), &rat("2"), &rat(alpha)).is_feasible());
        }
    }

    #[test]
    fn enumeration_counts_and_dedup() {
        assert_eq!(enumerate_patterns(2, 5, 1, false).len(), 6);
        assert_eq!(enumerate_patterns(2, 5, 1, true).len(), 6);
        assert_eq!(enumerate_patterns(2, 5, 2, false).len(), 36);
        assert_eq!(enumerate_patterns(2, 5, 2, true).len(), 21);
        assert_eq!(enumerate_patterns(2, 5, 3, false).len(), 216);
        // Burnside: (6^3 + 6 + 6) / 3
        assert_eq!(enumerate_patterns(2, 5, 3, true).len(), 76);
        assert_eq!(enumerate_patterns(1, 2, 2, true).len(), 1);
        // every canonical schedule is its own smallest rotation
        for p in enumerate_patterns(2, 4, 3, true) {
            assert_eq!(p.canonical_ranges(), p.ranges);
        }
    }

    #[test]
    fn simplex_and_elimination_agree_on_small_instances() {
        let mut checked = 0;
        for (m, n, s) in [(2, 4, 1), (1, 3, 2), (2, 5, 1), (1, 4, 3), (2, 4, 2)] {
            for pattern in enumerate_patterns(m, n, s, true) {
                for alpha in ["1", "3/2", "2", "3"] {
                    let rho = rat("2");
                    let inst = build_lp(&pattern, &rho, &rat(alpha), &rat("2"), &rat("0"));
                    let simplex_verdict = lp_feasible(&inst).is_feasible();
                    let fm_verdict = fm_feasible(&inst).expect("instances are small");
                    assert_eq!(simplex_verdict, fm_verdict, "{pattern} at alpha = {alpha}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn probe_finds_the_s24_corner() {
        let rows = probe_boundary(2, 4, &[rat("2")], 1, None, 20).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.alpha_lo, rat("2"));
        assert_eq!(row.beta, rat("4"));
        assert_eq!(row.pattern.to_string(), "1:4");
        assert_eq!(row.rho, rat("2"));
        assert_eq!((row.m, row.n, row.s), (2, 4, 1));
    }

    #[test]
    fn probe_rejects_bad_parameters() {
        assert!(probe_boundary(0, 4, &[rat("2")], 1, None, 5).is_err());
        assert!(probe_boundary(2, 4, &[rat("1/2")], 1, None, 5).is_err());
        assert!(probe_boundary(2, 4, &[rat("2")], 0, None, 5).is_err());
    }

    #[test]
    fn probe_with_degenerate_g_emits_nothing() {
        // g = 1 leaves no admissible rho, so the grid is empty
        let rows = probe_boundary(2, 4, &[rat("1")], 2, None, 5).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn dim5_bisection_pins_the_corner_from_a_dyadic_bracket() {
        // the corner 43/9 is not dyadic, so bisection closes in on it from
        // both sides without ever landing on it
        let p = dim5_pattern();
        let out = max_alpha(&p, &rat("8"), &rat("2"), (rat("4"), rat("5")), 30).unwrap();
        let corner = rat("43/9");
        assert!(out.alpha_lo < corner && corner < out.alpha_hi);
        assert!(&out.alpha_hi - &out.alpha_lo <= rat("1/1073741824"));
        // with rho = g^s the wrap chain forces every self ratio to alpha and
        // every cross ratio to g alpha, so the seed's pair is determined
        let point = out.point.expect("strict seed close to the corner");
        let (a, b) = point.as_rationals();
        assert_eq!(*a, out.alpha_lo);
        assert_eq!(*b, &rat("2") * a);
        assert_eq!(out.witness[0][0], rat("1"));
        let seed = out.seed.unwrap();
        assert_eq!(seed.s(), 3);
        assert_eq!(*seed.rho(), rat("8"));
    }

    #[test]
    fn frozen_coordinates_propagate_through_the_wrap() {
        // pattern (2,4) on a 2:4 window only: coordinate 1 must scale by rho
        // across the seam yet stay frozen, which pins it to zero and then
        // the ordering rows refuse
        let p = Pattern::new(2, 4, vec![(2, 4)]).unwrap();
        assert!(!feasibility_at(&p, &rat("2"), &rat("2"), &rat("1")).is_feasible());
    }

    #[test]
    fn rationals_survive_lp_round_trips() {
        // a window with awkward rationals everywhere; the verdict itself is
        // cross-checked by elimination, and any witness is re-substituted
        let p = Pattern::new(1, 3, vec![(1, 2), (1, 3)]).unwrap();
        let inst = build_lp(&p, &rat("7/3"), &rat("13/11"), &rat("9/5"), &rat("1/97"));
        let verdict = lp_feasible(&inst);
        assert_eq!(Some(verdict.is_feasible()), fm_feasible(&inst));
        if let Feasibility::Feasible(w) = verdict {
            assert_eq!(w.len(), 6);
            assert_eq!(w[0], rat("1"));
        }
    }
}
