//! Executable certificates: each check replays a proved inequality on a
//! concrete system and reports the exact slack. A violation is never user
//! error — it means a theorem failed on a verified object, i.e. a library
//! bug — so checks collect records instead of returning early.
//!
//! Stable rule identifiers, as they appear in serialized reports:
//!
//! * `type_kl` — changed windows are consecutive, straddle m, and satisfy
//!   the staircase inequalities for every pair of division numbers;
//! * `chi_extrema_max` / `chi_extrema_min` — the closed forms for the chi
//!   extrema on a simple interval agree with brute force over breakpoints;
//! * `mm_lemma_eq2` — the greedy interval selection satisfies the summed
//!   staircase estimate behind the transference bounds for m = 1;
//! * `dirichlet_floor`, `mm_floor`, `mm_cap`, `mm_dual_floor`,
//!   `mm_dual_cap`, `ri_floor`, `ri_square`, `dim5_floor`, `dim5_cap`,
//!   `arc_gate` — the theorem-level bounds on chi pairs, per index m;
//! * `s35_bloc_lemma1` ... `s35_bloc_lemma5` — the five bloc estimates for
//!   five-component systems at m = 2, checked against the finite-horizon
//!   trace extrema (which make the ratio gates hold non-strictly at every
//!   anchor, the honest finite analogue of "for q large enough").

pub mod random;

use crate::builder::SelfSimilarSeed;
use crate::exactnum::{geometric_sum, Rational};
use crate::invariants::{chi_pair_at, chi_trace_finite};
use crate::nsystem::NSystem;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Violation,
    NotApplicable,
}

/// One replayed inequality. `slack` is exact and non-negative on every pass;
/// checks that do not reduce to a single number (hypothesis unmet, structural
/// mismatch) carry a note instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub rule: String,
    pub location: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<CheckRecord>,
}

impl AuditReport {
    pub fn push(&mut self, record: CheckRecord) {
        if record.status == CheckStatus::Pass {
            debug_assert!(
                record.slack.as_ref().is_some_and(|s| !s.is_negative()),
                "passing check {} carries negative slack",
                record.rule
            );
        }
        self.checks.push(record);
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.checks.extend(other.checks);
    }

    pub fn violations(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Violation).collect()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Violation)
    }

    pub fn by_rule(&self, rule: &str) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.rule == rule).collect()
    }
}

/// An inequality record: passes exactly when the slack is non-negative.
fn ge_record(rule: &str, location: String, slack: Rational, note: Option<String>) -> CheckRecord {
    let status = if slack.is_negative() { CheckStatus::Violation } else { CheckStatus::Pass };
    CheckRecord { rule: rule.into(), location, status, slack: Some(slack), note }
}

/// An exact-equality record; a mismatch reports the signed difference.
fn eq_record(
    rule: &str,
    location: String,
    expected: &Rational,
    got: &Rational,
    note: Option<String>,
) -> CheckRecord {
    if expected == got {
        return CheckRecord {
            rule: rule.into(),
            location,
            status: CheckStatus::Pass,
            slack: Some(Rational::zero()),
            note,
        };
    }
    let why = format!("closed form {expected}, brute force {got}");
    CheckRecord {
        rule: rule.into(),
        location,
        status: CheckStatus::Violation,
        slack: Some(expected - got),
        note: Some(note.map_or(why.clone(), |n| format!("{why}; {n}"))),
    }
}

fn na_record(rule: &str, location: String, note: String) -> CheckRecord {
    CheckRecord {
        rule: rule.into(),
        location,
        status: CheckStatus::NotApplicable,
        slack: None,
        note: Some(note),
    }
}

/// For every pair a < b of m-division numbers: the changed components form a
/// consecutive window straddling m and obey the staircase inequalities
/// `P_j(a) <= P_{j-1}(b)`. One record per pair, carrying the minimal slack.
pub fn check_type_staircase(sys: &NSystem, m: usize) -> AuditReport {
    let mut report = AuditReport::default();
    let data = match sys.division_numbers(m) {
        Ok(d) => d,
        Err(e) => {
            report.push(na_record("type_kl", format!("m = {m}"), e.to_string()));
            return report;
        }
    };
    let n = sys.n();
    let pts = &data.points;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (pa, pb) = (&pts[i], &pts[j]);
            let location = format!("m = {m}, [{}, {}]", pa.q, pb.q);
            let mut changed = Vec::new();
            let mut broken = None;
            for c in 0..n {
                if pa.values[c] > pb.values[c] {
                    broken = Some(format!("P_{} decreases", c + 1));
                    break;
                }
                if pa.values[c] < pb.values[c] {
                    changed.push(c + 1);
                }
            }
            if broken.is_none() {
                broken = match (changed.first(), changed.last()) {
                    (None, _) => Some("no component changes".into()),
                    (Some(&k), Some(&l)) if changed.len() != l - k + 1 => {
                        Some(format!("changed set {changed:?} is not consecutive"))
                    }
                    (Some(&k), Some(&l)) if !(k <= m && m < l) => {
                        Some(format!("changed window [{k}, {l}] does not straddle m = {m}"))
                    }
                    _ => None,
                };
            }
            if let Some(why) = broken {
                report.push(CheckRecord {
                    rule: "type_kl".into(),
                    location,
                    status: CheckStatus::Violation,
                    slack: None,
                    note: Some(why),
                });
                continue;
            }
            let (k, l) = (changed[0], *changed.last().unwrap());
            let slack = (k + 1..=l)
                .map(|c| &pb.values[c - 2] - &pa.values[c - 1])
                .reduce(Rational::min)
                .expect("a straddling window spans at least two components");
            report.push(ge_record("type_kl", location, slack, None));
        }
    }
    report
}

/// Per simple interval, brute-force extrema of `chi_m` over the breakpoints
/// inside it must equal the closed forms: max `A_{i+1}^+ / A_i^-` (attained
/// at the pivot) and min of the two endpoint self ratios.
pub fn check_chi_extrema(sys: &NSystem, m: usize) -> AuditReport {
    let mut report = AuditReport::default();
    let data = match sys.division_numbers(m) {
        Ok(d) => d,
        Err(e) => {
            report.push(na_record("chi_extrema_max", format!("m = {m}"), e.to_string()));
            return report;
        }
    };
    let simple = match sys.simple_intervals_of(&data) {
        Ok(s) => s,
        Err(e) => {
            report.push(na_record("chi_extrema_max", format!("m = {m}"), e.to_string()));
            return report;
        }
    };
    if simple.is_empty() {
        report.push(na_record(
            "chi_extrema_max",
            format!("m = {m}"),
            "fewer than two division numbers".into(),
        ));
        return report;
    }
    for si in &simple {
        let location = format!("m = {m}, [{}, {}]", si.a, si.b);
        let (da, db) = (&data.points[si.index], &data.points[si.index + 1]);
        if !da.lower_sum.is_positive() {
            report.push(na_record("chi_extrema_max", location, format!("S_m^- = 0 at {}", da.q)));
            continue;
        }
        let closed_max = &db.upper_sum / &da.lower_sum;
        let self_a = &da.upper_sum / &da.lower_sum;
        let self_b = &db.upper_sum / &db.lower_sum;
        let closed_min = self_a.min(self_b);

        let mut brute_max: Option<(Rational, Rational)> = None;
        let mut brute_min: Option<Rational> = None;
        for idx in 0..sys.breakpoint_count() {
            let q = sys.breakpoint(idx);
            if q < &si.a || q > &si.b {
                continue;
            }
            let vals = sys.values_at_breakpoint(idx);
            let lower: Rational = vals[..m].iter().sum();
            let upper: Rational = vals[m..].iter().sum();
            let chi = upper / lower;
            brute_min = Some(brute_min.map_or(chi.clone(), |b| b.min(chi.clone())));
            brute_max = match brute_max {
                Some((best, at)) if best >= chi => Some((best, at)),
                _ => Some((chi, q.clone())),
            };
        }
        let (bmax, at) = brute_max.expect("the interval contains its endpoints");
        let bmin = brute_min.unwrap();
        report.push(eq_record(
            "chi_extrema_max",
            location.clone(),
            &closed_max,
            &bmax,
            Some(format!("attained at q = {at}")),
        ));
        report.push(eq_record("chi_extrema_min", location, &closed_min, &bmin, None));
    }
    report
}

/// The selection estimate behind the m = 1 transference bound: pick n - 2
/// simple 1-division intervals greedily (the j-th needing a window reaching
/// at least component n - j + 1) and verify
///
/// ```text
/// sum_j (A_j^+ - A_j^-)  <=  B_1^+ + ... + B_{n-3}^+ + B_{n-2}^-
/// ```
///
/// with `A`/`B` the sums at the left/right endpoints of the chosen
/// intervals. Applicable once the system has at least n - 2 full-window
/// intervals; otherwise the report says how many were found.
pub fn check_mm_lemma(sys: &NSystem) -> AuditReport {
    let rule = "mm_lemma_eq2";
    let mut report = AuditReport::default();
    let n = sys.n();
    if n < 3 {
        report.push(na_record(rule, format!("n = {n}"), "the selection needs n >= 3".into()));
        return report;
    }
    let data = match sys.division_numbers(1) {
        Ok(d) => d,
        Err(e) => {
            report.push(na_record(rule, "m = 1".into(), e.to_string()));
            return report;
        }
    };
    let pts = &data.points;
    if pts.len() < 2 {
        report.push(na_record(rule, "m = 1".into(), "fewer than two 1-division numbers".into()));
        return report;
    }
    let mut tops = Vec::with_capacity(pts.len() - 1);
    for w in 0..pts.len() - 1 {
        match sys.interval_type(1, &pts[w].q, &pts[w + 1].q) {
            Ok(t) => tops.push(t.l),
            Err(e) => {
                report.push(CheckRecord {
                    rule: rule.into(),
                    location: format!("[{}, {}]", pts[w].q, pts[w + 1].q),
                    status: CheckStatus::Violation,
                    slack: None,
                    note: Some(e.to_string()),
                });
                return report;
            }
        }
    }
    let full = tops.iter().filter(|&&l| l == n).count();
    if full < n - 2 {
        report.push(na_record(
            rule,
            format!("{} simple intervals", tops.len()),
            format!("found {full} full-window intervals, need {}", n - 2),
        ));
        return report;
    }
    // greedy: the j-th chosen interval is the first one past its predecessor
    // whose window reaches component n - j + 1
    let mut chosen: Vec<usize> = Vec::with_capacity(n - 2);
    for j in 1..=n - 2 {
        let start = chosen.last().map_or(0, |&p| p + 1);
        let Some(found) = (start..tops.len()).find(|&w| tops[w] > n - j) else {
            report.push(na_record(
                rule,
                format!("{} simple intervals", tops.len()),
                format!("greedy selection has no interval for step {j}"),
            ));
            return report;
        };
        chosen.push(found);
    }
    let lhs: Rational =
        chosen.iter().map(|&w| &pts[w].upper_sum - &pts[w].lower_sum).sum();
    let rhs = chosen[..n - 3].iter().map(|&w| pts[w + 1].upper_sum.clone()).sum::<Rational>()
        + &pts[chosen[n - 3] + 1].lower_sum;
    let anchors: Vec<String> = chosen.iter().map(|&w| pts[w].q.to_string()).collect();
    report.push(ge_record(rule, format!("a = [{}]", anchors.join(", ")), rhs - lhs, None));
    report
}

/// Theorem-level bounds on the chi pair of a seed, at every index m it
/// defines one: the generic Dirichlet floor, the transference floor and cap
/// at m = 1 (and their duals at m = n - 1), the square bound for four
/// components, and the five-component cap with its exact arc gate
/// (`alpha > 2` and `3 (alpha - 2)^2 >= 4` standing in for the irrational
/// threshold `2 (1 + 1/sqrt 3)`).
pub fn check_global_bounds(seed: &SelfSimilarSeed) -> AuditReport {
    let mut report = AuditReport::default();
    let n = seed.n();
    let one = Rational::one();
    for m in 1..n {
        let location = format!("m = {m}");
        let pair = match chi_pair_at(seed, m) {
            Ok(p) => p,
            Err(e) => {
                report.push(na_record("dirichlet_floor", location, e.to_string()));
                continue;
            }
        };
        let (alpha, beta) = pair.as_rationals();
        let g = beta / alpha;
        let floor = Rational::new((n - m) as i64, m as i64).unwrap();
        report.push(ge_record("dirichlet_floor", location.clone(), alpha - &floor, None));
        if n >= 3 && m == 1 {
            let lift = alpha - Rational::from_int(n as i64 - 1);
            report.push(ge_record("mm_floor", location.clone(), lift, None));
            let cap = geometric_sum(&g, n - 1);
            report.push(ge_record("mm_cap", location.clone(), &cap - alpha, None));
        }
        if n >= 3 && m == n - 1 {
            let lift = alpha - Rational::new(1, (n - 1) as i64).unwrap();
            report.push(ge_record("mm_dual_floor", location.clone(), lift, None));
            let cap = geometric_sum(&(alpha / beta), n - 1).recip();
            report.push(ge_record("mm_dual_cap", location.clone(), &cap - alpha, None));
        }
        if n == 4 && m == 2 {
            report.push(ge_record("ri_floor", location.clone(), alpha - &one, None));
            report.push(ge_record("ri_square", location.clone(), beta - alpha * alpha, None));
        }
        if n == 5 && m == 2 {
            let three_half = Rational::new(3, 2).unwrap();
            report.push(ge_record("dim5_floor", location.clone(), alpha - &three_half, None));
            let cap = &(&g * &g) + &one;
            report.push(ge_record("dim5_cap", location.clone(), &cap - alpha, None));
            let two = Rational::from_int(2);
            let shifted = alpha - &two;
            let gated = alpha > &two
                && Rational::from_int(3) * &shifted * &shifted >= Rational::from_int(4);
            if gated {
                let bound = &(&three_half * &g * &g) - &g + &one;
                report.push(ge_record("arc_gate", location.clone(), &bound - alpha, None));
            } else {
                report.push(na_record(
                    "arc_gate",
                    location.clone(),
                    "alpha below 2 (1 + 1/sqrt 3)".into(),
                ));
            }
        }
    }
    report
}

/// The five bloc estimates for a five-component system at m = 2. A bloc is a
/// pair of simple intervals `[a_1, b_1]`, `[a_2, b_2]` whose windows cover
/// `{2, ..., 5}`, with `P_5` frozen on `[b_1, a_2]`; the lemmas bound
/// alpha by expressions in g = beta/alpha under extra window and constancy
/// hypotheses. Here (alpha, beta) are the exact finite-horizon trace
/// extrema, which makes every asymptotic ratio gate hold non-strictly at
/// every anchor; each record notes this.
pub fn audit_s35_blocs(sys: &NSystem) -> AuditReport {
    const RULES: [&str; 5] = [
        "s35_bloc_lemma1",
        "s35_bloc_lemma2",
        "s35_bloc_lemma3",
        "s35_bloc_lemma4",
        "s35_bloc_lemma5",
    ];
    let mut report = AuditReport::default();
    if sys.n() != 5 {
        report.push(na_record("s35_blocs", format!("n = {}", sys.n()), "needs n = 5".into()));
        return report;
    }
    let trace = match chi_trace_finite(sys, 2) {
        Ok(t) => t,
        Err(e) => {
            report.push(na_record("s35_blocs", "m = 2".into(), e.to_string()));
            return report;
        }
    };
    let alpha = trace.alpha_hat();
    let beta = trace.beta_hat();
    let g = &beta / &alpha;
    let horizon = format!(
        "finite horizon: alpha = {alpha} and beta = {beta} are the exact trace extrema, \
         so the ratio gates hold non-strictly at every anchor"
    );
    let data = sys.division_numbers(2).expect("the trace certified the division data");
    let simple = match sys.simple_intervals_of(&data) {
        Ok(s) => s,
        Err(e) => {
            report.push(na_record("s35_blocs", "m = 2".into(), e.to_string()));
            return report;
        }
    };
    let pts = &data.points;
    let covers25: Vec<bool> = simple.iter().map(|si| si.kind.covers(2, 5)).collect();
    let full15: Vec<bool> = simple.iter().map(|si| si.kind.k == 1 && si.kind.l == 5).collect();
    let p1 = |i: usize| &pts[i].values[0];
    let p5 = |i: usize| &pts[i].values[4];
    // interval j starts where the anchors say; bloc (i, j) pairs interval i
    // with a later interval j, P_5 frozen across the gap (monotone, so the
    // endpoint test is exact)
    let is_bloc = |i: usize, j: usize| covers25[i] && covers25[j] && p5(i + 1) == p5(j);
    let moved = |u: usize, v: usize| -> Vec<usize> {
        (0..5).filter(|&c| pts[u].values[c] < pts[v].values[c]).map(|c| c + 1).collect()
    };
    let span2 = |i: usize, j: usize| {
        format!(
            "a1 = {}, b1 = {}, a2 = {}, b2 = {}",
            pts[i].q,
            pts[i + 1].q,
            pts[j].q,
            pts[j + 1].q
        )
    };
    let span3 = |i: usize, j: usize, k: usize| {
        format!("{}, a3 = {}, b3 = {}", span2(i, j), pts[k].q, pts[k + 1].q)
    };

    let one = Rational::one();
    let bound1 = &g * &(&(&g * &g) + &g + &one) / &(&g + &one); // (g^2+g+1) / (1+1/g)
    let bound2 = Rational::from_int(2) * &g;
    let bound3 = &(&g * &g) / &Rational::from_int(2) + &g; // g (g/2 + 1)
    let bound45 = &(Rational::new(3, 2).unwrap() * &g * &g) - &g + &one;

    let mut hits: [Vec<CheckRecord>; 5] = Default::default();
    let count = simple.len();
    for i in 0..count {
        for j in i + 1..count {
            if !is_bloc(i, j) {
                continue;
            }
            if moved(i + 1, j) == [1, 2, 3, 4] {
                hits[1].push(ge_record(
                    RULES[1],
                    span2(i, j),
                    &bound2 - &alpha,
                    Some(horizon.clone()),
                ));
            }
            if p1(i) == p1(j) && full15[j] {
                hits[3].push(ge_record(
                    RULES[3],
                    span2(i, j),
                    &bound45 - &alpha,
                    Some(horizon.clone()),
                ));
            }
            for k in j + 1..count {
                if !is_bloc(j, k) {
                    continue;
                }
                if full15[i] && full15[j] && full15[k] {
                    hits[0].push(ge_record(
                        RULES[0],
                        span3(i, j, k),
                        &bound1 - &alpha,
                        Some(horizon.clone()),
                    ));
                }
                if p1(i) < p1(j) && moved(j + 1, k) == [1, 2, 3] {
                    hits[2].push(ge_record(
                        RULES[2],
                        span3(i, j, k),
                        &bound3 - &alpha,
                        Some(horizon.clone()),
                    ));
                }
                if p1(i) == p1(j + 1) && moved(j + 1, k) == [1, 2, 3] {
                    hits[4].push(ge_record(
                        RULES[4],
                        span3(i, j, k),
                        &bound45 - &alpha,
                        Some(horizon.clone()),
                    ));
                }
            }
        }
    }
    for (w, found) in hits.into_iter().enumerate() {
        if found.is_empty() {
            report.push(na_record(
                RULES[w],
                "no configuration".into(),
                "no matching bloc configuration within the horizon".into(),
            ));
        } else {
            for rec in found {
                report.push(rec);
            }
        }
    }
    report
}

/// Every check that runs on a bare finite system: staircase and chi extrema
/// at each index, the selection estimate, and the bloc audit when n = 5.
pub fn audit_system(sys: &NSystem) -> AuditReport {
    let mut report = AuditReport::default();
    for m in 1..sys.n() {
        report.merge(check_type_staircase(sys, m));
        report.merge(check_chi_extrema(sys, m));
    }
    report.merge(check_mm_lemma(sys));
    if sys.n() == 5 {
        report.merge(audit_s35_blocs(sys));
    }
    report
}

/// The full battery for a periodic seed: theorem bounds on its chi pairs
/// plus the system-level checks on a two-period unfolding.
pub fn audit_seed(seed: &SelfSimilarSeed) -> AuditReport {
    let mut report = check_global_bounds(seed);
    match seed.unfold(2) {
        Ok(sys) => report.merge(audit_system(&sys)),
        Err(e) => report.push(na_record("unfold", "periods = 2".into(), e.to_string())),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{bridge, chain, validate_division_seq};
    use crate::nsystem::{rat, rats};
    use crate::spectra::{regular_family_seed, s35_arc2_seed};

    fn dim5_seed() -> SelfSimilarSeed {
        SelfSimilarSeed::new(
            2,
            rat("8"),
            vec![
                rats(&["1", "8", "8", "10", "25"]),
                rats(&["8", "10", "10", "25", "51"]),
                rats(&["8", "28", "28", "64", "80"]),
            ],
        )
        .unwrap()
    }

    fn statuses(report: &AuditReport, rule: &str) -> Vec<CheckStatus> {
        report.by_rule(rule).iter().map(|c| c.status).collect()
    }

    #[test]
    fn staircase_passes_on_the_dim5_unfolding() {
        let sys = dim5_seed().unfold(2).unwrap();
        for m in 1..5 {
            let report = check_type_staircase(&sys, m);
            assert!(report.passed(), "m = {m}: {:?}", report.violations());
            assert!(report.checks.iter().all(|c| c.status == CheckStatus::Pass));
        }
        // 7 anchors at m = 2: one record per unordered pair
        assert_eq!(check_type_staircase(&sys, 2).checks.len(), 21);
    }

    #[test]
    fn staircase_reports_the_bridge_pair_slack() {
        let sys = bridge(&rats(&["1", "1", "2"]), &rats(&["2", "2", "3"]), 1).unwrap();
        let report = check_type_staircase(&sys, 1);
        assert_eq!(report.checks.len(), 1);
        let rec = &report.checks[0];
        assert_eq!(rec.rule, "type_kl");
        assert_eq!(rec.location, "m = 1, [4, 7]");
        assert_eq!(rec.status, CheckStatus::Pass);
        // P_2(4) = 1 <= P_1(7) = 2 has slack 1; P_3(4) = 2 <= P_2(7) = 2 binds
        assert_eq!(rec.slack, Some(rat("0")));
    }

    #[test]
    fn chi_extrema_match_closed_forms() {
        let sys = dim5_seed().unfold(1).unwrap();
        let report = check_chi_extrema(&sys, 2);
        assert!(report.passed());
        let first_max = &report.by_rule("chi_extrema_max")[0];
        assert_eq!(first_max.location, "m = 2, [52, 104]");
        assert_eq!(first_max.note.as_deref(), Some("attained at q = 95"));
        assert_eq!(first_max.slack, Some(rat("0")));

        // the square-corner seed: max 4, min 2 on every interval
        let seed = SelfSimilarSeed::new(2, rat("2"), vec![rats(&["1", "2", "2", "4"])]).unwrap();
        let sys = seed.unfold(2).unwrap();
        let report = check_chi_extrema(&sys, 2);
        assert!(report.passed());
        assert_eq!(report.by_rule("chi_extrema_max").len(), 2);
        assert_eq!(report.by_rule("chi_extrema_min").len(), 2);
    }

    #[test]
    fn chi_extrema_degenerate_on_the_constant_ratio_family() {
        // every self ratio equals alpha, so both closed forms agree with the
        // brute force on every interval with slack 0
        let (seed, _) = regular_family_seed(4, 2, rat("2"), rat("2")).unwrap();
        let sys = seed.unwrap().unfold(2).unwrap();
        let report = check_chi_extrema(&sys, 2);
        assert!(report.passed());
        for rec in &report.checks {
            assert_eq!(rec.slack, Some(rat("0")), "{}", rec.location);
        }
    }

    #[test]
    fn mm_lemma_holds_with_zero_slack_on_the_regular_boundary() {
        // rho = g puts the m = 1 regular family on the transference cap, and
        // the selection estimate is tight there in every period
        let (seed, _) = regular_family_seed(3, 1, rat("2"), rat("2")).unwrap();
        let sys = seed.unwrap().unfold(3).unwrap();
        let report = check_mm_lemma(&sys);
        assert_eq!(report.checks.len(), 1);
        let rec = &report.checks[0];
        assert_eq!(rec.status, CheckStatus::Pass);
        assert_eq!(rec.slack, Some(rat("0")));
    }

    #[test]
    fn mm_lemma_rejects_two_components_and_thin_windows() {
        let seed = SelfSimilarSeed::new(1, rat("2"), vec![rats(&["1", "1"])]).unwrap();
        let report = check_mm_lemma(&seed.unfold(2).unwrap());
        assert_eq!(statuses(&report, "mm_lemma_eq2"), vec![CheckStatus::NotApplicable]);

        // a chained 4-system whose 1-division windows never reach P_4
        let points = vec![
            rats(&["1", "1", "2", "6"]),
            rats(&["2", "2", "3", "6"]),
            rats(&["3", "3", "4", "6"]),
        ];
        let sys = chain(&validate_division_seq(&points, 1).unwrap()).unwrap();
        let report = check_mm_lemma(&sys);
        let rec = &report.checks[0];
        assert_eq!(rec.status, CheckStatus::NotApplicable);
        assert_eq!(rec.note.as_deref(), Some("found 0 full-window intervals, need 2"));
    }

    #[test]
    fn global_bounds_on_the_flagship_seeds() {
        let report = check_global_bounds(&dim5_seed());
        assert!(report.passed(), "{:?}", report.violations());
        let cap = &report.by_rule("dim5_cap")[0];
        assert_eq!(cap.slack, Some(rat("2/9"))); // 5 - 43/9
        let gate = &report.by_rule("arc_gate")[0];
        assert_eq!(gate.status, CheckStatus::Pass);
        assert_eq!(gate.slack, Some(rat("2/9"))); // the arcs meet at g = 2
        assert_eq!(report.by_rule("mm_floor").len(), 1);
        assert_eq!(report.by_rule("mm_dual_cap").len(), 1);

        // the square corner sits exactly on the four-component parabola
        let (seed, _) = regular_family_seed(4, 2, rat("2"), rat("2")).unwrap();
        let report = check_global_bounds(&seed.unwrap());
        assert!(report.passed());
        assert_eq!(report.by_rule("ri_square")[0].slack, Some(rat("0")));

        // m = 1 regular seeds sit on the transference cap...
        let (seed, _) = regular_family_seed(3, 1, rat("2"), rat("2")).unwrap();
        let report = check_global_bounds(&seed.unwrap());
        assert!(report.passed());
        assert_eq!(report.by_rule("mm_cap")[0].slack, Some(rat("0")));
        assert_eq!(report.by_rule("mm_floor")[0].slack, Some(rat("1"))); // alpha = 3

        // ...and m = n - 1 regular seeds on the dual cap
        let (seed, _) = regular_family_seed(3, 2, rat("2"), rat("2")).unwrap();
        let report = check_global_bounds(&seed.unwrap());
        assert!(report.passed());
        assert_eq!(report.by_rule("mm_dual_cap")[0].slack, Some(rat("0")));
    }

    #[test]
    fn bloc_audit_flags_the_dim5_seam() {
        let sys = dim5_seed().unfold(2).unwrap();
        let report = audit_s35_blocs(&sys);
        assert!(report.passed(), "{:?}", report.violations());
        // the only configuration is lemma 4's, at the period seam: P_1 is
        // frozen across [208, 416] and the next interval has a full window
        let hits = report.by_rule("s35_bloc_lemma4");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].status, CheckStatus::Pass);
        assert_eq!(hits[0].location, "a1 = 208, b1 = 416, a2 = 416, b2 = 832");
        assert_eq!(hits[0].slack, Some(rat("2/9"))); // bound 5 at g = 2
        for rule in ["s35_bloc_lemma1", "s35_bloc_lemma2", "s35_bloc_lemma3", "s35_bloc_lemma5"] {
            assert_eq!(statuses(&report, rule), vec![CheckStatus::NotApplicable], "{rule}");
        }
    }

    #[test]
    fn bloc_audit_on_the_second_arc() {
        // the arc construction exists exactly to realize lemma 4's bound:
        // its slack vanishes with the perturbation
        let tight = s35_arc2_seed(rat("9/5"), rat("1/100")).unwrap();
        let report = audit_s35_blocs(&tight.seed.unfold(2).unwrap());
        assert!(report.passed(), "{:?}", report.violations());
        let hits = report.by_rule("s35_bloc_lemma4");
        assert!(!hits.is_empty());
        let slack_tight = hits[0].slack.clone().unwrap();
        assert!(slack_tight.is_positive());

        let loose = s35_arc2_seed(rat("9/5"), rat("1/10")).unwrap();
        let report = audit_s35_blocs(&loose.seed.unfold(2).unwrap());
        let slack_loose = report.by_rule("s35_bloc_lemma4")[0].slack.clone().unwrap();
        assert!(slack_tight < slack_loose, "{slack_tight} !< {slack_loose}");
        assert!(slack_tight < rat("1/10"));
    }

    #[test]
    fn bloc_audit_is_vacuous_without_wide_windows() {
        // windows stop at P_4, so no interval covers {2, ..., 5}
        let points = vec![
            rats(&["1", "2", "2", "3", "9"]),
            rats(&["2", "3", "3", "4", "9"]),
            rats(&["3", "4", "4", "5", "9"]),
        ];
        let sys = chain(&validate_division_seq(&points, 2).unwrap()).unwrap();
        let report = audit_s35_blocs(&sys);
        assert!(report.passed());
        assert!(report.checks.iter().all(|c| c.status == CheckStatus::NotApplicable));

        let not5 = bridge(&rats(&["1", "1", "2"]), &rats(&["2", "2", "3"]), 1).unwrap();
        let report = audit_s35_blocs(&not5);
        assert_eq!(statuses(&report, "s35_blocs"), vec![CheckStatus::NotApplicable]);
    }

    #[test]
    fn reports_serialize_with_stable_rule_ids() {
        let report = audit_seed(&dim5_seed());
        assert!(report.passed(), "{:?}", report.violations());
        let json = serde_json::to_string(&report).unwrap();
        for rule in ["type_kl", "mm_lemma_eq2", "s35_bloc_lemma4", "dim5_cap", "arc_gate"] {
            assert!(json.contains(rule), "{rule} missing from {json}");
        }
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn tight_staircases_and_single_anchors() {
        // a_2 = b_1 = 3 makes the staircase bind exactly
        let sys = bridge(&rats(&["1", "3", "3"]), &rats(&["3", "4", "4"]), 2).unwrap();
        let report = check_type_staircase(&sys, 2);
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].slack, Some(rat("0")));
        // at m = 1 the bridge interior holds the only P_1 = P_2 tie, so
        // there is no pair to check and the report is empty
        assert!(check_type_staircase(&sys, 1).checks.is_empty());
    }

    #[test]
    fn negative_slack_marks_a_violation() {
        let mut report = AuditReport::default();
        report.push(ge_record("type_kl", "synthetic".into(), rat("-1"), None));
        assert!(!report.passed());
        assert_eq!(report.violations().len(), 1);
        assert_eq!(report.violations()[0].status, CheckStatus::Violation);
    }
}
