//! Fourier-Motzkin elimination for tiny instances.
//!
//! Doubles as an independent feasibility oracle for the simplex: exponential
//! in the worst case, so callers gate it on the variable count. Equalities
//! go through a Gaussian pass first (solve and substitute); the remaining
//! inequalities `coeffs . x >= rhs` are eliminated pairwise. The domain rows
//! `x_j >= 0` are part of the system, which licenses dropping any row with
//! non-negative coefficients and non-positive rhs as redundant.

use std::collections::BTreeMap;

use crate::exactnum::Rational;

use super::simplex::GeRow;

const ROW_CAP: usize = 200_000;

/// Exact feasibility of `A x >= b, C x = d, x >= 0`.
pub fn feasible(ge: &[GeRow], eq: &[GeRow], nvars: usize) -> bool {
    let mut ineqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for r in ge {
        assert_eq!(r.coeffs.len(), nvars, "row width mismatch");
        ineqs.push((r.coeffs.clone(), r.rhs.clone()));
    }
    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for r in eq {
        assert_eq!(r.coeffs.len(), nvars, "row width mismatch");
        eqs.push((r.coeffs.clone(), r.rhs.clone()));
    }

    // Gaussian phase: each equality pins its highest-index variable and is
    // substituted out of every other row. The pinned variable's domain
    // bound `x_v >= 0` turns into an ordinary row on the others.
    let mut active: Vec<bool> = vec![true; nvars];
    while let Some((coeffs, rhs)) = eqs.pop() {
        let Some(v) = (0..nvars).rev().find(|&j| !coeffs[j].is_zero()) else {
            if rhs.is_zero() {
                continue;
            }
            return false; // 0 = rhs != 0
        };
        active[v] = false;
        let pivot = coeffs[v].clone();
        let substitute = |row: &mut (Vec<Rational>, Rational)| {
            if row.0[v].is_zero() {
                return;
            }
            let f = &row.0[v] / &pivot;
            for (rj, cj) in row.0.iter_mut().zip(&coeffs) {
                if !cj.is_zero() {
                    *rj = &*rj - &(&f * cj);
                }
            }
            row.1 = &row.1 - &(&f * &rhs);
        };
        let mut domain = vec![Rational::zero(); nvars];
        domain[v] = Rational::one();
        let mut domain = (domain, Rational::zero());
        substitute(&mut domain);
        ineqs.push(domain);
        for row in &mut ineqs {
            substitute(row);
        }
        for row in &mut eqs {
            substitute(row);
        }
    }

    // Inequality phase, deduplicated by normalized support with only the
    // strongest rhs kept.
    let mut work: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    let mut feasible_so_far = true;
    {
        let mut seed = |coeffs: Vec<Rational>, rhs: Rational| {
            if !insert(&mut work, coeffs, rhs) {
                feasible_so_far = false;
            }
        };
        for (coeffs, rhs) in ineqs {
            seed(coeffs, rhs);
        }
    }
    if !feasible_so_far {
        return false;
    }

    let mut remaining: Vec<usize> = (0..nvars).filter(|&v| active[v]).collect();
    while !remaining.is_empty() {
        // cheapest variable first: fewest positive * negative combinations
        let var = *remaining
            .iter()
            .min_by_key(|&&v| {
                let pos = work.keys().filter(|c| c[v].is_positive()).count();
                let neg = work.keys().filter(|c| c[v].is_negative()).count();
                pos * neg
            })
            .unwrap();
        remaining.retain(|&v| v != var);

        let mut pos: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut neg: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut rest: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for (coeffs, rhs) in std::mem::take(&mut work) {
            if coeffs[var].is_positive() {
                pos.push((coeffs, rhs));
            } else if coeffs[var].is_negative() {
                neg.push((coeffs, rhs));
            } else {
                rest.insert(coeffs, rhs);
            }
        }
        work = rest;
        // Positive-only rows are satisfiable by pushing the variable up and
        // drop out. Negative rows pair with every positive row and with the
        // implicit domain bound `x_var >= 0` (their own row, variable
        // zeroed); pairs combine with positive multipliers.
        for (nc, nr) in &neg {
            let mut coeffs = nc.clone();
            coeffs[var] = Rational::zero();
            if !insert(&mut work, coeffs, nr.clone()) {
                return false;
            }
            for (pc, pr) in &pos {
                let a = -&nc[var];
                let b = pc[var].clone();
                let mut coeffs = Vec::with_capacity(pc.len());
                for j in 0..pc.len() {
                    coeffs.push(&(&a * &pc[j]) + &(&b * &nc[j]));
                }
                debug_assert!(coeffs[var].is_zero());
                let rhs = &(&a * pr) + &(&b * nr);
                if !insert(&mut work, coeffs, rhs) {
                    return false;
                }
                assert!(work.len() <= ROW_CAP, "elimination blow-up");
            }
        }
    }

    // anything left reduced to `0 >= rhs` and was checked on insertion
    true
}

/// Returns false when the row is a plainly violated constant; drops rows
/// implied by the domain and keeps only the strongest rhs per support.
fn insert(
    map: &mut BTreeMap<Vec<Rational>, Rational>,
    coeffs: Vec<Rational>,
    rhs: Rational,
) -> bool {
    let (coeffs, rhs) = normalize(coeffs, rhs);
    if coeffs.iter().all(|c| c.is_zero()) {
        return !rhs.is_positive(); // 0 >= rhs
    }
    if !coeffs.iter().any(|c| c.is_negative()) && !rhs.is_positive() {
        return true; // implied by x >= 0
    }
    match map.entry(coeffs) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(rhs);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            if rhs > *e.get() {
                e.insert(rhs);
            }
        }
    }
    true
}

/// Scale so the first non-zero coefficient is +1 or -1; collapses the
/// duplicates that elimination mass-produces.
fn normalize(mut coeffs: Vec<Rational>, mut rhs: Rational) -> (Vec<Rational>, Rational) {
    if let Some(lead) = coeffs.iter().find(|c| !c.is_zero()).cloned() {
        let scale = if lead.is_negative() { -lead } else { lead };
        for c in &mut coeffs {
            if !c.is_zero() {
                *c = &*c / &scale;
            }
        }
        rhs = &rhs / &scale;
    }
    (coeffs, rhs)
}
