//! Exact phase-one simplex over non-negative variables.
//!
//! Feasibility of `A x >= b, x >= 0` is decided by minimizing the sum of
//! artificial variables with Bland's anti-cycling rule. Every entry is a
//! `Rational`, so verdicts are exact and witnesses can be re-substituted
//! verbatim. Only feasibility is exposed; phase two never runs.

use crate::exactnum::Rational;

/// One inequality `coeffs . x >= rhs` over `x >= 0`.
#[derive(Clone, Debug)]
pub struct GeRow {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// Exact feasibility; a witness vector on success.
pub fn feasible(rows: &[GeRow], nvars: usize) -> Option<Vec<Rational>> {
    let m = rows.len();
    if m == 0 {
        return Some(vec![Rational::zero(); nvars]);
    }
    let art_count = rows.iter().filter(|r| r.rhs.is_positive()).count();
    let cols = nvars + m + art_count + 1; // final cell is the rhs
    let rhs_col = cols - 1;

    // Orient every row to a non-negative rhs. With rhs <= 0 the negated row
    // carries a basic slack; with rhs > 0 the surplus gets an artificial.
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut next_art = nvars + m;
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.coeffs.len(), nvars, "row width mismatch");
        let mut line = vec![Rational::zero(); cols];
        if row.rhs.is_positive() {
            for (j, c) in row.coeffs.iter().enumerate() {
                line[j] = c.clone();
            }
            line[nvars + i] = -Rational::one(); // surplus
            line[next_art] = Rational::one();
            line[rhs_col] = row.rhs.clone();
            basis.push(next_art);
            next_art += 1;
        } else {
            for (j, c) in row.coeffs.iter().enumerate() {
                line[j] = -c;
            }
            line[nvars + i] = Rational::one(); // slack
            line[rhs_col] = -&row.rhs;
            basis.push(nvars + i);
        }
        t.push(line);
    }

    // Objective: minimize the artificial sum. Start from unit costs on the
    // artificial columns and cancel the basic ones row by row.
    let mut obj = vec![Rational::zero(); cols];
    obj[nvars + m..cols - 1].fill(Rational::one());
    for (r, &b) in basis.iter().enumerate() {
        if b >= nvars + m {
            for (oj, tj) in obj.iter_mut().zip(&t[r]) {
                if !tj.is_zero() {
                    *oj = &*oj - tj;
                }
            }
        }
    }

    // Bland: enter at the lowest-index column with a negative reduced cost.
    while let Some(enter) = (0..cols - 1).find(|&j| obj[j].is_negative()) {
        // Ratio test; ties resolved by the smallest basic column index.
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if !t[r][enter].is_positive() {
                continue;
            }
            let ratio = &t[r][rhs_col] / &t[r][enter];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => {
                    ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let (r, _) = leave.expect("phase-one objective is bounded below by zero");

        // Pivot on (r, enter).
        let pivot = t[r][enter].clone();
        for cell in t[r].iter_mut() {
            if !cell.is_zero() {
                *cell = &*cell / &pivot;
            }
        }
        let pivot_row = std::mem::take(&mut t[r]);
        for (r2, row) in t.iter_mut().enumerate() {
            if r2 == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (dst, src) in row.iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst = &*dst - &(&f * src);
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (oj, src) in obj.iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *oj = &*oj - &(&f * src);
                }
            }
        }
        t[r] = pivot_row;
        basis[r] = enter;
    }

    // The objective cell accumulates minus the artificial sum.
    if !obj[rhs_col].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (r, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = t[r][rhs_col].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsystem::rat;

    fn row(coeffs: &[&str], rhs: &str) -> GeRow {
        GeRow { coeffs: coeffs.iter().map(|s| rat(s)).collect(), rhs: rat(rhs) }
    }

    fn check(rows: &[GeRow], x: &[Rational]) {
        for r in rows {
            let lhs: Rational = r.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
            assert!(lhs >= r.rhs, "violated: {:?} at {:?}", r, x);
        }
    }

    #[test]
    fn one_variable_band() {
        // x >= 1, x <= 2
        let rows = vec![row(&["1"], "1"), row(&["-1"], "-2")];
        let x = feasible(&rows, 1).unwrap();
        check(&rows, &x);
        assert_eq!(x[0], rat("1"));

        // x >= 1, x <= 0
        let rows = vec![row(&["1"], "1"), row(&["-1"], "0")];
        assert!(feasible(&rows, 1).is_none());
    }

    #[test]
    fn two_variable_systems() {
        // x + y >= 3, x - y >= -1, -x + 2y >= -2
        let rows = vec![
            row(&["1", "1"], "3"),
            row(&["1", "-1"], "-1"),
            row(&["-1", "2"], "-2"),
        ];
        let x = feasible(&rows, 2).unwrap();
        check(&rows, &x);

        // inconsistent pair of bands
        let rows = vec![
            row(&["1", "1"], "4"),
            row(&["-1", "-1"], "-3"),
        ];
        assert!(feasible(&rows, 2).is_none());
    }

    #[test]
    fn equality_encoded_as_two_rows() {
        // x + y = 2 together with x - y >= 1/2
        let rows = vec![
            row(&["1", "1"], "2"),
            row(&["-1", "-1"], "-2"),
            row(&["1", "-1"], "1/2"),
        ];
        let x = feasible(&rows, 2).unwrap();
        check(&rows, &x);
        assert_eq!(&x[0] + &x[1], rat("2"));
    }

    #[test]
    fn degenerate_rows_do_not_cycle() {
        // several rows active at the same vertex, all rhs zero
        let rows = vec![
            row(&["1", "-1", "0"], "0"),
            row(&["0", "1", "-1"], "0"),
            row(&["-1", "0", "1"], "0"),
            row(&["1", "1", "1"], "1"),
        ];
        let x = feasible(&rows, 3).unwrap();
        check(&rows, &x);
    }
}
