//! Smith normal form over the Laurent ring Q(zeta_n)[t, t^-1].
//!
//! The ring is Euclidean with size high - low, so the usual pivot and
//! remainder elimination terminates.

use super::laurent::LaurentPoly;
use super::matrix::LaurentMatrix;

fn pivot_in(m: &LaurentMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in k..m.rows() {
        for j in k..m.cols() {
            if let Some(s) = m.get(i, j).span() {
                if best.is_none_or(|(_, _, b)| s < b) {
                    best = Some((i, j, s));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Invariant factors d_1 | d_2 | ... of `m`, normalized monic with lowest
/// exponent zero. Always returns min(rows, cols) entries; trailing zeros mark
/// the rank deficiency.
pub fn smith_form(m: &LaurentMatrix) -> Vec<LaurentPoly> {
    let mut a = m.clone();
    let n = a.rows().min(a.cols());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let Some((pi, pj)) = pivot_in(&a, k) else {
            out.extend(std::iter::repeat_n(LaurentPoly::zero(), n - k));
            return out;
        };
        a.swap_rows(k, pi);
        a.swap_cols(k, pj);
        loop {
            let piv = a.get(k, k).clone();
            let mut dirty = false;
            for i in k + 1..a.rows() {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let (q, r) = a.get(i, k).div_rem(&piv);
                a.add_row_multiple(i, k, &(-&q));
                dirty |= !r.is_zero();
            }
            for j in k + 1..a.cols() {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let (q, r) = a.get(k, j).div_rem(&piv);
                a.add_col_multiple(j, k, &(-&q));
                dirty |= !r.is_zero();
            }
            if dirty {
                // a remainder now has smaller span than the pivot; move it in
                let (pi, pj) = smallest_in_cross(&a, k);
                a.swap_rows(k, pi);
                a.swap_cols(k, pj);
                continue;
            }
            // pivot must divide the remaining block
            let bad = (k + 1..a.rows())
                .flat_map(|i| (k + 1..a.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !piv.divides(a.get(i, j)));
            match bad {
                Some((i, _)) => a.add_row_multiple(k, i, &LaurentPoly::one()),
                None => break,
            }
        }
        out.push(a.get(k, k).normalized());
    }
    out
}

fn smallest_in_cross(a: &LaurentMatrix, k: usize) -> (usize, usize) {
    let mut best = (k, k, a.get(k, k).span().unwrap_or(usize::MAX));
    for i in k + 1..a.rows() {
        if let Some(s) = a.get(i, k).span() {
            if s < best.2 {
                best = (i, k, s);
            }
        }
    }
    for j in k + 1..a.cols() {
        if let Some(s) = a.get(k, j).span() {
            if s < best.2 {
                best = (k, j, s);
            }
        }
    }
    (best.0, best.1)
}

/// Result of reducing a column vector by unimodular row operations.
pub struct ColumnReduction {
    /// Normalized generator of the ideal spanned by the entries.
    pub gcd: LaurentPoly,
    /// Unimodular P with P*v = (g, 0, ..., 0)^T.
    pub transform: LaurentMatrix,
    /// Inverse of `transform`.
    pub inverse: LaurentMatrix,
}

/// Reduces a column vector to a single entry using Euclidean row operations.
pub fn reduce_column(v: &[LaurentPoly]) -> ColumnReduction {
    let n = v.len();
    let mut col = v.to_vec();
    let mut p = LaurentMatrix::identity(n);
    let mut pinv = LaurentMatrix::identity(n);
    loop {
        let piv = (0..n).filter(|&i| !col[i].is_zero()).min_by_key(|&i| col[i].span().unwrap());
        let Some(piv) = piv else { break };
        if piv != 0 {
            col.swap(0, piv);
            p.swap_rows(0, piv);
            pinv.swap_cols(0, piv);
        }
        let mut done = true;
        for i in 1..n {
            if col[i].is_zero() {
                continue;
            }
            let (q, r) = col[i].div_rem(&col[0]);
            // row_i -= q row_0; the inverse gets col_0 += q col_i
            p.add_row_multiple(i, 0, &(-&q));
            pinv.add_col_multiple(0, i, &q);
            col[i] = r;
            done &= col[i].is_zero();
        }
        if done {
            break;
        }
    }
    let gcd = col.first().map_or(LaurentPoly::zero(), LaurentPoly::normalized);
    ColumnReduction { gcd, transform: p, inverse: pinv }
}
