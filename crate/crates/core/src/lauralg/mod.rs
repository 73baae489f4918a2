//! Exact algebra over Q(zeta_n)[t, t^-1].

mod cyclotomic;
mod laurent;
mod matrix;
mod qpoly;
mod smith;

pub use cyclotomic::{cyclotomic_polynomial, totient, CyclotomicNumber};
pub(crate) use cyclotomic::height;
pub use laurent::LaurentPoly;
pub use matrix::LaurentMatrix;
pub use smith::{reduce_column, smith_form, ColumnReduction};

/// Rank of a matrix over a cyclotomic field by fraction-free elimination.
pub fn field_rank(rows: &[Vec<CyclotomicNumber>]) -> usize {
    let mut a: Vec<Vec<CyclotomicNumber>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..a.len())
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| height(&a[i][c]))
        else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][c].inverse().expect("nonzero pivot");
        for i in rank + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..ncols {
                let v = &a[i][j] - &(&f * &a[rank][j]);
                a[i][j] = v;
            }
        }
        rank += 1;
    }
    rank
}
