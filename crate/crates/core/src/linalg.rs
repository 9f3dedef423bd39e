//! Exact linear algebra over ℚ: fraction-free Gauss–Jordan elimination,
//! reduced row echelon form and nullspace bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::series::Rational;

/// Reduced row echelon form: pivot entries are 1, every other entry of a
/// pivot column is 0, pivots strictly increase left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Scales a rational row to a primitive integer row (content 1).
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    primitive(ints)
}

fn primitive(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
    row
}

/// Gauss–Jordan elimination on `rows` (each of length `ncols`). Rows are
/// kept as primitive integer vectors during elimination; pivots are
/// normalized to 1 only at the end.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> Rref {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|q| !q.is_zero()))
        .map(|r| {
            assert_eq!(r.len(), ncols, "row length differs from column count");
            integer_row(r)
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == m.len() {
            break;
        }
        // smallest nonzero entry keeps intermediate numbers short
        let Some(p) = (top..m.len())
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].abs())
        else {
            continue;
        };
        m.swap(top, p);
        let prow = m[top].clone();
        let pv = prow[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == top || row[col].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[col]);
            let a = &pv / &g;
            let b = &row[col] / &g;
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = &*x * &a - &b * y;
            }
            *row = primitive(std::mem::take(row));
        }
        pivots.push(col);
        top += 1;
    }
    m.truncate(top);
    let rows = m
        .into_iter()
        .zip(&pivots)
        .map(|(row, &c)| {
            let pv = row[c].clone();
            row.into_iter()
                .map(|x| Rational::new(x, pv.clone()))
                .collect()
        })
        .collect();
    Rref { rows, pivots }
}

/// Basis of `{v : M v = 0}`, one vector per free column, with a 1 in that
/// column and 0 in the other free columns.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let r = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (row, &p) in r.rows.iter().zip(&r.pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

/// `M v` for a dense matrix.
pub fn mat_vec(rows: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    #[test]
    fn rref_of_rank_two_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let r = rref(&a, 3);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rows, m(&[&[1, 0, 1], &[0, 1, 1]]));
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = vec![
            vec![rat(1, 2), rat(-1, 3), rat(0, 1), rat(2, 1)],
            vec![rat(3, 1), rat(1, 1), rat(-1, 1), rat(0, 1)],
        ];
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&a, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert!(nullspace(&a, 2).is_empty());
        assert_eq!(rref(&a, 2).rank(), 2);
    }

    #[test]
    fn empty_and_zero_matrices() {
        assert_eq!(nullspace(&[], 3).len(), 3);
        assert_eq!(rref(&m(&[&[0, 0]]), 2).rank(), 0);
    }
}
