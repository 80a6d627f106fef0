//! Exact rational Gaussian elimination: column rank and unique solves.
//!
//! Everything here is over `BigRational`; no floating point is involved
//! anywhere in the semilinear pipeline.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Zero;

fn to_rational_columns(columns: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    columns
        .iter()
        .map(|col| {
            col.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect()
}

/// Row-echelon elimination over the matrix with the given columns.
/// Returns `(echelon rows, pivot column indices)` where rows are the
/// eliminated *rows* of the column-major input (i.e. the matrix transposed
/// into row-major form first).
fn eliminate(columns: &[Vec<BigRational>], rows: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let ncols = columns.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| (0..ncols).map(|c| columns[c][r].clone()).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pivot = m[row][col].clone();
        for v in m[row][col..].iter_mut() {
            *v = &*v / &pivot;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let scaled: Vec<BigRational> = m[row][col..].iter().map(|v| &factor * v).collect();
                for (v, s) in m[r][col..].iter_mut().zip(&scaled) {
                    *v = &*v - s;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (m, pivots)
}

/// The rank of the matrix whose columns are `columns` (all of length `dim`).
pub fn column_rank(columns: &[Vec<BigInt>], dim: usize) -> usize {
    let cols = to_rational_columns(columns);
    eliminate(&cols, dim).1.len()
}

/// True iff the columns are linearly independent.
pub fn columns_independent(columns: &[Vec<BigInt>], dim: usize) -> bool {
    column_rank(columns, dim) == columns.len()
}

/// Solves `Σ λ_i · columns[i] = target` when the columns are linearly
/// independent.  Returns `None` if the system is inconsistent, otherwise
/// the unique rational coefficient vector.
pub fn solve_independent(
    columns: &[Vec<BigInt>],
    target: &[BigInt],
    dim: usize,
) -> Option<Vec<BigRational>> {
    let mut cols = to_rational_columns(columns);
    cols.push(
        target
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect(),
    );
    let n = columns.len();
    let (m, pivots) = eliminate(&cols, dim);
    // Inconsistent iff the augmented column is a pivot.
    if pivots.contains(&n) {
        return None;
    }
    let mut lambda = vec![BigRational::zero(); n];
    for (row, &col) in pivots.iter().enumerate() {
        lambda[col] = m[row][n].clone();
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn rank_of_independent_and_dependent_columns() {
        let cols = vec![vec![bi(1), bi(0)], vec![bi(0), bi(1)]];
        assert_eq!(column_rank(&cols, 2), 2);
        let cols = vec![vec![bi(1), bi(2)], vec![bi(2), bi(4)]];
        assert_eq!(column_rank(&cols, 2), 1);
        assert_eq!(column_rank(&[], 3), 0);
    }

    #[test]
    fn solve_unique_solution() {
        // 2λ1 + λ2 = 5, λ1 + λ2 = 3  =>  λ = (2, 1).
        let cols = vec![vec![bi(2), bi(1)], vec![bi(1), bi(1)]];
        let sol = solve_independent(&cols, &[bi(5), bi(3)], 2).unwrap();
        assert_eq!(sol[0], BigRational::from_integer(bi(2)));
        assert_eq!(sol[1], BigRational::from_integer(bi(1)));
    }

    #[test]
    fn solve_detects_inconsistency() {
        // Single column (1, 1); target (1, 2) is not a multiple.
        let cols = vec![vec![bi(1), bi(1)]];
        assert!(solve_independent(&cols, &[bi(1), bi(2)], 2).is_none());
    }

    #[test]
    fn solve_yields_fractions() {
        let cols = vec![vec![bi(2)]];
        let sol = solve_independent(&cols, &[bi(3)], 1).unwrap();
        assert_eq!(sol[0], BigRational::new(bi(3), bi(2)));
    }
}
