//! Small dense matrices of expressions. Determinants use cofactor expansion,
//! which is division-free and fine for the sizes used here (n ≤ 6).

// index loops read more clearly for matrix algebra
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::symexpr::Expr;

pub type Matrix = Vec<Vec<Expr>>;

pub fn check_square(m: &[Vec<Expr>]) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    Ok(n)
}

pub fn det(m: &[Vec<Expr>]) -> Result<Expr> {
    let n = check_square(m)?;
    let rows: Vec<usize> = (0..n).collect();
    Ok(det_sub(m, &rows, &rows))
}

/// Determinant of the submatrix with the given (sorted) rows and columns.
pub fn det_sub(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    debug_assert_eq!(rows.len(), cols.len());
    match rows.len() {
        0 => Expr::one(),
        1 => m[rows[0]][cols[0]].clone(),
        2 => {
            let (r0, r1, c0, c1) = (rows[0], rows[1], cols[0], cols[1]);
            &(&m[r0][c0] * &m[r1][c1]) - &(&m[r0][c1] * &m[r1][c0])
        }
        _ => {
            let r = rows[0];
            let rest = &rows[1..];
            let mut acc = Expr::zero();
            for (j, &c) in cols.iter().enumerate() {
                let a = &m[r][c];
                if a.is_zero() {
                    continue;
                }
                let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = a * &det_sub(m, rest, &sub);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Inverse via the adjugate. Fails when the determinant is identically zero.
pub fn inverse(m: &[Vec<Expr>]) -> Result<(Matrix, Expr)> {
    let n = check_square(m)?;
    let d = det(m)?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            // inv[i][j] = cofactor(j, i) / det
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = det_sub(m, &rows, &cols);
            let cof = if (i + j) % 2 == 0 { minor } else { -minor };
            *slot = cof.checked_div(&d)?;
        }
    }
    Ok((inv, d))
}

/// Rank of a numeric matrix by Gaussian elimination with partial pivoting.
pub fn numeric_rank(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let scale = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, val) = (rank..rows)
            .map(|r| (r, m[r][c].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if val <= tol * scale {
            continue;
        }
        m.swap(rank, piv);
        for r in rank + 1..rows {
            let f = m[r][c] / m[rank][c];
            for k in c..cols {
                m[r][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[&str]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&mat(&[&["a", "b"], &["c", "d"]])).unwrap(), "a*d - b*c".parse().unwrap());
        let m = mat(&[&["2", "0", "1"], &["1", "3", "2"], &["1", "1", "1"]]);
        assert_eq!(det(&m).unwrap(), Expr::int(0));
        assert_eq!(det(&[]).unwrap(), Expr::one());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = mat(&[&["x", "1", "0"], &["0", "2", "y"], &["1", "0", "3"]]);
        let (inv, _) = inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: Expr = (0..3).map(|k| &inv[i][k] * &m[k][j]).sum();
                assert_eq!(s, Expr::int((i == j) as i64));
            }
        }
        assert_eq!(inverse(&mat(&[&["1", "2"], &["2", "4"]])), Err(Error::DivisionByZero));
    }

    #[test]
    fn rank() {
        assert_eq!(numeric_rank(vec![vec![1.0, 2.0], vec![2.0, 4.0]], 1e-9), 1);
        assert_eq!(numeric_rank(vec![vec![1.0], vec![0.0], vec![3.0]], 1e-9), 1);
        assert_eq!(numeric_rank(vec![vec![0.0, 0.0]], 1e-9), 0);
    }
}
