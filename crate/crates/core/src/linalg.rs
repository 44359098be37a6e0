//! Small dense matrices of symbolic scalars.

use crate::kernel::{Expr, Point};

pub type Matrix = Vec<Vec<Expr>>;

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = Expr::zero();
            for j in 0..n {
                if m[0][j].is_zero_structural() {
                    continue;
                }
                let term = &m[0][j] * &determinant(&minor(m, 0, j));
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Inverse through the adjugate; `None` when the determinant is
/// structurally zero.
pub fn inverse(m: &[Vec<Expr>]) -> Option<Matrix> {
    let n = m.len();
    let det = determinant(m);
    let inv_det = det.recip()?;
    let mut out = vec![vec![Expr::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let c = &determinant(&minor(m, j, i)) * &inv_det;
            *e = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    Some(out)
}

pub fn multiply(a: &[Vec<Expr>], b: &[Vec<Expr>]) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Expr::zero(); m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut acc = Expr::zero();
            for l in 0..k {
                acc = &acc + &(&a[i][l] * &b[l][j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Rank of the matrix evaluated at `point`, by Gaussian elimination with
/// partial pivoting; `None` if an entry cannot be evaluated there.
pub fn numeric_rank(m: &[Vec<Expr>], point: &Point) -> Option<usize> {
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .map(|r| r.iter().map(|e| e.eval_f64(point)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |s, x| s.max(x.abs()))
        .max(1.0);
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
        else {
            break;
        };
        if a[piv][col].abs() <= tol {
            continue;
        }
        a.swap(rank, piv);
        for r in rank + 1..rows {
            let f = a[r][col] / a[rank][col];
            for c in col..cols {
                a[r][c] -= f * a[rank][c];
            }
        }
        rank += 1;
    }
    Some(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| Expr::int(x)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(determinant(&a), Expr::int(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(multiply(&a, &inv), m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn rank() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(numeric_rank(&a, &Point::new()), Some(1));
    }
}
