//! Thomas algorithm for tridiagonal systems.

use crate::error::{numerical, Result};

/// Tridiagonal matrix given by its three diagonals.
///
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn with_size(n: usize) -> Self {
        Self { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `A x = rhs` without pivoting. Intended for diagonally dominant
    /// matrices; a vanishing pivot is reported as a numerical failure.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(numerical(format!("rhs length {} for system of size {n}", rhs.len())));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(numerical("zero pivot in tridiagonal solve at row 0"));
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(numerical(format!("zero pivot in tridiagonal solve at row {i}")));
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        if let Some(i) = d.iter().position(|v| !v.is_finite()) {
            return Err(numerical(format!("non-finite tridiagonal solution at row {i}")));
        }
        Ok(d)
    }

    /// Solves and checks `‖A x − rhs‖_∞ ≤ tol · max(1, ‖rhs‖_∞)`.
    pub fn solve_checked(&self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let x = self.solve(rhs)?;
        let ax = self.apply(&x);
        let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let res = ax.iter().zip(rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if res > tol * scale {
            return Err(numerical(format!("linear solve residual {res:e} exceeds tolerance")));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn densify(t: &Tridiagonal) -> Vec<Vec<f64>> {
        let n = t.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = t.diag[i];
            if i > 0 {
                a[i][i - 1] = t.lower[i];
            }
            if i + 1 < n {
                a[i][i + 1] = t.upper[i];
            }
        }
        a
    }

    #[test]
    fn zero_pivot_is_an_error() {
        let t = Tridiagonal { lower: vec![0.0, 1.0], diag: vec![0.0, 1.0], upper: vec![1.0, 0.0] };
        assert!(t.solve(&[1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn matches_dense_elimination(
            n in 1usize..12,
            seed in prop::collection::vec(-1.0f64..1.0, 36),
            rhs in prop::collection::vec(-5.0f64..5.0, 12),
        ) {
            let mut t = Tridiagonal::with_size(n);
            for i in 0..n {
                t.lower[i] = seed[i];
                t.upper[i] = seed[12 + i];
                t.diag[i] = 2.5 + seed[24 + i];
            }
            let x = t.solve(&rhs[..n]).unwrap();
            let y = dense_solve(densify(&t), rhs[..n].to_vec());
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
