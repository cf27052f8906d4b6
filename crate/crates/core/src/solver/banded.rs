use super::operator::SparseOperator;
use crate::error::{EvasionError, Result};

/// Cholesky factor `L` of a symmetric positive definite band matrix.
///
/// Row `k` keeps columns `k - b ..= k` contiguously, diagonal last, so the
/// inner products of the factorization run over unit-stride slices.
#[derive(Clone, Debug)]
pub struct BandedCholesky {
    n: usize,
    b: usize,
    rows: Vec<f64>,
}

impl BandedCholesky {
    /// Factors `S - shift·I`.
    pub fn factor(op: &SparseOperator, shift: f64) -> Result<Self> {
        let n = op.len();
        let b = op.bandwidth();
        let w = b + 1;
        let mut rows = vec![0.0; n * w];
        let (diag, radial, angular) = (op.diag(), op.radial(), op.angular());
        for k in 0..n {
            rows[k * w + b] = diag[k] - shift;
            if k >= 1 {
                rows[k * w + b - 1] += angular[k - 1];
            }
            if k >= b {
                rows[k * w] += radial[k - b];
            }
        }

        for k in 0..n {
            let k0 = k.saturating_sub(b);
            let (before, rest) = rows.split_at_mut(k * w);
            let row_k = &mut rest[..w];
            for m in k0..k {
                let row_m = &before[m * w..(m + 1) * w];
                let len = m - k0;
                let dot: f64 = row_k[k0 + b - k..k0 + b - k + len]
                    .iter()
                    .zip(&row_m[k0 + b - m..b])
                    .map(|(x, y)| x * y)
                    .sum();
                let p = m + b - k;
                row_k[p] = (row_k[p] - dot) / row_m[b];
            }
            let sq: f64 = row_k[k0 + b - k..b].iter().map(|x| x * x).sum();
            let pivot = row_k[b] - sq;
            if !(pivot > 0.0) {
                return Err(EvasionError::Factorization { pivot: k });
            }
            row_k[b] = pivot.sqrt();
        }
        Ok(BandedCholesky { n, b, rows })
    }

    /// Overwrites `x` with `(L Lᵀ)⁻¹ x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        assert_eq!(x.len(), n);
        for k in 0..n {
            let k0 = k.saturating_sub(b);
            let row = &self.rows[k * w..(k + 1) * w];
            let dot: f64 = row[k0 + b - k..b].iter().zip(&x[k0..k]).map(|(l, y)| l * y).sum();
            x[k] = (x[k] - dot) / row[b];
        }
        for k in (0..n).rev() {
            let k0 = k.saturating_sub(b);
            let row = &self.rows[k * w..(k + 1) * w];
            x[k] /= row[b];
            let xk = x[k];
            for (y, l) in x[k0..k].iter_mut().zip(&row[k0 + b - k..b]) {
                *y -= l * xk;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, WedgeDomain};
    use crate::solver::WedgeMesh;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn solves_shifted_system() {
        let w = WedgeDomain::new(Point2::ORIGIN, Point2::new(1.0, 0.0), FRAC_PI_4, 2.0).unwrap();
        let op = SparseOperator::kinetic(WedgeMesh::new(w, 12, 8).unwrap());
        let shift = op.gershgorin_lower() - 1.0;
        let chol = BandedCholesky::factor(&op, shift).unwrap();
        let x_true: Vec<f64> = (0..op.len()).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let mut rhs = vec![0.0; op.len()];
        op.apply_symmetric(&x_true, &mut rhs);
        for (r, x) in rhs.iter_mut().zip(&x_true) {
            *r -= shift * x;
        }
        chol.solve_in_place(&mut rhs);
        for (a, b) in rhs.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn indefinite_shift_rejected() {
        let w = WedgeDomain::new(Point2::ORIGIN, Point2::new(1.0, 0.0), FRAC_PI_4, 2.0).unwrap();
        let op = SparseOperator::kinetic(WedgeMesh::new(w, 8, 8).unwrap());
        let err = BandedCholesky::factor(&op, 1e6).unwrap_err();
        assert!(matches!(err, EvasionError::Factorization { .. }));
    }
}
