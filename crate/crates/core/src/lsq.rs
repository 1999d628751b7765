use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition numbers above this are treated as rank deficiency.
pub(crate) const MAX_CONDITION: f64 = 1e12;

/// Least squares `min |A x - b|` via SVD with column scaling.
pub(crate) fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok(DVector::zeros(0));
    }
    if a.nrows() < cols {
        return Err(Error::RankDeficient { condition: f64::INFINITY });
    }
    // equilibrate columns so the condition number reflects the shape of the
    // basis, not its units
    let mut scaled = a.clone();
    let mut scale = vec![1.0; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = scaled.column(j).norm();
        if norm == 0.0 {
            return Err(Error::RankDeficient { condition: f64::INFINITY });
        }
        *s = norm;
        scaled.column_mut(j).scale_mut(1.0 / norm);
    }
    // thin QR first: the SVD then only sees a cols x cols matrix
    let qr = scaled.qr();
    let qtb = qr.q().transpose() * b;
    let svd = qr.r().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::RankDeficient { condition });
    }
    let x = svd
        .solve(&qtb, 0.0)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(DVector::from_iterator(cols, x.iter().zip(&scale).map(|(v, s)| v / s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let x = solve(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_columns_rejected() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(solve(&a, &b), Err(Error::RankDeficient { .. })));
    }
}
