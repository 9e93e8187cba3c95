//! Small dense linear-algebra helpers on top of nalgebra's SVD.

use nalgebra::DMatrix;

/// Singular values in descending order together with the matching right
/// singular vectors as the columns of `v`.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// Full SVD of `m`, padded with zero rows when `m` is wide so that every
/// right singular vector (including the trivially null ones) is returned.
pub fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut v = DMatrix::zeros(cols, order.len());
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &v_t.row(src).transpose());
    }
    SortedSvd {
        singular_values: order.iter().map(|&i| sv[i]).collect(),
        v,
    }
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Modified Gram-Schmidt on the columns of `m`, dropping columns whose
/// remaining norm falls below `drop_tol`.
pub fn orthonormal_columns(m: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let mut kept: Vec<nalgebra::DVector<f64>> = Vec::new();
    for c in m.column_iter() {
        let mut v = c.into_owned();
        for _ in 0..2 {
            for q in &kept {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let n = v.norm();
        if n > drop_tol {
            kept.push(v / n);
        }
    }
    if kept.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&kept)
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns, computed as `asin ‖(I − AAᵀ)B‖₂` so that small
/// angles keep full relative precision. Spans of different dimension are
/// reported as orthogonal.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.transpose() * b);
    let s = residual
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    s.min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_svd_descending_and_complete() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.0]);
        let s = sorted_svd(&m);
        assert_eq!(s.singular_values.len(), 3);
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
        assert!(s.singular_values[2].abs() < 1e-14);
        // null vector is e_3
        assert!((s.v[(2, 2)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_rank_one_outer_product() {
        let u = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let m = &u * u.transpose();
        assert_eq!(numerical_rank(&m, 1e-10), 1);
    }

    #[test]
    fn principal_angle_of_rotated_line() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let t: f64 = 1e-7;
        let b = DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]);
        let ang = max_principal_angle(&a, &b);
        assert!((ang - t).abs() < 1e-15);
    }
}
