//! Small dense real linear algebra.
//!
//! Only what the solver needs: a row-major matrix type, a cyclic Jacobi
//! eigensolver for symmetric 3×3 matrices, and an SVD specialised to `n × 3`
//! matrices whose right factor is forced into SO(3).

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Orthogonality tolerance on unit-scale inputs.
pub const EPS_ORTH: f64 = 1e-12;
/// Relative reconstruction tolerance of [`svd_n_by_3`].
pub const EPS_SVD: f64 = 1e-10;
/// Symmetry tolerance accepted by [`jacobi_eigen_sym3`].
pub const EPS_SYM: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

/// Dense real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct MatR {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatR {
    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(nrows, ncols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Rectangular diagonal matrix with `diag` on the leading diagonal;
    /// entries beyond `min(rows, cols)` are ignored.
    pub fn rect_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Row `i` of an `n × 3` matrix as a fixed-size triple.
    pub fn row3(&self, i: usize) -> [f64; 3] {
        assert_eq!(self.cols, 3, "row3 on a matrix with {} columns", self.cols);
        let r = self.row(i);
        [r[0], r[1], r[2]]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product. Panics on a shape mismatch.
    pub fn matmul(&self, rhs: &MatR) -> MatR {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn try_matmul(&self, rhs: &MatR) -> Result<MatR> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        Ok(self.matmul(rhs))
    }

    fn zip_with(&self, rhs: &MatR, f: impl Fn(f64, f64) -> f64) -> MatR {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "elementwise shape mismatch"
        );
        MatR {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &MatR) -> MatR {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &MatR) -> MatR {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> MatR {
        MatR {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Determinant of a 3×3 matrix.
    pub fn det3(&self) -> f64 {
        assert!(self.rows == 3 && self.cols == 3, "det3 needs a 3x3 matrix");
        let m = |i, j| self[(i, j)];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }

    /// Determinant by partial-pivot elimination. Intended for the small
    /// orthogonal factors only.
    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "det of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for MatR {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatR {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for MatR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatR {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `‖MᵀM − I‖_F`, zero exactly for orthogonal `M`.
pub fn orthogonality_defect(m: &MatR) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "orthogonality defect of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    Ok(m.transpose()
        .matmul(m)
        .sub(&MatR::identity(m.rows))
        .frobenius_norm())
}

fn sort_desc_with_columns(values: &mut [f64; 3], vecs: &mut MatR) {
    let mut order = [0usize, 1, 2];
    // stable, so equal values keep the rotation order
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let old_vals = *values;
    let old_vecs = vecs.clone();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = old_vals[src];
        vecs.set_col(dst, &old_vecs.col(src));
    }
}

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns.
pub fn jacobi_eigen_sym3(s: &MatR) -> Result<([f64; 3], MatR)> {
    if s.rows != 3 || s.cols != 3 {
        return Err(Error::Dimension(format!(
            "symmetric eigensolver needs 3x3, got {}x{}",
            s.rows, s.cols
        )));
    }
    let defect = s.sub(&s.transpose()).frobenius_norm();
    if defect > EPS_SYM * s.frobenius_norm().max(1.0) {
        return Err(Error::NotSymmetric { defect });
    }

    let mut a = [[0.0f64; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    let mut v = MatR::identity(3);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * 1e-4 * diag {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let sn = t * c;

            // A <- Gᵀ A G with G the (p, q) plane rotation
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - sn * akq;
                a[k][q] = sn * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - sn * aqk;
                a[q][k] = sn * apk + c * aqk;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            for k in 0..3 {
                let vkp = v[(k, p)];
                let vkq = v[(k, q)];
                v[(k, p)] = c * vkp - sn * vkq;
                v[(k, q)] = sn * vkp + c * vkq;
            }
        }
    }

    let mut values = [a[0][0], a[1][1], a[2][2]];
    sort_desc_with_columns(&mut values, &mut v);
    Ok((values, v))
}

/// Orthogonal/special-orthogonal factors of an `n × 3` SVD.
///
/// `q · m · p` is the `n × 3` rectangular diagonal matrix with entries `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFrame {
    /// `n × n`, orthogonal; its rows are the left singular vectors.
    pub q: MatR,
    /// `3 × 3`, special orthogonal; its columns are the right singular vectors.
    pub p: MatR,
    /// Singular values, non-increasing. For `n = 2` the third is zero.
    pub d: [f64; 3],
}

impl SvdFrame {
    /// The rectangular diagonal `n × 3` matrix of singular values.
    pub fn diagonal(&self) -> MatR {
        MatR::rect_diag(self.q.rows(), 3, &self.d)
    }

    /// `qᵀ · diag · pᵀ`, i.e. the inverse frame change applied to `diag`.
    pub fn to_original(&self, diag: &MatR) -> MatR {
        self.q.transpose().matmul(diag).matmul(&self.p.transpose())
    }

    /// `q · m · p`.
    pub fn to_diagonal_frame(&self, m: &MatR) -> MatR {
        self.q.matmul(m).matmul(&self.p)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Projects `v` off every vector in `basis` (twice, for stability) and
/// returns the remainder.
fn reorthogonalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    for _ in 0..2 {
        for b in basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    v
}

/// Extends an orthonormal set of length-`n` vectors to a full basis using
/// standard basis seeds in index order.
fn complete_basis(mut basis: Vec<Vec<f64>>, n: usize) -> Vec<Vec<f64>> {
    let mut seed = 0;
    while basis.len() < n && seed < n {
        let mut e = vec![0.0; n];
        e[seed] = 1.0;
        seed += 1;
        let r = reorthogonalize(e, &basis);
        let nr = norm(&r);
        if nr > 1e-8 {
            basis.push(r.into_iter().map(|x| x / nr).collect());
        }
    }
    debug_assert_eq!(basis.len(), n);
    basis
}

/// Orthonormalizes the columns of a square matrix by modified Gram–Schmidt,
/// returning the orthogonal factor of its QR decomposition. Rank-deficient
/// columns are replaced by standard-basis completions.
pub fn orthonormalize_columns(m: &MatR) -> MatR {
    let n = m.rows;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m.cols);
    for j in 0..m.cols.min(n) {
        let r = reorthogonalize(m.col(j), &basis);
        let nr = norm(&r);
        if nr > 1e-12 * norm(&m.col(j)).max(f64::MIN_POSITIVE) {
            basis.push(r.into_iter().map(|x| x / nr).collect());
        }
    }
    let basis = complete_basis(basis, n);
    let mut out = MatR::zeros(n, n);
    for (j, b) in basis.iter().enumerate() {
        out.set_col(j, b);
    }
    out
}

/// SVD of an `n × 3` matrix with `det(p) = +1`.
///
/// Right singular vectors start from the Jacobi eigenvectors of the Gram
/// matrix `mᵀm` and are then refined by one-sided Jacobi rotations on the
/// columns of `m·p`, so small singular values keep full relative accuracy.
/// Left vectors are the normalized columns of `m·p`; null directions are
/// completed deterministically from the standard basis.
pub fn svd_n_by_3(m: &MatR) -> Result<SvdFrame> {
    if m.cols != 3 {
        return Err(Error::Dimension(format!(
            "svd_n_by_3 needs 3 columns, got {}",
            m.cols
        )));
    }
    if m.rows < 2 {
        return Err(Error::Dimension(format!(
            "svd_n_by_3 needs at least 2 rows, got {}",
            m.rows
        )));
    }
    let n = m.rows;

    let gram = m.transpose().matmul(m);
    let (_, mut v) = jacobi_eigen_sym3(&gram)?;
    let mut w = m.matmul(&v);

    // one-sided Jacobi refinement
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let wi = w.col(i);
            let wj = w.col(j);
            let alpha = dot(&wi, &wi);
            let beta = dot(&wj, &wj);
            let gamma = dot(&wi, &wj);
            if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let s = c * t;
            for k in 0..n {
                let (a, b) = (w[(k, i)], w[(k, j)]);
                w[(k, i)] = c * a - s * b;
                w[(k, j)] = s * a + c * b;
            }
            for k in 0..3 {
                let (a, b) = (v[(k, i)], v[(k, j)]);
                v[(k, i)] = c * a - s * b;
                v[(k, j)] = s * a + c * b;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut d = [norm(&w.col(0)), norm(&w.col(1)), norm(&w.col(2))];
    // sort columns of v and w together
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let (v0, w0, d0) = (v.clone(), w.clone(), d);
    for (dst, &src) in order.iter().enumerate() {
        v.set_col(dst, &v0.col(src));
        w.set_col(dst, &w0.col(src));
        d[dst] = d0[src];
    }

    if v.det3() < 0.0 {
        for k in 0..3 {
            v[(k, 0)] = -v[(k, 0)];
        }
        for k in 0..n {
            w[(k, 0)] = -w[(k, 0)];
        }
    }

    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (i, &di) in d.iter().enumerate().take(n.min(3)) {
        if di == 0.0 || di <= 1e-14 * d[0] {
            break;
        }
        let u: Vec<f64> = w.col(i).into_iter().map(|x| x / di).collect();
        let u = reorthogonalize(u, &left);
        let nu = norm(&u);
        left.push(u.into_iter().map(|x| x / nu).collect());
    }
    let left = complete_basis(left, n);

    let mut q = MatR::zeros(n, n);
    for (i, u) in left.iter().enumerate() {
        for (k, &x) in u.iter().enumerate() {
            q[(i, k)] = x;
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        if i >= n {
            *di = 0.0;
        }
    }

    Ok(SvdFrame { q, p: v, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(rows: usize, seed: u64) -> MatR {
        // small LCG so these unit tests stay self-contained
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let data = (0..rows * 3)
            .map(|_| {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        MatR::new(rows, 3, data).unwrap()
    }

    fn check_frame(m: &MatR, f: &SvdFrame) {
        let scale = 1.0 + m.frobenius_norm();
        assert!(orthogonality_defect(&f.q).unwrap() <= EPS_ORTH * scale * 10.0);
        assert!(orthogonality_defect(&f.p).unwrap() <= EPS_ORTH * scale * 10.0);
        assert_abs_diff_eq!(f.p.det3(), 1.0, epsilon = 1e-12);
        let diag = f.to_diagonal_frame(m);
        assert!(diag.sub(&f.diagonal()).frobenius_norm() <= EPS_SVD * scale);
        let back = f.to_original(&f.diagonal());
        assert!(back.sub(m).frobenius_norm() <= EPS_SVD * scale);
        assert!(f.d[0] >= f.d[1] && f.d[1] >= f.d[2] && f.d[2] >= 0.0);
    }

    #[test]
    fn new_rejects_nan_and_empty() {
        assert!(matches!(
            MatR::new(1, 2, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(MatR::new(0, 3, vec![]).is_err());
        assert!(MatR::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn orthogonality_defect_examples() {
        assert_eq!(orthogonality_defect(&MatR::identity(3)).unwrap(), 0.0);
        let d = orthogonality_defect(&MatR::identity(3).scale(2.0)).unwrap();
        assert_abs_diff_eq!(d, 3.0 * 3f64.sqrt(), epsilon = 1e-14);
        let th = 0.7f64;
        let r = MatR::from_rows(&[[th.cos(), -th.sin()], [th.sin(), th.cos()]]).unwrap();
        assert!(orthogonality_defect(&r).unwrap() < 1e-15);
        assert!(matches!(
            orthogonality_defect(&MatR::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn jacobi_identity_and_diagonal() {
        let (l, v) = jacobi_eigen_sym3(&MatR::identity(3)).unwrap();
        assert_eq!(l, [1.0, 1.0, 1.0]);
        assert_eq!(v, MatR::identity(3));

        let (l, v) = jacobi_eigen_sym3(&MatR::rect_diag(3, 3, &[9.0, 4.0, 1.0])).unwrap();
        assert_eq!(l, [9.0, 4.0, 1.0]);
        assert_eq!(v, MatR::identity(3));
    }

    #[test]
    fn jacobi_gram_of_diag_123() {
        let m = MatR::rect_diag(3, 3, &[1.0, 2.0, 3.0]);
        let (l, v) = jacobi_eigen_sym3(&m.transpose().matmul(&m)).unwrap();
        assert_abs_diff_eq!(l[0], 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[2], 1.0, epsilon = 1e-14);
        assert!(orthogonality_defect(&v).unwrap() < 1e-14);
    }

    #[test]
    fn jacobi_dense_matrix_satisfies_eigen_equation() {
        let s = MatR::from_rows(&[[4.0, 1.0, -2.0], [1.0, 2.0, 0.5], [-2.0, 0.5, 3.0]]).unwrap();
        let (l, v) = jacobi_eigen_sym3(&s).unwrap();
        let lhs = s.matmul(&v);
        let rhs = v.matmul(&MatR::rect_diag(3, 3, &l));
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-13);
        assert!(l[0] >= l[1] && l[1] >= l[2]);
        assert!(orthogonality_defect(&v).unwrap() < 1e-14);
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let s = MatR::from_rows(&[[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(
            jacobi_eigen_sym3(&s),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            jacobi_eigen_sym3(&MatR::identity(2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn svd_zero_matrix() {
        let f = svd_n_by_3(&MatR::zeros(3, 3)).unwrap();
        assert_eq!(f.d, [0.0, 0.0, 0.0]);
        assert_eq!(f.q, MatR::identity(3));
        assert_eq!(f.p, MatR::identity(3));
    }

    #[test]
    fn svd_already_diagonal_2x3() {
        let m = MatR::rect_diag(2, 3, &[2.0, 1.0]);
        let f = svd_n_by_3(&m).unwrap();
        assert_abs_diff_eq!(f.d[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.d[1], 1.0, epsilon = 1e-15);
        assert_eq!(f.d[2], 0.0);
        check_frame(&m, &f);
        for i in 0..2 {
            assert_abs_diff_eq!(f.q[(i, i)].abs(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(f.p[(i, i)].abs(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn svd_random_shapes() {
        for rows in 2..=8 {
            for seed in 0..20 {
                let m = sample(rows, seed * 31 + rows as u64);
                let f = svd_n_by_3(&m).unwrap();
                check_frame(&m, &f);
                let (l, _) = jacobi_eigen_sym3(&m.transpose().matmul(&m)).unwrap();
                for k in 0..3 {
                    assert_abs_diff_eq!(f.d[k], l[k].max(0.0).sqrt(), epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn svd_forces_det_plus_one() {
        // a reflection: det(m) < 0 for the square case
        let m = MatR::rect_diag(3, 3, &[3.0, 2.0, -1.0]);
        let f = svd_n_by_3(&m).unwrap();
        assert_abs_diff_eq!(f.p.det3(), 1.0, epsilon = 1e-14);
        assert_eq!(f.d, [3.0, 2.0, 1.0]);
        assert_abs_diff_eq!(f.q.det().abs(), 1.0, epsilon = 1e-14);
        check_frame(&m, &f);
    }

    #[test]
    fn svd_rank_deficient() {
        let u = [0.6, 0.8, 0.0, 0.0];
        let v = [1.0 / 3f64.sqrt(); 3];
        let rows: Vec<Vec<f64>> = u
            .iter()
            .map(|a| v.iter().map(|b| 5.0 * a * b).collect())
            .collect();
        let m = MatR::from_rows(&rows).unwrap();
        let f = svd_n_by_3(&m).unwrap();
        assert_abs_diff_eq!(f.d[0], 5.0, epsilon = 1e-13);
        assert!(f.d[1] < 1e-13 && f.d[2] < 1e-13);
        check_frame(&m, &f);
    }

    #[test]
    fn svd_dimension_errors() {
        assert!(matches!(
            svd_n_by_3(&MatR::zeros(3, 2)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            svd_n_by_3(&MatR::zeros(1, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn det_matches_det3() {
        let m = sample(3, 99);
        assert_abs_diff_eq!(m.det(), m.det3(), epsilon = 1e-14);
    }
}
