//! Fixed-shape linear algebra: 2-vectors, 2×2 matrices and the 4×4 matrices
//! that arise as Kronecker products of 2×2 factors.
//!
//! Everything is `f64` and `Copy`. The 4×4 basis order is
//! `e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GameError;

/// Symmetry tolerance for [`eig_sym2`], relative to the max-abs entry.
pub const TOL_SYM: f64 = 1e-12;

/// Relative eigenvalue gap below which [`eig_sym2`] reports the canonical basis.
pub const TOL_EIG_DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", from = "[f64; 2]")]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x1: 0.0, x2: 0.0 };

    /// Panics on non-finite components.
    pub fn new(x1: f64, x2: f64) -> Self {
        assert!(
            x1.is_finite() && x2.is_finite(),
            "Vec2 components must be finite, got ({x1}, {x2})"
        );
        Self { x1, x2 }
    }

    pub fn try_new(x1: f64, x2: f64) -> Result<Self, GameError> {
        if x1.is_finite() && x2.is_finite() {
            Ok(Self { x1, x2 })
        } else {
            Err(GameError::NonFinite("vector component"))
        }
    }

    /// Unit vector at angle `phi` from the first axis.
    pub fn from_angle(phi: f64) -> Self {
        Self::new(phi.cos(), phi.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    pub fn angle(self) -> f64 {
        self.x2.atan2(self.x1)
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs())
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x1, self.x2]
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2 { x1: a[0], x2: a[1] }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        v.to_array()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2 { x1: self.x1 + o.x1, x2: self.x2 + o.x2 }
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2 { x1: self.x1 - o.x1, x2: self.x2 - o.x2 }
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2 { x1: -self.x1, x2: -self.x2 }
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2 { x1: self.x1 * s, x2: self.x2 * s }
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[[f64; 2]; 2]", from = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { m: [[0.0; 2]; 2] };
    pub const IDENTITY: Mat2 = Mat2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    /// Panics on non-finite entries.
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        let m = Mat2 { m: [[m11, m12], [m21, m22]] };
        assert!(m.is_finite(), "Mat2 entries must be finite, got {m:?}");
        m
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2)
    }

    fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.m;
        Mat2 { m: [[a, c], [b, d]] }
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0]).abs() <= rel_tol * self.max_abs()
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2 {
            x1: self.m[0][0] * v.x1 + self.m[0][1] * v.x2,
            x2: self.m[1][0] * v.x1 + self.m[1][1] * v.x2,
        }
    }

    /// `⟨x, M y⟩`
    pub fn bilinear(&self, x: Vec2, y: Vec2) -> f64 {
        x.dot(self.mul_vec(y))
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.m;
        Mat2 { m: [[a * s, b * s], [c * s, d * s]] }
    }
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(m: [[f64; 2]; 2]) -> Self {
        Mat2 { m }
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        m.m
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut m = self.m;
        for (row, orow) in m.iter_mut().zip(o.m) {
            for (v, ov) in row.iter_mut().zip(orow) {
                *v += ov;
            }
        }
        Mat2 { m }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, b: Mat2) -> Mat2 {
        mat2_mul(&self, &b)
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.mul_vec(v)
    }
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        }
    }
    Mat2 { m: out }
}

/// Eigen-decomposition of a symmetric 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen2 {
    /// Ascending.
    pub values: [f64; 2],
    /// Unit vectors, `vectors[k]` pairs with `values[k]`; each has its first
    /// nonzero component nonnegative.
    pub vectors: [Vec2; 2],
}

/// Closed-form eigen-decomposition of a symmetric 2×2 matrix.
///
/// With `h = (a - d)/2` and `r = hypot(h, b)` the eigenvalues are
/// `(a + d)/2 ∓ r`. The eigenvector of the larger one is taken from whichever
/// row of `S - λI` avoids cancellation; the other is its perpendicular.
/// When `r` is below [`TOL_EIG_DEGENERATE`] relative to the largest entry the
/// canonical basis is returned.
pub fn eig_sym2(s: &Mat2) -> Result<SymEigen2, GameError> {
    if !s.is_symmetric(TOL_SYM) {
        return Err(GameError::NotSymmetric {
            asymmetry: (s.m[0][1] - s.m[1][0]).abs(),
        });
    }
    let a = s.m[0][0];
    let d = s.m[1][1];
    let b = 0.5 * (s.m[0][1] + s.m[1][0]);
    let mean = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let r = h.hypot(b);

    if r <= TOL_EIG_DEGENERATE * s.max_abs() {
        return Ok(SymEigen2 {
            values: [mean, mean],
            vectors: [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        });
    }

    let upper = if h >= 0.0 { Vec2::new(h + r, b) } else { Vec2::new(b, r - h) };
    let upper = upper.normalized().expect("nonzero by construction when r > 0");
    let lower = Vec2::new(-upper.x2, upper.x1);

    Ok(SymEigen2 {
        values: [mean - r, mean + r],
        vectors: [canonical_sign(lower), canonical_sign(upper)],
    })
}

fn canonical_sign(v: Vec2) -> Vec2 {
    if v.x1 < 0.0 || (v.x1 == 0.0 && v.x2 < 0.0) {
        -v
    } else {
        v
    }
}

/// Row-major 4×4 matrix over the basis `e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat4 {
    pub m: [[f64; 4]; 4],
}

impl Mat4 {
    pub const ZERO: Mat4 = Mat4 { m: [[0.0; 4]; 4] };

    pub fn identity() -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat4 { m }
    }

    pub fn transpose(&self) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        Mat4 { m }
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Mat4 {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= s);
        Mat4 { m }
    }

    pub fn mul_vec(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `⟨v, M v⟩`
    pub fn quadratic_form(&self, v: [f64; 4]) -> f64 {
        self.mul_vec(v).iter().zip(&v).map(|(a, b)| a * b).sum()
    }

    /// The symmetric block matrix `[[0, a], [aᵀ, 0]]`.
    pub fn block_antidiag(a: &Mat2) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in a.m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[i][j + 2] = v;
                m[j + 2][i] = v;
            }
        }
        Mat4 { m }
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, o: Mat4) -> Mat4 {
        let mut m = self.m;
        for (row, orow) in m.iter_mut().zip(o.m) {
            for (v, ov) in row.iter_mut().zip(orow) {
                *v += ov;
            }
        }
        Mat4 { m }
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, b: Mat4) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[i][k] * b.m[k][j]).sum();
            }
        }
        Mat4 { m }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.m[i / 2][j / 2] * b.m[i % 2][j % 2];
        }
    }
    Mat4 { m }
}

/// Kronecker product of two 2-vectors, in the same basis order as [`tensor2`].
pub fn tensor_vec(a: Vec2, b: Vec2) -> [f64; 4] {
    [a.x1 * b.x1, a.x1 * b.x2, a.x2 * b.x1, a.x2 * b.x2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn entry() -> impl Strategy<Value = f64> {
        -10.0f64..10.0
    }

    fn mat2() -> impl Strategy<Value = Mat2> {
        (entry(), entry(), entry(), entry()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
    }

    fn assert_mat4_close(a: &Mat4, b: &Mat4, tol: f64) {
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.m[i][j] - b.m[i][j]).abs() <= tol, "entry ({i},{j}): {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn mul_identity_and_involution() {
        let x = Mat2::new(1.5, -2.0, 0.25, 7.0);
        assert_eq!(Mat2::IDENTITY * x, x);
        let swap = Mat2::new(0.0, 1.0, 1.0, 0.0);
        assert_eq!(swap * swap, Mat2::IDENTITY);
    }

    #[test]
    fn mul_by_hand() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let b = Mat2::new(5.0, 6.0, 7.0, 8.0);
        assert_eq!(a * b, Mat2::new(19.0, 22.0, 43.0, 50.0));
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn vec2_rejects_nan() {
        let _ = Vec2::new(f64::NAN, 0.0);
    }

    #[test]
    fn try_new_rejects_infinity() {
        assert!(Vec2::try_new(f64::INFINITY, 1.0).is_err());
        assert!(Vec2::try_new(1.0, 2.0).is_ok());
    }

    #[test]
    fn eig_identity_is_canonical() {
        let e = eig_sym2(&Mat2::IDENTITY).unwrap();
        assert_eq!(e.values, [1.0, 1.0]);
        assert_eq!(e.vectors, [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]);
    }

    #[test]
    fn eig_diagonal() {
        let e = eig_sym2(&Mat2::diag(3.0, 5.0)).unwrap();
        assert_eq!(e.values, [3.0, 5.0]);
        assert_abs_diff_eq!(e.vectors[0].x1, 1.0);
        assert_abs_diff_eq!(e.vectors[0].x2, 0.0);
        assert_abs_diff_eq!(e.vectors[1].x1, 0.0);
        assert_abs_diff_eq!(e.vectors[1].x2, 1.0);

        // descending diagonal still sorts ascending
        let e = eig_sym2(&Mat2::diag(5.0, 3.0)).unwrap();
        assert_eq!(e.values, [3.0, 5.0]);
        assert_abs_diff_eq!(e.vectors[0].x2, 1.0);
    }

    #[test]
    fn eig_two_one_one_two() {
        // λ² − 4λ + 3 = 0
        let e = eig_sym2(&Mat2::new(2.0, 1.0, 1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[0].x1, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[0].x2, -FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[1].x1, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[1].x2, FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let err = eig_sym2(&Mat2::new(1.0, 2.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, GameError::NotSymmetric { .. }));
    }

    #[test]
    fn eig_zero_matrix() {
        let e = eig_sym2(&Mat2::ZERO).unwrap();
        assert_eq!(e.values, [0.0, 0.0]);
    }

    #[test]
    fn tensor_identity_and_projectors() {
        assert_eq!(tensor2(&Mat2::IDENTITY, &Mat2::IDENTITY), Mat4::identity());
        let p = Mat2::diag(1.0, 0.0);
        let mut expected = Mat4::ZERO;
        expected.m[0][0] = 1.0;
        assert_eq!(tensor2(&p, &p), expected);
    }

    #[test]
    fn tensor_of_orthogonal_projectors_hits_e1_e2() {
        // projector onto e1 times projector onto e2
        let p0 = Mat2::diag(1.0, 0.0);
        let p90 = Mat2::diag(0.0, 1.0);
        let t = tensor2(&p0, &p90);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(t.m[i][j], want);
            }
        }
    }

    #[test]
    fn block_antidiag_is_symmetric() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let b = Mat4::block_antidiag(&a);
        assert_eq!(b, b.transpose());
        assert_eq!(b.m[0][3], 2.0);
        assert_eq!(b.m[3][0], 2.0);
        assert_eq!(b.m[2][1], 3.0);
    }

    proptest! {
        #[test]
        fn eig_reconstruction(a in entry(), b in entry(), d in entry()) {
            let s = Mat2::new(a, b, b, d);
            let e = eig_sym2(&s).unwrap();
            prop_assert!(e.values[0] <= e.values[1]);
            let tol = 1e-10 * (1.0 + s.max_abs());
            for k in 0..2 {
                let v = e.vectors[k];
                prop_assert!((v.norm() - 1.0).abs() < 1e-14);
                prop_assert!(v.x1 > 0.0 || (v.x1 == 0.0 && v.x2 >= 0.0));
                let r = s.mul_vec(v) - v * e.values[k];
                prop_assert!(r.norm() <= tol, "residual {} > {}", r.norm(), tol);
            }
            prop_assert!(e.vectors[0].dot(e.vectors[1]).abs() < 1e-14);
        }

        #[test]
        fn tensor_mixed_product(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
            let lhs = tensor2(&a, &b) * tensor2(&c, &d);
            let rhs = tensor2(&(a * c), &(b * d));
            let tol = 1e-12 * (1.0 + lhs.max_abs());
            assert_mat4_close(&lhs, &rhs, tol);
        }

        #[test]
        fn transpose_reverses_products(a in mat2(), b in mat2()) {
            let lhs = (a * b).transpose();
            let rhs = b.transpose() * a.transpose();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((lhs.m[i][j] - rhs.m[i][j]).abs() <= 1e-12 * (1.0 + lhs.max_abs()));
                }
            }
        }

        #[test]
        fn tensor_vec_matches_operator_form(a in mat2(), b in mat2(), v1 in entry(), v2 in entry(), w1 in entry(), w2 in entry()) {
            // ⟨v⊗w, (A⊗B) v⊗w⟩ = ⟨v,Av⟩⟨w,Bw⟩
            let v = Vec2::new(v1, v2);
            let w = Vec2::new(w1, w2);
            let lhs = tensor2(&a, &b).quadratic_form(tensor_vec(v, w));
            let rhs = a.bilinear(v, v) * b.bilinear(w, w);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
