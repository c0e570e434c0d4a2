//! Small numeric helpers: `libm` shims and a 2×2 real matrix.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use core::f64::consts::PI;
pub use libm::{acos, atan, atan2, ceil, cos, exp, floor, pow, round, sin, sqrt};

pub const TAU: f64 = 2.0 * PI;

/// `s^β` with the continuous extension `0^β = 0` for `s ≤ 0`.
#[inline]
pub fn pow_nonneg(s: f64, beta: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        pow(s, beta)
    }
}

/// Wrap an angle increment into `(-π, π]`.
#[inline]
pub fn wrap_angle(mut a: f64) -> f64 {
    while a > PI {
        a -= TAU;
    }
    while a <= -PI {
        a += TAU;
    }
    a
}

/// Real 2×2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0; 2]; 2]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Mat2::new(d1, 0.0, 0.0, d2)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Column `j` as `[row0, row1]`.
    pub fn col(&self, j: usize) -> [f64; 2] {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.0.iter().flatten().map(|v| v * v).sum())
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// Solve `self · x = rhs` by Cramer's rule; `None` when singular.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = self.0;
        Some([
            (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d,
            (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / d,
        ])
    }

    /// Both eigenvalues, roots of `λ² - tr λ + det`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tr = self.trace();
        let disc = tr * tr - 4.0 * self.det();
        if disc >= 0.0 {
            let s = sqrt(disc);
            // Stable pairing: compute the larger-magnitude root first.
            let big = if tr >= 0.0 {
                0.5 * (tr + s)
            } else {
                0.5 * (tr - s)
            };
            let small = if big != 0.0 { self.det() / big } else { 0.0 };
            let (lo, hi) = if big < small {
                (big, small)
            } else {
                (small, big)
            };
            [Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)]
        } else {
            let im = 0.5 * sqrt(-disc);
            [Complex64::new(0.5 * tr, -im), Complex64::new(0.5 * tr, im)]
        }
    }
}

/// `det(a^1 | b^2)`: first column of `a` next to second column of `b`.
pub fn column_det(a: &Mat2, b: &Mat2) -> f64 {
    let a1 = a.col(0);
    let b2 = b.col(1);
    a1[0] * b2[1] - b2[0] * a1[1]
}

/// Mixed-column determinant sum `det(A^1|B^2) + det(B^1|A^2)`.
pub fn mixed_det(a: &Mat2, b: &Mat2) -> f64 {
    column_det(a, b) + column_det(b, a)
}

/// Complex 2×2 determinant of `λI - Σ c_j M_j`.
pub fn shifted_det(lambda: Complex64, terms: &[(Complex64, &Mat2)]) -> Complex64 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    m[0][0] = lambda;
    m[1][1] = lambda;
    for (c, mat) in terms {
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry -= c * mat.0[i][j];
            }
        }
    }
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}
