//! Small fixed-capacity vector/matrix arithmetic for points in dimension 2..=MAX_DIM.
//!
//! Domains in this crate live in R^d with d known only at runtime, but d is
//! always tiny, so points are stored inline to keep the hot loops (SDE steps,
//! polyline sweeps) allocation-free.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

/// A point (or vector) in R^d, d ≤ [`MAX_DIM`].
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Point {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Point { dim: dim as u8, c: [0.0; MAX_DIM] }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut p = Point::zeros(v.len());
        p.c[..v.len()].copy_from_slice(v);
        p
    }

    pub fn of2(x: f64, y: f64) -> Self {
        Point::from_slice(&[x, y])
    }

    pub fn of3(x: f64, y: f64, z: f64) -> Self {
        Point::from_slice(&[x, y, z])
    }

    /// Standard basis vector e_i in R^dim.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut p = Point::zeros(dim);
        p[i] = 1.0;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn coords_mut(&mut self) -> &mut [f64] {
        let n = self.dim as usize;
        &mut self.c[..n]
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim as usize {
            s += self.c[i] * other.c[i];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction; zero vector if the norm is below `eps`.
    pub fn normalized_or_zero(&self, eps: f64) -> Point {
        let n = self.norm();
        if n <= eps {
            Point::zeros(self.dim())
        } else {
            *self * (1.0 / n)
        }
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        *self + (*other - *self) * t
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }

    /// Orthogonal projection onto coordinates 1..=k (zeroing coordinates k+1..d).
    ///
    /// `proj_low(0)` is the zero map, `proj_low(d)` the identity.
    pub fn proj_low(&self, k: usize) -> Point {
        let mut p = *self;
        for i in k..self.dim() {
            p[i] = 0.0;
        }
        p
    }
}

impl Index<usize> for Point {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl IndexMut<usize> for Point {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.coords_mut()[i]
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim as usize {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim as usize {
            self.c[i] += rhs.c[i];
        }
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim as usize {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(mut self, s: f64) -> Point {
        for i in 0..self.dim as usize {
            self.c[i] *= s;
        }
        self
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        self * -1.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom("point dimension out of range"));
        }
        Ok(Point::from_slice(&v))
    }
}

/// Dense d×d matrix, d ≤ [`MAX_DIM`]. Row-major.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Matrix {
    dim: u8,
    m: [f64; MAX_DIM * MAX_DIM],
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Matrix { dim: dim as u8, m: [0.0; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.m[r * MAX_DIM + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.m[r * MAX_DIM + c] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim();
        let mut t = Matrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mat_mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim();
        debug_assert_eq!(d, other.dim());
        let mut out = Matrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, s);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Point) -> Point {
        let d = self.dim();
        debug_assert_eq!(d, v.dim());
        let mut out = Point::zeros(d);
        for r in 0..d {
            let mut s = 0.0;
            for c in 0..d {
                s += self.get(r, c) * v[c];
            }
            out[r] = s;
        }
        out
    }

    /// A^T v without forming the transpose.
    pub fn transpose_mul_vec(&self, v: &Point) -> Point {
        let d = self.dim();
        debug_assert_eq!(d, v.dim());
        let mut out = Point::zeros(d);
        for c in 0..d {
            let mut s = 0.0;
            for r in 0..d {
                s += self.get(r, c) * v[r];
            }
            out[c] = s;
        }
        out
    }

    /// max |A - B| entrywise.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                worst = worst.max((self.get(r, c) - other.get(r, c)).abs());
            }
        }
        worst
    }

    /// Householder reflection I - 2 e e^T for a unit vector e.
    pub fn reflection(e: &Point) -> Matrix {
        let d = e.dim();
        let mut m = Matrix::identity(d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, m.get(r, c) - 2.0 * e[r] * e[c]);
            }
        }
        m
    }

    /// Rotation by angle theta in the (i, j) coordinate plane, identity elsewhere.
    pub fn plane_rotation(dim: usize, i: usize, j: usize, theta: f64) -> Matrix {
        assert!(i < dim && j < dim && i != j);
        let mut m = Matrix::identity(dim);
        let (s, c) = theta.sin_cos();
        m.set(i, i, c);
        m.set(j, j, c);
        m.set(i, j, -s);
        m.set(j, i, s);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_arithmetic() {
        let a = Point::of3(1.0, 2.0, 3.0);
        let b = Point::of3(0.5, -1.0, 2.0);
        assert_eq!((a + b).coords(), &[1.5, 1.0, 5.0]);
        assert_eq!((a - b).coords(), &[0.5, 3.0, 1.0]);
        assert!((a.dot(&b) - (0.5 - 2.0 + 6.0)).abs() < 1e-15);
        assert!((Point::of2(3.0, 4.0).norm() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn proj_low_zeroes_high_coordinates() {
        let a = Point::of3(1.0, 2.0, 3.0);
        assert_eq!(a.proj_low(0), Point::zeros(3));
        assert_eq!(a.proj_low(1).coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(a.proj_low(3), a);
    }

    #[test]
    fn reflection_is_orthogonal_involution() {
        let e = Point::of2(1.0, 0.0);
        let m = Matrix::reflection(&e);
        assert_eq!(m.get(0, 0), -1.0);
        assert_eq!(m.get(1, 1), 1.0);
        let id = m.mat_mul(&m);
        assert!(id.max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn plane_rotation_is_orthogonal() {
        let r = Matrix::plane_rotation(3, 0, 1, std::f64::consts::FRAC_PI_2);
        let p = r.transpose().mat_mul(&r);
        assert!(p.max_abs_diff(&Matrix::identity(3)) < 1e-15);
        let v = r.mul_vec(&Point::of3(1.0, 0.0, 0.0));
        assert!(v.dist(&Point::of3(0.0, 1.0, 0.0)) < 1e-15);
    }
}
