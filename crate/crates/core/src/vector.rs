//! Small fixed-size vector and tensor types.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A real 3-vector. Used for positions, unit directions and wavevectors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit vector from spherical angles (polar angle from +z, azimuth in the xy plane).
    pub fn from_spherical(r: f64, cos_theta: f64, phi: f64) -> Self {
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        Self::new(r * sin_theta * phi.cos(), r * sin_theta * phi.sin(), r * cos_theta)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn scale(self, s: f64) -> Vec3 {
        self * s
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A complex 3x3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor3C(pub [[Complex64; 3]; 3]);

impl Tensor3C {
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_fn(|a, b| if a == b { 1.0.into() } else { 0.0.into() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = f(a, b);
            }
        }
        Self(t)
    }

    /// Transverse projector `delta_ab - n_a n_b` for a unit vector `n`.
    pub fn transverse_projector(n: Vec3) -> Self {
        Self::from_fn(|a, b| {
            let d = if a == b { 1.0 } else { 0.0 };
            (d - n[a] * n[b]).into()
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|a, b| self.0[a][b] * s)
    }

    pub fn matmul(&self, o: &Tensor3C) -> Self {
        Self::from_fn(|a, b| (0..3).map(|c| self.0[a][c] * o.0[c][b]).sum())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|a, b| self.0[b][a])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Left contraction `v_a T_ab`.
    pub fn left_contract(&self, v: Vec3) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (b, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|a| self.0[a][b] * v[a]).sum();
        }
        out
    }

    /// Right contraction `T_ab p_b` with a complex vector.
    pub fn apply(&self, p: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (a, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|b| self.0[a][b] * p[b]).sum();
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `sum_{a,b,c} T_ab conj(T_ac) P_bc` for a real symmetric `P`.
    ///
    /// This is the contraction that appears in every photodetection integrand.
    pub fn projected_norm_sqr(&self, p: &[[f64; 3]; 3]) -> f64 {
        let mut acc = 0.0;
        for row in &self.0 {
            for b in 0..3 {
                for c in 0..3 {
                    acc += (row[b] * row[c].conj()).re * p[b][c];
                }
            }
        }
        acc
    }
}

impl Add for Tensor3C {
    type Output = Tensor3C;
    fn add(self, o: Tensor3C) -> Tensor3C {
        Tensor3C::from_fn(|a, b| self.0[a][b] + o.0[a][b])
    }
}

impl Sub for Tensor3C {
    type Output = Tensor3C;
    fn sub(self, o: Tensor3C) -> Tensor3C {
        Tensor3C::from_fn(|a, b| self.0[a][b] - o.0[a][b])
    }
}

/// Real transverse projector `delta_ab - q_a q_b / q^2`.
pub fn transverse_projector_real(q: Vec3) -> [[f64; 3]; 3] {
    let q2 = q.norm_sqr();
    let mut p = [[0.0; 3]; 3];
    for (a, row) in p.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let d = if a == b { 1.0 } else { 0.0 };
            *v = d - q[a] * q[b] / q2;
        }
    }
    p
}
