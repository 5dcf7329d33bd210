//! Biquaternions: quaternions over the complex numbers.
//!
//! A biquaternion is `s + v1 i1 + v2 i2 + v3 i3` with complex `s, v1, v2, v3`.
//! The complex unit `i` commutes with the quaternionic units, which obey
//! `i1 i2 = i3`, `i2 i3 = i1`, `i3 i1 = i2` and `ik^2 = -1`.
//!
//! There is no division: the algebra has zero divisors, e.g.
//! `(1 + i i1)(1 - i i1) = 0`.

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex-coefficient quaternion stored as `(s; v1, v2, v3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Biquaternion {
    pub s: Complex64,
    pub v: [Complex64; 3],
}

/// A biquaternion whose scalar part is identically zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PureVector(pub [Complex64; 3]);

impl Biquaternion {
    pub const ZERO: Self = Self {
        s: ZERO,
        v: [ZERO; 3],
    };
    pub const ONE: Self = Self {
        s: Complex64::new(1.0, 0.0),
        v: [ZERO; 3],
    };

    pub const fn new(s: Complex64, v: [Complex64; 3]) -> Self {
        Self { s, v }
    }

    pub fn scalar(s: Complex64) -> Self {
        Self { s, v: [ZERO; 3] }
    }

    pub fn vector(v: [Complex64; 3]) -> Self {
        Self { s: ZERO, v }
    }

    /// Embeds a real 3-vector `x = x1 i1 + x2 i2 + x3 i3`.
    pub fn from_real_vector(x: [f64; 3]) -> Self {
        Self::vector(x.map(|c| Complex64::new(c, 0.0)))
    }

    /// Quaternionic unit `i_k` for `k` in `1..=3`.
    pub fn unit(k: usize) -> Self {
        assert!((1..=3).contains(&k), "quaternionic unit index must be 1, 2 or 3");
        let mut v = [ZERO; 3];
        v[k - 1] = Complex64::new(1.0, 0.0);
        Self::vector(v)
    }

    /// Builds a biquaternion from its eight real components
    /// `[s.re, s.im, v1.re, v1.im, v2.re, v2.im, v3.re, v3.im]`.
    pub fn from_components(c: [f64; 8]) -> Self {
        Self {
            s: Complex64::new(c[0], c[1]),
            v: [
                Complex64::new(c[2], c[3]),
                Complex64::new(c[4], c[5]),
                Complex64::new(c[6], c[7]),
            ],
        }
    }

    pub fn components(&self) -> [f64; 8] {
        [
            self.s.re,
            self.s.im,
            self.v[0].re,
            self.v[0].im,
            self.v[1].re,
            self.v[1].im,
            self.v[2].re,
            self.v[2].im,
        ]
    }

    /// Euclidean norm of the eight real components.
    pub fn norm(&self) -> f64 {
        self.components().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.s
    }

    pub fn vector_part(&self) -> PureVector {
        PureVector(self.v)
    }

    /// Quaternionic conjugate: the vector part changes sign.
    pub fn conj_quaternionic(&self) -> Self {
        Self {
            s: self.s,
            v: self.v.map(|c| -c),
        }
    }

    /// Complex conjugate of every coefficient.
    pub fn conj_complex(&self) -> Self {
        Self {
            s: self.s.conj(),
            v: self.v.map(|c| c.conj()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            s: self.s * k,
            v: self.v.map(|c| c * k),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        Self {
            s: self.s * k,
            v: self.v.map(|c| c * k),
        }
    }
}

/// Quaternion product with complex coefficients (no conjugation):
/// scalar `a.s b.s - <a.v, b.v>`, vector `a.s b.v + b.s a.v + a.v x b.v`.
#[inline]
pub fn bq_mul(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    let [a1, a2, a3] = a.v;
    let [b1, b2, b3] = b.v;
    Biquaternion {
        s: a.s * b.s - (a1 * b1 + a2 * b2 + a3 * b3),
        v: [
            a.s * b1 + b.s * a1 + (a2 * b3 - a3 * b2),
            a.s * b2 + b.s * a2 + (a3 * b1 - a1 * b3),
            a.s * b3 + b.s * a3 + (a1 * b2 - a2 * b1),
        ],
    }
}

pub fn bq_conj_quaternionic(a: &Biquaternion) -> Biquaternion {
    a.conj_quaternionic()
}

pub fn bq_conj_complex(a: &Biquaternion) -> Biquaternion {
    a.conj_complex()
}

pub fn scalar_part(a: &Biquaternion) -> Complex64 {
    a.s
}

pub fn vector_part(a: &Biquaternion) -> PureVector {
    PureVector(a.v)
}

impl PureVector {
    pub fn from_real(x: [f64; 3]) -> Self {
        Self(x.map(|c| Complex64::new(c, 0.0)))
    }

    pub fn re(&self) -> [f64; 3] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 3] {
        self.0.map(|c| c.im)
    }
}

impl From<PureVector> for Biquaternion {
    fn from(p: PureVector) -> Self {
        Biquaternion::vector(p.0)
    }
}

impl From<Complex64> for Biquaternion {
    fn from(s: Complex64) -> Self {
        Biquaternion::scalar(s)
    }
}

impl From<f64> for Biquaternion {
    fn from(s: f64) -> Self {
        Biquaternion::scalar(Complex64::new(s, 0.0))
    }
}

impl Add for Biquaternion {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            s: self.s + rhs.s,
            v: [self.v[0] + rhs.v[0], self.v[1] + rhs.v[1], self.v[2] + rhs.v[2]],
        }
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            s: self.s - rhs.s,
            v: [self.v[0] - rhs.v[0], self.v[1] - rhs.v[1], self.v[2] - rhs.v[2]],
        }
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            s: -self.s,
            v: self.v.map(|c| -c),
        }
    }
}

impl AddAssign for Biquaternion {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.s += rhs.s;
        for (a, b) in self.v.iter_mut().zip(rhs.v) {
            *a += b;
        }
    }
}

impl SubAssign for Biquaternion {
    fn sub_assign(&mut self, rhs: Self) {
        self.s -= rhs.s;
        for (a, b) in self.v.iter_mut().zip(rhs.v) {
            *a -= b;
        }
    }
}

impl Mul for Biquaternion {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        bq_mul(&self, &rhs)
    }
}

impl MulAssign for Biquaternion {
    fn mul_assign(&mut self, rhs: Self) {
        *self = bq_mul(self, &rhs);
    }
}

impl Mul<Complex64> for Biquaternion {
    type Output = Self;
    #[inline]
    fn mul(self, k: Complex64) -> Self {
        self.scale(k)
    }
}

impl Mul<Biquaternion> for Complex64 {
    type Output = Biquaternion;
    #[inline]
    fn mul(self, q: Biquaternion) -> Biquaternion {
        q.scale(self)
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        self.scale_real(k)
    }
}

impl Mul<Biquaternion> for f64 {
    type Output = Biquaternion;
    #[inline]
    fn mul(self, q: Biquaternion) -> Biquaternion {
        q.scale_real(self)
    }
}

impl std::iter::Sum for Biquaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, q| acc + q)
    }
}
