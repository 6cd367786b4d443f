//! Two-level (Jones/Pauli) algebra.
//!
//! A polarization state is a complex 2-vector in the `{|H>, |V>}` basis, the
//! eigenbasis of `sigma_z`. Points on the Poincare sphere are [`Axis3`]
//! values; the state `|+n>` sits at the point `n` and `|-n>` at its antipode.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Absolute tolerance used by the Hermiticity and unitarity checks.
pub const MATRIX_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Jones vector `h|H> + v|V>`.
///
/// Normalized vectors describe polarization states; unnormalized ones only
/// appear as amplitudes inside a [`crate::GaussianSumState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    pub h: C64,
    pub v: C64,
}

impl JonesVector {
    pub const H: JonesVector = JonesVector { h: ONE, v: ZERO };
    pub const V: JonesVector = JonesVector { h: ZERO, v: ONE };
    pub const ZERO: JonesVector = JonesVector { h: ZERO, v: ZERO };

    pub const fn new(h: C64, v: C64) -> Self {
        JonesVector { h, v }
    }

    /// Builds a unit vector from arbitrary nonzero components.
    pub fn normalized(h: C64, v: C64) -> Result<Self> {
        JonesVector { h, v }.normalize()
    }

    /// `cos(theta/2)|H> + sin(theta/2) e^{i phi}|V>`, the state at the
    /// Poincare-sphere point with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        JonesVector {
            h: C64::new(c, 0.0),
            v: C64::from_polar(s, phi),
        }
    }

    /// Linear polarization `cos(angle/2)|H> + sin(angle/2)|V>`.
    pub fn linear(angle: f64) -> Self {
        Self::from_angles(angle, 0.0)
    }

    /// `(|H> + |V>)/sqrt 2`.
    pub fn diagonal() -> Self {
        Self::linear(std::f64::consts::FRAC_PI_2)
    }

    pub fn norm_sq(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &JonesVector) -> C64 {
        self.h.conj() * other.h + self.v.conj() * other.v
    }

    pub fn scale(&self, k: C64) -> Self {
        JonesVector {
            h: self.h * k,
            v: self.v * k,
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        // Leave unit vectors bit-identical so normalizing is idempotent.
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(*self);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= 1e-12
    }

    /// The vector orthogonal to `self` with the same norm.
    pub fn orthogonal(&self) -> Self {
        JonesVector {
            h: -self.v.conj(),
            v: self.h.conj(),
        }
    }

    /// Poincare-sphere point of a nonzero vector (its Stokes direction).
    pub fn bloch(&self) -> Result<Axis3> {
        let s = self.normalize()?;
        let hv = s.h.conj() * s.v;
        Axis3::new(
            2.0 * hv.re,
            2.0 * hv.im,
            s.h.norm_sqr() - s.v.norm_sqr(),
        )
    }

    pub fn approx_eq(&self, other: &JonesVector, tol: f64) -> bool {
        (self.h - other.h).norm() <= tol && (self.v - other.v).norm() <= tol
    }
}

impl Add for JonesVector {
    type Output = JonesVector;
    fn add(self, rhs: JonesVector) -> JonesVector {
        JonesVector {
            h: self.h + rhs.h,
            v: self.v + rhs.v,
        }
    }
}

impl Sub for JonesVector {
    type Output = JonesVector;
    fn sub(self, rhs: JonesVector) -> JonesVector {
        JonesVector {
            h: self.h - rhs.h,
            v: self.v - rhs.v,
        }
    }
}

/// `cos(theta/2)|H> + sin(theta/2) e^{i phi}|V>`.
pub fn jones_from_angles(theta: f64, phi: f64) -> JonesVector {
    JonesVector::from_angles(theta, phi)
}

/// Unit vector on the Poincare sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis3 {
    x: f64,
    y: f64,
    z: f64,
}

impl Axis3 {
    pub const X: Axis3 = Axis3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Axis3 = Axis3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Axis3 = Axis3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `(x, y, z)`; the zero vector and non-finite input are rejected.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroAxis);
        }
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Axis3 { x, y, z });
        }
        Ok(Axis3 {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Axis3 {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Axis3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Polar and azimuthal angles `(theta, phi)`.
    pub fn angles(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }

    /// `|+n>`, the `+1` eigenvector of `sigma_n`.
    pub fn plus_state(&self) -> JonesVector {
        // Built from the closer pole to keep both components accurate.
        if self.z >= 0.0 {
            let h = (0.5 * (1.0 + self.z)).sqrt();
            let v = C64::new(self.x, self.y) / (2.0 * h);
            JonesVector::new(C64::new(h, 0.0), v)
        } else {
            let v = (0.5 * (1.0 - self.z)).sqrt();
            let h = C64::new(self.x, -self.y) / (2.0 * v);
            JonesVector::new(h, C64::new(v, 0.0))
        }
    }

    /// `|-n>`, the `-1` eigenvector of `sigma_n`.
    pub fn minus_state(&self) -> JonesVector {
        (-*self).plus_state()
    }
}

impl Neg for Axis3 {
    type Output = Axis3;
    fn neg(self) -> Axis3 {
        Axis3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Complex 2x2 matrix `[[a, b], [c, d]]` acting on Jones vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Operator2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Operator2 {
    pub const IDENTITY: Operator2 = Operator2 {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };
    pub const ZERO: Operator2 = Operator2 {
        a: ZERO,
        b: ZERO,
        c: ZERO,
        d: ZERO,
    };
    pub const SIGMA_X: Operator2 = Operator2 {
        a: ZERO,
        b: ONE,
        c: ONE,
        d: ZERO,
    };
    pub const SIGMA_Y: Operator2 = Operator2 {
        a: ZERO,
        b: C64::new(0.0, -1.0),
        c: I,
        d: ZERO,
    };
    pub const SIGMA_Z: Operator2 = Operator2 {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: C64::new(-1.0, 0.0),
    };

    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Operator2 { a, b, c, d }
    }

    /// Rank-one projector `|phi><phi|`.
    pub fn projector(phi: &JonesVector) -> Self {
        Operator2 {
            a: phi.h * phi.h.conj(),
            b: phi.h * phi.v.conj(),
            c: phi.v * phi.h.conj(),
            d: phi.v * phi.v.conj(),
        }
    }

    pub fn apply(&self, psi: &JonesVector) -> JonesVector {
        JonesVector {
            h: self.a * psi.h + self.b * psi.v,
            v: self.c * psi.h + self.d * psi.v,
        }
    }

    pub fn adjoint(&self) -> Self {
        Operator2 {
            a: self.a.conj(),
            b: self.c.conj(),
            c: self.b.conj(),
            d: self.d.conj(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Operator2 {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator2) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator2, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint(), MATRIX_TOL)
    }

    pub fn is_unitary(&self) -> bool {
        (self.adjoint() * *self).approx_eq(&Operator2::IDENTITY, MATRIX_TOL)
    }

    /// `<psi|self|phi>`.
    pub fn sandwich(&self, psi: &JonesVector, phi: &JonesVector) -> C64 {
        psi.inner(&self.apply(phi))
    }
}

impl Mul for Operator2 {
    type Output = Operator2;
    fn mul(self, r: Operator2) -> Operator2 {
        Operator2 {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

impl Add for Operator2 {
    type Output = Operator2;
    fn add(self, r: Operator2) -> Operator2 {
        Operator2 {
            a: self.a + r.a,
            b: self.b + r.b,
            c: self.c + r.c,
            d: self.d + r.d,
        }
    }
}

impl Sub for Operator2 {
    type Output = Operator2;
    fn sub(self, r: Operator2) -> Operator2 {
        Operator2 {
            a: self.a - r.a,
            b: self.b - r.b,
            c: self.c - r.c,
            d: self.d - r.d,
        }
    }
}

/// `sigma_n = n . sigma`.
pub fn pauli_on_axis(n: Axis3) -> Operator2 {
    Operator2 {
        a: C64::new(n.z, 0.0),
        b: C64::new(n.x, -n.y),
        c: C64::new(n.x, n.y),
        d: C64::new(-n.z, 0.0),
    }
}

/// `cosh(a) 1 + sinh(a) sigma_n`-style combination `p 1 + q sigma_n`.
fn identity_plus_pauli(p: C64, q: C64, n: Axis3) -> Operator2 {
    Operator2::IDENTITY.scale(p) + pauli_on_axis(n).scale(q)
}

/// PDL filter `F(mu, n) = e^{mu sigma_n / 2}`.
///
/// `|+n>` is the least attenuated state (gain `e^{mu/2}`), `|-n>` the most
/// (gain `e^{-mu/2}`); the extinction between them is `e^{2 mu}` in power.
pub fn pdl_operator(n: Axis3, mu: f64) -> Operator2 {
    debug_assert!(mu >= 0.0, "PDL strength is encoded as mu >= 0 with orientation in n");
    let half = 0.5 * mu;
    identity_plus_pauli(C64::new(half.cosh(), 0.0), C64::new(half.sinh(), 0.0), n)
}

/// Power ratio in dB between the least and most attenuated states.
pub fn db_from_mu(mu: f64) -> f64 {
    10.0 * (2.0 * mu).exp().log10()
}

/// Inverse of [`db_from_mu`]: `mu = db ln(10) / 20`.
pub fn mu_from_db(db: f64) -> Result<f64> {
    if !(db >= 0.0) {
        return Err(Error::Negative {
            what: "PDL in dB",
            value: db,
        });
    }
    Ok(db * std::f64::consts::LN_10 / 20.0)
}

/// Carrier-frequency part of a PMD section, `e^{i omega0 (dgd/2) sigma_n}`.
pub fn pmd_phase_operator(n: Axis3, dgd: f64, omega0: f64) -> Operator2 {
    let (s, c) = (0.5 * omega0 * dgd).sin_cos();
    identity_plus_pauli(C64::new(c, 0.0), C64::new(0.0, s), n)
}

/// `<psi|op|psi>` for Hermitian `op`.
pub fn expectation(op: &Operator2, psi: &JonesVector) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    Ok(op.sandwich(psi, psi).re)
}
