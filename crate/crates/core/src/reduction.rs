//! Reduction of the quantum game to a classical game on the torus.
//!
//! Writing `2p = M_θ x + e` and `2q = M_τ y + e` turns each player's
//! probability pair into a point on the unit circle, and the first player's
//! payoff becomes `4⟨H⟩ = g(x, y) + tr C` with
//! `g(x, y) = −⟨x, A y⟩ + ⟨x, u⟩ − ⟨v, y⟩`.

use serde::{Deserialize, Serialize};

use crate::algebra2::{Mat2, Vec2};
use crate::error::GameError;
use crate::quantum_model::{AngularParams, PayCoefficients};

/// Absolute tolerance (radians) for treating `θ` and `τ` as equal.
pub const TOL_ANGLE_EQ: f64 = 1e-12;

const TOL_UNIT: f64 = 1e-12;
const TOL_SINGULAR: f64 = 1e-12;

/// `M_γ = [[cos γ, −sin γ], [cos γ, sin γ]]`, with `det M_γ = sin 2γ`.
pub fn mat_m(gamma: f64) -> Mat2 {
    let (s, c) = gamma.sin_cos();
    Mat2::new(c, -s, c, s)
}

/// A point on the unit circle: one player's strategy in the reduced game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct TorusPoint(Vec2);

impl TorusPoint {
    pub fn new(v: Vec2) -> Result<Self, GameError> {
        if (v.norm() - 1.0).abs() > TOL_UNIT {
            return Err(GameError::NotUnit(v.to_string()));
        }
        Ok(Self(v))
    }

    /// Normalizes `v`; `None` for the zero vector.
    pub fn normalize(v: Vec2) -> Option<Self> {
        v.normalized().map(Self)
    }

    pub fn from_angle(phi: f64) -> Self {
        Self(Vec2::from_angle(phi))
    }

    pub fn vec(&self) -> Vec2 {
        self.0
    }

    pub fn angle(&self) -> f64 {
        self.0.angle()
    }

    /// Antipodal point.
    pub fn opposite(&self) -> Self {
        Self(-self.0)
    }

    /// Rotate counter-clockwise by `delta` radians.
    pub fn rotated(&self, delta: f64) -> Self {
        let (s, c) = delta.sin_cos();
        let v = self.0;
        Self(Vec2::new(c * v.x1 - s * v.x2, s * v.x1 + c * v.x2))
    }
}

impl TryFrom<[f64; 2]> for TorusPoint {
    type Error = GameError;
    fn try_from(a: [f64; 2]) -> Result<Self, GameError> {
        TorusPoint::new(Vec2::try_new(a[0], a[1])?)
    }
}

impl From<TorusPoint> for [f64; 2] {
    fn from(p: TorusPoint) -> Self {
        p.0.to_array()
    }
}

/// The classical game on the torus obtained from a quantum game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedGame {
    pub coefficients: PayCoefficients,
    /// `A = M_θᵀ C M_τ`
    pub a: Mat2,
    /// `u = M_θᵀ ω`
    pub u: Vec2,
    /// `v = M_τᵀ ω`
    pub v: Vec2,
    pub omega: Vec2,
    pub n: f64,
    pub m: f64,
    pub trace_c: f64,
    pub theta: f64,
    pub tau: f64,
    /// `n·ω2² − m·ω1²`
    pub delta: f64,
}

pub fn reduce(c: &PayCoefficients, ang: &AngularParams) -> ReducedGame {
    let m_theta = mat_m(ang.theta());
    let m_tau = mat_m(ang.tau());
    let omega = c.omega();
    ReducedGame {
        coefficients: *c,
        a: m_theta.transpose() * c.c_matrix() * m_tau,
        u: m_theta.transpose().mul_vec(omega),
        v: m_tau.transpose().mul_vec(omega),
        omega,
        n: c.n(),
        m: c.m(),
        trace_c: c.trace_c(),
        theta: ang.theta(),
        tau: ang.tau(),
        delta: c.delta(),
    }
}

fn check_nonsingular(theta: f64) -> Result<(), GameError> {
    if (2.0 * theta).sin().abs() <= TOL_SINGULAR {
        Err(GameError::SingularAngle(theta))
    } else {
        Ok(())
    }
}

/// The unit `x` solving `2p(α) = M_θ x + e`, namely `x = (cos(2α−θ), sin(2α−θ))`.
pub fn to_torus(alpha: f64, theta: f64) -> Result<TorusPoint, GameError> {
    check_nonsingular(theta)?;
    Ok(TorusPoint::from_angle(2.0 * alpha - theta))
}

/// Inverse of [`to_torus`]: `p = (M_θ x + e) / 2`, returned as `(p1, p2)`.
pub fn from_torus(x: &TorusPoint, theta: f64) -> Result<(f64, f64), GameError> {
    check_nonsingular(theta)?;
    let w = mat_m(theta).mul_vec(x.vec());
    Ok(((w.x1 + 1.0) / 2.0, (w.x2 + 1.0) / 2.0))
}

/// Quantum strategy angle whose torus image is `x` (one of the two, mod π).
pub fn strategy_angle(x: &TorusPoint, theta: f64) -> f64 {
    (x.angle() + theta) / 2.0
}

/// `g(x, y) = −⟨x, A y⟩ + ⟨x, u⟩ − ⟨v, y⟩`
pub fn g_payoff(rg: &ReducedGame, x: &TorusPoint, y: &TorusPoint) -> f64 {
    let (x, y) = (x.vec(), y.vec());
    -rg.a.bilinear(x, y) + x.dot(rg.u) - rg.v.dot(y)
}

/// Reduced game with coinciding angles, `M = M_θ`, `A = MᵀCM`, `z = Mᵀω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymReducedGame {
    pub a: Mat2,
    pub z: Vec2,
    pub trace_c: f64,
    /// `⟨Az, z⟩ / |z|²`
    pub alpha_eig: f64,
    pub theta: f64,
}

impl SymReducedGame {
    pub fn z_norm(&self) -> f64 {
        self.z.norm()
    }

    /// `⟨Az, z⟩`
    pub fn s(&self) -> f64 {
        self.a.bilinear(self.z, self.z)
    }

    /// `‖Az − α z‖`; small exactly when `z` is an eigenvector of `A`.
    pub fn eigen_residual(&self) -> f64 {
        (self.a.mul_vec(self.z) - self.z * self.alpha_eig).norm()
    }
}

pub fn symmetrize(rg: &ReducedGame) -> Result<SymReducedGame, GameError> {
    if (rg.theta - rg.tau).abs() > TOL_ANGLE_EQ {
        return Err(GameError::AnglesDiffer { theta: rg.theta, tau: rg.tau });
    }
    if rg.omega == Vec2::ZERO {
        return Err(GameError::ZeroOmega);
    }
    let m = mat_m(rg.theta);
    let a = m.transpose() * Mat2::diag(rg.n, rg.m) * m;
    // exact symmetry; the two off-diagonal products can round differently
    let off = 0.5 * (a.m[0][1] + a.m[1][0]);
    let a = Mat2::new(a.m[0][0], off, off, a.m[1][1]);
    let z = m.transpose().mul_vec(rg.omega);
    let alpha_eig = a.bilinear(z, z) / z.norm_sq();
    Ok(SymReducedGame { a, z, trace_c: rg.trace_c, alpha_eig, theta: rg.theta })
}
