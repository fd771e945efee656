//! The quantum game itself: rank-1 strategy projectors on a real plane, the
//! pay operator on the two-player tensor product, and the first player's
//! average payoff computed two ways (operator expectation and the
//! probability-weighted closed form).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::algebra2::{tensor2, tensor_vec, Mat2, Mat4, Vec2};
use crate::error::GameError;

/// Nonnegative payoffs `c1..c4` of the pay operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct PayCoefficients {
    c: [f64; 4],
}

impl PayCoefficients {
    pub fn new(c: [f64; 4]) -> Result<Self, GameError> {
        for (k, &value) in c.iter().enumerate() {
            if !value.is_finite() {
                return Err(GameError::NonFinite("payoff coefficient"));
            }
            if value < 0.0 {
                return Err(GameError::NegativeCoefficient { index: k + 1, value });
            }
        }
        Ok(Self { c })
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.c
    }

    /// `c_k` with the 1-based index used throughout.
    pub fn get(&self, k: usize) -> f64 {
        self.c[k - 1]
    }

    /// `a = (c1, c2)`
    pub fn a(&self) -> Vec2 {
        Vec2::new(self.c[0], self.c[1])
    }

    /// `b = (c3, c4)`
    pub fn b(&self) -> Vec2 {
        Vec2::new(self.c[2], self.c[3])
    }

    /// `ω = b − a`
    pub fn omega(&self) -> Vec2 {
        self.b() - self.a()
    }

    /// `n = c1 + c3`
    pub fn n(&self) -> f64 {
        self.c[0] + self.c[2]
    }

    /// `m = c2 + c4`
    pub fn m(&self) -> f64 {
        self.c[1] + self.c[3]
    }

    /// `C = diag(n, m)`
    pub fn c_matrix(&self) -> Mat2 {
        Mat2::diag(self.n(), self.m())
    }

    pub fn trace_c(&self) -> f64 {
        self.n() + self.m()
    }

    /// Degeneracy determinant `n·ω2² − m·ω1²`.
    pub fn delta(&self) -> f64 {
        let w = self.omega();
        self.n() * w.x2 * w.x2 - self.m() * w.x1 * w.x1
    }

    pub fn total(&self) -> f64 {
        self.c.iter().sum()
    }

    /// Panics unless `s` is finite and nonnegative.
    pub fn scaled(&self, s: f64) -> PayCoefficients {
        PayCoefficients::new(self.c.map(|v| v * s)).expect("scale factor must be finite and >= 0")
    }
}

impl TryFrom<[f64; 4]> for PayCoefficients {
    type Error = GameError;
    fn try_from(c: [f64; 4]) -> Result<Self, GameError> {
        PayCoefficients::new(c)
    }
}

impl From<PayCoefficients> for [f64; 4] {
    fn from(c: PayCoefficients) -> Self {
        c.c
    }
}

/// Rotation angles of the second projector of each player, both in `(0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularParams {
    theta: f64,
    tau: f64,
}

impl AngularParams {
    pub fn new(theta: f64, tau: f64) -> Result<Self, GameError> {
        check_open_angle("theta", theta)?;
        check_open_angle("tau", tau)?;
        Ok(Self { theta, tau })
    }

    pub fn symmetric(theta: f64) -> Result<Self, GameError> {
        Self::new(theta, theta)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

fn check_open_angle(name: &'static str, value: f64) -> Result<(), GameError> {
    if !value.is_finite() {
        return Err(GameError::NonFinite("angle"));
    }
    if value <= 0.0 || value >= FRAC_PI_2 {
        return Err(GameError::AngleOutOfRange { name, value });
    }
    Ok(())
}

/// Quantum strategies `φ = (cos α, sin α)`, `ψ = (cos β, sin β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl StrategyAngles {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// Probabilities of the pure strategies. Index `k` holds `p_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityProfile {
    pub p: [f64; 4],
    pub q: [f64; 4],
}

impl ProbabilityProfile {
    /// Build from `p1, p2, q1, q2`; the complements follow from `A1 + A3 = I = A2 + A4`.
    pub fn from_primary(p1: f64, p2: f64, q1: f64, q2: f64) -> Self {
        Self {
            p: [p1, p2, 1.0 - p1, 1.0 - p2],
            q: [q1, q2, 1.0 - q1, 1.0 - q2],
        }
    }
}

/// Rank-1 projector onto `(cos γ, sin γ)`.
pub fn projector(gamma: f64) -> Mat2 {
    let (s, c) = gamma.sin_cos();
    Mat2::new(c * c, c * s, c * s, s * s)
}

/// The four projectors `[P1, P2, P3, P4]` of one player: `P1` onto `e1`,
/// `P2` onto `(cos γ, sin γ)`, and their complements.
pub fn player_projectors(gamma: f64) -> [Mat2; 4] {
    let p1 = projector(0.0);
    let p2 = projector(gamma);
    [p1, p2, Mat2::IDENTITY - p1, Mat2::IDENTITY - p2]
}

/// `H = c3 A1⊗B3 + c1 A3⊗B1 + c4 A2⊗B4 + c2 A4⊗B2`.
pub fn build_pay_operator(c: &PayCoefficients, ang: &AngularParams) -> Mat4 {
    let [a1, a2, a3, a4] = player_projectors(ang.theta());
    let [b1, b2, b3, b4] = player_projectors(ang.tau());
    tensor2(&a1, &b3).scale(c.get(3))
        + tensor2(&a3, &b1).scale(c.get(1))
        + tensor2(&a2, &b4).scale(c.get(4))
        + tensor2(&a4, &b2).scale(c.get(2))
}

pub fn probabilities(s: &StrategyAngles, ang: &AngularParams) -> ProbabilityProfile {
    let cos2 = |x: f64| {
        let c = x.cos();
        c * c
    };
    ProbabilityProfile::from_primary(
        cos2(s.alpha),
        cos2(s.alpha - ang.theta()),
        cos2(s.beta),
        cos2(s.beta - ang.tau()),
    )
}

/// `c3 p1 q3 + c1 p3 q1 + c4 p2 q4 + c2 p4 q2`
pub fn payoff_closed_form(c: &PayCoefficients, prob: &ProbabilityProfile) -> f64 {
    let [p1, p2, p3, p4] = prob.p;
    let [q1, q2, q3, q4] = prob.q;
    c.get(3) * p1 * q3 + c.get(1) * p3 * q1 + c.get(4) * p2 * q4 + c.get(2) * p4 * q2
}

/// `⟨φ⊗ψ| h |φ⊗ψ⟩` at the product state given by the strategy angles.
pub fn expectation(h: &Mat4, s: &StrategyAngles) -> f64 {
    let state = tensor_vec(Vec2::from_angle(s.alpha), Vec2::from_angle(s.beta));
    h.quadratic_form(state)
}
