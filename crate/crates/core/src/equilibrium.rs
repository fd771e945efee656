//! Nash equilibria of the reduced game.
//!
//! Player 1 picks `x` to maximize `g`, player 2 picks `y` to minimize it. On
//! the unit circle that makes `(x, y)` an equilibrium exactly when
//! `−Ay + u = λx` and `Aᵀx + v = μy` with `λ, μ ≥ 0`.
//!
//! [`solve`] runs the analytic classification: it derives the eigen-angle
//! from the payoffs, builds the symmetric reduction at `θ = τ = θ*`, and
//! compares `⟨Az, z⟩` against `|z|³` to decide between one eigenequilibrium,
//! two, or none of the constructed form.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra2::{Mat2, Vec2};
use crate::error::GameError;
use crate::quantum_model::{AngularParams, PayCoefficients};
use crate::reduction::{g_payoff, mat_m, reduce, symmetrize, ReducedGame, TorusPoint};

/// Relative residual accepted by [`common_eigen_check`].
pub const TOL_COMMON_EIGEN: f64 = 1e-9;

/// Relative tolerance on the degeneracy determinant.
pub const TOL_DELTA: f64 = 1e-12;

/// Margin keeping `|cos 2θ*|` away from 1, i.e. `θ*` inside the open interval.
pub const TOL_EIGEN_ANGLE_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub x: TorusPoint,
    pub y: TorusPoint,
    pub lambda: f64,
    pub mu: f64,
    /// `‖−Ay + u − λx‖`
    pub residual_x: f64,
    /// `‖Aᵀx + v − μy‖`
    pub residual_y: f64,
    /// `g(x, y)`
    pub game_value_g: f64,
    /// `⟨H⟩ = (g + tr C) / 4`
    pub game_value_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize, Deserialize)]
pub enum Rejection {
    #[error("player 1 gradient is not collinear with x (residual {residual:e})")]
    NotCollinearX { residual: f64 },
    #[error("player 2 gradient is not collinear with y (residual {residual:e})")]
    NotCollinearY { residual: f64 },
    #[error("multiplier lambda = {lambda:e} is negative")]
    NegativeLambda { lambda: f64 },
    #[error("multiplier mu = {mu:e} is negative")]
    NegativeMu { mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionTolerance {
    /// Upper bound on both collinearity residuals.
    pub residual: f64,
    /// How far below zero a multiplier may fall.
    pub sign_slack: f64,
}

impl CriterionTolerance {
    pub fn for_game(rg: &ReducedGame) -> Self {
        let scale = 1.0 + rg.a.max_abs();
        Self { residual: 1e-9 * scale, sign_slack: 1e-12 * scale }
    }
}

/// Check the multiplier conditions at `(x, y)` with the default tolerances.
pub fn check_criterion(
    rg: &ReducedGame,
    x: &TorusPoint,
    y: &TorusPoint,
) -> Result<EquilibriumCertificate, Rejection> {
    check_criterion_with(rg, x, y, &CriterionTolerance::for_game(rg))
}

pub fn check_criterion_with(
    rg: &ReducedGame,
    x: &TorusPoint,
    y: &TorusPoint,
    tol: &CriterionTolerance,
) -> Result<EquilibriumCertificate, Rejection> {
    let (xv, yv) = (x.vec(), y.vec());
    let grad_x = rg.u - rg.a.mul_vec(yv);
    let grad_y = rg.a.transpose().mul_vec(xv) + rg.v;
    let lambda = grad_x.dot(xv);
    let mu = grad_y.dot(yv);
    let residual_x = (grad_x - xv * lambda).norm();
    let residual_y = (grad_y - yv * mu).norm();

    if residual_x > tol.residual {
        return Err(Rejection::NotCollinearX { residual: residual_x });
    }
    if residual_y > tol.residual {
        return Err(Rejection::NotCollinearY { residual: residual_y });
    }
    if lambda < -tol.sign_slack {
        return Err(Rejection::NegativeLambda { lambda });
    }
    if mu < -tol.sign_slack {
        return Err(Rejection::NegativeMu { mu });
    }

    let g = g_payoff(rg, x, y);
    Ok(EquilibriumCertificate {
        x: *x,
        y: *y,
        lambda,
        mu,
        residual_x,
        residual_y,
        game_value_g: g,
        game_value_h: (g + rg.trace_c) / 4.0,
    })
}

/// `⟨H⟩` at an equilibrium from its reduced value.
pub fn game_value(cert: &EquilibriumCertificate, trace_c: f64) -> f64 {
    (cert.game_value_g + trace_c) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EigenAngleError {
    #[error("game is degenerate (delta = {delta:e})")]
    Degenerate { delta: f64 },
    #[error("no eigen-angle: cos 2theta would be {t}, outside (-1, 1)")]
    NoEigenAngle { t: f64 },
}

fn is_degenerate(c: &PayCoefficients) -> bool {
    let w = c.omega();
    let scale = c.n() * w.x2 * w.x2 + c.m() * w.x1 * w.x1;
    c.delta().abs() <= TOL_DELTA * scale
}

/// `cos 2θ* = (m − n) ω1 ω2 / Δ`; `None` for degenerate games.
pub fn eigen_angle_cosine(c: &PayCoefficients) -> Option<f64> {
    if is_degenerate(c) {
        return None;
    }
    let w = c.omega();
    Some((c.m() - c.n()) * w.x1 * w.x2 / c.delta())
}

/// The common angle `θ = τ = θ*` forced on eigenequilibria of a
/// non-degenerate game.
pub fn eigen_angle(c: &PayCoefficients) -> Result<f64, EigenAngleError> {
    let t = eigen_angle_cosine(c).ok_or(EigenAngleError::Degenerate { delta: c.delta() })?;
    if t.abs() >= 1.0 - TOL_EIGEN_ANGLE_EDGE {
        return Err(EigenAngleError::NoEigenAngle { t });
    }
    let theta = t.acos() / 2.0;
    debug_assert!(theta > 0.0 && theta < FRAC_PI_2);
    Ok(theta)
}

/// Relative residual of `ω` as an eigenvector of `C M_γ M_γᵀ`, where
/// `M_γ M_γᵀ = [[1, cos 2γ], [cos 2γ, 1]]`.
fn eigen_residual_at(c: &PayCoefficients, gamma: f64) -> f64 {
    let c2 = (2.0 * gamma).cos();
    let k = Mat2::diag(c.n(), c.m()) * Mat2::new(1.0, c2, c2, 1.0);
    let w = c.omega();
    let kw = k.mul_vec(w);
    // ‖Kω − ρω‖ with ρ the Rayleigh quotient equals |Kω × ω| / |ω| in the plane
    let scale = k.max_abs() * w.norm();
    if scale == 0.0 {
        return 0.0;
    }
    kw.cross(w).abs() / w.norm() / scale
}

/// Larger of the two relative eigenvector residuals, one per angle.
pub fn common_eigen_residual(c: &PayCoefficients, theta: f64, tau: f64) -> Result<f64, GameError> {
    if c.omega() == Vec2::ZERO {
        return Err(GameError::ZeroOmega);
    }
    Ok(eigen_residual_at(c, theta).max(eigen_residual_at(c, tau)))
}

/// Whether `ω` is a common eigenvector of `C M_θ M_θᵀ` and `C M_τ M_τᵀ`.
pub fn common_eigen_check(c: &PayCoefficients, theta: f64, tau: f64) -> Result<bool, GameError> {
    Ok(common_eigen_residual(c, theta, tau)? <= TOL_COMMON_EIGEN)
}

/// Data of the symmetric reduction at the eigen-angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenAnalysis {
    pub theta_star: f64,
    pub z: Vec2,
    pub z_norm: f64,
    pub alpha_eig: f64,
    /// `⟨Az, z⟩`
    pub s: f64,
    pub z_norm_cubed: f64,
    pub reduced: ReducedGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    NoOmega,
    Degenerate,
    NoEigenAngle,
    NotCommonEigenvector,
    UniqueEigen,
    DualEigen,
    HypothesisFailed,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum GameClassification {
    /// `ω = 0`: no equilibrium exists.
    NoOmega,
    /// `Δ = 0`: the analytic route does not apply.
    Degenerate { delta: f64 },
    /// `|cos 2θ*| ≥ 1`: no admissible eigen-angle.
    NoEigenAngle { cos_two_theta: f64 },
    /// `ω` failed the common-eigenvector test at `θ*`; not expected in exact arithmetic.
    NotCommonEigenvector { theta_star: f64, residual: f64 },
    /// `⟨Az, z⟩ < |z|³`: `x = y = z/|z|` is the only equilibrium.
    UniqueEigen { analysis: EigenAnalysis, certificate: EquilibriumCertificate },
    /// `⟨Az, z⟩ = |z|³`: equilibria at `x = y = z/|z|` and `x = −z/|z|, y = z/|z|`.
    DualEigen { analysis: EigenAnalysis, certificates: [EquilibriumCertificate; 2] },
    /// `⟨Az, z⟩ > |z|³`: no eigenequilibrium construction applies.
    HypothesisFailed { analysis: EigenAnalysis },
}

impl GameClassification {
    pub fn tag(&self) -> Tag {
        match self {
            Self::NoOmega => Tag::NoOmega,
            Self::Degenerate { .. } => Tag::Degenerate,
            Self::NoEigenAngle { .. } => Tag::NoEigenAngle,
            Self::NotCommonEigenvector { .. } => Tag::NotCommonEigenvector,
            Self::UniqueEigen { .. } => Tag::UniqueEigen,
            Self::DualEigen { .. } => Tag::DualEigen,
            Self::HypothesisFailed { .. } => Tag::HypothesisFailed,
        }
    }

    pub fn certificates(&self) -> &[EquilibriumCertificate] {
        match self {
            Self::UniqueEigen { certificate, .. } => std::slice::from_ref(certificate),
            Self::DualEigen { certificates, .. } => certificates,
            _ => &[],
        }
    }

    pub fn analysis(&self) -> Option<&EigenAnalysis> {
        match self {
            Self::UniqueEigen { analysis, .. }
            | Self::DualEigen { analysis, .. }
            | Self::HypothesisFailed { analysis } => Some(analysis),
            _ => None,
        }
    }
}

/// Classify the game and construct its eigenequilibria.
pub fn solve(c: &PayCoefficients) -> GameClassification {
    if c.omega() == Vec2::ZERO {
        return GameClassification::NoOmega;
    }
    let theta_star = match eigen_angle(c) {
        Ok(theta) => theta,
        Err(EigenAngleError::Degenerate { delta }) => return GameClassification::Degenerate { delta },
        Err(EigenAngleError::NoEigenAngle { t }) => {
            return GameClassification::NoEigenAngle { cos_two_theta: t }
        }
    };

    let residual = common_eigen_residual(c, theta_star, theta_star).expect("omega is nonzero");
    if residual > TOL_COMMON_EIGEN {
        return GameClassification::NotCommonEigenvector { theta_star, residual };
    }

    let ang = AngularParams::symmetric(theta_star).expect("eigen-angle lies in (0, pi/2)");
    let mut reduced = reduce(c, &ang);
    let sym = symmetrize(&reduced).expect("angles coincide and omega is nonzero");
    // use the exactly symmetric A so that certificates see the same matrix
    reduced.a = sym.a;

    let z_norm = sym.z_norm();
    let z_norm_cubed = z_norm.powi(3);
    let s = sym.s();
    let analysis = EigenAnalysis {
        theta_star,
        z: sym.z,
        z_norm,
        alpha_eig: sym.alpha_eig,
        s,
        z_norm_cubed,
        reduced,
    };

    let tol_cmp = 1e-9 * (1.0 + sym.a.max_abs()) * z_norm_cubed;
    let z_hat = TorusPoint::normalize(sym.z).expect("z is nonzero when omega is");

    if (s - z_norm_cubed).abs() <= tol_cmp {
        // On the boundary λ (and μ for the second pair) vanish up to the
        // comparison tolerance, so the sign slack has to match it.
        let mut tol = CriterionTolerance::for_game(&reduced);
        tol.sign_slack = tol.sign_slack.max(tol_cmp / (z_norm * z_norm));
        let first = check_criterion_with(&reduced, &z_hat, &z_hat, &tol)
            .expect("x = y = z/|z| satisfies the criterion on the boundary");
        let second = check_criterion_with(&reduced, &z_hat.opposite(), &z_hat, &tol)
            .expect("x = -z/|z|, y = z/|z| satisfies the criterion on the boundary");
        GameClassification::DualEigen { analysis, certificates: [first, second] }
    } else if s < z_norm_cubed {
        let certificate = check_criterion(&reduced, &z_hat, &z_hat)
            .expect("x = y = z/|z| satisfies the criterion when <Az,z> < |z|^3");
        GameClassification::UniqueEigen { analysis, certificate }
    } else {
        GameClassification::HypothesisFailed { analysis }
    }
}

/// The reduced game at `θ = τ = θ*` if the payoffs admit an eigen-angle.
pub fn reduced_at_eigen_angle(c: &PayCoefficients) -> Result<ReducedGame, EigenAngleError> {
    let theta = eigen_angle(c)?;
    Ok(reduce(c, &AngularParams::symmetric(theta).expect("eigen-angle lies in (0, pi/2)")))
}

/// `M_θᵀ ω`
pub fn z_vector(c: &PayCoefficients, theta: f64) -> Vec2 {
    mat_m(theta).transpose().mul_vec(c.omega())
}
