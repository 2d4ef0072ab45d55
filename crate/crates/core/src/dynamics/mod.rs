//! Phase engine for V(z) = m g z − m γ z²/2.
//!
//! Everything is evaluated on the classical mean path: z(t) and p(t) are
//! linear in the initial operators, so their expectation values follow the
//! same closed forms.

mod hyperbolic;
mod phase;
mod pulse_correction;
mod separation;

pub use hyperbolic::{hyper, Hyper};
pub use phase::{
    gradiometer_phase, gradiometer_phase_by_difference, phi2_closed_form, phi2_closed_form_with, phi2_partial,
    phi2_psi2_quadrature, position_term, psi2_separable, transition_probability, ClosedFormCoefficients,
    ClosedFormPhase, QuadraturePhase,
};
pub use pulse_correction::{
    low_discrepancy_normal, pulse_correction_exact, pulse_correction_from_angles, velocity_averaged_correction,
    PulseCorrection, VelocityAverage,
};
pub use separation::{
    compensation_quadratic, contrast_condition, separation_quadratic, QuadraticCompensation, QuadraticSeparation,
};

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningMode {
    /// Δ(t) + k p(t)/m with the exact hyperbolic mean path.
    Exact,
    /// Terms at most linear in γ.
    Expanded,
}

/// Mean-path position and momentum at time `t`.
pub fn classical_trajectory(s: &Scenario, t: f64) -> (f64, f64) {
    let h = hyper(s.pot.gamma, t);
    let vm = s.mean_velocity();
    let (g, gamma, z0) = (s.pot.g, s.pot.gamma, s.kin.z0);
    let v = vm * h.c + gamma * z0 * h.s1 - g * h.s1;
    let z = z0 * h.c + vm * h.s1 - g * h.q;
    (z, s.atom.mass * v)
}

/// Mean path with γ set to zero: the frame falling with acceleration g.
pub fn free_fall_path(s: &Scenario, t: f64) -> (f64, f64) {
    let vm = s.mean_velocity();
    let z = s.kin.z0 + vm * t - 0.5 * s.pot.g * t * t;
    (z, s.atom.mass * (vm - s.pot.g * t))
}

/// Doppler-shifted detuning δ(t) on the mean path, rad/s.
pub fn detuning(s: &Scenario, t: f64, mode: DetuningMode) -> f64 {
    let k = s.laser.k;
    let vm = s.mean_velocity();
    let (g, gamma, z0) = (s.pot.g, s.pot.gamma, s.kin.z0);
    let r = s.residual();
    match mode {
        DetuningMode::Exact => {
            let h = hyper(gamma, t);
            s.laser.detuning0 + k * vm * h.c + k * gamma * z0 * h.s1 - r * t - k * g * h.s1x
        }
        DetuningMode::Expanded => {
            s.laser.detuning0 + k * vm * (1.0 + 0.5 * gamma * t * t) - r * t + k * gamma * t * (z0 - g * t * t / 6.0)
        }
    }
}

/// ∫₀ᵗ δ for the exact detuning.
pub fn detuning_primitive(s: &Scenario, t: f64) -> f64 {
    let k = s.laser.k;
    let vm = s.mean_velocity();
    let (g, gamma, z0) = (s.pot.g, s.pot.gamma, s.kin.z0);
    let h = hyper(gamma, t);
    s.laser.detuning0 * t + k * vm * h.s1 + k * gamma * z0 * h.q - 0.5 * s.residual() * t * t - k * g * h.qx
}

/// Bound on |exact − expanded| detuning at time `t` from the first omitted
/// term of each series.
pub fn expansion_remainder_bound(s: &Scenario, t: f64) -> f64 {
    let k = s.laser.k;
    let u = (s.pot.gamma * t * t).abs();
    let grow = u.exp();
    let vm = s.mean_velocity().abs();
    let t = t.abs();
    grow * k * (vm * u * u / 24.0 + s.pot.gamma.abs() * s.kin.z0.abs() * t * u / 6.0 + s.pot.g.abs() * t * u * u / 120.0)
}

/// c_δδ(t, t′) = k v_r √γ sinh √γ(t − t′).
pub fn commutator_cdd(s: &Scenario, t: f64, tprime: f64) -> f64 {
    s.laser.k * s.recoil_velocity() * s.pot.gamma * hyper(s.pot.gamma, t - tprime).s1
}
