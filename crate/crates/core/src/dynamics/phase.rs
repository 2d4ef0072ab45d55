//! φ₂, ψ₂ by quadrature and the closed-form phase with its finite-duration
//! corrections.

use std::cell::RefCell;
use std::f64::consts::PI;

use super::{commutator_cdd, detuning, detuning_primitive, DetuningMode};
use crate::error::{Error, Result};
use crate::pulse::PulseSequence;
use crate::quadrature::{integrate_piecewise, QuadOptions};
use crate::scenario::Scenario;

/// sin φ1 at a time already known to lie in [0, 2T].
pub(crate) fn sin_phi1(seq: &PulseSequence, t: f64) -> f64 {
    seq.sensitivity(t.clamp(0.0, seq.total_time())).unwrap_or(0.0)
}

/// φ₂(t) = ∫₀ᵗ δ sin φ1, exact mean-path detuning. Free intervals use the
/// analytic primitive of δ, pulse windows use quadrature.
pub fn phi2_partial(seq: &PulseSequence, s: &Scenario, t: f64, opts: &QuadOptions) -> Result<f64> {
    seq.phi1(t)?;
    let knots = seq.knots();
    let mut acc = 0.0;
    for iv in seq.intervals() {
        if iv.start >= t {
            break;
        }
        let b = iv.end.min(t);
        acc += match iv.pulse {
            None => sin_phi1(seq, 0.5 * (iv.start + b)) * (detuning_primitive(s, b) - detuning_primitive(s, iv.start)),
            Some(_) => integrate_piecewise(
                |u| detuning(s, u, DetuningMode::Exact) * sin_phi1(seq, u),
                iv.start,
                b,
                &knots,
                opts,
            )?,
        };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePhase {
    pub phi1_total: f64,
    pub phi2: f64,
    /// Global phase; does not enter P₂₁.
    pub psi2: f64,
}

/// φ₂(2T) and ψ₂(2T), the latter by nested quadrature of c_δδ sin φ1 sin φ1 / 8.
pub fn phi2_psi2_quadrature(seq: &PulseSequence, s: &Scenario, opts: &QuadOptions) -> Result<QuadraturePhase> {
    let end = seq.total_time();
    let phi2 = phi2_partial(seq, s, end, opts)?;
    let psi2 = if s.pot.gamma == 0.0 {
        0.0
    } else {
        let knots = seq.knots();
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let outer = integrate_piecewise(
            |t1| {
                let inner = integrate_piecewise(|t2| commutator_cdd(s, t1, t2) * sin_phi1(seq, t2), 0.0, t1, &knots, opts);
                match inner {
                    Ok(v) => v * sin_phi1(seq, t1),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            end,
            &knots,
            opts,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        outer / 8.0
    };
    Ok(QuadraturePhase {
        phi1_total: seq.phi1(end)?,
        phi2,
        psi2,
    })
}

/// ψ₂ through the addition formula for sinh, which reduces the double
/// integral to single integrals of running moments.
pub fn psi2_separable(seq: &PulseSequence, s: &Scenario, opts: &QuadOptions) -> Result<f64> {
    use super::hyper;
    let gamma = s.pot.gamma;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let knots = seq.knots();
    let pre = s.laser.k * s.recoil_velocity() * gamma / 8.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let total = integrate_piecewise(
        |t1| {
            let moments = integrate_piecewise(
                |t2| {
                    let h = hyper(gamma, t2);
                    let sn = sin_phi1(seq, t2);
                    [h.c * sn, h.s1 * sn]
                },
                0.0,
                t1,
                &knots,
                opts,
            );
            match moments {
                Ok([a, b]) => {
                    let h = hyper(gamma, t1);
                    sin_phi1(seq, t1) * (h.s1 * a - h.c * b)
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        seq.total_time(),
        &knots,
        opts,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(pre * total),
    }
}

/// Coefficients of the closed form. The defaults are the ideal rectangular
/// pulse values; overriding them exists for negative-control testing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    /// η coefficient of the T² term, (2π − 4)/π.
    pub eta_linear: f64,
    /// 7/12
    pub gradient_constant: f64,
    /// (4π − 8)/(3π)
    pub gradient_eta: f64,
}

impl Default for ClosedFormCoefficients {
    fn default() -> Self {
        Self {
            eta_linear: (2.0 * PI - 4.0) / PI,
            gradient_constant: 7.0 / 12.0,
            gradient_eta: (4.0 * PI - 8.0) / (3.0 * PI),
        }
    }
}

/// Terms of the closed form, each carrying its own η factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormPhase {
    /// T²(kg − α)(1 − cη)
    pub gravity: f64,
    /// −kγz₀T²(1 − cη)
    pub position: f64,
    /// −kγT³v_m(1 − cη)
    pub velocity: f64,
    /// kγgT⁴(7/12 − c′η)
    pub gradient_gravity: f64,
}

impl ClosedFormPhase {
    pub fn total(&self) -> f64 {
        self.gravity + self.position + self.velocity + self.gradient_gravity
    }

    /// Termwise difference, so that terms equal in both cancel exactly.
    pub fn difference(&self, other: &Self) -> f64 {
        (self.gravity - other.gravity)
            + (self.position - other.position)
            + (self.velocity - other.velocity)
            + (self.gradient_gravity - other.gradient_gravity)
    }
}

/// −kγzT²(1 − cη), shared by the closed form and the gradiometer.
pub fn position_term(k: f64, gamma: f64, z: f64, t_half: f64, f1: f64) -> f64 {
    -(k * gamma * z) * (t_half * t_half) * f1
}

pub fn phi2_closed_form(seq: &PulseSequence, s: &Scenario) -> ClosedFormPhase {
    phi2_closed_form_with(seq, s, &ClosedFormCoefficients::default())
}

pub fn phi2_closed_form_with(seq: &PulseSequence, s: &Scenario, c: &ClosedFormCoefficients) -> ClosedFormPhase {
    let t = seq.t_half();
    let eta = seq.eta();
    let f1 = 1.0 - c.eta_linear * eta;
    let (k, g, gamma) = (s.laser.k, s.pot.g, s.pot.gamma);
    ClosedFormPhase {
        gravity: t * t * s.residual() * f1,
        position: position_term(k, gamma, s.kin.z0, t, f1),
        velocity: -k * gamma * t.powi(3) * s.mean_velocity() * f1,
        gradient_gravity: k * gamma * g * t.powi(4) * (c.gradient_constant - c.gradient_eta * eta),
    }
}

/// Differential phase of two clouds separated by `d`, −kγdT²(1 − cη).
pub fn gradiometer_phase(seq: &PulseSequence, s: &Scenario, d: f64) -> f64 {
    let f1 = 1.0 - ClosedFormCoefficients::default().eta_linear * seq.eta();
    position_term(s.laser.k, s.pot.gamma, d, seq.t_half(), f1)
}

/// The same quantity as the difference of two closed-form evaluations.
pub fn gradiometer_phase_by_difference(seq: &PulseSequence, s: &Scenario, d: f64) -> f64 {
    let mut upper = *s;
    upper.kin.z0 += d;
    phi2_closed_form(seq, &upper).difference(&phi2_closed_form(seq, s))
}

/// P₂₁ = ½(1 − cos φ1 cos φ₂)
pub fn transition_probability(phi1_total: f64, phi2: f64) -> f64 {
    (0.5 * (1.0 - phi1_total.cos() * phi2.cos())).clamp(0.0, 1.0)
}
