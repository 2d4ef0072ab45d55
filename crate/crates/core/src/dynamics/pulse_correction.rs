//! Correction δφ₂ from the evolution during the pulses, and its average
//! over the velocity distribution.

use statrs::distribution::{ContinuousCDF, Normal};

use super::{detuning, phi2_partial, DetuningMode};
use crate::error::{invalid, Result};
use crate::pauli::{compose_rotations, exp_pauli, PauliVector};
use crate::pulse::PulseSequence;
use crate::quadrature::QuadOptions;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseCorrection {
    /// Shift of the fringe phase, rad.
    pub delta_phi2: f64,
    /// Fringe amplitude factor.
    pub contrast: f64,
    /// θ at the three pulses.
    pub theta: [f64; 3],
    /// φ₂ at 0, T and 2T.
    pub phi2: [f64; 3],
    /// −4θ²(T) sin 2φ₂(T)
    pub leading: f64,
    /// Some |θ| exceeds 1.
    pub warning: bool,
}

/// n̂(φ) = (sin φ, 0, −cos φ) scaled by `a`.
fn axis(a: f64, phi: f64) -> PauliVector {
    PauliVector::real(0.0, a * phi.sin(), 0.0, -a * phi.cos())
}

/// Exact three-factor product for given pulse angles and phases.
pub fn pulse_correction_from_angles(theta: [f64; 3], phi2: [f64; 3]) -> Result<PulseCorrection> {
    if theta.iter().chain(&phi2).any(|x| !x.is_finite()) {
        return Err(invalid("pulse correction angles must be finite"));
    }
    let first = axis(-theta[0], phi2[0]);
    let middle = axis(2.0 * theta[1], phi2[1]);
    let last = axis(-theta[2], phi2[2]);
    let total = compose_rotations(&last, &compose_rotations(&middle, &first)?)?;
    let w = exp_pauli(&total)?.matrix;
    let c_cos = w[0][0].norm_sqr() - w[1][0].norm_sqr();
    let c_sin = 2.0 * (w[0][0] * w[1][0].conj()).re;
    Ok(PulseCorrection {
        delta_phi2: c_sin.atan2(c_cos),
        contrast: c_sin.hypot(c_cos),
        theta,
        phi2,
        leading: -4.0 * theta[1] * theta[1] * (2.0 * phi2[1]).sin(),
        warning: theta.iter().any(|t| t.abs() > 1.0),
    })
}

/// θ = τδ/2 with δ on the mean path at each pulse centre; φ₂ from quadrature.
pub fn pulse_correction_exact(seq: &PulseSequence, s: &Scenario, opts: &QuadOptions) -> Result<PulseCorrection> {
    if !seq.is_ideal() {
        return Err(invalid("the pulse correction is defined for ideal pulses only"));
    }
    let tau = seq.tau();
    let theta = seq.pulse_centers().map(|t| 0.5 * tau * detuning(s, t, DetuningMode::Exact));
    let t = seq.t_half();
    let phi2 = [0.0, phi2_partial(seq, s, t, opts)?, phi2_partial(seq, s, 2.0 * t, opts)?];
    pulse_correction_from_angles(theta, phi2)
}

fn van_der_corput(mut i: u64) -> f64 {
    let mut x = 0.0;
    let mut base = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            x += base;
        }
        base *= 0.5;
        i >>= 1;
    }
    x
}

/// `n` deterministic normal deviates: the base-2 van der Corput sequence,
/// shifted by half a cell, through the inverse normal CDF.
pub fn low_discrepancy_normal(n: usize, mean: f64, sigma: f64) -> Vec<f64> {
    let unit = Normal::new(0.0, 1.0).expect("standard normal");
    let shift = 0.5 / n as f64;
    (0..n as u64)
        .map(|i| {
            let u = (van_der_corput(i) + shift).fract();
            mean + sigma * unit.inverse_cdf(u)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityAverage {
    pub mean: f64,
    pub stderr: f64,
    pub max_abs: f64,
    pub samples: usize,
}

/// ⟨δφ₂⟩ over a Gaussian spread `sigma_v` of initial velocities about `v0`.
pub fn velocity_averaged_correction(
    seq: &PulseSequence,
    s: &Scenario,
    samples: usize,
    opts: &QuadOptions,
) -> Result<VelocityAverage> {
    let sigma = s.kin.sigma_v;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(invalid(format!("velocity spread must be ≥ 0, got {sigma}")));
    }
    if sigma == 0.0 {
        let d = pulse_correction_exact(seq, s, opts)?.delta_phi2;
        return Ok(VelocityAverage {
            mean: d,
            stderr: 0.0,
            max_abs: d.abs(),
            samples: 1,
        });
    }
    if samples < 100 {
        return Err(invalid(format!("velocity averaging needs at least 100 samples, got {samples}")));
    }
    let mut values = Vec::with_capacity(samples);
    for v in low_discrepancy_normal(samples, s.kin.v0, sigma) {
        let mut local = *s;
        local.kin.v0 = v;
        values.push(pulse_correction_exact(seq, &local, opts)?.delta_phi2);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(VelocityAverage {
        mean,
        stderr: (var / n).sqrt(),
        max_abs: values.iter().fold(0.0, |m, x| m.max(x.abs())),
        samples,
    })
}
