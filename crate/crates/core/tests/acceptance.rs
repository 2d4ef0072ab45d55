//! One line per acceptance criterion; exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use aiphase::dynamics::{
    compensation_quadratic, gradiometer_phase_by_difference, phi2_closed_form, phi2_psi2_quadrature,
    pulse_correction_from_angles, separation_quadratic, velocity_averaged_correction,
};
use aiphase::perturbation::{
    coherence_length, compensation_plan, epsilon2_series, epsilon_phases, separation_perturbative, PerturbingPotential,
};
use aiphase::report::{desk_scenario, run_fringe, Inputs, ScanParameter};
use aiphase::validators::{frame_hamiltonian, magnus_vs_oracle, mean_path_detuning, path_integral_decomposition, OracleOptions};
use aiphase::{AtomSpecies, PulseSequence, QuadOptions, Scenario, HBAR};
use rustfft::{num_complex::Complex, FftPlanner};

type Outcome = Result<(bool, String), aiphase::Error>;

const ETA_COEFF: f64 = (2.0 * PI - 4.0) / PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts() -> QuadOptions {
    QuadOptions::default()
}

fn reference_seq(tau: f64) -> PulseSequence {
    PulseSequence::ideal_rectangular(0.5, tau).expect("reference pulses")
}

fn c1_closed_form_vs_quadrature() -> Outcome {
    let (seq, s) = (reference_seq(5e-5), Scenario::reference());
    let q = phi2_psi2_quadrature(&seq, &s, &opts())?.phi2;
    let c = phi2_closed_form(&seq, &s).total();
    let r = rel(c, q);
    Ok((r <= 1e-6, format!("closed {c:.10e} quadrature {q:.10e} rel {r:.2e} (bound 1e-6)")))
}

fn c2_finite_duration_coefficient() -> Outcome {
    let mut s = Scenario::reference();
    s.pot.gamma = 0.0;
    let t = 0.5;
    let phi = |eta: f64| phi2_psi2_quadrature(&reference_seq(eta * t), &s, &opts()).map(|q| q.phi2);
    let (e1, e2) = (1e-4, 2e-4);
    let base = s.residual() * t * t;
    let coeff = -(phi(e2)? - phi(e1)?) / ((e2 - e1) * base);
    let r = rel(coeff, ETA_COEFF);
    Ok((r <= 1e-3, format!("coefficient {coeff:.8} vs (2π−4)/π = {ETA_COEFF:.8}, rel {r:.2e} (bound 1e-3)")))
}

fn c3_gradiometer() -> Outcome {
    let (seq, s) = (reference_seq(5e-5), Scenario::reference());
    let d = 1.0;
    let (k, gamma, t) = (s.laser.k, s.pot.gamma, seq.t_half());
    let expected = -k * gamma * d * t * t * (1.0 - ETA_COEFF * seq.eta());
    let closed = gradiometer_phase_by_difference(&seq, &s, d);
    let mut upper = s;
    upper.kin.z0 += d;
    let quad = phi2_psi2_quadrature(&seq, &upper, &opts())?.phi2 - phi2_psi2_quadrature(&seq, &s, &opts())?.phi2;
    let (rc, rq) = (rel(closed, expected), rel(quad, expected));
    Ok((
        rc <= 1e-12 && rq <= 1e-6,
        format!("expected {expected:.12e}; closed-form difference rel {rc:.2e} (bound 1e-12); quadrature difference rel {rq:.2e} (bound 1e-6)"),
    ))
}

fn c4_pulse_correction_scaling() -> Outcome {
    let phi_t = 0.3;
    let thetas = [0.005, 0.01, 0.02, 0.04];
    let mut pts = Vec::new();
    for th in thetas {
        let c = pulse_correction_from_angles([0.0, th, 0.0], [0.0, phi_t, 0.0])?;
        let leading = -4.0 * th * th * (2.0 * phi_t).sin();
        pts.push((th.ln(), (c.delta_phi2 - leading).abs().ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    Ok((
        (slope - 3.0).abs() <= 0.3,
        format!("log-log slope of the residual {slope:.3} (target 3 ± 0.3; θ(0) = θ(2T) = 0)"),
    ))
}

fn c5_velocity_washout() -> Outcome {
    let seq = PulseSequence::ideal_rectangular(0.5, 10e-6)?;
    let mut s = desk_scenario(&Scenario::reference());
    s.kin = s.kin.with_selection(100e-6, &s.laser)?;
    let avg = velocity_averaged_correction(&seq, &s, 4096, &opts())?;
    let bound = (3.0 * avg.stderr).max(1e-2 * avg.max_abs);
    Ok((
        avg.mean.abs() <= bound,
        format!(
            "|<δφ2>| {:.3e} vs max(3·stderr, 1e-2·max|δφ2|) = {bound:.3e} over {} samples",
            avg.mean.abs(),
            avg.samples
        ),
    ))
}

fn c6_magnus_termination() -> Outcome {
    let seq = reference_seq(5e-5);
    let s = desk_scenario(&Scenario::reference());
    let h = frame_hamiltonian(&seq, mean_path_detuning(&s), true);
    let d = magnus_vs_oracle(h, 0.0, seq.total_time(), &seq.knots(), &OracleOptions::default())?;
    Ok((d <= 1e-9, format!("max-entry |exp(M1+M2) − U_oracle| {d:.2e} (bound 1e-9)")))
}

fn c7_perturbative_consistency() -> Outcome {
    let seq = reference_seq(5e-5);
    let s = Scenario::reference();
    let closed = phi2_closed_form(&seq, &s);
    let gamma_linear = closed.position + closed.velocity + closed.gradient_gravity;
    let mut flat = s;
    flat.pot.gamma = 0.0;
    let v = PerturbingPotential::polynomial(vec![0.0, 0.0, -0.5 * s.atom.mass * s.pot.gamma])?;
    let eps = epsilon_phases(&seq, &flat, &v, &opts())?.phase_shift();
    let r = rel(eps, gamma_linear);
    Ok((r <= 1e-4, format!("2ε2 {eps:.10e} vs γ-linear closed form {gamma_linear:.10e}, rel {r:.2e} (bound 1e-4)")))
}

fn c8_series_termination() -> Outcome {
    let seq = reference_seq(5e-5);
    let s = Scenario::reference();
    let v = PerturbingPotential::polynomial(vec![0.0, 2e-26, -1e-27, 3e-28])?;
    let series = epsilon2_series(&seq, &s, &v, 4, &opts())?;
    let direct = epsilon_phases(&seq, &s, &v, &opts())?.phase_shift();
    let last = *series.partial_sums.last().expect("terms");
    let r = rel(last, direct);
    let ok = series.terms[1] != 0.0 && series.terms[2..].iter().all(|&t| t == 0.0) && r <= 1e-9;
    Ok((
        ok,
        format!("terms {:?}; partial sum vs 2ε2 rel {r:.2e} (bound 1e-9)", series.terms.iter().map(|t| format!("{t:.3e}")).collect::<Vec<_>>()),
    ))
}

/// Two classical arms in mgz + βz³ with velocity kicks ±v_r at 0, T, 2T,
/// integrated by RK4; returns (Δz, Δp) at 2T beyond the nominal kicks.
fn cubic_arm_oracle(s: &Scenario, beta: f64, t_half: f64, steps: usize) -> (f64, f64) {
    let (m, g, vr) = (s.atom.mass, s.pot.g, s.recoil_velocity());
    let acc = |z: f64| -g - 3.0 * beta * z * z / m;
    let step = |(z, v): (f64, f64), h: f64| {
        let (k1z, k1v) = (v, acc(z));
        let (k2z, k2v) = (v + 0.5 * h * k1v, acc(z + 0.5 * h * k1z));
        let (k3z, k3v) = (v + 0.5 * h * k2v, acc(z + 0.5 * h * k2z));
        let (k4z, k4v) = (v + h * k3v, acc(z + h * k3z));
        (z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z), v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))
    };
    let run = |mut y: (f64, f64), kick_mid: f64| {
        let h = t_half / steps as f64;
        for _ in 0..steps {
            y = step(y, h);
        }
        y.1 += kick_mid;
        for _ in 0..steps {
            y = step(y, h);
        }
        y
    };
    let (z0, v0) = (s.kin.z0, s.kin.v0);
    let upper = run((z0, v0 + vr), -vr);
    let lower = run((z0, v0), vr);
    (upper.0 - lower.0, m * (upper.1 - lower.1 + vr))
}

const CUBIC_RATIO_THRESHOLD: f64 = 0.25;

fn c9_separation_and_ratio() -> Outcome {
    let s = Scenario::reference();
    let t = 0.5;
    let finite = separation_quadratic(&reference_seq(1e-4 * t), &s, &opts())?;
    let (rz, rp) = (rel(finite.dz, finite.dz_leading), rel(finite.dp, finite.dp_leading));
    let sharp = separation_quadratic(&reference_seq(0.0), &s, &opts())?;
    let ratio = sharp.ratio_time.expect("nonzero Δp");
    let rr = (ratio - t).abs() / t;

    let mut flat = s;
    flat.pot.gamma = 0.0;
    let beta = 1e-30;
    let v = PerturbingPotential::polynomial(vec![0.0, 0.0, 0.0, beta])?;
    let cubic = separation_perturbative(&reference_seq(0.0), &flat, &v, &opts())?;
    let cubic_ratio = cubic.ratio_time.expect("nonzero Δp");
    let (odz, odp) = cubic_arm_oracle(&flat, beta, t, 20_000);
    let oracle_ratio = flat.atom.mass * odz / odp;
    let dev = (cubic_ratio - t).abs() / t;
    let ok = rz <= 1e-6 && rp <= 1e-6 && rr <= 1e-9 && dev > CUBIC_RATIO_THRESHOLD && rel(cubic_ratio, oracle_ratio) < 1e-2;
    Ok((
        ok,
        format!(
            "η = 1e-4: Δz rel {rz:.2e}, Δp rel {rp:.2e} (bound 1e-6); η → 0 ratio rel {rr:.2e} (bound 1e-9); \
             cubic |ratio − T|/T {dev:.6} (threshold {CUBIC_RATIO_THRESHOLD}), RK4 arm oracle ratio {oracle_ratio:.6} vs {cubic_ratio:.6}"
        ),
    ))
}

fn c10_compensation() -> Outcome {
    let seq = PulseSequence::ideal_rectangular(1.0, 0.0)?;
    let s = Scenario::reference();
    let q = compensation_quadratic(&seq, &s, &opts())?;
    let rq = q.dz_after.abs() / q.dz_before.abs();
    let mut flat = s;
    flat.pot.gamma = 0.0;
    let v = PerturbingPotential::polynomial(vec![0.0, 0.0, 0.0, 1e-30])?;
    let sep = separation_perturbative(&seq, &flat, &v, &opts())?;
    let plan = compensation_plan(&sep, &seq, &flat)?;
    let (rz, rp) = (plan.residual_dz.abs() / sep.dz.abs(), plan.residual_dp.abs() / sep.dp.abs());
    Ok((
        rq <= 1e-12 && rz <= 1e-12 && rp <= 1e-12 && plan.kick_pi != 0.0 && plan.kick_final != 0.0,
        format!(
            "single kick δv_r/v_r = {:.3e}: Δz residual {rq:.2e}; two-kick plan residuals Δz {rz:.2e}, Δp {rp:.2e} (bound 1e-12)",
            q.delta_vr_over_vr
        ),
    ))
}

fn c11_path_integral() -> Outcome {
    let seq = reference_seq(0.0);
    let mut worst_total: f64 = 0.0;
    let mut worst_prop: f64 = 0.0;
    let mut d2_exact = true;
    for alpha in [0.0, 1.2e8, 1.57e8] {
        let mut s = Scenario::reference();
        s.laser.alpha = alpha;
        let b = path_integral_decomposition(&seq, &s, &PerturbingPotential::zero(), &opts())?;
        let q = phi2_psi2_quadrature(&seq, &s, &opts())?.phi2;
        worst_total = worst_total.max(rel(b.total, q));
        worst_prop = worst_prop.max(b.propagation_term.abs() / q.abs());
        d2_exact &= b.d2_laser == b.chirp_phase;
    }
    Ok((
        worst_total <= 1e-8 && worst_prop <= 1e-8 && d2_exact,
        format!(
            "δφ_p/|φ2| {worst_prop:.2e}, total vs quadrature rel {worst_total:.2e} (bound 1e-8); D2[φ_L] = αT² exactly: {d2_exact}"
        ),
    ))
}

fn c12_coherence_length() -> Outcome {
    let lc = coherence_length(AtomSpecies::RB87_MASS, 1.0);
    let want = (HBAR * 1.0 / AtomSpecies::RB87_MASS).sqrt();
    Ok(((lc - 27e-6).abs() <= 1e-6 && lc == want, format!("√(ħT/m) = {:.3} µm (target 27 ± 1 µm)", lc * 1e6)))
}

/// Period of a sampled fringe: FFT peak for the coarse value, refined by a
/// least-squares line through the mid-level crossings.
fn fringe_period(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = y.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let peak = (1..n / 2).max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm())).expect("spectrum");
    let span = x[n - 1] - x[0];
    let coarse = span * n as f64 / ((n - 1) as f64 * peak as f64);

    let crossings: Vec<f64> = (0..n - 1)
        .filter(|&i| (y[i] - 0.5) * (y[i + 1] - 0.5) < 0.0)
        .map(|i| x[i] + (0.5 - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
        .collect();
    let m = crossings.len() as f64;
    let ki = (0..crossings.len()).map(|k| k as f64);
    let kbar = ki.clone().sum::<f64>() / m;
    let cbar = crossings.iter().sum::<f64>() / m;
    let slope = ki.clone().zip(&crossings).map(|(k, c)| (k - kbar) * (c - cbar)).sum::<f64>()
        / ki.map(|k| (k - kbar).powi(2)).sum::<f64>();
    (coarse, 2.0 * slope.abs())
}

fn c13_fringe_period() -> Outcome {
    let mut s = Scenario::reference();
    s.pot.gamma = 0.0;
    let t = 0.5;
    let inp = Inputs::new(reference_seq(0.0), s);
    let period = 2.0 * PI / (t * t);
    let kg = s.laser.k * s.pot.g;
    let (from, to) = (kg - 3.05 * period, kg + 3.05 * period);
    let rows = run_fringe(&inp, ScanParameter::Alpha, from, to, 4001)?;
    let x: Vec<f64> = rows.iter().map(|r| r.scan_value).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.p21).collect();
    let (coarse, fine) = fringe_period(&x, &y);
    let r = rel(fine, period);
    Ok((
        r <= 1e-6 && rel(coarse, period) < 0.2,
        format!("period {fine:.10} (FFT {coarse:.4}) vs 2π/T² = {period:.10}, rel {r:.2e} over {:.1} periods (bound 1e-6)", (to - from) / period),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("closed form vs quadrature", c1_closed_form_vs_quadrature),
        ("finite-duration coefficient", c2_finite_duration_coefficient),
        ("gradiometer", c3_gradiometer),
        ("pulse correction scaling", c4_pulse_correction_scaling),
        ("velocity washout", c5_velocity_washout),
        ("Magnus termination", c6_magnus_termination),
        ("perturbative consistency", c7_perturbative_consistency),
        ("series termination", c8_series_termination),
        ("separation and ratio", c9_separation_and_ratio),
        ("compensation", c10_compensation),
        ("path-integral equivalence", c11_path_integral),
        ("coherence length", c12_coherence_length),
        ("fringe period", c13_fringe_period),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {}: {} {name}: {detail} [{secs:.2} s]", i + 1, if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
