//! Pulse shapes, cumulative pulse area φ1(t), the sensitivity function
//! sin φ1(t) and its primitive S(t).

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::erf::erf;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Rabi frequency profile of one pulse over its window. Times are measured
/// from the start of the window.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    Rectangular { omega0: f64 },
    /// Gaussian centred in the window and truncated at its edges.
    Gaussian { peak: f64, rms_width: f64 },
    /// Piecewise-linear samples `(time, omega)`, zero outside the sampled span.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl PulseShape {
    /// Parses two whitespace-separated columns `time_s omega_rad_per_s`;
    /// blank lines and `#` comments are skipped.
    pub fn tabulated_from_text(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(invalid(format!("pulse table line {}: expected 2 columns, got {}", lineno + 1, cols.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| invalid(format!("pulse table line {}: {s:?} is not a number", lineno + 1)))
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        let shape = Self::Tabulated { samples };
        shape.validate(f64::INFINITY)?;
        Ok(shape)
    }

    fn validate(&self, window: f64) -> Result<()> {
        match self {
            Self::Rectangular { omega0 } => {
                if !(omega0.is_finite() && *omega0 >= 0.0) {
                    return Err(invalid(format!("rectangular Rabi frequency must be finite and ≥ 0, got {omega0}")));
                }
            }
            Self::Gaussian { peak, rms_width } => {
                if !(peak.is_finite() && *peak >= 0.0) {
                    return Err(invalid(format!("Gaussian peak must be finite and ≥ 0, got {peak}")));
                }
                if !(rms_width.is_finite() && *rms_width > 0.0) {
                    return Err(invalid(format!("Gaussian rms width must be positive, got {rms_width}")));
                }
            }
            Self::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(invalid("tabulated pulse needs at least two samples"));
                }
                for w in samples.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(invalid(format!("tabulated pulse times must increase strictly ({} then {})", w[0].0, w[1].0)));
                    }
                }
                for &(t, om) in samples {
                    if !(t.is_finite() && om.is_finite()) {
                        return Err(invalid("tabulated pulse samples must be finite"));
                    }
                    if om < 0.0 {
                        return Err(invalid(format!("tabulated Rabi frequency must be ≥ 0, got {om} at t = {t}")));
                    }
                }
                let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
                if first < 0.0 || last > window * (1.0 + 1e-12) {
                    return Err(invalid(format!(
                        "tabulated pulse spans [{first}, {last}] s, outside its window [0, {window}] s"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ω at time `s` into a window of length `window`.
    pub fn omega(&self, s: f64, window: f64) -> f64 {
        if s < 0.0 || s > window {
            return 0.0;
        }
        match self {
            Self::Rectangular { omega0 } => *omega0,
            Self::Gaussian { peak, rms_width } => {
                let x = (s - 0.5 * window) / rms_width;
                peak * (-0.5 * x * x).exp()
            }
            Self::Tabulated { samples } => {
                let i = samples.partition_point(|p| p.0 <= s);
                if i == 0 || i == samples.len() {
                    return if s == samples[samples.len() - 1].0 { samples[samples.len() - 1].1 } else { 0.0 };
                }
                let (t0, w0) = samples[i - 1];
                let (t1, w1) = samples[i];
                w0 + (w1 - w0) * (s - t0) / (t1 - t0)
            }
        }
    }

    /// ∫₀ˢ Ω over a window of length `window`.
    pub fn area(&self, s: f64, window: f64) -> f64 {
        let s = s.clamp(0.0, window);
        match self {
            Self::Rectangular { omega0 } => omega0 * s,
            Self::Gaussian { peak, rms_width } => {
                let c = 0.5 * window;
                let k = std::f64::consts::SQRT_2 * rms_width;
                peak * rms_width * (PI / 2.0).sqrt() * (erf((s - c) / k) - erf(-c / k))
            }
            Self::Tabulated { samples } => {
                let mut acc = 0.0;
                for w in samples.windows(2) {
                    let (t0, w0) = w[0];
                    let (t1, w1) = w[1];
                    if s <= t0 {
                        break;
                    }
                    let te = s.min(t1);
                    let we = w0 + (w1 - w0) * (te - t0) / (t1 - t0);
                    acc += 0.5 * (w0 + we) * (te - t0);
                }
                acc
            }
        }
    }
}

/// Gaussian filling a window with ±4σ truncation and exact total area.
pub fn gaussian_with_area(area: f64, window: f64) -> PulseShape {
    let rms_width = window / 8.0;
    let unit = PulseShape::Gaussian { peak: 1.0, rms_width }.area(window, window);
    PulseShape::Gaussian {
        peak: area / unit,
        rms_width,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SegmentKind {
    Free,
    Pulse(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    start: f64,
    end: f64,
    kind: SegmentKind,
    phi1_start: f64,
    s_start: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub pulse: Option<usize>,
}

/// Timing and shape of the π/2–π–π/2 sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    t_half: f64,
    tau: f64,
    shapes: [PulseShape; 3],
    ideal: bool,
    segments: Vec<Segment>,
}

const IDEAL_AREAS: [f64; 3] = [FRAC_PI_2, PI, FRAC_PI_2];

impl PulseSequence {
    /// `t_half` is T, `tau` the π/2 duration (the π pulse lasts 2τ). With
    /// `tau = 0` the pulses are instantaneous, which requires `ideal`.
    pub fn new(t_half: f64, tau: f64, shapes: [PulseShape; 3], ideal: bool) -> Result<Self> {
        if !(t_half.is_finite() && t_half > 0.0) {
            return Err(invalid(format!("T must be positive, got {t_half}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(invalid(format!("tau must be ≥ 0, got {tau}")));
        }
        if !(2.0 * tau < t_half) {
            return Err(invalid(format!("pulses overlap: 2τ = {} s is not below T = {t_half} s", 2.0 * tau)));
        }
        if tau == 0.0 && !ideal {
            return Err(invalid("instantaneous pulses (tau = 0) are only defined for ideal sequences"));
        }
        let mut seq = Self {
            t_half,
            tau,
            shapes,
            ideal,
            segments: Vec::new(),
        };
        if tau > 0.0 {
            for (i, shape) in seq.shapes.iter().enumerate() {
                shape.validate(seq.window_len(i))?;
            }
            if ideal {
                for i in 0..3 {
                    let a = seq.pulse_area(i);
                    if (a - IDEAL_AREAS[i]).abs() > 1e-9 {
                        return Err(invalid(format!(
                            "pulse {} is flagged ideal but has area {a} rad instead of {}",
                            i + 1,
                            IDEAL_AREAS[i]
                        )));
                    }
                }
            }
        }
        seq.build_segments()?;
        Ok(seq)
    }

    /// Ideal rectangular pulses with a common Rabi frequency π/(2τ).
    pub fn ideal_rectangular(t_half: f64, tau: f64) -> Result<Self> {
        let omega0 = if tau > 0.0 { FRAC_PI_2 / tau } else { 0.0 };
        let shape = PulseShape::Rectangular { omega0 };
        Self::new(t_half, tau, [shape.clone(), shape.clone(), shape], true)
    }

    /// Ideal Gaussian pulses, σ an eighth of each window.
    pub fn ideal_gaussian(t_half: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Self::ideal_rectangular(t_half, tau);
        }
        let shapes = [
            gaussian_with_area(FRAC_PI_2, tau),
            gaussian_with_area(PI, 2.0 * tau),
            gaussian_with_area(FRAC_PI_2, tau),
        ];
        Self::new(t_half, tau, shapes, true)
    }

    pub fn t_half(&self) -> f64 {
        self.t_half
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eta(&self) -> f64 {
        self.tau / self.t_half
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    pub fn shapes(&self) -> &[PulseShape; 3] {
        &self.shapes
    }

    pub fn total_time(&self) -> f64 {
        2.0 * self.t_half
    }

    pub fn is_rectangular(&self) -> bool {
        self.tau == 0.0 || self.shapes.iter().all(|s| matches!(s, PulseShape::Rectangular { .. }))
    }

    /// Pulse supports `[0, τ]`, `[T−τ, T+τ]`, `[2T−τ, 2T]`.
    pub fn windows(&self) -> [(f64, f64); 3] {
        let (t, tau) = (self.t_half, self.tau);
        [(0.0, tau), (t - tau, t + tau), (2.0 * t - tau, 2.0 * t)]
    }

    pub fn pulse_centers(&self) -> [f64; 3] {
        let (t, tau) = (self.t_half, self.tau);
        [0.5 * tau, t, 2.0 * t - 0.5 * tau]
    }

    fn window_len(&self, i: usize) -> f64 {
        if i == 1 {
            2.0 * self.tau
        } else {
            self.tau
        }
    }

    fn pulse_area(&self, i: usize) -> f64 {
        if self.tau == 0.0 {
            return IDEAL_AREAS[i];
        }
        self.shapes[i].area(self.window_len(i), self.window_len(i))
    }

    /// The six pulse edges, or `[0, T, 2T]` for instantaneous pulses.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.tau == 0.0 {
            return vec![0.0, self.t_half, 2.0 * self.t_half];
        }
        let w = self.windows();
        vec![w[0].0, w[0].1, w[1].0, w[1].1, w[2].0, w[2].1]
    }

    /// Pulse edges plus the sample times of tabulated shapes: every point
    /// where Ω or its derivative may jump.
    pub fn knots(&self) -> Vec<f64> {
        let mut knots = self.breakpoints();
        if self.tau > 0.0 {
            for (shape, (start, _)) in self.shapes.iter().zip(self.windows()) {
                if let PulseShape::Tabulated { samples } = shape {
                    knots.extend(samples.iter().map(|p| start + p.0));
                }
            }
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        knots
    }

    /// Smooth pieces of [0, 2T] with the index of the pulse covering each,
    /// `None` on free evolution.
    pub fn intervals(&self) -> Vec<Interval> {
        self.segments
            .iter()
            .map(|s| Interval {
                start: s.start,
                end: s.end,
                pulse: match s.kind {
                    SegmentKind::Free => None,
                    SegmentKind::Pulse(i) => Some(i),
                },
            })
            .collect()
    }

    fn build_segments(&mut self) -> Result<()> {
        let mut segments = Vec::new();
        let edges = self.breakpoints();
        let mut phi1 = 0.0;
        let mut s_acc = 0.0;
        if self.tau == 0.0 {
            let t = self.t_half;
            segments.push(Segment { start: 0.0, end: t, kind: SegmentKind::Free, phi1_start: FRAC_PI_2, s_start: 0.0 });
            segments.push(Segment { start: t, end: 2.0 * t, kind: SegmentKind::Free, phi1_start: 1.5 * PI, s_start: t });
            self.segments = segments;
            return Ok(());
        }
        for (n, w) in edges.windows(2).enumerate() {
            let kind = if n % 2 == 0 { SegmentKind::Pulse(n / 2) } else { SegmentKind::Free };
            segments.push(Segment { start: w[0], end: w[1], kind, phi1_start: phi1, s_start: s_acc });
            let seg = segments[segments.len() - 1];
            s_acc += self.segment_s_integral(&seg, w[1])?;
            if let SegmentKind::Pulse(i) = kind {
                phi1 += self.pulse_area(i);
            }
        }
        self.segments = segments;
        Ok(())
    }

    /// ∫ sin φ1 from the segment start to `t`.
    fn segment_s_integral(&self, seg: &Segment, t: f64) -> Result<f64> {
        let dt = t - seg.start;
        if dt <= 0.0 {
            return Ok(0.0);
        }
        match seg.kind {
            SegmentKind::Free => Ok(seg.phi1_start.sin() * dt),
            SegmentKind::Pulse(i) => match self.shapes[i] {
                PulseShape::Rectangular { omega0 } if omega0 > 0.0 => {
                    let a0 = seg.phi1_start;
                    Ok((a0.cos() - (a0 + omega0 * dt).cos()) / omega0)
                }
                PulseShape::Rectangular { .. } => Ok(seg.phi1_start.sin() * dt),
                _ => {
                    let len = self.window_len(i);
                    let shape = &self.shapes[i];
                    let a0 = seg.phi1_start;
                    let f = |s: f64| (a0 + shape.area(s, len)).sin();
                    match shape {
                        PulseShape::Tabulated { samples } => {
                            let mut acc = 0.0;
                            let mut lo = 0.0;
                            for &(ts, _) in samples.iter().filter(|p| p.0 > 0.0 && p.0 < dt) {
                                acc += integrate(f, lo, ts, &QuadOptions::with_tol(1e-13))?;
                                lo = ts;
                            }
                            Ok(acc + integrate(f, lo, dt, &QuadOptions::with_tol(1e-13))?)
                        }
                        _ => integrate(f, 0.0, dt, &QuadOptions::with_tol(1e-13)),
                    }
                }
            },
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.total_time()) {
            return Err(Error::TimeOutOfRange { t, end: self.total_time() });
        }
        Ok(())
    }

    fn segment_at(&self, t: f64) -> &Segment {
        let i = self.segments.partition_point(|s| s.end < t);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// Cumulative pulse area φ1(t) = ∫₀ᵗ Ω.
    pub fn phi1(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if self.tau == 0.0 {
            let tt = self.t_half;
            return Ok(if t == 0.0 {
                0.0
            } else if t < tt {
                FRAC_PI_2
            } else if t == tt {
                PI
            } else if t < 2.0 * tt {
                1.5 * PI
            } else {
                2.0 * PI
            });
        }
        let seg = self.segment_at(t);
        Ok(match seg.kind {
            SegmentKind::Free => seg.phi1_start,
            SegmentKind::Pulse(i) => {
                let len = self.window_len(i);
                let dt = if t >= seg.end { len } else { t - seg.start };
                seg.phi1_start + self.shapes[i].area(dt, len)
            }
        })
    }

    /// Rabi frequency Ω(t).
    pub fn omega(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if self.tau == 0.0 {
            return Ok(0.0);
        }
        let seg = self.segment_at(t);
        Ok(match seg.kind {
            SegmentKind::Free => 0.0,
            SegmentKind::Pulse(i) => self.shapes[i].omega(t - seg.start, self.window_len(i)),
        })
    }

    /// Sensitivity function sin φ1(t).
    pub fn sensitivity(&self, t: f64) -> Result<f64> {
        Ok(self.phi1(t)?.sin())
    }

    pub fn cos_phi1(&self, t: f64) -> Result<f64> {
        Ok(self.phi1(t)?.cos())
    }

    /// S(t) = ∫₀ᵗ sin φ1.
    pub fn sensitivity_primitive(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let seg = *self.segment_at(t);
        Ok(seg.s_start + self.segment_s_integral(&seg, t)?)
    }

    /// δφ1 = φ1(2T) − 2π.
    pub fn pulse_area_defect(&self) -> f64 {
        (0..3).map(|i| self.pulse_area(i)).sum::<f64>() - 2.0 * PI
    }

    /// Ideal copy of this sequence with the same timing.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        if self.is_rectangular() {
            Self::ideal_rectangular(self.t_half, tau)
        } else {
            Self::ideal_gaussian(self.t_half, tau)
        }
    }
}
