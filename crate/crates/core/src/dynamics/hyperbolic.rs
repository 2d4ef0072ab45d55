//! The functions of √γ t that appear in the quadratic-potential solution,
//! evaluated by power series near the origin so that γ → 0 and γ < 0 need
//! no special casing:
//!
//! - `c`   = cosh √γ t
//! - `s1`  = sinh(√γ t)/√γ
//! - `s1x` = s1 − t
//! - `q`   = (c − 1)/γ
//! - `qx`  = q − t²/2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub c: f64,
    pub s1: f64,
    pub s1x: f64,
    pub q: f64,
    pub qx: f64,
}

pub fn hyper(gamma: f64, t: f64) -> Hyper {
    let u = gamma * t * t;
    if u.abs() <= 1.0 {
        // Σ uⁿ/(2n)!, Σ uⁿ/(2n+1)!, Σ uⁿ/(2n+2)! with the n = 0 terms split off
        let mut c_tail = 0.0;
        let mut s_tail = 0.0;
        let mut q_tail = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0; // (2n)!
        for n in 1..30 {
            pow *= u;
            let m = 2 * n;
            fact *= (m - 1) as f64 * m as f64;
            let tc = pow / fact;
            let ts = tc / (m + 1) as f64;
            let tq = ts / (m + 2) as f64;
            c_tail += tc;
            s_tail += ts;
            q_tail += tq;
            if tc.abs() <= 1e-18 * (1.0 + c_tail.abs()) {
                break;
            }
        }
        let t2 = t * t;
        Hyper {
            c: 1.0 + c_tail,
            s1: t + t * s_tail,
            s1x: t * s_tail,
            q: 0.5 * t2 + t2 * q_tail,
            qx: t2 * q_tail,
        }
    } else {
        let (c, s1) = if gamma > 0.0 {
            let r = gamma.sqrt();
            ((r * t).cosh(), (r * t).sinh() / r)
        } else {
            let r = (-gamma).sqrt();
            ((r * t).cos(), (r * t).sin() / r)
        };
        let q = (c - 1.0) / gamma;
        Hyper {
            c,
            s1,
            s1x: s1 - t,
            q,
            qx: q - 0.5 * t * t,
        }
    }
}
