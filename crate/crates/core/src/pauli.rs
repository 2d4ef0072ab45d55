//! Exact algebra of 2×2 complex operators in the Pauli basis.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Dense 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The operator `a0·I + ax·σ1 + ay·σ2 + az·σ3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector {
    pub a0: Complex64,
    pub ax: Complex64,
    pub ay: Complex64,
    pub az: Complex64,
}

impl Default for PauliVector {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PauliVector {
    pub const ZERO: Self = Self {
        a0: ZERO,
        ax: ZERO,
        ay: ZERO,
        az: ZERO,
    };

    pub fn new(a0: Complex64, ax: Complex64, ay: Complex64, az: Complex64) -> Self {
        Self { a0, ax, ay, az }
    }

    pub fn real(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self::new(a0.into(), ax.into(), ay.into(), az.into())
    }

    pub fn from_vector(a0: Complex64, v: [Complex64; 3]) -> Self {
        Self::new(a0, v[0], v[1], v[2])
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 0.0)
    }

    /// σ1, σ2 or σ3 for `axis` in 1..=3.
    pub fn sigma(axis: usize) -> Result<Self> {
        match axis {
            1 => Ok(Self::real(0.0, 1.0, 0.0, 0.0)),
            2 => Ok(Self::real(0.0, 0.0, 1.0, 0.0)),
            3 => Ok(Self::real(0.0, 0.0, 0.0, 1.0)),
            _ => Err(invalid(format!("Pauli axis must be 1, 2 or 3, got {axis}"))),
        }
    }

    pub fn vector(&self) -> [Complex64; 3] {
        [self.ax, self.ay, self.az]
    }

    pub fn with_vector(&self, v: [Complex64; 3]) -> Self {
        Self::from_vector(self.a0, v)
    }

    /// Real parts of the σ coefficients.
    pub fn real_vector(&self) -> [f64; 3] {
        [self.ax.re, self.ay.re, self.az.re]
    }

    fn coeffs(&self) -> [Complex64; 4] {
        [self.a0, self.ax, self.ay, self.az]
    }

    /// Hermitian operators have all four coefficients real.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.coeffs().iter().all(|c| c.im.abs() <= tol)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.coeffs().iter().all(|c| c.re.abs() <= tol)
    }

    pub fn dagger(&self) -> Self {
        Self::new(self.a0.conj(), self.ax.conj(), self.ay.conj(), self.az.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    pub fn trace(&self) -> Complex64 {
        self.a0 * 2.0
    }

    pub fn to_matrix(&self) -> Mat2 {
        [
            [self.a0 + self.az, self.ax - I * self.ay],
            [self.ax + I * self.ay, self.a0 - self.az],
        ]
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        Self {
            a0: (m[0][0] + m[1][1]) * 0.5,
            ax: (m[0][1] + m[1][0]) * 0.5,
            ay: (m[1][0] - m[0][1]) * (-0.5 * I),
            az: (m[0][0] - m[1][1]) * 0.5,
        }
    }

    /// Operator product `A·B`.
    pub fn product(&self, other: &Self) -> Self {
        let a = self.vector();
        let b = other.vector();
        let c = cross(&a, &b);
        let a0 = self.a0 * other.a0 + dot(&a, &b);
        let v = [0, 1, 2].map(|k| self.a0 * b[k] + other.a0 * a[k] + I * c[k]);
        Self::from_vector(a0, v)
    }

    /// `[A, B] = 2i (a × b)·σ`.
    pub fn commutator(&self, other: &Self) -> Self {
        let c = cross(&self.vector(), &other.vector());
        Self::from_vector(ZERO, c.map(|x| x * 2.0 * I))
    }
}

pub(crate) fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Add for PauliVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.ax + o.ax, self.ay + o.ay, self.az + o.az)
    }
}

impl Sub for PauliVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.ax - o.ax, self.ay - o.ay, self.az - o.az)
    }
}

impl Neg for PauliVector {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for PauliVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.a0 * s, self.ax * s, self.ay * s, self.az * s)
    }
}

impl Mul<Complex64> for PauliVector {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        Self::new(self.a0 * s, self.ax * s, self.ay * s, self.az * s)
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cij) in row.iter_mut().enumerate() {
            *cij = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Max-entry distance between two matrices.
pub fn mat_max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn mat_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// A 2×2 unitary matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    pub matrix: Mat2,
}

impl Unitary2 {
    pub fn identity() -> Self {
        Self {
            matrix: mat_identity(),
        }
    }

    /// Wraps a matrix after checking unitarity to `tol`.
    pub fn try_from_matrix(matrix: Mat2, tol: f64) -> Result<Self> {
        let u = Self { matrix };
        let defect = u.unitarity_defect();
        if defect > tol {
            return Err(invalid(format!("matrix is not unitary: |U†U - I| = {defect:.3e}")));
        }
        Ok(u)
    }

    pub(crate) fn from_matrix_unchecked(matrix: Mat2) -> Self {
        Self { matrix }
    }

    pub fn compose(&self, right: &Self) -> Self {
        Self {
            matrix: mat_mul(&self.matrix, &right.matrix),
        }
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: mat_dagger(&self.matrix),
        }
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `max |U†U − I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        mat_max_diff(&mat_mul(&mat_dagger(&self.matrix), &self.matrix), &mat_identity())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        mat_max_diff(&self.matrix, &other.matrix)
    }

    pub fn to_pauli(&self) -> PauliVector {
        PauliVector::from_matrix(&self.matrix)
    }

    /// Nearest unitary in the polar sense, `U (U†U)^{-1/2}`.
    pub fn polar_project(matrix: &Mat2) -> Result<Self> {
        let p = mat_mul(&mat_dagger(matrix), matrix);
        let det = (p[0][0] * p[1][1] - p[0][1] * p[1][0]).re;
        if !(det > 0.0) {
            return Err(invalid("polar projection of a singular matrix"));
        }
        let s = det.sqrt();
        let t = ((p[0][0] + p[1][1]).re + 2.0 * s).sqrt();
        // √P = (P + s I)/t, and its inverse for a 2×2 positive matrix.
        let sq = [
            [(p[0][0] + s) / t, p[0][1] / t],
            [p[1][0] / t, (p[1][1] + s) / t],
        ];
        let d = sq[0][0] * sq[1][1] - sq[0][1] * sq[1][0];
        let inv = [[sq[1][1] / d, -sq[0][1] / d], [-sq[1][0] / d, sq[0][0] / d]];
        Ok(Self {
            matrix: mat_mul(matrix, &inv),
        })
    }

    /// Principal logarithm: the real Pauli vector `r` with `U = exp(i(r0 + r⃗·σ))`,
    /// rotation angle `|r⃗|` in `[0, π]`.
    pub fn log(&self) -> PauliVector {
        let phase = self.det().arg() * 0.5;
        let v = PauliVector::from_matrix(&self.matrix) * Complex64::from_polar(1.0, -phase);
        su2_log(phase, v.a0.re, [v.ax.im, v.ay.im, v.az.im])
    }
}

/// Logarithm of `e^{iφ}(w I + i v⃗·σ)` with `w² + |v⃗|² = 1`.
fn su2_log(phase: f64, w: f64, v: [f64; 3]) -> PauliVector {
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if s == 0.0 {
        // ±I: fold the sign into the phase
        let extra = if w < 0.0 { std::f64::consts::PI } else { 0.0 };
        return PauliVector::real(phase + extra, 0.0, 0.0, 0.0);
    }
    let angle = s.atan2(w);
    let f = angle / s;
    PauliVector::real(phase, f * v[0], f * v[1], f * v[2])
}

/// `sin(x)/x`, exact at the origin.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn require_real(n: &PauliVector, what: &str) -> Result<()> {
    if !n.is_hermitian(0.0) {
        return Err(invalid(format!("{what}: generator coefficients must be real")));
    }
    if !n.coeffs().iter().all(|c| c.re.is_finite()) {
        return Err(invalid(format!("{what}: generator coefficients must be finite")));
    }
    Ok(())
}

/// `exp(i(a0 I + n⃗·σ)) = e^{i a0}(I cos n + i σ·n̂ sin n)`.
pub fn exp_pauli(n: &PauliVector) -> Result<Unitary2> {
    require_real(n, "exp_pauli")?;
    let v = n.real_vector();
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let sc = sinc(len);
    let w = Complex64::new(len.cos(), 0.0);
    let op = PauliVector::new(w, I * sc * v[0], I * sc * v[1], I * sc * v[2]);
    let phase = Complex64::from_polar(1.0, n.a0.re);
    Ok(Unitary2::from_matrix_unchecked((op * phase).to_matrix()))
}

/// `exp(A)` for an arbitrary complex Pauli vector `A = a0 + a⃗·σ`:
/// `e^{a0}(cosh s + (sinh s / s) a⃗·σ)` with `s² = a⃗·a⃗`.
pub fn exp_operator(a: &PauliVector) -> Mat2 {
    let v = a.vector();
    let s2 = dot(&v, &v);
    let (c, sh) = if s2.norm() < 1e-6 {
        (
            ONE + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0,
            ONE + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0,
        )
    } else {
        let s = s2.sqrt();
        (s.cosh(), s.sinh() / s)
    };
    let op = PauliVector::new(c, sh * v[0], sh * v[1], sh * v[2]) * a.a0.exp();
    op.to_matrix()
}

/// `exp(M)` for an anti-Hermitian `M`; the result is unitary.
pub fn exp_anti_hermitian(m: &PauliVector, tol: f64) -> Result<Unitary2> {
    if !m.is_anti_hermitian(tol) {
        return Err(invalid("exp_anti_hermitian: generator has a Hermitian part"));
    }
    let n = PauliVector::real(m.a0.im, m.ax.im, m.ay.im, m.az.im);
    exp_pauli(&n)
}

/// Pauli vector `r` with `exp(i r·σ) = exp(i n·σ) exp(i m·σ)`, from the closed
/// cos/sin/cross-product product formula followed by the principal logarithm.
pub fn compose_rotations(n: &PauliVector, m: &PauliVector) -> Result<PauliVector> {
    require_real(n, "compose_rotations")?;
    require_real(m, "compose_rotations")?;
    let a = n.real_vector();
    let b = m.real_vector();
    let la = norm3(&a);
    let lb = norm3(&b);
    let (ca, sa) = (la.cos(), sinc(la));
    let (cb, sb) = (lb.cos(), sinc(lb));
    // sin|a| â = sa·a⃗, likewise for b
    let ua = a.map(|x| sa * x);
    let ub = b.map(|x| sb * x);
    let w = ca * cb - (ua[0] * ub[0] + ua[1] * ub[1] + ua[2] * ub[2]);
    let c = [
        ua[1] * ub[2] - ua[2] * ub[1],
        ua[2] * ub[0] - ua[0] * ub[2],
        ua[0] * ub[1] - ua[1] * ub[0],
    ];
    let v = [0, 1, 2].map(|k| cb * ua[k] + ca * ub[k] - c[k]);
    let phase = n.a0.re + m.a0.re;
    let op = PauliVector::new(w.into(), I * v[0], I * v[1], I * v[2]) * Complex64::from_polar(1.0, phase);
    let pv = PauliVector::from_matrix(&op.to_matrix()) * Complex64::from_polar(1.0, -phase);
    // the phase is carried through exactly; a det-derived phase is ambiguous by π
    Ok(su2_log(phase, pv.a0.re, [pv.ax.im, pv.ay.im, pv.az.im]))
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

/// `exp(iθσi) σj exp(−iθσi) = σj cos 2θ − ε_ijk σk sin 2θ`.
pub fn conjugate_sigma(theta: f64, i: usize, j: usize) -> Result<PauliVector> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(invalid(format!("axes must be in 1..=3, got ({i}, {j})")));
    }
    if i == j {
        return Err(invalid("conjugate_sigma requires distinct axes"));
    }
    let k = 6 - i - j;
    let (s, c) = (2.0 * theta).sin_cos();
    Ok(PauliVector::sigma(j)? * c - PauliVector::sigma(k)? * (levi_civita(i, j, k) * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Scaled-and-squared Taylor series of a dense matrix.
    fn taylor_exp(a: &Mat2) -> Mat2 {
        let norm = a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        let squarings = (norm.max(1e-300).log2().ceil().max(0.0) as i32) + 4;
        let scale = 0.5_f64.powi(squarings);
        let x = a.map(|row| row.map(|c| c * scale));
        let mut term = mat_identity();
        let mut sum = mat_identity();
        for n in 1..30 {
            term = mat_mul(&term, &x).map(|row| row.map(|c| c / n as f64));
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            sum = mat_mul(&sum, &sum);
        }
        sum
    }

    fn i_times(p: &PauliVector) -> Mat2 {
        (*p * I).to_matrix()
    }

    #[test]
    fn matrix_round_trip() {
        let p = PauliVector::new(
            Complex64::new(0.1, -0.2),
            Complex64::new(0.3, 0.4),
            Complex64::new(-0.5, 0.6),
            Complex64::new(0.7, -0.8),
        );
        let back = PauliVector::from_matrix(&p.to_matrix());
        assert!((back - p).max_abs() < 1e-15);
    }

    #[test]
    fn exp_pauli_trivial_cases() {
        let u = exp_pauli(&PauliVector::ZERO).unwrap();
        assert!(u.max_diff(&Unitary2::identity()) == 0.0);
        let u = exp_pauli(&PauliVector::real(0.0, 0.0, 0.0, PI / 2.0)).unwrap();
        let expect = [[I, ZERO], [ZERO, -I]];
        assert!(mat_max_diff(&u.matrix, &expect) < 1e-15);
    }

    #[test]
    fn exp_pauli_matches_taylor_oracle() {
        let n = PauliVector::real(0.0, 0.3, 0.4, 0.0);
        let u = exp_pauli(&n).unwrap();
        assert!(mat_max_diff(&u.matrix, &taylor_exp(&i_times(&n))) < 1e-12);
        let n = PauliVector::real(0.25, -1.3, 0.4, 2.2);
        let u = exp_pauli(&n).unwrap();
        assert!(mat_max_diff(&u.matrix, &taylor_exp(&i_times(&n))) < 1e-12);
    }

    #[test]
    fn exp_pauli_rejects_complex_generator() {
        let n = PauliVector::new(ZERO, Complex64::new(0.1, 0.1), ZERO, ZERO);
        assert!(exp_pauli(&n).is_err());
    }

    #[test]
    fn exp_operator_matches_taylor() {
        let a = PauliVector::new(
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.3, 0.7),
            Complex64::new(0.2, -0.1),
            Complex64::new(0.0, 1.1),
        );
        assert!(mat_max_diff(&exp_operator(&a), &taylor_exp(&a.to_matrix())) < 1e-12);
        let tiny = a * 1e-5;
        assert!(mat_max_diff(&exp_operator(&tiny), &taylor_exp(&tiny.to_matrix())) < 1e-14);
    }

    #[test]
    fn exp_anti_hermitian_is_exp_operator() {
        let m = PauliVector::new(I * 0.3, I * -0.2, I * 0.9, I * 0.4);
        let u = exp_anti_hermitian(&m, 0.0).unwrap();
        assert!(mat_max_diff(&u.matrix, &exp_operator(&m)) < 1e-14);
        assert!(exp_anti_hermitian(&PauliVector::real(0.0, 1.0, 0.0, 0.0), 1e-12).is_err());
    }

    #[test]
    fn compose_examples() {
        let n = PauliVector::real(0.0, 0.3, -0.1, 0.2);
        let r = compose_rotations(&n, &PauliVector::ZERO).unwrap();
        assert!((r - n).max_abs() < 1e-15);

        let q = PauliVector::real(0.0, PI / 4.0, 0.0, 0.0);
        let r = compose_rotations(&q, &q).unwrap();
        assert!((r - PauliVector::real(0.0, PI / 2.0, 0.0, 0.0)).max_abs() < 1e-15);

        let n = PauliVector::real(0.0, 0.2, 0.0, 0.0);
        let m = PauliVector::real(0.0, 0.0, 0.0, 0.3);
        let r = compose_rotations(&n, &m).unwrap();
        let direct = exp_pauli(&n).unwrap().compose(&exp_pauli(&m).unwrap());
        let oracle = direct.log();
        assert!((r - oracle).max_abs() < 1e-12);
        assert!(exp_pauli(&r).unwrap().max_diff(&direct) < 1e-12);
    }

    #[test]
    fn log_handles_minus_identity() {
        let u = exp_pauli(&PauliVector::real(0.0, PI, 0.0, 0.0)).unwrap();
        let r = u.log();
        assert!(exp_pauli(&r).unwrap().max_diff(&u) < 1e-15);
    }

    #[test]
    fn conjugate_sigma_examples() {
        let s2 = conjugate_sigma(0.0, 1, 2).unwrap();
        assert_eq!(s2, PauliVector::sigma(2).unwrap());
        let r = conjugate_sigma(PI / 2.0, 3, 1).unwrap();
        assert!((r + PauliVector::sigma(1).unwrap()).max_abs() < 1e-15);
        assert!(conjugate_sigma(0.3, 2, 2).is_err());
        assert!(conjugate_sigma(0.3, 0, 2).is_err());
    }

    #[test]
    fn conjugate_sigma_matches_dense_conjugation() {
        for (i, j) in [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)] {
            let theta = 0.7;
            let u = taylor_exp(&i_times(&(PauliVector::sigma(i).unwrap() * theta)));
            let dense = mat_mul(&mat_mul(&u, &PauliVector::sigma(j).unwrap().to_matrix()), &mat_dagger(&u));
            let r = conjugate_sigma(theta, i, j).unwrap();
            assert!(mat_max_diff(&r.to_matrix(), &dense) < 1e-12, "axes {i},{j}");
        }
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let u = exp_pauli(&PauliVector::real(0.1, 0.4, -0.3, 1.2)).unwrap();
        let mut m = u.matrix;
        m[0][1] += Complex64::new(1e-6, -2e-6);
        m[1][1] *= 1.0 + 3e-6;
        let p = Unitary2::polar_project(&m).unwrap();
        assert!(p.unitarity_defect() < 1e-14);
        assert!(p.max_diff(&u) < 1e-5);
    }

    #[test]
    fn product_matches_matrix_product() {
        let a = PauliVector::new(Complex64::new(0.1, 0.2), I, ONE * 0.5, Complex64::new(-0.3, 0.1));
        let b = PauliVector::new(ONE, Complex64::new(0.0, -0.4), ONE * 0.2, I * 0.7);
        let m = mat_mul(&a.to_matrix(), &b.to_matrix());
        assert!(mat_max_diff(&a.product(&b).to_matrix(), &m) < 1e-15);
        let c = a.product(&b) - b.product(&a);
        assert!((c - a.commutator(&b)).max_abs() < 1e-15);
    }

    fn generator() -> impl Strategy<Value = PauliVector> {
        // direction on the sphere times a length in [0, π]
        (0.0..PI, 0.0..2.0 * PI, 0.0..=PI, -PI..PI).prop_map(|(th, ph, len, a0)| {
            PauliVector::real(a0, len * th.sin() * ph.cos(), len * th.sin() * ph.sin(), len * th.cos())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn compose_agrees_with_matrix_product(n in generator(), m in generator()) {
            let r = compose_rotations(&n, &m).unwrap();
            let direct = exp_pauli(&n).unwrap().compose(&exp_pauli(&m).unwrap());
            prop_assert!(exp_pauli(&r).unwrap().max_diff(&direct) < 1e-12);
            let angle = norm3(&r.real_vector());
            prop_assert!(angle <= PI + 1e-12);
        }

        #[test]
        fn exp_pauli_is_unitary(n in generator()) {
            let u = exp_pauli(&n).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-12);
            prop_assert!((u.det().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn conjugation_preserves_hermiticity_and_trace(theta in -10.0..10.0f64, i in 1usize..=3, dj in 1usize..=2) {
            let j = (i - 1 + dj) % 3 + 1;
            let r = conjugate_sigma(theta, i, j).unwrap();
            prop_assert!(r.is_hermitian(0.0));
            prop_assert!(r.trace().norm() == 0.0);
        }
    }
}
