//! Two-qubit pure states, spin observables and Born-rule correlators.
//!
//! Amplitudes are stored in the product basis ordered `(↑↑, ↑↓, ↓↑, ↓↓)`,
//! first qubit belongs to Alice. Outcomes are the bare eigenvalues ±1 of
//! `σ⃗·n̂`, without the ħ/2 factor.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on unit vector and state norms at construction.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Correlators this far outside [-1, 1] are clamped; further out is an error.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A measurement direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    /// Accepts `(x, y, z)` only if its squared norm is 1 within [`NORM_TOLERANCE`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm2 = x * x + y * y + z * z;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotUnit { norm: norm2.sqrt() });
        }
        Ok(Self { x, y, z })
    }

    /// Rescales `(x, y, z)` to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate);
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`. Any real angles are accepted.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn x_axis() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Neg for UnitVector3 {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// The SU(2) element `exp(-i α σ⃗·n̂ / 2)`, rotating Bloch vectors by `angle` about `axis`.
    pub fn rotation(axis: &UnitVector3, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Mat2::identity().scale(Complex64::new(c, 0.0))
            - pauli_dot(axis).scale(Complex64::new(0.0, s))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

fn pauli_dot(n: &UnitVector3) -> Mat2 {
    let nx = Complex64::new(n.x, 0.0);
    let ny = Complex64::new(n.y, 0.0);
    let nz = Complex64::new(n.z, 0.0);
    Mat2([[nz, nx - I * ny], [nx + I * ny, -nz]])
}

/// Normalized pure state of two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    /// Rejects amplitudes whose squared norm differs from 1 by more than [`NORM_TOLERANCE`].
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm2 = squared_norm(&amplitudes);
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: norm2.sqrt() });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = squared_norm(&amplitudes).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate);
        }
        Ok(Self {
            amplitudes: amplitudes.map(|a| a / norm),
        })
    }

    /// Tensor product of two single-qubit states given as `(up, down)` amplitudes.
    pub fn product(alice: [Complex64; 2], bob: [Complex64; 2]) -> Result<Self> {
        Self::normalized([
            alice[0] * bob[0],
            alice[0] * bob[1],
            alice[1] * bob[0],
            alice[1] * bob[1],
        ])
    }

    /// `|↑↑⟩`.
    pub fn up_up() -> Self {
        Self {
            amplitudes: [ONE, ZERO, ZERO, ZERO],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        squared_norm(&self.amplitudes).sqrt()
    }

    /// Applies `alice ⊗ bob` to the state. The operators must be unitary.
    pub fn apply_local(&self, alice: &Mat2, bob: &Mat2) -> Result<Self> {
        Self::new(tensor_apply(alice, bob, &self.amplitudes))
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        inner(&self.amplitudes, &other.amplitudes).norm()
    }

    /// `⟨ψ| alice ⊗ bob |ψ⟩`.
    pub fn expectation(&self, alice: &Mat2, bob: &Mat2) -> Complex64 {
        let applied = tensor_apply(alice, bob, &self.amplitudes);
        inner(&self.amplitudes, &applied)
    }
}

fn squared_norm(v: &[Complex64; 4]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn inner(bra: &[Complex64; 4], ket: &[Complex64; 4]) -> Complex64 {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

// Index 2*i + j holds the amplitude of Alice basis state i, Bob basis state j.
fn tensor_apply(alice: &Mat2, bob: &Mat2, psi: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    acc += alice.0[i][k] * bob.0[j][l] * psi[2 * k + l];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    out
}

/// The singlet `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet() -> TwoQubitState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState {
        amplitudes: [ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO],
    }
}

/// Dichotomic spin observable `σ⃗·n̂` with eigenvalues ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    direction: UnitVector3,
    matrix: Mat2,
}

impl SpinObservable {
    pub fn direction(&self) -> &UnitVector3 {
        &self.direction
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Projector onto the eigenspace with eigenvalue `outcome` (±1).
    pub fn projector(&self, outcome: i8) -> Mat2 {
        let sign = Complex64::new(f64::from(outcome.signum()), 0.0);
        (Mat2::identity() + self.matrix.scale(sign)).scale(Complex64::new(0.5, 0.0))
    }
}

/// Builds `n_x σ_x + n_y σ_y + n_z σ_z`.
pub fn spin_observable(n: &UnitVector3) -> SpinObservable {
    SpinObservable {
        direction: *n,
        matrix: pauli_dot(n),
    }
}

/// Born-rule correlator `⟨ψ| (σ⃗·â) ⊗ (σ⃗·b̂) |ψ⟩`.
pub fn correlator(state: &TwoQubitState, a: &UnitVector3, b: &UnitVector3) -> Result<f64> {
    let norm = state.norm();
    if (norm * norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let value = state.expectation(&pauli_dot(a), &pauli_dot(b));
    if value.im.abs() > CLAMP_TOLERANCE {
        return Err(Error::Consistency(format!(
            "Hermitian expectation has imaginary part {}",
            value.im
        )));
    }
    clamp_unit(value.re)
}

/// `−â·b̂`, the singlet correlator in closed form.
pub fn singlet_correlator_closed_form(a: &UnitVector3, b: &UnitVector3) -> f64 {
    -a.dot(b)
}

pub(crate) fn clamp_unit(value: f64) -> Result<f64> {
    if !value.is_finite() || value.abs() > 1.0 + CLAMP_TOLERANCE {
        return Err(Error::Consistency(format!(
            "correlator {value} lies outside [-1, 1]"
        )));
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// Probabilities of the four outcome pairs of a joint spin measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pp: f64,
    pm: f64,
    mp: f64,
    mm: f64,
}

impl JointDistribution {
    /// Order: p(+,+), p(+,−), p(−,+), p(−,−).
    pub fn new(pp: f64, pm: f64, mp: f64, mm: f64) -> Result<Self> {
        let all = [pp, pm, mp, mm];
        if all.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidMixture(format!(
                "joint probabilities must be non-negative, got {all:?}"
            )));
        }
        let total: f64 = all.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidMixture(format!(
                "joint probabilities sum to {total}"
            )));
        }
        Ok(Self { pp, pm, mp, mm })
    }

    pub fn probability(&self, alice: i8, bob: i8) -> f64 {
        match (alice > 0, bob > 0) {
            (true, true) => self.pp,
            (true, false) => self.pm,
            (false, true) => self.mp,
            (false, false) => self.mm,
        }
    }

    /// `Σ o_a o_b p(o_a, o_b)`.
    pub fn correlator(&self) -> f64 {
        self.pp - self.pm - self.mp + self.mm
    }

    /// Probability that Alice obtains +1.
    pub fn alice_plus(&self) -> f64 {
        self.pp + self.pm
    }

    /// Probability that Bob obtains +1.
    pub fn bob_plus(&self) -> f64 {
        self.pp + self.mp
    }

    fn entries(&self) -> [((i8, i8), f64); 4] {
        [
            ((1, 1), self.pp),
            ((1, -1), self.pm),
            ((-1, 1), self.mp),
            ((-1, -1), self.mm),
        ]
    }
}

/// Projective-measurement outcome probabilities for spins along `a` and `b`.
pub fn joint_distribution(
    state: &TwoQubitState,
    a: &UnitVector3,
    b: &UnitVector3,
) -> Result<JointDistribution> {
    let (oa, ob) = (spin_observable(a), spin_observable(b));
    let mut p = [0.0; 4];
    for (slot, (sa, sb)) in p.iter_mut().zip([(1, 1), (1, -1), (-1, 1), (-1, -1)]) {
        let raw = state
            .expectation(&oa.projector(sa), &ob.projector(sb))
            .re;
        if raw < -CLAMP_TOLERANCE {
            return Err(Error::Consistency(format!(
                "negative outcome probability {raw}"
            )));
        }
        *slot = raw.max(0.0);
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > CLAMP_TOLERANCE {
        return Err(Error::Consistency(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    let [pp, pm, mp, mm] = p.map(|x| x / total);
    Ok(JointDistribution { pp, pm, mp, mm })
}

/// Draws one outcome pair `(alice, bob)` from `dist`.
pub fn sample_outcomes<R: Rng + ?Sized>(dist: &JointDistribution, rng: &mut R) -> (i8, i8) {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last = (-1, -1);
    for (pair, p) in dist.entries() {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last = pair;
        if u < cumulative {
            return pair;
        }
    }
    // rounding left the cumulative sum just below 1
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn singlet_amplitudes() {
        let s = singlet();
        let amps = s.amplitudes();
        assert_eq!(amps[0], c(0.0));
        assert_eq!(amps[1], c(std::f64::consts::FRAC_1_SQRT_2));
        assert_eq!(amps[2], c(-std::f64::consts::FRAC_1_SQRT_2));
        assert_eq!(amps[3], c(0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_vector_rejects_non_unit() {
        assert!(matches!(
            UnitVector3::new(1.0, 1.0, 0.0),
            Err(Error::NotUnit { .. })
        ));
        assert!(UnitVector3::new(f64::NAN, 0.0, 0.0).is_err());
        assert_eq!(UnitVector3::normalized(0.0, 0.0, 0.0), Err(Error::Degenerate));
        let n = UnitVector3::normalized(3.0, 0.0, 4.0).unwrap();
        assert!((n.x() - 0.6).abs() < 1e-15 && (n.z() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn state_rejects_unnormalized() {
        assert!(matches!(
            TwoQubitState::new([c(1.0), c(1.0), c(0.0), c(0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        let s = TwoQubitState::normalized([c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_matrices() {
        let z = spin_observable(&UnitVector3::z_axis());
        assert_eq!(*z.matrix(), Mat2::pauli_z());
        assert_eq!(z.matrix().get(0, 0), c(1.0));
        assert_eq!(z.matrix().get(1, 1), c(-1.0));

        let x = spin_observable(&UnitVector3::x_axis());
        assert_eq!(*x.matrix(), Mat2::pauli_x());

        let mz = spin_observable(&-UnitVector3::z_axis());
        assert_eq!(mz.matrix().get(0, 0), c(-1.0));
        assert_eq!(mz.matrix().get(1, 1), c(1.0));
        assert_eq!(mz.matrix().get(0, 1), c(0.0));

        let y = spin_observable(&UnitVector3::y_axis());
        assert_eq!(*y.matrix(), Mat2::pauli_y());
    }

    #[test]
    fn observable_is_dichotomic() {
        let n = UnitVector3::from_spherical(0.3, 1.9);
        let obs = spin_observable(&n);
        assert!(obs.matrix().is_hermitian(1e-12));
        let sq = *obs.matrix() * *obs.matrix();
        assert!(sq.max_abs_diff(&Mat2::identity()) < 1e-12);
    }

    #[test]
    fn singlet_correlator_examples() {
        let z = UnitVector3::z_axis();
        let x = UnitVector3::x_axis();
        let s = singlet();
        assert!((correlator(&s, &z, &z).unwrap() + 1.0).abs() < 1e-12);
        assert!(correlator(&s, &z, &x).unwrap().abs() < 1e-12);
        let b = UnitVector3::from_spherical(FRAC_PI_3, 0.0);
        assert!((correlator(&s, &z, &b).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let z = UnitVector3::z_axis();
        assert_eq!(singlet_correlator_closed_form(&z, &z), -1.0);
        assert_eq!(singlet_correlator_closed_form(&z, &-z), 1.0);
        let b = UnitVector3::from_spherical(FRAC_PI_4, 0.0);
        assert!((singlet_correlator_closed_form(&z, &b) + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn joint_distribution_examples() {
        let s = singlet();
        let z = UnitVector3::z_axis();
        let d = joint_distribution(&s, &z, &z).unwrap();
        assert!(d.probability(1, 1).abs() < 1e-12);
        assert!(d.probability(-1, -1).abs() < 1e-12);
        assert!((d.probability(1, -1) - 0.5).abs() < 1e-12);
        assert!((d.probability(-1, 1) - 0.5).abs() < 1e-12);

        let d = joint_distribution(&s, &z, &UnitVector3::x_axis()).unwrap();
        for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert!((d.probability(a, b) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_distribution_validation() {
        assert!(JointDistribution::new(0.5, 0.5, 0.1, 0.0).is_err());
        assert!(JointDistribution::new(-0.1, 0.6, 0.5, 0.0).is_err());
        assert!(JointDistribution::new(0.25, 0.25, 0.25, 0.25).is_ok());
    }

    #[test]
    fn degenerate_distribution_sampling() {
        let d = JointDistribution::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            assert_eq!(sample_outcomes(&d, &mut rng), (1, -1));
        }
    }

    #[test]
    fn product_state_correlator_factorizes() {
        let s = TwoQubitState::up_up();
        let a = UnitVector3::from_spherical(0.7, 0.2);
        let b = UnitVector3::from_spherical(2.1, -1.0);
        let e = correlator(&s, &a, &b).unwrap();
        assert!((e - a.z() * b.z()).abs() < 1e-12);
    }

    #[test]
    fn rotation_maps_bloch_vectors() {
        // U σ_z U† = σ·(R ẑ); rotating ẑ by π/2 about ŷ gives x̂.
        let u = Mat2::rotation(&UnitVector3::y_axis(), std::f64::consts::FRAC_PI_2);
        let rotated = u * Mat2::pauli_z() * u.adjoint();
        assert!(rotated.max_abs_diff(&Mat2::pauli_x()) < 1e-12);
    }

    #[test]
    fn clamp_behaviour() {
        assert_eq!(clamp_unit(1.0 + 1e-10).unwrap(), 1.0);
        assert_eq!(clamp_unit(-1.0 - 1e-10).unwrap(), -1.0);
        assert!(clamp_unit(1.0 + 1e-6).unwrap_err().is_consistency());
    }
}
