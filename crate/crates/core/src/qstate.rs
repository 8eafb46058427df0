//! Two-qubit pure states, their coefficient matrices and entanglement measures.
//!
//! Amplitudes are ordered `|00>, |01>, |10>, |11>`; the coefficient matrix
//! holds the amplitude of `|r c>` at row `r`, column `c`. For a normalized
//! state the concurrence is `2 |det M|`.

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Scales `amps` to unit norm and rotates the global phase so that the first
/// amplitude with modulus above `eps_zero` is real and nonnegative.
fn canonicalize<const N: usize>(amps: [C64; N], eps_zero: f64) -> Result<[C64; N]> {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > eps_zero) {
        return Err(Error::ZeroVector { norm });
    }
    let mut out = amps.map(|a| a / norm);
    if let Some(k) = out.iter().position(|a| a.norm() > eps_zero) {
        let pivot = out[k];
        let phase = pivot.conj() / pivot.norm();
        for a in out.iter_mut() {
            *a *= phase;
        }
        out[k] = C64::new(pivot.norm(), 0.0);
    }
    Ok(out)
}

/// A normalized single-qubit state `a|0> + b|1>` with canonical global phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit([C64; 2]);

impl Qubit {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        canonicalize([a, b], Tolerances::DEFAULT.eps_zero).map(Qubit)
    }

    pub fn zero() -> Self {
        Qubit([ONE, ZERO])
    }

    pub fn one() -> Self {
        Qubit([ZERO, ONE])
    }

    /// Bloch-sphere parameterization `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    /// The phase is left as given, so this may differ from the canonical form.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Qubit([C64::new(c, 0.0), C64::from_polar(s, phi)])
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.0
    }

    /// The orthogonal qubit `conj(b)|0> - conj(a)|1>`.
    pub fn orthogonal(&self) -> Self {
        let [a, b] = self.0;
        Qubit::new(b.conj(), -a.conj()).expect("unit vector")
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Qubit) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// Same ray as `other` within `tol` (phase ignored).
    pub fn same_ray(&self, other: &Qubit, tol: f64) -> bool {
        (1.0 - self.inner(other).norm()).abs() < tol
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_c64(self.0[0]), fmt_c64(self.0[1]))
    }
}

/// 2x2 complex matrix of amplitudes, `m[r][c]` = amplitude of `|r c>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientMatrix(pub [[C64; 2]; 2]);

impl CoefficientMatrix {
    pub fn from_amplitudes(amps: &[C64; 4]) -> Self {
        CoefficientMatrix([[amps[0], amps[1]], [amps[2], amps[3]]])
    }

    pub fn flatten(&self) -> [C64; 4] {
        let m = &self.0;
        [m[0][0], m[0][1], m[1][0], m[1][1]]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `A M B^T`, the coefficient matrix after applying `A (x) B`.
    pub fn local_transform(&self, left: &[[C64; 2]; 2], right: &[[C64; 2]; 2]) -> Self {
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                for (rp, lrow) in self.0.iter().enumerate() {
                    for (cp, m) in lrow.iter().enumerate() {
                        *entry += left[r][rp] * right[c][cp] * m;
                    }
                }
            }
        }
        CoefficientMatrix(out)
    }
}

impl Add for CoefficientMatrix {
    type Output = CoefficientMatrix;

    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(rhs.0.iter()) {
            for (a, b) in row.iter_mut().zip(rrow.iter()) {
                *a += b;
            }
        }
        CoefficientMatrix(out)
    }
}

impl Mul<CoefficientMatrix> for C64 {
    type Output = CoefficientMatrix;

    fn mul(self, rhs: CoefficientMatrix) -> CoefficientMatrix {
        CoefficientMatrix(rhs.0.map(|row| row.map(|a| a * self)))
    }
}

/// A normalized, phase-canonical two-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState([C64; 4]);

impl PureState {
    /// Normalizes and phase-canonicalizes `amps` using the default zero threshold.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        Self::with_zero_threshold(amps, Tolerances::DEFAULT.eps_zero)
    }

    pub fn with_zero_threshold(amps: [C64; 4], eps_zero: f64) -> Result<Self> {
        canonicalize(amps, eps_zero).map(PureState)
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|x| C64::new(x, 0.0)))
    }

    /// Computational basis state `|k>`, `k` in `0..4`.
    pub fn basis(k: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        PureState(amps)
    }

    pub fn product(left: &Qubit, right: &Qubit) -> Self {
        let [a0, a1] = left.0;
        let [b0, b1] = right.0;
        Self::new([a0 * b0, a0 * b1, a1 * b0, a1 * b1]).expect("product of unit vectors")
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn coefficient_matrix(&self) -> CoefficientMatrix {
        CoefficientMatrix::from_amplitudes(&self.0)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        inner4(&self.0, &other.0)
    }

    /// `|<self|other>|`
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm()
    }

    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        (1.0 - self.overlap(other)).abs() < tol
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(self)
    }

    pub fn profile(&self) -> EntanglementProfile {
        entanglement_profile(self)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_c64(*a))?;
        }
        write!(f, "]")
    }
}

fn fmt_c64(a: C64) -> String {
    let re = if a.re.abs() < 1e-15 { 0.0 } else { a.re };
    let im = if a.im.abs() < 1e-15 { 0.0 } else { a.im };
    if im == 0.0 {
        format!("{re:.6}")
    } else if im < 0.0 {
        format!("{re:.6}-{:.6}i", -im)
    } else {
        format!("{re:.6}+{im:.6}i")
    }
}

pub(crate) fn inner4(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn make_state(amps: [C64; 4]) -> Result<PureState> {
    PureState::new(amps)
}

/// `2 |det M|`, clamped to `[0, 1]`.
pub fn concurrence(s: &PureState) -> f64 {
    (2.0 * s.coefficient_matrix().det().norm()).min(1.0)
}

/// Shannon entropy in bits of the distribution `(p, 1 - p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementProfile {
    pub concurrence: f64,
    /// `(larger, smaller)`
    pub schmidt_coefficients: (f64, f64),
    /// Entanglement entropy in ebits.
    pub entropy: f64,
}

/// Concurrence, Schmidt coefficients and entropy. Values within `eps_zero`
/// of the product or maximally entangled endpoints snap to them exactly.
pub fn entanglement_profile_with(s: &PureState, eps_zero: f64) -> EntanglementProfile {
    let c = concurrence(s);
    if c < eps_zero {
        return EntanglementProfile {
            concurrence: 0.0,
            schmidt_coefficients: (1.0, 0.0),
            entropy: 0.0,
        };
    }
    if (c - 1.0).abs() < eps_zero {
        return EntanglementProfile {
            concurrence: 1.0,
            schmidt_coefficients: (0.5, 0.5),
            entropy: 1.0,
        };
    }
    let root = (1.0 - c * c).max(0.0).sqrt();
    let larger = (1.0 + root) / 2.0;
    // c^2 / (4 larger) avoids cancellation in (1 - root) / 2 for weak entanglement
    let smaller = c * c / (4.0 * larger);
    EntanglementProfile {
        concurrence: c,
        schmidt_coefficients: (larger, smaller),
        entropy: binary_entropy(smaller),
    }
}

pub fn entanglement_profile(s: &PureState) -> EntanglementProfile {
    entanglement_profile_with(s, Tolerances::DEFAULT.eps_zero)
}

/// Mean entanglement entropy of `states`.
pub fn average_entanglement(states: &[PureState], eps_zero: f64) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::EmptySet);
    }
    let total: f64 = states
        .iter()
        .map(|s| entanglement_profile_with(s, eps_zero).entropy)
        .sum();
    Ok(total / states.len() as f64)
}

/// Splits `s` into `left (x) right` when its concurrence is below `eps_zero`.
pub fn factorize(s: &PureState, eps_zero: f64) -> Option<(Qubit, Qubit)> {
    if concurrence(s) >= eps_zero {
        return None;
    }
    let m = s.coefficient_matrix().0;
    // the heavier column is the best estimate of the left factor
    let col_norm = |c: usize| m[0][c].norm_sqr() + m[1][c].norm_sqr();
    let c_star = if col_norm(0) >= col_norm(1) { 0 } else { 1 };
    let left = Qubit::new(m[0][c_star], m[1][c_star]).ok()?;
    let [l0, l1] = left.0;
    let right = Qubit::new(
        l0.conj() * m[0][0] + l1.conj() * m[1][0],
        l0.conj() * m[0][1] + l1.conj() * m[1][1],
    )
    .ok()?;
    Some((left, right))
}

pub fn is_product(s: &PureState, eps_zero: f64) -> bool {
    concurrence(s) < eps_zero
}

/// Bell states in the computational basis.
pub mod bell {
    use super::PureState;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    pub fn phi_plus() -> PureState {
        PureState::from_real([H, 0.0, 0.0, H]).unwrap()
    }

    pub fn phi_minus() -> PureState {
        PureState::from_real([H, 0.0, 0.0, -H]).unwrap()
    }

    pub fn psi_plus() -> PureState {
        PureState::from_real([0.0, H, H, 0.0]).unwrap()
    }

    pub fn psi_minus() -> PureState {
        PureState::from_real([0.0, H, -H, 0.0]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Schmidt coefficients from the eigenvalues of the reduced density matrix
    /// `rho_A = M M^dagger`, computed independently of the determinant.
    fn reduced_eigenvalues(s: &PureState) -> (f64, f64) {
        let m = s.coefficient_matrix().0;
        let r00 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let r11 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let r01 = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
        let mean = (r00 + r11) / 2.0;
        let gap = (((r00 - r11) / 2.0).powi(2) + r01.norm_sqr()).sqrt();
        (mean + gap, mean - gap)
    }

    #[test]
    fn make_state_examples() {
        let s = make_state([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s, PureState::basis(0));

        let s = make_state([c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(s.same_ray(&bell::phi_plus(), 1e-15));
        assert_abs_diff_eq!(
            s.amplitudes()[0].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );

        let err = make_state([c(0.0, 0.0); 4]).unwrap_err();
        assert!(matches!(err, Error::ZeroVector { .. }));
    }

    #[test]
    fn phase_is_canonical() {
        let s = make_state([c(0.0, 0.0), c(0.0, -3.0), c(1.0, 1.0), c(0.0, 0.0)]).unwrap();
        let a = s.amplitudes();
        assert_eq!(a[0], c(0.0, 0.0));
        assert_eq!(a[1].im, 0.0);
        assert!(a[1].re > 0.0);
        let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_examples() {
        assert_eq!(concurrence(&PureState::basis(0)), 0.0);
        assert_abs_diff_eq!(concurrence(&bell::phi_plus()), 1.0, epsilon = 1e-15);
        let s = PureState::from_real([0.0, 0.2f64.sqrt(), 0.8f64.sqrt(), 0.0]).unwrap();
        let (l1, l2) = reduced_eigenvalues(&s);
        let oracle = 2.0 * (l1 * l2).sqrt();
        assert_abs_diff_eq!(oracle, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence(&s), oracle, epsilon = 1e-12);
    }

    #[test]
    fn profile_examples() {
        let p = entanglement_profile(&PureState::basis(1));
        assert_eq!((p.concurrence, p.entropy), (0.0, 0.0));

        let p = entanglement_profile(&bell::psi_minus());
        assert_eq!((p.concurrence, p.entropy), (1.0, 1.0));

        let s = PureState::from_real([0.0, 0.2f64.sqrt(), 0.8f64.sqrt(), 0.0]).unwrap();
        let (l1, l2) = reduced_eigenvalues(&s);
        let oracle = -l1 * l1.log2() - l2 * l2.log2();
        assert_abs_diff_eq!(oracle, 0.721928094887, epsilon = 1e-11);
        let p = entanglement_profile(&s);
        assert_abs_diff_eq!(p.entropy, oracle, epsilon = 1e-11);
        assert_abs_diff_eq!(p.schmidt_coefficients.0, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.schmidt_coefficients.1, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn average_of_empty_set_is_an_error() {
        assert_eq!(average_entanglement(&[], 1e-9), Err(Error::EmptySet));
    }

    #[test]
    fn factorize_examples() {
        let (l, r) = factorize(&PureState::basis(3), 1e-9).unwrap();
        assert!(l.same_ray(&Qubit::one(), 1e-15));
        assert!(r.same_ray(&Qubit::one(), 1e-15));

        assert!(factorize(&bell::phi_plus(), 1e-9).is_none());

        let minus_i = Qubit::new(c(1.0, 0.0), c(0.0, -1.0)).unwrap();
        let plus_i = Qubit::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let s = PureState::product(&minus_i, &plus_i);
        assert_eq!(s.coefficient_matrix().det().norm(), 0.0);
        let (l, r) = factorize(&s, 1e-9).unwrap();
        assert!(l.same_ray(&minus_i, 1e-14));
        assert!(r.same_ray(&plus_i, 1e-14));
        assert!(PureState::product(&l, &r).same_ray(&s, 1e-14));
    }

    #[test]
    fn local_transform_matches_kronecker_action() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
        let id = [[ONE, ZERO], [ZERO, ONE]];
        // (H (x) I)|00> = |+0>
        let m = PureState::basis(0)
            .coefficient_matrix()
            .local_transform(&hadamard, &id);
        assert_eq!(m.flatten(), [c(h, 0.0), ZERO, c(h, 0.0), ZERO]);
        // (I (x) H)|00> = |0+>
        let m = PureState::basis(0)
            .coefficient_matrix()
            .local_transform(&id, &hadamard);
        assert_eq!(m.flatten(), [c(h, 0.0), c(h, 0.0), ZERO, ZERO]);
    }
}
