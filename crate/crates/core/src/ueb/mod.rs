//! Unextendible entangled bases (UEBs) of two qubits and the ensemble
//! generators used throughout the crate.
//!
//! A set of orthogonal entangled states is a UEB when its orthocomplement
//! contains no entangled state. For two qubits the only possible cardinality
//! is three, so the complement is one-dimensional and the test reduces to the
//! concurrence of a single state.

pub mod magic;

use nalgebra::Matrix4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ensemble::OrthogonalSet;
use crate::error::{Error, Result};
use crate::product_finder::orthocomplement;
use crate::qstate::{self, PureState, Qubit, C64};

/// Largest condition number accepted for the Gaussian seed matrix.
const MAX_CONDITION: f64 = 1e6;

/// Parameters of the nonmaximally entangled UEB family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    lambda1: f64,
    lambda3: f64,
}

fn check_open_unit(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::BadParam { name, value })
    }
}

impl GeneratorParams {
    pub fn new(lambda1: f64, lambda3: f64) -> Result<Self> {
        Ok(GeneratorParams {
            lambda1: check_open_unit("lambda1", lambda1)?,
            lambda3: check_open_unit("lambda3", lambda3)?,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        1.0 - self.lambda1
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }

    pub fn lambda4(&self) -> f64 {
        1.0 - self.lambda3
    }

    /// Notes on degenerate parameter choices for [`generate_eq1`]. At
    /// `lambda1 = 1/2` the first state is maximally entangled, although the
    /// family is usually described as nonmaximally entangled; identifiability
    /// verdicts are unaffected.
    pub fn eq1_warnings(&self) -> Vec<String> {
        let c1 = 2.0 * (self.lambda1 * self.lambda2()).sqrt();
        if (c1 - 1.0).abs() < crate::Tolerances::DEFAULT.eps_zero {
            vec![format!(
                "psi1 is maximally entangled at lambda1 = {} (concurrence {c1})",
                self.lambda1
            )]
        } else {
            Vec::new()
        }
    }
}

/// `sqrt(l1)|01> + sqrt(l2)|10>` and its partner `sqrt(l2)|01> - sqrt(l1)|10>`.
fn schmidt_pair(lambda1: f64) -> ([f64; 4], [f64; 4]) {
    let (a, b) = (lambda1.sqrt(), (1.0 - lambda1).sqrt());
    ([0.0, a, b, 0.0], [0.0, b, -a, 0.0])
}

/// The three-state UEB
///
/// ```text
/// psi1 = sqrt(l1)|01> + sqrt(l2)|10>
/// psi2 = sqrt(l3)|00> + sqrt(l4)|psi1_perp>
/// psi3 = sqrt(l4)|00> - sqrt(l3)|psi1_perp>
/// ```
///
/// with `psi1_perp = sqrt(l2)|01> - sqrt(l1)|10>`; its complement is `|11>`.
pub fn generate_eq1(p: GeneratorParams) -> OrthogonalSet {
    let (psi1, perp) = schmidt_pair(p.lambda1);
    let (s3, s4) = (p.lambda3.sqrt(), p.lambda4().sqrt());
    let mut psi2 = perp.map(|x| s4 * x);
    psi2[0] = s3;
    let mut psi3 = perp.map(|x| -s3 * x);
    psi3[0] = s4;
    let states = [psi1, psi2, psi3]
        .into_iter()
        .map(|a| PureState::from_real(a).expect("unit vector"))
        .collect();
    OrthogonalSet::new(states).expect("orthogonal by construction")
}

/// `{|00>, sqrt(l1)|01> + sqrt(l2)|10>, sqrt(l2)|01> - sqrt(l1)|10>}`.
pub fn generate_eq2(lambda1: f64) -> Result<OrthogonalSet> {
    let lambda1 = check_open_unit("lambda1", lambda1)?;
    let (psi2, psi3) = schmidt_pair(lambda1);
    let states = vec![
        PureState::basis(0),
        PureState::from_real(psi2)?,
        PureState::from_real(psi3)?,
    ];
    OrthogonalSet::new(states)
}

/// A random 4x4 real orthogonal matrix: Gaussian entries, redrawn when
/// ill-conditioned, then orthonormalized by QR.
pub fn random_orthogonal_matrix(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
    loop {
        let g = Matrix4::<f64>::from_fn(|_, _| StandardNormal.sample(rng));
        let sv = g.singular_values();
        let (max, min) = (sv.max(), sv.min());
        if min <= 0.0 || max / min > MAX_CONDITION {
            continue;
        }
        return g.qr().q();
    }
}

/// Three orthonormal maximally entangled states whose magic-basis
/// coordinates are the given orthonormal real rows.
pub fn max_entangled_triple_from_coordinates(rows: &[[f64; 4]; 3]) -> Result<OrthogonalSet> {
    let states = rows
        .iter()
        .map(|r| PureState::new(magic::from_real_coordinates(r)))
        .collect::<Result<Vec<_>>>()?;
    OrthogonalSet::new(states)
}

/// Seeded random triple of pairwise-orthogonal maximally entangled states.
pub fn random_max_entangled_triple(seed: u64) -> OrthogonalSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal_matrix(&mut rng);
    let rows = [0, 1, 2].map(|r| [q[(r, 0)], q[(r, 1)], q[(r, 2)], q[(r, 3)]]);
    max_entangled_triple_from_coordinates(&rows).expect("orthogonal rows give an orthogonal triple")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UebFailure {
    /// A member is a product state.
    NotAllEntangled { index: usize },
    /// The orthocomplement holds an entangled state.
    EntangledComplement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UebVerdict {
    pub is_ueb: bool,
    pub complement_state: PureState,
    pub complement_concurrence: f64,
    pub failure: Option<UebFailure>,
}

fn require_triple(set: &OrthogonalSet) -> Result<PureState> {
    if set.len() != 3 {
        return Err(Error::BadCardinality {
            expected: "3",
            found: set.len(),
        });
    }
    Ok(orthocomplement(set.states())?.basis()[0])
}

pub fn ueb_check(set: &OrthogonalSet) -> Result<UebVerdict> {
    let complement_state = require_triple(set)?;
    let eps_zero = set.tolerances().eps_zero;
    let complement_concurrence = qstate::concurrence(&complement_state);
    let failure = match set
        .states()
        .iter()
        .position(|s| qstate::is_product(s, eps_zero))
    {
        Some(index) => Some(UebFailure::NotAllEntangled { index }),
        None if complement_concurrence >= eps_zero => Some(UebFailure::EntangledComplement),
        None => None,
    };
    Ok(UebVerdict {
        is_ueb: failure.is_none(),
        complement_state,
        complement_concurrence,
        failure,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningVerdict {
    pub spans_ueb: bool,
    pub complement_state: PureState,
    /// A UEB with the same span, present when `spans_ueb`.
    pub witness: Option<OrthogonalSet>,
}

/// Parameters of the canonical UEB used as a spanning certificate.
pub const WITNESS_PARAMS: GeneratorParams = GeneratorParams {
    lambda1: 0.3,
    lambda3: 0.4,
};

/// `[x_perp, x]` as columns: maps `|0> -> x_perp`, `|1> -> x`.
fn unitary_sending_one_to(x: &Qubit) -> [[C64; 2]; 2] {
    let [x0, x1] = x.amplitudes();
    let [p0, p1] = x.orthogonal().amplitudes();
    [[p0, x0], [p1, x1]]
}

/// Whether some UEB spans the same subspace as the triple: true iff the
/// complement state is a product `x (x) y`, in which case the canonical UEB
/// rotated by the local unitary sending `|11>` to `x (x) y` is returned.
pub fn ueb_spanning_check(set: &OrthogonalSet) -> Result<SpanningVerdict> {
    let complement_state = require_triple(set)?;
    let Some((x, y)) = qstate::factorize(&complement_state, set.tolerances().eps_zero) else {
        return Ok(SpanningVerdict {
            spans_ueb: false,
            complement_state,
            witness: None,
        });
    };
    let (left, right) = (unitary_sending_one_to(&x), unitary_sending_one_to(&y));
    let rotated = generate_eq1(WITNESS_PARAMS)
        .states()
        .iter()
        .map(|s| {
            PureState::new(
                s.coefficient_matrix()
                    .local_transform(&left, &right)
                    .flatten(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpanningVerdict {
        spans_ueb: true,
        complement_state,
        witness: Some(OrthogonalSet::with_tolerances(rotated, *set.tolerances())?),
    })
}
