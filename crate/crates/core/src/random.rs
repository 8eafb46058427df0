//! Seeded samplers for states, orthogonal sets and subspaces.
//!
//! Generic Haar samples almost never hit the structured cases that matter
//! here (product complements, product members), so every sampler mixes a
//! generic family with structured ones. All samplers are deterministic for a
//! given generator state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ensemble::OrthogonalSet;
use crate::product_finder::{orthocomplement, Subspace};
use crate::qstate::{PureState, Qubit, C64};
use crate::ueb;

/// Generator for sample `index` of a run seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Rotation-invariant random qubit.
pub fn random_qubit(rng: &mut ChaCha8Rng) -> Qubit {
    loop {
        if let Ok(q) = Qubit::new(gaussian(rng), gaussian(rng)) {
            return q;
        }
    }
}

/// Rotation-invariant random two-qubit state.
pub fn random_state(rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let amps = [(); 4].map(|_| gaussian(rng));
        if let Ok(s) = PureState::new(amps) {
            return s;
        }
    }
}

pub fn random_product(rng: &mut ChaCha8Rng) -> PureState {
    PureState::product(&random_qubit(rng), &random_qubit(rng))
}

/// `count` Haar-random orthonormal states inside `span(basis)`.
pub fn random_orthonormal_in(
    rng: &mut ChaCha8Rng,
    basis: &[PureState],
    count: usize,
) -> Vec<PureState> {
    assert!(count <= basis.len());
    loop {
        let draws: Vec<PureState> = (0..count)
            .filter_map(|_| {
                let mut amps = [C64::new(0.0, 0.0); 4];
                for b in basis {
                    let g = gaussian(rng);
                    for (a, x) in amps.iter_mut().zip(b.amplitudes()) {
                        *a += g * x;
                    }
                }
                PureState::new(amps).ok()
            })
            .collect();
        let frame = Subspace::span(&draws);
        if frame.dim() == count {
            return frame.basis().to_vec();
        }
    }
}

fn computational() -> Vec<PureState> {
    (0..4).map(PureState::basis).collect()
}

/// `count` random orthonormal states orthogonal to every state in `fixed`.
fn fill_complement(rng: &mut ChaCha8Rng, fixed: &[PureState], count: usize) -> Vec<PureState> {
    let k = orthocomplement(fixed).expect("proper subspace");
    random_orthonormal_in(rng, k.basis(), count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleFamily {
    /// Haar-random orthonormal triple.
    Generic,
    /// Triple spanning the complement of a random product state.
    ProductComplement,
    /// As above, with one product member.
    ProductComplementWithProduct,
    /// One random product member, the rest generic.
    ProductMember,
    /// Two product members.
    TwoProducts,
    /// Three maximally entangled members.
    MaxEntangled,
}

impl TripleFamily {
    pub const ALL: [TripleFamily; 6] = [
        TripleFamily::Generic,
        TripleFamily::ProductComplement,
        TripleFamily::ProductComplementWithProduct,
        TripleFamily::ProductMember,
        TripleFamily::TwoProducts,
        TripleFamily::MaxEntangled,
    ];
}

pub fn random_triple_of(rng: &mut ChaCha8Rng, family: TripleFamily) -> OrthogonalSet {
    let states = match family {
        TripleFamily::Generic => random_orthonormal_in(rng, &computational(), 3),
        TripleFamily::ProductComplement => {
            let p = random_product(rng);
            fill_complement(rng, &[p], 3)
        }
        TripleFamily::ProductComplementWithProduct => {
            let (x, y) = (random_qubit(rng), random_qubit(rng));
            let p = PureState::product(&x, &y);
            let member = PureState::product(&x.orthogonal(), &random_qubit(rng));
            let mut states = vec![member];
            states.extend(fill_complement(rng, &[p, member], 2));
            states
        }
        TripleFamily::ProductMember => {
            let q = random_product(rng);
            let mut states = vec![q];
            states.extend(fill_complement(rng, &[q], 2));
            states
        }
        TripleFamily::TwoProducts => {
            let (x, y) = (random_qubit(rng), random_qubit(rng));
            let a = PureState::product(&x, &y);
            let b = PureState::product(&x.orthogonal(), &random_qubit(rng));
            let mut states = vec![a, b];
            states.extend(fill_complement(rng, &[a, b], 1));
            states
        }
        TripleFamily::MaxEntangled => return ueb::random_max_entangled_triple(rng.random()),
    };
    OrthogonalSet::new(states).expect("orthonormal by construction")
}

/// A random orthogonal triple from a uniformly chosen family.
pub fn random_orthogonal_triple(rng: &mut ChaCha8Rng) -> (TripleFamily, OrthogonalSet) {
    let family = TripleFamily::ALL[rng.random_range(0..TripleFamily::ALL.len())];
    (family, random_triple_of(rng, family))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFamily {
    /// Columns of a Haar-random unitary.
    Generic,
    /// One random product member, the rest generic.
    OneProduct,
    /// Two product members `x y`, `x_perp y'`, the rest generic.
    TwoProducts,
    /// Three product members; the fourth is whatever remains.
    ThreeProducts,
    /// `(A (x) B)` applied to the computational basis.
    LocalRotation,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 5] = [
        BasisFamily::Generic,
        BasisFamily::OneProduct,
        BasisFamily::TwoProducts,
        BasisFamily::ThreeProducts,
        BasisFamily::LocalRotation,
    ];
}

pub fn random_basis_of(rng: &mut ChaCha8Rng, family: BasisFamily) -> OrthogonalSet {
    let states = match family {
        BasisFamily::Generic => random_orthonormal_in(rng, &computational(), 4),
        BasisFamily::OneProduct => {
            let q = random_product(rng);
            let mut states = vec![q];
            states.extend(fill_complement(rng, &[q], 3));
            states
        }
        BasisFamily::TwoProducts => {
            let (x, y) = (random_qubit(rng), random_qubit(rng));
            let a = PureState::product(&x, &y);
            let b = PureState::product(&x.orthogonal(), &random_qubit(rng));
            let mut states = vec![a, b];
            states.extend(fill_complement(rng, &[a, b], 2));
            states
        }
        BasisFamily::ThreeProducts => {
            let (x, y, z) = (random_qubit(rng), random_qubit(rng), random_qubit(rng));
            let mut states = vec![
                PureState::product(&x, &y),
                PureState::product(&x, &y.orthogonal()),
                PureState::product(&x.orthogonal(), &z),
            ];
            states.extend(fill_complement(rng, &states.clone(), 1));
            states
        }
        BasisFamily::LocalRotation => {
            let (x, y) = (random_qubit(rng), random_qubit(rng));
            let (xp, yp) = (x.orthogonal(), y.orthogonal());
            vec![
                PureState::product(&x, &y),
                PureState::product(&x, &yp),
                PureState::product(&xp, &y),
                PureState::product(&xp, &yp),
            ]
        }
    };
    OrthogonalSet::new(states).expect("orthonormal by construction")
}

pub fn random_basis(rng: &mut ChaCha8Rng) -> (BasisFamily, OrthogonalSet) {
    let family = BasisFamily::ALL[rng.random_range(0..BasisFamily::ALL.len())];
    (family, random_basis_of(rng, family))
}

/// A random two-dimensional subspace: generic with probability 3/5, else
/// containing a chosen product state, or made entirely of product states.
pub fn random_subspace_2d(rng: &mut ChaCha8Rng) -> Subspace {
    let basis = match rng.random_range(0..5) {
        0..=2 => random_orthonormal_in(rng, &computational(), 2),
        3 => {
            let p = random_product(rng);
            let mut states = vec![p];
            states.extend(fill_complement(rng, &[p], 1));
            states
        }
        _ => {
            let x = random_qubit(rng);
            let free = random_orthonormal_in(rng, &[PureState::basis(0), PureState::basis(1)], 2);
            free.iter()
                .map(|f| {
                    let a = f.amplitudes();
                    PureState::product(&x, &Qubit::new(a[0], a[1]).expect("unit vector"))
                })
                .collect()
        }
    };
    Subspace::new(basis, 1e-12).expect("orthonormal by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a = random_state(&mut rng_for(1, 0));
        assert_eq!(a, random_state(&mut rng_for(1, 0)));
        assert_ne!(a, random_state(&mut rng_for(1, 1)));
        assert_ne!(a, random_state(&mut rng_for(2, 0)));
    }

    #[test]
    fn families_have_expected_entanglement_structure() {
        let mut rng = rng_for(11, 0);
        for _ in 0..20 {
            let two = random_triple_of(&mut rng, TripleFamily::TwoProducts);
            assert!(two.entangled_count() <= 1);
            let with = random_triple_of(&mut rng, TripleFamily::ProductComplementWithProduct);
            assert_eq!(with.entangled_count(), 2);
            let three = random_basis_of(&mut rng, BasisFamily::ThreeProducts);
            assert_eq!(three.entangled_count(), 0);
            let local = random_basis_of(&mut rng, BasisFamily::LocalRotation);
            assert_eq!(local.entangled_count(), 0);
        }
    }

    #[test]
    fn subspaces_are_two_dimensional() {
        let mut rng = rng_for(5, 0);
        for _ in 0..50 {
            assert_eq!(random_subspace_2d(&mut rng).dim(), 2);
        }
    }
}
