//! The magic basis: four maximally entangled states whose real linear
//! combinations are all maximally entangled.
//!
//! ```text
//! e1 = (|00> + |11>) / sqrt2
//! e2 = i (|00> - |11>) / sqrt2
//! e3 = i (|01> + |10>) / sqrt2
//! e4 = (|01> - |10>) / sqrt2
//! ```
//!
//! For real `x` with `|x| = 1`, `det M(sum x_k e_k) = (x1^2 + x2^2 + x3^2 + x4^2) / 2 = 1/2`,
//! so the concurrence is 1.

use std::f64::consts::FRAC_1_SQRT_2 as H;

use crate::qstate::C64;

const O: C64 = C64::new(0.0, 0.0);
const R: C64 = C64::new(H, 0.0);
const I: C64 = C64::new(0.0, H);

pub const MAGIC_BASIS: [[C64; 4]; 4] = [
    [R, O, O, R],
    [I, O, O, C64::new(0.0, -H)],
    [O, I, I, O],
    [O, R, C64::new(-H, 0.0), O],
];

/// Computational-basis amplitudes of `sum_k coords[k] e_k`.
pub fn from_real_coordinates(coords: &[f64; 4]) -> [C64; 4] {
    let mut out = [O; 4];
    for (x, e) in coords.iter().zip(MAGIC_BASIS.iter()) {
        for (o, a) in out.iter_mut().zip(e.iter()) {
            *o += a * *x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::PureState;
    use proptest::prelude::*;

    #[test]
    fn basis_is_orthonormal_and_maximally_entangled() {
        for (i, a) in MAGIC_BASIS.iter().enumerate() {
            let sa = PureState::new(*a).unwrap();
            assert!((sa.concurrence() - 1.0).abs() < 1e-15);
            for (j, b) in MAGIC_BASIS.iter().enumerate() {
                let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip.norm() - expected).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn real_combinations_are_maximally_entangled(
            x in prop::array::uniform4(-1.0f64..1.0)
        ) {
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assume!(n > 1e-3);
            let unit = x.map(|v| v / n);
            let s = PureState::new(from_real_coordinates(&unit)).unwrap();
            prop_assert!((s.concurrence() - 1.0).abs() < 1e-12);
        }
    }
}
