//! Exact enumeration of product states inside subspaces of `C^2 (x) C^2`.
//!
//! A state `a u + b v` of a two-dimensional span is a product state exactly
//! when the determinant of its coefficient matrix vanishes. That determinant
//! is a homogeneous quadratic in `(a, b)`:
//!
//! ```text
//! q(a, b) = det U a^2 + (U00 V11 + V00 U11 - U01 V10 - V01 U10) a b + det V b^2
//! ```
//!
//! which over the complex projective line has one double root, two simple
//! roots, or vanishes identically (every element of the span is a product).

use crate::ensemble::OrthogonalSet;
use crate::error::{Error, Result};
use crate::qstate::{CoefficientMatrix, PureState, Qubit, C64};
use crate::tolerance::Tolerances;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Residual norm below which a vector is treated as linearly dependent.
const RANK_EPS: f64 = 1e-7;

fn axpy(alpha: C64, x: &[C64; 4], y: &mut [C64; 4]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * xi;
    }
}

fn norm4(v: &[C64; 4]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn project_out(v: &mut [C64; 4], basis: &[[C64; 4]]) {
    for _ in 0..2 {
        for q in basis {
            let c = crate::qstate::inner4(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Modified Gram-Schmidt; dependent inputs are dropped.
fn orthonormalize(vectors: impl IntoIterator<Item = [C64; 4]>) -> Vec<[C64; 4]> {
    let mut basis: Vec<[C64; 4]> = Vec::new();
    for mut v in vectors {
        let before = norm4(&v);
        project_out(&mut v, &basis);
        let n = norm4(&v);
        if n > RANK_EPS * before.max(1.0) {
            basis.push(v.map(|a| a / n));
        }
    }
    basis
}

/// A subspace given by an orthonormal basis of 1 to 4 states.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Vec<PureState>,
}

impl Subspace {
    /// Checks that `basis` is orthonormal within `eps_orth`.
    pub fn new(basis: Vec<PureState>, eps_orth: f64) -> Result<Self> {
        if !(1..=4).contains(&basis.len()) {
            return Err(Error::BadCardinality {
                expected: "1 to 4",
                found: basis.len(),
            });
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate().skip(i + 1) {
                let deviation = a.overlap(b);
                if !(deviation < eps_orth) {
                    return Err(Error::NotOrthonormal {
                        first: i,
                        second: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Subspace { basis })
    }

    /// The span of arbitrary (possibly dependent) states.
    pub fn span(states: &[PureState]) -> Self {
        let basis = orthonormalize(states.iter().map(|s| *s.amplitudes()))
            .into_iter()
            .map(|v| PureState::new(v).expect("unit vector"))
            .collect();
        Subspace { basis }
    }

    pub fn of_set(set: &OrthogonalSet) -> Self {
        Subspace {
            basis: set.states().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    /// Orthogonal projector onto the subspace, as a dense 4x4 matrix.
    pub fn projector(&self) -> [[C64; 4]; 4] {
        let mut p = [[ZERO; 4]; 4];
        for q in &self.basis {
            let a = q.amplitudes();
            for r in 0..4 {
                for c in 0..4 {
                    p[r][c] += a[r] * a[c].conj();
                }
            }
        }
        p
    }

    /// Norm of the orthogonal projection of `s` onto the subspace.
    pub fn projection_norm(&self, s: &PureState) -> f64 {
        self.basis
            .iter()
            .map(|q| q.inner(s).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Orthonormal basis of the orthogonal complement of `span(states)`.
pub fn orthocomplement(states: &[PureState]) -> Result<Subspace> {
    let mut basis = orthonormalize(states.iter().map(|s| *s.amplitudes()));
    if basis.len() >= 4 {
        return Err(Error::FullSpace);
    }
    let start = basis.len();
    while basis.len() < 4 {
        // extend by the computational basis vector that survives projection best
        let best = (0..4)
            .map(|k| {
                let mut e = [ZERO; 4];
                e[k] = C64::new(1.0, 0.0);
                project_out(&mut e, &basis);
                e
            })
            .max_by(|x, y| norm4(x).total_cmp(&norm4(y)))
            .expect("four candidates");
        let n = norm4(&best);
        basis.push(best.map(|a| a / n));
    }
    let basis = basis[start..]
        .iter()
        .map(|v| PureState::new(*v).expect("unit vector"))
        .collect();
    Ok(Subspace { basis })
}

pub fn orthocomplement_of_set(set: &OrthogonalSet) -> Result<Subspace> {
    orthocomplement(set.states())
}

/// A root `(a, b)` of a binary quadratic form, scaled so `max(|a|, |b|) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveRoot {
    pub a: C64,
    pub b: C64,
    pub multiplicity: u8,
}

impl ProjectiveRoot {
    fn new(a: C64, b: C64, multiplicity: u8) -> Self {
        let scale = if a.norm() >= b.norm() { a } else { b };
        ProjectiveRoot {
            a: a / scale,
            b: b / scale,
            multiplicity,
        }
    }

    /// Same projective point as `other` within `tol` (cross-ratio test).
    pub fn same_point(&self, other: &ProjectiveRoot, tol: f64) -> bool {
        (self.a * other.b - self.b * other.a).norm() < tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadraticRoots {
    IdenticallyZero,
    Roots(Vec<ProjectiveRoot>),
}

/// Roots of `c2 a^2 + c1 a b + c0 b^2` on the projective line.
pub fn quadratic_roots(c2: C64, c1: C64, c0: C64) -> QuadraticRoots {
    quadratic_roots_with(
        c2,
        c1,
        c0,
        Tolerances::DEFAULT.eps_zero,
        Tolerances::EPS_DISC,
    )
}

pub fn quadratic_roots_with(
    c2: C64,
    c1: C64,
    c0: C64,
    eps_zero: f64,
    eps_disc: f64,
) -> QuadraticRoots {
    let scale = c2.norm().max(c1.norm()).max(c0.norm());
    if scale < eps_zero {
        return QuadraticRoots::IdenticallyZero;
    }
    let (c2, c1, c0) = (c2 / scale, c1 / scale, c0 / scale);
    let disc = c1 * c1 - 4.0 * c2 * c0;

    if disc.norm() < eps_disc {
        // solve in whichever affine chart keeps the leading coefficient large
        let root = if c2.norm() >= c0.norm() {
            ProjectiveRoot::new(-c1, 2.0 * c2, 2)
        } else {
            ProjectiveRoot::new(2.0 * c0, -c1, 2)
        };
        return QuadraticRoots::Roots(vec![root]);
    }

    let sqrt_disc = disc.sqrt();
    // pick the sign that avoids cancellation in c1 + sqrt_disc
    let sigma = if (c1.conj() * sqrt_disc).re >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let q = -(c1 + sigma * sqrt_disc) / 2.0;
    // a/b = q/c2 and a/b = c0/q, written projectively to allow c2 = 0 or c0 = 0
    QuadraticRoots::Roots(vec![
        ProjectiveRoot::new(q, c2, 1),
        ProjectiveRoot::new(c0, q, 1),
    ])
}

/// Coefficients `[c2, c1, c0]` of `det(a U + b V)`.
pub fn determinant_quadratic(u: &CoefficientMatrix, v: &CoefficientMatrix) -> [C64; 3] {
    let (u, v) = (&u.0, &v.0);
    let mixed = u[0][0] * v[1][1] + v[0][0] * u[1][1] - u[0][1] * v[1][0] - v[0][1] * u[1][0];
    [
        CoefficientMatrix(*u).det(),
        mixed,
        CoefficientMatrix(*v).det(),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSide {
    Left,
    Right,
}

/// A two-dimensional span made entirely of product states: every element is
/// `factor (x) anything` (left side fixed) or `anything (x) factor`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFamily {
    pub side: FactorSide,
    pub factor: Qubit,
    pub representatives: Vec<PureState>,
}

impl ProductFamily {
    fn new(side: FactorSide, factor: Qubit) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let free = [
            Qubit::zero(),
            Qubit::one(),
            Qubit::new(C64::new(h, 0.0), C64::new(h, 0.0)).unwrap(),
        ];
        let representatives = free
            .iter()
            .map(|q| Self::member(side, &factor, q))
            .collect();
        ProductFamily {
            side,
            factor,
            representatives,
        }
    }

    fn member(side: FactorSide, factor: &Qubit, free: &Qubit) -> PureState {
        match side {
            FactorSide::Left => PureState::product(factor, free),
            FactorSide::Right => PureState::product(free, factor),
        }
    }

    /// The family member with the largest overlap with `target`, if any
    /// member is nonorthogonal to it.
    pub fn best_member(&self, target: &PureState) -> Option<PureState> {
        let m = target.coefficient_matrix().0;
        let [f0, f1] = self.factor.amplitudes();
        let free = match self.side {
            FactorSide::Left => Qubit::new(
                f0.conj() * m[0][0] + f1.conj() * m[1][0],
                f0.conj() * m[0][1] + f1.conj() * m[1][1],
            ),
            FactorSide::Right => Qubit::new(
                f0.conj() * m[0][0] + f1.conj() * m[0][1],
                f0.conj() * m[1][0] + f1.conj() * m[1][1],
            ),
        };
        free.ok().map(|q| Self::member(self.side, &self.factor, &q))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductRoot {
    pub state: PureState,
    pub multiplicity: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProductStateEnumeration {
    /// One or two product states (a double root is listed once).
    Finite(Vec<ProductRoot>),
    AllProduct(ProductFamily),
}

impl ProductStateEnumeration {
    /// Listed roots, or the family representatives.
    pub fn states(&self) -> Vec<PureState> {
        match self {
            ProductStateEnumeration::Finite(roots) => roots.iter().map(|r| r.state).collect(),
            ProductStateEnumeration::AllProduct(family) => family.representatives.clone(),
        }
    }
}

/// Best rank-one factorization of a coefficient matrix, `m ~ left right^T`.
fn rank_one_factors(m: &CoefficientMatrix) -> (Qubit, Qubit) {
    let m = m.0;
    let col_norm = |c: usize| m[0][c].norm_sqr() + m[1][c].norm_sqr();
    let c_star = if col_norm(0) >= col_norm(1) { 0 } else { 1 };
    let left = Qubit::new(m[0][c_star], m[1][c_star]).expect("nonzero column");
    let [l0, l1] = left.amplitudes();
    let right = Qubit::new(
        l0.conj() * m[0][0] + l1.conj() * m[1][0],
        l0.conj() * m[0][1] + l1.conj() * m[1][1],
    )
    .expect("nonzero row combination");
    (left, right)
}

pub fn product_states_in_2d(sub: &Subspace) -> Result<ProductStateEnumeration> {
    product_states_in_2d_with(sub, &Tolerances::DEFAULT)
}

/// All product states in a two-dimensional subspace.
pub fn product_states_in_2d_with(
    sub: &Subspace,
    tol: &Tolerances,
) -> Result<ProductStateEnumeration> {
    if sub.dim() != 2 {
        return Err(Error::BadDimension {
            expected: 2,
            found: sub.dim(),
        });
    }
    let (u, v) = (&sub.basis[0], &sub.basis[1]);
    let (um, vm) = (u.coefficient_matrix(), v.coefficient_matrix());
    let [c2, c1, c0] = determinant_quadratic(&um, &vm);

    match quadratic_roots_with(c2, c1, c0, tol.eps_zero, Tolerances::EPS_DISC) {
        QuadraticRoots::IdenticallyZero => {
            let (x1, y1) = rank_one_factors(&um);
            let (x2, y2) = rank_one_factors(&vm);
            let family = if x1.inner(&x2).norm() >= y1.inner(&y2).norm() {
                ProductFamily::new(FactorSide::Left, x1)
            } else {
                ProductFamily::new(FactorSide::Right, y1)
            };
            Ok(ProductStateEnumeration::AllProduct(family))
        }
        QuadraticRoots::Roots(roots) => {
            let mut found: Vec<ProductRoot> = Vec::with_capacity(2);
            for root in roots {
                let mut amps = *u.amplitudes();
                for a in amps.iter_mut() {
                    *a *= root.a;
                }
                let mut vb = *v.amplitudes();
                for b in vb.iter_mut() {
                    *b *= root.b;
                }
                axpy(C64::new(1.0, 0.0), &vb, &mut amps);
                let state = PureState::new(amps)?;
                match found.iter_mut().find(|r| r.state.same_ray(&state, 1e-12)) {
                    Some(existing) => existing.multiplicity += root.multiplicity,
                    None => found.push(ProductRoot {
                        state,
                        multiplicity: root.multiplicity,
                    }),
                }
            }
            Ok(ProductStateEnumeration::Finite(found))
        }
    }
}
