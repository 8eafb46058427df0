//! Conclusive identification under LOCC and the nonlocality hierarchy.
//!
//! A member `psi_i` of an orthogonal set is conclusively identifiable by LOCC
//! iff some product state is nonorthogonal to `psi_i` and orthogonal to every
//! other member. Such a product state lies in the orthocomplement `K` of the
//! other members, so the search reduces to enumerating product states of `K`:
//!
//! * 2 states: always identifiable (two orthogonal pure states are perfectly
//!   distinguishable by LOCC); a witness is still searched for.
//! * 3 states: `K` is two-dimensional and its product states are the roots of
//!   the determinant quadratic.
//! * 4 states: `K = span{psi_i}`, so `psi_i` itself must be a product state.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;

use crate::ensemble::OrthogonalSet;
use crate::error::{Error, Result};
use crate::product_finder::{
    orthocomplement, product_states_in_2d_with, ProductStateEnumeration, Subspace,
};
use crate::qstate::{self, PureState, Qubit};
use crate::tolerance::Tolerances;
use crate::ueb;

/// A product state certifying conclusive identifiability of one member.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub state: PureState,
    /// `|<witness|psi_i>|`
    pub overlap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Identification {
    pub identifiable: bool,
    pub witness: Option<Witness>,
    /// The witness overlap sits in `[tau, 1e3 tau]`, close to the zero threshold.
    pub near_threshold: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVerdict {
    pub index: usize,
    pub identifiable: bool,
    pub witness: Option<Witness>,
    pub near_threshold: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentifiabilityReport {
    pub per_state: Vec<StateVerdict>,
    pub conclusively_distinguishable: bool,
    pub perfectly_distinguishable: bool,
}

impl IdentifiabilityReport {
    pub fn unidentifiable(&self) -> Vec<usize> {
        self.per_state
            .iter()
            .filter(|v| !v.identifiable)
            .map(|v| v.index)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NonlocalityLabel {
    PerfectLOCC,
    ConclusiveOnly,
    OneUnidentifiable,
    TwoUnidentifiable,
    /// A complete basis with the given number of entangled members.
    CompleteBasis(usize),
}

impl NonlocalityLabel {
    /// Position in `PerfectLOCC < ConclusiveOnly < OneUnidentifiable <
    /// TwoUnidentifiable`; complete bases are ranked separately.
    fn rank(&self) -> Option<u8> {
        match self {
            NonlocalityLabel::PerfectLOCC => Some(0),
            NonlocalityLabel::ConclusiveOnly => Some(1),
            NonlocalityLabel::OneUnidentifiable => Some(2),
            NonlocalityLabel::TwoUnidentifiable => Some(3),
            NonlocalityLabel::CompleteBasis(_) => None,
        }
    }
}

impl PartialOrd for NonlocalityLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (NonlocalityLabel::CompleteBasis(a), NonlocalityLabel::CompleteBasis(b)) => {
                a.partial_cmp(b)
            }
            _ => self.rank()?.partial_cmp(&other.rank()?),
        }
    }
}

impl fmt::Display for NonlocalityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlocalityLabel::CompleteBasis(n) => write!(f, "CompleteBasis({n})"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlocalityClass {
    pub label: NonlocalityLabel,
    pub entangled_count: usize,
    /// Whether the span is also spanned by an unextendible entangled basis
    /// (three-state sets only).
    pub ueb_span: Option<bool>,
}

fn check_index(set: &OrthogonalSet, i: usize) -> Result<()> {
    set.get(i).map(|_| ())
}

/// Picks the admissible candidate with the largest overlap with the target.
fn best_witness(
    set: &OrthogonalSet,
    i: usize,
    candidates: impl IntoIterator<Item = PureState>,
) -> Option<Witness> {
    let tol = set.tolerances();
    let target = &set.states()[i];
    candidates
        .into_iter()
        .filter(|w| qstate::is_product(w, tol.eps_zero))
        .filter(|w| {
            set.states()
                .iter()
                .enumerate()
                .all(|(j, s)| j == i || w.overlap(s) < tol.eps_orth)
        })
        .map(|w| Witness {
            overlap: w.overlap(target),
            state: w,
        })
        .filter(|w| w.overlap > tol.tau_overlap)
        .max_by(|a, b| {
            if (a.overlap - b.overlap).abs() > TIE_EPS {
                a.overlap.total_cmp(&b.overlap)
            } else {
                lexicographic(&a.state, &b.state)
            }
        })
}

/// Overlaps closer than this count as a tie.
const TIE_EPS: f64 = 1e-12;

/// Tie-break on amplitudes, compared as `(re, im)` pairs in basis order.
fn lexicographic(a: &PureState, b: &PureState) -> Ordering {
    let key = |s: &PureState| -> Vec<f64> {
        s.amplitudes()
            .iter()
            .flat_map(|z| [round_tie(z.re), round_tie(z.im)])
            .collect()
    };
    key(a)
        .iter()
        .zip(key(b).iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn round_tie(x: f64) -> f64 {
    (x * 1e9).round()
}

/// Product states of a two-dimensional subspace to try as witnesses for `target`.
fn witness_candidates(
    sub: &Subspace,
    target: &PureState,
    tol: &Tolerances,
) -> Result<Vec<PureState>> {
    Ok(match product_states_in_2d_with(sub, tol)? {
        ProductStateEnumeration::Finite(roots) => roots.iter().map(|r| r.state).collect(),
        ProductStateEnumeration::AllProduct(family) => {
            let mut states = family.representatives.clone();
            states.extend(family.best_member(target));
            states
        }
    })
}

/// Products `x (x) y` orthogonal to `psi`, one per left factor `x` from a
/// fixed set of directions; `y` is fixed by `<x y|psi> = 0`.
fn products_orthogonal_to(psi: &PureState) -> Vec<PureState> {
    let m = psi.coefficient_matrix().0;
    let directions = [
        (0.0, 0.0),
        (PI, 0.0),
        (FRAC_PI_2, 0.0),
        (FRAC_PI_2, PI),
        (FRAC_PI_2, FRAC_PI_2),
        (FRAC_PI_2, -FRAC_PI_2),
        (1.0, 2.0),
        (2.0, 4.0),
    ];
    directions
        .iter()
        .filter_map(|&(theta, phi)| {
            let x = Qubit::from_angles(theta, phi).amplitudes();
            // v_c = sum_r conj(x_r) m[r][c]; need sum_c conj(y_c) v_c = 0
            let v = [0, 1].map(|c| x[0].conj() * m[0][c] + x[1].conj() * m[1][c]);
            let y = Qubit::new(v[1].conj(), -v[0].conj()).ok()?;
            Some(PureState::product(&Qubit::new(x[0], x[1]).ok()?, &y))
        })
        .collect()
}

fn identification(
    set: &OrthogonalSet,
    identifiable: bool,
    witness: Option<Witness>,
) -> Identification {
    let tau = set.tolerances().tau_overlap;
    Identification {
        identifiable,
        near_threshold: witness.is_some_and(|w| w.overlap <= Tolerances::WARNING_BAND * tau),
        witness,
    }
}

/// Chefles witness test for member `i`.
pub fn conclusively_identifiable(set: &OrthogonalSet, i: usize) -> Result<Identification> {
    check_index(set, i)?;
    let tol = set.tolerances();
    let target = set.states()[i];
    let complement = orthocomplement(&set.others(i))?;

    match set.len() {
        2 => {
            // identifiable by rule; look for an explicit witness in the planes
            // spanned by the target and each direction of K orthogonal to it
            let mut candidates = Vec::new();
            for direction in orthocomplement(set.states())?.basis() {
                let plane = Subspace::span(&[target, *direction]);
                candidates.extend(witness_candidates(&plane, &target, tol)?);
            }
            candidates.extend(complement.basis().iter().copied());
            candidates.extend(products_orthogonal_to(&set.states()[1 - i]));
            Ok(identification(set, true, best_witness(set, i, candidates)))
        }
        3 => {
            let candidates = witness_candidates(&complement, &target, tol)?;
            let witness = best_witness(set, i, candidates);
            Ok(identification(set, witness.is_some(), witness))
        }
        4 => {
            let witness = best_witness(set, i, complement.basis().iter().copied());
            Ok(identification(set, witness.is_some(), witness))
        }
        n => Err(Error::BadCardinality {
            expected: "2 to 4",
            found: n,
        }),
    }
}

/// Perfect LOCC distinguishability by the known rules: any two states; three
/// states with at most one entangled member; complete bases of product states.
pub fn perfectly_distinguishable(set: &OrthogonalSet) -> bool {
    let entangled = set.entangled_count();
    match set.len() {
        2 => true,
        3 => entangled <= 1,
        _ => entangled == 0,
    }
}

pub fn identifiability_report(set: &OrthogonalSet) -> Result<IdentifiabilityReport> {
    let per_state = (0..set.len())
        .map(|i| {
            conclusively_identifiable(set, i).map(|id| StateVerdict {
                index: i,
                identifiable: id.identifiable,
                witness: id.witness,
                near_threshold: id.near_threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentifiabilityReport {
        conclusively_distinguishable: per_state.iter().all(|v| v.identifiable),
        perfectly_distinguishable: perfectly_distinguishable(set),
        per_state,
    })
}

/// Places `set` in the nonlocality hierarchy.
pub fn classify(set: &OrthogonalSet) -> Result<(NonlocalityClass, IdentifiabilityReport)> {
    let report = identifiability_report(set)?;
    let entangled_count = set.entangled_count();
    let unidentifiable = report.unidentifiable().len();

    if report.perfectly_distinguishable && !report.conclusively_distinguishable {
        return Err(Error::InternalContradiction(format!(
            "perfectly distinguishable set has unidentifiable members {:?}",
            report.unidentifiable()
        )));
    }

    let (label, ueb_span) = match set.len() {
        2 => (NonlocalityLabel::PerfectLOCC, None),
        3 => {
            let label = if report.perfectly_distinguishable {
                NonlocalityLabel::PerfectLOCC
            } else {
                match unidentifiable {
                    0 => NonlocalityLabel::ConclusiveOnly,
                    1 => NonlocalityLabel::OneUnidentifiable,
                    2 => NonlocalityLabel::TwoUnidentifiable,
                    _ => {
                        return Err(Error::InternalContradiction(
                            "all three members of an orthogonal triple are unidentifiable".into(),
                        ))
                    }
                }
            };
            let spans = ueb::ueb_spanning_check(set)?.spans_ueb;
            (label, Some(spans))
        }
        _ => (NonlocalityLabel::CompleteBasis(entangled_count), None),
    };

    Ok((
        NonlocalityClass {
            label,
            entangled_count,
            ueb_span,
        },
        report,
    ))
}
