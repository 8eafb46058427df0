use crate::error::{Error, Result};
use crate::qstate::{self, PureState};
use crate::tolerance::Tolerances;

/// A validated set of 2 to 4 pairwise-orthogonal two-qubit pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalSet {
    states: Vec<PureState>,
    tolerances: Tolerances,
}

impl OrthogonalSet {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        Self::with_tolerances(states, Tolerances::DEFAULT)
    }

    pub fn with_tolerances(states: Vec<PureState>, tolerances: Tolerances) -> Result<Self> {
        if !(2..=4).contains(&states.len()) {
            return Err(Error::BadCardinality {
                expected: "2 to 4",
                found: states.len(),
            });
        }
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate().skip(i + 1) {
                let overlap = a.overlap(b);
                if !(overlap < tolerances.eps_orth) {
                    return Err(Error::NotOrthogonal {
                        first: i,
                        second: j,
                        overlap,
                    });
                }
            }
        }
        Ok(OrthogonalSet { states, tolerances })
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn get(&self, index: usize) -> Result<&PureState> {
        self.states.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.states.len(),
        })
    }

    /// All members except `index`, in order.
    pub fn others(&self, index: usize) -> Vec<PureState> {
        self.states
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != index)
            .map(|(_, s)| *s)
            .collect()
    }

    /// Members whose concurrence reaches `eps_zero`.
    pub fn entangled_count(&self) -> usize {
        self.states
            .iter()
            .filter(|s| !qstate::is_product(s, self.tolerances.eps_zero))
            .count()
    }

    pub fn average_entanglement(&self) -> f64 {
        qstate::average_entanglement(&self.states, self.tolerances.eps_zero)
            .expect("an orthogonal set is never empty")
    }

    /// Same states in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let states = order
            .iter()
            .map(|&k| self.get(k).copied())
            .collect::<Result<Vec<_>>>()?;
        Self::with_tolerances(states, self.tolerances)
    }
}
