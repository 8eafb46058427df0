//! The ensemble document: a JSON file listing amplitude quadruples.
//!
//! ```json
//! {
//!   "states": [[[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]], ...],
//!   "labels": ["phi+", ...],
//!   "tolerances": {"eps_orth": 1e-9},
//!   "class": "ConclusiveOnly"
//! }
//! ```
//!
//! Amplitudes are `[re, im]` pairs in the order |00>, |01>, |10>, |11>.
//! `class` is the label declared by whoever produced the file.

use serde::{Deserialize, Serialize};

use crate::ensemble::OrthogonalSet;
use crate::error::Error;
use crate::qstate::{PureState, C64};
use crate::tolerance::Tolerances;

pub type Amplitudes = [[f64; 2]; 4];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_orth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_overlap: Option<f64>,
}

impl ToleranceOverrides {
    /// Sets one tolerance by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), DocumentError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(DocumentError::Tolerance(format!(
                "{name}={value} must be positive"
            )));
        }
        let slot = match name {
            "eps_norm" => &mut self.eps_norm,
            "eps_zero" => &mut self.eps_zero,
            "eps_orth" => &mut self.eps_orth,
            "tau_overlap" => &mut self.tau_overlap,
            _ => {
                return Err(DocumentError::Tolerance(format!(
                    "unknown tolerance '{name}'"
                )))
            }
        };
        *slot = Some(value);
        Ok(())
    }

    /// Parses `name=value`.
    pub fn set_from_flag(&mut self, flag: &str) -> Result<(), DocumentError> {
        let (name, value) = flag
            .split_once('=')
            .ok_or_else(|| DocumentError::Tolerance(format!("'{flag}' is not name=value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| DocumentError::Tolerance(format!("'{value}' is not a number")))?;
        self.set(name.trim(), value)
    }

    pub fn merged_over(&self, base: &ToleranceOverrides) -> ToleranceOverrides {
        ToleranceOverrides {
            eps_norm: self.eps_norm.or(base.eps_norm),
            eps_zero: self.eps_zero.or(base.eps_zero),
            eps_orth: self.eps_orth.or(base.eps_orth),
            tau_overlap: self.tau_overlap.or(base.tau_overlap),
        }
    }

    pub fn apply(&self) -> Result<Tolerances, DocumentError> {
        let d = Tolerances::DEFAULT;
        let t = Tolerances {
            eps_norm: self.eps_norm.unwrap_or(d.eps_norm),
            eps_zero: self.eps_zero.unwrap_or(d.eps_zero),
            eps_orth: self.eps_orth.unwrap_or(d.eps_orth),
            tau_overlap: self.tau_overlap.unwrap_or(d.tau_overlap),
        };
        for (name, v) in [
            ("eps_norm", t.eps_norm),
            ("eps_zero", t.eps_zero),
            ("eps_orth", t.eps_orth),
            ("tau_overlap", t.tau_overlap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DocumentError::Tolerance(format!(
                    "{name}={v} must be positive"
                )));
            }
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDocument {
    pub states: Vec<Amplitudes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("labels: {found} labels for {expected} states")]
    LabelCount { expected: usize, found: usize },
    #[error("states[{index}]: {source}")]
    State { index: usize, source: Error },
    #[error("{0}")]
    Set(Error),
    #[error("tolerance: {0}")]
    Tolerance(String),
}

pub fn amplitudes_of(s: &PureState) -> Amplitudes {
    s.amplitudes().map(|a| [a.re, a.im])
}

impl EnsembleDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = match e.path().to_string() {
                p if p == "." => "document".to_string(),
                p => p,
            };
            DocumentError::Parse {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn from_set(
        set: &OrthogonalSet,
        labels: Option<Vec<String>>,
        class: Option<String>,
    ) -> Self {
        EnsembleDocument {
            states: set.states().iter().map(amplitudes_of).collect(),
            labels,
            tolerances: None,
            class,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    /// Builds the validated set; `overrides` take precedence over the
    /// document's own tolerances.
    pub fn to_set(&self, overrides: &ToleranceOverrides) -> Result<OrthogonalSet, DocumentError> {
        if let Some(labels) = &self.labels {
            if labels.len() != self.states.len() {
                return Err(DocumentError::LabelCount {
                    expected: self.states.len(),
                    found: labels.len(),
                });
            }
        }
        let tol = overrides
            .merged_over(
                self.tolerances
                    .as_ref()
                    .unwrap_or(&ToleranceOverrides::default()),
            )
            .apply()?;
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(index, amps)| {
                let amps = amps.map(|[re, im]| C64::new(re, im));
                PureState::with_zero_threshold(amps, tol.eps_zero)
                    .map_err(|source| DocumentError::State { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        OrthogonalSet::with_tolerances(states, tol).map_err(DocumentError::Set)
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels
            .as_ref()
            .and_then(|l| l.get(i))
            .map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::bell;

    #[test]
    fn round_trip() {
        let set = OrthogonalSet::new(vec![bell::phi_plus(), bell::psi_minus()]).unwrap();
        let doc = EnsembleDocument::from_set(&set, Some(vec!["a".into(), "b".into()]), None);
        let back = EnsembleDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let again = back.to_set(&ToleranceOverrides::default()).unwrap();
        for (x, y) in again.states().iter().zip(set.states()) {
            assert!(x.same_ray(y, 1e-15));
        }
    }

    #[test]
    fn malformed_amplitude_names_the_field() {
        let text = r#"{"states": [[[1, 0], [0, 0], [0, "x"], [0, 0]]]}"#;
        let err = EnsembleDocument::parse(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("states[0][2][1]"), "{msg}");
    }

    #[test]
    fn non_orthogonal_pair_is_reported() {
        let text = r#"{"states": [[[1,0],[0,0],[0,0],[0,0]], [[1,0],[1,0],[0,0],[0,0]]]}"#;
        let err = EnsembleDocument::parse(text)
            .unwrap()
            .to_set(&ToleranceOverrides::default())
            .unwrap_err();
        match err {
            DocumentError::Set(Error::NotOrthogonal {
                first,
                second,
                overlap,
            }) => {
                assert_eq!((first, second), (0, 1));
                assert!((overlap - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn tolerance_flags() {
        let mut o = ToleranceOverrides::default();
        o.set_from_flag("eps_orth=1e-6").unwrap();
        assert_eq!(o.apply().unwrap().eps_orth, 1e-6);
        assert!(o.set_from_flag("eps_bogus=1").is_err());
        assert!(o.set_from_flag("eps_zero=-1").is_err());
        assert!(o.set_from_flag("eps_zero").is_err());
    }

    #[test]
    fn label_count_mismatch() {
        let text = r#"{"states": [[[1,0],[0,0],[0,0],[0,0]]], "labels": ["a", "b"]}"#;
        let err = EnsembleDocument::parse(text)
            .unwrap()
            .to_set(&ToleranceOverrides::default())
            .unwrap_err();
        assert!(matches!(
            err,
            DocumentError::LabelCount {
                expected: 1,
                found: 2
            }
        ));
    }
}
