//! Classification reports in human-readable and JSON form.

use std::fmt::Write as _;

use serde::Serialize;

use super::document::{amplitudes_of, Amplitudes, EnsembleDocument};
use super::fmt_g12;
use crate::discrimination::{classify, IdentifiabilityReport, NonlocalityClass};
use crate::ensemble::OrthogonalSet;
use crate::error::Result;
use crate::qstate::entanglement_profile_with;
use crate::ueb::{self, UebFailure};

#[derive(Clone, Debug, Serialize)]
pub struct WitnessEntry {
    pub amplitudes: Amplitudes,
    pub overlap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateEntry {
    pub index: usize,
    pub label: Option<String>,
    pub amplitudes: Amplitudes,
    pub concurrence: f64,
    pub schmidt_coefficients: [f64; 2],
    pub entropy: f64,
    pub identifiable: bool,
    pub near_threshold: bool,
    pub witness: Option<WitnessEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UebEntry {
    pub is_ueb: bool,
    pub failure: Option<String>,
    pub complement: Amplitudes,
    pub complement_concurrence: f64,
    pub spans_ueb: bool,
    /// A UEB with the same span, when one exists.
    pub spanning_ueb: Option<Vec<Amplitudes>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub class: String,
    pub entangled_count: usize,
    pub unidentifiable: Vec<usize>,
    pub perfectly_distinguishable: bool,
    pub conclusively_distinguishable: bool,
    pub average_entanglement: f64,
    pub states: Vec<StateEntry>,
    pub ueb: Option<UebEntry>,
    pub declared_class: Option<String>,
}

fn failure_text(f: &UebFailure) -> String {
    match f {
        UebFailure::NotAllEntangled { index } => {
            format!("NotAllEntangled (state {index} is product)")
        }
        UebFailure::EntangledComplement => "EntangledComplement".into(),
    }
}

impl ClassifyReport {
    pub fn build(set: &OrthogonalSet, doc: Option<&EnsembleDocument>) -> Result<Self> {
        let (class, report): (NonlocalityClass, IdentifiabilityReport) = classify(set)?;
        let eps_zero = set.tolerances().eps_zero;
        let states = report
            .per_state
            .iter()
            .map(|v| {
                let s = &set.states()[v.index];
                let p = entanglement_profile_with(s, eps_zero);
                StateEntry {
                    index: v.index,
                    label: doc.and_then(|d| d.label(v.index)).map(str::to_string),
                    amplitudes: amplitudes_of(s),
                    concurrence: p.concurrence,
                    schmidt_coefficients: [p.schmidt_coefficients.0, p.schmidt_coefficients.1],
                    entropy: p.entropy,
                    identifiable: v.identifiable,
                    near_threshold: v.near_threshold,
                    witness: v.witness.map(|w| WitnessEntry {
                        amplitudes: amplitudes_of(&w.state),
                        overlap: w.overlap,
                    }),
                }
            })
            .collect();
        let ueb = if set.len() == 3 {
            let v = ueb::ueb_check(set)?;
            let span = ueb::ueb_spanning_check(set)?;
            Some(UebEntry {
                is_ueb: v.is_ueb,
                failure: v.failure.as_ref().map(failure_text),
                complement: amplitudes_of(&v.complement_state),
                complement_concurrence: v.complement_concurrence,
                spans_ueb: span.spans_ueb,
                spanning_ueb: span
                    .witness
                    .map(|w| w.states().iter().map(amplitudes_of).collect()),
            })
        } else {
            None
        };
        Ok(ClassifyReport {
            class: class.label.to_string(),
            entangled_count: class.entangled_count,
            unidentifiable: report.unidentifiable(),
            perfectly_distinguishable: report.perfectly_distinguishable,
            conclusively_distinguishable: report.conclusively_distinguishable,
            average_entanglement: set.average_entanglement(),
            states,
            ueb,
            declared_class: doc.and_then(|d| d.class.clone()),
        })
    }

    /// `Some(false)` when the document declared a different class.
    pub fn matches_declared(&self) -> Option<bool> {
        self.declared_class.as_ref().map(|c| *c == self.class)
    }

    pub fn summary_line(&self) -> String {
        let mut line = self.class.clone();
        if self.states.len() == 4 {
            let yes_no = if self.conclusively_distinguishable {
                "yes"
            } else {
                "no"
            };
            write!(line, "; conclusively distinguishable: {yes_no}").unwrap();
            return line;
        }
        let list = self
            .unidentifiable
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        match self.unidentifiable.len() {
            0 => line.push_str("; unidentifiable: none"),
            1 => write!(line, "; unidentifiable: state {list}").unwrap(),
            _ => write!(line, "; unidentifiable: states {list}").unwrap(),
        }
        if let Some(u) = &self.ueb {
            write!(line, "; UEB: {}", if u.is_ueb { "yes" } else { "no" }).unwrap();
        }
        line
    }

    pub fn to_text(&self) -> String {
        let mut out = self.summary_line() + "\n";
        writeln!(
            out,
            "entangled members: {}; average entanglement: {} ebits",
            self.entangled_count,
            fmt_g12(self.average_entanglement)
        )
        .unwrap();
        for s in &self.states {
            let name = match &s.label {
                Some(l) => format!("state {} ({l})", s.index),
                None => format!("state {}", s.index),
            };
            writeln!(
                out,
                "{name}: {}; concurrence {}; entropy {}",
                if s.identifiable {
                    "identifiable"
                } else {
                    "unidentifiable"
                },
                fmt_g12(s.concurrence),
                fmt_g12(s.entropy)
            )
            .unwrap();
            if let Some(w) = &s.witness {
                writeln!(
                    out,
                    "  witness {} overlap {}",
                    fmt_amplitudes(&w.amplitudes),
                    fmt_g12(w.overlap)
                )
                .unwrap();
            }
            if s.near_threshold {
                writeln!(
                    out,
                    "  warning: witness overlap is within the tolerance warning band"
                )
                .unwrap();
            }
        }
        if let Some(u) = &self.ueb {
            writeln!(
                out,
                "complement {} concurrence {}",
                fmt_amplitudes(&u.complement),
                fmt_g12(u.complement_concurrence)
            )
            .unwrap();
            if let Some(f) = &u.failure {
                writeln!(out, "not a UEB: {f}").unwrap();
            }
            writeln!(
                out,
                "spanned by a UEB: {}",
                if u.spans_ueb { "yes" } else { "no" }
            )
            .unwrap();
            if let Some(w) = &u.spanning_ueb {
                for (k, a) in w.iter().enumerate() {
                    writeln!(out, "  spanning UEB member {k}: {}", fmt_amplitudes(a)).unwrap();
                }
            }
        }
        match (self.declared_class.as_ref(), self.matches_declared()) {
            (Some(c), Some(true)) => writeln!(out, "declared class {c}: confirmed").unwrap(),
            (Some(c), _) => writeln!(out, "declared class {c}: MISMATCH").unwrap(),
            _ => {}
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }
}

pub fn fmt_amplitudes(a: &Amplitudes) -> String {
    let parts: Vec<String> = a
        .iter()
        .map(|[re, im]| format!("[{}, {}]", fmt_g12(*re), fmt_g12(*im)))
        .collect();
    format!("[{}]", parts.join(", "))
}
