//! Seeded property batteries. Each suite checks one law over many generated
//! inputs and reports counts, the first violations and the worst values seen.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::discrimination::{classify, conclusively_identifiable, NonlocalityLabel};
use crate::ensemble::OrthogonalSet;
use crate::error::{Error, Result};
use crate::oracle::{GridSpec, Oracle};
use crate::product_finder::{product_states_in_2d, Subspace};
use crate::qstate::{PureState, C64};
use crate::random::{random_basis, random_orthogonal_triple, random_subspace_2d, rng_for};
use crate::ueb::{self, generate_eq1, generate_eq2, GeneratorParams};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Bound on the overlap of a witness with the non-target members.
pub const WITNESS_ORTH: f64 = 1e-9;
/// Bound the target overlap of a witness must exceed.
pub const WITNESS_TARGET: f64 = 1e-7;
pub const LAW_TOL: f64 = 1e-9;

const MAX_LISTED: usize = 10;

/// Evenly spaced parameter values `lo, ..., hi` inside `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid {
            lo: 0.05,
            hi: 0.95,
            steps: 19,
        }
    }
}

impl LambdaGrid {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(Error::BadBounds(format!(
                "bounds {lo}:{hi} must satisfy 0 < lo <= hi < 1"
            )));
        }
        if steps < 2 {
            return Err(Error::BadBounds(format!(
                "steps {steps} must be at least 2"
            )));
        }
        Ok(LambdaGrid { lo, hi, steps })
    }

    /// Parses `lo:hi:steps`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::BadBounds(format!("grid '{text}' is not of the form lo:hi:steps"));
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(bad());
        };
        LambdaGrid::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
            steps.trim().parse().map_err(|_| bad())?,
        )
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / n as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Prop1,
    Prop2,
    Prop3,
    Impossibility,
    UebNecessity,
    CompleteBasis,
    Footnote2,
    Sanpera,
    Bravyi,
    Oracle,
    Span,
    Hierarchy,
    HierarchyCount,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Prop1,
        Suite::Prop2,
        Suite::Prop3,
        Suite::Impossibility,
        Suite::UebNecessity,
        Suite::CompleteBasis,
        Suite::Footnote2,
        Suite::Sanpera,
        Suite::Bravyi,
        Suite::Oracle,
        Suite::Span,
        Suite::Hierarchy,
        Suite::HierarchyCount,
    ];

    /// Suites run when none is requested. `hierarchy` is left out: its
    /// entropy comparison does not hold (see the README).
    pub fn defaults() -> Vec<Suite> {
        Suite::ALL
            .into_iter()
            .filter(|s| *s != Suite::Hierarchy)
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::Impossibility => "impossibility",
            Suite::UebNecessity => "ueb-necessity",
            Suite::CompleteBasis => "complete-basis",
            Suite::Footnote2 => "footnote2",
            Suite::Sanpera => "sanpera",
            Suite::Bravyi => "bravyi",
            Suite::Oracle => "oracle",
            Suite::Span => "span",
            Suite::Hierarchy => "hierarchy",
            Suite::HierarchyCount => "hierarchy-count",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Number of random samples, or `None` for grid suites.
    pub fn default_count(self) -> Option<usize> {
        match self {
            Suite::Prop1 | Suite::CompleteBasis | Suite::Footnote2 | Suite::Bravyi => Some(1000),
            Suite::Impossibility | Suite::UebNecessity | Suite::Sanpera => Some(10_000),
            Suite::Oracle => Some(500),
            _ => None,
        }
    }

    fn stream(self) -> u64 {
        (Suite::ALL.iter().position(|s| *s == self).unwrap() as u64 + 1) << 32
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides the suite's default sample count.
    pub count: Option<usize>,
    pub grid: LambdaGrid,
    pub oracle: GridSpec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            count: None,
            grid: LambdaGrid::default(),
            oracle: GridSpec::default(),
        }
    }
}

impl VerifyConfig {
    fn count(&self, suite: Suite) -> usize {
        self.count.or(suite.default_count()).unwrap_or(0)
    }

    fn rng(&self, suite: Suite, k: usize) -> rand_chacha::ChaCha8Rng {
        rng_for(self.seed, suite.stream() | k as u64)
    }
}

/// Extreme value of a monitored quantity, with the direction that is bad.
#[derive(Clone, Debug, PartialEq)]
pub struct Extreme {
    pub name: &'static str,
    pub value: f64,
    pub largest: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub total: usize,
    pub passed: usize,
    /// The first few violations in sample order.
    pub violations: Vec<String>,
    pub extremes: Vec<Extreme>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {} {}/{} ({:.2} s)",
            self.suite.name(),
            if self.ok() { "PASS" } else { "FAIL" },
            self.passed,
            self.total,
            self.elapsed.as_secs_f64()
        )?;
        for e in &self.extremes {
            write!(
                f,
                "; {} {} {:.3e}",
                if e.largest { "max" } else { "min" },
                e.name,
                e.value
            )?;
        }
        for v in &self.violations {
            write!(f, "\n    {v}")?;
        }
        Ok(())
    }
}

struct Tally {
    suite: Suite,
    total: usize,
    passed: usize,
    violations: Vec<String>,
    extremes: Vec<Extreme>,
    start: Instant,
}

impl Tally {
    fn new(suite: Suite) -> Self {
        Tally {
            suite,
            total: 0,
            passed: 0,
            violations: Vec::new(),
            extremes: Vec::new(),
            start: Instant::now(),
        }
    }

    fn record(&mut self, outcome: std::result::Result<(), String>) {
        self.total += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) if self.violations.len() < MAX_LISTED => self.violations.push(msg),
            Err(_) => {}
        }
    }

    fn watch(&mut self, name: &'static str, value: f64, largest: bool) {
        match self.extremes.iter_mut().find(|e| e.name == name) {
            Some(e) if largest => e.value = e.value.max(value),
            Some(e) => e.value = e.value.min(value),
            None => self.extremes.push(Extreme {
                name,
                value,
                largest,
            }),
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            total: self.total,
            passed: self.passed,
            violations: self.violations,
            extremes: self.extremes,
            elapsed: self.start.elapsed(),
        }
    }
}

/// `(largest overlap with a non-target member, overlap with the target)`.
pub fn witness_overlaps(set: &OrthogonalSet, i: usize, witness: &PureState) -> (f64, f64) {
    let orth = set
        .states()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, s)| s.overlap(witness))
        .fold(0.0, f64::max);
    (orth, set.states()[i].overlap(witness))
}

/// Classifies `set` and re-checks every witness by direct inner products.
fn classify_checked(
    set: &OrthogonalSet,
    tally: &mut Tally,
) -> std::result::Result<(crate::NonlocalityClass, crate::IdentifiabilityReport), String> {
    let (class, report) = classify(set).map_err(|e| e.to_string())?;
    for v in &report.per_state {
        if let Some(w) = &v.witness {
            let (orth, target) = witness_overlaps(set, v.index, &w.state);
            tally.watch("witness orth overlap", orth, true);
            tally.watch("witness concurrence", w.state.concurrence(), true);
            if v.identifiable {
                tally.watch("witness target overlap", target, false);
            }
            if orth >= WITNESS_ORTH || target <= WITNESS_TARGET || w.state.concurrence() >= LAW_TOL
            {
                return Err(format!(
                    "invalid witness for state {}: orth {orth:.3e}, target {target:.3e}",
                    v.index
                ));
            }
        } else if v.identifiable && set.len() > 2 {
            return Err(format!("state {} identifiable without a witness", v.index));
        }
    }
    Ok((class, report))
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut t = Tally::new(suite);
    let n = cfg.count(suite);
    let lambdas = cfg.grid.values();
    match suite {
        Suite::Prop1 => {
            for k in 0..n {
                let set = ueb::random_max_entangled_triple(cfg.rng(suite, k).random());
                let outcome = classify_checked(&set, &mut t).and_then(|(class, _)| {
                    expect(class.label == NonlocalityLabel::ConclusiveOnly, || {
                        format!("sample {k}: {}", class.label)
                    })
                });
                t.record(outcome);
            }
        }
        Suite::Prop2 => {
            for &l1 in &lambdas {
                for &l3 in &lambdas {
                    let set = generate_eq1(GeneratorParams::new(l1, l3)?);
                    let outcome = classify_checked(&set, &mut t).and_then(|(class, report)| {
                        let ueb = ueb::ueb_check(&set).map_err(|e| e.to_string())?;
                        t.watch("complement concurrence", ueb.complement_concurrence, true);
                        expect(
                            class.label == NonlocalityLabel::OneUnidentifiable
                                && report.unidentifiable() == [0]
                                && ueb.is_ueb
                                && class.ueb_span == Some(true),
                            || {
                                format!(
                                    "({l1}, {l3}): {} unidentifiable {:?} ueb {}",
                                    class.label,
                                    report.unidentifiable(),
                                    ueb.is_ueb
                                )
                            },
                        )
                    });
                    t.record(outcome);
                }
            }
        }
        Suite::Prop3 => {
            for &l1 in &lambdas {
                let set = generate_eq2(l1)?;
                let outcome = classify_checked(&set, &mut t).and_then(|(class, report)| {
                    let by_00 = report.per_state[0]
                        .witness
                        .is_some_and(|w| w.state.same_ray(&PureState::basis(0), LAW_TOL));
                    expect(
                        class.label == NonlocalityLabel::TwoUnidentifiable
                            && report.unidentifiable() == [1, 2]
                            && by_00,
                        || {
                            format!(
                                "{l1}: {} unidentifiable {:?} witness |00> {by_00}",
                                class.label,
                                report.unidentifiable()
                            )
                        },
                    )
                });
                t.record(outcome);
            }
        }
        Suite::Impossibility => {
            for k in 0..n {
                let (family, set) = random_orthogonal_triple(&mut cfg.rng(suite, k));
                let outcome = classify_checked(&set, &mut t)
                    .and_then(|(_, report)| {
                        expect(report.unidentifiable().len() < 3, || {
                            "three unidentifiable".into()
                        })
                    })
                    .map_err(|e| format!("sample {k} ({family:?}): {e}"));
                t.record(outcome);
            }
        }
        Suite::UebNecessity => {
            // sets with two or more entangled members whose span holds no UEB
            // must have every member identifiable
            for k in 0..n {
                let (family, set) = random_orthogonal_triple(&mut cfg.rng(suite, k));
                if set.entangled_count() < 2 {
                    continue;
                }
                let outcome = classify_checked(&set, &mut t).and_then(|(class, _)| {
                    let spans = class.ueb_span == Some(true);
                    expect(
                        spans || class.label == NonlocalityLabel::ConclusiveOnly,
                        || {
                            format!(
                                "sample {k} ({family:?}): {} without a spanning UEB",
                                class.label
                            )
                        },
                    )
                });
                t.record(outcome);
            }
        }
        Suite::CompleteBasis | Suite::Footnote2 => {
            for k in 0..n {
                let (family, set) = random_basis(&mut cfg.rng(Suite::CompleteBasis, k));
                let entangled = set.entangled_count();
                let outcome = if suite == Suite::CompleteBasis {
                    classify_checked(&set, &mut t).and_then(|(class, report)| {
                        expect(
                            report.conclusively_distinguishable == (entangled == 0)
                                && class.label == NonlocalityLabel::CompleteBasis(entangled),
                            || {
                                format!(
                                    "sample {k} ({family:?}): {entangled} entangled, distinguishable {}",
                                    report.conclusively_distinguishable
                                )
                            },
                        )
                    })
                } else {
                    expect(entangled != 1, || {
                        format!("sample {k} ({family:?}): one entangled member")
                    })
                };
                t.record(outcome);
            }
        }
        Suite::Sanpera => {
            for k in 0..n {
                let sub = random_subspace_2d(&mut cfg.rng(suite, k));
                let outcome = product_states_in_2d(&sub)
                    .map_err(|e| e.to_string())
                    .and_then(|found| {
                        let states = found.states();
                        for s in &states {
                            t.watch("product concurrence", s.concurrence(), true);
                            t.watch("in-span projection", sub.projection_norm(s), false);
                        }
                        expect(
                            !states.is_empty()
                                && states.iter().all(|s| {
                                    s.concurrence() < LAW_TOL
                                        && sub.projection_norm(s) > 1.0 - LAW_TOL
                                }),
                            || format!("sample {k}: {} states", states.len()),
                        )
                    });
                t.record(outcome);
            }
        }
        Suite::Bravyi => {
            for k in 0..n {
                let set = ueb::random_max_entangled_triple(cfg.rng(suite, k).random());
                let outcome = ueb::ueb_check(&set)
                    .map_err(|e| e.to_string())
                    .and_then(|v| {
                        let worst_member = set
                            .states()
                            .iter()
                            .map(|s| (s.concurrence() - 1.0).abs())
                            .fold(0.0, f64::max);
                        let dev = (v.complement_concurrence - 1.0).abs();
                        t.watch("complement |C - 1|", dev, true);
                        t.watch("member |C - 1|", worst_member, true);
                        expect(dev < LAW_TOL && worst_member < LAW_TOL, || {
                            format!(
                                "sample {k}: complement concurrence {}",
                                v.complement_concurrence
                            )
                        })
                    });
                t.record(outcome);
            }
        }
        Suite::Oracle => {
            let oracle = Oracle::calibrated(cfg.oracle)?;
            let mut sets: Vec<(String, OrthogonalSet)> = (0..n)
                .map(|k| {
                    let (family, set) = random_orthogonal_triple(&mut cfg.rng(suite, k));
                    (format!("sample {k} ({family:?})"), set)
                })
                .collect();
            for &l1 in &lambdas {
                for &l3 in &lambdas {
                    sets.push((
                        format!("eq1 ({l1}, {l3})"),
                        generate_eq1(GeneratorParams::new(l1, l3)?),
                    ));
                }
            }
            for &l1 in &lambdas {
                sets.push((format!("eq2 {l1}"), generate_eq2(l1)?));
            }
            let tol = *sets[0].1.tolerances();
            for (tag, set) in &sets {
                let mut outcome = Ok(());
                for i in 0..3 {
                    let analytic = conclusively_identifiable(set, i)?.identifiable;
                    let brute = oracle.identifiable(set, i)?;
                    if analytic {
                        t.watch("oracle residual on positives", brute.residual.sqrt(), true);
                    }
                    if let Some((w, _)) = brute.witness {
                        let (orth, target) = witness_overlaps(set, i, &w);
                        t.watch("oracle witness orth overlap", orth, true);
                        if orth >= tol.eps_orth || target <= tol.tau_overlap {
                            outcome =
                                Err(format!("{tag} state {i}: oracle witness fails exact check"));
                        }
                    }
                    if analytic != brute.identifiable {
                        outcome = Err(format!(
                            "{tag} state {i}: analytic {analytic}, oracle {}",
                            brute.identifiable
                        ));
                    }
                }
                t.record(outcome);
            }
        }
        Suite::Span => {
            for &l1 in &lambdas {
                for &l3 in &lambdas {
                    let p1 =
                        Subspace::of_set(&generate_eq1(GeneratorParams::new(l1, l3)?)).projector();
                    for &m1 in &lambdas {
                        let p2 = Subspace::of_set(&generate_eq2(m1)?).projector();
                        let dev = max_entry_distance(&p1, &p2);
                        t.watch("projector distance", dev, true);
                        t.record(expect(dev < LAW_TOL, || {
                            format!("eq1 ({l1}, {l3}) vs eq2 {m1}: {dev:.3e}")
                        }));
                    }
                }
            }
        }
        Suite::Hierarchy | Suite::HierarchyCount => {
            for &l1 in &lambdas {
                let eq2 = generate_eq2(l1)?;
                let (c2, _) = classify(&eq2)?;
                for &l3 in &lambdas {
                    let eq1 = generate_eq1(GeneratorParams::new(l1, l3)?);
                    let (c1, _) = classify(&eq1)?;
                    let higher = c2.label > c1.label;
                    let outcome = if suite == Suite::Hierarchy {
                        let (a1, a2) = (eq1.average_entanglement(), eq2.average_entanglement());
                        t.watch("avg(eq2) - avg(eq1)", a2 - a1, true);
                        expect(higher && a2 < a1, || {
                            format!(
                                "({l1}, {l3}): avg eq2 {a2:.6} vs eq1 {a1:.6}, class {} vs {}",
                                c2.label, c1.label
                            )
                        })
                    } else {
                        expect(
                            higher
                                && eq2.entangled_count() < eq1.entangled_count()
                                && eq1.average_entanglement() < 1.0,
                            || {
                                format!(
                                    "({l1}, {l3}): entangled {} vs {}, class {} vs {}",
                                    eq2.entangled_count(),
                                    eq1.entangled_count(),
                                    c2.label,
                                    c1.label
                                )
                            },
                        )
                    };
                    t.record(outcome);
                }
            }
        }
    }
    Ok(t.finish())
}

fn max_entry_distance(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = LambdaGrid::parse("0.05:0.95:19").unwrap();
        assert_eq!(g, LambdaGrid::default());
        let v = g.values();
        assert_eq!(v.len(), 19);
        assert!((v[18] - 0.95).abs() < 1e-15 && (v[1] - 0.1).abs() < 1e-15);
        for bad in [
            "0:0.5:3",
            "0.1:1:3",
            "0.1:0.5:1",
            "0.1:0.5",
            "a:b:c",
            "0.6:0.5:3",
        ] {
            assert!(
                matches!(LambdaGrid::parse(bad), Err(Error::BadBounds(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert!(!Suite::defaults().contains(&Suite::Hierarchy));
    }

    #[test]
    fn small_runs_pass() {
        let cfg = VerifyConfig {
            count: Some(30),
            grid: LambdaGrid::new(0.1, 0.9, 3).unwrap(),
            ..VerifyConfig::default()
        };
        for s in Suite::defaults() {
            if s == Suite::Oracle {
                continue;
            }
            let r = run_suite(s, &cfg).unwrap();
            assert!(r.ok(), "{r}");
            assert!(r.total > 0, "{r}");
        }
    }

    #[test]
    fn entropy_comparison_fails_on_grid() {
        let cfg = VerifyConfig {
            grid: LambdaGrid::new(0.2, 0.8, 3).unwrap(),
            ..VerifyConfig::default()
        };
        let r = run_suite(Suite::Hierarchy, &cfg).unwrap();
        assert_eq!(r.passed, 0);
        assert_eq!(r.total, 9);
    }
}
