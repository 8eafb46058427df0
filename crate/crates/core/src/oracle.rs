//! Brute-force cross-checks for the analytic engine.
//!
//! Nothing here uses the determinant quadratic or orthocomplements. Product
//! states are parameterized by Bloch angles,
//!
//! ```text
//! |alpha> = (cos(ta/2)|0> + e^{i pa} sin(ta/2)|1>) (x) (cos(tb/2)|0> + e^{i pb} sin(tb/2)|1>)
//! ```
//!
//! scanned on a uniform grid and refined by repeated local grids around the
//! best cells. The search can only under-detect, so an [`Oracle`] is
//! calibrated on certified positives before it is used.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix4, Vector4};

use crate::ensemble::OrthogonalSet;
use crate::error::{Error, Result};
use crate::product_finder::Subspace;
use crate::qstate::{bell, PureState, Qubit, C64};

/// Weight of the orthogonality penalty in the search score.
pub const PENALTY: f64 = 1e3;

/// Points per axis of each refinement grid; spans one coarse cell either
/// side of the center, so the cell size shrinks 4x per round.
const LOCAL_POINTS: usize = 9;

/// Window moves allowed per seed on top of the refinement rounds.
const MAX_MOVES: usize = 256;

/// Seeds refined per identifiability search.
const MAX_SEEDS: usize = 8;

/// Angular distance under which scan candidates are merged.
const CLUSTER_DISTANCE: f64 = 1e-4;
const POLISH_ITERATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Points per angle of the coarse grid.
    pub resolution: usize,
    pub refinement_rounds: usize,
    /// Acceptance threshold on the residual overlaps (`theta_acc`).
    pub threshold: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 32,
            refinement_rounds: 4,
            threshold: 1e-9,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 8 {
            return Err(Error::BadBounds(format!(
                "oracle resolution {} is below the minimum of 8",
                self.resolution
            )));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::BadBounds("oracle threshold must be positive".into()));
        }
        Ok(())
    }

    fn theta_step(&self) -> f64 {
        PI / (self.resolution - 1) as f64
    }

    fn phi_step(&self) -> f64 {
        TAU / self.resolution as f64
    }
}

/// Conjugated amplitudes of a Bloch-angle qubit.
#[inline]
fn conj_qubit(theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [C64::new(c, 0.0), C64::from_polar(s, -phi)]
}

/// `(<a| (x) I) |psi>` as a 2-vector, with `a` given conjugated.
#[inline]
fn contract_left(a_conj: &[C64; 2], psi: &[C64; 4]) -> [C64; 2] {
    [
        a_conj[0] * psi[0] + a_conj[1] * psi[2],
        a_conj[0] * psi[1] + a_conj[1] * psi[3],
    ]
}

#[inline]
fn dot2(w: &[C64; 2], b_conj: &[C64; 2]) -> C64 {
    w[0] * b_conj[0] + w[1] * b_conj[1]
}

/// Smallest singular value of the 2x2 matrix with rows `r1`, `r2`.
fn sigma_min(r1: &[C64; 2], r2: &[C64; 2]) -> f64 {
    let fro = r1[0].norm_sqr() + r1[1].norm_sqr() + r2[0].norm_sqr() + r2[1].norm_sqr();
    let det = (r1[0] * r2[1] - r1[1] * r2[0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    ((fro - disc) / 2.0).max(0.0).sqrt()
}

/// Angles of the right qubit `b` minimizing `|<a b|o1>|^2 + |<a b|o2>|^2`,
/// with `a` given conjugated.
fn least_overlap_right(problem: &Problem, a: &[C64; 2]) -> (f64, f64) {
    let w = [
        contract_left(a, &problem.others[0]),
        contract_left(a, &problem.others[1]),
    ];
    // the objective is c^H g c in the conjugated amplitudes c of b
    let g = |i: usize, j: usize| w[0][i].conj() * w[0][j] + w[1][i].conj() * w[1][j];
    let (p, r, q) = (g(0, 0).re, g(0, 1), g(1, 1).re);
    let lambda = (p + q) / 2.0 - (((p - q) / 2.0).powi(2) + r.norm_sqr()).sqrt();
    let c1 = [r, C64::new(lambda - p, 0.0)];
    let c2 = [C64::new(lambda - q, 0.0), r.conj()];
    let norm = |c: &[C64; 2]| c[0].norm_sqr() + c[1].norm_sqr();
    let c = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
    if norm(&c) == 0.0 {
        return (0.0, 0.0);
    }
    let (b0, b1) = (c[0].conj(), c[1].conj());
    (2.0 * b1.norm().atan2(b0.norm()), b1.arg() - b0.arg())
}

/// Search target: member `target` against the two other members.
struct Problem {
    target: [C64; 4],
    others: [[C64; 4]; 2],
}

impl Problem {
    fn swapped(&self) -> Problem {
        let swap = |v: &[C64; 4]| [v[0], v[2], v[1], v[3]];
        Problem {
            target: swap(&self.target),
            others: [swap(&self.others[0]), swap(&self.others[1])],
        }
    }

    /// `(|<alpha|target>|, |<alpha|o1>| + |<alpha|o2>|, sum of squares)` for
    /// conjugated qubits `a`, `b`.
    fn eval(&self, a: &[C64; 2], b: &[C64; 2]) -> (f64, f64, f64) {
        let t = dot2(&contract_left(a, &self.target), b).norm();
        let o1 = dot2(&contract_left(a, &self.others[0]), b).norm();
        let o2 = dot2(&contract_left(a, &self.others[1]), b).norm();
        (t, o1 + o2, o1 * o1 + o2 * o2)
    }
}

/// Damped Gauss-Newton on `Re`, `Im` of both overlaps with the other
/// members, starting from chart angles `x`.
fn polish(
    problem: &Problem,
    chart_a: &Chart,
    chart_b: &Chart,
    mut x: [f64; 4],
) -> ([C64; 2], [C64; 2]) {
    let point = |x: &[f64; 4]| {
        (
            chart_a.conj_point(x[0], x[1]),
            chart_b.conj_point(x[2], x[3]),
        )
    };
    let residual = |x: &[f64; 4]| {
        let (a, b) = point(x);
        let o1 = dot2(&contract_left(&a, &problem.others[0]), &b);
        let o2 = dot2(&contract_left(&a, &problem.others[1]), &b);
        Vector4::new(o1.re, o1.im, o2.re, o2.im)
    };
    let mut f = residual(&x);
    for _ in 0..POLISH_ITERATIONS {
        if f.norm() < 1e-15 {
            break;
        }
        let (a, b) = point(&x);
        let da = chart_a.conj_derivatives(x[0], x[1]);
        let db = chart_b.conj_derivatives(x[2], x[3]);
        let mut jac = Matrix4::zeros();
        for (row, other) in problem.others.iter().enumerate() {
            let wa = contract_left(&a, other);
            let partials = [
                dot2(&contract_left(&da[0], other), &b),
                dot2(&contract_left(&da[1], other), &b),
                dot2(&wa, &db[0]),
                dot2(&wa, &db[1]),
            ];
            for (k, d) in partials.into_iter().enumerate() {
                jac[(2 * row, k)] = d.re;
                jac[(2 * row + 1, k)] = d.im;
            }
        }
        let Ok(dx) = jac.svd(true, true).solve(&f, 1e-12) else {
            break;
        };
        let mut scale = 1.0;
        let improved = loop {
            let trial: [f64; 4] = std::array::from_fn(|k| x[k] - scale * dx[k]);
            let ft = residual(&trial);
            if ft.norm() < f.norm() {
                break Some((trial, ft));
            }
            scale /= 2.0;
            if scale < 1e-6 {
                break None;
            }
        };
        match improved {
            Some((trial, ft)) => (x, f) = (trial, ft),
            None => break,
        }
    }
    point(&x)
}

/// Bloch angles in a rotated frame that puts a chosen qubit at
/// `(pi/2, 0)`, away from the poles where `phi` degenerates.
#[derive(Clone, Copy)]
struct Chart {
    columns: [[C64; 2]; 2],
}

impl Chart {
    const CENTER: (f64, f64) = (FRAC_PI_2, 0.0);

    fn centered_at(theta: f64, phi: f64) -> Self {
        let s = Qubit::from_angles(theta, phi).amplitudes();
        let p = [-s[1].conj(), s[0].conj()];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Chart {
            columns: [
                [(s[0] + p[0]) * h, (s[1] + p[1]) * h],
                [(s[0] - p[0]) * h, (s[1] - p[1]) * h],
            ],
        }
    }

    /// Conjugated amplitudes of the qubit at local angles `(theta, phi)`.
    /// Derivatives of [`Chart::conj_point`] in `theta` and `phi`.
    fn conj_derivatives(&self, theta: f64, phi: f64) -> [[C64; 2]; 2] {
        let (s, c) = (theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let [c0, c1] = self.columns;
        let d_theta = |k: usize| (c0[k] * (-s / 2.0) + c1[k] * e * (c / 2.0)).conj();
        let d_phi = |k: usize| (c1[k] * e * C64::new(0.0, s)).conj();
        [[d_theta(0), d_theta(1)], [d_phi(0), d_phi(1)]]
    }

    fn conj_point(&self, theta: f64, phi: f64) -> [C64; 2] {
        let (s, c) = (theta / 2.0).sin_cos();
        let e = C64::from_polar(s, phi);
        let [c0, c1] = self.columns;
        [
            (c0[0] * c + c1[0] * e).conj(),
            (c0[1] * c + c1[1] * e).conj(),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleVerdict {
    pub identifiable: bool,
    /// Best accepted candidate and its overlap with the target.
    pub witness: Option<(PureState, f64)>,
    /// Residual `sum_j |<alpha|psi_j>|^2` of the best refined candidate.
    pub residual: f64,
}

fn product_from_angles(angles: &[f64; 4]) -> PureState {
    PureState::product(
        &Qubit::from_angles(angles[0], angles[1]),
        &Qubit::from_angles(angles[2], angles[3]),
    )
}

/// A calibrated brute-force identifiability oracle.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    grid: GridSpec,
}

impl Oracle {
    /// Builds an oracle and checks that it detects the witnesses of every
    /// member of `{Phi+, Phi-, Psi+}`, which are known to exist.
    pub fn calibrated(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let oracle = Oracle { grid };
        let set = OrthogonalSet::new(vec![bell::phi_plus(), bell::phi_minus(), bell::psi_plus()])?;
        for i in 0..3 {
            if !oracle.identifiable(&set, i)?.identifiable {
                return Err(Error::ResolutionTooCoarse {
                    case: format!("Bell triple member {i}"),
                });
            }
        }
        Ok(oracle)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Exhaustive search for a product state nonorthogonal to member `i` and
    /// orthogonal to the other two members of a three-state set.
    pub fn identifiable(&self, set: &OrthogonalSet, i: usize) -> Result<OracleVerdict> {
        if set.len() != 3 {
            return Err(Error::BadCardinality {
                expected: "3",
                found: set.len(),
            });
        }
        let target = *set.get(i)?.amplitudes();
        let others = set.others(i);
        let problem = Problem {
            target,
            others: [*others[0].amplitudes(), *others[1].amplitudes()],
        };

        // the per-left profile merges witnesses that share a left qubit, so
        // the scan is repeated with the qubits exchanged
        let mut seeds = self.coarse_seeds(&problem);
        let close = (1.0 - self.grid.theta_step().powi(2)).max(0.0);
        for [ta, pa, tb, pb] in self.coarse_seeds(&problem.swapped()) {
            let seed = [tb, pb, ta, pa];
            let state = product_from_angles(&seed);
            if seeds
                .iter()
                .all(|s| product_from_angles(s).overlap(&state) <= close)
            {
                seeds.push(seed);
            }
        }
        let theta = self.grid.threshold;
        let mut best: Option<(PureState, f64)> = None;
        let mut residual = f64::INFINITY;
        for (a, b) in seeds
            .into_iter()
            .flat_map(|seed| self.refine(&problem, seed))
        {
            let (t, _, sq) = problem.eval(&a, &b);
            residual = residual.min(sq);
            if sq < theta * theta && t > 1e3 * theta && best.is_none_or(|(_, bt)| t > bt) {
                let qa = Qubit::new(a[0].conj(), a[1].conj())?;
                let qb = Qubit::new(b[0].conj(), b[1].conj())?;
                best = Some((PureState::product(&qa, &qb), t));
            }
        }
        Ok(OracleVerdict {
            identifiable: best.is_some(),
            witness: best,
            residual,
        })
    }

    /// Coarse scan. For each left qubit the best right qubit is found by
    /// enumeration; left qubits whose score bound cannot reach the score of
    /// the grid point nearest to any exact witness are skipped. Seeds are the
    /// local maxima of the per-left-qubit best score.
    fn coarse_seeds(&self, problem: &Problem) -> Vec<[f64; 4]> {
        let res = self.grid.resolution;
        let (ht, hp) = (self.grid.theta_step(), self.grid.phi_step());
        // every overlap is 1-Lipschitz in the state, and the state moves by at
        // most ht/2 + hp between a point and its nearest grid point
        let floor = -2.0 * PENALTY * (ht / 2.0 + hp) - 1.0;

        let right: Vec<[C64; 2]> = (0..res * res)
            .map(|k| conj_qubit((k / res) as f64 * ht, (k % res) as f64 * hp))
            .collect();

        let mut best_score = vec![f64::NEG_INFINITY; res * res];
        let mut best_right = vec![0usize; res * res];
        for (ka, (score_slot, right_slot)) in
            best_score.iter_mut().zip(best_right.iter_mut()).enumerate()
        {
            let a = conj_qubit((ka / res) as f64 * ht, (ka % res) as f64 * hp);
            let wt = contract_left(&a, &problem.target);
            let w1 = contract_left(&a, &problem.others[0]);
            let w2 = contract_left(&a, &problem.others[1]);
            let wt_norm = (wt[0].norm_sqr() + wt[1].norm_sqr()).sqrt();
            if wt_norm - PENALTY * sigma_min(&w1, &w2) < floor {
                continue;
            }
            let mut local = f64::NEG_INFINITY;
            let mut arg = 0;
            for (kb, b) in right.iter().enumerate() {
                let penalty = PENALTY * (dot2(&w1, b).norm() + dot2(&w2, b).norm());
                if wt_norm - penalty <= local {
                    continue;
                }
                let score = dot2(&wt, b).norm() - penalty;
                if score > local {
                    local = score;
                    arg = kb;
                }
            }
            *score_slot = local;
            *right_slot = arg;
        }

        let idx = |t: usize, p: usize| t * res + p;
        let mut maxima: Vec<(f64, usize)> = Vec::new();
        for t in 0..res {
            for p in 0..res {
                let s = best_score[idx(t, p)];
                if s == f64::NEG_INFINITY {
                    continue;
                }
                let mut is_max = true;
                'nb: for dt in [-1i64, 0, 1] {
                    let tt = t as i64 + dt;
                    if tt < 0 || tt >= res as i64 {
                        continue;
                    }
                    for dp in [-1i64, 0, 1] {
                        let pp = (p as i64 + dp).rem_euclid(res as i64) as usize;
                        if best_score[idx(tt as usize, pp)] > s {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    maxima.push((s, idx(t, p)));
                }
            }
        }
        // stable sort keeps the lowest grid index first among equal scores
        maxima.sort_by(|x, y| y.0.total_cmp(&x.0));

        let mut seeds: Vec<([f64; 4], PureState)> = Vec::new();
        for (_, ka) in maxima {
            let kb = best_right[ka];
            let angles = [
                (ka / res) as f64 * ht,
                (ka % res) as f64 * hp,
                (kb / res) as f64 * ht,
                (kb % res) as f64 * hp,
            ];
            let state = product_from_angles(&angles);
            if seeds
                .iter()
                .any(|(_, s)| s.overlap(&state) > (1.0 - ht * ht).max(0.0))
            {
                continue;
            }
            seeds.push((angles, state));
            if seeds.len() == MAX_SEEDS {
                break;
            }
        }
        seeds.into_iter().map(|(a, _)| a).collect()
    }

    /// Local grid search around the seed, in charts centered on its qubits.
    /// The window follows any improvement at the current cell size; once the
    /// center is best the cell shrinks 4x, which counts as a round. The seed,
    /// the seed with its best right qubit for the left one, and the end point
    /// are then polished, since the search can drift toward a root with no
    /// target overlap.
    fn refine(&self, problem: &Problem, seed: [f64; 4]) -> [([C64; 2], [C64; 2]); 3] {
        let (chart_a, chart_b) = (
            Chart::centered_at(seed[0], seed[1]),
            Chart::centered_at(seed[2], seed[3]),
        );
        let (ct, cp) = Chart::CENTER;
        let mut center = [ct, cp, ct, cp];
        let mut steps = [
            self.grid.theta_step(),
            self.grid.phi_step(),
            self.grid.theta_step(),
            self.grid.phi_step(),
        ];
        let half = LOCAL_POINTS / 2;
        let offset = |k: usize, h: f64| (k as f64 - half as f64) * h / half as f64;
        let (mut rounds, mut moves) = (0, 0);
        while rounds < self.grid.refinement_rounds {
            let right: Vec<([usize; 2], [C64; 2])> = (0..LOCAL_POINTS * LOCAL_POINTS)
                .map(|k| {
                    let (i, j) = (k / LOCAL_POINTS, k % LOCAL_POINTS);
                    let b = chart_b.conj_point(
                        center[2] + offset(i, steps[2]),
                        center[3] + offset(j, steps[3]),
                    );
                    ([i, j], b)
                })
                .collect();
            let (t, o, _) = problem.eval(
                &chart_a.conj_point(center[0], center[1]),
                &chart_b.conj_point(center[2], center[3]),
            );
            let mut best = (t - PENALTY * o, [half; 4]);
            for ia in 0..LOCAL_POINTS {
                for ja in 0..LOCAL_POINTS {
                    let a = chart_a.conj_point(
                        center[0] + offset(ia, steps[0]),
                        center[1] + offset(ja, steps[1]),
                    );
                    let wt = contract_left(&a, &problem.target);
                    let w1 = contract_left(&a, &problem.others[0]);
                    let w2 = contract_left(&a, &problem.others[1]);
                    for ([ib, jb], b) in &right {
                        let score = dot2(&wt, b).norm()
                            - PENALTY * (dot2(&w1, b).norm() + dot2(&w2, b).norm());
                        if score > best.0 {
                            best = (score, [ia, ja, *ib, *jb]);
                        }
                    }
                }
            }
            for (c, (k, h)) in center.iter_mut().zip(best.1.iter().zip(steps)) {
                *c += offset(*k, h);
            }
            if best.1 != [half; 4] && moves < MAX_MOVES {
                moves += 1;
                continue;
            }
            rounds += 1;
            for h in steps.iter_mut() {
                *h /= half as f64;
            }
        }
        let (tb, pb) = least_overlap_right(problem, &conj_qubit(seed[0], seed[1]));
        [
            polish(problem, &chart_a, &chart_b, [ct, cp, ct, cp]),
            polish(
                problem,
                &chart_a,
                &Chart::centered_at(tb, pb),
                [ct, cp, ct, cp],
            ),
            polish(problem, &chart_a, &chart_b, center),
        ]
    }

    /// Scans `cos t u + e^{i phi} sin t v` over a 2-D subspace for zeros of
    /// the coefficient-matrix determinant.
    pub fn product_scan(&self, sub: &Subspace) -> Result<ScanResult> {
        if sub.dim() != 2 {
            return Err(Error::BadDimension {
                expected: 2,
                found: sub.dim(),
            });
        }
        let (u, v) = (sub.basis()[0], sub.basis()[1]);
        let point = |t: f64, phi: f64| -> [C64; 4] {
            let (s, c) = t.sin_cos();
            let e = C64::from_polar(s, phi);
            let (ua, va) = (u.amplitudes(), v.amplitudes());
            [0, 1, 2, 3].map(|k| ua[k] * c + va[k] * e)
        };
        let det_abs = |t: f64, phi: f64| -> f64 {
            let m = point(t, phi);
            (m[0] * m[3] - m[1] * m[2]).norm()
        };

        let res = self.grid.resolution;
        let ht = FRAC_PI_2 / (res - 1) as f64;
        let hp = TAU / res as f64;
        let values: Vec<f64> = (0..res * res)
            .map(|k| det_abs((k / res) as f64 * ht, (k % res) as f64 * hp))
            .collect();

        let below = values.iter().filter(|&&x| x < self.grid.threshold).count();
        if 2 * below > values.len() {
            return Ok(ScanResult::AllProductSuspect);
        }

        let mut found: Vec<PureState> = Vec::new();
        for t in 0..res {
            for p in 0..res {
                let f = values[t * res + p];
                let is_min = [-1i64, 0, 1].iter().all(|dt| {
                    let tt = t as i64 + dt;
                    if tt < 0 || tt >= res as i64 {
                        return true;
                    }
                    [-1i64, 0, 1].iter().all(|dp| {
                        let pp = (p as i64 + dp).rem_euclid(res as i64) as usize;
                        values[tt as usize * res + pp] >= f
                    })
                });
                if !is_min {
                    continue;
                }
                let (mut ct, mut cp) = (t as f64 * ht, p as f64 * hp);
                let (mut st, mut sp) = (ht, hp);
                let half = (LOCAL_POINTS / 2) as f64;
                for _ in 0..self.grid.refinement_rounds {
                    let mut best = (det_abs(ct, cp), ct, cp);
                    for i in 0..LOCAL_POINTS {
                        for j in 0..LOCAL_POINTS {
                            let tt = ct + (i as f64 - half) * st / half;
                            let pp = cp + (j as f64 - half) * sp / half;
                            let f = det_abs(tt, pp);
                            if f < best.0 {
                                best = (f, tt, pp);
                            }
                        }
                    }
                    (ct, cp) = (best.1, best.2);
                    st /= half;
                    sp /= half;
                }
                if det_abs(ct, cp) >= self.grid.threshold {
                    continue;
                }
                let state = PureState::new(point(ct, cp))?;
                let merged = found
                    .iter()
                    .any(|s| s.overlap(&state).min(1.0).acos() < CLUSTER_DISTANCE);
                if !merged {
                    found.push(state);
                }
            }
        }
        Ok(ScanResult::Candidates(found))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScanResult {
    Candidates(Vec<PureState>),
    /// The determinant is below threshold on most of the grid.
    AllProductSuspect,
}

/// One-shot identifiability check with a freshly calibrated oracle.
pub fn oracle_identifiable(set: &OrthogonalSet, i: usize, grid: GridSpec) -> Result<bool> {
    Ok(Oracle::calibrated(grid)?.identifiable(set, i)?.identifiable)
}

pub fn oracle_product_scan(sub: &Subspace, grid: GridSpec) -> Result<ScanResult> {
    grid.validate()?;
    Oracle { grid }.product_scan(sub)
}
