//! Deterministic search over `(c, r, eta)` with `J1`, `J2` and `T0` fixed.
//!
//! Seeding walks a lattice (log-spaced in `eta`) and keeps the feasible
//! points. Refinement is a compass search along `c`, `r`, `log eta` in that
//! order: a coordinate's step is halved whenever neither direction improves,
//! and infeasible trial points are simply rejected.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::constants::{compute_constants, validate, ConstantTriple, SearchPoint};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;

/// Refinement stops once every step is below this.
pub const MIN_STEP: f64 = 1e-12;

/// Initial steps for `c`, `r` and `log eta`, as decimals so that lattice
/// points stay short decimals at full precision.
pub const INITIAL_STEPS: [&str; 3] = ["1e-3", "1e-3", "5e-2"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectiveRepr", into = "ObjectiveRepr")]
pub enum Objective {
    MinC1,
    /// Minimise `C2` among points with `C1 <= cap`.
    MinC2GivenC1Cap(f64),
    /// Minimise `w1 C1 + w2 C2 + w3 C3`.
    Weighted([f64; 3]),
}

#[derive(Serialize, Deserialize)]
struct ObjectiveRepr {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<[f64; 3]>,
}

impl From<Objective> for ObjectiveRepr {
    fn from(o: Objective) -> Self {
        let (mode, c1_cap, weights) = match o {
            Objective::MinC1 => ("min_c1", None, None),
            Objective::MinC2GivenC1Cap(cap) => ("min_c2_given_c1_cap", Some(cap), None),
            Objective::Weighted(w) => ("min_weighted", None, Some(w)),
        };
        ObjectiveRepr {
            mode: mode.to_string(),
            c1_cap,
            weights,
        }
    }
}

impl TryFrom<ObjectiveRepr> for Objective {
    type Error = Error;

    fn try_from(r: ObjectiveRepr) -> Result<Self> {
        match (r.mode.as_str(), r.c1_cap, r.weights) {
            ("min_c1", None, None) => Ok(Objective::MinC1),
            ("min_c2_given_c1_cap", Some(cap), None) => Objective::c1_capped(cap),
            ("min_weighted", None, Some(w)) => Objective::weighted(w),
            (mode, cap, w) => Err(Error::Parse(format!(
                "inconsistent objective: mode {mode:?}, c1_cap {cap:?}, weights {w:?}"
            ))),
        }
    }
}

impl Objective {
    pub fn c1_capped(cap: f64) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(Error::Domain(format!("C1 cap must be positive, got {cap}")));
        }
        Ok(Objective::MinC2GivenC1Cap(cap))
    }

    pub fn weighted(w: [f64; 3]) -> Result<Self> {
        if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || w.iter().all(|&x| x == 0.0) {
            return Err(Error::Domain(format!(
                "weights must be nonnegative and not all zero, got {w:?}"
            )));
        }
        Ok(Objective::Weighted(w))
    }

    /// Objective value, or `None` when the triple breaks the cap.
    pub fn value(&self, t: &ConstantTriple) -> Option<f64> {
        match *self {
            Objective::MinC1 => Some(t.c1),
            Objective::MinC2GivenC1Cap(cap) => (t.c1 <= cap).then_some(t.c2),
            Objective::Weighted([w1, w2, w3]) => Some(w1 * t.c1 + w2 * t.c2 + w3 * t.c3),
        }
    }
}

/// Closed interval and point count for one lattice axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: String,
    pub hi: String,
    pub steps: u32,
}

impl Axis {
    pub fn new(lo: &str, hi: &str, steps: u32) -> Self {
        Axis {
            lo: lo.to_string(),
            hi: hi.to_string(),
            steps,
        }
    }

    pub fn fixed(value: &str) -> Self {
        Self::new(value, value, 1)
    }

    fn values(&self, log_scale: bool, prec: &PrecisionConfig) -> Result<Vec<Float>> {
        let lo = prec.parse(&self.lo)?;
        let hi = prec.parse(&self.hi)?;
        if self.steps == 0 || lo > hi {
            return Err(Error::Domain(format!(
                "axis needs lo <= hi and at least one step, got [{}, {}] x {}",
                self.lo, self.hi, self.steps
            )));
        }
        if log_scale && lo <= 0 {
            return Err(Error::Domain(format!(
                "log-spaced axis needs a positive lower end, got {}",
                self.lo
            )));
        }
        if self.steps == 1 || lo == hi {
            return Ok(vec![lo]);
        }
        let n = self.steps - 1;
        let bits = prec.bits();
        let (a, b) = if log_scale {
            (lo.clone().ln(), hi.clone().ln())
        } else {
            (lo.clone(), hi.clone())
        };
        let width = Float::with_val(bits, &b - &a);
        Ok((0..=n)
            .map(|i| {
                if i == 0 {
                    return lo.clone();
                }
                if i == n {
                    return hi.clone();
                }
                let x = Float::with_val(bits, &width * i) / n + &a;
                if log_scale {
                    x.exp()
                } else {
                    x
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedBounds {
    pub c: Axis,
    pub r: Axis,
    pub eta: Axis,
}

/// The feasible points of the lattice, in `c`-major order.
pub fn grid_seed(
    bounds: &SeedBounds,
    j1: u32,
    j2: u32,
    t0: &Float,
    prec: &PrecisionConfig,
) -> Result<Vec<SearchPoint>> {
    let cs = bounds.c.values(false, prec)?;
    let rs = bounds.r.values(false, prec)?;
    let etas = bounds.eta.values(true, prec)?;
    let mut lattice = Vec::with_capacity(cs.len() * rs.len() * etas.len());
    for c in &cs {
        for r in &rs {
            for eta in &etas {
                lattice.push(SearchPoint {
                    c: c.clone(),
                    r: r.clone(),
                    eta: eta.clone(),
                    j1,
                    j2,
                    t0: Float::with_val(prec.bits(), t0),
                });
            }
        }
    }
    let total = lattice.len();
    let keep: Vec<bool> = lattice.par_iter().map(|p| validate(p).is_empty()).collect();
    let feasible: Vec<SearchPoint> = lattice
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    if feasible.is_empty() {
        return Err(Error::Search(format!(
            "none of the {total} lattice points satisfies the parameter chain"
        )));
    }
    Ok(feasible)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub point: SearchPoint,
    pub constants: ConstantTriple,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub objective: Objective,
    pub best: SearchPoint,
    pub best_constants: ConstantTriple,
    pub best_objective: f64,
    /// Number of constant evaluations, including the starting point(s).
    pub evaluations: u64,
    /// Successive improvements, starting with the initial point.
    pub trace: Vec<TraceEntry>,
}

/// Objective at `point`: `Ok(None)` for rejected points, errors only for
/// precision failures.
fn evaluate(
    point: &SearchPoint,
    objective: &Objective,
    prec: &PrecisionConfig,
) -> Result<Option<(ConstantTriple, f64)>> {
    if !validate(point).is_empty() {
        return Ok(None);
    }
    match compute_constants(point, prec) {
        Ok(rep) => Ok(objective.value(&rep.triple).map(|v| (rep.triple, v))),
        Err(Error::Precision(msg)) => Err(Error::Precision(msg)),
        Err(_) => Ok(None),
    }
}

fn lexicographic(a: &SearchPoint, b: &SearchPoint) -> Ordering {
    let cmp = |x: &Float, y: &Float| x.partial_cmp(y).unwrap_or(Ordering::Equal);
    cmp(&a.c, &b.c)
        .then_with(|| cmp(&a.r, &b.r))
        .then_with(|| cmp(&a.eta, &b.eta))
}

fn ranks_before(a: (f64, &SearchPoint), b: (f64, &SearchPoint)) -> bool {
    a.0.total_cmp(&b.0).then_with(|| lexicographic(a.1, b.1)) == Ordering::Less
}

fn step_point(point: &SearchPoint, axis: usize, delta: &Float, prec: &PrecisionConfig) -> SearchPoint {
    let bits = prec.bits();
    let mut next = point.clone();
    match axis {
        0 => next.c = Float::with_val(bits, &point.c + delta),
        1 => next.r = Float::with_val(bits, &point.r + delta),
        _ => next.eta = Float::with_val(bits, delta.exp_ref()) * &point.eta,
    }
    next
}

/// Compass search from a feasible start. `budget` caps the number of trial
/// evaluations; with no improvement the start comes back unchanged.
pub fn refine(
    start: &SearchPoint,
    objective: &Objective,
    budget: u64,
    prec: &PrecisionConfig,
) -> Result<SearchReport> {
    let start = start.at_precision(prec);
    let Some((constants, value)) = evaluate(&start, objective, prec)? else {
        let violations = validate(&start);
        return Err(if violations.is_empty() {
            Error::Search(format!("start point does not meet the objective {objective:?}"))
        } else {
            Error::Constraint(violations)
        });
    };
    let mut best = TraceEntry {
        point: start,
        constants,
        objective: value,
    };
    let mut trace = vec![best.clone()];
    let mut evaluations = 1u64;
    let mut used = 0u64;
    let mut steps = INITIAL_STEPS
        .iter()
        .map(|s| prec.parse(s))
        .collect::<Result<Vec<_>>>()?;

    'search: while used < budget && steps.iter().any(|s| *s >= MIN_STEP) {
        for axis in 0..3 {
            if steps[axis] < MIN_STEP {
                continue;
            }
            let mut improved = false;
            for forward in [true, false] {
                if used >= budget {
                    break 'search;
                }
                let delta = if forward {
                    steps[axis].clone()
                } else {
                    Float::with_val(prec.bits(), -&steps[axis])
                };
                let trial = step_point(&best.point, axis, &delta, prec);
                if !validate(&trial).is_empty() {
                    continue;
                }
                used += 1;
                evaluations += 1;
                if let Some((constants, value)) = evaluate(&trial, objective, prec)? {
                    if value < best.objective {
                        best = TraceEntry {
                            point: trial,
                            constants,
                            objective: value,
                        };
                        trace.push(best.clone());
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                steps[axis] /= 2u32;
            }
        }
    }
    Ok(SearchReport {
        objective: *objective,
        best: best.point,
        best_constants: best.constants,
        best_objective: best.objective,
        evaluations,
        trace,
    })
}

/// Ranks the seeds, refines the best `starts` of them concurrently, and
/// returns the overall winner (ties broken by `(c, r, eta)`).
pub fn search(
    seeds: &[SearchPoint],
    objective: &Objective,
    budget: u64,
    starts: usize,
    prec: &PrecisionConfig,
) -> Result<SearchReport> {
    let scored: Vec<Option<(ConstantTriple, f64)>> = seeds
        .par_iter()
        .map(|p| evaluate(p, objective, prec))
        .collect::<Result<_>>()?;
    let mut ranked: Vec<(f64, &SearchPoint)> = seeds
        .iter()
        .zip(&scored)
        .filter_map(|(p, s)| s.map(|(_, v)| (v, p)))
        .collect();
    if ranked.is_empty() {
        return Err(Error::Search(format!(
            "none of the {} seeds satisfies the objective {objective:?}",
            seeds.len()
        )));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lexicographic(a.1, b.1)));
    let reports: Vec<SearchReport> = ranked
        .iter()
        .take(starts.max(1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(_, p)| refine(p, objective, budget, prec))
        .collect::<Result<_>>()?;
    let seed_evals = seeds.len() as u64;
    let mut best: Option<SearchReport> = None;
    let mut evaluations = seed_evals;
    for rep in reports {
        // The seed evaluation already counted each start once.
        evaluations += rep.evaluations - 1;
        let better = match &best {
            None => true,
            Some(b) => ranks_before((rep.best_objective, &rep.best), (b.best_objective, &b.best)),
        };
        if better {
            best = Some(rep);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = evaluations;
    Ok(best)
}
