//! Polarization sweeps and the optimal-ordering search.
//!
//! A sweep evaluates the mean arrival time while the input runs over linear
//! polarizations `cos(phi/2)|H> + sin(phi/2)|V>`, `phi` in `[0, 2 pi)`, or
//! over a `(theta, phi)` grid of the whole Poincare sphere. The ordering
//! search enumerates every distinct permutation of an element multiset and
//! keeps the one with the largest (or smallest) sweep extremum.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{run_exact, run_weak, Element, NetworkSpec};
use crate::polarization::{Axis3, JonesVector};
use crate::pulse::PulseSpec;

pub const DEFAULT_GRID: usize = 721;
pub const DEFAULT_SPHERE_GRID: (usize, usize) = (181, 361);
/// Exhaustive search cap on the number of elements.
pub const MAX_ARRANGEMENT_ELEMENTS: usize = 8;

const GOLDEN_ITERS: usize = 80;
const SPHERE_ROUNDS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Weak,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

impl Objective {
    /// Maps a value to a score where larger is always better; blocked
    /// points score `-inf`.
    fn score(self, value: Option<f64>) -> f64 {
        match (self, value) {
            (_, None) => f64::NEG_INFINITY,
            (Objective::Max, Some(v)) => v,
            (Objective::Min, Some(v)) => -v,
        }
    }
}

/// Mean arrival time of `spec` with the chosen engine; `None` when the light
/// is blocked.
pub fn evaluate(spec: &NetworkSpec, engine: Engine) -> Result<Option<f64>> {
    let outcome = match engine {
        Engine::Weak => run_weak(spec).map(|r| r.mean_time),
        Engine::Exact => run_exact(spec).map(|r| r.mean_time),
    };
    match outcome {
        Ok(t) => Ok(Some(t)),
        Err(Error::NearZeroTransmission(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn eval_at(spec: &NetworkSpec, engine: Engine, psi: JonesVector) -> Option<f64> {
    // Only NearZeroTransmission can come out of a valid spec.
    evaluate(&spec.with_input(psi), engine).ok().flatten()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    /// `None` when the light is blocked at this polarization.
    pub t_weak: Option<f64>,
    /// Present only when the sweep ran the exact engine too.
    pub t_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub with_exact: bool,
}

impl SweepResult {
    /// Best grid row for the engine and objective.
    pub fn extremum(&self, engine: Engine, objective: Objective) -> Option<(f64, f64)> {
        let pick = |r: &SweepRow| match engine {
            Engine::Weak => r.t_weak,
            Engine::Exact => r.t_exact,
        };
        let mut best: Option<(f64, f64)> = None;
        for row in &self.rows {
            if let Some(v) = pick(row) {
                let better = match best {
                    None => true,
                    Some((_, b)) => objective.score(Some(v)) > objective.score(Some(b)),
                };
                if better {
                    best = Some((row.phi, v));
                }
            }
        }
        best
    }
}

fn linear_grid(grid_size: usize) -> impl Iterator<Item = f64> {
    (0..grid_size).map(move |k| 2.0 * PI * k as f64 / grid_size as f64)
}

/// Runs the weak engine (and optionally the exact one) over `grid_size`
/// linear input polarizations.
pub fn sweep_polarization(spec: &NetworkSpec, grid_size: usize, with_exact: bool) -> Result<SweepResult> {
    if grid_size < 2 {
        return Err(Error::GridTooSmall { min: 2, got: grid_size });
    }
    let phis: Vec<f64> = linear_grid(grid_size).collect();
    let rows = phis
        .par_iter()
        .map(|&phi| {
            let psi = JonesVector::linear(phi);
            SweepRow {
                phi,
                t_weak: eval_at(spec, Engine::Weak, psi),
                t_exact: if with_exact {
                    eval_at(spec, Engine::Exact, psi)
                } else {
                    None
                },
            }
        })
        .collect();
    Ok(SweepResult { rows, with_exact })
}

/// Golden-section search for the best score of `f` on `[a, b]`.
fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Poincare polar angle of the extremal input (the linear-sweep angle for
    /// linear searches).
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

impl Extremum {
    pub fn state(&self) -> JonesVector {
        JonesVector::from_angles(self.theta, self.phi)
    }
}

/// Extremum over linear polarizations; with `refine`, the best grid point is
/// polished by golden-section search within one grid step on either side.
pub fn linear_extremum(
    spec: &NetworkSpec,
    grid_size: usize,
    engine: Engine,
    objective: Objective,
    refine: bool,
) -> Result<Option<Extremum>> {
    if grid_size < 2 {
        return Err(Error::GridTooSmall { min: 2, got: grid_size });
    }
    let score = |angle: f64| objective.score(eval_at(spec, engine, JonesVector::linear(angle)));
    let phis: Vec<f64> = linear_grid(grid_size).collect();
    let scores: Vec<f64> = phis.par_iter().map(|&p| score(p)).collect();
    let Some((k, &best)) = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
    else {
        return Ok(None);
    };
    if best == f64::NEG_INFINITY {
        return Ok(None);
    }
    let (mut angle, mut s) = (phis[k], best);
    if refine {
        let h = 2.0 * PI / grid_size as f64;
        let (a, sa) = golden_section(angle - h, angle + h, score);
        if sa > s {
            angle = a.rem_euclid(2.0 * PI);
            s = sa;
        }
    }
    Ok(Some(Extremum {
        theta: angle,
        phi: 0.0,
        value: unscore(objective, s),
    }))
}

fn unscore(objective: Objective, s: f64) -> f64 {
    match objective {
        Objective::Max => s,
        Objective::Min => -s,
    }
}

/// Extremum over the full Poincare sphere: a `(theta, phi)` grid with
/// `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`, then alternating
/// golden-section passes on each angle when `refine` is set.
pub fn sphere_extremum(
    spec: &NetworkSpec,
    grid: (usize, usize),
    engine: Engine,
    objective: Objective,
    refine: bool,
) -> Result<Option<Extremum>> {
    let (nt, np) = grid;
    if nt < 2 || np < 2 {
        return Err(Error::GridTooSmall { min: 2, got: nt.min(np) });
    }
    let score = |theta: f64, phi: f64| {
        objective.score(eval_at(spec, engine, JonesVector::from_angles(theta, phi)))
    };
    let dt = PI / (nt - 1) as f64;
    let dp = 2.0 * PI / np as f64;
    let points: Vec<(f64, f64)> = (0..nt)
        .flat_map(|i| (0..np).map(move |j| (dt * i as f64, dp * j as f64)))
        .collect();
    let scores: Vec<f64> = points.par_iter().map(|&(t, p)| score(t, p)).collect();
    let Some((k, &best)) = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
    else {
        return Ok(None);
    };
    if best == f64::NEG_INFINITY {
        return Ok(None);
    }
    let (mut theta, mut phi) = points[k];
    let mut s = best;
    if refine {
        for _ in 0..SPHERE_ROUNDS {
            let before = s;
            let (t, st) = golden_section(theta - dt, theta + dt, |t| score(t, phi));
            if st > s {
                theta = t;
                s = st;
            }
            let (p, sp) = golden_section(phi - dp, phi + dp, |p| score(theta, p));
            if sp > s {
                phi = p;
                s = sp;
            }
            if s - before <= 1e-16 * s.abs().max(1e-300) {
                break;
            }
        }
    }
    Ok(Some(Extremum {
        theta,
        phi,
        value: unscore(objective, s),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderScore {
    pub order: Vec<usize>,
    /// `None` when every grid polarization is blocked.
    pub extremum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementResult {
    pub best_order: Vec<usize>,
    pub best_extremum: f64,
    pub objective: Objective,
    pub engine: Engine,
    pub per_order_table: Vec<OrderScore>,
}

/// Every distinct ordering of `elements`, as index sequences. Equal elements
/// are interchangeable; each arrangement is represented by the index
/// sequence that uses equal elements in ascending index order.
pub fn distinct_orderings(elements: &[Element]) -> Vec<Vec<usize>> {
    // Class label = index of the first equal element.
    let labels: Vec<usize> = elements
        .iter()
        .map(|e| elements.iter().position(|o| o == e).unwrap())
        .collect();
    let mut seq = labels.clone();
    seq.sort_unstable();
    let mut out = Vec::new();
    loop {
        let mut next_of: Vec<Vec<usize>> = vec![Vec::new(); elements.len()];
        for (i, &l) in labels.iter().enumerate().rev() {
            next_of[l].push(i);
        }
        out.push(seq.iter().map(|&l| next_of[l].pop().unwrap()).collect());
        if !next_permutation(&mut seq) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Two extrema within this relative distance count as a tie.
const TIE_TOL: f64 = 1e-12;

/// Exhaustive search over distinct orderings of `template.elements` for the
/// ordering whose linear-sweep extremum is best. Ties go to the
/// lexicographically smallest index sequence.
pub fn optimize_arrangement(
    template: &NetworkSpec,
    objective: Objective,
    grid_size: usize,
    engine: Engine,
) -> Result<ArrangementResult> {
    let n = template.elements.len();
    if n > MAX_ARRANGEMENT_ELEMENTS {
        return Err(Error::TooManyElements(n, MAX_ARRANGEMENT_ELEMENTS));
    }
    if grid_size < 2 {
        return Err(Error::GridTooSmall { min: 2, got: grid_size });
    }
    let orders = distinct_orderings(&template.elements);
    let table = orders
        .par_iter()
        .map(|order| {
            let spec = template.with_elements(order.iter().map(|&i| template.elements[i]).collect());
            linear_extremum(&spec, grid_size, engine, objective, false).map(|e| OrderScore {
                order: order.clone(),
                extremum: e.map(|e| e.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<&OrderScore> = None;
    for row in &table {
        let Some(v) = row.extremum else { continue };
        best = match best {
            None => Some(row),
            Some(b) => {
                let bv = b.extremum.unwrap();
                let s_new = objective.score(Some(v));
                let s_old = objective.score(Some(bv));
                let tied = (s_new - s_old).abs() <= TIE_TOL * s_new.abs().max(s_old.abs()).max(1e-300);
                if (!tied && s_new > s_old) || (tied && row.order < b.order) {
                    Some(row)
                } else {
                    Some(b)
                }
            }
        };
    }
    let best = best.ok_or(Error::NearZeroTransmission(0.0))?;
    Ok(ArrangementResult {
        best_order: best.order.clone(),
        best_extremum: best.extremum.unwrap(),
        objective,
        engine,
        per_order_table: table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupedVsInterleaved {
    /// Maximum for PMD-PMD-PMD-PDL-PDL.
    pub t_grouped: f64,
    /// Maximum for PMD-PDL-PMD-PDL-PMD.
    pub t_interleaved: f64,
    pub ratio: f64,
}

/// Three equal PMD sections on `z` and two equal PDL filters on `x`, grouped
/// versus interleaved, each maximized over linear input polarizations with the
/// weak engine.
pub fn grouped_vs_interleaved(dgd_each: f64, mu_each: f64) -> Result<GroupedVsInterleaved> {
    let pmd = Element::pmd(Axis3::Z, dgd_each)?;
    let pdl = Element::pdl(Axis3::X, mu_each)?;
    let pulse = PulseSpec::new(1.0, 0.0)?;
    let run = |elements: Vec<Element>| -> Result<f64> {
        let spec = NetworkSpec::new(pulse, JonesVector::H, elements)?;
        linear_extremum(&spec, DEFAULT_GRID, Engine::Weak, Objective::Max, true)?
            .map(|e| e.value)
            .ok_or(Error::NearZeroTransmission(0.0))
    };
    let t_grouped = run(vec![pmd, pmd, pmd, pdl, pdl])?;
    let t_interleaved = run(vec![pmd, pdl, pmd, pdl, pmd])?;
    Ok(GroupedVsInterleaved {
        t_grouped,
        t_interleaved,
        ratio: t_grouped / t_interleaved,
    })
}
