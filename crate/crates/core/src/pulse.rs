//! Exact propagation of a polarized Gaussian pulse.
//!
//! The field is kept as `sum_i amp_i g(t - delay_i)` where `g` is the input
//! envelope, `g(t)^2 = G(t)` a normal density of width `t_c`, and `amp_i` an
//! unnormalized Jones vector. PMD splits each term along the eigenmodes of its
//! axis, PDL and polarizers act on the amplitudes, and every observable is a
//! double sum over pairwise Gaussian overlaps. Nothing is discretized.
//!
//! Times are in the comoving frame: a pulse that sees no PMD stays at `t = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::{pdl_operator, Axis3, JonesVector, Operator2};
use crate::C64;

/// Transmission below which the mean time is reported as blocked light.
pub const NORM_FLOOR: f64 = 1e-12;

/// Relative weight under which [`GaussianSumState::prune`] drops a term
/// during chain propagation.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    t_c: f64,
    omega0: f64,
}

impl PulseSpec {
    /// `t_c` is the coherence time, `omega0` the carrier angular frequency
    /// (0 drops the PMD carrier rotations).
    pub fn new(t_c: f64, omega0: f64) -> Result<Self> {
        if !(t_c > 0.0) || !t_c.is_finite() {
            return Err(Error::NonPositiveCoherence(t_c));
        }
        if !omega0.is_finite() {
            return Err(Error::Negative {
                what: "omega0 (finite)",
                value: omega0,
            });
        }
        Ok(PulseSpec { t_c, omega0 })
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Amplitude envelope `g(t) = (t_c sqrt(2 pi))^{-1/2} e^{-t^2 / 4 t_c^2}`.
    pub fn envelope(&self, t: f64) -> f64 {
        let norm = (self.t_c * (2.0 * std::f64::consts::PI).sqrt()).sqrt().recip();
        norm * (-t * t / (4.0 * self.t_c * self.t_c)).exp()
    }

    /// `G(t) = g(t)^2`.
    pub fn power_envelope(&self, t: f64) -> f64 {
        let g = self.envelope(t);
        g * g
    }

    /// `int g(t - a) g(t - b) dt = exp(-(a - b)^2 / 8 t_c^2)`.
    pub fn overlap(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        (-d * d / (8.0 * self.t_c * self.t_c)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub delay: f64,
    pub amp: JonesVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSumState {
    pulse: PulseSpec,
    terms: Vec<Term>,
}

impl GaussianSumState {
    /// A single centered pulse polarized along `psi`.
    pub fn initial(pulse: PulseSpec, psi: JonesVector) -> Self {
        GaussianSumState {
            pulse,
            terms: vec![Term {
                delay: 0.0,
                amp: psi,
            }],
        }
    }

    pub fn from_terms(pulse: PulseSpec, terms: Vec<Term>) -> Self {
        GaussianSumState { pulse, terms }
    }

    pub fn pulse(&self) -> &PulseSpec {
        &self.pulse
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Envelope overlap between terms `i` and `j`.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        self.pulse.overlap(self.terms[i].delay, self.terms[j].delay)
    }

    /// PMD section with eigenmodes `|+-n>` and differential group delay `dgd`.
    ///
    /// The `|+n>` part of every term arrives `dgd/2` later and picks up the
    /// carrier phase `e^{+i omega0 dgd/2}`; the `|-n>` part arrives `dgd/2`
    /// earlier with the conjugate phase.
    pub fn apply_pmd(&self, axis: Axis3, dgd: f64) -> Self {
        let half = 0.5 * dgd;
        let plus = axis.plus_state();
        let minus = axis.minus_state();
        let phase = C64::from_polar(1.0, self.pulse.omega0 * half);
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for term in &self.terms {
            let cp = plus.inner(&term.amp);
            let cm = minus.inner(&term.amp);
            if cp != C64::new(0.0, 0.0) {
                terms.push(Term {
                    delay: term.delay + half,
                    amp: plus.scale(cp * phase),
                });
            }
            if cm != C64::new(0.0, 0.0) {
                terms.push(Term {
                    delay: term.delay - half,
                    amp: minus.scale(cm * phase.conj()),
                });
            }
        }
        GaussianSumState {
            pulse: self.pulse,
            terms,
        }
    }

    /// Frequency-independent filter applied to every amplitude.
    pub fn apply_operator(&self, op: &Operator2) -> Self {
        GaussianSumState {
            pulse: self.pulse,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    delay: t.delay,
                    amp: op.apply(&t.amp),
                })
                .collect(),
        }
    }

    pub fn apply_pdl(&self, axis: Axis3, mu: f64) -> Self {
        self.apply_operator(&pdl_operator(axis, mu))
    }

    /// Ideal polarizer transmitting `phi`.
    pub fn project_pure(&self, phi: JonesVector) -> Self {
        self.apply_operator(&Operator2::projector(&phi))
    }

    /// `I(t) = || sum_i amp_i g(t - delay_i) ||^2`.
    pub fn intensity(&self, t: f64) -> f64 {
        let field = self.terms.iter().fold(JonesVector::ZERO, |acc, term| {
            acc + term
                .amp
                .scale(C64::new(self.pulse.envelope(t - term.delay), 0.0))
        });
        field.norm_sq()
    }

    /// Returns `(int I dt, int t I dt)`.
    fn moments(&self) -> (f64, f64) {
        let mut energy = 0.0;
        let mut first = 0.0;
        for (i, ti) in self.terms.iter().enumerate() {
            let w = ti.amp.norm_sq();
            energy += w;
            first += w * ti.delay;
            for tj in &self.terms[i + 1..] {
                let w = 2.0
                    * ti.amp.inner(&tj.amp).re
                    * self.pulse.overlap(ti.delay, tj.delay);
                energy += w;
                first += w * 0.5 * (ti.delay + tj.delay);
            }
        }
        (energy, first)
    }

    /// Output energy relative to a unit-energy input.
    pub fn transmission(&self) -> f64 {
        self.moments().0
    }

    /// Intensity-weighted mean arrival time `int t I / int I`.
    pub fn mean_time(&self) -> Result<f64> {
        let (energy, first) = self.moments();
        if !(energy >= NORM_FLOOR) {
            return Err(Error::NearZeroTransmission(energy));
        }
        Ok(first / energy)
    }

    /// Earliest and latest term delay, `(0, 0)` for an empty state.
    pub fn delay_span(&self) -> (f64, f64) {
        if self.terms.is_empty() {
            return (0.0, 0.0);
        }
        self.terms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t.delay), hi.max(t.delay))
            })
    }

    /// Merges terms with coincident delays and drops those whose own weight is
    /// below `tol` times the total transmission.
    pub fn prune(&self, tol: f64) -> Self {
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.delay.total_cmp(&b.delay));
        let mut merged: Vec<Term> = Vec::with_capacity(sorted.len());
        for term in sorted {
            match merged.last_mut() {
                Some(last) if self.same_delay(last.delay, term.delay) => {
                    last.amp = last.amp + term.amp;
                }
                _ => merged.push(term),
            }
        }
        let merged = GaussianSumState {
            pulse: self.pulse,
            terms: merged,
        };
        let floor = tol * merged.transmission();
        GaussianSumState {
            pulse: self.pulse,
            terms: merged
                .terms
                .into_iter()
                .filter(|t| {
                    let w = t.amp.norm_sq();
                    w != 0.0 && w >= floor
                })
                .collect(),
        }
    }

    fn same_delay(&self, a: f64, b: f64) -> bool {
        let tol = (1e-15 * self.pulse.t_c).max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
        (a - b).abs() < tol
    }
}
