//! Closed-form weak-measurement results.
//!
//! A PMD section of delay `dgd` couples polarization (the measured system) to
//! arrival time (the pointer). With a downstream polarizer or PDL the pulse is
//! post-selected, and in the weak regime `dgd << t_c` the mean arrival time is
//! `(dgd/2)` times a weak value of `sigma_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Element;
use crate::polarization::{pauli_on_axis, pdl_operator, Axis3, JonesVector, Operator2};
use crate::pulse::{PulseSpec, NORM_FLOOR};
use crate::C64;

/// Floor on `|<phi|psi>|^2` below which a pure weak value is not evaluated.
pub const ORTHO_FLOOR: f64 = 1e-10;

/// Mean-time contribution of one PMD section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdShift {
    /// Index of the PMD element in the chain.
    pub element: usize,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakResult {
    /// Sum of `per_element_shifts`, in chain order.
    pub mean_time: f64,
    /// `<psi| T^dag T |psi>` for the full chain operator `T` (a squared norm).
    pub norm_sq: f64,
    pub per_element_shifts: Vec<PmdShift>,
    /// `max_j dgd_j / t_c`; the expansion is first order in this ratio.
    pub max_weakness: f64,
}

/// ABL probability that the photon went through `|H>`, given pre-selection
/// `psi` and a polarizer post-selecting `phi` after a strong PMD.
pub fn abl_prob_h(psi: JonesVector, phi: JonesVector) -> Result<f64> {
    let via_h = phi.h.norm_sqr() * psi.h.norm_sqr();
    let via_v = phi.v.norm_sqr() * psi.v.norm_sqr();
    let total = via_h + via_v;
    if !(total > 0.0) {
        return Err(Error::DegeneratePostSelection);
    }
    Ok(via_h / total)
}

/// Mean arrival time after a `z`-axis PMD section and a polarizer `phi`, at
/// any measurement strength.
pub fn mean_time_pure_general(
    psi: JonesVector,
    phi: JonesVector,
    dgd: f64,
    t_c: f64,
    omega0: f64,
) -> Result<f64> {
    let half = 0.5 * dgd;
    let rot = C64::from_polar(1.0, omega0 * half);
    let a = rot * psi.h * phi.h.conj();
    let b = rot.conj() * psi.v * phi.v.conj();
    let x = half / t_c;
    let denom = a.norm_sqr() + b.norm_sqr() + 2.0 * (a.conj() * b).re * (-0.5 * x * x).exp();
    if !(denom >= NORM_FLOOR) {
        return Err(Error::NearZeroTransmission(denom));
    }
    Ok(half * (a.norm_sqr() - b.norm_sqr()) / denom)
}

/// `Re(<phi|sigma_n|psi> / <phi|psi>)`.
pub fn weak_value_pure(psi: JonesVector, phi: JonesVector, axis: Axis3) -> Result<f64> {
    let amp = phi.inner(&psi);
    let p = amp.norm_sqr() / (psi.norm_sq() * phi.norm_sq());
    if !(p >= ORTHO_FLOOR) {
        return Err(Error::OrthogonalPostSelection(p));
    }
    Ok((pauli_on_axis(axis).sandwich(&phi, &psi) / amp).re)
}

/// Weak value of `sigma_z` post-selected on the mixed state `rho ~ F^2` left
/// by a PDL filter `F(mu, n)`: `Re(<psi|F^2 sigma_z|psi> / <psi|F^2|psi>)`.
pub fn weak_value_pdl(psi: JonesVector, pdl_axis: Axis3, mu: f64) -> f64 {
    // F^2 = cosh(mu) (1 + tanh(mu) sigma_n); the cosh cancels. Real parts are
    // taken term by term so mu = 0 reduces to <psi|sigma_z|psi> / <psi|psi>.
    let gamma = mu.tanh();
    let sn = pauli_on_axis(pdl_axis);
    let num = Operator2::SIGMA_Z.sandwich(&psi, &psi).re + gamma * (sn * Operator2::SIGMA_Z).sandwich(&psi, &psi).re;
    let den = psi.norm_sq() + gamma * sn.sandwich(&psi, &psi).re;
    num / den
}

/// Largest mean arrival time reachable by varying the input polarization,
/// for a PMD section followed by PDL on an orthogonal axis:
/// `(dgd/2)/sqrt(1 - tanh^2 mu) = (dgd/2) cosh(mu)`.
pub fn max_anomalous_shift(dgd: f64, mu: f64) -> f64 {
    0.5 * dgd * mu.cosh()
}

/// `w(xi, chi, rho) = (dgd/2) Re(<chi|rho sigma_n|chi> / <chi|rho|chi>)`: the
/// shift a single PMD section produces for input `chi` and post-selection
/// `rho`.
pub fn pmd_shift(axis: Axis3, dgd: f64, chi: &JonesVector, rho: &Operator2) -> Result<f64> {
    let den = rho.sandwich(chi, chi);
    if !(den.re >= NORM_FLOOR) {
        return Err(Error::NearZeroTransmission(den.re));
    }
    Ok(0.5 * dgd * ((*rho * pauli_on_axis(axis)).sandwich(chi, chi) / den).re)
}

/// Chain operator of one element at the carrier frequency (PMD contributes
/// its carrier rotation, filters act as themselves).
pub fn carrier_operator(element: &Element, omega0: f64) -> Operator2 {
    use crate::polarization::pmd_phase_operator;
    match *element {
        Element::Pmd { axis, dgd } => pmd_phase_operator(axis, dgd, omega0),
        Element::Pdl { axis, mu } => pdl_operator(axis, mu),
        Element::Polarizer { state } => Operator2::projector(&state),
    }
}

/// First-order mean arrival time of a pulse through an arbitrary chain.
///
/// Each PMD section `j` contributes `w(xi_j, chi_j, rho_j)` with `chi_j` the
/// input carried up to the section and `rho_j = S_j^dag S_j` the
/// post-selection built from everything from the section onward. All pieces
/// come from one forward and one backward pass over the chain.
pub fn network_mean_time(
    psi: JonesVector,
    elements: &[Element],
    pulse: &PulseSpec,
) -> Result<WeakResult> {
    let ops: Vec<Operator2> = elements
        .iter()
        .map(|e| carrier_operator(e, pulse.omega0()))
        .collect();

    // prefix[k] is the state entering element k.
    let mut prefix = Vec::with_capacity(ops.len() + 1);
    prefix.push(psi);
    for op in &ops {
        let next = op.apply(prefix.last().unwrap());
        prefix.push(next);
    }
    let out = *prefix.last().unwrap();
    let norm_sq = out.norm_sq();
    if !(norm_sq >= NORM_FLOOR) {
        return Err(Error::NearZeroTransmission(norm_sq));
    }

    // back = S_k^dag T psi, walking from the output towards the input.
    let mut back = out;
    let mut shifts = Vec::new();
    for (k, (element, op)) in elements.iter().zip(&ops).enumerate().rev() {
        back = op.adjoint().apply(&back);
        if let Element::Pmd { axis, dgd } = *element {
            let sigma_chi = pauli_on_axis(axis).apply(&prefix[k]);
            shifts.push(PmdShift {
                element: k,
                shift: 0.5 * dgd * back.inner(&sigma_chi).re / norm_sq,
            });
        }
    }
    shifts.reverse();

    let mean_time = shifts.iter().map(|s| s.shift).sum();
    let max_weakness = elements
        .iter()
        .filter_map(|e| match e {
            Element::Pmd { dgd, .. } => Some(dgd / pulse.t_c()),
            _ => None,
        })
        .fold(0.0, f64::max);
    Ok(WeakResult {
        mean_time,
        norm_sq,
        per_element_shifts: shifts,
        max_weakness,
    })
}

/// Principal states of polarization: the PMD eigenmodes carried through the
/// downstream filters, and their normalized overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PspPair {
    /// Normalized `F|+n>` (the slow eigenmode, arriving at `+dgd/2`).
    pub slow: JonesVector,
    /// Normalized `F|-n>` (arriving at `-dgd/2`).
    pub fast: JonesVector,
    /// `<F(-n)|F(+n)>` after normalization.
    pub overlap: C64,
}

/// [`psp_pair_on_axis`] for a PMD section along `z`, where the eigenmodes
/// are `|H>` and `|V>`.
pub fn psp_pair(downstream: &[Element]) -> Result<PspPair> {
    psp_pair_on_axis(Axis3::Z, downstream)
}

pub fn psp_pair_on_axis(pmd_axis: Axis3, downstream: &[Element]) -> Result<PspPair> {
    let mut total = Operator2::IDENTITY;
    for (k, e) in downstream.iter().enumerate() {
        if matches!(e, Element::Pmd { .. }) {
            return Err(Error::UnsupportedElement(k));
        }
        total = carrier_operator(e, 0.0) * total;
    }
    let slow = total.apply(&pmd_axis.plus_state()).normalize()?;
    let fast = total.apply(&pmd_axis.minus_state()).normalize()?;
    Ok(PspPair {
        slow,
        fast,
        overlap: fast.inner(&slow),
    })
}
