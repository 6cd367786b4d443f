#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use polweak::network::{Element, NetworkSpec};
use polweak::polarization::{pauli_on_axis, pdl_operator, Axis3, JonesVector, Operator2};
use polweak::pulse::PulseSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the sphere.
pub fn random_axis(r: &mut ChaCha8Rng) -> Axis3 {
    let z: f64 = r.gen_range(-1.0..1.0);
    let phi: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    Axis3::new(s * phi.cos(), s * phi.sin(), z).unwrap()
}

/// Uniform pure state on the Poincare sphere.
pub fn random_state(r: &mut ChaCha8Rng) -> JonesVector {
    let (theta, phi) = random_axis(r).angles();
    JonesVector::from_angles(theta, phi)
}

pub struct NetGen {
    pub max_elements: usize,
    pub max_dgd: f64,
    pub max_mu: f64,
    pub polarizers: bool,
    pub max_omega0: f64,
}

impl NetGen {
    pub fn sample(&self, r: &mut ChaCha8Rng, t_c: f64) -> NetworkSpec {
        let n = r.gen_range(1..=self.max_elements);
        let mut elements = Vec::with_capacity(n);
        for _ in 0..n {
            let kind = r.gen_range(0..if self.polarizers { 5 } else { 4 });
            elements.push(match kind {
                0 | 1 => Element::pmd(random_axis(r), r.gen_range(0.0..=self.max_dgd)).unwrap(),
                2 | 3 => Element::pdl(random_axis(r), r.gen_range(0.0..=self.max_mu)).unwrap(),
                _ => Element::polarizer(random_state(r)).unwrap(),
            });
        }
        let omega0 = r.gen_range(0.0..=self.max_omega0);
        NetworkSpec::new(PulseSpec::new(t_c, omega0).unwrap(), random_state(r), elements).unwrap()
    }
}

fn exp_i_sigma(axis: Axis3, angle: f64) -> Operator2 {
    let (c, s) = (angle.cos(), angle.sin());
    Operator2::IDENTITY.scale(C64::new(c, 0.0)) + pauli_on_axis(axis).scale(C64::new(0.0, s))
}

/// Chain transfer matrix at baseband frequency `w`, built from matrix
/// products only.
pub fn transfer(spec: &NetworkSpec, w: f64) -> Operator2 {
    let w0 = spec.pulse.omega0();
    spec.elements.iter().fold(Operator2::IDENTITY, |acc, e| {
        let m = match *e {
            Element::Pmd { axis, dgd } => exp_i_sigma(axis, 0.5 * (w0 + w) * dgd),
            Element::Pdl { axis, mu } => pdl_operator(axis, mu),
            Element::Polarizer { state } => Operator2::projector(&state),
        };
        m * acc
    })
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + h * k as f64;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Adaptive Simpson quadrature to absolute tolerance `eps`.
pub fn adaptive_simpson(a: f64, b: f64, eps: f64, f: &impl Fn(f64) -> f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `(energy, mean time)` from the spectrum `E(w) = T(w) psi exp(-t_c^2 w^2)`:
/// energy by Parseval, mean time as `<E| -i d/dw |E> / <E|E>`.
pub fn spectral_oracle(spec: &NetworkSpec) -> (f64, f64) {
    let tc = spec.pulse.t_c();
    let psi = spec.input;
    let span = 7.0 / tc;
    let h = 1e-4 / tc;
    let field = |w: f64| transfer(spec, w).apply(&psi).scale(C64::new((-tc * tc * w * w).exp(), 0.0));
    let energy = |w: f64| field(w).norm_sq();
    let first = |w: f64| {
        let e = field(w);
        // Five-point derivative.
        let d = (field(w - 2.0 * h) - field(w + 2.0 * h) + (field(w + h) - field(w - h)).scale(C64::new(8.0, 0.0)))
            .scale(C64::new(1.0 / (12.0 * h), 0.0));
        (e.inner(&d) * C64::new(0.0, -1.0)).re
    };
    // Enough panels to resolve the fastest spectral oscillation.
    let total: f64 = spec.elements.iter().filter_map(|e| e.dgd()).sum();
    let panels = 2 * (2000 + (200.0 * total * span) as usize);
    let reference = simpson(-span, span, panels, |w| (-2.0 * tc * tc * w * w).exp());
    let en = simpson(-span, span, panels, energy);
    let fi = simpson(-span, span, panels, first);
    (en / reference, fi / en)
}

/// Relative distance scaled by `scale`.
pub fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
pub const VALID_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/valid");

pub struct Fixture {
    pub name: String,
    pub text: String,
    pub line: usize,
    pub message: String,
}

/// Malformed inputs; each starts with `# expect: <line> <message>`.
pub fn fixtures() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = std::fs::read_dir(FIXTURE_DIR)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap().strip_prefix("# expect: ").unwrap();
            let (line, message) = header.split_once(' ').unwrap();
            Fixture {
                name: path.file_name().unwrap().to_string_lossy().into_owned(),
                line: line.parse().unwrap(),
                message: message.to_string(),
                text,
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// `Err` describes the first fixture that misbehaves.
pub fn check_fixture(f: &Fixture) -> Result<(), String> {
    match polweak::network::parse_network(&f.text) {
        Ok(_) => Err(format!("{}: parsed", f.name)),
        Err(e) if e.line == f.line && e.kind.to_string() == f.message => Ok(()),
        Err(e) => Err(format!("{}: got `{e}`", f.name)),
    }
}

pub fn spec_close(a: &NetworkSpec, b: &NetworkSpec, tol: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(1.0);
    let axes = |x: Axis3, y: Axis3| x.components().iter().zip(y.components()).all(|(p, q)| close(*p, q));
    // Polarizer states are stored up to a global phase.
    let same_ray = |x: &JonesVector, y: &JonesVector| (x.inner(y).norm() - 1.0).abs() <= tol;
    close(a.pulse.t_c(), b.pulse.t_c())
        && close(a.pulse.omega0(), b.pulse.omega0())
        && a.input.approx_eq(&b.input, tol)
        && a.elements.len() == b.elements.len()
        && a.elements.iter().zip(&b.elements).all(|(x, y)| match (x, y) {
            (Element::Pmd { axis: p, dgd: d }, Element::Pmd { axis: q, dgd: e }) => axes(*p, *q) && close(*d, *e),
            (Element::Pdl { axis: p, mu: m }, Element::Pdl { axis: q, mu: n }) => axes(*p, *q) && close(*m, *n),
            (Element::Polarizer { state: s }, Element::Polarizer { state: t }) => same_ray(s, t),
            _ => false,
        })
}

/// Serialize, parse back, compare; also checks the text is a fixed point.
pub fn round_trip(spec: &NetworkSpec) -> Result<(), String> {
    use polweak::network::{parse_network, serialize_network};
    let text = serialize_network(spec);
    let back = parse_network(&text).map_err(|e| format!("{e}\n{text}"))?;
    if !spec_close(spec, &back, 1e-14) {
        return Err(format!("mismatch:\n{text}"));
    }
    let again = serialize_network(&back);
    if again != text {
        let diff: Vec<_> = text.lines().zip(again.lines()).filter(|(a, b)| a != b).collect();
        return Err(format!("not canonical: {diff:?}"));
    }
    Ok(())
}
