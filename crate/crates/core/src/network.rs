//! Experiment description and its text format.
//!
//! ```text
//! # comment
//! pulse tc=100 omega0=0
//! input theta=1.5707963 phi=0
//! pmd axis=0,0,1 dgd=1
//! pdl axis=1,0,0 db=8.6858896
//! polarizer theta=0 phi=0
//! ```
//!
//! `pulse` must be the first directive and `input` the second. Element lines
//! follow in the order the light traverses them. Axes take either
//! `axis=x,y,z` or Poincare angles `theta=,phi=`; PDL takes `mu=` (natural
//! units) or `db=`, not both; `input` and `polarizer`
//! also accept Jones components `h=re,im v=re,im`. All
//! times share one unit, whatever `tc` is expressed in.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::polarization::{mu_from_db, Axis3, JonesVector};
use crate::pulse::{GaussianSumState, PulseSpec, DEFAULT_PRUNE_TOL};
use crate::weak::{network_mean_time, WeakResult};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Element {
    /// Birefringent section; `axis` is the direction of the slow eigenmode
    /// on the Poincare sphere and `dgd` the differential group delay.
    Pmd { axis: Axis3, dgd: f64 },
    /// Filter `e^{mu sigma_n / 2}`; `|-n>` is the most attenuated state.
    Pdl { axis: Axis3, mu: f64 },
    /// Ideal polarizer transmitting `state`.
    Polarizer { state: JonesVector },
}

impl Element {
    pub fn pmd(axis: Axis3, dgd: f64) -> Result<Self> {
        if !(dgd >= 0.0) || !dgd.is_finite() {
            return Err(Error::Negative { what: "dgd", value: dgd });
        }
        Ok(Element::Pmd { axis, dgd })
    }

    pub fn pdl(axis: Axis3, mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::Negative { what: "mu", value: mu });
        }
        Ok(Element::Pdl { axis, mu })
    }

    pub fn polarizer(state: JonesVector) -> Result<Self> {
        Ok(Element::Polarizer {
            state: state.normalize()?,
        })
    }

    pub fn is_pmd(&self) -> bool {
        matches!(self, Element::Pmd { .. })
    }

    pub fn dgd(&self) -> Option<f64> {
        match self {
            Element::Pmd { dgd, .. } => Some(*dgd),
            _ => None,
        }
    }

    /// Propagates `state` through this element with the exact engine.
    pub fn propagate(&self, state: &GaussianSumState) -> GaussianSumState {
        match *self {
            Element::Pmd { axis, dgd } => state.apply_pmd(axis, dgd),
            Element::Pdl { axis, mu } => state.apply_pdl(axis, mu),
            Element::Polarizer { state: phi } => state.project_pure(phi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub pulse: PulseSpec,
    pub input: JonesVector,
    pub elements: Vec<Element>,
}

impl NetworkSpec {
    pub fn new(pulse: PulseSpec, input: JonesVector, elements: Vec<Element>) -> Result<Self> {
        Ok(NetworkSpec {
            pulse,
            input: input.normalize()?,
            elements,
        })
    }

    pub fn with_input(&self, input: JonesVector) -> Self {
        NetworkSpec {
            pulse: self.pulse,
            input,
            elements: self.elements.clone(),
        }
    }

    pub fn with_elements(&self, elements: Vec<Element>) -> Self {
        NetworkSpec {
            pulse: self.pulse,
            input: self.input,
            elements,
        }
    }

    /// Same network with every PMD delay multiplied by `factor`.
    pub fn scale_dgd(&self, factor: f64) -> Self {
        self.with_elements(
            self.elements
                .iter()
                .map(|e| match *e {
                    Element::Pmd { axis, dgd } => Element::Pmd {
                        axis,
                        dgd: dgd * factor,
                    },
                    other => other,
                })
                .collect(),
        )
    }

    pub fn total_dgd(&self) -> f64 {
        self.elements.iter().filter_map(Element::dgd).sum()
    }

    pub fn max_dgd(&self) -> f64 {
        self.elements
            .iter()
            .filter_map(Element::dgd)
            .fold(0.0, f64::max)
    }

    /// `max_j dgd_j / t_c`.
    pub fn weakness(&self) -> f64 {
        self.max_dgd() / self.pulse.t_c()
    }
}

/// What went wrong on a line of a network file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownDirective,
    UnknownField,
    ExpectedKeyValue,
    MissingField(&'static str),
    DuplicateField,
    ConflictingFields(&'static str, &'static str),
    MalformedNumber,
    ZeroVector,
    Negative(&'static str),
    NonPositive(&'static str),
    MissingPulse,
    MissingInput,
    Misplaced(&'static str),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnknownDirective => write!(f, "unknown directive"),
            UnknownField => write!(f, "unknown field"),
            ExpectedKeyValue => write!(f, "expected key=value"),
            MissingField(name) => write!(f, "missing required field `{name}`"),
            DuplicateField => write!(f, "duplicate field"),
            ConflictingFields(a, b) => write!(f, "`{a}` and `{b}` are mutually exclusive"),
            MalformedNumber => write!(f, "malformed number"),
            ZeroVector => write!(f, "zero vector"),
            Negative(name) => write!(f, "`{name}` must be non-negative"),
            NonPositive(name) => write!(f, "`{name}` must be positive"),
            MissingPulse => write!(f, "expected `pulse` as the first directive"),
            MissingInput => write!(f, "expected `input` as the second directive"),
            Misplaced(name) => write!(f, "`{name}` may appear only once, at the top"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind} (at `{token}`)")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// The offending token, or `<end of input>`.
    pub token: String,
    pub kind: ParseErrorKind,
}

struct Field<'a> {
    key: &'a str,
    value: &'a str,
    token: &'a str,
}

struct Line<'a> {
    number: usize,
    directive: &'a str,
    fields: Vec<Field<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, token: &str, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.number,
            token: token.to_string(),
            kind,
        }
    }

    fn tokenize(number: usize, text: &'a str, allowed: &[&str]) -> std::result::Result<Self, ParseError> {
        let mut words = text.split_whitespace();
        let directive = words.next().unwrap_or_default();
        let mut line = Line {
            number,
            directive,
            fields: Vec::new(),
        };
        for token in words {
            let Some((key, value)) = token.split_once('=') else {
                return Err(line.err(token, ParseErrorKind::ExpectedKeyValue));
            };
            if !allowed.contains(&key) {
                return Err(line.err(token, ParseErrorKind::UnknownField));
            }
            if line.fields.iter().any(|f| f.key == key) {
                return Err(line.err(token, ParseErrorKind::DuplicateField));
            }
            line.fields.push(Field { key, value, token });
        }
        Ok(line)
    }

    fn get(&self, key: &str) -> Option<&Field<'a>> {
        self.fields.iter().find(|f| f.key == key)
    }

    fn require(&self, key: &'static str) -> std::result::Result<&Field<'a>, ParseError> {
        self.get(key)
            .ok_or_else(|| self.err(self.directive, ParseErrorKind::MissingField(key)))
    }

    fn exclusive(&self, a: &'static str, b: &'static str) -> std::result::Result<(), ParseError> {
        match (self.get(a), self.get(b)) {
            (Some(_), Some(fb)) => Err(self.err(fb.token, ParseErrorKind::ConflictingFields(a, b))),
            _ => Ok(()),
        }
    }

    fn number(&self, field: &Field<'_>) -> std::result::Result<f64, ParseError> {
        parse_number(field.value).ok_or_else(|| self.err(field.token, ParseErrorKind::MalformedNumber))
    }

    fn numbers<const N: usize>(&self, field: &Field<'_>) -> std::result::Result<[f64; N], ParseError> {
        let mut out = [0.0; N];
        let mut parts = field.value.split(',');
        for slot in out.iter_mut() {
            *slot = parts
                .next()
                .and_then(parse_number)
                .ok_or_else(|| self.err(field.token, ParseErrorKind::MalformedNumber))?;
        }
        if parts.next().is_some() {
            return Err(self.err(field.token, ParseErrorKind::MalformedNumber));
        }
        Ok(out)
    }

    fn non_negative(&self, key: &'static str) -> std::result::Result<f64, ParseError> {
        let field = self.require(key)?;
        let x = self.number(field)?;
        if x < 0.0 {
            return Err(self.err(field.token, ParseErrorKind::Negative(key)));
        }
        Ok(x)
    }

    /// `theta=,phi=` pair, both required once either is present.
    fn angles(&self) -> std::result::Result<(f64, f64), ParseError> {
        let theta = self.require("theta")?;
        let phi = self.require("phi")?;
        Ok((self.number(theta)?, self.number(phi)?))
    }

    fn axis(&self) -> std::result::Result<Axis3, ParseError> {
        self.exclusive("axis", "theta")?;
        self.exclusive("axis", "phi")?;
        if let Some(field) = self.get("axis") {
            let [x, y, z] = self.numbers::<3>(field)?;
            return Axis3::new(x, y, z).map_err(|_| self.err(field.token, ParseErrorKind::ZeroVector));
        }
        if self.get("theta").is_none() && self.get("phi").is_none() {
            return Err(self.err(self.directive, ParseErrorKind::MissingField("axis")));
        }
        let (theta, phi) = self.angles()?;
        Ok(Axis3::from_angles(theta, phi))
    }

    fn state(&self) -> std::result::Result<JonesVector, ParseError> {
        for (a, b) in [("h", "theta"), ("h", "phi"), ("v", "theta"), ("v", "phi")] {
            self.exclusive(a, b)?;
        }
        if self.get("h").is_some() || self.get("v").is_some() {
            let h = self.require("h")?;
            let v = self.require("v")?;
            let [hr, hi] = self.numbers::<2>(h)?;
            let [vr, vi] = self.numbers::<2>(v)?;
            return JonesVector::normalized(C64::new(hr, hi), C64::new(vr, vi))
                .map_err(|_| self.err(v.token, ParseErrorKind::ZeroVector));
        }
        let (theta, phi) = self.angles()?;
        Ok(JonesVector::from_angles(theta, phi))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    // Rust's float parser also accepts inf/nan spellings; only finite
    // decimal literals are valid here.
    let ok = !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses a network file.
pub fn parse_network(text: &str) -> std::result::Result<NetworkSpec, ParseError> {
    let mut pulse = None;
    let mut input = None;
    let mut elements = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        last_line = number;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let directive = trimmed.split_whitespace().next().unwrap_or_default();
        let expected_first = pulse.is_none();
        let expected_second = pulse.is_some() && input.is_none();
        let positional = |kind: ParseErrorKind| ParseError {
            line: number,
            token: directive.to_string(),
            kind,
        };

        match directive {
            "pulse" => {
                if !expected_first {
                    return Err(positional(ParseErrorKind::Misplaced("pulse")));
                }
                let line = Line::tokenize(number, trimmed, &["tc", "omega0"])?;
                let tc_field = line.require("tc")?;
                let tc = line.number(tc_field)?;
                if !(tc > 0.0) {
                    return Err(line.err(tc_field.token, ParseErrorKind::NonPositive("tc")));
                }
                let omega0 = match line.get("omega0") {
                    Some(f) => line.number(f)?,
                    None => 0.0,
                };
                pulse = Some(PulseSpec::new(tc, omega0).expect("validated above"));
            }
            "input" => {
                if expected_first {
                    return Err(positional(ParseErrorKind::MissingPulse));
                }
                if !expected_second {
                    return Err(positional(ParseErrorKind::Misplaced("input")));
                }
                let line = Line::tokenize(number, trimmed, &["theta", "phi", "h", "v"])?;
                input = Some(line.state()?);
            }
            "pmd" | "pdl" | "polarizer" => {
                if expected_first {
                    return Err(positional(ParseErrorKind::MissingPulse));
                }
                if expected_second {
                    return Err(positional(ParseErrorKind::MissingInput));
                }
                let element = match directive {
                    "pmd" => {
                        let line = Line::tokenize(number, trimmed, &["axis", "theta", "phi", "dgd"])?;
                        let axis = line.axis()?;
                        Element::Pmd {
                            axis,
                            dgd: line.non_negative("dgd")?,
                        }
                    }
                    "pdl" => {
                        let line =
                            Line::tokenize(number, trimmed, &["axis", "theta", "phi", "mu", "db"])?;
                        let axis = line.axis()?;
                        line.exclusive("mu", "db")?;
                        let mu = if line.get("db").is_some() {
                            let db = line.non_negative("db")?;
                            mu_from_db(db).expect("non-negative")
                        } else {
                            line.non_negative("mu")?
                        };
                        Element::Pdl { axis, mu }
                    }
                    _ => {
                        let line = Line::tokenize(number, trimmed, &["theta", "phi", "h", "v"])?;
                        Element::Polarizer { state: line.state()? }
                    }
                };
                elements.push(element);
            }
            _ => return Err(positional(ParseErrorKind::UnknownDirective)),
        }
    }

    let eof = |kind| ParseError {
        line: last_line + 1,
        token: "<end of input>".to_string(),
        kind,
    };
    let pulse = pulse.ok_or_else(|| eof(ParseErrorKind::MissingPulse))?;
    let input = input.ok_or_else(|| eof(ParseErrorKind::MissingInput))?;
    Ok(NetworkSpec {
        pulse,
        input,
        elements,
    })
}

/// Shortest text that parses back to exactly `x`.
fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_axis(axis: &Axis3) -> String {
    let [x, y, z] = axis.components();
    format!("axis={},{},{}", fmt_num(x), fmt_num(y), fmt_num(z))
}

fn fmt_state(s: &JonesVector) -> String {
    format!(
        "h={},{} v={},{}",
        fmt_num(s.h.re),
        fmt_num(s.h.im),
        fmt_num(s.v.re),
        fmt_num(s.v.im)
    )
}

/// Canonical text form: every number written so that it re-parses exactly,
/// axes as vectors, states as Jones components, PDL in natural units.
pub fn serialize_network(spec: &NetworkSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "pulse tc={} omega0={}",
        fmt_num(spec.pulse.t_c()),
        fmt_num(spec.pulse.omega0())
    );
    let _ = writeln!(out, "input {}", fmt_state(&spec.input));
    for e in &spec.elements {
        let _ = match e {
            Element::Pmd { axis, dgd } => writeln!(out, "pmd {} dgd={}", fmt_axis(axis), fmt_num(*dgd)),
            Element::Pdl { axis, mu } => writeln!(out, "pdl {} mu={}", fmt_axis(axis), fmt_num(*mu)),
            Element::Polarizer { state } => writeln!(out, "polarizer {}", fmt_state(state)),
        };
    }
    out
}

/// Observables from the exact engine.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRun {
    pub mean_time: f64,
    pub transmission: f64,
    pub state: GaussianSumState,
}

impl ExactRun {
    /// `points` evenly spaced samples `(t, I(t))` over the term span padded by
    /// `margin` coherence times on either side.
    pub fn intensity_samples(&self, points: usize, margin: f64) -> Vec<(f64, f64)> {
        let (lo, hi) = self.state.delay_span();
        let tc = self.state.pulse().t_c();
        let (start, end) = (lo - margin * tc, hi + margin * tc);
        let step = if points > 1 {
            (end - start) / (points - 1) as f64
        } else {
            0.0
        };
        (0..points)
            .map(|k| {
                let t = start + step * k as f64;
                (t, self.state.intensity(t))
            })
            .collect()
    }
}

/// Exact field at the end of the chain, pruned after every element.
pub fn propagate(spec: &NetworkSpec) -> GaussianSumState {
    spec.elements.iter().fold(
        GaussianSumState::initial(spec.pulse, spec.input),
        |state, e| e.propagate(&state).prune(DEFAULT_PRUNE_TOL),
    )
}

pub fn run_exact(spec: &NetworkSpec) -> Result<ExactRun> {
    let state = propagate(spec);
    let mean_time = state.mean_time()?;
    Ok(ExactRun {
        mean_time,
        transmission: state.transmission(),
        state,
    })
}

/// First-order (weak-measurement) mean time for the spec.
pub fn run_weak(spec: &NetworkSpec) -> Result<WeakResult> {
    network_mean_time(spec.input, &spec.elements, &spec.pulse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MINIMAL: &str = "pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,1 dgd=0.5\n";

    fn kind_at(text: &str) -> (usize, String, ParseErrorKind) {
        let e = parse_network(text).unwrap_err();
        (e.line, e.token, e.kind)
    }

    #[test]
    fn minimal_file() {
        let spec = parse_network(MINIMAL).unwrap();
        assert_eq!(spec.elements.len(), 1);
        assert_eq!(spec.pulse.t_c(), 1.0);
        assert_eq!(spec.pulse.omega0(), 0.0);
        assert!(spec.input.approx_eq(&JonesVector::H, 0.0));
        assert_eq!(spec.elements[0], Element::Pmd { axis: Axis3::Z, dgd: 0.5 });
    }

    #[test]
    fn comments_blank_lines_and_forms() {
        let text = "# header\n\n  pulse tc=2.5 omega0=1e3\n# c\ninput h=1,0 v=0,1\npmd theta=1.5707963267948966 phi=0 dgd=1e-2\npdl axis=1,0,0 db=8.685889638\npolarizer theta=0 phi=0\n";
        let spec = parse_network(text).unwrap();
        assert_eq!(spec.pulse.omega0(), 1000.0);
        assert_abs_diff_eq!(spec.input.h.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        match spec.elements[0] {
            Element::Pmd { axis, dgd } => {
                assert_abs_diff_eq!(axis.x(), 1.0, epsilon = 1e-15);
                assert_eq!(dgd, 0.01);
            }
            _ => panic!(),
        }
        match spec.elements[1] {
            Element::Pdl { mu, .. } => assert_abs_diff_eq!(mu, 1.0, epsilon = 1e-9),
            _ => panic!(),
        }
        assert!(matches!(spec.elements[2], Element::Polarizer { .. }));
    }

    #[test]
    fn error_line_numbers_and_tokens() {
        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\n\npmd axis=0,0,1 dgd=-1\n");
        assert_eq!((line, token.as_str(), kind), (4, "dgd=-1", ParseErrorKind::Negative("dgd")));

        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\nlens f=2\n");
        assert_eq!((line, token.as_str(), kind), (3, "lens", ParseErrorKind::UnknownDirective));

        let (line, _, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,1\n");
        assert_eq!((line, kind), (3, ParseErrorKind::MissingField("dgd")));

        let (line, token, kind) = kind_at("pulse tc=1 tc=2\n");
        assert_eq!((line, token.as_str(), kind), (1, "tc=2", ParseErrorKind::DuplicateField));

        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,0 dgd=1\n");
        assert_eq!((line, token.as_str(), kind), (3, "axis=0,0,0", ParseErrorKind::ZeroVector));

        let (line, token, kind) = kind_at("pulse tc=-3\n");
        assert_eq!((line, token.as_str(), kind), (1, "tc=-3", ParseErrorKind::NonPositive("tc")));

        let (line, token, kind) = kind_at("pulse tc=1.2.3\n");
        assert_eq!((line, token.as_str(), kind), (1, "tc=1.2.3", ParseErrorKind::MalformedNumber));

        let (line, token, kind) = kind_at("pulse tc=100ps\n");
        assert_eq!((line, token.as_str(), kind), (1, "tc=100ps", ParseErrorKind::MalformedNumber));

        let (line, token, kind) = kind_at("# only\npmd axis=0,0,1 dgd=1\n");
        assert_eq!((line, token.as_str(), kind), (2, "pmd", ParseErrorKind::MissingPulse));

        let (line, token, kind) = kind_at("pulse tc=1\n");
        assert_eq!((line, token.as_str(), kind), (2, "<end of input>", ParseErrorKind::MissingInput));

        let (line, kind) = {
            let e = parse_network("").unwrap_err();
            (e.line, e.kind)
        };
        assert_eq!((line, kind), (1, ParseErrorKind::MissingPulse));

        let (line, token, kind) = kind_at("pulse tc=1\npmd axis=0,0,1 dgd=1\n");
        assert_eq!((line, token.as_str(), kind), (2, "pmd", ParseErrorKind::MissingInput));

        let (line, token, kind) =
            kind_at("pulse tc=1\ninput theta=0 phi=0\npdl axis=1,0,0 mu=1 db=3\n");
        assert_eq!((line, token.as_str(), kind), (3, "db=3", ParseErrorKind::ConflictingFields("mu", "db")));

        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\npulse tc=2\n");
        assert_eq!((line, token.as_str(), kind), (3, "pulse", ParseErrorKind::Misplaced("pulse")));

        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,1 dgd\n");
        assert_eq!((line, token.as_str(), kind), (3, "dgd", ParseErrorKind::ExpectedKeyValue));

        let (line, token, kind) = kind_at("pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,1 dgd=nan\n");
        assert_eq!((line, token.as_str(), kind), (3, "dgd=nan", ParseErrorKind::MalformedNumber));

        let (line, token, kind) = kind_at("pulse tc=1\ninput h=0,0 v=0,0\n");
        assert_eq!((line, token.as_str(), kind), (2, "v=0,0", ParseErrorKind::ZeroVector));
    }

    #[test]
    fn message_has_line_and_token() {
        let e = parse_network("pulse tc=1\ninput theta=0 phi=0\npmd dgd=-1 axis=0,0,1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("dgd=-1"), "{msg}");
    }

    #[test]
    fn serialization_is_canonical() {
        let spec = parse_network("pulse tc=1\ninput theta=0 phi=0\npdl theta=0 phi=0 db=3\npmd dgd=2 axis=0,0,5\n").unwrap();
        let text = serialize_network(&spec);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "pulse tc=1 omega0=0");
        assert_eq!(lines[1], "input h=1,0 v=0,0");
        assert!(lines[2].starts_with("pdl axis=0,0,1 mu=0.345387763949"), "{}", lines[2]);
        assert_eq!(lines[3], "pmd axis=0,0,1 dgd=2");
        assert_eq!(parse_network(&text).unwrap(), spec);
    }

    #[test]
    fn number_formatting_round_trips() {
        for x in [0.0, -0.0, 1e-300, 3.5e-7, 0.1, 1.0 / 3.0, 12345.678, 9.9e20, -2.5e-5] {
            assert_eq!(parse_number(&fmt_num(x)).unwrap().to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn exact_runner() {
        let identity = parse_network("pulse tc=1\ninput theta=1 phi=2\n").unwrap();
        let r = run_exact(&identity).unwrap();
        assert_eq!(r.mean_time, 0.0);
        assert_abs_diff_eq!(r.transmission, 1.0, epsilon = 1e-15);

        let r = run_exact(&parse_network(MINIMAL).unwrap()).unwrap();
        assert_abs_diff_eq!(r.mean_time, 0.25, epsilon = 1e-15);

        let blocked = parse_network(
            "pulse tc=1\ninput theta=0 phi=0\npmd axis=0,0,1 dgd=1\npolarizer theta=3.141592653589793 phi=0\n",
        )
        .unwrap();
        assert!(matches!(run_exact(&blocked), Err(Error::NearZeroTransmission(_))));
    }

    #[test]
    fn intensity_samples_cover_span() {
        let spec = parse_network("pulse tc=1\ninput theta=1.5707963267948966 phi=0\npmd axis=0,0,1 dgd=6\n").unwrap();
        let run = run_exact(&spec).unwrap();
        let s = run.intensity_samples(2001, 5.0);
        assert_eq!(s.len(), 2001);
        assert_abs_diff_eq!(s[0].0, -8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[2000].0, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn weak_runner() {
        let empty = parse_network("pulse tc=1\ninput theta=1 phi=2\n").unwrap();
        assert_eq!(run_weak(&empty).unwrap().mean_time, 0.0);

        let with_pol = parse_network(
            "pulse tc=1\ninput theta=0.7 phi=0.3\npmd axis=0,0,1 dgd=0.01\npolarizer theta=1.2 phi=0.4\n",
        )
        .unwrap();
        let with_pdl = parse_network(
            "pulse tc=1\ninput theta=0.7 phi=0.3\npmd axis=0,0,1 dgd=0.01\npdl theta=1.2 phi=0.4 mu=30\n",
        )
        .unwrap();
        let a = run_weak(&with_pol).unwrap().mean_time;
        let b = run_weak(&with_pdl).unwrap().mean_time;
        assert_abs_diff_eq!(a, b, epsilon = 1e-6 * 0.005);
    }

    #[test]
    fn element_constructors_validate() {
        assert!(Element::pmd(Axis3::Z, -1.0).is_err());
        assert!(Element::pdl(Axis3::Z, f64::INFINITY).is_err());
        assert!(Element::polarizer(JonesVector::ZERO).is_err());
        assert!(Element::pmd(Axis3::Z, 0.0).unwrap().is_pmd());
    }

    #[test]
    fn spec_scaling() {
        let spec = parse_network("pulse tc=2\ninput theta=0 phi=0\npmd axis=0,0,1 dgd=1\npdl axis=1,0,0 mu=1\npmd axis=1,0,0 dgd=3\n").unwrap();
        assert_eq!(spec.total_dgd(), 4.0);
        assert_eq!(spec.weakness(), 1.5);
        assert_eq!(spec.scale_dgd(0.5).max_dgd(), 1.5);
    }
}
