//! Report data shared by the text and JSON outputs. Every quantity carries
//! the operation that produced it and the criterion it feeds.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "nilcenter-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub operation: String,
    pub basis: String,
}

impl Provenance {
    pub fn new(operation: &str, basis: &str) -> Self {
        Provenance { operation: operation.into(), basis: basis.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: u32,
    pub command: String,
    pub input: InputEcho,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub center_manifold: Option<CenterManifoldSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub andreev: Option<AndreevSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monodromy: Option<MonodromySection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub obstructions: Option<ObstructionSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<VerdictSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normal_form: Option<NormalFormSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numeric: Option<NumericSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub file: String,
    pub params: Vec<String>,
    /// Jet order of the input data.
    pub input_order: u32,
    /// Order the analysis runs to.
    pub order: u32,
    pub numeric: BTreeMap<String, String>,
    pub assumptions: Vec<String>,
    pub system: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterManifoldSection {
    pub order: u32,
    pub h: String,
    pub restricted_dx: String,
    pub restricted_dy: String,
    /// `z − jᵐh` when it is an exact invariant surface.
    pub exact_surface: Option<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AndreevSection {
    pub big_f: String,
    pub f: String,
    pub phi: String,
    pub alpha: Option<u32>,
    pub a: String,
    pub beta: Option<u32>,
    pub b: String,
    pub n: Option<u32>,
    pub a_tilde: String,
    pub b_tilde: String,
    pub delta: Option<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromySection {
    /// `monodromic`, `not-monodromic` or `inconclusive`.
    pub status: String,
    pub andreev_number: Option<u32>,
    pub condition: Option<String>,
    pub summary: String,
    pub side_conditions: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub index: u32,
    pub value: String,
    /// `zero`, `first-nonzero` or `representative-dependent`.
    pub role: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionSection {
    pub order: u32,
    pub omegas: Vec<OmegaEntry>,
    pub first_nonzero: Option<u32>,
    pub h: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSection {
    pub surface: String,
    pub restricted_dx: String,
    pub restricted_dy: String,
    pub reversibility: String,
    pub hamiltonian: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSection {
    /// `center-confirmed`, `not-a-center`, `focus`, `no-formal-first-integral`,
    /// `undecided`, `not-monodromic` or `inconclusive`.
    pub status: String,
    pub line: String,
    pub criterion: String,
    pub index: Option<u32>,
    pub value: Option<String>,
    pub certificate: Option<CertificateSection>,
    pub side_conditions: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSection {
    pub n: u32,
    pub m_index: Option<u32>,
    pub p1_zero_to_order: bool,
    pub matches_2sn_minus_1: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormSection {
    pub order: u32,
    pub p1: String,
    pub q2: String,
    pub r1: String,
    pub identity_transform: bool,
    pub transform: [String; 3],
    pub pattern: Option<PatternSection>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub rho0: f64,
    pub d: f64,
    pub err: f64,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct V1Section {
    pub extrapolated: f64,
    pub predicted: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSection {
    pub n: u32,
    pub mu: f64,
    pub period: f64,
    pub samples: Vec<SampleEntry>,
    pub sign: Option<i8>,
    pub exponent: Option<f64>,
    pub leading: Option<u32>,
    pub parity_consistent: Option<bool>,
    pub v1: Option<V1Section>,
    /// How the numbers relate to the exact verdict.
    pub agreement: String,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, input: InputEcho) -> Self {
        Report {
            schema: SCHEMA.into(),
            version: SCHEMA_VERSION,
            command: command.into(),
            input,
            center_manifold: None,
            andreev: None,
            monodromy: None,
            obstructions: None,
            verdict: None,
            normal_form: None,
            numeric: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let i = &self.input;
        let _ = writeln!(o, "nilcenter {}: {}", self.command, i.file);
        if !i.params.is_empty() {
            let _ = writeln!(o, "parameters: {}", i.params.join(", "));
        }
        for (k, v) in &i.numeric {
            let _ = writeln!(o, "numeric: {} = {}", k, v);
        }
        for a in &i.assumptions {
            let _ = writeln!(o, "assume: {}", a);
        }
        let _ = writeln!(o, "order: {} (input known to order {})", i.order, i.input_order);
        for line in i.system.lines() {
            let _ = writeln!(o, "  {}", line);
        }

        if let Some(c) = &self.center_manifold {
            section(&mut o, "center manifold", &c.provenance);
            let _ = writeln!(o, "  z = {} + O({})", c.h, c.order + 1);
            let _ = writeln!(o, "  restricted dx = {}", c.restricted_dx);
            let _ = writeln!(o, "  restricted dy = {}", c.restricted_dy);
            match &c.exact_surface {
                Some(v) => {
                    let _ = writeln!(o, "  exact invariant surface: {} = 0", v);
                }
                None => o.push_str("  the jet is not an exact invariant surface\n"),
            }
        }
        if let Some(a) = &self.andreev {
            section(&mut o, "Andreev data", &a.provenance);
            let _ = writeln!(o, "  F(x) = {}", a.big_f);
            let _ = writeln!(o, "  f(x) = {}", a.f);
            let _ = writeln!(o, "  Phi(x) = {}", a.phi);
            let _ = writeln!(o, "  alpha = {}, a = {}", opt(&a.alpha), a.a);
            let _ = writeln!(o, "  beta = {}, b = {}", opt(&a.beta), a.b);
            if let Some(n) = a.n {
                let _ = writeln!(o, "  n = {}, a~ = {}, b~ = {}", n, a.a_tilde, a.b_tilde);
            }
            if let Some(d) = &a.delta {
                let _ = writeln!(o, "  Delta = {}", d);
            }
        }
        if let Some(m) = &self.monodromy {
            section(&mut o, "monodromy", &m.provenance);
            let _ = writeln!(o, "  {}", m.summary);
            conditions(&mut o, &m.side_conditions);
        }
        if let Some(ob) = &self.obstructions {
            section(&mut o, "obstructions", &ob.provenance);
            for w in &ob.omegas {
                let note = match w.role.as_str() {
                    "first-nonzero" if w.index % 2 == 0 => "  <- first nonzero (even index)",
                    "first-nonzero" => "  <- first nonzero (odd index)",
                    "representative-dependent" => "  (representative-dependent)",
                    _ => "",
                };
                let _ = writeln!(o, "  omega_{} = {}{}", w.index, w.value, note);
            }
            if ob.first_nonzero.is_none() {
                let _ = writeln!(o, "  all obstructions vanish through order {}", ob.order);
            }
        }
        if let Some(nf) = &self.normal_form {
            section(&mut o, "normal form", &nf.provenance);
            o.push_str("  x' = y + x P1(x), y' = Q2(x) + y P1(x), z' = -lambda z + z R1(x)\n");
            let _ = writeln!(o, "  P1(x) = {}", nf.p1);
            let _ = writeln!(o, "  Q2(x) = {}", nf.q2);
            let _ = writeln!(o, "  R1(x) = {}", nf.r1);
            if nf.identity_transform {
                o.push_str("  transform: identity\n");
            } else {
                for (v, t) in ["x", "y", "z"].iter().zip(&nf.transform) {
                    let _ = writeln!(o, "  {} = {}", v, t);
                }
            }
            if let Some(p) = &nf.pattern {
                let what = if p.p1_zero_to_order {
                    format!("P1 vanishes through order {}", nf.order)
                } else {
                    format!(
                        "first nonzero coefficient of P1 at m = {}, {}of the form 2sn-1 with n = {}",
                        opt(&p.m_index),
                        if p.matches_2sn_minus_1 { "" } else { "not " },
                        p.n
                    )
                };
                let _ = writeln!(o, "  {}", what);
            }
        }
        if let Some(nu) = &self.numeric {
            section(&mut o, "numerical return map", &nu.provenance);
            let _ = writeln!(o, "  n = {}, mu = {:.6}, period = {:.12}", nu.n, nu.mu, nu.period);
            for s in &nu.samples {
                let _ = writeln!(o, "  rho0 = {:.4e}  d = {:+.6e}  err = {:.1e}  sign = {:+}", s.rho0, s.d, s.err, s.sign);
            }
            let sign = match nu.sign {
                Some(s) if s > 0 => "positive (attracting)".to_string(),
                Some(_) => "negative (repelling)".to_string(),
                None => "not called".to_string(),
            };
            let _ = writeln!(o, "  displacement sign: {}", sign);
            if let Some(e) = nu.exponent {
                let _ = writeln!(o, "  fitted exponent: {:.3} (leading power {})", e, opt(&nu.leading));
            }
            if let Some(p) = nu.parity_consistent {
                let _ = writeln!(o, "  leading power parity matches n: {}", p);
            }
            if let Some(v) = &nu.v1 {
                let _ = writeln!(
                    o,
                    "  v1(T) = {:.8} (predicted {:.8}, consistent: {})",
                    v.extrapolated, v.predicted, v.consistent
                );
            }
            let _ = writeln!(o, "  agreement with the exact verdict: {}", nu.agreement);
        }
        if let Some(v) = &self.verdict {
            section(&mut o, "verdict", &v.provenance);
            if let Some(c) = &v.certificate {
                let _ = writeln!(o, "  certificate surface: {} = 0", c.surface);
                let _ = writeln!(o, "  restricted dx = {}", c.restricted_dx);
                let _ = writeln!(o, "  restricted dy = {}", c.restricted_dy);
                let _ = writeln!(o, "  reversibility: {}", c.reversibility);
                if let Some(h) = &c.hamiltonian {
                    let _ = writeln!(o, "  Hamiltonian: {}", h);
                }
            }
            conditions(&mut o, &v.side_conditions);
            let _ = writeln!(o, "verdict: {}", v.line);
        }
        o
    }
}

fn section(o: &mut String, title: &str, p: &Provenance) {
    let _ = writeln!(o, "\n[{}] via {}; {}", title, p.operation, p.basis);
}

fn conditions(o: &mut String, cs: &[String]) {
    for c in cs {
        let _ = writeln!(o, "  provided {}", c);
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".into(), T::to_string)
}

/// The verdict line of a text report.
pub fn verdict_line(text: &str) -> Option<&str> {
    text.lines().rev().find_map(|l| l.strip_prefix("verdict: "))
}
