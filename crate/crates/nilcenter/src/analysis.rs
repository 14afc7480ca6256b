//! Runs the pipeline stages on a parsed system and fills a [`Report`].

use std::collections::BTreeMap;

use nilcenter_core::assume::Assumptions;
use nilcenter_core::cmanifold::{cm_jet, exact_cm_candidate, restrict, Reversibility};
use nilcenter_core::monodromy::{andreev_data, classify_monodromy, describe, AndreevData, MonodromyStatus, MonodromyVerdict};
use nilcenter_core::normalform::{integrability_pattern, normal_form};
use nilcenter_core::numerics::{displacement, geometric_grid, period, v1_check};
use nilcenter_core::obstruction::{center_verdict, omega_series, CenterCertificate, CenterStatus, CenterVerdict, ObstructionSeries};
use nilcenter_core::system::{PlanarSystem, Relation, SystemModel, DEFAULT_ORDER};
use nilcenter_core::{Coef, Error as CoreError, Sign, Symbol};

use crate::parse::{parse_coef, parse_source, InputError};
use crate::print::print_system;
use crate::report::*;

/// Default analysis order for systems with free parameters.
pub const SYMBOLIC_ORDER: u32 = 8;
/// Default cap on the analysis order.
pub const MAX_ORDER: u32 = 16;

/// Integrator tolerance for the return map (the refined run uses 1/32 of it).
const FOCAL_TOL: f64 = 1e-10;
const FOCAL_GRID: (f64, f64, usize) = (0.02, 0.1, 5);
/// Tolerance on the spread of the two `v₁` extrapolations.
const V1_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Analyze,
    Cm,
    Omega,
    Nf,
    Focal,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Analyze => "analyze",
            Stage::Cm => "cm",
            Stage::Omega => "omega",
            Stage::Nf => "nf",
            Stage::Focal => "focal",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub order: Option<u32>,
    /// `name=expr` pairs.
    pub numeric: Vec<String>,
    /// `expr<0`, `expr>0` or `expr!=0`.
    pub assume: Vec<String>,
    pub max_order: Option<u32>,
    pub nf: bool,
    pub focal: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {source}")]
    Compute { stage: &'static str, source: CoreError },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) | Failure::Usage(_) => 2,
            Failure::Compute { .. } => 1,
        }
    }
}

fn at(stage: &'static str) -> impl Fn(CoreError) -> Failure {
    move |source| Failure::Compute { stage, source }
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

struct Prepared {
    system: SystemModel,
    order: u32,
    assume: Assumptions,
    echo: InputEcho,
}

fn prepare(file: &str, text: &str, opts: &Options, min_order: u32) -> Result<Prepared, Failure> {
    let src = parse_source(text)?;
    let declared = src.params.clone();
    let mut values: BTreeMap<Symbol, Coef> = BTreeMap::new();
    let mut numeric_echo = BTreeMap::new();
    for item in &opts.numeric {
        let (name, expr) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--numeric expects name=value, got '{}'", item)))?;
        let name = name.trim();
        let Some(sym) = declared.iter().find(|p| &***p == name) else {
            return Err(Failure::Usage(format!("--numeric: '{}' is not a declared parameter", name)));
        };
        let v = parse_coef(expr, &declared).map_err(|e| Failure::Usage(format!("--numeric {}: {}", name, e)))?;
        numeric_echo.insert(name.to_string(), v.to_string());
        values.insert(sym.clone(), v);
    }
    let symbolic_after = declared.iter().any(|p| !values.contains_key(p));
    let max_order = opts.max_order.unwrap_or(MAX_ORDER);
    let default = if symbolic_after { SYMBOLIC_ORDER } else { DEFAULT_ORDER };
    let order = match (opts.order, src.order) {
        (Some(n), Some(d)) if n > d => {
            return Err(Failure::Usage(format!("--order {} exceeds the declared input order {}", n, d)))
        }
        (Some(n), _) => n,
        (None, Some(d)) => default.min(d),
        (None, None) => default,
    };
    if order > max_order {
        return Err(Failure::Usage(format!("order {} exceeds NILCENTER_MAX_ORDER = {}", order, max_order)));
    }
    if order < min_order {
        return Err(Failure::Usage(format!("order {} is too low; this command needs at least {}", order, min_order)));
    }
    // an undeclared order reads the file as exact polynomials
    let max_degree = src.fields.iter().filter_map(|f| f.degree()).max().unwrap_or(0);
    let model = src.into_model(order.max(DEFAULT_ORDER).max(max_degree))?;
    let input_order = model.order();
    let system = if values.is_empty() {
        model
    } else {
        model.substitute(&values).map_err(|e| Failure::Usage(format!("--numeric: {}", e)))?
    };
    let mut assume = Assumptions::new();
    let mut assume_echo = Vec::new();
    for a in &opts.assume {
        let (expr, rel) = parse_assumption(a, &declared)?;
        let expr = if values.is_empty() {
            expr
        } else {
            expr.substitute(&values)
                .ok_or_else(|| Failure::Usage(format!("--assume {}: a denominator vanishes", a)))?
        };
        assume_echo.push(format!("{} {}", expr, rel.symbol()));
        assume.push(expr, rel);
    }
    let echo = InputEcho {
        file: file.into(),
        params: system.params().iter().map(|p| p.to_string()).collect(),
        input_order,
        order,
        numeric: numeric_echo,
        assumptions: assume_echo,
        system: print_system(&system),
    };
    Ok(Prepared { system, order, assume, echo })
}

fn parse_assumption(text: &str, params: &[Symbol]) -> Result<(Coef, Relation), Failure> {
    let bad = || Failure::Usage(format!("--assume expects expr<0, expr>0 or expr!=0, got '{}'", text));
    let (lhs, rel, rhs) = if let Some((l, r)) = text.split_once("!=") {
        (l, Relation::NonZero, r)
    } else if let Some((l, r)) = text.split_once('<') {
        (l, Relation::Negative, r)
    } else if let Some((l, r)) = text.split_once('>') {
        (l, Relation::Positive, r)
    } else {
        return Err(bad());
    };
    if rhs.trim() != "0" {
        return Err(bad());
    }
    let e = parse_coef(lhs, params).map_err(|e| Failure::Usage(format!("--assume: {}", e)))?;
    Ok((e, rel))
}

struct Stages {
    pl: PlanarSystem,
    data: AndreevData,
    mono: MonodromyVerdict,
}

fn manifold_stage(p: &Prepared) -> Result<(PlanarSystem, CenterManifoldSection), Failure> {
    let s = &p.system;
    let h = cm_jet(s, p.order).map_err(at("center manifold"))?;
    let pl = restrict(s, &h).map_err(at("center manifold"))?;
    let exact = exact_cm_candidate(s, p.order).map_err(at("center manifold"))?;
    let section = CenterManifoldSection {
        order: p.order,
        h: h.h.poly().to_string(),
        restricted_dx: pl.xdot().poly().to_string(),
        restricted_dy: pl.ydot().poly().to_string(),
        exact_surface: exact.map(|v| v.to_string()),
        provenance: Provenance::new("cm_jet", "invariance equation solved degree by degree"),
    };
    Ok((pl, section))
}

fn planar_stages(p: &Prepared, report: &mut Report, show_cm: bool) -> Result<Stages, Failure> {
    let (pl, cm) = manifold_stage(p)?;
    if show_cm {
        report.center_manifold = Some(cm);
    }
    let data = andreev_data(&pl).map_err(at("Andreev data"))?;
    let mono = classify_monodromy(&data, &p.assume);
    report.andreev = Some(AndreevSection {
        big_f: data.big_f.poly().to_string(),
        f: data.f.poly().to_string(),
        phi: data.phi.poly().to_string(),
        alpha: data.alpha,
        a: data.a.to_string(),
        beta: data.beta,
        b: data.b.to_string(),
        n: data.n,
        a_tilde: data.a_tilde.to_string(),
        b_tilde: data.b_tilde.to_string(),
        delta: data.delta.as_ref().map(|d| d.to_string()),
        provenance: Provenance::new("andreev_data", "implicit solution of y + X2(x, y) = 0 on the restriction"),
    });
    report.monodromy = Some(MonodromySection {
        status: match mono.status {
            MonodromyStatus::Monodromic { .. } => "monodromic",
            MonodromyStatus::NotMonodromic(_) => "not-monodromic",
            MonodromyStatus::Inconclusive { .. } => "inconclusive",
        }
        .into(),
        andreev_number: mono.andreev_number(),
        condition: mono.condition.map(|c| c.label().to_string()),
        summary: describe(&mono),
        side_conditions: mono.side_conditions.iter().map(|c| c.to_string()).collect(),
        provenance: Provenance::new("classify_monodromy", "Andreev monodromy criterion"),
    });
    Ok(Stages { pl, data, mono })
}

fn obstruction_section(o: &ObstructionSeries) -> ObstructionSection {
    let first = o.first_nonzero.as_ref().map(|(k, _)| *k);
    let omegas = o
        .omegas
        .iter()
        .map(|(k, w)| {
            let role = match first {
                Some(f) if *k == f => "first-nonzero",
                Some(f) if *k > f => "representative-dependent",
                _ => "zero",
            };
            OmegaEntry { index: *k, value: w.to_string(), role: role.into() }
        })
        .collect();
    ObstructionSection {
        order: o.order,
        omegas,
        first_nonzero: first,
        h: o.h.poly().to_string(),
        provenance: Provenance::new(
            "omega_series",
            "formal series H = y^2 + ... with XH = sum omega_n x^n, kernel coefficients pinned to zero",
        ),
    }
}

fn certificate_section(c: &CenterCertificate) -> CertificateSection {
    let rev = match c.reversibility {
        Reversibility::XReversible => "x-reversible",
        Reversibility::YReversible => "y-reversible",
        Reversibility::Both => "x- and y-reversible",
        Reversibility::None => "none",
    };
    CertificateSection {
        surface: c.surface.to_string(),
        restricted_dx: c.restriction.xdot().poly().to_string(),
        restricted_dy: c.restriction.ydot().poly().to_string(),
        reversibility: rev.into(),
        hamiltonian: c.hamiltonian.as_ref().map(|h| {
            h.normalized.as_ref().unwrap_or(&h.gradient).poly().to_string()
        }),
    }
}

fn certificate_reason(c: &CenterCertificate) -> String {
    let how = match (c.reversibility, &c.hamiltonian) {
        (Reversibility::None, Some(_)) => "Hamiltonian".to_string(),
        (Reversibility::XReversible, _) => "x-reversible".into(),
        (Reversibility::YReversible, _) => "y-reversible".into(),
        (Reversibility::Both, _) => "x- and y-reversible".into(),
        (Reversibility::None, None) => "uncertified".into(),
    };
    format!("the restriction to the exact invariant surface {} = 0 is {}", c.surface, how)
}

fn verdict_section(v: &CenterVerdict) -> VerdictSection {
    let side: Vec<String> = v.side_conditions.iter().map(|c| c.to_string()).collect();
    let criterion = v.criterion().to_string();
    let mut out = VerdictSection {
        status: String::new(),
        line: String::new(),
        criterion: criterion.clone(),
        index: None,
        value: None,
        certificate: None,
        side_conditions: side,
        provenance: Provenance::new("center_verdict", &criterion),
    };
    match &v.status {
        CenterStatus::Focus { n } => {
            out.status = "focus".into();
            out.line = format!("focus: Andreev number {} is odd and beta = n-1 ({})", n, criterion);
        }
        CenterStatus::NotACenter { index, value } => {
            out.status = "not-a-center".into();
            out.index = Some(*index);
            out.value = Some(value.to_string());
            out.line = format!("not-a-center: first nonzero omega_{} = {}, even index ({})", index, value, criterion);
        }
        CenterStatus::NotFormallyIntegrable { index, value, certificate } => {
            out.index = Some(*index);
            out.value = Some(value.to_string());
            match certificate {
                Some(c) => {
                    let basis = CenterVerdict { status: CenterStatus::CenterConfirmed(c.clone()), side_conditions: Default::default() }
                        .criterion()
                        .to_string();
                    out.status = "center-confirmed".into();
                    out.line = format!(
                        "center-confirmed: {} ({}); the odd-index omega_{} = {} only reflects the pinned kernel choices",
                        certificate_reason(c),
                        basis,
                        index,
                        value
                    );
                    out.criterion = basis.clone();
                    out.provenance = Provenance::new("find_certificate", &basis);
                    out.certificate = Some(certificate_section(c));
                }
                None => {
                    out.status = "no-formal-first-integral".into();
                    out.line = format!(
                        "no-formal-first-integral: first nonzero omega_{} = {}, odd index; center and focus both remain possible ({})",
                        index, value, criterion
                    );
                }
            }
        }
        CenterStatus::CenterConfirmed(c) => {
            out.status = "center-confirmed".into();
            out.line = format!("center-confirmed: {} ({})", certificate_reason(c), criterion);
            out.certificate = Some(certificate_section(c));
        }
        CenterStatus::Undecided { order } => {
            out.status = "undecided".into();
            out.line = format!(
                "undecided: all obstructions vanish through order {} and no exact certificate was found ({})",
                order, criterion
            );
        }
    }
    out
}

fn monodromy_only_verdict(mono: &MonodromyVerdict) -> VerdictSection {
    let (status, line) = match &mono.status {
        MonodromyStatus::NotMonodromic(r) => ("not-monodromic", format!("not-monodromic: {} (Andreev monodromy criterion)", r)),
        MonodromyStatus::Inconclusive { jet_bound } => (
            "inconclusive",
            format!("inconclusive: f vanishes through order {}; raise the order (Andreev monodromy criterion)", jet_bound),
        ),
        MonodromyStatus::Monodromic { .. } => unreachable!("monodromic points get a center verdict"),
    };
    VerdictSection {
        status: status.into(),
        line,
        criterion: "Andreev monodromy criterion".into(),
        index: None,
        value: None,
        certificate: None,
        side_conditions: mono.side_conditions.iter().map(|c| c.to_string()).collect(),
        provenance: Provenance::new("classify_monodromy", "Andreev monodromy criterion"),
    }
}

fn numeric_section(st: &Stages, verdict: Option<&CenterVerdict>) -> Result<NumericSection, Failure> {
    let n = st
        .mono
        .andreev_number()
        .ok_or_else(|| Failure::Usage("the numerical return map needs a monodromic singular point".into()))?;
    let (mut lo, mut hi, k) = FOCAL_GRID;
    let mut tries = 0;
    let res = loop {
        match displacement(&st.pl, n, &geometric_grid(lo, hi, k), FOCAL_TOL) {
            Ok(r) => break r,
            Err(CoreError::Domain(_)) | Err(CoreError::Tolerance(_)) if tries < 4 => {
                lo /= 2.0;
                hi /= 2.0;
                tries += 1;
            }
            Err(e) => return Err(Failure::Compute { stage: "return map", source: e }),
        }
    };
    let v1 = v1_check(&st.pl, n, lo, V1_TOL).ok();
    let sys_mu = v1.map(|v| v.mu).unwrap_or_else(|| {
        nilcenter_core::numerics::PolarSystem::new(&st.pl, n).map(|p| p.mu).unwrap_or(f64::NAN)
    });
    let agreement = agreement(&res, v1.as_ref(), verdict);
    Ok(NumericSection {
        n,
        mu: sys_mu,
        period: period(n),
        samples: res.samples.iter().map(|s| SampleEntry { rho0: s.rho0, d: s.d, err: s.err, sign: s.sign }).collect(),
        sign: res.sign,
        exponent: res.exponent,
        leading: res.leading,
        parity_consistent: res.parity_matches(),
        v1: v1.map(|v| V1Section { extrapolated: v.extrapolated, predicted: v.predicted, consistent: v.consistent(V1_TOL) }),
        agreement,
        provenance: Provenance::new(
            "displacement",
            "return map in generalized polar coordinates, error from a refined second run",
        ),
    })
}

fn agreement(
    res: &nilcenter_core::numerics::DisplacementResult,
    v1: Option<&nilcenter_core::numerics::V1Estimate>,
    verdict: Option<&CenterVerdict>,
) -> String {
    let floor = res.below_floor();
    let Some(v) = verdict else {
        return "no exact verdict to compare with".into();
    };
    match &v.status {
        CenterStatus::NotACenter { value, .. } => {
            let Some(w) = value.as_rational() else {
                return "the first obstruction is symbolic; no sign to compare".into();
            };
            // ω > 0 makes H grow along orbits: repelling, negative displacement
            let want: i8 = if Sign::of_rational(&w) == Sign::Positive { -1 } else { 1 };
            match res.sign {
                Some(s) if s == want => "corroborates: the displacement sign matches the first obstruction".into(),
                Some(_) => "discrepancy: the displacement sign contradicts the first obstruction".into(),
                None => "inconclusive: the displacement does not have a stable sign on this grid".into(),
            }
        }
        CenterStatus::CenterConfirmed(_) | CenterStatus::NotFormallyIntegrable { certificate: Some(_), .. } => {
            if floor {
                "corroborates: the displacement is below the error floor".into()
            } else {
                "discrepancy: nonzero displacement at a certified center".into()
            }
        }
        CenterStatus::Focus { .. } => match v1 {
            Some(e) if e.consistent(V1_TOL) && (e.extrapolated - 1.0).abs() > V1_TOL => {
                "corroborates: v1(T) differs from 1 with the sign of -mu".into()
            }
            Some(_) => "discrepancy: v1(T) does not separate from 1 as a focus requires".into(),
            None => "inconclusive: v1(T) could not be estimated".into(),
        },
        _ => {
            if floor {
                "no exact verdict; the displacement is below the error floor".into()
            } else {
                "no exact verdict; the displacement has a stable nonzero sign".into()
            }
        }
    }
}

pub fn run_stage(stage: Stage, file: &str, text: &str, opts: &Options) -> Result<Outcome, Failure> {
    // obstructions start at degree 4; the manifold and normal form make sense from 2
    let min_order = if matches!(stage, Stage::Cm | Stage::Nf) { 2 } else { 4 };
    let p = prepare(file, text, opts, min_order)?;
    let mut report = Report::new(stage.name(), p.echo.clone());
    let mut exit_code = 0;
    let s = &p.system;
    match stage {
        Stage::Omega => {
            let o = omega_series(s, p.order).map_err(at("obstructions"))?;
            report.obstructions = Some(obstruction_section(&o));
        }
        Stage::Nf => {
            let nf = normal_form(s, p.order).map_err(at("normal form"))?;
            // the pattern needs the Andreev number; it is left out when there is none
            let n = cm_jet(s, p.order)
                .and_then(|h| restrict(s, &h))
                .and_then(|pl| andreev_data(&pl))
                .ok()
                .and_then(|d| d.n);
            report.normal_form = Some(normal_form_section(&nf, n));
        }
        Stage::Cm => {
            report.center_manifold = Some(manifold_stage(&p)?.1);
        }
        Stage::Analyze | Stage::Focal => {
            let st = planar_stages(&p, &mut report, stage == Stage::Analyze)?;
            let mut verdict = None;
            match st.mono.status {
                MonodromyStatus::Monodromic { .. } => {
                    let o = omega_series(s, p.order).map_err(at("obstructions"))?;
                    let v = center_verdict(s, &st.data, &st.mono, &o, &p.assume).map_err(at("verdict"))?;
                    if stage == Stage::Analyze {
                        report.obstructions = Some(obstruction_section(&o));
                    }
                    report.verdict = Some(verdict_section(&v));
                    verdict = Some(v);
                }
                MonodromyStatus::Inconclusive { .. } => {
                    exit_code = 3;
                    report.verdict = Some(monodromy_only_verdict(&st.mono));
                }
                MonodromyStatus::NotMonodromic(_) => report.verdict = Some(monodromy_only_verdict(&st.mono)),
            }
            if stage == Stage::Analyze && opts.nf {
                let nf = normal_form(s, p.order).map_err(at("normal form"))?;
                report.normal_form = Some(normal_form_section(&nf, st.data.n));
            }
            if stage == Stage::Focal || opts.focal {
                let free = s.free_symbols();
                if !free.is_empty() {
                    let names: Vec<String> = free.iter().map(|f| f.to_string()).collect();
                    return Err(Failure::Usage(format!(
                        "the numerical return map needs values for {} (use --numeric)",
                        names.join(", ")
                    )));
                }
                report.numeric = Some(numeric_section(&st, verdict.as_ref())?);
            }
            if stage == Stage::Focal {
                report.andreev = None;
            }
        }
    }
    Ok(Outcome { report, exit_code })
}

fn normal_form_section(nf: &nilcenter_core::normalform::NormalFormResult, n: Option<u32>) -> NormalFormSection {
    NormalFormSection {
        order: nf.order,
        p1: nf.p1.poly().to_string(),
        q2: nf.q2.poly().to_string(),
        r1: nf.r1.poly().to_string(),
        identity_transform: nf.is_identity_transform(),
        transform: std::array::from_fn(|i| nf.transform[i].poly().to_string()),
        pattern: n.map(|n| {
            let p = integrability_pattern(nf, n);
            PatternSection {
                n,
                m_index: p.m_index,
                p1_zero_to_order: p.p1_zero_to_m,
                matches_2sn_minus_1: p.matches_2sn_minus_1,
            }
        }),
        provenance: Provenance::new("normal_form", "degree-by-degree homological equation with certified resonant complement"),
    }
}
