//! Runs the pipelines on a resolved document and renders the results.

use std::fmt::Write as _;

use clap::ValueEnum;
use loctorus::affine::{characteristic_in_root_frame, compatibility_check, induced_normals, validate_affine_atlas, AffineError};
use loctorus::base_complex::validate_complex;
use loctorus::four_manifold::{
    auto_trinions, blow_up_corner, fundamental_group_report, total_signature, BoundaryContribution, SignatureError,
};
use loctorus::spectral::{e2_page, euler_characteristic, k_e2_page, total_cohomology, k_groups, E2Page, Fibration, GradedGroups, SpectralError};
use loctorus::torus_data::{is_locally_standard, validate_characteristic, validate_monodromy};
use loctorus::validation::ValidationReport;
use loctorus::IntegerMatrix;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{Resolved, TrinionSource};
use crate::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Euler,
    Pi1,
    Cohomology,
    Ktheory,
    Signature,
    Affine,
    Report,
}

impl Command {
    pub const SECTIONS: [Command; 7] = [
        Command::Validate,
        Command::Euler,
        Command::Pi1,
        Command::Cohomology,
        Command::Ktheory,
        Command::Signature,
        Command::Affine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Euler => "euler",
            Command::Pi1 => "pi1",
            Command::Cohomology => "cohomology",
            Command::Ktheory => "ktheory",
            Command::Signature => "signature",
            Command::Affine => "affine",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub status: Status,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<SectionError>,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Section {
            name,
            status: Status::Ok,
            data: json!({}),
            error: None,
            lines: Vec::new(),
        }
    }

    fn fail(mut self, kind: &str, message: String, code: ExitCode) -> Self {
        self.status = Status::Failed;
        self.error = Some(SectionError {
            kind: kind.to_string(),
            message,
            exit_code: code as i32,
        });
        self
    }

    fn skip(mut self, why: &str) -> Self {
        self.status = Status::Skipped;
        self.lines.push(format!("skipped: {why}"));
        self.data = json!({ "skipped": why });
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.exit_code)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub tool: String,
    pub input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub command: &'static str,
    pub sections: Vec<Section>,
}

impl InvariantReport {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// A single-section command exits with its section's code; `report`
    /// fails only when validation does.
    pub fn exit_code(&self) -> i32 {
        if self.command == "report" {
            self.section("validate").map_or(0, Section::exit_code)
        } else {
            self.sections.first().map_or(0, Section::exit_code)
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.tool);
        let _ = writeln!(out, "input sha256: {}", self.input_sha256);
        if let Some(n) = &self.name {
            let _ = writeln!(out, "document: {n}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n[{}]", s.name);
            for l in &s.lines {
                let _ = writeln!(out, "{l}");
            }
            if let Some(e) = &s.error {
                let _ = writeln!(out, "error [{}]: {}", e.kind, e.message);
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn int(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn matrix_json(m: &IntegerMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(int).collect())).collect())
}

fn vector_text(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("({})", parts.join(", "))
}

fn issues(rep: &ValidationReport) -> Value {
    Value::Array(rep.issues.iter().map(|i| Value::String(i.to_string())).collect())
}

fn validate(r: &Resolved) -> Section {
    let mut s = Section::new("validate");
    let complex = validate_complex(&r.base);
    let monodromy = validate_monodromy(&r.base, &r.monodromy);
    let characteristic = if complex.is_valid() && monodromy.is_valid() {
        validate_characteristic(&r.base, &r.monodromy, &r.characteristic)
    } else {
        let mut rep = ValidationReport::new();
        rep.push("characteristic pair", "not checked: the complex or monodromy is invalid");
        rep
    };
    let locally_standard = is_locally_standard(&r.monodromy);
    for (label, rep) in [("complex", &complex), ("monodromy", &monodromy), ("characteristic pair", &characteristic)] {
        if rep.is_valid() {
            s.lines.push(format!("{label}: valid"));
        } else {
            s.lines.push(format!("{label}: invalid"));
            s.lines.extend(rep.issues.iter().map(|i| format!("  {i}")));
        }
    }
    s.lines.push(format!("locally_standard: {locally_standard}"));
    let valid = complex.is_valid() && monodromy.is_valid() && characteristic.is_valid();
    s.data = json!({
        "valid": valid,
        "complex": issues(&complex),
        "monodromy": issues(&monodromy),
        "characteristic": issues(&characteristic),
        "locally_standard": locally_standard,
    });
    if valid {
        s
    } else {
        s.fail("ValidationFailed", "the input is not a valid characteristic pair".to_string(), ExitCode::Validation)
    }
}

fn euler(r: &Resolved) -> Section {
    let mut s = Section::new("euler");
    let chi = euler_characteristic(&r.base);
    s.lines.push(format!("chi(X) = {chi} (number of fixed points)"));
    s.data = json!({ "euler_characteristic": chi });
    s
}

fn pi1(r: &Resolved) -> Section {
    let mut s = Section::new("pi1");
    let rep = fundamental_group_report(&r.base, r.section_exists);
    s.lines.push(rep.to_string());
    s.lines.push(format!("generators: {}", rep.generators.join(" ")));
    let relators: Vec<String> = rep.relators.iter().map(|w| w.to_string()).collect();
    if !relators.is_empty() {
        s.lines.push(format!("relators: {}", relators.join("; ")));
    }
    s.lines.push(format!("H1(B) = {}", rep.base_h1));
    if rep.h1_consistent() == Some(false) {
        s.lines.push("warning: H1 of the presentation disagrees with the free rank".to_string());
    }
    s.data = json!({
        "statement": rep.to_string(),
        "isomorphic": matches!(rep.status, loctorus::four_manifold::Pi1Status::Isomorphic),
        "generators": rep.generators,
        "relators": relators,
        "free_rank": rep.free_rank,
        "base_h1": rep.base_h1.to_string(),
    });
    s
}

fn spectral_failure(s: Section, e: &SpectralError) -> Section {
    let (kind, code) = match e {
        SpectralError::SectionRequired => ("SectionRequired", ExitCode::Scope),
        SpectralError::SubcomplexViolation { .. } => ("SubcomplexViolation", ExitCode::Validation),
        SpectralError::DegeneracyNotCertified(_) => ("DegeneracyNotCertified", ExitCode::Scope),
        SpectralError::UnsupportedRank(_) => ("UnsupportedRank", ExitCode::Scope),
        SpectralError::InvalidInput(_) => ("InvalidInput", ExitCode::Validation),
        SpectralError::Torus(_) => ("TorusData", ExitCode::Validation),
        SpectralError::Lattice(_) => ("Lattice", ExitCode::Validation),
    };
    s.fail(kind, e.to_string().replace('\n', "; "), code)
}

fn page_lines(page: &E2Page, row_label: impl Fn(usize) -> String) -> Vec<String> {
    let rows = page.rows();
    let cols = page.base_dim + 1;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|&q| (0..cols).map(|p| page.get(p, q).to_string()).collect())
        .collect();
    let width: Vec<usize> = (0..cols)
        .map(|p| cells.iter().map(|r| r[p].chars().count()).max().unwrap_or(1).max(1))
        .collect();
    let labels: Vec<String> = rows.iter().map(|&q| row_label(q)).collect();
    let label_width = labels.iter().map(String::len).max().unwrap_or(0);
    let mut out = Vec::new();
    for (i, _) in rows.iter().enumerate().rev() {
        let mut line = format!("  {:>label_width$} |", labels[i]);
        for (p, cell) in cells[i].iter().enumerate() {
            let pad = width[p] - cell.chars().count();
            line.push_str(&format!(" {}{}", cell, " ".repeat(pad)));
        }
        out.push(line.trim_end().to_string());
    }
    let axis: Vec<String> = (0..cols).map(|p| format!("{p:<w$}", w = width[p])).collect();
    out.push(format!("  {:>label_width$}   {}", "p", axis.join(" ")).trim_end().to_string());
    out
}

fn page_json(page: &E2Page) -> Value {
    let rows: serde_json::Map<String, Value> = page
        .rows()
        .iter()
        .map(|&q| {
            let row = (0..=page.base_dim).map(|p| Value::String(page.get(p, q).to_string())).collect();
            (q.to_string(), Value::Array(row))
        })
        .collect();
    json!({
        "rows": rows,
        "degeneracy_certified": page.degeneracy_certified,
        "degeneracy_reason": page.degeneracy_reason,
        "e1_euler_sum": page.e1_euler_sum(),
    })
}

fn groups_json(g: &GradedGroups) -> Value {
    json!({
        "assembled": g.assembled,
        "groups": g.groups.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>(),
    })
}

fn spectral_section(
    name: &'static str,
    r: &Resolved,
    page_fn: fn(&Fibration) -> Result<E2Page, SpectralError>,
    groups_fn: fn(&Fibration) -> Result<GradedGroups, SpectralError>,
    row_label: fn(usize) -> String,
    group_label: fn(usize) -> String,
) -> Section {
    let s = Section::new(name);
    let fib = match Fibration::new(&r.base, &r.monodromy, &r.characteristic, r.section_exists) {
        Ok(f) => f,
        Err(e) => return spectral_failure(s, &e),
    };
    let page = match page_fn(&fib) {
        Ok(p) => p,
        Err(e) => return spectral_failure(s, &e),
    };
    let mut s = s;
    s.lines.push("E2 page:".to_string());
    s.lines.extend(page_lines(&page, row_label));
    let certified = if page.degeneracy_certified { "certified" } else { "not certified" };
    s.lines.push(format!("degeneration at E2 {certified}: {}", page.degeneracy_reason));
    s.data = json!({ "e2": page_json(&page) });
    match groups_fn(&fib) {
        Ok(g) if g.assembled => {
            for (k, grp) in &g.groups {
                s.lines.push(format!("{} = {grp}", group_label(*k)));
            }
            s.data["groups"] = groups_json(&g);
            s
        }
        Ok(g) => {
            s.lines.push("extension problem: the E2 page has torsion; graded pieces only".to_string());
            for (k, ps) in &g.pieces {
                let parts: Vec<String> = ps.iter().map(|((p, q), grp)| format!("E^{{{p},{q}}} = {grp}")).collect();
                s.lines.push(format!("gr {} : {}", group_label(*k), parts.join(", ")));
            }
            s.data["groups"] = groups_json(&g);
            s
        }
        Err(e) => spectral_failure(s, &e),
    }
}

fn cohomology(r: &Resolved) -> Section {
    spectral_section("cohomology", r, e2_page, total_cohomology, |q| format!("q={q}"), |k| format!("H^{k}(X)"))
}

fn ktheory(r: &Resolved) -> Section {
    spectral_section(
        "ktheory",
        r,
        k_e2_page,
        k_groups,
        |q| if q == 0 { "even".to_string() } else { "odd".to_string() },
        |k| format!("K^{k}(X)"),
    )
}

fn signature_failure(s: Section, e: &SignatureError) -> Section {
    let (kind, code) = match e {
        SignatureError::NotSymplectic(_) => ("NotSymplectic", ExitCode::Validation),
        SignatureError::AsymmetricGram(_) => ("AsymmetricGram", ExitCode::Validation),
        SignatureError::NormalizationViolation { .. } => ("NormalizationViolation", ExitCode::Validation),
        SignatureError::KTooSmall(_) => ("KTooSmall", ExitCode::Validation),
        SignatureError::BadVector => ("BadVector", ExitCode::Input),
        SignatureError::OrientationMissing => ("OrientationMissing", ExitCode::Scope),
        SignatureError::AutoTrinionsUnsupported(_) => ("AutoTrinionsUnsupported", ExitCode::Scope),
        SignatureError::Base(_) => ("BaseComplex", ExitCode::Input),
        SignatureError::Torus(_) => ("TorusData", ExitCode::Validation),
        SignatureError::Lattice(_) => ("Lattice", ExitCode::Validation),
    };
    s.fail(kind, e.to_string(), code)
}

fn signature(r: &Resolved) -> Section {
    let s = Section::new("signature");
    let Some(spec) = &r.signature else {
        return s.skip("no signature block");
    };
    if r.base.n != 2 {
        return s.fail(
            "UnsupportedRank",
            format!("the signature is computed for four-dimensional total spaces only, got n = {}", r.base.n),
            ExitCode::Scope,
        );
    }
    if !r.oriented {
        return signature_failure(s, &SignatureError::OrientationMissing);
    }
    let pairs = match &spec.pairs {
        TrinionSource::Pairs(p) => p.clone(),
        TrinionSource::Auto { genus } => match auto_trinions(&r.base, &r.monodromy, *genus) {
            Ok(p) => p,
            Err(e) => return signature_failure(s, &e),
        },
    };
    let breakdown = match total_signature(r.oriented, &pairs, &spec.boundary) {
        Ok(b) => b,
        Err(e) => return signature_failure(s, &e),
    };
    let mut s = s;
    for (t, tau) in pairs.iter().zip(&breakdown.tau_values) {
        s.lines.push(format!("tau_1({}, {}) = {tau}", t.c1, t.c2));
    }
    s.lines.push(format!("interior: {}", breakdown.sigma_interior));
    let mut components = Vec::new();
    for (i, (part, c)) in spec.boundary.iter().zip(&breakdown.components).enumerate() {
        let mut entry = json!({
            "kind": c.kind,
            "signature": c.signature,
            "correction": c.correction,
            "verified": c.verified,
        });
        if let BoundaryContribution::Corner(corner) = part {
            if let Ok(blow) = blow_up_corner(corner) {
                s.lines.push(format!(
                    "boundary {}: blow-up gives u1 = {}, u2 = {}",
                    i + 1,
                    vector_text(&blow.u1),
                    vector_text(&blow.u2)
                ));
                entry["u1"] = Value::Array(blow.u1.iter().map(int).collect());
                entry["u2"] = Value::Array(blow.u2.iter().map(int).collect());
            }
        }
        match &c.matrix {
            Some(m) => {
                s.lines.push(format!("boundary {} ({}): necklace {m}, signature {}", i + 1, c.kind, c.signature));
                entry["matrix"] = matrix_json(m);
            }
            None => s.lines.push(format!("boundary {} ({}): contribution 0, not verified", i + 1, c.kind)),
        }
        if c.correction != 0 {
            s.lines.push(format!("boundary {}: blow-up correction {:+}", i + 1, c.correction));
        }
        components.push(entry);
    }
    if breakdown.multi_component {
        s.lines.push("several boundary components: contributions summed componentwise".to_string());
    }
    s.lines.push(format!("sigma(X) = {}", breakdown.sigma_total));
    s.data = json!({
        "tau_values": breakdown.tau_values,
        "sigma_interior": breakdown.sigma_interior,
        "components": components,
        "sigma_boundary": breakdown.sigma_boundary,
        "blowup_correction": breakdown.blowup_correction,
        "sigma": breakdown.sigma_total,
        "multi_component": breakdown.multi_component,
    });
    s
}

fn affine_failure(s: Section, e: &AffineError) -> Section {
    let (kind, code) = match e {
        AffineError::InvalidAtlas(_) => ("InvalidAtlas", ExitCode::Validation),
        AffineError::InconsistentPropagation { .. } => ("InconsistentPropagation", ExitCode::Validation),
        AffineError::UnimodularityFailure(_) => ("UnimodularityFailure", ExitCode::Validation),
        AffineError::MissingNormal { .. } => ("MissingNormal", ExitCode::Input),
        AffineError::GraphMismatch(_) => ("GraphMismatch", ExitCode::Validation),
        AffineError::Lattice(_) => ("Lattice", ExitCode::Validation),
        AffineError::Torus(_) => ("TorusData", ExitCode::Validation),
    };
    s.fail(kind, e.to_string().replace('\n', "; "), code)
}

fn affine(r: &Resolved) -> Section {
    let s = Section::new("affine");
    let Some(a) = &r.affine else {
        return s.skip("no affine block");
    };
    let rep = validate_affine_atlas(&a.atlas);
    if !rep.is_valid() {
        return affine_failure(s, &AffineError::InvalidAtlas(rep));
    }
    let normals = match induced_normals(&a.atlas) {
        Ok(n) => n,
        Err(e) => return affine_failure(s, &e),
    };
    let derived = match characteristic_in_root_frame(&a.atlas, &normals) {
        Ok(c) => c,
        Err(e) => return affine_failure(s, &e),
    };
    let mut s = s;
    s.lines.push("atlas: valid".to_string());
    let mut normal_json = serde_json::Map::new();
    for ((facet, chart), u) in &normals.normals {
        s.lines.push(format!("normal of {facet} in {chart}: {}", vector_text(u)));
        normal_json.insert(format!("{facet}@{chart}"), Value::Array(u.iter().map(int).collect()));
    }
    let root = a.atlas.charts.first().cloned().unwrap_or_default();
    for (facet, v) in &derived.facet_vectors {
        s.lines.push(format!("characteristic vector of {facet} in {root}: {}", vector_text(v)));
    }
    let agrees = derived
        .facet_vectors
        .iter()
        .all(|(f, v)| r.characteristic.facet_vectors.get(f).is_none_or(|w| w == v));
    s.lines.push(format!("agrees with the characteristic block: {agrees}"));
    let compatible = match &a.holonomy {
        None => None,
        Some(rho) => match compatibility_check(&a.atlas, rho) {
            Ok(ok) => Some(ok),
            Err(e) => return affine_failure(s, &e),
        },
    };
    match compatible {
        Some(ok) => s.lines.push(format!("linear parts equal rho^-T on every edge: {ok}")),
        None => s.lines.push("no holonomy given; compatibility not checked".to_string()),
    }
    s.lines.push("the condition on the Lagrangian section transitions is not checked".to_string());
    s.data = json!({
        "normals": normal_json,
        "characteristic": derived.facet_vectors.iter().map(|(k, v)| (k.clone(), Value::Array(v.iter().map(int).collect()))).collect::<serde_json::Map<_, _>>(),
        "agrees_with_characteristic": agrees,
        "linear_compatibility": compatible,
        "lagrangian_condition_checked": false,
    });
    if compatible == Some(false) {
        return s.fail(
            "IncompatibleHolonomy",
            "some transition has A different from rho^-T".to_string(),
            ExitCode::Validation,
        );
    }
    s
}

fn section(cmd: Command, r: &Resolved) -> Section {
    match cmd {
        Command::Validate => validate(r),
        Command::Euler => euler(r),
        Command::Pi1 => pi1(r),
        Command::Cohomology => cohomology(r),
        Command::Ktheory => ktheory(r),
        Command::Signature => signature(r),
        Command::Affine => affine(r),
        Command::Report => unreachable!("report is a sequence of sections"),
    }
}

/// Runs one pipeline, or all of them for `report`.
pub fn run(cmd: Command, r: &Resolved, input_sha256: String, name: Option<String>) -> InvariantReport {
    let sections = match cmd {
        Command::Report => Command::SECTIONS.iter().map(|&c| section(c, r)).collect(),
        c => vec![section(c, r)],
    };
    InvariantReport {
        tool: format!("loctorus {}", env!("CARGO_PKG_VERSION")),
        input_sha256,
        name,
        command: cmd.name(),
        sections,
    }
}
