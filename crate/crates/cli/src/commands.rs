use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use anyhow::{bail, Context, Result};
use mumeb_core::matrix::MatrixJson;
use mumeb_core::search::{search_excluded_subset, SearchReport};
use mumeb_core::sl2::{
    family, family_labels, family_triple, is_trace_zero_excluded, parse_matrix_list, Violation,
};
use mumeb_core::unitary::build_va;
use mumeb_core::verify::{verify_mumeb_family, Mode, PairOutcome, VerificationReport};
use mumeb_core::{Dyadic, Field, GaloisRing, Mat2F, RingElem, TeichIndex};
use serde::Serialize;
use serde_json::Value;

use crate::config::{FamilySource, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

struct Family {
    name: String,
    labels: Vec<String>,
    members: Vec<Mat2F>,
}

#[derive(Serialize)]
struct Rejection<'a> {
    s: u32,
    family: &'a str,
    excluded: bool,
    violation: Violation,
}

/// Loads the selected family, or reports why a custom file is not a
/// trace-zero excluded subset.
fn load_family(cfg: &RunConfig, field: &Field) -> Result<std::result::Result<Family, Violation>> {
    match &cfg.family {
        FamilySource::Builtin(kind) => {
            let members = family(field, *kind)?.into_members();
            Ok(Ok(Family {
                name: kind.to_string(),
                labels: family_labels(*kind, field.q()),
                members,
            }))
        }
        FamilySource::Custom(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let members = parse_custom(field, &text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let outcome = is_trace_zero_excluded(field, &members)?;
            if let Some(v) = outcome.violation {
                return Ok(Err(v));
            }
            Ok(Ok(Family {
                name: "custom".to_string(),
                labels: (0..members.len()).map(|i| format!("M{i}")).collect(),
                members,
            }))
        }
    }
}

/// Accepts a bare list of index arrays or an object with a `members` list.
fn parse_custom(field: &Field, text: &str) -> Result<Vec<Mat2F>> {
    let value: Value = serde_json::from_str(text)?;
    let list = match value {
        Value::Array(_) => value,
        Value::Object(mut map) => {
            if let Some(s) = map.get("s").and_then(Value::as_u64) {
                if s != u64::from(field.s()) {
                    bail!("family file is for s = {s}, not s = {}", field.s());
                }
            }
            map.remove("members").context("missing `members` list")?
        }
        _ => bail!("expected a list of matrices"),
    };
    Ok(parse_matrix_list(field, &list.to_string())?)
}

fn reject(cfg: &RunConfig, field: &Field, v: Violation) -> Result<Outcome> {
    let what = if v.duplicate {
        "duplicate member"
    } else {
        "trace(A⁻¹B) = 0"
    };
    eprintln!(
        "custom family is not trace-zero excluded: {what} at positions {} and {}",
        v.first, v.second
    );
    let rejection = Rejection {
        s: field.s(),
        family: "custom",
        excluded: false,
        violation: v,
    };
    let pretty = format!(
        "custom family rejected: {what} at positions {} and {}\nresult: FAIL\n",
        v.first, v.second
    );
    emit(cfg, &rejection, pretty)?;
    Ok(Outcome::Fail)
}

fn emit<T: Serialize>(cfg: &RunConfig, value: &T, pretty: String) -> Result<()> {
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            s
        }
        Format::Pretty => pretty,
    };
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

// ---- build ----

#[derive(Serialize)]
struct BuildEntry {
    label: String,
    a: [usize; 4],
    name: String,
    unitary: MatrixJson,
}

#[derive(Serialize)]
struct BuildOutput {
    s: u32,
    q: usize,
    poly: Vec<u8>,
    family: String,
    matrices: Vec<BuildEntry>,
}

pub fn cmd_build(cfg: &RunConfig) -> Result<Outcome> {
    let (field, ring) = cfg.ring()?;
    let fam = match load_family(cfg, &field)? {
        Ok(f) => f,
        Err(v) => return reject(cfg, &field, v),
    };
    let mut pretty = String::new();
    let mut matrices = Vec::with_capacity(fam.members.len());
    for (label, a) in fam.labels.iter().zip(&fam.members) {
        let v = build_va(&ring, a)?;
        writeln!(pretty, "V_{{{label}}}, A = {}", a.name(&field))?;
        pretty.push_str(&v.pretty());
        pretty.push('\n');
        matrices.push(BuildEntry {
            label: label.clone(),
            a: a.indices(),
            name: a.name(&field),
            unitary: v.to_json()?,
        });
    }
    let out = BuildOutput {
        s: field.s(),
        q: field.q(),
        poly: field.poly_coeffs(),
        family: fam.name,
        matrices,
    };
    emit(cfg, &out, pretty)?;
    Ok(Outcome::Pass)
}

// ---- verify ----

#[derive(Serialize)]
struct VerifyOutput<'a> {
    family: &'a str,
    labels: &'a [String],
    bases: usize,
    pair_count: usize,
    failures: usize,
    disagreements: usize,
    all_pass: bool,
    report: &'a VerificationReport,
}

fn pair_line(labels: &[String], p: &PairOutcome) -> String {
    let mut line = format!("  {} / {}:", labels[p.i], labels[p.j]);
    if let Some(sc) = p.shortcut {
        write!(line, " shortcut={sc}").ok();
    }
    if let Some(bf) = p.bruteforce {
        write!(line, " bruteforce={bf}").ok();
    }
    if let Some(w) = &p.witness {
        write!(
            line,
            " witness (ξ, η) = ({}, {}) with |Σ|² = {}",
            w.xi, w.eta, w.mod2
        )
        .ok();
    }
    if let Some(w) = &p.bruteforce_witness {
        write!(
            line,
            " states {} / {} with |⟨·,·⟩|² = {}",
            w.first, w.second, w.mod2
        )
        .ok();
    }
    line
}

fn verify_summary(fam: &Family, report: &VerificationReport) -> String {
    let failures: Vec<&PairOutcome> = report.failures().collect();
    let disagreements = report.pairs.iter().filter(|p| p.disagreement()).count();
    let meb_ok = report.meb.iter().filter(|&&b| b).count();
    let mut s = String::new();
    writeln!(
        s,
        "family: {} (s = {}, q = {}, mode {})",
        fam.name, report.s, report.q, report.mode
    )
    .ok();
    writeln!(s, "bases: {}", report.size).ok();
    writeln!(s, "maximally entangled: {meb_ok}/{}", report.size).ok();
    for (label, ok) in fam.labels.iter().zip(&report.meb) {
        if !ok {
            writeln!(s, "  {label}: not a maximally entangled basis").ok();
        }
    }
    writeln!(s, "pairs: {}", report.pair_count()).ok();
    writeln!(
        s,
        "unbiased pairs: {}/{}",
        report.pair_count() - failures.len(),
        report.pair_count()
    )
    .ok();
    if report.mode == Mode::Both {
        writeln!(s, "shortcut/bruteforce disagreements: {disagreements}").ok();
    }
    for p in failures {
        writeln!(s, "{}", pair_line(&fam.labels, p)).ok();
    }
    writeln!(
        s,
        "result: {}",
        if report.all_pass() { "PASS" } else { "FAIL" }
    )
    .ok();
    s
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let (field, ring) = cfg.ring()?;
    let fam = match load_family(cfg, &field)? {
        Ok(f) => f,
        Err(v) => return reject(cfg, &field, v),
    };
    let report = verify_mumeb_family(&ring, &fam.members, cfg.mode)?;
    let out = VerifyOutput {
        family: &fam.name,
        labels: &fam.labels,
        bases: report.size,
        pair_count: report.pair_count(),
        failures: report.failures().count(),
        disagreements: report.pairs.iter().filter(|p| p.disagreement()).count(),
        all_pass: report.all_pass(),
        report: &report,
    };
    emit(cfg, &out, verify_summary(&fam, &report))?;
    Ok(Outcome::from_bool(report.all_pass()))
}

// ---- search ----

#[derive(Serialize)]
struct SearchVerification {
    mode: Mode,
    pair_count: usize,
    failures: usize,
    all_pass: bool,
}

#[derive(Serialize)]
struct SearchOutput {
    s: u32,
    best_size: usize,
    exact: bool,
    members: Vec<[usize; 4]>,
    names: Vec<String>,
    search: SearchReport,
    verification: SearchVerification,
}

pub fn cmd_search(cfg: &RunConfig) -> Result<Outcome> {
    let (field, ring) = cfg.ring()?;
    let seed = family_triple(&field)?;
    let (found, report) = search_excluded_subset(&field, cfg.budget, Some(seed.members()))?;
    let check = verify_mumeb_family(&ring, found.members(), cfg.mode)?;
    let verification = SearchVerification {
        mode: check.mode,
        pair_count: check.pair_count(),
        failures: check.failures().count(),
        all_pass: check.all_pass(),
    };
    let names: Vec<String> = found.members().iter().map(|m| m.name(&field)).collect();
    let mut pretty = String::new();
    writeln!(
        pretty,
        "s = {}, q = {}, |SL(2, F)| = {}",
        field.s(),
        field.q(),
        report.vertices
    )?;
    writeln!(
        pretty,
        "budget: {} nodes, used {}",
        report.budget, report.nodes
    )?;
    writeln!(pretty, "seed size: {}", report.seed_size)?;
    writeln!(pretty, "greedy size: {}", report.greedy_size)?;
    writeln!(pretty, "best size: {}", report.best_size)?;
    writeln!(pretty, "exact: {}", report.exact)?;
    writeln!(pretty, "members:")?;
    for n in &names {
        writeln!(pretty, "  {n}")?;
    }
    writeln!(
        pretty,
        "verification ({}): {}/{} pairs unbiased",
        verification.mode,
        verification.pair_count - verification.failures,
        verification.pair_count
    )?;
    writeln!(
        pretty,
        "result: {}",
        if verification.all_pass {
            "PASS"
        } else {
            "FAIL"
        }
    )?;
    let ok = verification.all_pass;
    let out = SearchOutput {
        s: field.s(),
        best_size: report.best_size,
        exact: report.exact,
        members: found.to_json(),
        names,
        search: report,
        verification,
    };
    emit(cfg, &out, pretty)?;
    Ok(Outcome::from_bool(ok))
}

// ---- tables ----

#[derive(Serialize)]
struct TraceEntry {
    a: usize,
    b: usize,
    name: String,
    tr: u8,
}

#[derive(Serialize)]
struct GammaEntry {
    a: usize,
    b: usize,
    name: String,
    norm_sq: Dyadic,
}

#[derive(Serialize)]
struct GammaClass {
    class: &'static str,
    elements: usize,
    expected_norm_sq: u64,
    holds: bool,
}

#[derive(Serialize)]
struct TraceChecks {
    orbit_sum_agrees: bool,
    additive_pairs_checked: usize,
    additive: bool,
}

#[derive(Serialize)]
struct TablesOutput {
    s: u32,
    q: usize,
    poly: Vec<u8>,
    h: Vec<u8>,
    trace: Vec<TraceEntry>,
    trace_checks: TraceChecks,
    gamma: Vec<GammaEntry>,
    gamma_classes: Vec<GammaClass>,
}

/// tr agrees with the orbit sum everywhere and is additive against
/// 1, ξ, …, ξ^(s-1) and their doubles.
fn trace_checks(ring: &GaloisRing) -> Result<TraceChecks> {
    let mut orbit_sum_agrees = true;
    for x in ring.elements() {
        orbit_sum_agrees &= ring.trace_by_orbit(x)? == ring.rel_trace(x);
    }
    let s = ring.s() as u16;
    let probes: Vec<RingElem> = (1..=s)
        .flat_map(|k| [ring.teich(TeichIndex(k)), ring.twice(TeichIndex(k))])
        .collect();
    let mut additive = true;
    let mut checked = 0;
    for x in ring.elements() {
        for &y in &probes {
            let lhs = ring.rel_trace(ring.add(x, y)?);
            additive &= lhs == (ring.rel_trace(x) + ring.rel_trace(y)) % 4;
            checked += 1;
        }
    }
    Ok(TraceChecks {
        orbit_sum_agrees,
        additive_pairs_checked: checked,
        additive,
    })
}

fn gamma_class(x: RingElem) -> usize {
    if x.a() != TeichIndex::ZERO {
        2
    } else if x.b() != TeichIndex::ZERO {
        1
    } else {
        0
    }
}

pub fn cmd_tables(cfg: &RunConfig) -> Result<Outcome> {
    let (field, ring) = cfg.ring()?;
    let q = field.q() as u64;
    let mut pretty = String::new();
    writeln!(pretty, "GR(4, 4^{}), h = {:?}", field.s(), ring.h())?;
    writeln!(pretty, "trace table:")?;
    let mut trace = Vec::with_capacity(ring.order());
    let mut gamma = Vec::with_capacity(ring.order());
    let expected = [q * q, 0, q];
    let mut classes = [(0usize, true); 3];
    for b in 0..field.q() {
        let mut row = Vec::with_capacity(field.q());
        for a in 0..field.q() {
            let x = ring.elem(TeichIndex(a as u16), TeichIndex(b as u16))?;
            let name = ring.name(x);
            let tr = ring.rel_trace(x);
            row.push(format!("tr({name}) = {tr}"));
            trace.push(TraceEntry {
                a,
                b,
                name: name.clone(),
                tr,
            });
            let norm_sq = ring.gamma(x).norm_sq();
            let c = gamma_class(x);
            classes[c].0 += 1;
            classes[c].1 &= norm_sq == Dyadic::integer(expected[c] as i64);
            gamma.push(GammaEntry {
                a,
                b,
                name,
                norm_sq,
            });
        }
        writeln!(pretty, "  {}", row.join("   "))?;
    }
    let checks = trace_checks(&ring)?;
    writeln!(
        pretty,
        "trace equals orbit sum: {}",
        checks.orbit_sum_agrees
    )?;
    writeln!(
        pretty,
        "trace additive on {} spot pairs: {}",
        checks.additive_pairs_checked, checks.additive
    )?;
    writeln!(pretty, "character sums Γ(r) = Σ_{{x ∈ T}} λ(rx):")?;
    for g in &gamma {
        writeln!(pretty, "  |Γ({})|² = {}", g.name, g.norm_sq)?;
    }
    let labels = ["r = 0", "r ∈ 2T, r ≠ 0", "r ∉ 2T"];
    let gamma_classes: Vec<GammaClass> = (0..3)
        .map(|c| GammaClass {
            class: labels[c],
            elements: classes[c].0,
            expected_norm_sq: expected[c],
            holds: classes[c].1,
        })
        .collect();
    writeln!(pretty, "classification:")?;
    for c in &gamma_classes {
        writeln!(
            pretty,
            "  {}: |Γ(r)|² = {} on {} elements ({})",
            c.class,
            c.expected_norm_sq,
            c.elements,
            if c.holds { "holds" } else { "FAILS" }
        )?;
    }
    let ok = checks.orbit_sum_agrees && checks.additive && gamma_classes.iter().all(|c| c.holds);
    let out = TablesOutput {
        s: field.s(),
        q: field.q(),
        poly: field.poly_coeffs(),
        h: ring.h().to_vec(),
        trace,
        trace_checks: checks,
        gamma,
        gamma_classes,
    };
    emit(cfg, &out, pretty)?;
    Ok(Outcome::from_bool(ok))
}
