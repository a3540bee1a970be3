use crate::fail::{Failure, Outcome, CHECKPOINT, PRECONDITION};
use crate::input::{self, Loaded};
use crate::manifest::{cap_entries, RunManifest};
use crate::{CapArgs, Common, ConeChoice, Variant};
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::Path;
use sympconfig::arith::{self, Rational};
use sympconfig::bounds::{self, CapError, CapVector};
use sympconfig::configspec::{self, compute_aut, ConeSpec, ConeVariant, ConfigSpec, Perm, DEFAULT_AUT_CAP};
use sympconfig::cremona::{self, CremonaError};
use sympconfig::eliminate::{self, DecideOptions, SearchError, SearchStrategy};
use sympconfig::enumerate::{enumerate_with, Assignment, EnumError, EnumOptions, SearchSpec};
use sympconfig::nearness::{self, AssumptionMode};
use sympconfig::scenarios;

fn rationals(s: &str, what: &str) -> Outcome<Vec<Rational>> {
    arith::parse_rational_list(s).map_err(|e| Failure::usage(format!("{what}: cannot parse `{}`", e.0)))
}

fn decide_options(c: &Common) -> DecideOptions {
    let mut o = DecideOptions::default();
    if let Some(cap) = c.basis_cap {
        o.basis_cap = cap;
    }
    o
}

fn aut_of(spec: &ConfigSpec) -> Vec<Perm> {
    compute_aut(spec, DEFAULT_AUT_CAP).elements_or_identity()
}

fn vector_strings(a: &Assignment) -> Vec<String> {
    a.vectors.iter().map(|v| v.to_string()).collect()
}

/// Standard output write that treats a closed pipe (`| head`) as success.
fn to_stdout(text: &str) -> Outcome<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Writes `{manifest, report}` to `<out>/<name>.json` (plus the manifest),
/// or to standard output.
fn emit<T: Serialize>(c: &Common, manifest: &mut RunManifest, name: &str, report: &T) -> Outcome<()> {
    let doc = json!({ "manifest": manifest.hash, "report": report });
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    match &c.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{name}.json"));
            std::fs::write(&path, text)?;
            manifest.finish(dir)?;
            eprintln!("wrote {}", path.display());
        }
        None => to_stdout(&text)?,
    }
    Ok(())
}

fn flags_of(pairs: &[(&str, serde_json::Value)]) -> serde_json::Value {
    serde_json::Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

struct Caps {
    caps: CapVector,
    at_most_one_negative_a: bool,
}

/// Absolute degree caps, tightened by the per-component caps when (*) is
/// asserted and its cone has interior, then the user overrides.
fn resolve_caps(spec: &ConfigSpec, args: &CapArgs) -> Outcome<Caps> {
    let variant = match args.variant {
        Variant::I0 => ConeVariant::I0,
        Variant::I1 => ConeVariant::I1,
    };
    let mut component = None;
    let mut one_neg = false;
    if spec.star.as_ref().is_some_and(|s| s.asserted) {
        let star = configspec::star_data(spec).map_err(|e| Failure::config(e.to_string()))?;
        one_neg = bounds::single_negative_degree_applies(spec, Some(&star), &variant);
        match bounds::component_caps(spec, &star, &variant, one_neg) {
            Ok(cv) => component = Some(cv),
            Err(CapError::EmptyInterior) => {
                eprintln!("note: C* ∩ C_δ has empty interior; using the absolute degree caps only")
            }
            Err(e) => return Err(Failure::config(e.to_string())),
        }
    }
    let overrides = args.caps_override.as_deref().map(|s| rationals(s, "--caps-override")).transpose()?;
    let caps = bounds::dispatch_caps(spec, component.as_ref(), overrides.as_deref(), args.unsafe_caps).map_err(|e| match e {
        CapError::OverrideLength(..) | CapError::OverrideLoosens(_) => Failure::usage(e.to_string()),
        CapError::NoCap(_) => Failure::precondition(e.to_string()),
        other => Failure::config(other.to_string()),
    })?;
    Ok(Caps { caps, at_most_one_negative_a: one_neg })
}

/// Flags that can change results. --resume and --workers cannot, so they
/// stay out of the manifest hash.
fn cap_flags(args: &CapArgs) -> Vec<(&'static str, serde_json::Value)> {
    vec![
        ("caps_override", json!(args.caps_override)),
        ("unsafe", json!(args.unsafe_caps)),
        ("variant", json!(format!("{:?}", args.variant))),
    ]
}

/// Runs the enumeration and writes `assignments.jsonl` (or JSONL to
/// standard output). Records are sorted canonically.
fn run_enumeration(
    c: &Common,
    l: &Loaded,
    caps: &Caps,
    resume: bool,
    manifest: &RunManifest,
    print: bool,
) -> Outcome<Vec<Assignment>> {
    if resume && c.out.is_none() {
        return Err(Failure::usage("--resume needs --out (the checkpoint lives there)"));
    }
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
    }
    let mut search = SearchSpec::new(caps.caps.clone());
    search.at_most_one_negative_a = caps.at_most_one_negative_a;
    let opts = EnumOptions {
        workers: c.workers,
        checkpoint_path: c.out.as_ref().map(|d| d.join("checkpoint.json")),
        resume,
        progress: true,
    };
    eprintln!("enumerating with caps {:?}", caps.caps.integer_caps());
    let result = enumerate_with(&l.spec, &search, &opts).map_err(|e| match e {
        EnumError::CheckpointMismatch { .. } | EnumError::CheckpointRead(_) => Failure::new(CHECKPOINT, e),
        EnumError::CapTooLarge(_) | EnumError::CapsLength(..) => Failure::precondition(e),
        other => Failure::config(other),
    })?;
    for err in &result.stats.checkpoint_errors {
        eprintln!("warning: checkpoint: {err}");
    }
    let mut list = result.assignments;
    list.sort();
    let mut text = String::new();
    for (i, a) in list.iter().enumerate() {
        let rec = json!({ "manifest": manifest.hash, "index": i, "vectors": vector_strings(a) });
        text.push_str(&rec.to_string());
        text.push('\n');
    }
    match &c.out {
        Some(dir) => std::fs::write(dir.join("assignments.jsonl"), &text)?,
        None if print => to_stdout(&text)?,
        None => {}
    }
    eprintln!("{} canonical assignments ({} leaves)", list.len(), result.stats.leaves);
    Ok(list)
}

pub fn enumerate(c: &Common, args: &CapArgs, resume: bool) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let caps = resolve_caps(&l.spec, args)?;
    let mut manifest = RunManifest::new("enumerate", &l.source, &l.bytes, cap_entries(&caps.caps), flags_of(&cap_flags(args)));
    run_enumeration(c, &l, &caps, resume, &manifest, true)?;
    if let Some(dir) = &c.out {
        manifest.finish(dir)?;
        eprintln!("wrote {}", dir.join("assignments.jsonl").display());
    }
    Ok(())
}

fn check_delta(spec: &ConfigSpec, delta: &[Rational]) -> Outcome<()> {
    if delta.len() != spec.n() {
        return Err(Failure::usage(format!("--delta has {} entries, the configuration has {} components", delta.len(), spec.n())));
    }
    let cone = configspec::c_delta(spec).map_err(|e| Failure::config(e.to_string()))?;
    if !cone.contains_strictly(delta) {
        return Err(Failure::precondition("δ is not in the interior of C_δ"));
    }
    Ok(())
}

pub fn eliminate_delta(c: &Common, delta: &str) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let a = l.require_assignment()?;
    a.check(&l.spec).map_err(|e| Failure::config(e.to_string()))?;
    let delta = rationals(delta, "--delta")?;
    check_delta(&l.spec, &delta)?;
    let aut = aut_of(&l.spec);
    eprintln!("testing δ against {} relabelings", aut.len());
    let t = eliminate::test_delta(a, l.spec.ambient_n, &delta, &aut, &decide_options(c))
        .map_err(|e| Failure::config(e.to_string()))?;
    eprintln!(
        "{}: {} eliminated, {} realizable, {} undecided",
        if t.orbit_eliminated { "Eliminated" } else { "not eliminated" },
        t.eliminated,
        t.realizable,
        t.undecided
    );
    let flags = flags_of(&[("delta", json!(delta.iter().map(arith::format_rational).collect::<Vec<_>>()))]);
    let mut manifest = RunManifest::new("eliminate", &l.source, &l.bytes, Vec::new(), flags);
    let summary = if t.orbit_eliminated { "Eliminated" } else if t.realizable > 0 { "Realizable" } else { "Undecided" };
    emit(c, &mut manifest, "eliminate", &json!({ "result": summary, "test": t }))
}

fn pick_cone(spec: &ConfigSpec, choice: Option<ConeChoice>) -> Outcome<(ConeSpec, &'static str)> {
    let asserted = spec.star.as_ref().is_some_and(|s| s.asserted);
    let choice = choice.unwrap_or(if asserted { ConeChoice::Star } else { ConeChoice::Delta });
    let cone = match choice {
        ConeChoice::Delta => (configspec::c_delta(spec).map_err(|e| Failure::config(e.to_string()))?, "C_δ"),
        ConeChoice::Star => {
            let star = configspec::star_data(spec).map_err(|e| Failure::config(e.to_string()))?;
            let cones =
                configspec::build_cones(spec, &star, &ConeVariant::I0).map_err(|e| Failure::config(e.to_string()))?;
            (cones.combined(), "C* ∩ C_δ")
        }
    };
    if cone.0.interior_point().is_none() {
        return Err(Failure::precondition(format!(
            "{} has empty interior; try --cone delta",
            cone.1
        )));
    }
    Ok(cone)
}

fn search(
    c: &Common,
    spec: &ConfigSpec,
    list: &[Assignment],
    choice: Option<ConeChoice>,
    seed: u64,
) -> Outcome<(eliminate::DeltaSearchReport, &'static str)> {
    let (cone, label) = pick_cone(spec, choice)?;
    let strategy = SearchStrategy { seed, decide: decide_options(c), ..SearchStrategy::default() };
    eprintln!("searching {label} for an eliminating δ over {} assignments", list.len());
    let report = eliminate::search_eliminating_delta(list, spec.ambient_n, &aut_of(spec), &cone, &strategy)
        .map_err(|e| match e {
            SearchError::EmptyInterior => Failure::precondition(e),
            other => Failure::config(other),
        })?;
    eprintln!("best δ ({}) leaves {} survivors", report.source, report.survivors.len());
    Ok((report, label))
}

pub fn eliminate_search(c: &Common, cone: Option<ConeChoice>, assignments: Option<&Path>, seed: u64) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let list = match assignments {
        Some(p) => input::read_assignments(p, l.spec.ambient_n)?,
        None => vec![l.require_assignment()?.clone()],
    };
    for a in &list {
        a.check(&l.spec).map_err(|e| Failure::config(e.to_string()))?;
    }
    let (report, label) = search(c, &l.spec, &list, cone, seed)?;
    let mut bytes = l.bytes.clone();
    for a in &list {
        bytes.extend(vector_strings(a).join(",").bytes());
        bytes.push(b'\n');
    }
    let flags = flags_of(&[("search", json!(true)), ("cone", json!(label)), ("seed", json!(seed))]);
    let mut manifest = RunManifest::new("eliminate", &l.source, &bytes, Vec::new(), flags);
    emit(c, &mut manifest, "eliminate", &json!({ "cone": label, "search": report }))
}

pub fn robust(c: &Common, certificate: Option<&str>) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let a = l.require_assignment()?;
    let cert = certificate.map(|s| rationals(s, "--certificate")).transpose()?;
    let r = eliminate::robustness(a, l.spec.ambient_n, cert.as_deref(), &decide_options(c))
        .map_err(|e| Failure::config(e.to_string()))?;
    let flags = flags_of(&[("certificate", json!(certificate))]);
    let mut manifest = RunManifest::new("robust", &l.source, &l.bytes, Vec::new(), flags);
    emit(c, &mut manifest, "robust", &r)
}

fn parse_gamma(s: &str) -> Outcome<(usize, usize, usize)> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("--gamma: expected r,s,t, got `{s}`")))?;
    match parts[..] {
        [r, s, t] => Ok((r, s, t)),
        _ => Err(Failure::usage(format!("--gamma: expected three indices, got {}", parts.len()))),
    }
}

pub fn cremona(c: &Common, gamma: &str, extend: usize, unsafe_reflect: bool) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let a = l.require_assignment()?;
    let (r, s, t) = parse_gamma(gamma)?;
    let (a, spec, note) = cremona::extend_ambient(a, &l.spec, extend);
    if !note.is_empty() {
        eprintln!("note: {note}");
    }
    let rep = cremona::apply_cremona(&a, &spec, r, s, t, unsafe_reflect).map_err(|e| match e {
        CremonaError::Index(_) => Failure::usage(e),
        CremonaError::Assignment(_) => Failure::config(e),
        other => Failure::new(PRECONDITION, other),
    })?;
    eprintln!("{:?}; reflected: {}", rep.case, vector_strings(&rep.reflected).join(", "));
    let flags = flags_of(&[("gamma", json!([r, s, t])), ("extend", json!(extend)), ("unsafe", json!(unsafe_reflect))]);
    let mut manifest = RunManifest::new("cremona", &l.source, &l.bytes, Vec::new(), flags);
    let doc = json!({
        "case": rep.case,
        "assumptions": rep.assumptions,
        "extension_note": note,
        "reflected": vector_strings(&rep.reflected),
        "output": vector_strings(&rep.output),
        "relabeling": rep.relabeling.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "admissibility": rep.admissibility,
        "output_blowdown": rep.output_blowdown,
        "output_type": rep.output_type,
        "virtual_expression": rep.virtual_expression,
    });
    emit(c, &mut manifest, "cremona", &doc)
}

pub fn type_report(c: &Common, primed: bool) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let a = l.require_assignment()?;
    let n = l.spec.ambient_n;
    let pre = |e: nearness::NearnessError| Failure::precondition(e);
    let t = nearness::build_combinatorial_type(a, n).map_err(pre)?;
    let plain = nearness::check_blowdown_assumptions(a, n, AssumptionMode::Plain).map_err(pre)?;
    let primed = if primed { Some(nearness::check_blowdown_assumptions(a, n, AssumptionMode::Primed).map_err(pre)?) } else { None };
    let flags = flags_of(&[("primed", json!(primed.is_some()))]);
    let mut manifest = RunManifest::new("type", &l.source, &l.bytes, Vec::new(), flags);
    emit(c, &mut manifest, "type", &json!({ "type": t, "blowdown": plain, "blowdown_primed": primed }))
}

pub fn scenario(c: &Common, name: &str, check: bool) -> Outcome<()> {
    let s = scenarios::builtin_scenario(name).map_err(|e| Failure::usage(e.to_string()))?;
    if !check {
        let doc = json!({
            "name": s.name,
            "description": s.description,
            "config": s.spec.to_json_value(),
            "vectors": s.assignment.as_ref().map(vector_strings),
        });
        return to_stdout(&(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"));
    }
    let lines = scenarios::check_scenario(&s);
    let mut failed = 0;
    for l in &lines {
        to_stdout(&format!("{:<4} {:<22} {}\n", if l.ok { "ok" } else { "FAIL" }, l.check, l.detail))?;
        failed += usize::from(!l.ok);
    }
    if let Some(dir) = &c.out {
        let l = input::load_scenario(name)?;
        let mut manifest = RunManifest::new("scenario", &l.source, &l.bytes, Vec::new(), json!({ "check": true }));
        std::fs::create_dir_all(dir)?;
        let doc = json!({ "manifest": manifest.hash, "report": lines });
        std::fs::write(dir.join("scenario.json"), serde_json::to_string_pretty(&doc).expect("serializable") + "\n")?;
        manifest.finish(dir)?;
    }
    if failed > 0 {
        return Err(Failure::precondition(format!("{failed} of {} checks failed", lines.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct SurvivorEntry {
    index: usize,
    vectors: Vec<String>,
    eliminated_relabelings: usize,
    realizable_relabelings: usize,
    blowdown: serde_json::Value,
    #[serde(rename = "type")]
    ctype: serde_json::Value,
}

pub fn pipeline(
    c: &Common,
    args: &CapArgs,
    resume: bool,
    delta: Option<&str>,
    cone: Option<ConeChoice>,
    seed: u64,
) -> Outcome<()> {
    let l = input::load(c.config.as_ref(), c.scenario.as_deref())?;
    let caps = resolve_caps(&l.spec, args)?;
    let mut flags = cap_flags(args);
    flags.push(("delta", json!(delta)));
    flags.push(("cone", json!(cone.map(|c| format!("{c:?}")))));
    flags.push(("seed", json!(seed)));
    let mut manifest = RunManifest::new("pipeline", &l.source, &l.bytes, cap_entries(&caps.caps), flags_of(&flags));
    let list = run_enumeration(c, &l, &caps, resume, &manifest, false)?;
    let n = l.spec.ambient_n;
    let opts = decide_options(c);
    let aut = aut_of(&l.spec);
    let (delta, source, survivors) = match delta {
        Some(d) => {
            let d = rationals(d, "--delta")?;
            check_delta(&l.spec, &d)?;
            let mut surv = Vec::new();
            for (i, a) in list.iter().enumerate() {
                let t = eliminate::test_delta(a, n, &d, &aut, &opts).map_err(|e| Failure::config(e.to_string()))?;
                if !t.orbit_eliminated {
                    surv.push((i, t));
                }
            }
            (d, "given".to_string(), surv)
        }
        None if list.is_empty() => (Vec::new(), "nothing to eliminate".to_string(), Vec::new()),
        None => {
            let (report, _) = search(c, &l.spec, &list, cone, seed)?;
            let surv = report.survivors.into_iter().map(|s| (s.index, s.test)).collect();
            (report.delta, report.source, surv)
        }
    };
    let mut entries = Vec::new();
    for (i, t) in survivors {
        let a = &list[i];
        let blowdown = match nearness::check_blowdown_assumptions(a, n, AssumptionMode::Plain) {
            Ok(r) => json!({ "passed": r.passed, "report": r }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        let ctype = match nearness::build_combinatorial_type(a, n) {
            Ok(t) => serde_json::to_value(t).expect("serializable"),
            Err(e) => json!({ "error": e.to_string() }),
        };
        entries.push(SurvivorEntry {
            index: i,
            vectors: vector_strings(a),
            eliminated_relabelings: t.eliminated,
            realizable_relabelings: t.realizable,
            blowdown,
            ctype,
        });
    }
    eprintln!("{} of {} assignments survive", entries.len(), list.len());
    let doc = json!({
        "assignments": list.len(),
        "delta": delta.iter().map(arith::format_rational).collect::<Vec<_>>(),
        "delta_source": source,
        "eliminated": list.len() - entries.len(),
        "survivors": entries,
    });
    emit(c, &mut manifest, "pipeline", &doc)
}
