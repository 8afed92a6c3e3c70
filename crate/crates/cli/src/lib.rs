//! Commands behind the `knotforge` binary. Each returns a JSON report
//! whose `pass` field decides the exit code.

pub mod svg;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use knotforge::applications::{
    assign_unlink_signs, parse_signed_graph, reduce_graph_to_points, robot_writhe_parity,
    to_signed_graph, writhe, Shading,
};
use knotforge::codes::{
    euler_identity_check, parse_gauss, parse_pd, serialize_pd, DiagramJson, GaussCode,
    PlanarDiagram,
};
use knotforge::detour::{detect_loop_tangle, unknot_by_detours};
use knotforge::generate::random_knot;
use knotforge::moves::{is_simplification, replay, MoveTrace};
use knotforge::robot::{is_ascending, is_descending, run_robot_at_base, run_robot_gauss};
use knotforge::simplify::{discharge, simplify_ascending_report};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Pd,
    Gauss,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Via {
    Detours,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TraceMode {
    /// Replay only.
    Any,
    /// Replay and require crossings never to increase.
    Simplify,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, pass: bool) -> Self {
        Check { name: name.to_string(), pass, detail: None }
    }

    pub fn with_detail(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass, detail: Some(detail.into()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputSummary {
    #[serde(rename = "C")]
    pub crossings: usize,
    #[serde(rename = "E")]
    pub edges: usize,
    pub components: usize,
}

impl InputSummary {
    pub fn of(d: &PlanarDiagram) -> Self {
        InputSummary { crossings: d.crossing_count(), edges: d.edge_count(), components: d.component_count() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSummary>,
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl PipelineReport {
    pub fn new(command: &str, input: Option<InputSummary>, result: Value, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        PipelineReport { command: command.to_string(), input, result, artifacts: Vec::new(), checks, pass }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// A parsed input: a diagram, or a bare Gauss code.
pub enum Input {
    Diagram(PlanarDiagram),
    Code(GaussCode),
}

fn sniff(text: &str) -> Format {
    let t = text.trim_start();
    if t.starts_with('{') {
        Format::Json
    } else if !t.is_empty()
        && t.split_whitespace().all(|w| {
            let w = w.trim_end_matches(',');
            w.len() > 1 && matches!(&w[..1], "U" | "O" | "u" | "o") && w[1..].chars().all(|c| c.is_ascii_digit())
        })
    {
        Format::Gauss
    } else {
        Format::Pd
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses input text. With a basepoint given as an edge label and a
/// direction, the text is read as PD with that `base` line (JSON input is
/// first written as canonical PD, so its labels are the canonical ones).
pub fn parse_input(text: &str, format: Option<Format>, basepoint: Option<&(u64, String)>) -> Result<Input> {
    let format = format.unwrap_or_else(|| sniff(text));
    let pd_text = match format {
        Format::Gauss => {
            if basepoint.is_some() {
                bail!("a Gauss code is already read from its basepoint");
            }
            return Ok(Input::Code(parse_gauss(text)?));
        }
        Format::Json => {
            let d = DiagramJson::parse(text)?;
            if basepoint.is_none() {
                return Ok(Input::Diagram(d));
            }
            serialize_pd(&d)
        }
        Format::Pd => text.to_string(),
    };
    let body = match basepoint {
        None => pd_text,
        Some((edge, dir)) => {
            if dir != "fwd" && dir != "bwd" {
                bail!("basepoint direction must be fwd or bwd");
            }
            let rest: Vec<&str> = pd_text.lines().filter(|l| l.split_whitespace().next() != Some("base")).collect();
            format!("base {edge} {dir}\n{}\n", rest.join("\n"))
        }
    };
    Ok(Input::Diagram(parse_pd(&body)?))
}

pub fn expect_diagram(input: Input) -> Result<PlanarDiagram> {
    match input {
        Input::Diagram(d) => Ok(d),
        Input::Code(_) => Err(anyhow!("this command needs a diagram; a Gauss code carries no embedding")),
    }
}

/// Edge labels used by a PD text.
fn pd_labels(text: &str) -> BTreeSet<u64> {
    text.lines()
        .filter(|l| l.split_whitespace().next() == Some("X"))
        .flat_map(|l| l.split_whitespace().skip(1).take(4).filter_map(|t| t.parse().ok()).collect::<Vec<u64>>())
        .collect()
}

pub fn cmd_robot(text: &str, format: Option<Format>, basepoint: Option<&(u64, String)>, all_basepoints: bool) -> Result<PipelineReport> {
    let d = match parse_input(text, format, basepoint)? {
        Input::Code(code) => {
            let run = run_robot_gauss(&code);
            let checks = vec![Check::new("output ascending", is_ascending(&run.output_code))];
            let result = json!({
                "input_code": code.to_string(),
                "output_code": run.output_code.to_string(),
                "switched": run.switched,
            });
            return Ok(PipelineReport::new("robot", None, result, checks));
        }
        Input::Diagram(d) => d,
    };
    let summary = InputSummary::of(&d);
    if d.crossing_count() == 0 {
        let result = json!({ "output_pd": serialize_pd(&d), "writhe_before": 0, "writhe_after": 0 });
        return Ok(PipelineReport::new("robot", Some(summary), result, vec![Check::new("output ascending", true)]));
    }
    let base = d.basepoint().ok_or_else(|| anyhow!("the diagram has no basepoint"))?;
    let out = run_robot_at_base(&d)?;
    let w = robot_writhe_parity(&d, base)?;
    let mut checks = vec![
        Check::new("output ascending", is_ascending(&out.forward_view().gauss())),
        Check::new("writhe changes by an even amount", (w.after - w.before) % 2 == 0),
    ];
    let mut result = json!({
        "output_pd": serialize_pd(&out),
        "output_code": out.forward_view().gauss().to_string(),
        "writhe_before": w.before,
        "writhe_after": w.after,
    });
    if all_basepoints {
        let pd_text = match format.unwrap_or_else(|| sniff(text)) {
            Format::Json => serialize_pd(&d),
            _ => text.to_string(),
        };
        let mut rows = Vec::new();
        let mut all_ascending = true;
        for label in pd_labels(&pd_text) {
            for dir in ["fwd", "bwd"] {
                let b = (label, dir.to_string());
                let v = expect_diagram(parse_input(&pd_text, Some(Format::Pd), Some(&b))?)?;
                let r = run_robot_at_base(&v)?;
                let ok = is_ascending(&r.forward_view().gauss());
                all_ascending &= ok;
                rows.push(json!({ "edge": label, "direction": dir, "writhe_after": writhe(&r), "ascending": ok }));
            }
        }
        checks.push(Check::new("every basepoint gives an ascending diagram", all_ascending));
        result["basepoints"] = Value::Array(rows);
    }
    Ok(PipelineReport::new("robot", Some(summary), result, checks))
}

fn prepare(d: PlanarDiagram, robot_first: bool) -> Result<(PlanarDiagram, Vec<Check>)> {
    let code = d.forward_view().gauss();
    if is_ascending(&code) || is_descending(&code) {
        return Ok((d, vec![Check::new("input ascending or descending", true)]));
    }
    if !robot_first {
        return Ok((d, vec![Check::with_detail("input ascending or descending", false, "rerun with --robot-first")]));
    }
    Ok((run_robot_at_base(&d)?, vec![Check::new("robot applied first", true)]))
}

fn write_trace(out: Option<&Path>, name: &str, trace: &MoveTrace) -> Result<Option<String>> {
    let Some(dir) = out else { return Ok(None) };
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut s = serde_json::to_string_pretty(&trace.to_json())?;
    s.push('\n');
    fs::write(&path, s)?;
    Ok(Some(path.display().to_string()))
}

pub fn cmd_unknot(d: PlanarDiagram, robot_first: bool, out: Option<&Path>) -> Result<PipelineReport> {
    let summary = InputSummary::of(&d);
    let (d, mut checks) = prepare(d, robot_first)?;
    if !checks[0].pass {
        return Ok(PipelineReport::new("unknot", Some(summary), Value::Null, checks));
    }
    let c = d.crossing_count();
    let (trace, report) = unknot_by_detours(&d)?;
    info!("unknot: {} moves over {} phases", trace.len(), report.phases);
    let end = replay(&trace)?;
    let bound = (7 * c + 1) * c;
    checks.push(Check::new("replays to zero crossings", end.crossing_count() == 0));
    checks.push(Check::with_detail("total within (7C+1)C", trace.len() <= bound, format!("{} <= {bound}", trace.len())));
    checks.push(Check::new("every phase within 5c+m-t+1", report.per_phase.iter().all(|p| p.actual <= p.budget)));
    let budget_table: Vec<Value> = report
        .per_phase
        .iter()
        .map(|p| json!({ "c": p.c, "m": p.m, "t": p.t, "budget": p.budget, "actual": p.actual }))
        .collect();
    let result = json!({ "moves": trace.len(), "bound": bound, "budget_table": budget_table, "report": report });
    let mut r = PipelineReport::new("unknot", Some(summary), result, checks);
    r.artifacts.extend(write_trace(out, "trace.json", &trace)?);
    Ok(r)
}

pub fn cmd_simplify(d: PlanarDiagram, robot_first: bool, out: Option<&Path>) -> Result<PipelineReport> {
    let summary = InputSummary::of(&d);
    let (d, mut checks) = prepare(d, robot_first)?;
    if !checks[0].pass {
        return Ok(PipelineReport::new("simplify", Some(summary), Value::Null, checks));
    }
    let (trace, report) = simplify_ascending_report(&d)?;
    info!("simplify: {} moves over {} phases", trace.len(), report.phases.len());
    let end = replay(&trace)?;
    checks.push(Check::new("replays to zero crossings", end.crossing_count() == 0));
    checks.push(Check::new("crossings never increase", is_simplification(&trace)?));
    let kinds: Vec<String> = trace.records.iter().map(|r| r.kind.to_string()).collect();
    let result = json!({ "moves": trace.len(), "kinds": kinds, "report": report });
    let mut r = PipelineReport::new("simplify", Some(summary), result, checks);
    r.artifacts.extend(write_trace(out, "trace.json", &trace)?);
    Ok(r)
}

/// Face census with its Euler residual. With a loop crossing (a Gauss
/// label), also the loop-tangle counts and, for a minimal disc, the
/// discharge report.
pub fn cmd_census(d: PlanarDiagram, loop_label: Option<u32>) -> Result<PipelineReport> {
    let summary = InputSummary::of(&d);
    let census = d.census();
    let (ok, residual) = euler_identity_check(&census);
    let mut checks = vec![Check::with_detail("sphere Euler identity", ok, format!("residual {residual}"))];
    let mut result = json!({ "census": census, "residual": residual });
    if let Some(label) = loop_label {
        let order = d.crossing_order();
        let u = *order
            .get((label as usize).wrapping_sub(1))
            .ok_or_else(|| anyhow!("no crossing with label {label}"))?;
        let lt = detect_loop_tangle(&d, u)?;
        let disc = lt.census();
        let (ok, residual) = euler_identity_check(&disc);
        checks.push(Check::with_detail("disc Euler identity", ok, format!("residual {residual}")));
        result["loop_tangle"] = json!({ "u": label, "c": lt.c(), "m": lt.m(), "t": lt.t(), "census": disc, "residual": residual });
        match discharge(&d, &lt) {
            Ok(rep) => {
                checks.push(Check::new("total charge is 3", rep.total().0 == 9));
                checks.push(Check::new("a positive structure exists", !rep.positive_structures.is_empty()));
                result["discharge"] = serde_json::to_value(&rep)?;
            }
            Err(e) => result["discharge"] = json!({ "skipped": e.to_string() }),
        }
    }
    Ok(PipelineReport::new("census", Some(summary), result, checks))
}

pub fn cmd_verify_trace(text: &str, mode: TraceMode) -> Result<PipelineReport> {
    let trace = MoveTrace::parse_json(text)?;
    let summary = InputSummary::of(&trace.initial);
    let c = trace.initial.crossing_count();
    let bound = (7 * c + 1) * c;
    let mut checks = Vec::new();
    let mut result = json!({ "moves": trace.len(), "bound": bound });
    match replay(&trace) {
        Ok(end) => {
            checks.push(Check::new("replays", true));
            let simple = is_simplification(&trace)?;
            result["crossings_after"] = json!(end.crossing_count());
            result["is_simplification"] = json!(simple);
            if mode == TraceMode::Simplify {
                checks.push(Check::new("crossings never increase", simple));
            }
            checks.push(Check::with_detail("within (7C+1)C", trace.len() <= bound, format!("{} <= {bound}", trace.len())));
        }
        Err(e) => {
            result["failed_at"] = json!(e.index);
            checks.push(Check::with_detail("replays", false, e.to_string()));
        }
    }
    Ok(PipelineReport::new("verify-trace", Some(summary), result, checks))
}

pub fn cmd_graphify(d: PlanarDiagram, shading: Shading, out: Option<&Path>) -> Result<PipelineReport> {
    let summary = InputSummary::of(&d);
    let g = to_signed_graph(&d, shading)?;
    let text = g.to_string();
    let result = json!({ "vertices": g.vertex_count(), "edges": g.edge_count(), "graph": text });
    let mut r = PipelineReport::new("graphify", Some(summary), result, vec![Check::new("one edge per crossing", g.edge_count() == d.crossing_count())]);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let path = dir.join("graph.txt");
        fs::write(&path, &text)?;
        r.artifacts.push(path.display().to_string());
    }
    Ok(r)
}

pub fn cmd_graph_reduce(text: &str, assign_signs: bool) -> Result<PipelineReport> {
    let mut g = parse_signed_graph(text)?;
    if assign_signs {
        g = assign_unlink_signs(&g)?;
    }
    let red = reduce_graph_to_points(&g)?;
    let mut counts = vec![red.trace.initial.crossing_count()];
    counts.extend(red.trace.records.iter().map(|r| r.crossings_after));
    let checks = vec![
        Check::new("reduces to points", red.result.edge_count() == 0),
        Check::new("one graphical move per Reidemeister move", red.moves.len() == red.trace.len()),
        Check::new("edge counts follow crossing counts", red.edge_counts == counts),
    ];
    let result = json!({ "signed_graph": g.to_string(), "moves": red.moves, "edge_counts": red.edge_counts, "points": red.result.vertex_count() });
    Ok(PipelineReport::new("graph-reduce", None, result, checks))
}

/// One SVG for a diagram, or one per step of a trace.
pub fn cmd_render(diagram: Option<PlanarDiagram>, trace: Option<&str>, out: &Path) -> Result<PipelineReport> {
    fs::create_dir_all(out)?;
    let mut frames = Vec::new();
    let summary;
    match (diagram, trace) {
        (_, Some(t)) => {
            let t = MoveTrace::parse_json(t)?;
            summary = InputSummary::of(&t.initial);
            let mut d = t.initial.clone();
            frames.push(d.clone());
            for (i, r) in t.records.iter().enumerate() {
                let mut r = r.clone();
                knotforge::moves::apply_mut(&mut d, &mut r).with_context(|| format!("record {i}"))?;
                frames.push(d.clone());
            }
        }
        (Some(d), None) => {
            summary = InputSummary::of(&d);
            frames.push(d);
        }
        (None, None) => bail!("render needs an input diagram or --trace"),
    }
    let mut files = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let path: PathBuf = out.join(format!("step_{i:04}.svg"));
        fs::write(&path, svg::render(f)?)?;
        files.push(path.display().to_string());
    }
    let mut r = PipelineReport::new("render", Some(summary), json!({ "frames": files.len() }), vec![Check::new("rendered", true)]);
    r.artifacts = files;
    Ok(r)
}

/// Runs `command` on `n` generated knots: random growth moves from the
/// zero-crossing unknot, 1 to 20 crossings. Pipelines that need an
/// ascending input apply the robot first.
pub fn cmd_fuzz(command: &str, n: usize, seed: u64) -> Result<PipelineReport> {
    let items: Vec<Result<Value>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d = random_knot(1 + i % 20, seed.wrapping_add(i as u64));
            let r = match command {
                "robot" => cmd_robot(&serialize_pd(&d), Some(Format::Pd), None, false)?,
                "unknot" => cmd_unknot(d, true, None)?,
                "simplify" => cmd_simplify(d, true, None)?,
                "census" => cmd_census(d, None)?,
                other => bail!("--fuzz does not support `{other}`"),
            };
            Ok(json!({ "id": i, "input": r.input, "pass": r.pass, "moves": r.result.get("moves") }))
        })
        .collect();
    let items: Vec<Value> = items.into_iter().collect::<Result<_>>()?;
    let failures = items.iter().filter(|v| v["pass"] != json!(true)).count();
    let checks = vec![Check::with_detail("every fuzzed input passes", failures == 0, format!("{failures} failures"))];
    let result = json!({ "n": n, "seed": seed, "items": items });
    Ok(PipelineReport::new(command, None, result, checks))
}
