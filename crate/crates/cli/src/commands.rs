use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use nn_adversary::optimum::ratio_row;
use nn_adversary::report::{round_significant, to_csv, ReportRow};
use nn_adversary::svg::render_svg;
use nn_adversary::{
    build_adversarial_tour, certify_tour, export_instance, generate_gk, import_instance, parse_tour, perimeter_tour,
    perturb, run_nnr, start_sweep, validate_nnr, CertificationReport, Instance, MetricKind, PerturbScheme, RatioRow,
    TieBreakPolicy, TourPath, Verdict,
};

use crate::{
    CertifyArgs, DrawArgs, GenerateArgs, InstanceFormat, PolicyName, ReportFormat, StartChoice, SweepArgs,
    TableFormat, ValidateArgs,
};

const BOUND_NOTE: &str = "lower_bound is (log2 n - 1)/4, the value the ratio chain reaches; \
statement_bound is the weaker log2(n)/4 - 1 and is always smaller";

fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn default_scale(n: usize) -> i64 {
    (256 * n as u64).max(1).next_power_of_two() as i64
}

#[derive(Serialize)]
struct InstanceJson<'a> {
    name: &'a str,
    k: Option<u32>,
    metric: String,
    scale: i64,
    n: usize,
    landmarks: Landmarks,
    cities: Vec<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
}

#[derive(Serialize)]
struct Landmarks {
    l: usize,
    m: usize,
}

fn instance_json(instance: &Instance) -> Result<String> {
    let edges = match instance.metric() {
        nn_adversary::MetricSpec::Graphic(g) => Some(g.graph().edges().map(|(a, b)| [a, b]).collect()),
        nn_adversary::MetricSpec::Lp(_) => None,
    };
    let doc = InstanceJson {
        name: instance.name(),
        k: instance.family_k(),
        metric: instance.metric_kind().to_string(),
        scale: instance.scale(),
        n: instance.len(),
        landmarks: Landmarks {
            l: instance.landmark_l(),
            m: instance.landmark_m(),
        },
        cities: instance.cities().iter().map(|p| [p.x, p.y]).collect(),
        edges,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn generate(args: GenerateArgs) -> Result<bool> {
    let mut instance = generate_gk(args.k, args.metric)?;
    if args.perturb != PerturbScheme::None || args.scale.is_some() {
        let scale = args.scale.unwrap_or_else(|| default_scale(instance.len()));
        instance = perturb(&instance, args.perturb, scale, args.seed)?;
    }
    let text = match args.format {
        InstanceFormat::Tsplib => export_instance(&instance)?,
        InstanceFormat::Json => instance_json(&instance)?,
    };
    emit(args.output.as_deref(), &text)?;
    eprintln!(
        "n={} l={} m={} scale={}",
        instance.len(),
        instance.landmark_l(),
        instance.landmark_m(),
        instance.scale()
    );
    Ok(true)
}

fn certify_one(k: u32, metric: MetricKind, swap: Option<(usize, usize)>) -> Result<RatioRow> {
    let instance = generate_gk(k, metric)?;
    let record = build_adversarial_tour(k)?;
    let mut tour = record.tour;
    if let Some((i, j)) = swap {
        if i >= tour.len() || j >= tour.len() {
            bail!("swap positions {i},{j} out of range for a tour of {} cities", tour.len());
        }
        tour = tour.swapped(i, j);
    }
    let report = certify_tour(&instance, &tour, record.predicted_length)?;
    Ok(ratio_row(&instance, &tour, report)?)
}

fn failure_detail(report: &CertificationReport) -> String {
    let mut parts = Vec::new();
    for (letter, check) in [
        ('a', &report.permutation),
        ('b', &report.endpoints),
        ('c', &report.length),
    ] {
        if !check.passed {
            parts.push(format!("{letter}: {}", check.detail));
        }
    }
    if let Some(f) = &report.nnr.failure {
        parts.push(format!("d: {}", describe_failure(f)));
    }
    parts.join("; ")
}

fn describe_failure(f: &nn_adversary::nnr::StepFailure) -> String {
    format!(
        "step {} from city {} goes to {} at distance {} but the minimum is {} (attained by {:?})",
        f.step,
        f.from,
        f.chosen,
        round_significant(f.chosen_distance),
        round_significant(f.min_distance),
        f.tie_set
    )
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn text_row(row: &RatioRow) -> String {
    let c = &row.certification;
    let ratio = row
        .ratio_open_exact
        .map(|r| r.to_string())
        .unwrap_or_else(|| round_significant(row.ratio_open).to_string());
    let chain = row.bounds.chain.map(|r| r.to_string()).unwrap_or_default();
    let mut line = format!(
        "k={} metric={} n={} a={} b={} c={} d={} length={} opt={} ratio_open={} ratio_closed={} chain={} lower_bound={} upper_bound={}",
        row.k.map(|k| k.to_string()).unwrap_or_default(),
        row.metric,
        row.n,
        verdict_word(c.permutation.passed),
        verdict_word(c.endpoints.passed),
        verdict_word(c.length.passed),
        verdict_word(c.nnr.valid),
        nn_adversary::report::format_length(&row.nnr_open_length),
        nn_adversary::report::format_length(&row.opt_length),
        ratio,
        round_significant(row.ratio_closed),
        chain,
        round_significant(row.bounds.lower_bound),
        row.bounds.upper_bound,
    );
    if c.passed() {
        line.push_str(" PASS");
    } else {
        line.push_str(&format!(" FAIL [{}]", failure_detail(c)));
    }
    line
}

fn json_row(row: &RatioRow) -> serde_json::Value {
    let c = &row.certification;
    json!({
        "k": row.k,
        "metric": row.metric.to_string(),
        "n": row.n,
        "passed": c.passed(),
        "failed_checks": c.failed_checks(),
        "checks": {
            "a": c.permutation,
            "b": c.endpoints,
            "c": c.length,
            "d": c.nnr,
        },
        "predicted_length": c.predicted_length,
        "open_length": round_significant(row.nnr_open_length.approx),
        "closed_length": round_significant(row.nnr_closed_length.approx),
        "opt": round_significant(row.opt_length.approx),
        "ratio_open": round_significant(row.ratio_open),
        "ratio_open_exact": row.ratio_open_exact.map(|r| r.to_string()),
        "ratio_closed": round_significant(row.ratio_closed),
        "chain": row.bounds.chain.map(|r| r.to_string()),
        "chain_holds": row.chain_holds(),
        "lower_bound": round_significant(row.bounds.lower_bound),
        "statement_bound": round_significant(row.bounds.statement_bound),
        "upper_bound": row.bounds.upper_bound,
    })
}

pub fn certify(args: CertifyArgs) -> Result<bool> {
    let cells: Vec<(u32, MetricKind)> = (args.k.first..=args.k.last)
        .flat_map(|k| args.metrics.iter().map(move |&m| (k, m)))
        .collect();
    let rows: Vec<RatioRow> = cells
        .par_iter()
        .map(|&(k, m)| certify_one(k, m, args.inject_swap).with_context(|| format!("k = {k}, metric {m}")))
        .collect::<Result<_>>()?;
    let passed = rows.iter().filter(|r| r.certification.passed()).count();
    let all = passed == rows.len();

    let text = match args.format {
        ReportFormat::Text => {
            let mut out = String::new();
            for row in &rows {
                out.push_str(&text_row(row));
                out.push('\n');
            }
            out.push_str(&format!("{passed} of {} rows passed\n", rows.len()));
            out
        }
        ReportFormat::Csv => to_csv(&rows.iter().map(ReportRow::from_ratio).collect::<Vec<_>>()),
        ReportFormat::Json => {
            let doc = json!({
                "all_passed": all,
                "bound_note": BOUND_NOTE,
                "rows": rows.iter().map(json_row).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(args.output.as_deref(), &text)?;
    if !all && args.format != ReportFormat::Text {
        for row in rows.iter().filter(|r| !r.certification.passed()) {
            eprintln!(
                "k={} metric={}: {}",
                row.k.unwrap_or_default(),
                row.metric,
                failure_detail(&row.certification)
            );
        }
    }
    Ok(all)
}

fn policy(name: PolicyName, k: u32) -> Result<TieBreakPolicy> {
    Ok(match name {
        PolicyName::Lexicographic => TieBreakPolicy::Lexicographic,
        PolicyName::Index => TieBreakPolicy::IndexOrder,
        PolicyName::Adversarial => TieBreakPolicy::Adversarial(build_adversarial_tour(k)?.tour),
    })
}

pub fn sweep(args: SweepArgs) -> Result<bool> {
    let instance = generate_gk(args.k, args.metric)?;
    let policies: Vec<TieBreakPolicy> = args
        .policy
        .iter()
        .map(|&p| policy(p, args.k))
        .collect::<Result<_>>()?;
    let starts = match args.start {
        StartChoice::All => None,
        StartChoice::City(c) if c < instance.len() => Some(vec![c]),
        StartChoice::City(c) => bail!("start city {c} out of range for n = {}", instance.len()),
    };
    let rows: Vec<ReportRow> = start_sweep(&instance, &policies, starts.as_deref())?
        .iter()
        .map(|row| ReportRow::from_sweep(&instance, row))
        .collect();
    let text = match args.format {
        TableFormat::Csv => to_csv(&rows),
        TableFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(args.output.as_deref(), &text)?;
    Ok(true)
}

/// Resolves a tour argument: a named construction or a tour file.
fn resolve_tour(instance: &Instance, spec: &str, start: usize) -> Result<Option<TourPath>> {
    Ok(match spec {
        "none" => None,
        "adversarial" => {
            let k = instance
                .family_k()
                .context("the adversarial tour needs a G_k instance")?;
            Some(build_adversarial_tour(k)?.tour)
        }
        "perimeter" => Some(perimeter_tour(instance)?.0),
        "nnr" => {
            if start >= instance.len() {
                bail!("start city {start} out of range for n = {}", instance.len());
            }
            Some(run_nnr(instance, start, &TieBreakPolicy::Lexicographic)?.0)
        }
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading tour file {path}"))?;
            Some(parse_tour(&text).with_context(|| format!("parsing tour file {path}"))?)
        }
    })
}

pub fn draw(args: DrawArgs) -> Result<bool> {
    let instance = generate_gk(args.k, args.metric)?;
    let tour = resolve_tour(&instance, &args.tour, args.start)?;
    let svg = render_svg(&instance, tour.as_ref())?;
    emit(args.output.as_deref(), &svg)?;
    Ok(true)
}

fn load_instance(path: Option<&PathBuf>, k: Option<u32>, metric: MetricKind) -> Result<Instance> {
    match (path, k) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(import_instance(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
        (None, Some(k)) => Ok(generate_gk(k, metric)?),
        (None, None) => bail!("give --instance or --k"),
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mode = match v.mode {
        nn_adversary::ValidationMode::Weak => "weak",
        nn_adversary::ValidationMode::Strict => "strict",
    };
    let mut out = format!(
        "mode={mode} valid={} steps_checked={} tied_steps={}\n",
        v.valid,
        v.steps_checked,
        v.ties.len()
    );
    if let Some(f) = &v.failure {
        out.push_str(&format!("failure: {}\n", describe_failure(f)));
    }
    out
}

pub fn validate(args: ValidateArgs) -> Result<bool> {
    let instance = load_instance(args.instance.as_ref(), args.k, args.metric)?;
    let tour = resolve_tour(&instance, &args.tour, args.start)?.context("validation needs a tour")?;
    let verdict = validate_nnr(&instance, &tour, args.mode)?;
    let text = if args.json {
        serde_json::to_string_pretty(&verdict)? + "\n"
    } else {
        verdict_text(&verdict)
    };
    emit(None, &text)?;
    Ok(verdict.valid)
}
