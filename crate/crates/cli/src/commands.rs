use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use proxlaw::experiment::{
    analyze_pair, replay_table as replay, run_experiment_with_clock, Criterion, ExperimentConfig,
    ExperimentReport, Inference, LayerPair, CANONICAL_TABLE,
};
use proxlaw::extract::{
    assemble_graph, build_cochange_layer, build_structural_coupling, cochange_modules, merge_layer,
    parse_git_log, scan_imports, source_modules, ImportPatternSet, ModuleMap,
};
use proxlaw::graph::{generate_random_control, parse_graph, validate as validate_graph};
use proxlaw::prereg::{self, HypothesisDoc};
use proxlaw::stats::{binom_tail, CountingRule};
use proxlaw::transfer::{compare_graphs, render_table, Alignment};
use proxlaw::{Layer, MultilayerGraph};
use serde::Serialize;
use serde_json::json;

use crate::{
    domain, CriterionArg, Ctx, ExperimentArgs, ExtractCommand, ExtractCommon, Failure, HubsArgs,
    PersistArgs, PreregCommand, RolesArgs, RuleArg, ValidateArgs, ValidateKind,
};

impl From<RuleArg> for CountingRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::StrictGreater => CountingRule::StrictGreater,
            RuleArg::GreaterOrEqual => CountingRule::GreaterOrEqual,
        }
    }
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::LegacyDirectional => Criterion::LegacyDirectional,
            CriterionArg::ThresholdedV2 => Criterion::ThresholdedV2,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(ctx: &mut Ctx, path: &Path) -> Result<MultilayerGraph, Failure> {
    let text = ctx.manifest.read(path)?;
    parse_graph(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

pub fn validate(ctx: &mut Ctx, a: &ValidateArgs) -> Result<u8, Failure> {
    let text = ctx.manifest.read(&a.path)?;
    let problems: Vec<String> = match a.kind {
        ValidateKind::Graph => match serde_json::from_str::<MultilayerGraph>(&text) {
            Ok(g) => validate_graph(&g).iter().map(ToString::to_string).collect(),
            Err(e) => vec![format!("Schema: {e}")],
        },
        ValidateKind::Report => match ExperimentReport::from_json(&text) {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        },
    };
    if ctx.json {
        emit(None, &to_json(&json!({ "valid": problems.is_empty(), "violations": problems })))?;
    } else {
        for p in &problems {
            println!("{p}");
        }
    }
    Ok(u8::from(!problems.is_empty()))
}

pub fn hubs(ctx: &mut Ctx, a: &HubsArgs) -> Result<u8, Failure> {
    let g = load_graph(ctx, &a.graph)?;
    let mut vectors = Vec::new();
    for layer in &g.layers {
        let w = a.weights && layer.weighted;
        vectors.push(proxlaw::metrics::degree_vector(&g, &layer.name, w).map_err(domain)?);
    }
    if ctx.json {
        let nodes: Vec<&str> = g.node_ids().collect();
        emit(None, &to_json(&json!({ "nodes": nodes, "layers": vectors })))?;
        return Ok(0);
    }
    let width = g.node_ids().map(str::len).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}", "node");
    for v in &vectors {
        let _ = write!(out, "  {:>10}", v.layer_name);
    }
    out.push('\n');
    for (i, id) in g.node_ids().enumerate() {
        let _ = write!(out, "{id:<width$}");
        for v in &vectors {
            let _ = write!(out, "  {:>10}", v.values[i]);
        }
        out.push('\n');
    }
    emit(None, &out)?;
    Ok(0)
}

pub fn persist(ctx: &mut Ctx, a: &PersistArgs) -> Result<u8, Failure> {
    let g = load_graph(ctx, &a.graph)?;
    let mut config = ExperimentConfig::new(
        g.name.clone(),
        LayerPair::similar(&a.layer_a, &a.layer_b),
        LayerPair::dissimilar(&a.layer_a, &a.layer_b),
    );
    config.n_permutations = a.permutations;
    config.seed = a.seed;
    config.use_weights = a.weights;
    config.counting_rule = a.counting_rule.into();
    let result = analyze_pair(&g, &config.similar, &config).map_err(domain)?;
    if ctx.json {
        emit(None, &to_json(&result))?;
        return Ok(0);
    }
    let rule = serde_json::to_value(config.counting_rule).expect("rule serializes");
    let out = format!(
        "layers: {} vs {}\nn: {}\nr: {:.4}\nrho: {:.4}\np_permutation: {} (permutations={} seed={} rule={})\np_t_fallback: {}\n",
        result.layer_a,
        result.layer_b,
        result.n,
        result.r,
        result.rho,
        fmt_p(result.p_permutation),
        config.n_permutations,
        config.seed,
        rule.as_str().unwrap_or_default(),
        fmt_p(Some(result.p_t_fallback)),
    );
    emit(None, &out)?;
    Ok(0)
}

fn fmt_p(p: Option<f64>) -> String {
    match p {
        None => "-".into(),
        Some(p) if p != 0.0 && p < 1e-3 => format!("{p:.3e}"),
        Some(p) => format!("{p:.4}"),
    }
}

pub fn experiment(ctx: &mut Ctx, a: &ExperimentArgs) -> Result<u8, Failure> {
    let g = load_graph(ctx, &a.graph)?;
    let text = ctx.manifest.read(&a.config)?;
    let mut config = ExperimentConfig::from_json(&text).map_err(domain)?;
    if let Some(n) = a.permutations {
        config.n_permutations = n;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if a.weights {
        config.use_weights = true;
    }
    if let Some(r) = a.counting_rule {
        config.counting_rule = r.into();
    }
    if let Some(c) = a.criterion {
        config.criterion = c.into();
    }
    let report = run_experiment_with_clock(&g, &config, ctx.clock.as_ref()).map_err(domain)?;
    if let Some(out) = &a.out {
        emit(Some(out), &report.to_json())?;
    }
    if ctx.json {
        emit(None, &report.to_json())?;
        return Ok(0);
    }
    let mut s = format!("graph: {}\n", g.name);
    for (label, p) in [("similar", &report.sim), ("dissimilar", &report.dis)] {
        let _ = writeln!(
            s,
            "{label:<10}  {}-{}  r={:+.4}  rho={:+.4}  p_perm={}  p_t={}",
            p.layer_a,
            p.layer_b,
            p.r,
            p.rho,
            fmt_p(p.p_permutation),
            fmt_p(Some(p.p_t_fallback))
        );
    }
    let inference = match config.inference {
        Inference::Permutation => "permutation",
        Inference::TTest => "t",
    };
    let _ = writeln!(s, "delta_r: {:+.4}", report.delta_r);
    let _ = writeln!(s, "verdict_p: {:.4} ({inference})", report.verdict_p);
    let _ = writeln!(s, "verdict: {}", report.verdict);
    emit(None, &s)?;
    Ok(0)
}

fn load_doc(ctx: &mut Ctx, path: &Path) -> Result<HypothesisDoc, Failure> {
    let text = ctx.manifest.read(path)?;
    HypothesisDoc::from_json(&text).map_err(domain)
}

fn ledger_path(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("PROXLAW_LEDGER").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("prereg-ledger.jsonl"))
}

pub fn prereg(ctx: &mut Ctx, c: &PreregCommand) -> Result<u8, Failure> {
    match c {
        PreregCommand::Hash { doc } => {
            let d = load_doc(ctx, doc)?;
            let digest = prereg::digest(&d);
            if ctx.json {
                emit(None, &to_json(&json!({ "experiment_id": d.experiment_id, "digest": digest })))?;
            } else {
                println!("{digest}");
            }
            Ok(0)
        }
        PreregCommand::Register { doc, ledger } => {
            let d = load_doc(ctx, doc)?;
            let path = ledger_path(ledger);
            let record = prereg::register(&d, &path, ctx.clock.as_ref()).map_err(|e| match e {
                prereg::PreregError::LedgerIo(m) => Failure::Io(m),
                other => domain(other),
            })?;
            ctx.manifest
                .arguments
                .insert("ledger_path".into(), json!(path.display().to_string()));
            if ctx.json {
                emit(None, &to_json(&record))?;
            } else {
                println!(
                    "registered {} #{} {} at {}",
                    record.doc.experiment_id, record.index, record.digest, record.timestamp_utc
                );
            }
            Ok(0)
        }
        PreregCommand::Verify { doc, digest, legacy } => {
            let d = load_doc(ctx, doc)?;
            let ok = if *legacy {
                prereg::verify_legacy(&d, digest)
            } else {
                prereg::verify(&d, digest)
            }
            .map_err(domain)?;
            if ctx.json {
                emit(None, &to_json(&json!({ "verified": ok })))?;
            } else {
                println!("verified: {ok}");
            }
            Ok(u8::from(!ok))
        }
    }
}

fn load_module_map(ctx: &mut Ctx, path: &Option<PathBuf>) -> Result<ModuleMap, Failure> {
    match path {
        Some(p) => {
            let text = ctx.manifest.read(p)?;
            ModuleMap::from_json(&text).map_err(domain)
        }
        None => Ok(ModuleMap::basename_only()),
    }
}

/// Emits `layer` either merged into an existing graph or as a fresh graph
/// over `modules`.
fn finish_layer(ctx: &mut Ctx, common: &ExtractCommon, layer: Layer, modules: Vec<String>) -> Result<u8, Failure> {
    let graph = match &common.merge_into {
        Some(p) => {
            let base = load_graph(ctx, p)?;
            merge_layer(&base, layer, &modules).map_err(domain)?
        }
        None if modules.is_empty() => MultilayerGraph {
            name: common.name.clone(),
            nodes: Vec::new(),
            layers: vec![layer],
        },
        None => assemble_graph(common.name.clone(), modules, vec![layer]).map_err(domain)?,
    };
    emit(common.out.as_deref(), &graph.to_json())?;
    Ok(0)
}

fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, PathBuf)>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", dir.display()));
    let mut entries: Vec<_> = std::fs::read_dir(dir).map_err(io)?.collect::<Result<_, _>>().map_err(io)?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        let ft = entry.file_type().map_err(io)?;
        if ft.is_dir() {
            walk(root, &path, out)?;
        } else if ft.is_file() {
            let rel = path
                .strip_prefix(root)
                .expect("walked path is under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            out.push((rel, path));
        }
    }
    Ok(())
}

pub fn extract(ctx: &mut Ctx, c: &ExtractCommand) -> Result<u8, Failure> {
    match c {
        ExtractCommand::Cochange {
            log,
            bulk_threshold,
            common,
        } => {
            let text = ctx.manifest.read(log)?;
            let commits = parse_git_log(&text).map_err(domain)?;
            let map = load_module_map(ctx, &common.module_map)?;
            let layer = build_cochange_layer(&commits, &map, *bulk_threshold);
            finish_layer(ctx, common, layer, cochange_modules(&commits, &map))
        }
        ExtractCommand::Imports {
            root,
            patterns,
            extensions,
            common,
        } => {
            let patterns = match patterns {
                Some(p) => {
                    let text = ctx.manifest.read(p)?;
                    ImportPatternSet::from_json(&text).map_err(domain)?
                }
                None => ImportPatternSet::python(),
            };
            let mut extensions = extensions.clone();
            if extensions.is_empty() && patterns.language_label() == "python" {
                extensions.push("py".into());
            }
            let map = load_module_map(ctx, &common.module_map)?;
            let mut files = Vec::new();
            walk(root, root, &mut files)?;
            let mut sources = BTreeMap::new();
            for (rel, path) in files {
                let ext = Path::new(&rel).extension().and_then(|e| e.to_str()).unwrap_or("");
                if !extensions.is_empty() && !extensions.iter().any(|e| e.trim_start_matches('.') == ext) {
                    continue;
                }
                if map.resolve(&rel).is_none() {
                    continue;
                }
                let bytes = ctx.manifest.read_bytes(&path)?;
                if let Ok(text) = String::from_utf8(bytes) {
                    sources.insert(rel, text);
                }
            }
            let layer = scan_imports(&sources, &patterns, &map);
            finish_layer(ctx, common, layer, source_modules(&sources, &map))
        }
        ExtractCommand::Coupling { graph, layer, out } => {
            let g = load_graph(ctx, graph)?;
            let imports = g.require_layer(layer).map_err(domain)?;
            let coupling = build_structural_coupling(imports).map_err(domain)?;
            let merged = merge_layer(&g, coupling, &[]).map_err(domain)?;
            emit(out.as_deref(), &merged.to_json())?;
            Ok(0)
        }
    }
}

pub fn control(ctx: &mut Ctx, a: &crate::ControlArgs) -> Result<u8, Failure> {
    let _ = ctx;
    let g = generate_random_control(a.n_nodes, a.n_layers, a.edge_prob, a.seed).map_err(domain)?;
    emit(a.out.as_deref(), &g.to_json())?;
    Ok(0)
}

pub fn binom(ctx: &mut Ctx, k: u64, n: u64) -> Result<u8, Failure> {
    let tail = binom_tail(k, n).map_err(domain)?;
    if ctx.json {
        emit(None, &to_json(&tail))?;
    } else {
        println!("{}/{} ≈ {:.4}", tail.numerator, tail.denominator, tail.p_float);
    }
    Ok(0)
}

pub fn roles(ctx: &mut Ctx, a: &RolesArgs) -> Result<u8, Failure> {
    let ga = load_graph(ctx, &a.graph_a)?;
    let gb = load_graph(ctx, &a.graph_b)?;
    let alignment = match &a.alignment {
        Some(p) => {
            let text = ctx.manifest.read(p)?;
            Alignment::from_json(&text).map_err(domain)?
        }
        None => Alignment::identity(&ga),
    };
    let rows = compare_graphs(&ga, &gb, &alignment).map_err(domain)?;
    if ctx.json {
        emit(None, &to_json(&rows))?;
    } else {
        emit(None, &render_table(&rows))?;
    }
    Ok(0)
}

pub fn replay_table(ctx: &mut Ctx) -> Result<u8, Failure> {
    let inputs: Vec<(f64, f64, f64)> = CANONICAL_TABLE.iter().map(|r| (r.r_sim, r.r_dis, r.p_sim)).collect();
    let replayed = replay(&inputs);
    let mut mismatches = 0;
    let mut rows = Vec::new();
    let w = CANONICAL_TABLE.iter().map(|r| r.domain.len()).max().unwrap_or(6);
    let mut text = format!(
        "{:<w$} {:>4} {:>7} {:>7} {:>8} {:>9}  {:<10} {}\n",
        "domain", "n", "r_sim", "r_dis", "delta_r", "published", "verdict", "match"
    );
    for (row, got) in CANONICAL_TABLE.iter().zip(&replayed) {
        let ok = (got.delta_r - row.published_delta_r).abs() <= 1e-3 + 1e-12 && got.verdict == row.published_verdict;
        mismatches += usize::from(!ok);
        let _ = writeln!(
            text,
            "{:<w$} {:>4} {:>7.3} {:>7.3} {:>+8.3} {:>+9.3}  {:<10} {}",
            row.domain,
            row.n,
            row.r_sim,
            row.r_dis,
            got.delta_r,
            row.published_delta_r,
            got.verdict.to_string(),
            if ok { "yes" } else { "NO" }
        );
        rows.push(json!({
            "domain": row.domain,
            "n": row.n,
            "r_sim": row.r_sim,
            "r_dis": row.r_dis,
            "delta_r": got.delta_r,
            "published_delta_r": row.published_delta_r,
            "verdict": got.verdict,
            "published_verdict": row.published_verdict,
            "match": ok,
        }));
    }
    if ctx.json {
        emit(None, &to_json(&rows))?;
    } else {
        emit(None, &text)?;
    }
    Ok(u8::from(mismatches > 0))
}
