use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use creamkit::hta::ParseDiagnostic;
use creamkit::reporting::{csv_report, json_report, profile_svg, screening_line, LabeledProfile};
use creamkit::whatif::sweep_is_flat;
use creamkit::{
    analyze, default_taxonomy, demand_profile, fmt_prob, histogram_svg, load_taxonomy, markdown_report, parse_hta,
    rank_critical, screen, single_cpc_sweep, validate_hta, AnalysisError, AssignmentResult, CpcAssessment, Provenance,
    ReportBundle, ReportOptions, Scope, TaskTree, Taxonomy, TaxonomyError,
};

use crate::{AnalysisInput, Cli, Command, Format};

/// A failed command: the message lines for stderr and the exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Input read fine but violates the taxonomy or format rules (exit 1).
    Invalid(Vec<String>),
    /// Unreadable, unparsable or unwritable input/output (exit 2).
    Io(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    pub fn lines(&self) -> &[String] {
        match self {
            Failure::Invalid(l) | Failure::Io(l) => l,
        }
    }

    fn io(msg: impl Into<String>) -> Self {
        Failure::Io(vec![msg.into()])
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(vec![msg.into()])
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let taxonomy_path = cli.taxonomy;
    let taxonomy = || load_taxonomy_file(taxonomy_path.as_deref());
    match cli.command {
        Command::Validate { hta } => validate(&hta, &taxonomy()?, out),
        Command::Screen { assessment, json } => screen_cmd(&assessment, json, &taxonomy()?, out),
        Command::Analyze { input, format, top, out: path } => {
            let text = analyze_cmd(&input, format, top, &taxonomy()?, taxonomy_path.as_deref())?;
            emit(&text, path.as_deref(), out)
        }
        Command::Profile { hta, out: path } => profile_cmd(&hta, path.as_deref(), out),
        Command::Whatif { input, top, json, out: path } => {
            let text = whatif_cmd(&input, top, json, &taxonomy()?)?;
            emit(&text, path.as_deref(), out)
        }
        Command::Report { input, out: dir, top, no_whatif, timestamp } => {
            let options = ReportOptions { top_k: top, include_sweep: !no_whatif };
            report_cmd(&input, &dir, &options, timestamp, &taxonomy()?, taxonomy_path.as_deref(), out)
        }
        Command::Serve { port, bind, projects } => serve_cmd(&bind, port, &projects, taxonomy()?, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|_| Failure::io(format!("{}: not valid UTF-8", path.display())))
}

pub fn load_taxonomy_file(path: Option<&Path>) -> Result<Taxonomy> {
    let Some(path) = path else {
        return Ok(default_taxonomy());
    };
    load_taxonomy(&read_text(path)?).map_err(|e| match e {
        TaxonomyError::Invalid(issues) => {
            Failure::Invalid(issues.iter().map(|i| format!("{}: {i}", path.display())).collect())
        }
        other => Failure::io(format!("{}: {other}", path.display())),
    })
}

fn parse_tree(path: &Path) -> Result<TaskTree> {
    let text = read_text(path)?;
    parse_hta(&text).map_err(|e| Failure::Io(e.0.iter().map(|d| diagnostic_line(path, d)).collect()))
}

fn diagnostic_line(path: &Path, d: &ParseDiagnostic) -> String {
    format!("{}:{}: [{}] {}", path.display(), d.line, d.node, d.message)
}

fn load_valid_tree(path: &Path, taxonomy: &Taxonomy) -> Result<TaskTree> {
    let tree = parse_tree(path)?;
    let report = validate_hta(&tree, taxonomy);
    if !report.is_valid() {
        return Err(Failure::Invalid(
            report.issues.iter().map(|i| format!("{}: node {}: {}", path.display(), i.node, i.message)).collect(),
        ));
    }
    Ok(tree)
}

fn load_assessment(path: &Path, taxonomy: &Taxonomy) -> Result<CpcAssessment> {
    let a = CpcAssessment::from_json(&read_text(path)?).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    a.check(taxonomy).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok(a)
}

fn analysis_failure(e: AnalysisError) -> Failure {
    Failure::invalid(e.to_string())
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::io(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn file_label(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn validate(path: &Path, taxonomy: &Taxonomy, out: &mut dyn Write) -> Result<()> {
    let tree = load_valid_tree(path, taxonomy)?;
    let _ = writeln!(out, "OK: {} nodes, {} assignments", tree.node_count(), tree.assignment_count());
    Ok(())
}

fn screen_cmd(path: &Path, json: bool, taxonomy: &Taxonomy, out: &mut dyn Write) -> Result<()> {
    let a = load_assessment(path, taxonomy)?;
    let r = screen(&a, taxonomy).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("result serializes"));
    } else {
        let _ = writeln!(out, "{}", screening_line(&r));
    }
    Ok(())
}

fn assignment_table(rows: &[AssignmentResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:<15} {:<4} {:<12} {:<12} source", "node", "function", "cff", "nominal", "adjusted");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<10} {:<15} {:<4} {:<12} {:<12} {}",
            r.node.to_string(),
            r.function.to_string(),
            r.cff.as_str(),
            fmt_prob(r.nominal),
            fmt_prob(r.adjusted_cfp),
            r.source
        );
    }
    s
}

fn analyze_cmd(
    input: &AnalysisInput,
    format: Format,
    top: Option<usize>,
    taxonomy: &Taxonomy,
    taxonomy_path: Option<&Path>,
) -> Result<String> {
    let tree = load_valid_tree(&input.hta, taxonomy)?;
    let context = load_assessment(&input.assessment, taxonomy)?;
    match format {
        Format::Json => {
            let r = analyze(&tree, &context, taxonomy).map_err(analysis_failure)?;
            Ok(serde_json::to_string_pretty(&r).expect("result serializes") + "\n")
        }
        Format::Csv => {
            let prov = provenance(input, taxonomy, taxonomy_path, None, &context)?;
            let options = ReportOptions { top_k: 0, include_sweep: false };
            let bundle = ReportBundle::build(&tree, &context, taxonomy, prov, &options).map_err(analysis_failure)?;
            Ok(csv_report(&bundle))
        }
        Format::Text => {
            let r = analyze(&tree, &context, taxonomy).map_err(analysis_failure)?;
            let s = screen(&context, taxonomy).map_err(|e| Failure::invalid(e.to_string()))?;
            let mut text = String::new();
            let _ = writeln!(text, "Screening: {}", screening_line(&s));
            let _ = writeln!(text, "Aggregate failure probability: {}", fmt_prob(r.aggregate_failure_p));
            let _ = writeln!(text);
            let rows = match top {
                Some(k) => rank_critical(&r, k),
                None => r.per_assignment.clone(),
            };
            text.push_str(&assignment_table(&rows));
            Ok(text)
        }
    }
}

fn profile_cmd(path: &Path, svg: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let tree = parse_tree(path)?;
    let mut rows: Vec<LabeledProfile> = Vec::new();
    for root in &tree.roots {
        let profile = demand_profile(&tree, &Scope::Node(root.number.clone())).map_err(analysis_failure)?;
        rows.push(LabeledProfile { label: format!("#{} {}", root.number, root.title), profile });
    }
    let whole = demand_profile(&tree, &Scope::WholeTree).map_err(analysis_failure)?;
    rows.push(LabeledProfile { label: "All steps".to_string(), profile: whole });

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<40} {:>11} {:>14} {:>8} {:>9}",
        "scope", "Observation", "Interpretation", "Planning", "Execution"
    );
    for r in &rows {
        let [o, i, p, e] = r.profile.as_array();
        let _ = writeln!(text, "{:<40} {o:>11} {i:>14} {p:>8} {e:>9}", truncate(&r.label, 40));
    }
    if let Some(svg_path) = svg {
        let profiles: Vec<_> = rows.iter().map(|r| r.profile.clone()).collect();
        let labels: Vec<_> = rows.iter().map(|r| r.label.clone()).collect();
        let figure = histogram_svg(&profiles, &labels).map_err(|e| Failure::invalid(e.to_string()))?;
        write_file(svg_path, figure.as_bytes())?;
    }
    out.write_all(text.as_bytes()).map_err(|e| Failure::io(format!("stdout: {e}")))
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        s.chars().take(n - 3).collect::<String>() + "..."
    }
}

fn whatif_cmd(input: &AnalysisInput, top: Option<usize>, json: bool, taxonomy: &Taxonomy) -> Result<String> {
    let tree = load_valid_tree(&input.hta, taxonomy)?;
    let context = load_assessment(&input.assessment, taxonomy)?;
    let mut sweep = single_cpc_sweep(&tree, &context, taxonomy).map_err(analysis_failure)?;
    if json {
        return Ok(serde_json::to_string_pretty(&sweep).expect("sweep serializes") + "\n");
    }
    let flat = sweep_is_flat(&sweep);
    if let Some(k) = top {
        sweep.truncate(k);
    }
    let mut s = String::new();
    if let Some(d) = sweep.first() {
        let _ = writeln!(
            s,
            "Baseline: {} {}, aggregate {}",
            d.mode_before,
            d.interval_before,
            fmt_prob(d.aggregate_before)
        );
    }
    if flat {
        let _ = writeln!(s, "No single-CPC change moves the aggregate; every assignment carries a fixed CFP.");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<4} {:<36} {:<36} {:<14} aggregate", "cpc", "from", "to", "mode");
    for d in &sweep {
        let _ = writeln!(
            s,
            "{:<4} {:<36} {:<36} {:<14} {}",
            d.cpc_id,
            truncate(&d.from_state, 36),
            truncate(&d.to_state, 36),
            d.mode_after.to_string(),
            fmt_prob(d.aggregate_after)
        );
    }
    Ok(s)
}

fn provenance(
    input: &AnalysisInput,
    taxonomy: &Taxonomy,
    taxonomy_path: Option<&Path>,
    timestamp: Option<String>,
    context: &CpcAssessment,
) -> Result<Provenance> {
    let timestamp = match timestamp {
        Some(t) => t,
        None => match source_date_epoch()? {
            Some(t) => t,
            None => context.timestamp.clone().unwrap_or_else(|| "not recorded".to_string()),
        },
    };
    let mut p = Provenance::new(taxonomy, timestamp)
        .with_input(file_label(&input.hta), &read(&input.hta)?)
        .with_input(file_label(&input.assessment), &read(&input.assessment)?);
    if let Some(t) = taxonomy_path {
        p = p.with_input(file_label(t), &read(t)?);
    }
    Ok(p)
}

fn source_date_epoch() -> Result<Option<String>> {
    let Ok(raw) = std::env::var("SOURCE_DATE_EPOCH") else {
        return Ok(None);
    };
    let secs: i64 =
        raw.trim().parse().map_err(|_| Failure::io(format!("SOURCE_DATE_EPOCH `{raw}` is not an integer")))?;
    let t =
        time::OffsetDateTime::from_unix_timestamp(secs).map_err(|e| Failure::io(format!("SOURCE_DATE_EPOCH: {e}")))?;
    Ok(Some(t.format(&time::format_description::well_known::Rfc3339).expect("RFC 3339 formats any valid time")))
}

fn report_cmd(
    input: &AnalysisInput,
    dir: &Path,
    options: &ReportOptions,
    timestamp: Option<String>,
    taxonomy: &Taxonomy,
    taxonomy_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let tree = load_valid_tree(&input.hta, taxonomy)?;
    let context = load_assessment(&input.assessment, taxonomy)?;
    let prov = provenance(input, taxonomy, taxonomy_path, timestamp, &context)?;
    let bundle = ReportBundle::build(&tree, &context, taxonomy, prov, options).map_err(analysis_failure)?;
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let artifacts: [(&str, String); 4] = [
        ("report.json", json_report(&bundle)),
        ("report.csv", csv_report(&bundle)),
        ("report.md", markdown_report(&bundle)),
        ("profile.svg", profile_svg(&bundle)),
    ];
    for (name, body) in &artifacts {
        let path: PathBuf = dir.join(name);
        write_file(&path, body.as_bytes())?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}

fn serve_cmd(bind: &str, port: u16, projects: &Path, taxonomy: Taxonomy, out: &mut dyn Write) -> Result<()> {
    let store = crate::ProjectStore::open(projects).map_err(|e| Failure::io(e.to_string()))?;
    let state = crate::AppState::new(store, taxonomy);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::io(format!("runtime: {e}")))?;
    runtime.block_on(async {
        let addr = format!("{bind}:{port}");
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure::io(format!("cannot listen on {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::io(e.to_string()))?;
        let _ = writeln!(out, "listening on http://{local} (projects in {})", projects.display());
        let _ = out.flush();
        axum::serve(listener, crate::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::io(format!("server: {e}")))
    })
}
