use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use taskbench::analytics::{
    default_export_map, export_preference_table, load_responses, numeric_summary, question, rank_summary,
    AnalyticsError, Dimension, NumericSummary, QuestionKind, RankSummary, ResponseTable, Segment,
};
use taskbench::model::{validate_process, DataKind, ProcessDefinition};
use taskbench::session::{Engine, Phase};
use taskbench::setup::{Setup, SetupError};
use taskbench::tasks::applicable_for_kind;

use crate::{out, CliError};

type Result<T = ()> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn load_setup(cell: &Path) -> Result<Setup> {
    Setup::load(cell).map_err(|e| match e {
        SetupError::Io { .. } => CliError::Usage(e.to_string()),
        other => CliError::Invalid(format!("{}: {other}", cell.display())),
    })
}

pub(crate) fn load_process(path: &Path) -> Result<ProcessDefinition> {
    ProcessDefinition::from_json(&read(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: malformed process: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    out!("{}", serde_json::to_string_pretty(value).expect("output serialises"));
}

fn names<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn cell_validate(path: &Path, json: bool) -> Result {
    let setup = load_setup(path)?;
    let cell = &setup.cell;
    let modalities = setup.kb.available_modalities(cell);
    let objects: Vec<&str> = cell.objects.iter().map(|o| o.model.as_str()).collect();
    if json {
        print_json(&json!({
            "cell": cell.id,
            "valid": true,
            "components": cell.components,
            "objects": objects,
            "modalities": modalities,
            "outputs": setup.kb.available_outputs(cell),
        }));
    } else {
        out!("{}: ok", cell.id);
        out!("components: {}", names(cell.components.iter()));
        out!("objects: {}", objects.join(" "));
        out!("input modalities: {}", names(&modalities));
    }
    Ok(())
}

pub fn kb_modalities(cell: &Path, kind: DataKind, target: Option<(String, String)>, json: bool) -> Result {
    let setup = load_setup(cell)?;
    let ranked = match target {
        Some((task, param)) => {
            let def = setup
                .catalog
                .iter()
                .find(|d| d.id == task)
                .ok_or_else(|| CliError::Usage(format!("unknown task {task}")))?;
            let spec = def
                .param(&param)
                .ok_or_else(|| CliError::Usage(format!("task {task} has no parameter {param}")))?;
            if spec.data_type.kind() != kind {
                return Err(CliError::Usage(format!(
                    "{task}.{param} takes {}, not {kind}",
                    spec.data_type.kind()
                )));
            }
            setup.kb.modalities_for_parameter(spec, &setup.cell)
        }
        None => setup
            .kb
            .rank(kind, &applicable_for_kind(&setup.catalog, kind), &setup.cell.components),
    };
    if json {
        print_json(&ranked);
    } else {
        out!("{}", names(&ranked));
    }
    Ok(())
}

pub fn process_validate(process: &Path, cell: &Path, json: bool) -> Result {
    let setup = load_setup(cell)?;
    let process = load_process(process)?;
    let issues = validate_process(&process, &setup.catalog);
    if json {
        print_json(&json!({ "process": process.id, "valid": issues.is_empty(), "issues": issues }));
    } else if issues.is_empty() {
        out!("{}: ok, {} tasks", process.id, process.tasks.len());
    } else {
        for issue in &issues {
            out!("{issue}");
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("{} validation issues", issues.len())))
    }
}

pub fn process_expand(process: &Path, cell: &Path, json: bool) -> Result {
    let setup = load_setup(cell)?;
    let process = load_process(process)?;
    let issues = validate_process(&process, &setup.catalog);
    if let Some(first) = issues.first() {
        return Err(CliError::Invalid(format!("{first} ({} issues)", issues.len())));
    }
    let plan = setup.plan(&process).map_err(|e| CliError::Invalid(e.to_string()))?;
    if json {
        print_json(&plan);
        return Ok(());
    }
    let width = plan.iter().map(|i| i.instance.len()).max().unwrap_or(0);
    for inv in &plan {
        let mut line = format!("{:width$}  {} {}", inv.instance, inv.id(), inv.call.args_json());
        for (arg, source) in &inv.inferred {
            let _ = write!(line, "  [{arg} from {source}]");
        }
        out!("{line}");
    }
    Ok(())
}

pub fn process_run(process: &Path, cell: &Path, trace_out: Option<&Path>, json: bool) -> Result {
    let setup = load_setup(cell)?;
    let process = load_process(process)?;
    let mut engine = Engine::new(setup);
    let request = engine.start_session(process.clone()).map_err(|e| CliError::Invalid(e.to_string()))?;
    if request.is_some() {
        let unset = engine.unset_required(&process);
        let list: Vec<String> = unset.iter().map(|(i, p)| format!("{i}.{p}")).collect();
        return Err(CliError::Invalid(format!("unset parameters: {}", list.join(", "))));
    }
    engine.execute().map_err(|e| CliError::Invalid(e.to_string()))?;
    let mut confirmations = 0;
    while let Some(Phase::Executing {
        awaiting_confirmation: true,
    }) = engine.phase()
    {
        engine.confirm_human_step().map_err(|e| CliError::Invalid(e.to_string()))?;
        confirmations += 1;
    }
    let session = engine.session().expect("session started");
    let trace = session.trace();
    if let Some(path) = trace_out {
        write(path, &trace.to_jsonl())?;
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for ev in trace.events() {
        *counts.entry(ev.skill.to_string()).or_default() += 1;
    }
    if json {
        print_json(&json!({
            "process": process.id,
            "phase": session.phase,
            "events": trace.len(),
            "confirmations": confirmations,
            "skills": counts,
        }));
    } else {
        out!("{}: {} after {} skills", process.id, session.phase.name(), trace.len());
        for (skill, n) in &counts {
            out!("  {skill:<22} {n}");
        }
    }
    match &session.phase {
        Phase::Done => Ok(()),
        Phase::Failed { code, reason } => Err(CliError::Invalid(format!("{code}: {reason}"))),
        other => Err(CliError::Invalid(format!("stopped in {}", other.name()))),
    }
}

fn load_table(csv: &Path) -> Result<ResponseTable> {
    load_responses(&read(csv)?).map_err(|e| CliError::Invalid(format!("{}: {e}", csv.display())))
}

fn analytics_error(e: AnalyticsError) -> CliError {
    match e {
        AnalyticsError::UnknownQuestion(_) | AnalyticsError::InvalidSegment(_) => CliError::Usage(e.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

fn rank_text(s: &RankSummary, segment: &str) -> String {
    let mut out = format!("{} ({segment}, n={})\n", s.question, s.n);
    let _ = writeln!(out, "{:<14} {:>6} {:>6}", "modality", "mean", "sd");
    for m in &s.ordering {
        let st = s.get(*m).expect("ordered modality has stats");
        let sd = st.sd.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(out, "{:<14} {:>6.2} {sd:>6}", m.to_string(), st.mean);
    }
    let _ = write!(out, "ordering: {}", names(&s.ordering));
    out
}

fn numeric_text(q: &str, s: &NumericSummary, segment: &str) -> String {
    let sd = s.sd.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    format!(
        "{q} ({segment}, n={})\nmean {:.2}  sd {sd}  min {}  max {}",
        s.n, s.mean, s.min, s.max
    )
}

pub fn study_analyze(csv: &Path, q: &str, segment: Option<&str>, compare: Option<&str>, json: bool) -> Result {
    let kind = question(q)
        .map(|x| x.kind)
        .ok_or_else(|| CliError::Usage(format!("unknown question {q}")))?;
    let segments: Vec<Option<Segment>> = match (segment, compare) {
        (Some(s), _) => vec![Some(s.parse().map_err(analytics_error)?)],
        (None, Some(d)) => {
            let dim: Dimension = d.parse().map_err(analytics_error)?;
            dim.segments().into_iter().map(Some).collect()
        }
        (None, None) => vec![None],
    };
    let table = load_table(csv)?;
    let mut json_out = Vec::new();
    let mut text_out = Vec::new();
    let mut failures = 0;
    for seg in &segments {
        let label = seg.map_or_else(|| "all".to_string(), |s| s.to_string());
        let (value, text) = match kind {
            QuestionKind::Rank(_) => match rank_summary(&table, q, seg.as_ref()) {
                Ok(s) => (json!(s), rank_text(&s, &label)),
                Err(e) => (json!({ "error": e.to_string() }), format!("{q} ({label}): {e}")),
            },
            _ => match numeric_summary(&table, q, seg.as_ref()) {
                Ok(s) => (json!(s), numeric_text(q, &s, &label)),
                Err(e) => (json!({ "error": e.to_string() }), format!("{q} ({label}): {e}")),
            },
        };
        if value.get("error").is_some() {
            failures += 1;
        }
        json_out.push(json!({ "segment": label, "summary": value }));
        text_out.push(text);
    }
    if json {
        print_json(&json!({ "question": q, "results": json_out }));
    } else {
        out!("{}", text_out.join("\n\n"));
    }
    if failures == segments.len() {
        Err(CliError::Invalid(format!("no responses for {q}")))
    } else {
        Ok(())
    }
}

pub fn study_export(csv: &Path, output: Option<&Path>) -> Result {
    let table = load_table(csv)?;
    let prefs = export_preference_table(&table, &default_export_map()).map_err(analytics_error)?;
    let text = prefs.to_json_pretty();
    match output {
        Some(path) => write(path, &text),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}
