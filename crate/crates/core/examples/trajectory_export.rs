//! Records two searches as JSONL trajectories, reads them back and exports a
//! merged dataset plus a CSV summary.

use axiomforge::corpus;
use axiomforge::distance::DistanceOracle;
use axiomforge::pddl::{parse_domain, parse_problem, print_canonical};
use axiomforge::proposer::ScriptedOracle;
use axiomforge::search::{run_search, Algorithm, SearchConfig, SearchTask};
use axiomforge::trajectory::{
    export, read_trajectory, ExportFormat, RunSummary, TrajectoryHeader, TrajectoryWriter, ENGINE_VERSION,
};
use uuid::Uuid;

fn main() {
    let dir = std::env::temp_dir().join(format!("axiomforge-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let entry = corpus::load("blocksworld").unwrap();
    let original = parse_domain(entry.domain_text).unwrap();
    let task = SearchTask::new(original.clone(), parse_problem(entry.flagship().text).unwrap());

    let mut files = Vec::new();
    for algorithm in [Algorithm::Beam, Algorithm::Bfs] {
        let cfg = SearchConfig {
            algorithm,
            target_length: 4,
            ..SearchConfig::default()
        };
        let header = TrajectoryHeader {
            run_id: Uuid::new_v4(),
            config: cfg.clone(),
            original_domain_text: print_canonical(&original),
            problem_text: entry.flagship().text.to_string(),
            corpus_domain_name: Some(entry.name.to_string()),
            seed: cfg.seed,
            engine_version: ENGINE_VERSION.to_string(),
        };
        let path = dir.join(format!("{algorithm}.jsonl"));
        let mut writer = TrajectoryWriter::create(&path, &header).unwrap();
        let result = run_search(
            &cfg,
            &task,
            &ScriptedOracle::builtin(),
            &DistanceOracle::levenshtein_mock(),
            &mut writer,
        )
        .unwrap();
        let best = result.best.as_ref();
        writer
            .finish(&RunSummary {
                success: result.success,
                best_step_id: best.map(|b| b.id as u64),
                best_length: best.and_then(|b| b.plan_length()),
                explored: result.explored,
                oracle_calls: result.oracle_calls,
            })
            .unwrap();
        files.push(path);
    }

    for path in &files {
        for run in read_trajectory(path).unwrap() {
            println!(
                "{}: {} steps, hashes {:?}",
                path.display(),
                run.steps.len(),
                run.hashes()
            );
        }
    }

    let merged = dir.join("dataset.jsonl");
    let summary = dir.join("summary.csv");
    export(&files, &merged, ExportFormat::Jsonl).unwrap();
    export(&files, &summary, ExportFormat::CsvSummary).unwrap();
    print!("\n{}", std::fs::read_to_string(&summary).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
