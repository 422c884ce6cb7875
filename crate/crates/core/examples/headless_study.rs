//! Runs every subject of a study plan headlessly and prints the report.
//!
//! ```bash
//! cargo run -p replica-core --example headless_study -- 4
//! ```

use replica::gateway::{run_headless, ScriptedAgent};
use replica::metrics::{render_table, summarize_study};
use replica::orchestrator::StudyPlan;
use replica::sim::Scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let subjects: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(4);
    let seed = 7;
    let plan = StudyPlan::generate(subjects, seed);
    let scene = Scene::default_scene();
    let agent = ScriptedAgent::jittered(3.0);

    let mut records = Vec::new();
    let mut questionnaires = Vec::new();
    for subject in &plan.subjects {
        let archive = run_headless(subject, &scene, &agent, seed)?;
        for r in archive.records()? {
            println!(
                "{} {:?} {:<10} total {:>7.2} s  reaction {:?}",
                r.subject,
                r.session,
                r.modality.label(),
                r.timings.total_time,
                r.timings.reaction_time
            );
            records.push(r);
        }
        questionnaires.push(archive.questionnaire()?);
    }
    let report = summarize_study(&records, &questionnaires)?;
    println!("\n{}", render_table(&report));
    Ok(())
}
