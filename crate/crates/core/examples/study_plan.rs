//! Generates a counterbalanced study plan and prints its condition sequences.
//!
//! ```bash
//! cargo run -p replica-core --example study_plan -- 24 11
//! ```

use replica::orchestrator::{StudyPlan, Which};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let subjects: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(24);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let plan = StudyPlan::generate(subjects, seed);
    for s in &plan.subjects {
        println!(
            "{} sequence {}  first {:<10} second {:<10} tasks {:?}",
            s.subject_id,
            s.sequence,
            s.modality(Which::First).label(),
            s.modality(Which::Second).label(),
            s.task_order
        );
    }
    println!("subjects per sequence: {:?}", plan.sequence_counts());
    Ok(())
}
