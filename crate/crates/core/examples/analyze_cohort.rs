//! Builds a synthetic paired cohort with published sample statistics and
//! prints the study report and its CSV form.
//!
//! ```bash
//! cargo run -p replica-core --example analyze_cohort
//! ```

use replica::metrics::{render_csv, render_table, summarize_study, synthetic_cohort, CohortTarget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Published means and SDs; the reaction-time pair is illustrative.
    let targets = [
        CohortTarget {
            mr_replica: (208.7, 58.5),
            joypad: (245.2, 73.7),
        },
        CohortTarget {
            mr_replica: (113.3, 36.5),
            joypad: (78.0, 36.9),
        },
        CohortTarget {
            mr_replica: (42.5, 19.6),
            joypad: (49.7, 24.0),
        },
        CohortTarget {
            mr_replica: (4.0, 1.5),
            joypad: (9.0, 3.0),
        },
    ];
    let records = synthetic_cohort(&targets, 24, 2024);
    let report = summarize_study(&records, &[])?;
    println!("{}", render_table(&report));
    print!("{}", render_csv(&report));
    Ok(())
}
