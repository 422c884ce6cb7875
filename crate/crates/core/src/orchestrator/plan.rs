use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Modality, OrchestratorError, TaskKind};

/// The four condition sequences: both modality orders crossed with both task
/// orders, laid out so consecutive rows differ in both factors.
pub const CONDITION_SEQUENCES: [([Modality; 2], [TaskKind; 2]); 4] = [
    (
        [Modality::MrReplica, Modality::Joypad],
        [TaskKind::AgvRoute, TaskKind::DroneLift],
    ),
    (
        [Modality::Joypad, Modality::MrReplica],
        [TaskKind::DroneLift, TaskKind::AgvRoute],
    ),
    (
        [Modality::MrReplica, Modality::Joypad],
        [TaskKind::DroneLift, TaskKind::AgvRoute],
    ),
    (
        [Modality::Joypad, Modality::MrReplica],
        [TaskKind::AgvRoute, TaskKind::DroneLift],
    ),
];

/// One subject's assignment. The task order applies to both sessions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionPlan {
    pub subject_id: String,
    /// Index into [`CONDITION_SEQUENCES`].
    pub sequence: usize,
    pub modality_order: [Modality; 2],
    pub task_order: [TaskKind; 2],
    pub seed: u64,
}

impl SessionPlan {
    pub fn modality(&self, which: Which) -> Modality {
        self.modality_order[which.index()]
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        let ok = self.modality_order[0] != self.modality_order[1]
            && self.task_order[0] != self.task_order[1]
            && CONDITION_SEQUENCES.get(self.sequence)
                == Some(&(self.modality_order, self.task_order));
        if ok {
            Ok(())
        } else {
            Err(OrchestratorError::InvalidPlan(format!(
                "subject {} has an inconsistent condition sequence",
                self.subject_id
            )))
        }
    }
}

/// First or second session of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    First,
    Second,
}

impl Which {
    pub const BOTH: [Which; 2] = [Which::First, Which::Second];

    pub fn index(self) -> usize {
        match self {
            Which::First => 0,
            Which::Second => 1,
        }
    }
}

/// Balanced, seeded assignment of subjects to condition sequences.
///
/// Subjects are processed in blocks of four; each block receives a seeded
/// permutation of the four sequences, so every sequence is used either
/// ⌊n/4⌋ or ⌈n/4⌉ times.
pub fn latin_plan(subjects: usize, seed: u64) -> Vec<SessionPlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(subjects);
    while out.len() < subjects {
        let mut block = [0usize, 1, 2, 3];
        block.shuffle(&mut rng);
        for sequence in block {
            if out.len() == subjects {
                break;
            }
            let (modality_order, task_order) = CONDITION_SEQUENCES[sequence];
            out.push(SessionPlan {
                subject_id: format!("S{:02}", out.len() + 1),
                sequence,
                modality_order,
                task_order,
                seed: rng.random(),
            });
        }
    }
    out
}

/// Study plan file: the generator seed plus one row per subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyPlan {
    pub seed: u64,
    pub subjects: Vec<SessionPlan>,
}

impl StudyPlan {
    pub fn generate(subjects: usize, seed: u64) -> Self {
        Self {
            seed,
            subjects: latin_plan(subjects, seed),
        }
    }

    pub fn sequence_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for s in &self.subjects {
            counts[s.sequence] += 1;
        }
        counts
    }

    pub fn subject(&self, id: &str) -> Option<&SessionPlan> {
        self.subjects.iter().find(|s| s.subject_id == id)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, OrchestratorError> {
        let plan: StudyPlan =
            toml::from_str(s).map_err(|e| OrchestratorError::InvalidPlan(e.to_string()))?;
        for s in &plan.subjects {
            s.validate()?;
        }
        Ok(plan)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OrchestratorError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OrchestratorError::InvalidPlan(e.to_string()))?;
        Self::from_toml_str(&text)
    }
}
