//! Post-study questionnaire: a SUS block per modality plus three comparative
//! questions with free-text comments.
//!
//! File format (TOML):
//!
//! ```toml
//! subject = "S01"
//!
//! [mr_replica]
//! q1 = 4
//! # ... through q10
//!
//! [joypad]
//! q1 = 3
//! # ... through q10
//!
//! [comparative]
//! c1 = "mr_replica"
//! c2 = "joypad"
//! c3 = "mr_replica"
//!
//! [comments]
//! c1 = "free text, kept verbatim"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::log::{Answer, EventKind, LogEvent};
use super::sus::{SusResponse, SUS_ITEMS};
use super::MetricsError;
use crate::orchestrator::Modality;

/// 10 SUS items per modality plus 3 comparative questions.
pub const QUESTIONNAIRE_STATEMENTS: usize = 2 * SUS_ITEMS + 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SusBlock {
    q1: i64,
    q2: i64,
    q3: i64,
    q4: i64,
    q5: i64,
    q6: i64,
    q7: i64,
    q8: i64,
    q9: i64,
    q10: i64,
}

impl SusBlock {
    fn scores(&self) -> [i64; SUS_ITEMS] {
        [
            self.q1, self.q2, self.q3, self.q4, self.q5, self.q6, self.q7, self.q8, self.q9,
            self.q10,
        ]
    }

    fn from_response(r: &SusResponse) -> Self {
        let s = r.items().map(i64::from);
        Self {
            q1: s[0],
            q2: s[1],
            q3: s[2],
            q4: s[3],
            q5: s[4],
            q6: s[5],
            q7: s[6],
            q8: s[7],
            q9: s[8],
            q10: s[9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Comparative {
    c1: Modality,
    c2: Modality,
    c3: Modality,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Comments {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c3: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestionnaireFile {
    subject: String,
    mr_replica: SusBlock,
    joypad: SusBlock,
    comparative: Comparative,
    #[serde(default)]
    comments: Comments,
}

/// A complete, validated questionnaire of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Questionnaire {
    pub subject: String,
    pub mr_replica: SusResponse,
    pub joypad: SusResponse,
    /// Preferred modality for c1..c3.
    pub preferences: [Modality; 3],
    /// Free text for c1..c3, verbatim.
    pub comments: [Option<String>; 3],
}

impl Questionnaire {
    pub fn sus(&self, m: Modality) -> &SusResponse {
        match m {
            Modality::MrReplica => &self.mr_replica,
            Modality::Joypad => &self.joypad,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, MetricsError> {
        let f: QuestionnaireFile =
            toml::from_str(s).map_err(|e| MetricsError::InvalidQuestionnaire(e.to_string()))?;
        Ok(Self {
            subject: f.subject,
            mr_replica: SusResponse::from_scores(&f.mr_replica.scores())?,
            joypad: SusResponse::from_scores(&f.joypad.scores())?,
            preferences: [f.comparative.c1, f.comparative.c2, f.comparative.c3],
            comments: [f.comments.c1, f.comments.c2, f.comments.c3],
        })
    }

    pub fn to_toml_string(&self) -> String {
        let [c1, c2, c3] = self.comments.clone();
        let f = QuestionnaireFile {
            subject: self.subject.clone(),
            mr_replica: SusBlock::from_response(&self.mr_replica),
            joypad: SusBlock::from_response(&self.joypad),
            comparative: Comparative {
                c1: self.preferences[0],
                c2: self.preferences[1],
                c3: self.preferences[2],
            },
            comments: Comments { c1, c2, c3 },
        };
        toml::to_string_pretty(&f).expect("questionnaire serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MetricsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Log records answering this questionnaire's items for one session:
    /// the SUS block of `modality`, plus the comparative block if
    /// `comparative` is set.
    pub fn answer_events(&self, t: f64, modality: Modality, comparative: bool) -> Vec<LogEvent> {
        let answer = |item: String, answer: Answer| {
            LogEvent::new(t, EventKind::QuestionnaireAnswer { item, answer })
        };
        let mut out: Vec<LogEvent> = self
            .sus(modality)
            .items()
            .iter()
            .enumerate()
            .map(|(i, &s)| answer(format!("q{}", i + 1), Answer::Score(s)))
            .collect();
        if comparative {
            for (i, p) in self.preferences.iter().enumerate() {
                out.push(answer(format!("c{}", i + 1), Answer::Choice(*p)));
                if let Some(c) = &self.comments[i] {
                    out.push(answer(
                        format!("c{}_comment", i + 1),
                        Answer::Text(c.clone()),
                    ));
                }
            }
        }
        out
    }

    /// Reassembles a questionnaire from the answers recorded in a subject's
    /// session logs. Each log must start with a `session_start` record.
    pub fn from_logs(logs: &[&[LogEvent]]) -> Result<Self, MetricsError> {
        let invalid = |m: String| MetricsError::InvalidQuestionnaire(m);
        let mut subject = None;
        let mut sus: BTreeMap<Modality, BTreeMap<usize, i64>> = BTreeMap::new();
        let mut prefs: [Option<Modality>; 3] = [None; 3];
        let mut comments: [Option<String>; 3] = Default::default();
        for log in logs {
            let Some((subj, modality)) = log.iter().find_map(|e| match &e.kind {
                EventKind::SessionStart {
                    subject, modality, ..
                } => Some((subject.clone(), *modality)),
                _ => None,
            }) else {
                return Err(invalid("log without session_start".into()));
            };
            if subject.get_or_insert_with(|| subj.clone()) != &subj {
                return Err(invalid(format!("logs of different subjects: {subj}")));
            }
            for e in log.iter() {
                let EventKind::QuestionnaireAnswer { item, answer } = &e.kind else {
                    continue;
                };
                let bad = || invalid(format!("unexpected answer {answer:?} for {item}"));
                if let Some(n) = item.strip_prefix('q').and_then(|n| n.parse::<usize>().ok()) {
                    let Answer::Score(s) = answer else {
                        return Err(bad());
                    };
                    if !(1..=SUS_ITEMS).contains(&n) {
                        return Err(bad());
                    }
                    sus.entry(modality).or_default().insert(n, i64::from(*s));
                } else if let Some(rest) = item.strip_prefix('c') {
                    let (num, is_comment) = match rest.strip_suffix("_comment") {
                        Some(n) => (n, true),
                        None => (rest, false),
                    };
                    let k = num
                        .parse::<usize>()
                        .ok()
                        .filter(|k| (1..=3).contains(k))
                        .ok_or_else(bad)?
                        - 1;
                    match (answer, is_comment) {
                        (Answer::Choice(m), false) => prefs[k] = Some(*m),
                        (Answer::Text(t), true) => comments[k] = Some(t.clone()),
                        _ => return Err(bad()),
                    }
                } else {
                    return Err(bad());
                }
            }
        }
        let subject = subject.ok_or_else(|| invalid("no logs".into()))?;
        let block = |m: Modality| -> Result<SusResponse, MetricsError> {
            let items = sus
                .get(&m)
                .ok_or_else(|| invalid(format!("no SUS answers for {}", m.label())))?;
            let scores: Vec<i64> = items.values().copied().collect();
            SusResponse::from_scores(&scores)
        };
        let mut preferences = [Modality::MrReplica; 3];
        for (k, p) in prefs.iter().enumerate() {
            preferences[k] = p.ok_or_else(|| invalid(format!("c{} unanswered", k + 1)))?;
        }
        Ok(Self {
            subject,
            mr_replica: block(Modality::MrReplica)?,
            joypad: block(Modality::Joypad)?,
            preferences,
            comments,
        })
    }
}
