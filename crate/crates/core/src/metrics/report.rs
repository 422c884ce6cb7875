//! Study-level aggregation: per-modality mean ± SD, paired t-tests, SUS
//! summaries and preference proportions, rendered as a text table, a
//! delimited table and plot-ready data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::questionnaire::Questionnaire;
use super::stats::{mean_sd, paired_t_test, proportion, TTestResult};
use super::sus::{sus_score, SUS_ITEMS};
use super::timings::{SessionRecord, SessionTimings};
use super::MetricsError;
use crate::orchestrator::{Modality, TaskKind, Which};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TotalTime,
    RobotTimeDrone,
    RobotTimeAgv,
    /// Per subject, the mean over the session's two tasks.
    ReactionTime,
    SusScore,
}

impl Metric {
    pub const TIMINGS: [Metric; 4] = [
        Metric::TotalTime,
        Metric::RobotTimeDrone,
        Metric::RobotTimeAgv,
        Metric::ReactionTime,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::TotalTime => "total_time",
            Metric::RobotTimeDrone => "robot_time_drone",
            Metric::RobotTimeAgv => "robot_time_agv",
            Metric::ReactionTime => "reaction_time",
            Metric::SusScore => "sus_score",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::TotalTime => "total time [s]",
            Metric::RobotTimeDrone => "robot time, drone [s]",
            Metric::RobotTimeAgv => "robot time, AGV [s]",
            Metric::ReactionTime => "reaction time [s]",
            Metric::SusScore => "SUS score",
        }
    }

    fn of(self, r: &SessionRecord) -> Result<f64, MetricsError> {
        let robot = |kind| {
            r.robot_time(kind).ok_or_else(|| {
                MetricsError::MalformedLog(format!(
                    "{} session of {} lacks a {kind:?} task",
                    r.modality.label(),
                    r.subject
                ))
            })
        };
        match self {
            Metric::TotalTime => Ok(r.timings.total_time),
            Metric::RobotTimeDrone => robot(TaskKind::DroneLift),
            Metric::RobotTimeAgv => robot(TaskKind::AgvRoute),
            Metric::ReactionTime => Ok(r.mean_reaction()),
            Metric::SusScore => unreachable!("SUS comes from questionnaires"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    fn of(xs: &[f64]) -> Result<Self, MetricsError> {
        let (mean, sd) = mean_sd(xs)?;
        Ok(Self {
            mean,
            sd,
            n: xs.len(),
        })
    }

    /// `208.7 ± 58.5`
    pub fn display(&self, decimals: usize) -> String {
        format!("{:.*} ± {:.*}", decimals, self.mean, decimals, self.sd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TestOutcome {
    Computed(TTestResult),
    /// Every subject showed the same difference between modalities.
    ZeroVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: Metric,
    pub mr_replica: Summary,
    pub joypad: Summary,
    /// Paired test of MR minus joypad.
    pub test: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusItemRow {
    /// 1-based item number.
    pub item: usize,
    pub mr_replica: Summary,
    pub joypad: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusSummary {
    pub total: MetricRow,
    pub items: Vec<SusItemRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRow {
    /// `c1`..`c3`
    pub question: String,
    /// Percent of subjects preferring each modality.
    pub mr_replica: f64,
    pub joypad: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub metric: Metric,
    pub modality: Modality,
    pub subject: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub subjects: usize,
    pub metrics: Vec<MetricRow>,
    pub sus: Option<SusSummary>,
    pub preferences: Vec<PreferenceRow>,
    pub plot: Vec<PlotPoint>,
}

impl StudyReport {
    pub fn metric(&self, m: Metric) -> Option<&MetricRow> {
        self.metrics
            .iter()
            .chain(self.sus.as_ref().map(|s| &s.total))
            .find(|r| r.metric == m)
    }
}

fn metric_row(metric: Metric, mr: &[f64], joy: &[f64]) -> Result<MetricRow, MetricsError> {
    let test = match paired_t_test(mr, joy) {
        Ok(t) => TestOutcome::Computed(t),
        Err(MetricsError::ZeroVariance) => TestOutcome::ZeroVariance,
        Err(e) => return Err(e),
    };
    Ok(MetricRow {
        metric,
        mr_replica: Summary::of(mr)?,
        joypad: Summary::of(joy)?,
        test,
    })
}

fn modality_slot(m: Modality) -> usize {
    match m {
        Modality::MrReplica => 0,
        Modality::Joypad => 1,
    }
}

/// Aggregates sessions (two per subject, one per modality) and optional
/// questionnaires into a study report. Tests pair values within subject.
pub fn summarize_study(
    sessions: &[SessionRecord],
    questionnaires: &[Questionnaire],
) -> Result<StudyReport, MetricsError> {
    let mut by_subject: BTreeMap<&str, [Option<&SessionRecord>; 2]> = BTreeMap::new();
    for s in sessions {
        let slot = &mut by_subject.entry(&s.subject).or_default()[modality_slot(s.modality)];
        if slot.is_some() {
            return Err(MetricsError::DuplicateSession {
                subject: s.subject.clone(),
                modality: s.modality,
            });
        }
        *slot = Some(s);
    }
    let mut pairs = Vec::with_capacity(by_subject.len());
    for (subject, slots) in &by_subject {
        match slots {
            [Some(mr), Some(joy)] => pairs.push((*subject, *mr, *joy)),
            _ => return Err(MetricsError::UnpairedSubject(subject.to_string())),
        }
    }

    let mut plot = Vec::new();
    let mut metrics = Vec::new();
    for metric in Metric::TIMINGS {
        let mut mr = Vec::with_capacity(pairs.len());
        let mut joy = Vec::with_capacity(pairs.len());
        for (subject, a, b) in &pairs {
            let (x, y) = (metric.of(a)?, metric.of(b)?);
            mr.push(x);
            joy.push(y);
            for (modality, value) in [(Modality::MrReplica, x), (Modality::Joypad, y)] {
                plot.push(PlotPoint {
                    metric,
                    modality,
                    subject: subject.to_string(),
                    value,
                });
            }
        }
        metrics.push(metric_row(metric, &mr, &joy)?);
    }

    let (sus, preferences) = if questionnaires.is_empty() {
        (None, Vec::new())
    } else {
        summarize_questionnaires(questionnaires, &mut plot)?
    };

    Ok(StudyReport {
        subjects: pairs.len(),
        metrics,
        sus,
        preferences,
        plot,
    })
}

fn summarize_questionnaires(
    qs: &[Questionnaire],
    plot: &mut Vec<PlotPoint>,
) -> Result<(Option<SusSummary>, Vec<PreferenceRow>), MetricsError> {
    let mut sorted: Vec<&Questionnaire> = qs.iter().collect();
    sorted.sort_by(|a, b| a.subject.cmp(&b.subject));
    if let Some(w) = sorted.windows(2).find(|w| w[0].subject == w[1].subject) {
        return Err(MetricsError::InvalidQuestionnaire(format!(
            "two questionnaires for {}",
            w[0].subject
        )));
    }

    let scores = |m: Modality| {
        sorted
            .iter()
            .map(|q| sus_score(q.sus(m)))
            .collect::<Vec<_>>()
    };
    let (mr, joy) = (scores(Modality::MrReplica), scores(Modality::Joypad));
    for (q, (x, y)) in sorted.iter().zip(mr.iter().zip(&joy)) {
        for (modality, value) in [(Modality::MrReplica, *x), (Modality::Joypad, *y)] {
            plot.push(PlotPoint {
                metric: Metric::SusScore,
                modality,
                subject: q.subject.clone(),
                value,
            });
        }
    }
    let total = metric_row(Metric::SusScore, &mr, &joy)?;

    let mut items = Vec::with_capacity(SUS_ITEMS);
    for i in 0..SUS_ITEMS {
        let col = |m: Modality| {
            sorted
                .iter()
                .map(|q| f64::from(q.sus(m).items()[i]))
                .collect::<Vec<_>>()
        };
        items.push(SusItemRow {
            item: i + 1,
            mr_replica: Summary::of(&col(Modality::MrReplica))?,
            joypad: Summary::of(&col(Modality::Joypad))?,
        });
    }

    let n = sorted.len();
    let mut preferences = Vec::with_capacity(3);
    for k in 0..3 {
        let mr_count = sorted
            .iter()
            .filter(|q| q.preferences[k] == Modality::MrReplica)
            .count();
        preferences.push(PreferenceRow {
            question: format!("c{}", k + 1),
            mr_replica: proportion(mr_count, n)?,
            joypad: proportion(n - mr_count, n)?,
            n,
        });
    }
    Ok((Some(SusSummary { total, items }), preferences))
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "< 0.001".into()
    } else {
        format!("{p:.4}")
    }
}

fn table_row(out: &mut String, row: &MetricRow) {
    let (t, df, p) = match &row.test {
        TestOutcome::Computed(r) => (
            format!("{:.3}", r.t_stat),
            r.df.to_string(),
            format_p(r.p_two_sided),
        ),
        TestOutcome::ZeroVariance => ("-".into(), "-".into(), "zero variance".into()),
    };
    let _ = writeln!(
        out,
        "{:<24}{:<18}{:<18}{:>8}{:>5}  {}",
        row.metric.label(),
        row.mr_replica.display(1),
        row.joypad.display(1),
        t,
        df,
        p
    );
}

/// Human-readable report.
pub fn render_table(r: &StudyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Study report: {} subjects, paired t-test of MR-based vs joypad\n",
        r.subjects
    );
    let _ = writeln!(
        out,
        "{:<24}{:<18}{:<18}{:>8}{:>5}  p",
        "metric", "MR-based", "joypad", "t", "df"
    );
    for row in &r.metrics {
        table_row(&mut out, row);
    }
    if let Some(sus) = &r.sus {
        table_row(&mut out, &sus.total);
        let _ = writeln!(out, "\nSUS items (1-5)");
        for it in &sus.items {
            let _ = writeln!(
                out,
                "{:<24}{:<18}{:<18}",
                format!("  q{}", it.item),
                it.mr_replica.display(2),
                it.joypad.display(2)
            );
        }
    }
    if !r.preferences.is_empty() {
        let _ = writeln!(out, "\nPreferred approach (n = {})", r.preferences[0].n);
        for p in &r.preferences {
            let _ = writeln!(
                out,
                "{:<24}{:<18}{:<18}",
                format!("  {}", p.question),
                format!("{:.1}%", p.mr_replica),
                format!("{:.1}%", p.joypad)
            );
        }
    }
    out
}

/// Delimited table: one row per metric, SUS item and preference question.
pub fn render_csv(r: &StudyReport) -> String {
    let mut out = String::from("metric,mr_mean,mr_sd,joypad_mean,joypad_sd,t,df,p\n");
    let rows = r.metrics.iter().chain(r.sus.as_ref().map(|s| &s.total));
    for row in rows {
        let (t, df, p) = match &row.test {
            TestOutcome::Computed(x) => (
                x.t_stat.to_string(),
                x.df.to_string(),
                x.p_two_sided.to_string(),
            ),
            TestOutcome::ZeroVariance => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{t},{df},{p}",
            row.metric.key(),
            row.mr_replica.mean,
            row.mr_replica.sd,
            row.joypad.mean,
            row.joypad.sd
        );
    }
    if let Some(sus) = &r.sus {
        for it in &sus.items {
            let _ = writeln!(
                out,
                "sus_q{},{},{},{},{},,,",
                it.item, it.mr_replica.mean, it.mr_replica.sd, it.joypad.mean, it.joypad.sd
            );
        }
    }
    for p in &r.preferences {
        let _ = writeln!(
            out,
            "preference_{},{},,{},,,,",
            p.question, p.mr_replica, p.joypad
        );
    }
    out
}

/// One row per (metric, modality, subject) for external plotting.
pub fn render_plot_data(r: &StudyReport) -> String {
    let mut out = String::from("metric,modality,subject,value\n");
    for p in &r.plot {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.metric.key(),
            p.modality.label(),
            p.subject,
            p.value
        );
    }
    out
}

/// Target sample mean and SD of one metric under each modality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortTarget {
    pub mr_replica: (f64, f64),
    pub joypad: (f64, f64),
}

/// Synthetic paired cohort whose sample means and SDs equal the targets (up
/// to rounding), for exercising the report. The within-subject pairing is
/// arbitrary, so t and p carry no meaning.
///
/// `targets` is indexed like [`Metric::TIMINGS`].
pub fn synthetic_cohort(
    targets: &[CohortTarget; 4],
    subjects: usize,
    seed: u64,
) -> Vec<SessionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = Vec::new();
    for t in targets {
        for (mean, sd) in [t.mr_replica, t.joypad] {
            let raw: Vec<f64> = (0..subjects).map(|_| rng.random_range(-1.0..1.0)).collect();
            let m = raw.iter().sum::<f64>() / subjects as f64;
            let s =
                (raw.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (subjects - 1) as f64).sqrt();
            columns.push(
                raw.iter()
                    .map(|x| mean + sd * (x - m) / s)
                    .collect::<Vec<_>>(),
            );
        }
    }
    let mut out = Vec::with_capacity(2 * subjects);
    #[allow(clippy::needless_range_loop)]
    for i in 0..subjects {
        for (slot, modality) in [(0, Modality::MrReplica), (1, Modality::Joypad)] {
            let v = |metric: usize| columns[2 * metric + slot][i];
            let tasks = vec![TaskKind::AgvRoute, TaskKind::DroneLift];
            out.push(SessionRecord {
                subject: format!("S{:02}", i + 1),
                session: if (i % 2 == 0) == (slot == 0) {
                    Which::First
                } else {
                    Which::Second
                },
                modality,
                tasks,
                timings: SessionTimings {
                    total_time: v(0),
                    robot_time: vec![v(2), v(1)],
                    reaction_time: vec![v(3), v(3)],
                },
            });
        }
    }
    out
}
