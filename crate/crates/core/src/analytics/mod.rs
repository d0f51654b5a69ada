//! Questionnaire analytics: rank aggregation per question and modality,
//! descriptive statistics, segment comparison and export of a preference
//! table for the knowledge base.

mod questions;
mod responses;
pub mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use questions::{default_export_map, question, Question, QuestionKind, QUESTIONS};
pub use responses::{
    load_responses, Expertise, Gender, Response, ResponseTable, Robotics, TeachPad, BACKGROUND_COLUMNS,
};

use crate::kb::PreferenceTable;
use crate::model::{DataKind, InputModality};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("malformed CSV{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    MalformedCsv { line: Option<u64>, message: String },
    #[error("row {row}, {question}: {detail}")]
    InvalidRank {
        row: usize,
        question: String,
        detail: String,
    },
    #[error("unknown question {0:?}")]
    UnknownQuestion(String),
    #[error("{0} is not a {1} question")]
    WrongKind(String, &'static str),
    #[error("no answers for {question} in segment {segment}")]
    EmptySegment { question: String, segment: String },
    #[error("invalid segment {0:?}")]
    InvalidSegment(String),
}

/// Splits used for segment comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Dimension {
    Gender,
    /// Expert against everyone else.
    Expertise,
    /// ALot against everyone else.
    Robotics,
    /// Used or Know against No.
    TeachPad,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Gender,
        Dimension::Expertise,
        Dimension::Robotics,
        Dimension::TeachPad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Gender => "gender",
            Dimension::Expertise => "expertise",
            Dimension::Robotics => "robotics",
            Dimension::TeachPad => "teachpad",
        }
    }

    fn labels(self) -> [&'static str; 2] {
        match self {
            Dimension::Gender => ["female", "male"],
            Dimension::Expertise => ["expert", "non-expert"],
            Dimension::Robotics => ["a-lot", "rest"],
            Dimension::TeachPad => ["known", "no"],
        }
    }

    pub fn segments(self) -> [Segment; 2] {
        [Segment { dimension: self, side: 0 }, Segment { dimension: self, side: 1 }]
    }
}

impl FromStr for Dimension {
    type Err = AnalyticsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| AnalyticsError::InvalidSegment(s.to_string()))
    }
}

/// One side of a [`Dimension`], written `dimension=label`, e.g.
/// `gender=female` or `expertise=non-expert`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub dimension: Dimension,
    side: u8,
}

impl Segment {
    pub fn label(&self) -> &'static str {
        self.dimension.labels()[self.side as usize]
    }

    pub fn contains(&self, r: &Response) -> bool {
        let first = match self.dimension {
            Dimension::Gender => r.gender == Gender::Female,
            Dimension::Expertise => r.expertise == Expertise::Expert,
            Dimension::Robotics => r.robotics == Robotics::ALot,
            Dimension::TeachPad => r.teachpad != TeachPad::No,
        };
        first == (self.side == 0)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.dimension.name(), self.label())
    }
}

impl FromStr for Segment {
    type Err = AnalyticsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || AnalyticsError::InvalidSegment(s.to_string());
        let (dim, label) = s.split_once('=').ok_or_else(invalid)?;
        let dimension: Dimension = dim.trim().parse().map_err(|_| invalid())?;
        let side = dimension
            .labels()
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label.trim()))
            .ok_or_else(invalid)?;
        Ok(Segment {
            dimension,
            side: side as u8,
        })
    }
}

impl Serialize for Segment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalityStats {
    pub modality: InputModality,
    pub mean: f64,
    pub sd: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankSummary {
    pub question: String,
    pub n: usize,
    /// In the question's enumeration order.
    pub modalities: Vec<ModalityStats>,
    /// Ascending mean rank; ties keep enumeration order.
    pub ordering: Vec<InputModality>,
}

impl RankSummary {
    pub fn get(&self, m: InputModality) -> Option<&ModalityStats> {
        self.modalities.iter().find(|s| s.modality == m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
    pub min: f64,
    pub max: f64,
}

fn rank_question(id: &str) -> Result<&'static [InputModality], AnalyticsError> {
    match question(id).map(|q| q.kind) {
        None => Err(AnalyticsError::UnknownQuestion(id.to_string())),
        Some(QuestionKind::Rank(offered)) => Ok(offered),
        Some(_) => Err(AnalyticsError::WrongKind(id.to_string(), "rank")),
    }
}

fn segment_name(filter: Option<&Segment>) -> String {
    filter.map_or_else(|| "all".to_string(), |s| s.to_string())
}

/// Mean and sample standard deviation of each modality's rank over the
/// rows that answered `question` (and fall in `filter`).
pub fn rank_summary(
    table: &ResponseTable,
    question: &str,
    filter: Option<&Segment>,
) -> Result<RankSummary, AnalyticsError> {
    let offered = rank_question(question)?;
    let answers: Vec<&BTreeMap<InputModality, u8>> = table
        .rows
        .iter()
        .filter(|r| filter.is_none_or(|s| s.contains(r)))
        .filter_map(|r| r.ranks.get(question))
        .collect();
    if answers.is_empty() {
        return Err(AnalyticsError::EmptySegment {
            question: question.to_string(),
            segment: segment_name(filter),
        });
    }
    let mut enumerated = offered.to_vec();
    enumerated.sort();
    let modalities: Vec<ModalityStats> = enumerated
        .iter()
        .map(|&m| {
            let xs: Vec<f64> = answers.iter().map(|a| f64::from(a[&m])).collect();
            ModalityStats {
                modality: m,
                mean: stats::mean(&xs).expect("non-empty"),
                sd: stats::sample_sd(&xs),
                n: xs.len(),
            }
        })
        .collect();
    let mut ordering: Vec<&ModalityStats> = modalities.iter().collect();
    // stable sort keeps enumeration order on ties
    ordering.sort_by(|a, b| a.mean.total_cmp(&b.mean));
    let ordering = ordering.into_iter().map(|s| s.modality).collect();
    Ok(RankSummary {
        question: question.to_string(),
        n: answers.len(),
        modalities,
        ordering,
    })
}

/// A segment and its summary, or why it has none.
pub type SegmentSummary = (Segment, Result<RankSummary, AnalyticsError>);

/// One summary per side of `dimension`; an empty side is an error for that
/// side only.
pub fn segment_compare(
    table: &ResponseTable,
    question: &str,
    dimension: Dimension,
) -> Result<Vec<SegmentSummary>, AnalyticsError> {
    rank_question(question)?;
    Ok(dimension
        .segments()
        .into_iter()
        .map(|s| (s, rank_summary(table, question, Some(&s))))
        .collect())
}

/// Statistics of a numeric or Likert question.
pub fn numeric_summary(
    table: &ResponseTable,
    question_id: &str,
    filter: Option<&Segment>,
) -> Result<NumericSummary, AnalyticsError> {
    match question(question_id).map(|q| q.kind) {
        None => return Err(AnalyticsError::UnknownQuestion(question_id.to_string())),
        Some(QuestionKind::Rank(_)) => {
            return Err(AnalyticsError::WrongKind(question_id.to_string(), "numeric or Likert"))
        }
        Some(_) => {}
    }
    let xs: Vec<f64> = table
        .rows
        .iter()
        .filter(|r| filter.is_none_or(|s| s.contains(r)))
        .filter_map(|r| r.values.get(question_id).copied())
        .collect();
    let s = stats::summarize(&xs).ok_or_else(|| AnalyticsError::EmptySegment {
        question: question_id.to_string(),
        segment: segment_name(filter),
    })?;
    Ok(NumericSummary {
        n: s.n,
        mean: s.mean,
        sd: s.sd,
        min: s.min,
        max: s.max,
    })
}

/// Builds a preference table from rank questions: each mapped question's
/// ordering becomes the row of its data type. Questions not in `map` are
/// ignored.
pub fn export_preference_table(
    table: &ResponseTable,
    map: &[(&str, DataKind)],
) -> Result<PreferenceTable, AnalyticsError> {
    let mut rows = BTreeMap::new();
    for (q, kind) in map {
        let summary = rank_summary(table, q, None)?;
        rows.insert(*kind, summary.ordering);
    }
    Ok(PreferenceTable::from_rows(rows).expect("orderings are permutations"))
}
