//! `responses.csv` loading.
//!
//! Columns: `id,age,gender,expertise,robotics,teachpad`, then any registry
//! questions. A rank question contributes one column per offered modality,
//! named `<question>.<Modality>`; numeric and Likert questions one column
//! named by the id. An empty cell is an unanswered question; a rank question
//! is either unanswered in all its columns or answered in all of them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::questions::{question, QuestionKind};
use super::AnalyticsError;
use crate::model::InputModality;

pub const BACKGROUND_COLUMNS: [&str; 6] = ["id", "age", "gender", "expertise", "robotics", "teachpad"];

macro_rules! labelled_enum {
    ($name:ident { $($variant:ident = $label:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.label().eq_ignore_ascii_case(s.trim()))
                    .ok_or_else(|| format!("{s:?} is not a valid {}", stringify!($name)))
            }
        }
    };
}

labelled_enum!(Gender { Male = "male", Female = "female" });
labelled_enum!(Expertise {
    Beginner = "Beginner",
    Basic = "Basic",
    Advanced = "Advanced",
    Expert = "Expert",
});
labelled_enum!(Robotics { NotMuch = "NotMuch", Hobby = "Hobby", ALot = "ALot" });
labelled_enum!(TeachPad { No = "No", Know = "Know", Used = "Used" });

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub id: String,
    pub age: u32,
    pub gender: Gender,
    pub expertise: Expertise,
    pub robotics: Robotics,
    pub teachpad: TeachPad,
    pub ranks: BTreeMap<String, BTreeMap<InputModality, u8>>,
    /// Numeric and Likert answers.
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResponseTable {
    pub rows: Vec<Response>,
}

impl ResponseTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

enum Column {
    Background(usize),
    Rank(&'static str, InputModality),
    Value(&'static str, QuestionKind),
}

fn classify(name: &str) -> Result<Column, String> {
    if let Some(i) = BACKGROUND_COLUMNS.iter().position(|c| *c == name) {
        return Ok(Column::Background(i));
    }
    if let Some((qid, m)) = name.split_once('.') {
        let q = question(qid).ok_or_else(|| format!("unknown question {qid:?}"))?;
        let QuestionKind::Rank(offered) = q.kind else {
            return Err(format!("{qid} is not a rank question"));
        };
        let m: InputModality = m.parse()?;
        if !offered.contains(&m) {
            return Err(format!("{qid} does not offer {m}"));
        }
        return Ok(Column::Rank(q.id, m));
    }
    let q = question(name).ok_or_else(|| format!("unknown column {name:?}"))?;
    if matches!(q.kind, QuestionKind::Rank(_)) {
        return Err(format!("rank question {name} needs per-modality columns"));
    }
    Ok(Column::Value(q.id, q.kind))
}

fn malformed(line: Option<u64>, message: impl Into<String>) -> AnalyticsError {
    AnalyticsError::MalformedCsv {
        line,
        message: message.into(),
    }
}

/// Parses a responses document. Rows whose rank answers are not a
/// permutation of 1..k are rejected with their 1-based data row number.
pub fn load_responses(text: &str) -> Result<ResponseTable, AnalyticsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(Some(1), e.to_string()))?
        .clone();
    if headers.iter().all(str::is_empty) {
        return Err(malformed(Some(1), "missing header"));
    }
    let mut columns = Vec::with_capacity(headers.len());
    for name in headers.iter() {
        if headers.iter().filter(|h| *h == name).count() > 1 {
            return Err(malformed(Some(1), format!("duplicate column {name:?}")));
        }
        columns.push(classify(name).map_err(|m| malformed(Some(1), m))?);
    }
    for needed in BACKGROUND_COLUMNS {
        if !headers.iter().any(|h| h == needed) {
            return Err(malformed(Some(1), format!("missing column {needed:?}")));
        }
    }
    let mut rank_questions: BTreeMap<&'static str, usize> = BTreeMap::new();
    for c in &columns {
        if let Column::Rank(q, _) = c {
            *rank_questions.entry(q).or_default() += 1;
        }
    }
    for (q, count) in &rank_questions {
        let QuestionKind::Rank(offered) = question(q).expect("classified").kind else {
            unreachable!()
        };
        if *count != offered.len() {
            return Err(malformed(
                Some(1),
                format!("{q} needs one column for each of {} modalities", offered.len()),
            ));
        }
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| malformed(e.position().map(|p| p.line()), e.to_string()))?;
        let line = record.position().map(|p| p.line());
        let mut background: [&str; 6] = [""; 6];
        let mut ranks: BTreeMap<String, BTreeMap<InputModality, Option<u8>>> = BTreeMap::new();
        let mut values = BTreeMap::new();
        for (col, cell) in columns.iter().zip(record.iter()) {
            match col {
                Column::Background(j) => background[*j] = cell,
                Column::Rank(q, m) => {
                    let r = if cell.is_empty() {
                        None
                    } else {
                        Some(cell.parse::<u8>().map_err(|_| AnalyticsError::InvalidRank {
                            row,
                            question: q.to_string(),
                            detail: format!("{m} rank {cell:?} is not a small integer"),
                        })?)
                    };
                    ranks.entry(q.to_string()).or_default().insert(*m, r);
                }
                Column::Value(q, kind) => {
                    if cell.is_empty() {
                        continue;
                    }
                    let v: f64 = cell
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| malformed(line, format!("row {row}: {q} value {cell:?} is not a number")))?;
                    if let QuestionKind::Likert { max } = kind {
                        if v.fract() != 0.0 || v < 1.0 || v > f64::from(*max) {
                            return Err(malformed(line, format!("row {row}: {q} must be an integer in 1..={max}")));
                        }
                    }
                    values.insert(q.to_string(), v);
                }
            }
        }
        let field = |j: usize| background[j];
        let bad = |what: String| malformed(line, format!("row {row}: {what}"));
        if field(0).is_empty() {
            return Err(bad("empty id".into()));
        }
        let age: u32 = field(1)
            .parse()
            .map_err(|_| bad(format!("age {:?} is not a whole number", field(1))))?;
        let mut complete = BTreeMap::new();
        for (q, answers) in ranks {
            let given: Vec<_> = answers.iter().filter_map(|(m, r)| r.map(|r| (*m, r))).collect();
            if given.is_empty() {
                continue;
            }
            let k = answers.len();
            let mut seen: Vec<u8> = given.iter().map(|(_, r)| *r).collect();
            seen.sort_unstable();
            let expected: Vec<u8> = (1..=k as u8).collect();
            if given.len() != k || seen != expected {
                return Err(AnalyticsError::InvalidRank {
                    row,
                    question: q,
                    detail: format!("ranks {seen:?} are not a permutation of 1..={k}"),
                });
            }
            complete.insert(q, given.into_iter().collect());
        }
        rows.push(Response {
            id: field(0).to_string(),
            age,
            gender: field(2).parse().map_err(bad)?,
            expertise: field(3).parse().map_err(bad)?,
            robotics: field(4).parse().map_err(bad)?,
            teachpad: field(5).parse().map_err(bad)?,
            ranks: complete,
            values,
        });
    }
    Ok(ResponseTable { rows })
}
