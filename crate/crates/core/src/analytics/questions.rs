//! Question-id registry for the study questionnaire.
//!
//! Background answers (questions 1 to 5) are fixed columns of every row.
//! Everything else is keyed by id: `exp_` before the hands-on part,
//! `xp_` after it.

use crate::model::{DataKind, InputModality};
use InputModality::{Gesture, Pen, Speech, Touch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuestionKind {
    /// Order the listed modalities, 1 = top.
    Rank(&'static [InputModality]),
    Numeric,
    /// Agreement scale 1..=max.
    Likert { max: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Question {
    pub id: &'static str,
    /// Number on the printed questionnaire.
    pub number: u8,
    pub kind: QuestionKind,
    pub text: &'static str,
}

const FOUR: &[InputModality] = &[Touch, Gesture, Speech, Pen];
const CONSTRAINT: &[InputModality] = &[Touch, Speech];

const fn rank(id: &'static str, number: u8, modalities: &'static [InputModality], text: &'static str) -> Question {
    Question {
        id,
        number,
        kind: QuestionKind::Rank(modalities),
        text,
    }
}

const fn likert(id: &'static str, number: u8, max: u8, text: &'static str) -> Question {
    Question {
        id,
        number,
        kind: QuestionKind::Likert { max },
        text,
    }
}

const fn numeric(id: &'static str, number: u8, text: &'static str) -> Question {
    Question {
        id,
        number,
        kind: QuestionKind::Numeric,
        text,
    }
}

pub const QUESTIONS: &[Question] = &[
    numeric("exp_time", 6, "minutes to teach a pick and place task with current production systems"),
    rank("exp_object", 7, FOUR, "preference: select an object"),
    rank("exp_location", 8, FOUR, "preference: set a location to place an object"),
    rank("exp_constraints", 9, CONSTRAINT, "preference: set assembly constraints"),
    rank("exp_point", 10, FOUR, "preference: select a point on the object"),
    rank("exp_edge", 11, FOUR, "preference: select an edge on the object"),
    rank("xp_load", 12, FOUR, "cognitive load, 1 = highest"),
    rank("xp_object", 13, FOUR, "preference: select an object"),
    rank("xp_location", 14, FOUR, "preference: set a location to place an object"),
    rank("xp_constraints", 15, CONSTRAINT, "preference: set assembly constraints"),
    rank("xp_point", 16, FOUR, "preference: select a point on the object"),
    rank("xp_edge", 17, FOUR, "preference: select an edge on the object"),
    likert("xp_met_modalities", 18, 5, "using the input modalities was (1 = a lot easier than expected)"),
    likert("xp_met_touch", 18, 5, "touch input was"),
    likert("xp_met_speech", 18, 5, "speech input was"),
    likert("xp_met_gesture", 18, 5, "gesture input was"),
    likert("xp_met_pen", 18, 5, "input by pen was"),
    likert("xp_met_system", 18, 5, "overall, using the system was"),
    numeric("xp_time_saving", 19, "estimated time saving over a teach pendant, percent"),
    likert("xp_fun", 20, 6, "programming with several modalities is fun"),
    likert("xp_preselect", 20, 6, "the system should preselect the modality"),
    likert("xp_natural", 20, 6, "using the system is natural"),
    likert("xp_speech_industrial", 20, 6, "speech is accurate enough for loud environments"),
    likert("xp_fewer_modalities", 20, 6, "fewer modalities feel more secure"),
    likert("xp_intuitive_speech", 20, 6, "speech input is intuitive"),
    likert("xp_intuitive_pen", 20, 6, "pen input is intuitive"),
    likert("xp_intuitive_touch", 20, 6, "touch input is intuitive"),
    likert("xp_intuitive_gesture", 20, 6, "gesture input is intuitive"),
    likert("xp_intuitive_keyboard", 20, 6, "keyboard and mouse are intuitive"),
    likert("xp_difficult", 20, 6, "it was difficult to understand the modalities"),
    likert("xp_satisfied_ease", 20, 6, "satisfied with the ease of completing the tasks"),
    likert("xp_satisfied_time", 20, 6, "satisfied with the time the tasks took"),
    likert("xp_job_quicker", 21, 6, "would let me accomplish tasks more quickly"),
    likert("xp_job_performance", 21, 6, "would improve my job performance"),
    likert("xp_job_productivity", 21, 6, "would increase my productivity"),
    likert("xp_job_slower", 21, 6, "would slow me down"),
    likert("xp_job_easier", 21, 6, "would make my job easier"),
    likert("xp_job_useful", 21, 6, "would be useful in my job"),
    likert("xp_job_learn", 21, 6, "learning to operate it would be easy"),
    likert("xp_job_clear", 21, 6, "interaction would be clear"),
    likert("xp_job_complicated", 21, 6, "would make my job more complicated"),
    likert("xp_job_skillful", 21, 6, "easy to become skillful"),
    likert("xp_job_difficult", 21, 6, "would be difficult to use"),
];

pub fn question(id: &str) -> Option<&'static Question> {
    QUESTIONS.iter().find(|q| q.id == id)
}

/// Experience-phase preference questions and the data type each one ranks.
pub fn default_export_map() -> Vec<(&'static str, DataKind)> {
    vec![
        ("xp_object", DataKind::ObjectModelRef),
        ("xp_location", DataKind::Location3D),
        ("xp_constraints", DataKind::ConstraintSet),
        ("xp_point", DataKind::VertexRef),
        ("xp_edge", DataKind::EdgeRef),
    ]
}
