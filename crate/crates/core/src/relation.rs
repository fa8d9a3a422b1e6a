//! The fifteen eventuality relation types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Relation types between a head and a tail eventuality.
///
/// Fourteen discourse senses grouped into four categories plus the
/// sentence-level co-occurrence relation. Declaration order is the
/// canonical order used for sorting and for table columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationType {
    Precedence,
    Succession,
    Synchronous,
    Reason,
    Result,
    Condition,
    Contrast,
    Concession,
    Conjunction,
    Instantiation,
    Restatement,
    Alternative,
    ChosenAlternative,
    Exception,
    #[serde(rename = "Co-Occurrence")]
    CoOccurrence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationCategory {
    Temporal,
    Contingency,
    Comparison,
    Expansion,
    CoOccurrence,
}

impl RelationType {
    pub const ALL: [RelationType; 15] = [
        RelationType::Precedence,
        RelationType::Succession,
        RelationType::Synchronous,
        RelationType::Reason,
        RelationType::Result,
        RelationType::Condition,
        RelationType::Contrast,
        RelationType::Concession,
        RelationType::Conjunction,
        RelationType::Instantiation,
        RelationType::Restatement,
        RelationType::Alternative,
        RelationType::ChosenAlternative,
        RelationType::Exception,
        RelationType::CoOccurrence,
    ];

    /// The fourteen types a discourse connective can signal.
    pub fn discourse() -> impl Iterator<Item = RelationType> {
        Self::ALL.into_iter().filter(|t| t.is_discourse())
    }

    pub fn is_discourse(self) -> bool {
        self != RelationType::CoOccurrence
    }

    pub fn category(self) -> RelationCategory {
        use RelationType::*;
        match self {
            Precedence | Succession | Synchronous => RelationCategory::Temporal,
            Reason | Result | Condition => RelationCategory::Contingency,
            Contrast | Concession => RelationCategory::Comparison,
            Conjunction | Instantiation | Restatement | Alternative | ChosenAlternative
            | Exception => RelationCategory::Expansion,
            CoOccurrence => RelationCategory::CoOccurrence,
        }
    }

    pub fn name(self) -> &'static str {
        use RelationType::*;
        match self {
            Precedence => "Precedence",
            Succession => "Succession",
            Synchronous => "Synchronous",
            Reason => "Reason",
            Result => "Result",
            Condition => "Condition",
            Contrast => "Contrast",
            Concession => "Concession",
            Conjunction => "Conjunction",
            Instantiation => "Instantiation",
            Restatement => "Restatement",
            Alternative => "Alternative",
            ChosenAlternative => "ChosenAlternative",
            Exception => "Exception",
            CoOccurrence => "Co-Occurrence",
        }
    }

    /// Column-safe identifier (no hyphen).
    pub fn column(self) -> &'static str {
        match self {
            RelationType::CoOccurrence => "Co_Occurrence",
            other => other.name(),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown relation type `{0}`")]
pub struct UnknownRelationType(pub String);

impl FromStr for RelationType {
    type Err = UnknownRelationType;

    /// Case-insensitive; accepts `Co-Occurrence`, `CoOccurrence` and
    /// `Co_Occurrence`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        RelationType::ALL
            .into_iter()
            .find(|t| t.name().replace('-', "").to_lowercase() == key)
            .ok_or_else(|| UnknownRelationType(s.to_string()))
    }
}
