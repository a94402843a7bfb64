use std::fmt;

use serde::{Deserialize, Serialize};

/// A graded relevance judgment on the 3-point scale, plus the `-1` marker for
/// documents that could not be rendered and therefore were not judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Grade {
    Unjudgeable,
    NotRelevant,
    Somewhat,
    Highly,
}

impl Grade {
    pub const ALL: [Grade; 4] = [
        Grade::Unjudgeable,
        Grade::NotRelevant,
        Grade::Somewhat,
        Grade::Highly,
    ];

    pub fn value(self) -> i8 {
        match self {
            Grade::Unjudgeable => -1,
            Grade::NotRelevant => 0,
            Grade::Somewhat => 1,
            Grade::Highly => 2,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Grade::Unjudgeable),
            0 => Some(Grade::NotRelevant),
            1 => Some(Grade::Somewhat),
            2 => Some(Grade::Highly),
            _ => None,
        }
    }

    pub fn is_relevant(self) -> bool {
        self.value() >= 1
    }

    /// Relevance level used for gains. Unjudgeable documents count as
    /// nonrelevant.
    pub fn level(self) -> u32 {
        self.value().max(0) as u32
    }

    /// Two-point conflation: somewhat and highly relevant collapse to 1,
    /// everything else to 0.
    pub fn conflated(self) -> Grade {
        if self.is_relevant() {
            Grade::Somewhat
        } else {
            Grade::NotRelevant
        }
    }
}

impl TryFrom<i8> for Grade {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        Grade::from_value(v as i64).ok_or_else(|| format!("grade {v} outside {{-1, 0, 1, 2}}"))
    }
}

impl From<Grade> for i8 {
    fn from(g: Grade) -> i8 {
        g.value()
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}
