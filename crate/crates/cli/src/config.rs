use isopar::quartic::FocalSign;
use serde::Serialize;

use crate::cases::CaseSpec;
use crate::verdicts::CheckKind;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 20;

/// Everything that determines a report. The output path is excluded, so
/// file and stdout output are identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focal: Option<FocalSign>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            check: None,
            case: None,
            focal: None,
            seed: None,
            samples: None,
            tol: None,
        }
    }
}
