use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Overall result of a subcommand, mapped onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Pass => 0,
            Status::Fail => 1,
            Status::Indeterminate => 2,
        }
    }

    /// Fail dominates indeterminate, which dominates pass.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Pass, _) | (_, Pass) => Pass,
            _ => Ok,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetUse {
    /// `None` for commands that run no bounded search.
    pub limit: Option<u64>,
    /// `None` when the search does not report its node count.
    pub used: Option<u64>,
}

impl BudgetUse {
    pub fn new(limit: u64, used: Option<u64>) -> Self {
        BudgetUse {
            limit: Some(limit),
            used,
        }
    }
}

/// Machine-readable record of one invocation. Two runs with equal inputs and
/// limits serialise identically once `timing_ms` is removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Every effective parameter, defaults included.
    pub params: Value,
    /// Input name to `sha256:<hex>` of its canonical serialisation.
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    pub results: Value,
    pub budget: BudgetUse,
    pub timing_ms: u64,
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
