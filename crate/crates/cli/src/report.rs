use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use symlab::matrixcore::HermitianMatrix;
use symlab::suites::{Detail, SuiteCounterexample, SuiteVerdict};

use crate::matrix_file::{Kind, MatrixFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportVerdict {
    Pass,
    Fail,
    Unknown,
}

impl ReportVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            ReportVerdict::Pass => 0,
            ReportVerdict::Fail => 1,
            ReportVerdict::Unknown => 3,
        }
    }
}

impl From<SuiteVerdict> for ReportVerdict {
    fn from(v: SuiteVerdict) -> Self {
        match v {
            SuiteVerdict::Pass => ReportVerdict::Pass,
            SuiteVerdict::Fail => ReportVerdict::Fail,
            SuiteVerdict::Unknown => ReportVerdict::Unknown,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Residuals {
    pub max: f64,
    pub mean: f64,
}

/// A violation in replayable form. When `relation` names a `check`
/// relation, running `check` on `A`, `B` (and on `phi(A)`, `phi(B)` when
/// present) reproduces it.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleOut {
    pub relation: String,
    pub expected: String,
    pub observed: String,
    pub matrices: BTreeMap<String, MatrixFile>,
}

impl CounterexampleOut {
    pub fn new(relation: &str, expected: impl ToString, observed: impl ToString, matrices: Vec<(&str, &HermitianMatrix)>) -> Self {
        CounterexampleOut {
            relation: relation.to_string(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            matrices: matrices
                .into_iter()
                .map(|(k, m)| (k.to_string(), MatrixFile::from_hermitian(m, Kind::Hermitian)))
                .collect(),
        }
    }
}

impl From<SuiteCounterexample> for CounterexampleOut {
    fn from(c: SuiteCounterexample) -> Self {
        CounterexampleOut::new(
            &c.relation,
            &c.expected,
            &c.observed,
            c.matrices.iter().map(|(k, m)| (k.as_str(), m)).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub dimension: Option<usize>,
    pub trials: Option<usize>,
    pub verdict: ReportVerdict,
    pub residuals: Residuals,
    pub counterexample: Option<CounterexampleOut>,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
    pub details: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: ReportVerdict) -> Self {
        Report {
            command: command.into(),
            seed: None,
            dimension: None,
            trials: None,
            verdict,
            residuals: Residuals::default(),
            counterexample: None,
            wall_time: 0.0,
            details: Map::new(),
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn detail_value(d: &Detail) -> Value {
    match d {
        Detail::Int(i) => Value::from(*i),
        Detail::Float(x) => Value::from(*x),
        Detail::Bool(b) => Value::from(*b),
        Detail::Text(s) => Value::from(s.as_str()),
    }
}
