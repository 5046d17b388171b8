use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use symlab::effects::Effect;
use symlab::matrixcore::{c, CMatrix, HermitianMatrix, Tolerance};
use symlab::projective::Projection;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hermitian,
    Effect,
    Projection,
    Unitary,
}

/// JSON matrix: `entries[i][j] = [re, im]`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    /// Absolute tolerance for the kind check; the command's tolerance otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix, kind: Option<Kind>) -> Self {
        let entries = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        MatrixFile { n: m.nrows(), entries, kind, tol: None }
    }

    pub fn from_hermitian(h: &HermitianMatrix, kind: Kind) -> Self {
        Self::from_matrix(h.matrix(), Some(kind))
    }

    pub fn parse(text: &str, tol: &Tolerance) -> Result<Self, CliError> {
        let f: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        f.validate(tol)?;
        Ok(f)
    }

    pub fn read(path: &Path, tol: &Tolerance) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, tol).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn matrix(&self) -> Result<CMatrix, CliError> {
        if self.n == 0 || self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(CliError::Parse(format!("entries do not form a {0}x{0} array", self.n)));
        }
        Ok(CMatrix::from_fn(self.n, self.n, |i, j| {
            let [x, y] = self.entries[i][j];
            c(x, y)
        }))
    }

    fn file_tol(&self, tol: &Tolerance) -> Result<Tolerance, CliError> {
        match self.tol {
            Some(atol) => Ok(Tolerance { atol, ..*tol }.validated()?),
            None => Ok(*tol),
        }
    }

    /// Shape and kind invariants.
    pub fn validate(&self, tol: &Tolerance) -> Result<(), CliError> {
        let m = self.matrix()?;
        let tol = self.file_tol(tol)?;
        tol.check_dim(self.n)?;
        match self.kind {
            Some(Kind::Unitary) => {
                let defect = (m.adjoint() * &m - CMatrix::identity(self.n, self.n)).norm();
                if defect > tol.effective(1.0) * 10.0 {
                    return Err(CliError::Parse(format!("not unitary (defect {defect:e})")));
                }
            }
            Some(k) => {
                let defect = (&m - m.adjoint()).norm();
                if defect > tol.effective(m.norm()) * 10.0 {
                    return Err(CliError::Parse(format!("not hermitian (defect {defect:e})")));
                }
                let h = HermitianMatrix::from_matrix(m)?;
                match k {
                    Kind::Effect => {
                        Effect::new(h, &tol)?;
                    }
                    Kind::Projection => {
                        Projection::new(h, &tol)?;
                    }
                    _ => {}
                }
            }
            None => {}
        }
        Ok(())
    }

    pub fn hermitian(&self, tol: &Tolerance) -> Result<HermitianMatrix, CliError> {
        if self.kind == Some(Kind::Unitary) {
            return Err(CliError::Parse("expected a hermitian matrix, found kind unitary".into()));
        }
        let m = self.matrix()?;
        let defect = (&m - m.adjoint()).norm();
        if defect > self.file_tol(tol)?.effective(m.norm()) * 10.0 {
            return Err(CliError::Parse(format!("not hermitian (defect {defect:e})")));
        }
        Ok(HermitianMatrix::from_matrix(m)?)
    }

    pub fn effect(&self, tol: &Tolerance) -> Result<Effect, CliError> {
        Ok(Effect::new(self.hermitian(tol)?, &self.file_tol(tol)?)?)
    }
}
