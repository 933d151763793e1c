//! Suite reports: `{suite, cases, residuals, tolerances, pass}` as JSON.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "convexval/report@1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub cases: Vec<String>,
    pub residuals: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report {
            schema: REPORT_SCHEMA.into(),
            suite: suite.into(),
            cases: Vec::new(),
            residuals: Vec::new(),
            tolerances: Vec::new(),
            pass: true,
            notes: Vec::new(),
        }
    }

    /// Records a case; it passes when `residual <= tolerance`. A non-finite
    /// residual fails and is stored as `f64::MAX` to stay valid JSON.
    pub fn case(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let ok = residual <= tolerance;
        self.cases.push(name.into());
        self.residuals.push(if residual.is_finite() { residual } else { f64::MAX });
        self.tolerances.push(tolerance);
        self.pass &= ok;
        ok
    }

    /// Boolean case: residual 0 when `ok`, 1 otherwise, tolerance 0.
    pub fn flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.case(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, f64, f64)> {
        self.cases
            .iter()
            .zip(&self.residuals)
            .zip(&self.tolerances)
            .filter(|((_, r), t)| r > t)
            .map(|((c, r), t)| (c.as_str(), *r, *t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_cases() {
        let mut r = Report::new("demo");
        assert!(r.case("a", 1e-12, 1e-9));
        assert!(r.pass);
        assert!(!r.case("b", f64::NAN, 1e-9));
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"suite\":\"demo\""));
    }
}
