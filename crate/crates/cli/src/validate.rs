//! Per-record parse, tautness and veering checks.

use serde::Serialize;
use taut_core::error::VeeringError;
use taut_core::veering::{check_fans, veer_and_hinge, CuspComplex};
use taut_core::{parse_triangulation, TriError};

use crate::error::CliError;
use crate::input::Record;
use crate::pool;
use crate::SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordVerdict {
    pub id: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tetrahedra: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub schema: &'static str,
    pub records: Vec<RecordVerdict>,
    pub failures: usize,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

fn veering_axiom(e: &VeeringError) -> &'static str {
    match e {
        VeeringError::NotPseudohyperbolic { .. } => "pseudohyperbolic",
        VeeringError::InconsistentVeer { .. } => "veer-consistency",
        VeeringError::Internal { .. } => "internal",
    }
}

pub fn check_record(r: &Record) -> RecordVerdict {
    let fail = |axiom: &str, detail: String| RecordVerdict {
        id: r.id.clone(),
        verdict: Verdict::Fail,
        axiom: Some(axiom.to_string()),
        detail: Some(detail),
        tetrahedra: None,
    };
    let tri = match parse_triangulation(&r.text) {
        Ok(t) => t,
        Err(e @ TriError::Parse(_)) => return fail("parse", e.to_string()),
        Err(e) => return fail(&e.axiom().map_or("parse".into(), |a| a.to_string()), e.to_string()),
    };
    let cx = match CuspComplex::build(&tri) {
        Ok(cx) => cx,
        Err(e) => return fail(veering_axiom(&e), e.to_string()),
    };
    let vd = match veer_and_hinge(&tri, &cx) {
        Ok(v) => v,
        Err(e) => return fail(veering_axiom(&e), e.to_string()),
    };
    if let Some(v) = check_fans(&tri, &cx, &vd).first() {
        return fail("fans", format!("{v:?}"));
    }
    RecordVerdict {
        id: r.id.clone(),
        verdict: Verdict::Pass,
        axiom: None,
        detail: None,
        tetrahedra: Some(tri.n_tets()),
    }
}

pub fn cmd_validate(records: &[Record], jobs: usize) -> Result<ValidationReport, CliError> {
    let records = pool::ordered(jobs, records, check_record)?;
    let failures = records.iter().filter(|r| r.verdict == Verdict::Fail).count();
    Ok(ValidationReport {
        schema: SCHEMA,
        records,
        failures,
    })
}
