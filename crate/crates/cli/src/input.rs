//! Reading records from census files, gluing documents or the command line.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// One triangulation to process, with a stable identifier for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub id: String,
    pub text: String,
}

/// Split file contents into records. A file whose first non-blank character
/// is `{` holds one gluing document; otherwise each non-blank line that does
/// not start with `#` is a census record.
pub fn split_records(source: &str, contents: &str) -> Vec<Record> {
    let trimmed = contents.trim_start();
    if trimmed.starts_with('{') {
        return vec![Record {
            id: source.to_string(),
            text: trimmed.to_string(),
        }];
    }
    contents
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Record {
            id: l.to_string(),
            text: l.to_string(),
        })
        .collect()
}

/// Inputs are file paths; an argument naming no file is taken as a literal record.
pub fn read_inputs<S: AsRef<str>>(inputs: &[S]) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for arg in inputs {
        let arg = arg.as_ref();
        let path = Path::new(arg);
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io {
                path: arg.to_string(),
                source: e,
            })?;
            out.extend(split_records(arg, &text));
        } else if arg.contains('/') || arg.contains(std::path::MAIN_SEPARATOR) {
            return Err(CliError::MissingInput(arg.to_string()));
        } else {
            out.extend(split_records(arg, arg));
        }
    }
    Ok(out)
}
