use std::path::Path;

use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::report::ReportError;

use super::{EXIT_DATA, EXIT_IO, EXIT_NO_INPUT, EXIT_SOFTWARE, EXIT_USAGE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("{path}: {message}{}", field.as_ref().map(|f| format!(" (at {f})")).unwrap_or_default())]
    Parse { path: String, field: Option<String>, message: String },
    #[error("{}{message}", path.as_ref().map(|p| format!("{p}: ")).unwrap_or_default())]
    Data { path: Option<String>, message: String },
    #[error("report contains no rank certificate")]
    MissingCertificate { path: String },
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Unreadable { .. } => EXIT_NO_INPUT,
            CliError::Parse { .. } | CliError::Data { .. } | CliError::MissingCertificate { .. } => EXIT_DATA,
            CliError::Output { .. } => EXIT_IO,
            CliError::Internal(_) => EXIT_SOFTWARE,
        }
    }

    pub fn data(path: &Path, message: impl ToString) -> Self {
        CliError::Data { path: Some(path.display().to_string()), message: message.to_string() }
    }

    pub fn to_report_error(&self) -> ReportError {
        let (kind, path, field, message) = match self {
            CliError::Usage(m) => ("usage", None, None, m.clone()),
            CliError::Unreadable { path, message } => ("unreadable_input", Some(path.clone()), None, message.clone()),
            CliError::Parse { path, field, message } => ("parse", Some(path.clone()), field.clone(), message.clone()),
            CliError::Data { path, message } => ("invalid_data", path.clone(), None, message.clone()),
            CliError::MissingCertificate { path } => {
                ("missing_certificate", Some(path.clone()), Some("certificates".into()), self.to_string())
            }
            CliError::Output { path, message } => ("output", Some(path.clone()), None, message.clone()),
            CliError::Internal(m) => ("internal", None, None, m.clone()),
        };
        ReportError { kind: kind.into(), message, path, field }
    }
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Unreadable {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Deserializes `text` read from `path`; errors name the JSON path of the
/// offending field (e.g. `mats[1][0][2]`).
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        CliError::Parse {
            path: path.display().to_string(),
            field: (field != ".").then_some(field),
            message: e.into_inner().to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hullrank::AffinorBasis;

    #[test]
    fn parse_errors_name_the_field() {
        let text = concat!(
            r#"{"m":2,"n":2,"mode":"exact","mats":["#,
            r#"{"rows":2,"cols":2,"mode":"exact","entries":[[1,0],[0,1]]},"#,
            r#"{"rows":2,"cols":2,"mode":"exact","entries":[[0,"x"],[1,0]]}]}"#
        );
        let err = parse_json::<AffinorBasis>(Path::new("b.json"), text).unwrap_err();
        let CliError::Parse { field, .. } = &err else { panic!("{err:?}") };
        assert_eq!(field.as_deref(), Some("mats[1]"));
        assert_eq!(err.exit_code(), EXIT_DATA);

        let err = parse_json::<AffinorBasis>(Path::new("b.json"), r#"{"m":2,"n":"two"}"#).unwrap_err();
        assert!(matches!(err, CliError::Parse { field: Some(ref f), .. } if f == "n"));
    }
}
