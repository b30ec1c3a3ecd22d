use serde_json::json;

/// Everything that can stop the CLI, mapped onto its exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or arguments. Exit code 2.
    #[error("{message}")]
    Config { key: String, message: String },
    /// A failure after validation succeeded. Exit code 3.
    #[error("{0}")]
    Internal(String),
    /// The report could not be written. Exit code 4.
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Internal(_) => 3,
            CliError::Output { .. } => 4,
        }
    }

    /// One JSON object on one line, for stderr.
    pub fn to_line(&self) -> String {
        let value = match self {
            CliError::Config { key, message } => json!({"error": "config", "key": key, "message": message}),
            CliError::Internal(message) => json!({"error": "internal", "message": message}),
            CliError::Output { path, message } => json!({"error": "output", "path": path, "message": message}),
        };
        value.to_string()
    }
}

impl From<sqkd_core::protocol::ConfigError> for CliError {
    fn from(e: sqkd_core::protocol::ConfigError) -> Self {
        CliError::config(e.key, e.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_single_json_objects() {
        let e = CliError::config("gamma1", "gamma1 must satisfy 1/2 < gamma1 < 1\nsecond");
        let line = e.to_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["key"], "gamma1");
        assert_eq!(e.exit_code(), 2);
        assert_eq!(CliError::Internal("x".into()).exit_code(), 3);
    }
}
