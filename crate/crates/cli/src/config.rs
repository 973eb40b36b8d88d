use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
    #[error("comparison failed")]
    CompareFailed,
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Runtime(_) | Self::CompareFailed => 1,
        }
    }
}

impl From<tpop_core::Error> for CliError {
    fn from(e: tpop_core::Error) -> Self {
        use tpop_core::Error::*;
        match e {
            Io(_) | Csv(_) | Json(_) => Self::Runtime(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

impl From<clap::Error> for CliError {
    fn from(e: clap::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

pub fn load_config(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Validation(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(CliError::Validation(format!("{}: {e}", path.display()))),
    }
}

/// Fills every option not given on the command line from the config file.
/// Keys use the option's long name with `-` or `_`.
pub fn merge<T>(args: &T, matches: &ArgMatches, file: &Map<String, Value>) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(args).map_err(|e| CliError::Runtime(e.to_string()))?;
    let fields = value.as_object_mut().expect("option structs serialize to objects");
    for (key, v) in file {
        let id = key.replace('-', "_");
        if !fields.contains_key(&id) {
            continue;
        }
        if matches.value_source(&id) != Some(ValueSource::CommandLine) {
            fields.insert(id, v.clone());
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::Validation(format!("config: {e}")))
}
