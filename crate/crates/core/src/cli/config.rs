//! TOML run configs.
//!
//! Every problem found while reading a config is collected, so a bad file
//! is reported in one pass with each offending key named.

use std::fmt;

use serde::de::DeserializeOwned;

/// Every problem found in one config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid config:")?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

pub struct Fields {
    table: toml::Table,
    known: Vec<&'static str>,
    errors: Vec<String>,
}

impl Fields {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let table = text
            .parse::<toml::Table>()
            .map_err(|e| ConfigErrors(vec![format!("parse error: {}", e.message())]))?;
        Ok(Fields {
            table,
            known: Vec::new(),
            errors: Vec::new(),
        })
    }

    fn take<T: DeserializeOwned>(&mut self, key: &'static str) -> Option<T> {
        self.known.push(key);
        let value = self.table.get(key)?.clone();
        match value.try_into::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{key}: {}", e.message().trim()));
                None
            }
        }
    }

    pub fn required<T: DeserializeOwned>(&mut self, key: &'static str) -> Option<T> {
        if !self.table.contains_key(key) {
            self.known.push(key);
            self.errors.push(format!("{key}: missing"));
            return None;
        }
        self.take(key)
    }

    pub fn optional<T: DeserializeOwned>(&mut self, key: &'static str) -> Option<T> {
        self.take(key)
    }

    /// Records a failed semantic check against `key`.
    pub fn check(&mut self, key: &str, result: crate::Result<()>) {
        if let Err(e) = result {
            self.errors.push(format!("{key}: {e}"));
        }
    }

    pub fn reject(&mut self, key: &str, reason: impl fmt::Display) {
        self.errors.push(format!("{key}: {reason}"));
    }

    pub fn finish(mut self) -> Result<(), ConfigErrors> {
        let unknown: Vec<String> = self
            .table
            .keys()
            .filter(|k| !self.known.contains(&k.as_str()))
            .map(|k| format!("{k}: unknown key"))
            .collect();
        self.errors.extend(unknown);
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(self.errors))
        }
    }
}
