//! `key = value` files with `[section]` headers.
//!
//! Each subcommand reads its own section; keys outside any section are the
//! global options. Values given on the command line win over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::UsageError;

/// Parsed file: section name to its key-value pairs. The unnamed section is `""`.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let ini = Ini::load_from_str(text).map_err(|e| UsageError(format!("malformed config: {e}")))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (name, props) in &ini {
            let name = name.unwrap_or("").trim().to_string();
            let entry = sections.entry(name.clone()).or_default();
            for (k, v) in props.iter() {
                if entry.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                    return Err(UsageError(format!("key `{k}` repeated in section [{name}]")));
                }
            }
        }
        sections.retain(|name, kv| !(name.is_empty() && kv.is_empty()));
        Ok(Self { sections })
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.sections.values().all(BTreeMap::is_empty)
    }

    /// Names of all sections starting with `prefix`, in file-independent sorted order.
    pub fn sections_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.sections.keys().map(String::as_str).filter(move |n| n.starts_with(prefix))
    }

    /// Rejects sections that no subcommand reads.
    pub fn check_sections(&self, allowed: &[&str], allowed_prefix: Option<&str>) -> Result<(), UsageError> {
        for name in self.sections.keys() {
            let ok = name.is_empty()
                || allowed.contains(&name.as_str())
                || allowed_prefix.is_some_and(|p| name.starts_with(p));
            if !ok {
                return Err(UsageError(format!("unknown section [{name}]")));
            }
        }
        Ok(())
    }

    #[must_use]
    pub fn section(&self, name: &str) -> Section {
        Section { name: name.to_string(), values: self.sections.get(name).cloned().unwrap_or_default() }
    }
}

/// Keys of one section, consumed as they are read.
#[derive(Debug)]
pub struct Section {
    name: String,
    values: BTreeMap<String, String>,
}

impl Section {
    /// Takes `key`, preferring the command-line value.
    pub fn take<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, UsageError> {
        let from_file = self.values.remove(key);
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| UsageError(format!("[{}] {key} = {v}: cannot parse value", self.name)))
            })
            .transpose()
    }

    pub fn take_or<T: FromStr>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, UsageError> {
        Ok(self.take(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, UsageError> {
        self.take(key, None)?
            .ok_or_else(|| UsageError(format!("[{}] missing required key `{key}`", self.name)))
    }

    /// Fails on any key left unread.
    pub fn finish(self) -> Result<(), UsageError> {
        match self.values.keys().next() {
            Some(k) => Err(UsageError(format!("unknown key `{k}` in section [{}]", self.name))),
            None => Ok(()),
        }
    }
}
