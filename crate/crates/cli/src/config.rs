//! `key=value` config files merged under command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "m", "eta", "epsilon", "alpha2", "delta", "method", "points", "m_range", "n_max", "m_list",
    "delta_list", "epsilon_range", "format", "threads", "output", "no_meta",
];

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

pub fn flag_name(key: &str) -> String {
    format!("--{}", key.replace('_', "-"))
}

/// Resolved settings: file values as fallback, plus an ordered echo of
/// everything actually used.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    echo: Vec<(String, String)>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {:?}", lineno + 1, k.trim())));
            }
            file.insert(key, v.trim().to_string());
        }
        Ok(Self { file, echo: Vec::new() })
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        self.echo.push((key.to_string(), value.to_string()));
    }

    /// Flag value if given, otherwise the config file's.
    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required {}", flag_name(key))))
    }

    /// Two mutually exclusive spellings of one parameter. Flags shadow the file
    /// for the pair as a whole.
    pub fn either<T: FromStr + Display>(
        &mut self,
        (ka, fa): (&str, Option<T>),
        (kb, fb): (&str, Option<T>),
    ) -> Result<Option<Either<T>>, CliError> {
        let (a, b) = if fa.is_some() || fb.is_some() {
            (fa, fb)
        } else {
            (self.file_value(ka)?, self.file_value(kb)?)
        };
        match (a, b) {
            (Some(_), Some(_)) => Err(CliError::Usage(format!(
                "{} and {} are mutually exclusive",
                flag_name(ka),
                flag_name(kb)
            ))),
            (Some(a), None) => {
                self.record(ka, &a);
                Ok(Some(Either::First(a)))
            }
            (None, Some(b)) => {
                self.record(kb, &b);
                Ok(Some(Either::Second(b)))
            }
            (None, None) => Ok(None),
        }
    }

    pub fn clear_echo(&mut self) {
        self.echo.clear();
    }

    pub fn echo(&self) -> &[(String, String)] {
        &self.echo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Either<T> {
    First(T),
    Second(T),
}

/// `"a:b"` as an inclusive pair.
pub fn parse_pair<T: FromStr>(key: &str, s: &str) -> Result<(T, T), CliError> {
    let bad = || CliError::Usage(format!("{}: expected lo:hi, got {s:?}", flag_name(key)));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{}: cannot parse {x:?} in {s:?}", flag_name(key))))
        })
        .collect()
}
