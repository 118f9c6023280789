//! Plain-text scenario files: `key = value` lines grouped under `[section]`
//! headers. Keys before the first header belong to the root section.
//! `#` and `;` start comments.

use std::fmt;

use crate::keys::{self, Key};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    /// `(key, value, line)`; line 0 for entries not read from a file.
    pub entries: Vec<(String, String, usize)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ini {
    /// The root section has an empty name and always comes first.
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

impl Ini {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn root(&self) -> Option<&Section> {
        self.section("")
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        let idx = match self.sections.iter().position(|s| s.name == section) {
            Some(i) => i,
            None => {
                self.sections.push(Section { name: section.to_string(), entries: vec![] });
                self.sections.len() - 1
            }
        };
        let s = &mut self.sections[idx];
        match s.entries.iter_mut().find(|(k, _, _)| k == key) {
            Some(e) => e.1 = value.to_string(),
            None => s.entries.push((key.to_string(), value.to_string(), 0)),
        }
    }

    /// Parses and validates against the known sections and keys.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut ini = Ini { sections: vec![Section::default()] };
        let mut current = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, format!("malformed section header '{line}'")))?
                    .trim();
                if keys::section_keys(name).is_none() {
                    return Err(err(line_no, format!("unknown section [{name}]")));
                }
                if ini.section(name).is_some() {
                    return Err(err(line_no, format!("section [{name}] appears twice")));
                }
                ini.sections.push(Section { name: name.to_string(), entries: vec![] });
                current = ini.sections.len() - 1;
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let section = &mut ini.sections[current];
            let known: &[Key] = keys::section_keys(&section.name).unwrap_or(&[]);
            if !known.iter().any(|key| key.name == k) {
                let place = if section.name.is_empty() { "at top level".to_string() } else { format!("in [{}]", section.name) };
                return Err(err(line_no, format!("unknown key '{k}' {place}")));
            }
            if section.entries.iter().any(|(e, _, _)| e == k) {
                return Err(err(line_no, format!("duplicate key '{k}'")));
            }
            section.entries.push((k.to_string(), v.to_string(), line_no));
        }
        Ok(ini)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            if s.entries.is_empty() && s.name.is_empty() {
                continue;
            }
            if !s.name.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{}]\n", s.name));
            }
            for (k, v, _) in &s.entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    let line = line.split('#').next().unwrap_or("");
    // ';' inside a value separates sweep values; only a leading one is a comment
    if line.trim_start().starts_with(';') {
        ""
    } else {
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# decay run
experiment = tls

[tls]
omega0 = 2   # level spacing
beta = 0.1
x12sq = 0.25

[quadrature]
rel_tol = 1e-9
";

    #[test]
    fn parses_sections_and_comments() {
        let ini = Ini::parse(SAMPLE).unwrap();
        assert_eq!(ini.root().unwrap().get("experiment"), Some("tls"));
        let tls = ini.section("tls").unwrap();
        assert_eq!(tls.get("omega0"), Some("2"));
        assert_eq!(tls.entries[0].2, 5);
        assert_eq!(ini.section("quadrature").unwrap().get("rel_tol"), Some("1e-9"));
    }

    #[test]
    fn round_trip_is_idempotent() {
        let a = Ini::parse(SAMPLE).unwrap();
        let text = a.serialize();
        let b = Ini::parse(&text).unwrap();
        assert_eq!(b.serialize(), text);
        let strip = |i: &Ini| i.sections.iter().map(|s| (s.name.clone(), s.entries.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect::<Vec<_>>())).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Ini::parse("experiment = tls\n[tls]\nomega = 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.to_string().contains("unknown key 'omega'"), "{e}");
        assert_eq!(Ini::parse("[nope]\n").unwrap_err().line, 1);
        assert_eq!(Ini::parse("[tls]\nbeta 0.1\n").unwrap_err().line, 2);
        assert_eq!(Ini::parse("[tls]\nbeta = 1\nbeta = 2\n").unwrap_err().line, 3);
    }

    #[test]
    fn sweep_values_keep_semicolons() {
        let ini = Ini::parse("[sweep]\nvalues = 1,0,0; 2,0,0\n").unwrap();
        assert_eq!(ini.section("sweep").unwrap().get("values"), Some("1,0,0; 2,0,0"));
    }

    proptest::proptest! {
        #[test]
        fn serialized_scenarios_parse_back(
            picks in proptest::collection::vec((0usize..64, "[A-Za-z0-9.,:;_+-]{0,12}"), 0..20)
        ) {
            let mut ini = Ini::default();
            for (i, value) in &picks {
                let e = &keys::EXPERIMENTS[i % keys::EXPERIMENTS.len()];
                let k = &e.keys[i / keys::EXPERIMENTS.len() % e.keys.len()];
                ini.set(e.name, k.name, value.trim_start_matches(';'));
            }
            let text = ini.serialize();
            let back = Ini::parse(&text).unwrap();
            proptest::prop_assert_eq!(back.serialize(), text);
        }
    }
}
