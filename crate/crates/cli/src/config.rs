//! `key = value` config files.
//!
//! Every long flag can be set in the file under its own name, e.g.
//!
//! ```text
//! # kwise.conf
//! format = human
//! precision-cap = 4096
//! k = 2
//! H = 3
//! constants = C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67
//! trace = true
//! ```
//!
//! Flags given on the command line win. Boolean flags take `true`/`false`.

use std::collections::BTreeMap;
use std::path::Path;

/// Flags that take no value.
const SWITCHES: &[&str] = &["trace", "keep-rejections"];

/// Flags that may be repeated; a config value is split on `;`.
const REPEATED: &[&str] = &["f"];

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().trim_start_matches("--").to_string();
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        if key == "config" {
            return Err(format!("config line {}: config files cannot include others", i + 1));
        }
        out.insert(key, value);
    }
    Ok(out)
}

/// Position of `--config` and its path in `argv`, accepting `--config=path`.
fn find_config(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn given(argv: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let long_eq = format!("--{key}=");
    argv.iter().any(|a| a == &long || a.starts_with(&long_eq))
}

/// Appends every config entry whose flag is absent from `argv`.
pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = find_config(&argv) else {
        return Ok(argv);
    };
    let entries = load(Path::new(&path))?;
    let mut extra = Vec::new();
    for (key, value) in entries {
        if given(&argv, &key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => return Err(format!("config key `{key}` takes true or false")),
            }
        } else if REPEATED.contains(&key.as_str()) {
            for v in value.split(';').map(str::trim).filter(|v| !v.is_empty()) {
                extra.push(format!("--{key}={v}"));
            }
        } else {
            extra.push(format!("--{key}={value}"));
        }
    }
    argv.extend(extra);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_quotes() {
        let m = parse("# note\nk = 2\n\nf = \"x^1.5\"\n--H=3\n").unwrap();
        assert_eq!(m["k"], "2");
        assert_eq!(m["f"], "x^1.5");
        assert_eq!(m["H"], "3");
        assert!(parse("nonsense").is_err());
    }

    #[test]
    fn flags_win() {
        let dir = std::env::temp_dir().join(format!("kwise-config-{}", std::process::id()));
        std::fs::write(&dir, "k = 3\nH = 4\ntrace = true\nf = x^1.5; x^1.75\n").unwrap();
        let argv = args(&["kwise", "certify", "--k", "2", "--config", dir.to_str().unwrap()]);
        let merged = merge(argv).unwrap();
        std::fs::remove_file(&dir).ok();
        assert!(merged.contains(&"--H=4".to_string()));
        assert!(!merged.iter().any(|a| a == "--k=3"));
        assert!(merged.contains(&"--trace".to_string()));
        assert!(merged.contains(&"--f=x^1.75".to_string()));
    }
}
