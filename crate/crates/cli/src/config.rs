//! `key = value` config files, spliced into argv as flag defaults.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

/// Options that take a value and may appear before the subcommand.
const GLOBAL_VALUED: [&str; 4] = ["--config", "--format", "--output", "-o"];

/// Reads `key = value` lines (`#` starts a comment) into flag arguments:
/// `radius = 3` becomes `--radius 3`, `resume = true` becomes `--resume`,
/// and `false` drops the flag.
pub fn config_args(path: &Path) -> Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let value = value.trim().trim_matches('"');
        match value {
            "true" => out.push(flag.into()),
            "false" => {}
            v => {
                out.push(flag.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// The `--config` path, if any, and the argv index of the subcommand name.
pub fn locate(argv: &[OsString]) -> (Option<OsString>, Option<usize>) {
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy();
        if let Some(v) = arg.strip_prefix("--config=") {
            config = Some(OsString::from(v));
            i += 1;
        } else if GLOBAL_VALUED.contains(&arg.as_ref()) {
            if arg == "--config" {
                config = argv.get(i + 1).cloned();
            }
            i += 2;
        } else if arg.starts_with('-') {
            i += 1;
        } else {
            break;
        }
    }
    // A config flag after the subcommand is still honoured.
    if config.is_none() {
        for (j, a) in argv.iter().enumerate().skip(i) {
            let s = a.to_string_lossy();
            if let Some(v) = s.strip_prefix("--config=") {
                config = Some(OsString::from(v));
            } else if s == "--config" {
                config = argv.get(j + 1).cloned();
            }
        }
    }
    (config, (i < argv.len()).then_some(i))
}

/// Inserts config-derived flags right after the subcommand, so flags given
/// on the command line (which come later) override them.
pub fn splice(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let (config, sub) = locate(&argv);
    let (Some(path), Some(sub)) = (config, sub) else {
        return Ok(argv);
    };
    let extra = config_args(Path::new(&path))?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn locates_subcommand_after_globals() {
        let argv = os(&["orbihall", "--format", "json", "--config", "x.cfg", "euler", "(2;)"]);
        let (c, i) = locate(&argv);
        assert_eq!(c, Some(OsString::from("x.cfg")));
        assert_eq!(i, Some(5));
        let argv = os(&["orbihall", "conductance", "--config=y.cfg"]);
        let (c, i) = locate(&argv);
        assert_eq!(c, Some(OsString::from("y.cfg")));
        assert_eq!(i, Some(1));
    }
}
