//! `--config FILE`: `key = value` lines turned into flags placed ahead of the
//! explicit ones, so that flags given on the command line win.

use std::path::Path;

#[derive(Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

/// Parses the config text into `--key value` arguments. Blank lines and
/// `#` comments are skipped; `true` becomes a bare flag and `false` drops it.
pub fn config_args(text: &str) -> Result<Vec<String>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key.starts_with('-') {
            return Err(ConfigError(format!("line {}: bad key {key:?}", n + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Removes `--config FILE` from `argv` and splices the file's flags in
/// right after the subcommand name.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut args = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| ConfigError("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            args.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| ConfigError(format!("{path}: {e}")))?;
    let extra = config_args(&text)?;
    // argv[0] is the program, argv[1] the subcommand
    let at = args.len().min(2);
    args.splice(at..at, extra);
    Ok(args)
}
