//! File plumbing shared by the subcommands.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use curvelift::lines::{FamilySpec, LineFamily};
use curvelift::{FElem, FieldCtx};

/// A usage error; reported with exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())).into())
}

/// Writes to `path`, or to stdout when absent.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A line family file: a JSON array of `[alpha, beta]` element integers, or
/// CSV with header `alpha,beta`.
pub fn read_lines_file(path: &Path, f: &FieldCtx) -> Result<LineFamily> {
    let text = read_text(path).map_err(|_| {
        Usage(format!(
            "--lines expects all, trace-nonzero, trace-zero or a readable file, got '{}'",
            path.display()
        ))
    })?;
    let keys: Vec<[u32; 2]> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Usage(format!("--lines {}: {e}", path.display())))?
    } else {
        let mut rows = text.lines().filter(|l| !l.trim().is_empty());
        let header = rows.next().unwrap_or_default().trim();
        if header != "alpha,beta" {
            return Err(Usage(format!("--lines {}: expected header 'alpha,beta'", path.display())).into());
        }
        rows.map(|l| {
            let v: Vec<u32> = l
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Usage(format!("--lines {}: {e}", path.display())))?;
            match v.as_slice() {
                [a, b] => Ok([*a, *b]),
                _ => Err(Usage(format!("--lines {}: rows need two columns", path.display()))),
            }
        })
        .collect::<std::result::Result<_, _>>()?
    };
    Ok(LineFamily::from_spec(&FamilySpec::Explicit(keys), f)?)
}

/// One CSV data row of element integers after a header row.
pub fn parse_row(text: &str, f: &FieldCtx) -> Result<Vec<FElem>> {
    let mut rows = text.lines().filter(|l| !l.trim().is_empty());
    rows.next().ok_or_else(|| Usage("empty CSV".into()))?;
    let row = rows.next().unwrap_or_default();
    if row.trim().is_empty() {
        return Ok(Vec::new());
    }
    row.split(',')
        .map(|c| {
            let v: u32 = c.trim().parse().map_err(|e| Usage(format!("bad cell '{c}': {e}")))?;
            Ok(f.from_int(v)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldCtx {
        FieldCtx::new(3, 2, None).unwrap()
    }

    #[test]
    fn row_parsing() {
        let f = f9();
        let row = parse_row("c0,c1,c2\n1,0,8\n", &f).unwrap();
        assert_eq!(row.iter().map(|&e| f.to_int(e)).collect::<Vec<_>>(), vec![1, 0, 8]);
        assert!(parse_row("c0\n", &f).unwrap().is_empty());
        assert!(parse_row("", &f).unwrap_err().is::<Usage>());
        assert!(parse_row("c0\n9\n", &f).is_err());
        assert!(parse_row("c0\nx\n", &f).unwrap_err().is::<Usage>());
    }

    #[test]
    fn lines_file_formats() {
        let f = f9();
        let dir = std::env::temp_dir().join(format!("curvelift-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let json = dir.join("l.json");
        let csv = dir.join("l.csv");
        fs::write(&json, "[[1,2],[3,0]]").unwrap();
        fs::write(&csv, "alpha,beta\n1,2\n3,0\n").unwrap();
        let a = read_lines_file(&json, &f).unwrap();
        let b = read_lines_file(&csv, &f).unwrap();
        assert_eq!(a, b);
        fs::write(&csv, "a,b\n1,2\n").unwrap();
        assert!(read_lines_file(&csv, &f).unwrap_err().is::<Usage>());
        assert!(read_lines_file(&dir.join("missing"), &f).unwrap_err().is::<Usage>());
    }
}
