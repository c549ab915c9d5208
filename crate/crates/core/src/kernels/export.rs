use std::io::{BufRead, Write};

use crate::error::{param, DmwError, Result};

use super::GramMatrix;

/// A Gram matrix as stored on disk: `# key: value` header lines, then one
/// row per line. Rows and columns follow the order of `labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramFile {
    pub header: Vec<(String, String)>,
    pub labels: Vec<String>,
    pub size: usize,
    pub values: Vec<f64>,
}

impl GramFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn ingestion(line: usize, message: impl Into<String>) -> DmwError {
    DmwError::Ingestion { path: "<gram>".into(), line: Some(line), message: message.into() }
}

/// Writes `gram` with the caller's provenance `header` followed by the
/// bandwidth, eigenvalue check, labels and size. Values use the shortest
/// representation that round-trips, so output is byte-stable.
pub fn write_gram<W: Write>(mut out: W, gram: &GramMatrix, labels: &[String], header: &[(String, String)]) -> Result<()> {
    if labels.len() != gram.size() {
        return Err(param(format!("{} labels for a {}×{} Gram", labels.len(), gram.size(), gram.size())));
    }
    if let Some(bad) = labels.iter().find(|l| l.contains([',', '\n'])) {
        return Err(param(format!("label {bad:?} contains a comma or newline")));
    }
    for (k, v) in header {
        if k.contains(':') || k.contains('\n') || v.contains('\n') {
            return Err(param(format!("header entry {k:?} cannot be written on one line")));
        }
        writeln!(out, "# {k}: {v}")?;
    }
    writeln!(out, "# lambda: {}", gram.lambda())?;
    writeln!(out, "# min_eigenvalue: {}", gram.min_eigenvalue())?;
    writeln!(out, "# psd: {}", gram.is_psd())?;
    writeln!(out, "# clipped: {}", gram.is_clipped())?;
    writeln!(out, "# labels: {}", labels.join(","))?;
    writeln!(out, "# size: {}", gram.size())?;
    for row in gram.values().chunks(gram.size().max(1)) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_gram<R: BufRead>(input: R) -> Result<GramFile> {
    let mut header = Vec::new();
    let mut values = Vec::new();
    let mut rows = 0;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(": ").ok_or_else(|| ingestion(lineno, "header line lacks ': '"))?;
            header.push((k.to_string(), v.to_string()));
        } else if !line.trim().is_empty() {
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|e| ingestion(lineno, format!("bad value {tok:?}: {e}")))?);
            }
            rows += 1;
        }
    }
    let find = |key: &str| header.iter().find(|(k, _)| k == key).map(|(_, v): &(String, String)| v.clone());
    let size: usize = find("size")
        .ok_or_else(|| ingestion(0, "missing size header"))?
        .parse()
        .map_err(|_| ingestion(0, "size header is not an integer"))?;
    let labels: Vec<String> = match find("labels") {
        Some(l) if !l.is_empty() => l.split(',').map(str::to_string).collect(),
        _ => Vec::new(),
    };
    if rows != size || values.len() != size * size || labels.len() != size {
        return Err(ingestion(0, format!("expected {size} rows of {size} values and {size} labels")));
    }
    Ok(GramFile { header, labels, size, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = GramMatrix::from_values(2, vec![1.0, 0.123_456_789_012_345_68, 0.123_456_789_012_345_68, 1.0], 0.5).unwrap();
        let labels = vec!["1".to_string(), "-1".to_string()];
        let header = vec![("dataset".to_string(), "toy".to_string()), ("scales".to_string(), "2,3,4,6".to_string())];
        let mut buf = Vec::new();
        write_gram(&mut buf, &g, &labels, &header).unwrap();
        let f = read_gram(buf.as_slice()).unwrap();
        assert_eq!(f.values, g.values());
        assert_eq!(f.labels, labels);
        assert_eq!(f.get("scales"), Some("2,3,4,6"));
        assert_eq!(f.get("lambda"), Some("0.5"));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = "# size: 2\n# labels: a,b\n1 0\n";
        assert!(read_gram(text.as_bytes()).is_err());
    }
}
