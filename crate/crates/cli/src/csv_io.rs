//! Labelled numeric tables on disk.
//!
//! Layout: optional `#` comment lines, a header row whose first cell names
//! the site column, then one row per site with its label in the first cell.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use varboot::{CommunityTable64, Matrix64, PredictorBlock64};

use crate::error::{CliError, Result};
use crate::provenance::Provenance;

/// A parsed CSV table before it is interpreted as abundances or predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTable {
    pub site_header: String,
    pub site_ids: Vec<String>,
    pub column_ids: Vec<String>,
    pub values: Matrix64,
}

impl LabelledTable {
    pub fn into_community(self, path: &Path) -> Result<CommunityTable64> {
        for j in 0..self.values.ncols() {
            if let Some(i) = self.values.col(j).iter().position(|&v| v < 0.0) {
                return Err(CliError::input(
                    path,
                    format!(
                        "negative abundance {} at data row {}, column {} ('{}')",
                        self.values[(i, j)],
                        i + 1,
                        j + 2,
                        self.column_ids[j]
                    ),
                ));
            }
        }
        CommunityTable64::new(self.site_ids, self.column_ids, self.values)
            .map_err(|e| CliError::input(path, e.to_string()))
    }

    pub fn into_block(self, name: &str, path: &Path) -> Result<PredictorBlock64> {
        PredictorBlock64::new(name, self.site_ids, self.column_ids, self.values)
            .map_err(|e| CliError::input(path, e.to_string()))
    }
}

pub fn read_table_csv(path: impl AsRef<Path>) -> Result<LabelledTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_table(file, path)
}

pub fn parse_table<R: std::io::Read>(reader: R, path: &Path) -> Result<LabelledTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(path, format!("unreadable header: {e}")))?
        .clone();
    if headers.is_empty() {
        return Err(CliError::input(path, "empty file"));
    }
    let width = headers.len();
    let site_header = headers[0].to_string();
    let column_ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut site_ids = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(path, format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(CliError::input(
                path,
                format!("line {line}: {} cells, header has {width}", rec.len()),
            ));
        }
        let label = rec[0].to_string();
        if let Some(first) = seen.insert(label.clone(), line as usize) {
            return Err(CliError::input(
                path,
                format!("line {line}: duplicate site label '{label}' (first seen on line {first})"),
            ));
        }
        let mut row = Vec::with_capacity(width - 1);
        for (j, cell) in rec.iter().enumerate().skip(1) {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::input(
                    path,
                    format!("line {line}, column {} ('{}'): non-numeric value '{cell}'", j + 1, &headers[j]),
                )
            })?;
            if !v.is_finite() {
                return Err(CliError::input(
                    path,
                    format!("line {line}, column {}: non-finite value '{cell}'", j + 1),
                ));
            }
            row.push(v);
        }
        site_ids.push(label);
        rows.push(row);
    }
    let mut values = Matrix64::zeros(rows.len(), width - 1);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[(i, j)] = v;
        }
    }
    Ok(LabelledTable {
        site_header,
        site_ids,
        column_ids,
        values,
    })
}

/// Writes a table with `#` provenance lines above the header.
///
/// Values use the shortest representation that parses back to the same
/// `f64`, so write-then-read is lossless.
pub fn write_table_csv(
    path: impl AsRef<Path>,
    site_header: &str,
    site_ids: &[String],
    column_ids: &[String],
    values: &Matrix64,
    provenance: &Provenance,
) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    provenance.write_comments(&mut buf).expect("write to Vec");
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec![site_header.to_string()];
        header.extend(column_ids.iter().cloned());
        w.write_record(&header)
            .map_err(|e| CliError::input(path, e.to_string()))?;
        for (i, site) in site_ids.iter().enumerate() {
            let mut rec = vec![site.clone()];
            rec.extend((0..values.ncols()).map(|j| values[(i, j)].to_string()));
            w.write_record(&rec)
                .map_err(|e| CliError::input(path, e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(&buf).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn parse(text: &str) -> Result<LabelledTable> {
        parse_table(text.as_bytes(), &PathBuf::from("t.csv"))
    }

    #[test]
    fn parses_comments_and_labels() {
        let t = parse("# tool: x\nsite,a,b\ns1,1,2\ns2,3.5,0\n").unwrap();
        assert_eq!(t.site_ids, vec!["s1", "s2"]);
        assert_eq!(t.column_ids, vec!["a", "b"]);
        assert_eq!(t.values.row(1), vec![3.5, 0.0]);
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse("site,a,b\ns1,1,2\ns2,3\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn non_numeric_reports_coordinates() {
        let err = parse("site,a,b\ns1,1,x\n").unwrap_err().to_string();
        assert!(err.contains("line 2, column 3"), "{err}");
    }

    #[test]
    fn duplicate_sites_rejected() {
        let err = parse("site,a\ns1,1\ns1,2\n").unwrap_err().to_string();
        assert!(err.contains("duplicate site label 's1'"), "{err}");
    }

    #[test]
    fn negative_abundance_names_cell() {
        let t = parse("site,a,b\ns1,1,2\ns2,-3,0\n").unwrap();
        let err = t.into_community(Path::new("t.csv")).unwrap_err().to_string();
        assert!(err.contains("data row 2, column 2 ('a')"), "{err}");
    }

    #[test]
    fn zero_column_block() {
        let t = parse("site\ns1\ns2\ns3\n").unwrap();
        let b = t.into_block("spatial", Path::new("t.csv")).unwrap();
        assert_eq!((b.n_sites(), b.n_variables()), (3, 0));
    }
}
