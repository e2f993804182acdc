//! Dense matrix files: MatrixMarket array format (real or complex) and
//! plain CSV (real only). Values are written with 17 significant digits,
//! which reads back bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use dhstab::{Complex64, DMatrix};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixData {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl MatrixData {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixData::Real(m) => m.shape(),
            MatrixData::Complex(m) => m.shape(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            MatrixData::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            MatrixData::Complex(m) => m.clone(),
        }
    }

    pub fn fro(&self) -> f64 {
        match self {
            MatrixData::Real(m) => m.norm(),
            MatrixData::Complex(m) => m.norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    MatrixMarket,
    Csv,
}

impl FileFormat {
    pub fn for_path(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => FileFormat::Csv,
            _ => FileFormat::MatrixMarket,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

pub fn read_matrix(path: &Path) -> CliResult<MatrixData> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let label = path.display().to_string();
    if FileFormat::for_path(path) == FileFormat::Csv && !text.trim_start().starts_with("%%MatrixMarket") {
        parse_csv(&text, &label)
    } else {
        parse_matrix_market(&text, &label)
    }
}

pub fn write_matrix(path: &Path, m: &MatrixData) -> CliResult<()> {
    let text = match FileFormat::for_path(path) {
        FileFormat::Csv => format_csv(m)?,
        FileFormat::MatrixMarket => format_matrix_market(m),
    };
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn format_matrix_market(m: &MatrixData) -> String {
    let (r, c) = m.shape();
    let field = if matches!(m, MatrixData::Real(_)) { "real" } else { "complex" };
    let mut out = format!("%%MatrixMarket matrix array {field} general\n{r} {c}\n");
    // Column-major, one entry per line.
    match m {
        MatrixData::Real(m) => m.iter().for_each(|x| writeln!(out, "{x:.16e}").unwrap()),
        MatrixData::Complex(m) => m.iter().for_each(|z| writeln!(out, "{:.16e} {:.16e}", z.re, z.im).unwrap()),
    }
    out
}

pub fn parse_matrix_market(text: &str, label: &str) -> CliResult<MatrixData> {
    let fail = |line: usize, msg: String| CliError::Format { path: label.to_string(), line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(fail(1, "expected '%%MatrixMarket matrix array <field> <symmetry>'".into()));
    }
    if words[2] != "array" {
        return Err(fail(1, format!("only the dense 'array' layout is supported, got '{}'", words[2])));
    }
    let complex = match words[3].as_str() {
        "real" | "integer" | "double" => false,
        "complex" => true,
        other => return Err(fail(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" if complex => Symmetry::Hermitian,
        other => return Err(fail(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (ln, size) = data.next().ok_or_else(|| fail(2, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| fail(ln, format!("bad dimension '{t}'"))))
        .collect::<CliResult<_>>()?;
    let (rows, cols) = match dims[..] {
        [r, c] if r > 0 && c > 0 => (r, c),
        _ => return Err(fail(ln, "size line must hold two positive integers".into())),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(fail(ln, "symmetric storage requires a square matrix".into()));
    }

    // Stored positions, column-major.
    let positions: Vec<(usize, usize)> = (0..cols)
        .flat_map(|j| {
            let first = match symmetry {
                Symmetry::General => 0,
                Symmetry::SkewSymmetric => j + 1,
                _ => j,
            };
            (first..rows).map(move |i| (i, j))
        })
        .collect();

    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    let mut last_line = ln;
    for &(i, j) in &positions {
        let (ln, line) = data.next().ok_or_else(|| {
            fail(last_line + 1, format!("expected {} entries, file ended early", positions.len()))
        })?;
        last_line = ln;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| fail(ln, format!("bad number '{t}'"))))
            .collect::<CliResult<_>>()?;
        let z = match (complex, &vals[..]) {
            (false, [x]) => Complex64::new(*x, 0.0),
            (true, [re, im]) => Complex64::new(*re, *im),
            _ => return Err(fail(ln, format!("expected {} value(s) per entry", if complex { 2 } else { 1 }))),
        };
        m[(i, j)] = z;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = z,
                Symmetry::SkewSymmetric => m[(j, i)] = -z,
                Symmetry::Hermitian => m[(j, i)] = z.conj(),
            }
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(fail(ln, "trailing data after the last entry".into()));
    }
    Ok(if complex { MatrixData::Complex(m) } else { MatrixData::Real(m.map(|z| z.re)) })
}

pub fn format_csv(m: &MatrixData) -> CliResult<String> {
    let MatrixData::Real(m) = m else {
        return Err(CliError::Input("CSV output holds real matrices only; use a .mtx path".into()));
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in m.row_iter() {
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn parse_csv(text: &str, label: &str) -> CliResult<MatrixData> {
    let fail = |line: usize, msg: String| CliError::Format { path: label.to_string(), line, msg };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            fail(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| fail(line, format!("bad number '{t}' (CSV holds real entries only)"))))
            .collect::<CliResult<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(fail(line, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(fail(1, "no rows".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(MatrixData::Real(DMatrix::from_fn(r, c, |i, j| rows[i][j])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_storage_is_expanded() {
        let text = "%%MatrixMarket matrix array real symmetric\n% comment\n2 2\n1\n2\n3\n";
        let MatrixData::Real(m) = parse_matrix_market(text, "t").unwrap() else { panic!() };
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));

        let text = "%%MatrixMarket matrix array real skew-symmetric\n3 3\n1\n2\n3\n";
        let MatrixData::Real(m) = parse_matrix_market(text, "t").unwrap() else { panic!() };
        assert_eq!(m[(1, 0)], 1.0);
        assert_eq!(m[(0, 1)], -1.0);
        assert_eq!(m[(2, 1)], 3.0);

        let text = "%%MatrixMarket matrix array complex hermitian\n2 2\n1 0\n2 1\n3 0\n";
        let MatrixData::Complex(m) = parse_matrix_market(text, "t").unwrap() else { panic!() };
        assert_eq!(m[(0, 1)], Complex64::new(2.0, -1.0));
    }

    #[test]
    fn malformed_files_report_lines() {
        let err = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\nx\n4\n", "f.mtx");
        let err = err.unwrap_err().to_string();
        assert!(err.starts_with("f.mtx:5:"), "{err}");
        assert!(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n", "f").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n", "f").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n2\n", "f").is_err());
        assert!(parse_csv("1,2\n3\n", "f.csv").is_err());
        assert!(parse_csv("1,2i\n", "f.csv").is_err());
    }

    #[test]
    fn csv_reads_comments_and_spaces() {
        let MatrixData::Real(m) = parse_csv("# A\n1, 2\n3 ,4\n", "f").unwrap() else { panic!() };
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
    }
}
