//! In-memory tables with per-cell missing values and CSV round-tripping.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} cells, expected {expected}")]
    Arity {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("column '{column}' row {row}: numeric cell is not finite")]
    NonFinite { column: String, row: usize },
    #[error("column '{column}' row {row}: cell does not match the column kind")]
    KindMismatch { column: String, row: usize },
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("column '{0}' is not numeric")]
    NotNumeric(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub name: String,
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl DataTable {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self, TableError> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(TableError::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| TableError::UnknownColumn(name.to_string()))
    }

    fn check_cell(&self, row: usize, col: usize, v: &Value) -> Result<(), TableError> {
        let column = &self.columns[col];
        match (column.kind, v) {
            (_, Value::Missing) => Ok(()),
            (ColumnKind::Numeric, Value::Number(x)) if x.is_finite() => Ok(()),
            (ColumnKind::Numeric, Value::Number(_)) => Err(TableError::NonFinite {
                column: column.name.clone(),
                row,
            }),
            (ColumnKind::Categorical, Value::Text(_)) => Ok(()),
            _ => Err(TableError::KindMismatch {
                column: column.name.clone(),
                row,
            }),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<(), TableError> {
        let idx = self.rows.len();
        if row.len() != self.columns.len() {
            return Err(TableError::Arity {
                row: idx,
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            self.check_cell(idx, j, v)?;
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> &Value {
        &self.rows[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Value) -> Result<(), TableError> {
        self.check_cell(row, col, &v)?;
        self.rows[row][col] = v;
        Ok(())
    }

    /// Keeps the rows for which `keep(row_index)` is true.
    pub fn retain_rows(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let mut i = 0;
        self.rows.retain(|_| {
            let k = keep(i);
            i += 1;
            k
        });
    }

    /// Appends a column; `values` must have one entry per row.
    pub fn add_column(&mut self, column: Column, values: Vec<Value>) -> Result<(), TableError> {
        if self.columns.iter().any(|c| c.name == column.name) {
            return Err(TableError::DuplicateColumn(column.name));
        }
        if values.len() != self.rows.len() {
            return Err(TableError::Arity {
                row: values.len().min(self.rows.len()),
                expected: self.rows.len(),
                got: values.len(),
            });
        }
        self.columns.push(column);
        let col = self.columns.len() - 1;
        for (i, v) in values.iter().enumerate() {
            if let Err(e) = self.check_cell(i, col, v) {
                self.columns.pop();
                return Err(e);
            }
        }
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(v);
        }
        Ok(())
    }

    /// Cells of a numeric column, `None` where missing.
    pub fn numeric(&self, name: &str) -> Result<Vec<Option<f64>>, TableError> {
        let j = self.column_index(name)?;
        if self.columns[j].kind != ColumnKind::Numeric {
            return Err(TableError::NotNumeric(name.to_string()));
        }
        Ok(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    /// Non-missing values of a numeric column.
    pub fn observed(&self, name: &str) -> Result<Vec<f64>, TableError> {
        Ok(self.numeric(name)?.into_iter().flatten().collect())
    }

    pub fn text(&self, name: &str) -> Result<Vec<Option<&str>>, TableError> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    pub fn missing_count(&self) -> usize {
        self.rows.iter().flatten().filter(|v| v.is_missing()).count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TableError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| match v {
                Value::Number(x) => x.to_string(),
                Value::Text(s) => s.clone(),
                Value::Missing => String::new(),
            }))?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads a CSV with a header row. A column is numeric when every
    /// non-empty cell parses as a finite number.
    pub fn read_csv<R: Read>(name: impl Into<String>, r: R) -> Result<Self, TableError> {
        let mut reader = csv::Reader::from_reader(r);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut raw: Vec<Vec<String>> = Vec::new();
        for rec in reader.records() {
            raw.push(rec?.iter().map(str::to_string).collect());
        }
        let numeric: Vec<bool> = (0..header.len())
            .map(|j| {
                raw.iter().all(|row| {
                    let s = row[j].trim();
                    s.is_empty() || s.parse::<f64>().is_ok_and(f64::is_finite)
                })
            })
            .collect();
        let columns = header
            .into_iter()
            .zip(&numeric)
            .map(|(n, &num)| if num { Column::numeric(n) } else { Column::categorical(n) })
            .collect();
        let mut table = DataTable::new(name, columns)?;
        for row in raw {
            let values = row
                .iter()
                .zip(&numeric)
                .map(|(s, &num)| {
                    let t = s.trim();
                    if t.is_empty() {
                        Value::Missing
                    } else if num {
                        Value::Number(t.parse().expect("checked above"))
                    } else {
                        Value::Text(s.clone())
                    }
                })
                .collect();
            table.push_row(values)?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DataTable {
        let mut t = DataTable::new(
            "t",
            vec![Column::categorical("country"), Column::numeric("x")],
        )
        .unwrap();
        t.push_row(vec![Value::Text("A, Inc".into()), Value::Number(0.1)])
            .unwrap();
        t.push_row(vec![Value::Text("B".into()), Value::Missing]).unwrap();
        t.push_row(vec![Value::Missing, Value::Number(-1.0e-7 / 3.0)])
            .unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let text = t.to_csv_string();
        assert!(text.starts_with("country,x\n"));
        let back = DataTable::read_csv("t", text.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut t = sample();
        assert!(matches!(
            t.push_row(vec![Value::Missing]),
            Err(TableError::Arity { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            t.push_row(vec![Value::Missing, Value::Number(f64::NAN)]),
            Err(TableError::NonFinite { .. })
        ));
        assert!(matches!(
            t.push_row(vec![Value::Number(1.0), Value::Missing]),
            Err(TableError::KindMismatch { .. })
        ));
        assert!(DataTable::new("d", vec![Column::numeric("a"), Column::numeric("a")]).is_err());
    }

    #[test]
    fn column_accessors() {
        let t = sample();
        assert_eq!(t.numeric("x").unwrap()[1], None);
        assert_eq!(t.observed("x").unwrap().len(), 2);
        assert!(matches!(t.numeric("country"), Err(TableError::NotNumeric(_))));
        assert!(matches!(t.numeric("nope"), Err(TableError::UnknownColumn(_))));
        assert_eq!(t.missing_count(), 2);
    }

    #[test]
    fn add_and_retain() {
        let mut t = sample();
        t.add_column(
            Column::numeric("y"),
            vec![Value::Number(1.0), Value::Number(2.0), Value::Number(3.0)],
        )
        .unwrap();
        t.retain_rows(|i| i != 1);
        assert_eq!(t.observed("y").unwrap(), vec![1.0, 3.0]);
        assert!(t.add_column(Column::numeric("z"), vec![]).is_err());
        assert_eq!(t.n_cols(), 3);
    }
}
