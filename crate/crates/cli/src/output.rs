//! Tabular output shared by every command.
//!
//! CSV and JSON carry the same columns. JSON is written by hand so decimal
//! values keep every requested digit instead of passing through `f64`.

use std::fmt::Write as _;

use clap::ValueEnum;
use radgap::{Dd, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    /// A decimal already rendered in scientific notation.
    Num(String),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(s) => s.clone(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(s) => s.clone(),
            Cell::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
            Cell::Empty => "null".to_string(),
        }
    }
}

/// Renders decimals with a fixed number of significant digits.
#[derive(Debug, Clone, Copy)]
pub struct Digits(pub usize);

impl Digits {
    pub fn dd(&self, v: Dd) -> Cell {
        Cell::Num(v.to_sci_string(self.0))
    }

    pub fn float(&self, v: f64) -> Cell {
        if v.is_finite() {
            Cell::Num(Dd::from_f64(v).to_sci_string(self.0.min(17)))
        } else {
            Cell::Empty
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (key, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "\"{key}\": {}", cell.json());
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }
}

/// Columns of every gap listing.
pub const GAP_COLUMNS: [&str; 8] = [
    "x_num",
    "x_den",
    "N",
    "raw_gap",
    "scaled_gap",
    "closed_form_num",
    "closed_form_den",
    "rel_err",
];

pub struct GapRow {
    pub x: Rational,
    pub n: u64,
    pub raw: Option<Dd>,
    pub scaled: Option<Dd>,
    pub closed_form: Option<Rational>,
}

impl GapRow {
    pub fn relative_error(&self) -> Option<Dd> {
        let cf = self.closed_form?;
        if cf.numer() == 0 {
            return None;
        }
        let target = Dd::from_u128(cf.numer() as u128) / Dd::from_u128(cf.denom() as u128);
        Some(((self.scaled? - target) / target).abs())
    }

    pub fn cells(&self, digits: Digits) -> Vec<Cell> {
        let opt = |v: Option<Dd>| v.map_or(Cell::Empty, |v| digits.dd(v));
        let (cf_num, cf_den) = match self.closed_form {
            Some(cf) => (Cell::Int(cf.numer() as i128), Cell::Int(cf.denom() as i128)),
            None => (Cell::Empty, Cell::Empty),
        };
        vec![
            Cell::Int(self.x.numer() as i128),
            Cell::Int(self.x.denom() as i128),
            Cell::Int(self.n as i128),
            opt(self.raw),
            opt(self.scaled),
            cf_num,
            cf_den,
            opt(self.relative_error()),
        ]
    }
}

pub fn gap_table(rows: &[GapRow], digits: Digits) -> Table {
    let mut table = Table::new(&GAP_COLUMNS);
    for row in rows {
        table.push(row.cells(digits));
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_share_columns() {
        let row = GapRow {
            x: Rational::new(1, 2).unwrap(),
            n: 16,
            raw: Some(Dd::from_f64(0.25)),
            scaled: Some(Dd::from_f64(1.5)),
            closed_form: Some(Rational::ONE),
        };
        let table = gap_table(&[row], Digits(3));
        assert_eq!(
            table.to_csv(),
            "x_num,x_den,N,raw_gap,scaled_gap,closed_form_num,closed_form_den,rel_err\n\
             1,2,16,2.50e-1,1.50e0,1,1,5.00e-1\n"
        );
        let json: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        assert_eq!(json[0]["scaled_gap"], 1.5);
        assert_eq!(json[0]["closed_form_den"], 1);
    }

    #[test]
    fn empty_cells() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Empty, Cell::Text("x,y".into())]);
        assert_eq!(t.to_csv(), "a,b\n,\"x,y\"\n");
        assert_eq!(t.to_json(), "[\n  {\"a\": null, \"b\": \"x,y\"}\n]\n");
        assert_eq!(Table::new(&["a"]).to_json(), "[]\n");
    }
}
