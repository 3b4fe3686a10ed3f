//! CSV tables: header row, `.` decimals, `inf` for infinity, RFC 4180 quoting.

use std::io::Write;

use crate::error::CliResult;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| crate::error::CliError::Runtime(e.to_string()))?)
    }

    pub fn write_to(&self, out: &mut impl Write) -> CliResult<()> {
        out.write_all(&self.to_bytes()?)?;
        Ok(())
    }
}

/// Shortest round-trip decimal; `inf`, `-inf`, `nan` for the specials.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn int(x: impl std::fmt::Display) -> String {
    x.to_string()
}

/// Parses a field written by [`num`].
pub fn parse_num(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_and_specials() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a,b".into(), num(f64::INFINITY)]);
        t.push(vec!["say \"hi\"".into(), num(0.1)]);
        let s = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(s, "name,value\n\"a,b\",inf\n\"say \"\"hi\"\"\",0.1\n");
        assert_eq!(parse_num("inf"), Some(f64::INFINITY));
        assert_eq!(parse_num(&num(1.0 / 3.0)), Some(1.0 / 3.0));
    }
}
