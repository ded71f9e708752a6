//! CSV tables: a header row, then one line per record. Floats carry 17
//! significant digits so every value reads back exactly.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row(Vec<String>);

impl Row {
    pub fn float(&mut self, x: f64) -> &mut Self {
        self.0.push(format_float(x));
        self
    }

    pub fn int(&mut self, x: i64) -> &mut Self {
        self.0.push(x.to_string());
        self
    }

    pub fn flag(&mut self, x: bool) -> &mut Self {
        self.0.push(x.to_string());
        self
    }

    pub fn text(&mut self, x: &str) -> &mut Self {
        self.0.push(x.to_string());
        self
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self) -> &mut Row {
        self.rows.push(Row::default());
        self.rows.last_mut().expect("just pushed")
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header.join(",")).expect("writing to a string");
        for r in &self.rows {
            debug_assert_eq!(r.0.len(), self.header.len());
            writeln!(out, "{}", r.0.join(",")).expect("writing to a string");
        }
        out
    }
}
