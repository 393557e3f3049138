//! Plain-text tables in the published layout and their CSV twins.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Value(f64),
    /// Standard error, shown in round brackets.
    Se(f64),
    /// Interval or percentile pair, shown in square brackets.
    Range(f64, f64),
    Count(usize),
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    /// Row name in the CSV twin; ranges become two rows with these suffixes.
    pub key: String,
    pub range_names: (&'static str, &'static str),
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn new(label: impl Into<String>, key: impl Into<String>, cells: Vec<Cell>) -> Self {
        Self {
            label: label.into(),
            key: key.into(),
            range_names: ("ci_lower", "ci_upper"),
            cells,
        }
    }

    pub fn with_range_names(mut self, lower: &'static str, upper: &'static str) -> Self {
        self.range_names = (lower, upper);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub id: String,
    pub title: String,
    pub columns: Vec<String>,
    /// Column names in the CSV twin.
    pub column_keys: Vec<String>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    pub decimals: usize,
}

fn fmt_num(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:.decimals$}")
    }
}

fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        x.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    fn text_cell(&self, c: &Cell) -> String {
        let d = self.decimals;
        match c {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Value(x) => fmt_num(*x, d),
            Cell::Se(x) => format!("({})", fmt_num(*x, d)),
            Cell::Range(a, b) => format!("[{}, {}]", fmt_num(*a, d), fmt_num(*b, d)),
            Cell::Count(n) => n.to_string(),
            Cell::Flag(b) => if *b { "Yes" } else { "No" }.into(),
        }
    }

    /// Header block of `# ` lines, then the aligned table and its notes.
    pub fn render_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "{}", self.title);
        let grid: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.cells.iter().map(|c| self.text_cell(c)).collect())
            .collect();
        let label_w = self
            .rows
            .iter()
            .map(|r| r.label.chars().count())
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                grid.iter()
                    .filter_map(|r| r.get(j))
                    .chain(std::iter::once(&self.columns[j]))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let total = label_w + widths.iter().map(|w| w + 2).sum::<usize>();
        let rule = "=".repeat(total);
        let _ = writeln!(out, "{rule}");
        let mut line = format!("{:label_w$}", "");
        for (c, w) in self.columns.iter().zip(&widths) {
            let _ = write!(line, "  {c:>w$}");
        }
        let _ = writeln!(out, "{}", line.trim_end());
        let _ = writeln!(out, "{}", "-".repeat(total));
        for (r, cells) in self.rows.iter().zip(&grid) {
            let mut line = format!("{:label_w$}", r.label);
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(line, "  {c:>w$}");
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "{rule}");
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    /// Same grid at full precision; bracketed pairs split into two rows.
    pub fn render_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        let mut head = vec!["row".to_string()];
        head.extend(self.column_keys.iter().map(|k| csv_field(k)));
        let _ = writeln!(out, "{}", head.join(","));
        for r in &self.rows {
            let has_range = r.cells.iter().any(|c| matches!(c, Cell::Range(..)));
            let passes: &[Option<bool>] = if has_range { &[Some(false), Some(true)] } else { &[None] };
            for pass in passes {
                let key = match pass {
                    None => r.key.clone(),
                    Some(false) => format!("{}_{}", r.key, r.range_names.0),
                    Some(true) => format!("{}_{}", r.key, r.range_names.1),
                };
                let mut fields = vec![csv_field(&key)];
                for c in &r.cells {
                    fields.push(match (c, pass) {
                        (Cell::Empty, _) => String::new(),
                        (Cell::Text(s), _) => csv_field(s),
                        (Cell::Value(x) | Cell::Se(x), _) => csv_num(*x),
                        (Cell::Range(a, _), Some(false)) => csv_num(*a),
                        (Cell::Range(_, b), _) => csv_num(*b),
                        (Cell::Count(n), _) => n.to_string(),
                        (Cell::Flag(b), _) => if *b { "yes" } else { "no" }.into(),
                    });
                }
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
        out
    }
}
