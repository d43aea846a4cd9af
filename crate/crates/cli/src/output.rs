use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Tsv,
}

pub enum Section {
    Fields { title: String, items: Vec<(String, String)> },
    Table { title: String, headers: Vec<String>, rows: Vec<Vec<String>> },
}

/// A command's result: the JSON document plus the same content laid out as
/// sections for the text formats.
pub struct Report {
    pub json: Value,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Self { json, sections: Vec::new() }
    }

    pub fn fields<K: Into<String>, V: ToString>(
        mut self,
        title: &str,
        items: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        let items = items.into_iter().map(|(k, v)| (k.into(), v.to_string())).collect();
        self.sections.push(Section::Fields { title: title.into(), items });
        self
    }

    pub fn table(mut self, title: &str, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.sections.push(Section::Table {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        });
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Tsv => self.render_tsv(),
            Format::Human => self.render_human(),
        }
    }

    fn render_tsv(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            match section {
                Section::Fields { title, items } => {
                    let _ = writeln!(out, "# {title}");
                    for (k, v) in items {
                        let _ = writeln!(out, "{k}\t{v}");
                    }
                }
                Section::Table { title, headers, rows } => {
                    let _ = writeln!(out, "# {title}");
                    let _ = writeln!(out, "{}", headers.join("\t"));
                    for row in rows {
                        let _ = writeln!(out, "{}", row.join("\t"));
                    }
                }
            }
        }
        out
    }

    fn render_human(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            match section {
                Section::Fields { title, items } => {
                    let _ = writeln!(out, "{title}");
                    let width = items.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                    for (k, v) in items {
                        let _ = writeln!(out, "  {k:<width$}  {v}");
                    }
                }
                Section::Table { title, headers, rows } => {
                    let _ = writeln!(out, "{title}");
                    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
                    for row in rows {
                        for (w, cell) in widths.iter_mut().zip(row) {
                            *w = (*w).max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| {
                        let padded: Vec<String> =
                            cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                        format!("  {}", padded.join("  ").trim_end())
                    };
                    let _ = writeln!(out, "{}", line(headers));
                    for row in rows {
                        let _ = writeln!(out, "{}", line(row));
                    }
                }
            }
        }
        out
    }
}

pub fn list<T: ToString>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(T::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |x| x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn formats_agree_on_values() {
        let r = Report::new(json!({"b": 1, "a": "3/2"}))
            .fields("summary", [("a", "3/2"), ("b", "1")])
            .table("rows", &["j", "h_u"], vec![vec!["1".into(), "3".into()]]);
        assert_eq!(r.render(Format::Json), "{\n  \"a\": \"3/2\",\n  \"b\": 1\n}\n");
        assert_eq!(r.render(Format::Tsv), "# summary\na\t3/2\nb\t1\n# rows\nj\th_u\n1\t3\n");
        assert!(r.render(Format::Human).contains("  a  3/2"));
    }
}
