use serde::{Deserialize, Serialize};

use crate::rouge::{RougeVariant, ScoreField};

use super::eval::MetricTable;

const VARIANTS: [RougeVariant; 3] = [RougeVariant::R1, RougeVariant::R2, RougeVariant::L];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    /// Structural rendering of the system.
    pub description: String,
    /// Records per member.
    pub n: usize,
    /// Members aggregated into this row (1 for a single system).
    pub members: usize,
    pub metrics: MetricTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSection {
    pub title: String,
    pub rows: Vec<ReportRow>,
}

fn cell(m: &super::MeanStd) -> String {
    format!("{:.2}±{:.2}", m.mean, m.std)
}

/// Aligned plain-text tables, one per section, preceded by `header` lines.
pub fn render_report(header: &[String], sections: &[ReportSection]) -> String {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let mut columns = vec!["System".to_string(), "Shape".to_string()];
    for v in VARIANTS {
        for f in ScoreField::ALL {
            columns.push(format!("{} {}", v.label(), f.label()));
        }
    }
    for section in sections {
        let mut rows: Vec<Vec<String>> = vec![columns.clone()];
        for r in &section.rows {
            let mut row = vec![r.name.clone(), r.description.clone()];
            for v in 0..3 {
                for f in 0..3 {
                    row.push(cell(&r.metrics[v][f]));
                }
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..columns.len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        out.push('\n');
        out.push_str(&section.title);
        out.push('\n');
        for (i, row) in rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (text, &w))| {
                    let pad = w - text.chars().count();
                    if c < 2 {
                        format!("{text}{}", " ".repeat(pad))
                    } else {
                        format!("{}{text}", " ".repeat(pad))
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
                out.push_str(&"-".repeat(rule));
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Serialize)]
struct JsonCell<'a> {
    section: &'a str,
    system: &'a str,
    description: &'a str,
    members: usize,
    n: usize,
    metric: String,
    field: &'static str,
    mean: f64,
    std: f64,
}

/// One object per system × metric × field, as a JSON array.
pub fn report_json(sections: &[ReportSection]) -> String {
    let mut cells = Vec::new();
    for s in sections {
        for r in &s.rows {
            for (v, variant) in VARIANTS.iter().enumerate() {
                for (f, field) in ScoreField::ALL.iter().enumerate() {
                    cells.push(JsonCell {
                        section: &s.title,
                        system: &r.name,
                        description: &r.description,
                        members: r.members,
                        n: r.n,
                        metric: variant.label(),
                        field: field.label(),
                        mean: r.metrics[v][f].mean,
                        std: r.metrics[v][f].std,
                    });
                }
            }
        }
    }
    let mut text = serde_json::to_string_pretty(&cells).expect("report serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::MeanStd;

    fn row(name: &str, mean: f64) -> ReportRow {
        ReportRow {
            name: name.into(),
            description: "(1, 1)".into(),
            n: 3,
            members: 1,
            metrics: [[MeanStd { mean, std: 0.5 }; 3]; 3],
        }
    }

    #[test]
    fn renders_aligned_cells() {
        let sections = vec![ReportSection {
            title: "Pairs".into(),
            rows: vec![row("a", 29.8412), row("longer-name", 100.0)],
        }];
        let text = render_report(&["seed 1".into()], &sections);
        assert!(text.starts_with("# seed 1\n"));
        assert!(text.contains("29.84±0.50"));
        assert!(text.contains("100.00±0.50"));
        let table: Vec<&str> = text.lines().filter(|l| l.starts_with("a ") || l.starts_with("longer")).collect();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].chars().count(), table[1].chars().count());
    }

    #[test]
    fn json_has_one_cell_per_metric() {
        let sections = vec![ReportSection {
            title: "s".into(),
            rows: vec![row("a", 1.0), row("b", 2.0)],
        }];
        let v: serde_json::Value = serde_json::from_str(&report_json(&sections)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 18);
        assert_eq!(v[0]["metric"], "R1");
        assert_eq!(v[0]["field"], "F1");
    }
}
