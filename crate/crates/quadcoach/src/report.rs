//! Human-readable tables and CSV for analysis results.

use std::fmt::Write as _;

use quadcoach_core::analysis::{
    LandingColumns, LandingTable, LikertCounts, Mastery, MeanSd, TestResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
}

fn csv_string(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for record in records {
        w.write_record(&record).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv of utf-8 fields")
}

/// Pads every column to its widest cell.
fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).expect("write to string");
    };
    line(&mut out, &mut header.iter().copied());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    writeln!(out, "{}", rule.join("  ")).expect("write to string");
    for row in rows {
        line(&mut out, &mut row.iter().map(String::as_str));
    }
    out
}

fn render(format: OutputFormat, header: &[&str], rows: Vec<Vec<String>>) -> String {
    match format {
        OutputFormat::Table => text_table(header, &rows),
        OutputFormat::Csv => csv_string(header, rows),
    }
}

fn mean_sd(c: MeanSd) -> String {
    format!("{:.2} ({:.2})", c.mean, c.sd)
}

fn column_cells(c: &LandingColumns) -> [MeanSd; 4] {
    [c.first_half, c.second_half, c.improvement, c.all_trials]
}

pub fn landing_table(table: &LandingTable, format: OutputFormat) -> String {
    let mut out = match format {
        OutputFormat::Table => {
            let header = [
                "condition",
                "n",
                "safe 1-10",
                "safe 11-20",
                "safe improvement",
                "safe all",
                "landed 1-10",
                "landed 11-20",
                "landed improvement",
                "landed all",
            ];
            let rows = table
                .summaries
                .iter()
                .map(|s| {
                    let mut row = vec![s.condition.as_str().to_owned(), s.participants.to_string()];
                    row.extend(column_cells(&s.safe).into_iter().map(mean_sd));
                    row.extend(column_cells(&s.safe_or_unsafe).into_iter().map(mean_sd));
                    row
                })
                .collect::<Vec<_>>();
            text_table(&header, &rows)
        }
        OutputFormat::Csv => {
            let mut header = vec!["condition".to_owned(), "participants".to_owned()];
            for block in ["safe", "landed"] {
                for col in ["first_half", "second_half", "improvement", "all_trials"] {
                    header.push(format!("{block}_{col}_mean"));
                    header.push(format!("{block}_{col}_sd"));
                }
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = table.summaries.iter().map(|s| {
                let mut row = vec![s.condition.as_str().to_owned(), s.participants.to_string()];
                for c in column_cells(&s.safe)
                    .into_iter()
                    .chain(column_cells(&s.safe_or_unsafe))
                {
                    row.push(c.mean.to_string());
                    row.push(c.sd.to_string());
                }
                row
            });
            csv_string(&header, rows)
        }
    };
    if format == OutputFormat::Table {
        for e in &table.excluded {
            writeln!(out, "excluded {}: {}", e.session_id, e.reason).expect("write to string");
        }
    }
    out
}

pub fn test_result(result: &TestResult, format: OutputFormat) -> String {
    let df = result.df.map(|d| d.to_string()).unwrap_or_default();
    let row = match format {
        OutputFormat::Table => vec![
            result.test.as_str().to_owned(),
            format!("{:.4}", result.statistic),
            df,
            format!("{:.4}", result.p_value),
        ],
        OutputFormat::Csv => {
            vec![
                result.test.as_str().to_owned(),
                result.statistic.to_string(),
                df,
                result.p_value.to_string(),
            ]
        }
    };
    render(format, &["test", "statistic", "df", "p"], vec![row])
}

pub fn likert(counts: &[LikertCounts], format: OutputFormat) -> String {
    let rows = counts
        .iter()
        .map(|c| {
            vec![
                c.condition.as_str().to_owned(),
                c.item.as_str().to_owned(),
                c.disagree.to_string(),
                c.neutral.to_string(),
                c.agree.to_string(),
            ]
        })
        .collect();
    render(
        format,
        &["condition", "item", "disagree", "neutral", "agree"],
        rows,
    )
}

pub fn mastery(rows: &[Mastery], format: OutputFormat) -> String {
    let rows = rows
        .iter()
        .map(|m| {
            vec![
                m.condition.as_str().to_owned(),
                m.failed.to_string(),
                m.mastered.to_string(),
            ]
        })
        .collect();
    render(format, &["condition", "failed", "mastered"], rows)
}

#[cfg(test)]
mod tests {
    use quadcoach_core::analysis::fisher_exact;

    use super::*;

    #[test]
    fn csv_has_header_and_one_record() {
        let r = fisher_exact(5, 5, 5, 5).unwrap();
        let text = test_result(&r, OutputFormat::Csv);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("test,statistic,df,p"));
        assert_eq!(lines.next(), Some("fisher-exact,1,,1"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn table_columns_align() {
        let text = text_table(&["a", "bbb"], &[vec!["long".into(), "x".into()]]);
        assert_eq!(text, "a     bbb\n----  ---\nlong  x\n");
    }
}
