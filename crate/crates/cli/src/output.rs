use clap::ValueEnum;

use crate::error::CliError;
use crate::Report;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Serialises a report. JSON objects are key-sorted and floats use the
/// shortest round-trip representation, so equal reports give equal bytes.
pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.document)
                .map_err(|e| CliError::Input(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = report.table.as_ref().ok_or_else(|| {
                CliError::Input(format!(
                    "`{}` has no tabular output; use --format json",
                    report.command.name()
                ))
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Input(e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for row in &table.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}
