use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;
use crate::sweep::{SweepConfig, SweepRow};

/// Significant digits written for every number.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const CSV_HEADER: &str = "r,p_ec,qber,qloss";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `printf("%.{digits}g")`: fixed notation for decimal exponents in
/// `[-4, digits)`, scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits > 0);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn rounded(x: f64) -> f64 {
    format_sig(x, SIGNIFICANT_DIGITS)
        .parse()
        .expect("formatted float parses")
}

/// Serializes rows; identical rows give identical bytes.
pub fn render(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::with_capacity(64 * (rows.len() + 1));
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                let f = |x| format_sig(x, SIGNIFICANT_DIGITS);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    f(row.r),
                    f(row.p_ec),
                    f(row.qber),
                    f(row.qloss)
                );
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<SweepRow> = rows
                .iter()
                .map(|row| SweepRow {
                    r: rounded(row.r),
                    p_ec: rounded(row.p_ec),
                    qber: rounded(row.qber),
                    qloss: rounded(row.qloss),
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&rows).expect("finite floats serialize");
            out.push('\n');
            out
        }
    }
}

/// Writes `rows` to the configured path, or stdout when there is none.
pub fn emit(rows: &[SweepRow], cfg: &SweepConfig) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("nothing to emit".into()));
    }
    let text = render(rows, cfg.format);
    match &cfg.output_path {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
