//! P-value input files: one p-value per line, an optional header line, and
//! an optional second column of truth labels (`1` = true null, `0` = false
//! null). Fields may be separated by commas, tabs or spaces.

use std::fmt;

use dynfdr::Truth;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueFile {
    pub values: Vec<f64>,
    pub truth: Option<Vec<Truth>>,
}

fn fields(line: &str) -> Vec<&str> {
    line.split([',', '\t', ' ', ';'])
        .filter(|f| !f.is_empty())
        .collect()
}

pub fn parse_pvalues(text: &str) -> Result<PValueFile, ParseError> {
    let mut values = Vec::new();
    let mut labels: Vec<Truth> = Vec::new();
    let mut columns = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = fields(line);
        let err = |message: String| ParseError {
            line: line_no,
            message,
        };
        let p: f64 = match f[0].parse() {
            Ok(p) => p,
            // a header is only allowed before any data
            Err(_) if values.is_empty() && columns.is_none() => {
                columns = Some(f.len().min(2));
                continue;
            }
            Err(_) => return Err(err(format!("cannot parse `{}` as a p-value", f[0]))),
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(err(format!("p-value {p} is outside [0, 1]")));
        }
        if f.len() > 2 {
            return Err(err(format!("expected 1 or 2 fields, found {}", f.len())));
        }
        let has_label = f.len() == 2;
        match (values.is_empty(), columns) {
            (true, _) => columns = Some(f.len()),
            (false, Some(c)) if c != f.len() => {
                return Err(err(format!("expected {c} fields, found {}", f.len())))
            }
            _ => {}
        }
        if has_label {
            labels.push(match f[1] {
                "1" => Truth::TrueNull,
                "0" => Truth::FalseNull,
                other => return Err(err(format!("truth label `{other}` must be 0 or 1"))),
            });
        }
        values.push(p);
    }

    if values.is_empty() {
        return Err(ParseError {
            line: 0,
            message: "input contains no p-values".into(),
        });
    }
    let truth = (!labels.is_empty()).then_some(labels);
    Ok(PValueFile { values, truth })
}
