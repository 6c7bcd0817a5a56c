use std::path::Path;

use serde::Deserialize;

use ptlogic::compression::Slices;
use ptlogic::interval::ProbInterval;
use ptlogic::model::TimePoint;
use ptlogic::prob::parse_literal;

use crate::Failure;

/// One row of a slice table: `label,time,lo,hi`.
#[derive(Debug, Deserialize)]
struct Row {
    label: String,
    time: TimePoint,
    lo: String,
    hi: String,
}

pub(crate) fn read_slices(path: &Path) -> Result<Slices, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let mut slices = Slices::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Failure::input(format!("{}:{line}: {e}", path.display())))?;
        let value = |s: &str| {
            parse_literal(s).map_err(|e| Failure::input(format!("{}:{line}: `{s}`: {e}", path.display())))
        };
        let interval = ProbInterval::new(value(&row.lo)?, value(&row.hi)?)
            .map_err(|e| Failure::input(format!("{}:{line}: {e}", path.display())))?;
        if !interval.is_consistent() {
            return Err(Failure::input(format!("{}:{line}: lower bound exceeds upper bound", path.display())));
        }
        let label = row.label.trim_start_matches('$').to_string();
        if slices.entry(label.clone()).or_default().insert(row.time, interval).is_some() {
            return Err(Failure::input(format!(
                "{}:{line}: duplicate slice for `{label}` at {}",
                path.display(),
                row.time
            )));
        }
    }
    Ok(slices)
}
