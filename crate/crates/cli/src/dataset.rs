//! CSV datasets with header `y,z1,...,zK`, one row per unit.

use std::io::{Read, Write};

use factscreen_core::{FactorialDataset, TreatmentLevel};

use crate::{CliError, CliResult};

/// Reads a dataset, reporting problems with their line and column.
pub fn parse_dataset<R: Read>(reader: R) -> CliResult<FactorialDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| CliError::Input(format!("reading header: {e}")))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.first() != Some(&"y") {
        return Err(CliError::Input(format!("header must start with \"y\", found {:?}", header.as_slice())));
    }
    let k = names.len() - 1;
    if k == 0 {
        return Err(CliError::Input("header has no z columns".into()));
    }
    for (j, name) in names.iter().enumerate().skip(1) {
        if *name != format!("z{j}") {
            return Err(CliError::Input(format!("column {}: expected \"z{j}\", found {name:?}", j + 1)));
        }
    }
    let mut dataset = FactorialDataset::new(k as u32)?;
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != k + 1 {
            return Err(CliError::Input(format!("line {line}: expected {} fields, found {}", k + 1, record.len())));
        }
        let y: f64 = record[0]
            .parse()
            .map_err(|_| CliError::Input(format!("line {line}, column y: {:?} is not a number", &record[0])))?;
        if !y.is_finite() {
            return Err(CliError::Input(format!("line {line}, column y: {:?} is not finite", &record[0])));
        }
        let mut bits = 0u32;
        for j in 1..=k {
            match &record[j] {
                "0" => {}
                "1" => bits |= 1 << (j - 1),
                other => {
                    return Err(CliError::Input(format!("line {line}, column z{j}: expected 0 or 1, found {other:?}")))
                }
            }
        }
        dataset.push(TreatmentLevel::new(bits, k as u32)?, y)?;
    }
    Ok(dataset)
}

pub fn write_dataset<W: Write>(dataset: &FactorialDataset, writer: W) -> CliResult<()> {
    let k = dataset.k();
    let io = |e: csv::Error| CliError::Internal(format!("writing dataset: {e}"));
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["y".to_string()];
    header.extend((1..=k).map(|j| format!("z{j}")));
    wtr.write_record(&header).map_err(io)?;
    for unit in dataset.units() {
        let mut row = vec![unit.y.to_string()];
        row.extend((1..=k).map(|j| if unit.z.get(j) { "1" } else { "0" }.to_string()));
        wtr.write_record(&row).map_err(io)?;
    }
    wtr.flush().map_err(|e| CliError::Internal(format!("writing dataset: {e}")))
}
