//! CSV input and the JSON/CSV result files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use enetsearch::{Coefficients, CvRecord, Dataset, Family, SearchResult, SensitivityReport};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Reads a headed numeric CSV. The `response` column becomes `y`; every other
/// column is a predictor, in file order.
pub fn load_csv(path: &Path, response: &str, family: Family) -> Result<Dataset, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header of {}: {e}", path.display())))?
        .clone();
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    let y_col = names
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| CliError::Data(format!("unknown response column '{response}'")))?;
    let predictors: Vec<usize> = (0..names.len()).filter(|&j| j != y_col).collect();
    if predictors.is_empty() {
        return Err(CliError::Data("no predictor columns".into()));
    }

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        let parse = |j: usize| -> Result<f64, CliError> {
            let cell = record.get(j).unwrap_or("");
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Data(format!(
                    "row {row}, column '{}': '{cell}' is not a finite number",
                    names[j]
                ))),
            }
        };
        let y = parse(y_col)?;
        if family == Family::Binomial && y != 0.0 && y != 1.0 {
            return Err(CliError::Data(format!(
                "row {row}, column '{response}': binomial response must be 0 or 1, found {y}"
            )));
        }
        ys.push(y);
        for &j in &predictors {
            xs.push(parse(j)?);
        }
    }
    if ys.is_empty() {
        return Err(CliError::Data("no observations".into()));
    }
    let n = ys.len();
    let x = Array2::from_shape_vec((n, predictors.len()), xs).expect("row-major predictor buffer");
    let column_names = predictors.iter().map(|&j| names[j].clone()).collect();
    Dataset::new(x, Array1::from(ys), column_names, family).map_err(|e| CliError::Data(e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("writing {}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_summary(path: &Path, records: &[CvRecord], format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(path, &records),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(create(path)?);
            for rec in records {
                w.serialize(rec)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            }
            w.flush().map_err(io_err(path))
        }
    }
}

/// Reads back a summary written with [`Format::Csv`].
pub fn read_summary_csv(path: &Path) -> Result<Vec<CvRecord>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<CvRecord>, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCoefficient {
    pub name: String,
    pub value: f64,
}

/// Contents of `preferable.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferableModel {
    pub family: Family,
    pub alpha: f64,
    pub lambda: f64,
    pub l_index: usize,
    pub cvm: f64,
    pub cvsd: f64,
    pub nzero: usize,
    pub intercept: f64,
    pub coefficients: Vec<NamedCoefficient>,
    /// Predictors with zero variance; their coefficients are held at zero.
    pub constant_columns: Vec<String>,
    pub standardize: bool,
    pub k_folds: usize,
    pub seed: u64,
}

impl PreferableModel {
    pub fn new(result: &SearchResult, record: &CvRecord, coef: &Coefficients) -> Self {
        let names = &result.column_names;
        PreferableModel {
            family: result.family,
            alpha: record.alpha,
            lambda: record.lambda,
            l_index: record.l_index,
            cvm: record.cvm,
            cvsd: record.cvsd,
            nzero: record.nzero,
            intercept: coef.intercept,
            coefficients: names
                .iter()
                .zip(coef.beta.iter())
                .map(|(name, &value)| NamedCoefficient {
                    name: name.clone(),
                    value,
                })
                .collect(),
            constant_columns: names
                .iter()
                .zip(&result.stats.constant)
                .filter(|(_, &c)| c)
                .map(|(n, _)| n.clone())
                .collect(),
            standardize: result.config.standardize,
            k_folds: result.config.k_folds,
            seed: result.config.seed,
        }
    }
}

pub fn write_preferable(path: &Path, model: &PreferableModel) -> Result<(), CliError> {
    write_json(path, model)
}

pub fn write_sensitivity(path: &Path, report: &SensitivityReport, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(path, report),
        Format::Csv => {
            let err = |e: csv::Error| CliError::Io(format!("writing {}: {e}", path.display()));
            let mut w = csv::Writer::from_writer(create(path)?);
            let mut header: Vec<String> = ["rep", "seed", "alpha", "lambda", "l_index", "cvm", "nzero"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            header.extend(report.column_names.iter().cloned());
            header.push("error".into());
            w.write_record(&header).map_err(err)?;
            let blank = |k: usize| vec![String::new(); k];
            for rep in &report.reps {
                let mut row = vec![rep.rep.to_string(), rep.seed.to_string()];
                match &rep.selection {
                    Some(s) => {
                        row.extend([
                            s.alpha.to_string(),
                            s.lambda.to_string(),
                            s.l_index.to_string(),
                            s.cvm.to_string(),
                            s.nzero.to_string(),
                        ]);
                        row.extend(s.nonzero.iter().map(|&b| (b as u8).to_string()));
                    }
                    None => {
                        row.extend(blank(5));
                        row.extend(blank(report.column_names.len()));
                    }
                }
                row.push(rep.error.clone().unwrap_or_default());
                w.write_record(&row).map_err(err)?;
            }
            let mut freq = vec!["frequency".to_string()];
            freq.extend(blank(6));
            freq.extend(report.selection_frequency.iter().map(|f| f.to_string()));
            freq.push(String::new());
            w.write_record(&freq).map_err(err)?;
            w.flush().map_err(io_err(path))
        }
    }
}
