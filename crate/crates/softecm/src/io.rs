//! Readers and writers for numeric CSV, categorical CSV, time-series
//! JSON-lines, wide series CSV, label files and mass matrices.
//!
//! Format errors report the 1-based line of the file and the 1-based column
//! (field) within it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use softecm_core::focal::label_max_member;
use softecm_core::{
    parse_focal_label, Attribute, CategoricalSchema, CredalPartition, DataKind, DataObject,
    Dataset, FocalFamily,
};

use crate::error::{format_error, Error, Result};

type CoreResult<T> = softecm_core::Result<T>;

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, r: CoreResult<T>) -> Result<T> {
    r.map_err(|e| Error::parse(path, e))
}

/// Supported data file layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DataFormat {
    /// Comma-separated reals, one object per line.
    Numeric,
    /// Comma-separated attribute strings, one-hot encoded.
    Categorical,
    /// JSON-lines, one series per line.
    Timeseries,
    /// Comma-separated univariate series, one per line.
    Wide,
}

impl DataFormat {
    /// Guess from the file extension: `.jsonl`/`.json` are time series,
    /// everything else numeric CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => DataFormat::Timeseries,
            _ => DataFormat::Numeric,
        }
    }
}

/// Options shared by the CSV readers.
#[derive(Clone, Debug, Default)]
pub struct CsvOptions {
    /// First line holds column names.
    pub header: bool,
    /// 0-based column holding an integer class label.
    pub label_column: Option<usize>,
}

struct Table {
    header: Option<Vec<String>>,
    // (file line, fields)
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table<R: Read>(reader: R, header: bool) -> CoreResult<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = if header {
        let h = rdr
            .headers()
            .map_err(|e| format_error(1, 1, e.to_string()))?;
        Some(h.iter().map(str::to_owned).collect())
    } else {
        None
    };
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            format_error(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        rows.push((line, rec.iter().map(str::to_owned).collect()));
    }
    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| rows.first().map(|r| r.1.len()))
        .unwrap_or(0);
    for (line, r) in &rows {
        if r.len() != width {
            return Err(format_error(
                *line,
                r.len().min(width) + 1,
                format!("ragged row: expected {width} fields, found {}", r.len()),
            ));
        }
    }
    Ok(Table { header, rows })
}

fn split_labels(table: &mut Table, label_column: Option<usize>) -> CoreResult<Option<Vec<usize>>> {
    let Some(col) = label_column else {
        return Ok(None);
    };
    let mut labels = Vec::with_capacity(table.rows.len());
    for (line, r) in &mut table.rows {
        if col >= r.len() {
            return Err(format_error(*line, col + 1, "label column out of range"));
        }
        let cell = r.remove(col);
        labels.push(
            cell.parse::<usize>()
                .map_err(|_| format_error(*line, col + 1, format!("bad label {cell:?}")))?,
        );
    }
    if let Some(h) = &mut table.header {
        if col < h.len() {
            h.remove(col);
        }
    }
    Ok(Some(labels))
}

fn parse_reals(line: usize, fields: &[String]) -> CoreResult<Vec<f64>> {
    fields
        .iter()
        .enumerate()
        .map(|(j, s)| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format_error(line, j + 1, format!("not a finite number: {s:?}")))
        })
        .collect()
}

pub fn read_numeric_csv<R: Read>(reader: R, opts: &CsvOptions) -> CoreResult<Dataset> {
    let mut table = read_table(reader, opts.header)?;
    let labels = split_labels(&mut table, opts.label_column)?;
    let objects = table
        .rows
        .iter()
        .map(|(line, r)| parse_reals(*line, r).map(DataObject::vector))
        .collect::<CoreResult<Vec<_>>>()?;
    Dataset::new(DataKind::Numeric, objects, labels)
}

pub fn load_numeric_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    with_path(path, read_numeric_csv(open(path)?, opts))
}

fn write_reals(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    for (j, v) in values.iter().enumerate() {
        if j > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{v}")?;
    }
    writeln!(out)
}

/// Writes one object per line; no header, no labels.
pub fn save_numeric_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut out = create(path)?;
    for o in &dataset.objects {
        write_reals(&mut out, o.as_slice()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a categorical table; the schema is inferred (levels in order of
/// first appearance) unless given.
pub fn read_categorical_csv<R: Read>(
    reader: R,
    opts: &CsvOptions,
    schema: Option<&CategoricalSchema>,
) -> CoreResult<Dataset> {
    let mut table = read_table(reader, opts.header)?;
    let labels = split_labels(&mut table, opts.label_column)?;
    let schema = match schema {
        Some(s) => s.clone(),
        None => {
            let rows: Vec<Vec<String>> = table.rows.iter().map(|r| r.1.clone()).collect();
            CategoricalSchema::infer(&rows, table.header.as_deref())?
        }
    };
    let objects = table
        .rows
        .iter()
        .map(|(line, r)| {
            schema.encode_row(r, *line).map_err(|e| match e {
                softecm_core::Error::DataFormat {
                    row,
                    column,
                    message,
                } => format_error(row, column + 1, message),
                other => other,
            })
        })
        .collect::<CoreResult<Vec<_>>>()?;
    let mut d = Dataset::new(DataKind::Categorical, objects, labels)?;
    d.schema = Some(schema);
    Ok(d)
}

pub fn load_categorical_csv(
    path: &Path,
    opts: &CsvOptions,
    schema: Option<&CategoricalSchema>,
) -> Result<Dataset> {
    with_path(path, read_categorical_csv(open(path)?, opts, schema))
}

/// Writes decoded categorical records, one per line.
pub fn save_categorical_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let schema = dataset
        .schema
        .as_ref()
        .ok_or_else(|| Error::Usage("categorical dataset has no schema".into()))?;
    let file = create(path)?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(schema.attributes.iter().map(|a| a.name.as_str()))
        .map_err(io)?;
    for o in &dataset.objects {
        w.write_record(schema.decode(o)?).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct AttributeJson {
    name: String,
    levels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SchemaJson {
    attributes: Vec<AttributeJson>,
}

/// Schema file: `{"attributes": [{"name": .., "levels": [..]}, ..]}`.
pub fn read_schema<R: Read>(reader: R) -> CoreResult<CategoricalSchema> {
    let s: SchemaJson = serde_json::from_reader(reader)
        .map_err(|e| format_error(e.line(), e.column(), e.to_string()))?;
    CategoricalSchema::new(
        s.attributes
            .into_iter()
            .map(|a| Attribute {
                name: a.name,
                levels: a.levels,
            })
            .collect(),
    )
}

pub fn load_schema(path: &Path) -> Result<CategoricalSchema> {
    with_path(path, read_schema(open(path)?))
}

pub fn save_schema(path: &Path, schema: &CategoricalSchema) -> Result<()> {
    let s = SchemaJson {
        attributes: schema
            .attributes
            .iter()
            .map(|a| AttributeJson {
                name: a.name.clone(),
                levels: a.levels.clone(),
            })
            .collect(),
    };
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &s).map_err(|e| Error::io(path, e.into()))?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct SeriesLine {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
    series: Vec<Vec<f64>>,
}

/// JSON-lines series: `{"id": str?, "label": int?, "series": [[..], ..]}`
/// with the outer index running over time. Labels are kept only when every
/// line has one.
pub fn read_timeseries<R: BufRead>(reader: R) -> CoreResult<Dataset> {
    let mut objects = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    let mut all_labelled = true;
    let mut any_id = false;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| format_error(line_no, 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let s: SeriesLine = serde_json::from_str(&line)
            .map_err(|e| format_error(line_no, e.column(), e.to_string()))?;
        let len = s.series.len();
        let channels = s.series.first().map_or(0, Vec::len);
        if let Some(t) = s.series.iter().position(|f| f.len() != channels) {
            return Err(format_error(
                line_no,
                1,
                format!(
                    "frame {t} has {} channels, expected {channels}",
                    s.series[t].len()
                ),
            ));
        }
        let values: Vec<f64> = s.series.into_iter().flatten().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format_error(line_no, 1, "series holds a non-finite value"));
        }
        let obj = DataObject::series(len, channels, values)
            .map_err(|e| format_error(line_no, 1, e.to_string()))?;
        if let Some(first) = objects.first().map(DataObject::cols) {
            if obj.cols() != first {
                return Err(format_error(
                    line_no,
                    1,
                    format!(
                        "series has {} channels, earlier series have {first}",
                        obj.cols()
                    ),
                ));
            }
        }
        objects.push(obj);
        match s.label {
            Some(l) => labels.push(l),
            None => all_labelled = false,
        }
        any_id |= s.id.is_some();
        ids.push(s.id.unwrap_or_else(|| objects.len().to_string()));
    }
    let labels = (all_labelled && !objects.is_empty()).then_some(labels);
    let mut d = Dataset::new(DataKind::TimeSeries, objects, labels)?;
    if any_id {
        d.names = Some(ids);
    }
    Ok(d)
}

pub fn load_timeseries(path: &Path) -> Result<Dataset> {
    with_path(path, read_timeseries(open(path)?))
}

/// Writes one JSON line per series, with labels and names when present.
pub fn save_timeseries(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut out = create(path)?;
    for (i, o) in dataset.objects.iter().enumerate() {
        let line = SeriesLine {
            id: dataset.names.as_ref().map(|n| n[i].clone()),
            label: dataset.labels.as_ref().map(|l| l[i]),
            series: (0..o.rows()).map(|t| o.row(t).to_vec()).collect(),
        };
        serde_json::to_writer(&mut out, &line).map_err(|e| Error::io(path, e.into()))?;
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Univariate series stored one per CSV line.
pub fn read_wide_csv<R: Read>(reader: R, opts: &CsvOptions) -> CoreResult<Dataset> {
    let mut table = read_table(reader, opts.header)?;
    let labels = split_labels(&mut table, opts.label_column)?;
    let objects = table
        .rows
        .iter()
        .map(|(line, r)| parse_reals(*line, r).map(DataObject::univariate))
        .collect::<CoreResult<Vec<_>>>()?;
    Dataset::new(DataKind::TimeSeries, objects, labels)
}

pub fn load_wide_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    with_path(path, read_wide_csv(open(path)?, opts))
}

/// One non-negative integer per line; blank lines are skipped.
pub fn read_labels<R: BufRead>(reader: R) -> CoreResult<Vec<usize>> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| format_error(k + 1, 1, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse::<usize>()
                .map_err(|_| format_error(k + 1, 1, format!("bad label {t:?}")))?,
        );
    }
    Ok(out)
}

pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    with_path(path, read_labels(open(path)?))
}

pub fn save_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = create(path)?;
    for l in labels {
        writeln!(out, "{l}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Mass matrix with a header of focal-set labels (`{}`, `{1}`, `{1,2}`, ...)
/// and one row per object.
pub fn read_masses<R: Read>(reader: R) -> CoreResult<CredalPartition> {
    let table = read_table(reader, true)?;
    let header = table.header.unwrap_or_default();
    if header.is_empty() {
        return Err(format_error(1, 1, "missing focal-set header"));
    }
    let mut c = 0;
    for (j, h) in header.iter().enumerate() {
        c = c.max(label_max_member(h).map_err(|e| format_error(1, j + 1, e.to_string()))?);
    }
    let sets = header
        .iter()
        .enumerate()
        .map(|(j, h)| parse_focal_label(h, c).map_err(|e| format_error(1, j + 1, e.to_string())))
        .collect::<CoreResult<Vec<_>>>()?;
    let family = FocalFamily::from_sets(c, sets.clone())?;
    // columns may come in any order; place them in family order
    let order: Vec<usize> = sets
        .iter()
        .map(|s| family.index_of(s).expect("set from the family"))
        .collect();
    let mut masses = vec![0.0; table.rows.len() * family.len()];
    for (i, (line, r)) in table.rows.iter().enumerate() {
        let vals = parse_reals(*line, r)?;
        for (j, v) in vals.into_iter().enumerate() {
            masses[i * family.len() + order[j]] = v;
        }
    }
    CredalPartition::new(family, masses)
}

pub fn load_masses(path: &Path) -> Result<CredalPartition> {
    with_path(path, read_masses(open(path)?))
}

pub fn write_masses<W: Write>(out: W, partition: &CredalPartition) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(partition.family().labels())
        .map_err(std::io::Error::other)?;
    for i in 0..partition.n_objects() {
        w.write_record(partition.row(i).iter().map(|v| v.to_string()))
            .map_err(std::io::Error::other)?;
    }
    w.flush()
}

pub fn save_masses(path: &Path, partition: &CredalPartition) -> Result<()> {
    write_masses(create(path)?, partition).map_err(|e| Error::io(path, e))
}

/// Loads a dataset in the given layout.
pub fn load_dataset(
    path: &Path,
    format: DataFormat,
    opts: &CsvOptions,
    schema: Option<&CategoricalSchema>,
) -> Result<Dataset> {
    match format {
        DataFormat::Numeric => load_numeric_csv(path, opts),
        DataFormat::Categorical => load_categorical_csv(path, opts, schema),
        DataFormat::Timeseries => load_timeseries(path),
        DataFormat::Wide => load_wide_csv(path, opts),
    }
}

/// Saves a dataset in the layout matching its kind.
pub fn save_dataset(path: &Path, dataset: &Dataset) -> Result<()> {
    match dataset.kind {
        DataKind::Numeric => save_numeric_csv(path, dataset),
        DataKind::Categorical => save_categorical_csv(path, dataset),
        DataKind::TimeSeries => save_timeseries(path, dataset),
    }
}
