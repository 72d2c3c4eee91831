//! Cascade dataset files, configuration files and model files.
//!
//! A dataset is newline-delimited JSON: a header line
//! `{"format":"hawkes-horizon-cascades","schema_version":1,"static_width":K}`
//! followed by one record per item:
//! `{"item_id":…,"created_at":…,"static_attrs":[…],"events":[[t,mark],…],"truncated":…}`
//! with an optional `"observed_until"`. Paths ending in `.gz` are gzip
//! compressed. An empty file is an empty dataset.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cascade::{Cascade, Event};
use crate::error::{Error, Result};
use crate::forecast::ForecastModel;

pub const DATASET_FORMAT: &str = "hawkes-horizon-cascades";
pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub format: String,
    pub schema_version: u32,
    pub static_width: usize,
}

impl DatasetHeader {
    pub fn new(static_width: usize) -> Self {
        DatasetHeader { format: DATASET_FORMAT.into(), schema_version: DATASET_SCHEMA_VERSION, static_width }
    }
}

/// File form of one cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeRecord {
    pub item_id: String,
    pub created_at: f64,
    pub static_attrs: Vec<f64>,
    pub events: Vec<(f64, f64)>,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_until: Option<f64>,
}

impl From<&Cascade> for CascadeRecord {
    fn from(c: &Cascade) -> Self {
        CascadeRecord {
            item_id: c.item_id.clone(),
            created_at: c.created_at,
            static_attrs: c.static_attrs.clone(),
            events: c.events.iter().map(|e| (e.t, e.mark)).collect(),
            truncated: c.truncated,
            observed_until: c.observed_until,
        }
    }
}

impl TryFrom<CascadeRecord> for Cascade {
    type Error = Error;

    fn try_from(r: CascadeRecord) -> Result<Cascade> {
        let c = Cascade {
            item_id: r.item_id,
            created_at: r.created_at,
            events: r.events.into_iter().map(|(t, m)| Event::new(t, m)).collect(),
            static_attrs: r.static_attrs,
            truncated: r.truncated,
            observed_until: r.observed_until,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub static_width: usize,
    pub cascades: Vec<Cascade>,
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn open_read(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path)?;
    Ok(if is_gz(path) {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

/// Streaming reader yielding one validated cascade at a time.
pub struct DatasetReader<R> {
    input: R,
    line: String,
    line_no: usize,
    header: Option<DatasetHeader>,
}

impl DatasetReader<Box<dyn BufRead>> {
    pub fn open(path: &Path) -> Result<Self> {
        DatasetReader::new(open_read(path)?)
    }
}

impl<R: BufRead> DatasetReader<R> {
    /// Reads the header line; an empty input has no header and no records.
    pub fn new(input: R) -> Result<Self> {
        let mut reader = DatasetReader { input, line: String::new(), line_no: 0, header: None };
        if reader.next_line()? {
            let header: DatasetHeader = serde_json::from_str(reader.line.trim_end())
                .map_err(|e| Error::Malformed { line: reader.line_no, message: format!("bad header: {e}") })?;
            if header.format != DATASET_FORMAT {
                return Err(Error::Malformed {
                    line: reader.line_no,
                    message: format!("unknown format '{}', expected '{DATASET_FORMAT}'", header.format),
                });
            }
            if header.schema_version != DATASET_SCHEMA_VERSION {
                return Err(Error::SchemaVersion { found: header.schema_version, expected: DATASET_SCHEMA_VERSION });
            }
            reader.header = Some(header);
        }
        Ok(reader)
    }

    pub fn header(&self) -> Option<&DatasetHeader> {
        self.header.as_ref()
    }

    /// Capacity of the reusable line buffer.
    pub fn buffer_capacity(&self) -> usize {
        self.line.capacity()
    }

    /// Reads the next nonblank line into the buffer; false at end of input.
    fn next_line(&mut self) -> Result<bool> {
        loop {
            self.line.clear();
            if self.input.read_line(&mut self.line)? == 0 {
                return Ok(false);
            }
            self.line_no += 1;
            if !self.line.trim().is_empty() {
                return Ok(true);
            }
        }
    }

    pub fn next_cascade(&mut self) -> Result<Option<Cascade>> {
        if self.header.is_none() || !self.next_line()? {
            return Ok(None);
        }
        let line = self.line_no;
        let malformed = |message: String| Error::Malformed { line, message };
        let record: CascadeRecord = serde_json::from_str(self.line.trim_end()).map_err(|e| malformed(e.to_string()))?;
        let width = self.header.as_ref().map_or(0, |h| h.static_width);
        if record.static_attrs.len() != width {
            return Err(malformed(format!(
                "item '{}' has {} static attributes, header says {width}",
                record.item_id,
                record.static_attrs.len()
            )));
        }
        Cascade::try_from(record).map(Some).map_err(|e| malformed(e.to_string()))
    }
}

impl<R: BufRead> Iterator for DatasetReader<R> {
    type Item = Result<Cascade>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_cascade().transpose()
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let reader = DatasetReader::open(path)?;
    let static_width = reader.header().map_or(0, |h| h.static_width);
    let cascades = reader.collect::<Result<Vec<_>>>()?;
    Ok(Dataset { static_width, cascades })
}

/// Writes the header and records in canonical form.
pub fn write_dataset<W: Write>(mut out: W, cascades: &[Cascade]) -> Result<W> {
    let width = cascades.first().map_or(0, |c| c.static_attrs.len());
    if let Some(c) = cascades.iter().find(|c| c.static_attrs.len() != width) {
        return Err(Error::param(format!(
            "item '{}' has {} static attributes, expected {width}",
            c.item_id,
            c.static_attrs.len()
        )));
    }
    serde_json::to_writer(&mut out, &DatasetHeader::new(width))?;
    out.write_all(b"\n")?;
    for c in cascades {
        serde_json::to_writer(&mut out, &CascadeRecord::from(c))?;
        out.write_all(b"\n")?;
    }
    Ok(out)
}

pub fn save_dataset(path: &Path, cascades: &[Cascade]) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if is_gz(path) {
        // the default gzip header has mtime 0, so output is reproducible
        let gz = write_dataset(GzEncoder::new(file, Compression::default()), cascades)?;
        gz.finish()?.flush()?;
    } else {
        write_dataset(file, cascades)?.flush()?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    open_read(path)?.read_to_string(&mut s)?;
    Ok(s)
}

/// Parses a TOML configuration file.
pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn save_model(path: &Path, model: &ForecastModel) -> Result<()> {
    std::fs::write(path, model.to_json()?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ForecastModel> {
    ForecastModel::from_json(&read_text(path)?)
}
