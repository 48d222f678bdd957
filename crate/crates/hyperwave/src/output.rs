//! CSV output with a commented provenance header.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

use crate::Result;

/// Provenance written as `#`-prefixed lines ahead of the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn lines(&self) -> Vec<String> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut out = vec![
            format!("# hyperwave {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
            format!("# config: {}", self.config),
        ];
        if let Some(seed) = self.seed {
            out.push(format!("# seed: {seed}"));
        }
        out.push(format!("# unix-time: {stamp}"));
        out
    }
}

/// Opens `path` for writing; `-` is standard output.
pub fn open(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

/// A CSV writer that has already emitted the provenance block.
pub struct CsvSink {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvSink {
    pub fn create(path: &Path, provenance: &Provenance, header: &[&str]) -> Result<Self> {
        let mut raw = open(path)?;
        for line in provenance.lines() {
            writeln!(raw, "{line}")?;
        }
        let mut writer = csv::Writer::from_writer(raw);
        writer.write_record(header)?;
        Ok(CsvSink { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Round-trippable float formatting.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
