//! Output formatting helpers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// 17 significant digits, enough to round-trip any f64 exactly.
pub fn number(x: f64) -> String {
    assert!(x.is_finite(), "refusing to emit non-finite value {x}");
    format!("{x:.16e}")
}

/// A CSV sink that is either a file or stdout.
pub enum CsvSink {
    File(BufWriter<File>),
    Stdout(io::Stdout),
}

impl CsvSink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        match path {
            Some(path) => Ok(CsvSink::File(BufWriter::new(File::create(path)?))),
            None => Ok(CsvSink::Stdout(io::stdout())),
        }
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        let line = fields.join(",");
        match self {
            CsvSink::File(w) => writeln!(w, "{line}"),
            CsvSink::Stdout(w) => writeln!(w, "{line}"),
        }
    }

    pub fn header(&mut self, fields: &[&str]) -> io::Result<()> {
        self.row(&fields.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            CsvSink::File(mut w) => w.flush(),
            CsvSink::Stdout(mut w) => w.flush(),
        }
    }
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> io::Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, value).map_err(io::Error::other)?;
    writeln!(writer)?;
    writer.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 13.0 / 14.0, 2.626_403_2e-17, 1e300] {
            let printed = number(x);
            assert_eq!(printed.parse::<f64>().unwrap(), x, "{printed}");
        }
    }
}
