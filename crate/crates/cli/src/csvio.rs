//! CSV output: `.` decimal separator, 17 significant digits, LF line
//! endings, partial files removed on error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::Failure;

/// 17 significant digits, locale independent.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    path: std::path::PathBuf,
    writer: Option<BufWriter<File>>,
    rows: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self, Failure> {
        let file = File::create(path)?;
        let mut writer = BufWriter::new(file);
        writer.write_all(header.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(CsvWriter {
            path: path.to_path_buf(),
            writer: Some(writer),
            rows: 0,
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), Failure> {
        let writer = self.writer.as_mut().expect("writer closed");
        writer.write_all(fields.join(",").as_bytes())?;
        writer.write_all(b"\n")?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<usize, Failure> {
        let mut writer = self.writer.take().expect("writer closed");
        writer.flush()?;
        Ok(self.rows)
    }

    /// Removes the partially written file after a failed sweep.
    pub fn discard(mut self) {
        self.writer.take();
        let _ = std::fs::remove_file(&self.path);
    }
}
