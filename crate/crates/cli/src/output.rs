//! Where results go: `--output`, else `$ANNULI_OUT_DIR/<name>`, else stdout.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

pub const OUT_DIR_ENV: &str = "ANNULI_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub enum Sink {
    Stdout(io::Stdout),
    File(BufWriter<File>, PathBuf),
}

impl Sink {
    /// `default_name` applies only when the output directory variable is set.
    pub fn open(output: Option<&Path>, default_name: &str) -> Result<Self, CliError> {
        let path = match output {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)),
        };
        match path {
            None => Ok(Sink::Stdout(io::stdout())),
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
                }
                let f = File::create(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                Ok(Sink::File(BufWriter::new(f), p))
            }
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut s) => s.flush().map_err(|e| CliError::Io(e.to_string())),
            Sink::File(mut f, p) => {
                f.flush().map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                eprintln!("wrote {}", p.display());
                Ok(())
            }
        }
    }

    pub fn write_json(mut self, v: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(v).expect("json values serialize");
        writeln!(self, "{text}").map_err(|e| CliError::Io(e.to_string()))?;
        self.finish()
    }

    pub fn write_text(mut self, text: &str) -> Result<(), CliError> {
        write!(self, "{text}").map_err(|e| CliError::Io(e.to_string()))?;
        self.finish()
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(s) => s.write(buf),
            Sink::File(f, _) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f, _) => f.flush(),
        }
    }
}
