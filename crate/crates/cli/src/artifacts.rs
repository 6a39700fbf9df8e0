//! Writing output files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, Output};
use crate::error::CliError;

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
# Plots every CSV in this directory against its first column.
# Rows are grouped by a trailing text column (e.g. regime) when present.
import csv
import pathlib

import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
for path in sorted(here.glob("*.csv")):
    with path.open() as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        continue
    header, body = rows[0], rows[1:]

    def number(s):
        try:
            return float(s)
        except ValueError:
            return None

    numeric = [i for i in range(len(header)) if number(body[0][i]) is not None]
    if len(numeric) < 2:
        continue
    x = [number(r[numeric[0]]) for r in body]
    fig, axes = plt.subplots(len(numeric) - 1, 1, sharex=True, squeeze=False)
    for ax, col in zip(axes[:, 0], numeric[1:]):
        ax.plot(x, [number(r[col]) for r in body], lw=1)
        ax.set_ylabel(header[col])
    axes[-1, 0].set_xlabel(header[numeric[0]])
    fig.suptitle(path.stem)
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)
"#;

pub struct Artifacts {
    dir: PathBuf,
    output: Output,
    plot_script: bool,
    written: Vec<PathBuf>,
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

impl Artifacts {
    pub fn new(dir: PathBuf, output: Output, plot_script: bool) -> Self {
        Artifacts {
            dir,
            output,
            plot_script,
            written: Vec::new(),
        }
    }

    fn ensure_dir(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|source| CliError::Write {
            path: self.dir.clone(),
            source,
        })
    }

    fn put(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        write(&path, content)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        if self.output.wants(Format::Csv) {
            self.put(name, content)?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if self.output.wants(Format::Json) {
            let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
            text.push('\n');
            self.put(name, &text)?;
        }
        Ok(())
    }

    /// Adds the plotting script if requested and any CSV was written.
    pub fn finish(mut self) -> Result<Vec<PathBuf>, CliError> {
        let any_csv = self
            .written
            .iter()
            .any(|p| p.extension().is_some_and(|e| e == "csv"));
        if self.plot_script && any_csv {
            self.put("plot.py", PLOT_SCRIPT)?;
        }
        Ok(self.written)
    }
}
