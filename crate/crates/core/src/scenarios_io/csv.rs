//! CSV files: `diag.csv`, `snap_XXXXXX.csv` and the `snapshots.csv` time index.
//!
//! Reals are written as `{:.16e}`, which is 17 significant digits and round-trips
//! every finite `f64` exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::Snapshot;
use crate::diagnostics::DiagRecord;
use crate::error::{Error, Result};
use crate::stepper::RunSink;

pub const DIAG_HEADER: &str =
    "t,A,B,min_sigma,arc_chord,energy,e_rt,mean_omega,max_speed,uniformity,solver_residual,solver_iters";
pub const SNAPSHOT_HEADER: &str = "alpha,x,y,omega,phi,sigma,c";
const INDEX_HEADER: &str = "index,t";

pub fn snapshot_file_name(index: usize) -> String {
    format!("snap_{index:06}.csv")
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_diag_header(w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{DIAG_HEADER}")
}

pub fn write_diag(rec: &DiagRecord, w: &mut impl Write) -> std::io::Result<()> {
    let reals = [
        rec.t,
        rec.a,
        rec.b,
        rec.min_sigma,
        rec.arc_chord,
        rec.energy,
        rec.e_rt,
        rec.mean_omega,
        rec.max_speed,
        rec.uniformity,
        rec.solver_residual,
    ];
    let mut line: Vec<String> = reals.iter().map(|v| real(*v)).collect();
    line.push(rec.solver_iters.to_string());
    writeln!(w, "{}", line.join(","))
}

fn fields(line: &str, row: usize, want: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != want {
        return Err(Error::Parse(format!("row {row}: expected {want} fields, got {}", f.len())));
    }
    Ok(f)
}

fn num<T: std::str::FromStr>(s: &str, row: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("row {row}: cannot parse `{s}`")))
}

fn check_header(text: &str, header: &str) -> Result<()> {
    match text.lines().next() {
        Some(h) if h.trim() == header => Ok(()),
        Some(h) => Err(Error::Parse(format!("unexpected header `{h}`"))),
        None => Err(Error::Parse("empty file".into())),
    }
}

pub fn parse_diag(text: &str) -> Result<Vec<DiagRecord>> {
    check_header(text, DIAG_HEADER)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(line, i + 1, 12)?;
        let r = |k: usize| num::<f64>(f[k], i + 1);
        out.push(DiagRecord {
            t: r(0)?,
            a: r(1)?,
            b: r(2)?,
            min_sigma: r(3)?,
            arc_chord: r(4)?,
            energy: r(5)?,
            e_rt: r(6)?,
            mean_omega: r(7)?,
            max_speed: r(8)?,
            uniformity: r(9)?,
            solver_residual: r(10)?,
            solver_iters: num(f[11], i + 1)?,
        });
    }
    Ok(out)
}

pub fn write_snapshot(snap: &Snapshot, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for j in 0..snap.len() {
        let row = [
            snap.alpha[j],
            snap.x[j],
            snap.y[j],
            snap.omega[j],
            snap.phi[j],
            snap.sigma[j],
            snap.c[j],
        ];
        let line: Vec<String> = row.iter().map(|v| real(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Parses a snapshot file; the time lives in `snapshots.csv`, so it is passed in.
pub fn parse_snapshot(text: &str, t: f64) -> Result<Snapshot> {
    check_header(text, SNAPSHOT_HEADER)?;
    let mut cols: [Vec<f64>; 7] = Default::default();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(line, i + 1, 7)?;
        for (c, s) in cols.iter_mut().zip(f) {
            c.push(num(s, i + 1)?);
        }
    }
    let [alpha, x, y, omega, phi, sigma, c] = cols;
    Ok(Snapshot {
        t,
        alpha,
        x,
        y,
        omega,
        phi,
        sigma,
        c,
    })
}

/// Writes a run directory: `diag.csv`, snapshots, and `snapshots.csv` mapping index to time.
pub struct CsvSink {
    dir: PathBuf,
    diag: BufWriter<File>,
    index: BufWriter<File>,
}

impl CsvSink {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let open = |name: &str, header: &str| -> Result<BufWriter<File>> {
            let path = dir.join(name);
            let mut w = BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?);
            writeln!(w, "{header}").map_err(|e| Error::io(&path, e))?;
            Ok(w)
        };
        Ok(CsvSink {
            dir: dir.to_path_buf(),
            diag: open("diag.csv", DIAG_HEADER)?,
            index: open("snapshots.csv", INDEX_HEADER)?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn flush(&mut self) -> Result<()> {
        self.diag.flush().map_err(|e| Error::io(self.dir.join("diag.csv"), e))?;
        self.index.flush().map_err(|e| Error::io(self.dir.join("snapshots.csv"), e))
    }
}

impl RunSink for CsvSink {
    fn on_diag(&mut self, record: &DiagRecord) -> Result<()> {
        write_diag(record, &mut self.diag).map_err(|e| Error::io(self.dir.join("diag.csv"), e))
    }

    fn on_snapshot(&mut self, index: usize, snap: &Snapshot) -> Result<()> {
        let path = self.dir.join(snapshot_file_name(index));
        let mut w = BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?);
        write_snapshot(snap, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        writeln!(self.index, "{index},{}", real(snap.t)).map_err(|e| Error::io(self.dir.join("snapshots.csv"), e))
    }
}

impl Drop for CsvSink {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}
