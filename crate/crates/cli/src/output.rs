//! CSV writers and the sampled-source reader.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chiralq_core::diffops::SampledField;
use chiralq_core::maxwell::EMField;
use chiralq_core::presets::SampledSource;
use chiralq_core::verify::CriterionReport;
use serde::Deserialize;

use crate::CliError;

pub const FIELD_HEADER: [&str; 12] = [
    "t", "x1", "x2", "x3", "s_re", "s_im", "v1_re", "v1_im", "v2_re", "v2_im", "v3_re", "v3_im",
];
pub const EM_HEADER: [&str; 10] = ["t", "x1", "x2", "x3", "e1", "e2", "e3", "h1", "h2", "h3"];
pub const VERIFY_HEADER: [&str; 5] = ["criterion", "title", "passed", "measured", "requirement"];
pub const SOURCE_HEADER: [&str; 8] = ["t", "x1", "x2", "x3", "rho", "j1", "j2", "j3"];

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn write_rows<W, I>(w: W, header: &[&str], rows: I) -> Result<(), CliError>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header).map_err(io)?;
    for r in rows {
        out.write_record(&r).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes one row per node in lexicographic `(it, ix, iy, iz)` order.
pub fn write_field<W: Write>(field: &SampledField, w: W) -> Result<(), CliError> {
    let g = field.grid();
    let rows = field.values().iter().enumerate().map(|(lin, v)| {
        let (t, x) = g.coord(g.unravel(lin));
        [t, x[0], x[1], x[2]]
            .into_iter()
            .chain(v.components())
            .map(fmt_f64)
            .collect()
    });
    write_rows(w, &FIELD_HEADER, rows)
}

/// [`write_field`] into a file.
pub fn emit_csv(field: &SampledField, path: &Path) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_field(field, BufWriter::new(f))
}

pub fn write_em<W: Write>(em: &EMField, w: W) -> Result<(), CliError> {
    let g = em.grid();
    let rows = (0..g.len()).map(|lin| {
        let (t, x) = g.coord(g.unravel(lin));
        [t, x[0], x[1], x[2]]
            .into_iter()
            .chain(em.e()[lin])
            .chain(em.h()[lin])
            .map(fmt_f64)
            .collect()
    });
    write_rows(w, &EM_HEADER, rows)
}

pub fn write_reports<W: Write>(reports: &[CriterionReport], w: W) -> Result<(), CliError> {
    let rows = reports.iter().map(|r| {
        vec![
            r.id.to_string(),
            r.title.to_string(),
            if r.passed { "pass" } else { "fail" }.to_string(),
            r.measured.clone(),
            r.requirement.clone(),
        ]
    });
    write_rows(w, &VERIFY_HEADER, rows)
}

/// Human-readable pass/fail table.
pub fn report_table(reports: &[CriterionReport]) -> String {
    let width = reports.iter().map(|r| r.title.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{} {:<width$}  {verdict}  {}\n", r.id, r.title, r.measured));
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    s.push_str(&format!("{passed}/{} criteria passed\n", reports.len()));
    s
}

#[derive(Deserialize)]
struct SourceRow {
    t: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    rho: f64,
    j1: f64,
    j2: f64,
    j3: f64,
}

/// Reads a `t,x1,x2,x3,rho,j1,j2,j3` table.
pub fn read_sampled_source(path: &Path) -> Result<SampledSource, CliError> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f);
    let header = rd.headers().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if header.iter().ne(SOURCE_HEADER) {
        return Err(CliError::Config(format!(
            "{}: expected header {}",
            path.display(),
            SOURCE_HEADER.join(",")
        )));
    }
    let rows = rd
        .deserialize()
        .map(|r| {
            let r: SourceRow = r.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok([r.t, r.x1, r.x2, r.x3, r.rho, r.j1, r.j2, r.j3])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    SampledSource::from_rows(&rows).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
