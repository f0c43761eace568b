//! CSV and JSON encodings of the solver's records, and atomic file output.
//!
//! Floats are written with 17 significant digits so that every value
//! reloads to the identical `f64`.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::continuation::{Branch, BifurcationDiagram, DiagramPoint};
use crate::error::{Error, Result};
use crate::model::{ProfileSample, RadialProfile, Sample, Trajectory};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: '{field}'")))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn csv_rows<R: Read>(reader: R, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new().from_reader(reader);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Parse(format!("expected header {header:?}, found {found:?}")));
    }
    r.records().map(|rec| rec.map_err(Error::from)).collect()
}

/// `t,u,du`, one row per sample.
pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    csv_bytes(
        &["t", "u", "du"],
        traj.samples
            .iter()
            .map(|s| vec![fmt_f64(s.t), fmt_f64(s.u), fmt_f64(s.du)]),
    )
}

pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<Vec<Sample>> {
    csv_rows(reader, &["t", "u", "du"])?
        .iter()
        .map(|rec| {
            Ok(Sample {
                t: parse_f64(&rec[0])?,
                u: parse_f64(&rec[1])?,
                du: parse_f64(&rec[2])?,
            })
        })
        .collect()
}

/// `r,w,phi`, ascending in `r`.
pub fn profile_csv(profile: &RadialProfile) -> Result<Vec<u8>> {
    csv_bytes(
        &["r", "w", "phi"],
        profile
            .samples
            .iter()
            .map(|s| vec![fmt_f64(s.r), fmt_f64(s.w), fmt_f64(s.phi)]),
    )
}

pub fn read_profile_csv<R: Read>(reader: R) -> Result<RadialProfile> {
    let samples = csv_rows(reader, &["r", "w", "phi"])?
        .iter()
        .map(|rec| {
            Ok(ProfileSample {
                r: parse_f64(&rec[0])?,
                w: parse_f64(&rec[1])?,
                phi: parse_f64(&rec[2])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RadialProfile { samples })
}

/// `lambda,a,branch`.
pub fn diagram_csv(diagram: &BifurcationDiagram) -> Result<Vec<u8>> {
    csv_bytes(
        &["lambda", "a", "branch"],
        diagram
            .points
            .iter()
            .map(|p| vec![fmt_f64(p.lambda), fmt_f64(p.a), p.branch.as_str().to_owned()]),
    )
}

pub fn read_diagram_csv<R: Read>(reader: R) -> Result<Vec<DiagramPoint>> {
    csv_rows(reader, &["lambda", "a", "branch"])?
        .iter()
        .map(|rec| {
            Ok(DiagramPoint {
                lambda: parse_f64(&rec[0])?,
                a: parse_f64(&rec[1])?,
                branch: rec[2].parse::<Branch>()?,
            })
        })
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Write `bytes` to a temporary file next to `path` and rename it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundaryKind, SeriesLaunch};

    #[test]
    fn float_format_roundtrips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            assert_eq!(parse_f64(&fmt_f64(x)).unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn trajectory_csv_roundtrip_and_layout() {
        let traj = Trajectory {
            lambda: 1.0,
            kind: BoundaryKind::Dirichlet,
            launch: SeriesLaunch::new(-1.0, 1.0),
            samples: vec![
                Sample { t: 0.1, u: -0.1, du: -1.0 / 3.0 },
                Sample { t: 0.5, u: 0.0, du: 2.0 },
            ],
            diverged: false,
        };
        let bytes = trajectory_csv(&traj).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("t,u,du\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_trajectory_csv(bytes.as_slice()).unwrap(), traj.samples);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(
            read_profile_csv("t,u,du\n1,2,3\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
