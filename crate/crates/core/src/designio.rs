//! Point-set files.
//!
//! Two layouts are understood, matching the published design catalogs:
//!
//! * `triples`: one point per line, `x y z` separated by whitespace;
//! * `flat`: one coordinate per line in `x, y, z, x, y, z, …` order.
//!
//! Lines starting with `#` are comments and blank lines are ignored. The
//! layout is detected from the number of fields per data line. Coordinates
//! are written with `{:.16e}`, i.e. 17 significant digits, which round-trips
//! every `f64` exactly.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{Design, SpherePoint};

/// Largest accepted `|‖v‖ - 1|` for a parsed point.
pub const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    #[default]
    Triples,
    Flat,
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triples" => Ok(FileFormat::Triples),
            "flat" => Ok(FileFormat::Flat),
            other => Err(Error::Domain(format!("unknown format `{other}` (expected triples or flat)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignFile {
    pub format: FileFormat,
    pub comments: Vec<String>,
    pub design: Design,
}

struct DataLine {
    line: usize,
    values: Vec<f64>,
}

fn tokenize(text: &str) -> Result<(Vec<String>, Vec<DataLine>)> {
    let mut comments = Vec::new();
    let mut data = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(c) = trimmed.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let mut values = Vec::new();
        let mut rest = line;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let after = &rest[start..];
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            let token = &after[..end];
            let value = token.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                line: i + 1,
                column: offset + start + 1,
                token: token.to_string(),
            })?;
            values.push(value);
            offset += start + end;
            rest = &after[end..];
        }
        data.push(DataLine { line: i + 1, values });
    }
    Ok((comments, data))
}

fn to_point(v: [f64; 3], index: usize) -> Result<SpherePoint> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(Error::OffSphere { index, norm });
    }
    SpherePoint::from_vector(v)
}

/// Parses a design file, detecting the layout unless `format` is given.
pub fn parse_file(text: &str, format: Option<FileFormat>) -> Result<DesignFile> {
    let (comments, data) = tokenize(text)?;
    let Some(first) = data.first() else {
        return Err(Error::Format { line: 0, msg: "no data lines".into() });
    };
    let detected = match first.values.len() {
        3 => FileFormat::Triples,
        1 => FileFormat::Flat,
        k => {
            return Err(Error::Format {
                line: first.line,
                msg: format!("expected 1 or 3 fields, found {k}"),
            })
        }
    };
    let format = format.unwrap_or(detected);
    let width = match format {
        FileFormat::Triples => 3,
        FileFormat::Flat => 1,
    };
    if let Some(bad) = data.iter().find(|d| d.values.len() != width) {
        return Err(Error::Format {
            line: bad.line,
            msg: format!("expected {width} field(s), found {}", bad.values.len()),
        });
    }
    let coords: Vec<f64> = data.into_iter().flat_map(|d| d.values).collect();
    if coords.len() % 3 != 0 {
        return Err(Error::Format {
            line: 0,
            msg: format!("{} coordinates is not a multiple of 3", coords.len()),
        });
    }
    let points = coords
        .chunks_exact(3)
        .enumerate()
        .map(|(i, c)| to_point([c[0], c[1], c[2]], i))
        .collect::<Result<Vec<_>>>()?;
    let mut design = Design::new(points)?;
    if let Some(first) = comments.first() {
        design = design.with_label(first.clone());
    }
    Ok(DesignFile { format, comments, design })
}

pub fn parse(text: &str) -> Result<Design> {
    parse_file(text, None).map(|f| f.design)
}

/// Serializes with `precision` significant digits (clamped to 6..=17).
pub fn write(design: &Design, precision: usize, format: FileFormat) -> String {
    let digits = precision.clamp(6, 17) - 1;
    let mut out = String::new();
    if let Some(label) = design.label() {
        out.push_str("# ");
        out.push_str(&label.replace('\n', " "));
        out.push('\n');
    }
    for p in design.points() {
        let [x, y, z] = p.xyz();
        match format {
            FileFormat::Triples => {
                out.push_str(&format!("{x:.digits$e} {y:.digits$e} {z:.digits$e}\n"));
            }
            FileFormat::Flat => {
                for c in [x, y, z] {
                    out.push_str(&format!("{c:.digits$e}\n"));
                }
            }
        }
    }
    out
}

/// Reads observations, one number per line, `#` comments allowed.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let (_, data) = tokenize(text)?;
    let mut out = Vec::with_capacity(data.len());
    for d in data {
        if d.values.len() != 1 {
            return Err(Error::Format {
                line: d.line,
                msg: format!("expected one value, found {}", d.values.len()),
            });
        }
        out.push(d.values[0]);
    }
    Ok(out)
}

pub fn write_values(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{platonic, Platonic};
    use crate::cubature::{strength, DEFAULT_TOL};
    use crate::sphere::random_design;
    use proptest::prelude::*;

    #[test]
    fn parse_two_poles() {
        let d = parse("0 0 1\n0 0 -1\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.points()[0].xyz(), [0.0, 0.0, 1.0]);
        assert_eq!(d.points()[1].xyz(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn flat_tetrahedron_verifies() {
        let s = 1.0 / 3f64.sqrt();
        let mut text = String::from("# tetrahedron, flat layout\n");
        for v in [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]] {
            for c in v {
                text.push_str(&format!("{c:.16}\n"));
            }
        }
        let f = parse_file(&text, None).unwrap();
        assert_eq!(f.format, FileFormat::Flat);
        assert_eq!(f.design.len(), 4);
        assert_eq!(strength(&f.design, 6, DEFAULT_TOL).strength, 2);
        assert_eq!(f.comments, vec!["tetrahedron, flat layout".to_string()]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("0 0 1.02"), Err(Error::OffSphere { index: 0, .. })));
        assert!(matches!(parse("0 0 1\n0 1\n"), Err(Error::Format { line: 2, .. })));
        assert!(matches!(parse("0\n0\n1\n0\n"), Err(Error::Format { .. })));
        assert_eq!(
            parse("0 0 1\n0 abc 1\n"),
            Err(Error::Parse { line: 2, column: 3, token: "abc".into() })
        );
        assert!(parse("# only comments\n\n").is_err());
        assert!(parse("0 0 0 1\n").is_err());
        assert!(parse("nan 0 1\n").is_err());
    }

    #[test]
    fn tolerant_of_whitespace_crlf_comments_and_notation() {
        let a = parse("# c\r\n0 0 1  \r\n\r\n  1e0 0.0 -0\t\r\n").unwrap();
        assert_eq!(a.points()[0].xyz(), [0.0, 0.0, 1.0]);
        assert_eq!(a.points()[1].xyz()[0], 1.0);
    }

    #[test]
    fn near_unit_points_are_normalized() {
        let d = parse("0 0 1.0000005\n").unwrap();
        assert_eq!(d.points()[0].z(), 1.0);
    }

    #[test]
    fn format_override() {
        // three single-value lines read as flat even if forced
        let f = parse_file("0\n0\n1\n", Some(FileFormat::Flat)).unwrap();
        assert_eq!(f.design.len(), 1);
        assert!(parse_file("0 0 1\n", Some(FileFormat::Flat)).is_err());
    }

    #[test]
    fn write_examples() {
        let poles = Design::from_vectors(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        let flat = write(&poles, 17, FileFormat::Flat);
        assert_eq!(flat.lines().count(), 6);
        let oct = platonic(Platonic::Octahedron);
        let back = parse(&write(&oct, 6, FileFormat::Triples)).unwrap();
        for (a, b) in oct.points().iter().zip(back.points()) {
            for (x, y) in a.xyz().iter().zip(b.xyz()) {
                assert!((x - y).abs() <= 1e-6);
            }
        }
        assert_eq!(back.label(), Some("octahedron"));
    }

    #[test]
    fn values_round_trip() {
        let v = vec![1.5, -2.25e-7, 3.0];
        assert_eq!(parse_values(&write_values(&v)).unwrap(), v);
        assert!(parse_values("1 2\n").is_err());
    }

    proptest! {
        #[test]
        fn write_parse_is_bitwise(n in 1usize..60, seed in any::<u64>(), flat in any::<bool>()) {
            let d = random_design(n, seed);
            let fmt = if flat { FileFormat::Flat } else { FileFormat::Triples };
            let back = parse(&write(&d, 17, fmt)).unwrap();
            for (a, b) in d.points().iter().zip(back.points()) {
                for (x, y) in a.xyz().iter().zip(b.xyz()) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }
}
