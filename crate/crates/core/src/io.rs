//! Plain-text colored point files.
//!
//! ```text
//! d s n periodic|bounded
//! index x_1 ... x_d color
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are
//! written with Rust's shortest round-trip formatting, so files reload
//! bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::chromatic::Coloring;
use crate::error::{Error, Result};
use crate::geometry::{PointD, PointSet};

/// A colored point set as stored in a file.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredPoints {
    pub points: PointSet,
    pub coloring: Coloring,
}

pub fn to_string(points: &PointSet, coloring: &Coloring) -> Result<String> {
    if coloring.chi.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} colors for {} points",
            coloring.chi.len(),
            points.len()
        )));
    }
    let mut out = String::new();
    let kind = if points.periodic { "periodic" } else { "bounded" };
    let _ = writeln!(out, "{} {} {} {kind}", points.dim, coloring.s, points.len());
    for (p, &c) in points.points.iter().zip(&coloring.chi) {
        let _ = write!(out, "{}", p.index);
        for x in &p.coords {
            let _ = write!(out, " {x:?}");
        }
        let _ = writeln!(out, " {c}");
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<ColoredPoints> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad = |line: usize, message: String| Error::Parse { line, message };
    if fields.len() != 4 {
        return Err(bad(hline, "header must be `d s n periodic|bounded`".into()));
    }
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(hline, format!("invalid {what} `{s}`")));
    let d = num(fields[0], "dimension")?;
    let s = num(fields[1], "color count")?;
    let n = num(fields[2], "point count")?;
    let periodic = match fields[3] {
        "periodic" => true,
        "bounded" => false,
        other => return Err(bad(hline, format!("expected `periodic` or `bounded`, found `{other}`"))),
    };
    let mut pts = Vec::with_capacity(n);
    let mut chi = Vec::with_capacity(n);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != d + 2 {
            return Err(bad(line, format!("expected {} fields, found {}", d + 2, f.len())));
        }
        let index = f[0].parse::<usize>().map_err(|_| bad(line, format!("invalid index `{}`", f[0])))?;
        let coords = f[1..=d]
            .iter()
            .map(|x| x.parse::<f64>().map_err(|_| bad(line, format!("invalid coordinate `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        let c = f[d + 1].parse::<usize>().map_err(|_| bad(line, format!("invalid color `{}`", f[d + 1])))?;
        if c > s {
            return Err(bad(line, format!("color {c} exceeds s = {s}")));
        }
        pts.push(PointD::new(index, coords));
        chi.push(c);
    }
    if pts.len() != n {
        return Err(Error::Parse { line: hline, message: format!("header announces {n} points, found {}", pts.len()) });
    }
    let points = PointSet { dim: d, points: pts, periodic };
    points.validate()?;
    Ok(ColoredPoints { points, coloring: Coloring::new(s, chi)? })
}

pub fn read(path: &Path) -> Result<ColoredPoints> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write(path: &Path, points: &PointSet, coloring: &Coloring) -> Result<()> {
    std::fs::write(path, to_string(points, coloring)?)?;
    Ok(())
}
