//! Reading and writing polylines (GeoJSON, WKT, CSV) and plain number lists.
//!
//! A vertex list whose first and last vertices coincide is read as a ring:
//! the result is closed and the repeated vertex is dropped. Consecutive
//! duplicate vertices are dropped as well. Writers emit rings with the first
//! vertex repeated, so every format round-trips through its reader.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryFormat {
    /// GeoJSON LineString or Polygon exterior ring, bare or inside a Feature/FeatureCollection.
    GeoJson,
    /// WKT `LINESTRING` (or the exterior ring of a `POLYGON`).
    Wkt,
    /// One `x,y` pair per line, optional header, `#` comments.
    Csv,
}

impl GeometryFormat {
    pub fn name(self) -> &'static str {
        match self {
            GeometryFormat::GeoJson => "geojson-linestring",
            GeometryFormat::Wkt => "wkt",
            GeometryFormat::Csv => "csv-xy",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "geojson" | "json" => Some(GeometryFormat::GeoJson),
            "wkt" => Some(GeometryFormat::Wkt),
            "csv" | "txt" | "xy" => Some(GeometryFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for GeometryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geojson" | "geojson-linestring" => Ok(GeometryFormat::GeoJson),
            "wkt" => Ok(GeometryFormat::Wkt),
            "csv" | "csv-xy" => Ok(GeometryFormat::Csv),
            other => Err(Error::invalid(format!("unknown geometry format '{other}'"))),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn parse_geometry(path: &Path, format: GeometryFormat) -> Result<Polyline> {
    let text = read_to_string(path)?;
    parse_geometry_str(&text, format, &path.display().to_string())
}

/// `source_name` labels parse errors.
pub fn parse_geometry_str(text: &str, format: GeometryFormat, source_name: &str) -> Result<Polyline> {
    let vertices = match format {
        GeometryFormat::GeoJson => geojson_vertices(text, source_name)?,
        GeometryFormat::Wkt => WktParser::new(text, source_name).parse()?,
        GeometryFormat::Csv => csv_vertices(text, source_name)?,
    };
    polyline_from_vertices(vertices)
}

fn polyline_from_vertices(mut vertices: Vec<Point>) -> Result<Polyline> {
    vertices.dedup();
    if vertices.len() < 2 {
        return Err(Error::insufficient(format!(
            "geometry has {} distinct vertices, need at least 2",
            vertices.len()
        )));
    }
    let ring = vertices.len() > 2 && vertices.first() == vertices.last();
    Polyline::from_vertices_lossy(vertices, ring)
}

fn parse_error(source_name: &str, location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        location,
        message: message.into(),
    }
}

fn geojson_vertices(text: &str, source_name: &str) -> Result<Vec<Point>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        parse_error(
            source_name,
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let err = |msg: String| parse_error(source_name, "document".into(), msg);
    let geometry = find_geometry(&value).ok_or_else(|| {
        err("no LineString or Polygon geometry found".into())
    })?;
    let coords = match geometry.get("type").and_then(Value::as_str) {
        Some("LineString") => geometry.get("coordinates"),
        Some("Polygon") => geometry
            .get("coordinates")
            .and_then(Value::as_array)
            .and_then(|rings| rings.first()),
        _ => None,
    }
    .and_then(Value::as_array)
    .ok_or_else(|| err("geometry has no coordinate array".into()))?;
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xy = c.as_array().filter(|a| a.len() >= 2);
            match xy.map(|a| (a[0].as_f64(), a[1].as_f64())) {
                Some((Some(x), Some(y))) => Ok(Point::new(x, y)),
                _ => Err(err(format!("coordinate {i} is not a numeric position"))),
            }
        })
        .collect()
}

fn find_geometry(v: &Value) -> Option<&Value> {
    match v.get("type")?.as_str()? {
        "LineString" | "Polygon" => Some(v),
        "Feature" => find_geometry(v.get("geometry")?),
        "FeatureCollection" => v.get("features")?.as_array()?.iter().find_map(find_geometry),
        "GeometryCollection" => v.get("geometries")?.as_array()?.iter().find_map(find_geometry),
        _ => None,
    }
}

fn csv_vertices(text: &str, source_name: &str) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let location = e
                .position()
                .map_or_else(|| "unknown position".to_string(), |p| format!("line {}", p.line()));
            parse_error(source_name, location, e.to_string())
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize| record.get(i).and_then(|f| f.parse::<f64>().ok());
        match (field(0), field(1)) {
            (Some(x), Some(y)) => out.push(Point::new(x, y)),
            // first non-comment row may be a header
            _ if out.is_empty() && row == 0 => {}
            _ => {
                return Err(parse_error(
                    source_name,
                    format!("line {line}"),
                    "expected two numeric fields 'x,y'",
                ))
            }
        }
    }
    Ok(out)
}

/// Recursive-descent reader for `LINESTRING` and `POLYGON` WKT.
struct WktParser<'a> {
    text: &'a str,
    pos: usize,
    source_name: &'a str,
}

impl<'a> WktParser<'a> {
    fn new(text: &'a str, source_name: &'a str) -> Self {
        WktParser {
            text,
            pos: 0,
            source_name,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        parse_error(self.source_name, format!("byte {}", self.pos), message)
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        let hit = self.text[self.pos..].starts_with(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
            .unwrap_or(rest.len());
        let v = rest[..len]
            .parse::<f64>()
            .map_err(|_| self.error("expected a number"))?;
        self.pos += len;
        Ok(v)
    }

    fn parse(mut self) -> Result<Vec<Point>> {
        let tag = self.word().to_ascii_uppercase();
        let polygon = match tag.as_str() {
            "LINESTRING" => false,
            "POLYGON" => true,
            "" => return Err(self.error("expected a geometry tag")),
            other => return Err(self.error(format!("unsupported geometry '{other}'"))),
        };
        let dims = match self.word().to_ascii_uppercase().as_str() {
            "" => None,
            "Z" | "M" => Some(3),
            "ZM" => Some(4),
            "EMPTY" => return Ok(Vec::new()),
            other => return Err(self.error(format!("unexpected '{other}'"))),
        };
        self.expect('(')?;
        if polygon {
            self.expect('(')?;
        }
        let points = self.coordinates(dims)?;
        if polygon {
            // inner rings are ignored
            while self.eat(',') {
                self.expect('(')?;
                self.coordinates(dims)?;
            }
            self.expect(')')?;
        }
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.error("trailing characters after geometry"));
        }
        Ok(points)
    }

    /// Coordinate list up to and including the closing parenthesis.
    fn coordinates(&mut self, dims: Option<usize>) -> Result<Vec<Point>> {
        let mut points = Vec::new();
        loop {
            let x = self.number()?;
            let y = self.number()?;
            let mut extra = 0;
            loop {
                self.skip_ws();
                match self.text[self.pos..].chars().next() {
                    Some(',') | Some(')') => break,
                    _ => {
                        self.number()?;
                        extra += 1;
                    }
                }
            }
            if let Some(d) = dims {
                if extra != d - 2 {
                    return Err(self.error(format!("expected {d} ordinates")));
                }
            } else if extra > 2 {
                return Err(self.error("too many ordinates"));
            }
            points.push(Point::new(x, y));
            if self.eat(')') {
                return Ok(points);
            }
            self.expect(',')?;
        }
    }
}

/// Numbers separated by whitespace, commas or semicolons; `#` starts a comment.
pub fn parse_numbers_str(text: &str, source_name: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for token in content
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|t| !t.is_empty())
        {
            let v = token.parse::<f64>().map_err(|_| {
                parse_error(
                    source_name,
                    format!("line {}", line_no + 1),
                    format!("'{token}' is not a number"),
                )
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    parse_numbers_str(&text, &path.display().to_string())
}

fn ring_vertices(curve: &Polyline) -> impl Iterator<Item = &Point> {
    let closing = curve.is_closed().then(|| &curve.points()[0]);
    curve.points().iter().chain(closing)
}

pub fn to_csv(curve: &Polyline) -> String {
    let mut out = String::from("x,y\n");
    for p in ring_vertices(curve) {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

pub fn to_geojson(curve: &Polyline) -> String {
    let coords: Vec<[f64; 2]> = ring_vertices(curve).map(|p| [p.x, p.y]).collect();
    let value = serde_json::json!({
        "type": "Feature",
        "properties": {},
        "geometry": { "type": "LineString", "coordinates": coords },
    });
    let mut s = serde_json::to_string_pretty(&value).expect("geometry serializes");
    s.push('\n');
    s
}

pub fn to_wkt(curve: &Polyline) -> String {
    let coords: Vec<String> = ring_vertices(curve).map(|p| format!("{} {}", p.x, p.y)).collect();
    format!("LINESTRING ({})\n", coords.join(", "))
}

pub fn format_geometry(curve: &Polyline, format: GeometryFormat) -> String {
    match format {
        GeometryFormat::GeoJson => to_geojson(curve),
        GeometryFormat::Wkt => to_wkt(curve),
        GeometryFormat::Csv => to_csv(curve),
    }
}

pub fn write_geometry(curve: &Polyline, path: &Path, format: GeometryFormat) -> Result<()> {
    std::fs::write(path, format_geometry(curve, format)).map_err(|e| Error::io(path, e))
}
