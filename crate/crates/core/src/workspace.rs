//! Problem instances: planar subpaths with endpoint coordinates and arc lengths.
//!
//! Workspace files are UTF-8 JSON:
//!
//! ```json
//! {"subpaths": [{"start": [0.0, 0.0], "end": [1.0, 0.0], "length": 1.5}]}
//! ```
//!
//! `length` may be omitted, in which case the subpath is a straight segment and
//! its arc length is the endpoint distance.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subpath {
    pub start: Point,
    pub end: Point,
    pub arc_length: f64,
}

impl Subpath {
    /// A subpath with an explicit arc length. Fails if the endpoints coincide,
    /// a coordinate is not finite, or the arc is shorter than its chord.
    pub fn new(start: Point, end: Point, arc_length: f64) -> Result<Self> {
        let sp = Subpath { start, end, arc_length };
        sp.validate()?;
        Ok(sp)
    }

    pub fn straight(start: Point, end: Point) -> Result<Self> {
        Self::new(start, end, start.distance(&end))
    }

    pub fn chord(&self) -> f64 {
        self.start.distance(&self.end)
    }

    fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        if self.start == self.end {
            return Err(Error::Invalid(format!(
                "start and end coincide at ({}, {})",
                self.start.x, self.start.y
            )));
        }
        if !self.arc_length.is_finite() || self.arc_length < self.chord() {
            return Err(Error::Invalid(format!(
                "arc length {} is shorter than the endpoint distance {}",
                self.arc_length,
                self.chord()
            )));
        }
        Ok(())
    }
}

/// An ordered, non-empty set of subpaths. Index order is the processing order
/// of the triangle repair pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    subpaths: Vec<Subpath>,
}

#[derive(Serialize, Deserialize)]
struct SubpathRecord {
    start: Point,
    end: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct WorkspaceFile {
    subpaths: Vec<SubpathRecord>,
}

impl Workspace {
    pub fn new(subpaths: Vec<Subpath>) -> Result<Self> {
        if subpaths.is_empty() {
            return Err(Error::Invalid("workspace has no subpaths".into()));
        }
        for (i, sp) in subpaths.iter().enumerate() {
            sp.validate()
                .map_err(|e| Error::Invalid(format!("subpath {}: {}", i + 1, strip(&e))))?;
        }
        Ok(Workspace { subpaths })
    }

    pub fn len(&self) -> usize {
        self.subpaths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subpaths.is_empty()
    }

    pub fn subpaths(&self) -> &[Subpath] {
        &self.subpaths
    }

    pub fn subpath(&self, i: usize) -> &Subpath {
        &self.subpaths[i]
    }

    pub fn total_arc_length(&self) -> f64 {
        self.subpaths.iter().map(|s| s.arc_length).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WorkspaceFile = serde_json::from_str(text)?;
        let subpaths = file
            .subpaths
            .into_iter()
            .map(|r| Subpath {
                arc_length: r.length.unwrap_or_else(|| r.start.distance(&r.end)),
                start: r.start,
                end: r.end,
            })
            .collect();
        Workspace::new(subpaths)
    }

    /// Serializes with every arc length written out, so loading the result
    /// reproduces the workspace bit for bit.
    pub fn to_json(&self) -> String {
        let file = WorkspaceFile {
            subpaths: self
                .subpaths
                .iter()
                .map(|s| SubpathRecord { start: s.start, end: s.end, length: Some(s.arc_length) })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("workspace serialization is infallible")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    /// `n` subpaths with endpoints uniform in `[0, extent]^2` and arc length
    /// equal to the chord times a factor uniform in `[1, curvature_max]`.
    pub fn random(n: usize, extent: f64, curvature_max: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::Invalid(format!("extent must be positive, got {extent}")));
        }
        if !(curvature_max >= 1.0 && curvature_max.is_finite()) {
            return Err(Error::Invalid(format!("curvature_max must be >= 1, got {curvature_max}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0.0..=extent), rng.gen_range(0.0..=extent));
        let mut subpaths = Vec::with_capacity(n);
        while subpaths.len() < n {
            let start = point(&mut rng);
            let end = point(&mut rng);
            if start == end {
                continue;
            }
            let factor = if curvature_max > 1.0 { rng.gen_range(1.0..=curvature_max) } else { 1.0 };
            // The product can round below the chord when factor is 1.
            let arc_length = (start.distance(&end) * factor).max(start.distance(&end));
            subpaths.push(Subpath { start, end, arc_length });
        }
        Workspace::new(subpaths)
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Invalid(msg) => msg.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omitted_length_defaults_to_chord() {
        let ws = Workspace::from_json(r#"{"subpaths":[{"start":[0,0],"end":[1,0]}]}"#).unwrap();
        assert_eq!(ws.len(), 1);
        assert_eq!(ws.subpath(0).arc_length, 1.0);
    }

    #[test]
    fn arc_shorter_than_chord_is_rejected() {
        let err = Workspace::from_json(r#"{"subpaths":[{"start":[0,0],"end":[1,0],"length":0.5}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)), "{err}");
    }

    #[test]
    fn coincident_endpoints_rejected_within_a_subpath_only() {
        let err = Workspace::from_json(r#"{"subpaths":[{"start":[2,2],"end":[2,2]}]}"#).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        let ws = Workspace::from_json(
            r#"{"subpaths":[{"start":[0,0],"end":[1,0]},{"start":[1,0],"end":[2,0]}]}"#,
        )
        .unwrap();
        assert_eq!(ws.len(), 2);
    }

    #[test]
    fn empty_and_malformed_files() {
        assert!(matches!(Workspace::from_json(r#"{"subpaths":[]}"#), Err(Error::Invalid(_))));
        assert!(matches!(Workspace::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(Workspace::from_json(r#"{"subpaths":[{"start":[0],"end":[1,0]}]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn two_well_formed_subpaths() {
        let ws = Workspace::from_json(
            r#"{"subpaths":[{"start":[0,0],"end":[1,0],"length":1},{"start":[2,0],"end":[3,0],"length":1}]}"#,
        )
        .unwrap();
        assert_eq!(ws.len(), 2);
        assert_eq!(ws.subpath(1).start, Point::new(2.0, 0.0));
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = Workspace::random(20, 100.0, 1.0, 7).unwrap();
        let b = Workspace::random(20, 100.0, 1.0, 7).unwrap();
        assert_eq!(a, b);
        for sp in a.subpaths() {
            assert_eq!(sp.arc_length, sp.chord());
        }
        let c = Workspace::random(50, 100.0, 1.5, 3).unwrap();
        assert_eq!(c, Workspace::random(50, 100.0, 1.5, 3).unwrap());
        assert_ne!(c, Workspace::random(50, 100.0, 1.5, 4).unwrap());
    }

    #[test]
    fn generated_curvature_range() {
        let ws = Workspace::random(1, 10.0, 2.0, 1).unwrap();
        let sp = ws.subpath(0);
        assert!(sp.arc_length >= sp.chord() && sp.arc_length <= 2.0 * sp.chord() * (1.0 + 1e-15));
        for p in [sp.start, sp.end] {
            assert!((0.0..=10.0).contains(&p.x) && (0.0..=10.0).contains(&p.y));
        }
    }

    #[test]
    fn bad_generation_parameters() {
        assert!(Workspace::random(0, 1.0, 1.0, 0).is_err());
        assert!(Workspace::random(3, 0.0, 1.0, 0).is_err());
        assert!(Workspace::random(3, 1.0, 0.5, 0).is_err());
    }

    #[test]
    fn save_load_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ws.json");
        let ws = Workspace::random(30, 1000.0, 3.0, 99).unwrap();
        ws.save(&path).unwrap();
        assert_eq!(Workspace::load(&path).unwrap(), ws);
        assert!(matches!(Workspace::load(dir.path().join("missing.json")), Err(Error::Io { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn json_round_trip_is_bit_exact(n in 1usize..40, extent in 1e-3f64..1e6, curv in 1.0f64..5.0, seed: u64) {
                let ws = Workspace::random(n, extent, curv, seed).unwrap();
                let back = Workspace::from_json(&ws.to_json()).unwrap();
                for (a, b) in ws.subpaths().iter().zip(back.subpaths()) {
                    prop_assert_eq!(a.start.x.to_bits(), b.start.x.to_bits());
                    prop_assert_eq!(a.start.y.to_bits(), b.start.y.to_bits());
                    prop_assert_eq!(a.end.x.to_bits(), b.end.x.to_bits());
                    prop_assert_eq!(a.end.y.to_bits(), b.end.y.to_bits());
                    prop_assert_eq!(a.arc_length.to_bits(), b.arc_length.to_bits());
                }
            }

            #[test]
            fn generated_arcs_cover_their_chords(n in 1usize..60, curv in 1.0f64..4.0, seed: u64) {
                let ws = Workspace::random(n, 100.0, curv, seed).unwrap();
                for sp in ws.subpaths() {
                    prop_assert!(sp.arc_length >= sp.chord());
                }
            }
        }
    }
}
