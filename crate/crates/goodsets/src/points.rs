//! Symbols, points and point sets.
//!
//! A `PointSet` is a finite list of distinct n-tuples of symbols. Insertion
//! order is preserved and used as the canonical point order everywhere;
//! symbol order is lexicographic by name. A set is *separated* when no
//! symbol occurs in two different coordinate positions; all boundary and
//! fullness operations require separated input.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::IncidenceMatrix;

/// An atomic coordinate value. Equality and ordering are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSymbol(name));
        }
        Ok(Symbol(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// An ordered tuple of symbols, one per coordinate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point {
    coords: Vec<Symbol>,
}

impl Point {
    pub fn new(coords: Vec<Symbol>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Shape(format!(
                "points need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Point { coords })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let coords = names
            .iter()
            .map(|n| Symbol::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// A finite ordered collection of distinct points of common dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    dimension: usize,
    points: Vec<Point>,
    separated: bool,
}

#[derive(Serialize, Deserialize)]
struct PointSetRepr {
    dimension: usize,
    points: Vec<Vec<String>>,
}

impl PointSet {
    pub fn new(dimension: usize, points: Vec<Point>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Shape(format!(
                "dimension must be at least 2, got {dimension}"
            )));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.dimension() != dimension {
                return Err(Error::Shape(format!(
                    "point {p} has {} coordinates, expected {dimension}",
                    p.dimension()
                )));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicatePoint(p.to_string()));
            }
        }
        let separated = compute_separated(&points);
        Ok(PointSet {
            dimension,
            points,
            separated,
        })
    }

    /// Convenience constructor from string tuples.
    pub fn from_rows<S: AsRef<str>>(dimension: usize, rows: &[&[S]]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::from_names(r))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(dimension, points)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &Point {
        &self.points[index]
    }

    pub fn position(&self, point: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == point)
    }

    /// True when no symbol occurs in two distinct coordinate positions.
    pub fn is_separated(&self) -> bool {
        self.separated
    }

    /// One symbol set per coordinate, sorted by name.
    pub fn projections(&self) -> Result<Vec<Vec<Symbol>>> {
        if self.points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sets: Vec<BTreeSet<Symbol>> = vec![BTreeSet::new(); self.dimension];
        for p in &self.points {
            for (i, s) in p.coords().iter().enumerate() {
                sets[i].insert(s.clone());
            }
        }
        Ok(sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    pub fn incidence_matrix(&self) -> Result<IncidenceMatrix> {
        IncidenceMatrix::build(self)
    }

    /// Rename every symbol to `"<coordinate>:<name>"` (1-based), producing a
    /// separated set with the same incidence structure.
    pub fn tag_coordinates(&self) -> PointSet {
        let points = self
            .points
            .iter()
            .map(|p| {
                let coords = p
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Symbol(format!("{}:{}", i + 1, s.as_str())))
                    .collect();
                Point { coords }
            })
            .collect();
        PointSet {
            dimension: self.dimension,
            points,
            separated: true,
        }
    }

    /// The sub-point-set at the given indices (deduplicated, ascending).
    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut points = Vec::with_capacity(idx.len());
        for &i in &idx {
            let p = self
                .points
                .get(i)
                .ok_or_else(|| Error::Shape(format!("point index {i} out of range")))?;
            points.push(p.clone());
        }
        PointSet::new(self.dimension, points)
    }

    /// Serialize to the canonical JSON form, newline-terminated.
    pub fn to_json(&self) -> String {
        let repr = PointSetRepr {
            dimension: self.dimension,
            points: self
                .points
                .iter()
                .map(|p| p.coords().iter().map(|s| s.as_str().to_owned()).collect())
                .collect(),
        };
        let mut out = serde_json::to_string(&repr).expect("point set serialization");
        out.push('\n');
        out
    }

    /// Parse the JSON form `{"dimension": n, "points": [[s,...],...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: PointSetRepr = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid point set JSON: {e}")))?;
        let mut points = Vec::with_capacity(repr.points.len());
        for (i, row) in repr.points.iter().enumerate() {
            if row.len() != repr.dimension {
                return Err(Error::Parse(format!(
                    "point {} has {} coordinates, expected {}",
                    i + 1,
                    row.len(),
                    repr.dimension
                )));
            }
            let p = Point::from_names(row)
                .map_err(|e| Error::Parse(format!("point {}: {e}", i + 1)))?;
            points.push(p);
        }
        PointSet::new(repr.dimension, points).map_err(|e| match e {
            Error::DuplicatePoint(p) => Error::Parse(format!("duplicate point {p}")),
            Error::Shape(msg) => Error::Parse(msg),
            other => other,
        })
    }
}

fn compute_separated(points: &[Point]) -> bool {
    let mut at: HashMap<&Symbol, usize> = HashMap::new();
    for p in points {
        for (i, s) in p.coords().iter().enumerate() {
            match at.get(s) {
                Some(&j) if j != i => return false,
                Some(_) => {}
                None => {
                    at.insert(s, i);
                }
            }
        }
    }
    true
}
