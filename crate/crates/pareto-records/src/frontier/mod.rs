//! Streaming maintenance of the remaining-record set (the "staircase").
//!
//! Observations arrive one at a time from the open unit square. An
//! observation is a record when no earlier observation is strictly smaller in
//! both coordinates; setting a record removes ("kills") every remaining
//! record that is strictly larger in both coordinates. The survivors form a
//! staircase: sorted by x ascending, their y values descend.

pub mod brute;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FrontierError {
    #[error("coordinates ({x}, {y}) are outside the open unit square")]
    OutOfRange { x: f64, y: f64 },
}

/// A point of the open unit square (0,1)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    /// Both coordinates must lie strictly between 0 and 1 (NaN rejected).
    pub fn new(x: f64, y: f64) -> Result<Self, FrontierError> {
        if x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0 {
            Ok(Self { x, y })
        } else {
            Err(FrontierError::OutOfRange { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Strict domination: smaller in both coordinates. Ties dominate nothing.
    pub fn dominates(&self, other: &Point) -> bool {
        self.x < other.x && self.y < other.y
    }
}

/// How an observation relates to the running coordinate minima: a record may
/// additionally set a one-dimensional record in either coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordType {
    /// Not a record at all.
    None,
    /// A record, but neither coordinate is a new minimum.
    Interior,
    /// New minimum in x only.
    FirstCoordOnly,
    /// New minimum in y only.
    SecondCoordOnly,
    /// New minimum in both coordinates; such a record kills every remaining
    /// record.
    BothCoords,
}

impl RecordType {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordType::None => "none",
            RecordType::Interior => "interior",
            RecordType::FirstCoordOnly => "first_coord_only",
            RecordType::SecondCoordOnly => "second_coord_only",
            RecordType::BothCoords => "both_coords",
        }
    }
}

/// What a single insertion did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InsertOutcome {
    pub is_record: bool,
    /// Number of remaining records removed (0 unless `is_record`).
    pub killed: u64,
    pub record_type: RecordType,
}

/// The remaining-record set plus the running coordinate minima over every
/// observation ever inserted.
///
/// Storage is a flat vector in lexicographic (x, y) order. Exact coordinate
/// ties have probability zero under the continuous model but remain possible
/// with finite-precision input, so the update logic treats equal-x runs as
/// groups; for tie-free input every group is a singleton and each insert is
/// two binary searches plus one contiguous splice.
#[derive(Debug, Clone)]
pub struct Staircase {
    points: Vec<(f64, f64)>,
    min_x: f64,
    min_y: f64,
    observations: u64,
}

impl Default for Staircase {
    fn default() -> Self {
        Self::new()
    }
}

impl Staircase {
    pub fn new() -> Self {
        Self {
            points: Vec::new(),
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            observations: 0,
        }
    }

    /// Forget everything but keep allocated capacity (for trial reuse).
    pub fn clear(&mut self) {
        self.points.clear();
        self.min_x = f64::INFINITY;
        self.min_y = f64::INFINITY;
        self.observations = 0;
    }

    /// Number of remaining records.
    pub fn size(&self) -> u64 {
        self.points.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total observations processed, records or not.
    pub fn observations(&self) -> u64 {
        self.observations
    }

    /// Remaining records in staircase order (x ascending, y descending).
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn min_x_so_far(&self) -> f64 {
        self.min_x
    }

    pub fn min_y_so_far(&self) -> f64 {
        self.min_y
    }

    /// Process one observation: decide record status, remove everything the
    /// new record kills, classify against the running coordinate minima.
    pub fn insert(&mut self, p: Point) -> InsertOutcome {
        let (x, y) = (p.x, p.y);
        self.observations += 1;

        // First index with point.x ≥ x. Everything before is a domination
        // candidate; the smallest y among them sits at the head of the last
        // equal-x group (y descends across groups, ascends inside one).
        let idx = self.points.partition_point(|q| q.0 < x);
        let dominated = idx > 0 && {
            let mut head = idx - 1;
            while head > 0 && self.points[head - 1].0 == self.points[idx - 1].0 {
                head -= 1;
            }
            self.points[head].1 < y
        };
        if dominated {
            // Running minima cannot move: a dominator has both coordinates
            // smaller, so neither coordinate of p is a new minimum.
            return InsertOutcome {
                is_record: false,
                killed: 0,
                record_type: RecordType::None,
            };
        }

        let record_type = match (x < self.min_x, y < self.min_y) {
            (true, true) => RecordType::BothCoords,
            (true, false) => RecordType::FirstCoordOnly,
            (false, true) => RecordType::SecondCoordOnly,
            (false, false) => RecordType::Interior,
        };
        if x < self.min_x {
            self.min_x = x;
        }
        if y < self.min_y {
            self.min_y = y;
        }

        // Kills: strictly larger in both coordinates. Skip p's own equal-x
        // group (x not strictly larger), then take the maximal run with
        // y > p.y. The run is contiguous except possibly inside the equal-x
        // group where it stops, whose members are scanned individually.
        let mut kill_start = idx;
        let len = self.points.len();
        while kill_start < len && self.points[kill_start].0 == x {
            kill_start += 1;
        }
        let mut kill_end = kill_start;
        while kill_end < len && self.points[kill_end].1 > y {
            kill_end += 1;
        }
        let mut stragglers: Vec<usize> = Vec::new();
        if kill_end < len {
            let group_x = self.points[kill_end].0;
            let mut j = kill_end + 1;
            while j < len && self.points[j].0 == group_x {
                if self.points[j].1 > y {
                    stragglers.push(j);
                }
                j += 1;
            }
        }
        let killed = (kill_end - kill_start + stragglers.len()) as u64;
        for &j in stragglers.iter().rev() {
            self.points.remove(j);
        }
        self.points.drain(kill_start..kill_end);

        // Insert in lexicographic position. Only survivors of p's own equal-x
        // group can precede it here, so `idx` is still valid.
        let mut pos = idx;
        while pos < self.points.len() && self.points[pos].0 == x && self.points[pos].1 < y {
            pos += 1;
        }
        self.points.insert(pos, (x, y));

        debug_assert!(self.sorted_and_antichain(), "staircase invariant broken");
        InsertOutcome {
            is_record: true,
            killed,
            record_type,
        }
    }

    /// The invariant `insert` maintains unconditionally: lexicographically
    /// non-decreasing with no adjacent domination. Holds even for duplicate
    /// points, which `well_formed` rejects.
    fn sorted_and_antichain(&self) -> bool {
        self.points.windows(2).all(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 == x1 {
                y0 <= y1
            } else {
                x0 < x1 && y0 >= y1
            }
        })
    }

    /// Strict structural invariant: lexicographically sorted with pairwise
    /// distinct points, and pairwise non-dominating. True for every input
    /// without exact coordinate ties between identical points; an inserted
    /// duplicate (legal, but measure-zero) makes this false while leaving
    /// the weaker sortedness the algorithm relies on intact.
    pub fn well_formed(&self) -> bool {
        self.points.windows(2).all(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 == x1 {
                y0 < y1
            } else {
                x0 < x1 && y0 >= y1
            }
        })
    }
}

/// One observation's worth of trace output.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub is_record: bool,
    pub killed: u64,
    pub record_type: RecordType,
    pub remaining: u64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "n,x,y,is_record,killed,record_type,remaining";

    /// Coordinates carry 17 significant digits so a replay reconstructs the
    /// exact same floats.
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            crate::rational::f64_repr(self.x),
            crate::rational::f64_repr(self.y),
            self.is_record,
            self.killed,
            self.record_type.as_str(),
            self.remaining,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(Point::new(0.5, 0.5).is_ok());
        assert!(Point::new(0.0, 0.5).is_err());
        assert!(Point::new(0.5, 1.0).is_err());
        assert!(Point::new(f64::NAN, 0.5).is_err());
        assert!(Point::new(-0.2, 0.5).is_err());
    }

    #[test]
    fn first_observation_is_a_double_record() {
        let mut s = Staircase::new();
        let out = s.insert(pt(0.5, 0.5));
        assert_eq!(
            out,
            InsertOutcome {
                is_record: true,
                killed: 0,
                record_type: RecordType::BothCoords,
            }
        );
        assert_eq!(s.size(), 1);
    }

    #[test]
    fn worked_insertions() {
        let mut s = Staircase::new();
        s.insert(pt(0.3, 0.7));
        s.insert(pt(0.6, 0.4));
        assert_eq!(s.size(), 2);

        // Kills (0.3, 0.7) only; x = 0.2 is a new minimum, y = 0.5 is not.
        let mut a = s.clone();
        let out = a.insert(pt(0.2, 0.5));
        assert_eq!(
            out,
            InsertOutcome {
                is_record: true,
                killed: 1,
                record_type: RecordType::FirstCoordOnly,
            }
        );
        assert_eq!(a.points(), &[(0.2, 0.5), (0.6, 0.4)]);

        // Dominated by (0.6, 0.4): not a record.
        let mut b = s.clone();
        let out = b.insert(pt(0.7, 0.8));
        assert!(!out.is_record);
        assert_eq!(out.record_type, RecordType::None);
        assert_eq!(b.size(), 2);
        assert_eq!(b.observations(), 3);

        // Fits between the two: record, kills nothing, interior.
        let mut c = s.clone();
        let out = c.insert(pt(0.5, 0.5));
        assert_eq!(
            out,
            InsertOutcome {
                is_record: true,
                killed: 0,
                record_type: RecordType::Interior,
            }
        );
        assert_eq!(c.points(), &[(0.3, 0.7), (0.5, 0.5), (0.6, 0.4)]);
    }

    #[test]
    fn double_record_kills_everything() {
        let mut s = Staircase::new();
        s.insert(pt(0.3, 0.7));
        s.insert(pt(0.5, 0.5));
        s.insert(pt(0.7, 0.3));
        let before = s.size();
        let out = s.insert(pt(0.2, 0.2));
        assert_eq!(out.record_type, RecordType::BothCoords);
        assert_eq!(out.killed, before);
        assert_eq!(s.size(), 1);
    }

    #[test]
    fn second_coordinate_record() {
        let mut s = Staircase::new();
        s.insert(pt(0.4, 0.6));
        let out = s.insert(pt(0.9, 0.1));
        assert_eq!(out.record_type, RecordType::SecondCoordOnly);
        assert_eq!(out.killed, 0);
        assert_eq!(s.size(), 2);
    }

    #[test]
    fn equal_x_points_coexist_and_kill_correctly() {
        let mut s = Staircase::new();
        s.insert(pt(0.4, 0.2));
        // Same x, larger y: neither dominates the other, both remain.
        let out = s.insert(pt(0.4, 0.6));
        assert!(out.is_record);
        assert_eq!(out.killed, 0);
        assert_eq!(s.points(), &[(0.4, 0.2), (0.4, 0.6)]);

        // (0.3, 0.3) kills (0.4, 0.6) but not (0.4, 0.2): a gap inside the
        // equal-x group.
        let out = s.insert(pt(0.3, 0.3));
        assert!(out.is_record);
        assert_eq!(out.killed, 1);
        assert_eq!(s.points(), &[(0.3, 0.3), (0.4, 0.2)]);
    }

    #[test]
    fn equal_x_domination_uses_group_minimum() {
        let mut s = Staircase::new();
        s.insert(pt(0.4, 0.2));
        s.insert(pt(0.4, 0.6));
        // x strictly larger, y between the two group members: dominated by
        // (0.4, 0.2).
        let out = s.insert(pt(0.5, 0.4));
        assert!(!out.is_record);
        // Identical duplicate of an existing point is still a record (ties
        // never dominate) and kills nothing.
        let out = s.insert(pt(0.4, 0.2));
        assert!(out.is_record);
        assert_eq!(out.killed, 0);
        assert_eq!(s.size(), 3);
        assert!(!s.well_formed(), "duplicate points violate strict group order");
    }

    #[test]
    fn decreasing_staircase_sequence_never_kills() {
        let mut s = Staircase::new();
        for i in 1..=20 {
            let x = i as f64 / 21.0;
            let y = 1.0 - x;
            let out = s.insert(pt(x, y));
            assert!(out.is_record);
            assert_eq!(out.killed, 0);
        }
        assert_eq!(s.size(), 20);
        assert!(s.well_formed());
    }

    #[test]
    fn trace_row_renders_and_round_trips() {
        let row = TraceRow {
            n: 3,
            x: 0.1234567890123456,
            y: 0.5,
            is_record: true,
            killed: 2,
            record_type: RecordType::Interior,
            remaining: 4,
        };
        let line = row.to_csv_line();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "3");
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.1234567890123456);
        assert_eq!(fields[5], "interior");
    }
}
