//! Quadratic-time reference implementation of record insertion.
//!
//! Keeps the whole observation history and recomputes everything from
//! scratch on every insert. Deliberately naive — it is the oracle the fast
//! staircase is property-tested against, so it must stay an independent,
//! obviously-correct transcription of the definitions.

use super::{InsertOutcome, Point, RecordType};

/// Replays the definitions directly over the full history.
#[derive(Debug, Default, Clone)]
pub struct BruteForce {
    history: Vec<Point>,
}

impl BruteForce {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observations(&self) -> u64 {
        self.history.len() as u64
    }

    /// The remaining-record set: observations no other observation dominates.
    pub fn remaining(&self) -> Vec<Point> {
        self.history
            .iter()
            .filter(|q| !self.history.iter().any(|r| r.dominates(q)))
            .copied()
            .collect()
    }

    pub fn insert(&mut self, p: Point) -> InsertOutcome {
        let is_record = !self.history.iter().any(|q| q.dominates(&p));
        let killed = if is_record {
            self.remaining().iter().filter(|q| p.dominates(q)).count() as u64
        } else {
            0
        };
        let record_type = if !is_record {
            RecordType::None
        } else {
            let min_x = self
                .history
                .iter()
                .map(Point::x)
                .fold(f64::INFINITY, f64::min);
            let min_y = self
                .history
                .iter()
                .map(Point::y)
                .fold(f64::INFINITY, f64::min);
            match (p.x() < min_x, p.y() < min_y) {
                (true, true) => RecordType::BothCoords,
                (true, false) => RecordType::FirstCoordOnly,
                (false, true) => RecordType::SecondCoordOnly,
                (false, false) => RecordType::Interior,
            }
        };
        self.history.push(p);
        InsertOutcome {
            is_record,
            killed,
            record_type,
        }
    }
}
