//! Fronts: straight-line discontinuities of the approximate solution.

use serde::{Deserialize, Serialize};

use crate::riemann::CompositeWave;
use crate::waves::Family;

/// Position relative to the interfaces `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    L,
    M,
    R,
}

impl Region {
    pub fn index(self) -> usize {
        match self {
            Region::L => 0,
            Region::M => 1,
            Region::R => 2,
        }
    }

    /// Region of a point; a point on an interface belongs to the side the
    /// front is moving into.
    pub fn of(x: f64, speed: f64, a: f64, b: f64) -> Region {
        let side = |c: f64| {
            if x < c || (x == c && speed < 0.0) {
                -1
            } else {
                1
            }
        };
        match (side(a), side(b)) {
            (-1, _) => Region::L,
            (_, -1) => Region::M,
            _ => Region::R,
        }
    }
}

/// What a front carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FrontKind {
    Wave { family: Family, strength: f64 },
    Composite(CompositeWave),
}

/// A front moving at constant speed from `(x0, t0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub id: u64,
    pub kind: FrontKind,
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    pub generation: u32,
    pub birth_time: f64,
    /// Region tag fixed at creation; moving fronts change region only
    /// through an interaction with a composite.
    pub region: Region,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        if self.speed == 0.0 {
            self.x0
        } else {
            self.x0 + self.speed * (t - self.t0)
        }
    }

    pub fn is_composite(&self) -> bool {
        matches!(self.kind, FrontKind::Composite(_))
    }

    /// Family and strength of a moving front.
    pub fn wave(&self) -> Option<(Family, f64)> {
        match self.kind {
            FrontKind::Wave { family, strength } => Some((family, strength)),
            FrontKind::Composite(_) => None,
        }
    }

    pub fn composite(&self) -> Option<&CompositeWave> {
        match &self.kind {
            FrontKind::Composite(c) => Some(c),
            FrontKind::Wave { .. } => None,
        }
    }

    pub fn is_shock(&self) -> bool {
        matches!(self.kind, FrontKind::Wave { strength, .. } if strength < 0.0)
    }

    pub fn is_rarefaction(&self) -> bool {
        matches!(self.kind, FrontKind::Wave { strength, .. } if strength > 0.0)
    }
}
