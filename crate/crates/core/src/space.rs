//! Coordinate charts for the three spaces the engine works on.
//!
//! * `BaseE(n)`: the total space of the bundle over the time line, `(t, q1..qn)`.
//! * `PhaseJ(n)`: the dual of the first jet bundle, `(t, q1..qn, p1..pn)`.
//! * `ExtendedT(n)`: the cotangent bundle of the base, `(t, q1..qn, p0, p1..pn)`.

use std::fmt;

use serde::Serialize;

/// Name of a single coordinate. Coordinates with the same name on different
/// spaces are identified by the bundle projections, so pulling a function
/// back along a projection never rewrites its expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    T,
    /// Fibre coordinate `q_i`, 1-based.
    Q(u16),
    P0,
    /// Momentum `p_i`, 1-based.
    P(u16),
}

impl Coord {
    pub fn parse(name: &str) -> Option<Coord> {
        if name == "t" {
            return Some(Coord::T);
        }
        if !name.is_char_boundary(1) {
            return None;
        }
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let idx: u16 = digits.parse().ok()?;
        match (head, idx) {
            ("p", 0) => Some(Coord::P0),
            ("p", i) => Some(Coord::P(i)),
            ("q", 0) => None,
            ("q", i) => Some(Coord::Q(i)),
            _ => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::T => write!(f, "t"),
            Coord::Q(i) => write!(f, "q{i}"),
            Coord::P0 => write!(f, "p0"),
            Coord::P(i) => write!(f, "p{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpaceKind {
    BaseE,
    PhaseJ,
    ExtendedT,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Space {
    pub kind: SpaceKind,
    pub n: usize,
}

impl Space {
    pub const fn base(n: usize) -> Space {
        assert!(n > 0, "number of q-coordinates must be positive");
        Space { kind: SpaceKind::BaseE, n }
    }

    pub const fn phase(n: usize) -> Space {
        assert!(n > 0, "number of q-coordinates must be positive");
        Space { kind: SpaceKind::PhaseJ, n }
    }

    pub const fn extended(n: usize) -> Space {
        assert!(n > 0, "number of q-coordinates must be positive");
        Space { kind: SpaceKind::ExtendedT, n }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::BaseE => self.n + 1,
            SpaceKind::PhaseJ => 2 * self.n + 1,
            SpaceKind::ExtendedT => 2 * self.n + 2,
        }
    }

    /// Position of `c` in this chart's coordinate tuple.
    pub fn index_of(&self, c: Coord) -> Option<usize> {
        let n = self.n;
        match (self.kind, c) {
            (_, Coord::T) => Some(0),
            (_, Coord::Q(i)) if (i as usize) >= 1 && (i as usize) <= n => Some(i as usize),
            (SpaceKind::ExtendedT, Coord::P0) => Some(n + 1),
            (SpaceKind::PhaseJ, Coord::P(i)) if (i as usize) >= 1 && (i as usize) <= n => {
                Some(n + i as usize)
            }
            (SpaceKind::ExtendedT, Coord::P(i)) if (i as usize) >= 1 && (i as usize) <= n => {
                Some(n + 1 + i as usize)
            }
            _ => None,
        }
    }

    pub fn coord(&self, idx: usize) -> Coord {
        self.coords()[idx]
    }

    pub fn coords(&self) -> Vec<Coord> {
        let mut out = vec![Coord::T];
        out.extend((1..=self.n as u16).map(Coord::Q));
        match self.kind {
            SpaceKind::BaseE => {}
            SpaceKind::PhaseJ => out.extend((1..=self.n as u16).map(Coord::P)),
            SpaceKind::ExtendedT => {
                out.push(Coord::P0);
                out.extend((1..=self.n as u16).map(Coord::P));
            }
        }
        out
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.index_of(c).is_some()
    }

    /// Index of `q_i` (1-based `i`).
    pub fn q(&self, i: usize) -> usize {
        i
    }

    /// Index of `p_i` (1-based `i`). Panics on `BaseE`.
    pub fn p(&self, i: usize) -> usize {
        self.index_of(Coord::P(i as u16)).expect("space has no momenta")
    }

    pub fn p0(&self) -> usize {
        self.index_of(Coord::P0).expect("space has no p0")
    }

    /// The base `E` this space projects to.
    pub fn base_space(&self) -> Space {
        Space::base(self.n)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            SpaceKind::BaseE => "BaseE",
            SpaceKind::PhaseJ => "PhaseJ",
            SpaceKind::ExtendedT => "ExtendedT",
        };
        write!(f, "{name}({})", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(Space::base(3).dim(), 4);
        assert_eq!(Space::phase(3).dim(), 7);
        assert_eq!(Space::extended(3).dim(), 8);
    }

    #[test]
    fn coordinate_order() {
        let names: Vec<String> = Space::extended(2).coords().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["t", "q1", "q2", "p0", "p1", "p2"]);
        let s = Space::phase(2);
        for (i, c) in s.coords().into_iter().enumerate() {
            assert_eq!(s.index_of(c), Some(i));
        }
        assert_eq!(Space::phase(2).index_of(Coord::P0), None);
        assert_eq!(Space::base(2).index_of(Coord::P(1)), None);
        assert_eq!(Space::base(2).index_of(Coord::Q(3)), None);
    }

    #[test]
    fn coord_names() {
        assert_eq!(Coord::parse(""), None);
        assert_eq!(Coord::parse("∂q"), None);
        assert_eq!(Coord::parse("t"), Some(Coord::T));
        assert_eq!(Coord::parse("q12"), Some(Coord::Q(12)));
        assert_eq!(Coord::parse("p0"), Some(Coord::P0));
        assert_eq!(Coord::parse("q0"), None);
        assert_eq!(Coord::parse("x1"), None);
        assert_eq!(Coord::parse("q"), None);
    }
}
