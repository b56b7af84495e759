//! Orders and their text notation.
//!
//! Movement orders: `A VIE H`, `A VIE - GAL`, `A VIE S A BUD - GAL`,
//! `F TRI S A VEN H`. Retreats and adjustments: `A VIE R BOH`,
//! `DISBAND AUS A VIE`, `BUILD AUS A VIE`.

use alloc::string::String;
use core::fmt;

use crate::board::{GameState, Unit, UnitKind};
use crate::token::{Power, ProvinceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Hold,
    Move(ProvinceId),
    /// Support a unit that is not moving.
    SupportHold(Unit),
    /// Support the given unit's move into the province.
    SupportMove(Unit, ProvinceId),
}

/// A movement-phase order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Order {
    pub unit: Unit,
    pub command: Command,
}

impl Order {
    pub fn hold(unit: Unit) -> Self {
        Order { unit, command: Command::Hold }
    }

    pub fn move_to(unit: Unit, to: ProvinceId) -> Self {
        Order { unit, command: Command::Move(to) }
    }

    pub fn support_hold(unit: Unit, supported: Unit) -> Self {
        Order { unit, command: Command::SupportHold(supported) }
    }

    pub fn support_move(unit: Unit, supported: Unit, to: ProvinceId) -> Self {
        Order { unit, command: Command::SupportMove(supported, to) }
    }

    /// Destination if this is a move.
    pub fn destination(&self) -> Option<ProvinceId> {
        match self.command {
            Command::Move(to) => Some(to),
            _ => None,
        }
    }

    /// The unit receiving support, if this is a support order.
    pub fn supported(&self) -> Option<Unit> {
        match self.command {
            Command::SupportHold(u) | Command::SupportMove(u, _) => Some(u),
            _ => None,
        }
    }

    pub fn is_support(&self) -> bool {
        self.supported().is_some()
    }

    /// Province the supported action acts on.
    pub fn support_target(&self) -> Option<ProvinceId> {
        match self.command {
            Command::SupportHold(u) => Some(u.location),
            Command::SupportMove(_, to) => Some(to),
            _ => None,
        }
    }

    /// Sort rank used by `legal_orders`: hold, move, support-hold, support-move.
    pub fn kind_rank(&self) -> u8 {
        match self.command {
            Command::Hold => 0,
            Command::Move(_) => 1,
            Command::SupportHold(_) => 2,
            Command::SupportMove(..) => 3,
        }
    }

    /// Province the order is "about" for sorting: destination or support target.
    pub fn sort_province(&self) -> ProvinceId {
        match self.command {
            Command::Hold => self.unit.location,
            Command::Move(to) => to,
            Command::SupportHold(u) => u.location,
            Command::SupportMove(_, to) => to,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.command {
            Command::Hold => write!(f, "{} H", self.unit),
            Command::Move(to) => write!(f, "{} - {}", self.unit, to),
            Command::SupportHold(s) => write!(f, "{} S {} H", self.unit, s),
            Command::SupportMove(s, to) => write!(f, "{} S {} - {}", self.unit, s, to),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RetreatOrder {
    Retreat(Unit, ProvinceId),
    Disband(Unit),
}

impl RetreatOrder {
    pub fn unit(&self) -> Unit {
        match self {
            RetreatOrder::Retreat(u, _) | RetreatOrder::Disband(u) => *u,
        }
    }
}

impl fmt::Display for RetreatOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetreatOrder::Retreat(u, to) => write!(f, "{} R {}", u, to),
            RetreatOrder::Disband(u) => write!(f, "DISBAND {} {}", u.power, u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Adjustment {
    Build(Unit),
    Disband(Unit),
}

impl Adjustment {
    pub fn unit(&self) -> Unit {
        match self {
            Adjustment::Build(u) | Adjustment::Disband(u) => *u,
        }
    }
}

impl fmt::Display for Adjustment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adjustment::Build(u) => write!(f, "BUILD {} {}", u.power, u),
            Adjustment::Disband(u) => write!(f, "DISBAND {} {}", u.power, u),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotationError {
    #[error("cannot parse order `{0}`")]
    Malformed(String),
    #[error("no {kind} at {at}")]
    NoUnit { kind: char, at: ProvinceId },
}

fn kind_of(word: &str) -> Option<UnitKind> {
    match word {
        "A" => Some(UnitKind::Army),
        "F" => Some(UnitKind::Fleet),
        _ => None,
    }
}

fn lookup(state: &GameState, kind: &str, at: &str, text: &str) -> Result<Unit, NotationError> {
    let malformed = || NotationError::Malformed(text.into());
    let kind = kind_of(kind).ok_or_else(malformed)?;
    let at = ProvinceId::new(at).map_err(|_| malformed())?;
    match state.unit_at(at) {
        Some(u) if u.kind == kind => Ok(*u),
        _ => Err(NotationError::NoUnit { kind: kind.letter(), at }),
    }
}

fn province(word: &str, text: &str) -> Result<ProvinceId, NotationError> {
    ProvinceId::new(word).map_err(|_| NotationError::Malformed(text.into()))
}

/// Parses movement notation, resolving unit owners from `state`.
pub fn parse_order(state: &GameState, text: &str) -> Result<Order, NotationError> {
    let words: alloc::vec::Vec<&str> = text.split_whitespace().collect();
    let malformed = || NotationError::Malformed(text.into());
    match words.as_slice() {
        [k, at, "H"] => Ok(Order::hold(lookup(state, k, at, text)?)),
        [k, at, "-", to] => Ok(Order::move_to(lookup(state, k, at, text)?, province(to, text)?)),
        [k, at, "S", sk, sat, "H"] => Ok(Order::support_hold(
            lookup(state, k, at, text)?,
            lookup(state, sk, sat, text)?,
        )),
        [k, at, "S", sk, sat, "-", to] => Ok(Order::support_move(
            lookup(state, k, at, text)?,
            lookup(state, sk, sat, text)?,
            province(to, text)?,
        )),
        _ => Err(malformed()),
    }
}

/// Parses `BUILD <power> <A|F> <prov>` or `DISBAND <power> <A|F> <prov>`.
pub fn parse_adjustment(text: &str) -> Result<Adjustment, NotationError> {
    let words: alloc::vec::Vec<&str> = text.split_whitespace().collect();
    let malformed = || NotationError::Malformed(text.into());
    let [verb, p, k, at] = words.as_slice() else {
        return Err(malformed());
    };
    let unit = Unit::new(
        Power::new(p).map_err(|_| malformed())?,
        kind_of(k).ok_or_else(malformed)?,
        province(at, text)?,
    );
    match *verb {
        "BUILD" => Ok(Adjustment::Build(unit)),
        "DISBAND" => Ok(Adjustment::Disband(unit)),
        _ => Err(malformed()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::standard_map;
    use alloc::string::ToString;

    #[test]
    fn notation_round_trips_on_the_opening_board() {
        let map = standard_map();
        let state = GameState::initial(&map);
        for text in ["A VIE H", "A VIE - GAL", "A VIE S A BUD - GAL", "F TRI S A VIE H"] {
            let order = parse_order(&state, text).unwrap();
            assert_eq!(order.to_string(), text);
        }
        assert!(matches!(
            parse_order(&state, "F VIE H"),
            Err(NotationError::NoUnit { .. })
        ));
        assert!(parse_order(&state, "A VIE X").is_err());
    }

    #[test]
    fn adjustment_notation() {
        let b = parse_adjustment("BUILD AUS A VIE").unwrap();
        assert_eq!(b.to_string(), "BUILD AUS A VIE");
        let d = parse_adjustment("DISBAND AUS F TRI").unwrap();
        assert_eq!(d.to_string(), "DISBAND AUS F TRI");
        let r = RetreatOrder::Retreat(b.unit(), crate::token::prov("BOH"));
        assert_eq!(r.to_string(), "A VIE R BOH");
    }
}
