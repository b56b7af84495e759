//! Units, seasons and the game state snapshot.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::map::WorldMap;
use crate::token::{Power, ProvinceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnitKind {
    Army,
    Fleet,
}

impl UnitKind {
    /// Single-letter notation prefix (`A` / `F`).
    pub fn letter(self) -> char {
        match self {
            UnitKind::Army => 'A',
            UnitKind::Fleet => 'F',
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            UnitKind::Army => "army",
            UnitKind::Fleet => "fleet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unit {
    pub power: Power,
    pub kind: UnitKind,
    pub location: ProvinceId,
}

impl Unit {
    pub fn new(power: Power, kind: UnitKind, location: ProvinceId) -> Self {
        Unit { power, kind, location }
    }

    pub fn army(power: Power, location: ProvinceId) -> Self {
        Unit::new(power, UnitKind::Army, location)
    }

    pub fn fleet(power: Power, location: ProvinceId) -> Self {
        Unit::new(power, UnitKind::Fleet, location)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.letter(), self.location)
    }
}

/// The five phases of a game year, in play order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Autumn,
    Winter,
}

impl Season {
    pub fn code(self) -> &'static str {
        match self {
            Season::Spring => "SPR",
            Season::Summer => "SUM",
            Season::Fall => "FAL",
            Season::Autumn => "AUT",
            Season::Winter => "WIN",
        }
    }

    pub fn from_code(code: &str) -> Option<Season> {
        Some(match code {
            "SPR" => Season::Spring,
            "SUM" => Season::Summer,
            "FAL" => Season::Fall,
            "AUT" => Season::Autumn,
            "WIN" => Season::Winter,
            _ => return None,
        })
    }

    pub fn is_movement(self) -> bool {
        matches!(self, Season::Spring | Season::Fall)
    }

    pub fn is_retreat(self) -> bool {
        matches!(self, Season::Summer | Season::Autumn)
    }
}

/// A (year, season) pair. Orders on the derived `Ord` follow play order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseKey {
    pub year: u16,
    pub season: Season,
}

impl PhaseKey {
    pub fn new(year: u16, season: Season) -> Self {
        PhaseKey { year, season }
    }
}

impl fmt::Display for PhaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.year, self.season.code())
    }
}

pub const FIRST_YEAR: u16 = 1901;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub year: u16,
    pub phase: Season,
    /// Units keyed by location; one unit per province by construction.
    pub units: BTreeMap<ProvinceId, Unit>,
    /// Owner of every supply center on the map.
    pub sc_owner: BTreeMap<ProvinceId, Option<Power>>,
    pub alive: BTreeSet<Power>,
}

impl GameState {
    /// Spring 1901 with the map's initial placement and home centers owned.
    pub fn initial(map: &WorldMap) -> Self {
        let units = map
            .initial_units()
            .iter()
            .map(|u| (u.location, *u))
            .collect();
        Self::with_units(map, FIRST_YEAR, Season::Spring, units)
    }

    /// A state with home supply centers owned by their home power and the
    /// given units.
    pub fn with_units(
        map: &WorldMap,
        year: u16,
        phase: Season,
        units: BTreeMap<ProvinceId, Unit>,
    ) -> Self {
        let sc_owner = map
            .provinces()
            .iter()
            .filter(|p| p.is_supply_center)
            .map(|p| (p.id, p.home_power))
            .collect();
        let mut state = GameState {
            year,
            phase,
            units,
            sc_owner,
            alive: BTreeSet::new(),
        };
        state.refresh_alive(map);
        state
    }

    pub fn phase_key(&self) -> PhaseKey {
        PhaseKey::new(self.year, self.phase)
    }

    pub fn unit_at(&self, province: ProvinceId) -> Option<&Unit> {
        self.units.get(&province)
    }

    pub fn contains_unit(&self, unit: &Unit) -> bool {
        self.units.get(&unit.location) == Some(unit)
    }

    pub fn units_of(&self, power: Power) -> impl Iterator<Item = &Unit> + '_ {
        self.units.values().filter(move |u| u.power == power)
    }

    pub fn unit_count(&self, power: Power) -> usize {
        self.units_of(power).count()
    }

    pub fn sc_count(&self, power: Power) -> usize {
        self.sc_owner.values().filter(|o| **o == Some(power)).count()
    }

    pub fn owned_centers(&self, power: Power) -> impl Iterator<Item = ProvinceId> + '_ {
        self.sc_owner
            .iter()
            .filter(move |(_, o)| **o == Some(power))
            .map(|(p, _)| *p)
    }

    pub fn owner_of(&self, province: ProvinceId) -> Option<Power> {
        self.sc_owner.get(&province).copied().flatten()
    }

    /// Recomputes `alive`: a map power is alive iff it has a unit or a center.
    pub fn refresh_alive(&mut self, map: &WorldMap) {
        let alive = map
            .powers()
            .iter()
            .copied()
            .filter(|p| self.unit_count(*p) > 0 || self.sc_count(*p) > 0)
            .collect();
        self.alive = alive;
    }

    pub fn alive_powers(&self) -> Vec<Power> {
        self.alive.iter().copied().collect()
    }
}
