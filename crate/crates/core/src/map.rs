//! Province graph: terrain, supply centers, home powers and per-unit-kind
//! adjacency.
//!
//! Maps are read from a line-oriented text format:
//!
//! ```text
//! # comment
//! PROVINCE <id> <inland|sea|coastal> [SC] [HOME=<power>]
//! ADJ <id> <id> <army|fleet|both>
//! UNIT <power> <army|fleet> <id>
//! ```
//!
//! Split coasts do not exist here; a coastal province is a single node that
//! both armies and fleets may occupy.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::board::{Unit, UnitKind};
use crate::token::{Power, ProvinceId, TokenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Terrain {
    Inland,
    Sea,
    Coastal,
}

impl Terrain {
    pub fn keyword(self) -> &'static str {
        match self {
            Terrain::Inland => "inland",
            Terrain::Sea => "sea",
            Terrain::Coastal => "coastal",
        }
    }

    /// Whether a unit of `kind` may stand in a province of this terrain.
    pub fn admits(self, kind: UnitKind) -> bool {
        matches!(
            (self, kind),
            (Terrain::Coastal, _) | (Terrain::Inland, UnitKind::Army) | (Terrain::Sea, UnitKind::Fleet)
        )
    }
}

/// Which unit kinds may cross an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Army,
    Fleet,
    Both,
}

impl EdgeKind {
    pub fn admits(self, kind: UnitKind) -> bool {
        matches!(
            (self, kind),
            (EdgeKind::Both, _) | (EdgeKind::Army, UnitKind::Army) | (EdgeKind::Fleet, UnitKind::Fleet)
        )
    }

    pub fn keyword(self) -> &'static str {
        match self {
            EdgeKind::Army => "army",
            EdgeKind::Fleet => "fleet",
            EdgeKind::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Province {
    pub id: ProvinceId,
    pub name: String,
    pub terrain: Terrain,
    pub is_supply_center: bool,
    pub home_power: Option<Power>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: Box<MapError> },
    #[error("parse error: {0}")]
    Syntax(String),
    #[error("bad identifier: {0}")]
    BadId(#[from] TokenError),
    #[error("duplicate province id {0}")]
    DuplicateProvince(ProvinceId),
    #[error("unknown province id {0}")]
    UnknownProvince(ProvinceId),
    #[error("province {0} is adjacent to itself")]
    SelfLoop(ProvinceId),
    #[error("asymmetric edge {a}-{b}: declared as both {first} and {second}")]
    AsymmetricEdge {
        a: ProvinceId,
        b: ProvinceId,
        first: &'static str,
        second: &'static str,
    },
    #[error("illegal terrain edge {a}-{b} tagged {tag}")]
    IllegalTerrainEdge {
        a: ProvinceId,
        b: ProvinceId,
        tag: &'static str,
    },
    #[error("province {0} has a home power but is not a supply center")]
    HomeWithoutSupplyCenter(ProvinceId),
    #[error("{kind} cannot stand in {province}")]
    IllegalPlacement {
        province: ProvinceId,
        kind: &'static str,
    },
    #[error("two initial units in {0}")]
    DuplicateUnit(ProvinceId),
}

impl MapError {
    fn at(self, line: usize) -> MapError {
        MapError::AtLine {
            line,
            source: Box::new(self),
        }
    }

    /// The error with any line annotation stripped.
    pub fn root(&self) -> &MapError {
        match self {
            MapError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Immutable, validated province graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldMap {
    provinces: Vec<Province>,
    index: BTreeMap<ProvinceId, usize>,
    // Per province: neighbors sorted by id.
    adjacency: Vec<Vec<(ProvinceId, EdgeKind)>>,
    powers: Vec<Power>,
    initial_units: Vec<Unit>,
}

/// Incremental, validating constructor for [`WorldMap`].
#[derive(Debug, Default, Clone)]
pub struct MapBuilder {
    provinces: BTreeMap<ProvinceId, Province>,
    edges: BTreeMap<(ProvinceId, ProvinceId), EdgeKind>,
    units: Vec<Unit>,
    powers: BTreeSet<Power>,
}

impl MapBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn province(
        &mut self,
        id: ProvinceId,
        terrain: Terrain,
        is_supply_center: bool,
        home_power: Option<Power>,
    ) -> Result<&mut Self, MapError> {
        if self.provinces.contains_key(&id) {
            return Err(MapError::DuplicateProvince(id));
        }
        if home_power.is_some() && !is_supply_center {
            return Err(MapError::HomeWithoutSupplyCenter(id));
        }
        if let Some(p) = home_power {
            self.powers.insert(p);
        }
        self.provinces.insert(
            id,
            Province {
                id,
                name: id.as_str().to_string(),
                terrain,
                is_supply_center,
                home_power,
            },
        );
        Ok(self)
    }

    pub fn edge(
        &mut self,
        a: ProvinceId,
        b: ProvinceId,
        tag: EdgeKind,
    ) -> Result<&mut Self, MapError> {
        let ta = self.terrain(a)?;
        let tb = self.terrain(b)?;
        if a == b {
            return Err(MapError::SelfLoop(a));
        }
        let touches = |t: Terrain| ta == t || tb == t;
        let illegal = match tag {
            EdgeKind::Army => touches(Terrain::Sea),
            EdgeKind::Fleet => touches(Terrain::Inland),
            EdgeKind::Both => touches(Terrain::Sea) || touches(Terrain::Inland),
        };
        if illegal {
            return Err(MapError::IllegalTerrainEdge {
                a,
                b,
                tag: tag.keyword(),
            });
        }
        let key = if a < b { (a, b) } else { (b, a) };
        match self.edges.get(&key) {
            Some(prev) if *prev != tag => Err(MapError::AsymmetricEdge {
                a: key.0,
                b: key.1,
                first: prev.keyword(),
                second: tag.keyword(),
            }),
            _ => {
                self.edges.insert(key, tag);
                Ok(self)
            }
        }
    }

    pub fn unit(&mut self, unit: Unit) -> Result<&mut Self, MapError> {
        let terrain = self.terrain(unit.location)?;
        if !terrain.admits(unit.kind) {
            return Err(MapError::IllegalPlacement {
                province: unit.location,
                kind: unit.kind.keyword(),
            });
        }
        if self.units.iter().any(|u| u.location == unit.location) {
            return Err(MapError::DuplicateUnit(unit.location));
        }
        self.powers.insert(unit.power);
        self.units.push(unit);
        Ok(self)
    }

    /// Registers a power that has neither home centers nor initial units.
    pub fn power(&mut self, power: Power) -> &mut Self {
        self.powers.insert(power);
        self
    }

    fn terrain(&self, id: ProvinceId) -> Result<Terrain, MapError> {
        self.provinces
            .get(&id)
            .map(|p| p.terrain)
            .ok_or(MapError::UnknownProvince(id))
    }

    pub fn build(&self) -> WorldMap {
        let provinces: Vec<Province> = self.provinces.values().cloned().collect();
        let index = provinces
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id, i))
            .collect::<BTreeMap<_, _>>();
        let mut adjacency = alloc::vec![Vec::new(); provinces.len()];
        for (&(a, b), &tag) in &self.edges {
            adjacency[index[&a]].push((b, tag));
            adjacency[index[&b]].push((a, tag));
        }
        for list in &mut adjacency {
            list.sort();
        }
        WorldMap {
            provinces,
            index,
            adjacency,
            powers: self.powers.iter().copied().collect(),
            initial_units: self.units.clone(),
        }
    }
}

const STANDARD_MAP_TEXT: &str = include_str!("../data/standard.map");

/// The classic seven-power map with its 1901 starting units.
pub fn standard_map() -> WorldMap {
    WorldMap::parse(STANDARD_MAP_TEXT).expect("bundled standard map is valid")
}

/// Supply-center count needed for a solo victory on the standard map.
pub const SOLO_THRESHOLD: usize = 18;

impl WorldMap {
    pub fn standard_text() -> &'static str {
        STANDARD_MAP_TEXT
    }

    /// Parses and validates a map document.
    pub fn parse(source: &str) -> Result<WorldMap, MapError> {
        let mut builder = MapBuilder::new();
        for (n, raw) in source.lines().enumerate() {
            let line = n + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            parse_line(&mut builder, text).map_err(|e| e.at(line))?;
        }
        Ok(builder.build())
    }

    /// Renders the map back into the text format; `parse` inverts it.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.provinces {
            let _ = write!(out, "PROVINCE {} {}", p.id, p.terrain.keyword());
            if p.is_supply_center {
                out.push_str(" SC");
            }
            if let Some(h) = p.home_power {
                let _ = write!(out, " HOME={}", h);
            }
            out.push('\n');
        }
        for (p, list) in self.provinces.iter().zip(&self.adjacency) {
            for (q, tag) in list {
                if p.id < *q {
                    let _ = writeln!(out, "ADJ {} {} {}", p.id, q, tag.keyword());
                }
            }
        }
        for u in &self.initial_units {
            let _ = writeln!(out, "UNIT {} {} {}", u.power, u.kind.keyword(), u.location);
        }
        out
    }

    pub fn provinces(&self) -> &[Province] {
        &self.provinces
    }

    pub fn province(&self, id: ProvinceId) -> Option<&Province> {
        self.index.get(&id).map(|i| &self.provinces[*i])
    }

    pub fn contains(&self, id: ProvinceId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn terrain(&self, id: ProvinceId) -> Option<Terrain> {
        self.province(id).map(|p| p.terrain)
    }

    pub fn is_supply_center(&self, id: ProvinceId) -> bool {
        self.province(id).is_some_and(|p| p.is_supply_center)
    }

    /// Sorted list of every power named on the map.
    pub fn powers(&self) -> &[Power] {
        &self.powers
    }

    pub fn initial_units(&self) -> &[Unit] {
        &self.initial_units
    }

    pub fn supply_center_count(&self) -> usize {
        self.provinces.iter().filter(|p| p.is_supply_center).count()
    }

    pub fn home_centers(&self, power: Power) -> impl Iterator<Item = ProvinceId> + '_ {
        self.provinces
            .iter()
            .filter(move |p| p.home_power == Some(power))
            .map(|p| p.id)
    }

    /// All edges out of `id`, sorted by neighbor id. Empty for unknown ids.
    pub fn edges(&self, id: ProvinceId) -> &[(ProvinceId, EdgeKind)] {
        self.index
            .get(&id)
            .map(|i| self.adjacency[*i].as_slice())
            .unwrap_or(&[])
    }

    /// Neighbors regardless of unit kind, sorted by id.
    pub fn neighbors(&self, id: ProvinceId) -> impl Iterator<Item = ProvinceId> + '_ {
        self.edges(id).iter().map(|(q, _)| *q)
    }

    /// Neighbors a unit of `kind` standing in `id` may move to, sorted by id.
    pub fn neighbors_for(
        &self,
        id: ProvinceId,
        kind: UnitKind,
    ) -> impl Iterator<Item = ProvinceId> + '_ {
        self.edges(id)
            .iter()
            .filter(move |(_, tag)| tag.admits(kind))
            .map(|(q, _)| *q)
    }

    pub fn is_adjacent(&self, from: ProvinceId, to: ProvinceId, kind: UnitKind) -> bool {
        self.edges(from)
            .binary_search_by(|(q, _)| q.cmp(&to))
            .ok()
            .is_some_and(|i| self.edges(from)[i].1.admits(kind))
    }

    /// Provinces reachable in one move by a unit of `kind` at `from`.
    pub fn reachable(
        &self,
        from: ProvinceId,
        kind: UnitKind,
    ) -> Result<BTreeSet<ProvinceId>, MapError> {
        if !self.contains(from) {
            return Err(MapError::UnknownProvince(from));
        }
        Ok(self.neighbors_for(from, kind).collect())
    }
}

fn parse_line(builder: &mut MapBuilder, text: &str) -> Result<(), MapError> {
    let mut words = text.split_whitespace();
    let keyword = words.next().unwrap_or("");
    let rest: Vec<&str> = words.collect();
    let syntax = |m: &str| MapError::Syntax(m.to_string());
    match keyword {
        "PROVINCE" => {
            let (id, terrain, flags) = match rest.as_slice() {
                [id, terrain, flags @ ..] => (*id, *terrain, flags),
                _ => return Err(syntax("expected PROVINCE <id> <terrain> [SC] [HOME=<power>]")),
            };
            let terrain = match terrain {
                "inland" => Terrain::Inland,
                "sea" => Terrain::Sea,
                "coastal" => Terrain::Coastal,
                other => return Err(MapError::Syntax(alloc::format!("unknown terrain `{other}`"))),
            };
            let mut sc = false;
            let mut home = None;
            for flag in flags {
                if *flag == "SC" && !sc {
                    sc = true;
                } else if let Some(p) = flag.strip_prefix("HOME=") {
                    if home.is_some() {
                        return Err(syntax("HOME given twice"));
                    }
                    home = Some(Power::new(p)?);
                } else {
                    return Err(MapError::Syntax(alloc::format!("unexpected token `{flag}`")));
                }
            }
            builder.province(ProvinceId::new(id)?, terrain, sc, home)?;
        }
        "ADJ" => {
            let [a, b, tag] = rest.as_slice() else {
                return Err(syntax("expected ADJ <id> <id> <army|fleet|both>"));
            };
            let tag = match *tag {
                "army" => EdgeKind::Army,
                "fleet" => EdgeKind::Fleet,
                "both" => EdgeKind::Both,
                other => return Err(MapError::Syntax(alloc::format!("unknown edge tag `{other}`"))),
            };
            builder.edge(ProvinceId::new(a)?, ProvinceId::new(b)?, tag)?;
        }
        "UNIT" => {
            let [power, kind, at] = rest.as_slice() else {
                return Err(syntax("expected UNIT <power> <army|fleet> <id>"));
            };
            let kind = match *kind {
                "army" => UnitKind::Army,
                "fleet" => UnitKind::Fleet,
                other => return Err(MapError::Syntax(alloc::format!("unknown unit kind `{other}`"))),
            };
            builder.unit(Unit::new(Power::new(power)?, kind, ProvinceId::new(at)?))?;
        }
        other => return Err(MapError::Syntax(alloc::format!("unknown declaration `{other}`"))),
    }
    Ok(())
}
