//! Deterministic greedy tactician.
//!
//! Produces the orders a power actually submits (respecting its binding
//! deals) and, with no deals at all, the orders every other player expects
//! it to submit. Because it is deterministic, that expectation is common
//! knowledge.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::adjudicate::{retreat_options, Resolution};
use crate::board::{GameState, Unit, UnitKind};
use crate::deal::Constraints;
use crate::map::{Terrain, WorldMap};
use crate::order::{Adjustment, Command, Order, RetreatOrder};
use crate::token::{Power, ProvinceId};
use crate::utility::UtilityTable;

/// One power's orders for one movement phase, keyed by unit location.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    orders: BTreeMap<ProvinceId, Order>,
}

impl Plan {
    pub fn from_orders(orders: impl IntoIterator<Item = Order>) -> Self {
        Plan {
            orders: orders.into_iter().map(|o| (o.unit.location, o)).collect(),
        }
    }

    pub fn order_for(&self, unit: &Unit) -> Option<&Order> {
        self.orders.get(&unit.location).filter(|o| o.unit == *unit)
    }

    pub fn orders(&self) -> impl Iterator<Item = &Order> + '_ {
        self.orders.values()
    }

    pub fn to_vec(&self) -> Vec<Order> {
        self.orders.values().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Provinces this plan moves into.
    pub fn destinations(&self) -> impl Iterator<Item = ProvinceId> + '_ {
        self.orders.values().filter_map(Order::destination)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TacticianError {
    #[error("engine fault: {0}")]
    EngineFault(String),
}

fn by_utility_desc(utilities: &UtilityTable) -> impl Fn(&ProvinceId, &ProvinceId) -> Ordering + '_ {
    move |a, b| {
        utilities
            .get(*b)
            .partial_cmp(&utilities.get(*a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(b))
    }
}

/// Orders for `power` that obey `constraints`: committed orders verbatim,
/// then each remaining unit (most valuable location first) moves to its best
/// reachable improvement, supports an own unit that already claimed that
/// province, or holds.
pub fn plan(
    map: &WorldMap,
    state: &GameState,
    power: Power,
    constraints: &Constraints,
    utilities: &UtilityTable,
) -> Result<Plan, TacticianError> {
    let mut orders: BTreeMap<ProvinceId, Order> = BTreeMap::new();
    let mut claimed: BTreeMap<ProvinceId, Unit> = BTreeMap::new();
    for fixed in &constraints.fixed {
        if fixed.unit.power != power || !state.contains_unit(&fixed.unit) {
            return Err(TacticianError::EngineFault(alloc::format!(
                "committed order `{fixed}` does not match a {power} unit on the board"
            )));
        }
        if let Some(prev) = orders.insert(fixed.unit.location, *fixed) {
            if prev != *fixed {
                return Err(TacticianError::EngineFault(alloc::format!(
                    "conflicting commitments `{prev}` and `{fixed}`"
                )));
            }
        }
        if let Command::Move(to) = fixed.command {
            claimed.entry(to).or_insert(fixed.unit);
        }
    }

    let own: BTreeSet<ProvinceId> = state.units_of(power).map(|u| u.location).collect();
    let mut free: Vec<Unit> = state
        .units_of(power)
        .filter(|u| !orders.contains_key(&u.location))
        .copied()
        .collect();
    let cmp = by_utility_desc(utilities);
    free.sort_by(|a, b| cmp(&a.location, &b.location));

    for unit in free {
        let here = utilities.get(unit.location);
        let mut options: Vec<ProvinceId> = map
            .neighbors_for(unit.location, unit.kind)
            .filter(|p| !constraints.forbidden.contains(p))
            .filter(|p| !own.contains(p))
            .filter(|p| utilities.get(*p) > here)
            .collect();
        options.sort_by(&cmp);
        let mut order = Order::hold(unit);
        for (rank, to) in options.iter().enumerate() {
            match claimed.get(to) {
                Some(mover) if rank == 0 => {
                    order = Order::support_move(unit, *mover, *to);
                    break;
                }
                Some(_) => continue,
                None => {
                    claimed.insert(*to, unit);
                    order = Order::move_to(unit, *to);
                    break;
                }
            }
        }
        orders.insert(unit.location, order);
    }
    Ok(Plan { orders })
}

/// What `power` would do with no deals in force.
pub fn anticipate(
    map: &WorldMap,
    state: &GameState,
    power: Power,
    utilities: &UtilityTable,
) -> Plan {
    plan(map, state, power, &Constraints::default(), utilities)
        .expect("unconstrained planning cannot fault")
}

/// Anticipated plans for every living power.
pub fn anticipate_all(
    map: &WorldMap,
    state: &GameState,
    utilities: &UtilityTable,
) -> BTreeMap<Power, Plan> {
    state
        .alive
        .iter()
        .map(|p| (*p, anticipate(map, state, *p, utilities)))
        .collect()
}

/// Each dislodged unit of `power` retreats to its best legal destination not
/// already chosen by another of its units, or disbands.
pub fn plan_retreats(
    map: &WorldMap,
    state: &GameState,
    resolution: &Resolution,
    power: Power,
    utilities: &UtilityTable,
) -> Vec<RetreatOrder> {
    let cmp = by_utility_desc(utilities);
    let mut taken = BTreeSet::new();
    let mut out = Vec::new();
    for d in resolution.dislodged.iter().filter(|d| d.unit.power == power) {
        let mut options = retreat_options(map, state, resolution, d);
        options.sort_by(&cmp);
        match options.into_iter().find(|p| !taken.contains(p)) {
            Some(to) => {
                taken.insert(to);
                out.push(RetreatOrder::Retreat(d.unit, to));
            }
            None => out.push(RetreatOrder::Disband(d.unit)),
        }
    }
    out
}

/// Unit kind built in a home center: a fleet only on a coast that touches
/// more sea than land.
pub fn build_kind(map: &WorldMap, province: ProvinceId) -> UnitKind {
    if map.terrain(province) != Some(Terrain::Coastal) {
        return UnitKind::Army;
    }
    let (sea, land) = map.neighbors(province).fold((0, 0), |(s, l), q| {
        if map.terrain(q) == Some(Terrain::Sea) {
            (s + 1, l)
        } else {
            (s, l + 1)
        }
    });
    if sea > land {
        UnitKind::Fleet
    } else {
        UnitKind::Army
    }
}

/// Winter builds on the most valuable vacant owned home centers, or
/// disbands of the units on the least valuable provinces.
pub fn plan_adjustments(
    map: &WorldMap,
    state: &GameState,
    power: Power,
    utilities: &UtilityTable,
) -> Vec<Adjustment> {
    let centers = state.sc_count(power);
    let units = state.unit_count(power);
    let cmp = by_utility_desc(utilities);
    match centers.cmp(&units) {
        Ordering::Greater => {
            let mut homes: Vec<ProvinceId> = map
                .home_centers(power)
                .filter(|p| state.owner_of(*p) == Some(power) && state.unit_at(*p).is_none())
                .collect();
            homes.sort_by(&cmp);
            homes
                .into_iter()
                .take(centers - units)
                .map(|p| Adjustment::Build(Unit::new(power, build_kind(map, p), p)))
                .collect()
        }
        Ordering::Less => {
            let mut mine: Vec<Unit> = state.units_of(power).copied().collect();
            mine.sort_by(|a, b| cmp(&b.location, &a.location));
            mine.into_iter()
                .take(units - centers)
                .map(Adjustment::Disband)
                .collect()
        }
        Ordering::Equal => Vec::new(),
    }
}
