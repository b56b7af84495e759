//! Simultaneous order resolution without convoys.
//!
//! Movement phases go through [`adjudicate`] then [`apply_movement`]; the
//! following retreat phase through [`resolve_retreats`]; winter through
//! [`resolve_winter`].
//!
//! Strength rules:
//! - a move has strength `1 + uncut matching supports`;
//! - it succeeds iff it strictly beats every competing move into the same
//!   province and the resistance of the occupant (hold strength for a unit
//!   that stays, the supported strength of its own move in a head-to-head);
//! - supports from the occupant's power never count against it, and a unit
//!   never dislodges a unit of its own power;
//! - a support is cut by any move into the supporter's province from a
//!   province other than the one the support acts on.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::board::{GameState, PhaseKey, Season, Unit};
use crate::map::WorldMap;
use crate::order::{Adjustment, Command, Order, RetreatOrder};
use crate::token::{Power, ProvinceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderOutcome {
    Succeeded,
    Bounced,
    Cut,
    /// A legal support whose supported unit did something else.
    Void,
    /// Illegal order, adjudicated as a hold.
    Invalid,
}

impl OrderOutcome {
    pub fn keyword(self) -> &'static str {
        match self {
            OrderOutcome::Succeeded => "SUCCEEDED",
            OrderOutcome::Bounced => "BOUNCED",
            OrderOutcome::Cut => "CUT",
            OrderOutcome::Void => "VOID",
            OrderOutcome::Invalid => "INVALID",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dislodgement {
    pub unit: Unit,
    pub attacker: Power,
    pub attacker_origin: ProvinceId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub phase: PhaseKey,
    /// One entry per unit, in location order: the submitted order (or the
    /// default hold) and its outcome.
    pub orders: Vec<(Order, OrderOutcome)>,
    pub dislodged: Vec<Dislodgement>,
    /// Provinces left empty by a standoff; retreats may not enter them.
    pub contested: BTreeSet<ProvinceId>,
    /// Centers occupied by a non-owner after a Fall movement phase.
    pub captures: Vec<(Power, ProvinceId)>,
}

impl Resolution {
    pub fn outcome_of(&self, unit: &Unit) -> Option<OrderOutcome> {
        self.orders
            .iter()
            .find(|(o, _)| o.unit == *unit)
            .map(|(_, r)| *r)
    }

    pub fn order_of(&self, unit: &Unit) -> Option<&Order> {
        self.orders.iter().find(|(o, _)| o.unit == *unit).map(|(o, _)| o)
    }

    pub fn dislodgement_of(&self, unit: &Unit) -> Option<&Dislodgement> {
        self.dislodged.iter().find(|d| d.unit == *unit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdjudicationError {
    #[error("order for {0:?}, which is not on the board")]
    UnknownUnit(Unit),
    #[error("two orders for the unit in {0}")]
    DuplicateOrder(ProvinceId),
    #[error("{0:?} is not a movement phase")]
    NotMovementPhase(Season),
    #[error("{0:?} is not a retreat phase")]
    NotRetreatPhase(Season),
    #[error("{0:?} is not the winter phase")]
    NotWinter(Season),
}

/// Whether `order` satisfies the structural order invariants on this board.
pub fn is_legal(map: &WorldMap, state: &GameState, order: &Order) -> bool {
    let u = order.unit;
    if !state.contains_unit(&u) {
        return false;
    }
    match order.command {
        Command::Hold => true,
        Command::Move(to) => map.is_adjacent(u.location, to, u.kind),
        Command::SupportHold(s) => {
            state.contains_unit(&s)
                && s.location != u.location
                && map.is_adjacent(u.location, s.location, u.kind)
        }
        Command::SupportMove(s, to) => {
            state.contains_unit(&s)
                && s.location != u.location
                && to != u.location
                && map.is_adjacent(s.location, to, s.kind)
                && map.is_adjacent(u.location, to, u.kind)
        }
    }
}

/// Every legal movement order for `unit`: hold, each move, then supports of
/// any unit on the board whose action target the unit can reach. Sorted by
/// order kind, then province id.
pub fn legal_orders(
    map: &WorldMap,
    state: &GameState,
    unit: &Unit,
) -> Result<Vec<Order>, AdjudicationError> {
    if !state.contains_unit(unit) {
        return Err(AdjudicationError::UnknownUnit(*unit));
    }
    let mut out = Vec::new();
    out.push(Order::hold(*unit));
    let reach: Vec<ProvinceId> = map.neighbors_for(unit.location, unit.kind).collect();
    for &to in &reach {
        out.push(Order::move_to(*unit, to));
    }
    for &target in &reach {
        if let Some(other) = state.unit_at(target) {
            out.push(Order::support_hold(*unit, *other));
        }
    }
    for &to in &reach {
        for from in map.neighbors(to) {
            if from == unit.location {
                continue;
            }
            if let Some(other) = state.unit_at(from) {
                if map.is_adjacent(from, to, other.kind) {
                    out.push(Order::support_move(*unit, *other, to));
                }
            }
        }
    }
    // Neighbors are already sorted, so this only matters for support-move
    // where several origins share a target.
    out.sort_by_key(|o| (o.kind_rank(), o.sort_province(), o.supported().map(|s| s.location)));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Unknown,
    Success,
    Fail,
}

struct MoveInfo {
    origin: ProvinceId,
    dest: ProvinceId,
    power: Power,
    /// Powers of the uncut supports this move receives.
    supporters: Vec<Power>,
    /// Index of the move made by the unit standing in `dest`, if any.
    occupant_move: Option<usize>,
    head_to_head: bool,
}

impl MoveInfo {
    fn full(&self) -> u32 {
        1 + self.supporters.len() as u32
    }

    /// Attack strength against a unit of `defender` that stays in `dest`.
    fn against(&self, defender: Power) -> u32 {
        if defender == self.power {
            0
        } else {
            1 + self.supporters.iter().filter(|p| **p != defender).count() as u32
        }
    }
}

/// Adjudicates one movement phase. Units without an order hold; illegal
/// orders are marked [`OrderOutcome::Invalid`] and treated as holds.
pub fn adjudicate(
    map: &WorldMap,
    state: &GameState,
    orders: &[Order],
) -> Result<Resolution, AdjudicationError> {
    if !state.phase.is_movement() {
        return Err(AdjudicationError::NotMovementPhase(state.phase));
    }
    let mut submitted: BTreeMap<ProvinceId, Order> = BTreeMap::new();
    for o in orders {
        if !state.contains_unit(&o.unit) {
            return Err(AdjudicationError::UnknownUnit(o.unit));
        }
        if submitted.insert(o.unit.location, *o).is_some() {
            return Err(AdjudicationError::DuplicateOrder(o.unit.location));
        }
    }

    // Submitted order, legality, and the command actually adjudicated.
    let mut table: Vec<(Order, bool, Command)> = Vec::with_capacity(state.units.len());
    for unit in state.units.values() {
        let order = submitted.get(&unit.location).copied().unwrap_or(Order::hold(*unit));
        let legal = is_legal(map, state, &order);
        let effective = if legal { order.command } else { Command::Hold };
        table.push((order, legal, effective));
    }
    let effective_at: BTreeMap<ProvinceId, Command> =
        table.iter().map(|(o, _, c)| (o.unit.location, *c)).collect();

    // Attack origins per destination.
    let mut attackers: BTreeMap<ProvinceId, Vec<ProvinceId>> = BTreeMap::new();
    for (o, _, c) in &table {
        if let Command::Move(to) = c {
            attackers.entry(*to).or_default().push(o.unit.location);
        }
    }

    // Support status: matched and uncut.
    let mut support_outcome: BTreeMap<ProvinceId, OrderOutcome> = BTreeMap::new();
    let mut hold_support: BTreeMap<ProvinceId, u32> = BTreeMap::new();
    let mut move_support: BTreeMap<(ProvinceId, ProvinceId), Vec<Power>> = BTreeMap::new();
    for (o, _, c) in &table {
        let (supported, target) = match c {
            Command::SupportHold(s) => (*s, s.location),
            Command::SupportMove(s, to) => (*s, *to),
            _ => continue,
        };
        let matched = match (c, effective_at.get(&supported.location)) {
            (Command::SupportHold(_), Some(sc)) => !matches!(sc, Command::Move(_)),
            (Command::SupportMove(_, to), Some(Command::Move(dest))) => dest == to,
            _ => false,
        };
        let cut = attackers
            .get(&o.unit.location)
            .is_some_and(|from| from.iter().any(|f| *f != target));
        let outcome = if !matched {
            OrderOutcome::Void
        } else if cut {
            OrderOutcome::Cut
        } else {
            OrderOutcome::Succeeded
        };
        support_outcome.insert(o.unit.location, outcome);
        if outcome == OrderOutcome::Succeeded {
            match c {
                Command::SupportHold(_) => *hold_support.entry(supported.location).or_default() += 1,
                _ => move_support
                    .entry((supported.location, target))
                    .or_default()
                    .push(o.unit.power),
            }
        }
    }

    let mut moves: Vec<MoveInfo> = Vec::new();
    let mut move_index: BTreeMap<ProvinceId, usize> = BTreeMap::new();
    for (o, _, c) in &table {
        if let Command::Move(to) = c {
            move_index.insert(o.unit.location, moves.len());
            moves.push(MoveInfo {
                origin: o.unit.location,
                dest: *to,
                power: o.unit.power,
                supporters: move_support.remove(&(o.unit.location, *to)).unwrap_or_default(),
                occupant_move: None,
                head_to_head: false,
            });
        }
    }
    for i in 0..moves.len() {
        if let Some(&j) = move_index.get(&moves[i].dest) {
            moves[i].occupant_move = Some(j);
            moves[i].head_to_head = moves[j].dest == moves[i].origin;
        }
    }

    let mut status = alloc::vec![Status::Unknown; moves.len()];
    loop {
        let mut progress = true;
        while progress {
            progress = false;
            for i in 0..moves.len() {
                if status[i] != Status::Unknown {
                    continue;
                }
                if let Some(s) = decide(i, &moves, &status, state, &hold_support, &attackers, &move_index) {
                    status[i] = s;
                    progress = true;
                }
            }
        }
        // Whatever is still open depends on a ring of moves into each
        // other's provinces: the ring moves.
        let Some(start) = status.iter().position(|s| *s == Status::Unknown) else {
            break;
        };
        let mut seen = BTreeSet::new();
        let mut cur = start;
        while seen.insert(cur) {
            cur = moves[cur]
                .occupant_move
                .expect("unresolved move must wait on an occupant");
        }
        let ring_start = cur;
        loop {
            status[cur] = Status::Success;
            cur = moves[cur].occupant_move.expect("ring");
            if cur == ring_start {
                break;
            }
        }
    }

    // Outcomes.
    let mut out_orders = Vec::with_capacity(table.len());
    for (o, legal, c) in &table {
        let outcome = if !legal {
            OrderOutcome::Invalid
        } else {
            match c {
                Command::Hold => OrderOutcome::Succeeded,
                Command::Move(_) => match status[move_index[&o.unit.location]] {
                    Status::Success => OrderOutcome::Succeeded,
                    _ => OrderOutcome::Bounced,
                },
                _ => support_outcome[&o.unit.location],
            }
        };
        out_orders.push((*o, outcome));
    }

    let mut dislodged = Vec::new();
    let mut succeeded_into = BTreeSet::new();
    for (i, m) in moves.iter().enumerate() {
        if status[i] != Status::Success {
            continue;
        }
        succeeded_into.insert(m.dest);
        if let Some(occ) = state.unit_at(m.dest) {
            let vacated = m.occupant_move.is_some_and(|j| status[j] == Status::Success);
            if !vacated {
                dislodged.push(Dislodgement {
                    unit: *occ,
                    attacker: m.power,
                    attacker_origin: m.origin,
                });
            }
        }
    }
    let contested = moves
        .iter()
        .enumerate()
        .filter(|(i, m)| status[*i] == Status::Fail && !succeeded_into.contains(&m.dest))
        .map(|(_, m)| m.dest)
        .filter(|p| {
            // Still occupied provinces are not vacant anyway; keep the set to
            // genuinely empty standoff provinces.
            match state.unit_at(*p) {
                None => true,
                Some(_) => move_index
                    .get(p)
                    .is_some_and(|j| status[*j] == Status::Success),
            }
        })
        .collect();

    let mut resolution = Resolution {
        phase: state.phase_key(),
        orders: out_orders,
        dislodged,
        contested,
        captures: Vec::new(),
    };
    if state.phase == Season::Fall {
        let after = positions_after(state, &resolution);
        resolution.captures = after
            .values()
            .filter(|u| map.is_supply_center(u.location))
            .filter(|u| state.owner_of(u.location) != Some(u.power))
            .map(|u| (u.power, u.location))
            .collect();
    }
    Ok(resolution)
}

fn decide(
    i: usize,
    moves: &[MoveInfo],
    status: &[Status],
    state: &GameState,
    hold_support: &BTreeMap<ProvinceId, u32>,
    attackers: &BTreeMap<ProvinceId, Vec<ProvinceId>>,
    move_index: &BTreeMap<ProvinceId, usize>,
) -> Option<Status> {
    let m = &moves[i];
    let full = m.full();
    let occupant = state.unit_at(m.dest);

    // (attack_min, attack_max, resist_min, resist_max)
    let (att_lo, att_hi, res_lo, res_hi) = match (occupant, m.occupant_move) {
        (None, _) => (full, full, 0, 0),
        (Some(occ), None) => {
            let hold = 1 + hold_support.get(&m.dest).copied().unwrap_or(0);
            let a = m.against(occ.power);
            (a, a, hold, hold)
        }
        (Some(occ), Some(j)) if m.head_to_head => {
            let a = m.against(occ.power);
            let defend = moves[j].full();
            (a, a, defend, defend)
        }
        (Some(occ), Some(j)) => {
            let stays = m.against(occ.power);
            match status[j] {
                Status::Success => (full, full, 0, 0),
                Status::Fail => (stays, stays, 1, 1),
                Status::Unknown => (stays.min(full), full, 0, 1),
            }
        }
    };

    // Competing moves into the same province.
    let mut prev_lo_max = 0;
    let mut prev_hi_max = 0;
    for &from in attackers.get(&m.dest).map(Vec::as_slice).unwrap_or(&[]) {
        if from == m.origin {
            continue;
        }
        let n = &moves[move_index[&from]];
        // A unit that loses a head-to-head battle does not hold others off.
        let opposite = n.occupant_move.filter(|_| n.head_to_head);
        let (lo, hi) = match opposite.map(|j| status[j]) {
            Some(Status::Success) => (0, 0),
            Some(Status::Unknown) => (0, n.full()),
            _ => (n.full(), n.full()),
        };
        prev_lo_max = prev_lo_max.max(lo);
        prev_hi_max = prev_hi_max.max(hi);
    }

    if att_lo > res_hi && att_lo > prev_hi_max {
        Some(Status::Success)
    } else if att_hi <= res_lo || att_hi <= prev_lo_max {
        Some(Status::Fail)
    } else {
        None
    }
}

/// Unit positions after the movement: successful movers relocated, the
/// dislodged removed.
fn positions_after(state: &GameState, resolution: &Resolution) -> BTreeMap<ProvinceId, Unit> {
    let mut units = BTreeMap::new();
    for (order, outcome) in &resolution.orders {
        let u = order.unit;
        if resolution.dislodgement_of(&u).is_some() {
            continue;
        }
        match (order.command, outcome) {
            (Command::Move(to), OrderOutcome::Succeeded) => {
                units.insert(to, Unit { location: to, ..u });
            }
            _ => {
                units.insert(u.location, u);
            }
        }
    }
    debug_assert!(units.len() + resolution.dislodged.len() == state.units.len());
    units
}

/// Applies a movement resolution, entering the retreat phase. Dislodged
/// units leave the board; they live on in `resolution.dislodged`.
pub fn apply_movement(map: &WorldMap, state: &GameState, resolution: &Resolution) -> GameState {
    let mut next = state.clone();
    next.units = positions_after(state, resolution);
    next.phase = match state.phase {
        Season::Spring => Season::Summer,
        _ => Season::Autumn,
    };
    next.refresh_alive(map);
    next
}

/// Legal retreat destinations for a dislodged unit, sorted by id.
pub fn retreat_options(
    map: &WorldMap,
    state: &GameState,
    resolution: &Resolution,
    dislodgement: &Dislodgement,
) -> Vec<ProvinceId> {
    let u = dislodgement.unit;
    map.neighbors_for(u.location, u.kind)
        .filter(|p| state.unit_at(*p).is_none())
        .filter(|p| *p != dislodgement.attacker_origin)
        .filter(|p| !resolution.contested.contains(p))
        .collect()
}

/// Resolves the retreat phase: legal retreats move, colliding or illegal
/// ones (and units without orders) are disbanded. After Autumn, supply
/// center ownership follows occupation.
pub fn resolve_retreats(
    map: &WorldMap,
    state: &GameState,
    resolution: &Resolution,
    retreats: &[RetreatOrder],
) -> Result<GameState, AdjudicationError> {
    if !state.phase.is_retreat() {
        return Err(AdjudicationError::NotRetreatPhase(state.phase));
    }
    let mut wanted: BTreeMap<ProvinceId, Vec<Unit>> = BTreeMap::new();
    for d in &resolution.dislodged {
        let order = retreats.iter().find(|r| r.unit() == d.unit);
        if let Some(RetreatOrder::Retreat(u, to)) = order {
            if retreat_options(map, state, resolution, d).contains(to) {
                wanted.entry(*to).or_default().push(*u);
            } else {
                log::warn!("illegal retreat {} treated as disband", order.unwrap());
            }
        }
    }
    let mut next = state.clone();
    for (to, units) in wanted {
        if let [u] = units.as_slice() {
            next.units.insert(to, Unit { location: to, ..*u });
        }
    }
    if state.phase == Season::Autumn {
        for (sc, owner) in next.sc_owner.iter_mut() {
            if let Some(u) = next.units.get(sc) {
                *owner = Some(u.power);
            }
        }
        next.phase = Season::Winter;
    } else {
        next.phase = Season::Fall;
    }
    next.refresh_alive(map);
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinterReport {
    pub state: GameState,
    /// Adjustments carried out, including forced disbands.
    pub applied: Vec<Adjustment>,
    /// Requested adjustments that were ignored, with the reason.
    pub ignored: Vec<(Adjustment, &'static str)>,
}

/// Builds and disbands so each power's unit count matches its center count
/// as far as its vacant owned home centers allow; advances to next Spring.
pub fn resolve_winter(
    map: &WorldMap,
    state: &GameState,
    adjustments: &BTreeMap<Power, Vec<Adjustment>>,
) -> Result<WinterReport, AdjudicationError> {
    if state.phase != Season::Winter {
        return Err(AdjudicationError::NotWinter(state.phase));
    }
    let mut next = state.clone();
    let mut applied = Vec::new();
    let mut ignored = Vec::new();
    let none = Vec::new();
    for &power in map.powers() {
        let requests = adjustments.get(&power).unwrap_or(&none);
        let centers = state.sc_count(power);
        let units = state.unit_count(power);
        if units > centers {
            let mut need = units - centers;
            for adj in requests {
                match adj {
                    Adjustment::Disband(u) if need > 0 && next.contains_unit(u) && u.power == power => {
                        next.units.remove(&u.location);
                        applied.push(*adj);
                        need -= 1;
                    }
                    _ => ignored.push((*adj, "not a required disband")),
                }
            }
            // Civil disorder: remove the remaining surplus in province order.
            let forced: Vec<Unit> = next.units_of(power).take(need).copied().collect();
            for u in forced {
                next.units.remove(&u.location);
                applied.push(Adjustment::Disband(u));
            }
        } else {
            let mut allowed = centers - units;
            for adj in requests {
                let Adjustment::Build(u) = adj else {
                    ignored.push((*adj, "disband without surplus"));
                    continue;
                };
                let province = map.province(u.location);
                let reason = if allowed == 0 {
                    Some("no build allowance left")
                } else if u.power != power || province.and_then(|p| p.home_power) != Some(power) {
                    Some("not a home center")
                } else if state.owner_of(u.location) != Some(power) {
                    Some("home center not owned")
                } else if next.unit_at(u.location).is_some() {
                    Some("occupied")
                } else if !province.is_some_and(|p| p.terrain.admits(u.kind)) {
                    Some("terrain does not admit unit")
                } else {
                    None
                };
                match reason {
                    Some(r) => {
                        log::warn!("ignored {adj}: {r}");
                        ignored.push((*adj, r));
                    }
                    None => {
                        next.units.insert(u.location, *u);
                        applied.push(*adj);
                        allowed -= 1;
                    }
                }
            }
        }
    }
    next.year += 1;
    next.phase = Season::Spring;
    next.refresh_alive(map);
    Ok(WinterReport { state: next, applied, ignored })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameStatus {
    Ongoing,
    Solo(Power),
    YearLimitReached,
}

/// Solo victory needs a strict majority of centers (18 of 34 on the
/// standard map). `max_year` is the first year that is not played.
pub fn game_status(map: &WorldMap, state: &GameState, max_year: u16) -> GameStatus {
    let threshold = map.supply_center_count() / 2 + 1;
    if let Some(p) = map.powers().iter().find(|p| state.sc_count(**p) >= threshold) {
        return GameStatus::Solo(*p);
    }
    if state.year >= max_year {
        GameStatus::YearLimitReached
    } else {
        GameStatus::Ongoing
    }
}
