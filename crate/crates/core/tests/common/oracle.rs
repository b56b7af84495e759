//! Brute-force movement resolver used as a test oracle.
//!
//! It shares nothing with the engine beyond the board types: legality is
//! re-derived from the adjacency table, and the move results are found by
//! trying every success/failure assignment and keeping the ones that agree
//! with the strength rules.

use std::collections::{BTreeMap, BTreeSet};

use madoff_core::adjudicate::OrderOutcome;
use madoff_core::{Command, GameState, Order, Power, ProvinceId, Unit, WorldMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub outcomes: BTreeMap<ProvinceId, OrderOutcome>,
    /// Dislodged unit -> attacker origin.
    pub dislodged: BTreeMap<ProvinceId, ProvinceId>,
    pub contested: BTreeSet<ProvinceId>,
}

fn legal(map: &WorldMap, units: &BTreeMap<ProvinceId, Unit>, o: &Order) -> bool {
    let u = o.unit;
    let adj = |a: ProvinceId, b: ProvinceId, k| map.is_adjacent(a, b, k);
    match o.command {
        Command::Hold => true,
        Command::Move(to) => adj(u.location, to, u.kind),
        Command::SupportHold(s) => {
            units.get(&s.location) == Some(&s) && s.location != u.location && adj(u.location, s.location, u.kind)
        }
        Command::SupportMove(s, to) => {
            units.get(&s.location) == Some(&s)
                && s.location != u.location
                && to != u.location
                && adj(s.location, to, s.kind)
                && adj(u.location, to, u.kind)
        }
    }
}

struct Mv {
    origin: ProvinceId,
    dest: ProvinceId,
    power: Power,
    supports: Vec<Power>,
}

pub fn resolve(map: &WorldMap, state: &GameState, orders: &[Order]) -> OracleResult {
    let units = &state.units;
    let mut cmd: BTreeMap<ProvinceId, (Order, bool)> = units
        .values()
        .map(|u| (u.location, (Order::hold(*u), true)))
        .collect();
    for o in orders {
        cmd.insert(o.unit.location, (*o, legal(map, units, o)));
    }
    let effective = |p: ProvinceId| -> Command {
        let (o, ok) = cmd[&p];
        if ok {
            o.command
        } else {
            Command::Hold
        }
    };

    let mut moves: Vec<Mv> = Vec::new();
    for &p in cmd.keys() {
        if let Command::Move(to) = effective(p) {
            moves.push(Mv { origin: p, dest: to, power: units[&p].power, supports: vec![] });
        }
    }
    let moving_into = |p: ProvinceId| moves.iter().filter(move |m| m.dest == p);

    let mut outcomes = BTreeMap::new();
    let mut hold_strength: BTreeMap<ProvinceId, usize> = BTreeMap::new();
    let mut move_support: Vec<(ProvinceId, ProvinceId, Power)> = Vec::new();
    for (&p, (o, ok)) in &cmd {
        if !ok {
            outcomes.insert(p, OrderOutcome::Invalid);
            continue;
        }
        let (target, matched) = match o.command {
            Command::Hold | Command::Move(_) => continue,
            Command::SupportHold(s) => (s.location, !matches!(effective(s.location), Command::Move(_))),
            Command::SupportMove(s, to) => (to, effective(s.location) == Command::Move(to)),
        };
        let cut = moving_into(p).any(|m| m.origin != target);
        let r = if !matched {
            OrderOutcome::Void
        } else if cut {
            OrderOutcome::Cut
        } else {
            OrderOutcome::Succeeded
        };
        outcomes.insert(p, r);
        if r == OrderOutcome::Succeeded {
            match o.command {
                Command::SupportHold(s) => *hold_strength.entry(s.location).or_default() += 1,
                Command::SupportMove(s, to) => move_support.push((s.location, to, o.unit.power)),
                _ => unreachable!(),
            }
        }
    }
    for m in &mut moves {
        m.supports = move_support
            .iter()
            .filter(|(from, to, _)| *from == m.origin && *to == m.dest)
            .map(|(_, _, p)| *p)
            .collect();
    }

    let n = moves.len();
    let idx_from = |p: ProvinceId| moves.iter().position(|m| m.origin == p);
    let predict = |i: usize, ok: &dyn Fn(usize) -> bool| -> bool {
        let m = &moves[i];
        let full = 1 + m.supports.len();
        let against = |def: Power| {
            if def == m.power {
                0
            } else {
                1 + m.supports.iter().filter(|p| **p != def).count()
            }
        };
        let (attack, resist) = match units.get(&m.dest) {
            None => (full, 0),
            Some(occ) => match idx_from(m.dest) {
                None => (against(occ.power), 1 + hold_strength.get(&m.dest).copied().unwrap_or(0)),
                Some(j) if moves[j].dest == m.origin => (against(occ.power), 1 + moves[j].supports.len()),
                Some(j) if ok(j) => (full, 0),
                Some(_) => (against(occ.power), 1),
            },
        };
        let prevent = moves
            .iter()
            .enumerate()
            .filter(|(k, c)| *k != i && c.dest == m.dest)
            .map(|(_, c)| {
                let beaten = idx_from(c.dest).is_some_and(|j| moves[j].dest == c.origin && ok(j));
                if beaten {
                    0
                } else {
                    1 + c.supports.len()
                }
            })
            .max()
            .unwrap_or(0);
        attack > resist && attack > prevent
    };

    let mut consistent: Vec<u32> = Vec::new();
    for mask in 0..(1u32 << n) {
        let ok = |k: usize| mask & (1 << k) != 0;
        if (0..n).all(|i| predict(i, &ok) == ok(i)) {
            consistent.push(mask);
        }
    }
    // Rings of moves admit both "all stay" and "all move"; the moving one
    // wins, and it must contain every other consistent assignment.
    let best = *consistent.iter().max_by_key(|m| m.count_ones()).expect("some assignment is consistent");
    assert!(consistent.iter().all(|m| m & best == *m), "ambiguous resolution {consistent:?}");
    let ok = |k: usize| best & (1 << k) != 0;

    let mut dislodged = BTreeMap::new();
    let mut entered = BTreeSet::new();
    for (i, m) in moves.iter().enumerate() {
        outcomes.insert(m.origin, if ok(i) { OrderOutcome::Succeeded } else { OrderOutcome::Bounced });
        if ok(i) {
            entered.insert(m.dest);
            let vacated = idx_from(m.dest).is_some_and(ok);
            if units.contains_key(&m.dest) && !vacated {
                dislodged.insert(m.dest, m.origin);
            }
        }
    }
    for (&p, (_, legal)) in &cmd {
        if *legal && effective(p) == Command::Hold {
            outcomes.insert(p, OrderOutcome::Succeeded);
        }
    }
    let contested = moves
        .iter()
        .enumerate()
        .filter(|(i, m)| !ok(*i) && !entered.contains(&m.dest))
        .map(|(_, m)| m.dest)
        .filter(|p| !units.contains_key(p) || idx_from(*p).is_some_and(ok))
        .collect();
    OracleResult { outcomes, dislodged, contested }
}

/// Every command a unit could be given on this board, legal or not, except
/// moves and supports aimed at its own province.
pub fn all_commands(map: &WorldMap, state: &GameState, unit: Unit) -> Vec<Order> {
    let mut out = vec![Order::hold(unit)];
    let provinces: Vec<ProvinceId> = map.provinces().iter().map(|p| p.id).collect();
    for &p in &provinces {
        if p != unit.location {
            out.push(Order::move_to(unit, p));
        }
    }
    for other in state.units.values().filter(|u| **u != unit) {
        out.push(Order::support_hold(unit, *other));
        for &p in &provinces {
            if p != other.location && p != unit.location {
                out.push(Order::support_move(unit, *other, p));
            }
        }
    }
    out
}

fn from_engine(map: &WorldMap, state: &GameState, orders: &[Order]) -> OracleResult {
    let r = madoff_core::adjudicate(map, state, orders).expect("orders refer to units on the board");
    OracleResult {
        outcomes: r.orders.iter().map(|(o, out)| (o.unit.location, *out)).collect(),
        dislodged: r.dislodged.iter().map(|d| (d.unit.location, d.attacker_origin)).collect(),
        contested: r.contested.clone(),
    }
}

/// Counts of one exhaustive sweep.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub cases: usize,
    pub mismatches: usize,
}

/// Adjudicates every combination of `all_commands` for the units of
/// `state` with both the engine and the oracle. Returns the first mismatch
/// as text alongside the counts.
pub fn sweep(map: &WorldMap, state: &GameState) -> (Sweep, Option<String>) {
    let units: Vec<Unit> = state.units.values().copied().collect();
    let options: Vec<Vec<Order>> = units.iter().map(|u| all_commands(map, state, *u)).collect();
    let mut pick = vec![0usize; units.len()];
    let mut s = Sweep::default();
    let mut first = None;
    loop {
        let orders: Vec<Order> = pick.iter().enumerate().map(|(i, k)| options[i][*k]).collect();
        s.cases += 1;
        let want = resolve(map, state, &orders);
        let got = from_engine(map, state, &orders);
        if want != got {
            s.mismatches += 1;
            if first.is_none() {
                let text: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
                first = Some(format!("{text:?}\n oracle {want:?}\n engine {got:?}"));
            }
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return (s, first);
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub const K4: &str = "PROVINCE A inland\nPROVINCE B inland\nPROVINCE C inland\nPROVINCE D inland\n\
ADJ A B army\nADJ A C army\nADJ A D army\nADJ B C army\nADJ B D army\nADJ C D army\n";

/// Two seas, an inland hub and three coasts; some edges are one kind only.
pub const SIX: &str = "PROVINCE LA coastal\nPROVINCE LB coastal\nPROVINCE LC inland\n\
PROVINCE SA sea\nPROVINCE SB sea\nPROVINCE LD coastal\n\
ADJ LA LB both\nADJ LA LC army\nADJ LB LC army\nADJ LA SA fleet\nADJ LB SA fleet\n\
ADJ SA SB fleet\nADJ LD SB fleet\nADJ LB LD army\nADJ LC LD army\n";

pub const RING: &str = "PROVINCE A inland\nPROVINCE B inland\nPROVINCE C inland\nPROVINCE D inland\nPROVINCE E inland\n\
ADJ A B army\nADJ B C army\nADJ C D army\nADJ D E army\nADJ E A army\nADJ A C army\n";

/// Boards for the exhaustive sweep: every map of the sweep with several
/// placements and power patterns.
pub fn sweep_boards() -> Vec<(String, WorldMap, GameState)> {
    use madoff_core::map::Terrain;
    use madoff_core::token::{power, prov};
    use madoff_core::{Season, UnitKind};
    let mut out = Vec::new();
    let mut add = |label: &str, map: &WorldMap, cells: &[(&str, &str)]| {
        let units = cells
            .iter()
            .map(|(p, who)| {
                let id = prov(p);
                let kind = match map.terrain(id) {
                    Some(Terrain::Sea) => UnitKind::Fleet,
                    Some(Terrain::Coastal) if id.as_str().ends_with('B') => UnitKind::Fleet,
                    _ => UnitKind::Army,
                };
                (id, Unit::new(power(who), kind, id))
            })
            .collect();
        let state = GameState::with_units(map, 1901, Season::Spring, units);
        out.push((format!("{label} {cells:?}"), map.clone(), state));
    };

    let k4 = WorldMap::parse(K4).unwrap();
    for pattern in [["AAA", "BBB", "CCC", "DDD"], ["AAA", "AAA", "BBB", "BBB"], ["AAA", "BBB", "AAA", "AAA"]] {
        let cells: Vec<(&str, &str)> = ["A", "B", "C", "D"].into_iter().zip(pattern).collect();
        add("K4", &k4, &cells);
    }
    for skip in ["A", "B", "C", "D"] {
        let cells: Vec<(&str, &str)> = ["A", "B", "C", "D"]
            .into_iter()
            .filter(|p| *p != skip)
            .zip(["AAA", "AAA", "BBB"])
            .collect();
        add("K4", &k4, &cells);
    }

    let six = WorldMap::parse(SIX).unwrap();
    let names = ["LA", "LB", "LC", "SA", "SB", "LD"];
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            for c in b + 1..names.len() {
                add("SIX", &six, &[(names[a], "AAA"), (names[b], "BBB"), (names[c], "AAA")]);
            }
        }
    }

    let ring = WorldMap::parse(RING).unwrap();
    add("RING", &ring, &[("A", "AAA"), ("B", "BBB"), ("C", "AAA"), ("D", "BBB")]);
    add("RING", &ring, &[("A", "AAA"), ("C", "BBB"), ("D", "CCC"), ("E", "BBB")]);
    out
}
