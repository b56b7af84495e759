//! Hand-written adjudication scenarios on the standard board. Movement
//! cases are also checked against the brute-force oracle.

use std::collections::BTreeMap;

use madoff_core::adjudicate::{apply_movement, game_status, resolve_retreats, resolve_winter, OrderOutcome};
use madoff_core::order::parse_order;
use madoff_core::token::{power, prov};
use madoff_core::{
    adjudicate, standard_map, Adjustment, GameState, GameStatus, Order, Resolution, RetreatOrder, Season, Unit,
    UnitKind, WorldMap,
};

use super::oracle;

pub type Scenario = (&'static str, fn() -> Result<(), String>);

fn board(season: Season, units: &[(&str, char, &str)]) -> (WorldMap, GameState) {
    let map = standard_map();
    let units = units
        .iter()
        .map(|(p, k, at)| {
            let kind = if *k == 'F' { UnitKind::Fleet } else { UnitKind::Army };
            (prov(at), Unit::new(power(p), kind, prov(at)))
        })
        .collect();
    let state = GameState::with_units(&map, 1901, season, units);
    (map, state)
}

fn run(map: &WorldMap, state: &GameState, orders: &[&str]) -> Result<Resolution, String> {
    let orders: Vec<Order> = orders
        .iter()
        .map(|t| parse_order(state, t).map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()?;
    let r = adjudicate(map, state, &orders).map_err(|e| e.to_string())?;
    let want = oracle::resolve(map, state, &orders);
    let got: BTreeMap<_, _> = r.orders.iter().map(|(o, out)| (o.unit.location, *out)).collect();
    if got != want.outcomes {
        return Err(format!("oracle disagrees: {:?} vs {:?}", want.outcomes, got));
    }
    Ok(r)
}

fn outcome(r: &Resolution, at: &str) -> OrderOutcome {
    r.orders
        .iter()
        .find(|(o, _)| o.unit.location == prov(at))
        .map(|(_, out)| *out)
        .expect("unit on board")
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn equal_strength_bounce() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("RUS", 'A', "WAR")]);
    let r = run(&map, &s, &["A VIE - GAL", "A WAR - GAL"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Bounced)?;
    expect("WAR", outcome(&r, "WAR"), OrderOutcome::Bounced)?;
    expect("contested", r.contested.contains(&prov("GAL")), true)
}

fn supported_dislodgement() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A BOH S A VIE - GAL", "A GAL H"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Succeeded)?;
    expect("dislodged", r.dislodged.len(), 1)?;
    expect("origin", r.dislodged[0].attacker_origin, prov("VIE"))
}

fn unsupported_attack_on_holder_fails() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Bounced)?;
    expect("dislodged", r.dislodged.is_empty(), true)
}

fn support_cut() -> Result<(), String> {
    let (map, s) = board(
        Season::Spring,
        &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH"), ("RUS", 'A', "GAL"), ("GER", 'A', "MUN")],
    );
    let r = run(&map, &s, &["A VIE - GAL", "A BOH S A VIE - GAL", "A MUN - BOH"])?;
    expect("BOH", outcome(&r, "BOH"), OrderOutcome::Cut)?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Bounced)?;
    expect("dislodged", r.dislodged.is_empty(), true)
}

fn support_not_cut_from_target() -> Result<(), String> {
    // The unit being attacked cannot cut the support against itself.
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A BOH S A VIE - GAL", "A GAL - BOH"])?;
    expect("BOH", outcome(&r, "BOH"), OrderOutcome::Succeeded)?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Succeeded)?;
    expect("dislodged", r.dislodged.len(), 1)
}

fn head_to_head_bounce() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A GAL - VIE"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Bounced)?;
    expect("GAL", outcome(&r, "GAL"), OrderOutcome::Bounced)
}

fn head_to_head_stronger_wins() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BUD"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A BUD S A VIE - GAL", "A GAL - VIE"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Succeeded)?;
    expect("GAL", outcome(&r, "GAL"), OrderOutcome::Bounced)?;
    expect("dislodged", r.dislodged.iter().map(|d| d.unit.location).collect::<Vec<_>>(), vec![prov("GAL")])
}

fn no_self_dislodgement() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH"), ("AUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A BOH S A VIE - GAL"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Bounced)?;
    expect("dislodged", r.dislodged.is_empty(), true)
}

fn rotation_moves() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("RUS", 'A', "GAL"), ("GER", 'A', "BOH")]);
    let r = run(&map, &s, &["A VIE - GAL", "A GAL - BOH", "A BOH - VIE"])?;
    for at in ["VIE", "GAL", "BOH"] {
        expect(at, outcome(&r, at), OrderOutcome::Succeeded)?;
    }
    Ok(())
}

fn illegal_order_holds() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("RUS", 'A', "WAR")]);
    let r = run(&map, &s, &["A VIE - WAR", "A WAR - VIE"])?;
    expect("VIE", outcome(&r, "VIE"), OrderOutcome::Invalid)?;
    expect("WAR", outcome(&r, "WAR"), OrderOutcome::Invalid)
}

fn void_support() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH")]);
    let r = run(&map, &s, &["A VIE - TYR", "A BOH S A VIE - GAL"])?;
    expect("BOH", outcome(&r, "BOH"), OrderOutcome::Void)
}

fn retreat_collision_disbands_both() -> Result<(), String> {
    // Two dislodged units both retreat into SIL.
    let (map, s) = board(
        Season::Spring,
        &[
            ("AUS", 'A', "BOH"),
            ("GER", 'A', "MUN"),
            ("GER", 'A', "TYR"),
            ("RUS", 'A', "GAL"),
            ("TUR", 'A', "BUD"),
            ("TUR", 'A', "RUM"),
        ],
    );
    let r = run(
        &map,
        &s,
        &["A MUN - BOH", "A TYR S A MUN - BOH", "A BUD - GAL", "A RUM S A BUD - GAL"],
    )?;
    expect("dislodged", r.dislodged.len(), 2)?;
    let after = apply_movement(&map, &s, &r);
    let boh = Unit::army(power("AUS"), prov("BOH"));
    let gal = Unit::army(power("RUS"), prov("GAL"));
    let retreats = [RetreatOrder::Retreat(boh, prov("SIL")), RetreatOrder::Retreat(gal, prov("SIL"))];
    let next = resolve_retreats(&map, &after, &r, &retreats).map_err(|e| e.to_string())?;
    // Brute force: a destination wanted by exactly one unit is taken.
    let mut wanted: BTreeMap<_, usize> = BTreeMap::new();
    for x in &retreats {
        if let RetreatOrder::Retreat(_, to) = x {
            *wanted.entry(*to).or_default() += 1;
        }
    }
    expect("oracle", wanted[&prov("SIL")], 2)?;
    expect("SIL empty", next.unit_at(prov("SIL")).is_none(), true)?;
    expect("AUS units", next.unit_count(power("AUS")), 0)?;
    expect("RUS units", next.unit_count(power("RUS")), 0)
}

fn no_retreat_disbands() -> Result<(), String> {
    // A fleet in a corner with every exit taken or contested.
    let (map, s) = board(
        Season::Spring,
        &[("ITA", 'F', "NAP"), ("FRA", 'F', "TYS"), ("FRA", 'F', "ION"), ("FRA", 'A', "ROM"), ("FRA", 'A', "APU")],
    );
    let r = run(&map, &s, &["F TYS - NAP", "F ION S F TYS - NAP"])?;
    expect("dislodged", r.dislodged.len(), 1)?;
    let after = apply_movement(&map, &s, &r);
    let opts = madoff_core::adjudicate::retreat_options(&map, &after, &r, &r.dislodged[0]);
    expect("options", opts, vec![])?;
    let nap = Unit::fleet(power("ITA"), prov("NAP"));
    let next = resolve_retreats(&map, &after, &r, &[RetreatOrder::Retreat(nap, prov("TYS"))])
        .map_err(|e| e.to_string())?;
    expect("ITA units", next.unit_count(power("ITA")), 0)
}

fn retreat_relocates() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "VIE"), ("AUS", 'A', "BOH"), ("RUS", 'A', "GAL")]);
    let r = run(&map, &s, &["A VIE - GAL", "A BOH S A VIE - GAL"])?;
    let after = apply_movement(&map, &s, &r);
    let gal = Unit::army(power("RUS"), prov("GAL"));
    let opts = madoff_core::adjudicate::retreat_options(&map, &after, &r, &r.dislodged[0]);
    expect("no return to attacker origin", opts.contains(&prov("VIE")), false)?;
    let next = resolve_retreats(&map, &after, &r, &[RetreatOrder::Retreat(gal, prov("UKR"))])
        .map_err(|e| e.to_string())?;
    expect("UKR", next.unit_at(prov("UKR")).copied(), Some(Unit::army(power("RUS"), prov("UKR"))))?;
    expect("phase", next.phase, Season::Fall)
}

fn fall_capture_changes_owner() -> Result<(), String> {
    let (map, s) = board(Season::Fall, &[("AUS", 'A', "SER"), ("RUS", 'A', "SEV")]);
    let r = run(&map, &s, &["A SER - BUL"])?;
    expect("captures", r.captures.clone(), vec![(power("AUS"), prov("BUL"))])?;
    let after = apply_movement(&map, &s, &r);
    let next = resolve_retreats(&map, &after, &r, &[]).map_err(|e| e.to_string())?;
    expect("owner", next.owner_of(prov("BUL")), Some(power("AUS")))?;
    expect("phase", next.phase, Season::Winter)
}

fn spring_does_not_capture() -> Result<(), String> {
    let (map, s) = board(Season::Spring, &[("AUS", 'A', "SER")]);
    let r = run(&map, &s, &["A SER - BUL"])?;
    let after = apply_movement(&map, &s, &r);
    let next = resolve_retreats(&map, &after, &r, &[]).map_err(|e| e.to_string())?;
    expect("owner", next.owner_of(prov("BUL")), None)
}

fn winter_forced_disband() -> Result<(), String> {
    // Austria keeps two centers and four units.
    let (map, mut s) = board(
        Season::Winter,
        &[("AUS", 'A', "BOH"), ("AUS", 'A', "GAL"), ("AUS", 'A', "TYR"), ("AUS", 'A', "SER")],
    );
    s.sc_owner.insert(prov("VIE"), Some(power("RUS")));
    let adj = BTreeMap::from([(power("AUS"), vec![Adjustment::Disband(Unit::army(power("AUS"), prov("TYR")))])]);
    let report = resolve_winter(&map, &s, &adj).map_err(|e| e.to_string())?;
    expect("AUS units", report.state.unit_count(power("AUS")), 2)?;
    expect("TYR gone", report.state.unit_at(prov("TYR")).is_none(), true)
}

fn winter_builds() -> Result<(), String> {
    // Four centers, three units, one vacant home center.
    let (map, mut s) = board(Season::Winter, &[("AUS", 'A', "VIE"), ("AUS", 'A', "GAL"), ("AUS", 'F', "TRI")]);
    s.sc_owner.insert(prov("SER"), Some(power("AUS")));
    let adj = BTreeMap::from([(
        power("AUS"),
        vec![Adjustment::Build(Unit::army(power("AUS"), prov("BUD"))), Adjustment::Build(Unit::army(power("AUS"), prov("SER")))],
    )]);
    let report = resolve_winter(&map, &s, &adj).map_err(|e| e.to_string())?;
    expect("AUS units", report.state.unit_count(power("AUS")), 4)?;
    expect("ignored", report.ignored.len(), 1)?;
    expect("year", (report.state.year, report.state.phase), (1902, Season::Spring))
}

fn elimination() -> Result<(), String> {
    let (map, mut s) = board(Season::Winter, &[("RUS", 'A', "VIE")]);
    for p in ["VIE", "BUD", "TRI"] {
        s.sc_owner.insert(prov(p), Some(power("RUS")));
    }
    s.refresh_alive(&map);
    let report = resolve_winter(&map, &s, &BTreeMap::new()).map_err(|e| e.to_string())?;
    expect("AUS alive", report.state.alive.contains(&power("AUS")), false)?;
    expect("RUS alive", report.state.alive.contains(&power("RUS")), true)
}

fn solo_at_eighteen() -> Result<(), String> {
    let (map, mut s) = board(Season::Spring, &[]);
    s.sc_owner.values_mut().for_each(|o| *o = None);
    let centers: Vec<_> = s.sc_owner.keys().copied().take(18).collect();
    for c in &centers[..17] {
        s.sc_owner.insert(*c, Some(power("FRA")));
    }
    expect("17", game_status(&map, &s, 1920), GameStatus::Ongoing)?;
    s.sc_owner.insert(centers[17], Some(power("FRA")));
    expect("18", game_status(&map, &s, 1920), GameStatus::Solo(power("FRA")))?;
    let (_, s) = board(Season::Spring, &[]);
    expect("limit", game_status(&map, &s, 1901), GameStatus::YearLimitReached)
}

pub fn all() -> Vec<Scenario> {
    vec![
        ("equal-strength bounce", equal_strength_bounce),
        ("supported dislodgement", supported_dislodgement),
        ("unsupported attack on a holder fails", unsupported_attack_on_holder_fails),
        ("support cut", support_cut),
        ("support not cut by its target", support_not_cut_from_target),
        ("head-to-head bounce", head_to_head_bounce),
        ("head-to-head stronger side wins", head_to_head_stronger_wins),
        ("no self-dislodgement", no_self_dislodgement),
        ("three-unit rotation", rotation_moves),
        ("illegal orders hold", illegal_order_holds),
        ("void support", void_support),
        ("retreat collision", retreat_collision_disbands_both),
        ("no retreat available", no_retreat_disbands),
        ("retreat relocates", retreat_relocates),
        ("fall capture", fall_capture_changes_owner),
        ("spring does not capture", spring_does_not_capture),
        ("winter forced disband", winter_forced_disband),
        ("winter builds", winter_builds),
        ("elimination", elimination),
        ("solo at 18 centers", solo_at_eighteen),
    ]
}
