//! Madoff's proposal side: spot the attacks and the contested provinces the
//! common-knowledge plans predict, and turn each into deals an opponent is
//! likely to accept.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::acceptance::Perspective;
use crate::adjudicate::legal_orders;
use crate::board::{PhaseKey, Unit};
use crate::deal::{is_consistent, BasicDeal, DealId, Dmz, Ledger, OrderCommitment};
use crate::order::{Command, Order};
use crate::session::Message;
use crate::tactician::Plan;
use crate::token::{Power, ProvinceId};

/// Minimum utility of a province we offer to help a supporter into.
pub const DEFAULT_FAVOR_UTILITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threat {
    pub attacker: Power,
    pub unit: Unit,
    pub province: ProvinceId,
    pub order: Order,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub mine: Unit,
    pub destination: ProvinceId,
    pub opponent: Power,
    pub unit: Unit,
    pub order: Order,
}

/// Favor-return budget for one phase: a third of our units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FavorLedger {
    pub credit: usize,
    pub promised: Vec<OrderCommitment>,
}

impl FavorLedger {
    pub fn new(units: usize) -> Self {
        FavorLedger {
            credit: units / 3,
            promised: Vec::new(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.credit - self.promised.len()
    }

    fn committed_units(&self) -> BTreeSet<ProvinceId> {
        self.promised.iter().map(|c| c.order.unit.location).collect()
    }
}

/// Which rule produced a proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BidStep {
    /// Ask the opponent to do something else with the unit.
    Alternative,
    /// Ask a third power for support, usually with a favor in return.
    Support,
    /// Ask the attacker for a DMZ.
    Dmz,
    /// Fallback DMZ after the alternatives for a contested province failed.
    Reservation,
}

/// Bookkeeping for one emitted proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct BidRecord {
    pub id: DealId,
    pub phase: PhaseKey,
    pub step: BidStep,
    pub only_current_phase: bool,
    /// Estimated acceptance of the proposed order and of the hostile order
    /// it replaces (alternative proposals only).
    pub proposed_estimate: Option<f64>,
    pub hostile_estimate: Option<f64>,
    pub favor_commitments: usize,
    pub units: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub deal: BasicDeal,
    pub step: BidStep,
    pub proposed_estimate: Option<f64>,
    pub hostile_estimate: Option<f64>,
    pub favor_commitments: usize,
}

/// Everything the bidder reads: our own perspective (with our real plan),
/// the anticipated plans of everyone, and the ledger.
#[derive(Clone, Copy)]
pub struct BidContext<'a> {
    pub me: Perspective<'a>,
    pub anticipated: &'a BTreeMap<Power, Plan>,
    pub ledger: &'a Ledger,
    pub favor_utility: f64,
}

impl BidContext<'_> {
    fn phase(&self) -> PhaseKey {
        self.me.state.phase_key()
    }

    fn utility(&self, p: ProvinceId) -> f64 {
        self.me.utilities.get(p)
    }

    fn by_utility_desc(&self, a: ProvinceId, b: ProvinceId) -> Ordering {
        self.utility(b)
            .partial_cmp(&self.utility(a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}

/// Hands out deal ids for one proposer and phase.
#[derive(Debug, Clone)]
pub struct DealIds {
    proposer: Power,
    phase: PhaseKey,
    next: u32,
}

impl DealIds {
    pub fn new(proposer: Power, phase: PhaseKey) -> Self {
        DealIds { proposer, phase, next: 0 }
    }

    pub fn next_id(&mut self) -> DealId {
        let id = DealId {
            proposer: self.proposer,
            phase: self.phase,
            seq: self.next,
        };
        self.next += 1;
        id
    }
}

/// Acceptance probability of `order` for `power`, computed the way `power`
/// would compute it: its own hostility row, public strengths and its
/// anticipated plan.
pub fn order_acceptance_estimate(ctx: &BidContext<'_>, power: Power, order: &Order) -> f64 {
    let Some(plan) = ctx.anticipated.get(&power) else {
        return 0.0;
    };
    Perspective { power, plan, ..ctx.me }
        .accept_order(order)
        .unwrap_or(0.0)
}

/// Anticipated opponent moves into one of our centers or onto one of our
/// units, most valuable province first.
pub fn detect_attacks(ctx: &BidContext<'_>) -> Vec<Threat> {
    let me = ctx.me.power;
    let state = ctx.me.state;
    let mut out = Vec::new();
    for (power, plan) in ctx.anticipated {
        if *power == me {
            continue;
        }
        for order in plan.orders() {
            if let Command::Move(to) = order.command {
                let ours = state.owner_of(to) == Some(me)
                    || state.unit_at(to).is_some_and(|u| u.power == me);
                if ours {
                    out.push(Threat {
                        attacker: *power,
                        unit: order.unit,
                        province: to,
                        order: *order,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        ctx.by_utility_desc(a.province, b.province)
            .then(a.unit.location.cmp(&b.unit.location))
    });
    out
}

/// Opponent units expected to move where our plan moves, excluding those
/// already reported as threats.
pub fn detect_conflicts(ctx: &BidContext<'_>, threats: &[Threat]) -> Vec<Conflict> {
    let me = ctx.me.power;
    let mut out = Vec::new();
    for mine in ctx.me.plan.orders() {
        let Command::Move(dest) = mine.command else {
            continue;
        };
        for (power, plan) in ctx.anticipated {
            if *power == me {
                continue;
            }
            for theirs in plan.orders() {
                if theirs.destination() != Some(dest) {
                    continue;
                }
                if threats.iter().any(|t| t.unit == theirs.unit && t.province == dest) {
                    continue;
                }
                out.push(Conflict {
                    mine: mine.unit,
                    destination: dest,
                    opponent: *power,
                    unit: theirs.unit,
                    order: *theirs,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        ctx.by_utility_desc(a.destination, b.destination)
            .then(a.unit.location.cmp(&b.unit.location))
    });
    out
}

fn hits(order: &Order, province: ProvinceId) -> bool {
    match order.command {
        Command::Move(to) | Command::SupportMove(_, to) => to == province,
        _ => false,
    }
}

/// Step one: the opponent's best-scoring order for the unit that leaves
/// `province` alone, if it beats the hostile order's score.
fn alternative(
    ctx: &BidContext<'_>,
    owner: Power,
    unit: &Unit,
    hostile: &Order,
    province: ProvinceId,
    ids: &mut DealIds,
) -> Option<Proposal> {
    let hostile_score = order_acceptance_estimate(ctx, owner, hostile);
    let options = legal_orders(ctx.me.map, ctx.me.state, unit).ok()?;
    let mut best: Option<(Order, f64)> = None;
    for o in options.iter().filter(|o| !hits(o, province)) {
        let s = order_acceptance_estimate(ctx, owner, o);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((*o, s));
        }
    }
    let (order, score) = best?;
    if score <= hostile_score {
        return None;
    }
    let deal = BasicDeal::new(
        ids.next_id(),
        vec![OrderCommitment::new(ctx.phase(), order)],
        Vec::new(),
    );
    Some(Proposal {
        deal,
        step: BidStep::Alternative,
        proposed_estimate: Some(score),
        hostile_estimate: Some(hostile_score),
        favor_commitments: 0,
    })
}

/// Our unit whose success decides `province`: one holding there, or one
/// planned to move in. Returns the support a third power would give it.
fn defense(ctx: &BidContext<'_>, province: ProvinceId) -> Option<(Unit, Option<ProvinceId>)> {
    let me = ctx.me.power;
    if let Some(u) = ctx.me.state.unit_at(province).filter(|u| u.power == me) {
        return match ctx.me.plan.order_for(u).map(|o| o.command) {
            Some(Command::Move(_)) => None,
            _ => Some((*u, None)),
        };
    }
    ctx.me
        .plan
        .orders()
        .find(|o| o.destination() == Some(province))
        .map(|o| (o.unit, Some(province)))
}

/// Step two: the friendliest third power able to support our defense.
fn third_party_support(
    ctx: &BidContext<'_>,
    enemy: Power,
    province: ProvinceId,
    favors: &mut FavorLedger,
    ids: &mut DealIds,
) -> Option<Proposal> {
    let me = ctx.me.power;
    let (defender, target) = defense(ctx, province)?;
    let state = ctx.me.state;
    let mut candidates: Vec<(f64, Unit)> = state
        .units
        .values()
        .filter(|u| u.power != me && u.power != enemy)
        .filter(|u| u.location != province && ctx.me.map.is_adjacent(u.location, province, u.kind))
        .map(|u| (ctx.me.hostility.normalized(me, u.power), *u))
        .collect();
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.power.cmp(&b.1.power))
            .then(a.1.location.cmp(&b.1.location))
    });
    let (_, supporter) = *candidates.first()?;
    let help = match target {
        None => Order::support_hold(supporter, defender),
        Some(to) => Order::support_move(supporter, defender, to),
    };
    let mut commitments = vec![OrderCommitment::new(ctx.phase(), help)];
    let favor = build_favor_component(ctx, supporter.power, Some(supporter), Some(defender), favors);
    let favor_commitments = usize::from(favor.is_some());
    commitments.extend(favor);
    Some(Proposal {
        deal: BasicDeal::new(ids.next_id(), commitments, Vec::new()),
        step: BidStep::Support,
        proposed_estimate: None,
        hostile_estimate: None,
        favor_commitments,
    })
}

fn dmz_deal(ctx: &BidContext<'_>, other: Power, province: ProvinceId, ids: &mut DealIds) -> BasicDeal {
    BasicDeal::new(
        ids.next_id(),
        Vec::new(),
        vec![Dmz::new(ctx.phase(), [ctx.me.power, other], [province])],
    )
}

/// Proposals against one threat, in order of preference. Only the first
/// applicable step contributes.
pub fn neutralize(
    ctx: &BidContext<'_>,
    threat: &Threat,
    favors: &mut FavorLedger,
    ids: &mut DealIds,
) -> Vec<Proposal> {
    if let Some(p) = alternative(ctx, threat.attacker, &threat.unit, &threat.order, threat.province, ids) {
        return vec![p];
    }
    if let Some(p) = third_party_support(ctx, threat.attacker, threat.province, favors, ids) {
        return vec![p];
    }
    vec![Proposal {
        deal: dmz_deal(ctx, threat.attacker, threat.province, ids),
        step: BidStep::Dmz,
        proposed_estimate: None,
        hostile_estimate: None,
        favor_commitments: 0,
    }]
}

/// Proposals for a contested province plus the reservation DMZ kept back
/// until they have all been rejected.
pub fn resolve_conflict(
    ctx: &BidContext<'_>,
    conflict: &Conflict,
    favors: &mut FavorLedger,
    ids: &mut DealIds,
) -> (Vec<Proposal>, Proposal) {
    let mut proposals = Vec::new();
    if let Some(p) = alternative(ctx, conflict.opponent, &conflict.unit, &conflict.order, conflict.destination, ids) {
        proposals.push(p);
    } else if let Some(p) = third_party_support(ctx, conflict.opponent, conflict.destination, favors, ids) {
        proposals.push(p);
    }
    let reservation = Proposal {
        deal: dmz_deal(ctx, conflict.opponent, conflict.destination, ids),
        step: BidStep::Reservation,
        proposed_estimate: None,
        hostile_estimate: None,
        favor_commitments: 0,
    };
    (proposals, reservation)
}

/// A commitment of one of our units helping `supporter` in return: support
/// into a valuable neighboring province, else support to hold. Spends one
/// unit of credit. `lent` is the supporter's unit already promised to us and
/// `defender` our unit being helped; neither is used again.
pub fn build_favor_component(
    ctx: &BidContext<'_>,
    supporter: Power,
    lent: Option<Unit>,
    defender: Option<Unit>,
    favors: &mut FavorLedger,
) -> Option<OrderCommitment> {
    if favors.remaining() == 0 {
        return None;
    }
    let me = ctx.me.power;
    let map = ctx.me.map;
    let state = ctx.me.state;
    let busy = favors.committed_units();
    // Least-needed units pay favors first.
    let mut mine: Vec<(f64, Unit)> = state
        .units_of(me)
        .filter(|u| Some(**u) != defender && !busy.contains(&u.location))
        .map(|u| (ctx.me.neediness(u).unwrap_or(1.0), *u))
        .collect();
    mine.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.location.cmp(&b.1.location))
    });
    let mine: Vec<Unit> = mine.into_iter().map(|(_, u)| u).collect();
    let theirs: Vec<Unit> = state
        .units_of(supporter)
        .filter(|u| Some(**u) != lent)
        .copied()
        .collect();

    let mut best: Option<(ProvinceId, Order)> = None;
    for m in &mine {
        for a in map.neighbors_for(m.location, m.kind) {
            if ctx.utility(a) < ctx.favor_utility
                || state.owner_of(a) == Some(me)
                || state.unit_at(a).is_some_and(|u| u.power == me || u.power == supporter)
            {
                continue;
            }
            for t in theirs.iter().filter(|t| map.is_adjacent(t.location, a, t.kind)) {
                let better = match best {
                    None => true,
                    Some((b, _)) => ctx.by_utility_desc(a, b) == Ordering::Less,
                };
                if better {
                    best = Some((a, Order::support_move(*m, *t, a)));
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    let order = best.map(|(_, o)| o).or_else(|| {
        mine.iter().find_map(|m| {
            theirs
                .iter()
                .find(|t| map.is_adjacent(m.location, t.location, m.kind))
                .map(|t| Order::support_hold(*m, *t))
        })
    })?;
    let c = OrderCommitment::new(ctx.phase(), order);
    favors.promised.push(c);
    Some(c)
}

/// All proposals for one threat or contested province.
#[derive(Debug, Clone)]
struct Group {
    proposals: Vec<Proposal>,
    reservation: Option<Proposal>,
    sent: bool,
    reservation_sent: bool,
}

/// Per-phase proposal state of one Madoff agent.
#[derive(Debug, Clone)]
pub struct Bidder {
    ids: DealIds,
    units: usize,
    favors: FavorLedger,
    groups: Option<Vec<Group>>,
    /// Proposals never sent because the ledger no longer admitted them.
    skipped: BTreeSet<DealId>,
    records: Vec<BidRecord>,
}

impl Bidder {
    pub fn new(power: Power, phase: PhaseKey, units: usize) -> Self {
        Bidder {
            ids: DealIds::new(power, phase),
            units,
            favors: FavorLedger::new(units),
            groups: None,
            skipped: BTreeSet::new(),
            records: Vec::new(),
        }
    }

    pub fn favors(&self) -> &FavorLedger {
        &self.favors
    }

    pub fn records(&self) -> &[BidRecord] {
        &self.records
    }

    pub fn take_records(&mut self) -> Vec<BidRecord> {
        core::mem::take(&mut self.records)
    }

    fn plan_groups(&mut self, ctx: &BidContext<'_>) -> Vec<Group> {
        let threats = detect_attacks(ctx);
        let conflicts = detect_conflicts(ctx, &threats);
        let mut groups = Vec::new();
        let mut covered: BTreeSet<(ProvinceId, ProvinceId)> = BTreeSet::new();
        for t in &threats {
            if !covered.insert((t.unit.location, t.province)) {
                continue;
            }
            groups.push(Group {
                proposals: neutralize(ctx, t, &mut self.favors, &mut self.ids),
                reservation: None,
                sent: false,
                reservation_sent: false,
            });
        }
        for c in &conflicts {
            if !covered.insert((c.unit.location, c.destination)) {
                continue;
            }
            let (proposals, reservation) = resolve_conflict(ctx, c, &mut self.favors, &mut self.ids);
            groups.push(Group {
                proposals,
                reservation: Some(reservation),
                sent: false,
                reservation_sent: false,
            });
        }
        groups
    }

    fn emit(&mut self, ctx: &BidContext<'_>, p: &Proposal, out: &mut Vec<Message>) -> bool {
        if !p.deal.only_concerns(ctx.phase()) || !is_consistent(ctx.ledger, &p.deal) {
            return false;
        }
        self.records.push(BidRecord {
            id: p.deal.id,
            phase: ctx.phase(),
            step: p.step,
            only_current_phase: p.deal.only_concerns(ctx.phase()),
            proposed_estimate: p.proposed_estimate,
            hostile_estimate: p.hostile_estimate,
            favor_commitments: p.favor_commitments,
            units: self.units,
        });
        out.push(Message::propose(p.deal.clone()));
        true
    }

    /// Proposals for this round: every group's proposals the first time,
    /// then each reservation once all of its siblings are rejected.
    /// Proposals the ledger no longer admits are skipped and count as
    /// rejected.
    pub fn generate_proposals(&mut self, ctx: &BidContext<'_>, rejected: &BTreeSet<DealId>) -> Vec<Message> {
        let mut groups = match self.groups.take() {
            Some(g) => g,
            None => self.plan_groups(ctx),
        };
        let mut out = Vec::new();
        for g in &mut groups {
            if !g.sent {
                g.sent = true;
                for p in &g.proposals {
                    if !self.emit(ctx, p, &mut out) {
                        self.skipped.insert(p.deal.id);
                    }
                }
            }
        }
        for g in &mut groups {
            if g.reservation_sent {
                continue;
            }
            let Some(res) = &g.reservation else { continue };
            let all_rejected = g
                .proposals
                .iter()
                .all(|p| rejected.contains(&p.deal.id) || self.skipped.contains(&p.deal.id));
            if all_rejected {
                g.reservation_sent = true;
                let res = res.clone();
                self.emit(ctx, &res, &mut out);
            }
        }
        self.groups = Some(groups);
        out
    }
}
