//! Acceptance probabilities for single orders and DMZs, and the composite
//! deal decision built from them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::board::{GameState, PhaseKey, Unit};
use crate::deal::{BasicDeal, Dmz};
use crate::hostility::{strength, HostilityMatrix};
use crate::map::WorldMap;
use crate::order::{Command, Order};
use crate::tactician::Plan;
use crate::token::{Power, ProvinceId};
use crate::utility::UtilityTable;

pub const ACCEPT_ABOVE: f64 = 0.8;
pub const REJECT_BELOW: f64 = 0.4;
/// Planned destinations above this utility make a hold commitment a no.
pub const HOLD_REFUSAL_UTILITY: f64 = 0.7;
pub const MAX_POWERS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AcceptanceError {
    #[error("unit {0} has no planned order")]
    NotInPlan(Unit),
    #[error("{0} cannot move to {1}")]
    IllegalDestination(Unit, ProvinceId),
    #[error("{0} is not a unit of {1}")]
    ForeignUnit(Unit, Power),
    #[error("competitiveness needs 1..=7 powers, got {0}")]
    PowerCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

pub fn accept_support_move(
    h_supportee: f64,
    s_supportee: f64,
    neediness: f64,
    s_target: f64,
    h_target: f64,
    target_occupied: bool,
) -> f64 {
    if target_occupied {
        0.2 * h_supportee
            + 0.1 * (1.0 - s_supportee)
            + 0.5 * (1.0 - neediness)
            + 0.1 * s_target
            + 0.1 * h_target
    } else {
        accept_support_hold(h_supportee, s_supportee, neediness)
    }
}

pub fn accept_support_hold(h_supportee: f64, s_supportee: f64, neediness: f64) -> f64 {
    0.3 * h_supportee + 0.2 * (1.0 - s_supportee) + 0.5 * (1.0 - neediness)
}

/// Move-to probability once `new_is_better` (0.2 or 0.8) is known.
pub fn move_to_probability(new_is_better: f64, h_target: f64, occupied: bool) -> f64 {
    if occupied {
        0.3 * h_target + 0.7 * new_is_better
    } else {
        new_is_better
    }
}

/// `ln n / ln 7`.
pub fn competitiveness(n_powers: usize) -> Result<f64, AcceptanceError> {
    if !(1..=MAX_POWERS).contains(&n_powers) {
        return Err(AcceptanceError::PowerCount(n_powers));
    }
    Ok((libm::log(n_powers as f64) / libm::log(MAX_POWERS as f64)).clamp(0.0, 1.0))
}

/// Score of one conflicted DMZ province.
pub fn dmz_province_probability(competitiveness: f64, utility: f64) -> f64 {
    0.6 * competitiveness + 0.4 * (1.0 - utility)
}

/// Threshold rule: certain outside [0.4, 0.8], a coin flip with bias `x`
/// inside. The random source is only touched in the middle band.
pub fn decide<R: Rng + ?Sized>(x: f64, rng: &mut R) -> Decision {
    if x > ACCEPT_ABOVE {
        Decision::Accept
    } else if x < REJECT_BELOW {
        Decision::Reject
    } else if rng.gen::<f64>() < x {
        Decision::Accept
    } else {
        Decision::Reject
    }
}

/// One power's point of view: its board knowledge and its plan for the
/// phase. Madoff builds one for itself from its real plan and, as the order
/// calculator, one per opponent from that opponent's anticipated plan.
#[derive(Clone, Copy)]
pub struct Perspective<'a> {
    pub power: Power,
    pub map: &'a WorldMap,
    pub state: &'a GameState,
    pub utilities: &'a UtilityTable,
    pub hostility: &'a HostilityMatrix,
    pub plan: &'a Plan,
}

impl Perspective<'_> {
    fn hostility_to(&self, other: Power) -> f64 {
        self.hostility.normalized(self.power, other)
    }

    fn planned(&self, unit: &Unit) -> Result<&Order, AcceptanceError> {
        self.plan
            .order_for(unit)
            .ok_or(AcceptanceError::NotInPlan(*unit))
    }

    /// (hostility, strength) of whoever sits in `province`, if anyone.
    fn occupant(&self, province: ProvinceId) -> Option<(f64, f64)> {
        self.state
            .unit_at(province)
            .map(|u| (self.hostility_to(u.power), strength(self.state, u.power)))
    }

    pub fn neediness(&self, unit: &Unit) -> Result<f64, AcceptanceError> {
        let planned = self.planned(unit)?;
        Ok(match planned.command {
            Command::Move(to) => self.utilities.get(to),
            Command::Hold => 0.5,
            Command::SupportHold(s) | Command::SupportMove(s, _) => {
                if s.power == self.power {
                    1.0
                } else {
                    self.hostility_to(s.power)
                }
            }
        })
    }

    pub fn accept_hold(&self, unit: &Unit) -> Result<f64, AcceptanceError> {
        Ok(match self.planned(unit)?.command {
            Command::Hold => 1.0,
            Command::Move(to) if self.utilities.get(to) > HOLD_REFUSAL_UTILITY => 0.0,
            Command::Move(_) => 0.4,
            Command::SupportHold(..) | Command::SupportMove(..) => 0.1,
        })
    }

    pub fn accept_move_to(&self, unit: &Unit, destination: ProvinceId) -> Result<f64, AcceptanceError> {
        if !self.map.is_adjacent(unit.location, destination, unit.kind) {
            return Err(AcceptanceError::IllegalDestination(*unit, destination));
        }
        let gain = self.utilities.get(destination);
        let better = match self.planned(unit)?.command {
            Command::Hold => gain > self.utilities.get(unit.location),
            Command::Move(d) => gain > self.utilities.get(d),
            _ => false,
        };
        let nib = if better { 0.8 } else { 0.2 };
        Ok(match self.occupant(destination) {
            Some((h, _)) => move_to_probability(nib, h, true),
            None => move_to_probability(nib, 0.0, false),
        })
    }

    pub fn accept_support(&self, unit: &Unit, supported: &Unit, target: Option<ProvinceId>) -> Result<f64, AcceptanceError> {
        let need = self.neediness(unit)?;
        let h = self.hostility_to(supported.power);
        let s = strength(self.state, supported.power);
        Ok(match target {
            None => accept_support_hold(h, s, need),
            Some(t) => match self.occupant(t) {
                Some((h_t, s_t)) => accept_support_move(h, s, need, s_t, h_t, true),
                None => accept_support_move(h, s, need, 0.0, 0.0, false),
            },
        })
    }

    /// Acceptance of a commitment on one of this power's units, routed by
    /// order kind.
    pub fn accept_order(&self, order: &Order) -> Result<f64, AcceptanceError> {
        if order.unit.power != self.power {
            return Err(AcceptanceError::ForeignUnit(order.unit, self.power));
        }
        match order.command {
            Command::Hold => self.accept_hold(&order.unit),
            Command::Move(to) => self.accept_move_to(&order.unit, to),
            Command::SupportHold(s) => self.accept_support(&order.unit, &s, None),
            Command::SupportMove(s, t) => self.accept_support(&order.unit, &s, Some(t)),
        }
    }

    /// 1 if the zone does not bind this power or touches nothing it holds or
    /// plans to enter; otherwise the least favourable conflicted province.
    pub fn accept_dmz(&self, dmz: &Dmz) -> f64 {
        if !dmz.powers.contains(&self.power) {
            return 1.0;
        }
        let mine: Vec<ProvinceId> = self
            .state
            .units_of(self.power)
            .map(|u| u.location)
            .chain(self.plan.destinations())
            .filter(|p| dmz.provinces.contains(p))
            .collect();
        if mine.is_empty() {
            return 1.0;
        }
        let comp = competitiveness(dmz.powers.len().clamp(1, MAX_POWERS)).expect("clamped");
        mine.iter()
            .map(|p| dmz_province_probability(comp, self.utilities.get(*p)))
            .fold(1.0, f64::min)
    }
}

/// Mean acceptance over every component of `deal`, or `None` when some
/// component is not about `phase`. Commitments on other powers' units are
/// scored from that power's perspective with its anticipated plan; an
/// unscorable component counts as 0.
pub fn deal_acceptance(
    me: &Perspective<'_>,
    anticipated: &BTreeMap<Power, Plan>,
    deal: &BasicDeal,
    phase: PhaseKey,
) -> Option<f64> {
    if !deal.only_concerns(phase) {
        return None;
    }
    let mut scores = Vec::with_capacity(deal.commitments.len() + deal.dmzs.len());
    for c in &deal.commitments {
        let owner = c.order.unit.power;
        let p = if owner == me.power {
            me.accept_order(&c.order).unwrap_or(0.0)
        } else {
            match anticipated.get(&owner) {
                Some(plan) => Perspective { power: owner, plan, ..*me }
                    .accept_order(&c.order)
                    .unwrap_or(0.0),
                None => 0.0,
            }
        };
        scores.push(p);
    }
    scores.extend(deal.dmzs.iter().map(|z| me.accept_dmz(z)));
    if scores.is_empty() {
        return Some(0.0);
    }
    Some(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Accept or reject a proposed deal. Anything outside the current phase is
/// rejected outright.
pub fn evaluate_deal<R: Rng + ?Sized>(
    me: &Perspective<'_>,
    anticipated: &BTreeMap<Power, Plan>,
    deal: &BasicDeal,
    rng: &mut R,
) -> Decision {
    match deal_acceptance(me, anticipated, deal, me.state.phase_key()) {
        None => Decision::Reject,
        Some(x) => decide(x, rng),
    }
}
