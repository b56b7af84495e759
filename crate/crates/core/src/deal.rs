//! Binding deals: order commitments, demilitarized zones, the ledger of
//! binding deals and the consistency gate in front of it.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::board::PhaseKey;
use crate::order::{Command, Order};
use crate::token::{Power, ProvinceId};

/// A promise that `order` will be submitted in the given movement phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderCommitment {
    pub phase: PhaseKey,
    pub order: Order,
}

impl OrderCommitment {
    pub fn new(phase: PhaseKey, order: Order) -> Self {
        OrderCommitment { phase, order }
    }
}

/// A promise by `powers` not to enter `provinces` in the given phase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dmz {
    pub phase: PhaseKey,
    pub powers: BTreeSet<Power>,
    pub provinces: BTreeSet<ProvinceId>,
}

impl Dmz {
    pub fn new(
        phase: PhaseKey,
        powers: impl IntoIterator<Item = Power>,
        provinces: impl IntoIterator<Item = ProvinceId>,
    ) -> Self {
        Dmz {
            phase,
            powers: powers.into_iter().collect(),
            provinces: provinces.into_iter().collect(),
        }
    }

    /// Whether submitting `order` breaks this DMZ: a bound power's unit
    /// moving into a demilitarized province.
    pub fn forbids(&self, phase: PhaseKey, order: &Order) -> bool {
        phase == self.phase
            && self.powers.contains(&order.unit.power)
            && matches!(order.command, Command::Move(to) if self.provinces.contains(&to))
    }

    /// Whether a deal may not commit a unit to `order`: besides moving in,
    /// a bound unit cannot be committed to stay inside the zone.
    pub fn excludes_commitment(&self, phase: PhaseKey, order: &Order) -> bool {
        if phase != self.phase || !self.powers.contains(&order.unit.power) {
            return false;
        }
        match order.command {
            Command::Move(to) => self.provinces.contains(&to),
            _ => self.provinces.contains(&order.unit.location),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DealId {
    pub proposer: Power,
    pub phase: PhaseKey,
    pub seq: u32,
}

impl fmt::Display for DealId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}{}-{}",
            self.proposer,
            self.phase.year,
            self.phase.season.code(),
            self.seq
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicDeal {
    pub id: DealId,
    pub proposer: Power,
    pub commitments: Vec<OrderCommitment>,
    pub dmzs: Vec<Dmz>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DealError {
    #[error("deal has no commitments and no DMZs")]
    Empty,
    #[error("commitment or DMZ for non-movement phase {0}")]
    NotMovementPhase(PhaseKey),
    #[error("DMZ with an empty power or province set")]
    EmptyDmz,
    #[error("deal id names {0} but the proposer is {1}")]
    ForeignId(Power, Power),
}

impl BasicDeal {
    pub fn new(id: DealId, commitments: Vec<OrderCommitment>, dmzs: Vec<Dmz>) -> Self {
        BasicDeal {
            id,
            proposer: id.proposer,
            commitments,
            dmzs,
        }
    }

    /// Owners of committed units, DMZ powers, and the proposer.
    pub fn participants(&self) -> BTreeSet<Power> {
        let mut out: BTreeSet<Power> = self.commitments.iter().map(|c| c.order.unit.power).collect();
        for d in &self.dmzs {
            out.extend(d.powers.iter().copied());
        }
        out.insert(self.proposer);
        out
    }

    pub fn validate(&self) -> Result<(), DealError> {
        if self.commitments.is_empty() && self.dmzs.is_empty() {
            return Err(DealError::Empty);
        }
        if self.id.proposer != self.proposer {
            return Err(DealError::ForeignId(self.id.proposer, self.proposer));
        }
        for phase in self.phases() {
            if !phase.season.is_movement() {
                return Err(DealError::NotMovementPhase(phase));
            }
        }
        if self.dmzs.iter().any(|d| d.powers.is_empty() || d.provinces.is_empty()) {
            return Err(DealError::EmptyDmz);
        }
        Ok(())
    }

    /// Phases of every component.
    pub fn phases(&self) -> impl Iterator<Item = PhaseKey> + '_ {
        self.commitments
            .iter()
            .map(|c| c.phase)
            .chain(self.dmzs.iter().map(|d| d.phase))
    }

    /// True iff every component is about `phase`.
    pub fn only_concerns(&self, phase: PhaseKey) -> bool {
        self.phases().all(|p| p == phase)
    }

    fn conflicts_with(&self, other: &BasicDeal) -> bool {
        let commitments_clash = self.commitments.iter().any(|a| {
            other.commitments.iter().any(|b| {
                a.phase == b.phase && a.order.unit.location == b.order.unit.location && a.order != b.order
            })
        });
        let dmz_clash = |x: &BasicDeal, y: &BasicDeal| {
            x.commitments
                .iter()
                .any(|c| y.dmzs.iter().any(|d| d.excludes_commitment(c.phase, &c.order)))
        };
        commitments_clash || dmz_clash(self, other) || dmz_clash(other, self)
    }

    /// Renders the `DEAL <id> PROPOSE ...` log line.
    pub fn proposal_line(&self) -> DealLine<'_> {
        DealLine(self)
    }
}

pub struct DealLine<'a>(&'a BasicDeal);

impl fmt::Display for DealLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        write!(f, "DEAL {} PROPOSE {}", d.id, d.proposer)?;
        for c in &d.commitments {
            write!(f, " OC[{} {} {}]", c.phase.year, c.phase.season.code(), c.order)?;
        }
        for z in &d.dmzs {
            write!(f, " DMZ[{} {} powers={{", z.phase.year, z.phase.season.code())?;
            write_list(f, z.powers.iter())?;
            f.write_str("} provinces={")?;
            write_list(f, z.provinces.iter())?;
            f.write_str("}]")?;
        }
        Ok(())
    }
}

fn write_list<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    for (i, x) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Binding deals of one game.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    deals: Vec<BasicDeal>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("deal {0} is inconsistent with the ledger")]
pub struct InconsistentDeal(pub DealId);

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deals(&self) -> &[BasicDeal] {
        &self.deals
    }

    pub fn is_empty(&self) -> bool {
        self.deals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.deals.len()
    }

    pub fn contains(&self, id: DealId) -> bool {
        self.deals.iter().any(|d| d.id == id)
    }

    /// Binding deals with a component in `phase`.
    pub fn for_phase(&self, phase: PhaseKey) -> impl Iterator<Item = &BasicDeal> + '_ {
        self.deals.iter().filter(move |d| d.phases().any(|p| p == phase))
    }

    /// Binding deals `power` participates in.
    pub fn for_power(&self, power: Power) -> impl Iterator<Item = &BasicDeal> + '_ {
        self.deals.iter().filter(move |d| d.participants().contains(&power))
    }

    /// Adds a deal after re-checking consistency.
    pub fn bind(&mut self, deal: BasicDeal) -> Result<(), InconsistentDeal> {
        if !is_consistent(self, &deal) {
            return Err(InconsistentDeal(deal.id));
        }
        self.deals.push(deal);
        Ok(())
    }
}

/// False iff `deal`, together with the binding deals, gives one unit two
/// different orders in a phase, commits a unit into (or to stay inside) a
/// province demilitarized for its power, or contradicts itself that way.
pub fn is_consistent(ledger: &Ledger, deal: &BasicDeal) -> bool {
    !deal.conflicts_with(deal) && ledger.deals.iter().all(|d| !deal.conflicts_with(d))
}

/// What the binding deals demand of one power in one phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constraints {
    pub fixed: Vec<Order>,
    pub forbidden: BTreeSet<ProvinceId>,
}

impl Constraints {
    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty() && self.forbidden.is_empty()
    }
}

pub fn binding_constraints(ledger: &Ledger, power: Power, phase: PhaseKey) -> Constraints {
    let mut out = Constraints::default();
    for d in ledger.for_phase(phase) {
        for c in &d.commitments {
            if c.phase == phase && c.order.unit.power == power && !out.fixed.contains(&c.order) {
                out.fixed.push(c.order);
            }
        }
        for z in &d.dmzs {
            if z.phase == phase && z.powers.contains(&power) {
                out.forbidden.extend(z.provinces.iter().copied());
            }
        }
    }
    out.fixed.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{Season, Unit};
    use crate::token::{power, prov};
    use alloc::string::ToString;
    use alloc::vec;

    fn spring() -> PhaseKey {
        PhaseKey::new(1901, Season::Spring)
    }

    fn id(p: &str, seq: u32) -> DealId {
        DealId { proposer: power(p), phase: spring(), seq }
    }

    fn bel() -> Unit {
        Unit::army(power("FRA"), prov("BEL"))
    }

    #[test]
    fn participants_follow_the_definition() {
        let aus = Unit::army(power("AUS"), prov("VIE"));
        let d = BasicDeal::new(
            id("RUS", 0),
            vec![OrderCommitment::new(spring(), Order::hold(aus))],
            vec![],
        );
        assert_eq!(d.participants(), [power("AUS"), power("RUS")].into_iter().collect());

        let dmz = Dmz::new(spring(), [power("FRA"), power("GER"), power("ITA")], [prov("BUR")]);
        let d = BasicDeal::new(id("FRA", 0), vec![], vec![dmz]);
        assert_eq!(d.participants().len(), 3);

        let dmz = Dmz::new(spring(), [power("AUS"), power("TUR")], [prov("BUL")]);
        let d = BasicDeal::new(
            id("AUS", 1),
            vec![OrderCommitment::new(spring(), Order::hold(aus))],
            vec![dmz],
        );
        assert_eq!(d.participants(), [power("AUS"), power("TUR")].into_iter().collect());
    }

    #[test]
    fn second_order_for_a_bound_unit_is_inconsistent() {
        let mut ledger = Ledger::new();
        let to_hol = BasicDeal::new(
            id("FRA", 0),
            vec![OrderCommitment::new(spring(), Order::move_to(bel(), prov("HOL")))],
            vec![],
        );
        assert!(is_consistent(&ledger, &to_hol));
        ledger.bind(to_hol.clone()).unwrap();
        let to_pic = BasicDeal::new(
            id("FRA", 1),
            vec![OrderCommitment::new(spring(), Order::move_to(bel(), prov("PIC")))],
            vec![],
        );
        assert!(!is_consistent(&ledger, &to_pic));
        assert!(ledger.bind(to_pic).is_err());
        // Repeating the same promise is fine.
        let again = BasicDeal { id: id("FRA", 2), ..to_hol };
        assert!(is_consistent(&ledger, &again));
    }

    #[test]
    fn self_contradicting_deal() {
        let d = BasicDeal::new(
            id("FRA", 0),
            vec![OrderCommitment::new(spring(), Order::move_to(bel(), prov("HOL")))],
            vec![Dmz::new(spring(), [power("FRA")], [prov("HOL")])],
        );
        assert!(!is_consistent(&Ledger::new(), &d));
        // Committing a unit to stay inside the zone clashes too.
        let d = BasicDeal::new(
            id("FRA", 1),
            vec![OrderCommitment::new(spring(), Order::hold(bel()))],
            vec![Dmz::new(spring(), [power("FRA")], [prov("BEL")])],
        );
        assert!(!is_consistent(&Ledger::new(), &d));
        // Different phase, different power: no clash.
        let fall = PhaseKey::new(1901, Season::Fall);
        let d = BasicDeal::new(
            id("FRA", 2),
            vec![OrderCommitment::new(spring(), Order::move_to(bel(), prov("HOL")))],
            vec![
                Dmz::new(fall, [power("FRA")], [prov("HOL")]),
                Dmz::new(spring(), [power("GER")], [prov("HOL")]),
            ],
        );
        assert!(is_consistent(&Ledger::new(), &d));
    }

    #[test]
    fn constraints_collect_orders_and_dmzs() {
        assert_eq!(binding_constraints(&Ledger::new(), power("FRA"), spring()), Constraints::default());
        let mut ledger = Ledger::new();
        let order = Order::move_to(bel(), prov("HOL"));
        ledger
            .bind(BasicDeal::new(id("FRA", 0), vec![OrderCommitment::new(spring(), order)], vec![]))
            .unwrap();
        ledger
            .bind(BasicDeal::new(
                id("GER", 0),
                vec![],
                vec![Dmz::new(spring(), [power("FRA"), power("GER")], [prov("BUR")])],
            ))
            .unwrap();
        let c = binding_constraints(&ledger, power("FRA"), spring());
        assert_eq!(c.fixed, vec![order]);
        assert!(c.forbidden.contains(&prov("BUR")));
        let later = binding_constraints(&ledger, power("FRA"), PhaseKey::new(1901, Season::Fall));
        assert!(later.is_empty());
    }

    #[test]
    fn proposal_line_format() {
        let d = BasicDeal::new(
            id("FRA", 3),
            vec![OrderCommitment::new(spring(), Order::move_to(bel(), prov("HOL")))],
            vec![Dmz::new(spring(), [power("GER"), power("FRA")], [prov("BUR"), prov("MUN")])],
        );
        assert_eq!(
            d.proposal_line().to_string(),
            "DEAL FRA-1901SPR-3 PROPOSE FRA OC[1901 SPR A BEL - HOL] \
             DMZ[1901 SPR powers={FRA,GER} provinces={BUR,MUN}]"
        );
    }

    #[test]
    fn validation() {
        let empty = BasicDeal::new(id("FRA", 0), vec![], vec![]);
        assert_eq!(empty.validate(), Err(DealError::Empty));
        let summer = PhaseKey::new(1901, Season::Summer);
        let d = BasicDeal::new(id("FRA", 0), vec![OrderCommitment::new(summer, Order::hold(bel()))], vec![]);
        assert_eq!(d.validate(), Err(DealError::NotMovementPhase(summer)));
    }
}
