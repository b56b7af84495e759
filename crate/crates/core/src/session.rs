//! One negotiation session: a fixed number of rounds in a movement phase.
//!
//! Each round every living agent, in alphabetical power order, receives the
//! messages queued for it in the previous round and returns its outbound
//! messages. A deal binds as soon as every participant other than the
//! proposer has accepted it and it is still consistent with the ledger.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::adjudicate::is_legal;
use crate::agents::Agent;
use crate::board::GameState;
use crate::deal::{is_consistent, BasicDeal, DealId, Ledger};
use crate::map::WorldMap;
use crate::token::Power;

pub const DEFAULT_ROUNDS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessageKind {
    Propose(BasicDeal),
    Accept(DealId),
    Reject(DealId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: Power,
    pub recipients: BTreeSet<Power>,
    pub kind: MessageKind,
}

impl Message {
    /// Proposal addressed to every other participant.
    pub fn propose(deal: BasicDeal) -> Self {
        let mut recipients = deal.participants();
        recipients.remove(&deal.proposer);
        Message {
            sender: deal.proposer,
            recipients,
            kind: MessageKind::Propose(deal),
        }
    }

    /// Accept addressed to the proposer.
    pub fn accept(sender: Power, id: DealId) -> Self {
        Message {
            sender,
            recipients: [id.proposer].into_iter().collect(),
            kind: MessageKind::Accept(id),
        }
    }

    /// Reject addressed to the proposer.
    pub fn reject(sender: Power, id: DealId) -> Self {
        Message {
            sender,
            recipients: [id.proposer].into_iter().collect(),
            kind: MessageKind::Reject(id),
        }
    }

    pub fn deal_id(&self) -> DealId {
        match &self.kind {
            MessageKind::Propose(d) => d.id,
            MessageKind::Accept(id) | MessageKind::Reject(id) => *id,
        }
    }
}

/// 1-based round index within a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundInfo {
    pub index: u32,
    pub total: u32,
}

impl RoundInfo {
    pub fn is_final(self) -> bool {
        self.index == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct AgentError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("negotiation happens only in movement phases")]
    NotMovementPhase,
    #[error("a session needs at least one round")]
    ZeroRounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionEvent {
    Proposed(BasicDeal),
    Accepted(DealId, Power),
    Rejected(DealId, Power),
    Binding(DealId),
    Dead(DealId),
    Expired(DealId),
    /// A message the protocol refused to act on.
    Dropped { sender: Power, id: DealId, reason: &'static str },
    Fault { power: Power, round: u32, error: AgentError },
}

impl fmt::Display for SessionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionEvent::Proposed(d) => write!(f, "{}", d.proposal_line()),
            SessionEvent::Accepted(id, p) => write!(f, "DEAL {id} ACCEPT {p}"),
            SessionEvent::Rejected(id, p) => write!(f, "DEAL {id} REJECT {p}"),
            SessionEvent::Binding(id) => write!(f, "DEAL {id} BINDING"),
            SessionEvent::Dead(id) => write!(f, "DEAL {id} DEAD"),
            SessionEvent::Expired(id) => write!(f, "DEAL {id} EXPIRED"),
            SessionEvent::Dropped { sender, id, reason } => {
                write!(f, "DROP {sender} {id} {reason}")
            }
            SessionEvent::Fault { power, round, error } => {
                write!(f, "FAULT {power} round {round}: {error}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionOutcome {
    /// Deals that became binding, in binding order.
    pub binding: Vec<BasicDeal>,
    pub events: Vec<SessionEvent>,
}

struct Pending {
    deal: BasicDeal,
    participants: BTreeSet<Power>,
    waiting: BTreeSet<Power>,
}

struct Session<'a> {
    map: &'a WorldMap,
    state: &'a GameState,
    ledger: &'a mut Ledger,
    pending: BTreeMap<DealId, Pending>,
    seen: BTreeSet<DealId>,
    next_inbox: BTreeMap<Power, Vec<Message>>,
    out: SessionOutcome,
}

impl Session<'_> {
    fn deliver(&mut self, msg: Message) {
        for r in &msg.recipients {
            self.next_inbox.entry(*r).or_default().push(msg.clone());
        }
    }

    fn drop_msg(&mut self, sender: Power, id: DealId, reason: &'static str) {
        self.out.events.push(SessionEvent::Dropped { sender, id, reason });
    }

    fn check_proposal(&self, sender: Power, deal: &BasicDeal, recipients: &BTreeSet<Power>) -> Result<(), &'static str> {
        if deal.proposer != sender {
            return Err("proposer-mismatch");
        }
        if deal.validate().is_err() {
            return Err("invalid-deal");
        }
        if self.seen.contains(&deal.id) || self.ledger.contains(deal.id) {
            return Err("duplicate-id");
        }
        let participants = deal.participants();
        if !recipients.is_subset(&participants) || recipients.contains(&sender) {
            return Err("bad-recipients");
        }
        let now = self.state.phase_key();
        let known = self.map.powers();
        if participants.iter().any(|p| !known.contains(p)) {
            return Err("unknown-power");
        }
        if deal
            .dmzs
            .iter()
            .any(|z| z.provinces.iter().any(|p| !self.map.contains(*p)))
        {
            return Err("unknown-province");
        }
        if deal
            .commitments
            .iter()
            .any(|c| c.phase == now && !is_legal(self.map, self.state, &c.order))
        {
            return Err("illegal-order");
        }
        Ok(())
    }

    /// Binds `id` if nobody is left to accept it, or kills it when the
    /// ledger no longer admits it.
    fn try_bind(&mut self, id: DealId) {
        let ready = self.pending.get(&id).is_some_and(|p| p.waiting.is_empty());
        if !ready {
            return;
        }
        let p = self.pending.remove(&id).expect("checked above");
        if is_consistent(self.ledger, &p.deal) {
            self.ledger.bind(p.deal.clone()).expect("checked above");
            self.out.events.push(SessionEvent::Binding(id));
            self.out.binding.push(p.deal);
        } else {
            self.out.events.push(SessionEvent::Dead(id));
            self.deliver(Message {
                sender: id.proposer,
                recipients: p.participants,
                kind: MessageKind::Reject(id),
            });
        }
    }

    fn handle(&mut self, msg: Message) {
        let sender = msg.sender;
        match &msg.kind {
            MessageKind::Propose(deal) => {
                if let Err(reason) = self.check_proposal(sender, deal, &msg.recipients) {
                    self.drop_msg(sender, deal.id, reason);
                    return;
                }
                let participants = deal.participants();
                let mut waiting = participants.clone();
                waiting.remove(&sender);
                let id = deal.id;
                self.seen.insert(id);
                self.out.events.push(SessionEvent::Proposed(deal.clone()));
                self.pending.insert(
                    id,
                    Pending {
                        deal: deal.clone(),
                        participants: participants.clone(),
                        waiting: waiting.clone(),
                    },
                );
                // Everyone still has to hear about it, even if it binds now.
                self.deliver(Message { recipients: waiting, ..msg });
                self.try_bind(id);
            }
            MessageKind::Accept(id) => {
                let id = *id;
                let Some(p) = self.pending.get_mut(&id) else {
                    self.drop_msg(sender, id, "not-pending");
                    return;
                };
                if !p.waiting.remove(&sender) {
                    self.drop_msg(sender, id, "not-awaited");
                    return;
                }
                let participants = p.participants.clone();
                self.out.events.push(SessionEvent::Accepted(id, sender));
                let recipients = msg.recipients.intersection(&participants).copied().collect();
                self.deliver(Message { recipients, ..msg });
                self.try_bind(id);
            }
            MessageKind::Reject(id) => {
                let id = *id;
                let allowed = self
                    .pending
                    .get(&id)
                    .is_some_and(|p| p.participants.contains(&sender) && sender != id.proposer);
                if !allowed {
                    self.drop_msg(sender, id, "not-pending");
                    return;
                }
                let p = self.pending.remove(&id).expect("checked above");
                self.out.events.push(SessionEvent::Rejected(id, sender));
                self.out.events.push(SessionEvent::Dead(id));
                let mut recipients = p.participants;
                recipients.remove(&sender);
                self.deliver(Message {
                    sender,
                    recipients,
                    kind: MessageKind::Reject(id),
                });
            }
        }
    }
}

/// Runs `rounds` rounds among the living agents and returns the deals that
/// became binding. Agents not in `state.alive` are skipped. An agent error
/// costs that agent its turn and is logged; it never aborts the session.
pub fn run_session(
    map: &WorldMap,
    state: &GameState,
    ledger: &mut Ledger,
    agents: &mut BTreeMap<Power, Box<dyn Agent>>,
    rounds: u32,
) -> Result<SessionOutcome, SessionError> {
    if !state.phase.is_movement() {
        return Err(SessionError::NotMovementPhase);
    }
    if rounds == 0 {
        return Err(SessionError::ZeroRounds);
    }
    let mut session = Session {
        map,
        state,
        ledger,
        pending: BTreeMap::new(),
        seen: BTreeSet::new(),
        next_inbox: BTreeMap::new(),
        out: SessionOutcome::default(),
    };
    for index in 1..=rounds {
        let info = RoundInfo { index, total: rounds };
        let mut inbox = core::mem::take(&mut session.next_inbox);
        for (power, agent) in agents.iter_mut() {
            if !state.alive.contains(power) {
                continue;
            }
            let inbound = inbox.remove(power).unwrap_or_default();
            match agent.on_round(&inbound, info, session.ledger) {
                Ok(outbound) => {
                    for msg in outbound {
                        if msg.sender != *power {
                            let id = msg.deal_id();
                            session.drop_msg(*power, id, "forged-sender");
                            continue;
                        }
                        session.handle(msg);
                    }
                }
                Err(error) => session.out.events.push(SessionEvent::Fault {
                    power: *power,
                    round: index,
                    error,
                }),
            }
        }
    }
    let leftovers: Vec<DealId> = session.pending.keys().copied().collect();
    for id in leftovers {
        session.out.events.push(SessionEvent::Expired(id));
    }
    Ok(session.out)
}
