//! Opponent model: pairwise hostility from public adjudication results, and
//! the normalized hostility and strength parameters built on it.
//!
//! Despite the name, a higher hostility value means a *friendlier* power:
//! supports raise it by 5, attacks lower it by 10.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::adjudicate::{OrderOutcome, Resolution};
use crate::board::GameState;
use crate::token::Power;

pub const SUPPORT_BONUS: i64 = 5;
pub const ATTACK_PENALTY: i64 = -10;

/// Supply-center count at which strength saturates.
pub const STRENGTH_CAP: usize = 18;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HostilityMatrix {
    powers: Vec<Power>,
    /// `(observer, subject) -> raw`; absent entries are 0.
    raw: BTreeMap<(Power, Power), i64>,
}

impl HostilityMatrix {
    pub fn new(powers: &[Power]) -> Self {
        let mut powers = powers.to_vec();
        powers.sort();
        powers.dedup();
        HostilityMatrix {
            powers,
            raw: BTreeMap::new(),
        }
    }

    pub fn powers(&self) -> &[Power] {
        &self.powers
    }

    pub fn raw(&self, observer: Power, subject: Power) -> i64 {
        self.raw.get(&(observer, subject)).copied().unwrap_or(0)
    }

    fn bump(&mut self, observer: Power, subject: Power, delta: i64) {
        if observer != subject {
            *self.raw.entry((observer, subject)).or_insert(0) += delta;
        }
    }

    /// Directly sets a raw entry; for tests and replay tooling.
    pub fn set_raw(&mut self, observer: Power, subject: Power, value: i64) {
        if observer != subject {
            self.raw.insert((observer, subject), value);
        }
    }

    /// Applies one movement phase. Every support order (cut or not) by
    /// `other` for a unit of `me` adds 5 to `(me, other)`; each of `me`'s
    /// units dislodged by `other`, and each of `me`'s centers captured by
    /// `other`, subtracts 10.
    pub fn update_from_resolution(&mut self, state_before: &GameState, resolution: &Resolution) {
        for (order, outcome) in &resolution.orders {
            if *outcome == OrderOutcome::Invalid {
                continue;
            }
            if let Some(beneficiary) = order.supported() {
                self.bump(beneficiary.power, order.unit.power, SUPPORT_BONUS);
            }
        }
        for d in &resolution.dislodged {
            self.bump(d.unit.power, d.attacker, ATTACK_PENALTY);
        }
        for (taker, sc) in &resolution.captures {
            if let Some(owner) = state_before.owner_of(*sc) {
                self.bump(owner, *taker, ATTACK_PENALTY);
            }
        }
    }

    /// Normalized friendliness of `subject` as seen by `observer`, in [0, 1].
    ///
    /// Negative raw values map linearly from the row minimum (0) to 0.5;
    /// non-negative ones from 0.5 up to the row maximum (1).
    pub fn normalized(&self, observer: Power, subject: Power) -> f64 {
        if observer == subject {
            return 1.0;
        }
        let row = self
            .powers
            .iter()
            .filter(|p| **p != observer)
            .map(|p| self.raw(observer, *p));
        let (min, max) = row.fold((0i64, 0i64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        normalize_hostility(self.raw(observer, subject), min, max)
    }
}

/// The piecewise normalization with its two zero-denominator guards.
pub fn normalize_hostility(h: i64, h_min: i64, h_max: i64) -> f64 {
    if h < 0 {
        if h_min == 0 {
            return 0.5;
        }
        0.5 * ((h - h_min) as f64 / -(h_min as f64))
    } else {
        if h_max == 0 {
            return 0.5;
        }
        0.5 * (h as f64 / h_max as f64) + 0.5
    }
}

/// Sine-shaped strength of a power holding `centers` supply centers.
pub fn strength_of_count(centers: usize) -> f64 {
    let n = centers.min(STRENGTH_CAP) as f64;
    0.5 * libm::sin(core::f64::consts::PI * (n - 9.0) / 18.0) + 0.5
}

pub fn strength(state: &GameState, power: Power) -> f64 {
    strength_of_count(state.sc_count(power))
}
