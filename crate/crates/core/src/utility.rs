//! Static province utilities.
//!
//! Every province starts from a base value (1, or 10 for a supply center).
//! Each province then receives 0.3 times the sum of its neighbors' *base*
//! values, in one simultaneous pass, and the result is divided by the
//! largest raw value on the map.

use alloc::collections::BTreeMap;

use crate::map::WorldMap;
use crate::token::ProvinceId;

pub const BASE_PLAIN: f64 = 1.0;
pub const BASE_SUPPLY_CENTER: f64 = 10.0;
pub const NEIGHBOR_DISCOUNT: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UtilityError {
    #[error("no utility for province {0}")]
    UnknownProvince(ProvinceId),
    #[error("raw utilities must be non-empty and strictly positive")]
    NonPositive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTable {
    values: BTreeMap<ProvinceId, f64>,
    raw_values: BTreeMap<ProvinceId, f64>,
}

/// Raw (unnormalized) utilities with the given base values.
pub fn raw_utilities_with(map: &WorldMap, plain: f64, center: f64) -> BTreeMap<ProvinceId, f64> {
    let base = |id: ProvinceId| {
        if map.is_supply_center(id) {
            center
        } else {
            plain
        }
    };
    map.provinces()
        .iter()
        .map(|p| {
            let spill: f64 = map.neighbors(p.id).map(base).sum();
            (p.id, base(p.id) + NEIGHBOR_DISCOUNT * spill)
        })
        .collect()
}

pub fn raw_utilities(map: &WorldMap) -> BTreeMap<ProvinceId, f64> {
    raw_utilities_with(map, BASE_PLAIN, BASE_SUPPLY_CENTER)
}

/// Computes the normalized utility table for a map.
pub fn compute_utilities(map: &WorldMap) -> UtilityTable {
    UtilityTable::from_raw(raw_utilities(map)).expect("base values are positive")
}

impl UtilityTable {
    /// Normalizes raw values by their maximum.
    pub fn from_raw(raw_values: BTreeMap<ProvinceId, f64>) -> Result<Self, UtilityError> {
        let max = raw_values.values().copied().fold(f64::NEG_INFINITY, f64::max);
        if raw_values.is_empty() || raw_values.values().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(UtilityError::NonPositive);
        }
        let values = raw_values.iter().map(|(k, v)| (*k, v / max)).collect();
        Ok(UtilityTable { values, raw_values })
    }

    pub fn utility(&self, province: ProvinceId) -> Result<f64, UtilityError> {
        self.values
            .get(&province)
            .copied()
            .ok_or(UtilityError::UnknownProvince(province))
    }

    /// Lookup for provinces known to be on the map; 0 otherwise.
    pub fn get(&self, province: ProvinceId) -> f64 {
        self.values.get(&province).copied().unwrap_or(0.0)
    }

    pub fn raw(&self, province: ProvinceId) -> Result<f64, UtilityError> {
        self.raw_values
            .get(&province)
            .copied()
            .ok_or(UtilityError::UnknownProvince(province))
    }

    /// `(province, raw, normalized)` sorted by province id.
    pub fn iter(&self) -> impl Iterator<Item = (ProvinceId, f64, f64)> + '_ {
        self.values
            .iter()
            .map(move |(k, v)| (*k, self.raw_values[k], *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::prov;

    #[test]
    fn isolated_center() {
        let map = WorldMap::parse("PROVINCE X inland SC\n").unwrap();
        let t = compute_utilities(&map);
        assert_eq!(t.raw(prov("X")).unwrap(), 10.0);
        assert_eq!(t.utility(prov("X")).unwrap(), 1.0);
    }

    #[test]
    fn two_plain_neighbors() {
        let map = WorldMap::parse("PROVINCE X inland\nPROVINCE Y inland\nADJ X Y army\n").unwrap();
        let t = compute_utilities(&map);
        assert!((t.raw(prov("X")).unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(t.utility(prov("X")).unwrap(), 1.0);
        assert_eq!(t.utility(prov("Y")).unwrap(), 1.0);
    }

    #[test]
    fn unknown_province() {
        let map = WorldMap::parse("PROVINCE X inland\n").unwrap();
        let t = compute_utilities(&map);
        assert_eq!(t.utility(prov("Q")), Err(UtilityError::UnknownProvince(prov("Q"))));
    }

    #[test]
    fn from_raw_rejects_non_positive() {
        let mut raw = BTreeMap::new();
        raw.insert(prov("X"), 0.0);
        assert_eq!(UtilityTable::from_raw(raw), Err(UtilityError::NonPositive));
        assert_eq!(UtilityTable::from_raw(BTreeMap::new()), Err(UtilityError::NonPositive));
    }
}
