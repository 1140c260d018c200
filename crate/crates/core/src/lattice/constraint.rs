use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Interval, Spin};
use crate::{Error, Result};

/// How frozen spins continue beyond the explicitly stored region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailRule {
    /// Nothing beyond the stored region (free boundary).
    None,
    /// Every site beyond is `+1`.
    AllPlus,
    /// Every site beyond is `-1`.
    AllMinus,
    /// Even site `2i` beyond carries `(-1)^i`; odd sites beyond are absent.
    AlternatingEven,
}

impl TailRule {
    pub fn spin_at(self, site: i64) -> Option<Spin> {
        match self {
            TailRule::None => None,
            TailRule::AllPlus => Some(Spin::Up),
            TailRule::AllMinus => Some(Spin::Down),
            TailRule::AlternatingEven => {
                if site.rem_euclid(2) == 0 {
                    Some(Spin::alternating(site.div_euclid(2)))
                } else {
                    None
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TailRule::None => "none",
            TailRule::AllPlus => "all-plus",
            TailRule::AllMinus => "all-minus",
            TailRule::AlternatingEven => "alternating-even",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "none" => Some(TailRule::None),
            "all-plus" => Some(TailRule::AllPlus),
            "all-minus" => Some(TailRule::AllMinus),
            "alternating-even" => Some(TailRule::AlternatingEven),
            _ => None,
        }
    }
}

/// A partial configuration: frozen spins, the free sites that are simulated,
/// and a tail rule for everything outside the stored region.
///
/// The stored region is the hull of the frozen and free sites. Inside it, a
/// site that is neither frozen nor free carries no spin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenConstraint {
    frozen: BTreeMap<i64, Spin>,
    free: Vec<i64>,
    stored: Interval,
    tail: TailRule,
}

impl FrozenConstraint {
    pub fn new(frozen: BTreeMap<i64, Spin>, mut free: Vec<i64>, tail: TailRule) -> Result<Self> {
        if free.is_empty() {
            return Err(Error::EmptyWindow);
        }
        free.sort_unstable();
        for w in free.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateSite(w[0]));
            }
        }
        for &site in &free {
            if frozen.contains_key(&site) {
                return Err(Error::SiteFrozenAndFree(site));
            }
        }
        let mut stored = Interval::new(free[0], free[free.len() - 1])?;
        if let (Some((&lo, _)), Some((&hi, _))) = (frozen.first_key_value(), frozen.last_key_value()) {
            stored = stored.hull(lo).hull(hi);
        }
        Ok(Self { frozen, free, stored, tail })
    }

    /// Free interval `volume`, nothing frozen inside the hull, `tail` outside.
    pub fn interval(volume: Interval, tail: TailRule) -> Self {
        Self::new(BTreeMap::new(), volume.sites().collect(), tail)
            .expect("an interval is nonempty and has no frozen sites")
    }

    /// Every odd site of `[lo, hi]` free, every even site of the hull frozen to
    /// `(-1)^{j/2}`, alternating continuation beyond.
    pub fn pure_alternating(window: Interval) -> Result<Self> {
        let free: Vec<i64> = window.sites().filter(|s| s.rem_euclid(2) != 0).collect();
        let frozen =
            window.sites().filter(|s| s.rem_euclid(2) == 0).map(|s| (s, Spin::alternating(s.div_euclid(2)))).collect();
        Self::new(frozen, free, TailRule::AlternatingEven)
    }

    pub fn frozen(&self) -> &BTreeMap<i64, Spin> {
        &self.frozen
    }

    /// Free sites in increasing order.
    pub fn free_sites(&self) -> &[i64] {
        &self.free
    }

    pub fn stored(&self) -> Interval {
        self.stored
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    pub fn is_free(&self, site: i64) -> bool {
        self.free.binary_search(&site).is_ok()
    }

    /// The frozen spin at `site`, or `None` for free and empty sites.
    pub fn spin_at(&self, site: i64) -> Option<Spin> {
        if self.stored.contains(site) {
            self.frozen.get(&site).copied()
        } else {
            self.tail.spin_at(site)
        }
    }

    /// Largest distance between a free site and an explicitly frozen one.
    pub fn explicit_extent(&self) -> u64 {
        let (Some((&lo, _)), Some((&hi, _))) = (self.frozen.first_key_value(), self.frozen.last_key_value()) else {
            return 0;
        };
        let first = self.free[0];
        let last = self.free[self.free.len() - 1];
        (hi - first).unsigned_abs().max((last - lo).unsigned_abs())
    }

    pub fn with_tail(&self, tail: TailRule) -> Self {
        Self { tail, ..self.clone() }
    }

    /// Freeze additional sites, removing them from the free set.
    pub fn freeze(&self, extra: impl IntoIterator<Item = (i64, Spin)>) -> Result<Self> {
        let mut frozen = self.frozen.clone();
        let mut removed = Vec::new();
        for (site, spin) in extra {
            frozen.insert(site, spin);
            removed.push(site);
        }
        let free = self.free.iter().copied().filter(|s| !removed.contains(s)).collect();
        Self::new(frozen, free, self.tail)
    }

    /// Global spin flip. `None` for the alternating tail, whose negation is not a tail rule.
    pub fn flipped(&self) -> Option<Self> {
        let tail = match self.tail {
            TailRule::None => TailRule::None,
            TailRule::AllPlus => TailRule::AllMinus,
            TailRule::AllMinus => TailRule::AllPlus,
            TailRule::AlternatingEven => return None,
        };
        let frozen = self.frozen.iter().map(|(&k, &v)| (k, -v)).collect();
        Some(Self { frozen, free: self.free.clone(), stored: self.stored, tail })
    }

    /// Translate every site by `by`. The alternating tail is only invariant
    /// under shifts by multiples of 4, so other shifts return `None` for it.
    pub fn shifted(&self, by: i64) -> Option<Self> {
        if self.tail == TailRule::AlternatingEven && by.rem_euclid(4) != 0 {
            return None;
        }
        let frozen = self.frozen.iter().map(|(&k, &v)| (k + by, v)).collect();
        let free = self.free.iter().map(|&s| s + by).collect();
        let stored = Interval::new(self.stored.lo() + by, self.stored.hi() + by).ok()?;
        Some(Self { frozen, free, stored, tail: self.tail })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_overlap_and_duplicates() {
        let mut frozen = BTreeMap::new();
        frozen.insert(1, Spin::Up);
        assert_eq!(FrozenConstraint::new(frozen, vec![0, 1], TailRule::None), Err(Error::SiteFrozenAndFree(1)));
        assert_eq!(FrozenConstraint::new(BTreeMap::new(), vec![0, 0], TailRule::None), Err(Error::DuplicateSite(0)));
    }

    #[test]
    fn tail_applies_only_outside_stored_region() {
        let mut frozen = BTreeMap::new();
        frozen.insert(-3, Spin::Down);
        let c = FrozenConstraint::new(frozen, vec![0, 2], TailRule::AllPlus).unwrap();
        assert_eq!(c.stored(), Interval::new(-3, 2).unwrap());
        assert_eq!(c.spin_at(-3), Some(Spin::Down));
        assert_eq!(c.spin_at(-1), None); // inside, neither frozen nor free
        assert_eq!(c.spin_at(0), None); // free
        assert_eq!(c.spin_at(3), Some(Spin::Up));
        assert_eq!(c.spin_at(-4), Some(Spin::Up));
        assert_eq!(c.explicit_extent(), 5);
    }

    #[test]
    fn alternating_tail() {
        let t = TailRule::AlternatingEven;
        assert_eq!(t.spin_at(0), Some(Spin::Up));
        assert_eq!(t.spin_at(2), Some(Spin::Down));
        assert_eq!(t.spin_at(-2), Some(Spin::Down));
        assert_eq!(t.spin_at(4), Some(Spin::Up));
        assert_eq!(t.spin_at(3), None);
    }

    #[test]
    fn pure_alternating_layout() {
        let c = FrozenConstraint::pure_alternating(Interval::new(-3, 3).unwrap()).unwrap();
        assert_eq!(c.free_sites(), &[-3, -1, 1, 3]);
        assert_eq!(c.frozen().len(), 3);
        assert_eq!(c.spin_at(0), Some(Spin::Up));
        assert_eq!(c.spin_at(2), Some(Spin::Down));
        assert_eq!(c.spin_at(6), Some(Spin::Down));
    }

    #[test]
    fn tail_names_round_trip() {
        for t in [TailRule::None, TailRule::AllPlus, TailRule::AllMinus, TailRule::AlternatingEven] {
            assert_eq!(TailRule::from_name(t.name()), Some(t));
        }
    }
}
