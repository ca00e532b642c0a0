//! Index-level preference primitives: weak orders over `0..m` and complete
//! pairwise relations.
//!
//! Everything above this module speaks in interaction classes; the rules and
//! the audit engine work on alternative indices into a [`Universe`](crate::universe::Universe).

use std::cmp::Ordering;

/// How one preference ranks a pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairRel {
    /// `a` strictly above `b`.
    Above,
    Tied,
    /// `b` strictly above `a`.
    Below,
}

impl PairRel {
    pub fn reversed(self) -> PairRel {
        match self {
            PairRel::Above => PairRel::Below,
            PairRel::Tied => PairRel::Tied,
            PairRel::Below => PairRel::Above,
        }
    }

    /// Kendall disagreement between two views of the same pair, in half units.
    pub fn half_disagreement(self, other: PairRel) -> u64 {
        match (self, other) {
            (x, y) if x == y => 0,
            (PairRel::Tied, _) | (_, PairRel::Tied) => 1,
            _ => 2,
        }
    }
}

/// A total preorder over `0..m`: `level[a]` is the tier of alternative `a`,
/// tier 0 being most preferred. Levels are always dense.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakOrder {
    level: Vec<u16>,
}

impl WeakOrder {
    /// Builds an order from arbitrary per-alternative levels (lower is better).
    pub fn from_levels<T: Ord + Copy>(levels: &[T]) -> WeakOrder {
        let mut distinct: Vec<T> = levels.to_vec();
        distinct.sort();
        distinct.dedup();
        let level = levels
            .iter()
            .map(|l| distinct.binary_search(l).expect("level present") as u16)
            .collect();
        WeakOrder { level }
    }

    /// A strict order listing alternatives from most to least preferred.
    /// `order` must be a permutation of `0..order.len()`.
    pub fn strict(order: &[usize]) -> WeakOrder {
        let mut level = vec![0u16; order.len()];
        for (pos, &alt) in order.iter().enumerate() {
            level[alt] = pos as u16;
        }
        WeakOrder { level }
    }

    /// Builds an order from tiers of alternative indices. Returns `None`
    /// unless the tiers are non-empty and partition `0..m`.
    pub fn from_tiers(tiers: &[Vec<usize>], m: usize) -> Option<WeakOrder> {
        let mut level = vec![u16::MAX; m];
        for (t, tier) in tiers.iter().enumerate() {
            if tier.is_empty() {
                return None;
            }
            for &a in tier {
                if a >= m || level[a] != u16::MAX {
                    return None;
                }
                level[a] = t as u16;
            }
        }
        if level.contains(&u16::MAX) {
            return None;
        }
        Some(WeakOrder { level })
    }

    /// Orders alternatives by decreasing score; equal scores share a tier.
    pub fn by_descending_score<T: PartialOrd + Copy>(scores: &[T]) -> WeakOrder {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&x, &y| {
            scores[y]
                .partial_cmp(&scores[x])
                .unwrap_or(Ordering::Equal)
                .then(x.cmp(&y))
        });
        let mut level = vec![0u16; scores.len()];
        let mut tier = 0u16;
        for w in 0..idx.len() {
            if w > 0 && scores[idx[w]] != scores[idx[w - 1]] {
                tier += 1;
            }
            level[idx[w]] = tier;
        }
        WeakOrder { level }
    }

    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level.is_empty()
    }

    pub fn level(&self, a: usize) -> u16 {
        self.level[a]
    }

    pub fn levels(&self) -> &[u16] {
        &self.level
    }

    pub fn tier_count(&self) -> usize {
        self.level.iter().max().map_or(0, |&l| l as usize + 1)
    }

    pub fn is_strict(&self) -> bool {
        self.tier_count() == self.level.len()
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.level[a] < self.level[b]
    }

    pub fn weakly_prefers(&self, a: usize, b: usize) -> bool {
        self.level[a] <= self.level[b]
    }

    pub fn pair(&self, a: usize, b: usize) -> PairRel {
        match self.level[a].cmp(&self.level[b]) {
            Ordering::Less => PairRel::Above,
            Ordering::Equal => PairRel::Tied,
            Ordering::Greater => PairRel::Below,
        }
    }

    /// Tiers from most to least preferred, each sorted by index.
    pub fn tiers(&self) -> Vec<Vec<usize>> {
        let mut tiers = vec![Vec::new(); self.tier_count()];
        for (a, &l) in self.level.iter().enumerate() {
            tiers[l as usize].push(a);
        }
        tiers
    }

    /// For strict orders, alternatives from most to least preferred.
    pub fn sequence(&self) -> Option<Vec<usize>> {
        self.is_strict()
            .then(|| self.tiers().into_iter().map(|t| t[0]).collect())
    }

    /// Relabels alternatives: alternative `a` becomes `perm[a]`.
    pub fn relabeled(&self, perm: &[usize]) -> WeakOrder {
        let mut level = vec![0u16; self.level.len()];
        for (a, &l) in self.level.iter().enumerate() {
            level[perm[a]] = l;
        }
        WeakOrder { level }
    }

    pub fn relation(&self) -> Relation {
        let m = self.len();
        Relation::from_fn(m, |a, b| self.weakly_prefers(a, b))
    }
}

/// Kendall distance in half units: 2 per pair ordered oppositely, 1 per pair
/// tied in exactly one of the two orders.
pub fn kendall_half_units(x: &WeakOrder, y: &WeakOrder) -> u64 {
    assert_eq!(x.len(), y.len(), "orders over different universes");
    let m = x.len();
    let mut total = 0;
    for a in 0..m {
        for b in a + 1..m {
            total += x.pair(a, b).half_disagreement(y.pair(a, b));
        }
    }
    total
}

/// A binary relation `a ≽ b` over `0..m`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    m: usize,
    weak: Vec<bool>,
}

impl Relation {
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> bool) -> Relation {
        let mut weak = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                weak[a * m + b] = a == b || f(a, b);
            }
        }
        Relation { m, weak }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// `a ≽ b`.
    pub fn weakly(&self, a: usize, b: usize) -> bool {
        self.weak[a * self.m + b]
    }

    /// `a ≻ b`.
    pub fn strictly(&self, a: usize, b: usize) -> bool {
        self.weakly(a, b) && !self.weakly(b, a)
    }

    /// The pair view; an incomparable pair is reported as tied.
    pub fn pair(&self, a: usize, b: usize) -> PairRel {
        match (self.weakly(a, b), self.weakly(b, a)) {
            (true, false) => PairRel::Above,
            (false, true) => PairRel::Below,
            _ => PairRel::Tied,
        }
    }

    pub fn is_complete(&self) -> bool {
        (0..self.m).all(|a| (0..self.m).all(|b| self.weakly(a, b) || self.weakly(b, a)))
    }

    /// First triple `(a, b, c)` in index order with `a ≽ b`, `b ≽ c` and
    /// `c ≻ a`. For a complete relation this exists iff `≽` is not transitive,
    /// and under strict majorities it is the cycle `a ≻ b ≻ c ≻ a`.
    pub fn transitivity_violation(&self) -> Option<[usize; 3]> {
        let m = self.m;
        for a in 0..m {
            for b in 0..m {
                if b == a || !self.weakly(a, b) {
                    continue;
                }
                for c in 0..m {
                    if c == a || c == b || !self.weakly(b, c) {
                        continue;
                    }
                    if !self.weakly(a, c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    /// First triple with `a ≻ b`, `b ≻ c` but not `a ≻ c`.
    pub fn strict_transitivity_violation(&self) -> Option<[usize; 3]> {
        let m = self.m;
        for a in 0..m {
            for b in 0..m {
                if !self.strictly(a, b) {
                    continue;
                }
                for c in 0..m {
                    if self.strictly(b, c) && !self.strictly(a, c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    /// The weak order represented by a complete transitive relation.
    pub fn to_weak_order(&self) -> Option<WeakOrder> {
        if !self.is_complete() || self.transitivity_violation().is_some() {
            return None;
        }
        // in a total preorder, a ≽ b iff a weakly beats at least as many alternatives
        let beats: Vec<usize> = (0..self.m)
            .map(|a| (0..self.m).filter(|&b| self.weakly(a, b)).count())
            .collect();
        Some(WeakOrder::by_descending_score(&beats))
    }

    /// Kendall-style distance between relations in half units; equals
    /// [`kendall_half_units`] on weak orders.
    pub fn half_distance(&self, other: &Relation) -> u64 {
        assert_eq!(self.m, other.m);
        let mut total = 0;
        for a in 0..self.m {
            for b in a + 1..self.m {
                total += self.pair(a, b).half_disagreement(other.pair(a, b));
            }
        }
        total
    }
}

/// Lexicographic successor of a permutation in place; `false` after the last.
pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..m).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// All strict orders over `0..m`, lexicographic in their best-to-worst sequence.
pub fn all_strict_orders(m: usize) -> Vec<WeakOrder> {
    permutations(m).iter().map(|p| WeakOrder::strict(p)).collect()
}

/// All weak orders over `0..m`, lexicographic in their level vectors.
pub fn all_weak_orders(m: usize) -> Vec<WeakOrder> {
    let mut out = Vec::new();
    let mut levels = vec![0u16; m];
    loop {
        // dense iff every level below the max is used
        let max = levels.iter().copied().max().unwrap_or(0);
        if (0..=max).all(|l| levels.contains(&l)) {
            out.push(WeakOrder { level: levels.clone() });
        }
        // odometer over 0..m per position, last position fastest
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (levels[pos] as usize) + 1 < m {
                levels[pos] += 1;
                for l in &mut levels[pos + 1..] {
                    *l = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|m| all_weak_orders(m).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75, 541]);
        assert_eq!(all_strict_orders(4).len(), 24);
        assert!(all_weak_orders(3).windows(2).all(|w| w[0].levels() < w[1].levels()));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(
            p,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn tiers_round_trip() {
        let w = WeakOrder::from_levels(&[5, 1, 5, 3]);
        assert_eq!(w.tiers(), vec![vec![1], vec![3], vec![0, 2]]);
        assert_eq!(WeakOrder::from_tiers(&w.tiers(), 4), Some(w));
        assert_eq!(WeakOrder::from_tiers(&[vec![0], vec![]], 1), None);
        assert_eq!(WeakOrder::from_tiers(&[vec![0, 0]], 1), None);
        assert_eq!(WeakOrder::from_tiers(&[vec![0]], 2), None);
    }

    #[test]
    fn kendall_examples() {
        let xyz = WeakOrder::strict(&[0, 1, 2]);
        let xzy = WeakOrder::strict(&[0, 2, 1]);
        let zyx = WeakOrder::strict(&[2, 1, 0]);
        assert_eq!(kendall_half_units(&xyz, &xzy), 2);
        assert_eq!(kendall_half_units(&xyz, &xyz), 0);
        assert_eq!(kendall_half_units(&xyz, &zyx), 6);
        let tied = WeakOrder::from_levels(&[0, 0, 1]);
        assert_eq!(kendall_half_units(&xyz, &tied), 1);
    }

    #[test]
    fn condorcet_majority_relation_cycle() {
        // X beats Y, Y beats Z, Z beats X
        let r = Relation::from_fn(3, |a, b| matches!((a, b), (0, 1) | (1, 2) | (2, 0)));
        assert!(r.is_complete());
        assert_eq!(r.transitivity_violation(), Some([0, 1, 2]));
        assert!(r.strict_transitivity_violation().is_some());
        assert_eq!(r.to_weak_order(), None);
    }

    #[test]
    fn relation_round_trips_weak_order() {
        for w in all_weak_orders(4) {
            let r = w.relation();
            assert_eq!(r.transitivity_violation(), None);
            assert_eq!(r.to_weak_order(), Some(w));
        }
    }

    #[test]
    fn quasi_transitive_but_not_transitive() {
        // X ≻ Z, X ~ Y, Y ~ Z
        let r = Relation::from_fn(3, |a, b| !(a == 2 && b == 0));
        assert!(r.transitivity_violation().is_some());
        assert_eq!(r.strict_transitivity_violation(), None);
    }
}
