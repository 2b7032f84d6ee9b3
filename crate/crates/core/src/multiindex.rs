//! Multi-index sets `{ n in N^D : ||n||_s <= d }` for `s` in `{1, 2, inf}`.
//!
//! Sets are stored flat (one `u32` per entry) in a canonical graded order:
//! members are sorted by total degree `sum(n_i)` first and lexicographically
//! second. Truncating to a lower total degree is then a prefix operation, and
//! membership lookups are a binary search.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{FctError, Result};

/// Default upper bound on the number of members an enumeration may produce.
pub const DEFAULT_MAX_INDICES: u128 = 1 << 28;

/// Norm used to bound a multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    /// Total degree, `sum(n_i) <= d`.
    One,
    /// Euclidean degree, `sum(n_i^2) <= d^2`.
    Two,
    /// Maximum degree, `max(n_i) <= d`.
    Max,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::One => "1",
            Norm::Two => "2",
            Norm::Max => "inf",
        }
    }

    pub fn parse(s: &str) -> Option<Norm> {
        match s {
            "1" => Some(Norm::One),
            "2" => Some(Norm::Two),
            "inf" | "Inf" | "INF" | "max" => Some(Norm::Max),
            _ => None,
        }
    }

    /// Exact integer membership test `||n||_s <= degree`.
    pub fn contains(self, n: &[u32], degree: u32) -> bool {
        match self {
            Norm::One => n.iter().map(|&v| u64::from(v)).sum::<u64>() <= u64::from(degree),
            Norm::Two => {
                let bound = u128::from(degree) * u128::from(degree);
                n.iter()
                    .map(|&v| u128::from(v) * u128::from(v))
                    .sum::<u128>()
                    <= bound
            }
            Norm::Max => n.iter().all(|&v| v <= degree),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tuple of per-dimension polynomial degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(FctError::InvalidArgument(
                "multi-index needs at least one entry".to_string(),
            ));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(alloc::vec![0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        total_degree(&self.0)
    }
}

impl AsRef<[u32]> for MultiIndex {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

fn total_degree(n: &[u32]) -> u64 {
    n.iter().map(|&v| u64::from(v)).sum()
}

/// Canonical graded order: total degree, then lexicographic.
pub fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    total_degree(a)
        .cmp(&total_degree(b))
        .then_with(|| a.cmp(b))
}

/// Ordered set of multi-indices sharing one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    norm: Norm,
    degree: u32,
    full: bool,
    entries: Vec<u32>,
}

impl IndexSet {
    /// Every `n` with `||n||_s <= degree`, in canonical order.
    pub fn enumerate(dim: usize, degree: u32, norm: Norm) -> Result<Self> {
        Self::enumerate_with_limit(dim, degree, norm, DEFAULT_MAX_INDICES)
    }

    pub fn enumerate_with_limit(dim: usize, degree: u32, norm: Norm, limit: u128) -> Result<Self> {
        if dim == 0 {
            return Err(FctError::InvalidArgument(
                "dimension must be at least 1".to_string(),
            ));
        }
        let count = match cardinality(dim, degree, norm) {
            Ok(c) => u128::from(c),
            Err(FctError::Overflow(_)) => u128::MAX,
            Err(e) => return Err(e),
        };
        if count > limit {
            return Err(FctError::Capacity {
                required: count,
                limit,
            });
        }
        let len = usize::try_from(count)
            .ok()
            .and_then(|c| c.checked_mul(dim))
            .ok_or(FctError::Overflow("index set storage"))?;
        let mut entries = Vec::with_capacity(len);
        let mut scratch = alloc::vec![0u32; dim];
        let max_total = match norm {
            Norm::One => u64::from(degree),
            Norm::Two | Norm::Max => dim as u64 * u64::from(degree),
        };
        let sq_budget = u64::from(degree) * u64::from(degree);
        let mut gen = Compositions {
            dim,
            cap: degree,
            norm,
            out: &mut entries,
            scratch: &mut scratch,
        };
        for total in 0..=max_total {
            if !gen.feasible(0, total, sq_budget) {
                // For s = 2 the feasible totals form a prefix.
                if norm == Norm::Two {
                    break;
                }
                continue;
            }
            gen.fill(0, total, sq_budget);
        }
        debug_assert_eq!(entries.len(), len);
        Ok(IndexSet {
            dim,
            norm,
            degree,
            full: true,
            entries,
        })
    }

    /// Builds a subset from explicit members. Members are sorted into canonical
    /// order; duplicates and members outside the declared ball are rejected.
    pub fn from_indices<I, M>(dim: usize, degree: u32, norm: Norm, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = M>,
        M: AsRef<[u32]>,
    {
        if dim == 0 {
            return Err(FctError::InvalidArgument(
                "dimension must be at least 1".to_string(),
            ));
        }
        let mut flat = Vec::new();
        for m in members {
            let m = m.as_ref();
            if m.len() != dim {
                return Err(FctError::DimensionMismatch {
                    expected: dim,
                    found: m.len(),
                });
            }
            if !norm.contains(m, degree) {
                return Err(FctError::InvalidArgument(alloc::format!(
                    "{m:?} lies outside the {norm}-norm ball of radius {degree}"
                )));
            }
            flat.extend_from_slice(m);
        }
        let count = flat.len() / dim;
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_unstable_by(|&a, &b| {
            graded_cmp(&flat[a * dim..(a + 1) * dim], &flat[b * dim..(b + 1) * dim])
        });
        let mut entries = Vec::with_capacity(flat.len());
        for w in order.windows(2) {
            if flat[w[0] * dim..(w[0] + 1) * dim] == flat[w[1] * dim..(w[1] + 1) * dim] {
                return Err(FctError::InvalidArgument(alloc::format!(
                    "duplicate multi-index {:?}",
                    &flat[w[0] * dim..(w[0] + 1) * dim]
                )));
            }
        }
        for &i in &order {
            entries.extend_from_slice(&flat[i * dim..(i + 1) * dim]);
        }
        let full = match cardinality(dim, degree, norm) {
            Ok(c) => c == count as u64,
            Err(_) => false,
        };
        Ok(IndexSet {
            dim,
            norm,
            degree,
            full,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// True when the set holds the entire ball rather than a subset of it.
    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn len(&self) -> usize {
        self.entries.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, u32> {
        self.entries.chunks_exact(self.dim)
    }

    /// All entries, member after member.
    pub fn as_flat(&self) -> &[u32] {
        &self.entries
    }

    /// Largest exponent appearing in each dimension (zero for an empty set).
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = alloc::vec![0u32; self.dim];
        for m in self.iter() {
            for (o, &v) in out.iter_mut().zip(m) {
                *o = (*o).max(v);
            }
        }
        out
    }

    /// Canonical position of `n`, or `None` when `n` is not a member.
    pub fn position_of(&self, n: &[u32]) -> Result<Option<usize>> {
        if n.len() != self.dim {
            return Err(FctError::DimensionMismatch {
                expected: self.dim,
                found: n.len(),
            });
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match graded_cmp(self.get(mid), n) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Ok(Some(mid)),
            }
        }
        Ok(None)
    }
}

struct Compositions<'a> {
    dim: usize,
    cap: u32,
    norm: Norm,
    out: &'a mut Vec<u32>,
    scratch: &'a mut [u32],
}

impl Compositions<'_> {
    /// Smallest possible `sum(n_i^2)` over `parts` entries summing to `total`.
    fn min_squares(total: u64, parts: u64) -> u64 {
        if parts == 0 {
            return if total == 0 { 0 } else { u64::MAX };
        }
        let q = total / parts;
        let r = total % parts;
        r * (q + 1) * (q + 1) + (parts - r) * q * q
    }

    /// Whether entries `pos..dim` can sum to `total` within the caps.
    fn feasible(&self, pos: usize, total: u64, sq_budget: u64) -> bool {
        let parts = (self.dim - pos) as u64;
        if total > parts * u64::from(self.cap) {
            return false;
        }
        self.norm != Norm::Two || Self::min_squares(total, parts) <= sq_budget
    }

    fn fill(&mut self, pos: usize, total: u64, sq_budget: u64) {
        if pos + 1 == self.dim {
            self.scratch[pos] = total as u32;
            self.out.extend_from_slice(self.scratch);
            return;
        }
        let rest = (self.dim - pos - 1) as u64;
        let lo = total.saturating_sub(rest * u64::from(self.cap));
        let hi = total.min(u64::from(self.cap));
        for v in lo..=hi {
            let sq = v * v;
            if self.norm == Norm::Two {
                if sq > sq_budget {
                    break;
                }
                if Self::min_squares(total - v, rest) > sq_budget - sq {
                    continue;
                }
            }
            self.scratch[pos] = v as u32;
            let budget = if self.norm == Norm::Two {
                sq_budget - sq
            } else {
                sq_budget
            };
            self.fill(pos + 1, total - v, budget);
        }
    }
}

/// Exact number of members of `{ n in N^dim : ||n||_s <= degree }`.
///
/// `s = 1` gives `C(degree + dim, degree)`, `s = inf` gives
/// `(degree + 1)^dim`, and `s = 2` is counted exactly by dynamic programming
/// over the squared-norm budget.
pub fn cardinality(dim: usize, degree: u32, norm: Norm) -> Result<u64> {
    if dim == 0 {
        return Err(FctError::InvalidArgument(
            "dimension must be at least 1".to_string(),
        ));
    }
    let overflow = FctError::Overflow("index set cardinality");
    match norm {
        Norm::One => {
            let mut c: u128 = 1;
            for i in 1..=u128::from(degree) {
                c = c
                    .checked_mul(dim as u128 + i)
                    .ok_or_else(|| overflow.clone())?
                    / i;
                if c > u128::from(u64::MAX) {
                    return Err(overflow);
                }
            }
            Ok(c as u64)
        }
        Norm::Max => {
            let base = u64::from(degree) + 1;
            let exp = u32::try_from(dim).map_err(|_| overflow.clone())?;
            base.checked_pow(exp).ok_or(overflow)
        }
        Norm::Two => {
            let budget = usize::try_from(u64::from(degree) * u64::from(degree))
                .map_err(|_| overflow.clone())?;
            // ways[r] = number of prefixes with squared norm exactly r
            let mut ways = alloc::vec![0u64; budget + 1];
            ways[0] = 1;
            for _ in 0..dim {
                let mut next = alloc::vec![0u64; budget + 1];
                for (r, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let mut v = 0usize;
                    while r + v * v <= budget {
                        let slot = &mut next[r + v * v];
                        *slot = slot.checked_add(w).ok_or_else(|| overflow.clone())?;
                        v += 1;
                    }
                }
                ways = next;
            }
            ways.iter()
                .try_fold(0u64, |acc, &w| acc.checked_add(w))
                .ok_or(overflow)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Brute-force scan over the `(degree + 1)^dim` box.
    fn brute_force(dim: usize, degree: u32, norm: Norm) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        loop {
            if norm.contains(&cur, degree) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == dim {
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= degree {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn total_degree_two_dims_degree_three_has_ten() {
        let set = IndexSet::enumerate(2, 3, Norm::One).unwrap();
        assert_eq!(set.len(), 10);
    }

    #[test]
    fn max_norm_degree_zero_is_origin() {
        let set = IndexSet::enumerate(3, 0, Norm::Max).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.get(0), &[0, 0, 0]);
    }

    #[test]
    fn euclidean_two_dims_radius_two() {
        let set = IndexSet::enumerate(2, 2, Norm::Two).unwrap();
        let mut got: Vec<Vec<u32>> = set.iter().map(|m| m.to_vec()).collect();
        got.sort();
        let mut want = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![2, 0],
            vec![0, 2],
        ];
        want.sort();
        assert_eq!(got, want);
        // graded-lex order
        let ordered: Vec<&[u32]> = set.iter().collect();
        assert_eq!(
            ordered,
            vec![&[0, 0][..], &[0, 1], &[1, 0], &[0, 2], &[1, 1], &[2, 0]]
        );
        assert_eq!(set.position_of(&[1, 1]).unwrap(), Some(4));
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality(25, 3, Norm::One).unwrap(), 3276);
        assert_eq!(cardinality(1, 5, Norm::Two).unwrap(), 6);
        assert_eq!(cardinality(2, 2, Norm::Max).unwrap(), 9);
        assert_eq!(cardinality(10, 3, Norm::One).unwrap(), 286);
    }

    #[test]
    fn cardinality_overflow_is_reported() {
        assert!(matches!(
            cardinality(200, 9, Norm::Max),
            Err(FctError::Overflow(_))
        ));
    }

    #[test]
    fn capacity_guard() {
        let err = IndexSet::enumerate_with_limit(30, 3, Norm::Max, 1_000_000).unwrap_err();
        assert!(matches!(err, FctError::Capacity { .. }));
    }

    #[test]
    fn exhaustive_agreement_with_brute_force() {
        for dim in 1..=6 {
            for degree in 0..=6u32 {
                for norm in [Norm::One, Norm::Two, Norm::Max] {
                    let set = IndexSet::enumerate(dim, degree, norm).unwrap();
                    let mut want = brute_force(dim, degree, norm);
                    want.sort_by(|a, b| graded_cmp(a, b));
                    let got: Vec<Vec<u32>> = set.iter().map(|m| m.to_vec()).collect();
                    assert_eq!(got, want, "dim {dim} degree {degree} norm {norm}");
                    assert_eq!(
                        cardinality(dim, degree, norm).unwrap(),
                        set.len() as u64,
                        "dim {dim} degree {degree} norm {norm}"
                    );
                }
            }
        }
    }

    #[test]
    fn position_lookup() {
        let set = IndexSet::enumerate(2, 3, Norm::One).unwrap();
        assert_eq!(set.position_of(&[0, 0]).unwrap(), Some(0));
        assert_eq!(set.position_of(&[3, 1]).unwrap(), None);
        assert!(matches!(
            set.position_of(&[0, 0, 0]),
            Err(FctError::DimensionMismatch { .. })
        ));
        for (i, m) in set.iter().enumerate() {
            assert_eq!(set.position_of(m).unwrap(), Some(i));
        }
    }

    #[test]
    fn nested_balls() {
        for dim in 1..=4 {
            for degree in 0..=5u32 {
                let one = IndexSet::enumerate(dim, degree, Norm::One).unwrap();
                let two = IndexSet::enumerate(dim, degree, Norm::Two).unwrap();
                let inf = IndexSet::enumerate(dim, degree, Norm::Max).unwrap();
                let bigger = IndexSet::enumerate(dim, degree + 1, Norm::Two).unwrap();
                for m in one.iter() {
                    assert!(two.position_of(m).unwrap().is_some());
                }
                for m in two.iter() {
                    assert!(inf.position_of(m).unwrap().is_some());
                    assert!(bigger.position_of(m).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn subsets_are_sorted_and_validated() {
        let set = IndexSet::from_indices(2, 3, Norm::Max, [[3u32, 0], [0, 1], [1, 1]]).unwrap();
        assert_eq!(set.get(0), &[0, 1]);
        assert_eq!(set.get(2), &[3, 0]);
        assert!(!set.is_full());
        assert!(IndexSet::from_indices(2, 3, Norm::Max, [[0u32, 1], [0, 1]]).is_err());
        assert!(IndexSet::from_indices(2, 3, Norm::One, [[3u32, 1]]).is_err());
        assert!(IndexSet::from_indices(2, 3, Norm::One, [[1u32, 1, 1]]).is_err());
    }

    #[test]
    fn prefix_truncation_by_total_degree() {
        let big = IndexSet::enumerate(3, 5, Norm::One).unwrap();
        let small = IndexSet::enumerate(3, 3, Norm::One).unwrap();
        for i in 0..small.len() {
            assert_eq!(big.get(i), small.get(i));
        }
    }
}
