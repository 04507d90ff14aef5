//! (r, δ)-locality: repair sets, optimality and local repair.
//!
//! A set `S` of coordinates is a repair set when `|S| <= r + δ - 1` and the
//! code punctured to `S` has minimum distance at least `δ`. A zero-dimensional
//! punctured code has no nonzero codewords and counts as infinitely distant.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::code::{Distance, LinearCode};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest length accepted by the exhaustive repair-set scan.
pub const STRUCTURE_SCAN_MAX_N: usize = 20;
/// Largest length accepted by the exhaustive partition search.
pub const PARTITION_SEARCH_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityProfile {
    r: usize,
    delta: usize,
    partition: Vec<Vec<usize>>,
    verified: bool,
}

impl LocalityProfile {
    /// An unverified profile; call [`LocalityProfile::verify`] before use.
    pub fn new(r: usize, delta: usize, partition: Vec<Vec<usize>>) -> LocalityProfile {
        let partition = partition
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        LocalityProfile {
            r,
            delta,
            partition,
            verified: false,
        }
    }

    /// Marks the profile verified iff its sets partition `[n]` and each is a
    /// repair set of `code`.
    pub fn verify(mut self, code: &LinearCode) -> LocalityProfile {
        let mut seen = vec![false; code.n()];
        let mut disjoint_cover = true;
        for s in &self.partition {
            for &i in s {
                if i >= code.n() || seen[i] {
                    disjoint_cover = false;
                } else {
                    seen[i] = true;
                }
            }
        }
        self.verified = disjoint_cover
            && seen.iter().all(|&b| b)
            && self
                .partition
                .iter()
                .all(|s| verify_repair_set(code, s, self.r, self.delta));
        self
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Index of the set containing coordinate `i`.
    pub fn set_of(&self, i: usize) -> Option<usize> {
        self.partition.iter().position(|s| s.contains(&i))
    }
}

/// True iff `s` is a repair set of `code` for the given `(r, delta)`.
///
/// Computes the minimum distance of the punctured code directly.
pub fn verify_repair_set(code: &LinearCode, s: &[usize], r: usize, delta: usize) -> bool {
    if s.is_empty() || s.len() > r + delta - 1 {
        return false;
    }
    let Ok(local) = code.puncture(s) else {
        return false;
    };
    match local.min_distance(Some(delta)) {
        Ok(Distance::Exact(d)) => d >= delta,
        Ok(Distance::AboveCap(_)) => true,
        Err(Error::ZeroDimensional) => true,
        Err(_) => false,
    }
}

/// `d(C|_S) >= delta` decided by ranks: no `delta - 1` coordinates of `S`
/// carry a nonzero codeword of the punctured code on their own.
pub fn punctured_distance_at_least(g: &Matrix, s: &[usize], delta: usize) -> bool {
    let full = g.rank_of_columns(s);
    let t = (delta - 1).min(s.len());
    let mut rest = Vec::with_capacity(s.len());
    subsets_of(s.len(), t).all(|removed| {
        rest.clear();
        rest.extend(
            s.iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, &x)| x),
        );
        g.rank_of_columns(&rest) == full
    })
}

fn subsets_of(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(k)
}

/// The cosets `{i, i+m, i+2m, ...}` of the subgroup of `Z_n` generated by
/// `m = n / size`, in order `i = 0..m`.
pub fn coset_partition(n: usize, size: usize) -> Option<Vec<Vec<usize>>> {
    if size == 0 || !n.is_multiple_of(size) {
        return None;
    }
    let m = n / size;
    Some(
        (0..m)
            .map(|i| (0..size).map(|x| i + x * m).collect())
            .collect(),
    )
}

/// Finds a partition of `[n]` into repair sets.
///
/// Tries the coset partition first, then (for `n <= 24`) the
/// lexicographically least exact cover by repair sets of size at most
/// `r + delta - 1`.
pub fn discover_repair_partition(
    code: &LinearCode,
    r: usize,
    delta: usize,
) -> Result<LocalityProfile> {
    let n = code.n();
    let a = r + delta - 1;
    if let Some(cosets) = coset_partition(n, a) {
        let profile = LocalityProfile::new(r, delta, cosets).verify(code);
        if profile.is_verified() {
            return Ok(profile);
        }
    }
    if n > PARTITION_SEARCH_MAX_N {
        return Err(Error::NotFound(format!(
            "coset partition fails and n = {n} exceeds the exhaustive search limit {PARTITION_SEARCH_MAX_N}"
        )));
    }
    let g = code.generator();
    let mut candidates: Vec<Vec<usize>> = (1..=a.min(n))
        .into_par_iter()
        .flat_map_iter(|w| subsets_of(n, w).filter(|s| punctured_distance_at_least(g, s, delta)))
        .collect();
    candidates.sort();
    let mut by_first: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, s) in candidates.iter().enumerate() {
        for &i in s {
            by_first[i].push(idx);
        }
    }
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    if exact_cover(&candidates, &by_first, &mut covered, &mut chosen) {
        let partition = chosen.iter().map(|&i| candidates[i].clone()).collect();
        let profile = LocalityProfile::new(r, delta, partition).verify(code);
        debug_assert!(profile.is_verified());
        return Ok(profile);
    }
    Err(Error::NotFound(format!(
        "no partition of [{n}] into ({r},{delta}) repair sets"
    )))
}

fn exact_cover(
    candidates: &[Vec<usize>],
    containing: &[Vec<usize>],
    covered: &mut [bool],
    chosen: &mut Vec<usize>,
) -> bool {
    let Some(e) = covered.iter().position(|&c| !c) else {
        return true;
    };
    for &idx in &containing[e] {
        let s = &candidates[idx];
        if s.iter().any(|&i| covered[i]) {
            continue;
        }
        for &i in s {
            covered[i] = true;
        }
        chosen.push(idx);
        if exact_cover(candidates, containing, covered, chosen) {
            return true;
        }
        chosen.pop();
        for &i in s {
            covered[i] = false;
        }
    }
    false
}

/// `n - k + 1 - (ceil(k/r) - 1)(delta - 1)`.
pub fn lrc_singleton_bound(n: usize, k: usize, r: usize, delta: usize) -> i64 {
    let blocks = k.div_ceil(r) as i64;
    n as i64 - k as i64 + 1 - (blocks - 1) * (delta as i64 - 1)
}

/// True iff the code meets the Singleton-type bound for its verified profile.
pub fn is_optimal_lrc(code: &LinearCode, profile: &LocalityProfile) -> Result<bool> {
    if !profile.is_verified() {
        return Err(Error::UnverifiedProfile);
    }
    let bound = lrc_singleton_bound(code.n(), code.k(), profile.r(), profile.delta());
    let d = code
        .min_distance(None)?
        .exact()
        .expect("default cap is the Singleton bound, which always holds");
    Ok(d as i64 == bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureCounterexample {
    pub kind: String,
    pub set: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
}

/// Outcome of the exhaustive scan of all repair sets of a cyclic code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub delta: usize,
    /// `k = u*r + v` with `0 < v <= r`.
    pub u: usize,
    pub v: usize,
    /// True iff `u >= 2(r - v + 1)`.
    pub hypothesis_met: bool,
    pub repair_set_count: usize,
    pub maximal_sets: Vec<Vec<usize>>,
    pub all_dichotomy: bool,
    /// True iff the maximal repair sets are exactly the cosets of `<n/(r+delta-1)>`.
    pub all_cosets: bool,
    pub counterexamples: Vec<StructureCounterexample>,
    pub union_rank_families: usize,
    pub union_rank_violations: Vec<Vec<Vec<usize>>>,
    pub notes: Vec<String>,
}

const MAX_COUNTEREXAMPLES: usize = 20;

/// Enumerates every repair set of a cyclic code with `n <= 20` and checks
/// the shift dichotomy (`S + j = S` or disjoint) and that the maximal
/// repair sets are cosets.
pub fn check_coset_structure(code: &LinearCode, r: usize, delta: usize) -> Result<StructureReport> {
    let n = code.n();
    if n > STRUCTURE_SCAN_MAX_N {
        return Err(Error::TooLarge(format!(
            "repair-set scan needs n <= {STRUCTURE_SCAN_MAX_N}, got {n}"
        )));
    }
    if !code.is_cyclic() {
        return Err(Error::NotCyclic);
    }
    let k = code.k();
    let a = r + delta - 1;
    let (u, v) = arith::split_positive_remainder(k as u64, r as u64);
    let (u, v) = (u as usize, v as usize);
    let hypothesis_met = u >= 2 * (r - v + 1);
    let mut notes = vec![format!("k = {k} written as {u}*{r} + {v} with 0 < v <= r")];
    if !hypothesis_met {
        notes.push(format!(
            "hypothesis not met: u = {u} < 2(r - v + 1) = {}",
            2 * (r - v + 1)
        ));
    }

    let g = code.generator();
    let mut gamma: Vec<Vec<usize>> = (1..=a.min(n))
        .into_par_iter()
        .flat_map_iter(|w| subsets_of(n, w).filter(|s| punctured_distance_at_least(g, s, delta)))
        .collect();
    gamma.sort();

    let mut counterexamples = Vec::new();
    let mut all_dichotomy = true;
    for s in &gamma {
        for j in 1..n {
            let shifted = shift_set(s, j, n);
            let overlap = shifted
                .iter()
                .filter(|x| s.binary_search(x).is_ok())
                .count();
            if overlap != 0 && overlap != s.len() {
                all_dichotomy = false;
                if counterexamples.len() < MAX_COUNTEREXAMPLES {
                    counterexamples.push(StructureCounterexample {
                        kind: "shift_overlap".into(),
                        set: s.clone(),
                        shift: Some(j),
                    });
                }
                break;
            }
        }
    }

    let maximal_sets: Vec<Vec<usize>> = gamma
        .iter()
        .filter(|s| {
            !gamma
                .iter()
                .any(|t| t.len() > s.len() && s.iter().all(|x| t.binary_search(x).is_ok()))
        })
        .cloned()
        .collect();
    let mut cosets = coset_partition(n, a).unwrap_or_default();
    cosets.sort();
    let all_cosets = !cosets.is_empty() && maximal_sets == cosets;
    if cosets.is_empty() {
        notes.push(format!("r + delta - 1 = {a} does not divide n = {n}"));
    }
    for s in &maximal_sets {
        if !cosets.contains(s) && counterexamples.len() < MAX_COUNTEREXAMPLES {
            counterexamples.push(StructureCounterexample {
                kind: "maximal_not_coset".into(),
                set: s.clone(),
                shift: None,
            });
        }
    }

    let (union_rank_families, union_rank_violations) = union_rank_scan(g, &maximal_sets, delta, 3);

    Ok(StructureReport {
        n,
        k,
        r,
        delta,
        u,
        v,
        hypothesis_met,
        repair_set_count: gamma.len(),
        maximal_sets,
        all_dichotomy,
        all_cosets,
        counterexamples,
        union_rank_families,
        union_rank_violations,
        notes,
    })
}

fn shift_set(s: &[usize], j: usize, n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = s.iter().map(|&x| (x + j) % n).collect();
    out.sort_unstable();
    out
}

/// Checks `rank(U) <= |U| - |V|(delta - 1)` for the union `U` of a family
/// `V` of repair sets.
///
/// Returns `None` when the family does not satisfy the overlap premise: each
/// member may share at most `|S| - delta + 1` coordinates with the union of
/// the others.
pub fn union_rank_holds(g: &Matrix, family: &[Vec<usize>], delta: usize) -> Option<bool> {
    for (i, s) in family.iter().enumerate() {
        let overlap = s
            .iter()
            .filter(|x| {
                family
                    .iter()
                    .enumerate()
                    .any(|(j, t)| j != i && t.contains(x))
            })
            .count();
        if overlap + delta > s.len() + 1 {
            return None;
        }
    }
    let mut union: Vec<usize> = family.iter().flatten().copied().collect();
    union.sort_unstable();
    union.dedup();
    let rank = g.rank_of_columns(&union) as i64;
    Some(rank <= union.len() as i64 - family.len() as i64 * (delta as i64 - 1))
}

/// Applies [`union_rank_holds`] to every family of at most `max_family`
/// distinct sets; returns the number of families meeting the premise and
/// those that violate the inequality.
pub fn union_rank_scan(
    g: &Matrix,
    sets: &[Vec<usize>],
    delta: usize,
    max_family: usize,
) -> (usize, Vec<Vec<Vec<usize>>>) {
    let mut checked = 0;
    let mut violations = Vec::new();
    for size in 1..=max_family.min(sets.len()) {
        for idx in subsets_of(sets.len(), size) {
            let family: Vec<Vec<usize>> = idx.iter().map(|&i| sets[i].clone()).collect();
            match union_rank_holds(g, &family, delta) {
                Some(true) => checked += 1,
                Some(false) => {
                    checked += 1;
                    violations.push(family);
                }
                None => {}
            }
        }
    }
    (checked, violations)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairOutcome {
    Repaired(Vec<u32>),
    /// Some sets carry `delta` or more erasures; `partial` holds every
    /// symbol that could be repaired locally.
    Escalate {
        partial: Vec<Option<u32>>,
        sets: Vec<usize>,
    },
}

/// Repairs each set with at most `delta - 1` erasures from its own symbols.
pub fn local_repair(
    code: &LinearCode,
    profile: &LocalityProfile,
    word: &[Option<u32>],
) -> Result<RepairOutcome> {
    if !profile.is_verified() {
        return Err(Error::UnverifiedProfile);
    }
    if word.len() != code.n() {
        return Err(Error::DimensionMismatch(format!(
            "word of length {} for a code of length {}",
            word.len(),
            code.n()
        )));
    }
    let mut out = word.to_vec();
    let mut escalate = Vec::new();
    for (idx, s) in profile.partition().iter().enumerate() {
        let erased = s.iter().filter(|&&i| word[i].is_none()).count();
        if erased == 0 {
            continue;
        }
        if erased >= profile.delta() {
            escalate.push(idx);
            continue;
        }
        let local = code.puncture(s)?;
        let local_word: Vec<Option<u32>> = s.iter().map(|&i| word[i]).collect();
        let repaired = local.erasure_decode(&local_word)?;
        for (&i, v) in s.iter().zip(repaired) {
            out[i] = Some(v);
        }
    }
    if escalate.is_empty() {
        Ok(RepairOutcome::Repaired(
            out.into_iter().map(|v| v.unwrap()).collect(),
        ))
    } else {
        Ok(RepairOutcome::Escalate {
            partial: out,
            sets: escalate,
        })
    }
}
