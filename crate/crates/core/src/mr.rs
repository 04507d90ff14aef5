//! Maximally recoverable codes with two global parities.
//!
//! Coordinates are indexed so that `c = x*m + i` lies in slab `x` and local
//! group `i`; the local groups are the cosets `{i, i+m, ..., i+(a-1)m}`.
//!
//! Two families are built here: a cyclic code given by its root set, and a
//! quasi-cyclic code given by an explicit parity-check matrix. Both share the
//! same local structure and differ in their two global rows.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::code::{CodeMeta, LinearCode, RootSet};
use crate::combin;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::locality::LocalityProfile;
use crate::matrix::Matrix;

/// Upper limit on keep-selections enumerated by definition-mode verification.
pub const DEFINITION_LIMIT: u128 = 1_000_000;

/// Upper limit on erasure patterns checked by fastpath verification.
pub const FASTPATH_LIMIT: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrParams {
    /// Base field size, a prime power.
    pub q: u64,
    /// The code lives over GF(q^b) and has length `q^b - 1`.
    pub b: u32,
    pub r: u64,
    pub delta: u64,
    /// Exponent of the first global row of the quasi-cyclic family.
    pub s: u64,
}

impl MrParams {
    /// Parameters with `s` set to [`MrParams::default_s`].
    pub fn new(q: u64, b: u32, r: u64, delta: u64) -> MrParams {
        let mut params = MrParams {
            q,
            b,
            r,
            delta,
            s: 1,
        };
        params.s = params.default_s();
        params
    }

    /// `a` when `gcd(a, m) = 1`, else 1.
    ///
    /// With `s = a` the row `lambda^(c mod m)` equals `lambda^c` because
    /// `lambda^m = 1`, which the block permutations in `equiv` need in order
    /// to produce a cyclic code. `s = 1` gives `lambda` full order `n`.
    pub fn default_s(&self) -> u64 {
        let (a, n) = (self.a(), self.n());
        if n > 0 && n % a == 0 && arith::gcd(a, n / a) == 1 {
            a
        } else {
            1
        }
    }

    /// Whether `lambda = alpha^s` satisfies `lambda^m = 1`, i.e. `a | s`.
    pub fn lambda_has_order_dividing_m(&self) -> bool {
        self.s.is_multiple_of(self.a())
    }

    pub fn with_s(mut self, s: u64) -> MrParams {
        self.s = s;
        self
    }

    /// `q^b - 1`, or 0 on overflow.
    pub fn n(&self) -> u64 {
        arith::checked_pow(self.q, self.b).map_or(0, |v| v - 1)
    }

    pub fn a(&self) -> u64 {
        self.r + self.delta - 1
    }

    pub fn m(&self) -> u64 {
        self.n() / self.a()
    }

    pub fn h(&self) -> u64 {
        2
    }

    pub fn k(&self) -> u64 {
        (self.m() * self.r).saturating_sub(self.h())
    }

    /// Checks shared by both families.
    ///
    /// The local group size `a` must divide `q^c - 1` for some proper divisor
    /// `c` of `b` (for `b = 1`, `a | q - 1`), so that `a | n` and the local
    /// codes are defined over a proper subfield.
    pub fn check_common(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParamViolation(msg));
        if arith::prime_power(self.q).is_none() {
            return bad(format!("q = {} is not a prime power", self.q));
        }
        if self.b == 0 {
            return bad("b must be at least 1".into());
        }
        if self.r < 2 {
            return bad(format!("r = {} must be at least 2", self.r));
        }
        if self.delta < 2 {
            return bad(format!("delta = {} must be at least 2", self.delta));
        }
        let n = self.n();
        if n == 0 || n + 1 > crate::gf::MAX_FIELD_SIZE {
            return bad(format!(
                "q^b = {}^{} exceeds the supported field size",
                self.q, self.b
            ));
        }
        let a = self.a();
        let admissible = if self.b == 1 {
            (self.q - 1).is_multiple_of(a)
        } else {
            (1..self.b)
                .filter(|c| self.b.is_multiple_of(*c))
                .any(|c| (self.q.pow(c) - 1) % a == 0)
        };
        if !admissible {
            return bad(format!(
                "a = r + delta - 1 = {a} divides no q^c - 1 with c a proper divisor of b (q = {}, b = {})",
                self.q, self.b
            ));
        }
        if self.k() == 0 {
            return bad(format!("k = m*r - 2 = {} is not positive", self.k()));
        }
        Ok(())
    }

    pub fn check_construction1(&self) -> Result<()> {
        self.check_common()?;
        let m = self.m();
        if arith::gcd(self.delta, m) != 1 {
            return Err(Error::ParamViolation(format!(
                "gcd(delta, m) = gcd({}, {m}) = {} != 1",
                self.delta,
                arith::gcd(self.delta, m)
            )));
        }
        Ok(())
    }

    pub fn check_construction2(&self) -> Result<()> {
        self.check_common()?;
        let m = self.m();
        if arith::gcd(self.s, m) != 1 {
            return Err(Error::ParamViolation(format!(
                "gcd(s, m) = gcd({}, {m}) = {} != 1",
                self.s,
                arith::gcd(self.s, m)
            )));
        }
        Ok(())
    }

    /// GF(q^b) in its default representation.
    pub fn field(&self) -> Result<Field> {
        let (p, e) = arith::prime_power(self.q).ok_or(Error::NotPrime(self.q))?;
        Field::new(p, e * self.b, None)
    }

    fn meta(&self, family: &str) -> CodeMeta {
        CodeMeta {
            family: Some(family.into()),
            q: Some(self.q),
            b: Some(self.b),
            r: Some(self.r),
            delta: Some(self.delta),
            s: (family == "construction2").then_some(self.s),
        }
    }

    /// Root exponents `{j*a + t : 1 <= j <= m, 1 <= t <= delta-1} ∪ {0, delta}` mod `n`.
    pub fn construction1_roots(&self) -> RootSet {
        let (a, m, n) = (self.a() as i64, self.m() as i64, self.n() as usize);
        let delta = self.delta as i64;
        let local = (1..=m).flat_map(|j| (1..delta).map(move |t| j * a + t));
        RootSet::new(n, local.chain([0, delta]))
    }

    /// The local groups `{i + x*m : x in [a]}` for `i in [m]`.
    pub fn local_groups(&self) -> Vec<Vec<usize>> {
        crate::locality::coset_partition(self.n() as usize, self.a() as usize)
            .expect("a divides n for admissible parameters")
    }

    /// Verified locality profile made of the local groups.
    pub fn profile(&self, code: &LinearCode) -> LocalityProfile {
        LocalityProfile::new(self.r as usize, self.delta as usize, self.local_groups()).verify(code)
    }
}

/// The cyclic MR code defined by [`MrParams::construction1_roots`].
pub fn build_construction1(params: &MrParams) -> Result<LinearCode> {
    params.check_construction1()?;
    let field = params.field()?;
    let code = LinearCode::from_roots(&field, &params.construction1_roots())?;
    assert_eq!(
        code.k() as u64,
        params.k(),
        "root set has the expected size"
    );
    debug_assert!(code.is_cyclic());
    Ok(code.with_meta(params.meta("construction1")))
}

/// Local rows shared by both families: for each group `i` and power
/// `p = 1..delta-1`, the entry at column `x*m + i` is `beta^(p*x)`.
fn local_rows(field: &Field, params: &MrParams) -> Vec<Vec<u32>> {
    let (n, m, a) = (
        params.n() as usize,
        params.m() as usize,
        params.a() as usize,
    );
    let beta = field.alpha_pow(m as i64);
    let mut rows = Vec::new();
    for i in 0..m {
        for p in 1..params.delta as i64 {
            let mut row = vec![0u32; n];
            for x in 0..a {
                row[x * m + i] = field.pow(beta, p * x as i64).expect("beta is nonzero");
            }
            rows.push(row);
        }
    }
    rows
}

/// Explicit parity-check matrix of the cyclic family: local rows, an
/// all-ones row, and the row `(gamma^j)_j` with `gamma = alpha^delta`.
pub fn construction1_parity(params: &MrParams) -> Result<Matrix> {
    params.check_construction1()?;
    let field = params.field()?;
    let n = params.n() as usize;
    let mut rows = local_rows(&field, params);
    rows.push(vec![1; n]);
    let gamma = field.alpha_pow(params.delta as i64);
    rows.push(
        (0..n)
            .map(|j| field.pow(gamma, j as i64).unwrap())
            .collect(),
    );
    Matrix::from_rows(&field, n, &rows)
}

/// Parity-check matrix of the quasi-cyclic family: local rows, the row
/// `lambda^i` at column `x*m + i` with `lambda = alpha^s`, and the row
/// `beta^(delta*x)` at column `x*m + i`.
pub fn construction2_parity(params: &MrParams) -> Result<Matrix> {
    params.check_construction2()?;
    let field = params.field()?;
    let (n, m) = (params.n() as usize, params.m() as usize);
    let beta = field.alpha_pow(m as i64);
    let lambda = field.alpha_pow(params.s as i64);
    let mut rows = local_rows(&field, params);
    rows.push(
        (0..n)
            .map(|c| field.pow(lambda, (c % m) as i64).unwrap())
            .collect(),
    );
    rows.push(
        (0..n)
            .map(|c| {
                field
                    .pow(beta, (params.delta as usize * (c / m)) as i64)
                    .unwrap()
            })
            .collect(),
    );
    Matrix::from_rows(&field, n, &rows)
}

pub fn build_construction2(params: &MrParams) -> Result<LinearCode> {
    let h = construction2_parity(params)?;
    let code = LinearCode::from_parity(&h);
    assert_eq!(code.k() as u64, params.k(), "parity rows are independent");
    Ok(code.with_meta(params.meta("construction2")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MrMode {
    /// Every keep-selection, each tested for an MDS punctured code.
    Definition,
    /// Only the reduced patterns left after local peeling (two global parities).
    Fastpath,
    /// Both of the above, with their verdicts compared.
    Both,
    /// A random sample of fastpath patterns.
    Sampled,
}

impl std::str::FromStr for MrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<MrMode> {
        match s {
            "definition" => Ok(MrMode::Definition),
            "fastpath" => Ok(MrMode::Fastpath),
            "both" => Ok(MrMode::Both),
            "sampled" => Ok(MrMode::Sampled),
            other => Err(Error::SchemaError(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MrVerdict {
    pub mr: bool,
    pub mode: MrMode,
    /// Keep-selections or erasure patterns examined.
    pub checked: u64,
    /// Lexicographically least uncorrectable erasure pattern found.
    pub witness: Option<Vec<usize>>,
    pub runtime_ms: u64,
    /// False for fastpath evidence produced before the fast path was
    /// cross-checked against the definition on a full instance.
    pub calibrated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
}

/// Runs MR verification and tracks whether the fast path has been
/// cross-checked against the definition.
#[derive(Debug, Default)]
pub struct MrVerifier {
    calibrated: AtomicBool,
}

impl MrVerifier {
    pub fn new() -> MrVerifier {
        MrVerifier::default()
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated.load(Ordering::Relaxed)
    }

    /// Runs both modes on one instance; the verifier becomes calibrated if
    /// they agree.
    pub fn calibrate(&self, code: &LinearCode, profile: &LocalityProfile) -> Result<MrVerdict> {
        let h = implied_h(code, profile)?;
        let v = self.verify(code, profile, h, MrMode::Both)?;
        Ok(v)
    }

    pub fn verify(
        &self,
        code: &LinearCode,
        profile: &LocalityProfile,
        h: usize,
        mode: MrMode,
    ) -> Result<MrVerdict> {
        let start = Instant::now();
        check_profile(code, profile, h)?;
        let mut verdict = match mode {
            MrMode::Definition => by_definition(code, profile)?,
            MrMode::Fastpath => {
                let mut v = by_fastpath(code, profile, h)?;
                v.calibrated = self.is_calibrated();
                v
            }
            MrMode::Both => {
                let def = by_definition(code, profile)?;
                let fast = by_fastpath(code, profile, h)?;
                let agree = def.mr == fast.mr;
                if agree {
                    self.calibrated.store(true, Ordering::Relaxed);
                }
                MrVerdict {
                    mr: def.mr,
                    mode: MrMode::Both,
                    checked: def.checked + fast.checked,
                    witness: def.witness,
                    runtime_ms: 0,
                    calibrated: true,
                    agreement: Some(agree),
                }
            }
            MrMode::Sampled => {
                return Err(Error::ModeUnsupported(
                    "sampled (use verify_sampled with a sample count and seed)".into(),
                ))
            }
        };
        verdict.runtime_ms = start.elapsed().as_millis() as u64;
        Ok(verdict)
    }

    /// Checks `samples` fastpath patterns drawn uniformly (with replacement)
    /// using a ChaCha generator seeded with `seed`.
    pub fn verify_sampled(
        &self,
        code: &LinearCode,
        profile: &LocalityProfile,
        samples: usize,
        seed: u64,
    ) -> Result<MrVerdict> {
        let start = Instant::now();
        check_profile(code, profile, 2)?;
        let total = fastpath_pattern_count(profile);
        if total == 0 {
            return Err(Error::EmptySet);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks: Vec<u128> = (0..samples).map(|_| rng.gen_range(0..total)).collect();
        let h = code.parity();
        let witness = picks
            .par_iter()
            .map(|&i| fastpath_pattern_at(profile, i).expect("index below the pattern count"))
            .filter(|e| h.rank_of_columns(e) < e.len())
            .min();
        Ok(MrVerdict {
            mr: witness.is_none(),
            mode: MrMode::Sampled,
            checked: samples as u64,
            witness,
            runtime_ms: start.elapsed().as_millis() as u64,
            calibrated: self.is_calibrated(),
            agreement: None,
        })
    }
}

/// Verification with a fresh (uncalibrated) verifier.
pub fn verify_mr(
    code: &LinearCode,
    profile: &LocalityProfile,
    h: usize,
    mode: MrMode,
) -> Result<MrVerdict> {
    MrVerifier::new().verify(code, profile, h, mode)
}

/// `h = Σ|S_i| - (delta-1)·#sets - k` for a profile's partition.
pub fn implied_h(code: &LinearCode, profile: &LocalityProfile) -> Result<usize> {
    let total: usize = profile.partition().iter().map(Vec::len).sum();
    let local = (profile.delta() - 1) * profile.partition().len();
    (total as i64 - local as i64 - code.k() as i64)
        .try_into()
        .map_err(|_| Error::ParamViolation("local redundancy exceeds n - k".into()))
}

fn check_profile(code: &LinearCode, profile: &LocalityProfile, h: usize) -> Result<()> {
    if !profile.is_verified() {
        return Err(Error::UnverifiedProfile);
    }
    let implied = implied_h(code, profile)?;
    if implied != h {
        return Err(Error::ParamViolation(format!(
            "h = {h} but the profile and dimension imply h = {implied}"
        )));
    }
    Ok(())
}

fn by_definition(code: &LinearCode, profile: &LocalityProfile) -> Result<MrVerdict> {
    let e = profile.delta() - 1;
    let removals: Vec<Vec<Vec<usize>>> = profile
        .partition()
        .iter()
        .map(|s| s.iter().copied().combinations(e).collect())
        .collect();
    let total = removals
        .iter()
        .try_fold(1u128, |acc, r| acc.checked_mul(r.len() as u128))
        .filter(|&t| t <= DEFINITION_LIMIT)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "definition mode needs at most {DEFINITION_LIMIT} keep-selections"
            ))
        })? as u64;

    let n = code.n();
    let witness = (0..total).into_par_iter().find_map_first(|idx| {
        // mixed radix with the first group most significant
        let mut rem = idx;
        let mut erased = vec![false; n];
        for r in removals.iter().rev() {
            let d = (rem % r.len() as u64) as usize;
            rem /= r.len() as u64;
            for &i in &r[d] {
                erased[i] = true;
            }
        }
        let kept: Vec<usize> = (0..n).filter(|&i| !erased[i]).collect();
        let punctured = code.puncture(&kept).expect("kept set is non-empty");
        let bad = punctured.first_non_mds_subset()?;
        // translate the dependent columns into extra erasures
        let k = punctured.k();
        let extra: Vec<usize> = if k <= punctured.n() - k {
            (0..kept.len())
                .filter(|j| !bad.contains(j))
                .map(|j| kept[j])
                .collect()
        } else {
            bad.iter().map(|&j| kept[j]).collect()
        };
        let mut pattern: Vec<usize> = (0..n).filter(|&i| erased[i]).chain(extra).collect();
        pattern.sort_unstable();
        Some(pattern)
    });
    Ok(MrVerdict {
        mr: witness.is_none(),
        mode: MrMode::Definition,
        checked: total,
        witness,
        runtime_ms: 0,
        calibrated: true,
        agreement: None,
    })
}

/// Reduced patterns for two global parities: `delta + 1` erasures inside one
/// group, or `delta` erasures in each of two groups. Sorted, deduplicated.
/// Number of patterns [`fastpath_patterns`] would produce.
pub fn fastpath_pattern_count(profile: &LocalityProfile) -> u128 {
    let delta = profile.delta() as u64;
    let sizes: Vec<u64> = profile.partition().iter().map(|s| s.len() as u64).collect();
    let single: u128 = sizes.iter().map(|&s| arith::binomial(s, delta + 1)).sum();
    let pairs: u128 = sizes
        .iter()
        .tuple_combinations()
        .map(|(&x, &y)| arith::binomial(x, delta) * arith::binomial(y, delta))
        .sum();
    single + pairs
}

/// The `idx`-th entry of [`fastpath_patterns`], computed without building the list.
pub fn fastpath_pattern_at(profile: &LocalityProfile, mut idx: u128) -> Option<Vec<usize>> {
    let delta = profile.delta();
    let sets = profile.partition();
    let pick = |set: &[usize], k: usize, i: u128| -> Vec<usize> {
        combin::unrank(set.len(), k, i)
            .into_iter()
            .map(|p| set[p])
            .collect()
    };
    for s in sets {
        let c = arith::binomial(s.len() as u64, delta as u64 + 1);
        if idx < c {
            return Some(pick(s, delta + 1, idx));
        }
        idx -= c;
    }
    for (i, j) in (0..sets.len()).tuple_combinations() {
        let cl = arith::binomial(sets[i].len() as u64, delta as u64);
        let cr = arith::binomial(sets[j].len() as u64, delta as u64);
        if idx < cl * cr {
            let mut e = pick(&sets[i], delta, idx / cr);
            e.extend(pick(&sets[j], delta, idx % cr));
            e.sort_unstable();
            return Some(e);
        }
        idx -= cl * cr;
    }
    None
}

pub fn fastpath_patterns(profile: &LocalityProfile) -> Vec<Vec<usize>> {
    let delta = profile.delta();
    let sets = profile.partition();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        out.extend(s.iter().copied().combinations(delta + 1));
    }
    for (i, j) in (0..sets.len()).tuple_combinations() {
        let left: Vec<Vec<usize>> = sets[i].iter().copied().combinations(delta).collect();
        let right: Vec<Vec<usize>> = sets[j].iter().copied().combinations(delta).collect();
        for l in &left {
            for r in &right {
                let mut e = l.clone();
                e.extend_from_slice(r);
                e.sort_unstable();
                out.push(e);
            }
        }
    }
    out
}

fn by_fastpath(code: &LinearCode, profile: &LocalityProfile, h: usize) -> Result<MrVerdict> {
    if h != 2 {
        return Err(Error::ModeUnsupported("fastpath".into()));
    }
    let count = fastpath_pattern_count(profile);
    if count > FASTPATH_LIMIT {
        return Err(Error::TooLarge(format!(
            "{count} fastpath patterns exceed the limit {FASTPATH_LIMIT}"
        )));
    }
    let patterns = fastpath_patterns(profile);
    let hm = code.parity();
    let witness = patterns
        .par_iter()
        .filter(|e| hm.rank_of_columns(e) < e.len())
        .min()
        .cloned();
    Ok(MrVerdict {
        mr: witness.is_none(),
        mode: MrMode::Fastpath,
        checked: patterns.len() as u64,
        witness,
        runtime_ms: 0,
        calibrated: false,
        agreement: None,
    })
}

/// True iff the erasure pattern is recoverable: `rank(H|_E) = |E|`.
pub fn mr_erasure_correctable(
    code: &LinearCode,
    profile: &LocalityProfile,
    pattern: &[usize],
) -> Result<bool> {
    if !profile.is_verified() {
        return Err(Error::UnverifiedProfile);
    }
    let mut e = pattern.to_vec();
    e.sort_unstable();
    e.dedup();
    if let Some(&index) = e.iter().find(|&&i| i >= code.n()) {
        return Err(Error::CoordinateOutOfRange { index, n: code.n() });
    }
    Ok(code.parity().rank_of_columns(&e) == e.len())
}

/// The `2δ × 2δ` matrix pairing `δ` columns of group `i1` (slabs `t1`) with
/// `δ` columns of group `i2` (slabs `t2`) in the cyclic family's parity
/// matrix; returns whether it has full rank.
pub fn full_rank_cert(
    params: &MrParams,
    t1: &[usize],
    t2: &[usize],
    i1: usize,
    i2: usize,
) -> Result<bool> {
    Ok(full_rank_matrix(params, t1, t2, i1, i2)?.rank() == 2 * params.delta as usize)
}

pub fn full_rank_matrix(
    params: &MrParams,
    t1: &[usize],
    t2: &[usize],
    i1: usize,
    i2: usize,
) -> Result<Matrix> {
    params.check_construction1()?;
    let (a, m, delta) = (
        params.a() as usize,
        params.m() as usize,
        params.delta as usize,
    );
    for t in [t1, t2] {
        let distinct = t.iter().all_unique();
        if t.len() != delta || !distinct || t.iter().any(|&x| x >= a) {
            return Err(Error::BadIndex(format!(
                "{t:?} is not a {delta}-subset of [0, {a})"
            )));
        }
    }
    if i1 == i2 || i1 >= m || i2 >= m {
        return Err(Error::BadIndex(format!(
            "group indices must be distinct and below m = {m}, got {i1} and {i2}"
        )));
    }
    let field = params.field()?;
    let beta = field.alpha_pow(m as i64);
    let gamma = field.alpha_pow(delta as i64);
    let size = 2 * delta;
    let mut rows = vec![vec![0u32; size]; size];
    for p in 1..delta {
        for (c, &t) in t1.iter().enumerate() {
            rows[p - 1][c] = field.pow(beta, (p * t) as i64)?;
        }
        for (c, &t) in t2.iter().enumerate() {
            rows[delta - 1 + p - 1][delta + c] = field.pow(beta, (p * t) as i64)?;
        }
    }
    rows[size - 2] = vec![1; size];
    for (c, &t) in t1.iter().enumerate() {
        rows[size - 1][c] = field.pow(gamma, (t * m + i1) as i64)?;
    }
    for (c, &t) in t2.iter().enumerate() {
        rows[size - 1][delta + c] = field.pow(gamma, (t * m + i2) as i64)?;
    }
    Matrix::from_rows(&field, size, &rows)
}

/// Arguments `(t1, t2, i1, i2)` of one [`full_rank_cert`] call.
pub type CertArgs = (Vec<usize>, Vec<usize>, usize, usize);

/// Evaluates [`full_rank_cert`] on every admissible argument tuple
/// (ordered pairs of groups); returns the count and any failures.
pub fn all_full_rank_certs(params: &MrParams) -> Result<(u64, Vec<CertArgs>)> {
    params.check_construction1()?;
    let (a, m, delta) = (
        params.a() as usize,
        params.m() as usize,
        params.delta as usize,
    );
    let subsets: Vec<Vec<usize>> = (0..a).combinations(delta).collect();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let count = subsets.len();
    let tuples: Vec<(usize, usize, usize)> = pairs
        .iter()
        .flat_map(|&(i1, i2)| {
            (0..count).flat_map(move |x| (0..count).map(move |y| (x, y, i1 * m + i2)))
        })
        .collect();
    let failures: Vec<_> = tuples
        .par_iter()
        .filter_map(|&(x, y, ij)| {
            let (i1, i2) = (ij / m, ij % m);
            match full_rank_cert(params, &subsets[x], &subsets[y], i1, i2) {
                Ok(true) => None,
                _ => Some((subsets[x].clone(), subsets[y].clone(), i1, i2)),
            }
        })
        .collect();
    Ok((tuples.len() as u64, failures))
}
