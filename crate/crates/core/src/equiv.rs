//! Coordinate permutations that can turn a code cyclic.
//!
//! Two permutation families act on `Z_n`:
//! multipliers `x -> t*x mod n` with `t` a unit, and the block maps
//! `x*m + i -> (x*m*t_i + z_i) mod n` (with `n = a*m`), which send the coset
//! `{i + x*m}` onto the coset of `z_i mod m`. A permutation `l` acts on a
//! code by reading coordinate `j` of the new codeword from position `l(j)`
//! of the old one.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::matrix::dot;
use crate::mr::MrParams;

/// Default cap on the number of block maps enumerated by [`brute_force_psi_search`].
pub const PSI_SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PermSpec {
    Multiplier {
        n: usize,
        t: u64,
    },
    Psi {
        n: usize,
        a: usize,
        t: Vec<u64>,
        z: Vec<u64>,
    },
}

pub fn make_multiplier(n: usize, t: u64) -> Result<PermSpec> {
    if n == 0 || arith::gcd(t, n as u64) != 1 {
        return Err(Error::NotUnit {
            t,
            modulus: n as u64,
        });
    }
    Ok(PermSpec::Multiplier { n, t })
}

pub fn make_psi(n: usize, a: usize, t: Vec<u64>, z: Vec<u64>) -> Result<PermSpec> {
    if a == 0 || !n.is_multiple_of(a) {
        return Err(Error::ParamViolation(format!(
            "a = {a} does not divide n = {n}"
        )));
    }
    let m = n / a;
    if t.len() != m || z.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "t and z need m = {m} entries, got {} and {}",
            t.len(),
            z.len()
        )));
    }
    if let Some(&bad) = t.iter().find(|&&ti| arith::gcd(ti, a as u64) != 1) {
        return Err(Error::NotUnit {
            t: bad,
            modulus: a as u64,
        });
    }
    if !z.iter().map(|&zi| zi % m as u64).all_unique() {
        return Err(Error::NotResiduePermutation);
    }
    let perm = PermSpec::Psi { n, a, t, z };
    debug_assert!(is_bijection(&perm.map()));
    Ok(perm)
}

impl PermSpec {
    pub fn n(&self) -> usize {
        match self {
            PermSpec::Multiplier { n, .. } | PermSpec::Psi { n, .. } => *n,
        }
    }

    pub fn apply(&self, j: usize) -> usize {
        match self {
            PermSpec::Multiplier { n, t } => ((j as u128 * *t as u128) % *n as u128) as usize,
            PermSpec::Psi { n, a, t, z } => {
                let m = n / a;
                let (x, i) = (j / m, j % m);
                let v = x as u128 * m as u128 * t[i] as u128 + z[i] as u128;
                (v % *n as u128) as usize
            }
        }
    }

    /// The images `l(0), ..., l(n-1)`.
    pub fn map(&self) -> Vec<usize> {
        (0..self.n()).map(|j| self.apply(j)).collect()
    }
}

pub fn is_bijection(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&v| v < map.len() && !std::mem::replace(&mut seen[v], true))
}

pub fn inverse_map(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (j, &v) in map.iter().enumerate() {
        inv[v] = j;
    }
    inv
}

/// The code `{(c_{l(0)}, ..., c_{l(n-1)}) : c in C}`.
pub fn apply_perm(code: &LinearCode, perm: &PermSpec) -> Result<LinearCode> {
    apply_map(code, &perm.map())
}

/// [`apply_perm`] for an explicit image list.
pub fn apply_map(code: &LinearCode, map: &[usize]) -> Result<LinearCode> {
    if map.len() != code.n() {
        return Err(Error::LengthMismatch {
            perm: map.len(),
            code: code.n(),
        });
    }
    if !is_bijection(map) {
        return Err(Error::ParamViolation("map is not a permutation".into()));
    }
    let h = code.parity().select_columns(map)?;
    Ok(LinearCode::from_parity(&h).with_meta(code.meta().clone()))
}

/// Cyclicity of the permuted code without rebuilding it.
pub fn is_cyclic_under(code: &LinearCode, map: &[usize]) -> bool {
    let n = code.n();
    let f = code.field();
    let h = code.parity();
    let g = code.generator();
    let h_rows: Vec<Vec<u32>> = (0..h.rows())
        .map(|r| map.iter().map(|&c| h.get(r, c)).collect())
        .collect();
    let mut shifted = vec![0u32; n];
    (0..g.rows()).all(|r| {
        for j in 0..n {
            shifted[j] = g.get(r, map[(j + n - 1) % n]);
        }
        h_rows.iter().all(|hr| dot(f, hr, &shifted) == 0)
    })
}

/// The explicit block map that makes the quasi-cyclic family cyclic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cyclifier {
    pub tau: u64,
    pub perm: PermSpec,
}

/// For `r >= 3`: `None` when `gcd(m, a / gcd(a, delta)) != 1`. Otherwise,
/// provided `lambda^m = 1`, the block map with `t = (1, ..., 1)`,
/// `z_i = i + m*tau*i` and `tau` the smallest solution in `[0, a)` of
/// `delta*m*tau = delta (mod a)`, which makes the code cyclic.
///
/// When `lambda^m != 1` the permuted row `lambda^(c mod m)` is not
/// shift-invariant and this returns `HypothesisViolation`; at `(q, b, r, delta) =
/// (13, 1, 3, 2)` with `s = 1` no block map works at all.
pub fn cyclifying_perm(params: &MrParams) -> Result<Option<Cyclifier>> {
    params.check_construction2()?;
    if params.r < 3 {
        return Err(Error::HypothesisViolation(format!(
            "the block-map criterion needs r >= 3, got r = {}",
            params.r
        )));
    }
    let (n, a, m, delta) = (params.n(), params.a(), params.m(), params.delta);
    let g = arith::gcd(m, a / arith::gcd(a, delta));
    if g != 1 {
        return Ok(None);
    }
    if !params.lambda_has_order_dividing_m() {
        return Err(Error::HypothesisViolation(format!(
            "the block-map criterion needs lambda^m = 1, i.e. a = {} dividing s = {}",
            params.a(),
            params.s
        )));
    }
    let tau = (0..a)
        .find(|&tau| (delta * m % a) * tau % a == delta % a)
        .expect("a solution exists when the gcd condition holds");
    let z = (0..m).map(|i| i + m * tau * i).collect();
    let perm = make_psi(n as usize, a as usize, vec![1; m as usize], z)?;
    Ok(Some(Cyclifier { tau, perm }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NecessaryOutcome {
    /// All hypotheses hold and `gcd(m, a)` does not divide `delta`.
    NotPermutable,
    /// All hypotheses hold but the divisibility condition is met, so no
    /// conclusion can be drawn.
    PermutableMaybe,
    /// At least one hypothesis fails; see `failing`.
    HypothesesUnmet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NecessaryVerdict {
    pub outcome: NecessaryOutcome,
    pub n: u64,
    pub k: u64,
    pub a: u64,
    pub m: u64,
    pub u: u64,
    pub v: u64,
    pub gcd_m_a: u64,
    pub gcd_divides_delta: bool,
    pub failing: Vec<String>,
    pub advisory: Vec<String>,
}

/// Checks every hypothesis of the necessary condition for some
/// permutation of the quasi-cyclic family to be cyclic (`gcd(m, a) | delta`),
/// and reports each failure by name.
pub fn necessary_verdict(params: &MrParams) -> NecessaryVerdict {
    let (n, a, m, r, delta, q) = (
        params.n(),
        params.a(),
        params.m(),
        params.r,
        params.delta,
        params.q,
    );
    let k = params.k();
    let (u, v) = arith::split_positive_remainder(k, r);
    let mut failing = Vec::new();

    if u < 2 * (r - v + 1) {
        failing.push(format!(
            "u-condition: k = {k} = {u}*{r} + {v} gives u = {u} < 2(r - v + 1) = {}",
            2 * (r - v + 1)
        ));
    }
    let phi = arith::euler_phi(a);
    let g_phi = arith::gcd(a, phi);
    if a != 4 && g_phi != 1 {
        failing.push(format!(
            "a-condition: a = {a} is not 4 and gcd({a},phi({a}))={g_phi} != 1"
        ));
    }
    let b_prime = (1..=params.b).find(|&bp| {
        arith::checked_pow(q, bp).is_some_and(|p| p - 1 == a) && params.b.is_multiple_of(bp)
    });
    if b_prime.is_none() {
        failing.push(format!(
            "subfield-condition: a = {a} is not of the form q^b' - 1 dividing n = {n} (q = {q})"
        ));
    }
    if !tau_case_holds(r, delta) {
        failing.push(format!(
            "case-condition: (delta, r) = ({delta}, {r}) is none of (delta >= 4, r >= 5), (delta = 3, r >= 4), (delta = 2, r >= 3 odd)"
        ));
    }

    let gcd_m_a = arith::gcd(m, a);
    let divides = delta % gcd_m_a == 0;
    let relation = if divides {
        format!("gcd(m,a)={gcd_m_a} divides delta={delta}")
    } else {
        format!("gcd(m,a)={gcd_m_a} does not divide delta={delta}")
    };
    let mut advisory = vec![relation];
    let outcome = if !failing.is_empty() {
        if !divides {
            advisory.push(
                "the divisibility condition fails, but the hypotheses needed to conclude non-permutability do not all hold"
                    .into(),
            );
        }
        NecessaryOutcome::HypothesesUnmet
    } else if divides {
        NecessaryOutcome::PermutableMaybe
    } else {
        NecessaryOutcome::NotPermutable
    };

    NecessaryVerdict {
        outcome,
        n,
        k,
        a,
        m,
        u,
        v,
        gcd_m_a,
        gcd_divides_delta: divides,
        failing,
        advisory,
    }
}

fn tau_case_holds(r: u64, delta: u64) -> bool {
    (delta >= 4 && r >= 5) || (delta == 3 && r >= 4) || (delta == 2 && r >= 3 && r % 2 == 1)
}

fn multiples(tau: u64, count: u64, a: u64) -> Vec<u64> {
    (1..=count).map(|i| i * tau % a).collect()
}

/// For `a = r + delta - 1` and units `tau, tau'`: true unless
/// `{i*tau : 1 <= i < delta}` is contained in `{i*tau' : 1 <= i <= delta}`
/// (mod `a`) while `tau != tau'`.
pub fn prop_tau_oracle(a: u64, r: u64, delta: u64, tau: u64, tau_prime: u64) -> Result<bool> {
    if a != r + delta - 1 {
        return Err(Error::ParamViolation(format!("a = {a} != r + delta - 1")));
    }
    for t in [tau, tau_prime] {
        if arith::gcd(t, a) != 1 {
            return Err(Error::NotUnit { t, modulus: a });
        }
    }
    if !tau_case_holds(r, delta) {
        return Err(Error::CaseViolation(format!("(delta, r) = ({delta}, {r})")));
    }
    Ok(tau_implication(a, delta, tau, tau_prime))
}

fn tau_implication(a: u64, delta: u64, tau: u64, tau_prime: u64) -> bool {
    let small = multiples(tau, delta - 1, a);
    let big = multiples(tau_prime, delta, a);
    let contained = small.iter().all(|x| big.contains(x));
    !contained || tau % a == tau_prime % a
}

/// Pairs `(tau, tau')` of units mod `a = r + delta - 1` where containment
/// holds but `tau != tau'`; no case restriction is applied.
pub fn tau_counterexamples(r: u64, delta: u64) -> Vec<(u64, u64)> {
    let a = r + delta - 1;
    let units = arith::units(a);
    units
        .iter()
        .flat_map(|&t| units.iter().map(move |&tp| (t, tp)))
        .filter(|&(t, tp)| !tau_implication(a, delta, t, tp))
        .collect()
}

/// Outcome of an exhaustive search over all block maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiSearch {
    pub space: u64,
    /// Lexicographically first map (ordered by `t`, then `z`) that makes the
    /// code cyclic.
    pub found: Option<PermSpec>,
}

/// Size of the block-map family: `phi(a)^m * m! * a^m`.
pub fn psi_space_size(n: usize, a: usize) -> Option<u64> {
    if a == 0 || !n.is_multiple_of(a) {
        return None;
    }
    let m = (n / a) as u32;
    let phi = arith::euler_phi(a as u64);
    let fact = (1..=m as u64).try_fold(1u64, |acc, x| acc.checked_mul(x))?;
    phi.checked_pow(m)?
        .checked_mul(fact)?
        .checked_mul((a as u64).checked_pow(m)?)
}

/// Enumerates every block map with group size `a` and returns the first
/// that makes `code` cyclic.
pub fn brute_force_psi_search(
    code: &LinearCode,
    a: usize,
    limit: Option<u64>,
) -> Result<PsiSearch> {
    let n = code.n();
    let limit = limit.unwrap_or(PSI_SEARCH_LIMIT);
    let space = psi_space_size(n, a)
        .ok_or_else(|| Error::ParamViolation(format!("a = {a} does not divide n = {n}")))?;
    if space > limit {
        return Err(Error::TooLarge(format!(
            "block-map family has {space} members, limit is {limit}"
        )));
    }
    let m = n / a;
    let units = arith::units(a as u64);
    let t_vectors: Vec<Vec<u64>> = (0..m)
        .map(|_| units.iter().copied())
        .multi_cartesian_product()
        .collect();
    let t_vectors = if m == 0 { vec![vec![]] } else { t_vectors };
    let mut z_vectors: Vec<Vec<u64>> = Vec::new();
    for sigma in (0..m as u64).permutations(m) {
        for lifts in (0..m).map(|_| 0..a as u64).multi_cartesian_product() {
            z_vectors.push(
                sigma
                    .iter()
                    .zip(&lifts)
                    .map(|(&s, &y)| s + m as u64 * y)
                    .collect(),
            );
        }
    }
    z_vectors.sort();
    let zc = z_vectors.len();
    let found = (0..t_vectors.len() * zc)
        .into_par_iter()
        .find_map_first(|idx| {
            let perm = PermSpec::Psi {
                n,
                a,
                t: t_vectors[idx / zc].clone(),
                z: z_vectors[idx % zc].clone(),
            };
            is_cyclic_under(code, &perm.map()).then_some(perm)
        });
    Ok(PsiSearch { space, found })
}

/// All multipliers of `Z_n`.
pub fn multipliers(n: usize) -> Vec<PermSpec> {
    arith::units(n as u64)
        .into_iter()
        .filter(|&t| (t as usize) < n || n == 1)
        .map(|t| PermSpec::Multiplier { n, t })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::RootSet;
    use crate::gf::Field;
    use crate::matrix::row_space_equal;
    use crate::mr::{build_construction1, build_construction2};

    fn p12() -> MrParams {
        MrParams::new(13, 1, 3, 2)
    }

    #[test]
    fn multiplier_maps() {
        let id = make_multiplier(15, 1).unwrap();
        assert_eq!(id.map(), (0..15).collect::<Vec<_>>());
        let two = make_multiplier(15, 2).unwrap();
        assert_eq!((two.apply(0), two.apply(1), two.apply(7)), (0, 2, 14));
        assert_eq!(
            make_multiplier(15, 3),
            Err(Error::NotUnit { t: 3, modulus: 15 })
        );
        assert_eq!(multipliers(15).len(), 8);
    }

    #[test]
    fn block_maps() {
        let id = make_psi(12, 4, vec![1; 3], vec![0, 1, 2]).unwrap();
        assert_eq!(id.map(), (0..12).collect::<Vec<_>>());
        let p = make_psi(12, 4, vec![1; 3], vec![0, 4, 8]).unwrap();
        let map = p.map();
        assert!(is_bijection(&map));
        // coordinate x*3 + i goes to 3x + 4i mod 12: every coset is kept
        for j in 0..12 {
            assert_eq!(map[j] % 3, j % 3);
            assert_eq!(map[j], (3 * (j / 3) + 4 * (j % 3)) % 12);
        }
        assert_eq!(
            make_psi(12, 4, vec![1; 3], vec![0, 0, 3]),
            Err(Error::NotResiduePermutation)
        );
        assert_eq!(
            make_psi(12, 4, vec![1, 2, 1], vec![0, 1, 2]),
            Err(Error::NotUnit { t: 2, modulus: 4 })
        );
    }

    #[test]
    fn applying_and_undoing() {
        let c = build_construction2(&p12()).unwrap();
        let p = make_psi(12, 4, vec![3, 1, 3], vec![5, 0, 10]).unwrap();
        let map = p.map();
        let there = apply_map(&c, &map).unwrap();
        let back = apply_map(&there, &inverse_map(&map)).unwrap();
        assert!(row_space_equal(back.parity(), c.parity()).unwrap());
        let same = apply_perm(&c, &make_psi(12, 4, vec![1; 3], vec![0, 1, 2]).unwrap()).unwrap();
        assert!(row_space_equal(same.parity(), c.parity()).unwrap());
        assert_eq!(
            there.min_distance(None).unwrap(),
            c.min_distance(None).unwrap()
        );
        assert!(matches!(
            apply_perm(&c, &make_multiplier(15, 2).unwrap()),
            Err(Error::LengthMismatch { perm: 15, code: 12 })
        ));
    }

    #[test]
    fn cyclifying_small_instance() {
        let c = build_construction2(&p12()).unwrap();
        assert!(!c.is_cyclic());
        let cy = cyclifying_perm(&p12()).unwrap().unwrap();
        assert_eq!(cy.tau, 1);
        match &cy.perm {
            PermSpec::Psi { t, z, .. } => {
                assert_eq!(t, &vec![1, 1, 1]);
                assert_eq!(z, &vec![0, 4, 8]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let permuted = apply_perm(&c, &cy.perm).unwrap();
        assert!(permuted.is_cyclic());
        assert!(is_cyclic_under(&c, &cy.perm.map()));
        assert!(matches!(
            cyclifying_perm(&MrParams::new(4, 2, 2, 2)),
            Err(Error::HypothesisViolation(_))
        ));
        assert_eq!(cyclifying_perm(&MrParams::new(3, 4, 6, 3)).unwrap(), None);

        // lambda of full order: the criterion does not apply, and no block map works
        let full = p12().with_s(1);
        assert!(matches!(
            cyclifying_perm(&full),
            Err(Error::HypothesisViolation(_))
        ));
        let c = build_construction2(&full).unwrap();
        assert_eq!(brute_force_psi_search(&c, 4, None).unwrap().found, None);
    }

    #[test]
    fn necessary_conditions() {
        let v = necessary_verdict(&p12());
        assert_eq!(v.outcome, NecessaryOutcome::HypothesesUnmet);
        assert_eq!((v.u, v.v), (2, 1));
        assert!(v.failing.iter().any(|f| f.starts_with("u-condition")));
        assert!(!v.failing.iter().any(|f| f.starts_with("a-condition")));
        assert!(!v.failing.iter().any(|f| f.starts_with("case-condition")));

        let v = necessary_verdict(&MrParams::new(3, 4, 6, 3));
        assert_eq!(v.outcome, NecessaryOutcome::HypothesesUnmet);
        assert!(v
            .advisory
            .iter()
            .any(|s| s.contains("gcd(m,a)=2 does not divide delta=3")));
        assert!(v.failing.iter().any(|s| s.contains("gcd(8,phi(8))=4 != 1")));
        assert!(!v
            .failing
            .iter()
            .any(|f| f.starts_with("subfield-condition")));
    }

    #[test]
    fn tau_proposition_exhaustive() {
        for a in 3..=60u64 {
            for delta in 2..a {
                let r = a + 1 - delta;
                if !tau_case_holds(r, delta) {
                    continue;
                }
                for t in arith::units(a) {
                    for tp in arith::units(a) {
                        assert!(
                            prop_tau_oracle(a, r, delta, t, tp).unwrap(),
                            "a={a} delta={delta} {t} {tp}"
                        );
                    }
                }
            }
        }
        assert!(prop_tau_oracle(8, 6, 3, 3, 3).unwrap());
        assert!(matches!(
            prop_tau_oracle(5, 4, 2, 1, 2),
            Err(Error::CaseViolation(_))
        ));
        // delta = 2 with r even: containment {tau} in {tau', 2 tau'} with tau = 2 tau'
        assert!(tau_counterexamples(4, 2).contains(&(2, 1)));
    }

    #[test]
    fn exhaustive_block_map_search() {
        let c = build_construction2(&p12()).unwrap();
        let s = brute_force_psi_search(&c, 4, None).unwrap();
        assert_eq!(s.space, 3072);
        let found = s.found.unwrap();
        assert!(apply_perm(&c, &found).unwrap().is_cyclic());

        let c1 = build_construction1(&MrParams::new(4, 2, 2, 2)).unwrap();
        let s = brute_force_psi_search(&c1, 3, Some(10_000_000)).unwrap();
        assert_eq!(
            s.found.unwrap(),
            make_psi(15, 3, vec![1; 5], vec![0, 1, 2, 3, 4]).unwrap()
        );

        // n = 8, a = 4, m = 2: gcd(2, 4/gcd(4,2)) = 2, so no block map works
        let p = MrParams::new(9, 1, 3, 2);
        assert_eq!(cyclifying_perm(&p).unwrap(), None);
        let c = build_construction2(&p).unwrap();
        let s = brute_force_psi_search(&c, 4, None).unwrap();
        assert_eq!(s.space, 128);
        assert_eq!(s.found, None);
        assert!(matches!(
            brute_force_psi_search(&c, 4, Some(10)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn multipliers_explain_cyclic_images_at_length_five() {
        // gcd(5, phi(5)) = 1: every permutation keeping a cyclic code cyclic
        // agrees with some multiplier on that code
        let f = Field::of_order(16).unwrap();
        for mask in 0u32..32 {
            let roots = RootSet::new(5, (0..5).filter(|i| mask >> i & 1 == 1));
            let code = LinearCode::from_roots(&f, &roots).unwrap();
            let images: Vec<LinearCode> = multipliers(5)
                .iter()
                .map(|p| apply_perm(&code, p).unwrap())
                .collect();
            for perm in (0..5usize).permutations(5) {
                if !is_cyclic_under(&code, &perm) {
                    continue;
                }
                let permuted = apply_map(&code, &perm).unwrap();
                assert!(images
                    .iter()
                    .any(|img| row_space_equal(img.parity(), permuted.parity()).unwrap()));
            }
        }
    }
}
