//! Reproduction runs for the acceptance criteria, plus the shared corpus of
//! small codes used by the oracle-equivalence checks.

use std::time::Instant;

use serde::Serialize;

use crate::bounds;
use crate::code::{LinearCode, RootSet};
use crate::equiv::{self, NecessaryOutcome, PermSpec};
use crate::error::Result;
use crate::gf::Field;
use crate::locality::{self, lrc_singleton_bound};
use crate::matrix::row_space_equal;
use crate::mr::{self, MrMode, MrParams, MrVerifier};

pub const CRITERIA: usize = 11;

/// Seed for the sampled check of the length-80 instance.
pub const SAMPLE_SEED: u64 = 0x5eed;
pub const SAMPLE_COUNT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    pub details: Vec<String>,
    pub runtime_ms: u64,
}

/// The two small cyclic instances: lengths 15 and 12.
pub fn instance1() -> MrParams {
    MrParams::new(4, 2, 2, 2)
}

pub fn instance2() -> MrParams {
    MrParams::new(13, 1, 3, 2)
}

/// The length-80 instance over GF(81).
pub fn instance80() -> MrParams {
    MrParams::new(3, 4, 6, 3)
}

/// A named code, with the MR parameters it was built from when it has them.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub code: LinearCode,
    pub params: Option<MrParams>,
}

/// Small codes used for cross-checks: both families at every desk-scale
/// parameter set used elsewhere, the permuted quasi-cyclic code, and every
/// cyclic code of lengths 3, 5 and 7 over GF(4), GF(16) and GF(8).
pub fn corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let family = |p: MrParams, c1: bool| -> Result<CorpusEntry> {
        let code = if c1 {
            mr::build_construction1(&p)?
        } else {
            mr::build_construction2(&p)?
        };
        let name = format!(
            "{}(q={},b={},r={},delta={}{})",
            if c1 { "cyclic" } else { "quasi-cyclic" },
            p.q,
            p.b,
            p.r,
            p.delta,
            if c1 {
                String::new()
            } else {
                format!(",s={}", p.s)
            }
        );
        Ok(CorpusEntry {
            name,
            code,
            params: Some(p),
        })
    };
    out.push(family(instance1(), true)?);
    out.push(family(instance2(), true)?);
    out.push(family(MrParams::new(16, 1, 2, 2), true)?);
    out.push(family(instance1(), false)?);
    out.push(family(instance2(), false)?);
    out.push(family(instance2().with_s(1), false)?);
    out.push(family(MrParams::new(9, 1, 3, 2), false)?);
    out.push(family(MrParams::new(16, 1, 3, 3), false)?);
    if let Some(cy) = equiv::cyclifying_perm(&instance2())? {
        let base = mr::build_construction2(&instance2())?;
        out.push(CorpusEntry {
            name: "quasi-cyclic(q=13,b=1,r=3,delta=2) permuted".into(),
            code: equiv::apply_perm(&base, &cy.perm)?,
            params: None,
        });
    }
    for (q, n) in [(4u64, 3usize), (16, 5), (8, 7)] {
        let field = Field::of_order(q)?;
        for mask in 1u32..(1 << n) - 1 {
            let roots = RootSet::new(n, (0..n as i64).filter(|&i| mask >> i & 1 == 1));
            out.push(CorpusEntry {
                name: format!(
                    "cyclic length {n} over GF({q}), roots {:?}",
                    roots.exponents()
                ),
                code: LinearCode::from_roots(&field, &roots)?,
                params: None,
            });
        }
    }
    Ok(out)
}

/// Codeword enumeration is used only when `q^k <= 2^20`.
pub fn enumerable(code: &LinearCode) -> bool {
    (code.k() as f64) * (code.field().q() as f64).log2() <= 20.0 + 1e-9
}

struct Log {
    pass: bool,
    details: Vec<String>,
}

impl Log {
    fn new() -> Log {
        Log {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.pass &= ok;
        self.details
            .push(format!("[{}] {what}", if ok { "ok" } else { "FAIL" }));
    }
}

pub fn run(id: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut log = Log::new();
    let title = match id {
        1 => criterion1(&mut log)?,
        2 => criterion2(&mut log)?,
        3 => criterion3(&mut log)?,
        4 => criterion4(&mut log)?,
        5 => criterion5(&mut log)?,
        6 => criterion6(&mut log)?,
        7 => criterion7(&mut log)?,
        8 => criterion8(&mut log),
        9 => criterion9(&mut log)?,
        10 => criterion10(&mut log)?,
        11 => criterion11(&mut log)?,
        other => {
            return Err(crate::error::Error::BadIndex(format!(
                "criterion {other} (valid: 1..={CRITERIA})"
            )))
        }
    };
    Ok(CriterionResult {
        id,
        title: title.into(),
        pass: log.pass,
        details: log.details,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn run_all() -> Result<Vec<CriterionResult>> {
    (1..=CRITERIA).map(run).collect()
}

fn cyclic_mr_instance(
    log: &mut Log,
    p: &MrParams,
    nkd: (usize, usize, usize),
    selections: u64,
) -> Result<()> {
    let code = mr::build_construction1(p)?;
    let d = code.min_distance(None)?.exact();
    log.check(
        (code.n(), code.k(), d) == (nkd.0, nkd.1, Some(nkd.2)),
        format!(
            "[n,k,d] = [{},{},{:?}] over GF({})",
            code.n(),
            code.k(),
            d,
            code.field().q()
        ),
    );
    log.check(code.is_cyclic(), "closed under cyclic shift");
    let profile = p.profile(&code);
    let bound = lrc_singleton_bound(code.n(), code.k(), p.r as usize, p.delta as usize);
    log.check(
        profile.is_verified() && d.map(|d| d as i64) == Some(bound),
        format!("optimal LRC: d meets the Singleton-type bound {bound}"),
    );
    let v = mr::verify_mr(&code, &profile, 2, MrMode::Definition)?;
    log.check(
        v.mr && v.checked == selections,
        format!(
            "MR by definition over {} keep-selections (expected {selections})",
            v.checked
        ),
    );
    Ok(())
}

fn criterion1(log: &mut Log) -> Result<&'static str> {
    cyclic_mr_instance(log, &instance1(), (15, 8, 5), 243)?;
    Ok("cyclic MR code (15,2,2,2,16)")
}

fn criterion2(log: &mut Log) -> Result<&'static str> {
    let p = instance2();
    cyclic_mr_instance(log, &p, (12, 7, 4), 4u64.pow(3))?;
    Ok("cyclic MR code (12,3,2,2,13), d = delta + 2")
}

fn criterion3(log: &mut Log) -> Result<&'static str> {
    for p in [instance1(), instance2()] {
        let explicit = mr::construction1_parity(&p)?;
        let code = mr::build_construction1(&p)?;
        log.check(
            row_space_equal(&explicit, code.parity())?,
            format!(
                "explicit parity rows span the root-set code at n = {}",
                p.n()
            ),
        );
    }
    Ok("explicit parity-check matrix equals the root-set description")
}

fn criterion4(log: &mut Log) -> Result<&'static str> {
    for (p, expected) in [(instance1(), 180), (instance2(), 216)] {
        let (count, failures) = mr::all_full_rank_certs(&p)?;
        log.check(
            count == expected && failures.is_empty(),
            format!(
                "{count} certificate matrices at n = {} (expected {expected}), {} rank-deficient",
                p.n(),
                failures.len()
            ),
        );
    }
    Ok("full-rank certificates")
}

fn criterion5(log: &mut Log) -> Result<&'static str> {
    for ((n, k, r, d), expected) in [((16, 6, 2, 3), 16), ((63, 40, 2, 2), 64), ((9, 4, 2, 2), 8)] {
        let got = bounds::field_bound_new(n, k, r, d).value();
        log.check(
            got == Some(expected),
            format!(
                "field bound for (n,k,r,delta) = ({n},{k},{r},{d}) is {got:?}, expected {expected}"
            ),
        );
    }
    for x in [15, 62, 63] {
        log.check(
            !bounds::is_prime_power(x)?.is_prime_power(),
            format!("{x} is not a prime power"),
        );
    }
    Ok("field-size bound reproductions")
}

fn criterion6(log: &mut Log) -> Result<&'static str> {
    let p = instance1();
    let floor = bounds::mr_field_floor_r2(p.n());
    let q = p.q.pow(p.b);
    log.check(
        floor == 14 && floor <= q,
        format!("n = 15: q >= n - 1 = {floor}, and q = {q}"),
    );
    let floor9 = bounds::mr_field_floor_r2(9);
    let bound9 = bounds::field_bound_new(9, 4, 2, 2).value();
    log.check(
        floor9 == 8 && bound9 == Some(8),
        format!("[9,4,5] over GF(8): n - 1 = {floor9} and field bound {bound9:?} both equal q = 8"),
    );
    Ok("q >= n - 1 for r = 2")
}

fn criterion7(log: &mut Log) -> Result<&'static str> {
    let p = instance2();
    let code = mr::build_construction2(&p)?;
    log.check(
        !code.is_cyclic(),
        format!("quasi-cyclic code (s = {}) is not cyclic", p.s),
    );
    let cy = equiv::cyclifying_perm(&p)?;
    let z_ok = matches!(
        cy.as_ref().map(|c| (c.tau, &c.perm)),
        Some((1, PermSpec::Psi { t, z, .. })) if t == &[1, 1, 1] && z == &[0, 4, 8]
    );
    log.check(
        z_ok,
        format!("block map: {:?}", cy.as_ref().map(|c| (c.tau, &c.perm))),
    );
    if let Some(cy) = &cy {
        let permuted = equiv::apply_perm(&code, &cy.perm)?;
        log.check(permuted.is_cyclic(), "permuted code is cyclic");
    }
    let search = equiv::brute_force_psi_search(&code, p.a() as usize, None)?;
    log.check(
        search.space == 3072 && search.found.is_some() == cy.is_some(),
        format!(
            "exhaustive search over {} block maps finds one: {}",
            search.space,
            search.found.is_some()
        ),
    );
    Ok("block permutation makes the quasi-cyclic code cyclic")
}

fn criterion8(log: &mut Log) -> &'static str {
    let v = equiv::necessary_verdict(&instance80());
    let text = format!("{}\n{}", v.advisory.join("\n"), v.failing.join("\n"));
    log.check(
        text.contains("gcd(m,a)=2 does not divide delta=3"),
        "report states gcd(m,a)=2 does not divide delta=3",
    );
    log.check(
        text.contains("gcd(8,phi(8))=4 != 1"),
        "report flags gcd(8,phi(8))=4 != 1",
    );
    log.check(
        v.outcome == NecessaryOutcome::HypothesesUnmet,
        format!("outcome {:?}", v.outcome),
    );
    "necessary-condition report for (80,6,2,3,81)"
}

fn criterion9(log: &mut Log) -> Result<&'static str> {
    let verifier = MrVerifier::new();
    let mut mr_checked = 0;
    let mut dist_checked = 0;
    for entry in corpus()? {
        if let Some(p) = entry.params {
            let profile = p.profile(&entry.code);
            let v = verifier.verify(&entry.code, &profile, 2, MrMode::Both)?;
            mr_checked += 1;
            if v.agreement != Some(true) {
                log.check(
                    false,
                    format!("{}: fastpath and definition disagree", entry.name),
                );
            }
        }
        if enumerable(&entry.code) {
            let a = entry.code.min_distance_by_subsets(None)?;
            let b = entry.code.min_distance_by_codewords(None)?;
            dist_checked += 1;
            if a != b {
                log.check(false, format!("{}: distances {a:?} vs {b:?}", entry.name));
            }
        }
    }
    let code = mr::build_construction1(&instance1())?;
    let profile = instance1().profile(&code);
    let v = verifier.verify(&code, &profile, 2, MrMode::Both)?;
    log.check(
        v.agreement == Some(true),
        "instance 1: fastpath agrees with definition",
    );
    log.check(
        mr_checked > 0,
        format!("{mr_checked} MR family codes: fastpath agrees with definition"),
    );
    log.check(
        dist_checked > 0,
        format!("{dist_checked} codes with q^k <= 2^20: both distance oracles agree"),
    );
    Ok("oracle equivalence")
}

fn criterion10(log: &mut Log) -> Result<&'static str> {
    let p = instance1();
    let code = mr::build_construction1(&p)?;
    let report = locality::check_coset_structure(&code, p.r as usize, p.delta as usize)?;
    let cosets = locality::coset_partition(15, 3).expect("3 divides 15");
    log.check(
        report.all_dichotomy,
        format!(
            "{} repair sets satisfy the shift dichotomy",
            report.repair_set_count
        ),
    );
    log.check(
        report.all_cosets && report.maximal_sets == cosets,
        format!("maximal repair sets {:?}", report.maximal_sets),
    );
    Ok("repair sets of the cyclic code are cosets of <5>")
}

fn criterion11(log: &mut Log) -> Result<&'static str> {
    let p = instance80();
    log.check(
        (p.n(), p.a(), p.m(), p.k()) == (80, 8, 10, 58),
        format!("n = {}, a = {}, m = {}, k = {}", p.n(), p.a(), p.m(), p.k()),
    );
    let code = mr::build_construction1(&p)?;
    let profile = p.profile(&code);
    log.check(profile.is_verified(), "local groups are repair sets");
    let v = MrVerifier::new().verify_sampled(&code, &profile, SAMPLE_COUNT, SAMPLE_SEED)?;
    log.check(
        v.mr && v.checked == SAMPLE_COUNT as u64,
        format!("{} sampled fastpath patterns all correctable", v.checked),
    );
    let full = MrVerifier::new().verify(&code, &profile, 2, MrMode::Fastpath)?;
    log.check(
        full.mr && full.checked == 141_820,
        format!("all {} fastpath patterns correctable", full.checked),
    );
    let nv = equiv::necessary_verdict(&p);
    log.check(
        nv.gcd_m_a == 2 && !nv.gcd_divides_delta && (nv.u, nv.v) == (9, 4),
        format!("gcd(m,a) = {}, k = {}*6 + {}", nv.gcd_m_a, nv.u, nv.v),
    );
    Ok("length-80 instance: sampled fastpath and arithmetic")
}
