//! Acceptance suite. Each criterion is checked through direct library calls
//! and then cross-checked against the `repro` runner used by the CLI.
//! Runs without the libtest harness, so the per-criterion lines always print.

use std::time::Instant;

use lrcmr::bounds;
use lrcmr::equiv::{self, NecessaryOutcome, PermSpec};
use lrcmr::locality::{self, lrc_singleton_bound};
use lrcmr::matrix::row_space_equal;
use lrcmr::mr::{self, MrMode, MrParams, MrVerifier};
use lrcmr::repro;
use lrcmr::{Distance, LinearCode};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cyclic_instance(p: MrParams, n: usize, k: usize, d: usize, q: u32, selections: u64) -> Outcome {
    let code = mr::build_construction1(&p).map_err(|e| e.to_string())?;
    ensure(
        code.field().q() == q,
        format!("field size {}", code.field().q()),
    )?;
    ensure(
        (code.n(), code.k()) == (n, k),
        format!("[n,k] = [{},{}]", code.n(), code.k()),
    )?;
    let dist = code.min_distance(None).unwrap();
    ensure(dist == Distance::Exact(d), format!("distance {dist:?}"))?;
    ensure(code.is_cyclic(), "not cyclic")?;
    let profile = p.profile(&code);
    ensure(profile.is_verified(), "local groups are not repair sets")?;
    let bound = lrc_singleton_bound(n, k, p.r as usize, p.delta as usize);
    ensure(
        bound == d as i64,
        format!("Singleton-type bound {bound} != d"),
    )?;
    let v = mr::verify_mr(&code, &profile, 2, MrMode::Definition).unwrap();
    ensure(v.mr, format!("not MR, witness {:?}", v.witness))?;
    ensure(
        v.checked == selections,
        format!("{} keep-selections", v.checked),
    )?;
    Ok(format!(
        "[{n},{k},{d}]_{q}, cyclic, optimal LRC, MR over {selections} keep-selections"
    ))
}

fn criterion1() -> Outcome {
    // 3^5 ways to keep 2 of 3 coordinates in each of 5 groups
    cyclic_instance(MrParams::new(4, 2, 2, 2), 15, 8, 5, 16, 243)
}

fn criterion2() -> Outcome {
    // 4^3 ways to keep 3 of 4 coordinates in each of 3 groups; d = delta + 2
    cyclic_instance(MrParams::new(13, 1, 3, 2), 12, 7, 4, 13, 64)
}

fn criterion3() -> Outcome {
    for p in [MrParams::new(4, 2, 2, 2), MrParams::new(13, 1, 3, 2)] {
        let explicit = mr::construction1_parity(&p).unwrap();
        let roots = mr::build_construction1(&p).unwrap();
        ensure(
            row_space_equal(&explicit, roots.parity()).unwrap(),
            format!("row spaces differ at n = {}", p.n()),
        )?;
    }
    Ok("explicit H spans the root-set code on both instances".into())
}

fn criterion4() -> Outcome {
    let mut parts = Vec::new();
    for (p, expected) in [
        (MrParams::new(4, 2, 2, 2), 180),
        (MrParams::new(13, 1, 3, 2), 216),
    ] {
        let (count, failures) = mr::all_full_rank_certs(&p).unwrap();
        ensure(
            count == expected,
            format!("{count} certificates, expected {expected}"),
        )?;
        ensure(
            failures.is_empty(),
            format!("rank-deficient: {:?}", failures.first()),
        )?;
        parts.push(format!("{count}/{count}"));
    }
    Ok(format!("full rank: {}", parts.join(" and ")))
}

fn criterion5() -> Outcome {
    for ((n, k, r, d), q) in [((16, 6, 2, 3), 16), ((63, 40, 2, 2), 64), ((9, 4, 2, 2), 8)] {
        let got = bounds::field_bound_new(n, k, r, d).value();
        ensure(
            got == Some(q),
            format!("bound({n},{k},{r},{d}) = {got:?}, expected {q}"),
        )?;
        let v = bounds::optimal_field_size_verdict(n, k, r, d, q);
        ensure(
            v.verdict == bounds::Verdict::Optimal,
            format!("verdict {:?}", v.verdict),
        )?;
    }
    for x in [15, 62, 63] {
        ensure(
            !bounds::is_prime_power(x).unwrap().is_prime_power(),
            format!("{x} is a prime power"),
        )?;
    }
    Ok("bounds 16, 64, 8; 15, 62, 63 are not prime powers".into())
}

fn criterion6() -> Outcome {
    let floor = bounds::mr_field_floor_r2(15);
    ensure(floor == 14 && floor <= 16, format!("floor {floor}"))?;
    let floor9 = bounds::mr_field_floor_r2(9);
    ensure(floor9 == 8, format!("floor {floor9}"))?;
    Ok("14 <= 16 and 8 >= 8".into())
}

fn criterion7() -> Outcome {
    let p = MrParams::new(13, 1, 3, 2);
    let code = mr::build_construction2(&p).unwrap();
    ensure(!code.is_cyclic(), "quasi-cyclic code is already cyclic")?;
    let cy = equiv::cyclifying_perm(&p)
        .unwrap()
        .ok_or("no cyclifying permutation")?;
    ensure(cy.tau == 1, format!("tau = {}", cy.tau))?;
    let expected = PermSpec::Psi {
        n: 12,
        a: 4,
        t: vec![1, 1, 1],
        z: vec![0, 4, 8],
    };
    ensure(cy.perm == expected, format!("{:?}", cy.perm))?;
    let permuted = equiv::apply_perm(&code, &cy.perm).unwrap();
    ensure(permuted.is_cyclic(), "permuted code is not cyclic")?;
    let search = equiv::brute_force_psi_search(&code, 4, None).unwrap();
    ensure(
        search.space == 3072,
        format!("search space {}", search.space),
    )?;
    let found = search.found.ok_or("exhaustive search found nothing")?;
    ensure(
        equiv::apply_perm(&code, &found).unwrap().is_cyclic(),
        "search result does not cyclify",
    )?;
    Ok(format!(
        "tau = 1, z = (0,4,8), cyclic; search over 3072 finds {found:?}"
    ))
}

fn criterion8() -> Outcome {
    let v = equiv::necessary_verdict(&MrParams::new(3, 4, 6, 3));
    let all: Vec<&String> = v.advisory.iter().chain(&v.failing).collect();
    let has = |s: &str| all.iter().any(|line| line.contains(s));
    ensure(
        has("gcd(m,a)=2 does not divide delta=3"),
        "missing gcd(m,a) statement",
    )?;
    ensure(
        has("gcd(8,phi(8))=4 != 1"),
        "missing gcd(a,phi(a)) statement",
    )?;
    ensure(
        v.outcome == NecessaryOutcome::HypothesesUnmet,
        format!("{:?}", v.outcome),
    )?;
    Ok("report has gcd(m,a)=2 does not divide delta=3 and gcd(8,phi(8))=4 != 1".into())
}

fn criterion9() -> Outcome {
    let verifier = MrVerifier::new();
    let (mut mr_count, mut dist_count) = (0, 0);
    let corpus = repro::corpus().unwrap();
    for entry in &corpus {
        if let Some(p) = entry.params {
            let profile = p.profile(&entry.code);
            let def = verifier
                .verify(&entry.code, &profile, 2, MrMode::Definition)
                .unwrap();
            let fast = verifier
                .verify(&entry.code, &profile, 2, MrMode::Fastpath)
                .unwrap();
            ensure(
                def.mr == fast.mr,
                format!(
                    "{}: definition {} vs fastpath {}",
                    entry.name, def.mr, fast.mr
                ),
            )?;
            mr_count += 1;
        }
        let code: &LinearCode = &entry.code;
        let log_size = code.k() as f64 * (code.field().q() as f64).log2();
        if log_size <= 20.0 {
            let a = code.min_distance_by_subsets(None).unwrap();
            let b = code.min_distance_by_codewords(None).unwrap();
            ensure(a == b, format!("{}: {a:?} vs {b:?}", entry.name))?;
            dist_count += 1;
        }
    }
    ensure(
        mr_count >= 8 && dist_count >= 100,
        format!("{mr_count} / {dist_count} codes checked"),
    )?;
    Ok(format!(
        "fastpath = definition on {mr_count} MR-family codes; distance oracles agree on {dist_count} codes with q^k <= 2^20"
    ))
}

fn criterion10() -> Outcome {
    let code = mr::build_construction1(&MrParams::new(4, 2, 2, 2)).unwrap();
    let report = locality::check_coset_structure(&code, 2, 2).unwrap();
    ensure(
        report.all_dichotomy,
        format!("{:?}", report.counterexamples),
    )?;
    let cosets: Vec<Vec<usize>> = (0..5).map(|i| vec![i, i + 5, i + 10]).collect();
    ensure(
        report.maximal_sets == cosets,
        format!("{:?}", report.maximal_sets),
    )?;
    Ok(format!(
        "{} repair sets satisfy the dichotomy; maximal sets are <5> + i",
        report.repair_set_count
    ))
}

fn criterion11() -> Outcome {
    let p = MrParams::new(3, 4, 6, 3);
    ensure(
        (p.n(), p.k()) == (80, 58),
        format!("n = {}, k = {}", p.n(), p.k()),
    )?;
    let code = mr::build_construction1(&p).unwrap();
    ensure(
        code.field().q() == 81 && code.k() == 58,
        "field or dimension",
    )?;
    let profile = p.profile(&code);
    let v = MrVerifier::new()
        .verify_sampled(&code, &profile, 10_000, repro::SAMPLE_SEED)
        .unwrap();
    ensure(
        v.mr && v.checked == 10_000,
        format!("witness {:?}", v.witness),
    )?;
    // 10 * C(8,4) + C(10,2) * C(8,3)^2 patterns
    let full = mr::verify_mr(&code, &profile, 2, MrMode::Fastpath).unwrap();
    ensure(
        full.mr && full.checked == 10 * 70 + 45 * 56 * 56,
        format!("{} patterns, witness {:?}", full.checked, full.witness),
    )?;
    let nv = equiv::necessary_verdict(&p);
    ensure(
        nv.a == 8 && nv.m == 10 && nv.gcd_m_a == 2 && !nv.gcd_divides_delta,
        "arithmetic",
    )?;
    Ok(
        "10000 sampled and all 141820 fastpath patterns correctable; a = 8, m = 10, gcd(m,a) = 2"
            .into(),
    )
}

fn main() {
    let criteria: [fn() -> Outcome; 11] = [
        criterion1,
        criterion2,
        criterion3,
        criterion4,
        criterion5,
        criterion6,
        criterion7,
        criterion8,
        criterion9,
        criterion10,
        criterion11,
    ];
    let mut failed = Vec::new();
    for (i, check) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = check();
        let runner = repro::run(id).map(|r| r.pass).unwrap_or(false);
        let pass = outcome.is_ok() && runner;
        let msg = match &outcome {
            Ok(m) => m.clone(),
            Err(e) => e.clone(),
        };
        let runner_note = if runner {
            ""
        } else {
            " (repro runner disagrees)"
        };
        println!(
            "criterion {id:>2}: {} ({} ms) {msg}{runner_note}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_millis()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len(),
        criteria.len()
    );
}
