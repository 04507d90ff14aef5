use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use lrcmr::bounds::{self, FieldBound, Verdict};
use lrcmr::equiv::{self, NecessaryOutcome};
use lrcmr::io::{self, Check, RunReport};
use lrcmr::locality::{self, LocalityProfile, RepairOutcome};
use lrcmr::mr::{self, MrMode, MrParams, MrVerifier};
use lrcmr::{repro, LinearCode};

use crate::{
    BoundsCommand, Command, DistMethod, EquivCommand, Family, LocalityArgs, ModeArg, ParamArgs,
    PermKind, VerifyCommand,
};

pub struct Reply {
    pub report: RunReport,
    /// Table-shaped output used by `--format csv` instead of the check list.
    pub csv: Option<String>,
    /// Overrides the pass/fail exit status (hypotheses that do not hold).
    pub exit: Option<u8>,
}

impl Reply {
    fn new(report: RunReport) -> Reply {
        Reply {
            report,
            csv: None,
            exit: None,
        }
    }

    /// Report for input that could not be processed.
    pub fn failed(report: RunReport) -> Reply {
        Reply {
            report,
            csv: None,
            exit: Some(2),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.exit
            .unwrap_or(if self.report.all_pass() { 0 } else { 1 })
    }
}

pub fn dispatch(command: &Command) -> Result<Reply> {
    match command {
        Command::Construct {
            family,
            params,
            output,
        } => construct(*family, params, output),
        Command::Verify(v) => verify(v),
        Command::Mindist { code, method, cap } => mindist(code, *method, *cap),
        Command::Bounds(b) => bounds_cmd(b),
        Command::Equiv(e) => equiv_cmd(e),
        Command::Repair {
            code,
            word,
            locality,
        } => repair(code, word, locality),
        Command::Repro { target } => repro_cmd(target),
    }
}

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::Construct { .. } => "construct",
        Command::Verify(VerifyCommand::Locality { .. }) => "verify locality",
        Command::Verify(VerifyCommand::Mr { .. }) => "verify mr",
        Command::Verify(VerifyCommand::Cyclic { .. }) => "verify cyclic",
        Command::Verify(VerifyCommand::Optimal { .. }) => "verify optimal",
        Command::Mindist { .. } => "mindist",
        Command::Bounds(BoundsCommand::Field { .. }) => "bounds field",
        Command::Bounds(BoundsCommand::Length { .. }) => "bounds length",
        Command::Bounds(BoundsCommand::Sweep { .. }) => "bounds sweep",
        Command::Equiv(EquivCommand::Sufficient { .. }) => "equiv sufficient",
        Command::Equiv(EquivCommand::Necessary { .. }) => "equiv necessary",
        Command::Equiv(EquivCommand::BuildPerm { .. }) => "equiv build-perm",
        Command::Equiv(EquivCommand::Search { .. }) => "equiv search",
        Command::Repair { .. } => "repair",
        Command::Repro { .. } => "repro",
    }
}

fn params_of(args: &ParamArgs) -> MrParams {
    let p = MrParams::new(args.q, args.b, args.r, args.delta);
    match args.s {
        Some(s) => p.with_s(s),
        None => p,
    }
}

fn load(path: &Path) -> Result<LinearCode> {
    io::load_code(path).with_context(|| format!("loading {}", path.display()))
}

fn locality_params(code: &LinearCode, args: &LocalityArgs) -> Result<(usize, usize)> {
    let r = args
        .r
        .or(code.meta().r.map(|v| v as usize))
        .context("no --r given and the code file records no r")?;
    let delta = args
        .delta
        .or(code.meta().delta.map(|v| v as usize))
        .context("no --delta given and the code file records no delta")?;
    if r == 0 || delta < 2 {
        bail!("need r >= 1 and delta >= 2, got r = {r}, delta = {delta}");
    }
    Ok((r, delta))
}

/// The coset partition when the group size divides `n`, else a searched one.
/// The returned profile may be unverified.
fn profile_for(code: &LinearCode, r: usize, delta: usize) -> Result<LocalityProfile> {
    match locality::coset_partition(code.n(), r + delta - 1) {
        Some(cosets) => Ok(LocalityProfile::new(r, delta, cosets).verify(code)),
        None => Ok(locality::discover_repair_partition(code, r, delta)?),
    }
}

fn failing_groups(code: &LinearCode, profile: &LocalityProfile) -> Vec<Vec<usize>> {
    profile
        .partition()
        .iter()
        .filter(|s| !locality::verify_repair_set(code, s, profile.r(), profile.delta()))
        .cloned()
        .collect()
}

fn construct(family: Family, args: &ParamArgs, output: &Path) -> Result<Reply> {
    let p = params_of(args);
    let (name, code) = match family {
        Family::CyclicMr => ("cyclic-mr", mr::build_construction1(&p)?),
        Family::QuasiCyclicMr => ("quasi-cyclic-mr", mr::build_construction2(&p)?),
    };
    io::save_code(&code, output).with_context(|| format!("writing {}", output.display()))?;
    let profile = p.profile(&code);
    let report = RunReport::new("construct", json!({ "family": name, "params": p }))
        .results(json!({
            "output": output.display().to_string(),
            "n": code.n(),
            "k": code.k(),
            "q": code.field().q(),
            "cyclic": code.is_cyclic(),
            "local_groups": profile.partition(),
        }))
        .check(Check::new(
            "local groups are repair sets",
            profile.is_verified(),
        ));
    Ok(Reply::new(report))
}

fn verify(cmd: &VerifyCommand) -> Result<Reply> {
    match cmd {
        VerifyCommand::Locality { code, locality } => verify_locality(code, locality),
        VerifyCommand::Mr {
            code,
            mode,
            locality,
            samples,
            seed,
        } => verify_mr(code, *mode, locality, *samples, *seed),
        VerifyCommand::Cyclic { code } => verify_cyclic(code),
        VerifyCommand::Optimal { code, locality } => verify_optimal(code, locality),
    }
}

fn verify_locality(path: &Path, args: &LocalityArgs) -> Result<Reply> {
    let code = load(path)?;
    let (r, delta) = locality_params(&code, args)?;
    let inputs = json!({ "code": path.display().to_string(), "r": r, "delta": delta });
    let report = match locality::discover_repair_partition(&code, r, delta) {
        Ok(profile) => RunReport::new("verify locality", inputs)
            .results(json!({ "partition": profile.partition() }))
            .check(Check::new("partition into repair sets", true)),
        Err(lrcmr::Error::NotFound(why)) => {
            let mut report = RunReport::new("verify locality", inputs);
            let mut check = Check::new("partition into repair sets", false).with_witness(&why);
            if let Some(cosets) = locality::coset_partition(code.n(), r + delta - 1) {
                let profile = LocalityProfile::new(r, delta, cosets).verify(&code);
                let bad = failing_groups(&code, &profile);
                report = report.results(json!({ "failing_cosets": bad }));
                check = check.with_witness(json!({ "reason": why, "failing_cosets": bad }));
            }
            report.check(check)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Reply::new(report))
}

fn verify_mr(
    path: &Path,
    mode: ModeArg,
    args: &LocalityArgs,
    samples: usize,
    seed: u64,
) -> Result<Reply> {
    let code = load(path)?;
    let (r, delta) = locality_params(&code, args)?;
    let mut inputs = json!({
        "code": path.display().to_string(),
        "r": r,
        "delta": delta,
        "mode": format!("{mode:?}").to_lowercase(),
    });
    if mode == ModeArg::Sampled {
        inputs["samples"] = json!(samples);
        inputs["seed"] = json!(seed);
    }
    let profile = profile_for(&code, r, delta)?;
    let groups = Check::new("local groups are repair sets", profile.is_verified());
    if !profile.is_verified() {
        let bad = failing_groups(&code, &profile);
        let report = RunReport::new("verify mr", inputs)
            .results(json!({ "partition": profile.partition() }))
            .check(groups.with_witness(bad));
        return Ok(Reply::new(report));
    }
    let h = mr::implied_h(&code, &profile)?;
    let verifier = MrVerifier::new();
    let mut calibration = None;
    if matches!(mode, ModeArg::Fastpath | ModeArg::Sampled) {
        // the fastpath is trusted only after agreeing with the definition once
        let p = repro::instance1();
        let reference = mr::build_construction1(&p)?;
        let v = verifier.calibrate(&reference, &p.profile(&reference))?;
        if v.agreement != Some(true) {
            bail!("fastpath calibration disagreed with the definition on the length-15 code");
        }
        calibration = Some(v);
    }
    let verdict = match mode {
        ModeArg::Definition => verifier.verify(&code, &profile, h, MrMode::Definition)?,
        ModeArg::Fastpath => verifier.verify(&code, &profile, h, MrMode::Fastpath)?,
        ModeArg::Both => verifier.verify(&code, &profile, h, MrMode::Both)?,
        ModeArg::Sampled => verifier.verify_sampled(&code, &profile, samples, seed)?,
    };
    let mut report = RunReport::new("verify mr", inputs)
        .results(json!({
            "h": h,
            "partition": profile.partition(),
            "verdict": verdict,
            "calibration": calibration,
        }))
        .check(groups);
    if let Some(agree) = verdict.agreement {
        report = report.check(Check::new("definition and fastpath agree", agree));
    }
    let mr_check = Check::new("maximally recoverable", verdict.mr);
    report = report.check(match &verdict.witness {
        Some(w) => mr_check.with_witness(w),
        None => mr_check,
    });
    Ok(Reply::new(report))
}

fn verify_cyclic(path: &Path) -> Result<Reply> {
    let code = load(path)?;
    let cyclic = code.is_cyclic();
    let mut check = Check::new("closed under cyclic shift", cyclic);
    if !cyclic {
        let g = code.generator();
        let n = code.n();
        for i in 0..g.rows() {
            let row = g.row(i);
            let shifted: Vec<u32> = (0..n).map(|j| row[(j + n - 1) % n]).collect();
            if !code.contains(&shifted)? {
                check = check.with_witness(json!({ "codeword": row, "shift": shifted }));
                break;
            }
        }
    }
    let report = RunReport::new(
        "verify cyclic",
        json!({ "code": path.display().to_string() }),
    )
    .results(json!({ "n": code.n(), "k": code.k(), "cyclic": cyclic }))
    .check(check);
    Ok(Reply::new(report))
}

fn verify_optimal(path: &Path, args: &LocalityArgs) -> Result<Reply> {
    let code = load(path)?;
    let (r, delta) = locality_params(&code, args)?;
    let inputs = json!({ "code": path.display().to_string(), "r": r, "delta": delta });
    let profile = profile_for(&code, r, delta)?;
    if !profile.is_verified() {
        let bad = failing_groups(&code, &profile);
        let report = RunReport::new("verify optimal", inputs)
            .check(Check::new("local groups are repair sets", false).with_witness(bad));
        return Ok(Reply::new(report));
    }
    let d = code
        .min_distance(None)?
        .exact()
        .context("code has no nonzero codewords")?;
    let bound = locality::lrc_singleton_bound(code.n(), code.k(), r, delta);
    let (n, k, q) = (code.n() as u64, code.k() as u64, code.field().q() as u64);
    let field = bounds::optimal_field_size_verdict(n, k, r as u64, delta as u64, q);
    let report = RunReport::new("verify optimal", inputs)
        .results(json!({
            "n": n,
            "k": k,
            "d": d,
            "singleton_type_bound": bound,
            "field_size": field,
        }))
        .check(Check::new("local groups are repair sets", true))
        .check(
            Check::new("meets the Singleton-type bound", d as i64 == bound)
                .with_witness(json!({ "d": d, "bound": bound })),
        );
    Ok(Reply::new(report))
}

fn mindist(path: &Path, method: DistMethod, cap: Option<usize>) -> Result<Reply> {
    let code = load(path)?;
    let dist = match method {
        DistMethod::Auto => code.min_distance(cap)?,
        DistMethod::Subsets => code.min_distance_by_subsets(cap)?,
        DistMethod::Codewords => code.min_distance_by_codewords(cap)?,
    };
    let (exact, above) = match dist {
        lrcmr::Distance::Exact(d) => (Some(d), None),
        lrcmr::Distance::AboveCap(c) => (None, Some(c)),
    };
    let report = RunReport::new(
        "mindist",
        json!({
            "code": path.display().to_string(),
            "method": format!("{method:?}").to_lowercase(),
            "cap": cap,
        }),
    )
    .results(json!({ "n": code.n(), "k": code.k(), "d": exact, "above_cap": above }));
    Ok(Reply::new(report))
}

fn bounds_cmd(cmd: &BoundsCommand) -> Result<Reply> {
    match *cmd {
        BoundsCommand::Field { n, k, r, delta, q } => {
            let inputs = json!({ "n": n, "k": k, "r": r, "delta": delta, "q": q });
            let bound = bounds::field_bound_new(n, k, r, delta);
            let unmet = matches!(bound, FieldBound::NotApplicable { .. });
            let mut reply = match q {
                Some(q) => {
                    let v = bounds::optimal_field_size_verdict(n, k, r, delta, q);
                    let csv = format!("{}\n{}\n", bounds::CSV_HEADER, v.csv_row());
                    let check =
                        Check::new("q is at least the bound", v.verdict != Verdict::BelowBound)
                            .with_witness(json!({ "q": q, "bound": v.bound_new.value() }));
                    let mut reply = Reply::new(
                        RunReport::new("bounds field", inputs)
                            .results(v)
                            .check(check),
                    );
                    reply.csv = Some(csv);
                    reply
                }
                None => Reply::new(
                    RunReport::new("bounds field", inputs).results(json!({ "bound_new": bound })),
                ),
            };
            if unmet {
                reply.exit = Some(2);
            }
            Ok(reply)
        }
        BoundsCommand::Length { q, d, r, delta, k } => {
            let est = bounds::length_bound_prior(q, d, r, delta, k)?;
            let report = RunReport::new(
                "bounds length",
                json!({ "q": q, "d": d, "r": r, "delta": delta, "k": k }),
            )
            .results(json!({ "length_bound": est }));
            Ok(Reply::new(report))
        }
        BoundsCommand::Sweep { max_field } => {
            if max_field < 2 {
                bail!("--max-field must be at least 2");
            }
            let rows = bounds::sweep(max_field);
            let mut csv = format!("{}\n", bounds::CSV_HEADER);
            for v in &rows {
                csv.push_str(&v.csv_row());
                csv.push('\n');
            }
            let mut reply = Reply::new(
                RunReport::new("bounds sweep", json!({ "max_field": max_field })).results(rows),
            );
            reply.csv = Some(csv);
            Ok(reply)
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .with_context(|| format!("bad number {t:?} in {s:?}"))
        })
        .collect()
}

fn equiv_cmd(cmd: &EquivCommand) -> Result<Reply> {
    match cmd {
        EquivCommand::Sufficient { params } => {
            let p = params_of(params);
            let inputs = json!({ "params": p });
            let Some(cy) = equiv::cyclifying_perm(&p)? else {
                let report = RunReport::new("equiv sufficient", inputs).results(json!({
                    "exists": false,
                    "reason": "gcd(m, a/gcd(a,delta)) != 1",
                }));
                return Ok(Reply::new(report));
            };
            let code = mr::build_construction2(&p)?;
            let permuted = equiv::apply_perm(&code, &cy.perm)?;
            let report = RunReport::new("equiv sufficient", inputs)
                .results(json!({
                    "exists": true,
                    "tau": cy.tau,
                    "perm": cy.perm,
                    "map": cy.perm.map(),
                    "unpermuted_cyclic": code.is_cyclic(),
                }))
                .check(Check::new("permuted code is cyclic", permuted.is_cyclic()));
            Ok(Reply::new(report))
        }
        EquivCommand::Necessary { params } => {
            let p = params_of(params);
            let v = equiv::necessary_verdict(&p);
            let unmet = v.outcome == NecessaryOutcome::HypothesesUnmet;
            let mut reply =
                Reply::new(RunReport::new("equiv necessary", json!({ "params": p })).results(v));
            if unmet {
                reply.exit = Some(2);
            }
            Ok(reply)
        }
        EquivCommand::BuildPerm {
            kind,
            n,
            t,
            a,
            z,
            code,
            output,
        } => {
            let ts = parse_list(t)?;
            let perm = match kind {
                PermKind::Multiplier => {
                    let [t] = ts[..] else {
                        bail!("a multiplier takes a single --t");
                    };
                    equiv::make_multiplier(*n, t)?
                }
                PermKind::Psi => {
                    let a = a.context("block maps need --a")?;
                    let z = parse_list(z.as_deref().context("block maps need --z")?)?;
                    equiv::make_psi(*n, a, ts, z)?
                }
            };
            let inputs = json!({
                "kind": format!("{kind:?}").to_lowercase(),
                "n": n,
                "t": t,
                "a": a,
                "z": z,
                "code": code.as_ref().map(|c| c.display().to_string()),
            });
            let mut results = json!({ "perm": perm, "map": perm.map() });
            if let Some(path) = code {
                let permuted = equiv::apply_perm(&load(path)?, &perm)?;
                results["permuted_cyclic"] = json!(permuted.is_cyclic());
                if let Some(out) = output {
                    io::save_code(&permuted, out)
                        .with_context(|| format!("writing {}", out.display()))?;
                    results["output"] = json!(out.display().to_string());
                }
            } else if output.is_some() {
                bail!("--output needs --code");
            }
            Ok(Reply::new(
                RunReport::new("equiv build-perm", inputs).results(results),
            ))
        }
        EquivCommand::Search { code, a, limit } => {
            let c = load(code)?;
            let search = equiv::brute_force_psi_search(&c, *a, *limit)?;
            let found = search.found.is_some();
            let report = RunReport::new(
                "equiv search",
                json!({ "code": code.display().to_string(), "a": a, "limit": limit }),
            )
            .check(if found {
                Check::new("a block map makes the code cyclic", true)
            } else {
                Check::new("a block map makes the code cyclic", false)
                    .with_witness(json!({ "searched": search.space }))
            })
            .results(search);
            Ok(Reply::new(report))
        }
    }
}

fn parse_word(code: &LinearCode, word: &str) -> Result<Vec<Option<u32>>> {
    let q = code.field().q();
    let out: Vec<Option<u32>> = word
        .split(',')
        .map(|t| match t.trim() {
            "?" => Ok(None),
            s => {
                let v: u32 = s.parse().with_context(|| format!("bad symbol {s:?}"))?;
                if v >= q {
                    bail!("symbol {v} is not an element of GF({q})");
                }
                Ok(Some(v))
            }
        })
        .collect::<Result<_>>()?;
    if out.len() != code.n() {
        bail!(
            "word has {} symbols, the code has length {}",
            out.len(),
            code.n()
        );
    }
    Ok(out)
}

fn repair(path: &Path, word: &str, args: &LocalityArgs) -> Result<Reply> {
    let code = load(path)?;
    let (r, delta) = locality_params(&code, args)?;
    let received = parse_word(&code, word)?;
    let profile = profile_for(&code, r, delta)?;
    if !profile.is_verified() {
        bail!("local groups of the code are not ({r},{delta}) repair sets");
    }
    let inputs =
        json!({ "code": path.display().to_string(), "word": word, "r": r, "delta": delta });
    let erased: Vec<usize> = (0..received.len())
        .filter(|&i| received[i].is_none())
        .collect();
    let (word_out, escalated) = match locality::local_repair(&code, &profile, &received)? {
        RepairOutcome::Repaired(w) => (Ok(w), Vec::new()),
        RepairOutcome::Escalate { partial, sets } => {
            let groups: Vec<&Vec<usize>> = sets.iter().map(|&s| &profile.partition()[s]).collect();
            (
                code.erasure_decode(&partial),
                groups.into_iter().cloned().collect(),
            )
        }
    };
    let report = RunReport::new("repair", inputs);
    let report = match word_out {
        Ok(w) => {
            let valid = code.contains(&w)?;
            report
                .results(json!({ "erased": erased, "escalated_groups": escalated, "word": w }))
                .check(Check::new("all erasures recovered", valid))
        }
        Err(lrcmr::Error::Unrecoverable(pos)) => report
            .results(json!({ "erased": erased, "escalated_groups": escalated }))
            .check(Check::new("all erasures recovered", false).with_witness(pos)),
        Err(lrcmr::Error::NotACodeword) => report
            .results(json!({ "erased": erased, "escalated_groups": escalated }))
            .check(Check::new(
                "known symbols are consistent with a codeword",
                false,
            )),
        Err(e) => return Err(e.into()),
    };
    Ok(Reply::new(report))
}

fn repro_cmd(target: &str) -> Result<Reply> {
    let results = if target == "all" {
        repro::run_all()?
    } else {
        let id: usize = target
            .parse()
            .with_context(|| format!("expected `all` or a criterion number, got {target:?}"))?;
        vec![repro::run(id)?]
    };
    let mut report = RunReport::new("repro", json!({ "target": target }));
    for c in &results {
        let check = Check::new(format!("criterion {}: {}", c.id, c.title), c.pass);
        report = report.check(if c.pass {
            check
        } else {
            check.with_witness(&c.details)
        });
    }
    Ok(Reply::new(report.results(results)))
}
