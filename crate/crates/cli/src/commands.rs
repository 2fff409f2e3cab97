use serde_json::{json, Value};

use isoembed::embed::{
    build_folklore, build_misaligner_embedding, build_product_embedding, build_third_rate_embedding,
    parse_ratio, third_rate_for_rho, Embedding, EmbeddingSpec,
};
use isoembed::lsm::{generate, generate_with_window, sync_violation, verify_lsm, LsmString};
use isoembed::misaligner::{
    required_t, search, threshold_margin, verify, CheckMode, Misaligner, MisalignerParams, SearchConfig,
};
use isoembed::verify::{
    check_reconstruction, extract_interleaved_structure, replay_violation, shift_attack, synthetic_interleaved,
    verify_isometry_exhaustive, verify_isometry_sampled, ExtractConfig, SampleConfig, StructureOutcome,
};
use isoembed::{Alphabet, Str};

use crate::report::{read_input, write_output, FileDigest, Outcome};
use crate::{
    AttackArgs, BuildArgs, CheckLsmArgs, CheckMisalignerArgs, Cli, Command, EmbedArgs, ExtractArgs, Failure, Family,
    GenLsmArgs, Mode, RateReportArgs, SearchArgs, VerifyIsometryArgs,
};

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::GenLsm(a) => gen_lsm(a, seed),
        Command::CheckLsm(a) => check_lsm(a),
        Command::SearchMisaligner(a) => search_misaligner(a, seed),
        Command::CheckMisaligner(a) => check_misaligner(a),
        Command::BuildEmbedding(a) => build_embedding(a, seed),
        Command::Embed(a) => embed(a),
        Command::VerifyIsometry(a) => verify_isometry(a, seed),
        Command::ExtractStructure(a) => extract_structure(a, seed),
        Command::Attack(a) => attack(a, seed),
        Command::RateReport(a) => rate_report(a),
    }
}

fn lsm_checks(lsm: &LsmString, epsilon: f64) -> (bool, Value) {
    let report = verify_lsm(&lsm.value, epsilon);
    let sync = sync_violation(&lsm.value, epsilon);
    let pass = report.ok && sync.is_none();
    (
        pass,
        json!({
            "epsilon": epsilon,
            "sigma_size": lsm.params.sigma_size,
            "length": lsm.value.len(),
            "lsm_ok": report.ok,
            "first_bad_interval": report.first_bad_interval,
            "sync_ok": sync.is_none(),
            "first_sync_violation": sync,
        }),
    )
}

fn gen_lsm(a: &GenLsmArgs, seed: u64) -> Result<Outcome, Failure> {
    let lsm = match a.window {
        Some(w) => generate_with_window(a.epsilon, a.sigma, a.n, seed, w)?,
        None => generate(a.epsilon, a.sigma, a.n, seed)?,
    };
    let (pass, mut payload) = lsm_checks(&lsm, a.epsilon);
    payload["theta"] = json!(lsm.params.theta);
    payload["resample_count"] = json!(lsm.resample_count);
    let mut outputs = Vec::new();
    match &a.out {
        Some(path) => outputs.push(write_output(path, &lsm.to_text())?),
        None => payload["value"] = json!(lsm.value.to_string()),
    }
    let mut o = Outcome::new(pass, payload);
    o.outputs = outputs;
    Ok(o)
}

fn check_lsm(a: &CheckLsmArgs) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let lsm = LsmString::from_text(&read_input(&a.file, &mut inputs)?)?;
    let epsilon = a.epsilon.unwrap_or(lsm.params.epsilon);
    let (pass, payload) = lsm_checks(&lsm, epsilon);
    let mut o = Outcome::new(pass, payload);
    o.inputs = inputs;
    Ok(o)
}

fn search_misaligner(a: &SearchArgs, seed: u64) -> Result<Outcome, Failure> {
    let config = SearchConfig {
        params: MisalignerParams::new(a.m, a.k, a.t, a.alpha)?,
        rank_frac: a.rank_frac,
        preprocess_count: a.preprocess,
        candidate_budget: a.budget,
        seed,
    };
    let out = search(&config)?;
    let text = out.misaligner.to_text();
    let mut payload = json!({
        "complete": out.complete,
        "target_alpha": out.target_alpha,
        "achieved_alpha": out.achieved_alpha,
        "candidates_used": out.candidates_used,
        "prune_rounds": out.prune_rounds,
        "diagnostic": out.diagnostic,
        "report": out.report,
    });
    let mut outputs = Vec::new();
    match &a.out {
        Some(path) => outputs.push(write_output(path, &text)?),
        None => payload["misaligner"] = json!(text),
    }
    let mut o = Outcome::new(out.complete, payload);
    o.outputs = outputs;
    o.text = vec![
        format!("complete: {}", out.complete),
        format!("achieved_alpha: {:?}", out.achieved_alpha),
        format!("candidates_used: {}", out.candidates_used),
    ];
    if let Some(d) = &out.diagnostic {
        o.text.push(format!("diagnostic: {d}"));
    }
    Ok(o)
}

fn check_misaligner(a: &CheckMisalignerArgs) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let mut mis = Misaligner::from_text(&read_input(&a.file, &mut inputs)?)?;
    if let Some(alpha) = a.alpha {
        mis.params = MisalignerParams::new(mis.params.m, mis.params.k, mis.params.t, alpha)?;
    }
    let mode = match a.mode {
        Mode::Conservative => CheckMode::Conservative,
        Mode::Exact => CheckMode::Exact { gamma_cap: a.gamma_cap },
    };
    let report = verify(&mis, mode);
    let mut o = Outcome::new(report.pass, &report);
    o.inputs = inputs;
    o.text = report
        .properties
        .iter()
        .map(|p| {
            let status = if p.pass { "pass" } else { "FAIL" };
            let witness = p.witnesses.first().map(|w| format!(" witness {w:?}")).unwrap_or_default();
            format!("{:?}: {status} ({} checked, {} failures){witness}", p.property, p.checked, p.failures)
        })
        .collect();
    o.text.push(format!("achieved_alpha: {:?}", report.achieved_alpha));
    Ok(o)
}

fn build_embedding(a: &BuildArgs, seed: u64) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let spec = match a.family {
        Family::Misaligner => {
            let path = a
                .misaligner
                .as_ref()
                .ok_or_else(|| Failure("--misaligner is required for this family".into()))?;
            let mis = Misaligner::from_text(&read_input(path, &mut inputs)?)?;
            let epsilon = a.epsilon.ok_or_else(|| Failure("--epsilon is required for this family".into()))?;
            EmbeddingSpec::Misaligner(build_misaligner_embedding(&mis, epsilon, a.n, seed)?)
        }
        Family::ThirdRate => {
            let rate = match (&a.rate, &a.rho) {
                (Some(r), None) => parse_ratio(r)?,
                (None, Some(rho)) => third_rate_for_rho(parse_ratio(rho)?)?,
                _ => return Err(Failure("third-rate needs exactly one of --rate and --rho".into())),
            };
            EmbeddingSpec::ThirdRate(build_third_rate_embedding(rate, a.n, seed)?)
        }
        Family::Product => {
            let rho = a.rho.as_deref().ok_or_else(|| Failure("--rho is required for this family".into()))?;
            EmbeddingSpec::Product(build_product_embedding(parse_ratio(rho)?, a.n, seed)?)
        }
        Family::Folklore => EmbeddingSpec::Folklore(build_folklore(a.n, a.c, seed)?),
    };
    let json_text = spec.to_json() + "\n";
    let mut payload = spec_summary(&spec);
    let mut outputs = Vec::new();
    match &a.out {
        Some(path) => outputs.push(write_output(path, &json_text)?),
        None => payload["spec"] = serde_json::from_str(&json_text).expect("spec is JSON"),
    }
    let mut o = Outcome::new(true, payload);
    o.inputs = inputs;
    o.outputs = outputs;
    Ok(o)
}

fn load_spec(path: &std::path::Path, n: Option<usize>, inputs: &mut Vec<FileDigest>) -> Result<EmbeddingSpec, Failure> {
    let spec = EmbeddingSpec::from_json(&read_input(path, inputs)?)?;
    Ok(match n {
        Some(n) if n != spec.n() => spec.resized(n)?,
        _ => spec,
    })
}

fn spec_summary(spec: &EmbeddingSpec) -> Value {
    let rate = spec.rate();
    let mut v = json!({
        "family": spec.family(),
        "n": spec.n(),
        "output_len": spec.output_len(),
        "input_alphabet": spec.input_alphabet(),
        "output_alphabet": spec.output_alphabet(),
        "rate": rate.value,
        "rate_exact": rate.exact.map(|(p, q)| format!("{p}/{q}")),
        "rate_display": rate.display(),
    });
    match spec {
        EmbeddingSpec::Misaligner(e) => {
            let p = e.misaligner.params;
            v["m"] = json!(p.m);
            v["k"] = json!(p.k);
            v["t"] = json!(p.t);
            v["alpha"] = json!(p.alpha);
            v["epsilon"] = json!(e.epsilon);
            v["threshold_margin"] = json!(threshold_margin(p.m, p.t, p.alpha, e.epsilon));
            v["lsm_policy"] = json!(e.lsm_policy);
        }
        EmbeddingSpec::ThirdRate(e) => {
            v["target_rate"] = json!(format!("{}/{}", e.a, e.b));
            v["rho"] = json!(e.rho().to_string());
            v["lsm_alphabet"] = json!(e.alphabet_size);
            v["density_ok"] = json!(e.density_violation().is_none());
        }
        EmbeddingSpec::Product(e) => {
            v["rho"] = json!(e.rho().to_string());
            v["m_pad"] = json!(e.m_pad);
            v["sigma_in"] = json!(e.sigma_in_size);
            v["sigma_prime"] = json!(e.sigma_prime_size);
            v["certified_rate_bound"] = json!(e.certified_rate_bound().map(|r| r.to_string()));
        }
        EmbeddingSpec::Folklore(e) => {
            v["c"] = json!(e.c);
            v["block_len"] = json!(e.block_len);
        }
    }
    v
}

fn embed(a: &EmbedArgs) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let spec = load_spec(&a.spec, None, &mut inputs)?;
    let x = Str::parse(&a.input, Alphabet::new(spec.input_alphabet())?)?;
    let y = spec.embed(&x)?;
    let mut o = Outcome::new(true, json!({ "input": x.to_string(), "output": y.to_string() }));
    o.inputs = inputs;
    o.text = vec![y.to_string()];
    Ok(o)
}

fn verify_isometry(a: &VerifyIsometryArgs, seed: u64) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let spec = load_spec(&a.spec, a.n, &mut inputs)?;
    let report = if a.exhaustive {
        verify_isometry_exhaustive(&spec)?
    } else {
        verify_isometry_sampled(
            &spec,
            SampleConfig {
                trials: a.trials,
                seed,
                neighbors: !a.no_neighbors,
            },
        )
    };
    let mut payload = serde_json::to_value(&report).expect("report serializes");
    payload["n"] = json!(spec.n());
    payload["family"] = json!(spec.family());
    let mut o = Outcome::new(report.pass, payload);
    o.inputs = inputs;
    Ok(o)
}

fn extract_structure(a: &ExtractArgs, seed: u64) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let spec = load_spec(&a.spec, a.n, &mut inputs)?;
    let config = ExtractConfig {
        probe_budget: a.probe_budget,
        seed,
        ..ExtractConfig::default()
    };
    let mut o = match extract_interleaved_structure(&spec, config)? {
        StructureOutcome::Structure(s) => {
            let mismatch = check_reconstruction(&spec, &s, a.check_probes, seed ^ 1)?;
            let pass = mismatch.is_none();
            let replayed = mismatch.as_ref().map(|v| replay_violation(&spec, v));
            Outcome::new(
                pass,
                json!({
                    "n": s.n,
                    "output_len": s.output_len,
                    "eta": s.eta,
                    "pi_identity": s.pi.iter().all(|m| m.iter().all(|(k, v)| k == v)),
                    "pi_complete": s.pi_complete,
                    "frozen_count": s.frozen.len(),
                    "reconstruction_probes": a.check_probes,
                    "reconstruction_violation": mismatch,
                    "replayed": replayed,
                    "structure": s,
                }),
            )
        }
        StructureOutcome::Violation(v) => {
            let replayed = replay_violation(&spec, &v);
            Outcome::new(false, json!({ "violation": v, "replayed": replayed }))
        }
    };
    o.inputs = inputs;
    Ok(o)
}

fn attack(a: &AttackArgs, seed: u64) -> Result<Outcome, Failure> {
    let mut inputs = Vec::new();
    let structure = match (&a.spec, a.synthetic_rate) {
        (_, Some(rate)) => {
            let n = a.n.ok_or_else(|| Failure("--n is required with --synthetic-rate".into()))?;
            synthetic_interleaved(n, rate, 0)?
        }
        (Some(path), None) => {
            let spec = load_spec(path, a.n, &mut inputs)?;
            let config = ExtractConfig {
                seed,
                ..ExtractConfig::default()
            };
            match extract_interleaved_structure(&spec, config)? {
                StructureOutcome::Structure(s) => s,
                StructureOutcome::Violation(v) => {
                    let mut o = Outcome::new(false, json!({ "not_interleaved": v }));
                    o.inputs = inputs;
                    return Ok(o);
                }
            }
        }
        (None, None) => unreachable!("clap requires a target"),
    };
    let result = shift_attack(&structure, a.max_delta)?;
    let mut o = Outcome::new(!result.violation, &result);
    o.inputs = inputs;
    o.text = vec![
        format!("n: {}", result.n),
        format!("best_delta: {}", result.delta),
        format!("cost: {} (hamming {})", result.cost.total, result.hamming),
        format!("violation: {}", result.violation),
    ];
    Ok(o)
}

fn rate_report(a: &RateReportArgs) -> Result<Outcome, Failure> {
    if a.specs.is_empty() && a.params.is_none() {
        return Err(Failure("give at least one --spec or --params".into()));
    }
    let mut inputs = Vec::new();
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for path in &a.specs {
        let spec = load_spec(path, None, &mut inputs)?;
        let mut row = spec_summary(&spec);
        row["path"] = json!(path);
        text.push(format!("{}\t{}\t{}", path.display(), spec.family(), spec.rate().display()));
        rows.push(row);
    }
    if let Some(p) = &a.params {
        let f: Vec<&str> = p.split(',').map(str::trim).collect();
        let bad = || Failure(format!("--params needs m,k,t,alpha; got {p:?}"));
        if f.len() != 4 {
            return Err(bad());
        }
        let m: usize = f[0].parse().map_err(|_| bad())?;
        let k: usize = f[1].parse().map_err(|_| bad())?;
        let t: usize = f[2].parse().map_err(|_| bad())?;
        let alpha: f64 = f[3].parse().map_err(|_| bad())?;
        MisalignerParams::new(m, k, t, alpha)?;
        let margin = threshold_margin(m, t, alpha, a.epsilon);
        let needed = required_t(m, alpha, a.epsilon).ok();
        text.push(format!("params({p})\tmisaligner\t1/{t}\tmargin {margin:.6e}"));
        rows.push(json!({
            "family": "misaligner",
            "m": m, "k": k, "t": t, "alpha": alpha, "epsilon": a.epsilon,
            "rate": 1.0 / t as f64,
            "rate_exact": format!("1/{t}"),
            "threshold_margin": margin,
            "required_t": needed,
        }));
    }
    let mut o = Outcome::new(true, json!({ "rows": rows }));
    o.inputs = inputs;
    o.text = text;
    Ok(o)
}
