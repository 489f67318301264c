use crate::args::{BoundsArgs, Cli, Command, DfaArgs, Lemma, MachineArgs, ReportArgs, RunArgs, VerifyArgs};
use crate::error::{CliError, EXIT_COUNTEREXAMPLE, EXIT_OK};
use crate::output::{emit, strings, Tabular};
use num_traits::One;
use qcfa::automata::{DfaSpec, MachineSpec, QcfaMachine};
use qcfa::baselines::{
    build_figure_dfa, build_twin_dfa, eq_protocol_audit, lower_bound_table, nerode_distinguishability,
    random_walk_absorption, BoundRow, Certificate, ProtocolAudit,
};
use qcfa::engine::{
    analyze_exact, evolve_truncated, monte_carlo, round_analysis, EngineError, EngineOptions, HaltingSummary, Mass,
    RoundOutcome, Strategy,
};
use qcfa::machines::{classify, Family};
use qcfa::numerics::{parse_rational, rat, Prob, Rational, MAX_PRECISION};
use qcfa::oracles::{
    rotation_bound_audit, verify_basis_avoidance, verify_k_closure, verify_no_collision, verify_xy_gap, OracleReport,
};
use qcfa::report::{succinctness_report, ReportRow};
use serde::Serialize;

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Exact(a) => exact(a),
        Command::Dfa(a) => dfa(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Report(a) => report(a),
    }
}

fn parse_eps(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Usage(e.to_string()))
}

/// `lo..hi`, `lo..=hi` (both inclusive) or `m1,m2,...`.
pub fn parse_m_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad m range {s:?}; use lo..hi or a comma-separated list"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    let ms: Vec<u64> = match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(bad());
            }
            (lo..=hi).collect()
        }
        None => s.split(',').map(num).collect::<Result<_, _>>()?,
    };
    if ms.is_empty() || ms.contains(&0) {
        return Err(bad());
    }
    Ok(ms)
}

fn ms_of(m: Option<u64>, range: &Option<String>) -> Result<Vec<u64>, CliError> {
    match (m, range) {
        (Some(m), None) => Ok(vec![m]),
        (None, Some(r)) => parse_m_range(r),
        _ => Err(CliError::Usage("give --m or --m-range".into())),
    }
}

fn twin_family(name: &str) -> Result<bool, CliError> {
    match name {
        "aeq" => Ok(false),
        "twin" | "twin-m" | "twinm" => Ok(true),
        other => Err(CliError::Usage(format!("expected family aeq or twin-m, got {other:?}"))),
    }
}

struct Loaded {
    machine: QcfaMachine,
    id: String,
    family: Option<Family>,
}

fn load_machine(a: &MachineArgs) -> Result<Loaded, CliError> {
    if let Some(path) = &a.machine_file {
        let text = std::fs::read_to_string(path)?;
        let mut doc: serde_json::Value = serde_json::from_str(&text)?;
        // a full machine card nests the definition under "machine"
        if let Some(inner) = doc.get_mut("machine").map(serde_json::Value::take) {
            doc = inner;
        }
        let spec: MachineSpec = serde_json::from_value(doc)?;
        let machine = spec.validate().map_err(|errs| {
            CliError::Validation(errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
        })?;
        let id = machine.name().to_string();
        return Ok(Loaded { machine, id, family: None });
    }
    let name = a.family.as_deref().ok_or_else(|| CliError::Usage("give --family or --machine-file".into()))?;
    let family = Family::parse(name, a.m)?;
    let card = family.build(&parse_eps(&a.eps)?)?;
    Ok(Loaded { machine: card.machine, id: card.id, family: Some(family) })
}

fn engine_options(precision: Option<u32>) -> Result<EngineOptions, CliError> {
    let mut opts = EngineOptions::default();
    if let Some(p) = precision {
        if !(16..=MAX_PRECISION).contains(&p) {
            return Err(CliError::Usage(format!("precision must lie in 16..={MAX_PRECISION}")));
        }
        opts.precision = p;
    }
    Ok(opts)
}

fn check_word(machine: &QcfaMachine, word: &str) -> Result<(), CliError> {
    match word.chars().find(|c| !machine.input_alphabet().contains(c)) {
        Some(c) => Err(CliError::Validation(format!(
            "symbol {c:?} is not in the input alphabet {:?}",
            machine.input_alphabet()
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct Params {
    seed: Option<u64>,
    trials: Option<u64>,
    precision: u32,
    max_steps: u64,
}

/// Probabilities of advancing or rejecting within a number of rounds.
#[derive(Serialize)]
struct WithinRounds {
    rounds: u64,
    advance: Prob,
    reject: Prob,
}

#[derive(Serialize)]
struct RunDoc {
    machine_id: String,
    word: String,
    strategy: String,
    accept: Mass,
    reject: Mass,
    residual: Mass,
    expected_steps: Option<Mass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_rounds: Option<Mass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    promise: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    round: Option<RoundOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_rounds: Option<WithinRounds>,
    params: Params,
}

impl RunDoc {
    fn new(l: &Loaded, word: &str, s: HaltingSummary, params: Params) -> Result<RunDoc, CliError> {
        let promise = match l.family {
            Some(f) => Some(classify(f, word)?.to_string()),
            None => None,
        };
        Ok(RunDoc {
            machine_id: l.id.clone(),
            word: word.to_string(),
            strategy: s.strategy.to_string(),
            accept: s.accept,
            reject: s.reject,
            residual: s.residual,
            expected_steps: s.expected_steps,
            expected_rounds: s.expected_rounds,
            promise,
            round: None,
            within_rounds: None,
            params,
        })
    }
}

fn opt_mass(m: &Option<Mass>) -> (String, String) {
    match m {
        Some(m) => (m.render(), m.to_f64().to_string()),
        None => Default::default(),
    }
}

impl Tabular for RunDoc {
    fn header(&self) -> Vec<String> {
        strings([
            "machine_id",
            "word",
            "strategy",
            "accept",
            "accept_float",
            "reject",
            "reject_float",
            "residual",
            "residual_float",
            "expected_steps",
            "expected_steps_float",
            "provenance",
            "seed",
            "trials",
            "precision",
            "max_steps",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let (steps, steps_f) = opt_mass(&self.expected_steps);
        let p = &self.params;
        let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        vec![vec![
            self.machine_id.clone(),
            self.word.clone(),
            self.strategy.clone(),
            self.accept.render(),
            self.accept.to_f64().to_string(),
            self.reject.render(),
            self.reject.to_f64().to_string(),
            self.residual.render(),
            self.residual.to_f64().to_string(),
            steps,
            steps_f,
            self.accept.provenance().to_string(),
            opt(p.seed),
            opt(p.trials),
            p.precision.to_string(),
            p.max_steps.to_string(),
        ]]
    }
}

fn simulate(a: RunArgs) -> Result<u8, CliError> {
    let l = load_machine(&a.machine)?;
    check_word(&l.machine, &a.input)?;
    let opts = engine_options(a.precision)?;
    let s = monte_carlo(&l.machine, &a.input, a.trials, a.seed, a.max_steps, &opts)?;
    let params = Params { seed: Some(a.seed), trials: Some(a.trials), precision: opts.precision, max_steps: a.max_steps };
    emit(&RunDoc::new(&l, &a.input, s, params)?, &a.output)?;
    Ok(EXIT_OK)
}

fn pow(p: &Prob, mut e: u64) -> Prob {
    let (mut base, mut acc) = (p.clone(), Prob::one());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

fn within_rounds(r: &RoundOutcome, rounds: u64) -> WithinRounds {
    // geometric partial sum: sum_{i<R} c^i = (1 - c^R)/(1 - c)
    let c = &r.p_continue;
    let partial = if c.is_exact_one() {
        Prob::exact(Rational::from_integer(rounds.into()))
    } else {
        let one_minus = c.one_minus();
        pow(c, rounds).one_minus().div(&one_minus).unwrap_or_else(|| Prob::exact(rat(rounds as i64, 1)))
    };
    WithinRounds {
        rounds,
        advance: r.p_exit.mul(&partial).clamp_unit(),
        reject: r.p_reject.mul(&partial).clamp_unit(),
    }
}

fn exact(a: RunArgs) -> Result<u8, CliError> {
    let l = load_machine(&a.machine)?;
    check_word(&l.machine, &a.input)?;
    let opts = engine_options(a.precision)?;
    let s = match analyze_exact(&l.machine, &a.input, &opts) {
        Ok(s) => s,
        Err(EngineError::NoRounds(_) | EngineError::CyclicRounds(_) | EngineError::NodeCap(_)) => {
            evolve_truncated(&l.machine, &a.input, a.max_steps, &opts)?
        }
        Err(e) => return Err(e.into()),
    };
    let closed = s.strategy == Strategy::ClosedForm;
    let params = Params { seed: None, trials: None, precision: opts.precision, max_steps: a.max_steps };
    let mut doc = RunDoc::new(&l, &a.input, s, params)?;
    if closed {
        if let Ok(r) = round_analysis(&l.machine, &a.input, &opts) {
            doc.within_rounds = a.max_rounds.map(|n| within_rounds(&r, n));
            doc.round = Some(r);
        }
    }
    emit(&doc, &a.output)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DfaDoc {
    family: String,
    m: u64,
    states: usize,
    minimized_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accepts: Option<bool>,
    certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<ProtocolAudit>,
    minimized: DfaSpec,
}

impl Tabular for DfaDoc {
    fn header(&self) -> Vec<String> {
        strings(["family", "m", "states", "minimized_states", "certificate_bound", "protocol_satisfied", "word", "accepts"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.family.clone(),
            self.m.to_string(),
            self.states.to_string(),
            self.minimized_states.to_string(),
            self.certificate.bound.to_string(),
            self.protocol.as_ref().map(|p| p.satisfied.to_string()).unwrap_or_default(),
            self.word.clone().unwrap_or_default(),
            self.accepts.map(|b| b.to_string()).unwrap_or_default(),
        ]]
    }
}

fn dfa(a: DfaArgs) -> Result<u8, CliError> {
    let twin = twin_family(&a.family)?;
    let (family, d) = if twin {
        (Family::TwinM(a.m), build_twin_dfa(a.m)?)
    } else {
        (Family::Aeq(a.m), build_figure_dfa(a.m)?)
    };
    let min = d.minimize();
    let accepts = match &a.input {
        Some(w) => Some(d.run(w).map_err(|e| CliError::Validation(e.to_string()))?),
        None => None,
    };
    let protocol = if twin { Some(eq_protocol_audit(&min, a.m)?) } else { None };
    let doc = DfaDoc {
        family: family.name().into(),
        m: a.m,
        states: d.state_count(),
        minimized_states: min.state_count(),
        word: a.input.clone(),
        accepts,
        certificate: nerode_distinguishability(family, a.m)?,
        protocol,
        minimized: min.to_spec(),
    };
    emit(&doc, &a.output)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyDoc {
    reports: Vec<OracleReport>,
}

impl Tabular for VerifyDoc {
    fn header(&self) -> Vec<String> {
        strings(["lemma", "cap", "instances_checked", "counterexamples", "min_margin", "passed"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.reports
            .iter()
            .map(|r| {
                vec![
                    r.lemma.clone(),
                    r.cap.to_string(),
                    r.instances_checked.to_string(),
                    r.counterexamples.len().to_string(),
                    r.min_margin.clone().unwrap_or_default(),
                    r.passed().to_string(),
                ]
            })
            .collect()
    }
}

fn walk_report(n_max: u64) -> Result<OracleReport, CliError> {
    let mut r = OracleReport {
        lemma: "random-walk absorption 1/(n+1)".into(),
        cap: n_max,
        instances_checked: 0,
        counterexamples: Vec::new(),
        min_margin: None,
        notes: Vec::new(),
    };
    for n in 1..=n_max {
        let p = random_walk_absorption(n)?;
        if p != Rational::one() / Rational::from_integer((n + 1).into()) {
            r.counterexamples.push(format!("n = {n}: {p}"));
        }
        r.instances_checked += 1;
    }
    Ok(r)
}

fn verify(a: VerifyArgs) -> Result<u8, CliError> {
    let want = |l: Lemma| a.lemma == Lemma::All || a.lemma == l;
    let mut reports = Vec::new();
    if want(Lemma::KClosure) {
        reports.push(verify_k_closure(a.max_len)?);
    }
    if want(Lemma::NoCollision) {
        reports.push(verify_no_collision(a.max_len, a.trials, a.seed)?);
    }
    if want(Lemma::BasisAvoidance) {
        reports.push(verify_basis_avoidance(a.max_len)?);
    }
    if want(Lemma::XyGap) {
        reports.push(verify_xy_gap(a.max_len)?);
    }
    if want(Lemma::Rotation) {
        reports.push(rotation_bound_audit(a.d_max)?);
    }
    if want(Lemma::Walk) {
        reports.push(walk_report(a.d_max)?);
    }
    let failed = reports.iter().any(|r| !r.passed());
    emit(&VerifyDoc { reports }, &a.output)?;
    Ok(if failed { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

#[derive(Serialize)]
struct BoundsDoc {
    rows: Vec<BoundRow>,
}

impl Tabular for BoundsDoc {
    fn header(&self) -> Vec<String> {
        strings(["family", "m", "dfa_bound", "model", "states", "floor", "meets_floor", "exceeds_floor"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.family.to_string(),
                    r.m.to_string(),
                    r.dfa_bound.clone(),
                    r.model.label().to_string(),
                    r.states.to_string(),
                    format!("{:.4}", r.floor),
                    r.meets_floor.to_string(),
                    r.exceeds_floor.to_string(),
                ]
            })
            .collect()
    }
}

fn bounds(a: BoundsArgs) -> Result<u8, CliError> {
    let twin = twin_family(&a.family)?;
    let ms = ms_of(a.m, &a.m_range)?;
    emit(&BoundsDoc { rows: lower_bound_table(twin, &ms, a.b)? }, &a.output)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ReportDoc {
    rows: Vec<ReportRow>,
}

impl Tabular for ReportDoc {
    fn header(&self) -> Vec<String> {
        ReportRow::HEADER.iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(ReportRow::values).collect()
    }
}

fn report(a: ReportArgs) -> Result<u8, CliError> {
    twin_family(&a.family)?;
    let ms = ms_of(a.m, &a.m_range)?;
    let rows = succinctness_report(&a.family, &ms, &parse_eps(&a.eps)?, a.b)?;
    emit(&ReportDoc { rows }, &a.output)?;
    Ok(EXIT_OK)
}
