use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use lme_core::certifier::{certify_lme, orthogonality_residual, CertifierConfig, Verdict};
use lme_core::io::{
    certification_to_json, circuit_to_json, locals_to_json, mat2_to_json, state_or_table_from_str, state_to_json,
    table_from_str, table_to_json, to_json_string, StateOrTable,
};
use lme_core::phasecompiler::{evaluate_circuit, extract_phase_table, interaction_degree, moebius_decompose};
use lme_core::protosim::{
    build_ensemble, encode_bits, entangle_ancillas, local_leak_check, third_party_lock_demo, verify_maximal,
    ControlledGateSpec, LockDemoConfig,
};
use lme_core::qcore::{adjacency_from_edges, cut_entropy, make_family, Family};
use lme_core::stabgen::{build_stabilizers, factorization_check, hamiltonian_spectrum, projector_deviation, Factorization};
use lme_core::tracedecomp::{invariant_residual, trace_decompose};
use lme_core::{State, Table};

use crate::{Cli, CliError, Command, Common, FamilyKind, SpecKind};

type Result<T> = std::result::Result<T, CliError>;

/// All cuts are listed up to this size; beyond it only single-qubit cuts.
const ALL_CUTS_MAX_QUBITS: usize = 8;
/// Exhaustive leak checks up to this size; beyond it only single parties.
const ALL_LEAKS_MAX_QUBITS: usize = 6;
/// Parent-Hamiltonian diagonalization up to this size.
const HAMILTONIAN_MAX_QUBITS: usize = 8;

/// Round-trip tolerance for compiled circuits.
const COMPILE_CHECK_TOL: f64 = 1e-10;

pub fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    let report = match cli.command {
        Command::Analyze { state } => analyze(&read_state(&state)?)?,
        Command::Certify { state, verify_tol, max_iters, torus_grid } => {
            let mut cfg = CertifierConfig { seed: common.seed, verify_tol, max_iters, torus_grid, ..CertifierConfig::default() };
            if let Some(r) = common.restarts {
                cfg.restarts = r;
            }
            if let Some(t) = common.tol {
                cfg.cert_tol = t;
            }
            certify(&read_state(&state)?, &cfg)?
        }
        Command::Compile { input } => compile(&read_table(&input, &common)?)?,
        Command::Stabilizers { input } => stabilizers(&read_table(&input, &common)?)?,
        Command::Entangle { state, spec, joint_out } => entangle(&read_state(&state)?, spec, joint_out.as_deref(), &common)?,
        Command::Encode { input, bits } => encode(&read_table(&input, &common)?, bits.as_deref())?,
        Command::Lockdemo { max_iters } => lockdemo(&common, max_iters)?,
        Command::Make { family, n, edges, weights, table, as_table } => {
            make(family, n, edges.as_deref(), weights.as_deref(), table.as_deref(), as_table, common.seed)?
        }
    };
    emit(&report, common.out.as_deref())
}

fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let text = to_json_string(report);
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<State> {
    let text = read_text(path)?;
    match state_or_table_from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))? {
        StateOrTable::State(s) => Ok(s),
        StateOrTable::Table(t) => Ok(lme_core::qcore::flat_phase(&t)?),
    }
}

/// A phase table, read directly or extracted from a flat state.
fn read_table(path: &Path, common: &Common) -> Result<Table> {
    let text = read_text(path)?;
    match state_or_table_from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))? {
        StateOrTable::Table(t) => Ok(t),
        StateOrTable::State(s) => {
            let dev = s.flatness_deviation();
            let tol = common.tol.unwrap_or(lme_core::phasecompiler::FLAT_TOL);
            if dev > tol {
                return Err(CliError::Input(format!(
                    "{}: state is not flat (max modulus deviation {dev:.3e} > {tol:.1e}); certify it first",
                    path.display()
                )));
            }
            Ok(extract_phase_table(&s)?)
        }
    }
}

fn one_based(sites: &[usize]) -> Vec<usize> {
    sites.iter().map(|s| s + 1).collect()
}

fn analyze(state: &State) -> Result<Value> {
    let n = state.n();
    let td = trace_decompose(state);
    let inv = invariant_residual(state, &td);
    let subsets: Vec<Vec<usize>> = if n <= ALL_CUTS_MAX_QUBITS {
        // One representative per bipartition: the side holding qubit 1.
        (0..1usize << (n - 1))
            .map(|m| {
                let rest: Vec<usize> = (0..n - 1).filter(|&b| m & (1 << b) != 0).map(|b| b + 1).collect();
                let mut side = vec![0];
                side.extend(rest);
                side
            })
            .filter(|s| s.len() < n)
            .collect()
    } else {
        (0..n).map(|k| vec![k]).collect()
    };
    let mut cuts = Vec::with_capacity(subsets.len());
    for s in &subsets {
        cuts.push(json!({ "subset": one_based(s), "entropy_bits": cut_entropy(state, s)? }));
    }
    Ok(json!({
        "n": n,
        "spectra": td.spectra.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>(),
        "degenerate": td.degenerate,
        "trace_locals": locals_to_json(Some(&td.locals)),
        "trace_form": state_to_json(&td.state_t),
        "spectrum_residual": inv,
        "flatness_deviation": state.flatness_deviation(),
        "cut_entropies": cuts,
    }))
}

fn certify(state: &State, cfg: &CertifierConfig<f64>) -> Result<Value> {
    let report = certify_lme(state, cfg)?;
    if report.verdict == Verdict::Lme {
        let witness = report.witness.as_ref().ok_or_else(|| CliError::Invariant("LME verdict without witness".into()))?;
        let recheck = orthogonality_residual(state, witness)?;
        if recheck >= cfg.verify_tol {
            return Err(CliError::Invariant(format!("LME witness re-verification gave {recheck:.3e}")));
        }
    }
    Ok(certification_to_json(&report, cfg))
}

fn compile(table: &Table) -> Result<Value> {
    let circuit = moebius_decompose(table);
    let back = evaluate_circuit(&circuit);
    let err = back.max_distance(table);
    if err > COMPILE_CHECK_TOL {
        return Err(CliError::Invariant(format!("compiled circuit reproduces the table only to {err:.3e}")));
    }
    Ok(json!({
        "circuit": circuit_to_json(&circuit),
        "degree": interaction_degree(&circuit),
        "gate_count": circuit.gates().len(),
        "table": table_to_json(table),
        "round_trip_error": err,
    }))
}

fn stabilizers(table: &Table) -> Result<Value> {
    let s = build_stabilizers(table)?;
    let n = s.n();
    let mut ops = Vec::with_capacity(n);
    for k in 0..n {
        let entry = match factorization_check(&s, k)? {
            Factorization::Local(f) => json!({
                "qubit": k + 1,
                "beta": s.beta(k),
                "factorization": "local",
                "offset": f.offset,
                "f": f.f.iter().map(|(l, v)| json!({"qubit": l + 1, "f1": v})).collect::<Vec<_>>(),
                "tensor_factors": f.tensor_factors.as_ref().map(|m| m.iter().map(mat2_to_json).collect::<Vec<_>>()),
            }),
            Factorization::Nonlocal { sites, violation } => json!({
                "qubit": k + 1,
                "beta": s.beta(k),
                "factorization": "nonlocal",
                "witness_pair": [sites.0 + 1, sites.1 + 1],
                "mixed_difference": violation,
            }),
        };
        ops.push(entry);
    }
    let projector_error = projector_deviation(&s)?;
    let hamiltonian = if n <= HAMILTONIAN_MAX_QUBITS {
        let h = hamiltonian_spectrum(&s)?;
        json!({
            "ground_energy": h.eigenvalues[0],
            "gap": h.gap,
            "ground_overlap": h.ground_overlap,
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "n": n,
        "stabilizers": ops,
        "projector_error": projector_error,
        "parent_hamiltonian": hamiltonian,
    }))
}

fn entangle(state: &State, kind: SpecKind, joint_out: Option<&Path>, common: &Common) -> Result<Value> {
    let n = state.n();
    let (spec, label) = match kind {
        SpecKind::PiPhase => (ControlledGateSpec::pi_phase(n)?, "pi-phase"),
        SpecKind::Identity => (ControlledGateSpec::identity(n)?, "identity"),
        SpecKind::Witness => {
            let mut cfg = CertifierConfig { seed: common.seed, ..CertifierConfig::default() };
            if let Some(r) = common.restarts {
                cfg.restarts = r;
            }
            let report = certify_lme(state, &cfg)?;
            let Some(u) = report.witness else {
                return Err(CliError::Input(format!("no witness: certification verdict is {}", report.verdict.as_str())));
            };
            (ControlledGateSpec::from_witness(u.mats())?, "witness")
        }
    };
    let joint = entangle_ancillas(state, &spec)?;
    let rep = verify_maximal(&joint)?;
    if let Some(path) = joint_out {
        emit(&state_to_json(&joint), Some(path))?;
    }
    Ok(json!({
        "n": n,
        "spec": label,
        "controlled_unitaries": spec.pairs().iter().map(|(a, b)| [mat2_to_json(a), mat2_to_json(b)]).collect::<Vec<_>>(),
        "entropy_bits": rep.entropy_bits,
        "mixedness_deviation": rep.mixedness_deviation,
        "maximal": rep.maximal,
    }))
}

fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Input(format!("--bits: unexpected character {c:?}"))),
        })
        .collect()
}

fn encode(table: &Table, bits: Option<&str>) -> Result<Value> {
    let base = lme_core::qcore::flat_phase(table)?;
    let n = base.n();
    let ens = build_ensemble(&base)?;
    let subsets: Vec<Vec<usize>> = if n == 1 {
        Vec::new()
    } else if n <= ALL_LEAKS_MAX_QUBITS {
        (1..(1usize << n) - 1)
            .map(|m| (0..n).filter(|&k| m & (1 << (n - 1 - k)) != 0).collect())
            .collect()
    } else {
        (0..n).map(|k| vec![k]).collect()
    };
    let mut leaks = Vec::with_capacity(subsets.len());
    let mut max_leak: f64 = 0.0;
    for s in &subsets {
        let leak = local_leak_check(&ens, s)?;
        max_leak = max_leak.max(leak);
        leaks.push(json!({ "subset": one_based(s), "leak": leak }));
    }
    let encoded = match bits {
        Some(b) => Some(state_to_json(&encode_bits(&base, &parse_bits(b)?)?)),
        None => None,
    };
    Ok(json!({
        "n": n,
        "gram_max_off_diagonal": ens.gram_max_off_diagonal(),
        "gram_rank": ens.gram_rank(1e-9),
        "max_leak": max_leak,
        "leaks": leaks,
        "bits": bits,
        "encoded": encoded,
    }))
}

fn lockdemo(common: &Common, max_iters: usize) -> Result<Value> {
    let cfg = LockDemoConfig { seed: common.seed, restarts: common.restarts.unwrap_or(64), max_iters };
    let r = third_party_lock_demo::<f64>(&cfg)?;
    Ok(json!({
        "max_entropy": r.max_entropy,
        "gap_from_3": r.gap_from_3,
        "bound": "numerical: best value over seeded multi-start optimization",
        "identity_entropy": r.identity_entropy,
        "phased_x_grid_max": r.phased_x_grid_max,
        "best_params": r.best_params,
        "seed": r.seed,
        "restarts": r.restarts,
        "max_iters": max_iters,
    }))
}

fn parse_pair(item: &str, flag: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Input(format!("{flag}: cannot parse edge {item:?}; expected e.g. 1-2"));
    let (a, b) = item.trim().split_once('-').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(CliError::Input(format!("{flag}: qubit labels start at 1")));
    }
    Ok((a - 1, b - 1))
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_pair(s, "--edges")).collect()
}

fn parse_weights(text: &str) -> Result<Vec<((usize, usize), f64)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (pair, w) = item
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("--weights: expected PAIR:WEIGHT, got {item:?}")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("--weights: bad weight in {item:?}")))?;
            if !w.is_finite() {
                return Err(CliError::Input(format!("--weights: non-finite weight in {item:?}")));
            }
            Ok((parse_pair(pair, "--weights")?, w))
        })
        .collect()
}

fn infer_n(n: Option<usize>, max_label: Option<usize>, what: &str) -> Result<usize> {
    match (n, max_label) {
        (Some(n), _) => Ok(n),
        (None, Some(m)) => Ok(m + 1),
        (None, None) => Err(CliError::Input(format!("{what}: give the qubit count"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn make(
    family: FamilyKind,
    n: Option<usize>,
    edges: Option<&str>,
    weights: Option<&str>,
    table: Option<&Path>,
    as_table: bool,
    seed: u64,
) -> Result<Value> {
    let (state, table): (State, Option<Table>) = match family {
        FamilyKind::Ghz | FamilyKind::W | FamilyKind::Plus | FamilyKind::Random => {
            let n = n.ok_or_else(|| CliError::Input("give the qubit count".into()))?;
            let fam = match family {
                FamilyKind::Ghz => Family::Ghz,
                FamilyKind::W => Family::W,
                FamilyKind::Plus => Family::Plus,
                _ => Family::Random { seed },
            };
            (make_family(&fam, n)?, None)
        }
        FamilyKind::Graph => {
            let e = parse_edges(edges.unwrap_or(""))?;
            let n = infer_n(n, e.iter().map(|&(a, b)| a.max(b)).max(), "graph")?;
            let adj = adjacency_from_edges(n, &e)?;
            let t = lme_core::qcore::graph_table(n, &adj)?;
            (lme_core::qcore::flat_phase(&t)?, Some(t))
        }
        FamilyKind::WeightedGraph => {
            let w = parse_weights(weights.unwrap_or(""))?;
            let n = infer_n(n, w.iter().map(|&((a, b), _)| a.max(b)).max(), "weighted-graph")?;
            let mut gamma = vec![vec![0.0; n]; n];
            for ((a, b), v) in w {
                if a >= n || b >= n || a == b {
                    return Err(CliError::Input(format!("--weights: edge {}-{} invalid for {n} qubits", a + 1, b + 1)));
                }
                gamma[a][b] = v;
                gamma[b][a] = v;
            }
            let t = lme_core::qcore::weighted_graph_table(n, &gamma)?;
            (lme_core::qcore::flat_phase(&t)?, Some(t))
        }
        FamilyKind::Flat => {
            let path: PathBuf = table.ok_or_else(|| CliError::Input("flat: give --table FILE".into()))?.to_path_buf();
            let t = table_from_str(&read_text(&path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if let Some(n) = n {
                if n != t.n() {
                    return Err(CliError::Input(format!("table has {} qubits, requested {n}", t.n())));
                }
            }
            (lme_core::qcore::flat_phase(&t)?, Some(t))
        }
    };
    if as_table {
        let t = match table {
            Some(t) => t,
            None => extract_phase_table(&state)?,
        };
        Ok(table_to_json(&t))
    } else {
        Ok(state_to_json(&state))
    }
}
