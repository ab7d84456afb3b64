//! `lix`: command-line front end.
//!
//! Exit codes: 0 success, 1 mathematical negative (with a report), 2 usage or schema error.
//! Reports go to standard output as pretty-printed JSON; diagnostics go to standard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use lix_core::ainfty::AInftyAlgebra;
use lix_core::defcomplex::{def_complex, intrinsic_formality_check, is_quasi_iso, DefComplex, Verdict};
use lix_core::graded::{Element, GradedSpace};
use lix_core::io::{
    algebra_to_json, certificate_to_json, element_to_json, parse_ainfty, parse_ainfty_unchecked, parse_algebra,
    parse_certificate, parse_htt, weight_to_json, Convention, ParseOptions,
};
use lix_core::linfty::CurvedAlgebra;
use lix_core::power::check_master_equation;
use lix_core::solver::{check_certificate, solve_mc, Hypothesis, SolveError, Step};
use lix_core::specseq::{page_table, r_max};

const DEFAULT_MAX_DIM: usize = 64;

#[derive(Parser)]
#[command(name = "lix", version, about = "Exact workbench for curved L-infinity algebras")]
struct Cli {
    /// Input degrees are unshifted: subtract 1 and apply the decalage sign to every bracket.
    #[arg(long, global = true)]
    unshifted: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check filtration compatibility and the relations (or Stasheff relations for `ops` files).
    Validate { file: PathBuf },
    /// Evaluate both master-equation forms and compare with the relation check.
    Oracle { file: PathBuf },
    /// Dimensions of the page E_r.
    Specseq {
        #[arg(long)]
        page: u32,
        #[arg(long)]
        total_degree: Option<i64>,
        file: PathBuf,
    },
    /// Solve the MC equation by repeated twisting, printing a certificate.
    SolveMc {
        #[arg(long)]
        r: u32,
        file: PathBuf,
    },
    /// Replay a certificate against an algebra.
    Verify { algebra: PathBuf, certificate: PathBuf },
    /// Materialize Def(A, B) through a weight cap.
    Defcomplex {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        weight_cap: usize,
        /// Include the full bracket table in the report.
        #[arg(long)]
        emit: bool,
    },
    /// Intrinsic formality check of a strict algebra against transferred data.
    Formality {
        h: PathBuf,
        htt: PathBuf,
        #[arg(long)]
        weight_cap: usize,
    },
}

enum Outcome {
    Success(Value),
    Negative(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let (v, code) = match out {
                Outcome::Success(v) => (v, 0),
                Outcome::Negative(v) => (v, 1),
            };
            println!("{}", serde_json::to_string_pretty(&v).expect("reports serialize"));
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("lix: {msg}");
            ExitCode::from(2)
        }
    }
}

fn options(cli: &Cli) -> Result<ParseOptions, String> {
    let max_dim = match std::env::var("LIX_MAX_DIM") {
        Ok(s) => s.trim().parse::<usize>().map_err(|_| format!("LIX_MAX_DIM must be a nonnegative integer, got {s:?}"))?,
        Err(_) => DEFAULT_MAX_DIM,
    };
    let convention = if cli.unshifted { Convention::Unshifted } else { Convention::Shifted };
    Ok(ParseOptions { convention, max_dim: Some(max_dim) })
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_algebra(path: &Path, opts: &ParseOptions) -> Result<CurvedAlgebra, String> {
    parse_algebra(&read(path)?, opts).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_ainfty(path: &Path, opts: &ParseOptions) -> Result<AInftyAlgebra, String> {
    parse_ainfty(&read(path)?, opts).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let opts = options(cli)?;
    match &cli.command {
        Command::Validate { file } => validate(file, &opts),
        Command::Oracle { file } => oracle(&load_algebra(file, &opts)?),
        Command::Specseq { page, total_degree, file } => {
            let alg = load_algebra(file, &opts)?;
            let entries = page_table(&alg, *page, *total_degree).map_err(|e| e.to_string())?;
            let mut v = json!({"r": page, "rMax": r_max(&alg), "entries": entries});
            if let Some(n) = total_degree {
                v["totalDegree"] = json!(n);
            }
            Ok(Outcome::Success(v))
        }
        Command::SolveMc { r, file } => solve(&load_algebra(file, &opts)?, *r),
        Command::Verify { algebra, certificate } => {
            let alg = load_algebra(algebra, &opts)?;
            let cert = parse_certificate(alg.space(), &read(certificate)?)
                .map_err(|e| format!("{}: {e}", certificate.display()))?;
            Ok(match check_certificate(&alg, &cert) {
                Ok(()) => Outcome::Success(json!({"valid": true})),
                Err(reason) => Outcome::Negative(json!({"valid": false, "reason": reason})),
            })
        }
        Command::Defcomplex { a, b, weight_cap, emit } => {
            let dc = def_complex(&load_ainfty(a, &opts)?, &load_ainfty(b, &opts)?, *weight_cap).map_err(|e| e.to_string())?;
            Ok(defcomplex_report(&dc, *emit))
        }
        Command::Formality { h, htt, weight_cap } => formality(h, htt, *weight_cap, &opts),
    }
}

fn ids(space: &GradedSpace, args: &[usize]) -> Vec<String> {
    args.iter().map(|&a| space.id(a).to_string()).collect()
}

fn validate(file: &Path, opts: &ParseOptions) -> Result<Outcome, String> {
    let text = read(file)?;
    let probe: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    if probe.get("ops").is_some() || probe.get("weightCap").is_some() {
        let alg = parse_ainfty_unchecked(&text, opts).map_err(|e| format!("{}: {e}", file.display()))?;
        let stasheff = match alg.check_stasheff() {
            Ok(()) => json!({"ok": true}),
            Err(e) => json!({"ok": false, "violation": e.to_string()}),
        };
        let ok = stasheff["ok"] == json!(true);
        let v = json!({
            "kind": "ainfty",
            "dim": alg.space().dim(),
            "weightCap": alg.weight_cap(),
            "maxArity": alg.max_arity(),
            "strict": alg.is_strict(),
            "stasheff": stasheff,
            "valid": ok,
        });
        return Ok(if ok { Outcome::Success(v) } else { Outcome::Negative(v) });
    }
    let alg = parse_algebra(&text, opts).map_err(|e| format!("{}: {e}", file.display()))?;
    let space = alg.space();
    let filtration: Vec<Value> = alg
        .check_filtration_compatibility()
        .iter()
        .map(|f| json!({"args": ids(space, &f.args), "required": f.required, "found": weight_to_json(f.found)}))
        .collect();
    let rep = alg.check_all_relations();
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| json!({"args": ids(space, &v.args), "defect": element_to_json(space, &v.defect)}))
        .collect();
    let ok = filtration.is_empty() && rep.is_ok();
    let v = json!({
        "kind": "curved-linfty",
        "dim": space.dim(),
        "maxArity": alg.max_arity(),
        "curvatureWeight": weight_to_json(alg.curvature_filtration()),
        "filtrationViolations": filtration,
        "relations": {
            "checkedThrough": rep.checked_through,
            "weightCutoff": rep.weight_cutoff,
            "tuplesChecked": rep.tuples_checked,
            "violations": violations,
        },
        "valid": ok,
    });
    Ok(if ok { Outcome::Success(v) } else { Outcome::Negative(v) })
}

fn oracle(alg: &CurvedAlgebra) -> Result<Outcome, String> {
    let space = alg.space();
    let max = alg.relation_arity_bound();
    let rep = check_master_equation(alg, max).map_err(|e| e.to_string())?;
    let relations_ok = alg.check_relations(max).is_ok();
    let fails = |f: &[Vec<usize>]| f.iter().map(|t| ids(space, t)).collect::<Vec<_>>();
    let agree = rep.form_one_ok() == relations_ok && rep.form_two_ok() == relations_ok;
    let v = json!({
        "samples": rep.samples,
        "maxArity": max,
        "formOne": {"ok": rep.form_one_ok(), "failures": fails(&rep.form_one_failures)},
        "formTwo": {"ok": rep.form_two_ok(), "failures": fails(&rep.form_two_failures)},
        "relationsOk": relations_ok,
        "agree": agree,
    });
    Ok(if agree && relations_ok { Outcome::Success(v) } else { Outcome::Negative(v) })
}

fn steps_json(space: &GradedSpace, steps: &[Step]) -> Value {
    let cert = lix_core::solver::Certificate { alpha: Element::zero(), r: 0, steps: steps.to_vec() };
    certificate_to_json(space, &cert)["steps"].clone()
}

fn solve(alg: &CurvedAlgebra, r: u32) -> Result<Outcome, String> {
    let space = alg.space();
    match solve_mc(alg, r) {
        Ok(cert) => Ok(Outcome::Success(certificate_to_json(space, &cert))),
        Err(SolveError::HypothesisFailed(Hypothesis::Obstructed { k, p, q, representative, steps })) => {
            Ok(Outcome::Negative(json!({
                "status": "hypothesis-failed",
                "reason": "obstructed",
                "k": k,
                "p": p,
                "q": q,
                "obstruction": element_to_json(space, &representative),
                "steps": steps_json(space, &steps),
            })))
        }
        Err(SolveError::HypothesisFailed(Hypothesis::CurvatureTooLow { required, found })) => {
            Ok(Outcome::Negative(json!({
                "status": "hypothesis-failed",
                "reason": "curvature-too-low",
                "required": required,
                "found": found,
            })))
        }
        Err(SolveError::RelationCheckFailed { relations, filtration }) => Ok(Outcome::Negative(json!({
            "status": "relation-check-failed",
            "relationViolations": relations.violations.len(),
            "filtrationViolations": filtration,
        }))),
        Err(e) => Err(e.to_string()),
    }
}

fn defcomplex_report(dc: &DefComplex, emit: bool) -> Outcome {
    let sp = dc.space();
    let mut layers = std::collections::BTreeMap::new();
    for i in 0..sp.dim() {
        *layers.entry((sp.weight(i), sp.degree(i))).or_insert(0usize) += 1;
    }
    let layers: Vec<Value> =
        layers.into_iter().map(|((w, d), n)| json!({"weight": w, "degree": d, "dim": n})).collect();
    let mut counts = std::collections::BTreeMap::new();
    for (args, _) in dc.algebra.entries() {
        *counts.entry(args.len().to_string()).or_insert(0usize) += 1;
    }
    let filtration_ok = dc.algebra.check_filtration_compatibility().is_empty();
    let rep = dc.algebra.check_all_relations();
    let ok = filtration_ok && rep.is_ok();
    let mut v = json!({
        "weightCap": dc.def.weight_cap(),
        "dim": sp.dim(),
        "layers": layers,
        "bracketCounts": counts,
        "filtrationCompatible": filtration_ok,
        "relations": {"ok": rep.is_ok(), "checkedThrough": rep.checked_through, "tuplesChecked": rep.tuples_checked},
    });
    if emit {
        v["algebra"] = algebra_to_json(&dc.algebra);
    }
    if ok {
        Outcome::Success(v)
    } else {
        Outcome::Negative(v)
    }
}

fn morphism_json(dc: &DefComplex, f: &Element) -> Value {
    let src = dc.def.source();
    let tgt = dc.def.target();
    let comps: Vec<Value> = dc
        .def
        .components(f)
        .into_iter()
        .map(|(w, items)| {
            let items: Vec<Value> = items
                .into_iter()
                .map(|(word, val)| json!({"word": ids(src, &word), "value": element_to_json(tgt, &val)}))
                .collect();
            json!({"weight": w, "components": items})
        })
        .collect();
    Value::Array(comps)
}

fn formality(h_path: &Path, htt_path: &Path, weight_cap: usize, opts: &ParseOptions) -> Result<Outcome, String> {
    let h = load_ainfty(h_path, opts)?;
    let (htt, original) =
        parse_htt(&h, &read(htt_path)?, opts).map_err(|e| format!("{}: {e}", htt_path.display()))?;
    let mut maps = serde_json::Map::new();
    if let Some(b) = &original {
        if let Some(i) = &htt.inclusion {
            maps.insert("inclusionQuasiIso".into(), json!(is_quasi_iso(&h, b, i)));
        }
        if let Some(p) = &htt.projection {
            maps.insert("projectionQuasiIso".into(), json!(is_quasi_iso(b, &h, p)));
        }
    }
    if maps.values().any(|v| v == &json!(false)) {
        return Err(format!("{}: HTT maps are not quasi-isomorphisms", htt_path.display()));
    }
    let rep = intrinsic_formality_check(&h, &htt, weight_cap).map_err(|e| e.to_string())?;
    let dsp = rep.twisted.space();
    let mut v = json!({
        "weightCap": weight_cap,
        "curvatureWeight": weight_to_json(rep.curvature_weight),
        "acyclicInTotalDegree1": rep.acyclic,
    });
    for (k, x) in maps {
        v[k] = x;
    }
    let success = match &rep.verdict {
        Verdict::Formal { certificate, morphism } => {
            v["verdict"] = json!("formal");
            v["certificate"] = certificate_to_json(dsp, certificate);
            v["morphism"] = morphism_json(&rep.complex, morphism);
            v["quasiIsomorphism"] = json!(true);
            true
        }
        Verdict::NotFormal { k, p, q, representative } => {
            v["verdict"] = json!("not-formal");
            v["obstruction"] = json!({
                "k": k,
                "p": p,
                "q": q,
                "barWeight": k - 1,
                "class": element_to_json(dsp, representative),
            });
            false
        }
        Verdict::Inconclusive { reason } => {
            v["verdict"] = json!("inconclusive");
            v["reason"] = json!(reason);
            false
        }
    };
    Ok(if success { Outcome::Success(v) } else { Outcome::Negative(v) })
}
