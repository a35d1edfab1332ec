//! Batch front-end for the Converse PDL toolkit.
//!
//! Exit codes: 0 when an answer is produced and the queried property holds,
//! 1 when the property fails (e.g. `valid` on an invalid formula), 2 on
//! usage or parse errors, 3 when a resource budget runs out.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde_json::json;

use cpdl_core::calculus::SplitSequent;
use cpdl_core::interpolation::{
    beth_definition, interpolate, verify_interpolant, Definability, Interpolation,
    InterpolationOptions,
};
use cpdl_core::prover::{
    audit_uniform, check_proof, decide, Countermodel, CyclicProof, Limits, Outcome,
};
use cpdl_core::semantics::{mc_game, KripkeModel};
use cpdl_core::syntax::{parse, Formula};
use cpdl_core::Error;

#[derive(Parser)]
#[command(name = "cpdl", version, about = "Converse PDL: satisfiability, cyclic proofs, countermodels and Craig interpolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Write the emitted proof as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    emit_proof: Option<PathBuf>,

    /// Write the emitted countermodel as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    emit_model: Option<PathBuf>,

    /// Write a Graphviz rendering of the emitted proof or model.
    #[arg(long, global = true, value_name = "PATH")]
    emit_dot: Option<PathBuf>,

    /// Additionally audit emitted or checked proofs for uniformity.
    #[arg(long, global = true)]
    uniform_audit: bool,

    /// Proof-search position budget.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    max_positions: usize,

    /// Time budget in seconds.
    #[arg(long, global = true, default_value_t = 120)]
    timeout: u64,

    /// Simplify interpolants before verification (default on).
    #[arg(long, global = true, action = ArgAction::SetTrue, conflicts_with = "no_simplify")]
    simplify: bool,

    /// Keep interpolants exactly as synthesized.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    no_simplify: bool,
}

impl Common {
    fn limits(&self) -> Limits {
        Limits {
            max_positions: self.max_positions,
            deadline: Some(Instant::now() + Duration::from_secs(self.timeout)),
        }
    }

    fn simplify_enabled(&self) -> bool {
        !self.no_simplify
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its normal form.
    Parse { formula: String },

    /// Model-check a formula at a state of a JSON model.
    Mc { model: PathBuf, state: String, formula: String },

    /// Decide satisfiability of a formula.
    Sat { formula: String },

    /// Decide validity of a formula.
    Valid { formula: String },

    /// Decide derivability of a split sequent: left formulas, then `--`,
    /// then right formulas.
    Prove {
        left: Vec<String>,
        #[arg(last = true)]
        right: Vec<String>,
    },

    /// Check a proof JSON against a stated split sequent.
    CheckProof {
        proof: PathBuf,
        left: Vec<String>,
        #[arg(last = true)]
        right: Vec<String>,
    },

    /// Compute and verify a Craig interpolant for `phi |= psi`.
    Interpolate { phi: String, psi: String },

    /// Search for an explicit definition of a proposition under a formula.
    Beth { phi: String, p: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &cli.common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit(_) | Error::Timeout => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: &Command, common: &Common) -> Result<ExitCode, Error> {
    match command {
        Command::Parse { formula } => {
            let f = parse(formula)?;
            if common.json {
                println!("{}", json!({ "formula": f.to_string() }));
            } else {
                println!("{f}");
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Mc { model, state, formula } => {
            let model_text = read(model)?;
            let m = KripkeModel::from_json(&model_text)?;
            let s = m
                .state_id(state)
                .ok_or_else(|| Error::Model(format!("unknown state {state:?}")))?;
            let f = parse(formula)?;
            let compositional = m.satisfies(s, &f);
            let game = mc_game(&m, s, &f);
            if compositional != game {
                return Err(Error::Internal(
                    "game and compositional model checking disagree".into(),
                ));
            }
            if common.json {
                println!("{}", json!({ "state": state, "holds": compositional }));
            } else {
                println!("{compositional}");
            }
            Ok(fail_unless(compositional))
        }

        Command::Sat { formula } => {
            let f = parse(formula)?;
            let seq = SplitSequent::unfocused([f], []);
            let outcome = decide(&seq, &common.limits())?;
            emit(&outcome, &seq, common)?;
            match outcome {
                Outcome::Sat(cm) => {
                    report(common, "sat", &sat_json(&cm));
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Proof(_) => {
                    report(common, "unsat", &json!({ "result": "unsat" }));
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Valid { formula } => {
            let f = parse(formula)?;
            let seq = SplitSequent::unfocused([f.negate()], []);
            let outcome = decide(&seq, &common.limits())?;
            audit_if_requested(&outcome, &seq, common)?;
            emit(&outcome, &seq, common)?;
            match outcome {
                Outcome::Proof(_) => {
                    report(common, "valid", &json!({ "result": "valid" }));
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Sat(cm) => {
                    report(common, "invalid", &sat_json(&cm));
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Prove { left, right } => {
            let seq = parse_sequent(left, right)?;
            let outcome = decide(&seq, &common.limits())?;
            audit_if_requested(&outcome, &seq, common)?;
            emit(&outcome, &seq, common)?;
            match outcome {
                Outcome::Proof(proof) => {
                    report(
                        common,
                        "proved",
                        &json!({ "result": "proved", "nodes": proof.len() }),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Sat(cm) => {
                    report(common, "satisfiable", &sat_json(&cm));
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::CheckProof { proof, left, right } => {
            let seq = parse_sequent(left, right)?;
            let proof = CyclicProof::from_json(&read(proof)?)?;
            let mut violations = check_proof(&proof, &seq);
            if common.uniform_audit {
                violations.extend(audit_uniform(&proof, &seq));
            }
            if let Some(path) = &common.emit_dot {
                fs::write(path, proof.to_dot()).map_err(io_error)?;
            }
            if violations.is_empty() {
                report(common, "ok", &json!({ "result": "ok" }));
                Ok(ExitCode::SUCCESS)
            } else {
                let rendered: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                if common.json {
                    println!("{}", json!({ "result": "invalid", "violations": rendered }));
                } else {
                    for v in &rendered {
                        println!("violation: {v}");
                    }
                }
                Ok(ExitCode::from(1))
            }
        }

        Command::Interpolate { phi, psi } => {
            let phi = parse(phi)?;
            let psi = parse(psi)?;
            let options = InterpolationOptions {
                limits: common.limits(),
                simplify: common.simplify_enabled(),
            };
            match interpolate(&phi, &psi, &options)? {
                Interpolation::Interpolant(result) => {
                    let report_data = verify_interpolant(
                        &phi,
                        &psi,
                        &result.theta,
                        &common.limits(),
                    )?;
                    if let Some(path) = &common.emit_proof {
                        fs::write(path, result.proof_phi_theta.to_json()).map_err(io_error)?;
                    }
                    if common.json {
                        println!(
                            "{}",
                            json!({
                                "result": "interpolant",
                                "theta": result.theta.to_string(),
                                "vocab_ok": report_data.vocab_ok,
                                "theta_implies_psi": report_data.theta_implies_psi.is_ok(),
                                "phi_implies_theta": report_data.phi_implies_theta.is_ok(),
                            })
                        );
                    } else {
                        println!("interpolant: {}", result.theta);
                        println!("vocabulary check: ok");
                        println!("entailment {} |= {}: proved", result.theta, psi);
                        println!("entailment {} |= {}: proved", phi, result.theta);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Interpolation::NotValid(cm) => {
                    emit_model(&cm, common)?;
                    report(common, "not valid", &sat_json(&cm));
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Beth { phi, p } => {
            let phi = parse(phi)?;
            let options = InterpolationOptions {
                limits: common.limits(),
                simplify: common.simplify_enabled(),
            };
            match beth_definition(&phi, p, &options)? {
                Definability::Defined { chi, .. } => {
                    if common.json {
                        println!("{}", json!({ "result": "defined", "chi": chi.to_string() }));
                    } else {
                        println!("definition: {chi}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Definability::NotImplicit(cm) => {
                    emit_model(&cm, common)?;
                    report(common, "not implicitly defined", &sat_json(&cm));
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn parse_sequent(left: &[String], right: &[String]) -> Result<SplitSequent, Error> {
    let parse_all = |texts: &[String]| -> Result<Vec<Formula>, Error> {
        texts.iter().map(|t| parse(t)).collect()
    };
    Ok(SplitSequent::unfocused(parse_all(left)?, parse_all(right)?))
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(io_error)
}

fn io_error(e: std::io::Error) -> Error {
    Error::Model(e.to_string())
}

fn fail_unless(holds: bool) -> ExitCode {
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn report(common: &Common, human: &str, machine: &serde_json::Value) {
    if common.json {
        println!("{machine}");
    } else {
        println!("{human}");
    }
}

fn sat_json(cm: &Countermodel) -> serde_json::Value {
    json!({
        "result": "sat",
        "witness": format!("s{}", cm.witness),
        "states": cm.model.num_states(),
    })
}

fn emit(outcome: &Outcome, seq: &SplitSequent, common: &Common) -> Result<(), Error> {
    match outcome {
        Outcome::Proof(proof) => {
            debug_assert!(check_proof(proof, seq).is_empty());
            if let Some(path) = &common.emit_proof {
                fs::write(path, proof.to_json()).map_err(io_error)?;
            }
            if let Some(path) = &common.emit_dot {
                fs::write(path, proof.to_dot()).map_err(io_error)?;
            }
        }
        Outcome::Sat(cm) => emit_model(cm, common)?,
    }
    Ok(())
}

fn emit_model(cm: &Countermodel, common: &Common) -> Result<(), Error> {
    if let Some(path) = &common.emit_model {
        fs::write(path, cm.model.to_json()).map_err(io_error)?;
    }
    if let Some(path) = &common.emit_dot {
        fs::write(path, cm.model.to_dot()).map_err(io_error)?;
    }
    Ok(())
}

fn audit_if_requested(
    outcome: &Outcome,
    seq: &SplitSequent,
    common: &Common,
) -> Result<(), Error> {
    if !common.uniform_audit {
        return Ok(());
    }
    if let Outcome::Proof(proof) = outcome {
        let violations = audit_uniform(proof, seq);
        if let Some(v) = violations.first() {
            return Err(Error::NonUniformProof(v.to_string()));
        }
    }
    Ok(())
}
