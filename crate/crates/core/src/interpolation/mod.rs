//! Craig interpolation.
//!
//! Given `phi |= psi`, the prover derives the split sequent with the negated
//! conclusion on the left and the premise on the right; the interpolant is
//! then assembled over the cluster decomposition of that proof, exits first:
//! singleton clusters combine their children's interpolants rule by rule,
//! proper clusters go through the quasi-proof synthesis. A cluster focused
//! on the left is handled by mirroring: interpolate the swapped sequent and
//! negate. Every interpolant leaving this module has been verified: the
//! vocabulary check is syntactic, and both entailments are established by
//! fresh prover runs whose proofs pass the independent checker.

mod clusters;
mod maehara;
mod quasi;
mod simplify;

pub use clusters::{clusters, Cluster, ClusterDecomposition};
pub use maehara::maehara_step;
pub use quasi::{quasi_to_dot, QKind, QNode, QuasiProof};
pub use simplify::simplify;

use std::collections::BTreeMap;

use crate::calculus::{AnnotatedSequent, SplitSequent};
use crate::error::Error;
use crate::prover::{check_proof, decide, Countermodel, CyclicProof, Limits, Outcome};
use crate::syntax::{Formula, Vocabulary};

/// A verified interpolant for `phi |= psi`, together with the checked proofs
/// of both entailments.
#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub phi: Formula,
    pub psi: Formula,
    pub theta: Formula,
    /// Proof of `theta |= psi`.
    pub proof_theta_psi: CyclicProof,
    /// Proof of `phi |= theta`.
    pub proof_phi_theta: CyclicProof,
    pub vocab_ok: bool,
}

/// Outcome of an interpolation query.
#[derive(Clone, Debug)]
pub enum Interpolation {
    Interpolant(InterpolationResult),
    /// The implication fails; the model satisfies `phi` and refutes `psi` at
    /// its witness.
    NotValid(Countermodel),
}

#[derive(Clone, Debug)]
pub struct InterpolationOptions {
    pub limits: Limits,
    pub simplify: bool,
}

impl Default for InterpolationOptions {
    fn default() -> Self {
        InterpolationOptions { limits: Limits::default(), simplify: true }
    }
}

/// Computes and verifies an interpolant for `phi |= psi`, or returns a
/// countermodel of the implication.
pub fn interpolate(
    phi: &Formula,
    psi: &Formula,
    options: &InterpolationOptions,
) -> Result<Interpolation, Error> {
    let root = SplitSequent::unfocused([psi.negate()], [phi.clone()]);
    let proof = match decide(&root, &options.limits)? {
        Outcome::Sat(cm) => return Ok(Interpolation::NotValid(cm)),
        Outcome::Proof(proof) => proof,
    };
    let theta = interpolant_from_proof(&proof)?;
    let theta = if options.simplify { simplify(&theta) } else { theta };

    let report = verify_interpolant(phi, psi, &theta, &options.limits)?;
    match report.into_result() {
        Ok((proof_theta_psi, proof_phi_theta)) => {
            Ok(Interpolation::Interpolant(InterpolationResult {
                phi: phi.clone(),
                psi: psi.clone(),
                theta,
                proof_theta_psi,
                proof_phi_theta,
                vocab_ok: true,
            }))
        }
        Err(reason) => Err(Error::VerificationFailure(format!(
            "synthesized interpolant {theta} failed verification: {reason}"
        ))),
    }
}

/// The interpolant of the root of a checked proof of a split sequent,
/// assembled over the cluster decomposition.
pub fn interpolant_from_proof(proof: &CyclicProof) -> Result<Formula, Error> {
    let decomp = clusters(proof);
    let mut thetas: Vec<Option<Formula>> = vec![None; proof.nodes.len()];

    for cluster in &decomp.clusters {
        let theta = if cluster.proper {
            proper_cluster_theta(proof, cluster, &decomp, &thetas)?
        } else {
            let node = cluster.root;
            let pn = &proof.nodes[node];
            if pn.rule.is_none()
                && !pn.sequent.left.is_empty()
                && !pn.sequent.right.is_empty()
            {
                return Err(Error::Internal(
                    "cannot interpolate a proof with open assumptions".into(),
                ));
            }
            let child_thetas: Vec<Formula> = pn
                .children
                .iter()
                .map(|&c| {
                    thetas[c]
                        .clone()
                        .ok_or_else(|| Error::Internal("child interpolant missing".into()))
                })
                .collect::<Result<_, _>>()?;
            maehara_step(proof, node, &child_thetas)?
        };
        thetas[cluster.root] = Some(theta);
    }

    thetas[proof.root]
        .clone()
        .ok_or_else(|| Error::Internal("no interpolant assigned to the proof root".into()))
}

fn proper_cluster_theta(
    proof: &CyclicProof,
    cluster: &Cluster,
    decomp: &ClusterDecomposition,
    thetas: &[Option<Formula>],
) -> Result<Formula, Error> {
    // Degenerate components never occur inside proper clusters (audited),
    // but the root sequent itself may have one.
    let root_seq = &proof.nodes[cluster.root].sequent;
    if root_seq.left.is_empty() {
        return Ok(Formula::bot());
    }
    if root_seq.right.is_empty() {
        return Ok(Formula::top());
    }

    let view = quasi::ClusterView::new(proof, cluster)?;
    view.audit(decomp)?;
    let q = quasi::build_quasi_proof(&view)?;

    // Exit interpolants by (normalized) right component: the conjunction of
    // the interpolants of all exit nodes carrying that component.
    let mut theta_of_label: BTreeMap<AnnotatedSequent, Formula> = BTreeMap::new();
    for &exit in &cluster.exits {
        let theta = thetas[exit]
            .clone()
            .ok_or_else(|| Error::MissingExitInterpolant(format!("node {exit}")))?;
        let theta = view.exit_theta(&theta);
        let label = view.right(exit).clone();
        theta_of_label
            .entry(label)
            .and_modify(|t| *t = Formula::and(t.clone(), theta.clone()))
            .or_insert(theta);
    }

    let theta = quasi::pre_interpolants(&q, &theta_of_label)?;
    Ok(if view.mirror { theta.negate() } else { theta })
}

/// The three checks an interpolant must pass; each is reported on its own.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub vocab_ok: bool,
    pub shared_vocabulary: Vocabulary,
    /// `theta |= psi`, with a checked proof on success.
    pub theta_implies_psi: Result<CyclicProof, String>,
    /// `phi |= theta`, with a checked proof on success.
    pub phi_implies_theta: Result<CyclicProof, String>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.vocab_ok && self.theta_implies_psi.is_ok() && self.phi_implies_theta.is_ok()
    }

    fn into_result(self) -> Result<(CyclicProof, CyclicProof), String> {
        if !self.vocab_ok {
            return Err("vocabulary of the interpolant is not shared".into());
        }
        match (self.theta_implies_psi, self.phi_implies_theta) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            (Err(e), _) => Err(format!("first entailment fails: {e}")),
            (_, Err(e)) => Err(format!("second entailment fails: {e}")),
        }
    }
}

/// Verifies a claimed interpolant: the vocabulary inclusion syntactically,
/// and both entailments by prover runs whose proofs are checked again.
pub fn verify_interpolant(
    phi: &Formula,
    psi: &Formula,
    theta: &Formula,
    limits: &Limits,
) -> Result<VerificationReport, Error> {
    let shared = phi.vocabulary().intersection(&psi.vocabulary());
    let vocab_ok = theta.vocabulary().is_subset(&shared);

    let entailment = |premise: &Formula, conclusion: &Formula| -> Result<CyclicProof, String> {
        let seq = SplitSequent::unfocused([premise.clone(), conclusion.negate()], []);
        match decide(&seq, limits) {
            Ok(Outcome::Proof(proof)) => {
                let violations = check_proof(&proof, &seq);
                if violations.is_empty() {
                    Ok(proof)
                } else {
                    Err(format!("emitted proof fails the checker: {}", violations[0]))
                }
            }
            Ok(Outcome::Sat(cm)) => Err(format!(
                "countermodel with {} states refutes the entailment",
                cm.model.num_states()
            )),
            Err(e) => Err(e.to_string()),
        }
    };

    Ok(VerificationReport {
        vocab_ok,
        shared_vocabulary: shared,
        theta_implies_psi: entailment(theta, psi),
        phi_implies_theta: entailment(phi, theta),
    })
}

/// Outcome of an explicit-definition query.
#[derive(Clone, Debug)]
pub enum Definability {
    /// `chi` explicitly defines `p` inside `phi`: `phi |= p <-> chi` and
    /// `chi` avoids `p`.
    Defined { chi: Formula, result: InterpolationResult },
    /// `p` is not implicitly defined; the model witnesses two valuations.
    NotImplicit(Countermodel),
}

/// Searches for an explicit definition of `p` under `phi`: when two copies
/// of `phi` force their copies of `p` to agree, the interpolant of
/// `phi(p0) & p0 |= phi(p1) -> p1` avoids both copies and defines `p`.
pub fn beth_definition(
    phi: &Formula,
    p: &str,
    options: &InterpolationOptions,
) -> Result<Definability, Error> {
    let voc = phi.vocabulary();
    let fresh = |suffix: &str| -> String {
        let mut name = format!("{p}{suffix}");
        while voc.props.iter().any(|q| q.as_ref() == name) {
            name.push('x');
        }
        name
    };
    let p0 = fresh("0");
    let p1 = fresh("1");
    let phi0 = phi.substitute(p, &Formula::prop(&p0));
    let phi1 = phi.substitute(p, &Formula::prop(&p1));

    let premise = Formula::and(phi0, Formula::prop(&p0));
    let conclusion = Formula::or(phi1.negate(), Formula::prop(&p1));
    match interpolate(&premise, &conclusion, options)? {
        Interpolation::Interpolant(result) => {
            Ok(Definability::Defined { chi: result.theta.clone(), result })
        }
        Interpolation::NotValid(cm) => Ok(Definability::NotImplicit(cm)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn run(phi: &str, psi: &str) -> Interpolation {
        interpolate(&parse(phi).unwrap(), &parse(psi).unwrap(), &InterpolationOptions::default())
            .unwrap()
    }

    #[test]
    fn shared_atom() {
        match run("p & q", "p | r") {
            Interpolation::Interpolant(result) => {
                let voc = result.theta.vocabulary();
                assert!(voc.actions.is_empty());
                assert!(voc.props.iter().all(|q| q.as_ref() == "p"));
            }
            Interpolation::NotValid(_) => panic!("implication is valid"),
        }
    }

    #[test]
    fn self_implication() {
        match run("p", "p") {
            Interpolation::Interpolant(result) => assert!(result.vocab_ok),
            Interpolation::NotValid(_) => panic!("implication is valid"),
        }
    }

    #[test]
    fn invalid_implication_yields_countermodel() {
        match run("p", "q") {
            Interpolation::NotValid(cm) => {
                assert!(cm.model.satisfies(cm.witness, &parse("p & ~q").unwrap()));
            }
            Interpolation::Interpolant(_) => panic!("p does not entail q"),
        }
    }

    #[test]
    fn star_fixpoint_interpolates_through_a_cycle() {
        match run("<a*>p", "<a*>(p | q)") {
            Interpolation::Interpolant(result) => {
                let voc = result.theta.vocabulary();
                assert!(voc.props.iter().all(|x| x.as_ref() == "p"));
                assert!(voc.actions.iter().all(|x| x.as_ref() == "a"));
            }
            Interpolation::NotValid(_) => panic!("implication is valid"),
        }
    }

    #[test]
    fn verify_rejects_vocabulary_violations() {
        let limits = Limits::default();
        let report = verify_interpolant(
            &parse("p").unwrap(),
            &parse("p").unwrap(),
            &parse("q").unwrap(),
            &limits,
        )
        .unwrap();
        assert!(!report.vocab_ok);

        let report = verify_interpolant(
            &parse("p").unwrap(),
            &parse("p | q").unwrap(),
            &parse("p | q").unwrap(),
            &limits,
        )
        .unwrap();
        assert!(!report.vocab_ok);
    }

    #[test]
    fn beth_recovers_a_definition() {
        // p <-> q in negation normal form.
        let phi = parse("(~p | q) & (p | ~q)").unwrap();
        match beth_definition(&phi, "p", &InterpolationOptions::default()).unwrap() {
            Definability::Defined { chi, .. } => {
                let voc = chi.vocabulary();
                assert!(voc.props.iter().all(|x| x.as_ref() == "q"));
                // phi |= p <-> chi, checked by the prover both ways.
                let limits = Limits::default();
                for implication in [
                    Formula::implies(Formula::and(phi.clone(), parse("p").unwrap()), chi.clone()),
                    Formula::implies(Formula::and(phi.clone(), chi.clone()), parse("p").unwrap()),
                ] {
                    assert!(crate::prover::valid(&implication, &limits).unwrap().is_proof());
                }
            }
            Definability::NotImplicit(_) => panic!("p is implicitly defined"),
        }
    }

    #[test]
    fn beth_detects_non_definability() {
        match beth_definition(&Formula::top(), "p", &InterpolationOptions::default()).unwrap() {
            Definability::NotImplicit(_) => {}
            Definability::Defined { .. } => panic!("truth does not define p"),
        }
    }

    #[test]
    fn contradictory_phi_defines_vacuously() {
        let phi = parse("p & ~p").unwrap();
        match beth_definition(&phi, "p", &InterpolationOptions::default()).unwrap() {
            Definability::Defined { result, .. } => assert!(result.vocab_ok),
            Definability::NotImplicit(_) => panic!("a contradiction defines everything"),
        }
    }
}
