// temporary debug test
mod common;
use cpdl_core::calculus::SplitSequent;
use cpdl_core::prover::{audit_uniform, decide, CyclicProof, Limits, Outcome};
use cpdl_core::syntax::parse;

#[test]
fn audit_pre_and_post_serialization() {
    let seq = SplitSequent::unfocused(
        [parse("<a*>p").unwrap(), parse("[a*](~p & q)").unwrap()],
        [],
    );
    let Outcome::Proof(proof) = decide(&seq, &Limits::default()).unwrap() else { panic!() };
    let pre = audit_uniform(&proof, &seq);
    println!("pre-serialization violations: {pre:?}");
    let loaded = CyclicProof::from_json(&proof.to_json()).unwrap();
    let post = audit_uniform(&loaded, &seq);
    println!("post-serialization violations: {post:?}");
    for (i, (a, b)) in proof.nodes.iter().zip(loaded.nodes.iter()).enumerate() {
        if a.principal != b.principal || a.sequent != b.sequent || a.rule != b.rule {
            println!("node {i} differs:\n  pre:  {:?} {:?}\n  post: {:?} {:?}", a.rule, a.principal, b.rule, b.principal);
        }
    }
    assert_eq!(pre.len(), post.len());
}
