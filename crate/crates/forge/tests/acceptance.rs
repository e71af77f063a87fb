//! End-to-end acceptance run: one numbered check per guarantee, each
//! printing its own pass/fail line. Every tolerance here is exact; the
//! comparisons are equalities of integers, booleans and rationals.

use forge::suites::{run_all, run_suite, SuiteParams};

fn params(depth: Option<u8>, branch: Option<u8>, samples: Option<u64>) -> SuiteParams {
    SuiteParams {
        depth,
        branch,
        seed: 7,
        samples,
        max_nodes: None,
    }
}

fn gate(number: u32, label: &str, report: &forge::cert::SuiteReport) -> bool {
    let ok = report.ok();
    println!(
        "criterion {number:2} [{}] {label}: {} checks, {} failures ({} ms)",
        if ok { "PASS" } else { "FAIL" },
        report.instances,
        report.failures,
        report.wall_ms,
    );
    for d in &report.diagnostics {
        println!("              note: {d}");
    }
    for v in report.violations.iter().take(3) {
        println!("              violation: {} lhs={}", v.relation, v.lhs_hash);
    }
    ok
}

#[test]
fn acceptance() {
    let mut all_ok = true;

    // 1. Normal-form checker: exhaustive closed corpus at depth 2, bound 2,
    //    plus exact agreement with the naive recomputation on 100 random
    //    trees.
    let r = run_suite("normal-form", &params(Some(2), Some(2), Some(100))).unwrap();
    all_ok &= gate(1, "normal-form", &r);

    // 2. Comparability order axioms at depth 2, bound 2: reflexivity on all
    //    corpus trees, transitivity via witness composition on all held
    //    triples.
    let r = run_suite("le-max-order-axioms", &params(Some(2), Some(2), Some(2000))).unwrap();
    all_ok &= gate(2, "le-max order axioms", &r);

    // 3. Gadget bridge at depth 1, bound 2: structured embeddability of the
    //    built gadgets coincides with tree comparability, with the target
    //    re-closed at the injective-refinement bound where needed.
    let r = run_suite("gt-embed-bridge", &params(Some(1), Some(2), None)).unwrap();
    all_ok &= gate(3, "gadget embedding bridge", &r);

    // 4. Rigidity and equality-isomorphism coincidence on the full depth 1,
    //    bound 2 corpus.
    let r1 = run_suite("gt-rigidity", &params(Some(1), Some(2), None)).unwrap();
    let r2 = run_suite("gt-iso-equality", &params(Some(1), Some(2), None)).unwrap();
    all_ok &= gate(4, "gadget rigidity", &r1);
    all_ok &= gate(4, "gadget iso-equality", &r2);

    // 5. Epimorphism gadgets: isomorphism bridge on graphs up to four
    //    vertices, the automorphism product formula, and the extension
    //    predicate against brute force.
    let r1 = run_suite("epi-iso-bridge", &params(None, None, None)).unwrap();
    let r2 = run_suite("epi-extension", &params(None, None, Some(300))).unwrap();
    all_ok &= gate(5, "epi iso bridge and product formula", &r1);
    all_ok &= gate(5, "epi extension predicate", &r2);

    // 6. Colored sums: decision procedure against the enumeration oracle on
    //    ten thousand seeded pairs, the pinned order facts, and the identity
    //    bridge on graphs up to four vertices.
    let r1 = run_suite("colored-dp-oracle", &params(None, None, Some(10_000))).unwrap();
    let r2 = run_suite("colored-identity", &params(Some(2), Some(2), None)).unwrap();
    all_ok &= gate(6, "colored decision vs oracle", &r1);
    all_ok &= gate(6, "colored identity bridge", &r2);

    // 7. Branch spaces at depth 1, bound 2: exact ultrametric and fork
    //    distances, isometry iff tree equality, discrete round-trips.
    let r1 = run_suite("metric-forks", &params(Some(1), Some(2), None)).unwrap();
    let r2 = run_suite("metric-bridges", &params(Some(1), Some(2), None)).unwrap();
    all_ok &= gate(7, "metric forks", &r1);
    all_ok &= gate(7, "metric bridges", &r2);

    // 8. Norms: sandwich bound on ten thousand seeded vectors in dimensions
    //    two to six, signed pair values, strongly-extreme certificates in
    //    dimensions two to four, and the signed-embedding biconditional on
    //    all graph pairs up to five vertices.
    let r1 = run_suite("norm-sandwich", &params(None, None, Some(10_000))).unwrap();
    let r2 = run_suite("norm-li-bridge", &params(None, None, None)).unwrap();
    all_ok &= gate(8, "norm sandwich and certificates", &r1);
    all_ok &= gate(8, "norm signed-embedding bridge", &r2);

    // 9. Saturation engine on one hundred seeded setups, with corrupted
    //    variants detected.
    let r = run_suite("saturation", &params(None, None, Some(100))).unwrap();
    all_ok &= gate(9, "saturation engine", &r);

    assert!(all_ok, "some acceptance criteria failed");
}

#[test]
fn determinism() {
    // 10. Two consecutive full runs with identical seeds serialize to
    //     identical bytes, certificates included.
    let p = SuiteParams {
        depth: None,
        branch: None,
        seed: 7,
        samples: Some(200),
        max_nodes: None,
    };
    let first = run_all(&p).unwrap();
    let second = run_all(&p).unwrap();
    let a = serde_json::to_string(&first).unwrap();
    let b = serde_json::to_string(&second).unwrap();
    println!(
        "criterion 10 [{}] determinism: {} report bytes",
        if a == b { "PASS" } else { "FAIL" },
        a.len()
    );
    assert_eq!(a, b, "reports must be byte-identical across runs");
}
