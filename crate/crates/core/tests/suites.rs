use std::time::Instant;

use jetlift_core::check::CheckOptions;
use jetlift_core::identities::{run_suites, Corpus, Suite};
use jetlift_core::pn::Verdict;

fn run(n: usize) {
    let corpus = Corpus::standard(n).unwrap();
    for suite in Suite::ALL {
        let start = Instant::now();
        let run = run_suites(&[suite], &corpus, &CheckOptions::default()).unwrap();
        eprintln!("n={n} {suite}: {} identities in {:?}", run.report.results.len(), start.elapsed());
        for r in &run.report.results {
            assert!(r.pass, "n={n} {}: residual {:e} at {:?}", r.id, r.max_residual, r.worst_point);
            assert_eq!(r.tolerance, 1e-9);
            assert_eq!(r.points, 64);
        }
    }
}

#[test]
fn every_suite_passes_for_one_degree_of_freedom() {
    run(1);
}

#[test]
fn every_suite_passes_for_two_degrees_of_freedom() {
    run(2);
}

#[test]
fn verdicts_follow_the_torsion() {
    let corpus = Corpus::standard(1).unwrap();
    let run = run_suites(&[Suite::Theorem3], &corpus, &CheckOptions::default()).unwrap();
    assert_eq!(run.verdicts["flat"].verdict, Verdict::PnStructure);
    assert_eq!(run.verdicts["twisted"].verdict, Verdict::NotPn);
    assert_eq!(run.verdicts["mixed"].verdict, Verdict::NotPn);
    assert!(run.report.get("theorem3.lifted_torsion[flat]").is_some());
    assert!(run.report.get("theorem3.lifted_torsion[twisted]").is_none());

    let corpus = Corpus::standard(2).unwrap();
    let run = run_suites(&[Suite::Theorem3], &corpus, &CheckOptions::default()).unwrap();
    assert_eq!(run.verdicts["pushed"].verdict, Verdict::PnStructure);
    assert_eq!(run.verdicts["diag_twisted"].verdict, Verdict::NotPn);
}
