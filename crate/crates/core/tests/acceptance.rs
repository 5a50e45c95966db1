//! End-to-end acceptance run. Every criterion prints one PASS/FAIL line with
//! its runtime; the test fails if any criterion fails or exceeds its limit.

use std::time::{Duration, Instant};

use pik_core::ajohnson::{inner_degree_check, l1_rank, lower_bound_certificate, RankBound};
use pik_core::decomp::{
    build_relators, gr_rank_table, verify_direct_sum, verify_direct_sum_with, verify_t_sum, Graded,
};
use pik_core::endos::{check_mccool_relations, check_mccool_relations_with, EndoF};
use pik_core::igroup::{check_relations, RelationKind};
use pik_core::rng::Lcg64;
use pik_core::verify::{conjugacy_fuzz, normal_form_fuzz, Budgets, NORMAL_FORM_MAX_LEN};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let reports: Vec<_> = (2..=5).map(check_mccool_relations).collect();
    let instances: usize = reports.iter().map(|r| r.instances).sum();
    let failures: Vec<_> = reports.iter().flat_map(|r| r.failures.clone()).collect();
    outcome(failures.is_empty(), format!("{instances} instances, failures {failures:?}"))
}

fn criterion_2() -> Outcome {
    let reports: Vec<_> = (2..=5).map(check_relations).collect();
    let instances: usize = reports.iter().map(|r| r.instances).sum();
    let failures: Vec<_> = reports.iter().flat_map(|r| r.failures.clone()).collect();
    outcome(failures.is_empty(), format!("{instances} relators, failures {failures:?}"))
}

fn criterion_3() -> Outcome {
    let mut rng = Lcg64::new(3);
    let mut failures = Vec::new();
    for n in 3..=5 {
        let r = normal_form_fuzz(n, 500, NORMAL_FORM_MAX_LEN, &mut rng);
        assert_eq!(r.cases, 500);
        failures.extend(r.failures);
    }
    outcome(failures.is_empty(), format!("1500 words, failures {failures:?}"))
}

fn criterion_4() -> Outcome {
    let mut rng = Lcg64::new(2024);
    let budgets = Budgets { len: 8, coset: 8, nilpotency: 4 };
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [3, 4] {
        let r = conjugacy_fuzz(n, 500, 100, budgets, &mut rng).expect("fuzz runs");
        ok &= r.passed() && r.found == 500 && r.refuted == 100;
        detail.push(format!(
            "n={n}: {}/500 witnesses, {}/100 refuted {:?}",
            r.found, r.refuted, r.failures
        ));
    }
    outcome(ok, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let n3 = verify_direct_sum(3, 5).expect("n=3 certificate");
    let n4 = verify_direct_sum(4, 4).expect("n=4 certificate");
    let totals3: Vec<u64> = n3.per_degree.iter().map(|d| d.rank_total).collect();
    let j3: Vec<usize> = n3.per_degree.iter().map(|d| d.rank_j).collect();
    let y3: Vec<Vec<usize>> = n3.per_degree.iter().map(|d| d.ranks_y.clone()).collect();
    let totals4: Vec<u64> = n4.per_degree.iter().map(|d| d.rank_total).collect();
    let j4: Vec<usize> = n4.per_degree.iter().map(|d| d.rank_j).collect();
    let y4: Vec<Vec<usize>> = n4.per_degree.iter().map(|d| d.ranks_y.clone()).collect();
    let ok = n3.passed()
        && n4.passed()
        && totals3 == [10, 40, 150, 624]
        && j3 == [6, 30, 129, 570]
        && y3 == [vec![1, 3], vec![2, 8], vec![3, 18], vec![6, 48]]
        && totals4 == [36, 240, 1620]
        && j4 == [26, 210, 1539]
        && y4 == [vec![1, 3, 6], vec![2, 8, 20], vec![3, 18, 60]];
    outcome(ok, format!("n=3 J {j3:?} of {totals3:?}; n=4 J {j4:?} of {totals4:?}"))
}

fn criterion_6() -> Outcome {
    let n3 = verify_t_sum(3, 3).expect("n=3 T sum");
    let n4 = verify_t_sum(4, 3).expect("n=4 T sum");
    let t3: Vec<Vec<usize>> = n3.per_degree.iter().map(|d| d.ranks_t.clone()).collect();
    let t4: Vec<Vec<usize>> = n4.per_degree.iter().map(|d| d.ranks_t.clone()).collect();
    let ok = n3.passed()
        && n4.passed()
        && t3 == [vec![6], vec![30]]
        && t4 == [vec![14, 12], vec![126, 84]];
    outcome(ok, format!("n=3 T ranks {t3:?}; n=4 T ranks {t4:?}"))
}

fn criterion_7() -> Outcome {
    let t3 = gr_rank_table(3, 5).expect("n=3 table");
    let t4 = gr_rank_table(4, 4).expect("n=4 table");
    let q3: Vec<u64> = t3.iter().map(|r| r.quotient).collect();
    let q4: Vec<u64> = t4.iter().map(|r| r.quotient).collect();
    let ok = t3.iter().chain(&t4).all(|r| r.agrees())
        && q3 == [5, 4, 10, 21, 54]
        && q4 == [9, 10, 30, 81];
    outcome(ok, format!("n=3 gr ranks {q3:?}; n=4 gr ranks {q4:?}"))
}

fn criterion_8() -> Outcome {
    let r3: Vec<usize> = (1..=3).map(|c| l1_rank(3, c, c + 2).expect("rank")).collect();
    let r4: Vec<usize> = (1..=2).map(|c| l1_rank(4, c, c + 2).expect("rank")).collect();
    outcome(r3 == [5, 4, 10] && r4 == [9, 10], format!("n=3 {r3:?}; n=4 {r4:?}"))
}

fn criterion_9() -> Outcome {
    let expected = [((3, 1), 5), ((3, 2), 4), ((4, 1), 9), ((4, 2), 10)];
    let mut ok = true;
    let mut detail = Vec::new();
    for ((n, c), lhs) in expected {
        let b = lower_bound_certificate(n, c).expect("certificate");
        ok &= b == RankBound { lhs, certified: true };
        detail.push(format!("({n},{c}) lhs {} certified {}", b.lhs, b.certified));
    }
    outcome(ok, detail.join("; "))
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut samples = 0;
    for m in 2..=3 {
        for c in 1..=3 {
            let r = inner_degree_check(m, c, c + 2).expect("inner degrees");
            samples += r.samples.len();
            ok &= r.passed();
        }
    }
    outcome(ok, format!("{samples} commutators in F_2, F_3 with c <= 3"))
}

fn criterion_11() -> Outcome {
    let mut ok = true;
    let mut dropped = 0;
    for n in [3, 4] {
        let g = Graded::new(n, 2).expect("graded");
        let rels = build_relators(&g).expect("relators");
        for (idx, r) in rels.relators.iter().enumerate() {
            if r.relation.kind != RelationKind::Three {
                continue;
            }
            dropped += 1;
            let rep = verify_direct_sum_with(&g, &rels.without(idx), 2).expect("certificate");
            let deficit = rep.per_degree[0].deficit;
            if rep.passed() || deficit != 1 {
                eprintln!("  dropping {} gave deficit {deficit}", r.relation);
                ok = false;
            }
        }
    }
    let perturbed = check_mccool_relations_with(4, |n, i, j| {
        let chi = EndoF::chi(n, i, j).expect("valid indices");
        if (i, j) == (1, 2) {
            chi.compose(&EndoF::chi(n, 1, 3).expect("valid indices")).expect("same rank")
        } else {
            chi
        }
    });
    ok &= !perturbed.passed();
    outcome(
        ok,
        format!(
            "{dropped} dropped relators each leave deficit 1; perturbed chi breaks {} relations",
            perturbed.failures.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 McCool relations, n <= 5", criterion_1, Duration::from_secs(1)),
        ("2 presentation relations, n <= 5", criterion_2, Duration::from_secs(5)),
        ("3 normal-form faithfulness", criterion_3, Duration::from_secs(30)),
        ("4 conjugacy witnesses and refutations", criterion_4, Duration::from_secs(120)),
        ("5 direct-sum certificate", criterion_5, Duration::from_secs(120)),
        ("6 J equals the sum of the T_r", criterion_6, Duration::from_secs(120)),
        ("7 gr(I_n) ranks", criterion_7, Duration::from_secs(120)),
        ("8 Johnson lattice ranks", criterion_8, Duration::from_secs(180)),
        ("9 certified rank lower bounds", criterion_9, Duration::from_secs(180)),
        ("10 IA degree of inner automorphisms", criterion_10, Duration::from_secs(10)),
        ("11 negative controls", criterion_11, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.passed && elapsed <= limit;
        println!(
            "{} criterion {name}: {} [{:.2}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
