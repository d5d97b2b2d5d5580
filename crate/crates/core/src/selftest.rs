//! The acceptance suite as callable checks, shared by the `selftest` command
//! and the integration test target. All arithmetic is exact; every check
//! passes or fails with no tolerance. `cases = 100` reproduces the reference
//! sample counts; other values scale them.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;

use crate::category::{free_cover, is_admissible_epi, Morphism, PresentedObject};
use crate::diagrams::{dses_type, lemma_pl_dses, validate_3x3, validate_dses, DoubleSes};
use crate::gen::{self, GenConfig, Rng64, Strategy};
use crate::k1::{check_relation_3x3, dses_class_free, dses_class_general};
use crate::linalg::{self, BaseRing, Matrix};
use crate::resolution::{
    build_p, check_choice_independence, phi_auto, randomized_cover, round_trip_check,
    varphi_randomized, verify_construction, verify_relation_preservation, Construction,
    RelationKind,
};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: String,
    pub passed: bool,
    pub details: String,
}

impl CheckOutcome {
    fn from_failures(id: &str, total: usize, failures: Vec<String>, extra: String) -> CheckOutcome {
        let passed = failures.is_empty();
        let details = if passed {
            format!("{total} checks{extra}")
        } else {
            let shown: Vec<&str> = failures.iter().take(3).map(|s| s.as_str()).collect();
            format!(
                "{}/{} checks failed{extra}; first: {}",
                failures.len(),
                total,
                shown.join(" | ")
            )
        };
        CheckOutcome {
            id: id.to_string(),
            passed,
            details,
        }
    }
}

fn gf5() -> BaseRing {
    BaseRing::prime_field(5).unwrap()
}

fn gf7() -> BaseRing {
    BaseRing::prime_field(7).unwrap()
}

/// Criterion 1: Smith and Hermite soundness on random integer matrices.
pub fn normal_form_soundness(cases: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let mut rng = Rng64::stream(seed, 101);
    let total = cases * 10;
    let mut failures = Vec::new();
    for i in 0..total {
        let rows = 1 + rng.below(6);
        let cols = 1 + rng.below(6);
        let entries: Vec<BigInt> = (0..rows * cols)
            .map(|_| BigInt::from(rng.range_i64(-20, 20)))
            .collect();
        let a = Matrix::new(BaseRing::Integers, rows, cols, entries);
        let s = linalg::snf(&a);
        let mut bad = |msg: &str| failures.push(format!("sample {i}: {msg}"));
        if s.u.mul(&a).mul(&s.v) != s.d {
            bad("U*A*V != D");
        }
        if !linalg::is_unimodular(&s.u) || !linalg::is_unimodular(&s.v) {
            bad("transforms not unimodular");
        }
        if s.divisors.iter().any(|d| d <= &BigInt::from(0)) {
            bad("non-positive divisor");
        }
        if s.divisors
            .windows(2)
            .any(|w| !num_integer::Integer::mod_floor(&w[1], &w[0]).is_zero())
        {
            bad("divisibility chain broken");
        }
        if rows == cols {
            let det = linalg::det(&a).unwrap();
            let expect: BigInt = if s.divisors.len() == rows {
                s.divisors.iter().product()
            } else {
                BigInt::from(0)
            };
            if num_traits::Signed::abs(&det) != expect {
                bad("determinant does not match divisor product");
            }
        }
        let (h, v) = linalg::hnf(&a);
        if a.mul(&v) != h {
            bad("H != A*V");
        }
        if !linalg::is_unimodular(&v) {
            bad("Hermite transform not unimodular");
        }
        use num_traits::Zero;
        let r = linalg::rank(&a);
        for j in r..h.cols() {
            for x in 0..h.rows() {
                if !h.at(x, j).is_zero() {
                    bad("nonzero trailing Hermite column");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let mut out = CheckOutcome::from_failures(
        "1-normal-forms",
        total,
        failures,
        format!(", {} ms", elapsed.as_millis()),
    );
    if elapsed.as_secs_f64() >= 10.0 {
        out.passed = false;
        out.details.push_str(" [over the 10 s budget]");
    }
    out
}

/// Criterion 2: equal structures have the identity class.
pub fn relation1_trivial_classes(cases: usize, seed: u64) -> CheckOutcome {
    let total = cases * 5;
    let mut failures = Vec::new();
    for i in 0..total {
        let ring = if i % 2 == 0 {
            gf5()
        } else {
            BaseRing::Integers
        };
        let cfg = GenConfig::new(ring, seed);
        let d = gen::random_free_dses(&cfg, 200 + i as u64, 1 + i % 3, 1 + (i / 2) % 3);
        let t = DoubleSes::trivial(&d.f1, &d.g1);
        match dses_class_free(&t) {
            Ok(c) if c.is_identity() => {}
            Ok(c) => failures.push(format!("sample {i}: class {c}")),
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    CheckOutcome::from_failures("2-relation-1", total, failures, String::new())
}

/// Criterion 3: the (i_r, i_l; -p_l, p_r) sequence vanishes, ranks 1..=4.
pub fn lemma_pl_classes(_cases: usize, _seed: u64) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut total = 0;
    for ring in [BaseRing::Integers, gf5()] {
        for rank in 1..=4usize {
            total += 1;
            let a = PresentedObject::free(ring, rank);
            match dses_class_free(&lemma_pl_dses(&a)) {
                Ok(c) if c.is_identity() => {}
                Ok(c) => failures.push(format!("{ring:?} rank {rank}: class {c}")),
                Err(e) => failures.push(format!("{ring:?} rank {rank}: {e}")),
            }
        }
    }
    CheckOutcome::from_failures("3-lemma-pl", total, failures, String::new())
}

/// Criterion 4: the defining 3x3 relation holds on generated diagrams of all
/// four strategies.
pub fn relation2_on_generated(cases: usize, seed: u64) -> CheckOutcome {
    let per_strategy = cases * 2;
    let mut failures = Vec::new();
    let mut total = 0;
    for strategy in [Strategy::A, Strategy::B, Strategy::C, Strategy::D] {
        for i in 0..per_strategy {
            total += 1;
            let ring = if i % 2 == 0 {
                gf5()
            } else {
                BaseRing::Integers
            };
            let cfg = GenConfig::new(ring, seed);
            let t = gen::random_3x3(&cfg, 400 + i as u64, strategy);
            let rep = validate_3x3(&t);
            if !rep.is_valid() {
                failures.push(format!("{strategy:?} sample {i}: invalid: {rep}"));
                continue;
            }
            match check_relation_3x3(&t) {
                Ok(true) => {}
                Ok(false) => failures.push(format!("{strategy:?} sample {i}: relation fails")),
                Err(e) => failures.push(format!("{strategy:?} sample {i}: {e}")),
            }
        }
    }
    CheckOutcome::from_failures("4-relation-2", total, failures, String::new())
}

/// Criterion 5: phi inverts the class, with the unit group of GF(5) hit in
/// at least three nontrivial values.
pub fn phi_inversion(cases: usize, seed: u64) -> CheckOutcome {
    let total = cases * 2;
    let cfg = GenConfig::new(gf5(), seed);
    let mut failures = Vec::new();
    let mut seen = BTreeSet::new();
    for i in 0..total {
        let d = gen::random_free_dses(&cfg, 500 + i as u64, 1 + i % 2, 1 + (i / 2) % 2);
        let c = match dses_class_free(&d) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("sample {i}: {e}"));
                continue;
            }
        };
        if !c.is_identity() {
            seen.insert(c.value().clone());
        }
        match phi_auto(&d).and_then(|r| dses_class_free(&r.output)) {
            Ok(pc) => {
                if !pc.mul(&c).unwrap().is_identity() {
                    failures.push(format!("sample {i}: class not inverted"));
                }
            }
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    let distinct = seen.len();
    // the coverage requirement applies at meaningful sample sizes
    if total >= 50 && distinct < 3 {
        failures.push(format!("only {distinct} nontrivial class values exercised"));
    }
    CheckOutcome::from_failures(
        "5-phi-inversion",
        total,
        failures,
        format!(", {distinct} nontrivial values"),
    )
}

/// Criterion 6: the class of phi does not depend on the cover.
pub fn cover_independence(cases: usize, seed: u64) -> CheckOutcome {
    let total = (cases / 2).max(1);
    let mut failures = Vec::new();
    for i in 0..total {
        let ring = if i % 3 == 0 {
            BaseRing::Integers
        } else {
            gf5()
        };
        let cfg = GenConfig::new(ring, seed);
        let d = gen::random_free_dses(&cfg, 600 + i as u64, 1 + i % 2, 1 + i % 2);
        let mut rng = Rng64::stream(seed, 650 + i as u64);
        let result = (|| {
            let base = build_p(&d)?;
            for _ in 0..2 {
                let other = randomized_cover(&d, &mut rng, cfg.entry_bound)?;
                if !check_choice_independence(&d, &base, &other)? {
                    return Ok::<bool, crate::Error>(false);
                }
            }
            Ok(true)
        })();
        match result {
            Ok(true) => {}
            Ok(false) => failures.push(format!("sample {i}: classes differ across covers")),
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    CheckOutcome::from_failures("6-cover-independence", total * 2, failures, String::new())
}

/// Criterion 7: each derived construction validates and satisfies its stated
/// class identity on the split instance plus generated ones.
pub fn constructions(cases: usize, seed: u64) -> CheckOutcome {
    let per = (cases / 10).max(10);
    let mut failures = Vec::new();
    let mut total = 0;
    for c in Construction::all() {
        for i in 0..=per {
            total += 1;
            let ring = if i % 2 == 0 {
                gf5()
            } else {
                BaseRing::Integers
            };
            let cfg = GenConfig::new(ring, seed);
            let twist = i > 0;
            let t = gen::construction_input(c, &cfg, 700 + i as u64, twist);
            match verify_construction(c, &t) {
                Ok(rep) if rep.is_valid() => {}
                Ok(rep) => failures.push(format!("{c:?} sample {i} ({ring:?}): {rep}")),
                Err(e) => failures.push(format!("{c:?} sample {i} ({ring:?}): {e}")),
            }
        }
    }
    CheckOutcome::from_failures("7-constructions", total, failures, String::new())
}

/// Criterion 8: every relation-preservation lemma kind passes on generated
/// instances.
pub fn relation_preservation(cases: usize, seed: u64) -> CheckOutcome {
    let per = (cases / 10).max(10);
    let mut failures = Vec::new();
    let mut total = 0;
    for kind in RelationKind::all() {
        for i in 0..=per {
            total += 1;
            let ring = if i % 2 == 0 {
                gf5()
            } else {
                BaseRing::Integers
            };
            let cfg = GenConfig::new(ring, seed);
            let t = if i == 0 {
                gen::relation_input_split(kind, &cfg)
            } else {
                gen::relation_input(kind, &cfg, 800 + i as u64)
            };
            match verify_relation_preservation(kind, &t) {
                Ok(rep) if rep.is_valid() => {}
                Ok(rep) => failures.push(format!("{} sample {i} ({ring:?}): {rep}", kind.name())),
                Err(e) => failures.push(format!("{} sample {i} ({ring:?}): {e}", kind.name())),
            }
        }
    }
    CheckOutcome::from_failures("8-relation-preservation", total, failures, String::new())
}

/// Criterion 9: the threefold resolution chain inverts classes over GF(7)
/// and over the integers on free inputs, inside the time budget.
pub fn resolution_round_trip(cases: usize, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut nontrivial = [0usize; 2];
    let mut total = 0;
    for (which, ring) in [(0usize, gf7()), (1usize, BaseRing::Integers)] {
        let cfg = GenConfig::new(ring, seed);
        for i in 0..cases {
            total += 1;
            let d = gen::random_free_dses(&cfg, 900 + i as u64, 1 + i % 2, 1 + (i / 3) % 2);
            match dses_class_free(&d) {
                Ok(c) if !c.is_identity() => nontrivial[which] += 1,
                _ => {}
            }
            match round_trip_check(&d) {
                Ok(true) => {}
                Ok(false) => failures.push(format!("{ring:?} sample {i}: product not identity")),
                Err(e) => failures.push(format!("{ring:?} sample {i}: {e}")),
            }
        }
    }
    for (which, ring) in [(0usize, "GF(7)"), (1usize, "Z")] {
        if nontrivial[which] == 0 {
            failures.push(format!("no nontrivial factors occurred over {ring}"));
        }
    }
    let elapsed = start.elapsed();
    let mut out = CheckOutcome::from_failures(
        "9-round-trip",
        total,
        failures,
        format!(
            ", nontrivial {}+{} of {total}, {} ms",
            nontrivial[0],
            nontrivial[1],
            elapsed.as_millis()
        ),
    );
    if elapsed.as_secs_f64() >= 60.0 {
        out.passed = false;
        out.details.push_str(" [over the 60 s budget]");
    }
    out
}

/// Criterion 10: the three hypotheses of the resolution setting hold in the
/// integer instance.
pub fn resolution_hypotheses(cases: usize, seed: u64) -> CheckOutcome {
    let total = cases * 2;
    let cfg = GenConfig::new(BaseRing::Integers, seed);
    let mut failures = Vec::new();
    let mut extension_antecedents = 0usize;
    {
        // a pinned witness with both ends in F but a redundant presentation
        // in the middle, so the extension hypothesis is always exercised
        let ring = BaseRing::Integers;
        let rel = Matrix::from_i64(ring, 2, 1, &[1, 0]);
        let a = PresentedObject::new(ring, 2, rel.clone());
        let extra = Matrix::from_i64(ring, 2, 1, &[0, 1]);
        let quot = PresentedObject::new(ring, 2, rel.hstack(&extra));
        let g = Morphism::new(a.clone(), quot.clone(), Matrix::identity(ring, 2)).unwrap();
        let (a_prime, _) = crate::category::kernel(&g);
        if a_prime.is_in_f() && quot.is_in_f() {
            extension_antecedents += 1;
            if !a.is_in_f() {
                failures.push("pinned witness: extension left F".into());
            }
        } else {
            failures.push("pinned witness: antecedent unexpectedly false".into());
        }
    }
    for i in 0..total {
        match i % 3 {
            0 => {
                // (1) extension of objects of F by objects of F stays in F
                let d = gen::random_general_dses(&cfg, 1000 + i as u64);
                if d.a_prime.is_in_f() && d.a_dprime.is_in_f() {
                    extension_antecedents += 1;
                    if !d.a.is_in_f() {
                        failures.push(format!("sample {i}: extension left F"));
                    }
                }
            }
            1 => {
                // (2) kernels of epis out of free objects are free
                let mut rng = Rng64::stream(seed, 1100 + i as u64);
                let n = 1 + rng.below(4);
                let free = PresentedObject::free(BaseRing::Integers, n);
                let cols = 1 + rng.below(3);
                let mut extra = Matrix::zero(BaseRing::Integers, n, cols);
                for j in 0..cols {
                    for r in 0..n {
                        extra.set(r, j, BigInt::from(rng.range_i64(-3, 3)));
                    }
                }
                let quot = PresentedObject::new(BaseRing::Integers, n, extra);
                let g = Morphism::new(free, quot, Matrix::identity(BaseRing::Integers, n)).unwrap();
                let (k, incl) = crate::category::kernel(&g);
                if !k.is_in_f() {
                    failures.push(format!("sample {i}: kernel left F"));
                }
                if !crate::category::is_admissible_mono(&incl) {
                    failures.push(format!("sample {i}: kernel inclusion not mono"));
                }
            }
            _ => {
                // (3) the canonical cover is an admissible epi from F
                let d = gen::random_general_dses(&cfg, 1200 + i as u64);
                let (p, psi) = free_cover(&d.a_dprime);
                if !p.is_in_f() || !is_admissible_epi(&psi) {
                    failures.push(format!("sample {i}: free cover failed"));
                }
            }
        }
    }
    if extension_antecedents == 0 {
        failures.push("extension hypothesis never exercised".into());
    }
    CheckOutcome::from_failures(
        "10-hypotheses",
        total,
        failures,
        format!(", {extension_antecedents} extension instances"),
    )
}

/// Criterion 11: the general class of torsion-bearing type-0 inputs is
/// stable across independently randomized covers and lands in {+1, -1}.
pub fn general_class_stability(cases: usize, seed: u64) -> CheckOutcome {
    let total = (cases / 5).max(1);
    let cfg = GenConfig::new(BaseRing::Integers, seed);
    let mut failures = Vec::new();
    for i in 0..total {
        let d = gen::random_torsion_type0_dses(&cfg, 1300 + i as u64);
        if dses_type(&d) != 0 || !validate_dses(&d).is_valid() {
            failures.push(format!("sample {i}: generator contract broken"));
            continue;
        }
        let base = match dses_class_general(&d) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("sample {i}: {e}"));
                continue;
            }
        };
        if !base.value().magnitude().is_one() {
            failures.push(format!("sample {i}: class outside {{+1,-1}}"));
        }
        for rerun in 0..5u64 {
            let mut rng = Rng64::stream(seed, 1400 + i as u64 * 8 + rerun);
            match varphi_randomized(&d, &mut rng, cfg.entry_bound)
                .and_then(|out| Ok(dses_class_free(&out)?.inv()))
            {
                Ok(c) => {
                    if c != base {
                        failures.push(format!("sample {i} rerun {rerun}: class moved"));
                    }
                }
                Err(e) => failures.push(format!("sample {i} rerun {rerun}: {e}")),
            }
        }
    }
    CheckOutcome::from_failures("11-general-stability", total * 6, failures, String::new())
}

/// Run the whole suite. `cases = 100` matches the reference counts.
pub fn run_all(cases: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        normal_form_soundness(cases, seed),
        relation1_trivial_classes(cases, seed),
        lemma_pl_classes(cases, seed),
        relation2_on_generated(cases, seed),
        phi_inversion(cases, seed),
        cover_independence(cases, seed),
        constructions(cases, seed),
        relation_preservation(cases, seed),
        resolution_round_trip(cases, seed),
        resolution_hypotheses(cases, seed),
        general_class_stability(cases, seed),
    ]
}
