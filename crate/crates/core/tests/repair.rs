use std::collections::HashSet;

use curvelift::code::{build_code, CodeMode, CodePlan, LiftedCode};
use curvelift::lines::LineFamily;
use curvelift::repair::{
    availability_audit, encode, erase, erase_random, repair_drill, repair_position, repair_via_line, Codeword,
    RepairIndex,
};
use curvelift::{Error, FElem, PlaneCurve};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn code(q: u64, r: u32, family: LineFamily, b: i64) -> LiftedCode {
    build_code(CodePlan::new(PlaneCurve::norm_trace_qr(q, r).unwrap(), family, b, CodeMode::Monomial)).unwrap()
}

fn random_word(code: &LiftedCode, seed: u64) -> Codeword {
    let f = code.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let msg: Vec<FElem> = (0..code.k()).map(|_| f.random(&mut rng)).collect();
    encode(code, &msg).unwrap()
}

#[test]
fn every_position_repairs_from_every_line() {
    let c = code(2, 3, LineFamily::All, 3);
    let index = RepairIndex::new(&c).unwrap();
    let cw = random_word(&c, 3);
    for i in 0..c.n() {
        let damaged = erase(&cw, &[i]).unwrap();
        let out = repair_position(&index, &damaged, i).unwrap();
        assert_eq!(Some(out.value), cw.symbols[i]);
        assert_eq!(out.read.len(), 2);
        for (line, _) in index.lines_through(i) {
            assert_eq!(Some(repair_via_line(&index, &damaged, i, line).unwrap()), cw.symbols[i]);
        }
    }
}

#[test]
fn reads_use_smallest_x_survivors() {
    let c = code(2, 4, LineFamily::All, 7);
    let index = RepairIndex::new(&c).unwrap();
    let f = c.field();
    let cw = erase(&random_word(&c, 9), &[40]).unwrap();
    let out = repair_position(&index, &cw, 40).unwrap();
    let (_, on_line) = index.lines_through(40).find(|(l, _)| *l == out.line).unwrap();
    let mut xs: Vec<u32> = on_line.iter().filter(|&&j| j != 40).map(|&j| f.to_int(c.points[j].x)).collect();
    xs.sort_unstable();
    let mut read: Vec<u32> = out.read.iter().map(|&j| f.to_int(c.points[j].x)).collect();
    read.sort_unstable();
    assert_eq!(read, xs[..6].to_vec());
}

#[test]
fn drill_matches_baseline() {
    let c = code(2, 4, LineFamily::All, 7);
    let rep = repair_drill(&c, 1000, 3, 2024).unwrap();
    assert_eq!(rep.successes, 1000);
    assert_eq!(rep.mean_symbols_read, 6.0);
    assert_eq!(rep.mean_lines_tried, 15.0);
    assert_eq!(rep, repair_drill(&c, 1000, 3, 2024).unwrap());
}

#[test]
fn heavy_erasure_can_fail() {
    let c = code(2, 3, LineFamily::All, 3);
    let rep = repair_drill(&c, 50, 31, 1).unwrap();
    assert!(rep.success_rate() < 1.0);
}

#[test]
fn erase_random_is_deterministic() {
    let c = code(2, 3, LineFamily::All, 3);
    let cw = random_word(&c, 1);
    let a = erase_random(&cw, 5, 77).unwrap();
    assert_eq!(a, erase_random(&cw, 5, 77).unwrap());
    assert_eq!(a.erased().len(), 5);
    assert_ne!(a.erased(), erase_random(&cw, 5, 78).unwrap().erased());
}

#[test]
fn repairing_a_present_symbol_is_refused() {
    let c = code(2, 3, LineFamily::All, 3);
    let index = RepairIndex::new(&c).unwrap();
    let cw = random_word(&c, 1);
    assert!(matches!(repair_position(&index, &cw, 0), Err(Error::NotErased(0))));
}

#[test]
fn audit_agrees_with_params() {
    for c in [code(2, 3, LineFamily::All, 3), code(2, 4, LineFamily::TraceZero, 9), code(3, 3, LineFamily::All, 7)] {
        let rep = availability_audit(&RepairIndex::new(&c).unwrap());
        assert_eq!(rep.minimum, c.params.availability);
        assert_eq!(rep.per_position.len(), c.n());
    }
}

#[test]
fn csv_survives_erasures() {
    let c = code(2, 3, LineFamily::All, 3);
    let cw = erase_random(&random_word(&c, 5), 4, 2).unwrap();
    let text = cw.to_csv(c.field());
    assert_eq!(Codeword::from_csv(&text, c.field()).unwrap(), cw);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recovery_sets_are_disjoint(i in 0usize..243) {
        let c = code(3, 3, LineFamily::All, 7);
        let index = RepairIndex::new(&c).unwrap();
        let mut seen = HashSet::new();
        for (_, pos) in index.lines_through(i).filter(|(_, pos)| pos.len() >= 7) {
            for &j in pos.iter().filter(|&&j| j != i) {
                prop_assert!(seen.insert(j));
            }
        }
    }

    #[test]
    fn single_erasure_round_trip(seed in 0u64..1000, i in 0usize..128) {
        let c = code(2, 4, LineFamily::TraceZero, 9);
        let index = RepairIndex::new(&c).unwrap();
        let cw = random_word(&c, seed);
        let out = repair_position(&index, &erase(&cw, &[i]).unwrap(), i).unwrap();
        prop_assert_eq!(Some(out.value), cw.symbols[i]);
    }
}
