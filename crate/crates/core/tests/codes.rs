use curvelift::bipoly::BiPoly;
use curvelift::code::{
    build_code, classify_monomials, evaluate, parameter_report, reduce_on_line, spot_check_classes,
    worst_line_degree, CodeArtifact, CodeMode, CodePlan, Monomial, MonomialStatus,
};
use curvelift::curve::DEFAULT_ENUMERATION_BUDGET;
use curvelift::intersect::{lines_with_sizes, CountMethod, LineCounter};
use curvelift::lines::LineFamily;
use curvelift::poly::UniPoly;
use curvelift::repair::encode;
use curvelift::{FElem, Line, PlaneCurve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn plan(q: u64, r: u32, family: LineFamily, b: i64) -> CodePlan {
    CodePlan::new(PlaneCurve::norm_trace_qr(q, r).unwrap(), family, b, CodeMode::Monomial)
}

fn thirteen_point_lines() -> LineFamily {
    let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
    let pts = c.enumerate_points(DEFAULT_ENUMERATION_BUDGET).unwrap();
    let counter = LineCounter::new(&c, &pts, CountMethod::Gcd).unwrap();
    LineFamily::Explicit(lines_with_sizes(&c, &counter, &[13]).unwrap())
}

#[test]
fn reduction_of_low_power_is_unreduced() {
    let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
    let l10 = Line::new(FElem::ONE, FElem::ZERO).unwrap();
    for (a, b) in [(0, 0), (3, 2), (5, 7), (0, 12)] {
        let red = reduce_on_line(&BiPoly::monomial(a, b), &c, l10).unwrap();
        assert_eq!(red.degree() as u64, a + b);
    }
}

#[test]
fn x33_small_b_contains_low_degree_monomials() {
    let p = plan(3, 3, LineFamily::All, 7);
    let classes = classify_monomials(&p).unwrap();
    for c in &classes {
        if c.monomial.degree() <= 5 {
            assert_eq!(c.status, MonomialStatus::Typical);
        }
    }
    let code = build_code(p).unwrap();
    assert_eq!(code.params.availability, 26);
    assert_eq!(code.params.n, 243);
    assert_eq!(code.params.locality, 6);
}

#[test]
fn x33_thirteen_point_lines_admit_degree_eleven() {
    let p = CodePlan::new(PlaneCurve::norm_trace_qr(3, 3).unwrap(), thirteen_point_lines(), 13, CodeMode::Monomial);
    for s in 0..=11u64 {
        for a in 0..=s {
            let w = worst_line_degree(&p, Monomial::new(a, s - a)).unwrap();
            assert!(w <= 11, "x^{a} y^{} has worst degree {w}", s - a);
        }
    }
    let code = build_code(p).unwrap();
    assert_eq!(code.params.availability, 6);
    assert_eq!(code.params.locality, 12);
    // containment only inside the box b < 9; y^9 leaves it through x^13
    for s in 0..=11u64 {
        for a in s.saturating_sub(8)..=s {
            let w = evaluate(Monomial::new(a, s - a), &code.points, code.field());
            assert!(code.contains(&w).unwrap());
        }
    }
}

#[test]
fn no_sporadics_when_the_diagonal_line_is_present() {
    // B - 1 <= second-highest degree and L_{1,0} in the family
    let cases = [
        (2u64, 2u32, LineFamily::All, 3i64),
        (2, 2, LineFamily::TraceZero, 3),
        (2, 3, LineFamily::All, 3),
        (2, 3, LineFamily::TraceZero, 5),
        (2, 4, LineFamily::All, 7),
        (3, 2, LineFamily::All, 3),
        (3, 3, LineFamily::All, 7),
        (3, 3, LineFamily::All, 10),
    ];
    for (q, r, fam, b) in cases {
        let p = plan(q, r, fam.clone(), b);
        assert!(b - 1 <= p.curve.second_degree() as i64);
        let spor = classify_monomials(&p)
            .unwrap()
            .into_iter()
            .filter(|c| c.status == MonomialStatus::Sporadic)
            .count();
        assert_eq!(spor, 0, "q={q} r={r} {fam:?} B={b}");
    }
}

#[test]
fn class_invariants_hold() {
    let p = plan(2, 4, LineFamily::TraceZero, 9);
    let b = p.b;
    for c in classify_monomials(&p).unwrap() {
        match c.status {
            MonomialStatus::Typical => assert!(c.monomial.degree() as i64 <= b - 2),
            MonomialStatus::Sporadic => assert!(c.monomial.degree() as i64 >= b - 1 && c.worst_line_degree <= b - 2),
            MonomialStatus::NotGood => assert!(c.worst_line_degree > b - 2),
        }
    }
}

#[test]
fn good_monomials_reverified_on_all_lines() {
    let p = plan(2, 4, LineFamily::All, 7);
    let fam = p.family.resolve(p.curve.field().clone()).unwrap();
    let classes = classify_monomials(&p).unwrap();
    spot_check_classes(&p, &fam, &classes, 1.0, 1).unwrap();
}

#[test]
fn exact_mode_measurements() {
    for (q, r, fam, b) in [
        (2u64, 3u32, LineFamily::All, 3i64),
        (2, 3, LineFamily::TraceZero, 5),
        (2, 4, LineFamily::All, 7),
        (3, 3, LineFamily::All, 7),
    ] {
        let mono = build_code(plan(q, r, fam.clone(), b)).unwrap();
        let mut ep = plan(q, r, fam, b);
        ep.mode = CodeMode::Exact;
        let exact = build_code(ep).unwrap();
        assert_eq!(exact.params.exact_k, Some(exact.k()));
        assert!(exact.k() >= mono.k());
        for row in &mono.generator {
            assert!(exact.contains(row).unwrap());
        }
        // no instance measured so far has non-monomial good functions
        assert_eq!(exact.k(), mono.k(), "q={q} r={r}");
    }
}

#[test]
fn codewords_restrict_to_low_degree_polynomials() {
    let code = build_code(plan(2, 4, LineFamily::All, 7)).unwrap();
    let f = code.field().clone();
    let fam = code.plan.family.resolve(f.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lines = fam.lines();
    for t in 0..10 {
        let msg: Vec<FElem> = (0..code.k()).map(|_| f.random(&mut rng)).collect();
        let cw = encode(&code, &msg).unwrap().complete().unwrap();
        for line in lines.iter().skip(t).step_by(17) {
            let on_line: Vec<(FElem, FElem)> = code
                .points
                .iter()
                .zip(&cw)
                .filter(|(p, _)| line.contains(**p, &f))
                .map(|(p, &v)| (p.x, v))
                .collect();
            let g = UniPoly::interpolate(&on_line[..6], &f).unwrap();
            assert!(g.degree() <= 5);
            for &(x, v) in &on_line {
                assert_eq!(g.eval(x, &f), v);
            }
        }
    }
}

#[test]
fn parameter_report_for_binary_codes() {
    for r in 3..=5u32 {
        let b = 2i64.pow(r - 1) - 1;
        let code = build_code(plan(2, r, LineFamily::All, b)).unwrap();
        let rep = parameter_report(&code);
        assert_eq!(rep.n, 2usize.pow(2 * r - 1));
        assert_eq!(rep.locality, b as usize - 1);
        assert_eq!(rep.availability, 2usize.pow(r) - 1);
        assert_eq!(rep.claimed_availability, Some(2usize.pow(r) - 1));
        assert_eq!(rep.k, rep.typical_count_formula);
        assert_eq!(rep.sporadic, 0);
        assert!(rep.closed_form_dimension.is_some());
    }
}

#[test]
fn trace_nonzero_family_leaves_x_zero_points_unprotected() {
    let code = build_code(plan(3, 3, LineFamily::TraceNonzero, 4)).unwrap();
    assert_eq!(code.params.claimed_availability, Some(16));
    // lines through (0, y) all have beta = y with Tr(y) = 0
    assert_eq!(code.params.availability, 0);
}

#[test]
fn artifact_is_deterministic_and_round_trips() {
    let a = CodeArtifact::from_code(&build_code(plan(2, 4, LineFamily::TraceZero, 9)).unwrap()).to_json();
    let b = CodeArtifact::from_code(&build_code(plan(2, 4, LineFamily::TraceZero, 9)).unwrap()).to_json();
    assert_eq!(a, b);
    let code = CodeArtifact::from_json(&a).unwrap().into_code().unwrap();
    assert_eq!(CodeArtifact::from_code(&code).to_json(), a);
}

#[test]
fn schmidt_artifact_carries_its_field() {
    let f = std::sync::Arc::new(curvelift::FieldCtx::new(2, 4, None).unwrap());
    // y^4 + y = x^5 over GF(16)
    let c = PlaneCurve::from_terms(f, &[(0, 4, 1), (0, 1, 1), (5, 0, 1)]).unwrap();
    let pts = c.enumerate_points(DEFAULT_ENUMERATION_BUDGET).unwrap();
    let counter = LineCounter::from_points(&c, &pts);
    let lines = lines_with_sizes(&c, &counter, &[4]).unwrap();
    let code = build_code(CodePlan::new(c, LineFamily::Explicit(lines), 4, CodeMode::Monomial)).unwrap();
    let json = CodeArtifact::from_code(&code).to_json();
    let back = CodeArtifact::from_json(&json).unwrap().into_code().unwrap();
    assert_eq!(back.points, code.points);
    assert_eq!(back.generator, code.generator);
}
