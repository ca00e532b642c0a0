use super::*;
use crate::external_agg::NamedRule;
use crate::order::WeakOrder;

fn rule(name: &str) -> RuleHandle {
    name.parse::<NamedRule>().unwrap().handle()
}

fn strict(m: usize, n: usize) -> SearchSpace {
    SearchSpace::exhaustive(m, n, Domain::StrictOrders)
}

fn weak(m: usize, n: usize) -> SearchSpace {
    SearchSpace::exhaustive(m, n, Domain::WeakOrders)
}

fn checked(r: &RuleHandle, axiom: AxiomId, space: &SearchSpace) -> AuditResult {
    let res = audit(r, axiom, space).unwrap();
    assert!(verify(r, &res).unwrap(), "{axiom} result for {} does not verify", r.name());
    res
}

fn failing(rs: &ArrowAudit) -> Vec<AxiomId> {
    rs.results.iter().filter(|r| r.failed()).map(|r| r.axiom).collect()
}

#[test]
fn may_is_anonymous_over_three_voters() {
    let r = checked(&rule("may"), AxiomId::Anonymity, &strict(3, 3));
    assert_eq!(r.verdict, Verdict::PassWithinSearch);
    assert!(r.search.exhausted);
    assert_eq!(r.search.profiles_examined, 216);
}

#[test]
fn dictator_is_a_dictator() {
    let r = checked(&rule("dictator:1"), AxiomId::NonDictatorship, &strict(3, 2));
    assert!(r.failed());
    let Some(Witness::NeverOverruled {
        voter,
        example_profile: Some(p),
        example_outcome: Some(o),
        example_pair: Some(pair),
    }) = &r.witness
    else {
        panic!("unexpected witness {:?}", r.witness);
    };
    assert_eq!(*voter, 1);
    // individual 1 prefers the first class of the pair, individual 2 the other,
    // and the outcome sides with individual 1
    let u = p.universe();
    let (a, b) = (u.index_of(pair[0]).unwrap(), u.index_of(pair[1]).unwrap());
    let orders = p.orders().unwrap();
    assert!(orders[0].prefers(a, b) && orders[1].prefers(b, a));
    assert!(o.relation.strictly(a, b));
}

#[test]
fn borda_violates_iia() {
    let r = checked(&rule("borda"), AxiomId::Iia, &strict(3, 2));
    assert!(r.failed());
    assert!(matches!(r.witness, Some(Witness::PairConflict { .. })));
}

#[test]
fn majority_cycle_is_the_condorcet_template() {
    let r = checked(&rule("may"), AxiomId::Transitivity, &strict(3, 3));
    let Some(Witness::Outcome { profile, outcome }) = &r.witness else {
        panic!("expected an outcome witness");
    };
    let want: Vec<WeakOrder> = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        .iter()
        .map(|s| WeakOrder::strict(s))
        .collect();
    assert_eq!(profile.orders().unwrap(), want.as_slice());
    assert!(!outcome.transitive);
    let c = outcome.cycle_witness.unwrap();
    assert_eq!(c.map(|x| x.to_string()), ["A-A", "A-C", "A-D"]);
}

#[test]
fn arrow_sets() {
    let may = arrow_audit(&rule("may"), 3, 3).unwrap();
    assert_eq!(failing(&may), vec![AxiomId::Transitivity]);
    let borda = arrow_audit(&rule("borda"), 3, 2).unwrap();
    assert_eq!(failing(&borda), vec![AxiomId::Iia]);
    let dict = arrow_audit(&rule("dictator:1"), 3, 2).unwrap();
    assert_eq!(failing(&dict), vec![AxiomId::NonDictatorship]);
    for name in ["may", "borda", "kemeny", "dictator:1", "dictator:2"] {
        for n in [2, 3] {
            let r = rule(name);
            let a = arrow_audit(&r, 3, n).unwrap();
            assert!(!a.contradiction, "{name} n={n}");
            for res in &a.results {
                assert!(verify(&r, res).unwrap(), "{name} n={n} {}", res.axiom);
            }
        }
    }
    assert!(arrow_audit(&rule("may"), 2, 3).is_err());
}

#[test]
fn proximity_fails_for_anonymous_unanimous_rules() {
    for name in ["may", "borda", "kemeny"] {
        let r = checked(&rule(name), AxiomId::ProximityPreservation, &strict(3, 3));
        assert!(r.failed(), "{name}");
        assert_eq!(r.notes, vec![PROXIMITY_CAVEAT.to_string()]);
        let Some(Witness::Proximity {
            profile_distances,
            outcome_distances,
            ..
        }) = r.witness
        else {
            panic!("expected a proximity witness");
        };
        assert!(profile_distances[0] <= profile_distances[1]);
        assert!(outcome_distances[0] > outcome_distances[1]);
    }
}

#[test]
fn may_coincidence() {
    let may = may_coincidence_check(&rule("may"), 3, 3, 2000, 7).unwrap();
    assert_eq!(may.verdict, Verdict::PassWithinSearch);
    assert_eq!(may.notes.len(), 3);
    for name in ["borda", "kemeny", "dictator:1"] {
        let r = rule(name);
        let res = may_coincidence_check(&r, 3, 3, 2000, 7).unwrap();
        assert!(res.failed(), "{name}");
        assert!(verify(&r, &res).unwrap(), "{name}");
    }
    let dict = may_coincidence_check(&rule("dictator:1"), 3, 2, 500, 1).unwrap();
    let Some(Witness::Premise { axiom, .. }) = dict.witness else {
        panic!("dictator should fail a premise");
    };
    assert!(matches!(axiom, AxiomId::Neutrality | AxiomId::PositiveResponsiveness));
}

#[test]
fn may_passes_may_premises_over_weak_orders() {
    let r = rule("may");
    for axiom in [
        AxiomId::Unanimity,
        AxiomId::Anonymity,
        AxiomId::Neutrality,
        AxiomId::PositiveResponsiveness,
        AxiomId::MonotonicResponsiveness,
        AxiomId::Iia,
    ] {
        let res = checked(&r, axiom, &weak(3, 3));
        assert_eq!(res.verdict, Verdict::PassWithinSearch, "{axiom}");
    }
}

#[test]
fn responsiveness_needs_ties_to_bite() {
    // a dictator ignores everyone else, which only shows once ties are allowed
    let r = rule("dictator:1");
    assert!(!checked(&r, AxiomId::PositiveResponsiveness, &strict(3, 2)).failed());
    let res = checked(&r, AxiomId::PositiveResponsiveness, &weak(3, 2));
    assert!(res.failed());
    let Some(Witness::PairConflict { voter, .. }) = res.witness else {
        panic!("expected a pair conflict");
    };
    assert_eq!(voter, Some(2));
    assert!(!checked(&r, AxiomId::MonotonicResponsiveness, &weak(3, 2)).failed());
}

#[test]
fn kemeny_tie_break_is_not_neutral() {
    let res = checked(&rule("kemeny"), AxiomId::Neutrality, &strict(3, 3));
    assert!(res.failed());
}

#[test]
fn utilitarian_audits() {
    let r = rule("utilitarian");
    let grid = SearchSpace::exhaustive(3, 2, Domain::utility_grid());
    for axiom in [
        AxiomId::StrictUnanimity,
        AxiomId::UtilityIia,
        AxiomId::Unanimity,
        AxiomId::Anonymity,
        AxiomId::Transitivity,
    ] {
        let res = checked(&r, axiom, &grid);
        assert_eq!(res.verdict, Verdict::PassWithinSearch, "{axiom}");
        assert_eq!(res.search.profiles_examined, 15625);
    }
    // ordinal IIA reads the induced orders; sums depend on more than that
    assert!(checked(&r, AxiomId::Iia, &grid).failed());
    assert!(matches!(
        audit(&r, AxiomId::Neutrality, &grid),
        Err(AuditError::InapplicableAxiom { .. })
    ));
    assert!(matches!(
        audit(&rule("may"), AxiomId::UtilityIia, &strict(3, 2)),
        Err(AuditError::InapplicableAxiom { .. })
    ));
    assert!(matches!(
        audit(&r, AxiomId::Unanimity, &strict(3, 2)),
        Err(AuditError::DomainMismatch { .. })
    ));
}

#[test]
fn sphere_audits() {
    let r = rule("mean-direction");
    let space = SearchSpace::sampled(2, 2, 1000, 3, Domain::Sphere { epsilon: 1e-3 });
    let c = checked(&r, AxiomId::Continuity, &space);
    assert!(c.failed());
    let Some(Witness::Discontinuity(w)) = &c.witness else {
        panic!("expected a discontinuity");
    };
    assert!(w.input_distance <= 2e-3);
    assert!(w.output_distance >= 1.0);
    for axiom in [AxiomId::ContinuousUnanimity, AxiomId::ContinuousAnonymity] {
        let s = SearchSpace::sampled(4, 5, 1000, 11, Domain::Sphere { epsilon: 1e-3 });
        assert!(!checked(&r, axiom, &s).failed(), "{axiom}");
    }
    assert!(matches!(
        audit(&r, AxiomId::Unanimity, &space),
        Err(AuditError::InapplicableAxiom { .. })
    ));
}

#[test]
fn budget() {
    let err = audit(&rule("may"), AxiomId::ProximityPreservation, &strict(4, 3)).unwrap_err();
    assert!(matches!(err, AuditError::BudgetExceeded { .. }));
    // linear checks still fit
    assert!(audit(&rule("may"), AxiomId::Transitivity, &strict(4, 3)).is_ok());
}

#[test]
fn sampled_audits_are_deterministic() {
    let space = SearchSpace::sampled(5, 4, 300, 99, Domain::WeakOrders);
    for axiom in [AxiomId::Iia, AxiomId::Anonymity, AxiomId::ProximityPreservation] {
        let a = audit(&rule("borda"), axiom, &space).unwrap();
        let b = audit(&rule("borda"), axiom, &space).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(verify(&rule("borda"), &a).unwrap());
    }
}

#[test]
fn axiom_names_round_trip() {
    for a in AxiomId::ALL {
        assert_eq!(a.name().parse::<AxiomId>().unwrap(), a);
        assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.name()));
    }
    assert_eq!("positive-responsiveness".parse::<AxiomId>().unwrap(), AxiomId::PositiveResponsiveness);
    assert!("pareto".parse::<AxiomId>().is_err());
}

#[test]
fn report_json_shape() {
    let res = audit(&rule("may"), AxiomId::Anonymity, &strict(3, 2)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&res).unwrap();
    assert_eq!(v["rule"], "may");
    assert_eq!(v["axiom"], "anonymity");
    assert_eq!(v["verdict"], "pass_within_search");
    assert_eq!(v["witness"], serde_json::Value::Null);
    assert_eq!(v["search"]["mode"], "exhaustive");
    assert_eq!(v["search"]["domain"], "strict_orders");
    assert_eq!(v["search"]["m"], 3);
    assert_eq!(v["search"]["exhausted"], true);

    let fail = audit(&rule("may"), AxiomId::Transitivity, &strict(3, 3)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&fail).unwrap();
    assert_eq!(v["witness"]["kind"], "outcome");
    assert_eq!(v["witness"]["profile"]["mode"], "ordinal");
    assert_eq!(v["witness"]["outcome"]["transitive"], false);
}

#[test]
fn tampered_witness_is_rejected() {
    let r = rule("borda");
    let mut res = audit(&r, AxiomId::Iia, &strict(3, 2)).unwrap();
    if let Some(Witness::PairConflict { profiles, .. }) = &mut res.witness {
        profiles.swap(0, 1);
    }
    assert!(!verify(&r, &res).unwrap());
    let mut pass = audit(&rule("may"), AxiomId::Anonymity, &strict(3, 2)).unwrap();
    pass.witness = res.witness.clone();
    assert!(!verify(&rule("may"), &pass).unwrap());
}
