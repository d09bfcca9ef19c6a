use fekete_core::machines::{self, RunOutcome};
use fekete_core::shannon::{self, Graph};
use fekete_core::*;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // the returned modulus is the least index whose gap is below 2^{-M}
    #[test]
    fn sandwich_modulus_is_least(c in 1i64..20, d in 1i64..20, big_m in 0u64..10) {
        let lower = SeqDef::expr(&format!("1 - {c}/n")).unwrap();
        let upper = SeqDef::expr(&format!("1 + {d}/n")).unwrap();
        let n0 = sandwich_modulus(&lower, &upper, big_m, 1 << 20).unwrap();
        // gap (c + d)/n < 2^{-M}  iff  (c + d) 2^M < n
        let oracle = ((c + d) as u64) * (1 << big_m) + 1;
        prop_assert_eq!(n0, oracle);
    }

    #[test]
    fn hull_is_least_superadditive_majorant(vals in prop::collection::vec(-20i64..20, 1..40)) {
        let mut hull = SuperadditiveHull::new();
        for v in &vals {
            hull.push(Rational::from(*v));
        }
        let h = hull.values();
        for n in 2..=h.len() {
            for l in 1..n {
                prop_assert!(h[n - 1] >= &h[l - 1] + &h[n - l - 1]);
            }
        }
        // least: every value is the input or a split sum of earlier hull values
        for n in 1..=h.len() {
            let raw = Rational::from(vals[n - 1]);
            let attained = h[n - 1] == raw
                || (1..n).any(|l| h[n - 1] == &h[l - 1] + &h[n - l - 1]);
            prop_assert!(attained && h[n - 1] >= raw);
        }
    }

    #[test]
    fn independence_matches_brute_force(n in 1usize..11, seed in any::<u64>()) {
        let mut g = Graph::edgeless(n);
        let mut s = seed | 1;
        for u in 0..n {
            for v in u + 1..n {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                if s % 3 == 0 { g.add_edge(u, v).unwrap(); }
            }
        }
        let brute = (0u32..1 << n)
            .filter(|m| g.edges().iter().all(|&(u, v)| m >> u & 1 == 0 || m >> v & 1 == 0))
            .map(u32::count_ones)
            .max()
            .unwrap() as usize;
        prop_assert_eq!(shannon::independence_number(&g).unwrap(), brute);
    }
}

#[test]
fn lower_zw_transform_is_superadditive_on_small_splits() {
    let z = ZwRepresentation {
        kind: ZwKind::Lower,
        desc: SeqStandardDescription::exact("1 - 1/n").unwrap(),
    };
    let a = transforms::zw_to_superadditive(&z).unwrap();
    let v: Vec<Rational> = (1..=150).map(|n| approx_member(&a.desc, n, 0).unwrap()).collect();
    for l in 1..150 {
        for k in 1..=150 - l {
            assert!(v[l + k - 1] >= &v[l - 1] + &v[k - 1]);
        }
    }
}

#[test]
fn certificates_survive_serialization() {
    let rep = |kind, text| AdditiveRepresentation {
        kind,
        desc: SeqStandardDescription::exact(text).unwrap(),
    };
    let subject = Subject::Fekete {
        superadditive: rep(AdditiveKind::Superadditive, "n - 1"),
        subadditive: rep(AdditiveKind::Subadditive, "n + 1"),
    };
    let cert = Certificate::issue(subject, 2, 1 << 20, Some(q(1, 1))).unwrap();
    assert!(cert.verified);
    let text = serde_json::to_string_pretty(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    back.verify().unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
}

#[test]
fn enumeration_records_replay() {
    let e = enumerate_re(200, u64::MAX).unwrap();
    let mut seen = std::collections::HashSet::new();
    for r in &e.records {
        assert!(seen.insert(r.program_index));
        assert_eq!(machines::run(r.program_index, r.halt_step), RunOutcome::HaltedAt(r.halt_step));
        assert_eq!(machines::run(r.program_index, r.halt_step - 1), RunOutcome::StillRunning);
    }
    assert!(matches!(
        enumerate_re(200, 10),
        Err(Error::BudgetExhausted { .. })
    ));
}

#[test]
fn capacity_report_for_pentagon_channel() {
    let g = shannon::confusability_graph(&ChannelMatrix::pentagon());
    assert_eq!(g.vertex_count(), 5);
    assert_eq!(g.edge_count(), 5);
    let report = shannon::capacity_lower_bounds(&g, 2, 200).unwrap();
    assert_eq!(report.powers.iter().map(|p| p.alpha).collect::<Vec<_>>(), [2, 5]);
    assert!(report.supermultiplicative);
}
