use horolab_core::bcengine::{
    check_hypotheses, fixtures, limsup_measure_truncated, nested_instance, point_instance, reduced_words, spiral_instance,
    truncation, word_label, verdict, Anchor, BcInstance, BcItem, Truth, Verdict,
};
use horolab_core::treespace::cayley::word_to_code;
use horolab_core::treespace::{shadow, CylSpace, Vertex};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const BUDGET: usize = 1 << 22;

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn pow3(e: i64) -> BigRational {
    let p = BigRational::from_integer(BigInt::from(3).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

#[test]
fn fixtures_match_ground_truth() {
    let fx = fixtures();
    assert_eq!(fx.iter().filter(|f| f.truth == Truth::Null).count(), 3);
    assert_eq!(fx.iter().filter(|f| f.truth == Truth::Positive).count(), 3);
    for f in &fx {
        let rep = verdict(&f.instance, BUDGET).unwrap();
        let want = match f.truth {
            Truth::Null => "measure-zero",
            Truth::Positive => "positive-measure",
        };
        assert_eq!(rep.verdict.kind(), want, "{}: {:?}", rep.name, rep.verdict);
        if f.truth == Truth::Positive {
            assert!(rep.hypotheses.first_failure().is_none());
            assert!(rep.hypotheses.c <= 20.0);
        }
    }
}

#[test]
fn spiral_counts_and_masses_are_exact() {
    let inst = spiral_instance("s", 2, 1, 8, &|_| 0.0, BUDGET).unwrap();
    let rep = check_hypotheses(&inst).unwrap();
    // Counts of double cosets per length, by a letter-transition recursion.
    let mut ends = [0i64; 4];
    ends[2] = 1;
    ends[3] = 1;
    let mut lo = BigRational::from_integer(1000.into());
    let mut hi = BigRational::zero();
    for n in 1..=8 {
        if n > 1 {
            let mut next = [0i64; 4];
            for (l, &c) in ends.iter().enumerate() {
                for m in 0..4 {
                    if m != l ^ 1 {
                        next[m] += c;
                    }
                }
            }
            ends = next;
        }
        let count = ends[2] + ends[3];
        let r = BigRational::from_integer(count.into()) * pow3(-(n as i64));
        lo = lo.min(r.clone());
        hi = hi.max(r);
    }
    assert_eq!(rep.count_ratio, Some((lo.to_string(), hi.to_string())));
    // Past the depth every neighbourhood weighs exactly f₄ f₅.
    assert_eq!(rep.mass_ratio, Some(("1".into(), "1".into())));
    assert!(rep.holds(6), "same-level neighbourhoods are disjoint");
    assert_eq!(rep.containment_exp, 0);
}

#[test]
fn constructed_violations() {
    let mut inst = point_instance("dup", 2, &[1, 2, 3], &|_| 1.0);
    let dup = inst.items.iter().find(|i| i.level == 1).unwrap().clone();
    inst.items.push(BcItem { label: "copy".into(), ..dup });
    let rep = check_hypotheses(&inst).unwrap();
    assert!(!rep.holds(6));
    assert!(rep.conditions[5].detail.contains("copy"), "{}", rep.conditions[5].detail);
    assert!(rep.holds(1) && rep.holds(7));

    let mut inst = point_instance("wide", 2, &[1, 2, 3, 4, 5, 6], &|_| 1.0);
    inst.rates.m3[2] = inst.rates.m2[2] - 1;
    let rep = check_hypotheses(&inst).unwrap();
    assert!(!rep.holds(1));
    assert!(rep.conditions[0].detail.contains("n = 2"));
    let v = verdict(&inst, BUDGET).unwrap();
    assert!(matches!(v.verdict, Verdict::HypothesesViolated { condition: 1, .. }), "{:?}", v.verdict);

    // A missing level breaks the lower count bound.
    let mut inst = point_instance("gap", 2, &[1, 2, 3, 4, 5, 6], &|_| 1.0);
    inst.items.retain(|i| i.level != 3);
    let rep = check_hypotheses(&inst).unwrap();
    assert!(!rep.holds(4) && rep.holds(5));
    assert_eq!(rep.count_ratio, None);
    assert!(matches!(verdict(&inst, BUDGET).unwrap().verdict, Verdict::HypothesesViolated { condition: 4, .. }));

    let mut inst = nested_instance("bad", 3, 4);
    inst.items[0].anchors[0].period = vec![7];
    assert!(check_hypotheses(&inst).is_err());
}

#[test]
fn disjoint_geometric_levels() {
    // Level n: the single cylinder 0^{n−1}1, of mass q^{−n}·(q/(q+1)).
    let n_max = 12;
    let mut inst = nested_instance("steps", 3, n_max);
    for it in inst.items.iter_mut() {
        let mut prefix = vec![0; it.level - 1];
        prefix.push(1);
        it.anchors = vec![Anchor { prefix, period: vec![0] }];
    }
    for n0 in 1..=n_max {
        let got = limsup_measure_truncated(&inst, n0, n_max, BUDGET).unwrap();
        let want: BigRational = (n0..=n_max).map(|k| ratio(3, 4) * pow3(-(k as i64))).sum();
        assert_eq!(got, want);
    }
    let v = verdict(&inst, BUDGET).unwrap();
    assert_eq!(v.verdict, Verdict::MeasureZero);
}

#[test]
fn nested_tails_are_the_first_level() {
    let inst = nested_instance("nested", 3, 16);
    let tr = truncation(&inst, BUDGET).unwrap();
    for (i, t) in tr.exact_tails.iter().enumerate() {
        let n0 = (i + 1) as i64;
        assert_eq!(*t, ratio(3, 4) * pow3(-n0));
        assert_eq!(*t, tr.exact_levels[i]);
    }
    // 1/f₅(f₂) = 3ⁿ exceeds f₄f₁ = 3/4, which only part [B] needs.
    let rep = check_hypotheses(&inst).unwrap();
    assert!(!rep.holds(2));
    assert_eq!(verdict(&inst, BUDGET).unwrap().verdict, Verdict::MeasureZero);
}

#[test]
fn independent_levels_multiply() {
    let n = 7;
    let inst = point_instance("indep", 2, &(1..=n).collect::<Vec<_>>(), &|_| 1.0);
    let tr = truncation(&inst, BUDGET).unwrap();
    assert!(tr.exact_levels.iter().all(|m| *m == ratio(1, 3)));
    assert_eq!(tr.quasi_independence, 1.0);
    let space = CylSpace::visual(3);
    for a in 0..n as usize {
        for b in a + 1..n as usize {
            let ia = inst.level_union(a).intersect(&inst.level_union(b)).mass(&space);
            assert_eq!(ia, ratio(1, 9));
        }
    }
    for (i, t) in tr.exact_tails.iter().enumerate() {
        let k = (n as usize - i) as u32;
        let miss = BigRational::new(BigInt::from(2).pow(k), BigInt::from(3).pow(k));
        assert_eq!(*t, BigRational::one() - miss);
    }
}

#[test]
fn truncations_are_monotone() {
    for f in fixtures().iter().take(4) {
        let inst = &f.instance;
        let n_max = inst.n_max.min(8);
        let mut prev_by_n0 = Vec::new();
        for n0 in inst.first_level..=n_max {
            prev_by_n0.push(limsup_measure_truncated(inst, n0, n_max, BUDGET).unwrap());
        }
        assert!(prev_by_n0.windows(2).all(|w| w[0] >= w[1]), "{}", inst.name);
        let mut prev = BigRational::zero();
        for top in inst.first_level..=n_max {
            let m = limsup_measure_truncated(inst, inst.first_level, top, BUDGET).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }
}

#[test]
fn orbit_balls_are_shadows() {
    let inst = point_instance("orbit", 2, &[1, 2, 3, 4], &|t| t as f64);
    let base = Vertex::base();
    for it in &inst.items {
        let t = inst.rates.m2[it.level];
        let w = reduced_words(2, t as usize).into_iter().find(|w| word_label(w) == it.label).unwrap();
        let v = word_to_code(&w);
        assert_eq!(it.set(t), shadow(&base, &v, 3));
        assert!(shadow(&base, &v, 3).contains(&it.set(inst.rates.m3[it.level]), 3));
    }
}

#[test]
fn json_round_trip() {
    let inst = spiral_instance("s", 2, 1, 4, &|t| t as f64 / 2.0, BUDGET).unwrap();
    assert!(inst.notes.iter().any(|n| n.contains("snapped")));
    let s = serde_json::to_string(&inst).unwrap();
    let back: BcInstance = serde_json::from_str(&s).unwrap();
    assert_eq!(back, inst);
    let rep = verdict(&back, BUDGET).unwrap();
    let js = serde_json::to_value(&rep).unwrap();
    assert!(js["verdict"]["kind"].is_string());
}
