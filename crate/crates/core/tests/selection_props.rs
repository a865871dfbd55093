mod common;

use idealmdl::complexity::Registry;
use idealmdl::models::{BernoulliClass, CountingClass, DataSample, FiniteSetFamily, MarkovClass, ModelClass};
use idealmdl::selection::{select_gkmss, select_map, select_mdl, PriorSpec, SelectionReport};
use idealmdl::BitString;
use proptest::prelude::*;

fn class(kind: u8, a: u32, b: u32, n: usize) -> Box<dyn ModelClass> {
    match kind % 4 {
        0 => Box::new(BernoulliClass::new(1 + a % 6).unwrap()),
        1 => Box::new(MarkovClass::new((a % 3) as usize, 1 + b % 3).unwrap()),
        2 => Box::new(CountingClass::new(n.max(1)).unwrap()),
        _ => Box::new(FiniteSetFamily::new(n.clamp(1, 10)).unwrap()),
    }
}

fn data() -> impl Strategy<Value = BitString> {
    (1usize..18, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| {
        let mut r = common::rng(seed);
        common::random_bits(&mut r, n, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mdl_equals_map_under_code_length_prior(kinds in prop::collection::vec((any::<u8>(), any::<u32>(), any::<u32>()), 1..4), x in data()) {
        let classes: Vec<Box<dyn ModelClass>> = kinds.iter().map(|&(k, a, b)| class(k, a, b, x.len())).collect();
        let refs: Vec<&dyn ModelClass> = classes.iter().map(|c| c.as_ref()).collect();
        let d: DataSample = x.into();
        let mdl = select_mdl(&refs, &d, f64::INFINITY);
        let map = select_map(&refs, &d, &PriorSpec::universal(), f64::INFINITY);
        match (mdl, map) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.winner, b.winner),
            (a, b) => prop_assert_eq!(a.err(), b.err()),
        }
    }

    #[test]
    fn winner_is_a_minimum_and_weights_normalize(kind in any::<u8>(), a in any::<u32>(), x in data()) {
        let c = class(kind, a, a / 7, x.len());
        let d: DataSample = x.into();
        if let Ok(rep) = select_mdl(&[c.as_ref()], &d, f64::INFINITY) {
            prop_assert!(rep.table.iter().all(|r| r.total >= rep.winner_total - 1e-9));
            let mass: f64 = rep.table.iter().map(|r| r.posterior_weight).sum();
            prop_assert!((mass - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_never_raises_the_minimum(x in data(), b1 in 0.0f64..30.0, b2 in 0.0f64..30.0) {
        let c = BernoulliClass::new(4).unwrap();
        let d: DataSample = x.into();
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        if let Ok(small) = select_mdl(&[&c], &d, lo) {
            let large = select_mdl(&[&c], &d, hi).unwrap();
            prop_assert!(large.winner_total <= small.winner_total + 1e-12);
        }
    }

    #[test]
    fn gkmss_winner_is_feasible_and_minimal(x in data()) {
        let reg = Registry::builtin();
        let f = FiniteSetFamily::new(x.len()).unwrap();
        let d: DataSample = x.into();
        if let Ok(rep) = select_gkmss(&[&f], &d, 2.0, f64::INFINITY, &reg) {
            let win = rep.table.iter().find(|r| r.index == rep.winner.index).unwrap();
            prop_assert!(win.feasibility_margin.unwrap() >= -1e-9);
            for r in &rep.table {
                if r.feasibility_margin.unwrap() >= -1e-9 {
                    prop_assert!(r.model_cost >= win.model_cost - 1e-9);
                }
            }
        }
    }
}

#[test]
fn parallel_evaluation_is_deterministic() {
    let b = BernoulliClass::new(6).unwrap();
    let m = MarkovClass::new(2, 2).unwrap();
    let mut r = common::rng(44);
    let d: DataSample = common::random_bits(&mut r, 200, 0.3).into();
    let first: SelectionReport = select_mdl(&[&b, &m], &d, f64::INFINITY).unwrap();
    for _ in 0..5 {
        let again = select_mdl(&[&b, &m], &d, f64::INFINITY).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), serde_json::to_string(&first).unwrap());
    }
}
