//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use idealmdl::codes::{
    arithmetic_decode, arithmetic_encode, build_shannon_fano, decode_standard, encode_standard, ideal_length,
    read_natural, encode_natural, FiniteDistribution, FixedBernoulli, KtPredictor, PrefixCode,
};
use idealmdl::complexity::{Codec, KtArithmetic, Literal, ModelArithmetic, Registry, RunLength, SideInfo, TwoPart};
use idealmdl::models::{
    BernoulliClass, CostMode, CountingClass, DataSample, FiniteSetFamily, LanguageClass, LanguageRule, MarkovClass,
    ModelClass, PolynomialClass, SupervisedData,
};
use idealmdl::prediction::{convergence_experiment, default_checkpoints, grid_with_truth, mixture_conditional,
    sn_experiment, ExperimentConfig, MixturePredictor};
use idealmdl::randomness::{
    critical_masses, fi_check, is_sum_test, standard_tests, to_sum_test, universal_test, Distribution, Frequency,
    InitialZeros, MlTest, OddPositions,
};
use idealmdl::selection::{select_emdl, select_map, select_mdl, PriorSpec};
use idealmdl::structure::{find_kmss, structure_function};
use idealmdl::BitString;
use rand::Rng;

use common::{positive_examples, quadratic_points, random_bits, rng, BruteCatalog};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs as f64, || format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()))
}

fn polynomial_selection() -> Outcome {
    let start = Instant::now();
    let d = 8u32;
    let class = PolynomialClass::new(None, d, CostMode::Compact).map_err(|e| e.to_string())?;
    for n in 6..=20usize {
        let data = DataSample::Supervised(SupervisedData::from_integers(&quadratic_points(n), d).map_err(|e| e.to_string())?);
        let rep = select_mdl(&[&class], &data, f64::INFINITY).map_err(|e| e.to_string())?;
        let d = d as f64;
        ensure(rep.winner.index == 2, || format!("n={n}: winner degree {}", rep.winner.index))?;
        ensure(rep.winner_total == 5.0 * d, || format!("n={n}: degree-2 total {}", rep.winner_total))?;
        let interpolant = rep.table.iter().find(|r| r.index == n as u64 - 1).ok_or("no interpolant row")?;
        ensure(interpolant.total == n as f64 * d, || format!("n={n}: interpolant total {}", interpolant.total))?;
    }
    within(start.elapsed(), 1)?;
    Ok("degree 2 wins for n = 6..20; totals 5d and nd".into())
}

fn odd_positions_values() -> Outcome {
    for (x, level) in [("01111", 0), ("10011", 1), ("11011", 1), ("10100", 2), ("11111", 3)] {
        let got = OddPositions.level(&x.parse().unwrap());
        ensure(got == level, || format!("{x}: {got} != {level}"))?;
    }
    Ok("all five levels reproduced".into())
}

fn bernoulli_atypicality() -> Outcome {
    let start = Instant::now();
    let reg = Registry::builtin();
    let class = BernoulliClass::new(1).map_err(|e| e.to_string())?;
    let half = class.hypothesis(1);
    let prior = PriorSpec::universal();
    for n in [64usize, 128, 256, 512, 1024, 4096] {
        let zeros = BitString::zeros(n);
        let cost = class.data_cost(&half, &zeros.clone().into());
        ensure(cost == n as f64, || format!("data cost {cost} for n={n}"))?;
        let report = fi_check(&zeros, &class, &half, &prior, &reg);
        ensure(!report.holds, || format!("chain holds for 0^{n}"))?;
    }
    let trials = 200;
    let mut r = rng(2024);
    let held = (0..trials).filter(|_| fi_check(&random_bits(&mut r, 512, 0.5), &class, &half, &prior, &reg).holds).count();
    let freq = held as f64 / trials as f64;
    let sigma = (0.95 * 0.05 / trials as f64).sqrt();
    ensure(freq >= 0.95 - 3.0 * sigma, || format!("held on {held}/{trials}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!("0^n rejected for n >= 64; sampled data held on {held}/{trials}"))
}

fn coin_mixture() -> Outcome {
    let m = MixturePredictor::new(vec![
        ("p=1/3".into(), Box::new(FixedBernoulli(1.0 / 3.0)), 2.0 / 3.0),
        ("p=2/3".into(), Box::new(FixedBernoulli(2.0 / 3.0)), 1.0 / 3.0),
    ])
    .map_err(|e| e.to_string())?;
    let p = mixture_conditional(&m, &BitString::new(), &"1".parse().unwrap()).map_err(|e| e.to_string())?;
    ensure((p - 4.0 / 9.0).abs() <= 1e-12, || format!("P(1) = {p}"))?;
    Ok(format!("P(next = 1) = {p:.15}"))
}

fn round_trip(codec: &dyn Codec, x: &BitString, side: &SideInfo) -> Result<(), String> {
    let Some(code) = codec.encode(x, side) else { return Ok(()) };
    let mut stream = code.clone().into_bits();
    stream.extend([true, false, true]);
    let (back, used) = codec.decode(&stream, side).map_err(|e| format!("{}: {e}", codec.name()))?;
    ensure(back == *x && used == code.len(), || format!("{} failed on {x}", codec.name()))
}

fn coding_laws() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let mut reg = Registry::builtin();
    let bern = Arc::new(BernoulliClass::new(4).unwrap());
    let family = Arc::new(FiniteSetFamily::new(12).unwrap());
    reg.register_two_part_codec(bern.clone()).map_err(|e| e.to_string())?;
    ensure(reg.kraft_sum() <= 1.0, || format!("registry Kraft sum {}", reg.kraft_sum()))?;

    let codecs: Vec<Box<dyn Codec>> = vec![
        Box::new(Literal),
        Box::new(RunLength),
        Box::new(ModelArithmetic),
        Box::new(KtArithmetic { order: 0 }),
        Box::new(KtArithmetic { order: 1 }),
        Box::new(TwoPart::new(bern.clone()).unwrap()),
        Box::new(TwoPart::new(family.clone()).unwrap()),
    ];
    let h = bern.hypothesis(5);
    for codec in &codecs {
        for i in 0..1000 {
            let set_codec = codec.name().contains("sets");
            let n = if set_codec { 12 } else { r.random_range(0..80) };
            let p = r.random_range(0.05..0.95);
            let x = random_bits(&mut r, n, p);
            let sides = [
                SideInfo::none(),
                SideInfo::length(n),
                SideInfo::length_and_ones(n, x.count_ones()),
                SideInfo::model(n, bern.as_ref(), &h),
            ];
            let side = &sides[i % sides.len()];
            let side = if set_codec { &sides[1] } else { side };
            round_trip(codec.as_ref(), &x, side)?;
        }
    }
    for _ in 0..1000 {
        let len = r.random_range(0..60);
        let x = random_bits(&mut r, len, 0.5);
        let code = encode_standard(&x);
        ensure(decode_standard(&code).map_err(|e| e.to_string())?.0 == x, || format!("standard code of {x}"))?;
        let v = r.random_range(0..1u64 << 40);
        ensure(read_natural(encode_natural(v).bits()).map_err(|e| e.to_string())?.0 == v, || format!("natural {v}"))?;
    }

    for t in 0..100 {
        let m = r.random_range(1..=256);
        let raw: Vec<f64> = (0..m).map(|_| r.random::<f64>().powi(3) + 1e-6).collect();
        let total: f64 = raw.iter().sum();
        let dist = FiniteDistribution::new(raw.iter().map(|p| p / total).collect()).map_err(|e| e.to_string())?;
        let code = build_shannon_fano(&dist).map_err(|e| e.to_string())?;
        let kraft = idealmdl::codes::kraft_sum(&code.lengths());
        ensure(kraft <= 1.0 + 1e-12 && code.is_prefix_free(), || format!("Shannon-Fano code {t} is not prefix-free"))?;
        let (h, l) = (dist.entropy(), code.expected_length(&dist));
        ensure(h - 1e-9 <= l && l <= h + 1.0 + 1e-9, || format!("expected length {l} outside [{h}, {h}+1]"))?;
        let canonical = PrefixCode::from_lengths(&code.lengths()).map_err(|e| e.to_string())?;
        let symbols: Vec<usize> = (0..50).map(|_| r.random_range(0..m)).collect();
        let stream = canonical.encode(&symbols).map_err(|e| e.to_string())?;
        ensure(canonical.decode(&stream).map_err(|e| e.to_string())? == symbols, || "prefix round trip".into())?;
    }

    for i in 0..1000 {
        let n = r.random_range(0..600);
        let p = r.random_range(0.01..0.99);
        let x = random_bits(&mut r, n, p);
        let (coded, model): (_, Box<dyn idealmdl::codes::Predictor>) = if i % 2 == 0 {
            (arithmetic_encode(&x, &FixedBernoulli(p)), Box::new(FixedBernoulli(p)))
        } else {
            (arithmetic_encode(&x, &KtPredictor::new(i % 3)), Box::new(KtPredictor::new(i % 3)))
        };
        let coded = coded.map_err(|e| e.to_string())?;
        let ideal = ideal_length(&x, model.as_ref());
        ensure(coded.len() as f64 <= ideal + 2.0 + 1e-9, || format!("coded {} > ideal {ideal} + 2", coded.len()))?;
        let (back, used) = arithmetic_decode(coded.bits(), n, model.as_ref()).map_err(|e| e.to_string())?;
        ensure(back == x && used == coded.len(), || "arithmetic round trip".into())?;
    }
    within(start.elapsed(), 30)?;
    Ok("Kraft, round trips, Shannon-Fano window and coder overhead hold".into())
}

fn structure_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let mut catalogs: BTreeMap<usize, (FiniteSetFamily, BruteCatalog, Registry)> = BTreeMap::new();
    for i in 0..50 {
        let n = 4 + i % 9;
        let (family, brute, reg) = catalogs.entry(n).or_insert_with(|| {
            let family = FiniteSetFamily::new(n).unwrap();
            let brute = BruteCatalog::new(&family);
            let mut reg = Registry::builtin();
            reg.register_two_part_codec(Arc::new(family.clone())).unwrap();
            (family, brute, reg)
        });
        let x = random_bits(&mut r, n, [0.5, 0.2, 0.05][i % 3]);
        let kmax = 3 + n + 4;
        let profile = structure_function(&x, family, kmax, reg).map_err(|e| e.to_string())?;
        let expected = brute.profile(&x, kmax);
        let got: Vec<f64> = profile.points.iter().map(|p| p.value).collect();
        ensure(got == expected, || format!("profile mismatch for {x}: {got:?} vs {expected:?}"))?;
        ensure(profile.is_nonincreasing(), || format!("profile of {x} increases"))?;
        let kmss = find_kmss(&profile, 2.0);
        ensure(kmss.set.log2_size + kmss.k0 as f64 <= profile.khat_d + 2.0 + 1e-9 || kmss.fallback, || {
            format!("kmss bound fails for {x}")
        })?;
    }
    within(start.elapsed(), 60)?;
    Ok("50 profiles match the brute-force catalog".into())
}

fn test_mass_bounds() -> Outcome {
    let start = Instant::now();
    let tests = standard_tests();
    for test in &tests {
        for n in 0..=14 {
            let masses = critical_masses(test.as_ref(), Distribution::Uniform, n).map_err(|e| e.to_string())?;
            for (m, mass) in masses.iter().enumerate() {
                ensure(*mass <= (-(m as f64)).exp2() * (1.0 + 1e-12), || {
                    format!("{} at n={n}, m={m}: mass {mass}", test.name())
                })?;
            }
        }
    }
    let mut r = rng(7);
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = r.random_range(1..64);
        let x = random_bits(&mut r, n, [0.5, 0.1, 0.9][n % 3]);
        let u = universal_test(&tests, &x) as i64;
        for (y, test) in tests.iter().enumerate() {
            if u < test.level(&x) as i64 - (y as i64 + 1) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} dominance violations"))?;
    within(start.elapsed(), 120)?;
    Ok(format!("{} tests within 2^-m for n <= 14; dominance on 10^4 strings", tests.len()))
}

fn sum_test_conversion() -> Outcome {
    let start = Instant::now();
    let tests: [&dyn MlTest; 3] = [&InitialZeros, &Frequency, &OddPositions];
    let mut constants = Vec::new();
    for test in tests {
        let converted = to_sum_test(test, Distribution::Uniform, 12).map_err(|e| e.to_string())?;
        for n in 0..=12 {
            let check = is_sum_test(|x| converted.value(x), Distribution::Uniform, n).map_err(|e| e.to_string())?;
            ensure(check.passed, || format!("{} at n={n}: mass {}", test.name(), check.mass))?;
        }
        constants.push(format!("{}: c={}", test.name(), converted.c));
    }
    within(start.elapsed(), 60)?;
    Ok(constants.join(", "))
}

fn prediction_convergence() -> Outcome {
    let start = Instant::now();
    let truth = 22;
    let mixture = grid_with_truth(5, truth, 0.7).map_err(|e| e.to_string())?;
    let config = ExperimentConfig { n: 4096, trials: 200, seed: 9 };
    let conv = convergence_experiment(&mixture, truth, &default_checkpoints(4096), config).map_err(|e| e.to_string())?;
    let medians: Vec<f64> = conv.checkpoints.iter().map(|c| c.median_deviation).collect();
    ensure(conv.final_median() <= 0.05, || format!("final median {}", conv.final_median()))?;
    ensure(medians.first() > medians.last(), || format!("medians did not decrease: {medians:?}"))?;
    let sn = sn_experiment(&mixture, truth, config).map_err(|e| e.to_string())?;
    ensure(sn.within_bound, || format!("sum {} > bound {} + 3*{}", sn.total, sn.bound, sn.sigma))?;
    within(start.elapsed(), 300)?;
    Ok(format!(
        "median |ratio-1| at 4096 = {:.4}; sum S_n = {:.4} <= {:.4} + 3*{:.4}",
        conv.final_median(),
        sn.total,
        sn.bound,
        sn.sigma
    ))
}

/// Length-indexed classes are built for `n`, the data length.
fn random_class(r: &mut impl Rng, n: usize) -> Box<dyn ModelClass> {
    match r.random_range(0..4) {
        0 => Box::new(BernoulliClass::new(r.random_range(1..=6)).unwrap()),
        1 => Box::new(MarkovClass::new(r.random_range(0..=2), r.random_range(1..=3)).unwrap()),
        2 => Box::new(CountingClass::new(n).unwrap()),
        _ => Box::new(FiniteSetFamily::new(n).unwrap()),
    }
}

fn mdl_map_identity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(10);
    let mut compared = 0;
    for case in 0..1000 {
        let n = r.random_range(1..=16);
        let classes: Vec<Box<dyn ModelClass>> = (0..r.random_range(1..=3)).map(|_| random_class(&mut r, n)).collect();
        let refs: Vec<&dyn ModelClass> = classes.iter().map(|c| c.as_ref()).collect();
        let p = r.random_range(0.0..1.0);
        let x = random_bits(&mut r, n, p);
        let data: DataSample = x.into();
        let mdl = select_mdl(&refs, &data, f64::INFINITY);
        let map = select_map(&refs, &data, &PriorSpec::universal(), f64::INFINITY);
        match (mdl, map) {
            (Ok(a), Ok(b)) => {
                ensure(a.winner == b.winner, || format!("case {case}: {} vs {}", a.winner.label(), b.winner.label()))?;
                compared += 1;
            }
            (Err(a), Err(b)) => ensure(a == b, || format!("case {case}: {a} vs {b}"))?,
            (a, b) => return Err(format!("case {case}: {:?} vs {:?}", a.err(), b.err())),
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("identical winners on all {compared} feasible cases of 1000"))
}

fn emdl_absurdity() -> Outcome {
    let lang = LanguageClass::new();
    let data = DataSample::Examples(positive_examples());
    let emdl = select_emdl(&[&lang], &data, f64::INFINITY).map_err(|e| e.to_string())?;
    let accept_all = lang.hypothesis(LanguageRule::AcceptAll);
    ensure(emdl.winner == accept_all, || format!("E-MDL picked {:?}", emdl.winner.params))?;
    ensure(emdl.winner_total <= lang.accept_all_cost(), || format!("total {}", emdl.winner_total))?;
    let mdl = select_mdl(&[&lang], &data, f64::INFINITY).map_err(|e| e.to_string())?;
    ensure(mdl.winner != accept_all, || "MDL also picked accept-all".into())?;
    Ok(format!("E-MDL total {} bits; MDL picks {:?}", emdl.winner_total, mdl.winner.params))
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("polynomial selection", polynomial_selection),
        ("odd-positions values", odd_positions_values),
        ("Bernoulli atypicality", bernoulli_atypicality),
        ("coin-mixture prediction", coin_mixture),
        ("coding laws", coding_laws),
        ("structure-function oracle", structure_oracle),
        ("test mass bounds", test_mass_bounds),
        ("sum-test conversion", sum_test_conversion),
        ("prediction convergence", prediction_convergence),
        ("MDL and MAP identity", mdl_map_identity),
        ("E-MDL absurdity", emdl_absurdity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
