//! Subcommand implementations. Each writes a JSON envelope or raw output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use idealmdl::codes::{decode_doubling, decode_standard, encode_doubling, encode_standard, FixedBernoulli};
use idealmdl::complexity::{Registry, SideInfo};
use idealmdl::models::{DataSample, FiniteSetFamily, ModelClass, SetDescriptor};
use idealmdl::prediction::{
    agreement_experiment, convergence_experiment, default_checkpoints, sn_experiment, AgreementReport,
    ConvergenceReport, ExperimentConfig, MixturePredictor, SnReport,
};
use idealmdl::randomness::{
    deficiency, fi_check, standard_tests, test_by_name, universal_test, weak_random, DeficiencyReport, Distribution,
    FiReport, WeakRandomReport,
};
use idealmdl::report::{decimal_serde, SCHEMA_VERSION};
use idealmdl::selection::{
    posterior_ratio_check, select_emdl, select_gkmss, select_map, select_mdl, PriorSpec, Thresholds,
    DEFAULT_GKMSS_TOLERANCE,
};
use idealmdl::structure::{find_kmss, structure_function, Kmss, StructureProfile};
use idealmdl::BitString;

use crate::classes::{common_input_kind, find_hypothesis, ClassSpec};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::input::{bits_to_bytes, bytes_to_bits, parse_bits, read_bits, read_bytes, read_data, read_text};
use crate::{CodeOp, Format, RuleArg};

pub const DEFAULT_CLASS: &str = "bernoulli:r=5";
pub const DEFAULT_N: usize = 256;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_HORIZON: usize = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: &'a str,
    command: &'a str,
    report: &'a T,
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Write { path: "stdout".into(), source }),
    }
}

fn emit<T: Serialize>(command: &str, report: &T, out: Option<&Path>) -> CliResult<()> {
    let envelope = Envelope { schema_version: SCHEMA_VERSION, command, report };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    write_to(out, text.as_bytes())
}

fn registry_with(classes: &[Arc<dyn ModelClass>]) -> Registry {
    let mut registry = Registry::builtin();
    for class in classes.iter().filter(|c| c.is_decodable()) {
        registry.register_two_part_codec(class.clone()).expect("decodable class registers");
    }
    registry
}

fn parse_prior(text: &str) -> CliResult<PriorSpec> {
    match text {
        "universal" => Ok(PriorSpec::universal()),
        "uniform" => Ok(PriorSpec::uniform()),
        path => {
            let bytes = read_bytes(Path::new(path))?;
            let weights: BTreeMap<String, f64> = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Usage(format!("prior file {path}: {e}")))?;
            // The file itself is the prior's description.
            Ok(PriorSpec::explicit(weights, 8.0 * bytes.len() as f64)?)
        }
    }
}

pub fn select(cfg: &RunConfig, rule: RuleArg, prior: &str) -> CliResult<()> {
    let specs = cfg.classes.iter().map(|s| ClassSpec::parse(s)).collect::<CliResult<Vec<_>>>()?;
    let kind = common_input_kind(&specs)?;
    let data = read_data(cfg.input()?, kind)?;
    let classes = specs.iter().map(|s| s.build(data.len())).collect::<CliResult<Vec<_>>>()?;
    let refs: Vec<&dyn ModelClass> = classes.iter().map(|c| c.as_ref()).collect();
    let budget = cfg.budget();
    let report = match rule {
        RuleArg::Mdl => select_mdl(&refs, &data, budget)?,
        RuleArg::Map => {
            let prior = parse_prior(prior)?;
            let mut rep = select_map(&refs, &data, &prior, budget)?;
            if let DataSample::Bits(x) = &data {
                let defaults = Thresholds::for_length(x.len());
                let thresholds = Thresholds {
                    data: cfg.threshold_data.unwrap_or(defaults.data),
                    prior: cfg.threshold_prior.unwrap_or(defaults.prior),
                };
                let registry = registry_with(&classes);
                if let Ok(check) = posterior_ratio_check(&refs, &data, &prior, thresholds, budget, &registry) {
                    rep.checks.push(check);
                }
            }
            rep
        }
        RuleArg::Gkmss => {
            let registry = registry_with(&classes);
            select_gkmss(&refs, &data, cfg.c.unwrap_or(DEFAULT_GKMSS_TOLERANCE), budget, &registry)?
        }
        RuleArg::Emdl => select_emdl(&refs, &data, budget)?,
    };
    emit("select", &report, cfg.output.as_deref())
}

#[derive(Serialize)]
struct StructureReport {
    profile: StructureProfile,
    kmss: Kmss,
}

pub fn structure(cfg: &RunConfig) -> CliResult<()> {
    let x = read_bits(cfg.input()?)?;
    let family = FiniteSetFamily::new(x.len())?;
    let registry = registry_with(&[Arc::new(family.clone())]);
    let kmax = cfg.kmax.unwrap_or_else(|| family.cost(&SetDescriptor::Singleton { point: x.clone() }));
    let profile = structure_function(&x, &family, kmax, &registry)?;
    let kmss = find_kmss(&profile, cfg.c.unwrap_or(DEFAULT_GKMSS_TOLERANCE));
    if let Some(path) = &cfg.csv {
        write_to(Some(path), profile.to_csv()?.as_bytes())?;
    }
    eprintln!("{}", profile.sparkline());
    emit("structure", &StructureReport { profile, kmss }, cfg.output.as_deref())
}

#[derive(Serialize)]
struct TestLevel {
    name: String,
    level: u32,
}

#[derive(Serialize)]
struct RandtestReport {
    test: String,
    level: u32,
    levels: Vec<TestLevel>,
    distribution: String,
    deficiency: DeficiencyReport,
    weak_random: WeakRandomReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    fi: Option<FiReport>,
}

pub fn randtest(cfg: &RunConfig, test: &str, dist: &str) -> CliResult<()> {
    let x = read_bits(cfg.input()?)?;
    let tests = standard_tests();
    let level = if test == "universal" {
        universal_test(&tests, &x)
    } else {
        test_by_name(test).ok_or_else(|| CliError::Usage(format!("unknown test {test:?}")))?.level(&x)
    };
    let levels = tests.iter().map(|t| TestLevel { name: t.name(), level: t.level(&x) }).collect();
    let (deficiency, weak_random, fi) = if dist == "uniform" {
        let registry = Registry::builtin();
        (deficiency(&x, Distribution::Uniform, &registry), weak_random(&x, Distribution::Uniform, &registry), None)
    } else {
        let spec = dist
            .strip_prefix("class:")
            .ok_or_else(|| CliError::Usage(format!("--dist must be uniform or class:SPEC#INDEX, got {dist:?}")))?;
        let (spec, index) = spec
            .rsplit_once('#')
            .ok_or_else(|| CliError::Usage(format!("missing #INDEX in {dist:?}")))?;
        let index = index.parse().map_err(|_| CliError::Usage(format!("bad hypothesis index {index:?}")))?;
        let class = ClassSpec::parse(spec)?.build(x.len())?;
        let sample: DataSample = x.clone().into();
        let h = find_hypothesis(class.as_ref(), &sample, index)?;
        let registry = registry_with(std::slice::from_ref(&class));
        let model = Distribution::Model { class: class.as_ref(), hypothesis: &h };
        (
            deficiency(&x, model, &registry),
            weak_random(&x, model, &registry),
            Some(fi_check(&x, class.as_ref(), &h, &PriorSpec::universal(), &registry)),
        )
    };
    let report = RandtestReport {
        test: test.to_string(),
        level,
        levels,
        distribution: dist.to_string(),
        deficiency,
        weak_random,
        fi,
    };
    emit("randtest", &report, cfg.output.as_deref())
}

#[derive(Serialize)]
struct PredictReport {
    class: String,
    truth_index: usize,
    truth_label: String,
    #[serde(with = "decimal_serde")]
    truth_weight: f64,
    #[serde(with = "decimal_serde")]
    mass_outside_class: f64,
    sn: SnReport,
    convergence: ConvergenceReport,
    agreement: AgreementReport,
}

pub fn predict(cfg: &RunConfig, truth: Option<usize>, truth_p: Option<f64>) -> CliResult<()> {
    let seed = cfg.seed()?;
    let spec_text = match cfg.classes.as_slice() {
        [] => DEFAULT_CLASS,
        [one] => one.as_str(),
        _ => return Err(CliError::Usage("predict takes a single --class".into())),
    };
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let class = ClassSpec::parse(spec_text)?.build(n)?;
    let hypotheses = class.enumerate(&DataSample::Bits(BitString::new()), cfg.budget());
    let mut mixture = MixturePredictor::from_class(class.as_ref(), &hypotheses, n)?;
    let truth = truth.unwrap_or(mixture.components().len() / 2);
    if truth >= mixture.components().len() {
        return Err(CliError::Usage(format!("--truth {truth} exceeds {} components", mixture.components().len())));
    }
    if let Some(p) = truth_p {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Usage(format!("--truth-p must lie in [0, 1], got {p}")));
        }
        mixture.replace_component(truth, format!("bernoulli:p={p}"), Box::new(FixedBernoulli(p)))?;
    }
    let config = ExperimentConfig { n, trials: cfg.trials.unwrap_or(DEFAULT_TRIALS), seed };
    let sn = sn_experiment(&mixture, truth, config)?;
    let convergence = convergence_experiment(&mixture, truth, &default_checkpoints(n), config)?;
    let source = mixture.component_predictor(truth).expect("truth index checked");
    let classes: [&dyn ModelClass; 1] = [class.as_ref()];
    let agreement =
        agreement_experiment(source.as_ref(), &classes, &mixture, cfg.horizon.unwrap_or(DEFAULT_HORIZON), config)?;
    if let Some(path) = &cfg.csv {
        write_to(Some(path), sn.to_csv()?.as_bytes())?;
    }
    let report = PredictReport {
        class: class.id(),
        truth_index: truth,
        truth_label: mixture.components()[truth].label.clone(),
        truth_weight: mixture.normalized_prior(truth),
        mass_outside_class: mixture.mass_outside_class(),
        sn,
        convergence,
        agreement,
    };
    emit("predict", &report, cfg.output.as_deref())
}

fn no_trailing(rest: &BitString, what: &str) -> CliResult<()> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{} bits left over after the {what} codeword", rest.len())))
    }
}

pub fn codes(cfg: &RunConfig, op: CodeOp, format: Format) -> CliResult<()> {
    let path = cfg.input()?;
    let encoding = matches!(op, CodeOp::EncodeStandard | CodeOp::EncodeDoubling | CodeOp::Compress);
    let input = match (format, encoding) {
        (Format::Bits, _) => parse_bits(&read_text(path)?)?,
        (Format::Bytes, true) => bytes_to_bits(&read_bytes(path)?),
        (Format::Bytes, false) => BitString::from_packed(&read_bytes(path)?)?,
    };
    let output = match op {
        CodeOp::EncodeStandard => encode_standard(&input),
        CodeOp::EncodeDoubling => encode_doubling(&input)?,
        CodeOp::Compress => Registry::builtin().khat(&input, &SideInfo::none()).codeword,
        CodeOp::DecodeStandard => {
            let (x, rest) = decode_standard(&input)?;
            no_trailing(&rest, "standard")?;
            x
        }
        CodeOp::DecodeDoubling => {
            let (x, rest) = decode_doubling(&input)?;
            no_trailing(&rest, "doubling")?;
            x
        }
        CodeOp::Decompress => {
            let (x, used) = Registry::builtin().decode(input.bits(), &SideInfo::none())?;
            no_trailing(&input.slice(used, input.len()), "compressed")?;
            x
        }
    };
    let bytes = match (format, encoding) {
        (Format::Bits, _) => format!("{output}\n").into_bytes(),
        (Format::Bytes, true) => output.to_packed(),
        (Format::Bytes, false) => bits_to_bytes(&output)?,
    };
    write_to(cfg.output.as_deref(), &bytes)
}
