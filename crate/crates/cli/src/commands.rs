use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use spanchance::corpus::{
    aggregate_stats, emit_report, parse_conll_str, partition_by_difficulty, CorpusDocument, OutputFormat, ParseOptions,
    Report,
};
use spanchance::{
    difficulty_against_fixed, difficulty_with, evaluate_pair, exact_expected_f1, location_distribution_with,
    mc_expected_f1, overlapping_location_distribution, ChanceOptions, ComputationMode, DifficultyReading,
    DistributionMode, Model, PlacedAnnotation, ProfileCoverage, SegmentProfile, SequenceSpec, Span,
};

use crate::args::{
    AgreeArgs, Command, Common, DifficultyArgs, DistributionArgs, PartitionArgs, RunConfig, ValidateArgs,
};
use crate::Failure;

type CmdResult = Result<(), Failure>;

/// Largest allowed gap between analytic and enumerated expected F1.
const VALIDATION_TOLERANCE: f64 = 1e-9;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Distribution(a) => prepare(&a.common).and_then(|_| distribution(a)),
        Command::Agree(a) => prepare(&a.common).and_then(|_| agree(a)),
        Command::Difficulty(a) => prepare(&a.common).and_then(|_| difficulty(a)),
        Command::Partition(a) => prepare(&a.common).and_then(|_| partition(a)),
        Command::Validate(a) => prepare(&a.common).and_then(|_| validate(a)),
    }
}

fn prepare(common: &Common) -> CmdResult {
    if !(common.alpha > 0.0 && common.alpha < 1.0) {
        return Err(spanchance::Error::InvalidAlpha(common.alpha).into());
    }
    if common.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs())
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start worker pool: {e}")))
}

fn write_out(text: &str) -> CmdResult {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Data(format!("cannot write output: {e}")))
}

fn json_with_config<T: Serialize>(value: &T, config: &RunConfig) -> String {
    let mut v = serde_json::to_value(value).expect("output serializes");
    if let Value::Object(map) = &mut v {
        map.insert("config".into(), config.to_json());
    }
    let mut text = serde_json::to_string_pretty(&v).expect("output serializes");
    text.push('\n');
    text
}

fn emit(report: Report, format: OutputFormat) -> CmdResult {
    let mut buf = Vec::new();
    emit_report(&report, format, &mut buf).map_err(Failure::from)?;
    write_out(&String::from_utf8(buf).expect("reports are UTF-8"))
}

fn parse_spans(text: &str) -> Result<Vec<Span>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (start, length) = item
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("span {item:?} is not start:length")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Usage(format!("span {item:?} is not start:length")))
            };
            Ok(Span::new(parse(start)?, parse(length)?))
        })
        .collect()
}

fn parse_lengths(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::Usage(format!("invalid segment length {s:?}"))))
        .collect()
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let read = if path.as_os_str() == "-" {
        io::read_to_string(io::stdin().lock())
    } else {
        std::fs::read_to_string(path)
    };
    read.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn parse_text(text: &str, path: &Path, options: &ParseOptions) -> Result<Vec<CorpusDocument>, Failure> {
    parse_conll_str(text, options).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_corpus(path: &Path, options: &ParseOptions) -> Result<Vec<CorpusDocument>, Failure> {
    parse_text(&read_text(path)?, path, options)
}

#[derive(Serialize)]
struct SegmentOutput {
    index: usize,
    length: usize,
    mode: DistributionMode,
    flat_region: Option<(usize, usize)>,
    probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct DistributionOutput {
    n: usize,
    lengths: Vec<usize>,
    model: Model,
    segments: Vec<SegmentOutput>,
}

fn distribution(args: DistributionArgs) -> CmdResult {
    let config = RunConfig::new("distribution", &args.common, None);
    let seq = SequenceSpec::new(args.n)?;
    let profile = SegmentProfile::new(args.lengths.clone())?;
    let options = args.common.distribution_options();
    let model = args.common.model();
    let indices: Vec<usize> = match args.index {
        Some(i) => vec![i],
        None => (1..=profile.k()).collect(),
    };
    let mut segments = Vec::with_capacity(indices.len());
    for i in indices {
        let dist = match model {
            Model::NonOverlapping => location_distribution_with(seq, &profile, i, &options)?,
            Model::Overlapping => overlapping_location_distribution(seq, &profile, i)?,
        };
        segments.push(SegmentOutput {
            index: i,
            length: dist.segment_length(),
            mode: dist.mode(),
            flat_region: dist.flat_region(),
            probabilities: dist.probs().to_vec(),
        });
    }
    let output = DistributionOutput {
        n: args.n,
        lengths: args.lengths,
        model,
        segments,
    };
    match args.common.format() {
        OutputFormat::Json => write_out(&json_with_config(&output, &config)),
        OutputFormat::Csv => {
            let mut text = String::from("segment,length,start,probability,mode\n");
            for s in &output.segments {
                let mode = serde_json::to_value(s.mode).expect("mode serializes");
                let mode = mode.as_str().unwrap_or_default();
                for (j, p) in s.probabilities.iter().enumerate() {
                    text.push_str(&format!("{},{},{},{:.12},{}\n", s.index, s.length, j + 1, p, mode));
                }
            }
            write_out(&text)
        }
    }
}

fn agree(args: AgreeArgs) -> CmdResult {
    let config = RunConfig::new("agree", &args.common, None);
    let options = args.common.chance_options();
    let format = args.common.format();
    let start = Instant::now();
    if let (Some(n), Some(s1), Some(s2)) = (args.n, &args.spans1, &args.spans2) {
        let seq = SequenceSpec::new(n)?;
        let gold = PlacedAnnotation::new(seq, parse_spans(s1)?)?;
        let other = PlacedAnnotation::new(seq, parse_spans(s2)?)?;
        let mut report = evaluate_pair(&gold, &other, &options)?;
        if args.reading() == DifficultyReading::FixedGold {
            report.difficulty = Some(difficulty_against_fixed(&gold, &options)?);
        }
        let report = Report::from_pair(&report, start.elapsed().as_secs_f64()).with_config(config.to_json());
        return emit(report, format);
    }
    let Some(gold_path) = &args.gold else {
        return Err(Failure::Usage(
            "give either -n with --spans1/--spans2 or --gold with --system or --system-column".into(),
        ));
    };
    let system_path = match (&args.system, args.system_column) {
        (Some(p), _) => p.clone(),
        (None, Some(_)) => gold_path.clone(),
        (None, None) => return Err(Failure::Usage("--gold needs --system or --system-column".into())),
    };
    if gold_path.as_os_str() == "-" && system_path.as_os_str() == "-" && args.system.is_some() {
        return Err(Failure::Usage("only one input can be read from standard input".into()));
    }
    let gold_text = read_text(gold_path)?;
    let gold = parse_text(&gold_text, gold_path, &args.conll.options(args.gold_column))?;
    let system = if args.system.is_none() {
        parse_text(&gold_text, gold_path, &args.conll.options(args.system_column))?
    } else {
        read_corpus(&system_path, &args.conll.options(args.system_column))?
    };
    let stats = aggregate_stats(&gold, &system, &options)?;
    let mut corpus = stats.report(&options);
    corpus.runtime_seconds = start.elapsed().as_secs_f64();
    emit(Report::from_corpus(&corpus).with_config(config.to_json()), format)
}

fn scores_only_difficulty(report: &mut Report) {
    for scores in std::iter::once(&mut report.overall).chain(report.per_type.values_mut()) {
        scores.observed_f1 = None;
        scores.corrected_f1 = None;
        scores.chance_f1 = scores.difficulty.map(|d| 1.0 - d);
    }
}

fn difficulty(args: DifficultyArgs) -> CmdResult {
    let config = RunConfig::new("difficulty", &args.common, None);
    let options = args.common.chance_options();
    let format = args.common.format();
    let start = Instant::now();
    if let Some(path) = &args.gold {
        let gold = read_corpus(path, &args.conll.options(None))?;
        let stats = aggregate_stats(&gold, &gold, &options)?;
        let mut corpus = stats.report(&options);
        corpus.runtime_seconds = start.elapsed().as_secs_f64();
        let mut report = Report::from_corpus(&corpus).with_config(config.to_json());
        if report.scored {
            scores_only_difficulty(&mut report);
        }
        return emit(report, format);
    }
    let Some(n) = args.n else {
        return Err(Failure::Usage("give -n with one or more -l profiles, or --gold".into()));
    };
    if args.lengths.is_empty() {
        return Err(Failure::Usage("at least one -l profile is required".into()));
    }
    let seq = SequenceSpec::new(n)?;
    let profiles = args
        .lengths
        .iter()
        .map(|l| Ok(SegmentProfile::new(parse_lengths(l)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let value = difficulty_with(seq, &profiles, &options)?;
    let mode = profiles
        .iter()
        .map(|p| ProfileCoverage::compute(seq, p, &options).map(|c| c.mode()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(ComputationMode::Exact);
    let pair = spanchance::AgreementReport {
        observed_f1: 0.0,
        chance_f1: 1.0 - value,
        corrected_f1: None,
        difficulty: Some(value),
        model: options.model,
        mode,
    };
    let mut report = Report::from_pair(&pair, start.elapsed().as_secs_f64()).with_config(config.to_json());
    report.overall.observed_f1 = None;
    emit(report, format)
}

fn partition(args: PartitionArgs) -> CmdResult {
    let config = RunConfig::new("partition", &args.common, None);
    let options: ChanceOptions = args.common.chance_options();
    let gold = read_corpus(&args.gold, &args.conll.options(args.gold_column))?;
    let part = partition_by_difficulty(&gold, args.threshold, &options)?;
    match args.common.format() {
        OutputFormat::Json => write_out(&json_with_config(&part, &config)),
        OutputFormat::Csv => {
            let mut text = String::from("sentence,chance_level,subset\n");
            for (i, c) in part.chance_levels.iter().enumerate() {
                let subset = if *c > part.threshold { "subset1" } else { "subset2" };
                text.push_str(&format!("{i},{c:.6},{subset}\n"));
            }
            write_out(&text)
        }
    }
}

#[derive(Serialize)]
struct ValidationOutput {
    n: usize,
    l1: Vec<usize>,
    l2: Vec<usize>,
    analytic: f64,
    analytic_mode: ComputationMode,
    /// `None` when enumeration exceeds the budget.
    enumerated: Option<f64>,
    monte_carlo: spanchance::McEstimate,
    analytic_minus_enumerated: Option<f64>,
    analytic_minus_monte_carlo: f64,
    /// Analytic-minus-MC difference in standard errors.
    z_score: Option<f64>,
    agrees: bool,
}

fn validate(args: ValidateArgs) -> CmdResult {
    let config = RunConfig::new("validate", &args.common, Some(args.samples));
    let options = args.common.chance_options();
    if options.model != Model::NonOverlapping {
        return Err(Failure::Usage("validation supports the non-overlapping model only".into()));
    }
    let seq = SequenceSpec::new(args.n)?;
    let p1 = SegmentProfile::new(args.l1.clone())?;
    let p2 = SegmentProfile::new(args.l2.clone())?;
    let analytic = spanchance::chance_f1_with(seq, &p1, &p2, &options)?;
    let enumerated = match exact_expected_f1(seq, &p1, &p2, args.budget) {
        Ok(v) => Some(v),
        Err(spanchance::Error::BudgetExceeded { required, budget }) => {
            log::warn!("enumeration skipped: {required} configuration pairs exceed budget {budget}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let mc = mc_expected_f1(seq, &p1, &p2, args.samples, args.common.seed)?;
    let diff = enumerated.map(|e| analytic.chance_f1 - e);
    let mc_diff = analytic.chance_f1 - mc.mean;
    let z_score = (mc.standard_error > 0.0).then(|| mc_diff / mc.standard_error);
    let agrees = diff.is_none_or(|d| d.abs() <= VALIDATION_TOLERANCE);
    let output = ValidationOutput {
        n: args.n,
        l1: args.l1,
        l2: args.l2,
        analytic: analytic.chance_f1,
        analytic_mode: analytic.mode,
        enumerated,
        monte_carlo: mc,
        analytic_minus_enumerated: diff,
        analytic_minus_monte_carlo: mc_diff,
        z_score,
        agrees,
    };
    match args.common.format() {
        OutputFormat::Json => write_out(&json_with_config(&output, &config))?,
        OutputFormat::Csv => {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.15}")).unwrap_or_default();
            let text = format!(
                "analytic,enumerated,monte_carlo,standard_error,analytic_minus_enumerated,analytic_minus_monte_carlo,samples,seed\n\
                 {:.15},{},{:.15},{:.15},{},{:.15},{},{}\n",
                output.analytic,
                opt(output.enumerated),
                output.monte_carlo.mean,
                output.monte_carlo.standard_error,
                opt(output.analytic_minus_enumerated),
                output.analytic_minus_monte_carlo,
                output.monte_carlo.samples,
                output.monte_carlo.seed,
            );
            write_out(&text)?
        }
    }
    if agrees {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "analytic {} and enumerated {} differ by more than {VALIDATION_TOLERANCE}",
            output.analytic,
            output.enumerated.unwrap_or(f64::NAN)
        )))
    }
}
