//! `bioens` command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 numerical failure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use bioens::augment::{export_augmented, App, ExportOptions, Method, MethodChoice};
use bioens::descriptors::bsif::learn_fbsif_banks;
use bioens::descriptors::{parse_descriptor_list, DescriptorKind, DescriptorParams, SpreadForm};
use bioens::io::features::{parse_feature_header, FeatureFile, FeatureRow};
use bioens::io::{fuse_tables, parse_config, parse_score_csv, score_csv_from_folds};
use bioens::learning::protocol::TOOL_VERSION;
use bioens::learning::{
    extract_members, run_protocol, wilcoxon_signed_rank, EnsembleSpec, EvalReport, FoldScores, FusionMode, Kernel,
    ProtocolConfig, ReadPurpose,
};
use bioens::learning::protocol::ImageSource;
use bioens::synthetic::{self, SyntheticSpec};
use bioens::{load_dataset, make_folds, Dataset, Error, FoldPlan};

#[derive(Parser)]
#[command(name = "bioens", version, about = "Texture-descriptor ensembles for bioimage classification")]
struct Cli {
    /// Plain-text `key = value` config; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More logging (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature files, one per ensemble member.
    Extract(ExtractArgs),
    /// Export augmented copies of the training samples.
    Augment(AugmentArgs),
    /// Write a stratified fold plan.
    Folds(FoldsArgs),
    /// Cross-validated evaluation with score fusion.
    Evaluate(EvaluateArgs),
    /// Sum-rule fusion of score CSVs.
    Fuse(FuseArgs),
    /// Wilcoxon signed-rank comparison of two reports.
    Stats(StatsArgs),
    /// Generate the three-class synthetic texture set.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Comma-separated descriptor names.
    #[arg(long)]
    descriptors: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for FBSIF filter learning.
    #[arg(long)]
    seed: Option<u64>,
    /// Overwrite feature files whose fingerprint differs.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// app1..app6
    #[arg(long)]
    app: Option<String>,
    #[arg(long)]
    epochs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// one, two, three or random
    #[arg(long)]
    method: Option<String>,
    /// Working size of the transform-domain protocols.
    #[arg(long)]
    size: Option<usize>,
    /// Fold plan JSON; with --test-fold, that fold is withheld.
    #[arg(long)]
    folds: Option<PathBuf>,
    #[arg(long)]
    test_fold: Option<usize>,
}

#[derive(Args)]
struct FoldsArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// `fh-prime` or a comma-separated descriptor list.
    #[arg(long)]
    ensemble: Option<String>,
    /// Extra descriptors scored on their own (defaults to the ensemble).
    #[arg(long)]
    descriptors: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fold plan JSON instead of a fresh plan from k and seed.
    #[arg(long)]
    folds: Option<PathBuf>,
    /// hierarchical or flat
    #[arg(long)]
    fusion: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FuseArgs {
    /// Score CSVs to fuse.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    report_a: PathBuf,
    report_b: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidInput(msg.into()).into()
}

/// Config values, looked up as `section.key` first and then `key`.
struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let map = match path {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self { map })
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.map
            .get(&format!("{section}.{key}"))
            .or_else(|| self.map.get(key))
            .map(String::as_str)
    }

    fn pick<T>(&self, flag: Option<T>, section: &str, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(section, key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config {section}.{key} = {v:?}: {e}"))),
            None => Ok(None),
        }
    }

    fn require<T>(&self, flag: Option<T>, section: &str, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.pick(flag, section, key)?
            .ok_or_else(|| usage(format!("--{} is required (or `{key}` in the config)", key.replace('_', "-"))))
    }

    fn descriptor_params(&self) -> Result<DescriptorParams> {
        let mut p = DescriptorParams::default();
        if let Some(v) = self.pick::<usize>(None, "params", "fbsif_patches")? {
            p.fbsif_patches = v;
        }
        if let Some(v) = self.pick::<usize>(None, "params", "fbsif_bits")? {
            p.fbsif_bits = v;
        }
        if let Some(v) = self.pick::<f64>(None, "params", "etas_cutoff")? {
            p.etas_cutoff = v;
        }
        if let Some(v) = self.raw("params", "col_spread") {
            p.col_spread = match v {
                "printed" => SpreadForm::Printed,
                "sample" => SpreadForm::Sample,
                _ => return Err(usage(format!("col_spread must be printed or sample, got {v:?}"))),
            };
        }
        Ok(p)
    }
}

fn parse_kernel(s: &str) -> Result<Kernel> {
    match s {
        "intersection" => Ok(Kernel::Intersection),
        "linear" => Ok(Kernel::Linear),
        _ => match s.strip_prefix("rbf:").map(str::parse::<f64>) {
            Some(Ok(gamma)) if gamma > 0.0 => Ok(Kernel::Rbf { gamma }),
            _ => Err(usage(format!("unknown kernel {s:?} (intersection, linear, rbf:<gamma>)"))),
        },
    }
}

fn ensure_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).with_context(|| format!("creating {}", p.display()))
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    if let Some(parent) = p.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

/// Hash of sample ids, labels and image bytes.
fn dataset_digest(ds: &Dataset) -> Result<String> {
    let mut parts = Vec::with_capacity(ds.len());
    for s in ds.samples() {
        let bytes = fs::read(&s.path).with_context(|| format!("reading {}", s.path.display()))?;
        parts.push(format!(
            "{}\t{}\t{}",
            s.id,
            s.label,
            bioens::rng::sha256_bytes_hex(&bytes)
        ));
    }
    let joined = parts.join("\n");
    Ok(bioens::rng::sha256_hex(&[&joined]))
}

fn cmd_extract(a: ExtractArgs, cfg: &Settings) -> Result<()> {
    let root: PathBuf = cfg.require(a.dataset, "extract", "dataset")?;
    let kinds = parse_descriptor_list(&cfg.require::<String>(a.descriptors, "extract", "descriptors")?)?;
    let out: PathBuf = cfg.require(a.out, "extract", "out")?;
    let force = a.force || cfg.pick::<bool>(None, "extract", "force")?.unwrap_or(false);
    let seed: Option<u64> = cfg.pick(a.seed, "extract", "seed")?;
    if kinds.contains(&DescriptorKind::Fbsif) && seed.is_none() {
        return Err(usage("--seed is required when extracting fbsif"));
    }
    let params = cfg.descriptor_params()?;
    let ds = load_dataset(&root)?;
    let digest = dataset_digest(&ds)?;
    ensure_dir(&out)?;

    let mut existing: HashMap<String, Vec<(PathBuf, String)>> = HashMap::new();
    for entry in fs::read_dir(&out).with_context(|| format!("listing {}", out.display()))? {
        let path = entry?.path();
        if !path.to_string_lossy().ends_with(".features.tsv") {
            continue;
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        if let Ok(h) = parse_feature_header(&text) {
            existing.entry(h.descriptor).or_default().push((path, h.fingerprint));
        }
    }
    let ids: Vec<String> = ds.samples().iter().map(|s| s.id.clone()).collect();
    for kind in kinds {
        let mut parts = vec![TOOL_VERSION.to_string(), kind.name().to_string(), params.describe(kind), digest.clone()];
        if kind.is_learned() {
            parts.push(format!("whole-dataset;seed={}", seed.unwrap_or_default()));
        }
        let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
        let fingerprint = bioens::rng::sha256_hex(&refs);
        if let Some(files) = existing.get(kind.name()) {
            if files.iter().all(|(_, f)| *f == fingerprint) {
                log::info!("{kind}: up to date, skipped");
                println!("{kind}: up to date");
                continue;
            }
            if !force {
                return Err(Error::Mismatch(format!(
                    "{kind}: existing feature files in {} have a different fingerprint; rerun with --force to overwrite",
                    out.display()
                ))
                .into());
            }
            for (p, _) in files {
                fs::remove_file(p).with_context(|| format!("removing {}", p.display()))?;
            }
        }
        let columns = if kind.is_learned() {
            let images = (0..ds.len())
                .map(|i| ds.read(i, ReadPurpose::Extract))
                .collect::<bioens::Result<Vec<_>>>()?;
            let planes: Vec<_> = images.iter().flat_map(|im| im.planes()).collect();
            let banks = learn_fbsif_banks(
                &planes,
                &params.fbsif_sizes,
                params.fbsif_bits,
                params.fbsif_patches,
                seed.unwrap_or_default(),
                Default::default(),
            )?;
            extract_members(&ds, &ids, &[kind], &params, Some(&banks))?
        } else {
            extract_members(&ds, &ids, &[kind], &params, None)?
        };
        if columns.is_empty() {
            println!("{kind}: no members for this dataset");
            continue;
        }
        for col in &columns {
            let file = FeatureFile {
                descriptor: kind.name().to_string(),
                member: col.name.clone(),
                config: col.config.clone(),
                fingerprint: fingerprint.clone(),
                dim: col.values.first().map_or(0, Vec::len),
                rows: ds
                    .samples()
                    .iter()
                    .zip(&col.values)
                    .map(|(s, v)| FeatureRow {
                        id: s.id.clone(),
                        label: s.label.clone(),
                        values: v.clone(),
                    })
                    .collect(),
            };
            write_file(&out.join(FeatureFile::file_name(&col.name)), &file.to_text()?)?;
        }
        println!("{kind}: {} feature file(s)", columns.len());
    }
    Ok(())
}

fn cmd_augment(a: AugmentArgs, cfg: &Settings) -> Result<()> {
    let root: PathBuf = cfg.require(a.dataset, "augment", "dataset")?;
    let app: App = cfg.require::<String>(a.app, "augment", "app")?.parse()?;
    let epochs: u64 = cfg.require(a.epochs, "augment", "epochs")?;
    let seed: u64 = cfg.require(a.seed, "augment", "seed")?;
    let out: PathBuf = cfg.require(a.out, "augment", "out")?;
    let ds = load_dataset(&root)?;
    let mut opts = ExportOptions::new(app, epochs, seed);
    if let Some(m) = cfg.pick::<String>(a.method, "augment", "method")? {
        opts.method = match m.as_str() {
            "random" => MethodChoice::Random,
            other => MethodChoice::Fixed(other.parse::<Method>()?),
        };
    }
    if let Some(size) = cfg.pick(a.size, "augment", "size")? {
        opts.size = size;
    }
    let plan_path: Option<PathBuf> = cfg.pick(a.folds, "augment", "folds")?;
    let test_fold: Option<usize> = cfg.pick(a.test_fold, "augment", "test_fold")?;
    match (plan_path, test_fold) {
        (Some(p), Some(f)) => {
            let plan = FoldPlan::from_json(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?;
            if f >= plan.k {
                return Err(usage(format!("--test-fold {f} out of range for k={}", plan.k)));
            }
            opts.test_ids = plan.fold_members(f).into_iter().map(String::from).collect::<BTreeSet<_>>();
        }
        (None, None) => {}
        _ => return Err(usage("--folds and --test-fold go together")),
    }
    let rows = export_augmented(&ds, &opts, &out)?;
    println!("{} augmented image(s) written to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_folds(a: FoldsArgs, cfg: &Settings) -> Result<()> {
    let root: PathBuf = cfg.require(a.dataset, "folds", "dataset")?;
    let k: usize = cfg.require(a.k, "folds", "k")?;
    let seed: u64 = cfg.require(a.seed, "folds", "seed")?;
    let out: PathBuf = cfg.require(a.out, "folds", "out")?;
    let ds = load_dataset(&root)?;
    let plan = make_folds(&ds, k, seed)?;
    write_file(&out, &(plan.to_json() + "\n"))?;
    println!("fold sizes {:?}", plan.fold_sizes());
    Ok(())
}

fn write_scores(dir: &Path, prefix: &str, scores: &FoldScores, labels: &HashMap<&str, &str>) -> Result<()> {
    let table = score_csv_from_folds(&scores.folds, |id| labels.get(id).map(|l| l.to_string()))?;
    let name = if prefix.is_empty() {
        format!("{}.csv", scores.name)
    } else {
        format!("{prefix}-{}.csv", scores.name.replace('/', "-"))
    };
    write_file(&dir.join(name), &table.to_csv()?)
}

fn cmd_evaluate(a: EvaluateArgs, cfg: &Settings) -> Result<()> {
    let root: PathBuf = cfg.require(a.dataset, "evaluate", "dataset")?;
    let ensemble: EnsembleSpec = cfg.require::<String>(a.ensemble, "evaluate", "ensemble")?.parse()?;
    let seed: u64 = cfg.require(a.seed, "evaluate", "seed")?;
    let out: PathBuf = cfg.require(a.out, "evaluate", "out")?;
    let folds_path: Option<PathBuf> = cfg.pick(a.folds, "evaluate", "folds")?;
    let ds = load_dataset(&root)?;
    let plan = match &folds_path {
        Some(p) => FoldPlan::from_json(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => {
            let k: usize = cfg.require(a.k, "evaluate", "k")?;
            make_folds(&ds, k, seed)?
        }
    };
    let mut config = ProtocolConfig::new(ensemble, seed);
    if let Some(d) = cfg.pick::<String>(a.descriptors, "evaluate", "descriptors")? {
        let mut kinds = parse_descriptor_list(&d)?;
        for k in &config.ensemble.kinds {
            if !kinds.contains(k) {
                kinds.push(*k);
            }
        }
        config.descriptors = kinds;
    }
    if let Some(f) = cfg.pick::<String>(a.fusion, "evaluate", "fusion")? {
        config.fusion = f.parse::<FusionMode>()?;
    }
    config.params = cfg.descriptor_params()?;
    if let Some(c) = cfg.pick::<f64>(None, "svm", "c")? {
        config.histogram_svm.smo.c = c;
        config.statistics_svm.smo.c = c;
    }
    if let Some(t) = cfg.pick::<f64>(None, "svm", "tolerance")? {
        config.histogram_svm.smo.tolerance = t;
        config.statistics_svm.smo.tolerance = t;
    }
    if let Some(k) = cfg.raw("svm", "histogram_kernel") {
        config.histogram_svm.kernel = parse_kernel(k)?;
    }
    if let Some(k) = cfg.raw("svm", "statistics_kernel") {
        config.statistics_svm.kernel = parse_kernel(k)?;
    }

    let output = run_protocol(&ds, &ds, &plan, &config)?;
    let mut report = output.report;
    report.config.insert("run.dataset".into(), root.display().to_string());
    if let Some(p) = &folds_path {
        report.config.insert("run.folds".into(), p.display().to_string());
    }
    report.refresh_fingerprint();

    ensure_dir(&out)?;
    write_file(&out.join("report.json"), &report.to_json())?;
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "created_unix": created,
        "tool_version": TOOL_VERSION,
        "fingerprint": report.fingerprint,
    });
    write_file(&out.join("report.meta.json"), &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    let labels: HashMap<&str, &str> = ds.samples().iter().map(|s| (s.id.as_str(), s.label.as_str())).collect();
    let scores = out.join("scores");
    for m in &output.members {
        write_scores(&scores, "member", m, &labels)?;
    }
    for g in &output.groups {
        write_scores(&scores, "group", g, &labels)?;
    }
    write_scores(&scores, "", &output.ensemble, &labels)?;

    println!("members: {}", report.members.len());
    let folds: Vec<String> = report.fold_accuracies.iter().map(|a| format!("{a:.4}")).collect();
    println!("fold accuracy: {}", folds.join(" "));
    println!("overall accuracy: {:.4}", report.overall_accuracy);
    Ok(())
}

fn cmd_fuse(a: FuseArgs, cfg: &Settings) -> Result<()> {
    let mut tables = Vec::with_capacity(a.inputs.len());
    for p in &a.inputs {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        tables.push(parse_score_csv(&text).with_context(|| format!("in {}", p.display()))?);
    }
    let refs: Vec<_> = tables.iter().collect();
    let (fused, acc) = fuse_tables(&refs)?;
    if let Some(out) = cfg.pick::<PathBuf>(a.out, "fuse", "out")? {
        write_file(&out, &fused.to_csv()?)?;
    }
    println!("accuracy: {acc:.6}");
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let read = |p: &Path| -> Result<EvalReport> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        Ok(EvalReport::from_json(&text).with_context(|| format!("in {}", p.display()))?)
    };
    let (ra, rb) = (read(&a.report_a)?, read(&a.report_b)?);
    let r = wilcoxon_signed_rank(&ra.fold_accuracies, &rb.fold_accuracies)?;
    if let Some(w) = &r.warning {
        eprintln!("warning: {w}");
    }
    println!("n: {}", r.n);
    println!("W+: {}", r.w_plus);
    println!("W-: {}", r.w_minus);
    println!("statistic: {}", r.statistic);
    println!("p: {}", r.p_value);
    println!("method: {:?}", r.method);
    Ok(())
}

fn cmd_synth(a: SynthArgs, cfg: &Settings) -> Result<()> {
    let out: PathBuf = cfg.require(a.out, "synth", "out")?;
    let d = SyntheticSpec::default();
    let spec = SyntheticSpec {
        per_class: cfg.pick(a.per_class, "synth", "per_class")?.unwrap_or(d.per_class),
        size: cfg.pick(a.size, "synth", "size")?.unwrap_or(d.size),
        seed: cfg.pick(a.seed, "synth", "seed")?.unwrap_or(d.seed),
    };
    let ds = synthetic::write(&spec, &out)?;
    println!("{} images in {}", ds.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Extract(a) => cmd_extract(a, &cfg),
        Command::Augment(a) => cmd_augment(a, &cfg),
        Command::Folds(a) => cmd_folds(a, &cfg),
        Command::Evaluate(a) => cmd_evaluate(a, &cfg),
        Command::Fuse(a) => cmd_fuse(a, &cfg),
        Command::Stats(a) => cmd_stats(a),
        Command::Synth(a) => cmd_synth(a, &cfg),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_usage() => 2,
        Some(e) if e.is_numerical() => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
