//! Cross-validated evaluation of descriptor ensembles.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scores::{sum_matrices, ScoreMatrix};
use super::svm::{train_ova_svm, SvmParams};
use crate::dataset::Dataset;
use crate::descriptors::bsif::{learn_fbsif_banks, IcaOptions};
use crate::descriptors::{extract_all, parse_descriptor_list, DescriptorKind, DescriptorParams, MemberVector, VectorKind};
use crate::error::{Error, Result};
use crate::folds::FoldPlan;
use crate::image::{GrayImage, Image};
use crate::rng;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadPurpose {
    /// Read for a fitting step while `held_out` is the test fold.
    Fit { held_out: usize },
    /// Read for feature extraction.
    Extract,
}

/// Random access to the images of a dataset, by sample index.
pub trait ImageSource: Sync {
    fn read(&self, index: usize, purpose: ReadPurpose) -> Result<Image>;
}

impl ImageSource for Dataset {
    fn read(&self, index: usize, _purpose: ReadPurpose) -> Result<Image> {
        self.load(index)
    }
}

/// Images held in memory, in dataset order.
pub struct MemorySource {
    pub images: Vec<Image>,
}

impl ImageSource for MemorySource {
    fn read(&self, index: usize, _purpose: ReadPurpose) -> Result<Image> {
        self.images
            .get(index)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no image at index {index}")))
    }
}

/// Descriptor families fused into one decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kinds: Vec<DescriptorKind>,
}

impl EnsembleSpec {
    pub fn fh_prime() -> Self {
        Self {
            kinds: DescriptorKind::FH_PRIME.to_vec(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.kinds.iter().map(|k| k.name().to_string()).collect()
    }
}

impl FromStr for EnsembleSpec {
    type Err = Error;

    /// `fh-prime` or a comma-separated descriptor list.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fh-prime" | "fhprime" | "fh'" => Ok(Self::fh_prime()),
            other => Ok(Self {
                kinds: parse_descriptor_list(other)?,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FusionMode {
    /// Members of one family are summed and re-normalized, then families are summed.
    Hierarchical,
    /// All members summed directly.
    Flat,
}

impl FusionMode {
    pub fn name(self) -> &'static str {
        match self {
            FusionMode::Hierarchical => "hierarchical",
            FusionMode::Flat => "flat",
        }
    }
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hierarchical" => Ok(FusionMode::Hierarchical),
            "flat" => Ok(FusionMode::Flat),
            _ => Err(Error::InvalidInput(format!(
                "unknown fusion mode {s:?} (valid: hierarchical, flat)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    /// Families extracted and scored.
    pub descriptors: Vec<DescriptorKind>,
    pub ensemble: EnsembleSpec,
    pub params: DescriptorParams,
    pub histogram_svm: SvmParams,
    pub statistics_svm: SvmParams,
    pub fusion: FusionMode,
    pub seed: u64,
    pub ica: IcaOptions,
}

impl ProtocolConfig {
    /// Ensemble families extracted on their own.
    pub fn new(ensemble: EnsembleSpec, seed: u64) -> Self {
        Self {
            descriptors: ensemble.kinds.clone(),
            ensemble,
            params: DescriptorParams::default(),
            histogram_svm: SvmParams::histogram(),
            statistics_svm: SvmParams::statistics(),
            fusion: FusionMode::Hierarchical,
            seed,
            ica: IcaOptions::default(),
        }
    }

    /// Flat key/value form embedded in reports.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let names = |ks: &[DescriptorKind]| ks.iter().map(|k| k.name()).collect::<Vec<_>>().join(",");
        m.insert("descriptors".into(), names(&self.descriptors));
        m.insert("ensemble".into(), names(&self.ensemble.kinds));
        m.insert("fusion".into(), self.fusion.name().into());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("svm.histogram".into(), self.histogram_svm.describe());
        m.insert("svm.statistics".into(), self.statistics_svm.describe());
        m.insert(
            "ica".into(),
            format!("tol={};max_iter={}", self.ica.tolerance, self.ica.max_iterations),
        );
        for &k in &self.descriptors {
            m.insert(format!("params.{}", k.name()), self.params.describe(k));
        }
        m
    }

    fn validate(&self) -> Result<()> {
        if self.descriptors.is_empty() {
            return Err(Error::InvalidInput("no descriptors requested".into()));
        }
        if self.ensemble.kinds.is_empty() {
            return Err(Error::InvalidInput("empty ensemble".into()));
        }
        if let Some(k) = self.ensemble.kinds.iter().find(|k| !self.descriptors.contains(k)) {
            return Err(Error::InvalidInput(format!(
                "ensemble member {k} is not in the descriptor set"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tool_version: String,
    pub k: usize,
    pub seed: u64,
    pub classes: Vec<String>,
    pub ensemble: Vec<String>,
    pub fusion: String,
    /// Every scored member, in fusion order.
    pub members: Vec<String>,
    pub fold_sizes: Vec<usize>,
    pub fold_accuracies: Vec<f64>,
    pub overall_accuracy: f64,
    pub tested: usize,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub member_accuracy: BTreeMap<String, f64>,
    pub group_accuracy: BTreeMap<String, f64>,
    /// `member/fold` entries whose test scores were constant.
    pub degenerate: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub fingerprint: String,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("report", e.line(), e.to_string()))
    }

    /// Recomputes the fingerprint after the config map changed.
    pub fn refresh_fingerprint(&mut self) {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        self.fingerprint = rng::sha256_hex(&[&self.tool_version, &config, &self.members.join(",")]);
    }
}

/// Raw test-fold scores of one member or group, one matrix per fold.
#[derive(Debug, Clone)]
pub struct FoldScores {
    pub name: String,
    pub folds: Vec<ScoreMatrix>,
}

#[derive(Debug, Clone)]
pub struct ProtocolOutput {
    pub report: EvalReport,
    pub members: Vec<FoldScores>,
    /// Per-family sums of normalized members.
    pub groups: Vec<FoldScores>,
    pub ensemble: FoldScores,
}

/// Vectors of one ensemble member over a whole dataset.
#[derive(Debug, Clone)]
pub struct MemberColumn {
    pub kind: DescriptorKind,
    pub name: String,
    pub vector_kind: VectorKind,
    /// Parameter string of the producing descriptor.
    pub config: String,
    /// One vector per sample, dataset order.
    pub values: Vec<Vec<f64>>,
}

fn columns_from(per_sample: Vec<Vec<MemberVector>>, ids: &[String]) -> Result<Vec<MemberColumn>> {
    let Some(first) = per_sample.first() else {
        return Ok(Vec::new());
    };
    let mut cols: Vec<MemberColumn> = first
        .iter()
        .map(|m| MemberColumn {
            kind: m.kind,
            name: m.member.clone(),
            vector_kind: m.vector.kind,
            config: m.vector.config.clone(),
            values: Vec::with_capacity(per_sample.len()),
        })
        .collect();
    for (i, sample) in per_sample.into_iter().enumerate() {
        if sample.len() != cols.len() || sample.iter().zip(&cols).any(|(m, c)| m.member != c.name) {
            return Err(Error::Mismatch(format!(
                "sample {} yields a different member set (mixed gray and color images?)",
                ids[i]
            )));
        }
        for (m, c) in sample.into_iter().zip(cols.iter_mut()) {
            c.values.push(m.vector.values);
        }
    }
    Ok(cols)
}

/// Extracts the given families from every sample, in parallel.
pub fn extract_members(
    source: &dyn ImageSource,
    ids: &[String],
    kinds: &[DescriptorKind],
    params: &DescriptorParams,
    banks: Option<&[crate::descriptors::BsifFilterBank]>,
) -> Result<Vec<MemberColumn>> {
    if kinds.is_empty() {
        return Ok(Vec::new());
    }
    let per_sample = (0..ids.len())
        .into_par_iter()
        .map(|i| {
            let img = source.read(i, ReadPurpose::Extract)?;
            extract_all(&img, kinds, params, banks)
        })
        .collect::<Result<Vec<_>>>()?;
    columns_from(per_sample, ids)
}

/// Reads a sample for a fitting step, refusing samples of the held-out fold.
pub fn fit_read(
    source: &dyn ImageSource,
    ds: &Dataset,
    plan: &FoldPlan,
    index: usize,
    held_out: usize,
) -> Result<Image> {
    let id = &ds.samples()[index].id;
    if plan.fold_of(id) != Some(held_out) {
        source.read(index, ReadPurpose::Fit { held_out })
    } else {
        Err(Error::Leakage(format!(
            "fitting step requested {id}, which belongs to test fold {held_out}"
        )))
    }
}

fn check_plan(ds: &Dataset, plan: &FoldPlan) -> Result<Vec<usize>> {
    if plan.assignment.len() != ds.len() {
        return Err(Error::Mismatch(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.assignment.len(),
            ds.len()
        )));
    }
    ds.samples()
        .iter()
        .map(|s| {
            plan.fold_of(&s.id)
                .ok_or_else(|| Error::Mismatch(format!("sample {} missing from fold plan", s.id)))
        })
        .collect()
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng::stream(seed, "fbsif", fold as u64, "bsif-learn").gen()
}

/// Stratified k-fold evaluation.
///
/// Per fold, FBSIF banks and SVMs are fit on the training folds only; every
/// member scores the test fold; each member's test-score matrix is z-scored
/// and fused per the ensemble. Non-learned descriptors are extracted once.
pub fn run_protocol(
    ds: &Dataset,
    source: &dyn ImageSource,
    plan: &FoldPlan,
    config: &ProtocolConfig,
) -> Result<ProtocolOutput> {
    config.validate()?;
    let fold_of = check_plan(ds, plan)?;
    let ids: Vec<String> = ds.samples().iter().map(|s| s.id.clone()).collect();
    let labels = ds.label_indices();
    let classes = ds.class_names().to_vec();
    let nc = classes.len();

    let fixed: Vec<DescriptorKind> = config.descriptors.iter().copied().filter(|k| !k.is_learned()).collect();
    let learned = config.descriptors.contains(&DescriptorKind::Fbsif);
    let fixed_cols = extract_members(source, &ids, &fixed, &config.params, None)?;

    let mut member_scores: Vec<FoldScores> = Vec::new();
    let mut group_scores: Vec<FoldScores> = Vec::new();
    let mut ensemble_folds = Vec::with_capacity(plan.k);
    let mut degenerate = Vec::new();
    let mut fold_accuracies = Vec::with_capacity(plan.k);
    let mut fold_sizes = Vec::with_capacity(plan.k);
    let mut confusion = vec![vec![0usize; nc]; nc];
    let mut member_correct: BTreeMap<String, usize> = BTreeMap::new();
    let mut group_correct: BTreeMap<String, usize> = BTreeMap::new();
    let mut tested = 0usize;
    let mut correct = 0usize;

    for fold in 0..plan.k {
        let train: Vec<usize> = (0..ids.len()).filter(|&i| fold_of[i] != fold).collect();
        let test: Vec<usize> = (0..ids.len()).filter(|&i| fold_of[i] == fold).collect();
        if test.is_empty() {
            return Err(Error::InvalidInput(format!("fold {fold} has no test samples")));
        }
        let learned_cols = if learned {
            let images = train
                .par_iter()
                .map(|&i| fit_read(source, ds, plan, i, fold))
                .collect::<Result<Vec<_>>>()?;
            let planes: Vec<&GrayImage> = images.iter().flat_map(|im| im.planes()).collect();
            let banks = learn_fbsif_banks(
                &planes,
                &config.params.fbsif_sizes,
                config.params.fbsif_bits,
                config.params.fbsif_patches,
                fold_seed(config.seed, fold),
                config.ica,
            )?;
            extract_members(source, &ids, &[DescriptorKind::Fbsif], &config.params, Some(&banks))?
        } else {
            Vec::new()
        };
        let mut cols: Vec<&MemberColumn> = Vec::new();
        for &k in &config.descriptors {
            let pool = if k.is_learned() { &learned_cols } else { &fixed_cols };
            cols.extend(pool.iter().filter(|c| c.kind == k));
        }
        if fold == 0 {
            member_scores = cols
                .iter()
                .map(|c| FoldScores {
                    name: c.name.clone(),
                    folds: Vec::new(),
                })
                .collect();
        } else if cols.len() != member_scores.len() || cols.iter().zip(&member_scores).any(|(c, m)| c.name != m.name) {
            return Err(Error::Mismatch(format!("fold {fold} produced a different member set")));
        }

        let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        let test_ids: Vec<String> = test.iter().map(|&i| ids[i].clone()).collect();
        let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        let scored = cols
            .par_iter()
            .map(|c| {
                let params = match c.vector_kind {
                    VectorKind::Statistics => &config.statistics_svm,
                    _ => &config.histogram_svm,
                };
                let xs: Vec<&[f64]> = train.iter().map(|&i| c.values[i].as_slice()).collect();
                let model = train_ova_svm(&xs, &train_labels, &classes, params)?;
                let ts: Vec<&[f64]> = test.iter().map(|&i| c.values[i].as_slice()).collect();
                Ok(model
                    .score_samples(&test_ids, &ts)?
                    .with_provenance(format!("{}/fold{fold}", c.name)))
            })
            .collect::<Result<Vec<ScoreMatrix>>>()?;

        let mut normalized = Vec::with_capacity(scored.len());
        for (c, s) in cols.iter().zip(&scored) {
            let (z, flat) = s.zscore();
            if flat {
                log::warn!("{} fold {fold}: constant test scores", c.name);
                degenerate.push(format!("{}/{fold}", c.name));
            }
            let hits = z.predict().iter().zip(&truth).filter(|(p, t)| p == t).count();
            *member_correct.entry(c.name.clone()).or_default() += hits;
            normalized.push(z);
        }

        let mut fold_groups = Vec::new();
        for &k in &config.ensemble.kinds {
            let members: Vec<&ScoreMatrix> = cols
                .iter()
                .zip(&normalized)
                .filter(|(c, _)| c.kind == k)
                .map(|(_, z)| z)
                .collect();
            if members.is_empty() {
                continue;
            }
            let group = sum_matrices(&members)?.with_provenance(format!("{}/fold{fold}", k.name()));
            let hits = group.predict().iter().zip(&truth).filter(|(p, t)| p == t).count();
            *group_correct.entry(k.name().to_string()).or_default() += hits;
            fold_groups.push((k, group));
        }
        if fold_groups.is_empty() {
            return Err(Error::InvalidInput(
                "no ensemble member produced scores (COL alone on grayscale data?)".into(),
            ));
        }
        let ensemble = match config.fusion {
            FusionMode::Hierarchical => {
                let renorm: Vec<ScoreMatrix> = fold_groups.iter().map(|(_, g)| g.zscore().0).collect();
                sum_matrices(&renorm.iter().collect::<Vec<_>>())?
            }
            FusionMode::Flat => {
                let members: Vec<&ScoreMatrix> = cols
                    .iter()
                    .zip(&normalized)
                    .filter(|(c, _)| config.ensemble.kinds.contains(&c.kind))
                    .map(|(_, z)| z)
                    .collect();
                sum_matrices(&members)?
            }
        }
        .with_provenance(format!("ensemble/fold{fold}"));

        let predicted = ensemble.predict();
        let hits = predicted.iter().zip(&truth).filter(|(p, t)| p == t).count();
        for (p, t) in predicted.iter().zip(&truth) {
            confusion[*t][*p] += 1;
        }
        fold_accuracies.push(hits as f64 / test.len() as f64);
        fold_sizes.push(test.len());
        tested += test.len();
        correct += hits;

        for (m, s) in member_scores.iter_mut().zip(scored) {
            m.folds.push(s);
        }
        for (k, g) in fold_groups {
            match group_scores.iter_mut().find(|g| g.name == k.name()) {
                Some(gs) => gs.folds.push(g),
                None => group_scores.push(FoldScores {
                    name: k.name().to_string(),
                    folds: vec![g],
                }),
            }
        }
        ensemble_folds.push(ensemble);
    }

    let total = tested as f64;
    let mut report = EvalReport {
        tool_version: TOOL_VERSION.to_string(),
        k: plan.k,
        seed: plan.seed,
        classes,
        ensemble: config.ensemble.names(),
        fusion: config.fusion.name().to_string(),
        members: member_scores.iter().map(|m| m.name.clone()).collect(),
        fold_sizes,
        fold_accuracies,
        overall_accuracy: correct as f64 / total,
        tested,
        confusion,
        member_accuracy: member_correct.into_iter().map(|(k, v)| (k, v as f64 / total)).collect(),
        group_accuracy: group_correct.into_iter().map(|(k, v)| (k, v as f64 / total)).collect(),
        degenerate,
        config: config.describe(),
        fingerprint: String::new(),
    };
    report.config.insert("folds.k".into(), plan.k.to_string());
    report.config.insert("folds.seed".into(), plan.seed.to_string());
    report.config.insert(
        "dataset.digest".into(),
        rng::sha256_hex(&[&ds.samples().iter().map(|s| format!("{}\t{}", s.id, s.label)).collect::<Vec<_>>().join("\n")]),
    );
    report.refresh_fingerprint();
    Ok(ProtocolOutput {
        report,
        members: member_scores,
        groups: group_scores,
        ensemble: FoldScores {
            name: "ensemble".into(),
            folds: ensemble_folds,
        },
    })
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;
    use crate::dataset::Sample;
    use crate::folds::make_folds;
    use crate::image::{ColorImage, ColorSpace};

    fn constant_set() -> (Dataset, MemorySource) {
        let mut samples = Vec::new();
        let mut images = Vec::new();
        for i in 0..20 {
            let (label, base) = if i % 2 == 0 { ("a", 50.0) } else { ("b", 200.0) };
            let id = format!("{label}/{i:02}");
            samples.push(Sample {
                id: id.clone(),
                path: PathBuf::from(&id),
                label: label.into(),
            });
            let plane = |c: usize| {
                GrayImage::from_fn(8, 8, |x, y| base + ((x * 7 + y * 3 + i + c) % 11) as f64 - 5.0).unwrap()
            };
            images.push(Image::Color(ColorImage::new([plane(0), plane(1), plane(2)], ColorSpace::Rgb).unwrap()));
        }
        (Dataset::new(samples).unwrap(), MemorySource { images })
    }

    #[test]
    fn separable_color_statistics() {
        let (ds, src) = constant_set();
        let plan = make_folds(&ds, 5, 3).unwrap();
        let config = ProtocolConfig::new("col".parse().unwrap(), 3);
        let out = run_protocol(&ds, &src, &plan, &config).unwrap();
        assert_eq!(out.report.overall_accuracy, 1.0);
        assert_eq!(out.report.tested, 20);
        assert_eq!(out.report.fold_accuracies.len(), 5);
        assert_eq!(out.report.members, vec!["col"]);
    }

    #[test]
    fn alias_matches_explicit_list() {
        let a: EnsembleSpec = "fh-prime".parse().unwrap();
        let b: EnsembleSpec = "ltp,mlpq,clbp,ric,ahp,fbsif,col,etas,mor".parse().unwrap();
        assert_eq!(a, b);
        assert!("ltp,nope".parse::<EnsembleSpec>().is_err());
    }

    struct Sentinel<'a> {
        inner: MemorySource,
        ds: &'a Dataset,
        plan: &'a FoldPlan,
        violations: AtomicUsize,
        fit_reads: AtomicUsize,
    }

    impl ImageSource for Sentinel<'_> {
        fn read(&self, index: usize, purpose: ReadPurpose) -> Result<Image> {
            if let ReadPurpose::Fit { held_out } = purpose {
                self.fit_reads.fetch_add(1, Ordering::SeqCst);
                if self.plan.fold_of(&self.ds.samples()[index].id) == Some(held_out) {
                    self.violations.fetch_add(1, Ordering::SeqCst);
                    return Err(Error::Leakage("sentinel".into()));
                }
            }
            self.inner.read(index, purpose)
        }
    }

    #[test]
    fn learned_filters_never_see_test_fold() {
        let (ds, src) = constant_set();
        let plan = make_folds(&ds, 4, 9).unwrap();
        let sentinel = Sentinel {
            inner: src,
            ds: &ds,
            plan: &plan,
            violations: AtomicUsize::new(0),
            fit_reads: AtomicUsize::new(0),
        };
        let mut config = ProtocolConfig::new("fbsif".parse().unwrap(), 1);
        config.params.fbsif_sizes = vec![3];
        config.params.fbsif_thresholds = vec![0.0];
        config.params.fbsif_bits = 4;
        config.params.fbsif_patches = 500;
        let out = run_protocol(&ds, &sentinel, &plan, &config).unwrap();
        assert_eq!(sentinel.violations.load(Ordering::SeqCst), 0);
        assert_eq!(sentinel.fit_reads.load(Ordering::SeqCst), 15 * 4);
        assert_eq!(out.report.members, vec!["fbsif@R", "fbsif@G", "fbsif@B"]);
        let err = fit_read(&sentinel, &ds, &plan, 0, plan.fold_of(&ds.samples()[0].id).unwrap());
        assert!(matches!(err, Err(Error::Leakage(_))));
    }

    #[test]
    fn report_is_deterministic() {
        let (ds, src) = constant_set();
        let plan = make_folds(&ds, 5, 3).unwrap();
        let mut config = ProtocolConfig::new("etas,mor".parse().unwrap(), 3);
        config.fusion = FusionMode::Flat;
        let a = run_protocol(&ds, &src, &plan, &config).unwrap().report.to_json();
        let b = run_protocol(&ds, &src, &plan, &config).unwrap().report.to_json();
        assert_eq!(a, b);
        let back = EvalReport::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
    }

    #[test]
    fn ensemble_must_be_extracted() {
        let (ds, src) = constant_set();
        let plan = make_folds(&ds, 5, 3).unwrap();
        let mut config = ProtocolConfig::new("etas".parse().unwrap(), 3);
        config.descriptors = vec![DescriptorKind::Mor];
        assert!(run_protocol(&ds, &src, &plan, &config).is_err());
    }
}
