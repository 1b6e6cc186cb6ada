//! Writing augmented copies of a dataset to disk, one set per epoch.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{augment_image, fit_pca, App, AugmentContext, MethodChoice, PcaBasis, PerturbParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::image::{save_png, GrayImage, Image};
use crate::rng::StreamKey;

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const MANIFEST_HEADER: &str = "epoch\tsample_id\tclass\tapp\tseed\tkey";

#[derive(Debug, Clone)]
pub struct ExportOptions {
    pub app: App,
    pub epochs: u64,
    pub seed: u64,
    pub size: usize,
    pub method: MethodChoice,
    pub params: PerturbParams,
    /// Variance share kept by the PCA bases.
    pub keep_variance: f64,
    /// Samples that must not influence any fitted quantity, and are not exported.
    pub test_ids: BTreeSet<String>,
    /// Samples the PCA bases are fitted on; all non-test samples when `None`.
    pub fit_ids: Option<Vec<String>>,
}

impl ExportOptions {
    pub fn new(app: App, epochs: u64, seed: u64) -> Self {
        Self {
            app,
            epochs,
            seed,
            size: super::DEFAULT_SIZE,
            method: MethodChoice::Random,
            params: PerturbParams::default(),
            keep_variance: 0.95,
            test_ids: BTreeSet::new(),
            fit_ids: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub epoch: u64,
    pub sample_id: String,
    pub class: String,
    pub app: App,
    pub seed: u64,
    pub key: String,
}

impl ManifestRow {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.epoch, self.sample_id, self.class, self.app, self.seed, self.key
        )
    }
}

/// Parses a manifest written by [`export_augmented`].
pub fn parse_augment_manifest(text: &str) -> Result<Vec<ManifestRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == MANIFEST_HEADER => {}
        _ => return Err(Error::format(MANIFEST_FILE, 1, "missing or wrong header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(Error::format(MANIFEST_FILE, i + 1, format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::format(MANIFEST_FILE, i + 1, format!("bad {what} {s:?}")))
        };
        if f[1].is_empty() || f[2].is_empty() || f[5].is_empty() {
            return Err(Error::format(MANIFEST_FILE, i + 1, "empty field"));
        }
        rows.push(ManifestRow {
            epoch: num(f[0], "epoch")?,
            sample_id: f[1].to_string(),
            class: f[2].to_string(),
            app: f[3].parse().map_err(|_| Error::format(MANIFEST_FILE, i + 1, format!("bad app {:?}", f[3])))?,
            seed: num(f[4], "seed")?,
            key: f[5].to_string(),
        });
    }
    Ok(rows)
}

/// `epoch_<e>/<class>/<file stem>.png` relative to the output root.
pub fn output_path(epoch: u64, class: &str, sample_id: &str) -> PathBuf {
    let base = sample_id.rsplit('/').next().unwrap_or(sample_id);
    let stem = Path::new(base)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(base);
    PathBuf::from(format!("epoch_{epoch}")).join(class).join(format!("{stem}.png"))
}

/// Fits one basis per plane on the given images; all must have the same plane count.
pub fn fit_bases(images: &[&Image], size: usize, keep: f64) -> Result<Vec<PcaBasis>> {
    let planes = images.first().map(|i| i.planes().len()).unwrap_or(0);
    if images.iter().any(|i| i.planes().len() != planes) {
        return Err(Error::Dataset("PCA fitting needs all-gray or all-color images".into()));
    }
    (0..planes)
        .map(|c| {
            let ps: Vec<&GrayImage> = images.iter().map(|i| &i.planes()[c]).collect();
            fit_pca(&ps, size, keep, c)
        })
        .collect()
}

/// Writes one augmented PNG per (epoch, non-test sample) and the manifest.
pub fn export_augmented(ds: &Dataset, opts: &ExportOptions, out: &Path) -> Result<Vec<ManifestRow>> {
    if opts.epochs == 0 {
        return Err(Error::InvalidInput("epochs must be positive".into()));
    }
    let is_test = |id: &str| opts.test_ids.contains(id);
    let exported: Vec<usize> = (0..ds.len()).filter(|&i| !is_test(&ds.samples()[i].id)).collect();
    let mut seen = HashSet::new();
    for &i in &exported {
        let s = &ds.samples()[i];
        if !seen.insert(output_path(1, &s.label, &s.id)) {
            return Err(Error::Dataset(format!("output name collision for sample {:?}", s.id)));
        }
    }
    let images: HashMap<usize, Image> = exported
        .par_iter()
        .map(|&i| ds.load(i).map(|img| (i, img)))
        .collect::<Result<_>>()?;

    let bases = if opts.app.needs_pca() {
        let fit: Vec<usize> = match &opts.fit_ids {
            Some(ids) => {
                if let Some(bad) = ids.iter().find(|id| is_test(id)) {
                    return Err(Error::Leakage(format!("PCA fit set contains test sample {bad:?}")));
                }
                ids.iter()
                    .map(|id| {
                        ds.samples()
                            .iter()
                            .position(|s| &s.id == id)
                            .ok_or_else(|| Error::Dataset(format!("unknown fit sample {id:?}")))
                    })
                    .collect::<Result<_>>()?
            }
            None => exported.clone(),
        };
        let fit_images: Vec<&Image> = fit.iter().filter_map(|i| images.get(i)).collect();
        if fit_images.len() != fit.len() {
            return Err(Error::Leakage("PCA fit set references a sample that is not exported".into()));
        }
        Some(fit_bases(&fit_images, opts.size, opts.keep_variance)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for epoch in 1..=opts.epochs {
        let results: Vec<ManifestRow> = exported
            .par_iter()
            .map(|&i| {
                let s = &ds.samples()[i];
                let donors: Vec<&Image> = exported
                    .iter()
                    .filter(|&&j| j != i && ds.samples()[j].label == s.label)
                    .map(|j| &images[j])
                    .collect();
                let ctx = AugmentContext {
                    bases: bases.as_deref(),
                    donors,
                    method: opts.method,
                    params: opts.params,
                    size: opts.size,
                };
                let key = StreamKey::new(opts.seed, &s.id, epoch, "augment");
                let img = augment_image(&images[&i], opts.app, &ctx, &mut key.rng())?;
                let path = out.join(output_path(epoch, &s.label, &s.id));
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                save_png(&img, &path)?;
                Ok(ManifestRow {
                    epoch,
                    sample_id: s.id.clone(),
                    class: s.label.clone(),
                    app: opts.app,
                    seed: opts.seed,
                    key: key.hex(),
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(results);
    }
    let mut text = String::from(MANIFEST_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.to_line());
        text.push('\n');
    }
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let manifest = out.join(MANIFEST_FILE);
    std::fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    Ok(rows)
}
