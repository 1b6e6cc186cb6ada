//! Datasets laid out as `root/<class>/<image files>`, or described by a
//! `dataset.tsv` manifest in the root.

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{load_image, Image};

pub const MANIFEST_NAME: &str = "dataset.tsv";

const IMAGE_EXTENSIONS: &[&str] = &["png", "tif", "tiff", "jpg", "jpeg", "bmp"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub path: PathBuf,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<Sample>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, deriving the lexicographically sorted class list.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let classes: BTreeSet<String> = samples.iter().map(|s| s.label.clone()).collect();
        if classes.len() < 2 {
            return Err(Error::Dataset(format!(
                "need at least 2 classes, found {}",
                classes.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Dataset(format!("duplicate sample id {:?}", s.id)));
            }
        }
        Ok(Self {
            samples,
            class_names: classes.into_iter().collect(),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.class_names.binary_search_by(|c| c.as_str().cmp(label)).ok()
    }

    /// Class index of every sample, in sample order.
    pub fn label_indices(&self) -> Vec<usize> {
        self.samples
            .iter()
            .map(|s| self.class_index(&s.label).expect("label in class list"))
            .collect()
    }

    pub fn sample(&self, id: &str) -> Option<&Sample> {
        self.samples.iter().find(|s| s.id == id)
    }

    /// Restriction to the given ids, keeping dataset order. The class list is kept as is.
    pub fn subset(&self, ids: &HashSet<&str>) -> Dataset {
        Dataset {
            samples: self
                .samples
                .iter()
                .filter(|s| ids.contains(s.id.as_str()))
                .cloned()
                .collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn load(&self, index: usize) -> Result<Image> {
        load_image(&self.samples[index].path)
    }

    /// Manifest serialization: `sample_id<TAB>path<TAB>label`, paths relative to `root` when possible.
    pub fn to_tsv(&self, root: &Path) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let p = s.path.strip_prefix(root).unwrap_or(&s.path);
            out.push_str(&format!("{}\t{}\t{}\n", s.id, p.display(), s.label));
        }
        out
    }
}

/// Parses a `dataset.tsv` manifest. Relative paths resolve against `root`.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_manifest(text: &str, root: &Path) -> Result<Vec<Sample>> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::format(
                MANIFEST_NAME,
                i + 1,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(Error::format(MANIFEST_NAME, i + 1, "empty field"));
        }
        samples.push(Sample {
            id: fields[0].to_string(),
            path: root.join(fields[1]),
            label: fields[2].to_string(),
        });
    }
    if samples.is_empty() {
        return Err(Error::format(MANIFEST_NAME, 0, "manifest lists no samples"));
    }
    Ok(samples)
}

fn is_image_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

fn check_decodable(path: &Path) -> Result<()> {
    image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .into_dimensions()
        .map(|_| ())
        .map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

/// Scans a class-per-directory tree (or reads its manifest).
///
/// Classes are sorted lexicographically, sample ids are `<class>/<filename>`,
/// and every image header is checked so an undecodable file fails here,
/// naming the file.
pub fn load_dataset(root: &Path) -> Result<Dataset> {
    if !root.is_dir() {
        return Err(Error::Dataset(format!(
            "dataset root {} does not exist or is not a directory",
            root.display()
        )));
    }
    let manifest = root.join(MANIFEST_NAME);
    let samples = if manifest.is_file() {
        let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        parse_manifest(&text, root)?
    } else {
        let mut samples = Vec::new();
        for class_dir in sorted_entries(root)? {
            if !class_dir.is_dir() {
                continue;
            }
            let class = class_dir
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| {
                    Error::Dataset(format!("non-UTF-8 class directory {}", class_dir.display()))
                })?
                .to_string();
            let mut count = 0;
            for file in sorted_entries(&class_dir)? {
                if !file.is_file() || !is_image_file(&file) {
                    continue;
                }
                let name = file
                    .file_name()
                    .and_then(|n| n.to_str())
                    .ok_or_else(|| Error::Dataset(format!("non-UTF-8 file name {}", file.display())))?;
                samples.push(Sample {
                    id: format!("{class}/{name}"),
                    path: file.clone(),
                    label: class.clone(),
                });
                count += 1;
            }
            if count == 0 {
                return Err(Error::Dataset(format!(
                    "empty class directory {}",
                    class_dir.display()
                )));
            }
        }
        samples
    };
    for s in &samples {
        check_decodable(&s.path)?;
    }
    Dataset::new(samples)
}
