//! Handcrafted texture descriptors and the per-image extraction driver.

pub mod ahp;
pub mod bsif;
pub mod clbp;
pub mod col;
pub mod etas;
pub mod lbp;
pub mod lpq;
pub mod ltp;
pub mod mapping;
pub mod mor;
pub mod ric;
pub mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayImage, Image};

pub use ahp::{ahp_descriptor, AhpConfig};
pub use bsif::{bsif_descriptor, bsif_learn_filters, fbsif_bank, BsifFilterBank, IcaOptions};
pub use clbp::clbp_descriptor;
pub use col::{col_descriptor, SpreadForm};
pub use etas::etas_descriptor;
pub use lbp::{lbp_codes, CodeMap};
pub use lpq::{lpq_descriptor, mlpq_bank, LpqConfig, MlpqGrid};
pub use ltp::{ltp_descriptor, LtpConfig};
pub use mapping::{uniform_mapping, MappingKind, UniformMapping};
pub use mor::mor_descriptor;
pub use ric::{ric_descriptor, RicConfig};
pub use sampling::NeighborhoodConfig;

/// How the values of a vector are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorKind {
    /// Nonnegative, every block sums to 1.
    Histogram,
    /// Nonnegative, every block sums to 1 or is all zero.
    Fractions,
    /// Unconstrained real statistics.
    Statistics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub descriptor: String,
    pub config: String,
    /// Lengths of the consecutive sub-histograms; sums to `values.len()`.
    pub blocks: Vec<usize>,
    pub kind: VectorKind,
}

impl FeatureVector {
    pub fn histogram(descriptor: &str, config: String, values: Vec<f64>, blocks: Vec<usize>) -> Self {
        debug_assert_eq!(blocks.iter().sum::<usize>(), values.len());
        Self {
            values,
            descriptor: descriptor.to_string(),
            config,
            blocks,
            kind: VectorKind::Histogram,
        }
    }

    pub fn fractions(descriptor: &str, config: String, values: Vec<f64>, blocks: Vec<usize>) -> Self {
        Self {
            kind: VectorKind::Fractions,
            ..Self::histogram(descriptor, config, values, blocks)
        }
    }

    pub fn statistics(descriptor: &str, config: String, values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            values,
            descriptor: descriptor.to_string(),
            config,
            blocks: vec![n],
            kind: VectorKind::Statistics,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Histogram-like vectors compare with intersection; statistics do not.
    pub fn is_histogram(&self) -> bool {
        self.kind != VectorKind::Statistics
    }

    /// Checks finiteness and, for histogram-like kinds, nonnegativity and per-block normalization.
    pub fn check_normalized(&self, tol: f64) -> std::result::Result<(), String> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(format!("{}: value {i} not finite", self.descriptor));
        }
        if self.kind == VectorKind::Statistics {
            return Ok(());
        }
        if let Some(i) = self.values.iter().position(|&v| v < 0.0) {
            return Err(format!("{}: value {i} negative", self.descriptor));
        }
        let mut start = 0;
        for (b, &len) in self.blocks.iter().enumerate() {
            let s: f64 = self.values[start..start + len].iter().sum();
            let ok = (s - 1.0).abs() <= tol || (self.kind == VectorKind::Fractions && s == 0.0);
            if !ok {
                return Err(format!("{}: block {b} sums to {s}", self.descriptor));
            }
            start += len;
        }
        Ok(())
    }

    pub fn assert_normalized(&self, tol: f64) {
        if let Err(e) = self.check_normalized(tol) {
            panic!("{e}");
        }
    }
}

/// L1-normalized histogram of bin indices. All zero for an empty input.
pub fn normalized_histogram(indices: impl Iterator<Item = usize>, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let mut n = 0usize;
    for i in indices {
        h[i] += 1.0;
        n += 1;
    }
    if n > 0 {
        let n = n as f64;
        h.iter_mut().for_each(|v| *v /= n);
    }
    h
}

/// Descriptor families available to the extraction driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DescriptorKind {
    Ltp,
    Lpq,
    Mlpq,
    Clbp,
    Ric,
    Ahp,
    Fbsif,
    Col,
    Etas,
    Mor,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 10] = [
        DescriptorKind::Ltp,
        DescriptorKind::Lpq,
        DescriptorKind::Mlpq,
        DescriptorKind::Clbp,
        DescriptorKind::Ric,
        DescriptorKind::Ahp,
        DescriptorKind::Fbsif,
        DescriptorKind::Col,
        DescriptorKind::Etas,
        DescriptorKind::Mor,
    ];

    /// The handcrafted ensemble members, in fusion order.
    pub const FH_PRIME: [DescriptorKind; 9] = [
        DescriptorKind::Ltp,
        DescriptorKind::Mlpq,
        DescriptorKind::Clbp,
        DescriptorKind::Ric,
        DescriptorKind::Ahp,
        DescriptorKind::Fbsif,
        DescriptorKind::Col,
        DescriptorKind::Etas,
        DescriptorKind::Mor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Ltp => "ltp",
            DescriptorKind::Lpq => "lpq",
            DescriptorKind::Mlpq => "mlpq",
            DescriptorKind::Clbp => "clbp",
            DescriptorKind::Ric => "ric",
            DescriptorKind::Ahp => "ahp",
            DescriptorKind::Fbsif => "fbsif",
            DescriptorKind::Col => "col",
            DescriptorKind::Etas => "etas",
            DescriptorKind::Mor => "mor",
        }
    }

    /// Runs once on the color image rather than per channel.
    pub fn needs_color(self) -> bool {
        self == DescriptorKind::Col
    }

    pub fn is_learned(self) -> bool {
        self == DescriptorKind::Fbsif
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Self::ALL.into_iter().find(|k| k.name() == t).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown descriptor {s:?}; valid names: {}",
                Self::valid_names()
            ))
        })
    }
}

/// Parses a comma-separated descriptor list, dropping duplicates and keeping order.
pub fn parse_descriptor_list(s: &str) -> Result<Vec<DescriptorKind>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let k: DescriptorKind = part.parse()?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("empty descriptor list".into()));
    }
    Ok(out)
}

/// Parameters of every descriptor family.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorParams {
    pub ltp: LtpConfig,
    pub lpq: LpqConfig,
    pub mlpq: MlpqGrid,
    pub clbp: Vec<NeighborhoodConfig>,
    pub ric: RicConfig,
    pub ahp: AhpConfig,
    pub fbsif_sizes: Vec<usize>,
    pub fbsif_thresholds: Vec<f64>,
    pub fbsif_bits: usize,
    pub fbsif_patches: usize,
    pub col_spread: SpreadForm,
    pub etas_cutoff: f64,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            ltp: LtpConfig::default(),
            lpq: LpqConfig::default(),
            mlpq: MlpqGrid::default(),
            clbp: clbp::default_scales(),
            ric: RicConfig::default(),
            ahp: AhpConfig::default(),
            fbsif_sizes: bsif::FBSIF_SIZES.to_vec(),
            fbsif_thresholds: bsif::FBSIF_THRESHOLDS.to_vec(),
            fbsif_bits: 8,
            fbsif_patches: 10_000,
            col_spread: SpreadForm::Printed,
            etas_cutoff: etas::DEFAULT_CUTOFF,
        }
    }
}

impl DescriptorParams {
    /// Parameter string of one family, used in fingerprints.
    pub fn describe(&self, kind: DescriptorKind) -> String {
        match kind {
            DescriptorKind::Ltp => self.ltp.fingerprint(),
            DescriptorKind::Lpq => self.lpq.fingerprint(),
            DescriptorKind::Mlpq => format!("{:?}", self.mlpq),
            DescriptorKind::Clbp => format!("{:?}", self.clbp),
            DescriptorKind::Ric => self.ric.fingerprint(),
            DescriptorKind::Ahp => self.ahp.fingerprint(),
            DescriptorKind::Fbsif => format!(
                "sizes={:?};th={:?};bits={};patches={}",
                self.fbsif_sizes, self.fbsif_thresholds, self.fbsif_bits, self.fbsif_patches
            ),
            DescriptorKind::Col => format!("{:?}", self.col_spread),
            DescriptorKind::Etas => format!("tau={}", self.etas_cutoff),
            DescriptorKind::Mor => "otsu".into(),
        }
    }

    /// Number of vectors one family yields per plane.
    pub fn members_per_plane(&self, kind: DescriptorKind) -> usize {
        match kind {
            DescriptorKind::Mlpq => self.mlpq.configs().len(),
            DescriptorKind::Fbsif => self.fbsif_sizes.len() * self.fbsif_thresholds.len(),
            _ => 1,
        }
    }
}

/// One extracted vector with the ensemble member it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberVector {
    pub kind: DescriptorKind,
    /// Stable member name, e.g. `ltp`, `mlpq/017@G`.
    pub member: String,
    pub vector: FeatureVector,
}

/// Member name for the `index`-th vector of a family on a given channel.
pub fn member_name(kind: DescriptorKind, index: usize, count: usize, channel: Option<char>) -> String {
    let mut s = kind.name().to_string();
    if count > 1 {
        let width = (count - 1).to_string().len();
        s.push_str(&format!("/{index:0width$}"));
    }
    if let Some(c) = channel {
        s.push('@');
        s.push(c);
    }
    s
}

fn plane_vectors(
    plane: &GrayImage,
    kind: DescriptorKind,
    params: &DescriptorParams,
    banks: Option<&[BsifFilterBank]>,
) -> Result<Vec<FeatureVector>> {
    Ok(match kind {
        DescriptorKind::Ltp => vec![ltp_descriptor(plane, &params.ltp)?],
        DescriptorKind::Lpq => vec![lpq_descriptor(plane, &params.lpq)?],
        DescriptorKind::Mlpq => mlpq_bank(plane, &params.mlpq)?,
        DescriptorKind::Clbp => vec![clbp_descriptor(plane, &params.clbp)?],
        DescriptorKind::Ric => vec![ric_descriptor(plane, &params.ric)?],
        DescriptorKind::Ahp => vec![ahp_descriptor(plane, &params.ahp)?],
        DescriptorKind::Fbsif => {
            let banks = banks.ok_or_else(|| Error::InvalidInput("FBSIF needs learned filter banks".into()))?;
            fbsif_bank(plane, banks, &params.fbsif_thresholds)?
        }
        DescriptorKind::Etas => vec![etas_descriptor(plane, params.etas_cutoff)],
        DescriptorKind::Mor => vec![mor_descriptor(plane)],
        DescriptorKind::Col => unreachable!("COL is not a per-plane descriptor"),
    })
}

/// Extracts the requested families from one image.
///
/// Color images run every per-plane family once per RGB channel, with
/// members tagged `@R`, `@G`, `@B`; COL runs once and only on color images.
/// Output is grouped by family in the order given.
pub fn extract_all(
    img: &Image,
    kinds: &[DescriptorKind],
    params: &DescriptorParams,
    banks: Option<&[BsifFilterBank]>,
) -> Result<Vec<MemberVector>> {
    let mut out = Vec::new();
    for &kind in kinds {
        if kind.needs_color() {
            if let Image::Color(c) = img {
                out.push(MemberVector {
                    kind,
                    member: kind.name().to_string(),
                    vector: col::col_from_rgb(c, params.col_spread)?,
                });
            }
            continue;
        }
        let planes = img.planes();
        let tags: &[char] = if planes.len() == 3 { &['R', 'G', 'B'] } else { &[] };
        for (ci, plane) in planes.iter().enumerate() {
            let vectors = plane_vectors(plane, kind, params, banks)?;
            let count = vectors.len();
            for (i, vector) in vectors.into_iter().enumerate() {
                out.push(MemberVector {
                    kind,
                    member: member_name(kind, i, count, tags.get(ci).copied()),
                    vector,
                });
            }
        }
    }
    Ok(out)
}
