//! Texture descriptors, transform-domain augmentation and score-level
//! ensembles for bioimage classification.

pub mod augment;
pub mod dataset;
pub mod descriptors;
pub mod error;
pub mod folds;
pub mod image;
pub mod io;
pub mod learning;
pub mod rng;
pub mod synthetic;

pub use dataset::{load_dataset, Dataset, Sample};
pub use error::{Error, Result};
pub use folds::{make_folds, FoldPlan};
pub use image::{ColorImage, ColorSpace, GrayImage, Image};
