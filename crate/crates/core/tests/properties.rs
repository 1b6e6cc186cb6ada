mod common;

use std::path::PathBuf;

use bioens::descriptors::clbp::clbp_maps;
use bioens::descriptors::ltp::ltp_codes;
use bioens::descriptors::etas::etas_with_mean;
use bioens::descriptors::{bsif_descriptor, lbp_codes, BsifFilterBank, ltp_descriptor, ric_descriptor, LtpConfig, NeighborhoodConfig, RicConfig};
use bioens::image::resize_bilinear;
use bioens::learning::{fsum, sum_rule_fuse, wilcoxon_signed_rank, ScoreMatrix};
use bioens::{make_folds, Dataset, GrayImage, Sample};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn shifted(img: &GrayImage, s: f64) -> GrayImage {
    img.map(|v| v + s)
}

fn matrix(rng: &mut impl Rng, rows: usize, cols: usize, spread: f64) -> ScoreMatrix {
    let ids = (0..rows).map(|i| format!("s{i:03}")).collect();
    let classes = (0..cols).map(|c| format!("c{c}")).collect();
    let values = (0..rows * cols).map(|_| rng.gen_range(-spread..spread)).collect();
    ScoreMatrix::new(ids, classes, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ric_rotation_invariant(seed in any::<u64>(), w in 12usize..24, h in 12usize..24) {
        let img = common::random_integer_image(w, h, &mut common::rng(seed));
        let cfg = RicConfig { radii: vec![1.0, 2.0], interval_factor: 2.0 };
        let base = ric_descriptor(&img, &cfg).unwrap();
        let mut rot = img.clone();
        for _ in 0..3 {
            rot = rot.rotate90();
            prop_assert_eq!(&ric_descriptor(&rot, &cfg).unwrap().values, &base.values);
        }
    }

    #[test]
    fn ltp_swaps_under_negation(seed in any::<u64>(), r in prop::sample::select(vec![1.0, 2.0]), p in prop::sample::select(vec![8usize, 16])) {
        let img = common::random_integer_image(14, 14, &mut common::rng(seed));
        let neg = img.map(|v| 255.0 - v);
        let cfg = NeighborhoodConfig::new(r, p);
        let (pos_i, neg_i) = ltp_codes(&img, cfg, 2.5).unwrap();
        let (pos_n, neg_n) = ltp_codes(&neg, cfg, 2.5).unwrap();
        prop_assert_eq!(pos_i, neg_n);
        prop_assert_eq!(neg_i, pos_n);
    }

    #[test]
    fn additive_shift_keeps_codes(seed in any::<u64>(), s in 0.0f64..55.0) {
        let mut rng = common::rng(seed);
        let img = GrayImage::from_fn(16, 16, |_, _| rng.gen_range(0.0..200.0)).unwrap();
        let moved = shifted(&img, s);
        let ltp = LtpConfig::default();
        prop_assert_eq!(ltp_descriptor(&img, &ltp).unwrap().values, ltp_descriptor(&moved, &ltp).unwrap().values);
        for cfg in [NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)] {
            prop_assert_eq!(clbp_maps(&img, cfg).unwrap().sign, clbp_maps(&moved, cfg).unwrap().sign);
            prop_assert_eq!(lbp_codes(&img, cfg).unwrap(), lbp_codes(&moved, cfg).unwrap());
        }
        let ric = RicConfig { radii: vec![1.0, 2.0], interval_factor: 2.0 };
        prop_assert_eq!(ric_descriptor(&img, &ric).unwrap().values, ric_descriptor(&moved, &ric).unwrap().values);
    }

    #[test]
    fn fusion_ignores_positive_affine_maps(seed in any::<u64>(), members in 1usize..6) {
        let mut rng = common::rng(seed);
        let ms: Vec<ScoreMatrix> = (0..members).map(|_| matrix(&mut rng, 12, 4, 3.0)).collect();
        let moved: Vec<ScoreMatrix> = ms
            .iter()
            .map(|m| m.affine(rng.gen_range(0.01..100.0), rng.gen_range(-50.0..50.0)))
            .collect();
        let a = sum_rule_fuse(&ms.iter().collect::<Vec<_>>()).unwrap();
        let b = sum_rule_fuse(&moved.iter().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(a.predict(), b.predict());
    }

    #[test]
    fn fusion_order_and_grouping_free(seed in any::<u64>(), members in 2usize..8, cut in 0usize..8) {
        let mut rng = common::rng(seed);
        let ms: Vec<ScoreMatrix> = (0..members).map(|_| matrix(&mut rng, 9, 3, 1e3)).collect();
        let all: Vec<&ScoreMatrix> = ms.iter().collect();
        let reference = sum_rule_fuse(&all).unwrap();
        let mut shuffled = all.clone();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(sum_rule_fuse(&shuffled).unwrap().values().to_vec(), reference.values().to_vec());
        let cut = cut.min(members);
        let (left, right) = all.split_at(cut);
        let regrouped: Vec<&ScoreMatrix> = right.iter().chain(left.iter()).copied().collect();
        prop_assert_eq!(sum_rule_fuse(&regrouped).unwrap().values().to_vec(), reference.values().to_vec());
    }

    #[test]
    fn fsum_is_permutation_invariant(mut xs in prop::collection::vec(-1e12f64..1e12, 0..40), seed in any::<u64>()) {
        let a = fsum(xs.iter().copied());
        xs.shuffle(&mut common::rng(seed));
        prop_assert_eq!(a.to_bits(), fsum(xs.iter().copied()).to_bits());
    }

    #[test]
    fn zscore_standardizes(seed in any::<u64>(), rows in 2usize..20, cols in 2usize..6) {
        let m = matrix(&mut common::rng(seed), rows, cols, 50.0);
        let (z, degenerate) = m.zscore();
        prop_assert!(!degenerate);
        let n = z.values().len() as f64;
        let mean = z.values().iter().sum::<f64>() / n;
        let var = z.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!(mean.abs() < 1e-12);
        prop_assert!((var.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn folds_are_stratified(sizes in prop::collection::vec(1usize..15, 2..5), k in 2usize..7, seed in any::<u64>()) {
        let mut samples = Vec::new();
        for (c, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                samples.push(Sample { id: format!("c{c}/{i}.png"), path: PathBuf::from(format!("c{c}/{i}.png")), label: format!("c{c}") });
            }
        }
        let total: usize = sizes.iter().sum();
        prop_assume!(k <= total);
        let ds = Dataset::new(samples).unwrap();
        let plan = make_folds(&ds, k, seed).unwrap();
        prop_assert_eq!(plan.assignment.len(), total);
        for s in ds.samples() {
            prop_assert!(plan.fold_of(&s.id).unwrap() < k);
        }
        for (c, _) in sizes.iter().enumerate() {
            let mut counts = vec![0usize; k];
            for (id, &f) in &plan.assignment {
                if id.starts_with(&format!("c{c}/")) {
                    counts[f] += 1;
                }
            }
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn resize_stays_within_input_range(seed in any::<u64>(), w in 1usize..20, h in 1usize..20, nw in 1usize..40, nh in 1usize..40) {
        let img = common::random_image(w, h, &mut common::rng(seed));
        let out = resize_bilinear(&img, nw, nh).unwrap();
        let (lo, hi) = img.min_max();
        prop_assert!(out.data().iter().all(|&v| v >= lo && v <= hi));
        let flat = GrayImage::filled(w, h, 77.25).unwrap();
        prop_assert!(resize_bilinear(&flat, nw, nh).unwrap().data().iter().all(|&v| v == 77.25));
    }

    #[test]
    fn wilcoxon_symmetric_and_bounded(a in prop::collection::vec(0.0f64..1.0, 1..30), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let b: Vec<f64> = a.iter().map(|v| if rng.gen_bool(0.2) { *v } else { rng.gen_range(0.0..1.0) }).collect();
        let ab = wilcoxon_signed_rank(&a, &b).unwrap();
        let ba = wilcoxon_signed_rank(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        prop_assert_eq!(ab.w_plus, ba.w_minus);
    }

    #[test]
    fn etas_follows_joint_shift(seed in any::<u64>(), mu in 70u32..110, s in 0u32..35) {
        let mut rng = common::rng(seed);
        let img = GrayImage::from_fn(12, 12, |_, _| rng.gen_range(40..150) as f64).unwrap();
        let (mu, s) = (mu as f64, s as f64);
        let a = etas_with_mean(&img, mu, 30.0);
        let b = etas_with_mean(&shifted(&img, s), mu + s, 30.0);
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn bsif_sign_flip_toggles_bit(seed in any::<u64>(), bits in 1usize..6, flip in 0usize..6) {
        let mut rng = common::rng(seed);
        let flip = flip % bits;
        let mut filters: Vec<Vec<f64>> = (0..bits).map(|_| (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let img = common::random_image(10, 10, &mut rng);
        let a = bsif_descriptor(&img, &BsifFilterBank::from_filters(3, filters.clone()).unwrap(), 0.0).unwrap();
        filters[flip].iter_mut().for_each(|v| *v = -*v);
        let b = bsif_descriptor(&img, &BsifFilterBank::from_filters(3, filters).unwrap(), 0.0).unwrap();
        for code in 0..a.values.len() {
            prop_assert_eq!(a.values[code], b.values[code ^ (1 << flip)]);
        }
    }
}
