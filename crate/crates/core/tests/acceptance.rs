//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 9 needs the CHO image set; point `BIOENS_CHO_DIR` at a
//! directory with one sub-directory per class to run it.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use bioens::augment::{
    augment_image, dct2, perturb_noise, perturb_swap, perturb_zero, App, AugmentContext, DctPlan, Method, NoiseKind, PerturbParams,
};
use bioens::augment::MethodChoice;
use bioens::descriptors::clbp::clbp_descriptor;
use bioens::descriptors::col::channel_stats;
use bioens::descriptors::etas::{etas_descriptor, etas_ranges};
use bioens::descriptors::mapping::{uniform_mapping, MappingKind};
use bioens::descriptors::ric::pair_class_count;
use bioens::descriptors::{
    bsif_descriptor, extract_all, lbp_codes, ltp_descriptor, ric_descriptor, BsifFilterBank, DescriptorKind, DescriptorParams, LtpConfig,
    NeighborhoodConfig, RicConfig, SpreadForm,
};
use bioens::learning::svm::dual_objective;
use bioens::learning::{
    run_protocol, smo_solve, sum_rule_fuse, train_ova_svm, wilcoxon_signed_rank, EnsembleSpec, Kernel, ProtocolConfig, ScoreMatrix,
    SmoOptions, SvmParams,
};
use bioens::synthetic::{generate, SyntheticSpec};
use bioens::{load_dataset, make_folds, ColorImage, ColorSpace, GrayImage, Image};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    check(spent <= limit, format!("took {:.1?}, limit {:?}", spent, limit))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn dct_suite() -> Outcome {
    let start = Instant::now();
    let mut worst_orth: f64 = 0.0;
    for n in [2, 8, 64, 224] {
        let plan = DctPlan::new(n).unwrap();
        let c = plan.matrix();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| c[k * n + i] * c[k * n + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((dot - target).abs());
            }
        }
    }
    check(worst_orth < 1e-12, format!("orthonormality error {worst_orth:e}"))?;

    let plan = DctPlan::new(64).unwrap();
    let mut rng = common::rng(101);
    let (mut worst_rt, mut worst_parseval): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let m: Vec<f64> = (0..64 * 64).map(|_| rng.gen_range(0.0..255.0)).collect();
        let d = plan.forward(&m).unwrap();
        worst_rt = worst_rt.max(max_abs_diff(&plan.inverse(&d).unwrap(), &m));
        let em: f64 = m.iter().map(|v| v * v).sum();
        let ed: f64 = d.iter().map(|v| v * v).sum();
        worst_parseval = worst_parseval.max((em - ed).abs() / em);
    }
    check(worst_rt < 1e-9, format!("round-trip error {worst_rt:e}"))?;
    check(worst_parseval < 1e-12, format!("Parseval error {worst_parseval:e}"))?;

    let small = dct2(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    check(max_abs_diff(&small, &[5.0, -1.0, -2.0, 0.0]) < 1e-12, format!("[[1,2],[3,4]] gave {small:?}"))?;
    let m: Vec<f64> = (0..32 * 32).map(|_| rng.gen_range(0.0..255.0)).collect();
    let oracle = max_abs_diff(&DctPlan::new(32).unwrap().forward(&m).unwrap(), &common::dct2_double_sum(&m, 32));
    check(oracle < 1e-9, format!("double-sum oracle differs by {oracle:e}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "orth {worst_orth:.1e}, round-trip {worst_rt:.1e}, Parseval {worst_parseval:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn gray_test_image(seed: u64, side: usize) -> Image {
    let mut rng = common::rng(seed);
    Image::Gray(GrayImage::from_fn(side, side, |_, _| rng.gen_range(20..230) as f64).unwrap())
}

/// Output equals the input, allowing for the final random mirror.
fn same_up_to_mirror(out: &Image, img: &Image, tol: f64) -> bool {
    let close = |a: &Image, b: &Image| {
        a.planes()
            .iter()
            .zip(b.planes())
            .all(|(p, q)| max_abs_diff(p.data(), q.data()) <= tol)
    };
    close(out, img) || close(out, &img.map_planes(|p| p.flip_horizontal()))
}

fn augmentation_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(202);
    let coeffs: Vec<f64> = (0..4096).map(|_| rng.gen_range(-500.0..500.0)).collect();

    let mut c = coeffs.clone();
    perturb_zero(&mut c, 0.0, 1, &mut rng);
    check(c == coeffs, "MethodOne p=0 changed coefficients")?;
    let mut c = coeffs.clone();
    perturb_noise(&mut c, 0.0, NoiseKind::Uniform, 1, &mut rng);
    perturb_noise(&mut c, 0.0, NoiseKind::Gaussian, 1, &mut rng);
    check(c == coeffs, "MethodTwo sigma=0 changed coefficients")?;
    let mut c = coeffs.clone();
    let same: Vec<&[f64]> = vec![&coeffs; 5];
    perturb_swap(&mut c, &same, 0.5, 1, &mut rng).unwrap();
    check(c == coeffs, "MethodThree with identical donors changed coefficients")?;

    // DC stays put under every method, even at probability 1
    let donor: Vec<f64> = coeffs.iter().map(|v| v + 1.0).collect();
    let mut c = coeffs.clone();
    perturb_zero(&mut c, 1.0, 1, &mut rng);
    check(c[0] == coeffs[0] && c[1..].iter().all(|&v| v == 0.0), "MethodOne p=1 touched DC or left AC")?;
    let mut c = coeffs.clone();
    perturb_noise(&mut c, 80.0, NoiseKind::Gaussian, 1, &mut rng);
    check(c[0] == coeffs[0], "MethodTwo modified DC")?;
    let mut c = coeffs.clone();
    perturb_swap(&mut c, &[&donor], 1.0, 1, &mut rng).unwrap();
    check(c[0] == coeffs[0] && c[1..] == donor[1..], "MethodThree p=1 touched DC")?;

    let positions = 100_000;
    let base = vec![0.0; positions + 1];
    let donors: Vec<Vec<f64>> = (1..=5).map(|d| vec![d as f64; positions + 1]).collect();
    let refs: Vec<&[f64]> = donors.iter().map(|d| d.as_slice()).collect();
    let mut c = base.clone();
    perturb_swap(&mut c, &refs, 0.05, 1, &mut rng).unwrap();
    let frac = c[1..].iter().filter(|&&v| v != 0.0).count() as f64 / positions as f64;
    let expected = 1.0 - 0.95f64.powi(5);
    check((frac - expected).abs() <= 0.01, format!("swap fraction {frac:.4}, expected {expected:.4}"))?;

    // whole images through App6 at native size
    let img = gray_test_image(5, 32);
    let identity_cases = [
        (Method::One, PerturbParams { zero_probability: 0.0, ..PerturbParams::default() }, vec![]),
        (Method::Three, PerturbParams { swap_probability: 0.7, ..PerturbParams::default() }, vec![&img; 5]),
    ];
    for (method, params, donors) in identity_cases {
        let ctx = AugmentContext { method: MethodChoice::Fixed(method), params, size: 32, donors, ..AugmentContext::default() };
        let out = augment_image(&img, App::App6, &ctx, &mut rng).unwrap();
        check(same_up_to_mirror(&out, &img, 1e-9), format!("{} identity failed on an image", method.name()))?;
    }
    let flat = Image::Gray(GrayImage::filled(32, 32, 117.0).unwrap());
    let ctx = AugmentContext { method: MethodChoice::Fixed(Method::Two), size: 32, ..AugmentContext::default() };
    let out = augment_image(&flat, App::App6, &ctx, &mut rng).unwrap();
    check(same_up_to_mirror(&out, &flat, 1e-9), "MethodTwo on a zero-variance image changed it")?;
    let ctx = AugmentContext {
        method: MethodChoice::Fixed(Method::One),
        params: PerturbParams { zero_probability: 1.0, ..PerturbParams::default() },
        size: 32,
        ..AugmentContext::default()
    };
    let out = augment_image(&img, App::App6, &ctx, &mut rng).unwrap();
    let mean = img.planes()[0].mean();
    check(
        out.planes()[0].data().iter().all(|v| (v - mean).abs() < 1e-9),
        "MethodOne p=1 did not give the constant mean image",
    )?;
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("swap fraction {frac:.4} (expected {expected:.4}), {:.2?}", start.elapsed()))
}

fn random_banks(rng: &mut impl Rng) -> Vec<BsifFilterBank> {
    [3, 5, 7, 9, 11]
        .iter()
        .map(|&l| {
            let filters = (0..8).map(|_| (0..l * l).map(|_| rng.gen_range(-0.3..0.3)).collect()).collect();
            BsifFilterBank::from_filters(l, filters).unwrap()
        })
        .collect()
}

fn descriptor_suite() -> Outcome {
    let start = Instant::now();
    let flat = GrayImage::filled(24, 24, 100.0).unwrap();
    for cfg in [NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)] {
        let all = (1u32 << cfg.points) - 1;
        check(lbp_codes(&flat, cfg).unwrap().codes.iter().all(|&c| c == all), "LBP on a constant image")?;
    }

    let u8map = uniform_mapping(8, MappingKind::U2).unwrap();
    let u16map = uniform_mapping(16, MappingKind::U2).unwrap();
    check(u8map.bins == 59 && uniform_mapping(8, MappingKind::Riu2).unwrap().bins == 10, "u2/riu2 bin counts")?;
    let ltp = ltp_descriptor(&flat, &LtpConfig::default()).unwrap();
    check(ltp.values.len() == 604, format!("LTP length {}", ltp.values.len()))?;
    let zero_bins = [u8map.map(0), 59 + u8map.map(0), 118 + u16map.map(0), 361 + u16map.map(0)];
    check(
        zero_bins.iter().all(|&i| ltp.values[i] == 1.0) && ltp.values.iter().sum::<f64>() == 4.0,
        "LTP on a constant image",
    )?;

    let clbp = clbp_descriptor(&flat, &[NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)]).unwrap();
    check(clbp.values.len() == 848, format!("CLBP length {}", clbp.values.len()))?;
    let cell8 = (8 * 10 + 8) * 2 + 1;
    let cell16 = 200 + (16 * 18 + 16) * 2 + 1;
    check(clbp.values[cell8] == 1.0 && clbp.values[cell16] == 1.0, "CLBP on a constant image")?;

    let ric = ric_descriptor(&flat, &RicConfig::default()).unwrap();
    check(pair_class_count() == 4150 && ric.values.len() == 3 * 4150, "RIC layout")?;
    for block in ric.values.chunks(4150) {
        check(block.iter().filter(|&&v| v != 0.0).count() == 1 && block.contains(&1.0), "RIC on a constant image")?;
    }

    let expect_ranges = [(100.0, 255.0), (70.0, 255.0), (70.0, 130.0), (100.0, 225.0), (70.0, 225.0), (130.0, 225.0), (130.0, 255.0)];
    check(etas_ranges(100.0, 30.0) == expect_ranges, "ETAS ranges at mean 100")?;
    let etas = etas_descriptor(&flat, 30.0);
    for (r, block) in etas.values.chunks(9).enumerate() {
        let want = if r < 5 { 1.0 } else { 0.0 };
        check(block[8] == want && block[..8].iter().all(|&v| v == 0.0), format!("ETAS range E{}", r + 1))?;
    }
    let (_, sigma, _) = channel_stats(&[0.0, 1.0], SpreadForm::Printed);
    check((sigma - 0.7071).abs() < 1e-4, format!("COL spread {sigma}"))?;

    let mut rng = common::rng(303);
    let banks = random_banks(&mut rng);
    let params = DescriptorParams::default();
    let mut vectors = 0;
    for _ in 0..3 {
        let planes = [0, 1, 2].map(|_| common::random_integer_image(40, 40, &mut rng));
        let img = Image::Color(ColorImage::new(planes, ColorSpace::Rgb).unwrap());
        for m in extract_all(&img, &DescriptorKind::ALL, &params, Some(&banks)).unwrap() {
            m.vector.check_normalized(1e-12).map_err(|e| format!("{}: {e}", m.member))?;
            vectors += 1;
        }
    }

    let scales = [NeighborhoodConfig::new(1.0, 8), NeighborhoodConfig::new(2.0, 16)];
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let img = common::random_image(16, 16, &mut rng);
        let got = clbp_descriptor(&img, &scales).unwrap();
        let mut want = common::clbp_histogram(&img, 1.0, 8);
        want.extend(common::clbp_histogram(&img, 2.0, 16));
        worst = worst.max(max_abs_diff(&got.values, &want));
        for bank in &banks[..3] {
            for th in [-3.0, 0.0, 6.0] {
                let got = bsif_descriptor(&img, bank, th).unwrap();
                worst = worst.max(max_abs_diff(&got.values, &common::bsif_histogram(&img, &bank.filters, bank.size, th)));
            }
        }
    }
    check(worst <= 1e-12, format!("CLBP/BSIF oracle difference {worst:e}"))?;
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("{vectors} vectors normalized, oracle difference {worst:.1e}, {:.2?}", start.elapsed()))
}

fn ric_rotation() -> Outcome {
    let mut rng = common::rng(404);
    let cfg = RicConfig::default();
    for i in 0..20 {
        let img = common::random_integer_image(64, 64, &mut rng);
        let base = ric_descriptor(&img, &cfg).unwrap().values;
        let mut rot = img;
        for quarter in 1..4 {
            rot = rot.rotate90();
            check(
                ric_descriptor(&rot, &cfg).unwrap().values == base,
                format!("image {i} differs after {} degrees", quarter * 90),
            )?;
        }
    }
    Ok("20 images x 3 rotations bin-identical".into())
}

fn fusion_invariance() -> Outcome {
    let mut rng = common::rng(505);
    for trial in 0..200 {
        let rows = rng.gen_range(3..30);
        let cols = rng.gen_range(2..8);
        let members: Vec<ScoreMatrix> = (0..rng.gen_range(1..10))
            .map(|_| {
                let ids = (0..rows).map(|i| format!("s{i}")).collect();
                let classes = (0..cols).map(|c| format!("c{c}")).collect();
                let spread = 10f64.powf(rng.gen_range(-2.0..3.0));
                let values = (0..rows * cols).map(|_| rng.gen_range(-spread..spread)).collect();
                ScoreMatrix::new(ids, classes, values).unwrap()
            })
            .collect();
        let refs: Vec<&ScoreMatrix> = members.iter().collect();
        let fused = sum_rule_fuse(&refs).unwrap();
        let moved: Vec<ScoreMatrix> = members
            .iter()
            .map(|m| m.affine(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(-1e3..1e3)))
            .collect();
        let moved_fused = sum_rule_fuse(&moved.iter().collect::<Vec<_>>()).unwrap();
        check(fused.predict() == moved_fused.predict(), format!("trial {trial}: affine rescaling changed predictions"))?;
        let mut shuffled = refs.clone();
        shuffled.shuffle(&mut rng);
        check(sum_rule_fuse(&shuffled).unwrap().values() == fused.values(), format!("trial {trial}: not commutative"))?;
        let cut = rng.gen_range(0..=refs.len());
        let regrouped: Vec<&ScoreMatrix> = refs[cut..].iter().chain(&refs[..cut]).copied().collect();
        check(sum_rule_fuse(&regrouped).unwrap().values() == fused.values(), format!("trial {trial}: not associative"))?;
    }
    Ok("200 ensembles".into())
}

fn svm_checks() -> Outcome {
    let mut rng = common::rng(606);
    let classes: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let centers = [[0.2, 0.2, 0.6], [0.6, 0.2, 0.2], [0.2, 0.6, 0.2]];
    let mut xs = Vec::new();
    let mut labels = Vec::new();
    for (l, c) in centers.iter().enumerate() {
        for _ in 0..15 {
            xs.push(c.iter().map(|v| v + rng.gen_range(-0.05..0.05)).collect::<Vec<f64>>());
            labels.push(l);
        }
    }
    let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
    let ids: Vec<String> = (0..xs.len()).map(|i| format!("x{i}")).collect();
    for kernel in [Kernel::Intersection, Kernel::Linear, Kernel::Rbf { gamma: 2.0 }] {
        let params = SvmParams { kernel, ..SvmParams::histogram() };
        let model = train_ova_svm(&refs, &labels, &classes, &params).unwrap();
        let predicted = model.score_samples(&ids, &refs).unwrap().predict();
        check(predicted == labels, format!("{} kernel misclassifies training data", kernel.name()))?;
    }

    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let n = 10 + t;
        let mut pts = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let yi = if i % 2 == 0 { 1.0 } else { -1.0 };
            pts.push((0..3).map(|_| rng.gen_range(-1.0..1.0) + 0.3 * yi).collect::<Vec<f64>>());
            y.push(yi);
        }
        let prefs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        let kernel = if t % 2 == 0 { Kernel::Rbf { gamma: 0.7 } } else { Kernel::Linear };
        let c = [1.0, 10.0, 100.0][t % 3];
        let gram = kernel.gram(&prefs);
        let opts = SmoOptions { c, ..SmoOptions::default() };
        let sol = smo_solve(&gram, &y, &opts).unwrap();
        check(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)), format!("problem {t}: alpha outside [0, C]"))?;
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, yi)| a * yi).sum();
        check(balance.abs() < 1e-6, format!("problem {t}: sum alpha y = {balance:e}"))?;
        let objective = dual_objective(&gram, &y, &sol.alpha);
        let best = common::qp_minimum(&gram, &y, c);
        worst = worst.max((objective - best).abs() / best.abs());
    }
    check(worst < 1e-6, format!("SMO objective off by {worst:e} relative"))?;
    Ok(format!("3 kernels separate toys; worst QP relative gap {worst:.1e}"))
}

fn wilcoxon_checks() -> Outcome {
    let mut rng = common::rng(707);
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        for _ in 0..50 {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64 * 0.5).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64 * 0.5).collect();
            let got = wilcoxon_signed_rank(&a, &b).unwrap().p_value;
            worst = worst.max((got - common::wilcoxon_enumerated(&a, &b)).abs());
        }
    }
    check(worst <= 1e-12, format!("enumeration oracle differs by {worst:e}"))?;
    let p = wilcoxon_signed_rank(&[0.9, 0.8, 0.85, 0.95, 0.7], &[0.5, 0.6, 0.4, 0.3, 0.2]).unwrap().p_value;
    check((p - 0.0625).abs() < 1e-12, format!("all-positive n=5 gave p={p}"))?;
    Ok(format!("500 cases, worst difference {worst:.1e}; all-positive n=5 p={p}"))
}

fn synthetic_benchmark() -> Outcome {
    let start = Instant::now();
    let spec = SyntheticSpec::default();
    let (ds, source) = generate(&spec).unwrap();
    check(ds.len() == 150, format!("{} images generated", ds.len()))?;
    let plan = make_folds(&ds, 5, 7).unwrap();
    let out = run_protocol(&ds, &source, &plan, &ProtocolConfig::new(EnsembleSpec::fh_prime(), 7)).unwrap();
    let r = &out.report;
    let (best_name, best) = r
        .member_accuracy
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k.clone(), *v))
        .unwrap();
    check(r.fold_accuracies.len() == 5, "expected 5 fold accuracies")?;
    check(r.overall_accuracy >= 0.95, format!("FH' accuracy {:.4}", r.overall_accuracy))?;
    check(
        r.overall_accuracy >= best - 0.02,
        format!("FH' {:.4} below best member {best_name} {best:.4} - 0.02", r.overall_accuracy),
    )?;
    within_time(start, Duration::from_secs(600))?;
    Ok(format!(
        "FH' {:.4} over {} members, best member {best_name} {best:.4}, {:.1?}",
        r.overall_accuracy,
        r.members.len(),
        start.elapsed()
    ))
}

fn cho_reproduction(root: &Path) -> Outcome {
    let start = Instant::now();
    let ds = load_dataset(root).map_err(|e| e.to_string())?;
    let plan = make_folds(&ds, 5, 1).map_err(|e| e.to_string())?;
    let ltp = ProtocolConfig::new(EnsembleSpec { kinds: vec![DescriptorKind::Ltp] }, 1);
    let ltp_acc = run_protocol(&ds, &ds, &plan, &ltp).map_err(|e| e.to_string())?.report.overall_accuracy;
    let fh = ProtocolConfig::new(EnsembleSpec::fh_prime(), 1);
    let fh_acc = run_protocol(&ds, &ds, &plan, &fh).map_err(|e| e.to_string())?.report.overall_accuracy;
    check(ltp_acc >= 0.90, format!("LTP alone {ltp_acc:.4}"))?;
    check(fh_acc >= ltp_acc - 0.01, format!("FH' {fh_acc:.4} below LTP {ltp_acc:.4} - 0.01"))?;
    within_time(start, Duration::from_secs(7200))?;
    Ok(format!("LTP {ltp_acc:.4}, FH' {fh_acc:.4}, {:.1?}", start.elapsed()))
}

fn run(number: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {number}: {title} ({detail})");
            true
        }
        Err(detail) => {
            println!("FAIL criterion {number}: {title} ({detail})");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= run(1, "DCT suite", dct_suite);
    ok &= run(2, "augmentation identities", augmentation_identities);
    ok &= run(3, "descriptor analytic suite", descriptor_suite);
    ok &= run(4, "RIC rotation invariance", ric_rotation);
    ok &= run(5, "fusion invariance", fusion_invariance);
    ok &= run(6, "SVM", svm_checks);
    ok &= run(7, "Wilcoxon", wilcoxon_checks);
    ok &= run(8, "synthetic end-to-end benchmark", synthetic_benchmark);
    match std::env::var_os("BIOENS_CHO_DIR") {
        Some(dir) => ok &= run(9, "CHO reproduction", || cho_reproduction(Path::new(&dir))),
        None => println!("SKIP criterion 9: CHO reproduction (BIOENS_CHO_DIR not set)"),
    }
    if !ok {
        std::process::exit(1);
    }
}
