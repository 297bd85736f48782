//! Acceptance suite. Prints one PASS/FAIL/SKIPPED line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Criterion 10 needs the ISIC 2017 training data. Set `ISIC_2017_IMAGES` to
//! the image directory and `ISIC_2017_GT` to the ground-truth directory
//! (defaults to the image directory); without them it is reported SKIPPED.

use std::time::{Duration, Instant};

use lesionseg::grabcut::{cut_step, fit_gmm, max_flow, FlowNetwork, GraphParams};
use lesionseg::harness::{
    load_dataset, run_batch, run_pipeline, write_report_with, DataTerm, PipelineConfig, ReportOptions,
};
use lesionseg::io::{save_mask, save_rgb};
use lesionseg::preprocess::{detect_dark_border, remove_border};
use lesionseg::raster::{hsv_to_rgb, rgb_to_hsv, BinaryMask, Rgb, RgbImage};
use lesionseg::seed::{fallback_rect, Trimap, TrimapLabel};
use lesionseg::synth::{fixture_set, fixture_set_with, render_fixture, FixtureSpec, REDDISH_TONES};
use lesionseg::{confusion, jaccard, mean_jaccard};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

use Outcome::{Fail, Pass, Skipped};

type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn random_network(rng: &mut ChaCha8Rng) -> FlowNetwork {
    let n = rng.random_range(1..=8);
    let mut net = FlowNetwork::new(n);
    for i in 0..n {
        net.set_terminals(i, rng.random_range(0..=10) as f64, rng.random_range(0..=10) as f64);
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.6) {
                net.add_edge(u, v, rng.random_range(0..=10) as f64);
            }
        }
    }
    net
}

fn partitions(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

fn c1_maxflow_exact() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 2000;
    for t in 0..trials {
        let net = random_network(&mut rng);
        let brute = partitions(net.node_count())
            .map(|s| net.cut_capacity(&s))
            .fold(f64::INFINITY, f64::min);
        let mf = max_flow(&net);
        if mf.flow != brute || net.cut_capacity(&mf.source_side) != brute {
            return Fail(format!("network {t}: flow {} vs brute-force cut {brute}", mf.flow));
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(10),
        format!("{trials} networks match brute force in {elapsed:.2?}"),
    )
}

/// Energy of a labeling with the data term of the given models, computed
/// directly from the definitions rather than through the graph.
fn direct_energy(img: &RgbImage, labels: &[bool], fg: &lesionseg::grabcut::GmmModel, bg: &lesionseg::grabcut::GmmModel, p: &GraphParams) -> f64 {
    let (w, h) = img.dims();
    let z = |x: usize, y: usize| img.get(x, y).map(f64::from);
    let mut e = 0.0;
    for y in 0..h {
        for x in 0..w {
            let m = if labels[y * w + x] { fg } else { bg };
            e += m.neg_log_likelihood(&z(x, y));
        }
    }
    for y1 in 0..h {
        for x1 in 0..w {
            for y2 in 0..h {
                for x2 in 0..w {
                    let (dx, dy) = (x1.abs_diff(x2), y1.abs_diff(y2));
                    let ordered = (y1, x1) < (y2, x2);
                    if dx <= 1 && dy <= 1 && ordered && labels[y1 * w + x1] != labels[y2 * w + x2] {
                        let d2: f64 = (0..3).map(|c| (z(x1, y1)[c] - z(x2, y2)[c]).powi(2)).sum();
                        let dist = ((dx * dx + dy * dy) as f64).sqrt();
                        e += p.gamma / dist * (-p.beta * d2).exp();
                    }
                }
            }
        }
    }
    e
}

fn c2_cut_is_energy_optimal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dims = [(1, 2), (2, 1), (2, 2), (1, 5), (3, 2), (2, 3), (2, 4), (4, 2), (1, 8), (8, 1)];
    let cfg = PipelineConfig::default();
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 300 {
        let (w, h) = dims[rng.random_range(0..dims.len())];
        let n = w * h;
        let palette: Vec<Rgb> = (0..3).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let img = RgbImage::from_fn(w, h, |_, _| {
            let base = palette[rng.random_range(0..palette.len())];
            base.map(|c| c.saturating_add(rng.random_range(0..20)))
        })
        .unwrap();
        let all = [
            TrimapLabel::SureBackground,
            TrimapLabel::ProbableBackground,
            TrimapLabel::ProbableForeground,
            TrimapLabel::SureForeground,
        ];
        let labels: Vec<TrimapLabel> = (0..n).map(|_| all[rng.random_range(0..4)]).collect();
        let Ok(trimap) = Trimap::new(w, h, labels) else { continue };
        let class = |fg: bool| -> Vec<Rgb> {
            img.pixels()
                .iter()
                .zip(trimap.labels())
                .filter(|(_, l)| l.is_foreground() == fg)
                .map(|(p, _)| *p)
                .collect()
        };
        let fg = fit_gmm(&class(true), cfg.gmm_k, rng.random()).unwrap();
        let bg = fit_gmm(&class(false), cfg.gmm_k, rng.random()).unwrap();
        let params = GraphParams {
            gamma: cfg.gamma,
            beta: lesionseg::grabcut::compute_beta(&img),
            data_term: DataTerm::FullMixture,
        };
        let cut = cut_step(&img, &trimap, &fg, &bg, &params).unwrap();
        let cut_energy = direct_energy(&img, &cut, &fg, &bg, &params);
        for cand in partitions(n) {
            let consistent = cand
                .iter()
                .zip(trimap.labels())
                .all(|(&c, l)| !l.is_sure() || c == l.is_foreground());
            if !consistent {
                continue;
            }
            let e = direct_energy(&img, &cand, &fg, &bg, &params);
            worst = worst.max(cut_energy - e);
            if cut_energy > e + 1e-9 {
                return Fail(format!("image {done}: cut energy {cut_energy} above labeling energy {e}"));
            }
        }
        done += 1;
    }
    Pass(format!("{done} images, cut never beaten (largest excess {worst:.3e})"))
}

fn c3_monotone_energy() -> Outcome {
    let mut fixtures = fixture_set(4, 96, 3);
    fixtures.extend(fixture_set_with(4, 96, 30, REDDISH_TONES));
    let mut runs = 0;
    let mut longest = 0;
    for (i, f) in fixtures.iter().enumerate() {
        for seed in 0..100u64 {
            let cfg = PipelineConfig {
                seed,
                ..PipelineConfig::default()
            };
            let r = match run_pipeline(&f.image, &cfg) {
                Ok(r) => r,
                Err(e) => return Fail(format!("fixture {i} seed {seed}: {e}")),
            };
            let t = &r.energy_trace;
            let Some(&e0) = t.first() else {
                return Fail(format!("fixture {i} seed {seed}: empty trace"));
            };
            let tol = 1e-6 * e0.abs();
            if let Some(k) = (1..t.len()).find(|&k| t[k] > t[k - 1] + tol) {
                return Fail(format!("fixture {i} seed {seed}: energy rose at iteration {k}: {t:?}"));
            }
            longest = longest.max(t.len());
            runs += 1;
        }
    }
    Pass(format!(
        "{runs} runs ({} fixtures x 100 seeds), all traces non-increasing, longest {longest} iterations",
        fixtures.len()
    ))
}

fn c4_jaccard_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut both_empty = 0;
    for t in 0..1000 {
        let (w, h) = (rng.random_range(1..=16), rng.random_range(1..=16));
        let density_a = [0.0, 0.1, 0.5, 0.9][t % 4];
        let density_b = [0.0, 0.3, 0.5, 1.0][(t / 4) % 4];
        let a = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density_a)).unwrap();
        let b = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density_b)).unwrap();
        let set = |m: &BinaryMask| -> std::collections::BTreeSet<usize> {
            m.pixels().iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i).collect()
        };
        let (sa, sb) = (set(&a), set(&b));
        let inter = sa.intersection(&sb).count();
        let union = sa.union(&sb).count();
        let want = if union == 0 {
            both_empty += 1;
            1.0
        } else {
            inter as f64 / union as f64
        };
        let got = jaccard(&confusion(&a, &b).unwrap());
        if got != want {
            return Fail(format!("pair {t}: {got} vs {want}"));
        }
    }
    Pass(format!("1000 pairs exact, {both_empty} both-empty pairs gave 1.0"))
}

fn c5_rectangle() -> Outcome {
    for (w, h) in [(100usize, 100usize), (1000, 600), (10, 10), (767, 1022)] {
        // height - 0.03 * height = 97h/100, width - 0.1 * width = 9w/10
        let rh = h * 97 / 100;
        let rw = w * 9 / 10;
        let r = fallback_rect(w, h);
        let want = (((w - rw) / 2), ((h - rh) / 2), rw, rh);
        let got = (r.x0, r.y0, r.width, r.height);
        if got != want {
            return Fail(format!("{w}x{h}: got {got:?}, want {want:?}"));
        }
    }
    Pass("4 sizes match the integer formulas".into())
}

fn c6_border_removal() -> Outcome {
    let mut worst = 0.0f64;
    for t in 1..=20usize {
        let spec = FixtureSpec {
            width: 128,
            height: 112,
            center: (64.0, 56.0),
            semi_axes: (30.0, 20.0),
            angle: 0.3,
            lesion: [95, 60, 40],
            skin: [215, 175, 155],
            noise_sigma: 10.0,
            frame: t,
        };
        let img = render_fixture(&spec, t as u64).image;
        let once = match remove_border(&img, 30) {
            Ok(x) => x,
            Err(e) => return Fail(format!("frame {t}: {e}")),
        };
        let left = detect_dark_border(&once, 30).count_ones();
        if left != 0 {
            return Fail(format!("frame {t}: {left} border pixels remain after removal"));
        }
        let twice = remove_border(&once, 30).unwrap();
        let changed = once.pixels().iter().zip(twice.pixels()).filter(|(a, b)| a != b).count();
        let frac = changed as f64 / once.len() as f64;
        worst = worst.max(frac);
        if frac >= 0.001 {
            return Fail(format!("frame {t}: second pass changed {:.3}% of pixels", frac * 100.0));
        }
    }
    Pass(format!("frames 1..=20 px removed; second pass changed at most {:.3}%", worst * 100.0))
}

fn c7_color_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 1_000_000;
    let img = RgbImage::from_fn(1000, n / 1000, |_, _| [rng.random(), rng.random(), rng.random()]).unwrap();
    let back = hsv_to_rgb(&rgb_to_hsv(&img));
    let worst = img
        .pixels()
        .iter()
        .zip(back.pixels())
        .flat_map(|(a, b)| (0..3).map(move |c| a[c].abs_diff(b[c])))
        .max()
        .unwrap_or(0);
    check(worst <= 1, format!("{n} pixels, largest channel error {worst}"))
}

fn c8_synthetic_end_to_end() -> Outcome {
    let start = Instant::now();
    let fixtures = fixture_set(20, 256, 8);
    let cfg = PipelineConfig::default();
    let mut scores = Vec::new();
    for (i, f) in fixtures.iter().enumerate() {
        match run_pipeline(&f.image, &cfg) {
            Ok(r) => scores.push(jaccard(&confusion(&r.mask, &f.truth).unwrap())),
            Err(e) => return Fail(format!("fixture {i}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    // Informational only: lesions whose hue straddles 0 degrees split in the
    // linear 8-bit hue plane, and the green rule then misses part of them.
    let reddish: Vec<f64> = fixture_set_with(6, 256, 80, REDDISH_TONES)
        .iter()
        .filter_map(|f| run_pipeline(&f.image, &cfg).ok().map(|r| jaccard(&confusion(&r.mask, &f.truth).unwrap())))
        .collect();
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let below: Vec<_> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0.90)
        .map(|(i, s)| format!("#{i}={s:.3}"))
        .collect();
    check(
        below.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "20 fixtures at 256x256: min JC {min:.4}, mean {:.4}, {elapsed:.2?}{}",
            mean_jaccard(&scores).unwrap(),
            if below.is_empty() { String::new() } else { format!(", below 0.90: {}", below.join(" ")) }
        ) + &format!(
            " [info: reddish hue-near-0 lesions, JC {}]",
            reddish.iter().map(|s| format!("{s:.2}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn c9_batch_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    for (i, f) in fixture_set(8, 128, 9).iter().enumerate() {
        save_rgb(&f.image, dir.path().join(format!("SYN_{i:07}.png"))).unwrap();
        save_mask(&f.truth, dir.path().join(format!("SYN_{i:07}_segmentation.png"))).unwrap();
    }
    let ds = load_dataset(dir.path(), dir.path()).unwrap();
    let opts = ReportOptions { include_timing: false };
    let mut reports = Vec::new();
    for workers in [1, 4] {
        let out = run_batch(&ds, &PipelineConfig::default(), workers).unwrap();
        if !out.failures.is_empty() {
            return Fail(format!("workers {workers}: failures {:?}", out.failures));
        }
        let path = dir.path().join(format!("report_{workers}.csv"));
        write_report_with(&out, &path, &opts).unwrap();
        reports.push((std::fs::read(&path).unwrap(), std::fs::read(path.with_extension("summary.json")).unwrap()));
    }
    check(
        reports[0] == reports[1],
        format!("{} images, CSV and summary identical for 1 and 4 workers", ds.len()),
    )
}

fn c10_isic() -> Outcome {
    let Some(images) = std::env::var_os("ISIC_2017_IMAGES") else {
        return Skipped("set ISIC_2017_IMAGES (and ISIC_2017_GT) to run on the ISIC 2017 training data".into());
    };
    let gt = std::env::var_os("ISIC_2017_GT").unwrap_or_else(|| images.clone());
    let ds = match load_dataset(&images, &gt) {
        Ok(d) => d.limit(100),
        Err(e) => return Fail(format!("loading dataset: {e}")),
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out = run_batch(&ds, &PipelineConfig::default(), workers).unwrap();
    let scores: Vec<f64> = out.records.iter().map(|r| r.jaccard).collect();
    let Ok(mean) = mean_jaccard(&scores) else {
        return Fail("every image failed".into());
    };
    check(
        mean >= 0.60,
        format!("mean JC {mean:.4} over {} images ({} failed)", scores.len(), out.failures.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("max-flow exactness", c1_maxflow_exact),
        ("min-cut energy optimality", c2_cut_is_energy_optimal),
        ("energy monotonicity", c3_monotone_energy),
        ("jaccard oracle", c4_jaccard_oracle),
        ("fallback rectangle", c5_rectangle),
        ("border removal", c6_border_removal),
        ("color round trip", c7_color_round_trip),
        ("synthetic end to end", c8_synthetic_end_to_end),
        ("batch determinism", c9_batch_determinism),
        ("ISIC 2017 first 100", c10_isic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skipped(d) => ("SKIPPED", d),
        };
        println!("criterion {:>2} {tag:<7} {name}: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
