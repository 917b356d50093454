//! Acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 4, 5 and the exponent half of 9 compare fitted regret exponents at
//! desk-scale horizons against asymptotic rates. Their verdicts are reported
//! as measured and do not change the exit status. Every other check is an
//! exact or statistical contract and a FAIL there exits nonzero.

use std::fs;
use std::path::Path;
use std::time::Instant;

use lipbandit::analysis::{
    default_r_grid, estimate_dimensions, kt_lower, lower_integral, packing_sum_bound, truncated_integral, Quadrature,
};
use lipbandit::bandit::{run_paco, run_paco_one_sided, run_positive_gap_ucb};
use lipbandit::geometry::{greedy_net, linf_distance};
use lipbandit::instances::NoiseModel;
use lipbandit::{Aabb, Instance, Region, RunTrace};
use lipbandit_cli::{parse_config, run_experiment, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HORIZONS: &str = "[1000, 10000, 100000, 1000000]";
const SEEDS: &str = "[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]";

/// int / first packing sum over k_T = 2..=8 on the 1-D cone and plateau, as
/// first computed. Later runs must stay within 5% of this band.
const SERIES_BAND: (f64, f64) = (0.9998, 1.0000);

struct Verdict {
    /// Exact or statistical part; a failure here aborts the run.
    contract: bool,
    /// Fitted-rate part, reported only.
    measured: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { contract: pass, measured: true, detail: detail.into() }
}

fn measured(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { contract: true, measured: pass, detail: detail.into() }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "oracle contract", oracle_contract),
        (2, "noiseless structural lemmas", noiseless_lemmas),
        (3, "noisy good-event frequency", good_event_frequency),
        (4, "rate separation", rate_separation),
        (5, "experts rate", experts_rate),
        (6, "integral machinery", integral_machinery),
        (7, "series-integral consistency", series_integral),
        (8, "dimension estimates", dimension_estimates),
        (9, "one-sided variant", one_sided),
        (10, "determinism", determinism),
    ];
    let mut broken = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let tag = if v.contract && v.measured { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {} ({:.1}s)", v.detail, start.elapsed().as_secs_f64());
        if !v.contract {
            broken.push(id);
        }
    }
    if !broken.is_empty() {
        eprintln!("contract criteria failed: {broken:?}");
        std::process::exit(1);
    }
}

fn random_box(d: usize, rng: &mut ChaCha8Rng) -> Aabb {
    let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(0..63) as f64 / 64.0).collect();
    let hi = lo.iter().map(|&l| (l + rng.gen_range(1..40) as f64 / 64.0).min(1.0)).collect();
    Aabb::new(lo, hi).unwrap()
}

fn random_region(d: usize, rng: &mut ChaCha8Rng) -> Region {
    loop {
        let parts: Vec<Aabb> = (0..rng.gen_range(1..4)).map(|_| random_box(d, rng)).collect();
        let holes: Vec<Aabb> = (0..rng.gen_range(0..3)).map(|_| random_box(d, rng)).collect();
        let region = Region::union(Aabb::unit(d).unwrap(), parts).unwrap().minus(holes);
        if !region.is_empty() {
            return region;
        }
    }
}

fn sample_region(region: &Region, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let bb = region.bounding_box().unwrap();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 1000 * n {
        tries += 1;
        let x: Vec<f64> = (0..region.dim()).map(|j| rng.gen_range(bb.lo()[j]..=bb.hi()[j])).collect();
        if region.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn oracle_contract() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut bad_sep, mut uncovered, mut samples) = (0, 0, 0);
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let r_min = [0.01, 0.05, 0.15][d - 1];
        let r = rng.gen_range(r_min..0.5);
        let region = random_region(d, &mut rng);
        let net = greedy_net(&region, r).unwrap();
        let pts: Vec<&[f64]> = net.points.iter().map(|p| p.coords()).collect();
        for i in 0..pts.len() {
            if pts[i + 1..].iter().any(|q| linf_distance(pts[i], q) < r / 2.0) {
                bad_sep += 1;
            }
        }
        let xs = sample_region(&region, 10_000, &mut rng);
        samples += xs.len();
        uncovered += xs.iter().filter(|x| !net.covers(x, r)).count();
    }
    verdict(
        bad_sep == 0 && uncovered == 0,
        format!("100 pairs, {bad_sep} close net pairs, {uncovered} of {samples} samples uncovered"),
    )
}

fn maximizer_points(inst: &Instance) -> Vec<Vec<f64>> {
    let bb = inst.maximizer().bounding_box().unwrap();
    (0..=20).map(|i| vec![bb.lo()[0] + (bb.hi()[0] - bb.lo()[0]) * i as f64 / 20.0]).collect()
}

#[derive(Default)]
struct Audit {
    phases: usize,
    eliminated: usize,
    lost: usize,
    exceeded: usize,
}

fn audit(inst: &Instance, trace: &RunTrace, rng: &mut ChaCha8Rng) -> Audit {
    let mut a = Audit::default();
    let top = maximizer_points(inst);
    for phase in trace.completed_phases() {
        a.phases += 1;
        for i in 0..phase.net_size {
            if inst.gap_at(phase.net_point(trace, i).coords()) <= phase.radius && phase.eliminated_at[i].is_some() {
                a.eliminated += 1;
            }
        }
        let next = phase.next_region.as_ref().unwrap();
        if top.iter().any(|x| !phase.region.contains(x) || !next.contains(x)) {
            a.lost += 1;
        }
        if sample_region(next, 200, rng).iter().any(|x| inst.gap_at(x) > 4.0 * phase.radius + 1e-12) {
            a.exceeded += 1;
        }
    }
    a
}

fn cone() -> Instance {
    Instance::cone(vec![0.5], 1.0).unwrap()
}

fn plateau() -> Instance {
    Instance::plateau(vec![0.25], vec![0.75], 1.0).unwrap()
}

fn noiseless_lemmas() -> Verdict {
    let t = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, inst) in [("cone", cone()), ("plateau", plateau())] {
        let trace = run_paco(&inst, NoiseModel::Zero, t, 0.05, 1.0, &mut rng).unwrap();
        let a = audit(&inst, &trace, &mut rng);
        ok &= a.phases > 0 && a.eliminated + a.lost + a.exceeded == 0;
        parts.push(format!("{name} {} phases, violations {}/{}/{}", a.phases, a.eliminated, a.lost, a.exceeded));
    }
    verdict(ok, parts.join("; "))
}

fn good_event_frequency() -> Verdict {
    let inst = plateau();
    let runs = 200;
    let bad = (0..runs)
        .filter(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + s);
            let trace = run_paco(&inst, NoiseModel::GaussianUnit, 100_000, 0.05, 1.0, &mut rng).unwrap();
            let a = audit(&inst, &trace, &mut rng);
            a.lost > 0 || a.exceeded > 0
        })
        .count();
    verdict(bad * 10 <= runs as usize, format!("{bad} of {runs} runs violated retention or the gap bound"))
}

fn instance_toml(name: &str) -> &'static str {
    match name {
        "plateau" => "family = \"plateau\"\nlo = [0.25]\nhi = [0.75]",
        "cone" => "family = \"cone\"\ncenter = [0.5]",
        "step" => "family = \"one_sided_step\"\npeak = 0.0\nwidth = 0.2\nrise = 1.0\ndrop = 0.2\ntail_slope = 0.5",
        _ => unreachable!(),
    }
}

/// Fitted exponent of a 10-seed sweep over four decades.
fn fitted_exponent(instance: &str, algorithm: &str, extra: &str) -> Result<f64, String> {
    let text = format!(
        "[instance]\n{}\n\n[run]\nalgorithm = \"{algorithm}\"\nhorizons = {HORIZONS}\nseeds = {SEEDS}\n{extra}\n\n[output]\ntraces = false\n\n[analysis]\nenabled = false\n",
        instance_toml(instance)
    );
    let config = parse_config(&text).map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let outcome = run_experiment(&config, &RunOptions { out: Some(tmp.path().join("out")), ..Default::default() })
        .map_err(|e| e.to_string())?;
    let curve = outcome.summary.curve;
    curve.exponent.map(|f| f.slope).ok_or_else(|| curve.fit_error.unwrap_or_default())
}

fn within(slope: &Result<f64, String>, target: f64, tol: f64) -> bool {
    matches!(slope, Ok(s) if (s - target).abs() <= tol)
}

fn show(slope: &Result<f64, String>) -> String {
    match slope {
        Ok(s) => format!("{s:.3}"),
        Err(e) => format!("error ({e})"),
    }
}

fn rate_separation() -> Verdict {
    let paco_plateau = fitted_exponent("plateau", "paco", "");
    let grid_plateau = fitted_exponent("plateau", "grid_ucb", "");
    let paco_cone = fitted_exponent("cone", "paco", "");
    let ok = within(&paco_plateau, 1.0 / 3.0, 0.08) && within(&grid_plateau, 2.0 / 3.0, 0.08) && within(&paco_cone, 0.5, 0.08);
    measured(
        ok,
        format!(
            "plateau paco {} (want 0.333±0.08), grid_ucb {} (want 0.667±0.08); cone paco {} (want 0.5±0.08)",
            show(&paco_plateau),
            show(&grid_plateau),
            show(&paco_cone)
        ),
    )
}

fn experts_rate() -> Verdict {
    let plateau = fitted_exponent("plateau", "sous", "");
    let cone = fitted_exponent("cone", "sous", "");
    let ok = matches!(plateau, Ok(s) if s <= 0.1) && within(&cone, 0.5, 0.08);
    measured(ok, format!("plateau {} (want <= 0.1), cone {} (want 0.5±0.08)", show(&plateau), show(&cone)))
}

fn integral_machinery() -> Verdict {
    let q = Quadrature::default();
    let upper: f64 = truncated_integral(&cone(), 3, &q).unwrap();
    let lower: f64 = lower_integral(&cone(), 4096, &q).unwrap();
    let k = kt_lower(4096, 1);
    let ok = (upper - 28.0).abs() <= 0.28 && (lower - 28.0).abs() <= 0.28 && k == 4;
    verdict(ok, format!("truncated {upper:.4}, lower {lower:.4}, kt_lower {k}"))
}

fn series_integral() -> Verdict {
    let q = Quadrature::default();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for inst in [cone(), plateau()] {
        for k in 2..=8 {
            let first = packing_sum_bound(&inst, k, 1.0).unwrap().first;
            let int: f64 = truncated_integral(&inst, k, &q).unwrap();
            let ratio = int / first;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    let ok = lo >= 0.95 * SERIES_BAND.0 && hi <= 1.05 * SERIES_BAND.1;
    verdict(ok, format!("ratio band [{lo:.4}, {hi:.4}] against golden [{:.4}, {:.4}]", SERIES_BAND.0, SERIES_BAND.1))
}

fn dimension_estimates() -> Verdict {
    let built_ins = [
        ("cone", cone()),
        ("plateau", plateau()),
        ("multipeak", Instance::multipeak(vec![(vec![0.2], 1.0), (vec![0.7], 0.9)], 1.0).unwrap()),
        ("cone2", Instance::cone(vec![0.5, 0.5], 1.0).unwrap()),
        ("plateau2", Instance::plateau(vec![0.25, 0.25], vec![0.75, 0.75], 1.0).unwrap()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, inst) in built_ins {
        let est = estimate_dimensions(&inst, &default_r_grid(inst.dim())).unwrap();
        let (dz, ds) = (inst.dz().unwrap(), inst.dstar().unwrap());
        let (ez, es) = (est.dz.slope, est.dstar.slope);
        ok &= (ez - dz).abs() <= 0.15 && (es - ds).abs() <= 0.15 && es <= ez + 1.2;
        parts.push(format!("{name} {ez:.2}/{es:.2}"));
    }
    verdict(ok, format!("d_z/d* estimates: {}", parts.join(", ")))
}

fn one_sided() -> Verdict {
    let step = Instance::one_sided_step(0.3, 0.1, 1.0, 0.3, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trace = run_paco_one_sided(&step, NoiseModel::Zero, 100_000, 0.05, 1.0, &mut rng).unwrap();
    let top = maximizer_points(&step);
    let phases = trace.completed_phases().count();
    let lost = trace
        .completed_phases()
        .filter(|p| top.iter().any(|x| !p.region.contains(x) || !p.next_region.as_ref().unwrap().contains(x)))
        .count();

    let gap_step = Instance::one_sided_step(0.0, 0.2, 1.0, 0.2, 0.5).unwrap();
    let net = run_positive_gap_ucb(&gap_step, NoiseModel::GaussianUnit, 10, 0.2, 1.0, &mut rng).unwrap();
    let has_optimal = net.arms.iter().any(|a| gap_step.gap_at(a.coords()) == 0.0);
    let slope = fitted_exponent("step", "positive_gap_ucb", "gap = 0.2");
    let rate_ok = matches!(slope, Ok(s) if s <= 0.15);

    // Retention and the optimal arm are contracts; the fitted rate is measured.
    let contract = phases > 0 && lost == 0 && has_optimal;
    let detail = format!(
        "{phases} phases, maximizer lost in {lost}; optimal arm in net: {has_optimal}; positive-gap exponent {} (want <= 0.15)",
        show(&slope)
    );
    Verdict { contract, measured: rate_ok, detail }
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut ok = true;
    for (instance, algorithm) in [("plateau", "paco"), ("cone", "sous"), ("step", "positive_gap_ucb")] {
        let text = format!(
            "[instance]\n{}\n\n[run]\nalgorithm = \"{algorithm}\"\nhorizons = [1000, 5000]\nseeds = [1, 2]\ngap = 0.2\n",
            instance_toml(instance)
        );
        let config = parse_config(&text).unwrap();
        let dirs = ["a", "b"].map(|s| tmp.path().join(format!("{algorithm}_{s}")));
        for dir in &dirs {
            run_experiment(&config, &RunOptions { out: Some(dir.clone()), ..Default::default() }).unwrap();
        }
        let (a, b) = (read_tree(&dirs[0]), read_tree(&dirs[1]));
        files += a.len();
        ok &= a == b;
    }
    verdict(ok, format!("{files} files compared byte for byte across two runs"))
}
