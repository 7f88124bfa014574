//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use common::{load, random_family, Family};
use plumbing_core::cli::{run, ExitStatus};
use plumbing_core::fiber::{build_fiber, build_open_book, chi_fiber, chi_plumbing, compile, neck_curves};
use plumbing_core::homology::{homology_basis, CurveClass, CurveKind};
use plumbing_core::invariants::{chi_lefschetz, find_relation, substitute, Page};
use plumbing_core::lattice::IntersectionMatrix;
use plumbing_core::rational::{int, ratio, ExactRational};
use plumbing_core::symplectic::fibration::{check_fibration, check_vertical_margin_exact};
use plumbing_core::symplectic::gluing::{check_intertwine, check_symplectomorphism, sample_t_exact};
use plumbing_core::symplectic::liouville::check_liouville;
use plumbing_core::symplectic::sampling::{sample_fibration, sample_liouville, sample_t};
use plumbing_core::symplectic::{charts_of, solve_area_system, tolerances, Chart, DiskBundleModel};
use plumbing_core::validate::{definiteness_conditions_with, random_positive_vector, validate, ValidatedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn family() -> Vec<plumbing_core::PlumbingGraph> {
    random_family(0xacce_0001, 500, Family::default())
}

fn c1_definiteness_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc1);
    let graphs = family();
    let (mut definite, mut solves) = (0, 0);
    for g in &graphs {
        let status = definiteness_conditions_with(g, &mut rng, 0).map_err(|e| e.to_string())?;
        ensure!(
            status.for_some_b == status.strict_vertex && status.strict_vertex == status.negative_definite,
            "conditions disagree on {:?}: {status:?}",
            g.to_json_value()
        );
        if status.negative_definite {
            definite += 1;
            let q = IntersectionMatrix::from_graph(g);
            for _ in 0..20 {
                let b = random_positive_vector(&mut rng, q.dim());
                let a = q.solve_positive(&b).map_err(|e| format!("solve failed: {e}"))?;
                ensure!(a.iter().all(|x| *x > int(0)), "nonpositive solution");
                ensure!(q.apply(&a).iter().zip(&b).all(|(qa, b)| -qa == *b), "solution does not solve");
                solves += 1;
            }
        }
    }
    Ok(format!("{} graphs, {definite} negative definite, {solves} positive solves", graphs.len()))
}

fn c2_euler_identity() -> Outcome {
    let graphs = family();
    for g in &graphs {
        let v = ValidatedGraph::forced(g.clone()).map_err(|e| e.to_string())?;
        let k = neck_curves(&v).len() as i64;
        let direct: i64 = v.vertices().iter().map(|x| 2 - 2 * x.genus as i64).sum::<i64>() - v.edge_count() as i64;
        ensure!(chi_fiber(&build_fiber(&v)) + k == direct, "identity fails on {:?}", g.to_json_value());
        ensure!(chi_plumbing(&v) == direct, "chi_plumbing mismatch");
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn c3_torus_sphere() -> Outcome {
    let g = load("torus_sphere.json");
    ensure!(validate(&g).passes(), "validation fails");
    let v = ValidatedGraph::new(g).map_err(|e| e.to_string())?;
    let fiber = build_fiber(&v);
    ensure!((fiber.genus, fiber.boundary_count) == (1, 1), "page ({}, {})", fiber.genus, fiber.boundary_count);
    let book = build_open_book(&v);
    ensure!(book.monodromy.len() == 2, "k = {}", book.monodromy.len());
    let model = homology_basis(&fiber).map_err(|e| e.to_string())?;
    let d = CurveClass::zero(model.rank());
    ensure!(
        model.necks().iter().all(|n| n.kind == CurveKind::BoundaryParallel && n.class == d),
        "monodromy is not two boundary-parallel twists: {:?}",
        model.necks()
    );
    let tau = model.multitwist();
    let cmp = model.homologically_equal(&tau, &[(d.clone(), 1), (d, 1)]).map_err(|e| e.to_string())?;
    ensure!(cmp.equal, "tau differs from t_d^2 in homology");
    let compiled = compile(&v);
    let chi = chi_lefschetz(Page { genus: 1, boundary: 1 }, compiled.monodromy.len());
    ensure!(chi == 1 && chi_plumbing(&v) == 1, "chi(Z) = {chi}");
    Ok("page (1, 1), k = 2, tau = t_d^2, chi(Z) = 1".into())
}

fn c4_counterexample() -> Outcome {
    let g = load("two_minus_one_spheres.json");
    let r = validate(&g);
    ensure!(!r.negative_definite && !r.strict_vertex_exists && !r.passes(), "{}", r.to_text());
    let path = common::data("two_minus_one_spheres.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = run(["plumbing", "--format", "text", "validate", path.to_str().unwrap()], &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    ensure!(status == ExitStatus::Rejected && status.code() == 1, "exit {}", status.code());
    ensure!(text.contains("negative_definite: false"), "{text}");
    Ok("negative_definite = false, strict = false, exit 1".into())
}

fn c5_torus_relation_homology() -> Outcome {
    let model = plumbing_core::HomologyModel::standard(1, 1).map_err(|e| e.to_string())?;
    let a = CurveClass(vec![1, 0]);
    let b = CurveClass(vec![0, 1]);
    let d = CurveClass(vec![0, 0]);
    let ab = |k: usize| -> Vec<(CurveClass, i64)> { (0..k).flat_map(|_| [(a.clone(), 1), (b.clone(), 1)]).collect() };
    let act = |w: &[(CurveClass, i64)]| model.word_action(w).map_err(|e| e.to_string());
    let d2 = act(&[(d.clone(), 1), (d.clone(), 1)])?;
    let ab12 = act(&ab(12))?;
    ensure!(d2.is_identity() && ab12.is_identity(), "t_d^2 -> {:?}, (t_a t_b)^12 -> {:?}", d2, ab12);
    let d1 = act(&[(d, 1)])?;
    let ab6 = act(&ab(6))?;
    ensure!(d1 == ab6, "t_d -> {:?}, (t_a t_b)^6 -> {:?}", d1, ab6);
    // (t_a t_b) has order 6 on H1 and no smaller power is trivial.
    let ab1 = act(&ab(1))?;
    ensure!((1..6).all(|k| !ab1.pow(k).unwrap().is_identity()), "(t_a t_b) has order below 6");
    Ok("t_d^2 = (t_a t_b)^12 = I, t_d = (t_a t_b)^6".into())
}

fn c6_substitution() -> Outcome {
    let v = ValidatedGraph::new(load("torus_sphere.json")).map_err(|e| e.to_string())?;
    let rel = find_relation("torus relation squared").ok_or("relation missing")?;
    let r = substitute(&v, &rel).map_err(|e| e.to_string())?;
    ensure!(r.chi_z == 1 && r.chi_z_prime == 23 && r.delta_chi == 22, "{}", r.to_text());
    // E(2): torus fibration over the sphere with 24 nodal fibers.
    let (chi_sphere, chi_torus) = (2, 0);
    let chi_e2 = chi_sphere * chi_torus + 24;
    ensure!(chi_e2 - r.chi_plumbing == r.chi_z_prime, "E(2) accounting: {chi_e2} - {}", r.chi_plumbing);
    ensure!(r.homology.equal, "homology actions differ");
    Ok("chi(Z) = 1, chi(Z') = 23, delta = 22, chi(E(2)) - chi(Z) = 24 - 1".into())
}

fn random_model<R: Rng>(rng: &mut R) -> DiskBundleModel {
    let m: u32 = rng.gen_range(1..=4);
    let ai: Vec<ExactRational> = (0..m).map(|_| ratio(rng.gen_range(0..=6), rng.gen_range(1..=3))).collect();
    let ni: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
    let sum: ExactRational = ai.iter().zip(&ni).map(|(a, &n)| a / int(n as i64)).sum();
    let a = &sum + ratio(rng.gen_range(1..=40), rng.gen_range(1..=8));
    let room = (&a - &sum) / int(2 * m as i64);
    let delta = room * ratio(rng.gen_range(1..=9), 10);
    DiskBundleModel::new(rng.gen_range(0..=2), m, a, ai, ni, delta).expect("admissible constants")
}

fn c7_gluing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    let n = 1000;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let model = random_model(&mut rng);
        let exact = sample_t_exact(&model, n, k);
        let s = check_symplectomorphism(&model, &exact);
        ensure!(s.samples >= n && s.max_residual == 0.0, "model {k}: {}", s.to_text());
        let t = sample_t(&model, n, k, tolerances::MARGIN_STEPS * tolerances::STEP);
        let i = check_intertwine(&model, &t);
        ensure!(i.samples >= n && i.max_residual <= 1e-9, "model {k}: {}", i.to_text());
        worst = worst.max(i.max_residual);
    }
    Ok(format!("10 models x {n} samples, symplectic residual 0, intertwine <= {worst:.1e}"))
}

fn c8_liouville() -> Outcome {
    let model = DiskBundleModel::reference();
    let h = 1e-4;
    let mut parts = Vec::new();
    for chart in charts_of(&model) {
        let pts = sample_liouville(&model, chart, h, tolerances::LIOUVILLE, 1000, tolerances::SEED);
        let r = check_liouville(&model, &pts, h);
        ensure!(r.samples >= 1000, "{}", r.to_text());
        ensure!(r.max_residual <= 1e-6, "{}", r.to_text());
        let order = r.order.unwrap_or(0.0);
        ensure!(order >= 1.9, "{}", r.to_text());
        parts.push(format!("{} {:.1e}/{order:.2}", chart.name(), r.max_residual));
    }
    Ok(parts.join(", "))
}

fn c9_areas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc9);
    let mut seen = 0;
    let mut seed = 0xacc9_0000u64;
    while seen < 100 {
        seed += 1;
        let g = random_family(seed, 1, Family::default()).pop().unwrap();
        let Ok(v) = ValidatedGraph::new(g) else { continue };
        let targets: Vec<ExactRational> =
            (0..v.vertex_count()).map(|_| ratio(rng.gen_range(1..=60), rng.gen_range(1..=12))).collect();
        let a = solve_area_system(&v, &targets).map_err(|e| e.to_string())?;
        ensure!(a.areas.iter().all(|x| *x > int(0)), "nonpositive area");
        ensure!(a.residual_targets(&v) == targets, "substitution check fails");
        for (vx, b) in v.vertices().iter().zip(&targets) {
            let two_m = int(2 * vx.weight as i64);
            ensure!(&two_m * &a.delta < *b, "2 m delta >= B at {}", vx.id);
            ensure!(&two_m * &a.delta_bound <= *b, "bound exceeds B/(2m) at {}", vx.id);
        }
        let models = a.vertex_models(&v).map_err(|e| e.to_string())?;
        ensure!(models.len() == v.vertex_count(), "vertex models");
        seen += 1;
    }
    Ok("100 graphs, exact positive areas, 2 m delta < B".into())
}

fn c10_transversality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac10);
    let mut models = vec![DiskBundleModel::reference()];
    models.extend((0..5).map(|_| random_model(&mut rng)));
    let mut evaluated = 0;
    for model in &models {
        let pts = sample_fibration(model, Chart::One, 1000, tolerances::SEED);
        let exact = check_vertical_margin_exact(model, &pts);
        ensure!(exact.certified() && exact.max_residual == 0.0, "{}", exact.to_text());
        for chart in charts_of(model) {
            let pts = sample_fibration(model, chart, 1000, tolerances::SEED);
            let f = check_fibration(model, &pts);
            ensure!(f.fiber_positivity.certified(), "{}", f.fiber_positivity.to_text());
            ensure!(f.transversality.certified(), "{}", f.transversality.to_text());
            evaluated += f.fiber_positivity.samples;
        }
    }
    Ok(format!("{} models, exact r2 margin, {evaluated} positive fiber samples", models.len()))
}

#[allow(clippy::type_complexity)]
const CRITERIA: [(&str, fn() -> Outcome, Option<u64>); 10] = [
    ("C1 definiteness conditions agree", c1_definiteness_equivalence, Some(30)),
    ("C2 Euler-characteristic identity", c2_euler_identity, Some(5)),
    ("C3 torus-sphere example", c3_torus_sphere, None),
    ("C4 two (-1)-spheres counterexample", c4_counterexample, None),
    ("C5 torus relation on homology", c5_torus_relation_homology, None),
    ("C6 substitution report", c6_substitution, None),
    ("C7 gluing map", c7_gluing, Some(60)),
    ("C8 Liouville identity", c8_liouville, None),
    ("C9 area system", c9_areas, None),
    ("C10 transversality and fiber positivity", c10_transversality, None),
];

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, check, limit) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(s) => Err(format!("took {elapsed:.2?}, limit {s} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
