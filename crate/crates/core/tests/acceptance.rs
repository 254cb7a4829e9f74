//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{BigInt, One, Zero};
use polydist::consensus::{best_of_profile, greedy_refine_median, profile_distance, Profile};
use polydist::expected::{exact_expected_distance, exact_resolution_probability, formula_from};
use polydist::hausdorff::{adversarial_refinement, hausdorff_bounds};
use polydist::oracle::{classify_quartets, classify_triplets, enumerate_phylogenies, hausdorff_exact, median_exhaustive};
use polydist::quartet::{parametric_quartet_distance, QuartetMethod, SharedMethod};
use polydist::random::random_tree;
use polydist::rational::{format_rational, rational};
use polydist::triplet::{parametric_triplet_distance, triplet_classification};
use polydist::{align_taxa, parse_newick, DistancePair, Phylogeny, Rational, TreeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn int(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn eval(pair: DistancePair, p: &Rational) -> Rational {
    pair.evaluate(p).expect("p in [0, 1]")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn triplet_oracle() -> Check {
    let mut pairs = 0;
    for n in [3, 4] {
        let trees = enumerate_phylogenies(n, TreeKind::Rooted).unwrap();
        for a in &trees {
            for b in &trees {
                let fast = triplet_classification(a, b).unwrap();
                let brute = classify_triplets(a, b).unwrap();
                ensure(fast == brute, || format!("classification mismatch on RP({n}) pair"))?;
                pairs += 1;
            }
        }
    }
    ensure(pairs == 16 + 676, || format!("expected 692 exhaustive pairs, saw {pairs}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ps = [Rational::zero(), rational(1, 3), rational(1, 2), Rational::one()];
    for _ in 0..200 {
        let n = rng.random_range(10..=60);
        let c1 = rng.random_range(0.0..0.9);
        let c2 = rng.random_range(0.0..0.9);
        let a = random_tree(&mut rng, n, TreeKind::Rooted, c1);
        let b = random_tree(&mut rng, n, TreeKind::Rooted, c2);
        let fast = parametric_triplet_distance(&a, &b).unwrap();
        let brute = classify_triplets(&a, &b).unwrap().distance_pair();
        for p in &ps {
            ensure(eval(fast, p) == eval(brute, p), || format!("distance mismatch at n = {n}, p = {}", format_rational(p)))?;
        }
    }
    Ok("692 exhaustive + 200 random pairs (n in 10..=60) exact".into())
}

fn quartet_approximation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ps = [rational(1, 2), rational(2, 3), rational(3, 4), Rational::one()];
    for _ in 0..200 {
        let n = rng.random_range(8..=30);
        let c1 = rng.random_range(0.0..0.9);
        let c2 = rng.random_range(0.0..0.9);
        let a = random_tree(&mut rng, n, TreeKind::Unrooted, c1);
        let b = random_tree(&mut rng, n, TreeKind::Unrooted, c2);
        let brute = classify_quartets(&a, &b).unwrap().distance_pair();
        for p in &ps {
            let d = eval(brute, p);
            let x = parametric_quartet_distance(&a, &b, p, QuartetMethod::Approx(SharedMethod::Fast)).unwrap().value;
            if *p == rational(1, 2) {
                ensure(x == d, || format!("x != d at p = 1/2, n = {n}"))?;
            } else {
                ensure(d <= x && x <= &d * int(2), || format!("x outside [d, 2d] at n = {n}, p = {}", format_rational(p)))?;
            }
        }
    }
    Ok("200 random pairs (n in 8..=30), d <= x <= 2d, exact at p = 1/2".into())
}

fn metric_properties() -> Check {
    let trees = enumerate_phylogenies(4, TreeKind::Rooted).unwrap();
    let m = trees.len();
    let table: Vec<Vec<DistancePair>> =
        trees.iter().map(|a| trees.iter().map(|b| parametric_triplet_distance(a, b).unwrap()).collect()).collect();
    for p in [rational(1, 2), rational(2, 3), Rational::one()] {
        let d: Vec<Vec<Rational>> = table.iter().map(|row| row.iter().map(|&x| eval(x, &p)).collect()).collect();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    ensure(d[i][k] <= &d[i][j] + &d[j][k], || {
                        format!("triangle inequality fails at p = {} on RP(4) triple", format_rational(&p))
                    })?;
                }
            }
        }
    }

    let parsed: Vec<Phylogeny> =
        ["((a,b),c);", "(a,b,c);", "((a,c),b);"].iter().map(|s| parse_newick(s, TreeKind::Rooted).unwrap()).collect();
    let t = align_taxa(parsed).unwrap();
    let third = rational(1, 3);
    let d = |x: &Phylogeny, y: &Phylogeny| eval(parametric_triplet_distance(x, y).unwrap(), &third);
    let (d13, d12, d23) = (d(&t[0], &t[2]), d(&t[0], &t[1]), d(&t[1], &t[2]));
    ensure(d13 == Rational::one() && &d12 + &d23 == rational(2, 3), || "p = 1/3 counterexample does not reproduce".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = [rational(1, 4), rational(1, 3), rational(1, 2), rational(2, 3), rational(3, 4), Rational::one()];
    for i in 0..100 {
        let kind = if i % 2 == 0 { TreeKind::Rooted } else { TreeKind::Unrooted };
        let n = rng.random_range(5..=12);
        let a = random_tree(&mut rng, n, kind, 0.5);
        let b = random_tree(&mut rng, n, kind, 0.5);
        let pair = match kind {
            TreeKind::Rooted => parametric_triplet_distance(&a, &b).unwrap(),
            TreeKind::Unrooted => classify_quartets(&a, &b).unwrap().distance_pair(),
        };
        for p in &grid {
            for q in grid.iter().filter(|q| *q > p) {
                let (dp, dq) = (eval(pair, p), eval(pair, q));
                ensure(dp <= dq && dq <= &dp * (q / p), || {
                    format!("equivalence fails for p = {}, q = {}", format_rational(p), format_rational(q))
                })?;
            }
        }
    }
    Ok("triangle inequality on RP(4)^3 at p in {1/2, 2/3, 1}; p = 1/3 gives 1 > 2/3; 100 equivalence pairs".into())
}

fn hausdorff_sandwich() -> Check {
    let trees = enumerate_phylogenies(4, TreeKind::Rooted).unwrap();
    let mut pairs = 0;
    for a in &trees {
        for b in &trees {
            let bounds = hausdorff_bounds(a, b).unwrap();
            let exact = hausdorff_exact(a, b, 15 * 15).unwrap();
            ensure(bounds.lower <= int(exact) && exact <= bounds.upper, || {
                format!("exact {exact} outside [{}, {}]", format_rational(&bounds.lower), bounds.upper)
            })?;
            let adv = adversarial_refinement(a, b).unwrap();
            let target = int(adv.initial.d) + rational(2, 3) * int(adv.initial.r2);
            ensure(int(adv.disagreements) >= target, || "adversarial refinement falls short".into())?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs from RP(4)^2 inside [lower, upper]; adversarial bound met"))
}

fn expected_distance() -> Check {
    let rooted4 = exact_resolution_probability(4, TreeKind::Rooted).unwrap();
    for p in [Rational::zero(), rational(1, 2), Rational::one()] {
        let avg = exact_expected_distance(4, &p, TreeKind::Rooted).unwrap();
        let formula = formula_from(4, &rooted4.r, &p);
        ensure(avg == formula, || {
            format!("p = {}: average {} != formula {}", format_rational(&p), format_rational(&avg), format_rational(&formula))
        })?;
    }
    for n in 1..=6 {
        let rp = enumerate_phylogenies(n, TreeKind::Rooted).unwrap().len();
        let p = enumerate_phylogenies(n + 1, TreeKind::Unrooted).unwrap().len();
        ensure(rp == p, || format!("|RP({n})| = {rp} but |P({})| = {p}", n + 1))?;
        if n >= 3 {
            let r_rooted = exact_resolution_probability(n, TreeKind::Rooted).unwrap().r;
            let r_unrooted = exact_resolution_probability(n + 1, TreeKind::Unrooted).unwrap().r;
            ensure(r_rooted == r_unrooted, || format!("r'({n}) != r({})", n + 1))?;
        }
    }
    Ok(format!("RP(4)^2 average matches formula (r' = {}); counts and r' = r(n+1) agree for n <= 6", format_rational(&rooted4.r)))
}

fn median_threshold() -> Check {
    let parsed: Vec<Phylogeny> =
        ["((a,b),c);", "((a,c),b);", "((b,c),a);"].iter().map(|s| parse_newick(s, TreeKind::Rooted).unwrap()).collect();
    let prof = Profile::new(align_taxa(parsed).unwrap()).unwrap();
    for p in [Rational::zero(), rational(1, 2), rational(3, 5), rational(13, 20)] {
        let med = median_exhaustive(&prof, &p).unwrap();
        ensure(med.trees.len() == 1 && !med.trees[0].is_fully_resolved(), || {
            format!("p = {}: median is not the fan alone", format_rational(&p))
        })?;
    }
    let tied = median_exhaustive(&prof, &rational(2, 3)).unwrap();
    ensure(tied.trees.len() == 4, || format!("p = 2/3: {} co-optimal trees, expected 4", tied.trees.len()))?;
    for p in [rational(7, 10), rational(3, 4), Rational::one()] {
        let med = median_exhaustive(&prof, &p).unwrap();
        ensure(med.trees.len() == 3 && med.trees.iter().all(Phylogeny::is_fully_resolved), || {
            format!("p = {}: median is not the three binary trees", format_rational(&p))
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ps = [rational(2, 3), rational(3, 4), Rational::one()];
    let mut profiles = 0;
    let mut partial_starts = 0;
    while profiles < 60 {
        let n = rng.random_range(3..=5);
        let k = rng.random_range(1..=5);
        let members: Vec<Phylogeny> = (0..k).map(|_| random_tree(&mut rng, n, TreeKind::Rooted, 0.0)).collect();
        let prof = Profile::new(members).unwrap();
        let p = &ps[profiles % ps.len()];
        let med = median_exhaustive(&prof, p).unwrap();
        for start in &med.trees {
            partial_starts += usize::from(!start.is_fully_resolved());
            let out = greedy_refine_median(start, &prof, p).unwrap();
            let mut before = out.initial_distance.clone();
            for step in &out.steps {
                ensure(step.distance_after <= before, || "greedy step increased the profile distance".into())?;
                before = step.distance_after.clone();
            }
            ensure(out.tree.is_fully_resolved(), || "greedy result is not fully resolved".into())?;
            ensure(profile_distance(&out.tree, &prof, p).unwrap() == med.total, || "greedy result is not co-optimal".into())?;
        }
        let best = best_of_profile(&prof, p).unwrap();
        ensure(best.total <= &med.total * int(2), || "best-of-profile exceeds twice the optimum".into())?;
        profiles += 1;
    }
    // Best-of-profile on partially resolved profiles at p in [1/2, 1].
    for i in 0..40 {
        let n = rng.random_range(3..=5);
        let k = rng.random_range(1..=5);
        let members: Vec<Phylogeny> = (0..k).map(|_| random_tree(&mut rng, n, TreeKind::Rooted, 0.5)).collect();
        let prof = Profile::new(members).unwrap();
        let p = [rational(1, 2), rational(2, 3), Rational::one()][i % 3].clone();
        let med = median_exhaustive(&prof, &p).unwrap();
        let best = best_of_profile(&prof, &p).unwrap();
        ensure(best.total <= &med.total * int(2), || "best-of-profile exceeds twice the optimum".into())?;
    }
    Ok(format!(
        "fan below 2/3, 4-way tie at 2/3, binary above; {profiles} resolved profiles ({partial_starts} partial medians refined) and 40 partial profiles"
    ))
}

fn median_duration(n: usize, runs: usize, rng: &mut ChaCha8Rng) -> Duration {
    let a = random_tree(rng, n, TreeKind::Rooted, 0.3);
    let b = random_tree(rng, n, TreeKind::Rooted, 0.3);
    parametric_triplet_distance(&a, &b).unwrap();
    let mut times: Vec<Duration> = (0..runs)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(parametric_triplet_distance(&a, &b).unwrap());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[runs / 2]
}

fn performance_shape() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let small = median_duration(200, 5, &mut rng);
    let large = median_duration(400, 5, &mut rng);
    let ratio = large.as_secs_f64() / small.as_secs_f64().max(1e-9);
    let summary = format!("n = 200: {small:?}, n = 400: {large:?}, ratio {ratio:.2}");
    ensure(ratio <= 5.5, || format!("{summary} (ratio above 5.5)"))?;
    ensure(large < Duration::from_secs(2), || format!("{summary} (n = 400 above 2 s)"))?;
    Ok(summary)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 triplet oracle equivalence", triplet_oracle),
        ("2 quartet 2-approximation", quartet_approximation),
        ("3 metric properties", metric_properties),
        ("4 Hausdorff sandwich", hausdorff_sandwich),
        ("5 expected distance", expected_distance),
        ("6 median threshold", median_threshold),
        ("7 performance shape", performance_shape),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
