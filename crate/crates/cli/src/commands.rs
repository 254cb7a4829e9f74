use std::path::PathBuf;
use std::time::Instant;

use polydist::consensus::{best_of_profile, greedy_refine_median, Profile};
use polydist::expected::{
    asymptotic_unresolved, empirical_expected_distance, exact_resolution_probability, expected_distance_formula,
};
use polydist::hausdorff::{adversarial_refinement, hausdorff_bounds};
use polydist::oracle::{
    classify_quartets, classify_triplets, enumerate_phylogenies, full_refinement_count, hausdorff_exact,
    median_exhaustive,
};
use polydist::quartet::{parametric_quartet_distance, QuartetMethod, SharedMethod};
use polydist::random::random_tree;
use polydist::rational::rational;
use polydist::{
    align_taxa, parametric_triplet_distance, parse_newick_all, write_newick, Error, Phylogeny, Rational, TreeKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{Report, Status};
use crate::{BoundsArgs, ConsensusArgs, DistArgs, EnumerateArgs, ExpectedArgs, Method, RefineArgs, SelftestArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::DuplicateLabel(_)
            | Error::EmptyLabel(_)
            | Error::InvalidTree(_)
            | Error::KindMismatch { .. }
            | Error::TaxonMismatch
            | Error::UnknownTaxon(_)
            | Error::Precondition { .. } => CliError::Input(e.to_string()),
            Error::Capacity { .. } | Error::OutOfRange(_) | Error::UnsupportedGuarantee(_) | Error::InvalidArgument(_) => {
                CliError::Usage(e.to_string())
            }
        }
    }
}

/// A report and whether the command succeeded.
pub type Outcome = Result<(Report, bool), CliError>;

fn kind_of(unrooted: bool) -> TreeKind {
    if unrooted {
        TreeKind::Unrooted
    } else {
        TreeKind::Rooted
    }
}

fn names(files: &[PathBuf]) -> Vec<String> {
    files.iter().map(|f| f.display().to_string()).collect()
}

/// Reads every tree in `files`, in order, over one shared taxon set.
fn read_trees(files: &[PathBuf], kind: TreeKind) -> Result<Vec<Phylogeny>, CliError> {
    let trees = parse_files(files, kind)?;
    if trees.is_empty() {
        return Err(CliError::Input("no trees found in the input".into()));
    }
    Ok(align_taxa(trees)?)
}

fn parse_files(files: &[PathBuf], kind: TreeKind) -> Result<Vec<Phylogeny>, CliError> {
    let mut trees = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
        let parsed = parse_newick_all(&text, kind).map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
        trees.extend(parsed);
    }
    Ok(trees)
}

fn read_pair(files: &[PathBuf], kind: TreeKind) -> Result<(Phylogeny, Phylogeny), CliError> {
    let mut trees = read_trees(files, kind)?;
    if trees.len() != 2 {
        return Err(CliError::Input(format!("expected two trees, found {}", trees.len())));
    }
    let b = trees.pop().expect("two trees");
    let a = trees.pop().expect("two trees");
    Ok((a, b))
}

fn describe(report: &mut Report, trees: &[Phylogeny]) {
    report.inputs.n = Some(trees[0].n());
    report.inputs.trees = Some(trees.len());
}

pub fn dist_triplet(args: &DistArgs) -> Outcome {
    if args.unrooted {
        return Err(CliError::Usage("triplet distances are defined for rooted trees; use `dist quartet`".into()));
    }
    let method = args.method.unwrap_or(Method::Fast);
    if method == Method::Approx {
        return Err(CliError::Usage("the triplet distance is computed exactly; use --method fast or brute".into()));
    }
    let (a, b) = read_pair(&args.files, TreeKind::Rooted)?;
    let mut report = Report::new("dist triplet", &names(&args.files), TreeKind::Rooted).with_p(&args.p);
    describe(&mut report, &[a.clone(), b.clone()]);
    let start = Instant::now();
    let pair = match method {
        Method::Brute => classify_triplets(&a, &b)?.distance_pair(),
        _ => parametric_triplet_distance(&a, &b)?,
    };
    report.elapsed = Some(start.elapsed());
    report.rational("distance", &pair.evaluate(&args.p)?, Status::Exact);
    report.push("disagreeing", pair.d, Some(Status::Exact));
    report.push("one-sided", pair.r, Some(Status::Exact));
    report.push("method", if method == Method::Brute { "brute" } else { "fast" }, None);
    Ok((report, true))
}

pub fn dist_quartet(args: &DistArgs) -> Outcome {
    let (a, b) = read_pair(&args.files, TreeKind::Unrooted)?;
    let method = match args.method.unwrap_or(Method::Brute) {
        Method::Brute => QuartetMethod::Brute,
        Method::Approx => QuartetMethod::Approx(SharedMethod::Brute),
        Method::Fast => QuartetMethod::Approx(SharedMethod::Fast),
    };
    let mut report = Report::new("dist quartet", &names(&args.files), TreeKind::Unrooted).with_p(&args.p);
    describe(&mut report, &[a.clone(), b.clone()]);
    let start = Instant::now();
    let result = parametric_quartet_distance(&a, &b, &args.p, method)?;
    report.elapsed = Some(start.elapsed());
    if result.exact {
        let entry = report.rational("distance", &result.value, Status::Exact);
        if method != QuartetMethod::Brute {
            entry.note = Some("exact at p=1/2".into());
        }
    } else {
        report.rational("approximation", &result.value, Status::TwoApprox);
        report.rational("distance-low", &result.low, Status::Bound);
        report.rational("distance-high", &result.high, Status::Bound);
    }
    let name = match method {
        QuartetMethod::Brute => "brute",
        QuartetMethod::Approx(SharedMethod::Brute) => "approx",
        QuartetMethod::Approx(SharedMethod::Fast) => "fast",
    };
    report.push("method", name, None);
    Ok((report, true))
}

pub fn hausdorff(args: &BoundsArgs) -> Outcome {
    let kind = kind_of(args.unrooted);
    let (a, b) = read_pair(&args.files, kind)?;
    let mut report = Report::new("hausdorff-bounds", &names(&args.files), kind);
    describe(&mut report, &[a.clone(), b.clone()]);
    let start = Instant::now();
    let bounds = hausdorff_bounds(&a, &b)?;
    let forward = adversarial_refinement(&a, &b)?;
    let backward = adversarial_refinement(&b, &a)?;
    let pairs = full_refinement_count(&a).saturating_mul(full_refinement_count(&b));
    let exact = if pairs <= args.cap { Some(hausdorff_exact(&a, &b, args.cap)?) } else { None };
    report.elapsed = Some(start.elapsed());
    report.rational("lower", &bounds.lower, Status::Bound);
    report.push("upper", bounds.upper, Some(Status::Bound));
    report.push("adversarial-lower", forward.disagreements.max(backward.disagreements), Some(Status::Bound)).note =
        Some("disagreements reached by refining one tree against the other".into());
    let c = bounds.classification;
    report.push("classification", json!({ "s": c.s, "d": c.d, "r1": c.r1, "r2": c.r2, "u": c.u }), Some(Status::Exact));
    match exact {
        Some(h) => {
            report.push("hausdorff", h, Some(Status::Exact));
        }
        None => {
            report.push("hausdorff", Value::Null, None).note =
                Some(format!("{pairs} refinement pairs exceed --cap {}", args.cap));
        }
    }
    Ok((report, true))
}

pub fn consensus(args: &ConsensusArgs) -> Outcome {
    let kind = kind_of(args.unrooted);
    let trees = read_trees(&args.files, kind)?;
    let mut report = Report::new("consensus", &names(&args.files), kind).with_p(&args.p);
    describe(&mut report, &trees);
    let profile = Profile::new(trees)?;
    let start = Instant::now();
    let best = best_of_profile(&profile, &args.p)?;
    report.push("best-index", best.index, None);
    report.push("best-tree", write_newick(&best.tree), None);
    report.rational("best-total", &best.total, Status::Exact);
    report.push("within-factor-two", best.within_factor_two, None).note =
        Some(if best.within_factor_two { "total <= 2 x optimum" } else { "no guarantee for p < 1/2" }.into());
    if args.refine {
        let out = greedy_refine_median(&best.tree, &profile, &args.p)?;
        report.push("refined-tree", write_newick(&out.tree), None);
        report.rational("refined-total", &out.final_distance, Status::Exact);
        report.push("refinement-guaranteed", out.guaranteed, None);
    }
    if args.exhaustive {
        let med = median_exhaustive(&profile, &args.p)?;
        report.rational("median-total", &med.total, Status::Exact);
        report.push("median-trees", med.trees.iter().map(write_newick).collect::<Vec<_>>(), None);
    }
    report.elapsed = Some(start.elapsed());
    Ok((report, true))
}

pub fn refine(args: &RefineArgs) -> Outcome {
    let kind = kind_of(args.unrooted);
    let mut files = vec![args.tree.clone()];
    files.extend(args.profile.iter().cloned());
    let mut trees = parse_files(std::slice::from_ref(&args.tree), kind)?;
    if trees.len() != 1 {
        return Err(CliError::Input(format!("{}: expected one tree, found {}", args.tree.display(), trees.len())));
    }
    trees.extend(parse_files(&args.profile, kind)?);
    let mut trees = align_taxa(trees)?;
    let members = trees.split_off(1);
    let tree = trees.pop().expect("one tree");
    let mut report = Report::new("refine", &names(&files), kind).with_p(&args.p);
    report.inputs.n = Some(tree.n());
    report.inputs.trees = Some(members.len());
    let profile = Profile::new(members)?;
    let start = Instant::now();
    let out = greedy_refine_median(&tree, &profile, &args.p)?;
    report.elapsed = Some(start.elapsed());
    report.rational("initial-total", &out.initial_distance, Status::Exact);
    let steps: Vec<Value> = out
        .steps
        .iter()
        .map(|s| {
            json!({
                "parts": [s.vote.parts.0, s.vote.parts.1],
                "agree": s.vote.agree,
                "disagree": s.vote.disagree,
                "abstain": s.vote.abstain,
                "change": polydist::format_rational(&s.change),
            })
        })
        .collect();
    report.push("steps", steps, None);
    report.push("tree", write_newick(&out.tree), None);
    report.rational("total", &out.final_distance, Status::Exact);
    report.push("guaranteed", out.guaranteed, None).note =
        Some("no step increases the total when p >= 2/3 and the profile is fully resolved".into());
    Ok((report, true))
}

pub fn enumerate(args: &EnumerateArgs) -> Outcome {
    let kind = kind_of(args.unrooted);
    let mut report = Report::new("enumerate", &[], kind);
    report.inputs.n = Some(args.n);
    let start = Instant::now();
    let trees = enumerate_phylogenies(args.n, kind)?;
    report.push("count", trees.len(), Some(Status::Exact));
    let arity = if kind == TreeKind::Rooted { 3 } else { 4 };
    if args.n >= arity {
        let stats = exact_resolution_probability(args.n, kind)?;
        report.rational("resolved-probability", &stats.r, Status::Exact);
        report.rational("unresolved-probability", &stats.u, Status::Exact);
    }
    if args.list {
        report.push("trees", trees.iter().map(write_newick).collect::<Vec<_>>(), None);
    }
    report.elapsed = Some(start.elapsed());
    Ok((report, true))
}

pub fn expected(args: &ExpectedArgs) -> Outcome {
    let kind = kind_of(args.unrooted);
    let mut report = Report::new("expected", &[], kind).with_p(&args.p);
    report.inputs.n = Some(args.n);
    let start = Instant::now();
    report.rational("expected-distance", &expected_distance_formula(args.n, &args.p, kind)?, Status::Exact);
    if let Some(samples) = args.samples {
        report.seed = Some(args.seed);
        let est = empirical_expected_distance(args.n, &args.p, kind, samples, args.seed)?;
        report.rational("sample-mean", &est.mean, Status::Sampled).note = Some(format!("{samples} pairs"));
        report.push("sample-stderr", est.stderr, Some(Status::Float));
    }
    // A rooted triplet is unresolved as often as an unrooted quartet on one more taxon.
    let m = if kind == TreeKind::Rooted { args.n + 1 } else { args.n };
    if m >= 1 {
        report.push("asymptotic-unresolved", asymptotic_unresolved(m), Some(Status::Float)).note =
            Some("leading-order estimate without error term".into());
    }
    report.elapsed = Some(start.elapsed());
    Ok((report, true))
}

pub fn selftest(args: &SelftestArgs) -> Outcome {
    let mut report = Report::new("selftest", &[], TreeKind::Rooted);
    report.seed = Some(args.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let start = Instant::now();
    let mut all_ok = true;

    let mut record = |report: &mut Report, name: &str, checked: usize, failures: usize| {
        all_ok &= failures == 0;
        let note = if failures == 0 { "all agree".to_string() } else { format!("{failures} mismatches") };
        report.push(name, checked, Some(Status::Exact)).note = Some(note);
    };

    let rp4 = enumerate_phylogenies(4, TreeKind::Rooted)?;
    let mut failures = 0;
    for a in &rp4 {
        for b in &rp4 {
            failures += usize::from(parametric_triplet_distance(a, b)? != classify_triplets(a, b)?.distance_pair());
        }
    }
    record(&mut report, "triplet-exhaustive-pairs", rp4.len() * rp4.len(), failures);

    let mut failures = 0;
    for _ in 0..args.pairs {
        let n = rng.random_range(4..=40);
        let contract = [rng.random_range(0.0..0.9), rng.random_range(0.0..0.9)];
        let a = random_tree(&mut rng, n, TreeKind::Rooted, contract[0]);
        let b = random_tree(&mut rng, n, TreeKind::Rooted, contract[1]);
        failures += usize::from(parametric_triplet_distance(&a, &b)? != classify_triplets(&a, &b)?.distance_pair());
    }
    record(&mut report, "triplet-random-pairs", args.pairs, failures);

    let mut failures = 0;
    let (half, one) = (rational(1, 2), rational(1, 1));
    for _ in 0..args.pairs {
        let n = rng.random_range(5..=20);
        let contract = [rng.random_range(0.0..0.9), rng.random_range(0.0..0.9)];
        let a = random_tree(&mut rng, n, TreeKind::Unrooted, contract[0]);
        let b = random_tree(&mut rng, n, TreeKind::Unrooted, contract[1]);
        let exact = classify_quartets(&a, &b)?.distance_pair();
        let fast = QuartetMethod::Approx(SharedMethod::Fast);
        let at_half = parametric_quartet_distance(&a, &b, &half, fast)?.value;
        let at_one = parametric_quartet_distance(&a, &b, &one, fast)?.value;
        let d1: Rational = exact.evaluate(&one)?;
        let ok = at_half == exact.evaluate(&half)? && d1 <= at_one && at_one <= &d1 * rational(2, 1);
        failures += usize::from(!ok);
    }
    record(&mut report, "quartet-random-pairs", args.pairs, failures);
    report.elapsed = Some(start.elapsed());
    Ok((report, all_ok))
}
