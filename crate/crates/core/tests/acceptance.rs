//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p metazeta --test acceptance` (add `--release` for speed).

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use metazeta::classify::{SweepSummary, SweepSpec};
use metazeta::oracle::{berkovich_shape, direct_product, omega_profile, subgroup_counts};
use metazeta::padic::{lte_valuation, vp};
use metazeta::zeta::{berkovich_counts, coefficients, dirichlet_multiply, zeta_equal_by_theorem, MaxClassFamily};
use metazeta::{
    build_group, build_lattice, classify, enumerate_subgroups, is_lattice_isomorphic, sweep_verify, valid_k_set,
    Base, ClassifyOptions, ConcreteGroup, GroupParams, Limits,
};
use num_bigint::{BigInt, BigUint};
use num_traits::Pow;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CLASSIFY_BUDGET: Duration = Duration::from_secs(120);
const SWEEP_BUDGET: Duration = Duration::from_secs(600);
const LTE_INSTANCES: usize = 1000;
const LTE_BOUND: i64 = 1 << 20;
const LTE_MAX_N: u64 = 64;
const SEED: u64 = 0x5eed_2a7e;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: metazeta::Error) -> String {
    e.to_string()
}

struct Sweeps {
    two: SweepSummary,
    three: SweepSummary,
    five: SweepSummary,
    elapsed: Duration,
}

static SWEEPS: OnceLock<Result<Sweeps, String>> = OnceLock::new();

fn sweeps() -> Result<&'static Sweeps, String> {
    SWEEPS
        .get_or_init(|| {
            let start = Instant::now();
            let two = sweep_verify(&SweepSpec::new(2, 256)).map_err(err)?;
            let mut spec = SweepSpec::new(3, 243);
            spec.lattice = false;
            let three = sweep_verify(&spec).map_err(err)?;
            let mut spec = SweepSpec::new(5, 125);
            spec.lattice = false;
            let five = sweep_verify(&spec).map_err(err)?;
            Ok(Sweeps { two, three, five, elapsed: start.elapsed() })
        })
        .as_ref()
        .map_err(Clone::clone)
}

fn row_passed(summary: &SweepSummary, name: &str) -> Result<u64, String> {
    let row = summary.row(name).ok_or_else(|| format!("sweep p={} has no row {name}", summary.p))?;
    match &row.counterexample {
        None => Ok(row.cases),
        Some(c) => Err(format!("p={} {name}: {c}", summary.p)),
    }
}

fn reps(blocks: &[Vec<u64>], iso: &metazeta::KPartition) -> Vec<Vec<u64>> {
    let r = iso.representatives();
    let mut out: Vec<Vec<u64>> = blocks
        .iter()
        .map(|b| b.iter().copied().filter(|k| r.contains(k)).collect())
        .collect();
    out.sort();
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let options = ClassifyOptions { lattice: true, verify: true, limits: Limits::default() };
    let report = classify(2, 5, 3, &options).map_err(err)?;
    let elapsed = start.elapsed();
    check(report.valid_k == (1..32).step_by(2).collect::<Vec<u64>>(), format!("valid_k {:?}", report.valid_k))?;
    let iso: Vec<Vec<u64>> = vec![
        vec![1],
        vec![3, 11, 19, 27],
        vec![5, 13, 21, 29],
        vec![7, 23],
        vec![9, 25],
        vec![15],
        vec![17],
        vec![31],
    ];
    check(report.iso.blocks == iso, format!("iso blocks {:?}", report.iso.blocks))?;
    let zeta = reps(&report.zeta.blocks, &report.iso);
    check(zeta == vec![vec![1, 5, 9, 17], vec![3], vec![7, 15, 31]], format!("zeta reps {zeta:?}"))?;
    let lattice = report.lattice.as_ref().ok_or("no lattice partition")?;
    let lat = reps(&lattice.blocks, &report.iso);
    check(
        lat == vec![vec![1, 5, 9, 17], vec![3], vec![7], vec![15], vec![31]],
        format!("lattice reps {lat:?}"),
    )?;
    check(report.all_checks_passed(), format!("cross-checks failed:\n{report}"))?;
    check(elapsed <= CLASSIFY_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("8 iso / 3 zeta / 5 lattice classes in {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let s = sweeps()?;
    let mut cases = 0;
    for summary in [&s.two, &s.three, &s.five] {
        cases += row_passed(summary, "formula-vs-oracle")?;
    }
    check(s.elapsed <= SWEEP_BUDGET, format!("sweeps took {:?}", s.elapsed))?;
    let groups = s.two.groups + s.three.groups + s.five.groups;
    Ok(format!("{groups} groups, {cases} coefficients, {:.1}s", s.elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let mut pairs = 0u64;
    let limits = Limits::default();
    for total in 2..=12u32 {
        for m in 1..total {
            let base = Base::new(2, m, total - m).map_err(err)?;
            let ks = valid_k_set(2, base.m, base.n, &limits).map_err(err)?;
            let params: Vec<GroupParams> = ks.iter().map(|&k| base.params(k as i64)).collect();
            let coeffs = params.iter().map(coefficients).collect::<Result<Vec<_>, _>>().map_err(err)?;
            for i in 0..params.len() {
                for j in i + 1..params.len() {
                    let theorem = zeta_equal_by_theorem(&params[i], &params[j]).map_err(err)?;
                    let equal = coeffs[i] == coeffs[j];
                    check(
                        theorem == equal,
                        format!("{} vs {}: criterion {theorem}, coefficients equal {equal}", params[i], params[j]),
                    )?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs, zero discrepancies"))
}

fn criterion_4() -> Outcome {
    let s = sweeps()?;
    let mut cases = 0;
    for summary in [&s.two, &s.three, &s.five] {
        cases += row_passed(summary, "cocycle-census")?;
    }
    Ok(format!("{cases} (group, i, j) census entries"))
}

fn criterion_5() -> Outcome {
    let s = sweeps()?;
    let mut cases = 0;
    for summary in [&s.three, &s.five] {
        cases += row_passed(summary, "odd-p-k-independence")?;
        cases += row_passed(summary, "quasi-regular-formula")?;
    }
    Ok(format!("{cases} comparisons"))
}

fn random_lte_instance(rng: &mut StdRng) -> (u64, i64, i64, u64) {
    const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    let p = PRIMES[rng.gen_range(0..PRIMES.len())];
    let n = rng.gen_range(1..=LTE_MAX_N);
    loop {
        let y = rng.gen_range(-LTE_BOUND..=LTE_BOUND);
        if y.rem_euclid(p as i64) == 0 {
            continue;
        }
        let x = if p == 2 {
            rng.gen_range(-LTE_BOUND..=LTE_BOUND) | 1
        } else {
            let steps = LTE_BOUND / p as i64;
            y + p as i64 * rng.gen_range(-steps..=steps)
        };
        if x.abs() <= LTE_BOUND && x != y && !(p == 2 && n % 2 == 0 && x == -y) {
            return (p, x, y, n);
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..LTE_INSTANCES {
        let (p, x, y, n) = random_lte_instance(&mut rng);
        let (bx, by) = (BigInt::from(x), BigInt::from(y));
        let direct = vp(p, &(Pow::pow(&bx, n as u32) - Pow::pow(&by, n as u32))).map_err(err)?;
        let lemma = lte_valuation(p, &bx, &by, n).map_err(err)?;
        check(lemma == direct, format!("p={p} x={x} y={y} n={n}: lemma {lemma}, direct {direct}"))?;
    }
    Ok(format!("{LTE_INSTANCES} instances, seed {SEED:#x}"))
}

fn criterion_7() -> Outcome {
    let limits = Limits::default();
    let split = |m, n, k| build_group(&GroupParams::new(2, m, n, k).map_err(err)?, &limits).map_err(err);
    let fixtures: Vec<(&str, ConcreteGroup)> = vec![
        ("Z16", ConcreteGroup::cyclic(16, &limits).map_err(err)?),
        ("D16", ConcreteGroup::maximal_class(MaxClassFamily::D, 4, &limits).map_err(err)?),
        ("Q16", ConcreteGroup::maximal_class(MaxClassFamily::Q, 4, &limits).map_err(err)?),
        ("SD16", ConcreteGroup::maximal_class(MaxClassFamily::SD, 4, &limits).map_err(err)?),
        ("Z4xZ4", split(2, 2, 1)?),
        ("M16", split(3, 1, 5)?),
        ("Z8xZ2", split(3, 1, 1)?),
    ];
    let mut shapes = Vec::new();
    for (name, g) in &fixtures {
        let shape = berkovich_shape(&omega_profile(g).map_err(err)?).map_err(err)?;
        let formula = berkovich_counts(shape).map_err(err)?;
        let oracle = subgroup_counts(g, &limits).map_err(err)?;
        check(formula == oracle, format!("{name} ({shape:?}): formula {formula:?}, oracle {oracle:?}"))?;
        let a2 = &oracle[1];
        match *name {
            "Q16" => check(*a2 == BigUint::from(1u32), format!("Q16 a_2 = {a2}"))?,
            "SD16" => check(*a2 == BigUint::from(5u32), format!("SD16 a_2 = {a2}"))?,
            "D16" => check(*a2 == BigUint::from(9u32), format!("D16 a_2 = {a2}"))?,
            _ => {}
        }
        shapes.push(format!("{name}:{}", oracle.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")));
    }
    // Q and SD of order 32 as well: a_2 = 1 and 2^(5-2)+1
    for (family, expect) in [(MaxClassFamily::Q, 1u32), (MaxClassFamily::SD, 9)] {
        let g = ConcreteGroup::maximal_class(family, 5, &limits).map_err(err)?;
        let oracle = subgroup_counts(&g, &limits).map_err(err)?;
        let shape = berkovich_shape(&omega_profile(&g).map_err(err)?).map_err(err)?;
        check(oracle == berkovich_counts(shape).map_err(err)?, format!("{family}32 mismatch"))?;
        check(oracle[1] == BigUint::from(expect), format!("{family}32 a_2 = {}", oracle[1]))?;
    }
    Ok(shapes.join(" "))
}

fn criterion_8() -> Outcome {
    let s = sweeps()?;
    let cases = row_passed(&s.two, "lattice-iso-implies-zeta")?;
    let limits = Limits::default();
    let base = Base::new(2, 5, 3).map_err(err)?;
    let (a, b) = (base.params(7), base.params(15));
    check(zeta_equal_by_theorem(&a, &b).map_err(err)?, "k=7 and k=15 not zeta-equal")?;
    check(coefficients(&a).map_err(err)? == coefficients(&b).map_err(err)?, "k=7, k=15 coefficients differ")?;
    let la = build_lattice(&enumerate_subgroups(&build_group(&a, &limits).map_err(err)?, &limits).map_err(err)?);
    let lb = build_lattice(&enumerate_subgroups(&build_group(&b, &limits).map_err(err)?, &limits).map_err(err)?);
    check(!is_lattice_isomorphic(&la, &lb), "k=7 and k=15 lattices are isomorphic")?;
    Ok(format!("{cases} lattice-isomorphic pairs agree; k=7 vs k=15 zeta-equal, lattices differ"))
}

fn criterion_9() -> Outcome {
    let limits = Limits::default();
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut pool = Vec::new();
    for total in 2..=8u32 {
        for m in 1..total {
            for k in valid_k_set(2, m, total - m, &limits).map_err(err)? {
                pool.push(GroupParams::new(2, m, total - m, k as i64).map_err(err)?);
            }
        }
    }
    let z3 = enumerate_subgroups(&ConcreteGroup::cyclic(3, &limits).map_err(err)?, &limits)
        .map_err(err)?
        .counts_by_order();
    let mut names = Vec::new();
    for _ in 0..5 {
        let params = pool[rng.gen_range(0..pool.len())];
        let g = build_group(&params, &limits).map_err(err)?;
        let counts = enumerate_subgroups(&g, &limits).map_err(err)?.counts_by_order();
        let product = direct_product(&g, 3, &limits).map_err(err)?;
        let observed = enumerate_subgroups(&product, &limits).map_err(err)?.counts_by_order();
        check(observed == dirichlet_multiply(&counts, &z3), format!("{params} x Z3"))?;
        names.push(params.to_string());
    }
    Ok(names.join(" "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 (2,5,3) reproduction", criterion_1),
        ("2 formula = oracle", criterion_2),
        ("3 criterion <=> coefficient equality", criterion_3),
        ("4 cocycle census", criterion_4),
        ("5 odd-p invariance, quasi-regular", criterion_5),
        ("6 LTE valuations", criterion_6),
        ("7 Berkovich fixtures", criterion_7),
        ("8 lattice lemma, converse fails", criterion_8),
        ("9 multiplicativity", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name:<40} [{secs:7.2}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name:<40} [{secs:7.2}s] {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
