//! End-to-end classification reports and cross-validation sweeps.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::group::{iso_classes, valid_k_set, Base, GroupParams, KPartition, PartitionKind};
use crate::lattice::{build_lattice, is_lattice_isomorphic, lattice_classes, SubgroupLattice};
use crate::oracle::{build_group, cocycle_census_of, direct_product, enumerate_subgroups, ConcreteGroup};
use crate::zeta::{coefficients, coefficients_with, dirichlet_multiply, kernel_log, quasiregular_counts, zeta_equal_by_theorem, ZetaCoefficients};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CrossCheck {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> CrossCheck {
        CrossCheck {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    /// Compute the lattice partition (requires `p^(m+n)` within the oracle bound).
    pub lattice: bool,
    /// Cross-check the theorem against coefficient vectors, and against the oracle when in bound.
    pub verify: bool,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub p: u64,
    pub m: u32,
    pub n: u32,
    pub valid_k: Vec<u64>,
    pub iso: KPartition,
    pub zeta: KPartition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<KPartition>,
    pub cross_checks: Vec<CrossCheck>,
    /// Set when a requested stage was skipped because of a resource limit.
    pub partial: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn base(&self) -> Base {
        self.iso.base
    }

    pub fn all_checks_passed(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    /// Rows `(k, iso_rep, zeta_rep, lattice_rep)`.
    pub fn rows(&self) -> Vec<(u64, u64, u64, Option<u64>)> {
        self.valid_k
            .iter()
            .map(|&k| {
                (
                    k,
                    self.iso.representative_of(k).expect("iso covers valid k"),
                    self.zeta.representative_of(k).expect("zeta covers valid k"),
                    self.lattice.as_ref().and_then(|l| l.representative_of(k)),
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,iso_rep,zeta_rep,lattice_rep\n");
        for (k, i, z, l) in self.rows() {
            let l = l.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{k},{i},{z},{l}\n"));
        }
        out
    }
}

fn format_blocks(blocks: &[Vec<u64>]) -> String {
    blocks
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps = self.iso.representatives();
        writeln!(f, "(p,m,n) = ({},{},{})", self.p, self.m, self.n)?;
        writeln!(f, "valid k ({}): {:?}", self.valid_k.len(), self.valid_k)?;
        writeln!(f, "{:<12} {:>3}  blocks", "partition", "#")?;
        writeln!(f, "{:<12} {:>3}  {}", "isomorphism", self.iso.blocks.len(), format_blocks(&self.iso.blocks))?;
        writeln!(f, "{:<12} {:>3}  {}", "zeta", self.zeta.blocks.len(), format_blocks(&self.zeta.blocks))?;
        writeln!(f, "{:<12} {:>3}  {}", "  (reps)", "", format_blocks(&self.zeta.restrict(&reps)))?;
        if let Some(lattice) = &self.lattice {
            writeln!(f, "{:<12} {:>3}  {}", "lattice", lattice.blocks.len(), format_blocks(&lattice.blocks))?;
            writeln!(f, "{:<12} {:>3}  {}", "  (reps)", "", format_blocks(&lattice.restrict(&reps)))?;
        }
        for check in &self.cross_checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{status}] {:<28} {}", check.name, check.detail)?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

fn coefficient_partition(base: Base, valid: &[u64]) -> Result<KPartition> {
    let zetas: BTreeMap<u64, ZetaCoefficients> = valid
        .par_iter()
        .map(|&k| Ok((k, coefficients(&base.params(k as i64))?)))
        .collect::<Result<_>>()?;
    KPartition::from_equivalence(base, PartitionKind::Zeta, valid, |a, b| Ok(zetas[&a] == zetas[&b]))
}

/// Valid `k`, isomorphism classes, zeta classes and (optionally) lattice classes for one `(p, m, n)`.
pub fn classify(p: u64, m: u32, n: u32, options: &ClassifyOptions) -> Result<ClassificationReport> {
    let limits = &options.limits;
    let base = Base::new(p, m, n)?;
    let valid = valid_k_set(p, m, n, limits)?;
    let iso = iso_classes(p, m, n, limits)?;
    let zeta = KPartition::from_equivalence(base, PartitionKind::Zeta, &valid, |a, b| {
        zeta_equal_by_theorem(&base.params(a as i64), &base.params(b as i64))
    })?;

    let mut report = ClassificationReport {
        p,
        m,
        n,
        valid_k: valid.clone(),
        iso,
        zeta,
        lattice: None,
        cross_checks: Vec::new(),
        partial: false,
        notes: Vec::new(),
    };

    let in_bound = base.group_order().is_some_and(|o| o <= limits.max_order);
    if options.lattice {
        if in_bound {
            report.lattice = Some(lattice_classes(p, m, n, limits)?);
        } else {
            report.partial = true;
            report.notes.push(format!(
                "lattice stage skipped: p^(m+n) exceeds the oracle bound {}",
                limits.max_order
            ));
        }
    }

    let iso_in_zeta = report.iso.refines(&report.zeta);
    report.cross_checks.push(CrossCheck::new(
        "iso-refines-zeta",
        iso_in_zeta,
        "every isomorphism class lies in one zeta class",
    ));
    if let Some(lattice) = &report.lattice {
        report.cross_checks.push(CrossCheck::new(
            "lattice-refines-zeta",
            lattice.refines(&report.zeta),
            "every lattice class lies in one zeta class",
        ));
        report.cross_checks.push(CrossCheck::new(
            "iso-refines-lattice",
            report.iso.refines(lattice),
            "isomorphic groups have isomorphic lattices",
        ));
    }

    if options.verify {
        let by_coeffs = coefficient_partition(base, &valid)?;
        let agree = by_coeffs.blocks == report.zeta.blocks;
        report.cross_checks.push(CrossCheck::new(
            "theorem-vs-coefficients",
            agree,
            if agree {
                "criterion partition equals coefficient-equality partition".to_string()
            } else {
                format!("coefficient partition {}", format_blocks(&by_coeffs.blocks))
            },
        ));
        if in_bound {
            let mismatches: Vec<String> = report
                .iso
                .representatives()
                .par_iter()
                .map(|&k| formula_vs_oracle(&base.params(k as i64), limits))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            report.cross_checks.push(CrossCheck::new(
                "formula-vs-oracle",
                mismatches.is_empty(),
                mismatches.first().cloned().unwrap_or_else(|| {
                    format!("{} isomorphism-class representatives match", report.iso.blocks.len())
                }),
            ));
        } else {
            report
                .notes
                .push("formula-vs-oracle skipped: group order exceeds the oracle bound".into());
        }
    }
    Ok(report)
}

fn formula_vs_oracle(params: &GroupParams, limits: &Limits) -> Result<Option<String>> {
    let formula = coefficients(params)?;
    let g = build_group(params, limits)?;
    let oracle = enumerate_subgroups(&g, limits)?.counts_by_log()?;
    Ok(first_difference(params, &formula.counts, &oracle))
}

fn first_difference(params: &GroupParams, formula: &[BigUint], oracle: &[BigUint]) -> Option<String> {
    formula
        .iter()
        .zip(oracle)
        .enumerate()
        .find(|(_, (f, o))| f != o)
        .map(|(t, (f, o))| format!("{params} t={t}: formula {f} vs oracle {o}"))
}

/// Kernel-size function used by the formula side of a sweep; replaceable for fault injection.
pub type KernelFn = fn(&GroupParams, u32, u32) -> Result<u32>;

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub p: u64,
    /// Include every `(m, n)` with `m, n >= 1` and `p^(m+n) <= max_order`.
    pub max_order: u64,
    pub limits: Limits,
    /// Run the lattice checks (the most expensive part of a sweep).
    pub lattice: bool,
    pub kernel: KernelFn,
}

impl SweepSpec {
    pub fn new(p: u64, max_order: u64) -> SweepSpec {
        SweepSpec {
            p,
            max_order,
            limits: Limits::default().with_max_order(max_order.max(Limits::default().max_order)),
            lattice: true,
            kernel: kernel_log,
        }
    }

    pub fn bases(&self) -> Result<Vec<Base>> {
        let mut out = Vec::new();
        let mut total = 2;
        while self.p.checked_pow(total).is_some_and(|o| o <= self.max_order) {
            for m in 1..total {
                out.push(Base::new(self.p, m, total - m)?);
            }
            total += 1;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub check: String,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub p: u64,
    pub max_order: u64,
    pub groups: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn row(&self, check: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.check == check)
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sweep p={} max_order={} ({} groups)", self.p, self.max_order, self.groups)?;
        writeln!(f, "{:<28} {:>6} {:>8}  first counterexample", "check", "status", "cases")?;
        for row in &self.rows {
            let status = if row.passed { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{:<28} {:>6} {:>8}  {}",
                row.check,
                status,
                row.cases,
                row.counterexample.as_deref().unwrap_or("-")
            )?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    counterexample: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    fn row(self, check: &str) -> SweepRow {
        SweepRow {
            check: check.to_string(),
            passed: self.counterexample.is_none(),
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

/// Oracle-side data for one group in a sweep.
struct GroupRecord {
    params: GroupParams,
    formula: ZetaCoefficients,
    oracle: Vec<BigUint>,
    lattice: Option<SubgroupLattice>,
    formula_tally: Tally,
    census_tally: Tally,
}

fn sweep_group(params: GroupParams, spec: &SweepSpec, want_lattice: bool) -> Result<GroupRecord> {
    let limits = &spec.limits;
    let formula = coefficients_with(&params, spec.kernel)?;
    let g = build_group(&params, limits)?;
    let set = enumerate_subgroups(&g, limits)?;
    let oracle = set.counts_by_log()?;

    let mut formula_tally = Tally::default();
    for (t, (f, o)) in formula.counts.iter().zip(&oracle).enumerate() {
        formula_tally.record(f == o, || format!("{params} t={t}: formula {f} vs oracle {o}"));
    }

    let mut census_tally = Tally::default();
    let census = cocycle_census_of(&g, &set)?;
    let p = BigUint::from(params.p());
    for i in 0..=params.m() {
        for j in 0..=params.n() {
            let observed = census.get(&(i, j)).copied().unwrap_or(0);
            let expected = p.pow((spec.kernel)(&params, i, j)?);
            census_tally.record(BigUint::from(observed) == expected, || {
                format!("{params} (i={i}, j={j}): census {observed} vs p^E = {expected}")
            });
        }
    }

    let lattice = want_lattice.then(|| build_lattice(&set));
    Ok(GroupRecord {
        params,
        formula,
        oracle,
        lattice,
        formula_tally,
        census_tally,
    })
}

fn cofactor_for(p: u64) -> u64 {
    if p == 2 {
        3
    } else {
        2
    }
}

fn multiplicativity(g: &ConcreteGroup, q: u64, oracle_counts: &ZetaCoefficients, limits: &Limits) -> Result<bool> {
    let product = direct_product(g, q, limits)?;
    let observed = enumerate_subgroups(&product, limits)?.counts_by_order();
    let cyclic = enumerate_subgroups(&ConcreteGroup::cyclic(q, limits)?, limits)?.counts_by_order();
    Ok(observed == dirichlet_multiply(&oracle_counts.to_series(), &cyclic))
}

/// Runs every cross-check over all `(m, n)` in range and all valid `k`.
///
/// Failures are reported as data (the first counterexample per check); only
/// argument or resource errors abort the sweep.
pub fn sweep_verify(spec: &SweepSpec) -> Result<SweepSummary> {
    let limits = &spec.limits;
    let bases = spec.bases()?;
    let mut formula = Tally::default();
    let mut census = Tally::default();
    let mut theorem = Tally::default();
    let mut multiplicative = Tally::default();
    let mut iso_zeta = Tally::default();
    let mut odd_invariance = Tally::default();
    let mut quasiregular = Tally::default();
    let mut lattice_lemma = Tally::default();
    let mut groups = 0;

    // lattices of isomorphism-class representatives, grouped by group order
    let mut lattices: BTreeMap<u64, Vec<(GroupParams, Vec<BigUint>, SubgroupLattice)>> = BTreeMap::new();

    for base in bases {
        let valid = valid_k_set(base.p, base.m, base.n, limits)?;
        let iso = iso_classes(base.p, base.m, base.n, limits)?;
        let reps = iso.representatives();
        let records: Vec<GroupRecord> = valid
            .par_iter()
            .map(|&k| {
                let want_lattice = spec.lattice && reps.contains(&k);
                sweep_group(base.params(k as i64), spec, want_lattice)
            })
            .collect::<Result<_>>()?;
        groups += records.len();

        for rec in &records {
            // isomorphic groups must agree on the formula side too
            let rep = iso.representative_of(rec.params.k()).expect("valid k has a class");
            let rep_rec = records.iter().find(|r| r.params.k() == rep).expect("rep swept");
            iso_zeta.record(rec.formula == rep_rec.formula, || {
                format!("{} is isomorphic to {} but formula vectors differ", rec.params, rep_rec.params)
            });
        }

        for (a, b) in pairs(&records) {
            let by_theorem = zeta_equal_by_theorem(&a.params, &b.params)?;
            let by_oracle = a.oracle == b.oracle;
            theorem.record(by_theorem == by_oracle, || {
                format!(
                    "{} vs {}: criterion says {by_theorem}, oracle vectors equal = {by_oracle}",
                    a.params, b.params
                )
            });
        }

        if base.p != 2 {
            let ell = base.m + base.n;
            let expected = quasiregular_counts(base.p, ell, base.m.max(base.n))?;
            let first = &records[0];
            for rec in &records {
                odd_invariance.record(rec.oracle == first.oracle, || {
                    format!("{} vs {}: oracle vectors differ", rec.params, first.params)
                });
                quasiregular.record(rec.formula.counts == expected, || {
                    format!("{}: quasi-regular formula disagrees with coefficients", rec.params)
                });
            }
        }

        // one multiplicativity sample per (m, n), on the first representative whose product fits
        let q = cofactor_for(base.p);
        if let Some(rec) = records.iter().find(|r| {
            base.group_order().and_then(|o| o.checked_mul(q)).is_some_and(|o| o <= limits.max_order)
                && reps.contains(&r.params.k())
        }) {
            let g = build_group(&rec.params, limits)?;
            let oracle_counts = ZetaCoefficients {
                base,
                counts: rec.oracle.clone(),
            };
            let ok = multiplicativity(&g, q, &oracle_counts, limits)?;
            multiplicative.record(ok, || format!("{} x Z{q}: counts differ from Dirichlet product", rec.params));
        }

        for rec in records {
            formula.merge(rec.formula_tally);
            census.merge(rec.census_tally);
            if let Some(lattice) = rec.lattice {
                let order = base.group_order().expect("in bound");
                lattices.entry(order).or_default().push((rec.params, rec.oracle, lattice));
            }
        }
    }

    if spec.lattice {
        for entries in lattices.values() {
            let tallies: Vec<Tally> = (0..entries.len())
                .into_par_iter()
                .map(|i| {
                    let mut tally = Tally::default();
                    for j in i + 1..entries.len() {
                        let (pa, ca, la) = &entries[i];
                        let (pb, cb, lb) = &entries[j];
                        if is_lattice_isomorphic(la, lb) {
                            tally.record(ca == cb, || format!("{pa} and {pb} have isomorphic lattices but different counts"));
                        }
                    }
                    tally
                })
                .collect();
            for t in tallies {
                lattice_lemma.merge(t);
            }
        }
    }

    let mut rows = vec![
        formula.row("formula-vs-oracle"),
        census.row("cocycle-census"),
        iso_zeta.row("isomorphism-implies-zeta"),
        multiplicative.row("multiplicativity"),
    ];
    if spec.p == 2 {
        rows.push(theorem.row("theorem-vs-coefficients"));
    } else {
        rows.push(theorem.row("theorem-vs-coefficients"));
        rows.push(odd_invariance.row("odd-p-k-independence"));
        rows.push(quasiregular.row("quasi-regular-formula"));
    }
    if spec.lattice {
        rows.push(lattice_lemma.row("lattice-iso-implies-zeta"));
    }
    Ok(SweepSummary {
        p: spec.p,
        max_order: spec.max_order,
        groups,
        rows,
    })
}

fn pairs<T>(items: &[T]) -> impl Iterator<Item = (&T, &T)> {
    items
        .iter()
        .enumerate()
        .flat_map(move |(i, a)| items[i + 1..].iter().map(move |b| (a, b)))
}

/// Isomorphic? zeta-equal? lattice-isomorphic? for two parameters over the same `(p, m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub isomorphic: bool,
    pub zeta_equal: bool,
    /// `None` when the groups exceed the oracle bound.
    pub lattice_isomorphic: Option<bool>,
}

pub fn compare(a: &GroupParams, b: &GroupParams, limits: &Limits) -> Result<Comparison> {
    let isomorphic = crate::group::is_isomorphic(a, b)?;
    let zeta_equal = zeta_equal_by_theorem(a, b)?;
    let lattice_isomorphic = match (build_group(a, limits), build_group(b, limits)) {
        (Ok(ga), Ok(gb)) => {
            let la = build_lattice(&enumerate_subgroups(&ga, limits)?);
            let lb = build_lattice(&enumerate_subgroups(&gb, limits)?);
            Some(is_lattice_isomorphic(&la, &lb))
        }
        (Err(Error::ResourceLimit(_)), _) | (_, Err(Error::ResourceLimit(_))) => None,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(Comparison {
        isomorphic,
        zeta_equal,
        lattice_isomorphic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_odd_prime() {
        let report = classify(3, 2, 1, &ClassifyOptions { verify: true, lattice: true, ..Default::default() }).unwrap();
        assert_eq!(report.zeta.blocks, vec![vec![1, 4, 7]]);
        assert_eq!(report.iso.blocks, vec![vec![1], vec![4, 7]]);
        assert!(report.all_checks_passed(), "{report}");
    }

    #[test]
    fn classify_n_at_least_m() {
        let report = classify(2, 3, 3, &ClassifyOptions { verify: true, ..Default::default() }).unwrap();
        assert_eq!(report.zeta.blocks.len(), 1);
        assert!(report.all_checks_passed());
    }

    #[test]
    fn classify_partial_when_out_of_bound() {
        let options = ClassifyOptions {
            lattice: true,
            verify: true,
            limits: Limits::default().with_max_order(16),
        };
        let report = classify(2, 3, 2, &options).unwrap();
        assert!(report.partial);
        assert!(report.lattice.is_none());
        assert!(report.all_checks_passed());
    }

    #[test]
    fn csv_rows() {
        let report = classify(3, 2, 1, &ClassifyOptions::default()).unwrap();
        assert_eq!(report.to_csv(), "k,iso_rep,zeta_rep,lattice_rep\n1,1,1,\n4,4,1,\n7,4,1,\n");
    }

    #[test]
    fn sweep_bases() {
        let spec = SweepSpec::new(2, 16);
        let bases: Vec<(u32, u32)> = spec.bases().unwrap().iter().map(|b| (b.m, b.n)).collect();
        assert_eq!(bases, vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]);
    }

    fn corrupted(params: &GroupParams, i: u32, j: u32) -> Result<u32> {
        let e = kernel_log(params, i, j)?;
        Ok(if params.m() == 2 && params.n() == 1 && i == 0 && j == 1 { e + 1 } else { e })
    }

    #[test]
    fn sweep_detects_fault() {
        let mut spec = SweepSpec::new(2, 16);
        spec.kernel = corrupted;
        let summary = sweep_verify(&spec).unwrap();
        let row = summary.row("formula-vs-oracle").unwrap();
        assert!(!row.passed);
        assert!(row.counterexample.as_deref().unwrap().starts_with("G(2,2,1,1) t=1"), "{:?}", row.counterexample);
        assert!(!summary.row("cocycle-census").unwrap().passed);
    }

    #[test]
    fn small_sweep_passes() {
        let summary = sweep_verify(&SweepSpec::new(2, 32)).unwrap();
        assert!(summary.all_passed(), "{summary}");
    }

    #[test]
    fn compare_triple() {
        let base = Base::new(2, 3, 2).unwrap();
        let c = compare(&base.params(1), &base.params(5), &Limits::default()).unwrap();
        assert!(!c.isomorphic);
        assert!(c.lattice_isomorphic.is_some());
    }
}
