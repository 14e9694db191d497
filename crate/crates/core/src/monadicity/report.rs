use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_estar_morphism, e_star_inverse, k_mor, k_obj, l_mor, l_obj, retraction, section, sigma,
    xi,
};
use crate::algebra::{
    check_algebra, enumerate_algebras, iso_classes, AlgebraMorphism, Method, TAlgebra,
};
use crate::error::{Error, Result};
use crate::finset::{all_morphisms, compose, hom_count, hom_sample, FinSet, HomSample, Morphism};
use crate::state_monad::{Coverage, LawCheck, StateMonadCtx};

/// Hom-sets up to this size are checked in full; larger ones are sampled.
pub const NATURALITY_EXHAUSTIVE_LIMIT: u128 = 10_000;
pub const NATURALITY_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub method: Method,
    pub ceiling: u64,
    /// Restrict section checks to one chosen element; `None` tries all.
    pub s0: Option<usize>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            method: Method::Constrained,
            ceiling: crate::algebra::DEFAULT_CEILING,
            s0: None,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierStatus {
    Checked,
    GuardExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarrierReport {
    pub x_size: usize,
    pub status: CarrierStatus,
    pub algebras: Option<usize>,
    /// `|X|!/k!` when `|X| = k^|S|`, else 0. Conjectured, not proved.
    pub predicted: usize,
    pub iso_classes: Option<usize>,
    /// `|L(X, h)|` for each algebra, in enumeration order.
    pub y_sizes: Vec<usize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub s_size: usize,
    pub max_x: usize,
    pub options: VerifyOptions,
    pub s0_choices: Vec<usize>,
    pub carriers: Vec<CarrierReport>,
    pub checks: Vec<LawCheck>,
    pub passed: bool,
}

#[derive(Default)]
struct Checks(Vec<LawCheck>);

impl Checks {
    fn get(&mut self, law: &str) -> &mut LawCheck {
        self.get_with(law, Coverage::Exhaustive)
    }

    fn get_with(&mut self, law: &str, coverage: Coverage) -> &mut LawCheck {
        let i = match self.0.iter().position(|c| c.law == law) {
            Some(i) => i,
            None => {
                self.0.push(LawCheck::new(law, coverage));
                self.0.len() - 1
            }
        };
        &mut self.0[i]
    }

    fn record(&mut self, law: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.get(law).record(ok, witness);
    }

    fn push(&mut self, check: LawCheck) {
        let coverage = check.coverage;
        let mine = self.get_with(&check.law, coverage);
        mine.passed += check.passed;
        mine.failed += check.failed;
        if mine.witness.is_none() {
            mine.witness = check.witness;
        }
        if let Coverage::Sampled { .. } = coverage {
            mine.coverage = coverage;
        }
    }

    fn merge(&mut self, other: Checks) {
        for c in other.0 {
            self.push(c);
        }
    }
}

/// Runs the whole comparison pipeline on every carrier `0..=max_x`.
///
/// Per carrier: enumerate the algebras, compute `L` of each, and check that
/// `e*` is a bijection and an algebra morphism, that the explicit inverse,
/// the retraction and (for every chosen `s0`) the section all invert it, and
/// that `|L(X,h)|^|S| = |X|`. Then for every `Y` with `|Y|^|S| ≤ max_x`,
/// check `ξ_Y` and its naturality. A carrier whose enumeration exceeds the
/// ceiling is reported as such and does not fail the run.
pub fn verify_monadicity(s_size: usize, max_x: usize, options: VerifyOptions) -> Result<Report> {
    let states = FinSet::new(s_size);
    if states.is_empty() {
        return Err(Error::EmptyState);
    }
    let s0_choices: Vec<usize> = match options.s0 {
        Some(s0) => vec![states.check(s0)?],
        None => states.elements().collect(),
    };
    let ctx = StateMonadCtx::with_point(states, s0_choices[0])?;

    let per_carrier: Vec<(CarrierReport, Checks)> = (0..=max_x)
        .into_par_iter()
        .map(|x| check_carrier(&ctx, FinSet::new(x), &s0_choices, &options))
        .collect::<Result<_>>()?;
    let mut checks = Checks::default();
    let mut carriers = Vec::new();
    for (report, c) in per_carrier {
        carriers.push(report);
        checks.merge(c);
    }

    let ys: Vec<usize> = (0..=max_x)
        .take_while(|&y| {
            FinSet::new(y)
                .power(states)
                .is_ok_and(|p| p.size() <= max_x)
        })
        .collect();
    checks.merge(check_lk(&ctx, &ys, &options)?);

    let passed = checks.0.iter().all(LawCheck::ok);
    Ok(Report {
        s_size,
        max_x,
        options,
        s0_choices,
        carriers,
        checks: checks.0,
        passed,
    })
}

fn predicted_count(s: usize, x: usize) -> usize {
    match crate::algebra::integer_root(x, s as u32) {
        Some(k) => (k + 1..=x).product(),
        None => 0,
    }
}

fn check_carrier(
    ctx: &StateMonadCtx,
    x: FinSet,
    s0_choices: &[usize],
    options: &VerifyOptions,
) -> Result<(CarrierReport, Checks)> {
    let mut checks = Checks::default();
    let n = ctx.states().size();
    let mut report = CarrierReport {
        x_size: x.size(),
        status: CarrierStatus::Checked,
        algebras: None,
        predicted: predicted_count(n, x.size()),
        iso_classes: None,
        y_sizes: Vec::new(),
        note: None,
    };
    checks.push(ctx.check_mu_theta_identity(x)?);

    let algebras = match enumerate_algebras(ctx, x, options.method, options.ceiling) {
        Ok(a) => a,
        Err(e @ Error::CeilingExceeded { .. }) => {
            report.status = CarrierStatus::GuardExceeded;
            report.note = Some(format!("{} search: {e}", options.method));
            return Ok((report, checks));
        }
        Err(e) => return Err(e),
    };
    report.algebras = Some(algebras.len());
    report.iso_classes = iso_classes(&algebras, options.ceiling)
        .ok()
        .map(|c| c.len());
    checks.record(
        "algebra count matches |X|!/k!",
        algebras.len() == report.predicted,
        || {
            format!(
                "|X|={x}: found {}, predicted {}",
                algebras.len(),
                report.predicted
            )
        },
    );

    for (i, alg) in algebras.iter().enumerate() {
        let at = |what: String| format!("|X|={x}, algebra #{i}: {what}");
        let data = l_obj(alg)?;
        report.y_sizes.push(data.y().size());
        let id_x = Morphism::identity(x);
        let ys = data.y().power(ctx.states())?;
        let id_ys = Morphism::identity(ys);

        checks.record(
            "m . e = f_X with e onto and m one-to-one",
            data.e().is_surjective()
                && data.m().is_injective()
                && compose(data.m(), data.e())? == *data.f_x(),
            || at("factorization".into()),
        );
        checks.record(
            "m^S . e* = (f_X)*",
            data.transpose_triangle_holds()?,
            || at("triangle".into()),
        );
        checks.record("|L(X,h)|^|S| = |X|", ys == x, || {
            at(format!("|Y| = {}", data.y()))
        });
        checks.record("e* is a bijection", data.e_star().is_bijective(), || {
            at(format!("e* = {}", data.e_star()))
        });
        let square = check_estar_morphism(&data)?;
        checks.record(
            "e* is an algebra morphism into K(Y)",
            square.is_ok(),
            || at(square.clone().unwrap_err().to_string()),
        );

        let inv = e_star_inverse(&data)?;
        let both = inv.then(data.e_star())? == id_ys && data.e_star().then(&inv)? == id_x;
        checks.record("explicit inverse of e* is two-sided", both, || {
            at(format!("inverse = {inv}"))
        });
        let r = retraction(&data)?;
        checks.record(
            "h . theta . m^S is a retraction of e*",
            data.e_star().then(&r)? == id_x,
            || at(format!("retraction = {r}")),
        );
        checks.record("retraction equals the explicit inverse", r == inv, || {
            at("retraction differs".into())
        });

        for &s0 in s0_choices {
            let pointed = alg.with_ctx(StateMonadCtx::with_point(ctx.states(), s0)?)?;
            let pdata = l_obj(&pointed)?;
            let sig = sigma(&pdata)?;
            checks.record(
                "e . sigma = id for every s0",
                sig.then(pdata.e())? == Morphism::identity(pdata.y()),
                || at(format!("s0 = {s0}")),
            );
            let big = section(&pdata)?;
            checks.record(
                "e* . Sigma = id for every s0",
                big.then(pdata.e_star())? == id_ys,
                || at(format!("s0 = {s0}")),
            );
            checks.record("Sigma equals the explicit inverse", big == inv, || {
                at(format!("s0 = {s0}"))
            });
        }

        let id = AlgebraMorphism::identity(alg);
        checks.record(
            "L(id) = id",
            l_mor(&id, &data, &data)? == Morphism::identity(data.y()),
            || at("L(id)".into()),
        );
    }
    Ok((report, checks))
}

fn check_lk(ctx: &StateMonadCtx, ys: &[usize], options: &VerifyOptions) -> Result<Checks> {
    let mut checks = Checks::default();
    let mut xis = Vec::new();
    for &y in ys {
        let y = FinSet::new(y);
        let k = k_obj(ctx, y)?;
        let data = l_obj(&k)?;
        let xi_y = xi(ctx, y)?;
        checks.record(
            "xi is a bijection and |LKY| = |Y|",
            xi_y.is_bijective() && data.y() == y,
            || format!("|Y|={y}: xi = {xi_y}"),
        );
        let ys_codec = ctx.power(y)?;
        let constants: Vec<usize> = y.elements().map(|v| ys_codec.constant(v)).collect();
        let mut image = data.m().table().to_vec();
        image.sort_unstable();
        let mut expected = constants.clone();
        expected.sort_unstable();
        checks.record(
            "image of m in Y^S is the constant maps",
            image == expected,
            || format!("|Y|={y}: image {image:?}"),
        );
        xis.push((y, k, data, xi_y));
    }
    for (y, _, data, xi_y) in &xis {
        for (y2, _, data2, xi_y2) in &xis {
            let (maps, how) = hom_sample(
                *y,
                *y2,
                NATURALITY_EXHAUSTIVE_LIMIT,
                NATURALITY_SAMPLES,
                options.seed,
            );
            let coverage = match how {
                HomSample::Exhaustive => Coverage::Exhaustive,
                HomSample::Sampled { seed } => Coverage::Sampled {
                    samples: NATURALITY_SAMPLES,
                    seed,
                },
            };
            let mut nat = LawCheck::new("xi is natural: v . xi = xi' . LK(v)", coverage);
            let mut kfun = LawCheck::new("K(v) is an algebra morphism", coverage);
            for v in maps {
                let kv = k_mor(ctx, &v);
                kfun.record(kv.is_ok(), || format!("v = {v}"));
                let Ok(kv) = kv else { continue };
                let lkv = l_mor(&kv, data, data2)?;
                let lhs = compose(&v, xi_y)?;
                let rhs = compose(xi_y2, &lkv)?;
                nat.record(lhs == rhs, || format!("v = {v}: {lhs} vs {rhs}"));
            }
            checks.push(nat);
            checks.push(kfun);
        }
    }
    Ok(checks)
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "comparison check for |S| = {}, carriers 0..={} ({} search, ceiling {})",
            self.s_size, self.max_x, self.options.method, self.options.ceiling
        );
        let _ = writeln!(out, "s0 choices: {:?}", self.s0_choices);
        let _ = writeln!(out);
        let _ = writeln!(out, " |X|   algebras  predicted     |Y|  status");
        for c in &self.carriers {
            let count = c.algebras.map_or("-".to_string(), |n| n.to_string());
            let mut y_sizes = c.y_sizes.clone();
            y_sizes.dedup();
            let ys = y_sizes
                .iter()
                .map(|y| y.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let status = match c.status {
                CarrierStatus::Checked => "checked".to_string(),
                CarrierStatus::GuardExceeded => {
                    format!("skipped: {}", c.note.as_deref().unwrap_or("guard exceeded"))
                }
            };
            let _ = writeln!(
                out,
                "{:>4}  {:>9}  {:>9}  {:>6}  {}",
                c.x_size,
                count,
                c.predicted,
                if ys.is_empty() { "-" } else { &ys },
                status
            );
        }
        let _ = writeln!(out);
        for c in &self.checks {
            let mark = if c.ok() { "PASS" } else { "FAIL" };
            let cov = match c.coverage {
                Coverage::Exhaustive => "exhaustive".to_string(),
                Coverage::Sampled { samples, seed } => {
                    format!("sampled {samples}/hom-set, seed {seed}")
                }
            };
            let _ = writeln!(
                out,
                "{mark}  {:<46} {:>7} passed {:>3} failed  ({cov})",
                c.law, c.passed, c.failed
            );
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "      witness: {w}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

/// What goes wrong with an empty state set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmptyStateDiagnosis {
    pub max_x: usize,
    /// Carrier sizes that admit at least one algebra.
    pub algebra_carriers: Vec<usize>,
    /// `|K(Y)|` for each `|Y| ≤ max_x`; always 1.
    pub k_carriers: Vec<usize>,
    /// `|LK(Y)|` for each `|Y| ≤ max_x`; always 0.
    pub lk_sizes: Vec<usize>,
    /// `(|Y|, |Y'|, |Hom(Y,Y')|, |Hom(KY,KY')|)` for the pairs that differ.
    pub hom_mismatches: Vec<(usize, usize, u128, u128)>,
    pub equivalence_fails: bool,
}

/// Exhibits why the comparison needs a nonempty state set. With `S = ∅`,
/// `TX = 1`, so only a one-element carrier admits an algebra, every `K(Y)`
/// is that algebra, and `L` sends it to the empty set: `LK ≇ 1`, and `K`
/// is neither full nor faithful.
pub fn diagnose_empty_state(max_x: usize, ceiling: u64) -> Result<EmptyStateDiagnosis> {
    let ctx = StateMonadCtx::without_point(FinSet::EMPTY);
    let mut algebra_carriers = Vec::new();
    for x in 0..=max_x {
        let x = FinSet::new(x);
        let found = all_morphisms(ctx.t_obj(x)?, x)
            .filter_map(|h| match check_algebra(&ctx, x, &h, ceiling) {
                Err(Error::NotAnAlgebra(_)) => None,
                other => Some(other),
            })
            .collect::<Result<Vec<TAlgebra>>>()?;
        if !found.is_empty() {
            algebra_carriers.push(x.size());
        }
    }
    let mut k_carriers = Vec::new();
    let mut lk_sizes = Vec::new();
    for y in 0..=max_x {
        let k = k_obj(&ctx, FinSet::new(y))?;
        k_carriers.push(k.carrier().size());
        lk_sizes.push(l_obj(&k)?.y().size());
    }
    let mut hom_mismatches = Vec::new();
    for y in 0..=max_x {
        for y2 in 0..=max_x {
            let hom = hom_count(FinSet::new(y), FinSet::new(y2)).unwrap_or(u128::MAX);
            let ky = FinSet::new(k_carriers[y]);
            let ky2 = FinSet::new(k_carriers[y2]);
            let khom = all_morphisms(ky, ky2)
                .filter(|u| {
                    let a = k_obj(&ctx, FinSet::new(y)).expect("built above");
                    let b = k_obj(&ctx, FinSet::new(y2)).expect("built above");
                    AlgebraMorphism::new(u.clone(), &a, &b).is_ok()
                })
                .count() as u128;
            if hom != khom {
                hom_mismatches.push((y, y2, hom, khom));
            }
        }
    }
    let equivalence_fails =
        lk_sizes.iter().enumerate().any(|(y, &l)| l != y) || !hom_mismatches.is_empty();
    Ok(EmptyStateDiagnosis {
        max_x,
        algebra_carriers,
        k_carriers,
        lk_sizes,
        hom_mismatches,
        equivalence_fails,
    })
}

impl EmptyStateDiagnosis {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "empty state set, carriers 0..={}", self.max_x);
        let _ = writeln!(
            out,
            "carriers admitting an algebra: {:?} (T X = 1 for every X)",
            self.algebra_carriers
        );
        let _ = writeln!(out, "|K(Y)| for |Y| = 0..: {:?}", self.k_carriers);
        let _ = writeln!(out, "|LK(Y)| for |Y| = 0..: {:?}", self.lk_sizes);
        for (y, y2, hom, khom) in &self.hom_mismatches {
            let _ = writeln!(
                out,
                "|Hom({y},{y2})| = {hom} but |Hom(K{y},K{y2})| = {khom}"
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.equivalence_fails {
                "K is not an equivalence: only one-element carriers carry algebras, and LK is not the identity"
            } else {
                "no failure found"
            }
        );
        out
    }
}
