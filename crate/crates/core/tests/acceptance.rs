//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use monadlab::algebra::iso_classes;
use monadlab::equational::{
    canonical_interpretation, denote_fn, free_classes, random_term, rewrite, sigma_to_t_algebra,
    t_algebra_to_sigma, FreeClasses, SigmaAlgebra, Term, DEFAULT_STEP_LIMIT,
};
use monadlab::finset::{all_morphisms, curry, evaluation, product_morphism, uncurry};
use monadlab::monadicity::{
    check_estar_morphism, diagnose_empty_state, k_mor, k_obj, l_mor, l_obj, retraction, section,
    verify_monadicity, xi, VerifyOptions,
};
use monadlab::state_monad::Coverage;
use monadlab::{
    compose, enumerate_algebras, Error, FinSet, Method, Morphism, StateMonadCtx, TAlgebra,
};

const CEILING: u64 = 100_000_000;
const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;

fn set(n: usize) -> FinSet {
    FinSet::new(n)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

/// `y^n` for small numbers, as a plain integer.
fn pow(y: usize, n: usize) -> usize {
    y.pow(n as u32)
}

// ---- 1 ----------------------------------------------------------------------

fn adjunction() -> Outcome {
    let mut checks = 0u64;
    for s in 0..=3 {
        for x in 0..=3 {
            for y in 0..=3 {
                let (ss, xs, ys) = (set(s), set(x), set(y));
                let eps = evaluation(ys, ss).map_err(e)?;
                let id_s = Morphism::identity(ss);
                for f in all_morphisms(ss.product(xs).map_err(e)?, ys) {
                    let g = curry(&f, ss, xs).map_err(e)?;
                    // Oracle: g(x) is the little-endian code of s ↦ f(s, x).
                    for xi in 0..x {
                        let code: usize = (0..s).map(|si| f.apply(si * x + xi) * pow(y, si)).sum();
                        ensure(g.apply(xi) == code, || format!("curry({f}) at {xi}"))?;
                    }
                    ensure(uncurry(&g, ss, ys).map_err(e)? == f, || {
                        format!("uncurry . curry at {f}")
                    })?;
                    let counit = product_morphism(&id_s, &g)
                        .map_err(e)?
                        .then(&eps)
                        .map_err(e)?;
                    ensure(counit == f, || format!("counit law at {f}"))?;
                    checks += 3;
                }
                let ysx = ys.power(ss).map_err(e)?;
                for g in all_morphisms(xs, ysx) {
                    let f = uncurry(&g, ss, ys).map_err(e)?;
                    ensure(curry(&f, ss, xs).map_err(e)? == g, || {
                        format!("curry . uncurry at {g}")
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} morphism checks, |S|,|X|,|Y| <= 3"))
}

// ---- 2 ----------------------------------------------------------------------

fn monad_laws() -> Outcome {
    let mut cases: Vec<(usize, usize)> =
        (0..=3).flat_map(|s| (0..=2).map(move |x| (s, x))).collect();
    cases.extend((0..=2).map(|s| (s, 3)));
    let mut sampled = Vec::new();
    let mut tables = 0;
    for (s, x) in cases {
        let ctx = StateMonadCtx::new(set(s));
        let laws = ctx
            .check_monad_laws(set(x), 200_000_000, 20_000, SEED)
            .map_err(e)?;
        for law in &laws {
            ensure(law.ok(), || {
                format!("|S|={s} |X|={x}: {} fails: {:?}", law.law, law.witness)
            })?;
            if let Coverage::Sampled { samples, .. } = law.coverage {
                sampled.push(format!("|S|={s},|X|={x} {samples} samples"));
            }
        }
        // Table-for-table where both tables fit; the pointwise route check
        // above covers the rest.
        if let (Ok(mu), Ok(formula)) = (ctx.mu(set(x)), ctx.mu_formula(set(x))) {
            ensure(mu == formula, || {
                format!("mu tables differ at |S|={s} |X|={x}")
            })?;
            tables += 1;
        }
    }
    Ok(format!(
        "unit laws and both mu routes exhaustive; mu tables equal on {tables} carriers; associativity sampled at {}",
        sampled.join(", ")
    ))
}

// ---- 3, 4 -------------------------------------------------------------------

fn tables(algs: &[TAlgebra]) -> Vec<Vec<usize>> {
    algs.iter()
        .map(|a| a.structure().table().to_vec())
        .collect()
}

fn two_elements() -> Outcome {
    let ctx = StateMonadCtx::new(set(2));
    let brute = enumerate_algebras(&ctx, set(2), Method::Brute, CEILING).map_err(e)?;
    let cons = enumerate_algebras(&ctx, set(2), Method::Constrained, CEILING).map_err(e)?;
    ensure(brute.is_empty(), || {
        format!("brute force found {}", brute.len())
    })?;
    ensure(cons.is_empty(), || {
        format!("constrained search found {}", cons.len())
    })?;
    Ok("brute force over 65536 maps and constrained search both find 0".into())
}

fn four_elements() -> Result<(String, Vec<TAlgebra>), String> {
    let ctx = StateMonadCtx::new(set(2));
    let cons = enumerate_algebras(&ctx, set(4), Method::Constrained, CEILING).map_err(e)?;
    let tr = enumerate_algebras(&ctx, set(4), Method::Transport, CEILING).map_err(e)?;
    ensure(cons.len() == 12, || {
        format!("constrained search found {}", cons.len())
    })?;
    ensure(tables(&cons) == tables(&tr), || {
        "constrained and transport differ".into()
    })?;
    let classes = iso_classes(&cons, CEILING).map_err(e)?;
    Ok((
        format!(
            "12 identical algebras from both methods, {} iso class",
            classes.len()
        ),
        cons,
    ))
}

// ---- 5 ----------------------------------------------------------------------

fn comparison(alg: &TAlgebra) -> Result<(), String> {
    let n = alg.ctx().states().size();
    let x = alg.carrier();
    let data = l_obj(alg).map_err(e)?;
    let tag = || format!("|S|={n} |X|={x} h={:?}", alg.structure().table());
    ensure(data.e_star().is_bijective(), || {
        format!("e* not bijective, {}", tag())
    })?;
    let square = check_estar_morphism(&data).map_err(e)?;
    ensure(square.is_ok(), || {
        format!("e* square fails {square:?}, {}", tag())
    })?;
    let r = retraction(&data).map_err(e)?;
    ensure(
        compose(&r, data.e_star()).map_err(e)? == Morphism::identity(x),
        || format!("retraction fails, {}", tag()),
    )?;
    ensure(pow(data.y().size(), n) == x.size(), || {
        format!("|L|^|S| = {}^{n}, {}", data.y(), tag())
    })?;
    for s0 in 0..n {
        let pointed = alg
            .with_ctx(StateMonadCtx::with_point(set(n), s0).map_err(e)?)
            .map_err(e)?;
        let pdata = l_obj(&pointed).map_err(e)?;
        let sigma = section(&pdata).map_err(e)?;
        let ys = pdata.y().power(set(n)).map_err(e)?;
        ensure(
            compose(pdata.e_star(), &sigma).map_err(e)? == Morphism::identity(ys),
            || format!("section fails at s0={s0}, {}", tag()),
        )?;
    }
    Ok(())
}

fn comparison_suite(found: &[TAlgebra]) -> Outcome {
    let mut count = 0;
    for alg in found {
        comparison(alg)?;
        count += 1;
    }
    for s in 1..=3 {
        let ctx = StateMonadCtx::new(set(s));
        for y in 0..=3 {
            comparison(&k_obj(&ctx, set(y)).map_err(e)?)?;
            count += 1;
        }
    }
    Ok(format!(
        "{count} algebras ({} enumerated, {} of the form K(Y)), every s0",
        found.len(),
        count - found.len()
    ))
}

// ---- 6 ----------------------------------------------------------------------

fn mu_theta() -> Outcome {
    let mut points = 0;
    for s in 0..=3 {
        let ctx = StateMonadCtx::new(set(s));
        for x in 0..=3 {
            let c = ctx.check_mu_theta_identity(set(x)).map_err(e)?;
            ensure(c.ok(), || format!("|S|={s} |X|={x}: {:?}", c.witness))?;
            points += c.passed;
        }
    }
    Ok(format!("{points} points, |S|,|X| <= 3"))
}

// ---- 7 ----------------------------------------------------------------------

fn xi_suite() -> Outcome {
    let mut squares = 0;
    for s in 1..=3 {
        let ctx = StateMonadCtx::new(set(s));
        let mut data = Vec::new();
        for y in 0..=3 {
            let ys = set(y);
            let lk = l_obj(&k_obj(&ctx, ys).map_err(e)?).map_err(e)?;
            let x = xi(&ctx, ys).map_err(e)?;
            ensure(x.is_bijective() && x.cod() == ys, || {
                format!("xi not iso at |S|={s} |Y|={y}")
            })?;
            // Oracle: the constant map at v has code v·(1 + y + .. + y^{s-1}).
            let mut constants: Vec<usize> = (0..y)
                .map(|v| (0..s).map(|i| v * pow(y, i)).sum())
                .collect();
            constants.sort_unstable();
            let mut image = lk.m().table().to_vec();
            image.sort_unstable();
            ensure(image == constants, || {
                format!("image {image:?} at |S|={s} |Y|={y}")
            })?;
            data.push((ys, lk, x));
        }
        for (y, d, x) in &data {
            for (y2, d2, x2) in &data {
                // Every hom-set here has at most 27 elements.
                for v in all_morphisms(*y, *y2) {
                    let kv = k_mor(&ctx, &v).map_err(e)?;
                    let lkv = l_mor(&kv, d, d2).map_err(e)?;
                    ensure(
                        compose(&v, x).map_err(e)? == compose(x2, &lkv).map_err(e)?,
                        || format!("naturality fails at |S|={s}, v = {v}"),
                    )?;
                    squares += 1;
                }
            }
        }
    }
    Ok(format!(
        "iso and image checks for 12 pairs (S, Y); {squares} naturality squares, all morphisms"
    ))
}

// ---- 8 ----------------------------------------------------------------------

fn digit(code: usize, base: usize, i: usize) -> usize {
    (code / pow(base, i)) % base
}

/// All four equations by direct evaluation of the tables. Returns the number
/// of instances checked and whether the nested-lookup equation was exhaustive.
fn naive_equations(sig: &SigmaAlgebra) -> Result<(u128, bool), String> {
    let n = sig.states().size();
    let a = sig.carrier().size();
    let l = sig.lookup();
    let u = sig.updates();
    let encode = |f: &dyn Fn(usize) -> usize| (0..n).map(|s| f(s) * pow(a, s)).sum::<usize>();
    let mut count = 0u128;
    for v in 0..a {
        for s in 0..n {
            for t in 0..n {
                ensure(u[s].apply(u[t].apply(v)) == u[t].apply(v), || {
                    format!("u{s}u{t} at {v}")
                })?;
                count += 1;
            }
        }
        ensure(l.apply(encode(&|s| u[s].apply(v))) == v, || {
            format!("l(u_s) at {v}")
        })?;
        count += 1;
    }
    let power = pow(a, n);
    for g in 0..power {
        for (s, us) in u.iter().enumerate() {
            ensure(us.apply(l.apply(g)) == us.apply(digit(g, a, s)), || {
                format!("u{s}(l) at {g}")
            })?;
            count += 1;
        }
    }
    // Rows r_0..r_{n-1} in A^S, enumerated as one mixed-radix index.
    let rows_total = (power as u128).pow(n as u32);
    let check_rows = |idx: u128| -> bool {
        let rows: Vec<usize> = (0..n)
            .map(|s| ((idx / (power as u128).pow(s as u32)) % power as u128) as usize)
            .collect();
        let lhs = l.apply(encode(&|s| l.apply(rows[s])));
        let rhs = l.apply(encode(&|s| digit(rows[s], a, s)));
        lhs == rhs
    };
    const NAIVE_LIMIT: u128 = 200_000_000;
    let exhaustive = rows_total <= NAIVE_LIMIT;
    if exhaustive {
        let bad = (0..rows_total as u64)
            .into_par_iter()
            .find_any(|&i| !check_rows(i as u128));
        ensure(bad.is_none(), || format!("l(l) at rows index {bad:?}"))?;
        count += rows_total;
    } else {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..1_000_000 {
            let i = rng.gen_range(0..rows_total);
            ensure(check_rows(i), || format!("l(l) at rows index {i}"))?;
        }
        count += 1_000_000;
    }
    Ok((count, exhaustive))
}

/// Independent evaluator: run a term from state `s`.
fn run(t: &Term, s: usize) -> (usize, usize) {
    match t {
        Term::Var(v) => (s, *v),
        Term::Update(s2, arg) => run(arg, *s2),
        Term::Lookup(bs) => run(&bs[s], s),
    }
}

fn equational_suite() -> Outcome {
    let mut instances = 0u128;
    let mut sampled = Vec::new();
    for s in 1..=3 {
        let ctx = StateMonadCtx::new(set(s));
        for b in 0..=3 {
            // The constructor validates all four equations exhaustively.
            let sig = canonical_interpretation(&ctx, set(b), CEILING).map_err(e)?;
            let (count, exhaustive) =
                naive_equations(&sig).map_err(|m| format!("|S|={s} |B|={b}: {m}"))?;
            instances += count;
            if !exhaustive {
                sampled.push(format!("|S|={s},|B|={b}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..1000 {
        let n = 1 + i % 3;
        let t = random_term(&mut rng, n, 3, 6);
        let r = rewrite(&t, n, DEFAULT_STEP_LIMIT).map_err(e)?;
        let oracle: Vec<_> = (0..n).map(|s| run(&t, s)).collect();
        let after: Vec<_> = (0..n).map(|s| run(&r.term, s)).collect();
        ensure(oracle == after, || {
            format!("rewrite changed {t} into {}", r.term)
        })?;
        ensure(denote_fn(n, &t, 3).map_err(e)? == oracle, || {
            format!("denotation of {t}")
        })?;
    }

    let mut counts = Vec::new();
    for (s, vars, want) in [(2, 1, 4), (2, 2, 16), (1, 2, 2)] {
        let ctx = StateMonadCtx::new(set(s));
        let d3 = free_classes(&ctx, vars, 3, CEILING).map_err(e)?;
        let d4 = free_classes(&ctx, vars, 4, CEILING).map_err(e)?;
        let predicted = FreeClasses::predicted(&ctx, vars).map_err(e)?;
        ensure(
            d3.count() == want && d4.count() == want && predicted == want,
            || {
                format!(
                    "|S|={s}, {vars} vars: {} / {} classes, want {want}",
                    d3.count(),
                    d4.count()
                )
            },
        )?;
        counts.push(want.to_string());
    }
    Ok(format!(
        "{instances} equation instances ({}); 1000 rewrites keep their meaning; free classes {}",
        if sampled.is_empty() {
            "all exhaustive".to_string()
        } else {
            format!("nested lookup sampled 1e6 at {}", sampled.join(", "))
        },
        counts.join("/")
    ))
}

// ---- 9 ----------------------------------------------------------------------

fn round_trips(twelve: &[TAlgebra]) -> Outcome {
    let mut n = 0;
    for alg in twelve {
        let sig = t_algebra_to_sigma(alg, CEILING).map_err(e)?;
        let back = sigma_to_t_algebra(&sig, CEILING).map_err(e)?;
        ensure(&back == alg, || {
            format!("algebra round trip fails at {:?}", alg.structure().table())
        })?;
        n += 1;
    }
    for s in 1..=2 {
        let ctx = StateMonadCtx::new(set(s));
        for b in 0..=2 {
            let sig = canonical_interpretation(&ctx, set(b), CEILING).map_err(e)?;
            let alg = sigma_to_t_algebra(&sig, CEILING).map_err(e)?;
            let back = t_algebra_to_sigma(&alg, CEILING).map_err(e)?;
            ensure(back == sig, || {
                format!("model round trip fails at |S|={s} |B|={b}")
            })?;
            n += 1;
        }
    }
    Ok(format!("{n} round trips are identities"))
}

// ---- 10 ---------------------------------------------------------------------

fn empty_state() -> Outcome {
    let refused = verify_monadicity(0, 2, VerifyOptions::default());
    ensure(refused == Err(Error::EmptyState), || {
        format!("verify returned {refused:?}")
    })?;
    let d = diagnose_empty_state(3, CEILING).map_err(e)?;
    ensure(d.algebra_carriers == vec![1], || {
        format!("carriers {:?}", d.algebra_carriers)
    })?;
    ensure(d.equivalence_fails, || "diagnostic found no failure".into())?;
    Ok(format!(
        "verify refuses; only carrier size 1 admits an algebra; |LKY| = {:?}",
        d.lk_sizes
    ))
}

// ---- harness ----------------------------------------------------------------

struct Line {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
}

fn report(line: Line, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let took = start.elapsed();
    let slow = line.limit.is_some_and(|l| took > l);
    let (mark, detail) = match (&outcome, slow) {
        (Ok(d), false) => ("PASS", d.clone()),
        (Ok(d), true) => ("FAIL", format!("{d}; over the time limit")),
        (Err(m), _) => ("FAIL", m.clone()),
    };
    let limit = line
        .limit
        .map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
    println!(
        "{mark} [{:>2}] {:<34} {:>8.2}s{limit}  {detail}",
        line.id,
        line.name,
        took.as_secs_f64()
    );
    mark == "PASS"
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut ok = true;
    let mut twelve = Vec::new();
    ok &= report(
        Line {
            id: 1,
            name: "adjunction",
            limit: secs(10),
        },
        adjunction,
    );
    ok &= report(
        Line {
            id: 2,
            name: "monad laws",
            limit: None,
        },
        monad_laws,
    );
    ok &= report(
        Line {
            id: 3,
            name: "classification |S|=2 |X|=2",
            limit: secs(5),
        },
        two_elements,
    );
    ok &= report(
        Line {
            id: 4,
            name: "classification |S|=2 |X|=4",
            limit: secs(60),
        },
        || {
            four_elements().map(|(d, algs)| {
                twelve = algs;
                d
            })
        },
    );
    ok &= report(
        Line {
            id: 5,
            name: "comparison on found algebras",
            limit: None,
        },
        || comparison_suite(&twelve),
    );
    ok &= report(
        Line {
            id: 6,
            name: "mu . theta . (q*)^* = eta",
            limit: None,
        },
        mu_theta,
    );
    ok &= report(
        Line {
            id: 7,
            name: "xi iso, natural, constant image",
            limit: None,
        },
        xi_suite,
    );
    ok &= report(
        Line {
            id: 8,
            name: "equational suite",
            limit: None,
        },
        equational_suite,
    );
    ok &= report(
        Line {
            id: 9,
            name: "translation round trips",
            limit: None,
        },
        || round_trips(&twelve),
    );
    ok &= report(
        Line {
            id: 10,
            name: "empty state negative control",
            limit: None,
        },
        empty_state,
    );
    if ok {
        println!("acceptance: all criteria PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL");
        ExitCode::FAILURE
    }
}
