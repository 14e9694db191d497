//! The lookup/update presentation of global state.
//!
//! Terms are built from variables, a lookup `l` with one branch per state and
//! updates `u_s`. Four equations govern them:
//!
//! ```text
//! u_s(u_t(x))            = u_t(x)
//! u_s(l(a_0, ..))        = u_s(a_s)
//! l(u_0(x), u_1(x), ..)  = x
//! l(l(a_00, ..), ..)     = l(a_00, a_11, ..)
//! ```
//!
//! Equality of terms is decided by denotation in the free algebra `TV`;
//! [`rewrite`] orients the equations left to right and is only a normalizer.

mod parse;
mod rewrite;
mod sigma;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::state_monad::{StateMonadCtx, TCodec};

pub use parse::{parse, ParseError, ParseErrorKind};
pub use rewrite::{rewrite, Rewrite, DEFAULT_STEP_LIMIT};
pub use sigma::{
    canonical_interpretation, sigma_to_t_algebra, t_algebra_to_sigma, EquationViolation,
    SigmaAlgebra,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Update(usize, Box<Term>),
    Lookup(Vec<Term>),
}

impl Term {
    pub fn update(state: usize, arg: Term) -> Term {
        Term::Update(state, Box::new(arg))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Update(_, t) => 1 + t.size(),
            Term::Lookup(bs) => 1 + bs.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Update(_, t) => 1 + t.depth(),
            Term::Lookup(bs) => 1 + bs.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// One more than the largest variable index, or 0 for a closed term.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(v) => v + 1,
            Term::Update(_, t) => t.var_bound(),
            Term::Lookup(bs) => bs.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "x{v}"),
            Term::Update(s, t) => write!(f, "u{s}({t})"),
            Term::Lookup(bs) => {
                f.write_str("l(")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{b}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// The denotation of `t` in `TV = (S×V)^S`, `|V| = nvars`, as a code.
///
/// Variables go to `η`, `u_σ(t)` to `λs.[t](σ)` and `l(b_0, ..)` to the
/// diagonal `λs.[b_s](s)`.
pub fn denote(ctx: &StateMonadCtx, t: &Term, nvars: usize) -> Result<usize> {
    let tv = ctx.t(FinSet::new(nvars))?;
    let f = denote_fn(ctx.states().size(), t, nvars)?;
    Ok(tv.encode_fn(|s| f[s]))
}

/// The denotation as an explicit function `S → S×V`.
pub fn denote_fn(states: usize, t: &Term, nvars: usize) -> Result<Vec<(usize, usize)>> {
    match t {
        Term::Var(v) if *v < nvars => Ok((0..states).map(|s| (s, *v)).collect()),
        Term::Var(v) => Err(Error::UnboundVariable { index: *v, nvars }),
        Term::Update(sigma, arg) => {
            if *sigma >= states {
                return Err(Error::ElementOutOfRange {
                    element: *sigma,
                    size: states,
                });
            }
            let inner = denote_fn(states, arg, nvars)?;
            Ok(vec![inner[*sigma]; states])
        }
        Term::Lookup(bs) => {
            if bs.len() != states {
                return Err(Error::CodecMismatch(format!(
                    "lookup with {} branches over {states} states",
                    bs.len()
                )));
            }
            bs.iter()
                .enumerate()
                .map(|(s, b)| Ok(denote_fn(states, b, nvars)?[s]))
                .collect()
        }
    }
}

/// Whether two terms are equal in the theory.
pub fn equal(ctx: &StateMonadCtx, a: &Term, b: &Term, nvars: usize) -> Result<bool> {
    Ok(denote(ctx, a, nvars)? == denote(ctx, b, nvars)?)
}

/// The four equations, expanded over all subscripts, as term pairs together
/// with the number of variables they use.
pub fn equations(states: usize) -> Vec<(&'static str, Term, Term, usize)> {
    let n = states;
    let mut out = Vec::new();
    for s in 0..n {
        for t in 0..n {
            out.push((
                "u_s(u_t(x)) = u_t(x)",
                Term::update(s, Term::update(t, Term::Var(0))),
                Term::update(t, Term::Var(0)),
                1,
            ));
        }
    }
    for s in 0..n {
        out.push((
            "u_s(l(a)) = u_s(a_s)",
            Term::update(s, Term::Lookup((0..n).map(Term::Var).collect())),
            Term::update(s, Term::Var(s)),
            n,
        ));
    }
    out.push((
        "l(u_s(x)) = x",
        Term::Lookup((0..n).map(|s| Term::update(s, Term::Var(0))).collect()),
        Term::Var(0),
        1,
    ));
    out.push((
        "l(l(a_st)) = l(a_ss)",
        Term::Lookup(
            (0..n)
                .map(|s| Term::Lookup((0..n).map(|t| Term::Var(s * n + t)).collect()))
                .collect(),
        ),
        Term::Lookup((0..n).map(|s| Term::Var(s * n + s)).collect()),
        n * n,
    ));
    out
}

/// A uniformly grown random term of depth at most `max_depth`.
pub fn random_term(rng: &mut impl Rng, states: usize, nvars: usize, max_depth: usize) -> Term {
    assert!(
        states > 0 && nvars > 0,
        "random terms need states and variables"
    );
    if max_depth == 0 || rng.gen_ratio(1, 4) {
        return Term::Var(rng.gen_range(0..nvars));
    }
    if rng.gen_bool(0.5) {
        Term::update(
            rng.gen_range(0..states),
            random_term(rng, states, nvars, max_depth - 1),
        )
    } else {
        Term::Lookup(
            (0..states)
                .map(|_| random_term(rng, states, nvars, max_depth - 1))
                .collect(),
        )
    }
}

/// Terms up to some depth, grouped by denotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeClasses {
    /// Number of classes after each level; `counts[0]` is the variables.
    pub counts: Vec<usize>,
    /// One least-size term per class, ordered by denotation code.
    pub representatives: Vec<(usize, Term)>,
}

impl FreeClasses {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// `|TV|`, the number of classes the free model predicts.
    pub fn predicted(ctx: &StateMonadCtx, nvars: usize) -> Result<usize> {
        Ok(ctx.t_obj(FinSet::new(nvars))?.size())
    }
}

/// Enumerates terms of depth up to `depth` over `nvars` variables modulo
/// equality. Denotation is compositional, so each level only needs to combine
/// one representative per class found so far.
pub fn free_classes(
    ctx: &StateMonadCtx,
    nvars: usize,
    depth: usize,
    ceiling: u64,
) -> Result<FreeClasses> {
    let n = ctx.states().size();
    if n == 0 {
        return Err(Error::EmptyState);
    }
    let tv: TCodec = ctx.t(FinSet::new(nvars))?;
    let key = |f: &[(usize, usize)]| tv.encode_fn(|s| f[s]);
    let better = |a: &Term, b: &Term| (a.size(), a.to_string()) < (b.size(), b.to_string());

    let mut classes: BTreeMap<usize, (Vec<(usize, usize)>, Term)> = BTreeMap::new();
    for v in 0..nvars {
        let f: Vec<_> = (0..n).map(|s| (s, v)).collect();
        classes.insert(key(&f), (f, Term::Var(v)));
    }
    let mut counts = vec![classes.len()];
    let mut work: u128 = 0;
    for _ in 0..depth {
        let reps: Vec<(Vec<(usize, usize)>, Term)> = classes.values().cloned().collect();
        let tuples = (reps.len() as u128).saturating_pow(n as u32);
        work = work.saturating_add(tuples + (n * reps.len()) as u128);
        if work > ceiling as u128 {
            return Err(Error::CeilingExceeded { work, ceiling });
        }
        let mut found: Vec<(Vec<(usize, usize)>, Term)> = Vec::new();
        for s in 0..n {
            for (f, t) in &reps {
                found.push((vec![f[s]; n], Term::update(s, t.clone())));
            }
        }
        if !reps.is_empty() {
            let mut idx = vec![0usize; n];
            loop {
                let f: Vec<_> = (0..n).map(|s| reps[idx[s]].0[s]).collect();
                let t = Term::Lookup(idx.iter().map(|&i| reps[i].1.clone()).collect());
                found.push((f, t));
                let mut s = 0;
                while s < n {
                    idx[s] += 1;
                    if idx[s] < reps.len() {
                        break;
                    }
                    idx[s] = 0;
                    s += 1;
                }
                if s == n {
                    break;
                }
            }
        }
        for (f, t) in found {
            let k = key(&f);
            match classes.get_mut(&k) {
                Some(entry) if better(&t, &entry.1) => entry.1 = t,
                Some(_) => {}
                None => {
                    classes.insert(k, (f, t));
                }
            }
        }
        counts.push(classes.len());
    }
    Ok(FreeClasses {
        counts,
        representatives: classes.into_iter().map(|(k, (_, t))| (k, t)).collect(),
    })
}
