use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_algebra, k_structure, search, TAlgebra};
use crate::error::{Error, Result};
use crate::finset::{hom_count, FinSet, Morphism};
use crate::state_monad::StateMonadCtx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every map `TX → X`, filtered by [`check_algebra`].
    Brute,
    /// Backtracking over the cells of `h` with propagation of associativity.
    Constrained,
    /// Conjugates of `ε_Y^S` along every bijection `X ≅ Y^S`.
    Transport,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Brute, Method::Constrained, Method::Transport];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Constrained => "constrained",
            Method::Transport => "transport",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown method `{s}` (expected brute, constrained or transport)")
            })
    }
}

/// All algebra structures on `x`, sorted by structure table.
///
/// Refuses an empty state set. Every method charges its work against
/// `ceiling` and fails with [`Error::CeilingExceeded`] rather than returning a
/// partial answer.
pub fn enumerate_algebras(
    ctx: &StateMonadCtx,
    x: FinSet,
    method: Method,
    ceiling: u64,
) -> Result<Vec<TAlgebra>> {
    if ctx.states().is_empty() {
        return Err(Error::EmptyState);
    }
    let tables = match method {
        Method::Brute => brute(ctx, x, ceiling)?,
        Method::Constrained => search::constrained(ctx, x, ceiling)?,
        Method::Transport => transport(ctx, x, ceiling)?,
    };
    let h_dom = ctx.t_obj(x)?;
    let mut out = tables
        .into_iter()
        .map(|table| {
            let h = Morphism::new(h_dom, x, table)?;
            check_algebra(ctx, x, &h, ceiling)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.structure().table().cmp(b.structure().table()));
    out.dedup();
    Ok(out)
}

fn brute(ctx: &StateMonadCtx, x: FinSet, ceiling: u64) -> Result<Vec<Vec<usize>>> {
    let tx = ctx.t(x)?;
    let total = hom_count(tx.object(), x).unwrap_or(u128::MAX);
    if total > ceiling as u128 {
        return Err(Error::CeilingExceeded {
            work: total,
            ceiling,
        });
    }
    let cells = tx.object().size();
    let radix = x.size();
    let h_dom = tx.object();
    let found: Vec<Option<Vec<usize>>> = (0..total as u64)
        .into_par_iter()
        .map(|index| {
            let mut rest = index as usize;
            let table: Vec<usize> = (0..cells)
                .map(|_| {
                    let d = rest % radix;
                    rest /= radix;
                    d
                })
                .collect();
            let h = Morphism::new(h_dom, x, table)?;
            match check_algebra(ctx, x, &h, ceiling) {
                Ok(alg) => Ok(Some(alg.structure().table().to_vec())),
                Err(Error::NotAnAlgebra(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// `k` with `k^n = size`, if any.
pub(crate) fn integer_root(size: usize, n: u32) -> Option<usize> {
    if n == 0 {
        return None;
    }
    (0..=size)
        .take_while(|&k| k.checked_pow(n).is_some_and(|p| p <= size))
        .find(|&k| k.pow(n) == size)
}

fn transport(ctx: &StateMonadCtx, x: FinSet, ceiling: u64) -> Result<Vec<Vec<usize>>> {
    let n = ctx.states().size() as u32;
    let Some(k) = integer_root(x.size(), n) else {
        return Ok(Vec::new());
    };
    let tx = ctx.t(x)?;
    let factorial = (1..=x.size() as u128).try_fold(1u128, |acc, i| acc.checked_mul(i));
    let work = factorial
        .and_then(|f| f.checked_mul(tx.object().size().max(1) as u128))
        .unwrap_or(u128::MAX);
    if work > ceiling as u128 {
        return Err(Error::CeilingExceeded { work, ceiling });
    }
    let y = FinSet::new(k);
    let ky = k_structure(ctx, y)?;
    // K(Y) has carrier Y^S, which has exactly |X| elements.
    let ty = ctx.t(ky.cod())?;
    let found: BTreeSet<Vec<usize>> = (0..x.size())
        .permutations(x.size())
        .map(|b| {
            let mut b_inv = vec![0; b.len()];
            for (i, &v) in b.iter().enumerate() {
                b_inv[v] = i;
            }
            tx.object()
                .elements()
                .map(|t| b_inv[ky.apply(ctx.t_map_at(&tx, &ty, |v| b[v], t))])
                .collect()
        })
        .collect();
    Ok(found.into_iter().collect())
}

/// An isomorphism class of algebras on a fixed carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoClass {
    /// Least structure table in the class.
    pub canonical: Vec<usize>,
    pub members: usize,
}

/// Groups algebras on a common carrier up to relabeling of the carrier:
/// `h ~ π ∘ h ∘ T(π⁻¹)`.
pub fn iso_classes(algebras: &[TAlgebra], ceiling: u64) -> Result<Vec<IsoClass>> {
    let Some(first) = algebras.first() else {
        return Ok(Vec::new());
    };
    let ctx = *first.ctx();
    let x = first.carrier();
    if algebras
        .iter()
        .any(|a| a.carrier() != x || a.ctx().states() != ctx.states())
    {
        return Err(Error::CodecMismatch(
            "iso classes need a common carrier".into(),
        ));
    }
    let tx = ctx.t(x)?;
    let perms: u128 = (1..=x.size() as u128).product();
    let work = perms
        .saturating_mul(tx.object().size() as u128)
        .saturating_mul(algebras.len() as u128);
    if work > ceiling as u128 {
        return Err(Error::CeilingExceeded { work, ceiling });
    }
    let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for alg in algebras {
        let h = alg.structure();
        let canonical = (0..x.size())
            .permutations(x.size())
            .map(|pi| {
                let mut pi_inv = vec![0; pi.len()];
                for (i, &v) in pi.iter().enumerate() {
                    pi_inv[v] = i;
                }
                tx.object()
                    .elements()
                    .map(|t| pi[h.apply(ctx.t_map_at(&tx, &tx, |v| pi_inv[v], t))])
                    .collect::<Vec<_>>()
            })
            .min()
            .unwrap_or_default();
        *classes.entry(canonical).or_default() += 1;
    }
    Ok(classes
        .into_iter()
        .map(|(canonical, members)| IsoClass { canonical, members })
        .collect())
}
