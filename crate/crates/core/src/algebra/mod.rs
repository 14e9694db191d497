//! Eilenberg–Moore algebras of the state monad.

mod enumerate;
mod search;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{evaluation, exponential_functor, FinSet, Morphism};
use crate::state_monad::{StateMonadCtx, TCodec};

pub(crate) use enumerate::integer_root;
pub use enumerate::{enumerate_algebras, iso_classes, IsoClass, Method};

/// Default bound on the work any single search or check may do.
pub const DEFAULT_CEILING: u64 = 10_000_000;

/// A carrier `X` with a structure map `h : TX → X` satisfying the unit and
/// associativity laws. Only obtainable through validation (or through
/// constructions that are algebras by construction, see [`k_structure`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TAlgebra {
    ctx: StateMonadCtx,
    carrier: FinSet,
    structure: Arc<Morphism>,
}

impl TAlgebra {
    pub fn ctx(&self) -> &StateMonadCtx {
        &self.ctx
    }

    pub fn carrier(&self) -> FinSet {
        self.carrier
    }

    pub fn structure(&self) -> &Morphism {
        &self.structure
    }

    pub(crate) fn new_unchecked(ctx: StateMonadCtx, carrier: FinSet, structure: Morphism) -> Self {
        TAlgebra {
            ctx,
            carrier,
            structure: Arc::new(structure),
        }
    }

    pub fn t_codec(&self) -> TCodec {
        self.ctx
            .t(self.carrier)
            .expect("structure map exists, so TX is encodable")
    }

    pub fn to_record(&self) -> AlgebraRecord {
        AlgebraRecord {
            s_size: self.ctx.states().size(),
            x_size: self.carrier.size(),
            h: self.structure.table().to_vec(),
        }
    }

    /// Same carrier and structure, different chosen element.
    pub fn with_ctx(&self, ctx: StateMonadCtx) -> Result<Self> {
        if ctx.states() != self.ctx.states() {
            return Err(Error::CodecMismatch(format!(
                "algebra over |S| = {} moved to |S| = {}",
                self.ctx.states(),
                ctx.states()
            )));
        }
        Ok(TAlgebra {
            ctx,
            ..self.clone()
        })
    }
}

/// Line format for algebra listings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraRecord {
    pub s_size: usize,
    pub x_size: usize,
    pub h: Vec<usize>,
}

impl AlgebraRecord {
    pub fn validate(self, ceiling: u64) -> Result<TAlgebra> {
        let ctx = StateMonadCtx::new(FinSet::new(self.s_size));
        let x = FinSet::new(self.x_size);
        let h = Morphism::new(ctx.t_obj(x)?, x, self.h)?;
        check_algebra(&ctx, x, &h, ceiling)
    }
}

/// A failed algebra law with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    /// `h(η(x)) ≠ x`.
    Unit { x: usize, got: usize },
    /// `h(T(h)(c)) ≠ h(μ(c))` for `c = λs.(states[s], inner[s])` in `TTX`.
    Associativity {
        states: Vec<usize>,
        inner: Vec<usize>,
        lhs: usize,
        rhs: usize,
    },
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawViolation::Unit { x, got } => {
                write!(f, "unit law fails at x = {x}: h(eta(x)) = {got}")
            }
            LawViolation::Associativity {
                states,
                inner,
                lhs,
                rhs,
            } => write!(
                f,
                "associativity fails at c = s -> (c[s], t[s]) with c = {states:?}, t = {inner:?}: \
                 h(T(h)(c)) = {lhs}, h(mu(c)) = {rhs}"
            ),
        }
    }
}

/// Validates `h : TX → X` as an algebra structure.
///
/// The associativity law quantifies over `TTX`, which outgrows memory and
/// patience quickly. It is checked over an equivalent, smaller domain: write
/// `c ∈ TTX` as `λs.(σ_s, t_s)`. Then `h(T(h)(c)) = h(l)` with
/// `l = λs.(σ_s, h(t_s))` and `h(μ(c)) = h(r)` with `r = λs. t_s(σ_s)`.
/// Since the `t_s` are independent, the pairs `(l, r)` that arise are exactly
/// those with `r(s) ∈ R(l(s))` for every `s`, where
/// `R(σ, y) = { t(σ) : t ∈ TX, h(t) = y }`. The work is `Σ_l Π_s |R(l(s))|`,
/// which is charged against `ceiling`.
pub fn check_algebra(
    ctx: &StateMonadCtx,
    x: FinSet,
    h: &Morphism,
    ceiling: u64,
) -> Result<TAlgebra> {
    let tx = ctx.t(x)?;
    if h.dom() != tx.object() || h.cod() != x {
        return Err(Error::CodecMismatch(format!(
            "structure map must go {} -> {}, got {} -> {}",
            tx.object(),
            x,
            h.dom(),
            h.cod()
        )));
    }
    if let Some(v) = unit_violation(ctx, &tx, h) {
        return Err(Error::NotAnAlgebra(v));
    }
    if let Some(v) = associativity_violation(&tx, h, ceiling)? {
        return Err(Error::NotAnAlgebra(v));
    }
    Ok(TAlgebra::new_unchecked(*ctx, x, h.clone()))
}

fn unit_violation(ctx: &StateMonadCtx, tx: &TCodec, h: &Morphism) -> Option<LawViolation> {
    tx.carrier().elements().find_map(|x| {
        let got = h.apply(ctx.eta_at(tx, x));
        (got != x).then_some(LawViolation::Unit { x, got })
    })
}

fn associativity_violation(
    tx: &TCodec,
    h: &Morphism,
    ceiling: u64,
) -> Result<Option<LawViolation>> {
    let n = tx.states().size();
    let pair = *tx.pair();
    let sx = pair.object().size();

    // reach[key] lists (r, representative t) for key = (σ, y).
    let mut reach: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sx];
    let mut seen = std::collections::HashSet::new();
    for t in tx.object().elements() {
        let y = h.apply(t);
        for sigma in 0..n {
            let r = tx.exp().digit(t, sigma);
            let key = pair.encode(sigma, y);
            if seen.insert((key, r)) {
                reach[key].push((r, t));
            }
        }
    }
    drop(seen);

    let mut work: u128 = 0;
    let mut digits = Vec::with_capacity(n);
    for l in tx.object().elements() {
        tx.exp().decode_into(l, &mut digits);
        let branch = digits
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(reach[d].len() as u128));
        work = work.saturating_add(branch.unwrap_or(u128::MAX));
        if work > ceiling as u128 {
            return Err(Error::CeilingExceeded { work, ceiling });
        }
    }

    let mut choice = vec![0usize; n];
    for l in tx.object().elements() {
        tx.exp().decode_into(l, &mut digits);
        if digits.iter().any(|&d| reach[d].is_empty()) {
            continue;
        }
        let hl = h.apply(l);
        choice.iter_mut().for_each(|c| *c = 0);
        loop {
            let r = tx.exp().encode_fn(|s| reach[digits[s]][choice[s]].0);
            let hr = h.apply(r);
            if hr != hl {
                let states = digits.iter().map(|&d| pair.decode(d).0).collect();
                let inner = (0..n).map(|s| reach[digits[s]][choice[s]].1).collect();
                return Ok(Some(LawViolation::Associativity {
                    states,
                    inner,
                    lhs: hl,
                    rhs: hr,
                }));
            }
            // odometer over the choices
            let mut s = 0;
            while s < n {
                choice[s] += 1;
                if choice[s] < reach[digits[s]].len() {
                    break;
                }
                choice[s] = 0;
                s += 1;
            }
            if s == n {
                break;
            }
        }
    }
    Ok(None)
}

/// The structure map `ε_Y^S : T(Y^S) → Y^S` of the comparison algebra on `Y`.
pub fn k_structure(ctx: &StateMonadCtx, y: FinSet) -> Result<Morphism> {
    exponential_functor(&evaluation(y, ctx.states())?, ctx.states())
}

/// The free algebra `(TX, μ_X)`, validated.
pub fn free_algebra(ctx: &StateMonadCtx, x: FinSet, ceiling: u64) -> Result<TAlgebra> {
    let tx = ctx.t_obj(x)?;
    check_algebra(ctx, tx, &ctx.mu(x)?, ceiling)
}

/// A commuting square `u ∘ h = h' ∘ T(u)` fails at `at ∈ TX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareViolation {
    pub at: usize,
    pub lhs: usize,
    pub rhs: usize,
}

impl fmt::Display for SquareViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "square fails at t = {}: u(h(t)) = {}, h'(T(u)(t)) = {}",
            self.at, self.lhs, self.rhs
        )
    }
}

/// A map of carriers commuting with the structure maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMorphism {
    source: TAlgebra,
    target: TAlgebra,
    map: Morphism,
}

impl AlgebraMorphism {
    pub fn new(map: Morphism, source: &TAlgebra, target: &TAlgebra) -> Result<Self> {
        check_morphism(&map, source, target)?.map_err(Error::NotAMorphism)?;
        Ok(AlgebraMorphism {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    pub fn identity(alg: &TAlgebra) -> Self {
        AlgebraMorphism {
            source: alg.clone(),
            target: alg.clone(),
            map: Morphism::identity(alg.carrier()),
        }
    }

    pub fn source(&self) -> &TAlgebra {
        &self.source
    }

    pub fn target(&self) -> &TAlgebra {
        &self.target
    }

    pub fn map(&self) -> &Morphism {
        &self.map
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        if next.source != self.target {
            return Err(Error::CompositionMismatch {
                cod: self.target.carrier().size(),
                dom: next.source.carrier().size(),
            });
        }
        Ok(AlgebraMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.then(&next.map)?,
        })
    }
}

/// Whether `u` is an algebra morphism; `Ok(Err(_))` carries the witness.
pub fn check_morphism(
    u: &Morphism,
    source: &TAlgebra,
    target: &TAlgebra,
) -> Result<std::result::Result<(), SquareViolation>> {
    if u.dom() != source.carrier() || u.cod() != target.carrier() {
        return Err(Error::CodecMismatch(format!(
            "map {} -> {} between carriers {} and {}",
            u.dom(),
            u.cod(),
            source.carrier(),
            target.carrier()
        )));
    }
    if source.ctx.states() != target.ctx.states() {
        return Err(Error::CodecMismatch(
            "algebras over different state sets".into(),
        ));
    }
    let src = source.t_codec();
    let dst = target.t_codec();
    let (h, h2) = (source.structure(), target.structure());
    for t in src.object().elements() {
        let lhs = u.apply(h.apply(t));
        let rhs = h2.apply(source.ctx.t_map_at(&src, &dst, |v| u.apply(v), t));
        if lhs != rhs {
            return Ok(Err(SquareViolation { at: t, lhs, rhs }));
        }
    }
    Ok(Ok(()))
}
