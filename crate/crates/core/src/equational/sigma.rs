use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{check_algebra, TAlgebra};
use crate::error::{Error, Result};
use crate::finset::{diagonal, precompose, ExpCodec, FinSet, Morphism};
use crate::state_monad::StateMonadCtx;

/// A model of the four equations: `lookup : A^S → A` and one
/// `update_s : A → A` per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaAlgebra {
    states: FinSet,
    carrier: FinSet,
    lookup: Morphism,
    updates: Vec<Morphism>,
}

/// A failed equation with the elements that break it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquationViolation {
    /// `u_s(u_t(a)) ≠ u_t(a)`.
    UpdateUpdate { s: usize, t: usize, a: usize },
    /// `u_s(l(g)) ≠ u_s(g(s))`, `g` a code in `A^S`.
    UpdateLookup { s: usize, g: usize },
    /// `l(λs. u_s(a)) ≠ a`.
    LookupUpdate { a: usize },
    /// `l(λs. l(rows[s])) ≠ l(λs. rows[s](s))`, rows as codes in `A^S`.
    LookupLookup { rows: Vec<usize> },
}

impl fmt::Display for EquationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationViolation::UpdateUpdate { s, t, a } => {
                write!(f, "u{s}(u{t}(a)) != u{t}(a) at a = {a}")
            }
            EquationViolation::UpdateLookup { s, g } => {
                write!(f, "u{s}(l(g)) != u{s}(g({s})) at g = {g}")
            }
            EquationViolation::LookupUpdate { a } => write!(f, "l(u_s(a))_s != a at a = {a}"),
            EquationViolation::LookupLookup { rows } => {
                write!(f, "l(l(a_st)_t)_s != l(a_ss)_s at rows {rows:?}")
            }
        }
    }
}

impl SigmaAlgebra {
    /// Validates all four equations exhaustively, charging the work against
    /// `ceiling`.
    pub fn new(
        states: FinSet,
        carrier: FinSet,
        lookup: Morphism,
        updates: Vec<Morphism>,
        ceiling: u64,
    ) -> Result<Self> {
        let power = ExpCodec::new(carrier, states)?;
        if lookup.dom() != power.object() || lookup.cod() != carrier {
            return Err(Error::CodecMismatch(format!(
                "lookup must go {} -> {}, got {} -> {}",
                power.object(),
                carrier,
                lookup.dom(),
                lookup.cod()
            )));
        }
        if updates.len() != states.size()
            || updates
                .iter()
                .any(|u| u.dom() != carrier || u.cod() != carrier)
        {
            return Err(Error::CodecMismatch(format!(
                "expected {} updates on a carrier of size {}",
                states, carrier
            )));
        }
        let alg = SigmaAlgebra {
            states,
            carrier,
            lookup,
            updates,
        };
        match alg.violation(&power, ceiling)? {
            None => Ok(alg),
            Some(v) => Err(Error::NotASigmaAlgebra(v)),
        }
    }

    pub fn states(&self) -> FinSet {
        self.states
    }

    pub fn carrier(&self) -> FinSet {
        self.carrier
    }

    pub fn lookup(&self) -> &Morphism {
        &self.lookup
    }

    pub fn updates(&self) -> &[Morphism] {
        &self.updates
    }

    fn violation(&self, power: &ExpCodec, ceiling: u64) -> Result<Option<EquationViolation>> {
        let n = self.states.size();
        let (l, u) = (&self.lookup, &self.updates);

        for s in 0..n {
            for t in 0..n {
                for a in self.carrier.elements() {
                    if u[s].apply(u[t].apply(a)) != u[t].apply(a) {
                        return Ok(Some(EquationViolation::UpdateUpdate { s, t, a }));
                    }
                }
            }
        }
        for g in power.object().elements() {
            for (s, us) in u.iter().enumerate() {
                if us.apply(l.apply(g)) != us.apply(power.digit(g, s)) {
                    return Ok(Some(EquationViolation::UpdateLookup { s, g }));
                }
            }
        }
        for a in self.carrier.elements() {
            if l.apply(power.encode_fn(|s| u[s].apply(a))) != a {
                return Ok(Some(EquationViolation::LookupUpdate { a }));
            }
        }

        // The last equation ranges over all S×S families, far too many to
        // list. Rows are independent, so it suffices to range over the pairs
        // (l(row), row(s)) each row position can produce.
        let mut pairs: Vec<BTreeMap<(usize, usize), usize>> = vec![BTreeMap::new(); n];
        for row in power.object().elements() {
            let lr = l.apply(row);
            for (s, p) in pairs.iter_mut().enumerate() {
                p.entry((lr, power.digit(row, s))).or_insert(row);
            }
        }
        let pairs: Vec<Vec<((usize, usize), usize)>> =
            pairs.into_iter().map(|p| p.into_iter().collect()).collect();
        let work = pairs
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.len() as u128))
            .unwrap_or(u128::MAX);
        if work > ceiling as u128 {
            return Err(Error::CeilingExceeded { work, ceiling });
        }
        if pairs.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        let mut idx = vec![0usize; n];
        loop {
            let lhs = l.apply(power.encode_fn(|s| pairs[s][idx[s]].0 .0));
            let rhs = l.apply(power.encode_fn(|s| pairs[s][idx[s]].0 .1));
            if lhs != rhs {
                let rows = (0..n).map(|s| pairs[s][idx[s]].1).collect();
                return Ok(Some(EquationViolation::LookupLookup { rows }));
            }
            let mut s = 0;
            while s < n {
                idx[s] += 1;
                if idx[s] < pairs[s].len() {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
            if s == n {
                return Ok(None);
            }
        }
    }
}

/// The model on `B^S`: lookup is `B^δ` after `(B^S)^S ≅ B^{S×S}`, and
/// `update_s` is `B^!` after `B^s`.
pub fn canonical_interpretation(
    ctx: &StateMonadCtx,
    b: FinSet,
    ceiling: u64,
) -> Result<SigmaAlgebra> {
    let s = ctx.states();
    let n = s.size();
    let bs = ExpCodec::new(b, s)?;
    let bss = ExpCodec::new(bs.object(), s)?;
    let square = s.product(s)?;
    let b_sxs = ExpCodec::new(b, square)?;
    let curry_iso = Morphism::from_fn(bss.object(), b_sxs.object(), |g| {
        b_sxs.encode_fn(|i| bs.digit(bss.digit(g, i / n), i % n))
    })?;
    let lookup = curry_iso.then(&precompose(b, &diagonal(s)?)?)?;
    let bang = Morphism::constant(s, FinSet::ONE, 0)?;
    let updates = s
        .elements()
        .map(|st| {
            let pick = Morphism::new(FinSet::ONE, s, vec![st])?;
            precompose(b, &pick)?.then(&precompose(b, &bang)?)
        })
        .collect::<Result<Vec<_>>>()?;
    SigmaAlgebra::new(s, bs.object(), lookup, updates, ceiling)
}

/// `|l| = h ∘ θ_X` and `|u_s|(x) = h(λs'.(s, x))`.
pub fn t_algebra_to_sigma(alg: &TAlgebra, ceiling: u64) -> Result<SigmaAlgebra> {
    let ctx = alg.ctx();
    let x = alg.carrier();
    let h = alg.structure();
    let tx = alg.t_codec();
    let lookup = ctx.theta(x)?.then(h)?;
    let updates = ctx
        .states()
        .elements()
        .map(|s| Morphism::from_fn(x, x, |v| h.apply(tx.encode_fn(|_| (s, v)))))
        .collect::<Result<Vec<_>>>()?;
    SigmaAlgebra::new(ctx.states(), x, lookup, updates, ceiling)
}

/// `h(t) = |l|(λs. |u_{σ_s}|(x_s))` where `t = λs.(σ_s, x_s)`.
pub fn sigma_to_t_algebra(sig: &SigmaAlgebra, ceiling: u64) -> Result<TAlgebra> {
    let ctx = StateMonadCtx::new(sig.states);
    let x = sig.carrier;
    let tx = ctx.t(x)?;
    let power = ctx.power(x)?;
    let h = Morphism::from_fn(tx.object(), x, |t| {
        sig.lookup.apply(power.encode_fn(|s| {
            let (st, v) = tx.at(t, s);
            sig.updates[st].apply(v)
        }))
    })?;
    check_algebra(&ctx, x, &h, ceiling)
}
