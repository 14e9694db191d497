//! The state monad `T = (S × −)^S` over a fixed finite `S`.
//!
//! Every structure map comes in two flavours: a table builder (`eta`, `mu`,
//! `theta`, ...) that assembles the map from the cartesian closed primitives
//! in [`crate::finset`], and a pointwise evaluator (`eta_at`, `mu_at`, ...)
//! that works directly on codes. The pointwise forms are what make objects
//! like `T(T(X))` at `|S| = 3` usable, where a dense table would not fit in
//! memory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finset::{
    self, curry, evaluation, exponential_functor, pairing, precompose, product_morphism, unit_iso,
    ExpCodec, FinSet, Morphism, ProductCodec,
};

/// Encoding of `T(X) = (S×X)^S`: an element is a function `S → S×X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TCodec {
    pair: ProductCodec,
    exp: ExpCodec,
}

impl TCodec {
    pub fn new(states: FinSet, carrier: FinSet) -> Result<Self> {
        let pair = ProductCodec::new(states, carrier)?;
        let exp = ExpCodec::new(pair.object(), states)?;
        Ok(TCodec { pair, exp })
    }

    pub fn states(&self) -> FinSet {
        self.pair.left()
    }

    pub fn carrier(&self) -> FinSet {
        self.pair.right()
    }

    /// The object `T(X)`.
    pub fn object(&self) -> FinSet {
        self.exp.object()
    }

    /// The codec of `S×X`.
    pub fn pair(&self) -> &ProductCodec {
        &self.pair
    }

    pub fn exp(&self) -> &ExpCodec {
        &self.exp
    }

    /// `t(s)`, split into `(state, value)`.
    #[inline]
    pub fn at(&self, code: usize, s: usize) -> (usize, usize) {
        self.pair.decode(self.exp.digit(code, s))
    }

    #[inline]
    pub fn encode_fn(&self, mut f: impl FnMut(usize) -> (usize, usize)) -> usize {
        self.exp.encode_fn(|s| {
            let (state, value) = f(s);
            self.pair.encode(state, value)
        })
    }

    pub fn decode(&self, code: usize) -> Vec<(usize, usize)> {
        (0..self.states().size())
            .map(|s| self.at(code, s))
            .collect()
    }
}

/// A finite state set `S`, optionally with a chosen element `s0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StateMonadCtx {
    states: FinSet,
    s0: Option<usize>,
}

impl StateMonadCtx {
    /// Chooses `s0 = 0` whenever `S` is nonempty.
    pub fn new(states: FinSet) -> Self {
        StateMonadCtx {
            states,
            s0: (!states.is_empty()).then_some(0),
        }
    }

    pub fn with_point(states: FinSet, s0: usize) -> Result<Self> {
        states.check(s0)?;
        Ok(StateMonadCtx {
            states,
            s0: Some(s0),
        })
    }

    pub fn without_point(states: FinSet) -> Self {
        StateMonadCtx { states, s0: None }
    }

    pub fn states(&self) -> FinSet {
        self.states
    }

    pub fn s0(&self) -> Option<usize> {
        self.s0
    }

    pub fn point(&self) -> Result<usize> {
        self.s0.ok_or(Error::MissingPoint)
    }

    /// Codec of `S × X`.
    pub fn pair(&self, x: FinSet) -> Result<ProductCodec> {
        ProductCodec::new(self.states, x)
    }

    /// Codec of `X^S`.
    pub fn power(&self, x: FinSet) -> Result<ExpCodec> {
        ExpCodec::new(x, self.states)
    }

    pub fn t(&self, x: FinSet) -> Result<TCodec> {
        TCodec::new(self.states, x)
    }

    /// `T(X)`, of size `(|S|·|X|)^|S|`.
    pub fn t_obj(&self, x: FinSet) -> Result<FinSet> {
        Ok(self.t(x)?.object())
    }

    // ---- pointwise evaluators -------------------------------------------

    /// `η_X(x) = λs.(s, x)`.
    #[inline]
    pub fn eta_at(&self, tx: &TCodec, x: usize) -> usize {
        tx.encode_fn(|s| (s, x))
    }

    /// `μ_X` on codes, following the nested-lambda description: an element
    /// `λs.(c[s], λs'.(c'[s,s'], f[s,s']))` of `TTX` goes to
    /// `λs.(c'[s, c[s]], f[s, c[s]])`.
    #[inline]
    pub fn mu_at(&self, ttx: &TCodec, tx: &TCodec, code: usize) -> usize {
        tx.encode_fn(|s| {
            let (c, inner) = ttx.at(code, s);
            tx.at(inner, c)
        })
    }

    /// `T(f)` on codes: `λs.(c[s], x[s]) ↦ λs.(c[s], f(x[s]))`.
    #[inline]
    pub fn t_map_at(
        &self,
        src: &TCodec,
        dst: &TCodec,
        f: impl Fn(usize) -> usize,
        code: usize,
    ) -> usize {
        dst.encode_fn(|s| {
            let (c, x) = src.at(code, s);
            (c, f(x))
        })
    }

    /// `θ_Z(g) = λs.(s, g(s))`.
    #[inline]
    pub fn theta_at(&self, zs: &ExpCodec, tz: &TCodec, g: usize) -> usize {
        tz.encode_fn(|s| (s, zs.digit(g, s)))
    }

    /// `γ_Z(g) = g(s0)`.
    pub fn gamma_at(&self, zs: &ExpCodec, g: usize) -> Result<usize> {
        Ok(zs.digit(g, self.point()?))
    }

    /// `q*_Z(z)`: the constant function at `z`.
    #[inline]
    pub fn q_star_at(&self, zs: &ExpCodec, z: usize) -> usize {
        zs.constant(z)
    }

    // ---- table builders ---------------------------------------------------

    /// `p_X : S×X → S`.
    pub fn p(&self, x: FinSet) -> Result<Morphism> {
        finset::fst(self.states, x)
    }

    /// `q_X : S×X → X`.
    pub fn q(&self, x: FinSet) -> Result<Morphism> {
        finset::snd(self.states, x)
    }

    /// `q*_X : X → X^S`, the transpose of the projection.
    pub fn q_star(&self, x: FinSet) -> Result<Morphism> {
        curry(&self.q(x)?, self.states, x)
    }

    /// `Δ : S → S×S`.
    pub fn diagonal(&self) -> Result<Morphism> {
        finset::diagonal(self.states)
    }

    /// `T(f) = (S × f)^S`.
    pub fn t_mor(&self, f: &Morphism) -> Result<Morphism> {
        let sf = product_morphism(&Morphism::identity(self.states), f)?;
        exponential_functor(&sf, self.states)
    }

    /// `η_X`, as the transpose of `id_{S×X}`.
    pub fn eta(&self, x: FinSet) -> Result<Morphism> {
        let sx = self.pair(x)?.object();
        curry(&Morphism::identity(sx), self.states, x)
    }

    /// `μ_X = (ε_{S×X})^S`.
    pub fn mu(&self, x: FinSet) -> Result<Morphism> {
        let sx = self.pair(x)?.object();
        exponential_functor(&evaluation(sx, self.states)?, self.states)
    }

    /// `μ_X` tabulated from [`Self::mu_at`]; an independent route to [`Self::mu`].
    pub fn mu_formula(&self, x: FinSet) -> Result<Morphism> {
        let tx = self.t(x)?;
        let ttx = self.t(tx.object())?;
        Morphism::from_fn(ttx.object(), tx.object(), |c| self.mu_at(&ttx, &tx, c))
    }

    /// `θ_Z = ⟨p_{Z^S}, ε_Z⟩^* : Z^S → T(Z)`.
    pub fn theta(&self, z: FinSet) -> Result<Morphism> {
        let zs = self.power(z)?.object();
        let pe = pairing(&self.p(zs)?, &evaluation(z, self.states)?)?;
        curry(&pe, self.states, zs)
    }

    /// `γ_Z : Z^S → Z`, the composite of `Z^{s0}` with `Z^1 ≅ Z`.
    pub fn gamma(&self, z: FinSet) -> Result<Morphism> {
        let s0 = Morphism::new(FinSet::ONE, self.states, vec![self.point()?])?;
        precompose(z, &s0)?.then(&unit_iso(z)?)
    }

    // ---- law checks -------------------------------------------------------

    /// Checks the unit laws, associativity, and agreement of the two `μ`
    /// routes on the carrier `x`.
    ///
    /// Associativity lives on `T³X`, which is astronomically large once
    /// `|S| = 3`; it is checked exhaustively when `|T³X| ≤ exhaustive_limit`
    /// and on `samples` seeded random elements otherwise.
    pub fn check_monad_laws(
        &self,
        x: FinSet,
        exhaustive_limit: u128,
        samples: usize,
        seed: u64,
    ) -> Result<Vec<LawCheck>> {
        let tx = self.t(x)?;
        let ttx = self.t(tx.object())?;
        let mut out = Vec::new();

        let mut left = LawCheck::new("left unit: mu . eta_T = id", Coverage::Exhaustive);
        let mut right = LawCheck::new("right unit: mu . T(eta) = id", Coverage::Exhaustive);
        for t in tx.object().elements() {
            let via_eta_t = self.mu_at(&ttx, &tx, self.eta_at(&ttx, t));
            left.record(via_eta_t == t, || format!("t = {t} gives {via_eta_t}"));
            let t_eta = self.t_map_at(&tx, &ttx, |v| self.eta_at(&tx, v), t);
            let via_t_eta = self.mu_at(&ttx, &tx, t_eta);
            right.record(via_t_eta == t, || format!("t = {t} gives {via_t_eta}"));
        }
        out.push(left);
        out.push(right);

        out.push(self.check_mu_routes(x)?);
        out.push(self.check_associativity(x, exhaustive_limit, samples, seed)?);
        Ok(out)
    }

    /// Compares `(ε_{S×X})^S` against the nested-lambda formula on all of `TTX`.
    pub fn check_mu_routes(&self, x: FinSet) -> Result<LawCheck> {
        let tx = self.t(x)?;
        let ttx = self.t(tx.object())?;
        let eval = evaluation(tx.pair().object(), self.states)?;
        let outer = ttx.exp();
        Ok(par_law(
            "mu: (eps_SxX)^S agrees with formula",
            ttx.object().size() as u128,
            || (),
            |_, c| {
                let c = c as usize;
                let categorical = tx.exp().encode_fn(|s| eval.apply(outer.digit(c, s)));
                let formula = self.mu_at(&ttx, &tx, c);
                (categorical != formula).then(|| format!("c = {c}: {categorical} vs {formula}"))
            },
        ))
    }

    /// `μ ∘ μ_T = μ ∘ T(μ)` on `T³X`.
    pub fn check_associativity(
        &self,
        x: FinSet,
        exhaustive_limit: u128,
        samples: usize,
        seed: u64,
    ) -> Result<LawCheck> {
        let tx = self.t(x)?;
        let ttx = self.t(tx.object())?;
        let n = self.states.size();
        // An element of T³X is a function S → S × TTX, kept unencoded.
        let outer_base = (n as u128) * (ttx.object().size() as u128);
        let t3_size = outer_base.checked_pow(n as u32);

        let eval_both = |c3: &[(usize, usize)]| -> (usize, usize) {
            // μ_{TX}(c3) ∈ TTX, then μ_X.
            let flat = ttx.encode_fn(|s| {
                let (sigma, inner) = c3[s];
                ttx.at(inner, sigma)
            });
            let lhs = self.mu_at(&ttx, &tx, flat);
            // T(μ_X)(c3) ∈ TTX, then μ_X.
            let mapped = ttx.encode_fn(|s| {
                let (sigma, inner) = c3[s];
                (sigma, self.mu_at(&ttx, &tx, inner))
            });
            let rhs = self.mu_at(&ttx, &tx, mapped);
            (lhs, rhs)
        };

        let name = "associativity: mu . mu_T = mu . T(mu)";
        match t3_size {
            Some(total) if total <= exhaustive_limit || total <= 1 => {
                let inner_size = ttx.object().size() as u128;
                Ok(par_law(
                    name,
                    total,
                    || vec![(0usize, 0usize); n],
                    |c3, code| {
                        let mut rest = code;
                        for slot in c3.iter_mut() {
                            let digit = rest % outer_base;
                            rest /= outer_base;
                            *slot = ((digit / inner_size) as usize, (digit % inner_size) as usize);
                        }
                        let (lhs, rhs) = eval_both(c3);
                        (lhs != rhs).then(|| format!("{c3:?}: {lhs} vs {rhs}"))
                    },
                ))
            }
            _ => {
                // Here n ≥ 1 and TTX is nonempty, otherwise |T³X| ≤ 1.
                let mut check = LawCheck::new(name, Coverage::Sampled { samples, seed });
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut c3 = vec![(0usize, 0usize); n];
                for _ in 0..samples {
                    for slot in c3.iter_mut() {
                        *slot = (rng.gen_range(0..n), rng.gen_range(0..ttx.object().size()));
                    }
                    let (lhs, rhs) = eval_both(&c3);
                    check.record(lhs == rhs, || format!("{c3:?}: {lhs} vs {rhs}"));
                }
                Ok(check)
            }
        }
    }

    /// `μ_X ∘ θ_{TX} ∘ (q*_{S×X})^* = η_X`, pointwise on `X`.
    ///
    /// `(q*_{S×X})^*` is built as a table (its domain is just `X`); `θ_{TX}`
    /// and `μ_X` are evaluated pointwise.
    pub fn check_mu_theta_identity(&self, x: FinSet) -> Result<LawCheck> {
        let tx = self.t(x)?;
        let ttx = self.t(tx.object())?;
        let txs = self.power(tx.object())?;
        let q_star_sx = self.q_star(tx.pair().object())?;
        let transposed = curry(&q_star_sx, self.states, x)?;
        let mut check = LawCheck::new("mu . theta_T . (q*)^* = eta", Coverage::Exhaustive);
        for v in x.elements() {
            let psi = self.theta_at(&txs, &ttx, transposed.apply(v));
            let got = self.mu_at(&ttx, &tx, psi);
            let want = self.eta_at(&tx, v);
            check.record(got == want, || format!("x = {v}: {got} vs {want}"));
        }
        Ok(check)
    }

    /// `⟨p_X, q*_{S×X}⟩ = (S × q*_{S×X}) ∘ (Δ × X)`, as tables on `S×X`.
    pub fn check_phi_decomposition(&self, x: FinSet) -> Result<LawCheck> {
        let sx = self.pair(x)?.object();
        let q_star_sx = self.q_star(sx)?;
        let lhs = pairing(&self.p(x)?, &q_star_sx)?;
        let delta_x = product_morphism(&self.diagonal()?, &Morphism::identity(x))?;
        let s_q = product_morphism(&Morphism::identity(self.states), &q_star_sx)?;
        let rhs = delta_x.then(&s_q)?;
        let mut check = LawCheck::new("<p, q*> = (S x q*) . (Delta x X)", Coverage::Exhaustive);
        match lhs.first_difference(&rhs) {
            None => check.passed = sx.size() as u128,
            Some(i) => {
                check.failed = 1;
                check.witness = Some(format!("at {i}: {} vs {}", lhs.apply(i), rhs.apply(i)));
            }
        }
        Ok(check)
    }
}

/// Runs `probe` on every index below `total` in parallel. `probe` returns a
/// witness on failure; the one at the least index is kept.
fn par_law<B: Send>(
    law: &str,
    total: u128,
    init: impl Fn() -> B + Sync + Send,
    probe: impl Fn(&mut B, u128) -> Option<String> + Sync + Send,
) -> LawCheck {
    let (failed, first) = (0..total as u64)
        .into_par_iter()
        .map_init(&init, |buf, i| (i, probe(buf, i as u128)))
        .fold(
            || (0u128, None::<(u64, String)>),
            |(failed, first), (i, w)| match w {
                None => (failed, first),
                Some(w) => (failed + 1, first.or(Some((i, w)))),
            },
        )
        .reduce(
            || (0, None),
            |(fa, wa), (fb, wb)| {
                let w = match (wa, wb) {
                    (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                    (a, b) => a.or(b),
                };
                (fa + fb, w)
            },
        );
    LawCheck {
        law: law.into(),
        coverage: Coverage::Exhaustive,
        passed: total - failed,
        failed,
        witness: first.map(|(_, w)| w),
    }
}

/// How much of a domain a check covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Coverage {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Outcome of one law over one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub coverage: Coverage,
    pub passed: u128,
    pub failed: u128,
    pub witness: Option<String>,
}

impl LawCheck {
    pub fn new(law: impl Into<String>, coverage: Coverage) -> Self {
        LawCheck {
            law: law.into(),
            coverage,
            passed: 0,
            failed: 0,
            witness: None,
        }
    }

    #[inline]
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}
