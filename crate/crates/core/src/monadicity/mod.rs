//! The comparison functor `K : Y ↦ (Y^S, ε_Y^S)` and its inverse `L`.
//!
//! `L` sends an algebra `(X, h)` to the image `Y` of
//! `f_X = h ∘ q*_{S×X} : S×X → X`, factored as `m ∘ e`. The transpose
//! `e* : X → Y^S` of `e` is then a bijection and an algebra morphism
//! `(X, h) → K(Y)`, and `ξ_Y : LKY → Y` identifies `LK` with the identity.

mod report;

use crate::algebra::{check_morphism, k_structure, AlgebraMorphism, SquareViolation, TAlgebra};
use crate::error::{Error, Result};
use crate::finset::{
    curry, exponential_functor, factorize, product_morphism, ExpCodec, FinSet, Morphism,
    ProductCodec,
};
use crate::state_monad::StateMonadCtx;

pub use report::{
    diagnose_empty_state, verify_monadicity, CarrierReport, CarrierStatus, EmptyStateDiagnosis,
    Report, VerifyOptions,
};

/// `K(Y) = (Y^S, ε_Y^S)`.
///
/// The structure map is an algebra by construction, so it is not re-validated
/// here; the exhaustive check costs about `|S|^|S|·|Y|^{2|S|}` per element of
/// `T(Y^S)` and is out of reach already at `|S| = |Y| = 3`. Use
/// [`crate::algebra::check_algebra`] where it is affordable.
pub fn k_obj(ctx: &StateMonadCtx, y: FinSet) -> Result<TAlgebra> {
    let carrier = y.power(ctx.states())?;
    Ok(TAlgebra::new_unchecked(*ctx, carrier, k_structure(ctx, y)?))
}

/// `K(v) = v^S`, checked against the morphism square.
pub fn k_mor(ctx: &StateMonadCtx, v: &Morphism) -> Result<AlgebraMorphism> {
    let source = k_obj(ctx, v.dom())?;
    let target = k_obj(ctx, v.cod())?;
    AlgebraMorphism::new(exponential_functor(v, ctx.states())?, &source, &target)
}

/// The data `L` attaches to an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonData {
    algebra: TAlgebra,
    y: FinSet,
    e: Morphism,
    m: Morphism,
    f_x: Morphism,
    e_star: Morphism,
}

impl ComparisonData {
    pub fn algebra(&self) -> &TAlgebra {
        &self.algebra
    }

    /// `L(X, h)`.
    pub fn y(&self) -> FinSet {
        self.y
    }

    /// `e : S×X → Y`, surjective.
    pub fn e(&self) -> &Morphism {
        &self.e
    }

    /// `m : Y → X`, injective.
    pub fn m(&self) -> &Morphism {
        &self.m
    }

    /// `f_X = h ∘ q*_{S×X}`, i.e. `(s, x) ↦ h(λs'.(s, x))`.
    pub fn f_x(&self) -> &Morphism {
        &self.f_x
    }

    /// `e* : X → Y^S`, the transpose of `e`.
    pub fn e_star(&self) -> &Morphism {
        &self.e_star
    }

    /// `m^S ∘ e* = (f_X)*`.
    pub fn transpose_triangle_holds(&self) -> Result<bool> {
        let s = self.algebra.ctx().states();
        let lhs = self.e_star.then(&exponential_functor(&self.m, s)?)?;
        Ok(lhs == curry(&self.f_x, s, self.algebra.carrier())?)
    }
}

pub fn l_obj(alg: &TAlgebra) -> Result<ComparisonData> {
    let ctx = alg.ctx();
    let x = alg.carrier();
    let sx = ctx.pair(x)?.object();
    let f_x = ctx.q_star(sx)?.then(alg.structure())?;
    let fac = factorize(&f_x)?;
    let e_star = curry(&fac.epi, ctx.states(), x)?;
    Ok(ComparisonData {
        algebra: alg.clone(),
        y: fac.image,
        e: fac.epi,
        m: fac.mono,
        f_x,
        e_star,
    })
}

/// `L(u) : Y → Y'`, the unique map with `L(u) ∘ e = e' ∘ (S × u)`.
///
/// Instead of a coequalizer, well-definedness is checked directly: two points
/// of `S×X` in the same `e`-fiber must land in the same `e'`-fiber.
pub fn l_mor(
    u: &AlgebraMorphism,
    source: &ComparisonData,
    target: &ComparisonData,
) -> Result<Morphism> {
    if u.source() != &source.algebra || u.target() != &target.algebra {
        return Err(Error::CodecMismatch(
            "algebra morphism does not connect the given comparison data".into(),
        ));
    }
    let s = source.algebra.ctx().states();
    let su = product_morphism(&Morphism::identity(s), u.map())?;
    let rhs = su.then(&target.e)?;
    let codec = ProductCodec::new(s, source.algebra.carrier())?;
    let mut table = vec![usize::MAX; source.y.size()];
    let mut witness = vec![usize::MAX; source.y.size()];
    for p in codec.object().elements() {
        let y = source.e.apply(p);
        let image = rhs.apply(p);
        if table[y] == usize::MAX {
            table[y] = image;
            witness[y] = p;
        } else if table[y] != image {
            return Err(Error::FiberCollision {
                first: codec.decode(witness[y]),
                second: codec.decode(p),
                first_image: table[y],
                second_image: image,
            });
        }
    }
    let lu = Morphism::new(source.y, target.y, table)?;
    if source.e.then(&lu)? != rhs {
        return Err(Error::Internal("L(u) fails to commute with e".into()));
    }
    Ok(lu)
}

/// The explicit inverse of `e*`: `y ↦ h(λs.(s, m(y(s))))`.
pub fn e_star_inverse(data: &ComparisonData) -> Result<Morphism> {
    let alg = &data.algebra;
    let ys = ExpCodec::new(data.y, alg.ctx().states())?;
    let tx = alg.t_codec();
    let h = alg.structure();
    Morphism::from_fn(ys.object(), alg.carrier(), |y| {
        h.apply(tx.encode_fn(|s| (s, data.m.apply(ys.digit(y, s)))))
    })
}

/// One-sided inverses of `e*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionRetraction {
    /// `h ∘ θ_X ∘ m^S`, a left inverse.
    pub retraction: Morphism,
    /// `h ∘ σ^S` with `σ = γ_{S×X} ∘ η_X ∘ m`, a right inverse; needs `s0`.
    pub section: Option<Morphism>,
}

pub fn retraction(data: &ComparisonData) -> Result<Morphism> {
    let alg = &data.algebra;
    let ctx = alg.ctx();
    exponential_functor(&data.m, ctx.states())?
        .then(&ctx.theta(alg.carrier())?)?
        .then(alg.structure())
}

/// `σ = γ_{S×X} ∘ η_X ∘ m : Y → S×X`, a section of `e`.
pub fn sigma(data: &ComparisonData) -> Result<Morphism> {
    let alg = &data.algebra;
    let ctx = alg.ctx();
    let x = alg.carrier();
    let sx = ctx.pair(x)?.object();
    data.m.then(&ctx.eta(x)?)?.then(&ctx.gamma(sx)?)
}

/// `Σ = h ∘ σ^S : Y^S → X`.
pub fn section(data: &ComparisonData) -> Result<Morphism> {
    let ctx = data.algebra.ctx();
    if ctx.states().is_empty() {
        return Err(Error::EmptyState);
    }
    exponential_functor(&sigma(data)?, ctx.states())?.then(data.algebra.structure())
}

pub fn section_retraction(data: &ComparisonData) -> Result<SectionRetraction> {
    let section = match data.algebra.ctx().s0() {
        Some(_) => Some(section(data)?),
        None => None,
    };
    Ok(SectionRetraction {
        retraction: retraction(data)?,
        section,
    })
}

/// Whether `e* : (X, h) → K(Y)` commutes with the structure maps.
pub fn check_estar_morphism(
    data: &ComparisonData,
) -> Result<std::result::Result<(), SquareViolation>> {
    let target = k_obj(data.algebra.ctx(), data.y)?;
    check_morphism(&data.e_star, &data.algebra, &target)
}

/// `ξ_Y : LKY → Y`, determined by `ξ_Y ∘ e_{Y^S} = ε_Y`.
///
/// Built from `e`-fibers with a well-definedness check, then compared with
/// the second characterization `m_{Y^S} = q*_Y ∘ ξ_Y`.
pub fn xi(ctx: &StateMonadCtx, y: FinSet) -> Result<Morphism> {
    if ctx.states().is_empty() {
        return Err(Error::EmptyState);
    }
    let data = l_obj(&k_obj(ctx, y)?)?;
    let ys = ctx.power(y)?;
    let codec = ProductCodec::new(ctx.states(), ys.object())?;
    let mut table = vec![usize::MAX; data.y.size()];
    let mut witness = vec![usize::MAX; data.y.size()];
    for p in codec.object().elements() {
        let (s, g) = codec.decode(p);
        let z = data.e.apply(p);
        let value = ys.digit(g, s);
        if table[z] == usize::MAX {
            table[z] = value;
            witness[z] = p;
        } else if table[z] != value {
            return Err(Error::FiberCollision {
                first: codec.decode(witness[z]),
                second: (s, g),
                first_image: table[z],
                second_image: value,
            });
        }
    }
    let xi = Morphism::new(data.y, y, table)?;
    if xi.then(&ctx.q_star(y)?)? != data.m {
        return Err(Error::Internal("m differs from q* . xi on LKY".into()));
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_algebra, enumerate_algebras, Method, DEFAULT_CEILING};
    use crate::finset::{all_morphisms, compose};

    fn set(n: usize) -> FinSet {
        FinSet::new(n)
    }

    fn twelve() -> Vec<TAlgebra> {
        let ctx = StateMonadCtx::new(set(2));
        enumerate_algebras(&ctx, set(4), Method::Transport, DEFAULT_CEILING).unwrap()
    }

    #[test]
    fn k_objects() {
        let ctx = StateMonadCtx::new(set(2));
        let k = k_obj(&ctx, set(2)).unwrap();
        assert_eq!(k.carrier(), set(4));
        assert!(twelve().contains(&k));

        let one = StateMonadCtx::new(set(1));
        let k = k_obj(&one, set(3)).unwrap();
        assert_eq!(k.carrier(), set(3));
        assert!(k.structure().is_bijective());

        let k = k_obj(&ctx, set(0)).unwrap();
        assert_eq!(k.carrier(), set(0));
        assert!(k.structure().table().is_empty());
        check_algebra(&ctx, set(0), k.structure(), DEFAULT_CEILING).unwrap();
    }

    #[test]
    fn k_is_a_functor() {
        for n in 1..=2 {
            let ctx = StateMonadCtx::new(set(n));
            for a in 0..=3 {
                let id = k_mor(&ctx, &Morphism::identity(set(a))).unwrap();
                assert_eq!(id.map(), &Morphism::identity(set(a).power(set(n)).unwrap()));
                for f in all_morphisms(set(a), set(2)) {
                    for g in all_morphisms(set(2), set(3)) {
                        let kf = k_mor(&ctx, &f).unwrap();
                        let kg = k_mor(&ctx, &g).unwrap();
                        let kgf = k_mor(&ctx, &compose(&g, &f).unwrap()).unwrap();
                        assert_eq!(kf.then(&kg).unwrap().map(), kgf.map());
                    }
                }
            }
        }
    }

    #[test]
    fn l_on_the_twelve() {
        for alg in twelve() {
            let data = l_obj(&alg).unwrap();
            assert_eq!(data.y(), set(2));
            assert!(data.e().is_surjective());
            assert!(data.m().is_injective());
            assert_eq!(compose(data.m(), data.e()).unwrap(), *data.f_x());
            assert!(data.transpose_triangle_holds().unwrap());
            assert!(data.e_star().is_bijective());
            assert!(check_estar_morphism(&data).unwrap().is_ok());
        }
    }

    #[test]
    fn singleton_state_l_is_trivial() {
        let ctx = StateMonadCtx::new(set(1));
        for x in 0..=3 {
            let alg = enumerate_algebras(&ctx, set(x), Method::Brute, DEFAULT_CEILING)
                .unwrap()
                .remove(0);
            let data = l_obj(&alg).unwrap();
            assert_eq!(data.y(), set(x));
            assert!(data.e_star().is_bijective());
        }
    }

    #[test]
    fn inverses_agree() {
        for alg in twelve() {
            for s0 in 0..2 {
                let ctx = StateMonadCtx::with_point(set(2), s0).unwrap();
                let alg = alg.with_ctx(ctx).unwrap();
                let data = l_obj(&alg).unwrap();
                let inv = e_star_inverse(&data).unwrap();
                let id_x = Morphism::identity(alg.carrier());
                let id_ys = Morphism::identity(set(4));
                assert_eq!(compose(&inv, data.e_star()).unwrap(), id_x);
                assert_eq!(compose(data.e_star(), &inv).unwrap(), id_ys);
                let sr = section_retraction(&data).unwrap();
                assert_eq!(compose(&sr.retraction, data.e_star()).unwrap(), id_x);
                let section = sr.section.unwrap();
                assert_eq!(compose(data.e_star(), &section).unwrap(), id_ys);
                assert_eq!(section, inv);
                assert_eq!(sr.retraction, inv);
                let sig = sigma(&data).unwrap();
                assert_eq!(
                    compose(data.e(), &sig).unwrap(),
                    Morphism::identity(data.y())
                );
            }
        }
    }

    #[test]
    fn corrupted_structure_breaks_estar_square() {
        // Perturb a cell that is neither η(x) nor constant, so L still sees
        // the same e* while the square must break at that cell.
        let ctx = StateMonadCtx::new(set(2));
        let k = k_obj(&ctx, set(2)).unwrap();
        let tx = ctx.t(set(4)).unwrap();
        let eta = ctx.eta(set(4)).unwrap();
        let cells = tx.object().size();
        let cell = (0..cells)
            .find(|&c| !eta.table().contains(&c) && tx.at(c, 0) != tx.at(c, 1))
            .unwrap();
        let mut table = k.structure().table().to_vec();
        table[cell] = (table[cell] + 1) % 4;
        let bad = TAlgebra::new_unchecked(
            ctx,
            set(4),
            Morphism::new(set(cells), set(4), table).unwrap(),
        );
        let data = l_obj(&bad).unwrap();
        assert!(data.e_star().is_bijective());
        let violation = check_estar_morphism(&data).unwrap().unwrap_err();
        assert_eq!(violation.at, cell);
    }

    #[test]
    fn l_is_a_functor_on_k_morphisms() {
        let ctx = StateMonadCtx::new(set(2));
        let datas: Vec<_> = (0..=3)
            .map(|y| l_obj(&k_obj(&ctx, set(y)).unwrap()).unwrap())
            .collect();
        for (y, d) in datas.iter().enumerate() {
            let id = AlgebraMorphism::identity(d.algebra());
            assert_eq!(l_mor(&id, d, d).unwrap(), Morphism::identity(set(y)));
        }
        for f in all_morphisms(set(1), set(2)) {
            for g in all_morphisms(set(2), set(3)) {
                let kf = k_mor(&ctx, &f).unwrap();
                let kg = k_mor(&ctx, &g).unwrap();
                let lf = l_mor(&kf, &datas[1], &datas[2]).unwrap();
                let lg = l_mor(&kg, &datas[2], &datas[3]).unwrap();
                let lgf = l_mor(&kf.then(&kg).unwrap(), &datas[1], &datas[3]).unwrap();
                assert_eq!(compose(&lg, &lf).unwrap(), lgf);
                // The image of L on K(v) is v itself, since LKY is ordered by constants.
                assert_eq!(lf, f);
            }
        }
    }

    #[test]
    fn xi_is_identity_on_constants() {
        for n in 1..=3 {
            let ctx = StateMonadCtx::new(set(n));
            for y in 0..=3 {
                let xi = xi(&ctx, set(y)).unwrap();
                assert!(xi.is_bijective());
                assert_eq!(xi, Morphism::identity(set(y)));
            }
        }
        assert_eq!(
            xi(&StateMonadCtx::new(set(0)), set(2)),
            Err(Error::EmptyState)
        );
    }
}
