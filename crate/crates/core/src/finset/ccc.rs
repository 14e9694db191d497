//! Cartesian closed structure: products, exponentials, currying.

use crate::error::{Error, Result};
use crate::finset::{ExpCodec, FinSet, Morphism, ProductCodec};

/// `f × g : A×B → C×D`.
pub fn product_morphism(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    let src = ProductCodec::new(f.dom(), g.dom())?;
    let dst = ProductCodec::new(f.cod(), g.cod())?;
    Morphism::from_fn(src.object(), dst.object(), |code| {
        let (a, b) = src.decode(code);
        dst.encode(f.apply(a), g.apply(b))
    })
}

/// `⟨f, g⟩ : A → B×C`.
pub fn pairing(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    if f.dom() != g.dom() {
        return Err(Error::CodecMismatch(format!(
            "pairing maps with domains {} and {}",
            f.dom(),
            g.dom()
        )));
    }
    let dst = ProductCodec::new(f.cod(), g.cod())?;
    Morphism::from_fn(f.dom(), dst.object(), |a| {
        dst.encode(f.apply(a), g.apply(a))
    })
}

/// First projection `A×B → A`.
pub fn fst(a: FinSet, b: FinSet) -> Result<Morphism> {
    let codec = ProductCodec::new(a, b)?;
    Morphism::from_fn(codec.object(), a, |code| codec.decode(code).0)
}

/// Second projection `A×B → B`.
pub fn snd(a: FinSet, b: FinSet) -> Result<Morphism> {
    let codec = ProductCodec::new(a, b)?;
    Morphism::from_fn(codec.object(), b, |code| codec.decode(code).1)
}

/// `Δ : S → S×S`.
pub fn diagonal(s: FinSet) -> Result<Morphism> {
    let codec = ProductCodec::new(s, s)?;
    Morphism::from_fn(s, codec.object(), |i| codec.encode(i, i))
}

/// The up-star transpose: `f : S×X → Y` becomes `X → Y^S`.
pub fn curry(f: &Morphism, s: FinSet, x: FinSet) -> Result<Morphism> {
    let src = ProductCodec::new(s, x)?;
    if src.object() != f.dom() {
        return Err(Error::CodecMismatch(format!(
            "curry expects a domain of size {}x{}, got {}",
            s,
            x,
            f.dom()
        )));
    }
    let exp = ExpCodec::new(f.cod(), s)?;
    Morphism::from_fn(x, exp.object(), |xi| {
        exp.encode_fn(|si| f.apply(src.encode(si, xi)))
    })
}

/// The down-star transpose: `g : X → Y^S` becomes `S×X → Y`.
pub fn uncurry(g: &Morphism, s: FinSet, y: FinSet) -> Result<Morphism> {
    let exp = ExpCodec::new(y, s)?;
    if exp.object() != g.cod() {
        return Err(Error::CodecMismatch(format!(
            "uncurry expects a codomain of size {}^{}, got {}",
            y,
            s,
            g.cod()
        )));
    }
    let dst = ProductCodec::new(s, g.dom())?;
    Morphism::from_fn(dst.object(), y, |code| {
        let (si, xi) = dst.decode(code);
        exp.digit(g.apply(xi), si)
    })
}

/// The counit `ε_X : S × X^S → X`, `(s, f) ↦ f(s)`.
pub fn evaluation(x: FinSet, s: FinSet) -> Result<Morphism> {
    let exp = ExpCodec::new(x, s)?;
    let src = ProductCodec::new(s, exp.object())?;
    Morphism::from_fn(src.object(), x, |code| {
        let (si, f) = src.decode(code);
        exp.digit(f, si)
    })
}

/// `f^S : Y^S → Z^S`, post-composition with `f`.
pub fn exponential_functor(f: &Morphism, s: FinSet) -> Result<Morphism> {
    let src = ExpCodec::new(f.dom(), s)?;
    let dst = ExpCodec::new(f.cod(), s)?;
    Morphism::from_fn(src.object(), dst.object(), |code| {
        dst.encode_fn(|si| f.apply(src.digit(code, si)))
    })
}

/// `Z^a : Z^B → Z^A`, pre-composition with `a : A → B`.
pub fn precompose(z: FinSet, a: &Morphism) -> Result<Morphism> {
    let src = ExpCodec::new(z, a.cod())?;
    let dst = ExpCodec::new(z, a.dom())?;
    Morphism::from_fn(src.object(), dst.object(), |g| {
        dst.encode_fn(|i| src.digit(g, a.apply(i)))
    })
}

/// The canonical isomorphism `A^1 → A`.
pub fn unit_iso(a: FinSet) -> Result<Morphism> {
    let exp = ExpCodec::new(a, FinSet::ONE)?;
    Morphism::from_fn(exp.object(), a, |code| exp.digit(code, 0))
}

/// The canonical isomorphism `A → A^1`.
pub fn unit_iso_inverse(a: FinSet) -> Result<Morphism> {
    let exp = ExpCodec::new(a, FinSet::ONE)?;
    Morphism::from_fn(a, exp.object(), |v| exp.encode(&[v]))
}
