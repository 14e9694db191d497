//! The skeletal category of finite sets.
//!
//! An object is a bare cardinality `n`, whose elements are `0..n`. A morphism
//! is a dense lookup table. Products and exponentials use fixed integer
//! encodings (see [`codec`]) shared by every other module, so two tables
//! built along different routes can be compared entry by entry.

mod ccc;
pub mod codec;
mod factor;
mod hom;

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ccc::{
    curry, diagonal, evaluation, exponential_functor, fst, pairing, precompose, product_morphism,
    snd, uncurry, unit_iso, unit_iso_inverse,
};
pub use codec::{ExpCodec, ProductCodec};
pub use factor::{classify, factorize, Classification, Factorization};
pub use hom::{all_morphisms, hom_count, hom_sample, HomSample};

/// Largest table any constructor will materialize.
pub const TABLE_LIMIT: usize = 1 << 26;

/// A finite set, identified with its cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet(usize);

impl FinSet {
    pub const EMPTY: FinSet = FinSet(0);
    pub const ONE: FinSet = FinSet(1);

    pub const fn new(size: usize) -> Self {
        FinSet(size)
    }

    pub const fn size(self) -> usize {
        self.0
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn elements(self) -> Range<usize> {
        0..self.0
    }

    pub fn contains(self, element: usize) -> bool {
        element < self.0
    }

    pub fn check(self, element: usize) -> Result<usize> {
        if self.contains(element) {
            Ok(element)
        } else {
            Err(Error::ElementOutOfRange {
                element,
                size: self.0,
            })
        }
    }

    /// `self × other`.
    pub fn product(self, other: FinSet) -> Result<FinSet> {
        self.0
            .checked_mul(other.0)
            .map(FinSet)
            .ok_or_else(|| Error::Overflow(format!("{} x {}", self.0, other.0)))
    }

    /// `self ^ exponent`, with `0^0 = 1`.
    pub fn power(self, exponent: FinSet) -> Result<FinSet> {
        let exp = u32::try_from(exponent.0)
            .map_err(|_| Error::Overflow(format!("{}^{}", self.0, exponent.0)))?;
        self.0
            .checked_pow(exp)
            .map(FinSet)
            .ok_or_else(|| Error::Overflow(format!("{}^{}", self.0, exponent.0)))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A total function between finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MorphismRepr", into = "MorphismRepr")]
pub struct Morphism {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    dom: usize,
    cod: usize,
    table: Vec<usize>,
}

impl TryFrom<MorphismRepr> for Morphism {
    type Error = Error;

    fn try_from(repr: MorphismRepr) -> Result<Self> {
        Morphism::new(FinSet(repr.dom), FinSet(repr.cod), repr.table)
    }
}

impl From<Morphism> for MorphismRepr {
    fn from(m: Morphism) -> Self {
        MorphismRepr {
            dom: m.dom.0,
            cod: m.cod.0,
            table: m.table,
        }
    }
}

impl Morphism {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.size() {
            return Err(Error::TableLength {
                len: table.len(),
                expected: dom.size(),
            });
        }
        if cod.is_empty() && !dom.is_empty() {
            return Err(Error::EmptyCodomain { dom: dom.size() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= cod.size()) {
            return Err(Error::EntryOutOfRange {
                index,
                value,
                cod: cod.size(),
            });
        }
        Ok(Morphism { dom, cod, table })
    }

    /// Tabulates `f` over the whole domain.
    pub fn from_fn(dom: FinSet, cod: FinSet, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::try_from_fn(dom, cod, |i| Ok(f(i)))
    }

    pub fn try_from_fn(
        dom: FinSet,
        cod: FinSet,
        mut f: impl FnMut(usize) -> Result<usize>,
    ) -> Result<Self> {
        if dom.size() > TABLE_LIMIT {
            return Err(Error::TableTooLarge {
                size: dom.size() as u128,
                limit: TABLE_LIMIT,
            });
        }
        let table = dom.elements().map(&mut f).collect::<Result<Vec<_>>>()?;
        Morphism::new(dom, cod, table)
    }

    pub fn identity(x: FinSet) -> Self {
        Morphism {
            dom: x,
            cod: x,
            table: x.elements().collect(),
        }
    }

    pub fn constant(dom: FinSet, cod: FinSet, value: usize) -> Result<Self> {
        if !dom.is_empty() {
            cod.check(value)?;
        }
        Morphism::new(dom, cod, vec![value; dom.size()])
    }

    /// The unique map out of the empty set.
    pub fn empty(cod: FinSet) -> Self {
        Morphism {
            dom: FinSet::EMPTY,
            cod,
            table: Vec::new(),
        }
    }

    pub fn dom(&self) -> FinSet {
        self.dom
    }

    pub fn cod(&self) -> FinSet {
        self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn into_table(self) -> Vec<usize> {
        self.table
    }

    /// Applies the map. Panics if `x` is outside the domain.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.table.get(x).copied()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Morphism) -> Result<Morphism> {
        compose(g, self)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        self.table
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        for &y in &self.table {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom == self.cod && self.is_injective()
    }

    /// The two-sided inverse, if the map is a bijection.
    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![0; self.dom.size()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Some(Morphism {
            dom: self.cod,
            cod: self.dom,
            table,
        })
    }

    /// First point where `self` and `other` disagree, if any.
    pub fn first_difference(&self, other: &Morphism) -> Option<usize> {
        self.table
            .iter()
            .zip(&other.table)
            .position(|(a, b)| a != b)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} -> {}", self.table, self.dom, self.cod)
    }
}

/// `g ∘ f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.cod != g.dom {
        return Err(Error::CompositionMismatch {
            cod: f.cod.size(),
            dom: g.dom.size(),
        });
    }
    Ok(Morphism {
        dom: f.dom,
        cod: g.cod,
        table: f.table.iter().map(|&y| g.table[y]).collect(),
    })
}
