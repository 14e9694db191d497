//! Image factorization of finite functions.
//!
//! In finite sets every epimorphism is surjective, every surjection has a
//! section (pick any preimage), and so every epi is split and hence regular.
//! The factorization below is therefore the regular-epi/mono factorization.

use serde::Serialize;

use crate::error::Result;
use crate::finset::{FinSet, Morphism};

/// `f = mono ∘ epi`, through the image of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub source: Morphism,
    pub epi: Morphism,
    pub mono: Morphism,
    pub image: FinSet,
}

/// Image elements are numbered by the least domain index that reaches them.
pub fn factorize(f: &Morphism) -> Result<Factorization> {
    let mut slot = vec![usize::MAX; f.cod().size()];
    let mut mono = Vec::new();
    let mut epi = Vec::with_capacity(f.dom().size());
    for &y in f.table() {
        if slot[y] == usize::MAX {
            slot[y] = mono.len();
            mono.push(y);
        }
        epi.push(slot[y]);
    }
    let image = FinSet::new(mono.len());
    Ok(Factorization {
        source: f.clone(),
        epi: Morphism::new(f.dom(), image, epi)?,
        mono: Morphism::new(image, f.cod(), mono)?,
        image,
    })
}

impl Factorization {
    /// A section of the epi part, choosing least preimages.
    pub fn epi_section(&self) -> Morphism {
        let mut table = vec![usize::MAX; self.image.size()];
        for (x, &y) in self.epi.table().iter().enumerate() {
            if table[y] == usize::MAX {
                table[y] = x;
            }
        }
        Morphism::new(self.image, self.source.dom(), table).expect("epi is surjective")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub mono: bool,
    pub epi: bool,
    /// Always equal to `epi` in finite sets.
    pub split_epi: bool,
    pub iso: bool,
}

pub fn classify(f: &Morphism) -> Classification {
    let mono = f.is_injective();
    let epi = f.is_surjective();
    Classification {
        mono,
        epi,
        split_epi: epi,
        iso: mono && epi,
    }
}
