//! Enumeration and seeded sampling of hom-sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finset::{FinSet, Morphism};

/// `|cod|^|dom|`, or `None` if it does not fit in a `u128`.
pub fn hom_count(dom: FinSet, cod: FinSet) -> Option<u128> {
    let exp = u32::try_from(dom.size()).ok()?;
    (cod.size() as u128).checked_pow(exp)
}

/// Every morphism `dom → cod`, in lexicographic order of the table read
/// from the last entry (odometer order).
pub fn all_morphisms(dom: FinSet, cod: FinSet) -> impl Iterator<Item = Morphism> {
    let n = dom.size();
    let k = cod.size();
    let mut next = if n > 0 && k == 0 {
        None
    } else {
        Some(vec![0usize; n])
    };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = 0;
        while i < n {
            succ[i] += 1;
            if succ[i] < k {
                break;
            }
            succ[i] = 0;
            i += 1;
        }
        if i < n {
            next = Some(succ);
        }
        Some(Morphism::new(dom, cod, current).expect("odometer stays in range"))
    })
}

/// How a hom-set was covered by [`hom_sample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomSample {
    Exhaustive,
    Sampled { seed: u64 },
}

/// All morphisms when the hom-set has at most `exhaustive_limit` elements,
/// otherwise `sample_size` pseudorandom ones drawn with `seed`.
pub fn hom_sample(
    dom: FinSet,
    cod: FinSet,
    exhaustive_limit: u128,
    sample_size: usize,
    seed: u64,
) -> (Vec<Morphism>, HomSample) {
    match hom_count(dom, cod) {
        Some(count) if count <= exhaustive_limit => {
            (all_morphisms(dom, cod).collect(), HomSample::Exhaustive)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let maps = (0..sample_size)
                .map(|_| {
                    let table = dom
                        .elements()
                        .map(|_| rng.gen_range(0..cod.size()))
                        .collect();
                    Morphism::new(dom, cod, table).expect("sampled entries in range")
                })
                .collect();
            (maps, HomSample::Sampled { seed })
        }
    }
}
