//! Integer encodings of products and exponentials.
//!
//! Pairs are S-major: `(s, x) ↦ s·|X| + x`. A function `f: E → B` is the
//! little-endian mixed-radix integer `Σ f(e)·|B|^e`.

use crate::error::{Error, Result};
use crate::finset::FinSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductCodec {
    left: FinSet,
    right: FinSet,
    object: FinSet,
}

impl ProductCodec {
    pub fn new(left: FinSet, right: FinSet) -> Result<Self> {
        Ok(ProductCodec {
            left,
            right,
            object: left.product(right)?,
        })
    }

    pub fn left(&self) -> FinSet {
        self.left
    }

    pub fn right(&self) -> FinSet {
        self.right
    }

    /// The product object `left × right`.
    pub fn object(&self) -> FinSet {
        self.object
    }

    #[inline]
    pub fn encode(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.left.size() && b < self.right.size());
        a * self.right.size() + b
    }

    #[inline]
    pub fn decode(&self, code: usize) -> (usize, usize) {
        debug_assert!(code < self.object.size());
        (code / self.right.size(), code % self.right.size())
    }

    pub fn try_encode(&self, a: usize, b: usize) -> Result<usize> {
        self.left.check(a)?;
        self.right.check(b)?;
        Ok(self.encode(a, b))
    }

    pub fn try_decode(&self, code: usize) -> Result<(usize, usize)> {
        self.object.check(code)?;
        Ok(self.decode(code))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpCodec {
    base: FinSet,
    exponent: FinSet,
    object: FinSet,
}

impl ExpCodec {
    /// Codec for `base ^ exponent`.
    pub fn new(base: FinSet, exponent: FinSet) -> Result<Self> {
        Ok(ExpCodec {
            base,
            exponent,
            object: base.power(exponent)?,
        })
    }

    pub fn base(&self) -> FinSet {
        self.base
    }

    pub fn exponent(&self) -> FinSet {
        self.exponent
    }

    pub fn object(&self) -> FinSet {
        self.object
    }

    pub fn encode(&self, values: &[usize]) -> usize {
        debug_assert_eq!(values.len(), self.exponent.size());
        self.encode_fn(|e| values[e])
    }

    /// Encodes the function `e ↦ f(e)`.
    #[inline]
    pub fn encode_fn(&self, mut f: impl FnMut(usize) -> usize) -> usize {
        let radix = self.base.size();
        let mut code = 0;
        for e in (0..self.exponent.size()).rev() {
            let v = f(e);
            debug_assert!(v < radix);
            code = code * radix + v;
        }
        code
    }

    pub fn try_encode(&self, values: &[usize]) -> Result<usize> {
        if values.len() != self.exponent.size() {
            return Err(Error::CodecMismatch(format!(
                "function on a set of size {} given {} values",
                self.exponent.size(),
                values.len()
            )));
        }
        for &v in values {
            self.base.check(v)?;
        }
        Ok(self.encode(values))
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.exponent.size());
        self.decode_into(code, &mut out);
        out
    }

    pub fn decode_into(&self, mut code: usize, out: &mut Vec<usize>) {
        debug_assert!(code < self.object.size());
        out.clear();
        let radix = self.base.size();
        for _ in 0..self.exponent.size() {
            out.push(code % radix);
            code /= radix;
        }
    }

    pub fn try_decode(&self, code: usize) -> Result<Vec<usize>> {
        self.object.check(code)?;
        Ok(self.decode(code))
    }

    /// The value at `e` of the function encoded by `code`.
    #[inline]
    pub fn digit(&self, code: usize, e: usize) -> usize {
        debug_assert!(e < self.exponent.size());
        let radix = self.base.size();
        (code / radix.pow(e as u32)) % radix
    }

    /// Code of the constant function with value `v`.
    pub fn constant(&self, v: usize) -> usize {
        self.encode_fn(|_| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_round_trip() {
        for (l, r) in [(0, 3), (1, 1), (2, 3), (3, 2), (4, 4)] {
            let c = ProductCodec::new(FinSet::new(l), FinSet::new(r)).unwrap();
            for code in c.object().elements() {
                let (a, b) = c.decode(code);
                assert_eq!(c.encode(a, b), code);
            }
            for a in 0..l {
                for b in 0..r {
                    assert_eq!(c.decode(c.encode(a, b)), (a, b));
                }
            }
        }
    }

    #[test]
    fn exp_round_trip_and_digits() {
        for (b, e) in [(0, 0), (0, 2), (1, 3), (2, 0), (2, 3), (3, 3), (4, 2)] {
            let c = ExpCodec::new(FinSet::new(b), FinSet::new(e)).unwrap();
            for code in c.object().elements() {
                let f = c.decode(code);
                assert_eq!(c.encode(&f), code);
                for (i, &v) in f.iter().enumerate() {
                    assert_eq!(c.digit(code, i), v);
                }
            }
        }
    }

    #[test]
    fn little_endian_mixed_radix() {
        let c = ExpCodec::new(FinSet::new(3), FinSet::new(2)).unwrap();
        // f(0) = 1, f(1) = 2  →  1 + 2·3
        assert_eq!(c.encode(&[1, 2]), 7);
        assert_eq!(c.object().size(), 9);
        let empty = ExpCodec::new(FinSet::new(5), FinSet::EMPTY).unwrap();
        assert_eq!(empty.object().size(), 1);
        assert_eq!(empty.encode(&[]), 0);
    }

    #[test]
    fn try_variants_validate() {
        let c = ExpCodec::new(FinSet::new(2), FinSet::new(2)).unwrap();
        assert!(c.try_encode(&[0, 2]).is_err());
        assert!(c.try_encode(&[0]).is_err());
        assert!(c.try_decode(4).is_err());
        let p = ProductCodec::new(FinSet::new(2), FinSet::new(2)).unwrap();
        assert!(p.try_encode(2, 0).is_err());
    }
}
