//! The seeded generator behind every fuzz suite.
//!
//! A 64-bit linear congruential generator with Knuth's MMIX constants:
//! `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2^64)`.
//! Each step yields the high 32 bits of the new state. `below(k)` maps a
//! 32-bit output `u` to `(u · k) >> 32`. The scheme is small enough to port
//! verbatim to any language, which keeps fuzz cases reproducible everywhere.

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

const MUL: u64 = 6364136223846793005;
const INC: u64 = 1442695040888963407;

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(MUL).wrapping_add(INC);
        (self.state >> 32) as u32
    }

    /// Uniform-ish integer in `0..k`; `k` must be positive and fit in 32 bits.
    pub fn below(&mut self, k: usize) -> usize {
        assert!(k > 0 && k <= u32::MAX as usize);
        ((self.next_u32() as u64 * k as u64) >> 32) as usize
    }

    /// Integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn sign(&mut self) -> i32 {
        if self.next_u32() & 0x8000_0000 == 0 {
            1
        } else {
            -1
        }
    }

    /// An independent stream derived from this one, for per-case generators.
    pub fn fork(&mut self) -> Lcg64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        Lcg64::new((hi << 32) | lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_outputs_are_frozen() {
        let mut r = Lcg64::new(0);
        assert_eq!(r.next_u32(), 335903614);
        let mut r = Lcg64::new(1);
        assert_eq!(r.next_u32(), 1817669548);
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = Lcg64::new(42);
        for k in 1..50 {
            for _ in 0..20 {
                assert!(r.below(k) < k);
            }
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<_> = {
            let mut r = Lcg64::new(7);
            (0..10).map(|_| r.next_u32()).collect()
        };
        let b: Vec<_> = {
            let mut r = Lcg64::new(7);
            (0..10).map(|_| r.next_u32()).collect()
        };
        assert_eq!(a, b);
    }
}
