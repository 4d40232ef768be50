//! The single source of randomness for verification runs.
//!
//! Every sampled quantity flows from one `SampleStream`, a ChaCha8 generator
//! keyed by the run seed, so identical configurations reproduce identical
//! samples on every platform.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::intcone::IntegerCone;

pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A substream for a named phase, decoupling phases from each other.
    pub fn fork(&mut self, label: &str) -> SampleStream {
        let salt: u64 = self.rng.gen();
        let mut key = salt;
        for b in label.bytes() {
            key = key.wrapping_mul(0x100000001b3).wrapping_add(b as u64);
        }
        SampleStream::new(key)
    }

    pub fn u64_in(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// A random coprime pair `lo <= k < l <= hi`.
    pub fn coprime_pair(&mut self, lo: u64, hi: u64) -> (u64, u64) {
        use num_integer::Integer;
        loop {
            let k = self.u64_in(lo, hi - 1);
            let l = self.u64_in(k + 1, hi);
            if k.gcd(&l) == 1 {
                return (k, l);
            }
        }
    }

    /// `a / base^j` with `j <= j_max` and `a <= scale·base^j`.
    pub fn rational_with_denominator_power(
        &mut self,
        base: u64,
        j_max: u32,
        scale: u64,
    ) -> BigRational {
        let j = self.u64_in(0, j_max as u64) as u32;
        let den = BigInt::from(base).pow(j);
        let max_num = BigInt::from(scale) * &den;
        let num = BigInt::from(self.u64_in(0, u64::MAX))
            % (&max_num + BigInt::from(1));
        BigRational::new(num, den)
    }

    /// A random member of the cone: a short random combination of
    /// generators.
    pub fn cone_member(&mut self, cone: &IntegerCone, max_terms: usize) -> u64 {
        let mut acc = 0u64;
        let terms = self.usize_in(0, max_terms);
        for _ in 0..terms {
            let idx = self.usize_in(0, cone.generators().len() - 1);
            acc = acc.saturating_add(cone.generators()[idx]);
        }
        acc
    }

    /// A random simple cone with a few generators below `gen_cap`.
    pub fn simple_cone(&mut self, gen_cap: u64) -> IntegerCone {
        use num_integer::Integer;
        loop {
            let count = self.usize_in(2, 4);
            let gens: Vec<u64> = (0..count).map(|_| self.u64_in(2, gen_cap)).collect();
            if gens.iter().fold(0u64, |acc, &g| acc.gcd(&g)) == 1 {
                return IntegerCone::new(gens).expect("positive generators");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = SampleStream::new(7);
        let mut b = SampleStream::new(7);
        for _ in 0..32 {
            assert_eq!(a.u64_in(0, 1000), b.u64_in(0, 1000));
        }
        let mut fa = a.fork("phase");
        let mut fb = b.fork("phase");
        assert_eq!(fa.u64_in(0, 1 << 40), fb.u64_in(0, 1 << 40));
    }

    #[test]
    fn coprime_pairs_are_coprime() {
        use num_integer::Integer;
        let mut s = SampleStream::new(0);
        for _ in 0..100 {
            let (k, l) = s.coprime_pair(2, 60);
            assert!(2 <= k && k < l && l <= 60);
            assert_eq!(k.gcd(&l), 1);
        }
    }
}
