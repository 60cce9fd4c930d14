//! Counter-based pseudo-random streams.
//!
//! The generator is fully specified here so results can be reproduced by
//! other implementations:
//!
//! ```text
//! mix64(z):  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!            z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!            return z ^ (z >> 31)                         (wrapping u64 ops)
//!
//! key(seed, domain, index) = mix64(mix64(seed + domain * G) + (index + 1) * H)
//! output_i                  = mix64(key + (i + 1) * G)      for i = 0, 1, ...
//! ```
//!
//! with `G = 0x9e3779b97f4a7c15` and `H = 0xd1b54a32d192ed03`. Each
//! `(seed, domain, index)` triple names an independent stream, so trial `t`
//! always sees the same numbers no matter how many trials run or in which
//! order.
//!
//! Derived draws:
//!
//! * `f64` in `[0, 1)`: `(output >> 11) * 2^-53`
//! * integer in `[0, n)`: Lemire's multiply-shift with rejection
//! * standard normal: polar Box–Muller on two uniforms mapped to `(-1, 1)`,
//!   returning the first variate and caching the second

const G: u64 = 0x9e37_79b9_7f4a_7c15;
const H: u64 = 0xd1b5_4a32_d192_ed03;

/// Stream domains.
pub const DOMAIN_MATRIX: u64 = 1;
pub const DOMAIN_TRIAL: u64 = 2;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Rng {
    key: u64,
    counter: u64,
    spare: Option<f64>,
}

impl Rng {
    pub fn stream(seed: u64, domain: u64, index: u64) -> Self {
        let key =
            mix64(mix64(seed.wrapping_add(domain.wrapping_mul(G))).wrapping_add(index.wrapping_add(1).wrapping_mul(H)));
        Rng {
            key,
            counter: 0,
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(G)))
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform element of a nonempty slice.
    pub fn choose<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.below(items.len() as u64) as usize]
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// `k` distinct elements of `pool` by a partial Fisher–Yates shuffle, in
    /// draw order.
    pub fn sample<T: Copy>(&mut self, pool: &[T], k: usize) -> Vec<T> {
        assert!(k <= pool.len());
        let mut p = pool.to_vec();
        for i in 0..k {
            let j = i + self.below((p.len() - i) as u64) as usize;
            p.swap(i, j);
        }
        p.truncate(k);
        p
    }
}
