//! Counter-based Gaussian streams.
//!
//! A stream is the ChaCha8 keystream keyed by `seed` with nonce `stream_id`;
//! the counter is the index of the next 64-bit word. Any (seed, stream, counter)
//! triple can be reopened directly.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream-id namespaces. Pilot and production draws never share ids.
pub mod tag {
    pub const PATH: u64 = 1;
    pub const PILOT: u64 = 2;
    pub const PRODUCTION: u64 = 3;
    pub const DEBIAS: u64 = 4;
    pub const REPLICATION: u64 = 5;
    pub const CHAIN: u64 = 6;
    pub const TEST: u64 = 7;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a tuple of indices into a stream id.
pub fn stream_id(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED_0F_57AE_A4u64, |acc, &p| splitmix(acc ^ splitmix(p)))
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self::at(seed, stream_id, 0)
    }

    /// Stream positioned at an arbitrary counter.
    pub fn at(seed: u64, stream_id: u64, counter: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        inner.set_word_pos(2 * counter as u128);
        RngStream { seed, stream_id, inner }
    }

    /// Stream for draw `index` of `level` under namespace `tag`.
    pub fn keyed(seed: u64, parts: &[u64]) -> Self {
        Self::new(seed, stream_id(parts))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        (self.inner.get_word_pos() / 2) as u64
    }

    /// Independent child stream, a deterministic function of this stream's
    /// id and `k`. Does not advance `self`.
    pub fn child(&self, k: u64) -> RngStream {
        RngStream::new(self.seed, stream_id(&[self.stream_id, k]))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1), from the top 53 bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by inverse CDF.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        inv_normal_cdf(self.uniform())
    }

    /// Fills `out` with N(0, h) coordinates.
    pub fn fill_increment(&mut self, h: f64, out: &mut [f64]) {
        let s = h.sqrt();
        for o in out.iter_mut() {
            *o = s * self.normal();
        }
    }

    pub fn gaussian_increment(&mut self, d: usize, h: f64) -> Vec<f64> {
        let mut v = vec![0.0; d];
        self.fill_increment(h, &mut v);
        v
    }
}

/// Wichura's AS241 (PPND16) normal quantile, relative accuracy about 1e-16.
#[inline]
pub fn inv_normal_cdf(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                + 67265.770927008700853)
                * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                + 39307.89580009271061)
                * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                + 0.0151986665636164571966)
                * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                + 1.8463183175100546818e-5)
                * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}
