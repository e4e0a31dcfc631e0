//! Splittable, schedule-independent randomness keyed by tree position.
//!
//! Every node owns a 64-bit key derived from the run seed and its bit
//! string: `key(σb) = mix(key(σ) ^ salt(b))`. Draws for a node come from
//! `mix(key ^ stream)`, so a node's randomness never depends on the order in
//! which other nodes were visited.

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const CHILD_SALT: [u64; 2] = [0x243F_6A88_85A3_08D3, 0x1319_8A2E_0370_7344];

/// Independent draw streams attached to a node key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    ClaspA = 1,
    ClaspB = 2,
    Branch = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeKey(pub u64);

impl NodeKey {
    pub fn root(seed: u64) -> Self {
        NodeKey(mix(seed ^ 0xA076_1D64_78BD_642F))
    }

    /// Root key for an independent sampled path.
    pub fn path_root(seed: u64, path: u64) -> Self {
        NodeKey(mix(mix(seed ^ 0xE703_7ED1_A0B4_28DB).wrapping_add(path)))
    }

    pub fn child(self, bit: u8) -> Self {
        NodeKey(mix(self.0 ^ CHILD_SALT[bit as usize & 1]))
    }

    pub fn draw(self, stream: Stream) -> u64 {
        mix(self.0 ^ (stream as u64).wrapping_mul(0x5851_F42D_4C95_7F2D))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(self, stream: Stream) -> f64 {
        (self.draw(stream) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
