use std::fmt::Debug;
use std::ops::Add;

use crate::graph::Graph;

/// How distances are represented in an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// 32-bit hop counts on unweighted graphs.
    Hops,
    /// IEEE-754 doubles on weighted graphs.
    Real,
}

impl DistanceKind {
    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Hops => "hops",
            DistanceKind::Real => "real",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            DistanceKind::Hops => 0,
            DistanceKind::Real => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(DistanceKind::Hops),
            1 => Some(DistanceKind::Real),
            _ => None,
        }
    }
}

/// Distance values stored in an oracle.
///
/// Implemented for `u32` (hop counts, unweighted graphs only) and `f64`
/// (edge weights). Values are always non-negative, which keeps
/// [`Distance::order_key`] monotone.
pub trait Distance: Copy + PartialOrd + Add<Output = Self> + Debug + Send + Sync + 'static {
    const ZERO: Self;
    const INFINITY: Self;
    /// Every edge has length one; breadth-first search is exact.
    const HOPS: bool;
    const KIND: DistanceKind;
    /// Encoded width in bytes.
    const WIDTH: usize;

    fn edge(g: &Graph, edge: usize) -> Self;
    fn from_hops(hops: u32) -> Self;
    fn to_f64(self) -> f64;
    /// Monotone integer key for priority queues.
    fn order_key(self) -> u64;
    fn write_le(self, out: &mut Vec<u8>);
    /// Reads from the first [`Distance::WIDTH`] bytes.
    fn read_le(bytes: &[u8]) -> Self;

    fn is_finite(self) -> bool {
        self < Self::INFINITY
    }
}

impl Distance for u32 {
    const ZERO: Self = 0;
    const INFINITY: Self = u32::MAX;
    const HOPS: bool = true;
    const KIND: DistanceKind = DistanceKind::Hops;
    const WIDTH: usize = 4;

    #[inline]
    fn edge(_: &Graph, _: usize) -> Self {
        1
    }
    fn from_hops(hops: u32) -> Self {
        hops
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn order_key(self) -> u64 {
        self as u64
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        u32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Distance for f64 {
    const ZERO: Self = 0.0;
    const INFINITY: Self = f64::INFINITY;
    const HOPS: bool = false;
    const KIND: DistanceKind = DistanceKind::Real;
    const WIDTH: usize = 8;

    #[inline]
    fn edge(g: &Graph, edge: usize) -> Self {
        g.weight(edge)
    }
    fn from_hops(hops: u32) -> Self {
        hops as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    // Bit patterns of non-negative doubles sort like the values.
    #[inline]
    fn order_key(self) -> u64 {
        self.to_bits()
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bits().to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_bits(u64::from_le_bytes(bytes[..8].try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_order_key_is_monotone() {
        let values = [0.0, 1e-300, 0.5, 1.0, 2.5, 1e12, f64::INFINITY];
        for pair in values.windows(2) {
            assert!(pair[0].order_key() < pair[1].order_key());
        }
    }

    #[test]
    fn encoding_round_trips() {
        let mut buf = Vec::new();
        2.75f64.write_le(&mut buf);
        17u32.write_le(&mut buf);
        assert_eq!(f64::read_le(&buf), 2.75);
        assert_eq!(u32::read_le(&buf[8..]), 17);
    }
}
