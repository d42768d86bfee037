//! Hash keys for range bookkeeping. Small dimensions pack a point into one
//! `u64`; everything else falls back to a boxed coordinate slice.

use std::hash::Hash;

pub(crate) trait RangeKey: Sync {
    type Key: Hash + Eq + Send;
    fn key(&self, x: &[i64]) -> Self::Key;
}

/// `d ≤ 4` coordinates in `64 / d` bits each, offset to be nonnegative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Packed {
    bits: u32,
    offset: i64,
}

impl Packed {
    /// A packing that can hold every coordinate with `|x_i| ≤ max_abs`.
    pub(crate) fn for_range(d: usize, max_abs: u64) -> Option<Packed> {
        if d == 0 || d > 4 {
            return None;
        }
        let bits = 64 / d as u32;
        let offset = 1i64 << (bits - 1);
        (max_abs < offset as u64).then_some(Packed { bits, offset })
    }
}

impl RangeKey for Packed {
    type Key = u64;

    #[inline]
    fn key(&self, x: &[i64]) -> u64 {
        let mut k = 0u64;
        for (i, &c) in x.iter().enumerate() {
            k |= ((c + self.offset) as u64) << (i as u32 * self.bits);
        }
        k
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Generic;

impl RangeKey for Generic {
    type Key = Box<[i64]>;

    #[inline]
    fn key(&self, x: &[i64]) -> Box<[i64]> {
        x.into()
    }
}

/// Calls the generic `$body` with the best available key type in scope as `$k`.
macro_rules! with_range_key {
    ($d:expr, $max_abs:expr, |$k:ident| $body:expr) => {
        match $crate::mc::keys::Packed::for_range($d, $max_abs) {
            Some(packed) => {
                let $k = packed;
                $body
            }
            None => {
                let $k = $crate::mc::keys::Generic;
                $body
            }
        }
    };
}
pub(crate) use with_range_key;
