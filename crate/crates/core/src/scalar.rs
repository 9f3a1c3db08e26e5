//! Numeric abstractions shared by every algorithm in the crate.
//!
//! Edge capacities are exact unsigned integers. Everything that accumulates
//! capacities (cut values, flow values, volumes) is generic over
//! [`Capacity`], so the same code runs on `u32`, `u64` or `u128` graphs.
//! Expansion parameters are exact rationals ([`Phi`]).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{PrimInt, Unsigned};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Integer edge capacity.
pub trait Capacity:
    PrimInt
    + Unsigned
    + Sum
    + Debug
    + Display
    + Hash
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts a `u64` into this type, saturating at `max_value`.
    fn saturating_from_u64(v: u64) -> Self {
        Self::from(v).unwrap_or_else(Self::max_value)
    }

    /// Lossless widening to `u128`.
    fn widen(self) -> u128 {
        self.to_u128().expect("capacity fits u128")
    }
}

impl<T> Capacity for T where
    T: PrimInt
        + Unsigned
        + Sum
        + Debug
        + Display
        + Hash
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

/// Exact expansion parameter.
pub type Phi = Ratio<u64>;

/// Parses `"a/b"` or `"a"` into a [`Phi`].
pub fn parse_phi(text: &str) -> Option<Phi> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim().parse().ok()?, b.trim().parse().ok()?),
        None => (text.parse().ok()?, 1u64),
    };
    if den == 0 {
        return None;
    }
    Some(Phi::new(num, den))
}

/// Serializes a [`Phi`] as `"a/b"` (or `"a"` when integral).
pub mod phi_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{parse_phi, Phi};

    pub fn serialize<S: Serializer>(phi: &Phi, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(phi)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Phi, D::Error> {
        let text = String::deserialize(d)?;
        parse_phi(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

/// [`phi_string`] for optional values.
pub mod phi_string_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Phi;

    pub fn serialize<S: Serializer>(phi: &Option<Phi>, s: S) -> Result<S::Ok, S::Error> {
        match phi {
            Some(p) => s.collect_str(p),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Phi>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::phi_string")] Phi);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Smallest `t` with `2^t >= x` for `x >= 1`; `0` for `x <= 1`.
pub fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// `ceil(mult * log2 n)`, at least 1.
pub fn log_trials(n: usize, mult: u32) -> usize {
    if n <= 1 {
        return 1;
    }
    let t = (mult as f64 * (n as f64).log2()).ceil() as usize;
    t.max(1)
}
