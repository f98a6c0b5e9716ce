//! DMX512 universe frames.
//!
//! A serialized frame is the start code followed by all 512 channel slots,
//! 513 bytes in total. Channel numbers are 1-based on the public API.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHANNELS: usize = 512;
pub const FRAME_LEN: usize = CHANNELS + 1;
/// Start code for dimmer / fixture data.
pub const NULL_START_CODE: u8 = 0x00;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DmxError {
    #[error("channel {0} outside 1..=512")]
    ChannelOutOfRange(u16),
    #[error("frame must be {FRAME_LEN} bytes, got {0}")]
    FrameLength(usize),
}

/// Sparse channel update: channel number (1..=512) to value.
pub type Patch = BTreeMap<u16, u8>;

/// Serde adapter for patches nested in tagged enums. JSON object keys are
/// strings, and buffered tagged content will not reparse them as integers.
pub(crate) mod patch_keys {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: serde::Serializer>(patch: &Patch, s: S) -> Result<S::Ok, S::Error> {
        patch.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Patch, D::Error> {
        BTreeMap::<String, u8>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| match k.parse::<u16>() {
                Ok(ch) => Ok((ch, v)),
                Err(_) => Err(D::Error::custom(format!("channel key {k:?} is not a number"))),
            })
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DmxUniverse {
    start_code: u8,
    channels: [u8; CHANNELS],
}

impl Default for DmxUniverse {
    fn default() -> Self {
        DmxUniverse {
            start_code: NULL_START_CODE,
            channels: [0; CHANNELS],
        }
    }
}

impl std::fmt::Debug for DmxUniverse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lit: Vec<(usize, u8)> = self
            .channels
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(i, v)| (i + 1, *v))
            .collect();
        f.debug_struct("DmxUniverse")
            .field("start_code", &self.start_code)
            .field("nonzero", &lit)
            .finish()
    }
}

/// Whether a parsed frame carries ordinary level data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Dimmer,
    /// Alternate start code; levels were decoded but the frame should not be
    /// treated as dimmer data.
    NonDimmer(u8),
}

impl DmxUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_start_code(start_code: u8, channels: [u8; CHANNELS]) -> Self {
        DmxUniverse { start_code, channels }
    }

    pub fn start_code(&self) -> u8 {
        self.start_code
    }

    pub fn channels(&self) -> &[u8; CHANNELS] {
        &self.channels
    }

    pub fn get(&self, channel: u16) -> Result<u8, DmxError> {
        check_channel(channel)?;
        Ok(self.channels[channel as usize - 1])
    }

    pub fn kind(&self) -> FrameKind {
        if self.start_code == NULL_START_CODE {
            FrameKind::Dimmer
        } else {
            FrameKind::NonDimmer(self.start_code)
        }
    }

    /// Returns a copy with `patch` applied; `self` is left untouched.
    pub fn apply_patch(&self, patch: &Patch) -> Result<DmxUniverse, DmxError> {
        if let Some(&bad) = patch.keys().find(|&&c| check_channel(c).is_err()) {
            return Err(DmxError::ChannelOutOfRange(bad));
        }
        let mut out = self.clone();
        for (&channel, &value) in patch {
            out.channels[channel as usize - 1] = value;
        }
        Ok(out)
    }

    pub fn serialize(&self) -> [u8; FRAME_LEN] {
        let mut frame = [0u8; FRAME_LEN];
        frame[0] = self.start_code;
        frame[1..].copy_from_slice(&self.channels);
        frame
    }

    pub fn parse(bytes: &[u8]) -> Result<(DmxUniverse, FrameKind), DmxError> {
        if bytes.len() != FRAME_LEN {
            return Err(DmxError::FrameLength(bytes.len()));
        }
        let mut channels = [0u8; CHANNELS];
        channels.copy_from_slice(&bytes[1..]);
        let universe = DmxUniverse {
            start_code: bytes[0],
            channels,
        };
        let kind = universe.kind();
        Ok((universe, kind))
    }
}

fn check_channel(channel: u16) -> Result<(), DmxError> {
    if channel == 0 || channel as usize > CHANNELS {
        Err(DmxError::ChannelOutOfRange(channel))
    } else {
        Ok(())
    }
}

// Snapshots carry the universe as a plain list of levels.
impl Serialize for DmxUniverse {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            start_code: u8,
            channels: &'a [u8],
        }
        Repr {
            start_code: self.start_code,
            channels: &self.channels,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DmxUniverse {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            start_code: u8,
            channels: Vec<u8>,
        }
        let r = Repr::deserialize(d)?;
        let channels: [u8; CHANNELS] = r
            .channels
            .try_into()
            .map_err(|v: Vec<u8>| serde::de::Error::invalid_length(v.len(), &"512 channels"))?;
        Ok(DmxUniverse {
            start_code: r.start_code,
            channels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_universe_serializes_to_513_zeros() {
        let frame = DmxUniverse::new().serialize();
        assert_eq!(frame.len(), 513);
        assert!(frame.iter().all(|&b| b == 0));
    }

    #[test]
    fn empty_patch_is_identity() {
        let u = DmxUniverse::new().apply_patch(&Patch::from([(7, 9)])).unwrap();
        assert_eq!(u.apply_patch(&Patch::new()).unwrap(), u);
    }

    #[test]
    fn single_channel_patch() {
        let base = DmxUniverse::new();
        let u = base.apply_patch(&Patch::from([(1, 255)])).unwrap();
        assert_eq!(u.get(1).unwrap(), 255);
        assert!(u.channels()[1..].iter().all(|&b| b == 0));
        assert_eq!(base.get(1).unwrap(), 0);
    }

    #[test]
    fn patch_bounds() {
        let u = DmxUniverse::new();
        assert_eq!(u.apply_patch(&Patch::from([(0, 1)])), Err(DmxError::ChannelOutOfRange(0)));
        assert_eq!(u.apply_patch(&Patch::from([(513, 1)])), Err(DmxError::ChannelOutOfRange(513)));
        assert!(u.apply_patch(&Patch::from([(512, 1)])).is_ok());
    }

    #[test]
    fn overlapping_patches_last_writer_wins() {
        let u = DmxUniverse::new()
            .apply_patch(&Patch::from([(3, 10), (4, 11)]))
            .unwrap()
            .apply_patch(&Patch::from([(4, 99)]))
            .unwrap();
        assert_eq!((u.get(3).unwrap(), u.get(4).unwrap()), (10, 99));
    }

    #[test]
    fn nonzero_start_code_is_flagged() {
        let mut frame = DmxUniverse::new().serialize();
        frame[0] = 1;
        let (u, kind) = DmxUniverse::parse(&frame).unwrap();
        assert_eq!(kind, FrameKind::NonDimmer(1));
        assert_eq!(u.start_code(), 1);
    }

    #[test]
    fn wrong_length_is_a_frame_error() {
        assert_eq!(DmxUniverse::parse(&[0u8; 512]), Err(DmxError::FrameLength(512)));
        assert_eq!(DmxUniverse::parse(&[0u8; 514]), Err(DmxError::FrameLength(514)));
    }

    fn arb_patch() -> impl proptest::strategy::Strategy<Value = Patch> {
        proptest::collection::btree_map(1u16..=512, proptest::num::u8::ANY, 0..40)
    }

    proptest::proptest! {
        #[test]
        fn disjoint_patches_commute(a in arb_patch(), b in arb_patch()) {
            let b: Patch = b.into_iter().filter(|(k, _)| !a.contains_key(k)).collect();
            let u = DmxUniverse::new();
            let ab = u.apply_patch(&a).unwrap().apply_patch(&b).unwrap();
            let ba = u.apply_patch(&b).unwrap().apply_patch(&a).unwrap();
            proptest::prop_assert_eq!(ab, ba);
        }

        #[test]
        fn parse_inverts_serialize(start in proptest::num::u8::ANY, body in proptest::collection::vec(proptest::num::u8::ANY, 512)) {
            let u = DmxUniverse::with_start_code(start, body.try_into().unwrap());
            let (back, _) = DmxUniverse::parse(&u.serialize()).unwrap();
            proptest::prop_assert_eq!(back, u);
        }
    }
}
