//! Burrows-Wheeler transform and run-length coding of the concatenated text.

mod bwt;
mod rle;
mod sais;

pub use bwt::{bwt_forward, bwt_inverse};
pub use rle::{rle_decode, rle_decode_tokens, rle_encode, rle_serialize, rle_tokens, RleToken};
pub use sais::suffix_array;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Output of each codec stage for one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodecBlock {
    /// Strings joined by the separator, followed by the terminator.
    pub payload: Vec<u8>,
    pub transformed: Vec<u8>,
    pub rle: Vec<u8>,
}

impl CodecBlock {
    pub fn encode(payload: Vec<u8>, terminator: u8) -> Result<Self> {
        let transformed = bwt_forward(&payload, terminator)?;
        let rle = rle_encode(&transformed)?;
        Ok(Self {
            payload,
            transformed,
            rle,
        })
    }

    /// Inverts the RLE and BWT stages.
    pub fn decode(rle: &[u8], terminator: u8) -> Result<Vec<u8>> {
        let transformed = rle_decode(rle)?;
        bwt_inverse(&transformed, terminator)
    }
}

/// `w1,w2,...,wn$` under the alphabet's framing bytes.
pub fn concatenate<W: AsRef<[u8]>>(words: &[W], alphabet: &Alphabet) -> Vec<u8> {
    let len: usize = words.iter().map(|w| w.as_ref().len() + 1).sum();
    let mut out = Vec::with_capacity(len.max(1));
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            out.push(alphabet.separator());
        }
        out.extend_from_slice(w.as_ref());
    }
    out.push(alphabet.terminator());
    out
}

/// Inverse of [`concatenate`].
pub fn split_payload(payload: &[u8], alphabet: &Alphabet) -> Result<Vec<Vec<u8>>> {
    let body = match payload.split_last() {
        Some((&t, body)) if t == alphabet.terminator() => body,
        _ => return Err(Error::TerminatorNotFinal),
    };
    if body.is_empty() {
        return Ok(Vec::new());
    }
    Ok(body
        .split(|&b| b == alphabet.separator())
        .map(<[u8]>::to_vec)
        .collect())
}
