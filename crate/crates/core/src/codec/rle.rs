//! Run-length coding: each maximal run is its symbol, followed by the run
//! length in decimal only when the run is 2 or longer. Symbols are never
//! ASCII digits, so the stream is self-delimiting.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RleToken {
    pub symbol: u8,
    pub run: u64,
}

pub fn rle_tokens(s: &[u8]) -> Result<Vec<RleToken>> {
    if let Some(i) = s.iter().position(u8::is_ascii_digit) {
        return Err(Error::RleAlphabetClash(i));
    }
    let mut tokens: Vec<RleToken> = Vec::new();
    for &b in s {
        match tokens.last_mut() {
            Some(t) if t.symbol == b => t.run += 1,
            _ => tokens.push(RleToken { symbol: b, run: 1 }),
        }
    }
    Ok(tokens)
}

pub fn rle_serialize(tokens: &[RleToken]) -> Vec<u8> {
    let mut out = Vec::with_capacity(tokens.len() * 2);
    for t in tokens {
        out.push(t.symbol);
        if t.run >= 2 {
            out.extend_from_slice(t.run.to_string().as_bytes());
        }
    }
    out
}

pub fn rle_encode(s: &[u8]) -> Result<Vec<u8>> {
    Ok(rle_serialize(&rle_tokens(s)?))
}

pub fn rle_decode_tokens(e: &[u8]) -> Result<Vec<RleToken>> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < e.len() {
        let symbol = e[i];
        if symbol.is_ascii_digit() {
            return Err(Error::RleMalformed {
                offset: i,
                reason: "run length without a symbol",
            });
        }
        i += 1;
        let start = i;
        while i < e.len() && e[i].is_ascii_digit() {
            i += 1;
        }
        let run = if start == i {
            1
        } else {
            if e[start] == b'0' {
                return Err(Error::RleMalformed {
                    offset: start,
                    reason: "run length with a leading zero",
                });
            }
            let mut run: u64 = 0;
            for &d in &e[start..i] {
                run = run
                    .checked_mul(10)
                    .and_then(|r| r.checked_add((d - b'0') as u64))
                    .ok_or(Error::RleMalformed {
                        offset: start,
                        reason: "run length overflows",
                    })?;
            }
            if run < 2 {
                return Err(Error::RleMalformed {
                    offset: start,
                    reason: "explicit run length below 2",
                });
            }
            run
        };
        tokens.push(RleToken { symbol, run });
    }
    Ok(tokens)
}

pub fn rle_decode(e: &[u8]) -> Result<Vec<u8>> {
    let tokens = rle_decode_tokens(e)?;
    let total = tokens
        .iter()
        .try_fold(0usize, |acc, t| acc.checked_add(usize::try_from(t.run).ok()?))
        .ok_or(Error::RleMalformed {
            offset: 0,
            reason: "decoded length overflows",
        })?;
    let mut out = Vec::with_capacity(total);
    for t in tokens {
        out.extend(std::iter::repeat_n(t.symbol, t.run as usize));
    }
    Ok(out)
}
