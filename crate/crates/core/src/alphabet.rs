//! Symbol sets and the reserved separator/terminator bytes.

use crate::error::{Error, Result};

const NOT_A_SYMBOL: u8 = u8::MAX;

/// An ordered set of symbol bytes plus the two reserved framing bytes.
///
/// The symbol rank (position in `symbols`) is what the packed k-mer keys
/// encode; comparisons of labels always use plain byte order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    separator: u8,
    terminator: u8,
    rank: [u8; 256],
    bits: u32,
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::dna()
    }
}

impl Alphabet {
    pub const DEFAULT_SEPARATOR: u8 = b',';
    pub const DEFAULT_TERMINATOR: u8 = b'$';

    /// `A`, `C`, `G`, `T` with `,` and `$`.
    pub fn dna() -> Self {
        Self::new(b"ACGT", Self::DEFAULT_SEPARATOR, Self::DEFAULT_TERMINATOR)
            .expect("default alphabet is valid")
    }

    pub fn new(symbols: &[u8], separator: u8, terminator: u8) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("no symbols".into()));
        }
        if symbols.len() > 64 {
            return Err(Error::InvalidAlphabet(format!(
                "{} symbols exceeds the limit of 64",
                symbols.len()
            )));
        }
        if separator == terminator {
            return Err(Error::InvalidAlphabet(
                "separator and terminator must differ".into(),
            ));
        }
        let mut rank = [NOT_A_SYMBOL; 256];
        for (i, &b) in symbols.iter().enumerate() {
            if b == separator || b == terminator {
                return Err(Error::InvalidAlphabet(format!(
                    "symbol {:?} collides with a framing byte",
                    b as char
                )));
            }
            if rank[b as usize] != NOT_A_SYMBOL {
                return Err(Error::InvalidAlphabet(format!(
                    "duplicate symbol {:?}",
                    b as char
                )));
            }
            rank[b as usize] = i as u8;
        }
        let bits = usize::BITS - (symbols.len() - 1).leading_zeros();
        Ok(Self {
            symbols: symbols.to_vec(),
            separator,
            terminator,
            rank,
            bits: bits.max(1),
        })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn separator(&self) -> u8 {
        self.separator
    }

    pub fn terminator(&self) -> u8 {
        self.terminator
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn contains(&self, b: u8) -> bool {
        self.rank[b as usize] != NOT_A_SYMBOL
    }

    #[inline]
    pub fn rank(&self, b: u8) -> Option<u8> {
        match self.rank[b as usize] {
            NOT_A_SYMBOL => None,
            r => Some(r),
        }
    }

    /// Bits per symbol in a packed key.
    pub fn bits_per_symbol(&self) -> u32 {
        self.bits
    }

    /// Whether words of `len` symbols fit in a single `u64` key.
    pub fn packs(&self, len: usize) -> bool {
        (len as u64) * (self.bits as u64) <= 64
    }

    /// Checks every byte of `word`, reporting the first offending offset.
    pub fn validate(&self, word: &[u8]) -> Result<()> {
        match word.iter().position(|&b| !self.contains(b)) {
            None => Ok(()),
            Some(offset) => Err(Error::AlphabetViolation {
                byte: word[offset],
                offset,
            }),
        }
    }

    /// Rank code of a word, most significant symbol first; inverse of
    /// [`Alphabet::unrank`]. The word must be over the alphabet and
    /// `packs(word.len())` must hold.
    #[inline]
    pub fn pack(&self, word: &[u8]) -> u64 {
        let mut code = 0u64;
        for &b in word {
            code = (code << self.bits) | self.rank[b as usize] as u64;
        }
        code
    }

    /// Number of distinct words of length `k`, if it fits in a `u64`.
    pub fn space_size(&self, k: usize) -> Option<u64> {
        (self.symbols.len() as u64).checked_pow(u32::try_from(k).ok()?)
    }

    /// The `index`-th word of length `k` in rank order (base-|Σ| digits).
    pub fn unrank(&self, mut index: u64, k: usize) -> Vec<u8> {
        let base = self.symbols.len() as u64;
        let mut word = vec![self.symbols[0]; k];
        for slot in word.iter_mut().rev() {
            *slot = self.symbols[(index % base) as usize];
            index /= base;
        }
        word
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bytes() {
        let a = Alphabet::default();
        assert_eq!(a.symbols(), &[0x41, 0x43, 0x47, 0x54]);
        assert_eq!(a.separator(), 0x2C);
        assert_eq!(a.terminator(), 0x24);
        assert_eq!(a.bits_per_symbol(), 2);
        assert!(a.packs(32));
        assert!(!a.packs(33));
    }

    #[test]
    fn rejects_bad_alphabets() {
        assert!(Alphabet::new(b"", b',', b'$').is_err());
        assert!(Alphabet::new(b"AA", b',', b'$').is_err());
        assert!(Alphabet::new(b"A,", b',', b'$').is_err());
        assert!(Alphabet::new(b"A$", b',', b'$').is_err());
        assert!(Alphabet::new(b"AC", b'$', b'$').is_err());
    }

    #[test]
    fn single_symbol_still_uses_one_bit() {
        let a = Alphabet::new(b"A", b',', b'$').unwrap();
        assert_eq!(a.bits_per_symbol(), 1);
        let a = Alphabet::new(b"ACG", b',', b'$').unwrap();
        assert_eq!(a.bits_per_symbol(), 2);
    }

    #[test]
    fn validate_reports_offset() {
        let a = Alphabet::dna();
        assert!(a.validate(b"ACGT").is_ok());
        match a.validate(b"ACNT") {
            Err(Error::AlphabetViolation { byte: b'N', offset: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pack_preserves_lexicographic_order() {
        let a = Alphabet::dna();
        let mut words: Vec<&[u8]> = vec![b"TGA", b"ATA", b"CAT", b"ATG", b"GCT"];
        let mut by_code = words.clone();
        words.sort();
        by_code.sort_by_key(|w| a.pack(w));
        assert_eq!(words, by_code);
    }

    #[test]
    fn unrank_enumerates_in_order() {
        let a = Alphabet::dna();
        assert_eq!(a.unrank(0, 3), b"AAA");
        assert_eq!(a.unrank(63, 3), b"TTT");
        assert_eq!(a.unrank(6, 2), b"CG");
        for i in 0..64 {
            assert_eq!(a.pack(&a.unrank(i, 3)), i);
        }
    }
}
