//! k-mers, k-mer multisets and text representations.
//!
//! A multiset is held either as a plain list of occurrences or as distinct
//! k-mers paired with counts. Both forms store the k-mer bytes in one flat
//! buffer with stride `k`.

use std::collections::HashMap;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

pub const MIN_K: usize = 1;
pub const MAX_K: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    List,
    Frequency,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::List => "list",
            Mode::Frequency => "frequency",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "list" => Ok(Mode::List),
            "frequency" | "freq" => Ok(Mode::Frequency),
            other => Err(format!("unknown mode {other:?} (expected list or frequency)")),
        }
    }
}

/// Hash key for a word. DNA words of up to 32 bases pack into a `u64`;
/// everything else is keyed by its bytes. The choice depends only on the
/// bytes, so keys of equal words always compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum WordKey {
    Packed(u64),
    Bytes(Box<[u8]>),
}

const DNA_CODE: [u8; 256] = {
    let mut t = [u8::MAX; 256];
    t[b'A' as usize] = 0;
    t[b'C' as usize] = 1;
    t[b'G' as usize] = 2;
    t[b'T' as usize] = 3;
    t
};

/// 2-bit code of a DNA word of at most 32 bases. Codes of equal-length
/// words order like the words themselves.
#[inline]
pub(crate) fn dna_code(word: &[u8]) -> Option<u64> {
    if word.len() > 32 {
        return None;
    }
    let mut code = 0u64;
    let mut ok = true;
    for &b in word {
        let c = DNA_CODE[b as usize];
        ok &= c != u8::MAX;
        code = (code << 2) | (c & 3) as u64;
    }
    ok.then_some(code)
}

impl WordKey {
    #[inline]
    pub(crate) fn of(word: &[u8]) -> Self {
        match dna_code(word) {
            Some(code) => WordKey::Packed(code),
            None => WordKey::Bytes(word.into()),
        }
    }
}

/// A single word of exactly `k` alphabet symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KmerRecord(Box<[u8]>);

impl KmerRecord {
    pub fn new(bytes: &[u8], alphabet: &Alphabet) -> Result<Self> {
        check_k(bytes.len())?;
        alphabet.validate(bytes)?;
        Ok(Self(bytes.into()))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for KmerRecord {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Display for KmerRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if (MIN_K..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Error::KOutOfRange {
            k,
            min: MIN_K,
            max: MAX_K,
        })
    }
}

/// A multiset of k-mers in list or frequency form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmerMultiset {
    k: usize,
    data: Vec<u8>,
    /// `None` in list mode; one count per distinct record in frequency mode.
    counts: Option<Vec<u64>>,
}

impl KmerMultiset {
    /// Builds a list-mode multiset, validating every record.
    pub fn from_list<I, W>(k: usize, records: I, alphabet: &Alphabet) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[u8]>,
    {
        check_k(k)?;
        let mut data = Vec::new();
        for r in records {
            let r = r.as_ref();
            if r.len() != k {
                return Err(Error::KMismatch {
                    left: k,
                    right: r.len(),
                });
            }
            alphabet.validate(r)?;
            data.extend_from_slice(r);
        }
        Ok(Self {
            k,
            data,
            counts: None,
        })
    }

    /// Builds a frequency-mode multiset. Records must be distinct and every
    /// count at least one.
    pub fn from_frequency<I, W>(k: usize, pairs: I, alphabet: &Alphabet) -> Result<Self>
    where
        I: IntoIterator<Item = (W, u64)>,
        W: AsRef<[u8]>,
    {
        check_k(k)?;
        let mut data = Vec::new();
        let mut counts = Vec::new();
        let mut seen = HashMap::new();
        for (i, (r, c)) in pairs.into_iter().enumerate() {
            let r = r.as_ref();
            if r.len() != k {
                return Err(Error::KMismatch {
                    left: k,
                    right: r.len(),
                });
            }
            alphabet.validate(r)?;
            if c == 0 {
                return Err(Error::ZeroCount(i));
            }
            if seen.insert(WordKey::of(r), ()).is_some() {
                return Err(Error::DuplicateKmer(i));
            }
            data.extend_from_slice(r);
            counts.push(c);
        }
        Ok(Self {
            k,
            data,
            counts: Some(counts),
        })
    }

    /// Skips validation; `data.len()` must be a multiple of `k`.
    pub(crate) fn from_raw(k: usize, data: Vec<u8>, counts: Option<Vec<u64>>) -> Self {
        debug_assert_eq!(data.len() % k, 0);
        debug_assert!(counts
            .as_ref()
            .is_none_or(|c| c.len() * k == data.len()));
        Self { k, data, counts }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> Mode {
        if self.counts.is_some() {
            Mode::Frequency
        } else {
            Mode::List
        }
    }

    /// Number of stored entries: occurrences in list mode, distinct k-mers in
    /// frequency mode.
    pub fn len(&self) -> usize {
        self.data.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Total multiplicity |M|.
    pub fn total(&self) -> u64 {
        match &self.counts {
            None => self.len() as u64,
            Some(c) => c.iter().sum(),
        }
    }

    pub fn record(&self, i: usize) -> &[u8] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    /// Stored records, without expanding counts.
    pub fn records(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.k)
    }

    /// Counts in frequency mode.
    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    /// `(record, multiplicity)` per stored entry; list mode yields 1 each.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], u64)> + '_ {
        let counts = self.counts.as_deref();
        self.records()
            .enumerate()
            .map(move |(i, r)| (r, counts.map_or(1, |c| c[i])))
    }

    /// Groups equal k-mers, ordered by first occurrence.
    pub fn to_frequency(&self) -> KmerMultiset {
        if self.counts.is_some() {
            return self.clone();
        }
        let mut index: HashMap<WordKey, usize> = HashMap::with_capacity(self.len());
        let mut data = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for r in self.records() {
            let next = counts.len();
            let slot = *index.entry(WordKey::of(r)).or_insert(next);
            if slot == next {
                data.extend_from_slice(r);
                counts.push(1);
            } else {
                counts[slot] += 1;
            }
        }
        KmerMultiset::from_raw(self.k, data, Some(counts))
    }

    /// Expands counts into repeated occurrences, keeping entry order.
    pub fn to_list(&self) -> KmerMultiset {
        let Some(counts) = &self.counts else {
            return self.clone();
        };
        let total: u64 = counts.iter().sum();
        let mut data = Vec::with_capacity(total as usize * self.k);
        for (r, &c) in self.records().zip(counts) {
            for _ in 0..c {
                data.extend_from_slice(r);
            }
        }
        KmerMultiset::from_raw(self.k, data, None)
    }

    pub(crate) fn tally(&self) -> HashMap<WordKey, u64> {
        let mut map = HashMap::with_capacity(self.len());
        for (r, c) in self.entries() {
            *map.entry(WordKey::of(r)).or_insert(0) += c;
        }
        map
    }

    /// Weight of the list representation: `(k + 1)|M| - 1`.
    pub fn list_weight(&self) -> Result<u64> {
        match self.total() {
            0 => Err(Error::EmptyRepresentation),
            n => Ok((self.k as u64 + 1) * n - 1),
        }
    }
}

/// True iff both multisets have the same element-to-multiplicity map.
pub fn multiset_equal(a: &KmerMultiset, b: &KmerMultiset) -> Result<bool> {
    if a.k != b.k {
        return Err(Error::KMismatch {
            left: a.k,
            right: b.k,
        });
    }
    if a.total() != b.total() {
        return Ok(false);
    }
    Ok(a.tally() == b.tally())
}

/// Sliding windows of length `k`, left to right. No validation.
pub fn windows(text: &[u8], k: usize) -> std::slice::Windows<'_, u8> {
    text.windows(k)
}

/// All length-`k` windows of `text` as records.
pub fn puff(text: &[u8], k: usize, alphabet: &Alphabet) -> Result<Vec<KmerRecord>> {
    check_k(k)?;
    if text.len() < k {
        return Err(Error::Underlength {
            len: text.len(),
            k,
        });
    }
    alphabet.validate(text)?;
    Ok(text.windows(k).map(|w| KmerRecord(w.into())).collect())
}

/// `Σ|w| + |W| - 1`: characters plus one separator between consecutive words.
pub fn weight<I, W>(words: I) -> Result<u64>
where
    I: IntoIterator<Item = W>,
    W: AsRef<[u8]>,
{
    let (chars, n) = words
        .into_iter()
        .fold((0u64, 0u64), |(c, n), w| (c + w.as_ref().len() as u64, n + 1));
    if n == 0 {
        return Err(Error::EmptyRepresentation);
    }
    Ok(chars + n - 1)
}

/// An ordered multiset of strings, each at least `k` long, with an optional
/// count per k-mer window (frequency mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextRepresentation {
    k: usize,
    strings: Vec<Vec<u8>>,
    counts: Option<Vec<u64>>,
}

impl TextRepresentation {
    pub fn new(
        k: usize,
        strings: Vec<Vec<u8>>,
        counts: Option<Vec<u64>>,
        alphabet: &Alphabet,
    ) -> Result<Self> {
        check_k(k)?;
        for s in &strings {
            if s.len() < k {
                return Err(Error::Underlength { len: s.len(), k });
            }
            alphabet.validate(s)?;
        }
        let w = Self {
            k,
            strings,
            counts,
        };
        if let Some(c) = &w.counts {
            let windows = w.window_count();
            if c.len() as u64 != windows {
                return Err(Error::CountMismatch {
                    counts: c.len(),
                    windows: windows as usize,
                });
            }
            if let Some(i) = c.iter().position(|&x| x == 0) {
                return Err(Error::ZeroCount(i));
            }
        }
        Ok(w)
    }

    pub(crate) fn from_parts(k: usize, strings: Vec<Vec<u8>>, counts: Option<Vec<u64>>) -> Self {
        Self {
            k,
            strings,
            counts,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn mode(&self) -> Mode {
        if self.counts.is_some() {
            Mode::Frequency
        } else {
            Mode::List
        }
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// `Σ (|w| - k + 1)` over all strings.
    pub fn window_count(&self) -> u64 {
        self.strings
            .iter()
            .map(|s| (s.len() + 1).saturating_sub(self.k) as u64)
            .sum()
    }

    /// Weight of the strings alone.
    pub fn weight(&self) -> Result<u64> {
        weight(&self.strings)
    }

    pub fn into_parts(self) -> (usize, Vec<Vec<u8>>, Option<Vec<u64>>) {
        (self.k, self.strings, self.counts)
    }
}

/// Multiset union of the windows of every string.
///
/// Without counts the result is list-mode in scan order. With counts, the
/// i-th window is paired with the i-th count and equal k-mers are summed,
/// giving a frequency-mode multiset in first-occurrence order.
pub fn puff_multiset(w: &TextRepresentation, alphabet: &Alphabet) -> Result<KmerMultiset> {
    let k = w.k;
    check_k(k)?;
    for s in &w.strings {
        if s.len() < k {
            return Err(Error::Underlength { len: s.len(), k });
        }
        alphabet.validate(s)?;
    }
    let windows = w.window_count();
    match &w.counts {
        None => {
            let mut data = Vec::with_capacity(windows as usize * k);
            for s in &w.strings {
                for win in s.windows(k) {
                    data.extend_from_slice(win);
                }
            }
            Ok(KmerMultiset::from_raw(k, data, None))
        }
        Some(counts) => {
            if counts.len() as u64 != windows {
                return Err(Error::CountMismatch {
                    counts: counts.len(),
                    windows: windows as usize,
                });
            }
            let mut index: HashMap<WordKey, usize> = HashMap::new();
            let mut data = Vec::new();
            let mut summed: Vec<u64> = Vec::new();
            let all = w.strings.iter().flat_map(|s| s.windows(k));
            for (i, (win, &c)) in all.zip(counts).enumerate() {
                if c == 0 {
                    return Err(Error::ZeroCount(i));
                }
                let next = summed.len();
                let slot = *index.entry(WordKey::of(win)).or_insert(next);
                if slot == next {
                    data.extend_from_slice(win);
                    summed.push(c);
                } else {
                    summed[slot] += c;
                }
            }
            Ok(KmerMultiset::from_raw(k, data, Some(summed)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dna() -> Alphabet {
        Alphabet::dna()
    }

    fn strs(v: &[KmerRecord]) -> Vec<String> {
        v.iter().map(|r| r.to_string()).collect()
    }

    const TOY: [&str; 7] = ["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"];

    #[test]
    fn puff_examples() {
        let a = dna();
        assert_eq!(strs(&puff(b"ATAC", 4, &a).unwrap()), ["ATAC"]);
        assert_eq!(
            strs(&puff(b"CATCAT", 4, &a).unwrap()),
            ["CATC", "ATCA", "TCAT"]
        );
        assert_eq!(strs(&puff(b"AAAAA", 2, &a).unwrap()), ["AA"; 4]);
    }

    #[test]
    fn puff_errors() {
        let a = dna();
        assert!(matches!(
            puff(b"ATA", 4, &a),
            Err(Error::Underlength { len: 3, k: 4 })
        ));
        assert!(matches!(
            puff(b"ATNAC", 2, &a),
            Err(Error::AlphabetViolation { byte: b'N', .. })
        ));
    }

    #[test]
    fn puff_multiset_toy() {
        let a = dna();
        let w = TextRepresentation::new(
            4,
            ["ATAC", "CATCAT", "ATGA", "ATGCT"]
                .iter()
                .map(|s| s.as_bytes().to_vec())
                .collect(),
            None,
            &a,
        )
        .unwrap();
        let m = KmerMultiset::from_list(4, TOY, &a).unwrap();
        let p = puff_multiset(&w, &a).unwrap();
        assert_eq!(p.total(), 7);
        assert!(multiset_equal(&p, &m).unwrap());
    }

    #[test]
    fn puff_multiset_trivial_and_counted() {
        let a = dna();
        let w = TextRepresentation::new(2, vec![b"AA".to_vec()], None, &a).unwrap();
        let p = puff_multiset(&w, &a).unwrap();
        assert_eq!(p.records().collect::<Vec<_>>(), [b"AA"]);

        let w = TextRepresentation::new(2, vec![b"AAA".to_vec()], Some(vec![2, 3]), &a).unwrap();
        let p = puff_multiset(&w, &a).unwrap();
        assert_eq!(p.mode(), Mode::Frequency);
        assert_eq!(p.entries().collect::<Vec<_>>(), [(&b"AA"[..], 5)]);
        // re-expansion: [AA, AA] with counts [2, 3] is five copies of AA
        let expanded: Vec<&[u8]> = vec![b"AA"; 2 + 3];
        let oracle = KmerMultiset::from_list(2, expanded, &a).unwrap();
        assert!(multiset_equal(&p, &oracle).unwrap());
    }

    #[test]
    fn counts_length_mismatch() {
        let a = dna();
        assert!(matches!(
            TextRepresentation::new(2, vec![b"AAA".to_vec()], Some(vec![1]), &a),
            Err(Error::CountMismatch { counts: 1, windows: 2 })
        ));
        let w = TextRepresentation::from_parts(2, vec![b"AAA".to_vec()], Some(vec![1]));
        assert!(puff_multiset(&w, &a).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(["ATGC", "ACGA", "ACGTA"]).unwrap(), 15);
        assert_eq!(weight(["A"]).unwrap(), 1);
        assert_eq!(weight(TOY).unwrap(), 34);
        assert!(matches!(
            weight(Vec::<&[u8]>::new()),
            Err(Error::EmptyRepresentation)
        ));
        let m = KmerMultiset::from_list(4, TOY, &dna()).unwrap();
        assert_eq!(m.list_weight().unwrap(), 34);
    }

    #[test]
    fn to_frequency_example() {
        let a = dna();
        let m = KmerMultiset::from_list(2, ["AA", "AT", "GC", "AA", "AA", "GC"], &a).unwrap();
        let f = m.to_frequency();
        assert_eq!(
            f.entries().collect::<Vec<_>>(),
            [(&b"AA"[..], 3), (&b"AT"[..], 1), (&b"GC"[..], 2)]
        );
        assert_eq!(f.total(), 6);

        let one = KmerMultiset::from_frequency(2, [("AA", 1)], &a).unwrap();
        assert_eq!(one.to_list().records().collect::<Vec<_>>(), [b"AA"]);
    }

    #[test]
    fn frequency_validation() {
        let a = dna();
        assert!(matches!(
            KmerMultiset::from_frequency(2, [("AA", 1), ("AA", 2)], &a),
            Err(Error::DuplicateKmer(1))
        ));
        assert!(matches!(
            KmerMultiset::from_frequency(2, [("AA", 0)], &a),
            Err(Error::ZeroCount(0))
        ));
        assert!(KmerMultiset::from_list(2, ["AAA"], &a).is_err());
        assert!(KmerMultiset::from_list(2, ["AN"], &a).is_err());
    }

    #[test]
    fn multiset_equal_examples() {
        let a = dna();
        let l = KmerMultiset::from_list(2, ["AA", "AT"], &a).unwrap();
        let f = KmerMultiset::from_frequency(2, [("AT", 1), ("AA", 1)], &a).unwrap();
        assert!(multiset_equal(&l, &f).unwrap());
        let two = KmerMultiset::from_list(2, ["AA", "AA"], &a).unwrap();
        let one = KmerMultiset::from_list(2, ["AA"], &a).unwrap();
        assert!(!multiset_equal(&two, &one).unwrap());
        let k3 = KmerMultiset::from_list(3, ["AAA"], &a).unwrap();
        assert!(matches!(
            multiset_equal(&one, &k3),
            Err(Error::KMismatch { .. })
        ));
    }

    #[test]
    fn long_kmers_use_byte_keys() {
        let a = dna();
        let long = "ACGT".repeat(20);
        let m = KmerMultiset::from_list(80, [&long, &long], &a).unwrap();
        let f = m.to_frequency();
        assert_eq!(f.len(), 1);
        assert_eq!(f.counts(), Some(&[2][..]));
    }

    fn sorted_records(m: &KmerMultiset) -> Vec<Vec<u8>> {
        let mut v: Vec<Vec<u8>> = m.to_list().records().map(|r| r.to_vec()).collect();
        v.sort();
        v
    }

    fn kmer_list(k: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), k),
            1..60,
        )
    }

    proptest! {
        #[test]
        fn frequency_round_trip_is_permutation(k in 1usize..6, seed in kmer_list(5)) {
            let a = dna();
            let recs: Vec<Vec<u8>> = seed.into_iter().map(|mut r| { r.truncate(k); r }).collect();
            let m = KmerMultiset::from_list(k, &recs, &a).unwrap();
            let back = m.to_frequency().to_list();
            prop_assert!(multiset_equal(&m, &back).unwrap());
            // independent check: sorted occurrence lists agree
            prop_assert_eq!(sorted_records(&m), sorted_records(&back));
            prop_assert_eq!(m.to_frequency().total(), m.total());
        }

        #[test]
        fn puff_length(text in prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 1..80), k in 1usize..10) {
            prop_assume!(text.len() >= k);
            let p = puff(&text, k, &dna()).unwrap();
            prop_assert_eq!(p.len(), text.len() - k + 1);
        }

        #[test]
        fn list_weight_identity(recs in kmer_list(4)) {
            let m = KmerMultiset::from_list(4, &recs, &dna()).unwrap();
            prop_assert_eq!(weight(&recs).unwrap(), 5 * recs.len() as u64 - 1);
            prop_assert_eq!(m.list_weight().unwrap(), weight(&recs).unwrap());
        }

        #[test]
        fn puff_multiset_order_insensitive(mut strings in prop::collection::vec(
            prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 3..12), 1..8)) {
            let a = dna();
            let w1 = TextRepresentation::new(3, strings.clone(), None, &a).unwrap();
            strings.reverse();
            let w2 = TextRepresentation::new(3, strings, None, &a).unwrap();
            prop_assert!(multiset_equal(&puff_multiset(&w1, &a).unwrap(), &puff_multiset(&w2, &a).unwrap()).unwrap());
        }
    }
}
