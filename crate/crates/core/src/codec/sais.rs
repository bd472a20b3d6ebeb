// Suffix array by induced sorting (SA-IS), linear time.
//
// Suffixes compare as plain byte strings, a proper prefix sorting first.
// Work arrays use 32-bit indices whenever the text allows it.

pub(crate) trait Sym: Copy {
    fn get(self) -> usize;
}

pub(crate) trait Idx: Sym + Eq {
    const NONE: Self;
    fn from_usize(i: usize) -> Self;
}

macro_rules! sym {
    ($($t:ty),*) => {$(
        impl Sym for $t {
            #[inline]
            fn get(self) -> usize {
                self as usize
            }
        }
    )*};
}
sym!(u8, u32, usize);

impl Idx for u32 {
    const NONE: Self = u32::MAX;
    #[inline]
    fn from_usize(i: usize) -> Self {
        i as u32
    }
}

impl Idx for usize {
    const NONE: Self = usize::MAX;
    #[inline]
    fn from_usize(i: usize) -> Self {
        i
    }
}

pub fn suffix_array(text: &[u8]) -> Vec<usize> {
    if fits_u32(text.len()) {
        suffix_array_with::<u32>(text)
            .into_iter()
            .map(|i| i as usize)
            .collect()
    } else {
        suffix_array_with::<usize>(text)
    }
}

pub(crate) fn fits_u32(n: usize) -> bool {
    n < u32::MAX as usize
}

pub(crate) fn suffix_array_with<I: Idx>(text: &[u8]) -> Vec<I> {
    sa_is::<I, u8>(text, 255)
}

fn sa_is<I: Idx, S: Sym>(s: &[S], upper: usize) -> Vec<I> {
    let n = s.len();
    let at = |i: usize| s[i].get();
    match n {
        0 => return Vec::new(),
        1 => return vec![I::from_usize(0)],
        2 => {
            let (a, b) = (I::from_usize(0), I::from_usize(1));
            return if at(0) < at(1) { vec![a, b] } else { vec![b, a] };
        }
        _ => {}
    }

    // true = S-type
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if at(i) == at(i + 1) {
            ls[i + 1]
        } else {
            at(i) < at(i + 1)
        };
    }

    // bucket starts for S-type (sum_s) and L-type (sum_l) suffixes
    let mut sum_l = vec![0usize; upper + 1];
    let mut sum_s = vec![0usize; upper + 1];
    for i in 0..n {
        if !ls[i] {
            sum_s[at(i)] += 1;
        } else {
            sum_l[at(i) + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let mut sa = vec![I::NONE; n];
    let induce = |lms: &[I], sa: &mut [I]| {
        sa.fill(I::NONE);
        let mut buf = sum_s.clone();
        for &d in lms {
            let d = d.get();
            if d == n {
                continue;
            }
            sa[buf[at(d)]] = I::from_usize(d);
            buf[at(d)] += 1;
        }
        buf.copy_from_slice(&sum_l);
        sa[buf[at(n - 1)]] = I::from_usize(n - 1);
        buf[at(n - 1)] += 1;
        for i in 0..n {
            let v = sa[i];
            if v != I::NONE && v.get() >= 1 && !ls[v.get() - 1] {
                let c = at(v.get() - 1);
                sa[buf[c]] = I::from_usize(v.get() - 1);
                buf[c] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v != I::NONE && v.get() >= 1 && ls[v.get() - 1] {
                let c = at(v.get() - 1) + 1;
                buf[c] -= 1;
                sa[buf[c]] = I::from_usize(v.get() - 1);
            }
        }
    };

    let mut lms_map = vec![I::NONE; n + 1];
    let mut lms: Vec<I> = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = I::from_usize(lms.len());
            lms.push(I::from_usize(i));
        }
    }
    let m = lms.len();

    induce(&lms, &mut sa);

    if m > 0 {
        let sorted_lms: Vec<usize> = sa
            .iter()
            .filter(|&&v| v != I::NONE && lms_map[v.get()] != I::NONE)
            .map(|v| v.get())
            .collect();

        // name LMS substrings; equal substrings share a name
        let mut rec_s = vec![I::from_usize(0); m];
        let mut rec_upper = 0;
        for i in 1..m {
            let (mut l, mut r) = (sorted_lms[i - 1], sorted_lms[i]);
            let next = |p: usize| {
                let j = lms_map[p].get() + 1;
                if j < m {
                    lms[j].get()
                } else {
                    n
                }
            };
            let (end_l, end_r) = (next(l), next(r));
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l && at(l) == at(r) {
                    l += 1;
                    r += 1;
                }
                if l == n || at(l) != at(r) {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i]].get()] = I::from_usize(rec_upper);
        }
        drop(sorted_lms);
        drop(lms_map);

        let rec_sa: Vec<I> = sa_is(&rec_s, rec_upper);
        drop(rec_s);
        let sorted_lms: Vec<I> = rec_sa.iter().map(|&i| lms[i.get()]).collect();
        induce(&sorted_lms, &mut sa);
    }
    sa
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(text: &[u8]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..text.len()).collect();
        sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        sa
    }

    #[test]
    fn small_cases() {
        assert!(suffix_array(b"").is_empty());
        assert_eq!(suffix_array(b"a"), [0]);
        assert_eq!(suffix_array(b"ba"), [1, 0]);
        assert_eq!(suffix_array(b"banana"), naive(b"banana"));
        assert_eq!(suffix_array(b"BANANA$"), [6, 5, 3, 1, 0, 4, 2]);
        assert_eq!(suffix_array(b"aaaaaaaa"), naive(b"aaaaaaaa"));
        assert_eq!(suffix_array(b"mississippi"), naive(b"mississippi"));
        assert_eq!(suffix_array(b"abracadabra"), naive(b"abracadabra"));
    }

    proptest! {
        #[test]
        fn matches_naive_small_alphabet(text in prop::collection::vec(0u8..3, 0..300)) {
            prop_assert_eq!(suffix_array(&text), naive(&text));
        }

        #[test]
        fn matches_naive_bytes(text in prop::collection::vec(any::<u8>(), 0..300)) {
            prop_assert_eq!(suffix_array(&text), naive(&text));
        }

        #[test]
        fn matches_naive_repetitive(unit in prop::collection::vec(b'A'..=b'D', 1..6), reps in 1usize..40) {
            let text: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
            prop_assert_eq!(suffix_array(&text), naive(&text));
        }
    }
}
