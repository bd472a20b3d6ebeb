use super::sais::{fits_u32, suffix_array_with};
use crate::error::{Error, Result};

fn check_terminator(s: &[u8], terminator: u8) -> Result<()> {
    let count = s.iter().filter(|&&b| b == terminator).count();
    if count != 1 {
        return Err(Error::TerminatorCount(count));
    }
    Ok(())
}

/// Last column of the sorted cyclic-rotation matrix of `s` (byte order).
///
/// `s` must end with its only occurrence of `terminator`. With a unique
/// final terminator, rotation order equals suffix order, so the column is
/// read off the suffix array.
pub fn bwt_forward(s: &[u8], terminator: u8) -> Result<Vec<u8>> {
    check_terminator(s, terminator)?;
    if s.last() != Some(&terminator) {
        return Err(Error::TerminatorNotFinal);
    }
    let n = s.len();
    let prev = |i: usize| s[(i + n - 1) % n];
    Ok(if fits_u32(n) {
        suffix_array_with::<u32>(s)
            .into_iter()
            .map(|i| prev(i as usize))
            .collect()
    } else {
        suffix_array_with::<usize>(s).into_iter().map(prev).collect()
    })
}

/// Inverts [`bwt_forward`] by LF-mapping. The row holding the terminator in
/// the last column is the original string, so no primary index is needed.
pub fn bwt_inverse(l: &[u8], terminator: u8) -> Result<Vec<u8>> {
    check_terminator(l, terminator)?;
    let n = l.len();

    let mut first = [0usize; 256];
    for &b in l {
        first[b as usize] += 1;
    }
    let mut acc = 0;
    for slot in first.iter_mut() {
        let c = *slot;
        *slot = acc;
        acc += c;
    }
    let mut seen = [0usize; 256];
    let lf: Vec<usize> = l
        .iter()
        .map(|&b| {
            let r = first[b as usize] + seen[b as usize];
            seen[b as usize] += 1;
            r
        })
        .collect();

    let mut row = l
        .iter()
        .position(|&b| b == terminator)
        .expect("terminator checked");
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = l[row];
        row = lf[row];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(s: &[u8]) -> Vec<u8> {
        let n = s.len();
        let mut rots: Vec<Vec<u8>> = (0..n)
            .map(|i| s[i..].iter().chain(&s[..i]).copied().collect())
            .collect();
        rots.sort();
        rots.iter().map(|r| r[n - 1]).collect()
    }

    #[test]
    fn banana() {
        assert_eq!(bwt_forward(b"BANANA$", b'$').unwrap(), b"ANNB$AA");
        assert_eq!(bwt_inverse(b"ANNB$AA", b'$').unwrap(), b"BANANA$");
    }

    #[test]
    fn two_bytes() {
        assert_eq!(naive(b"A$"), b"A$");
        assert_eq!(bwt_forward(b"A$", b'$').unwrap(), b"A$");
        assert_eq!(bwt_inverse(b"A$", b'$').unwrap(), b"A$");
        assert_eq!(bwt_forward(b"$", b'$').unwrap(), b"$");
    }

    #[test]
    fn terminator_errors() {
        assert!(matches!(
            bwt_forward(b"BANANA", b'$'),
            Err(Error::TerminatorCount(0))
        ));
        assert!(matches!(
            bwt_forward(b"BA$NA$", b'$'),
            Err(Error::TerminatorCount(2))
        ));
        assert!(matches!(
            bwt_forward(b"BA$NA", b'$'),
            Err(Error::TerminatorNotFinal)
        ));
        assert!(bwt_inverse(b"ANNBAA", b'$').is_err());
        assert!(bwt_inverse(b"AN$B$AA", b'$').is_err());
    }

    fn with_terminator(mut v: Vec<u8>) -> Vec<u8> {
        for b in v.iter_mut() {
            if *b == b'$' {
                *b = b'#';
            }
        }
        v.push(b'$');
        v
    }

    proptest! {
        #[test]
        fn agrees_with_rotation_sort(body in prop::collection::vec(prop::sample::select(b"ACGT,".to_vec()), 0..200)) {
            let s = with_terminator(body);
            let l = bwt_forward(&s, b'$').unwrap();
            prop_assert_eq!(&l, &naive(&s));
        }

        #[test]
        fn round_trip_any_bytes(body in prop::collection::vec(any::<u8>(), 0..400)) {
            let s = with_terminator(body);
            let l = bwt_forward(&s, b'$').unwrap();
            let mut a = l.clone();
            let mut b = s.clone();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            prop_assert_eq!(bwt_inverse(&l, b'$').unwrap(), s);
        }
    }
}
