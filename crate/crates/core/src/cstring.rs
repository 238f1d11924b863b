//! Canonical forms for bit strings taken up to rotation.
//!
//! The canonical representative is the lexicographically least rotation of the
//! string's primitive period. All rotations of a primitive string are distinct,
//! so the minimum is unique.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCString {
    bits: Vec<u8>,
}

impl CanonicalCString {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for CanonicalCString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .bits
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect();
        f.write_str(&s)
    }
}

/// Parses and canonicalizes a `0`/`1` string.
impl FromStr for CanonicalCString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        canonicalize(&parse_bits(s)?)
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidBit(other)),
        })
        .collect()
}

pub fn canonicalize(raw: &[u8]) -> Result<CanonicalCString> {
    if raw.is_empty() {
        return Err(Error::EmptyString);
    }
    Ok(canonicalize_bits(raw))
}

/// Caller guarantees `raw` is nonempty.
pub(crate) fn canonicalize_bits(raw: &[u8]) -> CanonicalCString {
    let period = primitive_period(raw);
    let prefix = &raw[..period];
    let k = least_rotation(prefix);
    let mut bits = Vec::with_capacity(period);
    bits.extend_from_slice(&prefix[k..]);
    bits.extend_from_slice(&prefix[..k]);
    CanonicalCString { bits }
}

/// Smallest `p` dividing `len` such that `s` is a repetition of its `p`-prefix.
pub fn primitive_period(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    // KMP failure function: longest proper border of s[..=i].
    let mut border = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = border[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        border[i] = k;
    }
    let p = n - border[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// Booth's algorithm: start index of the lexicographically least rotation.
pub fn least_rotation(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = fail[j - k - 1];
        while i != -1 && sj != s[(k + i as usize + 1) % n] {
            if sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        // Here i == -1 or the characters match.
        if i == -1 && sj != s[k % n] {
            if sj < s[k % n] {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        s.parse::<CanonicalCString>().unwrap().to_string()
    }

    #[test]
    fn examples() {
        assert_eq!(canon("110"), "011");
        assert_eq!(canon("0101"), "01");
        assert_eq!(canon("1001011"), "0010111");
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(canonicalize(&[]), Err(Error::EmptyString)));
        assert_eq!(
            "".parse::<CanonicalCString>().unwrap_err().to_string(),
            "empty string"
        );
    }

    #[test]
    fn bad_character() {
        assert!(matches!(parse_bits("01x"), Err(Error::InvalidBit('x'))));
    }

    #[test]
    fn periods() {
        assert_eq!(primitive_period(&[0, 0, 0]), 1);
        assert_eq!(primitive_period(&[0, 1, 0]), 3);
        assert_eq!(primitive_period(&[0, 1, 1, 0, 1, 1]), 3);
        assert_eq!(primitive_period(&[1]), 1);
    }

    #[test]
    fn uniform_strings() {
        assert_eq!(canon("1111"), "1");
        assert_eq!(canon("0"), "0");
    }
}
