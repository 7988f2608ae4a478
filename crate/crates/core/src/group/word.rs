//! Reduced words in the free group on `a`, `b` with `A = a⁻¹`, `B = b⁻¹`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Letter order `a < A < b < B` is the scan order everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

pub const LETTERS: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter::from_index(self as u8 ^ 1)
    }

    pub fn from_index(i: u8) -> Letter {
        LETTERS[(i & 3) as usize]
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            _ => Err(Error::BadLetter(c)),
        }
    }

    pub fn as_char(self) -> char {
        ['a', 'A', 'b', 'B'][self as usize]
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeWord(Vec<Letter>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        FreeWord(vec![l])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut k = 0;
        while k < self.0.len() && k < other.0.len() && self.0[self.0.len() - 1 - k] == other.0[k].inverse() {
            k += 1;
        }
        let mut out = self.0[..self.0.len() - k].to_vec();
        out.extend_from_slice(&other.0[k..]);
        FreeWord(out)
    }

    /// `l·self`, reduced.
    pub fn prepend(&self, l: Letter) -> FreeWord {
        if self.first() == Some(l.inverse()) {
            FreeWord(self.0[1..].to_vec())
        } else {
            let mut out = Vec::with_capacity(self.0.len() + 1);
            out.push(l);
            out.extend_from_slice(&self.0);
            FreeWord(out)
        }
    }

    /// `self` is `l` repeated, for some `n >= 1`.
    pub fn is_power_of(&self, l: Letter) -> bool {
        !self.0.is_empty() && self.0.iter().all(|&x| x == l)
    }

    /// Compact code preserving the key order: length in the top 6 bits,
    /// letters as base-4 digits below. Words longer than 29 letters have no
    /// code.
    pub fn pack(&self) -> Option<u64> {
        if self.0.len() > MAX_PACKED {
            return None;
        }
        let mut bits = 0u64;
        for &l in &self.0 {
            bits = bits << 2 | l as u64;
        }
        Some((self.0.len() as u64) << 58 | bits)
    }

    pub fn unpack(code: u64) -> FreeWord {
        let len = (code >> 58) as usize;
        let letters = (0..len)
            .rev()
            .map(|i| Letter::from_index((code >> (2 * i)) as u8))
            .collect();
        FreeWord(letters)
    }
}

pub const MAX_PACKED: usize = 29;

/// Parses and freely reduces a string over `a A b B`; `e` and the empty
/// string denote the identity.
pub fn reduce(s: &str) -> Result<FreeWord> {
    if s == "e" {
        return Ok(FreeWord::identity());
    }
    let letters: Vec<Letter> = s.chars().map(Letter::from_char).collect::<Result<_>>()?;
    Ok(FreeWord::from_letters(letters))
}

impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        reduce(s)
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        reduce(&s).map_err(serde::de::Error::custom)
    }
}

/// All reduced words of length at most `n`, in key order.
pub fn words_up_to(n: usize) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::identity()];
    let mut level = vec![FreeWord::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 3);
        for w in &level {
            for l in LETTERS {
                if w.0.last() != Some(&l.inverse()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(FreeWord(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Number of reduced words of length at most `n`.
pub fn ball_size(n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        1 + 2 * (3u64.pow(n as u32) - 1)
    }
}
