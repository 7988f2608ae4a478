//! Exact rational rotations of 3-space and points of the unit sphere.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::word::{FreeWord, Letter};
use crate::rational::{self, Rational};

/// `num / den` with a common integer denominator. Products are not
/// reduced, so a word of length `k` over the standard pair has `den = 5^k`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalRotation {
    num: [[BigInt; 3]; 3],
    den: BigInt,
}

fn m3(rows: [[i64; 3]; 3]) -> [[BigInt; 3]; 3] {
    rows.map(|r| r.map(BigInt::from))
}

impl RationalRotation {
    pub fn identity() -> Self {
        RationalRotation {
            num: m3([[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
            den: BigInt::one(),
        }
    }

    pub fn from_integers(num: [[i64; 3]; 3], den: i64) -> Self {
        RationalRotation {
            num: m3(num),
            den: BigInt::from(den),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.num[i][j].clone(), self.den.clone())
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Least common denominator of the entries.
    pub fn reduced_denominator(&self) -> BigInt {
        let mut g = self.den.clone();
        for row in &self.num {
            for x in row {
                g = g.gcd(x);
            }
        }
        &self.den / g
    }

    pub fn mul(&self, other: &RationalRotation) -> RationalRotation {
        let num = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = BigInt::zero();
                for k in 0..3 {
                    s += &self.num[i][k] * &other.num[k][j];
                }
                s
            })
        });
        RationalRotation {
            num,
            den: &self.den * &other.den,
        }
    }

    pub fn transpose(&self) -> RationalRotation {
        RationalRotation {
            num: std::array::from_fn(|i| std::array::from_fn(|j| self.num[j][i].clone())),
            den: self.den.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| if i == j { self.num[i][j] == self.den } else { self.num[i][j].is_zero() }))
    }

    /// `mᵀm = I`, exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self).is_identity()
    }

    pub fn determinant(&self) -> Rational {
        let n = &self.num;
        let d = &n[0][0] * (&n[1][1] * &n[2][2] - &n[1][2] * &n[2][1])
            - &n[0][1] * (&n[1][0] * &n[2][2] - &n[1][2] * &n[2][0])
            + &n[0][2] * (&n[1][0] * &n[2][1] - &n[1][1] * &n[2][0]);
        Rational::new(d, self.den.pow(3))
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        let c = std::array::from_fn(|i| {
            let mut s = BigInt::zero();
            for k in 0..3 {
                s += &self.num[i][k] * &p.num[k];
            }
            s
        });
        SpherePoint::normalized(c, &self.den * &p.den)
    }
}

impl fmt::Debug for RationalRotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..3)
            .map(|i| (0..3).map(|j| rational::format(&self.entry(i, j))).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Rotations by `arccos(3/5)` about the z-axis (`a`) and the x-axis (`b`).
pub fn standard_free_rotations() -> (RationalRotation, RationalRotation) {
    (
        RationalRotation::from_integers([[3, -4, 0], [4, 3, 0], [0, 0, 5]], 5),
        RationalRotation::from_integers([[5, 0, 0], [0, 3, -4], [0, 4, 3]], 5),
    )
}

/// The four generator matrices indexed by letter.
#[derive(Clone, Debug)]
pub struct RotationPair {
    gens: [RationalRotation; 4],
}

impl RotationPair {
    pub fn standard() -> Self {
        let (a, b) = standard_free_rotations();
        RotationPair {
            gens: [a.clone(), a.transpose(), b.clone(), b.transpose()],
        }
    }

    pub fn letter(&self, l: Letter) -> &RationalRotation {
        &self.gens[l as usize]
    }

    /// The matrix of a word; letters act right to left on points, so the
    /// product is taken in reading order.
    pub fn eval(&self, w: &FreeWord) -> RationalRotation {
        let mut m = RationalRotation::identity();
        for &l in w.letters() {
            m = m.mul(self.letter(l));
        }
        m
    }

    /// First nonempty reduced word of length `<= max_len` (key order within
    /// each branch) that evaluates to the identity, with the count checked.
    pub fn freeness_counterexample(&self, max_len: usize) -> (Option<FreeWord>, u64) {
        let mut checked = 0u64;
        let mut stack: Vec<Letter> = Vec::new();
        let found = self.dfs(&RationalRotation::identity(), &mut stack, max_len, &mut checked);
        (found, checked)
    }

    fn dfs(&self, m: &RationalRotation, stack: &mut Vec<Letter>, max_len: usize, checked: &mut u64) -> Option<FreeWord> {
        if stack.len() == max_len {
            return None;
        }
        for l in super::word::LETTERS {
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            let next = m.mul(self.letter(l));
            stack.push(l);
            *checked += 1;
            if next.is_identity() {
                return Some(FreeWord::from_letters(stack.clone()));
            }
            if let Some(w) = self.dfs(&next, stack, max_len, checked) {
                return Some(w);
            }
            stack.pop();
        }
        None
    }
}

/// A point with rational coordinates in lowest terms (`gcd` of the three
/// numerators and the denominator is 1, denominator positive).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpherePoint {
    num: [BigInt; 3],
    den: BigInt,
}

impl SpherePoint {
    pub fn new(coords: [Rational; 3]) -> Self {
        let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords.map(|c| c.numer() * (&den / c.denom()));
        SpherePoint::normalized(num, den)
    }

    pub fn from_integers(num: [i64; 3], den: i64) -> Self {
        SpherePoint::normalized(num.map(BigInt::from), BigInt::from(den))
    }

    fn normalized(mut num: [BigInt; 3], mut den: BigInt) -> Self {
        let mut g = den.clone();
        for x in &num {
            g = g.gcd(x);
        }
        if !g.is_zero() && !g.is_one() {
            for x in num.iter_mut() {
                *x /= &g;
            }
            den /= &g;
        }
        if den.is_negative() {
            for x in num.iter_mut() {
                *x = -&*x;
            }
            den = -den;
        }
        SpherePoint { num, den }
    }

    pub fn coords(&self) -> [Rational; 3] {
        std::array::from_fn(|i| Rational::new(self.num[i].clone(), self.den.clone()))
    }

    pub fn is_unit(&self) -> bool {
        let s: BigInt = self.num.iter().map(|x| x * x).sum();
        s == &self.den * &self.den
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords().iter().map(rational::format).collect();
        write!(f, "({})", c.join(", "))
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c: Vec<String> = self.coords().iter().map(rational::format).collect();
        c.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::reduce;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn standard_pair_examples() {
        let (a, b) = standard_free_rotations();
        assert_eq!(a.entry(0, 0), ratio(3, 5));
        assert_eq!(a.entry(0, 1), ratio(-4, 5));
        assert_eq!(a.entry(0, 2), ratio(0, 1));
        let ab = a.mul(&b);
        assert_eq!(ab.reduced_denominator(), BigInt::from(25));
        for m in [&a, &b] {
            assert!(m.is_orthogonal());
            assert_eq!(m.determinant(), ratio(1, 1));
            assert!(m.mul(&m.transpose()).is_identity());
        }
    }

    #[test]
    fn words_act_consistently() {
        let pair = RotationPair::standard();
        let base = SpherePoint::from_integers([0, 1, 0], 1);
        let w = reduce("abA").unwrap();
        let direct = pair.eval(&w).apply(&base);
        let stepwise = w
            .letters()
            .iter()
            .rev()
            .fold(base.clone(), |p, &l| pair.letter(l).apply(&p));
        assert_eq!(direct, stepwise);
        assert!(direct.is_unit());
        assert_eq!(pair.letter(Letter::A).apply(&base), SpherePoint::from_integers([-4, 3, 0], 5));
    }

    #[test]
    fn short_words_are_free() {
        let (found, checked) = RotationPair::standard().freeness_counterexample(6);
        assert!(found.is_none());
        assert_eq!(checked, crate::group::word::ball_size(6) - 1);
    }

    proptest! {
        #[test]
        fn words_stay_orthogonal(l in prop::collection::vec(0u8..4, 0..16)) {
            let w = FreeWord::from_letters(l.into_iter().map(Letter::from_index));
            let pair = RotationPair::standard();
            let m = pair.eval(&w);
            prop_assert!(m.is_orthogonal());
            prop_assert_eq!(m.determinant(), ratio(1, 1));
            prop_assert!(m.mul(&pair.eval(&w.inverse())).is_identity());
        }
    }
}
