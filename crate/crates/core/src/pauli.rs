//! Pauli labels and strings.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result, C64};

/// Single-qubit Pauli label. Ordered `I < X < Y < Z`, matching the integer
/// labels 0..=3 used for correlator indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Pauli> {
        Self::ALL.get(i).copied()
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Pauli> {
        match c {
            'I' | 'i' | '0' => Ok(Pauli::I),
            'X' | 'x' | '1' => Ok(Pauli::X),
            'Y' | 'y' | '2' => Ok(Pauli::Y),
            'Z' | 'z' | '3' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauli(other)),
        }
    }

    /// Whether the operator flips the computational basis state.
    #[inline]
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up by `|b>` under this operator, i.e. `P|b> = phase |b'>`.
    #[inline]
    pub fn phase(self, bit: bool) -> C64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, false) => C64::new(1.0, 0.0),
            (Pauli::Z, true) => C64::new(-1.0, 0.0),
            (Pauli::Y, false) => C64::new(0.0, 1.0),
            (Pauli::Y, true) => C64::new(0.0, -1.0),
        }
    }
}

/// Tensor product of single-qubit Paulis; position `k` acts on qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        PauliString(labels)
    }

    pub fn identity(n: usize) -> Self {
        PauliString(alloc::vec![Pauli::I; n])
    }

    /// The `index`-th string of length `n` in lexicographic `I<X<Y<Z` order,
    /// qubit 0 most significant.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let mut labels = alloc::vec![Pauli::I; n];
        for slot in labels.iter_mut().rev() {
            *slot = Pauli::ALL[(index % 4) as usize];
            index /= 4;
        }
        PauliString(labels)
    }

    /// Inverse of [`PauliString::from_index`]. Saturates past 31 qubits.
    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .fold(0u64, |acc, p| acc.saturating_mul(4).saturating_add(p.index() as u64))
    }

    /// All `4^n` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..4u64.pow(n as u32)).map(move |i| PauliString::from_index(n, i))
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn is_full_weight(&self) -> bool {
        self.weight() == self.len()
    }

    /// True when `self` is obtained from `setting` by replacing some symbols
    /// with the identity.
    pub fn is_marginal_of(&self, setting: &PauliString) -> bool {
        self.len() == setting.len()
            && self
                .0
                .iter()
                .zip(&setting.0)
                .all(|(&a, &b)| a == Pauli::I || a == b)
    }

    /// Fills identity positions with `Z`, giving the canonical full-weight
    /// setting from which this string can be marginalized.
    pub fn completion(&self) -> PauliString {
        PauliString(
            self.0
                .iter()
                .map(|&p| if p == Pauli::I { Pauli::Z } else { p })
                .collect(),
        )
    }

    /// Bit mask (in amplitude-index convention) of the flipping positions.
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    /// Mask of non-identity positions.
    pub(crate) fn support_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    /// Phase of `P|x> = phase |x ^ flip_mask>`.
    pub(crate) fn phase_on(&self, x: usize) -> C64 {
        let n = self.len();
        let mut ph = C64::new(1.0, 0.0);
        for (q, p) in self.0.iter().enumerate() {
            if *p != Pauli::I {
                ph *= p.phase((x >> (n - 1 - q)) & 1 == 1);
            }
        }
        ph
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        alloc::format!("{p}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "XIZY".parse().unwrap();
        assert_eq!(alloc::format!("{p}"), "XIZY");
        let q: PauliString = "0123".parse().unwrap();
        assert_eq!(alloc::format!("{q}"), "IXYZ");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn index_roundtrip_and_order() {
        let all: Vec<_> = PauliString::all(2).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(alloc::format!("{}", all[0]), "II");
        assert_eq!(alloc::format!("{}", all[1]), "IX");
        assert_eq!(alloc::format!("{}", all[15]), "ZZ");
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.index(), i as u64);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn marginals_and_completion() {
        let s: PauliString = "XZYZ".parse().unwrap();
        let m: PauliString = "XIYI".parse().unwrap();
        assert!(m.is_marginal_of(&s));
        assert!(!s.is_marginal_of(&m));
        assert_eq!(alloc::format!("{}", m.completion()), "XZYZ");
        assert_eq!(m.weight(), 2);
    }
}
