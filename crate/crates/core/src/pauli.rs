//! Phase-free Pauli strings in the symplectic (X mask, Z mask) representation.
//!
//! Bit `i` of a mask addresses bit `i` of the computational-basis index, so a
//! label's first character (qubit 0) lives in the most significant bit. With
//! this layout `P|j> = i^{|x&z|} (-1)^{|z&j|} |j ^ x>` and the dense matrix of a
//! label is the Kronecker product of its characters read left to right.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the bitmask representation supports.
pub const MAX_QUBITS: usize = 32;

/// A power of `i`: the phase picked up by Pauli products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(power: u32) -> Self {
        Phase((power % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString { n_qubits, x: 0, z: 0 }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let width = mask_of(n_qubits);
        if x & !width != 0 || z & !width != 0 {
            return Err(Error::Dimension(format!(
                "masks wider than {n_qubits} qubits"
            )));
        }
        Ok(PauliString { n_qubits, x, z })
    }

    /// Single-qubit Pauli `c` on `qubit` of an `n_qubits` register.
    pub fn single(n_qubits: usize, qubit: usize, c: char) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::Dimension(format!(
                "qubit {qubit} outside {n_qubits}-qubit register"
            )));
        }
        let bit = 1u64 << (n_qubits - 1 - qubit);
        let (x, z) = match c.to_ascii_uppercase() {
            'I' => (0, 0),
            'X' => (bit, 0),
            'Y' => (bit, bit),
            'Z' => (0, bit),
            other => {
                return Err(Error::InvalidArgument(format!("`{other}` is not a Pauli")))
            }
        };
        PauliString::from_masks(n_qubits, x, z)
    }

    /// Parses a label over `{I,X,Y,Z}` (case-insensitive).
    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        let n = label.chars().count();
        if n == 0 {
            return Err(Error::InvalidArgument("empty Pauli label".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "label has {n} qubits, limit is {MAX_QUBITS}"
            )));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in label.chars().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                'Z' => z |= bit,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "`{other}` in label `{label}` is not one of I, X, Y, Z"
                    )))
                }
            }
        }
        PauliString::from_masks(n, x, z)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Bits (in basis-index layout) on which the string acts nontrivially.
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Number of `Y` factors; the string equals `i^y X^x Z^z`.
    pub(crate) fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Amplitude picked up by basis state `j`: `P|j> = amplitude(j) |j ^ x>`.
    #[inline]
    pub fn amplitude(&self, j: usize) -> Complex64 {
        let sign = if (self.z & j as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        Phase::from_power(self.y_count()).to_complex() * sign
    }

    /// Real sign `(-1)^{|z & j|}`; the `i^y` prefactor cancels in conjugations.
    #[inline]
    pub(crate) fn z_sign(&self, j: usize) -> f64 {
        if (self.z & j as u64).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Re-embeds the string into a register with `extra` additional qubits
    /// appended on the most-significant (left) side.
    pub fn widen_left(&self, extra: usize) -> Result<PauliString> {
        PauliString::from_masks(self.n_qubits + extra, self.x, self.z)
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .map(|q| {
                let bit = 1u64 << (self.n_qubits - 1 - q);
                match (self.x & bit != 0, self.z & bit != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }

    /// All `4^w` strings supported on the bits of `support`, identity first.
    pub fn all_on_support(n_qubits: usize, support: u64) -> Vec<PauliString> {
        let bits: Vec<u64> = (0..64).map(|b| 1u64 << b).filter(|b| support & b != 0).collect();
        let w = bits.len();
        let mut out = Vec::with_capacity(1 << (2 * w));
        for code in 0..(1usize << (2 * w)) {
            let (mut x, mut z) = (0u64, 0u64);
            for (i, bit) in bits.iter().enumerate() {
                match (code >> (2 * i)) & 3 {
                    1 => x |= bit,
                    2 => {
                        x |= bit;
                        z |= bit
                    }
                    3 => z |= bit,
                    _ => {}
                }
            }
            out.push(PauliString { n_qubits, x, z });
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn mask_of(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_width(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Dimension(format!(
            "Pauli strings on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(())
}

/// Operator product `a * b = phase * product`.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString)> {
    check_width(a, b)?;
    let product = PauliString {
        n_qubits: a.n_qubits,
        x: a.x ^ b.x,
        z: a.z ^ b.z,
    };
    // i^{ya} X^{ax} Z^{az} i^{yb} X^{bx} Z^{bz}: moving Z^{az} past X^{bx} costs (-1)^{|az & bx|}.
    let power = a.y_count() + b.y_count() + 2 * (a.z & b.x).count_ones() + 4 * 64
        - product.y_count();
    Ok((Phase::from_power(power), product))
}

/// True iff the symplectic form of `a` and `b` is even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_width(a, b)?;
    Ok(symplectic_commutes(a, b))
}

#[inline]
pub(crate) fn symplectic_commutes(a: &PauliString, b: &PauliString) -> bool {
    ((a.x & b.z).count_ones() + (a.z & b.x).count_ones()) % 2 == 0
}
