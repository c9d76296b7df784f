//! Small GF(2) linear algebra on machine words.
//!
//! Rows live in the low bits of a `u64`; a matrix is a slice of rows. This is
//! all the arithmetic the stabilizer enumeration and the cover construction
//! need: ranks, parities, symmetric bit matrices, and polynomial arithmetic
//! modulo 2 for building irreducible polynomials.

/// Parity of the number of set bits, i.e. the GF(2) inner product when both
/// operands are bit-masked beforehand.
#[inline]
pub fn parity(word: u64) -> u64 {
    (word.count_ones() & 1) as u64
}

/// Spreads the low 16 bits of `v` so bit `p` lands at bit `2p` (one half of a
/// Morton interleave).
#[inline]
pub(crate) fn spread_u16(v: u32) -> u32 {
    let mut v = v & 0xFFFF;
    v = (v | (v << 8)) & 0x00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333;
    v = (v | (v << 1)) & 0x5555_5555;
    v
}

/// Rank of a bit-matrix over GF(2). Destroys nothing; works on a copy.
pub fn rank(rows: &[u64]) -> usize {
    let mut work: Vec<u64> = rows.to_vec();
    let mut rank = 0;
    for bit in (0..64).rev() {
        let mask = 1u64 << bit;
        let Some(pivot) = (rank..work.len()).find(|&r| work[r] & mask != 0) else {
            continue;
        };
        work.swap(rank, pivot);
        let pivot_row = work[rank];
        for (r, row) in work.iter_mut().enumerate() {
            if r != rank && *row & mask != 0 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

/// Polynomial over GF(2); bit `i` holds the coefficient of `x^i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Poly(pub u64);

impl Poly {
    pub const ZERO: Poly = Poly(0);
    pub const ONE: Poly = Poly(1);

    /// Degree, with `degree(0) = 0` by convention (callers never ask).
    pub fn degree(self) -> u32 {
        63 - self.0.leading_zeros().min(63)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Carry-less product. Panics if the result would overflow 64 bits.
    pub fn mul(self, rhs: Poly) -> Poly {
        let mut acc = 0u64;
        let mut a = self.0;
        let mut b = rhs.0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            debug_assert!(a.leading_zeros() > 0 || b == 1, "gf2 polynomial overflow");
            a <<= 1;
            b >>= 1;
        }
        Poly(acc)
    }

    /// Remainder of `self` divided by a nonzero `modulus`.
    pub fn rem(self, modulus: Poly) -> Poly {
        assert!(!modulus.is_zero(), "gf2 polynomial division by zero");
        let md = modulus.degree();
        let mut r = self.0;
        while r != 0 {
            let rd = 63 - r.leading_zeros();
            if rd < md {
                break;
            }
            r ^= modulus.0 << (rd - md);
        }
        Poly(r)
    }

    /// Irreducibility by trial division against every monic polynomial of
    /// degree 1..=deg/2. Fine for the degrees this crate cares about.
    pub fn is_irreducible(self) -> bool {
        let d = self.degree();
        if d == 0 {
            return false;
        }
        for dd in 1..=d / 2 {
            for low in 0..(1u64 << dd) {
                let divisor = Poly((1u64 << dd) | low);
                if self.rem(divisor).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Symmetric bit matrix with rows in machine words (bit `j` of `rows[i]` is
/// entry `(i, j)`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymMatrix {
    pub n: u32,
    pub rows: Vec<u64>,
}

impl SymMatrix {
    pub fn zero(n: u32) -> Self {
        SymMatrix {
            n,
            rows: vec![0; n as usize],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 != 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
        self.rows[j] |= 1 << i;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n as usize)
            .all(|i| (0..self.n as usize).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise XOR with another matrix of the same size.
    pub fn xor_assign(&mut self, other: &SymMatrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a ^= b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        assert_eq!(rank(&[0b100, 0b010, 0b001]), 3);
        assert_eq!(rank(&[0b101, 0b011, 0b110]), 2); // third row = sum of first two
        assert_eq!(rank(&[0, 0]), 0);
    }

    #[test]
    fn poly_mul_rem_agree_with_hand_examples() {
        // (x + 1)(x^2 + x + 1) = x^3 + 1 over GF(2)
        assert_eq!(Poly(0b11).mul(Poly(0b111)), Poly(0b1001));
        // x^4 + x^3 + 1 mod x^2 + x = x + 1: verify by long division
        assert_eq!(Poly(0b11001).rem(Poly(0b110)), Poly(0b1));
    }

    #[test]
    fn irreducibility_matches_known_tables() {
        // Degree 2: x^2 + x + 1 is the only irreducible.
        assert!(Poly(0b111).is_irreducible());
        assert!(!Poly(0b101).is_irreducible()); // (x+1)^2
        assert!(!Poly(0b110).is_irreducible()); // x(x+1)
        // Degree 3 irreducibles: x^3+x+1 and x^3+x^2+1.
        assert!(Poly(0b1011).is_irreducible());
        assert!(Poly(0b1101).is_irreducible());
        assert!(!Poly(0b1111).is_irreducible());
        // Degree 4: x^4+x+1 irreducible, x^4+x^2+1 = (x^2+x+1)^2 not.
        assert!(Poly(0b10011).is_irreducible());
        assert!(!Poly(0b10101).is_irreducible());
    }

    #[test]
    fn sym_matrix_set_keeps_symmetry() {
        let mut m = SymMatrix::zero(4);
        m.set(1, 3);
        m.set(2, 2);
        assert!(m.is_symmetric());
        assert!(m.get(3, 1) && m.get(1, 3) && m.get(2, 2));
    }
}
