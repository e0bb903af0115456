//! Arithmetic over the prime field Z_p.
//!
//! Elements are canonical representatives in `0..p` stored as `u64`; the
//! modulus travels with the category, not with each element.

/// A prime field Z_p. All element values handed to the methods must already
/// be canonical representatives in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Creates the field, checking primality (trial division; the moduli in
    /// play are tiny).
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 {
            return Err(FieldError::NotPrime(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p % d == 0 {
                return Err(FieldError::NotPrime(p));
            }
            d += 1;
        }
        Ok(PrimeField { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into canonical range.
    pub fn reduce(&self, x: i64) -> u64 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// Inverts a square matrix over the field by Gauss-Jordan elimination.
    /// Returns `None` when the matrix is singular.
    pub fn invert_matrix(&self, m: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
        let n = m.len();
        if m.iter().any(|row| row.len() != n) {
            return None;
        }
        let mut a: Vec<Vec<u64>> = m.to_vec();
        let mut inv: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r][col] != 0)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let scale = self.inv(a[col][col])?;
            for j in 0..n {
                a[col][j] = self.mul(a[col][j], scale);
                inv[col][j] = self.mul(inv[col][j], scale);
            }
            for row in 0..n {
                if row != col && a[row][col] != 0 {
                    let factor = a[row][col];
                    for j in 0..n {
                        let t = self.mul(factor, a[col][j]);
                        a[row][j] = self.sub(a[row][j], t);
                        let t = self.mul(factor, inv[col][j]);
                        inv[row][j] = self.sub(inv[row][j], t);
                    }
                }
            }
        }
        Some(inv)
    }

    /// Matrix product over the field.
    pub fn mat_mul(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let rows = a.len();
        let inner = b.len();
        let cols = if inner == 0 { 0 } else { b[0].len() };
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        let mut s = 0;
                        for k in 0..inner {
                            s = self.add(s, self.mul(a[i][k], b[k][j]));
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(5).is_ok());
        assert!(PrimeField::new(13).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::new(5).unwrap();
        for a in 1..5 {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), 1);
        }
        assert_eq!(f.inv(0), None);
        // 2^-1 = 3 in Z_5
        assert_eq!(f.inv(2), Some(3));
    }

    #[test]
    fn matrix_inverse() {
        let f = PrimeField::new(5).unwrap();
        let m = vec![vec![2, 4], vec![3, 3]];
        let inv = f.invert_matrix(&m).unwrap();
        // this matrix is its own inverse mod 5
        assert_eq!(inv, m);
        let singular = vec![vec![1, 2], vec![2, 4]];
        assert!(f.invert_matrix(&singular).is_none());
    }
}
