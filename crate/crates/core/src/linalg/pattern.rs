use std::fmt;

/// The 0/1 vector `sgn(x⁺)`: bit `i` is set iff `x_i > 0`.
///
/// Patterns are ordered lexicographically with bit 0 most significant, which
/// is also the order of [`SignPattern::from_index`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern {
    bits: Vec<bool>,
}

impl SignPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        SignPattern { bits }
    }

    pub fn zeros(m: usize) -> Self {
        SignPattern { bits: vec![false; m] }
    }

    pub fn ones(m: usize) -> Self {
        SignPattern { bits: vec![true; m] }
    }

    /// Pattern number `index` of the `2^m` patterns in lexicographic order.
    pub fn from_index(index: u64, m: usize) -> Self {
        assert!(m <= 63, "pattern index supports m <= 63");
        let bits = (0..m).map(|i| (index >> (m - 1 - i)) & 1 == 1).collect();
        SignPattern { bits }
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bits as `0`/`1` integers.
    pub fn to_vec_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| u8::from(b)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignPattern({self})")
    }
}

/// `sgn(x⁺)` under exact strict comparison; zeros map to 0.
pub fn sign_pattern(x: &[f64]) -> SignPattern {
    SignPattern {
        bits: x.iter().map(|&v| v > 0.0).collect(),
    }
}
