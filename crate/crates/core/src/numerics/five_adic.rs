use super::{NumericsError, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The four integer generators of the 3-dimensional Pythagorean rotations.
///
/// `A` and `B` act as `A/5` and `B/5`; the inverses are stored as the
/// transposes (`A⁻¹·25 = Aᵀ`), which act as `Aᵀ/5 = (A/5)⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
    AInv,
    BInv,
}

const A: [[i64; 3]; 3] = [[4, 3, 0], [-3, 4, 0], [0, 0, 5]];
const B: [[i64; 3]; 3] = [[4, 0, 3], [0, 5, 0], [-3, 0, 4]];

fn transpose(m: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

impl Generator {
    pub fn matrix(self) -> [[i64; 3]; 3] {
        match self {
            Generator::A => A,
            Generator::B => B,
            Generator::AInv => transpose(A),
            Generator::BInv => transpose(B),
        }
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::A => Generator::AInv,
            Generator::B => Generator::BInv,
            Generator::AInv => Generator::A,
            Generator::BInv => Generator::B,
        }
    }

    /// Recognises one of the four generator matrices.
    pub fn from_matrix(m: &[[i64; 3]; 3]) -> Result<Generator, NumericsError> {
        [Generator::A, Generator::B, Generator::AInv, Generator::BInv]
            .into_iter()
            .find(|g| &g.matrix() == m)
            .ok_or(NumericsError::NotAGenerator)
    }

    /// Same as [`Generator::from_matrix`] for a row-major `Vec` form.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Generator, NumericsError> {
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(NumericsError::NotAGenerator);
        }
        let mut m = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = rows[i][j];
            }
        }
        Self::from_matrix(&m)
    }

    /// Multiplies an integer vector by the raw integer matrix (no scaling).
    pub fn mul_int(self, v: &[BigInt; 3]) -> [BigInt; 3] {
        let m = self.matrix();
        std::array::from_fn(|i| (0..3).map(|j| &v[j] * m[i][j]).sum())
    }
}

/// A real vector `entries / 5^scale` with integer entries, kept canonical:
/// the scale is reduced while every entry is divisible by 5.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiveAdicVector {
    #[serde(with = "super::serde_bigint_vec")]
    entries: Vec<BigInt>,
    scale: u32,
}

impl FiveAdicVector {
    pub fn new(entries: Vec<BigInt>, scale: u32) -> Self {
        let mut v = FiveAdicVector { entries, scale };
        v.canonicalize();
        v
    }

    /// The basis vector `e_i` of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim];
        entries[i] = BigInt::one();
        FiveAdicVector { entries, scale: 0 }
    }

    pub fn from_ints(entries: &[i64], scale: u32) -> Self {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect(), scale)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn canonicalize(&mut self) {
        let five = BigInt::from(5);
        if self.entries.iter().all(Zero::is_zero) {
            self.scale = 0;
            return;
        }
        while self.scale > 0 && self.entries.iter().all(|x| x.is_multiple_of(&five)) {
            for x in &mut self.entries {
                *x /= &five;
            }
            self.scale -= 1;
        }
    }

    pub fn is_canonical(&self) -> bool {
        let five = BigInt::from(5);
        if self.entries.iter().all(Zero::is_zero) {
            return self.scale == 0;
        }
        self.scale == 0 || self.entries.iter().any(|x| !x.is_multiple_of(&five))
    }

    /// Applies `(1/5)·M` for one of the four generators.
    pub fn apply(&self, g: Generator) -> Result<Self, NumericsError> {
        if self.entries.len() != 3 {
            return Err(NumericsError::WrongLength(self.entries.len()));
        }
        let v: [BigInt; 3] = [self.entries[0].clone(), self.entries[1].clone(), self.entries[2].clone()];
        let out = g.mul_int(&v);
        Ok(Self::new(out.to_vec(), self.scale + 1))
    }

    /// Applies an integer matrix, which must be one of the generators.
    pub fn apply_matrix(&self, m: &[[i64; 3]; 3]) -> Result<Self, NumericsError> {
        self.apply(Generator::from_matrix(m)?)
    }

    /// Applies a sequence of generators, first element first.
    pub fn apply_word(&self, word: &[Generator]) -> Result<Self, NumericsError> {
        word.iter().try_fold(self.clone(), |v, g| v.apply(*g))
    }

    /// Sum of squared integer entries.
    pub fn entry_norm_sq(&self) -> BigInt {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// Squared Euclidean norm of the represented real vector.
    pub fn norm_sq(&self) -> Rational {
        Rational::new(self.entry_norm_sq(), BigInt::from(25).pow(self.scale))
    }

    /// Squared magnitude of the real component `i`.
    pub fn component_sq(&self, i: usize) -> Rational {
        let x = &self.entries[i];
        Rational::new(x * x, BigInt::from(25).pow(self.scale))
    }

    /// If the vector is `±e_i`, returns `i`.
    pub fn basis_index(&self) -> Option<usize> {
        if self.scale != 0 {
            return None;
        }
        let mut found = None;
        for (i, x) in self.entries.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if found.is_some() || (x != &BigInt::one() && x != &-BigInt::one()) {
                return None;
            }
            found = Some(i);
        }
        found
    }

    pub fn negated(&self) -> Self {
        FiveAdicVector { entries: self.entries.iter().map(|x| -x).collect(), scale: self.scale }
    }

    /// Exchanges two coordinates.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut e = self.entries.clone();
        e.swap(i, j);
        FiveAdicVector { entries: e, scale: self.scale }
    }
}

impl fmt::Debug for FiveAdicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})/5^{}", e.join(","), self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e1() -> FiveAdicVector {
        FiveAdicVector::basis(3, 0)
    }

    #[test]
    fn a_on_first_basis_vector() {
        let v = e1().apply(Generator::A).unwrap();
        assert_eq!(v, FiveAdicVector::from_ints(&[4, -3, 0], 1));
    }

    #[test]
    fn b_inverse_on_a_image() {
        // independent check: Bᵀ·(4,-3,0) = (16,-15,12) by hand
        let v = FiveAdicVector::from_ints(&[4, -3, 0], 1).apply(Generator::BInv).unwrap();
        assert_eq!(v, FiveAdicVector::from_ints(&[16, -15, 12], 2));
    }

    #[test]
    fn canonical_form_divides_out_fives() {
        let v = FiveAdicVector::from_ints(&[25, 0, 0], 2);
        assert_eq!(v, e1());
        assert!(v.is_canonical());
        let z = FiveAdicVector::from_ints(&[0, 0, 0], 3);
        assert_eq!(z.scale(), 0);
    }

    #[test]
    fn rejects_foreign_matrices() {
        let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(e1().apply_matrix(&id).unwrap_err(), NumericsError::NotAGenerator);
        assert!(e1().apply_matrix(&A).is_ok());
        assert_eq!(Generator::from_matrix(&transpose(B)).unwrap(), Generator::BInv);
    }

    #[test]
    fn serialises_entries_as_strings() {
        let v = FiveAdicVector::from_ints(&[16, -15, 12], 2);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"entries":["16","-15","12"],"scale":2}"#);
        let back: FiveAdicVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    fn gen() -> impl Strategy<Value = Generator> {
        prop_oneof![Just(Generator::A), Just(Generator::B), Just(Generator::AInv), Just(Generator::BInv)]
    }

    proptest! {
        #[test]
        fn inverse_cancels(word in prop::collection::vec(gen(), 0..8), g in gen()) {
            let v = e1().apply_word(&word).unwrap();
            let back = v.apply(g.inverse()).unwrap().apply(g).unwrap();
            prop_assert_eq!(back, v);
        }

        #[test]
        fn words_preserve_norm(word in prop::collection::vec(prop_oneof![Just(Generator::A), Just(Generator::B)], 0..=10)) {
            // raw integer product, no canonicalisation: Σ entries² = 5^(2·len)
            let mut raw = [BigInt::one(), BigInt::zero(), BigInt::zero()];
            for g in &word {
                raw = g.mul_int(&raw);
            }
            let norm: BigInt = raw.iter().map(|x| x * x).sum();
            prop_assert_eq!(norm, BigInt::from(5).pow(2 * word.len() as u32));
            let v = e1().apply_word(&word).unwrap();
            prop_assert!(v.is_canonical());
            prop_assert_eq!(v.norm_sq(), Rational::one());
        }
    }
}
