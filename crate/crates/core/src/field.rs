//! Arithmetic over GF(2^m) and dense matrices over it.
//!
//! Each extension degree uses a fixed irreducible polynomial so that every
//! construction in the crate is byte-reproducible. Degree 8 uses the AES
//! polynomial x^8 + x^4 + x^3 + x + 1.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u8 = 16;

/// Degree used when nothing else is requested; large enough for MDS codes
/// over up to 256 subcarriers.
pub const DEFAULT_DEGREE: u8 = 8;

/// Reduction polynomials, indexed by degree (bit i = coefficient of x^i).
const POLYNOMIALS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B,
    0x4443, 0x8003, 0x1100B,
];

struct Tables {
    exp: Vec<u16>,
    log: Vec<u16>,
}

fn carryless_mul_mod(a: u32, b: u32, degree: u8) -> u32 {
    let poly = POLYNOMIALS[degree as usize];
    let mut a = a;
    let mut b = b;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

fn build_tables(degree: u8) -> Tables {
    let size = 1usize << degree;
    let order = size - 1;
    // Find the smallest generator of the multiplicative group.
    for g in 2..size.max(3) as u32 {
        let g = if degree == 1 { 1 } else { g };
        let mut exp = vec![0u16; 2 * order.max(1)];
        let mut log = vec![0u16; size];
        let mut seen = vec![false; size];
        let mut x = 1u32;
        let mut full = true;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if seen[x as usize] {
                full = false;
                break;
            }
            seen[x as usize] = true;
            *slot = x as u16;
            log[x as usize] = i as u16;
            x = carryless_mul_mod(x, g, degree);
        }
        if full && x == 1 {
            for i in order..2 * order {
                exp[i] = exp[i - order];
            }
            return Tables { exp, log };
        }
    }
    unreachable!("reduction polynomial for degree {degree} is not irreducible")
}

fn tables(degree: u8) -> &'static Tables {
    static CELLS: [OnceLock<Tables>; 17] = [const { OnceLock::new() }; 17];
    CELLS[degree as usize].get_or_init(|| build_tables(degree))
}

/// The field GF(2^m) for a fixed degree m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    degree: u8,
}

impl Field {
    pub fn new(degree: u8) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidParams(format!(
                "field degree must lie in 1..={MAX_DEGREE}, got {degree}"
            )));
        }
        Ok(Field { degree })
    }

    pub fn degree(self) -> u8 {
        self.degree
    }

    /// Number of elements, 2^m.
    pub fn size(self) -> usize {
        1 << self.degree
    }

    pub fn polynomial(self) -> u32 {
        POLYNOMIALS[self.degree as usize]
    }

    #[inline]
    pub fn add(self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = tables(self.degree);
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        let t = tables(self.degree);
        let order = self.size() - 1;
        Some(t.exp[(order - t.log[a as usize] as usize) % order])
    }

    pub fn div(self, a: u16, b: u16) -> Option<u16> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn contains(self, value: u32) -> bool {
        (value as usize) < self.size()
    }

    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> u16 {
        rng.gen_range(0..self.size()) as u16
    }

    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> u16 {
        rng.gen_range(1..self.size()) as u16
    }
}

impl Default for Field {
    fn default() -> Self {
        Field {
            degree: DEFAULT_DEGREE,
        }
    }
}

/// A single element tagged with its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u16,
    field: Field,
}

impl FieldElem {
    pub fn new(value: u32, degree: u8) -> Result<Self> {
        let field = Field::new(degree)?;
        if !field.contains(value) {
            return Err(Error::InvalidParams(format!(
                "value {value:#x} outside GF(2^{degree})"
            )));
        }
        Ok(FieldElem {
            value: value as u16,
            field,
        })
    }

    pub fn value(self) -> u16 {
        self.value
    }

    pub fn field(self) -> Field {
        self.field
    }

    pub fn inverse(self) -> Option<FieldElem> {
        self.field.inv(self.value).map(|value| FieldElem {
            value,
            field: self.field,
        })
    }
}

fn same_field(a: FieldElem, b: FieldElem) -> Result<Field> {
    if a.field != b.field {
        return Err(Error::FieldMismatch {
            left: a.field.degree,
            right: b.field.degree,
        });
    }
    Ok(a.field)
}

pub fn gf_mul(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    let field = same_field(a, b)?;
    Ok(FieldElem {
        value: field.mul(a.value, b.value),
        field,
    })
}

pub fn gf_add(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    let field = same_field(a, b)?;
    Ok(FieldElem {
        value: a.value ^ b.value,
        field,
    })
}

pub fn gf_inv(a: FieldElem) -> Option<FieldElem> {
    a.inverse()
}

/// Dense row-major matrix over GF(2^m).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over GF(2^{})",
            self.rows,
            self.cols,
            self.field.degree()
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{v:x}")).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|&&v| !field.contains(v as u32)) {
            return Err(Error::InvalidParams(format!(
                "entry {v:#x} outside GF(2^{})",
                field.degree()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(field: Field, rows: &[Vec<u16>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Matrix::from_vec(field, rows.len(), cols, data)
    }

    /// The shift operator G^s on q-vectors: moves every level down by `s`,
    /// filling the top `s` levels with zeros. Level 0 is the top.
    pub fn shift(field: Field, q: usize, s: usize) -> Self {
        let mut m = Matrix::zeros(field, q, q);
        for i in s..q {
            m.set(i, i - s, 1);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.degree,
                right: other.field.degree,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b != 0 {
                        let idx = r * out.cols + c;
                        out.data[idx] ^= f.mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "row counts differ: {} vs {}",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "column counts differ: {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (i, &c) in cols.iter().enumerate() {
                out.set(r, i, self.get(r, c));
            }
        }
        out
    }

    /// Block-diagonal matrix with `copies` repetitions of `self`.
    pub fn block_diag(&self, copies: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows * copies, self.cols * copies);
        for b in 0..copies {
            for r in 0..self.rows {
                for c in 0..self.cols {
                    out.set(b * self.rows + r, b * self.cols + c, self.get(r, c));
                }
            }
        }
        out
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for c in col..cols {
                    a.swap(pivot * cols + c, rank * cols + c);
                }
            }
            let inv = f.inv(a[rank * cols + col]).expect("pivot is nonzero");
            for c in col..cols {
                a[rank * cols + c] = f.mul(a[rank * cols + c], inv);
            }
            for r in rank + 1..rows {
                let factor = a[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let p = a[rank * cols + c];
                    if p != 0 {
                        a[r * cols + c] ^= f.mul(factor, p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Ranks reported by [`decodability`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankTriple {
    pub decoded: usize,
    pub nuisance: usize,
    pub joint: usize,
}

impl RankTriple {
    /// `decoded_cols` is the number of unknowns in the decoded block.
    pub fn is_unique(&self, decoded_cols: usize) -> bool {
        self.decoded == decoded_cols && self.joint == self.decoded + self.nuisance
    }
}

/// Rank triple for `y = dec·w + nuis·v`.
pub fn decodability(dec: &Matrix, nuis: &Matrix) -> Result<RankTriple> {
    if dec.rows() != nuis.rows() {
        return Err(Error::DimensionMismatch(format!(
            "decoded block has {} rows, nuisance block {}",
            dec.rows(),
            nuis.rows()
        )));
    }
    Ok(RankTriple {
        decoded: dec.rank(),
        nuisance: nuis.rank(),
        joint: dec.hstack(nuis)?.rank(),
    })
}

/// True iff `w` is uniquely determined by `y = dec·w + nuis·v` for unknown `v`.
pub fn solve_unique_block(dec: &Matrix, nuis: &Matrix) -> Result<bool> {
    Ok(decodability(dec, nuis)?.is_unique(dec.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf2() -> Field {
        Field::new(1).unwrap()
    }

    // Shift-and-add multiplication with reduction, independent of the tables.
    fn slow_mul(a: u32, b: u32, degree: u8) -> u32 {
        let mut prod = 0u64;
        for i in 0..degree {
            if b >> i & 1 == 1 {
                prod ^= (a as u64) << i;
            }
        }
        let poly = POLYNOMIALS[degree as usize] as u64;
        for bit in (degree as u32..2 * degree as u32).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= poly << (bit - degree as u32);
            }
        }
        prod as u32
    }

    #[test]
    fn aes_inverse_pair() {
        assert_eq!(slow_mul(0x53, 0xCA, 8), 0x01);
        let a = FieldElem::new(0x53, 8).unwrap();
        let b = FieldElem::new(0xCA, 8).unwrap();
        assert_eq!(gf_mul(a, b).unwrap().value(), 0x01);
    }

    #[test]
    fn identity_and_zero() {
        let one = FieldElem::new(0x01, 8).unwrap();
        let x = FieldElem::new(0x5A, 8).unwrap();
        let zero = FieldElem::new(0, 8).unwrap();
        assert_eq!(gf_mul(one, x).unwrap().value(), 0x5A);
        for v in 0..256 {
            let y = FieldElem::new(v, 8).unwrap();
            assert_eq!(gf_mul(zero, y).unwrap().value(), 0);
        }
    }

    #[test]
    fn mismatched_degrees_rejected() {
        let a = FieldElem::new(3, 8).unwrap();
        let b = FieldElem::new(3, 4).unwrap();
        assert!(matches!(gf_mul(a, b), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn table_mul_matches_slow_mul() {
        for degree in 1..=8u8 {
            let f = Field::new(degree).unwrap();
            for a in 0..f.size() as u32 {
                for b in 0..f.size() as u32 {
                    assert_eq!(f.mul(a as u16, b as u16) as u32, slow_mul(a, b, degree));
                }
            }
        }
    }

    #[test]
    fn inverses_exhaustive_small_degrees() {
        for degree in 1..=8u8 {
            let f = Field::new(degree).unwrap();
            for a in 1..f.size() as u16 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "degree {degree}, a {a}");
            }
            assert_eq!(f.inv(0), None);
        }
    }

    #[test]
    fn large_degrees_form_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for degree in 9..=MAX_DEGREE {
            let f = Field::new(degree).unwrap();
            for _ in 0..200 {
                let a = f.random_nonzero(&mut rng);
                let b = f.random_nonzero(&mut rng);
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                assert_eq!(f.mul(a, b) as u32, slow_mul(a as u32, b as u32, degree));
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f = Field::default();
        assert_eq!(Matrix::identity(f, 3).rank(), 3);
        assert_eq!(Matrix::zeros(f, 2, 5).rank(), 0);
        let m = Matrix::from_rows(gf2(), &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_matches_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for degree in [1u8, 2, 8] {
            let f = Field::new(degree).unwrap();
            for _ in 0..100 {
                let rows = rng.gen_range(0..7);
                let cols = rng.gen_range(0..7);
                let m = Matrix::random(f, rows, cols, &mut rng);
                assert_eq!(m.rank(), m.transpose().rank());
            }
        }
    }

    #[test]
    fn unique_block_examples() {
        let f = gf2();
        let id = Matrix::identity(f, 2);
        assert!(solve_unique_block(&id, &Matrix::zeros(f, 2, 1)).unwrap());
        let ones = Matrix::from_rows(f, &[vec![1], vec![1]]).unwrap();
        assert!(!solve_unique_block(&ones, &ones).unwrap());
        assert!(!solve_unique_block(&id, &ones).unwrap());
        assert!(matches!(
            solve_unique_block(&id, &Matrix::zeros(f, 3, 1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    // Exhaustive oracle: w is unique iff no two (w, v) pairs with distinct w
    // produce the same y.
    fn brute_unique(dec: &Matrix, nuis: &Matrix) -> bool {
        let (dc, nc, rows) = (dec.cols(), nuis.cols(), dec.rows());
        let mut seen: std::collections::HashMap<Vec<u16>, u32> = Default::default();
        for w in 0u32..1 << dc {
            for v in 0u32..1 << nc {
                let y: Vec<u16> = (0..rows)
                    .map(|r| {
                        let mut acc = 0;
                        for c in 0..dc {
                            acc ^= dec.get(r, c) & (w >> c & 1) as u16;
                        }
                        for c in 0..nc {
                            acc ^= nuis.get(r, c) & (v >> c & 1) as u16;
                        }
                        acc
                    })
                    .collect();
                if let Some(&prev) = seen.get(&y) {
                    if prev != w {
                        return false;
                    }
                } else {
                    seen.insert(y, w);
                }
            }
        }
        true
    }

    #[test]
    fn unique_block_agrees_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = gf2();
        for _ in 0..400 {
            let rows = rng.gen_range(1..7);
            let dc = rng.gen_range(0..6);
            let nc = rng.gen_range(0..=(12 - dc).min(6));
            let dec = Matrix::random(f, rows, dc, &mut rng);
            let nuis = Matrix::random(f, rows, nc, &mut rng);
            assert_eq!(
                solve_unique_block(&dec, &nuis).unwrap(),
                brute_unique(&dec, &nuis),
                "{dec:?}{nuis:?}"
            );
        }
    }

    #[test]
    fn shift_moves_levels_down() {
        let f = Field::default();
        let x = Matrix::from_rows(f, &[vec![7], vec![9], vec![4]]).unwrap();
        let y = Matrix::shift(f, 3, 1).mul(&x).unwrap();
        assert_eq!(y.data(), &[0, 7, 9]);
        assert!(Matrix::shift(f, 3, 3).is_zero());
    }
}
