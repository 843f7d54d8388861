//! Pauli strings and weighted Pauli sums.
//!
//! Qubit 0 is the least-significant bit of a basis label and the rightmost character of
//! a printed string.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// Default qubit limit for dense matrix expansion.
pub const DENSE_LIMIT: usize = 14;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// 2×2 matrix of the label.
    pub fn matrix<T: Real>(self) -> CMatrix<T> {
        let (o, z) = (Complex::<T>::one(), Complex::<T>::zero());
        let i = Complex::<T>::i();
        let d = match self {
            Pauli::I => vec![o, z, z, o],
            Pauli::X => vec![z, o, o, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![o, z, z, -o],
        };
        CMatrix::from_rows(2, 2, d)
    }
}

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// `Y` is stored with both bits set and no phase; all phases live in coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Builds from symplectic masks.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::IndexOutOfRange {
                what: "qubit count",
                index: n,
                limit: MAX_QUBITS,
            });
        }
        if (x | z) & !mask(n) != 0 {
            return Err(invalid("mask bits beyond register"));
        }
        Ok(Self { n, x, z })
    }

    /// Single non-identity factor on `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n);
        s.set(q, p)?;
        Ok(s)
    }

    /// Builds from `(qubit, label)` pairs.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.set(q, p)?;
        }
        Ok(s)
    }

    /// Parses a label such as `"IZXI"`; the rightmost character is qubit 0.
    pub fn from_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.trim().chars().collect();
        let n = chars.len();
        if n > MAX_QUBITS {
            return Err(invalid(format!("label longer than {MAX_QUBITS}")));
        }
        let mut s = Self::identity(n);
        for (pos, &ch) in chars.iter().enumerate() {
            let p =
                Pauli::from_char(ch).ok_or_else(|| invalid(format!("bad Pauli label '{ch}'")))?;
            s.set(n - 1 - pos, p)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: self.n,
            });
        }
        let (bx, bz) = p.bits();
        self.x = (self.x & !(1 << q)) | ((bx as u64) << q);
        self.z = (self.z & !(1 << q)) | ((bz as u64) << q);
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| (self.x | self.z) >> q & 1 == 1)
            .collect()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self · other = i^k · P`, returned as `(k mod 4, P)`.
    pub fn mul_phase(&self, other: &Self) -> (u8, PauliString) {
        assert_eq!(self.n, other.n, "register mismatch");
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // Y = i·X·Z in symplectic form, so P1 P2 = i^{y1+y2-y3} (-1)^{|z1 & x2|} P3.
        let y1 = self.y_count() as i64;
        let y2 = other.y_count() as i64;
        let y3 = (x & z).count_ones() as i64;
        let sign = 2 * (self.z & other.x).count_ones() as i64;
        let k = (y1 + y2 - y3 + sign).rem_euclid(4) as u8;
        (k, PauliString { n: self.n, x, z })
    }

    /// Action on a basis state: `P|b⟩ = i^k |b'⟩`, returned as `(k mod 4, b')`.
    pub fn apply_basis(&self, b: u64) -> (u8, u64) {
        let k = (self.y_count() + 2 * (b & self.z).count_ones()) % 4;
        (k as u8, b ^ self.x)
    }

    /// Removes qubit `q` (its factor is discarded) and shifts higher qubits down.
    pub fn remove_qubit(&self, q: usize) -> PauliString {
        let lo = mask(q);
        let squeeze = |m: u64| (m & lo) | ((m >> (q + 1)) << q);
        PauliString {
            n: self.n - 1,
            x: squeeze(self.x),
            z: squeeze(self.z),
        }
    }

    /// Inserts a new qubit at position `q` carrying `p`.
    pub fn insert_qubit(&self, q: usize, p: Pauli) -> PauliString {
        let lo = mask(q);
        let spread = |m: u64| (m & lo) | ((m & !lo) << 1);
        let mut s = PauliString {
            n: self.n + 1,
            x: spread(self.x),
            z: spread(self.z),
        };
        s.set(q, p).expect("inserted qubit in range");
        s
    }

    /// Embeds into a larger register, mapping local qubit `i` to `map[i]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<PauliString> {
        let mut s = PauliString::identity(n);
        for q in self.support() {
            s.set(map[q], self.get(q))?;
        }
        Ok(s)
    }

    /// Dense matrix of the string.
    pub fn to_matrix<T: Real>(&self) -> CMatrix<T> {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        let phases = [
            Complex::<T>::one(),
            Complex::<T>::i(),
            -Complex::<T>::one(),
            -Complex::<T>::i(),
        ];
        for b in 0..dim as u64 {
            let (k, b2) = self.apply_basis(b);
            m[(b2 as usize, b as usize)] = phases[k as usize];
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n).rev() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_label(s)
    }
}

/// Phase `i^k`.
pub fn i_pow<T: Real>(k: u8) -> Complex<T> {
    match k % 4 {
        0 => Complex::one(),
        1 => Complex::i(),
        2 => -Complex::<T>::one(),
        _ => -Complex::<T>::i(),
    }
}

/// Weighted sum of Pauli strings over a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// `c · I`.
    pub fn constant(n: usize, c: Complex<T>) -> Self {
        Self::from_terms(n, [(c, PauliString::identity(n))]).expect("identity fits")
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(n, Complex::one())
    }

    /// Canonical sum of the given terms: duplicates merged, tiny coefficients pruned.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Complex<T>, PauliString)>,
    ) -> Result<Self> {
        let mut out = Self::zero(n);
        for (c, p) in terms {
            if p.n_qubits() != n {
                return Err(Error::DimensionMismatch(format!(
                    "term on {} qubits in a {n}-qubit operator",
                    p.n_qubits()
                )));
            }
            out.accumulate(p, c);
        }
        out.prune();
        Ok(out)
    }

    /// Single term `c · P`.
    pub fn term(c: Complex<T>, p: PauliString) -> Self {
        let n = p.n_qubits();
        Self::from_terms(n, [(c, p)]).expect("single term")
    }

    /// Parses labelled terms such as `(0.5, "XI")`.
    pub fn from_labels(terms: &[(Complex<T>, &str)]) -> Result<Self> {
        let parsed: Vec<(Complex<T>, PauliString)> = terms
            .iter()
            .map(|(c, l)| PauliString::from_label(l).map(|p| (*c, p)))
            .collect::<Result<_>>()?;
        let n = parsed.first().map_or(0, |t| t.1.n_qubits());
        Self::from_terms(n, parsed)
    }

    fn accumulate(&mut self, p: PauliString, c: Complex<T>) {
        let e = self.terms.entry(p).or_insert_with(Complex::zero);
        *e = *e + c;
    }

    fn prune(&mut self) {
        let tol = T::prune_tol();
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    /// Re-applies merging and pruning.
    pub fn canonicalize(&self) -> Self {
        let mut out = self.clone();
        out.prune();
        out
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (sorted) order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex<T> {
        self.terms.get(p).copied().unwrap_or_else(Complex::zero)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (p, c) in &self.terms {
            out.accumulate(p.clone(), *c * s);
        }
        out.prune();
        out
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.clone(), c.conj()))
                .collect(),
        }
    }

    /// Hermitian iff every canonical coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest imaginary part among coefficients.
    pub fn hermiticity_defect(&self) -> T {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(T::zero(), T::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// True when all pairwise term products commute, which implies `[A, B] = 0`.
    pub fn commutes_termwise(&self, other: &Self) -> bool {
        self.terms
            .keys()
            .all(|p| other.terms.keys().all(|q| p.commutes_with(q)))
    }

    /// True when `[A, B]` vanishes after canonicalization.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.commutator(other).is_empty()
    }

    /// Sum of absolute coefficients.
    pub fn one_norm(&self) -> T {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Identity coefficient.
    pub fn constant_term(&self) -> Complex<T> {
        self.coefficient(&PauliString::identity(self.n))
    }

    /// Dense matrix, refusing registers above `limit` qubits.
    pub fn to_matrix_limited(&self, limit: usize) -> Result<CMatrix<T>> {
        if self.n > limit {
            return Err(Error::DenseLimit { n: self.n, limit });
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for b in 0..dim as u64 {
                let (k, b2) = p.apply_basis(b);
                let e = &mut m[(b2 as usize, b as usize)];
                *e = *e + *c * i_pow::<T>(k);
            }
        }
        Ok(m)
    }

    /// Dense matrix with the default limit.
    pub fn to_matrix(&self) -> Result<CMatrix<T>> {
        self.to_matrix_limited(DENSE_LIMIT)
    }

    /// Applies the operator to a dense vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let dim = 1usize << self.n;
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} qubits",
                v.len(),
                self.n
            )));
        }
        let mut out = vec![Complex::zero(); dim];
        for (p, c) in &self.terms {
            for (b, &a) in v.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (k, b2) = p.apply_basis(b as u64);
                out[b2 as usize] = out[b2 as usize] + *c * i_pow::<T>(k) * a;
            }
        }
        Ok(out)
    }

    /// Embeds into a larger register.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| p.embed(n, map).map(|q| (*c, q)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }

    /// Parses the `<re> <im> <string>` line format.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(perr(format!(
                    "expected `<re> <im> <string>`, got {} fields",
                    fields.len()
                )));
            }
            let re: f64 = fields[0]
                .parse()
                .map_err(|_| perr(format!("bad real part '{}'", fields[0])))?;
            let im: f64 = fields[1]
                .parse()
                .map_err(|_| perr(format!("bad imaginary part '{}'", fields[1])))?;
            let p = PauliString::from_label(fields[2]).map_err(|e| perr(e.to_string()))?;
            match n {
                None => n = Some(p.n_qubits()),
                Some(m) if m != p.n_qubits() => {
                    return Err(perr(format!(
                        "string length {} differs from {m}",
                        p.n_qubits()
                    )))
                }
                _ => {}
            }
            terms.push((Complex::new(T::lit(re), T::lit(im)), p));
        }
        Self::from_terms(n.unwrap_or(0), terms)
    }

    /// Writes the `<re> <im> <string>` line format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, c) in &self.terms {
            s.push_str(&format!("{:e} {:e} {}\n", c.re, c.im, p));
        }
        s
    }
}

impl<T: Real> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<T: Real> Add for &PauliSum<T> {
    type Output = PauliSum<T>;
    fn add(self, rhs: &PauliSum<T>) -> PauliSum<T> {
        assert_eq!(self.n, rhs.n, "register mismatch");
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.accumulate(p.clone(), *c);
        }
        out.prune();
        out
    }
}

impl<T: Real> Sub for &PauliSum<T> {
    type Output = PauliSum<T>;
    fn sub(self, rhs: &PauliSum<T>) -> PauliSum<T> {
        assert_eq!(self.n, rhs.n, "register mismatch");
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.accumulate(p.clone(), -*c);
        }
        out.prune();
        out
    }
}

impl<T: Real> Mul for &PauliSum<T> {
    type Output = PauliSum<T>;
    fn mul(self, rhs: &PauliSum<T>) -> PauliSum<T> {
        assert_eq!(self.n, rhs.n, "register mismatch");
        let mut out = PauliSum::zero(self.n);
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                let (k, r) = p.mul_phase(q);
                out.accumulate(r, *a * *b * i_pow::<T>(k));
            }
        }
        out.prune();
        out
    }
}

impl<T: Real> Neg for &PauliSum<T> {
    type Output = PauliSum<T>;
    fn neg(self) -> PauliSum<T> {
        self.scale(-Complex::<T>::one())
    }
}
