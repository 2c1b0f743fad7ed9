//! Finite windows of bi-infinite words, Parikh vectors, balance and letter
//! frequencies, and geometric representations.

use std::fmt;
use std::ops::{Add, Sub};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::QuadElem;

/// An ordered set of distinct single-character letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(Error::Degenerate("empty alphabet".into()));
        }
        if letters.len() > u8::MAX as usize {
            return Err(Error::Degenerate("alphabet too large".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::DuplicateRule(*c));
            }
            if *c == '|' || c.is_whitespace() {
                return Err(Error::Parse(format!("'{c}' cannot be a letter")));
            }
        }
        Ok(Self { letters })
    }

    /// `A, B, C, ...` with `size` letters.
    pub fn latin(size: usize) -> Self {
        Self::new((0..size as u8).map(|i| (b'A' + i) as char)).expect("latin alphabet")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn letter(&self, index: u8) -> char {
        self.letters[index as usize]
    }

    pub fn index_of(&self, c: char) -> Result<u8> {
        self.letters
            .iter()
            .position(|&x| x == c)
            .map(|i| i as u8)
            .ok_or(Error::UnknownLetter(c))
    }
}

/// Signed letter counts indexed by an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParikhVec(pub Vec<i64>);

impl ParikhVec {
    pub fn zero(size: usize) -> Self {
        Self(vec![0; size])
    }

    pub fn of(letters: &[u8], size: usize) -> Self {
        let mut v = vec![0i64; size];
        for &l in letters {
            v[l as usize] += 1;
        }
        Self(v)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.0.iter().zip(weights).map(|(&c, w)| c as f64 * w).sum()
    }

    pub fn dot_exact(&self, weights: &[QuadElem]) -> QuadElem {
        let field = weights[0].field();
        self.0
            .iter()
            .zip(weights)
            .fold(field.zero(), |acc, (&c, w)| &acc + &w.scale_int(c))
    }
}

impl Add for &ParikhVec {
    type Output = ParikhVec;
    fn add(self, rhs: &ParikhVec) -> ParikhVec {
        ParikhVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ParikhVec {
    type Output = ParikhVec;
    fn sub(self, rhs: &ParikhVec) -> ParikhVec {
        ParikhVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// A finite factor `u[-origin, len - origin)` of a bi-infinite word; the
/// delimiter sits right before `letters[origin]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordWindow {
    alphabet: Alphabet,
    letters: Vec<u8>,
    origin: usize,
}

impl WordWindow {
    pub fn new(alphabet: Alphabet, letters: Vec<u8>, origin: usize) -> Result<Self> {
        if origin > letters.len() {
            return Err(Error::Degenerate(format!(
                "origin {origin} beyond window of length {}",
                letters.len()
            )));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= alphabet.len()) {
            return Err(Error::Degenerate(format!("letter index {bad} out of alphabet")));
        }
        Ok(Self {
            alphabet,
            letters,
            origin,
        })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            letters: Vec::new(),
            origin: 0,
        }
    }

    /// Parses `AAB|AB`; without a `|` the origin is the first letter.
    ///
    /// When no alphabet is given, the distinct letters are taken in sorted
    /// order.
    pub fn parse(text: &str, alphabet: Option<&Alphabet>) -> Result<Self> {
        let text = text.trim();
        let bars = text.matches('|').count();
        if bars > 1 {
            return Err(Error::Parse("more than one origin marker".into()));
        }
        let alphabet = match alphabet {
            Some(a) => a.clone(),
            None => {
                let mut ls: Vec<char> = text.chars().filter(|&c| c != '|').collect();
                ls.sort_unstable();
                ls.dedup();
                if ls.is_empty() {
                    return Err(Error::Parse("cannot infer an alphabet from an empty word".into()));
                }
                Alphabet::new(ls)?
            }
        };
        let mut letters = Vec::with_capacity(text.len());
        let mut origin = 0;
        for c in text.chars() {
            if c == '|' {
                origin = letters.len();
            } else {
                letters.push(alphabet.index_of(c)?);
            }
        }
        Self::new(alphabet, letters, origin)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Smallest addressable index.
    pub fn lo(&self) -> i64 {
        -(self.origin as i64)
    }

    /// One past the largest addressable index.
    pub fn hi(&self) -> i64 {
        (self.letters.len() - self.origin) as i64
    }

    /// `u_n` as a letter index.
    pub fn at(&self, n: i64) -> Option<u8> {
        if n < self.lo() || n >= self.hi() {
            return None;
        }
        Some(self.letters[(n + self.origin as i64) as usize])
    }

    pub fn char_at(&self, n: i64) -> Option<char> {
        self.at(n).map(|l| self.alphabet.letter(l))
    }

    /// The letters `u[from, to)`.
    pub fn factor(&self, from: i64, to: i64) -> Result<&[u8]> {
        if from < self.lo() || to > self.hi() || from > to {
            return Err(Error::IndexOutOfRange {
                index: if from < self.lo() { from } else { to },
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        let o = self.origin as i64;
        Ok(&self.letters[(from + o) as usize..(to + o) as usize])
    }

    /// Concatenation keeping the origin of `self`.
    pub fn concat(&self, other: &WordWindow) -> Result<WordWindow> {
        if self.alphabet != other.alphabet {
            return Err(Error::Degenerate("concatenating words over different alphabets".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        WordWindow::new(self.alphabet.clone(), letters, self.origin)
    }

    /// Signed Parikh vector: `Psi(u[0,n))` for `n >= 0`, `-Psi(u[n,0))` otherwise.
    pub fn parikh_prefix(&self, n: i64) -> Result<ParikhVec> {
        let size = self.alphabet.len();
        if n < self.lo() || n > self.hi() {
            return Err(Error::IndexOutOfRange {
                index: n,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        if n >= 0 {
            Ok(ParikhVec::of(self.factor(0, n)?, size))
        } else {
            let mut v = ParikhVec::of(self.factor(n, 0)?, size);
            v.0.iter_mut().for_each(|c| *c = -*c);
            Ok(v)
        }
    }

    /// `f^T Psi[n]` for every `n` in `[lo, hi]`, in increasing order of `n`.
    pub fn parikh_functional(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.letters.len() + 1];
        let o = self.origin;
        for i in o..self.letters.len() {
            out[i + 1] = out[i] + weights[self.letters[i] as usize];
        }
        for i in (0..o).rev() {
            out[i] = out[i + 1] - weights[self.letters[i] as usize];
        }
        out
    }

    /// Least `c` with `|w|_a - |v|_a <= c` over all factor pairs `w, v` of
    /// equal length `<= max_len` and all letters `a`.
    ///
    /// Only a lower bound for the balance constant of the infinite word.
    pub fn balance_constant(&self, max_len: usize) -> u64 {
        let n = self.letters.len();
        let max_len = max_len.min(n);
        let mut best = 0u64;
        let mut prefix = vec![0u32; n + 1];
        for a in 0..self.alphabet.len() as u8 {
            for (i, &l) in self.letters.iter().enumerate() {
                prefix[i + 1] = prefix[i] + (l == a) as u32;
            }
            for len in 1..=max_len {
                let (mut lo, mut hi) = (u32::MAX, 0u32);
                for start in 0..=n - len {
                    let c = prefix[start + len] - prefix[start];
                    lo = lo.min(c);
                    hi = hi.max(c);
                }
                best = best.max((hi - lo) as u64);
            }
        }
        best
    }

    /// [`Self::balance_constant`] with `max_len = min(len/10, 1000)`.
    pub fn balance_constant_default(&self) -> u64 {
        self.balance_constant((self.len() / 10).min(1000))
    }

    /// Empirical `|w|_a / |w|` as exact rationals, ordered by the alphabet.
    pub fn letter_frequencies(&self) -> Vec<BigRational> {
        if self.letters.is_empty() {
            return Vec::new();
        }
        let counts = ParikhVec::of(&self.letters, self.alphabet.len());
        let n = self.letters.len() as i64;
        counts
            .0
            .iter()
            .map(|&c| BigRational::new(c.into(), n.into()))
            .collect()
    }
}

impl fmt::Display for WordWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &l) in self.letters.iter().enumerate() {
            if i == self.origin {
                f.write_str("|")?;
            }
            write!(f, "{}", self.alphabet.letter(l))?;
        }
        if self.origin == self.letters.len() {
            f.write_str("|")?;
        }
        Ok(())
    }
}

/// A geometric representation: points `x_n = (l_1..l_d) . Psi[n]`.
#[derive(Debug, Clone)]
pub struct GeomRep {
    window: WordWindow,
    lengths: Vec<QuadElem>,
}

impl GeomRep {
    pub fn new(window: WordWindow, lengths: Vec<QuadElem>) -> Result<Self> {
        if lengths.len() != window.alphabet().len() {
            return Err(Error::Degenerate(format!(
                "{} lengths for an alphabet of {} letters",
                lengths.len(),
                window.alphabet().len()
            )));
        }
        let field = lengths[0].field();
        for (i, l) in lengths.iter().enumerate() {
            if l.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.d(),
                    right: l.field().d(),
                });
            }
            if !l.is_positive() {
                return Err(Error::NonPositiveLength(window.alphabet().letter(i as u8)));
            }
        }
        Ok(Self { window, lengths })
    }

    pub fn window(&self) -> &WordWindow {
        &self.window
    }

    pub fn lengths(&self) -> &[QuadElem] {
        &self.lengths
    }

    /// `x_n` for `n` in `[lo, hi]`; `x_0 = 0` and `x_{n+1} - x_n = l_{u_n}`.
    pub fn points(&self) -> Vec<QuadElem> {
        let w = &self.window;
        let field = self.lengths[0].field();
        let mut out = vec![field.zero(); w.len() + 1];
        let o = w.origin();
        for i in o..w.len() {
            out[i + 1] = &out[i] + &self.lengths[w.letters()[i] as usize];
        }
        for i in (0..o).rev() {
            out[i] = &out[i + 1] - &self.lengths[w.letters()[i] as usize];
        }
        out
    }
}

/// Float geometric representation for lengths without an exact form.
pub fn geometric_points_f64(window: &WordWindow, lengths: &[f64]) -> Result<Vec<f64>> {
    if lengths.len() != window.alphabet().len() {
        return Err(Error::Degenerate("one length per letter required".into()));
    }
    if let Some(i) = lengths.iter().position(|&l| !(l > 0.0)) {
        return Err(Error::NonPositiveLength(window.alphabet().letter(i as u8)));
    }
    Ok(window.parikh_functional(lengths))
}
