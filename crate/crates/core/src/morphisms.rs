//! Morphisms over finite alphabets, incidence matrices and bidirectional
//! fixed points of substitutions.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Alphabet, ParikhVec, WordWindow};

/// Letter-to-word map; images are stored as letter indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    alphabet: Alphabet,
    images: Vec<Vec<u8>>,
}

impl Morphism {
    pub fn new(alphabet: Alphabet, images: Vec<Vec<u8>>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::Degenerate("one image per letter required".into()));
        }
        for img in &images {
            if let Some(&bad) = img.iter().find(|&&l| l as usize >= alphabet.len()) {
                return Err(Error::Degenerate(format!("letter index {bad} out of alphabet")));
            }
        }
        Ok(Self { alphabet, images })
    }

    /// Parses `A->AAB;B->AB`, rejecting empty images.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, false)
    }

    pub fn parse_with(text: &str, allow_erasing: bool) -> Result<Self> {
        let mut heads = Vec::new();
        let mut bodies = Vec::new();
        for rule in text.split(';').map(str::trim).filter(|r| !r.is_empty()) {
            let (head, body) = rule
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("rule '{rule}' lacks '->'")))?;
            let mut hc = head.trim().chars();
            let h = match (hc.next(), hc.next()) {
                (Some(h), None) => h,
                _ => return Err(Error::Parse(format!("rule head '{}' must be one letter", head.trim()))),
            };
            if heads.contains(&h) {
                return Err(Error::DuplicateRule(h));
            }
            heads.push(h);
            bodies.push(body.trim().to_string());
        }
        if heads.is_empty() {
            return Err(Error::Parse("no rules".into()));
        }
        let alphabet = Alphabet::new(heads.iter().copied())?;
        let mut images = Vec::with_capacity(bodies.len());
        for (h, body) in heads.iter().zip(&bodies) {
            if body.is_empty() && !allow_erasing {
                return Err(Error::ErasingImage(*h));
            }
            let img = body
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| alphabet.index_of(c))
                .collect::<Result<Vec<u8>>>()?;
            images.push(img);
        }
        Ok(Self { alphabet, images })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let images = (0..alphabet.len() as u8).map(|i| vec![i]).collect();
        Self { alphabet, images }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, letter: u8) -> &[u8] {
        &self.images[letter as usize]
    }

    pub fn images(&self) -> &[Vec<u8>] {
        &self.images
    }

    pub fn is_non_erasing(&self) -> bool {
        self.images.iter().all(|i| !i.is_empty())
    }

    /// Letters `a` with `phi(a) = a w`, `w` non-empty.
    pub fn right_seeds(&self) -> Vec<u8> {
        (0..self.alphabet.len() as u8)
            .filter(|&a| {
                let img = self.image(a);
                img.len() >= 2 && img[0] == a
            })
            .collect()
    }

    /// Letters `b` with `phi(b) = v b`, `v` non-empty.
    pub fn left_seeds(&self) -> Vec<u8> {
        (0..self.alphabet.len() as u8)
            .filter(|&b| {
                let img = self.image(b);
                img.len() >= 2 && img[img.len() - 1] == b
            })
            .collect()
    }

    pub fn is_substitution(&self) -> bool {
        self.is_non_erasing() && !self.right_seeds().is_empty() && !self.left_seeds().is_empty()
    }

    /// `(M)_{ba} = |phi(a)|_b`.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let d = self.alphabet.len();
        let mut m = vec![vec![0u64; d]; d];
        for (a, img) in self.images.iter().enumerate() {
            for &b in img {
                m[b as usize][a] += 1;
            }
        }
        IncidenceMatrix::from_rows(m).expect("square by construction")
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if self.alphabet != other.alphabet {
            return Err(Error::Degenerate("composing morphisms over different alphabets".into()));
        }
        let images = other.images.iter().map(|img| self.apply_letters(img)).collect();
        Ok(Morphism {
            alphabet: self.alphabet.clone(),
            images,
        })
    }

    pub fn power(&self, k: u32) -> Morphism {
        let mut out = Morphism::identity(self.alphabet.clone());
        for _ in 0..k {
            out = self.compose(&out).expect("same alphabet");
        }
        out
    }

    pub fn apply_letters(&self, letters: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(letters.len() * 2);
        for &l in letters {
            out.extend_from_slice(self.image(l));
        }
        out
    }

    /// Image of a window; the origin lands between `phi(u_{-1})` and `phi(u_0)`.
    pub fn apply(&self, w: &WordWindow) -> Result<WordWindow> {
        if w.alphabet() != &self.alphabet {
            return Err(Error::Degenerate("window alphabet differs from morphism alphabet".into()));
        }
        let (left, right) = w.letters().split_at(w.origin());
        let mut letters = self.apply_letters(left);
        let origin = letters.len();
        letters.extend(self.apply_letters(right));
        WordWindow::new(self.alphabet.clone(), letters, origin)
    }

    fn check_seed(&self, left: Option<u8>, right: u8) -> std::result::Result<(), String> {
        if !self.is_non_erasing() {
            return Err("morphism is erasing".into());
        }
        let name = |l: u8| self.alphabet.letter(l);
        if !self.right_seeds().contains(&right) {
            return Err(format!("image of {} does not start with {0} followed by a non-empty word", name(right)));
        }
        if let Some(b) = left {
            if !self.left_seeds().contains(&b) {
                return Err(format!("image of {} does not end with {0} preceded by a non-empty word", name(b)));
            }
        }
        Ok(())
    }

    /// Streams the fixed point grown from the seed `left|right`.
    pub fn fixed_point_stream(&self, seed: Seed) -> Result<FixedPointStream> {
        let left = seed.left.map(|c| self.alphabet.index_of(c)).transpose()?;
        let right = self.alphabet.index_of(seed.right)?;
        if let Err(reason) = self.check_seed(left, right) {
            if left.is_some() && !self.is_substitution() {
                return Err(Error::NotSubstitution(reason));
            }
            return Err(Error::InadmissibleSeed {
                left: seed.left.map(String::from).unwrap_or_default(),
                right: seed.right,
                reason,
            });
        }
        Ok(FixedPointStream::new(self.clone(), left, right))
    }

    /// `u[-radius, radius)` of the fixed point seeded by `seed`, or
    /// `u[0, radius)` for a one-sided seed.
    pub fn fixed_point_window(&self, seed: Seed, radius: usize) -> Result<WordWindow> {
        let mut s = self.fixed_point_stream(seed)?;
        Ok(s.window(radius))
    }

    /// Tries `phi`, `phi^2`, `phi^3` in turn.
    ///
    /// The requested seed is kept whenever some power admits it; with no
    /// seed the first admissible pair in alphabet order is taken.
    pub fn fixed_point_auto(&self, seed: Option<Seed>, radius: usize) -> Result<FixedPoint> {
        let mut last_err = None;
        for power in 1..=3u32 {
            let m = self.power(power);
            let candidates: Vec<Seed> = match seed {
                Some(s) => vec![s],
                None => {
                    let rights = m.right_seeds();
                    let lefts = m.left_seeds();
                    let letter = |l: u8| m.alphabet.letter(l);
                    match (lefts.first(), rights.first()) {
                        (Some(&b), Some(&a)) => vec![Seed::two_sided(letter(b), letter(a))],
                        (None, Some(&a)) if power == 3 => vec![Seed::one_sided(letter(a))],
                        _ => Vec::new(),
                    }
                }
            };
            for s in candidates {
                match m.fixed_point_window(s, radius) {
                    Ok(window) => {
                        return Ok(FixedPoint {
                            power,
                            seed: s,
                            morphism: m,
                            window,
                        })
                    }
                    Err(e) => last_err = Some(e),
                }
            }
        }
        Err(last_err.unwrap_or_else(|| Error::NotSubstitution("no admissible seed for phi, phi^2 or phi^3".into())))
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}->", self.alphabet.letter(i as u8))?;
            for &l in img {
                write!(f, "{}", self.alphabet.letter(l))?;
            }
        }
        Ok(())
    }
}

/// The letters around the delimiter: `left|right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub left: Option<char>,
    pub right: char,
}

impl Seed {
    pub fn two_sided(left: char, right: char) -> Self {
        Self {
            left: Some(left),
            right,
        }
    }

    pub fn one_sided(right: char) -> Self {
        Self { left: None, right }
    }

    /// `B|A`, `|A` or `A`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let one = |s: &str| -> Result<char> {
            let mut cs = s.trim().chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Parse(format!("seed part '{s}' must be one letter"))),
            }
        };
        match t.split_once('|') {
            Some((l, r)) if l.trim().is_empty() => Ok(Self::one_sided(one(r)?)),
            Some((l, r)) => Ok(Self::two_sided(one(l)?, one(r)?)),
            None => Ok(Self::one_sided(one(t)?)),
        }
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.left {
            Some(l) => write!(f, "{l}|{}", self.right),
            None => write!(f, "|{}", self.right),
        }
    }
}

/// Result of [`Morphism::fixed_point_auto`].
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub power: u32,
    pub seed: Seed,
    pub morphism: Morphism,
    pub window: WordWindow,
}

/// Lazily grown fixed point. Each side is a buffer read outward from the
/// delimiter; the left buffer is stored reversed.
#[derive(Debug, Clone)]
pub struct FixedPointStream {
    morphism: Morphism,
    right: Vec<u8>,
    right_cursor: usize,
    left: Option<Vec<u8>>,
    left_cursor: usize,
}

impl FixedPointStream {
    fn new(morphism: Morphism, left: Option<u8>, right: u8) -> Self {
        let right_buf = morphism.image(right).to_vec();
        let left_buf = left.map(|b| morphism.image(b).iter().rev().copied().collect());
        Self {
            morphism,
            right: right_buf,
            right_cursor: 1,
            left: left_buf,
            left_cursor: 1,
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn is_two_sided(&self) -> bool {
        self.left.is_some()
    }

    fn grow(&mut self, radius: usize) {
        // phi(u_0 u_1 ... u_{k-1}) is already in the buffer, so the image of
        // the next unread letter extends it.
        while self.right.len() < radius {
            let l = self.right[self.right_cursor];
            let img = self.morphism.image(l).to_vec();
            self.right.extend(img);
            self.right_cursor += 1;
        }
        if let Some(left) = self.left.as_mut() {
            while left.len() < radius {
                let l = left[self.left_cursor];
                left.extend(self.morphism.image(l).iter().rev());
                self.left_cursor += 1;
            }
        }
    }

    /// Letters `u_0 .. u_{n-1}`.
    pub fn right_prefix(&mut self, n: usize) -> &[u8] {
        self.grow(n);
        &self.right[..n]
    }

    pub fn window(&mut self, radius: usize) -> WordWindow {
        self.grow(radius);
        let alphabet = self.morphism.alphabet.clone();
        let mut letters = Vec::with_capacity(2 * radius);
        let origin = match &self.left {
            Some(left) => {
                letters.extend(left[..radius].iter().rev());
                radius
            }
            None => 0,
        };
        letters.extend_from_slice(&self.right[..radius]);
        WordWindow::new(alphabet, letters, origin).expect("valid by construction")
    }
}

/// Non-negative integer square matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IncidenceMatrix {
    rows: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Degenerate("incidence matrix must be square and non-empty".into()));
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as u64).collect())
            .collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.rows[row][col]
    }

    pub fn to_i64(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| x as f64).collect())
            .collect()
    }

    pub fn mul(&self, other: &IncidenceMatrix) -> IncidenceMatrix {
        let n = self.dim();
        let mut out = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.rows[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * other.rows[k][j];
                }
            }
        }
        IncidenceMatrix { rows: out }
    }

    pub fn pow(&self, k: u32) -> IncidenceMatrix {
        (0..k).fold(Self::identity(self.dim()), |acc, _| acc.mul(self))
    }

    /// Exact big-integer power, for growth checks beyond `u64`.
    pub fn pow_big(&self, k: u32) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        let mut acc: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect())
            .collect();
        for _ in 0..k {
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for kk in 0..n {
                    if acc[i][kk].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        next[i][j] += &acc[i][kk] * self.rows[kk][j];
                    }
                }
            }
            acc = next;
        }
        acc
    }

    pub fn apply(&self, v: &ParikhVec) -> ParikhVec {
        ParikhVec(
            self.rows
                .iter()
                .map(|r| r.iter().zip(&v.0).map(|(&m, &x)| m as i64 * x).sum())
                .collect(),
        )
    }

    /// Some power up to the Wielandt bound `(d-1)^2 + 1` is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.dim();
        let bound = (n - 1) * (n - 1) + 1;
        // Track the zero pattern only.
        let base: Vec<Vec<bool>> = self.rows.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut cur = base.clone();
        for _ in 0..bound {
            if cur.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if cur[i][k] {
                        for j in 0..n {
                            next[i][j] |= base[k][j];
                        }
                    }
                }
            }
            cur = next;
        }
        cur.iter().all(|r| r.iter().all(|&x| x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_similar() -> Morphism {
        Morphism::parse("A->AAB;B->AB").unwrap()
    }

    #[test]
    fn parse_rules() {
        let m = self_similar();
        assert_eq!(m.image(0), &[0, 0, 1]);
        assert_eq!(m.image(1), &[0, 1]);
        assert_eq!(m.to_string(), "A->AAB;B->AB");
        assert!(Morphism::parse("A->A").is_ok());
        assert!(matches!(Morphism::parse("A->B;B->"), Err(Error::ErasingImage('B'))));
        assert!(Morphism::parse_with("A->B;B->", true).is_ok());
        assert!(matches!(Morphism::parse("A->AB;A->B"), Err(Error::DuplicateRule('A'))));
        assert!(matches!(Morphism::parse("A->AC;B->A"), Err(Error::UnknownLetter('C'))));
        assert!(matches!(Morphism::parse("AB"), Err(Error::Parse(_))));
    }

    #[test]
    fn incidence_matrices() {
        assert_eq!(self_similar().incidence_matrix().rows(), &[vec![2, 1], vec![1, 1]]);
        let id = Morphism::identity(Alphabet::latin(2));
        assert_eq!(id.incidence_matrix(), IncidenceMatrix::identity(2));
        let m = Morphism::parse("A->C;B->ACCCC;C->CB").unwrap();
        assert_eq!(
            m.incidence_matrix().rows(),
            &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 4, 1]]
        );
    }

    #[test]
    fn apply_moves_origin() {
        let m = self_similar();
        let w = WordWindow::parse("A|B", Some(m.alphabet())).unwrap();
        assert_eq!(m.apply(&w).unwrap().to_string(), "AAB|AB");
        let e = WordWindow::empty(m.alphabet().clone());
        assert!(m.apply(&e).unwrap().is_empty());
    }

    #[test]
    fn self_similar_fixed_point() {
        let m = self_similar();
        let w = m.fixed_point_window(Seed::two_sided('B', 'A'), 5).unwrap();
        assert_eq!(w.to_string(), "AABAB|AABAA");
        let long = m.fixed_point_window(Seed::two_sided('B', 'A'), 16).unwrap();
        assert!(long.to_string().contains("AABAB|AABAABAB"));
        assert!(m.fixed_point_window(Seed::two_sided('B', 'A'), 0).unwrap().is_empty());
    }

    #[test]
    fn fibonacci_is_one_sided() {
        let m = Morphism::parse("A->AB;B->A").unwrap();
        assert!(!m.is_substitution());
        let w = m.fixed_point_window(Seed::one_sided('A'), 8).unwrap();
        assert_eq!(w.to_string(), "|ABAABABA");
        assert!(matches!(
            m.fixed_point_window(Seed::two_sided('A', 'A'), 4),
            Err(Error::NotSubstitution(_))
        ));
    }

    #[test]
    fn auto_power_for_c_example() {
        let m = Morphism::parse("A->C;B->ACCCC;C->CB").unwrap();
        assert!(!m.is_substitution());
        assert!(m.power(2).is_substitution());
        let fp = m.fixed_point_auto(Some(Seed::two_sided('B', 'C')), 50).unwrap();
        assert_eq!(fp.power, 2);
        let fp = m.fixed_point_auto(None, 50).unwrap();
        assert_eq!(fp.power, 2);
    }

    #[test]
    fn inadmissible_seed_is_reported() {
        let m = self_similar();
        assert!(matches!(
            m.fixed_point_window(Seed::two_sided('A', 'B'), 3),
            Err(Error::InadmissibleSeed { .. })
        ));
    }

    #[test]
    fn primitivity() {
        assert!(self_similar().incidence_matrix().is_primitive());
        assert!(!IncidenceMatrix::identity(2).is_primitive());
        let perm = IncidenceMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!perm.is_primitive());
        let c = Morphism::parse("A->C;B->ACCCC;C->CB").unwrap();
        assert!(c.incidence_matrix().is_primitive());
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(Seed::parse("B|A").unwrap(), Seed::two_sided('B', 'A'));
        assert_eq!(Seed::parse("|A").unwrap(), Seed::one_sided('A'));
        assert_eq!(Seed::parse("A").unwrap(), Seed::one_sided('A'));
        assert!(Seed::parse("AB|C").is_err());
    }
}
