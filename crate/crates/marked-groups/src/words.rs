//! Free-group word algebra over `n` marked generators.
//!
//! A [`Word`] is always kept freely reduced, so values can be compared and
//! hashed directly. The text syntax used everywhere (CLI, JSON, group specs)
//! writes the generators as `a`..`z` and their inverses as `A`..`Z`; the
//! empty word is spelled `1`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single generator or inverse-generator symbol.
///
/// `index` is 1-based; `inverse` marks the formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub index: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(index: u16) -> Self {
        Letter { index, inverse: false }
    }

    pub fn inv(index: u16) -> Self {
        Letter { index, inverse: true }
    }

    pub fn inverse(self) -> Self {
        Letter { index: self.index, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }

    /// Position in the fixed letter order `g1 < g1^-1 < g2 < g2^-1 < ...`.
    pub fn slot(self) -> u32 {
        (u32::from(self.index) - 1) * 2 + u32::from(self.inverse)
    }

    fn from_slot(slot: u32) -> Self {
        Letter { index: (slot / 2 + 1) as u16, inverse: slot % 2 == 1 }
    }

    fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + (self.index - 1) as u8) as char
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("letter index {index} out of range for arity {arity}")]
    LetterOutOfRange { index: u16, arity: u16 },
    #[error("arity mismatch: word over {found} generators used where {expected} expected")]
    ArityMismatch { expected: u16, found: u16 },
    #[error("substitution requires one image per generator: got {got}, need {need}")]
    ImageCount { need: usize, got: usize },
    #[error("empty index sequence for commutator")]
    EmptyCommutator,
    #[error("invalid word text at byte {pos}: {reason}")]
    Text { pos: usize, reason: String },
}

/// A freely reduced word in the free group on `arity` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    arity: u16,
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word (identity element).
    pub fn identity(arity: u16) -> Self {
        Word { arity, letters: Vec::new() }
    }

    /// Single-generator word.
    pub fn generator(arity: u16, index: u16) -> Result<Self, WordError> {
        Word::from_letters(arity, vec![Letter::gen(index)])
    }

    /// Freely reduces a raw letter sequence.
    pub fn from_letters(
        arity: u16,
        raw: impl IntoIterator<Item = Letter>,
    ) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for l in raw {
            if l.index == 0 || l.index > arity {
                return Err(WordError::LetterOutOfRange { index: l.index, arity });
            }
            push_reduced(&mut letters, l);
        }
        Ok(Word { arity, letters })
    }

    pub fn arity(&self) -> u16 {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Reversed word with all signs flipped.
    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        // Reversal of a reduced word is reduced.
        Word { arity: self.arity, letters }
    }

    /// Product `self * rhs`, freely reduced.
    pub fn mul(&self, rhs: &Word) -> Word {
        debug_assert_eq!(self.arity, rhs.arity);
        let mut letters = self.letters.clone();
        for &l in &rhs.letters {
            push_reduced(&mut letters, l);
        }
        Word { arity: self.arity, letters }
    }

    /// `self^exp` for any integer exponent.
    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.arity);
        for _ in 0..exp.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Conjugate `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    /// Commutator `[self, rhs] = self rhs self^-1 rhs^-1`.
    pub fn commutator(&self, rhs: &Word) -> Word {
        self.mul(rhs).mul(&self.inverse()).mul(&rhs.inverse())
    }

    /// Exponent sum of generator `index` (image in the abelianization).
    pub fn exponent_sum(&self, index: u16) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.index == index)
            .map(|l| if l.inverse { -1 } else { 1 })
            .sum()
    }

    pub fn exponent_vector(&self) -> Vec<i64> {
        (1..=self.arity).map(|i| self.exponent_sum(i)).collect()
    }

    /// Reinterprets the word over a wider alphabet.
    pub fn widen(&self, arity: u16) -> Result<Word, WordError> {
        if arity < self.arity {
            return Err(WordError::ArityMismatch { expected: self.arity, found: arity });
        }
        Ok(Word { arity, letters: self.letters.clone() })
    }

    /// Homomorphic image under `gen_i -> images[i-1]`, freely reduced.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        if images.len() != usize::from(self.arity) {
            return Err(WordError::ImageCount { need: usize::from(self.arity), got: images.len() });
        }
        let target_arity = images.first().map(|w| w.arity).unwrap_or(self.arity);
        for im in images {
            if im.arity != target_arity {
                return Err(WordError::ArityMismatch { expected: target_arity, found: im.arity });
            }
        }
        let mut letters = Vec::new();
        for l in &self.letters {
            let image = &images[usize::from(l.index) - 1];
            if l.inverse {
                for im in image.letters.iter().rev() {
                    push_reduced(&mut letters, im.inverse());
                }
            } else {
                for &im in &image.letters {
                    push_reduced(&mut letters, im);
                }
            }
        }
        Ok(Word { arity: target_arity, letters })
    }

    /// Parses the `a..z`/`A..Z` syntax; `1` denotes the empty word.
    pub fn parse(arity: u16, text: &str) -> Result<Word, WordError> {
        let t = text.trim();
        if t == "1" {
            return Ok(Word::identity(arity));
        }
        let mut raw = Vec::with_capacity(t.len());
        for (pos, ch) in t.char_indices() {
            let letter = match ch {
                'a'..='z' => Letter::gen((ch as u8 - b'a' + 1).into()),
                'A'..='Z' => Letter::inv((ch as u8 - b'A' + 1).into()),
                _ => {
                    return Err(WordError::Text {
                        pos,
                        reason: format!("unexpected character {ch:?}"),
                    })
                }
            };
            if letter.index > arity {
                return Err(WordError::Text {
                    pos,
                    reason: format!("letter {ch:?} exceeds arity {arity}"),
                });
            }
            raw.push(letter);
        }
        Word::from_letters(arity, raw)
    }

    /// Length-lexicographic comparison key (length first, then letter slots).
    pub fn lenlex_key(&self) -> (usize, Vec<u32>) {
        (self.len(), self.letters.iter().map(|l| l.slot()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

fn push_reduced(letters: &mut Vec<Letter>, l: Letter) {
    match letters.last() {
        Some(&top) if top.cancels(l) => {
            letters.pop();
        }
        _ => letters.push(l),
    }
}

/// Emits every freely reduced word of length `<= max_len` exactly once, in
/// length-lexicographic order with letter order `g1 < g1^-1 < g2 < g2^-1 < ...`.
pub fn enumerate_words(arity: u16, max_len: usize) -> WordEnumeration {
    WordEnumeration { arity, max_len, current: Some(Vec::new()) }
}

/// Iterator returned by [`enumerate_words`]; deterministic across runs.
pub struct WordEnumeration {
    arity: u16,
    max_len: usize,
    current: Option<Vec<Letter>>,
}

impl WordEnumeration {
    fn slots(&self) -> u32 {
        u32::from(self.arity) * 2
    }

    /// Smallest letter allowed after `prev` (None when every slot cancels).
    fn first_after(&self, prev: Option<Letter>) -> Option<Letter> {
        (0..self.slots()).map(Letter::from_slot).find(|&l| match prev {
            Some(p) => !p.cancels(l),
            None => true,
        })
    }

    fn next_slot(&self, prev: Option<Letter>, from: Letter) -> Option<Letter> {
        (from.slot() + 1..self.slots()).map(Letter::from_slot).find(|&l| match prev {
            Some(p) => !p.cancels(l),
            None => true,
        })
    }

    fn advance(&mut self) {
        let mut cur = match self.current.take() {
            Some(c) => c,
            None => return,
        };
        let len = cur.len();
        // Odometer increment within the current length, carrying leftwards.
        while let Some(last) = cur.pop() {
            let prev = cur.last().copied();
            if let Some(next) = self.next_slot(prev, last) {
                cur.push(next);
                while cur.len() < len {
                    let first = self.first_after(cur.last().copied()).expect("arity >= 1");
                    cur.push(first);
                }
                self.current = Some(cur);
                return;
            }
        }
        // All words of this length emitted; start the next length.
        if len < self.max_len {
            let mut fresh = Vec::with_capacity(len + 1);
            while fresh.len() < len + 1 {
                let first = self.first_after(fresh.last().copied()).expect("arity >= 1");
                fresh.push(first);
            }
            self.current = Some(fresh);
        }
    }
}

impl Iterator for WordEnumeration {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let out = self.current.as_ref().map(|letters| Word {
            arity: self.arity,
            letters: letters.clone(),
        })?;
        self.advance();
        Some(out)
    }
}

/// Number of freely reduced words of length exactly `len` over `arity` generators.
pub fn reduced_word_count(arity: u16, len: usize) -> u64 {
    let n = u64::from(arity);
    match len {
        0 => 1,
        _ => 2 * n * (2 * n - 1).pow((len - 1) as u32),
    }
}

/// Left-normed simple commutator `[g_{i1}, g_{i2}, ..., g_{ik+1}]` with the
/// convention `[x, y] = x y x^-1 y^-1` and `[x, y, z] = [[x, y], z]`.
pub fn simple_commutator(arity: u16, indices: &[u16]) -> Result<Word, WordError> {
    let mut iter = indices.iter();
    let first = iter.next().ok_or(WordError::EmptyCommutator)?;
    let mut acc = Word::generator(arity, *first)?;
    for &i in iter {
        let g = Word::generator(arity, i)?;
        acc = acc.commutator(&g);
    }
    Ok(acc)
}

/// Options steering the derived-witness generator.
///
/// The generator is deliberately one-sided: it emits nested commutators of
/// lower-stage witnesses, so everything it produces lies in the k-th derived
/// subgroup, but no completeness up to `max_len` is claimed.
#[derive(Debug, Clone)]
pub struct DerivedGenOptions {
    /// Length cap for the stage-0 words fed into the first commutator layer.
    pub base_len: usize,
    /// Admit a pair (u, v) into stage j only when |u| + |v| <= max_len + slack.
    pub pair_slack: usize,
    /// Hard cap on commutator evaluations per stage.
    pub max_pairs_per_stage: usize,
}

impl Default for DerivedGenOptions {
    fn default() -> Self {
        DerivedGenOptions { base_len: 4, pair_slack: 6, max_pairs_per_stage: 2_000_000 }
    }
}

/// Nontrivial words of length `<= max_len` lying in the `degree`-th derived
/// subgroup, generated as nested commutators of stage-(degree-1) witnesses.
///
/// Output is deduplicated and sorted length-lexicographically.
pub fn derived_witnesses(arity: u16, degree: u32, max_len: usize) -> Vec<Word> {
    derived_witnesses_with(arity, degree, max_len, &DerivedGenOptions::default())
}

pub fn derived_witnesses_with(
    arity: u16,
    degree: u32,
    max_len: usize,
    opts: &DerivedGenOptions,
) -> Vec<Word> {
    assert!(degree >= 1, "derived degree must be >= 1");
    let mut stage: Vec<Word> = enumerate_words(arity, opts.base_len.min(max_len.max(1)))
        .filter(|w| !w.is_empty())
        .collect();
    for level in 1..=degree {
        // Intermediate stages keep some headroom so that the last commutator
        // layer still has material to cancel against.
        let cap = if level == degree { max_len } else { max_len + opts.pair_slack };
        let mut next = Vec::new();
        let mut budget = opts.max_pairs_per_stage;
        'outer: for u in &stage {
            for v in &stage {
                if u.len() + v.len() > cap + opts.pair_slack {
                    continue;
                }
                if budget == 0 {
                    break 'outer;
                }
                budget -= 1;
                let c = u.commutator(v);
                if !c.is_empty() && c.len() <= cap {
                    next.push(c);
                }
            }
        }
        next.sort_by(|a, b| a.lenlex_key().cmp(&b.lenlex_key()));
        next.dedup();
        stage = next;
    }
    stage.retain(|w| w.len() <= max_len);
    stage
}
