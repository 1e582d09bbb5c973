//! Automorphisms of the binary rooted tree for the Grigorchuk-type family
//! parameterized by ternary sequences.
//!
//! The group attached to a sequence is generated by the root swap `a` and
//! three recursively defined generators `b`, `c`, `d` whose first-level
//! behavior is steered by the current sequence symbol. All algorithms here
//! (triviality, element order, tree action, wreath decomposition) work with
//! canonical words over `{a, b, c, d}` and consume only finitely many
//! symbols of the sequence.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::oracles::{Effort, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrigError {
    #[error("invalid ternary sequence text at byte {pos}: {reason}")]
    SequenceText { pos: usize, reason: String },
    #[error("unknown letter {0:?} (expected one of a, b, c, d)")]
    UnknownLetter(char),
    #[error("invalid tree vertex {0:?} (expected a binary string)")]
    BadVertex(String),
}

/// Finitely described element of `{0,1,2}^N`: a finite prefix followed by a
/// tail word repeated forever.
///
/// Values are normalized on construction (primitive tail, prefix absorbed
/// into the tail where possible) so equal symbol streams compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernarySequence {
    prefix: Vec<u8>,
    tail: Vec<u8>,
}

impl TernarySequence {
    pub fn new(prefix: Vec<u8>, tail: Vec<u8>) -> Result<Self, GrigError> {
        if tail.is_empty() {
            return Err(GrigError::SequenceText {
                pos: 0,
                reason: "tail must be nonempty".into(),
            });
        }
        for (pos, &s) in prefix.iter().chain(tail.iter()).enumerate() {
            if s > 2 {
                return Err(GrigError::SequenceText {
                    pos,
                    reason: format!("symbol {s} out of range"),
                });
            }
        }
        let mut seq = TernarySequence { prefix, tail };
        seq.normalize();
        Ok(seq)
    }

    pub fn constant(symbol: u8) -> Self {
        TernarySequence::new(Vec::new(), vec![symbol]).expect("symbol in range")
    }

    /// Parses `PREFIX(TAIL)` with PREFIX in {0,1,2}* and TAIL in {0,1,2}+.
    pub fn parse(text: &str) -> Result<Self, GrigError> {
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| GrigError::SequenceText {
            pos: t.len(),
            reason: "missing '(' before the repeating tail".into(),
        })?;
        if !t.ends_with(')') {
            return Err(GrigError::SequenceText {
                pos: t.len(),
                reason: "missing closing ')'".into(),
            });
        }
        let digit = |(pos, ch): (usize, char)| -> Result<u8, GrigError> {
            match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(GrigError::SequenceText {
                    pos,
                    reason: format!("unexpected character {ch:?}"),
                }),
            }
        };
        let prefix = t[..open].char_indices().map(digit).collect::<Result<Vec<_>, _>>()?;
        let tail = t[open + 1..t.len() - 1]
            .char_indices()
            .map(|(p, c)| digit((p + open + 1, c)))
            .collect::<Result<Vec<_>, _>>()?;
        TernarySequence::new(prefix, tail)
    }

    fn normalize(&mut self) {
        // Replace the tail by its primitive root.
        let n = self.tail.len();
        for d in 1..n {
            if n % d == 0 && self.tail.chunks(d).all(|c| c == &self.tail[..d]) {
                self.tail.truncate(d);
                break;
            }
        }
        // Absorb prefix symbols that already agree with the rotated tail.
        while let Some(&last) = self.prefix.last() {
            if last == *self.tail.last().expect("tail nonempty") {
                self.prefix.pop();
                let end = self.tail.pop().expect("tail nonempty");
                self.tail.insert(0, end);
            } else {
                break;
            }
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail_len(&self) -> usize {
        self.tail.len()
    }

    /// Symbol at position `i` of the infinite stream.
    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.tail[(i - self.prefix.len()) % self.tail.len()]
        }
    }

    /// Drops the first symbol (rotating the tail once the prefix is gone).
    pub fn shift(&self) -> TernarySequence {
        let mut out = self.clone();
        if out.prefix.is_empty() {
            let first = out.tail.remove(0);
            out.tail.push(first);
        } else {
            out.prefix.remove(0);
        }
        out.normalize();
        out
    }

    pub fn shift_by(&self, n: usize) -> TernarySequence {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.shift();
        }
        out
    }

    pub fn classify(&self) -> SequenceClass {
        let in_e = self.tail.len() == 1;
        let in_i = [0u8, 1, 2].iter().all(|s| self.tail.contains(s));
        SequenceClass { in_e, in_i, in_c: true }
    }

    pub fn canonical_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TernarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.prefix {
            write!(f, "{s}")?;
        }
        f.write_str("(")?;
        for s in &self.tail {
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Membership of a sequence in the classes controlling the group properties:
/// eventually constant (E), all three symbols infinitely often (I), and
/// recursive (C; always true for finitely described sequences).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceClass {
    pub in_e: bool,
    pub in_i: bool,
    pub in_c: bool,
}

/// Generator letters of the tree groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    A,
    B,
    C,
    D,
}

impl Gen {
    fn from_char(ch: char) -> Result<Gen, GrigError> {
        match ch {
            'a' => Ok(Gen::A),
            'b' => Ok(Gen::B),
            'c' => Ok(Gen::C),
            'd' => Ok(Gen::D),
            _ => Err(GrigError::UnknownLetter(ch)),
        }
    }

    fn to_char(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::B => 'b',
            Gen::C => 'c',
            Gen::D => 'd',
        }
    }

    /// Klein-table product of two letters from {b, c, d}; `None` means the
    /// product is the identity.
    fn klein(self, other: Gen) -> Option<Gen> {
        use Gen::*;
        match (self, other) {
            (B, C) | (C, B) => Some(D),
            (B, D) | (D, B) => Some(C),
            (C, D) | (D, C) => Some(B),
            _ => None, // equal letters square to the identity
        }
    }

    /// First-level section of a b/c/d letter under the given symbol:
    /// `true` means the section is `a`, `false` the identity.
    fn level_flip(self, symbol: u8) -> bool {
        match self {
            Gen::B => symbol == 0 || symbol == 1,
            Gen::C => symbol == 0 || symbol == 2,
            Gen::D => symbol == 1 || symbol == 2,
            Gen::A => unreachable!("a has no table entry"),
        }
    }
}

/// Word over `{a, b, c, d}` in canonical alternating form: reduced under the
/// involution relations and the Klein table (`bc = cb = d` and its rotations),
/// which hold in the group of every sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GrigWord {
    letters: Vec<Gen>,
}

impl GrigWord {
    pub fn identity() -> Self {
        GrigWord::default()
    }

    /// Canonical form of a raw letter sequence.
    pub fn reduce(raw: impl IntoIterator<Item = Gen>) -> GrigWord {
        let mut letters: Vec<Gen> = Vec::new();
        for l in raw {
            push_letter(&mut letters, l);
        }
        GrigWord { letters }
    }

    pub fn parse(text: &str) -> Result<GrigWord, GrigError> {
        let t = text.trim();
        if t == "1" {
            return Ok(GrigWord::identity());
        }
        let raw: Vec<Gen> = t.chars().map(Gen::from_char).collect::<Result<_, _>>()?;
        Ok(GrigWord::reduce(raw))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.letters
    }

    pub fn mul(&self, rhs: &GrigWord) -> GrigWord {
        let mut letters = self.letters.clone();
        for &l in &rhs.letters {
            push_letter(&mut letters, l);
        }
        GrigWord { letters }
    }

    /// Every letter is an involution, so the inverse is the reversal.
    pub fn inverse(&self) -> GrigWord {
        GrigWord { letters: self.letters.iter().rev().copied().collect() }
    }

    pub fn pow(&self, exp: u64) -> GrigWord {
        let mut letters = Vec::with_capacity(self.letters.len() * exp as usize);
        for _ in 0..exp {
            for &l in &self.letters {
                push_letter(&mut letters, l);
            }
        }
        GrigWord { letters }
    }

    /// `true` when the word swaps the two subtrees at the root, i.e. when it
    /// contains an odd number of `a` letters.
    pub fn root_swaps(&self) -> bool {
        self.letters.iter().filter(|&&l| l == Gen::A).count() % 2 == 1
    }
}

impl fmt::Display for GrigWord {
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

fn push_letter(letters: &mut Vec<Gen>, mut l: Gen) {
    loop {
        match letters.last() {
            Some(&top) if top == l => {
                letters.pop();
                return;
            }
            Some(&top) if top != Gen::A && l != Gen::A => {
                letters.pop();
                match top.klein(l) {
                    Some(prod) => l = prod, // merged letter may interact again
                    None => return,
                }
            }
            _ => {
                letters.push(l);
                return;
            }
        }
    }
}

/// Records the largest sequence index read during an instrumented run.
#[derive(Debug, Default)]
pub struct ReadMeter(AtomicUsize);

impl ReadMeter {
    pub fn new() -> Self {
        ReadMeter(AtomicUsize::new(0))
    }

    fn record(&self, index: usize) {
        self.0.fetch_max(index + 1, Ordering::Relaxed);
    }

    /// Number of leading symbols touched (max accessed index + 1).
    pub fn symbols_read(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }
}

struct Ctx<'a> {
    seq: &'a TernarySequence,
    meter: Option<&'a ReadMeter>,
}

impl Ctx<'_> {
    fn symbol(&self, i: usize) -> u8 {
        if let Some(m) = self.meter {
            m.record(i);
        }
        self.seq.symbol(i)
    }
}

/// The wreath-type decomposition of a word: its two first-level sections and
/// the root permutation. Sections are words over the alphabet of the shifted
/// sequence's group.
pub fn wreath_decompose(
    seq: &TernarySequence,
    word: &GrigWord,
) -> (GrigWord, GrigWord, bool) {
    decompose_at(&Ctx { seq, meter: None }, 0, word)
}

fn decompose_at(ctx: &Ctx<'_>, depth: usize, word: &GrigWord) -> (GrigWord, GrigWord, bool) {
    let total_swaps = word.root_swaps();
    let mut side0: Vec<Gen> = Vec::new();
    let mut side1: Vec<Gen> = Vec::new();
    // A letter's sections land on sides permuted by the root action of the
    // suffix to its right; track that parity in one left-to-right pass.
    let mut suffix_flips = word.letters.iter().filter(|&&l| l == Gen::A).count() % 2;
    let symbol = if word.letters.iter().any(|&l| l != Gen::A) {
        Some(ctx.symbol(depth))
    } else {
        None
    };
    for &l in &word.letters {
        match l {
            Gen::A => {
                suffix_flips ^= 1;
            }
            k => {
                let (to0, to1) = if suffix_flips == 0 {
                    (k.level_flip(symbol.expect("symbol fetched")).then_some(Gen::A), Some(k))
                } else {
                    (Some(k), k.level_flip(symbol.expect("symbol fetched")).then_some(Gen::A))
                };
                if let Some(g) = to0 {
                    push_letter(&mut side0, g);
                }
                if let Some(g) = to1 {
                    push_letter(&mut side1, g);
                }
            }
        }
    }
    (GrigWord { letters: side0 }, GrigWord { letters: side1 }, total_swaps)
}

/// Image of a tree vertex (binary string) under the automorphism `word`.
pub fn act(seq: &TernarySequence, word: &GrigWord, vertex: &str) -> Result<String, GrigError> {
    let mut bits: Vec<u8> = Vec::with_capacity(vertex.len());
    for ch in vertex.chars() {
        match ch {
            '0' => bits.push(0),
            '1' => bits.push(1),
            _ => return Err(GrigError::BadVertex(vertex.to_string())),
        }
    }
    // w = l1 l2 ... lm acts as the composite l1(l2(...lm(v))).
    for &l in word.letters.iter().rev() {
        act_letter(seq, 0, l, &mut bits, 0);
    }
    Ok(bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect())
}

fn act_letter(seq: &TernarySequence, depth: usize, letter: Gen, bits: &mut [u8], at: usize) {
    if at >= bits.len() {
        return;
    }
    match letter {
        Gen::A => bits[at] ^= 1,
        k => {
            if bits[at] == 0 {
                if k.level_flip(seq.symbol(depth)) {
                    if at + 1 < bits.len() {
                        bits[at + 1] ^= 1;
                    }
                }
            } else {
                act_letter(seq, depth + 1, k, bits, at + 1);
            }
        }
    }
}

/// Decides whether `word` acts as the identity automorphism.
///
/// The verdict is certified whenever it is `Trivial`/`Nontrivial`; the budget
/// (counted in recursion nodes) only guards pathological recursion.
pub fn is_trivial(seq: &TernarySequence, word: &GrigWord, budget: u64) -> Verdict {
    is_trivial_inner(seq, word, budget, None)
}

/// Instrumented variant reporting how many leading sequence symbols were read.
pub fn is_trivial_metered(
    seq: &TernarySequence,
    word: &GrigWord,
    budget: u64,
) -> (Verdict, usize) {
    let meter = ReadMeter::new();
    let verdict = is_trivial_inner(seq, word, budget, Some(&meter));
    (verdict, meter.symbols_read())
}

fn is_trivial_inner(
    seq: &TernarySequence,
    word: &GrigWord,
    budget: u64,
    meter: Option<&ReadMeter>,
) -> Verdict {
    let ctx = Ctx { seq, meter };
    let mut nodes_left = budget;
    match trivial_rec(&ctx, 0, word, &mut nodes_left) {
        Some(true) => Verdict::Trivial,
        Some(false) => Verdict::Nontrivial,
        None => Verdict::Unknown(Effort {
            budget,
            spent: budget,
            unit: "recursion nodes",
        }),
    }
}

fn trivial_rec(ctx: &Ctx<'_>, depth: usize, word: &GrigWord, nodes_left: &mut u64) -> Option<bool> {
    if *nodes_left == 0 {
        return None;
    }
    *nodes_left -= 1;
    if word.is_empty() {
        return Some(true);
    }
    if word.root_swaps() {
        return Some(false);
    }
    if word.len() == 1 {
        // Single b/c/d letter: trivial iff its table entry is the identity at
        // every later symbol; one tail period past the prefix certifies that.
        let k = word.letters[0];
        let limit = depth.max(ctx.seq.prefix_len()) + ctx.seq.tail_len();
        for j in depth..limit {
            if k.level_flip(ctx.symbol(j)) {
                return Some(false);
            }
        }
        return Some(true);
    }
    let (w0, w1, _) = decompose_at(ctx, depth, word);
    Some(trivial_rec(ctx, depth + 1, &w0, nodes_left)? && trivial_rec(ctx, depth + 1, &w1, nodes_left)?)
}

/// Result of an order computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderResult {
    Finite(u64),
    ExceedsBudget(Effort),
}

/// Order of the automorphism `word` in the group of `seq`.
///
/// Finite results are certified: `word^m` is checked trivial and `word^(m/p)`
/// nontrivial for every prime `p` dividing `m`. The budget bounds both the
/// recursion node count and the largest order tried; elements of infinite
/// order come back as `ExceedsBudget`.
pub fn order(seq: &TernarySequence, word: &GrigWord, budget: u64) -> OrderResult {
    let mut session = OrderSession {
        budget,
        nodes_left: budget,
        memo: HashMap::new(),
        in_progress: HashMap::new(),
        doubling_depth: 0,
        canon_cache: HashMap::new(),
        root: seq.clone(),
    };
    let exceeded = |s: &OrderSession| {
        OrderResult::ExceedsBudget(Effort {
            budget: s.budget,
            spent: s.budget - s.nodes_left,
            unit: "recursion nodes",
        })
    };
    match session.order_rec(0, word.clone()) {
        Some(m) => {
            if m > budget {
                return exceeded(&session);
            }
            // Certification by explicit powering.
            let check_budget = budget.max(1 << 22);
            if !is_trivial(seq, &word.pow(m), check_budget).is_trivial() {
                panic!("order certification failed: {word} ^ {m} is not trivial");
            }
            for p in prime_divisors(m) {
                if is_trivial(seq, &word.pow(m / p), check_budget).is_trivial() {
                    panic!("order certification failed: {word} ^ {} already trivial", m / p);
                }
            }
            OrderResult::Finite(m)
        }
        None => exceeded(&session),
    }
}

struct OrderSession {
    budget: u64,
    nodes_left: u64,
    memo: HashMap<(TernarySequence, GrigWord), u64>,
    in_progress: HashMap<(TernarySequence, GrigWord), u64>,
    doubling_depth: u64,
    canon_cache: HashMap<usize, TernarySequence>,
    root: TernarySequence,
}

impl OrderSession {
    fn canon(&mut self, depth: usize) -> TernarySequence {
        if let Some(s) = self.canon_cache.get(&depth) {
            return s.clone();
        }
        let s = self.root.shift_by(depth);
        self.canon_cache.insert(depth, s.clone());
        s
    }

    fn order_rec(&mut self, depth: usize, word: GrigWord) -> Option<u64> {
        if self.nodes_left == 0 {
            return None;
        }
        self.nodes_left -= 1;
        if word.is_empty() {
            return Some(1);
        }
        let key = (self.canon(depth), word.clone());
        if let Some(&m) = self.memo.get(&key) {
            return Some(m);
        }
        if let Some(&entry_doubling) = self.in_progress.get(&key) {
            if self.doubling_depth > entry_doubling {
                // The cycle passes through a halving step, so the order would
                // satisfy m = 2^j * m with j >= 1: infinite order.
                return None;
            }
            // Pure identity-permutation cycle: the element acts on a deeper
            // copy of itself and contributes nothing beyond the fixpoint.
            return Some(1);
        }
        self.in_progress.insert(key.clone(), self.doubling_depth);
        let ctx = Ctx { seq: &self.root, meter: None };
        let (w0, w1, swaps) = decompose_at(&ctx, depth, &word);
        let result = if swaps {
            self.doubling_depth += 1;
            let half = self.order_rec(depth + 1, w0.mul(&w1));
            self.doubling_depth -= 1;
            half?.checked_mul(2)?
        } else {
            let o0 = self.order_rec(depth + 1, w0)?;
            let o1 = self.order_rec(depth + 1, w1)?;
            lcm(o0, o1)?
        };
        if result > self.budget {
            return None;
        }
        self.in_progress.remove(&key);
        self.memo.insert(key, result);
        let _ = seq;
        Some(result)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    (a / gcd(a, b)).checked_mul(b)
}

fn prime_divisors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}
