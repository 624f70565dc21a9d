//! Alphabets, transition sets and admissible words of a subshift of finite type.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Relative slack used when comparing cylinder lengths against a scale window.
pub const SCALE_REL_TOL: f64 = 1e-9;

/// A mixing subshift of finite type over a finite ordered alphabet.
///
/// Symbols are referred to by their index in the declared alphabet; the
/// declaration order fixes the lexicographic order used everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SubshiftSpec {
    names: Vec<String>,
    allowed: Vec<Vec<bool>>,
    mixing_power: usize,
}

impl SubshiftSpec {
    /// Validates an alphabet and a transition set given by symbol indices.
    pub fn new(names: Vec<String>, transitions: &[(usize, usize)]) -> Result<Self> {
        let k = names.len();
        if k == 0 {
            return Err(Error::InvalidSubshift("empty alphabet".into()));
        }
        let distinct: BTreeSet<&str> = names.iter().map(String::as_str).collect();
        if distinct.len() != k {
            return Err(Error::InvalidSubshift("duplicate symbol names".into()));
        }
        let mut allowed = vec![vec![false; k]; k];
        for &(a, b) in transitions {
            if a >= k || b >= k {
                return Err(Error::InvalidSubshift(format!(
                    "transition ({a}, {b}) outside an alphabet of {k} symbols"
                )));
            }
            allowed[a][b] = true;
        }
        for (s, name) in names.iter().enumerate() {
            let as_source = allowed[s].iter().any(|&x| x);
            let as_target = allowed.iter().any(|row| row[s]);
            if !as_source || !as_target {
                return Err(Error::UnusedLetter(name.clone()));
            }
        }
        let mixing_power = primitivity_exponent(&allowed).ok_or(Error::NotMixing)?;
        Ok(SubshiftSpec {
            names,
            allowed,
            mixing_power,
        })
    }

    /// Validates a subshift whose transitions are given by symbol names.
    pub fn from_names(names: &[&str], transitions: &[(&str, &str)]) -> Result<Self> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut pairs = Vec::with_capacity(transitions.len());
        for (a, b) in transitions {
            let ia = index_of(&owned, a)?;
            let ib = index_of(&owned, b)?;
            pairs.push((ia, ib));
        }
        SubshiftSpec::new(owned, &pairs)
    }

    /// The full shift on `k` symbols named `0..k`.
    pub fn full_shift(k: usize) -> Result<Self> {
        let names = (0..k).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> =
            (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
        SubshiftSpec::new(names, &pairs)
    }

    pub fn alphabet_len(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.names[symbol]
    }

    pub fn symbol(&self, name: &str) -> Result<usize> {
        index_of(&self.names, name)
    }

    pub fn allows(&self, a: usize, b: usize) -> bool {
        a < self.names.len() && b < self.names.len() && self.allowed[a][b]
    }

    /// Smallest `p` with every symbol pair joined by an admissible word of length `p + 1`.
    pub fn mixing_power(&self) -> usize {
        self.mixing_power
    }

    pub fn transitions(&self) -> Vec<(usize, usize)> {
        let k = self.names.len();
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| self.allowed[a][b])
            .collect()
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.allowed[a]
            .iter()
            .enumerate()
            .filter(|(_, &ok)| ok)
            .map(|(b, _)| b)
    }

    pub fn is_admissible(&self, symbols: &[usize]) -> bool {
        !symbols.is_empty()
            && symbols.iter().all(|&s| s < self.names.len())
            && symbols.windows(2).all(|w| self.allowed[w[0]][w[1]])
    }

    pub fn word(&self, symbols: Vec<usize>) -> Result<Word> {
        Word::new(self, symbols)
    }
}

fn index_of(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::InvalidSubshift(format!("unknown symbol `{name}`")))
}

fn primitivity_exponent(allowed: &[Vec<bool>]) -> Option<usize> {
    let k = allowed.len();
    // Wielandt: a primitive k x k matrix has A^p > 0 for some p <= (k-1)^2 + 1.
    let bound = (k - 1) * (k - 1) + 1;
    let mut power = allowed.to_vec();
    for p in 1..=bound {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return Some(p);
        }
        let mut next = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = (0..k).any(|m| power[i][m] && allowed[m][j]);
            }
        }
        power = next;
    }
    None
}

/// A finite admissible word `(a_0, ..., a_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(spec: &SubshiftSpec, symbols: Vec<usize>) -> Result<Self> {
        if spec.is_admissible(&symbols) {
            Ok(Word(symbols))
        } else {
            Err(Error::InadmissibleWord(symbols))
        }
    }

    pub(crate) fn from_vec_unchecked(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// `σ(a)`: the word with its first symbol dropped (empty for single symbols).
    pub fn shifted(&self) -> &[usize] {
        &self.0[1..]
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Finite truncation `(θ_{-n}, ..., θ_0)` of a backward sequence; the last
/// symbol is `θ_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TailWord(Vec<usize>);

impl TailWord {
    pub fn new(spec: &SubshiftSpec, symbols: Vec<usize>) -> Result<Self> {
        if spec.is_admissible(&symbols) {
            Ok(TailWord(symbols))
        } else {
            Err(Error::InadmissibleWord(symbols))
        }
    }

    /// A constant tail `(a, a, ..., a)` of the given length.
    pub fn constant(spec: &SubshiftSpec, symbol: usize, len: usize) -> Result<Self> {
        TailWord::new(spec, vec![symbol; len.max(1)])
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `θ_0`.
    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// The word `θ^n = (θ_{-n}, ..., θ_0)`.
    pub fn suffix(&self, n: usize) -> &[usize] {
        &self.0[self.0.len() - 1 - n..]
    }

    /// `θσ(a)`: appends all but the first symbol of a word starting with `θ_0`,
    /// then keeps at most `max_len` symbols (dropping the oldest).
    pub fn extended(&self, word: &[usize], max_len: usize) -> TailWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&word[1..]);
        if v.len() > max_len {
            v.drain(..v.len() - max_len);
        }
        TailWord(v)
    }

    /// `σ^{-n}(θ)`: the tail ending at `θ_{-n}`.
    pub fn backshift(&self, n: usize) -> TailWord {
        TailWord(self.0[..self.0.len() - n].to_vec())
    }

    /// Ultrametric distance on truncations: 1 if the last symbols differ,
    /// otherwise the length of the cylinder of the longest common suffix.
    pub fn distance(&self, other: &TailWord, cylinder_len: impl Fn(&[usize]) -> f64) -> f64 {
        if self.last() != other.last() {
            return 1.0;
        }
        let common = self
            .0
            .iter()
            .rev()
            .zip(other.0.iter().rev())
            .take_while(|(a, b)| a == b)
            .count();
        if common == self.0.len() && common == other.0.len() {
            return 0.0;
        }
        cylinder_len(&self.0[self.0.len() - common..])
    }
}

/// All admissible words of exactly `length` symbols, in lexicographic order.
pub fn enumerate_words(spec: &SubshiftSpec, length: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if length == 0 {
        return out;
    }
    let mut stack = Vec::with_capacity(length);
    for a in 0..spec.alphabet_len() {
        stack.push(a);
        extend_words(spec, length, &mut stack, &mut out);
        stack.pop();
    }
    out
}

/// Admissible words of `length` symbols starting with `first`.
pub fn enumerate_words_from(spec: &SubshiftSpec, first: usize, length: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if length == 0 {
        return out;
    }
    let mut stack = vec![first];
    extend_words(spec, length, &mut stack, &mut out);
    out
}

fn extend_words(spec: &SubshiftSpec, length: usize, stack: &mut Vec<usize>, out: &mut Vec<Word>) {
    if stack.len() == length {
        out.push(Word(stack.clone()));
        return;
    }
    let last = *stack.last().expect("nonempty");
    for b in spec.successors(last).collect::<Vec<_>>() {
        stack.push(b);
        extend_words(spec, length, stack, out);
        stack.pop();
    }
}

/// Words `a` starting with one of `starts` with `ρ/c₀ ≤ len(a) ≤ c₀ρ`.
///
/// `len` must be strictly decreasing under one-symbol extension; subtrees
/// are pruned as soon as the length drops below `ρ/c₀`. Output is in
/// lexicographic order. Fails with `ScaleTooFine` once more than `budget`
/// words have been visited.
pub fn words_at_scale_by(
    spec: &SubshiftSpec,
    starts: &[usize],
    rho: f64,
    c0: f64,
    budget: usize,
    len: impl Fn(&[usize]) -> f64,
) -> Result<Vec<Word>> {
    assert!(rho > 0.0 && c0 >= 1.0, "need rho > 0 and c0 >= 1");
    let lower = rho / c0 * (1.0 - SCALE_REL_TOL);
    let upper = rho * c0 * (1.0 + SCALE_REL_TOL);
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    for &a in starts {
        stack.push(a);
        scale_dfs(spec, &mut stack, lower, upper, &len, &mut out, &mut visited, budget, rho)?;
        stack.pop();
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn scale_dfs(
    spec: &SubshiftSpec,
    stack: &mut Vec<usize>,
    lower: f64,
    upper: f64,
    len: &impl Fn(&[usize]) -> f64,
    out: &mut Vec<Word>,
    visited: &mut usize,
    budget: usize,
    rho: f64,
) -> Result<()> {
    *visited += 1;
    if *visited > budget {
        return Err(Error::ScaleTooFine { rho, budget });
    }
    let l = len(stack);
    if l < lower {
        return Ok(());
    }
    if l <= upper {
        out.push(Word(stack.clone()));
    }
    let last = *stack.last().expect("nonempty");
    let succ: Vec<usize> = spec.successors(last).collect();
    for b in succ {
        stack.push(b);
        scale_dfs(spec, stack, lower, upper, len, out, visited, budget, rho)?;
        stack.pop();
    }
    Ok(())
}
