//! Words, relations, presentations, single-step rewriting, and bounded
//! derivation search.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::gates::{InterpError, Interpretation};

pub type SymId = u32;

/// Interned symbol table. Symbol ids are indices into the insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, SymId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Alphabet::default()
    }

    pub fn intern(&mut self, name: &str) -> SymId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as SymId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<SymId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

/// Finite sequence of symbols; the empty word is the monoid identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<SymId>);

impl Word {
    pub fn new(symbols: Vec<SymId>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[SymId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, sym: SymId) {
        self.0.push(sym);
    }

    /// Reversed symbol sequence; the formal inverse over a self-inverse
    /// alphabet.
    pub fn formal_reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayWord<'a> {
        DisplayWord {
            word: self,
            alphabet,
        }
    }
}

pub struct DisplayWord<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, ".");
        }
        let toks: Vec<&str> = self
            .word
            .symbols()
            .iter()
            .map(|&s| self.alphabet.name(s))
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

/// Oriented pair of words with a stable id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub id: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(id: impl Into<String>, lhs: Word, rhs: Word) -> Self {
        Relation {
            id: id.into(),
            lhs,
            rhs,
        }
    }

    pub fn mentions(&self, sym: SymId) -> bool {
        self.lhs.symbols().contains(&sym) || self.rhs.symbols().contains(&sym)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Replace an occurrence of `lhs` by `rhs`.
    Forward,
    /// Replace an occurrence of `rhs` by `lhs`.
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Forward => write!(f, "fwd"),
            Direction::Reverse => write!(f, "rev"),
        }
    }
}

/// One rewrite: apply a relation at a position in a given direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub relation_id: String,
    pub position: usize,
    pub direction: Direction,
}

impl RewriteStep {
    pub fn new(relation_id: impl Into<String>, position: usize, direction: Direction) -> Self {
        RewriteStep {
            relation_id: relation_id.into(),
            position,
            direction,
        }
    }

    /// The step that undoes this one on the rewritten word.
    pub fn mirrored(&self) -> RewriteStep {
        RewriteStep {
            relation_id: self.relation_id.clone(),
            position: self.position,
            direction: self.direction.flip(),
        }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {} {}",
            self.relation_id, self.position, self.direction
        )
    }
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("unknown relation id `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` does not match at position {1}")]
    NoMatch(String, usize),
}

/// Alphabet, relations, and an optional semantic interpretation.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relations: Vec<Relation>,
    pub interp: Option<Interpretation>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relations: Vec<Relation>) -> Self {
        Presentation {
            alphabet,
            relations,
            interp: None,
        }
    }

    pub fn with_interp(mut self, interp: Interpretation) -> Self {
        self.interp = Some(interp);
        self
    }

    pub fn relation(&self, id: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.id == id)
    }

    pub fn word_from_tokens(&mut self, toks: &str) -> Word {
        let mut w = Vec::new();
        for t in toks.split_whitespace() {
            if t == "." {
                continue;
            }
            w.push(self.alphabet.intern(t));
        }
        Word::new(w)
    }
}

fn matched_sides(rel: &Relation, dir: Direction) -> (&Word, &Word) {
    match dir {
        Direction::Forward => (&rel.lhs, &rel.rhs),
        Direction::Reverse => (&rel.rhs, &rel.lhs),
    }
}

fn occurs_at(w: &Word, pat: &Word, pos: usize) -> bool {
    pos + pat.len() <= w.len() && &w.symbols()[pos..pos + pat.len()] == pat.symbols()
}

/// Apply one rewrite step; errors if the matched side does not occur.
pub fn apply_step(
    w: &Word,
    step: &RewriteStep,
    relations: &[Relation],
) -> Result<Word, RewriteError> {
    let rel = relations
        .iter()
        .find(|r| r.id == step.relation_id)
        .ok_or_else(|| RewriteError::UnknownRelation(step.relation_id.clone()))?;
    let (from, to) = matched_sides(rel, step.direction);
    if !occurs_at(w, from, step.position) {
        return Err(RewriteError::NoMatch(
            step.relation_id.clone(),
            step.position,
        ));
    }
    let mut out = Vec::with_capacity(w.len() - from.len() + to.len());
    out.extend_from_slice(&w.symbols()[..step.position]);
    out.extend_from_slice(to.symbols());
    out.extend_from_slice(&w.symbols()[step.position + from.len()..]);
    Ok(Word::new(out))
}

/// Replay a step sequence from `start`.
pub fn replay(
    start: &Word,
    steps: &[RewriteStep],
    relations: &[Relation],
) -> Result<Word, RewriteError> {
    let mut w = start.clone();
    for s in steps {
        w = apply_step(&w, s, relations)?;
    }
    Ok(w)
}

/// All applicable steps on `w`, ordered by (position, relation id,
/// direction).
pub fn find_matches(w: &Word, relations: &[Relation]) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    for pos in 0..=w.len() {
        for rel in relations {
            for dir in [Direction::Forward, Direction::Reverse] {
                let (from, _) = matched_sides(rel, dir);
                if occurs_at(w, from, pos) && (pos < w.len() || from.is_empty()) {
                    out.push(RewriteStep::new(rel.id.clone(), pos, dir));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.position, &a.relation_id, a.direction).cmp(&(b.position, &b.relation_id, b.direction))
    });
    out
}

/// True iff both sides of `rel` have the same image.
pub fn relation_sound(
    rel: &Relation,
    alphabet: &Alphabet,
    interp: &Interpretation,
) -> Result<bool, InterpError> {
    Ok(interp.word_matrix(alphabet, &rel.lhs)? == interp.word_matrix(alphabet, &rel.rhs)?)
}

/// Bounds for [`derive_search`].
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Maximum number of steps in the returned derivation.
    pub max_steps: usize,
    /// Maximum number of distinct words visited per direction.
    pub max_width: usize,
    /// Intermediate words may exceed `max(|u|, |v|)` by this many symbols.
    pub length_slack: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_steps: 12,
            max_width: 200_000,
            length_slack: 6,
        }
    }
}

/// Bidirectional breadth-first search for a step sequence from `u` to `v`.
///
/// A returned sequence replays from `u` to exactly `v`. `None` says only
/// that no derivation was found within the bounds, not that the words are
/// distinct in the presented monoid.
pub fn derive_search(
    u: &Word,
    v: &Word,
    relations: &[Relation],
    limits: SearchLimits,
) -> Option<Vec<RewriteStep>> {
    if u == v {
        return Some(vec![]);
    }
    let max_len = u.len().max(v.len()) + limits.length_slack;

    // parent maps: word -> (predecessor word, step applied to predecessor)
    let mut fwd: HashMap<Word, Option<(Word, RewriteStep)>> = HashMap::new();
    let mut bwd: HashMap<Word, Option<(Word, RewriteStep)>> = HashMap::new();
    fwd.insert(u.clone(), None);
    bwd.insert(v.clone(), None);
    let mut fq: VecDeque<(Word, usize)> = VecDeque::from([(u.clone(), 0)]);
    let mut bq: VecDeque<(Word, usize)> = VecDeque::from([(v.clone(), 0)]);
    let mut fdepth = 0usize;
    let mut bdepth = 0usize;

    let reconstruct = |meet: &Word,
                       fwd: &HashMap<Word, Option<(Word, RewriteStep)>>,
                       bwd: &HashMap<Word, Option<(Word, RewriteStep)>>| {
        let mut steps = Vec::new();
        let mut cur = meet.clone();
        while let Some(Some((prev, step))) = fwd.get(&cur) {
            steps.push(step.clone());
            cur = prev.clone();
        }
        steps.reverse();
        let mut cur = meet.clone();
        while let Some(Some((prev, step))) = bwd.get(&cur) {
            // step maps prev -> cur in the backward tree; emit the inverse,
            // which acts on cur at the same position.
            steps.push(step.mirrored());
            cur = prev.clone();
        }
        steps
    };

    loop {
        let total = fdepth + bdepth;
        if total >= limits.max_steps {
            return None;
        }
        // Expand the smaller frontier one full level.
        let expand_fwd = !fq.is_empty() && (bq.is_empty() || fq.len() <= bq.len());
        let (queue, this, other, depth) = if expand_fwd {
            (&mut fq, &mut fwd, &bwd, &mut fdepth)
        } else if !bq.is_empty() {
            (&mut bq, &mut bwd, &fwd, &mut bdepth)
        } else {
            return None;
        };
        let level = *depth;
        let mut next: VecDeque<(Word, usize)> = VecDeque::new();
        let mut meet: Option<Word> = None;
        'level: while let Some((w, d)) = queue.pop_front() {
            if d > level {
                next.push_back((w, d));
                continue;
            }
            for step in find_matches(&w, relations) {
                let succ = apply_step(&w, &step, relations).expect("matched step applies");
                if succ.len() > max_len || this.contains_key(&succ) {
                    continue;
                }
                if this.len() >= limits.max_width {
                    // Stop growing this side, but a successor can still
                    // close the search by touching the other frontier.
                    if other.contains_key(&succ) {
                        this.insert(succ.clone(), Some((w.clone(), step)));
                        meet = Some(succ);
                        break 'level;
                    }
                    continue;
                }
                this.insert(succ.clone(), Some((w.clone(), step)));
                if other.contains_key(&succ) {
                    meet = Some(succ);
                    break 'level;
                }
                next.push_back((succ, d + 1));
            }
        }
        if let Some(m) = meet {
            let steps = reconstruct(&m, &fwd, &bwd);
            if steps.len() <= limits.max_steps {
                return Some(steps);
            }
            return None;
        }
        queue.extend(next);
        *depth += 1;
        if fq.is_empty() && bq.is_empty() {
            return None;
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
}

/// Parse the line-oriented presentation format:
///
/// ```text
/// # comment
/// [generators]
/// X0 CX01 ...
/// [relations]
/// id: tok tok ... = tok tok ...
/// ```
///
/// `.` denotes the empty word.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut alphabet = Alphabet::new();
    let mut relations = Vec::new();
    let mut section = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim().to_string();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| ParseError::Line(lineno + 1, msg.to_string());
        match line.as_str() {
            "[generators]" => {
                section = Some("generators");
                continue;
            }
            "[relations]" => {
                section = Some("relations");
                continue;
            }
            _ => {}
        }
        match section {
            Some("generators") => {
                for tok in line.split_whitespace() {
                    alphabet.intern(tok);
                }
            }
            Some("relations") => {
                let (id, rest) = line
                    .split_once(':')
                    .ok_or_else(|| err("expected `id: lhs = rhs`"))?;
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `lhs = rhs`"))?;
                let parse_side = |side: &str| -> Result<Word, ParseError> {
                    let mut w = Vec::new();
                    for tok in side.split_whitespace() {
                        if tok == "." {
                            continue;
                        }
                        let id = alphabet
                            .lookup(tok)
                            .ok_or_else(|| err(&format!("undeclared symbol `{tok}`")))?;
                        w.push(id);
                    }
                    Ok(Word::new(w))
                };
                relations.push(Relation::new(id.trim(), parse_side(lhs)?, parse_side(rhs)?));
            }
            _ => return Err(err("content before a section header")),
        }
    }
    let mut seen = std::collections::HashSet::new();
    for r in &relations {
        if !seen.insert(r.id.clone()) {
            return Err(ParseError::Line(
                0,
                format!("duplicate relation id `{}`", r.id),
            ));
        }
    }
    Ok(Presentation::new(alphabet, relations))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Serialize in the format accepted by [`parse_presentation`].
pub fn format_presentation(p: &Presentation) -> String {
    let mut out = String::from("[generators]\n");
    let names: Vec<&str> = p.alphabet.names().collect();
    out.push_str(&names.join(" "));
    out.push_str("\n[relations]\n");
    for r in &p.relations {
        out.push_str(&format!(
            "{}: {} = {}\n",
            r.id,
            r.lhs.display(&p.alphabet),
            r.rhs.display(&p.alphabet)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy_presentation() -> Presentation {
        parse_presentation("[generators]\nx y\n[relations]\nr: x x = .\nrp: y y = .\n").unwrap()
    }

    #[test]
    fn apply_step_examples() {
        let p = xy_presentation();
        let x = p.alphabet.lookup("x").unwrap();
        let w = Word::new(vec![x, x]);
        let step = RewriteStep::new("r", 0, Direction::Forward);
        assert_eq!(apply_step(&w, &step, &p.relations).unwrap(), Word::empty());
        let back = RewriteStep::new("r", 0, Direction::Reverse);
        assert_eq!(apply_step(&Word::empty(), &back, &p.relations).unwrap(), w);
        assert!(apply_step(&Word::empty(), &step, &p.relations).is_err());
    }

    #[test]
    fn find_matches_ordering() {
        let p = xy_presentation();
        let x = p.alphabet.lookup("x").unwrap();
        let w = Word::new(vec![x, x, x]);
        let got = find_matches(&w, &p.relations);
        // Forward x·x at 0 and 1; Reverse (insert x·x or y·y) at 0..=3.
        let fwd: Vec<usize> = got
            .iter()
            .filter(|s| s.direction == Direction::Forward)
            .map(|s| s.position)
            .collect();
        assert_eq!(fwd, vec![0, 1]);
        let rev: Vec<(usize, &str)> = got
            .iter()
            .filter(|s| s.direction == Direction::Reverse)
            .map(|s| (s.position, s.relation_id.as_str()))
            .collect();
        assert_eq!(
            rev,
            vec![
                (0, "r"),
                (0, "rp"),
                (1, "r"),
                (1, "rp"),
                (2, "r"),
                (2, "rp"),
                (3, "r"),
                (3, "rp"),
            ]
        );
        let mut sorted = got.clone();
        sorted.sort_by(|a, b| {
            (a.position, &a.relation_id, a.direction).cmp(&(
                b.position,
                &b.relation_id,
                b.direction,
            ))
        });
        assert_eq!(got, sorted);
    }

    #[test]
    fn search_finds_conjugate_cancellation() {
        let p = xy_presentation();
        let x = p.alphabet.lookup("x").unwrap();
        let y = p.alphabet.lookup("y").unwrap();
        let u = Word::new(vec![x, y, y, x]);
        let steps = derive_search(&u, &Word::empty(), &p.relations, SearchLimits::default())
            .expect("derivable");
        assert_eq!(replay(&u, &steps, &p.relations).unwrap(), Word::empty());
        // reflexivity
        assert_eq!(
            derive_search(&u, &u, &p.relations, SearchLimits::default()),
            Some(vec![])
        );
    }

    #[test]
    fn search_respects_bounds() {
        let p = xy_presentation();
        let x = p.alphabet.lookup("x").unwrap();
        let u = Word::new(vec![x; 9]);
        let v = Word::new(vec![x]);
        let tight = SearchLimits {
            max_steps: 3,
            ..Default::default()
        };
        assert!(derive_search(&u, &v, &p.relations, tight).is_none());
        let enough = SearchLimits {
            max_steps: 4,
            ..Default::default()
        };
        let steps = derive_search(&u, &v, &p.relations, enough).unwrap();
        assert_eq!(steps.len(), 4);
        assert_eq!(replay(&u, &steps, &p.relations).unwrap(), v);
    }

    #[test]
    fn soundness_check_distinguishes_gates() {
        let mut alph = Alphabet::new();
        let x0 = alph.intern("X0");
        let x1 = alph.intern("X1");
        let interp = crate::gates::Interpretation::standard(&alph, 8).unwrap();
        let bad = Relation::new("x0x1", Word::new(vec![x0]), Word::new(vec![x1]));
        assert!(!relation_sound(&bad, &alph, &interp).unwrap());
        let good = Relation::new("ord", Word::new(vec![x0, x0]), Word::empty());
        assert!(relation_sound(&good, &alph, &interp).unwrap());
    }

    #[test]
    fn presentation_file_roundtrip() {
        let p = xy_presentation();
        let text = format_presentation(&p);
        let q = parse_presentation(&text).unwrap();
        assert_eq!(q.relations, p.relations);
        assert_eq!(
            q.alphabet.names().collect::<Vec<_>>(),
            p.alphabet.names().collect::<Vec<_>>()
        );
    }

    proptest! {
        #[test]
        fn step_then_mirror_restores(wlen in 0usize..8, seed in 0usize..1000) {
            let p = xy_presentation();
            let x = p.alphabet.lookup("x").unwrap();
            let y = p.alphabet.lookup("y").unwrap();
            let w = Word::new((0..wlen).map(|i| if (seed >> i) & 1 == 0 { x } else { y }).collect());
            let matches = find_matches(&w, &p.relations);
            prop_assume!(!matches.is_empty());
            let step = &matches[seed % matches.len()];
            let next = apply_step(&w, step, &p.relations).unwrap();
            let back = apply_step(&next, &step.mirrored(), &p.relations).unwrap();
            prop_assert_eq!(back, w);
        }

        #[test]
        fn formal_reverse_reverses(v in proptest::collection::vec(0u32..4, 0..12)) {
            let w = Word::new(v.clone());
            let r = w.formal_reverse();
            let mut expect = v;
            expect.reverse();
            prop_assert_eq!(r.symbols(), &expect[..]);
            prop_assert_eq!(w.formal_reverse().formal_reverse(), w);
        }
    }
}
