//! Derivational proofs: parsing, validation, lemma inlining, flattening,
//! extraction of relation-adding moves, and the permutation reindexing
//! engine for multi-level operators.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::exact::Matrix;
use crate::gates::GateSymbol;
use crate::tietze::{Justification, TietzeMove};
use crate::words::{apply_step, Direction, Presentation, Relation, RewriteStep, Word};

/// What a proof step cites: a base relation or another derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Citation {
    Base(String),
    Lemma(String),
}

/// One justified rewrite inside a derivation. A missing position is
/// resolved to the leftmost match when the step is replayed.
#[derive(Clone, Debug)]
pub struct ProofStep {
    pub cite: Citation,
    pub position: Option<usize>,
    pub direction: Direction,
}

/// A labeled derivation: the claim `lhs ≈ rhs` and the steps that replay
/// from `lhs` to `rhs`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub name: String,
    pub index: u64,
    pub lhs: Word,
    pub rhs: Word,
    pub steps: Vec<ProofStep>,
}

impl Derivation {
    pub fn claim(&self) -> Relation {
        Relation::new(self.name.clone(), self.lhs.clone(), self.rhs.clone())
    }
}

/// A labeled set of derivations over a base presentation.
#[derive(Clone, Debug)]
pub struct Proof {
    pub base: Presentation,
    pub derivations: Vec<Derivation>,
    /// Named permutations declared in the proof file.
    pub perms: Vec<(String, Permutation)>,
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("no derivation named `{0}`")]
    NoSuchDerivation(String),
    #[error("derivation `{0}` does not cite `{1}`")]
    NotCited(String, String),
    #[error("lemma `{0}` still cites other lemmas")]
    LemmaNotFlat(String),
    #[error("cannot inline a derivation into itself")]
    SelfInline,
    #[error("proof rejected: {0}")]
    Rejected(String),
    #[error("target relation `{0}` is neither a base relation nor a proved claim")]
    NotEntailed(String),
    #[error(transparent)]
    Words(#[from] crate::words::ParseError),
}

/// Per-derivation replay outcome.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub name: String,
    pub valid: bool,
    pub detail: Option<String>,
    /// Position-free steps with more than one match (resolved leftmost).
    pub ambiguous_steps: Vec<usize>,
}

/// The four independently checkable conditions plus diagnostics.
#[derive(Clone, Debug)]
pub struct ProofReport {
    pub indexed: bool,
    pub wellfounded: bool,
    pub valid: bool,
    pub acyclic: bool,
    pub cycle_witness: Option<(String, String)>,
    pub derivations: Vec<DerivationReport>,
}

impl ProofReport {
    pub fn accepted(&self) -> bool {
        self.indexed && self.wellfounded && self.valid && self.acyclic
    }
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "ok" } else { "FAILED" };
        writeln!(f, "indexed:      {}", yn(self.indexed))?;
        writeln!(f, "well-founded: {}", yn(self.wellfounded))?;
        writeln!(f, "valid:        {}", yn(self.valid))?;
        write!(f, "acyclic:      {}", yn(self.acyclic))?;
        if let Some((a, b)) = &self.cycle_witness {
            write!(f, " (cycle between `{a}` and `{b}`)")?;
        }
        for d in &self.derivations {
            write!(f, "\n  {}: {}", d.name, yn(d.valid))?;
            if let Some(detail) = &d.detail {
                write!(f, " ({detail})")?;
            }
            if !d.ambiguous_steps.is_empty() {
                write!(f, " [ambiguous position at steps {:?}]", d.ambiguous_steps)?;
            }
        }
        Ok(())
    }
}

/// The relation a citation stands for.
fn cited_relation<'a>(
    proof: &'a Proof,
    claims: &'a HashMap<String, Relation>,
    cite: &Citation,
) -> Option<Relation> {
    match cite {
        Citation::Base(id) => proof.base.relation(id).cloned(),
        Citation::Lemma(name) => claims.get(name).cloned(),
    }
}

/// Resolve a possibly position-free step against the current word.
/// Returns the concrete step and whether several matches existed.
fn resolve_step(
    word: &Word,
    rel: &Relation,
    step: &ProofStep,
) -> Result<(RewriteStep, bool), String> {
    let from = match step.direction {
        Direction::Forward => &rel.lhs,
        Direction::Reverse => &rel.rhs,
    };
    match step.position {
        Some(p) => Ok((RewriteStep::new(rel.id.clone(), p, step.direction), false)),
        None => {
            let occurrences: Vec<usize> = if from.is_empty() {
                vec![0]
            } else if from.len() > word.len() {
                vec![]
            } else {
                (0..=word.len() - from.len())
                    .filter(|&p| &word.symbols()[p..p + from.len()] == from.symbols())
                    .collect()
            };
            match occurrences.first() {
                Some(&p) => Ok((
                    RewriteStep::new(rel.id.clone(), p, step.direction),
                    occurrences.len() > 1,
                )),
                None => Err(format!("no occurrence of the cited side of `{}`", rel.id)),
            }
        }
    }
}

/// Replay a derivation's steps from its left side; reports the final word.
fn replay_derivation(
    proof: &Proof,
    claims: &HashMap<String, Relation>,
    d: &Derivation,
) -> DerivationReport {
    let mut word = d.lhs.clone();
    let mut ambiguous = Vec::new();
    for (i, step) in d.steps.iter().enumerate() {
        let Some(rel) = cited_relation(proof, claims, &step.cite) else {
            return DerivationReport {
                name: d.name.clone(),
                valid: false,
                detail: Some(format!("step {}: unknown citation {:?}", i + 1, step.cite)),
                ambiguous_steps: ambiguous,
            };
        };
        let (concrete, many) = match resolve_step(&word, &rel, step) {
            Ok(x) => x,
            Err(e) => {
                return DerivationReport {
                    name: d.name.clone(),
                    valid: false,
                    detail: Some(format!("step {}: {e}", i + 1)),
                    ambiguous_steps: ambiguous,
                }
            }
        };
        if many {
            ambiguous.push(i + 1);
        }
        // apply_step resolves ids against a one-off relation slice so lemma
        // claims can be cited uniformly.
        word = match apply_step(&word, &concrete, std::slice::from_ref(&rel)) {
            Ok(w) => w,
            Err(e) => {
                return DerivationReport {
                    name: d.name.clone(),
                    valid: false,
                    detail: Some(format!("step {}: {e}", i + 1)),
                    ambiguous_steps: ambiguous,
                }
            }
        };
    }
    if word != d.rhs {
        return DerivationReport {
            name: d.name.clone(),
            valid: false,
            detail: Some(format!(
                "replay ends at `{}`, claim says `{}`",
                word.display(&proof.base.alphabet),
                d.rhs.display(&proof.base.alphabet)
            )),
            ambiguous_steps: ambiguous,
        };
    }
    DerivationReport {
        name: d.name.clone(),
        valid: true,
        detail: None,
        ambiguous_steps: ambiguous,
    }
}

/// Vertices are derivation names; edge `(a, b)` iff `a` cites `b`.
pub fn derivation_graph(proof: &Proof) -> (Vec<String>, Vec<(String, String)>) {
    let vertices: Vec<String> = proof.derivations.iter().map(|d| d.name.clone()).collect();
    let mut edges = Vec::new();
    for d in &proof.derivations {
        for s in &d.steps {
            if let Citation::Lemma(l) = &s.cite {
                let e = (d.name.clone(), l.clone());
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
    }
    (vertices, edges)
}

fn find_cycle(proof: &Proof) -> Option<(String, String)> {
    let (vertices, edges) = derivation_graph(proof);
    // DFS cycle detection; returns one edge on a cycle.
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn visit<'a>(
        v: &'a str,
        edges: &'a [(String, String)],
        state: &mut HashMap<&'a str, u8>,
    ) -> Option<(String, String)> {
        state.insert(v, 1);
        for (a, b) in edges {
            if a == v {
                match state.get(b.as_str()).copied().unwrap_or(0) {
                    1 => return Some((a.clone(), b.clone())),
                    0 => {
                        if let Some(c) = visit(b, edges, state) {
                            return Some(c);
                        }
                    }
                    _ => {}
                }
            }
        }
        state.insert(v, 2);
        None
    }
    for v in &vertices {
        if state.get(v.as_str()).copied().unwrap_or(0) == 0 {
            if let Some(c) = visit(v, &edges, &mut state) {
                return Some(c);
            }
        }
    }
    None
}

/// Evaluate the indexing, well-foundedness, validity, and acyclicity
/// conditions independently. A proof is accepted iff all four hold.
pub fn check_proof(proof: &Proof) -> ProofReport {
    let mut labels = Vec::new();
    let mut indexed = true;
    for d in &proof.derivations {
        let label = (d.index, d.lhs.clone(), d.rhs.clone());
        if labels.contains(&label) {
            indexed = false;
        }
        labels.push(label);
    }
    let names: Vec<&str> = proof.derivations.iter().map(|d| d.name.as_str()).collect();
    if names.iter().collect::<std::collections::HashSet<_>>().len() != names.len() {
        indexed = false;
    }
    let mut wellfounded = true;
    for d in &proof.derivations {
        for s in &d.steps {
            let ok = match &s.cite {
                Citation::Base(id) => proof.base.relation(id).is_some(),
                Citation::Lemma(name) => names.contains(&name.as_str()),
            };
            if !ok {
                wellfounded = false;
            }
        }
    }
    let claims: HashMap<String, Relation> = proof
        .derivations
        .iter()
        .map(|d| (d.name.clone(), d.claim()))
        .collect();
    let derivations: Vec<DerivationReport> = proof
        .derivations
        .iter()
        .map(|d| replay_derivation(proof, &claims, d))
        .collect();
    let valid = derivations.iter().all(|d| d.valid);
    let cycle_witness = find_cycle(proof);
    ProofReport {
        indexed,
        wellfounded,
        valid,
        acyclic: cycle_witness.is_none(),
        cycle_witness,
        derivations,
    }
}

/// Concrete steps of a derivation with all positions resolved, ready for
/// splicing. Requires the derivation to replay.
fn concretize_steps(
    proof: &Proof,
    claims: &HashMap<String, Relation>,
    d: &Derivation,
) -> Result<Vec<(Citation, RewriteStep)>, ProofError> {
    let mut word = d.lhs.clone();
    let mut out = Vec::new();
    for step in &d.steps {
        let rel = cited_relation(proof, claims, &step.cite)
            .ok_or_else(|| ProofError::Rejected(format!("unknown citation in `{}`", d.name)))?;
        let (concrete, _) = resolve_step(&word, &rel, step)
            .map_err(|e| ProofError::Rejected(format!("`{}`: {e}", d.name)))?;
        word = apply_step(&word, &concrete, std::slice::from_ref(&rel))
            .map_err(|e| ProofError::Rejected(format!("`{}`: {e}", d.name)))?;
        out.push((step.cite.clone(), concrete));
    }
    if word != d.rhs {
        return Err(ProofError::Rejected(format!(
            "`{}` does not replay to its claim",
            d.name
        )));
    }
    Ok(out)
}

/// Replace every citation of `lemma` inside `at` by the lemma's step
/// sequence, positions re-based to the enclosing word. The lemma must cite
/// only base relations; the result is a proof again.
pub fn inline_lemma(proof: &Proof, at: &str, lemma: &str) -> Result<Proof, ProofError> {
    if at == lemma {
        return Err(ProofError::SelfInline);
    }
    let claims: HashMap<String, Relation> = proof
        .derivations
        .iter()
        .map(|d| (d.name.clone(), d.claim()))
        .collect();
    let target = proof
        .derivations
        .iter()
        .find(|d| d.name == at)
        .ok_or_else(|| ProofError::NoSuchDerivation(at.to_string()))?;
    let lem = proof
        .derivations
        .iter()
        .find(|d| d.name == lemma)
        .ok_or_else(|| ProofError::NoSuchDerivation(lemma.to_string()))?;
    if lem
        .steps
        .iter()
        .any(|s| matches!(s.cite, Citation::Lemma(_)))
    {
        return Err(ProofError::LemmaNotFlat(lemma.to_string()));
    }
    if !target
        .steps
        .iter()
        .any(|s| matches!(&s.cite, Citation::Lemma(l) if l == lemma))
    {
        return Err(ProofError::NotCited(at.to_string(), lemma.to_string()));
    }
    let lemma_concrete = concretize_steps(proof, &claims, lem)?;
    let target_concrete = concretize_steps(proof, &claims, target)?;
    let mut new_steps: Vec<ProofStep> = Vec::new();
    for (cite, concrete) in target_concrete {
        match &cite {
            Citation::Lemma(l) if l == lemma => {
                // Splice the lemma's steps, shifted to the match position.
                // A reverse use replays them mirrored in reverse order.
                let offset = concrete.position;
                match concrete.direction {
                    Direction::Forward => {
                        for (_, s) in &lemma_concrete {
                            new_steps.push(ProofStep {
                                cite: Citation::Base(s.relation_id.clone()),
                                position: Some(s.position + offset),
                                direction: s.direction,
                            });
                        }
                    }
                    Direction::Reverse => {
                        for (_, s) in lemma_concrete.iter().rev() {
                            new_steps.push(ProofStep {
                                cite: Citation::Base(s.relation_id.clone()),
                                position: Some(s.position + offset),
                                direction: s.direction.flip(),
                            });
                        }
                    }
                }
            }
            _ => new_steps.push(ProofStep {
                cite,
                position: Some(concrete.position),
                direction: concrete.direction,
            }),
        }
    }
    let mut next = proof.clone();
    for d in &mut next.derivations {
        if d.name == at {
            d.steps = new_steps;
            break;
        }
    }
    Ok(next)
}

/// Inline lemmas until every derivation cites only base relations. Claims
/// and cardinality are unchanged. Requires an accepted proof.
pub fn flatten(proof: &Proof) -> Result<Proof, ProofError> {
    let report = check_proof(proof);
    if !report.accepted() {
        return Err(ProofError::Rejected(report.to_string()));
    }
    let mut current = proof.clone();
    // Process in dependency order: repeatedly inline any citation of an
    // already-flat lemma. Acyclicity guarantees progress.
    loop {
        let flat: Vec<String> = current
            .derivations
            .iter()
            .filter(|d| d.steps.iter().all(|s| matches!(s.cite, Citation::Base(_))))
            .map(|d| d.name.clone())
            .collect();
        let mut work = None;
        'outer: for d in &current.derivations {
            for s in &d.steps {
                if let Citation::Lemma(l) = &s.cite {
                    if flat.contains(l) {
                        work = Some((d.name.clone(), l.clone()));
                        break 'outer;
                    }
                }
            }
        }
        match work {
            Some((at, lemma)) => current = inline_lemma(&current, &at, &lemma)?,
            None => break,
        }
    }
    if current
        .derivations
        .iter()
        .any(|d| d.steps.iter().any(|s| matches!(s.cite, Citation::Lemma(_))))
    {
        return Err(ProofError::Rejected("flattening did not terminate".into()));
    }
    Ok(current)
}

/// An ordered relation-adding move per target relation missing from the
/// base, justified by the flattened derivation of its claim.
pub fn to_relplus_moves(proof: &Proof, target: &[Relation]) -> Result<Vec<TietzeMove>, ProofError> {
    let flat = flatten(proof)?;
    let claims: HashMap<String, Relation> = flat
        .derivations
        .iter()
        .map(|d| (d.name.clone(), d.claim()))
        .collect();
    let mut moves = Vec::new();
    for rel in target {
        let in_base = flat
            .base
            .relations
            .iter()
            .any(|r| r.lhs == rel.lhs && r.rhs == rel.rhs);
        if in_base {
            continue;
        }
        let proved = flat
            .derivations
            .iter()
            .find(|d| d.lhs == rel.lhs && d.rhs == rel.rhs)
            .ok_or_else(|| ProofError::NotEntailed(rel.id.clone()))?;
        let steps = concretize_steps(&flat, &claims, proved)?
            .into_iter()
            .map(|(_, s)| s)
            .collect();
        moves.push(TietzeMove::RelPlus {
            relation: rel.clone(),
            justification: Justification::Steps(steps),
        });
    }
    Ok(moves)
}

/// The flattened, fully concretized step sequence proving a named
/// lemma's claim from base relations alone.
pub fn lemma_steps(proof: &Proof, name: &str) -> Result<Vec<RewriteStep>, ProofError> {
    let flat = flatten(proof)?;
    let claims: HashMap<String, Relation> = flat
        .derivations
        .iter()
        .map(|d| (d.name.clone(), d.claim()))
        .collect();
    let d = flat
        .derivations
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| ProofError::NoSuchDerivation(name.to_string()))?;
    Ok(concretize_steps(&flat, &claims, d)?
        .into_iter()
        .map(|(_, s)| s)
        .collect())
}

/// Parse a proof file. The header `[proof over <file>]` names the base
/// presentation, loaded relative to `dir` (or the header may be a bare
/// `[proof]` when `base` is supplied by the caller).
pub fn parse_proof(
    text: &str,
    dir: Option<&std::path::Path>,
    base: Option<Presentation>,
) -> Result<Proof, ProofError> {
    let mut base = base;
    let mut derivations: Vec<Derivation> = Vec::new();
    let mut perms: Vec<(String, Permutation)> = Vec::new();
    let mut current: Option<Derivation> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let err = |msg: String| ProofError::Parse(lineno + 1, msg);
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(' ') || line.starts_with('\t');
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("[proof") {
            let rest = rest.trim_end_matches(']').trim();
            if let Some(path) = rest.strip_prefix("over") {
                let path = path.trim();
                let full = match dir {
                    Some(d) => d.join(path),
                    None => std::path::PathBuf::from(path),
                };
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    err(format!(
                        "cannot read presentation `{}`: {e}",
                        full.display()
                    ))
                })?;
                base = Some(crate::words::parse_presentation(&text)?);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("perm ") {
            // `perm <i0> <i1> ...` or `perm <name>: <i0> <i1> ...`
            let (name, imgs) = match rest.split_once(':') {
                Some((n, imgs)) => (n.trim().to_string(), imgs),
                None => (format!("perm{}", perms.len()), rest),
            };
            let images: Vec<usize> = imgs
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(format!("bad image `{t}`"))))
                .collect::<Result<_, _>>()?;
            let p = Permutation::new(images).map_err(|e| err(e.to_string()))?;
            perms.push((name, p));
            continue;
        }
        if let Some(rest) = line.strip_prefix("lemma ") {
            if let Some(d) = current.take() {
                derivations.push(d);
            }
            let base_p = base
                .as_mut()
                .ok_or_else(|| err("no base presentation".into()))?;
            // lemma <name> (<index>): lhs = rhs
            let (head, body) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `:` in lemma header".into()))?;
            let (name, index) = match head.find('(') {
                Some(i) => {
                    let idx = head[i + 1..]
                        .trim_end()
                        .trim_end_matches(')')
                        .parse()
                        .map_err(|_| err("bad lemma index".into()))?;
                    (head[..i].trim(), idx)
                }
                None => (head.trim(), 0),
            };
            let (lhs, rhs) = body
                .split_once('=')
                .ok_or_else(|| err("expected `lhs = rhs`".into()))?;
            let lhs = base_p.word_from_tokens(lhs);
            let rhs = base_p.word_from_tokens(rhs);
            current = Some(Derivation {
                name: name.to_string(),
                index,
                lhs,
                rhs,
                steps: Vec::new(),
            });
            continue;
        }
        if indented || line.starts_with("rel ") || line.starts_with("use ") {
            let d = current
                .as_mut()
                .ok_or_else(|| err("step outside a lemma".into()))?;
            let mut toks = line.split_whitespace();
            let kind = toks.next().ok_or_else(|| err("empty step".into()))?;
            let id = toks
                .next()
                .ok_or_else(|| err("step needs a relation id".into()))?;
            let mut position = None;
            let mut direction = Direction::Forward;
            let rest: Vec<&str> = toks.collect();
            let mut i = 0;
            while i < rest.len() {
                match rest[i] {
                    "at" => {
                        let p = rest
                            .get(i + 1)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err("`at` needs a position".into()))?;
                        position = Some(p);
                        i += 2;
                    }
                    "fwd" => {
                        direction = Direction::Forward;
                        i += 1;
                    }
                    "rev" => {
                        direction = Direction::Reverse;
                        i += 1;
                    }
                    other => return Err(err(format!("unexpected token `{other}`"))),
                }
            }
            let cite = match kind {
                "rel" => Citation::Base(id.to_string()),
                "use" => Citation::Lemma(id.to_string()),
                other => return Err(err(format!("unknown step kind `{other}`"))),
            };
            d.steps.push(ProofStep {
                cite,
                position,
                direction,
            });
            continue;
        }
        return Err(err(format!("cannot parse line `{line}`")));
    }
    if let Some(d) = current.take() {
        derivations.push(d);
    }
    let base = base.ok_or_else(|| ProofError::Parse(0, "no base presentation".into()))?;
    Ok(Proof {
        base,
        derivations,
        perms,
    })
}

/// Load a proof file from disk, resolving its presentation header
/// relative to the file's directory.
pub fn load_proof(path: &std::path::Path) -> Result<Proof, ProofError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProofError::Parse(0, format!("cannot read `{}`: {e}", path.display())))?;
    parse_proof(&text, path.parent(), None)
}

// ---------------------------------------------------------------------
// Permutations and reindexing.
// ---------------------------------------------------------------------

/// A bijection on `[n]`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum ReindexError {
    #[error("images {0:?} are not a bijection")]
    NotBijective(Vec<usize>),
    #[error("permutation is not a valid reindexing for `{0}`")]
    InvalidReindexing(String),
    #[error("index {0} out of range for degree {1}")]
    OutOfRange(usize, usize),
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, ReindexError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(ReindexError::NotBijective(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// The matrix sending basis vector `j` to basis vector `σ(j)`.
    pub fn matrix(&self) -> Matrix {
        let n = self.degree();
        let mut m = Matrix::zero(n, n);
        for j in 0..n {
            m.set(self.images[j], j, crate::exact::Scalar::one());
        }
        m
    }

    /// Adjacent transpositions `t_1 .. t_m` with `σ = t_1 ∘ ... ∘ t_m`
    /// (rightmost applied first), so the word `t_1 .. t_m` evaluates to
    /// the matrix of `σ`. Built by insertion-sorting the image array.
    pub fn adjacent_transpositions(&self) -> Vec<(usize, usize)> {
        let mut arr = self.images.clone();
        let mut sorts = Vec::new();
        // Bubble sort, recording each swap of positions (j, j+1).
        loop {
            let mut swapped = false;
            for j in 0..arr.len().saturating_sub(1) {
                if arr[j] > arr[j + 1] {
                    arr.swap(j, j + 1);
                    sorts.push((j, j + 1));
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        // sigma . t_{j1} . ... . t_{jm} = id, hence sigma = t_{jm} ... t_{j1}.
        sorts.reverse();
        sorts
    }
}

/// A multi-level operator symbol with raw (possibly invalid) indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MlOp {
    Neg(usize),
    X(usize, usize),
    K([usize; 4]),
}

impl MlOp {
    pub fn from_gate(g: &GateSymbol) -> Option<MlOp> {
        match g {
            GateSymbol::Neg(a) => Some(MlOp::Neg(*a)),
            GateSymbol::TlX(a, b) => Some(MlOp::X(*a, *b)),
            GateSymbol::TlK(idx) => Some(MlOp::K(*idx)),
            _ => None,
        }
    }

    /// Strictly increasing index list.
    pub fn is_valid(&self) -> bool {
        match self {
            MlOp::Neg(_) => true,
            MlOp::X(a, b) => a < b,
            MlOp::K(idx) => idx.windows(2).all(|w| w[0] < w[1]),
        }
    }

    pub fn token(&self) -> String {
        match self {
            MlOp::Neg(a) => format!("NEG[{a}]"),
            MlOp::X(a, b) => format!("TLX[{a},{b}]"),
            MlOp::K([a, b, c, d]) => format!("TLK[{a},{b},{c},{d}]"),
        }
    }

    pub fn matrix(&self, n: usize) -> Result<Matrix, crate::gates::GateError> {
        let g = match self {
            MlOp::Neg(a) => GateSymbol::Neg(*a),
            MlOp::X(a, b) => GateSymbol::TlX(*a, *b),
            MlOp::K(idx) => GateSymbol::TlK(*idx),
        };
        g.matrix_in_dim(n)
    }
}

/// Indexwise image of one operator; may be invalid.
pub fn reindex_op(sigma: &Permutation, op: &MlOp) -> MlOp {
    match op {
        MlOp::Neg(a) => MlOp::Neg(sigma.apply(*a)),
        MlOp::X(a, b) => MlOp::X(sigma.apply(*a), sigma.apply(*b)),
        MlOp::K(idx) => MlOp::K(idx.map(|i| sigma.apply(i))),
    }
}

/// Formal application of `σ` to a word of multi-level operators.
pub fn reindex_word(sigma: &Permutation, word: &[MlOp]) -> Vec<MlOp> {
    word.iter().map(|op| reindex_op(sigma, op)).collect()
}

/// True iff every image index list is strictly increasing.
pub fn reindex_valid(sigma: &Permutation, word: &[MlOp]) -> bool {
    reindex_word(sigma, word).iter().all(MlOp::is_valid)
}

/// A word `v` of two-level `X` operators whose image is the permutation
/// matrix of `σ` and which conjugates `g` to its reindexing:
/// `⟦σ(g)⟧ = ⟦v · g · v̄⟧`. Requires `σ` valid for `g`.
///
/// Types `X` and `(-1)` use the adjacent-transposition decomposition; type
/// `K` routes through the canonical position `[0,1,2,3]` in three stages,
/// with the residual permutation decomposed on the complement of the
/// support.
pub fn conjugation_witness(
    sigma: &Permutation,
    g: &MlOp,
    n: usize,
) -> Result<Vec<MlOp>, ReindexError> {
    if sigma.degree() != n {
        return Err(ReindexError::OutOfRange(sigma.degree(), n));
    }
    if !reindex_op(sigma, g).is_valid() {
        return Err(ReindexError::InvalidReindexing(g.token()));
    }
    match g {
        MlOp::Neg(_) | MlOp::X(_, _) => Ok(sigma
            .adjacent_transpositions()
            .into_iter()
            .map(|(a, b)| MlOp::X(a, b))
            .collect()),
        MlOp::K(idx) => {
            // Stage 1: pi moves the support onto [0..3], innermost first.
            let mut pi = Permutation::identity(n);
            let mut u: Vec<MlOp> = Vec::new();
            for (k, &a) in idx.iter().enumerate() {
                if k != a {
                    u.push(MlOp::X(k, a));
                    pi = Permutation::transposition(n, k, a).compose(&pi);
                }
            }
            u.reverse(); // word order: X[3,a3] X[2,a2] X[1,a1] X[0,a0]
                         // Stage 2: rho moves [0..3] onto the image support.
            let targets = idx.map(|i| sigma.apply(i));
            let mut rho = Permutation::identity(n);
            let mut v2: Vec<MlOp> = Vec::new();
            for k in (0..4).rev() {
                let t = targets[k];
                if k != t {
                    v2.push(MlOp::X(k, t));
                    rho = Permutation::transposition(n, k, t).compose(&rho);
                }
            }
            v2.reverse(); // word order: X[0,t0] X[1,t1] X[2,t2] X[3,t3]
                          // Stage 3: the residue fixes the support pointwise.
            let alpha = rho.compose(&pi).inverse().compose(sigma);
            debug_assert!(idx.iter().all(|&i| alpha.apply(i) == i));
            let mut v3: Vec<MlOp> = Vec::new();
            let mut visited = vec![false; n];
            for start in 0..n {
                if visited[start] || alpha.apply(start) == start {
                    visited[start] = true;
                    continue;
                }
                // cycle (c1 c2 ... cm) = t(c1,c2) t(c2,c3) ... as a word
                let mut cycle = vec![start];
                let mut cur = alpha.apply(start);
                visited[start] = true;
                while cur != start {
                    visited[cur] = true;
                    cycle.push(cur);
                    cur = alpha.apply(cur);
                }
                for w in cycle.windows(2) {
                    let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                    v3.push(MlOp::X(a, b));
                }
            }
            let mut word = v2;
            word.extend(u);
            word.extend(v3);
            debug_assert!(word.iter().all(MlOp::is_valid));
            Ok(word)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_presentation;

    fn xy() -> Presentation {
        parse_presentation("[generators]\nx y\n[relations]\nr: x x = .\nrp: y y = .\n").unwrap()
    }

    fn subs_proof() -> Proof {
        let text = "\
[proof]
lemma inner (0): x y y x = .
  rel rp at 1 fwd
  rel r at 0 fwd
lemma outer (0): x y x y y x y x = .
  use inner at 2 fwd
  use inner at 0 fwd
";
        parse_proof(text, None, Some(xy())).unwrap()
    }

    #[test]
    fn accepts_lemma_substitution_example() {
        let p = subs_proof();
        let report = check_proof(&p);
        assert!(report.accepted(), "{report}");
        let (_, edges) = derivation_graph(&p);
        assert_eq!(edges, vec![("outer".to_string(), "inner".to_string())]);
    }

    #[test]
    fn rejects_cyclic_proof() {
        let text = "\
[proof]
lemma d (0): x y = y x
  rel rp at 2 rev
  use dp at 0 fwd
  rel rp at 2 fwd
lemma dp (0): x y y y = y x y y
  use d at 0 fwd
";
        let p = parse_proof(text, None, Some(xy())).unwrap();
        let report = check_proof(&p);
        assert!(report.indexed && report.wellfounded && report.valid);
        assert!(!report.acyclic);
        let w = report.cycle_witness.clone().unwrap();
        assert!((w.0 == "d" && w.1 == "dp") || (w.0 == "dp" && w.1 == "d"));
        assert!(!report.accepted());
    }

    #[test]
    fn inline_produces_base_only_steps() {
        let p = subs_proof();
        let q = inline_lemma(&p, "outer", "inner").unwrap();
        let outer = q.derivations.iter().find(|d| d.name == "outer").unwrap();
        assert_eq!(outer.steps.len(), 4);
        assert!(outer
            .steps
            .iter()
            .all(|s| matches!(s.cite, Citation::Base(_))));
        assert!(check_proof(&q).accepted());
        // citation count dropped to zero, graph lost the edge
        let (_, edges) = derivation_graph(&q);
        assert!(edges.is_empty());
        // inlining an uncited lemma errors
        assert!(matches!(
            inline_lemma(&q, "outer", "inner"),
            Err(ProofError::NotCited(..))
        ));
        assert!(matches!(
            inline_lemma(&p, "outer", "outer"),
            Err(ProofError::SelfInline)
        ));
    }

    #[test]
    fn flatten_preserves_claims() {
        let p = subs_proof();
        let q = flatten(&p).unwrap();
        assert_eq!(q.derivations.len(), p.derivations.len());
        for (a, b) in p.derivations.iter().zip(&q.derivations) {
            assert_eq!((&a.lhs, &a.rhs), (&b.lhs, &b.rhs));
        }
        // already-flat proof is unchanged by another flatten
        let r = flatten(&q).unwrap();
        for (a, b) in q.derivations.iter().zip(&r.derivations) {
            assert_eq!(a.steps.len(), b.steps.len());
        }
    }

    #[test]
    fn three_level_lemma_chain_flattens() {
        // Oracle: repeated inlining until the graph is edgeless.
        let text = "\
[proof]
lemma l1 (0): x x = .
  rel r at 0 fwd
lemma l2 (0): x x y y = .
  use l1 at 0 fwd
  rel rp at 0 fwd
lemma l3 (0): x x y y x x = .
  use l2 at 0 fwd
  use l1 at 0 fwd
";
        let p = parse_proof(text, None, Some(xy())).unwrap();
        assert!(check_proof(&p).accepted());
        let q = flatten(&p).unwrap();
        assert!(check_proof(&q).accepted());
        let (_, edges) = derivation_graph(&q);
        assert!(edges.is_empty());
    }

    #[test]
    fn relplus_move_extraction() {
        let p = subs_proof();
        let mut target = p.base.relations.clone();
        target.push(Relation::new(
            "inner.claim",
            p.derivations[0].lhs.clone(),
            p.derivations[0].rhs.clone(),
        ));
        target.push(Relation::new(
            "outer.claim",
            p.derivations[1].lhs.clone(),
            p.derivations[1].rhs.clone(),
        ));
        let moves = to_relplus_moves(&p, &target).unwrap();
        assert_eq!(moves.len(), 2);
        // the moves replay in the kernel
        let mut session = crate::tietze::Session::new(p.base.clone());
        for mv in moves {
            session.apply(mv).unwrap();
        }
        assert_eq!(session.presentation.relations.len(), 4);
        // an unproven target is an entailment failure naming the relation
        let missing = Relation::new("missing", Word::new(vec![0]), Word::empty());
        let err = to_relplus_moves(&p, &[missing]).unwrap_err();
        assert!(matches!(err, ProofError::NotEntailed(id) if id == "missing"));
        // target = base alone yields no moves
        assert!(to_relplus_moves(&p, &p.base.relations).unwrap().is_empty());
    }

    #[test]
    fn position_free_steps_resolve_leftmost() {
        // x x x x -> x x -> . ; both steps leave the position implicit and
        // the first has two matches, which is reported, not rejected
        let text = "[proof]\nlemma quad (0): x x x x = .\n  rel r fwd\n  rel r fwd\n";
        let p = parse_proof(text, None, Some(xy())).unwrap();
        let report = check_proof(&p);
        assert!(report.accepted(), "{report}");
        assert_eq!(report.derivations[0].ambiguous_steps, vec![1]);
        // a position-free step with no occurrence fails validity
        let text = "[proof]\nlemma bad (0): y = x\n  rel r fwd\n";
        let p = parse_proof(text, None, Some(xy())).unwrap();
        assert!(!check_proof(&p).valid);
    }

    #[test]
    fn perm_lines_parse() {
        let text = "[proof]\nperm 7 6 0 1 2 3 4 5\nperm cyc: 1 2 0\n";
        let p = parse_proof(text, None, Some(xy())).unwrap();
        assert_eq!(p.perms.len(), 2);
        assert_eq!(p.perms[0].0, "perm0");
        assert_eq!(p.perms[0].1.apply(0), 7);
        assert_eq!(p.perms[1].0, "cyc");
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(3));
        let word = s.adjacent_transpositions();
        let mut m = Matrix::identity(3);
        for (a, b) in &word {
            m = m.mul(&Permutation::transposition(3, *a, *b).matrix());
        }
        assert_eq!(m, s.matrix());
    }

    #[test]
    fn reindex_worked_example() {
        // cyclic permutation 7 -> 5 -> 3 -> 1 -> 6 -> 4 -> 2 -> 0 -> 7
        let sigma = Permutation::new(vec![7, 6, 0, 1, 2, 3, 4, 5]).unwrap();
        let w = vec![MlOp::K([2, 3, 4, 5]), MlOp::K([3, 5, 6, 7])];
        let img = reindex_word(&sigma, &w);
        assert_eq!(img, vec![MlOp::K([0, 1, 2, 3]), MlOp::K([1, 3, 4, 5])]);
        assert!(reindex_valid(&sigma, &w));
        // tau_{1,2} applied to X[1,2] is X[2,1], which is not well-formed
        let tau = Permutation::transposition(8, 1, 2);
        let x = vec![MlOp::X(1, 2)];
        assert_eq!(reindex_word(&tau, &x), vec![MlOp::X(2, 1)]);
        assert!(!reindex_valid(&tau, &x));
        let id = Permutation::identity(8);
        assert!(reindex_valid(&id, &w));
        assert_eq!(reindex_word(&id, &w), w);
    }

    #[test]
    fn reindex_inverse_roundtrip() {
        // exhaustive over a seeded sample: whenever both applications are
        // valid, they cancel
        let mut found = 0usize;
        for seed in 0..400u64 {
            let mut state = seed;
            let mut next = move |m: u64| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % m) as usize
            };
            let mut images: Vec<usize> = (0..8).collect();
            for i in (1..8).rev() {
                images.swap(i, next(i as u64 + 1));
            }
            let sigma = Permutation::new(images).unwrap();
            let w = vec![
                MlOp::Neg(next(8)),
                MlOp::X(next(4), 4 + next(4)),
                MlOp::K([0, 1 + next(2), 3 + next(2), 5 + next(3)]),
            ];
            if !w.iter().all(MlOp::is_valid) {
                continue;
            }
            let there = reindex_word(&sigma, &w);
            if reindex_valid(&sigma, &w) && reindex_valid(&sigma.inverse(), &there) {
                assert_eq!(reindex_word(&sigma.inverse(), &there), w);
                found += 1;
            }
        }
        assert!(found > 0, "sample must exercise the valid case");
    }

    #[test]
    fn witness_examples() {
        // tau_{0,7} conjugates NEG[0] to NEG[7] via X[0,7]
        let tau = Permutation::transposition(8, 0, 7);
        let v = conjugation_witness(&tau, &MlOp::Neg(0), 8).unwrap();
        let vm = v.iter().fold(Matrix::identity(8), |acc, op| {
            acc.mul(&op.matrix(8).unwrap())
        });
        assert_eq!(vm, tau.matrix());
        let g = MlOp::Neg(0).matrix(8).unwrap();
        let img = MlOp::Neg(7).matrix(8).unwrap();
        let vbar = v.iter().rev().fold(Matrix::identity(8), |acc, op| {
            acc.mul(&op.matrix(8).unwrap())
        });
        assert_eq!(vm.mul(&g).mul(&vbar), img);
        // identity permutation on an X op gives the empty word
        let id = Permutation::identity(8);
        assert!(conjugation_witness(&id, &MlOp::X(2, 5), 8)
            .unwrap()
            .is_empty());
        // invalid reindexing is an error
        let tau12 = Permutation::transposition(8, 1, 2);
        assert!(conjugation_witness(&tau12, &MlOp::X(1, 2), 8).is_err());
    }

    #[test]
    fn witness_k_route() {
        let sigma = Permutation::new(vec![1, 3, 4, 5, 0, 2, 6, 7]).unwrap();
        let g = MlOp::K([0, 1, 2, 3]);
        assert!(reindex_valid(&sigma, std::slice::from_ref(&g)));
        let v = conjugation_witness(&sigma, &g, 8).unwrap();
        let vm = v.iter().fold(Matrix::identity(8), |acc, op| {
            acc.mul(&op.matrix(8).unwrap())
        });
        assert_eq!(vm, sigma.matrix());
        let vbar = v.iter().rev().fold(Matrix::identity(8), |acc, op| {
            acc.mul(&op.matrix(8).unwrap())
        });
        let img = reindex_op(&sigma, &g);
        assert_eq!(
            vm.mul(&g.matrix(8).unwrap()).mul(&vbar),
            img.matrix(8).unwrap()
        );
    }
}
