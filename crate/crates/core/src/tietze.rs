//! The four presentation transformations with validity checking, move
//! journaling, and derived-generator machinery.
//!
//! Presentations are immutable values: every kernel call validates its
//! preconditions against the current presentation and produces a new one,
//! appending the move to a replayable journal.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::words::{replay, Alphabet, Presentation, Relation, RewriteStep, SymId, Word};

/// Why a relation may be added or removed.
#[derive(Clone, Debug)]
pub enum Justification {
    /// A replayable rewrite sequence from the relation's left side to its
    /// right side.
    Steps(Vec<RewriteStep>),
    /// The attached interpretation is injective (caller-asserted) and the
    /// relation is semantically sound. Only valid for adding relations.
    SemanticInjective,
}

#[derive(Clone, Debug)]
pub enum TietzeMove {
    GenPlus {
        symbol: String,
        definition: Word,
    },
    GenMinus {
        symbol: String,
        rel_id: Option<String>,
    },
    RelPlus {
        relation: Relation,
        justification: Justification,
    },
    RelMinus {
        relation_id: String,
        justification: Vec<RewriteStep>,
    },
}

#[derive(Debug, Error)]
pub enum TietzeError {
    #[error("symbol `{0}` is already a generator")]
    SymbolExists(String),
    #[error("symbol `{0}` is not a generator")]
    NoSuchSymbol(String),
    #[error("definition uses undeclared symbol id {0}")]
    UndeclaredSymbol(SymId),
    #[error("generator `{0}` still occurs in relation `{1}`")]
    SymbolInUse(String, String),
    #[error("generator `{0}` has no defining relation")]
    NoDefiningRelation(String),
    #[error("generator `{0}` has several defining relations ({1}); select one by id")]
    AmbiguousDefinition(String, String),
    #[error("defining relation `{0}` mentions the generator being removed")]
    SelfReferentialDefinition(String),
    #[error("relation id `{0}` already present")]
    DuplicateRelation(String),
    #[error("no relation with id `{0}`")]
    NoSuchRelation(String),
    #[error("justification does not replay: {0}")]
    BadJustification(String),
    #[error("semantic justification requires an interpretation with the injective flag")]
    NotInjective,
    #[error("relation `{0}` is not semantically sound")]
    Unsound(String),
    #[error("defining relations contain a cycle: {0:?}")]
    Cycle(Vec<String>),
    #[error(transparent)]
    Interp(#[from] crate::gates::InterpError),
}

/// A presentation plus the journal of accepted moves that produced it.
#[derive(Clone, Debug)]
pub struct Session {
    pub presentation: Presentation,
    pub journal: Vec<TietzeMove>,
}

impl Session {
    pub fn new(presentation: Presentation) -> Self {
        Session {
            presentation,
            journal: Vec::new(),
        }
    }

    pub fn apply(&mut self, mv: TietzeMove) -> Result<(), TietzeError> {
        let next = apply_move(&self.presentation, &mv)?;
        self.presentation = next;
        self.journal.push(mv);
        Ok(())
    }
}

/// Validate and apply one move, producing the next presentation.
pub fn apply_move(p: &Presentation, mv: &TietzeMove) -> Result<Presentation, TietzeError> {
    match mv {
        TietzeMove::GenPlus { symbol, definition } => gen_plus(p, symbol, definition),
        TietzeMove::GenMinus { symbol, rel_id } => gen_minus(p, symbol, rel_id.as_deref()),
        TietzeMove::RelPlus {
            relation,
            justification,
        } => rel_plus(p, relation, justification),
        TietzeMove::RelMinus {
            relation_id,
            justification,
        } => rel_minus(p, relation_id, justification),
    }
}

/// Add a generator with its defining relation `symbol ≈ definition`.
///
/// The attached interpretation, if any, is extended with the unique
/// compatible image.
pub fn gen_plus(
    p: &Presentation,
    symbol: &str,
    definition: &Word,
) -> Result<Presentation, TietzeError> {
    if p.alphabet.contains(symbol) {
        return Err(TietzeError::SymbolExists(symbol.to_string()));
    }
    for &s in definition.symbols() {
        if s as usize >= p.alphabet.len() {
            return Err(TietzeError::UndeclaredSymbol(s));
        }
    }
    let interp = match &p.interp {
        Some(i) => Some(i.extend(&p.alphabet, symbol, definition)?),
        None => None,
    };
    let mut next = p.clone();
    next.interp = interp;
    let x = next.alphabet.intern(symbol);
    let def_id = format!("def.{symbol}");
    if next.relation(&def_id).is_some() {
        return Err(TietzeError::DuplicateRelation(def_id));
    }
    next.relations.push(Relation::new(
        def_id,
        Word::new(vec![x]),
        definition.clone(),
    ));
    Ok(next)
}

/// Remove a generator together with its single defining relation.
///
/// Requires exactly one relation of the shape `symbol ≈ w` (or the caller
/// names one among several by id), `w` free of the symbol, and no other
/// relation mentioning it.
pub fn gen_minus(
    p: &Presentation,
    symbol: &str,
    rel_id: Option<&str>,
) -> Result<Presentation, TietzeError> {
    let x = p
        .alphabet
        .lookup(symbol)
        .ok_or_else(|| TietzeError::NoSuchSymbol(symbol.to_string()))?;
    let defining: Vec<&Relation> = p
        .relations
        .iter()
        .filter(|r| r.lhs.symbols() == [x])
        .collect();
    let chosen = match (defining.len(), rel_id) {
        (0, _) => return Err(TietzeError::NoDefiningRelation(symbol.to_string())),
        (1, None) => defining[0],
        (_, Some(id)) => defining
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| TietzeError::NoSuchRelation(id.to_string()))?,
        (_, None) => {
            let ids: Vec<&str> = defining.iter().map(|r| r.id.as_str()).collect();
            return Err(TietzeError::AmbiguousDefinition(
                symbol.to_string(),
                ids.join(", "),
            ));
        }
    };
    if chosen.rhs.symbols().contains(&x) {
        return Err(TietzeError::SelfReferentialDefinition(chosen.id.clone()));
    }
    for r in &p.relations {
        if r.id != chosen.id && r.mentions(x) {
            return Err(TietzeError::SymbolInUse(symbol.to_string(), r.id.clone()));
        }
    }
    // Rebuild the alphabet without the symbol and remap every word.
    let chosen_id = chosen.id.clone();
    let mut alphabet = Alphabet::new();
    let mut remap: HashMap<SymId, SymId> = HashMap::new();
    for (old, name) in p.alphabet.names().enumerate() {
        if name != symbol {
            remap.insert(old as SymId, alphabet.intern(name));
        }
    }
    let remap_word = |w: &Word| Word::new(w.symbols().iter().map(|s| remap[s]).collect());
    let relations = p
        .relations
        .iter()
        .filter(|r| r.id != chosen_id)
        .map(|r| Relation::new(r.id.clone(), remap_word(&r.lhs), remap_word(&r.rhs)))
        .collect();
    let interp = match &p.interp {
        Some(i) => Some(i.restrict(symbol)?),
        None => None,
    };
    Ok(Presentation {
        alphabet,
        relations,
        interp,
    })
}

/// Add a relation, justified either by a replayable derivation over the
/// current relations or by the semantic shortcut.
pub fn rel_plus(
    p: &Presentation,
    rel: &Relation,
    just: &Justification,
) -> Result<Presentation, TietzeError> {
    if p.relation(&rel.id).is_some() {
        return Err(TietzeError::DuplicateRelation(rel.id.clone()));
    }
    match just {
        Justification::Steps(steps) => {
            let got = replay(&rel.lhs, steps, &p.relations)
                .map_err(|e| TietzeError::BadJustification(e.to_string()))?;
            if got != rel.rhs {
                return Err(TietzeError::BadJustification(format!(
                    "steps for `{}` end at `{}`, not the right side",
                    rel.id,
                    got.display(&p.alphabet)
                )));
            }
        }
        Justification::SemanticInjective => {
            let interp = p.interp.as_ref().ok_or(TietzeError::NotInjective)?;
            if !interp.injective {
                return Err(TietzeError::NotInjective);
            }
            if !crate::words::relation_sound(rel, &p.alphabet, interp)? {
                return Err(TietzeError::Unsound(rel.id.clone()));
            }
        }
    }
    let mut next = p.clone();
    next.relations.push(rel.clone());
    Ok(next)
}

/// Remove a relation, justified by a derivation over the remaining
/// relations.
pub fn rel_minus(
    p: &Presentation,
    rel_id: &str,
    steps: &[RewriteStep],
) -> Result<Presentation, TietzeError> {
    let idx = p
        .relations
        .iter()
        .position(|r| r.id == rel_id)
        .ok_or_else(|| TietzeError::NoSuchRelation(rel_id.to_string()))?;
    let rel = p.relations[idx].clone();
    let mut remaining = p.relations.clone();
    remaining.remove(idx);
    let got = replay(&rel.lhs, steps, &remaining)
        .map_err(|e| TietzeError::BadJustification(e.to_string()))?;
    if got != rel.rhs {
        return Err(TietzeError::BadJustification(format!(
            "steps for removing `{rel_id}` end at `{}`, not the right side",
            got.display(&p.alphabet)
        )));
    }
    let mut next = p.clone();
    next.relations = remaining;
    Ok(next)
}

/// True iff the interpretation maps both sides of every relation to the
/// same matrix — the condition for it to induce a homomorphism. `false`
/// when no interpretation is attached.
pub fn induced_hom_check(p: &Presentation) -> Result<bool, TietzeError> {
    let Some(interp) = &p.interp else {
        return Ok(false);
    };
    for r in &p.relations {
        if !crate::words::relation_sound(r, &p.alphabet, interp)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One defining relation `x ≈ w` per derived symbol.
#[derive(Clone, Debug, Default)]
pub struct DefiningFamily {
    /// Keyed by the derived symbol; deterministic order.
    pub defs: BTreeMap<SymId, Word>,
}

impl DefiningFamily {
    pub fn new() -> Self {
        DefiningFamily::default()
    }

    pub fn insert(&mut self, symbol: SymId, definition: Word) {
        self.defs.insert(symbol, definition);
    }

    /// Collect the family from relations of the shape `x ≈ w` with the
    /// given ids.
    pub fn from_relations(p: &Presentation, ids: &[&str]) -> Option<Self> {
        let mut fam = DefiningFamily::new();
        for id in ids {
            let r = p.relation(id)?;
            let [x] = r.lhs.symbols() else { return None };
            fam.insert(*x, r.rhs.clone());
        }
        Some(fam)
    }
}

/// Directed graph over symbols.
#[derive(Clone, Debug)]
pub struct Digraph {
    pub vertices: Vec<SymId>,
    pub edges: Vec<(SymId, SymId)>,
}

/// Dependency graph: edge `(x, y)` iff `y` is a derived symbol occurring
/// in the definition of `x`.
pub fn dgen_graph(d: &DefiningFamily) -> Digraph {
    let vertices: Vec<SymId> = d.defs.keys().copied().collect();
    let mut edges = Vec::new();
    for (&x, w) in &d.defs {
        let mut seen = Vec::new();
        for &y in w.symbols() {
            if d.defs.contains_key(&y) && !seen.contains(&y) {
                seen.push(y);
                edges.push((x, y));
            }
        }
    }
    Digraph { vertices, edges }
}

/// Topological order of the derived symbols, definitions first: every
/// symbol appears after all derived symbols its definition mentions.
/// Errors with a cycle witness when the graph is cyclic.
pub fn dgen_intro_order(
    d: &DefiningFamily,
    alphabet: &Alphabet,
) -> Result<Vec<SymId>, TietzeError> {
    let graph = dgen_graph(d);
    fn visit(
        v: SymId,
        graph: &Digraph,
        state: &mut HashMap<SymId, u8>, // 0 unseen, 1 active, 2 done
        order: &mut Vec<SymId>,
        stack: &mut Vec<SymId>,
    ) -> Result<(), Vec<SymId>> {
        match state.get(&v).copied().unwrap_or(0) {
            2 => return Ok(()),
            1 => {
                let pos = stack.iter().position(|&s| s == v).unwrap_or(0);
                let mut cycle = stack[pos..].to_vec();
                cycle.push(v);
                return Err(cycle);
            }
            _ => {}
        }
        state.insert(v, 1);
        stack.push(v);
        for &(x, y) in &graph.edges {
            if x == v {
                visit(y, graph, state, order, stack)?;
            }
        }
        stack.pop();
        state.insert(v, 2);
        order.push(v);
        Ok(())
    }
    let mut order = Vec::new();
    let mut state = HashMap::new();
    let mut stack = Vec::new();
    for &v in &graph.vertices {
        visit(v, &graph, &mut state, &mut order, &mut stack).map_err(|cycle| {
            TietzeError::Cycle(
                cycle
                    .iter()
                    .map(|&s| alphabet.name(s).to_string())
                    .collect(),
            )
        })?;
    }
    Ok(order)
}

/// Substitute derived symbols by their definitions, leftmost occurrence
/// first, until none remain. Returns the normal form and the replayable
/// step sequence (each step applies a defining relation forward).
pub fn substitution_normal_form(
    w: &Word,
    d: &DefiningFamily,
    def_ids: &HashMap<SymId, String>,
) -> (Word, Vec<RewriteStep>) {
    let mut cur = w.clone();
    let mut steps = Vec::new();
    loop {
        let Some(pos) = cur.symbols().iter().position(|s| d.defs.contains_key(s)) else {
            return (cur, steps);
        };
        let sym = cur.symbols()[pos];
        let def = &d.defs[&sym];
        steps.push(RewriteStep::new(
            def_ids[&sym].clone(),
            pos,
            crate::words::Direction::Forward,
        ));
        let mut next = cur.symbols()[..pos].to_vec();
        next.extend_from_slice(def.symbols());
        next.extend_from_slice(&cur.symbols()[pos + 1..]);
        cur = Word::new(next);
    }
}

/// Eliminate every derived symbol: each non-defining relation is replaced
/// by its substitution normal form (a justified exchange of relations),
/// then the derived symbols are removed in reverse introduction order.
///
/// Returns the final presentation and the accepted move sequence.
pub fn dgen_eliminate(
    p: &Presentation,
    d: &DefiningFamily,
) -> Result<(Presentation, Vec<TietzeMove>), TietzeError> {
    let order = dgen_intro_order(d, &p.alphabet)?;
    // Map each derived symbol to its defining relation id in `p`.
    let mut def_ids: HashMap<SymId, String> = HashMap::new();
    for (&x, w) in &d.defs {
        let rel = p
            .relations
            .iter()
            .find(|r| r.lhs.symbols() == [x] && &r.rhs == w)
            .ok_or_else(|| TietzeError::NoDefiningRelation(p.alphabet.name(x).to_string()))?;
        def_ids.insert(x, rel.id.clone());
    }
    let mut session = Session::new(p.clone());
    let defining_ids: Vec<String> = def_ids.values().cloned().collect();
    let targets: Vec<Relation> = p
        .relations
        .iter()
        .filter(|r| !defining_ids.contains(&r.id))
        .cloned()
        .collect();
    for rel in targets {
        let (lhs_nf, lhs_steps) = substitution_normal_form(&rel.lhs, d, &def_ids);
        let (rhs_nf, rhs_steps) = substitution_normal_form(&rel.rhs, d, &def_ids);
        if lhs_nf == rel.lhs && rhs_nf == rel.rhs {
            continue;
        }
        let new_rel = Relation::new(format!("{}'", rel.id), lhs_nf, rhs_nf);
        // lhs_nf <- lhs, lhs -> rhs by the old relation, rhs -> rhs_nf
        let mut plus_steps: Vec<RewriteStep> =
            lhs_steps.iter().rev().map(|s| s.mirrored()).collect();
        plus_steps.push(RewriteStep::new(
            rel.id.clone(),
            0,
            crate::words::Direction::Forward,
        ));
        plus_steps.extend(rhs_steps.iter().cloned());
        session.apply(TietzeMove::RelPlus {
            relation: new_rel.clone(),
            justification: Justification::Steps(plus_steps),
        })?;
        // lhs -> lhs_nf, lhs_nf -> rhs_nf by the new relation, rhs_nf -> rhs
        let mut minus_steps = lhs_steps.clone();
        minus_steps.push(RewriteStep::new(
            new_rel.id.clone(),
            0,
            crate::words::Direction::Forward,
        ));
        minus_steps.extend(rhs_steps.iter().rev().map(|s| s.mirrored()));
        session.apply(TietzeMove::RelMinus {
            relation_id: rel.id.clone(),
            justification: minus_steps,
        })?;
    }
    for &sym in order.iter().rev() {
        let name = p.alphabet.name(sym).to_string();
        let rel_id = def_ids[&sym].clone();
        session.apply(TietzeMove::GenMinus {
            symbol: name,
            rel_id: Some(rel_id),
        })?;
    }
    Ok((session.presentation, session.journal))
}
