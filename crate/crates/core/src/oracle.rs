//! Symbolic truth function over traces.
//!
//! Instantaneous predicates (`grasp`, `grow`, `shake`) and spatial relations
//! are computed per step. Tense operators at trace end:
//!
//! * `NOW(φ)  := φ(T)`
//! * `WAS(φ)  := (∃ t < T. φ(t)) ∧ ¬φ(T)`
//!
//! A localizer's tense selects the referents: an object is a referent of
//! `thing was left of cat` iff it was left of some cat earlier and is not
//! now. The predicate tense then applies to the sentence-level proposition
//! "some referent satisfies the predicate at step t". For sentences without a
//! past localizer this is exactly the per-step description pipeline;
//! [`Oracle::describe_operational`] implements that pipeline independently.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::grammar::{Direction, Grammar, HeadWord, Predicate, Reference, Relation, SentenceAst, Tense};
use crate::trace::Trace;
use crate::world::{Color, ObjectType};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Trailing window (in steps) inspected by the shake detector.
    pub shake_window: usize,
    /// Minimum number of sign reversals of the x displacement.
    pub shake_reversals: usize,
    /// Minimum |dx| for a displacement to count.
    pub shake_amplitude: f32,
    /// Strictness margin for spatial comparisons.
    pub relation_margin: f32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { shake_window: 8, shake_reversals: 2, shake_amplitude: 0.05, relation_margin: 0.0 }
    }
}

/// Predicate values for every object at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSlice {
    pub grasp: Vec<bool>,
    pub grow: Vec<bool>,
    pub shake: Vec<bool>,
}

impl PredicateSlice {
    pub fn get(&self, pred: Predicate, obj: usize) -> bool {
        match pred {
            Predicate::Grasp => self.grasp[obj],
            Predicate::Grow => self.grow[obj],
            Predicate::Shake => self.shake[obj],
        }
    }
}

/// Spatial relations between objects at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSlice {
    n: usize,
    /// `[direction][i][j]`: object `i` is `direction` of object `j`.
    one_to_one: Vec<bool>,
    /// `[direction][i]`: object `i` is the `direction`-most object.
    one_to_all: Vec<bool>,
}

impl RelationSlice {
    pub fn one_to_one(&self, d: Direction, i: usize, j: usize) -> bool {
        self.one_to_one[(d as usize * self.n + i) * self.n + j]
    }

    pub fn one_to_all(&self, d: Direction, i: usize) -> bool {
        self.one_to_all[d as usize * self.n + i]
    }
}

#[derive(Debug, Clone, Default)]
pub struct Oracle {
    pub config: OracleConfig,
}

/// Step-indexed bitmasks (bit `t` = step `t`, 0-based) for one trace.
#[derive(Debug, Clone)]
pub struct Timelines {
    len: usize,
    n: usize,
    kinds: Vec<ObjectType>,
    colors: Vec<Option<Color>>,
    grasp: Vec<u64>,
    grow: Vec<u64>,
    shake: Vec<u64>,
    rel: Vec<u64>,
}

fn bit(t: usize) -> u64 {
    1u64 << t
}

impl Timelines {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    fn now(&self) -> u64 {
        bit(self.len - 1)
    }

    fn before_now(&self) -> u64 {
        self.now() - 1
    }

    pub fn tense_holds(&self, mask: u64, tense: Tense) -> bool {
        match tense {
            Tense::Present => mask & self.now() != 0,
            Tense::Past => mask & self.before_now() != 0 && mask & self.now() == 0,
        }
    }

    pub fn predicate(&self, pred: Predicate, obj: usize) -> u64 {
        match pred {
            Predicate::Grasp => self.grasp[obj],
            Predicate::Grow => self.grow[obj],
            Predicate::Shake => self.shake[obj],
        }
    }

    pub fn one_to_one(&self, d: Direction, i: usize, j: usize) -> u64 {
        self.rel[(d as usize * self.n + i) * self.n + j]
    }

    /// Steps at which `obj` satisfies the relation.
    pub fn relation(&self, relation: Relation, obj: usize) -> u64 {
        match relation {
            Relation::OneToOne { direction, anchor } => (0..self.n)
                .filter(|&j| j != obj && anchor.matches(self.kinds[j]))
                .fold(0, |acc, j| acc | self.one_to_one(direction, obj, j)),
            Relation::OneToAll { direction } => (0..self.n)
                .filter(|&j| j != obj)
                .fold(u64::MAX >> (64 - self.len), |acc, j| acc & self.one_to_one(direction, obj, j)),
        }
    }

    /// Whether `obj` is a referent of the sentence's object reference.
    pub fn is_referent(&self, reference: &Reference, obj: usize) -> bool {
        match *reference {
            Reference::Attr { color, head } => {
                head.matches(self.kinds[obj]) && color.is_none_or(|c| self.colors[obj] == Some(c))
            }
            Reference::Spatial { tense, relation } => self.tense_holds(self.relation(relation, obj), tense),
        }
    }

    /// Steps at which some referent satisfies the predicate.
    pub fn proposition(&self, ast: &SentenceAst) -> u64 {
        (0..self.n)
            .filter(|&o| self.is_referent(&ast.reference, o))
            .fold(0, |acc, o| acc | self.predicate(ast.predicate, o))
    }

    pub fn eval(&self, ast: &SentenceAst) -> bool {
        self.tense_holds(self.proposition(ast), ast.pred_tense)
    }

    pub fn explain(&self, ast: &SentenceAst) -> Explanation {
        let verdict = self.eval(ast);
        let steps = |mask: u64| (0..self.len).filter(|&t| mask & bit(t) != 0).map(|t| t + 1).collect::<Vec<_>>();
        let referents: Vec<ReferentReport> = (0..self.n)
            .filter(|&o| self.is_referent(&ast.reference, o))
            .map(|o| ReferentReport {
                object: o,
                kind: self.kinds[o],
                predicate_steps: steps(self.predicate(ast.predicate, o)),
                relation_steps: match ast.reference {
                    Reference::Spatial { relation, .. } => Some(steps(self.relation(relation, o))),
                    Reference::Attr { .. } => None,
                },
            })
            .collect();
        let witness = if verdict {
            let wanted = match ast.pred_tense {
                Tense::Present => self.now(),
                Tense::Past => self.before_now(),
            };
            // latest qualifying step wins, ties to the lowest index
            referents
                .iter()
                .filter(|r| self.predicate(ast.predicate, r.object) & wanted != 0)
                .max_by_key(|r| (64 - (self.predicate(ast.predicate, r.object) & wanted).leading_zeros(), usize::MAX - r.object))
                .map(|r| r.object)
        } else {
            None
        };
        Explanation { sentence: ast.to_string(), verdict, witness, referents }
    }
}

/// Why a sentence is true or false: the referents and the 1-based steps at
/// which each satisfies the predicate and the localizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub sentence: String,
    pub verdict: bool,
    pub witness: Option<usize>,
    pub referents: Vec<ReferentReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferentReport {
    pub object: usize,
    pub kind: ObjectType,
    pub predicate_steps: Vec<usize>,
    pub relation_steps: Option<Vec<usize>>,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        Oracle { config }
    }

    pub fn grasp_at(&self, trace: &Trace, t: usize, obj: usize) -> bool {
        trace.grasped(t, obj)
    }

    /// Size strictly increased since the previous step; false at the first step.
    pub fn grow_at(&self, trace: &Trace, t: usize, obj: usize) -> bool {
        t > 0 && trace.size(t, obj) > trace.size(t - 1, obj)
    }

    /// The object is held now and, inside the trailing window, its x
    /// displacement (over held-to-held steps, |dx| >= amplitude) reversed
    /// sign at least `shake_reversals` times.
    pub fn shake_at(&self, trace: &Trace, t: usize, obj: usize) -> bool {
        if !trace.grasped(t, obj) {
            return false;
        }
        let cfg = &self.config;
        let start = (t + 1).saturating_sub(cfg.shake_window);
        let mut last_sign = 0i8;
        let mut reversals = 0;
        for s in (start + 1)..=t {
            if !(trace.grasped(s - 1, obj) && trace.grasped(s, obj)) {
                continue;
            }
            let dx = trace.pos(s, obj).x - trace.pos(s - 1, obj).x;
            if dx.abs() < cfg.shake_amplitude {
                continue;
            }
            let sign = if dx > 0.0 { 1 } else { -1 };
            if last_sign != 0 && sign != last_sign {
                reversals += 1;
            }
            last_sign = sign;
        }
        reversals >= cfg.shake_reversals
    }

    pub fn instant_predicates(&self, trace: &Trace, t: usize) -> PredicateSlice {
        let n = trace.n_objects();
        PredicateSlice {
            grasp: (0..n).map(|o| self.grasp_at(trace, t, o)).collect(),
            grow: (0..n).map(|o| self.grow_at(trace, t, o)).collect(),
            shake: (0..n).map(|o| self.shake_at(trace, t, o)).collect(),
        }
    }

    pub fn direction_holds(&self, trace: &Trace, t: usize, d: Direction, i: usize, j: usize) -> bool {
        let (a, b) = (trace.pos(t, i), trace.pos(t, j));
        let m = self.config.relation_margin;
        match d {
            Direction::Left => a.x < b.x - m,
            Direction::Right => a.x > b.x + m,
            Direction::Bottom => a.y < b.y - m,
            Direction::Top => a.y > b.y + m,
        }
    }

    pub fn instant_relations(&self, trace: &Trace, t: usize) -> RelationSlice {
        let n = trace.n_objects();
        let mut one_to_one = vec![false; 4 * n * n];
        let mut one_to_all = vec![false; 4 * n];
        for d in Direction::ALL {
            for i in 0..n {
                let mut all = true;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let holds = self.direction_holds(trace, t, d, i, j);
                    one_to_one[(d as usize * n + i) * n + j] = holds;
                    all &= holds;
                }
                one_to_all[d as usize * n + i] = all;
            }
        }
        RelationSlice { n, one_to_one, one_to_all }
    }

    pub fn timelines(&self, trace: &Trace) -> Timelines {
        let (len, n) = (trace.len(), trace.n_objects());
        let mut tl = Timelines {
            len,
            n,
            kinds: (0..n).map(|o| trace.kind(o)).collect(),
            colors: (0..n).map(|o| trace.color(o)).collect(),
            grasp: vec![0; n],
            grow: vec![0; n],
            shake: vec![0; n],
            rel: vec![0; 4 * n * n],
        };
        for t in 0..len {
            let preds = self.instant_predicates(trace, t);
            for o in 0..n {
                if preds.grasp[o] {
                    tl.grasp[o] |= bit(t);
                }
                if preds.grow[o] {
                    tl.grow[o] |= bit(t);
                }
                if preds.shake[o] {
                    tl.shake[o] |= bit(t);
                }
            }
            let rels = self.instant_relations(trace, t);
            for (k, &holds) in rels.one_to_one.iter().enumerate() {
                if holds {
                    tl.rel[k] |= bit(t);
                }
            }
        }
        tl
    }

    /// Static part of a reference: head word and color.
    pub fn matches_static(&self, kind: ObjectType, rgb: [f32; 3], color: Option<Color>, head: HeadWord) -> bool {
        head.matches(kind) && color.is_none_or(|c| c.contains(rgb))
    }

    pub fn eval_sentence(&self, trace: &Trace, ast: &SentenceAst) -> Result<bool, OracleError> {
        ast.validate()?;
        Ok(self.timelines(trace).eval(ast))
    }

    pub fn explain(&self, trace: &Trace, ast: &SentenceAst) -> Result<Explanation, OracleError> {
        ast.validate()?;
        Ok(self.timelines(trace).explain(ast))
    }

    /// Ids (ascending) of every sentence in the universe true of the trace.
    pub fn describe(&self, trace: &Trace) -> Vec<usize> {
        let tl = self.timelines(trace);
        Grammar::global()
            .sentences()
            .iter()
            .enumerate()
            .filter(|(_, s)| tl.eval(s))
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-step description pipeline: build the instantaneous description
    /// set `D_t` at every step, keep `D_T`, and add `was` in front of the
    /// predicate and/or the localizer of earlier sentences whose rule lapsed.
    /// Localizers of earlier sentences are judged at the step the sentence
    /// held, which is where this reading departs from [`Oracle::describe`].
    pub fn describe_operational(&self, trace: &Trace) -> Vec<usize> {
        let len = trace.len();
        let n = trace.n_objects();
        let last = len - 1;
        let preds: Vec<PredicateSlice> = (0..len).map(|t| self.instant_predicates(trace, t)).collect();
        let rels: Vec<RelationSlice> = (0..len).map(|t| self.instant_relations(trace, t)).collect();
        let kinds: Vec<ObjectType> = (0..n).map(|o| trace.kind(o)).collect();
        let kinds = &kinds;

        let facts_at = |t: usize| -> Vec<Fact> {
            let mut out = Vec::new();
            for o in 0..n {
                for p in Predicate::ALL {
                    if !preds[t].get(p, o) {
                        continue;
                    }
                    for head in HeadWord::all().filter(|h| h.matches(kinds[o])) {
                        if p == Predicate::Grow && !head.is_growable() {
                            continue;
                        }
                        out.push(Fact { object: o, predicate: p, reference: Reference::Attr { color: None, head } });
                        if let Some(c) = Color::of_rgb(trace.rgb(t, o)) {
                            out.push(Fact { object: o, predicate: p, reference: Reference::Attr { color: Some(c), head } });
                        }
                    }
                    for d in Direction::ALL {
                        let anchors: BTreeSet<HeadWord> = (0..n)
                            .filter(|&j| j != o && rels[t].one_to_one(d, o, j))
                            .flat_map(|j| HeadWord::all().filter(move |h| h.matches(kinds[j])))
                            .collect();
                        for anchor in anchors {
                            let relation = Relation::OneToOne { direction: d, anchor };
                            out.push(Fact { object: o, predicate: p, reference: Reference::Spatial { tense: Tense::Present, relation } });
                        }
                        if n > 1 && rels[t].one_to_all(d, o) {
                            let relation = Relation::OneToAll { direction: d };
                            out.push(Fact { object: o, predicate: p, reference: Reference::Spatial { tense: Tense::Present, relation } });
                        }
                    }
                }
            }
            out
        };
        let relation_holds_now = |o: usize, relation: Relation| -> bool {
            match relation {
                Relation::OneToOne { direction, anchor } => {
                    (0..n).any(|j| j != o && anchor.matches(kinds[j]) && rels[last].one_to_one(direction, o, j))
                }
                Relation::OneToAll { direction } => rels[last].one_to_all(direction, o),
            }
        };

        let present: HashSet<SentenceAst> = facts_at(last).iter().map(Fact::sentence).collect();
        let mut described: HashSet<SentenceAst> = present.clone();
        for t in 0..last {
            for fact in facts_at(t) {
                let s = fact.sentence();
                if present.contains(&s) {
                    continue;
                }
                match fact.reference {
                    Reference::Attr { .. } => {
                        described.insert(SentenceAst { pred_tense: Tense::Past, ..s });
                    }
                    Reference::Spatial { relation, .. } => {
                        let pred_lapsed = !preds[last].get(fact.predicate, fact.object);
                        let rel_lapsed = !relation_holds_now(fact.object, relation);
                        let (pred_tense, loc_tense) = match (pred_lapsed, rel_lapsed) {
                            (true, false) => (Tense::Past, Tense::Present),
                            (false, true) => (Tense::Present, Tense::Past),
                            (true, true) => (Tense::Past, Tense::Past),
                            // same object still satisfies both: would be in D_T
                            (false, false) => continue,
                        };
                        described.insert(SentenceAst::spatial(pred_tense, fact.predicate, loc_tense, relation));
                    }
                }
            }
        }
        let grammar = Grammar::global();
        let mut ids: Vec<usize> = described
            .iter()
            .map(|s| grammar.id_of(s).expect("operational sentences are in the universe"))
            .collect();
        ids.sort_unstable();
        ids
    }

    /// A false sentence that shares the predicate word or the head word with
    /// `positive`, drawn uniformly.
    pub fn hard_negative<R: Rng + ?Sized>(
        &self,
        trace: &Trace,
        positive: &SentenceAst,
        rng: &mut R,
    ) -> Result<SentenceAst, OracleError> {
        let tl = self.timelines(trace);
        self.hard_negative_with(&tl, positive, rng)
    }

    pub fn hard_negative_with<R: Rng + ?Sized>(
        &self,
        tl: &Timelines,
        positive: &SentenceAst,
        rng: &mut R,
    ) -> Result<SentenceAst, OracleError> {
        self.hard_negative_among(tl, positive, |_| true, rng)
    }

    /// Like [`Oracle::hard_negative_with`], restricted to sentence ids
    /// accepted by `allowed`.
    pub fn hard_negative_among<R: Rng + ?Sized>(
        &self,
        tl: &Timelines,
        positive: &SentenceAst,
        allowed: impl Fn(usize) -> bool,
        rng: &mut R,
    ) -> Result<SentenceAst, OracleError> {
        let candidates: Vec<&SentenceAst> = Grammar::global()
            .sentences()
            .iter()
            .enumerate()
            .filter(|(id, _)| allowed(*id))
            .map(|(_, s)| s)
            .filter(|s| *s != positive)
            .filter(|s| s.predicate == positive.predicate || s.head() == positive.head())
            .filter(|s| !tl.eval(s))
            .collect();
        candidates
            .choose(rng)
            .map(|s| **s)
            .ok_or_else(|| OracleError::NoHardNegative(positive.to_string()))
    }
}

struct Fact {
    object: usize,
    predicate: Predicate,
    reference: Reference,
}

impl Fact {
    fn sentence(&self) -> SentenceAst {
        SentenceAst { pred_tense: Tense::Present, predicate: self.predicate, reference: self.reference }
    }
}
