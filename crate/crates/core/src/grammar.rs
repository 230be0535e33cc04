//! The synthetic description language.
//!
//! ```text
//! <S>        ::= <pred> <ref> | was <pred> <ref>
//! <pred>     ::= grasp | grow | shake
//! <ref>      ::= <head> | <color> <head>
//!              | thing <loc> | thing was <loc>
//! <loc>      ::= <dir> of <head> | <dir> most
//! <dir>      ::= left | right | top | bottom
//! <color>    ::= red | green | blue
//! <head>     ::= <type> | <category> | thing
//! ```
//!
//! `grow` only takes growable heads (animals, plants, `animal`, `plant`,
//! `living_thing`, `thing`). Spatial anchors are bare heads.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GrammarError;
use crate::world::{Category, Color, ObjectType, NUM_TYPES};

pub const MAX_SENTENCE_LEN: usize = 8;
pub const VOCAB_SIZE: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Grasp,
    Grow,
    Shake,
}

impl Predicate {
    pub const ALL: [Predicate; 3] = [Predicate::Grasp, Predicate::Grow, Predicate::Shake];

    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::Grasp => "grasp",
            Predicate::Grow => "grow",
            Predicate::Shake => "shake",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Top,
    Bottom,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Top, Direction::Bottom];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Top => "top",
            Direction::Bottom => "bottom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tense {
    Present,
    Past,
}

/// A vocabulary entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Object(ObjectType),
    Category(Category),
    Thing,
    Color(Color),
    Predicate(Predicate),
    Was,
    Direction(Direction),
    Of,
    Most,
}

const CATEGORY_BASE: u32 = NUM_TYPES as u32;
const THING_ID: u32 = CATEGORY_BASE + 5;
const COLOR_BASE: u32 = THING_ID + 1;
const PREDICATE_BASE: u32 = COLOR_BASE + 3;
const WAS_ID: u32 = PREDICATE_BASE + 3;
const DIRECTION_BASE: u32 = WAS_ID + 1;
const OF_ID: u32 = DIRECTION_BASE + 4;
const MOST_ID: u32 = OF_ID + 1;

impl Token {
    pub fn id(self) -> u32 {
        match self {
            Token::Object(t) => t.index() as u32,
            Token::Category(c) => CATEGORY_BASE + c as u32,
            Token::Thing => THING_ID,
            Token::Color(c) => COLOR_BASE + c as u32,
            Token::Predicate(p) => PREDICATE_BASE + p as u32,
            Token::Was => WAS_ID,
            Token::Direction(d) => DIRECTION_BASE + d as u32,
            Token::Of => OF_ID,
            Token::Most => MOST_ID,
        }
    }

    pub fn from_id(id: u32) -> Result<Token, GrammarError> {
        vocabulary().get(id as usize).copied().ok_or(GrammarError::UnknownTokenId(id))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Token::Object(t) => t.as_str(),
            Token::Category(c) => c.as_str(),
            Token::Thing => "thing",
            Token::Color(c) => c.as_str(),
            Token::Predicate(p) => p.as_str(),
            Token::Was => "was",
            Token::Direction(d) => d.as_str(),
            Token::Of => "of",
            Token::Most => "most",
        }
    }

    pub fn from_word(word: &str) -> Result<Token, GrammarError> {
        static LOOKUP: OnceLock<HashMap<&'static str, Token>> = OnceLock::new();
        LOOKUP
            .get_or_init(|| vocabulary().iter().map(|t| (t.as_str(), *t)).collect())
            .get(word)
            .copied()
            .ok_or_else(|| GrammarError::UnknownToken(word.to_string()))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The vocabulary in id order.
pub fn vocabulary() -> &'static [Token] {
    static VOCAB: OnceLock<Vec<Token>> = OnceLock::new();
    VOCAB.get_or_init(|| {
        let mut v: Vec<Token> = ObjectType::ALL.into_iter().map(Token::Object).collect();
        v.extend(Category::ALL.into_iter().map(Token::Category));
        v.push(Token::Thing);
        v.extend(Color::ALL.into_iter().map(Token::Color));
        v.extend(Predicate::ALL.into_iter().map(Token::Predicate));
        v.push(Token::Was);
        v.extend(Direction::ALL.into_iter().map(Token::Direction));
        v.push(Token::Of);
        v.push(Token::Most);
        debug_assert!(v.iter().enumerate().all(|(i, t)| t.id() as usize == i));
        v
    })
}

/// Vocabulary file contents: one token per line, line number = id.
pub fn vocabulary_file() -> String {
    let mut s = String::new();
    for t in vocabulary() {
        s.push_str(t.as_str());
        s.push('\n');
    }
    s
}

/// Hex SHA-256 of [`vocabulary_file`].
pub fn vocabulary_hash() -> String {
    static HASH: OnceLock<String> = OnceLock::new();
    HASH.get_or_init(|| hex_digest(vocabulary_file().as_bytes())).clone()
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A noun that can name an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadWord {
    Type(ObjectType),
    Category(Category),
    Thing,
}

impl HeadWord {
    /// All 38 head words: types, categories, then `thing`.
    pub fn all() -> impl Iterator<Item = HeadWord> {
        ObjectType::ALL
            .into_iter()
            .map(HeadWord::Type)
            .chain(Category::ALL.into_iter().map(HeadWord::Category))
            .chain(std::iter::once(HeadWord::Thing))
    }

    pub fn matches(self, kind: ObjectType) -> bool {
        match self {
            HeadWord::Type(t) => t == kind,
            HeadWord::Category(c) => c.contains(kind),
            HeadWord::Thing => true,
        }
    }

    pub fn is_growable(self) -> bool {
        match self {
            HeadWord::Type(t) => t.is_living(),
            HeadWord::Category(c) => matches!(c, Category::Animal | Category::Plant | Category::LivingThing),
            HeadWord::Thing => true,
        }
    }

    pub fn token(self) -> Token {
        match self {
            HeadWord::Type(t) => Token::Object(t),
            HeadWord::Category(c) => Token::Category(c),
            HeadWord::Thing => Token::Thing,
        }
    }

    fn from_token(t: Token) -> Option<HeadWord> {
        match t {
            Token::Object(o) => Some(HeadWord::Type(o)),
            Token::Category(c) => Some(HeadWord::Category(c)),
            Token::Thing => Some(HeadWord::Thing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    OneToOne { direction: Direction, anchor: HeadWord },
    OneToAll { direction: Direction },
}

impl Relation {
    pub fn direction(self) -> Direction {
        match self {
            Relation::OneToOne { direction, .. } | Relation::OneToAll { direction } => direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// `[color] head`
    Attr { color: Option<Color>, head: HeadWord },
    /// `thing [was] localizer`
    Spatial { tense: Tense, relation: Relation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceAst {
    pub pred_tense: Tense,
    pub predicate: Predicate,
    pub reference: Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConceptCategory {
    Basic,
    Spatial,
    Temporal,
    SpatioTemporal,
}

impl ConceptCategory {
    pub const ALL: [ConceptCategory; 4] = [
        ConceptCategory::Basic,
        ConceptCategory::Spatial,
        ConceptCategory::Temporal,
        ConceptCategory::SpatioTemporal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConceptCategory::Basic => "basic",
            ConceptCategory::Spatial => "spatial",
            ConceptCategory::Temporal => "temporal",
            ConceptCategory::SpatioTemporal => "spatio_temporal",
        }
    }

    pub fn from_name(name: &str) -> Option<ConceptCategory> {
        ConceptCategory::ALL.into_iter().find(|c| c.as_str() == name)
    }
}

impl fmt::Display for ConceptCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl SentenceAst {
    pub fn attr(pred_tense: Tense, predicate: Predicate, color: Option<Color>, head: HeadWord) -> Self {
        SentenceAst { pred_tense, predicate, reference: Reference::Attr { color, head } }
    }

    pub fn spatial(pred_tense: Tense, predicate: Predicate, loc_tense: Tense, relation: Relation) -> Self {
        SentenceAst { pred_tense, predicate, reference: Reference::Spatial { tense: loc_tense, relation } }
    }

    /// The noun the reference is built on: the attribute head, or `thing`
    /// for spatial references.
    pub fn head(&self) -> HeadWord {
        match self.reference {
            Reference::Attr { head, .. } => head,
            Reference::Spatial { .. } => HeadWord::Thing,
        }
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        if self.predicate == Predicate::Grow && !self.head().is_growable() {
            return Err(GrammarError::InvalidCombination(format!(
                "`grow` cannot apply to `{}`",
                self.head().token()
            )));
        }
        Ok(())
    }

    /// True when a spatial reference is combined with any past marker; these
    /// are the sentences whose reading depends on how the two tense
    /// operators are composed.
    pub fn is_mixed_tense(&self) -> bool {
        match self.reference {
            Reference::Attr { .. } => false,
            Reference::Spatial { tense, .. } => tense == Tense::Past || self.pred_tense == Tense::Past,
        }
    }

    pub fn render(&self) -> Result<Vec<Token>, GrammarError> {
        self.validate()?;
        let mut out = Vec::with_capacity(MAX_SENTENCE_LEN);
        if self.pred_tense == Tense::Past {
            out.push(Token::Was);
        }
        out.push(Token::Predicate(self.predicate));
        match self.reference {
            Reference::Attr { color, head } => {
                out.extend(color.map(Token::Color));
                out.push(head.token());
            }
            Reference::Spatial { tense, relation } => {
                out.push(Token::Thing);
                if tense == Tense::Past {
                    out.push(Token::Was);
                }
                match relation {
                    Relation::OneToOne { direction, anchor } => {
                        out.extend([Token::Direction(direction), Token::Of, anchor.token()]);
                    }
                    Relation::OneToAll { direction } => {
                        out.extend([Token::Direction(direction), Token::Most]);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn token_ids(&self) -> Result<Vec<u32>, GrammarError> {
        Ok(self.render()?.into_iter().map(Token::id).collect())
    }

    pub fn category(&self) -> ConceptCategory {
        categorize(self)
    }
}

impl fmt::Display for SentenceAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.render() {
            Ok(tokens) => f.write_str(&join(&tokens)),
            Err(e) => write!(f, "<invalid: {e}>"),
        }
    }
}

pub fn join(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ")
}

pub fn categorize(ast: &SentenceAst) -> ConceptCategory {
    let present_grasp = ast.pred_tense == Tense::Present && ast.predicate == Predicate::Grasp;
    match ast.reference {
        Reference::Attr { .. } if present_grasp => ConceptCategory::Basic,
        Reference::Attr { .. } => ConceptCategory::Temporal,
        Reference::Spatial { tense: Tense::Present, .. } if present_grasp => ConceptCategory::Spatial,
        Reference::Spatial { .. } => ConceptCategory::SpatioTemporal,
    }
}

/// Parses a whitespace-separated sentence.
pub fn parse(sentence: &str) -> Result<SentenceAst, GrammarError> {
    let words: Vec<&str> = sentence.split_whitespace().collect();
    if words.len() > MAX_SENTENCE_LEN {
        return Err(GrammarError::TooLong(words.len()));
    }
    let tokens = words.iter().map(|w| Token::from_word(w)).collect::<Result<Vec<_>, _>>()?;
    parse_tokens(&tokens)
}

pub fn parse_ids(ids: &[u32]) -> Result<SentenceAst, GrammarError> {
    if ids.len() > MAX_SENTENCE_LEN {
        return Err(GrammarError::TooLong(ids.len()));
    }
    let tokens = ids.iter().map(|&i| Token::from_id(i)).collect::<Result<Vec<_>, _>>()?;
    parse_tokens(&tokens)
}

pub fn parse_tokens(tokens: &[Token]) -> Result<SentenceAst, GrammarError> {
    if tokens.len() > MAX_SENTENCE_LEN {
        return Err(GrammarError::TooLong(tokens.len()));
    }
    let mut cur = Cursor { tokens, pos: 0 };
    let pred_tense = cur.tense();
    let predicate = match cur.next() {
        Some(Token::Predicate(p)) => p,
        other => return Err(cur.unexpected(other, "a predicate")),
    };
    let reference = match cur.next() {
        Some(Token::Color(c)) => match cur.next().and_then(HeadWord::from_token) {
            Some(head) => Reference::Attr { color: Some(c), head },
            None => return Err(GrammarError::Malformed("expected a noun after the color".into())),
        },
        Some(Token::Thing) if cur.peek().is_some() => {
            let tense = cur.tense();
            let direction = match cur.next() {
                Some(Token::Direction(d)) => d,
                other => return Err(cur.unexpected(other, "a direction")),
            };
            let relation = match cur.next() {
                Some(Token::Most) => Relation::OneToAll { direction },
                Some(Token::Of) => match cur.next().and_then(HeadWord::from_token) {
                    Some(anchor) => Relation::OneToOne { direction, anchor },
                    None => return Err(GrammarError::Malformed("expected a noun after `of`".into())),
                },
                other => return Err(cur.unexpected(other, "`of` or `most`")),
            };
            Reference::Spatial { tense, relation }
        }
        Some(t) => match HeadWord::from_token(t) {
            Some(head) => Reference::Attr { color: None, head },
            None => return Err(cur.unexpected(Some(t), "a noun or color")),
        },
        None => return Err(cur.unexpected(None, "a noun or color")),
    };
    if let Some(t) = cur.peek() {
        return Err(GrammarError::Malformed(format!("trailing token `{t}`")));
    }
    let ast = SentenceAst { pred_tense, predicate, reference };
    ast.validate()?;
    Ok(ast)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn tense(&mut self) -> Tense {
        if self.peek() == Some(Token::Was) {
            self.pos += 1;
            Tense::Past
        } else {
            Tense::Present
        }
    }

    fn unexpected(&self, got: Option<Token>, wanted: &str) -> GrammarError {
        match got {
            Some(t) => GrammarError::Malformed(format!("expected {wanted}, found `{t}`")),
            None => GrammarError::Malformed(format!("expected {wanted}, found end of sentence")),
        }
    }
}

/// Every valid sentence, in generation order (not yet grouped by category).
fn generate_all() -> Vec<SentenceAst> {
    let mut refs: Vec<Reference> = Vec::new();
    for head in HeadWord::all() {
        refs.push(Reference::Attr { color: None, head });
        for c in Color::ALL {
            refs.push(Reference::Attr { color: Some(c), head });
        }
    }
    for tense in [Tense::Present, Tense::Past] {
        for direction in Direction::ALL {
            for anchor in HeadWord::all() {
                refs.push(Reference::Spatial { tense, relation: Relation::OneToOne { direction, anchor } });
            }
        }
        for direction in Direction::ALL {
            refs.push(Reference::Spatial { tense, relation: Relation::OneToAll { direction } });
        }
    }
    let mut out = Vec::new();
    for pred_tense in [Tense::Present, Tense::Past] {
        for predicate in Predicate::ALL {
            for &reference in &refs {
                let ast = SentenceAst { pred_tense, predicate, reference };
                if ast.validate().is_ok() {
                    out.push(ast);
                }
            }
        }
    }
    out
}

/// The sentence universe with a stable id per sentence. Ids run through the
/// categories in order basic, spatial, temporal, spatio-temporal.
#[derive(Debug)]
pub struct Grammar {
    sentences: Vec<SentenceAst>,
    index: HashMap<SentenceAst, usize>,
    ranges: [std::ops::Range<usize>; 4],
}

impl Grammar {
    fn build() -> Grammar {
        let all = generate_all();
        let mut sentences = Vec::with_capacity(all.len());
        let mut ranges: [std::ops::Range<usize>; 4] = Default::default();
        for (k, cat) in ConceptCategory::ALL.into_iter().enumerate() {
            let start = sentences.len();
            sentences.extend(all.iter().filter(|s| categorize(s) == cat).copied());
            ranges[k] = start..sentences.len();
        }
        let index = sentences.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Grammar { sentences, index, ranges }
    }

    /// The shared, lazily built instance.
    pub fn global() -> &'static Grammar {
        static GRAMMAR: OnceLock<Grammar> = OnceLock::new();
        GRAMMAR.get_or_init(Grammar::build)
    }

    pub fn sentences(&self) -> &[SentenceAst] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&SentenceAst> {
        self.sentences.get(id)
    }

    pub fn id_of(&self, ast: &SentenceAst) -> Option<usize> {
        self.index.get(ast).copied()
    }

    pub fn category_range(&self, category: ConceptCategory) -> std::ops::Range<usize> {
        self.ranges[category as usize].clone()
    }

    pub fn category_of_id(&self, id: usize) -> ConceptCategory {
        ConceptCategory::ALL
            .into_iter()
            .find(|c| self.ranges[*c as usize].contains(&id))
            .expect("id within universe")
    }

    pub fn enumerate(&self, category: ConceptCategory) -> &[SentenceAst] {
        &self.sentences[self.category_range(category)]
    }
}

pub fn enumerate_sentences(category: ConceptCategory) -> &'static [SentenceAst] {
    Grammar::global().enumerate(category)
}

/// One-hot rows, `L × VOCAB_SIZE`.
pub fn encode_tokens(tokens: &[Token]) -> Vec<Vec<f32>> {
    tokens
        .iter()
        .map(|t| {
            let mut row = vec![0.0; VOCAB_SIZE];
            row[t.id() as usize] = 1.0;
            row
        })
        .collect()
}

/// Inverse of [`encode_tokens`]. Each row must be an exact one-hot.
pub fn decode_tokens(rows: &[Vec<f32>]) -> Result<Vec<Token>, GrammarError> {
    rows.iter()
        .map(|row| {
            let hot: Vec<usize> = (0..row.len()).filter(|&i| row[i] != 0.0).collect();
            match hot.as_slice() {
                [i] if row[*i] == 1.0 => Token::from_id(*i as u32),
                _ => Err(GrammarError::Malformed("row is not a one-hot vector".into())),
            }
        })
        .collect()
}

/// Machine-readable BNF of the language, for documentation.
pub fn bnf_document() -> String {
    let words = |it: &mut dyn Iterator<Item = &'static str>| it.map(|w| format!("\"{w}\"")).collect::<Vec<_>>().join(" | ");
    let types = words(&mut ObjectType::ALL.iter().map(|t| t.as_str()));
    let cats = words(&mut Category::ALL.iter().map(|c| c.as_str()));
    let growable = words(
        &mut HeadWord::all().filter(|h| h.is_growable()).map(|h| h.token().as_str()),
    );
    format!(
        "<S> ::= <pred> <ref> | \"was\" <pred> <ref> | <tense> \"grow\" <grow_ref>\n\
         <pred> ::= \"grasp\" | \"shake\"\n\
         <tense> ::= \"\" | \"was\"\n\
         <ref> ::= <head> | <color> <head> | <spatial_ref>\n\
         <grow_ref> ::= <growable> | <color> <growable> | <spatial_ref>\n\
         <spatial_ref> ::= \"thing\" <localizer> | \"thing\" \"was\" <localizer>\n\
         <localizer> ::= <dir> \"of\" <head> | <dir> \"most\"\n\
         <dir> ::= \"left\" | \"right\" | \"top\" | \"bottom\"\n\
         <color> ::= \"red\" | \"green\" | \"blue\"\n\
         <head> ::= <type> | <category> | \"thing\"\n\
         <type> ::= {types}\n\
         <category> ::= {cats}\n\
         <growable> ::= {growable}\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_contents() {
        let v = vocabulary();
        assert_eq!(v.len(), VOCAB_SIZE);
        for w in ["chameleon", "most", "of", "was", "living_thing", "thing"] {
            assert!(Token::from_word(w).is_ok(), "{w}");
        }
        for (i, t) in v.iter().enumerate() {
            assert_eq!(Token::from_id(i as u32).unwrap(), *t);
            assert_eq!(Token::from_word(t.as_str()).unwrap(), *t);
        }
        assert_eq!(vocabulary_file().lines().count(), 51);
    }

    #[test]
    fn category_sizes() {
        let g = Grammar::global();
        assert_eq!(g.enumerate(ConceptCategory::Basic).len(), 152);
        assert_eq!(g.enumerate(ConceptCategory::Spatial).len(), 156);
        assert_eq!(g.enumerate(ConceptCategory::Temporal).len(), 648);
        assert_eq!(g.enumerate(ConceptCategory::SpatioTemporal).len(), 1716);
        assert_eq!(g.len(), 2672);
        assert_eq!(HeadWord::all().count(), 38);
        assert_eq!(HeadWord::all().filter(|h| h.is_growable()).count(), 24);
    }

    #[test]
    fn example_sentences_parse() {
        let s = parse("was grasp red chameleon").unwrap();
        assert_eq!(
            s,
            SentenceAst::attr(Tense::Past, Predicate::Grasp, Some(Color::Red), HeadWord::Type(ObjectType::Chameleon))
        );
        let s = parse("grasp thing was bottom of table").unwrap();
        assert_eq!(
            s,
            SentenceAst::spatial(
                Tense::Present,
                Predicate::Grasp,
                Tense::Past,
                Relation::OneToOne { direction: Direction::Bottom, anchor: HeadWord::Type(ObjectType::Table) }
            )
        );
        assert_eq!(s.category(), ConceptCategory::SpatioTemporal);
    }

    #[test]
    fn rendering() {
        let s = SentenceAst::spatial(Tense::Present, Predicate::Grasp, Tense::Present, Relation::OneToAll { direction: Direction::Right });
        assert_eq!(s.to_string(), "grasp thing right most");
        let s = SentenceAst::attr(Tense::Present, Predicate::Shake, None, HeadWord::Type(ObjectType::Bush));
        assert_eq!(s.to_string(), "shake bush");
        let longest = parse("was grasp thing was bottom of table").unwrap();
        assert_eq!(longest.render().unwrap().len(), 7);
        let bad = SentenceAst::attr(Tense::Present, Predicate::Grow, None, HeadWord::Type(ObjectType::Door));
        assert!(matches!(bad.render(), Err(GrammarError::InvalidCombination(_))));
    }

    #[test]
    fn categorize_examples() {
        assert_eq!(parse("grasp dog").unwrap().category(), ConceptCategory::Basic);
        assert_eq!(parse("grow algae").unwrap().category(), ConceptCategory::Temporal);
        assert_eq!(parse("grasp thing left of cat").unwrap().category(), ConceptCategory::Spatial);
        assert_eq!(parse("shake thing left most").unwrap().category(), ConceptCategory::SpatioTemporal);
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(parse("grasp unicorn"), Err(GrammarError::UnknownToken("unicorn".into())));
        assert!(matches!(parse("grasp thing was bottom of table of cat dog"), Err(GrammarError::TooLong(9))));
        assert!(matches!(parse("dog grasp"), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse("grasp red"), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse("grasp dog cat"), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse("grasp thing left"), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse("grasp red thing left most"), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse(""), Err(GrammarError::Malformed(_))));
        assert!(matches!(parse("grow table"), Err(GrammarError::InvalidCombination(_))));
    }

    #[test]
    fn round_trip_universe() {
        for s in Grammar::global().sentences() {
            let text = s.to_string();
            let back = parse(&text).unwrap();
            assert_eq!(back, *s);
            assert_eq!(back.to_string(), text);
            assert!(s.render().unwrap().len() <= MAX_SENTENCE_LEN);
            assert_eq!(parse_ids(&s.token_ids().unwrap()).unwrap(), *s);
        }
    }

    #[test]
    fn one_hot_encoding() {
        let tokens = parse("was grasp red chameleon").unwrap().render().unwrap();
        let rows = encode_tokens(&tokens);
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.len(), VOCAB_SIZE);
            assert_eq!(r.iter().sum::<f32>(), 1.0);
        }
        assert_eq!(decode_tokens(&rows).unwrap(), tokens);
    }
}
