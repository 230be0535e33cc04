//! The 2D playground: body, objects, transition dynamics and feature encoding.
//!
//! All reals are `f32` so that a simulated state and its serialized feature
//! encoding carry exactly the same bits. The oracle only ever looks at the
//! encoding, which keeps truth values stable across save/load.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::WorldError;

/// Number of object types in the catalogue.
pub const NUM_TYPES: usize = 32;
/// Width of an object's feature row: pos(2) + size(1) + rgb(3) + one-hot(32) + grasped(1).
pub const OBJECT_FEATURES: usize = 2 + 1 + 3 + NUM_TYPES + 1;
/// Width of the body feature row: pos(2) + gripper(1).
pub const BODY_FEATURES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Vec2 {
    pub x: f32,
    pub y: f32,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f32, y: f32) -> Self {
        Vec2 { x, y }
    }

    /// Clamps both components into the playground box `[-1, 1]`.
    pub fn clamped(self) -> Self {
        Vec2::new(self.x.clamp(-1.0, 1.0), self.y.clamp(-1.0, 1.0))
    }

    pub fn norm(self) -> f32 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn distance(self, other: Vec2) -> f32 {
        (self - other).norm()
    }

    /// Rescales the vector so its norm does not exceed `max`.
    pub fn limited(self, max: f32) -> Self {
        let n = self.norm();
        if n > max && n > 0.0 {
            self * (max / n)
        } else {
            self
        }
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f32> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f32) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Object categories. The first four are base categories, `LivingThing` is
/// the union of animals and plants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Animal,
    Plant,
    Furniture,
    Supply,
    LivingThing,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Animal,
        Category::Plant,
        Category::Furniture,
        Category::Supply,
        Category::LivingThing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Animal => "animal",
            Category::Plant => "plant",
            Category::Furniture => "furniture",
            Category::Supply => "supply",
            Category::LivingThing => "living_thing",
        }
    }

    pub fn contains(self, ty: ObjectType) -> bool {
        match self {
            Category::LivingThing => ty.is_living(),
            base => ty.category() == base,
        }
    }
}

macro_rules! object_types {
    ($($variant:ident => $name:literal, $cat:ident;)*) => {
        /// The object catalogue, in one-hot order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum ObjectType {
            $($variant,)*
        }

        impl ObjectType {
            pub const ALL: [ObjectType; NUM_TYPES] = [$(ObjectType::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(ObjectType::$variant => $name,)*
                }
            }

            pub fn category(self) -> Category {
                match self {
                    $(ObjectType::$variant => Category::$cat,)*
                }
            }
        }
    };
}

object_types! {
    Dog => "dog", Animal;
    Cat => "cat", Animal;
    Chameleon => "chameleon", Animal;
    Human => "human", Animal;
    Fly => "fly", Animal;
    Parrot => "parrot", Animal;
    Mouse => "mouse", Animal;
    Lion => "lion", Animal;
    Pig => "pig", Animal;
    Cow => "cow", Animal;
    Cactus => "cactus", Plant;
    Carnivorous => "carnivorous", Plant;
    Flower => "flower", Plant;
    Tree => "tree", Plant;
    Bush => "bush", Plant;
    Grass => "grass", Plant;
    Algae => "algae", Plant;
    Tea => "tea", Plant;
    Rose => "rose", Plant;
    Bonsai => "bonsai", Plant;
    Door => "door", Furniture;
    Chair => "chair", Furniture;
    Desk => "desk", Furniture;
    Lamp => "lamp", Furniture;
    Table => "table", Furniture;
    Cupboard => "cupboard", Furniture;
    Sink => "sink", Furniture;
    Window => "window", Furniture;
    Sofa => "sofa", Furniture;
    Carpet => "carpet", Furniture;
    Water => "water", Supply;
    Food => "food", Supply;
}

impl ObjectType {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<ObjectType> {
        ObjectType::ALL.get(i).copied()
    }

    pub fn from_name(name: &str) -> Option<ObjectType> {
        ObjectType::ALL.iter().copied().find(|t| t.as_str() == name)
    }

    pub fn is_living(self) -> bool {
        matches!(self.category(), Category::Animal | Category::Plant)
    }

    /// Whether `self`, used as a supply, makes `target` grow on contact.
    /// Food and water feed animals; only water feeds plants.
    pub fn feeds(self, target: ObjectType) -> bool {
        matches!(
            (self, target.category()),
            (ObjectType::Water, Category::Animal | Category::Plant) | (ObjectType::Food, Category::Animal)
        )
    }
}

/// The three color words. Each owns a disjoint axis-aligned box in RGB space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Green,
    Blue,
}

/// Lower bound of the dominant channel and upper bound of the other two.
const COLOR_HIGH: f32 = 0.6;
const COLOR_LOW: f32 = 0.4;

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }

    fn channel(self) -> usize {
        self as usize
    }

    /// True iff `rgb` lies in this color word's region.
    pub fn contains(self, rgb: [f32; 3]) -> bool {
        rgb.iter().enumerate().all(|(c, &v)| {
            if c == self.channel() {
                (COLOR_HIGH..=1.0).contains(&v)
            } else {
                (0.0..=COLOR_LOW).contains(&v)
            }
        })
    }

    pub fn of_rgb(rgb: [f32; 3]) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.contains(rgb))
    }

    pub fn sample_rgb<R: Rng + ?Sized>(self, rng: &mut R) -> [f32; 3] {
        let mut rgb = [0.0; 3];
        for (c, v) in rgb.iter_mut().enumerate() {
            *v = if c == self.channel() {
                rng.gen_range(COLOR_HIGH..=1.0)
            } else {
                rng.gen_range(0.0..=COLOR_LOW)
            };
        }
        rgb
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gripper {
    Open,
    Closed,
}

impl Gripper {
    pub fn feature(self) -> f32 {
        match self {
            Gripper::Closed => 1.0,
            Gripper::Open => -1.0,
        }
    }

    pub fn from_feature(v: f32) -> Gripper {
        if v > 0.0 {
            Gripper::Closed
        } else {
            Gripper::Open
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub pos: Vec2,
    pub gripper: Gripper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub pos: Vec2,
    pub size: f32,
    pub rgb: [f32; 3],
    pub kind: ObjectType,
    pub grasped: bool,
}

impl ObjectState {
    pub fn color(&self) -> Option<Color> {
        Color::of_rgb(self.rgb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub body: BodyState,
    pub objects: Vec<ObjectState>,
    pub held: Option<usize>,
}

/// A displacement request plus a gripper command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub delta: Vec2,
    pub gripper: Gripper,
}

impl Action {
    pub fn idle(gripper: Gripper) -> Self {
        Action { delta: Vec2::ZERO, gripper }
    }
}

/// Environment constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub n_objects: usize,
    pub episode_len: usize,
    pub agent_size: f32,
    pub min_object_size: f32,
    pub max_initial_size: f32,
    pub max_size: f32,
    pub growth_rate: f32,
    pub min_initial_distance: f32,
    pub max_speed: f32,
    pub animal_step: f32,
    /// Probability that a fresh world is composed so that a grow scenario is
    /// feasible (one growable object plus a compatible supply).
    pub grow_ready_prob: f64,
    pub max_placement_attempts: usize,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            n_objects: 3,
            episode_len: 30,
            agent_size: 0.05,
            min_object_size: 0.2,
            max_initial_size: 0.3,
            max_size: 0.35,
            growth_rate: 0.01,
            min_initial_distance: 0.3,
            max_speed: 0.15,
            animal_step: 0.05,
            grow_ready_prob: 0.6,
            max_placement_attempts: 1000,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), WorldError> {
        let bad = |what: &str| Err(WorldError::InvalidConfig(what.to_string()));
        if self.n_objects == 0 || self.n_objects > NUM_TYPES {
            return bad("n_objects must be in 1..=32");
        }
        if self.episode_len < 2 || self.episode_len > 64 {
            return bad("episode_len must be in 2..=64");
        }
        if !(self.min_object_size > 0.0
            && self.min_object_size <= self.max_initial_size
            && self.max_initial_size <= self.max_size)
        {
            return bad("object sizes must satisfy 0 < min <= initial max <= max");
        }
        if self.growth_rate < 0.0 || self.max_speed <= 0.0 || self.animal_step < 0.0 {
            return bad("rates must be non-negative and max_speed positive");
        }
        if !(0.0..=1.0).contains(&self.grow_ready_prob) {
            return bad("grow_ready_prob must be a probability");
        }
        Ok(())
    }
}

/// Strict proximity test for grasping: `d(agent, obj) < (agent_size + obj.size) / 2`.
pub fn grasp_eligible(body: &BodyState, obj: &ObjectState, agent_size: f32) -> bool {
    body.pos.distance(obj.pos) < (agent_size + obj.size) / 2.0
}

/// Two objects touch when their distance is at most their mean size.
pub fn contact(a: &ObjectState, b: &ObjectState) -> bool {
    a.pos.distance(b.pos) <= (a.size + b.size) / 2.0
}

/// Index of the grasp-eligible object nearest to `body`, ties to the lowest index.
pub fn nearest_eligible(body: &BodyState, objects: &[ObjectState], agent_size: f32) -> Option<usize> {
    let mut best: Option<(usize, f32)> = None;
    for (i, o) in objects.iter().enumerate() {
        if !grasp_eligible(body, o, agent_size) {
            continue;
        }
        let d = body.pos.distance(o.pos);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Samples object types for a fresh world. A grow-ready draw places one
/// living thing, a supply that feeds it and a non-supply third object.
fn sample_types<R: Rng + ?Sized>(config: &WorldConfig, rng: &mut R) -> Vec<ObjectType> {
    let n = config.n_objects;
    if n >= 2 && rng.gen_bool(config.grow_ready_prob) {
        let living: Vec<ObjectType> = ObjectType::ALL.into_iter().filter(|t| t.is_living()).collect();
        let target = *living.choose(rng).expect("catalogue has living things");
        let supply = if target.category() == Category::Plant || rng.gen_bool(0.5) {
            ObjectType::Water
        } else {
            ObjectType::Food
        };
        let mut rest: Vec<ObjectType> = ObjectType::ALL
            .into_iter()
            .filter(|t| *t != target && t.category() != Category::Supply)
            .collect();
        rest.shuffle(rng);
        let mut types = vec![target, supply];
        types.extend(rest.into_iter().take(n - 2));
        types.shuffle(rng);
        types
    } else {
        ObjectType::ALL.choose_multiple(rng, n).copied().collect()
    }
}

/// Creates a fresh world: body at the origin with an open gripper, and
/// `n_objects` distinct-type objects placed pairwise farther apart than
/// `min_initial_distance`.
pub fn init_world<R: Rng + ?Sized>(config: &WorldConfig, rng: &mut R) -> Result<WorldState, WorldError> {
    config.validate()?;
    let types = sample_types(config, rng);
    let mut positions: Vec<Vec2> = Vec::with_capacity(types.len());
    let mut attempts = 0;
    while positions.len() < types.len() {
        if attempts >= config.max_placement_attempts {
            return Err(WorldError::Placement { attempts });
        }
        attempts += 1;
        let p = Vec2::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if positions.iter().all(|q| q.distance(p) > config.min_initial_distance) {
            positions.push(p);
        }
    }
    let objects = types
        .into_iter()
        .zip(positions)
        .map(|(kind, pos)| {
            let size = rng.gen_range(config.min_object_size..=config.max_initial_size);
            let color = *Color::ALL.choose(rng).expect("three colors");
            ObjectState { pos, size, rgb: color.sample_rgb(rng), kind, grasped: false }
        })
        .collect();
    Ok(WorldState {
        body: BodyState { pos: Vec2::ZERO, gripper: Gripper::Open },
        objects,
        held: None,
    })
}

/// Advances the world by one step.
///
/// Order: body displacement, gripper logic at the new body position, held
/// object snaps to the body, free animals random-walk, then growth on contact.
pub fn step<R: Rng + ?Sized>(state: &WorldState, action: &Action, config: &WorldConfig, rng: &mut R) -> WorldState {
    let mut next = state.clone();
    next.body.pos = (state.body.pos + action.delta.limited(config.max_speed)).clamped();
    next.body.gripper = action.gripper;

    match action.gripper {
        Gripper::Open => {
            if let Some(i) = next.held.take() {
                next.objects[i].grasped = false;
            }
        }
        Gripper::Closed => {
            if next.held.is_none() {
                if let Some(i) = nearest_eligible(&next.body, &next.objects, config.agent_size) {
                    next.held = Some(i);
                    next.objects[i].grasped = true;
                }
            }
        }
    }
    if let Some(i) = next.held {
        next.objects[i].pos = next.body.pos;
    }

    // One draw per animal per step, held or not, so the rng stream does not
    // depend on the grasp state.
    for o in next.objects.iter_mut() {
        if o.kind.category() != Category::Animal {
            continue;
        }
        let a = config.animal_step;
        let d = Vec2::new(rng.gen_range(-a..=a), rng.gen_range(-a..=a));
        if !o.grasped {
            o.pos = (o.pos + d).clamped();
        }
    }

    let snapshot = next.objects.clone();
    for (i, o) in next.objects.iter_mut().enumerate() {
        let fed = snapshot
            .iter()
            .enumerate()
            .any(|(j, s)| j != i && s.kind.feeds(o.kind) && contact(s, &snapshot[i]));
        if fed {
            o.size = (o.size + config.growth_rate).min(config.max_size);
        }
    }
    next
}

/// Per-role feature rows: row 0 is the body (3 values), rows 1..=N are
/// objects (39 values each).
pub fn encode_features(state: &WorldState) -> Vec<Vec<f32>> {
    let mut rows = Vec::with_capacity(1 + state.objects.len());
    rows.push(encode_body(&state.body).to_vec());
    rows.extend(state.objects.iter().map(|o| encode_object(o).to_vec()));
    rows
}

pub fn encode_body(body: &BodyState) -> [f32; BODY_FEATURES] {
    [body.pos.x, body.pos.y, body.gripper.feature()]
}

pub fn encode_object(o: &ObjectState) -> [f32; OBJECT_FEATURES] {
    let mut row = [0.0; OBJECT_FEATURES];
    row[0] = o.pos.x;
    row[1] = o.pos.y;
    row[2] = o.size;
    row[3..6].copy_from_slice(&o.rgb);
    row[6 + o.kind.index()] = 1.0;
    row[OBJECT_FEATURES - 1] = if o.grasped { 1.0 } else { 0.0 };
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obj(x: f32, y: f32, size: f32, kind: ObjectType) -> ObjectState {
        ObjectState { pos: Vec2::new(x, y), size, rgb: [0.9, 0.1, 0.1], kind, grasped: false }
    }

    fn body_at(x: f32, y: f32) -> BodyState {
        BodyState { pos: Vec2::new(x, y), gripper: Gripper::Open }
    }

    #[test]
    fn catalogue_shape() {
        assert_eq!(ObjectType::ALL.len(), 32);
        for name in ["dog", "cat", "chameleon", "cactus", "bush", "algae", "door", "table"] {
            assert!(ObjectType::from_name(name).is_some(), "{name} missing");
        }
        let count = |c: Category| ObjectType::ALL.iter().filter(|t| c.contains(**t)).count();
        assert_eq!(count(Category::Animal), 10);
        assert_eq!(count(Category::Plant), 10);
        assert_eq!(count(Category::Furniture), 10);
        assert_eq!(count(Category::Supply), 2);
        assert_eq!(count(Category::LivingThing), 20);
    }

    #[test]
    fn grasp_threshold() {
        // threshold (0.05 + 0.2) / 2 = 0.125
        assert!(grasp_eligible(&body_at(0.0, 0.0), &obj(0.10, 0.0, 0.20, ObjectType::Dog), 0.05));
        let thr = (0.05f32 + 0.2) / 2.0;
        assert!(!grasp_eligible(&body_at(0.0, 0.0), &obj(thr, 0.0, 0.20, ObjectType::Dog), 0.05));
        assert!(!grasp_eligible(&body_at(-1.0, -1.0), &obj(1.0, 1.0, 0.3, ObjectType::Dog), 0.05));
    }

    #[test]
    fn contact_threshold() {
        assert!(contact(&obj(0.0, 0.0, 0.2, ObjectType::Water), &obj(0.19, 0.0, 0.2, ObjectType::Dog)));
        assert!(contact(&obj(0.3, 0.3, 0.2, ObjectType::Water), &obj(0.3, 0.3, 0.2, ObjectType::Dog)));
        assert!(!contact(&obj(-0.75, 0.0, 0.2, ObjectType::Water), &obj(0.75, 0.0, 0.2, ObjectType::Dog)));
    }

    #[test]
    fn init_is_deterministic_and_spread() {
        let cfg = WorldConfig::default();
        let a = init_world(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = init_world(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.body.pos, Vec2::ZERO);
        assert_eq!(a.body.gripper, Gripper::Open);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(a.objects[i].pos.distance(a.objects[j].pos) > 0.3);
            }
        }
    }

    #[test]
    fn placement_failure_is_reported() {
        let cfg = WorldConfig { min_initial_distance: 5.0, ..WorldConfig::default() };
        let err = init_world(&cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap_err();
        assert!(matches!(err, WorldError::Placement { .. }));
    }

    #[test]
    fn open_gripper_never_grasps() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = WorldState {
            body: body_at(-0.5, 0.0),
            objects: vec![obj(0.0, 0.0, 0.25, ObjectType::Table)],
            held: None,
        };
        for _ in 0..8 {
            s = step(&s, &Action { delta: Vec2::new(0.15, 0.0), gripper: Gripper::Open }, &cfg, &mut rng);
            assert!(!s.objects[0].grasped);
            assert!(s.held.is_none());
        }
    }

    #[test]
    fn grasp_picks_nearest_and_tracks_body() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = WorldState {
            body: body_at(0.0, 0.0),
            objects: vec![obj(0.1, 0.0, 0.3, ObjectType::Table), obj(0.05, 0.0, 0.3, ObjectType::Chair)],
            held: None,
        };
        let s = step(&s, &Action::idle(Gripper::Closed), &cfg, &mut rng);
        assert_eq!(s.held, Some(1));
        assert!(s.objects[1].grasped && !s.objects[0].grasped);
        assert_eq!(s.objects[1].pos, s.body.pos);
        let s = step(&s, &Action { delta: Vec2::new(0.0, 0.1), gripper: Gripper::Closed }, &cfg, &mut rng);
        assert_eq!(s.objects[1].pos, s.body.pos);
        let s = step(&s, &Action::idle(Gripper::Open), &cfg, &mut rng);
        assert_eq!(s.held, None);
        assert!(!s.objects[1].grasped);
    }

    #[test]
    fn growth_matches_scalar_recurrence() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = WorldState {
            body: body_at(-0.9, -0.9),
            objects: vec![obj(0.5, 0.5, 0.22, ObjectType::Cactus), obj(0.5, 0.55, 0.2, ObjectType::Water)],
            held: None,
        };
        let mut expected = 0.22f32;
        for _ in 0..20 {
            s = step(&s, &Action::idle(Gripper::Open), &cfg, &mut rng);
            expected = (expected + 0.01f32).min(0.35f32);
            assert_eq!(s.objects[0].size, expected);
            assert_eq!(s.objects[1].size, 0.2, "supplies never grow");
        }
        assert_eq!(s.objects[0].size, 0.35);
    }

    #[test]
    fn food_does_not_feed_plants() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = WorldState {
            body: body_at(-0.9, -0.9),
            objects: vec![obj(0.5, 0.5, 0.22, ObjectType::Rose), obj(0.5, 0.55, 0.2, ObjectType::Food)],
            held: None,
        };
        let s = step(&s, &Action::idle(Gripper::Open), &cfg, &mut rng);
        assert_eq!(s.objects[0].size, 0.22);
    }

    #[test]
    fn feature_rows() {
        let cfg = WorldConfig::default();
        let mut s = init_world(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        s.objects[2].grasped = true;
        let rows = encode_features(&s);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].len(), 3);
        assert_eq!(rows[0][2], -1.0);
        for (row, o) in rows[1..].iter().zip(&s.objects) {
            assert_eq!(row.len(), 39);
            let hot: Vec<usize> = (0..32).filter(|&k| row[6 + k] == 1.0).collect();
            assert_eq!(hot, vec![o.kind.index()]);
            assert_eq!(row[6..38].iter().sum::<f32>(), 1.0);
        }
        assert_eq!(rows[3][38], 1.0);
        assert_eq!(rows[1][38], 0.0);
    }

    #[test]
    fn color_regions_are_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for c in Color::ALL {
            for _ in 0..200 {
                let rgb = c.sample_rgb(&mut rng);
                assert_eq!(Color::of_rgb(rgb), Some(c));
            }
        }
    }
}
