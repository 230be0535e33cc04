//! Episode traces stored as the flat feature tensor `T × (1+N) × 39`.
//!
//! Entity 0 is the body; its three features sit in the first three columns
//! of its row and the rest of the row is zero padding.

use serde::{Deserialize, Serialize};

use crate::error::TraceError;
use crate::world::{
    encode_body, encode_object, Color, Gripper, ObjectType, Vec2, WorldState, NUM_TYPES,
    OBJECT_FEATURES,
};

const TYPE_OFFSET: usize = 6;
const GRASP_COL: usize = OBJECT_FEATURES - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace", into = "RawTrace")]
pub struct Trace {
    episode_len: usize,
    n_objects: usize,
    kinds: Vec<ObjectType>,
    features: Vec<f32>,
}

/// Wire form of a trace; the type table is re-derived on load.
#[derive(Serialize, Deserialize)]
struct RawTrace {
    episode_len: usize,
    n_objects: usize,
    features: Vec<f32>,
}

impl TryFrom<RawTrace> for Trace {
    type Error = TraceError;
    fn try_from(raw: RawTrace) -> Result<Self, Self::Error> {
        Trace::from_features(raw.episode_len, raw.n_objects, raw.features)
    }
}

impl From<Trace> for RawTrace {
    fn from(t: Trace) -> Self {
        RawTrace { episode_len: t.episode_len, n_objects: t.n_objects, features: t.features }
    }
}

impl Trace {
    pub fn from_states(states: &[WorldState]) -> Result<Trace, TraceError> {
        let n = states.first().map_or(0, |s| s.objects.len());
        let mut features = Vec::with_capacity(states.len() * (n + 1) * OBJECT_FEATURES);
        for s in states {
            let mut body = [0.0; OBJECT_FEATURES];
            body[..3].copy_from_slice(&encode_body(&s.body));
            features.extend_from_slice(&body);
            for o in &s.objects {
                features.extend_from_slice(&encode_object(o));
            }
        }
        Trace::from_features(states.len(), n, features)
    }

    /// Validates and wraps a feature buffer.
    pub fn from_features(episode_len: usize, n_objects: usize, features: Vec<f32>) -> Result<Trace, TraceError> {
        if !(2..=64).contains(&episode_len) {
            return Err(TraceError::Length(episode_len));
        }
        let expected = episode_len * (n_objects + 1) * OBJECT_FEATURES;
        if features.len() != expected {
            return Err(TraceError::Shape { expected, got: features.len() });
        }
        let mut trace = Trace { episode_len, n_objects, kinds: Vec::new(), features };
        trace.kinds = (0..n_objects)
            .map(|i| {
                let row = trace.row(0, i + 1);
                let onehot = &row[TYPE_OFFSET..TYPE_OFFSET + NUM_TYPES];
                let hot: Vec<usize> = (0..NUM_TYPES).filter(|&k| onehot[k] == 1.0).collect();
                let exact = hot.len() == 1 && onehot.iter().filter(|&&v| v != 0.0).count() == 1;
                match (exact, hot.first()) {
                    (true, Some(&k)) => Ok(ObjectType::ALL[k]),
                    _ => Err(TraceError::BadType { object: i }),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(trace)
    }

    pub fn len(&self) -> usize {
        self.episode_len
    }

    pub fn is_empty(&self) -> bool {
        self.episode_len == 0
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn into_features(self) -> Vec<f32> {
        self.features
    }

    fn row(&self, t: usize, entity: usize) -> &[f32] {
        let start = (t * (self.n_objects + 1) + entity) * OBJECT_FEATURES;
        &self.features[start..start + OBJECT_FEATURES]
    }

    pub fn body_pos(&self, t: usize) -> Vec2 {
        let r = self.row(t, 0);
        Vec2::new(r[0], r[1])
    }

    pub fn gripper(&self, t: usize) -> Gripper {
        Gripper::from_feature(self.row(t, 0)[2])
    }

    pub fn kind(&self, obj: usize) -> ObjectType {
        self.kinds[obj]
    }

    pub fn pos(&self, t: usize, obj: usize) -> Vec2 {
        let r = self.row(t, obj + 1);
        Vec2::new(r[0], r[1])
    }

    pub fn size(&self, t: usize, obj: usize) -> f32 {
        self.row(t, obj + 1)[2]
    }

    pub fn rgb(&self, t: usize, obj: usize) -> [f32; 3] {
        let r = self.row(t, obj + 1);
        [r[3], r[4], r[5]]
    }

    /// Color word of an object, read from the first frame.
    pub fn color(&self, obj: usize) -> Option<Color> {
        Color::of_rgb(self.rgb(0, obj))
    }

    pub fn grasped(&self, t: usize, obj: usize) -> bool {
        self.row(t, obj + 1)[GRASP_COL] > 0.5
    }
}
