//! Scripted policy producing grasp / grow / shake episodes in present or
//! past tense.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BotError, WorldError};
use crate::grammar::{HeadWord, Predicate, SentenceAst, Tense};
use crate::trace::Trace;
use crate::world::{
    self, contact, init_world, nearest_eligible, Action, BodyState, Gripper, Vec2, WorldConfig, WorldState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Grasp,
    Grow,
    Shake,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::Grasp, ScenarioKind::Grow, ScenarioKind::Shake];

    pub fn predicate(self) -> Predicate {
        match self {
            ScenarioKind::Grasp => Predicate::Grasp,
            ScenarioKind::Grow => Predicate::Grow,
            ScenarioKind::Shake => Predicate::Shake,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub target: usize,
    /// When set, the episode ends after the predicate stopped holding.
    pub past: bool,
    /// Supply carried to the target (grow only).
    pub supply: Option<usize>,
}

impl Scenario {
    /// The description the scenario is meant to make true, e.g. `was grasp dog`.
    pub fn sentence(&self, trace: &Trace) -> SentenceAst {
        let tense = if self.past { Tense::Past } else { Tense::Present };
        SentenceAst::attr(tense, self.kind.predicate(), None, HeadWord::Type(trace.kind(self.target)))
    }
}

/// Optional constraints on the scenario drawn for an episode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioHint {
    pub kind: Option<ScenarioKind>,
    pub past: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BotConfig {
    /// |dx| of each shake stroke.
    pub shake_amplitude: f32,
    /// Strokes before a past-tense shake is released.
    pub shake_steps: usize,
    /// Steps a past-tense grasp is held before release.
    pub hold_steps: usize,
    /// Contact steps before a past-tense grow is broken off.
    pub grow_contact_steps: usize,
    /// Extra distance beyond contact range kept while waiting near a target.
    pub stage_margin: f32,
    /// Steps before the end at which a present-tense grow closes in.
    pub approach_lead: usize,
    /// Travel budget (in max-speed steps) for fetching a supply and reaching the target.
    pub travel_budget_steps: usize,
    pub max_world_attempts: usize,
}

impl Default for BotConfig {
    fn default() -> Self {
        BotConfig {
            shake_amplitude: 0.1,
            shake_steps: 6,
            hold_steps: 2,
            grow_contact_steps: 2,
            stage_margin: 0.1,
            approach_lead: 3,
            travel_budget_steps: 16,
            max_world_attempts: 200,
        }
    }
}

/// Growth steps a present-tense grow needs left before the target caps out.
const GROW_HEADROOM_STEPS: f32 = 4.0;

fn grow_pairs(state: &WorldState, world: &WorldConfig, bot: &BotConfig) -> Vec<(usize, usize)> {
    let budget = bot.travel_budget_steps as f32 * world.max_speed;
    let mut pairs = Vec::new();
    for (t, target) in state.objects.iter().enumerate() {
        if target.size > world.max_size - GROW_HEADROOM_STEPS * world.growth_rate {
            continue;
        }
        for (s, supply) in state.objects.iter().enumerate() {
            if s == t || !supply.kind.feeds(target.kind) {
                continue;
            }
            let travel = state.body.pos.distance(supply.pos) + supply.pos.distance(target.pos);
            if travel <= budget {
                pairs.push((t, s));
            }
        }
    }
    pairs
}

/// Draws a feasible scenario for `state`: kind uniform over feasible kinds,
/// target uniform over feasible targets, past tense with probability 0.5.
pub fn sample_scenario<R: Rng + ?Sized>(
    state: &WorldState,
    world: &WorldConfig,
    bot: &BotConfig,
    hint: ScenarioHint,
    rng: &mut R,
) -> Result<Scenario, BotError> {
    if state.objects.is_empty() {
        return Err(BotError::Infeasible);
    }
    let pairs = grow_pairs(state, world, bot);
    let kinds: Vec<ScenarioKind> = ScenarioKind::ALL
        .into_iter()
        .filter(|k| *k != ScenarioKind::Grow || !pairs.is_empty())
        .collect();
    let kind = match hint.kind {
        Some(k) if kinds.contains(&k) => k,
        Some(_) => return Err(BotError::Infeasible),
        None => *kinds.choose(rng).expect("grasp is always feasible"),
    };
    let (target, supply) = match kind {
        ScenarioKind::Grow => {
            let (t, s) = *pairs.choose(rng).expect("checked non-empty");
            (t, Some(s))
        }
        _ => (rng.gen_range(0..state.objects.len()), None),
    };
    let past = match hint.past {
        Some(p) => p,
        None => rng.gen_bool(0.5),
    };
    Ok(Scenario { kind, target, past, supply })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Approach,
    Hold,
    Shake,
    Stage,
    Pursue,
    Flee,
    Idle,
}

/// Waypoint controller realizing one scenario.
#[derive(Debug, Clone)]
pub struct ScriptedBot {
    scenario: Scenario,
    world: WorldConfig,
    config: BotConfig,
    phase: Phase,
    counter: usize,
    stroke: f32,
}

impl ScriptedBot {
    pub fn new(scenario: Scenario, world: WorldConfig, config: BotConfig) -> Self {
        ScriptedBot { scenario, world, config, phase: Phase::Approach, counter: 0, stroke: 1.0 }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// The object grasped first: the supply for grow, else the target.
    fn carried(&self) -> usize {
        self.scenario.supply.unwrap_or(self.scenario.target)
    }

    /// Action for the state at (0-based) step `t`; it produces step `t + 1`.
    pub fn act(&mut self, state: &WorldState, t: usize) -> Action {
        let last = self.world.episode_len - 1;
        if self.phase == Phase::Approach && state.held == Some(self.carried()) {
            self.counter = 0;
            self.phase = match self.scenario.kind {
                ScenarioKind::Grasp => Phase::Hold,
                ScenarioKind::Shake => {
                    let x = state.body.pos.x;
                    self.stroke = if x > 0.0 { -1.0 } else { 1.0 };
                    Phase::Shake
                }
                ScenarioKind::Grow if self.scenario.past => Phase::Pursue,
                ScenarioKind::Grow => Phase::Stage,
            };
        }
        if self.phase == Phase::Stage && t + self.config.approach_lead >= last {
            self.phase = Phase::Pursue;
        }

        match self.phase {
            Phase::Approach => self.approach(state, self.carried()),
            Phase::Hold => {
                if !self.scenario.past {
                    return Action::idle(Gripper::Closed);
                }
                self.counter += 1;
                if self.counter > self.config.hold_steps {
                    self.phase = Phase::Idle;
                    Action::idle(Gripper::Open)
                } else {
                    Action::idle(Gripper::Closed)
                }
            }
            Phase::Shake => {
                if self.scenario.past && self.counter >= self.config.shake_steps {
                    self.phase = Phase::Idle;
                    return Action::idle(Gripper::Open);
                }
                self.counter += 1;
                let delta = Vec2::new(self.stroke * self.config.shake_amplitude, 0.0);
                self.stroke = -self.stroke;
                Action { delta, gripper: Gripper::Closed }
            }
            Phase::Stage => {
                let target = &state.objects[self.scenario.target];
                let supply = &state.objects[self.carried()];
                let away = state.body.pos - target.pos;
                let dir = if away.norm() > 1e-6 { away * (1.0 / away.norm()) } else { Vec2::new(1.0, 0.0) };
                let standoff = (target.size + supply.size) / 2.0 + self.config.stage_margin;
                let goal = (target.pos + dir * standoff).clamped();
                Action { delta: goal - state.body.pos, gripper: Gripper::Closed }
            }
            Phase::Pursue => {
                let target = &state.objects[self.scenario.target];
                if self.scenario.past && contact(&state.objects[self.carried()], target) {
                    self.counter += 1;
                    if self.counter >= self.config.grow_contact_steps {
                        self.phase = Phase::Flee;
                        return self.flee(state);
                    }
                }
                Action { delta: target.pos - state.body.pos, gripper: Gripper::Closed }
            }
            Phase::Flee => self.flee(state),
            Phase::Idle => Action::idle(Gripper::Open),
        }
    }

    /// Moves onto `obj` and closes the gripper on the step where `obj`
    /// becomes the nearest grasp-eligible object.
    fn approach(&self, state: &WorldState, obj: usize) -> Action {
        let delta = state.objects[obj].pos - state.body.pos;
        let predicted = BodyState {
            pos: (state.body.pos + delta.limited(self.world.max_speed)).clamped(),
            gripper: Gripper::Closed,
        };
        let close = nearest_eligible(&predicted, &state.objects, self.world.agent_size) == Some(obj);
        Action { delta, gripper: if close { Gripper::Closed } else { Gripper::Open } }
    }

    /// Steps to the reachable point farthest from the target.
    fn flee(&self, state: &WorldState) -> Action {
        let target = state.objects[self.scenario.target].pos;
        let speed = self.world.max_speed;
        let best = (0..16)
            .map(|k| {
                let a = k as f32 * std::f32::consts::TAU / 16.0;
                Vec2::new(a.cos() * speed, a.sin() * speed)
            })
            .chain(std::iter::once(Vec2::ZERO))
            .max_by(|a, b| {
                let da = (state.body.pos + *a).clamped().distance(target);
                let db = (state.body.pos + *b).clamped().distance(target);
                da.total_cmp(&db)
            })
            .expect("non-empty candidate set");
        Action { delta: best, gripper: Gripper::Closed }
    }
}

/// A generated episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub scenario: Scenario,
    pub states: Vec<WorldState>,
    pub trace: Trace,
}

/// Runs one scenario from a given initial world.
pub fn run_scenario<R: Rng + ?Sized>(
    initial: WorldState,
    scenario: Scenario,
    world: &WorldConfig,
    bot: &BotConfig,
    rng: &mut R,
) -> Episode {
    let mut controller = ScriptedBot::new(scenario, world.clone(), bot.clone());
    let mut states = Vec::with_capacity(world.episode_len);
    states.push(initial);
    for t in 0..world.episode_len - 1 {
        let current = &states[t];
        let action = controller.act(current, t);
        let next = world::step(current, &action, world, rng);
        states.push(next);
    }
    let trace = Trace::from_states(&states).expect("simulated states are well formed");
    Episode { scenario, states, trace }
}

/// Samples a world and a scenario (retrying infeasible worlds) and plays it out.
pub fn rollout<R: Rng + ?Sized>(
    world: &WorldConfig,
    bot: &BotConfig,
    hint: ScenarioHint,
    rng: &mut R,
) -> Result<Episode, BotError> {
    world.validate()?;
    for _ in 0..bot.max_world_attempts {
        let initial = match init_world(world, rng) {
            Ok(s) => s,
            Err(WorldError::Placement { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        match sample_scenario(&initial, world, bot, hint, rng) {
            Ok(scenario) => return Ok(run_scenario(initial, scenario, world, bot, rng)),
            Err(BotError::Infeasible) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(BotError::RetriesExhausted(bot.max_world_attempts))
}
