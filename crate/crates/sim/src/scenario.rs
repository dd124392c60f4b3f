//! Declarative scenario files.
//!
//! A scenario is a JSON document. Unknown keys are rejected, every reference
//! is resolved, and all problems found after a successful parse are reported
//! together, each with the line and column of the offending value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use gridsim_core::{
    AgentAttributes, DistributionSet, ElementSpec, ItemId, MaxSteps, ObstacleKind, Orientation, Pdm, PdmRef,
    RewardScheme, ShapeMatrix, VisionMode, VisionParams, VisionRange, WorldConfig, PRNG_NAME,
};
use jsonc_parser::ast::Value as Ast;
use jsonc_parser::common::Ranged;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hooks;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub world_size: usize,
    /// `null` or absent means unlimited.
    #[serde(default)]
    pub max_steps: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prng")]
    pub prng: String,
    #[serde(default)]
    pub reward_scheme: RewardSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pdms: BTreeMap<String, PdmSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<ObstacleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub foods: Vec<FoodEntry>,
    #[serde(default)]
    pub agents: Vec<AgentEntry>,
    /// Agent ids; defaults to the order agents are listed in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_order: Option<Vec<u32>>,
}

fn default_prng() -> String {
    PRNG_NAME.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSpec {
    #[serde(default = "RewardSpec::default_collision")]
    pub collision: f64,
    #[serde(default = "RewardSpec::default_food")]
    pub food: f64,
    #[serde(default = "RewardSpec::default_time_step")]
    pub time_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hook: Option<String>,
}

impl RewardSpec {
    fn default_collision() -> f64 {
        RewardScheme::default().collision
    }
    fn default_food() -> f64 {
        RewardScheme::default().food
    }
    fn default_time_step() -> f64 {
        RewardScheme::default().time_step
    }
}

impl Default for RewardSpec {
    fn default() -> Self {
        let d = RewardScheme::default();
        Self { collision: d.collision, food: d.food, time_step: d.time_step, hook: None }
    }
}

/// Spawn weights: an explicit grid, rectangular bands or a list of cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PdmSpec {
    Grid(Vec<Vec<f64>>),
    /// Applied in order; a later band overwrites earlier ones where they overlap.
    Bands(Vec<Band>),
    /// Equal weight on each listed `[row, col]`.
    Cells(Vec<[usize; 2]>),
}

/// Inclusive row and column ranges; an absent range spans the whole axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<[usize; 2]>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(w: &f64) -> bool {
    *w == 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKindSpec {
    Wall,
    Water,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleEntry {
    pub id: u32,
    pub kind: ObstacleKindSpec,
    /// Rows of 0/1; a single cell when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdm: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoodEntry {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdm: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    RandomWalker,
    Astar,
    /// Driven through the [`crate::Env`] API.
    External,
    Noop,
}

impl ControllerKind {
    pub fn is_builtin(self) -> bool {
        self != ControllerKind::External
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Allocentric,
    Egocentric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    #[default]
    North,
    South,
    East,
    West,
}

impl From<OrientationSpec> for Orientation {
    fn from(o: OrientationSpec) -> Self {
        match o {
            OrientationSpec::North => Orientation::North,
            OrientationSpec::South => Orientation::South,
            OrientationSpec::East => Orientation::East,
            OrientationSpec::West => Orientation::West,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisionSpec {
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default = "full_angle")]
    pub angle: f64,
    /// `-1` for unlimited.
    #[serde(default = "unlimited")]
    pub range: f64,
}

fn full_angle() -> f64 {
    360.0
}

fn unlimited() -> f64 {
    -1.0
}

impl Default for VisionSpec {
    fn default() -> Self {
        Self { mode: ModeSpec::Allocentric, angle: 360.0, range: -1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdm: Option<String>,
    #[serde(default = "unit_power")]
    pub power: i32,
    #[serde(default)]
    pub transparent: bool,
    #[serde(default)]
    pub vision: VisionSpec,
    #[serde(default)]
    pub orientation: OrientationSpec,
    pub controller: ControllerKind,
}

fn unit_power() -> i32 {
    1
}

/// One problem in a scenario document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    /// Dotted location such as `agents[1].pdm`; empty for the document root.
    pub path: String,
    /// 1-based; 0 when unknown.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>" } else { &self.path };
        write!(f, "{}:{}: {}: {}", self.line, self.column, path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{}", render_all(.0))]
    Schema(Vec<SchemaError>),
}

fn render_all(errors: &[SchemaError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")
}

#[derive(Clone, Debug, PartialEq)]
enum Seg {
    Key(&'static str),
    Name(String),
    Index(usize),
}

fn render_path(path: &[Seg]) -> String {
    let mut s = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) => {
                if !s.is_empty() {
                    s.push('.');
                }
                s.push_str(k);
            }
            Seg::Name(k) => {
                if !s.is_empty() {
                    s.push('.');
                }
                s.push_str(k);
            }
            Seg::Index(i) => s.push_str(&format!("[{i}]")),
        }
    }
    s
}

/// Byte offset of the deepest node along `path` that exists in the document.
fn locate(ast: Option<&Ast<'_>>, path: &[Seg]) -> Option<usize> {
    let mut node = ast?;
    let mut at = node.start();
    for seg in path {
        let next = match (seg, node) {
            (Seg::Key(k), Ast::Object(o)) => o.get(k).map(|p| &p.value),
            (Seg::Name(k), Ast::Object(o)) => o.get(k).map(|p| &p.value),
            (Seg::Index(i), Ast::Array(a)) => a.elements.get(*i),
            _ => None,
        };
        match next {
            Some(n) => {
                node = n;
                at = n.start();
            }
            None => break,
        }
    }
    Some(at)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

struct Collector {
    found: Vec<(Vec<Seg>, String)>,
}

impl Collector {
    fn push(&mut self, path: Vec<Seg>, message: impl Into<String>) {
        self.found.push((path, message.into()));
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<SchemaError>> {
    let mut de = serde_json::Deserializer::from_str(text);
    let structural = |path: String, inner: serde_json::Error| {
        vec![SchemaError {
            path: if path == "." { String::new() } else { path },
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }]
    };
    let scenario: Scenario = match serde_path_to_error::deserialize(&mut de) {
        Ok(s) => s,
        Err(e) => {
            let path = e.path().to_string();
            return Err(structural(path, e.into_inner()));
        }
    };
    if let Err(e) = de.end() {
        return Err(structural(String::new(), e));
    }
    let problems = scenario.problems();
    if problems.is_empty() {
        return Ok(scenario);
    }
    let ast = jsonc_parser::parse_to_ast(text, &Default::default(), &Default::default()).ok().and_then(|r| r.value);
    Err(problems
        .into_iter()
        .map(|(path, message)| {
            let (line, column) = locate(ast.as_ref(), &path).map_or((0, 0), |o| line_col(text, o));
            SchemaError { path: render_path(&path), line, column, message }
        })
        .collect())
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text).map_err(ScenarioError::Schema)
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// SHA-256 over the compact serialisation, as lowercase hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serialises");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn action_order(&self) -> Vec<ItemId> {
        match &self.action_order {
            Some(order) => order.iter().map(|&i| ItemId(i)).collect(),
            None => self.agents.iter().map(|a| ItemId(a.id)).collect(),
        }
    }

    /// Agents in action order.
    pub fn agents_in_order(&self) -> Vec<&AgentEntry> {
        self.action_order().iter().filter_map(|id| self.agents.iter().find(|a| a.id == id.0)).collect()
    }

    pub fn max_steps(&self) -> MaxSteps {
        self.max_steps.map_or(MaxSteps::Unlimited, MaxSteps::Limited)
    }

    fn problems(&self) -> Vec<(Vec<Seg>, String)> {
        let mut c = Collector { found: Vec::new() };
        let n = self.world_size;
        if n == 0 {
            c.push(vec![Seg::Key("world_size")], "must be at least 1");
        }
        if self.max_steps == Some(0) {
            c.push(vec![Seg::Key("max_steps")], "must be positive or null for unlimited");
        }
        if self.prng != PRNG_NAME {
            c.push(vec![Seg::Key("prng")], format!("unsupported generator `{}`; expected `{PRNG_NAME}`", self.prng));
        }
        if let Some(h) = &self.reward_scheme.hook {
            if hooks::by_name(h).is_none() {
                c.push(
                    vec![Seg::Key("reward_scheme"), Seg::Key("hook")],
                    format!("unknown hook `{h}`; known: {}", hooks::NAMES.join(", ")),
                );
            }
        }
        for (name, spec) in &self.pdms {
            let at = vec![Seg::Key("pdms"), Seg::Name(name.clone())];
            if n > 0 {
                if let Err(msg) = spec.expand(n) {
                    c.push(at, msg);
                }
            }
        }

        let mut ids = BTreeSet::new();
        let check_ref = |c: &mut Collector, path: Vec<Seg>, pdm: &Option<String>| {
            if let Some(p) = pdm {
                if !self.pdms.contains_key(p) {
                    c.push(path, format!("undefined pdm `{p}`"));
                }
            }
        };
        for (i, o) in self.obstacles.iter().enumerate() {
            let at = |k| vec![Seg::Key("obstacles"), Seg::Index(i), Seg::Key(k)];
            if !ids.insert(o.id) {
                c.push(at("id"), format!("duplicate id {}", o.id));
            }
            check_ref(&mut c, at("pdm"), &o.pdm);
            if let Some(rows) = &o.shape {
                if let Err(msg) = shape_from_rows(rows) {
                    c.push(at("shape"), msg);
                }
            }
        }
        for (i, f) in self.foods.iter().enumerate() {
            let at = |k| vec![Seg::Key("foods"), Seg::Index(i), Seg::Key(k)];
            if !ids.insert(f.id) {
                c.push(at("id"), format!("duplicate id {}", f.id));
            }
            check_ref(&mut c, at("pdm"), &f.pdm);
        }
        for (i, a) in self.agents.iter().enumerate() {
            let at = |k| vec![Seg::Key("agents"), Seg::Index(i), Seg::Key(k)];
            if !ids.insert(a.id) {
                c.push(at("id"), format!("duplicate id {}", a.id));
            }
            check_ref(&mut c, at("pdm"), &a.pdm);
            if !(0.0..=360.0).contains(&a.vision.angle) {
                c.push(vec![Seg::Key("agents"), Seg::Index(i), Seg::Key("vision"), Seg::Key("angle")], "must lie in [0, 360]");
            }
            if VisionRange::from_limit(a.vision.range).is_err() {
                c.push(
                    vec![Seg::Key("agents"), Seg::Index(i), Seg::Key("vision"), Seg::Key("range")],
                    "must be positive or -1 for unlimited",
                );
            }
        }
        if let Some(order) = &self.action_order {
            let agents: BTreeSet<u32> = self.agents.iter().map(|a| a.id).collect();
            let mut seen = BTreeSet::new();
            for (i, id) in order.iter().enumerate() {
                let at = vec![Seg::Key("action_order"), Seg::Index(i)];
                if !agents.contains(id) {
                    c.push(at, format!("{id} is not an agent id"));
                } else if !seen.insert(*id) {
                    c.push(at, format!("agent {id} listed twice"));
                }
            }
            for a in &agents {
                if !seen.contains(a) && order.iter().all(|id| agents.contains(id)) {
                    c.push(vec![Seg::Key("action_order")], format!("agent {a} missing"));
                }
            }
        }
        let placed = self.agents.len() + self.foods.len() + self.obstacles.len();
        if n > 0 && placed > n * n {
            c.push(vec![], format!("{placed} elements cannot fit on {n}x{n} cells"));
        }
        c.found
    }

    /// Engine configuration, spawn distributions and element registrations.
    pub fn world_parts(&self, seed: u64, max_steps: MaxSteps) -> (WorldConfig, DistributionSet, Vec<ElementSpec>) {
        let n = self.world_size;
        let mut scheme =
            RewardScheme::new(self.reward_scheme.collision, self.reward_scheme.food, self.reward_scheme.time_step);
        if let Some(h) = self.reward_scheme.hook.as_deref().and_then(hooks::by_name) {
            scheme = scheme.with_hook(h);
        }
        let config = WorldConfig { world_size: n, max_steps, reward_scheme: scheme, action_order: self.action_order(), seed };
        let mut dists = DistributionSet::new();
        for (name, spec) in &self.pdms {
            dists.insert(name.clone(), spec.expand(n).expect("validated"));
        }
        let pdm = |p: &Option<String>| p.clone().map_or(PdmRef::Uniform, PdmRef::Named);
        let mut specs = Vec::new();
        for a in &self.agents {
            let mode = match a.vision.mode {
                ModeSpec::Allocentric => VisionMode::Allocentric,
                ModeSpec::Egocentric => VisionMode::Egocentric,
            };
            let range = VisionRange::from_limit(a.vision.range).expect("validated");
            let attrs = AgentAttributes {
                power: a.power,
                transparent: a.transparent,
                vision: VisionParams::new(mode, a.vision.angle, range).expect("validated"),
                orientation: a.orientation.into(),
            };
            specs.push(ElementSpec::agent(ItemId(a.id), attrs, pdm(&a.pdm)));
        }
        for f in &self.foods {
            specs.push(ElementSpec::food(ItemId(f.id), pdm(&f.pdm)));
        }
        for o in &self.obstacles {
            let kind = match o.kind {
                ObstacleKindSpec::Wall => ObstacleKind::Wall,
                ObstacleKindSpec::Water => ObstacleKind::Water,
            };
            let shape = o.shape.as_deref().map_or_else(ShapeMatrix::single, |r| shape_from_rows(r).expect("validated"));
            specs.push(ElementSpec::obstacle(ItemId(o.id), kind, shape, pdm(&o.pdm)));
        }
        (config, dists, specs)
    }
}

fn shape_from_rows(rows: &[Vec<u8>]) -> Result<ShapeMatrix, String> {
    if rows.iter().flatten().any(|&b| b > 1) {
        return Err("shape cells must be 0 or 1".into());
    }
    ShapeMatrix::from_bits(rows).map_err(|e| e.to_string())
}

impl PdmSpec {
    /// Normalised N×N weights.
    pub fn expand(&self, n: usize) -> Result<Pdm, String> {
        let weights = match self {
            PdmSpec::Grid(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
                    return Err(format!("grid must be {n}x{n}, got {}x{cols}", rows.len()));
                }
                rows.concat()
            }
            PdmSpec::Bands(bands) => {
                let mut w = vec![0.0; n * n];
                for (k, b) in bands.iter().enumerate() {
                    let span = |r: Option<[usize; 2]>, axis: &str| -> Result<(usize, usize), String> {
                        let [lo, hi] = r.unwrap_or([0, n - 1]);
                        if lo > hi || hi >= n {
                            return Err(format!("band {k}: {axis} [{lo}, {hi}] outside 0..{}", n - 1));
                        }
                        Ok((lo, hi))
                    };
                    let (r0, r1) = span(b.rows, "rows")?;
                    let (c0, c1) = span(b.cols, "cols")?;
                    for r in r0..=r1 {
                        for c in c0..=c1 {
                            w[r * n + c] = b.weight;
                        }
                    }
                }
                w
            }
            PdmSpec::Cells(cells) => {
                let mut w = vec![0.0; n * n];
                for [r, c] in cells {
                    if *r >= n || *c >= n {
                        return Err(format!("cell [{r}, {c}] outside the {n}x{n} board"));
                    }
                    w[r * n + c] = 1.0;
                }
                w
            }
        };
        Pdm::normalize(n, &weights).map_err(|e| e.to_string())
    }
}
