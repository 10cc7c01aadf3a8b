//! Mixed-integer linear model produced by lowering.
//!
//! The model is deliberately plain: variables with bounds, linear constraints,
//! a minimisation objective, plus bookkeeping that ties variables back to the
//! energy-system topology (the flow registry and node table) so that solutions
//! can be reported in system terms rather than solver terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

/// Identifier of a variable inside one [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

/// A linear constraint `Σ coeff·var  rel  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// What a node of the system graph is; determines its shape on export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Bus(BusKind),
    Source,
    Sink,
    Converter,
    Storage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BusKind {
    /// Locally produced electricity.
    ElectricityLocal,
    /// Electricity available for consumption (grid supply plus local supply).
    ElectricityGrid,
    /// Heat at one temperature level (°C).
    HeatLevel(f64),
    /// Gas at one pressure level (bar).
    GasLevel(GasKind, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GasKind {
    NaturalGas,
    Hydrogen,
}

impl GasKind {
    pub fn key(self) -> &'static str {
        match self {
            GasKind::NaturalGas => "natural_gas",
            GasKind::Hydrogen => "hydrogen",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub kind: NodeKind,
    /// Nesting path for graph export: location, then carrier / component /
    /// demand group.
    pub cluster: Vec<String>,
    /// Human-readable label (graph export); node ids stay machine-oriented.
    pub label: String,
}

/// Keys of the fixed tag vocabulary attached to flow edges.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum TagKey {
    Location,
    Carrier,
    Component,
    Demand,
    Level,
    Origin,
}

impl TagKey {
    pub fn as_str(self) -> &'static str {
        match self {
            TagKey::Location => "location",
            TagKey::Carrier => "carrier",
            TagKey::Component => "component",
            TagKey::Demand => "demand",
            TagKey::Level => "level",
            TagKey::Origin => "origin",
        }
    }

    pub fn parse(s: &str) -> Option<TagKey> {
        Some(match s {
            "location" => TagKey::Location,
            "carrier" => TagKey::Carrier,
            "component" => TagKey::Component,
            "demand" => TagKey::Demand,
            "level" => TagKey::Level,
            "origin" => TagKey::Origin,
            _ => return None,
        })
    }
}

pub type TagSet = BTreeSet<(TagKey, String)>;

/// Physical interpretation of one flow variable: power moving from `source`
/// to `target` during interval `interval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEdge {
    pub interval: usize,
    pub source: String,
    pub target: String,
    pub tags: TagSet,
}

/// One interval of the model horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalInfo {
    pub start: NaiveDateTime,
    pub hours: f64,
}

/// The lowered optimisation model.
///
/// Lowering is deterministic: equal system specifications produce models that
/// serialise to identical bytes, and variable identifiers follow the naming
/// scheme `{location}.{node}.{detail}.{interval}` rather than allocation
/// order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimisation objective, as (variable, coefficient) terms.
    pub objective: Vec<(VarId, f64)>,
    /// System graph nodes by id.
    pub nodes: BTreeMap<String, NodeInfo>,
    /// Which physical flow each flow variable represents. Variables that are
    /// not physical flows (storage contents, indicators, peak power) do not
    /// appear here.
    pub flow_registry: BTreeMap<VarId, FlowEdge>,
    pub intervals: Vec<IntervalInfo>,
    #[serde(skip)]
    name_index: BTreeMap<String, VarId>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Adds a variable. Names must be unique within the model.
    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> VarId {
        let name = name.into();
        debug_assert!(
            !self.name_index.contains_key(&name),
            "duplicate variable name {name:?}"
        );
        let id = VarId(self.variables.len() as u32);
        self.name_index.insert(name.clone(), id);
        self.variables.push(Variable { name, kind, lower, upper });
        id
    }

    /// Adds a continuous variable fixed to a single value.
    pub fn add_fixed(&mut self, name: impl Into<String>, value: f64) -> VarId {
        self.add_variable(name, VarKind::Continuous, value, value)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint { name: name.into(), terms, relation, rhs });
    }

    pub fn add_objective_term(&mut self, var: VarId, coeff: f64) {
        if coeff != 0.0 {
            self.objective.push((var, coeff));
        }
    }

    pub fn add_node(
        &mut self,
        id: impl Into<String>,
        kind: NodeKind,
        cluster: Vec<String>,
        label: impl Into<String>,
    ) {
        let id = id.into();
        debug_assert!(!self.nodes.contains_key(&id), "duplicate node id {id:?}");
        self.nodes.insert(id, NodeInfo { kind, cluster, label: label.into() });
    }

    pub fn register_flow(
        &mut self,
        var: VarId,
        interval: usize,
        source: impl Into<String>,
        target: impl Into<String>,
        tags: TagSet,
    ) {
        self.flow_registry.insert(
            var,
            FlowEdge { interval, source: source.into(), target: target.into(), tags },
        );
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.name_index.get(name).copied().or_else(|| {
            // Models built by deserialisation or the LP re-parser have no
            // populated index; fall back to a scan.
            self.variables
                .iter()
                .position(|v| v.name == name)
                .map(|i| VarId(i as u32))
        })
    }

    /// Ids of all binary variables, ascending.
    pub fn binary_vars(&self) -> Vec<VarId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i as u32))
            .collect()
    }

    /// Evaluates the objective for a full assignment.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|(v, c)| c * values[v.index()]).sum()
    }

    /// Evaluates the left-hand side of a constraint for a full assignment.
    pub fn constraint_lhs(&self, c: &Constraint, values: &[f64]) -> f64 {
        c.terms.iter().map(|(v, a)| a * values[v.index()]).sum()
    }
}
