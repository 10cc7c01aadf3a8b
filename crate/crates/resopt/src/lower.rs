//! Lowering of a validated [`EnergySystem`] into a [`MilpModel`].
//!
//! Each carrier becomes a set of buses (two for electricity, one per
//! temperature or pressure level), each component a converter or storage
//! node with its conversion rows, each demand a fixed sink. Bus-balance
//! equalities (Σ in = Σ out per bus and interval) are emitted last. All
//! iteration runs over ordered maps and every variable/constraint name is
//! derived from the input (`{location}.{node}.{detail}.{t}`), so lowering
//! the same system twice yields byte-identical models.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::milp::{
    BusKind, GasKind, IntervalInfo, MilpModel, NodeKind, Relation, TagKey, TagSet, VarId, VarKind,
};
use crate::model::{
    AirHeatExchanger, Battery, Chp, ChpModel, Component, ComponentKind, Compressor,
    ElectricityCarrier, Electrolyzer, EnergySystem, GasCarrier, GasStorage, GeothermalSource,
    HeatCarrier, HeatPump, LayeredHeatStorage, Link, LinkCarrier, Location, MixedHeatStorage,
    RenewableSource, TimeSeries, ValidationReport,
};
use crate::model::Demand;
use crate::storage::{
    allocate_content, build_balance, build_layered_heat_storage, build_multi_level_storage,
    build_soc_dependent_charging, LayeredConfig, LevelSet, MultiLevelConfig, StorageError,
};

const INF: f64 = f64::INFINITY;

/// Switches that select between the model variants the formulation offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerOptions {
    /// Anchor storage level indicators to the end-of-interval content so a
    /// flow cannot cross its own level within one step.
    pub time_discrete: bool,
    /// Emit the strict level-exclusivity row `y + ȳ = 1`.
    pub strict_levels: bool,
    /// Force every storage to end the horizon at its initial content.
    pub cyclic_storage: bool,
}

impl Default for LowerOptions {
    fn default() -> Self {
        LowerOptions { time_discrete: true, strict_levels: false, cyclic_storage: false }
    }
}

#[derive(Debug, Error)]
pub enum LowerError {
    #[error("the system has validation issues:\n{0}")]
    UnvalidatedSystem(ValidationReport),
    #[error("heat pump lift from {source_temperature} °C to {sink_temperature} °C is not positive")]
    DegenerateLift { source_temperature: f64, sink_temperature: f64 },
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Coefficient of performance of a heat pump lifting heat from
/// `source` °C to `sink` °C: Carnot efficiency times a quality grade
/// calibrated so that `cop(0, 35, c) = c` exactly.
pub fn cop(source: f64, sink: f64, cop_0_35: f64) -> Result<f64, LowerError> {
    if sink <= source {
        return Err(LowerError::DegenerateLift {
            source_temperature: source,
            sink_temperature: sink,
        });
    }
    // Evaluated so numerator and denominator share the identical product
    // at the calibration point, making cop(0, 35, c) bit-exact.
    let numerator = (sink + 273.15) * 35.0;
    let denominator = (35.0 + 273.15) * (sink - source);
    Ok(cop_0_35 * (numerator / denominator))
}

/// Lowers a validated system into a complete MILP. Fails with the full
/// validation report if the system has issues.
pub fn lower(system: &EnergySystem, options: &LowerOptions) -> Result<MilpModel, LowerError> {
    let report = system.validate();
    if !report.is_empty() {
        return Err(LowerError::UnvalidatedSystem(report));
    }
    let mut lw = Lowerer::new(*options, system.time_index().intervals());
    for (name, location) in system.locations() {
        lw.lower_location(name, location)?;
    }
    for (i, link) in system.links().iter().enumerate() {
        lw.lower_link(i, link);
    }
    lw.emit_balances();
    Ok(lw.model)
}

fn fmt_level(v: f64) -> String {
    format!("{v}")
}

fn local_bus(loc: &str) -> String {
    format!("{loc}.electricity.local")
}

fn consumption_bus(loc: &str) -> String {
    format!("{loc}.electricity.consumption")
}

fn heat_bus(loc: &str, level: f64) -> String {
    format!("{loc}.heat.{}", fmt_level(level))
}

fn gas_bus(loc: &str, kind: GasKind, level: f64) -> String {
    format!("{loc}.gas.{}.{}", kind.key(), fmt_level(level))
}

fn gas_cluster(kind: GasKind) -> &'static str {
    match kind {
        GasKind::NaturalGas => "NaturalGas",
        GasKind::Hydrogen => "Hydrogen",
    }
}

fn tag_set(pairs: &[(TagKey, &str)]) -> TagSet {
    pairs.iter().map(|(k, v)| (*k, (*v).to_string())).collect()
}

struct Lowerer {
    opts: LowerOptions,
    model: MilpModel,
    intervals: Vec<IntervalInfo>,
    /// Per bus, per interval: signed balance terms (+ inflow, − outflow).
    balances: BTreeMap<String, Vec<Vec<(VarId, f64)>>>,
    /// Anergy draw variables per (location, source kind), per interval;
    /// filled by the heat-pump pass, consumed by the source's own pass.
    anergy: BTreeMap<(String, ComponentKind), Vec<Vec<VarId>>>,
}

impl Lowerer {
    fn new(opts: LowerOptions, intervals: Vec<IntervalInfo>) -> Lowerer {
        let mut model = MilpModel::new();
        model.intervals = intervals.clone();
        Lowerer { opts, model, intervals, balances: BTreeMap::new(), anergy: BTreeMap::new() }
    }

    fn nt(&self) -> usize {
        self.intervals.len()
    }

    fn dt(&self, t: usize) -> f64 {
        self.intervals[t].hours
    }

    fn add_bus(&mut self, id: &str, kind: BusKind, cluster: Vec<String>, label: String) {
        self.model.add_node(id, NodeKind::Bus(kind), cluster, label);
        self.balances.insert(id.to_string(), vec![Vec::new(); self.nt()]);
    }

    /// Registers an already-allocated variable as a flow edge and books it
    /// on the balances of whichever endpoints are buses.
    fn wire(&mut self, v: VarId, t: usize, source: &str, target: &str, tags: TagSet) -> VarId {
        self.model.register_flow(v, t, source, target, tags);
        if let Some(b) = self.balances.get_mut(source) {
            b[t].push((v, -1.0));
        }
        if let Some(b) = self.balances.get_mut(target) {
            b[t].push((v, 1.0));
        }
        v
    }

    /// Allocates a nonnegative flow variable and wires it.
    fn flow(
        &mut self,
        name: String,
        t: usize,
        source: &str,
        target: &str,
        upper: f64,
        tags: TagSet,
    ) -> VarId {
        let v = self.model.add_variable(name, VarKind::Continuous, 0.0, upper);
        self.wire(v, t, source, target, tags)
    }

    /// Allocates a flow variable pinned to a prescribed value and wires it.
    fn fixed_flow(
        &mut self,
        name: String,
        t: usize,
        source: &str,
        target: &str,
        value: f64,
        tags: TagSet,
    ) -> VarId {
        let v = self.model.add_fixed(name, value);
        self.wire(v, t, source, target, tags)
    }

    fn lower_location(&mut self, loc: &str, location: &Location) -> Result<(), LowerError> {
        if let Some(carrier) = location.electricity() {
            self.lower_electricity(loc, carrier);
        }
        if let Some(carrier) = location.heat() {
            self.lower_heat(loc, carrier);
        }
        for (kind, carrier) in location.gas_carriers() {
            self.lower_gas(loc, *kind, carrier);
        }
        for component in location.components().values() {
            match component {
                Component::HeatPump(c) => self.lower_heat_pump(loc, location, c)?,
                Component::AirHeatExchanger(c) => self.lower_air_heat_exchanger(loc, c),
                Component::GeothermalSource(c) => self.lower_geothermal(loc, c),
                Component::Chp(c) => self.lower_chp(loc, location, c),
                Component::RenewableSource(c) => self.lower_renewable(loc, c),
                Component::Electrolyzer(c) => self.lower_electrolyzer(loc, location, c),
                Component::Compressor(c) => self.lower_compressor(loc, location, c),
                Component::Battery(c) => self.lower_battery(loc, c)?,
                Component::MixedHeatStorage(c) => {
                    self.lower_mixed_heat_storage(loc, location, c)?
                }
                Component::LayeredHeatStorage(c) => {
                    self.lower_layered_heat_storage(loc, location, c)?
                }
                Component::GasStorage(c) => self.lower_gas_storage(loc, location, c)?,
            }
        }
        for (name, demand) in location.demands() {
            self.lower_demand(loc, location, name, demand);
        }
        Ok(())
    }

    fn lower_electricity(&mut self, loc: &str, carrier: &ElectricityCarrier) {
        let cluster = vec![loc.to_string(), "Electricity".to_string()];
        let local = local_bus(loc);
        let consumption = consumption_bus(loc);
        self.add_bus(&local, BusKind::ElectricityLocal, cluster.clone(), "local production".into());
        self.add_bus(&consumption, BusKind::ElectricityGrid, cluster.clone(), "consumption".into());
        for t in 0..self.nt() {
            self.flow(
                format!("{loc}.electricity.local_supply.{t}"),
                t,
                &local,
                &consumption,
                INF,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "electricity"),
                    (TagKey::Origin, "local"),
                ]),
            );
        }
        if let Some(price) = carrier.working_price {
            let grid = format!("{loc}.electricity.grid");
            self.model.add_node(&grid, NodeKind::Source, cluster.clone(), "grid");
            let mut draws = Vec::with_capacity(self.nt());
            for t in 0..self.nt() {
                let v = self.flow(
                    format!("{loc}.electricity.grid.{t}"),
                    t,
                    &grid,
                    &consumption,
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, "electricity"),
                        (TagKey::Origin, "grid"),
                    ]),
                );
                self.model.add_objective_term(v, price * self.dt(t));
                draws.push(v);
            }
            // Peak-power charge: one horizon-wide variable bounding every
            // interval's grid draw, priced per kW of peak.
            if carrier.demand_rate.is_some_and(|rate| rate > 0.0) {
                let rate = carrier.demand_rate.expect("checked above");
                let peak = self.model.add_variable(
                    format!("{loc}.electricity.peak"),
                    VarKind::Continuous,
                    0.0,
                    INF,
                );
                self.model.add_objective_term(peak, rate);
                for (t, &g) in draws.iter().enumerate() {
                    self.model.add_constraint(
                        format!("{loc}.electricity.peak.{t}"),
                        vec![(g, 1.0), (peak, -1.0)],
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
        if let Some(revenue) = carrier.feed_in_price {
            let sink = format!("{loc}.electricity.feed_in");
            self.model.add_node(&sink, NodeKind::Sink, cluster, "feed-in");
            for t in 0..self.nt() {
                let v = self.flow(
                    format!("{loc}.electricity.feed_in.{t}"),
                    t,
                    &local,
                    &sink,
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, "electricity"),
                        (TagKey::Origin, "local"),
                    ]),
                );
                self.model.add_objective_term(v, -revenue * self.dt(t));
            }
        }
    }

    fn lower_heat(&mut self, loc: &str, carrier: &HeatCarrier) {
        let cluster = vec![loc.to_string(), "Heat".to_string()];
        for &temp in &carrier.temperature_levels {
            self.add_bus(
                &heat_bus(loc, temp),
                BusKind::HeatLevel(temp),
                cluster.clone(),
                format!("{} °C", fmt_level(temp)),
            );
        }
        // Heat may always serve lower-temperature uses: free drop edges
        // between adjacent levels, downward only.
        for pair in carrier.temperature_levels.windows(2) {
            let (low, high) = (pair[0], pair[1]);
            for t in 0..self.nt() {
                self.flow(
                    format!("{loc}.heat.drop.{}.{t}", fmt_level(high)),
                    t,
                    &heat_bus(loc, high),
                    &heat_bus(loc, low),
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, "heat"),
                        (TagKey::Level, &fmt_level(high)),
                    ]),
                );
            }
        }
        // Surplus heat (e.g. returned by demands) cascades down the drop
        // edges and leaves through a free sink at the lowest level.
        let lowest = carrier.temperature_levels[0];
        let sink = format!("{loc}.heat.excess");
        self.model.add_node(&sink, NodeKind::Sink, cluster, "excess heat");
        for t in 0..self.nt() {
            self.flow(
                format!("{loc}.heat.excess.{t}"),
                t,
                &heat_bus(loc, lowest),
                &sink,
                INF,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "heat"),
                    (TagKey::Level, &fmt_level(lowest)),
                ]),
            );
        }
    }

    fn lower_gas(&mut self, loc: &str, kind: GasKind, carrier: &GasCarrier) {
        let cluster = vec![loc.to_string(), gas_cluster(kind).to_string()];
        for &p in &carrier.pressure_levels {
            self.add_bus(
                &gas_bus(loc, kind, p),
                BusKind::GasLevel(kind, p),
                cluster.clone(),
                format!("{} bar", fmt_level(p)),
            );
        }
        // Free expansion between adjacent levels, downward only; upward
        // needs a compressor.
        for pair in carrier.pressure_levels.windows(2) {
            let (low, high) = (pair[0], pair[1]);
            for t in 0..self.nt() {
                self.flow(
                    format!("{loc}.gas.{}.expand.{}.{t}", kind.key(), fmt_level(high)),
                    t,
                    &gas_bus(loc, kind, high),
                    &gas_bus(loc, kind, low),
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, kind.key()),
                        (TagKey::Level, &fmt_level(high)),
                    ]),
                );
            }
        }
        if let Some(price) = carrier.working_price {
            // Grid gas enters at the highest level and expands downward.
            let top = *carrier.pressure_levels.last().expect("validated: nonempty levels");
            let grid = format!("{loc}.gas.{}.grid", kind.key());
            self.model.add_node(&grid, NodeKind::Source, cluster, "grid");
            for t in 0..self.nt() {
                let v = self.flow(
                    format!("{loc}.gas.{}.grid.{t}", kind.key()),
                    t,
                    &grid,
                    &gas_bus(loc, kind, top),
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, kind.key()),
                        (TagKey::Origin, "grid"),
                        (TagKey::Level, &fmt_level(top)),
                    ]),
                );
                self.model.add_objective_term(v, price * self.dt(t));
            }
        }
    }

    fn lower_heat_pump(
        &mut self,
        loc: &str,
        location: &Location,
        hp: &HeatPump,
    ) -> Result<(), LowerError> {
        let node = format!("{loc}.HeatPump");
        self.model.add_node(
            &node,
            NodeKind::Converter,
            vec![loc.to_string(), "HeatPump".to_string()],
            "heat pump",
        );
        let heat = location.heat().expect("validated: heat carrier present");
        let consumption = consumption_bus(loc);
        let mut thermal: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); self.nt()];

        let sources: Vec<(ComponentKind, &TimeSeries)> =
            [ComponentKind::AirHeatExchanger, ComponentKind::GeothermalSource]
                .iter()
                .filter_map(|&kind| match location.component(kind) {
                    Some(Component::AirHeatExchanger(a)) => Some((kind, &a.air_temperature)),
                    Some(Component::GeothermalSource(g)) => Some((kind, &g.temperature)),
                    _ => None,
                })
                .collect();
        for (kind, temperatures) in sources {
            let key = kind.key();
            let source_node = format!("{loc}.{key}");
            let mut draws: Vec<Vec<VarId>> = vec![Vec::new(); self.nt()];
            for &level in &heat.temperature_levels {
                let lv = fmt_level(level);
                for t in 0..self.nt() {
                    let source_temp = temperatures.values[t];
                    // No converter when the source cannot lift to this
                    // level in this interval.
                    if source_temp >= level {
                        continue;
                    }
                    let c = cop(source_temp, level, hp.cop_0_35)?;
                    let el = self.flow(
                        format!("{loc}.HeatPump.el.{key}.{lv}.{t}"),
                        t,
                        &consumption,
                        &node,
                        INF,
                        tag_set(&[
                            (TagKey::Location, loc),
                            (TagKey::Carrier, "electricity"),
                            (TagKey::Component, "HeatPump"),
                        ]),
                    );
                    let q = self.flow(
                        format!("{loc}.HeatPump.heat.{key}.{lv}.{t}"),
                        t,
                        &node,
                        &heat_bus(loc, level),
                        INF,
                        tag_set(&[
                            (TagKey::Location, loc),
                            (TagKey::Carrier, "heat"),
                            (TagKey::Component, "HeatPump"),
                            (TagKey::Level, &lv),
                        ]),
                    );
                    let anergy = self.flow(
                        format!("{loc}.HeatPump.anergy.{key}.{lv}.{t}"),
                        t,
                        &source_node,
                        &node,
                        INF,
                        tag_set(&[(TagKey::Location, loc), (TagKey::Component, key)]),
                    );
                    self.model.add_constraint(
                        format!("{loc}.HeatPump.cop.{key}.{lv}.{t}"),
                        vec![(el, c), (q, -1.0)],
                        Relation::Eq,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("{loc}.HeatPump.balance.{key}.{lv}.{t}"),
                        vec![(q, 1.0), (el, -1.0), (anergy, -1.0)],
                        Relation::Eq,
                        0.0,
                    );
                    thermal[t].push((q, 1.0));
                    draws[t].push(anergy);
                }
            }
            self.anergy.insert((loc.to_string(), kind), draws);
        }
        if let Some(limit) = hp.thermal_power_limit {
            for (t, terms) in thermal.into_iter().enumerate() {
                if !terms.is_empty() {
                    self.model.add_constraint(
                        format!("{loc}.HeatPump.thermal_limit.{t}"),
                        terms,
                        Relation::Le,
                        limit,
                    );
                }
            }
        }
        Ok(())
    }

    fn lower_air_heat_exchanger(&mut self, loc: &str, c: &AirHeatExchanger) {
        self.model.add_node(
            format!("{loc}.AirHeatExchanger"),
            NodeKind::Source,
            vec![loc.to_string(), "AirHeatExchanger".to_string()],
            "air heat exchanger",
        );
        if let Some(limit) = &c.power_limit {
            let draws = self
                .anergy
                .get(&(loc.to_string(), ComponentKind::AirHeatExchanger))
                .cloned()
                .unwrap_or_default();
            for (t, vars) in draws.into_iter().enumerate() {
                if !vars.is_empty() {
                    self.model.add_constraint(
                        format!("{loc}.AirHeatExchanger.power_limit.{t}"),
                        vars.into_iter().map(|v| (v, 1.0)).collect(),
                        Relation::Le,
                        limit.values[t],
                    );
                }
            }
        }
    }

    fn lower_geothermal(&mut self, loc: &str, c: &GeothermalSource) {
        self.model.add_node(
            format!("{loc}.GeothermalSource"),
            NodeKind::Source,
            vec![loc.to_string(), "GeothermalSource".to_string()],
            "geothermal source",
        );
        let draws = self
            .anergy
            .get(&(loc.to_string(), ComponentKind::GeothermalSource))
            .cloned()
            .unwrap_or_default();
        for (t, vars) in draws.iter().enumerate() {
            if !vars.is_empty() {
                self.model.add_constraint(
                    format!("{loc}.GeothermalSource.power_limit.{t}"),
                    vars.iter().map(|&v| (v, 1.0)).collect(),
                    Relation::Le,
                    c.power_limit.values[t],
                );
            }
        }
        if let Some(total) = c.total_limit {
            let mut terms = Vec::new();
            for (t, vars) in draws.iter().enumerate() {
                let dt = self.dt(t);
                terms.extend(vars.iter().map(|&v| (v, dt)));
            }
            if !terms.is_empty() {
                self.model.add_constraint(
                    format!("{loc}.GeothermalSource.total_limit"),
                    terms,
                    Relation::Le,
                    total,
                );
            }
        }
    }

    fn lower_chp(&mut self, loc: &str, location: &Location, chp: &Chp) {
        let kind = location
            .resolve_gas(chp.gas, Some(GasKind::NaturalGas))
            .expect("validated: gas kind resolvable");
        let carrier = &location.gas_carriers()[&kind];
        // Combustion is pressure-indifferent; draw from the lowest level so
        // every supply path (grid at the top, storages) can reach it.
        let inlet = carrier.pressure_levels[0];
        let node = format!("{loc}.CHP");
        self.model.add_node(
            &node,
            NodeKind::Converter,
            vec![loc.to_string(), "CHP".to_string()],
            "CHP",
        );
        for t in 0..self.nt() {
            let gas = self.flow(
                format!("{loc}.CHP.gas.{t}"),
                t,
                &gas_bus(loc, kind, inlet),
                &node,
                chp.nominal_input,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, kind.key()),
                    (TagKey::Component, "CHP"),
                    (TagKey::Level, &fmt_level(inlet)),
                ]),
            );
            let el = self.flow(
                format!("{loc}.CHP.el.{t}"),
                t,
                &node,
                &local_bus(loc),
                INF,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "electricity"),
                    (TagKey::Component, "CHP"),
                    (TagKey::Origin, "local"),
                ]),
            );
            let heat = self.flow(
                format!("{loc}.CHP.heat.{t}"),
                t,
                &node,
                &heat_bus(loc, chp.outlet_temperature),
                INF,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "heat"),
                    (TagKey::Component, "CHP"),
                    (TagKey::Level, &fmt_level(chp.outlet_temperature)),
                ]),
            );
            match chp.model {
                ChpModel::ConstantEfficiency => {
                    self.model.add_constraint(
                        format!("{loc}.CHP.el_eff.{t}"),
                        vec![(el, 1.0), (gas, -chp.electrical_efficiency)],
                        Relation::Eq,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("{loc}.CHP.heat_eff.{t}"),
                        vec![(heat, 1.0), (gas, -chp.thermal_efficiency)],
                        Relation::Eq,
                        0.0,
                    );
                }
                ChpModel::OffsetLinear => {
                    let on = self.model.add_variable(
                        format!("{loc}.CHP.on.{t}"),
                        VarKind::Binary,
                        0.0,
                        1.0,
                    );
                    let nominal = chp.nominal_input;
                    let min_gas = chp.min_load.expect("validated: min_load present") * nominal;
                    // Affine outputs fitted through the min-load and
                    // full-load operating points.
                    let fit = |y_min: f64, y_full: f64| -> (f64, f64) {
                        let slope = (y_full - y_min) / (nominal - min_gas);
                        (slope, y_min - slope * min_gas)
                    };
                    let (a_el, c_el) = fit(
                        chp.min_load_electrical_efficiency.expect("validated") * min_gas,
                        chp.electrical_efficiency * nominal,
                    );
                    let (a_th, c_th) = fit(
                        chp.min_load_thermal_efficiency.expect("validated") * min_gas,
                        chp.thermal_efficiency * nominal,
                    );
                    self.model.add_constraint(
                        format!("{loc}.CHP.max_load.{t}"),
                        vec![(gas, 1.0), (on, -nominal)],
                        Relation::Le,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("{loc}.CHP.min_load.{t}"),
                        vec![(gas, 1.0), (on, -min_gas)],
                        Relation::Ge,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("{loc}.CHP.el_fit.{t}"),
                        vec![(el, 1.0), (gas, -a_el), (on, -c_el)],
                        Relation::Eq,
                        0.0,
                    );
                    self.model.add_constraint(
                        format!("{loc}.CHP.heat_fit.{t}"),
                        vec![(heat, 1.0), (gas, -a_th), (on, -c_th)],
                        Relation::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    fn lower_renewable(&mut self, loc: &str, c: &RenewableSource) {
        let node = format!("{loc}.RenewableSource");
        self.model.add_node(
            &node,
            NodeKind::Source,
            vec![loc.to_string(), "RenewableSource".to_string()],
            c.kind.key(),
        );
        for t in 0..self.nt() {
            // Curtailment allowed: the series is an upper bound, not a
            // fixed injection.
            self.flow(
                format!("{loc}.RenewableSource.{t}"),
                t,
                &node,
                &local_bus(loc),
                c.max_power.values[t],
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "electricity"),
                    (TagKey::Component, "RenewableSource"),
                    (TagKey::Origin, "local"),
                ]),
            );
        }
    }

    fn lower_electrolyzer(&mut self, loc: &str, location: &Location, c: &Electrolyzer) {
        let node = format!("{loc}.Electrolyzer");
        self.model.add_node(
            &node,
            NodeKind::Converter,
            vec![loc.to_string(), "Electrolyzer".to_string()],
            "electrolyzer",
        );
        let hydrogen = &location.gas_carriers()[&GasKind::Hydrogen];
        let h2_level = hydrogen
            .pressure_levels
            .iter()
            .rev()
            .find(|&&p| p <= c.output_pressure)
            .copied()
            .expect("validated: a level at or below the output pressure exists");
        // Waste heat goes to the hottest bus it can still heat; if the
        // carrier has no such level it is discarded through a free sink.
        let heat_target = location
            .heat()
            .and_then(|h| {
                h.temperature_levels.iter().rev().find(|&&t| t <= c.waste_heat_temperature)
            })
            .copied();
        let waste_sink = match heat_target {
            Some(_) => None,
            None => {
                let sink = format!("{loc}.Electrolyzer.waste");
                self.model.add_node(
                    &sink,
                    NodeKind::Sink,
                    vec![loc.to_string(), "Electrolyzer".to_string()],
                    "discarded waste heat",
                );
                Some(sink)
            }
        };
        let consumption = consumption_bus(loc);
        for t in 0..self.nt() {
            let el = self.flow(
                format!("{loc}.Electrolyzer.el.{t}"),
                t,
                &consumption,
                &node,
                c.nominal_power,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "electricity"),
                    (TagKey::Component, "Electrolyzer"),
                ]),
            );
            let h2 = self.flow(
                format!("{loc}.Electrolyzer.h2.{t}"),
                t,
                &node,
                &gas_bus(loc, GasKind::Hydrogen, h2_level),
                INF,
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, GasKind::Hydrogen.key()),
                    (TagKey::Component, "Electrolyzer"),
                    (TagKey::Level, &fmt_level(h2_level)),
                ]),
            );
            self.model.add_constraint(
                format!("{loc}.Electrolyzer.h2_eff.{t}"),
                vec![(h2, 1.0), (el, -c.hydrogen_efficiency)],
                Relation::Eq,
                0.0,
            );
            let heat = match (heat_target, &waste_sink) {
                (Some(level), _) => self.flow(
                    format!("{loc}.Electrolyzer.heat.{t}"),
                    t,
                    &node,
                    &heat_bus(loc, level),
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, "heat"),
                        (TagKey::Component, "Electrolyzer"),
                        (TagKey::Level, &fmt_level(level)),
                    ]),
                ),
                (None, Some(sink)) => {
                    let sink = sink.clone();
                    self.flow(
                        format!("{loc}.Electrolyzer.heat.{t}"),
                        t,
                        &node,
                        &sink,
                        INF,
                        tag_set(&[(TagKey::Location, loc), (TagKey::Component, "Electrolyzer")]),
                    )
                }
                (None, None) => unreachable!("waste sink created when no level fits"),
            };
            self.model.add_constraint(
                format!("{loc}.Electrolyzer.heat_eff.{t}"),
                vec![(heat, 1.0), (el, -c.waste_heat_efficiency)],
                Relation::Eq,
                0.0,
            );
        }
    }

    fn lower_compressor(&mut self, loc: &str, location: &Location, c: &Compressor) {
        let kind = location.resolve_gas(c.gas, None).expect("validated: gas kind resolvable");
        let levels = &location.gas_carriers()[&kind].pressure_levels;
        let node = format!("{loc}.Compressor");
        self.model.add_node(
            &node,
            NodeKind::Converter,
            vec![loc.to_string(), "Compressor".to_string()],
            "compressor",
        );
        let mut outlets = c.outlet_pressures.clone();
        outlets.sort_by(|a, b| a.partial_cmp(b).expect("validated: finite pressures"));
        outlets.dedup();
        // Every declared level strictly below an outlet may feed it.
        let pairs: Vec<(f64, f64)> = outlets
            .iter()
            .flat_map(|&out| {
                levels.iter().filter(move |&&p| p < out).map(move |&p| (p, out))
            })
            .collect();
        let consumption = consumption_bus(loc);
        for t in 0..self.nt() {
            let el = self.flow(
                format!("{loc}.Compressor.el.{t}"),
                t,
                &consumption,
                &node,
                c.power_limit.unwrap_or(INF),
                tag_set(&[
                    (TagKey::Location, loc),
                    (TagKey::Carrier, "electricity"),
                    (TagKey::Component, "Compressor"),
                ]),
            );
            let mut power_terms = vec![(el, 1.0)];
            for &(p_in, p_out) in &pairs {
                let (pi, po) = (fmt_level(p_in), fmt_level(p_out));
                let fin = self.flow(
                    format!("{loc}.Compressor.in.{pi}.{po}.{t}"),
                    t,
                    &gas_bus(loc, kind, p_in),
                    &node,
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, kind.key()),
                        (TagKey::Component, "Compressor"),
                        (TagKey::Level, &pi),
                    ]),
                );
                let fout = self.flow(
                    format!("{loc}.Compressor.out.{pi}.{po}.{t}"),
                    t,
                    &node,
                    &gas_bus(loc, kind, p_out),
                    INF,
                    tag_set(&[
                        (TagKey::Location, loc),
                        (TagKey::Carrier, kind.key()),
                        (TagKey::Component, "Compressor"),
                        (TagKey::Level, &po),
                    ]),
                );
                // Gas energy is conserved across the pressure lift.
                self.model.add_constraint(
                    format!("{loc}.Compressor.pass.{pi}.{po}.{t}"),
                    vec![(fout, 1.0), (fin, -1.0)],
                    Relation::Eq,
                    0.0,
                );
                // Isothermal compression work per unit of gas energy.
                power_terms.push((fin, -c.specific_work_coefficient * (p_out / p_in).ln()));
            }
            self.model.add_constraint(
                format!("{loc}.Compressor.power.{t}"),
                power_terms,
                Relation::Eq,
                0.0,
            );
        }
    }

    fn lower_battery(&mut self, loc: &str, battery: &Battery) -> Result<(), LowerError> {
        let name = format!("{loc}.Battery");
        self.model.add_node(
            &name,
            NodeKind::Storage,
            vec![loc.to_string(), "Battery".to_string()],
            "battery",
        );
        let nt = self.nt();
        let content =
            allocate_content(&mut self.model, &name, nt, battery.capacity, battery.initial_content);
        let consumption = consumption_bus(loc);
        let tags = tag_set(&[
            (TagKey::Location, loc),
            (TagKey::Carrier, "electricity"),
            (TagKey::Component, "Battery"),
        ]);
        let mut inflows: Vec<Vec<VarId>> = vec![Vec::new(); self.nt()];
        if battery.soc_bands.is_empty() {
            for t in 0..self.nt() {
                let v = self.flow(
                    format!("{name}.charge.{t}"),
                    t,
                    &consumption,
                    &name,
                    battery.charge_limit,
                    tags.clone(),
                );
                inflows[t].push(v);
            }
        } else {
            let bands: Vec<(f64, f64)> =
                battery.soc_bands.iter().map(|b| (b.soc, b.charge_limit)).collect();
            let charging = build_soc_dependent_charging(
                &mut self.model,
                &name,
                &self.intervals,
                &content,
                battery.capacity,
                battery.charge_limit,
                &bands,
                self.opts.time_discrete,
            )?;
            for t in 0..self.nt() {
                for v in charging.inflows(t) {
                    self.wire(v, t, &consumption, &name, tags.clone());
                    inflows[t].push(v);
                }
            }
        }
        let mut outflows: Vec<Vec<VarId>> = vec![Vec::new(); self.nt()];
        for t in 0..self.nt() {
            let v = self.flow(
                format!("{name}.discharge.{t}"),
                t,
                &name,
                &consumption,
                battery.discharge_limit,
                tags.clone(),
            );
            outflows[t].push(v);
        }
        build_balance(
            &mut self.model,
            &name,
            &self.intervals,
            &content,
            &inflows,
            &outflows,
            battery.loss_rate,
            battery.cyclic || self.opts.cyclic_storage,
        )?;
        Ok(())
    }

    fn lower_mixed_heat_storage(
        &mut self,
        loc: &str,
        location: &Location,
        storage: &MixedHeatStorage,
    ) -> Result<(), LowerError> {
        let heat = location.heat().expect("validated: heat carrier present");
        let levels = LevelSet::from_temperatures(
            &heat.temperature_levels,
            heat.reference_temperature,
            storage.capacity,
        )?;
        let name = format!("{loc}.MixedHeatStorage");
        self.model.add_node(
            &name,
            NodeKind::Storage,
            vec![loc.to_string(), "MixedHeatStorage".to_string()],
            "mixed heat storage",
        );
        let cfg = MultiLevelConfig {
            name: name.clone(),
            levels: &levels,
            intervals: &self.intervals,
            loss_rate: storage.loss_rate,
            initial_content: storage.initial_content,
            cyclic: storage.cyclic || self.opts.cyclic_storage,
            time_discrete: self.opts.time_discrete,
            strict: self.opts.strict_levels,
            level_output_limits: None,
            level_input_limits: None,
            aggregate_output_limit: None,
            aggregate_input_limit: None,
            weights: None,
        };
        let vars = build_multi_level_storage(&mut self.model, &cfg)?;
        for level in &vars.levels {
            let bus = heat_bus(loc, level.value);
            let tags = tag_set(&[
                (TagKey::Location, loc),
                (TagKey::Carrier, "heat"),
                (TagKey::Component, "MixedHeatStorage"),
                (TagKey::Level, &fmt_level(level.value)),
            ]);
            for (t, &v) in level.output.iter().enumerate() {
                self.wire(v, t, &name, &bus, tags.clone());
            }
            for (t, &v) in level.input.iter().enumerate() {
                self.wire(v, t, &bus, &name, tags.clone());
            }
        }
        Ok(())
    }

    fn lower_layered_heat_storage(
        &mut self,
        loc: &str,
        location: &Location,
        storage: &LayeredHeatStorage,
    ) -> Result<(), LowerError> {
        let heat = location.heat().expect("validated: heat carrier present");
        let name = format!("{loc}.LayeredHeatStorage");
        self.model.add_node(
            &name,
            NodeKind::Storage,
            vec![loc.to_string(), "LayeredHeatStorage".to_string()],
            "layered heat storage",
        );
        let cfg = LayeredConfig {
            name: name.clone(),
            temperature_levels: &heat.temperature_levels,
            reference_temperature: heat.reference_temperature,
            capacity: storage.capacity,
            intervals: &self.intervals,
            loss_rate: storage.loss_rate,
            initial_contents: storage.initial_contents.as_deref(),
            cyclic: storage.cyclic || self.opts.cyclic_storage,
        };
        let vars = build_layered_heat_storage(&mut self.model, &cfg)?;
        for (n, &temp) in vars.temperatures.clone().iter().enumerate() {
            let bus = heat_bus(loc, temp);
            let tags = tag_set(&[
                (TagKey::Location, loc),
                (TagKey::Carrier, "heat"),
                (TagKey::Component, "LayeredHeatStorage"),
                (TagKey::Level, &fmt_level(temp)),
            ]);
            for t in 0..self.nt() {
                self.wire(vars.outputs[n][t], t, &name, &bus, tags.clone());
                self.wire(vars.inputs[n][t], t, &bus, &name, tags.clone());
            }
        }
        Ok(())
    }

    fn lower_gas_storage(
        &mut self,
        loc: &str,
        location: &Location,
        storage: &GasStorage,
    ) -> Result<(), LowerError> {
        let kind = location.resolve_gas(storage.gas, None).expect("validated: gas kind resolvable");
        let carrier = &location.gas_carriers()[&kind];
        let levels =
            LevelSet::from_pressures(&carrier.pressure_levels, storage.c_e, storage.max_pressure)?;
        let name = format!("{loc}.GasStorage");
        self.model.add_node(
            &name,
            NodeKind::Storage,
            vec![loc.to_string(), "GasStorage".to_string()],
            "gas storage",
        );
        let cfg = MultiLevelConfig {
            name: name.clone(),
            levels: &levels,
            intervals: &self.intervals,
            loss_rate: storage.loss_rate,
            initial_content: storage.initial_content,
            cyclic: storage.cyclic || self.opts.cyclic_storage,
            time_discrete: self.opts.time_discrete,
            strict: self.opts.strict_levels,
            level_output_limits: storage.level_output_limits.as_deref(),
            level_input_limits: storage.level_input_limits.as_deref(),
            aggregate_output_limit: storage.aggregate_output_limit,
            aggregate_input_limit: storage.aggregate_input_limit,
            weights: storage.weights.as_deref(),
        };
        let vars = build_multi_level_storage(&mut self.model, &cfg)?;
        for level in &vars.levels {
            let bus = gas_bus(loc, kind, level.value);
            let tags = tag_set(&[
                (TagKey::Location, loc),
                (TagKey::Carrier, kind.key()),
                (TagKey::Component, "GasStorage"),
                (TagKey::Level, &fmt_level(level.value)),
            ]);
            for (t, &v) in level.output.iter().enumerate() {
                self.wire(v, t, &name, &bus, tags.clone());
            }
            for (t, &v) in level.input.iter().enumerate() {
                self.wire(v, t, &bus, &name, tags.clone());
            }
        }
        Ok(())
    }

    fn lower_demand(&mut self, loc: &str, location: &Location, name: &str, demand: &Demand) {
        let node = format!("{loc}.demand.{name}");
        let cluster = vec![loc.to_string(), name.to_string()];
        self.model.add_node(&node, NodeKind::Sink, cluster, name);
        match demand {
            Demand::Electricity { time_series } => {
                let consumption = consumption_bus(loc);
                for (t, &p) in time_series.values.iter().enumerate() {
                    self.fixed_flow(
                        format!("{node}.{t}"),
                        t,
                        &consumption,
                        &node,
                        p,
                        tag_set(&[
                            (TagKey::Location, loc),
                            (TagKey::Carrier, "electricity"),
                            (TagKey::Demand, name),
                        ]),
                    );
                }
            }
            Demand::FixedTemperatureHeat { flow_temperature, return_temperature, time_series } => {
                let heat = location.heat().expect("validated: heat carrier present");
                let reference = heat.reference_temperature;
                let (flow_t, return_t) = (*flow_temperature, *return_temperature);
                for (t, &p) in time_series.values.iter().enumerate() {
                    // Sensible-heat accounting relative to the reference:
                    // the net demand P splits into a draw at the flow
                    // temperature and an injection at the return one.
                    let draw = p * (flow_t - reference) / (flow_t - return_t);
                    self.fixed_flow(
                        format!("{node}.draw.{t}"),
                        t,
                        &heat_bus(loc, flow_t),
                        &node,
                        draw,
                        tag_set(&[
                            (TagKey::Location, loc),
                            (TagKey::Carrier, "heat"),
                            (TagKey::Demand, name),
                            (TagKey::Level, &fmt_level(flow_t)),
                        ]),
                    );
                    // A return at the reference temperature carries zero
                    // energy: no edge at all.
                    if return_t != reference {
                        let ret = p * (return_t - reference) / (flow_t - return_t);
                        self.fixed_flow(
                            format!("{node}.ret.{t}"),
                            t,
                            &node,
                            &heat_bus(loc, return_t),
                            ret,
                            tag_set(&[
                                (TagKey::Location, loc),
                                (TagKey::Carrier, "heat"),
                                (TagKey::Demand, name),
                                (TagKey::Level, &fmt_level(return_t)),
                            ]),
                        );
                    }
                }
            }
            Demand::Gas { gas, pressure, time_series } => {
                let kind =
                    location.resolve_gas(*gas, None).expect("validated: gas kind resolvable");
                let bus = gas_bus(loc, kind, *pressure);
                for (t, &p) in time_series.values.iter().enumerate() {
                    self.fixed_flow(
                        format!("{node}.{t}"),
                        t,
                        &bus,
                        &node,
                        p,
                        tag_set(&[
                            (TagKey::Location, loc),
                            (TagKey::Carrier, kind.key()),
                            (TagKey::Demand, name),
                            (TagKey::Level, &fmt_level(*pressure)),
                        ]),
                    );
                }
            }
        }
    }

    fn lower_link(&mut self, index: usize, link: &Link) {
        // Each direction is its own nonnegative flow; locally produced
        // electricity arrives as consumable energy on the other side.
        let (carrier_tag, bus_a, bus_b): (String, String, String) = match &link.carrier {
            LinkCarrier::Electricity => {
                ("electricity".to_string(), local_bus(&link.a), local_bus(&link.b))
            }
            LinkCarrier::Heat { temperature } => (
                "heat".to_string(),
                heat_bus(&link.a, *temperature),
                heat_bus(&link.b, *temperature),
            ),
            LinkCarrier::Gas { gas, pressure } => (
                gas.key().to_string(),
                gas_bus(&link.a, *gas, *pressure),
                gas_bus(&link.b, *gas, *pressure),
            ),
        };
        let electric = matches!(link.carrier, LinkCarrier::Electricity);
        let directions = [
            (&link.a, &link.b, bus_a.clone(), consumption_or(&bus_b, &link.b, electric), link.capacity_ab),
            (&link.b, &link.a, bus_b, consumption_or(&bus_a, &link.a, electric), link.capacity_ba),
        ];
        for (from, to, source, target, capacity) in directions {
            let tags = tag_set(&[
                (TagKey::Location, from),
                (TagKey::Location, to),
                (TagKey::Carrier, &carrier_tag),
            ]);
            for t in 0..self.nt() {
                self.flow(
                    format!("link.{index}.{from}.{to}.{t}"),
                    t,
                    &source,
                    &target,
                    capacity.unwrap_or(INF),
                    tags.clone(),
                );
            }
        }
    }

    /// Emits Σ in − Σ out = 0 for every bus and interval, buses in name
    /// order, as the final constraint block.
    fn emit_balances(&mut self) {
        let balances = std::mem::take(&mut self.balances);
        for (bus, per_interval) in balances {
            for (t, terms) in per_interval.into_iter().enumerate() {
                self.model.add_constraint(
                    format!("{bus}.balance.{t}"),
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }
}

/// For electricity links the receiving side is the consumption bus (the
/// sending side is the local-production bus); level carriers connect the
/// same bus on both sides.
fn consumption_or(level_bus: &str, loc: &str, electric: bool) -> String {
    if electric {
        consumption_bus(loc)
    } else {
        level_bus.to_string()
    }
}
