//! Declarative domain model: an energy system is a set of named locations,
//! each carrying energy carriers (electricity, heat with temperature levels,
//! gases with pressure levels), conversion/storage components, and demands,
//! plus optional inter-location links.
//!
//! Construction is order-independent; [`EnergySystem::validate`] checks all
//! cross-references and numeric sanity rules and returns a report. An empty
//! report means the system can be lowered to an optimisation model.

pub mod time;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::time::{TimeError, TimeIndex, TimeSeries};
pub use crate::milp::GasKind;

/// Errors raised by the builder API (uniqueness rules only; everything else
/// is deferred to [`EnergySystem::validate`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("location {0:?} is already defined")]
    DuplicateLocation(String),
    #[error("carrier {0} is already defined for this location")]
    DuplicateCarrier(String),
    #[error("component {0} is already defined for this location")]
    DuplicateComponent(String),
    #[error("demand {0:?} is already defined for this location")]
    DuplicateDemandName(String),
}

/// Grid tariff structure of the electricity carrier. Absence of every price
/// means island operation (no grid connection).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ElectricityCarrier {
    /// Cost per unit of energy purchased from the grid; `None` disables
    /// purchasing entirely.
    pub working_price: Option<f64>,
    /// Cost per unit of peak grid power over the whole horizon.
    pub demand_rate: Option<f64>,
    /// Revenue per unit of locally produced energy sold to the grid.
    pub feed_in_price: Option<f64>,
}

/// Discrete temperature levels for the heat sector, with the datum used for
/// sensible-heat accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCarrier {
    /// Strictly increasing temperatures in °C; one bus per level.
    pub temperature_levels: Vec<f64>,
    /// Datum temperature; flows at this temperature carry zero energy.
    pub reference_temperature: f64,
}

/// Discrete pressure levels for one gas kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasCarrier {
    pub gas: GasKind,
    /// Strictly increasing pressures in bar; one bus per level.
    pub pressure_levels: Vec<f64>,
    /// Cost per unit of gas energy purchased from the grid (delivered at the
    /// highest pressure level); `None` means no grid connection.
    pub working_price: Option<f64>,
}

/// A carrier to register on a location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Carrier {
    Electricity(ElectricityCarrier),
    Heat(HeatCarrier),
    Gas(GasCarrier),
}

/// Electric compression heat pump. Connects every anergy source at the
/// location to every heat level above the source temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatPump {
    /// Cap on total thermal output across all source/level pairs, in kW.
    pub thermal_power_limit: Option<f64>,
    /// Coefficient of performance at 0 °C source / 35 °C sink; calibrates
    /// the Carnot quality grade.
    pub cop_0_35: f64,
}

/// Outside-air anergy source for the heat pump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirHeatExchanger {
    /// Air temperature per interval, °C.
    pub air_temperature: TimeSeries,
    /// Optional per-interval cap on drawn anergy power, kW.
    pub power_limit: Option<TimeSeries>,
}

/// Ground-sourced anergy with a per-interval power cap and an optional
/// energy budget over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeothermalSource {
    /// Brine temperature per interval, °C.
    pub temperature: TimeSeries,
    /// Per-interval cap on drawn anergy power, kW.
    pub power_limit: TimeSeries,
    /// Optional cap on total drawn anergy energy over the horizon, kWh.
    pub total_limit: Option<f64>,
}

/// Linearisation used for a combined-heat-and-power unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChpModel {
    /// Fixed efficiencies, continuous output from zero to nominal input.
    ConstantEfficiency,
    /// On/off status with a minimum load; outputs are affine in gas input,
    /// fitted through the min-load and full-load operating points.
    OffsetLinear,
}

/// Combined-heat-and-power unit burning gas into electricity plus heat at a
/// fixed outlet temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chp {
    pub model: ChpModel,
    /// Which gas carrier the unit burns; defaults to natural gas.
    pub gas: Option<GasKind>,
    /// Maximum gas input power, kW.
    pub nominal_input: f64,
    /// Electrical efficiency at full load, fraction of gas input.
    pub electrical_efficiency: f64,
    /// Thermal efficiency at full load, fraction of gas input.
    pub thermal_efficiency: f64,
    /// Minimum load as a fraction of nominal input (offset-linear only).
    pub min_load: Option<f64>,
    /// Electrical efficiency at minimum load (offset-linear only).
    pub min_load_electrical_efficiency: Option<f64>,
    /// Thermal efficiency at minimum load (offset-linear only).
    pub min_load_thermal_efficiency: Option<f64>,
    /// Temperature level receiving the heat output, °C.
    pub outlet_temperature: f64,
}

/// Technology tag for a renewable electricity source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RenewableKind {
    Pv,
    Wind,
    Hydro,
}

impl RenewableKind {
    pub fn key(self) -> &'static str {
        match self {
            RenewableKind::Pv => "pv",
            RenewableKind::Wind => "wind",
            RenewableKind::Hydro => "hydro",
        }
    }
}

/// Curtailable renewable electricity source feeding local production.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewableSource {
    /// Available power per interval, kW; actual output may be curtailed.
    pub max_power: TimeSeries,
    pub kind: RenewableKind,
}

/// One state-of-charge band of a battery: once the content reaches
/// `soc` · capacity, total charging power is capped at `charge_limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocBand {
    /// State-of-charge threshold as a fraction in (0, 1).
    pub soc: f64,
    /// Charging power cap that applies above the threshold, kW.
    pub charge_limit: f64,
}

/// Electric battery with optional state-of-charge-dependent charging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    /// Usable energy capacity, kWh.
    pub capacity: f64,
    /// Charging power cap at low state of charge, kW.
    pub charge_limit: f64,
    /// Discharging power cap, kW.
    pub discharge_limit: f64,
    /// Optional bands reducing the charge cap as the battery fills; the
    /// thresholds must increase and the caps must not.
    pub soc_bands: Vec<SocBand>,
    /// Self-discharge per hour as a fraction of content.
    pub loss_rate: f64,
    /// Content at the first boundary timestamp, kWh.
    pub initial_content: f64,
    /// Require the final content to equal the initial content.
    pub cyclic: bool,
}

/// Fully mixed (single-temperature) heat storage over the carrier's
/// temperature levels, using binary level indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedHeatStorage {
    /// Energy capacity when fully at the top temperature level, kWh.
    pub capacity: f64,
    /// Heat loss per hour as a fraction of content.
    pub loss_rate: f64,
    /// Content at the first boundary timestamp, kWh.
    pub initial_content: f64,
    /// Require the final content to equal the initial content.
    pub cyclic: bool,
}

/// Stratified heat storage modelled as temperature layers of variable size
/// sharing one volume; needs no binary variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredHeatStorage {
    /// Energy capacity when the whole volume is at the top level, kWh.
    pub capacity: f64,
    /// Heat loss per hour as a fraction of each layer's content.
    pub loss_rate: f64,
    /// Optional per-level initial contents, kWh (defaults to empty).
    pub initial_contents: Option<Vec<f64>>,
    /// Require each layer's final content to equal its initial content.
    pub cyclic: bool,
}

/// Pressurised gas storage over the carrier's pressure levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasStorage {
    /// Which gas carrier the storage holds; may be omitted when the
    /// location declares exactly one gas carrier.
    pub gas: Option<GasKind>,
    /// Energy content per bar of storage pressure, kWh/bar.
    pub c_e: f64,
    /// Maximum storage pressure, bar; capacity is `c_e` · `max_pressure`.
    pub max_pressure: f64,
    /// Optional per-level caps on discharge power, kW, aligned with the
    /// carrier's pressure levels.
    pub level_output_limits: Option<Vec<f64>>,
    /// Optional per-level caps on charge power, kW, aligned likewise.
    pub level_input_limits: Option<Vec<f64>>,
    /// Optional weighted cap on total discharge power, kW.
    pub aggregate_output_limit: Option<f64>,
    /// Optional weighted cap on total charge power, kW.
    pub aggregate_input_limit: Option<f64>,
    /// Optional per-level weights for the aggregate caps (default 1).
    pub weights: Option<Vec<f64>>,
    /// Leakage per hour as a fraction of content.
    pub loss_rate: f64,
    /// Content at the first boundary timestamp, kWh.
    pub initial_content: f64,
    /// Require the final content to equal the initial content.
    pub cyclic: bool,
}

/// Proton-exchange-membrane electrolyzer producing hydrogen plus usable
/// waste heat from electricity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electrolyzer {
    /// Maximum electric input power, kW.
    pub nominal_power: f64,
    /// Hydrogen output per unit of electric input (lower heating value).
    pub hydrogen_efficiency: f64,
    /// Usable waste heat per unit of electric input.
    pub waste_heat_efficiency: f64,
    /// Hydrogen delivery pressure, bar; output lands on the highest
    /// declared level at or below this.
    pub output_pressure: f64,
    /// Waste-heat temperature, °C; heat lands on the highest declared level
    /// at or below this, or is discarded when none exists.
    pub waste_heat_temperature: f64,
}

impl Electrolyzer {
    pub const DEFAULT_OUTPUT_PRESSURE: f64 = 30.0;
    pub const DEFAULT_WASTE_HEAT_TEMPERATURE: f64 = 77.0;
}

/// Electric gas compressor lifting gas to configured outlet levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compressor {
    /// Which gas carrier is compressed; may be omitted when the location
    /// declares exactly one gas carrier.
    pub gas: Option<GasKind>,
    /// Outlet pressure levels served; each must be a declared carrier level
    /// with at least one declared level strictly below it.
    pub outlet_pressures: Vec<f64>,
    /// Optional cap on total electric input power, kW.
    pub power_limit: Option<f64>,
    /// Electric work per unit of gas energy and unit log pressure ratio:
    /// P_el = coefficient · ln(p_out / p_in) · P_gas.
    pub specific_work_coefficient: f64,
}

/// A component to register on a location; at most one of each kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Component {
    HeatPump(HeatPump),
    AirHeatExchanger(AirHeatExchanger),
    GeothermalSource(GeothermalSource),
    Chp(Chp),
    RenewableSource(RenewableSource),
    Electrolyzer(Electrolyzer),
    Compressor(Compressor),
    Battery(Battery),
    MixedHeatStorage(MixedHeatStorage),
    LayeredHeatStorage(LayeredHeatStorage),
    GasStorage(GasStorage),
}

/// Discriminant of [`Component`]; the declaration order fixes the emission
/// order during lowering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentKind {
    HeatPump,
    AirHeatExchanger,
    GeothermalSource,
    Chp,
    RenewableSource,
    Electrolyzer,
    Compressor,
    Battery,
    MixedHeatStorage,
    LayeredHeatStorage,
    GasStorage,
}

impl ComponentKind {
    pub fn key(self) -> &'static str {
        match self {
            ComponentKind::HeatPump => "HeatPump",
            ComponentKind::AirHeatExchanger => "AirHeatExchanger",
            ComponentKind::GeothermalSource => "GeothermalSource",
            ComponentKind::Chp => "CHP",
            ComponentKind::RenewableSource => "RenewableSource",
            ComponentKind::Electrolyzer => "Electrolyzer",
            ComponentKind::Compressor => "Compressor",
            ComponentKind::Battery => "Battery",
            ComponentKind::MixedHeatStorage => "MixedHeatStorage",
            ComponentKind::LayeredHeatStorage => "LayeredHeatStorage",
            ComponentKind::GasStorage => "GasStorage",
        }
    }
}

impl Component {
    pub fn kind(&self) -> ComponentKind {
        match self {
            Component::HeatPump(_) => ComponentKind::HeatPump,
            Component::AirHeatExchanger(_) => ComponentKind::AirHeatExchanger,
            Component::GeothermalSource(_) => ComponentKind::GeothermalSource,
            Component::Chp(_) => ComponentKind::Chp,
            Component::RenewableSource(_) => ComponentKind::RenewableSource,
            Component::Electrolyzer(_) => ComponentKind::Electrolyzer,
            Component::Compressor(_) => ComponentKind::Compressor,
            Component::Battery(_) => ComponentKind::Battery,
            Component::MixedHeatStorage(_) => ComponentKind::MixedHeatStorage,
            Component::LayeredHeatStorage(_) => ComponentKind::LayeredHeatStorage,
            Component::GasStorage(_) => ComponentKind::GasStorage,
        }
    }
}

/// A consumer to register on a location, keyed by a per-location name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Demand {
    /// Electric load, kW per interval.
    Electricity { time_series: TimeSeries },
    /// Heat load delivered at `flow_temperature` with the spent flow
    /// returning at `return_temperature`; the series is net power, kW.
    FixedTemperatureHeat {
        flow_temperature: f64,
        return_temperature: f64,
        time_series: TimeSeries,
    },
    /// Gas load at a fixed pressure level, kW.
    Gas {
        gas: Option<GasKind>,
        pressure: f64,
        time_series: TimeSeries,
    },
}

impl Demand {
    pub fn time_series(&self) -> &TimeSeries {
        match self {
            Demand::Electricity { time_series }
            | Demand::FixedTemperatureHeat { time_series, .. }
            | Demand::Gas { time_series, .. } => time_series,
        }
    }
}

/// One site of the energy system: a set of carriers (at most one per kind),
/// components (at most one per kind), and named demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    name: String,
    electricity: Option<ElectricityCarrier>,
    heat: Option<HeatCarrier>,
    gas: BTreeMap<GasKind, GasCarrier>,
    components: BTreeMap<ComponentKind, Component>,
    demands: BTreeMap<String, Demand>,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Location {
        Location {
            name: name.into(),
            electricity: None,
            heat: None,
            gas: BTreeMap::new(),
            components: BTreeMap::new(),
            demands: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_carrier(&mut self, carrier: Carrier) -> Result<(), ModelError> {
        match carrier {
            Carrier::Electricity(settings) => {
                if self.electricity.is_some() {
                    return Err(ModelError::DuplicateCarrier("electricity".into()));
                }
                self.electricity = Some(settings);
            }
            Carrier::Heat(settings) => {
                if self.heat.is_some() {
                    return Err(ModelError::DuplicateCarrier("heat".into()));
                }
                self.heat = Some(settings);
            }
            Carrier::Gas(settings) => {
                if self.gas.contains_key(&settings.gas) {
                    return Err(ModelError::DuplicateCarrier(settings.gas.key().into()));
                }
                self.gas.insert(settings.gas, settings);
            }
        }
        Ok(())
    }

    pub fn add_component(&mut self, component: Component) -> Result<(), ModelError> {
        let kind = component.kind();
        if self.components.contains_key(&kind) {
            return Err(ModelError::DuplicateComponent(kind.key().into()));
        }
        self.components.insert(kind, component);
        Ok(())
    }

    pub fn add_demand(&mut self, name: impl Into<String>, demand: Demand) -> Result<(), ModelError> {
        let name = name.into();
        if self.demands.contains_key(&name) {
            return Err(ModelError::DuplicateDemandName(name));
        }
        self.demands.insert(name, demand);
        Ok(())
    }

    pub fn electricity(&self) -> Option<&ElectricityCarrier> {
        self.electricity.as_ref()
    }

    pub fn heat(&self) -> Option<&HeatCarrier> {
        self.heat.as_ref()
    }

    pub fn gas_carriers(&self) -> &BTreeMap<GasKind, GasCarrier> {
        &self.gas
    }

    pub fn components(&self) -> &BTreeMap<ComponentKind, Component> {
        &self.components
    }

    pub fn component(&self, kind: ComponentKind) -> Option<&Component> {
        self.components.get(&kind)
    }

    pub fn demands(&self) -> &BTreeMap<String, Demand> {
        &self.demands
    }

    /// Resolves which gas carrier a component or demand refers to:
    /// an explicit request wins, then the component-specific default, then
    /// the location's single declared gas carrier (ambiguous otherwise).
    pub fn resolve_gas(
        &self,
        requested: Option<GasKind>,
        default: Option<GasKind>,
    ) -> Result<GasKind, String> {
        let declared = |k: GasKind| -> Result<GasKind, String> {
            if self.gas.contains_key(&k) {
                Ok(k)
            } else {
                Err(format!("gas carrier {:?} is not defined at this location", k.key()))
            }
        };
        if let Some(k) = requested {
            declared(k)
        } else if let Some(k) = default {
            declared(k)
        } else {
            match self.gas.len() {
                0 => Err("no gas carrier is defined at this location".into()),
                1 => Ok(*self.gas.keys().next().expect("one gas carrier")),
                _ => Err("several gas carriers are defined; specify which one".into()),
            }
        }
    }
}

/// Which carrier an inter-location link exchanges, with the level it uses
/// on both sides where carriers are level-resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LinkCarrier {
    Electricity,
    Heat { temperature: f64 },
    Gas { gas: GasKind, pressure: f64 },
}

/// Lossless bidirectional connection between two locations for one carrier,
/// with an optional capacity per direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: String,
    pub b: String,
    pub carrier: LinkCarrier,
    /// Capacity of the a→b direction, kW; `None` is unlimited.
    pub capacity_ab: Option<f64>,
    /// Capacity of the b→a direction, kW; `None` is unlimited.
    pub capacity_ba: Option<f64>,
}

/// One entry of a [`ValidationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationIssue {
    /// Where the problem sits, e.g. `SFH.demands.hot water`.
    pub context: String,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

/// Everything [`EnergySystem::validate`] found wrong; empty means the system
/// is ready for lowering.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    fn push(&mut self, context: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ValidationIssue { context: context.into(), message: message.into() });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// The whole declarative model: a time axis, named locations, and links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySystem {
    time_index: TimeIndex,
    locations: BTreeMap<String, Location>,
    links: Vec<Link>,
}

impl EnergySystem {
    pub fn new(time_index: TimeIndex) -> EnergySystem {
        EnergySystem { time_index, locations: BTreeMap::new(), links: Vec::new() }
    }

    pub fn time_index(&self) -> &TimeIndex {
        &self.time_index
    }

    pub fn locations(&self) -> &BTreeMap<String, Location> {
        &self.locations
    }

    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.get(name)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn add_location(&mut self, location: Location) -> Result<(), ModelError> {
        if self.locations.contains_key(location.name()) {
            return Err(ModelError::DuplicateLocation(location.name().to_string()));
        }
        self.locations.insert(location.name().to_string(), location);
        Ok(())
    }

    pub fn add_link(&mut self, link: Link) {
        self.links.push(link);
    }

    /// Checks every cross-reference and numeric rule; never mutates the
    /// system. An empty report guarantees the system can be lowered.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.time_index.num_intervals();
        for location in self.locations.values() {
            validate_location(location, n, &mut report);
        }
        for (i, link) in self.links.iter().enumerate() {
            validate_link(self, link, i, &mut report);
        }
        report
    }
}

/// True when `value` is (exactly) one of the declared levels. Levels are
/// compared exactly: both sides originate from the same user input.
fn is_level(levels: &[f64], value: f64) -> bool {
    levels.contains(&value)
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

fn check_series(
    report: &mut ValidationReport,
    ctx: &str,
    label: &str,
    series: &TimeSeries,
    n: usize,
    nonnegative: bool,
) {
    if series.len() != n {
        report.push(
            ctx,
            format!("{label} has {} values but the time index has {n} intervals", series.len()),
        );
    }
    if series.values.iter().any(|v| !finite(*v)) {
        report.push(ctx, format!("{label} contains a non-finite value"));
    } else if nonnegative && series.values.iter().any(|v| *v < 0.0) {
        report.push(ctx, format!("{label} contains a negative value"));
    }
}

fn check_levels(report: &mut ValidationReport, ctx: &str, label: &str, levels: &[f64]) -> bool {
    if levels.is_empty() {
        report.push(ctx, format!("{label} must declare at least one level"));
        return false;
    }
    if levels.iter().any(|l| !finite(*l)) {
        report.push(ctx, format!("{label} contains a non-finite level"));
        return false;
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        report.push(ctx, format!("{label} must be strictly increasing"));
        return false;
    }
    true
}

fn validate_location(location: &Location, n: usize, report: &mut ValidationReport) {
    let loc = location.name();

    if let Some(el) = location.electricity() {
        let ctx = format!("{loc}.carriers.electricity");
        for (label, price) in [
            ("working_price", el.working_price),
            ("demand_rate", el.demand_rate),
            ("feed_in_price", el.feed_in_price),
        ] {
            if let Some(p) = price {
                if !finite(p) {
                    report.push(&ctx, format!("{label} must be finite"));
                }
            }
        }
        if let Some(r) = el.demand_rate {
            if finite(r) && r < 0.0 {
                report.push(&ctx, "demand_rate must not be negative");
            }
        }
    }

    if let Some(heat) = location.heat() {
        let ctx = format!("{loc}.carriers.heat");
        if check_levels(report, &ctx, "temperature_levels", &heat.temperature_levels) {
            if !finite(heat.reference_temperature) {
                report.push(&ctx, "reference_temperature must be finite");
            } else if heat.reference_temperature >= heat.temperature_levels[0] {
                report.push(
                    &ctx,
                    "reference_temperature must lie below the lowest temperature level",
                );
            }
        }
    }

    for (kind, gas) in location.gas_carriers() {
        let ctx = format!("{loc}.carriers.{}", kind.key());
        if check_levels(report, &ctx, "pressure_levels", &gas.pressure_levels)
            && gas.pressure_levels[0] < 0.0
        {
            report.push(&ctx, "pressure_levels must not be negative");
        }
        if let Some(p) = gas.working_price {
            if !finite(p) {
                report.push(&ctx, "working_price must be finite");
            }
        }
    }

    for component in location.components().values() {
        validate_component(location, component, n, report);
    }
    for (name, demand) in location.demands() {
        validate_demand(location, name, demand, n, report);
    }
}

fn validate_component(
    location: &Location,
    component: &Component,
    n: usize,
    report: &mut ValidationReport,
) {
    let loc = location.name();
    let ctx = format!("{loc}.components.{}", component.kind().key());
    let require_electricity = |report: &mut ValidationReport| {
        if location.electricity().is_none() {
            report.push(&ctx, "requires an electricity carrier at the location");
        }
    };
    let require_heat = |report: &mut ValidationReport| -> Option<&HeatCarrier> {
        if location.heat().is_none() {
            report.push(&ctx, "requires a heat carrier at the location");
        }
        location.heat()
    };

    match component {
        Component::HeatPump(hp) => {
            require_electricity(report);
            require_heat(report);
            if !(hp.cop_0_35 > 1.0 && finite(hp.cop_0_35)) {
                report.push(&ctx, "cop_0_35 must be greater than 1");
            }
            if let Some(limit) = hp.thermal_power_limit {
                if !(limit >= 0.0 && finite(limit)) {
                    report.push(&ctx, "thermal_power_limit must not be negative");
                }
            }
            let has_anergy = location.component(ComponentKind::AirHeatExchanger).is_some()
                || location.component(ComponentKind::GeothermalSource).is_some();
            if !has_anergy {
                report.push(&ctx, "heat pump has no anergy source");
            }
        }
        Component::AirHeatExchanger(src) => {
            check_series(report, &ctx, "air_temperature", &src.air_temperature, n, false);
            if let Some(limit) = &src.power_limit {
                check_series(report, &ctx, "power_limit", limit, n, true);
            }
        }
        Component::GeothermalSource(src) => {
            check_series(report, &ctx, "temperature", &src.temperature, n, false);
            check_series(report, &ctx, "power_limit", &src.power_limit, n, true);
            if let Some(total) = src.total_limit {
                if !(total >= 0.0 && finite(total)) {
                    report.push(&ctx, "total_limit must not be negative");
                }
            }
        }
        Component::Chp(chp) => {
            require_electricity(report);
            if let Err(msg) = location.resolve_gas(chp.gas, Some(GasKind::NaturalGas)) {
                report.push(&ctx, msg);
            }
            if let Some(heat) = require_heat(report) {
                if !is_level(&heat.temperature_levels, chp.outlet_temperature) {
                    report.push(&ctx, "outlet_temperature is not among the heat carrier levels");
                }
            }
            if !(chp.nominal_input > 0.0 && finite(chp.nominal_input)) {
                report.push(&ctx, "nominal_input must be positive");
            }
            let eff_ok = |e: f64| e > 0.0 && e <= 1.0;
            if !eff_ok(chp.electrical_efficiency) || !eff_ok(chp.thermal_efficiency) {
                report.push(&ctx, "efficiencies must lie in (0, 1]");
            } else if chp.electrical_efficiency + chp.thermal_efficiency > 1.0 {
                report.push(&ctx, "electrical plus thermal efficiency must not exceed 1");
            }
            match chp.model {
                ChpModel::ConstantEfficiency => {
                    if chp.min_load.is_some()
                        || chp.min_load_electrical_efficiency.is_some()
                        || chp.min_load_thermal_efficiency.is_some()
                    {
                        report.push(
                            &ctx,
                            "min-load parameters are only meaningful for the offset-linear model",
                        );
                    }
                }
                ChpModel::OffsetLinear => match chp.min_load {
                    Some(m) if m > 0.0 && m < 1.0 => {
                        for (label, eff) in [
                            ("min_load_electrical_efficiency", chp.min_load_electrical_efficiency),
                            ("min_load_thermal_efficiency", chp.min_load_thermal_efficiency),
                        ] {
                            match eff {
                                Some(e) if eff_ok(e) => {}
                                Some(_) => report.push(&ctx, format!("{label} must lie in (0, 1]")),
                                None => report.push(
                                    &ctx,
                                    format!("offset-linear model requires {label}"),
                                ),
                            }
                        }
                    }
                    Some(_) => report.push(&ctx, "min_load must lie strictly between 0 and 1"),
                    None => report.push(&ctx, "offset-linear model requires min_load"),
                },
            }
        }
        Component::RenewableSource(src) => {
            require_electricity(report);
            check_series(report, &ctx, "max_power", &src.max_power, n, true);
        }
        Component::Electrolyzer(ez) => {
            require_electricity(report);
            if !(ez.nominal_power > 0.0 && finite(ez.nominal_power)) {
                report.push(&ctx, "nominal_power must be positive");
            }
            let eff_ok = |e: f64| e > 0.0 && e <= 1.0;
            if !eff_ok(ez.hydrogen_efficiency)
                || ez.waste_heat_efficiency < 0.0
                || !finite(ez.waste_heat_efficiency)
            {
                report.push(&ctx, "efficiencies must lie in (0, 1]");
            } else if ez.hydrogen_efficiency + ez.waste_heat_efficiency > 1.0 {
                report.push(&ctx, "hydrogen plus waste-heat efficiency must not exceed 1");
            }
            match location.gas_carriers().get(&GasKind::Hydrogen) {
                None => report.push(&ctx, "requires a hydrogen carrier at the location"),
                Some(h2) => {
                    if !h2.pressure_levels.iter().any(|&p| p <= ez.output_pressure) {
                        report.push(
                            &ctx,
                            "no hydrogen pressure level at or below the output pressure",
                        );
                    }
                }
            }
            if !(ez.output_pressure > 0.0 && finite(ez.output_pressure)) {
                report.push(&ctx, "output_pressure must be positive");
            }
        }
        Component::Compressor(cp) => {
            require_electricity(report);
            match location.resolve_gas(cp.gas, None) {
                Err(msg) => report.push(&ctx, msg),
                Ok(kind) => {
                    let levels = &location.gas_carriers()[&kind].pressure_levels;
                    if cp.outlet_pressures.is_empty() {
                        report.push(&ctx, "must declare at least one outlet pressure");
                    }
                    for &out in &cp.outlet_pressures {
                        if !is_level(levels, out) {
                            report.push(
                                &ctx,
                                format!("outlet pressure {out} is not among the carrier levels"),
                            );
                        } else if !levels.iter().any(|&p| p < out) {
                            report.push(
                                &ctx,
                                format!(
                                    "outlet pressure {out} has no lower level to compress from"
                                ),
                            );
                        }
                    }
                }
            }
            if !(cp.specific_work_coefficient > 0.0 && finite(cp.specific_work_coefficient)) {
                report.push(&ctx, "specific_work_coefficient must be positive");
            }
            if let Some(limit) = cp.power_limit {
                if !(limit >= 0.0 && finite(limit)) {
                    report.push(&ctx, "power_limit must not be negative");
                }
            }
        }
        Component::Battery(bat) => {
            require_electricity(report);
            if !(bat.capacity > 0.0 && finite(bat.capacity)) {
                report.push(&ctx, "capacity must be positive");
            }
            for (label, limit) in
                [("charge_limit", bat.charge_limit), ("discharge_limit", bat.discharge_limit)]
            {
                if !(limit >= 0.0 && finite(limit)) {
                    report.push(&ctx, format!("{label} must not be negative"));
                }
            }
            check_storage_scalars(report, &ctx, bat.loss_rate, bat.initial_content, bat.capacity);
            let mut prev_soc = 0.0;
            let mut prev_limit = bat.charge_limit;
            for band in &bat.soc_bands {
                if !(band.soc > prev_soc && band.soc < 1.0) {
                    report.push(
                        &ctx,
                        "soc_bands thresholds must increase strictly within (0, 1)",
                    );
                    break;
                }
                if !(band.charge_limit >= 0.0 && band.charge_limit <= prev_limit) {
                    report.push(
                        &ctx,
                        "soc_bands charge limits must decrease towards full charge",
                    );
                    break;
                }
                prev_soc = band.soc;
                prev_limit = band.charge_limit;
            }
        }
        Component::MixedHeatStorage(st) => {
            require_heat(report);
            if !(st.capacity > 0.0 && finite(st.capacity)) {
                report.push(&ctx, "capacity must be positive");
            }
            check_storage_scalars(report, &ctx, st.loss_rate, st.initial_content, st.capacity);
        }
        Component::LayeredHeatStorage(st) => {
            let heat = require_heat(report);
            if !(st.capacity > 0.0 && finite(st.capacity)) {
                report.push(&ctx, "capacity must be positive");
            }
            if !(st.loss_rate >= 0.0 && finite(st.loss_rate)) {
                report.push(&ctx, "loss_rate must not be negative");
            }
            if let (Some(initial), Some(heat)) = (&st.initial_contents, heat) {
                let levels = &heat.temperature_levels;
                if initial.len() != levels.len() {
                    report.push(&ctx, "initial_contents must give one value per temperature level");
                } else if initial.iter().any(|v| *v < 0.0 || !finite(*v)) {
                    report.push(&ctx, "initial_contents must not be negative");
                } else if levels.len() > 1 || !initial.is_empty() {
                    let t_ref = heat.reference_temperature;
                    let top = levels[levels.len() - 1];
                    let scaled: f64 = initial
                        .iter()
                        .zip(levels)
                        .map(|(e, t)| e * (top - t_ref) / (t - t_ref))
                        .sum();
                    if scaled > st.capacity + 1e-9 {
                        report.push(&ctx, "initial_contents exceed the storage capacity");
                    }
                }
            }
        }
        Component::GasStorage(st) => {
            match location.resolve_gas(st.gas, None) {
                Err(msg) => report.push(&ctx, msg),
                Ok(kind) => {
                    let levels = &location.gas_carriers()[&kind].pressure_levels;
                    if let Some(&top) = levels.last() {
                        if st.max_pressure < top {
                            report.push(
                                &ctx,
                                "max_pressure must reach the highest declared pressure level",
                            );
                        }
                    }
                    for (label, limits) in [
                        ("level_output_limits", &st.level_output_limits),
                        ("level_input_limits", &st.level_input_limits),
                    ] {
                        if let Some(limits) = limits {
                            if limits.len() != levels.len() {
                                report.push(
                                    &ctx,
                                    format!("{label} must give one value per pressure level"),
                                );
                            } else if limits.iter().any(|v| *v < 0.0 || !finite(*v)) {
                                report.push(&ctx, format!("{label} must not be negative"));
                            }
                        }
                    }
                    if let Some(weights) = &st.weights {
                        if weights.len() != levels.len() {
                            report.push(&ctx, "weights must give one value per pressure level");
                        } else if weights.iter().any(|w| *w < 0.0 || !finite(*w)) {
                            report.push(&ctx, "weights must not be negative");
                        }
                    }
                }
            }
            if !(st.c_e > 0.0 && finite(st.c_e)) {
                report.push(&ctx, "c_e must be positive");
            }
            if !(st.max_pressure > 0.0 && finite(st.max_pressure)) {
                report.push(&ctx, "max_pressure must be positive");
            }
            for (label, limit) in [
                ("aggregate_output_limit", st.aggregate_output_limit),
                ("aggregate_input_limit", st.aggregate_input_limit),
            ] {
                if let Some(l) = limit {
                    if !(l >= 0.0 && finite(l)) {
                        report.push(&ctx, format!("{label} must not be negative"));
                    }
                }
            }
            check_storage_scalars(
                report,
                &ctx,
                st.loss_rate,
                st.initial_content,
                st.c_e * st.max_pressure,
            );
        }
    }
}

fn check_storage_scalars(
    report: &mut ValidationReport,
    ctx: &str,
    loss_rate: f64,
    initial_content: f64,
    capacity: f64,
) {
    if !(loss_rate >= 0.0 && finite(loss_rate)) {
        report.push(ctx, "loss_rate must not be negative");
    }
    if !(initial_content >= 0.0 && finite(initial_content)) {
        report.push(ctx, "initial_content must not be negative");
    } else if capacity.is_finite() && initial_content > capacity + 1e-9 {
        report.push(ctx, "initial_content exceeds the storage capacity");
    }
}

fn validate_demand(
    location: &Location,
    name: &str,
    demand: &Demand,
    n: usize,
    report: &mut ValidationReport,
) {
    let ctx = format!("{}.demands.{}", location.name(), name);
    check_series(report, &ctx, "time_series", demand.time_series(), n, true);
    match demand {
        Demand::Electricity { .. } => {
            if location.electricity().is_none() {
                report.push(&ctx, "requires an electricity carrier at the location");
            }
        }
        Demand::FixedTemperatureHeat { flow_temperature, return_temperature, .. } => {
            match location.heat() {
                None => report.push(&ctx, "requires a heat carrier at the location"),
                Some(heat) => {
                    if !is_level(&heat.temperature_levels, *flow_temperature) {
                        report.push(&ctx, "flow temperature is not among the carrier levels");
                    }
                    if !is_level(&heat.temperature_levels, *return_temperature)
                        && *return_temperature != heat.reference_temperature
                    {
                        report.push(
                            &ctx,
                            "return temperature is neither a carrier level nor the reference",
                        );
                    }
                    if flow_temperature <= return_temperature {
                        report.push(
                            &ctx,
                            "flow temperature must lie above the return temperature",
                        );
                    }
                }
            }
        }
        Demand::Gas { gas, pressure, .. } => match location.resolve_gas(*gas, None) {
            Err(msg) => report.push(&ctx, msg),
            Ok(kind) => {
                let levels = &location.gas_carriers()[&kind].pressure_levels;
                if !is_level(levels, *pressure) {
                    report.push(&ctx, "pressure is not among the carrier levels");
                }
            }
        },
    }
}

fn validate_link(system: &EnergySystem, link: &Link, index: usize, report: &mut ValidationReport) {
    let ctx = format!("links[{index}]");
    let mut endpoints = Vec::new();
    for name in [&link.a, &link.b] {
        match system.location(name) {
            None => report.push(&ctx, format!("location {name:?} does not exist")),
            Some(loc) => endpoints.push(loc),
        }
    }
    for (label, cap) in [("capacity_ab", link.capacity_ab), ("capacity_ba", link.capacity_ba)] {
        if let Some(c) = cap {
            if !(c >= 0.0 && finite(c)) {
                report.push(&ctx, format!("{label} must not be negative"));
            }
        }
    }
    if endpoints.len() < 2 {
        return;
    }
    if link.a == link.b {
        report.push(&ctx, "a link must connect two different locations");
        return;
    }
    for loc in endpoints {
        match &link.carrier {
            LinkCarrier::Electricity => {
                if loc.electricity().is_none() {
                    report.push(
                        &ctx,
                        format!("location {:?} has no electricity carrier", loc.name()),
                    );
                }
            }
            LinkCarrier::Heat { temperature } => match loc.heat() {
                None => {
                    report.push(&ctx, format!("location {:?} has no heat carrier", loc.name()))
                }
                Some(heat) => {
                    if !is_level(&heat.temperature_levels, *temperature) {
                        report.push(
                            &ctx,
                            format!(
                                "temperature {} is not a level of location {:?}",
                                temperature,
                                loc.name()
                            ),
                        );
                    }
                }
            },
            LinkCarrier::Gas { gas, pressure } => match loc.gas_carriers().get(gas) {
                None => report.push(
                    &ctx,
                    format!("location {:?} has no {} carrier", loc.name(), gas.key()),
                ),
                Some(carrier) => {
                    if !is_level(&carrier.pressure_levels, *pressure) {
                        report.push(
                            &ctx,
                            format!(
                                "pressure {} is not a level of location {:?}",
                                pressure,
                                loc.name()
                            ),
                        );
                    }
                }
            },
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The two-interval single-family-home system used throughout the test
    /// suite: grid electricity, three heat levels, an air-source heat pump,
    /// and three demands.
    pub fn sample_home() -> EnergySystem {
        let mut system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        let mut house = Location::new("SFH");
        house
            .add_carrier(Carrier::Electricity(ElectricityCarrier {
                working_price: Some(35.0),
                demand_rate: Some(0.0),
                feed_in_price: None,
            }))
            .unwrap();
        house
            .add_carrier(Carrier::Heat(HeatCarrier {
                temperature_levels: vec![20.0, 30.0, 55.0],
                reference_temperature: 10.0,
            }))
            .unwrap();
        house
            .add_demand(
                "electricity demand",
                Demand::Electricity { time_series: vec![7.0, 8.4].into() },
            )
            .unwrap();
        house
            .add_demand(
                "space heating",
                Demand::FixedTemperatureHeat {
                    flow_temperature: 30.0,
                    return_temperature: 20.0,
                    time_series: vec![13.37, 42.0].into(),
                },
            )
            .unwrap();
        house
            .add_demand(
                "hot water",
                Demand::FixedTemperatureHeat {
                    flow_temperature: 55.0,
                    return_temperature: 10.0,
                    time_series: vec![0.0, 12.0].into(),
                },
            )
            .unwrap();
        house
            .add_component(Component::HeatPump(HeatPump {
                thermal_power_limit: None,
                cop_0_35: 3.8,
            }))
            .unwrap();
        house
            .add_component(Component::AirHeatExchanger(AirHeatExchanger {
                air_temperature: vec![3.0, 9.0].into(),
                power_limit: None,
            }))
            .unwrap();
        system.add_location(house).unwrap();
        system
    }

    #[test]
    fn sample_home_validates_cleanly() {
        let report = sample_home().validate();
        assert!(report.is_empty(), "unexpected issues:\n{report}");
    }

    #[test]
    fn validation_is_pure_and_repeatable() {
        let system = sample_home();
        let before = system.clone();
        let first = system.validate();
        let second = system.validate();
        assert_eq!(first, second);
        assert_eq!(system, before);
    }

    #[test]
    fn construction_order_does_not_matter() {
        let forward = sample_home();
        // Same content, registered in a different order.
        let mut house = Location::new("SFH");
        house
            .add_component(Component::AirHeatExchanger(AirHeatExchanger {
                air_temperature: vec![3.0, 9.0].into(),
                power_limit: None,
            }))
            .unwrap();
        house
            .add_demand(
                "hot water",
                Demand::FixedTemperatureHeat {
                    flow_temperature: 55.0,
                    return_temperature: 10.0,
                    time_series: vec![0.0, 12.0].into(),
                },
            )
            .unwrap();
        house
            .add_carrier(Carrier::Heat(HeatCarrier {
                temperature_levels: vec![20.0, 30.0, 55.0],
                reference_temperature: 10.0,
            }))
            .unwrap();
        house
            .add_component(Component::HeatPump(HeatPump {
                thermal_power_limit: None,
                cop_0_35: 3.8,
            }))
            .unwrap();
        house
            .add_demand(
                "space heating",
                Demand::FixedTemperatureHeat {
                    flow_temperature: 30.0,
                    return_temperature: 20.0,
                    time_series: vec![13.37, 42.0].into(),
                },
            )
            .unwrap();
        house
            .add_carrier(Carrier::Electricity(ElectricityCarrier {
                working_price: Some(35.0),
                demand_rate: Some(0.0),
                feed_in_price: None,
            }))
            .unwrap();
        house
            .add_demand(
                "electricity demand",
                Demand::Electricity { time_series: vec![7.0, 8.4].into() },
            )
            .unwrap();
        let mut backward = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        backward.add_location(house).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn duplicate_registration_is_rejected() {
        let mut loc = Location::new("A");
        loc.add_carrier(Carrier::Electricity(ElectricityCarrier::default())).unwrap();
        assert_eq!(
            loc.add_carrier(Carrier::Electricity(ElectricityCarrier::default())),
            Err(ModelError::DuplicateCarrier("electricity".into()))
        );
        loc.add_demand("load", Demand::Electricity { time_series: vec![1.0].into() }).unwrap();
        assert_eq!(
            loc.add_demand("load", Demand::Electricity { time_series: vec![2.0].into() }),
            Err(ModelError::DuplicateDemandName("load".into()))
        );
        let hp = Component::HeatPump(HeatPump { thermal_power_limit: None, cop_0_35: 3.8 });
        loc.add_component(hp.clone()).unwrap();
        assert_eq!(loc.add_component(hp), Err(ModelError::DuplicateComponent("HeatPump".into())));

        let mut system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        system.add_location(Location::new("A")).unwrap();
        assert_eq!(
            system.add_location(Location::new("A")),
            Err(ModelError::DuplicateLocation("A".into()))
        );
    }

    #[test]
    fn two_gas_kinds_are_distinct_carriers() {
        let mut loc = Location::new("A");
        loc.add_carrier(Carrier::Gas(GasCarrier {
            gas: GasKind::NaturalGas,
            pressure_levels: vec![1.0],
            working_price: None,
        }))
        .unwrap();
        loc.add_carrier(Carrier::Gas(GasCarrier {
            gas: GasKind::Hydrogen,
            pressure_levels: vec![30.0],
            working_price: None,
        }))
        .unwrap();
        assert_eq!(
            loc.add_carrier(Carrier::Gas(GasCarrier {
                gas: GasKind::Hydrogen,
                pressure_levels: vec![700.0],
                working_price: None,
            })),
            Err(ModelError::DuplicateCarrier("hydrogen".into()))
        );
        assert_eq!(loc.resolve_gas(None, None).unwrap_err(), "several gas carriers are defined; specify which one");
        assert_eq!(loc.resolve_gas(Some(GasKind::Hydrogen), None), Ok(GasKind::Hydrogen));
    }

    #[test]
    fn off_level_flow_temperature_is_reported_once() {
        let mut system = sample_home();
        let location = system.locations.get_mut("SFH").unwrap();
        location.demands.insert(
            "hot water".into(),
            Demand::FixedTemperatureHeat {
                flow_temperature: 60.0,
                return_temperature: 10.0,
                time_series: vec![0.0, 12.0].into(),
            },
        );
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("flow temperature is not among"));
        assert_eq!(report.issues[0].context, "SFH.demands.hot water");
    }

    #[test]
    fn heat_pump_without_anergy_source_is_reported() {
        let mut system = sample_home();
        let location = system.locations.get_mut("SFH").unwrap();
        location.components.remove(&ComponentKind::AirHeatExchanger);
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("no anergy source"));
    }

    #[test]
    fn reference_temperature_must_lie_below_levels() {
        let mut loc = Location::new("A");
        loc.add_carrier(Carrier::Heat(HeatCarrier {
            temperature_levels: vec![20.0, 30.0, 55.0],
            reference_temperature: 30.0,
        }))
        .unwrap();
        let mut system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        system.add_location(loc).unwrap();
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("reference_temperature"));
    }

    #[test]
    fn series_length_mismatch_is_reported() {
        let mut system = sample_home();
        let location = system.locations.get_mut("SFH").unwrap();
        location
            .demands
            .insert("load2".into(), Demand::Electricity { time_series: vec![7.0].into() });
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("1 values but the time index has 2"));
    }

    #[test]
    fn link_validation_checks_endpoints_and_levels() {
        let mut system = sample_home();
        system.add_link(Link {
            a: "SFH".into(),
            b: "nowhere".into(),
            carrier: LinkCarrier::Electricity,
            capacity_ab: None,
            capacity_ba: None,
        });
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("does not exist"));

        let mut system = sample_home();
        let mut other = Location::new("barn");
        other
            .add_carrier(Carrier::Heat(HeatCarrier {
                temperature_levels: vec![20.0, 55.0],
                reference_temperature: 10.0,
            }))
            .unwrap();
        system.add_location(other).unwrap();
        system.add_link(Link {
            a: "SFH".into(),
            b: "barn".into(),
            carrier: LinkCarrier::Heat { temperature: 30.0 },
            capacity_ab: Some(5.0),
            capacity_ba: Some(5.0),
        });
        let report = system.validate();
        assert_eq!(report.len(), 1);
        assert!(report.issues[0].message.contains("not a level of location \"barn\""));
    }

    #[test]
    fn empty_island_location_is_valid() {
        let mut system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        system.add_location(Location::new("empty")).unwrap();
        assert!(system.validate().is_empty());
    }
}
