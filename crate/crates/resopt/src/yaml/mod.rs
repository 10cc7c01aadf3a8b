//! YAML frontend: parse the declarative document schema into an
//! [`EnergySystem`], resolve file-referenced time series against the
//! document's base directory, and export any system back to a canonical,
//! self-contained YAML document.
//!
//! A document has exactly two top-level keys. `general` holds the
//! `timeindex` (start, end, freq) and optional `links`; `locations` maps
//! location names to their `carriers`, `components` (each with a
//! `parameters` block), and `demands`. Demands are written as a sequence of
//! single-key maps (`- Electricity: {name: ..., ...}`); a name-keyed map
//! with a `type:` field is also accepted. Time series are inline lists,
//! `{values, unit}` mappings, or `file=<path>:<column>` references.
//! Unknown keys anywhere are rejected with the full path to the offender.

pub mod series;

use std::path::Path;

use serde_yaml::{Mapping, Value};
use thiserror::Error;

use crate::milp::GasKind;
use crate::model::{
    AirHeatExchanger, Battery, Carrier, Chp, ChpModel, Component, Compressor, Demand,
    ElectricityCarrier, Electrolyzer, EnergySystem, GasCarrier, GasStorage, GeothermalSource,
    HeatCarrier, HeatPump, LayeredHeatStorage, Link, LinkCarrier, Location, MixedHeatStorage,
    RenewableKind, RenewableSource, SocBand, TimeIndex, TimeSeries,
};
use series::{resolve_csv_series, SeriesError};

#[derive(Debug, Error)]
pub enum YamlError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: series has {found} values but the time index has {expected} intervals")]
    SeriesLengthMismatch { path: String, expected: usize, found: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("invalid YAML: {0}")]
    Invalid(#[from] serde_yaml::Error),
}

fn schema(path: &str, message: impl Into<String>) -> YamlError {
    YamlError::Schema { path: path.to_string(), message: message.into() }
}

fn join(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Sequence(_) => "a sequence",
        Value::Mapping(_) => "a mapping",
        Value::Tagged(_) => "a tagged value",
    }
}

fn as_mapping<'a>(v: &'a Value, path: &str) -> Result<&'a Mapping, YamlError> {
    v.as_mapping().ok_or_else(|| schema(path, format!("expected a mapping, found {}", type_name(v))))
}

fn as_sequence<'a>(v: &'a Value, path: &str) -> Result<&'a [Value], YamlError> {
    v.as_sequence()
        .map(Vec::as_slice)
        .ok_or_else(|| schema(path, format!("expected a sequence, found {}", type_name(v))))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, YamlError> {
    v.as_str().ok_or_else(|| schema(path, format!("expected a string, found {}", type_name(v))))
}

/// Numbers, including trailing-dot floats ("20.") that the YAML parser
/// hands over as strings.
fn as_f64(v: &Value, path: &str) -> Result<f64, YamlError> {
    if let Some(n) = v.as_f64() {
        return Ok(n);
    }
    if let Some(s) = v.as_str() {
        if let Ok(n) = s.trim().parse::<f64>() {
            return Ok(n);
        }
    }
    Err(schema(path, format!("expected a number, found {}", type_name(v))))
}

fn as_bool(v: &Value, path: &str) -> Result<bool, YamlError> {
    v.as_bool().ok_or_else(|| schema(path, format!("expected a boolean, found {}", type_name(v))))
}

fn as_f64_list(v: &Value, path: &str) -> Result<Vec<f64>, YamlError> {
    let seq = as_sequence(v, path)?;
    seq.iter()
        .enumerate()
        .map(|(i, item)| as_f64(item, &format!("{path}[{i}]")))
        .collect()
}

fn key_string(key: &Value, path: &str) -> Result<String, YamlError> {
    match key.as_str() {
        Some(s) => Ok(s.to_string()),
        None => Err(schema(path, format!("mapping keys must be strings, found {}", type_name(key)))),
    }
}

fn get<'a>(m: &'a Mapping, key: &str) -> Option<&'a Value> {
    m.get(Value::String(key.to_string()))
}

fn require<'a>(m: &'a Mapping, key: &str, path: &str) -> Result<&'a Value, YamlError> {
    get(m, key).ok_or_else(|| schema(path, format!("missing required key `{key}`")))
}

fn reject_unknown(m: &Mapping, allowed: &[&str], path: &str) -> Result<(), YamlError> {
    for key in m.keys() {
        let key = key_string(key, path)?;
        if !allowed.contains(&key.as_str()) {
            return Err(schema(
                &join(path, &key),
                format!("unknown key (expected one of: {})", allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

fn opt_f64(m: &Mapping, key: &str, path: &str) -> Result<Option<f64>, YamlError> {
    get(m, key).map(|v| as_f64(v, &join(path, key))).transpose()
}

fn req_f64(m: &Mapping, key: &str, path: &str) -> Result<f64, YamlError> {
    as_f64(require(m, key, path)?, &join(path, key))
}

fn opt_f64_list(m: &Mapping, key: &str, path: &str) -> Result<Option<Vec<f64>>, YamlError> {
    get(m, key).map(|v| as_f64_list(v, &join(path, key))).transpose()
}

fn req_f64_list(m: &Mapping, key: &str, path: &str) -> Result<Vec<f64>, YamlError> {
    as_f64_list(require(m, key, path)?, &join(path, key))
}

fn opt_bool_or(m: &Mapping, key: &str, path: &str, default: bool) -> Result<bool, YamlError> {
    get(m, key).map(|v| as_bool(v, &join(path, key))).transpose().map(|b| b.unwrap_or(default))
}

fn f64_or(m: &Mapping, key: &str, path: &str, default: f64) -> Result<f64, YamlError> {
    Ok(opt_f64(m, key, path)?.unwrap_or(default))
}

fn parse_gas_kind(v: &Value, path: &str) -> Result<GasKind, YamlError> {
    match as_str(v, path)? {
        "natural_gas" => Ok(GasKind::NaturalGas),
        "hydrogen" => Ok(GasKind::Hydrogen),
        other => Err(schema(
            path,
            format!("unknown gas kind {other:?} (expected natural_gas or hydrogen)"),
        )),
    }
}

fn opt_gas_kind(m: &Mapping, key: &str, path: &str) -> Result<Option<GasKind>, YamlError> {
    get(m, key).map(|v| parse_gas_kind(v, &join(path, key))).transpose()
}

/// Context shared by everything that may resolve a series.
struct Ctx<'a> {
    base: &'a Path,
    index: &'a TimeIndex,
}

impl Ctx<'_> {
    fn series(&self, v: &Value, path: &str) -> Result<TimeSeries, YamlError> {
        let check = |values: Vec<f64>, unit: Option<String>| {
            let expected = self.index.num_intervals();
            if values.len() != expected {
                return Err(YamlError::SeriesLengthMismatch {
                    path: path.to_string(),
                    expected,
                    found: values.len(),
                });
            }
            Ok(TimeSeries { values, unit })
        };
        match v {
            Value::Sequence(_) => check(as_f64_list(v, path)?, None),
            Value::Mapping(m) => {
                reject_unknown(m, &["values", "unit"], path)?;
                let values = req_f64_list(m, "values", path)?;
                let unit = get(m, "unit")
                    .map(|u| as_str(u, &join(path, "unit")).map(str::to_string))
                    .transpose()?;
                check(values, unit)
            }
            Value::String(s) => {
                let Some(reference) = s.strip_prefix("file=") else {
                    return Err(schema(
                        path,
                        format!("expected `file=<path>:<column>`, found {s:?}"),
                    ));
                };
                let Some((file, column)) = reference.split_once(':') else {
                    return Err(schema(
                        path,
                        format!("missing `:` between file and column in {s:?}"),
                    ));
                };
                if file.is_empty() || column.is_empty() {
                    return Err(schema(
                        path,
                        format!("file and column must be nonempty in {s:?}"),
                    ));
                }
                Ok(resolve_csv_series(&self.base.join(file), column, self.index)?)
            }
            _ => Err(schema(
                path,
                format!(
                    "expected a list of numbers, a {{values, unit}} mapping, or a \
                     file=<path>:<column> reference, found {}",
                    type_name(v)
                ),
            )),
        }
    }

    fn req_series(&self, m: &Mapping, key: &str, path: &str) -> Result<TimeSeries, YamlError> {
        self.series(require(m, key, path)?, &join(path, key))
    }

    fn opt_series(
        &self,
        m: &Mapping,
        key: &str,
        path: &str,
    ) -> Result<Option<TimeSeries>, YamlError> {
        get(m, key).map(|v| self.series(v, &join(path, key))).transpose()
    }
}

/// Parses a YAML document into an energy system. Relative `file=` series
/// references are resolved against `base_dir`. The result is structurally
/// complete but not yet validated; run
/// [`EnergySystem::validate`](crate::model::EnergySystem::validate) before
/// lowering.
pub fn parse(text: &str, base_dir: &Path) -> Result<EnergySystem, YamlError> {
    let doc: Value = serde_yaml::from_str(text)?;
    let root = as_mapping(&doc, "document")?;
    reject_unknown(root, &["general", "locations"], "")?;
    let general = as_mapping(require(root, "general", "document")?, "general")?;
    reject_unknown(general, &["timeindex", "links"], "general")?;
    let time_index = parse_timeindex(require(general, "timeindex", "general")?)?;
    let ctx = Ctx { base: base_dir, index: &time_index };

    let mut system = EnergySystem::new(time_index.clone());
    let locations = as_mapping(require(root, "locations", "document")?, "locations")?;
    for (key, value) in locations {
        let name = key_string(key, "locations")?;
        let path = join("locations", &name);
        let location = parse_location(&name, value, &path, &ctx)?;
        system.add_location(location).map_err(|e| schema(&path, e.to_string()))?;
    }
    if let Some(links) = get(general, "links") {
        let links = as_sequence(links, "general.links")?;
        for (i, item) in links.iter().enumerate() {
            system.add_link(parse_link(item, &format!("general.links[{i}]"))?);
        }
    }
    Ok(system)
}

fn parse_timeindex(v: &Value) -> Result<TimeIndex, YamlError> {
    let path = "general.timeindex";
    let m = as_mapping(v, path)?;
    reject_unknown(m, &["start", "end", "freq"], path)?;
    let field = |key: &str| -> Result<String, YamlError> {
        let v = require(m, key, path)?;
        // YAML may resolve `freq: 60T`-style scalars differently across
        // emitters; accept anything scalar and use its text.
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(schema(&join(path, key), format!("expected a string, found {}", type_name(v)))),
        }
    };
    TimeIndex::parse(&field("start")?, &field("end")?, &field("freq")?)
        .map_err(|e| schema(path, e.to_string()))
}

fn parse_location(
    name: &str,
    v: &Value,
    path: &str,
    ctx: &Ctx,
) -> Result<Location, YamlError> {
    let m = as_mapping(v, path)?;
    reject_unknown(m, &["carriers", "components", "demands"], path)?;
    let mut location = Location::new(name);
    if let Some(carriers) = get(m, "carriers") {
        parse_carriers(&mut location, carriers, &join(path, "carriers"))?;
    }
    if let Some(components) = get(m, "components") {
        parse_components(&mut location, components, &join(path, "components"), ctx)?;
    }
    if let Some(demands) = get(m, "demands") {
        parse_demands(&mut location, demands, &join(path, "demands"), ctx)?;
    }
    Ok(location)
}

fn parse_carriers(location: &mut Location, v: &Value, path: &str) -> Result<(), YamlError> {
    let m = as_mapping(v, path)?;
    reject_unknown(m, &["Electricity", "Heat", "Gas"], path)?;
    let mut add = |carrier: Carrier, path: &str| {
        location.add_carrier(carrier).map_err(|e| schema(path, e.to_string()))
    };
    if let Some(v) = get(m, "Electricity") {
        let path = join(path, "Electricity");
        let em = as_mapping(v, &path)?;
        reject_unknown(em, &["working_price", "demand_rate", "feed_in_price"], &path)?;
        add(
            Carrier::Electricity(ElectricityCarrier {
                working_price: opt_f64(em, "working_price", &path)?,
                demand_rate: opt_f64(em, "demand_rate", &path)?,
                feed_in_price: opt_f64(em, "feed_in_price", &path)?,
            }),
            &path,
        )?;
    }
    if let Some(v) = get(m, "Heat") {
        let path = join(path, "Heat");
        let hm = as_mapping(v, &path)?;
        reject_unknown(hm, &["temperature_levels", "reference_temperature"], &path)?;
        add(
            Carrier::Heat(HeatCarrier {
                temperature_levels: req_f64_list(hm, "temperature_levels", &path)?,
                reference_temperature: req_f64(hm, "reference_temperature", &path)?,
            }),
            &path,
        )?;
    }
    if let Some(v) = get(m, "Gas") {
        let path = join(path, "Gas");
        match v {
            Value::Mapping(_) => {
                let carrier = parse_gas_carrier(v, &path)?;
                add(Carrier::Gas(carrier), &path)?;
            }
            Value::Sequence(items) => {
                for (i, item) in items.iter().enumerate() {
                    let path = format!("{path}[{i}]");
                    let carrier = parse_gas_carrier(item, &path)?;
                    add(Carrier::Gas(carrier), &path)?;
                }
            }
            _ => {
                return Err(schema(
                    &path,
                    format!(
                        "expected a mapping or a sequence of mappings, found {}",
                        type_name(v)
                    ),
                ))
            }
        }
    }
    Ok(())
}

fn parse_gas_carrier(v: &Value, path: &str) -> Result<GasCarrier, YamlError> {
    let m = as_mapping(v, path)?;
    reject_unknown(m, &["gas", "pressure_levels", "working_price"], path)?;
    Ok(GasCarrier {
        gas: opt_gas_kind(m, "gas", path)?.unwrap_or(GasKind::NaturalGas),
        pressure_levels: req_f64_list(m, "pressure_levels", path)?,
        working_price: opt_f64(m, "working_price", path)?,
    })
}

const DEMAND_TYPES: [&str; 3] = ["Electricity", "FixedTemperatureHeat", "Gas"];

fn parse_demands(
    location: &mut Location,
    v: &Value,
    path: &str,
    ctx: &Ctx,
) -> Result<(), YamlError> {
    let mut add = |name: String, demand: Demand, path: &str| {
        location.add_demand(name, demand).map_err(|e| schema(path, e.to_string()))
    };
    match v {
        Value::Sequence(items) => {
            for (i, item) in items.iter().enumerate() {
                let path = format!("{path}[{i}]");
                let m = as_mapping(item, &path)?;
                if m.len() != 1 {
                    return Err(schema(
                        &path,
                        "expected a single-key mapping like `- Electricity: {name: ..., ...}`",
                    ));
                }
                let (key, body) = m.iter().next().expect("checked length");
                let kind = key_string(key, &path)?;
                let path = join(&path, &kind);
                let body = as_mapping(body, &path)?;
                let name = as_str(require(body, "name", &path)?, &join(&path, "name"))?;
                let demand = parse_demand_body(&kind, body, &path, ctx, "name")?;
                add(name.to_string(), demand, &path)?;
            }
        }
        Value::Mapping(entries) => {
            for (key, body) in entries {
                let key = key_string(key, path)?;
                let path = join(path, &key);
                let body = as_mapping(body, &path)?;
                if get(body, "type").is_some() {
                    // Name-keyed form: the key is the demand name.
                    let kind =
                        as_str(require(body, "type", &path)?, &join(&path, "type"))?.to_string();
                    let demand = parse_demand_body(&kind, body, &path, ctx, "type")?;
                    add(key, demand, &path)?;
                } else if DEMAND_TYPES.contains(&key.as_str()) && get(body, "name").is_some() {
                    // Type-keyed form with a `name:` field (valid YAML allows
                    // at most one demand per type in this shape).
                    let name = as_str(require(body, "name", &path)?, &join(&path, "name"))?;
                    let demand = parse_demand_body(&key, body, &path, ctx, "name")?;
                    add(name.to_string(), demand, &path)?;
                } else {
                    return Err(schema(
                        &path,
                        "expected a `type:` field naming the demand type, or a demand-type key \
                         (Electricity, FixedTemperatureHeat, Gas) with a `name:` field",
                    ));
                }
            }
        }
        _ => {
            return Err(schema(
                path,
                format!(
                    "expected a sequence of single-key mappings or a name-keyed mapping, \
                     found {}",
                    type_name(v)
                ),
            ))
        }
    }
    Ok(())
}

fn parse_demand_body(
    kind: &str,
    m: &Mapping,
    path: &str,
    ctx: &Ctx,
    consumed: &str,
) -> Result<Demand, YamlError> {
    match kind {
        "Electricity" => {
            reject_unknown(m, &[consumed, "time_series"], path)?;
            Ok(Demand::Electricity { time_series: ctx.req_series(m, "time_series", path)? })
        }
        "FixedTemperatureHeat" => {
            reject_unknown(
                m,
                &[consumed, "time_series", "flow_temperature", "return_temperature"],
                path,
            )?;
            Ok(Demand::FixedTemperatureHeat {
                flow_temperature: req_f64(m, "flow_temperature", path)?,
                return_temperature: req_f64(m, "return_temperature", path)?,
                time_series: ctx.req_series(m, "time_series", path)?,
            })
        }
        "Gas" => {
            reject_unknown(m, &[consumed, "time_series", "gas", "pressure"], path)?;
            Ok(Demand::Gas {
                gas: opt_gas_kind(m, "gas", path)?,
                pressure: req_f64(m, "pressure", path)?,
                time_series: ctx.req_series(m, "time_series", path)?,
            })
        }
        other => Err(schema(
            path,
            format!(
                "unknown demand type {other:?} (expected Electricity, FixedTemperatureHeat, \
                 or Gas)"
            ),
        )),
    }
}

fn parse_components(
    location: &mut Location,
    v: &Value,
    path: &str,
    ctx: &Ctx,
) -> Result<(), YamlError> {
    let m = as_mapping(v, path)?;
    for (key, body) in m {
        let kind = key_string(key, path)?;
        let path = join(path, &kind);
        let body = as_mapping(body, &path)?;
        reject_unknown(body, &["parameters"], &path)?;
        let params = require(body, "parameters", &path)?;
        let path = join(&path, "parameters");
        let params = as_mapping(params, &path)?;
        let component = parse_component(&kind, params, &path, ctx)?;
        location.add_component(component).map_err(|e| schema(&path, e.to_string()))?;
    }
    Ok(())
}

fn parse_component(
    kind: &str,
    m: &Mapping,
    path: &str,
    ctx: &Ctx,
) -> Result<Component, YamlError> {
    Ok(match kind {
        "HeatPump" => {
            reject_unknown(m, &["cop_0_35", "thermal_power_limit"], path)?;
            Component::HeatPump(HeatPump {
                thermal_power_limit: opt_f64(m, "thermal_power_limit", path)?,
                cop_0_35: req_f64(m, "cop_0_35", path)?,
            })
        }
        "AirHeatExchanger" => {
            reject_unknown(m, &["air_temperature", "power_limit"], path)?;
            Component::AirHeatExchanger(AirHeatExchanger {
                air_temperature: ctx.req_series(m, "air_temperature", path)?,
                power_limit: ctx.opt_series(m, "power_limit", path)?,
            })
        }
        "GeothermalSource" => {
            reject_unknown(m, &["temperature", "power_limit", "total_limit"], path)?;
            Component::GeothermalSource(GeothermalSource {
                temperature: ctx.req_series(m, "temperature", path)?,
                power_limit: ctx.req_series(m, "power_limit", path)?,
                total_limit: opt_f64(m, "total_limit", path)?,
            })
        }
        "CHP" => {
            reject_unknown(
                m,
                &[
                    "model",
                    "gas",
                    "nominal_input",
                    "electrical_efficiency",
                    "thermal_efficiency",
                    "min_load",
                    "min_load_electrical_efficiency",
                    "min_load_thermal_efficiency",
                    "outlet_temperature",
                ],
                path,
            )?;
            let model = match get(m, "model") {
                None => ChpModel::ConstantEfficiency,
                Some(v) => match as_str(v, &join(path, "model"))? {
                    "constant_efficiency" => ChpModel::ConstantEfficiency,
                    "offset_linear" => ChpModel::OffsetLinear,
                    other => {
                        return Err(schema(
                            &join(path, "model"),
                            format!(
                                "unknown CHP model {other:?} (expected constant_efficiency or \
                                 offset_linear)"
                            ),
                        ))
                    }
                },
            };
            Component::Chp(Chp {
                model,
                gas: opt_gas_kind(m, "gas", path)?,
                nominal_input: req_f64(m, "nominal_input", path)?,
                electrical_efficiency: req_f64(m, "electrical_efficiency", path)?,
                thermal_efficiency: req_f64(m, "thermal_efficiency", path)?,
                min_load: opt_f64(m, "min_load", path)?,
                min_load_electrical_efficiency: opt_f64(
                    m,
                    "min_load_electrical_efficiency",
                    path,
                )?,
                min_load_thermal_efficiency: opt_f64(m, "min_load_thermal_efficiency", path)?,
                outlet_temperature: req_f64(m, "outlet_temperature", path)?,
            })
        }
        "RenewableSource" => {
            reject_unknown(m, &["max_power", "kind"], path)?;
            let kind = match as_str(require(m, "kind", path)?, &join(path, "kind"))? {
                "pv" => RenewableKind::Pv,
                "wind" => RenewableKind::Wind,
                "hydro" => RenewableKind::Hydro,
                other => {
                    return Err(schema(
                        &join(path, "kind"),
                        format!("unknown renewable kind {other:?} (expected pv, wind, or hydro)"),
                    ))
                }
            };
            Component::RenewableSource(RenewableSource {
                max_power: ctx.req_series(m, "max_power", path)?,
                kind,
            })
        }
        "Electrolyzer" => {
            reject_unknown(
                m,
                &[
                    "nominal_power",
                    "hydrogen_efficiency",
                    "waste_heat_efficiency",
                    "output_pressure",
                    "waste_heat_temperature",
                ],
                path,
            )?;
            Component::Electrolyzer(Electrolyzer {
                nominal_power: req_f64(m, "nominal_power", path)?,
                hydrogen_efficiency: req_f64(m, "hydrogen_efficiency", path)?,
                waste_heat_efficiency: req_f64(m, "waste_heat_efficiency", path)?,
                output_pressure: f64_or(
                    m,
                    "output_pressure",
                    path,
                    Electrolyzer::DEFAULT_OUTPUT_PRESSURE,
                )?,
                waste_heat_temperature: f64_or(
                    m,
                    "waste_heat_temperature",
                    path,
                    Electrolyzer::DEFAULT_WASTE_HEAT_TEMPERATURE,
                )?,
            })
        }
        "Compressor" => {
            reject_unknown(
                m,
                &["gas", "outlet_pressures", "power_limit", "specific_work_coefficient"],
                path,
            )?;
            Component::Compressor(Compressor {
                gas: opt_gas_kind(m, "gas", path)?,
                outlet_pressures: req_f64_list(m, "outlet_pressures", path)?,
                power_limit: opt_f64(m, "power_limit", path)?,
                specific_work_coefficient: req_f64(m, "specific_work_coefficient", path)?,
            })
        }
        "Battery" => {
            reject_unknown(
                m,
                &[
                    "capacity",
                    "charge_limit",
                    "discharge_limit",
                    "soc_bands",
                    "loss_rate",
                    "initial_content",
                    "cyclic",
                ],
                path,
            )?;
            let soc_bands = match get(m, "soc_bands") {
                None => Vec::new(),
                Some(v) => {
                    let bands_path = join(path, "soc_bands");
                    let items = as_sequence(v, &bands_path)?;
                    let mut bands = Vec::with_capacity(items.len());
                    for (i, item) in items.iter().enumerate() {
                        let path = format!("{bands_path}[{i}]");
                        let bm = as_mapping(item, &path)?;
                        reject_unknown(bm, &["soc", "charge_limit"], &path)?;
                        bands.push(SocBand {
                            soc: req_f64(bm, "soc", &path)?,
                            charge_limit: req_f64(bm, "charge_limit", &path)?,
                        });
                    }
                    bands
                }
            };
            Component::Battery(Battery {
                capacity: req_f64(m, "capacity", path)?,
                charge_limit: req_f64(m, "charge_limit", path)?,
                discharge_limit: req_f64(m, "discharge_limit", path)?,
                soc_bands,
                loss_rate: f64_or(m, "loss_rate", path, 0.0)?,
                initial_content: f64_or(m, "initial_content", path, 0.0)?,
                cyclic: opt_bool_or(m, "cyclic", path, false)?,
            })
        }
        "MixedHeatStorage" => {
            reject_unknown(m, &["capacity", "loss_rate", "initial_content", "cyclic"], path)?;
            Component::MixedHeatStorage(MixedHeatStorage {
                capacity: req_f64(m, "capacity", path)?,
                loss_rate: f64_or(m, "loss_rate", path, 0.0)?,
                initial_content: f64_or(m, "initial_content", path, 0.0)?,
                cyclic: opt_bool_or(m, "cyclic", path, false)?,
            })
        }
        "LayeredHeatStorage" => {
            reject_unknown(m, &["capacity", "loss_rate", "initial_contents", "cyclic"], path)?;
            Component::LayeredHeatStorage(LayeredHeatStorage {
                capacity: req_f64(m, "capacity", path)?,
                loss_rate: f64_or(m, "loss_rate", path, 0.0)?,
                initial_contents: opt_f64_list(m, "initial_contents", path)?,
                cyclic: opt_bool_or(m, "cyclic", path, false)?,
            })
        }
        "GasStorage" => {
            reject_unknown(
                m,
                &[
                    "gas",
                    "c_e",
                    "max_pressure",
                    "level_output_limits",
                    "level_input_limits",
                    "aggregate_output_limit",
                    "aggregate_input_limit",
                    "weights",
                    "loss_rate",
                    "initial_content",
                    "cyclic",
                ],
                path,
            )?;
            Component::GasStorage(GasStorage {
                gas: opt_gas_kind(m, "gas", path)?,
                c_e: req_f64(m, "c_e", path)?,
                max_pressure: req_f64(m, "max_pressure", path)?,
                level_output_limits: opt_f64_list(m, "level_output_limits", path)?,
                level_input_limits: opt_f64_list(m, "level_input_limits", path)?,
                aggregate_output_limit: opt_f64(m, "aggregate_output_limit", path)?,
                aggregate_input_limit: opt_f64(m, "aggregate_input_limit", path)?,
                weights: opt_f64_list(m, "weights", path)?,
                loss_rate: f64_or(m, "loss_rate", path, 0.0)?,
                initial_content: f64_or(m, "initial_content", path, 0.0)?,
                cyclic: opt_bool_or(m, "cyclic", path, false)?,
            })
        }
        other => {
            return Err(schema(
                path,
                format!(
                    "unknown component kind {other:?} (expected one of: AirHeatExchanger, \
                     Battery, CHP, Compressor, Electrolyzer, GasStorage, GeothermalSource, \
                     HeatPump, LayeredHeatStorage, MixedHeatStorage, RenewableSource)"
                ),
            ))
        }
    })
}

fn parse_link(v: &Value, path: &str) -> Result<Link, YamlError> {
    let m = as_mapping(v, path)?;
    let carrier_text = as_str(require(m, "carrier", path)?, &join(path, "carrier"))?;
    let base_keys = ["a", "b", "carrier", "capacity_ab", "capacity_ba"];
    let carrier = match carrier_text {
        "electricity" => {
            reject_unknown(m, &base_keys, path)?;
            LinkCarrier::Electricity
        }
        "heat" => {
            let mut keys = base_keys.to_vec();
            keys.push("temperature");
            reject_unknown(m, &keys, path)?;
            LinkCarrier::Heat { temperature: req_f64(m, "temperature", path)? }
        }
        "gas" => {
            let mut keys = base_keys.to_vec();
            keys.extend(["gas", "pressure"]);
            reject_unknown(m, &keys, path)?;
            LinkCarrier::Gas {
                gas: opt_gas_kind(m, "gas", path)?.unwrap_or(GasKind::NaturalGas),
                pressure: req_f64(m, "pressure", path)?,
            }
        }
        other => {
            return Err(schema(
                &join(path, "carrier"),
                format!("unknown link carrier {other:?} (expected electricity, heat, or gas)"),
            ))
        }
    };
    Ok(Link {
        a: as_str(require(m, "a", path)?, &join(path, "a"))?.to_string(),
        b: as_str(require(m, "b", path)?, &join(path, "b"))?.to_string(),
        carrier,
        capacity_ab: opt_f64(m, "capacity_ab", path)?,
        capacity_ba: opt_f64(m, "capacity_ba", path)?,
    })
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

fn kv(m: &mut Mapping, key: &str, value: impl Into<Value>) {
    m.insert(Value::String(key.to_string()), value.into());
}

fn series_value(series: &TimeSeries) -> Value {
    let values: Vec<Value> = series.values.iter().map(|&v| Value::from(v)).collect();
    match &series.unit {
        None => Value::Sequence(values),
        Some(unit) => {
            let mut m = Mapping::new();
            kv(&mut m, "unit", unit.as_str());
            kv(&mut m, "values", Value::Sequence(values));
            Value::Mapping(m)
        }
    }
}

fn f64_seq(values: &[f64]) -> Value {
    Value::Sequence(values.iter().map(|&v| Value::from(v)).collect())
}

/// Renders a system as a canonical YAML document: sorted keys within each
/// section, demands in sequence form, and every series inlined so the
/// document reproduces the run without external files.
pub fn export_yaml(system: &EnergySystem) -> String {
    let mut root = Mapping::new();

    let index = system.time_index();
    let mut timeindex = Mapping::new();
    kv(&mut timeindex, "start", index.start().format("%Y-%m-%d %H:%M:%S").to_string());
    kv(&mut timeindex, "end", index.end().format("%Y-%m-%d %H:%M:%S").to_string());
    let freq = index.freq().map(str::to_string).unwrap_or_else(|| {
        // Irregular axes carry no frequency; fall back to the first step.
        let minutes = ((index.boundaries()[1] - index.boundaries()[0]).num_seconds()) / 60;
        format!("{minutes}T")
    });
    kv(&mut timeindex, "freq", freq);
    let mut general = Mapping::new();
    kv(&mut general, "timeindex", Value::Mapping(timeindex));
    if !system.links().is_empty() {
        let links: Vec<Value> = system.links().iter().map(link_value).collect();
        kv(&mut general, "links", Value::Sequence(links));
    }
    kv(&mut root, "general", Value::Mapping(general));

    let mut locations = Mapping::new();
    for (name, location) in system.locations() {
        kv(&mut locations, name, location_value(location));
    }
    kv(&mut root, "locations", Value::Mapping(locations));

    serde_yaml::to_string(&Value::Mapping(root)).expect("a mapping of plain values serialises")
}

fn link_value(link: &Link) -> Value {
    let mut m = Mapping::new();
    kv(&mut m, "a", link.a.as_str());
    kv(&mut m, "b", link.b.as_str());
    match &link.carrier {
        LinkCarrier::Electricity => kv(&mut m, "carrier", "electricity"),
        LinkCarrier::Heat { temperature } => {
            kv(&mut m, "carrier", "heat");
            kv(&mut m, "temperature", *temperature);
        }
        LinkCarrier::Gas { gas, pressure } => {
            kv(&mut m, "carrier", "gas");
            kv(&mut m, "gas", gas.key());
            kv(&mut m, "pressure", *pressure);
        }
    }
    if let Some(c) = link.capacity_ab {
        kv(&mut m, "capacity_ab", c);
    }
    if let Some(c) = link.capacity_ba {
        kv(&mut m, "capacity_ba", c);
    }
    Value::Mapping(m)
}

fn location_value(location: &Location) -> Value {
    let mut m = Mapping::new();

    let mut carriers = Mapping::new();
    if let Some(c) = location.electricity() {
        let mut em = Mapping::new();
        if let Some(p) = c.demand_rate {
            kv(&mut em, "demand_rate", p);
        }
        if let Some(p) = c.feed_in_price {
            kv(&mut em, "feed_in_price", p);
        }
        if let Some(p) = c.working_price {
            kv(&mut em, "working_price", p);
        }
        kv(&mut carriers, "Electricity", Value::Mapping(em));
    }
    if !location.gas_carriers().is_empty() {
        let gases: Vec<Value> = location
            .gas_carriers()
            .values()
            .map(|c| {
                let mut gm = Mapping::new();
                kv(&mut gm, "gas", c.gas.key());
                kv(&mut gm, "pressure_levels", f64_seq(&c.pressure_levels));
                if let Some(p) = c.working_price {
                    kv(&mut gm, "working_price", p);
                }
                Value::Mapping(gm)
            })
            .collect();
        kv(&mut carriers, "Gas", Value::Sequence(gases));
    }
    if let Some(c) = location.heat() {
        let mut hm = Mapping::new();
        kv(&mut hm, "reference_temperature", c.reference_temperature);
        kv(&mut hm, "temperature_levels", f64_seq(&c.temperature_levels));
        kv(&mut carriers, "Heat", Value::Mapping(hm));
    }
    if !carriers.is_empty() {
        kv(&mut m, "carriers", Value::Mapping(carriers));
    }

    let mut components = Vec::new();
    for component in location.components().values() {
        components.push(component_entry(component));
    }
    components.sort_by_key(|(a, _)| *a);
    if !components.is_empty() {
        let mut cm = Mapping::new();
        for (kind, params) in components {
            let mut body = Mapping::new();
            kv(&mut body, "parameters", Value::Mapping(params));
            kv(&mut cm, kind, Value::Mapping(body));
        }
        kv(&mut m, "components", Value::Mapping(cm));
    }

    if !location.demands().is_empty() {
        let demands: Vec<Value> = location
            .demands()
            .iter()
            .map(|(name, demand)| demand_entry(name, demand))
            .collect();
        kv(&mut m, "demands", Value::Sequence(demands));
    }

    Value::Mapping(m)
}

fn demand_entry(name: &str, demand: &Demand) -> Value {
    let mut body = Mapping::new();
    let kind = match demand {
        Demand::Electricity { time_series } => {
            kv(&mut body, "name", name);
            kv(&mut body, "time_series", series_value(time_series));
            "Electricity"
        }
        Demand::FixedTemperatureHeat { flow_temperature, return_temperature, time_series } => {
            kv(&mut body, "flow_temperature", *flow_temperature);
            kv(&mut body, "name", name);
            kv(&mut body, "return_temperature", *return_temperature);
            kv(&mut body, "time_series", series_value(time_series));
            "FixedTemperatureHeat"
        }
        Demand::Gas { gas, pressure, time_series } => {
            if let Some(gas) = gas {
                kv(&mut body, "gas", gas.key());
            }
            kv(&mut body, "name", name);
            kv(&mut body, "pressure", *pressure);
            kv(&mut body, "time_series", series_value(time_series));
            "Gas"
        }
    };
    let mut entry = Mapping::new();
    kv(&mut entry, kind, Value::Mapping(body));
    Value::Mapping(entry)
}

/// Parameter mapping for one component, with alphabetically ordered keys.
fn component_entry(component: &Component) -> (&'static str, Mapping) {
    let mut p = Mapping::new();
    let kind = match component {
        Component::HeatPump(c) => {
            kv(&mut p, "cop_0_35", c.cop_0_35);
            if let Some(l) = c.thermal_power_limit {
                kv(&mut p, "thermal_power_limit", l);
            }
            "HeatPump"
        }
        Component::AirHeatExchanger(c) => {
            kv(&mut p, "air_temperature", series_value(&c.air_temperature));
            if let Some(l) = &c.power_limit {
                kv(&mut p, "power_limit", series_value(l));
            }
            "AirHeatExchanger"
        }
        Component::GeothermalSource(c) => {
            kv(&mut p, "power_limit", series_value(&c.power_limit));
            kv(&mut p, "temperature", series_value(&c.temperature));
            if let Some(l) = c.total_limit {
                kv(&mut p, "total_limit", l);
            }
            "GeothermalSource"
        }
        Component::Chp(c) => {
            kv(&mut p, "electrical_efficiency", c.electrical_efficiency);
            if let Some(g) = c.gas {
                kv(&mut p, "gas", g.key());
            }
            if let Some(v) = c.min_load {
                kv(&mut p, "min_load", v);
            }
            if let Some(v) = c.min_load_electrical_efficiency {
                kv(&mut p, "min_load_electrical_efficiency", v);
            }
            if let Some(v) = c.min_load_thermal_efficiency {
                kv(&mut p, "min_load_thermal_efficiency", v);
            }
            let model = match c.model {
                ChpModel::ConstantEfficiency => "constant_efficiency",
                ChpModel::OffsetLinear => "offset_linear",
            };
            kv(&mut p, "model", model);
            kv(&mut p, "nominal_input", c.nominal_input);
            kv(&mut p, "outlet_temperature", c.outlet_temperature);
            kv(&mut p, "thermal_efficiency", c.thermal_efficiency);
            "CHP"
        }
        Component::RenewableSource(c) => {
            kv(&mut p, "kind", c.kind.key());
            kv(&mut p, "max_power", series_value(&c.max_power));
            "RenewableSource"
        }
        Component::Electrolyzer(c) => {
            kv(&mut p, "hydrogen_efficiency", c.hydrogen_efficiency);
            kv(&mut p, "nominal_power", c.nominal_power);
            kv(&mut p, "output_pressure", c.output_pressure);
            kv(&mut p, "waste_heat_efficiency", c.waste_heat_efficiency);
            kv(&mut p, "waste_heat_temperature", c.waste_heat_temperature);
            "Electrolyzer"
        }
        Component::Compressor(c) => {
            if let Some(g) = c.gas {
                kv(&mut p, "gas", g.key());
            }
            kv(&mut p, "outlet_pressures", f64_seq(&c.outlet_pressures));
            if let Some(l) = c.power_limit {
                kv(&mut p, "power_limit", l);
            }
            kv(&mut p, "specific_work_coefficient", c.specific_work_coefficient);
            "Compressor"
        }
        Component::Battery(c) => {
            kv(&mut p, "capacity", c.capacity);
            kv(&mut p, "charge_limit", c.charge_limit);
            kv(&mut p, "cyclic", c.cyclic);
            kv(&mut p, "discharge_limit", c.discharge_limit);
            kv(&mut p, "initial_content", c.initial_content);
            kv(&mut p, "loss_rate", c.loss_rate);
            if !c.soc_bands.is_empty() {
                let bands: Vec<Value> = c
                    .soc_bands
                    .iter()
                    .map(|b| {
                        let mut bm = Mapping::new();
                        kv(&mut bm, "charge_limit", b.charge_limit);
                        kv(&mut bm, "soc", b.soc);
                        Value::Mapping(bm)
                    })
                    .collect();
                kv(&mut p, "soc_bands", Value::Sequence(bands));
            }
            "Battery"
        }
        Component::MixedHeatStorage(c) => {
            kv(&mut p, "capacity", c.capacity);
            kv(&mut p, "cyclic", c.cyclic);
            kv(&mut p, "initial_content", c.initial_content);
            kv(&mut p, "loss_rate", c.loss_rate);
            "MixedHeatStorage"
        }
        Component::LayeredHeatStorage(c) => {
            kv(&mut p, "capacity", c.capacity);
            kv(&mut p, "cyclic", c.cyclic);
            if let Some(init) = &c.initial_contents {
                kv(&mut p, "initial_contents", f64_seq(init));
            }
            kv(&mut p, "loss_rate", c.loss_rate);
            "LayeredHeatStorage"
        }
        Component::GasStorage(c) => {
            if let Some(l) = c.aggregate_input_limit {
                kv(&mut p, "aggregate_input_limit", l);
            }
            if let Some(l) = c.aggregate_output_limit {
                kv(&mut p, "aggregate_output_limit", l);
            }
            kv(&mut p, "c_e", c.c_e);
            kv(&mut p, "cyclic", c.cyclic);
            if let Some(g) = c.gas {
                kv(&mut p, "gas", g.key());
            }
            kv(&mut p, "initial_content", c.initial_content);
            if let Some(l) = &c.level_input_limits {
                kv(&mut p, "level_input_limits", f64_seq(l));
            }
            if let Some(l) = &c.level_output_limits {
                kv(&mut p, "level_output_limits", f64_seq(l));
            }
            kv(&mut p, "loss_rate", c.loss_rate);
            kv(&mut p, "max_pressure", c.max_pressure);
            if let Some(w) = &c.weights {
                kv(&mut p, "weights", f64_seq(w));
            }
            "GasStorage"
        }
    };
    (kind, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::sample_home;
    use std::path::PathBuf;

    fn base() -> PathBuf {
        PathBuf::from(".")
    }

    /// A full document in canonical shape: demands as a sequence of
    /// single-key maps, series inline, comments and trailing-dot floats.
    const SAMPLE_DOCUMENT: &str = r#"
general:
  timeindex:
    start: 2021-07-10 06:00:00
    end: 2021-07-10 08:00:00
    freq: 60T

locations:
  SFH:
    carriers:
      Heat:
        temperature_levels:
          - 20. # °C
          - 30. # °C
          - 55. # °C
        reference_temperature: 10 # °C
      Electricity:
        demand_rate: 0  # ct/kW
        working_price: 35  # ct/kWh

    demands:
      - Electricity:
          name: "electricity demand"
          time_series: [7, 8.4]  # kW
      - FixedTemperatureHeat:
          name: "space heating"
          time_series:
            - 13.37  # kW
            - 42  # kW
          flow_temperature: 30 # °C
          return_temperature: 20 # °C
      - FixedTemperatureHeat:
          name: "hot water"
          time_series:
            - 0  # kW
            - 12  # kW
          flow_temperature: 55 # °C
          return_temperature: 10 # °C

    components:
      AirHeatExchanger:
        parameters:
          air_temperature: [3, 9]  # °C
      HeatPump:
        parameters:
          cop_0_35: 3.8
"#;

    #[test]
    fn the_sample_document_equals_the_builder_construction() {
        let parsed = parse(SAMPLE_DOCUMENT, &base()).unwrap();
        assert_eq!(parsed, sample_home());
        // Determinism: parsing the same bytes twice yields equal systems.
        assert_eq!(parsed, parse(SAMPLE_DOCUMENT, &base()).unwrap());
    }

    #[test]
    fn name_keyed_demands_with_type_fields_parse_identically() {
        let doc = SAMPLE_DOCUMENT.replace(
            r#"    demands:
      - Electricity:
          name: "electricity demand"
          time_series: [7, 8.4]  # kW
      - FixedTemperatureHeat:
          name: "space heating"
          time_series:
            - 13.37  # kW
            - 42  # kW
          flow_temperature: 30 # °C
          return_temperature: 20 # °C
      - FixedTemperatureHeat:
          name: "hot water"
          time_series:
            - 0  # kW
            - 12  # kW
          flow_temperature: 55 # °C
          return_temperature: 10 # °C"#,
            r#"    demands:
      electricity demand:
        type: Electricity
        time_series: [7, 8.4]
      space heating:
        type: FixedTemperatureHeat
        time_series: [13.37, 42]
        flow_temperature: 30
        return_temperature: 20
      hot water:
        type: FixedTemperatureHeat
        time_series: [0, 12]
        flow_temperature: 55
        return_temperature: 10"#,
        );
        assert_eq!(parse(&doc, &base()).unwrap(), sample_home());
    }

    #[test]
    fn type_keyed_demands_with_name_fields_are_accepted() {
        let doc = r#"
general:
  timeindex: {start: 2021-07-10 06:00:00, end: 2021-07-10 08:00:00, freq: 60T}
locations:
  SFH:
    carriers:
      Electricity: {working_price: 35}
    demands:
      Electricity:
        name: "electricity demand"
        time_series: [7, 8.4]
"#;
        let system = parse(doc, &base()).unwrap();
        let demands = system.locations()["SFH"].demands();
        assert!(demands.contains_key("electricity demand"));
    }

    #[test]
    fn wrong_series_length_is_a_length_mismatch() {
        let doc = SAMPLE_DOCUMENT.replace("time_series: [7, 8.4]  # kW", "time_series: [7]");
        match parse(&doc, &base()) {
            Err(YamlError::SeriesLengthMismatch { path, expected, found }) => {
                assert_eq!(path, "locations.SFH.demands[0].Electricity.time_series");
                assert_eq!((expected, found), (2, 1));
            }
            other => panic!("expected SeriesLengthMismatch, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let top = "general: {timeindex: {start: 2021-07-10 06:00, end: 2021-07-10 08:00, freq: 60T}}\nlocations: {}\nextras: 1\n";
        match parse(top, &base()) {
            Err(YamlError::Schema { path, .. }) => assert_eq!(path, "extras"),
            other => panic!("expected Schema error, got {other:?}"),
        }

        let nested = SAMPLE_DOCUMENT.replace("        working_price: 35", "        standing_price: 35");
        match parse(&nested, &base()) {
            Err(YamlError::Schema { path, .. }) => {
                assert_eq!(path, "locations.SFH.carriers.Electricity.standing_price");
            }
            other => panic!("expected Schema error, got {other:?}"),
        }

        let param = SAMPLE_DOCUMENT.replace("          cop_0_35: 3.8", "          cop: 3.8");
        match parse(&param, &base()) {
            Err(YamlError::Schema { path, .. }) => {
                assert_eq!(path, "locations.SFH.components.HeatPump.parameters.cop");
            }
            other => panic!("expected Schema error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_dot_floats_are_numbers() {
        let parsed = parse(SAMPLE_DOCUMENT, &base()).unwrap();
        let heat = parsed.locations()["SFH"].heat().unwrap();
        assert_eq!(heat.temperature_levels, vec![20.0, 30.0, 55.0]);
    }

    #[test]
    fn file_references_resolve_against_the_base_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("weather.csv"),
            "time,temperature (°C)\n\
             2021-07-10 06:00:00,3\n\
             2021-07-10 07:00:00,9\n\
             2021-07-10 08:00:00,NaN\n",
        )
        .unwrap();
        let doc = SAMPLE_DOCUMENT.replace(
            "air_temperature: [3, 9]  # °C",
            "air_temperature: file=weather.csv:temperature (°C)",
        );
        let system = parse(&doc, dir.path()).unwrap();
        let Component::AirHeatExchanger(ahe) =
            &system.locations()["SFH"].components()[&crate::model::ComponentKind::AirHeatExchanger]
        else {
            panic!("air heat exchanger present")
        };
        assert_eq!(ahe.air_temperature.values, vec![3.0, 9.0]);
        assert_eq!(ahe.air_temperature.unit.as_deref(), Some("°C"));

        // Exported documents inline the resolved values: self-contained.
        let exported = export_yaml(&system);
        assert!(!exported.contains("file="));
        assert_eq!(parse(&exported, &base()).unwrap(), system);
    }

    #[test]
    fn sample_home_round_trips_through_export() {
        let system = sample_home();
        let text = export_yaml(&system);
        assert_eq!(parse(&text, &base()).unwrap(), system);
    }

    #[test]
    fn empty_system_exports_empty_locations() {
        let system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        let text = export_yaml(&system);
        assert!(text.contains("locations: {}"), "got:\n{text}");
        assert_eq!(parse(&text, &base()).unwrap(), system);
    }

    /// A system exercising every component kind, gas carriers, SOC bands,
    /// and links, to pin the full round trip.
    fn kitchen_sink() -> EnergySystem {
        let mut system = EnergySystem::new(
            TimeIndex::parse("2021-07-10 06:00:00", "2021-07-10 08:00:00", "60T").unwrap(),
        );
        let mut a = Location::new("A");
        a.add_carrier(Carrier::Electricity(ElectricityCarrier {
            working_price: Some(35.0),
            demand_rate: Some(12.0),
            feed_in_price: Some(6.5),
        }))
        .unwrap();
        a.add_carrier(Carrier::Heat(HeatCarrier {
            temperature_levels: vec![20.0, 55.0],
            reference_temperature: 10.0,
        }))
        .unwrap();
        a.add_component(Component::HeatPump(HeatPump {
            thermal_power_limit: Some(40.0),
            cop_0_35: 3.8,
        }))
        .unwrap();
        a.add_component(Component::AirHeatExchanger(AirHeatExchanger {
            air_temperature: TimeSeries { values: vec![3.0, 9.0], unit: Some("°C".into()) },
            power_limit: Some(vec![30.0, 30.0].into()),
        }))
        .unwrap();
        a.add_component(Component::GeothermalSource(GeothermalSource {
            temperature: vec![10.0, 10.0].into(),
            power_limit: vec![5.0, 5.0].into(),
            total_limit: Some(9.0),
        }))
        .unwrap();
        a.add_component(Component::RenewableSource(RenewableSource {
            max_power: vec![5.0, 0.0].into(),
            kind: RenewableKind::Wind,
        }))
        .unwrap();
        a.add_component(Component::Battery(Battery {
            capacity: 10.0,
            charge_limit: 5.0,
            discharge_limit: 5.0,
            soc_bands: vec![SocBand { soc: 0.7, charge_limit: 2.0 }],
            loss_rate: 0.01,
            initial_content: 5.0,
            cyclic: true,
        }))
        .unwrap();
        a.add_component(Component::MixedHeatStorage(MixedHeatStorage {
            capacity: 40.0,
            loss_rate: 0.02,
            initial_content: 10.0,
            cyclic: false,
        }))
        .unwrap();
        a.add_demand(
            "warmth",
            Demand::FixedTemperatureHeat {
                flow_temperature: 55.0,
                return_temperature: 20.0,
                time_series: vec![1.0, 2.0].into(),
            },
        )
        .unwrap();
        system.add_location(a).unwrap();

        let mut b = Location::new("B");
        b.add_carrier(Carrier::Electricity(ElectricityCarrier {
            working_price: Some(30.0),
            ..Default::default()
        }))
        .unwrap();
        b.add_carrier(Carrier::Heat(HeatCarrier {
            temperature_levels: vec![55.0],
            reference_temperature: 10.0,
        }))
        .unwrap();
        b.add_carrier(Carrier::Gas(GasCarrier {
            gas: GasKind::NaturalGas,
            pressure_levels: vec![1.0],
            working_price: Some(7.0),
        }))
        .unwrap();
        b.add_carrier(Carrier::Gas(GasCarrier {
            gas: GasKind::Hydrogen,
            pressure_levels: vec![30.0, 350.0],
            working_price: None,
        }))
        .unwrap();
        b.add_component(Component::Chp(Chp {
            model: ChpModel::OffsetLinear,
            gas: Some(GasKind::NaturalGas),
            nominal_input: 20.0,
            electrical_efficiency: 0.3,
            thermal_efficiency: 0.55,
            min_load: Some(0.5),
            min_load_electrical_efficiency: Some(0.25),
            min_load_thermal_efficiency: Some(0.5),
            outlet_temperature: 55.0,
        }))
        .unwrap();
        b.add_component(Component::Electrolyzer(Electrolyzer {
            nominal_power: 50.0,
            hydrogen_efficiency: 0.6,
            waste_heat_efficiency: 0.2,
            output_pressure: 30.0,
            waste_heat_temperature: 77.0,
        }))
        .unwrap();
        b.add_component(Component::Compressor(Compressor {
            gas: Some(GasKind::Hydrogen),
            outlet_pressures: vec![350.0],
            power_limit: Some(5.0),
            specific_work_coefficient: 0.08,
        }))
        .unwrap();
        b.add_component(Component::GasStorage(GasStorage {
            gas: Some(GasKind::Hydrogen),
            c_e: 0.1,
            max_pressure: 350.0,
            level_output_limits: Some(vec![8.0, 8.0]),
            level_input_limits: None,
            aggregate_output_limit: Some(10.0),
            aggregate_input_limit: None,
            weights: Some(vec![1.0, 2.0]),
            loss_rate: 0.0,
            initial_content: 3.0,
            cyclic: false,
        }))
        .unwrap();
        b.add_component(Component::LayeredHeatStorage(LayeredHeatStorage {
            capacity: 45.0,
            loss_rate: 0.01,
            initial_contents: Some(vec![20.0]),
            cyclic: false,
        }))
        .unwrap();
        b.add_demand("grid load", Demand::Electricity { time_series: vec![1.0, 1.0].into() })
            .unwrap();
        b.add_demand(
            "process gas",
            Demand::Gas { gas: Some(GasKind::Hydrogen), pressure: 30.0, time_series: vec![0.5, 0.5].into() },
        )
        .unwrap();
        system.add_location(b).unwrap();

        system.add_link(Link {
            a: "A".into(),
            b: "B".into(),
            carrier: LinkCarrier::Electricity,
            capacity_ab: Some(10.0),
            capacity_ba: None,
        });
        system.add_link(Link {
            a: "A".into(),
            b: "B".into(),
            carrier: LinkCarrier::Heat { temperature: 55.0 },
            capacity_ab: None,
            capacity_ba: Some(3.0),
        });
        system
    }

    #[test]
    fn every_component_kind_round_trips() {
        let system = kitchen_sink();
        let text = export_yaml(&system);
        let reparsed = parse(&text, &base()).unwrap();
        assert_eq!(reparsed, system);
        // And the canonical form is a fixed point.
        assert_eq!(export_yaml(&reparsed), text);
    }

    #[test]
    fn duplicate_demand_names_are_schema_errors() {
        let doc = r#"
general:
  timeindex: {start: 2021-07-10 06:00:00, end: 2021-07-10 08:00:00, freq: 60T}
locations:
  SFH:
    carriers:
      Electricity: {working_price: 35}
    demands:
      - Electricity: {name: load, time_series: [1, 2]}
      - Electricity: {name: load, time_series: [3, 4]}
"#;
        match parse(doc, &base()) {
            Err(YamlError::Schema { path, message }) => {
                assert_eq!(path, "locations.SFH.demands[1].Electricity");
                assert!(message.contains("load"), "message: {message}");
            }
            other => panic!("expected Schema error, got {other:?}"),
        }
    }
}
