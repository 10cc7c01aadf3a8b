//! Shared fixtures for the acceptance suite: the reference single-family
//! home (as YAML text and as its builder-API twin) and seeded random
//! system generators.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resopt::milp::GasKind;
use resopt::model::{
    AirHeatExchanger, Battery, Carrier, Chp, ChpModel, Component, Compressor, Demand,
    ElectricityCarrier, Electrolyzer, EnergySystem, GasCarrier, GasStorage, GeothermalSource,
    HeatCarrier, HeatPump, LayeredHeatStorage, Link, LinkCarrier, Location, MixedHeatStorage,
    RenewableKind, RenewableSource, SocBand, TimeIndex, TimeSeries,
};

/// Reference single-family home: two hourly intervals, heat at three
/// temperature levels served by an air-source heat pump, and priced grid
/// electricity.
pub const SFH_YAML: &str = r#"
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

/// The same home constructed through the builder API.
pub fn sfh_builder() -> EnergySystem {
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
        .add_demand("electricity demand", Demand::Electricity {
            time_series: vec![7.0, 8.4].into(),
        })
        .unwrap();
    house
        .add_demand("space heating", Demand::FixedTemperatureHeat {
            flow_temperature: 30.0,
            return_temperature: 20.0,
            time_series: vec![13.37, 42.0].into(),
        })
        .unwrap();
    house
        .add_demand("hot water", Demand::FixedTemperatureHeat {
            flow_temperature: 55.0,
            return_temperature: 10.0,
            time_series: vec![0.0, 12.0].into(),
        })
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

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A solvable gas-storage system: a priced grid source at the highest
/// pressure level, storage with free initial content, and demands spread
/// over the levels. The top of the `usable_levels` pressure levels sits
/// exactly at the vessel's maximum, so it is the ceiling and carries no
/// indicators; the rest are interior, giving
/// `2 · (usable_levels − 1) · nt` binaries after lowering.
pub fn random_storage_system(r: &mut ChaCha8Rng, usable_levels: usize, nt: usize) -> EnergySystem {
    let start = "2021-07-10 06:00:00";
    let end = match nt {
        1 => "2021-07-10 07:00:00",
        2 => "2021-07-10 08:00:00",
        _ => panic!("generator supports 1 or 2 intervals"),
    };
    let mut system = EnergySystem::new(TimeIndex::parse(start, end, "60T").unwrap());

    let max_pressure = 100.0;
    let mut pressures: Vec<f64> = (0..usable_levels)
        .map(|i| {
            let base = (i + 1) as f64 * max_pressure / usable_levels as f64;
            (base - r.gen_range(0.0..max_pressure / usable_levels as f64 * 0.5)).max(5.0)
        })
        .collect();
    pressures.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pressures.dedup();
    *pressures.last_mut().unwrap() = max_pressure;

    let mut site = Location::new("G");
    site.add_carrier(Carrier::Gas(GasCarrier {
        gas: GasKind::NaturalGas,
        pressure_levels: pressures.clone(),
        working_price: Some(r.gen_range(5.0..50.0)),
    }))
    .unwrap();

    let c_e = r.gen_range(0.05..0.2);
    site.add_component(Component::GasStorage(GasStorage {
        gas: None,
        c_e,
        max_pressure,
        level_output_limits: None,
        level_input_limits: None,
        aggregate_output_limit: None,
        aggregate_input_limit: None,
        weights: None,
        loss_rate: 0.0,
        initial_content: r.gen_range(0.0..c_e * max_pressure),
        cyclic: false,
    }))
    .unwrap();

    for (i, &p) in pressures.iter().enumerate() {
        let series: Vec<f64> = (0..nt).map(|_| r.gen_range(0.0..3.0)).collect();
        site.add_demand(format!("demand {i}"), Demand::Gas {
            gas: None,
            pressure: p,
            time_series: series.into(),
        })
        .unwrap();
    }
    system.add_location(site).unwrap();
    system
}

fn maybe(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Option<f64> {
    if r.gen_bool(0.5) {
        Some(r.gen_range(lo..hi))
    } else {
        None
    }
}

fn series(r: &mut ChaCha8Rng, nt: usize) -> TimeSeries {
    TimeSeries {
        values: (0..nt).map(|_| r.gen_range(0.0..50.0)).collect(),
        unit: if r.gen_bool(0.3) { Some("kW".to_string()) } else { None },
    }
}

/// Strictly increasing values: a fixed grid with jitter.
fn increasing(r: &mut ChaCha8Rng, n: usize, base: f64, step: f64) -> Vec<f64> {
    (0..n).map(|i| base + i as f64 * step + r.gen_range(0.0..step * 0.4)).collect()
}

/// A structurally arbitrary system over the whole builder surface. Not
/// necessarily valid — round-trip identity is purely structural.
pub fn random_spec(r: &mut ChaCha8Rng) -> EnergySystem {
    let nt = r.gen_range(1..=3usize);
    let end = format!("2021-07-10 {:02}:00:00", 6 + nt);
    let mut system =
        EnergySystem::new(TimeIndex::parse("2021-07-10 06:00:00", &end, "60T").unwrap());
    let n_locs = r.gen_range(1..=2usize);
    for li in 0..n_locs {
        let mut loc = Location::new(format!("site {li}"));
        let has_heat = r.gen_bool(0.7);

        if r.gen_bool(0.9) {
            loc.add_carrier(Carrier::Electricity(ElectricityCarrier {
                working_price: maybe(r, 1.0, 60.0),
                demand_rate: maybe(r, 0.0, 20.0),
                feed_in_price: maybe(r, 0.0, 20.0),
            }))
            .unwrap();
        }
        let heat_count = r.gen_range(1..=3);
        let heat_levels = increasing(r, heat_count, 20.0, 25.0);
        if has_heat {
            loc.add_carrier(Carrier::Heat(HeatCarrier {
                temperature_levels: heat_levels.clone(),
                reference_temperature: r.gen_range(0.0..15.0),
            }))
            .unwrap();
        }
        if r.gen_bool(0.5) {
            let pressure_count = r.gen_range(1..=2);
            loc.add_carrier(Carrier::Gas(GasCarrier {
                gas: GasKind::NaturalGas,
                pressure_levels: increasing(r, pressure_count, 1.0, 4.0),
                working_price: maybe(r, 3.0, 30.0),
            }))
            .unwrap();
        }
        let has_h2 = r.gen_bool(0.4);
        if has_h2 {
            loc.add_carrier(Carrier::Gas(GasCarrier {
                gas: GasKind::Hydrogen,
                pressure_levels: increasing(r, 2, 30.0, 320.0),
                working_price: None,
            }))
            .unwrap();
        }

        if r.gen_bool(0.5) {
            loc.add_component(Component::HeatPump(HeatPump {
                thermal_power_limit: maybe(r, 10.0, 80.0),
                cop_0_35: r.gen_range(2.5..4.5),
            }))
            .unwrap();
        }
        if r.gen_bool(0.5) {
            loc.add_component(Component::AirHeatExchanger(AirHeatExchanger {
                air_temperature: series(r, nt),
                power_limit: if r.gen_bool(0.5) { Some(series(r, nt)) } else { None },
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            loc.add_component(Component::GeothermalSource(GeothermalSource {
                temperature: series(r, nt),
                power_limit: series(r, nt),
                total_limit: maybe(r, 5.0, 50.0),
            }))
            .unwrap();
        }
        if r.gen_bool(0.4) {
            let offset = r.gen_bool(0.5);
            loc.add_component(Component::Chp(Chp {
                model: if offset { ChpModel::OffsetLinear } else { ChpModel::ConstantEfficiency },
                gas: if r.gen_bool(0.5) { Some(GasKind::NaturalGas) } else { None },
                nominal_input: r.gen_range(10.0..40.0),
                electrical_efficiency: r.gen_range(0.2..0.4),
                thermal_efficiency: r.gen_range(0.4..0.6),
                min_load: if offset { Some(r.gen_range(0.2..0.6)) } else { None },
                min_load_electrical_efficiency: if offset {
                    Some(r.gen_range(0.15..0.35))
                } else {
                    None
                },
                min_load_thermal_efficiency: if offset { Some(r.gen_range(0.3..0.5)) } else { None },
                outlet_temperature: r.gen_range(40.0..90.0),
            }))
            .unwrap();
        }
        if r.gen_bool(0.4) {
            let kind = match r.gen_range(0..3) {
                0 => RenewableKind::Pv,
                1 => RenewableKind::Wind,
                _ => RenewableKind::Hydro,
            };
            loc.add_component(Component::RenewableSource(RenewableSource {
                max_power: series(r, nt),
                kind,
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            loc.add_component(Component::Electrolyzer(Electrolyzer {
                nominal_power: r.gen_range(20.0..100.0),
                hydrogen_efficiency: r.gen_range(0.5..0.7),
                waste_heat_efficiency: r.gen_range(0.1..0.3),
                output_pressure: r.gen_range(20.0..40.0),
                waste_heat_temperature: r.gen_range(60.0..90.0),
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            let outlet_count = r.gen_range(1..=2);
            loc.add_component(Component::Compressor(Compressor {
                gas: if has_h2 { Some(GasKind::Hydrogen) } else { None },
                outlet_pressures: increasing(r, outlet_count, 200.0, 300.0),
                power_limit: maybe(r, 2.0, 20.0),
                specific_work_coefficient: r.gen_range(0.02..0.2),
            }))
            .unwrap();
        }
        if r.gen_bool(0.4) {
            let bands = if r.gen_bool(0.5) {
                vec![SocBand {
                    soc: r.gen_range(0.5..0.9),
                    charge_limit: r.gen_range(1.0..5.0),
                }]
            } else {
                Vec::new()
            };
            loc.add_component(Component::Battery(Battery {
                capacity: r.gen_range(5.0..30.0),
                charge_limit: r.gen_range(2.0..10.0),
                discharge_limit: r.gen_range(2.0..10.0),
                soc_bands: bands,
                loss_rate: r.gen_range(0.0..0.05),
                initial_content: r.gen_range(0.0..5.0),
                cyclic: r.gen_bool(0.3),
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            loc.add_component(Component::MixedHeatStorage(MixedHeatStorage {
                capacity: r.gen_range(20.0..80.0),
                loss_rate: r.gen_range(0.0..0.05),
                initial_content: r.gen_range(0.0..20.0),
                cyclic: r.gen_bool(0.3),
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            let layers = heat_levels.len();
            loc.add_component(Component::LayeredHeatStorage(LayeredHeatStorage {
                capacity: r.gen_range(20.0..80.0),
                loss_rate: r.gen_range(0.0..0.05),
                initial_contents: if r.gen_bool(0.5) {
                    Some((0..layers).map(|_| r.gen_range(0.0..10.0)).collect())
                } else {
                    None
                },
                cyclic: r.gen_bool(0.3),
            }))
            .unwrap();
        }
        if r.gen_bool(0.3) {
            loc.add_component(Component::GasStorage(GasStorage {
                gas: if has_h2 { Some(GasKind::Hydrogen) } else { None },
                c_e: r.gen_range(0.05..0.3),
                max_pressure: 700.0,
                level_output_limits: None,
                level_input_limits: if r.gen_bool(0.3) { Some(vec![r.gen_range(1.0..8.0); 2]) } else { None },
                aggregate_output_limit: maybe(r, 5.0, 20.0),
                aggregate_input_limit: None,
                weights: None,
                loss_rate: r.gen_range(0.0..0.02),
                initial_content: r.gen_range(0.0..20.0),
                cyclic: false,
            }))
            .unwrap();
        }

        if r.gen_bool(0.8) {
            loc.add_demand("load", Demand::Electricity { time_series: series(r, nt) }).unwrap();
        }
        if has_heat && r.gen_bool(0.8) {
            loc.add_demand("wärme bedarf", Demand::FixedTemperatureHeat {
                flow_temperature: *heat_levels.last().unwrap(),
                return_temperature: heat_levels[0],
                time_series: series(r, nt),
            })
            .unwrap();
        }
        if r.gen_bool(0.4) {
            loc.add_demand("process: gas", Demand::Gas {
                gas: if has_h2 && r.gen_bool(0.5) { Some(GasKind::Hydrogen) } else { None },
                pressure: r.gen_range(1.0..30.0),
                time_series: series(r, nt),
            })
            .unwrap();
        }
        system.add_location(loc).unwrap();
    }
    if n_locs == 2 && r.gen_bool(0.6) {
        system.add_link(Link {
            a: "site 0".to_string(),
            b: "site 1".to_string(),
            carrier: LinkCarrier::Electricity,
            capacity_ab: maybe(r, 1.0, 20.0),
            capacity_ba: maybe(r, 1.0, 20.0),
        });
    }
    system
}
