//! Multi-level storage constraint blocks.
//!
//! A storage whose usable levels depend on its content (a pressurised gas
//! tank, a fully mixed heat tank, a battery with charge-dependent limits) is
//! linearised over a [`LevelSet`]: per level `n` a binary withdrawal
//! indicator `y_n` with `y_n ≤ E/E_n`, a binary `ŷ_n ≥ (E − E_n)/E_max`
//! whose complement `ȳ_n = 1 − ŷ_n` gates injection, and gated power flows
//! `P_out,n ≤ y_n·M`, `P_in,n ≤ ȳ_n·M`. Anchoring the indicators to the
//! end-of-interval content stops flows from crossing their own level within
//! one step. A binaries-free layered heat storage and the
//! state-of-charge-dependent battery charging reuse the same pieces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{IntervalInfo, MilpModel, Relation, VarId, VarKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StorageError {
    #[error("bad level set: {0}")]
    BadLevels(String),
    #[error("a level with zero energy content cannot carry indicator constraints")]
    ZeroLevelEnergy,
    #[error("loss rate must not be negative")]
    NegativeLoss,
}

/// How a level relates to the storage's content range, fixed at
/// construction from the domain values (no float classification later).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelRole {
    /// Zero content: always withdrawable, never chargeable, no indicators.
    Floor,
    /// Strictly inside (0, E_max): gated both ways via indicators.
    Interior,
    /// Full content: never withdrawable, always chargeable, no indicators.
    Ceiling,
}

/// One discrete level: its domain coordinate (bar, °C, or SOC fraction),
/// the storage energy content at which it sits, and its role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub energy: f64,
    pub role: LevelRole,
}

/// Ordered discrete levels with derived energy contents `E_n` and the
/// maximum content `E_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    levels: Vec<Level>,
    e_max: f64,
}

impl LevelSet {
    /// Gas storage levels: `E_n = c_e · p_n`, `E_max = c_e · max_pressure`.
    pub fn from_pressures(
        pressures: &[f64],
        c_e: f64,
        max_pressure: f64,
    ) -> Result<LevelSet, StorageError> {
        let bad = |m: &str| Err(StorageError::BadLevels(m.into()));
        if pressures.is_empty() {
            return bad("no pressure levels");
        }
        if !(c_e > 0.0 && c_e.is_finite()) {
            return bad("c_e must be positive");
        }
        if !(max_pressure > 0.0 && max_pressure.is_finite()) {
            return bad("max_pressure must be positive");
        }
        if pressures.windows(2).any(|w| w[1] <= w[0]) {
            return bad("pressures must be strictly increasing");
        }
        if pressures[0] < 0.0 {
            return bad("pressures must not be negative");
        }
        if *pressures.last().expect("nonempty") > max_pressure {
            return bad("pressures must not exceed max_pressure");
        }
        let levels = pressures
            .iter()
            .map(|&p| Level {
                value: p,
                energy: c_e * p,
                role: if p == 0.0 {
                    LevelRole::Floor
                } else if p == max_pressure {
                    LevelRole::Ceiling
                } else {
                    LevelRole::Interior
                },
            })
            .collect();
        Ok(LevelSet { levels, e_max: c_e * max_pressure })
    }

    /// Fully mixed heat storage levels: content at uniform temperature `T`
    /// scales with `T − T_ref`, and capacity is counted at the top level.
    pub fn from_temperatures(
        temperatures: &[f64],
        reference: f64,
        capacity: f64,
    ) -> Result<LevelSet, StorageError> {
        let bad = |m: &str| Err(StorageError::BadLevels(m.into()));
        if temperatures.is_empty() {
            return bad("no temperature levels");
        }
        if !(capacity > 0.0 && capacity.is_finite()) {
            return bad("capacity must be positive");
        }
        if temperatures.windows(2).any(|w| w[1] <= w[0]) {
            return bad("temperatures must be strictly increasing");
        }
        if temperatures[0] <= reference {
            return bad("temperatures must lie above the reference");
        }
        let top = *temperatures.last().expect("nonempty");
        let n = temperatures.len();
        let levels = temperatures
            .iter()
            .enumerate()
            .map(|(i, &t)| Level {
                value: t,
                energy: if i + 1 == n {
                    capacity
                } else {
                    capacity * (t - reference) / (top - reference)
                },
                role: if i + 1 == n { LevelRole::Ceiling } else { LevelRole::Interior },
            })
            .collect();
        Ok(LevelSet { levels, e_max: capacity })
    }

    /// State-of-charge thresholds as fractions of the capacity.
    pub fn from_fractions(fractions: &[f64], capacity: f64) -> Result<LevelSet, StorageError> {
        let bad = |m: &str| Err(StorageError::BadLevels(m.into()));
        if fractions.is_empty() {
            return bad("no fractions");
        }
        if !(capacity > 0.0 && capacity.is_finite()) {
            return bad("capacity must be positive");
        }
        if fractions.windows(2).any(|w| w[1] <= w[0]) {
            return bad("fractions must be strictly increasing");
        }
        if fractions[0] < 0.0 || *fractions.last().expect("nonempty") > 1.0 {
            return bad("fractions must lie within [0, 1]");
        }
        let levels = fractions
            .iter()
            .map(|&f| Level {
                value: f,
                energy: f * capacity,
                role: if f == 0.0 {
                    LevelRole::Floor
                } else if f == 1.0 {
                    LevelRole::Ceiling
                } else {
                    LevelRole::Interior
                },
            })
            .collect();
        Ok(LevelSet { levels, e_max: capacity })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }
}

/// Emitted variables of one level of a built storage; vectors are indexed
/// by interval and empty when the level lacks that element.
#[derive(Debug, Clone)]
pub struct LevelVars {
    pub value: f64,
    pub energy: f64,
    pub role: LevelRole,
    /// Discharge flow at this level, kW.
    pub output: Vec<VarId>,
    /// Charge flow at this level, kW.
    pub input: Vec<VarId>,
    /// Binary withdrawal indicator `y`.
    pub y: Vec<VarId>,
    /// Binary content-above-level indicator `ŷ`.
    pub y_hat: Vec<VarId>,
    /// Continuous inverse status `ȳ = 1 − ŷ` gating injection.
    pub y_bar: Vec<VarId>,
}

/// Everything a built multi-level storage exposes to the rest of the model:
/// content variables per boundary and per-level flow/indicator variables.
#[derive(Debug, Clone)]
pub struct StorageVars {
    pub name: String,
    /// Content per boundary timestamp, length `intervals + 1`.
    pub content: Vec<VarId>,
    pub levels: Vec<LevelVars>,
    pub e_max: f64,
    pub time_discrete: bool,
}

impl StorageVars {
    /// The content variable the interval-`t` indicators bind to.
    pub fn anchor(&self, t: usize) -> VarId {
        if self.time_discrete {
            self.content[t + 1]
        } else {
            self.content[t]
        }
    }
}

/// Configuration for [`build_multi_level_storage`]. Per-level limit slices
/// align with the level set; `None` falls back to `E_max / Δt`.
#[derive(Debug, Clone)]
pub struct MultiLevelConfig<'a> {
    /// Prefix for variable and constraint names, e.g. `SFH.GasStorage`.
    pub name: String,
    pub levels: &'a LevelSet,
    pub intervals: &'a [IntervalInfo],
    pub loss_rate: f64,
    pub initial_content: f64,
    pub cyclic: bool,
    /// Anchor indicators to the end-of-interval content.
    pub time_discrete: bool,
    /// Also emit `y + ȳ = 1`.
    pub strict: bool,
    pub level_output_limits: Option<&'a [f64]>,
    pub level_input_limits: Option<&'a [f64]>,
    pub aggregate_output_limit: Option<f64>,
    pub aggregate_input_limit: Option<f64>,
    /// Weights in the aggregate rows, default 1 per level.
    pub weights: Option<&'a [f64]>,
}

fn fmt_level(v: f64) -> String {
    format!("{v}")
}

/// Allocates the content variables `E_0 … E_T` with bounds `[0, e_max]`,
/// fixing the first one to `initial_content`.
pub fn allocate_content(
    model: &mut MilpModel,
    name: &str,
    num_intervals: usize,
    e_max: f64,
    initial_content: f64,
) -> Vec<VarId> {
    let mut content = Vec::with_capacity(num_intervals + 1);
    content.push(model.add_fixed(format!("{name}.content.0"), initial_content));
    for b in 1..=num_intervals {
        content.push(model.add_variable(
            format!("{name}.content.{b}"),
            VarKind::Continuous,
            0.0,
            e_max,
        ));
    }
    content
}

/// Emits the content balance
/// `E_{t+1} = (1 − loss·Δt)·E_t + Δt·(Σ inflows − Σ outflows)` per interval,
/// plus `E_T = E_0` when `cyclic`.
pub fn build_balance(
    model: &mut MilpModel,
    name: &str,
    intervals: &[IntervalInfo],
    content: &[VarId],
    inflows: &[Vec<VarId>],
    outflows: &[Vec<VarId>],
    loss_rate: f64,
    cyclic: bool,
) -> Result<(), StorageError> {
    if loss_rate < 0.0 || !loss_rate.is_finite() {
        return Err(StorageError::NegativeLoss);
    }
    for (t, interval) in intervals.iter().enumerate() {
        let dt = interval.hours;
        let mut terms = vec![(content[t + 1], 1.0), (content[t], -(1.0 - loss_rate * dt))];
        for &v in &inflows[t] {
            terms.push((v, -dt));
        }
        for &v in &outflows[t] {
            terms.push((v, dt));
        }
        model.add_constraint(format!("{name}.balance.{t}"), terms, Relation::Eq, 0.0);
    }
    if cyclic {
        model.add_constraint(
            format!("{name}.cyclic"),
            vec![(content[intervals.len()], 1.0), (content[0], -1.0)],
            Relation::Eq,
            0.0,
        );
    }
    Ok(())
}

/// Builds one complete multi-level storage: content, per-level flows,
/// indicators, gates, aggregate limits, and the balance.
pub fn build_multi_level_storage(
    model: &mut MilpModel,
    cfg: &MultiLevelConfig<'_>,
) -> Result<StorageVars, StorageError> {
    let name = &cfg.name;
    let e_max = cfg.levels.e_max();
    let nt = cfg.intervals.len();
    let content = allocate_content(model, name, nt, e_max, cfg.initial_content);

    // Per-level flow limit, also used as the gate coefficient (big-M).
    let flow_limit = |limits: Option<&[f64]>, n: usize, t: usize| -> f64 {
        limits.map(|l| l[n]).unwrap_or(e_max / cfg.intervals[t].hours)
    };

    let mut levels = Vec::with_capacity(cfg.levels.len());
    for (n, level) in cfg.levels.levels().iter().enumerate() {
        let tag = fmt_level(level.value);
        let mut vars = LevelVars {
            value: level.value,
            energy: level.energy,
            role: level.role,
            output: Vec::new(),
            input: Vec::new(),
            y: Vec::new(),
            y_hat: Vec::new(),
            y_bar: Vec::new(),
        };
        if level.role != LevelRole::Ceiling {
            for t in 0..nt {
                vars.output.push(model.add_variable(
                    format!("{name}.out.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    flow_limit(cfg.level_output_limits, n, t),
                ));
            }
        }
        if level.role != LevelRole::Floor {
            for t in 0..nt {
                vars.input.push(model.add_variable(
                    format!("{name}.in.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    flow_limit(cfg.level_input_limits, n, t),
                ));
            }
        }
        if level.role == LevelRole::Interior {
            if level.energy <= 0.0 {
                return Err(StorageError::ZeroLevelEnergy);
            }
            for t in 0..nt {
                vars.y.push(model.add_variable(
                    format!("{name}.y.{tag}.{t}"),
                    VarKind::Binary,
                    0.0,
                    1.0,
                ));
            }
            for t in 0..nt {
                vars.y_hat.push(model.add_variable(
                    format!("{name}.yhat.{tag}.{t}"),
                    VarKind::Binary,
                    0.0,
                    1.0,
                ));
            }
            for t in 0..nt {
                vars.y_bar.push(model.add_variable(
                    format!("{name}.ybar.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    1.0,
                ));
            }
        }
        levels.push(vars);
    }

    let storage = StorageVars {
        name: name.clone(),
        content,
        levels,
        e_max,
        time_discrete: cfg.time_discrete,
    };

    build_level_indicators(model, &storage, cfg.strict)?;
    build_power_limits(
        model,
        &storage,
        cfg.level_output_limits,
        cfg.level_input_limits,
        cfg.intervals,
    );
    build_weighted_aggregate_limit(
        model,
        &storage,
        cfg.weights,
        cfg.aggregate_output_limit,
        cfg.aggregate_input_limit,
        cfg.intervals.len(),
    );

    let nt = cfg.intervals.len();
    let mut inflows: Vec<Vec<VarId>> = vec![Vec::new(); nt];
    let mut outflows: Vec<Vec<VarId>> = vec![Vec::new(); nt];
    for level in &storage.levels {
        for (t, &v) in level.input.iter().enumerate() {
            inflows[t].push(v);
        }
        for (t, &v) in level.output.iter().enumerate() {
            outflows[t].push(v);
        }
    }
    build_balance(
        model,
        name,
        cfg.intervals,
        &storage.content,
        &inflows,
        &outflows,
        cfg.loss_rate,
        cfg.cyclic,
    )?;
    Ok(storage)
}

/// Emits the indicator rows for every interior level and interval:
/// `E_n·y ≤ E_anchor`, `E_max·ŷ ≥ E_anchor − E_n`, `ŷ + ȳ = 1`, and, iff
/// `strict`, `y + ȳ = 1`.
pub fn build_level_indicators(
    model: &mut MilpModel,
    storage: &StorageVars,
    strict: bool,
) -> Result<(), StorageError> {
    let name = &storage.name;
    for level in &storage.levels {
        if level.role != LevelRole::Interior {
            continue;
        }
        if level.energy <= 0.0 {
            return Err(StorageError::ZeroLevelEnergy);
        }
        let tag = fmt_level(level.value);
        for t in 0..level.y.len() {
            let anchor = storage.anchor(t);
            model.add_constraint(
                format!("{name}.level.{tag}.act.{t}"),
                vec![(level.y[t], level.energy), (anchor, -1.0)],
                Relation::Le,
                0.0,
            );
            model.add_constraint(
                format!("{name}.level.{tag}.inv.{t}"),
                vec![(level.y_hat[t], storage.e_max), (anchor, -1.0)],
                Relation::Ge,
                -level.energy,
            );
            model.add_constraint(
                format!("{name}.level.{tag}.bar.{t}"),
                vec![(level.y_bar[t], 1.0), (level.y_hat[t], 1.0)],
                Relation::Eq,
                1.0,
            );
            if strict {
                model.add_constraint(
                    format!("{name}.level.{tag}.strict.{t}"),
                    vec![(level.y[t], 1.0), (level.y_bar[t], 1.0)],
                    Relation::Eq,
                    1.0,
                );
            }
        }
    }
    Ok(())
}

/// Emits the gate rows `P_out,n ≤ y_n·M` and `P_in,n ≤ ȳ_n·M` for interior
/// levels (floor output and ceiling input stay ungated).
pub fn build_power_limits(
    model: &mut MilpModel,
    storage: &StorageVars,
    level_output_limits: Option<&[f64]>,
    level_input_limits: Option<&[f64]>,
    intervals: &[IntervalInfo],
) {
    let name = &storage.name;
    let e_max = storage.e_max;
    for (n, level) in storage.levels.iter().enumerate() {
        if level.role != LevelRole::Interior {
            continue;
        }
        let tag = fmt_level(level.value);
        for t in 0..intervals.len() {
            let m_out = level_output_limits.map(|l| l[n]).unwrap_or(e_max / intervals[t].hours);
            model.add_constraint(
                format!("{name}.gate_out.{tag}.{t}"),
                vec![(level.output[t], 1.0), (level.y[t], -m_out)],
                Relation::Le,
                0.0,
            );
            let m_in = level_input_limits.map(|l| l[n]).unwrap_or(e_max / intervals[t].hours);
            model.add_constraint(
                format!("{name}.gate_in.{tag}.{t}"),
                vec![(level.input[t], 1.0), (level.y_bar[t], -m_in)],
                Relation::Le,
                0.0,
            );
        }
    }
}

/// Emits `Σ_n w_n·P_out,n ≤ cap` (and the input analogue) per interval for
/// whichever aggregate caps are configured.
pub fn build_weighted_aggregate_limit(
    model: &mut MilpModel,
    storage: &StorageVars,
    weights: Option<&[f64]>,
    output_limit: Option<f64>,
    input_limit: Option<f64>,
    num_intervals: usize,
) {
    let name = &storage.name;
    let weight = |n: usize| weights.map(|w| w[n]).unwrap_or(1.0);
    if let Some(cap) = output_limit {
        for t in 0..num_intervals {
            let terms: Vec<(VarId, f64)> = storage
                .levels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.output.is_empty())
                .map(|(n, l)| (l.output[t], weight(n)))
                .collect();
            if !terms.is_empty() {
                model.add_constraint(format!("{name}.agg_out.{t}"), terms, Relation::Le, cap);
            }
        }
    }
    if let Some(cap) = input_limit {
        for t in 0..num_intervals {
            let terms: Vec<(VarId, f64)> = storage
                .levels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.input.is_empty())
                .map(|(n, l)| (l.input[t], weight(n)))
                .collect();
            if !terms.is_empty() {
                model.add_constraint(format!("{name}.agg_in.{t}"), terms, Relation::Le, cap);
            }
        }
    }
}

/// Configuration for [`build_layered_heat_storage`].
#[derive(Debug, Clone)]
pub struct LayeredConfig<'a> {
    pub name: String,
    pub temperature_levels: &'a [f64],
    pub reference_temperature: f64,
    /// Energy capacity with the whole volume at the top level, kWh.
    pub capacity: f64,
    pub intervals: &'a [IntervalInfo],
    pub loss_rate: f64,
    /// Initial content per layer, kWh; `None` means empty.
    pub initial_contents: Option<&'a [f64]>,
    pub cyclic: bool,
}

/// Emitted variables of a layered heat storage.
#[derive(Debug, Clone)]
pub struct LayeredVars {
    pub name: String,
    pub temperatures: Vec<f64>,
    /// Per layer, per boundary.
    pub contents: Vec<Vec<VarId>>,
    /// Per layer, per interval.
    pub inputs: Vec<Vec<VarId>>,
    pub outputs: Vec<Vec<VarId>>,
    /// Energy density of each layer relative to the top layer.
    pub scale: Vec<f64>,
}

/// Builds the binaries-free stratified storage: one content/charge/discharge
/// set per temperature layer with independent balances, sharing one volume
/// via `Σ_n E_n / s_n ≤ capacity` where `s_n` is the layer's energy density
/// relative to the top layer.
pub fn build_layered_heat_storage(
    model: &mut MilpModel,
    cfg: &LayeredConfig<'_>,
) -> Result<LayeredVars, StorageError> {
    let bad = |m: &str| Err(StorageError::BadLevels(m.into()));
    let name = &cfg.name;
    let temps = cfg.temperature_levels;
    if temps.is_empty() || temps.windows(2).any(|w| w[1] <= w[0]) {
        return bad("temperatures must be strictly increasing and nonempty");
    }
    if temps[0] <= cfg.reference_temperature {
        return bad("temperatures must lie above the reference");
    }
    if !(cfg.capacity > 0.0 && cfg.capacity.is_finite()) {
        return bad("capacity must be positive");
    }
    if let Some(init) = cfg.initial_contents {
        if init.len() != temps.len() {
            return bad("initial_contents must give one value per layer");
        }
    }
    let nt = cfg.intervals.len();
    let top = *temps.last().expect("nonempty");
    let scale: Vec<f64> = temps
        .iter()
        .map(|&t| (t - cfg.reference_temperature) / (top - cfg.reference_temperature))
        .collect();

    let mut vars = LayeredVars {
        name: name.clone(),
        temperatures: temps.to_vec(),
        contents: Vec::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        scale: scale.clone(),
    };
    for (n, &temp) in temps.iter().enumerate() {
        let tag = fmt_level(temp);
        let initial = cfg.initial_contents.map(|i| i[n]).unwrap_or(0.0);
        let mut contents = Vec::with_capacity(nt + 1);
        contents.push(model.add_fixed(format!("{name}.content.{tag}.0"), initial));
        for b in 1..=nt {
            // A single layer can hold at most its share of the volume.
            contents.push(model.add_variable(
                format!("{name}.content.{tag}.{b}"),
                VarKind::Continuous,
                0.0,
                cfg.capacity * scale[n],
            ));
        }
        let inputs = (0..nt)
            .map(|t| {
                model.add_variable(
                    format!("{name}.in.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    f64::INFINITY,
                )
            })
            .collect();
        let outputs = (0..nt)
            .map(|t| {
                model.add_variable(
                    format!("{name}.out.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    f64::INFINITY,
                )
            })
            .collect();
        vars.contents.push(contents);
        vars.inputs.push(inputs);
        vars.outputs.push(outputs);
    }

    for n in 0..temps.len() {
        let tag = fmt_level(temps[n]);
        let inflows: Vec<Vec<VarId>> = (0..nt).map(|t| vec![vars.inputs[n][t]]).collect();
        let outflows: Vec<Vec<VarId>> = (0..nt).map(|t| vec![vars.outputs[n][t]]).collect();
        build_balance(
            model,
            &format!("{name}.layer.{tag}"),
            cfg.intervals,
            &vars.contents[n],
            &inflows,
            &outflows,
            cfg.loss_rate,
            cfg.cyclic,
        )?;
    }
    // Shared volume at every later boundary (the first one is fixed data).
    for b in 1..=nt {
        let terms: Vec<(VarId, f64)> =
            (0..temps.len()).map(|n| (vars.contents[n][b], 1.0 / scale[n])).collect();
        model.add_constraint(format!("{name}.volume.{b}"), terms, Relation::Le, cfg.capacity);
    }
    Ok(vars)
}

/// Per-interval charging flows of a battery with SOC-dependent limits,
/// already gated; their per-interval sum is the total charging power.
#[derive(Debug, Clone)]
pub struct SocCharging {
    /// One flow family per band, each indexed by interval. Band `i < B` is
    /// gated at threshold `i+1`; the last band is ungated.
    pub band_flows: Vec<Vec<VarId>>,
    /// `ŷ` per interior threshold, indexed like the thresholds.
    pub y_hat: Vec<Vec<VarId>>,
    pub y_bar: Vec<Vec<VarId>>,
}

impl SocCharging {
    /// All charging flows of interval `t`.
    pub fn inflows(&self, t: usize) -> Vec<VarId> {
        self.band_flows.iter().map(|band| band[t]).collect()
    }
}

/// Builds SOC-dependent charging against caller-owned content variables:
/// thresholds `s_1 < … < s_B` with caps `L_1 ≥ … ≥ L_B` (base cap `L_0`)
/// become `B+1` parallel flows where flow `i < B` has cap `L_i − L_{i+1}`
/// and is gated by `ȳ` at threshold `s_{i+1}`, and the last flow has cap
/// `L_B` ungated. The available total in band `j` is exactly `L_j`.
#[allow(clippy::too_many_arguments)]
pub fn build_soc_dependent_charging(
    model: &mut MilpModel,
    name: &str,
    intervals: &[IntervalInfo],
    content: &[VarId],
    capacity: f64,
    base_charge_limit: f64,
    bands: &[(f64, f64)],
    time_discrete: bool,
) -> Result<SocCharging, StorageError> {
    let bad = |m: &str| Err(StorageError::BadLevels(m.into()));
    let nt = intervals.len();
    let mut prev_soc = 0.0;
    let mut prev_limit = base_charge_limit;
    for &(soc, limit) in bands {
        if !(soc > prev_soc && soc < 1.0) {
            return bad("soc thresholds must increase strictly within (0, 1)");
        }
        if !(limit >= 0.0 && limit <= prev_limit) {
            return bad("soc charge limits must not increase");
        }
        prev_soc = soc;
        prev_limit = limit;
    }

    let mut charging = SocCharging { band_flows: Vec::new(), y_hat: Vec::new(), y_bar: Vec::new() };
    // Indicators per threshold.
    for &(soc, _) in bands {
        let tag = fmt_level(soc);
        let energy = soc * capacity;
        let y_hat: Vec<VarId> = (0..nt)
            .map(|t| {
                model.add_variable(format!("{name}.yhat.{tag}.{t}"), VarKind::Binary, 0.0, 1.0)
            })
            .collect();
        let y_bar: Vec<VarId> = (0..nt)
            .map(|t| {
                model.add_variable(format!("{name}.ybar.{tag}.{t}"), VarKind::Continuous, 0.0, 1.0)
            })
            .collect();
        for t in 0..nt {
            let anchor = if time_discrete { content[t + 1] } else { content[t] };
            model.add_constraint(
                format!("{name}.level.{tag}.inv.{t}"),
                vec![(y_hat[t], capacity), (anchor, -1.0)],
                Relation::Ge,
                -energy,
            );
            model.add_constraint(
                format!("{name}.level.{tag}.bar.{t}"),
                vec![(y_bar[t], 1.0), (y_hat[t], 1.0)],
                Relation::Eq,
                1.0,
            );
        }
        charging.y_hat.push(y_hat);
        charging.y_bar.push(y_bar);
    }
    // Band flows: gated differences plus the final ungated remainder.
    for (i, &(soc, limit)) in bands.iter().enumerate() {
        let cap = if i == 0 { base_charge_limit } else { bands[i - 1].1 } - limit;
        let tag = fmt_level(soc);
        let flows: Vec<VarId> = (0..nt)
            .map(|t| {
                model.add_variable(
                    format!("{name}.charge.below.{tag}.{t}"),
                    VarKind::Continuous,
                    0.0,
                    cap,
                )
            })
            .collect();
        for (t, &flow) in flows.iter().enumerate() {
            model.add_constraint(
                format!("{name}.gate_in.{tag}.{t}"),
                vec![(flow, 1.0), (charging.y_bar[i][t], -cap)],
                Relation::Le,
                0.0,
            );
        }
        charging.band_flows.push(flows);
    }
    let top_cap = bands.last().map(|b| b.1).unwrap_or(base_charge_limit);
    let flows: Vec<VarId> = (0..nt)
        .map(|t| {
            model.add_variable(format!("{name}.charge.top.{t}"), VarKind::Continuous, 0.0, top_cap)
        })
        .collect();
    charging.band_flows.push(flows);
    Ok(charging)
}
