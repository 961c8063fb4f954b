//! Flat `section.key` configuration: defaults, TOML loading, overrides and conversion to a
//! [`Scenario`].

use std::collections::BTreeMap;
use std::path::Path;

use attocell::adr::AdrKind;
use attocell::channel::{ReflectionMode, DEFAULT_MAX_ELEMENTS};
use attocell::combining::{CellMode, CombinerKind, PhyParams};
use attocell::coverage::CellLayout;
use attocell::simulation::{Averaging, CALIBRATION_BANDWIDTH_HZ, CALIBRATION_PD_COUNT};
use attocell::{BandwidthModel, OrientationMode, OrientationModel, Room, Scenario};
use serde_json::json;
use toml::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("cannot read config `{path}`: {reason}")]
    Read { path: String, reason: String },
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Float,
    Int,
    Str,
    /// A number or the string "auto".
    FloatOrAuto,
    FloatList,
    IntList,
    StrList,
    /// List of `[x, y, theta_deg, omega_deg]`.
    PoseList,
}

/// Every accepted key with its type and description. Defaults come from [`defaults`].
pub const KEYS: &[(&str, &str)] = &[
    ("room.width_m", "room extent along x"),
    ("room.depth_m", "room extent along y"),
    ("room.height_m", "ceiling height"),
    ("room.rho_wall", "wall reflectivity"),
    ("room.rho_ceiling", "ceiling reflectivity"),
    ("room.rho_floor", "floor reflectivity"),
    ("cell.mode", "ss or ds"),
    ("cell.nx", "cells along x"),
    ("cell.ny", "cells along y"),
    ("cell.r_cell_m", "cell side"),
    ("cell.h_m", "vertical AP to user distance"),
    (
        "cell.d_source_m",
        "separation of the two DS sources (along x)",
    ),
    ("ap.half_power_angle_deg", "LED semi-angle at half power"),
    ("phy.p_tx_w", "optical power per AP"),
    ("phy.responsivity", "PD responsivity, A/W"),
    ("phy.kappa", "DC-bias ratio"),
    ("phy.subcarriers", "OFDM subcarriers"),
    ("phy.n0", "noise PSD for simulate, A^2/Hz"),
    ("phy.n0_list", "noise PSDs for sweep"),
    ("phy.b_t_hz", "transmitter bandwidth"),
    (
        "phy.combiner",
        "combiner for simulate: EGC, SBC, MRC, MRC-P",
    ),
    ("phy.combiners", "combiners for sweep"),
    ("adr.kind", "PR or TPR"),
    ("adr.n_pd", "PD count for simulate and coverage"),
    (
        "adr.n_pd_list",
        "PD counts for sweeps; empty means minimum..15",
    ),
    ("adr.psi_total_deg", "FOV budget psi_c + theta_pd"),
    (
        "adr.psi_c_deg",
        "per-PD FOV, or auto for the analytic lower bound",
    ),
    ("adr.total_area_m2", "PD area summed over the receiver"),
    ("adr.ring_radius_m", "ring radius of the side PDs"),
    ("adr.n_ref", "concentrator refractive index"),
    ("adr.t_s", "optical filter gain"),
    (
        "bandwidth.r_load_ohm",
        "load resistance, or auto to calibrate",
    ),
    (
        "bandwidth.calibration_hz",
        "bandwidth of a 3-PD receiver used by auto r_load",
    ),
    ("bandwidth.eps0", "vacuum permittivity"),
    ("bandwidth.eps_r", "relative permittivity"),
    ("bandwidth.hole_velocity", "hole saturation velocity, m/s"),
    ("channel.patch_m", "reflector patch side"),
    ("channel.max_elements", "cap on reflector patches"),
    ("channel.reflection", "exact or truncated:<orders>"),
    ("orientation.mode", "random, vertical or vertical-spin"),
    ("orientation.mu_theta_deg", "polar-angle Laplace location"),
    (
        "orientation.sigma_theta_deg",
        "polar-angle standard deviation",
    ),
    ("sim.n_samples", "users per run"),
    ("sim.seed", "random seed"),
    ("sim.averaging", "linear or db"),
    ("fov.kinds", "receiver kinds for fov-bound"),
    ("fov.modes", "cell modes for fov-bound"),
    (
        "fov.mc_samples",
        "Monte-Carlo positions per case; 0 skips the check",
    ),
    ("fov.mc_orientation", "orientation of Monte-Carlo users"),
    ("profile.poses", "list of [x_m, y_m, theta_deg, omega_deg]"),
    ("profile.orders", "reflection orders listed individually"),
    ("profile.psi_c_deg", "FOV of the single profile PD"),
    ("profile.area_m2", "area of the single profile PD"),
    ("coverage.boundary_points", "points per footprint boundary"),
    (
        "coverage.pv_samples",
        "samples for the visibility probability",
    ),
    ("output.dir", "directory for CSV and manifest files"),
];

fn kind_of(key: &str) -> Kind {
    match key {
        "cell.mode" | "phy.combiner" | "adr.kind" | "channel.reflection" | "orientation.mode"
        | "sim.averaging" | "fov.mc_orientation" | "output.dir" => Kind::Str,
        "cell.nx"
        | "cell.ny"
        | "phy.subcarriers"
        | "adr.n_pd"
        | "channel.max_elements"
        | "sim.n_samples"
        | "sim.seed"
        | "fov.mc_samples"
        | "profile.orders"
        | "coverage.boundary_points"
        | "coverage.pv_samples" => Kind::Int,
        "adr.psi_c_deg" | "bandwidth.r_load_ohm" => Kind::FloatOrAuto,
        "phy.n0_list" => Kind::FloatList,
        "adr.n_pd_list" => Kind::IntList,
        "phy.combiners" | "fov.kinds" | "fov.modes" => Kind::StrList,
        "profile.poses" => Kind::PoseList,
        _ => Kind::Float,
    }
}

fn defaults() -> BTreeMap<String, Value> {
    let s: Scenario<f64> = Scenario::office(CellMode::SingleSource);
    let bw = BandwidthModel::<f64>::default();
    let phy = PhyParams::<f64>::default();
    let f = Value::Float;
    // radians back to degrees without the round-trip noise
    let deg = |r: f64| Value::Float((r.to_degrees() * 1e9).round() / 1e9);
    let i = |v: u64| Value::Integer(v as i64);
    let st = |v: &str| Value::String(v.into());
    let list = |v: &[&str]| Value::Array(v.iter().map(|x| st(x)).collect());
    let pose = |p: [f64; 4]| Value::Array(p.iter().map(|v| f(*v)).collect());
    let entries = [
        ("room.width_m", f(s.room.width)),
        ("room.depth_m", f(s.room.depth)),
        ("room.height_m", f(s.room.height)),
        ("room.rho_wall", f(s.room.rho_wall)),
        ("room.rho_ceiling", f(s.room.rho_ceiling)),
        ("room.rho_floor", f(s.room.rho_floor)),
        ("cell.mode", st("ss")),
        ("cell.nx", i(2)),
        ("cell.ny", i(2)),
        ("cell.r_cell_m", f(s.cell.r_cell)),
        ("cell.h_m", f(s.cell.h)),
        ("cell.d_source_m", f(s.cell.d_source)),
        ("ap.half_power_angle_deg", deg(s.half_power_angle)),
        ("phy.p_tx_w", f(phy.p_tx)),
        ("phy.responsivity", f(phy.tau)),
        ("phy.kappa", f(phy.kappa)),
        ("phy.subcarriers", i(phy.m_sub as u64)),
        ("phy.n0", f(phy.n0)),
        (
            "phy.n0_list",
            Value::Array(vec![f(1e-22), f(1e-21), f(1e-20)]),
        ),
        ("phy.b_t_hz", f(s.b_t)),
        ("phy.combiner", st("MRC")),
        ("phy.combiners", list(&["MRC", "SBC", "EGC"])),
        ("adr.kind", st("PR")),
        ("adr.n_pd", i(s.n_pd as u64)),
        ("adr.n_pd_list", Value::Array(vec![])),
        ("adr.psi_total_deg", deg(s.psi_total)),
        ("adr.psi_c_deg", st("auto")),
        ("adr.total_area_m2", f(s.total_area)),
        ("adr.ring_radius_m", f(s.ring_radius)),
        ("adr.n_ref", f(s.n_ref)),
        ("adr.t_s", f(s.t_s)),
        ("bandwidth.r_load_ohm", st("auto")),
        ("bandwidth.calibration_hz", f(CALIBRATION_BANDWIDTH_HZ)),
        ("bandwidth.eps0", f(bw.eps0)),
        ("bandwidth.eps_r", f(bw.eps_r)),
        ("bandwidth.hole_velocity", f(bw.v_p)),
        ("channel.patch_m", f(s.patch_size)),
        ("channel.max_elements", i(DEFAULT_MAX_ELEMENTS as u64)),
        ("channel.reflection", st(&s.reflection.to_string())),
        ("orientation.mode", st(&s.orientation_mode.to_string())),
        ("orientation.mu_theta_deg", deg(s.orientation.mu_theta)),
        (
            "orientation.sigma_theta_deg",
            deg(s.orientation.sigma_theta),
        ),
        ("sim.n_samples", i(s.n_samples as u64)),
        ("sim.seed", i(s.seed)),
        ("sim.averaging", st(&s.averaging.to_string())),
        ("fov.kinds", list(&["PR", "TPR"])),
        ("fov.modes", list(&["ss", "ds"])),
        ("fov.mc_samples", i(1_000_000)),
        ("fov.mc_orientation", st("vertical-spin")),
        (
            "profile.poses",
            Value::Array(vec![
                pose([6.0, 6.0, 0.0, 0.0]),
                pose([6.0, 6.0, 60.0, 180.0]),
                pose([1.0, 1.0, 0.0, 0.0]),
                pose([1.0, 1.0, 45.0, 180.0]),
            ]),
        ),
        ("profile.orders", i(10)),
        ("profile.psi_c_deg", f(60.0)),
        ("profile.area_m2", f(1e-4)),
        ("coverage.boundary_points", i(72)),
        ("coverage.pv_samples", i(100_000)),
        ("output.dir", st(".")),
    ];
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn check_type(key: &str, v: &Value) -> Result<Value, ConfigError> {
    let num = |v: &Value| matches!(v, Value::Float(_) | Value::Integer(_));
    let ok = match kind_of(key) {
        Kind::Float => num(v),
        Kind::Int => matches!(v, Value::Integer(i) if *i >= 0),
        Kind::Str => v.is_str(),
        Kind::FloatOrAuto => num(v) || v.as_str() == Some("auto"),
        Kind::FloatList => v.as_array().is_some_and(|a| a.iter().all(num)),
        Kind::IntList => v
            .as_array()
            .is_some_and(|a| a.iter().all(|x| matches!(x, Value::Integer(i) if *i > 0))),
        Kind::StrList => v.as_array().is_some_and(|a| a.iter().all(Value::is_str)),
        Kind::PoseList => v.as_array().is_some_and(|a| {
            a.iter().all(|p| {
                p.as_array()
                    .is_some_and(|q| q.len() == 4 && q.iter().all(num))
            })
        }),
    };
    if ok {
        Ok(v.clone())
    } else {
        let want = match kind_of(key) {
            Kind::Float => "a number",
            Kind::Int => "a non-negative integer",
            Kind::Str => "a string",
            Kind::FloatOrAuto => "a number or \"auto\"",
            Kind::FloatList => "a list of numbers",
            Kind::IntList => "a list of positive integers",
            Kind::StrList => "a list of strings",
            Kind::PoseList => "a list of [x, y, theta_deg, omega_deg]",
        };
        Err(bad(key, format!("expected {want}, got `{v}`")))
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            _ => out.push((key, v.clone())),
        }
    }
}

/// Resolved key/value set; every known key is present.
#[derive(Debug, Clone)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

impl Default for Config {
    fn default() -> Self {
        Self { values: defaults() }
    }
}

impl Config {
    pub fn set(&mut self, key: &str, v: Value) -> Result<(), ConfigError> {
        if !self.values.contains_key(key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        let v = check_type(key, &v)?;
        self.values.insert(key.to_string(), v);
        Ok(())
    }

    pub fn merge_toml(&mut self, text: &str) -> Result<(), ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Read {
                path: "<toml>".into(),
                reason: e.message().to_string(),
            })?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        for (k, v) in flat {
            self.set(&k, v)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let mut c = Self::default();
        c.merge_toml(&text).map_err(|e| match e {
            ConfigError::Read { reason, .. } => ConfigError::Read {
                path: path.display().to_string(),
                reason,
            },
            e => e,
        })?;
        Ok(c)
    }

    /// `key=value` where the value is TOML (`0.5`, `[3, 4]`, `"ds"`) or a bare string.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| bad(assignment, "expected key=value"))?;
        let key = key.trim();
        let raw = raw.trim();
        let v = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.set(key, v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.values).expect("toml values serialize")
    }

    pub fn value(&self, key: &str) -> &Value {
        &self.values[key]
    }

    fn get(&self, key: &str) -> &Value {
        &self.values[key]
    }

    pub fn f64(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            v => unreachable!("{key} holds {v}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.get(key).as_integer().expect("type checked") as usize
    }

    pub fn str(&self, key: &str) -> &str {
        self.get(key).as_str().expect("type checked")
    }

    pub fn f64_or_auto(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Value::String(_) => None,
            _ => Some(self.f64(key)),
        }
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        let arr = self.get(key).as_array().expect("type checked");
        arr.iter()
            .map(|v| {
                v.as_float()
                    .unwrap_or_else(|| v.as_integer().unwrap_or(0) as f64)
            })
            .collect()
    }

    fn str_list(&self, key: &str) -> Vec<String> {
        let arr = self.get(key).as_array().expect("type checked");
        arr.iter()
            .map(|v| v.as_str().unwrap_or_default().to_string())
            .collect()
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key)
            .parse()
            .map_err(|e: T::Err| bad(key, e.to_string()))
    }

    pub fn parsed_list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let items = self.str_list(key);
        if items.is_empty() {
            return Err(bad(key, "must not be empty"));
        }
        items
            .iter()
            .map(|s| s.parse().map_err(|e: T::Err| bad(key, e.to_string())))
            .collect()
    }

    pub fn n0_list(&self) -> Result<Vec<f64>, ConfigError> {
        let v = self.f64_list("phy.n0_list");
        if v.is_empty() || v.iter().any(|x| !(*x > 0.0)) {
            return Err(bad("phy.n0_list", "needs at least one positive value"));
        }
        Ok(v)
    }

    /// PD counts to sweep for `kind`.
    pub fn n_pd_list(&self, kind: AdrKind) -> Result<Vec<usize>, ConfigError> {
        let arr = self.get("adr.n_pd_list").as_array().expect("type checked");
        if arr.is_empty() {
            return Ok((kind.min_pds()..=15).collect());
        }
        let list: Vec<usize> = arr
            .iter()
            .map(|v| v.as_integer().unwrap_or(0) as usize)
            .collect();
        if let Some(n) = list.iter().find(|n| **n < kind.min_pds()) {
            return Err(bad(
                "adr.n_pd_list",
                format!("{kind} needs at least {} PDs, got {n}", kind.min_pds()),
            ));
        }
        Ok(list)
    }

    /// `(x, y, theta, omega)` with angles in radians.
    pub fn poses(&self) -> Vec<(f64, f64, f64, f64)> {
        self.get("profile.poses")
            .as_array()
            .expect("type checked")
            .iter()
            .map(|p| {
                let q: Vec<f64> = p
                    .as_array()
                    .expect("type checked")
                    .iter()
                    .map(|v| {
                        v.as_float()
                            .unwrap_or_else(|| v.as_integer().unwrap_or(0) as f64)
                    })
                    .collect();
                (q[0], q[1], q[2].to_radians(), q[3].to_radians())
            })
            .collect()
    }

    /// Scenario described by the configuration, validated.
    pub fn scenario(&self) -> Result<Scenario<f64>, ConfigError> {
        let core = |e: attocell::Error| match e {
            attocell::Error::InvalidParameter { name, reason } => bad(name, reason),
            e => bad("config", e.to_string()),
        };
        let mode: CellMode = self.parsed("cell.mode")?;
        let room = Room {
            width: self.f64("room.width_m"),
            depth: self.f64("room.depth_m"),
            height: self.f64("room.height_m"),
            rho_wall: self.f64("room.rho_wall"),
            rho_ceiling: self.f64("room.rho_ceiling"),
            rho_floor: self.f64("room.rho_floor"),
        };
        let cell = CellLayout::square_grid(
            mode,
            self.usize("cell.nx"),
            self.usize("cell.ny"),
            self.f64("cell.r_cell_m"),
            room.height,
            self.f64("cell.h_m"),
            self.f64("cell.d_source_m"),
        )
        .map_err(core)?;
        let total_area = self.f64("adr.total_area_m2");
        let mut bandwidth = BandwidthModel {
            r_load: 50.0,
            eps0: self.f64("bandwidth.eps0"),
            eps_r: self.f64("bandwidth.eps_r"),
            v_p: self.f64("bandwidth.hole_velocity"),
        };
        bandwidth = match self.f64_or_auto("bandwidth.r_load_ohm") {
            Some(r) => BandwidthModel {
                r_load: r,
                ..bandwidth
            },
            None => bandwidth
                .calibrated(
                    total_area / CALIBRATION_PD_COUNT as f64,
                    self.f64("bandwidth.calibration_hz"),
                )
                .map_err(|e| match e {
                    attocell::Error::InvalidParameter { reason, .. } => {
                        bad("bandwidth.calibration_hz", reason)
                    }
                    e => core(e),
                })?,
        };
        let orientation = OrientationModel::new(
            self.f64("orientation.mu_theta_deg").to_radians(),
            self.f64("orientation.sigma_theta_deg").to_radians(),
        )
        .map_err(core)?;
        let reflection: ReflectionMode = self.parsed("channel.reflection")?;
        let orientation_mode: OrientationMode = self.parsed("orientation.mode")?;
        let averaging: Averaging = self.parsed("sim.averaging")?;
        let kind: AdrKind = self.parsed("adr.kind")?;
        let n_pd = self.usize("adr.n_pd");
        if n_pd < kind.min_pds() {
            return Err(bad(
                "adr.n_pd",
                format!("{kind} needs at least {} PDs", kind.min_pds()),
            ));
        }
        let s = Scenario {
            room,
            cell,
            kind,
            n_pd,
            psi_total: self.f64("adr.psi_total_deg").to_radians(),
            psi_c: self.f64_or_auto("adr.psi_c_deg").map(f64::to_radians),
            total_area,
            ring_radius: self.f64("adr.ring_radius_m"),
            n_ref: self.f64("adr.n_ref"),
            t_s: self.f64("adr.t_s"),
            half_power_angle: self.f64("ap.half_power_angle_deg").to_radians(),
            combiner: self.parsed::<CombinerKind>("phy.combiner")?,
            phy: PhyParams {
                tau: self.f64("phy.responsivity"),
                p_tx: self.f64("phy.p_tx_w"),
                kappa: self.f64("phy.kappa"),
                n0: self.f64("phy.n0"),
                b_l: self.f64("phy.b_t_hz"),
                m_sub: self.usize("phy.subcarriers"),
            },
            b_t: self.f64("phy.b_t_hz"),
            bandwidth,
            patch_size: self.f64("channel.patch_m"),
            max_elements: self.usize("channel.max_elements"),
            reflection,
            n_samples: self.usize("sim.n_samples"),
            seed: self.get("sim.seed").as_integer().expect("type checked") as u64,
            orientation_mode,
            orientation,
            averaging,
        };
        s.validate().map_err(core)?;
        Ok(s)
    }

    /// Values derived from the configuration that a reader of the outputs needs.
    pub fn resolved(&self, s: &Scenario<f64>) -> serde_json::Value {
        json!({
            "r_load_ohm": s.bandwidth.r_load,
            "kappa": s.phy.kappa,
            "subcarriers": s.phy.m_sub,
            "ue_height_m": s.cell.ue_height(),
            "ap_positions_m": s.cell.ap_positions.iter().map(|p| [p.x, p.y, p.z]).collect::<Vec<_>>(),
            "source_positions_m": s.cell.source_positions().iter().map(|p| [p.x, p.y, p.z]).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_has_a_default_and_a_description() {
        let d = defaults();
        assert_eq!(d.len(), KEYS.len());
        for (k, _) in KEYS {
            let v = d.get(*k).unwrap_or_else(|| panic!("no default for {k}"));
            check_type(k, v).unwrap();
        }
    }

    #[test]
    fn defaults_build_the_office_scenario() {
        let s = Config::default().scenario().unwrap();
        let office: Scenario<f64> = Scenario::office(CellMode::SingleSource);
        assert_eq!(s.cell, office.cell);
        assert_eq!(s.room, office.room);
        assert!((s.bandwidth.r_load - office.bandwidth.r_load).abs() < 1e-9);
        assert_eq!(s.n_samples, office.n_samples);
    }

    #[test]
    fn nested_and_dotted_tables_flatten() {
        let mut c = Config::default();
        c.merge_toml("cell.mode = \"ds\"\n[sim]\nseed = 9\n")
            .unwrap();
        assert_eq!(c.str("cell.mode"), "ds");
        assert_eq!(c.usize("sim.seed"), 9);
    }

    #[test]
    fn unknown_key_is_named() {
        let mut c = Config::default();
        let e = c.merge_toml("[room]\nwidht_m = 3\n").unwrap_err();
        assert!(e.to_string().contains("room.widht_m"), "{e}");
    }

    #[test]
    fn wrong_type_is_rejected() {
        let mut c = Config::default();
        assert!(c.set_assignment("sim.n_samples=1.5").is_err());
        assert!(c.set_assignment("adr.psi_c_deg=manual").is_err());
        c.set_assignment("adr.psi_c_deg=25").unwrap();
        c.set_assignment("cell.mode=ds").unwrap();
        c.set_assignment("phy.n0_list=[1e-21]").unwrap();
        assert_eq!(c.n0_list().unwrap(), vec![1e-21]);
    }

    #[test]
    fn bad_enum_value_names_key() {
        let mut c = Config::default();
        c.set_assignment("phy.combiner=XYZ").unwrap();
        let e = c.scenario().unwrap_err();
        assert!(e.to_string().contains("phy.combiner"), "{e}");
    }
}
