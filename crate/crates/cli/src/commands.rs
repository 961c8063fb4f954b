use attocell::adr::{receiver_bandwidth, AdrKind, Thickness};
use attocell::channel::OpticalRx;
use attocell::combining::{CellMode, CombinerKind};
use attocell::coverage::{
    adr_footprint, empirical_min_fov, fov_lower_bound, prob_visibility, Footprint,
};
use attocell::geometry::{Orientation, Vec3};
use attocell::orientation::OrientationMode;
use attocell::simulation::{
    aggregate, power_profile, receiver_setup, sample_users, sweep_n_pd, AggregateResult,
    Environment,
};
use attocell::Scenario;
use serde_json::json;

use crate::config::{Config, ConfigError};
use crate::output::{Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl From<attocell::Error> for CliError {
    fn from(e: attocell::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// With an automatic FOV, every PD count must admit a bound for this cell.
fn check_bounds(s: &Scenario<f64>, ns: &[usize]) -> Result<(), ConfigError> {
    if s.psi_c.is_some() {
        return Ok(());
    }
    for &n in ns {
        fov_lower_bound(&s.cell, s.kind, n, s.psi_total).map_err(|e| ConfigError::Invalid {
            key: "cell.r_cell_m".into(),
            reason: format!("{} PDs: {e}", n),
        })?;
    }
    Ok(())
}

pub fn fov_bound(cfg: &Config) -> Result<Report, CliError> {
    let base = cfg.scenario()?;
    let kinds: Vec<AdrKind> = cfg.parsed_list("fov.kinds")?;
    let modes: Vec<CellMode> = cfg.parsed_list("fov.modes")?;
    let mc_orientation: OrientationMode = cfg.parsed("fov.mc_orientation")?;
    let mc_samples = cfg.usize("fov.mc_samples");
    let mut cases = Vec::new();
    for &mode in &modes {
        let s = base.with_mode(mode);
        s.cell.validate().map_err(|e| match e {
            attocell::Error::InvalidParameter { name, reason } => ConfigError::Invalid {
                key: name.into(),
                reason,
            },
            e => ConfigError::Invalid {
                key: "cell".into(),
                reason: e.to_string(),
            },
        })?;
        for &kind in &kinds {
            let ns = cfg.n_pd_list(kind)?;
            check_bounds(
                &Scenario {
                    kind,
                    psi_c: None,
                    ..s.clone()
                },
                &ns,
            )?;
            cases.push((s.cell.clone(), mode, kind, ns));
        }
    }
    let mut t = Table::new(
        "fov_bound.csv",
        "attocell.fov_bound/1",
        &[
            "mode",
            "kind",
            "n_pd",
            "psi_c1_deg",
            "psi_c2_deg",
            "psi_c_min_deg",
            "psi_c_min_ceil_deg",
            "d_c_min_m",
            "d_c2_m",
            "omega_c_deg",
            "mc_min_deg",
            "mc_abs_diff_deg",
        ],
    );
    for (cell, mode, kind, ns) in cases {
        for n in ns {
            let b = fov_lower_bound(&cell, kind, n, base.psi_total)?;
            let mc = if mc_samples > 0 {
                empirical_min_fov(
                    &cell,
                    kind,
                    n,
                    base.psi_total,
                    mc_orientation,
                    mc_samples,
                    base.seed,
                )?
            } else {
                None
            };
            let psi = b.psi_c_min.to_degrees();
            t.rows.push(vec![
                mode.to_string(),
                kind.to_string(),
                n.to_string(),
                num(b.psi_c1_min.to_degrees()),
                num(b.psi_c2_min.to_degrees()),
                num(psi),
                b.ceil_deg().to_string(),
                num(b.d_c_min),
                num(b.d_c2),
                num(b.omega_c.to_degrees()),
                mc.map(|m| m.to_string()).unwrap_or_default(),
                mc.map(|m| num((m as f64 - psi).abs())).unwrap_or_default(),
            ]);
        }
    }
    Ok(Report {
        command: "fov-bound",
        tables: vec![t],
        resolved: json!({ "mc_samples": mc_samples, "mc_orientation": mc_orientation }),
    })
}

pub fn coverage(cfg: &Config) -> Result<Report, CliError> {
    let s = cfg.scenario()?;
    check_bounds(&s, &[s.n_pd])?;
    let setup = receiver_setup(&s, s.n_pd)?;
    let layout = setup.layout;
    let feet = adr_footprint(&layout, s.cell.h)?;
    let mut pds = Table::new(
        "coverage.csv",
        "attocell.coverage/1",
        &[
            "pd",
            "elevation_deg",
            "azimuth_deg",
            "shape",
            "semi_axis_a_m",
            "semi_axis_b_m",
            "center_x_m",
            "center_y_m",
            "area_m2",
        ],
    );
    let mut boundary = Table::new(
        "coverage_boundary.csv",
        "attocell.coverage_boundary/1",
        &["pd", "point", "x_m", "y_m"],
    );
    let points = cfg.usize("coverage.boundary_points").max(1);
    for (pd, fp) in layout.pds().iter().zip(&feet) {
        let (shape, a, b, cx, cy) = match *fp {
            Footprint::Circle { radius } => ("circle", radius, radius, 0.0, 0.0),
            Footprint::Ellipse { spec, azimuth } => {
                let (sn, cs) = azimuth.sin_cos();
                let (x, y) = spec.center;
                ("ellipse", spec.a, spec.b, x * cs - y * sn, x * sn + y * cs)
            }
        };
        pds.rows.push(vec![
            pd.index.to_string(),
            num(pd.vert_angles.elevation.to_degrees()),
            num(pd.vert_angles.azimuth.to_degrees()),
            shape.to_string(),
            num(a),
            num(b),
            num(cx),
            num(cy),
            num(fp.area()),
        ]);
        for k in 0..points {
            let (x, y) = fp.boundary_point(std::f64::consts::TAU * k as f64 / points as f64);
            boundary
                .rows
                .push(vec![pd.index.to_string(), k.to_string(), num(x), num(y)]);
        }
    }
    let pv_samples = cfg.usize("coverage.pv_samples").max(1);
    let pv = |mode| prob_visibility(&layout, &s.cell, mode, &s.orientation, pv_samples, s.seed);
    let mut resolved = cfg.resolved(&s);
    resolved["psi_c_deg"] = json!(layout.psi_c.to_degrees());
    resolved["theta_pd_deg"] = json!(layout.theta_pd.to_degrees());
    resolved["p_v_vertical"] = json!(pv(OrientationMode::Vertical)?);
    resolved["p_v_random"] = json!(pv(OrientationMode::Random)?);
    resolved["pv_samples"] = json!(pv_samples);
    Ok(Report {
        command: "coverage",
        tables: vec![pds, boundary],
        resolved,
    })
}

pub fn channel_profile(cfg: &Config) -> Result<Report, CliError> {
    let s = cfg.scenario()?;
    let orders = cfg.usize("profile.orders");
    let psi_c = cfg.f64("profile.psi_c_deg");
    let area = cfg.f64("profile.area_m2");
    let z = s.cell.ue_height();
    let mut rxs = Vec::new();
    for (x, y, theta, omega) in cfg.poses() {
        let pos = Vec3::new(x, y, z);
        if !s.room.contains(pos) {
            return Err(ConfigError::Invalid {
                key: "profile.poses".into(),
                reason: format!("pose ({x}, {y}, {z}) lies outside the room"),
            }
            .into());
        }
        let o = Orientation::new(theta, omega);
        let rx = OpticalRx::new(
            pos,
            o.device_normal(),
            area,
            psi_c.to_radians(),
            s.n_ref,
            s.t_s,
        )
        .map_err(|e| ConfigError::Invalid {
            key: "profile.psi_c_deg".into(),
            reason: e.to_string(),
        })?;
        rxs.push((o, rx));
    }
    let env = Environment::build(&s)?;
    let mut header: Vec<String> = ["x_m", "y_m", "z_m", "theta_deg", "omega_deg", "los_w"]
        .iter()
        .map(|h| h.to_string())
        .collect();
    header.extend((1..=orders).map(|l| format!("order_{l}_w")));
    header.extend(
        [
            "diffuse_all_w",
            "total_w",
            "p_los",
            "diffuse_share",
            "share_above_5",
        ]
        .iter()
        .map(|h| h.to_string()),
    );
    let mut t = Table::new("channel_profile.csv", "attocell.channel_profile/1", &[]);
    t.header = header;
    for (o, rx) in rxs {
        let p = power_profile(&env.channel, &rx, orders.max(5))?;
        let mut row = vec![
            num(rx.position.x),
            num(rx.position.y),
            num(rx.position.z),
            num(o.theta.to_degrees()),
            num(o.omega.to_degrees()),
            num(p.los_w),
        ];
        row.extend(p.orders_w.iter().take(orders).map(|v| num(*v)));
        row.extend([
            num(p.diffuse_w),
            num(p.total_w()),
            num(p.p_los()),
            num(p.diffuse_share()),
            num(p.share_above(5)),
        ]);
        t.rows.push(row);
    }
    let mut resolved = cfg.resolved(&s);
    resolved["reflector_elements"] = json!(env.channel.mesh.len());
    resolved["source_power_w"] = json!(s.phy.source_power(s.cell.mode));
    Ok(Report {
        command: "channel-profile",
        tables: vec![t],
        resolved,
    })
}

pub fn bandwidth(cfg: &Config) -> Result<Report, CliError> {
    let s = cfg.scenario()?;
    let ns = cfg.n_pd_list(s.kind)?;
    let mut t = Table::new(
        "bandwidth.csv",
        "attocell.bandwidth/1",
        &[
            "kind",
            "n_pd",
            "pd_area_m2",
            "thickness_m",
            "b_r_hz",
            "b_t_hz",
            "b_l_hz",
        ],
    );
    for n in ns {
        let area = s.total_area / n as f64;
        let b_r = receiver_bandwidth(area, &s.bandwidth, Thickness::Optimal)?;
        t.rows.push(vec![
            s.kind.to_string(),
            n.to_string(),
            num(area),
            num(s.bandwidth.optimal_thickness(area)),
            num(b_r),
            num(s.b_t),
            num(b_r.min(s.b_t)),
        ]);
    }
    Ok(Report {
        command: "bandwidth",
        tables: vec![t],
        resolved: cfg.resolved(&s),
    })
}

const SIM_HEADER: &[&str] = &[
    "n_pd",
    "kind",
    "combiner",
    "n0",
    "mode",
    "psi_c_deg",
    "b_r_hz",
    "b_l_hz",
    "avg_sinr_db",
    "ci95_sinr_db",
    "avg_inr_db",
    "ci95_inr_db",
    "avg_rate_bps",
    "ci95_rate_bps",
    "p_v",
    "ci95_p_v",
    "no_coverage_fraction",
    "n_samples",
];

fn sim_row(r: &AggregateResult) -> Vec<String> {
    let m = &r.metadata;
    vec![
        m.n_pd.to_string(),
        m.kind.to_string(),
        m.combiner.to_string(),
        num(m.n0),
        m.mode.to_string(),
        num(m.psi_c_deg),
        num(m.b_r_hz),
        num(m.b_l_hz),
        num(r.avg_sinr_db),
        num(r.ci95_sinr_db),
        num(r.avg_inr_db),
        num(r.ci95_inr_db),
        num(r.avg_rate_bps),
        num(r.ci95_rate_bps),
        num(r.p_v),
        num(r.ci95_p_v),
        num(r.no_coverage_fraction),
        r.n_samples.to_string(),
    ]
}

pub fn simulate(cfg: &Config) -> Result<Report, CliError> {
    let s = cfg.scenario()?;
    check_bounds(&s, &[s.n_pd])?;
    let env = Environment::build(&s)?;
    let setup = receiver_setup(&s, s.n_pd)?;
    let samples = sample_users(&env, &s, &setup.layout)?;
    let r = aggregate(&samples, &s, &setup, s.combiner, s.phy.n0)?;
    let mut t = Table::new("simulate.csv", "attocell.sim/1", SIM_HEADER);
    t.rows.push(sim_row(&r));
    let mut resolved = cfg.resolved(&s);
    resolved["reflector_elements"] = json!(env.channel.mesh.len());
    Ok(Report {
        command: "simulate",
        tables: vec![t],
        resolved,
    })
}

pub fn sweep(cfg: &Config) -> Result<Report, CliError> {
    let s = cfg.scenario()?;
    let ns = cfg.n_pd_list(s.kind)?;
    let combiners: Vec<CombinerKind> = cfg.parsed_list("phy.combiners")?;
    let n0s = cfg.n0_list()?;
    check_bounds(&s, &ns)?;
    let env = Environment::build(&s)?;
    let points = sweep_n_pd(&env, &s, &ns, &combiners, &n0s)?;
    let mut t = Table::new("sweep.csv", "attocell.sim/1", SIM_HEADER);
    t.rows.extend(points.iter().map(|p| sim_row(&p.result)));
    let mut resolved = cfg.resolved(&s);
    resolved["reflector_elements"] = json!(env.channel.mesh.len());
    Ok(Report {
        command: "sweep",
        tables: vec![t],
        resolved,
    })
}
