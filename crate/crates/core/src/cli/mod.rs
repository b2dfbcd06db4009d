//! Configuration-driven batch driver behind the `dipolar-shield` binary.
//!
//! Every sweep point is cached as a JSON file under `<out>/points/`, keyed by a
//! hash of the physical configuration and the point, so interrupted runs resume
//! and re-runs skip completed work.

pub mod config;
pub mod output;

pub use config::{AxisValue, ConvergenceAxis, Format, RunConfig};
pub use output::{Cell, Row, Table};

use crate::interaction::{adiabats, CouplingModel};
use crate::monomer::{
    field_dressed_states, induced_dipole, pair_threshold_crossing_at, spin_channel_openings,
    MonomerLabel,
};
use crate::observables::{
    beta_decomposition, cross_sections, mtot_weights, power_law_exponent, DipoleLength,
    ObservableSet,
};
use crate::pair_basis::MonomerSet;
use crate::propagator::{solve_model, ScatteringSolution};
use crate::{units, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Conditions of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub field_kv_cm: f64,
    pub b_gauss: f64,
    pub e_coll_uk: f64,
}

/// Cached result of one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub key: String,
    pub point: SweepPoint,
    pub observables: ObservableSet,
    /// Largest unitarity deficit over the solved blocks.
    pub max_unitarity_deficit: f64,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub points: usize,
    pub failures: Vec<String>,
}

impl RunSummary {
    /// 0 on success, 1 when some points failed.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of everything that changes the physics of a point.
pub fn point_key(cfg: &RunConfig, p: &SweepPoint) -> String {
    let payload = serde_json::json!({
        "molecule": cfg.molecule,
        "basis": cfg.basis,
        "interaction": cfg.interaction,
        "propagation": cfg.propagation,
        "point": p,
    });
    hex(&Sha256::digest(payload.to_string().as_bytes())[..12])
}

fn m_tot_list(cfg: &RunConfig, b_gauss: f64) -> String {
    mtot_weights(&cfg.basis.m_tot, b_gauss)
        .iter()
        .map(|(m, _)| m.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Solves every M_tot block of one point and sums the observables.
pub fn compute_point(cfg: &RunConfig, p: &SweepPoint) -> Result<PointRecord> {
    let params = cfg.molecule.params()?;
    let opts = cfg.interaction.options();
    let spec0 = cfg.basis.spec(0)?;
    let ms = MonomerSet::new(
        &params,
        p.field_kv_cm,
        p.b_gauss,
        spec0.ntilde_max,
        spec0.ntilde_max,
        spec0.include_spin,
    )?;
    let e = units::microkelvin_to_au(p.e_coll_uk);
    let mut blocks: Vec<(f64, ScatteringSolution)> = Vec::new();
    for (m, w) in mtot_weights(&cfg.basis.m_tot, p.b_gauss) {
        let model = CouplingModel::build(&ms, &cfg.basis.spec(m)?, &opts)?;
        blocks.push((
            w,
            solve_model(&model, e, p.field_kv_cm, p.b_gauss, &cfg.propagation)?,
        ));
    }
    let refs: Vec<(f64, &ScatteringSolution)> = blocks.iter().map(|(w, s)| (*w, s)).collect();
    let observables = cross_sections(&refs, params.reduced_mass())?;
    let max_unitarity_deficit = blocks
        .iter()
        .flat_map(|(_, s)| s.raw.diagnostics.unitarity_deficit.iter().copied())
        .fold(0.0f64, f64::max);
    Ok(PointRecord {
        key: point_key(cfg, p),
        point: *p,
        observables,
        max_unitarity_deficit,
    })
}

fn point_path(dir: &Path, key: &str) -> PathBuf {
    dir.join("points").join(format!("{key}.json"))
}

/// Loads a cached point or computes and stores it.
pub fn cached_point(cfg: &RunConfig, dir: &Path, p: &SweepPoint) -> Result<PointRecord> {
    let key = point_key(cfg, p);
    let path = point_path(dir, &key);
    if let Ok(text) = std::fs::read_to_string(&path) {
        match serde_json::from_str::<PointRecord>(&text) {
            Ok(r) if r.key == key => return Ok(r),
            _ => log::warn!("ignoring unreadable point file {}", path.display()),
        }
    }
    let rec = compute_point(cfg, p)?;
    let text = serde_json::to_string(&rec).expect("point serializes");
    output::write_atomic(&path, text.as_bytes())?;
    Ok(rec)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn grid(cfg: &RunConfig, energy_major: bool) -> Vec<SweepPoint> {
    let s = &cfg.sweep;
    let mut v = Vec::new();
    for &b in &s.b_gauss {
        if energy_major {
            for &f in &s.fields_kv_cm {
                for &e in &s.energies_uk {
                    v.push(SweepPoint {
                        field_kv_cm: f,
                        b_gauss: b,
                        e_coll_uk: e,
                    });
                }
            }
        } else {
            for &e in &s.energies_uk {
                for &f in &s.fields_kv_cm {
                    v.push(SweepPoint {
                        field_kv_cm: f,
                        b_gauss: b,
                        e_coll_uk: e,
                    });
                }
            }
        }
    }
    v
}

/// Runs all points on a pool of `jobs` workers (0 = all cores), keeping input order.
pub fn run_points(
    cfg: &RunConfig,
    dir: &Path,
    points: &[SweepPoint],
    jobs: usize,
) -> Result<(Vec<PointRecord>, Vec<String>)> {
    let results: Vec<Result<PointRecord>> = pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|p| cached_point(cfg, dir, p))
            .collect()
    });
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok(rec) => ok.push(rec),
            Err(e) => {
                let msg = format!(
                    "F = {} kV/cm, B = {} G, E = {} uK: {e}",
                    p.field_kv_cm, p.b_gauss, p.e_coll_uk
                );
                log::error!("{msg}");
                failures.push(msg);
            }
        }
    }
    Ok((ok, failures))
}

/// Dataset rows for one point.
pub fn observable_rows(cfg: &RunConfig, rec: &PointRecord) -> Vec<Row> {
    let o = &rec.observables;
    let p = rec.point;
    let mlist = m_tot_list(cfg, p.b_gauss);
    let row = |q: String, l: Option<u32>, v: f64, u: &'static str| Row {
        field_kv_cm: p.field_kv_cm,
        b_gauss: p.b_gauss,
        e_coll_uk: p.e_coll_uk,
        m_tot_list: mlist.clone(),
        quantity: q,
        l_in: l,
        value: v,
        units: u,
    };
    let mut rows = Vec::new();
    let totals = [
        ("el", o.sigma_el),
        ("inel", o.sigma_inel),
        ("short", o.sigma_short),
        ("loss", o.sigma_loss),
    ];
    for (name, s) in totals {
        rows.push(row(format!("sigma_{name}"), None, s, "a0^2"));
    }
    rows.push(row(
        "sigma_loss_direct".into(),
        None,
        o.sigma_loss_direct,
        "a0^2",
    ));
    rows.push(row(
        "sigma_el_higher".into(),
        None,
        o.sigma_el_higher,
        "a0^2",
    ));
    for (name, s) in totals {
        rows.push(row(format!("k_{name}"), None, o.rate(s), "cm3/s"));
    }
    rows.push(row(
        "loss_identity_error".into(),
        None,
        o.loss_identity_error(),
        "1",
    ));
    rows.push(row(
        "unitarity_deficit_max".into(),
        None,
        rec.max_unitarity_deficit,
        "1",
    ));
    if let Some(a) = o.scattering_length() {
        match a {
            Ok(a) => {
                rows.push(row("alpha".into(), None, a.alpha, "a0"));
                rows.push(row("beta".into(), None, a.beta, "a0"));
            }
            Err(e) => log::warn!("no scattering length at {p:?}: {e}"),
        }
    }
    for (l, ps) in &o.partial {
        for (name, s) in [
            ("el", ps.el),
            ("inel", ps.inel),
            ("short", ps.short),
            ("loss", ps.loss),
        ] {
            rows.push(row(format!("sigma_{name}"), Some(*l), s, "a0^2"));
        }
    }
    for (level, s) in &o.state_to_state {
        rows.push(row(format!("sigma_inel_to[{level}]"), None, *s, "a0^2"));
    }
    rows
}

fn finish_sweep(cfg: &RunConfig, dir: &Path, stem: &str, recs: &[PointRecord]) -> Result<PathBuf> {
    let rows: Vec<Row> = recs.iter().flat_map(|r| observable_rows(cfg, r)).collect();
    Table::from_rows(&rows).write(dir, stem, cfg.output.format, cfg.output.timestamp)
}

/// Observables over the field grid (outer loop) for every energy and B.
pub fn run_field_sweep(cfg: &RunConfig, jobs: usize) -> Result<RunSummary> {
    let dir = &cfg.output.dir;
    let points = grid(cfg, false);
    let (recs, failures) = run_points(cfg, dir, &points, jobs)?;
    let out = finish_sweep(cfg, dir, "sweep-field", &recs)?;
    Ok(RunSummary {
        outputs: vec![out],
        points: points.len(),
        failures,
    })
}

/// Observables over the energy grid plus threshold-law fits per field.
pub fn run_energy_sweep(cfg: &RunConfig, jobs: usize) -> Result<RunSummary> {
    let dir = &cfg.output.dir;
    let points = grid(cfg, true);
    let (recs, mut failures) = run_points(cfg, dir, &points, jobs)?;
    let mut outputs = vec![finish_sweep(cfg, dir, "sweep-energy", &recs)?];
    let params = cfg.molecule.params()?;
    let mut fits = Table::new(&["field_kVcm", "B_G", "quantity", "value", "units"]);
    for &b in &cfg.sweep.b_gauss {
        for &f in &cfg.sweep.fields_kv_cm {
            let sel: Vec<&PointRecord> = recs
                .iter()
                .filter(|r| r.point.field_kv_cm == f && r.point.b_gauss == b)
                .collect();
            if sel.len() < 2 {
                continue;
            }
            let mut push = |q: &str, v: f64, u: &str| {
                fits.push(vec![f.into(), b.into(), q.into(), v.into(), u.into()])
            };
            let e: Vec<f64> = sel.iter().map(|r| r.point.e_coll_uk).collect();
            let k_el: Vec<f64> = sel
                .iter()
                .map(|r| r.observables.rate(r.observables.sigma_el))
                .collect();
            let k_loss: Vec<f64> = sel
                .iter()
                .map(|r| r.observables.rate(r.observables.sigma_loss))
                .collect();
            if k_el.iter().all(|k| *k > 0.0) {
                push("k_el_energy_exponent", power_law_exponent(&e, &k_el), "1");
            }
            let (lo, hi) = k_loss
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
            if hi > 0.0 {
                push("k_loss_spread", (hi - lo) / hi, "1");
            }
            let with_a: Vec<(f64, f64)> = sel
                .iter()
                .filter_map(|r| {
                    let a = r.observables.scattering_length()?.ok()?;
                    Some((r.observables.k0, a.beta))
                })
                .collect();
            if with_a.len() >= 2 {
                let k0: Vec<f64> = with_a.iter().map(|x| x.0).collect();
                let beta: Vec<f64> = with_a.iter().map(|x| x.1).collect();
                let fit =
                    DipoleLength::for_state(&params, f, MonomerLabel::rotor(1, 0), cfg.stark.n_max)
                        .and_then(|d| beta_decomposition(&k0, &beta, &d));
                match fit {
                    Ok(fit) => {
                        push("beta_loss", fit.beta_loss, "a0");
                        push("beta_slope", fit.slope, "a0^2");
                        push("beta_slope_ratio", fit.slope_ratio, "1");
                        push("beta_fit_rms", fit.rms_residual, "a0");
                        for w in fit.warnings {
                            log::warn!("beta fit at {f} kV/cm: {w}");
                        }
                    }
                    Err(e) => failures.push(format!("beta fit at {f} kV/cm: {e}")),
                }
            }
        }
    }
    outputs.push(fits.write(
        dir,
        "sweep-energy-fits",
        cfg.output.format,
        cfg.output.timestamp,
    )?);
    Ok(RunSummary {
        outputs,
        points: points.len(),
        failures,
    })
}

/// Monomer Stark energies and dipoles over the field grid, plus the pair-threshold crossings.
pub fn run_stark_map(cfg: &RunConfig) -> Result<RunSummary> {
    let params = cfg.molecule.params()?;
    let st = &cfg.stark;
    let mut table = Table::new(&["field_kVcm", "ntilde", "mn", "energy_GHz", "dipole_D"]);
    let mut failures = Vec::new();
    for &f in &cfg.sweep.fields_kv_cm {
        match field_dressed_states(&params, f, st.n_max) {
            Ok(states) => {
                for s in states.iter().filter(|s| s.label.ntilde <= st.ntilde_max) {
                    table.push(vec![
                        f.into(),
                        i64::from(s.label.ntilde).into(),
                        i64::from(s.label.mn).into(),
                        units::au_to_ghz(s.energy).into(),
                        units::au_to_debye(induced_dipole(s, &params)).into(),
                    ]);
                }
            }
            Err(e) => failures.push(format!("F = {f} kV/cm: {e}")),
        }
    }
    let dir = &cfg.output.dir;
    let mut outputs =
        vec![table.write(dir, "stark-map", cfg.output.format, cfg.output.timestamp)?];
    let r = MonomerLabel::rotor;
    let incoming = (r(1, 0), r(1, 0));
    let mut crossings = Table::new(&["pair_a", "pair_b", "field_kVcm"]);
    for mn in [0, 1, 2] {
        let other = (r(0, 0), r(2, mn));
        let bracket = (st.crossing_bracket[0], st.crossing_bracket[1]);
        match pair_threshold_crossing_at(&params, incoming, other, bracket, 0.0, st.n_max) {
            Ok(f) => crossings.push(vec![
                "(1,0)+(1,0)".into(),
                format!("(0,0)+(2,{mn})").into(),
                f.into(),
            ]),
            Err(e) => failures.push(format!("crossing with (0,0)+(2,{mn}): {e}")),
        }
    }
    let spec = cfg.basis.spec(0)?;
    if spec.include_spin {
        let bracket = (st.crossing_bracket[0], st.crossing_bracket[1]);
        for &b in &cfg.sweep.b_gauss {
            match spin_channel_openings(&params, spec.incoming.a, bracket, b, st.n_max.min(10)) {
                Ok(v) => {
                    for (x, y, f) in v {
                        let pair_a = format!("{}@{b}G", spec.incoming);
                        crossings.push(vec![pair_a.into(), format!("{x}+{y}").into(), f.into()]);
                    }
                }
                Err(e) => failures.push(format!("spin openings at {b} G: {e}")),
            }
        }
    }
    outputs.push(crossings.write(
        dir,
        "stark-crossings",
        cfg.output.format,
        cfg.output.timestamp,
    )?);
    Ok(RunSummary {
        outputs,
        points: cfg.sweep.fields_kv_cm.len(),
        failures,
    })
}

/// Geometric grid from `r_min` to `r_max`.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let ratio = (r_max / r_min).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                r_max
            } else {
                r_min * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// Adiabatic curves near the incoming threshold for each field and M_tot.
pub fn run_adiabats(cfg: &RunConfig, jobs: usize) -> Result<RunSummary> {
    let params = cfg.molecule.params()?;
    let opts = cfg.interaction.options();
    let a = &cfg.adiabats;
    let b = cfg.sweep.b_gauss[0];
    let r = log_grid(a.r_min, a.r_max, a.points);
    let window = units::ghz_to_au(a.window_ghz);
    let tasks: Vec<(f64, i32)> = cfg
        .sweep
        .fields_kv_cm
        .iter()
        .flat_map(|&f| cfg.basis.m_tot.iter().map(move |&m| (f, m)))
        .collect();
    let run = |&(f, m): &(f64, i32)| -> Result<Vec<Vec<Cell>>> {
        let spec = cfg.basis.spec(m)?;
        let ms = MonomerSet::new(
            &params,
            f,
            b,
            spec.ntilde_max,
            spec.ntilde_max,
            spec.include_spin,
        )?;
        let model = CouplingModel::build(&ms, &spec, &opts)?;
        let ad = adiabats(&model, &r)?;
        let mut rows = Vec::new();
        let mut curve = 0i64;
        for (e, dom) in ad.energies.iter().zip(&ad.dominant) {
            let asym = model.channels[*dom.last().expect("grid")].threshold;
            if asym.abs() > window {
                continue;
            }
            for (i, &ri) in r.iter().enumerate() {
                let ch = &model.channels[dom[i]];
                rows.push(vec![
                    f.into(),
                    i64::from(m).into(),
                    curve.into(),
                    ri.into(),
                    units::au_to_microkelvin(e[i]).into(),
                    i64::from(ch.l).into(),
                    ch.level.to_string().into(),
                ]);
            }
            curve += 1;
        }
        Ok(rows)
    };
    let results: Vec<Result<Vec<Vec<Cell>>>> =
        pool(jobs)?.install(|| tasks.par_iter().map(run).collect());
    let mut table = Table::new(&[
        "field_kVcm",
        "Mtot",
        "curve",
        "R_a0",
        "energy_uK",
        "L_dominant",
        "level_dominant",
    ]);
    let mut failures = Vec::new();
    for ((f, m), res) in tasks.iter().zip(results) {
        match res {
            Ok(rows) => rows.into_iter().for_each(|row| table.push(row)),
            Err(e) => failures.push(format!("F = {f} kV/cm, M_tot = {m}: {e}")),
        }
    }
    let out = table.write(
        &cfg.output.dir,
        "adiabats",
        cfg.output.format,
        cfg.output.timestamp,
    )?;
    Ok(RunSummary {
        outputs: vec![out],
        points: tasks.len(),
        failures,
    })
}

fn with_axis(cfg: &RunConfig, axis: ConvergenceAxis, v: &AxisValue) -> Result<RunConfig> {
    let mut c = cfg.clone();
    match (axis, v) {
        (ConvergenceAxis::LMax, AxisValue::Number(x)) => c.basis.l_max = *x as u32,
        (ConvergenceAxis::RAbsorb, AxisValue::Number(x)) => c.propagation.r_absorb = *x,
        (ConvergenceAxis::Basis, AxisValue::Name(n)) => c.basis.preset = n.clone(),
        _ => {
            return Err(Error::Config(format!(
                "invalid value {v} for axis {axis:?}"
            )))
        }
    }
    Ok(c)
}

/// Index of the reference ("largest") setting.
fn reference_index(values: &[AxisValue]) -> usize {
    let nums: Option<Vec<f64>> = values
        .iter()
        .map(|v| match v {
            AxisValue::Number(x) => Some(*x),
            AxisValue::Name(_) => None,
        })
        .collect();
    match nums {
        Some(n) => (0..n.len()).fold(0, |best, i| if n[i] > n[best] { i } else { best }),
        None => values.len() - 1,
    }
}

/// Relative change `(x - reference) / |reference|`; zero when both vanish.
pub fn relative_change(x: f64, reference: f64) -> f64 {
    if x == reference {
        0.0
    } else {
        (x - reference) / reference.abs()
    }
}

/// Repeats the sweep grid for each value of one axis and tabulates changes against the largest setting.
pub fn run_convergence(cfg: &RunConfig, jobs: usize) -> Result<RunSummary> {
    let conv = &cfg.convergence;
    let points = grid(cfg, false);
    let mut per_value = Vec::new();
    let mut failures = Vec::new();
    for v in &conv.values {
        let c = with_axis(cfg, conv.axis, v)?;
        let (recs, f) = run_points(&c, &cfg.output.dir, &points, jobs)?;
        failures.extend(f.into_iter().map(|m| format!("{v}: {m}")));
        per_value.push(recs);
    }
    let refs = &per_value[reference_index(&conv.values)];
    let mut table = Table::new(&[
        "axis",
        "setting",
        "field_kVcm",
        "B_G",
        "Ecoll_uK",
        "quantity",
        "value",
        "rel_change",
    ]);
    let axis = serde_json::to_value(conv.axis)
        .expect("axis")
        .as_str()
        .expect("string")
        .to_string();
    let quantities = |o: &ObservableSet| {
        [
            ("k_el", o.rate(o.sigma_el)),
            ("k_inel", o.rate(o.sigma_inel)),
            ("k_short", o.rate(o.sigma_short)),
            ("k_loss", o.rate(o.sigma_loss)),
        ]
    };
    for (v, recs) in conv.values.iter().zip(&per_value) {
        for rec in recs {
            let Some(r0) = refs.iter().find(|r| r.point == rec.point) else {
                continue;
            };
            let p = rec.point;
            for ((q, x), (_, x0)) in quantities(&rec.observables)
                .into_iter()
                .zip(quantities(&r0.observables))
            {
                table.push(vec![
                    axis.as_str().into(),
                    v.to_string().into(),
                    p.field_kv_cm.into(),
                    p.b_gauss.into(),
                    p.e_coll_uk.into(),
                    q.into(),
                    x.into(),
                    relative_change(x, x0).into(),
                ]);
            }
        }
    }
    let out = table.write(
        &cfg.output.dir,
        "converge",
        cfg.output.format,
        cfg.output.timestamp,
    )?;
    Ok(RunSummary {
        outputs: vec![out],
        points: points.len() * conv.values.len(),
        failures,
    })
}
