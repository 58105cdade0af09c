use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Map, Value};
use tdsusy::darboux::{apply_chain, wronskian_sign_scan, ChainImage, TransformedPotential};
use tdsusy::numerics::{JetField, PotentialField, SpaceTimeGrid, ZeroField};
use tdsusy::pde::{discrete_norm_squared, propagate as run_propagation, PropagationRun};
use tdsusy::potentials::{Form, PotentialFamily};
use tdsusy::verify::{run_suite, Suite};

use crate::config::{read_json, ChainConfig, GridConfig, PropagateConfig};
use crate::output::{emit, field, json as to_json, num, Csv};
use crate::{Failure, Format, OutputArgs};

pub fn verify(suite: &str, tol: Option<f64>, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(Failure::config)?;
    if let Some(t) = tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::Config(format!("--tol must be a positive number, got {t}")));
        }
    }
    let report = run_suite(suite, tol);
    for check in &report.checks {
        eprintln!("{check}");
    }
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["name", "identity", "measured", "limit", "passed"]);
            for c in &report.checks {
                csv.row(&[
                    field(&c.name),
                    field(&c.identity),
                    c.measured.map(num).unwrap_or_default(),
                    field(&c.limit.to_string()),
                    c.passed.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    emit(out, &text)?;
    let failed: Vec<String> = report.failures().map(|c| format!("{} [{}]", c.name, c.identity)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} check(s) failed:\n  {}", failed.len(), failed.join("\n  "))))
    }
}

/// Builds a family from `--config` or from `--family` and scalar flags.
#[allow(clippy::too_many_arguments)]
pub fn family_from_args(
    config: Option<&Path>,
    family: Option<&str>,
    k: Option<usize>,
    n: Option<usize>,
    m: Option<usize>,
    l: Option<usize>,
    lambda: Option<f64>,
    omega: Option<f64>,
) -> Result<PotentialFamily, Failure> {
    let family: PotentialFamily = match (config, family) {
        (Some(path), _) => read_json(path)?,
        (None, Some(name)) => {
            let mut obj = Map::new();
            obj.insert("family".into(), Value::from(name));
            for (key, v) in [("k", k), ("n", n), ("m", m), ("l", l)] {
                if let Some(v) = v {
                    obj.insert(key.into(), Value::from(v));
                }
            }
            for (key, v) in [("lambda", lambda), ("omega", omega)] {
                if let Some(v) = v {
                    obj.insert(key.into(), json!(v));
                }
            }
            serde_json::from_value(Value::Object(obj))
                .map_err(|e| Failure::Config(format!("family '{name}': {e}")))?
        }
        (None, None) => return Err(Failure::Config("give --family or --config".into())),
    };
    family.validate().map_err(Failure::config)?;
    Ok(family)
}

#[derive(Serialize)]
struct PotentialExport<'a> {
    family: PotentialFamily,
    form: Form,
    grid: &'a GridConfig,
    /// Row-major in `t`, then `x`.
    values: Vec<f64>,
}

pub fn potential(family: PotentialFamily, form: Form, grid: &GridConfig, output: &OutputArgs) -> Result<(), Failure> {
    let g = grid.grid()?;
    let domain = family.domain();
    if let Some(&x) = g.x_nodes().iter().find(|&&x| !domain.contains_interior(x)) {
        return Err(Failure::Config(format!(
            "x = {x} lies outside the domain ({}, {}) of {}",
            domain.a,
            domain.b,
            family.name()
        )));
    }
    let mut values = Vec::with_capacity(g.x_nodes().len() * g.t_nodes().len());
    for &t in g.t_nodes() {
        for &x in g.x_nodes() {
            values.push(family.evaluate(x, t, form).map_err(Failure::classify)?);
        }
    }
    let text = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["x", "t", "value"]);
            let mut it = values.iter();
            for &t in g.t_nodes() {
                for &x in g.x_nodes() {
                    csv.numbers(&[x, t, *it.next().expect("one value per node")]);
                }
            }
            csv.finish()
        }
        Format::Json => to_json(&PotentialExport { family, form, grid, values })?,
    };
    emit(output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct TransformExport<'a> {
    chain: String,
    state: String,
    grid: &'a GridConfig,
    /// Columns row-major in `t`, then `x`.
    potential: Vec<f64>,
    abs_wronskian: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn grid_of(config: &ChainConfig, flag: Option<GridConfig>) -> Result<(GridConfig, SpaceTimeGrid), Failure> {
    let grid = flag
        .or(config.grid)
        .ok_or_else(|| Failure::Config("no grid: give --grid or a \"grid\" entry in the config".into()))?;
    let g = grid.grid()?;
    Ok((grid, g))
}

pub fn transform(path: &Path, grid: Option<GridConfig>, output: &OutputArgs) -> Result<(), Failure> {
    let config: ChainConfig = read_json(path)?;
    if config.chain.is_empty() {
        return Err(Failure::Config("the chain is empty".into()));
    }
    let state = config
        .state
        .clone()
        .ok_or_else(|| Failure::Config("no \"state\" to transform in the config".into()))?;
    let chain = config.build_chain()?.expect("non-empty chain");
    let (grid_config, g) = grid_of(&config, grid)?;
    let psi = state.build().map_err(Failure::config)?;

    let scan = wronskian_sign_scan(&chain, &g).map_err(Failure::runtime)?;
    if scan.changes > 0 {
        let poles: Vec<String> = scan
            .locations
            .iter()
            .map(|(x, t)| format!("x ~ {x:.6} at t = {t}"))
            .collect();
        return Err(Failure::Runtime(format!(
            "the Wronskian of {} changes sign {} time(s) along x: the transformed potential has poles near\n  {}",
            chain.label(),
            scan.changes,
            poles.join("\n  ")
        )));
    }

    let image = ChainImage::new(&chain, psi.clone()).map_err(Failure::classify)?;
    let n = g.x_nodes().len() * g.t_nodes().len();
    let (mut u, mut w, mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for &t in g.t_nodes() {
        for &x in g.x_nodes() {
            u.push(chain.potential_value(x, t).map_err(Failure::runtime)?);
            w.push(chain.wronskian_jet(x, t, 0).map_err(Failure::runtime)?.value().norm());
            let v = apply_chain(&chain, psi.as_ref(), x, t).map_err(Failure::runtime)?;
            re.push(v.re);
            im.push(v.im);
        }
    }
    let text = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["x", "t", "U", "absW", "re", "im"]);
            let mut i = 0;
            for &t in g.t_nodes() {
                for &x in g.x_nodes() {
                    csv.numbers(&[x, t, u[i], w[i], re[i], im[i]]);
                    i += 1;
                }
            }
            csv.finish()
        }
        Format::Json => to_json(&TransformExport {
            chain: chain.label(),
            state: image.label(),
            grid: &grid_config,
            potential: u,
            abs_wronskian: w,
            re,
            im,
        })?,
    };
    emit(output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SnapshotExport {
    t: f64,
    norm_squared: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize)]
struct PropagationExport {
    potential: String,
    x: Vec<f64>,
    snapshots: Vec<SnapshotExport>,
    diagnostics: tdsusy::pde::Diagnostics,
}

pub fn propagate(path: &Path, output: &OutputArgs) -> Result<(), Failure> {
    let config: PropagateConfig = read_json(path)?;
    let chain = config.chain.build_chain()?;
    let state = config.chain.state.as_ref().map(|s| s.build()).transpose().map_err(Failure::config)?;
    let (potential, initial): (Arc<dyn PotentialField>, Arc<dyn JetField>) = match (&chain, state) {
        (Some(chain), Some(psi)) => (
            Arc::new(TransformedPotential::new(chain)),
            Arc::new(ChainImage::new(chain, psi).map_err(Failure::classify)?),
        ),
        (Some(chain), None) => (Arc::new(TransformedPotential::new(chain)), Arc::new(ZeroField)),
        (None, Some(psi)) => (psi.potential(), psi),
        (None, None) => (config.chain.seed_potential.field()?, Arc::new(ZeroField)),
    };
    let b = config.box_;
    let mut run = PropagationRun::from_field(
        potential.clone(),
        initial.as_ref(),
        (b.x_min, b.x_max, b.nodes),
        config.tau,
        (config.t0, config.t_final),
    )
    .map_err(Failure::classify)?;
    if let Some(limit) = config.leakage_limit {
        if !(limit > 0.0) {
            return Err(Failure::Config(format!("leakage_limit must be positive, got {limit}")));
        }
        run.leakage_limit = limit;
    }
    if config.snapshots.iter().any(|&t| !(t >= config.t0 && t <= config.t_final)) {
        return Err(Failure::Config("snapshot times must lie in [t0, t_final]".into()));
    }
    run.snapshot_times = if config.snapshots.is_empty() { vec![config.t_final] } else { config.snapshots.clone() };
    let result = run_propagation(&run).map_err(Failure::classify)?;
    let d = result.diagnostics;
    eprintln!(
        "steps {} tau {:e}: max relative norm drift {:e}, max boundary density {:e}",
        d.steps, d.tau, d.max_norm_drift, d.max_leakage
    );
    for s in &result.snapshots {
        eprintln!("t = {}: norm^2 = {:e}", s.t, discrete_norm_squared(&s.state, result.h));
    }
    let text = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["x", "t", "re", "im"]);
            for s in &result.snapshots {
                for (x, v) in result.x_nodes.iter().zip(&s.state) {
                    csv.numbers(&[*x, s.t, v.re, v.im]);
                }
            }
            csv.finish()
        }
        Format::Json => to_json(&PropagationExport {
            potential: potential.label(),
            x: result.x_nodes.clone(),
            snapshots: result
                .snapshots
                .iter()
                .map(|s| SnapshotExport {
                    t: s.t,
                    norm_squared: discrete_norm_squared(&s.state, result.h),
                    re: s.state.iter().map(|v| v.re).collect(),
                    im: s.state.iter().map(|v| v.im).collect(),
                })
                .collect(),
            diagnostics: d,
        })?,
    };
    emit(output.out.as_deref(), &text)
}
