//! Grid evaluation: expands a validated config into rows of observables.
//!
//! Rows are produced in row-major axis order (last axis fastest) regardless
//! of the worker count; every row is computed independently, so the dataset
//! is a pure function of the config.

use crate::config::{OutputKind, ScanConfig, LASER_AXIS, ORACLE_G2_REL_TOL};
use nhpb_core::correlations::{
    correlations_full, correlations_tampered, g2_hybrid_second_order, g2_quadratic_resonance,
    g2_two_state, nhpb_threshold_d, plasmonic_components, select_narrow_chain, ModelOperators,
};
use nhpb_core::hamiltonian::{DriveSpec, ModelParams};
use nhpb_core::lindblad::{
    build_liouvillian, default_omega, oracle_correlations, steady_state, TruncationSpec,
};
use nhpb_core::{Error, Result};

pub const STATUS_OK: &str = "ok";
/// Status of rows whose Born-series g² disagrees with the enabled oracle.
pub const STATUS_ORACLE_MISMATCH: &str = "oracle_mismatch";

/// Observable slots of one row. `None` means not requested; requested slots
/// hold NaN when the row failed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowValues {
    pub i_rel: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub g2_two_state: Option<f64>,
    pub g2_tampered: Option<f64>,
    pub gamma_p1: Option<f64>,
    pub gamma_p2: Option<f64>,
    pub n2_p1: Option<f64>,
    pub n2_p2: Option<f64>,
    pub g2_analytic: Option<f64>,
    pub d_threshold: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub axis_values: Vec<f64>,
    pub values: RowValues,
    pub status: String,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.status != STATUS_OK
    }
}

/// A completed scan: config echo plus one row per grid point.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub config: ScanConfig,
    pub rows: Vec<Row>,
    /// Worker count actually used; recorded in the sidecar only.
    pub threads: usize,
}

impl Dataset {
    pub fn axis_names(&self) -> Vec<&str> {
        self.config.axes.iter().map(|a| a.param.as_str()).collect()
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }
}

/// Which observables a scan computes, resolved once per scan.
#[derive(Clone, Copy, Debug, Default)]
struct Wants {
    i: bool,
    g2: bool,
    g3: bool,
    eigs: bool,
    components: bool,
    two_state: bool,
    tampered: bool,
    analytic: bool,
    threshold: bool,
    oracle: bool,
}

impl Wants {
    fn from_config(cfg: &ScanConfig) -> Self {
        let mut w = Wants { oracle: cfg.oracle.enabled, ..Wants::default() };
        for out in &cfg.outputs {
            match out {
                OutputKind::Intensity => w.i = true,
                OutputKind::G2 => w.g2 = true,
                OutputKind::G3 => w.g3 = true,
                OutputKind::Eigs => w.eigs = true,
                OutputKind::Components => w.components = true,
                OutputKind::TwoState => w.two_state = true,
                OutputKind::Tampered => w.tampered = true,
                OutputKind::Analytic => w.analytic = true,
                OutputKind::Threshold => w.threshold = true,
            }
        }
        w
    }

    fn needs_correlations(&self) -> bool {
        self.i || self.g2 || self.g3 || self.oracle
    }

    fn needs_eigensystems(&self) -> bool {
        self.eigs || self.components || self.two_state || self.tampered
    }

    /// Requested slots set to NaN: the shape of a failed row.
    fn nan_values(&self) -> RowValues {
        let nan = |on: bool| if on { Some(f64::NAN) } else { None };
        RowValues {
            i_rel: nan(self.i),
            g2: nan(self.g2),
            g3: nan(self.g3),
            g2_two_state: nan(self.two_state),
            g2_tampered: nan(self.tampered),
            gamma_p1: nan(self.eigs),
            gamma_p2: nan(self.eigs),
            n2_p1: nan(self.components),
            n2_p2: nan(self.components),
            g2_analytic: nan(self.analytic),
            d_threshold: nan(self.threshold),
        }
    }
}

/// Link resolved against the axis list: `set param = ratio · axis_values[axis]`.
struct BoundLink {
    param: String,
    axis: usize,
    ratio: f64,
}

fn evaluate_point(
    base: ModelParams,
    cfg: &ScanConfig,
    wants: &Wants,
    links: &[BoundLink],
    axis_values: &[f64],
) -> Row {
    let mut params = base;
    let mut dw = cfg.drive.omega_l_detuning;
    for (axis, &v) in cfg.axes.iter().zip(axis_values) {
        if axis.param == LASER_AXIS {
            dw = v;
        } else {
            params.set_named_param(&axis.param, v);
        }
    }
    for link in links {
        params.set_named_param(&link.param, link.ratio * axis_values[link.axis]);
    }

    match compute_values(params, cfg, wants, dw) {
        Ok(values) => Row { axis_values: axis_values.to_vec(), values, status: STATUS_OK.into() },
        Err(status) => {
            Row { axis_values: axis_values.to_vec(), values: wants.nan_values(), status }
        }
    }
}

/// All observables of one grid point; the error is the row status code.
fn compute_values(
    params: ModelParams,
    cfg: &ScanConfig,
    wants: &Wants,
    dw: f64,
) -> std::result::Result<RowValues, String> {
    let code = |e: Error| e.status_code().to_string();
    params.validate().map_err(code)?;
    let drive = DriveSpec { omega_l_detuning: dw, ..cfg.drive };
    let ops = ModelOperators::new(params, drive).map_err(code)?;
    let mut vals = RowValues::default();

    let mut g2_born = None;
    if wants.needs_correlations() {
        let (i, g2, g3) = correlations_full(&ops, dw, wants.g3).map_err(code)?;
        g2_born = Some(g2);
        if wants.i {
            vals.i_rel = Some(i);
        }
        if wants.g2 {
            vals.g2 = Some(g2);
        }
        if wants.g3 {
            vals.g3 = g3;
        }
    }

    if wants.needs_eigensystems() {
        let eigs = ops.eigensystems(2).map_err(code)?;
        let chain = select_narrow_chain(&ops, &eigs, 2).map_err(code)?;
        if wants.eigs {
            vals.gamma_p1 = Some(eigs[0].width(chain[0]));
            vals.gamma_p2 = Some(eigs[1].width(chain[1]));
        }
        if wants.components {
            let n2 = plasmonic_components(&ops, &eigs, &chain);
            vals.n2_p1 = Some(n2[0]);
            vals.n2_p2 = Some(n2[1]);
        }
        if wants.two_state {
            vals.g2_two_state = Some(g2_two_state(&ops, &eigs, &chain, dw).map_err(code)?);
        }
        if wants.tampered {
            let (_, g2t, _) =
                correlations_tampered(&ops, &eigs, &chain, dw, false).map_err(code)?;
            vals.g2_tampered = Some(g2t);
        }
    }

    if wants.analytic {
        let reference = match &params {
            ModelParams::Quadratic(p) => Ok(g2_quadratic_resonance(p)),
            ModelParams::Hybrid(p) => g2_hybrid_second_order(p),
        };
        vals.g2_analytic = Some(reference.map_err(code)?);
    }
    if wants.threshold {
        // Config validation restricts this output to the hybrid model.
        if let ModelParams::Hybrid(p) = &params {
            vals.d_threshold = Some(nhpb_threshold_d(p.g_2, p.gamma_1, p.gamma_2));
        }
    }

    if wants.oracle {
        let trunc = TruncationSpec {
            n_max: cfg
                .oracle
                .n_max
                .clone()
                .unwrap_or_else(|| TruncationSpec::default_for(&params).n_max),
            omega: cfg.oracle.omega.unwrap_or_else(|| default_omega(&params)),
        };
        let liou = build_liouvillian(&params, &drive, &trunc).map_err(code)?;
        let rho = steady_state(liou).map_err(code)?;
        let (_, g2_oracle, _) = oracle_correlations(&rho, &drive).map_err(code)?;
        let reference = g2_born.expect("oracle checking computes the Born route");
        let rel = (g2_oracle - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        if rel > ORACLE_G2_REL_TOL {
            return Err(STATUS_ORACLE_MISMATCH.into());
        }
    }

    Ok(vals)
}

fn worker_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var("NHPB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()))
        .unwrap_or(0)
}

/// Runs a scan on an explicit worker count (0 = library default). The
/// `NHPB_THREADS` environment variable applies when `threads` is `None`.
pub fn run_scan_with_threads(cfg: &ScanConfig, threads: Option<usize>) -> Result<Dataset> {
    use rayon::prelude::*;

    let base = cfg.validate()?;
    let wants = Wants::from_config(cfg);
    let links: Vec<BoundLink> = cfg
        .links
        .iter()
        .map(|l| BoundLink {
            param: l.param.clone(),
            axis: cfg.axes.iter().position(|a| a.param == l.follows).expect("validated"),
            ratio: l.ratio,
        })
        .collect();

    let grids: Vec<Vec<f64>> = cfg.axes.iter().map(|a| a.values()).collect();
    let inner = if grids.len() == 2 { grids[1].len() } else { 1 };
    let total = cfg.grid_len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(threads))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let used = pool.current_num_threads();

    let rows: Vec<Row> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|idx| {
                let point: Vec<f64> = match grids.len() {
                    0 => vec![],
                    1 => vec![grids[0][idx]],
                    _ => vec![grids[0][idx / inner], grids[1][idx % inner]],
                };
                evaluate_point(base, cfg, &wants, &links, &point)
            })
            .collect()
    });

    Ok(Dataset { config: cfg.clone(), rows, threads: used })
}

/// Runs a scan with the default worker count (`NHPB_THREADS` or all cores).
pub fn run_scan(cfg: &ScanConfig) -> Result<Dataset> {
    run_scan_with_threads(cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisSpec, OracleSettings};
    use nhpb_core::hamiltonian::ModelKind;
    use serde_json::json;

    fn quad_point(outputs: Vec<OutputKind>) -> ScanConfig {
        ScanConfig {
            model: ModelKind::Quadratic,
            params: json!({"gamma_a": 1.0, "gamma_b": 1e-3, "g": 0.1}),
            drive: DriveSpec::narrow_mode(),
            axes: vec![],
            outputs,
            oracle: OracleSettings::default(),
            links: vec![],
        }
    }

    #[test]
    fn single_point_scan_reproduces_the_resonance_law() {
        // Cooperativity 40: g² must equal 1/41².
        let ds = run_scan(&quad_point(vec![OutputKind::G2, OutputKind::Analytic])).unwrap();
        assert_eq!(ds.rows.len(), 1);
        let row = &ds.rows[0];
        assert_eq!(row.status, STATUS_OK);
        let g2 = row.values.g2.unwrap();
        let reference = 1.0 / (41.0f64 * 41.0);
        assert!((g2 - reference).abs() / reference < 1e-8, "g2 = {g2}");
        assert!((row.values.g2_analytic.unwrap() - reference).abs() / reference < 1e-12);
    }

    #[test]
    fn degenerate_axis_gives_two_nearly_identical_rows() {
        let mut cfg = quad_point(vec![OutputKind::G2]);
        cfg.axes = vec![AxisSpec { param: "g".into(), from: 0.1, to: 0.1 + 1e-12, steps: 2 }];
        let ds = run_scan(&cfg).unwrap();
        assert_eq!(ds.rows.len(), 2);
        let (a, b) = (ds.rows[0].values.g2.unwrap(), ds.rows[1].values.g2.unwrap());
        assert!((a - b).abs() / a < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn rows_come_out_in_row_major_axis_order() {
        let mut cfg = quad_point(vec![OutputKind::G2]);
        cfg.axes = vec![
            AxisSpec { param: "g".into(), from: 0.05, to: 0.1, steps: 2 },
            AxisSpec { param: "gamma_b".into(), from: 1e-3, to: 2e-3, steps: 3 },
        ];
        let ds = run_scan(&cfg).unwrap();
        assert_eq!(ds.rows.len(), 6);
        let points: Vec<(f64, f64)> =
            ds.rows.iter().map(|r| (r.axis_values[0], r.axis_values[1])).collect();
        assert_eq!(points[0], (0.05, 1e-3));
        assert_eq!(points[1], (0.05, 1.5e-3));
        assert_eq!(points[2], (0.05, 2e-3));
        assert_eq!(points[3], (0.1, 1e-3));
        assert!(points.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
    }

    #[test]
    fn laser_axis_overrides_the_drive_detuning() {
        let mut cfg = quad_point(vec![OutputKind::Intensity]);
        cfg.drive.omega_l_detuning = 123.0; // must be ignored on the axis
        cfg.axes = vec![AxisSpec { param: LASER_AXIS.into(), from: -1e-3, to: 1e-3, steps: 3 }];
        let ds = run_scan(&cfg).unwrap();
        // Lorentzian in the laser detuning: center row brightest, symmetric.
        let i: Vec<f64> = ds.rows.iter().map(|r| r.values.i_rel.unwrap()).collect();
        assert!(i[1] > i[0] && i[1] > i[2]);
        assert!((i[0] - i[2]).abs() / i[0] < 1e-9);
    }

    #[test]
    fn linked_parameter_tracks_its_axis() {
        // Tie g = 10·gamma_b: the resonance law then gives
        // g2 = 1/(1 + 400·gamma_b)² at every grid point.
        let mut cfg = quad_point(vec![OutputKind::G2]);
        cfg.axes = vec![AxisSpec { param: "gamma_b".into(), from: 1e-4, to: 1e-2, steps: 3 }];
        cfg.links = vec![crate::config::LinkSpec {
            param: "g".into(),
            follows: "gamma_b".into(),
            ratio: 10.0,
        }];
        let ds = run_scan(&cfg).unwrap();
        for row in &ds.rows {
            let eta = 400.0 * row.axis_values[0];
            let expected = 1.0 / ((1.0 + eta) * (1.0 + eta));
            let g2 = row.values.g2.unwrap();
            assert!((g2 - expected).abs() / expected < 1e-8, "{g2} vs {expected}");
        }
    }

    #[test]
    fn failed_rows_carry_reason_codes_and_nans() {
        // Loss-free emitter and narrow mode leave an exactly dark q = 1
        // eigenstate, so the resolvent is singular at zero laser detuning.
        let mut cfg = quad_point(vec![OutputKind::G2]);
        cfg.model = ModelKind::Hybrid;
        cfg.params = json!({
            "gamma_e": 0.0, "gamma_1": 0.0, "gamma_2": 1.0,
            "g_1": 0.0, "g_2": 1.0 / 15.0, "d": 0.1
        });
        let ds = run_scan(&cfg).unwrap();
        let row = &ds.rows[0];
        assert_eq!(row.status, "singular_resolvent");
        assert!(row.values.g2.unwrap().is_nan());
        assert_eq!(row.values.i_rel, None, "unrequested slots stay empty");
        assert_eq!(ds.failed_rows(), 1);
    }

    #[test]
    fn oracle_cross_check_passes_on_a_sound_point() {
        let mut cfg = quad_point(vec![OutputKind::G2]);
        cfg.oracle = OracleSettings { enabled: true, omega: Some(1e-5), n_max: Some(vec![2, 3]) };
        let ds = run_scan(&cfg).unwrap();
        assert_eq!(ds.rows[0].status, STATUS_OK);
    }

    #[test]
    fn thread_count_does_not_change_values() {
        let mut cfg = quad_point(vec![OutputKind::G2, OutputKind::Eigs]);
        cfg.axes = vec![AxisSpec { param: "g".into(), from: 0.01, to: 0.3, steps: 37 }];
        let a = run_scan_with_threads(&cfg, Some(1)).unwrap();
        let b = run_scan_with_threads(&cfg, Some(8)).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.values, y.values);
            assert_eq!(x.status, y.status);
        }
    }
}
