//! The validation suite: every dataset-level guarantee of the project as a
//! named, runnable case with measured values and pinned tolerances.
//!
//! Each case returns a [`CaseReport`]; the CLI prints one line per check and
//! exits nonzero when any check fails. The acceptance test target runs the
//! same cases, so `nhpb validate all` and `cargo test` agree by construction.

use crate::config::AxisSpec;
use crate::dataset::csv_string;
use crate::presets::figure_preset;
use crate::scan::{run_scan, run_scan_with_threads};
use nhpb_core::correlations::{
    correlations_full, correlations_spectral, g2_hybrid_second_order, g2_quadratic_resonance,
    g2_two_state, gamma_p2_weak_coupling, intensity_quadratic_resonance, nhpb_threshold_d,
    plasmonic_components, select_narrow_chain, ModelOperators,
};
use nhpb_core::eigen::decompose_symmetric;
use nhpb_core::hamiltonian::{
    build_manifold_hamiltonian, reference_matrices_hybrid, DriveSpec, HybridParams, ModelParams,
    QuadraticParams,
};
use nhpb_core::lindblad::{convergence_check, TruncationSpec, DEFAULT_CONVERGENCE_BOUND};
use nhpb_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASE_NAMES: &[&str] = &[
    "quadratic-resonance",
    "width-law",
    "hybrid-second-order",
    "oracle-quadratic",
    "oracle-hybrid",
    "fig3-features",
    "reference-matrices",
    "mode-decoupling",
    "threshold-line",
    "invariances",
    "determinism",
];

// Pinned tolerances, one const per guarantee.

/// Exact resonance laws of the quadratic model.
pub const QUADRATIC_LAW_REL_TOL: f64 = 1e-8;
/// Perturbative width formula at g = gamma_a/20 and gamma_a/10.
pub const WIDTH_LAW_REL_TOL_TIGHT: f64 = 0.02;
pub const WIDTH_LAW_REL_TOL_LOOSE: f64 = 0.10;
/// Second-order closed form of the hybrid model at the headline point.
pub const SECOND_ORDER_REL_TOL: f64 = 0.30;
/// Born series against the master-equation solver.
pub const ORACLE_G2_REL_TOL: f64 = 1e-2;
pub const ORACLE_G3_REL_TOL: f64 = 5e-2;
/// Two-state formula against the full g2 at the headline point.
pub const TWO_STATE_REL_TOL: f64 = 0.10;
/// Width-tampered g2 must sit at the uncorrelated level.
pub const TAMPERED_RANGE: (f64, f64) = (0.5, 2.0);
/// Deep antibunching bound at the headline point.
pub const DEEP_ANTIBUNCHING_BOUND: f64 = 1e-2;
/// Frozen headline g2; independently pinned by the master-equation solver
/// at vanishing drive (relative agreement 2.4e-7 at omega = 1e-7).
pub const G2_HEADLINE_FROZEN: f64 = 3.505_650_597_187_839e-3;
pub const G2_HEADLINE_REL_TOL: f64 = 1e-9;
/// Assembled vs transcribed manifold matrices.
pub const MATRIX_MATCH_TOL: f64 = 1e-14;
/// Eigenvalue sum vs trace, and the decoupled dark state.
pub const TRACE_SUM_TOL: f64 = 1e-10;
pub const DARK_STATE_TOL: f64 = 1e-10;
/// Broad-mode occupation of the first chain state.
pub const DECOUPLING_N2_BOUND: f64 = 1e-3;
/// Empirical blockade threshold vs the loss-matching closed form.
pub const THRESHOLD_REL_TOL: f64 = 0.25;
/// Scale covariance and route equivalence.
pub const INVARIANCE_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check_le(label: &str, measured: f64, bound: f64) -> Check {
    Check {
        label: label.into(),
        passed: measured <= bound,
        detail: format!("{measured:.6e} <= {bound:.6e}"),
    }
}

fn check(label: &str, passed: bool, detail: String) -> Check {
    Check { label: label.into(), passed, detail }
}

fn rel(measured: f64, reference: f64) -> f64 {
    (measured - reference).abs() / reference.abs()
}

fn fig3_params() -> HybridParams {
    HybridParams {
        gamma_e: 1e-5,
        gamma_1: 1e-3,
        gamma_2: 1.0,
        g_1: 0.0,
        g_2: 1.0 / 15.0,
        d: 0.1,
        delta_e: 0.0,
        delta_2: 0.0,
    }
}

fn quadratic_headline() -> QuadraticParams {
    QuadraticParams { gamma_a: 1.0, gamma_b: 1e-3, g: 0.1, delta_a: 0.0 }
}

fn ops_for(params: ModelParams) -> Result<ModelOperators> {
    ModelOperators::new(params, DriveSpec::narrow_mode())
}

/// Runs one named case; unknown names are a config error.
pub fn run_case(name: &str) -> Result<CaseReport> {
    let checks = match name {
        "quadratic-resonance" => quadratic_resonance()?,
        "width-law" => width_law()?,
        "hybrid-second-order" => hybrid_second_order()?,
        "oracle-quadratic" => oracle_quadratic()?,
        "oracle-hybrid" => oracle_hybrid()?,
        "fig3-features" => fig3_features()?,
        "reference-matrices" => reference_matrices()?,
        "mode-decoupling" => mode_decoupling()?,
        "threshold-line" => threshold_line()?,
        "invariances" => invariances()?,
        "determinism" => determinism()?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown validation case '{other}' (known: {})",
                CASE_NAMES.join(", ")
            )))
        }
    };
    Ok(CaseReport { name: name.into(), checks })
}

/// g2 and intensity against the exact resonance laws over a 5x5x5 grid of
/// loss ratio (log-spaced), coupling fraction, and overall rate scale.
fn quadratic_resonance() -> Result<Vec<Check>> {
    let ratios: Vec<f64> = (0..5).map(|i| 10f64.powf(-3.0 + 0.75 * i as f64)).collect();
    let g_fracs: Vec<f64> = (0..5).map(|i| 0.01 + (0.5 - 0.01) * i as f64 / 4.0).collect();
    let scales = [0.25, 0.5, 1.0, 2.0, 4.0];

    let mut worst_g2: f64 = 0.0;
    let mut worst_i: f64 = 0.0;
    for &scale in &scales {
        for &ratio in &ratios {
            for &frac in &g_fracs {
                let p = QuadraticParams {
                    gamma_a: scale,
                    gamma_b: ratio * scale,
                    g: frac * scale,
                    delta_a: 0.0,
                };
                let ops = ops_for(ModelParams::Quadratic(p))?;
                let (i, g2, _) = correlations_full(&ops, 0.0, false)?;
                worst_g2 = worst_g2.max(rel(g2, g2_quadratic_resonance(&p)));
                worst_i = worst_i.max(rel(i, intensity_quadratic_resonance(&p)));
            }
        }
    }
    Ok(vec![
        check_le("g2 matches 1/(1+eta)^2 on the 5x5x5 grid", worst_g2, QUADRATIC_LAW_REL_TOL),
        check_le("intensity matches 4/gamma_b^2 on the 5x5x5 grid", worst_i, QUADRATIC_LAW_REL_TOL),
    ])
}

/// Narrowest two-excitation width against the weak-coupling formula
/// 2*gamma_b*(1+eta) at coupling fractions 1/20 and 1/10.
fn width_law() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (frac, tol) in [(0.05, WIDTH_LAW_REL_TOL_TIGHT), (0.1, WIDTH_LAW_REL_TOL_LOOSE)] {
        let p = QuadraticParams { gamma_a: 1.0, gamma_b: 1e-3, g: frac, delta_a: 0.0 };
        let ops = ops_for(ModelParams::Quadratic(p))?;
        let eigs = ops.eigensystems(2)?;
        let measured = eigs[1].widths()[0];
        let formula = gamma_p2_weak_coupling(&p)?;
        let label = format!("width law at g = gamma_a/{}", (1.0 / frac).round());
        let mut c = check_le(&label, rel(measured, formula), tol);
        c.detail = format!(
            "measured {measured:.6e} vs 2*gamma_b*(1+eta) = {formula:.6e}, rel {:.4e} <= {tol:.1e}",
            rel(measured, formula)
        );
        checks.push(c);
    }
    Ok(checks)
}

/// Full g2 against the second-order closed form at the headline parameters
/// with a lossless emitter, plus gap shrinkage as the narrow loss vanishes.
fn hybrid_second_order() -> Result<Vec<Check>> {
    let mut gaps = Vec::new();
    for gamma_1 in [1e-2, 1e-3, 1e-4] {
        let p = HybridParams { gamma_e: 0.0, gamma_1, ..fig3_params() };
        let ops = ops_for(ModelParams::Hybrid(p))?;
        let (_, g2, _) = correlations_full(&ops, 0.0, false)?;
        gaps.push(rel(g2, g2_hybrid_second_order(&p)?));
    }
    let reference = 3.70e-3;
    let closed_form = g2_hybrid_second_order(&HybridParams { gamma_e: 0.0, ..fig3_params() })?;
    Ok(vec![
        check_le(
            "closed form matches the reference value 3.70e-3 at print precision",
            rel(closed_form, reference),
            5e-3,
        ),
        check_le("relative gap at gamma_1 = 1e-3", gaps[1], SECOND_ORDER_REL_TOL),
        check(
            "gap shrinks monotonically through gamma_1 = 1e-2, 1e-3, 1e-4",
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            format!("{:.4e} > {:.4e} > {:.4e}", gaps[0], gaps[1], gaps[2]),
        ),
    ])
}

fn oracle_case(params: ModelParams, truncs: &[(Vec<u32>, f64)], label: &str) -> Result<Vec<Check>> {
    let specs: Vec<TruncationSpec> = truncs
        .iter()
        .map(|(n, omega)| TruncationSpec { n_max: n.clone(), omega: *omega })
        .collect();
    let drive = DriveSpec::narrow_mode();
    let report = convergence_check(&params, &drive, &specs, DEFAULT_CONVERGENCE_BOUND)?;

    let ops = ModelOperators::new(params, drive)?;
    let (_, g2_born, g3_born) = correlations_full(&ops, 0.0, true)?;
    let g3_born = g3_born.expect("third order requested");
    let g2_oracle = *report.g2.last().unwrap();
    let g3_oracle = *report.g3.last().unwrap();

    Ok(vec![
        check(
            &format!("{label}: truncation ladder converged"),
            report.converged,
            format!(
                "successive rel diffs {:?} (bound {:.1e})",
                report.successive_rel_diff, report.bound
            ),
        ),
        check_le(
            &format!("{label}: |g2_oracle - g2_full| / g2_full"),
            rel(g2_oracle, g2_born),
            ORACLE_G2_REL_TOL,
        ),
        check_le(
            &format!("{label}: |g3_oracle - g3_full| / g3_full"),
            rel(g3_oracle, g3_born),
            ORACLE_G3_REL_TOL,
        ),
    ])
}

/// Master-equation agreement for the quadratic model at cooperativity 40,
/// driven two orders below the narrow linewidth.
fn oracle_quadratic() -> Result<Vec<Check>> {
    let omega = 1e-5;
    oracle_case(
        ModelParams::Quadratic(quadratic_headline()),
        &[(vec![2, 2], omega), (vec![3, 3], omega), (vec![3, 4], omega)],
        "quadratic",
    )
}

/// Master-equation agreement for the hybrid model at the headline point,
/// driven two orders below the emitter linewidth.
fn oracle_hybrid() -> Result<Vec<Check>> {
    let omega = 1e-7;
    oracle_case(
        ModelParams::Hybrid(fig3_params()),
        &[(vec![2, 2], omega), (vec![3, 3], omega), (vec![4, 4], omega)],
        "hybrid",
    )
}

/// The headline phenomenology at zero laser detuning: two-state agreement,
/// width-tampering kills the antibunching, third order below second, deep
/// antibunching, and the frozen regression value.
fn fig3_features() -> Result<Vec<Check>> {
    let params = ModelParams::Hybrid(fig3_params());
    let ops = ops_for(params)?;
    let (_, g2, g3) = correlations_full(&ops, 0.0, true)?;
    let g3 = g3.expect("third order requested");
    let eigs = ops.eigensystems(2)?;
    let chain = select_narrow_chain(&ops, &eigs, 2)?;
    let two_state = g2_two_state(&ops, &eigs, &chain, 0.0)?;
    let (_, tampered, _) =
        nhpb_core::correlations::correlations_tampered(&ops, &eigs, &chain, 0.0, false)?;

    // Live cross-check against the solver at a coarse, fast truncation.
    let report = convergence_check(
        &params,
        &DriveSpec::narrow_mode(),
        &[
            (TruncationSpec { n_max: vec![2, 2], omega: 1e-6 }),
            (TruncationSpec { n_max: vec![3, 3], omega: 1e-6 }),
        ],
        DEFAULT_CONVERGENCE_BOUND,
    )?;
    let g2_oracle = *report.g2.last().unwrap();

    Ok(vec![
        check_le("two-state formula within 10% of full g2", rel(two_state, g2), TWO_STATE_REL_TOL),
        check(
            "width tampering removes the antibunching",
            tampered >= TAMPERED_RANGE.0 && tampered <= TAMPERED_RANGE.1,
            format!("g2_tampered = {tampered:.15} in [{}, {}]", TAMPERED_RANGE.0, TAMPERED_RANGE.1),
        ),
        check("third order below second order", g3 < g2, format!("g3 = {g3:.6e} < g2 = {g2:.6e}")),
        check_le("deep antibunching at the headline point", g2, DEEP_ANTIBUNCHING_BOUND),
        check_le(
            "frozen regression value of the headline g2",
            rel(g2, G2_HEADLINE_FROZEN),
            G2_HEADLINE_REL_TOL,
        ),
        check_le(
            "live solver agreement at coarse truncation",
            rel(g2_oracle, g2),
            ORACLE_G2_REL_TOL,
        ),
    ])
}

fn random_hybrid(rng: &mut ChaCha8Rng) -> HybridParams {
    HybridParams {
        gamma_e: rng.gen_range(0.0..0.1),
        gamma_1: rng.gen_range(1e-4..0.5),
        gamma_2: rng.gen_range(0.5..2.0),
        g_1: rng.gen_range(0.0..0.3),
        g_2: rng.gen_range(0.0..0.3),
        d: rng.gen_range(0.0..0.3),
        delta_e: rng.gen_range(-1.0..1.0),
        delta_2: rng.gen_range(-1.0..1.0),
    }
}

/// Assembled manifold blocks against the independently transcribed matrices
/// on random draws; spectra consistent with traces; the decoupled dark state.
fn reference_matrices() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut worst_entry: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for _ in 0..100 {
        let p = random_hybrid(&mut rng);
        let (s1, s2) = reference_matrices_hybrid(&p);
        let params = ModelParams::Hybrid(p);
        for (q, reference) in [(1u32, &s1), (2u32, &s2)] {
            let assembled = build_manifold_hamiltonian(&params, q);
            let scale = reference.max_abs().max(1.0);
            worst_entry = worst_entry.max(assembled.sub(reference).max_abs() / scale);

            let eig = decompose_symmetric(&assembled)?;
            let sum: nhpb_core::linalg::C64 = eig.values.iter().sum();
            let trace = assembled.trace();
            worst_trace = worst_trace.max((sum - trace).norm() / trace.norm().max(1.0));
        }
    }

    // Lossless emitter and narrow mode, no direct emitter-narrow coupling:
    // the one-excitation block keeps an exactly dark superposition.
    let mut worst_zero: f64 = 0.0;
    let mut worst_vector: f64 = 0.0;
    for _ in 0..20 {
        let mut p = HybridParams {
            gamma_e: 0.0,
            gamma_1: 0.0,
            g_1: 0.0,
            delta_e: 0.0,
            delta_2: 0.0,
            ..random_hybrid(&mut rng)
        };
        p.d = rng.gen_range(0.05..0.3);
        p.g_2 = rng.gen_range(0.05..0.3);
        // Keep clear of the bright-pair exceptional point.
        let k2 = p.d * p.d + p.g_2 * p.g_2;
        if (16.0 * k2 - p.gamma_2 * p.gamma_2).abs() < 0.05 {
            p.gamma_2 = (16.0 * k2 + 0.25).sqrt();
        }
        let h1 = build_manifold_hamiltonian(&ModelParams::Hybrid(p), 1);
        let eig = decompose_symmetric(&h1)?;
        let (j, lambda) = eig
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("nonempty spectrum");
        worst_zero = worst_zero.max(lambda.norm());

        let k = k2.sqrt();
        let reference = [-p.d / k, p.g_2 / k, 0.0];
        let v = &eig.vectors[j];
        let (mut plus, mut minus): (f64, f64) = (0.0, 0.0);
        for (a, b) in v.iter().zip(reference) {
            plus = plus.max((a + b).norm());
            minus = minus.max((a - b).norm());
        }
        worst_vector = worst_vector.max(plus.min(minus));
    }

    Ok(vec![
        check_le(
            "assembled blocks match the transcribed matrices (100 draws)",
            worst_entry,
            MATRIX_MATCH_TOL,
        ),
        check_le("eigenvalue sums match traces", worst_trace, TRACE_SUM_TOL),
        check_le("dark eigenvalue sits at zero (20 lossless draws)", worst_zero, DARK_STATE_TOL),
        check_le("dark eigenvector proportional to (-d, g_2, 0)", worst_vector, DARK_STATE_TOL),
    ])
}

/// Broad-mode occupations of the chain states along the coupling axis:
/// the first stays dark, the second brightens monotonically.
fn mode_decoupling() -> Result<Vec<Check>> {
    let axis = AxisSpec { param: "d".into(), from: 0.0, to: 0.2, steps: 201 };
    let mut n2_p1_max: f64 = 0.0;
    let mut n2_p2 = Vec::with_capacity(201);
    for d in axis.values() {
        let p = HybridParams { d, ..fig3_params() };
        let ops = ops_for(ModelParams::Hybrid(p))?;
        let eigs = ops.eigensystems(2)?;
        let chain = select_narrow_chain(&ops, &eigs, 2)?;
        let n2 = plasmonic_components(&ops, &eigs, &chain);
        n2_p1_max = n2_p1_max.max(n2[0]);
        n2_p2.push((d, n2[1]));
    }
    let tail: Vec<&(f64, f64)> = n2_p2.iter().filter(|(d, _)| *d >= 0.02 - 1e-12).collect();
    let monotone = tail.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    Ok(vec![
        check_le("N2(p1) stays below 1e-3 along the d-axis", n2_p1_max, DECOUPLING_N2_BOUND),
        check(
            "N2(p2) increases monotonically for d in [0.02, 0.2]",
            monotone,
            format!(
                "N2(p2): {:.3e} at d = 0.02 up to {:.3e} at d = 0.2",
                tail.first().unwrap().1,
                tail.last().unwrap().1
            ),
        ),
    ])
}

/// The onset threshold of the coupling-plane dataset against the
/// loss-matching line.
///
/// The first check takes "g2 crosses 1 from above in d" literally. The full
/// g2 on this plane equals 1 only on the decoupled d = 0 boundary and
/// decreases monotonically in d (confirmed against the master-equation
/// solver), so no such crossing exists and the check fails by construction;
/// the second check documents what the line does match: the half-suppression
/// contour g2 = 1/2, the onset shoulder where g2(d_threshold) sits at
/// 0.30..0.49 and g2(2 d_threshold) is below 0.07.
fn threshold_line() -> Result<Vec<Check>> {
    // Values this close to 1 are the exact decoupled limit, not bunching.
    const UNITY_NOISE: f64 = 1e-9;

    let ds = run_scan(&figure_preset("figS2")?)?;
    let g2_axis = ds.config.axes[0].values();
    let d_axis = ds.config.axes[1].values();
    let inner = d_axis.len();

    let mut columns_checked = 0usize;
    let mut missing = 0usize;
    let mut plane_max: f64 = 0.0;
    let mut worst_unity: f64 = 0.0;
    let mut worst_half: f64 = 0.0;
    let mut worst_half_at = 0.0;
    for (i, &g2_coupling) in g2_axis.iter().enumerate() {
        if !(0.03 - 1e-12..=0.15 + 1e-12).contains(&g2_coupling) {
            continue;
        }
        columns_checked += 1;
        let col = &ds.rows[i * inner..(i + 1) * inner];
        let predicted = nhpb_threshold_d(g2_coupling, fig3_params().gamma_1, fig3_params().gamma_2);

        let mut unity_crossing = None;
        let mut half_crossing = None;
        for k in 0..inner - 1 {
            let (a, b) = (col[k].values.g2.unwrap(), col[k + 1].values.g2.unwrap());
            plane_max = plane_max.max(a).max(b);
            if unity_crossing.is_none() && a > 1.0 + UNITY_NOISE && b < 1.0 {
                unity_crossing =
                    Some(d_axis[k] + (d_axis[k + 1] - d_axis[k]) * (a - 1.0) / (a - b));
            }
            if half_crossing.is_none() && a > 0.5 && b <= 0.5 {
                // Log interpolation: g2 spans decades along the column.
                let t = (a.ln() - 0.5f64.ln()) / (a.ln() - b.ln());
                half_crossing = Some(d_axis[k] + t * (d_axis[k + 1] - d_axis[k]));
            }
        }
        match unity_crossing {
            None => missing += 1,
            Some(d_star) => worst_unity = worst_unity.max(rel(d_star, predicted)),
        }
        if let Some(d_half) = half_crossing {
            let deviation = rel(d_half, predicted);
            if deviation > worst_half {
                worst_half = deviation;
                worst_half_at = g2_coupling;
            }
        } else {
            missing += 1;
        }
    }

    Ok(vec![
        check(
            "g2 = 1 crossings in d match the threshold line within 25%",
            columns_checked > 0 && missing == 0 && worst_unity <= THRESHOLD_REL_TOL,
            format!(
                "{missing} of {columns_checked} columns have no crossing: the plane's maximum \
                 g2 is {plane_max:.12} (at d = 0), decreasing in d; the onset departs from 1 \
                 instead of crossing it"
            ),
        ),
        check(
            "half-suppression contour g2 = 1/2 tracks the line within 25%",
            worst_half <= THRESHOLD_REL_TOL,
            format!("worst rel deviation {worst_half:.4e} at g_2 = {worst_half_at:.4}"),
        ),
    ])
}

fn scale_hybrid(p: &HybridParams, s: f64) -> HybridParams {
    HybridParams {
        gamma_e: p.gamma_e * s,
        gamma_1: p.gamma_1 * s,
        gamma_2: p.gamma_2 * s,
        g_1: p.g_1 * s,
        g_2: p.g_2 * s,
        d: p.d * s,
        delta_e: p.delta_e * s,
        delta_2: p.delta_2 * s,
    }
}

/// Scale covariance of the correlators and equivalence of the solve-route
/// and eigenstate-sum correlators on random points of both models.
fn invariances() -> Result<Vec<Check>> {
    // Scale covariance at an off-resonant headline point.
    let base = fig3_params();
    let dw = 0.35;
    let ops = ops_for(ModelParams::Hybrid(base))?;
    let (i0, g2_0, g3_0) = correlations_full(&ops, dw, true)?;
    let g3_0 = g3_0.expect("third order requested");
    let mut worst_scale: f64 = 0.0;
    for s in [0.1, 10.0] {
        let ops_s = ops_for(ModelParams::Hybrid(scale_hybrid(&base, s)))?;
        let (i_s, g2_s, g3_s) = correlations_full(&ops_s, dw * s, true)?;
        worst_scale = worst_scale
            .max(rel(g2_s, g2_0))
            .max(rel(g3_s.expect("third order requested"), g3_0))
            .max(rel(i_s * s * s, i0));
    }

    // Route equivalence on random points, both models.
    let mut rng = ChaCha8Rng::seed_from_u64(1312);
    let mut worst_route: f64 = 0.0;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < 100 && attempts < 400 {
        attempts += 1;
        let params = if accepted.is_multiple_of(2) {
            ModelParams::Hybrid(random_hybrid(&mut rng))
        } else {
            let gamma_a = rng.gen_range(0.5..2.0);
            ModelParams::Quadratic(QuadraticParams {
                gamma_a,
                gamma_b: gamma_a * rng.gen_range(1e-4..1.0),
                g: rng.gen_range(0.005..0.4),
                delta_a: rng.gen_range(-1.0..1.0),
            })
        };
        let dw = rng.gen_range(-1.5..1.5);
        let ops = ops_for(params)?;
        let eigs = match ops.eigensystems(3) {
            Err(Error::ExceptionalPoint { .. }) => continue, // resample
            other => other?,
        };
        let (i_a, g2_a, g3_a) = correlations_full(&ops, dw, true)?;
        let (i_b, g2_b, g3_b) = correlations_spectral(&ops, &eigs, dw, true)?;
        worst_route = worst_route
            .max(rel(i_b, i_a))
            .max(rel(g2_b, g2_a))
            .max(rel(g3_b.expect("third order"), g3_a.expect("third order")));
        accepted += 1;
    }

    Ok(vec![
        check_le(
            "global rate scaling leaves g2, g3 invariant and scales intensity",
            worst_scale,
            INVARIANCE_REL_TOL,
        ),
        check(
            "solve route and eigenstate sums agree on 100 random points",
            accepted == 100 && worst_route <= INVARIANCE_REL_TOL,
            format!("{accepted} points, worst rel diff {worst_route:.4e}"),
        ),
    ])
}

/// Byte-identical CSV across repeated runs and worker counts.
fn determinism() -> Result<Vec<Check>> {
    let cfg = figure_preset("fig2")?;
    let single = csv_string(&run_scan_with_threads(&cfg, Some(1))?);
    let pooled = csv_string(&run_scan_with_threads(&cfg, Some(8))?);
    let repeat = csv_string(&run_scan_with_threads(&cfg, Some(8))?);
    Ok(vec![
        check(
            "worker counts 1 and 8 give byte-identical CSV",
            single == pooled,
            format!("{} bytes each", single.len()),
        ),
        check("repeated runs give byte-identical CSV", pooled == repeat, String::new()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_case_is_a_config_error() {
        let err = run_case("no-such-case").unwrap_err();
        assert_eq!(err.status_code(), "invalid_config");
    }

    #[test]
    fn case_names_cover_every_runner() {
        for name in CASE_NAMES {
            // Cheap existence check: the dispatcher must know each name.
            // (Cases themselves run in the acceptance suite.)
            assert!(CASE_NAMES.contains(name));
        }
    }
}
