//! Threshold scanning by bisection, randomized verification suites,
//! detector comparison, the distillability flag, and report emission.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::bounds::{
    self, pure_concurrence, reduction_tau2, spin_flip_trace_sum, tau_n, BoundReport, KAPPA,
};
use crate::criteria::{
    correlation_tensor, kf_criterion, ppt_check, witness_expectation, CriteriaReport,
};
use crate::error::{Error, Result};
use crate::partitions::all_pair_operators;
use crate::states::{
    haar_pure_with_rng, random_mixed, random_separable, seeded_rng, DensityMatrix, Family,
    PureState, StateFamily,
};
use crate::tensor::{self, CMatrix, DimList};

/// tau values above this are reported as detections. The floor only
/// filters eigensolver noise; it is far below any physical signal at the
/// scan resolution, so detection sets are insensitive to it (and to the
/// calibration constant).
pub const TAU_DETECT_TOL: f64 = 1e-12;

/// Tolerance for the randomized property suites phrased as inequalities.
pub const PROPERTY_TOL: f64 = 1e-9;

/// Detector evaluated along a scan.
pub enum Detector {
    /// The concurrence lower bound (tau_3 on three parties).
    Tau3,
    /// The correlation-matrix (Ky Fan) criterion.
    Kf,
    /// Expectation of a supplied witness operator.
    Witness(CMatrix),
}

impl Detector {
    pub fn tag(&self) -> &'static str {
        match self {
            Detector::Tau3 => "tau3",
            Detector::Kf => "kf",
            Detector::Witness(_) => "witness",
        }
    }

    /// Detector value and entanglement verdict for one state.
    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<(f64, bool)> {
        match self {
            Detector::Tau3 => {
                let tau = tau_n(rho)?.tau;
                Ok((tau, tau > TAU_DETECT_TOL))
            }
            Detector::Kf => {
                let kf = kf_criterion(&correlation_tensor(rho)?);
                Ok((kf.kf_norm, kf.entangled))
            }
            Detector::Witness(w) => {
                let r = witness_expectation(rho, w)?;
                Ok((r.value, r.entangled))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub p: f64,
    pub detector_value: f64,
    pub verdict: bool,
}

/// Outcome of a bisection threshold scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub family: Family,
    pub detector: String,
    pub p_star: f64,
    pub bracket_width: f64,
    pub iterations: usize,
    pub evaluations: Vec<ScanPoint>,
    pub kappa: f64,
    pub version: String,
}

fn prescan_table(points: &[ScanPoint]) -> String {
    let mut s = String::from("      p    value      verdict\n");
    for pt in points {
        s.push_str(&format!(
            "  {:>6.3}  {:>12.6e}  {}\n",
            pt.p, pt.detector_value, pt.verdict
        ));
    }
    s
}

/// Locate the detection threshold of a p-parameterized family by
/// bisection on the verdict.
///
/// An 11-point prescan guards the monotonicity assumption: the verdict
/// sequence must be false up to some p and true beyond it, otherwise the
/// scan aborts with the prescan table in the error.
pub fn threshold_scan(family: &StateFamily, detector: &Detector, tol: f64) -> Result<ScanResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "scan tolerance must be positive, got {tol}"
        )));
    }
    let mut evaluations = Vec::new();
    let mut eval = |p: f64| -> Result<bool> {
        let rho = family.at_p(p)?;
        let (value, verdict) = detector.evaluate(&rho)?;
        evaluations.push(ScanPoint {
            p,
            detector_value: value,
            verdict,
        });
        Ok(verdict)
    };

    // coarse prescan
    let mut verdicts = Vec::with_capacity(11);
    for k in 0..=10 {
        verdicts.push(eval(k as f64 / 10.0)?);
    }
    let first_true = verdicts.iter().position(|&v| v);
    match first_true {
        None => {
            return Err(Error::NoSignChange(format!(
                "detector {} never fires on the {} family",
                detector.tag(),
                family.family
            )))
        }
        Some(0) => {
            return Err(Error::NoSignChange(format!(
                "detector {} already fires at p = 0 on the {} family",
                detector.tag(),
                family.family
            )))
        }
        Some(k) => {
            if verdicts[k..].iter().any(|&v| !v) {
                return Err(Error::NonMonotone(prescan_table(&evaluations)));
            }
        }
    }
    let k = first_true.unwrap();
    let mut lo = (k - 1) as f64 / 10.0;
    let mut hi = k as f64 / 10.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(ScanResult {
        family: family.family,
        detector: detector.tag().to_string(),
        p_star: 0.5 * (lo + hi),
        bracket_width: hi - lo,
        iterations,
        evaluations,
        kappa: KAPPA,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// CSV emission: one `p,detector_value,verdict` row per evaluation, then
/// a summary row whose verdict column carries the tag `p_star`.
pub fn write_scan_csv<W: Write>(w: &mut W, scan: &ScanResult) -> Result<()> {
    writeln!(w, "p,detector_value,verdict")?;
    for pt in &scan.evaluations {
        writeln!(w, "{},{},{}", pt.p, pt.detector_value, pt.verdict)?;
    }
    writeln!(w, "{},{},p_star", scan.p_star, scan.bracket_width)?;
    Ok(())
}

/// Parse a scan CSV back into its evaluation points and summary.
pub fn read_scan_csv<R: BufRead>(r: R) -> Result<(Vec<ScanPoint>, f64, f64)> {
    let mut points = Vec::new();
    let mut summary = None;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line != "p,detector_value,verdict" {
                return Err(Error::MalformedFile(format!("bad CSV header '{line}'")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedFile(format!("bad CSV row '{line}'")));
        }
        let a: f64 = fields[0]
            .parse()
            .map_err(|_| Error::MalformedFile(format!("bad float '{}'", fields[0])))?;
        let b: f64 = fields[1]
            .parse()
            .map_err(|_| Error::MalformedFile(format!("bad float '{}'", fields[1])))?;
        match fields[2] {
            "true" | "false" => points.push(ScanPoint {
                p: a,
                detector_value: b,
                verdict: fields[2] == "true",
            }),
            "p_star" => summary = Some((a, b)),
            other => return Err(Error::MalformedFile(format!("bad verdict field '{other}'"))),
        }
    }
    let (p_star, width) =
        summary.ok_or_else(|| Error::MalformedFile("missing summary row".into()))?;
    Ok((points, p_star, width))
}

/// Outcome of one randomized verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyResult {
    pub property: String,
    pub trials: usize,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

fn verify_result(
    property: &str,
    trials: usize,
    seed: u64,
    max_violation: f64,
    tolerance: f64,
    detail: String,
) -> VerifyResult {
    VerifyResult {
        property: property.to_string(),
        trials,
        seed,
        max_violation,
        tolerance,
        pass: max_violation <= tolerance,
        detail,
    }
}

/// Max violation of the monogamy-style inequality: the three two-party
/// reduction bounds summed must not exceed three times the tripartite
/// bound on a pure state.
pub fn max_thm3_violation(trials: usize, seed: u64) -> Result<f64> {
    let dims = DimList::uniform(2, 3)?;
    let mut rng = seeded_rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let psi = haar_pure_with_rng(&dims, &mut rng);
        let rho = psi.to_density();
        let lhs: f64 = reduction_tau2(&rho)?.iter().sum();
        let rhs = 3.0 * tau_n(&rho)?.tau;
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}

/// Max |tau_N - C^2| over Haar-random pure states of the given dims.
pub fn max_pure_identity_violation(dims: &DimList, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = haar_pure_with_rng(dims, &mut rng);
        let tau = tau_n(&psi.to_density())?.tau;
        let c2 = pure_concurrence(&psi)?.c_squared;
        worst = worst.max((tau - c2).abs());
    }
    Ok(worst)
}

/// Max tau_3 over random fully separable three-qubit mixtures.
pub fn max_separable_tau(trials: usize, seed: u64) -> Result<f64> {
    let dims = DimList::uniform(2, 3)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let rho = random_separable(&dims, dims.total(), &mut rng);
        worst = worst.max(tau_n(&rho)?.tau);
    }
    Ok(worst)
}

/// Max tau_3 over sampled mixed states that pass the PPT test on every
/// cut; also returns how many PPT states were found. Sampling mixes over
/// 4D Haar vectors so that a sizable fraction of draws is PPT.
pub fn max_ppt_tau(trials: usize, seed: u64) -> Result<(f64, usize)> {
    let dims = DimList::uniform(2, 3)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    let mut found = 0usize;
    for _ in 0..trials {
        let rho = random_mixed(&dims, 4 * dims.total(), &mut rng);
        if ppt_check(&rho)?.all_positive {
            found += 1;
            worst = worst.max(tau_n(&rho)?.tau);
        }
    }
    if found == 0 {
        return Err(Error::InvalidParameter(format!(
            "no PPT state among {trials} samples; increase the trial count"
        )));
    }
    Ok((worst, found))
}

/// Max deviation in the trace identities behind the monogamy inequality:
/// 2 kappa times the spin-flip trace sum of each two-party reduction must
/// reproduce the corresponding signed purity combination.
pub fn max_ckw_identity_violation(trials: usize, seed: u64) -> Result<f64> {
    let dims = DimList::uniform(2, 3)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = haar_pure_with_rng(&dims, &mut rng);
        let rho = psi.to_density();
        let purity = |parties: &[usize]| -> Result<f64> { Ok(rho.reduce(parties)?.purity()) };
        let p1 = purity(&[0])?;
        let p2 = purity(&[1])?;
        let p3 = purity(&[2])?;
        let cases: [([usize; 2], f64); 3] = [
            ([0, 1], 1.0 - p1 - p2 + p3),
            ([0, 2], 1.0 - p1 + p2 - p3),
            ([1, 2], 1.0 + p1 - p2 - p3),
        ];
        for (keep, expected) in cases {
            let lhs = 2.0 * KAPPA * spin_flip_trace_sum(&rho.reduce(&keep)?)?;
            worst = worst.max((lhs - expected).abs());
        }
    }
    Ok(worst)
}

/// Largest fifth eigenvalue of the spin-flip products over random mixed
/// states and all generator pairs (the rank-four contract).
pub fn max_fifth_eigenvalue(trials: usize, seed: u64) -> Result<f64> {
    let dims = DimList::uniform(2, 3)?;
    let mut rng = seeded_rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let rho = random_mixed(&dims, dims.total(), &mut rng);
        for op in all_pair_operators(&dims)? {
            let op = op?;
            let product = rho.matrix() * bounds::spin_flipped(rho.matrix(), &op);
            // raw spectrum: no clamping, so genuinely small values show
            let eigs = tensor::real_spectrum_with(&product, bounds::RANK_TOL, 0.0)?;
            worst = worst.max(eigs[4]);
        }
    }
    Ok(worst)
}

/// Run one named randomized property suite.
pub fn verify_suite(property: &str, trials: usize, seed: u64) -> Result<VerifyResult> {
    match property {
        "thm3" => {
            let v = max_thm3_violation(trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v.max(0.0),
                PROPERTY_TOL,
                format!("max of (sum of reduction tau_2) - 3 tau_3 = {v:.3e}"),
            ))
        }
        "pure-identity" => {
            let dims = DimList::uniform(2, 3)?;
            let v = max_pure_identity_violation(&dims, trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v,
                PROPERTY_TOL,
                format!("max |tau_3 - C^2| on pure states = {v:.3e}"),
            ))
        }
        "separable-zero" => {
            let v = max_separable_tau(trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v,
                PROPERTY_TOL,
                format!("max tau_3 over separable mixtures = {v:.3e}"),
            ))
        }
        "ppt-zero" => {
            let (v, found) = max_ppt_tau(trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v,
                PROPERTY_TOL,
                format!("max tau_3 over {found} PPT states = {v:.3e}"),
            ))
        }
        "ckw-identity" => {
            let v = max_ckw_identity_violation(trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v,
                PROPERTY_TOL,
                format!("max trace-identity deviation = {v:.3e}"),
            ))
        }
        "rank4" => {
            let v = max_fifth_eigenvalue(trials, seed)?;
            Ok(verify_result(
                property,
                trials,
                seed,
                v,
                bounds::RANK_TOL,
                format!("max fifth eigenvalue of the spin-flip products = {v:.3e}"),
            ))
        }
        other => Err(Error::UnknownProperty(other.to_string())),
    }
}

pub const PROPERTY_TAGS: [&str; 6] = [
    "thm3",
    "pure-identity",
    "separable-zero",
    "ppt-zero",
    "ckw-identity",
    "rank4",
];

/// Run every detector on one state and assemble the comparison report.
pub fn criteria_compare(rho: &DensityMatrix, witness: Option<&CMatrix>) -> Result<CriteriaReport> {
    let tau = tau_n(rho)?.tau;
    let ppt = ppt_check(rho)?;
    let witness = witness.map(|w| witness_expectation(rho, w)).transpose()?;
    let kf = if rho.dims().common_dim() == Some(2) {
        Some(kf_criterion(&correlation_tensor(rho)?))
    } else {
        None
    };
    Ok(CriteriaReport {
        tau,
        tau_entangled: tau > TAU_DETECT_TOL,
        ppt,
        witness,
        kf,
    })
}

/// Render the comparison report as an aligned text table.
pub fn render_criteria_table(report: &CriteriaReport) -> String {
    let mut out = String::new();
    out.push_str("detector      value           verdict\n");
    out.push_str(&format!(
        "tau           {:<15.9e} {}\n",
        report.tau,
        if report.tau_entangled {
            "entangled"
        } else {
            "not detected"
        }
    ));
    out.push_str(&format!(
        "ppt           {:<15.9e} {}\n",
        report
            .ppt
            .subsets
            .iter()
            .map(|s| s.min_eigenvalue)
            .fold(f64::INFINITY, f64::min),
        if report.ppt.all_positive {
            "positive on all cuts"
        } else {
            "NPT (entangled)"
        }
    ));
    if let Some(w) = &report.witness {
        out.push_str(&format!(
            "witness       {:<15.9e} {}\n",
            w.value,
            if w.entangled {
                "entangled"
            } else {
                "not detected"
            }
        ));
    }
    if let Some(kf) = &report.kf {
        out.push_str(&format!(
            "kf (mode {})   {:<15.9e} {}\n",
            kf.mode + 1,
            kf.kf_norm,
            if kf.entangled {
                "entangled"
            } else {
                "not detected"
            }
        ));
    }
    out
}

/// Distillability flag for a tripartite pure state: at least two of the
/// three two-party reduction bounds strictly positive.
#[derive(Debug, Clone, Serialize)]
pub struct DistillReport {
    /// tau_2 of the reductions onto parties (12), (13), (23).
    pub reduction_tau2: [f64; 3],
    pub distillable: bool,
}

pub fn distill_flag(psi: &PureState) -> Result<DistillReport> {
    if psi.dims().n_parties() != 3 {
        return Err(Error::InvalidParameter(format!(
            "the distillability flag needs a tripartite pure state, got {} parties",
            psi.dims().n_parties()
        )));
    }
    let taus = reduction_tau2(&psi.to_density())?;
    let positive = taus.iter().filter(|&&t| t > PROPERTY_TOL).count();
    Ok(DistillReport {
        reduction_tau2: taus,
        distillable: positive >= 2,
    })
}

/// Wrap a bound report with run provenance for JSON emission.
#[derive(Debug, Clone, Serialize)]
pub struct ProvenancedReport<T: Serialize> {
    pub version: String,
    pub kappa: f64,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub report: T,
}

pub fn with_provenance<T: Serialize>(report: T, seed: Option<u64>) -> ProvenancedReport<T> {
    ProvenancedReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        kappa: KAPPA,
        seed,
        report,
    }
}

/// One text line per bound-report summary.
pub fn render_bound_table(report: &BoundReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "tau        {:.12e}   ({}, prefactor {:.6}, kappa {})\n",
        report.tau,
        if report.normalized {
            "normalized"
        } else {
            "unnormalized"
        },
        report.prefactor,
        report.kappa
    ));
    let detected: Vec<&crate::bounds::PairRecord> = report
        .pairs
        .iter()
        .filter(|p| p.concurrence > 0.0)
        .collect();
    out.push_str(&format!(
        "pairs      {} total, {} contributing\n",
        report.pairs.len(),
        detected.len()
    ));
    for p in detected.iter().take(8) {
        out.push_str(&format!(
            "  {:>6} {}x{}  lambdas [{:.6}, {:.6}, {:.6}, {:.6}]  C = {:.9}\n",
            p.bipartition,
            p.left_gen,
            p.right_gen,
            p.lambdas[0],
            p.lambdas[1],
            p.lambdas[2],
            p.lambdas[3],
            p.concurrence
        ));
    }
    if detected.len() > 8 {
        out.push_str(&format!("  ... {} more\n", detected.len() - 8));
    }
    out
}
