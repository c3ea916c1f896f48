//! Trajectory reconstruction from photon-count traces.
//!
//! The estimator is Poisson maximum likelihood over `(y_off, v, t_c)` with the
//! atom held at an antinode (`z = 0`) and the detector flux treated as known.
//! The search is a coarse grid followed by Nelder-Mead refinement of the best
//! grid cells; the best fit on the opposite side of `y = 0` is refined as well
//! so the sign of the offset can be judged by a likelihood ratio.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::detector::{sup_diff, transmission_at_times, DetectorConfig, TransitTrace};
use crate::kinematics::{x_at, Trajectory};
use crate::math;
use crate::mode::LabPoint;
use crate::simplex::{self, SimplexOptions};
use crate::transmission::{Evaluator, SystemConfig};
use crate::{Error, Result};

/// Free parameters of a transit: offset (μm), speed (m/s), crossing time (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub y_off: f64,
    pub v: f64,
    pub t_c: f64,
}

impl FitParams {
    pub fn trajectory(&self) -> Trajectory {
        Trajectory::new(self.y_off, self.v, self.t_c)
    }
}

impl From<&Trajectory> for FitParams {
    fn from(tr: &Trajectory) -> Self {
        FitParams {
            y_off: tr.y_off,
            v: tr.v,
            t_c: tr.t_c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub params: FitParams,
    /// One-sigma errors from the inverse observed Fisher information. NaN if
    /// the Hessian at the optimum is not negative definite.
    pub sigma: FitParams,
    pub log_lik: f64,
    /// Best log-likelihood with `y_off` constrained to the other sign.
    pub mirror_log_lik: f64,
    pub converged: bool,
    pub n_evals: usize,
}

impl FitResult {
    /// `log_lik − mirror_log_lik`.
    pub fn sign_margin(&self) -> f64 {
        self.log_lik - self.mirror_log_lik
    }

    /// Sign of `y_off` when the likelihood ratio decides it, `None` when the
    /// margin is below `tie_margin`.
    pub fn resolved_sign(&self, tie_margin: f64) -> Option<f64> {
        if self.sign_margin() >= tie_margin && self.params.y_off != 0.0 {
            Some(self.params.y_off.signum())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// `|y_off| ≤ y_box_waists · w0`.
    pub y_box_waists: f64,
    /// Grid step in `y`, in units of `w0`.
    pub y_step_waists: f64,
    pub v_range: (f64, f64),
    pub v_step: f64,
    /// Extra `t_c` grid bins on each side of the detected dip.
    pub t_pad_bins: usize,
    /// Number of grid cells refined.
    pub top_k: usize,
    pub simplex: SimplexOptions,
    /// Smoothed normalized counts must drop below this for a transit to exist.
    pub dip_depth: f64,
    /// Bins below this normalized level define the dip support.
    pub dip_support: f64,
    /// Log-likelihood margin below which the sign is reported as unresolved.
    pub tie_margin: f64,
    /// Finite-difference step for the Fisher information, in grid-step units.
    pub fisher_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            y_box_waists: 3.0,
            y_step_waists: 1.0 / 8.0,
            v_range: (0.25, 0.65),
            v_step: 0.025,
            t_pad_bins: 5,
            top_k: 5,
            simplex: SimplexOptions::default(),
            dip_depth: 0.5,
            dip_support: 0.8,
            tie_margin: 1.0,
            fisher_step: 1e-3,
        }
    }
}

/// Poisson log-likelihood of a trace's counts under `p`, including the
/// `ln k!` term. Returns `-∞` when a bin has counts but zero expected rate.
pub fn log_likelihood(
    cfg: &SystemConfig,
    det: &DetectorConfig,
    trace: &TransitTrace,
    p: &FitParams,
) -> Result<f64> {
    cfg.validate()?;
    det.validate()?;
    trace.validate()?;
    if !trace.has_counts() {
        return Err(Error::MissingCounts);
    }
    Ok(Likelihood::new(cfg, det, trace).eval(p))
}

struct Likelihood<'a> {
    eval: Evaluator<'a>,
    det: &'a DetectorConfig,
    t: &'a [f64],
    k: Vec<f64>,
    ln_k_fact: f64,
}

impl<'a> Likelihood<'a> {
    fn new(cfg: &'a SystemConfig, det: &'a DetectorConfig, trace: &'a TransitTrace) -> Self {
        Likelihood {
            eval: cfg.evaluator(),
            det,
            t: &trace.t,
            k: trace.counts.iter().map(|&k| k as f64).collect(),
            ln_k_fact: trace.counts.iter().map(|&k| math::ln_factorial(k)).sum(),
        }
    }

    fn eval(&self, p: &FitParams) -> f64 {
        let tr = p.trajectory();
        let mut acc = -self.ln_k_fact;
        for (&t, &k) in self.t.iter().zip(&self.k) {
            let point = LabPoint::new(x_at(&tr, t), tr.y_off, 0.0);
            let lambda = match self.eval.transmission(point) {
                Ok(tx) => self.det.mean_counts(tx),
                Err(_) => return f64::NEG_INFINITY,
            };
            if lambda > 0.0 {
                acc += k * math::ln(lambda) - lambda;
            } else if k > 0.0 {
                return f64::NEG_INFINITY;
            }
        }
        acc
    }
}

/// Maps between physical parameters and the grid-step-scaled coordinates
/// the simplex works in.
#[derive(Debug, Clone, Copy)]
struct Scaling {
    y: f64,
    v: f64,
    t: f64,
    t_ref: f64,
}

impl Scaling {
    fn to_unit(self, p: &FitParams) -> [f64; 3] {
        [
            p.y_off / self.y,
            p.v / self.v,
            (p.t_c - self.t_ref) / self.t,
        ]
    }

    fn to_params(self, u: &[f64]) -> FitParams {
        FitParams {
            y_off: u[0] * self.y,
            v: u[1] * self.v,
            t_c: self.t_ref + u[2] * self.t,
        }
    }
}

/// Which side of `y = 0` a refinement may explore.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Any,
    NonNegative,
    NonPositive,
}

impl Side {
    fn admits(self, y: f64) -> bool {
        match self {
            Side::Any => true,
            Side::NonNegative => y >= 0.0,
            Side::NonPositive => y <= 0.0,
        }
    }

    fn opposite_of(y: f64) -> Side {
        if y > 0.0 {
            Side::NonPositive
        } else {
            Side::NonNegative
        }
    }
}

struct Refined {
    params: FitParams,
    log_lik: f64,
    converged: bool,
}

struct Fitter<'a> {
    like: Likelihood<'a>,
    scaling: Scaling,
    y_max: f64,
    opts: &'a FitOptions,
    n_evals: usize,
}

impl Fitter<'_> {
    fn refine(&mut self, start: &FitParams, side: Side) -> Refined {
        let scaling = self.scaling;
        let y_max = self.y_max;
        let like = &self.like;
        let objective = |u: &[f64]| {
            let p = scaling.to_params(u);
            if !(p.v > 0.0) || p.y_off.abs() > y_max || !side.admits(p.y_off) {
                return f64::INFINITY;
            }
            -like.eval(&p)
        };
        let x0 = scaling.to_unit(start);
        let res = simplex::minimize(objective, &x0, &[1.0, 1.0, 1.0], self.opts.simplex);
        self.n_evals += res.n_evals;
        Refined {
            params: scaling.to_params(&res.x),
            log_lik: -res.f,
            converged: res.converged,
        }
    }

    /// Inverse observed Fisher information by central differences.
    fn sigma(&mut self, p: &FitParams) -> FitParams {
        let h = self.opts.fisher_step;
        let u0 = self.scaling.to_unit(p);
        let mut f = |du: [f64; 3]| {
            self.n_evals += 1;
            let u = [u0[0] + du[0], u0[1] + du[1], u0[2] + du[2]];
            self.like.eval(&self.scaling.to_params(&u))
        };
        let f0 = f([0.0; 3]);
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = h;
            let fp = f(e);
            e[i] = -h;
            let fm = f(e);
            hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in 0..i {
                let mut d = [0.0; 3];
                let mut corner = |si: f64, sj: f64| {
                    d = [0.0; 3];
                    d[i] = si * h;
                    d[j] = sj * h;
                    f(d)
                };
                let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0)
                    + corner(-1.0, -1.0))
                    / (4.0 * h * h);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        let info = hess.map(|row| row.map(|x| -x));
        let nan = FitParams {
            y_off: f64::NAN,
            v: f64::NAN,
            t_c: f64::NAN,
        };
        let Some(cov) = invert3(&info) else {
            return nan;
        };
        if !(cov[0][0] > 0.0 && cov[1][1] > 0.0 && cov[2][2] > 0.0) {
            return nan;
        }
        FitParams {
            y_off: math::sqrt(cov[0][0]) * self.scaling.y,
            v: math::sqrt(cov[1][1]) * self.scaling.v,
            t_c: math::sqrt(cov[2][2]) * self.scaling.t,
        }
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if !(det.is_finite()) || det == 0.0 {
        return None;
    }
    let inv = 1.0 / det;
    Some([
        [
            c00 * inv,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
        ],
        [
            c01 * inv,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
        ],
        [
            c02 * inv,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
        ],
    ])
}

/// Bin index range `[lo, hi]` where the 3-bin smoothed count level drops
/// below `support`, provided its minimum is below `depth`.
fn dip_support(
    counts: &[u64],
    empty_rate: f64,
    depth: f64,
    support: f64,
) -> Option<(usize, usize)> {
    let n = counts.len();
    let level = |i: usize| {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(n - 1);
        let sum: u64 = counts[lo..=hi].iter().sum();
        sum as f64 / ((hi - lo + 1) as f64 * empty_rate)
    };
    let levels: Vec<f64> = (0..n).map(level).collect();
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min < depth) {
        return None;
    }
    let lo = levels.iter().position(|&l| l < support)?;
    let hi = levels.iter().rposition(|&l| l < support)?;
    Some((lo, hi))
}

/// Maximum-likelihood fit of a counted transit with default options.
pub fn fit_transit(
    cfg: &SystemConfig,
    det: &DetectorConfig,
    trace: &TransitTrace,
) -> Result<FitResult> {
    fit_transit_with(cfg, det, trace, &FitOptions::default())
}

pub fn fit_transit_with(
    cfg: &SystemConfig,
    det: &DetectorConfig,
    trace: &TransitTrace,
    opts: &FitOptions,
) -> Result<FitResult> {
    cfg.validate()?;
    det.validate()?;
    trace.validate()?;
    if !trace.has_counts() {
        return Err(Error::MissingCounts);
    }
    if trace.len() < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: trace.len(),
        });
    }
    let empty_rate = det.mean_counts(1.0);
    if !(empty_rate > 0.0) {
        return Err(Error::NoTransit);
    }
    let (lo, hi) = dip_support(&trace.counts, empty_rate, opts.dip_depth, opts.dip_support)
        .ok_or(Error::NoTransit)?;

    let w0 = cfg.geometry.w0;
    let bw = det.bin_seconds();
    let pad = opts.t_pad_bins as f64 * bw;
    let t_first = trace.t[lo] - pad;
    let n_t = libm::round((trace.t[hi] + pad - t_first) / bw) as usize + 1;
    let y_step = opts.y_step_waists * w0;
    let y_max = opts.y_box_waists * w0;
    let n_y = libm::round(2.0 * y_max / y_step) as usize + 1;
    let n_v = libm::round((opts.v_range.1 - opts.v_range.0) / opts.v_step) as usize + 1;

    let scaling = Scaling {
        y: y_step,
        v: opts.v_step,
        t: bw,
        t_ref: t_first,
    };
    let mut fitter = Fitter {
        like: Likelihood::new(cfg, det, trace),
        scaling,
        y_max,
        opts,
        n_evals: 0,
    };

    let grid_point = |iy: usize, iv: usize, it: usize| FitParams {
        y_off: -y_max + iy as f64 * y_step,
        v: opts.v_range.0 + iv as f64 * opts.v_step,
        t_c: t_first + it as f64 * bw,
    };

    // Top-k cells by log-likelihood; ties keep the lower grid index.
    let mut top: Vec<(f64, FitParams)> = Vec::with_capacity(opts.top_k + 1);
    let mut best_neg: Option<(f64, FitParams)> = None;
    let mut best_pos: Option<(f64, FitParams)> = None;
    for iy in 0..n_y {
        for iv in 0..n_v {
            for it in 0..n_t {
                let p = grid_point(iy, iv, it);
                let ll = fitter.like.eval(&p);
                fitter.n_evals += 1;
                if top.len() < opts.top_k || ll > top[top.len() - 1].0 {
                    let pos = top.iter().position(|(v, _)| ll > *v).unwrap_or(top.len());
                    top.insert(pos, (ll, p));
                    top.truncate(opts.top_k);
                }
                if p.y_off <= 0.0 && best_neg.is_none_or(|(v, _)| ll > v) {
                    best_neg = Some((ll, p));
                }
                if p.y_off >= 0.0 && best_pos.is_none_or(|(v, _)| ll > v) {
                    best_pos = Some((ll, p));
                }
            }
        }
    }

    let mut best: Option<Refined> = None;
    for (_, start) in &top {
        let r = fitter.refine(start, Side::Any);
        if best.as_ref().is_none_or(|b| r.log_lik > b.log_lik) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(Error::NoTransit)?;

    // Mirror hypothesis. If it beats the unconstrained optimum, adopt it and
    // refine the other side once more.
    let mut mirror = None;
    for _ in 0..2 {
        let side = Side::opposite_of(best.params.y_off);
        let start = match side {
            Side::NonNegative => best_pos,
            _ => best_neg,
        };
        let Some((_, start)) = start else { break };
        let m = fitter.refine(&start, side);
        if m.log_lik > best.log_lik {
            mirror = Some(core::mem::replace(&mut best, m));
            continue;
        }
        mirror = Some(m);
        break;
    }
    let mirror_log_lik = mirror.map_or(f64::NEG_INFINITY, |m| m.log_lik.min(best.log_lik));

    let sigma = fitter.sigma(&best.params);
    Ok(FitResult {
        params: best.params,
        sigma,
        log_lik: best.log_lik,
        mirror_log_lik,
        converged: best.converged,
        n_evals: fitter.n_evals,
    })
}

/// Symmetry transforms of a trajectory that may leave the trace unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    /// `y → −y`.
    YMirror,
    /// `z → z + λ/2`, the next antinode.
    ZAntinodeShift,
    /// `z → −z`.
    ZMirror,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [
        Symmetry::YMirror,
        Symmetry::ZAntinodeShift,
        Symmetry::ZMirror,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Symmetry::YMirror => "y-mirror",
            Symmetry::ZAntinodeShift => "z-antinode-shift",
            Symmetry::ZMirror => "z-mirror",
        }
    }

    pub fn apply(self, tr: &Trajectory, lambda_nm: f64) -> Trajectory {
        let mut out = *tr;
        match self {
            Symmetry::YMirror => out.y_off = -tr.y_off,
            Symmetry::ZAntinodeShift => out.z_pos = tr.z_pos + lambda_nm / 2.0,
            Symmetry::ZMirror => out.z_pos = -tr.z_pos,
        }
        out
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Symmetry::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::UnknownTransform(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyReport {
    pub transform: Symmetry,
    pub sup_diff: f64,
    pub degenerate: bool,
}

pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Compares the expected trace of `tr` with that of each transformed
/// trajectory over the detector window.
pub fn degeneracy_scan(
    cfg: &SystemConfig,
    det: &DetectorConfig,
    tr: &Trajectory,
    transforms: &[Symmetry],
    threshold: f64,
) -> Result<Vec<DegeneracyReport>> {
    cfg.validate()?;
    tr.validate(cfg.geometry.lambda)?;
    let times = crate::detector::bin_centers(det, tr.t_c)?;
    let base = transmission_at_times(cfg, tr, &times)?;
    transforms
        .iter()
        .map(|&transform| {
            let other = transform.apply(tr, cfg.geometry.lambda);
            let trace = transmission_at_times(cfg, &other, &times)?;
            let d = sup_diff(&base, &trace);
            Ok(DegeneracyReport {
                transform,
                sup_diff: d,
                degenerate: d < threshold,
            })
        })
        .collect()
}

/// Vertical distance travelled in one bin, μm.
pub fn x_resolution(v: f64, det: &DetectorConfig) -> f64 {
    v * det.bin_width
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{expected_trace, sample_counts};
    use crate::mode::{ModeGeometry, ModeIndex};
    use approx::assert_relative_eq;

    fn geometry(tilt: f64) -> SystemConfig {
        SystemConfig {
            geometry: ModeGeometry {
                tilt_deg: tilt,
                ..ModeGeometry::default()
            },
            ..SystemConfig::default()
        }
    }

    #[test]
    fn symmetry_labels_round_trip() {
        for s in Symmetry::ALL {
            assert_eq!(s.label().parse::<Symmetry>().unwrap(), s);
        }
        assert!(matches!(
            "x-mirror".parse::<Symmetry>(),
            Err(Error::UnknownTransform(_))
        ));
    }

    #[test]
    fn resolution() {
        let det = DetectorConfig::default();
        assert_relative_eq!(x_resolution(0.56, &det), 5.6, epsilon = 1e-12);
        assert_relative_eq!(x_resolution(0.42, &det), 4.2, epsilon = 1e-12);
        let tiny = DetectorConfig {
            bin_width: 1e-9,
            ..det
        };
        assert!(x_resolution(0.42, &tiny) < 1e-8);
    }

    #[test]
    fn invert3_identity_and_product() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = invert3(&m).unwrap();
        for (i, row) in m.iter().enumerate() {
            for j in 0..3 {
                let s: f64 = row.iter().zip(&inv).map(|(a, b)| a * b[j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-12);
            }
        }
        assert!(invert3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }

    #[test]
    fn degeneracy_examples() {
        let det = DetectorConfig::default();
        let tr = Trajectory::new(10.0, 0.42, 0.0);
        let tem00 = SystemConfig {
            mode: ModeIndex::TEM00,
            ..geometry(0.0)
        };
        let r = degeneracy_scan(&tem00, &det, &tr, &[Symmetry::YMirror], 1e-6).unwrap();
        assert!(r[0].degenerate && r[0].sup_diff == 0.0);

        let r = degeneracy_scan(&geometry(0.0), &det, &tr, &[Symmetry::YMirror], 1e-6).unwrap();
        assert!(r[0].degenerate && r[0].sup_diff < 1e-12);

        let r = degeneracy_scan(&geometry(45.0), &det, &tr, &Symmetry::ALL, 1e-6).unwrap();
        assert!(!r[0].degenerate && r[0].sup_diff > 0.05);
        assert!(r[1].degenerate && r[1].sup_diff < 1e-12);
        assert!(r[2].degenerate);
    }

    #[test]
    fn flat_likelihood_without_light() {
        let det = DetectorConfig {
            flux0: 0.0,
            ..DetectorConfig::default()
        };
        let cfg = geometry(45.0);
        let mut trace = expected_trace(&cfg, &Trajectory::new(0.0, 0.4, 0.0), &det).unwrap();
        trace.counts = alloc::vec![0; trace.len()];
        let a = log_likelihood(
            &cfg,
            &det,
            &trace,
            &FitParams {
                y_off: 3.0,
                v: 0.3,
                t_c: 0.0,
            },
        );
        let b = log_likelihood(
            &cfg,
            &det,
            &trace,
            &FitParams {
                y_off: -20.0,
                v: 0.6,
                t_c: 1e-4,
            },
        );
        assert_eq!(a.unwrap(), 0.0);
        assert_eq!(b.unwrap(), 0.0);
        assert_eq!(fit_transit(&cfg, &det, &trace), Err(Error::NoTransit));
    }

    #[test]
    fn zero_rate_with_counts_is_impossible() {
        let det = DetectorConfig {
            flux0: 0.0,
            ..DetectorConfig::default()
        };
        let cfg = geometry(45.0);
        let mut trace = expected_trace(&cfg, &Trajectory::new(0.0, 0.4, 0.0), &det).unwrap();
        trace.counts = alloc::vec![1; trace.len()];
        let ll = log_likelihood(
            &cfg,
            &det,
            &trace,
            &FitParams {
                y_off: 0.0,
                v: 0.4,
                t_c: 0.0,
            },
        );
        assert_eq!(ll.unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn likelihood_depends_only_on_rates() {
        // Untilted TEM10 is even in y: mirrored parameters give the same rates.
        let cfg = geometry(0.0);
        let det = DetectorConfig::default();
        let trace = expected_trace(&cfg, &Trajectory::new(12.0, 0.4, 0.0), &det).unwrap();
        let trace = sample_counts(&trace, &det, 5).unwrap();
        let a = log_likelihood(
            &cfg,
            &det,
            &trace,
            &FitParams {
                y_off: 7.0,
                v: 0.41,
                t_c: 2e-6,
            },
        );
        let b = log_likelihood(
            &cfg,
            &det,
            &trace,
            &FitParams {
                y_off: -7.0,
                v: 0.41,
                t_c: 2e-6,
            },
        );
        assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn missing_counts_and_short_traces() {
        let cfg = geometry(45.0);
        let det = DetectorConfig::default();
        let trace = expected_trace(&cfg, &Trajectory::new(0.0, 0.4, 0.0), &det).unwrap();
        assert_eq!(fit_transit(&cfg, &det, &trace), Err(Error::MissingCounts));
        let short = TransitTrace {
            t: trace.t[..5].to_vec(),
            expected_t: trace.expected_t[..5].to_vec(),
            counts: alloc::vec![50; 5],
        };
        assert!(matches!(
            fit_transit(&cfg, &det, &short),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn no_dip_is_rejected() {
        let cfg = geometry(45.0);
        let det = DetectorConfig::default();
        let trace = expected_trace(&cfg, &Trajectory::new(200.0, 0.4, 0.0), &det).unwrap();
        let trace = sample_counts(&trace, &det, 1).unwrap();
        assert_eq!(fit_transit(&cfg, &det, &trace), Err(Error::NoTransit));
    }
}
