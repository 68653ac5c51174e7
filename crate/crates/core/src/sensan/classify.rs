use std::f64::consts::PI;

use super::SensanError;
use crate::linalg::C64;
use crate::matexp::{Couplings, Spectrum};

/// Relative tolerance below which a mode's contributions to both the error
/// and its sensitivity are treated as absent.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-10;

/// Looser relative tolerance for the constant coupling term `g`, which
/// carries roundoff of a near-null readout amplified by `1/|λ_m - λ_n|`.
const COUPLING_PRUNE_FACTOR: f64 = 1e2;

const MAX_DENOMINATOR: u64 = 64;
const RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceKind {
    LinearReal,
    LinearRepeatedReal,
    PeriodicComplex,
    PolynomialJordan,
    Inconclusive,
}

impl DivergenceKind {
    pub fn name(self) -> &'static str {
        match self {
            DivergenceKind::LinearReal => "LinearReal",
            DivergenceKind::LinearRepeatedReal => "LinearRepeatedReal",
            DivergenceKind::PeriodicComplex => "PeriodicComplex",
            DivergenceKind::PolynomialJordan => "PolynomialJordan",
            DivergenceKind::Inconclusive => "Inconclusive",
        }
    }
}

/// Coefficients of the dominant cluster: `a₀ = Σ z_m w_n s̄_mn`,
/// `b₀ = Σ z_m w_m`, and `g₀`, the constant left in `N(t)/(ξ₀e^{λt})` by the
/// couplings to the other modes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Constants {
    pub a0: Option<C64>,
    pub b0: Option<C64>,
    pub g0: Option<C64>,
    /// `s̄₁₁` of a simple dominant mode.
    pub sbar11: Option<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceClassification {
    pub kind: DivergenceKind,
    pub slope: Option<f64>,
    pub sigma: Option<f64>,
    pub omega: Option<f64>,
    pub phi01: Option<f64>,
    pub t0: Option<f64>,
    pub period: Option<f64>,
    pub degree: Option<u32>,
    pub pruned_modes: Vec<usize>,
    pub dominant_modes: Vec<usize>,
    pub constants: Constants,
    /// `z₁w₁·conj(z₂w₂)` for a single dominant conjugate pair.
    pub pair_product: Option<C64>,
    pub diagnostic: Option<String>,
}

impl DivergenceClassification {
    fn empty(kind: DivergenceKind) -> Self {
        DivergenceClassification {
            kind,
            slope: None,
            sigma: None,
            omega: None,
            phi01: None,
            t0: None,
            period: None,
            degree: None,
            pruned_modes: Vec::new(),
            dominant_modes: Vec::new(),
            constants: Constants::default(),
            pair_product: None,
            diagnostic: None,
        }
    }

    fn inconclusive(mut self, why: impl Into<String>) -> Self {
        self.kind = DivergenceKind::Inconclusive;
        self.diagnostic = Some(why.into());
        self
    }
}

struct ClusterStats {
    members: Vec<usize>,
    lambda: C64,
    a0: C64,
    b0: C64,
    g: C64,
    jordan: Option<usize>,
}

fn cluster_stats(spec: &Spectrum, coup: &Couplings) -> Vec<ClusterStats> {
    let (z, w, sb) = (&coup.z, &coup.w, &coup.sbar);
    let lam = &spec.eigenvalues;
    let n = spec.dim();
    spec.clusters
        .iter()
        .enumerate()
        .map(|(ci, members)| {
            let jordan = members
                .iter()
                .find_map(|&i| spec.block_of(i))
                .map(|b| b.size);
            let mut a0 = C64::new(0.0, 0.0);
            let mut b0 = C64::new(0.0, 0.0);
            let mut g = C64::new(0.0, 0.0);
            for &m in members {
                for &k in members {
                    a0 += z[m] * w[k] * sb[(m, k)];
                    if jordan.is_some() && k >= m {
                        b0 += z[m] * w[k];
                    }
                }
                if jordan.is_none() {
                    b0 += z[m] * w[m];
                }
                for k in (0..n).filter(|&k| spec.cluster_of(k) != ci) {
                    g += (z[m] * w[k] * sb[(m, k)] + z[k] * w[m] * sb[(k, m)]) / (lam[m] - lam[k]);
                }
            }
            ClusterStats {
                members: members.clone(),
                lambda: lam[members[0]],
                a0,
                b0,
                g,
                jordan,
            }
        })
        .collect()
}

/// Asymptotic divergence class of `s(ξ₀, t)`.
///
/// A cluster is pruned when its weight in the error (`b₀`) and its secular
/// term in the sensitivity (`a₀`) are below `prune_tol`, and its constant
/// coupling term (`g`) below `100·prune_tol`, each relative to the largest
/// such value over the spectrum.
/// The dominant set is the unpruned clusters sharing the largest real part.
pub fn classify(
    spec: &Spectrum,
    coup: &Couplings,
    xi0: f64,
    prune_tol: f64,
) -> DivergenceClassification {
    let mut out = DivergenceClassification::empty(DivergenceKind::Inconclusive);
    if spec.near_defective && spec.jordan_blocks.is_empty() {
        return out.inconclusive(format!(
            "near-defective spectrum (cond(M) = {:e}) without Jordan structure",
            spec.condition
        ));
    }
    let stats = cluster_stats(spec, coup);
    let scale_d = stats.iter().fold(0.0f64, |acc, c| acc.max(c.b0.norm()));
    let scale_n = stats
        .iter()
        .fold(0.0f64, |acc, c| acc.max(c.a0.norm()).max(c.g.norm()));
    let mut live: Vec<&ClusterStats> = Vec::new();
    for c in &stats {
        let pruned = c.b0.norm() <= prune_tol * scale_d
            && c.a0.norm() <= prune_tol * scale_n
            && c.g.norm() <= COUPLING_PRUNE_FACTOR * prune_tol * scale_n;
        if pruned {
            out.pruned_modes.extend(&c.members);
        } else {
            live.push(c);
        }
    }
    out.pruned_modes.sort_unstable();
    if live.is_empty() {
        return out.inconclusive("all modes pruned");
    }
    let re_tol = 1e-8 * (1.0 + spec.spectral_radius());
    let max_re = live
        .iter()
        .fold(f64::NEG_INFINITY, |acc, c| acc.max(c.lambda.re));
    let dominant: Vec<&ClusterStats> = live
        .into_iter()
        .filter(|c| c.lambda.re >= max_re - re_tol)
        .collect();
    out.dominant_modes = dominant
        .iter()
        .flat_map(|c| c.members.iter().copied())
        .collect();
    out.dominant_modes.sort_unstable();
    out.sigma = Some((-max_re).max(0.0));

    if let Some(c) = dominant.iter().find(|c| c.jordan.is_some()) {
        out.kind = DivergenceKind::PolynomialJordan;
        out.degree = c.jordan.map(|l| l as u32);
        out.constants.a0 = Some(c.a0);
        out.constants.b0 = Some(c.b0);
        return out;
    }

    if dominant.len() == 1 && dominant[0].lambda.im == 0.0 {
        let c = dominant[0];
        out.constants = Constants {
            a0: Some(c.a0),
            b0: Some(c.b0),
            g0: Some(c.g),
            sbar11: (c.members.len() == 1).then(|| coup.sbar[(c.members[0], c.members[0])]),
        };
        if c.b0.norm() <= prune_tol * scale_d {
            return out.inconclusive(
                "dominant mode is absent from the error but present in its sensitivity",
            );
        }
        if c.members.len() == 1 {
            out.kind = DivergenceKind::LinearReal;
            out.slope = Some(xi0 * coup.sbar[(c.members[0], c.members[0])].re);
        } else {
            out.kind = DivergenceKind::LinearRepeatedReal;
            out.slope = Some(xi0 * (c.a0 / c.b0).re);
        }
        return out;
    }

    let is_pair = dominant.len() == 2
        && dominant[0].lambda.im > 0.0
        && (dominant[1].lambda - dominant[0].lambda.conj()).norm() <= re_tol;
    if is_pair {
        let (c1, c2) = (dominant[0], dominant[1]);
        let omega = c1.lambda.im;
        let q = c1.b0 * c2.b0.conj();
        if q.norm() == 0.0 {
            return out.inconclusive("dominant pair carries no weight in the error");
        }
        let phi01 = quadrant_phase(q);
        out.kind = DivergenceKind::PeriodicComplex;
        out.omega = Some(omega);
        out.phi01 = Some(phi01);
        out.t0 = Some((PI + phi01) / (2.0 * omega));
        out.period = Some(PI / omega);
        out.pair_product = Some(q);
        out.constants.b0 = Some(c1.b0);
        out.constants.a0 = Some(c1.a0);
        return out;
    }

    // zero-frequency members or several frequencies
    let mut freqs: Vec<f64> = dominant
        .iter()
        .filter(|c| c.lambda.im > re_tol)
        .map(|c| c.lambda.im)
        .collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup_by(|a, b| (*a - *b).abs() <= re_tol);
    if freqs.is_empty() {
        return out.inconclusive("no oscillatory dominant mode");
    }
    let Some(omega0) = fundamental_frequency(&freqs) else {
        return out.inconclusive(format!(
            "dominant frequencies {freqs:?} are not commensurate within denominator {MAX_DENOMINATOR}"
        ));
    };
    let weights: Vec<(f64, C64)> = dominant.iter().map(|c| (c.lambda.im, c.b0)).collect();
    let (t0, period) = envelope_minima(&weights, omega0);
    out.kind = DivergenceKind::PeriodicComplex;
    out.omega = Some(omega0);
    out.t0 = Some(t0);
    out.period = Some(period);
    out
}

/// `φ₀₁`: `atan(-Im q / Re q)` in the first or fourth quadrant, shifted by π
/// when `Re q < 0`; `±π/2` by the sign of `-Im q` when `Re q = 0`.
fn quadrant_phase(q: C64) -> f64 {
    if q.re == 0.0 {
        return (-q.im).signum() * PI / 2.0;
    }
    let phi = (-q.im / q.re).atan();
    if q.re < 0.0 {
        phi + PI
    } else {
        phi
    }
}

/// Best rational approximation `p/q` of `x > 0` by continued fractions with
/// `q ≤ max_den` and relative error within `rel_tol`.
pub fn rational_approx(x: f64, max_den: u64, rel_tol: f64) -> Option<(u64, u64)> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            break;
        }
        if ((p2 as f64 / q2 as f64) - x).abs() <= rel_tol * x {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fundamental_frequency(freqs: &[f64]) -> Option<f64> {
    let base = freqs[0];
    let fracs: Vec<(u64, u64)> = freqs
        .iter()
        .map(|&w| rational_approx(w / base, MAX_DENOMINATOR, RATIO_TOL))
        .collect::<Option<_>>()?;
    let lcm = fracs
        .iter()
        .fold(1u64, |acc, &(_, q)| acc / gcd(acc, q) * q);
    let g = fracs
        .iter()
        .fold(0u64, |acc, &(p, q)| gcd(acc, p * (lcm / q)));
    Some(base * g as f64 / lcm as f64)
}

/// Earliest global minimum of `|Σ b_k e^{jω_k t}|` over one fundamental
/// period and the spacing of its repeats.
fn envelope_minima(weights: &[(f64, C64)], omega0: f64) -> (f64, f64) {
    let big_t = 2.0 * PI / omega0;
    let h = |t: f64| {
        weights
            .iter()
            .map(|&(w, b)| b * C64::new(0.0, w * t).exp())
            .sum::<C64>()
            .norm()
    };
    let wmax = weights.iter().fold(0.0f64, |acc, &(w, _)| acc.max(w.abs()));
    let samples = (64.0 * (wmax / omega0 + 1.0)).ceil().max(2048.0) as usize;
    let dt = big_t / samples as f64;
    let vals: Vec<f64> = (0..samples).map(|i| h(i as f64 * dt)).collect();
    let mut minima: Vec<(f64, f64)> = Vec::new();
    for i in 0..samples {
        let prev = vals[(i + samples - 1) % samples];
        let next = vals[(i + 1) % samples];
        if vals[i] <= prev && vals[i] <= next {
            let t = golden_min(&h, i as f64 * dt - dt, i as f64 * dt + dt);
            minima.push((t.rem_euclid(big_t), h(t)));
        }
    }
    let scale = weights.iter().map(|(_, b)| b.norm()).sum::<f64>();
    let best = minima.iter().fold(f64::INFINITY, |acc, m| acc.min(m.1));
    let mut times: Vec<f64> = minima
        .iter()
        .filter(|m| m.1 <= best + 1e-8 * scale)
        .map(|m| m.0)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * big_t);
    if times.len() > 1 && (times[0] + big_t - times[times.len() - 1]).abs() <= 1e-6 * big_t {
        times.pop();
    }
    let count = times.len().max(1);
    let period = big_t / count as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - period).abs() <= 1e-6 * big_t);
    let t0 = times.first().copied().unwrap_or(0.0);
    if uniform {
        (t0, period)
    } else {
        (t0, big_t)
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `t₀, t₀ + period, …` with `n_max` entries.
pub fn spike_schedule(
    cls: &DivergenceClassification,
    n_max: usize,
) -> Result<Vec<f64>, SensanError> {
    match (cls.kind, cls.t0, cls.period) {
        (DivergenceKind::PeriodicComplex, Some(t0), Some(p)) => {
            Ok((0..n_max).map(|k| t0 + k as f64 * p).collect())
        }
        _ => Err(SensanError::NotPeriodic(cls.kind)),
    }
}
