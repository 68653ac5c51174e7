use super::{SensanError, SensitivityTrace};

pub const MIN_FIT_SAMPLES: usize = 10;

/// Relative prominence a peak must have over the higher of its two flanking
/// minima.
const PROMINENCE: f64 = 1.0;
/// Peaks below this fraction of the largest finite `|s|` are roundoff.
const NOISE_FLOOR: f64 = 1e-8;

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn window_samples(tr: &SensitivityTrace, window: (f64, f64)) -> Vec<(f64, f64)> {
    tr.finite_abs_logsens()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect()
}

/// Least-squares slope of `|s|` against `t` over `window`, skipping masked
/// samples.
pub fn fit_slope(tr: &SensitivityTrace, window: (f64, f64)) -> Result<f64, SensanError> {
    let pts = window_samples(tr, window);
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(SensanError::TooFewSamples {
            found: pts.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Ok(least_squares_slope(&xs, &ys))
}

/// Nearest integer to the log–log slope of `|s|` against `t` over `window`;
/// 0 when the slope is below one half.
pub fn fit_polynomial_degree(
    tr: &SensitivityTrace,
    window: (f64, f64),
) -> Result<u32, SensanError> {
    let pts: Vec<(f64, f64)> = window_samples(tr, window)
        .into_iter()
        .filter(|(t, s)| *t > 0.0 && *s > 0.0)
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(SensanError::TooFewSamples {
            found: pts.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, s)| s.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(if slope < 0.5 { 0 } else { slope.round() as u32 })
}

/// Times of prominent local maxima of `|s|`.
///
/// Masked samples count as infinitely high. A peak (or plateau) is kept when
/// its height exceeds twice the higher of the minima separating it from the
/// nearest higher sample on either side and is not negligible next to the
/// largest finite sample. Peak times are refined by fitting a
/// V to `1/|s|` through the peak and its neighbours.
pub fn detect_spikes(tr: &SensitivityTrace) -> Vec<f64> {
    let n = tr.len();
    if n < 3 {
        return Vec::new();
    }
    let h: Vec<f64> = (0..n)
        .map(|i| {
            if tr.spike_mask[i] {
                f64::INFINITY
            } else {
                let s = tr.logsens[i].abs();
                if s.is_nan() {
                    0.0
                } else {
                    s
                }
            }
        })
        .collect();
    let floor = NOISE_FLOOR
        * h.iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max);
    let mut spikes = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        // extent of a plateau of equal heights
        let mut j = i;
        while j + 1 < n && h[j + 1] == h[i] {
            j += 1;
        }
        let rises = h[i] > h[i - 1];
        let falls = j + 1 < n && h[i] > h[j + 1];
        if rises && falls {
            let height = h[i];
            let mut left_min = f64::INFINITY;
            let mut k = i;
            while k > 0 {
                k -= 1;
                if h[k] >= height {
                    break;
                }
                left_min = left_min.min(h[k]);
            }
            let mut right_min = f64::INFINITY;
            let mut k = j;
            while k + 1 < n {
                k += 1;
                if h[k] >= height {
                    break;
                }
                right_min = right_min.min(h[k]);
            }
            let base = left_min.max(right_min);
            if height > floor && height > (1.0 + PROMINENCE) * base {
                let centre = (i + j) / 2;
                spikes.push(
                    if i == j {
                        refine(tr, &h, i)
                    } else {
                        0.5 * (tr.times[i] + tr.times[j])
                    }
                    .max(tr.times[centre.saturating_sub(1)])
                    .min(tr.times[(centre + 1).min(n - 1)]),
                );
            }
        }
        i = j + 1;
    }
    spikes
}

fn refine(tr: &SensitivityTrace, h: &[f64], i: usize) -> f64 {
    let t = &tr.times;
    let (fm, f0, fp) = (1.0 / h[i - 1], 1.0 / h[i], 1.0 / h[i + 1]);
    if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
        return t[i];
    }
    let (hl, hr) = (t[i] - t[i - 1], t[i + 1] - t[i]);
    let delta = if fm > fp {
        let k = (fm - f0) / hl;
        if k > 0.0 {
            f0 / k
        } else {
            0.0
        }
    } else {
        let k = (fp - f0) / hr;
        if k > 0.0 {
            -f0 / k
        } else {
            0.0
        }
    };
    t[i] + delta.clamp(-hl, hr)
}
