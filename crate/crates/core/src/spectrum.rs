//! Harmonic spectra of recorded responses.
//!
//! Power is one-sided and normalized so that it sums to the energy of the
//! windowed samples, `sum_k P_k = sum_n (w_n x_n)^2`.

use rustfft::FftPlanner;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Taper applied before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    None,
    #[default]
    Hann,
}

impl Window {
    /// Weight of sample `n` out of `len`.
    pub fn weight(&self, n: usize, len: usize) -> f64 {
        match self {
            Window::None => 1.0,
            Window::Hann => {
                let s = (std::f64::consts::PI * n as f64 / (len - 1) as f64).sin();
                s * s
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Window::None => "none",
            Window::Hann => "hann",
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "rect" => Ok(Window::None),
            "hann" => Ok(Window::Hann),
            other => Err(Error::InvalidParameter(format!("unknown window '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Angular frequencies `2 pi k / (M dt)`, `k = 0..=M/2`.
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub window: Window,
    /// Samples of the input before padding.
    pub samples: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    pub fn nyquist(&self) -> f64 {
        *self.frequencies.last().expect("spectra are never empty")
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn harmonic_orders(&self, omega0: f64) -> Vec<f64> {
        self.frequencies.iter().map(|w| w / omega0).collect()
    }

    /// Index of the bin nearest to `omega`.
    pub fn bin_of(&self, omega: f64) -> usize {
        let k = (omega / self.resolution()).round();
        (k.max(0.0) as usize).min(self.len() - 1)
    }
}

/// `sum_n (w_n x_n)^2`, the right-hand side of the Parseval identity.
pub fn windowed_energy(series: &TimeSeries, window: Window) -> f64 {
    let n = series.len();
    series
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let y = window.weight(i, n) * x;
            y * y
        })
        .sum()
}

/// One-sided power spectrum of the windowed series, zero padded to the next power of two.
pub fn power_spectrum(series: &TimeSeries, window: Window) -> Result<Spectrum> {
    let n = series.len();
    if n < 16 {
        return Err(Error::InvalidParameter(format!(
            "power spectrum needs at least 16 samples, got {n}"
        )));
    }
    let m = n.next_power_of_two();
    let mut buffer: Vec<Complex64> = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| Complex64::new(window.weight(i, n) * x, 0.0))
        .collect();
    buffer.resize(m, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(m).process(&mut buffer);

    let half = m / 2;
    let scale = 1.0 / m as f64;
    let power = (0..=half)
        .map(|k| {
            let p = buffer[k].norm_sqr() * scale;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let dw = 2.0 * std::f64::consts::PI / (m as f64 * series.step());
    Ok(Spectrum {
        frequencies: (0..=half).map(|k| k as f64 * dw).collect(),
        power,
        window,
        samples: n,
    })
}

/// Largest power within a quarter harmonic of `order * omega0`.
pub fn harmonic_peak(spectrum: &Spectrum, order: usize, omega0: f64) -> f64 {
    let centre = order as f64 * omega0;
    let lo = spectrum.bin_of((centre - 0.25 * omega0).max(0.0));
    let hi = spectrum.bin_of(centre + 0.25 * omega0);
    spectrum.power[lo..=hi].iter().cloned().fold(0.0, f64::max)
}

/// Highest order whose quarter-harmonic window fits below Nyquist.
pub fn max_order(spectrum: &Spectrum, omega0: f64) -> usize {
    ((spectrum.nyquist() / omega0) - 0.25).floor().max(0.0) as usize
}

fn db(p: f64) -> f64 {
    10.0 * p.max(f64::MIN_POSITIVE).log10()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffOptions {
    /// Allowed drop below the running plateau median.
    pub drop_db: f64,
    /// First odd order considered part of the plateau.
    pub start_order: usize,
    /// Consecutive failing odd orders that end the plateau.
    pub patience: usize,
    /// Peaks further than this below the strongest bin count as numerical zero.
    pub dynamic_range_db: f64,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        Self {
            drop_db: 20.0,
            start_order: 3,
            patience: 3,
            dynamic_range_db: 120.0,
        }
    }
}

impl CutoffOptions {
    pub fn with_drop(drop_db: f64) -> Self {
        Self {
            drop_db,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub order: usize,
    pub frequency: f64,
    /// Median peak of the odd harmonics up to the cutoff, in dB.
    pub plateau_db: f64,
    /// Median peak of the upper half of the resolved harmonics, in dB.
    pub floor_db: f64,
}

/// Highest odd harmonic still within `drop_db` of the plateau median.
///
/// Odd orders are scanned upwards from `start_order`; an order belongs to
/// the plateau when its peak is at least the median of the odd peaks seen so
/// far minus `drop_db`. The scan ends after `patience` consecutive misses.
/// Fails when the plateau does not stand `drop_db` above the high-order floor.
pub fn detect_cutoff(spectrum: &Spectrum, omega0: f64, options: &CutoffOptions) -> Result<Cutoff> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!("omega0 must be positive, got {omega0}")));
    }
    if !(options.drop_db > 0.0 && options.dynamic_range_db > options.drop_db)
        || options.patience == 0
        || options.start_order % 2 == 0
    {
        return Err(Error::InvalidParameter(
            "cutoff options need 0 < drop_db < dynamic_range_db, patience >= 1 and an odd start order"
                .into(),
        ));
    }
    let top = max_order(spectrum, omega0);
    if top < options.start_order + 4 {
        return Err(Error::Detection(format!(
            "only {top} harmonics resolved below Nyquist"
        )));
    }
    let strongest = db(spectrum.power.iter().cloned().fold(0.0, f64::max));
    let zero = strongest - options.dynamic_range_db;
    let peaks: Vec<f64> = (0..=top)
        .map(|q| db(harmonic_peak(spectrum, q, omega0)).max(zero))
        .collect();
    let mut floor: Vec<f64> = peaks[top / 2 + 1..].to_vec();
    let floor_db = median(&mut floor);

    let mut seen = Vec::new();
    let mut last = None;
    let mut misses = 0;
    for q in (options.start_order..=top).step_by(2) {
        seen.push(peaks[q]);
        let reference = median(&mut seen.clone());
        if peaks[q] >= reference - options.drop_db {
            last = Some(q);
            misses = 0;
        } else {
            misses += 1;
            if misses == options.patience {
                break;
            }
        }
    }
    let order = last.ok_or_else(|| Error::Detection("no plateau harmonic found".into()))?;
    let mut plateau: Vec<f64> = (options.start_order..=order)
        .step_by(2)
        .map(|q| peaks[q])
        .collect();
    let plateau_db = median(&mut plateau);
    if plateau_db < floor_db + options.drop_db {
        return Err(Error::Detection(format!(
            "plateau at {plateau_db:.1} dB does not stand {:.0} dB above the floor at {floor_db:.1} dB",
            options.drop_db
        )));
    }
    Ok(Cutoff {
        order,
        frequency: order as f64 * omega0,
        plateau_db,
        floor_db,
    })
}

/// Suppression of one even harmonic against its odd neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenSuppression {
    pub order: usize,
    /// Mean dB of the two neighbouring odd peaks minus the even peak.
    pub suppression_db: f64,
}

/// Even-order suppression for every even order in `[2, up_to]`.
pub fn even_suppression(spectrum: &Spectrum, omega0: f64, up_to: usize) -> Vec<EvenSuppression> {
    let top = up_to.min(max_order(spectrum, omega0).saturating_sub(1));
    (2..=top)
        .step_by(2)
        .map(|q| {
            let odd = 0.5
                * (db(harmonic_peak(spectrum, q - 1, omega0))
                    + db(harmonic_peak(spectrum, q + 1, omega0)));
            EvenSuppression {
                order: q,
                suppression_db: odd - db(harmonic_peak(spectrum, q, omega0)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicRatio {
    pub order: usize,
    /// `10 log10(P_a / P_b)` of the harmonic peaks.
    pub ratio_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralComparison {
    pub cutoff_a: Cutoff,
    pub cutoff_b: Cutoff,
    pub ratios: Vec<HarmonicRatio>,
}

impl SpectralComparison {
    /// Cutoff of `a` minus cutoff of `b`, in harmonic orders.
    pub fn order_difference(&self) -> i64 {
        self.cutoff_a.order as i64 - self.cutoff_b.order as i64
    }

    pub fn max_abs_ratio_db(&self) -> f64 {
        self.ratios.iter().map(|r| r.ratio_db.abs()).fold(0.0, f64::max)
    }
}

/// Cutoffs of both spectra and odd-harmonic peak ratios over the shared plateau.
pub fn compare_spectra(
    a: &Spectrum,
    b: &Spectrum,
    omega0: f64,
    options: &CutoffOptions,
) -> Result<SpectralComparison> {
    let cutoff_a = detect_cutoff(a, omega0, options)?;
    let cutoff_b = detect_cutoff(b, omega0, options)?;
    let shared = cutoff_a.order.min(cutoff_b.order);
    let ratios = (options.start_order..=shared)
        .step_by(2)
        .map(|q| HarmonicRatio {
            order: q,
            ratio_db: db(harmonic_peak(a, q, omega0)) - db(harmonic_peak(b, q, omega0)),
        })
        .collect();
    Ok(SpectralComparison {
        cutoff_a,
        cutoff_b,
        ratios,
    })
}
