use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::frame::Frame;
use super::plane::{downscale_to, gaussian_blur, resample, Plane};
use super::{check_min_size, params};
use crate::error::Result;
use crate::map::SaliencyMap;

/// Spectral-residual saliency on the luminance channel.
///
/// The log-amplitude spectrum minus its 3x3 local mean is recombined with the
/// original phase; the squared magnitude of the inverse transform, smoothed,
/// is the saliency. Works at a 64-pixel longer side.
pub fn spectral_residual(frame: &Frame) -> Result<SaliencyMap> {
    check_min_size(frame)?;
    let lum = downscale_to(frame.luminance(), params::SPECTRAL_WORKING_SIDE);
    let (w, h) = (lum.width, lum.height);
    let mean = lum.mean();

    let mut spectrum: Vec<Complex<f64>> = lum
        .data
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    fft2(&mut planner, &mut spectrum, w, h, false);

    let amplitude: Vec<f64> = spectrum
        .iter()
        .map(|c| {
            let a = c.norm();
            if a > params::SPECTRAL_AMPLITUDE_FLOOR {
                a
            } else {
                0.0
            }
        })
        .collect();
    let log_amp: Vec<f64> = amplitude
        .iter()
        .map(|a| (a + params::SPECTRAL_LOG_OFFSET).ln())
        .collect();
    let local = box3_wrapped(&log_amp, w, h);

    // exp(log A - local) applied to the unit phasor; zero bins stay zero.
    for i in 0..spectrum.len() {
        spectrum[i] = if amplitude[i] > 0.0 {
            spectrum[i] / amplitude[i] * (amplitude[i] / local[i].exp())
        } else {
            Complex::new(0.0, 0.0)
        };
    }
    fft2(&mut planner, &mut spectrum, w, h, true);
    let n = (w * h) as f64;
    let energy = Plane::new(w, h, spectrum.iter().map(|c| (c / n).norm_sqr()).collect());

    let smoothed = gaussian_blur(&energy, params::SPECTRAL_SIGMA);
    Ok(resample(&smoothed, frame.width(), frame.height()).into_map())
}

fn fft2(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex<f64>],
    w: usize,
    h: usize,
    inverse: bool,
) {
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }
}

/// 3x3 mean with periodic boundaries (the spectrum is periodic).
fn box3_wrapped(v: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in [h - 1, 0, 1] {
                for dx in [w - 1, 0, 1] {
                    acc += v[((y + dy) % h) * w + (x + dx) % w];
                }
            }
            out[y * w + x] = acc / 9.0;
        }
    }
    out
}
