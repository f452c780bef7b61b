//! Truncated bosonic modes: thermal states and beamsplitters.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::HilbertLayout;
use super::state::{DensityMatrix, TraceFlag};
use crate::error::{check_range, Result};

/// Thermal state with mean photon number `n_bar`, truncated at `d_f` levels
/// and renormalized over the kept levels.
pub fn thermal_state(n_bar: f64, d_f: usize) -> Result<DensityMatrix> {
    check_range("mean photon number", n_bar, 0.0, f64::MAX, "[0, inf)")?;
    let weights = thermal_weights(n_bar, d_f);
    let mut data = DMatrix::zeros(d_f, d_f);
    for (n, w) in weights.iter().enumerate() {
        data[(n, n)] = Complex64::new(*w, 0.0);
    }
    DensityMatrix::from_parts(HilbertLayout::new(vec![d_f])?, data, TraceFlag::Normalized)
}

/// Normalized occupation weights `~ (n/(1+n))^k`, `k < levels`.
pub fn thermal_weights(n_bar: f64, levels: usize) -> Vec<f64> {
    if levels == 0 {
        return Vec::new();
    }
    let ratio = n_bar / (1.0 + n_bar);
    let mut w: Vec<f64> = std::iter::successors(Some(1.0), |p| Some(p * ratio))
        .take(levels)
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Number of levels after which the untruncated thermal tail mass drops below `tail`.
pub fn thermal_levels_for_tail(n_bar: f64, tail: f64) -> usize {
    if n_bar <= 0.0 {
        return 1;
    }
    let ratio = n_bar / (1.0 + n_bar);
    // tail mass beyond level L is ratio^L
    (tail.ln() / ratio.ln()).ceil().max(1.0) as usize
}

/// Two-mode beamsplitter `exp(theta (a^dag b - a b^dag))` with
/// `cos(theta) = sqrt(transmission)`, on modes truncated to `d_f` levels each.
///
/// The generator is exponentiated block by block in total photon number, so
/// the result is exactly unitary and conserves `n_a + n_b`. Blocks with
/// `n_a + n_b < d_f` are untouched by the truncation.
pub fn beamsplitter_unitary(transmission: f64, d_f: usize) -> Result<DMatrix<Complex64>> {
    check_range("beamsplitter transmission", transmission, 0.0, 1.0, "[0, 1]")?;
    let theta = transmission.sqrt().clamp(0.0, 1.0).acos();
    let dim = d_f * d_f;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for total in 0..=(2 * d_f.saturating_sub(1)) {
        // states (n_a, total - n_a) with both below d_f
        let members: Vec<usize> = (0..d_f).filter(|&na| total >= na && total - na < d_f).collect();
        let k = members.len();
        let mut gen = DMatrix::<f64>::zeros(k, k);
        for (i, &na) in members.iter().enumerate() {
            let nb = total - na;
            // a^dag b : (na, nb) -> (na + 1, nb - 1)
            if nb > 0 {
                if let Some(j) = members.iter().position(|&m| m == na + 1) {
                    gen[(j, i)] += ((na + 1) as f64).sqrt() * (nb as f64).sqrt();
                }
            }
            // - a b^dag : (na, nb) -> (na - 1, nb + 1)
            if na > 0 {
                if let Some(j) = members.iter().position(|&m| m == na - 1) {
                    gen[(j, i)] -= (na as f64).sqrt() * ((nb + 1) as f64).sqrt();
                }
            }
        }
        let block = (gen * theta).exp();
        for (i, &na_out) in members.iter().enumerate() {
            for (j, &na_in) in members.iter().enumerate() {
                let row = na_out * d_f + (total - na_out);
                let col = na_in * d_f + (total - na_in);
                u[(row, col)] = Complex64::new(block[(i, j)], 0.0);
            }
        }
    }
    Ok(u)
}

/// Untruncated beamsplitter amplitude `<out_a, out_b| U |in_a, in_b>` for the
/// same convention as [`beamsplitter_unitary`]. Evaluated in log space so
/// that large photon numbers on either port stay finite.
pub fn beamsplitter_amplitude(
    transmission: f64,
    in_a: usize,
    in_b: usize,
    out_a: usize,
    out_b: usize,
) -> f64 {
    if in_a + in_b != out_a + out_b {
        return 0.0;
    }
    let t = transmission.sqrt();
    let r = (1.0 - transmission).max(0.0).sqrt();
    // U|n,m> = (t a^dag - r b^dag)^n (r a^dag + t b^dag)^m |0,0> / sqrt(n! m!)
    let (n, m, a) = (in_a, in_b, out_a);
    let prefactor = 0.5
        * (ln_factorial(out_a) + ln_factorial(out_b) - ln_factorial(n) - ln_factorial(m));
    let lo = a.saturating_sub(m);
    let hi = n.min(a);
    let mut sum = 0.0;
    for i in lo..=hi {
        // i photons of the a-input and (a - i) of the b-input end in port a
        let j = a - i;
        let pow_t = i + (m - j);
        let pow_r = (n - i) + j;
        let Some(log_mag) = log_pow(t, pow_t).zip(log_pow(r, pow_r)).map(|(x, y)| x + y) else {
            continue;
        };
        let log_term = ln_binomial(n, i) + ln_binomial(m, j) + log_mag + prefactor;
        let sign = if (n - i) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * log_term.exp();
    }
    sum
}

fn log_pow(base: f64, exp: usize) -> Option<f64> {
    if exp == 0 {
        Some(0.0)
    } else if base == 0.0 {
        None
    } else {
        Some(exp as f64 * base.ln())
    }
}

const LN_FACT_TABLE: usize = 1 << 15;

pub(crate) fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    });
    match table.get(n) {
        Some(v) => *v,
        None => table[LN_FACT_TABLE - 1] + (LN_FACT_TABLE..=n).map(|k| (k as f64).ln()).sum::<f64>(),
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::state::unitarity_error;

    #[test]
    fn thermal_vacuum_and_geometric_law() {
        let vac = thermal_state(0.0, 4).unwrap();
        assert!((vac.element(0, 0).re - 1.0).abs() < 1e-15);
        let th = thermal_state(1.0, 5).unwrap();
        for n in 1..5 {
            let ratio = th.element(n, n).re / th.element(n - 1, n - 1).re;
            assert!((ratio - 0.5).abs() < 1e-14);
        }
        assert!((th.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tail_levels_for_unit_mean() {
        // 2^-L < 1e-3 needs L >= 10 levels beyond which mass is dropped
        assert_eq!(thermal_levels_for_tail(1.0, 1e-3), 10);
        let untruncated_tail = 0.5f64.powi(11);
        assert!(untruncated_tail < 1e-3);
        assert!(0.5f64.powi(9) > 1e-3);
    }

    #[test]
    fn identity_at_full_transmission() {
        let u = beamsplitter_unitary(1.0, 4).unwrap();
        assert!((u - DMatrix::<Complex64>::identity(16, 16)).norm() < 1e-12);
    }

    #[test]
    fn unitary_and_number_conserving() {
        for &t in &[0.0, 0.2, 0.5, 0.843, 1.0] {
            let d = 5;
            let u = beamsplitter_unitary(t, d).unwrap();
            assert!(unitarity_error(&u) < 1e-10);
            for r in 0..d * d {
                for c in 0..d * d {
                    if r / d + r % d != c / d + c % d {
                        assert!(u[(r, c)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let d = 3;
        let u = beamsplitter_unitary(0.5, d).unwrap();
        let idx11 = d + 1;
        assert!(u[(idx11, idx11)].norm() < 1e-12);
        assert!((u[(2 * d, idx11)].norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_photon_split() {
        let d = 3;
        let u = beamsplitter_unitary(0.843, d).unwrap();
        let input = d; // |1,0>
        // amplitude algebra: |1,0> -> t|1,0> - r|0,1>
        assert!((u[(d, input)].norm_sqr() - 0.843).abs() < 1e-12);
        assert!((u[(1, input)].norm_sqr() - 0.157).abs() < 1e-12);
    }

    #[test]
    fn analytic_amplitudes_match_exponential_on_complete_blocks() {
        let d = 6;
        for &t in &[0.0, 0.3, 0.5, 0.77, 1.0] {
            let u = beamsplitter_unitary(t, d).unwrap();
            for na in 0..d {
                for nb in 0..d - na {
                    for oa in 0..=(na + nb) {
                        let ob = na + nb - oa;
                        let exact = beamsplitter_amplitude(t, na, nb, oa, ob);
                        let from_exp = u[(oa * d + ob, na * d + nb)].re;
                        assert!((exact - from_exp).abs() < 1e-10, "t={t} {na}{nb}->{oa}{ob}");
                    }
                }
            }
        }
    }

    #[test]
    fn analytic_amplitudes_handle_large_photon_numbers() {
        let t = 0.8;
        let m = 400;
        let total: f64 = (0..=m + 1)
            .map(|oa| beamsplitter_amplitude(t, 1, m, oa, m + 1 - oa).powi(2))
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
