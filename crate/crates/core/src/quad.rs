//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals,
//! for scalar and vector-valued integrands.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate_vec`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

/// Integral estimate with per-component error bounds.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel
where
    F: FnMut(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(c, buf);
    for d in 0..dim {
        kron[d] = WGK[7] * buf[d];
        gauss[d] = WG[3] * buf[d];
    }
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        for sign in [-1.0, 1.0] {
            f(c + sign * dx, buf);
            for d in 0..dim {
                kron[d] += wk * buf[d];
                if j % 2 == 1 {
                    gauss[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut error = vec![0.0; dim];
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        error[d] = (kron[d] - gauss[d]).abs();
    }
    Panel { a, b, value: kron, error }
}

/// Integrate a vector-valued function over `[a, b]`.
///
/// `f(x, out)` writes the `dim` integrand components at `x`. The panel with
/// the largest component error is bisected until every component meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]),
{
    if b < a {
        let mut r = integrate_vec(f, b, a, dim, opts)?;
        r.value.iter_mut().for_each(|v| *v = -*v);
        return Ok(r);
    }
    let mut buf = vec![0.0; dim];
    let mut panels = vec![gk15(&mut f, a, b, dim, &mut buf)];
    loop {
        let mut value = vec![0.0; dim];
        let mut error = vec![0.0; dim];
        for p in &panels {
            for d in 0..dim {
                value[d] += p.value[d];
                error[d] += p.error[d];
            }
        }
        let mut worst_component = None;
        let mut worst_excess = 0.0;
        for d in 0..dim {
            let tol = opts.abs_tol.max(opts.rel_tol * value[d].abs());
            if !error[d].is_finite() || error[d] > tol {
                let excess = if error[d].is_finite() { error[d] / tol } else { f64::INFINITY };
                if worst_component.is_none() || excess > worst_excess {
                    worst_component = Some(d);
                    worst_excess = excess;
                }
            }
        }
        let Some(d) = worst_component else {
            return Ok(QuadResult { value, error, intervals: panels.len() });
        };
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature { index: (d, d), error: error[d] });
        }
        // Split the panel contributing most to the failing component.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, if p.error[d].is_finite() { p.error[d] } else { f64::INFINITY }))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature { index: (d, d), error: error[d] });
        }
        panels.push(gk15(&mut f, p.a, mid, dim, &mut buf));
        panels.push(gk15(&mut f, mid, p.b, dim, &mut buf));
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), a, b, 1, opts)?;
    Ok((r.value[0], r.error[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let (v, _) = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::default()).unwrap();
        let (w, _) = integrate(|x| 1.0 / x.sqrt(), 1.0, 0.0, QuadOptions::default()).unwrap();
        assert_eq!(v, -w);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn vector_components_share_panels() {
        let r = integrate_vec(
            |x, out| {
                out[0] = x.sin();
                out[1] = (-x).exp();
            },
            0.0,
            std::f64::consts::PI,
            2,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value[0] - 2.0).abs() < 1e-12);
        assert!((r.value[1] - (1.0 - (-std::f64::consts::PI).exp())).abs() < 1e-12);
    }

    #[test]
    fn divergent_integrand_reports_error() {
        let opts = QuadOptions { max_intervals: 50, ..Default::default() };
        assert!(integrate(|x| 1.0 / x, 0.0, 1.0, opts).is_err());
    }
}
