//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature with variable
//! substitution for infinite endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::validation("abs_tol", "must be positive"));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::validation("rel_tol", "must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(Error::validation("max_subdivisions", "must be at least 1"));
        }
        Ok(QuadratureSettings {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error; at most `max(abs_tol, rel_tol * |value|)`.
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_226_412,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
        fv[j] = (f1, f2);
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        lo,
        hi,
        value,
        error,
    }
}

fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: QuadratureSettings,
) -> Result<Integral> {
    let mut heap = BinaryHeap::with_capacity(settings.max_subdivisions + 1);
    heap.push(gauss_kronrod(&f, lo, hi));
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Convergence {
                estimate: value,
                error,
                subdivisions: heap.len(),
            });
        }
        if error <= settings.abs_tol.max(settings.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                subdivisions: heap.len(),
            });
        }
        if heap.len() >= settings.max_subdivisions {
            return Err(Error::Convergence {
                estimate: value,
                error,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in double precision
            return Err(Error::Convergence {
                estimate: value,
                error,
                subdivisions: heap.len() + 1,
            });
        }
        heap.push(gauss_kronrod(&f, worst.lo, mid));
        heap.push(gauss_kronrod(&f, mid, worst.hi));
    }
}

/// Integrates `f` over `[lower, upper]`; either endpoint may be infinite.
///
/// Infinite endpoints are mapped onto a finite parameter interval:
/// `x = a + u/(1-u)` for `[a, inf)`, `x = b - u/(1-u)` for `(-inf, b]` and
/// `x = u/(1-u^2)` for the whole line.
pub fn integrate<F>(f: F, lower: f64, upper: f64, settings: QuadratureSettings) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if lower.is_nan() || upper.is_nan() {
        return Err(Error::domain("integrate", "NaN endpoint"));
    }
    if lower == upper {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    if lower > upper {
        let r = integrate(f, upper, lower, settings)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => adaptive(f, lower, upper, settings),
        (true, false) => adaptive(
            |u: f64| {
                let w = 1.0 - u;
                f(lower + u / w) / (w * w)
            },
            0.0,
            1.0,
            settings,
        ),
        (false, true) => adaptive(
            |u: f64| {
                let w = 1.0 - u;
                f(upper - u / w) / (w * w)
            },
            0.0,
            1.0,
            settings,
        ),
        (false, false) => adaptive(
            |u: f64| {
                let w = 1.0 - u * u;
                f(u / w) * (1.0 + u * u) / (w * w)
            },
            -1.0,
            1.0,
            settings,
        ),
    }
}
