//! 21-point Gauss–Kronrod rule and the global adaptive bisection driver.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Estimate, QuadratureConfig, QuadratureError};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One application of the rule on `[a, b]`: (value, error estimate).
pub(crate) fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite { at: center });
    }
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite { at: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = ((res_k - res_g) * half).abs();
    Ok((value, rescale_error(err, res_abs * half.abs(), res_asc * half.abs())))
}

// QUADPACK error scaling.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err;
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
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
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Global adaptive integration over consecutive `edges`.
///
/// The segment with the largest error estimate is bisected until the summed
/// error meets `max(abs_tol, rel_tol·|value|)` or the subdivision budget
/// (`cfg.max_subdivisions` on top of the initial segments) runs out.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    edges: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError> {
    let mut heap = BinaryHeap::with_capacity(edges.len() + 16);
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (value, error) = gk21(f, a, b)?;
        evaluations += 21;
        heap.push(Segment { a, b, value, error });
    }
    let mut subdivisions = 0usize;
    let tolerance = |v: f64| cfg.abs_tol.max(cfg.rel_tol * v.abs());
    let (mut run_value, mut run_error) = totals(heap.iter());
    loop {
        if run_error <= tolerance(run_value) {
            // running sums drift; confirm with an ordered re-summation
            let (value, error) = totals(heap.iter().chain(frozen.iter()));
            if error <= tolerance(value) {
                return Ok(Estimate { value, error, evaluations });
            }
            run_value = value;
            run_error = error;
        }
        let Some(worst) = heap.pop() else {
            let (value, error) = totals(frozen.iter());
            return Err(QuadratureError::NotConverged { estimate: value, error, subdivisions });
        };
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            let (value, error) = totals(heap.iter().chain(frozen.iter()));
            return Err(QuadratureError::NotConverged { estimate: value, error, subdivisions });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || worst.b - worst.a < 8.0 * f64::EPSILON * mid.abs() {
            frozen.push(worst);
            if heap.is_empty() {
                let (value, error) = totals(frozen.iter());
                if error <= tolerance(value) {
                    return Ok(Estimate { value, error, evaluations });
                }
            }
            continue;
        }
        let (v1, e1) = gk21(f, worst.a, mid)?;
        let (v2, e2) = gk21(f, mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        run_value += v1 + v2 - worst.value;
        run_error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

// Summation in position order keeps the result independent of heap layout.
fn totals<'a>(segments: impl Iterator<Item = &'a Segment>) -> (f64, f64) {
    let mut all: Vec<&Segment> = segments.collect();
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    all.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials_through_degree_31() {
        for k in 0..=31 {
            let (v, _) = gk21(&|x: f64| x.powi(k), 0.0, 1.0).unwrap();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {k}: {v} vs {exact}");
        }
    }

    #[test]
    fn nan_is_reported_with_location() {
        let r = gk21(&|x: f64| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0);
        assert!(matches!(r, Err(QuadratureError::NonFinite { at }) if at > 0.5));
    }
}
