//! One-dimensional quadrature: adaptive Gauss–Kronrod (21-point rule, global
//! bisection) and fixed-order Gauss–Legendre.

use crate::error::{Error, Result};
use crate::scalar::Real;

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
    0.123_491_976_262_065_851_077_208_323_858,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// 10-point Gauss weights, paired with the odd entries of XGK.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + serde::Deserialize<'de>")
)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rel: T::lit(1e-10),
            abs: T::lit(1e-14),
            max_subdivisions: 4000,
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T) -> Self {
        Self {
            rel,
            abs,
            ..Self::default()
        }
    }

    #[inline]
    pub fn target(&self, value: T) -> T {
        self.abs.max(self.rel * value.abs())
    }
}

/// Integral value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

impl<T: Real> std::ops::Add for Estimate<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Single application of the 21-point Kronrod rule with its embedded 10-point
/// Gauss rule. Returns `(kronrod, error_estimate)`.
pub fn gauss_kronrod21<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let f_center = f(center);
    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + T::lit(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    (value, err)
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Globally adaptive integration of `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: &Tolerance<T>) -> Result<Estimate<T>> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

/// Globally adaptive integration over consecutive panels delimited by
/// `points` (sorted ascending, at least two entries). Breakpoints should mark
/// kinks, discontinuities and the scales where the integrand changes character.
pub fn integrate_with_breakpoints<T: Real, F: Fn(T) -> T>(
    f: F,
    points: &[T],
    tol: &Tolerance<T>,
) -> Result<Estimate<T>> {
    if points.len() < 2 {
        return Err(Error::domain("integration needs at least two breakpoints"));
    }
    let mut panels: Vec<Panel<T>> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, error) = gauss_kronrod21(&f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    if panels.is_empty() {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let value: T = panels.iter().map(|p| p.value).sum();
        let error: T = panels.iter().map(|p| p.error).sum();
        if error <= tol.target(value) {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::numerical(
                "adaptive quadrature hit the subdivision limit",
                error.as_f64(),
            ));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            });
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (a + b);
        if mid <= a || mid >= b {
            return Err(Error::numerical(
                "adaptive quadrature cannot subdivide further (roundoff)",
                error.as_f64(),
            ));
        }
        let (v1, e1) = gauss_kronrod21(&f, a, mid);
        let (v2, e2) = gauss_kronrod21(&f, mid, b);
        panels.push(Panel {
            a,
            b: mid,
            value: v1,
            error: e1,
        });
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize_lossy(n);
        let m = n.div_ceil(2);
        for i in 0..m {
            let guess = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
            let mut x = guess;
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_usize_lossy(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}
