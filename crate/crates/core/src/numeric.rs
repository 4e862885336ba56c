/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().total()
}

const SERIES_CUTOFF: f64 = 1e-5;

/// `(1 - e^{-u}) / u`, the mean of `e^{-s}` over `s in [0, u]`.
pub(crate) fn mean_exp_decay(u: f64) -> f64 {
    if u.abs() < SERIES_CUTOFF {
        // 1 - u/2 + u^2/6 - u^3/24; the next term is below 1e-22
        1.0 - u / 2.0 * (1.0 - u / 3.0 * (1.0 - u / 4.0))
    } else {
        -(-u).exp_m1() / u
    }
}

const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_45,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_37,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_6,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_62,
    0.149_595_988_816_576_76,
    0.124_628_971_255_534_03,
    0.095_158_511_682_492_59,
    0.062_253_523_938_647_706,
    0.027_152_459_411_754_037,
];

/// 16-point Gauss-Legendre rule on `[a, b]`; exact for polynomials of
/// degree up to 31.
pub(crate) fn gauss_legendre_16(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = a + half;
    let sum: CompensatedSum = GL16_NODES
        .iter()
        .zip(GL16_WEIGHTS)
        .map(|(x, w)| w * (f(mid - half * x) + f(mid + half * x)))
        .collect();
    half * sum.total()
}
