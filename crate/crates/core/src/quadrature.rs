//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one and two
//! dimensions.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{EvasionError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Tolerance::default()
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`, bisecting the interval with the largest
/// error estimate until the total error meets `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = kronrod(&mut f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            break;
        }
        if heap.len() >= tol.max_intervals || !value.is_finite() {
            return Err(EvasionError::QuadratureFailure { estimate: value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running update.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Estimate { value, error })
}

/// Iterated integral ∫_{x0}^{x1} ∫_{y0}^{y1} f(x, y) dy dx.
///
/// The inner integrals run at a tolerance a hundred times tighter than the
/// outer one so that inner noise does not stall the outer refinement.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: Tolerance,
) -> Result<Estimate> {
    let inner_tol = Tolerance {
        abs: tol.abs * 1e-2,
        rel: tol.rel * 1e-2,
        max_intervals: tol.max_intervals,
    };
    let failure: Cell<Option<EvasionError>> = Cell::new(None);
    let inner_error = Cell::new(0.0f64);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y0, y1, inner_tol) {
            Ok(e) => {
                inner_error.set(inner_error.get().max(e.error));
                e.value
            }
            Err(err) => {
                failure.set(Some(err));
                f64::NAN
            }
        },
        x0,
        x1,
        tol,
    );
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let outer = outer?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error.get() * (x1 - x0).abs(),
    })
}
