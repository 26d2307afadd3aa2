//! Dormand–Prince 5(4) with the free fourth-order continuous extension.

use crate::error::{Error, Result};
use crate::soliton::SolitonState;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// A first-order system the stepper can drive, together with the map back to
/// a [`SolitonState`].
pub(crate) trait System<const N: usize> {
    fn rhs(&self, r: f64, y: &[f64; N]) -> Result<[f64; N]>;
    fn state(&self, r: f64, y: &[f64; N]) -> SolitonState;
    /// `F' = ψ e^{cF}`; watched for blow-up together with the components.
    fn potential_slope(&self, y: &[f64; N]) -> f64;
}

/// Dense output over one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment<const N: usize> {
    pub r0: f64,
    pub h: f64,
    rc: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn lo(&self) -> f64 {
        self.r0.min(self.r0 + self.h)
    }

    pub fn hi(&self) -> f64 {
        self.r0.max(self.r0 + self.h)
    }

    pub fn eval(&self, r: f64) -> [f64; N] {
        let theta = (r - self.r0) / self.h;
        let theta1 = 1.0 - theta;
        let rc = &self.rc;
        std::array::from_fn(|i| {
            rc[0][i]
                + theta
                    * (rc[1][i] + theta1 * (rc[2][i] + theta * (rc[3][i] + theta1 * rc[4][i])))
        })
    }
}

pub(crate) struct Step<const N: usize> {
    pub y1: [f64; N],
    /// Derivative at the new point; first stage of the next step.
    pub k7: [f64; N],
    pub err: f64,
    pub segment: Segment<N>,
}

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        y[i] + h * acc
    })
}

/// One trial step of size `h` (signed) from `(r, y)` with `k1 = f(r, y)`.
pub(crate) fn try_step<const N: usize, S: System<N>>(
    sys: &S,
    r: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Result<Step<N>> {
    let k2 = sys.rhs(r + C2 * h, &comb(y, h, &[(A21, k1)]))?;
    let k3 = sys.rhs(r + C3 * h, &comb(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = sys.rhs(
        r + C4 * h,
        &comb(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    )?;
    let k5 = sys.rhs(
        r + C5 * h,
        &comb(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = sys.rhs(
        r + h,
        &comb(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    )?;
    let y1 = comb(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    if y1.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("step result"));
    }
    let r1 = r + h;
    let k7 = sys.rhs(r1, &y1)?;

    let mut sum = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * y[i].abs().max(y1[i].abs());
        sum += (e / sc) * (e / sc);
    }
    let err = (sum / N as f64).sqrt();
    if !err.is_finite() {
        return Err(Error::NonFinite("error estimate"));
    }

    let mut rc = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        rc[0][i] = y[i];
        rc[1][i] = ydiff;
        rc[2][i] = bspl;
        rc[3][i] = ydiff - h * k7[i] - bspl;
        rc[4][i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Ok(Step {
        y1,
        k7,
        err,
        segment: Segment { r0: r, h, rc },
    })
}
