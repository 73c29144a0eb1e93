//! The 61 formulas, on frequencies unless the measure reads counts.
//!
//! Every function returns an IEEE double where NaN stands for undefined.

use crate::contingency::{ContingencyTable, Probabilities};
use crate::stats;

use super::value::{div, xlog2};
use super::{MeasureParams, RuleContext};

/// Everything a formula may read, computed once per table.
pub(crate) struct Cells {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub n: f64,
    pub p: Probabilities,
}

impl Cells {
    pub fn new(t: &ContingencyTable) -> Option<Self> {
        let p = t.probabilities().ok()?;
        let [a, b, c, d] = t.cells();
        Some(Self {
            a,
            b,
            c,
            d,
            n: t.n() as f64,
            p,
        })
    }

    fn n_x(&self) -> u64 {
        self.a + self.b
    }
    fn n_y(&self) -> u64 {
        self.a + self.c
    }
    fn n_total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
    fn attracted_or_independent(&self) -> bool {
        self.a as u128 * self.n_total() as u128 >= self.n_x() as u128 * self.n_y() as u128
    }
}

pub(crate) fn lift(p: &Probabilities) -> f64 {
    div(p.xy, p.x * p.y)
}

/// Binary entropy of `t / margin` on the left half, one beyond it.
fn half_entropy(t: f64, margin: f64) -> f64 {
    let r = div(t, margin);
    if r.is_nan() {
        return f64::NAN;
    }
    if r < 0.5 {
        -xlog2(1.0 - r, 1.0 - r) - xlog2(r, r)
    } else {
        1.0
    }
}

/// `((1 - h1²)(1 - h2²))^(1/4)` at `t = p(XȲ)`.
pub(crate) fn entropic_factor(p: &Probabilities) -> f64 {
    let h1 = half_entropy(p.xny, p.x);
    let h2 = half_entropy(p.xny, p.ny);
    let f = (1.0 - h1 * h1) * (1.0 - h2 * h2);
    if f.is_nan() {
        f
    } else {
        f.max(0.0).powf(0.25)
    }
}

pub(crate) fn intensity_of_implication(cl: &Cells) -> f64 {
    let lambda = cl.n * cl.p.x * cl.p.ny;
    stats::poisson_sf(lambda, cl.b).unwrap_or(f64::NAN)
}

fn ipee(cl: &Cells) -> f64 {
    let z = div(cl.b as f64 - cl.a as f64, (cl.n_x() as f64).sqrt());
    if z.is_nan() {
        f64::NAN
    } else {
        stats::std_normal_sf(z)
    }
}

fn support_variation(p: &Probabilities) -> f64 {
    xlog2(p.xy, div(p.xy, p.x * p.y))
        + xlog2(p.xny, div(p.xny, p.x * p.ny))
        + xlog2(p.nxy, div(p.nxy, p.nx * p.y))
        + xlog2(p.nxny, div(p.nxny, p.nx * p.ny))
}

fn binary_entropy(q: f64, nq: f64) -> f64 {
    -xlog2(q, q) - xlog2(nq, nq)
}

/// `round(100 · count / n)`, half up, in integers.
fn percent(count: u64, n: u64) -> u64 {
    (200 * count + n) / (2 * n)
}

const VT100_CLAMP: f64 = 1e-12;

fn vt100(cl: &Cells) -> f64 {
    let n = cl.n_total();
    let k_succ = percent(cl.n_y(), n);
    let draws = percent(cl.n_x(), n);
    let k = percent(cl.a, n);
    let Ok((cdf, sf)) = stats::hypergeom_tails(100, k_succ, draws, k) else {
        return f64::NAN;
    };
    // invert through the smaller tail to keep precision near 1
    let z = if cdf <= 0.5 {
        stats::std_normal_quantile(cdf.max(VT100_CLAMP))
    } else {
        stats::std_normal_quantile(sf.max(VT100_CLAMP)).map(|z| -z)
    };
    z.unwrap_or(f64::NAN)
}

fn pdi(cl: &Cells, ctx: &RuleContext) -> f64 {
    let ii = intensity_of_implication(cl);
    let (mean, sd) = (ctx.ii_mean(), ctx.ii_sd());
    if !(sd > 0.0) || ii.is_nan() {
        return f64::NAN;
    }
    stats::std_normal_cdf((ii - mean) / sd)
}

fn goodman(p: &Probabilities) -> f64 {
    let mx = p.x.max(p.nx);
    let my = p.y.max(p.ny);
    let rows = p.xy.max(p.xny) + p.nxy.max(p.nxny);
    let cols = p.xy.max(p.nxy) + p.xny.max(p.nxny);
    let lambda = div(rows + cols - mx - my, 2.0 - mx - my);
    let q = div(p.xy * p.nxny - p.xny * p.nxy, p.xy * p.nxny + p.xny * p.nxy);
    lambda * q
}

/// Evaluates measure `id`; the caller guarantees `ctx` for PDI.
pub(crate) fn eval(id: u8, cl: &Cells, params: &MeasureParams, ctx: Option<&RuleContext>) -> f64 {
    let p = &cl.p;
    match id {
        1 => div(p.xy - p.x * p.y, (p.x * p.y * p.nx * p.ny).sqrt()),
        2 => div(2.0 * (p.xy - p.x * p.y), p.x + p.y - 2.0 * p.x * p.y),
        3 => div(p.xy, p.x),
        4 => 1.0 - 0.5 * (div(p.xny, p.x) + div(p.xny, p.ny)),
        5 => div(p.xy, p.x) - p.y,
        6 => 1.0 - 2.0 * div(p.xny, p.x),
        7 => 1.0 - 0.5 * (3.0 * div(p.xny, p.x) + div(p.xny, p.ny)),
        8 => p.x + p.ny - 4.0 * p.xny,
        9 => p.xy - p.xny,
        10 => div(p.x * p.ny, p.xny),
        11 => div(p.xy, (p.x * p.y).sqrt()),
        12 => p.x,
        13 => div(2.0 * p.xy, p.xy + 1.0 - p.nxny),
        14 => (p.ny - div(p.xny, p.x)).abs(),
        15 => 1.5 + 2.0 * p.x - 1.5 * p.y - (1.5 * div(p.xny, p.x) + 2.0 * div(p.xny, p.ny)),
        16 => (lift(p).powi(params.k_weight as i32) - 1.0) * p.xy.powi(params.m_weight as i32),
        17 => div(p.xy * p.ny, p.xny * p.y),
        18 => div(p.xy - p.x * p.y, p.x * p.ny),
        19 => div(p.nxny, p.ny),
        20 => {
            let agree = p.xy + p.nxny;
            let expected = p.x * p.y + p.nx * p.ny;
            div(agree, expected) * div(1.0 - expected, 1.0 - agree)
        }
        21 => cl.n * (p.xy - params.sigma_c * p.x),
        22 => lift(p).log2(),
        23 => {
            div(p.xy * p.xy + p.xny * p.xny, p.x) + div(p.nxy * p.nxy + p.nxny * p.nxny, p.nx)
                - p.y * p.y
                - p.ny * p.ny
        }
        24 => goodman(p),
        25 => cl.n.sqrt() * div(p.xny - p.x * p.ny, (p.x * p.ny).sqrt()),
        26 => ipee(cl),
        27 => (0.5 * entropic_factor(p) + 1.0).sqrt() * ipee(cl).sqrt(),
        28 => match ctx {
            Some(ctx) => pdi(cl, ctx),
            None => f64::NAN,
        },
        29 => div(support_variation(p), binary_entropy(p.x, p.nx)),
        30 => intensity_of_implication(cl),
        31 => (entropic_factor(p) * intensity_of_implication(cl)).sqrt(),
        32 => {
            let ii = intensity_of_implication(cl);
            entropic_factor(p).sqrt() * (2.0 * ii - 1.0).max(0.0).sqrt()
        }
        33 => {
            if cl.a == 0 {
                0.0
            } else {
                let lambda = cl.n * p.x * p.y;
                stats::poisson_cdf(lambda, cl.a - 1).unwrap_or(f64::NAN)
            }
        }
        34 => lift(p),
        35 => div(p.xy, p.xny + p.y),
        36 => xlog2(p.xy, div(p.xy, p.x * p.y)) + xlog2(p.xny, div(p.xny, p.x * p.ny)),
        37 => p.xy.sqrt() * (div(p.xy, p.x) - p.y),
        38 => div(p.xy, p.xny + p.nxy),
        39 => (cl.a as f64 + 1.0) / (cl.n_x() as f64 + 2.0),
        40 => div(p.xy, p.x) - p.x * p.y,
        41 => {
            let gain = div(p.xy, p.x) - p.y;
            if cl.attracted_or_independent() {
                div(gain, p.ny)
            } else {
                div(gain, p.y)
            }
        }
        42 => div(p.xy - p.xny, p.y),
        43 => p.xy - p.x * p.y,
        44 => p.x * (div(p.xy, p.x) - p.y).abs(),
        45 => cl.n * (p.xy - p.x * p.y),
        46 => p.xy + p.nxny,
        47 => p.y,
        48 => div(p.xy * p.nxny - p.xny * p.nxy, p.xy * p.nxny + p.xny * p.nxy),
        49 => div(p.xy, p.y),
        50 => div(p.xy * p.nxny, p.nxy * p.xny),
        51 => div(div(p.xy, p.x), div(p.nxy, p.nx)),
        52 => div(p.xy, p.xny),
        53 => div(p.nxny, p.nx),
        54 => p.xy,
        55 => xlog2(div(p.xy, p.x), lift(p)),
        56 => xlog2(p.xy, lift(p)),
        57 => div(p.xy - p.xny, p.xy),
        58 => vt100(cl),
        59 => support_variation(p),
        60 => {
            let s = (p.xy * p.nxny).sqrt();
            let t = (p.xny * p.nxy).sqrt();
            div(s - t, s + t)
        }
        61 => div(p.xy - p.x * p.y, (p.xy * p.ny).max(p.y * p.xny)),
        _ => f64::NAN,
    }
}
