//! Bessel functions of the first and second kind for real order ν ≥ 0 and
//! positive argument, together with the zero finders used to enumerate cone
//! and annulus spectra.
//!
//! Values are computed by Steed's method (continued fractions CF1/CF2 plus
//! recurrence in the order), with Temme's series for small arguments and the
//! Hankel expansion for large ones. Internally the results carry a log-scale
//! exponent so that cross products of J and Y at very different arguments can
//! be formed without overflow.

use std::f64::consts::PI;

use super::gamma::temme_gammas;
use crate::error::{ensure_finite, Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const CF_MAXIT: usize = 1_000_000;
const RESCALE: f64 = 1e250;
const TEMME_XMIN: f64 = 2.0;

/// Order of a Bessel function, ν ≥ 0 and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        ensure_finite("nu", nu)?;
        if nu < 0.0 {
            return Err(Error::InvalidArgument(format!("Bessel order must be >= 0, got {nu}")));
        }
        Ok(Self(nu))
    }

    /// Order |n|/α of the n-th angular mode on a cone of angle 2πα.
    pub fn for_mode(n: i64, alpha: f64) -> Result<Self> {
        Self::new(n.unsigned_abs() as f64 / alpha)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// J_ν, J′_ν, Y_ν, Y′_ν with separate log-scales:
/// J_ν(x) = `j`·exp(`j_log`), J′_ν(x) = `jp`·exp(`j_log`), and likewise for Y.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledJy {
    pub j: f64,
    pub jp: f64,
    pub j_log: f64,
    pub y: f64,
    pub yp: f64,
    pub y_log: f64,
}

impl ScaledJy {
    fn normalized(j: f64, jp: f64, j_log: f64, y: f64, yp: f64, y_log: f64) -> Self {
        let (j, jp, j_log) = renormalize(j, jp, j_log);
        let (y, yp, y_log) = renormalize(y, yp, y_log);
        Self { j, jp, j_log, y, yp, y_log }
    }

    pub fn j_value(&self) -> f64 {
        self.j * self.j_log.exp()
    }

    pub fn y_value(&self) -> f64 {
        self.y * self.y_log.exp()
    }
}

fn renormalize(a: f64, b: f64, log: f64) -> (f64, f64, f64) {
    let m = a.abs().max(b.abs());
    if m == 0.0 || !m.is_finite() {
        return (a, b, log);
    }
    let l = m.ln();
    (a / m, b / m, log + l)
}

/// Hankel asymptotic expansion; `None` when the series does not reach full
/// precision at this (ν, x).
fn hankel(nu: f64, x: f64) -> Option<(f64, f64)> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last && k > 2 {
            break;
        }
        last = term.abs();
        // terms alternate between Q (odd k) and P (even k), each with sign (−1)^{⌊k/2⌋}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 * (p.abs() + q.abs()) || term == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    // ω = x − (ν/2 + 1/4)π with the phase reduced mod 2π before scaling by π
    let phase = ((0.5 * nu + 0.25) % 2.0) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cw = cx * cp + sx * sp;
    let sw = sx * cp - cx * sp;
    let amp = (2.0 / (PI * x)).sqrt();
    Some((amp * (p * cw - q * sw), amp * (p * sw + q * cw)))
}

fn hankel_usable(nu: f64, x: f64) -> bool {
    x >= 25.0 + 0.5 * nu * nu
}

/// Steed/Temme evaluation of J, J′, Y, Y′ for x > 0, ν ≥ 0.
pub(crate) fn bessel_jy_scaled(nu: f64, x: f64) -> ScaledJy {
    debug_assert!(x > 0.0 && nu >= 0.0);
    if hankel_usable(nu, x) {
        if let (Some((j0, y0)), Some((j1, y1))) = (hankel(nu, x), hankel(nu + 1.0, x)) {
            let jp = nu / x * j0 - j1;
            let yp = nu / x * y0 - y1;
            return ScaledJy::normalized(j0, jp, 0.0, y0, yp, 0.0);
        }
    }
    steed(nu, x)
}

fn steed(nu: f64, x: f64) -> ScaledJy {
    let nl: usize = if x < TEMME_XMIN {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J′_ν/J_ν
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut ok = false;
    for _ in 0..CF_MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            ok = true;
            break;
        }
    }
    if !ok {
        return ScaledJy {
            j: f64::NAN,
            jp: f64::NAN,
            j_log: 0.0,
            y: f64::NAN,
            yp: f64::NAN,
            y_log: 0.0,
        };
    }

    // downward recurrence from ν to μ, rescaling to avoid overflow
    let rjl1 = isign * 1e-30;
    let rjp1 = h * rjl1;
    let mut rjl = rjl1;
    let mut rjpl = rjp1;
    let mut down_log = 0.0;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > RESCALE {
            rjl /= RESCALE;
            rjpl /= RESCALE;
            down_log += RESCALE.ln();
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < TEMME_XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut cc = 1.0;
        let dd = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        for i in 1..CF_MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * (ff + r * q);
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                break;
            }
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2 (Steed): p + iq
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 2..CF_MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    // J_ν = rjl1·(J_μ / rjl_true), rjl_true = rjl·exp(down_log)
    let fact = rjmu / rjl;
    let j = rjl1 * fact;
    let jp = rjp1 * fact;
    let j_log = -down_log;

    // upward recurrence for Y from μ to ν
    let mut y_log = 0.0;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
        if ry1.abs() > RESCALE {
            ry1 /= RESCALE;
            rymu /= RESCALE;
            y_log += RESCALE.ln();
        }
    }
    let y = rymu;
    let yp = nu * xi * rymu - ry1;
    ScaledJy::normalized(j, jp, j_log, y, yp, y_log)
}

fn check_args(nu: BesselOrder, x: f64) -> Result<()> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(Error::InvalidArgument(format!("Bessel argument must be > 0, got {x}")));
    }
    let _ = nu;
    Ok(())
}

/// First-kind Bessel function J_ν(x).
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let v = bessel_jy_scaled(nu.0, x);
    let out = v.j_value();
    if out.is_nan() {
        return Err(Error::Numeric(format!("J_{}({x}) did not converge", nu.0)));
    }
    Ok(out)
}

/// J_ν(x) and its derivative.
pub fn bessel_j_and_derivative(nu: BesselOrder, x: f64) -> Result<(f64, f64)> {
    check_args(nu, x)?;
    let v = bessel_jy_scaled(nu.0, x);
    let s = v.j_log.exp();
    Ok((v.j * s, v.jp * s))
}

/// Second-kind Bessel function Y_ν(x); used by the annulus cross product.
pub fn bessel_y(nu: BesselOrder, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let v = bessel_jy_scaled(nu.0, x);
    Ok(v.y_value())
}

/// McMahon's large-m approximation to j_{ν,m}.
pub fn mcmahon_zero(nu: f64, m: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (m as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    let e2 = e * e;
    beta - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e2)
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e * e2 * e2)
}

/// Refine a bracketed root of `f` by Newton steps, bisecting whenever a step
/// leaves the bracket. `f` returns (value, derivative) up to a common positive
/// factor.
pub(crate) fn safeguarded_newton<F>(mut lo: f64, mut hi: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!("no sign change in [{lo}, {hi}]")));
    }
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!("root refinement stalled near {x}")))
}

fn j_pair(nu: f64) -> impl Fn(f64) -> (f64, f64) {
    move |x| {
        let v = bessel_jy_scaled(nu, x);
        (v.j, v.jp)
    }
}

const SCAN_STEP: f64 = 1.0;

/// All positive zeros of J_ν below `xmax`, ascending.
pub fn bessel_zeros_below(nu: BesselOrder, xmax: f64) -> Result<Vec<f64>> {
    let nu = nu.0;
    let mut out = Vec::new();
    let f = j_pair(nu);
    // J_ν > 0 on (0, ν]
    let mut a = nu.max(1e-3);
    if a >= xmax {
        return Ok(out);
    }
    let mut fa = f(a).0;
    while a < xmax {
        let b = (a + SCAN_STEP).min(xmax);
        let fb = f(b).0;
        if fa.is_nan() || fb.is_nan() {
            return Err(Error::Numeric(format!("J_{nu} evaluation failed near {b}")));
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            let z = safeguarded_newton(a, b, &f)?;
            if z <= xmax {
                out.push(z);
            }
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// The m-th positive zero j_{ν,m} of J_ν (m ≥ 1).
///
/// McMahon seeds are used where the expansion is reliable; otherwise the zeros
/// are counted by a sign-change scan from ν, where J_ν first changes sign.
pub fn bessel_j_zero(nu: BesselOrder, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("zero index m must be >= 1".into()));
    }
    let v = nu.0;
    let f = j_pair(v);
    let beta = (m as f64 + 0.5 * v - 0.25) * PI;
    if beta >= (4.0 * v * v).max(10.0) {
        let seed = mcmahon_zero(v, m);
        let (lo, hi) = (seed - 1.0, seed + 1.0);
        if f(lo).0.signum() != f(hi).0.signum() {
            let z = safeguarded_newton(lo, hi, &f)?;
            if (z - seed).abs() < 0.5 {
                return Ok(z);
            }
        }
    }
    let mut count = 0;
    let mut a = v.max(1e-3);
    let mut fa = f(a).0;
    loop {
        let b = a + SCAN_STEP;
        let fb = f(b).0;
        if fb.is_nan() {
            return Err(Error::Numeric(format!("J_{v} evaluation failed near {b}")));
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            count += 1;
            if count == m {
                return safeguarded_newton(a, b, &f);
            }
        }
        a = b;
        fa = fb;
    }
}

/// Cross product J_ν(k·ρ)Y_ν(k) − J_ν(k)Y_ν(k·ρ) and its k-derivative, both
/// divided by the same positive factor, plus the magnitude of the two products
/// (same factor) for relative residuals.
pub(crate) fn cross_product_scaled(nu: f64, ratio: f64, k: f64) -> (f64, f64, f64) {
    let inner = bessel_jy_scaled(nu, k * ratio);
    let outer = bessel_jy_scaled(nu, k);
    let l1 = inner.j_log + outer.y_log;
    let l2 = outer.j_log + inner.y_log;
    let m = l1.max(l2);
    let s1 = (l1 - m).exp();
    let s2 = (l2 - m).exp();
    let t1 = inner.j * outer.y * s1;
    let t2 = outer.j * inner.y * s2;
    let value = t1 - t2;
    let deriv = (ratio * inner.jp * outer.y + inner.j * outer.yp) * s1
        - (outer.jp * inner.y + ratio * outer.j * inner.yp) * s2;
    (value, deriv, t1.abs() + t2.abs())
}

/// Cross product J_ν(kρ)Y_ν(k) − J_ν(k)Y_ν(kρ) (unscaled; may overflow for
/// extreme orders).
pub fn cross_product(nu: BesselOrder, ratio: f64, k: f64) -> Result<f64> {
    check_ratio(ratio)?;
    check_args(nu, k)?;
    let inner = bessel_jy_scaled(nu.0, k * ratio);
    let outer = bessel_jy_scaled(nu.0, k);
    Ok(inner.j_value() * outer.y_value() - outer.j_value() * inner.y_value())
}

/// Relative residual |F(k)| / (|J(kρ)Y(k)| + |J(k)Y(kρ)|) of the cross product.
pub fn cross_product_relative_residual(nu: BesselOrder, ratio: f64, k: f64) -> f64 {
    let (v, _, mag) = cross_product_scaled(nu.0, ratio, k);
    if mag == 0.0 {
        0.0
    } else {
        v.abs() / mag
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    ensure_finite("ratio", ratio)?;
    if ratio <= 0.0 || ratio >= 1.0 {
        return Err(Error::InvalidArgument(format!("radius ratio must lie in (0,1), got {ratio}")));
    }
    Ok(())
}

const ANNULUS_SCAN_STEP: f64 = 0.75;

fn annulus_scan_start(nu: f64, ratio: f64) -> f64 {
    nu.max(0.5 * PI / (1.0 - ratio))
}

/// All zeros of the annulus cross product below `kmax`, ascending (outer
/// radius normalized to 1).
pub fn cross_product_zeros_below(nu: BesselOrder, ratio: f64, kmax: f64) -> Result<Vec<f64>> {
    check_ratio(ratio)?;
    let v = nu.0;
    let f = move |k: f64| {
        let (a, b, _) = cross_product_scaled(v, ratio, k);
        (a, b)
    };
    let mut out = Vec::new();
    let mut a = annulus_scan_start(v, ratio);
    if a >= kmax {
        return Ok(out);
    }
    let mut fa = f(a).0;
    while a < kmax {
        let b = (a + ANNULUS_SCAN_STEP).min(kmax);
        let fb = f(b).0;
        if fa.is_nan() || fb.is_nan() {
            return Err(Error::Numeric(format!("cross product evaluation failed near {b}")));
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            let z = safeguarded_newton(a, b, f)?;
            if z <= kmax {
                out.push(z);
            }
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// The m-th zero of the annulus cross product with inner/outer ratio `ratio`.
pub fn cross_product_zero(nu: BesselOrder, ratio: f64, m: usize) -> Result<f64> {
    check_ratio(ratio)?;
    if m == 0 {
        return Err(Error::InvalidArgument("zero index m must be >= 1".into()));
    }
    let v = nu.0;
    let f = move |k: f64| {
        let (a, b, _) = cross_product_scaled(v, ratio, k);
        (a, b)
    };
    let mut count = 0;
    let mut a = annulus_scan_start(v, ratio);
    let mut fa = f(a).0;
    loop {
        let b = a + ANNULUS_SCAN_STEP;
        let fb = f(b).0;
        if fb.is_nan() {
            return Err(Error::Numeric(format!("cross product evaluation failed near {b}")));
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            count += 1;
            if count == m {
                return safeguarded_newton(a, b, f);
            }
        }
        a = b;
        fa = fb;
    }
}
