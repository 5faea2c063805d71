//! Cone, annulus, excision and surface descriptors, plus the β average of the
//! excision scales and the Gauss–Bonnet and scaling bookkeeping.
//!
//! Cone angles are stored as α (angle / 2π) throughout.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Flat cone C_{α,L}: metric dr² + r²α²dθ² on 0 < r < L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeSpec {
    pub alpha: f64,
    pub length: f64,
}

impl ConeSpec {
    pub fn new(alpha: f64, length: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_positive("length", length)?;
        Ok(Self { alpha, length })
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.alpha * self.length * self.length
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.alpha * self.length
    }
}

/// Conic annulus inner < r < outer with cone parameter α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusSpec {
    pub alpha: f64,
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusSpec {
    pub fn new(alpha: f64, inner: f64, outer: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_positive("inner", inner)?;
        ensure_finite("outer", outer)?;
        if outer <= inner {
            return Err(Error::InvalidArgument(format!(
                "annulus needs inner < outer, got {inner} >= {outer}"
            )));
        }
        Ok(Self { alpha, inner, outer })
    }

    pub fn ratio(&self) -> f64 {
        self.inner / self.outer
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.alpha * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.alpha * (self.inner + self.outer)
    }
}

/// Either kind of rotationally symmetric Dirichlet domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Cone(ConeSpec),
    Annulus(AnnulusSpec),
}

impl Domain {
    pub fn alpha(&self) -> f64 {
        match self {
            Domain::Cone(c) => c.alpha,
            Domain::Annulus(a) => a.alpha,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Cone(c) => c.area(),
            Domain::Annulus(a) => a.area(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Cone(c) => c.perimeter(),
            Domain::Annulus(a) => a.perimeter(),
        }
    }

    /// Smallest geometric length scale, used to place the heat-trace fit window.
    pub fn min_length(&self) -> f64 {
        match self {
            Domain::Cone(c) => c.length,
            Domain::Annulus(a) => a.inner.min(a.outer - a.inner),
        }
    }
}

/// k circles r = b_i ε cut out around the cone points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcisionSpec {
    pub alphas: Vec<f64>,
    pub bs: Vec<f64>,
    pub eps: f64,
}

impl ExcisionSpec {
    pub fn new(alphas: Vec<f64>, bs: Vec<f64>, eps: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("at least one excised circle is required".into()));
        }
        if alphas.len() != bs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} angles but {} radius scales",
                alphas.len(),
                bs.len()
            )));
        }
        for &a in &alphas {
            ensure_positive("alpha", a)?;
        }
        for &b in &bs {
            ensure_positive("b", b)?;
            if b > 1.0 {
                return Err(Error::InvalidArgument(format!("radius scale must lie in (0,1], got {b}")));
            }
        }
        ensure_positive("eps", eps)?;
        if eps > 1.0 {
            return Err(Error::InvalidArgument(format!("eps must lie in (0,1], got {eps}")));
        }
        Ok(Self { alphas, bs, eps })
    }

    /// The single-circle configuration with b = 1.
    pub fn single(alpha: f64, eps: f64) -> Result<Self> {
        Self::new(vec![alpha], vec![1.0], eps)
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }
}

/// Closed conic surface of genus p with n cone points.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub genus: u32,
    /// Cone parameters, kept exact so the rational coefficients stay exact.
    pub angles: Vec<Rational64>,
    pub volume: f64,
    pub logdet_m: Option<f64>,
}

impl SurfaceSpec {
    pub fn new(genus: u32, angles: Vec<Rational64>, volume: f64, logdet_m: Option<f64>) -> Result<Self> {
        for a in &angles {
            if *a <= Rational64::zero() {
                return Err(Error::InvalidArgument(format!("cone parameter must be positive, got {a}")));
            }
        }
        ensure_positive("volume", volume)?;
        if let Some(l) = logdet_m {
            ensure_finite("logdet_m", l)?;
        }
        Ok(Self { genus, angles, volume, logdet_m })
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles_f64(&self) -> Vec<f64> {
        self.angles.iter().map(rational_to_f64).collect()
    }

    /// Euler characteristic of the surface with the n cone points excised.
    pub fn euler_characteristic_excised(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.n() as i64
    }
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Simplest rational within 1e−12 (relative) of `x`, by continued fractions
/// with denominators up to 10⁹; `None` when there is none.
pub fn rational_from_f64(x: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > 1_000_000_000 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return Some(Rational64::new(h1, k1));
        }
        let frac = v - a;
        if frac == 0.0 {
            return None;
        }
        v = 1.0 / frac;
    }
    None
}

/// β = (1/k) Σ_j Π_{i≠j} b_i.
pub fn beta(bs: &[f64]) -> Result<f64> {
    if bs.is_empty() {
        return Err(Error::InvalidArgument("beta needs at least one radius scale".into()));
    }
    for &b in bs {
        ensure_positive("b", b)?;
    }
    let k = bs.len();
    let sum: f64 = (0..k)
        .map(|j| bs.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, b)| b).product::<f64>())
        .sum();
    Ok(sum / k as f64)
}

/// Σα_i − (2p + n − 2), exactly.
pub fn gauss_bonnet_residual_exact(spec: &SurfaceSpec) -> Rational64 {
    let sum: Rational64 = spec.angles.iter().sum();
    sum - Rational64::from_integer(2 * spec.genus as i64 + spec.n() as i64 - 2)
}

/// Σα_i − (2p + n − 2); zero for a flat conic closed surface.
pub fn gauss_bonnet_residual(spec: &SurfaceSpec) -> f64 {
    rational_to_f64(&gauss_bonnet_residual_exact(spec))
}

/// Log-determinant after multiplying the metric by scale²:
/// eigenvalues scale by scale⁻², so log det shifts by −2ζ(0) log(scale).
pub fn scale_logdet(logdet: f64, zeta0: f64, scale: f64) -> f64 {
    logdet - 2.0 * zeta0 * scale.ln()
}

/// Parse an exact number: an integer, a fraction `p/q`, or a decimal.
/// Scientific notation falls back to the nearest simple rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational64::new(p, q));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Rational64::from_integer(i));
    }
    if !s.contains(['e', 'E']) {
        if let Some((int, frac)) = s.split_once('.') {
            let digits = frac.len() as u32;
            if digits <= 15 && frac.chars().all(|c| c.is_ascii_digit()) {
                let neg = int.starts_with('-');
                let int_abs = int.trim_start_matches(['-', '+']);
                let int_val: i64 = if int_abs.is_empty() { 0 } else { int_abs.parse().map_err(|_| bad())? };
                let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
                let den = 10i64.checked_pow(digits).ok_or_else(bad)?;
                let num = int_val
                    .checked_mul(den)
                    .and_then(|v| v.checked_add(frac_val))
                    .ok_or_else(bad)?;
                return Ok(Rational64::new(if neg { -num } else { num }, den));
            }
        }
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    rational_from_f64(x).ok_or_else(bad)
}

/// Parse a real, accepting fractions such as `1/3`.
pub fn parse_real(text: &str) -> Result<f64> {
    let s = text.trim();
    if s.contains('/') {
        return Ok(rational_to_f64(&parse_rational(s)?));
    }
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("not a number: {s:?}")))
}

/// Comma-separated exact numbers.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational64>> {
    text.split(',').map(parse_rational).collect()
}

/// Comma-separated reals.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}

/// Values read from a key=value config file. Every key is optional here;
/// commands decide which ones they need.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurfaceConfig {
    pub genus: Option<u32>,
    pub angles: Option<Vec<Rational64>>,
    pub bs: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub volume: Option<f64>,
    pub logdet_m: Option<f64>,
}

const CONFIG_KEYS: [&str; 6] = ["genus", "angles", "bs", "eps", "volume", "logdet_m"];

impl SurfaceConfig {
    /// Parse `key = value` lines. Blank lines and `#` comments are skipped;
    /// unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if seen.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        let mut cfg = SurfaceConfig::default();
        for (key, value) in &seen {
            match key.as_str() {
                "genus" => {
                    cfg.genus = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("genus must be a non-negative integer, got {value:?}")))?,
                    )
                }
                "angles" => cfg.angles = Some(parse_rational_list(value)?),
                "bs" => cfg.bs = Some(parse_real_list(value)?),
                "eps" => cfg.eps = Some(parse_real(value)?),
                "volume" => cfg.volume = Some(parse_real(value)?),
                "logdet_m" => cfg.logdet_m = Some(parse_real(value)?),
                _ => unreachable!(),
            }
        }
        Ok(cfg)
    }
}
