//! Closed-form small-ε expansions of log determinants.
//!
//! Every expansion has the shape
//! `c_log_eps · log ε + c_loglog · log log(1/ε) + c_const + error`,
//! with exact rational coefficients. The constant is a [`LinearForm`] over
//! named logarithms, some of them known (`log 2`, `log b_1`, ...) and some
//! carried symbolically (`logdet_M`, `logdet_C_1`, ...).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{beta, rational_from_f64, rational_to_f64, ExcisionSpec, SurfaceSpec};

pub const LOG_2: &str = "log 2";
pub const LOG_PI: &str = "log pi";
pub const LOG_V: &str = "log V";
pub const LOG_BETA: &str = "log beta";
pub const LOGDET_M: &str = "logdet_M";

pub fn log_b(i: usize) -> String {
    format!("log b_{i}")
}

pub fn log_alpha(i: usize) -> String {
    format!("log alpha_{i}")
}

/// Symbol for log det of the unit cone C_{α_i,1}.
pub fn logdet_c(i: usize) -> String {
    format!("logdet_C_{i}")
}

/// Finite formal sum `Σ q_s · s` over named symbols, with rational `q_s`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<String, Rational64>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(symbol: impl Into<String>, coef: Rational64) -> Self {
        let mut f = Self::new();
        f.add(symbol, coef);
        f
    }

    pub fn add(&mut self, symbol: impl Into<String>, coef: Rational64) {
        let symbol = symbol.into();
        let c = self.terms.entry(symbol.clone()).or_insert_with(Rational64::zero);
        *c += coef;
        if c.is_zero() {
            self.terms.remove(&symbol);
        }
    }

    pub fn coefficient(&self, symbol: &str) -> Rational64 {
        self.terms.get(symbol).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, Rational64)> {
        self.terms.iter().map(|(s, c)| (s.as_str(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(mut self, other: &LinearForm) -> Self {
        for (s, c) in other.terms() {
            self.add(s, c);
        }
        self
    }

    pub fn scaled(mut self, q: Rational64) -> Self {
        if q.is_zero() {
            return Self::new();
        }
        for c in self.terms.values_mut() {
            *c *= q;
        }
        self
    }

    pub fn minus(self, other: &LinearForm) -> Self {
        self.plus(&other.clone().scaled(-Rational64::one()))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms().enumerate() {
            let sep = if i == 0 { "" } else { " + " };
            write!(f, "{sep}({c})·{s}")?;
        }
        Ok(())
    }
}

/// Unknown constants an expansion may depend on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolicConstants {
    pub logdet_m: f64,
    pub logdet_unit_cones: Vec<f64>,
}

impl SymbolicConstants {
    fn bind(&self, known: &mut BTreeMap<String, f64>) {
        known.insert(LOGDET_M.into(), self.logdet_m);
        for (i, &v) in self.logdet_unit_cones.iter().enumerate() {
            known.insert(logdet_c(i + 1), v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    /// Error is only known to vanish as ε → 0.
    Vanishing,
    /// Error bounded by `6 ε^{1/alpha}` for ε ≤ 2^{−alpha}.
    Bounded { alpha: f64 },
}

impl ErrorModel {
    pub fn bound(&self, eps: f64) -> Option<f64> {
        match *self {
            ErrorModel::Vanishing => None,
            ErrorModel::Bounded { alpha } => error_bound(eps, alpha).ok(),
        }
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorModel::Vanishing => write!(f, "o(1)"),
            ErrorModel::Bounded { alpha } => write!(f, "bounded-by-6eps^(1/{alpha})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub c_log_eps: Rational64,
    pub c_loglog: Rational64,
    pub c_const: LinearForm,
    /// Numerical values of the symbols that are known.
    pub known: BTreeMap<String, f64>,
    pub error_model: ErrorModel,
}

impl ExpansionReport {
    /// Sum of the constant's terms whose symbols have known values.
    pub fn c_const_known(&self) -> f64 {
        self.c_const
            .terms()
            .filter_map(|(s, c)| self.known.get(s).map(|v| rational_to_f64(&c) * v))
            .sum()
    }

    /// Coefficients of the symbols that still lack values.
    pub fn c_const_symbolic(&self) -> BTreeMap<String, f64> {
        self.c_const
            .terms()
            .filter(|(s, _)| !self.known.contains_key(*s))
            .map(|(s, c)| (s.to_string(), rational_to_f64(&c)))
            .collect()
    }

    /// Gives `symbol` a numerical value.
    pub fn bind(&mut self, symbol: impl Into<String>, value: f64) {
        self.known.insert(symbol.into(), value);
    }

    /// Supplies values for the unknown determinants.
    pub fn with_constants(mut self, constants: &SymbolicConstants) -> Result<Self> {
        let needed = self
            .c_const
            .terms()
            .filter(|(s, _)| s.starts_with("logdet_C_"))
            .count();
        if constants.logdet_unit_cones.len() < needed {
            return Err(Error::InvalidArgument(format!(
                "{} unit-cone determinants supplied, {} needed",
                constants.logdet_unit_cones.len(),
                needed
            )));
        }
        constants.bind(&mut self.known);
        Ok(self)
    }

    /// Value of the expansion (without error term) at `eps`.
    pub fn evaluate(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
        }
        let missing = self.c_const_symbolic();
        if !missing.is_empty() {
            let names: Vec<_> = missing.keys().cloned().collect();
            return Err(Error::InvalidArgument(format!("no values for {}", names.join(", "))));
        }
        let le = eps.ln();
        Ok(rational_to_f64(&self.c_log_eps) * le
            + rational_to_f64(&self.c_loglog) * (-le).ln()
            + self.c_const_known())
    }

    pub fn to_json(&self) -> Value {
        let terms: BTreeMap<&str, String> = self.c_const.terms().map(|(s, c)| (s, c.to_string())).collect();
        json!({
            "c_log_eps": self.c_log_eps.to_string(),
            "c_log_eps_value": rational_to_f64(&self.c_log_eps),
            "c_loglog": self.c_loglog.to_string(),
            "c_loglog_value": rational_to_f64(&self.c_loglog),
            "c_const_known": self.c_const_known(),
            "c_const_symbolic": self.c_const_symbolic(),
            "c_const_terms": terms,
            "error_model": self.error_model.to_string(),
        })
    }
}

fn exact(name: &str, x: f64) -> Result<Rational64> {
    rational_from_f64(x)
        .ok_or_else(|| Error::InvalidArgument(format!("{name} = {x} has no exact rational form")))
}

fn exact_alphas(excision: &ExcisionSpec) -> Result<Vec<Rational64>> {
    excision.alphas.iter().map(|&a| exact("alpha", a)).collect()
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// `(1/6)(α + 1/α)`, twice the ζ(0) of a cone of parameter α.
fn cone_weight(a: Rational64) -> Rational64 {
    (a + a.recip()) / r(6)
}

fn known_logs(excision: &ExcisionSpec, volume: Option<f64>) -> Result<BTreeMap<String, f64>> {
    let mut known = BTreeMap::new();
    known.insert(LOG_2.to_string(), std::f64::consts::LN_2);
    known.insert(LOG_PI.to_string(), std::f64::consts::PI.ln());
    for (i, (&a, &b)) in excision.alphas.iter().zip(&excision.bs).enumerate() {
        known.insert(log_alpha(i + 1), a.ln());
        known.insert(log_b(i + 1), b.ln());
    }
    known.insert(LOG_BETA.to_string(), beta(&excision.bs)?.ln());
    if let Some(v) = volume {
        known.insert(LOG_V.to_string(), v.ln());
    }
    Ok(known)
}

fn sharp_error_model(excision: &ExcisionSpec) -> ErrorModel {
    if excision.k() == 1 && excision.bs[0] == 1.0 {
        ErrorModel::Bounded { alpha: excision.alphas[0] }
    } else {
        ErrorModel::Vanishing
    }
}

/// Expansion of log det of the Neumann jump operator.
pub fn expansion_r(excision: &ExcisionSpec) -> Result<ExpansionReport> {
    let k = excision.k() as i64;
    let mut c = LinearForm::new();
    for i in 1..=excision.k() {
        c.add(LOG_PI, r(1));
        c.add(log_b(i), r(1));
        c.add(log_alpha(i), r(1));
    }
    c.add(LOG_BETA, r(-1));
    Ok(ExpansionReport {
        c_log_eps: r(1),
        c_loglog: r(1 - k),
        c_const: c,
        known: known_logs(excision, None)?,
        error_model: sharp_error_model(excision),
    })
}

fn check_surface(excision: &ExcisionSpec, surface: &SurfaceSpec) -> Result<BTreeMap<String, f64>> {
    let mut known = known_logs(excision, Some(surface.volume))?;
    if let Some(m) = surface.logdet_m {
        known.insert(LOGDET_M.into(), m);
    }
    Ok(known)
}

/// Expansion of log det of the Laplacian on the surface with k disks of
/// radius `b_i ε` removed around cone points of parameters `α_i`.
pub fn expansion_m_eps(excision: &ExcisionSpec, surface: &SurfaceSpec) -> Result<ExpansionReport> {
    let alphas = exact_alphas(excision)?;
    let k = excision.k() as i64;
    let weight: Rational64 = alphas.iter().map(|&a| cone_weight(a)).sum();
    let mut c = LinearForm::term(LOGDET_M, r(1));
    for (i, &a) in alphas.iter().enumerate() {
        c.add(logdet_c(i + 1), r(-1));
        c.add(log_b(i + 1), cone_weight(a));
    }
    c.add(LOG_2, r(k));
    c.add(LOG_V, r(-1));
    c.add(LOG_BETA, r(1));
    Ok(ExpansionReport {
        c_log_eps: r(k - 1) + weight,
        c_loglog: r(k - 1),
        c_const: c,
        known: check_surface(excision, surface)?,
        error_model: sharp_error_model(excision),
    })
}

/// The gluing identity solved for log det on the excised surface, with
/// log det R supplied as an expansion.
pub fn intermediate(
    excision: &ExcisionSpec,
    surface: &SurfaceSpec,
    logdet_r: &ExpansionReport,
) -> Result<ExpansionReport> {
    let alphas = exact_alphas(excision)?;
    let k = excision.k() as i64;
    let weight: Rational64 = alphas.iter().map(|&a| cone_weight(a)).sum();
    let mut c = LinearForm::term(LOGDET_M, r(1));
    for (i, &a) in alphas.iter().enumerate() {
        let i = i + 1;
        c.add(logdet_c(i), r(-1));
        c.add(log_b(i), cone_weight(a));
        // log(2π α_i b_i)
        c.add(LOG_2, r(1));
        c.add(LOG_PI, r(1));
        c.add(log_alpha(i), r(1));
        c.add(log_b(i), r(1));
    }
    c.add(LOG_V, r(-1));
    let mut known = check_surface(excision, surface)?;
    known.extend(logdet_r.known.iter().map(|(s, v)| (s.clone(), *v)));
    Ok(ExpansionReport {
        c_log_eps: r(k) + weight - logdet_r.c_log_eps,
        c_loglog: -logdet_r.c_loglog,
        c_const: c.minus(&logdet_r.c_const),
        known,
        error_model: logdet_r.error_model,
    })
}

/// Effect on an expansion of multiplying the metric by `ε^{-2}`,
/// for an operator whose ζ(0) is `zeta0`.
pub fn rescale_by_inverse_eps(report: &ExpansionReport, zeta0: Rational64) -> ExpansionReport {
    let mut out = report.clone();
    out.c_log_eps += r(2) * zeta0;
    out
}

fn khuri_checks(alphas: &[Rational64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("at least one cone point is required".into()));
    }
    if alphas.iter().any(|a| !a.is_positive()) {
        return Err(Error::InvalidArgument("cone parameters must be positive".into()));
    }
    Ok(())
}

/// Expansion for the truncated surface rescaled to unit boundary length
/// per circle, genus `p`, cone parameters `alphas`. Without a volume,
/// `log V` stays symbolic.
pub fn khuri_expansion(
    p: u32,
    alphas: &[Rational64],
    constants: Option<&SymbolicConstants>,
    volume: Option<f64>,
) -> Result<ExpansionReport> {
    khuri_checks(alphas)?;
    let n = alphas.len() as i64;
    let inv: Rational64 = alphas.iter().map(|a| a.recip()).sum();
    let mut c = LinearForm::term(LOGDET_M, r(1));
    for i in 1..=alphas.len() {
        c.add(logdet_c(i), r(-1));
    }
    c.add(LOG_2, r(n));
    c.add(LOG_V, r(-1));
    let mut known = BTreeMap::new();
    known.insert(LOG_2.to_string(), std::f64::consts::LN_2);
    if let Some(v) = volume {
        ensure_positive("volume", v)?;
        known.insert(LOG_V.to_string(), v.ln());
    }
    let error_model = if n == 1 {
        ErrorModel::Bounded { alpha: rational_to_f64(&alphas[0]) }
    } else {
        ErrorModel::Vanishing
    };
    let report = ExpansionReport {
        c_log_eps: (r(2 - 2 * p as i64 - n) + inv) / r(6),
        c_loglog: r(n - 1),
        c_const: c,
        known,
        error_model,
    };
    match constants {
        Some(k) => report.with_constants(k),
        None => Ok(report),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    ToMinusInfinity,
    ToPlusInfinity,
    Bounded,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Divergence::ToMinusInfinity => "to_minus_infinity",
            Divergence::ToPlusInfinity => "to_plus_infinity",
            Divergence::Bounded => "bounded",
        })
    }
}

/// Limit of the rescaled log determinant as ε → 0.
pub fn divergence_class(p: u32, alphas: &[Rational64]) -> Result<Divergence> {
    khuri_checks(alphas)?;
    let n = alphas.len() as i64;
    let inv: Rational64 = alphas.iter().map(|a| a.recip()).sum();
    let rhs = r(2 * p as i64 + n - 2);
    Ok(if inv > rhs {
        Divergence::ToMinusInfinity
    } else if inv < rhs || n >= 2 {
        Divergence::ToPlusInfinity
    } else {
        Divergence::Bounded
    })
}

/// The bound `6 ε^{1/α}` on the error of the one-circle expansions.
pub fn error_bound(eps: f64, alpha: f64) -> Result<f64> {
    ensure_positive("eps", eps)?;
    ensure_positive("alpha", alpha)?;
    let edge = (-alpha).exp2();
    if eps > edge {
        return Err(Error::OutOfRegime(format!(
            "eps = {eps} exceeds 2^(-alpha) = {edge}; the bound is not established there"
        )));
    }
    Ok(6.0 * eps.powf(1.0 / alpha))
}
