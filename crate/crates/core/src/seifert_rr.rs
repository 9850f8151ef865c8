//! Exact Seifert invariants, Chern numbers of line V-bundle powers and the
//! orbifold Riemann-Roch dimension count behind the minimizer verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeifertError {
    #[error("fiber ({a}, {b}) has gcd(a, b) != 1")]
    NotCoprimeFiber { a: i64, b: i64 },
    #[error("fiber multiplicity {a} must be positive")]
    BadMultiplicity { a: i64 },
    #[error("regular fiber (1, {b}) must have b = 0 after reduction")]
    BadRegularFiber { b: i64 },
    #[error("genus {0} is negative")]
    NegativeGenus(i64),
    #[error(
        "c1(L) = {0} is not negative; pass the Seifert invariants of the conjugate \
         Sasakian structure instead (orientation is not flipped automatically)"
    )]
    NonNegativeChern(Rational),
    #[error("exponent {0} must be a positive integer")]
    NonPositiveExponent(i64),
    #[error("deformation constant {0} must be positive")]
    NonPositiveDeformation(Rational),
    #[error("weights ({k}, {l}) must be coprime with 1 <= l <= k")]
    BadWeights { k: i64, l: i64 },
    #[error("inconsistent Seifert data: {0}")]
    Internal(String),
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn ceil(&self) -> i64 {
        *self.0.ceil().numer()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = SeifertError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeifertError::ParseRational(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(p, q))
            }
            None => t.parse().map(Rational::from_integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational(self.0.$f(rhs.0))
            }
        }
    };
}
rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// One exceptional fiber (multiplicity, invariant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub a: i64,
    pub b: i64,
}

/// Seifert invariants {deg, genus; (a_j, b_j)} of a quasi-regular Sasakian 3-manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertData {
    pub deg: i64,
    pub genus: i64,
    pub fibers: Vec<Fiber>,
}

impl SeifertData {
    pub fn new(deg: i64, genus: i64, fibers: &[(i64, i64)]) -> Self {
        SeifertData {
            deg,
            genus,
            fibers: fibers.iter().map(|&(a, b)| Fiber { a, b }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerData {
    pub exponent: i64,
    pub b_values: Vec<i64>,
    pub c1_power: Rational,
    pub deg_power: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Minimizer,
    Unstable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Minimizer => f.write_str("minimizer"),
            Status::Unstable => f.write_str("unstable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub mu1_d: i64,
    pub a0: Rational,
    pub a: Rational,
    pub status: Status,
    pub dims: BTreeMap<i64, i64>,
}

/// Reduces every b_j into [0, a_j), drops regular fibers and checks c1(L) < 0.
pub fn validate(data: &SeifertData) -> Result<SeifertData, SeifertError> {
    if data.genus < 0 {
        return Err(SeifertError::NegativeGenus(data.genus));
    }
    let mut fibers = Vec::with_capacity(data.fibers.len());
    for f in &data.fibers {
        if f.a < 1 {
            return Err(SeifertError::BadMultiplicity { a: f.a });
        }
        let b = f.b.mod_floor(&f.a);
        if f.a == 1 {
            if f.b != 0 {
                return Err(SeifertError::BadRegularFiber { b: f.b });
            }
            continue;
        }
        if f.a.gcd(&b) != 1 {
            return Err(SeifertError::NotCoprimeFiber { a: f.a, b: f.b });
        }
        fibers.push(Fiber { a: f.a, b });
    }
    let out = SeifertData {
        deg: data.deg,
        genus: data.genus,
        fibers,
    };
    let c1 = chern_number(&out);
    if !c1.is_negative() {
        return Err(SeifertError::NonNegativeChern(c1));
    }
    Ok(out)
}

/// c1(L) = deg + sum b_j / a_j.
pub fn chern_number(data: &SeifertData) -> Rational {
    data.fibers
        .iter()
        .fold(Rational::from_integer(data.deg), |acc, f| {
            acc + Rational::new(f.b, f.a)
        })
}

/// b_j(L^mu) via the additive recurrence b(L^j) = b(L^{j-1}) + b(L) mod a.
pub fn power_b_recurrence(fiber: &Fiber, mu: i64) -> i64 {
    let mut b = 0;
    for _ in 0..mu {
        b = (b + fiber.b).mod_floor(&fiber.a);
    }
    b
}

/// b_j(L^mu) in closed form.
pub fn power_b_closed(fiber: &Fiber, mu: i64) -> i64 {
    (mu * fiber.b).mod_floor(&fiber.a)
}

pub fn power_data(data: &SeifertData, mu: i64) -> Result<PowerData, SeifertError> {
    if mu <= 0 {
        return Err(SeifertError::NonPositiveExponent(mu));
    }
    let b_values: Vec<i64> = data
        .fibers
        .iter()
        .map(|f| power_b_recurrence(f, mu))
        .collect();
    let c1_power = Rational::from_integer(mu) * chern_number(data);
    let frac = fractional_sum(data, &b_values);
    let deg = c1_power - frac;
    if !deg.is_integer() {
        return Err(SeifertError::Internal(format!(
            "deg L^{mu} = {deg} is not an integer"
        )));
    }
    Ok(PowerData {
        exponent: mu,
        b_values,
        c1_power,
        deg_power: deg.numer(),
    })
}

fn fractional_sum(data: &SeifertData, b_values: &[i64]) -> Rational {
    data.fibers
        .iter()
        .zip(b_values)
        .fold(Rational::from_integer(0), |acc, (f, &b)| {
            acc + Rational::new(b, f.a)
        })
}

/// dim H^1(Sigma, O(L^mu)) = -1 + g - mu c1(L) + sum b_j(L^mu)/a_j.
pub fn dim_h1(data: &SeifertData, mu: i64) -> Result<i64, SeifertError> {
    let pd = power_data(data, mu)?;
    let dim =
        Rational::from_integer(data.genus - 1) - pd.c1_power + fractional_sum(data, &pd.b_values);
    if !dim.is_integer() || dim.is_negative() {
        return Err(SeifertError::Internal(format!(
            "dim H^1 for mu = {mu} evaluates to {dim}"
        )));
    }
    Ok(dim.numer())
}

/// Upper end of the search for the first mu with a nonzero H^1.
pub fn mu_search_bound(data: &SeifertData) -> i64 {
    let c1 = chern_number(data);
    let ratio = Rational::from_integer(2 - data.genus) / (-c1);
    (ratio.ceil() + 1).max(1)
}

/// Smallest mu >= 1 with dim H^1(O(L^mu)) >= 1.
pub fn mu1_d(data: &SeifertData) -> Result<i64, SeifertError> {
    let bound = mu_search_bound(data);
    for mu in 1..=bound {
        if dim_h1(data, mu)? >= 1 {
            return Ok(mu);
        }
    }
    Err(SeifertError::Internal(format!(
        "no mu <= {bound} has dim H^1 >= 1"
    )))
}

/// Minimizer iff a <= mu1_D / 2, compared exactly.
pub fn verdict(data: &SeifertData, a: Rational) -> Result<Verdict, SeifertError> {
    if !a.is_positive() {
        return Err(SeifertError::NonPositiveDeformation(a));
    }
    let mu1 = mu1_d(data)?;
    let a0 = Rational::new(mu1, 2);
    let mut dims = BTreeMap::new();
    for mu in 1..=mu1 + 3 {
        dims.insert(mu, dim_h1(data, mu)?);
    }
    let status = if a <= a0 {
        Status::Minimizer
    } else {
        Status::Unstable
    };
    Ok(Verdict {
        mu1_d: mu1,
        a0,
        a,
        status,
        dims,
    })
}

/// Solves l x + k y = 1 with 0 < x < k.
fn bezout_pair(k: i64, l: i64) -> (i64, i64) {
    let ext = l.extended_gcd(&k);
    let x = ext.x.mod_floor(&k);
    let y = (1 - l * x) / k;
    (x, y)
}

/// Seifert invariants of the weighted sphere fibration with weights (k, l).
pub fn weighted_seifert(k: i64, l: i64) -> Result<SeifertData, SeifertError> {
    if l < 1 || k < l || k.gcd(&l) != 1 {
        return Err(SeifertError::BadWeights { k, l });
    }
    if k == 1 {
        return Ok(SeifertData::new(-1, 0, &[]));
    }
    let (x, y) = bezout_pair(k, l);
    debug_assert!(0 < x && x < k && l * x + k * y == 1);
    let raw = SeifertData::new(-1, 0, &[(l, (-y).mod_floor(&l)), (k, k - x)]);
    let data = validate(&raw)?;
    let c1 = chern_number(&data);
    if c1 != Rational::new(-1, k * l) {
        return Err(SeifertError::Internal(format!(
            "weighted ({k}, {l}) data has c1 = {c1}"
        )));
    }
    Ok(data)
}

/// mu1_D >= min Scal / 4 + 1/2.
pub fn bochner_bound(min_scal: Rational, mu1_d: i64) -> bool {
    Rational::from_integer(mu1_d) >= min_scal / Rational::from_integer(4) + Rational::new(1, 2)
}

/// Exact minimum of the scalar curvature on the weighted sphere: 8(2l - k) - 2.
pub fn weighted_min_scal(k: i64, l: i64) -> Rational {
    Rational::from_integer(8 * (2 * l - k) - 2)
}
