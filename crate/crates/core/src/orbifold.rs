//! Orbifold signatures and the exact invariants attached to them.
//!
//! A signature `(g; ν_1, …, ν_n)` describes a closed oriented surface of
//! genus `g` with `n` cone points of angles `2π/ν_j`. Everything here is
//! exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A canonical orbifold signature: cone orders are each at least 2 and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSignature")]
pub struct OrbifoldSignature {
    genus: u32,
    cone_orders: Vec<u32>,
}

#[derive(Deserialize)]
struct RawSignature {
    genus: u32,
    #[serde(default)]
    cone_orders: Vec<u32>,
}

impl TryFrom<RawSignature> for OrbifoldSignature {
    type Error = Error;

    fn try_from(raw: RawSignature) -> Result<Self> {
        OrbifoldSignature::new(raw.genus, raw.cone_orders)
    }
}

impl OrbifoldSignature {
    /// Builds a signature, sorting the cone orders. Orders below 2 are
    /// rejected rather than dropped.
    pub fn new(genus: u32, mut cone_orders: Vec<u32>) -> Result<Self> {
        if let Some(bad) = cone_orders.iter().find(|&&v| v < 2) {
            return Err(Error::InvalidSignature(format!(
                "cone order {bad} is not at least 2"
            )));
        }
        cone_orders.sort_unstable();
        Ok(OrbifoldSignature { genus, cone_orders })
    }

    /// A smooth closed surface of the given genus.
    pub fn smooth(genus: u32) -> Self {
        OrbifoldSignature {
            genus,
            cone_orders: Vec::new(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn cone_orders(&self) -> &[u32] {
        &self.cone_orders
    }

    pub fn cone_points(&self) -> usize {
        self.cone_orders.len()
    }

    pub fn is_smooth(&self) -> bool {
        self.cone_orders.is_empty()
    }

    /// `ν = Σ_j 1/ν_j`.
    pub fn reciprocal_sum(&self) -> Rational {
        self.cone_orders
            .iter()
            .fold(Rational::zero(), |acc, &v| acc + Rational::new(1, v as i64))
    }

    /// Orbifold Euler characteristic `2 − 2g − Σ_j (1 − 1/ν_j)`.
    pub fn euler_characteristic(&self) -> Rational {
        let n = self.cone_orders.len() as i64;
        Rational::from_integer(2 - 2 * self.genus as i64 - n) + self.reciprocal_sum()
    }

    /// `φ = −χ_orb`, the fraction carried by the Hall conductance plateaux.
    pub fn phi(&self) -> Rational {
        -self.euler_characteristic()
    }

    pub fn geometry(&self) -> GeometryClass {
        GeometryClass::from_euler_characteristic(&self.euler_characteristic())
    }

    /// Hyperbolic area `2π|χ_orb|` (orbifold Gauss–Bonnet).
    pub fn hyperbolic_area(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.euler_characteristic().to_f64().abs()
    }
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.genus)?;
        for (i, v) in self.cone_orders.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for OrbifoldSignature {
    type Err = Error;

    /// Parses `(g;n1,n2,...)`. The cone list may be empty: `(2;)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("bad signature {s:?}: {why}"));
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| bad("expected (g;n1,n2,...)"))?;
        let (g, rest) = body.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let genus: u32 = g.trim().parse().map_err(|_| bad("genus is not a non-negative integer"))?;
        let rest = rest.trim();
        let cone_orders = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad("cone order is not an integer")))
                .collect::<Result<Vec<_>>>()?
        };
        OrbifoldSignature::new(genus, cone_orders)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryClass {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl GeometryClass {
    pub fn from_euler_characteristic(chi: &Rational) -> Self {
        match chi.signum() {
            1 => GeometryClass::Spherical,
            0 => GeometryClass::Euclidean,
            _ => GeometryClass::Hyperbolic,
        }
    }
}

impl fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryClass::Spherical => "Spherical",
            GeometryClass::Euclidean => "Euclidean",
            GeometryClass::Hyperbolic => "Hyperbolic",
        })
    }
}

pub fn euler_characteristic(sig: &OrbifoldSignature) -> Rational {
    sig.euler_characteristic()
}

pub fn classify_geometry(sig: &OrbifoldSignature) -> GeometryClass {
    sig.geometry()
}

/// Genus `g' = 1 + (#G/2)(2(g−1) + (n − ν))` of a smooth surface covering
/// `sig` with deck group of order `group_order`. Non-integral values mean the
/// cover cannot exist.
pub fn covering_genus(sig: &OrbifoldSignature, group_order: u64) -> Rational {
    assert!(group_order >= 1, "group order must be positive");
    let order = Rational::from_big(BigInt::from(group_order), BigInt::from(1)).expect("nonzero");
    Rational::one() + order * sig.phi() * Rational::new(1, 2)
}

/// Hurwitz data for a smooth surface of genus `g' ≥ 2`: the largest possible
/// automorphism group order `84(g'−1)` and the resulting smallest fraction.
pub fn hurwitz_data(g_prime: u64) -> Result<(u64, Rational)> {
    if g_prime < 2 {
        return Err(Error::Precondition(format!(
            "Hurwitz bound needs genus at least 2, got {g_prime}"
        )));
    }
    let max_order = 84 * (g_prime - 1);
    let min_fraction = Rational::new(2 * (g_prime as i64 - 1), max_order as i64);
    Ok((max_order, min_fraction))
}

/// An abelian group `ℤ^rank ⊕ ⊕_k ℤ_{t_k}` (or its ℝ / U(1) analogue).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: u32,
    pub torsion: Vec<u32>,
}

impl AbelianGroup {
    fn new(free_rank: u32, torsion: Vec<u32>) -> Self {
        AbelianGroup { free_rank, torsion }
    }

    /// Renders with the given symbol for the free part (`Z`, `R`, `U(1)`).
    pub fn render(&self, free_symbol: &str) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push(free_symbol.to_string()),
            r => parts.push(format!("{free_symbol}^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z_{t}")));
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyDegree {
    pub degree: u32,
    pub integral: AbelianGroup,
    pub real_dim: u32,
    /// `None` where no value is tabulated (degree 3).
    pub circle: Option<AbelianGroup>,
}

/// Cohomology of the Fuchsian group of a signature with ℤ, ℝ and U(1)
/// coefficients in degrees 0 through 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologySummary {
    pub signature: OrbifoldSignature,
    pub degrees: Vec<CohomologyDegree>,
}

pub fn cohomology_summary(sig: &OrbifoldSignature) -> CohomologySummary {
    let g2 = 2 * sig.genus();
    let tors = sig.cone_orders().to_vec();
    let degrees = vec![
        CohomologyDegree {
            degree: 0,
            integral: AbelianGroup::new(1, vec![]),
            real_dim: 1,
            circle: Some(AbelianGroup::new(1, vec![])),
        },
        CohomologyDegree {
            degree: 1,
            integral: AbelianGroup::new(g2, vec![]),
            real_dim: g2,
            circle: Some(AbelianGroup::new(g2, tors.clone())),
        },
        CohomologyDegree {
            degree: 2,
            integral: AbelianGroup::new(1, tors.clone()),
            real_dim: 1,
            circle: Some(AbelianGroup::new(1, tors.clone())),
        },
        CohomologyDegree {
            degree: 3,
            integral: AbelianGroup::new(0, tors),
            real_dim: 0,
            circle: None,
        },
    ];
    CohomologySummary {
        signature: sig.clone(),
        degrees,
    }
}

impl fmt::Display for CohomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "j | H^j(G,Z) | H^j(G,R) | H^j(G,U(1))")?;
        for d in &self.degrees {
            let real = AbelianGroup::new(d.real_dim, vec![]).render("R");
            let circle = d
                .circle
                .as_ref()
                .map(|c| c.render("U(1)"))
                .unwrap_or_else(|| "-".to_string());
            writeln!(
                f,
                "{} | {} | {} | {}",
                d.degree,
                d.integral.render("Z"),
                real,
                circle
            )?;
        }
        Ok(())
    }
}
