//! Exhaustive search for orbifold signatures with a prescribed fraction.
//!
//! Cone-order multisets are walked in non-decreasing order, so every
//! signature is produced exactly once. For fixed `(g, n)` the interval of
//! reachable cone sums `Σ(1 − 1/ν_j)` is tracked along the walk and used to
//! cut the loops early.

use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbifold::{covering_genus, GeometryClass, OrbifoldSignature};
use crate::rational::Rational;
use crate::tables;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_genus: u32,
    pub max_cone_points: u32,
    pub max_cone_order: u32,
}

impl Default for SearchBounds {
    /// `(4, 8, 100)`.
    fn default() -> Self {
        SearchBounds {
            max_genus: 4,
            max_cone_points: 8,
            max_cone_order: 100,
        }
    }
}

impl SearchBounds {
    pub fn new(max_genus: u32, max_cone_points: u32, max_cone_order: u32) -> Self {
        SearchBounds {
            max_genus,
            max_cone_points,
            max_cone_order,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_cone_points > 0 && self.max_cone_order < 2 {
            return Err(Error::Precondition(format!(
                "max cone order must be at least 2 when cone points are allowed, got {}",
                self.max_cone_order
            )));
        }
        Ok(())
    }
}

/// Sort key `(g, n, orders)`.
fn sig_key(s: &OrbifoldSignature) -> (u32, usize, Vec<u32>) {
    (s.genus(), s.cone_points(), s.cone_orders().to_vec())
}

pub(crate) fn sort_signatures(v: &mut [OrbifoldSignature]) {
    v.sort_by_key(sig_key);
}

/// Window of admissible values for the cone sum `Σ(1 − 1/ν_j)`.
#[derive(Clone)]
struct Window {
    lo: Option<Rational>,
    lo_strict: bool,
    hi: Option<Rational>,
}

impl Window {
    fn admits(&self, x: &Rational) -> bool {
        let above = match &self.lo {
            None => true,
            Some(lo) if self.lo_strict => x > lo,
            Some(lo) => x >= lo,
        };
        above && self.hi.as_ref().is_none_or(|hi| x <= hi)
    }

    /// Could a value at most `x` still reach the window?
    fn reachable_from_below(&self, x: &Rational) -> bool {
        match &self.lo {
            None => true,
            Some(lo) if self.lo_strict => x > lo,
            Some(lo) => x >= lo,
        }
    }

    fn exact(&self) -> Option<&Rational> {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) if lo == hi && !self.lo_strict => Some(lo),
            _ => None,
        }
    }
}

fn contribution(order: u32) -> Rational {
    Rational::new(order as i64 - 1, order as i64)
}

/// Walks non-decreasing cone-order sequences of length `remaining` with
/// entries in `[min_order, max_order]` whose total (added to `partial`)
/// lands in `window`.
fn walk(
    prefix: &mut Vec<u32>,
    partial: &Rational,
    remaining: u32,
    min_order: u32,
    max_order: u32,
    window: &Window,
    out: &mut Vec<Vec<u32>>,
) {
    if remaining == 0 {
        if window.admits(partial) {
            out.push(prefix.clone());
        }
        return;
    }
    if remaining == 1 {
        if let Some(target) = window.exact() {
            // Solve 1 − 1/ν = target − partial directly.
            let need = target - partial;
            let gap = Rational::one() - need;
            if gap.is_positive() {
                let order = gap.recip();
                if let Some(v) = order.to_i64() {
                    if v >= min_order as i64 && v <= max_order as i64 {
                        prefix.push(v as u32);
                        out.push(prefix.clone());
                        prefix.pop();
                    }
                }
            }
            return;
        }
    }
    let rest = Rational::from_integer(remaining as i64 - 1);
    let top = contribution(max_order);
    let rest_max = &rest * &top;
    for order in min_order..=max_order {
        let c = contribution(order);
        let with_this = partial + &c;
        // Smallest total reachable from here: all remaining entries equal `order`.
        let floor = &with_this + &(&rest * &c);
        if let Some(hi) = &window.hi {
            if &floor > hi {
                break;
            }
        }
        // Largest total reachable: all remaining entries at the maximum order.
        let ceiling = &with_this + &rest_max;
        if !window.reachable_from_below(&ceiling) {
            continue;
        }
        prefix.push(order);
        walk(prefix, &with_this, remaining - 1, order, max_order, window, out);
        prefix.pop();
    }
}

/// All signatures within `bounds` whose fraction `φ` satisfies the given
/// bounds (`lo` exclusive when `lo_strict`). Sorted by `(g, n, orders)`.
pub fn enumerate_range(
    lo: Option<&Rational>,
    lo_strict: bool,
    hi: Option<&Rational>,
    bounds: &SearchBounds,
) -> Result<Vec<OrbifoldSignature>> {
    bounds.validate()?;
    let cells: Vec<(u32, u32)> = (0..=bounds.max_genus)
        .flat_map(|g| (0..=bounds.max_cone_points).map(move |n| (g, n)))
        .collect();
    let per_cell: Vec<Vec<OrbifoldSignature>> = cells
        .par_iter()
        .map(|&(g, n)| {
            // φ = 2g − 2 + S, so the cone sum S must lie in [lo + 2 − 2g, hi + 2 − 2g].
            let shift = Rational::from_integer(2 - 2 * g as i64);
            let window = Window {
                lo: lo.map(|l| l + &shift),
                lo_strict,
                hi: hi.map(|h| h + &shift),
            };
            let mut raw = Vec::new();
            if n == 0 {
                if window.admits(&Rational::zero()) {
                    raw.push(Vec::new());
                }
            } else if bounds.max_cone_order >= 2 {
                walk(
                    &mut Vec::with_capacity(n as usize),
                    &Rational::zero(),
                    n,
                    2,
                    bounds.max_cone_order,
                    &window,
                    &mut raw,
                );
            }
            raw.into_iter()
                .map(|orders| OrbifoldSignature::new(g, orders).expect("orders are at least 2"))
                .collect()
        })
        .collect();
    let mut all: Vec<OrbifoldSignature> = per_cell.into_iter().flatten().collect();
    sort_signatures(&mut all);
    Ok(all)
}

/// Every signature within `bounds` with `−χ_orb = phi` exactly.
pub fn enumerate_signatures(phi: &Rational, bounds: &SearchBounds) -> Result<Vec<OrbifoldSignature>> {
    enumerate_range(Some(phi), false, Some(phi), bounds)
}

/// All hyperbolic fractions reachable within `bounds`, with their signatures.
pub fn fractions_up_to(bounds: &SearchBounds) -> Result<BTreeMap<Rational, Vec<OrbifoldSignature>>> {
    fractions_in_range(&Rational::zero(), None, bounds)
}

/// Hyperbolic fractions `lo < φ ≤ hi` (no upper limit when `hi` is `None`).
pub fn fractions_in_range(
    lo: &Rational,
    hi: Option<&Rational>,
    bounds: &SearchBounds,
) -> Result<BTreeMap<Rational, Vec<OrbifoldSignature>>> {
    let mut map: BTreeMap<Rational, Vec<OrbifoldSignature>> = BTreeMap::new();
    for s in enumerate_range(Some(lo), true, hi, bounds)? {
        map.entry(s.phi()).or_default().push(s);
    }
    Ok(map)
}

/// `g'` when the covering genus for this group order is a non-negative
/// integer, `None` otherwise. No claim is made that such an action exists.
pub fn riemann_hurwitz_consistent(sig: &OrbifoldSignature, group_order: u64) -> Option<u64> {
    let g = covering_genus(sig, group_order);
    if g.is_integer() && !g.is_negative() {
        g.to_i64().map(|v| v as u64)
    } else {
        None
    }
}

/// Least common multiple of the cone orders; any deck group order must be a
/// multiple of it.
pub fn cone_order_lcm(sig: &OrbifoldSignature) -> u64 {
    sig.cone_orders()
        .iter()
        .fold(1u64, |acc, &v| acc.lcm(&(v as u64)))
}

/// Group orders `#G` (multiples of the cone-order lcm) giving an integral
/// covering genus `g'` with `max(g, 2) ≤ g' ≤ max_cover_genus`.
pub fn consistent_covers(sig: &OrbifoldSignature, max_cover_genus: u64) -> Vec<CoverCandidate> {
    let mut out = Vec::new();
    if sig.geometry() != GeometryClass::Hyperbolic {
        return out;
    }
    let step = cone_order_lcm(sig);
    let floor = (sig.genus() as u64).max(2);
    let mut order = step;
    loop {
        let g = covering_genus(sig, order);
        if g > Rational::from_integer(max_cover_genus as i64) {
            break;
        }
        if let Some(gp) = riemann_hurwitz_consistent(sig, order) {
            if gp >= floor {
                out.push(CoverCandidate {
                    group_order: order,
                    cover_genus: gp,
                });
            }
        }
        order += step;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCandidate {
    pub group_order: u64,
    pub cover_genus: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionMatch {
    pub signature: OrbifoldSignature,
    pub geometry: GeometryClass,
    pub covers: Vec<CoverCandidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionReport {
    pub phi: Rational,
    pub bounds: SearchBounds,
    pub matches: Vec<FractionMatch>,
    /// Set when the comparison table lists this fraction without a genus-0/1
    /// signature although the arithmetic admits candidates.
    pub annotation: Option<String>,
}

/// Covers are listed up to this genus in reports.
pub const REPORT_COVER_GENUS: u64 = 3;

pub fn fraction_report(phi: &Rational, bounds: &SearchBounds) -> Result<FractionReport> {
    let matches = enumerate_signatures(phi, bounds)?
        .into_iter()
        .map(|s| FractionMatch {
            geometry: s.geometry(),
            covers: consistent_covers(&s, REPORT_COVER_GENUS),
            signature: s,
        })
        .collect::<Vec<_>>();
    let annotation = tables::EXPERIMENTAL
        .iter()
        .find(|row| row.signature.is_none() && &row.fraction() == phi)
        .map(|_| {
            let low: Vec<String> = matches
                .iter()
                .filter(|m| m.signature.genus() <= 1)
                .map(|m| m.signature.to_string())
                .collect();
            format!(
                "listed as unmatched (???) in the genus 0/1 comparison table; \
                 arithmetic candidates with g <= 1: [{}]",
                low.join(", ")
            )
        });
    Ok(FractionReport {
        phi: phi.clone(),
        bounds: *bounds,
        matches,
        annotation,
    })
}
