//! Published fraction tables, kept verbatim as golden data.
//!
//! Rows are stored exactly as printed, including entries that do not survive
//! exact arithmetic; callers decide how to treat those.

use crate::orbifold::OrbifoldSignature;
use crate::rational::Rational;

/// One row of the comparison table between observed Hall fractions and
/// genus 0/1 orbifolds. `signature` is `None` for rows printed as `???`.
#[derive(Clone, Copy, Debug)]
pub struct ExperimentalRow {
    pub numer: i64,
    pub denom: i64,
    pub signature: Option<&'static str>,
}

impl ExperimentalRow {
    pub fn fraction(&self) -> Rational {
        Rational::new(self.numer, self.denom)
    }

    pub fn parsed_signature(&self) -> Option<OrbifoldSignature> {
        self.signature.map(|s| s.parse().expect("table signature parses"))
    }
}

const fn row(numer: i64, denom: i64, signature: Option<&'static str>) -> ExperimentalRow {
    ExperimentalRow {
        numer,
        denom,
        signature,
    }
}

pub const EXPERIMENTAL: [ExperimentalRow; 14] = [
    row(5, 3, Some("(1;6,6)")),
    row(4, 3, Some("(1;3,3)")),
    row(7, 5, Some("(0;5,5,10,10)")),
    row(4, 5, Some("(1;5)")),
    row(5, 7, Some("(0;7,14,14)")),
    row(2, 3, Some("(1;3)")),
    row(3, 5, Some("(0;5,10,10)")),
    row(4, 7, Some("(0;7,7,7)")),
    row(5, 9, None),
    row(4, 9, Some("(0;3,9,9)")),
    row(3, 7, None),
    row(2, 5, Some("(0;5,5,5)")),
    row(1, 3, Some("(0;3,6,6)")),
    row(5, 2, Some("(1;6,6,6)")),
];

/// A signature in the low-genus cover table. `both` marks entries realizable
/// as quotients of both genus-2 and genus-3 surfaces.
#[derive(Clone, Copy, Debug)]
pub struct CoverEntry {
    pub signature: &'static str,
    pub cover_genus: u64,
    pub both: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CoverRow {
    pub numer: i64,
    pub denom: i64,
    pub entries: &'static [CoverEntry],
}

impl CoverRow {
    pub fn fraction(&self) -> Rational {
        Rational::new(self.numer, self.denom)
    }
}

const fn e(signature: &'static str, cover_genus: u64, both: bool) -> CoverEntry {
    CoverEntry {
        signature,
        cover_genus,
        both,
    }
}

/// Orbifolds covered by genus 2 or genus 3 surfaces, grouped by fraction.
pub const LOW_GENUS: [CoverRow; 15] = [
    CoverRow {
        numer: 4,
        denom: 3,
        entries: &[e("(0;3,3,3,3,3)", 3, false), e("(1;3,3)", 3, false)],
    },
    CoverRow {
        numer: 2,
        denom: 3,
        entries: &[
            e("(0;3,3,3,3)", 2, false),
            e("(0;2,2,6,6)", 3, false),
            e("(0;2,3,3,6)", 3, false),
            e("(0;2,2,2,2,3)", 3, false),
            e("(1;3)", 3, false),
        ],
    },
    CoverRow {
        numer: 4,
        denom: 7,
        entries: &[e("(0;7,7,7)", 3, false)],
    },
    CoverRow {
        numer: 1,
        denom: 2,
        entries: &[
            e("(0;2,2,4,4)", 2, true),
            e("(0;2,2,2,2,2)", 2, true),
            e("(0;4,8,8)", 3, false),
            e("(1;2)", 3, false),
        ],
    },
    CoverRow {
        numer: 4,
        denom: 9,
        entries: &[e("(0;3,9,9)", 3, false)],
    },
    CoverRow {
        numer: 2,
        denom: 5,
        entries: &[e("(0;5,5,5)", 2, false)],
    },
    CoverRow {
        numer: 1,
        denom: 3,
        entries: &[
            e("(0;3,6,6)", 2, false),
            e("(0;2,2,3,3)", 2, true),
            e("(0;2,12,12)", 3, false),
            e("(0;3,4,12)", 3, false),
            e("(0;4,4,6)", 3, false),
            e("(0;2,2,2,6)", 3, false),
        ],
    },
    CoverRow {
        numer: 1,
        denom: 4,
        entries: &[
            e("(0;2,8,8)", 2, true),
            e("(0;4,4,4)", 2, true),
            e("(0;2,2,2,4)", 2, true),
        ],
    },
    CoverRow {
        numer: 1,
        denom: 5,
        entries: &[e("(0;2,5,10)", 2, false)],
    },
    CoverRow {
        numer: 4,
        denom: 21,
        entries: &[e("(0;3,7,7)", 3, false)],
    },
    CoverRow {
        numer: 1,
        denom: 6,
        entries: &[
            e("(0;3,4,4)", 2, true),
            e("(0;2,6,6)", 2, true),
            e("(0;2,2,2,3)", 2, true),
            e("(0;2,4,12)", 3, false),
            e("(0;3,3,6)", 3, false),
        ],
    },
    CoverRow {
        numer: 1,
        denom: 8,
        entries: &[e("(0;2,4,8)", 2, true)],
    },
    CoverRow {
        numer: 1,
        denom: 12,
        entries: &[e("(0;2,4,6)", 2, true), e("(0;3,3,4)", 2, true)],
    },
    CoverRow {
        numer: 1,
        denom: 24,
        entries: &[e("(0;2,3,8)", 2, true)],
    },
    CoverRow {
        numer: 1,
        denom: 42,
        entries: &[e("(0;2,3,7)", 3, false)],
    },
];
