//! Fuchsian groups as matrix groups, and finite Cayley balls.
//!
//! Every construction places a fundamental polygon around the disk center
//! `o`, so no generator fixes the base point. Side-pairing generators are
//! assigned names and orientations by checking the long relation
//! `Π[A_j, B_j] Π C_i = ±I` numerically.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{HPoint, MoebiusTransform};
use crate::orbifold::{GeometryClass, OrbifoldSignature};

/// Tolerance for `C^ν = ±I`.
pub const CONE_RELATION_TOL: f64 = 1e-8;
/// Tolerance for the long relation.
pub const LONG_RELATION_TOL: f64 = 1e-6;
/// Largest ball radius accepted; entries grow like `e^{cR}`.
pub const MAX_RADIUS: usize = 8;
/// Cell size of the matrix hash.
pub const HASH_QUANTUM: f64 = 1e-6;
/// Two matrices in the same hash cell must agree this closely.
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub matrix: MoebiusTransform,
    /// Order of an elliptic generator.
    pub order: Option<u32>,
}

/// One entry of the symmetric generating set `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub name: String,
    pub generator: usize,
    /// `+1` or `−1`; an involution appears once, with exponent `+1`.
    pub exponent: i32,
    pub matrix: MoebiusTransform,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub signature: OrbifoldSignature,
    /// `A_1..A_g, B_1..B_g, C_1..C_n` in this order.
    pub generators: Vec<Generator>,
    /// `S`, ordered `A_1, A_1⁻¹, …, B_g⁻¹, C_1, C_1⁻¹, …`.
    pub letters: Vec<Letter>,
    /// Relators as words in `S`: the cone relations, then the long relation.
    pub relators: Vec<Vec<usize>>,
    /// Vertices of the fundamental polygon used in the construction.
    pub polygon: Vec<HPoint>,
}

impl GroupPresentation {
    fn assemble(
        signature: OrbifoldSignature,
        handles: &[(MoebiusTransform, MoebiusTransform)],
        cones: &[MoebiusTransform],
        polygon: Vec<HPoint>,
    ) -> Result<Self> {
        let g = handles.len();
        let orders = signature.cone_orders().to_vec();
        let mut generators = Vec::with_capacity(2 * g + cones.len());
        for (j, (a, _)) in handles.iter().enumerate() {
            generators.push(Generator {
                name: format!("A{}", j + 1),
                matrix: *a,
                order: None,
            });
        }
        for (j, (_, b)) in handles.iter().enumerate() {
            generators.push(Generator {
                name: format!("B{}", j + 1),
                matrix: *b,
                order: None,
            });
        }
        for (i, c) in cones.iter().enumerate() {
            generators.push(Generator {
                name: format!("C{}", i + 1),
                matrix: *c,
                order: Some(orders[i]),
            });
        }

        let mut letters = Vec::new();
        let mut letter_of = vec![[usize::MAX; 2]; generators.len()];
        let mut push_pair = |k: usize, gen: &Generator, letters: &mut Vec<Letter>| {
            letter_of[k][0] = letters.len();
            letters.push(Letter {
                name: gen.name.clone(),
                generator: k,
                exponent: 1,
                matrix: gen.matrix,
            });
            if gen.order == Some(2) {
                letter_of[k][1] = letter_of[k][0];
            } else {
                letter_of[k][1] = letters.len();
                letters.push(Letter {
                    name: format!("{}^-1", gen.name),
                    generator: k,
                    exponent: -1,
                    matrix: gen.matrix.inverse(),
                });
            }
        };
        for j in 0..g {
            push_pair(j, &generators[j], &mut letters);
        }
        for j in 0..g {
            push_pair(g + j, &generators[g + j], &mut letters);
        }
        for i in 0..cones.len() {
            push_pair(2 * g + i, &generators[2 * g + i], &mut letters);
        }

        let mut relators = Vec::new();
        for (i, &nu) in orders.iter().enumerate() {
            relators.push(vec![letter_of[2 * g + i][0]; nu as usize]);
        }
        let mut long = Vec::new();
        for j in 0..g {
            let (a, b) = (letter_of[j], letter_of[g + j]);
            long.extend([a[0], b[0], a[1], b[1]]);
        }
        for i in 0..cones.len() {
            long.push(letter_of[2 * g + i][0]);
        }
        if !long.is_empty() {
            relators.push(long);
        }

        let group = GroupPresentation {
            signature,
            generators,
            letters,
            relators,
            polygon,
        };
        group.validate()?;
        Ok(group)
    }

    pub fn genus(&self) -> usize {
        self.signature.genus() as usize
    }

    pub fn word_matrix(&self, word: &[usize]) -> MoebiusTransform {
        word.iter()
            .fold(MoebiusTransform::identity(), |m, &s| m * self.letters[s].matrix)
    }

    pub fn word_names(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&s| self.letters[s].name.clone()).collect()
    }

    /// Distance of each relator product from `±I`, paired with its tolerance.
    pub fn relation_residuals(&self) -> Vec<(f64, f64)> {
        let n_cone = self.signature.cone_points();
        self.relators
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let tol = if k < n_cone { CONE_RELATION_TOL } else { LONG_RELATION_TOL };
                (self.word_matrix(w).distance_mod_sign(&MoebiusTransform::identity()), tol)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (k, (res, tol)) in self.relation_residuals().into_iter().enumerate() {
            if !(res <= tol) {
                return Err(Error::Construction(format!(
                    "relator {} = {:?} misses ±I by {res:.3e}",
                    k,
                    self.word_names(&self.relators[k])
                )));
            }
        }
        for gen in &self.generators {
            let p = gen.matrix.orbit_point()?;
            if p.z().norm() < 1e-9 {
                return Err(Error::Construction(format!("{} fixes the base point", gen.name)));
            }
        }
        Ok(())
    }

    /// Abelianization vector (length `2g`) of a single letter of `S`.
    pub fn letter_abelianization(&self, s: usize) -> Vec<i64> {
        let g = self.genus();
        let mut v = vec![0i64; 2 * g];
        let l = &self.letters[s];
        if l.generator < 2 * g {
            v[l.generator] = l.exponent as i64;
        }
        v
    }
}

/// Exponent sums of `A_j` (coordinates `0..g`) and `B_j` (`g..2g`) along a word.
pub fn abelianization_cocycle(word: &[usize], group: &GroupPresentation) -> Vec<i64> {
    let g = group.genus();
    let mut v = vec![0i64; 2 * g];
    for &s in word {
        let l = &group.letters[s];
        if l.generator < 2 * g {
            v[l.generator] += l.exponent as i64;
        }
    }
    v
}

/// Picks names and orientations for the side pairings so that the long
/// relation holds. Uniform choices are tried first.
fn name_pairings(
    signature: OrbifoldSignature,
    pairs: &[(MoebiusTransform, MoebiusTransform)],
    rotations: &[MoebiusTransform],
    polygon: Vec<HPoint>,
) -> Result<GroupPresentation> {
    let g = pairs.len();
    let n = rotations.len();
    let handle = |(t1, t2): (MoebiusTransform, MoebiusTransform), choice: usize| {
        let (mut a, mut b) = if choice & 4 != 0 { (t2, t1) } else { (t1, t2) };
        if choice & 1 != 0 {
            a = a.inverse();
        }
        if choice & 2 != 0 {
            b = b.inverse();
        }
        (a, b)
    };
    let build = |hc: &[usize], cc: &[bool], reverse: bool| {
        let mut handles: Vec<_> = pairs.iter().zip(hc).map(|(&p, &c)| handle(p, c)).collect();
        let mut cones: Vec<_> = rotations
            .iter()
            .zip(cc)
            .map(|(r, &inv)| if inv { r.inverse() } else { *r })
            .collect();
        if reverse {
            handles.reverse();
            cones.reverse();
        }
        (handles, cones)
    };
    let residual = |handles: &[(MoebiusTransform, MoebiusTransform)], cones: &[MoebiusTransform]| {
        let mut m = MoebiusTransform::identity();
        for (a, b) in handles {
            m = m * *a * *b * a.inverse() * b.inverse();
        }
        for c in cones {
            m = m * *c;
        }
        m.distance_mod_sign(&MoebiusTransform::identity())
    };

    let mut best = f64::INFINITY;
    for reverse in [false, true] {
        for hc in 0..8 {
            for inv in [false, true] {
                let (h, c) = build(&vec![hc; g], &vec![inv; n], reverse);
                let r = residual(&h, &c);
                best = best.min(r);
                if r <= LONG_RELATION_TOL {
                    return GroupPresentation::assemble(signature, &h, &c, polygon);
                }
            }
        }
    }
    // Mixed choices: exhaustive, small for the supported signatures.
    let total = 8usize.pow(g as u32) * (1usize << n);
    for reverse in [false, true] {
        for code in 0..total {
            let mut rest = code;
            let hc: Vec<usize> = (0..g)
                .map(|_| {
                    let c = rest % 8;
                    rest /= 8;
                    c
                })
                .collect();
            let cc: Vec<bool> = (0..n).map(|i| (rest >> i) & 1 == 1).collect();
            let (h, c) = build(&hc, &cc, reverse);
            let r = residual(&h, &c);
            best = best.min(r);
            if r <= LONG_RELATION_TOL {
                return GroupPresentation::assemble(signature, &h, &c, polygon);
            }
        }
    }
    Err(Error::Construction(format!(
        "no orientation of the side pairings satisfies the long relation (best residual {best:.3e})"
    )))
}

fn require_hyperbolic(sig: &OrbifoldSignature) -> Result<()> {
    if sig.geometry() != GeometryClass::Hyperbolic {
        return Err(Error::Precondition(format!(
            "signature {sig} is {}, not hyperbolic",
            sig.geometry()
        )));
    }
    Ok(())
}

fn geodesic_midpoint(p: HPoint, q: HPoint) -> HPoint {
    let m = MoebiusTransform::from_origin_to(p);
    let q0 = m.inverse().apply_raw(q.z());
    let half = (q0.norm().atanh() / 2.0).tanh();
    HPoint::new(m.apply_raw(q0 / q0.norm() * half)).expect("midpoint of disk points lies in the disk")
}

/// The `(p, q, r)` triangle group, generated by rotations through `2π/p`,
/// `2π/q`, `2π/r` about the vertices of the `(π/p, π/q, π/r)` triangle.
pub fn triangle_group(p: u32, q: u32, r: u32) -> Result<GroupPresentation> {
    let mut orders = [p, q, r];
    orders.sort_unstable();
    let [p, q, r] = orders;
    let sig = OrbifoldSignature::new(0, vec![p, q, r])?;
    require_hyperbolic(&sig)?;
    let (al, be, ga) = (PI / p as f64, PI / q as f64, PI / r as f64);
    // Side lengths from the angle form of the law of cosines.
    let c = ((al.cos() * be.cos() + ga.cos()) / (al.sin() * be.sin())).acosh();
    let b = ((al.cos() * ga.cos() + be.cos()) / (al.sin() * ga.sin())).acosh();
    let vp = HPoint::origin();
    let vq = HPoint::polar(c, 0.0)?;
    let vr = HPoint::polar(b, al)?;

    // Base point: midpoint of the median from P, moved to the center.
    let base = geodesic_midpoint(vp, geodesic_midpoint(vq, vr));
    let shift = MoebiusTransform::from_origin_to(base);
    let recenter = shift.inverse();
    let verts: Vec<HPoint> = [vp, vq, vr]
        .iter()
        .map(|v| recenter.apply(*v))
        .collect::<Result<_>>()?;

    let angles = [2.0 * al, 2.0 * be, 2.0 * ga];
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let rot: Vec<MoebiusTransform> = verts
            .iter()
            .zip(angles)
            .map(|(v, a)| MoebiusTransform::rotation_about(*v, sign * a))
            .collect();
        let prod = rot[0] * rot[1] * rot[2];
        let res = prod.distance_mod_sign(&MoebiusTransform::identity());
        best = best.min(res);
        if res <= CONE_RELATION_TOL {
            return GroupPresentation::assemble(sig, &[], &rot, verts);
        }
    }
    Err(Error::Construction(format!(
        "rotation product misses the identity by {best:.3e}"
    )))
}

/// The genus-`g` surface group from the regular `4g`-gon with vertex angle `2π/4g`.
pub fn surface_group(genus: u32) -> Result<GroupPresentation> {
    if genus < 2 {
        return Err(Error::Precondition(format!(
            "surface groups need genus >= 2, got {genus}"
        )));
    }
    let sides = 4 * genus as usize;
    let half = PI / sides as f64;
    let cot = 1.0 / half.tan();
    let apothem = cot.acosh();
    let circumradius = (cot * cot).acosh();
    let polygon: Vec<HPoint> = (0..sides)
        .map(|k| HPoint::polar(circumradius, (2 * k + 1) as f64 * half))
        .collect::<Result<_>>()?;
    let tau = {
        let t = (2.0 * apothem / 2.0).tanh();
        let s = 1.0 / (1.0 - t * t).sqrt();
        MoebiusTransform::from_disk_coefficients(
            num_complex::Complex64::new(s, 0.0),
            num_complex::Complex64::new(t * s, 0.0),
        )
    };
    let side_angle = |k: usize| 2.0 * half * k as f64;
    // Maps side `from` onto side `to`, carrying the polygon across `to`.
    let pairing = |from: usize, to: usize| {
        MoebiusTransform::rotation(side_angle(to)) * tau * MoebiusTransform::rotation(PI - side_angle(from))
    };
    let pairs: Vec<_> = (0..genus as usize)
        .map(|h| (pairing(4 * h + 2, 4 * h), pairing(4 * h + 3, 4 * h + 1)))
        .collect();
    let sig = OrbifoldSignature::smooth(genus);
    name_pairings(sig, &pairs, &[], polygon)
}

/// Geometry of the fan polygon at ordinary-vertex radius `rho`.
struct Fan {
    central: f64,
    /// Angle at an ordinary vertex inside one genus triangle.
    epsilon: f64,
    /// Angle at the ordinary vertex of each cone triangle.
    psi: Vec<f64>,
}

impl Fan {
    fn new(sides: usize, half_cone_angles: &[f64], rho: f64) -> Self {
        let a = 2.0 * PI / sides as f64;
        let epsilon = (1.0 / (rho.cosh() * (a / 2.0).tan())).atan();
        let p = a.sin() * rho.cosh();
        let q = a.cos();
        let delta = q.atan2(p);
        let norm = p.hypot(q);
        let psi = half_cone_angles
            .iter()
            .map(|v| delta + (v.cos() / norm).asin())
            .collect();
        Fan {
            central: a,
            epsilon,
            psi,
        }
    }

    /// Total angle at the single cycle of ordinary vertices.
    fn vertex_sum(&self, genus: usize) -> f64 {
        8.0 * genus as f64 * self.epsilon + 2.0 * self.psi.iter().sum::<f64>()
    }
}

/// A group of arbitrary hyperbolic signature, built from a polygon with
/// `4g + 2n` sides fanned about the center: each side subtends the same
/// central angle, ordinary vertices share one radius (found by bisection on
/// the vertex angle sum), and each cone vertex sits between two ordinary ones.
pub fn signature_group(sig: &OrbifoldSignature) -> Result<GroupPresentation> {
    require_hyperbolic(sig)?;
    let g = sig.genus() as usize;
    let n = sig.cone_points();
    let sides = 4 * g + 2 * n;
    let halves: Vec<f64> = sig.cone_orders().iter().map(|&v| PI / v as f64).collect();
    let excess = |rho: f64| Fan::new(sides, &halves, rho).vertex_sum(g) - 2.0 * PI;

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while excess(hi) > 0.0 {
        hi *= 2.0;
        if hi > 64.0 {
            return Err(Error::Construction(format!(
                "vertex-angle bisection found no bracket in [0, {hi}]"
            )));
        }
    }
    if !(excess(lo) > 0.0) {
        return Err(Error::Construction(format!(
            "vertex-angle bisection: no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let fan = Fan::new(sides, &halves, rho);

    let mut vertices = Vec::with_capacity(sides);
    for k in 0..sides {
        let angle = k as f64 * fan.central;
        let cone = (k > 4 * g && (k - 4 * g) % 2 == 1).then(|| (k - 4 * g - 1) / 2);
        let dist = match cone {
            None => rho,
            Some(i) => {
                let (a, psi, v) = (fan.central, fan.psi[i], halves[i]);
                ((psi.cos() + a.cos() * v.cos()) / (a.sin() * v.sin())).acosh()
            }
        };
        vertices.push(HPoint::polar(dist, angle)?);
    }
    let vertex = |k: usize| vertices[k % sides];
    let side = |k: usize| (vertex(k), vertex(k + 1));
    // Maps side t onto side s with reversed orientation.
    let pairing = |t: usize, s: usize| {
        let (t0, t1) = side(t);
        let (s0, s1) = side(s);
        MoebiusTransform::matching_segments(t0, t1, s1, s0)
    };
    let pairs: Vec<_> = (0..g)
        .map(|h| (pairing(4 * h + 2, 4 * h), pairing(4 * h + 3, 4 * h + 1)))
        .collect();
    let rotations: Vec<_> = (0..n)
        .map(|i| pairing(4 * g + 2 * i + 1, 4 * g + 2 * i))
        .collect();
    name_pairings(sig.clone(), &pairs, &rotations, vertices)
}

/// Dispatches to the dedicated constructions where they exist.
pub fn group_for(sig: &OrbifoldSignature) -> Result<GroupPresentation> {
    match (sig.genus(), sig.cone_orders()) {
        (0, [p, q, r]) => triangle_group(*p, *q, *r),
        (g, []) if g >= 2 => surface_group(g),
        _ => signature_group(sig),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupElement {
    pub matrix: MoebiusTransform,
    /// Lexicographically least geodesic word in `S`.
    pub word: Vec<usize>,
}

impl GroupElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

type Key = [i64; 4];

fn cell(x: f64) -> i64 {
    (x / HASH_QUANTUM).round() as i64
}

/// Hash cells that may hold a match for `m` (up to sign); coordinates close
/// to a cell boundary probe both neighbours.
fn candidate_keys(m: &MoebiusTransform) -> Vec<Key> {
    let mut keys = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let mut opts: Vec<Vec<i64>> = Vec::with_capacity(4);
        for e in m.entries() {
            let x = sign * e / HASH_QUANTUM;
            let k = x.round();
            let frac = x - k;
            let mut o = vec![k as i64];
            if frac.abs() > 0.5 - 1e-3 {
                o.push(k as i64 + frac.signum() as i64);
            }
            opts.push(o);
        }
        for &a in &opts[0] {
            for &b in &opts[1] {
                for &c in &opts[2] {
                    for &d in &opts[3] {
                        let key = [a, b, c, d];
                        if !keys.contains(&key) {
                            keys.push(key);
                        }
                    }
                }
            }
        }
    }
    keys
}

/// The ball of radius `R` in the word metric, with multiplication tables.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub group: GroupPresentation,
    pub radius: usize,
    pub elements: Vec<GroupElement>,
    /// `right[i][s]`: index of `x_i · s`, if inside the ball.
    pub right: Vec<Vec<Option<usize>>>,
    /// `left[i][s]`: index of `s · x_i`, if inside the ball.
    pub left: Vec<Vec<Option<usize>>>,
    pub inverse: Vec<usize>,
    /// Start of each sphere; `layer_start[k]..layer_start[k+1]` has length `k`.
    pub layer_start: Vec<usize>,
    abelian: Vec<Vec<i64>>,
    index: HashMap<Key, Vec<usize>>,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.elements[i].word.len()
    }

    pub fn matrix(&self, i: usize) -> &MoebiusTransform {
        &self.elements[i].matrix
    }

    pub fn generators(&self) -> usize {
        self.group.letters.len()
    }

    /// Index of the element with matrix `m`, if present.
    pub fn find(&self, m: &MoebiusTransform) -> Result<Option<usize>> {
        let mut found = None;
        for key in candidate_keys(m) {
            let Some(bucket) = self.index.get(&key) else { continue };
            for &i in bucket {
                let d = self.elements[i].matrix.distance_mod_sign(m);
                if d <= MATCH_TOL {
                    if found.is_some_and(|f| f != i) {
                        return Err(Error::HashCollision(format!(
                            "matrix {m} matches elements {} and {i}",
                            found.unwrap()
                        )));
                    }
                    found = Some(i);
                } else {
                    return Err(Error::HashCollision(format!(
                        "matrix {m} shares a hash cell with element {i} at distance {d:.3e}"
                    )));
                }
            }
        }
        Ok(found)
    }

    /// Index of `x_i x_j`, computed by walking the word of `x_j`.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        let mut cur = i;
        for &s in &self.elements[j].word {
            cur = self.right[cur][s]?;
        }
        Some(cur)
    }

    /// Abelianization vector `Ω(x_i)` of length `2g`.
    pub fn omega(&self, i: usize) -> &[i64] {
        &self.abelian[i]
    }

    pub fn export(&self) -> BallExport {
        BallExport {
            signature: self.group.signature.to_string(),
            radius: self.radius,
            generators: self.group.letters.iter().map(|l| l.name.clone()).collect(),
            elements: self
                .elements
                .iter()
                .map(|e| ExportedElement {
                    matrix: e.matrix.entries(),
                    word: e.word.clone(),
                })
                .collect(),
            right: self.right.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExportedElement {
    pub matrix: [f64; 4],
    pub word: Vec<usize>,
}

/// Reproducibility fixture for a ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallExport {
    pub signature: String,
    pub radius: usize,
    pub generators: Vec<String>,
    pub elements: Vec<ExportedElement>,
    pub right: Vec<Vec<Option<usize>>>,
}

/// Breadth-first ball of radius `R` with deduplication modulo sign.
pub fn cayley_ball(group: &GroupPresentation, radius: usize) -> Result<CayleyBall> {
    if radius > MAX_RADIUS {
        return Err(Error::Precondition(format!(
            "radius {radius} exceeds the double-precision limit {MAX_RADIUS}"
        )));
    }
    let ns = group.letters.len();
    let mut ball = CayleyBall {
        group: group.clone(),
        radius,
        elements: vec![GroupElement {
            matrix: MoebiusTransform::identity(),
            word: Vec::new(),
        }],
        right: Vec::new(),
        left: Vec::new(),
        inverse: Vec::new(),
        layer_start: vec![0, 1],
        abelian: Vec::new(),
        index: HashMap::new(),
    };
    ball.index
        .entry(MoebiusTransform::identity().entries().map(cell))
        .or_default()
        .push(0);

    for _ in 0..radius {
        let (from, to) = (ball.layer_start[ball.layer_start.len() - 2], ball.elements.len());
        for i in from..to {
            for s in 0..ns {
                let m = ball.elements[i].matrix * group.letters[s].matrix;
                if ball.find(&m)?.is_some() {
                    continue;
                }
                let mut word = ball.elements[i].word.clone();
                word.push(s);
                let idx = ball.elements.len();
                ball.elements.push(GroupElement { matrix: m, word });
                ball.index.entry(m.entries().map(cell)).or_default().push(idx);
            }
        }
        ball.layer_start.push(ball.elements.len());
        if ball.layer_start.len() == 3 && ball.len() != 1 + ns {
            return Err(Error::Construction(
                "two generators coincide or one is trivial".into(),
            ));
        }
    }

    let n = ball.elements.len();
    let mut right = vec![vec![None; ns]; n];
    let mut left = vec![vec![None; ns]; n];
    let mut inverse = vec![usize::MAX; n];
    for i in 0..n {
        let m = ball.elements[i].matrix;
        for s in 0..ns {
            let sm = group.letters[s].matrix;
            right[i][s] = ball.find(&(m * sm))?;
            left[i][s] = ball.find(&(sm * m))?;
        }
        inverse[i] = ball.find(&m.inverse())?.ok_or_else(|| {
            Error::Construction(format!("inverse of element {i} missing from the ball"))
        })?;
    }
    ball.abelian = ball
        .elements
        .iter()
        .map(|e| abelianization_cocycle(&e.word, group))
        .collect();
    ball.right = right;
    ball.left = left;
    ball.inverse = inverse;
    Ok(ball)
}

/// Smallest `C` with `|γ| ≤ C (d(γ·o, o) + 1)` over the ball.
pub fn word_metric_constant(ball: &CayleyBall) -> Result<f64> {
    let mut c = 0.0f64;
    for e in &ball.elements {
        let d = e.matrix.orbit_point()?.distance(&HPoint::origin());
        c = c.max(e.word.len() as f64 / (d + 1.0));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::triangle_area_signed;

    fn sig(s: &str) -> OrbifoldSignature {
        s.parse().unwrap()
    }

    fn traces(g: &GroupPresentation) -> Vec<f64> {
        let mut t: Vec<f64> = g.generators.iter().map(|x| x.matrix.trace().abs()).collect();
        t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        t
    }

    #[test]
    fn triangle_group_relations_and_area() {
        let g = triangle_group(2, 3, 7).unwrap();
        for (res, tol) in g.relation_residuals() {
            assert!(res <= tol.min(1e-8), "{res}");
        }
        let [a, b, c] = [g.polygon[0], g.polygon[1], g.polygon[2]];
        let area = triangle_area_signed(a, b, c).abs();
        assert!((area - PI / 42.0).abs() < 1e-10);
        assert!(triangle_group(2, 3, 5).is_err());
        assert!(triangle_group(2, 3, 6).is_err());
    }

    #[test]
    fn surface_group_genus_two() {
        let g = surface_group(2).unwrap();
        assert_eq!(g.letters.len(), 8);
        for gen in &g.generators {
            assert!(gen.matrix.trace().abs() > 2.0);
        }
        assert!(surface_group(1).is_err());
    }

    #[test]
    fn signature_group_matches_dedicated_constructions() {
        let fan = signature_group(&sig("(0;2,3,7)")).unwrap();
        let tri = triangle_group(2, 3, 7).unwrap();
        for (x, y) in traces(&fan).iter().zip(traces(&tri)) {
            assert!((x - y).abs() < 1e-9);
        }
        let fan = signature_group(&sig("(2;)")).unwrap();
        let reg = surface_group(2).unwrap();
        for (x, y) in traces(&fan).iter().zip(traces(&reg)) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn signature_group_various() {
        for s in ["(1;2,2)", "(1;3)", "(0;5,5,5)", "(0;2,2,2,3)", "(1;6,6,6)", "(3;)", "(2;2)"] {
            let sg = sig(s);
            let g = signature_group(&sg).unwrap();
            for (res, tol) in g.relation_residuals() {
                assert!(res <= tol, "{s}: {res}");
            }
            // Fan polygon area equals 2πφ.
            let poly = &g.polygon;
            let o = HPoint::origin();
            let area: f64 = (0..poly.len())
                .map(|k| triangle_area_signed(o, poly[k], poly[(k + 1) % poly.len()]))
                .sum();
            assert!((area - 2.0 * PI * sg.phi().to_f64()).abs() < 1e-9, "{s}: {area}");
        }
        assert!(signature_group(&sig("(0;2,3,6)")).is_err());
    }

    #[test]
    fn ball_counts() {
        let g = surface_group(2).unwrap();
        assert_eq!(cayley_ball(&g, 0).unwrap().len(), 1);
        assert_eq!(cayley_ball(&g, 1).unwrap().len(), 9);
        assert!(cayley_ball(&g, MAX_RADIUS + 1).is_err());
    }

    #[test]
    fn ball_words_reproduce_matrices() {
        let g = triangle_group(2, 3, 7).unwrap();
        let ball = cayley_ball(&g, 5).unwrap();
        for e in &ball.elements {
            assert!(g.word_matrix(&e.word).approx_eq(&e.matrix, 1e-8));
        }
        for i in 0..ball.len() {
            let j = ball.inverse[i];
            assert_eq!(ball.inverse[j], i);
            assert_eq!(ball.word_length(i), ball.word_length(j));
        }
    }

    #[test]
    fn abelianization_basics() {
        let g = surface_group(2).unwrap();
        assert_eq!(abelianization_cocycle(&[0], &g), vec![1, 0, 0, 0]);
        assert_eq!(abelianization_cocycle(&[4], &g), vec![0, 0, 1, 0]);
        for r in &g.relators {
            assert!(abelianization_cocycle(r, &g).iter().all(|&x| x == 0));
        }
        let t = triangle_group(2, 3, 7).unwrap();
        assert!(abelianization_cocycle(&[0, 1, 2], &t).is_empty());
    }
}
