//! Finite balls of the free group acting on itself or on a rotation orbit
//! of the sphere, with interior marking.

use std::collections::HashMap;

use serde::Serialize;

use super::rotation::{RationalRotation, RotationPair, SpherePoint};
use super::word::{words_up_to, FreeWord, LETTERS, MAX_PACKED};
use super::GeneratingSet;
use crate::error::{Error, Result};
use crate::layers::KeyedSpace;

pub(crate) const NO_POINT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    F2,
    Sphere,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f2" => Ok(WindowKind::F2),
            "sphere" => Ok(WindowKind::Sphere),
            _ => Err(Error::Parse(format!("unknown window kind {s:?} (expected f2 or sphere)"))),
        }
    }
}

#[derive(Clone, Debug)]
struct SphereData {
    pair: RotationPair,
    coords: Vec<SpherePoint>,
    by_coord: HashMap<SpherePoint, u32>,
}

/// Points are indexed in key order of their labelling words. For the free
/// group the label is the point itself; on the sphere it is the word that
/// carries the base point there.
#[derive(Clone, Debug)]
pub struct ActionWindow {
    kind: WindowKind,
    radius: usize,
    margin: usize,
    gens: GeneratingSet,
    codes: Vec<u64>,
    depth: Vec<u32>,
    index: HashMap<u64, u32>,
    sphere: Option<SphereData>,
}

#[derive(Serialize)]
pub struct PointJson {
    pub index: usize,
    pub word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<SpherePoint>,
    pub depth: u32,
    pub interior: bool,
}

/// Breadth-first ball of `radius` around `base` in the action graph of
/// `s`. `base` is ignored for the free group (always the identity) and
/// defaults to `(0, 1, 0)` on the sphere.
pub fn expand_window(
    kind: WindowKind,
    base: Option<SpherePoint>,
    s: &GeneratingSet,
    radius: usize,
    margin: usize,
) -> Result<ActionWindow> {
    if margin > radius {
        return Err(Error::BadWindow(format!("margin {margin} exceeds radius {radius}")));
    }
    if radius * s.max_len() > MAX_PACKED {
        return Err(Error::BadWindow(format!(
            "labels of length {} exceed the supported {MAX_PACKED}",
            radius * s.max_len()
        )));
    }
    let sphere_base = match kind {
        WindowKind::F2 => None,
        WindowKind::Sphere => {
            let b = base.unwrap_or_else(|| SpherePoint::from_integers([0, 1, 0], 1));
            if !b.is_unit() {
                return Err(Error::BadWindow(format!("base {b:?} is not a unit vector")));
            }
            Some(b)
        }
    };
    let pair = RotationPair::standard();
    let mats: Vec<RationalRotation> = s.elements().iter().map(|g| pair.eval(g)).collect();
    if let Some(b) = &sphere_base {
        for (g, m) in s.elements().iter().zip(&mats) {
            if !g.is_identity() && m.apply(b) == *b {
                return Err(Error::FixedBase(g.to_string()));
            }
        }
    }

    // breadth-first by label; the free group needs no coordinates
    let mut found: HashMap<u64, u32> = HashMap::new();
    let mut coord_seen: HashMap<SpherePoint, u64> = HashMap::new();
    let mut order: Vec<(u64, u32, Option<SpherePoint>)> = Vec::new();
    let id = FreeWord::identity();
    found.insert(id.pack().unwrap(), 0);
    if let Some(b) = &sphere_base {
        coord_seen.insert(b.clone(), id.pack().unwrap());
    }
    order.push((id.pack().unwrap(), 0, sphere_base.clone()));
    let mut start = 0;
    for d in 0..radius {
        let end = order.len();
        for i in start..end {
            let (code, _, coord) = order[i].clone();
            let w = FreeWord::unpack(code);
            for (g, m) in s.elements().iter().zip(&mats) {
                let gw = g.mul(&w);
                let c = gw.pack().expect("length checked");
                if found.contains_key(&c) {
                    continue;
                }
                let point = coord.as_ref().map(|p| m.apply(p));
                if let Some(p) = &point {
                    if let Some(&other) = coord_seen.get(p) {
                        return Err(Error::OrbitCollision(FreeWord::unpack(other).to_string(), gw.to_string()));
                    }
                    coord_seen.insert(p.clone(), c);
                }
                found.insert(c, d as u32 + 1);
                order.push((c, d as u32 + 1, point));
            }
        }
        start = end;
    }
    order.sort_by_key(|t| t.0);
    let codes: Vec<u64> = order.iter().map(|t| t.0).collect();
    let depth: Vec<u32> = order.iter().map(|t| t.1).collect();
    let index: HashMap<u64, u32> = codes.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
    let sphere = sphere_base.map(|_| {
        let coords: Vec<SpherePoint> = order.into_iter().map(|t| t.2.unwrap()).collect();
        let by_coord = coords.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        SphereData { pair, coords, by_coord }
    });
    Ok(ActionWindow {
        kind,
        radius,
        margin,
        gens: s.clone(),
        codes,
        depth,
        index,
        sphere,
    })
}

impl ActionWindow {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn word(&self, x: usize) -> FreeWord {
        FreeWord::unpack(self.codes[x])
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depth[x] as usize
    }

    pub fn coords(&self, x: usize) -> Option<&SpherePoint> {
        self.sphere.as_ref().map(|s| &s.coords[x])
    }

    pub fn index_of_word(&self, w: &FreeWord) -> Option<usize> {
        w.pack().and_then(|c| self.index.get(&c)).map(|&i| i as usize)
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.depth(x) + self.margin <= self.radius
    }

    /// Distance from `x` to the first depth outside the window.
    pub fn boundary_distance(&self, x: usize) -> usize {
        self.radius + 1 - self.depth(x)
    }

    /// `g·x`, if it lies in the window. On the sphere the image is found by
    /// its exact coordinates and must carry the label `g·word(x)`.
    pub fn act(&self, g: &FreeWord, x: usize) -> Result<Option<usize>> {
        match &self.sphere {
            None => Ok(self.index_of_word(&g.mul(&self.word(x)))),
            Some(sd) => self.act_sphere(sd, &sd.pair.eval(g), g, x),
        }
    }

    fn act_sphere(&self, sd: &SphereData, m: &RationalRotation, g: &FreeWord, x: usize) -> Result<Option<usize>> {
        let label = g.mul(&self.word(x));
        let by_label = self.index_of_word(&label);
        let by_coord = sd.by_coord.get(&m.apply(&sd.coords[x])).map(|&i| i as usize);
        match (by_label, by_coord) {
            (a, b) if a == b => Ok(a),
            (Some(a), None) | (None, Some(a)) => {
                Err(Error::OrbitCollision(label.to_string(), self.word(a).to_string()))
            }
            (Some(_), Some(b)) => Err(Error::OrbitCollision(label.to_string(), self.word(b).to_string())),
            (None, None) => unreachable!(),
        }
    }

    /// `table[i][x] = γ_i·x` or `NO_POINT`, for every element of `s`.
    pub(crate) fn action_table(&self, s: &GeneratingSet) -> Result<Vec<Vec<u32>>> {
        let mut table = Vec::with_capacity(s.len());
        for g in s.elements() {
            let row = match &self.sphere {
                None => (0..self.len())
                    .map(|x| self.index_of_word(&g.mul(&self.word(x))).map_or(NO_POINT, |i| i as u32))
                    .collect(),
                Some(sd) => {
                    let m = sd.pair.eval(g);
                    (0..self.len())
                        .map(|x| Ok(self.act_sphere(sd, &m, g, x)?.map_or(NO_POINT, |i| i as u32)))
                        .collect::<Result<Vec<u32>>>()?
                }
            };
            table.push(row);
        }
        Ok(table)
    }

    pub fn points_json(&self) -> Vec<PointJson> {
        (0..self.len())
            .map(|x| PointJson {
                index: x,
                word: self.word(x).to_string(),
                coords: self.coords(x).cloned(),
                depth: self.depth[x],
                interior: self.is_interior(x),
            })
            .collect()
    }
}

/// Windows are keyed spaces under the generator graph; index order is key
/// order.
impl KeyedSpace for ActionWindow {
    type Point = usize;

    fn contains(&self, p: &usize) -> bool {
        *p < self.len()
    }

    fn neighbors(&self, p: &usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .gens
            .elements()
            .iter()
            .filter(|g| !g.is_identity())
            .filter_map(|g| self.act(g, *p).ok().flatten())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn ball_inside(&self, p: &usize, r: u64) -> bool {
        self.depth[*p] as u64 + r <= self.radius as u64
    }

    fn label(&self, p: &usize) -> u64 {
        *p as u64
    }
}

/// The ball of `radius` around the identity of the free group under the
/// standard generators, never materialized.
#[derive(Clone, Copy, Debug)]
pub struct FreeBall {
    pub radius: usize,
}

impl KeyedSpace for FreeBall {
    type Point = FreeWord;

    fn contains(&self, p: &FreeWord) -> bool {
        p.len() <= self.radius
    }

    fn neighbors(&self, p: &FreeWord) -> Vec<FreeWord> {
        let mut out: Vec<FreeWord> = LETTERS.iter().map(|&l| p.prepend(l)).filter(|w| self.contains(w)).collect();
        out.sort();
        out
    }

    fn ball_inside(&self, p: &FreeWord, r: u64) -> bool {
        p.len() as u64 + r <= self.radius as u64
    }

    fn label(&self, p: &FreeWord) -> u64 {
        p.pack().unwrap_or(u64::MAX)
    }

    /// Smaller keys have length at most `|x|`, so only that ball is scanned.
    fn lesser_ball(&self, x: &FreeWord, r: u64) -> Vec<FreeWord> {
        let xi = x.inverse();
        words_up_to(x.len())
            .into_iter()
            .filter(|y| y < x && (y.mul(&xi).len() as u64) <= r)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::square_set;
    use crate::layers::{local_layer_membership, LayerSchedule, Membership};
    use crate::rational::int;

    #[test]
    fn window_sizes() {
        let s = GeneratingSet::standard();
        assert_eq!(expand_window(WindowKind::F2, None, &s, 2, 0).unwrap().len(), 17);
        assert_eq!(expand_window(WindowKind::F2, None, &s, 0, 0).unwrap().len(), 1);
        let sph = expand_window(WindowKind::Sphere, None, &s, 1, 0).unwrap();
        assert_eq!(sph.len(), 5);
        assert!((0..5).all(|x| sph.coords(x).unwrap().is_unit()));
        let sph3 = expand_window(WindowKind::Sphere, None, &s, 3, 1).unwrap();
        assert_eq!(sph3.len() as u64, crate::group::ball_size(3));
        assert!(matches!(
            expand_window(WindowKind::F2, None, &s, 2, 3),
            Err(Error::BadWindow(_))
        ));
    }

    #[test]
    fn fixed_base_rejected() {
        let s = GeneratingSet::standard();
        let pole = SpherePoint::from_integers([0, 0, 1], 1);
        assert!(matches!(
            expand_window(WindowKind::Sphere, Some(pole), &s, 2, 0),
            Err(Error::FixedBase(w)) if w == "a"
        ));
    }

    #[test]
    fn action_matches_words() {
        let s = GeneratingSet::standard();
        let s2 = square_set(&s);
        for kind in [WindowKind::F2, WindowKind::Sphere] {
            let w = expand_window(kind, None, &s, 4, 2).unwrap();
            let table = w.action_table(&s2).unwrap();
            for (gi, g) in s2.elements().iter().enumerate() {
                for x in 0..w.len() {
                    let expected = w.index_of_word(&g.mul(&w.word(x)));
                    let got = (table[gi][x] != NO_POINT).then_some(table[gi][x] as usize);
                    assert_eq!(got, expected);
                }
            }
        }
    }

    #[test]
    fn interior_is_stable_under_growth() {
        let s = GeneratingSet::standard();
        let small = expand_window(WindowKind::F2, None, &s, 4, 2).unwrap();
        let big = expand_window(WindowKind::F2, None, &s, 6, 2).unwrap();
        for x in (0..small.len()).filter(|&x| small.is_interior(x)) {
            assert_eq!(big.word(x), small.word(x));
            assert!(big.is_interior(x));
            assert_eq!(big.neighbors(&x), small.neighbors(&x));
        }
    }

    #[test]
    fn free_ball_identity_is_first_layer() {
        let s = LayerSchedule::geometric(int(1), 2).unwrap();
        assert_eq!(s.f(0), 32);
        let ball = FreeBall { radius: 80 };
        let m = local_layer_membership(&ball, &FreeWord::identity(), 0, &s).unwrap();
        assert_eq!(m, Membership::Member);
        let near_edge = reduce_word("ababababab");
        let small = FreeBall { radius: 40 };
        assert_eq!(local_layer_membership(&small, &near_edge, 0, &s).unwrap(), Membership::Unreliable);
    }

    fn reduce_word(s: &str) -> FreeWord {
        crate::group::reduce(s).unwrap()
    }

    #[test]
    fn window_membership_is_stable() {
        // small schedule so that many answers are definite
        let s = LayerSchedule::unchecked(&[1], 2, int(8)).unwrap();
        let gens = GeneratingSet::standard();
        let small = expand_window(WindowKind::F2, None, &gens, 5, 0).unwrap();
        let big = expand_window(WindowKind::F2, None, &gens, 7, 0).unwrap();
        let ball = FreeBall { radius: 7 };
        let mut definite = 0;
        for x in 0..small.len() {
            for n in 0..2 {
                let a = local_layer_membership(&small, &x, n, &s).unwrap();
                let b = local_layer_membership(&big, &x, n, &s).unwrap();
                let c = local_layer_membership(&ball, &small.word(x), n, &s).unwrap();
                assert_eq!(b, c);
                if a != Membership::Unreliable {
                    definite += 1;
                    assert_eq!(a, b, "x={x} n={n}");
                }
            }
        }
        assert!(definite > 0);
    }
}
