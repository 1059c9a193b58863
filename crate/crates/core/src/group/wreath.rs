use std::fmt;

use super::{Dihedral, GroupSpec, Letter, Order};

/// Lamp value: a dihedral element at level one, a lower-level wreath
/// element in towers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lamp {
    Dihedral(Dihedral),
    Wreath(Box<WreathElem>),
}

impl Lamp {
    pub fn as_dihedral(&self) -> Option<Dihedral> {
        match self {
            Lamp::Dihedral(d) => Some(*d),
            Lamp::Wreath(_) => None,
        }
    }

    pub fn as_wreath(&self) -> Option<&WreathElem> {
        match self {
            Lamp::Dihedral(_) => None,
            Lamp::Wreath(w) => Some(w),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            Lamp::Dihedral(d) => d.is_identity(),
            Lamp::Wreath(w) => w.is_identity(),
        }
    }
}

/// Element `(position, lamps)` of a wreath product over `Z` or `Z/mZ`.
///
/// Lamps are kept sorted by site with no identity entries, so structural
/// equality and hashing coincide with group equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElem {
    position: i64,
    lamps: Vec<(i64, Lamp)>,
}

impl WreathElem {
    pub fn identity() -> Self {
        WreathElem::default()
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn lamps(&self) -> &[(i64, Lamp)] {
        &self.lamps
    }

    pub fn is_identity(&self) -> bool {
        self.position == 0 && self.lamps.is_empty()
    }

    pub fn lamp_at(&self, site: i64) -> Option<&Lamp> {
        self.lamps
            .binary_search_by_key(&site, |(s, _)| *s)
            .ok()
            .map(|i| &self.lamps[i].1)
    }

    /// Build from raw parts, sorting and dropping identity lamps.
    pub fn from_parts(position: i64, mut lamps: Vec<(i64, Lamp)>) -> Self {
        lamps.retain(|(_, v)| !v.is_identity());
        lamps.sort_by_key(|(s, _)| *s);
        debug_assert!(lamps.windows(2).all(|w| w[0].0 < w[1].0), "duplicate lamp site");
        WreathElem { position, lamps }
    }

    /// Level-one lamp configuration as `(site, dihedral)` pairs.
    pub fn dihedral_lamps(&self) -> impl Iterator<Item = (i64, Dihedral)> + '_ {
        self.lamps
            .iter()
            .map(|(s, v)| (*s, v.as_dihedral().expect("level-one element expected")))
    }

    /// Whether no lamp stores an identity value (recursively).
    pub fn is_normalized(&self) -> bool {
        self.lamps.windows(2).all(|w| w[0].0 < w[1].0)
            && self.lamps.iter().all(|(_, v)| match v {
                Lamp::Dihedral(d) => !d.is_identity(),
                Lamp::Wreath(w) => !w.is_identity() && w.is_normalized(),
            })
    }
}

impl fmt::Display for WreathElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.position)?;
        for (i, (s, v)) in self.lamps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match v {
                Lamp::Dihedral(d) => write!(f, "{s}: d{}", d.code())?,
                Lamp::Wreath(w) => write!(f, "{s}: {w}")?,
            }
        }
        f.write_str("})")
    }
}

impl GroupSpec {
    fn lamp_mul(&self, x: &Lamp, y: &Lamp) -> Lamp {
        match (x, y) {
            (Lamp::Dihedral(a), Lamp::Dihedral(b)) => Lamp::Dihedral(a.mul(*b, self.l())),
            (Lamp::Wreath(a), Lamp::Wreath(b)) => {
                let lower = self.lower().expect("wreath lamps need level >= 2");
                Lamp::Wreath(Box::new(lower.mul(a, b)))
            }
            _ => panic!("lamp values from different levels"),
        }
    }

    fn lamp_inv(&self, x: &Lamp) -> Lamp {
        match x {
            Lamp::Dihedral(a) => Lamp::Dihedral(a.inv(self.l())),
            Lamp::Wreath(a) => {
                let lower = self.lower().expect("wreath lamps need level >= 2");
                Lamp::Wreath(Box::new(lower.inv(a)))
            }
        }
    }

    #[inline]
    fn shift(&self, site: i64, by: i64) -> i64 {
        self.m().reduce(site.checked_add(by).expect("base position overflow"))
    }

    pub fn identity(&self) -> WreathElem {
        WreathElem::identity()
    }

    /// Product with the shift action: `(p, f)(q, g) = (p + q, x -> f(x) g(x - p))`.
    pub fn mul(&self, g: &WreathElem, h: &WreathElem) -> WreathElem {
        let position = self.shift(g.position, h.position);
        if h.lamps.is_empty() {
            return WreathElem { position, lamps: g.lamps.clone() };
        }
        let mut shifted: Vec<(i64, &Lamp)> =
            h.lamps.iter().map(|(s, v)| (self.shift(*s, g.position), v)).collect();
        if self.m().is_finite() {
            shifted.sort_by_key(|(s, _)| *s);
        }
        let mut lamps = Vec::with_capacity(g.lamps.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        while i < g.lamps.len() || j < shifted.len() {
            let take_left = j == shifted.len() || (i < g.lamps.len() && g.lamps[i].0 < shifted[j].0);
            let take_right = i == g.lamps.len() || (j < shifted.len() && shifted[j].0 < g.lamps[i].0);
            if take_left {
                lamps.push(g.lamps[i].clone());
                i += 1;
            } else if take_right {
                lamps.push((shifted[j].0, shifted[j].1.clone()));
                j += 1;
            } else {
                let v = self.lamp_mul(&g.lamps[i].1, shifted[j].1);
                if !v.is_identity() {
                    lamps.push((g.lamps[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        WreathElem { position, lamps }
    }

    /// Inverse: `(p, f)^-1 = (-p, y -> f(y + p)^-1)`.
    pub fn inv(&self, g: &WreathElem) -> WreathElem {
        let position = self.m().reduce(-g.position);
        let mut lamps: Vec<(i64, Lamp)> = g
            .lamps
            .iter()
            .map(|(s, v)| (self.shift(*s, -g.position), self.lamp_inv(v)))
            .collect();
        lamps.sort_by_key(|(s, _)| *s);
        WreathElem { position, lamps }
    }

    /// Multiply the lamp at `site` on the right by `value`.
    pub fn switch_lamp(&self, g: &mut WreathElem, site: i64, value: &Lamp) {
        let site = self.m().reduce(site);
        match g.lamps.binary_search_by_key(&site, |(s, _)| *s) {
            Ok(i) => {
                let v = self.lamp_mul(&g.lamps[i].1, value);
                if v.is_identity() {
                    g.lamps.remove(i);
                } else {
                    g.lamps[i].1 = v;
                }
            }
            Err(i) => {
                if !value.is_identity() {
                    g.lamps.insert(i, (site, value.clone()));
                }
            }
        }
    }

    pub fn move_by(&self, g: &mut WreathElem, delta: i64) {
        g.position = self.shift(g.position, delta);
    }

    /// Switch value attached to `alpha`: `a` at level one, the lower level's
    /// `alpha` otherwise.
    pub fn alpha_lamp(&self) -> Lamp {
        match self.lower() {
            None => Lamp::Dihedral(Dihedral::a(self.l())),
            Some(lower) => Lamp::Wreath(Box::new(lower.letter_elem(Letter::Alpha))),
        }
    }

    pub fn beta_lamp(&self) -> Lamp {
        match self.lower() {
            None => Lamp::Dihedral(Dihedral::b(self.l())),
            Some(lower) => Lamp::Wreath(Box::new(lower.letter_elem(Letter::Beta))),
        }
    }

    /// Site offset of the `beta` switch: `k` at level one, `0` in towers.
    pub fn beta_offset(&self) -> i64 {
        if self.level() == 1 {
            self.k() as i64
        } else {
            0
        }
    }

    /// Evaluation of a single letter.
    pub fn letter_elem(&self, letter: Letter) -> WreathElem {
        let mut g = WreathElem::identity();
        self.apply_letter(&mut g, letter);
        g
    }

    /// Right multiplication by a letter, in place.
    pub fn apply_letter(&self, g: &mut WreathElem, letter: Letter) {
        match letter {
            Letter::Tau => self.move_by(g, 1),
            Letter::TauInv => self.move_by(g, -1),
            Letter::Alpha => {
                let lamp = self.alpha_lamp();
                self.switch_lamp(g, g.position, &lamp)
            }
            Letter::Beta => {
                let lamp = self.beta_lamp();
                self.switch_lamp(g, g.position + self.beta_offset(), &lamp)
            }
        }
    }

    /// Image under the quotient `D_l -> D_to` on every level-one lamp.
    pub fn project_lamps(&self, g: &WreathElem, to: Order) -> WreathElem {
        assert_eq!(self.level(), 1, "lamp projection is defined at level one");
        assert!(to.divides(self.l()), "D_{to} is not a quotient of D_{}", self.l());
        WreathElem::from_parts(
            g.position,
            g.dihedral_lamps()
                .map(|(s, d)| (s, Lamp::Dihedral(d.project(to))))
                .collect(),
        )
    }
}
