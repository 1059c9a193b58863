use std::collections::BTreeSet;

use crate::group::{DiagonalSpec, Dihedral, GroupSpec, Lamp, Letter, Order, StepSample, WreathElem};
use crate::metric::{construct, covering_length, cycle_cover_lower, cyclic_bounds, refined_from_parts, LengthBounds};

/// Length bracket of the walk at one time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkBounds {
    pub lower: u64,
    pub upper: u64,
    /// Set when `upper` is a heuristic estimate rather than a certified bound.
    pub heuristic: bool,
}

/// Level-one factor: lamps over the integer lift of the base, densely stored,
/// plus the true lamps on `Z/m` when the cycle is small enough to wrap.
#[derive(Clone, Debug)]
pub(crate) struct LineState {
    k: u64,
    l: Order,
    m: Order,
    pos: i64,
    min: i64,
    max: i64,
    offset: i64,
    lift: Vec<Dihedral>,
    cyclic: Option<Vec<Dihedral>>,
}

impl LineState {
    fn new(spec: &GroupSpec, horizon: u64) -> Self {
        let k = spec.k();
        let h = horizon as i64 + 1;
        let cyclic = match spec.m() {
            Order::Finite(m) if m <= 2 * (horizon + k) + 1 => Some(vec![Dihedral::IDENTITY; m as usize]),
            _ => None,
        };
        LineState {
            k,
            l: spec.l(),
            m: spec.m(),
            pos: 0,
            min: 0,
            max: 0,
            offset: h,
            lift: vec![Dihedral::IDENTITY; (2 * h + k as i64 + 1) as usize],
            cyclic,
        }
    }

    fn slot(&mut self, x: i64) -> &mut Dihedral {
        if x + self.offset < 0 {
            let grow = (-(x + self.offset)) as usize + self.lift.len();
            let mut v = vec![Dihedral::IDENTITY; grow];
            v.extend_from_slice(&self.lift);
            self.lift = v;
            self.offset += grow as i64;
        }
        let i = (x + self.offset) as usize;
        if i >= self.lift.len() {
            self.lift.resize(2 * i + 1, Dihedral::IDENTITY);
        }
        &mut self.lift[i]
    }

    fn switch(&mut self, x: i64, is_a: bool) {
        let l = self.l;
        let s = self.slot(x);
        *s = if is_a { s.mul_a(l) } else { s.mul_b(l) };
        if let (Some(c), Order::Finite(m)) = (self.cyclic.as_mut(), self.m) {
            let r = &mut c[x.rem_euclid(m as i64) as usize];
            *r = if is_a { r.mul_a(l) } else { r.mul_b(l) };
        }
    }

    fn letter(&mut self, letter: Letter) {
        match letter {
            Letter::Tau | Letter::TauInv => {
                self.pos += if letter == Letter::Tau { 1 } else { -1 };
                self.min = self.min.min(self.pos);
                self.max = self.max.max(self.pos);
            }
            Letter::Alpha => self.switch(self.pos, true),
            Letter::Beta => self.switch(self.pos + self.k as i64, false),
        }
    }

    fn step(&mut self, bits: u64) {
        for &l in StepSample::from_bits(bits).word().letters() {
            self.letter(l);
        }
    }

    /// Position and non-trivial lamps of the integer lift.
    pub(crate) fn lift_parts(&self) -> (i64, Vec<(i64, Dihedral)>) {
        let lamps = self
            .lift
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_identity())
            .map(|(i, &f)| (i as i64 - self.offset, f))
            .collect();
        (self.pos, lamps)
    }

    /// The lift folds onto the true state without two lifts sharing a residue.
    fn lift_is_faithful(&self) -> bool {
        match self.m {
            Order::Infinite => true,
            Order::Finite(m) => ((self.max - self.min) as u64) + self.k < m,
        }
    }

    /// Certified bounds for this factor alone, `n` steps into the walk.
    fn bounds(&self, n: u64) -> LengthBounds {
        let (p, lamps) = self.lift_parts();
        let b = match (self.m, &self.cyclic) {
            (Order::Infinite, _) => refined_from_parts(p, &lamps, self.k, self.l),
            (Order::Finite(_), None) => {
                // m > 2(n + k): every word of length <= n lifts faithfully.
                refined_from_parts(p, &lamps, self.k, self.l)
            }
            (Order::Finite(m), Some(c)) => {
                let res: Vec<(i64, Dihedral)> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| !f.is_identity())
                    .map(|(i, &f)| (i as i64, f))
                    .collect();
                let (lower, upper) = cyclic_bounds(p, &res, self.k, self.l, m);
                let mut upper = upper.unwrap_or(n);
                if self.lift_is_faithful() {
                    upper = upper.min(self.lift_word_len(&p, &lamps).unwrap_or(n));
                }
                LengthBounds { lower, upper }
            }
        };
        LengthBounds { lower: b.lower.min(n), upper: b.upper.min(n) }
    }

    /// Length of the explicit word for the lift, when that word also stays
    /// faithful on the cycle.
    fn lift_word_len(&self, p: &i64, lamps: &[(i64, Dihedral)]) -> Option<u64> {
        let c = construct(*p, lamps, self.k, self.l);
        self.word_is_faithful(c.min_position(), c.max_position()).then(|| c.len())
    }

    fn word_is_faithful(&self, lo: i64, hi: i64) -> bool {
        match self.m {
            Order::Infinite => true,
            Order::Finite(m) => ((hi - lo) as u64) + self.k < m,
        }
    }
}

/// Level of the diagonal that one factor's lamps determine another's.
fn determines(s: &LineState, j: &LineState) -> bool {
    let two = Order::Finite(2);
    (j.k == s.k && j.l.divides(s.l)) || (j.l.divides(two) && two.divides(s.l))
}

#[derive(Clone, Debug)]
pub(crate) struct TowerState {
    spec: GroupSpec,
    g: WreathElem,
}

impl TowerState {
    fn step(&mut self, bits: u64) {
        self.spec.apply_step(&mut self.g, bits);
    }

    fn bounds(&self, n: u64) -> (LengthBounds, bool) {
        let (lower, upper) = tower_bounds(&self.spec, &self.g);
        (LengthBounds { lower: lower.min(n), upper: upper.min(n) }, true)
    }
}

/// Covering lower bound and heuristic upper estimate for a tower element of
/// level at least two: every lit site must be visited, and each visit can
/// apply two lower-level steps to its lamp.
pub(crate) fn tower_bounds(spec: &GroupSpec, g: &WreathElem) -> (u64, u64) {
    if g.is_identity() {
        return (0, 0);
    }
    let p = g.position();
    let sites: BTreeSet<i64> = g.lamps().iter().map(|(x, _)| *x).collect();
    let cover = match spec.m() {
        Order::Infinite => {
            let lo = sites.iter().copied().chain([0, p]).min().unwrap();
            let hi = sites.iter().copied().chain([0, p]).max().unwrap();
            covering_length(p, lo, hi)
        }
        Order::Finite(m) => cycle_cover_lower(p, &sites, m),
    };
    let mut lower = cover.max(1);
    if p == 0 && spec.m() != Order::Finite(1) {
        lower = lower.max(2);
    }
    let even_base = match spec.m() {
        Order::Infinite => true,
        Order::Finite(m) => m % 2 == 0,
    };
    if even_base && lower % 2 != p.rem_euclid(2) as u64 {
        lower += 1;
    }
    let lower_spec = spec.lower().expect("tower of level at least two");
    let mut extra = 0;
    for (_, lamp) in g.lamps() {
        let need = lamp_upper(&lower_spec, lamp);
        extra += 2 * need.div_ceil(2).saturating_sub(1);
    }
    (lower, (cover + extra).max(lower))
}

fn lamp_upper(spec: &GroupSpec, lamp: &Lamp) -> u64 {
    match lamp {
        Lamp::Dihedral(_) => 1,
        Lamp::Wreath(h) if spec.level() >= 2 => tower_bounds(spec, h).1,
        Lamp::Wreath(h) => {
            let lamps: Vec<(i64, Dihedral)> = h.dihedral_lamps().collect();
            match spec.m() {
                Order::Infinite => refined_from_parts(h.position(), &lamps, spec.k(), spec.l()).upper,
                Order::Finite(m) => {
                    let (lo, up) = cyclic_bounds(h.position(), &lamps, spec.k(), spec.l(), m);
                    up.unwrap_or(lo)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum FactorState {
    Line(LineState),
    Tower(TowerState),
}

/// State of one walker on a diagonal product: every factor driven by the
/// same step outcomes.
#[derive(Clone, Debug)]
pub struct Walker {
    factors: Vec<FactorState>,
    masks: Vec<u64>,
    time: u64,
}

impl Walker {
    /// `horizon` is the largest time the walker will be asked about; it
    /// sizes the lamp storage and decides which cycles can wrap.
    pub fn new(spec: &DiagonalSpec, horizon: u64) -> Self {
        let factors = spec
            .factors()
            .iter()
            .map(|f| {
                if f.level() == 1 {
                    FactorState::Line(LineState::new(f, horizon))
                } else {
                    FactorState::Tower(TowerState { spec: *f, g: WreathElem::identity() })
                }
            })
            .collect();
        let masks = spec.factors().iter().map(|f| mask(f.step_bits())).collect();
        Walker { factors, masks, time: 0 }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn step(&mut self, bits: u64) {
        for (f, &mk) in self.factors.iter_mut().zip(&self.masks) {
            match f {
                FactorState::Line(s) => s.step(bits & mk),
                FactorState::Tower(s) => s.step(bits & mk),
            }
        }
        self.time += 1;
    }

    /// Position and integer-lift lamps of a level-one factor.
    pub fn lift_parts(&self, factor: usize) -> Option<(i64, Vec<(i64, Dihedral)>)> {
        match self.factors.get(factor)? {
            FactorState::Line(s) => Some(s.lift_parts()),
            FactorState::Tower(_) => None,
        }
    }

    /// Bracket on the word length of the current element.
    ///
    /// The lower bound is the largest factor lower bound. The upper bound is
    /// the walk length itself unless one factor's explicit word also writes
    /// every other factor, which holds when the others are its quotients
    /// with the same `k`, or have lamps in `D_1`/`D_2` driven by parities.
    pub fn bounds(&self) -> WalkBounds {
        let n = self.time;
        if self.factors.is_empty() {
            return WalkBounds { lower: 0, upper: 0, heuristic: false };
        }
        let mut lower = 0;
        let mut heuristic = false;
        let mut single_upper = n;
        for f in &self.factors {
            let b = match f {
                FactorState::Line(s) => s.bounds(n),
                FactorState::Tower(s) => {
                    let (b, h) = s.bounds(n);
                    heuristic |= h;
                    b
                }
            };
            lower = lower.max(b.lower);
            single_upper = b.upper;
        }
        let upper = if self.factors.len() == 1 {
            single_upper
        } else if heuristic {
            self.tower_upper(n)
        } else {
            self.diagonal_upper(n)
        };
        WalkBounds { lower, upper: upper.max(lower), heuristic }
    }

    fn lines(&self) -> Vec<&LineState> {
        self.factors
            .iter()
            .filter_map(|f| match f {
                FactorState::Line(s) => Some(s),
                FactorState::Tower(_) => None,
            })
            .collect()
    }

    fn diagonal_upper(&self, n: u64) -> u64 {
        let lines = self.lines();
        if lines.iter().any(|s| !s.lift_is_faithful()) {
            return n;
        }
        let mut best = n;
        for s in &lines {
            if !lines.iter().all(|j| determines(s, j)) {
                continue;
            }
            let (p, lamps) = s.lift_parts();
            let c = construct(p, &lamps, s.k, s.l);
            let (lo, hi) = (c.min_position(), c.max_position());
            if lines.iter().all(|j| j.word_is_faithful(lo, hi)) {
                best = best.min(c.len());
            }
        }
        best
    }

    fn tower_upper(&self, n: u64) -> u64 {
        self.factors
            .iter()
            .map(|f| match f {
                FactorState::Tower(s) => s.bounds(n).0.upper,
                FactorState::Line(s) => s.bounds(n).upper,
            })
            .sum::<u64>()
            .min(n)
    }
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
