use std::fmt::Debug;
use std::hash::Hash;

use super::{DiagonalSpec, FreeWord, GroupSpec, Lamp, Letter, WreathElem};

/// Random bits consumed by one level-one switch-walk-switch step.
pub const STEP_BITS_LEVEL1: u32 = 7;

/// A group given with the marked alphabet `{tau, tau^-1, alpha, beta}` and a
/// switch-walk-switch step decoder.
pub trait MarkedGroup: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Right multiplication by one letter, in place.
    fn apply_letter(&self, g: &mut Self::Elem, letter: Letter);
    /// Number of random bits a step consumes.
    fn step_bits(&self) -> u32;
    /// Generator selected by the low `step_bits()` bits of `bits`.
    fn step_elem(&self, bits: u64) -> Self::Elem;
    fn describe(&self) -> String;

    fn letter(&self, letter: Letter) -> Self::Elem {
        let mut g = self.identity();
        self.apply_letter(&mut g, letter);
        g
    }

    fn eval(&self, w: &FreeWord) -> Self::Elem {
        let mut g = self.identity();
        for &l in w.letters() {
            self.apply_letter(&mut g, l);
        }
        g
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }
}

/// One level-one step `u1 tau^eta u2` with `u_i` in
/// `{alpha^e1 beta^e2, beta^e1 alpha^e2}`.
///
/// Bit layout: 0 `e1`, 1 `e2`, 2 `e1'`, 3 `e2'`, 4 `eta` (set means +1),
/// 5 order of `u1` (set means beta first), 6 order of `u2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepSample {
    pub e1: bool,
    pub e2: bool,
    pub e1_after: bool,
    pub e2_after: bool,
    pub forward: bool,
    pub beta_first_before: bool,
    pub beta_first_after: bool,
}

impl StepSample {
    pub fn from_bits(bits: u64) -> Self {
        let bit = |i: u32| (bits >> i) & 1 == 1;
        StepSample {
            e1: bit(0),
            e2: bit(1),
            e1_after: bit(2),
            e2_after: bit(3),
            forward: bit(4),
            beta_first_before: bit(5),
            beta_first_after: bit(6),
        }
    }

    pub fn to_bits(self) -> u64 {
        [
            self.e1,
            self.e2,
            self.e1_after,
            self.e2_after,
            self.forward,
            self.beta_first_before,
            self.beta_first_after,
        ]
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    /// All 128 order-resolved outcomes.
    pub fn all() -> impl Iterator<Item = StepSample> {
        (0..1u64 << STEP_BITS_LEVEL1).map(StepSample::from_bits)
    }

    pub fn eta(self) -> i64 {
        if self.forward {
            1
        } else {
            -1
        }
    }

    fn switch_letters(first_exp: bool, second_exp: bool, beta_first: bool) -> impl Iterator<Item = Letter> {
        let (x, y) = if beta_first { (Letter::Beta, Letter::Alpha) } else { (Letter::Alpha, Letter::Beta) };
        [(x, first_exp), (y, second_exp)].into_iter().filter(|(_, e)| *e).map(|(l, _)| l)
    }

    /// The word `u1 tau^eta u2`.
    pub fn word(self) -> FreeWord {
        let mut w: Vec<Letter> = Self::switch_letters(self.e1, self.e2, self.beta_first_before).collect();
        w.push(if self.forward { Letter::Tau } else { Letter::TauInv });
        w.extend(Self::switch_letters(self.e1_after, self.e2_after, self.beta_first_after));
        FreeWord::new(w)
    }
}

fn step_bits_for_level(level: u32) -> u32 {
    (1u32 << (level + 2)) - 1
}

impl GroupSpec {
    pub fn step_bits(&self) -> u32 {
        step_bits_for_level(self.level())
    }

    /// Apply one step in place. Level one: the word `u1 tau^eta u2`. Higher
    /// levels: switch by a lower-level step at the current site, move by
    /// `eta`, switch by another independent lower-level step.
    pub fn apply_step(&self, g: &mut WreathElem, bits: u64) {
        match self.lower() {
            None => {
                for &l in StepSample::from_bits(bits).word().letters() {
                    self.apply_letter(g, l);
                }
            }
            Some(lower) => {
                let lb = lower.step_bits();
                let before = Lamp::Wreath(Box::new(lower.step_elem(bits >> 1)));
                let after = Lamp::Wreath(Box::new(lower.step_elem(bits >> (1 + lb))));
                let eta = if bits & 1 == 1 { 1 } else { -1 };
                self.switch_lamp(g, g.position(), &before);
                self.move_by(g, eta);
                self.switch_lamp(g, g.position(), &after);
            }
        }
    }
}

impl MarkedGroup for GroupSpec {
    type Elem = WreathElem;

    fn identity(&self) -> WreathElem {
        WreathElem::identity()
    }
    fn mul(&self, a: &WreathElem, b: &WreathElem) -> WreathElem {
        GroupSpec::mul(self, a, b)
    }
    fn inv(&self, a: &WreathElem) -> WreathElem {
        GroupSpec::inv(self, a)
    }
    fn apply_letter(&self, g: &mut WreathElem, letter: Letter) {
        GroupSpec::apply_letter(self, g, letter)
    }
    fn step_bits(&self) -> u32 {
        GroupSpec::step_bits(self)
    }
    fn step_elem(&self, bits: u64) -> WreathElem {
        let mut g = WreathElem::identity();
        self.apply_step(&mut g, bits);
        g
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

impl MarkedGroup for DiagonalSpec {
    type Elem = Vec<WreathElem>;

    fn identity(&self) -> Vec<WreathElem> {
        vec![WreathElem::identity(); self.len()]
    }
    fn mul(&self, a: &Vec<WreathElem>, b: &Vec<WreathElem>) -> Vec<WreathElem> {
        self.factors().iter().zip(a.iter().zip(b)).map(|(s, (x, y))| s.mul(x, y)).collect()
    }
    fn inv(&self, a: &Vec<WreathElem>) -> Vec<WreathElem> {
        self.factors().iter().zip(a).map(|(s, x)| s.inv(x)).collect()
    }
    fn apply_letter(&self, g: &mut Vec<WreathElem>, letter: Letter) {
        for (s, x) in self.factors().iter().zip(g.iter_mut()) {
            s.apply_letter(x, letter);
        }
    }
    fn step_bits(&self) -> u32 {
        step_bits_for_level(self.level())
    }
    fn step_elem(&self, bits: u64) -> Vec<WreathElem> {
        self.factors().iter().map(|s| MarkedGroup::step_elem(s, bits)).collect()
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

/// Diagonal product of two arbitrary marked groups.
#[derive(Clone, Debug)]
pub struct PairGroup<F, G> {
    pub first: F,
    pub second: G,
}

impl<F: MarkedGroup, G: MarkedGroup> MarkedGroup for PairGroup<F, G> {
    type Elem = (F::Elem, G::Elem);

    fn identity(&self) -> Self::Elem {
        (self.first.identity(), self.second.identity())
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.first.mul(&a.0, &b.0), self.second.mul(&a.1, &b.1))
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        (self.first.inv(&a.0), self.second.inv(&a.1))
    }
    fn apply_letter(&self, g: &mut Self::Elem, letter: Letter) {
        self.first.apply_letter(&mut g.0, letter);
        self.second.apply_letter(&mut g.1, letter);
    }
    fn step_bits(&self) -> u32 {
        self.first.step_bits().max(self.second.step_bits())
    }
    fn step_elem(&self, bits: u64) -> Self::Elem {
        (self.first.step_elem(bits), self.second.step_elem(bits))
    }
    fn describe(&self) -> String {
        format!("({}) x ({})", self.first.describe(), self.second.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Dihedral, Order};
    use proptest::prelude::*;

    const INF: Order = Order::Infinite;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    fn lamps(g: &WreathElem) -> Vec<(i64, i64)> {
        g.dihedral_lamps().map(|(s, d)| (s, d.code())).collect()
    }

    #[test]
    fn empty_word_is_identity() {
        let spec = GroupSpec::gamma(2, Order::Finite(3), INF);
        assert!(spec.eval(&FreeWord::empty()).is_identity());
        let d: DiagonalSpec = "i=1,k=1,l=2,m=inf; i=1,k=3,l=2,m=inf".parse().unwrap();
        assert!(d.eval(&FreeWord::empty()).iter().all(WreathElem::is_identity));
    }

    #[test]
    fn alpha_beta_in_gamma_2_3_inf() {
        let l = Order::Finite(3);
        let spec = GroupSpec::gamma(2, l, INF);
        let g = spec.eval(&w("ab"));
        assert_eq!(g.position(), 0);
        assert_eq!(lamps(&g), vec![(0, Dihedral::a(l).code()), (2, Dihedral::b(l).code())]);
    }

    #[test]
    fn conjugated_switches_shift() {
        let spec = GroupSpec::gamma(1, INF, INF);
        let g = spec.eval(&w("tabT"));
        assert_eq!(g.position(), 0);
        assert_eq!(lamps(&g), vec![(1, 1), (2, -1)]);
    }

    #[test]
    fn shift_action_of_product() {
        let spec = GroupSpec::base_lamplighter();
        let g = spec.mul(&spec.letter(Letter::Tau), &spec.letter(Letter::Alpha));
        assert_eq!(g.position(), 1);
        assert_eq!(lamps(&g), vec![(1, 1)]);
        assert_eq!(spec.mul(&spec.identity(), &g), g);
        assert!(spec.mul(&g, &spec.inv(&g)).is_identity());
    }

    #[test]
    fn commuting_switches_at_distinct_sites() {
        let d: DiagonalSpec = "i=1,k=1,l=2,m=inf; i=1,k=3,l=2,m=inf".parse().unwrap();
        let g = d.eval(&w("abab"));
        assert!(g.iter().all(WreathElem::is_identity));
    }

    #[test]
    fn relators_at_common_site() {
        for n in 1..7u64 {
            let spec = GroupSpec::gamma(0, Order::Finite(n), INF);
            assert!(spec.eval(&w("ab").pow(n as usize)).is_identity());
            assert!(spec.eval(&w("aa")).is_identity());
            assert!(spec.eval(&w("bb")).is_identity());
            let spec = GroupSpec::gamma(0, Order::Finite(n), Order::Finite(5));
            assert!(spec.eval(&w("ab").pow(n as usize)).is_identity());
            assert!(spec.eval(&w("ttttt")).is_identity());
        }
    }

    #[test]
    fn step_words_match_layout() {
        assert_eq!(StepSample::from_bits(1 << 4).word().to_string(), "t");
        let s = StepSample { e1: true, forward: true, e2_after: true, ..StepSample::from_bits(0) };
        assert_eq!(s.word().to_string(), "atb");
        assert_eq!(StepSample::from_bits(s.to_bits()), s);
        let s = StepSample::from_bits(0b1111111);
        assert_eq!(s.word().to_string(), "batba");
    }

    #[test]
    fn tower_letters_use_lower_generators() {
        let spec = GroupSpec::new(2, 1, Order::Finite(3), INF).unwrap();
        let g = spec.eval(&w("atb"));
        assert_eq!(g.position(), 1);
        let lower = spec.lower().unwrap();
        assert_eq!(g.lamp_at(0).unwrap().as_wreath().unwrap(), &lower.letter(Letter::Alpha));
        assert_eq!(g.lamp_at(1).unwrap().as_wreath().unwrap(), &lower.letter(Letter::Beta));
        assert!(spec.eval(&w("aa")).is_identity());
        assert!(g.is_normalized());
    }

    #[test]
    fn tower_steps_switch_by_lower_steps() {
        let spec = GroupSpec::new(2, 0, Order::Finite(2), INF).unwrap();
        let lower = spec.lower().unwrap();
        for bits in [0u64, 1, 0x5a5a, 0x7fff] {
            let g = MarkedGroup::step_elem(&spec, bits);
            let eta = if bits & 1 == 1 { 1 } else { -1 };
            assert_eq!(g.position(), eta);
            let s1 = MarkedGroup::step_elem(&lower, bits >> 1);
            assert_eq!(g.lamp_at(0).unwrap().as_wreath().unwrap(), &s1);
            assert!(g.is_normalized());
        }
    }

    fn arb_word(max: usize) -> impl Strategy<Value = FreeWord> {
        proptest::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..=max).prop_map(FreeWord::new)
    }

    fn arb_order() -> impl Strategy<Value = Order> {
        prop_oneof![Just(INF), (1u64..7).prop_map(Order::Finite)]
    }

    fn arb_spec() -> impl Strategy<Value = GroupSpec> {
        (1u32..=2, 0u64..4, arb_order(), arb_order())
            .prop_filter_map("2k < m", |(i, k, l, m)| GroupSpec::new(i, k, l, m).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn evaluation_is_a_homomorphism(spec in arb_spec(), u in arb_word(30), v in arb_word(30)) {
            let uv = spec.eval(&u.concat(&v));
            let prod = spec.mul(&spec.eval(&u), &spec.eval(&v));
            prop_assert!(uv.is_normalized());
            prop_assert!(prod.is_normalized());
            prop_assert_eq!(uv, prod);
            let g = spec.eval(&u);
            prop_assert_eq!(spec.inv(&g), spec.eval(&u.inverse()));
            prop_assert!(spec.mul(&spec.inv(&g), &g).is_identity());
        }

        #[test]
        fn reduction_does_not_change_value(spec in arb_spec(), u in arb_word(30)) {
            prop_assert_eq!(spec.eval(&u), spec.eval(&u.reduce()));
        }

        #[test]
        fn lamp_quotient_commutes_with_evaluation(k in 0u64..4, l in 1u64..6, u in arb_word(30)) {
            let big = GroupSpec::gamma(k, Order::Finite(2 * l), INF);
            let small = GroupSpec::gamma(k, Order::Finite(l), INF);
            prop_assert_eq!(big.project_lamps(&big.eval(&u), Order::Finite(l)), small.eval(&u));
            let line = GroupSpec::gamma(k, INF, INF);
            prop_assert_eq!(line.project_lamps(&line.eval(&u), Order::Finite(l)), small.eval(&u));
        }

        #[test]
        fn step_elements_match_step_words(spec in arb_spec(), bits in 0u64..128) {
            if spec.level() == 1 {
                let word = StepSample::from_bits(bits).word();
                prop_assert_eq!(MarkedGroup::step_elem(&spec, bits), spec.eval(&word));
            }
        }
    }
}
