use super::Order;

/// Generators of the dihedral lamp group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LampLetter {
    A,
    B,
}

pub type LampWord = Vec<LampLetter>;

/// Element of `D_l = <a, b | a^2 = b^2 = (ab)^l = 1>`.
///
/// The code is the vertex of the `{a, b}` Cayley graph: `0` is the identity,
/// `t > 0` is the alternating word of length `t` starting with `a`, `t < 0`
/// the one of length `|t|` starting with `b`. For finite `l` the graph is a
/// `2l`-cycle and codes live in `[0, 2l)`. Writing `r = ab`, the code
/// `2s + f` (with `f` in `{0, 1}`) is the element `r^s a^f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dihedral(i64);

#[inline]
fn cycle(l: Order) -> Order {
    l.double()
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral(0);

    pub fn from_code(code: i64, l: Order) -> Self {
        Dihedral(cycle(l).reduce(code))
    }

    pub fn code(self) -> i64 {
        self.0
    }

    pub fn a(l: Order) -> Self {
        Self::from_code(1, l)
    }

    pub fn b(l: Order) -> Self {
        Self::from_code(-1, l)
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    #[inline]
    fn split(self) -> (i64, i64) {
        let f = self.0.rem_euclid(2);
        ((self.0 - f) / 2, f)
    }

    /// Product `self * other` in `D_l`.
    pub fn mul(self, other: Dihedral, l: Order) -> Dihedral {
        let (s, f) = self.split();
        let (u, g) = other.split();
        let rot = if f == 1 { s.checked_sub(u) } else { s.checked_add(u) }
            .expect("dihedral code overflow");
        let code = rot.checked_mul(2).expect("dihedral code overflow") + (f ^ g);
        Self::from_code(code, l)
    }

    /// Right multiplication by `a`: even codes step up, odd codes step down.
    #[inline]
    pub fn mul_a(self, l: Order) -> Dihedral {
        let step = if self.0 & 1 == 0 { 1 } else { -1 };
        Self::from_code(self.0 + step, l)
    }

    /// Right multiplication by `b`: even codes step down, odd codes step up.
    #[inline]
    pub fn mul_b(self, l: Order) -> Dihedral {
        let step = if self.0 & 1 == 0 { -1 } else { 1 };
        Self::from_code(self.0 + step, l)
    }

    pub fn mul_letter(self, letter: LampLetter, l: Order) -> Dihedral {
        match letter {
            LampLetter::A => self.mul_a(l),
            LampLetter::B => self.mul_b(l),
        }
    }

    pub fn inv(self, l: Order) -> Dihedral {
        let (s, f) = self.split();
        if f == 1 {
            self
        } else {
            Self::from_code(-2 * s, l)
        }
    }

    pub fn pow(self, mut e: u64, l: Order) -> Dihedral {
        let mut acc = Dihedral::IDENTITY;
        let mut base = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base, l);
            }
            base = base.mul(base, l);
            e >>= 1;
        }
        acc
    }

    /// Graph distance to the identity in the `{a, b}` Cayley graph.
    pub fn norm(self, l: Order) -> u64 {
        match l {
            Order::Finite(n) => {
                let t = self.0 as u64;
                t.min(2 * n - t)
            }
            Order::Infinite => self.0.unsigned_abs(),
        }
    }

    /// First letter of the normal form; `None` for the identity. On a tie
    /// (finite `l`, norm `l`) the normal form starts with `a`.
    pub fn first_letter(self, l: Order) -> Option<LampLetter> {
        if self.0 == 0 {
            return None;
        }
        let a_first = match l {
            Order::Finite(n) => self.0 as u64 <= n,
            Order::Infinite => self.0 > 0,
        };
        Some(if a_first { LampLetter::A } else { LampLetter::B })
    }

    /// True when two reduced words of minimal length represent `self`.
    pub fn is_tie(self, l: Order) -> bool {
        matches!(l, Order::Finite(n) if self.0 as u64 == n)
    }

    /// Reduced alternating word in normal form.
    pub fn normal_form(self, l: Order) -> LampWord {
        let len = self.norm(l) as usize;
        let first = match self.first_letter(l) {
            None => return Vec::new(),
            Some(x) => x,
        };
        (0..len)
            .map(|i| match (first, i % 2) {
                (LampLetter::A, 0) | (LampLetter::B, 1) => LampLetter::A,
                _ => LampLetter::B,
            })
            .collect()
    }

    /// Image under the quotient `D_from -> D_to` (requires `to` to divide `from`).
    pub fn project(self, to: Order) -> Dihedral {
        Self::from_code(self.0, to)
    }

    /// Membership in `<a> = {e, a}`.
    pub fn in_a_subgroup(self, l: Order) -> bool {
        self.0 == 0 || self == Dihedral::a(l)
    }

    /// Membership in `<b> = {e, b}`.
    pub fn in_b_subgroup(self, l: Order) -> bool {
        self.0 == 0 || self == Dihedral::b(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    const INF: Order = Order::Infinite;

    fn eval(word: &str, l: Order) -> Dihedral {
        word.chars().fold(Dihedral::IDENTITY, |x, c| match c {
            'a' => x.mul_a(l),
            'b' => x.mul_b(l),
            _ => unreachable!(),
        })
    }

    #[test]
    fn relators_hold() {
        assert_eq!(Dihedral::a(INF).mul(Dihedral::a(INF), INF), Dihedral::IDENTITY);
        assert_eq!(Dihedral::b(INF).mul(Dihedral::b(INF), INF), Dihedral::IDENTITY);
        for n in 1..9 {
            let l = Order::Finite(n);
            let ab = Dihedral::a(l).mul(Dihedral::b(l), l);
            assert_eq!(ab.pow(n, l), Dihedral::IDENTITY, "l = {n}");
            assert_ne!(ab.pow(n.saturating_sub(1), l), Dihedral::IDENTITY.mul_a(l));
        }
    }

    #[test]
    fn abab_equals_ba_in_d3() {
        let l = Order::Finite(3);
        assert_eq!(eval("abab", l), eval("ba", l));
    }

    #[test]
    fn norm_of_abab_in_d4_by_enumeration() {
        // Enumerate all alternating words up to length 8 and record the
        // shortest length reaching each element: that is the norm.
        let l = Order::Finite(4);
        let mut shortest: HashMap<Dihedral, usize> = HashMap::new();
        for len in 0..=8usize {
            for first in ['a', 'b'] {
                let w: String = (0..len)
                    .map(|i| if (i % 2 == 0) == (first == 'a') { 'a' } else { 'b' })
                    .collect();
                shortest.entry(eval(&w, l)).or_insert(len);
            }
        }
        assert_eq!(shortest.len(), 8);
        let x = eval("abab", l);
        assert_eq!(shortest[&x], 4);
        assert_eq!(x.norm(l), 4);
        for (g, d) in &shortest {
            assert_eq!(g.norm(l), *d as u64);
        }
    }

    #[test]
    fn mul_agrees_with_letterwise_evaluation() {
        for l in [Order::Finite(1), Order::Finite(2), Order::Finite(5), INF] {
            let words = ["", "a", "b", "ab", "ba", "aba", "babab", "abababa"];
            for u in words {
                for v in words {
                    let uv = format!("{u}{v}");
                    assert_eq!(eval(u, l).mul(eval(v, l), l), eval(&uv, l));
                }
                let x = eval(u, l);
                assert_eq!(x.mul(x.inv(l), l), Dihedral::IDENTITY);
            }
        }
    }

    #[test]
    fn normal_form_prefers_a_on_tie() {
        let l = Order::Finite(3);
        let x = eval("aba", l);
        assert!(x.is_tie(l));
        assert_eq!(x.first_letter(l), Some(LampLetter::A));
        assert_eq!(eval("bab", l), x);
        let nf = x.normal_form(l);
        assert_eq!(nf, vec![LampLetter::A, LampLetter::B, LampLetter::A]);
    }

    #[test]
    fn normal_form_evaluates_back() {
        for l in [Order::Finite(2), Order::Finite(4), Order::Finite(7), INF] {
            for code in -12..12 {
                let x = Dihedral::from_code(code, l);
                let back = x
                    .normal_form(l)
                    .into_iter()
                    .fold(Dihedral::IDENTITY, |y, c| y.mul_letter(c, l));
                assert_eq!(back, x);
                assert_eq!(x.normal_form(l).len() as u64, x.norm(l));
            }
        }
    }

    #[test]
    fn projection_is_a_homomorphism() {
        let big = Order::Finite(8);
        let small = Order::Finite(4);
        for c1 in 0..16 {
            for c2 in 0..16 {
                let x = Dihedral::from_code(c1, big);
                let y = Dihedral::from_code(c2, big);
                assert_eq!(
                    x.mul(y, big).project(small),
                    x.project(small).mul(y.project(small), small)
                );
            }
        }
    }
}
