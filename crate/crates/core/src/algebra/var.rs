//! Variables, exponent vectors and weight maps.
//!
//! Every polynomial in the crate lives over one fixed, global list of
//! variables: `q, a, b, c, z, x1, ..., x7`. A monomial is a dense exponent
//! vector over that list, so comparison, hashing and multiplication are
//! plain array operations.

use std::fmt;

/// Number of `x_i` slots available to multidimensional identities.
pub const MAX_X: usize = 7;
/// Total number of variables.
pub const NVARS: usize = 5 + MAX_X;

/// A variable in the fixed global order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u8);

impl Var {
    pub const Q: Var = Var(0);
    pub const A: Var = Var(1);
    pub const B: Var = Var(2);
    pub const C: Var = Var(3);
    pub const Z: Var = Var(4);

    /// The variable `x_i`, 1-based.
    pub fn x(i: usize) -> Var {
        assert!((1..=MAX_X).contains(&i), "x index {i} out of range 1..={MAX_X}");
        Var((4 + i) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Var {
        assert!(index < NVARS);
        Var(index as u8)
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS).map(Var::from_index)
    }

    pub fn name(self) -> String {
        match self.0 {
            0 => "q".into(),
            1 => "a".into(),
            2 => "b".into(),
            3 => "c".into(),
            4 => "z".into(),
            i => format!("x{}", i - 4),
        }
    }

    pub fn parse(name: &str) -> Option<Var> {
        match name {
            "q" => Some(Var::Q),
            "a" => Some(Var::A),
            "b" => Some(Var::B),
            "c" => Some(Var::C),
            "z" => Some(Var::Z),
            _ => {
                let i: usize = name.strip_prefix('x')?.parse().ok()?;
                (1..=MAX_X).contains(&i).then(|| Var::x(i))
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Exponent vector over the global variable order; negative entries allowed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub [i32; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var, exp: i32) -> Monomial {
        let mut m = Monomial::ONE;
        m.0[v.index()] = exp;
        m
    }

    pub fn from_pairs(pairs: &[(Var, i32)]) -> Monomial {
        let mut m = Monomial::ONE;
        for &(v, e) in pairs {
            m.0[v.index()] += e;
        }
        m
    }

    #[inline]
    pub fn exp(&self, v: Var) -> i32 {
        self.0[v.index()]
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0i32; NVARS];
        for (o, (x, y)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = x + y;
        }
        Monomial(out)
    }

    pub fn inv(&self) -> Monomial {
        let mut out = self.0;
        out.iter_mut().for_each(|e| *e = -*e);
        Monomial(out)
    }

    pub fn pow(&self, k: i32) -> Monomial {
        let mut out = self.0;
        out.iter_mut().for_each(|e| *e *= k);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn with_exp(&self, v: Var, exp: i32) -> Monomial {
        let mut out = *self;
        out.0[v.index()] = exp;
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in Var::all() {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Per-variable nonnegative integer weights defining the grading.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct WeightMap(pub [u32; NVARS]);

impl WeightMap {
    /// All weights zero.
    pub fn zero() -> WeightMap {
        WeightMap([0; NVARS])
    }

    /// The default grading `w(q) = w(a) = w(b) = 1`, everything else 0.
    pub fn standard() -> WeightMap {
        WeightMap::zero().with(Var::Q, 1).with(Var::A, 1).with(Var::B, 1)
    }

    /// Only `q` carries weight.
    pub fn q_only() -> WeightMap {
        WeightMap::zero().with(Var::Q, 1)
    }

    pub fn with(mut self, v: Var, w: u32) -> WeightMap {
        self.0[v.index()] = w;
        self
    }

    #[inline]
    pub fn get(&self, v: Var) -> i64 {
        self.0[v.index()] as i64
    }

    #[inline]
    pub fn weight(&self, m: &Monomial) -> i64 {
        m.0.iter()
            .zip(self.0.iter())
            .map(|(&e, &w)| e as i64 * w as i64)
            .sum()
    }
}

impl Default for WeightMap {
    fn default() -> Self {
        WeightMap::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in Var::all() {
            assert_eq!(Var::parse(&v.name()), Some(v));
        }
        assert_eq!(Var::parse("x0"), None);
        assert_eq!(Var::parse("y"), None);
    }

    #[test]
    fn standard_weights() {
        let w = WeightMap::standard();
        let m = Monomial::from_pairs(&[(Var::Q, -2), (Var::A, 3), (Var::Z, 5), (Var::x(2), -1)]);
        assert_eq!(w.weight(&m), 1);
        assert_eq!(format!("{m}"), "q^-2*a^3*z^5*x2^-1");
    }
}
