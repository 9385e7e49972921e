//! Truth tables over up to 8 variables, the exact backing for cone rewriting.

/// A single product term over up to 8 variables.
///
/// Bit `v` of `pos` means variable `v` appears positive, bit `v` of `neg`
/// means it appears complemented. A variable absent from both masks is
/// unconstrained; `pos == 0 && neg == 0` is the universal cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cube {
    pub pos: u8,
    pub neg: u8,
}

impl Cube {
    pub const UNIVERSAL: Cube = Cube { pos: 0, neg: 0 };

    pub fn literal_count(&self) -> u32 {
        self.pos.count_ones() + self.neg.count_ones()
    }

    fn with_literal(self, var: usize, positive: bool) -> Cube {
        let bit = 1u8 << var;
        if positive {
            Cube { pos: self.pos | bit, neg: self.neg }
        } else {
            Cube { pos: self.pos, neg: self.neg | bit }
        }
    }
}

pub const MAX_VARS: usize = 8;

/// Complete Boolean function of `nvars <= 8` inputs, one bit per assignment.
///
/// Bit `i` holds the function value on the assignment whose variable `v`
/// equals bit `v` of `i`. Bits above `2^nvars` are kept zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    nvars: usize,
    words: [u64; 4],
}

impl TruthTable {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        TruthTable { nvars, words: [0; 4] }
    }

    pub fn ones(nvars: usize) -> Self {
        let mut t = Self::zero(nvars);
        for i in 0..t.len() {
            t.set_bit(i, true);
        }
        t
    }

    pub fn var(v: usize, nvars: usize) -> Self {
        assert!(v < nvars);
        let mut t = Self::zero(nvars);
        for i in 0..t.len() {
            t.set_bit(i, (i >> v) & 1 == 1);
        }
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of rows, `2^nvars`.
    pub fn len(&self) -> usize {
        1 << self.nvars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len());
        (self.words[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, idx: usize, value: bool) {
        debug_assert!(idx < self.len());
        if value {
            self.words[idx / 64] |= 1u64 << (idx % 64);
        } else {
            self.words[idx / 64] &= !(1u64 << (idx % 64));
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_ones(&self) -> bool {
        *self == Self::ones(self.nvars)
    }

    pub fn not(&self) -> Self {
        let mut t = Self::zero(self.nvars);
        for i in 0..self.len() {
            t.set_bit(i, !self.bit(i));
        }
        t
    }

    pub fn and(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut t = *self;
        for (w, o) in t.words.iter_mut().zip(other.words.iter()) {
            *w &= o;
        }
        t
    }

    pub fn or(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut t = *self;
        for (w, o) in t.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
        t
    }

    pub fn xor(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut t = *self;
        for (w, o) in t.words.iter_mut().zip(other.words.iter()) {
            *w ^= o;
        }
        t
    }

    /// Cofactor with variable `v` fixed to `value`; result stays on `nvars` vars.
    pub fn cofactor(&self, v: usize, value: bool) -> Self {
        assert!(v < self.nvars);
        let mut t = Self::zero(self.nvars);
        for i in 0..self.len() {
            let src = if value { i | (1 << v) } else { i & !(1 << v) };
            t.set_bit(i, self.bit(src));
        }
        t
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.cofactor(v, false) != self.cofactor(v, true)
    }

    /// Variables the function actually depends on, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|v| self.depends_on(*v)).collect()
    }

    /// Re-express the function over exactly the variables in `vars`
    /// (which must contain the support); variable `vars[j]` becomes input `j`.
    pub fn project(&self, vars: &[usize]) -> Self {
        let mut t = Self::zero(vars.len());
        for i in 0..t.len() {
            let mut full = 0usize;
            for (j, v) in vars.iter().enumerate() {
                if (i >> j) & 1 == 1 {
                    full |= 1 << v;
                }
            }
            t.set_bit(i, self.bit(full));
        }
        t
    }

    fn cube_table(cube: &Cube, nvars: usize) -> TruthTable {
        let mut t = Self::ones(nvars);
        for v in 0..nvars {
            let bit = 1u8 << v;
            if cube.pos & bit != 0 {
                t = t.and(&Self::var(v, nvars));
            }
            if cube.neg & bit != 0 {
                t = t.and(&Self::var(v, nvars).not());
            }
        }
        t
    }

    /// OR of a cube cover, as a table on `nvars` variables.
    pub fn from_cubes(cubes: &[Cube], nvars: usize) -> Self {
        let mut t = Self::zero(nvars);
        for c in cubes {
            t = t.or(&Self::cube_table(c, nvars));
        }
        t
    }

    /// Irredundant sum-of-products cover (Minato-Morreale).
    ///
    /// The returned cubes OR together to exactly this function.
    pub fn isop(&self) -> Vec<Cube> {
        let cover = isop_rec(self, self, self.nvars);
        debug_assert_eq!(Self::from_cubes(&cover, self.nvars), *self);
        cover
    }
}

// lower ≤ target function ≤ upper; returns cubes covering at least `lower`
// without exceeding `upper`.
fn isop_rec(lower: &TruthTable, upper: &TruthTable, nvars: usize) -> Vec<Cube> {
    if lower.is_zero() {
        return Vec::new();
    }
    if upper.is_ones() {
        return vec![Cube::UNIVERSAL];
    }
    // split on the highest variable either bound depends on
    let v = (0..nvars)
        .rev()
        .find(|v| lower.depends_on(*v) || upper.depends_on(*v))
        .expect("non-constant bounds must have support");

    let l0 = lower.cofactor(v, false);
    let l1 = lower.cofactor(v, true);
    let u0 = upper.cofactor(v, false);
    let u1 = upper.cofactor(v, true);

    // parts that can only be covered by cubes carrying ~v / v
    let c0 = isop_rec(&l0.and(&u1.not()), &u0, nvars);
    let c1 = isop_rec(&l1.and(&u0.not()), &u1, nvars);

    let covered0 = TruthTable::from_cubes(&c0, nvars);
    let covered1 = TruthTable::from_cubes(&c1, nvars);
    let rest_lower = l0.and(&covered0.not()).or(&l1.and(&covered1.not()));
    let rest = isop_rec(&rest_lower, &u0.and(&u1), nvars);

    let mut out: Vec<Cube> = Vec::with_capacity(c0.len() + c1.len() + rest.len());
    out.extend(c0.into_iter().map(|c| c.with_literal(v, false)));
    out.extend(c1.into_iter().map(|c| c.with_literal(v, true)));
    out.extend(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_and_cofactor() {
        let a = TruthTable::var(0, 3);
        let b = TruthTable::var(1, 3);
        let f = a.and(&b);
        assert!(f.bit(0b011));
        assert!(!f.bit(0b001));
        assert_eq!(f.cofactor(0, true), b.cofactor(0, true));
        assert_eq!(f.support(), vec![0, 1]);
    }

    #[test]
    fn project_reduces_support() {
        // f(x0,x1,x2) = x2, projected onto [2] becomes identity on one var
        let f = TruthTable::var(2, 3);
        let p = f.project(&[2]);
        assert_eq!(p, TruthTable::var(0, 1));
    }

    #[test]
    fn isop_exact_on_random_functions() {
        // deterministic LCG so the test is stable
        let mut state = 0x9E3779B97F4A7C15u64;
        for nvars in 0..=6usize {
            for _ in 0..40 {
                let mut t = TruthTable::zero(nvars);
                for i in 0..t.len() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    t.set_bit(i, state >> 63 == 1);
                }
                let cover = t.isop();
                assert_eq!(TruthTable::from_cubes(&cover, nvars), t);
            }
        }
    }

    #[test]
    fn isop_factored_shapes() {
        // a*b + a*c has a two-cube irredundant cover
        let a = TruthTable::var(0, 3);
        let b = TruthTable::var(1, 3);
        let c = TruthTable::var(2, 3);
        let f = a.and(&b).or(&a.and(&c));
        let cover = f.isop();
        assert_eq!(cover.len(), 2);
        assert!(cover.iter().all(|cb| cb.pos & 1 != 0));
    }
}
