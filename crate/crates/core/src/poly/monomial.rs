use std::fmt;

/// Power product `x_{i1}^{e1} ... x_{ir}^{er}` stored as `(variable, exponent)`
/// pairs sorted by variable, with every exponent positive.
///
/// The derived ordering compares these pair lists lexicographically; it fixes the
/// term order of every serialized polynomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Monomial(vec![(index, 1)])
    }

    /// Builds a monomial from arbitrary `(variable, exponent)` pairs, merging
    /// repeated variables and dropping zero exponents.
    pub fn from_exponents(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(usize, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(v.len());
        for (i, e) in v {
            match out.last_mut() {
                Some((j, f)) if *j == i => *f += e,
                _ => out.push((i, e)),
            }
        }
        Monomial(out)
    }

    /// Squarefree monomial over the set bits of `mask` (bit `i` is variable `i`).
    pub fn from_mask(mask: u64) -> Self {
        Monomial((0..64).filter(|i| mask >> i & 1 == 1).map(|i| (i, 1)).collect())
    }

    /// Bit mask of the variables present. Only meaningful when all indices are < 64.
    pub fn support_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &(i, _)| m | (1u64 << i))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0
            .binary_search_by_key(&var, |&(i, _)| i)
            .map(|pos| self.0[pos].1)
            .unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(i, _)| i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    /// Replaces every exponent by 1 (`x^e = x` on `{0,1}`).
    pub fn multilinear(&self) -> Self {
        Monomial(self.0.iter().map(|&(i, _)| (i, 1)).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(i, f)| (i, f * e)).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(i, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            // 1-based names, matching x_1..x_n
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_and_multiply() {
        let m = Monomial::from_exponents([(2, 1), (0, 2), (2, 3), (5, 0)]);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(0, 2), (2, 4)]);
        assert_eq!(m.degree(), 6);
        let p = m.mul(&Monomial::var(1));
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![(0, 2), (1, 1), (2, 4)]);
        assert_eq!(p.multilinear().support_mask(), 0b111);
        assert_eq!(Monomial::from_mask(0b101), Monomial::from_exponents([(0, 1), (2, 1)]));
        assert_eq!(p.to_string(), "x1^2*x2*x3^4");
    }
}
