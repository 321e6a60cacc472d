use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, ExactRational};

/// Real-valued function on `{0,1}^n`, indexed with `x_1` as the least
/// significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct RealTable {
    n: usize,
    values: Vec<ExactRational>,
}

/// Boolean function on `{0,1}^n`, same indexing as [`RealTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanTable {
    n: usize,
    values: Vec<bool>,
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n >= usize::BITS as usize || len != 1usize << n {
        return Err(Error::LengthMismatch {
            expected: 1usize.checked_shl(n as u32).unwrap_or(0),
            got: len,
        });
    }
    Ok(())
}

impl RealTable {
    pub fn new(n: usize, values: Vec<ExactRational>) -> Result<Self> {
        check_len(n, values.len())?;
        Ok(RealTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> ExactRational) -> Self {
        RealTable {
            n,
            values: (0..1usize << n).map(f).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    /// `f - tau`.
    pub fn shifted(&self, tau: &ExactRational) -> RealTable {
        RealTable {
            n: self.n,
            values: self.values.iter().map(|v| v - tau).collect(),
        }
    }

    /// The Boolean function `[f(x) > tau]`.
    pub fn above(&self, tau: &ExactRational) -> BooleanTable {
        BooleanTable {
            n: self.n,
            values: self.values.iter().map(|v| v > tau).collect(),
        }
    }
}

impl BooleanTable {
    pub fn new(n: usize, values: Vec<bool>) -> Result<Self> {
        check_len(n, values.len())?;
        Ok(BooleanTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        BooleanTable {
            n,
            values: (0..1usize << n).map(f).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, index: usize) -> bool {
        self.values[index]
    }

    /// `2g - 1`: the ±1 encoding as a real table.
    pub fn to_signs(&self) -> RealTable {
        RealTable {
            n: self.n,
            values: self.values.iter().map(|&b| int(if b { 1 } else { -1 })).collect(),
        }
    }
}

/// `x_1 xor ... xor x_n`.
pub fn parity(n: usize) -> BooleanTable {
    BooleanTable::from_fn(n, |idx| idx.count_ones() % 2 == 1)
}

/// Majority of an odd number of bits.
pub fn majority(n: usize) -> BooleanTable {
    BooleanTable::from_fn(n, |idx| 2 * idx.count_ones() as usize > n)
}

fn same_n(f: &RealTable, g: &BooleanTable) -> Result<()> {
    if f.n != g.n {
        return Err(Error::LengthMismatch {
            expected: g.values.len(),
            got: f.values.len(),
        });
    }
    Ok(())
}

/// `f(x) > 0` exactly when `g(x) = 1`; `f(x) = 0` falls on the `g = 0` side.
pub fn sign_represents(f: &RealTable, g: &BooleanTable) -> Result<bool> {
    same_n(f, g)?;
    Ok(f.values.iter().zip(&g.values).all(|(v, &b)| v.is_positive() == b))
}

/// `g = 1 => f >= tau + gamma` and `g = 0 => f <= tau - gamma`.
pub fn margin_represents(
    f: &RealTable,
    g: &BooleanTable,
    tau: &ExactRational,
    gamma: &ExactRational,
) -> Result<bool> {
    same_n(f, g)?;
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter("margin gamma must be positive".into()));
    }
    let hi = tau + gamma;
    let lo = tau - gamma;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .all(|(v, &b)| if b { *v >= hi } else { *v <= lo }))
}

/// Threshold and margin with the largest `gamma`, or `None` when the two classes
/// are not strictly separated (or one class is empty).
pub fn best_margin(f: &RealTable, g: &BooleanTable) -> Result<Option<(ExactRational, ExactRational)>> {
    same_n(f, g)?;
    let ones = f.values.iter().zip(&g.values).filter(|(_, &b)| b).map(|(v, _)| v);
    let zeros = f.values.iter().zip(&g.values).filter(|(_, &b)| !b).map(|(v, _)| v);
    let (Some(min_one), Some(max_zero)) = (ones.min(), zeros.max()) else {
        return Ok(None);
    };
    let two = int(2);
    let gamma = (min_one - max_zero) / &two;
    if !gamma.is_positive() {
        return Ok(None);
    }
    Ok(Some(((min_one + max_zero) / two, gamma)))
}

/// Mean over `x` of the number of coordinates whose flip changes `g(x)`.
pub fn average_sensitivity(g: &BooleanTable) -> ExactRational {
    let size = g.values.len();
    let flips: usize = (0..size)
        .map(|x| (0..g.n).filter(|&i| g.values[x] != g.values[x ^ (1 << i)]).count())
        .sum();
    ExactRational::new(flips.into(), size.into())
}

/// `|E_x[(-1)^{g(x)} (-1)^{parity(x)}]|`.
pub fn parity_correlation(g: &BooleanTable) -> ExactRational {
    let size = g.values.len();
    let agree: i64 = g
        .values
        .iter()
        .enumerate()
        .map(|(x, &b)| if b == (x.count_ones() % 2 == 1) { 1 } else { -1 })
        .sum();
    ExactRational::new(agree.abs().into(), size.into())
}

impl RealTable {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parity_tables() {
        assert_eq!(parity(1).values(), &[false, true]);
        assert_eq!(parity(2).values(), &[false, true, true, false]);
        assert!(parity(3).get(0b111));
        assert!(BooleanTable::new(2, vec![true; 3]).is_err());
    }

    #[test]
    fn sign_examples() {
        let g = parity(2);
        assert!(sign_represents(&g.to_signs(), &g).unwrap());
        let zero = RealTable::from_fn(2, |_| int(0));
        assert!(!sign_represents(&zero, &g).unwrap());
        let f = RealTable::new(2, vec![int(-1), int(1), int(1), int(-1)]).unwrap();
        assert!(sign_represents(&f, &g).unwrap());
        assert!(sign_represents(&f, &parity(3)).is_err());
    }

    #[test]
    fn margin_examples() {
        let g = majority(3);
        let f = g.to_signs();
        assert!(margin_represents(&f, &g, &int(0), &int(1)).unwrap());
        assert!(!margin_represents(&f, &g, &int(0), &ratio(3, 2)).unwrap());
        assert!(margin_represents(&f, &g, &int(0), &int(0)).is_err());
    }

    #[test]
    fn best_margin_examples() {
        let g = parity(2);
        assert_eq!(best_margin(&g.to_signs(), &g).unwrap(), Some((int(0), int(1))));
        let half = RealTable::from_fn(2, |_| ratio(1, 2));
        assert_eq!(best_margin(&half, &g).unwrap(), None);
        let constant = BooleanTable::from_fn(2, |_| false);
        assert_eq!(best_margin(&half, &constant).unwrap(), None);
    }

    #[test]
    fn sensitivity_examples() {
        for n in 1..=12 {
            assert_eq!(average_sensitivity(&parity(n)), int(n as i64));
            assert_eq!(parity_correlation(&parity(n)), int(1));
        }
        let constant = BooleanTable::from_fn(4, |_| true);
        assert_eq!(average_sensitivity(&constant), int(0));
        assert_eq!(parity_correlation(&constant), int(0));
        assert_eq!(average_sensitivity(&majority(3)), ratio(3, 2));
        let dictator = BooleanTable::from_fn(2, |x| x & 1 == 1);
        assert_eq!(parity_correlation(&dictator), int(0));
    }
}
