use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{bin, bin_of};
use crate::error::{Error, Result};
use crate::geometry::Rational;
use crate::markov::MarkovChain;

/// Sparse row-stochastic matrix of the chain's action on equal cells:
/// entry `(i, j)` is the probability of moving from a uniform point of cell
/// `i` into cell `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UlamMatrix {
    n_bins: usize,
    rows: Vec<Vec<(usize, Rational)>>,
}

/// Accepts cell counts of the form `2^a 3^b`.
pub fn check_bins(n: usize) -> Result<()> {
    let mut m = n;
    if m == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    while m % 2 == 0 {
        m /= 2;
    }
    while m % 3 == 0 {
        m /= 3;
    }
    if m == 1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("bin count {n} is not of the form 2^a 3^b")))
    }
}

pub fn ulam_matrix(chain: &MarkovChain, n_bins: usize) -> Result<UlamMatrix> {
    check_bins(n_bins)?;
    if let Some(t) = chain.generators().maps().iter().find(|t| !t.is_affine()) {
        return Err(Error::Unsupported(format!(
            "cell transitions of `{}` need exact preimages of a nonlinear branch",
            t.label()
        )));
    }
    let scale = Rational::from_integer(n_bins as i64);
    let rows = (0..n_bins)
        .into_par_iter()
        .map(|i| {
            let cell = bin(i, n_bins);
            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, p) in chain.generators().maps().iter().zip(chain.probs()) {
                if p.is_zero() {
                    continue;
                }
                for piece in t.pieces() {
                    let Some(d) = piece.domain.intersect(&cell) else { continue };
                    let len = d.length();
                    if len.is_zero() {
                        continue;
                    }
                    let slope = piece.poly.coeff(1);
                    if slope.is_zero() {
                        let j = bin_of(&piece.poly.coeff(0), n_bins);
                        let e = row.entry(j).or_insert_with(Rational::zero);
                        *e = &*e + &(p * &(&len * &scale));
                        continue;
                    }
                    let (a, b) = (piece.poly.eval(d.lo()), piece.poly.eval(d.hi()));
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    // Mass lands uniformly on the image, with density n / |slope|.
                    let factor = p * &(&scale / &slope.abs());
                    for j in bin_of(&lo, n_bins)..=bin_of(&hi, n_bins) {
                        let c = bin(j, n_bins);
                        let overlap = c.hi().min(&hi) - c.lo().max(&lo);
                        if overlap.is_positive() {
                            let e = row.entry(j).or_insert_with(Rational::zero);
                            *e = &*e + &(&factor * &overlap);
                        }
                    }
                }
            }
            row.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        })
        .collect();
    Ok(UlamMatrix { n_bins, rows })
}

impl UlamMatrix {
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational)>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .iter()
            .find(|(k, _)| *k == j)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        self.rows[i].iter().map(|(_, v)| v).sum()
    }

    pub fn is_stochastic(&self) -> bool {
        (0..self.n_bins).all(|i| self.row_sum(i) == Rational::one())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `v M` for a row vector `v`.
    pub fn left_multiply(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n_bins];
        for (vi, row) in v.iter().zip(&self.rows) {
            if vi.is_zero() {
                continue;
            }
            for (j, m) in row {
                out[*j] = &out[*j] + &(vi * m);
            }
        }
        out
    }

    /// Coordinate-format text with 1-based indices and `p/q` values.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate rational general\n");
        let _ = writeln!(s, "{} {} {}", self.n_bins, self.n_bins, self.nnz());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_counts() {
        for ok in [1, 2, 3, 4, 6, 12, 256, 96] {
            assert!(check_bins(ok).is_ok());
        }
        for bad in [0, 5, 10, 14] {
            assert!(check_bins(bad).is_err());
        }
    }
}
