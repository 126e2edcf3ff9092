//! Pair partitions of `k + l` boundary points evaluated as operators built
//! from `R`-cups, `R*`-caps and through-strings.

use nalgebra::DMatrix;

use crate::linalg::rank;
use crate::scalar::{ipow, one, zero, Real, C};
use crate::tensor::{decode_multi_index, FMatrix, InterOp};

/// A perfect matching of `k` lower and `l` upper points.
///
/// Points are numbered `0..k` for the lower row (left to right) and
/// `k..k+l` for the upper row (left to right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPartition {
    lower: usize,
    upper: usize,
    pairs: Vec<(usize, usize)>,
    crossing: bool,
}

impl PairPartition {
    /// Checks the matching and computes its crossing flag.
    pub fn new(lower: usize, upper: usize, pairs: Vec<(usize, usize)>) -> Option<Self> {
        let n = lower + upper;
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            if a >= n || b >= n || a == b || seen[a] || seen[b] {
                return None;
            }
            seen[a] = true;
            seen[b] = true;
        }
        if seen.iter().any(|s| !s) {
            return None;
        }
        let pairs: Vec<_> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let crossing = has_crossing(lower, upper, &pairs);
        Some(Self {
            lower,
            upper,
            pairs,
            crossing,
        })
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_crossing(&self) -> bool {
        self.crossing
    }

    /// Entry `(row i⃗, col j⃗)`: cups contribute `F_{i_b i_a}`, caps
    /// `conj(F_{j_b j_a})`, through-strings `δ`.
    pub fn evaluate<T: Real>(&self, f: &FMatrix<T>) -> InterOp<T> {
        let d = f.dim();
        let (k, l) = (self.lower, self.upper);
        let fe = f.entries();
        let mat = DMatrix::from_fn(ipow(d, l), ipow(d, k), |row, col| {
            let i = decode_multi_index(d, l, row);
            let j = decode_multi_index(d, k, col);
            let mut v: C<T> = one();
            for &(a, b) in &self.pairs {
                let factor = match (a < k, b < k) {
                    (true, true) => fe[(j[b], j[a])].conj(),
                    (false, false) => fe[(i[b - k], i[a - k])],
                    _ => {
                        if j[a] == i[b - k] {
                            one()
                        } else {
                            zero()
                        }
                    }
                };
                v *= factor;
                if v == zero() {
                    break;
                }
            }
            v
        });
        InterOp::new(d, k, l, mat).expect("shape by construction")
    }
}

/// Position on the boundary circle: lower points left to right, then upper
/// points right to left.
fn circle_position(lower: usize, upper: usize, p: usize) -> usize {
    if p < lower {
        p
    } else {
        lower + (upper - 1 - (p - lower))
    }
}

fn has_crossing(lower: usize, upper: usize, pairs: &[(usize, usize)]) -> bool {
    let arcs: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (
                circle_position(lower, upper, a),
                circle_position(lower, upper, b),
            );
            (x.min(y), x.max(y))
        })
        .collect();
    arcs.iter().enumerate().any(|(n, &(a, b))| {
        arcs[n + 1..]
            .iter()
            .any(|&(c, e)| (a < c && c < b && b < e) || (c < a && a < e && e < b))
    })
}

fn matchings(
    points: &mut Vec<usize>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if points.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = points.remove(0);
    for idx in 0..points.len() {
        let partner = points.remove(idx);
        current.push((first, partner));
        matchings(points, current, out);
        current.pop();
        points.insert(idx, partner);
    }
    points.insert(0, first);
}

/// Every pair partition of `k + l` points; empty when `k + l` is odd.
pub fn all_pairings(k: usize, l: usize) -> Vec<PairPartition> {
    if (k + l) % 2 == 1 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    matchings(&mut (0..k + l).collect(), &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|p| PairPartition::new(k, l, p).expect("valid matching"))
        .collect()
}

pub fn noncrossing_pairings(k: usize, l: usize) -> Vec<PairPartition> {
    all_pairings(k, l)
        .into_iter()
        .filter(|p| !p.is_crossing())
        .collect()
}

/// Rank of the Hilbert–Schmidt span of all noncrossing diagrams in `(k, l)`.
pub fn diagram_oracle_dims<T: Real>(f: &FMatrix<T>, k: usize, l: usize, tol: T) -> usize {
    let diagrams = noncrossing_pairings(k, l);
    if diagrams.is_empty() {
        return 0;
    }
    let d = f.dim();
    let rows = ipow(d, k + l);
    let mut m = DMatrix::zeros(rows, diagrams.len());
    for (c, p) in diagrams.iter().enumerate() {
        m.set_column(c, &p.evaluate(f).to_vector());
    }
    rank(&m, tol)
}

/// Oracle table indexed `[k][l]` for `k, l ≤ n`.
pub fn diagram_oracle_table<T: Real>(f: &FMatrix<T>, n: usize, tol: T) -> Vec<Vec<usize>> {
    (0..=n)
        .map(|k| (0..=n).map(|l| diagram_oracle_dims(f, k, l, tol)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;
    use crate::tensor::{build_r_from_f, left_snake, right_snake};

    const TOL: f64 = 1e-9;

    fn symplectic() -> FMatrix<f64> {
        let m = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
        FMatrix::new(m, TOL).unwrap()
    }

    #[test]
    fn pairing_counts() {
        // (2n-1)!! pairings, Catalan many noncrossing.
        assert_eq!(all_pairings(2, 2).len(), 3);
        assert_eq!(all_pairings(3, 3).len(), 15);
        assert_eq!(noncrossing_pairings(0, 2).len(), 1);
        assert_eq!(noncrossing_pairings(2, 2).len(), 2);
        assert_eq!(noncrossing_pairings(1, 3).len(), 2);
        assert_eq!(noncrossing_pairings(3, 3).len(), 5);
        assert_eq!(noncrossing_pairings(4, 4).len(), 14);
        assert!(all_pairings(0, 1).is_empty());
    }

    #[test]
    fn crossing_flag() {
        // Lower {0,1}, upper {2,3}: pairing 0–3 and 1–2 is two through-strings
        // that cross on the circle 0,1,3,2.
        assert!(PairPartition::new(2, 2, vec![(0, 3), (1, 2)])
            .unwrap()
            .is_crossing());
        assert!(!PairPartition::new(2, 2, vec![(0, 2), (1, 3)])
            .unwrap()
            .is_crossing());
        assert!(!PairPartition::new(2, 2, vec![(0, 1), (2, 3)])
            .unwrap()
            .is_crossing());
        assert!(PairPartition::new(2, 2, vec![(0, 1), (1, 3)]).is_none());
    }

    #[test]
    fn diagrams_are_the_basic_morphisms() {
        let f = symplectic();
        let r = build_r_from_f(&f);
        let cup = PairPartition::new(0, 2, vec![(0, 1)]).unwrap().evaluate(&f);
        assert!(cup.approx_eq(&r, TOL));
        let cap = PairPartition::new(2, 0, vec![(0, 1)]).unwrap().evaluate(&f);
        assert!(cap.approx_eq(&r.adjoint(), TOL));
        let line = PairPartition::new(1, 1, vec![(0, 1)]).unwrap().evaluate(&f);
        assert!(line.approx_eq(&InterOp::identity(2, 1), TOL));
        // A snake is ± the through-string.
        let s = left_snake(&r).unwrap();
        assert!(s.approx_eq(&line, TOL) || s.approx_eq(&line.scale(re(-1.0)), TOL));
        assert!(right_snake(&r).unwrap().hs_norm() > 0.5);
    }

    #[test]
    fn oracle_values() {
        let id = FMatrix::<f64>::identity(2);
        assert_eq!(diagram_oracle_dims(&id, 0, 1, TOL), 0);
        assert_eq!(diagram_oracle_dims(&id, 0, 2, TOL), 1);
        assert_eq!(diagram_oracle_dims(&id, 2, 2, TOL), 2);
        assert_eq!(diagram_oracle_dims(&id, 3, 3, TOL), 5);
        assert_eq!(diagram_oracle_dims(&id, 1, 3, TOL), 2);
        assert_eq!(diagram_oracle_dims(&symplectic(), 3, 3, TOL), 5);
        // d = 1: every even cell is one-dimensional.
        let one_d = FMatrix::<f64>::identity(1);
        assert_eq!(diagram_oracle_dims(&one_d, 2, 2, TOL), 1);
        assert_eq!(diagram_oracle_dims(&one_d, 1, 0, TOL), 0);
    }
}
