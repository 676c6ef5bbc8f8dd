use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{factorial, ExactError, ExactRational};

/// Depth beyond which `tree_row_sum` refuses to run (2^22 leaves).
pub const DEFAULT_TREE_CAP: usize = 22;

/// Largest row that `TermBag` will hold in memory.
pub const MATERIALIZE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    L,
    R,
}

/// A tree node `±1/(a!·b!·…)`.
///
/// The argument list is ordered: index 0 is the head, the most recently
/// created factorial slot, and the only one `O_L` touches.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalTerm {
    pub sign: i8,
    pub factorial_args: Vec<u32>,
}

impl FormalTerm {
    /// The root `+1/2!`.
    pub fn seed() -> Self {
        FormalTerm { sign: 1, factorial_args: vec![2] }
    }

    pub fn new(sign: i8, factorial_args: Vec<u32>) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        assert!(
            !factorial_args.is_empty() && factorial_args.iter().all(|&a| a >= 2),
            "factorial arguments must be ≥ 2"
        );
        FormalTerm { sign, factorial_args }
    }

    pub fn value(&self) -> ExactRational {
        let den = self
            .factorial_args
            .iter()
            .fold(BigInt::one(), |acc, &a| acc * factorial(a as usize));
        ExactRational::new(BigInt::from(self.sign), den)
    }

    pub fn apply(&self, which: Branch) -> FormalTerm {
        apply_operator(self, which)
    }
}

impl fmt::Display for FormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign > 0 { '+' } else { '-' };
        let args: Vec<String> = self.factorial_args.iter().map(|a| format!("{a}!")).collect();
        write!(f, "{sign}1/({})", args.join("·"))
    }
}

/// `O_L`: bump the head argument and flip the sign. `O_R`: prepend `2!`.
pub fn apply_operator(t: &FormalTerm, which: Branch) -> FormalTerm {
    match which {
        Branch::L => {
            let mut args = t.factorial_args.clone();
            args[0] += 1;
            FormalTerm { sign: -t.sign, factorial_args: args }
        }
        Branch::R => {
            let mut args = Vec::with_capacity(t.factorial_args.len() + 1);
            args.push(2);
            args.extend_from_slice(&t.factorial_args);
            FormalTerm { sign: t.sign, factorial_args: args }
        }
    }
}

/// One fully materialized row of the tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermBag {
    pub terms: Vec<FormalTerm>,
    pub row_index: usize,
}

impl TermBag {
    pub fn seed() -> Self {
        TermBag { terms: vec![FormalTerm::seed()], row_index: 0 }
    }

    /// Apply `O_L + O_R` to every term.
    pub fn step(&self) -> TermBag {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            terms.push(apply_operator(t, Branch::L));
            terms.push(apply_operator(t, Branch::R));
        }
        TermBag { terms, row_index: self.row_index + 1 }
    }

    /// Row `n`, or `None` past [`MATERIALIZE_CAP`].
    pub fn row(n: usize) -> Option<TermBag> {
        if n > MATERIALIZE_CAP {
            return None;
        }
        let mut bag = TermBag::seed();
        for _ in 0..n {
            bag = bag.step();
        }
        Some(bag)
    }

    pub fn sum(&self) -> ExactRational {
        self.terms.iter().fold(ExactRational::zero(), |acc, t| acc + t.value())
    }
}

/// `S_n`, the sum of row `n`, with the default depth cap.
pub fn tree_row_sum(n: usize) -> Result<ExactRational, ExactError> {
    tree_row_sum_capped(n, DEFAULT_TREE_CAP)
}

/// `S_n` by walking all `2^n` leaves without materializing them.
///
/// Every node is tracked as `(sign, head, D/Π a_i!)` with `D = (2n+2)!`.
/// Each node's factorial product divides `D` because the arguments sum to at
/// most `2n+2`, so the walk stays in integers and only the final sum is
/// divided by `D`.
pub fn tree_row_sum_capped(n: usize, cap: usize) -> Result<ExactRational, ExactError> {
    if n > cap {
        return Err(ExactError::RowTooDeep { n, cap });
    }
    let d = factorial(2 * n + 2).to_biguint().expect("factorial is positive");
    let q0 = &d / 2u32;
    let (pos, neg) = if n >= 8 {
        // split the top three levels across threads
        let mut frontier = vec![(true, 2u32, q0)];
        let split = 3.min(n);
        for _ in 0..split {
            frontier = frontier
                .into_iter()
                .flat_map(|(plus, head, q)| {
                    let left = (!plus, head + 1, &q / (head + 1));
                    let right = (plus, 2, &q / 2u32);
                    [left, right]
                })
                .collect();
        }
        let depth = n - split;
        std::thread::scope(|scope| {
            let handles: Vec<_> = frontier
                .into_iter()
                .map(|(plus, head, q)| {
                    scope.spawn(move || {
                        let mut acc = (BigUint::zero(), BigUint::zero());
                        walk(plus, head, q, depth, &mut acc);
                        acc
                    })
                })
                .collect();
            handles.into_iter().fold((BigUint::zero(), BigUint::zero()), |(p, m), h| {
                let (a, b) = h.join().expect("tree worker panicked");
                (p + a, m + b)
            })
        })
    } else {
        let mut acc = (BigUint::zero(), BigUint::zero());
        walk(true, 2, q0, n, &mut acc);
        acc
    };
    let num = BigInt::from(pos) - BigInt::from(neg);
    Ok(BigRational::new(num, BigInt::from(d)))
}

fn walk(plus: bool, head: u32, q: BigUint, depth: usize, acc: &mut (BigUint, BigUint)) {
    if depth == 0 {
        if plus {
            acc.0 += q;
        } else {
            acc.1 += q;
        }
        return;
    }
    walk(!plus, head + 1, &q / (head + 1), depth - 1, acc);
    walk(plus, 2, q / 2u32, depth - 1, acc);
}

/// `S_n` as the determinant of the `(n+1)×(n+1)` lower Hessenberg matrix
/// with `M[i][j] = 1/(i−j+2)!` for `j ≤ i` and ones on the superdiagonal.
pub fn determinant_s(n: usize) -> ExactRational {
    let size = n + 1;
    let inv_fact: Vec<ExactRational> = (0..=size + 1)
        .map(|k| ExactRational::new(BigInt::one(), factorial(k)))
        .collect();
    let mut m: Vec<Vec<ExactRational>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    if j <= i {
                        inv_fact[i - j + 2].clone()
                    } else if j == i + 1 {
                        ExactRational::one()
                    } else {
                        ExactRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    determinant(&mut m)
}

/// Gaussian elimination over the rationals; consumes the matrix.
fn determinant(m: &mut [Vec<ExactRational>]) -> ExactRational {
    let size = m.len();
    let mut det = ExactRational::one();
    for col in 0..size {
        let Some(pivot) = (col..size).find(|&r| !m[r][col].is_zero()) else {
            return ExactRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..size {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..size {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p.into(), d.into())
    }

    #[test]
    fn first_branches() {
        let seed = FormalTerm::seed();
        let l = apply_operator(&seed, Branch::L);
        assert_eq!(l, FormalTerm::new(-1, vec![3]));
        assert_eq!(l.value(), q(-1, 6));
        let r = apply_operator(&seed, Branch::R);
        assert_eq!(r.value(), q(1, 4));
        assert_eq!(r.to_string(), "+1/(2!·2!)");
    }

    #[test]
    fn left_acts_on_head() {
        let t = FormalTerm::new(-1, vec![3, 2]);
        let l = apply_operator(&t, Branch::L);
        assert_eq!(l, FormalTerm::new(1, vec![4, 2]));
        assert_eq!(l.value(), q(1, 48));
    }

    #[test]
    fn row_two_matches_worked_example() {
        let bag = TermBag::row(2).unwrap();
        let mut values: Vec<_> = bag.terms.iter().map(|t| t.value()).collect();
        values.sort();
        let mut want = vec![q(1, 24), q(-1, 12), q(-1, 12), q(1, 8)];
        want.sort();
        assert_eq!(values, want);
        assert!(bag.sum().is_zero());
    }

    #[test]
    fn streaming_sum_matches_bag() {
        for n in 0..=12 {
            let bag = TermBag::row(n).unwrap();
            assert_eq!(bag.terms.len(), 1 << n);
            assert_eq!(tree_row_sum(n).unwrap(), bag.sum(), "n = {n}");
        }
    }

    #[test]
    fn small_rows() {
        assert_eq!(tree_row_sum(0).unwrap(), q(1, 2));
        assert_eq!(tree_row_sum(1).unwrap(), q(1, 12));
        assert_eq!(tree_row_sum(2).unwrap(), q(0, 1));
        assert_eq!(tree_row_sum(3).unwrap(), q(-1, 720));
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(tree_row_sum(23), Err(ExactError::RowTooDeep { n: 23, cap: 22 }));
        assert!(tree_row_sum_capped(5, 4).is_err());
        assert!(TermBag::row(MATERIALIZE_CAP + 1).is_none());
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant_s(0), q(1, 2));
        assert_eq!(determinant_s(1), q(1, 12));
        assert_eq!(determinant_s(2), q(0, 1));
        assert_eq!(determinant_s(3), q(-1, 720));
    }

    #[test]
    fn determinant_swaps_rows() {
        let mut m = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(determinant(&mut m), q(-1, 1));
    }
}
