//! Structural tests behind `Γ^UB = C_Wyner`: product restrictions of `π` on
//! the support rectangles of a decomposition, and pseudo-product form
//! `π(x,y) = α(x)β(y)` on `supp π`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{synthesis_error, FEASIBILITY_TOL};
use crate::dist::{Decomposition, JointDist};
use crate::error::{Error, Result};

const PRODUCT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionStar {
    pub holds: bool,
    /// first component whose restricted block is not a product
    pub first_violation: Option<usize>,
    /// largest cellwise deviation from the product of the block's marginals
    pub max_error: f64,
}

/// For every `w` with `P_W(w) > 0`, is `π` restricted to
/// `supp P_{X|W=w} × supp P_{Y|W=w}` (renormalized) a product distribution?
pub fn check_condition_star(pi: &JointDist, witness: &Decomposition) -> Result<ConditionStar> {
    if witness.x_card() != pi.rows() || witness.y_card() != pi.cols() {
        return Err(Error::InfeasibleWitness(format!(
            "witness is over {}x{}, distribution over {}x{}",
            witness.x_card(),
            witness.y_card(),
            pi.rows(),
            pi.cols()
        )));
    }
    let err = synthesis_error(pi, witness);
    if err > FEASIBILITY_TOL {
        return Err(Error::InfeasibleWitness(format!(
            "witness synthesizes the distribution only to TV {err:.3e}"
        )));
    }
    let mut first_violation = None;
    let mut max_error = 0.0f64;
    for w in witness.pw().support() {
        let rows = witness.px_given_w().row(w).support();
        let cols = witness.py_given_w().row(w).support();
        let mass: f64 = rows
            .iter()
            .flat_map(|&x| cols.iter().map(move |&y| (x, y)))
            .map(|(x, y)| pi.get(x, y))
            .sum();
        let dev = if mass <= 0.0 {
            1.0
        } else {
            let r: Vec<f64> = rows
                .iter()
                .map(|&x| cols.iter().map(|&y| pi.get(x, y)).sum::<f64>() / mass)
                .collect();
            let c: Vec<f64> = cols
                .iter()
                .map(|&y| rows.iter().map(|&x| pi.get(x, y)).sum::<f64>() / mass)
                .collect();
            let mut dev = 0.0f64;
            for (i, &x) in rows.iter().enumerate() {
                for (j, &y) in cols.iter().enumerate() {
                    dev = dev.max((pi.get(x, y) / mass - r[i] * c[j]).abs());
                }
            }
            dev
        };
        max_error = max_error.max(dev);
        if dev > PRODUCT_TOL && first_violation.is_none() {
            first_violation = Some(w);
        }
    }
    Ok(ConditionStar {
        holds: first_violation.is_none(),
        first_violation,
        max_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoProduct {
    pub holds: bool,
    /// `α`, `β` with `π = αβ` on the support, when `holds`
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    /// worst `|a(x) + b(y) − log π(x,y)|` over support cells (cycle defect)
    pub max_defect: f64,
}

/// Decides pseudo-product form by potentials on a spanning forest of the
/// bipartite support graph: every non-tree cell closes a cycle, and `log π`
/// must sum to zero around it.
pub fn is_pseudo_product(pi: &JointDist) -> PseudoProduct {
    let (m, n) = (pi.rows(), pi.cols());
    let logs = |x: usize, y: usize| pi.get(x, y).ln();
    // nodes: rows 0..m, cols m..m+n
    let mut pot = vec![f64::NAN; m + n];
    for root in 0..m + n {
        if !pot[root].is_nan() {
            continue;
        }
        pot[root] = 0.0;
        let mut queue = VecDeque::from([root]);
        while let Some(node) = queue.pop_front() {
            if node < m {
                for y in 0..n {
                    if pi.in_support(node, y) && pot[m + y].is_nan() {
                        pot[m + y] = logs(node, y) - pot[node];
                        queue.push_back(m + y);
                    }
                }
            } else {
                let y = node - m;
                for x in 0..m {
                    if pi.in_support(x, y) && pot[x].is_nan() {
                        pot[x] = logs(x, y) - pot[node];
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    let mut max_defect = 0.0f64;
    for (x, y) in pi.support() {
        max_defect = max_defect.max((pot[x] + pot[m + y] - logs(x, y)).abs());
    }
    let holds = max_defect <= PRODUCT_TOL;
    PseudoProduct {
        holds,
        alpha: holds.then(|| pot[..m].iter().map(|v| v.exp()).collect()),
        beta: holds.then(|| pot[m..].iter().map(|v| v.exp()).collect()),
        max_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Channel, FiniteDist};

    fn third() -> JointDist {
        let t = 1.0 / 3.0;
        JointDist::from_rows(&[vec![t, t], vec![t, 0.0]]).unwrap()
    }

    #[test]
    fn pseudo_product_examples() {
        let r = is_pseudo_product(&third());
        assert!(r.holds);
        let (a, b) = (r.alpha.unwrap(), r.beta.unwrap());
        assert!((a[0] * b[1] - 1.0 / 3.0).abs() < 1e-12);
        let dsbs = JointDist::from_rows(&[vec![0.3125, 0.1875], vec![0.1875, 0.3125]]).unwrap();
        assert!(!is_pseudo_product(&dsbs).holds);
        let p = FiniteDist::new(vec![0.4, 0.6]).unwrap();
        assert!(is_pseudo_product(&JointDist::product(&p, &p)).holds);
    }

    #[test]
    fn condition_star_examples() {
        let w = Decomposition::new(
            FiniteDist::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap(),
            Channel::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            Channel::from_rows(&[vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap();
        assert!(check_condition_star(&third(), &w).unwrap().holds);

        let a = 0.25;
        let ch = Channel::from_rows(&[vec![1.0 - a, a], vec![a, 1.0 - a]]).unwrap();
        let d = Decomposition::new(FiniteDist::uniform(2).unwrap(), ch.clone(), ch).unwrap();
        let dsbs = crate::dist::synthesize(&d);
        let r = check_condition_star(&dsbs, &d).unwrap();
        assert!(!r.holds);
        assert_eq!(r.first_violation, Some(0));

        assert!(matches!(
            check_condition_star(&third(), &d),
            Err(Error::InfeasibleWitness(_))
        ));
    }
}
