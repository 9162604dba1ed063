//! Named concrete strategies on the small uniform trees.
//!
//! Height 2 (`uniform:AND:2:2`): the sixteen "crossing" strategies whose
//! second query, after the first probe misses, jumps to the other depth-1
//! subtree. They come in two families distinguished by the third probe:
//! `Complete` finishes the second subtree first, `Return` goes back to the
//! first. Their expected costs are all values of one quartic polynomial.
//!
//! Height 3 (`uniform:OR:2:3`): the deferring strategy that leaves a probed
//! subtree's second leaf pending while it resolves the sibling subtree; on
//! the right distribution it beats every depth-first strategy.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::distribution::{IndependentDistribution, Marginals};
use crate::error::Error;
use crate::scalar::Scalar;
use crate::strategy::Strategy;
use crate::tree::{Label, LeafStatus, Tree};
use crate::Result;

/// The two continuation shapes of the height-2 crossing strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingFamily {
    /// After two misses, complete the second subtree before returning.
    Complete,
    /// After two misses, return to the first subtree immediately.
    Return,
}

/// One of the sixteen crossing strategies on `uniform:AND:2:2`, indexed by
/// the first probe x_{ij} and the second probe x_{(1-i)k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrossingId {
    pub family: CrossingFamily,
    pub i: bool,
    pub j: bool,
    pub k: bool,
}

fn leaf(i: bool, j: bool) -> usize {
    2 * (i as usize) + (j as usize)
}

impl CrossingId {
    pub fn all() -> Vec<CrossingId> {
        let mut out = Vec::with_capacity(16);
        for family in [CrossingFamily::Complete, CrossingFamily::Return] {
            for i in [false, true] {
                for j in [false, true] {
                    for k in [false, true] {
                        out.push(CrossingId { family, i, j, k });
                    }
                }
            }
        }
        out
    }

    /// First four probes in order (leaf indices): the defining skeleton.
    pub fn skeleton(&self) -> [usize; 4] {
        let first = leaf(self.i, self.j);
        let second = leaf(!self.i, self.k);
        let sibling = leaf(!self.i, !self.k);
        let ret = leaf(self.i, !self.j);
        match self.family {
            CrossingFamily::Complete => [first, second, sibling, ret],
            CrossingFamily::Return => [first, second, ret, sibling],
        }
    }

    /// Stable machine name, e.g. "complete-010".
    pub fn key(&self) -> String {
        let fam = match self.family {
            CrossingFamily::Complete => "complete",
            CrossingFamily::Return => "return",
        };
        format!("{fam}-{}{}{}", self.i as u8, self.j as u8, self.k as u8)
    }

    pub fn from_key(key: &str) -> Result<CrossingId> {
        let (fam, bits) = key.split_once('-').ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("bad crossing id {key:?}"),
        })?;
        let family = match fam {
            "complete" => CrossingFamily::Complete,
            "return" => CrossingFamily::Return,
            _ => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("bad crossing family {fam:?}"),
                })
            }
        };
        let bits: Vec<bool> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    pos: 0,
                    msg: format!("bad crossing bits in {key:?}"),
                }),
            })
            .collect::<Result<_>>()?;
        if bits.len() != 3 {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("crossing id needs 3 bits: {key:?}"),
            });
        }
        Ok(CrossingId {
            family,
            i: bits[0],
            j: bits[1],
            k: bits[2],
        })
    }
}

impl fmt::Display for CrossingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            CrossingFamily::Complete => "complete",
            CrossingFamily::Return => "return",
        };
        let ids: Vec<String> = self
            .skeleton()
            .iter()
            .map(|&l| format!("{}{}", l / 2, l % 2))
            .collect();
        write!(f, "{fam}({})", ids.join(","))
    }
}

fn require_height2(tree: &Tree) -> Result<()> {
    if !tree.is_uniform(Label::And, 2, 2) {
        return Err(Error::Shape(
            "crossing strategies are defined on uniform:AND:2:2".into(),
        ));
    }
    Ok(())
}

/// Order the pair (a, b) cheaper-first under `d`, ties to the smaller index.
fn cheaper_first(d: &IndependentDistribution, a: usize, b: usize) -> (usize, usize) {
    let a_first = match d.marginals() {
        Marginals::Exact(v) => v[a] <= v[b],
        Marginals::Float(v) => v[a] <= v[b],
    };
    if a_first {
        (a, b)
    } else {
        (b, a)
    }
}

/// Build one crossing strategy. The "most efficient depth-first"
/// continuation after the first probe hits is resolved against `d`: the
/// remaining subtree's cheaper leaf is probed first, ties lexicographic.
pub fn crossing_strategy(id: CrossingId, d: &IndependentDistribution) -> Result<Strategy> {
    require_height2(d.tree())?;
    let first = leaf(id.i, id.j);
    let second = leaf(!id.i, id.k);
    let sibling = leaf(!id.i, !id.k);
    let ret = leaf(id.i, !id.j);
    let (cont_a, cont_b) = cheaper_first(d, leaf(!id.i, false), leaf(!id.i, true));
    let family = id.family;
    Strategy::from_policy(d.tree(), move |state| {
        match state.status(first) {
            LeafStatus::Unknown => Some(first),
            LeafStatus::One => {
                // First subtree resolved to 1: finish the other subtree
                // cheaper-leaf-first.
                if state.status(cont_a) == LeafStatus::Unknown {
                    Some(cont_a)
                } else {
                    Some(cont_b)
                }
            }
            LeafStatus::Zero => match state.status(second) {
                LeafStatus::Unknown => Some(second),
                LeafStatus::One => Some(ret),
                LeafStatus::Zero => match family {
                    CrossingFamily::Complete => {
                        if state.status(sibling) == LeafStatus::Unknown {
                            Some(sibling)
                        } else {
                            Some(ret)
                        }
                    }
                    CrossingFamily::Return => {
                        if state.status(ret) == LeafStatus::Unknown {
                            Some(ret)
                        } else {
                            Some(sibling)
                        }
                    }
                },
            },
        }
    })
}

/// The crossing-cost polynomial: -xyz + xy - xw + 2x + w + 1.
pub fn crossing_cost_polynomial<T: Scalar>(x: T, y: T, z: T, w: T) -> T {
    let two = T::from_ratio(2, 1);
    T::one() + w.clone() + two * x.clone() - x.clone() * w - x.clone() * y.clone() * z + x * y
}

/// Argument tuple making [`crossing_cost_polynomial`] equal the exact
/// expected cost of `crossing_strategy(id, d)`: the zero-probabilities of
/// the first three probes, and 1 + the off subtree's cheaper leaf.
pub fn crossing_cost_arguments(
    id: CrossingId,
    d: &IndependentDistribution,
) -> Result<[BigRational; 4]> {
    require_height2(d.tree())?;
    let q = d.exact_marginals()?;
    let skeleton = id.skeleton();
    let off_min = q[leaf(!id.i, false)]
        .clone()
        .min(q[leaf(!id.i, true)].clone());
    Ok([
        q[skeleton[0]].clone(),
        q[skeleton[1]].clone(),
        q[skeleton[2]].clone(),
        BigRational::one() + off_min,
    ])
}

fn require_height3(tree: &Tree) -> Result<()> {
    if !tree.is_uniform(Label::Or, 2, 3) {
        return Err(Error::Shape(
            "the deferring strategy is defined on uniform:OR:2:3".into(),
        ));
    }
    Ok(())
}

/// The non-depth-first height-3 strategy: resolve x00 (x000 first); if
/// x00 = 0 run the lexicographic solver under x1 to the root; if x00 = 1
/// probe x010, and on a miss defer x011, resolve x1 lexicographically, and
/// only consult x011 if x1 = 0.
pub fn deferring_strategy(d: &IndependentDistribution) -> Result<Strategy> {
    require_height3(d.tree())?;
    let tree = d.tree().clone();
    let x00 = tree.node_index(&tree.parse_node_id("00")?)?;
    let x1 = tree.node_index(&tree.parse_node_id("1")?)?;
    Strategy::from_policy(&tree, move |state| {
        let solve_under_x1 = |state: &crate::optimal::ResidualState| {
            (4..8).find(|&l| state.status(l) == LeafStatus::Unknown && state.leaf_useful(l))
        };
        match state.node_value(x00) {
            None => {
                if state.status(0) == LeafStatus::Unknown {
                    Some(0)
                } else {
                    Some(1)
                }
            }
            Some(false) => solve_under_x1(state),
            Some(true) => {
                if state.status(2) == LeafStatus::Unknown {
                    Some(2)
                } else if state.node_value(x1).is_none() {
                    solve_under_x1(state)
                } else {
                    // x1 resolved but the root is not: x1 = 0, so the root
                    // hangs on the deferred x011.
                    Some(3)
                }
            }
        }
    })
}

/// The lexicographic solver with the two depth-1 subtrees swapped: on
/// `uniform:AND:2:2` it probes x10, x11, x00, x01.
pub fn swapped_solve(tree: &Tree) -> Result<Strategy> {
    let children = tree.children(tree.root());
    if children.len() != 2 {
        return Err(Error::Shape("the swapped solver needs a binary root".into()));
    }
    fn collect(tree: &Tree, node: usize, order: &mut Vec<usize>) {
        if let Some(l) = tree.leaf_index(node) {
            order.push(l);
            return;
        }
        for &c in tree.children(node) {
            collect(tree, c, order);
        }
    }
    let mut order = Vec::with_capacity(tree.leaf_count());
    collect(tree, children[1], &mut order);
    collect(tree, children[0], &mut order);
    Strategy::directional(tree, &order)
}
