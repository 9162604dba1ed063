//! Independent distributions on leaves.
//!
//! A distribution stores, per leaf, the probability of that leaf having
//! value 0 (the paperless convention throughout this crate: "probability of
//! a node" always means probability of value 0). Leaves are mutually
//! independent by construction — only marginals are stored.
//!
//! Two numeric backends exist and never mix inside one computation: exact
//! arbitrary-precision rationals for verification, binary floats for search.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::scalar::{parse_rational, rational_string, Scalar, F64};
use crate::tree::{Label, NodeId, Tree};
use crate::Result;

/// Numeric backend tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// A probability in [0, 1] on one of the two backends.
#[derive(Debug, Clone, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn exact(value: BigRational) -> Result<Prob> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(Error::Probability(format!("{value} is outside [0,1]")));
        }
        Ok(Prob::Exact(value))
    }

    pub fn float(value: f64) -> Result<Prob> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Probability(format!("{value} is outside [0,1]")));
        }
        Ok(Prob::Float(value))
    }

    /// Parse "n/d" or a plain integer as exact, decimal/scientific notation
    /// as float.
    pub fn parse(text: &str) -> Result<Prob> {
        let t = text.trim();
        if t.contains('/') || t.chars().all(|c| c.is_ascii_digit() || c == '-') {
            let r = parse_rational(t).ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("bad rational {t:?}"),
            })?;
            Prob::exact(r)
        } else {
            let x: f64 = t.parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad probability {t:?}"),
            })?;
            Prob::float(x)
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Prob::Exact(_) => Backend::Exact,
            Prob::Float(_) => Backend::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64_lossy(),
            Prob::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Result<&BigRational> {
        match self {
            Prob::Exact(r) => Ok(r),
            Prob::Float(_) => Err(Error::Backend("expected exact probability".into())),
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{}", rational_string(r)),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

/// An expected cost on either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum CostValue {
    Exact(BigRational),
    Float(f64),
}

impl CostValue {
    pub fn backend(&self) -> Backend {
        match self {
            CostValue::Exact(_) => Backend::Exact,
            CostValue::Float(_) => Backend::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            CostValue::Exact(r) => r.to_f64_lossy(),
            CostValue::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Result<&BigRational> {
        match self {
            CostValue::Exact(r) => Ok(r),
            CostValue::Float(_) => Err(Error::Backend("expected exact cost".into())),
        }
    }

    /// Serialized form: "num/den" for exact, decimal for float.
    pub fn render(&self) -> String {
        match self {
            CostValue::Exact(r) => rational_string(r),
            CostValue::Float(x) => x.to_string(),
        }
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Per-leaf marginals, one backend per distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginals {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// An independent distribution over leaf assignments of one tree.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentDistribution {
    tree: Arc<Tree>,
    marginals: Marginals,
}

impl IndependentDistribution {
    /// Build from per-leaf probabilities in leaf-index order. All entries
    /// must share one backend.
    pub fn new(tree: Arc<Tree>, probs: Vec<Prob>) -> Result<Self> {
        if probs.len() != tree.leaf_count() {
            return Err(Error::Assignment(format!(
                "{} probabilities for a tree with {} leaves",
                probs.len(),
                tree.leaf_count()
            )));
        }
        let backend = probs
            .first()
            .map(Prob::backend)
            .ok_or_else(|| Error::Assignment("tree has no leaves".into()))?;
        match backend {
            Backend::Exact => {
                let mut v = Vec::with_capacity(probs.len());
                for p in probs {
                    match p {
                        Prob::Exact(r) => v.push(r),
                        Prob::Float(_) => {
                            return Err(Error::Backend(
                                "exact and float probabilities mixed in one distribution".into(),
                            ))
                        }
                    }
                }
                Self::exact(tree, v)
            }
            Backend::Float => {
                let mut v = Vec::with_capacity(probs.len());
                for p in probs {
                    match p {
                        Prob::Float(x) => v.push(x),
                        Prob::Exact(_) => {
                            return Err(Error::Backend(
                                "exact and float probabilities mixed in one distribution".into(),
                            ))
                        }
                    }
                }
                Self::float(tree, v)
            }
        }
    }

    pub fn exact(tree: Arc<Tree>, probs: Vec<BigRational>) -> Result<Self> {
        if probs.len() != tree.leaf_count() {
            return Err(Error::Assignment(format!(
                "{} probabilities for a tree with {} leaves",
                probs.len(),
                tree.leaf_count()
            )));
        }
        for p in &probs {
            if *p < BigRational::zero() || *p > BigRational::one() {
                return Err(Error::Probability(format!("{p} is outside [0,1]")));
            }
        }
        Ok(Self {
            tree,
            marginals: Marginals::Exact(probs),
        })
    }

    pub fn float(tree: Arc<Tree>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != tree.leaf_count() {
            return Err(Error::Assignment(format!(
                "{} probabilities for a tree with {} leaves",
                probs.len(),
                tree.leaf_count()
            )));
        }
        for p in &probs {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Probability(format!("{p} is outside [0,1]")));
            }
        }
        Ok(Self {
            tree,
            marginals: Marginals::Float(probs),
        })
    }

    /// Identical marginals everywhere.
    pub fn iid(tree: Arc<Tree>, p: Prob) -> Result<Self> {
        let n = tree.leaf_count();
        match p {
            Prob::Exact(r) => Self::exact(tree, vec![r; n]),
            Prob::Float(x) => Self::float(tree, vec![x; n]),
        }
    }

    pub fn tree(&self) -> &Arc<Tree> {
        &self.tree
    }

    pub fn backend(&self) -> Backend {
        match self.marginals {
            Marginals::Exact(_) => Backend::Exact,
            Marginals::Float(_) => Backend::Float,
        }
    }

    pub fn marginals(&self) -> &Marginals {
        &self.marginals
    }

    pub fn leaf_prob(&self, leaf: usize) -> Prob {
        match &self.marginals {
            Marginals::Exact(v) => Prob::Exact(v[leaf].clone()),
            Marginals::Float(v) => Prob::Float(v[leaf]),
        }
    }

    pub fn exact_marginals(&self) -> Result<&[BigRational]> {
        match &self.marginals {
            Marginals::Exact(v) => Ok(v),
            Marginals::Float(_) => Err(Error::Backend("expected exact distribution".into())),
        }
    }

    pub fn float_marginals(&self) -> Result<&[f64]> {
        match &self.marginals {
            Marginals::Float(v) => Ok(v),
            Marginals::Exact(_) => Err(Error::Backend("expected float distribution".into())),
        }
    }

    /// Float cast (lossy for exact inputs); used by the search paths.
    pub fn to_float(&self) -> IndependentDistribution {
        let probs = match &self.marginals {
            Marginals::Exact(v) => v.iter().map(|r| r.to_f64_lossy()).collect(),
            Marginals::Float(v) => v.clone(),
        };
        IndependentDistribution {
            tree: self.tree.clone(),
            marginals: Marginals::Float(probs),
        }
    }

    /// Probability that `node` has value 0: the leaf marginal for a leaf,
    /// the product of child probabilities at an OR node, and
    /// 1 - prod(1 - child) at an AND node.
    pub fn node_zero_probability(&self, node: &NodeId) -> Result<Prob> {
        let index = self.tree.node_index(node)?;
        Ok(match &self.marginals {
            Marginals::Exact(v) => Prob::Exact(node_zero::<BigRational>(&self.tree, v, index)),
            Marginals::Float(v) => {
                let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
                Prob::Float(node_zero::<F64>(&self.tree, &probs, index).0)
            }
        })
    }

    pub fn root_zero_probability(&self) -> Prob {
        self.node_zero_probability(&NodeId::root())
            .expect("root always exists")
    }

    /// Load from JSON: `{"leaves": ["1/2", 0.75, ...]}` in leaf-index order
    /// or `{"iid": "p"}`. Entries with '/' are exact, decimal strings and
    /// JSON numbers are float; one backend per file.
    pub fn from_json(tree: Arc<Tree>, text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: 0,
            msg: format!("bad distribution JSON: {e}"),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "distribution JSON must be an object".into(),
        })?;
        if let Some(iid) = obj.get("iid") {
            let p = parse_prob_value(iid)?;
            return Self::iid(tree, p);
        }
        let leaves = obj
            .get("leaves")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "distribution JSON needs \"leaves\" (array) or \"iid\"".into(),
            })?;
        let probs = leaves
            .iter()
            .map(parse_prob_value)
            .collect::<Result<Vec<_>>>()?;
        Self::new(tree, probs)
    }

    pub fn to_json(&self) -> String {
        let leaves: Vec<serde_json::Value> = match &self.marginals {
            Marginals::Exact(v) => v
                .iter()
                .map(|r| serde_json::Value::String(rational_string(r)))
                .collect(),
            Marginals::Float(v) => v
                .iter()
                .map(|x| serde_json::json!(x))
                .collect(),
        };
        serde_json::json!({ "leaves": leaves }).to_string()
    }
}

fn parse_prob_value(value: &serde_json::Value) -> Result<Prob> {
    match value {
        serde_json::Value::String(s) => Prob::parse(s),
        serde_json::Value::Number(n) => {
            let x = n.as_f64().ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("bad probability {n}"),
            })?;
            Prob::float(x)
        }
        other => Err(Error::Parse {
            pos: 0,
            msg: format!("bad probability entry {other}"),
        }),
    }
}

/// Generic zero-probability recursion used by both backends.
pub(crate) fn node_zero<T: Scalar>(tree: &Tree, probs: &[T], node: usize) -> T {
    if let Some(leaf) = tree.leaf_index(node) {
        return probs[leaf].clone();
    }
    let label = tree.label(node).expect("internal node");
    match label {
        Label::Or => {
            let mut acc = T::one();
            for &c in tree.children(node) {
                acc = acc * node_zero(tree, probs, c);
            }
            acc
        }
        Label::And => {
            let mut acc = T::one();
            for &c in tree.children(node) {
                acc = acc * node_zero(tree, probs, c).complement();
            }
            acc.complement()
        }
    }
}

/// The height-3 OR-AND distribution that separates depth-first from
/// unrestricted optimal cost: on `uniform:OR:2:3`, leaf `x_{ij0}` gets
/// (1+eps)/2 and leaf `x_{ij1}` gets 1/(1+eps), so every depth-2 node has
/// zero-probability exactly 1/2.
pub fn separating_distribution(eps: &Prob) -> Result<IndependentDistribution> {
    let tree = Arc::new(Tree::uniform(Label::Or, 2, 3)?);
    match eps {
        Prob::Exact(e) => {
            if *e <= BigRational::zero() {
                return Err(Error::Probability(format!("eps must be positive, got {e}")));
            }
            let one = BigRational::one();
            let black = (&one + e) / BigRational::from_ratio(2, 1);
            if black > one {
                return Err(Error::Probability(format!(
                    "(1+eps)/2 exceeds 1 for eps = {e}"
                )));
            }
            let white = &one / (&one + e);
            let mut probs = Vec::with_capacity(8);
            for _ in 0..4 {
                probs.push(black.clone());
                probs.push(white.clone());
            }
            IndependentDistribution::exact(tree, probs)
        }
        Prob::Float(e) => {
            if *e <= 0.0 {
                return Err(Error::Probability(format!("eps must be positive, got {e}")));
            }
            let black = (1.0 + e) / 2.0;
            if black > 1.0 {
                return Err(Error::Probability(format!(
                    "(1+eps)/2 exceeds 1 for eps = {e}"
                )));
            }
            let white = 1.0 / (1.0 + e);
            let mut probs = Vec::with_capacity(8);
            for _ in 0..4 {
                probs.push(black);
                probs.push(white);
            }
            IndependentDistribution::float(tree, probs)
        }
    }
}

/// Pointwise eps -> 0 limit of [`separating_distribution`]: leaves
/// alternately 1/2 and 1 (exact backend).
pub fn separating_distribution_limit() -> IndependentDistribution {
    let tree = Arc::new(Tree::uniform(Label::Or, 2, 3).expect("fixed shape"));
    let half = BigRational::from_ratio(1, 2);
    let one = BigRational::one();
    let mut probs = Vec::with_capacity(8);
    for _ in 0..4 {
        probs.push(half.clone());
        probs.push(one.clone());
    }
    IndependentDistribution::exact(tree, probs).expect("fixed values")
}

/// Solve for the probability of `free_leaf` that makes the root
/// zero-probability equal `r`, holding every other leaf fixed. The root
/// probability is affine and nondecreasing in any single leaf marginal, so
/// the solution is exact on the exact backend; a zero-slope (irrelevant)
/// leaf with an attainable `r` yields the interval midpoint 1/2.
pub fn solve_leaf_for_root_probability(
    d: &IndependentDistribution,
    free_leaf: &NodeId,
    r: &Prob,
) -> Result<Prob> {
    let tree = d.tree();
    let node = tree.node_index(free_leaf)?;
    let leaf = tree
        .leaf_index(node)
        .ok_or_else(|| Error::UnknownNode(format!("{} is not a leaf", free_leaf.render(true))))?;
    match (&d.marginals, r) {
        (Marginals::Exact(v), Prob::Exact(r)) => {
            if *r < BigRational::zero() || *r > BigRational::one() {
                return Err(Error::Probability(format!("r = {r} is outside [0,1]")));
            }
            let q = solve_leaf_generic::<BigRational>(tree, v, leaf, r)?;
            Ok(Prob::Exact(q))
        }
        (Marginals::Float(v), Prob::Float(r)) => {
            if !(0.0..=1.0).contains(r) {
                return Err(Error::Probability(format!("r = {r} is outside [0,1]")));
            }
            let probs: Vec<F64> = v.iter().map(|&x| F64(x)).collect();
            let q = solve_leaf_generic::<F64>(tree, &probs, leaf, &F64(*r))?;
            Ok(Prob::Float(q.0.clamp(0.0, 1.0)))
        }
        _ => Err(Error::Backend(
            "distribution and target r must share a backend".into(),
        )),
    }
}

pub(crate) fn solve_leaf_generic<T: Scalar>(
    tree: &Tree,
    probs: &[T],
    leaf: usize,
    r: &T,
) -> Result<T> {
    let mut work = probs.to_vec();
    work[leaf] = T::zero();
    let at_zero = node_zero(tree, &work, tree.root());
    work[leaf] = T::one();
    let at_one = node_zero(tree, &work, tree.root());
    // Affine in the free leaf: root = at_zero + slope * q, slope >= 0.
    let slope = at_one.clone() - at_zero.clone();
    if slope.is_zero() {
        if at_zero == *r {
            return Ok(T::from_ratio(1, 2));
        }
        return Err(Error::Infeasible(format!(
            "root probability is {:?} regardless of the free leaf; target was {:?}",
            at_zero, r
        )));
    }
    if *r < at_zero || *r > at_one {
        return Err(Error::Infeasible(format!(
            "target {:?} outside attainable range [{:?}, {:?}]",
            r, at_zero, at_one
        )));
    }
    Ok((r.clone() - at_zero) / slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn half() -> BigRational {
        BigRational::from_ratio(1, 2)
    }

    #[test]
    fn separating_distribution_node_probabilities() {
        // At any eps the depth-2 nodes have zero-probability exactly 1/2,
        // and the eps->0 limit distribution gives q_i = 3/4, q_root = 9/16.
        let eps = Prob::Exact(BigRational::from_ratio(1, 100));
        let d = separating_distribution(&eps).unwrap();
        for ij in ["00", "01", "10", "11"] {
            let q = d
                .node_zero_probability(&d.tree().parse_node_id(ij).unwrap())
                .unwrap();
            assert_eq!(q.as_exact().unwrap(), &half());
        }
        let limit = separating_distribution_limit();
        let q0 = limit
            .node_zero_probability(&limit.tree().parse_node_id("0").unwrap())
            .unwrap();
        assert_eq!(q0.as_exact().unwrap(), &BigRational::from_ratio(3, 4));
        let qr = limit.root_zero_probability();
        assert_eq!(qr.as_exact().unwrap(), &BigRational::from_ratio(9, 16));
    }

    #[test]
    fn separating_distribution_leaf_values() {
        // eps = 1/3: black leaves 2/3, white leaves 3/4.
        let d = separating_distribution(&Prob::Exact(BigRational::from_ratio(1, 3))).unwrap();
        assert_eq!(
            d.leaf_prob(0).as_exact().unwrap(),
            &BigRational::from_ratio(2, 3)
        );
        assert_eq!(
            d.leaf_prob(1).as_exact().unwrap(),
            &BigRational::from_ratio(3, 4)
        );
        // eps = 0 rejected.
        assert!(separating_distribution(&Prob::Exact(BigRational::zero())).is_err());
        // eps > 1 makes (1+eps)/2 > 1.
        assert!(
            separating_distribution(&Prob::Exact(BigRational::from_ratio(3, 2))).is_err()
        );
    }

    #[test]
    fn iid_zero_probability_on_and_root() {
        // IID p = 0 under an AND root: the root is 1 surely.
        let tree = Arc::new(Tree::uniform(Label::And, 2, 2).unwrap());
        let d = IndependentDistribution::iid(tree, Prob::Exact(BigRational::zero())).unwrap();
        assert_eq!(
            d.root_zero_probability().as_exact().unwrap(),
            &BigRational::zero()
        );
    }

    #[test]
    fn iid_half_root_probability_matches_enumeration() {
        let tree = Arc::new(Tree::uniform(Label::And, 2, 2).unwrap());
        let d = IndependentDistribution::iid(tree, Prob::Exact(half())).unwrap();
        let q = d.root_zero_probability();
        assert_eq!(q.as_exact().unwrap(), &BigRational::from_ratio(7, 16));
        let brute = oracle::node_zero_by_enumeration(&d, &NodeId::root()).unwrap();
        assert_eq!(q.as_exact().unwrap(), brute.as_exact().unwrap());
    }

    #[test]
    fn node_zero_matches_enumeration_on_asymmetric_tree() {
        let tree = Arc::new(Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap());
        let probs: Vec<BigRational> = [1, 3, 5, 7, 9]
            .iter()
            .map(|&n| BigRational::from_ratio(n, 10))
            .collect();
        let d = IndependentDistribution::exact(tree.clone(), probs).unwrap();
        for node in ["", "0", "1", "00", "12"] {
            let id = tree.parse_node_id(node).unwrap();
            let fast = d.node_zero_probability(&id).unwrap();
            let brute = oracle::node_zero_by_enumeration(&d, &id).unwrap();
            assert_eq!(fast.as_exact().unwrap(), brute.as_exact().unwrap());
        }
    }

    #[test]
    fn solve_leaf_examples() {
        // Two-leaf AND, fixed q_0 = 1/2, target 3/4: q_1 = 1/2.
        let tree = Arc::new(Tree::uniform(Label::And, 2, 1).unwrap());
        let d =
            IndependentDistribution::exact(tree.clone(), vec![half(), BigRational::zero()])
                .unwrap();
        let free = tree.parse_node_id("1").unwrap();
        let q = solve_leaf_for_root_probability(
            &d,
            &free,
            &Prob::Exact(BigRational::from_ratio(3, 4)),
        )
        .unwrap();
        assert_eq!(q.as_exact().unwrap(), &half());

        // Fixed q_0 = 0, target 1 needs q_1 = 1 (boundary, feasible).
        let d0 = IndependentDistribution::exact(
            tree.clone(),
            vec![BigRational::zero(), BigRational::zero()],
        )
        .unwrap();
        let q = solve_leaf_for_root_probability(&d0, &free, &Prob::Exact(BigRational::one()))
            .unwrap();
        assert_eq!(q.as_exact().unwrap(), &BigRational::one());

        // Fixed q_0 = 1 makes the root 0 surely: only r = 1 is attainable.
        let d1 = IndependentDistribution::exact(
            tree.clone(),
            vec![BigRational::one(), BigRational::zero()],
        )
        .unwrap();
        assert!(matches!(
            solve_leaf_for_root_probability(&d1, &free, &Prob::Exact(half())),
            Err(Error::Infeasible(_))
        ));
        let q = solve_leaf_for_root_probability(&d1, &free, &Prob::Exact(BigRational::one()))
            .unwrap();
        assert_eq!(q.as_exact().unwrap(), &half()); // zero slope -> midpoint

        // Backends must match between the distribution and the target.
        assert!(matches!(
            solve_leaf_for_root_probability(&d0, &free, &Prob::Float(0.5)),
            Err(Error::Backend(_))
        ));
    }

    #[test]
    fn solve_leaf_round_trips_root_probability() {
        let tree = Arc::new(Tree::uniform(Label::And, 2, 2).unwrap());
        let probs = vec![half(), half(), half(), BigRational::zero()];
        let d = IndependentDistribution::exact(tree.clone(), probs).unwrap();
        let free = tree.parse_node_id("11").unwrap();
        let r = Prob::Exact(BigRational::from_ratio(7, 16));
        let q = solve_leaf_for_root_probability(&d, &free, &r).unwrap();
        assert_eq!(q.as_exact().unwrap(), &half());
        let solved = IndependentDistribution::exact(
            tree,
            vec![half(), half(), half(), q.as_exact().unwrap().clone()],
        )
        .unwrap();
        assert_eq!(solved.root_zero_probability(), r);
    }

    #[test]
    fn json_round_trip_and_backend_rules() {
        let tree = Arc::new(Tree::uniform(Label::And, 2, 1).unwrap());
        let d =
            IndependentDistribution::from_json(tree.clone(), r#"{"leaves": ["1/2", "3/4"]}"#)
                .unwrap();
        assert_eq!(d.backend(), Backend::Exact);
        let text = d.to_json();
        let d2 = IndependentDistribution::from_json(tree.clone(), &text).unwrap();
        assert_eq!(d, d2);

        let f = IndependentDistribution::from_json(tree.clone(), r#"{"leaves": [0.5, "0.75"]}"#)
            .unwrap();
        assert_eq!(f.backend(), Backend::Float);

        assert!(matches!(
            IndependentDistribution::from_json(tree.clone(), r#"{"leaves": ["1/2", 0.75]}"#),
            Err(Error::Backend(_))
        ));

        let iid = IndependentDistribution::from_json(tree, r#"{"iid": "1/3"}"#).unwrap();
        assert_eq!(
            iid.leaf_prob(1).as_exact().unwrap(),
            &BigRational::from_ratio(1, 3)
        );
    }

    #[test]
    fn node_zero_matches_enumeration_on_eight_leaves() {
        let tree = Arc::new(Tree::uniform(Label::Or, 2, 3).unwrap());
        let probs: Vec<BigRational> = (0..8)
            .map(|i| BigRational::from_ratio(2 * i + 1, 16))
            .collect();
        let d = IndependentDistribution::exact(tree.clone(), probs).unwrap();
        for node in ["", "0", "01", "110"] {
            let id = tree.parse_node_id(node).unwrap();
            let fast = d.node_zero_probability(&id).unwrap();
            let brute = oracle::node_zero_by_enumeration(&d, &id).unwrap();
            assert_eq!(fast.as_exact().unwrap(), brute.as_exact().unwrap());
        }
    }

    #[test]
    fn node_zero_is_monotone_in_leaf_probabilities() {
        use rand::{Rng, SeedableRng};
        let trees = [
            Tree::uniform(Label::And, 2, 2).unwrap(),
            Tree::uniform(Label::Or, 2, 3).unwrap(),
            Tree::parse("AND(OR(l,l),OR(l,l,l))").unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for tree in trees {
            let tree = Arc::new(tree);
            for _ in 0..50 {
                let probs: Vec<f64> = (0..tree.leaf_count()).map(|_| rng.random()).collect();
                let d = IndependentDistribution::float(tree.clone(), probs.clone()).unwrap();
                let before = d.root_zero_probability().to_f64();
                let leaf = rng.random_range(0..tree.leaf_count());
                let mut bumped = probs.clone();
                bumped[leaf] = (bumped[leaf] + rng.random::<f64>() * (1.0 - bumped[leaf]))
                    .clamp(0.0, 1.0);
                let d2 = IndependentDistribution::float(tree.clone(), bumped).unwrap();
                let after = d2.root_zero_probability().to_f64();
                assert!(after >= before - 1e-15);
            }
        }
    }

    #[test]
    fn separating_distribution_depth2_nodes_are_half_for_all_eps() {
        for (n, den) in [(1i64, 1000i64), (1, 100), (1, 3), (1, 1)] {
            let d = separating_distribution(&Prob::Exact(BigRational::from_ratio(n, den)))
                .unwrap();
            for ij in ["00", "01", "10", "11"] {
                let q = d
                    .node_zero_probability(&d.tree().parse_node_id(ij).unwrap())
                    .unwrap();
                assert_eq!(q.as_exact().unwrap(), &half(), "eps {n}/{den} node {ij}");
            }
        }
    }

    #[test]
    fn probabilities_outside_unit_interval_rejected() {
        let tree = Arc::new(Tree::uniform(Label::And, 2, 1).unwrap());
        assert!(IndependentDistribution::exact(
            tree.clone(),
            vec![BigRational::from_ratio(3, 2), half()]
        )
        .is_err());
        assert!(IndependentDistribution::float(tree, vec![0.5, -0.1]).is_err());
    }
}
