//! Weighted instances: normalized weight vectors, point vectors on [0, a],
//! single-block and multi-block instances, and multi-index enumeration for
//! tensor sums.

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};

/// Default cap on the number of multi-indices a tensor sum may enumerate.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Cap used by the brute-force reference enumerations.
pub const BRUTE_CAP: u64 = 10_000;

/// Selects which weight family of a [`GeneralInstance`] an operation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFamily {
    P,
    R,
}

/// A strictly positive weight vector normalized to sum to 1 (exactly in
/// rational mode, to within 1e-12 in float mode).
#[derive(Debug, Clone, PartialEq)]
pub struct Weights<S: Scalar>(Vec<S>);

impl<S: Scalar> Weights<S> {
    /// Normalizes raw positive entries by their sum.
    pub fn new(raw: Vec<S>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Empty("weights"));
        }
        for (index, w) in raw.iter().enumerate() {
            if *w <= S::zero() {
                return Err(Error::NonPositive {
                    context: "weights",
                    index,
                    value: w.render(),
                });
            }
        }
        let total = S::sum_terms(raw.iter().cloned());
        let normalized: Vec<S> = raw.into_iter().map(|w| w / total.clone()).collect();
        debug_assert!({
            let sum = S::sum_terms(normalized.iter().cloned());
            (sum - S::one()).abs().to_f64() <= 1e-12
        });
        Ok(Self(normalized))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> &S {
        &self.0[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn sum(&self) -> S {
        S::sum_terms(self.0.iter().cloned())
    }
}

/// Points constrained to the interval [0, a] with a > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVector<S: Scalar> {
    values: Vec<S>,
    upper: S,
}

impl<S: Scalar> PointVector<S> {
    pub fn new(values: Vec<S>, domain_upper: S) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("points"));
        }
        if domain_upper <= S::zero() {
            return Err(Error::NonPositiveDomain(domain_upper.render()));
        }
        for (index, x) in values.iter().enumerate() {
            if *x < S::zero() || *x > domain_upper {
                return Err(Error::PointOutOfDomain {
                    index,
                    value: x.render(),
                    upper: domain_upper.render(),
                });
            }
        }
        Ok(Self {
            values,
            upper: domain_upper,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> &S {
        &self.values[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.values.iter()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn domain_upper(&self) -> &S {
        &self.upper
    }

    pub fn all_equal(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// One weighted point list (p, x) with a derived barycenter in [0, a].
/// Doubles as a block of a [`GeneralInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleInstance<S: Scalar> {
    weights: Weights<S>,
    points: PointVector<S>,
}

/// Blocks of a general instance have the same shape as a simple instance.
pub type Block<S> = SimpleInstance<S>;

impl<S: Scalar> SimpleInstance<S> {
    pub fn new(weights: Weights<S>, points: PointVector<S>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::LengthMismatch {
                context: "weights vs points",
                left: weights.len(),
                right: points.len(),
            });
        }
        let inst = Self { weights, points };
        check_center_in_domain(&inst.barycenter(), inst.points.domain_upper())?;
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weights(&self) -> &Weights<S> {
        &self.weights
    }

    pub fn points(&self) -> &PointVector<S> {
        &self.points
    }

    pub fn domain_upper(&self) -> &S {
        self.points.domain_upper()
    }

    /// The weighted mean of the points.
    pub fn barycenter(&self) -> S {
        S::sum_terms(
            self.weights
                .iter()
                .zip(self.points.iter())
                .map(|(w, x)| w.clone() * x.clone()),
        )
    }

    /// Same points weighted by a different simplex vector.
    pub fn with_weights(&self, weights: Weights<S>) -> Result<Self> {
        Self::new(weights, self.points.clone())
    }

    pub fn all_points_equal(&self) -> bool {
        self.points.all_equal()
    }
}

fn check_center_in_domain<S: Scalar>(center: &S, upper: &S) -> Result<()> {
    // The barycenter is a convex combination, so violations can only come
    // from float rounding; allow a hair of slack in that mode.
    let slack = if S::EXACT {
        S::zero()
    } else {
        S::from_f64(1e-9)
    };
    if *center < S::zero() - slack.clone() || *center > upper.clone() + slack {
        return Err(Error::BarycenterOutOfDomain {
            value: center.render(),
            upper: upper.render(),
        });
    }
    Ok(())
}

/// Outer weights q over k blocks (p_i, x_i), optionally with a second
/// weight family r_i per block.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralInstance<S: Scalar> {
    q: Weights<S>,
    blocks: Vec<Block<S>>,
    r_blocks: Option<Vec<Weights<S>>>,
}

impl<S: Scalar> GeneralInstance<S> {
    pub fn new(
        q: Weights<S>,
        blocks: Vec<Block<S>>,
        r_blocks: Option<Vec<Weights<S>>>,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Empty("blocks"));
        }
        if q.len() != blocks.len() {
            return Err(Error::LengthMismatch {
                context: "q vs blocks",
                left: q.len(),
                right: blocks.len(),
            });
        }
        let upper = blocks[0].domain_upper().clone();
        for b in &blocks[1..] {
            if *b.domain_upper() != upper {
                return Err(Error::InvalidArgument(
                    "all blocks must share one domain upper bound".into(),
                ));
            }
        }
        if let Some(r) = &r_blocks {
            if r.len() != blocks.len() {
                return Err(Error::LengthMismatch {
                    context: "r_blocks vs blocks",
                    left: r.len(),
                    right: blocks.len(),
                });
            }
            for (i, (rw, b)) in r.iter().zip(&blocks).enumerate() {
                if rw.len() != b.len() {
                    return Err(Error::LengthMismatch {
                        context: "r block length",
                        left: rw.len(),
                        right: blocks[i].len(),
                    });
                }
            }
        }
        let inst = Self {
            q,
            blocks,
            r_blocks,
        };
        check_center_in_domain(&inst.barycenter(WeightFamily::P)?, &upper)?;
        if inst.r_blocks.is_some() {
            check_center_in_domain(&inst.barycenter(WeightFamily::R)?, &upper)?;
        }
        Ok(inst)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn outer_weights(&self) -> &Weights<S> {
        &self.q
    }

    pub fn block(&self, i: usize) -> &Block<S> {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Block<S>] {
        &self.blocks
    }

    pub fn r_block(&self, i: usize) -> Option<&Weights<S>> {
        self.r_blocks.as_ref().map(|r| &r[i])
    }

    pub fn r_blocks(&self) -> Option<&[Weights<S>]> {
        self.r_blocks.as_deref()
    }

    pub fn has_r_family(&self) -> bool {
        self.r_blocks.is_some()
    }

    pub fn domain_upper(&self) -> &S {
        self.blocks[0].domain_upper()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Weight of point j (0-based) in block i under the chosen family.
    pub fn family_weight(&self, family: WeightFamily, i: usize, j: usize) -> Result<&S> {
        match family {
            WeightFamily::P => Ok(self.blocks[i].weights().get(j)),
            WeightFamily::R => self
                .r_blocks
                .as_ref()
                .map(|r| r[i].get(j))
                .ok_or(Error::MissingRFamily),
        }
    }

    pub fn family_weights(&self, family: WeightFamily, i: usize) -> Result<&Weights<S>> {
        match family {
            WeightFamily::P => Ok(self.blocks[i].weights()),
            WeightFamily::R => self
                .r_blocks
                .as_ref()
                .map(|r| &r[i])
                .ok_or(Error::MissingRFamily),
        }
    }

    /// The nested weighted mean over the chosen family.
    pub fn barycenter(&self, family: WeightFamily) -> Result<S> {
        let mut outer = Vec::with_capacity(self.blocks.len());
        for (i, block) in self.blocks.iter().enumerate() {
            let weights = self.family_weights(family, i)?;
            let inner = S::sum_terms(
                weights
                    .iter()
                    .zip(block.points().iter())
                    .map(|(w, x)| w.clone() * x.clone()),
            );
            outer.push(self.q.get(i).clone() * inner);
        }
        Ok(S::sum_terms(outer))
    }

    /// A k = 1 instance collapses to its single block under the family.
    pub fn as_single_block(&self, family: WeightFamily) -> Result<SimpleInstance<S>> {
        if self.blocks.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "expected a single block, instance has {}",
                self.blocks.len()
            )));
        }
        let weights = self.family_weights(family, 0)?.clone();
        self.blocks[0].with_weights(weights)
    }

    pub fn all_points_equal(&self) -> bool {
        let first = self.blocks[0].points().get(0);
        self.blocks
            .iter()
            .all(|b| b.points().iter().all(|x| x == first))
    }
}

/// A tuple of 1-based per-block indices selecting one point per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Build from 1-based per-block indices.
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// 1-based index chosen in the given block.
    pub fn get(&self, block: usize) -> usize {
        self.0[block]
    }

    /// 0-based index chosen in the given block.
    pub fn zero_based(&self, block: usize) -> usize {
        self.0[block] - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All tuples (j_1, ..., j_k), 1 <= j_i <= n_i, in lexicographic order with
/// the first coordinate slowest. Fails upfront when the count exceeds `cap`.
pub fn multi_indices(dims: &[usize], cap: u64) -> Result<MultiIndexIter> {
    if dims.is_empty() {
        return Err(Error::Empty("dimensions"));
    }
    let mut required: u128 = 1;
    for (index, &n) in dims.iter().enumerate() {
        if n == 0 {
            return Err(Error::NonPositive {
                context: "dimensions",
                index,
                value: "0".into(),
            });
        }
        required = required.saturating_mul(n as u128);
    }
    if required > cap as u128 {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(MultiIndexIter {
        dims: dims.to_vec(),
        current: Some(vec![1; dims.len()]),
    })
}

pub struct MultiIndexIter {
    dims: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Iterator for MultiIndexIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.current.as_mut()?;
        let out = MultiIndex(cur.clone());
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if cur[pos] < self.dims[pos] {
                cur[pos] += 1;
                for later in cur.iter_mut().skip(pos + 1) {
                    *later = 1;
                }
                break;
            }
        }
        Some(out)
    }
}

impl Weights<Rat> {
    pub fn to_f64(&self) -> Weights<f64> {
        Weights::new(self.0.iter().map(Scalar::to_f64).collect()).expect("valid weights convert")
    }
}

impl PointVector<Rat> {
    pub fn to_f64(&self) -> PointVector<f64> {
        PointVector::new(
            self.values.iter().map(Scalar::to_f64).collect(),
            self.upper.to_f64(),
        )
        .expect("valid points convert")
    }
}

impl SimpleInstance<Rat> {
    pub fn to_f64(&self) -> SimpleInstance<f64> {
        SimpleInstance::new(self.weights.to_f64(), self.points.to_f64())
            .expect("valid instance converts")
    }
}

impl GeneralInstance<Rat> {
    pub fn to_f64(&self) -> GeneralInstance<f64> {
        GeneralInstance::new(
            self.q.to_f64(),
            self.blocks.iter().map(SimpleInstance::to_f64).collect(),
            self.r_blocks
                .as_ref()
                .map(|r| r.iter().map(Weights::to_f64).collect()),
        )
        .expect("valid instance converts")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn rats(values: &[(i64, i64)]) -> Vec<Rat> {
        values.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn weights_normalize() {
        let w: Weights<Rat> = Weights::new(rats(&[(1, 1)])).unwrap();
        assert_eq!(w.as_slice(), &[rat(1, 1)]);

        let w: Weights<Rat> = Weights::new(rats(&[(2, 1), (2, 1)])).unwrap();
        assert_eq!(w.as_slice(), &[rat(1, 2), rat(1, 2)]);

        let w: Weights<Rat> = Weights::new(rats(&[(1, 1), (3, 1)])).unwrap();
        assert_eq!(w.as_slice(), &[rat(1, 4), rat(3, 4)]);
    }

    #[test]
    fn weights_reject_bad_input() {
        assert!(matches!(Weights::<Rat>::new(vec![]), Err(Error::Empty(_))));
        assert!(matches!(
            Weights::new(rats(&[(1, 2), (0, 1)])),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(matches!(
            Weights::new(rats(&[(-1, 2), (1, 2)])),
            Err(Error::NonPositive { index: 0, .. })
        ));
    }

    #[test]
    fn weights_normalization_idempotent_in_rational_mode() {
        let w: Weights<Rat> = Weights::new(rats(&[(1, 4), (3, 4)])).unwrap();
        let again = Weights::new(w.as_slice().to_vec()).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn points_validate_domain() {
        assert!(PointVector::new(rats(&[(0, 1), (1, 1)]), rat(1, 1)).is_ok());
        assert!(matches!(
            PointVector::new(rats(&[(3, 2)]), rat(1, 1)),
            Err(Error::PointOutOfDomain { index: 0, .. })
        ));
        assert!(matches!(
            PointVector::new(rats(&[(1, 2)]), rat(0, 1)),
            Err(Error::NonPositiveDomain(_))
        ));
        assert!(matches!(
            PointVector::new(rats(&[(-1, 2), (1, 2)]), rat(1, 1)),
            Err(Error::PointOutOfDomain { index: 0, .. })
        ));
    }

    fn simple(p: &[(i64, i64)], x: &[(i64, i64)]) -> SimpleInstance<Rat> {
        SimpleInstance::new(
            Weights::new(rats(p)).unwrap(),
            PointVector::new(rats(x), rat(1, 1)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn barycenter_examples() {
        assert_eq!(
            simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]).barycenter(),
            rat(1, 2)
        );
        assert_eq!(
            simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]).barycenter(),
            rat(3, 4)
        );
        assert_eq!(simple(&[(1, 1)], &[(2, 3)]).barycenter(), rat(2, 3));
    }

    #[test]
    fn weighted_deviations_sum_to_zero_exactly() {
        let inst = simple(&[(1, 6), (1, 3), (1, 2)], &[(0, 1), (1, 4), (9, 10)]);
        let center = inst.barycenter();
        let total = Rat::sum_terms(
            inst.weights()
                .iter()
                .zip(inst.points().iter())
                .map(|(w, x)| w.clone() * (x.clone() - center.clone())),
        );
        assert!(Scalar::is_zero(&total));
    }

    fn worked_general() -> GeneralInstance<Rat> {
        let block = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
        GeneralInstance::new(
            Weights::new(rats(&[(1, 2), (1, 2)])).unwrap(),
            vec![block.clone(), block],
            None,
        )
        .unwrap()
    }

    #[test]
    fn general_barycenter_examples() {
        let g = worked_general();
        assert_eq!(g.barycenter(WeightFamily::P).unwrap(), rat(1, 2));
        assert!(matches!(
            g.barycenter(WeightFamily::R),
            Err(Error::MissingRFamily)
        ));

        // k = 1 reduces to the block barycenter.
        let block = simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]);
        let single = GeneralInstance::new(
            Weights::new(rats(&[(1, 1)])).unwrap(),
            vec![block.clone()],
            None,
        )
        .unwrap();
        assert_eq!(
            single.barycenter(WeightFamily::P).unwrap(),
            block.barycenter()
        );

        // All points equal to c gives c.
        let flat = simple(&[(1, 3), (2, 3)], &[(2, 5), (2, 5)]);
        let g = GeneralInstance::new(
            Weights::new(rats(&[(1, 4), (3, 4)])).unwrap(),
            vec![flat.clone(), flat],
            None,
        )
        .unwrap();
        assert_eq!(g.barycenter(WeightFamily::P).unwrap(), rat(2, 5));
        assert!(g.all_points_equal());
    }

    #[test]
    fn general_instance_shape_validation() {
        let block = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
        let q = Weights::new(rats(&[(1, 1)])).unwrap();
        let bad_r = vec![Weights::new(rats(&[(1, 1)])).unwrap()];
        assert!(matches!(
            GeneralInstance::new(q.clone(), vec![block.clone()], Some(bad_r)),
            Err(Error::LengthMismatch { .. })
        ));
        let two_q = Weights::new(rats(&[(1, 2), (1, 2)])).unwrap();
        assert!(matches!(
            GeneralInstance::new(two_q, vec![block], None),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn multi_index_order_and_count() {
        let seq: Vec<Vec<usize>> = multi_indices(&[2], DEFAULT_ENUM_CAP)
            .unwrap()
            .map(|m| m.indices().to_vec())
            .collect();
        assert_eq!(seq, vec![vec![1], vec![2]]);

        let seq: Vec<Vec<usize>> = multi_indices(&[2, 2], DEFAULT_ENUM_CAP)
            .unwrap()
            .map(|m| m.indices().to_vec())
            .collect();
        assert_eq!(
            seq,
            vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]
        );

        let count = multi_indices(&[3, 2, 4], DEFAULT_ENUM_CAP).unwrap().count();
        assert_eq!(count, 24);
    }

    #[test]
    fn multi_index_cap_is_enforced() {
        match multi_indices(&[10_000, 10_000], DEFAULT_ENUM_CAP) {
            Err(Error::CapExceeded { required, cap }) => {
                assert_eq!(required, 100_000_000);
                assert_eq!(cap, DEFAULT_ENUM_CAP);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn float_conversion_preserves_shape() {
        let g = worked_general();
        let f = g.to_f64();
        assert_eq!(f.block_count(), 2);
        assert!((f.barycenter(WeightFamily::P).unwrap() - 0.5).abs() < 1e-15);
    }
}
