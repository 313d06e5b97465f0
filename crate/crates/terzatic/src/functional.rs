//! The Jensen gap J(f, p, x) = sum p_i f(x_i) - f(sum p_i x_i) and its
//! tensor-weighted generalization over k blocks, together with the
//! discrete distribution of the mixed point selected by each multi-index.

use crate::error::Result;
use crate::function::FunctionModel;
use crate::instance::{multi_indices, GeneralInstance, SimpleInstance, WeightFamily};
use crate::scalar::Scalar;

/// One (weight, value) atom of a discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<S: Scalar> {
    pub weight: S,
    pub value: S,
}

/// The law of the mixed point sum_i q_i x_{i j_i} under the tensor weights
/// prod_i w_{i j_i}. Unmerged it has one atom per multi-index in
/// enumeration order; merged it is sorted ascending with equal values
/// coalesced (exact equality in rational mode, equality after rounding to
/// 12 significant digits in float mode).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDistribution<S: Scalar> {
    atoms: Vec<Atom<S>>,
    merged: bool,
}

impl<S: Scalar> AtomDistribution<S> {
    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn is_merged(&self) -> bool {
        self.merged
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> S {
        S::sum_terms(self.atoms.iter().map(|a| a.weight.clone()))
    }

    /// Weighted mean of the atom values.
    pub fn mean(&self) -> S {
        S::sum_terms(
            self.atoms
                .iter()
                .map(|a| a.weight.clone() * a.value.clone()),
        )
    }

    /// sum over atoms of weight * f(value).
    pub fn expectation(&self, f: &FunctionModel<S>) -> Result<S> {
        let mut terms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            terms.push(a.weight.clone() * f.eval(&a.value)?);
        }
        Ok(S::sum_terms(terms))
    }
}

/// Materialize the tensor distribution of a general instance under the
/// chosen weight family.
pub fn tensor_distribution<S: Scalar>(
    ginst: &GeneralInstance<S>,
    family: WeightFamily,
    merge: bool,
    cap: u64,
) -> Result<AtomDistribution<S>> {
    let dims = ginst.dims();
    let q = ginst.outer_weights();
    let mut atoms = Vec::new();
    for idx in multi_indices(&dims, cap)? {
        let mut weight = S::one();
        for (i, _) in dims.iter().enumerate() {
            weight = weight * ginst.family_weight(family, i, idx.zero_based(i))?.clone();
        }
        let value = S::sum_terms((0..dims.len()).map(|i| {
            q.get(i).clone() * ginst.block(i).points().get(idx.zero_based(i)).clone()
        }));
        atoms.push(Atom { weight, value });
    }
    if !merge {
        return Ok(AtomDistribution {
            atoms,
            merged: false,
        });
    }

    // Stable sort keeps enumeration order within ties, making the merged
    // weights deterministic; the group representative is its smallest
    // member.
    atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut merged: Vec<Atom<S>> = Vec::new();
    for atom in atoms {
        match merged.last_mut() {
            Some(last) if last.value.round_for_merge() == atom.value.round_for_merge() => {
                last.weight = last.weight.clone() + atom.weight;
            }
            _ => merged.push(atom),
        }
    }
    Ok(AtomDistribution {
        atoms: merged,
        merged: true,
    })
}

/// J(f, p, x) = sum p_i f(x_i) - f(sum p_i x_i).
pub fn jensen<S: Scalar>(f: &FunctionModel<S>, inst: &SimpleInstance<S>) -> Result<S> {
    let mut terms = Vec::with_capacity(inst.len());
    for (w, x) in inst.weights().iter().zip(inst.points().iter()) {
        terms.push(w.clone() * f.eval(x)?);
    }
    let mean_of_f = S::sum_terms(terms);
    Ok(mean_of_f - f.eval(&inst.barycenter())?)
}

/// The tensor-weighted Jensen gap: the mixed-point expectation of f minus
/// f at the nested barycenter, both under the chosen family. Accumulates
/// in enumeration order with compensated summation.
pub fn generalized_jensen<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    family: WeightFamily,
    cap: u64,
) -> Result<S> {
    let distribution = tensor_distribution(ginst, family, false, cap)?;
    let expectation = distribution.expectation(f)?;
    Ok(expectation - f.eval(&ginst.barycenter(family)?)?)
}

/// Same value computed through the merged distribution; exposed so tests
/// and callers can cross-check the two routes.
pub fn generalized_jensen_merged<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    family: WeightFamily,
    cap: u64,
) -> Result<S> {
    let distribution = tensor_distribution(ginst, family, true, cap)?;
    let expectation = distribution.expectation(f)?;
    Ok(expectation - f.eval(&ginst.barycenter(family)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{PointVector, Weights, DEFAULT_ENUM_CAP};
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn rats(values: &[(i64, i64)]) -> Vec<Rat> {
        values.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn cube() -> FunctionModel<Rat> {
        FunctionModel::power(rat(3, 1)).unwrap()
    }

    fn simple(p: &[(i64, i64)], x: &[(i64, i64)]) -> SimpleInstance<Rat> {
        SimpleInstance::new(
            Weights::new(rats(p)).unwrap(),
            PointVector::new(rats(x), rat(1, 1)).unwrap(),
        )
        .unwrap()
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
    fn jensen_pinned_values() {
        assert_eq!(
            jensen(&cube(), &simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)])).unwrap(),
            rat(3, 8)
        );
        assert_eq!(
            jensen(&cube(), &simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)])).unwrap(),
            rat(21, 64)
        );
        // n = 1 collapses to zero for any model.
        assert_eq!(
            jensen(&cube(), &simple(&[(1, 1)], &[(2, 3)])).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn tensor_distribution_merges_worked_example() {
        let g = worked_general();
        let unmerged = tensor_distribution(&g, WeightFamily::P, false, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(unmerged.len(), 4);
        assert_eq!(unmerged.total_weight(), rat(1, 1));

        let merged = tensor_distribution(&g, WeightFamily::P, true, DEFAULT_ENUM_CAP).unwrap();
        let atoms: Vec<(Rat, Rat)> = merged
            .atoms()
            .iter()
            .map(|a| (a.weight.clone(), a.value.clone()))
            .collect();
        assert_eq!(
            atoms,
            vec![
                (rat(1, 4), rat(0, 1)),
                (rat(1, 2), rat(1, 2)),
                (rat(1, 4), rat(1, 1)),
            ]
        );
        assert_eq!(merged.total_weight(), rat(1, 1));
        assert_eq!(merged.mean(), rat(1, 2));
    }

    #[test]
    fn single_block_distribution_is_the_block() {
        let block = simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]);
        let g = GeneralInstance::new(
            Weights::new(rats(&[(1, 1)])).unwrap(),
            vec![block],
            None,
        )
        .unwrap();
        let d = tensor_distribution(&g, WeightFamily::P, false, DEFAULT_ENUM_CAP).unwrap();
        let atoms: Vec<(Rat, Rat)> = d
            .atoms()
            .iter()
            .map(|a| (a.weight.clone(), a.value.clone()))
            .collect();
        assert_eq!(atoms, vec![(rat(1, 4), rat(0, 1)), (rat(3, 4), rat(1, 1))]);
    }

    #[test]
    fn generalized_jensen_pinned_and_reductions() {
        let g = worked_general();
        assert_eq!(
            generalized_jensen(&cube(), &g, WeightFamily::P, DEFAULT_ENUM_CAP).unwrap(),
            rat(3, 16)
        );
        assert_eq!(
            generalized_jensen_merged(&cube(), &g, WeightFamily::P, DEFAULT_ENUM_CAP).unwrap(),
            rat(3, 16)
        );

        // k = 1 equals the plain Jensen gap on the block.
        let block = simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]);
        let single = GeneralInstance::new(
            Weights::new(rats(&[(1, 1)])).unwrap(),
            vec![block.clone()],
            None,
        )
        .unwrap();
        assert_eq!(
            generalized_jensen(&cube(), &single, WeightFamily::P, DEFAULT_ENUM_CAP).unwrap(),
            jensen(&cube(), &block).unwrap()
        );

        // All points equal gives zero.
        let flat = simple(&[(1, 3), (2, 3)], &[(2, 5), (2, 5)]);
        let g = GeneralInstance::new(
            Weights::new(rats(&[(1, 2), (1, 2)])).unwrap(),
            vec![flat.clone(), flat],
            None,
        )
        .unwrap();
        assert_eq!(
            generalized_jensen(&cube(), &g, WeightFamily::P, DEFAULT_ENUM_CAP).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn float_merge_coalesces_equal_after_rounding() {
        let g = worked_general().to_f64();
        let merged = tensor_distribution(&g, WeightFamily::P, true, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(merged.len(), 3);
        assert!((merged.total_weight() - 1.0).abs() < 1e-12);
        let direct =
            generalized_jensen(&cube().to_f64(), &g, WeightFamily::P, DEFAULT_ENUM_CAP).unwrap();
        assert!((direct - 3.0 / 16.0).abs() < 1e-15);
    }
}
