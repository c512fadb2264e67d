use super::{check_parents, same_len, VariationOperator};
use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

/// DE/rand/1/bin parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeParams {
    pub f: f64,
    pub cr: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

/// `x1 + F (x2 - x3)`. Consumes no draws.
pub fn de_mutate(x1: &[f64], x2: &[f64], x3: &[f64], f: f64) -> Result<Vec<f64>> {
    same_len(x1.len(), x2.len())?;
    same_len(x1.len(), x3.len())?;
    Ok(x1
        .iter()
        .zip(x2)
        .zip(x3)
        .map(|((a, b), c)| a + f * (b - c))
        .collect())
}

/// Binomial crossover.
///
/// Draws: one index for the guaranteed-inherit dimension, then one uniform
/// per dimension.
pub fn de_crossover(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    same_len(target.len(), mutant.len())?;
    if target.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let j_rand = stream.index(target.len());
    Ok(target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(d, (t, m))| {
            let u = stream.uniform();
            if u < cr || d == j_rand {
                *m
            } else {
                *t
            }
        })
        .collect())
}

/// DE mutation as a three-parent operator.
pub struct DeMutation {
    pub f: f64,
}

impl VariationOperator for DeMutation {
    fn name(&self) -> &str {
        "de"
    }

    fn arity(&self) -> usize {
        3
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(&self, parents: &[&[f64]], _: &Bounds, _: &mut RandomStream) -> Result<Vec<Vec<f64>>> {
        check_parents(parents, 3)?;
        Ok(vec![de_mutate(parents[0], parents[1], parents[2], self.f)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::OrthogonalMatrix;

    #[test]
    fn equal_difference_parents() {
        let x1 = [1.0, 2.0];
        let x2 = [5.0, -1.0];
        assert_eq!(de_mutate(&x1, &x2, &x2, 0.5).unwrap(), x1);
    }

    #[test]
    fn direct_value() {
        let o = de_mutate(&[0.0, 0.0], &[2.0, 2.0], &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(o, vec![1.0, 1.0]);
    }

    #[test]
    fn quarter_turn_commutes() {
        let m = OrthogonalMatrix::rotation_2d(std::f64::consts::FRAC_PI_2);
        let (x1, x2, x3) = ([1.0, 2.0], [3.0, -1.0], [0.5, 4.0]);
        let direct = m.apply(&de_mutate(&x1, &x2, &x3, 0.5).unwrap());
        let rotated = de_mutate(&m.apply(&x1), &m.apply(&x2), &m.apply(&x3), 0.5).unwrap();
        for (a, b) in direct.iter().zip(&rotated) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn crossover_all_from_mutant() {
        let mut s = RandomStream::new(1);
        let t = [0.0; 6];
        let m = [1.0; 6];
        assert_eq!(de_crossover(&t, &m, 1.0, &mut s).unwrap(), m);
    }

    #[test]
    fn crossover_zero_takes_exactly_one() {
        let mut s = RandomStream::new(2);
        for _ in 0..50 {
            let o = de_crossover(&[0.0; 8], &[1.0; 8], 0.0, &mut s).unwrap();
            assert_eq!(o.iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn crossover_identical_inputs() {
        let mut s = RandomStream::new(3);
        let t = [0.5, -0.25, 8.0];
        assert_eq!(de_crossover(&t, &t, 0.9, &mut s).unwrap(), t);
    }

    #[test]
    fn crossover_draw_count() {
        let mut s = RandomStream::new(4);
        let p0 = s.position();
        de_crossover(&[0.0; 7], &[1.0; 7], 0.3, &mut s).unwrap();
        assert_eq!(s.position() - p0, 2 * 8);
    }
}
