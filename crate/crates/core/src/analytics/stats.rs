//! Descriptive statistics, generic over the float type.

use num_traits::Float;

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Float>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    let n = T::from(xs.len())?;
    Some(xs.iter().fold(T::zero(), |acc, &x| acc + x) / n)
}

/// Sample standard deviation (n − 1 denominator); `None` below two values.
pub fn sample_sd<T: Float>(xs: &[T]) -> Option<T> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss = xs.iter().fold(T::zero(), |acc, &x| acc + (x - m) * (x - m));
    Some((ss / T::from(xs.len() - 1)?).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary<T> {
    pub n: usize,
    pub mean: T,
    pub sd: Option<T>,
    pub min: T,
    pub max: T,
}

pub fn summarize<T: Float>(xs: &[T]) -> Option<Summary<T>> {
    let mean = mean(xs)?;
    let min = xs.iter().copied().fold(T::infinity(), T::min);
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    Some(Summary {
        n: xs.len(),
        mean,
        sd: sample_sd(xs),
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), Some(2.0));
        assert_eq!(sample_sd(&[1.0, 2.0, 3.0]), Some(1.0));
        assert_eq!(sample_sd(&[5.0]), None);
        let s = summarize(&[1.0f32, 600.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.n), (300.5, 1.0, 600.0, 2));
        assert!(summarize::<f64>(&[]).is_none());
    }
}
