use super::{CollapseSequence, Face, FaceComplex};
use crate::error::{input, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFailure {
    /// Zero-based index of the offending step.
    pub step: usize,
    pub reason: String,
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone)]
pub struct ValidationReport<T> {
    pub steps_applied: usize,
    pub failure: Option<StepFailure>,
    /// Cells still present when the replay stopped, in canonical order.
    pub remaining: Vec<T>,
    /// Euler characteristic before the first step and after every applied step.
    pub euler_trace: Vec<i64>,
}

impl<T: Face> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.euler_trace.windows(2).all(|w| w[0] == w[1])
    }

    /// Passed and finished exactly at `expected` (in any order).
    pub fn finishes_at(&self, expected: &[T]) -> bool {
        if !self.passed() || expected.len() != self.remaining.len() {
            return false;
        }
        let mut e = expected.to_vec();
        e.sort();
        e == self.remaining
    }
}

/// Replays `seq` on `start`, checking each step in turn.
///
/// A step is accepted when both cells are still present, the free face is a
/// facet of the cofacet, the cofacet is its only remaining coface, and the
/// cofacet itself has no remaining coface. Labels that do not name a cell of
/// `start` are an input error rather than a failed step.
pub fn validate_sequence<T: Face>(start: &FaceComplex<T>, seq: &CollapseSequence<T>) -> Result<ValidationReport<T>> {
    let mut pairs = Vec::with_capacity(seq.steps.len());
    for (i, st) in seq.steps.iter().enumerate() {
        let lo = start.index_of(&st.free_face);
        let hi = start.index_of(&st.cofacet);
        match (lo, hi) {
            (Some(a), Some(b)) => pairs.push((a, b)),
            (None, _) => return input(format!("step {i}: {} is not a cell of the start complex", st.free_face)),
            (_, None) => return input(format!("step {i}: {} is not a cell of the start complex", st.cofacet)),
        }
    }

    let mut alive = vec![true; start.len()];
    let mut cofaces: Vec<usize> = (0..start.len()).map(|i| start.cofacets_of(i).len()).collect();
    let mut euler = start.euler_characteristic();
    let mut euler_trace = vec![euler];
    let mut failure = None;
    let mut applied = 0;

    for (i, &(lo, hi)) in pairs.iter().enumerate() {
        let fail = |reason: String| Some(StepFailure { step: i, reason });
        let (f, c) = (&seq.steps[i].free_face, &seq.steps[i].cofacet);
        if !alive[lo] || !alive[hi] {
            failure = fail(format!("{f} or {c} was already removed"));
        } else if !start.facets_of(hi).contains(&lo) {
            failure = fail(format!("{f} is not a facet of {c}"));
        } else if cofaces[hi] != 0 {
            failure = fail(format!("{c} still has {} coface(s)", cofaces[hi]));
        } else if cofaces[lo] != 1 {
            failure = fail(format!("{f} is not free: {} remaining cofaces", cofaces[lo]));
        }
        if failure.is_some() {
            break;
        }
        for idx in [hi, lo] {
            alive[idx] = false;
            for &g in start.facets_of(idx) {
                cofaces[g] -= 1;
            }
            euler -= if start.cells()[idx].dim().is_multiple_of(2) { 1 } else { -1 };
        }
        euler_trace.push(euler);
        applied += 1;
    }

    let remaining = start.cells().iter().zip(&alive).filter(|(_, a)| **a).map(|(c, _)| c.clone()).collect();
    Ok(ValidationReport { steps_applied: applied, failure, remaining, euler_trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::CollapseStep;
    use crate::complex::{complex, simplex, Simplex};

    fn step(f: &[u32], c: &[u32]) -> CollapseStep<Simplex> {
        CollapseStep { free_face: simplex(f), cofacet: simplex(c) }
    }

    #[test]
    fn triangle_collapses_to_a_vertex() {
        let fc = FaceComplex::from_simplicial(&complex(&[&[0, 1, 2]]));
        let seq = CollapseSequence {
            start: "tri".into(),
            finish: "pt".into(),
            steps: vec![step(&[1, 2], &[0, 1, 2]), step(&[2], &[0, 2]), step(&[1], &[0, 1])],
        };
        let r = validate_sequence(&fc, &seq).unwrap();
        assert!(r.passed());
        assert!(r.finishes_at(&[simplex(&[0])]));
        assert_eq!(r.euler_trace, vec![1, 1, 1, 1]);
    }

    #[test]
    fn empty_sequence_keeps_everything() {
        let k = complex(&[&[0, 1]]);
        let fc = FaceComplex::from_simplicial(&k);
        let r = validate_sequence(&fc, &CollapseSequence::empty("e", "e")).unwrap();
        assert!(r.passed());
        assert!(r.finishes_at(k.simplexes()));
    }

    #[test]
    fn first_violation_is_reported() {
        let fc = FaceComplex::from_simplicial(&complex(&[&[0, 1, 2]]));
        // {2} is in two edges before the triangle is gone
        let seq = CollapseSequence {
            start: "tri".into(),
            finish: "pt".into(),
            steps: vec![step(&[2], &[0, 2]), step(&[1, 2], &[0, 1, 2])],
        };
        let r = validate_sequence(&fc, &seq).unwrap();
        assert_eq!(r.failure.as_ref().map(|f| f.step), Some(0));
        assert!(!r.passed());
    }

    #[test]
    fn dangling_labels_are_input_errors() {
        let fc = FaceComplex::from_simplicial(&complex(&[&[0, 1]]));
        let seq = CollapseSequence { start: "e".into(), finish: "e".into(), steps: vec![step(&[1], &[1, 5])] };
        assert!(validate_sequence(&fc, &seq).is_err());
    }
}
