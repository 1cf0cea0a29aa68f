//! Labeled 68-point landmark records: the unit of input for the whole
//! toolkit. Face detection and landmark prediction happen upstream; this
//! crate consumes their coordinate output.

use std::ops::Range;

use thiserror::Error;

use crate::geometry::Point;
use crate::scalar::Scalar;

/// Number of points in the standard 68-landmark convention.
pub const LANDMARK_COUNT: usize = 68;

/// Left-eye indices in the standard 68-point convention.
pub const LEFT_EYE: Range<usize> = 36..42;
/// Right-eye indices.
pub const RIGHT_EYE: Range<usize> = 42..48;
/// Inner-lip contour indices.
pub const INNER_LIP: Range<usize> = 60..68;

/// Fatigue label: 1 = fatigue, 0 = non-fatigue.
pub const LABEL_FATIGUE: u8 = 1;
pub const LABEL_NON_FATIGUE: u8 = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("expected {LANDMARK_COUNT} landmark points, found {found}")]
    PointCount { found: usize },
    #[error("non-finite coordinate at landmark {index}")]
    NonFiniteCoordinate { index: usize },
    #[error("timestamp must be a finite non-negative number of seconds")]
    InvalidTimestamp,
    #[error("label {value} out of range: must be 0 or 1")]
    InvalidLabel { value: u8 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("dataset must contain at least one sample")]
    Empty,
    #[error("dataset mixes labeled and unlabeled samples (sample {position})")]
    MixedLabeling { position: usize },
    #[error("frame_id {found} at sample {position} not greater than previous {prev}")]
    NonMonotonicFrameId { position: usize, prev: u64, found: u64 },
}

/// One timestamped 68-point facial landmark record.
///
/// Immutable after construction: coordinates are validated finite and the
/// point count is fixed by the type.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame<S> {
    frame_id: u64,
    points: [Point<S>; LANDMARK_COUNT],
    timestamp_s: Option<S>,
}

impl<S: Scalar> LandmarkFrame<S> {
    pub fn new(
        frame_id: u64,
        points: [Point<S>; LANDMARK_COUNT],
        timestamp_s: Option<S>,
    ) -> Result<Self, FrameError> {
        for (index, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(FrameError::NonFiniteCoordinate { index });
            }
        }
        if let Some(t) = timestamp_s {
            if !t.is_finite() || t < S::zero() {
                return Err(FrameError::InvalidTimestamp);
            }
        }
        Ok(Self {
            frame_id,
            points,
            timestamp_s,
        })
    }

    /// Like [`LandmarkFrame::new`] but from a runtime-sized point list.
    pub fn from_points(
        frame_id: u64,
        points: Vec<Point<S>>,
        timestamp_s: Option<S>,
    ) -> Result<Self, FrameError> {
        let found = points.len();
        let points: [Point<S>; LANDMARK_COUNT] = points
            .try_into()
            .map_err(|_| FrameError::PointCount { found })?;
        Self::new(frame_id, points, timestamp_s)
    }

    pub fn frame_id(&self) -> u64 {
        self.frame_id
    }

    pub fn points(&self) -> &[Point<S>; LANDMARK_COUNT] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point<S> {
        self.points[index]
    }

    pub fn timestamp_s(&self) -> Option<S> {
        self.timestamp_s
    }
}

/// A landmark frame with an optional binary fatigue label.
///
/// `label` is `None` for unlabeled datasets (prediction/stream input) and
/// `Some(0 | 1)` for training and evaluation data.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample<S> {
    frame: LandmarkFrame<S>,
    label: Option<u8>,
}

impl<S: Scalar> LabeledSample<S> {
    pub fn new(frame: LandmarkFrame<S>, label: Option<u8>) -> Result<Self, FrameError> {
        if let Some(value) = label {
            if value > 1 {
                return Err(FrameError::InvalidLabel { value });
            }
        }
        Ok(Self { frame, label })
    }

    pub fn frame(&self) -> &LandmarkFrame<S> {
        &self.frame
    }

    pub fn label(&self) -> Option<u8> {
        self.label
    }
}

/// An ordered, homogeneously labeled collection of samples.
///
/// Invariants enforced at construction: non-empty, frame ids strictly
/// increasing, and either every sample labeled or none.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S> {
    samples: Vec<LabeledSample<S>>,
    provenance: String,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(
        samples: Vec<LabeledSample<S>>,
        provenance: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        if samples.is_empty() {
            return Err(DatasetError::Empty);
        }
        let labeled = samples[0].label().is_some();
        let mut prev_id = samples[0].frame().frame_id();
        for (position, sample) in samples.iter().enumerate().skip(1) {
            if sample.label().is_some() != labeled {
                return Err(DatasetError::MixedLabeling { position });
            }
            let id = sample.frame().frame_id();
            if id <= prev_id {
                return Err(DatasetError::NonMonotonicFrameId {
                    position,
                    prev: prev_id,
                    found: id,
                });
            }
            prev_id = id;
        }
        Ok(Self {
            samples,
            provenance: provenance.into(),
        })
    }

    pub fn samples(&self) -> &[LabeledSample<S>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when every sample carries a label.
    pub fn is_labeled(&self) -> bool {
        self.samples[0].label().is_some()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn frames(&self) -> impl Iterator<Item = &LandmarkFrame<S>> {
        self.samples.iter().map(|s| s.frame())
    }

    /// Labels of all samples; `None` when the dataset is unlabeled.
    pub fn labels(&self) -> Option<Vec<u8>> {
        self.samples.iter().map(|s| s.label()).collect()
    }

    /// Sample-for-sample equality, ignoring provenance (which records the
    /// carrier, not the content).
    pub fn same_samples(&self, other: &Self) -> bool {
        self.samples == other.samples
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::uniform_frame;
    use super::*;

    #[test]
    fn frame_rejects_non_finite_coordinates() {
        let mut points = [Point::new(0.0f64, 0.0); LANDMARK_COUNT];
        points[7] = Point::new(f64::NAN, 0.0);
        let err = LandmarkFrame::new(0, points, None).unwrap_err();
        assert_eq!(err, FrameError::NonFiniteCoordinate { index: 7 });
    }

    #[test]
    fn frame_rejects_wrong_point_count() {
        let points = vec![Point::new(0.0f64, 0.0); 67];
        let err = LandmarkFrame::from_points(0, points, None).unwrap_err();
        assert_eq!(err, FrameError::PointCount { found: 67 });
    }

    #[test]
    fn frame_rejects_negative_timestamp() {
        let points = [Point::new(0.0f64, 0.0); LANDMARK_COUNT];
        let err = LandmarkFrame::new(0, points, Some(-1.0)).unwrap_err();
        assert_eq!(err, FrameError::InvalidTimestamp);
    }

    #[test]
    fn label_must_be_binary() {
        let frame = uniform_frame(0, 0.0);
        let err = LabeledSample::new(frame, Some(2)).unwrap_err();
        assert_eq!(err, FrameError::InvalidLabel { value: 2 });
    }

    #[test]
    fn dataset_rejects_mixed_labeling() {
        let a = LabeledSample::new(uniform_frame(0, 0.0), Some(1)).unwrap();
        let b = LabeledSample::new(uniform_frame(1, 0.0), None).unwrap();
        let err = Dataset::new(vec![a, b], "test").unwrap_err();
        assert_eq!(err, DatasetError::MixedLabeling { position: 1 });
    }

    #[test]
    fn dataset_requires_strictly_increasing_frame_ids() {
        let a = LabeledSample::new(uniform_frame(5, 0.0), None).unwrap();
        let b = LabeledSample::new(uniform_frame(5, 0.0), None).unwrap();
        let err = Dataset::new(vec![a, b], "test").unwrap_err();
        assert_eq!(
            err,
            DatasetError::NonMonotonicFrameId {
                position: 1,
                prev: 5,
                found: 5
            }
        );
    }

    #[test]
    fn dataset_rejects_empty() {
        let err = Dataset::<f64>::new(vec![], "test").unwrap_err();
        assert_eq!(err, DatasetError::Empty);
    }
}
