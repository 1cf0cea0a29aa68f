//! Eye and mouth aspect ratios from landmark frames, plus threshold-based
//! blink/yawn event detection over frame sequences.
//!
//! Both ratios share one form: the summed vertical point-pair distances over
//! twice the horizontal corner distance. An open eye keeps the value roughly
//! constant; a closed eye drives it to zero. A wide-open mouth drives the
//! mouth ratio up.

use thiserror::Error;

use crate::geometry::Point;
use crate::landmark::{LandmarkFrame, INNER_LIP, LEFT_EYE, RIGHT_EYE};
use crate::scalar::{cast, Scalar};

/// Six points in the aspect-ratio layout: `p1`/`p4` are the horizontal
/// corner pair, `(p2, p6)` and `(p3, p5)` the two vertical pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixPointSet<S> {
    pub p1: Point<S>,
    pub p2: Point<S>,
    pub p3: Point<S>,
    pub p4: Point<S>,
    pub p5: Point<S>,
    pub p6: Point<S>,
}

impl<S: Scalar> SixPointSet<S> {
    /// Eye layout: six consecutive landmarks starting at `base`
    /// (corner, upper, upper, corner, lower, lower).
    fn from_eye(frame: &LandmarkFrame<S>, base: usize) -> Self {
        Self {
            p1: frame.point(base),
            p2: frame.point(base + 1),
            p3: frame.point(base + 2),
            p4: frame.point(base + 3),
            p5: frame.point(base + 4),
            p6: frame.point(base + 5),
        }
    }

    /// Inner-lip layout. The inner lip has eight landmarks (60-67); the
    /// ratio needs six: corners 60/64, vertical pairs (61, 67) and (63, 65),
    /// symmetric about the corners.
    fn from_inner_lip(frame: &LandmarkFrame<S>) -> Self {
        Self {
            p1: frame.point(60),
            p2: frame.point(61),
            p3: frame.point(63),
            p4: frame.point(64),
            p5: frame.point(65),
            p6: frame.point(67),
        }
    }
}

/// Face region a geometry error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRegion {
    LeftEye,
    RightEye,
    InnerLip,
}

impl std::fmt::Display for FaceRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FaceRegion::LeftEye => "left eye",
            FaceRegion::RightEye => "right eye",
            FaceRegion::InnerLip => "inner lip",
        };
        f.write_str(name)
    }
}

/// The corner pair coincides, so the ratio denominator is zero.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("degenerate horizontal extent: corner points coincide")]
pub struct DegenerateHorizontal;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FeatureError {
    #[error("{region} has zero horizontal extent")]
    DegenerateHorizontal { region: FaceRegion },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EventError {
    #[error("feature series is empty")]
    EmptySeries,
    #[error("fps must be positive")]
    NonPositiveFps,
    #[error("event thresholds must be positive")]
    NonPositiveThreshold,
    #[error("min_event_frames must be at least 1")]
    ZeroMinEventFrames,
}

/// `(|p2 - p6| + |p3 - p5|) / (2 |p1 - p4|)` with Euclidean norms.
pub fn aspect_ratio<S: Scalar>(points: &SixPointSet<S>) -> Result<S, DegenerateHorizontal> {
    let horizontal = points.p1.distance(&points.p4);
    if horizontal == S::zero() {
        return Err(DegenerateHorizontal);
    }
    let vertical = points.p2.distance(&points.p6) + points.p3.distance(&points.p5);
    Ok(vertical / (cast::<S>(2.0) * horizontal))
}

/// Per-eye aspect ratios and their mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeAspectRatios<S> {
    pub left: S,
    pub right: S,
    pub mean: S,
}

/// Aspect ratio of each eye (landmarks 36-41 and 42-47) and their mean.
pub fn compute_ear<S: Scalar>(frame: &LandmarkFrame<S>) -> Result<EyeAspectRatios<S>, FeatureError> {
    let left = aspect_ratio(&SixPointSet::from_eye(frame, LEFT_EYE.start)).map_err(|_| {
        FeatureError::DegenerateHorizontal {
            region: FaceRegion::LeftEye,
        }
    })?;
    let right = aspect_ratio(&SixPointSet::from_eye(frame, RIGHT_EYE.start)).map_err(|_| {
        FeatureError::DegenerateHorizontal {
            region: FaceRegion::RightEye,
        }
    })?;
    Ok(EyeAspectRatios {
        left,
        right,
        mean: (left + right) / cast::<S>(2.0),
    })
}

/// Aspect ratio of the inner-lip contour.
pub fn compute_mar<S: Scalar>(frame: &LandmarkFrame<S>) -> Result<S, FeatureError> {
    debug_assert!(INNER_LIP.len() == 8);
    aspect_ratio(&SixPointSet::from_inner_lip(frame)).map_err(|_| {
        FeatureError::DegenerateHorizontal {
            region: FaceRegion::InnerLip,
        }
    })
}

/// EAR/MAR values for one frame: the learner's input row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector<S> {
    pub ear_left: S,
    pub ear_right: S,
    pub ear: S,
    pub mar: S,
}

impl<S: Scalar> FeatureVector<S> {
    /// Column names, in emission order.
    pub const COLUMNS: [&'static str; 4] = ["ear_left", "ear_right", "ear", "mar"];

    /// Value of a named column.
    pub fn column(&self, name: &str) -> Option<S> {
        match name {
            "ear_left" => Some(self.ear_left),
            "ear_right" => Some(self.ear_right),
            "ear" => Some(self.ear),
            "mar" => Some(self.mar),
            _ => None,
        }
    }

    /// The two indicators the classifier trains on.
    pub fn ear_mar(&self) -> [S; 2] {
        [self.ear, self.mar]
    }

    /// Values for an ordered list of column names.
    pub fn select(&self, names: &[String]) -> Option<Vec<S>> {
        names.iter().map(|n| self.column(n)).collect()
    }
}

/// EAR and MAR for one frame.
pub fn extract_features<S: Scalar>(frame: &LandmarkFrame<S>) -> Result<FeatureVector<S>, FeatureError> {
    let eyes = compute_ear(frame)?;
    let mar = compute_mar(frame)?;
    Ok(FeatureVector {
        ear_left: eyes.left,
        ear_right: eyes.right,
        ear: eyes.mean,
        mar,
    })
}

/// Blink/yawn events detected over a frame sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries<S> {
    pub blink_count: usize,
    pub blink_frequency_per_min: S,
    pub yawn_count: usize,
    /// True on frames belonging to a counted blink run.
    pub blink_mask: Vec<bool>,
    /// True on frames belonging to a counted yawn run.
    pub yawn_mask: Vec<bool>,
}

/// Detect blinks (EAR below threshold) and yawns (MAR above threshold).
///
/// An event is a maximal run of at least `min_event_frames` consecutive
/// qualifying frames. Blink frequency scales the count to per-minute using
/// the series duration `len / fps`.
pub fn detect_events<S: Scalar>(
    series: &[FeatureVector<S>],
    ear_threshold: S,
    mar_threshold: S,
    min_event_frames: usize,
    fps: S,
) -> Result<EventSeries<S>, EventError> {
    if series.is_empty() {
        return Err(EventError::EmptySeries);
    }
    if !(fps > S::zero()) || !fps.is_finite() {
        return Err(EventError::NonPositiveFps);
    }
    if !(ear_threshold > S::zero()) || !(mar_threshold > S::zero()) {
        return Err(EventError::NonPositiveThreshold);
    }
    if min_event_frames == 0 {
        return Err(EventError::ZeroMinEventFrames);
    }

    let (blink_count, blink_mask) =
        count_runs(series.iter().map(|f| f.ear < ear_threshold), min_event_frames);
    let (yawn_count, yawn_mask) =
        count_runs(series.iter().map(|f| f.mar > mar_threshold), min_event_frames);

    let minutes = cast::<S>(series.len() as f64) / fps / cast::<S>(60.0);
    let blink_frequency_per_min = cast::<S>(blink_count as f64) / minutes;

    Ok(EventSeries {
        blink_count,
        blink_frequency_per_min,
        yawn_count,
        blink_mask,
        yawn_mask,
    })
}

/// Count maximal runs of `true` with length >= `min_len`; the mask marks
/// only frames inside counted runs.
fn count_runs(flags: impl Iterator<Item = bool>, min_len: usize) -> (usize, Vec<bool>) {
    let flags: Vec<bool> = flags.collect();
    let mut mask = vec![false; flags.len()];
    let mut count = 0;
    let mut start = None;
    for i in 0..=flags.len() {
        let active = i < flags.len() && flags[i];
        match (start, active) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                if i - s >= min_len {
                    count += 1;
                    mask[s..i].iter_mut().for_each(|m| *m = true);
                }
                start = None;
            }
            _ => {}
        }
    }
    (count, mask)
}
