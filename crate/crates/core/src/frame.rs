//! Per-frame joint-angle records, datasets and range validation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::joint::JointId;

/// Posture modifiers observed for one joint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierFlags {
    #[serde(default)]
    pub twist: bool,
    #[serde(default)]
    pub side_bend: bool,
    #[serde(default)]
    pub abduction: bool,
    #[serde(default)]
    pub shoulder_raised: bool,
    #[serde(default)]
    pub arm_supported: bool,
    #[serde(default)]
    pub unilateral_stance: bool,
}

/// Names of the individual modifier flags, used for adjustment bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    Twist,
    SideBend,
    Abduction,
    ShoulderRaised,
    ArmSupported,
    UnilateralStance,
}

impl Modifier {
    pub const ALL: [Modifier; 6] = [
        Modifier::Twist,
        Modifier::SideBend,
        Modifier::Abduction,
        Modifier::ShoulderRaised,
        Modifier::ArmSupported,
        Modifier::UnilateralStance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modifier::Twist => "twist",
            Modifier::SideBend => "side_bend",
            Modifier::Abduction => "abduction",
            Modifier::ShoulderRaised => "shoulder_raised",
            Modifier::ArmSupported => "arm_supported",
            Modifier::UnilateralStance => "unilateral_stance",
        }
    }
}

impl ModifierFlags {
    pub fn get(&self, m: Modifier) -> bool {
        match m {
            Modifier::Twist => self.twist,
            Modifier::SideBend => self.side_bend,
            Modifier::Abduction => self.abduction,
            Modifier::ShoulderRaised => self.shoulder_raised,
            Modifier::ArmSupported => self.arm_supported,
            Modifier::UnilateralStance => self.unilateral_stance,
        }
    }

    pub fn set(&mut self, m: Modifier, value: bool) {
        let slot = match m {
            Modifier::Twist => &mut self.twist,
            Modifier::SideBend => &mut self.side_bend,
            Modifier::Abduction => &mut self.abduction,
            Modifier::ShoulderRaised => &mut self.shoulder_raised,
            Modifier::ArmSupported => &mut self.arm_supported,
            Modifier::UnilateralStance => &mut self.unilateral_stance,
        };
        *slot = value;
    }
}

/// Hand coupling quality.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Good,
    Fair,
    Poor,
    Unacceptable,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Good => "good",
            Coupling::Fair => "fair",
            Coupling::Poor => "poor",
            Coupling::Unacceptable => "unacceptable",
        }
    }
}

impl core::str::FromStr for Coupling {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "good" => Ok(Coupling::Good),
            "fair" => Ok(Coupling::Fair),
            "poor" => Ok(Coupling::Poor),
            "unacceptable" => Ok(Coupling::Unacceptable),
            _ => Err(()),
        }
    }
}

/// One video frame's posture measurement.
///
/// `angles` holds the primary angle of each joint in degrees. For the leg
/// joints that angle is the knee flexion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_index: u64,
    pub timestamp_s: f64,
    pub angles: BTreeMap<JointId, f64>,
    #[serde(default)]
    pub modifiers: BTreeMap<JointId, ModifierFlags>,
    #[serde(default)]
    pub neck_twist_deg: f64,
    #[serde(default)]
    pub trunk_twist_deg: f64,
    #[serde(default)]
    pub load_kg: f64,
    #[serde(default)]
    pub shock_force: bool,
    #[serde(default)]
    pub coupling: Coupling,
    #[serde(default)]
    pub confidence: BTreeMap<JointId, f64>,
    #[serde(default)]
    pub image_ref: Option<String>,
}

impl FrameRecord {
    /// A frame with no angles, default modifiers and full confidence.
    pub fn new(frame_index: u64, timestamp_s: f64) -> Self {
        FrameRecord {
            frame_index,
            timestamp_s,
            angles: BTreeMap::new(),
            modifiers: BTreeMap::new(),
            neck_twist_deg: 0.0,
            trunk_twist_deg: 0.0,
            load_kg: 0.0,
            shock_force: false,
            coupling: Coupling::Good,
            confidence: BTreeMap::new(),
            image_ref: None,
        }
    }

    pub fn angle(&self, joint: JointId) -> Option<f64> {
        self.angles.get(&joint).copied()
    }

    pub fn flags(&self, joint: JointId) -> ModifierFlags {
        self.modifiers.get(&joint).copied().unwrap_or_default()
    }

    pub fn knee_flexion_deg(&self, side: crate::joint::BodySide) -> Option<f64> {
        self.angle(JointId::scored(crate::joint::BodyPart::Leg, side))
    }

    /// Mean of the per-joint confidences, 1.0 when none are recorded.
    pub fn mean_confidence(&self) -> f64 {
        if self.confidence.is_empty() {
            return 1.0;
        }
        self.confidence.values().sum::<f64>() / self.confidence.len() as f64
    }
}

/// A recording of frames plus the set of frames flagged by filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: String,
    pub frames: Vec<FrameRecord>,
    pub fps: f64,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
    #[serde(default)]
    pub excluded: BTreeSet<u64>,
}

impl Dataset {
    pub fn new(id: impl Into<String>, fps: f64, frames: Vec<FrameRecord>) -> Self {
        Dataset {
            id: id.into(),
            frames,
            fps,
            meta: BTreeMap::new(),
            excluded: BTreeSet::new(),
        }
    }

    pub fn is_excluded(&self, frame_index: u64) -> bool {
        self.excluded.contains(&frame_index)
    }

    /// Frames that survived filtering, in order.
    pub fn included(&self) -> impl Iterator<Item = &FrameRecord> + '_ {
        self.frames.iter().filter(move |f| !self.is_excluded(f.frame_index))
    }

    /// Position of `frame_index` in `frames`.
    pub fn position(&self, frame_index: u64) -> Option<usize> {
        let first = self.frames.first()?.frame_index;
        let pos = usize::try_from(frame_index.checked_sub(first)?).ok()?;
        match self.frames.get(pos) {
            Some(f) if f.frame_index == frame_index => Some(pos),
            _ => self.frames.binary_search_by_key(&frame_index, |f| f.frame_index).ok(),
        }
    }

    pub fn frame(&self, frame_index: u64) -> Option<&FrameRecord> {
        self.position(frame_index).map(|p| &self.frames[p])
    }
}

/// Inclusive valid motion range of a joint, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub min: f64,
    pub max: f64,
}

impl AngleRange {
    pub const fn new(min: f64, max: f64) -> Self {
        AngleRange { min, max }
    }

    pub fn contains(&self, angle: f64) -> bool {
        angle >= self.min && angle <= self.max
    }

    pub fn clamp(&self, angle: f64) -> f64 {
        angle.max(self.min).min(self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    NonFinite,
    OutOfRange { angle_deg: f64, min: f64, max: f64 },
}

/// An angle that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub joint: JointId,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::NonFinite => write!(f, "{}: non-finite angle", self.joint),
            ViolationKind::OutOfRange { angle_deg, min, max } => {
                write!(f, "{}: {angle_deg} outside [{min}, {max}]", self.joint)
            }
        }
    }
}

/// Checks every angle of `frame` against its configured range.
///
/// Non-finite angles are always reported. Twist angles are attributed to the
/// neck and trunk and only checked for finiteness. Joints without a range
/// entry are only checked for finiteness.
pub fn validate_frame(frame: &FrameRecord, ranges: &BTreeMap<JointId, AngleRange>) -> Vec<Violation> {
    let mut out = Vec::new();
    for (&joint, &angle) in &frame.angles {
        if !angle.is_finite() {
            out.push(Violation { joint, kind: ViolationKind::NonFinite });
        } else if let Some(r) = ranges.get(&joint) {
            if !r.contains(angle) {
                out.push(Violation {
                    joint,
                    kind: ViolationKind::OutOfRange { angle_deg: angle, min: r.min, max: r.max },
                });
            }
        }
    }
    for (joint, twist) in [(JointId::NECK, frame.neck_twist_deg), (JointId::TRUNK, frame.trunk_twist_deg)] {
        if !twist.is_finite() {
            out.push(Violation { joint, kind: ViolationKind::NonFinite });
        }
    }
    out
}
