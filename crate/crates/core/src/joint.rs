//! Joint identifiers and body sides.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The six body parts scored by REBA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyPart {
    Neck,
    Trunk,
    Leg,
    UpperArm,
    LowerArm,
    Wrist,
}

impl BodyPart {
    pub const ALL: [BodyPart; 6] = [
        BodyPart::Neck,
        BodyPart::Trunk,
        BodyPart::Leg,
        BodyPart::UpperArm,
        BodyPart::LowerArm,
        BodyPart::Wrist,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BodyPart::Neck => "neck",
            BodyPart::Trunk => "trunk",
            BodyPart::Leg => "leg",
            BodyPart::UpperArm => "upper_arm",
            BodyPart::LowerArm => "lower_arm",
            BodyPart::Wrist => "wrist",
        }
    }

    /// Neck and trunk sit on the body midline and carry no side.
    pub const fn is_axial(self) -> bool {
        matches!(self, BodyPart::Neck | BodyPart::Trunk)
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BodyPart {
    type Err = ParseJointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BodyPart::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or(ParseJointError)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Center,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Center => "center",
        }
    }
}

impl FromStr for Side {
    type Err = ParseJointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "center" => Ok(Side::Center),
            _ => Err(ParseJointError),
        }
    }
}

/// A scoring side. Every REBA evaluation is done once per body side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodySide {
    Left,
    Right,
}

impl BodySide {
    pub const BOTH: [BodySide; 2] = [BodySide::Left, BodySide::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            BodySide::Left => "left",
            BodySide::Right => "right",
        }
    }
}

impl From<BodySide> for Side {
    fn from(side: BodySide) -> Side {
        match side {
            BodySide::Left => Side::Left,
            BodySide::Right => Side::Right,
        }
    }
}

impl fmt::Display for BodySide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BodySide {
    type Err = ParseJointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(BodySide::Left),
            "right" => Ok(BodySide::Right),
            _ => Err(ParseJointError),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("invalid joint identifier")]
pub struct ParseJointError;

/// A side-resolved joint, e.g. `upper_arm_right` or `neck_center`.
///
/// Neck and trunk are always `center`; the limbs are always `left` or `right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointId {
    part: BodyPart,
    side: Side,
}

impl JointId {
    pub const NECK: JointId = JointId { part: BodyPart::Neck, side: Side::Center };
    pub const TRUNK: JointId = JointId { part: BodyPart::Trunk, side: Side::Center };

    pub const ALL: [JointId; 10] = [
        JointId::NECK,
        JointId::TRUNK,
        JointId { part: BodyPart::Leg, side: Side::Left },
        JointId { part: BodyPart::Leg, side: Side::Right },
        JointId { part: BodyPart::UpperArm, side: Side::Left },
        JointId { part: BodyPart::UpperArm, side: Side::Right },
        JointId { part: BodyPart::LowerArm, side: Side::Left },
        JointId { part: BodyPart::LowerArm, side: Side::Right },
        JointId { part: BodyPart::Wrist, side: Side::Left },
        JointId { part: BodyPart::Wrist, side: Side::Right },
    ];

    pub fn new(part: BodyPart, side: Side) -> Option<JointId> {
        let ok = if part.is_axial() { side == Side::Center } else { side != Side::Center };
        ok.then_some(JointId { part, side })
    }

    /// The joint of `part` that is scored for `side`; axial parts ignore the side.
    pub const fn scored(part: BodyPart, side: BodySide) -> JointId {
        let side = match (part.is_axial(), side) {
            (true, _) => Side::Center,
            (false, BodySide::Left) => Side::Left,
            (false, BodySide::Right) => Side::Right,
        };
        JointId { part, side }
    }

    /// The six joints entering one side's REBA evaluation.
    pub fn for_side(side: BodySide) -> [JointId; 6] {
        BodyPart::ALL.map(|p| JointId::scored(p, side))
    }

    pub fn part(self) -> BodyPart {
        self.part
    }

    pub fn side(self) -> Side {
        self.side
    }

    /// The scoring side whose evaluation reads this joint; `None` for axial joints.
    pub fn body_side(self) -> Option<BodySide> {
        match self.side {
            Side::Left => Some(BodySide::Left),
            Side::Right => Some(BodySide::Right),
            Side::Center => None,
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.part.as_str(), self.side.as_str())
    }
}

impl FromStr for JointId {
    type Err = ParseJointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (part, side) = s.rsplit_once('_').ok_or(ParseJointError)?;
        JointId::new(part.parse()?, side.parse()?).ok_or(ParseJointError)
    }
}

impl Serialize for JointId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for JointId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse()
            .map_err(|_| serde::de::Error::custom(alloc::format!("unknown joint `{s}`")))
    }
}
