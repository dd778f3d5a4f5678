use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::{AngleRange, Modifier, ModifierFlags};
use crate::joint::{BodyPart, JointId};

use super::RebaError;

/// One angle interval and the base score it assigns.
///
/// Intervals are `[lo, hi)`. A band marked `hi_inclusive` also owns `hi`,
/// and the last band of a joint is always closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleBand {
    pub lo: f64,
    pub hi: f64,
    pub score: u8,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub hi_inclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointBands {
    pub bands: Vec<AngleBand>,
    /// Highest score the joint can feed into its table.
    pub max_score: u8,
}

impl JointBands {
    pub fn valid_range(&self) -> AngleRange {
        let lo = self.bands.first().map_or(0.0, |b| b.lo);
        let hi = self.bands.last().map_or(0.0, |b| b.hi);
        AngleRange::new(lo, hi)
    }

    /// Index of the band containing `angle`.
    pub fn band_index(&self, angle: f64) -> Option<usize> {
        let last = self.bands.len().checked_sub(1)?;
        self.bands.iter().enumerate().position(|(i, b)| {
            angle >= b.lo && (angle < b.hi || (angle == b.hi && (b.hi_inclusive || i == last)))
        })
    }

    pub fn min_score(&self) -> u8 {
        self.bands.iter().map(|b| b.score).min().unwrap_or(1)
    }
}

/// A score adjustment applied when a modifier flag is set on a body part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierRule {
    pub part: BodyPart,
    pub flag: Modifier,
    pub delta: i8,
}

/// Angle bands for every body part plus the modifier adjustments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleBandConfig {
    pub neck: JointBands,
    pub trunk: JointBands,
    pub leg: JointBands,
    pub upper_arm: JointBands,
    pub lower_arm: JointBands,
    pub wrist: JointBands,
    pub modifiers: Vec<ModifierRule>,
    /// Neck and trunk twist angles beyond this magnitude set the twist flag.
    pub twist_threshold_deg: f64,
}

impl AngleBandConfig {
    pub fn joint(&self, part: BodyPart) -> &JointBands {
        match part {
            BodyPart::Neck => &self.neck,
            BodyPart::Trunk => &self.trunk,
            BodyPart::Leg => &self.leg,
            BodyPart::UpperArm => &self.upper_arm,
            BodyPart::LowerArm => &self.lower_arm,
            BodyPart::Wrist => &self.wrist,
        }
    }

    /// Valid motion range of every joint, as spanned by its bands.
    pub fn valid_ranges(&self) -> BTreeMap<JointId, AngleRange> {
        JointId::ALL.iter().map(|&j| (j, self.joint(j.part()).valid_range())).collect()
    }

    pub(crate) fn check(&self, problems: &mut Vec<String>) {
        for part in BodyPart::ALL {
            let jb = self.joint(part);
            if jb.bands.is_empty() {
                problems.push(format!("angle_bands.{part}: no bands"));
                continue;
            }
            for (i, b) in jb.bands.iter().enumerate() {
                if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                    problems.push(format!("angle_bands.{part}[{i}]: bad interval [{}, {})", b.lo, b.hi));
                }
                if b.score == 0 || b.score > jb.max_score {
                    problems.push(format!("angle_bands.{part}[{i}]: score {} outside [1, {}]", b.score, jb.max_score));
                }
            }
            for (i, w) in jb.bands.windows(2).enumerate() {
                if w[0].hi != w[1].lo {
                    problems.push(format!("angle_bands.{part}[{i}]: gap or overlap at {} / {}", w[0].hi, w[1].lo));
                }
            }
        }
    }
}

/// A joint's score together with the angle and adjustments that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointScore {
    pub joint: JointId,
    pub score: u8,
    pub contributing_angle_deg: f64,
    pub adjustments_applied: Vec<Modifier>,
}

/// Scores one joint angle: base score of the containing band, plus the deltas of
/// every set modifier that applies to the joint's body part, clamped to
/// `[1, max_score]`.
pub fn joint_score_from_angle(
    joint: JointId,
    angle_deg: f64,
    flags: &ModifierFlags,
    config: &AngleBandConfig,
) -> Result<JointScore, RebaError> {
    let jb = config.joint(joint.part());
    let band = jb
        .band_index(angle_deg)
        .ok_or(RebaError::AngleOutsideConfiguredBands { joint, angle_deg })?;
    let mut score = i16::from(jb.bands[band].score);
    let mut adjustments_applied = Vec::new();
    for rule in config.modifiers.iter().filter(|r| r.part == joint.part()) {
        if flags.get(rule.flag) {
            score += i16::from(rule.delta);
            adjustments_applied.push(rule.flag);
        }
    }
    let score = score.clamp(1, i16::from(jb.max_score)) as u8;
    Ok(JointScore { joint, score, contributing_angle_deg: angle_deg, adjustments_applied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{BodySide, Side};
    use crate::reba::RebaConfig;

    fn cfg() -> AngleBandConfig {
        RebaConfig::standard().angle_bands
    }

    fn lower_arm() -> JointId {
        JointId::scored(BodyPart::LowerArm, BodySide::Right)
    }

    #[test]
    fn lower_arm_safe_band() {
        let c = cfg();
        let none = ModifierFlags::default();
        assert_eq!(joint_score_from_angle(lower_arm(), 80.0, &none, &c).unwrap().score, 1);
        assert_eq!(joint_score_from_angle(lower_arm(), 50.0, &none, &c).unwrap().score, 2);
        assert_eq!(joint_score_from_angle(lower_arm(), 100.0, &none, &c).unwrap().score, 1);
        assert_eq!(joint_score_from_angle(lower_arm(), 100.5, &none, &c).unwrap().score, 2);
    }

    #[test]
    fn upright_trunk_is_minimal() {
        let s = joint_score_from_angle(JointId::TRUNK, 0.0, &ModifierFlags::default(), &cfg()).unwrap();
        assert_eq!(s.score, 1);
        assert!(s.adjustments_applied.is_empty());
    }

    #[test]
    fn modifiers_are_recorded_and_clamped() {
        let c = cfg();
        let flags = ModifierFlags { twist: true, side_bend: true, ..Default::default() };
        // neck flexed 30 -> base 2, +1 +1 clamps to 3
        let s = joint_score_from_angle(JointId::NECK, 30.0, &flags, &c).unwrap();
        assert_eq!(s.score, 3);
        assert_eq!(s.adjustments_applied, [Modifier::Twist, Modifier::SideBend]);

        let ua = JointId::new(BodyPart::UpperArm, Side::Left).unwrap();
        let supported = ModifierFlags { arm_supported: true, ..Default::default() };
        assert_eq!(joint_score_from_angle(ua, 0.0, &supported, &c).unwrap().score, 1);
    }

    #[test]
    fn outside_bands_is_an_error() {
        let err = joint_score_from_angle(lower_arm(), 170.0, &ModifierFlags::default(), &cfg()).unwrap_err();
        assert!(matches!(err, RebaError::AngleOutsideConfiguredBands { .. }));
        let err = joint_score_from_angle(lower_arm(), f64::NAN, &ModifierFlags::default(), &cfg()).unwrap_err();
        assert!(matches!(err, RebaError::AngleOutsideConfiguredBands { .. }));
    }

    #[test]
    fn last_band_is_closed() {
        let c = cfg();
        let r = c.lower_arm.valid_range();
        assert!(c.lower_arm.band_index(r.max).is_some());
        assert!(c.lower_arm.band_index(r.max + 1e-9).is_none());
        assert!(c.lower_arm.band_index(r.min - 1e-9).is_none());
    }
}
