//! The frames CSV format.
//!
//! One row per frame, header mandatory, columns in the fixed order of
//! [`HEADER`]. Leg angles are stored as knee flexion. Neck and trunk twist
//! are stored as angles; every other modifier is a `0`/`1` flag column.
//! Floats are written with at most four decimals.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use ergo_core::frame::{validate_frame, AngleRange, Coupling, FrameRecord, Modifier};
use ergo_core::joint::{BodyPart, BodySide, JointId};

use crate::IngestError;

pub const ANGLE_COLUMNS: [(&str, JointId); 10] = [
    ("neck_center_deg", JointId::NECK),
    ("trunk_center_deg", JointId::TRUNK),
    ("upper_arm_left_deg", JointId::scored(BodyPart::UpperArm, BodySide::Left)),
    ("upper_arm_right_deg", JointId::scored(BodyPart::UpperArm, BodySide::Right)),
    ("lower_arm_left_deg", JointId::scored(BodyPart::LowerArm, BodySide::Left)),
    ("lower_arm_right_deg", JointId::scored(BodyPart::LowerArm, BodySide::Right)),
    ("wrist_left_deg", JointId::scored(BodyPart::Wrist, BodySide::Left)),
    ("wrist_right_deg", JointId::scored(BodyPart::Wrist, BodySide::Right)),
    ("knee_left_deg", JointId::scored(BodyPart::Leg, BodySide::Left)),
    ("knee_right_deg", JointId::scored(BodyPart::Leg, BodySide::Right)),
];

pub const FLAG_COLUMNS: [(&str, JointId, Modifier); 12] = [
    ("neck_center_side_bend", JointId::NECK, Modifier::SideBend),
    ("trunk_center_side_bend", JointId::TRUNK, Modifier::SideBend),
    ("upper_arm_left_abduction", JointId::scored(BodyPart::UpperArm, BodySide::Left), Modifier::Abduction),
    ("upper_arm_right_abduction", JointId::scored(BodyPart::UpperArm, BodySide::Right), Modifier::Abduction),
    ("upper_arm_left_shoulder_raised", JointId::scored(BodyPart::UpperArm, BodySide::Left), Modifier::ShoulderRaised),
    ("upper_arm_right_shoulder_raised", JointId::scored(BodyPart::UpperArm, BodySide::Right), Modifier::ShoulderRaised),
    ("upper_arm_left_arm_supported", JointId::scored(BodyPart::UpperArm, BodySide::Left), Modifier::ArmSupported),
    ("upper_arm_right_arm_supported", JointId::scored(BodyPart::UpperArm, BodySide::Right), Modifier::ArmSupported),
    ("wrist_left_twist", JointId::scored(BodyPart::Wrist, BodySide::Left), Modifier::Twist),
    ("wrist_right_twist", JointId::scored(BodyPart::Wrist, BodySide::Right), Modifier::Twist),
    ("leg_left_unilateral_stance", JointId::scored(BodyPart::Leg, BodySide::Left), Modifier::UnilateralStance),
    ("leg_right_unilateral_stance", JointId::scored(BodyPart::Leg, BodySide::Right), Modifier::UnilateralStance),
];

/// Column names in file order.
pub fn header() -> Vec<&'static str> {
    let mut h = vec!["frame_index", "timestamp_s"];
    h.extend(ANGLE_COLUMNS.iter().map(|c| c.0));
    h.extend(["trunk_twist_deg", "neck_twist_deg"]);
    h.extend(FLAG_COLUMNS.iter().map(|c| c.0));
    h.extend(["load_kg", "shock", "coupling", "confidence_mean", "image_ref"]);
    h
}

const TRUNK_TWIST: usize = 2 + ANGLE_COLUMNS.len();
const NECK_TWIST: usize = TRUNK_TWIST + 1;
const FIRST_FLAG: usize = NECK_TWIST + 1;
const LOAD: usize = FIRST_FLAG + FLAG_COLUMNS.len();
const SHOCK: usize = LOAD + 1;
const COUPLING: usize = LOAD + 2;
const CONFIDENCE: usize = LOAD + 3;
const IMAGE: usize = LOAD + 4;

#[derive(Debug, Clone)]
pub struct ReadOptions {
    /// Used to derive timestamps for rows that leave `timestamp_s` empty.
    pub fps: f64,
    /// Skip bad rows (recording diagnostics) instead of failing.
    pub lenient: bool,
    pub ranges: BTreeMap<JointId, AngleRange>,
}

#[derive(Debug, Default)]
pub struct FramesRead {
    pub frames: Vec<FrameRecord>,
    /// Rows skipped in lenient mode.
    pub diagnostics: Vec<IngestError>,
}

/// Parses a frames file. Row numbers in errors count data rows from 1.
pub fn read_frames<R: Read>(input: R, opts: &ReadOptions) -> Result<FramesRead, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let expected = header();
    let got = reader.headers().map_err(|e| csv_error(e, 0))?.clone();
    for (i, name) in expected.iter().enumerate() {
        if got.get(i).map(str::trim) != Some(*name) {
            return Err(mismatch(name, 0, format!("expected header {name:?}, found {:?}", got.get(i).unwrap_or(""))));
        }
    }
    if got.len() != expected.len() {
        return Err(mismatch("image_ref", 0, format!("expected {} columns, found {}", expected.len(), got.len())));
    }

    let mut out = FramesRead::default();
    let mut last: Option<(u64, f64)> = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let parsed = record
            .map_err(|e| csv_error(e, row))
            .and_then(|r| parse_row(&r, row, opts))
            .and_then(|f| {
                if let Some((idx, t)) = last {
                    if f.frame_index <= idx {
                        return Err(mismatch("frame_index", row, format!("{} does not follow {idx}", f.frame_index)));
                    }
                    if f.timestamp_s <= t {
                        return Err(IngestError::NonMonotoneTimestamp { row });
                    }
                }
                Ok(f)
            });
        match parsed {
            Ok(f) => {
                last = Some((f.frame_index, f.timestamp_s));
                out.frames.push(f);
            }
            Err(e) if opts.lenient => out.diagnostics.push(e),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn mismatch(column: &str, row: usize, detail: String) -> IngestError {
    IngestError::SchemaMismatch { column: column.to_string(), row, detail }
}

fn csv_error(e: csv::Error, row: usize) -> IngestError {
    mismatch("*", row, e.to_string())
}

fn parse_row(r: &csv::StringRecord, row: usize, opts: &ReadOptions) -> Result<FrameRecord, IngestError> {
    let names = header();
    if r.len() != names.len() {
        return Err(mismatch("*", row, format!("expected {} fields, found {}", names.len(), r.len())));
    }
    let field = |i: usize| r.get(i).unwrap_or("").trim();
    let number = |i: usize| -> Result<f64, IngestError> {
        field(i).parse::<f64>().map_err(|_| mismatch(names[i], row, format!("not a number: {:?}", field(i))))
    };
    let number_or = |i: usize, default: f64| if field(i).is_empty() { Ok(default) } else { number(i) };
    let flag = |i: usize| match field(i) {
        "" | "0" => Ok(false),
        "1" => Ok(true),
        other => Err(mismatch(names[i], row, format!("expected 0 or 1, found {other:?}"))),
    };

    let frame_index: u64 =
        field(0).parse().map_err(|_| mismatch("frame_index", row, format!("not an index: {:?}", field(0))))?;
    let timestamp_s = if field(1).is_empty() { frame_index as f64 / opts.fps } else { number(1)? };
    let mut f = FrameRecord::new(frame_index, timestamp_s);
    for (k, &(_, joint)) in ANGLE_COLUMNS.iter().enumerate() {
        f.angles.insert(joint, number(2 + k)?);
    }
    f.trunk_twist_deg = number_or(TRUNK_TWIST, 0.0)?;
    f.neck_twist_deg = number_or(NECK_TWIST, 0.0)?;
    for (k, &(_, joint, m)) in FLAG_COLUMNS.iter().enumerate() {
        if flag(FIRST_FLAG + k)? {
            f.modifiers.entry(joint).or_default().set(m, true);
        }
    }
    f.load_kg = number_or(LOAD, 0.0)?;
    if !(f.load_kg >= 0.0 && f.load_kg.is_finite()) {
        return Err(mismatch("load_kg", row, format!("load must be a non-negative number, found {}", f.load_kg)));
    }
    f.shock_force = flag(SHOCK)?;
    f.coupling = match field(COUPLING) {
        "" => Coupling::Good,
        s => s.parse().map_err(|_| mismatch("coupling", row, format!("unknown coupling {s:?}")))?,
    };
    let confidence = number_or(CONFIDENCE, 1.0)?;
    if !(0.0..=1.0).contains(&confidence) {
        return Err(mismatch("confidence_mean", row, format!("{confidence} outside [0, 1]")));
    }
    for joint in JointId::ALL {
        f.confidence.insert(joint, confidence);
    }
    f.image_ref = Some(field(IMAGE)).filter(|s| !s.is_empty()).map(str::to_string);

    let violations = validate_frame(&f, &opts.ranges);
    if let Some(v) = violations.first() {
        let column = column_of(v.joint);
        let detail = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(mismatch(column, row, detail));
    }
    Ok(f)
}

fn column_of(joint: JointId) -> &'static str {
    ANGLE_COLUMNS.iter().find(|c| c.1 == joint).map_or("*", |c| c.0)
}

/// Rounds to four decimals and prints the shortest form.
pub fn fmt_float(x: f64) -> String {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

pub fn write_frames<W: Write>(output: W, frames: &[FrameRecord]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(header())?;
    let bit = |b: bool| if b { "1" } else { "0" }.to_string();
    for f in frames {
        let mut rec = vec![f.frame_index.to_string(), fmt_float(f.timestamp_s)];
        rec.extend(ANGLE_COLUMNS.iter().map(|&(_, j)| f.angle(j).map(fmt_float).unwrap_or_default()));
        rec.push(fmt_float(f.trunk_twist_deg));
        rec.push(fmt_float(f.neck_twist_deg));
        rec.extend(FLAG_COLUMNS.iter().map(|&(_, j, m)| bit(f.flags(j).get(m))));
        rec.push(fmt_float(f.load_kg));
        rec.push(bit(f.shock_force));
        rec.push(f.coupling.as_str().into());
        rec.push(fmt_float(f.mean_confidence()));
        rec.push(f.image_ref.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
