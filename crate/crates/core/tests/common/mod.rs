#![allow(dead_code)]

use ergo_core::frame::{Coupling, Dataset, FrameRecord, ModifierFlags};
use ergo_core::joint::{BodyPart, BodySide, JointId};
use rand::Rng;

/// Band boundaries per body part as `(angle, lower band owns the boundary)`.
pub fn boundaries(part: BodyPart) -> &'static [(f64, bool)] {
    match part {
        BodyPart::Neck => &[(0.0, false), (20.0, true)],
        BodyPart::Trunk => &[(-20.0, false), (-5.0, false), (5.0, false), (20.0, true), (60.0, true)],
        BodyPart::Leg => &[(30.0, false), (60.0, true)],
        BodyPart::UpperArm => &[(-20.0, false), (20.0, true), (45.0, true), (90.0, true)],
        BodyPart::LowerArm => &[(60.0, false), (100.0, true)],
        BodyPart::Wrist => &[(-15.0, false), (15.0, true)],
    }
}

pub fn valid_range(part: BodyPart) -> (f64, f64) {
    match part {
        BodyPart::Neck => (-60.0, 90.0),
        BodyPart::Trunk => (-45.0, 120.0),
        BodyPart::Leg => (0.0, 150.0),
        BodyPart::UpperArm => (-90.0, 180.0),
        BodyPart::LowerArm => (0.0, 150.0),
        BodyPart::Wrist => (-80.0, 80.0),
    }
}

/// Uniform angle in the valid range, or (one time in five) a band boundary or range end.
pub fn random_angle<R: Rng>(rng: &mut R, part: BodyPart) -> f64 {
    let (lo, hi) = valid_range(part);
    if rng.random_bool(0.2) {
        let b = boundaries(part);
        let pick = rng.random_range(0..b.len() + 2);
        match pick {
            0 => lo,
            1 => hi,
            k => b[k - 2].0,
        }
    } else {
        // quantize to 0.1 degree like real exports
        (rng.random_range(lo..=hi) * 10.0).round() / 10.0
    }
}

pub fn random_flags<R: Rng>(rng: &mut R) -> ModifierFlags {
    ModifierFlags {
        twist: rng.random_bool(0.2),
        side_bend: rng.random_bool(0.2),
        abduction: rng.random_bool(0.2),
        shoulder_raised: rng.random_bool(0.2),
        arm_supported: rng.random_bool(0.2),
        unilateral_stance: rng.random_bool(0.2),
    }
}

pub fn random_frame<R: Rng>(rng: &mut R, i: u64, t: f64) -> FrameRecord {
    let mut f = FrameRecord::new(i, t);
    for j in JointId::ALL {
        f.angles.insert(j, random_angle(rng, j.part()));
        f.modifiers.insert(j, random_flags(rng));
        f.confidence.insert(j, rng.random_range(0.5..=1.0));
    }
    f.neck_twist_deg = rng.random_range(-30.0..=30.0);
    f.trunk_twist_deg = rng.random_range(-30.0..=30.0);
    f.load_kg = if rng.random_bool(0.1) { 5.0 } else { rng.random_range(0.0..=20.0) };
    f.shock_force = rng.random_bool(0.2);
    f.coupling = [Coupling::Good, Coupling::Fair, Coupling::Poor, Coupling::Unacceptable][rng.random_range(0..4)];
    if rng.random_bool(0.5) {
        f.image_ref = Some(format!("frames/{i:06}.jpg"));
    }
    f
}

pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, fps: f64) -> Dataset {
    let frames = (0..n).map(|i| random_frame(rng, i as u64, i as f64 / fps)).collect();
    Dataset::new("random", fps, frames)
}

/// A dataset whose joints alternate between held postures and oscillation,
/// so that the activity triggers actually fire.
pub fn structured_dataset<R: Rng>(rng: &mut R, n: usize, fps: f64) -> Dataset {
    let mut frames: Vec<FrameRecord> = (0..n).map(|i| random_frame(rng, i as u64, i as f64 / fps)).collect();
    for j in JointId::ALL {
        let (lo, hi) = valid_range(j.part());
        let mut i = 0;
        while i < n {
            let len = rng.random_range(1..=(90.0 * fps) as usize).min(n - i);
            let mode = rng.random_range(0..3);
            let centre = rng.random_range(lo..=hi);
            let amp = rng.random_range(5.0..=40.0);
            let period = rng.random_range(2.0..=20.0);
            for (k, f) in frames[i..i + len].iter_mut().enumerate() {
                let a = match mode {
                    0 => centre + rng.random_range(-4.0..=4.0),
                    1 => centre + amp * (std::f64::consts::TAU * k as f64 / (period * fps)).sin(),
                    _ => random_angle(rng, j.part()),
                };
                f.angles.insert(j, a.clamp(lo, hi));
            }
            i += len;
        }
    }
    Dataset::new("structured", fps, frames)
}

/// Every joint follows `centre + amp * sin(2 pi t / period)` plus uniform noise, clamped to its range.
pub fn sinusoid_dataset<R: Rng>(rng: &mut R, n: usize, fps: f64, period_s: f64, noise_deg: f64) -> Dataset {
    let mut frames: Vec<FrameRecord> = (0..n).map(|i| random_frame(rng, i as u64, i as f64 / fps)).collect();
    for j in JointId::ALL {
        let (lo, hi) = valid_range(j.part());
        let centre = (lo + hi) / 2.0;
        let amp = (hi - lo) * 0.35;
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        for f in frames.iter_mut() {
            let w = std::f64::consts::TAU * f.timestamp_s / period_s + phase;
            let a = centre + amp * w.sin() + rng.random_range(-noise_deg..=noise_deg);
            f.angles.insert(j, a.clamp(lo, hi));
        }
    }
    Dataset::new("sinusoid", fps, frames)
}

/// Straight-line REBA evaluation with its own transcription of the worksheet tables.
pub mod naive {
    use super::*;

    // Table A as printed: [neck][trunk][legs]
    const TABLE_A: [[[u8; 4]; 5]; 3] = [
        [[1, 2, 3, 4], [2, 3, 4, 5], [2, 4, 5, 6], [3, 5, 6, 7], [4, 6, 7, 8]],
        [[1, 2, 3, 4], [3, 4, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9]],
        [[3, 3, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9], [7, 8, 9, 9]],
    ];
    // Table B as printed: [lower_arm][upper_arm][wrist]
    const TABLE_B: [[[u8; 3]; 6]; 2] = [
        [[1, 2, 2], [1, 2, 3], [3, 4, 5], [4, 5, 5], [6, 7, 8], [7, 8, 8]],
        [[1, 2, 3], [2, 3, 4], [4, 5, 5], [5, 6, 7], [7, 8, 8], [8, 9, 9]],
    ];
    // Table C: [score_a][score_b]
    const TABLE_C: [[u8; 12]; 12] = [
        [1, 1, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7],
        [1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8],
        [2, 3, 3, 3, 4, 5, 6, 7, 7, 8, 8, 8],
        [3, 4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9],
        [4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9, 9],
        [6, 6, 6, 7, 8, 8, 9, 9, 10, 10, 10, 10],
        [7, 7, 7, 8, 9, 9, 9, 10, 10, 11, 11, 11],
        [8, 8, 8, 9, 10, 10, 10, 10, 10, 11, 11, 11],
        [9, 9, 9, 10, 10, 10, 11, 11, 11, 12, 12, 12],
        [10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12],
        [11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 12],
        [12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12],
    ];

    pub fn table_a(neck: u8, legs: u8, trunk: u8) -> u8 {
        TABLE_A[neck as usize - 1][trunk as usize - 1][legs as usize - 1]
    }

    pub fn table_b(lower_arm: u8, wrist: u8, upper_arm: u8) -> u8 {
        TABLE_B[lower_arm as usize - 1][upper_arm as usize - 1][wrist as usize - 1]
    }

    pub fn table_c(a: u8, b: u8) -> u8 {
        TABLE_C[a as usize - 1][b as usize - 1]
    }

    fn clamp(v: i32, hi: i32) -> u8 {
        v.clamp(1, hi) as u8
    }

    pub fn neck(a: f64, fl: &ModifierFlags, twist_deg: f64) -> u8 {
        let base = if (0.0..=20.0).contains(&a) { 1 } else { 2 };
        let twist = fl.twist || twist_deg.abs() > 10.0;
        clamp(base + twist as i32 + fl.side_bend as i32, 3)
    }

    pub fn trunk(a: f64, fl: &ModifierFlags, twist_deg: f64) -> u8 {
        let base = if (-5.0..5.0).contains(&a) {
            1
        } else if (-20.0..=20.0).contains(&a) {
            2
        } else if a < -20.0 || a <= 60.0 {
            3
        } else {
            4
        };
        let twist = fl.twist || twist_deg.abs() > 10.0;
        clamp(base + twist as i32 + fl.side_bend as i32, 5)
    }

    pub fn legs(knee: f64, fl: &ModifierFlags) -> u8 {
        let base = if knee < 30.0 {
            1
        } else if knee <= 60.0 {
            2
        } else {
            3
        };
        clamp(base + fl.unilateral_stance as i32, 4)
    }

    pub fn upper_arm(a: f64, fl: &ModifierFlags) -> u8 {
        let base = if (-20.0..=20.0).contains(&a) {
            1
        } else if a < -20.0 || a <= 45.0 {
            2
        } else if a <= 90.0 {
            3
        } else {
            4
        };
        clamp(base + fl.abduction as i32 + fl.shoulder_raised as i32 - fl.arm_supported as i32, 6)
    }

    pub fn lower_arm(a: f64) -> u8 {
        if (60.0..=100.0).contains(&a) { 1 } else { 2 }
    }

    pub fn wrist(a: f64, fl: &ModifierFlags) -> u8 {
        let base = if (-15.0..=15.0).contains(&a) { 1 } else { 2 };
        clamp(base + fl.twist as i32, 3)
    }

    pub fn load(kg: f64, shock: bool) -> u8 {
        let base = if kg < 5.0 {
            0
        } else if kg <= 10.0 {
            1
        } else {
            2
        };
        base + shock as u8
    }

    pub fn coupling(c: Coupling) -> u8 {
        match c {
            Coupling::Good => 0,
            Coupling::Fair => 1,
            Coupling::Poor => 2,
            Coupling::Unacceptable => 3,
        }
    }

    #[derive(Debug, PartialEq)]
    pub struct Naive {
        pub joints: [u8; 6],
        pub table_a: u8,
        pub score_a: u8,
        pub table_b: u8,
        pub score_b: u8,
        pub table_c: u8,
        pub grand: u8,
    }

    /// Joint scores are in `BodyPart::ALL` order.
    pub fn evaluate(f: &FrameRecord, side: BodySide, activity: u8) -> Naive {
        let j = |p| JointId::scored(p, side);
        let ang = |p| f.angles[&j(p)];
        let fl = |p| f.flags(j(p));
        let n = neck(ang(BodyPart::Neck), &fl(BodyPart::Neck), f.neck_twist_deg);
        let t = trunk(ang(BodyPart::Trunk), &fl(BodyPart::Trunk), f.trunk_twist_deg);
        let l = legs(ang(BodyPart::Leg), &fl(BodyPart::Leg));
        let ua = upper_arm(ang(BodyPart::UpperArm), &fl(BodyPart::UpperArm));
        let la = lower_arm(ang(BodyPart::LowerArm));
        let w = wrist(ang(BodyPart::Wrist), &fl(BodyPart::Wrist));
        let ta = table_a(n, l, t);
        let sa = ta + load(f.load_kg, f.shock_force);
        let tb = table_b(la, w, ua);
        let sb = tb + coupling(f.coupling);
        let tc = table_c(sa.min(12), sb.min(12));
        Naive { joints: [n, t, l, ua, la, w], table_a: ta, score_a: sa, table_b: tb, score_b: sb, table_c: tc, grand: tc + activity }
    }

    fn band_index(part: BodyPart, a: f64) -> usize {
        boundaries(part).iter().filter(|&&(b, lower_owns)| if lower_owns { a > b } else { a >= b }).count()
    }

    /// Brute-force activity score for every included frame, aligned with `d.frames`.
    pub fn activity(d: &Dataset, side: BodySide) -> Vec<u8> {
        let inc: Vec<usize> = (0..d.frames.len()).filter(|&p| !d.is_excluded(d.frames[p].frame_index)).collect();
        let mut out = vec![0u8; d.frames.len()];
        for (ii, &p) in inc.iter().enumerate() {
            let t = d.frames[p].timestamp_s;
            let (mut st, mut rep, mut rapid) = (false, false, false);
            for j in JointId::for_side(side) {
                let a = |q: usize| d.frames[inc[q]].angles[&j];
                let ts = |q: usize| d.frames[inc[q]].timestamp_s;
                // static hold
                let (mut lo, mut hi) = (a(ii), a(ii));
                let mut k = ii;
                while k > 0 {
                    let v = a(k - 1);
                    if hi.max(v) - lo.min(v) > 10.0 {
                        break;
                    }
                    lo = lo.min(v);
                    hi = hi.max(v);
                    k -= 1;
                }
                st |= t - ts(k) > 60.0;
                if ii > 0 {
                    rapid |= (a(ii) - a(ii - 1)).abs() > 30.0;
                }
                let nb = boundaries(j.part()).len();
                for b in 0..nb {
                    let mut count = 0;
                    for m in 1..=ii {
                        if ts(m) <= t - 60.0 {
                            continue;
                        }
                        let (x, y) = (band_index(j.part(), a(m - 1)), band_index(j.part(), a(m)));
                        if x.min(y) <= b && b < x.max(y) {
                            count += 1;
                        }
                    }
                    rep |= count > 4;
                }
            }
            out[p] = st as u8 + rep as u8 + rapid as u8;
        }
        out
    }
}

/// Random brush sets and a per-frame brute-force evaluation of them.
pub mod brushes {
    use super::*;
    use ergo_core::reba::{ScoredDataset, ScoredFrame, TableId};
    use ergo_core::selection::{Brush, BrushKind, BrushSet, Cell, Combine, FrameIdSet, Interval};

    const ATTRIBUTES: [(TableId, &str, usize, u8); 8] = [
        (TableId::A, "neck", 1, 3),
        (TableId::A, "legs", 2, 4),
        (TableId::A, "trunk", 1, 5),
        (TableId::B, "lower_arm", 1, 2),
        (TableId::B, "wrist", 2, 3),
        (TableId::B, "upper_arm", 1, 6),
        (TableId::C, "score_a", 1, 12),
        (TableId::C, "score_b", 1, 12),
    ];

    fn side<R: Rng>(rng: &mut R) -> BodySide {
        if rng.random_bool(0.5) { BodySide::Left } else { BodySide::Right }
    }

    fn intervals<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Vec<Interval> {
        (0..rng.random_range(0..=3))
            .map(|_| {
                if rng.random_bool(0.1) {
                    let x = (rng.random_range(lo..=hi) * 10.0).round() / 10.0;
                    Interval::new(x, x)
                } else {
                    let a = rng.random_range(lo..=hi);
                    let b = rng.random_range(lo..=hi);
                    Interval::new(a.min(b), a.max(b))
                }
            })
            .collect()
    }

    pub fn random_brush<R: Rng>(rng: &mut R, id: usize, duration_s: f64) -> Brush {
        let kind = match rng.random_range(0..4) {
            0 => {
                let (table, attribute, level, card) = ATTRIBUTES[rng.random_range(0..ATTRIBUTES.len())];
                let bins = (1..=card).filter(|_| rng.random_bool(0.4)).collect();
                BrushKind::ScoreBin { table, side: side(rng), level, attribute: attribute.into(), bins }
            }
            1 => {
                let table = TableId::ALL[rng.random_range(0..3)];
                let (rows, cols) = match table {
                    TableId::A => (5, 12),
                    TableId::B => (6, 6),
                    TableId::C => (12, 12),
                };
                let cells = (0..rng.random_range(1..=8))
                    .map(|_| Cell { row: rng.random_range(0..rows), col: rng.random_range(0..cols) })
                    .collect();
                BrushKind::HeatmapCell { table, side: side(rng), cells }
            }
            2 => {
                let joint = JointId::ALL[rng.random_range(0..JointId::ALL.len())];
                let (lo, hi) = valid_range(joint.part());
                BrushKind::AngleRange { joint, ranges: intervals(rng, lo, hi) }
            }
            _ => BrushKind::TimeRange { ranges: intervals(rng, 0.0, duration_s) },
        };
        Brush { id: format!("b{id}"), kind, active: rng.random_bool(0.85) }
    }

    pub fn random_set<R: Rng>(rng: &mut R, duration_s: f64) -> BrushSet {
        BrushSet {
            brushes: (0..rng.random_range(0..=4)).map(|i| random_brush(rng, i, duration_s)).collect(),
            combine: if rng.random_bool(0.5) { Combine::Intersection } else { Combine::Union },
        }
    }

    fn cell_of(table: TableId, f: &ScoredFrame, side: BodySide) -> Cell {
        let s = f.side(side);
        let j = |p| s.joint_scores[&JointId::scored(p, side)].score as usize;
        match table {
            TableId::A => Cell { row: j(BodyPart::Trunk) - 1, col: (j(BodyPart::Neck) - 1) * 4 + j(BodyPart::Leg) - 1 },
            TableId::B => Cell {
                row: j(BodyPart::UpperArm) - 1,
                col: (j(BodyPart::LowerArm) - 1) * 3 + j(BodyPart::Wrist) - 1,
            },
            TableId::C => Cell { row: s.score_b.min(12) as usize - 1, col: s.score_a.min(12) as usize - 1 },
        }
    }

    fn in_interval(r: &Interval, x: f64) -> bool {
        if r.lo == r.hi { (x - r.lo).abs() <= 0.05 } else { r.lo <= x && x <= r.hi }
    }

    fn hit(b: &Brush, f: &ScoredFrame, scored: &ScoredDataset) -> bool {
        let rec = &scored.dataset().frames[f.position];
        match &b.kind {
            BrushKind::ScoreBin { side, attribute, bins, .. } => {
                let s = f.side(*side);
                let value = match attribute.as_str() {
                    "score_a" => s.score_a.min(12),
                    "score_b" => s.score_b.min(12),
                    name => {
                        let part = match name {
                            "neck" => BodyPart::Neck,
                            "legs" => BodyPart::Leg,
                            "trunk" => BodyPart::Trunk,
                            "lower_arm" => BodyPart::LowerArm,
                            "wrist" => BodyPart::Wrist,
                            _ => BodyPart::UpperArm,
                        };
                        s.joint_scores[&JointId::scored(part, *side)].score
                    }
                };
                bins.contains(&value)
            }
            BrushKind::HeatmapCell { table, side, cells } => cells.contains(&cell_of(*table, f, *side)),
            BrushKind::AngleRange { joint, ranges } => ranges.iter().any(|r| in_interval(r, rec.angles[joint])),
            BrushKind::TimeRange { ranges } => ranges.iter().any(|r| in_interval(r, rec.timestamp_s)),
        }
    }

    /// Linear scan over every dataset frame.
    pub fn brute_force(set: &BrushSet, scored: &ScoredDataset) -> FrameIdSet {
        let active: Vec<&Brush> = set.brushes.iter().filter(|b| b.active).collect();
        scored
            .dataset()
            .frames
            .iter()
            .filter(|rec| !scored.dataset().is_excluded(rec.frame_index))
            .filter_map(|rec| scored.get(rec.frame_index))
            .filter(|f| {
                if active.is_empty() {
                    return true;
                }
                match set.combine {
                    Combine::Intersection => active.iter().all(|b| hit(b, f, scored)),
                    Combine::Union => active.iter().any(|b| hit(b, f, scored)),
                }
            })
            .map(|f| f.frame_index)
            .collect()
    }
}
