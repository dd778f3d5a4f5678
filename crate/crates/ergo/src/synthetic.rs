//! Seeded synthetic recordings: a sinusoid per joint plus uniform noise,
//! clamped to the valid motion ranges, with optional injected spikes.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use ergo_core::frame::{AngleRange, Coupling, Dataset, FrameRecord, Modifier};
use ergo_core::joint::{BodyPart, JointId};
use ergo_core::reba::RebaConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frames::write_frames;
use crate::manifest::Manifest;

pub const FRAMES_CSV: &str = "frames.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Per-joint overrides of the spec-wide wave parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointWave {
    pub baseline_deg: Option<f64>,
    pub amplitude_deg: Option<f64>,
    pub period_s: Option<f64>,
    pub noise_deg: Option<f64>,
    #[serde(default)]
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spike {
    pub joint: JointId,
    pub t_s: f64,
    pub angle_deg: f64,
}

fn default_id() -> String {
    "synthetic".into()
}

fn default_period() -> f64 {
    10.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default = "default_id")]
    pub id: String,
    pub duration_s: f64,
    pub fps: f64,
    #[serde(default = "default_period")]
    pub period_s: f64,
    #[serde(default)]
    pub amplitude_deg: f64,
    #[serde(default)]
    pub noise_deg: f64,
    /// Baseline for joints without their own; a neutral posture when absent.
    #[serde(default)]
    pub baseline_deg: Option<f64>,
    #[serde(default)]
    pub joints: BTreeMap<JointId, JointWave>,
    #[serde(default)]
    pub injected_spikes: Vec<Spike>,
    #[serde(default)]
    pub modifiers: BTreeMap<JointId, Vec<Modifier>>,
    #[serde(default)]
    pub neck_twist_deg: f64,
    #[serde(default)]
    pub trunk_twist_deg: f64,
    #[serde(default)]
    pub load_kg: f64,
    #[serde(default)]
    pub shock: bool,
    #[serde(default)]
    pub coupling: Coupling,
    /// Attach an image reference to every frame.
    #[serde(default = "yes")]
    pub images: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::InvalidSpec(msg.into())
}

/// A posture scoring 1 on every joint.
pub fn neutral_angle(part: BodyPart) -> f64 {
    match part {
        BodyPart::Neck => 10.0,
        BodyPart::Trunk => 0.0,
        BodyPart::Leg => 10.0,
        BodyPart::UpperArm => 0.0,
        BodyPart::LowerArm => 80.0,
        BodyPart::Wrist => 0.0,
    }
}

impl SyntheticSpec {
    pub fn frame_count(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive and finite, got {x}")))
            }
        };
        let non_negative = |name: &str, x: f64| {
            if x >= 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be non-negative and finite, got {x}")))
            }
        };
        positive("duration_s", self.duration_s)?;
        positive("fps", self.fps)?;
        positive("period_s", self.period_s)?;
        non_negative("amplitude_deg", self.amplitude_deg)?;
        non_negative("noise_deg", self.noise_deg)?;
        non_negative("load_kg", self.load_kg)?;
        if self.id.is_empty() {
            return Err(invalid("id must not be empty"));
        }
        for x in [self.neck_twist_deg, self.trunk_twist_deg].into_iter().chain(self.baseline_deg) {
            if !x.is_finite() {
                return Err(invalid(format!("non-finite angle {x}")));
            }
        }
        for (j, w) in &self.joints {
            if let Some(p) = w.period_s {
                positive(&format!("joints.{j}.period_s"), p)?;
            }
            if let Some(a) = w.amplitude_deg {
                non_negative(&format!("joints.{j}.amplitude_deg"), a)?;
            }
            if let Some(n) = w.noise_deg {
                non_negative(&format!("joints.{j}.noise_deg"), n)?;
            }
            if !w.baseline_deg.unwrap_or(0.0).is_finite() || !w.phase_deg.is_finite() {
                return Err(invalid(format!("joints.{j}: non-finite baseline or phase")));
            }
        }
        for s in &self.injected_spikes {
            if !(0.0..self.duration_s).contains(&s.t_s) || !s.angle_deg.is_finite() {
                return Err(invalid(format!("spike at {} s on {} is outside the recording", s.t_s, s.joint)));
            }
        }
        Ok(())
    }
}

/// Generates the recording described by `spec`. The same seed gives the same frames.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> Result<Dataset, SpecError> {
    spec.validate()?;
    let ranges: BTreeMap<JointId, AngleRange> = RebaConfig::standard().angle_bands.valid_ranges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.frame_count();

    let waves: Vec<(JointId, f64, f64, f64, f64, f64)> = JointId::ALL
        .iter()
        .map(|&j| {
            let w = spec.joints.get(&j).cloned().unwrap_or_default();
            (
                j,
                w.baseline_deg.or(spec.baseline_deg).unwrap_or(neutral_angle(j.part())),
                w.amplitude_deg.unwrap_or(spec.amplitude_deg),
                w.period_s.unwrap_or(spec.period_s),
                w.noise_deg.unwrap_or(spec.noise_deg),
                w.phase_deg.to_radians(),
            )
        })
        .collect();

    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / spec.fps;
        let mut f = FrameRecord::new(i as u64, t);
        for &(j, baseline, amplitude, period, noise, phase) in &waves {
            let mut a = baseline + amplitude * (TAU * t / period + phase).sin();
            if noise > 0.0 {
                a += rng.random_range(-noise..=noise);
            }
            f.angles.insert(j, ranges[&j].clamp(a));
            f.confidence.insert(j, 1.0);
        }
        for (&j, mods) in &spec.modifiers {
            let flags = f.modifiers.entry(j).or_default();
            for &m in mods {
                flags.set(m, true);
            }
        }
        f.neck_twist_deg = spec.neck_twist_deg;
        f.trunk_twist_deg = spec.trunk_twist_deg;
        f.load_kg = spec.load_kg;
        f.shock_force = spec.shock;
        f.coupling = spec.coupling;
        if spec.images {
            f.image_ref = Some(format!("frames/{i:06}.png"));
        }
        frames.push(f);
    }
    for s in &spec.injected_spikes {
        let i = ((s.t_s * spec.fps).round() as usize).min(n.saturating_sub(1));
        if let Some(f) = frames.get_mut(i) {
            f.angles.insert(s.joint, ranges[&s.joint].clamp(s.angle_deg));
        }
    }

    let mut d = Dataset::new(spec.id.clone(), spec.fps, frames);
    d.meta.insert("generator".into(), "synthetic".into());
    d.meta.insert("seed".into(), seed.to_string());
    Ok(d)
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Writes `frames.csv` and `manifest.json` into `dir` and returns the manifest path.
pub fn write_synthetic(spec: &SyntheticSpec, seed: u64, dir: &Path) -> Result<PathBuf, GenerateError> {
    let d = generate(spec, seed)?;
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| GenerateError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(FRAMES_CSV);
    let file = std::fs::File::create(&csv_path).map_err(io(&csv_path))?;
    write_frames(std::io::BufWriter::new(file), &d.frames)
        .map_err(|e| GenerateError::Io { path: csv_path.display().to_string(), source: e.into() })?;
    let manifest = Manifest {
        id: d.id,
        frames_csv: FRAMES_CSV.into(),
        images_dir: Some("images".into()),
        fps: d.fps,
        meta: d.meta,
    };
    let path = dir.join(MANIFEST_JSON);
    manifest.write(&path).map_err(|e| GenerateError::Io { path: path.display().to_string(), source: std::io::Error::other(e) })?;
    Ok(path)
}

/// A wall-painting task: reaching up with a roller, then bending down to
/// dip it into a container on the floor, in a steady work cycle.
pub fn painting_spec(duration_s: f64, fps: f64) -> SyntheticSpec {
    use ergo_core::joint::BodySide::{Left, Right};
    let wave = |baseline: f64, amplitude: f64, phase: f64| JointWave {
        baseline_deg: Some(baseline),
        amplitude_deg: Some(amplitude),
        period_s: None,
        noise_deg: None,
        phase_deg: phase,
    };
    let mut joints = BTreeMap::new();
    // phase 90 puts the dipping posture at the top of each trunk cycle
    joints.insert(JointId::TRUNK, wave(40.0, 35.0, 90.0));
    joints.insert(JointId::NECK, wave(15.0, 20.0, 90.0));
    for side in [Left, Right] {
        joints.insert(JointId::scored(BodyPart::Leg, side), wave(35.0, 30.0, 90.0));
        joints.insert(JointId::scored(BodyPart::UpperArm, side), wave(70.0, 45.0, 270.0));
        joints.insert(JointId::scored(BodyPart::LowerArm, side), wave(85.0, 40.0, 0.0));
        joints.insert(JointId::scored(BodyPart::Wrist, side), wave(5.0, 25.0, 180.0));
    }
    let mut modifiers = BTreeMap::new();
    modifiers.insert(JointId::scored(BodyPart::UpperArm, Right), vec![Modifier::ShoulderRaised]);
    SyntheticSpec {
        id: "painting".into(),
        duration_s,
        fps,
        period_s: 8.0,
        amplitude_deg: 0.0,
        noise_deg: 2.0,
        baseline_deg: None,
        joints,
        injected_spikes: Vec::new(),
        modifiers,
        neck_twist_deg: 0.0,
        trunk_twist_deg: 0.0,
        load_kg: 2.0,
        shock: false,
        coupling: Coupling::Fair,
        images: true,
    }
}
