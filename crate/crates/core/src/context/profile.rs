//! Synthetic recreational dive profiles.

use std::{
    f64::consts::PI,
    io::{Read, Write},
};

use rand::RngExt;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{ContextError, SensorFrame};
use crate::seed;

/// Shape of the simulated dive. `max_depth = None` draws a depth from the
/// seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileShape {
    pub max_depth: Option<f64>,
    /// m/min.
    pub descent_rate: f64,
    /// m/min.
    pub ascent_rate: f64,
    pub stop_depth: f64,
    /// Seconds.
    pub stop_duration: f64,
    /// Seconds between frames.
    pub interval: f64,
}

impl Default for ProfileShape {
    fn default() -> Self {
        Self {
            max_depth: None,
            descent_rate: 15.0,
            ascent_rate: 8.0,
            stop_depth: 5.0,
            stop_duration: 180.0,
            interval: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivePhase {
    Descent,
    Plateau,
    Ascent,
    SafetyStop,
    Surface,
}

/// Phase boundaries in seconds from the start of the dive.
struct Timeline {
    depth: f64,
    descent_end: f64,
    plateau_end: f64,
    first_ascent_end: f64,
    stop_end: f64,
    surface_at: f64,
    stop_depth: f64,
    descent_rate: f64,
    ascent_rate: f64,
    wobble_amp: f64,
    wobble_cycles: f64,
}

impl Timeline {
    fn new(shape: &ProfileShape, depth: f64, duration: f64) -> Self {
        let descent_end = depth / shape.descent_rate * 60.0;
        let (stop_depth, stop_duration) =
            if depth > shape.stop_depth { (shape.stop_depth, shape.stop_duration) } else { (depth, 0.0) };
        let first_ascent = (depth - stop_depth) / shape.ascent_rate * 60.0;
        let final_ascent = stop_depth / shape.ascent_rate * 60.0;
        let plateau = (duration - descent_end - first_ascent - stop_duration - final_ascent).max(0.0);
        let plateau_end = descent_end + plateau;
        let first_ascent_end = plateau_end + first_ascent;
        let stop_end = first_ascent_end + stop_duration;
        Self {
            depth,
            descent_end,
            plateau_end,
            first_ascent_end,
            stop_end,
            surface_at: stop_end + final_ascent,
            stop_depth,
            descent_rate: shape.descent_rate,
            ascent_rate: shape.ascent_rate,
            wobble_amp: (0.05 * depth).min(1.0),
            wobble_cycles: (plateau / 120.0).round().max(1.0),
        }
    }

    fn phase(&self, t: f64) -> DivePhase {
        if t < self.descent_end {
            DivePhase::Descent
        } else if t < self.plateau_end {
            DivePhase::Plateau
        } else if t < self.first_ascent_end || (t >= self.stop_end && t < self.surface_at) {
            DivePhase::Ascent
        } else if t < self.stop_end {
            DivePhase::SafetyStop
        } else {
            DivePhase::Surface
        }
    }

    /// Depth in metres and ascent rate in m/min (positive when rising).
    fn state(&self, t: f64) -> (f64, f64) {
        let plateau_len = self.plateau_end - self.descent_end;
        match self.phase(t) {
            DivePhase::Descent => (self.descent_rate * t / 60.0, -self.descent_rate),
            DivePhase::Plateau => {
                // Gentle undulation that vanishes at both ends of the plateau.
                let w = PI * self.wobble_cycles / plateau_len;
                let x = t - self.descent_end;
                let d = self.depth - self.wobble_amp * (w * x).sin().abs();
                let slope = self.wobble_amp * w * (w * x).cos() * (w * x).sin().signum();
                (d, slope * 60.0)
            }
            DivePhase::Ascent if t < self.first_ascent_end => {
                (self.depth - self.ascent_rate * (t - self.plateau_end) / 60.0, self.ascent_rate)
            }
            DivePhase::Ascent => {
                ((self.stop_depth - self.ascent_rate * (t - self.stop_end) / 60.0).max(0.0), self.ascent_rate)
            }
            DivePhase::SafetyStop => (self.stop_depth, 0.0),
            DivePhase::Surface => (0.0, 0.0),
        }
    }
}

/// Approximate no-decompression limit in minutes for a given depth.
fn ndl_limit(depth: f64) -> f64 {
    if depth < 10.0 {
        99.0
    } else {
        (20_000.0 / (depth * depth)).min(99.0)
    }
}

impl ProfileShape {
    /// Samples a dive of `duration` seconds: descent, plateau, ascent, a
    /// safety stop, and the final ascent. When `duration` is too short for
    /// the whole profile, the series is cut off where it stands.
    pub fn simulate(&self, duration: f64, seed: u64) -> Result<Vec<SensorFrame>, ContextError> {
        if !(duration > 0.0 && duration.is_finite()) || !(self.interval > 0.0) {
            return Err(ContextError::InvalidDuration);
        }
        let mut rng = seed::derived_rng(seed, seed::stream::PROFILE, 0);
        let depth = self.max_depth.unwrap_or_else(|| rng.random_range(12.0..28.0));
        let surface_temp: f64 = rng.random_range(20.0..26.0);
        let sac: f64 = rng.random_range(15.0..25.0);
        let mut heading: f64 = rng.random_range(0.0..360.0);
        let mut battery: f64 = rng.random_range(60.0..100.0);
        let mut pressure = 3000.0;
        let jitter = Normal::new(0.0, 1.0).expect("unit normal");
        let tl = Timeline::new(self, depth, duration);

        let steps = (duration / self.interval).ceil() as usize;
        let mut frames = Vec::with_capacity(steps + 1);
        let mut loading = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let t = (i as f64 * self.interval).min(duration);
            let (d, rate) = tl.state(t);
            if let Some((pt, pd)) = prev {
                let dt_min = (t - pt) / 60.0;
                let gas = sac * (1.0 + (pd + d) / 20.0) * dt_min;
                pressure = (pressure - gas).max(0.0);
                if d >= 10.0 {
                    loading += dt_min * d / 10.0;
                }
                battery = (battery - 0.05 * dt_min).max(0.0);
                heading = (heading + 3.0 * jitter.sample(&mut rng)).rem_euclid(360.0);
                if heading >= 360.0 {
                    heading = 0.0;
                }
            }
            let exertion = if rate.abs() > 1.0 { 12.0 } else { 5.0 };
            frames.push(SensorFrame {
                depth: d,
                water_temp: surface_temp - 0.45 * d,
                tank_pressure: pressure,
                heart_rate: (72.0 + exertion + 2.0 * jitter.sample(&mut rng)).max(40.0),
                heading,
                ndl: (ndl_limit(d) - loading).clamp(0.0, 99.0),
                dive_time: t,
                ascent_rate: rate,
                battery,
            });
            prev = Some((t, d));
        }
        Ok(frames)
    }
}

/// Default-shaped dive of `duration` seconds.
pub fn simulate_dive_profile(duration: f64, seed: u64) -> Result<Vec<SensorFrame>, ContextError> {
    ProfileShape::default().simulate(duration, seed)
}

pub fn write_profile_csv<W: Write>(w: W, frames: &[SensorFrame]) -> crate::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for f in frames {
        wr.serialize(f)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(r: R) -> crate::Result<Vec<SensorFrame>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn short_dive_is_all_descent() {
        let shape = ProfileShape { max_depth: Some(20.0), ..Default::default() };
        let frames = shape.simulate(30.0, 1).unwrap();
        assert_eq!(frames.len(), 31);
        assert!(frames.iter().all(|f| f.ascent_rate == -15.0));
        assert!(frames.windows(2).all(|w| w[1].depth > w[0].depth));
    }

    #[test]
    fn full_dive_surfaces_after_stop() {
        let frames = simulate_dive_profile(2400.0, 5).unwrap();
        let last = frames.last().unwrap();
        assert_eq!(last.depth, 0.0);
        assert_eq!(last.dive_time, 2400.0);
        let at_stop = frames.iter().filter(|f| f.depth == 5.0 && f.ascent_rate == 0.0).count();
        assert!((180..=182).contains(&at_stop), "{at_stop}");
    }

    #[test]
    fn deterministic() {
        assert_eq!(simulate_dive_profile(900.0, 3).unwrap(), simulate_dive_profile(900.0, 3).unwrap());
        assert_ne!(simulate_dive_profile(900.0, 3).unwrap(), simulate_dive_profile(900.0, 4).unwrap());
    }

    #[test]
    fn rejects_bad_duration() {
        assert_eq!(simulate_dive_profile(0.0, 1), Err(ContextError::InvalidDuration));
        assert_eq!(simulate_dive_profile(f64::NAN, 1), Err(ContextError::InvalidDuration));
    }

    #[test]
    fn csv_round_trip() {
        let frames = simulate_dive_profile(120.0, 2).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &frames).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "depth,water_temp,tank_pressure,heart_rate,heading,ndl,dive_time,ascent_rate,battery\n"
        ));
        assert_eq!(read_profile_csv(&buf[..]).unwrap(), frames);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn profile_is_plausible(duration in 1.0f64..4000.0, seed in any::<u64>()) {
            let frames = simulate_dive_profile(duration, seed).unwrap();
            for w in frames.windows(2) {
                prop_assert!(w[1].tank_pressure <= w[0].tank_pressure);
                let dt = (w[1].dive_time - w[0].dive_time) / 60.0;
                if dt > 0.0 {
                    prop_assert!(((w[1].depth - w[0].depth) / dt).abs() <= 18.0 + 1e-9);
                }
            }
            for f in &frames {
                prop_assert!(f.depth >= 0.0);
                prop_assert!(f.ascent_rate.abs() <= 18.0);
                prop_assert!(f.validate().is_ok());
            }
        }
    }
}
