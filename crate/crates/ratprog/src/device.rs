//! Device profiles as `field = value` text.

use std::collections::BTreeSet;
use std::fmt::Write;

use ratprog_core::perfmodel::DeviceProfile;

use crate::error::{Error, Result};

/// The bundled synthetic profile, equal to [`DeviceProfile::synthetic`].
pub const SYNTHETIC_DEVICE: &str = include_str!("../data/device_synthetic.txt");

/// Parses a profile. Every field must appear exactly once; unknown fields
/// are rejected.
pub fn parse_device(text: &str, origin: &str) -> Result<DeviceProfile> {
    let mut hw = DeviceProfile::synthetic();
    let mut seen = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |m: String| Error::data(format!("{origin}:{}", k + 1), m);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected `field = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let v: f64 = value
            .parse()
            .map_err(|_| at(format!("`{value}` is not a number")))?;
        hw.set(key, v).map_err(|e| at(e.to_string()))?;
        if !seen.insert(key.to_string()) {
            return Err(at(format!("field `{key}` given twice")));
        }
    }
    if let Some(missing) = DeviceProfile::field_names().find(|f| !seen.contains(*f)) {
        return Err(Error::data(origin, format!("missing field `{missing}`")));
    }
    hw.validate().map_err(|e| Error::data(origin, e))?;
    Ok(hw)
}

pub fn write_device(hw: &DeviceProfile) -> String {
    let mut out = String::new();
    for name in DeviceProfile::field_names() {
        let _ = writeln!(out, "{name} = {}", hw.get(name).unwrap_or(f64::NAN));
    }
    out
}
