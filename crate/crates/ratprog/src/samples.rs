//! Sample sets as CSV: data parameters, then `bx,by,bz`, then metrics.
//!
//! Lines starting with `#` are comments. A comment of the form
//! `# provenance: synthetic seed=S noise_rel=R` (or `measured`) records
//! where the numbers came from.

use std::collections::BTreeMap;

use ratprog_core::datakit::{Provenance, Sample, SampleSet};
use ratprog_core::perfmodel::LaunchConfig;

use crate::error::{Error, Result};

fn parse_provenance(text: &str) -> Provenance {
    for line in text.lines().filter(|l| l.starts_with('#')) {
        let Some(rest) = line.trim_start_matches('#').trim().strip_prefix("provenance:") else {
            continue;
        };
        let mut seed = None;
        let mut noise = None;
        for word in rest.split_whitespace() {
            if let Some(v) = word.strip_prefix("seed=") {
                seed = v.parse().ok();
            } else if let Some(v) = word.strip_prefix("noise_rel=") {
                noise = v.parse().ok();
            }
        }
        if let (true, Some(seed), Some(noise_rel)) = (rest.trim_start().starts_with("synthetic"), seed, noise) {
            return Provenance::Synthetic { seed, noise_rel };
        }
    }
    Provenance::Measured
}

pub fn parse_samples(text: &str, origin: &str) -> Result<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(origin, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let bx = header
        .iter()
        .position(|h| h == "bx")
        .ok_or_else(|| Error::data(origin, "missing column `bx`"))?;
    if header.get(bx + 1).map(String::as_str) != Some("by") || header.get(bx + 2).map(String::as_str) != Some("bz") {
        return Err(Error::data(origin, "columns `bx,by,bz` must be adjacent and in that order"));
    }
    let params = header[..bx].to_vec();
    let metrics = header[bx + 3..].to_vec();

    let mut samples = Vec::new();
    let mut seen: BTreeMap<(Vec<i64>, LaunchConfig), u64> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::data(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |m: String| Error::data(format!("{origin}:{line}"), m);
        if record.len() != header.len() {
            return Err(at(format!("{} fields, expected {}", record.len(), header.len())));
        }
        let field = |k: usize| &record[k];
        let data_params = (0..bx)
            .map(|k| {
                field(k)
                    .parse::<i64>()
                    .map_err(|_| at(format!("column `{}`: `{}` is not an integer", header[k], field(k))))
            })
            .collect::<Result<Vec<_>>>()?;
        let dims = (bx..bx + 3)
            .map(|k| {
                field(k)
                    .parse::<u64>()
                    .map_err(|_| at(format!("column `{}`: `{}` is not a block size", header[k], field(k))))
            })
            .collect::<Result<Vec<_>>>()?;
        let config = LaunchConfig::new(dims[0], dims[1], dims[2])
            .ok_or_else(|| at(format!("invalid block ({}, {}, {})", dims[0], dims[1], dims[2])))?;
        let values = (bx + 3..header.len())
            .map(|k| match field(k).parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(at(format!("column `{}`: `{}` is not a finite number", header[k], field(k)))),
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = seen.insert((data_params.clone(), config), line) {
            return Err(at(format!("duplicate of the sample on line {first}")));
        }
        samples.push(Sample {
            data_params,
            config,
            values,
        });
    }
    SampleSet::new(params, metrics, samples, parse_provenance(text)).map_err(|e| Error::data(origin, e))
}

/// CSV text; metric values use the shortest representation that parses
/// back to the same binary64.
pub fn write_samples(set: &SampleSet) -> String {
    let mut out = match set.provenance {
        Provenance::Measured => String::from("# provenance: measured\n"),
        Provenance::Synthetic { seed, noise_rel } => {
            format!("# provenance: synthetic seed={seed} noise_rel={noise_rel:?}\n")
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = set
        .param_names()
        .iter()
        .map(String::as_str)
        .chain(["bx", "by", "bz"])
        .chain(set.metric_names().iter().map(String::as_str));
    w.write_record(header).expect("in-memory write");
    for s in set.samples() {
        let c = s.config;
        let fields = s
            .data_params
            .iter()
            .map(|d| d.to_string())
            .chain([c.bx, c.by, c.bz].map(|d| d.to_string()))
            .chain(s.values.iter().map(|v| format!("{v:?}")));
        w.write_record(fields).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory write")).expect("utf-8"));
    out
}
