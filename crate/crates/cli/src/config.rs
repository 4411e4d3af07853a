//! Strict parser for the flow configuration format: `key = value` lines
//! under the section headers [model] [grid] [perturbation] [run] [weights],
//! with `#` comments. Unknown sections and keys are fatal.

use rank1flow::flow::{default_weights, FlowConfig, Perturbation, ProfileShape, TargetBlock};
use rank1flow::geometry::RadialGrid;
use rank1flow::models::{build_model, Family};
use rank1flow::Error;

#[derive(Default)]
struct RawConfig {
    family: Option<(usize, String)>,
    m: Option<(usize, String)>,
    rmin: Option<(usize, String)>,
    rmax: Option<(usize, String)>,
    dr: Option<(usize, String)>,
    shape: Option<(usize, String)>,
    amplitude: Option<(usize, String)>,
    center: Option<(usize, String)>,
    width: Option<(usize, String)>,
    block: Option<(usize, String)>,
    t_end: Option<(usize, String)>,
    cfl: Option<(usize, String)>,
    monitor_stride: Option<(usize, String)>,
    tau: Option<(usize, String)>,
    delta: Option<(usize, String)>,
}

pub fn parse_flow_config(text: &str) -> Result<FlowConfig, Error> {
    let mut raw = RawConfig::default();
    let mut section: Option<String> = None;

    for (idx, line_raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match line_raw.find('#') {
            Some(pos) => &line_raw[..pos],
            None => line_raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::ConfigParse {
                line: line_no,
                message: format!("malformed section header `{line}`"),
            })?;
            match name {
                "model" | "grid" | "perturbation" | "run" | "weights" => {
                    section = Some(name.to_string());
                }
                other => {
                    return Err(Error::ConfigParse {
                        line: line_no,
                        message: format!("unknown section [{other}]"),
                    })
                }
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::ConfigParse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        let section = section.as_deref().ok_or(Error::ConfigParse {
            line: line_no,
            message: format!("key `{key}` before any section header"),
        })?;
        let slot = match (section, key) {
            ("model", "family") => &mut raw.family,
            ("model", "m") => &mut raw.m,
            ("grid", "rmin") => &mut raw.rmin,
            ("grid", "rmax") => &mut raw.rmax,
            ("grid", "dr") => &mut raw.dr,
            ("perturbation", "shape") => &mut raw.shape,
            ("perturbation", "amplitude") => &mut raw.amplitude,
            ("perturbation", "center") => &mut raw.center,
            ("perturbation", "width") => &mut raw.width,
            ("perturbation", "block") => &mut raw.block,
            ("run", "t_end") => &mut raw.t_end,
            ("run", "cfl") => &mut raw.cfl,
            ("run", "monitor_stride") => &mut raw.monitor_stride,
            ("weights", "tau") => &mut raw.tau,
            ("weights", "delta") => &mut raw.delta,
            (section, key) => {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("unknown key {section}.{key}"),
                })
            }
        };
        if slot.is_some() {
            return Err(Error::ConfigParse {
                line: line_no,
                message: format!("duplicate key {section}.{key}"),
            });
        }
        *slot = Some((line_no, value));
    }

    let family_entry = raw.family.ok_or(Error::ConfigValidation {
        key: "model.family".into(),
        message: "missing".into(),
    })?;
    let family = Family::parse(&family_entry.1).map_err(|e| Error::ConfigValidation {
        key: "model.family".into(),
        message: e.to_string(),
    })?;
    let m_entry =
        raw.m.ok_or(Error::ConfigValidation { key: "model.m".into(), message: "missing".into() })?;
    let m: u32 = parse_num(&m_entry, "model.m")?;
    let spec = build_model(family, m).map_err(|e| Error::ConfigValidation {
        key: "model.m".into(),
        message: e.to_string(),
    })?;

    let rmin = opt_num(&raw.rmin, "grid.rmin")?.unwrap_or(-4.0);
    let rmax = opt_num(&raw.rmax, "grid.rmax")?.unwrap_or(4.0);
    let dr = opt_num(&raw.dr, "grid.dr")?.unwrap_or(1.0 / 32.0);
    if !(dr > 0.0) {
        return Err(Error::ConfigValidation {
            key: "grid.dr".into(),
            message: format!("step must be positive, got {dr}"),
        });
    }
    if !(rmin < rmax) {
        return Err(Error::ConfigValidation {
            key: "grid.rmin".into(),
            message: format!("needs rmin < rmax, got [{rmin}, {rmax}]"),
        });
    }
    let grid = RadialGrid::new(rmin, rmax, dr).map_err(|e| Error::ConfigValidation {
        key: "grid.dr".into(),
        message: e.to_string(),
    })?;

    let shape = match raw.shape.as_ref() {
        None => ProfileShape::CompactBump,
        Some((line, s)) => match s.as_str() {
            "gaussian-bump" => ProfileShape::GaussianBump,
            "compact-bump" => ProfileShape::CompactBump,
            other => {
                return Err(Error::ConfigParse {
                    line: *line,
                    message: format!(
                        "perturbation.shape must be gaussian-bump or compact-bump, got `{other}`"
                    ),
                })
            }
        },
    };
    let block = match raw.block.as_ref() {
        None => TargetBlock::VBlock,
        Some((line, s)) => match s.as_str() {
            "conformal" => TargetBlock::Conformal,
            "v-block" => TargetBlock::VBlock,
            "z-block" => TargetBlock::ZBlock,
            "radial" => TargetBlock::Radial,
            other => {
                return Err(Error::ConfigParse {
                    line: *line,
                    message: format!(
                        "perturbation.block must be conformal, v-block, z-block or radial, got `{other}`"
                    ),
                })
            }
        },
    };
    let perturbation = Perturbation {
        shape,
        amplitude: opt_num(&raw.amplitude, "perturbation.amplitude")?.unwrap_or(1e-3),
        center: opt_num(&raw.center, "perturbation.center")?.unwrap_or(0.0),
        width: opt_num(&raw.width, "perturbation.width")?.unwrap_or(1.0),
        block,
    };

    let (tau_default, delta_default) = default_weights(&spec);
    let tau = match opt_num(&raw.tau, "weights.tau")? {
        Some(v) => v,
        None => tau_default.ok_or(Error::ConfigValidation {
            key: "weights.tau".into(),
            message: "no default: the tau window of this model is empty; set weights.tau".into(),
        })?,
    };
    let delta = match opt_num(&raw.delta, "weights.delta")? {
        Some(v) => v,
        None => delta_default.ok_or(Error::ConfigValidation {
            key: "weights.delta".into(),
            message: "no default: the delta window of this model is empty; set weights.delta".into(),
        })?,
    };

    let config = FlowConfig {
        spec,
        grid,
        t_end: opt_num(&raw.t_end, "run.t_end")?.unwrap_or(5.0),
        cfl: opt_num(&raw.cfl, "run.cfl")?.unwrap_or(0.2),
        perturbation,
        monitor_stride: opt_num::<usize>(&raw.monitor_stride, "run.monitor_stride")?.unwrap_or(64),
        tau,
        delta,
    };
    config.validate()?;
    Ok(config)
}

fn parse_num<T: std::str::FromStr>(entry: &(usize, String), key: &str) -> Result<T, Error> {
    entry.1.parse().map_err(|_| Error::ConfigValidation {
        key: key.into(),
        message: format!("cannot parse `{}` (line {})", entry.1, entry.0),
    })
}

fn opt_num<T: std::str::FromStr>(
    entry: &Option<(usize, String)>,
    key: &str,
) -> Result<Option<T>, Error> {
    entry.as_ref().map(|e| parse_num(e, key)).transpose()
}
