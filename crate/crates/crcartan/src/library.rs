//! The example manifolds shipped with the crate.

use std::path::Path;

use crate::spec::{parse_spec, ManifoldSpec};
use crate::Error;

pub struct Builtin {
    pub name: &'static str,
    pub text: &'static str,
    /// Box of sample points for randomized checks, per coordinate.
    pub sample: &'static [(f64, f64)],
}

pub const BUILTINS: [Builtin; 4] = [
    Builtin {
        name: "heisenberg",
        text: include_str!("../specs/heisenberg.crm"),
        sample: &[(-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)],
    },
    Builtin {
        name: "sphere3",
        text: include_str!("../specs/sphere3.crm"),
        // stay away from the chart's singular set sin b = 0
        sample: &[(-3.0, 3.0), (0.4, 2.7), (-3.0, 3.0)],
    },
    Builtin {
        name: "heis_pert",
        text: include_str!("../specs/heis_pert.crm"),
        // Q vanishes at the rotation-fixed line z = 0 and grows like |z|^2
        sample: &[(-0.5, 0.5), (0.25, 0.6), (-0.6, 0.6)],
    },
    Builtin {
        name: "heis_holo",
        text: include_str!("../specs/heis_holo.crm"),
        sample: &[(-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)],
    },
];

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

/// Parsed builtin; the shipped texts are known to be valid.
pub fn builtin_spec(name: &str) -> ManifoldSpec {
    let b = builtin(name).unwrap_or_else(|| panic!("no builtin spec {name}"));
    parse_spec(b.text).expect("shipped spec parses")
}

/// Loads a spec file, falling back to a builtin of the same name (with or
/// without the `.crm` extension) when no such file exists.
pub fn load(arg: &str) -> Result<ManifoldSpec, Error> {
    let path = Path::new(arg);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: arg.to_string(), source })?
    } else {
        let stem = arg.strip_suffix(".crm").unwrap_or(arg);
        match builtin(stem) {
            Some(b) => b.text.to_string(),
            None => {
                let source = std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or builtin spec");
                return Err(Error::Io { path: arg.to_string(), source });
            }
        }
    };
    parse_spec(&text).map_err(|err| Error::Parse { path: arg.to_string(), err })
}
