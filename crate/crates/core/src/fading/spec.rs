use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{
    make_antipodal, make_discrete, make_fat_tail, make_geometric, make_log_uniform,
    make_point_mass, make_strong_set, make_truncated_gaussian, make_uniform, FadingDistribution,
};
use crate::error::{Error, Result};

macro_rules! spec_enum {
    ($($body:tt)*) => {
        /// JSON description of a fading law, tagged by `"family"`.
        ///
        /// ```
        /// use wffd::fading::DistSpec;
        /// let spec = DistSpec::from_json(r#"{"family":"fat_tail","c":3,"M":4}"#).unwrap();
        /// assert_eq!(spec, DistSpec::FatTail { c: 3.0, m: 4 });
        /// ```
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
        pub enum DistSpec { $($body)* }

        // Externally tagged twin, used only to locate the offending field:
        // serde cannot report paths through an internally tagged enum.
        #[derive(Deserialize)]
        #[serde(rename_all = "snake_case", deny_unknown_fields)]
        #[allow(dead_code)]
        enum Located { $($body)* }
    };
}

spec_enum! {
    Antipodal {},
    Geometric {
        q: f64,
    },
    StrongSet {
        c: f64,
        #[serde(rename = "M")]
        m: u32,
    },
    FatTail {
        c: f64,
        #[serde(rename = "M")]
        m: u32,
    },
    /// `points` holds `[value, probability]` pairs.
    Discrete {
        points: Vec<[f64; 2]>,
    },
    PointMass {
        m: f64,
    },
    TruncatedGaussian {
        center: f64,
        halfwidth: f64,
        sigma: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    LogUniform {
        lo: f64,
        hi: f64,
    },
}

impl DistSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec_err = |path: &str, message: String| Error::Spec {
            path: path.to_string(),
            message,
        };
        let value: Value = serde_json::from_str(text).map_err(|e| spec_err(".", e.to_string()))?;
        let Value::Object(mut fields) = value.clone() else {
            return Err(spec_err(".", "expected a JSON object".into()));
        };
        let family = match fields.remove("family") {
            Some(Value::String(f)) => f,
            Some(other) => {
                return Err(spec_err(
                    "family",
                    format!("expected a string, got {other}"),
                ))
            }
            None => return Err(spec_err("family", "missing field".into())),
        };
        let mut outer = Map::new();
        outer.insert(family.clone(), Value::Object(fields));
        if let Err(e) = serde_path_to_error::deserialize::<_, Located>(Value::Object(outer)) {
            let path = e.path().to_string();
            let path = path
                .strip_prefix(family.as_str())
                .map(|p| p.trim_start_matches('.'))
                .filter(|p| !p.is_empty())
                .unwrap_or(if path.is_empty() || path == family {
                    "family"
                } else {
                    &path
                })
                .to_string();
            let message = e.into_inner().to_string();
            let path = if message.starts_with("unknown variant") {
                "family".into()
            } else {
                path
            };
            return Err(spec_err(&path, message));
        }
        serde_json::from_value(value).map_err(|e| spec_err(".", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<FadingDistribution> {
        match self {
            DistSpec::Antipodal {} => Ok(make_antipodal()),
            DistSpec::Geometric { q } => make_geometric(*q),
            DistSpec::StrongSet { c, m } => make_strong_set(*c, *m),
            DistSpec::FatTail { c, m } => make_fat_tail(*c, *m),
            DistSpec::Discrete { points } => {
                let (v, p): (Vec<f64>, Vec<f64>) = points.iter().map(|&[v, p]| (v, p)).unzip();
                make_discrete(&v, &p)
            }
            DistSpec::PointMass { m } => make_point_mass(*m),
            DistSpec::TruncatedGaussian {
                center,
                halfwidth,
                sigma,
            } => make_truncated_gaussian(*center, *halfwidth, *sigma),
            DistSpec::Uniform { lo, hi } => make_uniform(*lo, *hi),
            DistSpec::LogUniform { lo, hi } => make_log_uniform(*lo, *hi),
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Antipodal {} => write!(f, "antipodal"),
            DistSpec::Geometric { q } => write!(f, "geometric(q={q})"),
            DistSpec::StrongSet { c, m } => write!(f, "strong_set(c={c},M={m})"),
            DistSpec::FatTail { c, m } => write!(f, "fat_tail(c={c},M={m})"),
            DistSpec::Discrete { points } => write!(f, "discrete(n={})", points.len()),
            DistSpec::PointMass { m } => write!(f, "point_mass(m={m})"),
            DistSpec::TruncatedGaussian {
                center,
                halfwidth,
                sigma,
            } => write!(
                f,
                "truncated_gaussian(center={center},halfwidth={halfwidth},sigma={sigma})"
            ),
            DistSpec::Uniform { lo, hi } => write!(f, "uniform(lo={lo},hi={hi})"),
            DistSpec::LogUniform { lo, hi } => write!(f, "log_uniform(lo={lo},hi={hi})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        let s = DistSpec::from_json(r#"{"family":"geometric","q":0.5}"#).unwrap();
        assert_eq!(s, DistSpec::Geometric { q: 0.5 });
        let s =
            DistSpec::from_json(r#"{"family":"discrete","points":[[-1,0.5],[1,0.5]]}"#).unwrap();
        assert_eq!(s.build().unwrap(), make_antipodal());
        assert_eq!(
            DistSpec::from_json(r#"{"family":"antipodal"}"#).unwrap(),
            DistSpec::Antipodal {}
        );
    }

    #[test]
    fn error_points_at_field() {
        match DistSpec::from_json(r#"{"family":"strong_set","c":"three","M":3}"#) {
            Err(Error::Spec { path, .. }) => assert_eq!(path, "c"),
            other => panic!("unexpected {other:?}"),
        }
        let path_of = |text: &str| match DistSpec::from_json(text) {
            Err(Error::Spec { path, .. }) => path,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(path_of(r#"{"family":"cauchy"}"#), "family");
        assert_eq!(path_of(r#"{"q":0.5}"#), "family");
        assert_eq!(path_of(r#"{"family":"geometric"}"#), "family");
        assert_eq!(
            path_of(r#"{"family":"discrete","points":[[0,1],[1,"x"]]}"#),
            "points[1][1]"
        );
        assert!(DistSpec::from_json(r#"{"family":"geometric","q":0.5,"extra":1}"#).is_err());
    }

    #[test]
    fn display_ids() {
        assert_eq!(
            DistSpec::FatTail { c: 3.0, m: 4 }.to_string(),
            "fat_tail(c=3,M=4)"
        );
    }
}
