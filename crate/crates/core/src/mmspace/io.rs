//! JSON file format for mm-spaces.
//!
//! ```json
//! { "format_version": 1,
//!   "label": "circle",
//!   "points": ["p0", "p1"],
//!   "metric": { "kind": "matrix", "rows": [[0], [1.5, 0]] },
//!   "weights": ["0.5", "1/3"] }
//! ```
//!
//! `metric.kind` is one of `matrix` (rows are either full or the lower
//! triangle including the diagonal), `euclidean` (`coords`), `sphere`
//! (`radius`, unit-vector `coords`, great-circle distance) or `torus`
//! (`periods`, `coords`, quotient distance). Weights are exact decimal or
//! `p/q` strings; zero-mass points are dropped on load. Balls are open
//! (`d < r`), neighborhoods closed (`d <= r`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MMSpace, Metric};
use crate::error::{Error, Result};
use crate::exact;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MetricFile {
    Matrix {
        rows: Vec<Vec<f64>>,
    },
    Euclidean {
        coords: Vec<Vec<f64>>,
    },
    Sphere {
        #[serde(default = "unit")]
        radius: f64,
        coords: Vec<[f64; 3]>,
    },
    Torus {
        periods: Vec<f64>,
        coords: Vec<Vec<f64>>,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    #[serde(default = "version")]
    format_version: u32,
    #[serde(default)]
    label: String,
    #[serde(default)]
    points: Vec<String>,
    metric: MetricFile,
    weights: Vec<String>,
}

fn version() -> u32 {
    FORMAT_VERSION
}

fn flatten(rows: &[Vec<f64>], width: usize, what: &str) -> Result<Vec<f64>> {
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidInput(format!("{what} rows must all have length {width}")));
    }
    Ok(rows.concat())
}

fn metric_from_file(m: MetricFile) -> Result<Metric> {
    Ok(match m {
        MetricFile::Matrix { rows } => {
            let n = rows.len();
            let full = rows.iter().all(|r| r.len() == n);
            let lower = rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
            if !full && !lower {
                return Err(Error::InvalidInput("matrix rows must be full or lower-triangular with diagonal".into()));
            }
            let mut data = vec![0.0; n * n];
            for (i, row) in rows.iter().enumerate() {
                for (j, &d) in row.iter().enumerate() {
                    data[i * n + j] = d;
                    if lower {
                        data[j * n + i] = d;
                    }
                }
            }
            Metric::Matrix { n, data }
        }
        MetricFile::Euclidean { coords } => {
            let dim = coords.first().map_or(1, Vec::len);
            Metric::Euclidean { dim, coords: flatten(&coords, dim, "euclidean")? }
        }
        MetricFile::Sphere { radius, coords } => Metric::Sphere { radius, coords },
        MetricFile::Torus { periods, coords } => {
            let k = periods.len();
            Metric::Torus { coords: flatten(&coords, k, "torus")?, periods }
        }
    })
}

fn metric_to_file(m: &Metric) -> MetricFile {
    match m {
        Metric::Matrix { n, data } => {
            MetricFile::Matrix { rows: (0..*n).map(|i| data[i * n..i * n + i + 1].to_vec()).collect() }
        }
        Metric::Euclidean { dim, coords } => {
            MetricFile::Euclidean { coords: coords.chunks(*dim).map(<[f64]>::to_vec).collect() }
        }
        Metric::Sphere { radius, coords } => MetricFile::Sphere { radius: *radius, coords: coords.clone() },
        Metric::Torus { periods, coords } => MetricFile::Torus {
            periods: periods.clone(),
            coords: coords.chunks(periods.len()).map(<[f64]>::to_vec).collect(),
        },
    }
}

impl MMSpace {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpaceFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!("unsupported format_version {}", file.format_version)));
        }
        let metric = metric_from_file(file.metric)?;
        let points =
            if file.points.is_empty() { (0..metric.len()).map(|i| i.to_string()).collect() } else { file.points };
        let weights = file.weights.iter().map(|w| exact::parse_rational(w)).collect::<Result<Vec<_>>>()?;
        MMSpace::new(file.label, points, metric, weights)
    }

    pub fn to_json(&self) -> String {
        let file = SpaceFile {
            format_version: FORMAT_VERSION,
            label: self.label().to_string(),
            points: self.points().to_vec(),
            metric: metric_to_file(self.metric()),
            weights: self.weights_exact().iter().map(exact::format_rational).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_lower_triangle_matrix() {
        let text = r#"{"label":"t","points":["a","b","c"],
            "metric":{"kind":"matrix","rows":[[0],[1,0],[2,1,0]]},
            "weights":["1","0.5","1/3"]}"#;
        let s = MMSpace::from_json(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.dist(2, 0), 2.0);
        assert_eq!(exact::format_rational(&s.weights_exact()[2]), "1/3");
    }

    #[test]
    fn reads_full_matrix_and_rejects_asymmetry() {
        let ok = r#"{"metric":{"kind":"matrix","rows":[[0,1],[1,0]]},"weights":["1","1"]}"#;
        assert_eq!(MMSpace::from_json(ok).unwrap().points(), &["0".to_string(), "1".to_string()]);
        let bad = r#"{"metric":{"kind":"matrix","rows":[[0,1],[2,0]]},"weights":["1","1"]}"#;
        assert!(MMSpace::from_json(bad).is_err());
        let ragged = r#"{"metric":{"kind":"matrix","rows":[[0,1],[1]]},"weights":["1","1"]}"#;
        assert!(MMSpace::from_json(ragged).is_err());
    }

    #[test]
    fn drops_zero_mass_points_on_load() {
        let text = r#"{"metric":{"kind":"euclidean","coords":[[0],[1],[2]]},"weights":["1","0","0.25"]}"#;
        let s = MMSpace::from_json(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), 2.0);
    }

    #[test]
    fn round_trips_every_metric_kind() {
        let metrics = vec![
            Metric::Matrix { n: 2, data: vec![0.0, 0.75, 0.75, 0.0] },
            Metric::Euclidean { dim: 2, coords: vec![0.0, 1.0, 2.5, -3.0] },
            Metric::Sphere { radius: 2.0, coords: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] },
            Metric::Torus { periods: vec![1.0, 2.0], coords: vec![0.1, 0.2, 0.9, 1.9] },
        ];
        for m in metrics {
            let s = MMSpace::from_f64_weights("rt", m, &[0.3, 0.7]).unwrap();
            let back = MMSpace::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.to_json(), s.to_json());
        }
    }
}
