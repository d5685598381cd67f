//! The map file format.
//!
//! ```json
//! {"version": "1", "n_out": 2, "encoding": "images", "data": [...]}
//! ```
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//! With `"encoding": "choi"`, `data` is the `2·n_out`-sided Choi matrix; with
//! `"images"` it holds the four images of `E₁₁, E₁₂, E₂₁, E₂₂`. Floats are
//! written in shortest round-trip form, so parsing a written file gives back
//! the same bits.

use posmap::choi::{choi_from_map, map_from_choi, MapImages};
use posmap::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Choi,
    Images,
}

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapFile {
    version: String,
    n_out: usize,
    encoding: Encoding,
    data: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub map: MapImages,
    pub encoding: Encoding,
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows())
        .map(|i| m.row_slice(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &Rows, side: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != side || rows.iter().any(|r| r.len() != side) {
        return Err(CliError::Format(format!("{what} must be {side}x{side}")));
    }
    Ok(ComplexMatrix::from_fn(side, side, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

impl MapFile {
    pub fn new(map: MapImages, encoding: Encoding) -> Self {
        Self { map, encoding }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawMapFile = serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))?;
        if raw.version != VERSION {
            return Err(CliError::Format(format!("unsupported version {:?}", raw.version)));
        }
        let k = raw.n_out;
        if k == 0 {
            return Err(CliError::Format("n_out must be positive".into()));
        }
        let map = match raw.encoding {
            Encoding::Choi => {
                let rows: Rows = serde_json::from_value(raw.data).map_err(|e| CliError::Format(e.to_string()))?;
                map_from_choi(&rows_to_matrix(&rows, 2 * k, "Choi matrix")?)?
            }
            Encoding::Images => {
                let images: Vec<Rows> =
                    serde_json::from_value(raw.data).map_err(|e| CliError::Format(e.to_string()))?;
                if images.len() != 4 {
                    return Err(CliError::Format(format!("expected 4 images, found {}", images.len())));
                }
                let m: Vec<ComplexMatrix> = images
                    .iter()
                    .map(|r| rows_to_matrix(r, k, "image"))
                    .collect::<Result<_, _>>()?;
                let [a, b, c, d]: [ComplexMatrix; 4] = m.try_into().expect("length checked");
                MapImages::new([a, b, c, d])?
            }
        };
        Ok(Self {
            map,
            encoding: raw.encoding,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Format(e.to_string()))?;
        Ok((Self::parse(text)?, bytes))
    }

    pub fn to_json(&self) -> String {
        let data = match self.encoding {
            Encoding::Choi => serde_json::to_value(matrix_to_rows(&choi_from_map(&self.map))),
            Encoding::Images => serde_json::to_value(self.map.images().iter().map(matrix_to_rows).collect::<Vec<_>>()),
        }
        .expect("finite floats serialise");
        let raw = RawMapFile {
            version: VERSION.into(),
            n_out: self.map.n_out(),
            encoding: self.encoding,
            data,
        };
        let mut s = serde_json::to_string(&raw).expect("plain data serialises");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use posmap::random;

    fn sample_map() -> MapImages {
        let mut rng = random::rng(3);
        map_from_choi(&random::hermitian(&mut rng, 6).scale(1.0 / 3.0)).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for enc in [Encoding::Choi, Encoding::Images] {
            let f = MapFile::new(sample_map(), enc);
            let back = MapFile::parse(&f.to_json()).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_json(), f.to_json());
        }
    }

    #[test]
    fn rejects_bad_files() {
        let good = MapFile::new(sample_map(), Encoding::Images).to_json();
        assert!(MapFile::parse(&good.replace("\"1\"", "\"2\"")).is_err());
        assert!(MapFile::parse(&good.replace("\"n_out\":3", "\"n_out\":2")).is_err());
        assert!(MapFile::parse("{").is_err());
        assert!(MapFile::parse(r#"{"version":"1","n_out":1,"encoding":"choi","data":[[[1,0]]]}"#).is_err());
    }
}
