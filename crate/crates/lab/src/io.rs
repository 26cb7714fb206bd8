//! Grid CSV input and the JSON/CSV artifact writers.

use std::fs;
use std::path::{Path, PathBuf};

use bergman_core::weights::GridSamples;
use bergman_core::DiscPoint;
use serde::Serialize;

use crate::config::ConfigError;

pub const TOOL: &str = "bergman-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reads `re,im,value` rows covering the full `n × n` grid on `[−1, 1]²`.
/// Without `n` the grid side is the square root of the row count. A header
/// line is skipped.
pub fn read_grid_csv(path: &Path, n: Option<usize>, field: &str) -> Result<GridSamples, ConfigError> {
    let err = |m: String| ConfigError::new(field, format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        if rec.len() != 3 {
            return Err(err(format!("row {} has {} fields, expected re,im,value", k + 1, rec.len())));
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push((v[0], v[1], v[2])),
            Err(_) if k == 0 => continue,
            Err(e) => return Err(err(format!("row {}: {e}", k + 1))),
        }
    }
    let n = match n {
        Some(n) => n,
        None => {
            let n = (rows.len() as f64).sqrt().round() as usize;
            if n * n != rows.len() {
                return Err(err(format!("{} rows do not form a square grid", rows.len())));
            }
            n
        }
    };
    if n < 2 || rows.len() != n * n {
        return Err(err(format!("expected {} rows for a {n}x{n} grid, found {}", n * n, rows.len())));
    }
    let h = (n - 1) as f64;
    let slot = |x: f64| -> Option<usize> {
        let f = (x + 1.0) * 0.5 * h;
        let i = f.round();
        ((f - i).abs() < 1e-6 && (0.0..=h).contains(&i)).then_some(i as usize)
    };
    let mut values = vec![f64::NAN; n * n];
    for (k, &(re, im, v)) in rows.iter().enumerate() {
        let (Some(j), Some(i)) = (slot(re), slot(im)) else {
            return Err(err(format!("row {}: ({re}, {im}) is not a grid node", k + 1)));
        };
        if !values[i * n + j].is_nan() {
            return Err(err(format!("row {}: node ({re}, {im}) given twice", k + 1)));
        }
        if !(v.is_finite() && v >= 0.0) {
            return Err(err(format!("row {}: value {v} must be finite and non-negative", k + 1)));
        }
        values[i * n + j] = v;
    }
    GridSamples::new(n, values).map_err(|e| err(e.to_string()))
}

/// Stamp carried by every JSON artifact.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config_hash: &'a str,
    subcommand: &'a str,
    payload: &'a T,
}

/// Output directory of one run or sweep cell.
#[derive(Debug, Clone)]
pub struct ArtifactDir {
    pub dir: PathBuf,
    pub config_hash: String,
    pub subcommand: String,
    written: Vec<PathBuf>,
}

impl ArtifactDir {
    pub fn create(dir: PathBuf, config_hash: String, subcommand: &str) -> std::io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(ArtifactDir {
            dir,
            config_hash,
            subcommand: subcommand.to_string(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn json_bytes<T: Serialize>(&self, payload: &T) -> Vec<u8> {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            config_hash: &self.config_hash,
            subcommand: &self.subcommand,
            payload,
        };
        let mut bytes = serde_json::to_vec_pretty(&env).expect("artifact serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, payload: &T) -> std::io::Result<PathBuf> {
        let bytes = self.json_bytes(payload);
        self.write_raw(name, &bytes)
    }

    /// CSV with a leading `# tool version config_hash` comment line.
    pub fn write_csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> std::io::Result<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let mut buf = format!("# {TOOL} {VERSION} config_hash={}\n", self.config_hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        self.write_raw(name, &buf)
    }

    /// `re,im,value` profile with a JSON sidecar holding `parameters`.
    pub fn write_profile<P: Serialize>(&mut self, stem: &str, points: &[DiscPoint], values: &[f64], parameters: &P) -> std::io::Result<()> {
        let rows = points
            .iter()
            .zip(values)
            .map(|(z, v)| [fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*v)]);
        self.write_csv(&format!("{stem}.csv"), &["re", "im", "value"], rows)?;
        self.write_json(&format!("{stem}.json"), parameters)?;
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> std::io::Result<PathBuf> {
        self.write_raw(name, text.as_bytes())
    }

    fn write_raw(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Shortest round-trip formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn grid_file(n: usize, skip: Option<usize>) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "re,im,value").unwrap();
        let h = (n - 1) as f64;
        let mut k = 0;
        // Rows deliberately column-major.
        for j in 0..n {
            for i in 0..n {
                if Some(k) != skip {
                    let (re, im) = (-1.0 + 2.0 * j as f64 / h, -1.0 + 2.0 * i as f64 / h);
                    writeln!(f, "{re},{im},{}", 1.0 + re * re + 10.0 * (im + 1.0)).unwrap();
                }
                k += 1;
            }
        }
        f
    }

    #[test]
    fn grid_csv_is_placed_by_coordinates() {
        let f = grid_file(5, None);
        let g = read_grid_csv(f.path(), Some(5), "weight.file").unwrap();
        // Row i = 1 is im = −0.5, column j = 4 is re = 1.
        assert_eq!(g.values()[5 + 4], 1.0 + 1.0 + 5.0);
        let h = read_grid_csv(f.path(), None, "measure.file").unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn incomplete_grid_is_rejected() {
        let f = grid_file(4, Some(7));
        let e = read_grid_csv(f.path(), Some(4), "weight.file").unwrap_err();
        assert_eq!(e.field, "weight.file");
        assert!(read_grid_csv(f.path(), None, "measure.file").is_err());
    }

    #[test]
    fn artifacts_embed_hash_and_version() {
        let d = tempfile::tempdir().unwrap();
        let mut a = ArtifactDir::create(d.path().join("x"), "abc".into(), "lattice").unwrap();
        let p = a.write_json("r.json", &[1.5, 2.0]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&fs::read(p).unwrap()).unwrap();
        assert_eq!(v["config_hash"], "abc");
        assert_eq!(v["version"], VERSION);
        let c = a.write_csv("k.csv", &["k", "lambda"], [["0".to_string(), fmt_f64(0.5)]]).unwrap();
        let text = fs::read_to_string(c).unwrap();
        assert!(text.starts_with("# bergman-lab"));
        assert!(text.contains("k,lambda\n0,0.5\n"));
    }
}
