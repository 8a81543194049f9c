use std::io::Write;

use crate::error::{Error, Result};

/// Row-major block of samples with `ncols` coordinates per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    ncols: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn from_flat(ncols: usize, data: Vec<f64>) -> Self {
        assert!(ncols > 0 && data.len().is_multiple_of(ncols));
        Self { ncols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::validation("rows must be nonempty and of equal length"));
        }
        Ok(Self { ncols, data: rows.concat() })
    }

    pub fn nrows(&self) -> usize {
        self.data.len() / self.ncols
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.ncols..(k + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.ncols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// CSV with header `X1..Xd`. Values use Rust's shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = (1..=self.ncols).map(|j| format!("X{j}")).collect();
        w.write_record(&header).map_err(csv_err)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{f:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Applies `g` to every coordinate of every row.
pub fn apply_marginal_transform(samples: &Samples, g: impl Fn(f64) -> f64) -> Samples {
    Samples { ncols: samples.ncols, data: samples.data.iter().map(|&x| g(x)).collect() }
}

/// `x -> ceil(n x) / n`, mapping standard uniforms onto `{1/n, ..., 1}`.
pub fn ceiling_grid(n: u32) -> impl Fn(f64) -> f64 {
    let nf = f64::from(n);
    move |x| (nf * x).ceil() / nf
}
