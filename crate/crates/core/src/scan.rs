//! Grid scans written as CSV tables.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::Result;
use crate::frames::crosscheck;
use crate::geodesics::GeodesicPath;
use crate::metric::{ec1_grid, MetricBundle};
use crate::reversibility::{cal_e, cal_f, residual, s_grid};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header row, then one line per row with 17 significant digits.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// `(s, calE)` on the open interval (−b0, b0), `n_s` nodes including the excluded endpoints.
pub fn scan_e(bundle: &MetricBundle) -> Result<Table> {
    let phi = bundle.phi();
    let n = bundle.sampling().n_s.max(3);
    let b0 = phi.b0();
    let denom = (n - 1) as f64;
    let rows = (1..n - 1)
        .into_par_iter()
        .map(|i| {
            let s = b0 * (2.0 * i as f64 - denom) / denom;
            Ok(vec![s, cal_e(phi, s)?])
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["s", "calE"],
        rows,
    })
}

/// `(s, b, calF)` for `s ∈ [−b, b]` with `b` the sampled supremum of b(x).
pub fn scan_f(bundle: &MetricBundle) -> Result<Table> {
    let phi = bundle.phi();
    let (b, _) = bundle.b_max();
    let rows = s_grid(b, bundle.sampling().n_s)
        .into_par_iter()
        .map(|s| Ok(vec![s, b, cal_f(phi, s, b)?]))
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["s", "b", "calF"],
        rows,
    })
}

fn xt_grid(bundle: &MetricBundle) -> Vec<([f64; 2], f64)> {
    let s = bundle.sampling();
    let angles = s.angles();
    bundle
        .domain()
        .grid(s.n_x1, s.n_x2)
        .into_iter()
        .flat_map(|x| angles.iter().map(move |&t| (x, t)))
        .collect()
}

/// `(x1, x2, t, residual)` over the x-grid times `n_t` angles.
pub fn scan_residual(bundle: &MetricBundle) -> Result<Table> {
    let rows = xt_grid(bundle)
        .into_par_iter()
        .map(|(x, t)| Ok(vec![x[0], x[1], t, residual(bundle, x, t)?]))
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["x1", "x2", "t", "residual"],
        rows,
    })
}

/// `(x1, x2, t, direct, closed_form, gap)` over the x-grid times `n_t` angles.
pub fn scan_crosscheck(bundle: &MetricBundle) -> Result<Table> {
    let rows = xt_grid(bundle)
        .into_par_iter()
        .map(|(x, t)| {
            let c = crosscheck(bundle, x, t)?;
            Ok(vec![x[0], x[1], t, c.direct, c.closed_form, c.gap])
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["x1", "x2", "t", "direct", "closed_form", "gap"],
        rows,
    })
}

/// `(s, b, ec1_margin)` over the validation grid.
pub fn scan_ec1(bundle: &MetricBundle) -> Result<Table> {
    let rows = ec1_grid(bundle.phi(), bundle.validation().grid_n)
        .into_iter()
        .map(|(s, b, m)| Ok(vec![s, b, m?]))
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["s", "b", "ec1_margin"],
        rows,
    })
}

/// `step, x1, x2` for each sample.
pub fn write_path_csv(path: &GeodesicPath, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "step,x1,x2")?;
    for (k, x) in path.samples.iter().enumerate() {
        writeln!(w, "{k},{},{}", format_number(x[0]), format_number(x[1]))?;
    }
    Ok(())
}
